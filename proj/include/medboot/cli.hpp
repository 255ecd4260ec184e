#pragma once

// Command-line entry point, exposed as a library function so tests can call
// it in-process as well as through the installed binary.
//
// Subcommands: run (one test on a CSV), screen (two-step mediator
// screening), simulate (Monte-Carlo study from a JSON config), tune
// (double-bootstrap threshold selection), confirm (null-pattern
// diagnostics). Results go to stdout as JSON with a trailing wall_time_s
// field; --out writes the same JSON without timing and --csv writes long
// tables, so file outputs from equal seeds are byte-identical whatever the
// worker count.
//
// Exit codes: 0 success, 2 bad input (CLI, CSV, or config errors),
// 3 numerical failure, 4 degenerate resampling.

namespace medboot {

int run_cli(int argc, const char* const* argv);

}  // namespace medboot
