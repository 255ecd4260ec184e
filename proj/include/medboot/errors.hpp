#pragma once

#include <stdexcept>
#include <string>

namespace medboot {

enum class ErrorKind {
  input_error,
  missing_column,
  non_numeric_cell,
  empty_file,
  singular_design,
  degenerate_response,
  non_convergence,
  separation_suspected,
  probability_boundary,
  degenerate_resampling,
  grid_exhausted,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::input_error: return "InputError";
    case ErrorKind::missing_column: return "MissingColumn";
    case ErrorKind::non_numeric_cell: return "NonNumericCell";
    case ErrorKind::empty_file: return "EmptyFile";
    case ErrorKind::singular_design: return "SingularDesign";
    case ErrorKind::degenerate_response: return "DegenerateResponse";
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::separation_suspected: return "SeparationSuspected";
    case ErrorKind::probability_boundary: return "ProbabilityBoundary";
    case ErrorKind::degenerate_resampling: return "DegenerateResampling";
    case ErrorKind::grid_exhausted: return "GridExhausted";
  }
  return "UnknownError";
}

// Process exit code the CLI maps each failure class to:
// 2 = bad input, 3 = numerical failure, 4 = degenerate resampling.
inline int error_exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::input_error:
    case ErrorKind::missing_column:
    case ErrorKind::non_numeric_cell:
    case ErrorKind::empty_file:
      return 2;
    case ErrorKind::degenerate_resampling:
      return 4;
    default:
      return 3;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }
  int exit_code() const { return error_exit_code(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace medboot
