#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "medboot/rng.hpp"

// Deterministic nonparametric bootstrap engine. Replicate r consumes only a
// substream derived from (seed, r), results land in slot r, and the final
// distribution is sorted — so the outcome is bit-identical for any worker
// count and any scheduling order.

namespace medboot {

enum class BootstrapScheme { pairs, projected };

const char* scheme_name(BootstrapScheme s);

struct BootstrapConfig {
  int b = 500;               // replicate count, >= 1
  std::uint64_t seed = 0;    // master seed for the replicate substreams
  BootstrapScheme scheme = BootstrapScheme::pairs;
  int workers = 0;           // advisory; 0 = MEDBOOT_WORKERS or hardware
};

struct BootstrapDistribution {
  std::vector<double> samples;  // sorted ascending, length == config.b
  std::string method;
  BootstrapConfig config;
};

// Effective worker count: `requested` if positive, else the MEDBOOT_WORKERS
// environment variable, else hardware concurrency (at least 1).
int resolve_workers(int requested);

// One bootstrap statistic evaluation. The engine passed in is positioned at
// the start of the replicate's substream; the closure must draw everything
// it needs from it and nothing else. Returning nullopt marks the draw as
// degenerate and triggers a redraw on a freshly derived substream.
using ReplicateFn = std::function<std::optional<double>(rng::Engine&)>;

// Runs `fn` for replicates 0..b-1 in parallel. A degenerate draw — nullopt,
// a non-finite value, or a numerical Error thrown by the closure
// (SingularDesign, DegenerateResponse, NonConvergence, SeparationSuspected,
// ProbabilityBoundary) — is redrawn on substream derive(derive(seed, r), k)
// for attempts k = 0..99; a replicate that stays degenerate for 100
// attempts aborts the whole run with DegenerateResampling. Other errors
// propagate unchanged.
BootstrapDistribution run_bootstrap(const BootstrapConfig& config,
                                    const std::string& method,
                                    const ReplicateFn& fn);

// n indices drawn uniformly with replacement from {0..n-1}.
std::vector<std::int32_t> draw_pair_indices(std::int64_t n, rng::Engine& e);

// The ceil(p*B)-th smallest sample (1-based, clamped to [1, B]); 0 < p < 1.
double quantile_sorted(const std::vector<double>& sorted_samples, double p);
double empirical_quantile(const BootstrapDistribution& dist, double p);

// Add-one smoothed two-sided percentile p-value:
// min(1, 2 * min(1 + #{u <= t}, 1 + #{u >= t}) / (B + 1)), always >= 2/(B+1).
double pvalue_sorted(const std::vector<double>& sorted_samples,
                     double observed);
double two_sided_pvalue(const BootstrapDistribution& dist, double observed);

}  // namespace medboot
