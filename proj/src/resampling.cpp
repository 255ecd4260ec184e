#include "medboot/resampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "medboot/errors.hpp"

namespace medboot {

namespace {

constexpr int kMaxRedrawAttempts = 100;

// Failure classes that mark a single resampled dataset as unusable; the
// replicate is redrawn rather than aborting the run.
bool retryable(ErrorKind k) {
  switch (k) {
    case ErrorKind::singular_design:
    case ErrorKind::degenerate_response:
    case ErrorKind::non_convergence:
    case ErrorKind::separation_suspected:
    case ErrorKind::probability_boundary:
      return true;
    default:
      return false;
  }
}

}  // namespace

const char* scheme_name(BootstrapScheme s) {
  return s == BootstrapScheme::pairs ? "pairs" : "projected";
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MEDBOOT_WORKERS")) {
    int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

BootstrapDistribution run_bootstrap(const BootstrapConfig& config,
                                    const std::string& method,
                                    const ReplicateFn& fn) {
  if (config.b < 1)
    throw_error(ErrorKind::input_error, "bootstrap replicate count must be >= 1");

  const int b = config.b;
  std::vector<double> slots(static_cast<std::size_t>(b));
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto fail = [&](std::exception_ptr err) {
    std::lock_guard<std::mutex> lock(err_mu);
    if (!first_error) first_error = err;
    stop.store(true, std::memory_order_relaxed);
  };

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const int r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= b) return;
      try {
        const std::uint64_t replicate_seed =
            rng::derive_seed(config.seed, static_cast<std::uint64_t>(r));
        bool done = false;
        for (int k = 0; k < kMaxRedrawAttempts && !done; ++k) {
          rng::Engine engine(
              rng::derive_seed(replicate_seed, static_cast<std::uint64_t>(k)));
          std::optional<double> value;
          try {
            value = fn(engine);
          } catch (const Error& err) {
            if (!retryable(err.kind())) throw;
          }
          if (value.has_value() && std::isfinite(*value)) {
            slots[static_cast<std::size_t>(r)] = *value;
            done = true;
          }
        }
        if (!done)
          throw_error(ErrorKind::degenerate_resampling,
                      "replicate " + std::to_string(r) + " stayed degenerate "
                      "after " + std::to_string(kMaxRedrawAttempts) +
                      " redraw attempts");
      } catch (...) {
        fail(std::current_exception());
        return;
      }
    }
  };

  const int workers = std::min(resolve_workers(config.workers), b);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(slots.begin(), slots.end());
  return BootstrapDistribution{std::move(slots), method, config};
}

std::vector<std::int32_t> draw_pair_indices(std::int64_t n, rng::Engine& e) {
  std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
  const auto bound = static_cast<std::int32_t>(n);
  for (auto& i : idx) i = e.next_index(bound);
  return idx;
}

double quantile_sorted(const std::vector<double>& sorted_samples, double p) {
  if (sorted_samples.empty())
    throw_error(ErrorKind::input_error, "quantile of an empty distribution");
  if (!(p > 0.0 && p < 1.0))
    throw_error(ErrorKind::input_error, "quantile probability must be in (0,1)");
  const auto b = static_cast<double>(sorted_samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * b));
  rank = std::clamp<std::size_t>(rank, 1, sorted_samples.size());
  return sorted_samples[rank - 1];
}

double empirical_quantile(const BootstrapDistribution& dist, double p) {
  return quantile_sorted(dist.samples, p);
}

double pvalue_sorted(const std::vector<double>& sorted_samples,
                     double observed) {
  if (sorted_samples.empty())
    throw_error(ErrorKind::input_error, "p-value of an empty distribution");
  const auto b = static_cast<double>(sorted_samples.size());
  const auto at_most = static_cast<double>(
      std::upper_bound(sorted_samples.begin(), sorted_samples.end(), observed) -
      sorted_samples.begin());
  const auto at_least = static_cast<double>(
      sorted_samples.end() -
      std::lower_bound(sorted_samples.begin(), sorted_samples.end(), observed));
  const double p = 2.0 * std::min(1.0 + at_most, 1.0 + at_least) / (b + 1.0);
  return std::min(1.0, p);
}

double two_sided_pvalue(const BootstrapDistribution& dist, double observed) {
  return pvalue_sorted(dist.samples, observed);
}

}  // namespace medboot
