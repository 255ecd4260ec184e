#include "medboot/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

#include "medboot/errors.hpp"
#include "medboot/kernels.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/rng.hpp"

namespace medboot {
namespace {

// col - (<axis, col> / <axis, axis>) axis. axis_ss is <axis, axis>.
std::vector<double> project_out(const std::vector<double>& col,
                                const std::vector<double>& axis,
                                double axis_ss) {
  const std::size_t n = col.size();
  const double q = kernels::dot(axis.data(), col.data(), n) / axis_ss;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = col[i] - q * axis[i];
  return out;
}

void require_single_mediator(const Dataset& data) {
  if (data.j() != 1)
    throw_error(ErrorKind::input_error,
                "the tuning and confirmatory procedures handle exactly one "
                "mediator");
}

Dataset resample_rows(const Dataset& data,
                      const std::vector<std::int32_t>& idx) {
  const std::size_t n = idx.size();
  Dataset out = data;
  kernels::gather(out.exposure.data(), data.exposure.data(), idx.data(), n);
  kernels::gather(out.mediators[0].data(), data.mediators[0].data(),
                  idx.data(), n);
  kernels::gather(out.outcome.data(), data.outcome.data(), idx.data(), n);
  for (std::size_t k = 0; k < data.covariates.size(); ++k)
    kernels::gather(out.covariates[k].data(), data.covariates[k].data(),
                    idx.data(), n);
  return out;
}

// Failures tied to one outer resample are retried; anything else reflects
// the configuration and propagates.
bool outer_retryable(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::singular_design:
    case ErrorKind::degenerate_response:
    case ErrorKind::non_convergence:
    case ErrorKind::separation_suspected:
    case ErrorKind::probability_boundary:
    case ErrorKind::degenerate_resampling:
      return true;
    default:
      return false;
  }
}

void require_sample(const std::vector<double>& sample, const char* what) {
  if (sample.empty())
    throw_error(ErrorKind::input_error,
                std::string(what) + " needs a nonempty p-value sample");
}

}  // namespace

const char* processing_mode_name(ProcessingMode mode) {
  switch (mode) {
    case ProcessingMode::alpha: return "alpha";
    case ProcessingMode::beta: return "beta";
    case ProcessingMode::both: return "both";
  }
  return "?";
}

ProcessedDataset residual_project(const Dataset& data, ProcessingMode mode) {
  data.validate();
  require_single_mediator(data);

  ProcessedDataset out;
  out.mode = mode;
  out.data = data;
  Dataset& d = out.data;

  if (mode == ProcessingMode::alpha || mode == ProcessingMode::both) {
    const std::vector<double>& s = d.exposure;
    const double ss = kernels::sumsq(s.data(), s.size());
    if (!(ss > 0.0))
      throw_error(ErrorKind::singular_design,
                  "the exposure column is identically zero; nothing is "
                  "orthogonal to it");
    d.mediators[0] = project_out(d.mediators[0], s, ss);
    for (auto& x : d.covariates) x = project_out(x, s, ss);
  }
  if (mode == ProcessingMode::beta || mode == ProcessingMode::both) {
    // Project off the outcome model's effective mediator regressor: the
    // mediator residualized on (covariates, exposure). Projecting off the
    // raw mediator column would also turn the replaced exposure orthogonal
    // to the mediator, silently zeroing the mediator-model coefficient and
    // collapsing every beta-processed dataset into the doubly-degenerate
    // case. The residualized column is already orthogonal to the exposure
    // and covariates, so replacing them is a numerical no-op, the mediator
    // model keeps its fit, and the refitted outcome-model coefficient of
    // the mediator is still exactly zero.
    Columns adjusters;
    adjusters.reserve(d.covariates.size() + 1);
    for (const auto& x : d.covariates) adjusters.push_back(&x);
    adjusters.push_back(&d.exposure);
    const auto fwl = fwl_project(d.mediators[0], adjusters);
    const std::vector<double>& w = fwl.projected;
    const double ww = kernels::sumsq(w.data(), w.size());
    const double mm =
        kernels::sumsq(d.mediators[0].data(), d.mediators[0].size());
    if (!(ww > 1e-12 * mm))
      throw_error(ErrorKind::singular_design,
                  "the mediator column is collinear with the exposure and "
                  "covariates; nothing identifies its outcome coefficient");
    d.outcome = project_out(d.outcome, w, ww);
    d.exposure = project_out(d.exposure, w, ww);
    for (auto& x : d.covariates) x = project_out(x, w, ww);
  }
  return out;
}

DoubleBootstrapResult double_bootstrap(const Dataset& data,
                                       const DoubleBootstrapConfig& config) {
  data.validate();
  require_single_mediator(data);
  if (config.b_outer < 1 || config.b_inner < 1)
    throw_error(ErrorKind::input_error,
                "both bootstrap layers need at least one replicate");
  threshold_lambda_n(config.lambda, data.n);  // validates lambda >= 0

  const int b_outer = config.b_outer;
  std::vector<std::optional<double>> slots(
      static_cast<std::size_t>(b_outer));
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
      if (r >= b_outer) return;
      const std::uint64_t outer_seed =
          rng::derive_seed(config.seed, static_cast<std::uint64_t>(r));
      try {
        for (int attempt = 0; attempt < 2; ++attempt) {
          rng::Engine index_engine(rng::derive_seed(
              outer_seed, static_cast<std::uint64_t>(2 * attempt)));
          try {
            const auto idx = draw_pair_indices(data.n, index_engine);
            const Dataset resample = resample_rows(data, idx);
            AbConfig inner;
            inner.lambda = config.lambda;
            inner.bootstrap.b = config.b_inner;
            inner.bootstrap.seed = rng::derive_seed(
                outer_seed, static_cast<std::uint64_t>(2 * attempt + 1));
            inner.bootstrap.scheme = BootstrapScheme::pairs;
            inner.bootstrap.workers = 1;
            slots[static_cast<std::size_t>(r)] =
                adaptive_poc_test(resample, inner).p_value;
            break;
          } catch (const Error& err) {
            if (!outer_retryable(err.kind())) throw;
          }
        }
      } catch (...) {
        fail(std::current_exception());
        return;
      }
    }
  };

  const int workers = std::min(resolve_workers(config.workers), b_outer);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  DoubleBootstrapResult result;
  result.lambda = config.lambda;
  result.p_values.reserve(static_cast<std::size_t>(b_outer));
  for (const auto& slot : slots) {
    if (slot)
      result.p_values.push_back(*slot);
    else
      ++result.missing;
  }
  std::sort(result.p_values.begin(), result.p_values.end());
  return result;
}

double ks_uniform_distance(const std::vector<double>& sample) {
  require_sample(sample, "the KS distance");
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(sorted.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = sorted[i];
    const double hi = (static_cast<double>(i) + 1.0) / dn - p;
    const double lo = p - static_cast<double>(i) / dn;
    dist = std::max(dist, std::max(hi, lo));
  }
  return dist;
}

double ks_critical_value(double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw_error(ErrorKind::input_error,
                "the KS level must lie strictly between 0 and 1");
  return std::sqrt(-0.5 * std::log(level / 2.0));
}

bool ks_uniform_pass(const std::vector<double>& sample, double level) {
  const double dn = static_cast<double>(sample.size());
  return std::sqrt(dn) * ks_uniform_distance(sample) <=
         ks_critical_value(level);
}

PvalueShape classify_pvalues(const std::vector<double>& sample) {
  require_sample(sample, "shape classification");
  PvalueShape shape;
  std::size_t below = 0;
  for (double p : sample)
    if (p < 0.05) ++below;
  shape.fraction_below_005 =
      static_cast<double>(below) / static_cast<double>(sample.size());
  shape.conservative = shape.fraction_below_005 < 0.025;
  shape.bent_up = shape.fraction_below_005 > 0.10;
  shape.uniform = ks_uniform_pass(sample, 0.01);
  return shape;
}

LambdaSelection select_lambda(const Dataset& data,
                              const SelectLambdaConfig& config) {
  if (config.grid.empty())
    throw_error(ErrorKind::input_error, "the lambda grid is empty");
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    if (!std::isfinite(config.grid[i]) || config.grid[i] < 0.0)
      throw_error(ErrorKind::input_error,
                  "lambda grid values must be finite and nonnegative");
    if (i > 0 && !(config.grid[i] > config.grid[i - 1]))
      throw_error(ErrorKind::input_error,
                  "the lambda grid must be strictly ascending");
  }

  const auto d_alpha = residual_project(data, ProcessingMode::alpha);
  const auto d_beta = residual_project(data, ProcessingMode::beta);

  DoubleBootstrapConfig db;
  db.b_outer = config.b_outer;
  db.b_inner = config.b_inner;
  db.lambda = 0.0;
  db.workers = config.workers;

  db.seed = rng::derive_seed(config.seed, 1);
  const auto alpha_sample = double_bootstrap(d_alpha.data, db);
  db.seed = rng::derive_seed(config.seed, 2);
  const auto beta_sample = double_bootstrap(d_beta.data, db);

  LambdaSelection sel;
  sel.alpha_shape = classify_pvalues(alpha_sample.p_values);
  sel.beta_shape = classify_pvalues(beta_sample.p_values);

  if (!(sel.alpha_shape.conservative && sel.beta_shape.conservative)) {
    // The null is not in its degenerate corner; the threshold barely
    // matters, so keep the default scale.
    sel.lambda = 2.0;
    sel.degenerate_case = false;
    sel.note = "non-degenerate case";
    return sel;
  }

  sel.degenerate_case = true;
  sel.note = "degenerate case";
  const auto d_both = residual_project(data, ProcessingMode::both);
  const std::uint64_t grid_seed = rng::derive_seed(config.seed, 3);
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    db.lambda = config.grid[i];
    db.seed = rng::derive_seed(grid_seed, static_cast<std::uint64_t>(i));
    const auto sample = double_bootstrap(d_both.data, db);
    LambdaDiagnostic diag;
    diag.lambda = config.grid[i];
    diag.ks_distance = ks_uniform_distance(sample.p_values);
    diag.passed = ks_uniform_pass(sample.p_values, 0.01);
    sel.grid.push_back(diag);
    if (diag.passed) {
      sel.lambda = diag.lambda;
      return sel;
    }
  }
  throw_error(ErrorKind::grid_exhausted,
              "no lambda in the grid gave uniform double-bootstrap p-values "
              "at KS level 0.01; widen the grid");
}

const char* confirmatory_pattern_name(ConfirmatoryPattern pattern) {
  switch (pattern) {
    case ConfirmatoryPattern::both_zero: return "both-zero evidence";
    case ConfirmatoryPattern::alpha_zero: return "alpha-zero evidence";
    case ConfirmatoryPattern::beta_zero: return "beta-zero evidence";
    case ConfirmatoryPattern::alternative: return "alternative evidence";
    case ConfirmatoryPattern::inconclusive: return "inconclusive";
  }
  return "?";
}

ConfirmatoryResult confirmatory_analysis(const Dataset& data,
                                         const ConfirmatoryConfig& config) {
  const auto d_alpha = residual_project(data, ProcessingMode::alpha);
  const auto d_beta = residual_project(data, ProcessingMode::beta);

  DoubleBootstrapConfig db;
  db.b_outer = config.b_outer;
  db.b_inner = config.b_inner;
  db.lambda = config.lambda;
  db.workers = config.workers;

  ConfirmatoryResult result;
  db.seed = rng::derive_seed(config.seed, 1);
  result.observed = double_bootstrap(data, db);
  db.seed = rng::derive_seed(config.seed, 2);
  result.alpha_processed = double_bootstrap(d_alpha.data, db);
  db.seed = rng::derive_seed(config.seed, 3);
  result.beta_processed = double_bootstrap(d_beta.data, db);

  result.observed_shape = classify_pvalues(result.observed.p_values);
  result.alpha_shape = classify_pvalues(result.alpha_processed.p_values);
  result.beta_shape = classify_pvalues(result.beta_processed.p_values);

  const PvalueShape& obs = result.observed_shape;
  const PvalueShape& a = result.alpha_shape;
  const PvalueShape& b = result.beta_shape;
  if (obs.conservative && a.conservative && b.conservative)
    result.pattern = ConfirmatoryPattern::both_zero;
  else if (obs.uniform && a.uniform && b.conservative)
    result.pattern = ConfirmatoryPattern::alpha_zero;
  else if (obs.uniform && b.uniform && a.conservative)
    result.pattern = ConfirmatoryPattern::beta_zero;
  else if (obs.bent_up && a.uniform && b.uniform)
    result.pattern = ConfirmatoryPattern::alternative;
  else
    result.pattern = ConfirmatoryPattern::inconclusive;
  return result;
}

}  // namespace medboot
