#include "tanred/reducer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "tanred/error.hpp"

namespace tanred {

const char* stop_reason_name(StopReason r) noexcept {
  switch (r) {
    case StopReason::MaxOrder: return "max-order";
    case StopReason::GammaTol: return "gamma-tol";
    case StopReason::ErrorTol: return "error-tol";
    case StopReason::MaxIters: return "max-iters";
    case StopReason::Failure: return "failure";
  }
  return "unknown";
}

void ReducerConfig::validate() const {
  strategy.validate();
  if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be at least 1");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be at least 1");
  if (!(gamma_rel_tol > 0.0 && gamma_rel_tol < 1.0))
    throw Error(ErrorKind::InvalidArgument, "gamma_rel_tol must lie in (0, 1)");
  if (error_rel_tol && !(*error_rel_tol > 0.0 && *error_rel_tol < 1.0))
    throw Error(ErrorKind::InvalidArgument, "error_rel_tol must lie in (0, 1)");
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in (0, 1]");
  if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mu must be >= 0");
}

std::vector<double> fallback_grid(const StateSpace& sys, int points) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const CVector poles = sys.poles();
  for (Index i = 0; i < poles.size(); ++i) {
    const double m = std::abs(poles(i));
    if (m > 0.0) lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (!(hi > 0.0)) lo = hi = 1.0;
  const double a = std::log10(lo) - 3.0;
  const double b = std::log10(hi) + 3.0;
  std::vector<double> grid{0.0};
  for (int i = 0; i < points; ++i)
    grid.push_back(std::pow(10.0, a + (b - a) * i / static_cast<double>(points - 1)));
  return grid;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<InterpPoint> points_of(const InterpData& data) {
  std::vector<InterpPoint> pts;
  pts.reserve(data.blocks().size());
  for (const auto& b : data.blocks()) pts.push_back(b.point);
  return pts;
}

}  // namespace

ReductionTrace reduce(const StateSpace& sys, const ReducerConfig& cfg, bool keep_models) {
  cfg.validate();
  sys.require_no_imaginary_poles();
  const bool real = sys.is_real();

  ReductionTrace trace;
  const GramianResult theta = controllability_gramian(sys);
  const HessenbergResolvent g_res(sys);
  trace.data = InterpData::empty_for(sys);
  const WeightSolution sol0 = solve_weights(sys, theta, trace.data);
  trace.gamma0 = sol0.gamma;
  trace.w = sol0.w;
  trace.reduced = StateSpace::static_gain(sys.D(), sys.field());

  std::optional<H2ErrorEvaluator> evaluator;
  if (cfg.track_error) evaluator.emplace(sys, fallback_grid(sys));
  const double ref_norm = std::sqrt(std::max(0.0, trace.gamma0));

  std::vector<FreqResponse> g_on_grid;
  if (cfg.strategy.kind == StrategyKind::Discrete) {
    g_on_grid.reserve(cfg.strategy.grid.size());
    for (const double w : cfg.strategy.grid)
      g_on_grid.push_back({w, g_res.response(Complex(0.0, w))});
  }
  SplitMix64 rng(cfg.strategy.seed);

  if (!(trace.gamma0 > 0.0)) {
    trace.stop = StopReason::GammaTol;
    return trace;
  }

  for (int iter = 1;; ++iter) {
    if (trace.data.total_order() >= cfg.max_order) {
      trace.stop = StopReason::MaxOrder;
      break;
    }
    if (iter > cfg.max_iters) {
      trace.stop = StopReason::MaxIters;
      break;
    }
    const auto t0 = Clock::now();
    TraceRow row;
    row.iter = iter;
    InterpData data;
    WeightSolution sol;
    StateSpace r;
    SplitMix64 next_rng = rng;
    try {
      double omega = 0.0;
      switch (cfg.strategy.kind) {
        case StrategyKind::MaxError:
          omega = select_max_error(sys, trace.reduced, cfg.strategy.peak_rtol);
          break;
        case StrategyKind::Discrete:
          omega = select_discrete(std::span<const FreqResponse>(g_on_grid), trace.reduced);
          break;
        case StrategyKind::Random: {
          const RandomPick pick = select_random(g_res, trace.reduced, cfg.strategy, rng);
          omega = pick.omega;
          next_rng = pick.rng;
          break;
        }
      }
      if (real) omega = std::abs(omega);
      Refinement ref = refine(g_res, real, points_of(trace.data), omega, cfg.mu, cfg.rho);
      // Do not run past max_order by more than one rank step.
      const Index step = real && ref.omega != 0.0 ? 2 : 1;
      const Index room = std::max<Index>(1, (cfg.max_order - trace.data.total_order()) / step);
      ref.r_max = std::min(ref.r_max, ref.r_min + room - 1);
      const InterpPoint pt = truncated_point(ref.response, ref.r_min, ref.r_max);
      data = ref.merged_index
                 ? extend_point(trace.data, g_res, static_cast<Index>(*ref.merged_index), pt)
                 : append_point(trace.data, g_res, pt);
      sol = solve_weights(sys, theta, data);
      r = realize_r(data, sol.w, sys.D());
      row.omega = ref.omega;
      row.r_min = ref.r_min;
      row.r_max = ref.r_max;
    } catch (const Error& e) {
      trace.stop = StopReason::Failure;
      trace.failure = std::string(e.name()) + ": " + e.what();
      break;
    }

    rng = next_rng;
    row.order = data.total_order();
    row.gamma = sol.gamma;
    row.stable = r.is_stable();
    row.error_norm = std::numeric_limits<double>::quiet_NaN();
    if (evaluator) {
      try {
        const ErrorNorm en = (*evaluator)(r);
        row.error_norm = en.value;
        row.error_approximate = en.approximate;
      } catch (const Error&) {
        // Leave NaN; the iterate itself is still valid.
      }
    }
    row.seconds = cfg.timing ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0;
    trace.data = std::move(data);
    trace.w = sol.w;
    trace.reduced = r;
    if (keep_models) trace.models.push_back(r);
    trace.rows.push_back(row);

    if (row.gamma <= cfg.gamma_rel_tol * trace.gamma0) {
      trace.stop = StopReason::GammaTol;
      break;
    }
    if (cfg.error_rel_tol && std::isfinite(row.error_norm) &&
        row.error_norm <= *cfg.error_rel_tol * ref_norm) {
      trace.stop = StopReason::ErrorTol;
      break;
    }
  }
  return trace;
}

std::vector<CompareRow> sweep_orders(const StateSpace& sys, ReducerConfig cfg,
                                     const std::vector<Index>& orders, bool baseline,
                                     ReductionTrace* trace_out) {
  std::vector<CompareRow> table;
  if (orders.empty()) return table;
  for (const Index k : orders)
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "sweep_orders: orders must be >= 1");
  cfg.max_order = *std::max_element(orders.begin(), orders.end());
  cfg.track_error = true;
  ReductionTrace trace = reduce(sys, cfg);
  const std::vector<double> grid = fallback_grid(sys);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // The static model R = D is the order-0 iterate.
  const double err0 = std::sqrt(std::max(0.0, trace.gamma0));

  for (const Index k : orders) {
    CompareRow row;
    row.order = k;
    row.tangential_error = err0;
    for (const TraceRow& t : trace.rows) {
      if (t.order > k) break;
      row.tangential_order = t.order;
      row.tangential_error = t.error_norm;
    }
    row.balanced_error = nan;
    if (baseline && k <= sys.states()) {
      const StateSpace bt = balanced_truncation(sys, k);
      row.balanced_error = error_norm(sys, bt, grid).value;
    }
    table.push_back(row);
  }
  if (trace_out) *trace_out = std::move(trace);
  return table;
}

}  // namespace tanred
