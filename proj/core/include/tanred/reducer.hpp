#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tanred/freq_select.hpp"
#include "tanred/gramian_norms.hpp"
#include "tanred/interp_data.hpp"
#include "tanred/weight_solver.hpp"

namespace tanred {

struct ReducerConfig {
  SelectionStrategy strategy;
  double mu = 1e-3;
  double rho = 0.95;
  Index max_order = 40;
  /// Stop once gamma <= gamma_rel_tol * gamma_0.
  double gamma_rel_tol = 1e-8;
  /// Stop once error_norm <= error_rel_tol * ||G - D||_H2 (requires track_error).
  std::optional<double> error_rel_tol;
  int max_iters = 200;
  /// Evaluate error_norm(G, R) after every iteration.
  bool track_error = true;
  /// Record wall-clock seconds per iteration (otherwise 0).
  bool timing = true;

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double omega = 0.0;
  Index r_min = 0;
  Index r_max = 0;
  Index order = 0;
  double gamma = 0.0;
  /// NaN when not tracked.
  double error_norm = 0.0;
  bool error_approximate = false;
  bool stable = false;
  double seconds = 0.0;
};

enum class StopReason { MaxOrder, GammaTol, ErrorTol, MaxIters, Failure };

const char* stop_reason_name(StopReason r) noexcept;

struct ReductionTrace {
  std::vector<TraceRow> rows;
  double gamma0 = 0.0;
  StateSpace reduced;
  CMatrix w;
  InterpData data;
  /// Intermediate models, one per row (kept only when requested).
  std::vector<StateSpace> models;
  StopReason stop = StopReason::MaxIters;
  /// Error that ended the run early (ErrorKind name and message).
  std::string failure;
};

/// Iterative low-rank tangential interpolation. Never throws for failures after
/// the first iterate has been formed: the trace then ends at the last good one.
ReductionTrace reduce(const StateSpace& sys, const ReducerConfig& cfg, bool keep_models = false);

/// Frequencies used for quadrature when an error system is unstable:
/// 0 plus log-spaced points spanning three decades beyond the pole magnitudes.
std::vector<double> fallback_grid(const StateSpace& sys, int points = 4000);

/// Hankel singular values, descending. Throws UnstableSystem.
RVector hankel_singular_values(const StateSpace& sys);

/// Square-root balanced truncation to `order` states. Throws UnstableSystem,
/// IndexOutOfRange (order outside 1..n) and RankDeficient (zero Hankel value kept).
StateSpace balanced_truncation(const StateSpace& sys, Index order);

struct CompareRow {
  Index order = 0;
  /// Order of the tangential model used (largest traced order <= requested).
  Index tangential_order = 0;
  double tangential_error = 0.0;
  /// NaN when the baseline is disabled or unavailable.
  double balanced_error = 0.0;
};

/// One reduce run up to max(orders), plus a balanced-truncation baseline per order.
std::vector<CompareRow> sweep_orders(const StateSpace& sys, ReducerConfig cfg,
                                     const std::vector<Index>& orders, bool baseline = true,
                                     ReductionTrace* trace_out = nullptr);

}  // namespace tanred
