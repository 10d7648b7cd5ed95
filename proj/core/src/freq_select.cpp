#include "tanred/freq_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "tanred/error.hpp"

namespace tanred {

const char* strategy_name(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::MaxError: return "max-error";
    case StrategyKind::Discrete: return "discrete";
    case StrategyKind::Random: return "random";
  }
  return "unknown";
}

void SelectionStrategy::validate() const {
  if (K < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
  if (!(peak_rtol > 0.0 && peak_rtol < 0.5))
    throw Error(ErrorKind::InvalidArgument, "peak rtol must lie in (0, 0.5)");
  if (kind == StrategyKind::Random &&
      !(omega_min > 0.0 && omega_min < omega_max && std::isfinite(omega_max)))
    throw Error(ErrorKind::InvalidArgument, "random strategy needs 0 < omega_min < omega_max");
  if (kind == StrategyKind::Discrete) {
    if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "discrete strategy needs a grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
        throw Error(ErrorKind::InvalidArgument, "grid frequencies must be finite and >= 0");
      if (i > 0 && !(grid[i] > grid[i - 1]))
        throw Error(ErrorKind::InvalidArgument, "grid must be strictly ascending");
    }
  }
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

// argmax over (omega, err) pairs with ties broken toward the smaller omega.
double argmax_omega(std::span<const double> omegas, const std::vector<double>& err) {
  double best_w = omegas[0];
  double best_e = -1.0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (err[i] > best_e || (err[i] == best_e && omegas[i] < best_w)) {
      best_e = err[i];
      best_w = omegas[i];
    }
  }
  return best_w;
}

double sigma_max_or_inf(const CMatrix& m) {
  const double s = sigma_max(m);
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> pointwise_error(const HessenbergResolvent& g, const StateSpace& r,
                                    std::span<const double> omegas) {
  const HessenbergResolvent rr(r);
  std::vector<double> err(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const Complex s(0.0, omegas[i]);
    const CMatrix gv = g.response(s);
    try {
      err[i] = sigma_max_or_inf(gv - rr.response(s));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularResolvent) throw;
      err[i] = std::numeric_limits<double>::infinity();
    }
  }
  return err;
}

double select_max_error(const StateSpace& g, const StateSpace& r, double rtol) {
  if (g.outputs() != r.outputs() || g.inputs() != r.inputs())
    throw Error(ErrorKind::DimensionMismatch, "select_max_error: systems differ in I/O sizes");
  const StateSpace e = series_sub(g, r);
  const PeakGain pk = peak_gain(e, rtol);
  double w = pk.omega_star;
  if (pk.at_infinity()) {
    double biggest = 0.0;
    const CVector poles = e.poles();
    for (Index i = 0; i < poles.size(); ++i) biggest = std::max(biggest, std::abs(poles(i)));
    w = 10.0 * (biggest > 0.0 ? biggest : 1.0);
  }
  if (g.is_real() && r.is_real()) w = std::abs(w);
  return w;
}

double select_discrete(std::span<const FreqResponse> g_on_grid, const StateSpace& r) {
  if (g_on_grid.empty()) throw Error(ErrorKind::EmptyGrid, "select_discrete: empty grid");
  const HessenbergResolvent rr(r);
  std::vector<double> omegas(g_on_grid.size());
  std::vector<double> err(g_on_grid.size());
  for (std::size_t i = 0; i < g_on_grid.size(); ++i) {
    omegas[i] = g_on_grid[i].omega;
    try {
      err[i] = sigma_max_or_inf(g_on_grid[i].value - rr.response(Complex(0.0, omegas[i])));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularResolvent) throw;
      err[i] = std::numeric_limits<double>::infinity();
    }
  }
  return argmax_omega(omegas, err);
}

double select_discrete(const StateSpace& g, const StateSpace& r, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "select_discrete: empty grid");
  const std::vector<FreqResponse> gv = freq_sweep(g, grid);
  return select_discrete(std::span<const FreqResponse>(gv), r);
}

RandomPick select_random(const HessenbergResolvent& g, const StateSpace& r,
                         const SelectionStrategy& cfg, SplitMix64 rng) {
  if (!(cfg.omega_min > 0.0 && cfg.omega_min < cfg.omega_max) || cfg.K < 1)
    throw Error(ErrorKind::InvalidArgument, "select_random: need 0 < omega_min < omega_max, K >= 1");
  const double lo = std::log10(cfg.omega_min);
  const double hi = std::log10(cfg.omega_max);
  std::vector<double> draws(static_cast<std::size_t>(cfg.K));
  for (double& w : draws)
    w = std::clamp(std::pow(10.0, lo + (hi - lo) * rng.uniform()), cfg.omega_min, cfg.omega_max);
  if (draws.size() == 1) return {draws[0], rng};
  const std::vector<double> err = pointwise_error(g, r, draws);
  return {argmax_omega(draws, err), rng};
}

RandomPick select_random(const StateSpace& g, const StateSpace& r, const SelectionStrategy& cfg,
                         SplitMix64 rng) {
  return select_random(HessenbergResolvent(g), r, cfg, rng);
}

Refinement refine(const HessenbergResolvent& g, bool real_system,
                  const std::vector<InterpPoint>& points, double omega, double mu, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::InvalidArgument, "refine: need 0 < rho <= 1");
  if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "refine: need mu >= 0");
  if (!std::isfinite(omega)) throw Error(ErrorKind::InvalidArgument, "refine: omega must be finite");
  if (real_system && omega < 0.0)
    throw Error(ErrorKind::InvalidArgument, "refine: negative omega on a real system");

  Refinement out;
  out.omega = omega;
  std::size_t nearest = points.size();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::abs(points[i].omega - omega);
    if (d < gap) {
      gap = d;
      nearest = i;
    }
  }
  if (nearest < points.size()) {
    const double wi = points[nearest].omega;
    const bool merge = wi == omega || (omega != 0.0 && std::abs((wi - omega) / omega) < mu);
    if (merge) {
      out.merged_index = nearest;
      out.omega = wi;
      out.r_min = points[nearest].first_index + points[nearest].rank();
    }
  }

  out.response.omega = out.omega;
  out.response.value = g.response(Complex(0.0, out.omega));
  const RVector s = out.response.value.jacobiSvd().singularValues();
  Index numerical_rank = 0;
  while (numerical_rank < s.size() && s(0) > 0.0 && s(numerical_rank) > kNumericalRankTol * s(0))
    ++numerical_rank;
  if (out.r_min > numerical_rank) {
    std::ostringstream os;
    os << "refine: no singular direction " << out.r_min << " left at omega = " << out.omega
       << " (numerical rank " << numerical_rank << ")";
    throw Error(ErrorKind::RankExhausted, os.str());
  }
  const double cut = rho * s(out.r_min - 1);
  out.r_max = out.r_min;
  while (out.r_max < numerical_rank && s(out.r_max) >= cut) ++out.r_max;
  return out;
}

Refinement refine(const StateSpace& g, const std::vector<InterpPoint>& points, double omega,
                  double mu, double rho) {
  return refine(HessenbergResolvent(g), g.is_real(), points, omega, mu, rho);
}

}  // namespace tanred
