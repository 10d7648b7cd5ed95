#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tanred/gramian_norms.hpp"
#include "tanred/hessenberg_resolvent.hpp"
#include "tanred/interp_data.hpp"

namespace tanred {

enum class StrategyKind { MaxError, Discrete, Random };

const char* strategy_name(StrategyKind kind) noexcept;

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::MaxError;
  /// Candidate frequencies (Discrete); sorted ascending, nonnegative.
  std::vector<double> grid;
  double omega_min = 1e-1;
  double omega_max = 1e2;
  int K = 100;
  std::uint64_t seed = 0;
  double peak_rtol = kDefaultPeakRtol;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

/// SplitMix64 (Steele, Lea, Flood 2014), version 1 of our stream contract:
/// state += 0x9e3779b97f4a7c15, then the standard xor-shift-multiply mix.
/// uniform() uses the top 53 bits. Portable and fully specified, so seeded
/// sequences are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  /// Uniform double in [0, 1).
  double uniform() noexcept;
  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// sigma_max(G(j w) - R(j w)) at each w. Points where R's resolvent is
/// singular report +infinity.
std::vector<double> pointwise_error(const HessenbergResolvent& g, const StateSpace& r,
                                    std::span<const double> omegas);

/// Frequency of the peak of sigma_max(G - R). A peak at infinity maps to
/// 10 * (largest pole magnitude of G and R); real systems get |omega|.
double select_max_error(const StateSpace& g, const StateSpace& r, double rtol = kDefaultPeakRtol);

/// Grid point with the largest pointwise error; ties go to the smallest omega.
/// Throws EmptyGrid.
double select_discrete(const StateSpace& g, const StateSpace& r, std::span<const double> grid);
/// Same, with G already evaluated on the grid (as the reducer does).
double select_discrete(std::span<const FreqResponse> g_on_grid, const StateSpace& r);

struct RandomPick {
  double omega = 0.0;
  SplitMix64 rng;
};

/// K log-uniform draws in [omega_min, omega_max]; returns the argmax and the
/// advanced generator.
RandomPick select_random(const StateSpace& g, const StateSpace& r, const SelectionStrategy& cfg,
                         SplitMix64 rng);
RandomPick select_random(const HessenbergResolvent& g, const StateSpace& r,
                         const SelectionStrategy& cfg, SplitMix64 rng);

struct Refinement {
  double omega = 0.0;
  Index r_min = 1;
  Index r_max = 1;
  /// Position (in `points`) of the existing point being widened.
  std::optional<std::size_t> merged_index;
  /// G(j omega) at the returned omega.
  FreqResponse response;
};

/// Frequency and rank refinement. A candidate merges into the nearest existing
/// frequency w_i when w_i == omega or |(w_i - omega) / omega| < mu (omega = 0
/// merges only with w_i = 0). r_max is the largest m with sigma_m >= rho sigma_{r_min}.
/// Throws RankExhausted if r_min exceeds the numerical rank of G(j omega).
Refinement refine(const StateSpace& g, const std::vector<InterpPoint>& points, double omega,
                  double mu, double rho);
Refinement refine(const HessenbergResolvent& g, bool real_system,
                  const std::vector<InterpPoint>& points, double omega, double mu, double rho);

}  // namespace tanred
