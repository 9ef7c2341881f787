#pragma once

// Coherence measures: interference in transition probabilities,
// einselection, population conservation and the dephasing exponent.

#include "oqs/divisibility.hpp"
#include "oqs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace oqs {

inline constexpr double kAmplitudeTolerance = 1e-12;
/// Below this magnitude an off-diagonal element counts as zero and Gamma is +inf.
inline constexpr double kVanishingCoherence = 1e-14;
/// Eigenvalues of H_S closer than this are treated as one eigenspace.
inline constexpr double kDegeneracyTolerance = 1e-9;

struct TransitionProbability {
  double total = 0.0;    ///< |sum_i c_i^* b_i|^2
  double diagonal = 0.0; ///< sum_i |c_i^* b_i|^2
  double cross = 0.0;    ///< interference part, total - diagonal
};

namespace detail {

inline void require_normalized(const ComplexVector &c, const char *name) {
  const double norm = c.squaredNorm();
  if (!(std::abs(norm - 1.0) < kAmplitudeTolerance))
    throw ValidationError(std::string(name) + " not normalized (sum |c|^2 = " +
                          std::to_string(norm) + ")");
}

} // namespace detail

inline TransitionProbability transition_probability(const ComplexVector &c, const ComplexVector &b) {
  detail::require_normalized(c, "c");
  detail::require_normalized(b, "b");
  if (c.size() != b.size())
    throw DimensionError("transition_probability: amplitude vectors differ in length");
  TransitionProbability out;
  out.total = std::norm(c.dot(b));
  for (Index i = 0; i < c.size(); ++i)
    out.diagonal += std::norm(std::conj(c(i)) * b(i));
  // Sum over i != j of c_i b_i^* c_j^* b_j, accumulated pairwise so the
  // value is not a difference of nearly equal numbers.
  for (Index i = 0; i < c.size(); ++i)
    for (Index j = i + 1; j < c.size(); ++j)
      out.cross += 2.0 * (c(i) * std::conj(b(i)) * std::conj(c(j)) * b(j)).real();
  return out;
}

/// out[i,j] = c_i c_j^* M[j,i]; M = identity gives sum_i |c_i|^2 |i><i|.
inline ComplexMatrix einselect(const ComplexVector &c, const ComplexMatrix &pointer_overlaps) {
  detail::require_normalized(c, "c");
  const Index n = c.size();
  if (pointer_overlaps.rows() != n || pointer_overlaps.cols() != n)
    throw DimensionError("einselect: overlap matrix must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(pointer_overlaps(i, j)) > 1.0 + kAmplitudeTolerance)
        throw ValidationError("einselect: overlap |M(" + std::to_string(i) + "," +
                              std::to_string(j) + ")| exceeds 1");
  ComplexMatrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = c(i) * std::conj(c(j)) * pointer_overlaps(j, i);
  return out;
}

/// sum_{i != j} |rho_ij|.
inline double coherence_l1(const ComplexMatrix &rho) {
  require_square(rho, "coherence_l1");
  double total = 0.0;
  for (Index i = 0; i < rho.rows(); ++i)
    for (Index j = 0; j < rho.cols(); ++j)
      if (i != j)
        total += std::abs(rho(i, j));
  return total;
}

/// Eigenspaces of a Hermitian operator, grouping eigenvalues within
/// kDegeneracyTolerance. Each entry holds the projector onto one eigenspace.
struct Eigenspaces {
  std::vector<double> energies;
  std::vector<ComplexMatrix> projectors;
  bool degenerate = false;
};

inline Eigenspaces eigenspaces(const ComplexMatrix &h) {
  const HermitianSpectrum spectrum(h);
  const RealVector &values = spectrum.eigenvalues();
  const ComplexMatrix &vectors = spectrum.eigenvectors();
  Eigenspaces out;
  Index start = 0;
  while (start < values.size()) {
    Index stop = start + 1;
    while (stop < values.size() && values(stop) - values(start) < kDegeneracyTolerance)
      ++stop;
    const auto block = vectors.middleCols(start, stop - start);
    out.energies.push_back(values(start));
    out.projectors.push_back(block * block.adjoint());
    out.degenerate = out.degenerate || stop - start > 1;
    start = stop;
  }
  return out;
}

struct PopulationDrift {
  double max_drift = 0.0;
  bool precondition_holds = true; ///< [H_S, H_SE] = 0 and H_S non-degenerate
  std::string warning;
};

/// max over t and eigenspaces k of |Tr(Pi_k rho_S(t)) - Tr(Pi_k rho_S(t0))|
/// in the H_S eigenbasis. Degenerate eigenvalues are aggregated per eigenspace.
inline PopulationDrift population_drift(const HamiltonianTriple &model, const InitialState &state,
                                        const TimeGrid &grid) {
  state.require_compatible(model.spec());
  grid.validate();
  PopulationDrift out;
  const double comm_ss = commutator_norm(model.lifted_system(), model.coupling());
  const Eigenspaces spaces = eigenspaces(model.system());
  if (comm_ss >= 1e-12) {
    out.precondition_holds = false;
    out.warning = "[H_S, H_SE] != 0: populations are not expected to be conserved";
  } else if (spaces.degenerate) {
    out.precondition_holds = false;
    out.warning = "H_S is degenerate: populations compared per eigenspace only";
  }

  const JointPropagator prop(model);
  const PureComponents initial = state.joint_components();
  std::vector<double> start;
  for (const ComplexMatrix &p : spaces.projectors)
    start.push_back((p * state.system_density()).trace().real());
  for (double t : grid.points()) {
    const ComplexMatrix rho = prop.system_marginal(prop.evolve_components(initial, t - grid.t0));
    for (std::size_t k = 0; k < spaces.projectors.size(); ++k)
      out.max_drift = std::max(out.max_drift,
                               std::abs((spaces.projectors[k] * rho).trace().real() - start[k]));
  }
  return out;
}

using CoherencePair = std::pair<Index, Index>;

inline void require_pair(const CoherencePair &pair, Index n) {
  if (pair.first < 0 || pair.second < 0 || pair.first >= n || pair.second >= n ||
      pair.first == pair.second)
    throw ParameterError("coherence pair (" + std::to_string(pair.first) + "," +
                         std::to_string(pair.second) + ") must be two distinct indices below " +
                         std::to_string(n));
}

/// Gamma = -ln(|rho_jk,jl(t)| / |rho_jk,jl(t0)|); +inf where |rho(t)| < 1e-14.
inline double dephasing_exponent(Complex now, Complex initial) {
  if (std::abs(now) < kVanishingCoherence)
    return std::numeric_limits<double>::infinity();
  return std::log(std::abs(initial) / std::abs(now));
}

struct CoherenceTrace {
  std::vector<double> times;
  std::vector<double> l1_coherence;
  std::vector<CoherencePair> pairs;
  std::vector<std::vector<Complex>> offdiag;    ///< rho_S(j,k), [pair][time]
  std::vector<std::vector<double>> offdiag_abs; ///< [pair][time]
  std::vector<std::vector<double>> populations; ///< [state][time]
  std::vector<std::vector<double>> gamma;       ///< [pair][time], empty if not requested
};

/// Evaluates rho_S on the grid once and derives every coherence series.
inline CoherenceTrace coherence_trace(const HamiltonianTriple &model, const InitialState &state,
                                      const TimeGrid &grid, const std::vector<CoherencePair> &pairs,
                                      bool with_gamma) {
  state.require_compatible(model.spec());
  grid.validate();
  const Index n = model.spec().system_dim();
  for (const CoherencePair &p : pairs) {
    require_pair(p, n);
    if (with_gamma && !(std::abs(state.system_density()(p.first, p.second)) > 0.0))
      throw ParameterError("dephasing_gamma: initial coherence (" + std::to_string(p.first) + "," +
                           std::to_string(p.second) + ") is zero");
  }

  CoherenceTrace out;
  out.times = grid.points();
  out.pairs = pairs;
  out.offdiag.assign(pairs.size(), {});
  out.offdiag_abs.assign(pairs.size(), {});
  out.populations.assign(static_cast<std::size_t>(n), {});
  if (with_gamma)
    out.gamma.assign(pairs.size(), {});

  const JointPropagator prop(model);
  const PureComponents initial = state.joint_components();
  for (double t : out.times) {
    const ComplexMatrix rho = prop.system_marginal(prop.evolve_components(initial, t - grid.t0));
    out.l1_coherence.push_back(coherence_l1(rho));
    for (Index i = 0; i < n; ++i)
      out.populations[static_cast<std::size_t>(i)].push_back(rho(i, i).real());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Complex element = rho(pairs[k].first, pairs[k].second);
      out.offdiag[k].push_back(element);
      out.offdiag_abs[k].push_back(std::abs(element));
      if (with_gamma)
        out.gamma[k].push_back(dephasing_exponent(
            element, state.system_density()(pairs[k].first, pairs[k].second)));
    }
  }
  return out;
}

inline std::vector<double> dephasing_gamma(const HamiltonianTriple &model, const InitialState &state,
                                           const TimeGrid &grid, const CoherencePair &pair) {
  return coherence_trace(model, state, grid, {pair}, true).gamma.front();
}

enum class CoherenceVerdict { preserved, partial, decohered, no_initial_coherence };

inline const char *to_string(CoherenceVerdict v) {
  switch (v) {
  case CoherenceVerdict::preserved:
    return "preserved";
  case CoherenceVerdict::partial:
    return "partial";
  case CoherenceVerdict::decohered:
    return "decohered";
  case CoherenceVerdict::no_initial_coherence:
    return "no-initial-coherence";
  }
  return "?";
}

/// decohered: l1 falls below 5% of its initial value and stays below 10%
/// until the end of the window. preserved: l1 never drops below 95%.
inline CoherenceVerdict classify_coherence(const std::vector<double> &l1) {
  if (l1.empty() || !(l1.front() > kVanishingCoherence))
    return CoherenceVerdict::no_initial_coherence;
  const double start = l1.front();
  for (std::size_t k = 0; k < l1.size(); ++k) {
    if (l1[k] < 0.05 * start &&
        std::all_of(l1.begin() + static_cast<std::ptrdiff_t>(k), l1.end(),
                    [&](double v) { return v < 0.10 * start; }))
      return CoherenceVerdict::decohered;
  }
  const bool preserved =
      std::all_of(l1.begin(), l1.end(), [&](double v) { return v >= 0.95 * start; });
  return preserved ? CoherenceVerdict::preserved : CoherenceVerdict::partial;
}

} // namespace oqs
