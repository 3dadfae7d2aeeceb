#pragma once

// Frame-averaging maps: uniform and exponentially weighted averages over
// the cyclic translation group, and the temporal average that weights
// energy-basis coherences by 1/(1 + i (E_m - E_n) tau).
//
// All three are mixtures of unitary conjugations, hence trace preserving,
// positive and unital.

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "frameavg/operator_core.hpp"
#include "frameavg/thermo.hpp"

namespace frameavg {

struct UniformSpatial {};

struct WeightedSpatial {
  double range = 1.0;  // R, in lattice spacings
};

struct Temporal {
  double tau = std::numeric_limits<double>::infinity();  // inverse energy units
};

using AveragingKind = std::variant<UniformSpatial, WeightedSpatial, Temporal>;

/// "uniform-spatial", "weighted-spatial" or "temporal".
std::string kind_name(const AveragingKind& kind);
/// R or tau; 0 for the uniform average.
double kind_parameter(const AveragingKind& kind);
/// Throws ConfigError for non-positive or non-finite R, or non-positive tau.
void validate_kind(const AveragingKind& kind);

/// Normalized weights w_n proportional to exp(-min(n, N-n) / R), n = 0..N-1.
std::vector<double> translation_weights(int n, double range);

/// sum_n w_n T^n a T^{-n}, summed left to right in n. Throws DimensionError if T^N != 1.
ComplexMatrix average_over_translations(const ComplexMatrix& a, const UnitaryOperator& t,
                                        const std::vector<double>& weights);

/// Temporal map applied to an arbitrary square matrix in the H eigenbasis.
ComplexMatrix temporal_map(const ComplexMatrix& a, const SpectralDecomposition& h_decomp,
                           double tau);

/// A configured instance of one averaging map.
class AveragingChannel {
 public:
  /// Spatial kinds need `t` and `n`; the temporal kind needs `h_decomp`.
  static AveragingChannel spatial(const AveragingKind& kind, const UnitaryOperator& t, int n);
  static AveragingChannel temporal(double tau, const SpectralDecomposition& h_decomp);
  static AveragingChannel make(const AveragingKind& kind, const UnitaryOperator& t, int n,
                               const SpectralDecomposition& h_decomp);

  ComplexMatrix apply(const ComplexMatrix& a) const;
  HermitianOperator apply(const HermitianOperator& a) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// The same map on a matrix given in `state`'s energy eigenbasis, where every kind
  /// acts entrywise. Spatial kinds need a translation-adapted state of order N.
  ComplexMatrix apply_in_energy_basis(const ComplexMatrix& a, const ThermalState& state) const;

  /// Energy-basis index groups between which every output of the map vanishes.
  std::vector<std::vector<Index>> energy_basis_blocks(const ThermalState& state) const;

  const AveragingKind& kind() const noexcept { return kind_; }

 private:
  AveragingChannel() = default;

  AveragingKind kind_;
  const UnitaryOperator* translation_ = nullptr;
  std::vector<double> weights_;
  const SpectralDecomposition* h_decomp_ = nullptr;
};

/// (1/N) sum_{n<N} T^n rho T^{-n}
DensityMatrix frame_average(const DensityMatrix& rho, const UnitaryOperator& t, int n);

DensityMatrix weighted_frame_average(const DensityMatrix& rho, const UnitaryOperator& t, int n,
                                     double range);

/// tau = +infinity dephases in the H eigenbasis, keeping degenerate blocks
/// (levels within 1e-10 * spectral width). tau < 1e-12 returns rho.
DensityMatrix temporal_average(const DensityMatrix& rho, const SpectralDecomposition& h_decomp,
                               double tau);

/// u = exp(beta H/2) U exp(-beta H/2) and E = u u^dagger = rho^{-1/2} rho' rho^{-1/2}.
struct ConjugatedPerturbation {
  ComplexMatrix u;
  HermitianOperator e;
};

/// Computational basis; u is summed as sum_n (beta/2)^n / n! ad_H^n(U). Entries of E
/// reach exp(beta (E_max - E_min)) for interacting chains, so rho-weighted traces
/// of it belong in the energy basis (energy_basis_E).
/// Throws OverflowError when beta * (E_max - E_min) / 2 > 700.
ConjugatedPerturbation conjugated_perturbation(const ThermalState& state, const UnitaryOperator& u);

struct AveragedEDiagnostics {
  double op_deviation;         // ||M E - 1||_op
  double frobenius_deviation;  // ||M E - 1||_F
  double weighted_deviation;   // sqrt(tr[rho (M E - 1)^2])
  double trace_rho_me;         // tr(rho M E), equals 1
};

/// ||(1/N) sum T^n E T^{-n} - 1||_op
double averaged_E_deviation(const ConjugatedPerturbation& cp, const UnitaryOperator& t, int n);

/// rho' = U rho U^dagger in the energy eigenbasis of `state`, assembled as
/// U_e diag(p) U_e^dagger with U_e = V^dagger U V so that every entry carries
/// round-off on its own scale, however small the populations involved.
ComplexMatrix energy_basis_perturbed(const ThermalState& state, const UnitaryOperator& u);

/// E = rho^{-1/2} rho' rho^{-1/2} from the energy-basis rho' above.
/// Throws OverflowError when beta * (E_max - E_min) / 2 > 700.
ComplexMatrix energy_basis_E(const ThermalState& state, const ComplexMatrix& rho_prime_energy);

/// Deviation norms of an averaged E given in the energy eigenbasis; `blocks`
/// as returned by AveragingChannel::energy_basis_blocks.
AveragedEDiagnostics averaged_E_diagnostics(const ThermalState& state, const ComplexMatrix& averaged_e,
                                            const std::vector<std::vector<Index>>& blocks);

}  // namespace frameavg
