#pragma once

// Entropy functionals in nats: von Neumann, Umegaki relative entropy,
// Belavkin-Staszewski relative entropy, thermodynamic entropy production.

#include "frameavg/operator_core.hpp"
#include "frameavg/thermo.hpp"

namespace frameavg {

/// An entropy in nats, or +infinity flagged explicitly (relative entropies only).
struct EntropyValue {
  double nats = 0.0;
  bool support_violation = false;

  static EntropyValue finite(double nats) { return {nats, false}; }
  static EntropyValue infinite() { return {0.0, true}; }
  bool is_finite() const noexcept { return !support_violation; }
};

namespace tolerance {
// sigma weight on ker(rho) above which S(sigma|rho) is +infinity.
inline constexpr double kSupportLeak = 1e-10;
}  // namespace tolerance

/// -sum p ln p over a spectrum, 0 ln 0 := 0, entries below the relative floor dropped.
double entropy_of_spectrum(const RealVector& eigenvalues);

/// `sym`, when given and rho commutes with it, lets the spectrum be taken sector by sector.
EntropyValue von_neumann_entropy(const DensityMatrix& rho, const CyclicBlocks* sym = nullptr);

/// tr[sigma (log sigma - log rho)] with support detection on ker(rho).
EntropyValue relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho);

/// Stable thermal path: -S(sigma) + beta tr(H sigma) + log Z.
EntropyValue relative_entropy(const DensityMatrix& sigma, const ThermalState& rho,
                              const CyclicBlocks* sym = nullptr);

/// Thermal path with S(sigma) already known.
EntropyValue relative_entropy(const DensityMatrix& sigma, double sigma_entropy,
                              const ThermalState& rho);

/// -tr[rho eta(rho^{-1/2} sigma rho^{-1/2})]; support_violation when rho is singular.
EntropyValue bs_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho);

/// Same functional with rho^{-1/2} = Z^{1/2} exp(beta H / 2) taken analytically and
/// the spectrum of rho^{-1/2} sigma rho^{-1/2} taken in the energy eigenbasis, per
/// translation sector when the state is translation adapted and sigma commutes with `sym`.
/// Throws OverflowError when beta * (E_max - E_min) / 2 > 700.
EntropyValue bs_relative_entropy(const DensityMatrix& sigma, const ThermalState& rho,
                                 const CyclicBlocks* sym = nullptr);

/// tr[sigma log(sigma^{1/2} rho^{-1} sigma^{1/2})], equal to the functional above, for
/// sigma given in rho's energy eigenbasis and vanishing between groups of `blocks`.
/// Throws OverflowError when beta * (E_max - E_min) / 2 > 700.
EntropyValue bs_relative_entropy_energy_basis(const ComplexMatrix& sigma, const ThermalState& rho,
                                              const std::vector<std::vector<Index>>& blocks);

/// -tr[rho eta(x)] for a positive semidefinite x given in rho's energy eigenbasis.
/// x must vanish between different index groups of `blocks`, which are diagonalized separately.
double minus_trace_rho_eta(const ThermalState& rho, const ComplexMatrix& x,
                           const std::vector<std::vector<Index>>& blocks);

/// beta * W
double thermo_entropy_production(double beta, double work);

}  // namespace frameavg
