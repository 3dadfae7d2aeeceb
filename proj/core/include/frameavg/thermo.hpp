#pragma once

#include <vector>

#include "frameavg/lattice.hpp"
#include "frameavg/operator_core.hpp"

namespace frameavg {

/// Gibbs state rho = exp(-beta H) / Z together with the data needed to
/// evaluate log rho = -beta H - log Z analytically.
class ThermalState {
 public:
  ThermalState(HermitianOperator hamiltonian, SpectralDecomposition decomposition, double beta);
  /// `sectors[k]` is the translation sector of eigenvector k (see CyclicBlocks::decompose).
  ThermalState(HermitianOperator hamiltonian, SpectralDecomposition decomposition, double beta,
               std::vector<int> sectors, int sector_order);

  const DensityMatrix& rho() const noexcept { return rho_; }
  double beta() const noexcept { return beta_; }
  double log_partition() const noexcept { return log_partition_; }
  const HermitianOperator& hamiltonian() const noexcept { return hamiltonian_; }
  const SpectralDecomposition& hamiltonian_decomp() const noexcept { return decomposition_; }
  /// Eigenvalues of rho, aligned with hamiltonian_decomp().eigenvalues().
  const RealVector& populations() const noexcept { return populations_; }
  Index dim() const noexcept { return hamiltonian_.dim(); }

  /// -beta H - log Z, never through a numerical logarithm.
  HermitianOperator log_rho() const;
  /// rho^p = exp(-p beta H) / Z^p evaluated in the energy eigenbasis.
  HermitianOperator power(double p) const;

  /// True when the energy eigenvectors also diagonalize the lattice translation.
  bool translation_adapted() const noexcept { return !sectors_.empty(); }
  const std::vector<int>& sectors() const noexcept { return sectors_; }
  int sector_order() const noexcept { return sector_order_; }
  /// Energy-basis indices grouped by translation sector; a single group when not adapted.
  std::vector<std::vector<Index>> sector_blocks() const;
  /// {{0, 1, ..., dim - 1}}
  static std::vector<std::vector<Index>> single_block(Index dim);

  /// rho^{-1/2} a rho^{-1/2} in the energy eigenbasis. Entries grow like
  /// exp(beta (E_max - E_min)), so the result is never rotated back.
  /// Throws OverflowError when beta * (E_max - E_min) / 2 > 700.
  ComplexMatrix inverse_sqrt_sandwich(const ComplexMatrix& a) const;

 private:
  HermitianOperator hamiltonian_;
  SpectralDecomposition decomposition_;
  double beta_;
  double log_partition_;
  RealVector populations_;
  DensityMatrix rho_;
  std::vector<int> sectors_;
  int sector_order_ = 0;
};

/// Throws DomainError for non-finite or negative beta. beta = 0 yields the maximally mixed state.
/// With `sym` and a Hamiltonian commuting with it the eigenbasis is translation adapted.
ThermalState thermal_state(const HermitianOperator& h, double beta, const CyclicBlocks* sym = nullptr);

struct PerturbationSpec {
  int site = 0;
  ComplexMatrix generator = pauli::x();
  double strength = 0.7;
};

/// exp(-i strength G) on the kicked site, identity elsewhere.
UnitaryOperator local_kick(const LatticeSpec& lattice, const PerturbationSpec& p);

/// U rho U^dagger
DensityMatrix perturb(const ThermalState& state, const UnitaryOperator& u);

/// tr(H rho') - tr(H rho)
double work(const HermitianOperator& h, const DensityMatrix& rho, const DensityMatrix& rho_prime);

struct WorkReport {
  double work;
  double beta_work;
  double relative_entropy_check;  // S(rho'|rho)
};

WorkReport work_report(const ThermalState& state, const DensityMatrix& rho_prime);

}  // namespace frameavg
