#include "frameavg/thermo.hpp"

#include <cmath>
#include <sstream>

#include "frameavg/entropy.hpp"

namespace frameavg {

namespace {

struct Gibbs {
  double log_partition;
  RealVector populations;
};

// Max-shifted softmax of -beta * energies; energies ascending so the shift is energies(0).
Gibbs gibbs_weights(const RealVector& energies, double beta) {
  const Index n = energies.size();
  RealVector w(n);
  const double e0 = energies.minCoeff();
  for (Index k = 0; k < n; ++k) w(k) = std::exp(-beta * (energies(k) - e0));
  const double sum = w.sum();
  return {-beta * e0 + std::log(sum), w / sum};
}

DensityMatrix build_rho(const SpectralDecomposition& d, const RealVector& populations) {
  return trusted_density(d.reconstruct(populations));
}

}  // namespace

ThermalState::ThermalState(HermitianOperator hamiltonian, SpectralDecomposition decomposition,
                           double beta)
    : hamiltonian_(std::move(hamiltonian)),
      decomposition_(std::move(decomposition)),
      beta_(beta),
      log_partition_(0.0),
      rho_(DensityMatrix::maximally_mixed(1)) {
  if (!std::isfinite(beta) || beta < 0.0) {
    std::ostringstream os;
    os << "thermal_state: beta must be finite and non-negative, got " << beta;
    throw DomainError(os.str(), beta);
  }
  if (decomposition_.dim() != hamiltonian_.dim())
    throw DimensionError("ThermalState: decomposition does not match the Hamiltonian");
  auto [log_z, populations] = gibbs_weights(decomposition_.eigenvalues(), beta_);
  log_partition_ = log_z;
  populations_ = std::move(populations);
  rho_ = build_rho(decomposition_, populations_);
}

ThermalState::ThermalState(HermitianOperator hamiltonian, SpectralDecomposition decomposition,
                           double beta, std::vector<int> sectors, int sector_order)
    : ThermalState(std::move(hamiltonian), std::move(decomposition), beta) {
  if (static_cast<Index>(sectors.size()) != dim() || sector_order < 1)
    throw DimensionError("ThermalState: sector labels do not match the decomposition");
  sectors_ = std::move(sectors);
  sector_order_ = sector_order;
}

std::vector<std::vector<Index>> ThermalState::single_block(Index dim) {
  std::vector<Index> all(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) all[static_cast<std::size_t>(k)] = k;
  return {std::move(all)};
}

std::vector<std::vector<Index>> ThermalState::sector_blocks() const {
  if (!translation_adapted()) return single_block(dim());
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(sector_order_));
  for (Index k = 0; k < dim(); ++k) blocks[static_cast<std::size_t>(sectors_[static_cast<std::size_t>(k)])].push_back(k);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return blocks;
}

ComplexMatrix ThermalState::inverse_sqrt_sandwich(const ComplexMatrix& a) const {
  const RealVector& e = decomposition_.eigenvalues();
  const double exponent = beta_ * (e.maxCoeff() - e.minCoeff()) / 2.0;
  if (exponent > 700.0) {
    std::ostringstream os;
    os << "beta * spectral radius = " << exponent
       << " overflows exp(beta H / 2); use a smaller beta or fewer sites";
    throw OverflowError(os.str());
  }
  RealVector scale(e.size());
  for (Index k = 0; k < e.size(); ++k) scale(k) = std::exp(0.5 * (beta_ * e(k) + log_partition_));
  ComplexMatrix out = decomposition_.to_eigenbasis(a);
  out = scale.cast<Complex>().asDiagonal() * out * scale.cast<Complex>().asDiagonal();
  return out;
}

HermitianOperator ThermalState::log_rho() const {
  ComplexMatrix m = -beta_ * hamiltonian_.matrix();
  m.diagonal().array() -= log_partition_;
  return HermitianOperator(std::move(m));
}

HermitianOperator ThermalState::power(double p) const {
  const RealVector& e = decomposition_.eigenvalues();
  RealVector values(e.size());
  for (Index k = 0; k < e.size(); ++k)
    values(k) = std::exp(p * (-beta_ * e(k) - log_partition_));
  if (!values.allFinite()) {
    std::ostringstream os;
    os << "ThermalState::power(" << p << ") overflows at beta=" << beta_;
    throw OverflowError(os.str());
  }
  return decomposition_.reconstruct(values);
}

ThermalState thermal_state(const HermitianOperator& h, double beta, const CyclicBlocks* sym) {
  if (!std::isfinite(beta) || beta < 0.0) {
    std::ostringstream os;
    os << "thermal_state: beta must be finite and non-negative, got " << beta;
    throw DomainError(os.str(), beta);
  }
  if (sym != nullptr && sym->dim() == h.dim() && sym->commutes(h.matrix())) {
    std::vector<int> sectors;
    SpectralDecomposition d = sym->decompose(h, sectors);
    return ThermalState(h, std::move(d), beta, std::move(sectors), sym->order());
  }
  return ThermalState(h, spectral_decompose(h), beta);
}

UnitaryOperator local_kick(const LatticeSpec& lattice, const PerturbationSpec& p) {
  const HermitianOperator generator(p.generator);
  const SpectralDecomposition d = spectral_decompose(generator);
  const Index n = d.dim();
  Eigen::VectorXcd phases(n);
  for (Index k = 0; k < n; ++k)
    phases(k) = std::exp(Complex(0.0, -p.strength * d.eigenvalues()(k)));
  const ComplexMatrix local =
      d.eigenvectors() * phases.asDiagonal() * d.eigenvectors().adjoint();
  const double defect = max_norm(local.adjoint() * local - ComplexMatrix::Identity(n, n));
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "local_kick: local propagator not unitary to 1e-12 (defect " << defect << ")";
    throw InvariantError(os.str(), defect);
  }
  return trusted_unitary(embed_site_operator(lattice, {p.site, local}));
}

DensityMatrix perturb(const ThermalState& state, const UnitaryOperator& u) {
  if (u.dim() != state.dim()) throw DimensionError("perturb: dimension mismatch");
  return trusted_density(HermitianOperator(conjugate(u, state.rho().matrix())));
}

double work(const HermitianOperator& h, const DensityMatrix& rho, const DensityMatrix& rho_prime) {
  if (h.dim() != rho.dim() || h.dim() != rho_prime.dim())
    throw DimensionError("work: dimension mismatch");
  const Complex after = h.matrix().cwiseProduct(rho_prime.matrix().transpose()).sum();
  const Complex before = h.matrix().cwiseProduct(rho.matrix().transpose()).sum();
  const Complex w = after - before;
  const double scale = std::max(1.0, max_norm(h.matrix()));
  if (std::abs(w.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "work: imaginary residue " << w.imag() << " exceeds 1e-10";
    throw InvariantError(os.str(), std::abs(w.imag()));
  }
  return w.real();
}

WorkReport work_report(const ThermalState& state, const DensityMatrix& rho_prime) {
  const double w = work(state.hamiltonian(), state.rho(), rho_prime);
  const EntropyValue rel = relative_entropy(rho_prime, state);
  WorkReport report{w, thermo_entropy_production(state.beta(), w), rel.nats};
  const double residual = std::abs(report.beta_work - report.relative_entropy_check);
  if (residual > 1e-9) {
    std::ostringstream os;
    os << "work_report: |beta W - S(rho'|rho)| = " << residual << " exceeds 1e-9";
    throw InvariantError(os.str(), residual);
  }
  return report;
}

}  // namespace frameavg
