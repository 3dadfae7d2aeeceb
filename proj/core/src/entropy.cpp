#include "frameavg/entropy.hpp"

#include <cmath>
#include <sstream>

namespace frameavg {

namespace {

void require_same_dim(const DensityMatrix& a, Index dim, const char* what) {
  if (a.dim() != dim) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.dim() << " vs " << dim << ")";
    throw DimensionError(os.str());
  }
}

}  // namespace

double entropy_of_spectrum(const RealVector& eigenvalues) {
  const RealVector p = floor_clamped(eigenvalues);
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i) s += eta(p(i));
  return s;
}

EntropyValue von_neumann_entropy(const DensityMatrix& rho, const CyclicBlocks* sym) {
  return EntropyValue::finite(entropy_of_spectrum(eigenvalues(rho.op(), sym)));
}

EntropyValue relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho) {
  require_same_dim(sigma, rho.dim(), "relative_entropy");
  const SpectralDecomposition dr = spectral_decompose(rho.op());
  const RealVector r = floor_clamped(dr.eigenvalues());

  // sigma expressed in rho's eigenbasis: its diagonal carries all we need for tr(sigma log rho).
  const ComplexMatrix s_in_rho = dr.to_eigenbasis(sigma.matrix());
  double leak = 0.0;
  double cross = 0.0;
  for (Index k = 0; k < r.size(); ++k) {
    const double weight = s_in_rho(k, k).real();
    if (r(k) == 0.0)
      leak += weight;
    else
      cross += weight * std::log(r(k));
  }
  if (leak > tolerance::kSupportLeak) return EntropyValue::infinite();
  const double s_sigma = entropy_of_spectrum(eigenvalues(sigma.op()));
  return EntropyValue::finite(-s_sigma - cross);
}

EntropyValue relative_entropy(const DensityMatrix& sigma, const ThermalState& rho,
                              const CyclicBlocks* sym) {
  return relative_entropy(sigma, von_neumann_entropy(sigma, sym).nats, rho);
}

EntropyValue relative_entropy(const DensityMatrix& sigma, double s_sigma, const ThermalState& rho) {
  require_same_dim(sigma, rho.dim(), "relative_entropy");
  const double energy = trace_product_real(rho.hamiltonian().matrix(), sigma.matrix());
  return EntropyValue::finite(-s_sigma + rho.beta() * energy + rho.log_partition());
}

EntropyValue bs_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho) {
  require_same_dim(sigma, rho.dim(), "bs_relative_entropy");
  const SpectralDecomposition dr = spectral_decompose(rho.op());
  const RealVector r = floor_clamped(dr.eigenvalues());
  for (Index k = 0; k < r.size(); ++k)
    if (r(k) == 0.0) return EntropyValue::infinite();

  RealVector inv_sqrt(r.size());
  for (Index k = 0; k < r.size(); ++k) inv_sqrt(k) = 1.0 / std::sqrt(r(k));
  // x = rho^{-1/2} sigma rho^{-1/2}, assembled in rho's eigenbasis.
  ComplexMatrix x_eig = dr.to_eigenbasis(sigma.matrix());
  x_eig = inv_sqrt.cast<Complex>().asDiagonal() * x_eig * inv_sqrt.cast<Complex>().asDiagonal();
  const HermitianOperator x(dr.from_eigenbasis(x_eig));
  const SpectralDecomposition dx = spectral_decompose(x);

  // -tr[rho eta(x)] = -sum_k eta(x_k) <v_k|rho|v_k>
  const RealVector xs = floor_clamped(dx.eigenvalues());
  const ComplexMatrix w = dr.project(dx.eigenvectors());
  double total = 0.0;
  for (Index k = 0; k < xs.size(); ++k) {
    if (xs(k) == 0.0) continue;
    double weight = 0.0;
    for (Index i = 0; i < w.rows(); ++i) weight += r(i) * std::norm(w(i, k));
    total += eta(xs(k)) * weight;
  }
  return EntropyValue::finite(-total);
}

EntropyValue bs_relative_entropy(const DensityMatrix& sigma, const ThermalState& rho,
                                 const CyclicBlocks* sym) {
  require_same_dim(sigma, rho.dim(), "bs_relative_entropy");
  const ComplexMatrix x = rho.inverse_sqrt_sandwich(sigma.matrix());
  const bool sectored = sym != nullptr && rho.translation_adapted() && sym->commutes(sigma.matrix());
  const auto blocks = sectored ? rho.sector_blocks() : ThermalState::single_block(rho.dim());
  return EntropyValue::finite(minus_trace_rho_eta(rho, x, blocks));
}

EntropyValue bs_relative_entropy_energy_basis(const ComplexMatrix& sigma, const ThermalState& rho,
                                              const std::vector<std::vector<Index>>& blocks) {
  if (sigma.rows() != rho.dim() || sigma.cols() != rho.dim())
    throw DimensionError("bs_relative_entropy_energy_basis: dimension mismatch");
  const RealVector& e = rho.hamiltonian_decomp().eigenvalues();
  const double exponent = rho.beta() * (e.maxCoeff() - e.minCoeff()) / 2.0;
  if (exponent > 700.0) {
    std::ostringstream os;
    os << "beta * spectral radius = " << exponent
       << " overflows exp(beta H / 2); use a smaller beta or fewer sites";
    throw OverflowError(os.str());
  }
  // sigma^{1/2} rho^{-1} sigma^{1/2} = K^dagger K with K = rho^{-1/2} sigma^{1/2}:
  // its eigenvalues are the squared singular values of K, eigenvectors the right singular vectors.
  double total = 0.0;
  for (const auto& block : blocks) {
    const Index m = static_cast<Index>(block.size());
    ComplexMatrix sb(m, m);
    RealVector inv_sqrt(m);
    for (Index j = 0; j < m; ++j) {
      const Index bj = block[static_cast<std::size_t>(j)];
      inv_sqrt(j) = std::exp(0.5 * (rho.beta() * e(bj) + rho.log_partition()));
      for (Index i = 0; i < m; ++i) sb(i, j) = sigma(block[static_cast<std::size_t>(i)], bj);
    }
    sb = (sb + sb.adjoint()) * 0.5;
    const SpectralDecomposition ds = spectral_decompose(HermitianOperator(sb));
    const RealVector s = floor_clamped(ds.eigenvalues());
    const ComplexMatrix half = ds.eigenvectors() * s.cwiseSqrt().cast<Complex>().asDiagonal() * ds.eigenvectors().adjoint();
    const Eigen::BDCSVD<ComplexMatrix> svd(inv_sqrt.cast<Complex>().asDiagonal() * half,
                                           Eigen::ComputeThinV);
    const ComplexMatrix& r = svd.matrixV();
    const RealVector weights = (r.adjoint() * sb * r).diagonal().real();
    const RealVector& sv = svd.singularValues();
    const double floor = std::sqrt(tolerance::kSpectralFloor) * (sv.size() > 0 ? sv(0) : 0.0);
    for (Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > floor)
        total += weights(k) * 2.0 * std::log(sv(k));
      else if (weights(k) > tolerance::kSupportLeak)
        return EntropyValue::infinite();
    }
  }
  return EntropyValue::finite(total);
}

double minus_trace_rho_eta(const ThermalState& rho, const ComplexMatrix& x,
                           const std::vector<std::vector<Index>>& blocks) {
  if (x.rows() != rho.dim() || x.cols() != rho.dim())
    throw DimensionError("minus_trace_rho_eta: dimension mismatch");
  const RealVector& p = rho.populations();
  // per block: eigenvalues of x and their weights <v|rho|v> = sum_i p_i |v_i|^2
  std::vector<std::pair<RealVector, RealVector>> parts;
  double top = 0.0;
  for (const auto& block : blocks) {
    const Index m = static_cast<Index>(block.size());
    ComplexMatrix xb(m, m);
    RealVector pb(m);
    for (Index j = 0; j < m; ++j) {
      pb(j) = p(block[static_cast<std::size_t>(j)]);
      for (Index i = 0; i < m; ++i) xb(i, j) = x(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
    }
    const SpectralDecomposition d = spectral_decompose(HermitianOperator(ComplexMatrix((xb + xb.adjoint()) * 0.5)));
    RealVector weights = d.eigenvectors().cwiseAbs2().transpose() * pb;
    top = std::max(top, d.eigenvalues().maxCoeff());
    parts.emplace_back(d.eigenvalues(), std::move(weights));
  }
  const double floor = tolerance::kSpectralFloor * top;
  double total = 0.0;
  for (const auto& [lambda, weights] : parts)
    for (Index k = 0; k < lambda.size(); ++k)
      if (lambda(k) >= floor) total += eta(lambda(k)) * weights(k);
  return -total;
}

double thermo_entropy_production(double beta, double work) { return beta * work; }

}  // namespace frameavg
