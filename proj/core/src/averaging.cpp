#include "frameavg/averaging.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCore>

namespace frameavg {

namespace {

constexpr int kMaxSeriesTerms = 4000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_order(const UnitaryOperator& t, int n) {
  if (n < 1) throw DimensionError("translation average: N must be positive");
  if (const auto& p = t.permutation()) {
    const auto& perm = *p;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      Index k = static_cast<Index>(i);
      for (int step = 0; step < n; ++step) k = perm[static_cast<std::size_t>(k)];
      if (k != static_cast<Index>(i)) {
        std::ostringstream os;
        os << "translation operator is not of order " << n;
        throw DimensionError(os.str());
      }
    }
    return;
  }
  ComplexMatrix power = ComplexMatrix::Identity(t.dim(), t.dim());
  for (int step = 0; step < n; ++step) power = t.matrix() * power;
  const double defect = max_norm(power - ComplexMatrix::Identity(t.dim(), t.dim()));
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "translation operator is not of order " << n << " (||T^N - 1||_max = " << defect << ")";
    throw DimensionError(os.str());
  }
}

// Block label per eigenvalue: consecutive levels closer than tol share a block.
std::vector<Index> degenerate_blocks(const RealVector& energies) {
  const Index n = energies.size();
  std::vector<Index> label(static_cast<std::size_t>(n), 0);
  if (n == 0) return label;
  const double tol = 1e-10 * (energies.maxCoeff() - energies.minCoeff());
  Index current = 0;
  for (Index k = 1; k < n; ++k) {
    if (energies(k) - energies(k - 1) > tol) ++current;
    label[static_cast<std::size_t>(k)] = current;
  }
  return label;
}

}  // namespace

std::string kind_name(const AveragingKind& kind) {
  return std::visit(Overloaded{[](const UniformSpatial&) { return std::string("uniform-spatial"); },
                               [](const WeightedSpatial&) { return std::string("weighted-spatial"); },
                               [](const Temporal&) { return std::string("temporal"); }},
                    kind);
}

double kind_parameter(const AveragingKind& kind) {
  return std::visit(Overloaded{[](const UniformSpatial&) { return 0.0; },
                               [](const WeightedSpatial& w) { return w.range; },
                               [](const Temporal& t) { return t.tau; }},
                    kind);
}

void validate_kind(const AveragingKind& kind) {
  if (const auto* w = std::get_if<WeightedSpatial>(&kind)) {
    if (!std::isfinite(w->range) || w->range <= 0.0)
      throw ConfigError("weighted-spatial: R must be positive and finite");
  }
  if (const auto* t = std::get_if<Temporal>(&kind)) {
    if (std::isnan(t->tau) || t->tau <= 0.0)
      throw ConfigError("temporal: tau must be positive (or infinite)");
  }
}

std::vector<double> translation_weights(int n, double range) {
  if (n < 1) throw DimensionError("translation_weights: N must be positive");
  if (!(range > 0.0)) throw DomainError("translation_weights: R must be positive", range);
  std::vector<double> w(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const int dist = std::min(k, n - k);
    w[static_cast<std::size_t>(k)] = std::exp(-dist / range);
    sum += w[static_cast<std::size_t>(k)];
  }
  for (double& x : w) x /= sum;
  return w;
}

ComplexMatrix average_over_translations(const ComplexMatrix& a, const UnitaryOperator& t,
                                        const std::vector<double>& weights) {
  const int n = static_cast<int>(weights.size());
  require_order(t, n);
  if (a.rows() != t.dim() || a.cols() != t.dim())
    throw DimensionError("average_over_translations: dimension mismatch");
  ComplexMatrix acc = weights[0] * a;
  ComplexMatrix shifted = a;
  for (int k = 1; k < n; ++k) {
    shifted = conjugate(t, shifted);
    if (weights[static_cast<std::size_t>(k)] != 0.0) acc += weights[static_cast<std::size_t>(k)] * shifted;
  }
  return acc;
}

ComplexMatrix temporal_map(const ComplexMatrix& a, const SpectralDecomposition& h_decomp,
                           double tau) {
  if (a.rows() != h_decomp.dim() || a.cols() != h_decomp.dim())
    throw DimensionError("temporal_map: dimension mismatch");
  if (tau < 1e-12) return a;
  const RealVector& e = h_decomp.eigenvalues();
  const Index n = e.size();
  ComplexMatrix m = h_decomp.to_eigenbasis(a);
  if (std::isinf(tau)) {
    const auto block = degenerate_blocks(e);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        if (block[static_cast<std::size_t>(i)] != block[static_cast<std::size_t>(j)]) m(i, j) = 0.0;
  } else {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) m(i, j) /= Complex(1.0, (e(i) - e(j)) * tau);
  }
  return h_decomp.from_eigenbasis(m);
}

// ---------------------------------------------------------------------------
// AveragingChannel

AveragingChannel AveragingChannel::spatial(const AveragingKind& kind, const UnitaryOperator& t,
                                           int n) {
  validate_kind(kind);
  AveragingChannel c;
  c.kind_ = kind;
  c.translation_ = &t;
  if (std::holds_alternative<UniformSpatial>(kind))
    c.weights_.assign(static_cast<std::size_t>(n), 1.0 / n);
  else if (const auto* w = std::get_if<WeightedSpatial>(&kind))
    c.weights_ = translation_weights(n, w->range);
  else
    throw ConfigError("AveragingChannel::spatial: temporal kind needs a Hamiltonian decomposition");
  require_order(t, n);
  return c;
}

AveragingChannel AveragingChannel::temporal(double tau, const SpectralDecomposition& h_decomp) {
  AveragingChannel c;
  c.kind_ = Temporal{tau};
  validate_kind(c.kind_);
  c.h_decomp_ = &h_decomp;
  return c;
}

AveragingChannel AveragingChannel::make(const AveragingKind& kind, const UnitaryOperator& t, int n,
                                        const SpectralDecomposition& h_decomp) {
  if (const auto* tk = std::get_if<Temporal>(&kind)) return temporal(tk->tau, h_decomp);
  return spatial(kind, t, n);
}

ComplexMatrix AveragingChannel::apply(const ComplexMatrix& a) const {
  if (h_decomp_ != nullptr) return temporal_map(a, *h_decomp_, std::get<Temporal>(kind_).tau);
  return average_over_translations(a, *translation_, weights_);
}

HermitianOperator AveragingChannel::apply(const HermitianOperator& a) const {
  return HermitianOperator(apply(a.matrix()));
}

DensityMatrix AveragingChannel::apply(const DensityMatrix& rho) const {
  return trusted_density(apply(rho.op()));
}

ComplexMatrix AveragingChannel::apply_in_energy_basis(const ComplexMatrix& a,
                                                     const ThermalState& state) const {
  const Index dim = state.dim();
  if (a.rows() != dim || a.cols() != dim)
    throw DimensionError("apply_in_energy_basis: dimension mismatch");
  ComplexMatrix out = a;
  if (h_decomp_ != nullptr) {
    const double tau = std::get<Temporal>(kind_).tau;
    if (tau < 1e-12) return out;
    const RealVector& e = state.hamiltonian_decomp().eigenvalues();
    if (std::isinf(tau)) {
      const auto block = degenerate_blocks(e);
      for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i)
          if (block[static_cast<std::size_t>(i)] != block[static_cast<std::size_t>(j)]) out(i, j) = 0.0;
    } else {
      for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) out(i, j) /= Complex(1.0, (e(i) - e(j)) * tau);
    }
    return out;
  }

  const int n = static_cast<int>(weights_.size());
  if (!state.translation_adapted() || state.sector_order() != n)
    throw DimensionError("apply_in_energy_basis: spatial averaging needs a translation-adapted eigenbasis of order N");
  // T^m |k> = exp(2 pi i m q_k / N) |k>, so entry (i, j) picks up sum_m w_m exp(2 pi i m (q_i - q_j) / N)
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<Complex> factor(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  for (int d = 0; d < n; ++d)
    for (int m = 0; m < n; ++m)
      factor[static_cast<std::size_t>(d)] +=
          weights_[static_cast<std::size_t>(m)] * std::polar(1.0, kTwoPi * ((m * d) % n) / n);
  if (std::holds_alternative<UniformSpatial>(kind_)) {
    factor.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
    factor[0] = 1.0;
  }
  const auto& q = state.sectors();
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) {
      const int d = ((q[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(j)]) % n + n) % n;
      out(i, j) *= factor[static_cast<std::size_t>(d)];
    }
  return out;
}

std::vector<std::vector<Index>> AveragingChannel::energy_basis_blocks(const ThermalState& state) const {
  if (std::holds_alternative<UniformSpatial>(kind_) && state.translation_adapted()) return state.sector_blocks();
  if (const auto* tk = std::get_if<Temporal>(&kind_); tk != nullptr && std::isinf(tk->tau)) {
    const auto label = degenerate_blocks(state.hamiltonian_decomp().eigenvalues());
    std::vector<std::vector<Index>> blocks;
    for (Index k = 0; k < state.dim(); ++k) {
      const auto b = static_cast<std::size_t>(label[static_cast<std::size_t>(k)]);
      if (b >= blocks.size()) blocks.resize(b + 1);
      blocks[b].push_back(k);
    }
    return blocks;
  }
  return ThermalState::single_block(state.dim());
}

DensityMatrix frame_average(const DensityMatrix& rho, const UnitaryOperator& t, int n) {
  return AveragingChannel::spatial(UniformSpatial{}, t, n).apply(rho);
}

DensityMatrix weighted_frame_average(const DensityMatrix& rho, const UnitaryOperator& t, int n,
                                     double range) {
  return AveragingChannel::spatial(WeightedSpatial{range}, t, n).apply(rho);
}

DensityMatrix temporal_average(const DensityMatrix& rho, const SpectralDecomposition& h_decomp,
                               double tau) {
  return AveragingChannel::temporal(tau, h_decomp).apply(rho);
}

// ---------------------------------------------------------------------------
// E_beta

ConjugatedPerturbation conjugated_perturbation(const ThermalState& state, const UnitaryOperator& u) {
  if (u.dim() != state.dim()) throw DimensionError("conjugated_perturbation: dimension mismatch");
  const SpectralDecomposition& dh = state.hamiltonian_decomp();
  const RealVector& e = dh.eigenvalues();
  const double beta = state.beta();
  const double width = e.maxCoeff() - e.minCoeff();
  if (beta * width / 2.0 > 700.0) {
    std::ostringstream os;
    os << "conjugated_perturbation: beta * spectral radius = " << beta * width / 2.0
       << " > 700 overflows exp(beta H / 2); use a smaller beta or fewer sites";
    throw OverflowError(os.str());
  }
  // sum_n s^n/n! ad_H^n(U) with s = beta/2; no eigenbasis round-off gets amplified
  const Eigen::SparseMatrix<Complex> h = state.hamiltonian().matrix().sparseView();
  const double s = 0.5 * beta;
  ComplexMatrix conj_u = u.matrix();
  ComplexMatrix term = conj_u;
  int quiet = 0;
  for (int k = 1; k <= kMaxSeriesTerms && quiet < 3 && s > 0.0; ++k) {
    ComplexMatrix next = h * term;
    next.noalias() -= term * h;
    term = (s / k) * next;
    conj_u += term;
    const double scale = max_norm(conj_u);
    quiet = max_norm(term) <= 1e-18 * scale ? quiet + 1 : 0;
  }
  if (quiet < 3 && s > 0.0)
    throw OverflowError("conjugated_perturbation: commutator series did not converge");
  HermitianOperator big_e(ComplexMatrix(conj_u * conj_u.adjoint()));

  // round-off in this basis scales with the largest entry of E
  const double trace = trace_product_real(state.rho().matrix(), big_e.matrix());
  if (std::abs(trace - 1.0) > 1e-9 * std::max(1.0, max_norm(big_e.matrix()))) {
    std::ostringstream os;
    os << "conjugated_perturbation: tr(rho E) = " << trace << " differs from 1";
    throw InvariantError(os.str(), std::abs(trace - 1.0));
  }
  return {std::move(conj_u), std::move(big_e)};
}

double averaged_E_deviation(const ConjugatedPerturbation& cp, const UnitaryOperator& t, int n) {
  const std::vector<double> uniform(static_cast<std::size_t>(n), 1.0 / n);
  ComplexMatrix d = average_over_translations(cp.e.matrix(), t, uniform);
  d.diagonal().array() -= 1.0;
  const HermitianOperator dh(std::move(d));
  if (!t.permutation()) return hermitian_operator_norm(dh);
  const CyclicBlocks sym(t, n);
  return hermitian_operator_norm(dh, &sym);
}

ComplexMatrix energy_basis_perturbed(const ThermalState& state, const UnitaryOperator& u) {
  if (u.dim() != state.dim()) throw DimensionError("energy_basis_perturbed: dimension mismatch");
  const Eigen::SparseMatrix<Complex> us = u.matrix().sparseView();
  const ComplexMatrix uv = us * state.hamiltonian_decomp().eigenvectors();
  ComplexMatrix a = state.hamiltonian_decomp().project(uv);
  a = a * state.populations().cwiseSqrt().cast<Complex>().asDiagonal();
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(a);
  return out.selfadjointView<Eigen::Lower>();
}

ComplexMatrix energy_basis_E(const ThermalState& state, const ComplexMatrix& rho_prime_energy) {
  if (rho_prime_energy.rows() != state.dim() || rho_prime_energy.cols() != state.dim())
    throw DimensionError("energy_basis_E: dimension mismatch");
  const RealVector& e = state.hamiltonian_decomp().eigenvalues();
  const double exponent = state.beta() * (e.maxCoeff() - e.minCoeff()) / 2.0;
  if (exponent > 700.0) {
    std::ostringstream os;
    os << "energy_basis_E: beta * spectral radius = " << exponent
       << " > 700 overflows exp(beta H / 2); use a smaller beta or fewer sites";
    throw OverflowError(os.str());
  }
  RealVector scale(e.size());
  for (Index k = 0; k < e.size(); ++k) scale(k) = std::exp(0.5 * (state.beta() * e(k) + state.log_partition()));
  return scale.cast<Complex>().asDiagonal() * rho_prime_energy * scale.cast<Complex>().asDiagonal();
}

AveragedEDiagnostics averaged_E_diagnostics(const ThermalState& state, const ComplexMatrix& averaged_e,
                                            const std::vector<std::vector<Index>>& blocks) {
  const Index dim = state.dim();
  if (averaged_e.rows() != dim || averaged_e.cols() != dim)
    throw DimensionError("averaged_E_diagnostics: dimension mismatch");
  const RealVector& p = state.populations();
  AveragedEDiagnostics out{};
  ComplexMatrix d = (averaged_e + averaged_e.adjoint()) * 0.5;
  d.diagonal().array() -= 1.0;
  // rho is diag(p) here: tr(rho X) = sum_k p_k X_kk, tr[rho D^2] = sum_kl p_k |D_kl|^2
  out.trace_rho_me = 1.0 + p.dot(d.diagonal().real());
  out.frobenius_deviation = d.norm();
  out.weighted_deviation = std::sqrt(std::max(0.0, p.dot(d.cwiseAbs2().rowwise().sum())));
  double op = 0.0;
  for (const auto& block : blocks) {
    const Index m = static_cast<Index>(block.size());
    ComplexMatrix db(m, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < m; ++i) db(i, j) = d(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
    const RealVector w = eigenvalues(HermitianOperator(std::move(db)));
    op = std::max({op, std::abs(w(0)), std::abs(w(m - 1))});
  }
  out.op_deviation = op;
  return out;
}

}  // namespace frameavg
