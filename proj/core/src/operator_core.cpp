#include "frameavg/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <lapacke.h>

namespace frameavg {

namespace {

ComplexMatrix hermitized(const ComplexMatrix& m) {
  ComplexMatrix h = (m + m.adjoint()) * 0.5;
  for (Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return h;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
  if (!m.allFinite()) throw InvariantError(std::string(what) + ": non-finite entry", 0.0);
}

// zheevd on a copy of `a`; jobz 'V' overwrites the copy with eigenvectors.
RealVector run_zheevd(ComplexMatrix& work, char jobz) {
  const Index n = work.rows();
  RealVector w(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', static_cast<lapack_int>(n),
                     reinterpret_cast<lapack_complex_double*>(work.data()),
                     static_cast<lapack_int>(n), w.data());
  if (info != 0) {
    std::ostringstream os;
    os << "Hermitian eigensolver failed (zheevd info=" << info << ") at dim " << n;
    throw ConvergenceError(os.str(), n, work.norm());
  }
  return w;
}

}  // namespace

double max_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && (a - a.adjoint()).cwiseAbs().maxCoeff() == 0.0) {
    const RealVector w = eigenvalues(HermitianOperator(a));
    return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
  }
  const RealVector w = eigenvalues(HermitianOperator(hermitized(a.adjoint() * a)));
  return std::sqrt(std::max(0.0, w(w.size() - 1)));
}

std::optional<std::vector<Index>> as_permutation(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  const Index n = a.rows();
  std::vector<Index> p(static_cast<std::size_t>(n), -1);
  std::vector<bool> row_used(static_cast<std::size_t>(n), false);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) {
      const Complex v = a(r, c);
      if (v == Complex(0.0, 0.0)) continue;
      if (v != Complex(1.0, 0.0) || p[c] != -1 || row_used[r]) return std::nullopt;
      p[c] = r;
      row_used[r] = true;
    }
    if (p[c] == -1) return std::nullopt;
  }
  return p;
}

bool is_diagonal(const ComplexMatrix& a) {
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (r != c && a(r, c) != Complex(0.0, 0.0)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// HermitianOperator / UnitaryOperator

HermitianOperator::HermitianOperator(ComplexMatrix m) {
  require_square(m, "HermitianOperator");
  const double scale = max_norm(m);
  const double asym = max_norm(m - m.adjoint());
  if (asym > tolerance::kHermiticity * scale) {
    std::ostringstream os;
    os << "HermitianOperator: ||A - A^dagger||_max = " << asym << " exceeds "
       << tolerance::kHermiticity << " * ||A||_max";
    throw InvariantError(os.str(), asym);
  }
  m_ = hermitized(m);
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "UnitaryOperator");
  perm_ = as_permutation(m_);
  if (perm_) return;
  const Index n = m_.rows();
  const double defect = max_norm(m_.adjoint() * m_ - ComplexMatrix::Identity(n, n));
  if (defect > tolerance::kUnitarity) {
    std::ostringstream os;
    os << "UnitaryOperator: ||U^dagger U - 1||_max = " << defect;
    throw InvariantError(os.str(), defect);
  }
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m, Unchecked) : m_(std::move(m)) {
  require_square(m_, "UnitaryOperator");
  perm_ = as_permutation(m_);
}

UnitaryOperator trusted_unitary(ComplexMatrix m) {
  return UnitaryOperator(std::move(m), UnitaryOperator::Unchecked{});
}

UnitaryOperator UnitaryOperator::identity(Index dim) {
  return UnitaryOperator(ComplexMatrix::Identity(dim, dim));
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return trusted_unitary(ComplexMatrix(m_.adjoint()));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("unitary product: dimension mismatch");
  return trusted_unitary(ComplexMatrix(a.matrix() * b.matrix()));
}

ComplexMatrix conjugate(const UnitaryOperator& u, const ComplexMatrix& a) {
  if (u.dim() != a.rows() || a.rows() != a.cols())
    throw DimensionError("conjugate: dimension mismatch");
  if (const auto& p = u.permutation()) {
    const Index n = a.rows();
    ComplexMatrix out(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) out((*p)[i], (*p)[j]) = a(i, j);
    return out;
  }
  return u.matrix() * a * u.matrix().adjoint();
}

// ---------------------------------------------------------------------------
// SpectralDecomposition

SpectralDecomposition::SpectralDecomposition(RealVector eigenvalues, ComplexMatrix eigenvectors)
    : values_(std::move(eigenvalues)), vectors_(std::move(eigenvectors)) {
  if (vectors_.rows() != vectors_.cols() || vectors_.rows() != values_.size())
    throw DimensionError("SpectralDecomposition: eigenvector/eigenvalue size mismatch");
  perm_ = as_permutation(vectors_);
}

HermitianOperator SpectralDecomposition::reconstruct(const RealVector& values) const {
  const Index n = dim();
  if (values.size() != n) throw DimensionError("reconstruct: value count mismatch");
  if (perm_) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) out((*perm_)[i], (*perm_)[i]) = values(i);
    return HermitianOperator(std::move(out));
  }
  const ComplexMatrix scaled = vectors_ * values.cast<Complex>().asDiagonal();
  return HermitianOperator(hermitized(scaled * vectors_.adjoint()));
}

ComplexMatrix SpectralDecomposition::to_eigenbasis(const ComplexMatrix& a) const {
  const Index n = dim();
  if (a.rows() != n || a.cols() != n) throw DimensionError("to_eigenbasis: dimension mismatch");
  if (perm_) {
    ComplexMatrix out(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) out(i, j) = a((*perm_)[i], (*perm_)[j]);
    return out;
  }
  return vectors_.adjoint() * a * vectors_;
}

ComplexMatrix SpectralDecomposition::from_eigenbasis(const ComplexMatrix& a) const {
  const Index n = dim();
  if (a.rows() != n || a.cols() != n) throw DimensionError("from_eigenbasis: dimension mismatch");
  if (perm_) {
    ComplexMatrix out(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) out((*perm_)[i], (*perm_)[j]) = a(i, j);
    return out;
  }
  return vectors_ * a * vectors_.adjoint();
}

ComplexMatrix SpectralDecomposition::project(const ComplexMatrix& b) const {
  const Index n = dim();
  if (b.rows() != n) throw DimensionError("project: dimension mismatch");
  if (perm_) {
    ComplexMatrix out(n, b.cols());
    for (Index k = 0; k < b.cols(); ++k)
      for (Index i = 0; i < n; ++i) out(i, k) = b((*perm_)[i], k);
    return out;
  }
  return vectors_.adjoint() * b;
}

SpectralDecomposition spectral_decompose(const HermitianOperator& a) {
  const ComplexMatrix& m = a.matrix();
  const Index n = a.dim();
  if (is_diagonal(m)) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return m(x, x).real() < m(y, y).real(); });
    RealVector values(n);
    ComplexMatrix vectors = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      values(k) = m(order[k], order[k]).real();
      vectors(order[k], k) = 1.0;
    }
    return SpectralDecomposition(std::move(values), std::move(vectors));
  }
  ComplexMatrix work = m;
  RealVector values = run_zheevd(work, 'V');
  return SpectralDecomposition(std::move(values), std::move(work));
}

RealVector eigenvalues(const HermitianOperator& a) {
  const ComplexMatrix& m = a.matrix();
  if (is_diagonal(m)) {
    RealVector values = m.diagonal().real();
    std::sort(values.data(), values.data() + values.size());
    return values;
  }
  ComplexMatrix work = m;
  return run_zheevd(work, 'N');
}

double spectral_floor(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  return tolerance::kSpectralFloor * std::max(0.0, eigenvalues.maxCoeff());
}

RealVector floor_clamped(const RealVector& eigenvalues) {
  const double floor = spectral_floor(eigenvalues);
  RealVector out = eigenvalues;
  for (Index i = 0; i < out.size(); ++i)
    if (out(i) < floor) out(i) = 0.0;
  return out;
}

HermitianOperator matrix_function(const SpectralDecomposition& d, const ScalarFunction& f,
                                  FloorPolicy policy) {
  const RealVector base =
      policy == FloorPolicy::kClamp ? floor_clamped(d.eigenvalues()) : d.eigenvalues();
  RealVector mapped(base.size());
  for (Index i = 0; i < base.size(); ++i) {
    mapped(i) = f(base(i));
    if (!std::isfinite(mapped(i))) {
      std::ostringstream os;
      os << "matrix_function: f is not finite at eigenvalue " << base(i)
         << " (index " << i << ", raw " << d.eigenvalues()(i) << ")";
      throw DomainError(os.str(), base(i));
    }
  }
  return d.reconstruct(mapped);
}

double eta(double s) {
  if (s <= 0.0) return 0.0;
  return -s * std::log(s);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianOperator m) : m_(std::move(m)) {
  const double trace = m_.matrix().trace().real();
  if (std::abs(trace - 1.0) > tolerance::kTrace) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << trace << " differs from 1";
    throw InvariantError(os.str(), std::abs(trace - 1.0));
  }
  const double min_eig = eigenvalues(m_)(0);
  if (min_eig < -tolerance::kPositivity) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << min_eig;
    throw InvariantError(os.str(), -min_eig);
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return trusted_density(
      HermitianOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw DomainError("DensityMatrix::pure: zero vector", norm2);
  return trusted_density(HermitianOperator(ComplexMatrix(psi * psi.adjoint() / norm2)));
}

DensityMatrix trusted_density(HermitianOperator m) {
  const double trace = m.matrix().trace().real();
  if (std::abs(trace - 1.0) > tolerance::kTrace) {
    std::ostringstream os;
    os << "density matrix trace " << trace << " differs from 1";
    throw InvariantError(os.str(), std::abs(trace - 1.0));
  }
  return DensityMatrix(std::move(m), DensityMatrix::Unchecked{});
}

// ---------------------------------------------------------------------------
// Random generators

ComplexMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

HermitianOperator random_hermitian(Index dim, std::uint64_t seed) {
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, seed);
  return HermitianOperator(hermitized(g));
}

DensityMatrix random_density_matrix(Index dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("random_density_matrix: dim must be >= 1");
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, seed);
  ComplexMatrix w = hermitized(g * g.adjoint());
  w /= w.trace().real();
  return trusted_density(HermitianOperator(std::move(w)));
}

UnitaryOperator random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("random_unitary: dim must be >= 1");
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return UnitaryOperator(std::move(q));
}

// ---------------------------------------------------------------------------
// CyclicBlocks

CyclicBlocks::CyclicBlocks(const UnitaryOperator& t, int order) : order_(order) {
  if (order < 1) throw DimensionError("CyclicBlocks: order must be >= 1");
  if (!t.permutation()) throw DimensionError("CyclicBlocks: symmetry must be a permutation");
  perm_ = *t.permutation();
  const std::size_t n = perm_.size();
  std::vector<bool> seen(n, false);
  sectors_.resize(static_cast<std::size_t>(order));
  for (std::size_t r = 0; r < n; ++r) {
    if (seen[r]) continue;
    std::vector<Index> orbit;
    Index x = static_cast<Index>(r);
    do {
      seen[static_cast<std::size_t>(x)] = true;
      orbit.push_back(x);
      x = perm_[static_cast<std::size_t>(x)];
    } while (x != static_cast<Index>(r));
    const int len = static_cast<int>(orbit.size());
    if (order % len != 0) {
      std::ostringstream os;
      os << "CyclicBlocks: orbit of length " << len << " does not divide order " << order;
      throw DimensionError(os.str());
    }
    const std::size_t o = orbits_.size();
    orbits_.push_back(std::move(orbit));
    for (int k = 0; k < len; ++k)
      sectors_[static_cast<std::size_t>(k * (order / len))].push_back(State{o, k});
  }
}

Index CyclicBlocks::sector_dim(int q) const {
  return static_cast<Index>(sectors_.at(static_cast<std::size_t>(q)).size());
}

bool CyclicBlocks::commutes(const ComplexMatrix& a, double tol) const {
  const Index n = dim();
  if (a.rows() != n || a.cols() != n) return false;
  const double bound = tol * std::max(1.0, max_norm(a));
  for (Index j = 0; j < n; ++j) {
    const Index pj = perm_[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i)
      if (std::abs(a(perm_[static_cast<std::size_t>(i)], pj) - a(i, j)) > bound) return false;
  }
  return true;
}

ComplexMatrix CyclicBlocks::block(const ComplexMatrix& a, int q) const {
  if (a.rows() != dim() || a.cols() != dim()) throw DimensionError("CyclicBlocks::block: dimension mismatch");
  const auto& states = sectors_.at(static_cast<std::size_t>(q));
  const Index nq = static_cast<Index>(states.size());
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  // <a| A |b> = sqrt(L_b) sum_m conj(c^a_m) A(T^m r_a, r_b) for T-invariant A.
  std::vector<std::vector<Complex>> phases(static_cast<std::size_t>(nq));
  for (Index s = 0; s < nq; ++s) {
    const auto& st = states[static_cast<std::size_t>(s)];
    const int len = static_cast<int>(orbits_[st.orbit].size());
    auto& ph = phases[static_cast<std::size_t>(s)];
    ph.resize(static_cast<std::size_t>(len));
    for (int m = 0; m < len; ++m)
      ph[static_cast<std::size_t>(m)] = std::polar(1.0 / std::sqrt(double(len)), kTwoPi * st.k * m / len);
  }
  ComplexMatrix out(nq, nq);
  for (Index b = 0; b < nq; ++b) {
    const auto& sb = states[static_cast<std::size_t>(b)];
    const Index rb = orbits_[sb.orbit].front();
    const double scale = std::sqrt(double(orbits_[sb.orbit].size()));
    for (Index a_ = 0; a_ < nq; ++a_) {
      const auto& orbit = orbits_[states[static_cast<std::size_t>(a_)].orbit];
      const auto& ph = phases[static_cast<std::size_t>(a_)];
      Complex acc(0.0, 0.0);
      for (std::size_t m = 0; m < orbit.size(); ++m) acc += ph[m] * a(orbit[m], rb);
      out(a_, b) = scale * acc;
    }
  }
  return out;
}

RealVector CyclicBlocks::eigenvalues(const HermitianOperator& a) const {
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(dim()));
  for (int q = 0; q < order_; ++q) {
    if (sectors_[static_cast<std::size_t>(q)].empty()) continue;
    const RealVector w = frameavg::eigenvalues(HermitianOperator(hermitized(block(a.matrix(), q))));
    all.insert(all.end(), w.data(), w.data() + w.size());
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<const RealVector>(all.data(), static_cast<Index>(all.size()));
}

SpectralDecomposition CyclicBlocks::decompose(const HermitianOperator& a, std::vector<int>& sectors) const {
  const Index n = dim();
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<double> values;
  std::vector<int> labels;
  ComplexMatrix vectors = ComplexMatrix::Zero(n, n);
  Index col = 0;
  for (int q = 0; q < order_; ++q) {
    const auto& states = sectors_[static_cast<std::size_t>(q)];
    if (states.empty()) continue;
    const SpectralDecomposition dq = spectral_decompose(HermitianOperator(hermitized(block(a.matrix(), q))));
    const ComplexMatrix& w = dq.eigenvectors();
    // column j of W_q w, with <T^m r_o | o, k> = L^{-1/2} exp(-2 pi i k m / L)
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto& orbit = orbits_[states[s].orbit];
      const int len = static_cast<int>(orbit.size());
      for (int m = 0; m < len; ++m) {
        const Complex c = std::polar(1.0 / std::sqrt(double(len)), -kTwoPi * states[s].k * m / len);
        vectors.block(orbit[static_cast<std::size_t>(m)], col, 1, w.cols()) += c * w.row(static_cast<Index>(s));
      }
    }
    for (Index j = 0; j < dq.dim(); ++j) {
      values.push_back(dq.eigenvalues()(j));
      labels.push_back(q);
    }
    col += dq.dim();
  }

  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(j)];
  });
  RealVector sorted(n);
  ComplexMatrix sorted_vectors(n, n);
  sectors.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    sorted(k) = values[static_cast<std::size_t>(src)];
    sorted_vectors.col(k) = vectors.col(src);
    sectors[static_cast<std::size_t>(k)] = labels[static_cast<std::size_t>(src)];
  }
  return SpectralDecomposition(std::move(sorted), std::move(sorted_vectors));
}

Complex CyclicBlocks::phase(int q) const {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::polar(1.0, kTwoPi * q / order_);
}

RealVector eigenvalues(const HermitianOperator& a, const CyclicBlocks* sym) {
  if (sym != nullptr && sym->commutes(a.matrix())) return sym->eigenvalues(a);
  return eigenvalues(a);
}

double hermitian_operator_norm(const HermitianOperator& a, const CyclicBlocks* sym) {
  const RealVector w = eigenvalues(a, sym);
  return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
}

double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw DimensionError("trace_product_real: dimension mismatch");
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace frameavg
