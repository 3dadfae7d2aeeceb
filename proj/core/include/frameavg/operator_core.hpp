#pragma once

// Dense complex linear algebra kernel: strong operator types, Hermitian
// spectral decomposition, spectral matrix functions, norms and seeded
// random generators for states and unitaries.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "frameavg/errors.hpp"

namespace frameavg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tolerance {
// ||A - A^dagger||_max relative to ||A||_max accepted by HermitianOperator.
inline constexpr double kHermiticity = 1e-12;
// ||U^dagger U - 1||_max accepted by UnitaryOperator.
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-12;
// Eigenvalues below kSpectralFloor * lambda_max count as exact zeros
// before singular functions (log, s^{-1/2}, s^{-1}) are applied.
inline constexpr double kSpectralFloor = 1e-14;
}  // namespace tolerance

/// Largest absolute entry.
double max_norm(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

/// Returns the permutation p with a(p[c], c) == 1 and all other entries 0,
/// or nullopt if `a` is not exactly a permutation matrix.
std::optional<std::vector<Index>> as_permutation(const ComplexMatrix& a);

bool is_diagonal(const ComplexMatrix& a);

class HermitianOperator {
 public:
  /// Validates ||A - A^dagger||_max <= 1e-12 ||A||_max and stores (A + A^dagger)/2.
  explicit HermitianOperator(ComplexMatrix m);

  static HermitianOperator zero(Index dim);
  static HermitianOperator identity(Index dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

class UnitaryOperator {
 public:
  /// Validates ||U^dagger U - 1||_max <= 1e-10.
  explicit UnitaryOperator(ComplexMatrix m);

  static UnitaryOperator identity(Index dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  UnitaryOperator adjoint() const;

  /// Non-null when the matrix is an exact permutation; conjugation by it is then an index shuffle.
  const std::optional<std::vector<Index>>& permutation() const noexcept { return perm_; }

 private:
  struct Unchecked {};
  UnitaryOperator(ComplexMatrix m, Unchecked);
  friend UnitaryOperator trusted_unitary(ComplexMatrix m);

  ComplexMatrix m_;
  std::optional<std::vector<Index>> perm_;
};

/// Wraps a matrix that is unitary by construction (embedding or product of
/// validated unitaries) without the O(n^3) U^dagger U check.
UnitaryOperator trusted_unitary(ComplexMatrix m);

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);

/// U A U^dagger, using an index shuffle when U is a permutation.
ComplexMatrix conjugate(const UnitaryOperator& u, const ComplexMatrix& a);

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian operator.
class SpectralDecomposition {
 public:
  SpectralDecomposition(RealVector eigenvalues, ComplexMatrix eigenvectors);

  const RealVector& eigenvalues() const noexcept { return values_; }
  const ComplexMatrix& eigenvectors() const noexcept { return vectors_; }
  Index dim() const noexcept { return values_.size(); }

  /// V diag(values) V^dagger, exactly Hermitian.
  HermitianOperator reconstruct(const RealVector& values) const;

  /// V^dagger a V
  ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const;
  /// V a V^dagger
  ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const;
  /// V^dagger b for a block of column vectors b.
  ComplexMatrix project(const ComplexMatrix& b) const;

 private:
  RealVector values_;
  ComplexMatrix vectors_;
  // Set when the eigenbasis is a permutation of the computational basis
  // (diagonal input), so basis changes become index shuffles.
  std::optional<std::vector<Index>> perm_;
};

/// Full spectral decomposition. Throws ConvergenceError when the eigensolver fails.
SpectralDecomposition spectral_decompose(const HermitianOperator& a);

/// Eigenvalues only (ascending); several times cheaper than the full decomposition.
RealVector eigenvalues(const HermitianOperator& a);

/// kSpectralFloor * max eigenvalue (0 when the spectrum is non-positive).
double spectral_floor(const RealVector& eigenvalues);

/// Copy of `eigenvalues` with entries below the relative floor set to exactly 0.
RealVector floor_clamped(const RealVector& eigenvalues);

using ScalarFunction = std::function<double(double)>;

enum class FloorPolicy {
  kNone,
  // eigenvalues below the relative spectral floor become exactly 0 before f is applied
  kClamp,
};

/// V f(Lambda) V^dagger. Throws DomainError naming the first eigenvalue where f is not finite.
HermitianOperator matrix_function(const SpectralDecomposition& d, const ScalarFunction& f,
                                  FloorPolicy policy = FloorPolicy::kNone);

/// eta(s) = -s log s with eta(0) = 0; non-positive arguments map to 0.
double eta(double s);

class DensityMatrix {
 public:
  /// Validates min eigenvalue >= -1e-12 and |trace - 1| <= 1e-10.
  explicit DensityMatrix(HermitianOperator m);

  static DensityMatrix maximally_mixed(Index dim);
  /// |psi><psi| / <psi|psi>
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  const HermitianOperator& op() const noexcept { return m_; }
  const ComplexMatrix& matrix() const noexcept { return m_.matrix(); }
  Index dim() const noexcept { return m_.dim(); }

 private:
  struct Unchecked {};
  DensityMatrix(HermitianOperator m, Unchecked) : m_(std::move(m)) {}
  friend DensityMatrix trusted_density(HermitianOperator m);

  HermitianOperator m_;
};

/// Wraps an operator that is a density matrix by construction (unitary
/// conjugation or convex mixture of one). Only the trace is re-checked.
DensityMatrix trusted_density(HermitianOperator m);

/// Seeded complex Hermitian matrix (G + G^dagger)/2 with standard complex Gaussian G.
HermitianOperator random_hermitian(Index dim, std::uint64_t seed);

/// G G^dagger / tr(G G^dagger) for standard complex Gaussian G.
DensityMatrix random_density_matrix(Index dim, std::uint64_t seed);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of R's diagonal removed.
UnitaryOperator random_unitary(Index dim, std::uint64_t seed);

/// Complex Gaussian matrix with E|g|^2 = 1 per entry, deterministic per seed.
ComplexMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

/// Momentum sectors of a cyclic permutation symmetry T (T^N = 1).
///
/// Operators commuting with T are block diagonal in the orbit basis
/// |o, k> = L^{-1/2} sum_m exp(-2 pi i k m / L) T^m |r_o>, grouped by the
/// T eigenvalue exp(2 pi i q / N). Spectra then cost sum_q n_q^3 instead of n^3.
class CyclicBlocks {
 public:
  /// Throws DimensionError unless `t` is a permutation of order dividing `order`.
  CyclicBlocks(const UnitaryOperator& t, int order);

  int order() const noexcept { return order_; }
  Index dim() const noexcept { return static_cast<Index>(perm_.size()); }
  /// Dimension of sector q.
  Index sector_dim(int q) const;

  /// max |a(p_i, p_j) - a(i, j)| <= tol * max(1, ||a||_max)
  bool commutes(const ComplexMatrix& a, double tol = 1e-12) const;

  /// W_q^dagger a W_q for a T-invariant `a`.
  ComplexMatrix block(const ComplexMatrix& a, int q) const;

  /// Union of the sector spectra, ascending. Caller guarantees commutes(a).
  RealVector eigenvalues(const HermitianOperator& a) const;

  /// Eigendecomposition whose eigenvectors are also eigenvectors of T, eigenvalues
  /// ascending; `sectors[k]` receives the q of column k. Caller guarantees commutes(a).
  SpectralDecomposition decompose(const HermitianOperator& a, std::vector<int>& sectors) const;

  /// exp(2 pi i q / N), the T eigenvalue on sector q.
  Complex phase(int q) const;

 private:
  struct State {
    std::size_t orbit;
    int k;  // T eigenvalue exp(2 pi i k / L) on an orbit of length L
  };

  int order_;
  std::vector<Index> perm_;
  std::vector<std::vector<Index>> orbits_;  // orbits_[o][m] = T^m r_o
  std::vector<std::vector<State>> sectors_;
};

/// Sector-wise spectrum when `sym` is non-null and `a` commutes with it, dense otherwise.
RealVector eigenvalues(const HermitianOperator& a, const CyclicBlocks* sym);

/// max |eigenvalue| of a Hermitian operator, through `sym` when applicable.
double hermitian_operator_norm(const HermitianOperator& a, const CyclicBlocks* sym = nullptr);

/// Real part of tr(a b), without forming the product.
double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace frameavg
