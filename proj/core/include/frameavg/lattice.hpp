#pragma once

// Finite periodic chain: Hilbert-space geometry, site-local operator
// embedding, the cyclic translation unitary and the model Hamiltonians.
//
// Basis convention: site 0 is the most significant digit of the
// computational-basis index, |s_0 s_1 ... s_{N-1}> -> sum_k s_k d^{N-1-k}.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "frameavg/operator_core.hpp"

namespace frameavg {

/// Hard ceiling on d^N. FRAMEAVG_MAX_DIM may lower it, never raise it.
inline constexpr Index kMaxHilbertDim = Index{1} << 14;

/// Effective guard after applying FRAMEAVG_MAX_DIM.
Index max_hilbert_dim();

struct LatticeSpec {
  int sites = 2;
  int local_dim = 2;
  bool periodic = true;

  /// d^N. Throws LatticeGuardError when it exceeds max_hilbert_dim().
  Index dimension() const;
  void validate() const;
};

enum class Model { kFreeSpins, kTransverseFieldIsing, kHeisenbergXXZ };

std::string_view model_name(Model m);
/// Accepts "free-spins", "transverse-field-ising", "heisenberg-xxz".
Model parse_model(std::string_view name);

struct HamiltonianSpec {
  Model model = Model::kFreeSpins;
  // free-spins: h; transverse-field-ising: J, g; heisenberg-xxz: J, Delta
  std::map<std::string, double> couplings;

  double coupling(const std::string& name) const;
  void validate() const;
  static std::vector<std::string> required_couplings(Model m);
};

struct SiteOperator {
  int site = 0;
  ComplexMatrix local;
};

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// 1 (x) ... (x) a (x) ... (x) 1 with `a` acting on `op.site`.
ComplexMatrix embed_site_operator(const LatticeSpec& lattice, const SiteOperator& op);

/// Tensor product of local operators on distinct sites, identity elsewhere.
ComplexMatrix embed_product(const LatticeSpec& lattice, const std::vector<SiteOperator>& ops);

/// Right cyclic shift |s_0 s_1 ... s_{N-1}> -> |s_{N-1} s_0 ... s_{N-2}>.
/// Conjugation moves site content j -> j+1 (mod N); T^N = 1.
UnitaryOperator translation_operator(const LatticeSpec& lattice);

HermitianOperator build_hamiltonian(const LatticeSpec& lattice, const HamiltonianSpec& spec);

}  // namespace frameavg
