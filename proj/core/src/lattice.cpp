#include "frameavg/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace frameavg {

Index max_hilbert_dim() {
  Index guard = kMaxHilbertDim;
  if (const char* env = std::getenv("FRAMEAVG_MAX_DIM")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0 && v < guard) guard = static_cast<Index>(v);
  }
  return guard;
}

Index LatticeSpec::dimension() const {
  validate();
  const Index guard = max_hilbert_dim();
  Index dim = 1;
  for (int k = 0; k < sites; ++k) {
    dim *= local_dim;
    if (dim > guard) {
      std::ostringstream os;
      os << "lattice guard: N=" << sites << " with local_dim=" << local_dim
         << " exceeds the maximum Hilbert-space dimension " << guard;
      throw LatticeGuardError(os.str(), sites);
    }
  }
  return dim;
}

void LatticeSpec::validate() const {
  if (sites < 2) throw DimensionError("LatticeSpec: need at least 2 sites");
  if (local_dim < 1) throw DimensionError("LatticeSpec: local_dim must be positive");
  if (!periodic) throw DimensionError("LatticeSpec: only periodic chains are supported");
}

std::string_view model_name(Model m) {
  switch (m) {
    case Model::kFreeSpins: return "free-spins";
    case Model::kTransverseFieldIsing: return "transverse-field-ising";
    case Model::kHeisenbergXXZ: return "heisenberg-xxz";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::kFreeSpins, Model::kTransverseFieldIsing, Model::kHeisenbergXXZ})
    if (model_name(m) == name) return m;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected free-spins, transverse-field-ising or heisenberg-xxz)");
}

std::vector<std::string> HamiltonianSpec::required_couplings(Model m) {
  switch (m) {
    case Model::kFreeSpins: return {"h"};
    case Model::kTransverseFieldIsing: return {"J", "g"};
    case Model::kHeisenbergXXZ: return {"J", "Delta"};
  }
  return {};
}

double HamiltonianSpec::coupling(const std::string& name) const {
  const auto it = couplings.find(name);
  if (it == couplings.end())
    throw ConfigError("model " + std::string(model_name(model)) + " is missing coupling '" +
                      name + "'");
  if (!std::isfinite(it->second))
    throw ConfigError("coupling '" + name + "' is not finite");
  return it->second;
}

void HamiltonianSpec::validate() const {
  for (const auto& name : required_couplings(model)) coupling(name);
}

namespace pauli {
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

ComplexMatrix embed_product(const LatticeSpec& lattice, const std::vector<SiteOperator>& ops) {
  const Index dim = lattice.dimension();
  const int d = lattice.local_dim;
  std::set<int> seen;
  for (const auto& op : ops) {
    if (op.site < 0 || op.site >= lattice.sites) {
      std::ostringstream os;
      os << "site " << op.site << " out of range [0, " << lattice.sites << ")";
      throw DimensionError(os.str());
    }
    if (op.local.rows() != d || op.local.cols() != d) {
      std::ostringstream os;
      os << "local operator is " << op.local.rows() << "x" << op.local.cols()
         << ", lattice local_dim is " << d;
      throw DimensionError(os.str());
    }
    if (!seen.insert(op.site).second) throw DimensionError("embed_product: repeated site");
  }

  std::vector<Index> stride(ops.size());
  for (std::size_t k = 0; k < ops.size(); ++k) {
    Index s = 1;
    for (int j = ops[k].site + 1; j < lattice.sites; ++j) s *= d;
    stride[k] = s;
  }
  Index combos = 1;
  for (std::size_t k = 0; k < ops.size(); ++k) combos *= d;

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  std::vector<int> col_digit(ops.size());
  for (Index c = 0; c < dim; ++c) {
    for (std::size_t k = 0; k < ops.size(); ++k)
      col_digit[k] = static_cast<int>((c / stride[k]) % d);
    for (Index combo = 0; combo < combos; ++combo) {
      Index row = c;
      Complex value(1.0, 0.0);
      Index rest = combo;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const int r = static_cast<int>(rest % d);
        rest /= d;
        value *= ops[k].local(r, col_digit[k]);
        row += (r - col_digit[k]) * stride[k];
      }
      if (value != Complex(0.0, 0.0)) out(row, c) += value;
    }
  }
  return out;
}

ComplexMatrix embed_site_operator(const LatticeSpec& lattice, const SiteOperator& op) {
  return embed_product(lattice, {op});
}

UnitaryOperator translation_operator(const LatticeSpec& lattice) {
  const Index dim = lattice.dimension();
  const Index d = lattice.local_dim;
  const Index top = dim / d;  // d^{N-1}
  ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    // last digit s_{N-1} moves to the most significant position
    const Index last = c % d;
    const Index row = last * top + c / d;
    t(row, c) = 1.0;
  }
  return UnitaryOperator(std::move(t));
}

namespace {

std::vector<std::pair<int, int>> periodic_bonds(int sites) {
  std::vector<std::pair<int, int>> bonds;
  if (sites == 2) return {{0, 1}};
  for (int i = 0; i < sites; ++i) bonds.emplace_back(i, (i + 1) % sites);
  return bonds;
}

}  // namespace

HermitianOperator build_hamiltonian(const LatticeSpec& lattice, const HamiltonianSpec& spec) {
  spec.validate();
  const Index dim = lattice.dimension();
  if (lattice.local_dim != 2)
    throw DimensionError("model Hamiltonians are defined for spin-1/2 chains (local_dim 2)");
  const int n = lattice.sites;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);

  switch (spec.model) {
    case Model::kFreeSpins: {
      const double field = spec.coupling("h");
      for (int i = 0; i < n; ++i) h += field * embed_site_operator(lattice, {i, pauli::z()});
      break;
    }
    case Model::kTransverseFieldIsing: {
      const double j = spec.coupling("J");
      const double g = spec.coupling("g");
      for (auto [a, b] : periodic_bonds(n))
        h -= j * embed_product(lattice, {{a, pauli::z()}, {b, pauli::z()}});
      for (int i = 0; i < n; ++i) h -= g * embed_site_operator(lattice, {i, pauli::x()});
      break;
    }
    case Model::kHeisenbergXXZ: {
      const double j = spec.coupling("J");
      const double delta = spec.coupling("Delta");
      for (auto [a, b] : periodic_bonds(n)) {
        h += j * embed_product(lattice, {{a, pauli::x()}, {b, pauli::x()}});
        h += j * embed_product(lattice, {{a, pauli::y()}, {b, pauli::y()}});
        h += (j * delta) * embed_product(lattice, {{a, pauli::z()}, {b, pauli::z()}});
      }
      break;
    }
  }
  return HermitianOperator(std::move(h));
}

}  // namespace frameavg
