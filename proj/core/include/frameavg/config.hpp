#pragma once

// JSON experiment configuration. Unknown keys are rejected.
//
// {
//   "model": {"name": "transverse-field-ising", "couplings": {"J": 1.0, "g": 1.0}},
//   "local_dim": 2,
//   "sizes": [4, 6, 8],
//   "beta": 1.0,
//   "kick": {"site": 0, "generator": "X", "strength": 0.7},
//   "averaging": [{"kind": "uniform-spatial"},
//                 {"kind": "weighted-spatial", "R": 2.0},
//                 {"kind": "temporal", "tau": "inf"}],
//   "seed": 42,
//   "output": "sweep.csv",
//   "record_timing": true,
//   "tolerances": {"work_relative_entropy": 1e-9},
//   "probe": {"time": 1.0, "operator": "X"}
// }

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "frameavg/averaging.hpp"
#include "frameavg/lattice.hpp"
#include "frameavg/thermo.hpp"

namespace frameavg {

struct ProbeSettings {
  double time = 1.0;
  std::string operator_name = "X";
  ComplexMatrix op = pauli::x();
};

struct ExperimentConfig {
  HamiltonianSpec model;
  int local_dim = 2;
  std::vector<int> sizes;
  double beta = 1.0;
  PerturbationSpec kick;
  std::vector<AveragingKind> averaging{UniformSpatial{}};
  std::uint64_t seed = 0;
  std::string output_path;
  // false writes wall_time_s = 0 so repeated runs are byte-identical
  bool record_timing = true;
  std::map<std::string, double> tolerance_overrides;
  ProbeSettings probe;

  /// Default tolerance for a named check, replaced by an override when present.
  double tolerance(const std::string& name) const;
  LatticeSpec lattice(int sites) const { return {sites, local_dim, true}; }
  /// Throws ConfigError / LatticeGuardError.
  void validate() const;
};

/// Named tolerances understood by tolerance() and the "tolerances" config key.
const std::map<std::string, double>& default_tolerances();

/// Throws ConfigError carrying the line (syntax errors) or field path (schema errors).
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "X", "Y", "Z" (spin-1/2 only) or "I".
ComplexMatrix named_local_operator(const std::string& name, int local_dim);

}  // namespace frameavg
