#include "frameavg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace frameavg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError("config field '" + field + "': " + message);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where.empty() ? key : where + "." + key, "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& field) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    fail(field, "expected a number or \"inf\", got \"" + s + "\"");
  }
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

Complex as_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(field, "expected a real number or a [re, im] pair");
}

ComplexMatrix parse_local_matrix(const json& v, int local_dim, const std::string& field) {
  if (v.is_string()) {
    try {
      return named_local_operator(v.get<std::string>(), local_dim);
    } catch (const ConfigError& e) {
      fail(field, e.what());
    }
  }
  if (!v.is_array() || v.empty()) fail(field, "expected an operator name or a square matrix");
  const auto n = static_cast<Index>(v.size());
  ComplexMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) fail(field, "matrix is not square");
    for (Index c = 0; c < n; ++c)
      m(r, c) = as_complex(row[static_cast<std::size_t>(c)],
                           field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

AveragingKind parse_kind(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "expected an object");
  const std::string kind = require(v, "kind", field).get<std::string>();
  if (kind == "uniform-spatial") {
    reject_unknown_keys(v, field, {"kind"});
    return UniformSpatial{};
  }
  if (kind == "weighted-spatial") {
    reject_unknown_keys(v, field, {"kind", "R"});
    const WeightedSpatial w{as_number(require(v, "R", field), field + ".R")};
    if (!std::isfinite(w.range) || w.range <= 0.0) fail(field + ".R", "must be positive and finite");
    return w;
  }
  if (kind == "temporal") {
    reject_unknown_keys(v, field, {"kind", "tau"});
    const auto it = v.find("tau");
    const Temporal t{it == v.end() ? std::numeric_limits<double>::infinity()
                                   : as_number(*it, field + ".tau")};
    if (!(t.tau > 0.0)) fail(field + ".tau", "must be positive (or \"inf\")");
    return t;
  }
  fail(field + ".kind", "unknown averaging kind '" + kind +
                            "' (expected uniform-spatial, weighted-spatial or temporal)");
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"unitary_entropy_invariance", 1e-9},
      {"work_relative_entropy", 1e-9},
      {"entropy_identity", 1e-9},
      {"relative_entropy_nonnegative", 1e-10},
      {"hiai_petz", 1e-9},
      {"bs_eta_equality", 1e-8},
      {"gracefulness", 1e-10},
      {"trace_rho_me", 1e-9},
      {"thermal_translation_invariance", 1e-10},
      {"channel_trace", 1e-12},
      {"channel_positivity", 1e-10},
      {"entropy_monotonicity", 1e-10},
  };
  return table;
}

double ExperimentConfig::tolerance(const std::string& name) const {
  if (const auto it = tolerance_overrides.find(name); it != tolerance_overrides.end())
    return it->second;
  const auto& table = default_tolerances();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown tolerance name '" + name + "'");
  return it->second;
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const ConfigError& e) {
    fail("model", e.what());
  }
  if (sizes.empty()) fail("sizes", "must list at least one lattice size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) fail("sizes", "every N must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) fail("sizes", "must be strictly ascending");
  }
  if (local_dim != 2) fail("local_dim", "the model Hamiltonians need local_dim 2");
  for (int n : sizes) (void)lattice(n).dimension();  // refuses, naming N, above the guard
  if (!std::isfinite(beta) || beta < 0.0) fail("beta", "must be finite and non-negative");
  if (kick.site < 0 || kick.site >= sizes.front())
    fail("kick.site", "must lie in [0, smallest N)");
  if (kick.generator.rows() != local_dim || kick.generator.cols() != local_dim)
    fail("kick.generator", "must be a local_dim x local_dim matrix");
  if (max_norm(kick.generator - kick.generator.adjoint()) > 1e-12 * std::max(1.0, max_norm(kick.generator)))
    fail("kick.generator", "must be Hermitian");
  if (!std::isfinite(kick.strength)) fail("kick.strength", "must be finite");
  if (averaging.empty()) fail("averaging", "must list at least one averaging kind");
  for (const auto& k : averaging) validate_kind(k);
  for (const auto& [name, value] : tolerance_overrides) {
    if (!default_tolerances().contains(name)) fail("tolerances." + name, "unknown tolerance name");
    if (!(value > 0.0)) fail("tolerances." + name, "must be positive");
  }
  if (!std::isfinite(probe.time)) fail("probe.time", "must be finite");
}

ComplexMatrix named_local_operator(const std::string& name, int local_dim) {
  if (name == "I") return ComplexMatrix::Identity(local_dim, local_dim);
  if (local_dim != 2) throw ConfigError("Pauli operator names need local_dim 2");
  if (name == "X") return pauli::x();
  if (name == "Y") return pauli::y();
  if (name == "Z") return pauli::z();
  throw ConfigError("unknown operator name '" + name + "' (expected X, Y, Z or I)");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << line_of_offset(json_text, e.byte) << ": " << e.what();
    throw ConfigError(os.str());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");

  try {
    reject_unknown_keys(doc, "",
                        {"model", "local_dim", "sizes", "beta", "kick", "averaging", "seed",
                         "output", "record_timing", "tolerances", "probe"});
    ExperimentConfig cfg;

    const json& model = require(doc, "model", "");
    if (!model.is_object()) fail("model", "expected an object with name and couplings");
    reject_unknown_keys(model, "model", {"name", "couplings"});
    cfg.model.model = parse_model(require(model, "name", "model").get<std::string>());
    if (const auto it = model.find("couplings"); it != model.end()) {
      if (!it->is_object()) fail("model.couplings", "expected an object");
      for (const auto& [key, value] : it->items())
        cfg.model.couplings[key] = as_number(value, "model.couplings." + key);
    }
    const auto required = HamiltonianSpec::required_couplings(cfg.model.model);
    for (const auto& [key, value] : cfg.model.couplings) {
      (void)value;
      if (std::find(required.begin(), required.end(), key) == required.end())
        fail("model.couplings." + key,
             "unknown coupling for model " + std::string(model_name(cfg.model.model)));
    }

    if (const auto it = doc.find("local_dim"); it != doc.end()) cfg.local_dim = as_int(*it, "local_dim");

    const json& sizes = require(doc, "sizes", "");
    if (!sizes.is_array()) fail("sizes", "expected an array of integers");
    for (std::size_t i = 0; i < sizes.size(); ++i)
      cfg.sizes.push_back(as_int(sizes[i], "sizes[" + std::to_string(i) + "]"));

    cfg.beta = as_number(require(doc, "beta", ""), "beta");

    if (const auto it = doc.find("kick"); it != doc.end()) {
      if (!it->is_object()) fail("kick", "expected an object");
      reject_unknown_keys(*it, "kick", {"site", "generator", "strength"});
      if (const auto s = it->find("site"); s != it->end()) cfg.kick.site = as_int(*s, "kick.site");
      if (const auto g = it->find("generator"); g != it->end())
        cfg.kick.generator = parse_local_matrix(*g, cfg.local_dim, "kick.generator");
      if (const auto s = it->find("strength"); s != it->end())
        cfg.kick.strength = as_number(*s, "kick.strength");
    }

    if (const auto it = doc.find("averaging"); it != doc.end()) {
      if (!it->is_array()) fail("averaging", "expected an array");
      cfg.averaging.clear();
      for (std::size_t i = 0; i < it->size(); ++i)
        cfg.averaging.push_back(parse_kind((*it)[i], "averaging[" + std::to_string(i) + "]"));
    }

    if (const auto it = doc.find("seed"); it != doc.end()) {
      if (!it->is_number_unsigned()) fail("seed", "expected a non-negative integer");
      cfg.seed = it->get<std::uint64_t>();
    }
    if (const auto it = doc.find("output"); it != doc.end()) {
      if (!it->is_string()) fail("output", "expected a path string");
      cfg.output_path = it->get<std::string>();
    }
    if (const auto it = doc.find("record_timing"); it != doc.end()) {
      if (!it->is_boolean()) fail("record_timing", "expected true or false");
      cfg.record_timing = it->get<bool>();
    }
    if (const auto it = doc.find("tolerances"); it != doc.end()) {
      if (!it->is_object()) fail("tolerances", "expected an object");
      for (const auto& [key, value] : it->items())
        cfg.tolerance_overrides[key] = as_number(value, "tolerances." + key);
    }
    if (const auto it = doc.find("probe"); it != doc.end()) {
      if (!it->is_object()) fail("probe", "expected an object");
      reject_unknown_keys(*it, "probe", {"time", "operator"});
      if (const auto t = it->find("time"); t != it->end()) cfg.probe.time = as_number(*t, "probe.time");
      if (const auto o = it->find("operator"); o != it->end()) {
        if (!o->is_string()) fail("probe.operator", "expected X, Y, Z or I");
        cfg.probe.operator_name = o->get<std::string>();
        try {
          cfg.probe.op = named_local_operator(cfg.probe.operator_name, cfg.local_dim);
        } catch (const ConfigError& e) {
          fail("probe.operator", e.what());
        }
      }
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace frameavg
