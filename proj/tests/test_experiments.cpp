#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frameavg/config.hpp"
#include "frameavg/csv.hpp"
#include "frameavg/experiments.hpp"

using namespace frameavg;

namespace {

constexpr const char* kFreeSpins4 = R"({
  "model": {"name": "free-spins", "couplings": {"h": 1.0}},
  "sizes": [4],
  "beta": 1.0,
  "kick": {"site": 0, "generator": "X", "strength": 0.7},
  "averaging": [{"kind": "uniform-spatial"},
                {"kind": "weighted-spatial", "R": 1.0},
                {"kind": "temporal", "tau": "inf"}],
  "seed": 42,
  "record_timing": false
})";

ExperimentConfig free_spins(std::vector<int> sizes, double beta = 1.0, double strength = 0.7) {
  ExperimentConfig cfg;
  cfg.model = {Model::kFreeSpins, {{"h", 1.0}}};
  cfg.sizes = std::move(sizes);
  cfg.beta = beta;
  cfg.kick = {0, pauli::x(), strength};
  cfg.averaging = {UniformSpatial{}};
  cfg.record_timing = false;
  return cfg;
}

std::string config_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config(kFreeSpins4);
  CHECK(cfg.model.model == Model::kFreeSpins);
  CHECK(cfg.sizes == std::vector<int>{4});
  CHECK(cfg.averaging.size() == 3);
  CHECK(std::get<WeightedSpatial>(cfg.averaging[1]).range == 1.0);
  CHECK(std::isinf(std::get<Temporal>(cfg.averaging[2]).tau));
  CHECK(cfg.seed == 42);
  CHECK_FALSE(cfg.record_timing);
  CHECK(cfg.tolerance("work_relative_entropy") == 1e-9);

  for (const char* name : {"free_spins_verify.json", "free_spins_sweep.json", "tfim_saturation.json",
                           "tfim_probe.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::filesystem::path(FRAMEAVG_CONFIG_DIR) / name));
  }
}

TEST_CASE("config errors name the field") {
  CHECK(config_error(R"({"model": {"name": "free-spins", "couplings": {"h": 1}}, "sizes": [4], "beta": 1, "bta": 2})")
            .find("bta") != std::string::npos);
  CHECK(config_error(R"({"model": {"name": "free-spins", "couplings": {"h": 1}}, "sizes": [4], "beta": 1,
                          "kick": {"site": 0, "strenght": 1}})")
            .find("kick.strenght") != std::string::npos);
  CHECK(config_error(R"({"model": {"name": "transverse-field-ising", "couplings": {"J": 1}}, "sizes": [4], "beta": 1})")
            .find("'g'") != std::string::npos);
  CHECK(config_error(R"({"model": {"name": "free-spins", "couplings": {"h": 1}}, "sizes": [4], "beta": -1})")
            .find("beta") != std::string::npos);
  CHECK(config_error(R"({"model": {"name": "free-spins", "couplings": {"h": 1}}, "sizes": [4], "beta": 1,
                          "averaging": [{"kind": "weighted-spatial", "R": 0}]})")
            .find("averaging[0]") != std::string::npos);
  CHECK(config_error("{\n  \"sizes\": [4,\n}").find("line 3") != std::string::npos);
  CHECK(config_error(R"({"model": {"name": "free-spins", "couplings": {"h": 1}}, "sizes": [4], "beta": 1,
                          "tolerances": {"no_such_check": 1e-3}})")
            .find("no_such_check") != std::string::npos);
}

TEST_CASE("lattice guard refuses large chains") {
  try {
    free_spins({4, 15}).validate();
    FAIL("expected LatticeGuardError");
  } catch (const LatticeGuardError& e) {
    CHECK(e.sites() == 15);
    CHECK(std::string(e.what()).find("15") != std::string::npos);
  }
}

TEST_CASE("identity verification") {
  const VerificationReport report = verify_identities(parse_config(kFreeSpins4));
  CHECK(report.n == 4);
  CHECK(report.passed());
  for (const auto& c : report.checks) {
    CAPTURE(c.name);
    CHECK(c.residual < 1e-9);
  }

  ExperimentConfig tampered = parse_config(kFreeSpins4);
  tampered.tolerance_overrides["work_relative_entropy"] = 1e-18;
  tampered.tolerance_overrides["entropy_identity"] = 1e-18;
  CHECK_FALSE(verify_identities(tampered).passed());
}

TEST_CASE("zero kick produces no entropy") {
  ExperimentConfig cfg = parse_config(kFreeSpins4);
  cfg.kick.strength = 0.0;
  for (const auto& r : evaluate_size(cfg, 4)) {
    CHECK(std::abs(r.beta_w) < 1e-12);
    CHECK(std::abs(r.rel_ent_prime.nats) < 1e-12);
    CHECK(std::abs(r.rel_ent_avg.nats) < 1e-12);
    CHECK(std::abs(r.bs_rel_ent_avg.nats) < 1e-12);
    CHECK(r.me_deviation < 1e-12);
  }
}

TEST_CASE("infinite temperature produces no entropy") {
  const auto records = convergence_sweep(free_spins({4, 6}, 0.0));
  for (const auto& r : records) {
    CHECK(std::abs(r.beta_w) < 1e-12);
    CHECK(std::abs(r.rel_ent_avg.nats) < 1e-12);
    CHECK(r.me_deviation < 1e-12);
  }
}

TEST_CASE("free-spin sweep trends") {
  const auto records = convergence_sweep(free_spins({4, 6, 8, 10}), 2);
  REQUIRE(records.size() == 4);
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].n > records[i - 1].n);
    CHECK(records[i].rel_ent_avg.nats < records[i - 1].rel_ent_avg.nats);
    CHECK(std::abs(records[i].entropy_density - records[0].entropy_density) < 1e-9);
  }
  for (const auto& r : records) {
    CHECK(std::abs(r.trace_rho_me - 1.0) < 1e-9);
    CHECK(std::abs(r.beta_w - 0.632148173218443) < 1e-12);
  }
}

TEST_CASE("weighted average limits in a sweep") {
  ExperimentConfig cfg = free_spins({4});
  cfg.model = {Model::kTransverseFieldIsing, {{"J", 1.0}, {"g", 1.0}}};
  cfg.averaging = {UniformSpatial{}, WeightedSpatial{1e-6}, WeightedSpatial{1e6}};
  const auto rows = convergence_sweep(cfg);
  REQUIRE(rows.size() == 3);
  const auto& uniform = rows[0];
  const auto& sharp = rows[1];
  const auto& flat = rows[2];
  CHECK(sharp.entropy_gain() <= 1e-9);
  CHECK(std::abs(flat.s_m_rho_prime - uniform.s_m_rho_prime) < 1e-9);
  CHECK(std::abs(flat.rel_ent_avg.nats - uniform.rel_ent_avg.nats) < 1e-9);
  CHECK(std::abs(flat.bs_rel_ent_avg.nats - uniform.bs_rel_ent_avg.nats) < 1e-9);
}

TEST_CASE("saturation scan on the Ising chain" * doctest::timeout(60)) {
  const ExperimentConfig cfg = load_config(std::filesystem::path(FRAMEAVG_CONFIG_DIR) / "tfim_saturation.json");
  const auto rows = saturation_scan(cfg);
  REQUIRE(rows.size() == 6);
  CHECK(rows.front().avg_kind == "uniform-spatial");
  const auto summary = summarize_saturation(rows);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].non_decreasing);
  CHECK(summary[0].final_range == 8.0);

  ExperimentConfig descending = cfg;
  descending.averaging = {WeightedSpatial{2.0}, WeightedSpatial{1.0}};
  CHECK_THROWS_AS(saturation_scan(descending), ConfigError);
}

TEST_CASE("csv output") {
  SUBCASE("header only") {
    const std::string text = format_csv({});
    CHECK(text == std::string(kRecordHeader) + "\n");
    CHECK(count_fields(std::string(kRecordHeader)) == 17);
  }
  SUBCASE("one record") {
    const auto rows = evaluate_size(free_spins({4}), 4);
    const std::string text = format_csv(rows);
    std::istringstream in(text);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      CHECK(count_fields(line) == 17);
      ++lines;
    }
    CHECK(lines == 2);
  }
  SUBCASE("round trip") {
    const auto rows = convergence_sweep(parse_config(kFreeSpins4));
    const auto parsed = parse_csv(format_csv(rows));
    REQUIRE(parsed.size() == rows.size());
    const auto close = [](double a, double b) {
      return a == b || std::abs(a - b) <= 1e-11 * std::max(std::abs(a), std::abs(b));
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(parsed[i].model == rows[i].model);
      CHECK(parsed[i].n == rows[i].n);
      CHECK(parsed[i].avg_kind == rows[i].avg_kind);
      CHECK(close(parsed[i].avg_param, rows[i].avg_param));
      CHECK(close(parsed[i].s_m_rho_prime, rows[i].s_m_rho_prime));
      CHECK(close(parsed[i].rel_ent_avg.nats, rows[i].rel_ent_avg.nats));
      CHECK(close(parsed[i].bs_rel_ent_avg.nats, rows[i].bs_rel_ent_avg.nats));
      CHECK(close(parsed[i].me_deviation, rows[i].me_deviation));
      CHECK(close(parsed[i].beta_w, rows[i].beta_w));
    }
    CHECK(format_csv(parsed) == format_csv(rows));
  }
  SUBCASE("infinite relative entropy renders as inf") {
    ExperimentRecord r = evaluate_size(free_spins({4}), 4).front();
    r.rel_ent_avg = EntropyValue::infinite();
    const auto parsed = parse_csv(format_csv({r}));
    CHECK_FALSE(parsed.front().rel_ent_avg.is_finite());
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(parse_csv("a,b\n"), Error);
    CHECK_THROWS_AS(parse_csv(std::string(kRecordHeader) + "\nfree-spins,4\n"), Error);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(emit_csv({}, "/nonexistent-dir/out.csv"), Error);
  }
}

TEST_CASE("sweeps are deterministic") {
  ExperimentConfig cfg = parse_config(kFreeSpins4);
  cfg.sizes = {4, 6};
  const std::string serial = format_csv(convergence_sweep(cfg, 1));
  CHECK(format_csv(convergence_sweep(cfg, 1)) == serial);
  CHECK(format_csv(convergence_sweep(cfg, 2)) == serial);

  const auto path = std::filesystem::temp_directory_path() / "frameavg_determinism.csv";
  emit_csv(convergence_sweep(cfg, 2), path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream bytes;
  bytes << in.rdbuf();
  CHECK(bytes.str() == serial);
  std::filesystem::remove(path);
}

TEST_CASE("locality probe") {
  ExperimentConfig cfg = load_config(std::filesystem::path(FRAMEAVG_CONFIG_DIR) / "tfim_probe.json");
  cfg.sizes = {6};
  cfg.probe.op = pauli::z();

  SUBCASE("t = 0") {
    const auto rows = locality_probe(cfg, 0.0);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
      if (r.site == 0) {
        CHECK(r.comm_u == doctest::Approx(2.0 * std::sin(0.7)).epsilon(1e-12));
        CHECK(r.comm_u == doctest::Approx(1.2884353744753821).epsilon(1e-12));
      } else {
        CHECK(r.comm_u <= 1e-12);
      }
    }
    CHECK(rows[3].distance == 3);
    CHECK(rows[5].distance == 1);
  }
  SUBCASE("interacting chain spreads the commutator") {
    const auto rows = locality_probe(cfg, 1.0);
    CHECK(rows[1].comm_u > 1e-3);
    CHECK(rows[1].comm_u > rows[3].comm_u);
  }
  SUBCASE("free spins never propagate") {
    cfg.model = {Model::kFreeSpins, {{"h", 1.0}}};
    cfg.probe.op = pauli::x();
    for (double t : {0.0, 0.5, 3.0}) {
      for (const auto& r : locality_probe(cfg, t)) {
        if (r.site == 0) continue;
        CHECK(r.comm_u <= 1e-12);
        CHECK(r.comm_u_beta <= 1e-12);
      }
    }
  }
  SUBCASE("needs a single size") {
    cfg.sizes = {4, 6};
    CHECK_THROWS_AS(locality_probe(cfg, 0.0), ConfigError);
  }
}

TEST_CASE("record invariants reject a corrupted row") {
  const ExperimentConfig cfg = free_spins({4});
  ExperimentRecord r = evaluate_size(cfg, 4).front();
  CHECK_NOTHROW(check_record_invariants(r, cfg));
  r.s_m_rho_prime += 1e-6;
  CHECK_THROWS_AS(check_record_invariants(r, cfg), InvariantError);
}
