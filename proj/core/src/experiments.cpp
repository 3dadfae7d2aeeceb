#include "frameavg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "frameavg/averaging.hpp"

namespace frameavg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int kind_order(const AveragingKind& kind) { return static_cast<int>(kind.index()); }

// Everything shared by the records of one lattice size.
struct SizeContext {
  LatticeSpec lattice;
  UnitaryOperator translation;
  CyclicBlocks sym;
  ThermalState state;
  UnitaryOperator kick;
  DensityMatrix rho_prime;
  ComplexMatrix rho_prime_energy;  // energy eigenbasis
  ComplexMatrix e_energy;          // E = rho^{-1/2} rho' rho^{-1/2}, energy eigenbasis
  double s_rho;
  double s_rho_prime;
  double work;
  EntropyValue rel_ent_prime;
};

SizeContext prepare(const ExperimentConfig& cfg, int n) {
  const LatticeSpec lattice = cfg.lattice(n);
  UnitaryOperator t = translation_operator(lattice);
  CyclicBlocks sym(t, n);
  ThermalState state = thermal_state(build_hamiltonian(lattice, cfg.model), cfg.beta, &sym);
  UnitaryOperator u = local_kick(lattice, cfg.kick);
  DensityMatrix rho_prime = perturb(state, u);
  const double s_rho = entropy_of_spectrum(state.populations());
  const double s_rho_prime = von_neumann_entropy(rho_prime).nats;
  const double w = work(state.hamiltonian(), state.rho(), rho_prime);
  const EntropyValue rel = relative_entropy(rho_prime, s_rho_prime, state);
  ComplexMatrix rho_prime_energy = energy_basis_perturbed(state, u);
  ComplexMatrix e_energy = energy_basis_E(state, rho_prime_energy);
  return SizeContext{lattice,      std::move(t),         std::move(sym),
                     std::move(state), std::move(u),     std::move(rho_prime),
                     std::move(rho_prime_energy), std::move(e_energy), s_rho,
                     s_rho_prime,  w,                    rel};
}

ExperimentRecord evaluate_kind(const ExperimentConfig& cfg, const SizeContext& ctx,
                               const AveragingKind& kind) {
  const int n = ctx.lattice.sites;
  const AveragingChannel channel =
      AveragingChannel::make(kind, ctx.translation, n, ctx.state.hamiltonian_decomp());

  ExperimentRecord r;
  r.model = std::string(model_name(cfg.model.model));
  r.n = n;
  r.beta = cfg.beta;
  r.kick_site = cfg.kick.site;
  r.kick_strength = cfg.kick.strength;
  r.avg_kind = kind_name(kind);
  r.avg_param = kind_parameter(kind);
  r.kind_order = kind_order(kind);
  r.s_rho = ctx.s_rho;
  r.s_rho_prime = ctx.s_rho_prime;
  r.rel_ent_prime = ctx.rel_ent_prime;
  r.work = ctx.work;
  r.beta_w = thermo_entropy_production(cfg.beta, ctx.work);
  r.entropy_density = ctx.s_rho / n;

  const auto blocks = channel.energy_basis_blocks(ctx.state);
  {
    const DensityMatrix averaged = channel.apply(ctx.rho_prime);
    r.s_m_rho_prime = von_neumann_entropy(averaged, &ctx.sym).nats;
    r.rel_ent_avg = relative_entropy(averaged, r.s_m_rho_prime, ctx.state);
  }
  r.bs_rel_ent_avg = bs_relative_entropy_energy_basis(
      channel.apply_in_energy_basis(ctx.rho_prime_energy, ctx.state), ctx.state, blocks);
  const ComplexMatrix averaged_e = channel.apply_in_energy_basis(ctx.e_energy, ctx.state);
  const AveragedEDiagnostics diag = averaged_E_diagnostics(ctx.state, averaged_e, blocks);
  r.me_deviation = diag.op_deviation;
  r.me_frobenius_deviation = diag.frobenius_deviation;
  r.me_weighted_deviation = diag.weighted_deviation;
  r.trace_rho_me = diag.trace_rho_me;
  r.bs_eta_residual =
      std::abs(r.bs_rel_ent_avg.nats - minus_trace_rho_eta(ctx.state, averaged_e, blocks));
  return r;
}

template <class Fn>
void run_parallel(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

CheckResult check_at_most(std::string name, double residual, double tolerance) {
  return {std::move(name), residual, tolerance, residual <= tolerance};
}

}  // namespace

bool record_less(const ExperimentRecord& a, const ExperimentRecord& b) {
  return std::tie(a.n, a.kind_order, a.avg_param) < std::tie(b.n, b.kind_order, b.avg_param);
}

void check_record_invariants(const ExperimentRecord& r, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "record N=" << r.n << " " << r.avg_kind << "(" << r.avg_param << "): ";
  const auto require = [&](bool ok, const std::string& what, double residual) {
    if (!ok) {
      os << what << " residual " << residual;
      throw InvariantError(os.str(), residual);
    }
  };
  const double invariance = std::abs(r.s_rho_prime - r.s_rho);
  require(invariance <= cfg.tolerance("unitary_entropy_invariance"), "|S(rho') - S(rho)|",
          invariance);
  require(r.rel_ent_prime.is_finite(), "S(rho'|rho) infinite", 0.0);
  const double work_gap = std::abs(r.beta_w - r.rel_ent_prime.nats);
  require(work_gap <= cfg.tolerance("work_relative_entropy"), "|beta W - S(rho'|rho)|", work_gap);
  require(r.rel_ent_avg.is_finite(), "S(M rho'|rho) infinite", 0.0);
  require(r.rel_ent_avg.nats >= -cfg.tolerance("relative_entropy_nonnegative"),
          "S(M rho'|rho) negative", r.rel_ent_avg.nats);
  const double identity =
      std::abs(r.rel_ent_avg.nats - (-r.s_m_rho_prime + r.s_rho_prime + r.rel_ent_prime.nats));
  require(identity <= cfg.tolerance("entropy_identity"), "entropy identity", identity);
}

std::vector<ExperimentRecord> evaluate_size(const ExperimentConfig& cfg, int n) {
  const auto start = Clock::now();
  const SizeContext ctx = prepare(cfg, n);
  const double setup = seconds_since(start);

  std::vector<ExperimentRecord> out;
  for (const auto& kind : cfg.averaging) {
    const auto kind_start = Clock::now();
    ExperimentRecord r = evaluate_kind(cfg, ctx, kind);
    r.wall_time_seconds =
        cfg.record_timing ? setup / static_cast<double>(cfg.averaging.size()) + seconds_since(kind_start)
                          : 0.0;
    check_record_invariants(r, cfg);
    out.push_back(std::move(r));
  }
  return out;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerificationReport verify_identities(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.sizes.front();
  const SizeContext ctx = prepare(cfg, n);
  VerificationReport report;
  report.n = n;
  auto& checks = report.checks;

  checks.push_back(check_at_most(
      "thermal_translation_invariance",
      max_norm(conjugate(ctx.translation, ctx.state.rho().matrix()) - ctx.state.rho().matrix()),
      cfg.tolerance("thermal_translation_invariance")));
  checks.push_back(check_at_most("unitary_entropy_invariance",
                                 std::abs(ctx.s_rho_prime - ctx.s_rho),
                                 cfg.tolerance("unitary_entropy_invariance")));
  const double beta_w = thermo_entropy_production(cfg.beta, ctx.work);
  checks.push_back(check_at_most("work_relative_entropy",
                                 std::abs(beta_w - ctx.rel_ent_prime.nats),
                                 cfg.tolerance("work_relative_entropy")));

  const ComplexMatrix& h = ctx.state.hamiltonian().matrix();
  const Index dim = ctx.state.dim();
  for (std::size_t i = 0; i < cfg.averaging.size(); ++i) {
    const auto& kind = cfg.averaging[i];
    const std::string tag = "[" + kind_name(kind) + "(" + std::to_string(kind_parameter(kind)) + ")]";
    const ExperimentRecord r = evaluate_kind(cfg, ctx, kind);
    const AveragingChannel channel =
        AveragingChannel::make(kind, ctx.translation, n, ctx.state.hamiltonian_decomp());

    checks.push_back(check_at_most(
        "entropy_identity" + tag,
        std::abs(r.rel_ent_avg.nats - (-r.s_m_rho_prime + r.s_rho_prime + r.rel_ent_prime.nats)),
        cfg.tolerance("entropy_identity")));
    checks.push_back(check_at_most("relative_entropy_nonnegative" + tag,
                                   std::max(0.0, -r.rel_ent_avg.nats),
                                   cfg.tolerance("relative_entropy_nonnegative")));
    checks.push_back(check_at_most("hiai_petz" + tag,
                                   std::max(0.0, r.rel_ent_avg.nats - r.bs_rel_ent_avg.nats),
                                   cfg.tolerance("hiai_petz")));
    checks.push_back(
        check_at_most("bs_eta_equality" + tag, r.bs_eta_residual, cfg.tolerance("bs_eta_equality")));
    checks.push_back(check_at_most("trace_rho_me" + tag, std::abs(r.trace_rho_me - 1.0),
                                   cfg.tolerance("trace_rho_me")));

    // Channel properties on a seeded random state of the lattice dimension.
    const DensityMatrix probe = random_density_matrix(dim, cfg.seed + 1000 * i + 1);
    const ComplexMatrix mapped = channel.apply(probe.matrix());
    const ComplexMatrix lhs = channel.apply(ComplexMatrix(commutator(h, probe.matrix())));
    const ComplexMatrix rhs = commutator(h, mapped);
    checks.push_back(
        check_at_most("gracefulness" + tag, max_norm(lhs - rhs), cfg.tolerance("gracefulness")));
    checks.push_back(check_at_most("channel_trace" + tag,
                                   std::abs(mapped.trace().real() - 1.0),
                                   cfg.tolerance("channel_trace")));
    const HermitianOperator mapped_h(mapped);
    const RealVector spectrum = eigenvalues(mapped_h);
    checks.push_back(check_at_most("channel_positivity" + tag, std::max(0.0, -spectrum(0)),
                                   cfg.tolerance("channel_positivity")));
    checks.push_back(check_at_most(
        "entropy_monotonicity" + tag,
        std::max(0.0, von_neumann_entropy(probe).nats - entropy_of_spectrum(spectrum)),
        cfg.tolerance("entropy_monotonicity")));
  }

  // Hiai-Petz on seeded random full-rank pairs.
  const Index pair_dim = std::min<Index>(dim, 16);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto seed = cfg.seed + 7919u * static_cast<std::uint64_t>(k);
    const DensityMatrix sigma = random_density_matrix(pair_dim, seed + 1);
    const DensityMatrix rho = random_density_matrix(pair_dim, seed + 2);
    const EntropyValue s = relative_entropy(sigma, rho);
    const EntropyValue sbs = bs_relative_entropy(sigma, rho);
    if (s.is_finite() && sbs.is_finite()) worst = std::max(worst, s.nats - sbs.nats);
  }
  checks.push_back(check_at_most("hiai_petz[random pairs]", std::max(0.0, worst),
                                 cfg.tolerance("hiai_petz")));
  return report;
}

std::vector<ExperimentRecord> convergence_sweep(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  std::vector<std::vector<ExperimentRecord>> per_size(cfg.sizes.size());
  run_parallel(cfg.sizes.size(), jobs,
               [&](std::size_t i) { per_size[i] = evaluate_size(cfg, cfg.sizes[i]); });
  std::vector<ExperimentRecord> out;
  for (auto& block : per_size)
    for (auto& r : block) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), record_less);
  return out;
}

std::vector<ExperimentRecord> saturation_scan(const ExperimentConfig& cfg, int jobs) {
  double previous = 0.0;
  bool any_weighted = false;
  bool has_uniform = false;
  for (const auto& kind : cfg.averaging) {
    if (std::holds_alternative<UniformSpatial>(kind)) has_uniform = true;
    if (const auto* w = std::get_if<WeightedSpatial>(&kind)) {
      if (any_weighted && w->range <= previous)
        throw ConfigError("saturation scan: weighted-spatial R values must be ascending");
      previous = w->range;
      any_weighted = true;
    }
  }
  if (!any_weighted) throw ConfigError("saturation scan needs weighted-spatial entries");
  ExperimentConfig scan = cfg;
  if (!has_uniform) scan.averaging.insert(scan.averaging.begin(), UniformSpatial{});
  return convergence_sweep(scan, jobs);
}

std::vector<SaturationSummary> summarize_saturation(const std::vector<ExperimentRecord>& records) {
  std::vector<SaturationSummary> out;
  std::vector<ExperimentRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), record_less);
  for (std::size_t i = 0; i < sorted.size();) {
    const int n = sorted[i].n;
    std::size_t j = i;
    double uniform_gain = std::nan("");
    std::vector<const ExperimentRecord*> weighted;
    for (; j < sorted.size() && sorted[j].n == n; ++j) {
      if (sorted[j].avg_kind == "uniform-spatial") uniform_gain = sorted[j].entropy_gain();
      if (sorted[j].avg_kind == "weighted-spatial") weighted.push_back(&sorted[j]);
    }
    if (!weighted.empty()) {
      SaturationSummary s{};
      s.n = n;
      s.final_range = weighted.back()->avg_param;
      s.final_gain = weighted.back()->entropy_gain();
      s.uniform_gain = uniform_gain;
      s.within_two_percent = std::abs(s.final_gain - uniform_gain) <= 0.02 * std::abs(uniform_gain);
      s.non_decreasing = true;
      for (std::size_t k = 1; k < weighted.size(); ++k)
        if (weighted[k]->entropy_gain() < weighted[k - 1]->entropy_gain() - 1e-12)
          s.non_decreasing = false;
      out.push_back(s);
    }
    i = j;
  }
  return out;
}

std::vector<ProbeRow> locality_probe(const ExperimentConfig& cfg, double time) {
  cfg.validate();
  if (cfg.sizes.size() != 1) throw ConfigError("locality probe needs exactly one lattice size");
  const int n = cfg.sizes.front();
  const LatticeSpec lattice = cfg.lattice(n);
  const ThermalState state = thermal_state(build_hamiltonian(lattice, cfg.model), cfg.beta);
  const UnitaryOperator u = local_kick(lattice, cfg.kick);
  const ConjugatedPerturbation cp = conjugated_perturbation(state, u);
  const SpectralDecomposition& dh = state.hamiltonian_decomp();
  const RealVector& e = dh.eigenvalues();

  std::vector<ProbeRow> rows;
  for (int j = 0; j < n; ++j) {
    ComplexMatrix a = embed_site_operator(lattice, {j, cfg.probe.op});
    if (time != 0.0) {
      // A(t) = exp(iHt) A exp(-iHt)
      ComplexMatrix m = dh.to_eigenbasis(a);
      for (Index c = 0; c < m.cols(); ++c)
        for (Index r = 0; r < m.rows(); ++r) m(r, c) *= std::exp(Complex(0.0, (e(r) - e(c)) * time));
      a = dh.from_eigenbasis(m);
    }
    const int gap = std::abs(j - cfg.kick.site);
    rows.push_back({j, std::min(gap, n - gap), operator_norm(commutator(cp.u, a)),
                    operator_norm(commutator(u.matrix(), a))});
  }
  return rows;
}

}  // namespace frameavg
