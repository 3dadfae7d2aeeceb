#pragma once

// Identity verification, convergence sweeps, R-saturation scans and the
// light-cone probe. Every routine is deterministic for a fixed config; the
// `jobs` argument only changes scheduling, never the returned records.

#include <string>
#include <vector>

#include "frameavg/config.hpp"
#include "frameavg/entropy.hpp"

namespace frameavg {

struct ExperimentRecord {
  std::string model;
  int n = 0;
  double beta = 0.0;
  int kick_site = 0;
  double kick_strength = 0.0;
  std::string avg_kind;
  double avg_param = 0.0;
  double s_rho = 0.0;
  double s_rho_prime = 0.0;
  double s_m_rho_prime = 0.0;
  EntropyValue rel_ent_prime;  // S(rho'|rho)
  EntropyValue rel_ent_avg;    // S(M rho'|rho)
  EntropyValue bs_rel_ent_avg;
  double beta_w = 0.0;
  double me_deviation = 0.0;   // ||M E - 1||_op
  double entropy_density = 0.0;
  double wall_time_seconds = 0.0;

  // Diagnostics kept in memory but not written to CSV.
  int kind_order = 0;
  double work = 0.0;
  double me_frobenius_deviation = 0.0;
  double me_weighted_deviation = 0.0;
  double trace_rho_me = 1.0;
  double bs_eta_residual = 0.0;  // |S_BS(M rho'|rho) + tr[rho eta(M E)]|

  double entropy_gain() const { return s_m_rho_prime - s_rho_prime; }
};

/// Sort key (N, kind, parameter).
bool record_less(const ExperimentRecord& a, const ExperimentRecord& b);

/// Throws InvariantError when a row breaks the per-row identities.
void check_record_invariants(const ExperimentRecord& r, const ExperimentConfig& cfg);

/// All records for one lattice size, one per configured averaging kind.
std::vector<ExperimentRecord> evaluate_size(const ExperimentConfig& cfg, int n);

struct CheckResult {
  std::string name;
  double residual;
  double tolerance;
  bool passed;
};

struct VerificationReport {
  int n = 0;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Finite-size exact identities at the smallest configured N.
VerificationReport verify_identities(const ExperimentConfig& cfg);

std::vector<ExperimentRecord> convergence_sweep(const ExperimentConfig& cfg, int jobs = 1);

/// Requires weighted-spatial entries with ascending R; a uniform-spatial
/// reference row is added when absent.
std::vector<ExperimentRecord> saturation_scan(const ExperimentConfig& cfg, int jobs = 1);

struct SaturationSummary {
  int n;
  double final_range;
  double final_gain;
  double uniform_gain;
  bool within_two_percent;
  bool non_decreasing;
};

std::vector<SaturationSummary> summarize_saturation(const std::vector<ExperimentRecord>& records);

struct ProbeRow {
  int site;
  int distance;            // cyclic distance from the kicked site
  double comm_u_beta;      // ||[u_beta, A_j(t)]||_op
  double comm_u;           // ||[U, A_j(t)]||_op
};

/// Requires exactly one configured N.
std::vector<ProbeRow> locality_probe(const ExperimentConfig& cfg, double time);

}  // namespace frameavg
