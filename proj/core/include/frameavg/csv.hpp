#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "frameavg/experiments.hpp"

namespace frameavg {

inline constexpr std::string_view kRecordHeader =
    "model,N,beta,kick_site,kick_strength,avg_kind,avg_param,S_rho,S_rho_prime,S_M_rho_prime,"
    "rel_ent_prime,rel_ent_avg,bs_rel_ent_avg,beta_W,ME_deviation,entropy_density,wall_time_s";

/// 12 significant digits; +infinity renders as `inf`.
std::string format_number(double v);
std::string format_entropy(const EntropyValue& v);

/// Header plus one line per record, records sorted by (N, kind, parameter).
std::string format_csv(std::vector<ExperimentRecord> records);

/// Throws Error with the path in the message on I/O failure.
void emit_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);

/// Inverse of format_csv for the emitted columns.
std::vector<ExperimentRecord> parse_csv(std::string_view text);

std::string format_probe_csv(const std::vector<ProbeRow>& rows);

}  // namespace frameavg
