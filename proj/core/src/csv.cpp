#include "frameavg/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace frameavg {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("CSV: malformed number '" + s + "'");
  return v;
}

EntropyValue parse_entropy(const std::string& s) {
  if (s == "inf") return EntropyValue::infinite();
  return EntropyValue::finite(parse_number(s));
}

int kind_order_of(const std::string& name) {
  if (name == "uniform-spatial") return 0;
  if (name == "weighted-spatial") return 1;
  if (name == "temporal") return 2;
  throw Error("CSV: unknown averaging kind '" + name + "'");
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_entropy(const EntropyValue& v) {
  return v.support_violation ? "inf" : format_number(v.nats);
}

std::string format_csv(std::vector<ExperimentRecord> records) {
  std::stable_sort(records.begin(), records.end(), record_less);
  std::ostringstream os;
  os << kRecordHeader << '\n';
  for (const auto& r : records) {
    os << r.model << ',' << r.n << ',' << format_number(r.beta) << ',' << r.kick_site << ','
       << format_number(r.kick_strength) << ',' << r.avg_kind << ',' << format_number(r.avg_param)
       << ',' << format_number(r.s_rho) << ',' << format_number(r.s_rho_prime) << ','
       << format_number(r.s_m_rho_prime) << ',' << format_entropy(r.rel_ent_prime) << ','
       << format_entropy(r.rel_ent_avg) << ',' << format_entropy(r.bs_rel_ent_avg) << ','
       << format_number(r.beta_w) << ',' << format_number(r.me_deviation) << ','
       << format_number(r.entropy_density) << ',' << format_number(r.wall_time_seconds) << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  const std::string text = format_csv(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<ExperimentRecord> parse_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  std::size_t pos = 0;
  bool header = true;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (header) {
      if (line != kRecordHeader) throw Error("CSV: unexpected header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 17) {
      std::ostringstream os;
      os << "CSV line " << line_no << ": expected 17 fields, got " << f.size();
      throw Error(os.str());
    }
    ExperimentRecord r;
    r.model = f[0];
    r.n = std::stoi(f[1]);
    r.beta = parse_number(f[2]);
    r.kick_site = std::stoi(f[3]);
    r.kick_strength = parse_number(f[4]);
    r.avg_kind = f[5];
    r.kind_order = kind_order_of(f[5]);
    r.avg_param = parse_number(f[6]);
    r.s_rho = parse_number(f[7]);
    r.s_rho_prime = parse_number(f[8]);
    r.s_m_rho_prime = parse_number(f[9]);
    r.rel_ent_prime = parse_entropy(f[10]);
    r.rel_ent_avg = parse_entropy(f[11]);
    r.bs_rel_ent_avg = parse_entropy(f[12]);
    r.beta_w = parse_number(f[13]);
    r.me_deviation = parse_number(f[14]);
    r.entropy_density = parse_number(f[15]);
    r.wall_time_seconds = parse_number(f[16]);
    out.push_back(std::move(r));
  }
  if (header) throw Error("CSV: missing header");
  return out;
}

std::string format_probe_csv(const std::vector<ProbeRow>& rows) {
  std::ostringstream os;
  os << "site,distance,comm_u_beta,comm_U\n";
  for (const auto& r : rows)
    os << r.site << ',' << r.distance << ',' << format_number(r.comm_u_beta) << ','
       << format_number(r.comm_u) << '\n';
  return os.str();
}

}  // namespace frameavg
