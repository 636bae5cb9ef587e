#include "sigfilter/study_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sigfilter/student_t.hpp"

namespace sigfilter {

namespace {

constexpr std::string_view kHeader = "study_id,t,d,n,se,s,pval";

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void StudyTable::validate() const {
  if (rows.empty()) throw csv_parse_error("study table: no studies");
  std::set<std::string> ids;
  for (const StudySummary& s : rows) {
    s.validate();
    if (!ids.insert(s.study_id).second)
      throw csv_parse_error("study table: duplicate study_id '" + s.study_id + "'");
  }
}

StudyTable parse_studies_csv_text(std::string_view text, std::string_view source_name) {
  StudyTable table;
  std::string_view rest = text;
  bool header_seen = false;
  int row_number = 0;

  auto fail = [&](const std::string& msg) {
    throw csv_parse_error(std::string(source_name) + ": " + msg);
  };

  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = (nl == std::string_view::npos) ? rest : rest.substr(0, nl);
    rest = (nl == std::string_view::npos) ? std::string_view{} : rest.substr(nl + 1);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.find("provenance: reconstructed_table1") != std::string_view::npos)
        table.provenance = Provenance::reconstructed_table1;
      continue;
    }
    if (!header_seen) {
      if (line != kHeader)
        fail("header must be exactly '" + std::string(kHeader) + "', got '" + std::string(line) +
             "'");
      header_seen = true;
      continue;
    }

    ++row_number;
    const auto fields = split_fields(line);
    if (fields.size() != 7)
      fail("row " + std::to_string(row_number) + ": expected 7 fields, got " +
           std::to_string(fields.size()));

    auto number = [&](std::string_view cell, const char* column) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        fail("row " + std::to_string(row_number) + ", column '" + column + "': not a number: '" +
             std::string(cell) + "'");
      return value;
    };

    StudySummary s;
    s.study_id = std::string(trim(fields[0]));
    if (s.study_id.empty()) fail("row " + std::to_string(row_number) + ", column 'study_id': empty");
    s.t_stat = number(trim(fields[1]), "t");
    const std::string_view d_cell = trim(fields[2]);
    const std::string_view se_cell = trim(fields[4]);
    const std::string_view p_cell = trim(fields[6]);

    const double n_val = number(trim(fields[3]), "n");
    if (!(n_val >= 1.0) || n_val != std::floor(n_val))
      fail("row " + std::to_string(row_number) + ", column 'n': must be a positive integer");
    s.n = static_cast<int>(n_val);
    s.sd = number(trim(fields[5]), "s");

    s.se = se_cell.empty() ? s.sd / std::sqrt(static_cast<double>(s.n)) : number(se_cell, "se");
    s.effect = d_cell.empty() ? s.t_stat * s.se : number(d_cell, "d");
    s.p_value = p_cell.empty()
                    ? std::clamp(2.0 * (1.0 - student_t_cdf(std::fabs(s.t_stat), s.n - 1)), 0.0, 1.0)
                    : number(p_cell, "pval");

    // Consistency of redundant columns, 1% tolerance.
    const double se_implied = s.sd / std::sqrt(static_cast<double>(s.n));
    if (std::fabs(s.se - se_implied) > 0.01 * se_implied)
      fail("row " + std::to_string(row_number) + ", column 'se': inconsistent with s/sqrt(n) (" +
           fmt_double(s.se) + " vs " + fmt_double(se_implied) + ")");
    const double t_implied = s.effect / s.se;
    if (std::fabs(s.t_stat - t_implied) > 0.01 * std::fabs(t_implied))
      fail("row " + std::to_string(row_number) + ", column 't': inconsistent with d/se (" +
           fmt_double(s.t_stat) + " vs " + fmt_double(t_implied) + ")");

    table.rows.push_back(std::move(s));
  }

  if (!header_seen) fail("missing header row");
  if (table.rows.empty()) fail("no studies");
  table.validate();
  return table;
}

StudyTable parse_studies_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw csv_parse_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_studies_csv_text(buf.str(), path.string());
}

void write_studies_csv(const StudyTable& table, std::ostream& os) {
  if (table.provenance == Provenance::reconstructed_table1)
    os << "# provenance: reconstructed_table1\n";
  os << kHeader << "\n";
  for (const StudySummary& s : table.rows) {
    os << s.study_id << ',' << fmt_double(s.t_stat) << ',' << fmt_double(s.effect) << ',' << s.n
       << ',' << fmt_double(s.se) << ',' << fmt_double(s.sd) << ',' << fmt_double(s.p_value)
       << '\n';
  }
}

void write_studies_csv(const StudyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_studies_csv(table, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

StudyTable reconstructed_table1() {
  struct Published {
    const char* id;
    double t;
    int n;
    double s;
  };
  // Published per-comparison t, n, and s; d, se, pval are derived.
  static constexpr Published kRows[] = {
      {"study1", -1.9, 40, 0.2},  {"study2", -3.1, 32, 0.1}, {"study3", -1.5, 32, 0.2},
      {"study4", -2.1, 32, 0.1},  {"study5", -1.7, 32, 0.1}, {"study6", -2.6, 28, 0.2},
      {"study7", -1.6, 60, 0.2},  {"study8", -3.2, 44, 0.2}, {"study9", -1.9, 60, 0.2},
      {"study10", -2.6, 114, 0.2},
  };

  StudyTable table;
  table.provenance = Provenance::reconstructed_table1;
  for (const Published& r : kRows) {
    StudySummary s;
    s.study_id = r.id;
    s.t_stat = r.t;
    s.n = r.n;
    s.sd = r.s;
    s.se = r.s / std::sqrt(static_cast<double>(r.n));
    s.effect = r.t * s.se;
    s.p_value = std::clamp(2.0 * (1.0 - student_t_cdf(std::fabs(r.t), r.n - 1)), 0.0, 1.0);
    table.rows.push_back(std::move(s));
  }
  table.validate();
  return table;
}

}  // namespace sigfilter
