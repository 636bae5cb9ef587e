#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sigfilter/meta_analysis.hpp"

namespace sigfilter {

enum class Provenance { reconstructed_table1, user_csv };

struct StudyTable {
  std::vector<StudySummary> rows;
  Provenance provenance = Provenance::user_csv;

  void validate() const;  // row invariants plus unique study ids
};

// Malformed or inconsistent study CSV; the message names the offending row
// and column.
struct csv_parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the study CSV with exact header `study_id,t,d,n,se,s,pval`.
// Lines starting with '#' are comments; `# provenance: reconstructed_table1`
// marks the bundled dataset. d, se and pval cells may be empty, in which case
// they are derived (se from sd and n, d from t and se, pval from the central
// two-sided t). Rows whose redundant columns disagree by more than 1% are
// rejected.
StudyTable parse_studies_csv(const std::filesystem::path& path);
StudyTable parse_studies_csv_text(std::string_view text, std::string_view source_name);

void write_studies_csv(const StudyTable& table, std::ostream& os);
void write_studies_csv(const StudyTable& table, const std::filesystem::path& path);

// The bundled 10-comparison case-study dataset, reconstructed from published
// per-study (t, n, s) values: se = s/sqrt(n), d = t*se, and the two-sided
// p-value from the central t distribution.
StudyTable reconstructed_table1();

}  // namespace sigfilter
