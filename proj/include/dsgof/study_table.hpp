#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsgof/families.hpp"

namespace dsgof {

// The observed panel: one Observation per study, all valid for `family`.
struct StudyTable {
  Family family = Family::BinomialBeta;
  std::vector<Observation> rows;
  std::string name;

  std::size_t k() const noexcept { return rows.size(); }
};

void validate_table(const StudyTable& table);

// Distinct observations with multiplicities, in first-seen order. Used to
// avoid repeated work on histogram-expanded panels.
struct WeightedRow {
  Observation obs;
  double count = 0.0;
};
std::vector<WeightedRow> unique_rows(const StudyTable& table);

// Column names used by ingest. Empty strings select the family default:
// y plus n (binomial), se (normal) or an optional exposure (poisson).
struct ColumnMap {
  std::string y = "y";
  std::string size;
  std::string count;  // histogram multiplicity column; absent means one row each
};

// Parses CSV text with a header line. Lines starting with '#' and blank lines
// are skipped. Errors name the 1-based line number of the offending row.
StudyTable parse_csv(const std::string& text, Family family, const ColumnMap& columns = {},
                     const std::string& name = {});
StudyTable ingest(const std::string& path, Family family, const ColumnMap& columns = {});

// Canonical CSV: header "y,n" / "y,se" / "y,exposure" / "y", one row per study,
// values printed with round-trip precision.
std::string emit_csv(const StudyTable& table);

// FNV-1a 64-bit digest of the canonical CSV.
std::uint64_t table_digest(const StudyTable& table);

}  // namespace dsgof
