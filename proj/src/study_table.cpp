#include "dsgof/study_table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dsgof/error.hpp"

namespace dsgof {
namespace {

std::string size_header(Family f) {
  switch (f) {
    case Family::BinomialBeta: return "n";
    case Family::NormalNormal: return "se";
    case Family::PoissonGamma: return "exposure";
    case Family::ExponentialGamma: return "";
  }
  return "";
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& text, int line, const std::string& column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    fail_validation("cli", "ingest",
                    "line " + std::to_string(line) + ": column '" + column +
                        "' is not a number: '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void validate_table(const StudyTable& table) {
  if (table.rows.empty()) {
    fail_validation("cli", "validate_table", "study table has no rows");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      validate_observation(table.family, table.rows[i]);
    } catch (const Error& e) {
      fail_validation("cli", "validate_table",
                      "row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

std::vector<WeightedRow> unique_rows(const StudyTable& table) {
  std::vector<WeightedRow> out;
  std::map<std::pair<double, double>, std::size_t> index;
  for (const auto& r : table.rows) {
    auto [it, inserted] = index.try_emplace({r.y, r.size}, out.size());
    if (inserted) {
      out.push_back({r, 1.0});
    } else {
      out[it->second].count += 1.0;
    }
  }
  return out;
}

StudyTable parse_csv(const std::string& text, Family family, const ColumnMap& columns,
                     const std::string& name) {
  StudyTable table;
  table.family = family;
  table.name = name;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  int y_col = -1;
  int size_col = -1;
  int count_col = -1;
  const std::string size_name = lower(columns.size.empty() ? size_header(family) : columns.size);
  const bool size_required =
      family == Family::BinomialBeta || family == Family::NormalNormal || !columns.size.empty();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto fields = split_fields(stripped);
    if (header.empty()) {
      header = fields;
      for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = lower(header[c]);
        if (h == lower(columns.y)) y_col = static_cast<int>(c);
        if (!size_name.empty() && h == size_name) size_col = static_cast<int>(c);
        if (!columns.count.empty() && h == lower(columns.count)) count_col = static_cast<int>(c);
      }
      if (y_col < 0) {
        fail_validation("cli", "ingest", "line " + std::to_string(line_no) +
                                             ": missing column '" + columns.y + "'");
      }
      if (size_required && size_col < 0) {
        fail_validation("cli", "ingest", "line " + std::to_string(line_no) +
                                             ": missing column '" + size_name + "'");
      }
      if (!columns.count.empty() && count_col < 0) {
        fail_validation("cli", "ingest", "line " + std::to_string(line_no) +
                                             ": missing column '" + columns.count + "'");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      fail_validation("cli", "ingest",
                      "line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()));
    }
    Observation obs;
    obs.y = parse_number(fields[y_col], line_no, header[y_col]);
    obs.size = size_col >= 0 ? parse_number(fields[size_col], line_no, header[size_col]) : 1.0;
    double count = 1.0;
    if (count_col >= 0) {
      count = parse_number(fields[count_col], line_no, header[count_col]);
      if (count < 0.0 || std::floor(count) != count) {
        fail_validation("cli", "ingest", "line " + std::to_string(line_no) +
                                             ": count must be a nonnegative integer");
      }
    }
    try {
      validate_observation(family, obs);
    } catch (const Error& e) {
      fail_validation("cli", "ingest", "line " + std::to_string(line_no) + ": " + e.what());
    }
    for (double c = 0; c < count; c += 1.0) table.rows.push_back(obs);
  }
  if (header.empty()) fail_validation("cli", "ingest", "input has no header line");
  if (table.rows.empty()) fail_validation("cli", "ingest", "input has no data rows");
  return table;
}

StudyTable ingest(const std::string& path, Family family, const ColumnMap& columns) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_validation("cli", "ingest", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_csv(buf.str(), family, columns, name);
}

std::string emit_csv(const StudyTable& table) {
  const std::string size_name = size_header(table.family);
  std::string out = size_name.empty() ? "y\n" : "y," + size_name + "\n";
  for (const auto& r : table.rows) {
    out += format_double(r.y);
    if (!size_name.empty()) out += "," + format_double(r.size);
    out += "\n";
  }
  return out;
}

std::uint64_t table_digest(const StudyTable& table) {
  std::uint64_t h = 1469598103934665603ULL;
  const std::string text = std::string(family_name(table.family)) + "\n" + emit_csv(table);
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace dsgof
