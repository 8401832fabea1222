#include "dsgof/datasets.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>

#include "dsgof/error.hpp"

namespace dsgof {
namespace {

const std::map<std::string, std::string>& embedded() {
  static const std::map<std::string, std::string> tables = {
      {"shipyard", R"csv(y,n
0,5
0,5
0,5
1,5
5,5
)csv"},
      {"insurance", R"csv(y,count
0,7840
1,1317
2,239
3,42
4,14
5,4
6,4
7,1
)csv"},
      {"arsenic", R"csv(y,se
9.78,0.30
10.18,0.46
10.35,0.07
11.60,0.78
12.01,2.62
14.70,0.30
15.00,1.00
15.10,0.20
15.50,1.60
)csv"},
      {"rat", R"csv(y,n
0,20
0,20
0,20
0,20
0,20
0,20
0,20
0,19
0,19
0,19
0,19
0,18
0,18
0,17
1,20
1,20
1,20
1,20
1,19
1,19
1,18
1,18
3,27
2,25
2,24
2,23
2,20
2,20
2,20
2,20
2,20
2,20
1,10
5,49
2,19
5,46
2,17
7,49
7,47
3,20
3,20
2,13
9,48
10,50
4,20
4,20
4,20
4,20
4,20
4,20
4,20
10,48
4,19
4,19
4,19
5,22
11,46
12,49
5,20
5,20
6,23
5,19
6,22
6,20
6,20
6,20
16,52
15,46
15,47
9,24
)csv"},
  };
  return tables;
}

}  // namespace

const std::vector<DatasetInfo>& bundled_datasets() {
  static const std::vector<DatasetInfo> list = {
      {"shipyard", Family::BinomialBeta, {"y", "n", ""}, false,
       "5 shipyard inspections, failures out of 5"},
      {"insurance", Family::PoissonGamma, {"y", "", "count"}, false,
       "claim-count histogram, 9461 policies"},
      {"arsenic", Family::NormalNormal, {"y", "se", ""}, false,
       "partial: the 9 arsenic measurements printed in the source; the full 28-lab panel is not bundled"},
      {"rat", Family::BinomialBeta, {"y", "n", ""}, false, "70 historical rat tumor studies"},
      {"butterfly", Family::PoissonGamma, {"y", "", "count"}, true,
       "butterfly species abundance counts (zero-truncated)"},
  };
  return list;
}

std::optional<DatasetInfo> find_dataset(const std::string& name) {
  for (const auto& d : bundled_datasets()) {
    if (d.name == name) return d;
  }
  return std::nullopt;
}

StudyTable load_dataset(const std::string& name) {
  const auto info = find_dataset(name);
  if (!info) fail_validation("cli", "load_dataset", "unknown bundled dataset '" + name + "'");
  namespace fs = std::filesystem;
  if (const char* dir = std::getenv("DSGOF_DATA_DIR"); dir && *dir) {
    const fs::path p = fs::path(dir) / (name + ".csv");
    if (fs::exists(p)) {
      StudyTable t = ingest(p.string(), info->family, info->columns);
      t.name = name;
      return t;
    }
  }
  if (auto it = embedded().find(name); it != embedded().end()) {
    return parse_csv(it->second, info->family, info->columns, name);
  }
#ifdef DSGOF_DEFAULT_DATA_DIR
  const fs::path p = fs::path(DSGOF_DEFAULT_DATA_DIR) / (name + ".csv");
  if (fs::exists(p)) {
    StudyTable t = ingest(p.string(), info->family, info->columns);
    t.name = name;
    return t;
  }
#endif
  fail_validation("cli", "load_dataset",
                  "dataset '" + name + "' not found; set DSGOF_DATA_DIR to a directory holding " +
                      name + ".csv");
}

}  // namespace dsgof
