#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsgof/study_table.hpp"

namespace dsgof {

struct DatasetInfo {
  std::string name;
  Family family;
  ColumnMap columns;
  bool zero_truncated = false;
  std::string note;
};

const std::vector<DatasetInfo>& bundled_datasets();
std::optional<DatasetInfo> find_dataset(const std::string& name);

// Lookup order: $DSGOF_DATA_DIR/<name>.csv, the copy compiled into the
// library (shipyard, insurance, arsenic, rat), then the source tree's data/.
StudyTable load_dataset(const std::string& name);

}  // namespace dsgof
