#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "weakrank/data_model.hpp"

namespace weakrank {

// One document inside a query group.  Feature nulls are imputed to 0.0 here;
// engagement and advertised ride along for the relabeler (R3) and the
// evaluator's quantile report.
struct DocEntry {
  std::string record_id;
  std::vector<double> features;
  double y_original = 0.0;
  double y_effective = 0.0;
  double p = 0.0;  // irrelevance probability after any policy override
  Engagement engagement = Engagement::view;
  bool advertised = false;
};

// The unit of listwise training: a query and its candidate documents.
struct QueryGroup {
  std::string query_id;
  std::vector<DocEntry> docs;
};

// Groups records by query_id (group order = first appearance, doc order =
// record order).  y_original comes from the schema label map; p starts at 0
// and y_effective at y_original.
std::vector<QueryGroup> build_query_groups(const Dataset& dataset);

std::size_t doc_count(const std::vector<QueryGroup>& groups);

// Relabeled dataset file: the input records, each line extended with
// y_original, p and y_effective.
void save_relabeled(const Dataset& dataset, const std::vector<QueryGroup>& groups,
                    const std::filesystem::path& path);
std::vector<QueryGroup> load_relabeled_groups(const std::filesystem::path& path,
                                              const DatasetSchema& schema);

}  // namespace weakrank
