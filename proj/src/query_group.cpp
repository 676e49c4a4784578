#include "weakrank/query_group.hpp"

#include <cmath>
#include <unordered_map>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"

namespace weakrank {

using detail::ojson;

namespace {

std::vector<double> imputed_features(const std::vector<double>& features) {
  std::vector<double> out = features;
  for (double& f : out)
    if (std::isnan(f)) f = 0.0;
  return out;
}

DocEntry doc_from_record(const QueryDocRecord& rec, const DatasetSchema& schema) {
  DocEntry doc;
  doc.record_id = rec.record_id;
  doc.features = imputed_features(rec.features);
  doc.y_original = schema.label_map.value_of(rec.engagement);
  doc.y_effective = doc.y_original;
  doc.p = 0.0;
  doc.engagement = rec.engagement;
  doc.advertised = rec.advertised;
  return doc;
}

}  // namespace

std::vector<QueryGroup> build_query_groups(const Dataset& dataset) {
  std::vector<QueryGroup> groups;
  std::unordered_map<std::string, std::size_t> index_of;
  for (const QueryDocRecord& rec : dataset.records) {
    auto [it, inserted] = index_of.emplace(rec.query_id, groups.size());
    if (inserted) groups.push_back(QueryGroup{rec.query_id, {}});
    groups[it->second].docs.push_back(doc_from_record(rec, dataset.schema));
  }
  return groups;
}

std::size_t doc_count(const std::vector<QueryGroup>& groups) {
  std::size_t n = 0;
  for (const QueryGroup& g : groups) n += g.docs.size();
  return n;
}

void save_relabeled(const Dataset& dataset, const std::vector<QueryGroup>& groups,
                    const std::filesystem::path& path) {
  struct Target {
    double y_original, p, y_effective;
  };
  std::unordered_map<std::string, Target> targets;
  for (const QueryGroup& g : groups)
    for (const DocEntry& d : g.docs)
      targets.emplace(d.record_id, Target{d.y_original, d.p, d.y_effective});

  std::string out;
  for (const QueryDocRecord& rec : dataset.records) {
    const auto it = targets.find(rec.record_id);
    require(it != targets.end(),
            "save_relabeled: no relabeled target for record '" + rec.record_id + "'");
    ojson j = detail::record_to_json(rec);
    j["y_original"] = it->second.y_original;
    j["p"] = it->second.p;
    j["y_effective"] = it->second.y_effective;
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

std::vector<QueryGroup> load_relabeled_groups(const std::filesystem::path& path,
                                              const DatasetSchema& schema) {
  std::vector<QueryGroup> groups;
  std::unordered_map<std::string, std::size_t> index_of;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    ojson j = detail::parse_line(lines[i], where);
    QueryDocRecord rec = detail::record_from_json(j, schema, where);
    DocEntry doc = doc_from_record(rec, schema);
    try {
      doc.y_original = j.at("y_original").get<double>();
      doc.p = j.at("p").get<double>();
      doc.y_effective = j.at("y_effective").get<double>();
    } catch (const nlohmann::json::exception& e) {
      fail(where + ": missing relabel fields: " + e.what());
    }
    require(doc.p >= 0.0 && doc.p <= 1.0, where + ": p outside [0, 1]");
    auto [it, inserted] = index_of.emplace(rec.query_id, groups.size());
    if (inserted) groups.push_back(QueryGroup{rec.query_id, {}});
    groups[it->second].docs.push_back(std::move(doc));
  }
  return groups;
}

}  // namespace weakrank
