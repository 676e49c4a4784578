#include "weakrank/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"

namespace weakrank {

using detail::ojson;

std::string to_string(Engagement e) {
  switch (e) {
    case Engagement::apply: return "apply";
    case Engagement::save: return "save";
    case Engagement::view: return "view";
    case Engagement::skip: return "skip";
    case Engagement::dismiss: return "dismiss";
  }
  fail("invalid engagement value");
}

Engagement engagement_from_string(const std::string& s) {
  for (Engagement e : kEngagements)
    if (s == to_string(e)) return e;
  fail("unknown engagement '" + s + "'");
}

bool records_equal(const QueryDocRecord& a, const QueryDocRecord& b) {
  if (a.features.size() != b.features.size()) return false;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    const bool na = std::isnan(a.features[i]), nb = std::isnan(b.features[i]);
    if (na != nb) return false;
    if (!na && a.features[i] != b.features[i]) return false;
  }
  return a.record_id == b.record_id && a.query_id == b.query_id &&
         a.query_tokens == b.query_tokens &&
         a.query_title_token_span == b.query_title_token_span &&
         a.doc_title_tokens == b.doc_title_tokens &&
         a.user_seniority == b.user_seniority && a.doc_seniority == b.doc_seniority &&
         a.doc_industry_id == b.doc_industry_id && a.engagement == b.engagement &&
         a.advertised == b.advertised;
}

EngagementLabelMap make_label_map(const std::map<std::string, double>& by_name) {
  EngagementLabelMap map;
  for (Engagement e : kEngagements) {
    auto it = by_name.find(to_string(e));
    require(it != by_name.end(),
            "engagement map missing a value for '" + to_string(e) + "'");
    map.values[static_cast<int>(e)] = it->second;
  }
  require(by_name.size() == kEngagements.size(),
          "engagement map has unknown extra keys");
  for (std::size_t i = 0; i + 1 < map.values.size(); ++i)
    require(map.values[i] >= map.values[i + 1],
            "engagement map must be weakly monotone: apply >= save >= view >= "
            "skip >= dismiss");
  return map;
}

bool DatasetSchema::feature_may_be_null(int index) const {
  return std::find(optional_features.begin(), optional_features.end(), index) !=
         optional_features.end();
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  ojson j = detail::parse_line(read_file(path), path.string());
  DatasetSchema schema;
  try {
    schema.feature_dim = j.at("feature_dim").get<int>();
    schema.lf_count = j.at("lf_count").get<int>();
    schema.label_map =
        make_label_map(j.at("engagement_map").get<std::map<std::string, double>>());
    if (j.contains("optional_features"))
      schema.optional_features = j["optional_features"].get<std::vector<int>>();
    if (j.contains("seniority_levels"))
      schema.seniority_levels = j["seniority_levels"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": malformed schema: " + e.what());
  }
  require(schema.feature_dim >= 0, path.string() + ": feature_dim must be >= 0");
  require(schema.lf_count >= 0, path.string() + ": lf_count must be >= 0");
  require(schema.seniority_levels >= 1,
          path.string() + ": seniority_levels must be >= 1");
  for (int idx : schema.optional_features)
    require(idx >= 0 && idx < schema.feature_dim,
            path.string() + ": optional feature index " + std::to_string(idx) +
                " outside [0, " + std::to_string(schema.feature_dim) + ")");
  return schema;
}

void save_schema(const DatasetSchema& schema, const std::filesystem::path& path) {
  ojson j;
  j["feature_dim"] = schema.feature_dim;
  j["lf_count"] = schema.lf_count;
  ojson map;
  for (Engagement e : kEngagements) map[to_string(e)] = schema.label_map.value_of(e);
  j["engagement_map"] = map;
  j["optional_features"] = schema.optional_features;
  j["seniority_levels"] = schema.seniority_levels;
  write_file_atomic(path, j.dump(2) + "\n");
}

Dataset load_records(const std::filesystem::path& path, const DatasetSchema& schema) {
  Dataset dataset;
  dataset.schema = schema;
  const auto lines = split_lines(read_file(path));
  std::unordered_set<std::string> seen;
  seen.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    ojson j = detail::parse_line(lines[i], where);
    QueryDocRecord rec = detail::record_from_json(j, schema, where);
    require(seen.insert(rec.record_id).second,
            where + ": duplicate record_id '" + rec.record_id + "'");
    dataset.records.push_back(std::move(rec));
  }
  return dataset;
}

void save_records(const Dataset& dataset, const std::filesystem::path& path) {
  std::string out;
  for (const QueryDocRecord& rec : dataset.records)
    out += detail::record_to_json(rec).dump() + "\n";
  write_file_atomic(path, out);
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  Taxonomy taxonomy;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::size_t tab = lines[i].find('\t');
    require(tab != std::string::npos, where + ": expected '<key>\\t<industries>'");
    const std::string key = lines[i].substr(0, tab);
    require(!key.empty(), where + ": empty title key");
    std::set<std::string>& industries = taxonomy.title_to_industry[key];
    std::size_t added = 0;
    std::stringstream rest(lines[i].substr(tab + 1));
    std::string industry;
    while (std::getline(rest, industry, ',')) {
      require(!industry.empty(), where + ": empty industry id");
      industries.insert(industry);
      ++added;
    }
    if (added == 0) {
      if (industries.empty()) taxonomy.title_to_industry.erase(key);
      fail(where + ": key '" + key + "' has an empty industry list");
    }
  }
  return taxonomy;
}

void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path) {
  std::string out;
  for (const auto& [key, industries] : taxonomy.title_to_industry) {
    require(!industries.empty(),
            "taxonomy key '" + key + "' has an empty industry set");
    out += key;
    out += '\t';
    bool first = true;
    for (const std::string& industry : industries) {
      if (!first) out += ',';
      out += industry;
      first = false;
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::map<std::string, int> load_labels(const std::filesystem::path& path) {
  std::map<std::string, int> labels;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    ojson j = detail::parse_line(lines[i], where);
    std::string id;
    int label = 0;
    try {
      id = j.at("record_id").get<std::string>();
      label = j.at("label").get<int>();
    } catch (const nlohmann::json::exception& e) {
      fail(where + ": malformed label row: " + e.what());
    }
    require(label == 0 || label == 1, where + ": label must be 0 or 1");
    require(labels.emplace(id, label).second,
            where + ": duplicate record_id '" + id + "'");
  }
  return labels;
}

void save_labels(const std::map<std::string, int>& labels,
                 const std::filesystem::path& path) {
  std::string out;
  for (const auto& [id, label] : labels) {
    ojson j;
    j["record_id"] = id;
    j["label"] = label;
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace weakrank
