#pragma once

// Internal JSON (de)serialization shared by the dataset and relabeled-dataset
// readers.  Not part of the public API.

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "weakrank/common.hpp"
#include "weakrank/data_model.hpp"

namespace weakrank::detail {

using ojson = nlohmann::ordered_json;

inline ojson record_to_json(const QueryDocRecord& rec) {
  ojson j;
  j["record_id"] = rec.record_id;
  j["query_id"] = rec.query_id;
  j["query_tokens"] = rec.query_tokens;
  if (rec.query_title_token_span)
    j["title_span"] = {rec.query_title_token_span->begin, rec.query_title_token_span->end};
  else
    j["title_span"] = nullptr;
  j["doc_title_tokens"] = rec.doc_title_tokens;
  j["user_seniority"] = rec.user_seniority ? ojson(*rec.user_seniority) : ojson(nullptr);
  j["doc_seniority"] = rec.doc_seniority ? ojson(*rec.doc_seniority) : ojson(nullptr);
  j["doc_industry_id"] = rec.doc_industry_id ? ojson(*rec.doc_industry_id) : ojson(nullptr);
  ojson features = ojson::array();
  for (double f : rec.features) {
    if (std::isnan(f))
      features.push_back(nullptr);
    else
      features.push_back(f);
  }
  j["features"] = features;
  j["engagement"] = to_string(rec.engagement);
  j["advertised"] = rec.advertised;
  return j;
}

// `where` prefixes every error with file/line context.
inline QueryDocRecord record_from_json(const ojson& j, const DatasetSchema& schema,
                                       const std::string& where) {
  auto bad = [&](const std::string& msg) -> void { fail(where + ": " + msg); };
  if (!j.is_object()) bad("record is not a JSON object");

  auto get = [&](const char* key) -> const ojson& {
    auto it = j.find(key);
    if (it == j.end()) fail(where + ": missing field '" + std::string(key) + "'");
    return *it;
  };

  QueryDocRecord rec;
  try {
    rec.record_id = get("record_id").get<std::string>();
    rec.query_id = get("query_id").get<std::string>();
    rec.query_tokens = get("query_tokens").get<std::vector<std::string>>();
    const ojson& span = get("title_span");
    if (!span.is_null()) {
      if (!span.is_array() || span.size() != 2) bad("title_span must be null or [begin, end]");
      rec.query_title_token_span = TokenSpan{span[0].get<int>(), span[1].get<int>()};
    }
    rec.doc_title_tokens = get("doc_title_tokens").get<std::vector<std::string>>();
    const ojson& us = get("user_seniority");
    if (!us.is_null()) rec.user_seniority = us.get<int>();
    const ojson& ds = get("doc_seniority");
    if (!ds.is_null()) rec.doc_seniority = ds.get<int>();
    const ojson& ind = get("doc_industry_id");
    if (!ind.is_null()) rec.doc_industry_id = ind.get<std::string>();
    const ojson& features = get("features");
    if (!features.is_array()) bad("features must be an array");
    rec.features.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].is_null()) {
        if (!schema.feature_may_be_null(static_cast<int>(i)))
          bad("null feature at index " + std::to_string(i) +
              " which the schema does not declare optional");
        rec.features.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        rec.features.push_back(features[i].get<double>());
      }
    }
    rec.engagement = engagement_from_string(get("engagement").get<std::string>());
    rec.advertised = get("advertised").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed record: ") + e.what());
  }

  if (rec.record_id.empty()) bad("record_id must be non-empty");
  if (static_cast<int>(rec.features.size()) != schema.feature_dim)
    bad("feature vector has " + std::to_string(rec.features.size()) +
        " values, schema declares " + std::to_string(schema.feature_dim));
  if (rec.query_title_token_span) {
    const TokenSpan& s = *rec.query_title_token_span;
    if (s.begin < 0 || s.end <= s.begin ||
        s.end > static_cast<int>(rec.query_tokens.size()))
      bad("title_span [" + std::to_string(s.begin) + ", " + std::to_string(s.end) +
          ") out of bounds for " + std::to_string(rec.query_tokens.size()) +
          " query tokens");
  }
  for (const auto& seniority : {rec.user_seniority, rec.doc_seniority}) {
    if (seniority && (*seniority < 0 || *seniority >= schema.seniority_levels))
      bad("seniority " + std::to_string(*seniority) + " outside ordinal range [0, " +
          std::to_string(schema.seniority_levels) + ")");
  }
  return rec;
}

inline ojson parse_line(const std::string& line, const std::string& where) {
  try {
    return ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(where + ": malformed line: " + e.what());
  }
}

}  // namespace weakrank::detail
