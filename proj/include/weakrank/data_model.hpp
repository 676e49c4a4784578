#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "weakrank/vote.hpp"

namespace weakrank {

enum class Engagement : int { apply = 0, save = 1, view = 2, skip = 3, dismiss = 4 };

constexpr std::array<Engagement, 5> kEngagements = {
    Engagement::apply, Engagement::save, Engagement::view, Engagement::skip,
    Engagement::dismiss};

std::string to_string(Engagement e);
Engagement engagement_from_string(const std::string& s);

// Half-open token index range [begin, end) into query_tokens.
struct TokenSpan {
  int begin = 0;
  int end = 0;
  bool operator==(const TokenSpan&) const = default;
};

// One (user, query, document) triplet.  Optional fields are genuinely absent
// when unset; labeling functions use that to decide abstention.  A feature may
// be NaN only at an index the schema declares optional (serialized as null).
struct QueryDocRecord {
  std::string record_id;
  std::string query_id;  // grouping key for listwise training
  std::vector<std::string> query_tokens;
  std::optional<TokenSpan> query_title_token_span;
  std::vector<std::string> doc_title_tokens;
  std::optional<int> user_seniority;
  std::optional<int> doc_seniority;
  std::optional<std::string> doc_industry_id;
  std::vector<double> features;
  Engagement engagement = Engagement::view;
  bool advertised = false;
};

bool records_equal(const QueryDocRecord& a, const QueryDocRecord& b);

// Engagement -> target value y.  Must be weakly monotone in the order
// apply >= save >= view >= skip >= dismiss.
struct EngagementLabelMap {
  std::array<double, 5> values{};

  double value_of(Engagement e) const { return values[static_cast<int>(e)]; }
  double dismiss_value() const { return value_of(Engagement::dismiss); }
};

// Validates completeness and monotonicity.
EngagementLabelMap make_label_map(const std::map<std::string, double>& by_name);

struct DatasetSchema {
  int feature_dim = 0;
  int lf_count = 0;
  EngagementLabelMap label_map;
  std::vector<int> optional_features;  // indices where a feature may be null
  int seniority_levels = 10;           // valid ordinal levels are 0 .. levels-1

  bool feature_may_be_null(int index) const;
};

struct Dataset {
  DatasetSchema schema;
  std::vector<QueryDocRecord> records;
};

// title-phrase key -> set of industry ids; keys are span tokens joined with
// single spaces.
struct Taxonomy {
  std::map<std::string, std::set<std::string>> title_to_industry;
};

struct SeedExample {
  VoteVector votes;
  int label = 0;  // 1 = annotated target condition holds ("extremely irrelevant")
};

DatasetSchema load_schema(const std::filesystem::path& path);
void save_schema(const DatasetSchema& schema, const std::filesystem::path& path);

// Line-delimited JSON records validated against the schema: uniform feature
// dimension, unique record ids, seniority range, null features only where
// declared optional.  Errors name the offending line.
Dataset load_records(const std::filesystem::path& path, const DatasetSchema& schema);
void save_records(const Dataset& dataset, const std::filesystem::path& path);

// Tab-separated rows: title-phrase key, comma-separated industry list.
// Duplicate keys merge by set union; an empty industry list is an error.
Taxonomy load_taxonomy(const std::filesystem::path& path);
void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path);

// record_id -> binary label sidecar (seed annotations, planted truth).
std::map<std::string, int> load_labels(const std::filesystem::path& path);
void save_labels(const std::map<std::string, int>& labels,
                 const std::filesystem::path& path);

}  // namespace weakrank
