#include "weakrank/lf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"
#include "weakrank/parallel.hpp"

namespace weakrank {

using detail::ojson;

std::string to_string(LFKind k) {
  switch (k) {
    case LFKind::token_containment: return "token_containment";
    case LFKind::ordinal_delta: return "ordinal_delta";
    case LFKind::taxonomy_match: return "taxonomy_match";
    case LFKind::feature_threshold: return "feature_threshold";
  }
  fail("invalid LF kind value");
}

LFKind lf_kind_from_string(const std::string& s) {
  for (LFKind k : {LFKind::token_containment, LFKind::ordinal_delta,
                   LFKind::taxonomy_match, LFKind::feature_threshold})
    if (s == to_string(k)) return k;
  fail("unknown LF kind '" + s + "'");
}

std::optional<std::string> title_key(const QueryDocRecord& rec) {
  if (!rec.query_title_token_span) return std::nullopt;
  const TokenSpan& span = *rec.query_title_token_span;
  if (span.begin < 0 || span.end <= span.begin ||
      span.end > static_cast<int>(rec.query_tokens.size()))
    return std::nullopt;
  std::string key;
  for (int i = span.begin; i < span.end; ++i) {
    if (i > span.begin) key += ' ';
    key += rec.query_tokens[i];
  }
  return key;
}

Vote eval_token_containment(const QueryDocRecord& rec, const LFSpec& spec) {
  if (rec.query_tokens.empty()) return Vote::Abstain;
  int begin = 0;
  int end = static_cast<int>(rec.query_tokens.size());
  if (spec.span_required) {
    // "if the query contains a job title": no span, no vote
    if (!rec.query_title_token_span) return Vote::Abstain;
    begin = rec.query_title_token_span->begin;
    end = rec.query_title_token_span->end;
  }
  const std::unordered_set<std::string> title(rec.doc_title_tokens.begin(),
                                              rec.doc_title_tokens.end());
  for (int i = begin; i < end; ++i)
    if (!title.contains(rec.query_tokens[i])) return Vote::Negative;
  return Vote::Positive;
}

Vote eval_ordinal_delta(const QueryDocRecord& rec, const LFSpec& spec) {
  if (!rec.user_seniority || !rec.doc_seniority) return Vote::Abstain;
  const int delta = std::abs(*rec.user_seniority - *rec.doc_seniority);
  return delta <= spec.max_delta ? Vote::Positive : Vote::Negative;
}

Vote eval_taxonomy_match(const QueryDocRecord& rec, const Taxonomy& taxonomy) {
  const auto key = title_key(rec);
  if (!key || !rec.doc_industry_id) return Vote::Abstain;
  const auto it = taxonomy.title_to_industry.find(*key);
  if (it == taxonomy.title_to_industry.end()) return Vote::Abstain;
  return it->second.contains(*rec.doc_industry_id) ? Vote::Positive : Vote::Negative;
}

Vote eval_feature_threshold(const QueryDocRecord& rec, const LFSpec& spec) {
  require(spec.feature_index >= 0 &&
              spec.feature_index < static_cast<int>(rec.features.size()),
          "LF '" + spec.name + "': feature_index " +
              std::to_string(spec.feature_index) + " out of range for dimension " +
              std::to_string(rec.features.size()));
  const double value = rec.features[spec.feature_index];
  if (std::isnan(value)) return Vote::Abstain;
  // boundary inclusive in both directions
  const bool holds = spec.direction == ThresholdDirection::geq
                         ? value >= spec.threshold
                         : value <= spec.threshold;
  return holds ? Vote::Positive : Vote::Negative;
}

Vote eval_lf(const QueryDocRecord& rec, const LFSpec& spec, const Taxonomy& taxonomy) {
  switch (spec.kind) {
    case LFKind::token_containment: return eval_token_containment(rec, spec);
    case LFKind::ordinal_delta: return eval_ordinal_delta(rec, spec);
    case LFKind::taxonomy_match: return eval_taxonomy_match(rec, taxonomy);
    case LFKind::feature_threshold: return eval_feature_threshold(rec, spec);
  }
  fail("invalid LF kind value");
}

VoteMatrix eval_all(const Dataset& dataset, const std::vector<LFSpec>& specs,
                    const Taxonomy& taxonomy) {
  require(!specs.empty(), "eval_all: no labeling functions configured");
  VoteMatrix matrix;
  matrix.lf_count = specs.size();
  matrix.record_ids.resize(dataset.records.size());
  matrix.rows.resize(dataset.records.size());
  parallel_for(dataset.records.size(), [&](std::size_t i) {
    const QueryDocRecord& rec = dataset.records[i];
    matrix.record_ids[i] = rec.record_id;
    VoteVector row(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j)
      row[j] = eval_lf(rec, specs[j], taxonomy);
    matrix.rows[i] = std::move(row);
  });
  return matrix;
}

std::vector<LFStats> compute_stats(const VoteMatrix& votes,
                                   const std::vector<LFSpec>& specs,
                                   const std::vector<int>* seed_labels) {
  require(specs.size() == votes.lf_count,
          "compute_stats: spec count does not match vote columns");
  if (seed_labels)
    require(seed_labels->size() == votes.rows.size(),
            "compute_stats: label count does not match row count");
  const std::size_t n = votes.rows.size();
  std::vector<LFStats> stats(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    LFStats& s = stats[j];
    s.name = specs[j].name;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      switch (votes.rows[i][j]) {
        case Vote::Positive: ++s.positive; break;
        case Vote::Negative: ++s.negative; break;
        case Vote::Abstain: ++s.abstain; break;
      }
      if (seed_labels && votes.rows[i][j] != Vote::Abstain) {
        // Positive asserts the relevance condition, i.e. predicts label 0.
        const int predicted = votes.rows[i][j] == Vote::Positive ? 0 : 1;
        if (predicted == (*seed_labels)[i]) ++correct;
      }
    }
    const std::size_t voted = s.positive + s.negative;
    s.coverage = n == 0 ? 0.0 : 1.0 - static_cast<double>(s.abstain) / static_cast<double>(n);
    if (seed_labels && voted > 0)
      s.empirical_accuracy = static_cast<double>(correct) / static_cast<double>(voted);
  }
  return stats;
}

namespace {

ojson spec_to_json(const LFSpec& spec) {
  ojson j;
  j["name"] = spec.name;
  j["kind"] = to_string(spec.kind);
  j["serveable"] = spec.serveable;
  ojson params = ojson::object();
  switch (spec.kind) {
    case LFKind::token_containment:
      params["span_required"] = spec.span_required;
      break;
    case LFKind::ordinal_delta:
      params["max_delta"] = spec.max_delta;
      break;
    case LFKind::taxonomy_match:
      break;
    case LFKind::feature_threshold:
      params["feature_index"] = spec.feature_index;
      params["threshold"] = spec.threshold;
      params["direction"] = spec.direction == ThresholdDirection::geq ? "geq" : "leq";
      break;
  }
  j["params"] = params;
  return j;
}

LFSpec spec_from_json(const ojson& j, const std::string& where) {
  LFSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    spec.kind = lf_kind_from_string(j.at("kind").get<std::string>());
    spec.serveable = j.at("serveable").get<bool>();
    const ojson& params = j.at("params");
    switch (spec.kind) {
      case LFKind::token_containment:
        spec.span_required = params.at("span_required").get<bool>();
        break;
      case LFKind::ordinal_delta:
        spec.max_delta = params.at("max_delta").get<int>();
        break;
      case LFKind::taxonomy_match:
        break;
      case LFKind::feature_threshold:
        spec.feature_index = params.at("feature_index").get<int>();
        spec.threshold = params.at("threshold").get<double>();
        {
          const std::string d = params.at("direction").get<std::string>();
          require(d == "geq" || d == "leq", where + ": direction must be geq or leq");
          spec.direction = d == "geq" ? ThresholdDirection::geq : ThresholdDirection::leq;
        }
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(where + ": malformed LF spec: " + e.what());
  }
  require(!spec.name.empty(), where + ": LF name must be non-empty");
  require(spec.max_delta >= 0, where + ": max_delta must be >= 0");
  require(spec.feature_index >= 0, where + ": feature_index must be >= 0");
  require(std::isfinite(spec.threshold), where + ": threshold must be finite");
  return spec;
}

}  // namespace

std::vector<LFSpec> load_lf_config(const std::filesystem::path& path) {
  std::vector<LFSpec> specs;
  std::unordered_set<std::string> names;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    LFSpec spec = spec_from_json(detail::parse_line(lines[i], where), where);
    require(names.insert(spec.name).second,
            where + ": duplicate LF name '" + spec.name + "'");
    specs.push_back(std::move(spec));
  }
  return specs;
}

void save_lf_config(const std::vector<LFSpec>& specs, const std::filesystem::path& path) {
  std::string out;
  for (const LFSpec& spec : specs) out += spec_to_json(spec).dump() + "\n";
  write_file_atomic(path, out);
}

VoteMatrix load_vote_matrix(const std::filesystem::path& path) {
  VoteMatrix matrix;
  std::unordered_set<std::string> seen;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    ojson j = detail::parse_line(lines[i], where);
    std::string id;
    VoteVector row;
    try {
      id = j.at("record_id").get<std::string>();
      const ojson& votes = j.at("votes");
      require(votes.is_array(), where + ": votes must be an array");
      for (const ojson& v : votes) {
        if (v.is_null())
          row.push_back(Vote::Abstain);
        else if (v.is_number_integer() && v.get<int>() == 1)
          row.push_back(Vote::Positive);
        else if (v.is_number_integer() && v.get<int>() == 0)
          row.push_back(Vote::Negative);
        else
          fail(where + ": votes must be 1, 0 or null");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(where + ": malformed vote row: " + e.what());
    }
    require(seen.insert(id).second, where + ": duplicate record_id '" + id + "'");
    if (matrix.rows.empty())
      matrix.lf_count = row.size();
    else
      require(row.size() == matrix.lf_count, where + ": ragged vote matrix");
    matrix.record_ids.push_back(std::move(id));
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

void save_vote_matrix(const VoteMatrix& votes, const std::filesystem::path& path) {
  require(votes.record_ids.size() == votes.rows.size(),
          "vote matrix ids and rows differ in length");
  std::string out;
  for (std::size_t i = 0; i < votes.rows.size(); ++i) {
    ojson j;
    j["record_id"] = votes.record_ids[i];
    ojson row = ojson::array();
    for (Vote v : votes.rows[i]) {
      if (v == Vote::Abstain)
        row.push_back(nullptr);
      else
        row.push_back(v == Vote::Positive ? 1 : 0);
    }
    j["votes"] = row;
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace weakrank
