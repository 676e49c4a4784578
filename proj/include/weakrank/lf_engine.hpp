#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "weakrank/data_model.hpp"
#include "weakrank/vote.hpp"

namespace weakrank {

enum class LFKind { token_containment, ordinal_delta, taxonomy_match, feature_threshold };

std::string to_string(LFKind k);
LFKind lf_kind_from_string(const std::string& s);

enum class ThresholdDirection { geq, leq };

// One configured labeling function.  Only the parameters for its kind are
// meaningful.  A vote of Positive means "relevance condition satisfied"; no
// polarity flip happens here, the weak labeler learns signs from data.
struct LFSpec {
  std::string name;
  LFKind kind = LFKind::feature_threshold;
  bool serveable = false;

  // token_containment
  bool span_required = true;
  // ordinal_delta
  int max_delta = 1;
  // feature_threshold
  int feature_index = 0;
  double threshold = 0.0;
  ThresholdDirection direction = ThresholdDirection::geq;
};

struct LFStats {
  std::string name;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t abstain = 0;
  double coverage = 0.0;  // 1 - abstain / n
  // Fraction of non-abstain votes that match the seed label, counting Positive
  // as a prediction of label 0 (the LF's relevance condition holding) and
  // Negative as a prediction of label 1.  Absent without labels or votes.
  std::optional<double> empirical_accuracy;
};

// Title key for taxonomy lookups: span tokens joined with single spaces.
std::optional<std::string> title_key(const QueryDocRecord& rec);

Vote eval_token_containment(const QueryDocRecord& rec, const LFSpec& spec);
Vote eval_ordinal_delta(const QueryDocRecord& rec, const LFSpec& spec);
Vote eval_taxonomy_match(const QueryDocRecord& rec, const Taxonomy& taxonomy);
Vote eval_feature_threshold(const QueryDocRecord& rec, const LFSpec& spec);

Vote eval_lf(const QueryDocRecord& rec, const LFSpec& spec, const Taxonomy& taxonomy);

// Row i holds the votes of specs applied to record i, in spec order.
// Pure; rows may be evaluated in parallel.
VoteMatrix eval_all(const Dataset& dataset, const std::vector<LFSpec>& specs,
                    const Taxonomy& taxonomy);

std::vector<LFStats> compute_stats(const VoteMatrix& votes,
                                   const std::vector<LFSpec>& specs,
                                   const std::vector<int>* seed_labels = nullptr);

// LF config file: one JSON spec per line; line order defines vote columns.
std::vector<LFSpec> load_lf_config(const std::filesystem::path& path);
void save_lf_config(const std::vector<LFSpec>& specs, const std::filesystem::path& path);

// Vote matrix file: one JSON row per record, votes serialized as 1/0/null.
VoteMatrix load_vote_matrix(const std::filesystem::path& path);
void save_vote_matrix(const VoteMatrix& votes, const std::filesystem::path& path);

}  // namespace weakrank
