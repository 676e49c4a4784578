#include "weakrank/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weakrank/common.hpp"
#include "weakrank/rng.hpp"

namespace weakrank {

namespace {

constexpr int kTitleTokens = 40;
constexpr int kIndustries = 12;
constexpr int kQueryWords = 200;
constexpr int kDocWords = 200;

std::string padded(const std::string& prefix, int i, int width) {
  std::string digits = std::to_string(i);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

// Engagement distributions by planted relevance; the gradation the relabeler
// is supposed to undo lives in the noise flips.
const std::vector<Engagement> kRelevantSide = {Engagement::apply, Engagement::save,
                                               Engagement::view};
const std::vector<double> kRelevantWeights = {0.35, 0.25, 0.40};
const std::vector<Engagement> kIrrelevantSide = {Engagement::skip, Engagement::dismiss};
const std::vector<double> kIrrelevantWeights = {0.40, 0.60};

struct Channels {
  int token = -1;     // profile indices; -1 when the kind is absent
  int ordinal = -1;
  int taxonomy = -1;
  std::vector<int> thresholds;
  double taxonomy_extra_abstain = 0.0;  // abstain rate beyond forced span loss
};

void check_rate(double value, const std::string& what) {
  require(value >= 0.0 && value <= 1.0, "synth: " + what + " must lie in [0, 1]");
}

Channels analyze_profiles(const SynthConfig& config) {
  Channels ch;
  for (std::size_t i = 0; i < config.lf_profiles.size(); ++i) {
    const LFProfile& prof = config.lf_profiles[i];
    check_rate(prof.accuracy_relevant, "accuracy_relevant of '" + prof.name + "'");
    check_rate(prof.accuracy_irrelevant, "accuracy_irrelevant of '" + prof.name + "'");
    check_rate(prof.abstain_rate, "abstain_rate of '" + prof.name + "'");
    const int idx = static_cast<int>(i);
    switch (prof.kind) {
      case LFKind::token_containment:
        require(ch.token < 0,
                "synth: infeasible profile: two token_containment LFs would read "
                "the same title span");
        ch.token = idx;
        break;
      case LFKind::ordinal_delta:
        require(ch.ordinal < 0,
                "synth: infeasible profile: two ordinal_delta LFs would read the "
                "same seniority fields");
        ch.ordinal = idx;
        break;
      case LFKind::taxonomy_match:
        require(ch.taxonomy < 0,
                "synth: infeasible profile: two taxonomy_match LFs would read the "
                "same industry field");
        ch.taxonomy = idx;
        break;
      case LFKind::feature_threshold:
        ch.thresholds.push_back(idx);
        break;
    }
  }
  if (ch.taxonomy >= 0) {
    // A missing span forces the taxonomy LF to abstain, so its total abstain
    // rate cannot fall below the token LF's.
    const double r_tax = config.lf_profiles[ch.taxonomy].abstain_rate;
    const double r_tok = ch.token >= 0 ? config.lf_profiles[ch.token].abstain_rate : 0.0;
    require(r_tax >= r_tok,
            "synth: infeasible profile: taxonomy_match abstain_rate must be >= the "
            "token_containment abstain_rate (a missing title span silences both)");
    ch.taxonomy_extra_abstain = r_tok >= 1.0 ? 0.0 : (r_tax - r_tok) / (1.0 - r_tok);
  }
  return ch;
}

Vote realized_vote(bool planted_irrelevant, bool correct) {
  // Positive = "relevance condition holds", which is the truth for relevant docs.
  const bool condition_holds = correct ? !planted_irrelevant : planted_irrelevant;
  return condition_holds ? Vote::Positive : Vote::Negative;
}

struct Generator {
  const SynthConfig& config;
  const Channels& channels;
  std::mt19937_64 rng;
  Taxonomy taxonomy;
  std::vector<std::string> title_pool;
  std::vector<std::string> industry_pool;
  int feature_dim;

  Generator(const SynthConfig& cfg, const Channels& ch)
      : config(cfg), channels(ch), rng(cfg.seed) {
    for (int i = 0; i < kTitleTokens; ++i) title_pool.push_back(padded("title", i, 2));
    for (int i = 0; i < kIndustries; ++i) industry_pool.push_back(padded("ind", i, 2));
    feature_dim = static_cast<int>(ch.thresholds.size()) + cfg.noise_features;
    for (const std::string& title : title_pool) {
      std::set<std::string> industries;
      const std::size_t count = 1 + uniform_index(rng, 2);
      while (industries.size() < count)
        industries.insert(industry_pool[uniform_index(rng, kIndustries)]);
      taxonomy.title_to_industry[title] = std::move(industries);
    }
  }

  bool correct_draw(const LFProfile& prof, bool planted) {
    return bernoulli(rng, planted ? prof.accuracy_irrelevant : prof.accuracy_relevant);
  }

  Engagement draw_engagement(bool planted) {
    const bool flip = bernoulli(rng, config.engagement_noise);
    const bool irrelevant_side = planted != flip;
    if (irrelevant_side)
      return kIrrelevantSide[pick_weighted(rng, kIrrelevantWeights)];
    return kRelevantSide[pick_weighted(rng, kRelevantWeights)];
  }

  int seniority_near(int user, int max_delta) {
    std::vector<int> candidates;
    for (int x = 0; x < 10; ++x)
      if (std::abs(x - user) <= max_delta) candidates.push_back(x);
    return candidates[uniform_index(rng, candidates.size())];
  }

  int seniority_far(int user, int max_delta) {
    std::vector<int> candidates;
    for (int x = 0; x < 10; ++x)
      if (std::abs(x - user) > max_delta) candidates.push_back(x);
    require(!candidates.empty(),
            "synth: infeasible profile: ordinal_delta max_delta spans the whole "
            "seniority range, a negative vote cannot be realized");
    return candidates[uniform_index(rng, candidates.size())];
  }

  QueryDocRecord make_record(const std::string& record_id, const std::string& query_id,
                             const std::vector<std::string>& query_tokens,
                             const std::string& title_token, int span_pos,
                             bool planted) {
    QueryDocRecord rec;
    rec.record_id = record_id;
    rec.query_id = query_id;
    rec.query_tokens = query_tokens;

    // token_containment channel: abstention removes the span, the vote decides
    // whether the title token reappears in the document title.
    bool span_present = true;
    Vote token_vote = Vote::Abstain;
    if (channels.token >= 0) {
      const LFProfile& prof = config.lf_profiles[channels.token];
      if (bernoulli(rng, prof.abstain_rate))
        span_present = false;
      else
        token_vote = realized_vote(planted, correct_draw(prof, planted));
    }
    if (span_present) rec.query_title_token_span = TokenSpan{span_pos, span_pos + 1};

    const std::size_t title_len = 3 + uniform_index(rng, 3);
    for (std::size_t t = 0; t < title_len; ++t)
      rec.doc_title_tokens.push_back(
          padded("d", static_cast<int>(uniform_index(rng, kDocWords)), 3));
    if (token_vote == Vote::Positive) {
      const std::size_t at = uniform_index(rng, rec.doc_title_tokens.size() + 1);
      rec.doc_title_tokens.insert(
          rec.doc_title_tokens.begin() + static_cast<std::ptrdiff_t>(at), title_token);
    }

    // ordinal_delta channel
    if (channels.ordinal >= 0) {
      const LFProfile& prof = config.lf_profiles[channels.ordinal];
      const int max_delta = 1;
      if (bernoulli(rng, prof.abstain_rate)) {
        rec.doc_seniority = static_cast<int>(uniform_index(rng, 10));
      } else {
        const int user = static_cast<int>(uniform_index(rng, 10));
        rec.user_seniority = user;
        const Vote v = realized_vote(planted, correct_draw(prof, planted));
        rec.doc_seniority = v == Vote::Positive ? seniority_near(user, max_delta)
                                                : seniority_far(user, max_delta);
      }
    } else {
      rec.user_seniority = static_cast<int>(uniform_index(rng, 10));
      rec.doc_seniority = static_cast<int>(uniform_index(rng, 10));
    }

    // taxonomy_match channel
    if (channels.taxonomy >= 0) {
      const LFProfile& prof = config.lf_profiles[channels.taxonomy];
      if (!span_present) {
        rec.doc_industry_id = industry_pool[uniform_index(rng, kIndustries)];
      } else if (bernoulli(rng, channels.taxonomy_extra_abstain)) {
        rec.doc_industry_id = std::nullopt;
      } else {
        const Vote v = realized_vote(planted, correct_draw(prof, planted));
        const std::set<std::string>& matching = taxonomy.title_to_industry.at(title_token);
        if (v == Vote::Positive) {
          std::size_t at = uniform_index(rng, matching.size());
          rec.doc_industry_id = *std::next(matching.begin(), static_cast<std::ptrdiff_t>(at));
        } else {
          std::vector<std::string> others;
          for (const std::string& ind : industry_pool)
            if (!matching.contains(ind)) others.push_back(ind);
          rec.doc_industry_id = others[uniform_index(rng, others.size())];
        }
      }
    } else {
      rec.doc_industry_id = industry_pool[uniform_index(rng, kIndustries)];
    }

    // feature_threshold channels: threshold 0.5, direction >=; abstention is a
    // null feature, so the threshold columns are schema-optional
    rec.features.assign(static_cast<std::size_t>(feature_dim), 0.0);
    for (std::size_t t = 0; t < channels.thresholds.size(); ++t) {
      const LFProfile& prof = config.lf_profiles[channels.thresholds[t]];
      if (bernoulli(rng, prof.abstain_rate)) {
        rec.features[t] = std::numeric_limits<double>::quiet_NaN();
      } else {
        const Vote v = realized_vote(planted, correct_draw(prof, planted));
        rec.features[t] = v == Vote::Positive ? uniform(rng, 0.5, 1.0)
                                              : uniform(rng, 0.0, 0.5);
      }
    }
    for (int k = static_cast<int>(channels.thresholds.size()); k < feature_dim; ++k)
      rec.features[static_cast<std::size_t>(k)] = uniform01(rng);

    rec.engagement = draw_engagement(planted);
    rec.advertised = bernoulli(rng, config.advertised_rate);
    return rec;
  }

  void generate_section(const std::string& prefix, int queries, int docs_per_query,
                        Dataset& dataset, std::map<std::string, int>& truth) {
    for (int qi = 0; qi < queries; ++qi) {
      const std::string query_id = padded(prefix, qi, 5);
      const std::size_t n_words = 2 + uniform_index(rng, 3);
      std::vector<std::string> query_tokens;
      for (std::size_t w = 0; w < n_words; ++w)
        query_tokens.push_back(
            padded("w", static_cast<int>(uniform_index(rng, kQueryWords)), 3));
      const std::string title_token = title_pool[uniform_index(rng, kTitleTokens)];
      const int span_pos = static_cast<int>(uniform_index(rng, query_tokens.size() + 1));
      query_tokens.insert(query_tokens.begin() + span_pos, title_token);

      for (int di = 0; di < docs_per_query; ++di) {
        const std::string record_id = query_id + "_" + std::to_string(di);
        const bool planted = bernoulli(rng, config.irrelevance_rate);
        dataset.records.push_back(make_record(record_id, query_id, query_tokens,
                                              title_token, span_pos, planted));
        truth[record_id] = planted ? 1 : 0;
      }
    }
  }
};

}  // namespace

std::vector<LFProfile> default_lf_profiles() {
  return {
      {"title_tokens_in_doc", LFKind::token_containment, 0.90, 0.90, 0.10, true},
      {"seniority_within_one", LFKind::ordinal_delta, 0.85, 0.85, 0.20, true},
      {"industry_matches_title", LFKind::taxonomy_match, 0.80, 0.80, 0.30, false},
      {"model_score_0", LFKind::feature_threshold, 0.88, 0.84, 0.15, true},
      {"model_score_1", LFKind::feature_threshold, 0.82, 0.86, 0.25, false},
      {"model_score_2", LFKind::feature_threshold, 0.78, 0.80, 0.30, false},
      {"model_score_3", LFKind::feature_threshold, 0.75, 0.90, 0.10, false},
      {"model_score_4", LFKind::feature_threshold, 0.86, 0.78, 0.20, false},
      {"model_score_5", LFKind::feature_threshold, 0.80, 0.75, 0.25, false},
      {"model_score_6", LFKind::feature_threshold, 0.90, 0.82, 0.12, false},
  };
}

SynthConfig default_synth_config() {
  SynthConfig config;
  config.lf_profiles = default_lf_profiles();
  return config;
}

SynthCorpus generate(const SynthConfig& config) {
  require(!config.lf_profiles.empty(), "synth: no LF profiles configured");
  require(config.train_queries >= 0 && config.eval_queries >= 0 &&
              config.seed_queries >= 0,
          "synth: query counts must be >= 0");
  require(config.docs_per_query >= 1 && config.seed_docs_per_query >= 1,
          "synth: docs_per_query must be >= 1");
  require(config.noise_features >= 0, "synth: noise_features must be >= 0");
  check_rate(config.irrelevance_rate, "irrelevance_rate");
  check_rate(config.engagement_noise, "engagement_noise");
  check_rate(config.advertised_rate, "advertised_rate");

  const Channels channels = analyze_profiles(config);
  Generator gen(config, channels);
  require(gen.feature_dim >= 1,
          "synth: need at least one feature (threshold LFs + noise_features)");

  SynthCorpus corpus;
  corpus.taxonomy = gen.taxonomy;

  corpus.schema.feature_dim = gen.feature_dim;
  corpus.schema.lf_count = static_cast<int>(config.lf_profiles.size());
  corpus.schema.label_map = make_label_map({{"apply", 3.0},
                                            {"save", 2.0},
                                            {"view", 1.0},
                                            {"skip", 0.3},
                                            {"dismiss", 0.1}});
  for (std::size_t t = 0; t < channels.thresholds.size(); ++t)
    corpus.schema.optional_features.push_back(static_cast<int>(t));
  corpus.schema.seniority_levels = 10;

  std::size_t threshold_seen = 0;
  for (std::size_t i = 0; i < config.lf_profiles.size(); ++i) {
    const LFProfile& prof = config.lf_profiles[i];
    require(!prof.name.empty(), "synth: LF profile " + std::to_string(i) + " has no name");
    LFSpec spec;
    spec.name = prof.name;
    spec.kind = prof.kind;
    spec.serveable = prof.serveable;
    switch (prof.kind) {
      case LFKind::token_containment: spec.span_required = true; break;
      case LFKind::ordinal_delta: spec.max_delta = 1; break;
      case LFKind::taxonomy_match: break;
      case LFKind::feature_threshold:
        spec.feature_index = static_cast<int>(threshold_seen++);
        spec.threshold = 0.5;
        spec.direction = ThresholdDirection::geq;
        break;
    }
    corpus.lf_specs.push_back(spec);
  }

  corpus.train.schema = corpus.schema;
  corpus.eval.schema = corpus.schema;
  corpus.seed.schema = corpus.schema;
  gen.generate_section("t", config.train_queries, config.docs_per_query, corpus.train,
                       corpus.train_truth);
  gen.generate_section("e", config.eval_queries, config.docs_per_query, corpus.eval,
                       corpus.eval_truth);
  gen.generate_section("s", config.seed_queries, config.seed_docs_per_query, corpus.seed,
                       corpus.seed_labels);
  return corpus;
}

}  // namespace weakrank
