#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "weakrank/data_model.hpp"
#include "weakrank/lf_engine.hpp"

namespace weakrank {

// Behaviour profile for one generated labeling function.
//   accuracy_relevant   = P(vote Positive | doc relevant,   non-abstain)
//   accuracy_irrelevant = P(vote Negative | doc irrelevant, non-abstain)
struct LFProfile {
  std::string name;
  LFKind kind = LFKind::feature_threshold;
  double accuracy_relevant = 0.85;
  double accuracy_irrelevant = 0.85;
  double abstain_rate = 0.2;
  bool serveable = false;
};

struct SynthConfig {
  int train_queries = 5000;
  int eval_queries = 500;
  int seed_queries = 1500;
  int docs_per_query = 4;
  int seed_docs_per_query = 3;
  std::vector<LFProfile> lf_profiles;
  int noise_features = 3;
  double irrelevance_rate = 0.3;
  double engagement_noise = 0.15;
  double advertised_rate = 0.1;
  std::uint64_t seed = 1;
};

// The 10-LF reference profile: the three named archetypes plus seven
// threshold rules, accuracies 0.75-0.9, abstain rates 0.1-0.3.
std::vector<LFProfile> default_lf_profiles();
SynthConfig default_synth_config();

struct SynthCorpus {
  DatasetSchema schema;
  Dataset train;
  Dataset eval;
  Dataset seed;
  std::map<std::string, int> train_truth;  // record_id -> planted irrelevance
  std::map<std::string, int> eval_truth;
  std::map<std::string, int> seed_labels;  // planted truth doubling as annotations
  Taxonomy taxonomy;
  std::vector<LFSpec> lf_specs;
};

// Deterministic for a fixed seed.  Record fields are constructed so that each
// configured LF archetype, evaluated for real by the lf_engine, reproduces the
// profile's accuracy and abstain rate.  Errors on infeasible profiles.
SynthCorpus generate(const SynthConfig& config);

}  // namespace weakrank
