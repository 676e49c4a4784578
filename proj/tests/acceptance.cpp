// Acceptance suite: one criterion per check, one pass/fail line per criterion.
// Returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "weakrank/evaluator.hpp"
#include "weakrank/io_util.hpp"
#include "weakrank/pipeline.hpp"
#include "weakrank/ranker.hpp"
#include "weakrank/relabeler.hpp"
#include "weakrank/synthgen.hpp"
#include "weakrank/weak_labeler.hpp"

using namespace weakrank;
using namespace testutil;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

// 1. predict equals the brute-force smoothed posterior on random fixtures.
void criterion_nb_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  const double alphas[3] = {0.5, 1.0, 2.0};
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const std::size_t m = 2 + uniform_index(rng, 9);    // [2, 10]
    const std::size_t n = 20 + uniform_index(rng, 181);  // [20, 200]
    const double alpha = alphas[fixture % 3];
    const auto seed = random_seed_set(rng, m, n);
    const WeakLabelModel model = fit(seed, alpha);
    for (int trial = 0; trial < 5; ++trial) {
      const VoteVector votes = random_votes(rng, m);
      const double direct = nb_posterior_oracle(seed, alpha, votes);
      check(std::abs(predict(model, votes) - direct) < 1e-12,
            "posterior mismatch " + std::to_string(predict(model, votes)) + " vs " +
                std::to_string(direct));
    }
  }
  const double elapsed = seconds_since(start);
  check(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
}

// 2. table-lookup logit equals the indicator-feature linear form exactly.
void criterion_one_hot_identity() {
  std::mt19937_64 rng(103);
  const auto seed = random_seed_set(rng, 8, 120);
  const WeakLabelModel model = fit(seed, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const VoteVector votes = random_votes(rng, 8);
    const double table = predict_logit(model, votes);
    const double linear = indicator_logit(model, indicator_features(votes));
    check(table == linear, "logit paths disagree at trial " + std::to_string(trial));
  }
}

// 3. sample-size formula: the quoted 400, and 1/E^2 scaling.
void criterion_sample_size() {
  check(estimate_required_samples(0.05, 2.0) == 400, "E=0.05, z=2 must give 400");
  for (double e : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const long n = estimate_required_samples(e, 2.0);
    const long n_half = estimate_required_samples(e / 2.0, 2.0);
    check(n_half == 4 * n, "halving E=" + std::to_string(e) + " must quadruple n");
  }
}

// 4. the two-term weighted loss equals the plain loss on relabeled targets.
void criterion_loss_reduction() {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + static_cast<int>(uniform_index(rng, 4));
    auto groups = random_groups(rng, 1, 6, dim);
    const RankerModel model = random_model(rng, Architecture::linear, dim, 0);
    const double y_p = uniform(rng, 0.0, 3.0);
    std::vector<double> probs;
    for (const auto& d : groups[0].docs) probs.push_back(d.p);
    const auto relabeled =
        relabel_dataset(groups, probs, RelabelPolicy{RelabelKind::R1, y_p});
    const double reduced = listnet_loss(relabeled, model, LabelSource::effective);
    const double two_term = two_term_loss_oracle(groups, model, y_p);
    check(std::abs(reduced - two_term) < 1e-12,
          "loss forms differ by " + std::to_string(std::abs(reduced - two_term)));
  }
}

// 5. analytic gradient vs central finite differences, both architectures.
void criterion_gradient() {
  std::mt19937_64 rng(109);
  for (Architecture arch : {Architecture::linear, Architecture::one_hidden_layer}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 2 + static_cast<int>(uniform_index(rng, 3));
      const auto groups = random_groups(rng, 4, 5, dim);
      const RankerModel model = random_model(rng, arch, dim, 4);
      const auto analytic = loss_gradient(groups, model, LabelSource::original);
      const auto fd = fd_gradient_oracle(groups, model, LabelSource::original, 1e-5);
      const double err = relative_error(analytic, fd);
      check(err < 1e-5, "gradient relative error " + std::to_string(err));
    }
  }
}

// shared synthetic-corpus flow for criteria 6-8
struct LabelerOnCorpus {
  SynthCorpus corpus;
  WeakLabelModel model;
  double auc = 0.0;
};

LabelerOnCorpus fit_labeler(const SynthConfig& config) {
  LabelerOnCorpus out;
  out.corpus = generate(config);
  const VoteMatrix votes =
      eval_all(out.corpus.seed, out.corpus.lf_specs, out.corpus.taxonomy);
  std::vector<SeedExample> examples(votes.rows.size());
  for (std::size_t i = 0; i < votes.rows.size(); ++i)
    examples[i] = SeedExample{votes.rows[i],
                              out.corpus.seed_labels.at(votes.record_ids[i])};
  // 80-20 split
  std::vector<std::size_t> perm(examples.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(7);
  shuffle_deterministic(perm, rng);
  const std::size_t n_holdout = examples.size() / 5;
  std::vector<SeedExample> training, holdout;
  for (std::size_t i = 0; i < perm.size(); ++i)
    (i < n_holdout ? holdout : training).push_back(examples[perm[i]]);
  out.model = fit(training, 1.0);
  out.auc = evaluate_auc(out.model, holdout);
  return out;
}

// 6. held-out AUC >= 0.80 on the default 4500-example seed, five seeds.
void criterion_auc_pattern() {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig config = default_synth_config();
    config.train_queries = 0;
    config.eval_queries = 0;
    config.seed = seed;
    const LabelerOnCorpus run = fit_labeler(config);
    check(run.corpus.seed.records.size() == 4500, "default seed corpus must be 4500");
    check(run.auc >= 0.80,
          "seed " + std::to_string(seed) + ": AUC " + std::to_string(run.auc) + " < 0.80");
  }
  const double elapsed = seconds_since(start);
  check(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 60s");
}

// 7. median irrelevance score of dismissed docs exceeds that of applied docs.
void criterion_gradation() {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig config = default_synth_config();
    config.train_queries = 0;
    config.eval_queries = 500;
    config.seed = seed;
    const LabelerOnCorpus run = fit_labeler(config);
    const VoteMatrix votes =
        eval_all(run.corpus.eval, run.corpus.lf_specs, run.corpus.taxonomy);
    const std::vector<double> preds = predict_batch(run.model, votes);
    std::vector<std::pair<Engagement, double>> scored;
    for (std::size_t i = 0; i < preds.size(); ++i)
      scored.emplace_back(run.corpus.eval.records[i].engagement, preds[i]);
    const auto quantiles = score_quantiles(scored, {0.5});
    const double median_dismiss = quantiles.at(Engagement::dismiss)[0].second;
    const double median_apply = quantiles.at(Engagement::apply)[0].second;
    check(median_dismiss > median_apply,
          "seed " + std::to_string(seed) + ": median p dismiss " +
              std::to_string(median_dismiss) + " !> apply " +
              std::to_string(median_apply));
  }
}

// 8. relabeled training raises NDCG on weak labels and costs < 10% on the
//    original ones, in at least 4 of 5 seeds, via the real pipeline stages.
void criterion_table1_direction() {
  const auto start = std::chrono::steady_clock::now();
  int both_directions = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TempDir dir("acceptance_t1_" + std::to_string(seed));
    PipelineConfig config;
    config.paths.schema = dir / "c/schema.json";
    config.paths.seed_records = dir / "c/seed.jsonl";
    config.paths.seed_labels = dir / "c/seed_labels.jsonl";
    config.paths.train_records = dir / "c/train.jsonl";
    config.paths.eval_records = dir / "c/eval.jsonl";
    config.paths.taxonomy = dir / "c/taxonomy.tsv";
    config.paths.lf_config = dir / "c/lf_config.jsonl";
    config.paths.out_dir = dir / "out";
    config.synth = default_synth_config();
    config.synth.train_queries = 1000;
    config.synth.eval_queries = 300;
    config.synth.engagement_noise = 0.25;
    config.synth.seed = seed;
    config.relabel_policy = RelabelKind::R1;
    config.ranker.architecture = Architecture::one_hidden_layer;
    config.ranker.hidden_width = 32;
    config.ranker.train.epochs = 60;
    config.ranker.train.learning_rate = 0.1;
    config.ranker.train.seed = seed;

    cmd_synth(config);
    cmd_eval_lfs(config);
    cmd_train_labeler(config);
    cmd_relabel(config);

    config.ranker.train.label_source = LabelSource::original;
    cmd_train_ranker(config);
    const EvalReport baseline = cmd_evaluate(config);
    config.ranker.train.label_source = LabelSource::effective;
    cmd_train_ranker(config);
    const EvalReport relabeled = cmd_evaluate(config);

    const bool weak_up = relabeled.ndcg_weak > baseline.ndcg_weak;
    const double drop =
        (baseline.ndcg_original - relabeled.ndcg_original) / baseline.ndcg_original;
    const bool original_ok = drop < 0.10;
    std::printf("       seed %llu: weak %.4f -> %.4f, original drop %+.2f%%\n",
                static_cast<unsigned long long>(seed), baseline.ndcg_weak,
                relabeled.ndcg_weak, 100.0 * drop);
    if (weak_up && original_ok) ++both_directions;
  }
  check(both_directions >= 4, "both directions held in only " +
                                  std::to_string(both_directions) + " of 5 seeds");
  const double elapsed = seconds_since(start);
  check(elapsed < 300.0, "runtime " + std::to_string(elapsed) + "s exceeds 5 min");
}

// 9. full pipeline rerun is byte-identical.
void criterion_determinism() {
  std::vector<std::string> fingerprints;
  for (int run = 0; run < 2; ++run) {
    TempDir dir("acceptance_det_" + std::to_string(run));
    PipelineConfig config;
    config.paths.schema = dir / "c/schema.json";
    config.paths.seed_records = dir / "c/seed.jsonl";
    config.paths.seed_labels = dir / "c/seed_labels.jsonl";
    config.paths.train_records = dir / "c/train.jsonl";
    config.paths.eval_records = dir / "c/eval.jsonl";
    config.paths.train_truth = dir / "c/train_truth.jsonl";
    config.paths.eval_truth = dir / "c/eval_truth.jsonl";
    config.paths.taxonomy = dir / "c/taxonomy.tsv";
    config.paths.lf_config = dir / "c/lf_config.jsonl";
    config.paths.out_dir = dir / "out";
    config.synth = default_synth_config();
    config.synth.train_queries = 200;
    config.synth.eval_queries = 80;
    config.synth.seed_queries = 150;
    config.synth.seed = 17;
    config.ranker.train.epochs = 5;

    cmd_synth(config);
    cmd_eval_lfs(config);
    cmd_train_labeler(config);
    cmd_relabel(config);
    cmd_train_ranker(config);
    cmd_evaluate(config);

    std::string all;
    for (const char* name :
         {"c/schema.json", "c/seed.jsonl", "c/seed_labels.jsonl", "c/train.jsonl",
          "c/eval.jsonl", "c/train_truth.jsonl", "c/eval_truth.jsonl", "c/taxonomy.tsv",
          "c/lf_config.jsonl", "out/votes_seed.jsonl", "out/votes_train.jsonl",
          "out/votes_eval.jsonl", "out/lf_stats.json", "out/labeler_model.json",
          "out/labeler_report.json", "out/train_relabeled.jsonl",
          "out/eval_relabeled.jsonl", "out/ranker_model.json", "out/train_log.jsonl",
          "out/eval_report.json", "out/eval_metrics.jsonl"})
      all += read_file(dir / name);
    fingerprints.push_back(std::move(all));
  }
  check(fingerprints[0] == fingerprints[1], "pipeline reruns differ");
}

// 10. NDCG property suite over random instances.
void criterion_ndcg_properties() {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 10);
    QueryGroup group;
    group.query_id = "q";
    std::vector<double> scores(n), gains(n);
    for (std::size_t j = 0; j < n; ++j) {
      DocEntry doc;
      doc.record_id = "d" + std::to_string(j);
      group.docs.push_back(doc);
      scores[j] = uniform(rng, -10.0, 10.0);
      gains[j] = bernoulli(rng, 0.2) ? 0.0 : uniform(rng, 0.0, 5.0);
    }
    const int k = 1 + static_cast<int>(uniform_index(rng, 12));
    const double value = ndcg_at_k(group, scores, gains, k);
    check(value >= 0.0 && value <= 1.0 + 1e-12, "NDCG outside [0,1]");

    // ideal ordering scores 1 (0 when all gains vanish)
    const double ideal = ndcg_at_k(group, gains, gains, k);
    const bool any_gain = std::any_of(gains.begin(), gains.end(),
                                      [](double g) { return g > 0.0; });
    check(ideal == (any_gain ? 1.0 : 0.0), "ideal ordering must score 1");

    // invariance under a strictly monotone transform
    std::vector<double> warped(n);
    for (std::size_t j = 0; j < n; ++j) warped[j] = std::atan(scores[j]) * 2.0 + 11.0;
    check(ndcg_at_k(group, warped, gains, k) == value, "monotone transform changed NDCG");

    // IDCG = 0 convention
    const std::vector<double> zeros(n, 0.0);
    check(ndcg_at_k(group, scores, zeros, k) == 0.0, "IDCG=0 must return 0");
  }
}

// 11. relabel algebra: convexity, affinity, R3 identity on advertised data.
void criterion_relabel_algebra() {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 10000; ++trial) {
    const double y = uniform(rng, -4.0, 4.0);
    const double y_p = uniform(rng, -4.0, 4.0);
    const double p = uniform01(rng);
    const RelabeledTarget t = relabel(false, y, p, RelabelPolicy{RelabelKind::R1, y_p});
    check(t.y_effective >= std::min(y, y_p) - 1e-12 &&
              t.y_effective <= std::max(y, y_p) + 1e-12,
          "convexity violated");
    check(std::abs(t.y_effective - (y + p * (y_p - y))) < 1e-12, "affinity violated");
  }
  auto groups = random_groups(rng, 10, 5, 2);
  for (auto& g : groups)
    for (auto& d : g.docs) d.advertised = true;
  std::vector<double> probs(doc_count(groups));
  for (double& p : probs) p = uniform01(rng);
  const auto out = relabel_dataset(groups, probs, RelabelPolicy{RelabelKind::R3, 1.5});
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t j = 0; j < groups[g].docs.size(); ++j)
      check(out[g].docs[j].y_effective == groups[g].docs[j].y_original &&
                out[g].docs[j].p == 0.0,
            "R3 on advertised data must be the identity");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Naive-Bayes oracle equivalence (1e-12, 1000 fixtures)", criterion_nb_oracle},
      {2, "one-hot linear identity (exact, 10000 vectors)", criterion_one_hot_identity},
      {3, "sample-size formula (400 at E=0.05, z=2; 1/E^2 scaling)", criterion_sample_size},
      {4, "two-term vs relabeled loss reduction (1e-12, 200 groups)", criterion_loss_reduction},
      {5, "analytic gradient vs finite differences (<1e-5, both architectures)", criterion_gradient},
      {6, "weak-labeler held-out AUC >= 0.80 on the default corpus, 5 seeds", criterion_auc_pattern},
      {7, "median p(dismiss) > median p(apply) on evaluation data, 5 seeds", criterion_gradation},
      {8, "relabeled ranker: weak-label NDCG up, original NDCG drop < 10%, >= 4/5 seeds", criterion_table1_direction},
      {9, "full pipeline rerun is byte-identical", criterion_determinism},
      {10, "NDCG property suite (1000 random instances)", criterion_ndcg_properties},
      {11, "relabel algebra: convexity, affinity in p, R3 identity", criterion_relabel_algebra},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run();
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", criterion.id, criterion.name,
                  seconds_since(start));
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %2d: %s: %s\n", criterion.id, criterion.name,
                  e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
