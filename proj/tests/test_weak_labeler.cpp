#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_util.hpp"
#include "weakrank/weak_labeler.hpp"

using namespace weakrank;
using namespace testutil;

namespace {

constexpr Vote P = Vote::Positive;
constexpr Vote N = Vote::Negative;
constexpr Vote A = Vote::Abstain;

// 8-example fixture, both classes balanced; expected weights frozen from an
// independent computation of log((c1+1)/(n1+3)) - log((c0+1)/(n0+3)).
std::vector<SeedExample> eight_example_seed() {
  return {
      {{P, N, A}, 1}, {{P, P, N}, 1}, {{N, A, A}, 1}, {{P, N, N}, 1},
      {{N, P, A}, 0}, {{N, N, P}, 0}, {{A, P, P}, 0}, {{N, P, N}, 0},
  };
}

}  // namespace

TEST_SUITE_BEGIN("weak_labeler");

TEST_CASE("fit reproduces hand-computed smoothed log ratios") {
  const WeakLabelModel model = fit(eight_example_seed(), 1.0);
  REQUIRE(model.lf_count() == 3);
  CHECK(model.class_count_0 == 4);
  CHECK(model.class_count_1 == 4);
  CHECK(model.bias == 0.0);  // equal priors

  const double expected[3][3] = {
      {-0.6931471805599453, 1.3862943611198906, -0.6931471805599453},
      {0.4054651081081644, -0.6931471805599453, 0.6931471805599453},
      {0.4054651081081644, -1.0986122886681098, 0.4054651081081644},
  };
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(model.weights[i][a] - expected[i][a]) < 1e-12);

  CHECK(std::abs(predict(model, {P, N, A}) - 0.8999999999999999) < 1e-12);
}

TEST_CASE("LF with identical conditionals under both classes gets zero weights") {
  // LF 0 votes P for the first example of each class, N for the rest.
  std::vector<SeedExample> seed = {
      {{P}, 1}, {{N}, 1}, {{N}, 1}, {{P}, 0}, {{N}, 0}, {{N}, 0},
  };
  const WeakLabelModel model = fit(seed, 1.0);
  for (int a = 0; a < 3; ++a) CHECK(model.weights[0][a] == 0.0);
  CHECK(model.bias == 0.0);
}

TEST_CASE("all-abstain symmetric seed gives p = 0.5") {
  // Abstain counts match across classes for every LF, so w[i][abstain] = 0.
  std::vector<SeedExample> seed = {
      {{A, P}, 1}, {{P, A}, 1}, {{A, N}, 0}, {{N, A}, 0},
  };
  const WeakLabelModel model = fit(seed, 1.0);
  CHECK(model.bias == 0.0);
  CHECK(predict(model, {A, A}) == 0.5);
}

TEST_CASE("fit error paths") {
  CHECK_THROWS_WITH_AS(fit({}, 1.0), doctest::Contains("empty"), Error);
  CHECK_THROWS_WITH_AS(fit({{{P}, 1}, {{N}, 1}}, 1.0), doctest::Contains("single class"),
                       Error);
  // alpha = 0 with one empty cell: LF 0 never abstains under y=0
  std::vector<SeedExample> seed = {{{A}, 1}, {{P}, 1}, {{N}, 1}, {{P}, 0}, {{N}, 0}};
  CHECK_THROWS_WITH_AS(fit(seed, 0.0), doctest::Contains("LF 0"), Error);
  CHECK_THROWS_WITH_AS(fit(seed, 0.0), doctest::Contains("state abstain, class y=0"), Error);
  CHECK_THROWS_AS(fit(seed, -1.0), Error);
}

TEST_CASE("alpha = 0 works when every cell is filled") {
  std::mt19937_64 rng(7);
  std::vector<SeedExample> seed;
  // Force every (state, class) cell non-empty, then add random bulk.
  for (int label = 0; label <= 1; ++label)
    for (int a = 0; a < 3; ++a)
      seed.push_back({{static_cast<Vote>(a), static_cast<Vote>((a + 1) % 3)}, label});
  for (int i = 0; i < 60; ++i)
    seed.push_back({random_votes(rng, 2), static_cast<int>(uniform_index(rng, 2))});
  const WeakLabelModel model = fit(seed, 0.0);
  for (const auto& row : model.weights)
    for (double w : row) CHECK(std::isfinite(w));
}

TEST_CASE("one-hot identity: table lookup equals w.x + b exactly") {
  std::mt19937_64 rng(11);
  const auto seed = random_seed_set(rng, 6, 80);
  const WeakLabelModel model = fit(seed, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VoteVector votes = random_votes(rng, 6);
    const IndicatorFeatures x = indicator_features(votes);
    for (const auto& row : x)
      CHECK(row[0] + row[1] + row[2] == 1.0);  // one-hot rows
    CHECK(predict_logit(model, votes) == indicator_logit(model, x));
  }
}

TEST_CASE("predict equals brute-force smoothed posterior") {
  std::mt19937_64 rng(13);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto seed = random_seed_set(rng, 4, 50);
    const WeakLabelModel model = fit(seed, alpha);
    for (int trial = 0; trial < 100; ++trial) {
      const VoteVector votes = random_votes(rng, 4);
      const double oracle = nb_posterior_oracle(seed, alpha, votes);
      CHECK(std::abs(predict(model, votes) - oracle) < 1e-12);
    }
  }
}

TEST_CASE("monotone evidence: moving a vote to a higher-weighted state never lowers p") {
  std::mt19937_64 rng(17);
  const auto seed = random_seed_set(rng, 5, 60);
  const WeakLabelModel model = fit(seed, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    VoteVector votes = random_votes(rng, 5);
    const std::size_t i = uniform_index(rng, 5);
    const auto a = static_cast<std::size_t>(uniform_index(rng, 3));
    const auto b = static_cast<std::size_t>(uniform_index(rng, 3));
    const auto [lo, hi] =
        model.weights[i][a] <= model.weights[i][b] ? std::pair{a, b} : std::pair{b, a};
    votes[i] = static_cast<Vote>(lo);
    const double p_lo = predict(model, votes);
    votes[i] = static_cast<Vote>(hi);
    CHECK(predict(model, votes) >= p_lo);
  }
}

TEST_CASE("fit is invariant to seed permutation") {
  std::mt19937_64 rng(19);
  auto seed = random_seed_set(rng, 4, 40);
  const WeakLabelModel base = fit(seed, 1.0);
  shuffle_deterministic(seed, rng);
  const WeakLabelModel shuffled = fit(seed, 1.0);
  CHECK(base.bias == shuffled.bias);
  for (std::size_t i = 0; i < base.weights.size(); ++i)
    for (int a = 0; a < 3; ++a) CHECK(base.weights[i][a] == shuffled.weights[i][a]);
}

TEST_CASE("weighted-majority reduction with equal weight magnitudes") {
  // Hand-built model: every LF votes +c for Positive, -c for Negative, 0 for
  // abstain; b = 0.  sign(logit) must equal sign(#pos - #neg).
  WeakLabelModel model;
  model.smoothing_alpha = 1.0;
  model.class_count_0 = model.class_count_1 = 1;
  model.bias = 0.0;
  const double c = 0.75;
  model.weights.assign(7, {-c, c, 0.0});
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const VoteVector votes = random_votes(rng, 7);
    int tally = 0;
    for (Vote v : votes) tally += v == Vote::Positive ? 1 : (v == Vote::Negative ? -1 : 0);
    const double logit = predict_logit(model, votes);
    if (tally > 0) CHECK(logit > 0.0);
    if (tally < 0) CHECK(logit < 0.0);
    if (tally == 0) CHECK(logit == 0.0);
  }
}

TEST_CASE("calibration: fitted class-conditional mean p approaches the generative one") {
  // Sample votes from a known per-class conditional table, fit on a large
  // seed, and compare mean p per class against the true-posterior oracle.
  std::mt19937_64 rng(29);
  const std::size_t m = 5, n = 20000;
  const double prior1 = 0.4;
  // conditional[class][state]; states N, P, A
  const double conditional[2][3] = {{0.2, 0.6, 0.2}, {0.65, 0.15, 0.2}};
  std::vector<SeedExample> seed(n);
  for (auto& ex : seed) {
    ex.label = bernoulli(rng, prior1) ? 1 : 0;
    ex.votes.resize(m);
    for (Vote& v : ex.votes) {
      const double u = uniform01(rng);
      const auto& c = conditional[ex.label];
      v = u < c[0] ? Vote::Negative : (u < c[0] + c[1] ? Vote::Positive : Vote::Abstain);
    }
  }
  const WeakLabelModel model = fit(seed, 1.0);

  // true posterior from the exact generative quantities
  auto true_posterior = [&](const VoteVector& votes) {
    double lik0 = 1.0 - prior1, lik1 = prior1;
    for (Vote v : votes) {
      lik0 *= conditional[0][static_cast<int>(v)];
      lik1 *= conditional[1][static_cast<int>(v)];
    }
    return lik1 / (lik0 + lik1);
  };
  double mean_fit[2] = {0, 0}, mean_true[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (const auto& ex : seed) {
    mean_fit[ex.label] += predict(model, ex.votes);
    mean_true[ex.label] += true_posterior(ex.votes);
    ++count[ex.label];
  }
  for (int c = 0; c < 2; ++c)
    CHECK(std::abs(mean_fit[c] / count[c] - mean_true[c] / count[c]) < 0.02);
}

TEST_CASE("predict_batch") {
  std::mt19937_64 rng(31);
  const auto seed = random_seed_set(rng, 4, 30);
  const WeakLabelModel model = fit(seed, 1.0);

  SUBCASE("empty matrix gives empty vector") {
    CHECK(predict_batch(model, VoteMatrix{}).empty());
  }
  SUBCASE("identical rows give identical probabilities") {
    VoteMatrix votes;
    votes.lf_count = 4;
    const VoteVector row = random_votes(rng, 4);
    for (int i = 0; i < 5; ++i) {
      votes.record_ids.push_back("r" + std::to_string(i));
      votes.rows.push_back(row);
    }
    const auto out = predict_batch(model, votes);
    for (double p : out) CHECK(p == out[0]);
  }
  SUBCASE("batch equals element-wise predict on random rows") {
    VoteMatrix votes;
    votes.lf_count = 4;
    for (int i = 0; i < 100; ++i) {
      votes.record_ids.push_back("r" + std::to_string(i));
      votes.rows.push_back(random_votes(rng, 4));
    }
    const auto out = predict_batch(model, votes);
    for (std::size_t i = 0; i < votes.rows.size(); ++i)
      CHECK(out[i] == predict(model, votes.rows[i]));
  }
  SUBCASE("column mismatch is an error") {
    VoteMatrix votes;
    votes.lf_count = 3;
    votes.record_ids = {"r0"};
    votes.rows = {random_votes(rng, 3)};
    CHECK_THROWS_AS(predict_batch(model, votes), Error);
  }
}

TEST_CASE("estimate_required_samples") {
  CHECK(estimate_required_samples(0.05, 2.0) == 400);
  CHECK(estimate_required_samples(0.05, 1.96) == 385);  // 384.16 rounded up
  CHECK(estimate_required_samples(0.025, 2.0) == 1600);
  for (double e : {0.2, 0.1, 0.05, 0.025, 0.0125})
    CHECK(estimate_required_samples(e / 2.0, 2.0) == 4 * estimate_required_samples(e, 2.0));
  CHECK_THROWS_AS(estimate_required_samples(0.0, 2.0), Error);
  CHECK_THROWS_AS(estimate_required_samples(1.0, 2.0), Error);
  CHECK_THROWS_AS(estimate_required_samples(0.05, 0.0), Error);
}

TEST_CASE("evaluate_auc") {
  std::mt19937_64 rng(37);

  SUBCASE("perfect separation gives 1.0, all ties give 0.5") {
    const auto seed = random_seed_set(rng, 3, 40);
    WeakLabelModel model = fit(seed, 1.0);
    // make LF0 decisive and the others mute
    model.weights[0] = {-50.0, 50.0, 0.0};
    model.weights[1] = model.weights[2] = {0.0, 0.0, 0.0};
    model.bias = 0.0;
    std::vector<SeedExample> held = {
        {{P, A, A}, 1}, {{P, N, P}, 1}, {{N, A, A}, 0}, {{N, P, N}, 0}};
    CHECK(evaluate_auc(model, held) == 1.0);
    model.weights[0] = {0.0, 0.0, 0.0};  // now all scores tie
    CHECK(evaluate_auc(model, held) == 0.5);
  }

  SUBCASE("six scores with one inverted pair match the pairwise count") {
    WeakLabelModel model;
    model.smoothing_alpha = 1.0;
    model.class_count_0 = model.class_count_1 = 3;
    model.bias = 0.0;
    model.weights.assign(1, {-1.0, 1.0, 0.25});
    std::vector<SeedExample> held = {
        {{P}, 1}, {{P}, 1}, {{N}, 1},  // one positive scored lowest
        {{A}, 0}, {{A}, 0}, {{N}, 0},
    };
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& ex : held) {
      scores.push_back(predict(model, ex.votes));
      labels.push_back(ex.label);
    }
    const double oracle = auc_pair_oracle(scores, labels);
    CHECK(std::abs(evaluate_auc(model, held) - oracle) < 1e-12);
  }

  SUBCASE("midrank implementation equals pair oracle on random fixtures") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto seed = random_seed_set(rng, 4, 60);
      const WeakLabelModel model = fit(seed, 1.0);
      const auto held = random_seed_set(rng, 4, 50);
      std::vector<double> scores;
      std::vector<int> labels;
      for (const auto& ex : held) {
        scores.push_back(predict(model, ex.votes));
        labels.push_back(ex.label);
      }
      CHECK(std::abs(evaluate_auc(model, held) - auc_pair_oracle(scores, labels)) < 1e-12);
    }
  }

  SUBCASE("single-class input is an error") {
    const auto seed = random_seed_set(rng, 2, 20);
    const WeakLabelModel model = fit(seed, 1.0);
    std::vector<SeedExample> held = {{{P, N}, 1}, {{N, P}, 1}};
    CHECK_THROWS_AS(evaluate_auc(model, held), Error);
  }
}

TEST_CASE("model file round-trip reproduces predictions bit-for-bit") {
  std::mt19937_64 rng(41);
  const auto seed = random_seed_set(rng, 6, 70);
  const WeakLabelModel model = fit(seed, 0.5);
  TempDir dir("weak_model");
  save_weak_model(model, dir / "model.json");
  const WeakLabelModel loaded = load_weak_model(dir / "model.json");
  CHECK(loaded.lf_count() == model.lf_count());
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.smoothing_alpha == model.smoothing_alpha);
  CHECK(loaded.class_count_0 == model.class_count_0);
  CHECK(loaded.class_count_1 == model.class_count_1);
  for (int trial = 0; trial < 50; ++trial) {
    const VoteVector votes = random_votes(rng, 6);
    CHECK(predict(model, votes) == predict(loaded, votes));
  }
}

TEST_CASE("lf_agreement_matrix is symmetric with unit diagonal") {
  VoteMatrix votes;
  votes.lf_count = 3;
  votes.record_ids = {"a", "b", "c", "d"};
  votes.rows = {{P, P, A}, {N, N, A}, {P, N, A}, {A, P, A}};
  const auto agreement = lf_agreement_matrix(votes);
  CHECK(agreement[0][0] == 1.0);
  CHECK(agreement[0][1] == agreement[1][0]);
  CHECK(agreement[0][1] == doctest::Approx(2.0 / 3.0));  // a,b agree; c doesn't
  CHECK(agreement[0][2] == 1.0);  // LF2 always abstains: no co-votes
}

TEST_SUITE_END();
