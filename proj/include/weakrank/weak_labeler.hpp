#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "weakrank/data_model.hpp"
#include "weakrank/vote.hpp"

namespace weakrank {

// Generative Naive-Bayes aggregator over LF votes.
//
//   weights[i][a] = log( P(z_i=a | y=1) / P(z_i=a | y=0) )   a in {0, 1, phi}
//   bias          = log( P(y=1) / P(y=0) )
//
// Conditionals are Laplace-smoothed over the three vote states:
//   P(z_i=a | y=c) = (count(z_i=a, y=c) + alpha) / (n_c + 3*alpha)
// so all weights are finite whenever alpha > 0.  Rows are indexed by the Vote
// enum value (Negative=0, Positive=1, Abstain=2).
struct WeakLabelModel {
  std::vector<std::array<double, 3>> weights;  // m x 3
  double bias = 0.0;
  double smoothing_alpha = 0.0;
  std::size_t class_count_0 = 0;  // seed examples with y=0
  std::size_t class_count_1 = 0;  // seed examples with y=1

  std::size_t lf_count() const { return weights.size(); }
};

// One-hot encoding x[i][a] = 1 iff z_i = a; each row sums to exactly 1.
using IndicatorFeatures = std::vector<std::array<double, 3>>;

IndicatorFeatures indicator_features(const VoteVector& votes);

// Single pass over the seed, deterministic and order-independent.
// Errors: empty or single-class seed; alpha = 0 with a zero count cell
// (the message names the LF and cell).
WeakLabelModel fit(const std::vector<SeedExample>& seed, double smoothing_alpha);

// Table-lookup log odds: bias + sum_i weights[i][votes[i]].
double predict_logit(const WeakLabelModel& model, const VoteVector& votes);

// The same value computed as w.x + b over indicator features; kept separate so
// tests can assert the two routes agree exactly.
double indicator_logit(const WeakLabelModel& model, const IndicatorFeatures& x);

// p = sigmoid(logit), numerically stable for large |logit|.
double predict(const WeakLabelModel& model, const VoteVector& votes);

// Row-wise predict; order preserved, rows scored in parallel.
std::vector<double> predict_batch(const WeakLabelModel& model, const VoteMatrix& votes);

// Samples needed to estimate an LF's rate within max_error at confidence
// z_alpha, from the worst-case Bernoulli variance 1/4:
//   n = ceil(z_alpha^2 * 0.25 / max_error^2)
long estimate_required_samples(double max_error, double z_alpha);

// Rank-based (Mann-Whitney) AUC of predicted p against labels, ties counting
// one half.  Errors if held_out lacks either class.
double evaluate_auc(const WeakLabelModel& model, const std::vector<SeedExample>& held_out);

// Diagnostic only: pairwise LF agreement over records where both vote,
// agreement[i][j] = P(votes equal | both non-abstain), NaN-free (1.0 when the
// pair never co-votes).  Never feeds back into the weights.
std::vector<std::vector<double>> lf_agreement_matrix(const VoteMatrix& votes);

WeakLabelModel load_weak_model(const std::filesystem::path& path);
void save_weak_model(const WeakLabelModel& model, const std::filesystem::path& path);

}  // namespace weakrank
