#include "weakrank/weak_labeler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"
#include "weakrank/parallel.hpp"

namespace weakrank {

using detail::ojson;

namespace {

const char* kStateNames[3] = {"negative", "positive", "abstain"};

double stable_sigmoid(double logit) {
  if (logit >= 0.0) {
    const double e = std::exp(-logit);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

}  // namespace

IndicatorFeatures indicator_features(const VoteVector& votes) {
  IndicatorFeatures x(votes.size(), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < votes.size(); ++i)
    x[i][static_cast<std::size_t>(votes[i])] = 1.0;
  return x;
}

WeakLabelModel fit(const std::vector<SeedExample>& seed, double smoothing_alpha) {
  require(!seed.empty(), "fit: seed dataset is empty");
  require(smoothing_alpha >= 0.0, "fit: smoothing_alpha must be >= 0");
  const std::size_t m = seed.front().votes.size();
  require(m > 0, "fit: seed examples carry no votes");

  // counts[i][a][c] = #{examples with z_i = a and y = c}
  std::vector<std::array<std::array<std::size_t, 2>, 3>> counts(
      m, {{{0, 0}, {0, 0}, {0, 0}}});
  std::size_t n_class[2] = {0, 0};
  for (const SeedExample& ex : seed) {
    require(ex.votes.size() == m, "fit: inconsistent vote vector length");
    require(ex.label == 0 || ex.label == 1, "fit: seed label must be 0 or 1");
    ++n_class[ex.label];
    for (std::size_t i = 0; i < m; ++i)
      ++counts[i][static_cast<std::size_t>(ex.votes[i])][ex.label];
  }
  require(n_class[0] > 0 && n_class[1] > 0,
          "fit: seed set contains a single class; the bias is undefined");

  WeakLabelModel model;
  model.smoothing_alpha = smoothing_alpha;
  model.class_count_0 = n_class[0];
  model.class_count_1 = n_class[1];
  model.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (smoothing_alpha == 0.0) {
        for (std::size_t c = 0; c < 2; ++c)
          require(counts[i][a][c] > 0,
                  "fit: zero count for LF " + std::to_string(i) + ", state " +
                      kStateNames[a] + ", class y=" + std::to_string(c) +
                      " with smoothing_alpha=0");
      }
      const double p1 = (static_cast<double>(counts[i][a][1]) + smoothing_alpha) /
                        (static_cast<double>(n_class[1]) + 3.0 * smoothing_alpha);
      const double p0 = (static_cast<double>(counts[i][a][0]) + smoothing_alpha) /
                        (static_cast<double>(n_class[0]) + 3.0 * smoothing_alpha);
      model.weights[i][a] = std::log(p1 / p0);
    }
  }
  model.bias = std::log(static_cast<double>(n_class[1]) / static_cast<double>(n_class[0]));
  return model;
}

double predict_logit(const WeakLabelModel& model, const VoteVector& votes) {
  require(votes.size() == model.lf_count(),
          "predict: vote vector length " + std::to_string(votes.size()) +
              " does not match model LF count " + std::to_string(model.lf_count()));
  double logit = model.bias;
  for (std::size_t i = 0; i < votes.size(); ++i)
    logit += model.weights[i][static_cast<std::size_t>(votes[i])];
  return logit;
}

double indicator_logit(const WeakLabelModel& model, const IndicatorFeatures& x) {
  require(x.size() == model.lf_count(),
          "indicator_logit: feature rows do not match model LF count");
  double logit = model.bias;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t a = 0; a < 3; ++a) logit += model.weights[i][a] * x[i][a];
  return logit;
}

double predict(const WeakLabelModel& model, const VoteVector& votes) {
  return stable_sigmoid(predict_logit(model, votes));
}

std::vector<double> predict_batch(const WeakLabelModel& model, const VoteMatrix& votes) {
  if (votes.rows.empty()) return {};
  require(votes.lf_count == model.lf_count(),
          "predict_batch: matrix has " + std::to_string(votes.lf_count) +
              " columns, model expects " + std::to_string(model.lf_count()));
  std::vector<double> out(votes.rows.size());
  parallel_for(votes.rows.size(),
               [&](std::size_t i) { out[i] = predict(model, votes.rows[i]); });
  return out;
}

long estimate_required_samples(double max_error, double z_alpha) {
  require(max_error > 0.0 && max_error < 1.0, "max_error must lie in (0, 1)");
  require(z_alpha > 0.0, "z_alpha must be positive");
  // worst-case Bernoulli variance p(1-p) <= 1/4
  return static_cast<long>(std::ceil(z_alpha * z_alpha * 0.25 / (max_error * max_error)));
}

double evaluate_auc(const WeakLabelModel& model, const std::vector<SeedExample>& held_out) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(held_out.size());
  std::size_t n_pos = 0, n_neg = 0;
  for (const SeedExample& ex : held_out) {
    require(ex.label == 0 || ex.label == 1, "evaluate_auc: label must be 0 or 1");
    scored.emplace_back(predict(model, ex.votes), ex.label);
    (ex.label == 1 ? n_pos : n_neg) += 1;
  }
  require(n_pos > 0 && n_neg > 0, "evaluate_auc: held-out set contains a single class");

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Mann-Whitney via midranks over tie runs.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t)
      if (scored[t].second == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<std::vector<double>> lf_agreement_matrix(const VoteMatrix& votes) {
  const std::size_t m = votes.lf_count;
  std::vector<std::vector<double>> agreement(m, std::vector<double>(m, 1.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      std::size_t both = 0, equal = 0;
      for (const VoteVector& row : votes.rows) {
        if (row[a] == Vote::Abstain || row[b] == Vote::Abstain) continue;
        ++both;
        if (row[a] == row[b]) ++equal;
      }
      const double value =
          both == 0 ? 1.0 : static_cast<double>(equal) / static_cast<double>(both);
      agreement[a][b] = agreement[b][a] = value;
    }
  }
  return agreement;
}

WeakLabelModel load_weak_model(const std::filesystem::path& path) {
  ojson j = detail::parse_line(read_file(path), path.string());
  WeakLabelModel model;
  try {
    const std::size_t m = j.at("lf_count").get<std::size_t>();
    model.smoothing_alpha = j.at("smoothing_alpha").get<double>();
    model.class_count_0 = j.at("class_counts")[0].get<std::size_t>();
    model.class_count_1 = j.at("class_counts")[1].get<std::size_t>();
    model.bias = j.at("bias").get<double>();
    for (const ojson& row : j.at("weights")) {
      require(row.is_array() && row.size() == 3,
              path.string() + ": each weight row must have 3 entries");
      model.weights.push_back(
          {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    require(model.weights.size() == m,
            path.string() + ": weight rows do not match lf_count");
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": malformed weak-label model: " + e.what());
  }
  return model;
}

void save_weak_model(const WeakLabelModel& model, const std::filesystem::path& path) {
  ojson j;
  j["lf_count"] = model.lf_count();
  j["smoothing_alpha"] = model.smoothing_alpha;
  j["class_counts"] = {model.class_count_0, model.class_count_1};
  j["bias"] = model.bias;
  j["weight_states"] = {kStateNames[0], kStateNames[1], kStateNames[2]};
  ojson rows = ojson::array();
  for (const auto& w : model.weights) rows.push_back({w[0], w[1], w[2]});
  j["weights"] = rows;
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace weakrank
