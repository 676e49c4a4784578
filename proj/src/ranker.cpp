#include "weakrank/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"
#include "weakrank/rng.hpp"

namespace weakrank {

using detail::ojson;

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::linear: return "linear";
    case Architecture::one_hidden_layer: return "one_hidden_layer";
  }
  fail("invalid architecture value");
}

Architecture architecture_from_string(const std::string& s) {
  for (Architecture a : {Architecture::linear, Architecture::one_hidden_layer})
    if (s == to_string(a)) return a;
  fail("unknown architecture '" + s + "'");
}

std::string to_string(LabelSource s) {
  return s == LabelSource::original ? "original" : "effective";
}

LabelSource label_source_from_string(const std::string& s) {
  if (s == "original") return LabelSource::original;
  if (s == "effective") return LabelSource::effective;
  fail("unknown label source '" + s + "'");
}

std::size_t RankerModel::parameter_count() const {
  const std::size_t d = static_cast<std::size_t>(feature_dim);
  if (architecture == Architecture::linear) return d + 1;
  const std::size_t h = static_cast<std::size_t>(hidden_width);
  return h * d + 2 * h + 1;
}

RankerModel init_model(Architecture arch, int feature_dim, int hidden_width,
                       std::uint64_t seed) {
  require(feature_dim >= 1, "init_model: feature_dim must be >= 1");
  RankerModel model;
  model.architecture = arch;
  model.feature_dim = feature_dim;
  std::mt19937_64 rng(seed);
  if (arch == Architecture::linear) {
    model.hidden_width = 0;
    const double s = 1.0 / std::sqrt(static_cast<double>(feature_dim));
    model.parameters.resize(model.parameter_count());
    for (double& p : model.parameters) p = uniform(rng, -s, s);
  } else {
    require(hidden_width >= 1, "init_model: hidden_width must be >= 1");
    model.hidden_width = hidden_width;
    model.parameters.resize(model.parameter_count());
    const std::size_t d = static_cast<std::size_t>(feature_dim);
    const std::size_t h = static_cast<std::size_t>(hidden_width);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(feature_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_width));
    // layout: W1 (h x d row-major), b1 (h), w2 (h), b2
    for (std::size_t k = 0; k < h * d + h; ++k) model.parameters[k] = uniform(rng, -s1, s1);
    for (std::size_t k = h * d + h; k < h * d + 2 * h + 1; ++k)
      model.parameters[k] = uniform(rng, -s2, s2);
  }
  return model;
}

namespace {

double forward(const RankerModel& model, const std::vector<double>& x,
               std::vector<double>* preact) {
  const std::size_t d = static_cast<std::size_t>(model.feature_dim);
  const auto& P = model.parameters;
  if (model.architecture == Architecture::linear) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += P[k] * x[k];
    return s + P[d];
  }
  const std::size_t h = static_cast<std::size_t>(model.hidden_width);
  const double* W1 = P.data();
  const double* b1 = P.data() + h * d;
  const double* w2 = P.data() + h * d + h;
  const double b2 = P[h * d + 2 * h];
  if (preact) preact->resize(h);
  double s = b2;
  for (std::size_t u = 0; u < h; ++u) {
    double a = b1[u];
    const double* row = W1 + u * d;
    for (std::size_t k = 0; k < d; ++k) a += row[k] * x[k];
    if (preact) (*preact)[u] = a;
    s += w2[u] * (a > 0.0 ? a : 0.0);
  }
  return s;
}

// Adds dscore * d(score)/d(theta) for one document into grad.
void accumulate_score_gradient(const RankerModel& model, const std::vector<double>& x,
                               const std::vector<double>& preact, double dscore,
                               std::vector<double>& grad) {
  const std::size_t d = static_cast<std::size_t>(model.feature_dim);
  if (model.architecture == Architecture::linear) {
    for (std::size_t k = 0; k < d; ++k) grad[k] += dscore * x[k];
    grad[d] += dscore;
    return;
  }
  const std::size_t h = static_cast<std::size_t>(model.hidden_width);
  const double* w2 = model.parameters.data() + h * d + h;
  for (std::size_t u = 0; u < h; ++u) {
    const double act = preact[u] > 0.0 ? preact[u] : 0.0;
    grad[h * d + h + u] += dscore * act;  // w2
    if (preact[u] > 0.0) {
      const double da = dscore * w2[u];
      double* gW1 = grad.data() + u * d;
      for (std::size_t k = 0; k < d; ++k) gW1[k] += da * x[k];
      grad[h * d + u] += da;  // b1
    }
  }
  grad[h * d + 2 * h] += dscore;  // b2
}

double doc_label(const DocEntry& doc, LabelSource source) {
  return source == LabelSource::original ? doc.y_original : doc.y_effective;
}

// Loss over the selected groups; accumulates the analytic gradient when grad
// is non-null.  The 1/q normalizer counts the selected groups only, so a
// mini-batch is treated as its own dataset.
double loss_over(const std::vector<QueryGroup>& groups,
                 const std::vector<std::size_t>& indices, const RankerModel& model,
                 LabelSource source, bool normalize_labels, std::vector<double>* grad) {
  if (indices.empty()) return 0.0;
  const double q = static_cast<double>(indices.size());
  double loss = 0.0;
  std::vector<double> scores, labels, softmax, preact;
  std::vector<std::vector<double>> preacts;
  for (std::size_t gi : indices) {
    const QueryGroup& group = groups[gi];
    const std::size_t n = group.docs.size();
    require(n >= 1, "listnet: empty query group '" + group.query_id + "'");
    scores.resize(n);
    labels.resize(n);
    if (grad) preacts.resize(n);
    double label_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const DocEntry& doc = group.docs[j];
      require(doc.features.size() == static_cast<std::size_t>(model.feature_dim),
              "listnet: document '" + doc.record_id + "' has " +
                  std::to_string(doc.features.size()) + " features, model expects " +
                  std::to_string(model.feature_dim));
      scores[j] = forward(model, doc.features, grad ? &preact : nullptr);
      if (grad) preacts[j] = preact;
      labels[j] = doc_label(doc, source);
      label_sum += labels[j];
    }
    if (normalize_labels && label_sum > 0.0)
      for (double& y : labels) y /= label_sum;

    const double max_score = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - max_score);
    const double log_z = max_score + std::log(z);

    double y_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      loss += labels[j] * (log_z - scores[j]);
      y_total += labels[j];
    }
    if (grad) {
      for (std::size_t j = 0; j < n; ++j) {
        const double sm = std::exp(scores[j] - max_score) / z;
        const double dscore = (y_total * sm - labels[j]) / q;
        accumulate_score_gradient(model, group.docs[j].features, preacts[j], dscore,
                                  *grad);
      }
    }
  }
  return loss / q;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

double score(const RankerModel& model, const std::vector<double>& features) {
  require(features.size() == static_cast<std::size_t>(model.feature_dim),
          "score: got " + std::to_string(features.size()) +
              " features, model expects " + std::to_string(model.feature_dim));
  require(model.parameters.size() == model.parameter_count(),
          "score: parameter vector size does not match architecture");
  return forward(model, features, nullptr);
}

double listnet_loss(const std::vector<QueryGroup>& groups, const RankerModel& model,
                    LabelSource source, bool normalize_labels) {
  return loss_over(groups, all_indices(groups.size()), model, source, normalize_labels,
                   nullptr);
}

std::vector<double> loss_gradient(const std::vector<QueryGroup>& groups,
                                  const RankerModel& model, LabelSource source,
                                  bool normalize_labels) {
  std::vector<double> grad(model.parameter_count(), 0.0);
  loss_over(groups, all_indices(groups.size()), model, source, normalize_labels, &grad);
  return grad;
}

RankerModel train(const std::vector<QueryGroup>& groups, const TrainConfig& config,
                  const std::optional<RankerModel>& initial, std::vector<EpochLoss>* log) {
  require(!groups.empty(), "train: empty training set");
  require(config.learning_rate > 0.0, "train: learning_rate must be positive");
  require(config.epochs >= 0, "train: epochs must be >= 0");
  require(config.batch_size_groups >= 1, "train: batch_size_groups must be >= 1");
  require(config.momentum >= 0.0, "train: momentum must be >= 0");

  const std::size_t dim = groups.front().docs.empty() ? 0 : groups.front().docs[0].features.size();
  RankerModel model = initial ? *initial
                              : init_model(Architecture::linear, static_cast<int>(dim), 0,
                                           config.seed);
  require(model.parameters.size() == model.parameter_count(),
          "train: initial model parameter vector does not match its architecture");

  std::mt19937_64 rng(config.seed);
  double loss = listnet_loss(groups, model, config.label_source, config.normalize_labels);
  require(std::isfinite(loss), "train: non-finite loss before first update");
  if (log) log->push_back({0, loss});

  std::vector<std::size_t> order = all_indices(groups.size());
  std::vector<double> velocity(model.parameters.size(), 0.0);
  std::vector<double> grad(model.parameters.size());
  const std::size_t batch = static_cast<std::size_t>(config.batch_size_groups);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_deterministic(order, rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(start + batch, order.size());
      const std::vector<std::size_t> slice(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
      std::fill(grad.begin(), grad.end(), 0.0);
      loss_over(groups, slice, model, config.label_source, config.normalize_labels, &grad);
      for (std::size_t k = 0; k < model.parameters.size(); ++k) {
        velocity[k] = config.momentum * velocity[k] + grad[k];
        model.parameters[k] -= config.learning_rate * velocity[k];
      }
    }
    loss = listnet_loss(groups, model, config.label_source, config.normalize_labels);
    if (!std::isfinite(loss))
      fail("train: non-finite loss at epoch " + std::to_string(epoch) +
           " (diverged; reduce the learning rate)");
    if (log) log->push_back({epoch, loss});
  }
  return model;
}

std::vector<QueryGroup> augment_with_serveable_lfs(const std::vector<QueryGroup>& groups,
                                                   const VoteMatrix& votes,
                                                   const std::vector<LFSpec>& specs) {
  std::vector<std::size_t> serveable;
  for (std::size_t j = 0; j < specs.size(); ++j)
    if (specs[j].serveable) serveable.push_back(j);
  if (serveable.empty()) return groups;

  require(votes.lf_count == specs.size(),
          "augment: vote matrix has " + std::to_string(votes.lf_count) +
              " columns for " + std::to_string(specs.size()) + " LF specs");
  std::unordered_map<std::string, std::size_t> row_of;
  row_of.reserve(votes.record_ids.size());
  for (std::size_t i = 0; i < votes.record_ids.size(); ++i)
    require(row_of.emplace(votes.record_ids[i], i).second,
            "augment: duplicate record_id '" + votes.record_ids[i] + "' in vote matrix");

  std::vector<QueryGroup> out = groups;
  for (QueryGroup& group : out) {
    for (DocEntry& doc : group.docs) {
      const auto it = row_of.find(doc.record_id);
      require(it != row_of.end(), "augment: no votes for record '" + doc.record_id +
                                      "' (vote matrix misaligned)");
      const VoteVector& row = votes.rows[it->second];
      for (std::size_t j : serveable) {
        double encoded = 0.5;  // abstain sits between the two polarities
        if (row[j] == Vote::Positive) encoded = 1.0;
        if (row[j] == Vote::Negative) encoded = 0.0;
        doc.features.push_back(encoded);
      }
    }
  }
  return out;
}

RankerModel load_ranker_model(const std::filesystem::path& path) {
  ojson j = detail::parse_line(read_file(path), path.string());
  RankerModel model;
  try {
    model.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    model.hidden_width = j.at("hidden_width").get<int>();
    model.feature_dim = j.at("feature_dim").get<int>();
    model.parameters = j.at("parameters").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": malformed ranker model: " + e.what());
  }
  require(model.parameters.size() == model.parameter_count(),
          path.string() + ": parameter count does not match architecture");
  return model;
}

void save_ranker_model(const RankerModel& model, const std::filesystem::path& path) {
  ojson j;
  j["architecture"] = to_string(model.architecture);
  j["hidden_width"] = model.hidden_width;
  j["feature_dim"] = model.feature_dim;
  j["parameters"] = model.parameters;
  write_file_atomic(path, j.dump(2) + "\n");
}

void save_train_log(const std::vector<EpochLoss>& log, const std::filesystem::path& path) {
  std::string out;
  for (const EpochLoss& e : log) {
    ojson j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace weakrank
