#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "weakrank/lf_engine.hpp"
#include "weakrank/query_group.hpp"
#include "weakrank/vote.hpp"

namespace weakrank {

enum class Architecture { linear, one_hidden_layer };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

// Listwise scorer.  Parameter layout:
//   linear:           [w (dim), b]
//   one_hidden_layer: [W1 (hidden x dim, row-major), b1 (hidden),
//                      w2 (hidden), b2], rectifier activation.
struct RankerModel {
  Architecture architecture = Architecture::linear;
  int hidden_width = 0;  // one_hidden_layer only
  int feature_dim = 0;
  std::vector<double> parameters;

  std::size_t parameter_count() const;
};

enum class LabelSource { original, effective };

std::string to_string(LabelSource s);
LabelSource label_source_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  int batch_size_groups = 16;
  double momentum = 0.0;
  std::uint64_t seed = 1;
  LabelSource label_source = LabelSource::effective;
  // Divide each group's labels by their sum before the loss (the original
  // ListNet convention); off by default, matching the raw-label form.
  bool normalize_labels = false;
};

RankerModel init_model(Architecture arch, int feature_dim, int hidden_width,
                       std::uint64_t seed);

double score(const RankerModel& model, const std::vector<double>& features);

// Listwise softmax cross entropy over query groups:
//   L = -(1/q) sum_i sum_j y_ij * log( exp(s_ij) / sum_k exp(s_ik) )
// with per-group max subtraction.  Single-document groups contribute 0.
double listnet_loss(const std::vector<QueryGroup>& groups, const RankerModel& model,
                    LabelSource source, bool normalize_labels = false);

// Analytic gradient of listnet_loss with respect to all parameters.
std::vector<double> loss_gradient(const std::vector<QueryGroup>& groups,
                                  const RankerModel& model, LabelSource source,
                                  bool normalize_labels = false);

struct EpochLoss {
  int epoch = 0;  // 0 = before any update
  double loss = 0.0;
};

// Mini-batch gradient descent; the batch unit is the query group.  A fixed
// seed fixes the shuffle and initialization, giving a bit-reproducible
// parameter trajectory.  Aborts on a non-finite loss.
RankerModel train(const std::vector<QueryGroup>& groups, const TrainConfig& config,
                  const std::optional<RankerModel>& initial = std::nullopt,
                  std::vector<EpochLoss>* log = nullptr);

// Appends one feature per serveable LF: Positive -> 1, Negative -> 0,
// Abstain -> 0.5.  Votes are joined to docs by record_id; a missing id is a
// misalignment error.
std::vector<QueryGroup> augment_with_serveable_lfs(const std::vector<QueryGroup>& groups,
                                                   const VoteMatrix& votes,
                                                   const std::vector<LFSpec>& specs);

RankerModel load_ranker_model(const std::filesystem::path& path);
void save_ranker_model(const RankerModel& model, const std::filesystem::path& path);

void save_train_log(const std::vector<EpochLoss>& log, const std::filesystem::path& path);

}  // namespace weakrank
