#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "weakrank/common.hpp"
#include "weakrank/evaluator.hpp"
#include "weakrank/ranker.hpp"
#include "weakrank/relabeler.hpp"
#include "weakrank/synthgen.hpp"
#include "weakrank/weak_labeler.hpp"

namespace weakrank {

// Module errors surfaced by a subcommand, tagged with the stage that failed.
struct StageError : Error {
  StageError(const std::string& stage, const std::string& msg)
      : Error("[" + stage + "] " + msg), stage(stage) {}
  std::string stage;
};

struct PipelinePaths {
  std::filesystem::path schema;
  std::filesystem::path seed_records;
  std::filesystem::path seed_labels;
  std::filesystem::path train_records;
  std::filesystem::path eval_records;
  std::filesystem::path train_truth;  // written by synth only
  std::filesystem::path eval_truth;
  std::filesystem::path taxonomy;
  std::filesystem::path lf_config;
  std::filesystem::path out_dir;
};

struct WeakLabelerConfig {
  double smoothing_alpha = 1.0;
  double holdout_fraction = 0.2;
  std::uint64_t split_seed = 7;
};

struct RankerStageConfig {
  Architecture architecture = Architecture::linear;
  int hidden_width = 32;
  TrainConfig train;
  bool use_serveable_features = true;
};

struct EvalConfig {
  int k = 10;
  std::vector<double> quantile_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

// Single config file driving every stage; stages communicate only through the
// files named here.  Relative paths resolve against the config file location.
struct PipelineConfig {
  PipelinePaths paths;
  WeakLabelerConfig weak_labeler;
  RelabelKind relabel_policy = RelabelKind::R1;
  RankerStageConfig ranker;
  EvalConfig eval;
  SynthConfig synth;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const PipelineConfig& config, const std::filesystem::path& path);

// Stage outputs, all under paths.out_dir with fixed names:
//   votes_seed.jsonl votes_train.jsonl votes_eval.jsonl lf_stats.json
//   labeler_model.json labeler_report.json
//   train_relabeled.jsonl eval_relabeled.jsonl
//   ranker_model.json train_log.jsonl
//   eval_report.json eval_metrics.jsonl
// Every write is atomic (temp file + rename); reruns with identical inputs
// produce byte-identical outputs.

void cmd_synth(const PipelineConfig& config);
void cmd_eval_lfs(const PipelineConfig& config);

struct LabelerResult {
  double auc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_holdout = 0;
};
LabelerResult cmd_train_labeler(const PipelineConfig& config);

void cmd_relabel(const PipelineConfig& config);
void cmd_train_ranker(const PipelineConfig& config);
EvalReport cmd_evaluate(const PipelineConfig& config);

long cmd_sample_size(double max_error, double z_alpha);

}  // namespace weakrank
