#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "weakrank/pipeline.hpp"

using namespace weakrank;

int main(int argc, char** argv) {
  CLI::App app{"weakrank: weak-supervision relabeling pipeline for listwise ranking"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted truth");
  std::uint64_t synth_seed = 0;
  add_config(synth);
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "override synth.seed");

  auto* eval_lfs =
      app.add_subcommand("eval-lfs", "run the labeling functions over all datasets");
  add_config(eval_lfs);

  auto* train_labeler =
      app.add_subcommand("train-labeler", "fit the weak labeler on the seed votes");
  double alpha = 0.0;
  add_config(train_labeler);
  auto* alpha_opt =
      train_labeler->add_option("--alpha", alpha, "override weak_labeler.smoothing_alpha");

  auto* relabel =
      app.add_subcommand("relabel", "rewrite ranking targets from weak-label scores");
  std::string policy;
  add_config(relabel);
  auto* policy_opt = relabel->add_option("--policy", policy, "override relabel policy (R1/R2/R3)");

  auto* train_ranker = app.add_subcommand("train-ranker", "train the listwise ranker");
  add_config(train_ranker);
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t ranker_seed = 0;
  std::string label_source, architecture;
  int hidden_width = 0;
  auto* epochs_opt = train_ranker->add_option("--epochs", epochs, "override ranker.epochs");
  auto* lr_opt =
      train_ranker->add_option("--learning-rate", learning_rate, "override ranker.learning_rate");
  auto* rseed_opt = train_ranker->add_option("--seed", ranker_seed, "override ranker.seed");
  auto* source_opt = train_ranker->add_option("--label-source", label_source,
                                              "override ranker.label_source (original/effective)");
  auto* arch_opt = train_ranker->add_option("--architecture", architecture,
                                            "override ranker.architecture");
  auto* width_opt =
      train_ranker->add_option("--hidden-width", hidden_width, "override ranker.hidden_width");

  auto* evaluate = app.add_subcommand("evaluate", "compute NDCG@k on the three label sets");
  add_config(evaluate);
  int k = 0;
  auto* k_opt = evaluate->add_option("--k", k, "override eval.k");

  auto* sample_size =
      app.add_subcommand("sample-size", "seed-set size for a target estimation error");
  double max_error = 0.0, z_alpha = 2.0;
  sample_size->add_option("--max-error", max_error, "target estimation error in (0, 1)")
      ->required();
  sample_size->add_option("--z", z_alpha, "confidence z value (default 2)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample_size->parsed()) {
      std::cout << cmd_sample_size(max_error, z_alpha) << "\n";
      return 0;
    }
    PipelineConfig config = load_pipeline_config(config_path);
    if (synth->parsed()) {
      if (synth_seed_opt->count()) config.synth.seed = synth_seed;
      cmd_synth(config);
      std::cout << "synthetic corpus written (seed " << config.synth.seed << ")\n";
    } else if (eval_lfs->parsed()) {
      cmd_eval_lfs(config);
      std::cout << "vote matrices and LF stats written to "
                << config.paths.out_dir.string() << "\n";
    } else if (train_labeler->parsed()) {
      if (alpha_opt->count()) config.weak_labeler.smoothing_alpha = alpha;
      const LabelerResult result = cmd_train_labeler(config);
      std::cout << "weak labeler trained on " << result.n_train << " examples; holdout ("
                << result.n_holdout << ") AUC: " << result.auc << "\n";
    } else if (relabel->parsed()) {
      if (policy_opt->count()) config.relabel_policy = relabel_kind_from_string(policy);
      cmd_relabel(config);
      std::cout << "relabeled datasets written (policy "
                << to_string(config.relabel_policy) << ")\n";
    } else if (train_ranker->parsed()) {
      if (epochs_opt->count()) config.ranker.train.epochs = epochs;
      if (lr_opt->count()) config.ranker.train.learning_rate = learning_rate;
      if (rseed_opt->count()) config.ranker.train.seed = ranker_seed;
      if (source_opt->count())
        config.ranker.train.label_source = label_source_from_string(label_source);
      if (arch_opt->count())
        config.ranker.architecture = architecture_from_string(architecture);
      if (width_opt->count()) config.ranker.hidden_width = hidden_width;
      cmd_train_ranker(config);
      std::cout << "ranker model and training log written\n";
    } else if (evaluate->parsed()) {
      if (k_opt->count()) config.eval.k = k;
      const EvalReport report = cmd_evaluate(config);
      std::cout << "NDCG@" << report.k << " original:  " << report.ndcg_original << "\n"
                << "NDCG@" << report.k << " effective: " << report.ndcg_effective << "\n"
                << "NDCG@" << report.k << " weak:      " << report.ndcg_weak << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
