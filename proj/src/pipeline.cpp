#include "weakrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"
#include "weakrank/query_group.hpp"
#include "weakrank/rng.hpp"

namespace weakrank {

using detail::ojson;

namespace {

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void read_path(const ojson& j, const char* key, const std::filesystem::path& base,
               std::filesystem::path& out, bool required) {
  if (j.contains(key)) {
    out = resolve(base, j.at(key).get<std::string>());
  } else {
    require(!required, "config: paths." + std::string(key) + " is required");
  }
}

template <class T>
void maybe(const ojson& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

LFProfile profile_from_json(const ojson& j) {
  LFProfile prof;
  prof.name = j.at("name").get<std::string>();
  prof.kind = lf_kind_from_string(j.at("kind").get<std::string>());
  maybe(j, "accuracy_relevant", prof.accuracy_relevant);
  maybe(j, "accuracy_irrelevant", prof.accuracy_irrelevant);
  maybe(j, "abstain_rate", prof.abstain_rate);
  maybe(j, "serveable", prof.serveable);
  return prof;
}

ojson profile_to_json(const LFProfile& prof) {
  ojson j;
  j["name"] = prof.name;
  j["kind"] = to_string(prof.kind);
  j["accuracy_relevant"] = prof.accuracy_relevant;
  j["accuracy_irrelevant"] = prof.accuracy_irrelevant;
  j["abstain_rate"] = prof.abstain_rate;
  j["serveable"] = prof.serveable;
  return j;
}

struct StageFiles {
  std::filesystem::path votes_seed, votes_train, votes_eval, lf_stats;
  std::filesystem::path labeler_model, labeler_report;
  std::filesystem::path train_relabeled, eval_relabeled;
  std::filesystem::path ranker_model, train_log;
  std::filesystem::path eval_report, eval_metrics;
};

StageFiles stage_files(const PipelineConfig& config) {
  const auto& out = config.paths.out_dir;
  return {out / "votes_seed.jsonl",     out / "votes_train.jsonl",
          out / "votes_eval.jsonl",     out / "lf_stats.json",
          out / "labeler_model.json",   out / "labeler_report.json",
          out / "train_relabeled.jsonl", out / "eval_relabeled.jsonl",
          out / "ranker_model.json",    out / "train_log.jsonl",
          out / "eval_report.json",     out / "eval_metrics.jsonl"};
}

std::filesystem::path require_exists(const std::filesystem::path& path,
                                     const std::string& hint) {
  require(std::filesystem::exists(path),
          "missing " + path.string() + " (" + hint + ")");
  return path;
}

// Weak-labeler scores joined to documents in flattened group order.
std::vector<double> probabilities_for(const std::vector<QueryGroup>& groups,
                                      const VoteMatrix& votes,
                                      const WeakLabelModel& model) {
  const std::vector<double> preds = predict_batch(model, votes);
  std::unordered_map<std::string, double> p_of;
  p_of.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) p_of[votes.record_ids[i]] = preds[i];
  std::vector<double> flat;
  flat.reserve(doc_count(groups));
  for (const QueryGroup& group : groups) {
    for (const DocEntry& doc : group.docs) {
      const auto it = p_of.find(doc.record_id);
      require(it != p_of.end(), "no weak-label score for record '" + doc.record_id +
                                    "' (vote matrix misaligned)");
      flat.push_back(it->second);
    }
  }
  return flat;
}

std::vector<QueryGroup> maybe_augment(const PipelineConfig& config,
                                      std::vector<QueryGroup> groups,
                                      const std::filesystem::path& votes_path) {
  if (!config.ranker.use_serveable_features) return groups;
  const auto specs = load_lf_config(config.paths.lf_config);
  const bool any = std::any_of(specs.begin(), specs.end(),
                               [](const LFSpec& s) { return s.serveable; });
  if (!any) return groups;
  const VoteMatrix votes =
      load_vote_matrix(require_exists(votes_path, "run eval-lfs first"));
  return augment_with_serveable_lfs(groups, votes, specs);
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  ojson j = detail::parse_line(read_file(path), path.string());
  const std::filesystem::path base = path.parent_path();
  PipelineConfig config;
  config.synth = default_synth_config();
  try {
    require(j.contains("paths"), "config: missing 'paths' section");
    const ojson& paths = j.at("paths");
    read_path(paths, "schema", base, config.paths.schema, true);
    read_path(paths, "seed_records", base, config.paths.seed_records, true);
    read_path(paths, "seed_labels", base, config.paths.seed_labels, true);
    read_path(paths, "train_records", base, config.paths.train_records, true);
    read_path(paths, "eval_records", base, config.paths.eval_records, true);
    read_path(paths, "taxonomy", base, config.paths.taxonomy, true);
    read_path(paths, "lf_config", base, config.paths.lf_config, true);
    read_path(paths, "out_dir", base, config.paths.out_dir, true);
    read_path(paths, "train_truth", base, config.paths.train_truth, false);
    read_path(paths, "eval_truth", base, config.paths.eval_truth, false);

    if (j.contains("weak_labeler")) {
      const ojson& w = j.at("weak_labeler");
      maybe(w, "smoothing_alpha", config.weak_labeler.smoothing_alpha);
      maybe(w, "holdout_fraction", config.weak_labeler.holdout_fraction);
      maybe(w, "split_seed", config.weak_labeler.split_seed);
    }
    if (j.contains("relabel")) {
      std::string policy = to_string(config.relabel_policy);
      maybe(j.at("relabel"), "policy", policy);
      config.relabel_policy = relabel_kind_from_string(policy);
    }
    if (j.contains("ranker")) {
      const ojson& r = j.at("ranker");
      std::string arch = to_string(config.ranker.architecture);
      maybe(r, "architecture", arch);
      config.ranker.architecture = architecture_from_string(arch);
      maybe(r, "hidden_width", config.ranker.hidden_width);
      maybe(r, "learning_rate", config.ranker.train.learning_rate);
      maybe(r, "epochs", config.ranker.train.epochs);
      maybe(r, "batch_size_groups", config.ranker.train.batch_size_groups);
      maybe(r, "momentum", config.ranker.train.momentum);
      maybe(r, "seed", config.ranker.train.seed);
      std::string source = to_string(config.ranker.train.label_source);
      maybe(r, "label_source", source);
      config.ranker.train.label_source = label_source_from_string(source);
      maybe(r, "normalize_labels", config.ranker.train.normalize_labels);
      maybe(r, "use_serveable_features", config.ranker.use_serveable_features);
    }
    if (j.contains("eval")) {
      const ojson& e = j.at("eval");
      maybe(e, "k", config.eval.k);
      maybe(e, "quantile_grid", config.eval.quantile_grid);
    }
    if (j.contains("synth")) {
      const ojson& s = j.at("synth");
      maybe(s, "train_queries", config.synth.train_queries);
      maybe(s, "eval_queries", config.synth.eval_queries);
      maybe(s, "seed_queries", config.synth.seed_queries);
      maybe(s, "docs_per_query", config.synth.docs_per_query);
      maybe(s, "seed_docs_per_query", config.synth.seed_docs_per_query);
      maybe(s, "noise_features", config.synth.noise_features);
      maybe(s, "irrelevance_rate", config.synth.irrelevance_rate);
      maybe(s, "engagement_noise", config.synth.engagement_noise);
      maybe(s, "advertised_rate", config.synth.advertised_rate);
      maybe(s, "seed", config.synth.seed);
      if (s.contains("lf_profiles")) {
        config.synth.lf_profiles.clear();
        for (const ojson& p : s.at("lf_profiles"))
          config.synth.lf_profiles.push_back(profile_from_json(p));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": malformed config: " + e.what());
  }
  require(config.eval.k >= 1, "config: eval.k must be >= 1");
  require(config.weak_labeler.holdout_fraction >= 0.0 &&
              config.weak_labeler.holdout_fraction < 1.0,
          "config: weak_labeler.holdout_fraction must lie in [0, 1)");
  return config;
}

void save_pipeline_config(const PipelineConfig& config, const std::filesystem::path& path) {
  ojson j;
  ojson paths;
  paths["schema"] = config.paths.schema.string();
  paths["seed_records"] = config.paths.seed_records.string();
  paths["seed_labels"] = config.paths.seed_labels.string();
  paths["train_records"] = config.paths.train_records.string();
  paths["eval_records"] = config.paths.eval_records.string();
  paths["taxonomy"] = config.paths.taxonomy.string();
  paths["lf_config"] = config.paths.lf_config.string();
  paths["out_dir"] = config.paths.out_dir.string();
  if (!config.paths.train_truth.empty())
    paths["train_truth"] = config.paths.train_truth.string();
  if (!config.paths.eval_truth.empty())
    paths["eval_truth"] = config.paths.eval_truth.string();
  j["paths"] = paths;
  j["weak_labeler"] = {{"smoothing_alpha", config.weak_labeler.smoothing_alpha},
                       {"holdout_fraction", config.weak_labeler.holdout_fraction},
                       {"split_seed", config.weak_labeler.split_seed}};
  j["relabel"] = {{"policy", to_string(config.relabel_policy)}};
  j["ranker"] = {{"architecture", to_string(config.ranker.architecture)},
                 {"hidden_width", config.ranker.hidden_width},
                 {"learning_rate", config.ranker.train.learning_rate},
                 {"epochs", config.ranker.train.epochs},
                 {"batch_size_groups", config.ranker.train.batch_size_groups},
                 {"momentum", config.ranker.train.momentum},
                 {"seed", config.ranker.train.seed},
                 {"label_source", to_string(config.ranker.train.label_source)},
                 {"normalize_labels", config.ranker.train.normalize_labels},
                 {"use_serveable_features", config.ranker.use_serveable_features}};
  j["eval"] = {{"k", config.eval.k}, {"quantile_grid", config.eval.quantile_grid}};
  ojson synth;
  synth["train_queries"] = config.synth.train_queries;
  synth["eval_queries"] = config.synth.eval_queries;
  synth["seed_queries"] = config.synth.seed_queries;
  synth["docs_per_query"] = config.synth.docs_per_query;
  synth["seed_docs_per_query"] = config.synth.seed_docs_per_query;
  synth["noise_features"] = config.synth.noise_features;
  synth["irrelevance_rate"] = config.synth.irrelevance_rate;
  synth["engagement_noise"] = config.synth.engagement_noise;
  synth["advertised_rate"] = config.synth.advertised_rate;
  synth["seed"] = config.synth.seed;
  ojson profiles = ojson::array();
  for (const LFProfile& prof : config.synth.lf_profiles)
    profiles.push_back(profile_to_json(prof));
  synth["lf_profiles"] = profiles;
  j["synth"] = synth;
  write_file_atomic(path, j.dump(2) + "\n");
}

void cmd_synth(const PipelineConfig& config) {
  run_stage("synth", [&] {
    const SynthCorpus corpus = generate(config.synth);
    save_schema(corpus.schema, config.paths.schema);
    save_records(corpus.seed, config.paths.seed_records);
    save_labels(corpus.seed_labels, config.paths.seed_labels);
    save_records(corpus.train, config.paths.train_records);
    save_records(corpus.eval, config.paths.eval_records);
    if (!config.paths.train_truth.empty())
      save_labels(corpus.train_truth, config.paths.train_truth);
    if (!config.paths.eval_truth.empty())
      save_labels(corpus.eval_truth, config.paths.eval_truth);
    save_taxonomy(corpus.taxonomy, config.paths.taxonomy);
    save_lf_config(corpus.lf_specs, config.paths.lf_config);
  });
}

namespace {

ojson stats_to_json(const std::vector<LFStats>& stats) {
  ojson list = ojson::array();
  for (const LFStats& s : stats) {
    ojson j;
    j["name"] = s.name;
    j["coverage"] = s.coverage;
    j["positive"] = s.positive;
    j["negative"] = s.negative;
    j["abstain"] = s.abstain;
    j["empirical_accuracy"] =
        s.empirical_accuracy ? ojson(*s.empirical_accuracy) : ojson(nullptr);
    list.push_back(j);
  }
  return list;
}

std::vector<int> aligned_labels(const VoteMatrix& votes,
                                const std::map<std::string, int>& labels,
                                const std::string& what) {
  std::vector<int> out;
  out.reserve(votes.record_ids.size());
  for (const std::string& id : votes.record_ids) {
    const auto it = labels.find(id);
    require(it != labels.end(), what + ": no label for record '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

void cmd_eval_lfs(const PipelineConfig& config) {
  run_stage("eval-lfs", [&] {
    const DatasetSchema schema = load_schema(config.paths.schema);
    const std::vector<LFSpec> specs = load_lf_config(config.paths.lf_config);
    require(static_cast<int>(specs.size()) == schema.lf_count,
            "LF config lists " + std::to_string(specs.size()) +
                " functions, schema declares " + std::to_string(schema.lf_count));

    Taxonomy taxonomy;
    for (const LFSpec& spec : specs) {
      if (spec.kind == LFKind::taxonomy_match) {
        require(std::filesystem::exists(config.paths.taxonomy),
                "taxonomy file required by LF '" + spec.name +
                    "' not found: " + config.paths.taxonomy.string());
        taxonomy = load_taxonomy(config.paths.taxonomy);
        break;
      }
    }

    const StageFiles files = stage_files(config);
    const std::map<std::string, int> seed_labels = load_labels(config.paths.seed_labels);

    ojson report;
    const struct {
      const char* name;
      const std::filesystem::path* records;
      const std::filesystem::path* votes_out;
      bool with_labels;
    } datasets[] = {
        {"seed", &config.paths.seed_records, &files.votes_seed, true},
        {"train", &config.paths.train_records, &files.votes_train, false},
        {"eval", &config.paths.eval_records, &files.votes_eval, false},
    };
    for (const auto& entry : datasets) {
      const Dataset dataset = load_records(*entry.records, schema);
      const VoteMatrix votes = eval_all(dataset, specs, taxonomy);
      save_vote_matrix(votes, *entry.votes_out);
      if (entry.with_labels) {
        const std::vector<int> labels = aligned_labels(votes, seed_labels, "seed");
        report[entry.name] = stats_to_json(compute_stats(votes, specs, &labels));
      } else {
        report[entry.name] = stats_to_json(compute_stats(votes, specs, nullptr));
      }
    }
    write_file_atomic(files.lf_stats, report.dump(2) + "\n");
  });
}

LabelerResult cmd_train_labeler(const PipelineConfig& config) {
  return run_stage("train-labeler", [&]() -> LabelerResult {
    const DatasetSchema schema = load_schema(config.paths.schema);
    const StageFiles files = stage_files(config);
    const VoteMatrix votes =
        load_vote_matrix(require_exists(files.votes_seed, "run eval-lfs first"));
    require(!votes.rows.empty(), "seed vote matrix is empty");
    require(votes.lf_count == static_cast<std::size_t>(schema.lf_count),
            "seed vote matrix has " + std::to_string(votes.lf_count) +
                " columns, schema declares " + std::to_string(schema.lf_count));

    const std::map<std::string, int> label_map = load_labels(config.paths.seed_labels);
    const std::vector<int> labels = aligned_labels(votes, label_map, "seed");
    std::vector<SeedExample> examples(votes.rows.size());
    for (std::size_t i = 0; i < votes.rows.size(); ++i)
      examples[i] = SeedExample{votes.rows[i], labels[i]};

    // deterministic 80/20-style split ahead of fitting
    std::vector<std::size_t> perm(examples.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(config.weak_labeler.split_seed);
    shuffle_deterministic(perm, rng);
    const std::size_t n_holdout = static_cast<std::size_t>(
        config.weak_labeler.holdout_fraction * static_cast<double>(examples.size()) + 0.5);
    std::vector<SeedExample> holdout, training;
    for (std::size_t i = 0; i < perm.size(); ++i)
      (i < n_holdout ? holdout : training).push_back(examples[perm[i]]);

    const WeakLabelModel model = fit(training, config.weak_labeler.smoothing_alpha);
    LabelerResult result;
    result.n_train = training.size();
    result.n_holdout = holdout.size();
    result.auc = holdout.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : evaluate_auc(model, holdout);

    save_weak_model(model, files.labeler_model);

    ojson report;
    report["auc"] = holdout.empty() ? ojson(nullptr) : ojson(result.auc);
    report["n_train"] = result.n_train;
    report["n_holdout"] = result.n_holdout;
    const std::vector<LFSpec> specs = load_lf_config(config.paths.lf_config);
    ojson names = ojson::array();
    for (const LFSpec& spec : specs) names.push_back(spec.name);
    report["lf_names"] = names;
    report["lf_agreement"] = lf_agreement_matrix(votes);
    write_file_atomic(files.labeler_report, report.dump(2) + "\n");
    return result;
  });
}

void cmd_relabel(const PipelineConfig& config) {
  run_stage("relabel", [&] {
    const DatasetSchema schema = load_schema(config.paths.schema);
    const StageFiles files = stage_files(config);
    const WeakLabelModel model =
        load_weak_model(require_exists(files.labeler_model, "run train-labeler first"));
    const RelabelPolicy policy{config.relabel_policy, schema.label_map.dismiss_value()};

    const struct {
      const std::filesystem::path* records;
      const std::filesystem::path* votes;
      const std::filesystem::path* out;
    } datasets[] = {
        {&config.paths.train_records, &files.votes_train, &files.train_relabeled},
        {&config.paths.eval_records, &files.votes_eval, &files.eval_relabeled},
    };
    for (const auto& entry : datasets) {
      const Dataset dataset = load_records(*entry.records, schema);
      const std::vector<QueryGroup> groups = build_query_groups(dataset);
      const VoteMatrix votes =
          load_vote_matrix(require_exists(*entry.votes, "run eval-lfs first"));
      const std::vector<double> probs = probabilities_for(groups, votes, model);
      const std::vector<QueryGroup> relabeled = relabel_dataset(groups, probs, policy);
      save_relabeled(dataset, relabeled, *entry.out);
    }
  });
}

void cmd_train_ranker(const PipelineConfig& config) {
  run_stage("train-ranker", [&] {
    const DatasetSchema schema = load_schema(config.paths.schema);
    const StageFiles files = stage_files(config);
    std::vector<QueryGroup> groups = load_relabeled_groups(
        require_exists(files.train_relabeled, "run relabel first"), schema);
    require(!groups.empty(), "relabeled training dataset is empty");
    groups = maybe_augment(config, std::move(groups), files.votes_train);

    const int dim = static_cast<int>(groups.front().docs.front().features.size());
    const RankerModel initial =
        init_model(config.ranker.architecture, dim, config.ranker.hidden_width,
                   config.ranker.train.seed);
    std::vector<EpochLoss> log;
    const RankerModel model = train(groups, config.ranker.train, initial, &log);
    save_ranker_model(model, files.ranker_model);
    save_train_log(log, files.train_log);
  });
}

EvalReport cmd_evaluate(const PipelineConfig& config) {
  return run_stage("evaluate", [&]() -> EvalReport {
    const DatasetSchema schema = load_schema(config.paths.schema);
    const StageFiles files = stage_files(config);
    std::vector<QueryGroup> groups = load_relabeled_groups(
        require_exists(files.eval_relabeled, "run relabel first"), schema);
    groups = maybe_augment(config, std::move(groups), files.votes_eval);
    const RankerModel model = load_ranker_model(
        require_exists(files.ranker_model, "run train-ranker first"));
    const EvalReport report =
        evaluate(groups, model, config.eval.k, config.eval.quantile_grid);
    save_eval_report(report, files.eval_report, files.eval_metrics);
    return report;
  });
}

long cmd_sample_size(double max_error, double z_alpha) {
  return run_stage("sample-size",
                   [&] { return estimate_required_samples(max_error, z_alpha); });
}

}  // namespace weakrank
