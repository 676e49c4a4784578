#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "weakrank/data_model.hpp"
#include "weakrank/query_group.hpp"
#include "weakrank/ranker.hpp"

namespace weakrank {

// NDCG@k means over the three label sets: original engagement labels,
// relabeled (effective) labels, and weak-labeler output with gain 1-p.
struct EvalReport {
  int k = 0;
  double ndcg_original = 0.0;
  double ndcg_effective = 0.0;
  double ndcg_weak = 0.0;
  // engagement -> (quantile, p) pairs, nearest-rank; empty classes omitted.
  std::map<Engagement, std::vector<std::pair<double, double>>> per_engagement_quantiles;
};

// DCG discount 1/log2(rank+1) with rank starting at 1; ranks by descending
// score, ties broken by ascending record_id.  Returns 0 when IDCG is 0.
// Errors on a negative gain.
double ndcg_at_k(const QueryGroup& group, const std::vector<double>& scores,
                 const std::vector<double>& gains, int k);

EvalReport evaluate(const std::vector<QueryGroup>& groups, const RankerModel& model,
                    int k, const std::vector<double>& quantile_grid = {});

// Empirical nearest-rank quantiles of p per engagement class.
std::map<Engagement, std::vector<std::pair<double, double>>> score_quantiles(
    const std::vector<std::pair<Engagement, double>>& scored,
    const std::vector<double>& quantile_grid);

void save_eval_report(const EvalReport& report, const std::filesystem::path& json_path,
                      const std::filesystem::path& metrics_path);

}  // namespace weakrank
