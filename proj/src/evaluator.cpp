#include "weakrank/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "json_codec.hpp"
#include "weakrank/common.hpp"
#include "weakrank/io_util.hpp"

namespace weakrank {

using detail::ojson;

double ndcg_at_k(const QueryGroup& group, const std::vector<double>& scores,
                 const std::vector<double>& gains, int k) {
  const std::size_t n = group.docs.size();
  require(scores.size() == n && gains.size() == n,
          "ndcg: scores/gains not aligned with group '" + group.query_id + "'");
  require(k >= 1, "ndcg: k must be >= 1");
  for (double g : gains) require(g >= 0.0, "ndcg: negative gain");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return group.docs[a].record_id < group.docs[b].record_id;
  });

  std::vector<double> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  const std::size_t cut = std::min(static_cast<std::size_t>(k), n);
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t r = 1; r <= cut; ++r) {
    const double discount = std::log2(static_cast<double>(r) + 1.0);
    dcg += gains[order[r - 1]] / discount;
    idcg += ideal[r - 1] / discount;
  }
  return idcg == 0.0 ? 0.0 : dcg / idcg;
}

EvalReport evaluate(const std::vector<QueryGroup>& groups, const RankerModel& model,
                    int k, const std::vector<double>& quantile_grid) {
  require(!groups.empty(), "evaluate: empty dataset");
  EvalReport report;
  report.k = k;
  std::vector<double> scores, gains;
  std::vector<std::pair<Engagement, double>> scored_p;
  for (const QueryGroup& group : groups) {
    const std::size_t n = group.docs.size();
    scores.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      scores[j] = score(model, group.docs[j].features);

    gains.resize(n);
    for (std::size_t j = 0; j < n; ++j) gains[j] = group.docs[j].y_original;
    report.ndcg_original += ndcg_at_k(group, scores, gains, k);
    for (std::size_t j = 0; j < n; ++j) gains[j] = group.docs[j].y_effective;
    report.ndcg_effective += ndcg_at_k(group, scores, gains, k);
    for (std::size_t j = 0; j < n; ++j) gains[j] = 1.0 - group.docs[j].p;
    report.ndcg_weak += ndcg_at_k(group, scores, gains, k);

    for (const DocEntry& doc : group.docs)
      scored_p.emplace_back(doc.engagement, doc.p);
  }
  const double q = static_cast<double>(groups.size());
  report.ndcg_original /= q;
  report.ndcg_effective /= q;
  report.ndcg_weak /= q;
  if (!quantile_grid.empty())
    report.per_engagement_quantiles = score_quantiles(scored_p, quantile_grid);
  return report;
}

std::map<Engagement, std::vector<std::pair<double, double>>> score_quantiles(
    const std::vector<std::pair<Engagement, double>>& scored,
    const std::vector<double>& quantile_grid) {
  for (double q : quantile_grid)
    require(q >= 0.0 && q <= 1.0, "score_quantiles: quantile outside [0, 1]");
  std::map<Engagement, std::vector<double>> by_class;
  for (const auto& [engagement, p] : scored) by_class[engagement].push_back(p);

  std::map<Engagement, std::vector<std::pair<double, double>>> out;
  for (auto& [engagement, values] : by_class) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<std::pair<double, double>> quantiles;
    quantiles.reserve(quantile_grid.size());
    for (double q : quantile_grid) {
      // nearest rank; the epsilon keeps exact multiples from rounding up
      std::size_t h = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
      if (h < 1) h = 1;
      if (h > values.size()) h = values.size();
      quantiles.emplace_back(q, values[h - 1]);
    }
    out.emplace(engagement, std::move(quantiles));
  }
  return out;
}

void save_eval_report(const EvalReport& report, const std::filesystem::path& json_path,
                      const std::filesystem::path& metrics_path) {
  ojson j;
  j["k"] = report.k;
  j["ndcg_original"] = report.ndcg_original;
  j["ndcg_effective"] = report.ndcg_effective;
  j["ndcg_weak"] = report.ndcg_weak;
  ojson quantiles = ojson::object();
  for (const auto& [engagement, pairs] : report.per_engagement_quantiles) {
    ojson list = ojson::array();
    for (const auto& [q, p] : pairs) list.push_back({q, p});
    quantiles[to_string(engagement)] = list;
  }
  j["per_engagement_quantiles"] = quantiles;
  write_file_atomic(json_path, j.dump(2) + "\n");

  std::string lines;
  for (const char* name : {"ndcg_original", "ndcg_effective", "ndcg_weak"}) {
    ojson row;
    row["metric"] = name;
    row["k"] = report.k;
    row["value"] = j[name];
    lines += row.dump() + "\n";
  }
  for (const auto& [engagement, pairs] : report.per_engagement_quantiles) {
    for (const auto& [q, p] : pairs) {
      ojson row;
      row["metric"] = "p_quantile";
      row["engagement"] = to_string(engagement);
      row["quantile"] = q;
      row["value"] = p;
      lines += row.dump() + "\n";
    }
  }
  write_file_atomic(metrics_path, lines);
}

}  // namespace weakrank
