#include "weakrank/relabeler.hpp"

#include "weakrank/common.hpp"

namespace weakrank {

std::string to_string(RelabelKind k) {
  switch (k) {
    case RelabelKind::R1: return "R1";
    case RelabelKind::R2: return "R2";
    case RelabelKind::R3: return "R3";
  }
  fail("invalid relabel kind value");
}

RelabelKind relabel_kind_from_string(const std::string& s) {
  for (RelabelKind k : {RelabelKind::R1, RelabelKind::R2, RelabelKind::R3})
    if (s == to_string(k)) return k;
  fail("unknown relabel policy '" + s + "'");
}

RelabeledTarget relabel(bool advertised, double y, double p, const RelabelPolicy& policy) {
  require(p >= 0.0 && p <= 1.0, "relabel: p outside [0, 1]");
  double y_p = 0.0;
  switch (policy.kind) {
    case RelabelKind::R1:
      y_p = policy.y_dismiss;
      break;
    case RelabelKind::R2:
      y_p = 0.0;
      break;
    case RelabelKind::R3:
      y_p = policy.y_dismiss;
      if (advertised) p = 0.0;
      break;
  }
  RelabeledTarget target;
  target.y_original = y;
  target.p = p;
  target.y_effective = (1.0 - p) * y + p * y_p;
  return target;
}

RelabeledTarget relabel(const QueryDocRecord& record, double y, double p,
                        const RelabelPolicy& policy) {
  return relabel(record.advertised, y, p, policy);
}

std::vector<QueryGroup> relabel_dataset(const std::vector<QueryGroup>& groups,
                                        const std::vector<double>& probabilities,
                                        const RelabelPolicy& policy) {
  require(probabilities.size() == doc_count(groups),
          "relabel_dataset: " + std::to_string(probabilities.size()) +
              " probabilities for " + std::to_string(doc_count(groups)) + " documents");
  std::vector<QueryGroup> out = groups;
  std::size_t flat = 0;
  for (QueryGroup& group : out) {
    for (DocEntry& doc : group.docs) {
      const RelabeledTarget target =
          relabel(doc.advertised, doc.y_original, probabilities[flat++], policy);
      doc.p = target.p;
      doc.y_effective = target.y_effective;
    }
  }
  return out;
}

}  // namespace weakrank
