#pragma once

#include <string>
#include <vector>

#include "weakrank/data_model.hpp"
#include "weakrank/query_group.hpp"

namespace weakrank {

enum class RelabelKind { R1, R2, R3 };

std::string to_string(RelabelKind k);
RelabelKind relabel_kind_from_string(const std::string& s);

// R1: y_p = y_dismiss.  R2: y_p = 0.  R3: y_p = y_dismiss for organic records,
// p forced to 0 for advertised ones.
struct RelabelPolicy {
  RelabelKind kind = RelabelKind::R1;
  double y_dismiss = 0.0;
};

// y_effective = (1-p) * y_original + p * y_p, with p already policy-overridden,
// so the stored p always satisfies the mixing identity.
struct RelabeledTarget {
  double y_original = 0.0;
  double p = 0.0;
  double y_effective = 0.0;
};

RelabeledTarget relabel(bool advertised, double y, double p, const RelabelPolicy& policy);
RelabeledTarget relabel(const QueryDocRecord& record, double y, double p,
                        const RelabelPolicy& policy);

// Rewrites every document target from the aligned probability vector
// (flattened group order).  Structure, order and features are untouched.
// Errors on length mismatch.
std::vector<QueryGroup> relabel_dataset(const std::vector<QueryGroup>& groups,
                                        const std::vector<double>& probabilities,
                                        const RelabelPolicy& policy);

}  // namespace weakrank
