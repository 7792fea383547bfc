#ifndef COMBOPT_CHOI_HPP
#define COMBOPT_CHOI_HPP

#include <functional>
#include <vector>

#include "combopt/labeled_operator.hpp"

namespace combopt {

// Choi operator of a map from the `in` labels to the `out` labels.
// Convention: C = sum_{nm} (M(|n><m|)) (x) |n><m|, i.e. the operator lives
// on out (x) in with the output factors first in the label list.
struct ChoiOperator {
  LabeledOperator op;
  std::vector<std::string> in_labels;
  std::vector<std::string> out_labels;
};

// |U>><<U| for a unitary (or isometry) U: in -> out.
ChoiOperator choi_of_unitary(const Matrix& u, const std::vector<SubsystemLabel>& in,
                             const std::vector<SubsystemLabel>& out,
                             bool require_unitary = true);

ChoiOperator choi_from_kraus(const std::vector<Matrix>& kraus,
                             const std::vector<SubsystemLabel>& in,
                             const std::vector<SubsystemLabel>& out);

// Apply a channel (given by its Choi operator) to a state on the `in` labels.
// rho's labels must equal choi.in_labels (any order).
LabeledOperator apply_channel(const ChoiOperator& c, const LabeledOperator& rho);

// Link product M*N contracting over the labels shared between the operands.
// Shared labels must have equal dims; a label may appear in at most two
// operands of a chain.
LabeledOperator link_product(const LabeledOperator& m, const LabeledOperator& n);

LabeledOperator link_chain(const std::vector<LabeledOperator>& ops);

// Channel fidelity between two Choi operators of channels with the same
// input dimension d0: f = (Tr sqrt(sqrt(C) D sqrt(C)))^2 / d0^2.
double channel_fidelity(const ChoiOperator& c, const ChoiOperator& d);

// Choi of the even mixture of the two causal orderings, (CD + DC)/2,
// for channels C, D acting between the same spaces.
ChoiOperator switch_mixture(const ChoiOperator& c, const ChoiOperator& d);

bool is_unitary(const Matrix& u, double tol = 1e-10);

}  // namespace combopt

#endif
