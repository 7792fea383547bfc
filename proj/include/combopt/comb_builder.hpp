#ifndef COMBOPT_COMB_BUILDER_HPP
#define COMBOPT_COMB_BUILDER_HPP

#include "combopt/comb.hpp"
#include "combopt/reduced_program.hpp"

namespace combopt {

// The explicit optimal comb for a probability assignment p of the reduced
// program, assembled on the labels 0,1,2,3 (dims d0, d1, d1, d0).
struct OptimalComb {
  LabeledOperator r;
  ReducedProblem prob;
  Eigen::MatrixXd p;
};

// Swap map H0 (x) H1 -> H2 (x) H3, |n>_0 |m>_1 -> |m>_2 |n>_3.
Matrix theta_matrix(Index d0, Index d1);

// Assemble the rank-structured covariant comb attaining Phi(p).
OptimalComb build_optimal_comb(const Eigen::MatrixXd& p, const TaskRep& t);

// Exact group-averaged fidelity of a covariant comb, evaluated without
// quadrature from the isotypic block structure.
double fidelity_block_exact(const OptimalComb& c, const TaskRep& t);
double fidelity_block_exact(const LabeledOperator& r, const TaskRep& t);

// Residuals of the two normalization identities the ansatz blocks satisfy
// exactly when every row of p sums to one.
struct AnsatzResiduals {
  double block_consistency = 0;  // reduced S^K independent of the probe irrep
  double unit_sum = 0;           // per-a total equals 1
  bool positive = true;
};
AnsatzResiduals verify_ansatz_normalization(const Eigen::MatrixXd& p, const TaskRep& t);

// Precomputed group average of the fidelity witness; F(R) = Tr[R W]/d0^2.
Matrix fidelity_witness(const TaskRep& t, const std::vector<HaarNode>& nodes);
double witness_fidelity(const LabeledOperator& r, const TaskRep& t, const Matrix& witness);

// Draw random deterministic 2-combs and return the maximal witnessed
// fidelity; optionally evaluates a given comb first.
double random_comb_bound_check(const TaskRep& t, const std::vector<HaarNode>& nodes,
                               int n_trials, std::uint64_t seed,
                               const LabeledOperator* include_first = nullptr);

}  // namespace combopt

#endif
