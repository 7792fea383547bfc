#ifndef COMBOPT_REDUCED_PROGRAM_HPP
#define COMBOPT_REDUCED_PROGRAM_HPP

#include <cstdint>

#include "combopt/tasks.hpp"

namespace combopt {

// The symmetry-reduced optimization: maximize
//   Phi(p) = sum_K ( sum_a sqrt(q^a_K p^a_K) )^2
// over row-stochastic p (each row a is a probability vector over K),
// with p^a_K = 0 wherever the irrep K does not occur for a.
struct ReducedProblem {
  std::vector<Irrep> a_irreps;
  std::vector<int> m_a;
  std::vector<Index> d_a;
  std::vector<Irrep> k_irreps;
  std::vector<Index> d_k;
  Eigen::MatrixXd q;     // na x nk; zero where (a, K) infeasible
  Eigen::MatrixXd h;     // na x nk; the comb normalization weights
  Eigen::MatrixXi mult;  // na x nk; sum over beta of the multiplicities
  Index d0 = 1;

  Index a_index(const Irrep& a) const;
  Index k_index(const Irrep& k) const;
};

ReducedProblem build_reduced_problem(const TaskRep& t);

// Abstract builder from irrep content alone: one use of the input rep
// (multiplicities stripped first), target rep with multiplicities kept.
ReducedProblem build_reduced_problem(const std::vector<RepSpec>& input_reps,
                                     const RepSpec& target);

// Closed-form problem builders that avoid constructing the (exponentially
// large) task spaces; usable for large clone numbers.
ReducedProblem su2_clone_reduced(int n);
ReducedProblem phase_clone_reduced(int n);

double phi_value(const ReducedProblem& rp, const Eigen::MatrixXd& p);

struct SolveResult {
  Eigen::MatrixXd p;
  double phi = 0;
  double kkt_residual = 0;
  int iterations = 0;
};

// Projected gradient ascent with Armijo backtracking; the objective is
// concave so the first-order optimum is global. Throws NoConvergence if
// the KKT residual does not reach `tol`.
SolveResult solve_reduced_problem(const ReducedProblem& rp, double tol = 1e-10,
                                  int max_iters = 1000000);

// Closed-form optimum for single-irrep -> single-irrep transformations.
double irrep_transform_fidelity(int two_beta, int two_a);

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace combopt

#endif
