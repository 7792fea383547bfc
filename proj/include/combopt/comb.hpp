#ifndef COMBOPT_COMB_HPP
#define COMBOPT_COMB_HPP

#include <cstdint>

#include "combopt/choi.hpp"
#include "combopt/tasks.hpp"

namespace combopt {

// Ordered teeth of an N-comb: spaces H_0, H_1, ..., H_{2N-1}, where
// H_{2j} is an input and H_{2j+1} an output of the realizing network.
struct CombSpec {
  std::vector<SubsystemLabel> spaces;  // even count, causal order
};

struct CombResidual {
  std::vector<double> level_residuals;  // one per trace constraint
  double min_eigenvalue = 0;
  bool pass(double tol) const {
    if (min_eigenvalue < -tol) return false;
    for (double r : level_residuals)
      if (r > tol) return false;
    return true;
  }
};

// Recursive deterministic-comb constraints plus positivity.
CombResidual verify_comb(const LabeledOperator& r, const CombSpec& spec);
void require_comb(const LabeledOperator& r, const CombSpec& spec, double tol = 1e-9);

// Concatenation of Haar-random isometry channels with the given ancilla
// (memory) dimensions between consecutive teeth; always a deterministic comb.
LabeledOperator random_deterministic_comb(const CombSpec& spec,
                                          const std::vector<Index>& ancilla_dims,
                                          std::uint64_t seed);

// Average W rho W^dagger over the given unitaries acting on `labels`.
LabeledOperator twirl(const LabeledOperator& op, const std::vector<std::string>& labels,
                      const std::vector<std::pair<Matrix, double>>& unitaries);

// Group-average a 2-comb on labels 0,1,2,3 to satisfy the task symmetry
// [R, V_h (x) U*_h (x) U_g (x) V*_g] = 0.
LabeledOperator covariantize(const LabeledOperator& r, const TaskRep& t,
                             const std::vector<HaarNode>& nodes);

// Max commutator norm of the symmetry action at the sampled elements.
double covariance_violation(const LabeledOperator& r, const TaskRep& t,
                            const std::vector<HaarNode>& samples);

// Insert the resource channel's Choi operator into the slot (labels 1 -> 2)
// of a 2-comb on 0,1,2,3; returns the induced channel from 0 to 3.
ChoiOperator insert_channel(const LabeledOperator& r, const ChoiOperator& u);

// Per-element fidelity f(R * |U_g>><<U_g|, |V_g>><<V_g|) and its group
// average over the given nodes.
struct FidelityEstimate {
  double value = 0;
  double std_error = 0;  // 0 for exact rules
};
FidelityEstimate fidelity_haar(const LabeledOperator& r, const TaskRep& t,
                               const std::vector<HaarNode>& nodes, bool monte_carlo);

// Parallelized realization of a covariant 2-comb: a preprocessing channel
// C1 : H0 -> H_{2'} (x) H_M and postprocessing C2 : H_{2'} (x) H_M -> H3
// with C1 * |U_g>><<U_g| * C2 = R * |U_g>><<U_g|.
struct ParallelDecomposition {
  ChoiOperator c1;
  ChoiOperator c2;
  Index memory_dim = 1;
  std::string slot_out;           // label of the wire the resource acts on
  std::vector<std::string> memory_labels;
};
ParallelDecomposition decompose_parallel(const LabeledOperator& r, const TaskRep& t,
                                         const std::vector<HaarNode>& samples,
                                         double cov_tol = 1e-8);

// A representation of the same irrep content with and without multiplicities:
// U_g = (+)_beta U^[beta]_g (x) I_{m_beta}  vs  U'_g = (+)_beta U^[beta]_g.
struct MultiplicityPattern {
  std::vector<Index> dims;  // d_beta
  std::vector<int> mults;   // m_beta
  Index full_dim() const;
  Index reduced_dim() const;
};

// The two conversion combs of the multiplicity-irrelevance lemma:
// `reduce` turns a use of U_g into U'_g; `expand` turns a use of U'_g back
// into U_g using a memory wire of dimension max_beta m_beta.
struct ConversionCombs {
  LabeledOperator reduce;  // labels 0,1,2,3 with dims d', d, d, d'
  LabeledOperator expand;  // labels 0,1,2,3 with dims d, d', d', d
  Index memory_dim = 1;
};
ConversionCombs multiplicity_conversion_combs(const MultiplicityPattern& pat);

// Block matrices U_g / U'_g for a pattern, given per-irrep matrices.
Matrix pattern_full_matrix(const MultiplicityPattern& pat, const std::vector<Matrix>& irrep_mats);
Matrix pattern_reduced_matrix(const MultiplicityPattern& pat, const std::vector<Matrix>& irrep_mats);

}  // namespace combopt

#endif
