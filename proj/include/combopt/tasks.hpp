#ifndef COMBOPT_TASKS_HPP
#define COMBOPT_TASKS_HPP

#include <functional>
#include <string>
#include <vector>

#include "combopt/groups.hpp"

namespace combopt {

// One irrep of a representation together with isometries onto each
// multiplicity copy inside the ambient space.
struct RepBlock {
  Irrep irrep;
  std::vector<Matrix> copies;
};

// One multiplicity copy of the irrep K inside the product space
// H0 (x) H1 carrying V_h (x) U*_h. The isometry maps H_K into H0 (x) H1
// and intertwines a fixed standard choice of irrep matrices, so copies
// of the same K in different blocks intertwine the *same* matrices.
struct KEntry {
  Irrep a;  // irrep of V on H0 this copy descends from
  int a_copy = 0;
  Irrep beta;  // irrep of U on H1
  int b_copy = 0;
  Matrix isometry;  // (d0*d1) x d_K
};

struct KBlock {
  Irrep K;
  std::vector<KEntry> entries;
};

// A symmetric channel-transformation task: one use of the resource
// channel rho -> U_g rho U_g^dagger is to be turned into the target
// channel rho -> V_g rho V_g^dagger, uniformly over the group.
struct TaskRep {
  GroupKind group = GroupKind::U1;
  int sud_d = 2;
  std::string name;
  Index d0 = 1;  // target system dimension (spaces 0 and 3)
  Index d1 = 1;  // resource system dimension (spaces 1 and 2)
  std::function<Matrix(const Matrix&)> V;  // defining parameter -> V_g
  std::function<Matrix(const Matrix&)> U;  // defining parameter -> U_g
  std::vector<RepBlock> v_blocks;
  std::vector<RepBlock> u_blocks;
  std::vector<KBlock> k_blocks;
  int haar_degree = 0;  // quadrature degree adequate for fidelity integrals
};

// Transform a spin-beta SU(2) channel into a spin-a channel.
TaskRep make_irrep_transform_task(int two_beta, int two_a);

// 1 -> n cloning of an unknown SU(2) channel on a qubit.
TaskRep make_su2_clone_task(int n);

// 1 -> n cloning of a qubit phase gate diag(1, e^{i phi}).
TaskRep make_phase_clone_task(int n);

// 1 -> 2 cloning of an SU(d) channel.
TaskRep make_sud_clone_task(int d);

// Quadrature (exact rule for U(1)/SU(2), Monte Carlo for SU(d)) adequate
// for the group averages appearing in this task's figure of merit.
std::vector<HaarNode> task_haar_nodes(const TaskRep& t, int mc_count = 2000,
                                      std::uint64_t seed = 0);

}  // namespace combopt

#endif
