#ifndef COMBOPT_GROUPS_HPP
#define COMBOPT_GROUPS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "combopt/labeled_operator.hpp"

namespace combopt {

enum class GroupKind { U1, SU2, SUd };

// Irrep label. Interpretation depends on `group`:
//   U1  : integer weight k, acting as e^{i k phi} (dim 1)
//   SU2 : spin j stored as two_j (dim two_j + 1)
//   SUd : one of the named pieces appearing in the 1->2 cloning problem
enum class SUdTag { Defining, Sym, Antisym, AlphaHat, BetaHat, GammaHat };

struct Irrep {
  GroupKind group = GroupKind::U1;
  int weight = 0;   // U1
  int two_j = 0;    // SU2
  SUdTag tag = SUdTag::Defining;
  int sud_d = 0;    // SUd: the d of SU(d)

  Index dim() const;
  std::string name() const;
  friend bool operator==(const Irrep& x, const Irrep& y) {
    if (x.group != y.group) return false;
    switch (x.group) {
      case GroupKind::U1: return x.weight == y.weight;
      case GroupKind::SU2: return x.two_j == y.two_j;
      case GroupKind::SUd: return x.tag == y.tag && x.sud_d == y.sud_d;
    }
    return false;
  }
  friend bool operator<(const Irrep& x, const Irrep& y) {
    if (x.group != y.group) return x.group < y.group;
    switch (x.group) {
      case GroupKind::U1: return x.weight < y.weight;
      case GroupKind::SU2: return x.two_j < y.two_j;
      case GroupKind::SUd: return x.tag < y.tag;
    }
    return false;
  }
};

// A (possibly reducible) representation given by its irrep content:
// U_g = (+)_x U^[x]_g (x) I_{m_x}.
struct RepSpec {
  GroupKind group = GroupKind::U1;
  int sud_d = 0;
  std::vector<std::pair<Irrep, int>> content;  // (irrep, multiplicity)
  Index total_dim() const;
};

// Irrep matrix U^[x]_g. Group elements are passed by their defining
// parameterization: a 1x1 phase for U(1), the 2x2 matrix for SU(2), the
// d x d matrix for SU(d).
Matrix irrep_matrix(const Irrep& x, const Matrix& g);

// Irrep content of V^[a] (x) U^[beta]* for every a in the target rep.
// Multiplicities include the target multiplicity m_a.
struct ConjugateTensorDecomposition {
  std::vector<Irrep> a_irreps;  // target content order
  std::vector<Irrep> k_irreps;
  Eigen::MatrixXi mult;  // (a, K)
};
ConjugateTensorDecomposition decompose_tensor_with_conjugate(const RepSpec& target,
                                                             const Irrep& beta);

// Irrep content of U^{(x)N} for a qubit U: spins N/2 down to 0 or 1/2 with
// multiplicities m_a = (2a+1)/(N/2+a+1) * C(N, N/2+a).
RepSpec su2_power_decomposition(int n);

// Clebsch-Gordan isometry C : H_J -> H_{j1} (x) H_{j2}.
// Basis ordering within each spin space: m = j, j-1, ..., -j.
// Returns a (d1*d2) x dJ matrix with C^dagger C = I.
Matrix su2_cg(int two_j1, int two_j2, int two_j);

// exp(-i pi J_y) on the spin-j space; satisfies D^j(g)* = Y D^j(g) Y^dagger.
Matrix su2_y(int two_j);

// Angular momentum generators on the spin-j space.
Matrix su2_jz(int two_j);
Matrix su2_jplus(int two_j);

// Wigner rotation matrix D^j(g) for g in SU(2) (2x2 defining matrix).
Matrix su2_wigner(int two_j, const Matrix& g);

// Isotypic decomposition of (C^2)^{(x) n} under U^{(x) n}:
// for each spin j, a list of isometries 2^n x (two_j+1), one per
// multiplicity copy, all intertwining the same standard D^j.
struct SpinBlock {
  int two_j;
  std::vector<Matrix> isometries;
};
std::vector<SpinBlock> su2_schur_basis(int n_qubits);

// Orthonormal bases of the symmetric / antisymmetric subspace of
// C^d (x) C^d, as d^2 x d(d+-1)/2 isometries.
Matrix symmetric_subspace_isometry(int d);
Matrix antisymmetric_subspace_isometry(int d);

// Haar quadrature / sampling. Nodes carry the defining-parameter matrix
// (1x1 phase for U(1), dxd special unitary otherwise) and a weight;
// weights sum to 1.
struct HaarNode {
  Matrix g;
  double w;
};

// Exact for trigonometric polynomials e^{i k phi} with |k| < n.
std::vector<HaarNode> u1_haar_nodes(int n);

// Euler-angle product rule, exact for matrix elements of products of
// irreps with total doubled spin up to degree_two_j.
std::vector<HaarNode> su2_haar_nodes(int degree_two_j);
Matrix su2_euler(double alpha, double beta, double gamma);

// Monte-Carlo Haar samples on SU(d) (Ginibre + QR, det normalized away).
std::vector<HaarNode> sud_haar_samples(int d, int count, std::uint64_t seed);

// Dispatcher over the three groups. `degree_or_count` is the exactness
// degree for U(1)/SU(2) and the sample count for SU(d).
std::vector<HaarNode> haar_nodes(GroupKind group, int degree_or_count, int sud_d = 0,
                                 std::uint64_t seed = 0);

// Isotypic projectors Pi_K = d_K Int dg chi_K(g)* W_g of a concretely
// realized representation, by character-weighted averaging over the nodes.
struct IsotypicProjectors {
  std::vector<Irrep> irreps;
  std::vector<int> mults;
  std::vector<Matrix> projectors;
};
IsotypicProjectors isotypic_projectors(const std::function<Matrix(const Matrix&)>& rep,
                                       const std::vector<Irrep>& candidates,
                                       const std::vector<HaarNode>& nodes,
                                       double tol = 1e-8);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace combopt

#endif
