#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <random>

#include "combopt/comb.hpp"
#include "combopt/tasks.hpp"

using namespace combopt;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

CombSpec two_comb_spec(Index d0, Index d1) {
  return CombSpec{{{"0", d0}, {"1", d1}, {"2", d1}, {"3", d0}}};
}

std::mt19937_64 rng(31);

Matrix random_unitary(Index n) {
  std::normal_distribution<double> nd;
  Matrix z(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) z(i, j) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = q.adjoint() * z;
  for (Index i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

// the "apply the input gate directly" 2-comb: wire 0 -> 1, wire 2 -> 3
LabeledOperator passthrough_comb(Index d) {
  ChoiOperator a = choi_of_unitary(Matrix::Identity(d, d), {{"0", d}}, {{"1", d}});
  ChoiOperator b = choi_of_unitary(Matrix::Identity(d, d), {{"2", d}}, {{"3", d}});
  return relabel_and_permute(tensor_product(a.op, b.op), {"0", "1", "2", "3"});
}

}  // namespace

TEST_CASE("verify comb on identity channel") {
  ChoiOperator id = choi_of_unitary(Matrix::Identity(2, 2), {{"0", 2}}, {{"1", 2}});
  CombResidual res = verify_comb(id.op, CombSpec{{{"0", 2}, {"1", 2}}});
  CHECK(res.pass(1e-12));
}

TEST_CASE("verify comb flags a generic psd matrix") {
  Matrix a = random_unitary(16);
  Matrix psd = a * a.adjoint();
  LabeledOperator bad({{"0", 2}, {"1", 2}, {"2", 2}, {"3", 2}}, psd);
  CombResidual res = verify_comb(bad, two_comb_spec(2, 2));
  CHECK_FALSE(res.pass(1e-6));
  CHECK_THROWS_AS(require_comb(bad, two_comb_spec(2, 2)), Error);
}

TEST_CASE("tensor of channels with comb wiring is a comb") {
  LabeledOperator r = passthrough_comb(2);
  CHECK(verify_comb(r, two_comb_spec(2, 2)).pass(1e-12));
}

TEST_CASE("random deterministic combs") {
  for (std::uint64_t seed : {0, 1, 2, 3, 4}) {
    LabeledOperator r = random_deterministic_comb(two_comb_spec(2, 2), {2}, seed);
    CHECK(r.dim() == 16);
    CHECK(verify_comb(r, two_comb_spec(2, 2)).pass(1e-9));
  }
  // reproducibility
  LabeledOperator a = random_deterministic_comb(two_comb_spec(2, 3), {4}, 9);
  LabeledOperator b = random_deterministic_comb(two_comb_spec(2, 3), {4}, 9);
  CHECK(max_abs(a.matrix() - b.matrix()) == 0.0);
  // N=1 trivial case
  LabeledOperator one = random_deterministic_comb(CombSpec{{{"0", 2}, {"1", 2}}}, {}, 3);
  CHECK(verify_comb(one, CombSpec{{{"0", 2}, {"1", 2}}}).pass(1e-9));
}

TEST_CASE("covariantize a random comb under U(1)") {
  TaskRep t = make_phase_clone_task(1);  // V = U on a qubit
  LabeledOperator r = random_deterministic_comb(two_comb_spec(2, 2), {2}, 17);
  auto nodes = task_haar_nodes(t);
  LabeledOperator rc = covariantize(r, t, nodes);
  CHECK(verify_comb(rc, two_comb_spec(2, 2)).pass(1e-9));
  CHECK(covariance_violation(rc, t, nodes) < 1e-10);
  // idempotence
  LabeledOperator rcc = covariantize(rc, t, nodes);
  CHECK(max_abs(rcc.matrix() - rc.matrix()) < 1e-10);
  // fidelity preserved by the averaging
  FidelityEstimate before = fidelity_haar(r, t, nodes, false);
  FidelityEstimate after = fidelity_haar(rc, t, nodes, false);
  CHECK(before.value == doctest::Approx(after.value).epsilon(1e-10));
}

TEST_CASE("fidelity of the passthrough comb on the identity task is 1") {
  TaskRep t = make_phase_clone_task(1);
  LabeledOperator r = passthrough_comb(2);
  FidelityEstimate f = fidelity_haar(r, t, task_haar_nodes(t), false);
  CHECK(f.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("insert channel closes the loop") {
  TaskRep t = make_phase_clone_task(1);
  LabeledOperator r = passthrough_comb(2);
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(Complex(0, 0.4));
  ChoiOperator cu = choi_of_unitary(u, {{"1", 2}}, {{"2", 2}});
  ChoiOperator out = insert_channel(r, cu);
  ChoiOperator expect = choi_of_unitary(u, {{"0", 2}}, {{"3", 2}});
  CHECK(max_abs(relabel_and_permute(out.op, expect.op.label_names()).matrix() -
                expect.op.matrix()) < 1e-12);
}

TEST_CASE("parallel decomposition of the passthrough comb") {
  TaskRep t = make_phase_clone_task(1);
  LabeledOperator r = passthrough_comb(2);
  auto nodes = task_haar_nodes(t);
  ParallelDecomposition pd = decompose_parallel(r, t, nodes);
  CHECK(pd.memory_dim == 4);

  // channel normalization of both pieces
  LabeledOperator tr1 = partial_trace(pd.c1.op, {"0p", "1p", "2p"});
  CHECK(max_abs(tr1.matrix() - Matrix::Identity(2, 2)) < 1e-10);
  LabeledOperator tr2 = partial_trace(pd.c2.op, {"3"});
  CHECK(max_abs(tr2.matrix() - Matrix::Identity(8, 8)) < 1e-10);

  for (int i = 0; i < 5; ++i) {
    double phi = 0.31 * (i + 1);
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::exp(Complex(0, phi));
    ChoiOperator cu = choi_of_unitary(u, {{"1", 2}}, {{"2", 2}});
    LabeledOperator lhs = insert_channel(r, cu).op;

    ChoiOperator slot = choi_of_unitary(u, {{"2p", 2}}, {{"2q", 2}});
    LabeledOperator c2q = rename_labels(pd.c2.op, {{"2p", "2q"}});
    LabeledOperator rhs = link_chain({pd.c1.op, slot.op, c2q});
    CHECK(max_abs(relabel_and_permute(rhs, lhs.label_names()).matrix() - lhs.matrix()) <
          1e-9);
  }
}

TEST_CASE("parallel decomposition of a covariantized random comb (U(1))") {
  TaskRep t = make_phase_clone_task(1);
  auto nodes = task_haar_nodes(t);
  LabeledOperator r =
      covariantize(random_deterministic_comb(two_comb_spec(2, 2), {3}, 23), t, nodes);
  ParallelDecomposition pd = decompose_parallel(r, t, nodes);
  for (int i = 0; i < 20; ++i) {
    double phi = 2.0 * std::numbers::pi * i / 20.0 + 0.05;
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::exp(Complex(0, phi));
    LabeledOperator lhs =
        insert_channel(r, choi_of_unitary(u, {{"1", 2}}, {{"2", 2}})).op;
    ChoiOperator slot = choi_of_unitary(u, {{"2p", 2}}, {{"2q", 2}});
    LabeledOperator c2q = rename_labels(pd.c2.op, {{"2p", "2q"}});
    LabeledOperator rhs = link_chain({pd.c1.op, slot.op, c2q});
    CHECK(max_abs(relabel_and_permute(rhs, lhs.label_names()).matrix() - lhs.matrix()) <
          1e-9);
  }
  // non-covariant input is rejected
  LabeledOperator raw = random_deterministic_comb(two_comb_spec(2, 2), {3}, 29);
  CHECK_THROWS_AS(decompose_parallel(raw, t, nodes), Error);
}

TEST_CASE("multiplicity conversion: trivial pattern") {
  MultiplicityPattern pat{{2}, {1}};
  ConversionCombs cc = multiplicity_conversion_combs(pat);
  CHECK(cc.memory_dim == 1);
  Matrix u = random_unitary(2);
  LabeledOperator lhs =
      insert_channel(cc.reduce, choi_of_unitary(u, {{"1", 2}}, {{"2", 2}})).op;
  ChoiOperator expect = choi_of_unitary(u, {{"0", 2}}, {{"3", 2}});
  CHECK(max_abs(relabel_and_permute(lhs, expect.op.label_names()).matrix() -
                expect.op.matrix()) < 1e-10);
}

TEST_CASE("multiplicity conversion: U(1) qubit U(+)U <-> U") {
  // full rep: two copies of weight-1 on top of nothing else; reduced: one copy
  MultiplicityPattern pat{{1, 1}, {1, 2}};  // weight-0 once, weight-1 twice
  ConversionCombs cc = multiplicity_conversion_combs(pat);
  CHECK(cc.memory_dim == 2);
  CHECK(verify_comb(cc.reduce, CombSpec{{{"0", 2}, {"1", 3}, {"2", 3}, {"3", 2}}})
            .pass(1e-9));
  CHECK(verify_comb(cc.expand, CombSpec{{{"0", 3}, {"1", 2}, {"2", 2}, {"3", 3}}})
            .pass(1e-9));

  for (int i = 0; i < 20; ++i) {
    double phi = 2.0 * std::numbers::pi * i / 20.0 + 0.02;
    Matrix m(1, 1);
    m(0, 0) = std::exp(Complex(0, phi));
    std::vector<Matrix> irreps{Matrix::Identity(1, 1), m};
    Matrix ufull = pattern_full_matrix(pat, irreps);    // dim 3
    Matrix ured = pattern_reduced_matrix(pat, irreps);  // dim 2

    ChoiOperator cfull = choi_of_unitary(ufull, {{"1", 3}}, {{"2", 3}});
    LabeledOperator got = insert_channel(cc.reduce, cfull).op;
    ChoiOperator want = choi_of_unitary(ured, {{"0", 2}}, {{"3", 2}});
    CHECK(max_abs(relabel_and_permute(got, want.op.label_names()).matrix() -
                  want.op.matrix()) < 1e-9);

    ChoiOperator cred = choi_of_unitary(ured, {{"1", 2}}, {{"2", 2}});
    LabeledOperator back = insert_channel(cc.expand, cred).op;
    ChoiOperator wantf = choi_of_unitary(ufull, {{"0", 3}}, {{"3", 3}});
    CHECK(max_abs(relabel_and_permute(back, wantf.op.label_names()).matrix() -
                  wantf.op.matrix()) < 1e-9);
  }
}

TEST_CASE("multiplicity conversion: SU(2) three qubits <-> 3/2 (+) 1/2") {
  auto blocks = su2_schur_basis(3);
  // pattern in the schur-ordered basis: spin 3/2 once, spin 1/2 twice
  MultiplicityPattern pat{{4, 2}, {1, 2}};
  ConversionCombs cc = multiplicity_conversion_combs(pat);
  CHECK(cc.memory_dim == 2);

  for (int i = 0; i < 20; ++i) {
    Matrix g = random_unitary(2);
    g /= std::sqrt(g.determinant());
    std::vector<Matrix> irreps{su2_wigner(3, g), su2_wigner(1, g)};
    Matrix ufull = pattern_full_matrix(pat, irreps);    // dim 8
    Matrix ured = pattern_reduced_matrix(pat, irreps);  // dim 6

    LabeledOperator got =
        insert_channel(cc.reduce, choi_of_unitary(ufull, {{"1", 8}}, {{"2", 8}})).op;
    ChoiOperator want = choi_of_unitary(ured, {{"0", 6}}, {{"3", 6}});
    CHECK(max_abs(relabel_and_permute(got, want.op.label_names()).matrix() -
                  want.op.matrix()) < 1e-9);

    LabeledOperator back =
        insert_channel(cc.expand, choi_of_unitary(ured, {{"1", 6}}, {{"2", 6}})).op;
    ChoiOperator wantf = choi_of_unitary(ufull, {{"0", 8}}, {{"3", 8}});
    CHECK(max_abs(relabel_and_permute(back, wantf.op.label_names()).matrix() -
                  wantf.op.matrix()) < 1e-9);
  }

  // forward then backward is the identity supermap on the reduced gate
  Matrix g = random_unitary(2);
  g /= std::sqrt(g.determinant());
  std::vector<Matrix> irreps{su2_wigner(3, g), su2_wigner(1, g)};
  Matrix ured = pattern_reduced_matrix(pat, irreps);
  LabeledOperator expanded =
      insert_channel(cc.expand, choi_of_unitary(ured, {{"1", 6}}, {{"2", 6}})).op;
  ChoiOperator as_channel{relabel_and_permute(expanded, {"3", "0"}), {"0"}, {"3"}};
  LabeledOperator renamed = rename_labels(as_channel.op, {{"0", "1"}, {"3", "2"}});
  LabeledOperator round = insert_channel(cc.reduce, ChoiOperator{renamed, {"1"}, {"2"}}).op;
  ChoiOperator idc = choi_of_unitary(ured, {{"0", 6}}, {{"3", 6}});
  CHECK(max_abs(relabel_and_permute(round, idc.op.label_names()).matrix() -
                idc.op.matrix()) < 1e-9);

  // mismatched content is rejected
  CHECK_THROWS_AS(multiplicity_conversion_combs(MultiplicityPattern{{2}, {0}}), Error);
}
