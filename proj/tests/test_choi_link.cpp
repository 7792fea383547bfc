#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <random>

#include "combopt/choi.hpp"

using namespace combopt;

namespace {

std::mt19937_64 rng(777);

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

Matrix random_density(Index n) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

// Choi of a random channel via a random isometry with environment dim e.
ChoiOperator random_channel(const std::string& in, Index din, const std::string& out,
                            Index dout) {
  Matrix big = random_unitary(din * dout);
  std::vector<Matrix> kraus;
  for (Index e = 0; e < din; ++e) {
    Matrix k(dout, din);
    for (Index o = 0; o < dout; ++o)
      for (Index i = 0; i < din; ++i) k(o, i) = big(o * din + e, i);
    kraus.push_back(std::move(k));
  }
  return choi_from_kraus(kraus, {{in, din}}, {{out, dout}});
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("choi of unitary") {
  ChoiOperator id = choi_of_unitary(Matrix::Identity(2, 2), {{"in", 2}}, {{"out", 2}});
  CHECK(std::abs(id.op.matrix().trace() - Complex(2.0)) < 1e-14);
  Eigen::JacobiSVD<Matrix> svd(id.op.matrix());
  CHECK(svd.singularValues()(0) > 1.0);
  CHECK(svd.singularValues()(1) < 1e-12);  // rank 1

  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(Complex(0, 0.7));
  ChoiOperator ph = choi_of_unitary(u, {{"in", 2}}, {{"out", 2}});
  Vector v(4);
  v << 1, 0, 0, std::exp(Complex(0, 0.7));
  CHECK(max_abs(ph.op.matrix() - v * v.adjoint()) < 1e-14);

  ChoiOperator r = choi_of_unitary(random_unitary(3), {{"in", 3}}, {{"out", 3}});
  LabeledOperator tr_out = partial_trace(r.op, {"out"});
  CHECK(max_abs(tr_out.matrix() - Matrix::Identity(3, 3)) < 1e-12);

  CHECK_THROWS_AS(choi_of_unitary(Matrix::Ones(2, 2), {{"in", 2}}, {{"out", 2}}), Error);
}

TEST_CASE("apply channel") {
  Matrix rho = random_density(2);
  LabeledOperator state({{"in", 2}}, rho);

  ChoiOperator id = choi_of_unitary(Matrix::Identity(2, 2), {{"in", 2}}, {{"out", 2}});
  CHECK(max_abs(apply_channel(id, state).matrix() - rho) < 1e-13);

  Matrix u = random_unitary(2);
  ChoiOperator cu = choi_of_unitary(u, {{"in", 2}}, {{"out", 2}});
  CHECK(max_abs(apply_channel(cu, state).matrix() - u * rho * u.adjoint()) < 1e-13);

  // depolarizing Choi (I (x) I)/d
  LabeledOperator dep({{"out", 2}, {"in", 2}}, (Matrix::Identity(4, 4) / 2.0).eval());
  ChoiOperator cd{dep, {"in"}, {"out"}};
  CHECK(max_abs(apply_channel(cd, state).matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-13);
}

TEST_CASE("link product special cases") {
  LabeledOperator x({{"a", 2}}, random_density(2));
  LabeledOperator y({{"b", 3}}, random_density(3));
  LabeledOperator lp = link_product(x, y);
  LabeledOperator tp = tensor_product(x, y);
  CHECK(max_abs(relabel_and_permute(lp, tp.label_names()).matrix() - tp.matrix()) < 1e-13);

  LabeledOperator m({{"a", 2}, {"b", 2}}, random_density(4));
  LabeledOperator n({{"b", 2}, {"a", 2}}, random_density(4));
  LabeledOperator scalar = link_product(m, n);
  CHECK(scalar.dim() == 1);
  Complex expect = (relabel_and_permute(m, {"a", "b"}).matrix().transpose() *
                    relabel_and_permute(n, {"a", "b"}).matrix())
                       .trace();
  CHECK(std::abs(scalar.matrix()(0, 0) - expect) < 1e-12);
}

TEST_CASE("link product composes unitaries") {
  Matrix u = random_unitary(2), v = random_unitary(2);
  ChoiOperator cu = choi_of_unitary(u, {{"0", 2}}, {{"1", 2}});
  ChoiOperator cv = choi_of_unitary(v, {{"1", 2}}, {{"2", 2}});
  LabeledOperator uv = link_product(cu.op, cv.op);
  ChoiOperator expect = choi_of_unitary(v * u, {{"0", 2}}, {{"2", 2}});
  CHECK(max_abs(relabel_and_permute(uv, expect.op.label_names()).matrix() -
                expect.op.matrix()) < 1e-12);
}

TEST_CASE("link product commutative and dim-checked") {
  LabeledOperator m({{"a", 2}, {"b", 3}}, random_density(6));
  LabeledOperator n({{"b", 3}, {"c", 2}}, random_density(6));
  LabeledOperator mn = link_product(m, n);
  LabeledOperator nm = link_product(n, m);
  CHECK(max_abs(relabel_and_permute(nm, mn.label_names()).matrix() - mn.matrix()) < 1e-12);

  LabeledOperator bad({{"b", 2}}, random_density(2));
  CHECK_THROWS_AS(link_product(m, bad), Error);
}

TEST_CASE("link chain") {
  ChoiOperator c1 = random_channel("0", 2, "1", 3);
  ChoiOperator c2 = random_channel("1", 3, "2", 2);
  ChoiOperator c3 = random_channel("2", 2, "3", 2);
  LabeledOperator chain = link_chain({c1.op, c2.op, c3.op});
  LabeledOperator seq = link_product(link_product(c1.op, c2.op), c3.op);
  CHECK(max_abs(relabel_and_permute(chain, seq.label_names()).matrix() - seq.matrix()) <
        1e-12);

  LabeledOperator perm = link_chain({c3.op, c1.op, c2.op});
  CHECK(max_abs(relabel_and_permute(perm, seq.label_names()).matrix() - seq.matrix()) <
        1e-12);

  ChoiOperator i1 = choi_of_unitary(Matrix::Identity(2, 2), {{"0", 2}}, {{"1", 2}});
  ChoiOperator i2 = choi_of_unitary(Matrix::Identity(2, 2), {{"1", 2}}, {{"2", 2}});
  LabeledOperator idc = link_chain({i1.op, i2.op});
  ChoiOperator expect = choi_of_unitary(Matrix::Identity(2, 2), {{"0", 2}}, {{"2", 2}});
  CHECK(max_abs(relabel_and_permute(idc, expect.op.label_names()).matrix() -
                expect.op.matrix()) < 1e-13);

  // a label occurring in three operators is rejected
  ChoiOperator c2b = random_channel("1", 3, "4", 2);
  CHECK_THROWS_AS(link_chain({c1.op, c2.op, c2b.op}), Error);
}

TEST_CASE("switch mixture") {
  ChoiOperator id = choi_of_unitary(Matrix::Identity(2, 2), {{"0", 2}}, {{"1", 2}});
  ChoiOperator sw = switch_mixture(id, id);
  CHECK(max_abs(sw.op.matrix() - id.op.matrix()) < 1e-13);

  // commuting diagonal unitaries -> Choi of the product
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = std::exp(Complex(0, 0.3));
  b(0, 0) = 1.0;
  b(1, 1) = std::exp(Complex(0, 1.1));
  ChoiOperator ca = choi_of_unitary(a, {{"0", 2}}, {{"1", 2}});
  ChoiOperator cb = choi_of_unitary(b, {{"0", 2}}, {{"1", 2}});
  ChoiOperator cab = choi_of_unitary(a * b, {{"0", 2}}, {{"1", 2}});
  ChoiOperator mixed = switch_mixture(ca, cb);
  CHECK(max_abs(relabel_and_permute(mixed.op, cab.op.label_names()).matrix() -
                cab.op.matrix()) < 1e-12);

  // X and Z conjugations: mixture of XZ and ZX; still a channel
  Matrix px(2, 2), pz = Matrix::Zero(2, 2);
  px << 0, 1, 1, 0;
  pz(0, 0) = 1.0;
  pz(1, 1) = -1.0;
  ChoiOperator cx = choi_of_unitary(px, {{"0", 2}}, {{"1", 2}});
  ChoiOperator cz = choi_of_unitary(pz, {{"0", 2}}, {{"1", 2}});
  ChoiOperator xz = switch_mixture(cx, cz);
  LabeledOperator tr_out = partial_trace(xz.op, {"1"});
  CHECK(max_abs(tr_out.matrix() - Matrix::Identity(2, 2)) < 1e-12);
  Matrix half = 0.5 * (choi_of_unitary(px * pz, {{"0", 2}}, {{"1", 2}}).op.matrix() +
                       choi_of_unitary(pz * px, {{"0", 2}}, {{"1", 2}}).op.matrix());
  CHECK(max_abs(relabel_and_permute(xz.op, {"1", "0"}).matrix() - half) < 1e-12);
}

TEST_CASE("channel fidelity") {
  ChoiOperator c = random_channel("0", 2, "1", 2);
  CHECK(channel_fidelity(c, c) == doctest::Approx(1.0).epsilon(1e-9));

  Matrix u = random_unitary(3), v = random_unitary(3);
  ChoiOperator cu = choi_of_unitary(u, {{"0", 3}}, {{"1", 3}});
  ChoiOperator cv = choi_of_unitary(v, {{"0", 3}}, {{"1", 3}});
  double f = channel_fidelity(cu, cv);
  double expect = std::norm((u.adjoint() * v).trace()) / 9.0;
  CHECK(f == doctest::Approx(expect).epsilon(1e-8));
  CHECK(channel_fidelity(cv, cu) == doctest::Approx(f).epsilon(1e-8));

  ChoiOperator id = choi_of_unitary(Matrix::Identity(2, 2), {{"0", 2}}, {{"1", 2}});
  LabeledOperator dep({{"1", 2}, {"0", 2}}, (Matrix::Identity(4, 4) / 2.0).eval());
  CHECK(channel_fidelity(id, ChoiOperator{dep, {"0"}, {"1"}}) ==
        doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("kraus round trip") {
  ChoiOperator c = random_channel("in", 3, "out", 2);
  Matrix rho = random_density(3);
  LabeledOperator out = apply_channel(c, LabeledOperator({{"in", 3}}, rho));
  CHECK(std::abs(out.matrix().trace() - Complex(1.0)) < 1e-12);
  CHECK(min_hermitian_eigenvalue(out.matrix()) > -1e-12);
}
