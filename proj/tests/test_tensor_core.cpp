#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <random>

#include "combopt/labeled_operator.hpp"

using namespace combopt;

namespace {

std::mt19937_64 rng(12345);

Matrix random_matrix(Index n) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

Matrix random_density(Index n) {
  Matrix a = random_matrix(n);
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("double ket of identity and matrix units") {
  LabeledOperator id({{"a", 2}}, Matrix::Identity(2, 2));
  DoubleKet v = double_ket(id);
  Vector expect(4);
  expect << 1, 0, 0, 1;
  CHECK(max_abs(v.vector - expect) < 1e-15);

  Matrix unit = Matrix::Zero(2, 2);
  unit(0, 1) = 1.0;
  DoubleKet u = double_ket(LabeledOperator({{"a", 2}}, unit));
  Vector eu(4);
  eu << 0, 1, 0, 0;
  CHECK(max_abs(u.vector - eu) < 1e-15);
}

TEST_CASE("double ket round trip and (A (x) B)|C>> = |A C B^T>>") {
  Matrix c = random_matrix(3);
  LabeledOperator op({{"x", 3}}, c);
  CHECK(max_abs(double_ket_inverse(double_ket(op)).matrix() - c) < 1e-14);

  Matrix a = random_matrix(3), b = random_matrix(3);
  Vector lhs = Eigen::kroneckerProduct(a, b) * double_ket(op).vector;
  Vector rhs = double_ket(LabeledOperator({{"x", 3}}, a * c * b.transpose())).vector;
  CHECK(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("tensor product basics") {
  LabeledOperator i2 = identity_operator({{"a", 2}});
  LabeledOperator i3 = identity_operator({{"b", 3}});
  LabeledOperator i6 = tensor_product(i2, i3);
  CHECK(i6.dim() == 6);
  CHECK(max_abs(i6.matrix() - Matrix::Identity(6, 6)) < 1e-15);

  LabeledOperator x({{"a", 2}}, random_matrix(2));
  LabeledOperator y({{"b", 3}}, random_matrix(3));
  CHECK(std::abs(trace_of(tensor_product(x, y)) - trace_of(x) * trace_of(y)) < 1e-12);

  CHECK_THROWS_AS(tensor_product(x, LabeledOperator({{"a", 2}}, random_matrix(2))), Error);
}

TEST_CASE("partial trace") {
  Matrix rho = random_density(2), sigma = random_density(3);
  LabeledOperator joint =
      tensor_product(LabeledOperator({{"r", 2}}, rho), LabeledOperator({{"s", 3}}, sigma));
  LabeledOperator left = partial_trace(joint, {"s"});
  CHECK(max_abs(left.matrix() - rho) < 1e-13);
  CHECK(left.labels().size() == 1);
  CHECK(left.labels()[0].name == "r");

  LabeledOperator scalar = partial_trace(joint, {"r", "s"});
  CHECK(scalar.dim() == 1);
  CHECK(std::abs(scalar.matrix()(0, 0) - Complex(1.0)) < 1e-13);

  // |I>><<I| over one factor -> identity on the other
  Vector dk(9);
  dk.setZero();
  for (Index i = 0; i < 3; ++i) dk(i * 3 + i) = 1.0;
  LabeledOperator proj({{"p", 3}, {"q", 3}}, (dk * dk.adjoint()).eval());
  CHECK(max_abs(partial_trace(proj, {"q"}).matrix() - Matrix::Identity(3, 3)) < 1e-15);

  CHECK_THROWS_AS(partial_trace(joint, {"nope"}), Error);
}

TEST_CASE("partial trace commutes over disjoint sets") {
  LabeledOperator op({{"a", 2}, {"b", 3}, {"c", 2}}, random_matrix(12));
  LabeledOperator one = partial_trace(partial_trace(op, {"a"}), {"c"});
  LabeledOperator both = partial_trace(op, {"a", "c"});
  CHECK(max_abs(one.matrix() - both.matrix()) < 1e-13);
}

TEST_CASE("partial transpose") {
  LabeledOperator op({{"a", 2}, {"b", 3}}, random_matrix(6));
  LabeledOperator twice = partial_transpose(partial_transpose(op, {"b"}), {"b"});
  CHECK(max_abs(twice.matrix() - op.matrix()) < 1e-15);

  LabeledOperator u1 = partial_transpose(partial_transpose(op, {"a"}), {"b"});
  LabeledOperator u2 = partial_transpose(op, {"a", "b"});
  CHECK(max_abs(u1.matrix() - u2.matrix()) < 1e-15);

  // PT of |I>><<I| on one factor is SWAP
  Vector dk(4);
  dk << 1, 0, 0, 1;
  LabeledOperator proj({{"p", 2}, {"q", 2}}, (dk * dk.adjoint()).eval());
  Matrix swap = partial_transpose(proj, {"q"}).matrix();
  CHECK(std::abs(swap.trace() - Complex(2.0)) < 1e-15);
  Matrix expect(4, 4);
  expect << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1;
  CHECK(max_abs(swap - expect) < 1e-15);
}

TEST_CASE("relabel and permute") {
  Matrix rho = random_density(2), sigma = random_density(3);
  LabeledOperator joint =
      tensor_product(LabeledOperator({{"r", 2}}, rho), LabeledOperator({{"s", 3}}, sigma));
  LabeledOperator same = relabel_and_permute(joint, {"r", "s"});
  CHECK(max_abs(same.matrix() - joint.matrix()) < 1e-15);

  LabeledOperator swapped = relabel_and_permute(joint, {"s", "r"});
  CHECK(max_abs(swapped.matrix() - Eigen::kroneckerProduct(sigma, rho)) < 1e-13);

  LabeledOperator three({{"a", 2}, {"b", 3}, {"c", 2}}, random_matrix(12));
  Matrix h = three.matrix() + three.matrix().adjoint();
  LabeledOperator ho({{"a", 2}, {"b", 3}, {"c", 2}}, h);
  LabeledOperator perm = relabel_and_permute(ho, {"c", "a", "b"});
  Eigen::SelfAdjointEigenSolver<Matrix> e1(h), e2(perm.matrix());
  CHECK(max_abs(e1.eigenvalues() - e2.eigenvalues()) < 1e-12);

  CHECK_THROWS_AS(relabel_and_permute(joint, {"r"}), Error);
  CHECK_THROWS_AS(relabel_and_permute(joint, {"r", "r"}), Error);
}

TEST_CASE("psd helpers") {
  Matrix a = random_matrix(4);
  Matrix x = a * a.adjoint();
  Matrix s = psd_sqrt(x);
  CHECK(max_abs(s * s - x) < 1e-11);
  CHECK_THROWS_AS(psd_sqrt((-Matrix::Identity(3, 3)).eval()), Error);

  Matrix inv = psd_inv_sqrt(x);
  Matrix pi = support_projector(x);
  CHECK(max_abs(inv * x * inv - pi) < 1e-10);
  CHECK(min_hermitian_eigenvalue(x) >= -1e-12);
}
