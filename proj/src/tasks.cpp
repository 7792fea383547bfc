#include "combopt/tasks.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <bit>
#include <cmath>

namespace combopt {

namespace {

Matrix kron_power(const Matrix& g, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = Eigen::kroneckerProduct(out, g).eval();
  return out;
}

}  // namespace

TaskRep make_irrep_transform_task(int two_beta, int two_a) {
  if (two_beta < 0 || two_a < 0)
    throw Error("BadParameterization", "spins must be non-negative");
  TaskRep t;
  t.group = GroupKind::SU2;
  t.name = "irrep-transform";
  t.d0 = two_a + 1;
  t.d1 = two_beta + 1;
  t.V = [two_a](const Matrix& g) { return su2_wigner(two_a, g); };
  t.U = [two_beta](const Matrix& g) { return su2_wigner(two_beta, g); };

  Irrep a{GroupKind::SU2, 0, two_a};
  Irrep beta{GroupKind::SU2, 0, two_beta};
  t.v_blocks = {RepBlock{a, {Matrix::Identity(t.d0, t.d0)}}};
  t.u_blocks = {RepBlock{beta, {Matrix::Identity(t.d1, t.d1)}}};

  Matrix y = su2_y(two_beta);
  for (int two_k = std::abs(two_a - two_beta); two_k <= two_a + two_beta; two_k += 2) {
    Matrix cg = su2_cg(two_a, two_beta, two_k);
    Matrix iso = Eigen::kroneckerProduct(Matrix::Identity(t.d0, t.d0), y) * cg;
    Irrep k{GroupKind::SU2, 0, two_k};
    t.k_blocks.push_back(KBlock{k, {KEntry{a, 0, beta, 0, std::move(iso)}}});
  }
  t.haar_degree = 2 * (two_a + two_beta);
  return t;
}

TaskRep make_su2_clone_task(int n) {
  if (n < 1) throw Error("BadParameterization", "need at least one clone");
  TaskRep t;
  t.group = GroupKind::SU2;
  t.name = "clone-su2";
  t.d0 = Index(1) << n;
  t.d1 = 2;
  t.V = [n](const Matrix& g) { return kron_power(g, n); };
  t.U = [](const Matrix& g) { return g; };

  Irrep beta{GroupKind::SU2, 0, 1};
  t.u_blocks = {RepBlock{beta, {Matrix::Identity(2, 2)}}};

  Matrix y = su2_y(1);
  for (const auto& sb : su2_schur_basis(n)) {
    Irrep a{GroupKind::SU2, 0, sb.two_j};
    t.v_blocks.push_back(RepBlock{a, sb.isometries});
    for (int copy = 0; copy < static_cast<int>(sb.isometries.size()); ++copy) {
      const Matrix& iso_a = sb.isometries[static_cast<size_t>(copy)];
      for (int two_k = std::abs(sb.two_j - 1); two_k <= sb.two_j + 1; two_k += 2) {
        Matrix cg = su2_cg(sb.two_j, 1, two_k);
        Matrix iso = Eigen::kroneckerProduct(iso_a, y) * cg;
        Irrep k{GroupKind::SU2, 0, two_k};
        auto it = std::find_if(t.k_blocks.begin(), t.k_blocks.end(),
                               [&](const KBlock& b) { return b.K == k; });
        if (it == t.k_blocks.end()) {
          t.k_blocks.push_back(KBlock{k, {}});
          it = t.k_blocks.end() - 1;
        }
        it->entries.push_back(KEntry{a, copy, beta, 0, std::move(iso)});
      }
    }
  }
  std::sort(t.k_blocks.begin(), t.k_blocks.end(),
            [](const KBlock& x, const KBlock& y) { return x.K.two_j < y.K.two_j; });
  t.haar_degree = 2 * (n + 1);
  return t;
}

TaskRep make_phase_clone_task(int n) {
  if (n < 1) throw Error("BadParameterization", "need at least one clone");
  TaskRep t;
  t.group = GroupKind::U1;
  t.name = "clone-phase";
  t.d0 = Index(1) << n;
  t.d1 = 2;
  t.V = [n](const Matrix& g) {
    Index d = Index(1) << n;
    Matrix v = Matrix::Zero(d, d);
    for (Index x = 0; x < d; ++x)
      v(x, x) = std::pow(g(0, 0), std::popcount(static_cast<unsigned long long>(x)));
    return v;
  };
  t.U = [](const Matrix& g) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = g(0, 0);
    return u;
  };

  for (int b = 0; b <= 1; ++b) {
    Matrix e = Matrix::Zero(2, 1);
    e(b, 0) = 1.0;
    t.u_blocks.push_back(RepBlock{Irrep{GroupKind::U1, b}, {e}});
  }
  for (int a = 0; a <= n; ++a) t.v_blocks.push_back(RepBlock{Irrep{GroupKind::U1, a}, {}});
  Index d = Index(1) << n;
  for (Index x = 0; x < d; ++x) {
    int a = std::popcount(static_cast<unsigned long long>(x));
    Matrix e = Matrix::Zero(d, 1);
    e(x, 0) = 1.0;
    t.v_blocks[static_cast<size_t>(a)].copies.push_back(e);
  }

  // weight-K copies: |x>_0 (x) |b>_1 with popcount(x) - b = K
  for (int k = -1; k <= n; ++k) {
    KBlock blk{Irrep{GroupKind::U1, k}, {}};
    for (int b = 0; b <= 1; ++b) {
      int a = k + b;
      if (a < 0 || a > n) continue;
      const auto& vb = t.v_blocks[static_cast<size_t>(a)];
      for (int copy = 0; copy < static_cast<int>(vb.copies.size()); ++copy) {
        Matrix iso = Eigen::kroneckerProduct(vb.copies[static_cast<size_t>(copy)],
                                             t.u_blocks[static_cast<size_t>(b)].copies[0]);
        blk.entries.push_back(
            KEntry{vb.irrep, copy, t.u_blocks[static_cast<size_t>(b)].irrep, 0, std::move(iso)});
      }
    }
    if (!blk.entries.empty()) t.k_blocks.push_back(std::move(blk));
  }
  t.haar_degree = 2 * (n + 1);
  return t;
}

TaskRep make_sud_clone_task(int d) {
  if (d < 2) throw Error("BadParameterization", "need d >= 2");
  TaskRep t;
  t.group = GroupKind::SUd;
  t.sud_d = d;
  t.name = "clone-sud";
  t.d0 = Index(d) * d;
  t.d1 = d;
  t.V = [](const Matrix& g) { return Eigen::kroneckerProduct(g, g).eval(); };
  t.U = [](const Matrix& g) { return g; };

  Matrix psym = symmetric_subspace_isometry(d);
  Matrix pasym = antisymmetric_subspace_isometry(d);
  Irrep sym{GroupKind::SUd, 0, 0, SUdTag::Sym, d};
  Irrep asym{GroupKind::SUd, 0, 0, SUdTag::Antisym, d};
  Irrep def{GroupKind::SUd, 0, 0, SUdTag::Defining, d};
  t.v_blocks = {RepBlock{sym, {psym}}, RepBlock{asym, {pasym}}};
  t.u_blocks = {RepBlock{def, {Matrix::Identity(d, d)}}};

  // For each symmetry type s in {sym, asym}, the space (P_s (x) I) H
  // splits into a defining-rep copy spanned by
  //   w_i = sqrt(2/(d +- 1)) sum_j P_s(|i>|j>) (x) |j>
  // and its orthocomplement, which is irreducible.
  KBlock alpha_blk{Irrep{GroupKind::SUd, 0, 0, SUdTag::AlphaHat, d}, {}};
  auto make_parts = [&](const Matrix& proj_iso, const Irrep& a, SUdTag rest_tag) {
    Index ds = proj_iso.cols();
    Matrix p = proj_iso * proj_iso.adjoint();  // projector on d^2 space
    Matrix w = Matrix::Zero(t.d0 * d, d);
    for (int i = 0; i < d; ++i) {
      Vector col = Vector::Zero(t.d0 * d);
      for (int j = 0; j < d; ++j) {
        Vector pij = p.col(Index(i) * d + j);  // P_s |i j>
        for (Index r = 0; r < t.d0; ++r) col(r * d + j) += pij(r);
      }
      w.col(i) = col;
    }
    // normalize columns (they are orthogonal by construction)
    for (int i = 0; i < d; ++i) w.col(i) /= w.col(i).norm();
    alpha_blk.entries.push_back(KEntry{a, 0, def, 0, w});

    // orthocomplement of span(w) inside (P_s (x) I) H
    Matrix sfull = Eigen::kroneckerProduct(proj_iso, Matrix::Identity(d, d));
    Matrix overlap = w.adjoint() * sfull;  // d x (ds*d)
    Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullV);
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-10) ++rank;
    Matrix basis = svd.matrixV().rightCols(ds * d - rank);
    Matrix rest = sfull * basis;
    if (rest.cols() > 0) {
      Irrep rk{GroupKind::SUd, 0, 0, rest_tag, d};
      t.k_blocks.push_back(KBlock{rk, {KEntry{a, 0, def, 0, std::move(rest)}}});
    }
  };
  make_parts(psym, sym, SUdTag::BetaHat);
  if (d >= 2) make_parts(pasym, asym, SUdTag::GammaHat);
  t.k_blocks.insert(t.k_blocks.begin(), std::move(alpha_blk));
  t.haar_degree = 0;
  return t;
}

std::vector<HaarNode> task_haar_nodes(const TaskRep& t, int mc_count, std::uint64_t seed) {
  switch (t.group) {
    case GroupKind::U1: return u1_haar_nodes(t.haar_degree + 1);
    case GroupKind::SU2: return su2_haar_nodes(t.haar_degree);
    case GroupKind::SUd: return sud_haar_samples(t.sud_d, mc_count, seed);
  }
  throw Error("UnsupportedGroup", "unknown group kind");
}

}  // namespace combopt
