#include "combopt/groups.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace combopt {

namespace {

double factorial(int n) {
  static std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n > 170) throw Error("BadParameterization", "factorial out of range");
  return table[n];
}

// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>, all arguments doubled.
double cg_coeff(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tm1 + tm2 != tM) return 0.0;
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tJ + tM) % 2 != 0) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2 || (tj1 + tj2 + tJ) % 2 != 0) return 0.0;

  auto f2 = [](int twice) { return factorial(twice / 2); };
  double pre = std::sqrt((tJ + 1.0) * f2(tJ + tj1 - tj2) * f2(tJ - tj1 + tj2) *
                         f2(tj1 + tj2 - tJ) / f2(tj1 + tj2 + tJ + 2));
  pre *= std::sqrt(f2(tJ + tM) * f2(tJ - tM) * f2(tj1 - tm1) * f2(tj1 + tm1) *
                   f2(tj2 - tm2) * f2(tj2 + tm2));
  double sum = 0.0;
  // k doubled, stepping by 2 over the range where all factorials are defined
  int kmin = std::max(0, std::max(tj2 - tm1 - tJ, tj1 + tm2 - tJ));
  int kmax = std::min(tj1 + tj2 - tJ, std::min(tj1 - tm1, tj2 + tm2));
  for (int k = kmin; k <= kmax; k += 2) {
    double term = f2(k) * f2(tj1 + tj2 - tJ - k) * f2(tj1 - tm1 - k) * f2(tj2 + tm2 - k) *
                  f2(tJ - tj2 + tm1 + k) * f2(tJ - tj1 - tm2 + k);
    sum += ((k / 2) % 2 == 0 ? 1.0 : -1.0) / term;
  }
  return pre * sum;
}

}  // namespace

Index Irrep::dim() const {
  switch (group) {
    case GroupKind::U1: return 1;
    case GroupKind::SU2: return two_j + 1;
    case GroupKind::SUd: {
      Index d = sud_d;
      Index dp = d * (d + 1) / 2, dm = d * (d - 1) / 2;
      switch (tag) {
        case SUdTag::Defining: return d;
        case SUdTag::Sym: return dp;
        case SUdTag::Antisym: return dm;
        case SUdTag::AlphaHat: return d;
        case SUdTag::BetaHat: return d * (dp - 1);
        case SUdTag::GammaHat: return d * (dm - 1);
      }
    }
  }
  return 0;
}

std::string Irrep::name() const {
  switch (group) {
    case GroupKind::U1: return "w" + std::to_string(weight);
    case GroupKind::SU2:
      return (two_j % 2 == 0) ? "j" + std::to_string(two_j / 2)
                              : "j" + std::to_string(two_j) + "/2";
    case GroupKind::SUd:
      switch (tag) {
        case SUdTag::Defining: return "def";
        case SUdTag::Sym: return "sym";
        case SUdTag::Antisym: return "asym";
        case SUdTag::AlphaHat: return "alpha";
        case SUdTag::BetaHat: return "beta";
        case SUdTag::GammaHat: return "gamma";
      }
  }
  return "?";
}

Matrix su2_cg(int two_j1, int two_j2, int two_j) {
  Index d1 = two_j1 + 1, d2 = two_j2 + 1, dJ = two_j + 1;
  Matrix c = Matrix::Zero(d1 * d2, dJ);
  for (Index iM = 0; iM < dJ; ++iM) {
    int tM = two_j - 2 * static_cast<int>(iM);
    for (Index i1 = 0; i1 < d1; ++i1) {
      int tm1 = two_j1 - 2 * static_cast<int>(i1);
      int tm2 = tM - tm1;
      if (std::abs(tm2) > two_j2) continue;
      Index i2 = (two_j2 - tm2) / 2;
      c(i1 * d2 + i2, iM) = cg_coeff(two_j1, tm1, two_j2, tm2, two_j, tM);
    }
  }
  return c;
}

Matrix su2_y(int two_j) {
  Index d = two_j + 1;
  Matrix y = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    // column index i has m = j - i; row with m' = -m is index two_j - i
    int tm = two_j - 2 * static_cast<int>(i);
    double sign = (((two_j - tm) / 2) % 2 == 0) ? 1.0 : -1.0;
    y(two_j - i, i) = sign;
  }
  return y;
}

Matrix su2_jz(int two_j) {
  Index d = two_j + 1;
  Matrix jz = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) jz(i, i) = 0.5 * (two_j - 2 * static_cast<int>(i));
  return jz;
}

Matrix su2_jplus(int two_j) {
  Index d = two_j + 1;
  Matrix jp = Matrix::Zero(d, d);
  double j = 0.5 * two_j;
  for (Index i = 1; i < d; ++i) {
    double m = j - static_cast<double>(i);  // J+ |j,m> = sqrt(j(j+1)-m(m+1)) |j,m+1>
    jp(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return jp;
}

Matrix su2_wigner(int two_j, const Matrix& g) {
  if (g.rows() != 2 || g.cols() != 2 || !((g.adjoint() * g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10))
    throw Error("NotUnitary", "expected a 2x2 special unitary");
  // g = a0 I - i v.sigma with a0, v real
  double a0 = 0.5 * g.trace().real();
  double vx = 0.5 * (Complex(0, 1) * (g(0, 1) + g(1, 0))).real();
  double vy = 0.5 * (g(1, 0) - g(0, 1)).real();
  double vz = 0.5 * (Complex(0, 1) * (g(0, 0) - g(1, 1))).real();
  double vn = std::sqrt(vx * vx + vy * vy + vz * vz);
  double theta = 2.0 * std::atan2(vn, a0);
  double nx = 0, ny = 0, nz = 1;
  if (vn > 1e-14) {
    nx = vx / vn;
    ny = vy / vn;
    nz = vz / vn;
  }
  Matrix jp = su2_jplus(two_j);
  Matrix jx = 0.5 * (jp + jp.adjoint());
  Matrix jy = Complex(0, -0.5) * (jp - jp.adjoint());
  Matrix h = nx * jx + ny * jy + nz * su2_jz(two_j);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(es.eigenvalues().size());
  for (Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0, -theta * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<SpinBlock> su2_schur_basis(int n_qubits) {
  if (n_qubits < 1) throw Error("BadParameterization", "need at least one qubit");
  // entries: (two_j, isometry 2^k x (two_j+1))
  std::vector<std::pair<int, Matrix>> cur{{1, Matrix::Identity(2, 2)}};
  for (int k = 2; k <= n_qubits; ++k) {
    std::vector<std::pair<int, Matrix>> next;
    for (const auto& [tj, iso] : cur) {
      for (int tJ = std::abs(tj - 1); tJ <= tj + 1; tJ += 2) {
        Matrix cg = su2_cg(tj, 1, tJ);  // (d_j*2) x d_J
        Matrix lifted = Eigen::kroneckerProduct(iso, Matrix::Identity(2, 2)) * cg;
        next.emplace_back(tJ, std::move(lifted));
      }
    }
    cur = std::move(next);
  }
  std::vector<SpinBlock> out;
  for (const auto& [tj, iso] : cur) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SpinBlock& b) { return b.two_j == tj; });
    if (it == out.end()) {
      out.push_back(SpinBlock{tj, {iso}});
    } else {
      it->isometries.push_back(iso);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SpinBlock& x, const SpinBlock& y) { return x.two_j < y.two_j; });
  return out;
}

Matrix symmetric_subspace_isometry(int d) {
  Index dp = d * (d + 1) / 2;
  Matrix p = Matrix::Zero(Index(d) * d, dp);
  Index c = 0;
  for (int i = 0; i < d; ++i) {
    p(Index(i) * d + i, c++) = 1.0;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      p(Index(i) * d + j, c) = 1.0 / std::numbers::sqrt2;
      p(Index(j) * d + i, c) = 1.0 / std::numbers::sqrt2;
      ++c;
    }
  return p;
}

Matrix antisymmetric_subspace_isometry(int d) {
  Index dm = d * (d - 1) / 2;
  Matrix p = Matrix::Zero(Index(d) * d, dm);
  Index c = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      p(Index(i) * d + j, c) = 1.0 / std::numbers::sqrt2;
      p(Index(j) * d + i, c) = -1.0 / std::numbers::sqrt2;
      ++c;
    }
  return p;
}

std::vector<HaarNode> u1_haar_nodes(int n) {
  if (n < 1) throw Error("QuadratureInsufficient", "need at least one node");
  std::vector<HaarNode> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Matrix g(1, 1);
    g(0, 0) = std::exp(Complex(0, 2.0 * std::numbers::pi * k / n));
    out.push_back({g, 1.0 / n});
  }
  return out;
}

Matrix su2_euler(double alpha, double beta, double gamma) {
  Matrix rz1(2, 2), ry(2, 2), rz2(2, 2);
  rz1 << std::exp(Complex(0, -alpha / 2)), 0, 0, std::exp(Complex(0, alpha / 2));
  ry << std::cos(beta / 2), -std::sin(beta / 2), std::sin(beta / 2), std::cos(beta / 2);
  rz2 << std::exp(Complex(0, -gamma / 2)), 0, 0, std::exp(Complex(0, gamma / 2));
  return rz1 * ry * rz2;
}

std::vector<HaarNode> su2_haar_nodes(int degree_two_j) {
  int na = 2 * degree_two_j + 2;
  int nc = 2 * degree_two_j + 2;
  int nb = degree_two_j + 1;
  std::vector<double> x, w;
  gauss_legendre(nb, x, w);
  std::vector<HaarNode> out;
  out.reserve(static_cast<size_t>(na) * nb * nc);
  for (int ia = 0; ia < na; ++ia) {
    double alpha = 2.0 * std::numbers::pi * ia / na;
    for (int ib = 0; ib < nb; ++ib) {
      double beta = std::acos(x[static_cast<size_t>(ib)]);
      for (int ic = 0; ic < nc; ++ic) {
        double gamma = 4.0 * std::numbers::pi * ic / nc;
        out.push_back({su2_euler(alpha, beta, gamma),
                       w[static_cast<size_t>(ib)] / (2.0 * na * nc)});
      }
    }
  }
  return out;
}

std::vector<HaarNode> sud_haar_samples(int d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<HaarNode> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Matrix z(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) z(i, j) = Complex(nd(rng), nd(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix r = q.adjoint() * z;
    for (Index i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    Complex det = q.determinant();
    q *= std::exp(Complex(0, -std::arg(det) / d));
    out.push_back({q, 1.0 / count});
  }
  return out;
}

Index RepSpec::total_dim() const {
  Index d = 0;
  for (const auto& [x, m] : content) d += x.dim() * m;
  return d;
}

namespace {

unsigned long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
  return r;
}

// alpha-hat intertwiner columns inside H_{sym/antisym} (x) H_def*:
// w_i = sqrt(2/(d+-1)) sum_j (P^dagger (|i> (x) |j>)) (x) |j>.
Matrix alpha_hat_intertwiner(const Matrix& p_iso, int d) {
  Index dsub = p_iso.cols();
  Matrix w = Matrix::Zero(dsub * d, d);
  for (Index i = 0; i < d; ++i)
    for (Index s = 0; s < dsub; ++s)
      for (Index j = 0; j < d; ++j)
        w(s * d + j, i) = std::conj(p_iso(i * d + j, s));
  for (Index i = 0; i < d; ++i) w.col(i).normalize();
  return w;
}

Matrix orthocomplement(const Matrix& w) {
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(w.rows() - w.cols());
}

Matrix hat_irrep_matrix(SUdTag tag, const Matrix& g) {
  int d = static_cast<int>(g.rows());
  Matrix p = (tag == SUdTag::BetaHat) ? symmetric_subspace_isometry(d)
                                      : antisymmetric_subspace_isometry(d);
  Matrix sub = p.adjoint() * Eigen::kroneckerProduct(g, g) * p;
  Matrix big = Eigen::kroneckerProduct(sub, g.conjugate());
  Matrix q = orthocomplement(alpha_hat_intertwiner(p, d));
  return q.adjoint() * big * q;
}

}  // namespace

Matrix irrep_matrix(const Irrep& x, const Matrix& g) {
  switch (x.group) {
    case GroupKind::U1: {
      if (g.rows() != 1 || g.cols() != 1 || std::abs(std::abs(g(0, 0)) - 1.0) > 1e-9)
        throw Error("BadParameterization", "U(1) element must be a unit-modulus 1x1 matrix");
      Matrix m(1, 1);
      m(0, 0) = std::pow(g(0, 0), static_cast<double>(x.weight));
      return m;
    }
    case GroupKind::SU2: {
      if (g.rows() != 2 || g.cols() != 2)
        throw Error("BadParameterization", "SU(2) element must be a 2x2 matrix");
      return su2_wigner(x.two_j, g);
    }
    case GroupKind::SUd: {
      int d = x.sud_d;
      if (g.rows() != d || g.cols() != d)
        throw Error("BadParameterization", "SU(d) element has the wrong dimension");
      switch (x.tag) {
        case SUdTag::Defining:
        case SUdTag::AlphaHat:  // equivalent to the defining irrep
          return g;
        case SUdTag::Sym: {
          Matrix p = symmetric_subspace_isometry(d);
          return p.adjoint() * Eigen::kroneckerProduct(g, g) * p;
        }
        case SUdTag::Antisym: {
          Matrix p = antisymmetric_subspace_isometry(d);
          return p.adjoint() * Eigen::kroneckerProduct(g, g) * p;
        }
        case SUdTag::BetaHat:
        case SUdTag::GammaHat:
          if (x.dim() == 0) return Matrix(0, 0);
          return hat_irrep_matrix(x.tag, g);
      }
    }
  }
  throw Error("UnsupportedGroup", "unknown group kind");
}

ConjugateTensorDecomposition decompose_tensor_with_conjugate(const RepSpec& target,
                                                             const Irrep& beta) {
  if (target.group != beta.group)
    throw Error("IrrepMismatch", "target and input irrep are over different groups");
  ConjugateTensorDecomposition out;
  std::vector<std::vector<std::pair<Irrep, int>>> rows;
  for (const auto& [a, ma] : target.content) {
    out.a_irreps.push_back(a);
    std::vector<std::pair<Irrep, int>> row;
    switch (target.group) {
      case GroupKind::U1:
        row.push_back({Irrep{GroupKind::U1, a.weight - beta.weight, 0, SUdTag::Defining, 0}, ma});
        break;
      case GroupKind::SU2:
        for (int tk = std::abs(a.two_j - beta.two_j); tk <= a.two_j + beta.two_j; tk += 2)
          row.push_back({Irrep{GroupKind::SU2, 0, tk, SUdTag::Defining, 0}, ma});
        break;
      case GroupKind::SUd: {
        if (beta.tag != SUdTag::Defining)
          throw Error("UnsupportedGroup", "SU(d) decomposition only against the defining irrep");
        int d = target.sud_d;
        Irrep alpha{GroupKind::SUd, 0, 0, SUdTag::AlphaHat, d};
        if (a.tag == SUdTag::Sym) {
          row.push_back({alpha, ma});
          row.push_back({Irrep{GroupKind::SUd, 0, 0, SUdTag::BetaHat, d}, ma});
        } else if (a.tag == SUdTag::Antisym) {
          row.push_back({alpha, ma});
          if (d > 2) row.push_back({Irrep{GroupKind::SUd, 0, 0, SUdTag::GammaHat, d}, ma});
        } else {
          throw Error("UnsupportedGroup", "SU(d) target must decompose into sym/antisym pieces");
        }
        break;
      }
    }
    for (const auto& [k, m] : row)
      if (std::find(out.k_irreps.begin(), out.k_irreps.end(), k) == out.k_irreps.end())
        out.k_irreps.push_back(k);
    rows.push_back(std::move(row));
  }
  std::sort(out.k_irreps.begin(), out.k_irreps.end());
  out.mult = Eigen::MatrixXi::Zero(static_cast<Index>(rows.size()),
                                   static_cast<Index>(out.k_irreps.size()));
  for (size_t ia = 0; ia < rows.size(); ++ia)
    for (const auto& [k, m] : rows[ia]) {
      auto it = std::find(out.k_irreps.begin(), out.k_irreps.end(), k);
      out.mult(static_cast<Index>(ia), it - out.k_irreps.begin()) += m;
    }
  return out;
}

RepSpec su2_power_decomposition(int n) {
  if (n < 1) throw Error("BadParameterization", "need at least one tensor factor");
  RepSpec rep;
  rep.group = GroupKind::SU2;
  for (int ta = n; ta >= n % 2; ta -= 2) {
    unsigned long long m =
        binom(n, (n + ta) / 2) * static_cast<unsigned long long>(ta + 1) /
        static_cast<unsigned long long>((n + ta) / 2 + 1);
    rep.content.push_back({Irrep{GroupKind::SU2, 0, ta, SUdTag::Defining, 0},
                           static_cast<int>(m)});
  }
  return rep;
}

std::vector<HaarNode> haar_nodes(GroupKind group, int degree_or_count, int sud_d,
                                 std::uint64_t seed) {
  switch (group) {
    case GroupKind::U1: return u1_haar_nodes(degree_or_count + 1);
    case GroupKind::SU2: return su2_haar_nodes(degree_or_count);
    case GroupKind::SUd:
      if (sud_d < 2) throw Error("UnsupportedGroup", "SU(d) needs d >= 2");
      return sud_haar_samples(sud_d, degree_or_count, seed);
  }
  throw Error("UnsupportedGroup", "unknown group kind");
}

IsotypicProjectors isotypic_projectors(const std::function<Matrix(const Matrix&)>& rep,
                                       const std::vector<Irrep>& candidates,
                                       const std::vector<HaarNode>& nodes,
                                       double tol) {
  IsotypicProjectors out;
  Index dim = 0;
  std::vector<Matrix> reps;
  reps.reserve(nodes.size());
  for (const auto& n : nodes) reps.push_back(rep(n.g));
  dim = reps.empty() ? 0 : reps[0].rows();
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& k : candidates) {
    Matrix p = Matrix::Zero(dim, dim);
    for (size_t i = 0; i < nodes.size(); ++i) {
      Complex chi = irrep_matrix(k, nodes[i].g).trace();
      p += nodes[i].w * std::conj(chi) * reps[i];
    }
    p *= static_cast<double>(k.dim());
    if ((p * p - p).cwiseAbs().maxCoeff() > tol)
      throw Error("QuadratureInsufficient",
                  "character average for " + k.name() + " is not a projector");
    double tr = p.trace().real();
    int mult = static_cast<int>(std::lround(tr / static_cast<double>(k.dim())));
    if (mult == 0) continue;
    total += p;
    out.irreps.push_back(k);
    out.mults.push_back(mult);
    out.projectors.push_back(std::move(p));
  }
  if ((total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol)
    throw Error("QuadratureInsufficient", "isotypic projectors do not resolve the identity");
  return out;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<size_t>(i)] = -z;
    x[static_cast<size_t>(n - 1 - i)] = z;
    w[static_cast<size_t>(i)] = w[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace combopt
