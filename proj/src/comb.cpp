#include "combopt/comb.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace combopt {

namespace {

Matrix random_isometry(Index rows, Index cols, std::mt19937_64& rng) {
  if (rows < cols) throw Error("DimMismatch", "isometry needs rows >= cols");
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix z(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) z(i, j) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = q.adjoint() * z;
  for (Index j = 0; j < cols; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

// Choi of the channel tracing out `env_dim` final dimensions of an isometry.
ChoiOperator isometry_channel_choi(const Matrix& iso, const std::vector<SubsystemLabel>& in,
                                   const std::vector<SubsystemLabel>& out, Index env_dim) {
  Index dout = 1;
  for (const auto& l : out) dout *= l.dim;
  std::vector<Matrix> kraus;
  for (Index e = 0; e < env_dim; ++e) {
    Matrix k(dout, iso.cols());
    for (Index o = 0; o < dout; ++o) k.row(o) = iso.row(o * env_dim + e);
    kraus.push_back(std::move(k));
  }
  return choi_from_kraus(kraus, in, out);
}

}  // namespace

CombResidual verify_comb(const LabeledOperator& r, const CombSpec& spec) {
  if (spec.spaces.size() % 2 != 0 || spec.spaces.empty())
    throw Error("LabelMismatch", "comb needs an even, positive number of spaces");
  std::vector<std::string> order;
  for (const auto& s : spec.spaces) order.push_back(s.name);
  for (const auto& s : spec.spaces)
    if (!r.has_label(s.name) || r.label_dim(s.name) != s.dim)
      throw Error("LabelMismatch", "operator is missing comb space '" + s.name + "'");
  if (r.n_labels() != static_cast<Index>(spec.spaces.size()))
    throw Error("LabelMismatch", "operator carries extra labels");
  LabeledOperator cur = relabel_and_permute(r, order);

  CombResidual res;
  res.level_residuals.push_back((cur.matrix() - cur.matrix().adjoint()).cwiseAbs().maxCoeff());
  res.min_eigenvalue = min_hermitian_eigenvalue(cur.matrix());

  int n = static_cast<int>(spec.spaces.size()) / 2;
  for (int j = n; j >= 1; --j) {
    const std::string& out_lbl = spec.spaces[static_cast<size_t>(2 * j - 1)].name;
    const std::string& in_lbl = spec.spaces[static_cast<size_t>(2 * j - 2)].name;
    Index din = spec.spaces[static_cast<size_t>(2 * j - 2)].dim;
    LabeledOperator t = partial_trace(cur, {out_lbl});
    LabeledOperator prev = partial_trace(t, {in_lbl});
    prev.matrix() /= static_cast<double>(din);
    LabeledOperator cmp =
        (prev.n_labels() > 0)
            ? tensor_product(prev, identity_operator({spec.spaces[static_cast<size_t>(2 * j - 2)]}))
            : identity_operator({spec.spaces[static_cast<size_t>(2 * j - 2)]});
    if (prev.n_labels() == 0) cmp.matrix() *= prev.matrix()(0, 0);
    res.level_residuals.push_back((t.matrix() - cmp.matrix()).cwiseAbs().maxCoeff());
    cur = prev;
  }
  // after peeling everything the leftover scalar must be 1
  res.level_residuals.push_back(std::abs(cur.matrix()(0, 0) - 1.0));
  return res;
}

void require_comb(const LabeledOperator& r, const CombSpec& spec, double tol) {
  CombResidual res = verify_comb(r, spec);
  if (!res.pass(tol)) {
    double worst = -res.min_eigenvalue;
    for (double v : res.level_residuals) worst = std::max(worst, v);
    throw Error("NotAComb", "comb constraints violated by " + std::to_string(worst));
  }
}

LabeledOperator random_deterministic_comb(const CombSpec& spec,
                                          const std::vector<Index>& ancilla_dims,
                                          std::uint64_t seed) {
  size_t n = spec.spaces.size() / 2;
  if (spec.spaces.size() % 2 != 0 || n == 0)
    throw Error("LabelMismatch", "comb needs an even, positive number of spaces");
  if (ancilla_dims.size() + 1 != n)
    throw Error("DimMismatch", "need one ancilla dimension per internal memory wire");
  std::mt19937_64 rng(seed);

  std::vector<LabeledOperator> pieces;
  Index mem_in = 1;
  for (size_t j = 0; j < n; ++j) {
    const auto& in_space = spec.spaces[2 * j];
    const auto& out_space = spec.spaces[2 * j + 1];
    Index mem_out = (j + 1 < n) ? ancilla_dims[j] : 1;

    std::vector<SubsystemLabel> in{{in_space}};
    if (mem_in > 1) in.insert(in.begin(), SubsystemLabel{"mem" + std::to_string(j), mem_in});
    std::vector<SubsystemLabel> out{{out_space}};
    if (mem_out > 1) out.push_back(SubsystemLabel{"mem" + std::to_string(j + 1), mem_out});

    Index din = in_space.dim * mem_in;
    Index dout = out_space.dim * mem_out;
    Index env = din;  // guarantees an isometry exists and the channel is generic
    Matrix iso = random_isometry(dout * env, din, rng);
    pieces.push_back(isometry_channel_choi(iso, in, out, env).op);
    mem_in = mem_out;
  }
  LabeledOperator r = link_chain(pieces);
  std::vector<std::string> order;
  for (const auto& s : spec.spaces) order.push_back(s.name);
  return relabel_and_permute(r, order);
}

LabeledOperator twirl(const LabeledOperator& op, const std::vector<std::string>& labels,
                      const std::vector<std::pair<Matrix, double>>& unitaries) {
  std::vector<std::string> order = labels;
  for (const auto& l : op.labels())
    if (std::find(labels.begin(), labels.end(), l.name) == labels.end())
      order.push_back(l.name);
  LabeledOperator p = relabel_and_permute(op, order);
  Index dw = 1;
  for (const auto& name : labels) dw *= op.label_dim(name);
  Index drest = p.dim() / dw;

  Matrix acc = Matrix::Zero(p.dim(), p.dim());
  for (const auto& [w, weight] : unitaries) {
    if (w.rows() != dw)
      throw Error("DimMismatch", "twirl unitary has wrong dimension");
    Matrix big = Eigen::kroneckerProduct(w, Matrix::Identity(drest, drest));
    acc += weight * (big * p.matrix() * big.adjoint());
  }
  LabeledOperator out(p.labels(), std::move(acc));
  return relabel_and_permute(out, op.label_names());
}

LabeledOperator covariantize(const LabeledOperator& r, const TaskRep& t,
                             const std::vector<HaarNode>& nodes) {
  std::vector<std::pair<Matrix, double>> w01, w23;
  w01.reserve(nodes.size());
  w23.reserve(nodes.size());
  for (const auto& n : nodes) {
    Matrix v = t.V(n.g), u = t.U(n.g);
    w01.emplace_back(Eigen::kroneckerProduct(v, u.conjugate()).eval(), n.w);
    w23.emplace_back(Eigen::kroneckerProduct(u, v.conjugate()).eval(), n.w);
  }
  LabeledOperator mid = twirl(r, {"0", "1"}, w01);
  return twirl(mid, {"2", "3"}, w23);
}

double covariance_violation(const LabeledOperator& r, const TaskRep& t,
                            const std::vector<HaarNode>& samples) {
  LabeledOperator p = relabel_and_permute(r, {"0", "1", "2", "3"});
  double worst = 0.0;
  for (const auto& n : samples) {
    Matrix v = t.V(n.g), u = t.U(n.g);
    Matrix w = Eigen::kroneckerProduct(
                   Eigen::kroneckerProduct(v, u.conjugate()).eval(),
                   Eigen::kroneckerProduct(u, v.conjugate()).eval())
                   .eval();
    worst = std::max(worst, (w * p.matrix() - p.matrix() * w).cwiseAbs().maxCoeff());
  }
  return worst;
}

ChoiOperator insert_channel(const LabeledOperator& r, const ChoiOperator& u) {
  LabeledOperator c = link_product(r, u.op);
  c = relabel_and_permute(c, {"3", "0"});
  return ChoiOperator{std::move(c), {"0"}, {"3"}};
}

FidelityEstimate fidelity_haar(const LabeledOperator& r, const TaskRep& t,
                               const std::vector<HaarNode>& nodes, bool monte_carlo) {
  LabeledOperator p = relabel_and_permute(r, {"0", "1", "2", "3"});
  Index d0 = t.d0, d1 = t.d1;
  double mean = 0.0, m2 = 0.0;
  std::vector<double> vals;
  vals.reserve(nodes.size());
  for (const auto& n : nodes) {
    Matrix v = t.V(n.g), u = t.U(n.g);
    Vector omega(d0 * d1 * d1 * d0);
    for (Index np = 0; np < d0; ++np)
      for (Index mp = 0; mp < d1; ++mp)
        for (Index m = 0; m < d1; ++m)
          for (Index nn = 0; nn < d0; ++nn)
            omega(((np * d1 + mp) * d1 + m) * d0 + nn) = std::conj(u(m, mp)) * v(nn, np);
    double val = (omega.adjoint() * p.matrix() * omega)(0, 0).real() /
                 static_cast<double>(d0 * d0);
    mean += n.w * val;
    vals.push_back(val);
  }
  FidelityEstimate est;
  est.value = mean;
  if (monte_carlo && nodes.size() > 1) {
    for (size_t i = 0; i < vals.size(); ++i)
      m2 += nodes[i].w * (vals[i] - mean) * (vals[i] - mean);
    est.std_error = std::sqrt(m2 / (static_cast<double>(vals.size()) - 1.0));
  }
  return est;
}

ParallelDecomposition decompose_parallel(const LabeledOperator& r, const TaskRep& t,
                                         const std::vector<HaarNode>& samples,
                                         double cov_tol) {
  if (covariance_violation(r, t, samples) > cov_tol)
    throw Error("NotCovariant", "comb does not commute with the task symmetry");
  Index d0 = t.d0, d1 = t.d1;
  CombSpec spec{{{"0", d0}, {"1", d1}, {"2", d1}, {"3", d0}}};
  require_comb(r, spec);

  LabeledOperator rp = relabel_and_permute(r, {"0", "1", "2", "3"});
  LabeledOperator s = partial_trace(rp, {"3"});  // on 0,1,2
  Matrix ssqrt = psd_sqrt(s.matrix(), 1e-8);
  Matrix sinv = psd_inv_sqrt(s.matrix());
  Matrix pis = support_projector(s.matrix());

  Index ds = s.dim();
  std::vector<SubsystemLabel> e_labels{{"0p", d0}, {"1p", d1}, {"2p", d1}};

  // |S^{1/2}>><<S^{1/2}| on (0,1,2) (x) (0p,1p,2p)
  Vector vec(ds * ds);
  for (Index x = 0; x < ds; ++x)
    for (Index y = 0; y < ds; ++y) vec(x * ds + y) = ssqrt(x, y);
  std::vector<SubsystemLabel> both = s.labels();
  both.insert(both.end(), e_labels.begin(), e_labels.end());
  LabeledOperator shalf(both, vec * vec.adjoint());

  ChoiOperator id_choi = choi_of_unitary(Matrix::Identity(d1, d1), {{"1", d1}}, {{"2", d1}});
  LabeledOperator c1op = link_product(shalf, id_choi.op);  // on 0, 0p,1p,2p
  ChoiOperator c1{relabel_and_permute(c1op, {"2p", "0p", "1p", "0"}),
                  {"0"},
                  {"2p", "0p", "1p"}};

  // C2 = T S^{-1/2} R S^{-1/2} T^dagger + (I - Pi_S) (x) I/d0
  Matrix sandwich = Eigen::kroneckerProduct(sinv, Matrix::Identity(d0, d0));
  Matrix c2m = sandwich * rp.matrix() * sandwich;
  Matrix rest = Eigen::kroneckerProduct(Matrix::Identity(ds, ds) - pis,
                                        Matrix::Identity(d0, d0) / static_cast<double>(d0));
  std::vector<SubsystemLabel> c2_labels{{"0p", d0}, {"1p", d1}, {"2p", d1}, {"3", d0}};
  ChoiOperator c2{LabeledOperator(c2_labels, c2m + rest), {"2p", "0p", "1p"}, {"3"}};

  ParallelDecomposition out;
  out.c1 = std::move(c1);
  out.c2 = std::move(c2);
  out.memory_dim = d0 * d1;
  out.slot_out = "2p";
  out.memory_labels = {"0p", "1p"};
  return out;
}

Index MultiplicityPattern::full_dim() const {
  Index d = 0;
  for (size_t i = 0; i < dims.size(); ++i) d += dims[i] * mults[i];
  return d;
}

Index MultiplicityPattern::reduced_dim() const {
  return std::accumulate(dims.begin(), dims.end(), Index(0));
}

Matrix pattern_full_matrix(const MultiplicityPattern& pat, const std::vector<Matrix>& irrep_mats) {
  Index d = pat.full_dim();
  Matrix m = Matrix::Zero(d, d);
  Index off = 0;
  for (size_t b = 0; b < pat.dims.size(); ++b) {
    Index blk = pat.dims[b] * pat.mults[b];
    m.block(off, off, blk, blk) =
        Eigen::kroneckerProduct(irrep_mats[b], Matrix::Identity(pat.mults[b], pat.mults[b]));
    off += blk;
  }
  return m;
}

Matrix pattern_reduced_matrix(const MultiplicityPattern& pat,
                              const std::vector<Matrix>& irrep_mats) {
  Index d = pat.reduced_dim();
  Matrix m = Matrix::Zero(d, d);
  Index off = 0;
  for (size_t b = 0; b < pat.dims.size(); ++b) {
    m.block(off, off, pat.dims[b], pat.dims[b]) = irrep_mats[b];
    off += pat.dims[b];
  }
  return m;
}

ConversionCombs multiplicity_conversion_combs(const MultiplicityPattern& pat) {
  if (pat.dims.size() != pat.mults.size() || pat.dims.empty())
    throw Error("IrrepMismatch", "pattern dims/mults mismatch");
  for (int m : pat.mults)
    if (m < 1) throw Error("IrrepMismatch", "multiplicities must be >= 1");
  Index dfull = pat.full_dim();
  Index dred = pat.reduced_dim();

  // embedding V : H' -> H picking the first multiplicity copy in each block
  Matrix v = Matrix::Zero(dfull, dred);
  {
    Index of = 0, orr = 0;
    for (size_t b = 0; b < pat.dims.size(); ++b) {
      for (Index x = 0; x < pat.dims[b]; ++x) v(of + x * pat.mults[b], orr + x) = 1.0;
      of += pat.dims[b] * pat.mults[b];
      orr += pat.dims[b];
    }
  }

  ConversionCombs out;
  {
    ChoiOperator x = choi_of_unitary(v, {{"0", dred}}, {{"1", dfull}});
    std::vector<Matrix> ykraus{v.adjoint()};
    // depolarizing completion on the complement of range(V)
    for (Index c = 0; c < dfull; ++c) {
      Vector col = Vector::Zero(dfull);
      col(c) = 1.0;
      Vector resid = col - v * (v.adjoint() * col);
      if (resid.norm() < 0.5) continue;  // basis vector inside range(V)
      for (Index j = 0; j < dred; ++j) {
        Matrix k = Matrix::Zero(dred, dfull);
        k(j, c) = 1.0 / std::sqrt(static_cast<double>(dred));
        ykraus.push_back(std::move(k));
      }
    }
    ChoiOperator y = choi_from_kraus(ykraus, {{"2", dfull}}, {{"3", dred}});
    out.reduce = relabel_and_permute(tensor_product(x.op, y.op), {"0", "1", "2", "3"});
  }

  Index mdim = *std::max_element(pat.mults.begin(), pat.mults.end());
  out.memory_dim = mdim;
  {
    // Vt : H -> H' (x) M,  |beta,x,i> -> |beta,x>|i>
    Matrix vt = Matrix::Zero(dred * mdim, dfull);
    Index of = 0, orr = 0;
    for (size_t b = 0; b < pat.dims.size(); ++b) {
      for (Index x = 0; x < pat.dims[b]; ++x)
        for (Index i = 0; i < pat.mults[b]; ++i)
          vt((orr + x) * mdim + i, of + x * pat.mults[b] + i) = 1.0;
      of += pat.dims[b] * pat.mults[b];
      orr += pat.dims[b];
    }
    ChoiOperator xt =
        choi_of_unitary(vt, {{"0", dfull}}, {{"1", dred}, {"M", mdim}});
    std::vector<Matrix> ykraus{vt.adjoint()};
    for (Index c = 0; c < dred * mdim; ++c) {
      Vector col = Vector::Zero(dred * mdim);
      col(c) = 1.0;
      Vector resid = col - vt * (vt.adjoint() * col);
      if (resid.norm() < 0.5) continue;
      for (Index j = 0; j < dfull; ++j) {
        Matrix k = Matrix::Zero(dfull, dred * mdim);
        k(j, c) = 1.0 / std::sqrt(static_cast<double>(dfull));
        ykraus.push_back(std::move(k));
      }
    }
    ChoiOperator yt = choi_from_kraus(ykraus, {{"2", dred}, {"M", mdim}}, {{"3", dfull}});
    LabeledOperator linked = link_product(xt.op, yt.op);
    out.expand = relabel_and_permute(linked, {"0", "1", "2", "3"});
  }
  return out;
}

}  // namespace combopt
