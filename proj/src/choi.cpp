#include "combopt/choi.hpp"

#include <algorithm>
#include <set>

namespace combopt {

namespace {

Index dim_of(const std::vector<SubsystemLabel>& labels) {
  Index d = 1;
  for (const auto& l : labels) d *= l.dim;
  return d;
}

}  // namespace

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() < tol;
}

ChoiOperator choi_of_unitary(const Matrix& u, const std::vector<SubsystemLabel>& in,
                             const std::vector<SubsystemLabel>& out, bool require_unitary) {
  Index din = dim_of(in), dout = dim_of(out);
  if (u.rows() != dout || u.cols() != din)
    throw Error("DimMismatch", "operator shape does not match in/out labels");
  if (require_unitary) {
    bool isometry = (u.adjoint() * u - Matrix::Identity(din, din)).cwiseAbs().maxCoeff() < 1e-10;
    if (!isometry || (din == dout && !is_unitary(u)))
      throw Error("NotUnitary", "matrix is not an isometry/unitary");
  }
  Vector v(dout * din);
  for (Index n = 0; n < dout; ++n)
    for (Index m = 0; m < din; ++m) v(n * din + m) = u(n, m);
  std::vector<SubsystemLabel> labels = out;
  labels.insert(labels.end(), in.begin(), in.end());
  Matrix c = v * v.adjoint();
  std::vector<std::string> in_names, out_names;
  for (const auto& l : in) in_names.push_back(l.name);
  for (const auto& l : out) out_names.push_back(l.name);
  return ChoiOperator{LabeledOperator(std::move(labels), std::move(c)), in_names, out_names};
}

ChoiOperator choi_from_kraus(const std::vector<Matrix>& kraus,
                             const std::vector<SubsystemLabel>& in,
                             const std::vector<SubsystemLabel>& out) {
  Index din = dim_of(in), dout = dim_of(out);
  if (kraus.empty()) throw Error("DimMismatch", "empty Kraus list");
  std::vector<SubsystemLabel> labels = out;
  labels.insert(labels.end(), in.begin(), in.end());
  Matrix c = Matrix::Zero(dout * din, dout * din);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw Error("DimMismatch", "Kraus operator shape mismatch");
    Vector v(dout * din);
    for (Index n = 0; n < dout; ++n)
      for (Index m = 0; m < din; ++m) v(n * din + m) = k(n, m);
    c += v * v.adjoint();
  }
  std::vector<std::string> in_names, out_names;
  for (const auto& l : in) in_names.push_back(l.name);
  for (const auto& l : out) out_names.push_back(l.name);
  return ChoiOperator{LabeledOperator(std::move(labels), std::move(c)), in_names, out_names};
}

LabeledOperator link_product(const LabeledOperator& m, const LabeledOperator& n) {
  // Shared labels, in the order they appear in m.
  std::vector<SubsystemLabel> shared, m_only, n_only;
  for (const auto& l : m.labels()) {
    if (n.has_label(l.name)) {
      if (n.labels()[n.label_pos(l.name)].dim != l.dim)
        throw Error("DimMismatch", "shared label '" + l.name + "' has mismatched dims");
      shared.push_back(l);
    } else {
      m_only.push_back(l);
    }
  }
  for (const auto& l : n.labels())
    if (!m.has_label(l.name)) n_only.push_back(l);

  std::vector<std::string> m_order, n_order;
  for (const auto& l : m_only) m_order.push_back(l.name);
  for (const auto& l : shared) m_order.push_back(l.name);
  for (const auto& l : shared) n_order.push_back(l.name);
  for (const auto& l : n_only) n_order.push_back(l.name);

  LabeledOperator mp = relabel_and_permute(m, m_order);
  LabeledOperator np = relabel_and_permute(n, n_order);

  Index dm = dim_of(m_only), ds = dim_of(shared), dn = dim_of(n_only);

  // (M*N)(ab, a'b') = sum_{s,t} M(a t, a' s) N(t b, s b')
  // reshaped as a (dm^2 x ds^2) * (ds^2 x dn^2) matrix product.
  Matrix mm(dm * dm, ds * ds);
  for (Index a = 0; a < dm; ++a)
    for (Index ap = 0; ap < dm; ++ap)
      for (Index t = 0; t < ds; ++t)
        for (Index s = 0; s < ds; ++s)
          mm(a * dm + ap, t * ds + s) = mp.matrix()(a * ds + t, ap * ds + s);
  Matrix nm(ds * ds, dn * dn);
  for (Index t = 0; t < ds; ++t)
    for (Index s = 0; s < ds; ++s)
      for (Index b = 0; b < dn; ++b)
        for (Index bp = 0; bp < dn; ++bp)
          nm(t * ds + s, b * dn + bp) = np.matrix()(t * dn + b, s * dn + bp);
  Matrix rm = mm * nm;

  std::vector<SubsystemLabel> labels = m_only;
  labels.insert(labels.end(), n_only.begin(), n_only.end());
  Matrix out(dm * dn, dm * dn);
  for (Index a = 0; a < dm; ++a)
    for (Index ap = 0; ap < dm; ++ap)
      for (Index b = 0; b < dn; ++b)
        for (Index bp = 0; bp < dn; ++bp)
          out(a * dn + b, ap * dn + bp) = rm(a * dm + ap, b * dn + bp);
  return LabeledOperator(std::move(labels), std::move(out));
}

LabeledOperator link_chain(const std::vector<LabeledOperator>& ops) {
  if (ops.empty()) throw Error("DimMismatch", "empty link chain");
  std::set<std::string> consumed;
  LabeledOperator acc = ops[0];
  for (size_t i = 1; i < ops.size(); ++i) {
    for (const auto& l : ops[i].labels())
      if (consumed.count(l.name))
        throw Error("TripleSharedLabel", "label '" + l.name + "' appears in three operands");
    for (const auto& l : acc.labels())
      if (ops[i].has_label(l.name)) consumed.insert(l.name);
    acc = link_product(acc, ops[i]);
  }
  return acc;
}

LabeledOperator apply_channel(const ChoiOperator& c, const LabeledOperator& rho) {
  std::set<std::string> want(c.in_labels.begin(), c.in_labels.end());
  std::set<std::string> have;
  for (const auto& l : rho.labels()) have.insert(l.name);
  if (want != have)
    throw Error("LabelMismatch", "state labels do not match channel input labels");
  LabeledOperator out = link_product(c.op, rho);
  return relabel_and_permute(out, c.out_labels);
}

double channel_fidelity(const ChoiOperator& c, const ChoiOperator& d) {
  Index d0c = 1, d0d = 1;
  for (const auto& n : c.in_labels) d0c *= c.op.label_dim(n);
  for (const auto& n : d.in_labels) d0d *= d.op.label_dim(n);
  if (d0c != d0d) throw Error("DimMismatch", "channels have different input dimensions");
  if (c.op.dim() != d.op.dim()) throw Error("DimMismatch", "Choi operators have different dims");
  LabeledOperator dd = relabel_and_permute(d.op, c.op.label_names());
  Matrix sc = psd_sqrt(c.op.matrix());
  Matrix inner = sc * dd.matrix() * sc;
  // sum the square roots of the eigenvalues, discarding numerically-zero
  // ones: sqrt amplifies O(eps) rounding noise to O(sqrt(eps))
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner);
  double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  double cutoff = top * 1e-13;
  double tr = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > cutoff) tr += std::sqrt(es.eigenvalues()(i));
  return tr * tr / static_cast<double>(d0c * d0c);
}

namespace {

// Choi of first `pre`, then `post`, assuming both act between the same labels.
LabeledOperator compose_choi(const ChoiOperator& post, const ChoiOperator& pre) {
  std::vector<std::pair<std::string, std::string>> mid_out, mid_in;
  for (size_t i = 0; i < pre.out_labels.size(); ++i) {
    std::string mid = "switch_mid_" + std::to_string(i);
    mid_out.emplace_back(pre.out_labels[i], mid);
    mid_in.emplace_back(post.in_labels[i], mid);
  }
  return link_product(rename_labels(pre.op, mid_out), rename_labels(post.op, mid_in));
}

}  // namespace

ChoiOperator switch_mixture(const ChoiOperator& c, const ChoiOperator& d) {
  if (c.in_labels.size() != d.in_labels.size() || c.out_labels.size() != d.out_labels.size())
    throw Error("LabelMismatch", "switch operands live on different spaces");
  for (const auto& n : c.in_labels)
    if (!d.op.has_label(n) || d.op.label_dim(n) != c.op.label_dim(n))
      throw Error("LabelMismatch", "switch operands live on different spaces");
  if (c.out_labels.size() != c.in_labels.size())
    throw Error("LabelMismatch", "switch needs channels with matching in/out spaces");

  LabeledOperator cd = compose_choi(c, d);
  LabeledOperator dc = compose_choi(d, c);
  // c ran last in cd, d ran last in dc: align output label names before mixing
  std::vector<std::pair<std::string, std::string>> renames;
  for (size_t i = 0; i < d.out_labels.size(); ++i)
    renames.emplace_back(d.out_labels[i], c.out_labels[i]);
  std::vector<std::pair<std::string, std::string>> in_renames;
  for (size_t i = 0; i < c.in_labels.size(); ++i)
    in_renames.emplace_back(c.in_labels[i], d.in_labels[i]);
  LabeledOperator dc_aligned =
      rename_labels(rename_labels(dc, renames), in_renames);
  dc_aligned = relabel_and_permute(dc_aligned, cd.label_names());
  LabeledOperator mix = cd;
  mix.matrix() = 0.5 * (cd.matrix() + dc_aligned.matrix());
  ChoiOperator out{std::move(mix), d.in_labels, c.out_labels};
  return out;
}

}  // namespace combopt
