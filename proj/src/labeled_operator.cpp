#include "combopt/labeled_operator.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace combopt {

namespace {

Index total_dim(const std::vector<SubsystemLabel>& labels) {
  Index d = 1;
  for (const auto& l : labels) d *= l.dim;
  return d;
}

void check_unique(const std::vector<SubsystemLabel>& labels) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.dim <= 0) throw Error("DimMismatch", "label '" + l.name + "' has non-positive dim");
    if (!seen.insert(l.name).second)
      throw Error("DuplicateLabel", "label '" + l.name + "' appears twice");
  }
}

// Row-major strides: first label most significant.
std::vector<Index> strides_of(const std::vector<SubsystemLabel>& labels) {
  std::vector<Index> s(labels.size());
  Index acc = 1;
  for (Index i = static_cast<Index>(labels.size()) - 1; i >= 0; --i) {
    s[i] = acc;
    acc *= labels[i].dim;
  }
  return s;
}

}  // namespace

LabeledOperator::LabeledOperator(std::vector<SubsystemLabel> labels, Matrix m)
    : labels_(std::move(labels)), matrix_(std::move(m)) {
  check_unique(labels_);
  Index d = total_dim(labels_);
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw Error("DimMismatch", "matrix is " + std::to_string(matrix_.rows()) + "x" +
                                   std::to_string(matrix_.cols()) + " but labels give dim " +
                                   std::to_string(d));
}

bool LabeledOperator::has_label(const std::string& name) const {
  for (const auto& l : labels_)
    if (l.name == name) return true;
  return false;
}

Index LabeledOperator::label_pos(const std::string& name) const {
  for (Index i = 0; i < n_labels(); ++i)
    if (labels_[i].name == name) return i;
  throw Error("UnknownLabel", "no label named '" + name + "'");
}

Index LabeledOperator::label_dim(const std::string& name) const {
  return labels_[label_pos(name)].dim;
}

std::vector<std::string> LabeledOperator::label_names() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (const auto& l : labels_) out.push_back(l.name);
  return out;
}

DoubleKet double_ket(const LabeledOperator& a) {
  // v(n*d + m) = A(n, m): row index is the most significant block.
  Index d = a.dim();
  Vector v(d * d);
  for (Index n = 0; n < d; ++n)
    for (Index m = 0; m < d; ++m) v(n * d + m) = a.matrix()(n, m);
  return DoubleKet{a.labels(), a.labels(), v};
}

LabeledOperator double_ket_inverse(const DoubleKet& v) {
  Index d = total_dim(v.row_labels);
  Index dc = total_dim(v.col_labels);
  if (d != dc || v.vector.size() != d * dc)
    throw Error("DimMismatch", "double-ket size inconsistent with labels");
  Matrix a(d, d);
  for (Index n = 0; n < d; ++n)
    for (Index m = 0; m < d; ++m) a(n, m) = v.vector(n * d + m);
  return LabeledOperator(v.row_labels, std::move(a));
}

LabeledOperator tensor_product(const LabeledOperator& x, const LabeledOperator& y) {
  for (const auto& l : y.labels())
    if (x.has_label(l.name))
      throw Error("DuplicateLabel", "tensor_product operands share label '" + l.name + "'");
  std::vector<SubsystemLabel> labels = x.labels();
  labels.insert(labels.end(), y.labels().begin(), y.labels().end());
  Matrix m = Eigen::kroneckerProduct(x.matrix(), y.matrix());
  return LabeledOperator(std::move(labels), std::move(m));
}

LabeledOperator partial_trace(const LabeledOperator& x, const std::vector<std::string>& over) {
  std::set<std::string> traced(over.begin(), over.end());
  if (traced.size() != over.size())
    throw Error("DuplicateLabel", "repeated label in partial_trace list");
  for (const auto& n : over) x.label_pos(n);  // validate

  std::vector<SubsystemLabel> kept;
  std::vector<SubsystemLabel> gone;
  std::vector<Index> kept_pos, gone_pos;
  for (Index i = 0; i < x.n_labels(); ++i) {
    if (traced.count(x.labels()[i].name)) {
      gone.push_back(x.labels()[i]);
      gone_pos.push_back(i);
    } else {
      kept.push_back(x.labels()[i]);
      kept_pos.push_back(i);
    }
  }

  Index dk = total_dim(kept);
  Index dg = total_dim(gone);
  auto strides = strides_of(x.labels());
  auto ks = strides_of(kept);
  auto gs = strides_of(gone);

  // Map kept/gone multi-indices back into full-space flat indices.
  std::vector<Index> kmap(static_cast<size_t>(dk), 0);
  for (Index k = 0; k < dk; ++k) {
    Index rem = k, flat = 0;
    for (size_t j = 0; j < kept.size(); ++j) {
      Index idx = rem / ks[j];
      rem %= ks[j];
      flat += idx * strides[kept_pos[j]];
    }
    kmap[static_cast<size_t>(k)] = flat;
  }
  std::vector<Index> gmap(static_cast<size_t>(dg), 0);
  for (Index g = 0; g < dg; ++g) {
    Index rem = g, flat = 0;
    for (size_t j = 0; j < gone.size(); ++j) {
      Index idx = rem / gs[j];
      rem %= gs[j];
      flat += idx * strides[gone_pos[j]];
    }
    gmap[static_cast<size_t>(g)] = flat;
  }

  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c) {
      Complex s = 0.0;
      for (Index g = 0; g < dg; ++g)
        s += x.matrix()(kmap[static_cast<size_t>(r)] + gmap[static_cast<size_t>(g)],
                        kmap[static_cast<size_t>(c)] + gmap[static_cast<size_t>(g)]);
      out(r, c) = s;
    }
  return LabeledOperator(std::move(kept), std::move(out));
}

LabeledOperator partial_transpose(const LabeledOperator& x, const std::vector<std::string>& over) {
  std::set<std::string> tset(over.begin(), over.end());
  if (tset.size() != over.size())
    throw Error("DuplicateLabel", "repeated label in partial_transpose list");
  for (const auto& n : over) x.label_pos(n);

  auto strides = strides_of(x.labels());
  Index d = x.dim();
  Index nl = x.n_labels();
  std::vector<bool> flip(static_cast<size_t>(nl));
  for (Index i = 0; i < nl; ++i) flip[static_cast<size_t>(i)] = tset.count(x.labels()[i].name) > 0;

  Matrix out(d, d);
  std::vector<Index> ridx(static_cast<size_t>(nl)), cidx(static_cast<size_t>(nl));
  for (Index r = 0; r < d; ++r) {
    Index rem = r;
    for (Index i = 0; i < nl; ++i) {
      ridx[static_cast<size_t>(i)] = rem / strides[static_cast<size_t>(i)];
      rem %= strides[static_cast<size_t>(i)];
    }
    for (Index c = 0; c < d; ++c) {
      rem = c;
      for (Index i = 0; i < nl; ++i) {
        cidx[static_cast<size_t>(i)] = rem / strides[static_cast<size_t>(i)];
        rem %= strides[static_cast<size_t>(i)];
      }
      Index sr = 0, sc = 0;
      for (Index i = 0; i < nl; ++i) {
        Index a = ridx[static_cast<size_t>(i)], b = cidx[static_cast<size_t>(i)];
        if (flip[static_cast<size_t>(i)]) std::swap(a, b);
        sr += a * strides[static_cast<size_t>(i)];
        sc += b * strides[static_cast<size_t>(i)];
      }
      out(sr, sc) = x.matrix()(r, c);
    }
  }
  return LabeledOperator(x.labels(), std::move(out));
}

LabeledOperator relabel_and_permute(const LabeledOperator& x,
                                    const std::vector<std::string>& new_order) {
  if (static_cast<Index>(new_order.size()) != x.n_labels())
    throw Error("NotAPermutation", "new order has wrong length");
  std::set<std::string> seen(new_order.begin(), new_order.end());
  if (seen.size() != new_order.size())
    throw Error("NotAPermutation", "repeated label in permutation");

  std::vector<Index> src(new_order.size());
  std::vector<SubsystemLabel> labels(new_order.size());
  for (size_t i = 0; i < new_order.size(); ++i) {
    src[i] = x.label_pos(new_order[i]);
    labels[i] = x.labels()[src[i]];
  }

  auto old_strides = strides_of(x.labels());
  auto new_strides = strides_of(labels);
  Index d = x.dim();
  Index nl = x.n_labels();

  // perm[old flat index] = new flat index
  std::vector<Index> perm(static_cast<size_t>(d));
  for (Index f = 0; f < d; ++f) {
    Index rem = f;
    std::vector<Index> idx(static_cast<size_t>(nl));
    for (Index i = 0; i < nl; ++i) {
      idx[static_cast<size_t>(i)] = rem / old_strides[static_cast<size_t>(i)];
      rem %= old_strides[static_cast<size_t>(i)];
    }
    Index nf = 0;
    for (size_t i = 0; i < new_order.size(); ++i) nf += idx[static_cast<size_t>(src[i])] * new_strides[i];
    perm[static_cast<size_t>(f)] = nf;
  }

  Matrix out(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c)
      out(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]) = x.matrix()(r, c);
  return LabeledOperator(std::move(labels), std::move(out));
}

LabeledOperator rename_labels(const LabeledOperator& x,
                              const std::vector<std::pair<std::string, std::string>>& renames) {
  std::unordered_map<std::string, std::string> map;
  for (const auto& [from, to] : renames) {
    x.label_pos(from);
    if (!map.emplace(from, to).second)
      throw Error("DuplicateLabel", "label '" + from + "' renamed twice");
  }
  std::vector<SubsystemLabel> labels = x.labels();
  for (auto& l : labels) {
    auto it = map.find(l.name);
    if (it != map.end()) l.name = it->second;
  }
  check_unique(labels);
  return LabeledOperator(std::move(labels), x.matrix());
}

LabeledOperator identity_operator(const std::vector<SubsystemLabel>& labels) {
  Index d = total_dim(labels);
  return LabeledOperator(labels, Matrix::Identity(d, d));
}

Complex trace_of(const LabeledOperator& x) { return x.matrix().trace(); }

Matrix psd_sqrt(const Matrix& h, double floor_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -floor_tol * std::max(1.0, ev.cwiseAbs().maxCoeff()))
      throw Error("NotPSD", "matrix has eigenvalue " + std::to_string(ev(i)));
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_inv_sqrt(const Matrix& h, double rank_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Index i = 0; i < ev.size(); ++i)
    ev(i) = (ev(i) > rank_cutoff * scale) ? 1.0 / std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix support_projector(const Matrix& h, double rank_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Index i = 0; i < ev.size(); ++i) ev(i) = (ev(i) > rank_cutoff * scale) ? 1.0 : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double min_hermitian_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace combopt
