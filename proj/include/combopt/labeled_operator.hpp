#ifndef COMBOPT_LABELED_OPERATOR_HPP
#define COMBOPT_LABELED_OPERATOR_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "combopt/error.hpp"

namespace combopt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// A named tensor factor of a composite Hilbert space.
struct SubsystemLabel {
  std::string name;
  Index dim = 1;

  friend bool operator==(const SubsystemLabel& a, const SubsystemLabel& b) {
    return a.name == b.name && a.dim == b.dim;
  }
};

// Dense complex square operator on an ordered list of named subsystems.
// Index convention is row-major over the label list: the first label is
// the most significant tensor factor (Kronecker order).
class LabeledOperator {
public:
  LabeledOperator() = default;
  LabeledOperator(std::vector<SubsystemLabel> labels, Matrix m);

  const std::vector<SubsystemLabel>& labels() const { return labels_; }
  const Matrix& matrix() const { return matrix_; }
  Matrix& matrix() { return matrix_; }

  Index dim() const { return matrix_.rows(); }
  Index n_labels() const { return static_cast<Index>(labels_.size()); }

  bool has_label(const std::string& name) const;
  Index label_pos(const std::string& name) const;  // throws UnknownLabel
  Index label_dim(const std::string& name) const;

  std::vector<std::string> label_names() const;

private:
  std::vector<SubsystemLabel> labels_;
  Matrix matrix_;
};

// Vectorization |A>> of a square operator, Sum_nm <n|A|m> |n>|m>.
struct DoubleKet {
  std::vector<SubsystemLabel> row_labels;
  std::vector<SubsystemLabel> col_labels;
  Vector vector;
};

DoubleKet double_ket(const LabeledOperator& a);
LabeledOperator double_ket_inverse(const DoubleKet& v);

LabeledOperator tensor_product(const LabeledOperator& x, const LabeledOperator& y);
LabeledOperator partial_trace(const LabeledOperator& x, const std::vector<std::string>& over);
LabeledOperator partial_transpose(const LabeledOperator& x, const std::vector<std::string>& over);
LabeledOperator relabel_and_permute(const LabeledOperator& x, const std::vector<std::string>& new_order);

// Renames labels in place (dims unchanged); plumbing for wiring networks.
LabeledOperator rename_labels(const LabeledOperator& x,
                              const std::vector<std::pair<std::string, std::string>>& renames);

LabeledOperator identity_operator(const std::vector<SubsystemLabel>& labels);

// Full trace of the matrix.
Complex trace_of(const LabeledOperator& x);

// Hermitian PSD square root / pseudo-inverse square root with eigenvalue
// clamping at zero (floor -1e-10 tolerated then clipped).
Matrix psd_sqrt(const Matrix& h, double floor_tol = 1e-10);
Matrix psd_inv_sqrt(const Matrix& h, double rank_cutoff = 1e-10);
Matrix support_projector(const Matrix& h, double rank_cutoff = 1e-10);

double min_hermitian_eigenvalue(const Matrix& h);

}  // namespace combopt

#endif
