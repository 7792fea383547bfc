#include "combopt/phase_circuits.hpp"

#include <cmath>

#include "combopt/comb.hpp"

namespace combopt {

namespace {

// 3-qubit gates on wires (1, 2, ancilla), wire 1 most significant.
Matrix controlled(int control, const Matrix& gate_on_ancilla) {
  Matrix u = Matrix::Identity(8, 8);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b) {
      Index c = (control == 0) ? a : b;
      if (c != 1) continue;
      for (Index x = 0; x < 2; ++x)
        for (Index y = 0; y < 2; ++y)
          u((a * 2 + b) * 2 + x, (a * 2 + b) * 2 + y) = gate_on_ancilla(x, y);
    }
  return u;
}

Matrix toffoli() {
  Matrix u = Matrix::Identity(8, 8);
  u(6, 6) = 0;
  u(7, 7) = 0;
  u(6, 7) = 1;
  u(7, 6) = 1;
  return u;
}

Matrix ancilla_gate(const Matrix& g) {
  Matrix u = Matrix::Zero(8, 8);
  for (Index ab = 0; ab < 4; ++ab)
    for (Index x = 0; x < 2; ++x)
      for (Index y = 0; y < 2; ++y) u(ab * 2 + x, ab * 2 + y) = g(x, y);
  return u;
}

Matrix hadamard() {
  Matrix h(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Matrix phase_gate(double phi) {
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(Complex(0, phi));
  return u;
}

}  // namespace

ChoiOperator clone_circuit_channel(double phi) {
  Matrix w = controlled(0, pauli_x()) * controlled(1, pauli_x()) *
             ancilla_gate(phase_gate(phi)) * toffoli() * controlled(0, hadamard()) *
             controlled(1, hadamard());
  // ancilla in |0>, measured and discarded at the end
  std::vector<Matrix> kraus;
  for (Index b = 0; b < 2; ++b) {
    Matrix k(4, 4);
    for (Index o = 0; o < 4; ++o)
      for (Index i = 0; i < 4; ++i) k(o, i) = w(o * 2 + b, i * 2 + 0);
    kraus.push_back(std::move(k));
  }
  return choi_from_kraus(kraus, {{"0", 4}}, {{"3", 4}});
}

ChoiOperator comb_inserted_channel(const LabeledOperator& comb, double phi) {
  ChoiOperator u = choi_of_unitary(phase_gate(phi), {{"1", 2}}, {{"2", 2}});
  return insert_channel(comb, u);
}

Matrix phase_clone_isometry_v() {
  // order: wire-1 qubit (x) qutrit A (x) qubit B; input basis |00..11>
  Matrix v = Matrix::Zero(12, 4);
  auto slot = [](Index w1, Index a, Index b) { return (w1 * 3 + a) * 2 + b; };
  double s = 1.0 / std::sqrt(2.0);
  v(slot(0, 0, 0), 0) = 1.0;                 // |00> -> |0>|1>_A |0>_B
  v(slot(1, 1, 0), 1) = s;                   // |01> -> (|1>|2>|0> + |0>|2>|1>)/sqrt2
  v(slot(0, 1, 1), 1) = s;
  v(slot(1, 2, 0), 2) = s;                   // |10> -> (|1>|3>|0> + |0>|3>|1>)/sqrt2
  v(slot(0, 2, 1), 2) = s;
  v(slot(1, 0, 1), 3) = 1.0;                 // |11> -> |1>|1>|1>
  return v;
}

Matrix phase_clone_isometry_q(int outcome) {
  // input: wire-2 qubit (x) qutrit A; output: 2 qubits (x) C (dim 4)
  Matrix q = Matrix::Zero(16, 6);
  auto in = [](Index w2, Index a) { return w2 * 3 + a; };
  auto out = [](Index clones, Index c) { return clones * 4 + c; };
  if (outcome == 0) {
    q(out(0, 0), in(0, 0)) = 1.0;  // |1>_C |00><0|<1|
    q(out(1, 0), in(1, 1)) = 1.0;  // |1>_C |01><1|<2|
    q(out(2, 0), in(1, 2)) = 1.0;  // |1>_C |10><1|<3|
    q(out(3, 1), in(1, 0)) = 1.0;  // |2>_C |11><1|<1|
    q(out(0, 2), in(0, 1)) = 1.0;  // |3>_C |00><0|<2|
    q(out(0, 3), in(0, 2)) = 1.0;  // |4>_C |00><0|<3|
  } else {
    q(out(3, 0), in(1, 0)) = 1.0;  // |1>_C |11><1|<1|
    q(out(1, 0), in(0, 1)) = 1.0;  // |1>_C |01><0|<2|
    q(out(2, 0), in(0, 2)) = 1.0;  // |1>_C |10><0|<3|
    q(out(0, 1), in(0, 0)) = 1.0;  // |2>_C |00><0|<1|
    q(out(3, 2), in(1, 1)) = 1.0;  // |3>_C |11><1|<2|
    q(out(3, 3), in(1, 2)) = 1.0;  // |4>_C |11><1|<3|
  }
  return q;
}

ChoiOperator isometry_realization_channel(double phi) {
  Matrix v = phase_clone_isometry_v();
  Matrix uphi = phase_gate(phi);
  std::vector<Matrix> kraus;
  for (int b = 0; b < 2; ++b) {
    // project B onto |b>, leaving wire-1 qubit (x) qutrit A
    Matrix vb = Matrix::Zero(6, 4);
    for (Index wa = 0; wa < 6; ++wa)
      for (Index i = 0; i < 4; ++i) vb(wa, i) = v(wa * 2 + b, i);
    // phase gate on the wire qubit
    Matrix after = Matrix::Zero(6, 4);
    for (Index w2 = 0; w2 < 2; ++w2)
      for (Index a = 0; a < 3; ++a)
        for (Index i = 0; i < 4; ++i)
          after(w2 * 3 + a, i) = uphi(w2, w2) * vb(w2 * 3 + a, i);
    Matrix qb = phase_clone_isometry_q(b) * after;  // 16 x 4
    for (Index c = 0; c < 4; ++c) {
      Matrix k(4, 4);
      for (Index o = 0; o < 4; ++o) k.row(o) = qb.row(o * 4 + c);
      kraus.push_back(std::move(k));
    }
  }
  return choi_from_kraus(kraus, {{"0", 4}}, {{"3", 4}});
}

}  // namespace combopt
