#ifndef COMBOPT_PHASE_CIRCUITS_HPP
#define COMBOPT_PHASE_CIRCUITS_HPP

#include "combopt/choi.hpp"

namespace combopt {

// The three realizations of the optimal 1 -> 2 phase-gate cloner, each as
// the Choi operator of the induced 2-qubit -> 2-qubit channel (labels
// in = "0", out = "3").

// Three-qubit circuit: two controlled-Hadamards onto a |0> ancilla, a
// Toffoli, the phase gate on the ancilla, two CNOTs back, ancilla traced.
ChoiOperator clone_circuit_channel(double phi);

// R * |U_phi>><<U_phi| for a given 2-comb on labels 0,1,2,3 (dims 4,2,2,4).
ChoiOperator comb_inserted_channel(const LabeledOperator& comb, double phi);

// Memory-efficient realization: isometry V into qubit (x) qutrit (x) qubit,
// measurement of the last qubit selecting Q_0 or Q_1 after the phase gate,
// ancilla C measured and discarded.
ChoiOperator isometry_realization_channel(double phi);

// The isometries of the memory-efficient scheme, for direct inspection.
Matrix phase_clone_isometry_v();   // 12 x 4  (qubit (x) qutrit (x) qubit <- 2 qubits)
Matrix phase_clone_isometry_q(int outcome);  // 16 x 6 (2 qubits (x) C <- qubit (x) qutrit)

}  // namespace combopt

#endif
