#pragma once

#include "entwit/qmat.hpp"

namespace entwit {

// Canonical states used throughout the experiments.

ComplexVector basis_ket(int d, int index);

// (1/sqrt(d)) sum_i |ii> on a d x d system.
ComplexVector phi_plus(int d);

// Two-qubit singlet (|01> - |10>)/sqrt(2).
ComplexVector psi_minus();

DensityMatrix maximally_mixed(int d, std::optional<BipartiteDims> dims = std::nullopt);

// p |psi-><psi-| + (1-p) I/4 on two qubits; entangled exactly for p > 1/3.
DensityMatrix werner_state(double p);

// |phi+><phi+| on two qubits with dims (2,2).
DensityMatrix bell_state();

// SWAP operator on a d x d bipartite system.
HermitianOperator swap_operator(int d);

}  // namespace entwit
