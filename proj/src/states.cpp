#include "entwit/states.hpp"

#include <cmath>

namespace entwit {

ComplexVector basis_ket(int d, int index) {
  if (d < 1 || index < 0 || index >= d) {
    throw std::invalid_argument("basis_ket: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(d);
  v(index) = Complex(1.0, 0.0);
  return v;
}

ComplexVector phi_plus(int d) {
  if (d < 2) throw std::invalid_argument("phi_plus: need d >= 2");
  ComplexVector v = ComplexVector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) v(i * d + i) = Complex(amp, 0.0);
  return v;
}

ComplexVector psi_minus() {
  ComplexVector v = ComplexVector::Zero(4);
  const double amp = 1.0 / std::sqrt(2.0);
  v(1) = Complex(amp, 0.0);
  v(2) = Complex(-amp, 0.0);
  return v;
}

DensityMatrix maximally_mixed(int d, std::optional<BipartiteDims> dims) {
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(HermitianOperator(std::move(m), dims));
}

DensityMatrix werner_state(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("werner_state: p must be in [0,1]");
  const ComplexVector singlet = psi_minus();
  ComplexMatrix m = p * (singlet * singlet.adjoint()).eval();
  m += (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
  return DensityMatrix(HermitianOperator(std::move(m), BipartiteDims(2, 2)));
}

DensityMatrix bell_state() {
  return DensityMatrix::pure(phi_plus(2), BipartiteDims(2, 2));
}

HermitianOperator swap_operator(int d) {
  if (d < 2) throw std::invalid_argument("swap_operator: need d >= 2");
  ComplexMatrix m = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i * d + j, j * d + i) = Complex(1.0, 0.0);
    }
  }
  return HermitianOperator(std::move(m), BipartiteDims(d, d));
}

}  // namespace entwit
