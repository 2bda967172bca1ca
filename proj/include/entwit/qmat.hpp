#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>

namespace entwit {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerances shared across the numeric kernel.
inline constexpr double kHermitianTol = 1e-12;   // relative asymmetry allowed at construction
inline constexpr double kTraceTol = 1e-10;       // |tr(rho) - 1| for density matrices
inline constexpr double kPsdTol = 1e-10;         // eigenvalue floor for density matrices
inline constexpr double kEigResidualTol = 1e-9;  // reconstruction residual contract

enum class Subsystem { A, B };

struct BipartiteDims {
  int d_a = 0;
  int d_b = 0;

  BipartiteDims() = default;
  BipartiteDims(int a, int b) : d_a(a), d_b(b) {
    if (a < 2 || b < 2) {
      throw std::invalid_argument("BipartiteDims: local dimensions must be >= 2");
    }
  }

  int total() const { return d_a * d_b; }
  bool operator==(const BipartiteDims&) const = default;
};

// Square complex matrix certified Hermitian at construction. Inputs within
// kHermitianTol (relative to the largest entry) are symmetrized to (M+M^dag)/2,
// anything worse is rejected.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m,
                             std::optional<BipartiteDims> dims = std::nullopt);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const std::optional<BipartiteDims>& dims() const { return dims_; }
  double trace() const;

  HermitianOperator with_dims(const BipartiteDims& dims) const;

 private:
  ComplexMatrix matrix_;
  std::optional<BipartiteDims> dims_;
};

// Hermitian, unit trace (within kTraceTol), eigenvalues >= -kPsdTol.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator op);
  static DensityMatrix pure(const ComplexVector& psi,
                            std::optional<BipartiteDims> dims = std::nullopt);

  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  int dim() const { return op_.dim(); }
  const std::optional<BipartiteDims>& dims() const { return op_.dims(); }
  DensityMatrix with_dims(const BipartiteDims& dims) const;

 private:
  HermitianOperator op_;
};

struct EigResult {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns, aligned with eigenvalues
};

// Cyclic Jacobi eigendecomposition for Hermitian matrices. Converges when the
// off-diagonal Frobenius norm drops below 1e-12 relative to the matrix norm,
// capped at 100 sweeps. Sizes here stay small (<= ~150) so no blocking is needed.
EigResult hermitian_eig(const HermitianOperator& h);
EigResult hermitian_eig(const ComplexMatrix& m);  // validates hermiticity first
RealVector hermitian_eigenvalues(const ComplexMatrix& m);  // eigenvalues only

double min_eigenvalue(const ComplexMatrix& m);
double max_eigenvalue(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

ComplexMatrix partial_transpose(const ComplexMatrix& m, const BipartiteDims& dims,
                                Subsystem subsystem);
HermitianOperator partial_transpose(const HermitianOperator& m, const BipartiteDims& dims,
                                    Subsystem subsystem);

// Traces out the named subsystem; the result lives on the one that is kept.
ComplexMatrix partial_trace(const ComplexMatrix& m, const BipartiteDims& dims,
                            Subsystem traced);
HermitianOperator partial_trace(const HermitianOperator& m, const BipartiteDims& dims,
                                Subsystem traced);

}  // namespace entwit
