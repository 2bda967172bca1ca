#include "entwit/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace entwit {

namespace {

double max_abs_entry(const ComplexMatrix& m) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      mx = std::max(mx, std::abs(m(i, j)));
    }
  }
  return mx;
}

double asymmetry(const ComplexMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

double offdiag_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// One rotation of the cyclic Jacobi scheme: annihilates A(p,q) with the
// unitary that diagonalizes the (p,q) principal submatrix.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix* v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;

  const Complex phase = apq / r;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * r);
  double t;
  if (tau >= 0.0) {
    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
  } else {
    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // U restricted to the (p,q) plane: [[c, s], [-s*conj(phase), c*conj(phase)]].
  const Complex u11(c, 0.0);
  const Complex u12(s, 0.0);
  const Complex u21 = -s * std::conj(phase);
  const Complex u22 = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {  // A <- A U
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * u11 + akq * u21;
    a(k, q) = akp * u12 + akq * u22;
  }
  for (Eigen::Index k = 0; k < n; ++k) {  // A <- U^dag A
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(u11) * apk + std::conj(u21) * aqk;
    a(q, k) = std::conj(u12) * apk + std::conj(u22) * aqk;
  }
  a(p, q) = Complex(0.0, 0.0);
  a(q, p) = Complex(0.0, 0.0);
  a(p, p) = Complex(a(p, p).real(), 0.0);
  a(q, q) = Complex(a(q, q).real(), 0.0);

  if (v != nullptr) {
    for (Eigen::Index k = 0; k < n; ++k) {  // V <- V U
      const Complex vkp = (*v)(k, p);
      const Complex vkq = (*v)(k, q);
      (*v)(k, p) = vkp * u11 + vkq * u21;
      (*v)(k, q) = vkp * u12 + vkq * u22;
    }
  }
}

// Core Jacobi loop; `vectors` toggles accumulation of the eigenvector matrix.
EigResult jacobi_eig(ComplexMatrix a, bool vectors) {
  const Eigen::Index n = a.rows();
  ComplexMatrix v;
  if (vectors) v = ComplexMatrix::Identity(n, n);

  const double scale = a.norm();
  const double threshold = 1e-12 * std::max(scale, 1e-300);
  const int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(a) <= threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) > threshold / static_cast<double>(n)) {
          jacobi_rotate(a, vectors ? &v : nullptr, p, q);
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() < a(y, y).real();
  });

  EigResult out;
  out.eigenvalues.resize(n);
  if (vectors) out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = a(order[static_cast<std::size_t>(i)],
                           order[static_cast<std::size_t>(i)]).real();
    if (vectors) out.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

void check_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
  }
}

void check_bipartite(const ComplexMatrix& m, const BipartiteDims& dims, const char* who) {
  check_square(m, who);
  if (m.rows() != dims.total()) {
    throw std::invalid_argument(std::string(who) + ": matrix dimension " +
                                std::to_string(m.rows()) + " does not match d_A*d_B = " +
                                std::to_string(dims.total()));
  }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m, std::optional<BipartiteDims> dims)
    : matrix_(std::move(m)), dims_(dims) {
  check_square(matrix_, "HermitianOperator");
  const double scale = std::max(max_abs_entry(matrix_), 1e-300);
  if (asymmetry(matrix_) > kHermitianTol * scale) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian within tolerance");
  }
  // Symmetrize so downstream solvers never see drift.
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    matrix_(i, i) = Complex(matrix_(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j) {
      const Complex avg = 0.5 * (matrix_(i, j) + std::conj(matrix_(j, i)));
      matrix_(i, j) = avg;
      matrix_(j, i) = std::conj(avg);
    }
  }
  if (dims_.has_value() && dims_->total() != matrix_.rows()) {
    throw std::invalid_argument("HermitianOperator: dims do not match matrix dimension");
  }
}

double HermitianOperator::trace() const { return matrix_.trace().real(); }

HermitianOperator HermitianOperator::with_dims(const BipartiteDims& dims) const {
  return HermitianOperator(matrix_, dims);
}

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  if (std::abs(op_.trace() - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond tolerance");
  }
  const RealVector evs = hermitian_eigenvalues(op_.matrix());
  if (evs(0) < -kPsdTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(evs(0)));
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi,
                                  std::optional<BipartiteDims> dims) {
  if (psi.size() == 0) throw std::invalid_argument("DensityMatrix::pure: empty vector");
  if (std::abs(psi.norm() - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix::pure: state vector is not normalized");
  }
  ComplexMatrix rho = psi * psi.adjoint();
  return DensityMatrix(HermitianOperator(std::move(rho), dims));
}

DensityMatrix DensityMatrix::with_dims(const BipartiteDims& dims) const {
  return DensityMatrix(op_.with_dims(dims));
}

EigResult hermitian_eig(const HermitianOperator& h) { return jacobi_eig(h.matrix(), true); }

EigResult hermitian_eig(const ComplexMatrix& m) {
  check_square(m, "hermitian_eig");
  const double scale = std::max(max_abs_entry(m), 1e-300);
  if (asymmetry(m) > kHermitianTol * scale) {
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within tolerance");
  }
  return jacobi_eig(m, true);
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  check_square(m, "hermitian_eigenvalues");
  return jacobi_eig(m, false).eigenvalues;
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m)(0); }

double max_eigenvalue(const ComplexMatrix& m) {
  const RealVector evs = hermitian_eigenvalues(m);
  return evs(evs.size() - 1);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols();
  const Eigen::Index rb = b.rows(), cb = b.cols();
  ComplexMatrix out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < ca; ++j) {
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()),
                           BipartiteDims(a.dim(), b.dim()));
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const BipartiteDims& dims,
                                Subsystem subsystem) {
  check_bipartite(m, dims, "partial_transpose");
  const int da = dims.d_a, db = dims.d_b;
  ComplexMatrix out(m.rows(), m.cols());
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      for (int k = 0; k < db; ++k) {
        for (int l = 0; l < db; ++l) {
          if (subsystem == Subsystem::A) {
            out(i * db + k, j * db + l) = m(j * db + k, i * db + l);
          } else {
            out(i * db + k, j * db + l) = m(i * db + l, j * db + k);
          }
        }
      }
    }
  }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& m, const BipartiteDims& dims,
                                    Subsystem subsystem) {
  return HermitianOperator(partial_transpose(m.matrix(), dims, subsystem), dims);
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const BipartiteDims& dims,
                            Subsystem traced) {
  check_bipartite(m, dims, "partial_trace");
  const int da = dims.d_a, db = dims.d_b;
  if (traced == Subsystem::B) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (int i = 0; i < da; ++i) {
      for (int j = 0; j < da; ++j) {
        for (int k = 0; k < db; ++k) {
          out(i, j) += m(i * db + k, j * db + k);
        }
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int k = 0; k < db; ++k) {
    for (int l = 0; l < db; ++l) {
      for (int i = 0; i < da; ++i) {
        out(k, l) += m(i * db + k, i * db + l);
      }
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& m, const BipartiteDims& dims,
                                Subsystem traced) {
  return HermitianOperator(partial_trace(m.matrix(), dims, traced));
}

}  // namespace entwit
