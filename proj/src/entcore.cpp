#include "entwit/entcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entwit {

namespace {

double spectral_scale(const RealVector& evs) {
  return std::max({std::abs(evs(0)), std::abs(evs(evs.size() - 1)), 1e-300});
}

// <b|W|b> contracted over subsystem B: a Hermitian operator on A.
ComplexMatrix contract_b(const ComplexMatrix& w, const BipartiteDims& dims,
                         const ComplexVector& b) {
  const int da = dims.d_a, db = dims.d_b;
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int r = 0; r < da; ++r) {
    for (int s = 0; s < da; ++s) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < db; ++k) {
        Complex inner(0.0, 0.0);
        for (int l = 0; l < db; ++l) {
          inner += w(r * db + k, s * db + l) * b(l);
        }
        acc += std::conj(b(k)) * inner;
      }
      out(r, s) = acc;
    }
  }
  return out;
}

// <a|W|a> contracted over subsystem A: a Hermitian operator on B.
ComplexMatrix contract_a(const ComplexMatrix& w, const BipartiteDims& dims,
                         const ComplexVector& a) {
  const int da = dims.d_a, db = dims.d_b;
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int k = 0; k < db; ++k) {
    for (int l = 0; l < db; ++l) {
      Complex acc(0.0, 0.0);
      for (int r = 0; r < da; ++r) {
        Complex inner(0.0, 0.0);
        for (int s = 0; s < da; ++s) {
          inner += w(r * db + k, s * db + l) * a(s);
        }
        acc += std::conj(a(r)) * inner;
      }
      out(k, l) = acc;
    }
  }
  return out;
}

}  // namespace

double negativity(const ComplexMatrix& rho, const BipartiteDims& dims) {
  const ComplexMatrix pt = partial_transpose(rho, dims, Subsystem::A);
  const RealVector evs = hermitian_eigenvalues(pt);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < evs.size(); ++i) {
    acc += 0.5 * (std::abs(evs(i)) - evs(i));
  }
  return acc;
}

double negativity(const DensityMatrix& rho, const BipartiteDims& dims) {
  return negativity(rho.matrix(), dims);
}

bool is_npt(const DensityMatrix& rho, const BipartiteDims& dims, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("is_npt: tol must be positive");
  const ComplexMatrix pt = partial_transpose(rho.matrix(), dims, Subsystem::A);
  const RealVector evs = hermitian_eigenvalues(pt);
  return evs(0) < -tol * spectral_scale(evs);
}

WitnessVerdict check_witness_ppt(const HermitianOperator& h, const BipartiteDims& dims,
                                 double tol) {
  const RealVector evs = hermitian_eigenvalues(h.matrix());
  const double scale = spectral_scale(evs);
  WitnessVerdict v;
  v.method = WitnessVerdict::Method::PptCheck;
  v.indefinite =
      evs(0) < -tol * scale && evs(evs.size() - 1) > tol * scale;
  const ComplexMatrix pt = partial_transpose(h.matrix(), dims, Subsystem::A);
  const RealVector pt_evs = hermitian_eigenvalues(pt);
  v.pt_positive = pt_evs(0) >= -tol * spectral_scale(pt_evs);
  v.is_witness = v.indefinite && v.pt_positive;
  return v;
}

SeeSawResult see_saw_overlap(const ComplexMatrix& w, const BipartiteDims& dims,
                             ComplexVector a0, ComplexVector b0, double conv_tol,
                             int max_alternations) {
  if (a0.size() != dims.d_a || b0.size() != dims.d_b) {
    throw std::invalid_argument("see_saw_overlap: initial states do not match dims");
  }
  ComplexVector a = a0 / a0.norm();
  ComplexVector b = b0 / b0.norm();

  SeeSawResult res;
  {
    const ComplexMatrix ma = contract_b(w, dims, b);
    res.value = (a.adjoint() * ma * a)(0).real();
  }

  bool update_a = true;
  for (int step = 0; step < max_alternations; ++step) {
    double next;
    if (update_a) {
      const ComplexMatrix ma = contract_b(w, dims, b);
      const EigResult eig = hermitian_eig(ma);
      a = eig.eigenvectors.col(0);
      next = eig.eigenvalues(0);
    } else {
      const ComplexMatrix mb = contract_a(w, dims, a);
      const EigResult eig = hermitian_eig(mb);
      b = eig.eigenvectors.col(0);
      next = eig.eigenvalues(0);
    }
    res.trace.push_back(next);
    ++res.alternations;
    const double change = std::abs(res.value - next);
    res.value = next;
    if (change < conv_tol && step > 0) break;
    update_a = !update_a;
  }
  return res;
}

double min_product_overlap(const ComplexMatrix& w, const BipartiteDims& dims,
                           int restarts, RngStream& rng, double stop_below) {
  if (restarts < 1) throw std::invalid_argument("min_product_overlap: restarts >= 1");
  RngStream campaign = rng.substream(rng.next_u64());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < restarts; ++i) {
    RngStream sub = campaign.substream(static_cast<std::uint64_t>(i));
    ComplexVector a0 = random_pure_state(dims.d_a, sub);
    ComplexVector b0 = random_pure_state(dims.d_b, sub);
    const SeeSawResult r = see_saw_overlap(w, dims, std::move(a0), std::move(b0));
    best = std::min(best, r.value);
    if (best < stop_below) break;
  }
  return best;
}

double min_product_overlap(const HermitianOperator& w, const BipartiteDims& dims,
                           int restarts, RngStream& rng) {
  return min_product_overlap(w.matrix(), dims, restarts, rng,
                             -std::numeric_limits<double>::infinity());
}

WitnessVerdict certify_witness_by_overlap(const HermitianOperator& h,
                                          const BipartiteDims& dims, int restarts,
                                          RngStream& rng) {
  WitnessVerdict v = check_witness_ppt(h, dims);
  v.method = WitnessVerdict::Method::OverlapMinimization;
  v.is_witness = false;
  if (!v.indefinite) return v;
  // A single negative product state disqualifies, so the scan may stop early.
  const double overlap =
      min_product_overlap(h.matrix(), dims, restarts, rng, -kOverlapCertTol);
  v.min_product_overlap = overlap;
  v.is_witness = overlap >= -kOverlapCertTol;
  return v;
}

std::optional<HermitianOperator> identity_shift_witness(const HermitianOperator& h,
                                                        const BipartiteDims& dims,
                                                        ShiftChoice choice) {
  const RealVector evs = hermitian_eigenvalues(h.matrix());
  const double lambda_min = evs(0);
  const double lambda_max = evs(evs.size() - 1);
  const ComplexMatrix pt = partial_transpose(h.matrix(), dims, Subsystem::A);
  const double lambda_min_pt = hermitian_eigenvalues(pt)(0);

  // W = H + s*I must keep W^{T_A} >= 0 (s >= -lambda_min_pt) while staying
  // indefinite (-lambda_max < s < -lambda_min).
  const double scale =
      std::max({std::abs(lambda_min), std::abs(lambda_max), std::abs(lambda_min_pt), 1.0});
  const double lo = std::max(-lambda_min_pt, -lambda_max);
  const double hi = -lambda_min;
  if (hi - lo <= 1e-12 * scale) return std::nullopt;

  double shift;
  if (choice == ShiftChoice::Midpoint) {
    shift = 0.5 * (lo + hi);
  } else {
    shift = lo + 1e-12;
    if (shift >= hi) shift = 0.5 * (lo + hi);
  }

  const int d = h.dim();
  ComplexMatrix w = h.matrix() + shift * ComplexMatrix::Identity(d, d);
  const double tr = w.trace().real();
  if (tr <= 1e-12 * scale * d) return std::nullopt;
  w /= tr;
  return HermitianOperator(std::move(w), dims);
}

}  // namespace entwit
