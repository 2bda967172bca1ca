#pragma once

#include "entwit/qmat.hpp"
#include "entwit/randq.hpp"

#include <optional>
#include <vector>

namespace entwit {

inline constexpr double kPptTol = 1e-9;          // relative to the largest |eigenvalue|
inline constexpr double kOverlapCertTol = 1e-9;  // min product overlap >= -tol certifies
inline constexpr double kSeeSawConvTol = 1e-10;
inline constexpr int kSeeSawMaxAlternations = 200;
inline constexpr int kDefaultSeeSawRestarts = 1000;

// Negativity: absolute sum of the negative eigenvalues of rho^{T_A}.
double negativity(const ComplexMatrix& rho, const BipartiteDims& dims);
double negativity(const DensityMatrix& rho, const BipartiteDims& dims);

// True iff the smallest eigenvalue of rho^{T_A} is below -tol (tol relative to
// the spectral scale).
bool is_npt(const DensityMatrix& rho, const BipartiteDims& dims, double tol = kPptTol);

struct WitnessVerdict {
  enum class Method { PptCheck, OverlapMinimization };

  bool indefinite = false;
  bool pt_positive = false;
  std::optional<double> min_product_overlap;
  bool is_witness = false;
  Method method = Method::PptCheck;
};

// Witness identification through indefiniteness plus positivity of the partial
// transpose.
WitnessVerdict check_witness_ppt(const HermitianOperator& h, const BipartiteDims& dims,
                                 double tol = kPptTol);

struct SeeSawResult {
  double value = 0.0;
  int alternations = 0;
  std::vector<double> trace;  // overlap after each alternation, non-increasing
};

// One alternating-minimization descent from the given product state: fix |b>,
// take |a> as the minimal eigenvector of <b|W|b>, then the symmetric step.
SeeSawResult see_saw_overlap(const ComplexMatrix& w, const BipartiteDims& dims,
                             ComplexVector a0, ComplexVector b0,
                             double conv_tol = kSeeSawConvTol,
                             int max_alternations = kSeeSawMaxAlternations);

// Best <a,b|W|a,b> found over `restarts` random initializations; an upper bound
// on the true minimum over product states. If `stop_below` is finite the scan
// returns early once a value under it is found (useful to disqualify
// candidates quickly).
double min_product_overlap(const HermitianOperator& w, const BipartiteDims& dims,
                           int restarts, RngStream& rng);
double min_product_overlap(const ComplexMatrix& w, const BipartiteDims& dims,
                           int restarts, RngStream& rng,
                           double stop_below);

// Certification by overlap minimization: indefinite and nonnegative on all
// product states found. Heuristic; confidence grows with the restart count.
WitnessVerdict certify_witness_by_overlap(const HermitianOperator& h,
                                          const BipartiteDims& dims, int restarts,
                                          RngStream& rng);

enum class ShiftChoice {
  Midpoint,  // center of the feasible shift interval
  Optimal,   // left endpoint: keeps W^{T_A} barely positive
};

// Adds a multiple of the identity to make H an indefinite operator with
// positive partial transpose, then trace-normalizes. Returns nothing when no
// shift achieves both.
std::optional<HermitianOperator> identity_shift_witness(
    const HermitianOperator& h, const BipartiteDims& dims,
    ShiftChoice choice = ShiftChoice::Midpoint);

}  // namespace entwit
