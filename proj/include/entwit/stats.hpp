#pragma once

#include "entwit/detect.hpp"
#include "entwit/randq.hpp"
#include "entwit/witness_sdp.hpp"

#include <span>
#include <vector>

namespace entwit {

inline constexpr double kDichotomicTol = 1e-8;
inline constexpr double kDefaultSigmaLevel = 3.0;

struct MeasurementRecord {
  Cell cell{-1, -1};  // filled by callers that know the table position
  long shots = 0;
  long n_plus = 0;
};

// Simulates `shots` measurements of a dichotomic observable: n_plus is
// Binomial(shots, tr(P_+ rho)) with P_+ the +1 eigenprojector of M.
MeasurementRecord sample_dichotomic(const DensityMatrix& rho, const HermitianOperator& m,
                                    long shots, RngStream& rng);

// (n_+ - n_-)/N.
double mean_estimate(const MeasurementRecord& rec);

// Worst-case propagated uncertainty sqrt(sum_i c_i^2 / N_i); the binomial
// variance is bounded by p(1-p) <= 1/4.
double witness_error_bound(std::span<const double> coefficients,
                           std::span<const long> shots_per_cell);

struct SplitCertificate {
  std::vector<double> coefficients;  // from data half 1, aligned with basis cells
  double mean_value = 0.0;           // witness estimate from half 2
  double error_bound = 0.0;
  double sigma_level = 0.0;
  bool certified = false;            // mean + sigma * bound < 0
  SdpStatus sdp_status = SdpStatus::Optimal;
};

// Splits each cell's shots in half: the first half fixes the witness
// coefficients through the SDP, the second evaluates it, so the coefficients
// are independent of the evaluation noise. shots_per_cell aligns with
// basis.cells; the (0,0) entry must be 0 (its value is exact), all other
// entries even and >= 2. Every measured observable must be dichotomic.
SplitCertificate split_data_certify(const DensityMatrix& rho,
                                    const MeasurementBasis& basis,
                                    std::span<const long> shots_per_cell,
                                    double sigma_level, const SdpConfig& cfg,
                                    RngStream& rng);

struct ConfidencePoint {
  int n_rounds = 0;
  long shots = 0;
  double mean_value = 0.0;
  double error_bound = 0.0;
  double upper = 0.0;  // mean + sigma * bound
  bool certified = false;
};

// Upper end of the sigma-confidence interval across a grid of round counts and
// per-cell repetition counts, with one shared set of random dichotomic
// observables so round counts nest.
std::vector<ConfidencePoint> confidence_curve(const DensityMatrix& rho,
                                              Strategy strategy,
                                              std::span<const int> round_counts,
                                              std::span<const long> shots_grid,
                                              double sigma_level, const SdpConfig& cfg,
                                              RngStream& rng);

}  // namespace entwit
