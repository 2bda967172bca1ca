#pragma once

#include "entwit/entcore.hpp"
#include "entwit/witness_sdp.hpp"

#include <optional>
#include <vector>

namespace entwit {

enum class Strategy {
  FullSquare,  // grow one side per round, measure all combinations
  Diagonal,    // one fresh pair per round: A_r (x) B_r, then off-diagonal fill
  Staircase,   // alternate single-side changes: (1,1) -> (1,2) -> (2,2) -> ...
};

// Upper bound on global product measurements: (d_A^2-1)(d_B^2-1).
long tomographic_bound(const BipartiteDims& dims);

// Global cells measured in the given 1-based round. An empty result signals
// that the strategy is exhausted (tomographically complete).
std::vector<Cell> next_cells(Strategy strategy, int round_index, const BipartiteDims& dims);

struct RoundLog {
  std::vector<Cell> cells_added;
  double sdp_value = 0.0;
  SdpStatus sdp_status = SdpStatus::Optimal;
  double duality_gap = 0.0;
};

struct DetectionRun {
  BipartiteDims dims;
  Strategy strategy = Strategy::Diagonal;
  std::vector<RoundLog> rounds;
  bool detected = false;
  int n_global_measurements = 0;  // cells with both indices >= 1
  double final_value = 0.0;
  double negativity_true = 0.0;
};

struct DetectConfig {
  SdpConfig sdp;
};

// The incremental scheme: extend the measured cells round by round, drawing
// fresh random local observables as new indices appear, solve the witness SDP
// on exact expectations, and stop at detection or tomographic completion.
DetectionRun run_detection(const DensityMatrix& rho, const BipartiteDims& dims,
                           Strategy strategy, const DetectConfig& cfg, RngStream& rng);

struct FractionEstimate {
  long count = 0;
  long total = 0;
  double fraction = 0.0;
  double std_error = 0.0;
};

struct RewConfig {
  int overlap_restarts = kDefaultSeeSawRestarts;
  int env_dim = 0;  // 0: environment dimension equals the system dimension
};

struct RewSummary {
  long n_ops = 0;
  long n_indefinite = 0;
  FractionEstimate ppt_witness;      // identified via positive partial transpose
  FractionEstimate overlap_witness;  // additionally certified by overlap minimization
  // Detection probabilities; absent when n_states == 0 or no witnesses found.
  std::optional<FractionEstimate> det_mixed_ppt;
  std::optional<FractionEstimate> det_mixed_overlap;
  std::optional<FractionEstimate> det_maxent_ppt;  // square dims only
  std::optional<FractionEstimate> det_maxent_overlap;
};

// The random-global-witness baseline: classify random Hermitian operators as
// witnesses, then measure how often those witnesses detect random states.
RewSummary random_global_witness_experiment(const BipartiteDims& dims, long n_ops,
                                            long n_states, RngStream& rng,
                                            const RewConfig& cfg = {});

}  // namespace entwit
