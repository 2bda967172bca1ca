#pragma once

#include "entwit/qmat.hpp"

#include <span>
#include <vector>

namespace entwit {

// Tolerances from the solution contract.
inline constexpr double kSdpReconstructionTol = 1e-8;
inline constexpr double kSdpConeTol = 1e-7;
inline constexpr double kSdpTraceTol = 1e-8;

// One entry of the measurement table; index 0 on either side is the identity.
struct Cell {
  int a = 0;
  int b = 0;
  auto operator<=>(const Cell&) const = default;
};

// Ordered table of local observables plus the set of measured cells.
// Invariants: cells are sorted row-major, unique, contain (0,0), and every
// global cell (i,j) with i,j >= 1 is accompanied by its marginals (i,0), (0,j).
struct MeasurementBasis {
  BipartiteDims dims;
  std::vector<HermitianOperator> a_ops;  // a_ops[i-1] realizes index i
  std::vector<HermitianOperator> b_ops;
  std::vector<Cell> cells;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int index_of(const Cell& c) const;  // -1 when absent
  ComplexMatrix product_operator(const Cell& c) const;  // A_i (x) B_j
  std::vector<ComplexMatrix> product_operators() const;
};

// Builds the basis as the closure of `strategy_cells` under the free-marginal
// rule: measuring A_i (x) B_j also fixes A_i (x) 1 and 1 (x) B_j.
MeasurementBasis build_product_basis(const BipartiteDims& dims,
                                     std::vector<HermitianOperator> a_ops,
                                     std::vector<HermitianOperator> b_ops,
                                     std::span<const Cell> strategy_cells);

struct ExpectationVector {
  enum class Source { Exact, Sampled };
  std::vector<double> values;  // aligned with basis.cells
  Source source = Source::Exact;
};

// Exact expectation values tr((A_i (x) B_j) rho) for every measured cell.
ExpectationVector expectation_vector(const DensityMatrix& rho,
                                     const MeasurementBasis& basis);

enum class SdpStatus { Optimal, MaxIterations, InfeasibleNumerics };

struct SdpConfig {
  double gap_tol = 1e-7;
  int max_iterations = 200;       // total Newton steps
  double detection_floor = 1e-6;  // entanglement claimed below -max(floor, 10*gap)
  double t_growth = 8.0;          // barrier parameter multiplier per stage
  double boundary_fraction = 0.98;
  double center_tol = 1e-6;       // half squared Newton decrement, final stage
};

struct SdpSolution {
  std::vector<double> coefficients;  // aligned with basis.cells
  HermitianOperator witness;
  HermitianOperator p_matrix;
  HermitianOperator q_matrix;
  double optimal_value = 0.0;
  SdpStatus status = SdpStatus::Optimal;
  double duality_gap = 0.0;
  int newton_steps = 0;
};

// Minimizes c.m over normalized decomposable witnesses W = sum c_ij A_i (x) B_j
// = P + Q^{T_A}, P, Q >= 0, tr W = 1. Log-barrier path following over (c, Q)
// with P eliminated; always starts from the strictly feasible W = I/d point.
SdpSolution solve_witness_sdp(const MeasurementBasis& basis, const ExpectationVector& m,
                              const SdpConfig& cfg = {});

struct ResidualReport {
  double basis_reconstruction = 0.0;  // max |W - sum c_ij A_i (x) B_j|
  double decomposition = 0.0;         // max |W - (P + Q^{T_A})|
  double p_min_eigenvalue = 0.0;
  double q_min_eigenvalue = 0.0;
  double trace_error = 0.0;           // |tr W - 1|
  double objective_mismatch = 0.0;    // |c.m - optimal_value|

  bool all_within_tolerances() const;
};

ResidualReport verify_solution(const SdpSolution& sol, const MeasurementBasis& basis,
                               const ExpectationVector& m);

// Negative values beyond this threshold count as detection.
double detection_threshold(const SdpConfig& cfg, double duality_gap);

}  // namespace entwit
