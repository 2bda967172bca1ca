#include "entwit/stats.hpp"

#include "entwit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace entwit {

namespace {

double plus_probability(const DensityMatrix& rho, const HermitianOperator& m) {
  const int d = m.dim();
  ComplexMatrix sq = m.matrix() * m.matrix();
  sq -= ComplexMatrix::Identity(d, d);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(sq(i, j)));
  }
  if (worst > kDichotomicTol) {
    throw std::invalid_argument("sample_dichotomic: observable is not dichotomic");
  }
  const EigResult eig = hermitian_eig(m.matrix());
  double p = 0.0;
  for (int i = 0; i < d; ++i) {
    if (eig.eigenvalues(i) > 0.0) {
      const ComplexVector v = eig.eigenvectors.col(i);
      p += (v.adjoint() * rho.matrix() * v)(0).real();
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

MeasurementRecord sample_dichotomic(const DensityMatrix& rho, const HermitianOperator& m,
                                    long shots, RngStream& rng) {
  if (shots < 0) throw std::invalid_argument("sample_dichotomic: negative shot count");
  if (rho.dim() != m.dim()) {
    throw std::invalid_argument("sample_dichotomic: dimension mismatch");
  }
  MeasurementRecord rec;
  rec.shots = shots;
  if (shots == 0) return rec;
  const double p = plus_probability(rho, m);
  rec.n_plus = rng.binomial(shots, p);
  return rec;
}

double mean_estimate(const MeasurementRecord& rec) {
  if (rec.shots < 1) throw std::invalid_argument("mean_estimate: needs shots >= 1");
  return static_cast<double>(2 * rec.n_plus - rec.shots) / static_cast<double>(rec.shots);
}

double witness_error_bound(std::span<const double> coefficients,
                           std::span<const long> shots_per_cell) {
  if (coefficients.size() != shots_per_cell.size()) {
    throw std::invalid_argument("witness_error_bound: misaligned lists");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (shots_per_cell[i] < 1) {
      throw std::invalid_argument("witness_error_bound: every cell needs shots >= 1");
    }
    acc += coefficients[i] * coefficients[i] / static_cast<double>(shots_per_cell[i]);
  }
  return std::sqrt(acc);
}

SplitCertificate split_data_certify(const DensityMatrix& rho,
                                    const MeasurementBasis& basis,
                                    std::span<const long> shots_per_cell,
                                    double sigma_level, const SdpConfig& cfg,
                                    RngStream& rng) {
  const std::size_t n = basis.cells.size();
  if (shots_per_cell.size() != n) {
    throw std::invalid_argument("split_data_certify: shots_per_cell misaligned");
  }
  if (rho.dim() != basis.dims.total()) {
    throw std::invalid_argument("split_data_certify: state dimension mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& c = basis.cells[i];
    if (c.a == 0 && c.b == 0) {
      if (shots_per_cell[i] != 0) {
        throw std::invalid_argument(
            "split_data_certify: identity cell is exact, give it 0 shots");
      }
      continue;
    }
    if (shots_per_cell[i] < 2 || shots_per_cell[i] % 2 != 0) {
      throw std::invalid_argument(
          "split_data_certify: each sampled cell needs an even shot count >= 2");
    }
  }

  ExpectationVector half1, half2;
  half1.source = half2.source = ExpectationVector::Source::Sampled;
  half1.values.resize(n);
  half2.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& c = basis.cells[i];
    if (c.a == 0 && c.b == 0) {
      half1.values[i] = half2.values[i] = 1.0;
      continue;
    }
    const HermitianOperator obs(basis.product_operator(c), basis.dims);
    const long half_shots = shots_per_cell[i] / 2;
    RngStream sub1 = rng.substream(2 * i);
    RngStream sub2 = rng.substream(2 * i + 1);
    half1.values[i] = mean_estimate(sample_dichotomic(rho, obs, half_shots, sub1));
    half2.values[i] = mean_estimate(sample_dichotomic(rho, obs, half_shots, sub2));
  }

  const SdpSolution sol = solve_witness_sdp(basis, half1, cfg);
  if (sol.status == SdpStatus::InfeasibleNumerics) {
    throw NumericError("split_data_certify: witness SDP lost feasibility");
  }

  SplitCertificate cert;
  cert.coefficients = sol.coefficients;
  cert.sigma_level = sigma_level;
  cert.sdp_status = sol.status;

  double mean = 0.0;
  std::vector<double> sampled_coeffs;
  std::vector<long> sampled_shots;
  for (std::size_t i = 0; i < n; ++i) {
    mean += sol.coefficients[i] * half2.values[i];
    const Cell& c = basis.cells[i];
    if (c.a == 0 && c.b == 0) continue;
    sampled_coeffs.push_back(sol.coefficients[i]);
    sampled_shots.push_back(shots_per_cell[i] / 2);
  }
  cert.mean_value = mean;
  cert.error_bound = witness_error_bound(sampled_coeffs, sampled_shots);
  cert.certified = cert.mean_value + sigma_level * cert.error_bound < 0.0;
  return cert;
}

std::vector<ConfidencePoint> confidence_curve(const DensityMatrix& rho,
                                              Strategy strategy,
                                              std::span<const int> round_counts,
                                              std::span<const long> shots_grid,
                                              double sigma_level, const SdpConfig& cfg,
                                              RngStream& rng) {
  if (!rho.dims().has_value()) {
    throw std::invalid_argument("confidence_curve: state needs bipartite dims");
  }
  const BipartiteDims dims = rho.dims().value();

  int max_rounds = 0;
  for (int r : round_counts) {
    if (r < 1) throw std::invalid_argument("confidence_curve: round counts >= 1");
    max_rounds = std::max(max_rounds, r);
  }

  // One observable set shared across the whole grid so round counts nest.
  std::vector<HermitianOperator> a_ops, b_ops;
  std::vector<std::vector<Cell>> cells_by_round;  // cumulative
  std::vector<Cell> acc;
  for (int round = 1; round <= max_rounds; ++round) {
    const std::vector<Cell> added = next_cells(strategy, round, dims);
    int need_a = 0, need_b = 0;
    for (const Cell& c : added) {
      need_a = std::max(need_a, c.a);
      need_b = std::max(need_b, c.b);
    }
    while (static_cast<int>(a_ops.size()) < need_a) {
      a_ops.push_back(random_dichotomic(dims.d_a, rng));
    }
    while (static_cast<int>(b_ops.size()) < need_b) {
      b_ops.push_back(random_dichotomic(dims.d_b, rng));
    }
    acc.insert(acc.end(), added.begin(), added.end());
    cells_by_round.push_back(acc);
  }

  std::vector<ConfidencePoint> out;
  RngStream grid_stream = rng.substream(0x63757276u);
  for (std::size_t ri = 0; ri < round_counts.size(); ++ri) {
    const int r = round_counts[ri];
    const std::vector<Cell>& cells = cells_by_round[static_cast<std::size_t>(r - 1)];
    const MeasurementBasis basis = build_product_basis(dims, a_ops, b_ops, cells);

    for (std::size_t ni = 0; ni < shots_grid.size(); ++ni) {
      const long shots = shots_grid[ni];
      std::vector<long> shots_per_cell(basis.cells.size(), shots);
      for (std::size_t i = 0; i < basis.cells.size(); ++i) {
        if (basis.cells[i] == Cell{0, 0}) shots_per_cell[i] = 0;
      }
      RngStream sub = grid_stream.substream((static_cast<std::uint64_t>(ri) << 32) |
                                            static_cast<std::uint64_t>(ni));
      const SplitCertificate cert =
          split_data_certify(rho, basis, shots_per_cell, sigma_level, cfg, sub);
      out.push_back(ConfidencePoint{r, shots, cert.mean_value, cert.error_bound,
                                    cert.mean_value + sigma_level * cert.error_bound,
                                    cert.certified});
    }
  }
  return out;
}

}  // namespace entwit
