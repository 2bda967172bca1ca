#include "entwit/detect.hpp"

#include "entwit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace entwit {

namespace {

// Off-diagonal fill order once a strategy's native sequence is exhausted:
// increasing |i - j|, then lexicographic.
std::vector<Cell> ordered_fill(const BipartiteDims& dims,
                               const std::vector<Cell>& exclude) {
  const int na = dims.d_a * dims.d_a - 1;
  const int nb = dims.d_b * dims.d_b - 1;
  std::vector<Cell> out;
  for (int i = 1; i <= na; ++i) {
    for (int j = 1; j <= nb; ++j) {
      const Cell c{i, j};
      if (std::find(exclude.begin(), exclude.end(), c) == exclude.end()) {
        out.push_back(c);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Cell& x, const Cell& y) {
    const int dx = std::abs(x.a - x.b), dy = std::abs(y.a - y.b);
    if (dx != dy) return dx < dy;
    return x < y;
  });
  return out;
}

std::vector<Cell> staircase_sequence(const BipartiteDims& dims) {
  const int na = dims.d_a * dims.d_a - 1;
  const int nb = dims.d_b * dims.d_b - 1;
  std::vector<Cell> seq{Cell{1, 1}};
  int a = 1, b = 1;
  bool prefer_b = true;  // (1,1) -> (1,2) changes Bob first
  for (;;) {
    const bool can_a = a < na, can_b = b < nb;
    if (!can_a && !can_b) break;
    if (prefer_b ? can_b : can_a) {
      (prefer_b ? b : a) += 1;
    } else {
      (prefer_b ? a : b) += 1;
    }
    seq.push_back(Cell{a, b});
    prefer_b = !prefer_b;
  }
  return seq;
}

}  // namespace

long tomographic_bound(const BipartiteDims& dims) {
  const long na = static_cast<long>(dims.d_a) * dims.d_a - 1;
  const long nb = static_cast<long>(dims.d_b) * dims.d_b - 1;
  return na * nb;
}

std::vector<Cell> next_cells(Strategy strategy, int round_index,
                             const BipartiteDims& dims) {
  if (round_index < 1) throw std::invalid_argument("next_cells: round_index >= 1");
  const int na = dims.d_a * dims.d_a - 1;
  const int nb = dims.d_b * dims.d_b - 1;

  switch (strategy) {
    case Strategy::Diagonal: {
      const int m = std::min(na, nb);
      if (round_index <= m) return {Cell{round_index, round_index}};
      std::vector<Cell> diag;
      for (int i = 1; i <= m; ++i) diag.push_back(Cell{i, i});
      const std::vector<Cell> fill = ordered_fill(dims, diag);
      const std::size_t idx = static_cast<std::size_t>(round_index - m - 1);
      if (idx < fill.size()) return {fill[idx]};
      return {};
    }
    case Strategy::FullSquare: {
      // Round 1 measures A_1 (x) B_1; afterwards the sides grow alternately
      // (Alice first) and every new combination is measured.
      if (round_index == 1) return {Cell{1, 1}};
      int ca = 1, cb = 1;
      bool prefer_a = true;
      for (int r = 2; r <= round_index; ++r) {
        const bool can_a = ca < na, can_b = cb < nb;
        if (!can_a && !can_b) return {};
        const bool grow_a = prefer_a ? can_a : !can_b;
        std::vector<Cell> added;
        if (grow_a) {
          ++ca;
          for (int j = 1; j <= cb; ++j) added.push_back(Cell{ca, j});
        } else {
          ++cb;
          for (int i = 1; i <= ca; ++i) added.push_back(Cell{i, cb});
        }
        if (r == round_index) return added;
        prefer_a = !prefer_a;
      }
      return {};
    }
    case Strategy::Staircase: {
      const std::vector<Cell> seq = staircase_sequence(dims);
      const std::size_t idx = static_cast<std::size_t>(round_index - 1);
      if (idx < seq.size()) return {seq[idx]};
      const std::vector<Cell> fill = ordered_fill(dims, seq);
      const std::size_t fidx = idx - seq.size();
      if (fidx < fill.size()) return {fill[fidx]};
      return {};
    }
  }
  return {};
}

DetectionRun run_detection(const DensityMatrix& rho, const BipartiteDims& dims,
                           Strategy strategy, const DetectConfig& cfg, RngStream& rng) {
  if (rho.dim() != dims.total()) {
    throw std::invalid_argument("run_detection: state dimension mismatch");
  }

  DetectionRun run;
  run.dims = dims;
  run.strategy = strategy;
  run.negativity_true = negativity(rho.matrix(), dims);

  std::vector<HermitianOperator> a_ops, b_ops;
  std::vector<Cell> measured;

  for (int round = 1;; ++round) {
    const std::vector<Cell> added = next_cells(strategy, round, dims);
    if (added.empty()) break;  // tomographically complete

    int need_a = 0, need_b = 0;
    for (const Cell& c : added) {
      need_a = std::max(need_a, c.a);
      need_b = std::max(need_b, c.b);
    }
    while (static_cast<int>(a_ops.size()) < need_a) {
      a_ops.push_back(random_hermitian(dims.d_a, rng));
    }
    while (static_cast<int>(b_ops.size()) < need_b) {
      b_ops.push_back(random_hermitian(dims.d_b, rng));
    }
    measured.insert(measured.end(), added.begin(), added.end());

    const MeasurementBasis basis = build_product_basis(dims, a_ops, b_ops, measured);
    const ExpectationVector m = expectation_vector(rho, basis);
    const SdpSolution sol = solve_witness_sdp(basis, m, cfg.sdp);
    if (sol.status == SdpStatus::InfeasibleNumerics) {
      throw NumericError("run_detection: SDP lost feasibility in round " +
                         std::to_string(round));
    }

    run.rounds.push_back(RoundLog{added, sol.optimal_value, sol.status, sol.duality_gap});
    run.final_value = sol.optimal_value;
    if (sol.optimal_value < -detection_threshold(cfg.sdp, sol.duality_gap)) {
      run.detected = true;
      break;
    }
  }

  run.n_global_measurements = static_cast<int>(measured.size());
  return run;
}

namespace {

FractionEstimate make_fraction(long count, long total) {
  FractionEstimate f;
  f.count = count;
  f.total = total;
  if (total > 0) {
    f.fraction = static_cast<double>(count) / static_cast<double>(total);
    f.std_error = std::sqrt(f.fraction * (1.0 - f.fraction) / static_cast<double>(total));
  }
  return f;
}

}  // namespace

RewSummary random_global_witness_experiment(const BipartiteDims& dims, long n_ops,
                                            long n_states, RngStream& rng,
                                            const RewConfig& cfg) {
  if (n_ops < 0 || n_states < 0) {
    throw std::invalid_argument("random_global_witness_experiment: negative counts");
  }
  const int d = dims.total();
  const int env = cfg.env_dim > 0 ? cfg.env_dim : d;

  RewSummary summary;
  summary.n_ops = n_ops;

  struct Found {
    ComplexMatrix w;
    bool via_ppt;
  };
  std::vector<Found> witnesses;

  RngStream op_stream = rng.substream(0x6F70u);  // operator classification draws
  for (long i = 0; i < n_ops; ++i) {
    RngStream sub = op_stream.substream(static_cast<std::uint64_t>(i));
    const HermitianOperator h = random_hermitian(d, sub);
    const WitnessVerdict ppt = check_witness_ppt(h, dims);
    if (ppt.indefinite) ++summary.n_indefinite;
    if (ppt.is_witness) {
      witnesses.push_back(Found{h.matrix(), true});
      continue;
    }
    if (!ppt.indefinite) continue;
    const WitnessVerdict ov =
        certify_witness_by_overlap(h, dims, cfg.overlap_restarts, sub);
    if (ov.is_witness) witnesses.push_back(Found{h.matrix(), false});
  }

  long n_ppt = 0, n_overlap = 0;
  for (const Found& f : witnesses) (f.via_ppt ? n_ppt : n_overlap) += 1;
  summary.ppt_witness = make_fraction(n_ppt, n_ops);
  summary.overlap_witness = make_fraction(n_overlap, n_ops);

  if (n_states == 0 || witnesses.empty()) return summary;

  const bool square = dims.d_a == dims.d_b;
  long det_mixed[2] = {0, 0}, det_maxent[2] = {0, 0};
  long tot_mixed[2] = {0, 0}, tot_maxent[2] = {0, 0};

  RngStream det_stream = rng.substream(0x7374u);  // detection-state draws
  for (std::size_t wi = 0; wi < witnesses.size(); ++wi) {
    const Found& f = witnesses[wi];
    const int cls = f.via_ppt ? 0 : 1;
    for (long j = 0; j < n_states; ++j) {
      RngStream sub = det_stream.substream(
          static_cast<std::uint64_t>(wi) * static_cast<std::uint64_t>(n_states) +
          static_cast<std::uint64_t>(j));
      const DensityMatrix mixed = random_mixed_state(MixedStateSpec(d, env), sub);
      const double val_mixed =
          f.w.transpose().cwiseProduct(mixed.matrix()).sum().real();
      tot_mixed[cls] += 1;
      if (val_mixed < 0.0) det_mixed[cls] += 1;
      if (square) {
        const ComplexVector psi = random_max_entangled(dims.d_a, sub);
        const Complex amp = (psi.adjoint() * f.w * psi)(0);
        tot_maxent[cls] += 1;
        if (amp.real() < 0.0) det_maxent[cls] += 1;
      }
    }
  }

  if (tot_mixed[0] > 0) summary.det_mixed_ppt = make_fraction(det_mixed[0], tot_mixed[0]);
  if (tot_mixed[1] > 0) {
    summary.det_mixed_overlap = make_fraction(det_mixed[1], tot_mixed[1]);
  }
  if (tot_maxent[0] > 0) {
    summary.det_maxent_ppt = make_fraction(det_maxent[0], tot_maxent[0]);
  }
  if (tot_maxent[1] > 0) {
    summary.det_maxent_overlap = make_fraction(det_maxent[1], tot_maxent[1]);
  }
  return summary;
}

}  // namespace entwit
