#include "entwit/detect.hpp"
#include "entwit/states.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace entwit;

namespace {

// Every strategy must enumerate each global cell exactly once before
// reporting exhaustion.
void check_enumeration(Strategy s, const BipartiteDims& dims) {
  std::set<Cell> seen;
  int round = 1;
  for (;; ++round) {
    const std::vector<Cell> cells = next_cells(s, round, dims);
    if (cells.empty()) break;
    for (const Cell& c : cells) {
      CHECK(c.a >= 1);
      CHECK(c.b >= 1);
      CHECK(c.a <= dims.d_a * dims.d_a - 1);
      CHECK(c.b <= dims.d_b * dims.d_b - 1);
      CHECK(seen.insert(c).second);  // never repeated
    }
  }
  CHECK(static_cast<long>(seen.size()) == tomographic_bound(dims));
  CHECK(next_cells(s, round + 1, dims).empty());
}

}  // namespace

TEST_SUITE("detect") {

TEST_CASE("tomographic_bound: 2x2, 3x3, 2x3") {
  CHECK(tomographic_bound(BipartiteDims(2, 2)) == 9);
  CHECK(tomographic_bound(BipartiteDims(3, 3)) == 64);
  CHECK(tomographic_bound(BipartiteDims(2, 3)) == 24);
}

TEST_CASE("next_cells: diagonal strategy") {
  const BipartiteDims dims(2, 2);
  CHECK(next_cells(Strategy::Diagonal, 1, dims) == std::vector<Cell>{Cell{1, 1}});
  CHECK(next_cells(Strategy::Diagonal, 2, dims) == std::vector<Cell>{Cell{2, 2}});
  CHECK(next_cells(Strategy::Diagonal, 3, dims) == std::vector<Cell>{Cell{3, 3}});
  // Off-diagonal continuation: increasing |i-j|, then lexicographic.
  CHECK(next_cells(Strategy::Diagonal, 4, dims) == std::vector<Cell>{Cell{1, 2}});
  CHECK(next_cells(Strategy::Diagonal, 5, dims) == std::vector<Cell>{Cell{2, 1}});
  CHECK(next_cells(Strategy::Diagonal, 6, dims) == std::vector<Cell>{Cell{2, 3}});
  CHECK(next_cells(Strategy::Diagonal, 7, dims) == std::vector<Cell>{Cell{3, 2}});
  CHECK(next_cells(Strategy::Diagonal, 8, dims) == std::vector<Cell>{Cell{1, 3}});
  CHECK(next_cells(Strategy::Diagonal, 9, dims) == std::vector<Cell>{Cell{3, 1}});
  CHECK(next_cells(Strategy::Diagonal, 10, dims).empty());
  CHECK_THROWS_AS(next_cells(Strategy::Diagonal, 0, dims), std::invalid_argument);

  check_enumeration(Strategy::Diagonal, BipartiteDims(2, 2));
  check_enumeration(Strategy::Diagonal, BipartiteDims(2, 3));
  check_enumeration(Strategy::Diagonal, BipartiteDims(3, 3));
}

TEST_CASE("next_cells: staircase strategy follows the alternating sequence") {
  const BipartiteDims dims(2, 2);
  CHECK(next_cells(Strategy::Staircase, 1, dims) == std::vector<Cell>{Cell{1, 1}});
  CHECK(next_cells(Strategy::Staircase, 2, dims) == std::vector<Cell>{Cell{1, 2}});
  CHECK(next_cells(Strategy::Staircase, 3, dims) == std::vector<Cell>{Cell{2, 2}});
  CHECK(next_cells(Strategy::Staircase, 4, dims) == std::vector<Cell>{Cell{2, 3}});
  CHECK(next_cells(Strategy::Staircase, 5, dims) == std::vector<Cell>{Cell{3, 3}});
  check_enumeration(Strategy::Staircase, BipartiteDims(2, 2));
  check_enumeration(Strategy::Staircase, BipartiteDims(2, 3));
}

TEST_CASE("next_cells: full-square strategy alternates sides starting with Alice") {
  const BipartiteDims dims(2, 2);
  CHECK(next_cells(Strategy::FullSquare, 1, dims) == std::vector<Cell>{Cell{1, 1}});
  CHECK(next_cells(Strategy::FullSquare, 2, dims) == std::vector<Cell>{Cell{2, 1}});
  CHECK(next_cells(Strategy::FullSquare, 3, dims) ==
        std::vector<Cell>{Cell{1, 2}, Cell{2, 2}});
  CHECK(next_cells(Strategy::FullSquare, 4, dims) ==
        std::vector<Cell>{Cell{3, 1}, Cell{3, 2}});
  CHECK(next_cells(Strategy::FullSquare, 5, dims) ==
        std::vector<Cell>{Cell{1, 3}, Cell{2, 3}, Cell{3, 3}});
  CHECK(next_cells(Strategy::FullSquare, 6, dims).empty());
  check_enumeration(Strategy::FullSquare, BipartiteDims(2, 2));
  check_enumeration(Strategy::FullSquare, BipartiteDims(2, 3));
}

TEST_CASE("run_detection: product state is never detected and exhausts the square") {
  RngStream rng(21);
  const BipartiteDims dims(2, 2);
  const ComplexVector a = random_pure_state(2, rng);
  const ComplexVector b = random_pure_state(2, rng);
  ComplexVector ab(4);
  ab << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  const DensityMatrix rho = DensityMatrix::pure(ab, dims);
  const DetectionRun run = run_detection(rho, dims, Strategy::Diagonal, {}, rng);
  CHECK_FALSE(run.detected);
  CHECK(run.n_global_measurements == 9);
  CHECK(run.negativity_true < 1e-9);
  CHECK(run.final_value >= -1e-6);
}

TEST_CASE("run_detection: Bell state is detected within the bound") {
  RngStream rng(22);
  const BipartiteDims dims(2, 2);
  const DetectionRun run = run_detection(bell_state(), dims, Strategy::Diagonal, {}, rng);
  CHECK(run.detected);
  CHECK(run.n_global_measurements <= 9);
  CHECK(run.n_global_measurements >= 2);  // one product cell can never witness
  CHECK(run.final_value < -1e-6);
}

TEST_CASE("run_detection: PPT Werner state exhausts, NPT Werner detected") {
  RngStream rng(23);
  const BipartiteDims dims(2, 2);
  const DetectionRun ppt = run_detection(werner_state(0.2), dims, Strategy::Diagonal, {}, rng);
  CHECK_FALSE(ppt.detected);
  CHECK(ppt.n_global_measurements == 9);

  const DetectionRun npt = run_detection(werner_state(0.9), dims, Strategy::Diagonal, {}, rng);
  CHECK(npt.detected);
}

TEST_CASE("run_detection: soundness, monotone rounds, completeness at 2x2") {
  RngStream rng(24);
  const BipartiteDims dims(2, 2);
  for (int trial = 0; trial < 30; ++trial) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(trial));
    const DensityMatrix rho =
        random_mixed_state(MixedStateSpec(4, 4), sub).with_dims(dims);
    const DetectionRun run = run_detection(rho, dims, Strategy::Diagonal, {}, sub);
    // Never a false positive with exact data.
    if (run.detected) CHECK(run.negativity_true > 1e-7);
    // PPT is conclusive at 2x2, so exhaustion means separable.
    if (!run.detected) {
      CHECK(run.negativity_true <= 1e-7);
      CHECK(run.n_global_measurements == 9);
    }
    for (std::size_t r = 1; r < run.rounds.size(); ++r) {
      CHECK(run.rounds[r].sdp_value <= run.rounds[r - 1].sdp_value + 1e-7);
    }
    // A single product measurement never certifies entanglement.
    CHECK(run.rounds[0].sdp_value >= -1e-6);
  }
}

TEST_CASE("run_detection: staircase and full-square terminate too") {
  RngStream rng(25);
  const BipartiteDims dims(2, 2);
  for (Strategy s : {Strategy::Staircase, Strategy::FullSquare}) {
    const DetectionRun run = run_detection(bell_state(), dims, s, {}, rng);
    CHECK(run.detected);
    CHECK(run.n_global_measurements <= 9);
  }
}

TEST_CASE("random_global_witness_experiment: degenerate and small runs") {
  RngStream rng(26);
  const BipartiteDims dims(2, 2);
  const RewSummary empty = random_global_witness_experiment(dims, 0, 0, rng);
  CHECK(empty.n_ops == 0);
  CHECK(empty.ppt_witness.total == 0);
  CHECK(empty.ppt_witness.fraction == 0.0);
  CHECK_FALSE(empty.det_mixed_ppt.has_value());

  RewConfig cfg;
  cfg.overlap_restarts = 50;
  const RewSummary small = random_global_witness_experiment(dims, 300, 0, rng, cfg);
  CHECK(small.n_ops == 300);
  CHECK(small.n_indefinite > 150);  // most random operators are indefinite
  CHECK(small.ppt_witness.count + small.overlap_witness.count <= small.n_indefinite);
  CHECK_FALSE(small.det_maxent_ppt.has_value());

  const RewSummary with_states = random_global_witness_experiment(dims, 300, 3, rng, cfg);
  if (with_states.ppt_witness.count > 0) {
    REQUIRE(with_states.det_mixed_ppt.has_value());
    CHECK(with_states.det_mixed_ppt->total == 3 * with_states.ppt_witness.count);
    REQUIRE(with_states.det_maxent_ppt.has_value());
    CHECK(with_states.det_maxent_ppt->fraction >= 0.0);
    CHECK(with_states.det_maxent_ppt->fraction <= 1.0);
  }
}

}  // TEST_SUITE
