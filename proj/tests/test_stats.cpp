#include "entwit/stats.hpp"
#include "entwit/states.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace entwit;

namespace {

// Complete two-qubit basis from dichotomic local observables.
MeasurementBasis dichotomic_basis_2x2(RngStream& rng) {
  std::vector<HermitianOperator> a_ops, b_ops;
  for (int i = 0; i < 3; ++i) {
    a_ops.push_back(random_dichotomic(2, rng));
    b_ops.push_back(random_dichotomic(2, rng));
  }
  std::vector<Cell> cells;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) cells.push_back(Cell{i, j});
  }
  return build_product_basis(BipartiteDims(2, 2), a_ops, b_ops, cells);
}

std::vector<long> uniform_shots(const MeasurementBasis& basis, long shots) {
  std::vector<long> out(basis.cells.size(), shots);
  for (std::size_t i = 0; i < basis.cells.size(); ++i) {
    if (basis.cells[i] == Cell{0, 0}) out[i] = 0;
  }
  return out;
}

DensityMatrix product_state_2x2(RngStream& rng) {
  const ComplexVector a = random_pure_state(2, rng);
  const ComplexVector b = random_pure_state(2, rng);
  ComplexVector ab(4);
  ab << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return DensityMatrix::pure(ab, BipartiteDims(2, 2));
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("sample_dichotomic: deterministic outcome on an eigenstate") {
  RngStream rng(1);
  ComplexMatrix z(2, 2);
  z << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  const HermitianOperator zz(kron(z, z), BipartiteDims(2, 2));
  // <phi+| has Z x Z = +1 with certainty.
  const MeasurementRecord rec = sample_dichotomic(bell_state(), zz, 500, rng);
  CHECK(rec.shots == 500);
  CHECK(rec.n_plus == 500);

  const MeasurementRecord none = sample_dichotomic(bell_state(), zz, 0, rng);
  CHECK(none.n_plus == 0);
}

TEST_CASE("sample_dichotomic: maximally mixed state gives p = 1/2") {
  RngStream rng(2);
  const DensityMatrix mixed = maximally_mixed(4, BipartiteDims(2, 2));
  const long shots = 40000;
  double acc = 0.0;
  const int reps = 20;
  for (int i = 0; i < reps; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    const HermitianOperator m = random_dichotomic(4, sub);
    // Balanced +/- counts only happen for traceless draws; condition on them.
    if (std::abs(m.trace()) > 1e-9) continue;
    const MeasurementRecord rec = sample_dichotomic(mixed, m, shots, sub);
    acc = static_cast<double>(rec.n_plus) / static_cast<double>(shots);
    CHECK(std::abs(acc - 0.5) < 1.5 / std::sqrt(static_cast<double>(shots)));
  }
}

TEST_CASE("sample_dichotomic: rejects non-dichotomic observables") {
  RngStream rng(3);
  const HermitianOperator h = random_hermitian(4, rng);
  CHECK_THROWS_AS(
      sample_dichotomic(maximally_mixed(4), h, 10, rng), std::invalid_argument);
}

TEST_CASE("mean_estimate: arithmetic and the degenerate case") {
  CHECK(mean_estimate({{1, 1}, 10, 10}) == doctest::Approx(1.0));
  CHECK(mean_estimate({{1, 1}, 10, 5}) == doctest::Approx(0.0));
  CHECK(mean_estimate({{1, 1}, 10, 7}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(mean_estimate({{1, 1}, 0, 0}), std::invalid_argument);
}

TEST_CASE("witness_error_bound: closed-form cases") {
  const std::vector<double> c1{1.0, 0.0, 0.0};
  const std::vector<long> n1{100, 100, 100};
  CHECK(witness_error_bound(c1, n1) == doctest::Approx(0.1));

  const std::vector<double> c0{0.0, 0.0};
  CHECK(witness_error_bound(c0, std::vector<long>{5, 5}) == doctest::Approx(0.0));

  const std::vector<double> c2{0.6, 0.8};
  const std::vector<long> n2{9, 16};
  CHECK(witness_error_bound(c2, n2) == doctest::Approx(std::sqrt(0.08)));

  CHECK_THROWS_AS(witness_error_bound(c2, std::vector<long>{9, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(witness_error_bound(c2, n1), std::invalid_argument);
}

TEST_CASE("split_data_certify: Bell state certified at 3 sigma") {
  RngStream rng(4);
  const MeasurementBasis basis = dichotomic_basis_2x2(rng);
  const SplitCertificate cert = split_data_certify(
      bell_state(), basis, uniform_shots(basis, 10000), 3.0, {}, rng);
  CHECK(cert.certified);
  CHECK(cert.mean_value < -0.3);  // close to the exact optimum -1/2
  CHECK(cert.error_bound > 0.0);
  CHECK(cert.mean_value + 3.0 * cert.error_bound < 0.0);
}

TEST_CASE("split_data_certify: separable states are not certified") {
  RngStream rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(trial));
    const MeasurementBasis basis = dichotomic_basis_2x2(sub);
    const DensityMatrix rho = product_state_2x2(sub);
    const SplitCertificate cert = split_data_certify(
        rho, basis, uniform_shots(basis, 1000000), 3.0, {}, sub);
    CHECK_FALSE(cert.certified);
  }
}

TEST_CASE("split_data_certify: tiny shot counts run but stay inconclusive") {
  RngStream rng(6);
  const MeasurementBasis basis = dichotomic_basis_2x2(rng);
  const SplitCertificate cert =
      split_data_certify(bell_state(), basis, uniform_shots(basis, 2), 3.0, {}, rng);
  CHECK(cert.error_bound >= std::abs(cert.mean_value) * 0.1);
  CHECK_FALSE(cert.certified);  // bound of order 1 dwarfs any mean
}

TEST_CASE("split_data_certify: validation of shot lists") {
  RngStream rng(7);
  const MeasurementBasis basis = dichotomic_basis_2x2(rng);
  std::vector<long> shots = uniform_shots(basis, 100);
  shots[1] = 99;  // odd
  CHECK_THROWS_AS(split_data_certify(bell_state(), basis, shots, 3.0, {}, rng),
                  std::invalid_argument);
  std::vector<long> with_identity = uniform_shots(basis, 100);
  with_identity[static_cast<std::size_t>(basis.index_of(Cell{0, 0}))] = 10;
  CHECK_THROWS_AS(
      split_data_certify(bell_state(), basis, with_identity, 3.0, {}, rng),
      std::invalid_argument);
}

TEST_CASE("split_data_certify: coefficients depend on half 1 only") {
  RngStream rng(8);
  const MeasurementBasis basis = dichotomic_basis_2x2(rng);
  const std::vector<long> shots = uniform_shots(basis, 1000);
  RngStream run_stream = rng.substream(99);
  RngStream replay = run_stream;
  const SplitCertificate cert =
      split_data_certify(bell_state(), basis, shots, 3.0, {}, run_stream);

  // Replay half 1 through the documented substream layout and solve directly.
  ExpectationVector half1;
  half1.source = ExpectationVector::Source::Sampled;
  half1.values.resize(basis.cells.size());
  for (std::size_t i = 0; i < basis.cells.size(); ++i) {
    const Cell& c = basis.cells[i];
    if (c.a == 0 && c.b == 0) {
      half1.values[i] = 1.0;
      continue;
    }
    const HermitianOperator obs(basis.product_operator(c), basis.dims);
    RngStream sub1 = replay.substream(2 * i);
    half1.values[i] =
        mean_estimate(sample_dichotomic(bell_state(), obs, shots[i] / 2, sub1));
  }
  const SdpSolution direct = solve_witness_sdp(basis, half1, {});
  REQUIRE(direct.coefficients.size() == cert.coefficients.size());
  for (std::size_t i = 0; i < cert.coefficients.size(); ++i) {
    CHECK(cert.coefficients[i] == doctest::Approx(direct.coefficients[i]).epsilon(1e-12));
  }
}

TEST_CASE("coverage: worst-case bound dominates the empirical spread") {
  // Fix one witness from sampled data, then resimulate the evaluation half
  // many times; the worst-case error bound must upper-bound the spread.
  RngStream rng(9);
  const MeasurementBasis basis = dichotomic_basis_2x2(rng);
  const long shots = 10000;
  const ExpectationVector exact = expectation_vector(bell_state(), basis);
  const SdpSolution sol = solve_witness_sdp(basis, exact, {});

  std::vector<long> half_shots(basis.cells.size(), shots / 2);
  std::vector<double> coeffs;
  std::vector<long> bound_shots;
  for (std::size_t i = 0; i < basis.cells.size(); ++i) {
    if (basis.cells[i] == Cell{0, 0}) continue;
    coeffs.push_back(sol.coefficients[i]);
    bound_shots.push_back(shots / 2);
  }
  const double bound = witness_error_bound(coeffs, bound_shots);

  const int resims = 1000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < resims; ++r) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(r) + 1000);
    double w = 0.0;
    for (std::size_t i = 0; i < basis.cells.size(); ++i) {
      if (basis.cells[i] == Cell{0, 0}) {
        w += sol.coefficients[i];
        continue;
      }
      const HermitianOperator obs(basis.product_operator(basis.cells[i]), basis.dims);
      w += sol.coefficients[i] *
           mean_estimate(sample_dichotomic(bell_state(), obs, shots / 2, sub));
    }
    sum += w;
    sumsq += w * w;
  }
  const double mean = sum / resims;
  const double stddev = std::sqrt(std::max(0.0, sumsq / resims - mean * mean));
  CHECK(stddev <= bound);
  // Unbiasedness: the mean estimate converges to the exact witness value.
  CHECK(std::abs(mean - sol.optimal_value) < 5.0 * bound / std::sqrt(resims) + 1e-4);
}

TEST_CASE("confidence_curve: grid shape and large-shot certification") {
  RngStream rng(10);
  const std::vector<int> rounds{3, 9};
  const std::vector<long> shots{100, 10000};
  const std::vector<ConfidencePoint> curve = confidence_curve(
      bell_state(), Strategy::Diagonal, rounds, shots, 3.0, {}, rng);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].n_rounds == 3);
  CHECK(curve[0].shots == 100);
  CHECK(curve[3].n_rounds == 9);
  CHECK(curve[3].shots == 10000);
  for (const ConfidencePoint& pt : curve) {
    CHECK(pt.upper == doctest::Approx(pt.mean_value + 3.0 * pt.error_bound));
  }
  // With the full square and plenty of shots the Bell state certifies.
  CHECK(curve[3].certified);
}

TEST_CASE("confidence_curve: upper bound decreases with shots on average") {
  RngStream rng(11);
  const std::vector<int> rounds{9};
  const std::vector<long> shots{200, 20000};
  double low_sum = 0.0, high_sum = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(s));
    const std::vector<ConfidencePoint> curve = confidence_curve(
        bell_state(), Strategy::Diagonal, rounds, shots, 3.0, {}, sub);
    low_sum += curve[0].upper;
    high_sum += curve[1].upper;
  }
  CHECK(high_sum / seeds < low_sum / seeds);
}

}  // TEST_SUITE
