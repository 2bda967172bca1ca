#include "entwit/entcore.hpp"
#include "entwit/qmat.hpp"
#include "entwit/randq.hpp"
#include "entwit/states.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace entwit;

namespace {

double max_abs(const ComplexMatrix& m) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) mx = std::max(mx, std::abs(m(i, j)));
  }
  return mx;
}

}  // namespace

TEST_SUITE("randq") {

TEST_CASE("RngStream: reproducible and substreams ignore parent consumption") {
  RngStream a(12345), b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream parent1(99), parent2(99);
  RngStream sub_before = parent1.substream(7);
  parent2.next_u64();
  parent2.normal();
  RngStream sub_after = parent2.substream(7);
  for (int i = 0; i < 20; ++i) CHECK(sub_before.next_u64() == sub_after.next_u64());
  CHECK(parent1.substream(7).next_u64() != parent1.substream(8).next_u64());
}

TEST_CASE("random_unitary: unitarity and d=1 phase") {
  RngStream rng(1);
  const ComplexMatrix u1 = random_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-12);
  for (int d : {2, 3, 5}) {
    const ComplexMatrix u = random_unitary(d, rng);
    CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(d, d)) < 1e-10);
  }
}

TEST_CASE("random_unitary: Haar first moment E|U_00|^2 = 1/d") {
  RngStream rng(2024);
  const int n = 10000, d = 4;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    acc += std::norm(random_unitary(d, sub)(0, 0));
  }
  CHECK(std::abs(acc / n - 0.25) < 0.015);
}

TEST_CASE("random_unitary: left-invariance of entry moments") {
  // Haar measure: U and V U are identically distributed for fixed V; compare
  // the first and second entry moments of the two ensembles.
  RngStream rng(5150);
  const int d = 3, n = 10000;
  RngStream vstream = rng.substream(999);
  const ComplexMatrix v = random_unitary(d, vstream);
  Complex mean1(0, 0), mean2(0, 0);
  double sq1 = 0.0, sq2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    const ComplexMatrix u = random_unitary(d, sub);
    const ComplexMatrix vu = v * u;
    mean1 += u(1, 2);
    mean2 += vu(1, 2);
    sq1 += std::norm(u(1, 2));
    sq2 += std::norm(vu(1, 2));
  }
  // E[U_ij] = 0 and E|U_ij|^2 = 1/d; three standard errors at these sizes.
  const double se_mean = std::sqrt(1.0 / d / n);
  CHECK(std::abs(mean1 / static_cast<double>(n)) < 3 * se_mean);
  CHECK(std::abs(mean2 / static_cast<double>(n)) < 3 * se_mean);
  const double var2 = 2.0 / (d * (d + 1.0)) - 1.0 / (d * d);
  const double se_sq = std::sqrt(var2 / n);
  CHECK(std::abs(sq1 / n - 1.0 / d) < 3 * se_sq);
  CHECK(std::abs(sq2 / n - 1.0 / d) < 3 * se_sq);
  CHECK(std::abs(sq1 / n - sq2 / n) < 3 * std::sqrt(2.0) * se_sq);
}

TEST_CASE("random_pure_state: norm, d=1, Haar moment") {
  RngStream rng(31);
  CHECK(std::abs(std::abs(random_pure_state(1, rng)(0)) - 1.0) < 1e-12);
  const int n = 10000, d = 4;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    const ComplexVector psi = random_pure_state(d, sub);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
    acc += std::norm(psi(0));
  }
  CHECK(std::abs(acc / n - 0.25) < 0.015);
}

TEST_CASE("random_mixed_state: k=1 pure, invariants hold") {
  RngStream rng(7);
  const DensityMatrix pure = random_mixed_state(MixedStateSpec(4, 1), rng);
  const double purity = (pure.matrix() * pure.matrix()).trace().real();
  CHECK(std::abs(purity - 1.0) < 1e-9);

  const DensityMatrix rho = random_mixed_state(MixedStateSpec(4, 4), rng);
  CHECK(std::abs(rho.op().trace() - 1.0) < 1e-10);
  CHECK(hermitian_eigenvalues(rho.matrix())(0) > -1e-10);
}

TEST_CASE("random_mixed_state: purity formula cross-checked by quadrature") {
  // Mean purity under the induced measure is (n+k)/(nk+1). At n=k=2 the claim
  // reduces to Gaussian moment ratios E[P(g)]/E[|g|^4] with P of degree 4, so
  // a 3-node Gauss-Hermite product rule over the 8 real coordinates is exact.
  const double nodes[3] = {-std::sqrt(3.0), 0.0, std::sqrt(3.0)};
  const double weights[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  double num = 0.0, den = 0.0;
  for (long point = 0; point < 6561; ++point) {
    long rem = point;
    double w = 1.0;
    double x[8];
    for (int i = 0; i < 8; ++i) {
      const int idx = static_cast<int>(rem % 3);
      rem /= 3;
      x[i] = nodes[idx];
      w *= weights[idx];
    }
    const Complex g[4] = {Complex(x[0], x[1]), Complex(x[2], x[3]),
                          Complex(x[4], x[5]), Complex(x[6], x[7])};
    // Unnormalized reduced state of the 2x2 split.
    const Complex r00 = g[0] * std::conj(g[0]) + g[1] * std::conj(g[1]);
    const Complex r01 = g[0] * std::conj(g[2]) + g[1] * std::conj(g[3]);
    const Complex r11 = g[2] * std::conj(g[2]) + g[3] * std::conj(g[3]);
    const double p_num =
        (r00 * r00 + r11 * r11 + 2.0 * r01 * std::conj(r01)).real();
    double norm2 = 0.0;
    for (const Complex& c : g) norm2 += std::norm(c);
    num += w * p_num;
    den += w * norm2 * norm2;
  }
  const double quadrature = num / den;
  CHECK(quadrature == doctest::Approx(4.0 / 5.0).epsilon(1e-12));

  // Monte-Carlo mean purity at n=k=4 against the same formula.
  RngStream rng(777);
  const int n = 10000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    const DensityMatrix rho = random_mixed_state(MixedStateSpec(4, 4), sub);
    acc += (rho.matrix() * rho.matrix()).trace().real();
  }
  CHECK(std::abs(acc / n - 8.0 / 17.0) < 0.01);
}

TEST_CASE("random_max_entangled: negativity, marginals, construction replay") {
  RngStream rng(404);
  for (int d : {2, 3}) {
    RngStream replay = rng;  // same state: replay the documented construction
    const ComplexVector psi = random_max_entangled(d, rng);
    const ComplexMatrix ua = random_unitary(d, replay);
    const ComplexMatrix ub = random_unitary(d, replay);
    const ComplexVector expected = kron(ua, ub) * phi_plus(d);
    CHECK((psi - expected).norm() < 1e-12);

    const BipartiteDims dims(d, d);
    const DensityMatrix rho = DensityMatrix::pure(psi, dims);
    CHECK(negativity(rho, dims) == doctest::Approx((d - 1) / 2.0).epsilon(1e-9));
    CHECK(max_abs(partial_trace(rho.matrix(), dims, Subsystem::B) -
                  ComplexMatrix::Identity(d, d) / static_cast<double>(d)) < 1e-9);
    CHECK(max_abs(partial_trace(rho.matrix(), dims, Subsystem::A) -
                  ComplexMatrix::Identity(d, d) / static_cast<double>(d)) < 1e-9);
  }
}

TEST_CASE("random_hermitian: trace one, spectrum equals rescaled diagonal") {
  RngStream rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream replay = rng;
    const HermitianOperator h = random_hermitian(4, rng);
    CHECK(std::abs(h.trace() - 1.0) < 1e-10);

    // Replay the diagonal draw, including the near-traceless rejection.
    RealVector diag(4);
    double tr;
    do {
      tr = 0.0;
      for (int i = 0; i < 4; ++i) {
        diag(i) = replay.uniform(-1.0, 1.0);
        tr += diag(i);
      }
    } while (std::abs(tr) < 0.05 * 4);
    std::vector<double> expected(4);
    for (int i = 0; i < 4; ++i) expected[static_cast<std::size_t>(i)] = diag(i) / tr;
    std::sort(expected.begin(), expected.end());
    const RealVector evs = hermitian_eigenvalues(h.matrix());
    for (int i = 0; i < 4; ++i) {
      CHECK(evs(i) ==
            doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-10));
    }
  }
}

TEST_CASE("random_dichotomic: involution, spectrum, symmetric trace") {
  RngStream rng(3333);
  const HermitianOperator m = random_dichotomic(4, rng);
  CHECK(max_abs(m.matrix() * m.matrix() - ComplexMatrix::Identity(4, 4)) < 1e-10);
  const RealVector evs = hermitian_eigenvalues(m.matrix());
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(std::abs(evs(i)) - 1.0) < 1e-10);
  }

  const int n = 10000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    acc += random_dichotomic(4, sub).trace() / 4.0;
  }
  CHECK(std::abs(acc / n) < 0.02);
}

TEST_CASE("binomial: edges, moments, and sampler cross-check") {
  RngStream rng(2718);
  CHECK(rng.binomial(0, 0.5) == 0);
  CHECK(rng.binomial(100, 0.0) == 0);
  CHECK(rng.binomial(100, 1.0) == 100);
  CHECK_THROWS_AS(rng.binomial(-1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rng.binomial(10, 1.5), std::invalid_argument);

  // Large-n moments (BTRD path).
  const std::int64_t n = 1000000;
  const double p = 0.37;
  const int reps = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double k = static_cast<double>(rng.binomial(n, p));
    sum += k;
    sumsq += k * k;
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  const double npq = n * p * (1 - p);
  CHECK(std::abs(mean - n * p) < 5.0 * std::sqrt(npq / reps));
  CHECK(var / npq > 0.85);
  CHECK(var / npq < 1.15);

  // The two samplers target the same distribution: compare moments at a
  // parameter point both can handle.
  const std::int64_t n2 = 200;
  const double p2 = 0.2;
  const int reps2 = 20000;
  double s_inv = 0.0, s_btrd = 0.0, v_inv = 0.0, v_btrd = 0.0;
  for (int i = 0; i < reps2; ++i) {
    const double a = static_cast<double>(detail::binomial_inversion(n2, p2, rng));
    const double b = static_cast<double>(detail::binomial_btrd(n2, p2, rng));
    s_inv += a;
    s_btrd += b;
    v_inv += a * a;
    v_btrd += b * b;
  }
  const double m_inv = s_inv / reps2, m_btrd = s_btrd / reps2;
  const double npq2 = n2 * p2 * (1 - p2);
  const double se = std::sqrt(npq2 / reps2);
  CHECK(std::abs(m_inv - n2 * p2) < 5 * se);
  CHECK(std::abs(m_btrd - n2 * p2) < 5 * se);
  CHECK(std::abs(m_inv - m_btrd) < 5 * std::sqrt(2.0) * se);
  const double var_inv = v_inv / reps2 - m_inv * m_inv;
  const double var_btrd = v_btrd / reps2 - m_btrd * m_btrd;
  CHECK(var_inv / npq2 > 0.9);
  CHECK(var_inv / npq2 < 1.1);
  CHECK(var_btrd / npq2 > 0.9);
  CHECK(var_btrd / npq2 < 1.1);
}

TEST_CASE("spec preconditions rejected") {
  RngStream rng(1);
  CHECK_THROWS_AS(random_unitary(0, rng), std::invalid_argument);
  CHECK_THROWS_AS(random_max_entangled(1, rng), std::invalid_argument);
  CHECK_THROWS_AS(random_dichotomic(1, rng), std::invalid_argument);
  CHECK_THROWS_AS(MixedStateSpec(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(MixedStateSpec(2, 0), std::invalid_argument);
}

}  // TEST_SUITE
