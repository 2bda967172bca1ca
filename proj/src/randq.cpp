#include "entwit/randq.hpp"

#include <cmath>
#include <numbers>

namespace entwit {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stirling series correction ln(k!) - Stirling(k), per the BTRD reference tables.
double stirling_correction(std::int64_t k) {
  static const double table[10] = {
      0.08106146679532726, 0.04134069595540929, 0.02767792568499834,
      0.02079067210376509, 0.01664469118982119, 0.01387612882307075,
      0.01189670994589177, 0.01041126526197209, 0.009255462182712733,
      0.008330563433362871};
  if (k < 10) return table[k];
  const double kk = static_cast<double>(k + 1);
  const double kk2 = kk * kk;
  return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * kk2)) / kk2) / kk;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RngStream RngStream::substream(std::uint64_t key) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(key ^ 0xA076BE5C0F15E8D1ULL)));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im);
}

namespace detail {

std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double f0 = std::exp(static_cast<double>(n) * std::log1p(-p));
  for (;;) {
    double f = f0;
    double u = rng.uniform01();
    std::int64_t k = 0;
    bool restart = false;
    while (u > f) {
      u -= f;
      ++k;
      if (k > n) {  // rounding tail; retry
        restart = true;
        break;
      }
      f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    if (!restart) return k;
  }
}

// Hoermann's BTRD transformed-rejection sampler; requires p <= 0.5 and
// n*p*(1-p) large enough that the normal-shaped hat is efficient.
std::int64_t binomial_btrd(std::int64_t n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const std::int64_t m = static_cast<std::int64_t>(std::floor((n + 1) * p));
  const double r = p / q;
  const double nr = (n + 1) * r;
  const double npq = n * p * q;
  const double sqrt_npq = std::sqrt(npq);
  const double b = 1.15 + 2.53 * sqrt_npq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double alpha = (2.83 + 5.1 / b) * sqrt_npq;
  const double v_r = 0.92 - 4.2 / b;
  const double u_rv_r = 0.86 * v_r;

  for (;;) {
    double v = rng.uniform01();
    double u;
    if (v <= u_rv_r) {
      u = v / v_r - 0.43;
      return static_cast<std::int64_t>(
          std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + c));
    }
    if (v >= v_r) {
      u = rng.uniform01() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0.0 ? -0.5 : 0.5) - u;
      v = rng.uniform01() * v_r;
    }
    const double us = 0.5 - std::abs(u);
    const std::int64_t k =
        static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + c));
    if (k < 0 || k > n) continue;
    v = v * alpha / (a / (us * us) + b);
    const std::int64_t km = std::llabs(k - m);
    if (km <= 15) {
      double f = 1.0;
      if (m < k) {
        for (std::int64_t i = m + 1; i <= k; ++i) f *= (nr / i - r);
      } else if (m > k) {
        for (std::int64_t i = k + 1; i <= m; ++i) v *= (nr / i - r);
      }
      if (v <= f) return k;
      continue;
    }
    v = std::log(v);
    const double rho =
        (km / npq) * (((km / 3.0 + 0.625) * km + 1.0 / 6.0) / npq + 0.5);
    const double t = -0.5 * km * km / npq;
    if (v < t - rho) return k;
    if (v > t + rho) continue;
    const std::int64_t nm = n - m + 1;
    const std::int64_t nk = n - k + 1;
    const double h = (m + 0.5) * std::log((m + 1) / (r * nm)) +
                     stirling_correction(m) + stirling_correction(n - m);
    const double bound =
        h + (n + 1) * std::log(static_cast<double>(nm) / nk) +
        (k + 0.5) * std::log(nk * r / (k + 1)) - stirling_correction(k) -
        stirling_correction(n - k);
    if (v <= bound) return k;
  }
}

}  // namespace detail

std::int64_t RngStream::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial: n must be >= 0");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p must be in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  std::int64_t k;
  if (static_cast<double>(n) * pp <= 30.0) {
    k = detail::binomial_inversion(n, pp, *this);
  } else {
    k = detail::binomial_btrd(n, pp, *this);
  }
  return flip ? n - k : k;
}

ComplexMatrix random_unitary(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("random_unitary: need d >= 1");
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  // Modified Gram-Schmidt, two passes for orthonormality at the 1e-14 level.
  ComplexMatrix u(d, d);
  for (int j = 0; j < d; ++j) {
    ComplexVector v = g.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const Complex proj = u.col(i).dot(v);  // conjugates the first argument
        v -= proj * u.col(i);
      }
    }
    const double nrm = v.norm();
    if (nrm < 1e-12) {
      // Degenerate draw (probability zero); replace the column and retry.
      for (int i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
      --j;
      continue;
    }
    u.col(j) = v / nrm;
  }
  return u;
}

ComplexVector random_pure_state(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("random_pure_state: need d >= 1");
  ComplexVector v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
    const double nrm = v.norm();
    if (nrm >= 1e-12) return v / nrm;
  }
}

DensityMatrix random_mixed_state(const MixedStateSpec& spec, RngStream& rng) {
  if (spec.n < 2 || spec.k < 1) {
    throw std::invalid_argument("random_mixed_state: invalid MixedStateSpec");
  }
  const ComplexVector psi = random_pure_state(spec.n * spec.k, rng);
  if (spec.k == 1) {
    return DensityMatrix::pure(psi);
  }
  const ComplexMatrix full = psi * psi.adjoint();
  ComplexMatrix rho =
      partial_trace(full, BipartiteDims(spec.n, spec.k), Subsystem::B);
  return DensityMatrix(HermitianOperator(std::move(rho)));
}

ComplexVector random_max_entangled(int d, RngStream& rng) {
  if (d < 2) throw std::invalid_argument("random_max_entangled: need d >= 2");
  const ComplexMatrix ua = random_unitary(d, rng);
  const ComplexMatrix ub = random_unitary(d, rng);
  // (U_A x U_B)|phi+> has amplitudes (U_A U_B^T)_{ij} / sqrt(d).
  const ComplexMatrix amp = ua * ub.transpose();
  ComplexVector psi(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      psi(i * d + j) = amp(i, j) * norm;
    }
  }
  return psi;
}

HermitianOperator random_hermitian(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("random_hermitian: need d >= 1");
  RealVector diag(d);
  double tr = 0.0;
  do {
    tr = 0.0;
    for (int i = 0; i < d; ++i) {
      diag(i) = rng.uniform(-1.0, 1.0);
      tr += diag(i);
    }
  } while (std::abs(tr) < 0.05 * d);
  const ComplexMatrix u = random_unitary(d, rng);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    h += (diag(k) / tr) * (u.col(k) * u.col(k).adjoint());
  }
  return HermitianOperator(std::move(h));
}

HermitianOperator random_dichotomic(int d, RngStream& rng) {
  if (d < 2) throw std::invalid_argument("random_dichotomic: need d >= 2");
  RealVector signs(d);
  bool plus = false, minus = false;
  do {
    plus = minus = false;
    for (int i = 0; i < d; ++i) {
      signs(i) = (rng.next_u64() & 1u) ? 1.0 : -1.0;
      (signs(i) > 0 ? plus : minus) = true;
    }
  } while (!plus || !minus);
  const ComplexMatrix u = random_unitary(d, rng);
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    m += signs(k) * (u.col(k) * u.col(k).adjoint());
  }
  return HermitianOperator(std::move(m));
}

}  // namespace entwit
