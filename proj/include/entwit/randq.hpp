#pragma once

#include "entwit/qmat.hpp"

#include <cstdint>
#include <random>

namespace entwit {

// Seed-driven stream of random values. The engine is std::mt19937_64, which the
// standard pins bit-exactly, and all derived quantities (uniforms, normals,
// binomials) are generated by our own code so a seed fixes every output.
// Substreams are derived from the root seed with a splitmix64-style mix and are
// independent of how much of the parent stream has been consumed.
class RngStream {
 public:
  static constexpr const char* kGeneratorName = "mt19937_64/boxmuller-btrd/v1";

  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  RngStream substream(std::uint64_t key) const;

  std::uint64_t next_u64();
  double uniform01();  // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);
  double normal();     // standard normal, Box-Muller
  Complex complex_normal();  // independent standard normal real/imag parts

  // Exact Binomial(n, p) sample; inversion for small n*p, BTRD rejection otherwise.
  std::int64_t binomial(std::int64_t n, double p);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

namespace detail {
// Exposed for distribution cross-checks in tests.
std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& rng);
std::int64_t binomial_btrd(std::int64_t n, double p, RngStream& rng);
}  // namespace detail

struct MixedStateSpec {
  int n = 0;  // system dimension
  int k = 0;  // environment dimension

  MixedStateSpec() = default;
  MixedStateSpec(int n_, int k_) : n(n_), k(k_) {
    if (n < 2 || k < 1) {
      throw std::invalid_argument("MixedStateSpec: need n >= 2 and k >= 1");
    }
  }
};

// Haar-random unitary: complex Ginibre matrix orthogonalized by Gram-Schmidt
// with the R-diagonal kept real positive.
ComplexMatrix random_unitary(int d, RngStream& rng);

// Haar-random unit vector.
ComplexVector random_pure_state(int d, RngStream& rng);

// Pure state on n*k, environment of dimension k traced out (induced measure).
DensityMatrix random_mixed_state(const MixedStateSpec& spec, RngStream& rng);

// (U_A x U_B) |phi+> on a d x d system.
ComplexVector random_max_entangled(int d, RngStream& rng);

// U diag(D) U^dag / tr(U diag(D) U^dag) with D uniform on [-1,1]^d; draws with
// |tr D| < 0.05 d are rejected and resampled. The diagonal is drawn before the
// unitary.
HermitianOperator random_hermitian(int d, RngStream& rng);

// U diag(signs) U^dag with signs in {-1,+1}, at least one of each; M^2 = I.
HermitianOperator random_dichotomic(int d, RngStream& rng);

}  // namespace entwit
