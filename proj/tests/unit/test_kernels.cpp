#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "wolbachia/kernels.hpp"

using namespace wolbachia::kernels;

namespace {

struct Inputs {
  std::vector<double> a, b, c;
};

Inputs random_inputs(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 3.0);
  Inputs in{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    in.a[i] = pos(rng);
    in.b[i] = pos(rng);
    in.c[i] = pos(rng);
  }
  // exact zeros and denormal-scale totals exercise the CI-factor branch
  if (n > 3) {
    in.a[0] = 0.0;
    in.b[0] = 0.0;
    in.b[1] = 0.0;
    in.a[2] = 1e-300;
    in.b[2] = 1e-300;
  }
  return in;
}

bool bit_equal(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar u reaction matches the formula") {
  const std::vector<double> w{0.5, 1.0}, v{0.25, 0.0}, b1{2.0, 1.0};
  std::vector<double> out(2);
  scalar::u_reaction(w, v, b1, 1.0, 0.1, out);
  CHECK(out[0] == doctest::Approx(0.5 + 0.1 * 0.5 * (2.0 - 0.75)));
  CHECK(out[1] == doctest::Approx(1.0));
}

TEST_CASE("scalar v reaction uses ratio 1 when the total vanishes") {
  const std::vector<double> v{0.0, 1.0, 0.5}, u{0.0, 0.0, 0.5}, b2{1.0, 1.0, 1.0};
  std::vector<double> out(3);
  scalar::v_reaction(v, u, b2, 1.0, 1e-12, 0.1, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(1.0));
  CHECK(out[2] == doctest::Approx(0.5 + 0.1 * 0.5 * (0.5 - 1.0)));
}

TEST_CASE("dispatch reports a usable table") {
  CHECK(available(Isa::scalar));
  CHECK(active().u_reaction != nullptr);
  CHECK(table(Isa::scalar).isa == Isa::scalar);
}

TEST_CASE("avx2 kernels are bit-identical to scalar") {
  if (!available(Isa::avx2)) {
    MESSAGE("avx2 unavailable on this CPU; skipping equivalence");
    return;
  }
  const auto& simd = table(Isa::avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 257u, 1025u}) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const Inputs in = random_inputs(n, seed * 977u + n);
      std::vector<double> ref(n), got(n);
      scalar::u_reaction(in.a, in.b, in.c, 1.3, 0.01, ref);
      simd.u_reaction(in.a, in.b, in.c, 1.3, 0.01, got);
      CHECK(bit_equal(ref, got));
      scalar::v_reaction(in.a, in.b, in.c, 0.7, 1e-12, 0.01, ref);
      simd.v_reaction(in.a, in.b, in.c, 0.7, 1e-12, 0.01, got);
      CHECK(bit_equal(ref, got));
    }
  }
}
