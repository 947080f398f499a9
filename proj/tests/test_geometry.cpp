#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hwave/geometry.hpp"

using namespace hwave;

namespace {

/// splitmix64; the tests need a tiny deterministic generator, nothing more.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int int_in(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

GroupPoint random_point(Rng& rng, int n, double scale) {
  GroupPoint p;
  p.x.resize(n);
  p.y.resize(n);
  for (int j = 0; j < n; ++j) {
    p.x[j] = rng.uniform(-scale, scale);
    p.y[j] = rng.uniform(-scale, scale);
  }
  p.tau = rng.uniform(-scale, scale);
  return p;
}

Polynomial random_polynomial(Rng& rng, int n, int max_degree, int terms) {
  Polynomial poly = Polynomial::constant(n, 0.0);
  const int vars = 2 * n + 1;
  for (int t = 0; t < terms; ++t) {
    Polynomial::Monomial powers(vars, 0u);
    int budget = rng.int_in(0, max_degree);
    for (int d = 0; d < budget; ++d) {
      int v = rng.int_in(0, vars - 1);
      powers[v] += 1u;
    }
    double coeff = static_cast<double>(rng.int_in(-3, 3));
    if (coeff == 0.0) coeff = 1.0;
    poly = poly + Polynomial::monomial(n, powers, coeff);
  }
  return poly;
}

}  // namespace

TEST_CASE("derived exponents for n = 1 and n = 2") {
  HeisenbergParams p1 = derived_exponents(1);
  CHECK(p1.n == 1);
  CHECK(p1.Q == 4);
  CHECK(p1.p_fujita.num == 3);
  CHECK(p1.p_fujita.den == 2);
  CHECK(p1.p_gn.value() == 2.0);

  HeisenbergParams p2 = derived_exponents(2);
  CHECK(p2.Q == 6);
  CHECK(p2.p_fujita.value() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(p2.p_gn.value() == doctest::Approx(1.5).epsilon(1e-15));

  CHECK_THROWS_AS(derived_exponents(0), InvalidParameter);
  CHECK_THROWS_AS(derived_exponents(-2), InvalidParameter);
}

TEST_CASE("group law: pinned product, identity, inverse") {
  GroupPoint a{{1.0}, {0.0}, 0.0};
  GroupPoint b{{0.0}, {1.0}, 0.0};
  GroupPoint ab = group_multiply(a, b);
  CHECK(ab.x[0] == 1.0);
  CHECK(ab.y[0] == 1.0);
  CHECK(ab.tau == 0.5);
  // Reversed order flips the twist sign.
  GroupPoint ba = group_multiply(b, a);
  CHECK(ba.tau == -0.5);

  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    GroupPoint g = random_point(rng, 1, 3.0);
    GroupPoint e = group_multiply(g, group_inverse(g));
    CHECK(e.x[0] == 0.0);
    CHECK(e.y[0] == 0.0);
    CHECK(e.tau == 0.0);
  }

  GroupPoint bad{{1.0, 2.0}, {0.0, 0.0}, 0.0};
  CHECK_THROWS_AS(group_multiply(a, bad), InvalidParameter);
}

TEST_CASE("group law is associative") {
  for (int n : {1, 2, 3}) {
    Rng rng(7u + static_cast<std::uint64_t>(n));
    for (int i = 0; i < 40; ++i) {
      GroupPoint a = random_point(rng, n, 2.0);
      GroupPoint b = random_point(rng, n, 2.0);
      GroupPoint c = random_point(rng, n, 2.0);
      GroupPoint lhs = group_multiply(group_multiply(a, b), c);
      GroupPoint rhs = group_multiply(a, group_multiply(b, c));
      for (int j = 0; j < n; ++j) {
        CHECK(lhs.x[j] == doctest::Approx(rhs.x[j]).epsilon(1e-12));
        CHECK(lhs.y[j] == doctest::Approx(rhs.y[j]).epsilon(1e-12));
      }
      CHECK(lhs.tau == doctest::Approx(rhs.tau).epsilon(1e-12));
    }
  }
}

TEST_CASE("theta endpoints are exact, interior value is right, range is enforced") {
  HeisenbergParams params = derived_exponents(1);
  CHECK(theta(2.0, params) == 0.0);
  // q = 2Q/(Q-2) = 4 for n = 1; the endpoint must give exactly 1.
  CHECK(theta(4.0, params) == 1.0);
  CHECK(theta(3.0, params) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(theta(1.9, params), InvalidParameter);
  CHECK_THROWS_AS(theta(4.1, params), InvalidParameter);
}

TEST_CASE("psi: pinned values and t >= 0 guard") {
  GroupPoint eta{{2.0}, {0.0}, 1.0};
  CHECK(psi_value(0.0, eta) == 1.0);   // (4 + 0 + 4) / 8
  CHECK(psi_value(1.0, eta) == 0.5);
  GroupPoint origin{{0.0}, {0.0}, 0.0};
  CHECK(psi_value(0.0, origin) == 0.0);
  CHECK_THROWS_AS(psi_value(-0.1, eta), InvalidParameter);
  CHECK_THROWS_AS(psi_derivatives(-1.0, eta), InvalidParameter);
}

TEST_CASE("psi derivatives: pinned point and eikonal identity") {
  GroupPoint eta{{2.0}, {0.0}, 1.0};
  PsiDerivatives d = psi_derivatives(0.0, eta);
  CHECK(d.psi_t == -1.0);
  REQUIRE(d.grad_h.size() == 2);
  CHECK(d.grad_h[0] == 0.5);  // X psi = (x - sign(tau) y)/4
  CHECK(d.grad_h[1] == 0.5);  // Y psi = (y + sign(tau) x)/4
  CHECK(d.grad_h_sq == 0.5);
  // |grad_h psi|^2 + psi_t = -|tau| / (2(1+t)^2)
  CHECK(d.grad_h_sq + d.psi_t == -0.5);
}

TEST_CASE("psi eikonal identity holds off the tau = 0 plane") {
  for (int n : {1, 2}) {
    Rng rng(99u + static_cast<std::uint64_t>(n));
    for (int i = 0; i < 60; ++i) {
      GroupPoint eta = random_point(rng, n, 4.0);
      if (std::abs(eta.tau) < 1e-6) eta.tau = 1.0;
      double t = rng.uniform(0.0, 3.0);
      PsiDerivatives d = psi_derivatives(t, eta);
      double expected = -std::abs(eta.tau) / (2.0 * (1.0 + t) * (1.0 + t));
      CHECK(d.grad_h_sq + d.psi_t == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("psi derivatives on the tau = 0 plane keep the dissipativity inequality") {
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    GroupPoint eta = random_point(rng, 1, 4.0);
    eta.tau = 0.0;  // sign(0) = 0 convention: the cross terms drop out
    double t = rng.uniform(0.0, 2.0);
    PsiDerivatives d = psi_derivatives(t, eta);
    CHECK(d.grad_h_sq + d.psi_t <= 1e-15);
  }
}

TEST_CASE("symbolic sub-Laplacian: pinned low-degree images") {
  HeisenbergParams params = derived_exponents(1);
  // x^2 -> 2
  Polynomial x = Polynomial::variable(1, 0);
  Polynomial y = Polynomial::variable(1, 1);
  Polynomial tau = Polynomial::variable(1, 2);

  Polynomial lx2 = sublaplacian_symbolic(x * x, params);
  CHECK(lx2.max_coeff_distance(Polynomial::constant(1, 2.0)) == 0.0);

  // tau is harmonic for the sub-Laplacian
  CHECK(sublaplacian_symbolic(tau, params).is_zero());

  // x*tau -> -y  (only the -y d^2_{x tau} term survives)
  Polynomial lxtau = sublaplacian_symbolic(x * tau, params);
  CHECK(lxtau.max_coeff_distance(y * (-1.0)) == 0.0);

  // x^2 y -> 2y
  Polynomial lx2y = sublaplacian_symbolic(x * x * y, params);
  CHECK(lx2y.max_coeff_distance(y * 2.0) == 0.0);

  // degree guard: the oracle refuses degree > 6
  Polynomial x7 = x * x * x * x * x * x * x;
  CHECK_THROWS_AS(sublaplacian_symbolic(x7, params), InvalidParameter);
}

TEST_CASE("expanded and composed sub-Laplacian assemblies agree") {
  for (int n : {1, 2}) {
    HeisenbergParams params = derived_exponents(n);
    Rng rng(501u + static_cast<std::uint64_t>(n));
    for (int i = 0; i < 30; ++i) {
      Polynomial poly = random_polynomial(rng, n, 4, 6);
      Polynomial a = sublaplacian_symbolic(poly, params);
      Polynomial b = sublaplacian_symbolic_composed(poly, params);
      // Integer coefficients and quarter-weights are exact in binary, so the
      // two assemblies must agree to rounding noise at worst.
      CHECK(a.max_coeff_distance(b) <= 1e-12);
    }
  }
}

TEST_CASE("polynomial arithmetic sanity") {
  Polynomial x = Polynomial::variable(1, 0);
  Polynomial tau = Polynomial::variable(1, 2);
  Polynomial p = x * x * 3.0 + tau * (-2.0);
  GroupPoint at{{2.0}, {0.0}, 5.0};
  CHECK(p.evaluate(at) == 2.0);  // 3*4 - 2*5
  CHECK(p.total_degree() == 2);
  Polynomial dpdx = p.derivative(0);
  CHECK(dpdx.evaluate(at) == 12.0);
  Polynomial dpdtau = p.derivative(2);
  CHECK(dpdtau.evaluate(at) == -2.0);
  CHECK((p - p).is_zero());
}
