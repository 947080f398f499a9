#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "hwave/blowup_certificate.hpp"

using namespace hwave;

namespace {

GridSpec box_grid(double Lx, double Ly, double Lt, int Nx, int Ny, int Nt) {
  GridSpec g;
  g.n = 1;
  g.half_widths = {Lx, Ly, Lt};
  g.points = {Nx, Ny, Nt};
  g.validate();
  return g;
}

Field constant_field(const GridSpec& g, double c) {
  Field f(g);
  for (double& x : f.values) x = c;
  return f;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("transition function: partition of unity, plateaus, monotonicity") {
  BumpProfile prof(1.5);
  CHECK(prof.transition(0.0) == 1.0);
  CHECK(prof.transition(-2.0) == 1.0);
  CHECK(prof.transition(1.0) == 0.0);
  CHECK(prof.transition(3.0) == 0.0);
  CHECK(prof.transition(0.5) == 0.5);  // f(1-s) = f(s) at the midpoint

  double prev = 1.0;
  for (int k = 0; k <= 40; ++k) {
    const double s = k / 40.0;
    const double g = prof.transition(s);
    CHECK(g + prof.transition(1.0 - s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g <= prev + 1e-15);
    prev = g;
  }
  // smooth junctions: all derivatives vanish where the branches meet
  CHECK(prof.transition_d1(0.0) == 0.0);
  CHECK(prof.transition_d1(1.0) == 0.0);
  CHECK(prof.transition_d2(0.0) == 0.0);
}

TEST_CASE("alpha and beta: plateau, support, midpoint pins") {
  BumpProfile prof(1.5);
  for (double r : {0.0, 0.3, -0.5, 0.5}) CHECK(prof.alpha(r) == 1.0);
  for (double r : {1.0, -1.0, 1.5}) CHECK(prof.alpha(r) == 0.0);
  CHECK(prof.alpha(0.75) == 0.5);
  CHECK(prof.alpha(-0.75) == 0.5);
  CHECK(prof.alpha(0.6) > prof.alpha(0.9));

  for (double s : {0.0, 0.25, -0.25}) CHECK(prof.beta(s) == 1.0);
  for (double s : {1.0, -1.0, 2.0}) CHECK(prof.beta(s) == 0.0);
  CHECK(prof.beta(0.625) == 0.5);
  CHECK(prof.beta(-0.625) == 0.5);

  CHECK(prof.alpha_d1(0.3) == 0.0);   // plateau
  CHECK(prof.alpha_d1(1.2) == 0.0);   // outside support
  CHECK(prof.alpha_d1(0.75) < 0.0);
  CHECK(prof.beta_d1(0.625) < 0.0);
}

TEST_CASE("profile derivatives agree with finite differences") {
  BumpProfile prof(1.5);
  const double h = 1e-5;
  for (double r : {0.55, 0.6, 0.75, 0.9, 0.95}) {
    const double fd1 = (prof.alpha(r + h) - prof.alpha(r - h)) / (2.0 * h);
    CHECK(prof.alpha_d1(r) == doctest::Approx(fd1).epsilon(1e-5));
    const double fd2 = (prof.alpha_d1(r + h) - prof.alpha_d1(r - h)) / (2.0 * h);
    CHECK(prof.alpha_d2(r) == doctest::Approx(fd2).epsilon(1e-5));
  }
  for (double s : {0.3, 0.5, 0.625, 0.8, 0.9}) {
    const double fd1 = (prof.beta(s + h) - prof.beta(s - h)) / (2.0 * h);
    CHECK(prof.beta_d1(s) == doctest::Approx(fd1).epsilon(1e-5));
    const double fd2 = (prof.beta_d1(s + h) - prof.beta_d1(s - h)) / (2.0 * h);
    CHECK(prof.beta_d2(s) == doctest::Approx(fd2).epsilon(1e-5));
  }
}

TEST_CASE("profile constructor: guards and derivative-domination audits") {
  CHECK_THROWS_AS(BumpProfile(1.0), InvalidParameter);
  CHECK_THROWS_AS(BumpProfile(0.0), InvalidParameter);
  BumpProfile prof(1.2);
  CHECK(prof.sup_alpha_d1 > 0.0);
  CHECK(prof.sup_alpha_d2 > 0.0);
  CHECK(prof.sup_beta_d1 > 0.0);
  CHECK(prof.sup_beta_d2 > 0.0);
  CHECK(std::isfinite(prof.sup_alpha_d2));
}

TEST_CASE("phi_R: separable product, plateau, support") {
  BumpProfile prof(1.5);
  GroupPoint inside{{0.9}, {-0.7}, 0.8};
  CHECK(phi_R(0.5, inside, 2.0, prof) == 1.0);  // everything on the plateau

  GroupPoint edge{{1.5}, {0.0}, 0.0};
  const double expect = prof.beta(0.0) * prof.alpha(0.75) * prof.alpha(0.0) * prof.beta(0.0);
  CHECK(phi_R(0.0, edge, 2.0, prof) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(phi_R(0.0, edge, 2.0, prof) == 0.5);

  GroupPoint outside{{2.0}, {0.0}, 0.0};
  CHECK(phi_R(0.0, outside, 2.0, prof) == 0.0);
  CHECK(phi_R(4.0, inside, 2.0, prof) == 0.0);   // t = R^2 kills beta(t/R^2)
  CHECK(phi_R(0.0, GroupPoint{{0.0}, {0.0}, 4.0}, 2.0, prof) == 0.0);

  CHECK_THROWS_AS(phi_R(0.0, inside, 1.0, prof), InvalidParameter);
}

TEST_CASE("certificate exponent Q - (Q+2)/p") {
  HeisenbergParams params = derived_exponents(1);
  CHECK(certificate_exponent(1.5, params) == 0.0);   // Fujita exponent: exactly zero
  CHECK(certificate_exponent(1.2, params) == -1.0);
  CHECK(certificate_exponent(2.0, params) == 1.0);
  CHECK(certificate_exponent(1.4, params) < 0.0);
  CHECK(certificate_exponent(1.6, params) > 0.0);
  CHECK_THROWS_AS(certificate_exponent(1.0, params), InvalidParameter);
}

TEST_CASE("meas(D_R) = 2^{Q-1} R^Q") {
  HeisenbergParams p1 = derived_exponents(1);
  CHECK(meas_D_R(2.0, p1) == 128.0);
  CHECK(meas_D_R(1.0, p1) == 8.0);
  CHECK(meas_D_R(4.0, p1) / meas_D_R(2.0, p1) == 16.0);
  HeisenbergParams p2 = derived_exponents(2);
  CHECK(meas_D_R(1.0, p2) == 32.0);
  CHECK_THROWS_AS(meas_D_R(0.0, p1), InvalidParameter);
}

TEST_CASE("derivative-domination constants are R-independent") {
  BumpProfile prof(1.5);
  DerivativeBounds b2 = phi_R_derivative_bounds(2.0, prof, 1.5);
  DerivativeBounds b8 = phi_R_derivative_bounds(8.0, prof, 1.5);
  CHECK(b2.c_t == b8.c_t);
  CHECK(b2.c_tt == b8.c_tt);
  CHECK(b2.c_lap == b8.c_lap);
  CHECK(b2.c_t > 0.0);
  CHECK(b2.c_tt > 0.0);
  CHECK(b2.c_lap > 0.0);
  CHECK(std::isfinite(b2.c_lap));
  CHECK_THROWS_AS(phi_R_derivative_bounds(1.0, prof, 1.5), InvalidParameter);
}

TEST_CASE("streaming quadrature reproduces the separable u = 1 integrals") {
  // On h = 1/2 grids every 1-D profile sum pairs transition nodes s and 1-s,
  // so the rectangle sums hit the exact integrals:
  //   int alpha(x/R) dx = 3R/2, int beta(tau/R^2) dtau = 5R^2/4,
  //   int_0^{R^2} beta(t/R^2) dt = 5R^2/8, int_{R^2/4}^{R^2} = 3R^2/8.
  // For u = 1 and p arbitrary the functionals factor into those products.
  const double p = 1.5;
  HeisenbergParams params = derived_exponents(1);
  BumpProfile prof(p);
  GridSpec g = box_grid(8.0, 8.0, 32.0, 33, 33, 129);
  Field one = constant_field(g, 1.0);

  CertificateAccumulator acc(g, {2.0, 4.0}, p, prof);
  const double dt = 1.0 / 16.0;
  for (int k = 0; k <= 256; ++k) acc.add_state(k * dt, one);
  CertificateReport rep = acc.finalize(one, one, params);

  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.p == p);
  CHECK(rep.exponent == 0.0);

  const CertificateRow& r2 = rep.rows[0];
  CHECK(r2.R == 2.0);
  CHECK(r2.I_R == doctest::Approx(112.5).epsilon(1e-12));       // 2.5 * 3 * 3 * 5
  CHECK(r2.J_R == doctest::Approx(90.0).epsilon(1e-12));        // 2 * 3 * 3 * 5
  CHECK(r2.I_hat == doctest::Approx(67.5).epsilon(1e-12));      // 1.5 * 45
  CHECK(r2.I_tilde == doctest::Approx(73.4375).epsilon(1e-12)); // 2.5 * (45 - 15.625)
  CHECK(r2.ratio ==
        doctest::Approx((112.5 + 90.0) / std::pow(112.5, 1.0 / p)).epsilon(1e-12));

  const CertificateRow& r4 = rep.rows[1];
  CHECK(r4.R == 4.0);
  CHECK(r4.I_R == doctest::Approx(7200.0).epsilon(1e-12));      // 10 * 6 * 6 * 20
  CHECK(r4.J_R == doctest::Approx(1440.0).epsilon(1e-12));      // 2 * 6 * 6 * 20
  CHECK(r4.I_hat == doctest::Approx(4320.0).epsilon(1e-12));    // 6 * 720
  CHECK(r4.I_tilde == doctest::Approx(5478.75).epsilon(1e-12)); // 10 * (720 - 172.125)
  CHECK(r4.ratio ==
        doctest::Approx((7200.0 + 1440.0) / std::pow(7200.0, 1.0 / p)).epsilon(1e-12));

  // supercritical-direction growth of the certificate ratio in R
  CHECK(r4.ratio > r2.ratio);
}

TEST_CASE("J_R is identical across R when the data sit on every plateau") {
  const double p = 1.5;
  HeisenbergParams params = derived_exponents(1);
  BumpProfile prof(p);
  GridSpec g = box_grid(8.0, 8.0, 64.0, 33, 33, 257);
  Field u0 = sample(g, [&](double x, double y, double tau) {
    return prof.alpha(x / 0.9) * prof.alpha(y / 0.9) * prof.beta(tau / 0.95);
  });
  Field u1(g);
  for (std::size_t i = 0; i < u1.values.size(); ++i) u1.values[i] = 0.5 * u0.values[i];

  CertificateAccumulator acc(g, {2.0, 4.0, 8.0}, p, prof);
  acc.add_state(0.0, u0);
  acc.add_state(1.0 / 16.0, u0);
  CertificateReport rep = acc.finalize(u0, u1, params);

  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].J_R > 0.0);
  // phi_R(0,.) == 1 literally on each plateau, and the data vanish off it:
  // the three sums run over identical terms and agree bit for bit.
  CHECK(bit_equal(rep.rows[0].J_R, rep.rows[1].J_R));
  CHECK(bit_equal(rep.rows[1].J_R, rep.rows[2].J_R));
}

TEST_CASE("snapshot sweep wrapper matches a hand-driven accumulator") {
  const double p = 1.3;
  HeisenbergParams params = derived_exponents(1);
  BumpProfile prof(p);
  GridSpec g = box_grid(4.0, 4.0, 8.0, 17, 17, 33);
  Field u0 = random_field(g, 21);
  zero_boundary(u0);
  Field u1 = random_field(g, 22);
  zero_boundary(u1);

  const double dt = 1.0 / 16.0;
  const int n_states = 65;
  CertificateAccumulator acc(g, {2.0}, p, prof);
  std::vector<SnapshotData> snaps;
  for (int k = 0; k < n_states; ++k) {
    Field state = random_field(g, 100 + static_cast<std::uint64_t>(k));
    acc.add_state(k * dt, state);
    SnapshotData s;
    s.n = 1;
    s.half_widths = g.half_widths;
    s.points = g.points;
    s.time = k * dt;
    s.values = state.values;
    snaps.push_back(std::move(s));
  }
  CertificateReport direct = acc.finalize(u0, u1, params);

  // shuffle: the wrapper must sort by time
  std::swap(snaps[0], snaps[40]);
  std::swap(snaps[7], snaps[33]);
  CertificateReport wrapped =
      certificate_sweep_snapshots(snaps, u0, u1, p, {2.0}, prof, params);

  REQUIRE(wrapped.rows.size() == 1);
  CHECK(bit_equal(wrapped.rows[0].I_R, direct.rows[0].I_R));
  CHECK(bit_equal(wrapped.rows[0].I_tilde, direct.rows[0].I_tilde));
  CHECK(bit_equal(wrapped.rows[0].I_hat, direct.rows[0].I_hat));
  CHECK(bit_equal(wrapped.rows[0].J_R, direct.rows[0].J_R));
  CHECK(bit_equal(wrapped.rows[0].ratio, direct.rows[0].ratio));
}

TEST_CASE("accumulator guards") {
  const double p = 1.5;
  BumpProfile prof(p);
  GridSpec g = box_grid(4.0, 4.0, 8.0, 17, 17, 33);

  CHECK_THROWS_AS(CertificateAccumulator(g, {}, p, prof), InvalidParameter);
  CHECK_THROWS_AS(CertificateAccumulator(g, {1.0}, p, prof), InvalidParameter);
  CHECK_THROWS_AS(CertificateAccumulator(g, {5.0}, p, prof), InvalidParameter);   // R > L_x
  CHECK_THROWS_AS(CertificateAccumulator(g, {3.0}, p, prof), InvalidParameter);   // R^2 > L_tau
  CHECK_THROWS_AS(CertificateAccumulator(g, {2.0}, 1.0, prof), InvalidParameter);

  GridSpec g2 = g;
  g2.n = 2;
  CHECK_THROWS_AS(CertificateAccumulator(g2, {2.0}, p, prof), UnsupportedGrid);

  Field u(g);
  CertificateAccumulator sparse(g, {2.0}, p, prof);
  sparse.add_state(0.0, u);
  CHECK_THROWS_AS(sparse.add_state(0.5, u), InvalidParameter);  // stride > R^2/64

  CertificateAccumulator uneven(g, {2.0}, p, prof);
  uneven.add_state(0.0, u);
  uneven.add_state(1.0 / 32.0, u);
  CHECK_THROWS_AS(uneven.add_state(3.0 / 32.0, u), InvalidParameter);

  CertificateAccumulator fresh(g, {2.0}, p, prof);
  fresh.add_state(0.0, u);
  HeisenbergParams params = derived_exponents(1);
  CHECK_THROWS_AS(fresh.finalize(u, u, params), InvalidParameter);

  GridSpec other = box_grid(4.0, 4.0, 8.0, 17, 17, 65);
  CertificateAccumulator acc(g, {2.0}, p, prof);
  CHECK_THROWS_AS(acc.add_state(0.0, Field(other)), InvalidParameter);
}

TEST_CASE("zero data produce the zero report") {
  const double p = 1.5;
  HeisenbergParams params = derived_exponents(1);
  BumpProfile prof(p);
  GridSpec g = box_grid(4.0, 4.0, 8.0, 17, 17, 33);
  Field zero(g);
  CertificateAccumulator acc(g, {2.0}, p, prof);
  for (int k = 0; k <= 64; ++k) acc.add_state(k / 16.0, zero);
  CertificateReport rep = acc.finalize(zero, zero, params);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].I_R == 0.0);
  CHECK(rep.rows[0].J_R == 0.0);
  CHECK(rep.rows[0].I_hat == 0.0);
  CHECK(rep.rows[0].I_tilde == 0.0);
  CHECK(rep.rows[0].ratio == 0.0);
}
