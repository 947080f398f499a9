// Acceptance suite: every case prints exactly one verdict line
//   [criterion N] PASS|FAIL|INVALID — details
// and mirrors the verdict in doctest assertions, so both the console log and
// the ctest exit status tell the same story.  INVALID is reserved for the
// decay-fit case, whose own definition downgrades a violated boundary gate
// from failure to invalidity.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "hwave/blowup_certificate.hpp"
#include "hwave/diagnostics.hpp"
#include "hwave/geometry.hpp"
#include "hwave/grid_field.hpp"
#include "hwave/solver.hpp"

namespace fs = std::filesystem;
using namespace hwave;
using clock_type = std::chrono::steady_clock;

namespace {

void verdict(int criterion, const char* result, const char* fmt, ...) {
  char detail[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(detail, sizeof detail, fmt, args);
  va_end(args);
  std::printf("[criterion %d] %s — %s\n", criterion, result, detail);
  std::fflush(stdout);
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

GridSpec box_grid(double lx, double ly, double lt, int nx, int ny, int nt) {
  GridSpec g;
  g.n = 1;
  g.half_widths = {lx, ly, lt};
  g.points = {nx, ny, nt};
  return g;
}

Field plateau_bump(const GridSpec& g, double amplitude, double width) {
  BumpProfile prof(1.5);  // the audit exponent does not change the shape
  return sample(g, [&](double x, double y, double tau) {
    return amplitude * prof.alpha(x / width) * prof.alpha(y / width) *
           prof.beta(tau / (width * width));
  });
}

/// Shared linear decay run on the pinned box; criteria 4 and 5 read it.
const RunOutcome& decay_run() {
  static const RunOutcome outcome = [] {
    GridSpec g = box_grid(8.0, 8.0, 32.0, 65, 65, 257);
    Field u0 = plateau_bump(g, 1.0, 2.0);
    SolverConfig cfg;
    cfg.t_end = 40.0;
    cfg.record_every = 10;
    return run(u0, u0, cfg);
  }();
  return outcome;
}

// -- tiny CLI runner for the determinism criterion ---------------------------

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& scratch) {
  const std::string cmd = std::string("'") + HWAVE_CLI_PATH + "' " + args + " >'" +
                          (scratch / "out.txt").string() + "' 2>'" +
                          (scratch / "err.txt").string() + "'";
  const int st = std::system(cmd.c_str());
  return (st != -1 && WIFEXITED(st)) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("criterion 1: gaussian weight quadrature matches the closed form") {
  const HeisenbergParams par = derived_exponents(1);
  const GridSpec g = box_grid(8.0, 8.0, 32.0, 65, 65, 257);  // h = 0.25
  const double pi = std::numbers::pi;

  const auto t0 = clock_type::now();
  const struct {
    double sigma, t, target;
  } cases[3] = {{1.0, 0.0, 8.0 * pi}, {2.0, 0.0, 2.0 * pi}, {1.0, 1.0, 32.0 * pi}};
  double worst_rel = 0.0;
  for (const auto& c : cases) {
    const GaussianQuadrature q = gaussian_weight_quadrature(g, c.sigma, c.t);
    CHECK(gaussian_weight_integral_exact(c.sigma, c.t, par) ==
          doctest::Approx(c.target).epsilon(1e-12));
    worst_rel = std::max(worst_rel, std::abs(q.value - c.target) / c.target);
  }
  const double elapsed = seconds_since(t0);

  const bool ok = worst_rel < 0.01 && elapsed < 5.0;
  verdict(1, ok ? "PASS" : "FAIL",
          "quadrature vs 8pi/2pi/32pi on box (8,8,32), h=0.25: worst rel err %.2e "
          "(tol 1e-2), %.2fs (cap 5s)",
          worst_rel, elapsed);
  CHECK(worst_rel < 0.01);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 2: stencil is exact on the pinned monomials and second order") {
  const HeisenbergParams par = derived_exponents(1);
  const auto t0 = clock_type::now();

  const Polynomial X = Polynomial::variable(1, 0);
  const Polynomial Y = Polynomial::variable(1, 1);
  const Polynomial T = Polynomial::variable(1, 2);

  // Interior max error, restricted to nodes shared by every h in the sweep so
  // the sup is taken at identical physical points (otherwise the max-location
  // drift pollutes the fitted order).
  const auto interior_err = [&](const Polynomial& poly, double h, double* scale) {
    GridSpec g = box_grid(4.0, 4.0, 8.0, int(8.0 / h) + 1, int(8.0 / h) + 1,
                          int(16.0 / h) + 1);
    const Polynomial sym = sublaplacian_symbolic(poly, par);
    const Field u = sample(g, [&](const GroupPoint& eta) { return poly.evaluate(eta); });
    const Field lap = apply_sublaplacian(u);
    const Field ref = sample(g, [&](const GroupPoint& eta) { return sym.evaluate(eta); });
    double err = 0.0, sc = 0.0;
    for (int ix = 0; ix < g.points[0]; ++ix)
      for (int iy = 0; iy < g.points[1]; ++iy)
        for (int it = 0; it < g.points[2]; ++it) {
          if (std::abs(g.coord(0, ix)) > 2.4 + 1e-9 || std::abs(g.coord(1, iy)) > 2.4 + 1e-9 ||
              std::abs(g.coord(2, it)) > 6.4 + 1e-9)
            continue;
          const std::size_t k = g.index(ix, iy, it);
          err = std::max(err, std::abs(lap.values[k] - ref.values[k]));
          sc = std::max(sc, std::abs(ref.values[k]));
        }
    if (scale) *scale = sc;
    return err;
  };

  const double hs[3] = {0.4, 0.2, 0.1};

  // Degree <= 3 in every stencil variable: centered differences reproduce
  // these exactly, which is stronger than any convergence order.
  bool exact_ok = true;
  const Polynomial exact_family[4] = {X * X, T * T, X * T, X * X * Y};
  for (const Polynomial& m : exact_family)
    for (double h : hs) {
      double scale = 0.0;
      const double e = interior_err(m, h, &scale);
      exact_ok = exact_ok && e <= 1e-9 * std::max(1.0, scale);
    }

  // Quartics carry genuine O(h^2) truncation error; fit the order on those.
  // A member whose error sits at rounding level at every h (x^2 tau^2 does:
  // each of its stencil pieces is still degree <= 3 per variable) satisfies
  // the bound vacuously and is excluded from the fit.
  bool order_ok = true;
  double min_order = 1e300;
  const Polynomial quartics[5] = {X * X * X * X, T * T * T * T, X * X * X * T, X * T * T * T,
                                  X * X * T * T};
  for (const Polynomial& m : quartics) {
    double errs[3], scale = 0.0;
    for (int i = 0; i < 3; ++i) errs[i] = interior_err(m, hs[i], &scale);
    const double floor = 1e-9 * std::max(1.0, scale);
    if (errs[0] <= floor && errs[1] <= floor && errs[2] <= floor) continue;
    // least-squares slope of log err against log h over the three points
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
      const double lx = std::log(hs[i]), ly = std::log(errs[i]);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double order = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    min_order = std::min(min_order, order);
    order_ok = order_ok && order >= 1.8;
  }

  const double elapsed = seconds_since(t0);
  const bool ok = exact_ok && order_ok && elapsed < 30.0;
  verdict(2, ok ? "PASS" : "FAIL",
          "pinned monomials exact to rounding: %s; fitted order on quartics >= 1.8: "
          "min %.3f; %.1fs (cap 30s)",
          exact_ok ? "yes" : "NO", min_order, elapsed);
  CHECK(exact_ok);
  CHECK(order_ok);
  CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 3: spatially constant runs track the reduced ODE") {
  GridSpec g = box_grid(1.0, 1.0, 1.0, 5, 5, 5);
  g.boundary = Boundary::periodic;

  // Linear: u'' + u' = 0 from (u0, u1) has u(t) = u0 + u1 (1 - e^{-t}).
  const double a = 0.7, b = 0.9;
  Field u0(g), u1(g);
  std::fill(u0.values.begin(), u0.values.end(), a);
  std::fill(u1.values.begin(), u1.values.end(), b);
  SolverConfig lin;
  lin.dt = 1e-3;
  lin.t_end = 10.0;
  lin.record_every = 1000;
  double lin_err = 0.0;
  run(u0, u1, lin, [&](long, double t, const Field& u) {
    lin_err = std::max(lin_err, std::abs(u.values[0] - (a + b * (1.0 - std::exp(-t)))));
  });

  // Semilinear p = 1.3: reference is classical RK4 on u' = v, v' = |u|^p - v
  // at a step 10x finer than the solver's, integrated until |u| passes 1e3.
  const double p = 1.3, h = 1e-5, dt = 1e-4;
  std::vector<double> ref_u;          // ref_u[k] = u(k h)
  {
    double u = 1.0, v = 1.0;
    ref_u.push_back(u);
    const auto f = [p](double uu, double vv, double& du, double& dv) {
      du = vv;
      dv = std::pow(std::abs(uu), p) - vv;
    };
    while (std::abs(u) < 1e3 && ref_u.size() < 2'000'000) {
      double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
      f(u, v, k1u, k1v);
      f(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
      f(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
      f(u + h * k3u, v + h * k3v, k4u, k4v);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      ref_u.push_back(u);
    }
  }
  const long steps_per_dt = std::lround(dt / h);
  const long sim_steps = static_cast<long>((ref_u.size() - 1) / steps_per_dt);
  std::fill(u0.values.begin(), u0.values.end(), 1.0);
  std::fill(u1.values.begin(), u1.values.end(), 1.0);
  SolverConfig semi;
  semi.p = p;
  semi.dt = dt;
  semi.t_end = static_cast<double>(sim_steps) * dt;
  semi.blowup_threshold = 1e9;
  semi.record_every = 100000;
  double semi_rel = 0.0;
  run(u0, u1, semi, [&](long k, double, const Field& u) {
    const double ref = ref_u[static_cast<std::size_t>(k * steps_per_dt)];
    semi_rel = std::max(semi_rel, std::abs(u.values[0] - ref) / std::abs(ref));
  });

  const bool ok = lin_err < 1e-4 && semi_rel < 1e-3;
  verdict(3, ok ? "PASS" : "FAIL",
          "linear max err %.2e (tol 1e-4, dt=1e-3, t<=10); semilinear p=1.3 rel err "
          "%.2e (tol 1e-3, tracked to |u|=%.0f)",
          lin_err, semi_rel, std::abs(ref_u[sim_steps * steps_per_dt]));
  CHECK(lin_err < 1e-4);
  CHECK(semi_rel < 1e-3);
}

TEST_CASE("criterion 4: linear decay exponents on the pinned box") {
  const RunOutcome& out = decay_run();
  REQUIRE(out.status == RunStatus::completed);
  REQUIRE(!out.series.rows.empty());

  const double l2_0 = out.series.rows.front().l2_u;
  double bm_max = 0.0;
  for (const TimeSeriesRow& row : out.series.rows)
    bm_max = std::max(bm_max, row.boundary_mass);
  const bool gate_ok = bm_max < 1e-3 * l2_0;

  const struct {
    const char* column;
    double target;
  } lines[3] = {{"l2_u", -1.0}, {"l2_grad_u", -1.5}, {"l2_ut", -2.0}};
  bool slopes_ok = true;
  char measured[256];
  int off = 0;
  for (const auto& ln : lines) {
    const DecayFit fit = fit_decay(out.series, ln.column, {10.0, 40.0});
    slopes_ok = slopes_ok && std::abs(fit.slope - ln.target) <= 0.25 && fit.r_squared >= 0.98;
    off += std::snprintf(measured + off, sizeof measured - off, "%s %.3f (r2 %.4f) ",
                         ln.column, fit.slope, fit.r_squared);
  }

  if (!gate_ok) {
    // The criterion's own escape: a violated boundary gate marks the run
    // invalid rather than failed (the box truncated the solution).
    verdict(4, "INVALID",
            "boundary_mass max %.3e >= 1e-3 * initial l2 %.3e: box-truncated run; "
            "measured slopes: %s(targets -1/-1.5/-2, tol 0.25)",
            bm_max, l2_0, measured);
  } else {
    verdict(4, slopes_ok ? "PASS" : "FAIL",
            "boundary gate held (max %.3e vs %.3e); slopes: %s(targets -1/-1.5/-2, "
            "tol 0.25, r2 >= 0.98)",
            bm_max, 1e-3 * l2_0, measured);
    CHECK(slopes_ok);
  }
}

TEST_CASE("criterion 5: weighted energy is monotone along the linear flow") {
  const RunOutcome& out = decay_run();
  REQUIRE(out.series.rows.size() >= 2);
  const MonotonicityReport rep = weighted_energy_monotonicity(out.series, 1e-3);
  verdict(5, rep.holds ? "PASS" : "FAIL",
          "max relative increase of E_psi between recorded rows %.3e (tol 1e-3, %zu rows)",
          rep.max_relative_increase, out.series.rows.size());
  CHECK(rep.holds);
}

TEST_CASE("criterion 6: blow-up below the critical exponent, decay above it") {
  const HeisenbergParams par = derived_exponents(1);
  const double p_f = static_cast<double>(par.p_fujita.num) / par.p_fujita.den;
  const GridSpec g = box_grid(6.0, 6.0, 24.0, 49, 49, 193);
  const Field big = plateau_bump(g, 1.0, 3.0);
  const Field small = plateau_bump(g, 0.01, 3.0);

  bool blowup_ok = true, global_ok = true;
  double bracket_lo = 0.0, bracket_hi = 1e300;
  char detail[384];
  int off = 0;

  for (double p : {1.2, 1.35, 1.5}) {
    SolverConfig cfg;
    cfg.p = p;
    cfg.t_end = 50.0;
    cfg.blowup_threshold = 1e6;
    cfg.record_every = 25;
    const RunOutcome out = run(big, big, cfg);
    const bool blew = out.status == RunStatus::blew_up && *out.t_blowup < 50.0;
    blowup_ok = blowup_ok && blew;
    if (blew) bracket_lo = std::max(bracket_lo, p);
    off += std::snprintf(detail + off, sizeof detail - off, "p=%.2f %s t*=%.1f; ", p,
                         blew ? "blew up" : "NO BLOW-UP", out.t_blowup.value_or(-1.0));
  }
  for (double p : {1.7, 1.8, 1.95}) {
    SolverConfig cfg;
    cfg.p = p;
    cfg.t_end = 40.0;
    cfg.record_every = 25;
    const RunOutcome out = run(small, small, cfg);
    const bool decayed = out.status == RunStatus::completed &&
                         out.series.rows.back().l2_u < out.series.rows.front().l2_u;
    global_ok = global_ok && decayed;
    if (out.status == RunStatus::completed) bracket_hi = std::min(bracket_hi, p);
    off += std::snprintf(detail + off, sizeof detail - off, "p=%.2f %s; ", p,
                         decayed ? "decayed" : "DID NOT DECAY");
  }

  const bool bracket_ok = bracket_lo <= p_f && p_f <= bracket_hi;
  const bool ok = blowup_ok && global_ok && bracket_ok;
  verdict(6, ok ? "PASS" : "FAIL", "%sbracket [%.2f, %.2f] %s p_F = %.2f", detail, bracket_lo,
          bracket_hi, bracket_ok ? "contains" : "MISSES", p_f);
  CHECK(blowup_ok);
  CHECK(global_ok);
  CHECK(bracket_ok);
}

TEST_CASE("criterion 7: certificate functionals on the subcritical blow-up run") {
  const HeisenbergParams par = derived_exponents(1);
  const double p = 1.2;
  const BumpProfile prof(p);

  // meas(D_2R)/meas(D_R) = 2^Q exactly, by the closed-form box measure.
  const bool meas_ok = meas_D_R(4.0, par) / meas_D_R(2.0, par) == 16.0 &&
                       meas_D_R(8.0, par) / meas_D_R(4.0, par) == 16.0;

  // Separable integrand: the 4-D streaming sum must reproduce the product of
  // 1-D quadratures (u = 1, so I_R factors exactly).
  double sep_rel = 0.0;
  {
    GridSpec sg = box_grid(8.0, 8.0, 32.0, 33, 33, 129);
    Field one(sg);
    std::fill(one.values.begin(), one.values.end(), 1.0);
    const std::vector<double> Rs = {2.0, 4.0};
    CertificateAccumulator acc(sg, Rs, p, prof);
    const double dt = 0.0625;
    const long steps = std::lround(16.0 / dt);
    for (long k = 0; k <= steps; ++k) acc.add_state(k * dt, one);
    const CertificateReport rep = acc.finalize(one, one, par);
    for (std::size_t i = 0; i < Rs.size(); ++i) {
      const double R = Rs[i];
      double sx = 0.0, st = 0.0, stime = 0.0;
      for (int ix = 0; ix < sg.points[0]; ++ix) sx += prof.alpha(sg.coord(0, ix) / R);
      for (int it = 0; it < sg.points[2]; ++it) st += prof.beta(sg.coord(2, it) / (R * R));
      for (long k = 0; k <= steps; ++k) {
        const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
        stime += w * prof.beta(k * dt / (R * R));
      }
      const double product = (sx * sg.spacing(0)) * (sx * sg.spacing(1)) *
                             (st * sg.spacing(2)) * (stime * dt);
      sep_rel = std::max(sep_rel, std::abs(rep.rows[i].I_R - product) / product);
    }
  }

  // The blow-up run itself: width-1 data sits inside D_{R/2} for every R.
  GridSpec g = box_grid(8.0, 8.0, 64.0, 65, 65, 257);
  const Field u0 = plateau_bump(g, 20.0, 1.0);
  CertificateAccumulator acc(g, {2.0, 4.0, 8.0}, p, prof);
  SolverConfig cfg;
  cfg.p = p;
  cfg.t_end = 64.0;
  cfg.blowup_threshold = 1e6;
  cfg.record_every = 100;
  const RunOutcome out =
      run(u0, u0, cfg, [&](long, double t, const Field& u) { acc.add_state(t, u); });
  const CertificateReport rep = acc.finalize(u0, u0, par);

  const bool blew = out.status == RunStatus::blew_up;
  const bool j_ok = rep.rows.size() == 3 && rep.rows[0].J_R == rep.rows[1].J_R &&
                    rep.rows[1].J_R == rep.rows[2].J_R;
  const bool ratio_ok = rep.rows[0].ratio <= rep.rows[1].ratio &&
                        rep.rows[1].ratio <= rep.rows[2].ratio;

  const bool ok = meas_ok && sep_rel <= 1e-6 && blew && j_ok && ratio_ok;
  verdict(7, ok ? "PASS" : "FAIL",
          "p=1.2 run %s at t=%.1f; J_R %s across R={2,4,8} (%.6g); ratio %s "
          "(%.3g, %.3g, %.3g); meas ratio 16 %s; separable-vs-4D rel %.1e (tol 1e-6)",
          blew ? "blew up" : "DID NOT BLOW UP", out.t_blowup.value_or(-1.0),
          j_ok ? "exactly constant" : "NOT CONSTANT", rep.rows.empty() ? 0.0 : rep.rows[0].J_R,
          ratio_ok ? "nondecreasing" : "NOT MONOTONE", rep.rows[0].ratio, rep.rows[1].ratio,
          rep.rows[2].ratio, meas_ok ? "exact" : "NOT EXACT", sep_rel);
  CHECK(meas_ok);
  CHECK(sep_rel <= 1e-6);
  CHECK(blew);
  CHECK(j_ok);
  CHECK(ratio_ok);
}

TEST_CASE("criterion 8: inequality suites") {
  const HeisenbergParams par = derived_exponents(1);
  const GridSpec g = box_grid(4.0, 4.0, 8.0, 21, 21, 33);

  // holds_42 / constant_43 audits on a ten-member family of decaying profiles.
  bool all_42 = true;
  double c_min = 1e300, c_max = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double a = 1.0 + 0.1 * j;
    const Field v =
        sample(g, [a](const GroupPoint& eta) { return std::exp(-a * psi_value(0.0, eta)); });
    const WeightedGnReport rep = weighted_gn_check(v, 1.0, 0.0, 3.0, par, 5e-2);
    all_42 = all_42 && rep.holds_42;
    c_min = std::min(c_min, rep.constant_43);
    c_max = std::max(c_max, rep.constant_43);
  }
  const bool c43_ok = c_min > 0.0 && c_max / c_min < 10.0;

  // gn_ratio is invariant under the anisotropic dilation (x,y,tau) ->
  // (lambda x, lambda y, lambda^2 tau).
  const double lambda = 7.3;
  const Field v = sample(g, [](double x, double y, double tau) {
    return std::exp(-(x * x + y * y) - std::abs(tau));
  });
  GridSpec gs = box_grid(4.0 / lambda, 4.0 / lambda, 8.0 / (lambda * lambda), 21, 21, 33);
  const Field vs = sample(gs, [&](double x, double y, double tau) {
    const double lx = lambda * x, ly = lambda * y, lt = lambda * lambda * tau;
    return std::exp(-(lx * lx + ly * ly) - std::abs(lt));
  });
  const double r0 = gn_ratio(v, 3.0, par);
  const double rs = gn_ratio(vs, 3.0, par);
  const double scale_rel = std::abs(r0 - rs) / r0;

  // L1-cap-L2 embedding on random fields.
  GridSpec gr = box_grid(4.0, 4.0, 8.0, 13, 13, 17);
  int failures = 0;
  for (int s = 0; s < 100; ++s) {
    const EmbeddingCheck ec = l1_l2_embedding_check(random_field(gr, 1000 + s), 1.0, 0.0);
    if (!ec.holds) ++failures;
  }

  const bool ok = all_42 && c43_ok && scale_rel <= 1e-10 && failures == 0;
  verdict(8, ok ? "PASS" : "FAIL",
          "holds_42 on all 10 members (tol 5e-2): %s; constant spread %.3f "
          "(cap 10); gn_ratio dilation error %.1e (tol 1e-10); embedding failures "
          "%d/100",
          all_42 ? "yes" : "NO", c_max / c_min, scale_rel, failures);
  CHECK(all_42);
  CHECK(c43_ok);
  CHECK(scale_rel <= 1e-10);
  CHECK(failures == 0);
}

TEST_CASE("criterion 9: byte-identical outputs across runs and thread counts") {
  fs::path dir = fs::temp_directory_path() / "hwave_acceptance" / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "sim.ini");
    cfg << "[group]\nn = 1\n\n[grid]\nhalf_widths = 4, 4, 8\npoints = 17, 17, 33\n\n"
           "[solver]\np = 1.5\ndt = auto\nt_end = 1\n\n"
           "[data]\nkind = plateau_bump\namplitude = 0.5\nwidth = 2\n\n"
           "[experiment]\nname = simulate\n";
  }
  const std::string cfg_arg = "simulate --config '" + (dir / "sim.ini").string() + "'";
  const int rc_a = run_cli(cfg_arg + " --out-dir '" + (dir / "a").string() + "' --threads 1", dir);
  const int rc_b = run_cli(cfg_arg + " --out-dir '" + (dir / "b").string() + "' --threads 1", dir);
  const int rc_c = run_cli(cfg_arg + " --out-dir '" + (dir / "c").string() + "' --threads 4", dir);
  REQUIRE(rc_a == 0);
  REQUIRE(rc_b == 0);
  REQUIRE(rc_c == 0);

  const std::string series_a = read_text(dir / "a" / "series.csv");
  const bool rerun_same = series_a == read_text(dir / "b" / "series.csv");
  const bool threads_same = series_a == read_text(dir / "c" / "series.csv");
  const bool reports_same =
      read_text(dir / "a" / "report.json") == read_text(dir / "b" / "report.json") &&
      read_text(dir / "a" / "report.json") == read_text(dir / "c" / "report.json");

  const bool ok = rerun_same && threads_same && reports_same;
  verdict(9, ok ? "PASS" : "FAIL",
          "series.csv identical across reruns: %s; across --threads {1,4}: %s; "
          "report.json identical: %s",
          rerun_same ? "yes" : "NO", threads_same ? "yes" : "NO", reports_same ? "yes" : "NO");
  CHECK(rerun_same);
  CHECK(threads_same);
  CHECK(reports_same);
}
