#include "hwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hwave/threading.hpp"

namespace hwave {

namespace {

double psi_at(double x, double y, double tau, double t) {
  return (x * x + y * y + 4.0 * std::abs(tau)) / (8.0 * (1.0 + t));
}

double max_psi(const GridSpec& g, double t) {
  const double r2 = g.half_widths[0] * g.half_widths[0] + g.half_widths[1] * g.half_widths[1];
  return (r2 + 4.0 * g.half_widths[2]) / (8.0 * (1.0 + t));
}

void check_weight_exponent(const GridSpec& g, double sigma, double t) {
  const double wmax = sigma * max_psi(g, t);
  if (wmax > 700.0) {
    std::ostringstream msg;
    msg << "e^{sigma psi} overflows: max exponent " << wmax << " > 700";
    throw NumericError(msg.str());
  }
}

// sum over nodes of w(node) * term(node) * cell_volume with w = e^{2 sigma psi}.
template <typename Term>
double weighted_quadrature(const GridSpec& g, double sigma, double t, const Term& term) {
  const int Ny = g.points[1], Nt = g.points[2];
  return deterministic_sum(g.size(), [&](std::size_t i) {
           const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
           const int iy = static_cast<int>((i / static_cast<std::size_t>(Nt)) %
                                           static_cast<std::size_t>(Ny));
           const int ix = static_cast<int>(i / (static_cast<std::size_t>(Nt) *
                                                static_cast<std::size_t>(Ny)));
           const double w = std::exp(2.0 * sigma *
                                     psi_at(g.coord(0, ix), g.coord(1, iy), g.coord(2, it), t));
           return w * term(i);
         }) *
         g.cell_volume();
}

double l2_of_gradient(const std::pair<Field, Field>& grad) {
  const double a = lq_norm(grad.first, 2.0);
  const double b = lq_norm(grad.second, 2.0);
  return std::sqrt(a * a + b * b);
}

}  // namespace

double weighted_energy(const Field& u_t, const std::pair<Field, Field>& grad, double t) {
  if (!(u_t.grid == grad.first.grid) || !(u_t.grid == grad.second.grid))
    throw InvalidParameter("weighted_energy inputs must share a grid");
  check_weight_exponent(u_t.grid, 1.0, t);
  const std::vector<double>& vt = u_t.values;
  const std::vector<double>& gx = grad.first.values;
  const std::vector<double>& gy = grad.second.values;
  const double integral =
      weighted_quadrature(u_t.grid, 1.0, t, [&](std::size_t i) {
        return vt[i] * vt[i] + gx[i] * gx[i] + gy[i] * gy[i];
      });
  if (!std::isfinite(integral)) throw NumericError("non-finite weighted energy");
  return 0.5 * integral;
}

DataNorm data_norm_A(const Field& u0, const Field& u1) {
  if (!(u0.grid == u1.grid)) throw InvalidParameter("data fields must share a grid");
  check_weight_exponent(u0.grid, 1.0, 0.0);
  const auto grad0 = apply_horizontal_gradient(u0);
  const std::vector<double>& v0 = u0.values;
  const std::vector<double>& v1 = u1.values;
  const std::vector<double>& gx = grad0.first.values;
  const std::vector<double>& gy = grad0.second.values;

  const double w_u0_sq = weighted_quadrature(u0.grid, 1.0, 0.0,
                                             [&](std::size_t i) { return v0[i] * v0[i]; });
  const double w_grad_sq = weighted_quadrature(
      u0.grid, 1.0, 0.0, [&](std::size_t i) { return gx[i] * gx[i] + gy[i] * gy[i]; });
  const double w_u1_sq = weighted_quadrature(u0.grid, 1.0, 0.0,
                                             [&](std::size_t i) { return v1[i] * v1[i]; });

  DataNorm out;
  out.a_norm = std::sqrt(w_u0_sq + w_grad_sq) + std::sqrt(w_u1_sq);
  out.i0 = std::sqrt(w_u1_sq + w_grad_sq);
  if (!std::isfinite(out.a_norm) || !std::isfinite(out.i0))
    throw NumericError("non-finite data norm");
  return out;
}

namespace {

double row_column(const TimeSeriesRow& r, const std::string& column) {
  if (column == "l2_u") return r.l2_u;
  if (column == "l2_grad_u") return r.l2_grad_u;
  if (column == "l2_ut") return r.l2_ut;
  if (column == "linf_u") return r.linf_u;
  if (column == "energy") return r.energy;
  if (column == "weighted_energy") return r.weighted_energy;
  if (column == "boundary_mass") return r.boundary_mass;
  throw InvalidParameter("unknown time-series column: " + column);
}

}  // namespace

DecayFit fit_decay(const TimeSeries& series, const std::string& column,
                   std::pair<double, double> window) {
  std::vector<double> xs, ys;
  for (const auto& row : series.rows) {
    if (row.t < window.first || row.t > window.second) continue;
    const double v = row_column(row, column);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "fit_decay needs positive values; column " << column << " is " << v
          << " at t = " << row.t;
      throw InvalidWindow(msg.str());
    }
    xs.push_back(std::log(1.0 + row.t));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 8) {
    std::ostringstream msg;
    msg << "fit window [" << window.first << ", " << window.second << "] holds " << xs.size()
        << " rows; need at least 8";
    throw InvalidWindow(msg.str());
  }

  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw InvalidWindow("fit window has no abscissa spread");

  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy <= 1e-30) {
    fit.r_squared = 1.0;  // constant column: the line is exact
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  fit.window = window;
  return fit;
}

MonotonicityReport weighted_energy_monotonicity(const TimeSeries& series, double tol) {
  MonotonicityReport out;
  if (series.rows.size() < 2)
    throw InvalidParameter("monotonicity audit needs at least two rows");
  for (const auto& row : series.rows)
    if (!std::isfinite(row.weighted_energy))
      throw InvalidParameter("weighted_energy column missing (non-finite entries)");

  for (std::size_t k = 0; k + 1 < series.rows.size(); ++k) {
    const double ek = series.rows[k].weighted_energy;
    const double en = series.rows[k + 1].weighted_energy;
    const double rel = (en - ek) / std::max(ek, 1e-30);
    out.max_relative_increase = std::max(out.max_relative_increase, rel);
  }
  out.holds = out.max_relative_increase <= tol;
  return out;
}

double gn_ratio(const Field& v, double q, const HeisenbergParams& params) {
  const double th = theta(q, params);
  const double num = lq_norm(v, q);
  const double l2 = lq_norm(v, 2.0);
  const double grad = l2_of_gradient(apply_horizontal_gradient(v));
  const double denom = std::pow(grad, th) * std::pow(l2, 1.0 - th);
  if (!(denom > 0.0)) throw InvalidParameter("gn_ratio denominator vanishes");
  return num / denom;
}

WeightedGnReport weighted_gn_check(const Field& v, double sigma, double t, double q,
                                   const HeisenbergParams& params, double tol_42) {
  if (!(sigma > 0.0) || sigma > 1.0)
    throw InvalidParameter("weighted_gn_check requires sigma in (0, 1]");
  if (!(t >= 0.0)) throw InvalidParameter("weighted_gn_check requires t >= 0");
  check_weight_exponent(v.grid, sigma, t);
  const double th = theta(q, params);
  const GridSpec& g = v.grid;
  const int Ny = g.points[1], Nt = g.points[2];

  // f = e^{sigma psi} v as a grid field.
  Field f(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
    const int iy =
        static_cast<int>((i / static_cast<std::size_t>(Nt)) % static_cast<std::size_t>(Ny));
    const int ix =
        static_cast<int>(i / (static_cast<std::size_t>(Nt) * static_cast<std::size_t>(Ny)));
    f.values[i] =
        v.values[i] *
        std::exp(sigma * psi_at(g.coord(0, ix), g.coord(1, iy), g.coord(2, it), t));
  }

  const double f_l2 = lq_norm(f, 2.0);
  const double grad_f = l2_of_gradient(apply_horizontal_gradient(f));

  const auto grad_v = apply_horizontal_gradient(v);
  const std::vector<double>& gx = grad_v.first.values;
  const std::vector<double>& gy = grad_v.second.values;
  const double w_grad_sq = weighted_quadrature(
      g, sigma, t, [&](std::size_t i) { return gx[i] * gx[i] + gy[i] * gy[i]; });
  const double w1_grad_sq = weighted_quadrature(
      g, 1.0, t, [&](std::size_t i) { return gx[i] * gx[i] + gy[i] * gy[i]; });

  WeightedGnReport out;
  out.lhs_lemma42 =
      0.5 * sigma * params.n / (1.0 + t) * f_l2 * f_l2 + grad_f * grad_f;
  out.rhs_lemma42 = w_grad_sq;
  out.holds_42 = out.lhs_lemma42 <= out.rhs_lemma42 * (1.0 + tol_42);

  out.lhs_lemma43 = lq_norm(f, q);
  const double grad_l2 = l2_of_gradient(grad_v);
  out.rhs_lemma43 = std::pow(1.0 + t, 0.5 * (1.0 - th)) * std::pow(grad_l2, 1.0 - sigma) *
                    std::pow(std::sqrt(w1_grad_sq), sigma);
  out.constant_43 = out.rhs_lemma43 > 0.0
                        ? out.lhs_lemma43 / out.rhs_lemma43
                        : std::numeric_limits<double>::infinity();
  out.holds_43 = std::isfinite(out.constant_43) && out.constant_43 > 0.0;
  return out;
}

double solution_norm_X(const TimeSeries& series, const HeisenbergParams& params) {
  const double q4 = static_cast<double>(params.Q) / 4.0;
  double sup = 0.0;
  for (const auto& row : series.rows) {
    const double opt = 1.0 + row.t;
    double value = std::pow(opt, q4) * row.l2_u + std::pow(opt, q4 + 0.5) * row.l2_grad_u +
                   std::pow(opt, q4 + 1.0) * row.l2_ut;
    if (std::isfinite(row.weighted_energy))
      value += std::sqrt(2.0 * row.weighted_energy);
    sup = std::max(sup, value);
  }
  return sup;
}

double gaussian_weight_integral_exact(double sigma, double t, const HeisenbergParams& params) {
  if (!(sigma > 0.0)) throw InvalidParameter("gaussian integral requires sigma > 0");
  if (!(t >= 0.0)) throw InvalidParameter("gaussian integral requires t >= 0");
  const double Q = static_cast<double>(params.Q);
  return std::pow(2.0, Q - 1.0) * std::pow(std::numbers::pi, Q / 2.0 - 1.0) *
         std::pow(sigma, -Q / 2.0) * std::pow(1.0 + t, Q / 2.0);
}

GaussianQuadrature gaussian_weight_quadrature(const GridSpec& grid, double sigma, double t) {
  grid.validate();
  if (!(sigma > 0.0)) throw InvalidParameter("gaussian quadrature requires sigma > 0");
  if (!(t >= 0.0)) throw InvalidParameter("gaussian quadrature requires t >= 0");
  const int Nt = grid.points[2];
  const double ht = grid.spacing(2);
  // Simpson per half needs a node exactly at tau = 0 and an even interval
  // count on each side: Nt odd with (Nt-1)/2 even, grid symmetric.
  if (grid.boundary != Boundary::dirichlet_zero)
    throw InvalidParameter("gaussian quadrature expects a dirichlet (node-at-zero) grid");
  if (Nt % 2 == 0 || ((Nt - 1) / 2) % 2 != 0)
    throw InvalidParameter("gaussian quadrature needs N_tau = 4k + 1 for the split Simpson rule");
  const int mid = (Nt - 1) / 2;
  if (std::abs(grid.coord(2, mid)) > 1e-12 * grid.half_widths[2])
    throw InvalidParameter("gaussian quadrature needs a tau node at 0");

  // Simpson weights on each half, sharing the kink node.
  std::vector<double> wt(static_cast<std::size_t>(Nt), 0.0);
  auto add_half = [&](int lo, int hi) {
    for (int i = lo; i <= hi; ++i) {
      double w;
      if (i == lo || i == hi)
        w = 1.0;
      else if ((i - lo) % 2 == 1)
        w = 4.0;
      else
        w = 2.0;
      wt[static_cast<std::size_t>(i)] += w * ht / 3.0;
    }
  };
  add_half(0, mid);
  add_half(mid, Nt - 1);

  const int Ny = grid.points[1];
  const double hxhy = grid.spacing(0) * grid.spacing(1);
  GaussianQuadrature out;
  out.value = deterministic_sum(grid.size(), [&](std::size_t i) {
                const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
                const int iy = static_cast<int>((i / static_cast<std::size_t>(Nt)) %
                                                static_cast<std::size_t>(Ny));
                const int ix = static_cast<int>(i / (static_cast<std::size_t>(Nt) *
                                                     static_cast<std::size_t>(Ny)));
                const double f = std::exp(-2.0 * sigma * psi_at(grid.coord(0, ix),
                                                                grid.coord(1, iy),
                                                                grid.coord(2, it), t));
                return f * wt[static_cast<std::size_t>(it)];
              }) *
              hxhy;
  out.rectangle_value = deterministic_sum(grid.size(), [&](std::size_t i) {
                          const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
                          const int iy = static_cast<int>((i / static_cast<std::size_t>(Nt)) %
                                                          static_cast<std::size_t>(Ny));
                          const int ix = static_cast<int>(i / (static_cast<std::size_t>(Nt) *
                                                               static_cast<std::size_t>(Ny)));
                          return std::exp(-2.0 * sigma * psi_at(grid.coord(0, ix),
                                                                grid.coord(1, iy),
                                                                grid.coord(2, it), t));
                        }) *
                        grid.cell_volume();
  return out;
}

}  // namespace hwave
