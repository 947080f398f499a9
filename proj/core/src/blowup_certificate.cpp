#include "hwave/blowup_certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hwave/threading.hpp"

namespace hwave {

namespace {

double f_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double f_exp_d1(double s) { return s > 0.0 ? f_exp(s) / (s * s) : 0.0; }
double f_exp_d2(double s) {
  return s > 0.0 ? f_exp(s) * (1.0 - 2.0 * s) / (s * s * s * s) : 0.0;
}

}  // namespace

// g and its derivatives.  On (0,1) the denominator f(s) + f(1-s) >= e^{-2},
// so no division ever degenerates; outside, the plateau branches apply.
// Underflow of f near the junctions reproduces the exact limits (all
// derivatives vanish to every order).
double BumpProfile::transition(double s) const {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = f_exp(1.0 - s), b = f_exp(s);
  return a / (a + b);
}

double BumpProfile::transition_d1(double s) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = f_exp(1.0 - s), b = f_exp(s);
  const double ad = -f_exp_d1(1.0 - s), bd = f_exp_d1(s);
  const double den = a + b;
  return (ad * b - a * bd) / (den * den);
}

double BumpProfile::transition_d2(double s) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = f_exp(1.0 - s), b = f_exp(s);
  const double ad = -f_exp_d1(1.0 - s), bd = f_exp_d1(s);
  const double add = f_exp_d2(1.0 - s), bdd = f_exp_d2(s);
  const double den = a + b;
  const double num = ad * b - a * bd;               // numerator of g'
  const double numd = add * b - a * bdd;            // its derivative
  return (numd * den - 2.0 * num * (ad + bd)) / (den * den * den);
}

double BumpProfile::alpha(double r) const { return transition(2.0 * std::abs(r) - 1.0); }

double BumpProfile::alpha_d1(double r) const {
  const double s = r >= 0.0 ? 1.0 : -1.0;
  return s * 2.0 * transition_d1(2.0 * std::abs(r) - 1.0);
}

double BumpProfile::alpha_d2(double r) const {
  return 4.0 * transition_d2(2.0 * std::abs(r) - 1.0);
}

double BumpProfile::beta(double s) const {
  return transition((4.0 * std::abs(s) - 1.0) / 3.0);
}

double BumpProfile::beta_d1(double s) const {
  const double sg = s >= 0.0 ? 1.0 : -1.0;
  return sg * (4.0 / 3.0) * transition_d1((4.0 * std::abs(s) - 1.0) / 3.0);
}

double BumpProfile::beta_d2(double s) const {
  return (16.0 / 9.0) * transition_d2((4.0 * std::abs(s) - 1.0) / 3.0);
}

namespace {

// sup over a fine mesh of |d| / base^{1/p}; 0/0 counts as 0, and a positive
// numerator over a zero base means the derivative escaped the support.
template <typename Base, typename Deriv>
double domination_sup(double p, const Base& base, const Deriv& deriv) {
  const int m = 100000;
  double sup = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double s = static_cast<double>(i) / m;
    const double b = base(s);
    const double d = std::abs(deriv(s));
    if (b <= 0.0) {
      if (d > 0.0)
        throw ProfileViolation("bump derivative is nonzero outside the profile support");
      continue;
    }
    const double ratio = d / std::pow(b, 1.0 / p);
    if (!std::isfinite(ratio))
      throw ProfileViolation("bump derivative domination ratio is non-finite");
    sup = std::max(sup, ratio);
  }
  return sup;
}

}  // namespace

BumpProfile::BumpProfile(double p_in) : p(p_in) {
  if (!(p > 1.0)) throw InvalidParameter("bump profile requires p > 1");
  sup_alpha_d1 = domination_sup(p, [this](double s) { return alpha(s); },
                                [this](double s) { return alpha_d1(s); });
  sup_alpha_d2 = domination_sup(p, [this](double s) { return alpha(s); },
                                [this](double s) { return alpha_d2(s); });
  sup_beta_d1 = domination_sup(p, [this](double s) { return beta(s); },
                               [this](double s) { return beta_d1(s); });
  sup_beta_d2 = domination_sup(p, [this](double s) { return beta(s); },
                               [this](double s) { return beta_d2(s); });
}

double phi_R(double t, const GroupPoint& eta, double R, const BumpProfile& profile) {
  if (!(R > 1.0)) throw InvalidParameter("phi_R requires R > 1");
  if (eta.x.size() != eta.y.size())
    throw InvalidParameter("group point has mismatched dimensions");
  double rx2 = 0.0, ry2 = 0.0;
  for (double v : eta.x) rx2 += v * v;
  for (double v : eta.y) ry2 += v * v;
  return profile.beta(t / (R * R)) * profile.alpha(std::sqrt(rx2) / R) *
         profile.alpha(std::sqrt(ry2) / R) * profile.beta(eta.tau / (R * R));
}

DerivativeBounds phi_R_derivative_bounds(double R, const BumpProfile& profile, double p) {
  if (!(R > 1.0)) throw InvalidParameter("derivative bounds require R > 1");
  if (!(p > 1.0)) throw InvalidParameter("derivative bounds require p > 1");
  DerivativeBounds out;
  // In scaled coordinates a = t/R^2, b = x/R, c = y/R, d = tau/R^2 every
  // ratio loses its R factor exactly, so the sups below are the R=anything
  // values.  The t-ratios separate: the spatial factor enters as
  // (alpha alpha beta)^{1 - 1/p} <= 1 with equality on the plateau.
  out.c_t = domination_sup(p, [&](double s) { return profile.beta(s); },
                           [&](double s) { return profile.beta_d1(s); });
  out.c_tt = domination_sup(p, [&](double s) { return profile.beta(s); },
                            [&](double s) { return profile.beta_d2(s); });

  // n = 1 expansion of Delta_H phi_R in scaled coordinates:
  // L = a''(b) a(c) B(d) + a(b) a''(c) B(d) + (b^2+c^2)/4 a(b) a(c) B''(d)
  //     + b a(b) a'(c) B'(d) - c a'(b) a(c) B'(d).
  const int m = 120;  // 121^3 sample points of the support cube
  double sup = 0.0;
  for (int ib = 0; ib <= m; ++ib) {
    const double b = -1.0 + 2.0 * ib / m;
    const double ab = profile.alpha(b), ab1 = profile.alpha_d1(b), ab2 = profile.alpha_d2(b);
    for (int ic = 0; ic <= m; ++ic) {
      const double c = -1.0 + 2.0 * ic / m;
      const double ac = profile.alpha(c), ac1 = profile.alpha_d1(c), ac2 = profile.alpha_d2(c);
      for (int id = 0; id <= m; ++id) {
        const double d = -1.0 + 2.0 * id / m;
        const double bd = profile.beta(d), bd1 = profile.beta_d1(d), bd2 = profile.beta_d2(d);
        const double L = ab2 * ac * bd + ab * ac2 * bd +
                         0.25 * (b * b + c * c) * ab * ac * bd2 + b * ab * ac1 * bd1 -
                         c * ab1 * ac * bd1;
        const double base = ab * ac * bd;
        const double num = std::abs(L);
        if (base <= 0.0) {
          if (num > 0.0)
            throw ProfileViolation("Delta_H phi_R escapes the phi_R support");
          continue;
        }
        const double ratio = num / std::pow(base, 1.0 / p);
        if (!std::isfinite(ratio))
          throw ProfileViolation("Delta_H phi_R domination ratio is non-finite");
        sup = std::max(sup, ratio);
      }
    }
  }
  out.c_lap = sup;
  return out;
}

double certificate_exponent(double p, const HeisenbergParams& params) {
  if (!(p > 1.0)) throw InvalidParameter("certificate exponent requires p > 1");
  const double Q = static_cast<double>(params.Q);
  return Q - (Q + 2.0) / p;
}

double meas_D_R(double R, const HeisenbergParams& params) {
  if (!(R > 0.0)) throw InvalidParameter("meas_D_R requires R > 0");
  return std::pow(2.0 * R, 2.0 * params.n) * (2.0 * R * R);
}

CertificateAccumulator::CertificateAccumulator(const GridSpec& grid,
                                               std::vector<double> R_values, double p,
                                               const BumpProfile& profile)
    : grid_(grid), p_(p), profile_(profile), pow_scratch_(grid.size(), 0.0) {
  grid_.validate();
  if (grid_.n != 1) throw UnsupportedGrid("certificate quadrature supports n=1 grids");
  if (!(p > 1.0)) throw InvalidParameter("certificate requires p > 1");
  if (R_values.empty()) throw InvalidParameter("certificate requires at least one R");

  per_r_.resize(R_values.size());
  const int Ny = grid_.points[1], Nt = grid_.points[2];
  for (std::size_t k = 0; k < R_values.size(); ++k) {
    const double R = R_values[k];
    if (!(R > 1.0)) throw InvalidParameter("certificate requires R > 1");
    if (R > grid_.half_widths[0] || R > grid_.half_widths[1] ||
        R * R > grid_.half_widths[2]) {
      std::ostringstream msg;
      msg << "D_R exceeds the grid box for R = " << R
          << " (need R <= L_x, R <= L_y, R^2 <= L_tau)";
      throw InvalidParameter(msg.str());
    }
    PerR& slot = per_r_[k];
    slot.R = R;
    slot.weight.resize(grid_.size());
    slot.weight_shells.resize(grid_.size());
    const double R2 = R * R;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
      const int iy =
          static_cast<int>((i / static_cast<std::size_t>(Nt)) % static_cast<std::size_t>(Ny));
      const int ix =
          static_cast<int>(i / (static_cast<std::size_t>(Nt) * static_cast<std::size_t>(Ny)));
      const double x = grid_.coord(0, ix), y = grid_.coord(1, iy), tau = grid_.coord(2, it);
      const double w =
          profile.alpha(x / R) * profile.alpha(y / R) * profile.beta(tau / R2);
      slot.weight[i] = w;
      const bool shell = std::abs(x) > 0.5 * R || std::abs(y) > 0.5 * R ||
                         std::abs(tau) > 0.25 * R2;
      slot.weight_shells[i] = shell ? w : 0.0;
    }
  }
}

void CertificateAccumulator::add_state(double t, const Field& u) {
  if (!(u.grid == grid_)) throw InvalidParameter("certificate state grid mismatch");
  if (states_ == 0) {
    t_prev_ = t;
  } else if (states_ == 1) {
    dt_ = t - t_prev_;
    if (!(dt_ > 0.0)) throw InvalidParameter("certificate states must advance in time");
    double r_min = per_r_.front().R;
    for (const PerR& slot : per_r_) r_min = std::min(r_min, slot.R);
    if (dt_ > r_min * r_min / 64.0)
      throw InvalidParameter(
          "certificate sampling too sparse: need >= 64 samples across [0, R^2]");
    t_prev_ = t;
  } else {
    if (std::abs(t - t_prev_ - dt_) > 1e-6 * dt_)
      throw InvalidParameter("certificate states must be uniformly spaced in time");
    t_prev_ = t;
  }
  ++states_;

  const std::vector<double>& v = u.values;
  const double p = p_;
  parallel_for(v.size(), kReductionChunk, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t i = lo; i < hi; ++i)
      pow_scratch_[i] = std::pow(std::abs(v[i]), p);
  });

  const double vol = grid_.cell_volume();
  for (PerR& slot : per_r_) {
    const double R2 = slot.R * slot.R;
    if (t > R2 * (1.0 + 1e-12)) continue;  // beyond supp beta(t/R^2)
    const double bfac = profile_.beta(t / R2);
    const double dot_full =
        deterministic_sum(v.size(), [&](std::size_t i) {
          return pow_scratch_[i] * slot.weight[i];
        }) * vol;
    const double dot_shells =
        deterministic_sum(v.size(), [&](std::size_t i) {
          return pow_scratch_[i] * slot.weight_shells[i];
        }) * vol;
    slot.full.add(bfac * dot_full);
    slot.shells.add(bfac * dot_shells);
    if (t >= 0.25 * R2 * (1.0 - 1e-12)) slot.late.add(bfac * dot_full);
  }
}

CertificateReport CertificateAccumulator::finalize(const Field& u0, const Field& u1,
                                                   const HeisenbergParams& params) {
  if (!(u0.grid == grid_) || !(u1.grid == grid_))
    throw InvalidParameter("certificate data grid mismatch");
  if (states_ < 2)
    throw InvalidParameter("certificate needs at least two states for the time quadrature");

  CertificateReport report;
  report.p = p_;
  report.exponent = certificate_exponent(p_, params);
  const double vol = grid_.cell_volume();
  const std::vector<double>& v0 = u0.values;
  const std::vector<double>& v1 = u1.values;

  for (const PerR& slot : per_r_) {
    CertificateRow row;
    row.R = slot.R;
    row.I_R = slot.full.value(dt_);
    row.I_tilde = slot.shells.value(dt_);
    row.I_hat = slot.late.value(dt_);
    row.J_R = deterministic_sum(v0.size(), [&](std::size_t i) {
                return (v0[i] + v1[i]) * slot.weight[i];
              }) * vol;

    if (row.I_R > 0.0) {
      row.ratio = (row.I_R + row.J_R) /
                  (std::pow(slot.R, report.exponent) * std::pow(row.I_R, 1.0 / p_));
    } else if (row.J_R != 0.0) {
      row.ratio = std::copysign(std::numeric_limits<double>::infinity(), row.J_R);
    } else {
      row.ratio = 0.0;
    }
    report.rows.push_back(row);
  }
  return report;
}

CertificateReport certificate_sweep_snapshots(const std::vector<SnapshotData>& snapshots,
                                              const Field& u0, const Field& u1, double p,
                                              const std::vector<double>& R_values,
                                              const BumpProfile& profile,
                                              const HeisenbergParams& params) {
  if (snapshots.size() < 2)
    throw InvalidParameter("certificate sweep needs at least two snapshots");
  std::vector<const SnapshotData*> order;
  order.reserve(snapshots.size());
  for (const auto& s : snapshots) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const SnapshotData* a, const SnapshotData* b) { return a->time < b->time; });

  CertificateAccumulator acc(u0.grid, R_values, p, profile);
  for (const SnapshotData* s : order) {
    if (s->n != u0.grid.n || s->points != u0.grid.points ||
        s->half_widths != u0.grid.half_widths)
      throw InvalidParameter("snapshot geometry differs from the data grid");
    acc.add_state(s->time, Field(u0.grid, s->values));
  }
  return acc.finalize(u0, u1, params);
}

}  // namespace hwave
