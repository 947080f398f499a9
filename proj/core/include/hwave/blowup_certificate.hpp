#pragma once

#include <vector>

#include "hwave/geometry.hpp"
#include "hwave/grid_field.hpp"

namespace hwave {

/// Smooth plateau bumps built from the transition f(s) = e^{-1/s}:
///   g(s) = f(1-s) / (f(s) + f(1-s))   (1 for s <= 0, 0 for s >= 1)
///   alpha(r) = g(2|r| - 1)            (plateau |r| <= 1/2, support (-1, 1))
///   beta(s)  = g((4|s| - 1) / 3)      (plateau [-1/4, 1/4], support (-1, 1))
/// All derivatives vanish at the plateau and support junctions, so
/// |alpha'| / alpha^{1/p} stays bounded; the constructor verifies that on a
/// fine 1-D mesh and records the suprema.
struct BumpProfile {
  double p = 0.0;

  double sup_alpha_d1 = 0.0;  // sup |alpha'| / alpha^{1/p}
  double sup_alpha_d2 = 0.0;  // sup |alpha''| / alpha^{1/p}
  double sup_beta_d1 = 0.0;
  double sup_beta_d2 = 0.0;

  explicit BumpProfile(double p);

  double transition(double s) const;     // g
  double transition_d1(double s) const;  // g'
  double transition_d2(double s) const;  // g''

  double alpha(double r) const;
  double alpha_d1(double r) const;
  double alpha_d2(double r) const;
  double beta(double s) const;
  double beta_d1(double s) const;
  double beta_d2(double s) const;
};

/// phi_R(t, eta) = beta(t/R^2) alpha(|x|/R) alpha(|y|/R) beta(tau/R^2).
double phi_R(double t, const GroupPoint& eta, double R, const BumpProfile& profile);

struct DerivativeBounds {
  double c_t = 0.0;    // sup |d_t phi_R|   / (R^{-2} phi_R^{1/p})
  double c_tt = 0.0;   // sup |d_t^2 phi_R| / (R^{-4} phi_R^{1/p})
  double c_lap = 0.0;  // sup |Delta_H phi_R| / (R^{-2} phi_R^{1/p})
};

/// Evaluates the three domination constants on a fine sample of the support.
/// They are R-independent by the scaling structure of phi_R; points where
/// both numerator and denominator vanish contribute 0, and a positive
/// numerator over a zero denominator raises ProfileViolation.
DerivativeBounds phi_R_derivative_bounds(double R, const BumpProfile& profile, double p);

struct CertificateRow {
  double R = 0.0;
  double I_R = 0.0;      // space-time integral of |u|^p phi_R
  double J_R = 0.0;      // integral of (u0 + u1) phi_R(0, .)
  double I_hat = 0.0;    // restricted to t in [R^2/4, R^2]
  double I_tilde = 0.0;  // restricted to the three annular shells of D_R
  double ratio = 0.0;    // (I_R + J_R) / (R^exponent I_R^{1/p})
};

struct CertificateReport {
  double p = 0.0;
  double exponent = 0.0;  // Q - (Q+2)/p
  std::vector<CertificateRow> rows;
};

/// Q - (Q+2)/p: negative for p < p_F(Q), zero at p_F, positive beyond.
double certificate_exponent(double p, const HeisenbergParams& params);

/// meas(D_R) for D_R = B_n(R) x B_n(R) x [-R^2, R^2] with the box product
/// structure used here: (2R)^{2n} * 2R^2 = 2^{Q-1} R^Q.
double meas_D_R(double R, const HeisenbergParams& params);

/// Streaming space-time quadrature of the certificate functionals.  Feed
/// solver states (or snapshots) in increasing, uniformly spaced t; time
/// integration is trapezoidal.  Cells straddling the t-window edges R^2/4
/// and R^2 are dropped rather than split - an O(dt) sliver on integrands
/// that vanish at R^2 anyway.
class CertificateAccumulator {
 public:
  /// Requires for every R: R > 1, R <= L_x, R <= L_y, R^2 <= L_tau, and the
  /// sampling stride (fixed by the first two states) <= min(R)^2 / 64.
  CertificateAccumulator(const GridSpec& grid, std::vector<double> R_values, double p,
                         const BumpProfile& profile);

  void add_state(double t, const Field& u);

  /// J_R (and the final report) from the data fields; call once.
  CertificateReport finalize(const Field& u0, const Field& u1, const HeisenbergParams& params);

 private:
  struct Trapezoid {
    double sum = 0.0, first = 0.0, last = 0.0;
    long count = 0;
    void add(double f) {
      sum += f;
      if (count == 0) first = f;
      last = f;
      ++count;
    }
    double value(double dt) const {
      return count < 2 ? 0.0 : dt * (sum - 0.5 * (first + last));
    }
  };

  struct PerR {
    double R = 0.0;
    std::vector<double> weight;         // alpha alpha beta on the grid nodes
    std::vector<double> weight_shells;  // the same, masked to D_1 u D_2 u D_3
    Trapezoid full, shells, late;       // I_R, I_tilde, I_hat integrands
  };

  GridSpec grid_;
  double p_ = 0.0;
  BumpProfile profile_;
  std::vector<PerR> per_r_;
  std::vector<double> pow_scratch_;
  double t_prev_ = 0.0;
  double dt_ = 0.0;  // fixed by the first two states
  long states_ = 0;
};

/// Convenience wrapper: streams a list of snapshots (shared grid geometry)
/// through a CertificateAccumulator.
CertificateReport certificate_sweep_snapshots(const std::vector<SnapshotData>& snapshots,
                                              const Field& u0, const Field& u1, double p,
                                              const std::vector<double>& R_values,
                                              const BumpProfile& profile,
                                              const HeisenbergParams& params);

}  // namespace hwave
