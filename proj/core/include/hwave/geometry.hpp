#pragma once

#include <map>
#include <vector>

#include "hwave/errors.hpp"

namespace hwave {

/// Exact fraction. The critical exponents are ratios of small integers;
/// keeping them exact avoids drift in threshold comparisons like p <= p_fujita.
struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Group parameter n together with the exponents derived from it.
/// Q = 2n + 2 is the homogeneous dimension; it, not the topological
/// dimension 2n + 1, governs every decay rate in this library.
struct HeisenbergParams {
  int n = 1;
  int Q = 4;
  Rational p_fujita;  // 1 + 2/Q
  Rational p_gn;      // Q/(Q - 2)
};

/// Build the derived exponents for group parameter n >= 1.
HeisenbergParams derived_exponents(int n);

/// Point of H_n = R^{2n+1}. x and y have length n; tau is the center
/// coordinate picking up the twist in the group law.
struct GroupPoint {
  std::vector<double> x;
  std::vector<double> y;
  double tau = 0.0;
};

/// (x,y,tau) ∘ (x',y',tau') = (x+x', y+y', tau+tau' + (x·y' - x'·y)/2).
GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b);

/// Group inverse is plain negation (the twist term is antisymmetric).
GroupPoint group_inverse(const GroupPoint& a);

/// Interpolation exponent theta(q) = Q(1/2 - 1/q) for 2 <= q <= 2Q/(Q-2).
/// The representable upper endpoint maps to exactly 1 so downstream exponent
/// arithmetic like (1-theta) vanishes exactly at the Sobolev endpoint.
double theta(double q, const HeisenbergParams& params);

/// psi(t,eta) = (|x|^2 + |y|^2 + 4|tau|) / (8(1+t)). Nonnegative, zero only
/// at eta = 0, nonincreasing in t.
double psi_value(double t, const GroupPoint& eta);

struct PsiDerivatives {
  double psi_t = 0.0;
  /// Horizontal gradient in the order (X_1 psi, ..., X_n psi, Y_1 psi, ..., Y_n psi).
  std::vector<double> grad_h;
  double grad_h_sq = 0.0;
};

/// First derivatives of psi. Convention: sign(0) = 0 (weak-derivative reading
/// of |tau|). Consequence: grad_h_sq + psi_t == -|tau| / (2(1+t)^2) holds
/// exactly wherever tau != 0 and at eta = 0; on the remaining tau = 0 plane
/// only the inequality grad_h_sq + psi_t <= 0 survives, which is the form the
/// energy estimates consume.
PsiDerivatives psi_derivatives(double t, const GroupPoint& eta);

/// Sparse multivariate polynomial over (x_1..x_n, y_1..y_n, tau), used as the
/// exact oracle for the discrete sub-Laplacian. Coefficients are doubles but
/// all operator arithmetic multiplies by integers and quarters, so results
/// stay exact for integer-coefficient inputs.
class Polynomial {
 public:
  /// Exponent vector layout: (x_1..x_n, y_1..y_n, tau), length 2n+1.
  using Monomial = std::vector<unsigned>;

  explicit Polynomial(int n);

  int n() const { return n_; }
  int vars() const { return 2 * n_ + 1; }

  static Polynomial constant(int n, double c);
  static Polynomial monomial(int n, const Monomial& powers, double coeff);
  /// index 0..n-1 -> x_{index+1}; n..2n-1 -> y_{index-n+1}; 2n -> tau.
  static Polynomial variable(int n, int index);

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(double scalar) const;

  Polynomial derivative(int var) const;

  double evaluate(const GroupPoint& eta) const;
  int total_degree() const;
  bool is_zero() const { return terms_.empty(); }

  /// max |coefficient difference|, for exact-oracle comparisons.
  double max_coeff_distance(const Polynomial& rhs) const;

  const std::map<Monomial, double>& terms() const { return terms_; }

 private:
  void add_term(const Monomial& powers, double coeff);

  int n_;
  std::map<Monomial, double> terms_;
};

/// Expanded-form sub-Laplacian
///   Delta_x + Delta_y + (|x|^2+|y|^2)/4 d_tau^2
///   + sum_j (x_j d^2_{y_j tau} - y_j d^2_{x_j tau})
/// applied by exact symbolic differentiation. Oracle scope: total degree <= 6.
Polynomial sublaplacian_symbolic(const Polynomial& poly, const HeisenbergParams& params);

/// Same operator assembled as sum_j (X_j X_j + Y_j Y_j) with
/// X_j = d_{x_j} - (y_j/2) d_tau, Y_j = d_{y_j} + (x_j/2) d_tau.
/// Independent code path kept as a cross-check of the expanded form.
Polynomial sublaplacian_symbolic_composed(const Polynomial& poly, const HeisenbergParams& params);

}  // namespace hwave
