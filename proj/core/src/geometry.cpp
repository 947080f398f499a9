#include "hwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hwave {

namespace {

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

Rational make_rational(long long num, long long den) {
  long long g = gcd_ll(num < 0 ? -num : num, den);
  return Rational{num / g, den / g};
}

double sign0(double v) {
  // sign(0) = 0; see psi_derivatives contract.
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;
}

void check_dims(const GroupPoint& a, const GroupPoint& b) {
  if (a.x.size() != a.y.size() || b.x.size() != b.y.size() || a.x.size() != b.x.size())
    throw InvalidParameter("group points have mismatched dimensions");
}

}  // namespace

HeisenbergParams derived_exponents(int n) {
  if (n < 1) throw InvalidParameter("group parameter n must be >= 1");
  HeisenbergParams p;
  p.n = n;
  p.Q = 2 * n + 2;
  p.p_fujita = make_rational(p.Q + 2, p.Q);  // 1 + 2/Q
  p.p_gn = make_rational(p.Q, p.Q - 2);
  return p;
}

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b) {
  check_dims(a, b);
  GroupPoint out;
  const std::size_t n = a.x.size();
  out.x.resize(n);
  out.y.resize(n);
  double twist = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.x[j] = a.x[j] + b.x[j];
    out.y[j] = a.y[j] + b.y[j];
    twist += a.x[j] * b.y[j] - b.x[j] * a.y[j];
  }
  out.tau = a.tau + b.tau + 0.5 * twist;
  return out;
}

GroupPoint group_inverse(const GroupPoint& a) {
  GroupPoint out = a;
  for (auto& v : out.x) v = -v;
  for (auto& v : out.y) v = -v;
  out.tau = -out.tau;
  return out;
}

double theta(double q, const HeisenbergParams& params) {
  const double Q = static_cast<double>(params.Q);
  const double q_max = 2.0 * Q / (Q - 2.0);
  if (!(q >= 2.0 && q <= q_max))
    throw InvalidParameter("theta requires 2 <= q <= 2Q/(Q-2)");
  if (q == q_max) return 1.0;  // exact Sobolev endpoint
  const double value = Q * (0.5 - 1.0 / q);
  return std::clamp(value, 0.0, 1.0);
}

double psi_value(double t, const GroupPoint& eta) {
  if (t < 0.0) throw InvalidParameter("psi_value requires t >= 0");
  double r2 = 0.0;
  for (double v : eta.x) r2 += v * v;
  for (double v : eta.y) r2 += v * v;
  return (r2 + 4.0 * std::abs(eta.tau)) / (8.0 * (1.0 + t));
}

PsiDerivatives psi_derivatives(double t, const GroupPoint& eta) {
  if (t < 0.0) throw InvalidParameter("psi_derivatives requires t >= 0");
  if (eta.x.size() != eta.y.size())
    throw InvalidParameter("group point has mismatched dimensions");
  const std::size_t n = eta.x.size();
  const double opt = 1.0 + t;
  const double s = sign0(eta.tau);

  PsiDerivatives d;
  d.grad_h.resize(2 * n);
  double r2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    r2 += eta.x[j] * eta.x[j] + eta.y[j] * eta.y[j];
    d.grad_h[j] = (eta.x[j] - s * eta.y[j]) / (4.0 * opt);          // X_j psi
    d.grad_h[n + j] = (eta.y[j] + s * eta.x[j]) / (4.0 * opt);      // Y_j psi
  }
  d.psi_t = -(r2 + 4.0 * std::abs(eta.tau)) / (8.0 * opt * opt);
  double gsq = 0.0;
  for (double g : d.grad_h) gsq += g * g;
  d.grad_h_sq = gsq;
  return d;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(int n) : n_(n) {
  if (n < 1) throw InvalidParameter("polynomial needs group parameter n >= 1");
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  if (c != 0.0) p.terms_[Monomial(static_cast<std::size_t>(2 * n + 1), 0u)] = c;
  return p;
}

Polynomial Polynomial::monomial(int n, const Monomial& powers, double coeff) {
  Polynomial p(n);
  if (powers.size() != static_cast<std::size_t>(2 * n + 1))
    throw InvalidParameter("monomial exponent vector has wrong length");
  if (coeff != 0.0) p.terms_[powers] = coeff;
  return p;
}

Polynomial Polynomial::variable(int n, int index) {
  if (index < 0 || index > 2 * n) throw InvalidParameter("variable index out of range");
  Monomial m(static_cast<std::size_t>(2 * n + 1), 0u);
  m[static_cast<std::size_t>(index)] = 1u;
  return monomial(n, m, 1.0);
}

void Polynomial::add_term(const Monomial& powers, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.emplace(powers, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  if (n_ != rhs.n_) throw InvalidParameter("polynomial group parameters differ");
  Polynomial out = *this;
  for (const auto& [m, c] : rhs.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
  return *this + rhs * -1.0;
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  if (n_ != rhs.n_) throw InvalidParameter("polynomial group parameters differ");
  Polynomial out(n_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::operator*(double scalar) const {
  Polynomial out(n_);
  if (scalar == 0.0) return out;
  for (const auto& [m, c] : terms_) out.terms_[m] = c * scalar;
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var > 2 * n_) throw InvalidParameter("derivative index out of range");
  Polynomial out(n_);
  const auto v = static_cast<std::size_t>(var);
  for (const auto& [m, c] : terms_) {
    if (m[v] == 0u) continue;
    Monomial d = m;
    d[v] -= 1u;
    out.add_term(d, c * static_cast<double>(m[v]));
  }
  return out;
}

double Polynomial::evaluate(const GroupPoint& eta) const {
  if (eta.x.size() != static_cast<std::size_t>(n_) || eta.y.size() != static_cast<std::size_t>(n_))
    throw InvalidParameter("evaluation point does not match polynomial dimension");
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c;
    for (int j = 0; j < n_; ++j) {
      for (unsigned k = 0; k < m[static_cast<std::size_t>(j)]; ++k) term *= eta.x[static_cast<std::size_t>(j)];
      for (unsigned k = 0; k < m[static_cast<std::size_t>(n_ + j)]; ++k) term *= eta.y[static_cast<std::size_t>(j)];
    }
    for (unsigned k = 0; k < m[static_cast<std::size_t>(2 * n_)]; ++k) term *= eta.tau;
    total += term;
  }
  return total;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& [m, c] : terms_) {
    int d = 0;
    for (unsigned e : m) d += static_cast<int>(e);
    deg = std::max(deg, d);
  }
  return deg;
}

double Polynomial::max_coeff_distance(const Polynomial& rhs) const {
  double dist = 0.0;
  for (const auto& [m, c] : terms_) {
    auto it = rhs.terms_.find(m);
    const double rc = it == rhs.terms_.end() ? 0.0 : it->second;
    dist = std::max(dist, std::abs(c - rc));
  }
  for (const auto& [m, c] : rhs.terms_) {
    if (terms_.find(m) == terms_.end()) dist = std::max(dist, std::abs(c));
  }
  return dist;
}

namespace {

void check_oracle_scope(const Polynomial& poly) {
  if (poly.total_degree() > 6)
    throw InvalidParameter("symbolic sub-Laplacian oracle supports total degree <= 6");
}

}  // namespace

Polynomial sublaplacian_symbolic(const Polynomial& poly, const HeisenbergParams& params) {
  if (poly.n() != params.n) throw InvalidParameter("polynomial and params disagree on n");
  check_oracle_scope(poly);
  const int n = params.n;
  const int tau = 2 * n;
  Polynomial out(n);

  Polynomial d_tau2 = poly.derivative(tau).derivative(tau);
  for (int j = 0; j < n; ++j) {
    const int xj = j;
    const int yj = n + j;
    out = out + poly.derivative(xj).derivative(xj) + poly.derivative(yj).derivative(yj);
    const Polynomial x = Polynomial::variable(n, xj);
    const Polynomial y = Polynomial::variable(n, yj);
    out = out + (x * x + y * y) * d_tau2 * 0.25;
    out = out + x * poly.derivative(yj).derivative(tau) - y * poly.derivative(xj).derivative(tau);
  }
  return out;
}

Polynomial sublaplacian_symbolic_composed(const Polynomial& poly, const HeisenbergParams& params) {
  if (poly.n() != params.n) throw InvalidParameter("polynomial and params disagree on n");
  check_oracle_scope(poly);
  const int n = params.n;
  const int tau = 2 * n;

  auto apply_X = [&](const Polynomial& q, int j) {
    const Polynomial y = Polynomial::variable(n, n + j);
    return q.derivative(j) - y * q.derivative(tau) * 0.5;
  };
  auto apply_Y = [&](const Polynomial& q, int j) {
    const Polynomial x = Polynomial::variable(n, j);
    return q.derivative(n + j) + x * q.derivative(tau) * 0.5;
  };

  Polynomial out(n);
  for (int j = 0; j < n; ++j) {
    out = out + apply_X(apply_X(poly, j), j) + apply_Y(apply_Y(poly, j), j);
  }
  return out;
}

}  // namespace hwave
