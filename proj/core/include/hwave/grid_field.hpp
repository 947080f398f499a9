#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hwave/errors.hpp"
#include "hwave/geometry.hpp"

namespace hwave {

enum class Boundary { dirichlet_zero, periodic };

/// Uniform grid on the box [-L_x, L_x] x [-L_y, L_y] x [-L_tau, L_tau].
///
/// Axis order is (x, y, tau); storage is row-major with tau innermost.  The
/// solver and the discrete operators support n = 1 only (a 3-dimensional
/// grid); higher n is representable but rejected by solver_grade().
struct GridSpec {
  int n = 1;
  std::array<double, 3> half_widths{};   // L_x, L_y, L_tau
  std::array<int, 3> points{};           // N_x, N_y, N_tau
  Boundary boundary = Boundary::dirichlet_zero;

  /// Validates positivity of widths/counts; degenerate axes are allowed here
  /// and rejected by solver_grade() / cfl_limit().
  void validate() const;

  double spacing(int axis) const;
  /// Node coordinate: -L + i*h on both boundary modes (periodic grids omit
  /// the duplicate right endpoint because h = 2L/N).
  double coord(int axis, int i) const;
  std::size_t size() const;
  std::size_t index(int ix, int iy, int it) const;
  bool solver_grade() const;  // n == 1 and at least 5 points per axis
  double cell_volume() const;

  bool operator==(const GridSpec&) const = default;
};

struct Field {
  GridSpec grid;
  std::vector<double> values;

  explicit Field(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
  Field(const GridSpec& g, std::vector<double> v);
};

/// Samples f at every node; dirichlet mode zeroes the boundary layer.
/// A non-finite sample raises SamplingError naming the node.
Field sample(const GridSpec& grid, const std::function<double(const GroupPoint&)>& f);
Field sample(const GridSpec& grid, const std::function<double(double, double, double)>& f);

/// 13-point second-order stencil for the expanded sub-Laplacian
///   d^2_x + d^2_y + (x^2+y^2)/4 d^2_tau + x d^2_{y tau} - y d^2_{x tau}.
/// Dirichlet treats outside values as 0; periodic wraps.
Field apply_sublaplacian(const Field& u);

/// Allocation-free variant; out must share u's grid (solver hot path).
void apply_sublaplacian_into(const Field& u, Field& out);

/// Centered first differences: X1 u = D_x u - (y/2) D_tau u,
/// Y1 u = D_y u + (x/2) D_tau u.
std::pair<Field, Field> apply_horizontal_gradient(const Field& u);

/// div(grad) composition cross-check: X1(X1 u) + Y1(Y1 u) built from two
/// gradient applications.  First-order agreement with apply_sublaplacian.
Field apply_sublaplacian_composed(const Field& u);

/// (sum |u|^q * prod h)^(1/q), rectangle rule.
double lq_norm(const Field& u, double q);
double linf_norm(const Field& u);

/// L^2 norm of e^{sigma psi(t,.)} u.  Fails (NumericError) if the exponent
/// sigma*psi exceeds 700 anywhere on the box instead of returning inf.
double weighted_l2(const Field& u, double sigma, double t);

struct EmbeddingCheck {
  double lhs = 0.0;  // ||u||_{L^1}
  double rhs = 0.0;  // (integral of e^{-2 sigma psi})^{1/2} * ||e^{sigma psi} u||
  bool holds = false;
};

/// Discrete Cauchy-Schwarz audit of the L^1 -> weighted-L^2 embedding.  The
/// Gaussian factor is quadratured on the same grid, so holds is exact up to
/// a 1e-12 rounding allowance.
EmbeddingCheck l1_l2_embedding_check(const Field& u, double sigma, double t);

/// L^2 norm over the outermost 3-cell shell (domain-truncation monitor).
/// Periodic grids have no boundary: returns 0.
double boundary_shell_l2(const Field& u);

/// Zeroes the boundary layer of dirichlet fields; no-op on periodic grids.
void zero_boundary(Field& u);

/// Deterministic pseudo-random field, values uniform in [-1, 1].  Keyed by
/// (seed, node index) so the result is independent of threading and ordering.
Field random_field(const GridSpec& grid, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Snapshot I/O.  Layout: magic "HWAV", u32 version = 1, u32 n, u32 point
// counts (x, y, tau), f64 half-widths, f64 time, then values as
// little-endian f64 in row-major order (tau innermost).

struct SnapshotData {
  int n = 1;
  std::array<double, 3> half_widths{};
  std::array<int, 3> points{};
  double time = 0.0;
  std::vector<double> values;

  /// The format does not record the boundary mode; the caller supplies it.
  Field to_field(Boundary boundary) const;
};

void write_snapshot(const std::string& path, const Field& u, double time);
SnapshotData read_snapshot(const std::string& path);

}  // namespace hwave
