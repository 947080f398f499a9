#include "hwave/grid_field.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "hwave/threading.hpp"

namespace hwave {

namespace {

void require_solver_grade(const GridSpec& g, const char* op) {
  if (!g.solver_grade()) {
    std::ostringstream msg;
    msg << op << " requires a solver-grade grid (n=1, >=5 points per axis)";
    throw UnsupportedGrid(msg.str());
  }
}

}  // namespace

void GridSpec::validate() const {
  if (n < 1) throw InvalidParameter("grid requires n >= 1");
  for (int a = 0; a < 3; ++a) {
    if (!(half_widths[static_cast<std::size_t>(a)] > 0.0) ||
        !std::isfinite(half_widths[static_cast<std::size_t>(a)]))
      throw InvalidParameter("grid half-widths must be positive and finite");
    if (points[static_cast<std::size_t>(a)] < 1)
      throw InvalidParameter("grid needs at least one point per axis");
  }
  if (boundary == Boundary::dirichlet_zero) {
    for (int a = 0; a < 3; ++a)
      if (points[static_cast<std::size_t>(a)] < 2)
        throw InvalidParameter("dirichlet grids need at least two points per axis");
  }
}

double GridSpec::spacing(int axis) const {
  const double L = half_widths[static_cast<std::size_t>(axis)];
  const int N = points[static_cast<std::size_t>(axis)];
  if (boundary == Boundary::dirichlet_zero) return 2.0 * L / (N - 1);
  return 2.0 * L / N;
}

double GridSpec::coord(int axis, int i) const {
  return -half_widths[static_cast<std::size_t>(axis)] + i * spacing(axis);
}

std::size_t GridSpec::size() const {
  return static_cast<std::size_t>(points[0]) * static_cast<std::size_t>(points[1]) *
         static_cast<std::size_t>(points[2]);
}

std::size_t GridSpec::index(int ix, int iy, int it) const {
  return (static_cast<std::size_t>(ix) * static_cast<std::size_t>(points[1]) +
          static_cast<std::size_t>(iy)) *
             static_cast<std::size_t>(points[2]) +
         static_cast<std::size_t>(it);
}

bool GridSpec::solver_grade() const {
  return n == 1 && points[0] >= 5 && points[1] >= 5 && points[2] >= 5;
}

double GridSpec::cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw InvalidParameter("field value count does not match grid size");
}

namespace {

bool on_boundary(const GridSpec& g, int ix, int iy, int it) {
  return ix == 0 || ix == g.points[0] - 1 || iy == 0 || iy == g.points[1] - 1 || it == 0 ||
         it == g.points[2] - 1;
}

}  // namespace

Field sample(const GridSpec& grid, const std::function<double(double, double, double)>& f) {
  grid.validate();
  Field out(grid);
  const bool dirichlet = grid.boundary == Boundary::dirichlet_zero;
  const int Nx = grid.points[0], Ny = grid.points[1], Nt = grid.points[2];
  std::size_t i = 0;
  for (int ix = 0; ix < Nx; ++ix) {
    const double x = grid.coord(0, ix);
    for (int iy = 0; iy < Ny; ++iy) {
      const double y = grid.coord(1, iy);
      for (int it = 0; it < Nt; ++it, ++i) {
        if (dirichlet && on_boundary(grid, ix, iy, it)) continue;
        const double v = f(x, y, grid.coord(2, it));
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "non-finite sample at node (" << ix << ", " << iy << ", " << it << ")";
          throw SamplingError(msg.str());
        }
        out.values[i] = v;
      }
    }
  }
  return out;
}

Field sample(const GridSpec& grid, const std::function<double(const GroupPoint&)>& f) {
  if (grid.n != 1) throw UnsupportedGrid("sample supports n=1 grids");
  GroupPoint eta;
  eta.x.resize(1);
  eta.y.resize(1);
  return sample(grid, std::function<double(double, double, double)>(
                          [&](double x, double y, double tau) {
                            eta.x[0] = x;
                            eta.y[0] = y;
                            eta.tau = tau;
                            return f(eta);
                          }));
}

namespace {

// Shared neighbour plumbing for the stencil kernels.  For dirichlet grids the
// boundary layer of the *output* is zero and out-of-range reads are zero; for
// periodic grids indices wrap.
struct StencilGeometry {
  const GridSpec& g;
  int Nx, Ny, Nt;
  std::size_t sx, sy;  // strides; tau stride is 1
  bool periodic;

  explicit StencilGeometry(const GridSpec& grid)
      : g(grid),
        Nx(grid.points[0]),
        Ny(grid.points[1]),
        Nt(grid.points[2]),
        sx(static_cast<std::size_t>(grid.points[1]) * static_cast<std::size_t>(grid.points[2])),
        sy(static_cast<std::size_t>(grid.points[2])),
        periodic(grid.boundary == Boundary::periodic) {}

  int wrap(int i, int N) const { return (i % N + N) % N; }

  double at(const std::vector<double>& v, int ix, int iy, int it) const {
    if (periodic) {
      ix = wrap(ix, Nx);
      iy = wrap(iy, Ny);
      it = wrap(it, Nt);
    } else if (ix < 0 || ix >= Nx || iy < 0 || iy >= Ny || it < 0 || it >= Nt) {
      return 0.0;
    }
    return v[g.index(ix, iy, it)];
  }
};

}  // namespace

Field apply_sublaplacian(const Field& u) {
  Field out(u.grid);
  apply_sublaplacian_into(u, out);
  return out;
}

void apply_sublaplacian_into(const Field& u, Field& out) {
  require_solver_grade(u.grid, "apply_sublaplacian");
  if (!(out.grid == u.grid)) throw InvalidParameter("stencil output grid mismatch");
  const GridSpec& g = u.grid;
  const StencilGeometry geo(g);
  const double hx = g.spacing(0), hy = g.spacing(1), ht = g.spacing(2);
  const double ihx2 = 1.0 / (hx * hx), ihy2 = 1.0 / (hy * hy), iht2 = 1.0 / (ht * ht);
  const double ixt = 1.0 / (4.0 * hx * ht), iyt = 1.0 / (4.0 * hy * ht);
  const int Nx = geo.Nx, Ny = geo.Ny, Nt = geo.Nt;
  const std::vector<double>& v = u.values;

  const bool dirichlet = !geo.periodic;
  // Interior fast path: all 13 neighbours in range, no wrapping or zero fill.
  // Row boundaries (and every row of a periodic grid's edge planes) go through
  // the slow path.
  parallel_for(static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny), 32,
               [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t row = lo; row < hi; ++row) {
      const int ix = static_cast<int>(row / static_cast<std::size_t>(Ny));
      const int iy = static_cast<int>(row % static_cast<std::size_t>(Ny));
      const double x = g.coord(0, ix);
      const double y = g.coord(1, iy);
      const double ctau = 0.25 * (x * x + y * y) * iht2;
      const bool edge_xy = ix == 0 || ix == Nx - 1 || iy == 0 || iy == Ny - 1;
      double* o = &out.values[g.index(ix, iy, 0)];
      if (dirichlet && edge_xy) {  // output boundary layer is zero
        for (int it = 0; it < Nt; ++it) o[it] = 0.0;
        continue;
      }
      if (!edge_xy) {
        const double* c = &v[g.index(ix, iy, 0)];
        const double* xp = c + geo.sx;
        const double* xm = c - geo.sx;
        const double* yp = c + geo.sy;
        const double* ym = c - geo.sy;
        for (int it = 1; it < Nt - 1; ++it) {
          o[it] = (xp[it] - 2.0 * c[it] + xm[it]) * ihx2 +
                  (yp[it] - 2.0 * c[it] + ym[it]) * ihy2 +
                  (c[it + 1] - 2.0 * c[it] + c[it - 1]) * ctau +
                  x * (yp[it + 1] - yp[it - 1] - ym[it + 1] + ym[it - 1]) * iyt -
                  y * (xp[it + 1] - xp[it - 1] - xm[it + 1] + xm[it - 1]) * ixt;
        }
      }
      // Slow path: tau endpoints of interior rows, plus whole rows on the
      // x/y edge planes of periodic grids.
      for (int it = 0; it < Nt; ++it) {
        if (!edge_xy && it > 0 && it < Nt - 1) continue;
        if (dirichlet && (it == 0 || it == Nt - 1)) {
          o[it] = 0.0;
          continue;
        }
        o[it] = (geo.at(v, ix + 1, iy, it) - 2.0 * geo.at(v, ix, iy, it) +
                 geo.at(v, ix - 1, iy, it)) * ihx2 +
                (geo.at(v, ix, iy + 1, it) - 2.0 * geo.at(v, ix, iy, it) +
                 geo.at(v, ix, iy - 1, it)) * ihy2 +
                (geo.at(v, ix, iy, it + 1) - 2.0 * geo.at(v, ix, iy, it) +
                 geo.at(v, ix, iy, it - 1)) * ctau +
                x * (geo.at(v, ix, iy + 1, it + 1) - geo.at(v, ix, iy + 1, it - 1) -
                     geo.at(v, ix, iy - 1, it + 1) + geo.at(v, ix, iy - 1, it - 1)) * iyt -
                y * (geo.at(v, ix + 1, iy, it + 1) - geo.at(v, ix + 1, iy, it - 1) -
                     geo.at(v, ix - 1, iy, it + 1) + geo.at(v, ix - 1, iy, it - 1)) * ixt;
      }
    }
  });
}

std::pair<Field, Field> apply_horizontal_gradient(const Field& u) {
  require_solver_grade(u.grid, "apply_horizontal_gradient");
  const GridSpec& g = u.grid;
  const StencilGeometry geo(g);
  const double i2hx = 1.0 / (2.0 * g.spacing(0));
  const double i2hy = 1.0 / (2.0 * g.spacing(1));
  const double i2ht = 1.0 / (2.0 * g.spacing(2));
  const int Nx = geo.Nx, Ny = geo.Ny, Nt = geo.Nt;
  const std::vector<double>& v = u.values;
  const bool dirichlet = !geo.periodic;

  Field gx(g), gy(g);
  parallel_for(static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny), 32,
               [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t row = lo; row < hi; ++row) {
      const int ix = static_cast<int>(row / static_cast<std::size_t>(Ny));
      const int iy = static_cast<int>(row % static_cast<std::size_t>(Ny));
      const double x = g.coord(0, ix);
      const double y = g.coord(1, iy);
      const bool edge_xy = ix == 0 || ix == Nx - 1 || iy == 0 || iy == Ny - 1;
      if (dirichlet && edge_xy) continue;
      const std::size_t base = g.index(ix, iy, 0);
      for (int it = 0; it < Nt; ++it) {
        if (dirichlet && (it == 0 || it == Nt - 1)) continue;
        const double dx = (geo.at(v, ix + 1, iy, it) - geo.at(v, ix - 1, iy, it)) * i2hx;
        const double dy = (geo.at(v, ix, iy + 1, it) - geo.at(v, ix, iy - 1, it)) * i2hy;
        const double dt = (geo.at(v, ix, iy, it + 1) - geo.at(v, ix, iy, it - 1)) * i2ht;
        gx.values[base + static_cast<std::size_t>(it)] = dx - 0.5 * y * dt;
        gy.values[base + static_cast<std::size_t>(it)] = dy + 0.5 * x * dt;
      }
    }
  });
  return {std::move(gx), std::move(gy)};
}

Field apply_sublaplacian_composed(const Field& u) {
  auto [xu, yu] = apply_horizontal_gradient(u);
  auto gxx = apply_horizontal_gradient(xu);
  auto gyy = apply_horizontal_gradient(yu);
  Field out(u.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = gxx.first.values[i] + gyy.second.values[i];
  return out;
}

double lq_norm(const Field& u, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidParameter("lq_norm requires q in [1, inf)");
  const std::vector<double>& v = u.values;
  double s;
  if (q == 1.0) {
    s = deterministic_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
  } else if (q == 2.0) {
    s = deterministic_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; });
  } else {
    s = deterministic_sum(v.size(), [&](std::size_t i) { return std::pow(std::abs(v[i]), q); });
  }
  if (!std::isfinite(s)) throw NumericError("non-finite values in lq_norm");
  return std::pow(s * u.grid.cell_volume(), 1.0 / q);
}

double linf_norm(const Field& u) {
  // A NaN later overwritten by max() would silently vanish, so test each
  // element; inf and NaN both fail loudly here.
  double m = 0.0;
  for (double x : u.values) {
    if (!std::isfinite(x)) throw NumericError("non-finite values in linf_norm");
    m = std::max(m, std::abs(x));
  }
  return m;
}

namespace {

// Max of sigma * psi(t, .) over the box corners (psi is corner-maximal).
double max_weight_exponent(const GridSpec& g, double sigma, double t) {
  const double r2 = g.half_widths[0] * g.half_widths[0] + g.half_widths[1] * g.half_widths[1];
  const double psi_max = (r2 + 4.0 * g.half_widths[2]) / (8.0 * (1.0 + t));
  return sigma * psi_max;
}

double psi_at(double x, double y, double tau, double t) {
  return (x * x + y * y + 4.0 * std::abs(tau)) / (8.0 * (1.0 + t));
}

}  // namespace

double weighted_l2(const Field& u, double sigma, double t) {
  if (!(sigma > 0.0)) throw InvalidParameter("weighted_l2 requires sigma > 0");
  if (!(t >= 0.0)) throw InvalidParameter("weighted_l2 requires t >= 0");
  const double wmax = max_weight_exponent(u.grid, sigma, t);
  if (wmax > 700.0) {
    std::ostringstream msg;
    msg << "e^{sigma psi} overflows: max exponent " << wmax << " > 700";
    throw NumericError(msg.str());
  }
  const GridSpec& g = u.grid;
  const int Ny = g.points[1], Nt = g.points[2];
  const std::vector<double>& v = u.values;
  const double s = deterministic_sum(v.size(), [&](std::size_t i) {
    const std::size_t it = i % static_cast<std::size_t>(Nt);
    const std::size_t iy = (i / static_cast<std::size_t>(Nt)) % static_cast<std::size_t>(Ny);
    const std::size_t ix = i / (static_cast<std::size_t>(Nt) * static_cast<std::size_t>(Ny));
    const double w = std::exp(sigma * psi_at(g.coord(0, static_cast<int>(ix)),
                                             g.coord(1, static_cast<int>(iy)),
                                             g.coord(2, static_cast<int>(it)), t));
    const double wi = w * v[i];
    return wi * wi;
  });
  if (!std::isfinite(s)) throw NumericError("non-finite sum in weighted_l2");
  return std::sqrt(s * g.cell_volume());
}

EmbeddingCheck l1_l2_embedding_check(const Field& u, double sigma, double t) {
  if (!(sigma > 0.0)) throw InvalidParameter("embedding check requires sigma > 0");
  EmbeddingCheck out;
  out.lhs = lq_norm(u, 1.0);
  // Gaussian factor quadratured on the same grid: discrete Cauchy-Schwarz
  // then holds exactly, up to rounding.
  const Field gauss = sample(u.grid, std::function<double(double, double, double)>(
                                         [&](double x, double y, double tau) {
                                           return std::exp(-2.0 * sigma * psi_at(x, y, tau, t));
                                         }));
  const double gf = deterministic_sum(gauss.values.size(),
                                      [&](std::size_t i) { return gauss.values[i]; }) *
                    u.grid.cell_volume();
  out.rhs = std::sqrt(gf) * weighted_l2(u, sigma, t);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

double boundary_shell_l2(const Field& u) {
  const GridSpec& g = u.grid;
  if (g.boundary == Boundary::periodic) return 0.0;
  const int Nx = g.points[0], Ny = g.points[1], Nt = g.points[2];
  const int shell = 3;
  double s = 0.0;
  for (int ix = 0; ix < Nx; ++ix) {
    const bool ex = ix < shell || ix >= Nx - shell;
    for (int iy = 0; iy < Ny; ++iy) {
      const bool ey = iy < shell || iy >= Ny - shell;
      for (int it = 0; it < Nt; ++it) {
        if (!ex && !ey && it >= shell && it < Nt - shell) {
          it = Nt - shell - 1;  // skip the interior span of this row
          continue;
        }
        const double v = u.values[g.index(ix, iy, it)];
        s += v * v;
      }
    }
  }
  return std::sqrt(s * g.cell_volume());
}

void zero_boundary(Field& u) {
  const GridSpec& g = u.grid;
  if (g.boundary == Boundary::periodic) return;
  const int Nx = g.points[0], Ny = g.points[1], Nt = g.points[2];
  for (int ix = 0; ix < Nx; ++ix) {
    for (int iy = 0; iy < Ny; ++iy) {
      if (ix == 0 || ix == Nx - 1 || iy == 0 || iy == Ny - 1) {
        double* row = &u.values[g.index(ix, iy, 0)];
        for (int it = 0; it < Nt; ++it) row[it] = 0.0;
      } else {
        u.values[g.index(ix, iy, 0)] = 0.0;
        u.values[g.index(ix, iy, Nt - 1)] = 0.0;
      }
    }
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Field random_field(const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  Field out(grid);
  const bool dirichlet = grid.boundary == Boundary::dirichlet_zero;
  const int Ny = grid.points[1], Nt = grid.points[2];
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (dirichlet) {
      const int it = static_cast<int>(i % static_cast<std::size_t>(Nt));
      const int iy = static_cast<int>((i / static_cast<std::size_t>(Nt)) %
                                      static_cast<std::size_t>(Ny));
      const int ix = static_cast<int>(i / (static_cast<std::size_t>(Nt) *
                                           static_cast<std::size_t>(Ny)));
      if (on_boundary(grid, ix, iy, it)) continue;
    }
    const std::uint64_t z = splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(i));
    const double u01 = static_cast<double>(z >> 11) * 0x1.0p-53;  // [0, 1)
    out.values[i] = 2.0 * u01 - 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot I/O

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::string& buf, double v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint32_t u32() {
    std::uint32_t v;
    take(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    take(&v, sizeof v);
    return v;
  }
  void take(void* dst, std::size_t len) {
    if (pos_ + len > data_.size())
      throw InvalidParameter("snapshot file truncated: " + path_);
    std::memcpy(dst, data_.data() + pos_, len);
    pos_ += len;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_snapshot(const std::string& path, const Field& u, double time) {
  std::string buf;
  buf.reserve(4 + 4 + 4 + 12 + 24 + 8 + u.values.size() * 8);
  buf.append("HWAV", 4);
  put_u32(buf, 1u);
  put_u32(buf, static_cast<std::uint32_t>(u.grid.n));
  for (int a = 0; a < 3; ++a)
    put_u32(buf, static_cast<std::uint32_t>(u.grid.points[static_cast<std::size_t>(a)]));
  for (int a = 0; a < 3; ++a) put_f64(buf, u.grid.half_widths[static_cast<std::size_t>(a)]);
  put_f64(buf, time);
  buf.append(reinterpret_cast<const char*>(u.values.data()), u.values.size() * sizeof(double));

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw InvalidParameter("cannot open snapshot for writing: " + path);
  const std::size_t written = std::fwrite(buf.data(), 1, buf.size(), fp);
  const int rc = std::fclose(fp);
  if (written != buf.size() || rc != 0)
    throw NumericError("short write on snapshot: " + path);
}

SnapshotData read_snapshot(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw InvalidParameter("cannot open snapshot: " + path);
  std::string data;
  char chunk[1 << 16];
  std::size_t got;
  while ((got = std::fread(chunk, 1, sizeof chunk, fp)) > 0) data.append(chunk, got);
  std::fclose(fp);

  Reader r(data, path);
  char magic[4];
  r.take(magic, 4);
  if (std::memcmp(magic, "HWAV", 4) != 0)
    throw InvalidParameter("bad snapshot magic in " + path);
  const std::uint32_t version = r.u32();
  if (version != 1u)
    throw InvalidParameter("unsupported snapshot version in " + path);

  SnapshotData snap;
  snap.n = static_cast<int>(r.u32());
  for (int a = 0; a < 3; ++a) snap.points[static_cast<std::size_t>(a)] = static_cast<int>(r.u32());
  for (int a = 0; a < 3; ++a) snap.half_widths[static_cast<std::size_t>(a)] = r.f64();
  snap.time = r.f64();

  const std::size_t count = static_cast<std::size_t>(snap.points[0]) *
                            static_cast<std::size_t>(snap.points[1]) *
                            static_cast<std::size_t>(snap.points[2]);
  if (r.remaining() != count * sizeof(double))
    throw InvalidParameter("snapshot payload size mismatch in " + path);
  snap.values.resize(count);
  r.take(snap.values.data(), count * sizeof(double));
  return snap;
}

Field SnapshotData::to_field(Boundary boundary) const {
  GridSpec g;
  g.n = n;
  g.half_widths = half_widths;
  g.points = points;
  g.boundary = boundary;
  g.validate();
  return Field(g, values);
}

}  // namespace hwave
