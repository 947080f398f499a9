#include "hwave/solver.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "hwave/threading.hpp"

namespace hwave {

void SolverConfig::validate() const {
  if (p && !(*p > 1.0)) throw InvalidParameter("solver requires p > 1");
  if (dt && !(*dt > 0.0 && std::isfinite(*dt)))
    throw InvalidParameter("solver requires dt > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw InvalidParameter("solver requires t_end > 0");
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
    throw InvalidParameter("cfl_fraction must lie in (0, 1]");
  if (!(blowup_threshold > 0.0)) throw InvalidParameter("blowup_threshold must be positive");
  if (record_every < 1) throw InvalidParameter("record_every must be a positive integer");
}

double cfl_limit(const GridSpec& grid) {
  if (!grid.solver_grade())
    throw UnsupportedGrid("cfl_limit requires a solver-grade grid (n=1, >=5 points per axis)");
  const double hx = grid.spacing(0), hy = grid.spacing(1), ht = grid.spacing(2);
  const double r_max =
      std::sqrt(grid.half_widths[0] * grid.half_widths[0] +
                grid.half_widths[1] * grid.half_widths[1]);
  const double lambda = 4.0 / (hx * hx) + 4.0 / (hy * hy) + r_max * r_max / (ht * ht) +
                        2.0 * r_max * (1.0 / (hx * ht) + 1.0 / (hy * ht));
  return 2.0 / std::sqrt(lambda);
}

double resolve_dt(const GridSpec& grid, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.dt) return std::min(*cfg.dt, cfg.t_end);
  // Auto mode: largest dt <= cfl_fraction * cfl_limit that divides t_end, so
  // the final step lands exactly on the horizon.
  const double cap = cfl_limit(grid) * cfg.cfl_fraction;
  const auto steps = static_cast<long>(std::ceil(cfg.t_end / cap - 1e-12));
  return cfg.t_end / static_cast<double>(std::max(steps, 1L));
}

SolverState::SolverState(const Field& u0, const Field& u1, double dt_, bool linear, double p)
    : u_prev(u0), u_curr(u0.grid), scratch(u0.grid), t(dt_), step(1), dt(dt_) {
  if (!(u0.grid == u1.grid)) throw InvalidParameter("initial data fields have different grids");
  // Second-order Taylor start: u^1 = u0 + dt u1 + (dt^2/2)(Delta_H u0 - u1 + F(u0)).
  apply_sublaplacian_into(u0, scratch);
  const std::vector<double>& v0 = u0.values;
  const std::vector<double>& v1 = u1.values;
  const double half_dt2 = 0.5 * dt_ * dt_;
  parallel_for(u_curr.values.size(), kReductionChunk,
               [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double f = linear ? 0.0 : std::pow(std::abs(v0[i]), p);
      u_curr.values[i] = v0[i] + dt_ * v1[i] + half_dt2 * (scratch.values[i] - v1[i] + f);
    }
  });
  zero_boundary(u_curr);
}

SolverState init_state(const Field& u0, const Field& u1, const SolverConfig& cfg) {
  cfg.validate();
  if (!(u0.grid == u1.grid)) throw InvalidParameter("initial data fields have different grids");
  const double dt = resolve_dt(u0.grid, cfg);
  return SolverState(u0, u1, dt, !cfg.p.has_value(), cfg.p.value_or(0.0));
}

namespace {

// Fills state.scratch with u^{k+1}; does not advance bookkeeping.
void compute_next(SolverState& s, bool linear, double p, double damping) {
  apply_sublaplacian_into(s.u_curr, s.scratch);
  const double dt = s.dt;
  const double dt2 = dt * dt;
  // damping = 1: u^{k+1} = [2u^k - (1 - dt/2)u^{k-1} + dt^2(lap + F)] / (1 + dt/2)
  // damping = 0: the undamped conservative core.
  const double c_prev = 1.0 - damping * 0.5 * dt;
  const double inv = 1.0 / (1.0 + damping * 0.5 * dt);
  const std::vector<double>& vc = s.u_curr.values;
  const std::vector<double>& vp = s.u_prev.values;
  std::vector<double>& out = s.scratch.values;
  parallel_for(out.size(), kReductionChunk, [&](std::size_t lo, std::size_t hi, std::size_t) {
    if (linear) {
      for (std::size_t i = lo; i < hi; ++i)
        out[i] = (2.0 * vc[i] - c_prev * vp[i] + dt2 * out[i]) * inv;
    } else {
      for (std::size_t i = lo; i < hi; ++i)
        out[i] = (2.0 * vc[i] - c_prev * vp[i] +
                  dt2 * (out[i] + std::pow(std::abs(vc[i]), p))) * inv;
    }
  });
}

void rotate(SolverState& s) {
  std::swap(s.u_prev.values, s.u_curr.values);
  std::swap(s.u_curr.values, s.scratch.values);
  ++s.step;
  s.t = static_cast<double>(s.step) * s.dt;
}

}  // namespace

void step(SolverState& state, const SolverConfig& cfg) {
  compute_next(state, !cfg.p.has_value(), cfg.p.value_or(0.0), 1.0);
  rotate(state);
}

void conservative_step(SolverState& state) {
  compute_next(state, true, 0.0, 0.0);
  rotate(state);
}

RunOutcome run(const Field& u0, const Field& u1, const SolverConfig& cfg,
               const StepObserver& observer) {
  cfg.validate();
  if (!(u0.grid == u1.grid)) throw InvalidParameter("initial data fields have different grids");
  if (!u0.grid.solver_grade())
    throw UnsupportedGrid("run requires a solver-grade grid (n=1, >=5 points per axis)");

  const double dt = resolve_dt(u0.grid, cfg);
  const long total_steps =
      std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9)));
  const bool linear = !cfg.p.has_value();
  const double p = cfg.p.value_or(0.0);

  // The weighted energy overflows only on boxes far beyond guidance; record
  // NaN there instead of failing the whole run.
  GroupPoint corner;
  corner.x = {u0.grid.half_widths[0]};
  corner.y = {u0.grid.half_widths[1]};
  corner.tau = u0.grid.half_widths[2];
  const bool weights_ok = 2.0 * psi_value(0.0, corner) <= 700.0;

  RunOutcome outcome;
  Field ut_scratch(u0.grid);

  auto record = [&](double t, const Field& u, const Field& ut) {
    TimeSeriesRow row;
    row.t = t;
    row.l2_u = lq_norm(u, 2.0);
    const auto grad = apply_horizontal_gradient(u);
    const double gx = lq_norm(grad.first, 2.0);
    const double gy = lq_norm(grad.second, 2.0);
    row.l2_grad_u = std::sqrt(gx * gx + gy * gy);
    row.l2_ut = lq_norm(ut, 2.0);
    row.linf_u = linf_norm(u);
    row.energy = 0.5 * (row.l2_ut * row.l2_ut + row.l2_grad_u * row.l2_grad_u);
    row.weighted_energy = std::numeric_limits<double>::quiet_NaN();
    if (weights_ok) {
      try {
        row.weighted_energy = weighted_energy(ut, grad, t);
      } catch (const NumericError&) {
        // Overflow near a blow-up threshold: leave the column empty rather
        // than aborting a run that is otherwise proceeding normally.
      }
    }
    row.boundary_mass = boundary_shell_l2(u);
    outcome.series.rows.push_back(row);
  };

  // Row 0 uses the exact initial velocity.  Diagnostics can overflow on
  // extreme data even when the state itself is finite (l2 squares values);
  // that is a numeric failure of the run, not a crash.
  try {
    record(0.0, u0, u1);
  } catch (const NumericError&) {
    outcome.status = RunStatus::numeric_failure;
    return outcome;
  }
  if (observer) observer(0, 0.0, u0);
  if (outcome.series.rows[0].linf_u > cfg.blowup_threshold) {
    outcome.status = RunStatus::blew_up;
    outcome.t_blowup = 0.0;
    return outcome;
  }

  SolverState state(u0, u1, dt, linear, p);
  try {
    if (linf_norm(state.u_curr) > cfg.blowup_threshold) {
      outcome.status = RunStatus::blew_up;
      outcome.t_blowup = state.t;
      return outcome;
    }
  } catch (const NumericError&) {
    outcome.status = RunStatus::numeric_failure;
    return outcome;
  }
  if (observer) observer(1, state.t, state.u_curr);

  for (;;) {
    // Buffers hold u^{k-1}, u^k; compute u^{k+1} into scratch.
    const long k = state.step;
    compute_next(state, linear, p, 1.0);

    double next_linf;
    try {
      next_linf = linf_norm(state.scratch);
    } catch (const NumericError&) {
      outcome.status = RunStatus::numeric_failure;
      return outcome;
    }

    if (k % cfg.record_every == 0 || k == total_steps) {
      // Centered velocity at step k needs u^{k+1}; available right here.
      const std::vector<double>& vn = state.scratch.values;
      const std::vector<double>& vp = state.u_prev.values;
      const double i2dt = 1.0 / (2.0 * dt);
      for (std::size_t i = 0; i < vn.size(); ++i)
        ut_scratch.values[i] = (vn[i] - vp[i]) * i2dt;
      try {
        record(state.t, state.u_curr, ut_scratch);
      } catch (const NumericError&) {
        outcome.status = RunStatus::numeric_failure;
        return outcome;
      }
    }

    if (k == total_steps) break;  // horizon reached; u^{k+1} was only for u_t

    if (next_linf > cfg.blowup_threshold) {
      outcome.status = RunStatus::blew_up;
      outcome.t_blowup = static_cast<double>(k + 1) * dt;
      return outcome;
    }

    rotate(state);
    if (observer) observer(state.step, state.t, state.u_curr);
  }

  outcome.status = RunStatus::completed;
  return outcome;
}

}  // namespace hwave
