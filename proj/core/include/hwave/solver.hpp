#pragma once

#include <functional>
#include <optional>

#include "hwave/diagnostics.hpp"
#include "hwave/grid_field.hpp"

namespace hwave {

struct SolverConfig {
  std::optional<double> p;   // absent: linear run (F = 0)
  std::optional<double> dt;  // absent: cfl_fraction * cfl_limit(grid)
  double t_end = 0.0;
  double cfl_fraction = 0.9;
  double blowup_threshold = 1e6;
  long record_every = 1;

  void validate() const;
};

enum class RunStatus { completed, blew_up, numeric_failure };

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  std::optional<double> t_blowup;  // present iff status == blew_up
  TimeSeries series;
};

/// dt_max = 2 / sqrt(Lambda), Lambda a Gershgorin bound on the spectral
/// radius of the discrete -Delta_H:
///   Lambda = 4/h_x^2 + 4/h_y^2 + r_max^2/h_tau^2
///          + 2 r_max (1/(h_x h_tau) + 1/(h_y h_tau)),
/// r_max = sqrt(L_x^2 + L_y^2).  Independent of cfl_fraction.
double cfl_limit(const GridSpec& grid);

/// Resolves cfg.dt, clamping the horizon: dt = min(requested, t_end).
double resolve_dt(const GridSpec& grid, const SolverConfig& cfg);

struct SolverState {
  Field u_prev;   // u^{k-1}
  Field u_curr;   // u^k
  Field scratch;  // workspace for the next iterate (valid only mid-step)
  double t = 0.0;
  long step = 0;
  double dt = 0.0;

  SolverState(const Field& u0, const Field& u1, double dt_, bool linear, double p);
};

/// Second-order Taylor start:
/// u^1 = u0 + dt u1 + (dt^2/2)(Delta_H u0 - u1 + F(u0)), state at t = dt.
SolverState init_state(const Field& u0, const Field& u1, const SolverConfig& cfg);

/// Leapfrog with implicit damping:
/// u^{k+1} = [2 u^k - (1 - dt/2) u^{k-1} + dt^2 (Delta_H u^k + F(u^k))] / (1 + dt/2).
/// Dirichlet boundary layers stay zero by construction of the stencil.
void step(SolverState& state, const SolverConfig& cfg);

/// Test hook: the undamped conservative core
/// u^{k+1} = 2 u^k - u^{k-1} + dt^2 Delta_H u^k (no damping, no F), which is
/// exactly time-reversible.
void conservative_step(SolverState& state);

/// Called after every accepted step with (step index, t, u).  Also called
/// once with (0, 0, u0) before stepping.
using StepObserver = std::function<void(long, double, const Field&)>;

/// Integrates to t_end, a blow-up threshold crossing, or numeric failure.
/// Records diagnostics every record_every steps plus the initial and final
/// states.  u_t in recorded rows is the centered difference
/// (u^{k+1} - u^{k-1}) / (2 dt); at t = 0 it is u1 itself.
RunOutcome run(const Field& u0, const Field& u1, const SolverConfig& cfg,
               const StepObserver& observer = {});

}  // namespace hwave
