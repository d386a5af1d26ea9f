//! The differential game: agent kinematics, Hamiltonian, retrograde costate
//! integration from the zero terminal gradient, saddle-point heading control,
//! and the forward-backward sweep over the fixed energy-limited horizon.
//!
//! The agents move with simple planar kinematics `x' = u cos(theta)`,
//! `y' = u sin(theta)`. Because termination is fixed by the energy budget,
//! the value gradient vanishes on the terminal manifold, which gives the
//! boundary condition for the retrograde path equations. The kinematics are
//! state-independent, so the retrograde costate derivative reduces to the
//! position gradient of the outcome integrand; that gradient is derived
//! analytically by the chain rule through the SINR expressions and gated by
//! finite differences in the tests.

use crate::allocation::{nash_solve, AllocationProfile, PsneReport, SolverOptions};
use crate::channel::{
    link_budget, sinr_all_diag, AgentId, AgentLayout, PhysicalParams, SinrState, Team, LINKS,
};
use crate::error::{Error, Result};
use crate::modulation::{LinkCost, MqamScheme};

/// Value-function gradient with respect to the four planar positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Costate {
    /// `(J_x, J_y)` per agent in A1, A2, B1, B2 order.
    pub grad: [[f64; 2]; 4],
}

impl Costate {
    /// The terminal condition: the value gradient vanishes at termination.
    pub fn zero() -> Self {
        Self {
            grad: [[0.0; 2]; 4],
        }
    }

    pub fn of(&self, id: AgentId) -> [f64; 2] {
        self.grad[id.index()]
    }
}

/// Trajectory integration controls.
#[derive(Debug, Clone, Copy)]
pub struct GameOptions {
    /// Time step (s); must divide the horizon.
    pub dt: f64,
    /// Maximum forward-backward sweeps.
    pub sweeps_max: usize,
    /// Blend factor for heading updates, in (0, 1].
    pub control_relaxation: f64,
    /// Sweep convergence threshold on the largest heading change (rad).
    pub sweep_tol: f64,
}

impl GameOptions {
    /// Options with `steps` uniform time steps over the horizon.
    pub fn with_steps(params: &PhysicalParams, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Domain("step count must be positive".into()));
        }
        Ok(Self {
            dt: horizon(params) / steps as f64,
            sweeps_max: 50,
            control_relaxation: 0.5,
            sweep_tol: 1e-6,
        })
    }

    /// Number of steps over the horizon, validating that `dt` divides it.
    pub fn steps(&self, params: &PhysicalParams) -> Result<usize> {
        if !(self.dt > 0.0) {
            return Err(Error::Domain(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let t = horizon(params);
        let n = (t / self.dt).round();
        if n < 1.0 || (n * self.dt - t).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "dt {} does not divide the horizon {t}",
                self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// Trajectory generation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    /// Forward-backward sweep toward the saddle-point heading controls.
    Saddle,
    /// Forward-only baseline steering along the instantaneous payoff gradient.
    Myopic,
}

impl SimulationMode {
    pub fn label(&self) -> &'static str {
        match self {
            SimulationMode::Saddle => "saddle",
            SimulationMode::Myopic => "myopic",
        }
    }
}

/// One sampled instant of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub t: f64,
    pub positions: [[f64; 2]; 4],
    pub headings: [f64; 4],
    pub alloc: AllocationProfile,
    pub sinr: SinrState,
    /// BER of the link each agent receives, in agent order.
    pub ber: [f64; 4],
    pub team_payoff: f64,
    pub costate: Costate,
    /// Full equilibrium certificate at this step (sufficient condition and
    /// all convexity families).
    pub certified: bool,
    /// Whether the per-step allocation solve converged.
    pub nash_converged: bool,
    pub nash_iterations: usize,
    /// Whether any distance clamp fired at this step.
    pub clamped: bool,
}

/// A complete simulated trajectory.
#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub mode: SimulationMode,
    /// Forward-backward sweeps performed (1 for myopic runs).
    pub sweeps: usize,
    /// Whether the heading iteration met `sweep_tol` within `sweeps_max`.
    pub converged: bool,
    /// Constant per-agent speeds of the run.
    pub speeds: [f64; 4],
}

impl Trace {
    /// Outcome integral of `L` over the trajectory, by the trapezoidal rule.
    pub fn payoff_integral(&self, dt: f64) -> f64 {
        let mut sum = 0.0;
        for pair in self.records.windows(2) {
            sum += 0.5 * dt * (pair[0].team_payoff + pair[1].team_payoff);
        }
        sum
    }

    /// Largest |H| along the trajectory. A saddle condition on the
    /// Hamiltonian would drive this toward zero in a free-terminal-time
    /// game; with the energy-fixed horizon it is a soft diagnostic only
    /// and is reported, never enforced.
    pub fn isaacs_residual(&self) -> f64 {
        self.records
            .iter()
            .map(|rec| {
                let mut h = rec.team_payoff;
                for i in 0..4 {
                    let [jx, jy] = rec.costate.grad[i];
                    h += self.speeds[i]
                        * (jx * rec.headings[i].cos() + jy * rec.headings[i].sin());
                }
                h.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Fixed game horizon `T = E / P_max`: every agent transmits flat-out and all
/// batteries die together.
pub fn horizon(params: &PhysicalParams) -> f64 {
    params.energy / params.pmax
}

/// Advances all agents by `dt` along their current headings. The heading
/// field is constant over a step, so the 4th-order Runge-Kutta stages
/// coincide and the advance is the exact straight-line motion of length
/// `speed * dt`.
pub fn step_kinematics(layout: &AgentLayout, dt: f64) -> AgentLayout {
    let mut next = *layout;
    for i in 0..4 {
        let u = layout.speeds[i];
        let theta = layout.headings[i];
        next.positions[i][0] += u * dt * theta.cos();
        next.positions[i][1] += u * dt * theta.sin();
    }
    next
}

/// Gradient of the outcome integrand `L` with respect to every agent's
/// planar position, by the chain rule through each link's SINR. Returns the
/// eight components as `(dL/dx, dL/dy)` per agent, plus a flag reporting
/// whether any clamped distance entered the evaluation.
pub fn payoff_position_gradient(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    scheme: MqamScheme,
) -> ([[f64; 2]; 4], bool) {
    let mut grad = [[0.0; 2]; 4];
    let mut clamped = false;
    let alpha = params.alpha;
    let powers = [params.pmax; 4];

    for link in &LINKS {
        let budget = link_budget(link, layout, alloc, params, &powers);
        clamped |= budget.clamped;
        if budget.numerator == 0.0 {
            // the link carries no signal anywhere: its BER is constant
            continue;
        }
        let s = budget.sinr();
        let gp = scheme.g1(s);

        // signal path: ds/dd = -alpha s / d on the transmitter-receiver pair
        let ds_dd_sig = -alpha * s / budget.d_signal;
        accumulate_pair(
            &mut grad,
            layout,
            link.transmitter,
            link.receiver,
            budget.d_signal,
            link.sign * gp * ds_dd_sig,
        );

        // jamming paths: ds/dd = alpha s * term / (denominator * d)
        for (k, &jammer) in link.jammers.iter().enumerate() {
            if budget.jam_terms[k] == 0.0 {
                continue;
            }
            let ds_dd = alpha * s * budget.jam_terms[k] / (budget.denominator * budget.d_jam[k]);
            accumulate_pair(
                &mut grad,
                layout,
                jammer,
                link.receiver,
                budget.d_jam[k],
                link.sign * gp * ds_dd,
            );
        }
    }
    (grad, clamped)
}

/// Adds `weight * d(dist(i, j))/d(position)` to both endpoint gradients.
fn accumulate_pair(
    grad: &mut [[f64; 2]; 4],
    layout: &AgentLayout,
    i: AgentId,
    j: AgentId,
    dist: f64,
    weight: f64,
) {
    let pi = layout.position(i);
    let pj = layout.position(j);
    let dx = (pi[0] - pj[0]) / dist;
    let dy = (pi[1] - pj[1]) / dist;
    grad[i.index()][0] += weight * dx;
    grad[i.index()][1] += weight * dy;
    grad[j.index()][0] -= weight * dx;
    grad[j.index()][1] -= weight * dy;
}

/// One explicit Euler step of the retrograde path equations: integrating
/// backward from the zero terminal gradient, the state-independent kinematics
/// drop out and the retrograde derivative is the payoff position gradient.
pub fn costate_rpe_step(
    costate: &Costate,
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    scheme: MqamScheme,
    dt: f64,
) -> Costate {
    let (grad, _) = payoff_position_gradient(layout, alloc, params, scheme);
    let mut next = *costate;
    for (j, g) in next.grad.iter_mut().zip(grad.iter()) {
        j[0] += dt * g[0];
        j[1] += dt * g[1];
    }
    next
}

/// Saddle-point heading for `focal`: team A descends the value gradient,
/// team B ascends it. `None` when the costate vector vanishes and the
/// control is indeterminate; callers hold the previous heading.
pub fn optimal_heading(focal: AgentId, costate: &Costate) -> Option<f64> {
    let [jx, jy] = costate.of(focal);
    if jx == 0.0 && jy == 0.0 {
        return None;
    }
    Some(match focal.team() {
        Team::A => (-jy).atan2(-jx),
        Team::B => jy.atan2(jx),
    })
}

/// `H = L + grad(J) . f(x)` for the given candidate headings.
pub fn hamiltonian(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    costate: &Costate,
    headings: &[f64; 4],
    params: &PhysicalParams,
    scheme: MqamScheme,
) -> f64 {
    let mut h = crate::allocation::team_payoff(layout, alloc, params, scheme);
    for (i, &id) in AgentId::ALL.iter().enumerate() {
        let [jx, jy] = costate.of(id);
        let u = layout.speed(id);
        h += u * (jx * headings[i].cos() + jy * headings[i].sin());
    }
    h
}

/// Wraps an angle difference into (-pi, pi].
fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = x - two_pi * (x / two_pi).round();
    if w <= -std::f64::consts::PI {
        w += two_pi;
    }
    w
}

/// State produced by one forward pass.
struct ForwardPass {
    layouts: Vec<AgentLayout>,
    allocs: Vec<AllocationProfile>,
    reports: Vec<PsneReport>,
}

fn forward_pass(
    initial: &AgentLayout,
    headings: &[[f64; 4]],
    params: &PhysicalParams,
    scheme: MqamScheme,
    dt: f64,
    solver_opts: &SolverOptions,
) -> Result<ForwardPass> {
    let n = headings.len() - 1;
    let mut layouts = Vec::with_capacity(n + 1);
    let mut allocs = Vec::with_capacity(n + 1);
    let mut reports = Vec::with_capacity(n + 1);
    let mut layout = *initial;
    let mut warm = AllocationProfile::uniform();
    for (k, h) in headings.iter().enumerate() {
        layout.headings = *h;
        let (alloc, report) =
            nash_solve(&layout, params, scheme, &warm, solver_opts).map_err(|e| {
                Error::SweepStep {
                    step: k,
                    source: Box::new(e),
                }
            })?;
        warm = alloc;
        layouts.push(layout);
        allocs.push(alloc);
        reports.push(report);
        if k < n {
            layout = step_kinematics(&layout, dt);
        }
    }
    Ok(ForwardPass {
        layouts,
        allocs,
        reports,
    })
}

/// Retrograde costate integration over a stored forward pass; index k holds
/// the costate at time `k * dt`, with the terminal entry exactly zero.
fn backward_pass(
    pass: &ForwardPass,
    params: &PhysicalParams,
    scheme: MqamScheme,
    dt: f64,
) -> Vec<Costate> {
    let n = pass.layouts.len() - 1;
    let mut costates = vec![Costate::zero(); n + 1];
    for k in (0..n).rev() {
        costates[k] = costate_rpe_step(
            &costates[k + 1],
            &pass.layouts[k + 1],
            &pass.allocs[k + 1],
            params,
            scheme,
            dt,
        );
    }
    costates
}

#[allow(clippy::too_many_arguments)]
fn build_trace(
    pass: &ForwardPass,
    costates: &[Costate],
    params: &PhysicalParams,
    scheme: MqamScheme,
    dt: f64,
    mode: SimulationMode,
    sweeps: usize,
    converged: bool,
) -> Trace {
    let records = pass
        .layouts
        .iter()
        .zip(pass.allocs.iter())
        .zip(pass.reports.iter())
        .zip(costates.iter())
        .enumerate()
        .map(|(k, (((layout, alloc), report), costate))| {
            let (sinr, clamped) = sinr_all_diag(layout, alloc, params);
            let ber = [
                scheme.g(sinr.s_a1),
                scheme.g(sinr.s_a2),
                scheme.g(sinr.s_b1),
                scheme.g(sinr.s_b2),
            ];
            let team_payoff = ber[0] + ber[1] - ber[2] - ber[3];
            let certified =
                report.mqam_sufficient && report.hessian_ok_per_player.iter().all(|&b| b);
            TraceRecord {
                t: k as f64 * dt,
                positions: layout.positions,
                headings: layout.headings,
                alloc: *alloc,
                sinr,
                ber,
                team_payoff,
                costate: *costate,
                certified,
                nash_converged: report.converged,
                nash_iterations: report.iterations,
                clamped,
            }
        })
        .collect();
    Trace {
        records,
        mode,
        sweeps,
        converged,
        speeds: pass.layouts[0].speeds,
    }
}

/// Iterates forward state integration, backward costate integration, and
/// relaxed heading updates until the headings settle. Agents with zero speed
/// or zero costate hold their current heading; their control is
/// inconsequential or indeterminate respectively.
///
/// Returns the trace of the final forward pass; `converged` is false when
/// `sweeps_max` was exhausted first.
pub fn forward_backward_sweep(
    initial_layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
    game_opts: &GameOptions,
    solver_opts: &SolverOptions,
) -> Result<Trace> {
    let n = game_opts.steps(params)?;
    let dt = game_opts.dt;
    let mut headings = vec![initial_layout.headings; n + 1];

    let mut last: Option<(ForwardPass, Vec<Costate>)> = None;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < game_opts.sweeps_max {
        sweeps += 1;
        let pass = forward_pass(initial_layout, &headings, params, scheme, dt, solver_opts)?;
        let costates = backward_pass(&pass, params, scheme, dt);

        let mut max_change: f64 = 0.0;
        for (k, costate) in costates.iter().enumerate() {
            for (i, &agent) in AgentId::ALL.iter().enumerate() {
                if initial_layout.speeds[i] == 0.0 {
                    continue;
                }
                let Some(target) = optimal_heading(agent, costate) else {
                    continue;
                };
                let old = headings[k][i];
                let delta = game_opts.control_relaxation * wrap_angle(target - old);
                headings[k][i] = old + delta;
                max_change = max_change.max(delta.abs());
            }
        }

        last = Some((pass, costates));
        if max_change < game_opts.sweep_tol {
            converged = true;
            break;
        }
    }

    let (pass, costates) = last.expect("at least one sweep runs");
    Ok(build_trace(
        &pass,
        &costates,
        params,
        scheme,
        dt,
        SimulationMode::Saddle,
        sweeps,
        converged,
    ))
}

/// Forward-only baseline: at each step every agent steers along the
/// instantaneous payoff gradient (descent for team A, ascent for team B),
/// holding its previous heading where the gradient vanishes.
fn myopic_run(
    initial_layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
    game_opts: &GameOptions,
    solver_opts: &SolverOptions,
) -> Result<Trace> {
    let n = game_opts.steps(params)?;
    let dt = game_opts.dt;
    let mut layouts = Vec::with_capacity(n + 1);
    let mut allocs = Vec::with_capacity(n + 1);
    let mut reports = Vec::with_capacity(n + 1);
    let mut layout = *initial_layout;
    let mut warm = AllocationProfile::uniform();
    for k in 0..=n {
        let (alloc, report) =
            nash_solve(&layout, params, scheme, &warm, solver_opts).map_err(|e| {
                Error::SweepStep {
                    step: k,
                    source: Box::new(e),
                }
            })?;
        warm = alloc;
        let (grad, _) = payoff_position_gradient(&layout, &alloc, params, scheme);
        for (i, &agent) in AgentId::ALL.iter().enumerate() {
            let [gx, gy] = grad[i];
            if gx == 0.0 && gy == 0.0 {
                continue;
            }
            layout.headings[i] = match agent.team() {
                Team::A => (-gy).atan2(-gx),
                Team::B => gy.atan2(gx),
            };
        }
        layouts.push(layout);
        allocs.push(alloc);
        reports.push(report);
        if k < n {
            layout = step_kinematics(&layout, dt);
        }
    }
    let pass = ForwardPass {
        layouts,
        allocs,
        reports,
    };
    let costates = vec![Costate::zero(); n + 1];
    Ok(build_trace(
        &pass,
        &costates,
        params,
        scheme,
        dt,
        SimulationMode::Myopic,
        1,
        true,
    ))
}

/// Runs a full trajectory and emits one record per time step, terminating
/// exactly at the energy-fixed horizon.
pub fn simulate(
    initial_layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
    game_opts: &GameOptions,
    solver_opts: &SolverOptions,
    mode: SimulationMode,
) -> Result<Trace> {
    match mode {
        SimulationMode::Saddle => {
            forward_backward_sweep(initial_layout, params, scheme, game_opts, solver_opts)
        }
        SimulationMode::Myopic => myopic_run(initial_layout, params, scheme, game_opts, solver_opts),
    }
}
