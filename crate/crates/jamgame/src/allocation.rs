//! The instantaneous four-player power-allocation game.
//!
//! Each agent splits its power budget over a 3-simplex: one communication
//! fraction and two jamming fractions aimed at the opposing pair. Holding the
//! other three players fixed, every focal problem reduces to the same normal
//! form: minimize
//!
//! ```text
//!   g(a x0) - g(b / (c + x1)) - g(d / (e + x2))
//! ```
//!
//! over the simplex, where `g` is the BER cost. Team B's maximization
//! problems are negated into this form, so a single KKT case-enumeration
//! solver serves all four agents. Nash equilibria are computed by Gauss-Seidel
//! best-response sweeps and certified against the convexity conditions that
//! guarantee a unique pure-strategy equilibrium.

use crate::channel::{
    link_budget, sinr_all, sinr_all_with_powers, AgentId, AgentLayout, PhysicalParams, Team,
    LINKS,
};
use crate::error::{Error, Result};
use crate::modulation::{LinkCost, MqamScheme};
use rand::Rng;
use rand::SeedableRng;

/// Tolerance on the simplex-sum invariant.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point on the 3-simplex: nonnegative components summing to one.
///
/// Component 0 is the communication fraction; components 1 and 2 are the
/// jamming fractions against the opposing team's slot-0 and slot-1 agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex3([f64; 3]);

impl Simplex3 {
    pub fn new(components: [f64; 3]) -> Result<Self> {
        for &v in &components {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "simplex components must be nonnegative, got {components:?}"
                )));
            }
        }
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain(format!(
                "simplex components must sum to 1 within {SIMPLEX_TOL}, got {sum}"
            )));
        }
        Ok(Self(components))
    }

    pub fn uniform() -> Self {
        Self([1.0 / 3.0; 3])
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    /// Communication fraction.
    pub fn comm(&self) -> f64 {
        self.0[0]
    }

    /// Jamming fraction against the opposing agent in team slot `slot`.
    pub fn jam(&self, slot: usize) -> f64 {
        self.0[1 + slot]
    }

    pub fn infinity_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One simplex vector per agent, in A1, A2, B1, B2 order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationProfile {
    vectors: [Simplex3; 4],
}

impl AllocationProfile {
    pub fn new(vectors: [Simplex3; 4]) -> Self {
        Self { vectors }
    }

    /// Every agent at (1/3, 1/3, 1/3); the default solver start.
    pub fn uniform() -> Self {
        Self::new([Simplex3::uniform(); 4])
    }

    pub fn vector(&self, id: AgentId) -> Simplex3 {
        self.vectors[id.index()]
    }

    pub fn vectors(&self) -> [Simplex3; 4] {
        self.vectors
    }

    pub fn set_vector(&mut self, id: AgentId, v: Simplex3) {
        self.vectors[id.index()] = v;
    }

    /// Largest componentwise difference across all four vectors.
    pub fn infinity_distance(&self, other: &Self) -> f64 {
        self.vectors
            .iter()
            .zip(other.vectors.iter())
            .map(|(a, b)| a.infinity_distance(b))
            .fold(0.0, f64::max)
    }
}

/// Normal-form coefficients of one agent's subproblem: with focal simplex
/// vector `(x0, x1, x2)`, the three SINRs the agent influences are
/// `a x0`, `b / (c + x1)`, and `d / (e + x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalCoefficients {
    /// SINR per unit communication fraction on the team-mate link.
    pub a: f64,
    /// Numerator of the first jammed opposing link.
    pub b: f64,
    /// Denominator offset of the first jammed opposing link.
    pub c: f64,
    /// Numerator of the second jammed opposing link.
    pub d: f64,
    /// Denominator offset of the second jammed opposing link.
    pub e: f64,
}

impl FocalCoefficients {
    /// True when the focal problem is strictly convex over the whole simplex
    /// for M-QAM costs: each jamming condition reduces to
    /// `c + x1 > (beta/3) b`, whose worst case is at zero jamming fraction.
    /// A zero numerator makes the coordinate inert, which is harmless.
    pub fn certifies_convexity(&self, beta: f64) -> bool {
        (self.b == 0.0 || self.c > beta / 3.0 * self.b)
            && (self.d == 0.0 || self.e > beta / 3.0 * self.d)
    }
}

/// Options for the best-response and Nash solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Fixed-point tolerance on the profile change over a full sweep.
    pub tol: f64,
    /// Maximum Gauss-Seidel sweeps.
    pub max_sweeps: usize,
    /// Blend factor applied to each best-response update; 1 replaces outright.
    pub relaxation: f64,
    /// Bracket width at which edge bisection stops.
    pub bisect_tol: f64,
    pub newton_max_iter: usize,
    pub pgd_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 500,
            relaxation: 1.0,
            bisect_tol: 1e-12,
            newton_max_iter: 100,
            pgd_max_iter: 10_000,
        }
    }
}

/// Certification and convergence summary of a Nash solve.
#[derive(Debug, Clone, Copy)]
pub struct PsneReport {
    /// Convexity conditions per player, evaluated at the final profile.
    pub hessian_ok_per_player: [bool; 4],
    /// Whether the physical-parameter sufficient condition holds.
    pub mqam_sufficient: bool,
    pub lhs_30: f64,
    pub rhs_30: f64,
    pub converged: bool,
    /// Gauss-Seidel sweeps performed.
    pub iterations: usize,
    /// Whether the convexity conditions held at every visited iterate.
    pub certified_every_iterate: bool,
}

/// Per-player convexity conditions evaluated at a profile.
#[derive(Debug, Clone, Copy)]
pub struct ConvexityReport {
    /// Own-link curvature condition per player (always true for M-QAM).
    pub own_curvature: [bool; 4],
    /// First jamming condition per player.
    pub jam_first: [bool; 4],
    /// Second jamming condition per player.
    pub jam_second: [bool; 4],
}

impl ConvexityReport {
    pub fn per_player(&self) -> [bool; 4] {
        std::array::from_fn(|i| self.own_curvature[i] && self.jam_first[i] && self.jam_second[i])
    }

    pub fn all(&self) -> bool {
        self.per_player().iter().all(|&b| b)
    }
}

/// Result of one best-response solve.
#[derive(Debug, Clone, Copy)]
pub struct BestResponse {
    pub x: Simplex3,
    /// False when the focal convexity conditions could not be certified and
    /// the returned point is only the best candidate found.
    pub certified: bool,
}

/// Normal-form coefficients of `focal`'s subproblem given everyone else's
/// current allocation. The focal agent's own vector inside `others` is
/// ignored.
pub fn focal_coefficients(
    focal: AgentId,
    layout: &AgentLayout,
    others: &AllocationProfile,
    params: &PhysicalParams,
) -> FocalCoefficients {
    let powers = [params.pmax; 4];

    // Team-mate link: the link this agent transmits on. Its denominator is
    // built entirely from opposing jamming fractions.
    let mate_link = LINKS
        .iter()
        .find(|l| l.transmitter == focal)
        .expect("every agent transmits on exactly one link");
    let mate = link_budget(mate_link, layout, others, params, &powers);
    let a = params.pmax * mate.d_signal.powf(-params.alpha) / mate.denominator;

    // Jammed opposing links, in team-slot order so they line up with the
    // focal simplex slots.
    let mut bd = [0.0; 2];
    let mut ce = [0.0; 2];
    for (slot, &victim) in focal.opponents().iter().enumerate() {
        let link = LINKS
            .iter()
            .find(|l| l.receiver == victim)
            .expect("every agent receives on exactly one link");
        let budget = link_budget(link, layout, others, params, &powers);
        let focal_pos = link
            .jammers
            .iter()
            .position(|&j| j == focal)
            .expect("focal jams every opposing receiver");
        // Normalize by the focal jamming weight so the focal fraction enters
        // the denominator with unit coefficient.
        let weight = params.pmax * budget.d_jam[focal_pos].powf(-params.alpha);
        bd[slot] = budget.numerator / weight;
        ce[slot] = (budget.denominator - budget.jam_terms[focal_pos]) / weight;
    }

    FocalCoefficients {
        a,
        b: bd[0],
        c: ce[0],
        d: bd[1],
        e: ce[1],
    }
}

/// The focal minimand `g(a x0) - g(b/(c+x1)) - g(d/(e+x2))`.
///
/// For team A this is the player's objective from the outcome integrand; for
/// team B the coefficients already encode the negated maximand, so smaller is
/// better for every agent.
pub fn focal_payoff(x: &Simplex3, coeffs: &FocalCoefficients, scheme: MqamScheme) -> f64 {
    focal_payoff_with(x, coeffs, &scheme)
}

fn focal_payoff_with<C: LinkCost>(x: &Simplex3, co: &FocalCoefficients, cost: &C) -> f64 {
    let [x0, x1, x2] = x.as_array();
    cost.g(co.a * x0) - cost.g(co.b / (co.c + x1)) - cost.g(co.d / (co.e + x2))
}

/// The outcome integrand `L = g(s_a1) + g(s_a2) - g(s_b1) - g(s_b2)`.
pub fn team_payoff(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    scheme: MqamScheme,
) -> f64 {
    let s = sinr_all(layout, alloc, params);
    scheme.g(s.s_a1) + scheme.g(s.s_a2) - scheme.g(s.s_b1) - scheme.g(s.s_b2)
}

/// Verifies that the focal objective is strictly monotone in the focal
/// agent's own transmit power along `power_grid` (decreasing for team A's
/// minimand, increasing for team B's maximand), everything else held fixed.
///
/// This is a verification utility for the fixed-power result; the solvers
/// always transmit at `pmax`.
pub fn power_monotonicity_check(
    focal: AgentId,
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    scheme: MqamScheme,
    power_grid: &[f64],
) -> bool {
    power_monotonicity_check_with(focal, layout, alloc, params, &scheme, power_grid)
}

fn power_monotonicity_check_with<C: LinkCost>(
    focal: AgentId,
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    cost: &C,
    power_grid: &[f64],
) -> bool {
    debug_assert!(power_grid.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(power_grid.iter().all(|&p| p > 0.0 && p <= params.pmax));
    let objective = |p: f64| {
        let mut powers = [params.pmax; 4];
        powers[focal.index()] = p;
        let (s, _) = sinr_all_with_powers(layout, alloc, params, &powers);
        match focal.team() {
            Team::A => {
                cost.g(s.received_by(focal.teammate())) - cost.g(s.s_b1) - cost.g(s.s_b2)
            }
            Team::B => {
                cost.g(s.s_a1) + cost.g(s.s_a2) - cost.g(s.received_by(focal.teammate()))
            }
        }
    };
    let values: Vec<f64> = power_grid.iter().map(|&p| objective(p)).collect();
    values.windows(2).all(|w| match focal.team() {
        Team::A => w[1] < w[0],
        Team::B => w[1] > w[0],
    })
}

/// Diagonal of the focal Hessian at `x`. The focal problem separates, so the
/// Hessian is diagonal; strict convexity is equivalent to all entries being
/// positive.
pub fn hessian_diag(
    x: &Simplex3,
    coeffs: &FocalCoefficients,
    scheme: MqamScheme,
) -> Result<[f64; 3]> {
    let [x0, x1, x2] = x.as_array();
    let sinrs = [
        coeffs.a * x0,
        coeffs.b / (coeffs.c + x1),
        coeffs.d / (coeffs.e + x2),
    ];
    if sinrs.contains(&0.0) {
        return Err(Error::Singularity(format!(
            "Hessian is unbounded where a SINR vanishes (SINRs {sinrs:?})"
        )));
    }
    Ok(hessian_diag_unchecked(x, coeffs, &scheme))
}

fn hessian_diag_unchecked<C: LinkCost>(x: &Simplex3, co: &FocalCoefficients, cost: &C) -> [f64; 3] {
    let [x0, x1, x2] = x.as_array();
    let h0 = co.a * co.a * cost.g2(co.a * x0);
    let jam_entry = |num: f64, den_off: f64, frac: f64| {
        if num == 0.0 {
            return 0.0;
        }
        let den = den_off + frac;
        let s = num / den;
        -(num * num * cost.g2(s) + 2.0 * num * den * cost.g1(s)) / den.powi(4)
    };
    [
        h0,
        jam_entry(co.b, co.c, x1),
        jam_entry(co.d, co.e, x2),
    ]
}

/// Evaluates the six convexity-condition families at `profile` for all four
/// players: positive curvature on the own link and the two jamming-side
/// conditions per player.
pub fn convexity_conditions(
    profile: &AllocationProfile,
    layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
) -> ConvexityReport {
    let mut own = [false; 4];
    let mut jam1 = [false; 4];
    let mut jam2 = [false; 4];
    for (i, &agent) in AgentId::ALL.iter().enumerate() {
        let co = focal_coefficients(agent, layout, profile, params);
        let x = profile.vector(agent);
        // g'' > 0 holds unconditionally for the M-QAM cost: every factor is
        // positive. Zero SINR gives +inf and extreme SINR underflows the
        // exponential to 0, both of which count as satisfied.
        let s_own = co.a * x.comm();
        own[i] = scheme.g2(s_own) >= 0.0;
        let jam_ok = |num: f64, den_off: f64, frac: f64| {
            if num == 0.0 {
                return true;
            }
            let den = den_off + frac;
            let s = num / den;
            scheme.g2(s) + 2.0 / num * den * scheme.g1(s) < 0.0
        };
        jam1[i] = jam_ok(co.b, co.c, x.jam(0));
        jam2[i] = jam_ok(co.d, co.e, x.jam(1));
    }
    ConvexityReport {
        own_curvature: own,
        jam_first: jam1,
        jam_second: jam2,
    }
}

/// The physical-parameter sufficient condition for a unique pure-strategy
/// equilibrium: `beta * rho * pmax * d_intra^(-alpha) < 3 sigma`, evaluated
/// per team (each team's conditions involve the opposing team's internal
/// link) and reported conservatively as the larger left-hand side.
pub fn mqam_sufficient_condition(
    layout: &AgentLayout,
    params: &PhysicalParams,
) -> (bool, f64, f64) {
    let beta = params.scheme().beta();
    let d_intra_a = layout.distance_clamped(AgentId::A1, AgentId::A2).0;
    let d_intra_b = layout.distance_clamped(AgentId::B1, AgentId::B2).0;
    // Team A's conditions bound the jammed B-team link; team B's bound the
    // A-team link.
    let lhs_team_a = beta * params.rho_b() * params.pmax * d_intra_b.powf(-params.alpha);
    let lhs_team_b = beta * params.rho_a() * params.pmax * d_intra_a.powf(-params.alpha);
    let lhs = lhs_team_a.max(lhs_team_b);
    let rhs = 3.0 * params.sigma;
    (lhs < rhs, lhs, rhs)
}

// ---------------------------------------------------------------------------
// Best response by KKT case enumeration
// ---------------------------------------------------------------------------

/// Partial derivative of the focal minimand w.r.t. the communication
/// fraction; diverges to -inf as `x0 -> 0`.
fn grad_comm<C: LinkCost>(co: &FocalCoefficients, cost: &C, x0: f64) -> f64 {
    co.a * cost.g1(co.a * x0)
}

/// Partial derivative w.r.t. a jamming fraction; zero when the link
/// numerator vanishes (the coordinate is inert).
fn grad_jam<C: LinkCost>(num: f64, den_off: f64, cost: &C, frac: f64) -> f64 {
    if num == 0.0 {
        return 0.0;
    }
    let den = den_off + frac;
    num * cost.g1(num / den) / (den * den)
}

/// Finds the root of the strictly increasing edge derivative `phi` on [0, 1]
/// by bisection, or `None` when the minimum sits at an endpoint.
fn bisect_edge<F: Fn(f64) -> f64>(
    phi: F,
    bisect_tol: f64,
    max_iter: usize,
    context: &str,
) -> Result<Option<f64>> {
    let phi_lo = phi(0.0);
    let phi_hi = phi(1.0);
    if !(phi_lo < 0.0) || !(phi_hi > 0.0) {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..max_iter {
        if hi - lo <= bisect_tol {
            return Ok(Some(0.5 * (lo + hi)));
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFinding {
        context: context.into(),
        residual: hi - lo,
        iterations: max_iter,
    })
}

/// Damped Newton on the interior stationarity system
/// `grad_jam1(x1) = grad_comm(x0)` and `grad_jam2(x2) = grad_comm(x0)` with
/// `x0 = 1 - x1 - x2`. Returns `None` when the iteration leaves the simplex
/// or stalls.
fn interior_newton<C: LinkCost>(
    co: &FocalCoefficients,
    cost: &C,
    opts: &SolverOptions,
) -> Option<Simplex3> {
    if co.b == 0.0 || co.d == 0.0 {
        // An inert jamming coordinate cannot satisfy interior stationarity:
        // its zero marginal value never matches the comm gradient.
        return None;
    }
    let eval = |u: f64, v: f64| -> (f64, f64, f64) {
        let x0 = 1.0 - u - v;
        let p0 = grad_comm(co, cost, x0);
        (grad_jam(co.b, co.c, cost, u) - p0, grad_jam(co.d, co.e, cost, v) - p0, p0)
    };
    let mut u = 1.0 / 3.0;
    let mut v = 1.0 / 3.0;
    let (mut g1, mut g2, mut p0) = eval(u, v);
    for _ in 0..opts.newton_max_iter {
        let res = g1.abs().max(g2.abs());
        let scale = 1.0 + p0.abs();
        if res < 1e-12 * scale {
            let x0 = 1.0 - u - v;
            return Simplex3::new([x0, u, v]).ok();
        }
        let x = Simplex3::new([(1.0 - u - v).max(0.0), u, v]).ok()?;
        let h = hessian_diag_unchecked(&x, co, cost);
        let (h0, h1, h2) = (h[0], h[1], h[2]);
        // J = [[h1 + h0, h0], [h0, h2 + h0]]
        let det = (h1 + h0) * (h2 + h0) - h0 * h0;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let du = -((h2 + h0) * g1 - h0 * g2) / det;
        let dv = -((h1 + h0) * g2 - h0 * g1) / det;

        // Step halving: stay strictly inside the simplex and decrease the
        // residual.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (nu, nv) = (u + step * du, v + step * dv);
            if nu > 0.0 && nv > 0.0 && nu + nv < 1.0 {
                let (ng1, ng2, np0) = eval(nu, nv);
                if ng1.abs().max(ng2.abs()) < res {
                    u = nu;
                    v = nv;
                    g1 = ng1;
                    g2 = ng2;
                    p0 = np0;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Euclidean projection onto the 3-simplex.
fn project_simplex(y: [f64; 3]) -> [f64; 3] {
    let mut sorted = y;
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &val) in sorted.iter().enumerate() {
        cum += val;
        let t = (cum - 1.0) / (k as f64 + 1.0);
        if k + 1 == sorted.len() || sorted[k + 1] <= t {
            theta = t;
            break;
        }
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (y[i] - theta).max(0.0);
    }
    out
}

/// Projected gradient descent with Armijo backtracking; robust fallback for
/// the interior case.
fn projected_gradient<C: LinkCost>(
    co: &FocalCoefficients,
    cost: &C,
    opts: &SolverOptions,
) -> Option<Simplex3> {
    let grad = |x: &[f64; 3]| -> [f64; 3] {
        [
            grad_comm(co, cost, x[0]).clamp(-1e12, 1e12),
            grad_jam(co.b, co.c, cost, x[1]).clamp(-1e12, 1e12),
            grad_jam(co.d, co.e, cost, x[2]).clamp(-1e12, 1e12),
        ]
    };
    let value = |x: &[f64; 3]| -> f64 {
        cost.g(co.a * x[0]) - cost.g(co.b / (co.c + x[1])) - cost.g(co.d / (co.e + x[2]))
    };
    let mut x = [1.0 / 3.0; 3];
    let mut fx = value(&x);
    for _ in 0..opts.pgd_max_iter {
        let g = grad(&x);
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand = project_simplex([x[0] - step * g[0], x[1] - step * g[1], x[2] - step * g[2]]);
            let decrease: f64 = g
                .iter()
                .zip(cand.iter().zip(x.iter()))
                .map(|(gi, (ci, xi))| gi * (ci - xi))
                .sum();
            let fc = value(&cand);
            if fc <= fx + 1e-4 * decrease {
                let delta = cand
                    .iter()
                    .zip(x.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                x = cand;
                fx = fc;
                moved = true;
                if delta < 1e-13 {
                    return Simplex3::new(x).ok();
                }
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Simplex3::new(x).ok()
}

/// Minimizes the focal problem over the simplex by enumerating the seven KKT
/// candidate sets: three vertices, three edge stationary points found by
/// bisection, and the interior stationary point found by damped Newton (with
/// a projected-gradient fallback). All feasible candidates are evaluated and
/// the best taken.
pub fn best_response(
    coeffs: &FocalCoefficients,
    scheme: MqamScheme,
    opts: &SolverOptions,
) -> Result<BestResponse> {
    let certified = coeffs.certifies_convexity(scheme.beta());
    let x = best_response_with(coeffs, &scheme, opts, certified)?;
    Ok(BestResponse { x, certified })
}

fn best_response_with<C: LinkCost>(
    co: &FocalCoefficients,
    cost: &C,
    opts: &SolverOptions,
    certified: bool,
) -> Result<Simplex3> {
    let mut candidates: Vec<Simplex3> = vec![
        Simplex3::new([1.0, 0.0, 0.0]).unwrap(),
        Simplex3::new([0.0, 1.0, 0.0]).unwrap(),
        Simplex3::new([0.0, 0.0, 1.0]).unwrap(),
    ];

    // Edge with x0 = 0: balance the two jamming gradients.
    if let Some(t) = bisect_edge(
        |t| grad_jam(co.b, co.c, cost, t) - grad_jam(co.d, co.e, cost, 1.0 - t),
        opts.bisect_tol,
        200,
        "edge x0=0",
    )? {
        candidates.push(Simplex3::new([0.0, t, 1.0 - t])?);
    }
    // Edge with x1 = 0: balance the second jamming gradient against comm.
    if let Some(t) = bisect_edge(
        |t| grad_jam(co.d, co.e, cost, t) - grad_comm(co, cost, 1.0 - t),
        opts.bisect_tol,
        200,
        "edge x1=0",
    )? {
        candidates.push(Simplex3::new([1.0 - t, 0.0, t])?);
    }
    // Edge with x2 = 0: balance the first jamming gradient against comm.
    if let Some(t) = bisect_edge(
        |t| grad_jam(co.b, co.c, cost, t) - grad_comm(co, cost, 1.0 - t),
        opts.bisect_tol,
        200,
        "edge x2=0",
    )? {
        candidates.push(Simplex3::new([1.0 - t, t, 0.0])?);
    }
    // Interior stationary point.
    match interior_newton(co, cost, opts) {
        Some(x) => candidates.push(x),
        None => {
            if !certified {
                // Without a convexity certificate the enumeration may miss
                // the constrained minimum; add the projected-gradient point.
                if let Some(x) = projected_gradient(co, cost, opts) {
                    candidates.push(x);
                }
            }
        }
    }

    let mut best = candidates[0];
    let mut best_val = focal_payoff_with(&best, co, cost);
    for cand in &candidates[1..] {
        let val = focal_payoff_with(cand, co, cost);
        if val < best_val {
            best = *cand;
            best_val = val;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Gauss-Seidel Nash iteration
// ---------------------------------------------------------------------------

/// Computes a pure-strategy Nash equilibrium of the allocation game by
/// Gauss-Seidel best-response sweeps in fixed A1, A2, B1, B2 order.
///
/// Errors with the last profile and oscillation diagnostics when the sweep
/// limit is exhausted before the profile change drops below `opts.tol`.
pub fn nash_solve(
    layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
    init: &AllocationProfile,
    opts: &SolverOptions,
) -> Result<(AllocationProfile, PsneReport)> {
    let mut profile = *init;
    let mut certified_every_iterate = convexity_conditions(&profile, layout, params, scheme).all();
    let mut prev_change = f64::INFINITY;
    let mut last_change = f64::INFINITY;

    for sweep in 1..=opts.max_sweeps {
        let mut change: f64 = 0.0;
        for &agent in &AgentId::ALL {
            let co = focal_coefficients(agent, layout, &profile, params);
            let br = best_response(&co, scheme, opts)?;
            let old = profile.vector(agent);
            let new = if opts.relaxation >= 1.0 {
                br.x
            } else {
                blend(&old, &br.x, opts.relaxation)
            };
            change = change.max(old.infinity_distance(&new));
            profile.set_vector(agent, new);
            certified_every_iterate &=
                convexity_conditions(&profile, layout, params, scheme).all();
        }
        prev_change = last_change;
        last_change = change;
        if change < opts.tol {
            let conditions = convexity_conditions(&profile, layout, params, scheme);
            let (mqam_sufficient, lhs_30, rhs_30) = mqam_sufficient_condition(layout, params);
            return Ok((
                profile,
                PsneReport {
                    hessian_ok_per_player: conditions.per_player(),
                    mqam_sufficient,
                    lhs_30,
                    rhs_30,
                    converged: true,
                    iterations: sweep,
                    certified_every_iterate,
                },
            ));
        }
    }

    Err(Error::NashNonConvergence {
        sweeps: opts.max_sweeps,
        last_change,
        prev_change,
        last_profile: Box::new(profile),
    })
}

fn blend(old: &Simplex3, new: &Simplex3, relaxation: f64) -> Simplex3 {
    let o = old.as_array();
    let n = new.as_array();
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (1.0 - relaxation) * o[i] + relaxation * n[i];
    }
    Simplex3::new(out).expect("convex combination of simplex points")
}

/// Checks the no-profitable-unilateral-deviation property by sampling
/// `n_samples` uniform simplex deviations per player. Deterministic: the
/// sampler is seeded internally.
pub fn verify_nash(
    profile: &AllocationProfile,
    layout: &AgentLayout,
    params: &PhysicalParams,
    scheme: MqamScheme,
    n_samples: usize,
    tol: f64,
) -> bool {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7665_7269_6679);
    for &agent in &AgentId::ALL {
        let co = focal_coefficients(agent, layout, profile, params);
        let own = focal_payoff(&profile.vector(agent), &co, scheme);
        for _ in 0..n_samples {
            let deviation = sample_simplex(&mut rng);
            if focal_payoff(&deviation, &co, scheme) < own - tol {
                return false;
            }
        }
    }
    true
}

/// Uniform sample from the 3-simplex via normalized exponentials.
pub(crate) fn sample_simplex<R: Rng>(rng: &mut R) -> Simplex3 {
    let mut raw = [0.0; 3];
    for r in &mut raw {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        *r = -u.ln();
    }
    let sum: f64 = raw.iter().sum();
    Simplex3::new([raw[0] / sum, raw[1] / sum, raw[2] / sum])
        .expect("normalized exponentials lie on the simplex")
}
