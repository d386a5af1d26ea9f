//! Physical-layer arithmetic: path-loss gain, received power, and the four
//! link SINRs as functions of geometry and power allocations.
//!
//! Each team runs one internal communication link per direction (agent 1
//! receives from agent 2 and vice versa) while both opposing agents jam the
//! receiver. The path gain used for every term of a receiver's SINR — signal
//! and jamming alike — is computed with the receiving team's wavelength: a
//! jammer is assumed to tune its waveform to the victim's carrier.

use crate::allocation::AllocationProfile;
use crate::error::{Error, Result};

/// Propagation constant used when converting carrier frequency to wavelength.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Distances below this are clamped before evaluating `d^(-alpha)`.
pub const D_MIN: f64 = 1e-3;

/// The four mobile agents, two per team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentId {
    A1,
    A2,
    B1,
    B2,
}

/// Team labels; team A minimizes the outcome, team B maximizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Team {
    A,
    B,
}

impl AgentId {
    pub const ALL: [AgentId; 4] = [AgentId::A1, AgentId::A2, AgentId::B1, AgentId::B2];

    pub fn team(self) -> Team {
        match self {
            AgentId::A1 | AgentId::A2 => Team::A,
            AgentId::B1 | AgentId::B2 => Team::B,
        }
    }

    /// Storage index in fixed A1, A2, B1, B2 order.
    pub fn index(self) -> usize {
        match self {
            AgentId::A1 => 0,
            AgentId::A2 => 1,
            AgentId::B1 => 2,
            AgentId::B2 => 3,
        }
    }

    /// Position within the agent's own team: 0 for A1/B1, 1 for A2/B2.
    pub fn team_slot(self) -> usize {
        match self {
            AgentId::A1 | AgentId::B1 => 0,
            AgentId::A2 | AgentId::B2 => 1,
        }
    }

    pub fn teammate(self) -> AgentId {
        match self {
            AgentId::A1 => AgentId::A2,
            AgentId::A2 => AgentId::A1,
            AgentId::B1 => AgentId::B2,
            AgentId::B2 => AgentId::B1,
        }
    }

    /// Opposing agents in team-slot order (slot-0 agent first).
    pub fn opponents(self) -> [AgentId; 2] {
        match self.team() {
            Team::A => [AgentId::B1, AgentId::B2],
            Team::B => [AgentId::A1, AgentId::A2],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AgentId::A1 => "a1",
            AgentId::A2 => "a2",
            AgentId::B1 => "b1",
            AgentId::B2 => "b2",
        }
    }
}

/// All radio and energy constants of the engagement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Peak instantaneous transmit power (W).
    pub pmax: f64,
    /// Per-agent energy budget (J); fixes the horizon at `energy / pmax`.
    pub energy: f64,
    /// Ambient noise power (W).
    pub sigma: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Transmit antenna gain.
    pub gt: f64,
    /// Receive antenna gain.
    pub gr: f64,
    /// Wavelength of team A's communication band (m).
    pub lambda_a: f64,
    /// Wavelength of team B's communication band (m).
    pub lambda_b: f64,
    /// M-QAM constellation size.
    pub modulation_size: u32,
}

impl PhysicalParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pmax: f64,
        energy: f64,
        sigma: f64,
        alpha: f64,
        gt: f64,
        gr: f64,
        lambda_a: f64,
        lambda_b: f64,
        modulation_size: u32,
    ) -> Result<Self> {
        for (name, v) in [
            ("pmax", pmax),
            ("energy", energy),
            ("sigma", sigma),
            ("alpha", alpha),
            ("gt", gt),
            ("gr", gr),
            ("lambda_a", lambda_a),
            ("lambda_b", lambda_b),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        crate::modulation::MqamScheme::new(modulation_size)?;
        Ok(Self {
            pmax,
            energy,
            sigma,
            alpha,
            gt,
            gr,
            lambda_a,
            lambda_b,
            modulation_size,
        })
    }

    pub fn scheme(&self) -> crate::modulation::MqamScheme {
        crate::modulation::MqamScheme::new(self.modulation_size)
            .expect("modulation size validated at construction")
    }

    /// Path gain of team A's band.
    pub fn rho_a(&self) -> f64 {
        rho(self.gt, self.gr, self.lambda_a).expect("gains validated at construction")
    }

    /// Path gain of team B's band.
    pub fn rho_b(&self) -> f64 {
        rho(self.gt, self.gr, self.lambda_b).expect("gains validated at construction")
    }

    pub fn rho_for(&self, team: Team) -> f64 {
        match team {
            Team::A => self.rho_a(),
            Team::B => self.rho_b(),
        }
    }
}

/// `lambda = c / f`.
pub fn wavelength_from_frequency(freq_hz: f64) -> Result<f64> {
    if !(freq_hz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {freq_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / freq_hz)
}

/// Planar positions, headings, and speeds of the four agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentLayout {
    /// (x, y) per agent in A1, A2, B1, B2 order (m).
    pub positions: [[f64; 2]; 4],
    /// Heading per agent (rad).
    pub headings: [f64; 4],
    /// Speed per agent (m/s), nonnegative.
    pub speeds: [f64; 4],
}

impl AgentLayout {
    pub fn new(positions: [[f64; 2]; 4], headings: [f64; 4], speeds: [f64; 4]) -> Result<Self> {
        for (i, &u) in speeds.iter().enumerate() {
            if !(u >= 0.0) || !u.is_finite() {
                return Err(Error::Domain(format!(
                    "speed of {} must be nonnegative, got {u}",
                    AgentId::ALL[i].label()
                )));
            }
        }
        for p in positions.iter().chain(std::iter::once(&[0.0, 0.0])) {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::Domain("positions must be finite".into()));
            }
        }
        Ok(Self {
            positions,
            headings,
            speeds,
        })
    }

    pub fn position(&self, id: AgentId) -> [f64; 2] {
        self.positions[id.index()]
    }

    pub fn heading(&self, id: AgentId) -> f64 {
        self.headings[id.index()]
    }

    pub fn speed(&self, id: AgentId) -> f64 {
        self.speeds[id.index()]
    }

    /// Euclidean distance between two agents; exactly symmetric in its
    /// arguments.
    pub fn distance(&self, i: AgentId, j: AgentId) -> f64 {
        let p = self.position(i);
        let q = self.position(j);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }

    /// Distance clamped to `D_MIN`; the flag reports whether clamping fired.
    pub fn distance_clamped(&self, i: AgentId, j: AgentId) -> (f64, bool) {
        let d = self.distance(i, j);
        if d < D_MIN {
            (D_MIN, true)
        } else {
            (d, false)
        }
    }

    /// True when every pairwise distance is at least `D_MIN`.
    pub fn well_separated(&self) -> bool {
        let ids = AgentId::ALL;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.distance(ids[i], ids[j]) < D_MIN {
                    return false;
                }
            }
        }
        true
    }
}

/// The four link SINRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrState {
    /// SINR of the A2 -> A1 link.
    pub s_a1: f64,
    /// SINR of the A1 -> A2 link.
    pub s_a2: f64,
    /// SINR of the B2 -> B1 link.
    pub s_b1: f64,
    /// SINR of the B1 -> B2 link.
    pub s_b2: f64,
}

impl SinrState {
    /// SINR of the link received by `id`.
    pub fn received_by(&self, id: AgentId) -> f64 {
        match id {
            AgentId::A1 => self.s_a1,
            AgentId::A2 => self.s_a2,
            AgentId::B1 => self.s_b1,
            AgentId::B2 => self.s_b2,
        }
    }
}

/// Free-space path gain `rho = G_T G_R lambda^2 / (4 pi)^2`.
pub fn rho(gt: f64, gr: f64, lambda: f64) -> Result<f64> {
    for (name, v) in [("gt", gt), ("gr", gr), ("lambda", lambda)] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(gt * gr * lambda * lambda / (four_pi * four_pi))
}

/// Received signal power `rho * P_T * d^(-alpha)`.
///
/// Distances below `D_MIN` are clamped; the returned flag reports the clamp.
pub fn received_power(pt: f64, rho: f64, d: f64, alpha: f64) -> Result<(f64, bool)> {
    if !(pt >= 0.0) {
        return Err(Error::Domain(format!(
            "transmit power must be nonnegative, got {pt}"
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let (d, clamped) = if d < D_MIN { (D_MIN, true) } else { (d, false) };
    Ok((rho * pt * d.powf(-alpha), clamped))
}

/// One directed communication link and the agents that interact with it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Link {
    pub receiver: AgentId,
    pub transmitter: AgentId,
    /// The opposing pair, in team-slot order.
    pub jammers: [AgentId; 2],
    /// Sign of this link's BER in the outcome integrand `L`.
    pub sign: f64,
}

/// The four links in s_a1, s_a2, s_b1, s_b2 order.
pub(crate) const LINKS: [Link; 4] = [
    Link {
        receiver: AgentId::A1,
        transmitter: AgentId::A2,
        jammers: [AgentId::B1, AgentId::B2],
        sign: 1.0,
    },
    Link {
        receiver: AgentId::A2,
        transmitter: AgentId::A1,
        jammers: [AgentId::B1, AgentId::B2],
        sign: 1.0,
    },
    Link {
        receiver: AgentId::B1,
        transmitter: AgentId::B2,
        jammers: [AgentId::A1, AgentId::A2],
        sign: -1.0,
    },
    Link {
        receiver: AgentId::B2,
        transmitter: AgentId::B1,
        jammers: [AgentId::A1, AgentId::A2],
        sign: -1.0,
    },
];

/// Numerator and denominator of one link's SINR, kept separate so callers can
/// reuse the pieces (focal-coefficient extraction, position gradients).
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinkBudget {
    /// `P_tx * comm_fraction * d_signal^(-alpha)`.
    pub numerator: f64,
    /// `sigma / rho + sum of jamming terms`.
    pub denominator: f64,
    /// Signal distance after clamping.
    pub d_signal: f64,
    /// Jamming distances after clamping, in `link.jammers` order.
    pub d_jam: [f64; 2],
    /// Jamming terms `P_jam * fraction * d^(-alpha)`, in `link.jammers` order.
    pub jam_terms: [f64; 2],
    pub clamped: bool,
}

impl LinkBudget {
    pub fn sinr(&self) -> f64 {
        self.numerator / self.denominator
    }
}

pub(crate) fn link_budget(
    link: &Link,
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    powers: &[f64; 4],
) -> LinkBudget {
    let alpha = params.alpha;
    let rho = params.rho_for(link.receiver.team());
    let (d_signal, mut clamped) = layout.distance_clamped(link.transmitter, link.receiver);
    let comm = alloc.vector(link.transmitter).comm();
    let numerator = powers[link.transmitter.index()] * comm * d_signal.powf(-alpha);

    let slot = link.receiver.team_slot();
    let mut denominator = params.sigma / rho;
    let mut d_jam = [0.0; 2];
    let mut jam_terms = [0.0; 2];
    for (k, &jammer) in link.jammers.iter().enumerate() {
        let (d, c) = layout.distance_clamped(jammer, link.receiver);
        clamped |= c;
        d_jam[k] = d;
        let term = powers[jammer.index()] * alloc.vector(jammer).jam(slot) * d.powf(-alpha);
        jam_terms[k] = term;
        denominator += term;
    }
    LinkBudget {
        numerator,
        denominator,
        d_signal,
        d_jam,
        jam_terms,
        clamped,
    }
}

/// The four SINRs with per-agent transmit powers. Used by the power
/// monotonicity check; everywhere else the power is pinned at `pmax`.
pub(crate) fn sinr_all_with_powers(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
    powers: &[f64; 4],
) -> (SinrState, bool) {
    let mut s = [0.0; 4];
    let mut clamped = false;
    for (k, link) in LINKS.iter().enumerate() {
        let budget = link_budget(link, layout, alloc, params, powers);
        s[k] = budget.sinr();
        clamped |= budget.clamped;
    }
    (
        SinrState {
            s_a1: s[0],
            s_a2: s[1],
            s_b1: s[2],
            s_b2: s[3],
        },
        clamped,
    )
}

/// The four link SINRs at full transmit power on every agent.
pub fn sinr_all(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
) -> SinrState {
    sinr_all_with_powers(layout, alloc, params, &[params.pmax; 4]).0
}

/// As [`sinr_all`] but also reports whether any distance clamp fired.
pub fn sinr_all_diag(
    layout: &AgentLayout,
    alloc: &AllocationProfile,
    params: &PhysicalParams,
) -> (SinrState, bool) {
    sinr_all_with_powers(layout, alloc, params, &[params.pmax; 4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{AllocationProfile, Simplex3};
    use rand::{Rng, SeedableRng};

    fn params_with(sigma: f64, lambda_a: f64, lambda_b: f64) -> PhysicalParams {
        PhysicalParams::new(100.0, 100.0, sigma, 2.0, 1.0, 1.0, lambda_a, lambda_b, 2).unwrap()
    }

    fn square_layout(side: f64) -> AgentLayout {
        AgentLayout::new(
            [[0.0, 0.0], [side, 0.0], [0.0, side], [side, side]],
            [0.0; 4],
            [1.0; 4],
        )
        .unwrap()
    }

    fn uniform_profile() -> AllocationProfile {
        let v = Simplex3::new([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        AllocationProfile::new([v; 4])
    }

    #[test]
    fn rho_reproduces_paper_value() {
        let r = rho(1.0, 1.0, 0.33).unwrap();
        assert!((r - 6.896e-4).abs() / 6.896e-4 < 1e-3, "rho = {r}");
        // exact evaluation frozen from an independent computation
        assert!((r - 6.896173061656615e-4).abs() < 1e-18);
    }

    #[test]
    fn rho_cancellation_and_hand_value() {
        assert!((rho(1.0, 1.0, 4.0 * std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
        let r = rho(2.0, 3.0, 0.5).unwrap();
        assert!((r - 9.498860966469166e-3).abs() < 1e-17, "rho = {r}");
        assert!(rho(0.0, 1.0, 1.0).is_err());
        assert!(rho(1.0, -2.0, 1.0).is_err());
        assert!(rho(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn received_power_examples() {
        assert!((received_power(100.0, 1.0, 1.0, 2.0).unwrap().0 - 100.0).abs() < 1e-12);
        let (p, clamped) = received_power(100.0, 6.896e-4, 10.0, 2.0).unwrap();
        assert!((p - 6.896e-4).abs() < 1e-15);
        assert!(!clamped);
        assert_eq!(received_power(0.0, 1.0, 5.0, 2.0).unwrap().0, 0.0);
        // below D_MIN the distance clamps and the flag reports it
        let (p, clamped) = received_power(1.0, 1.0, 1e-6, 2.0).unwrap();
        assert!(clamped);
        assert!((p - 1e6).abs() < 1e-6);
        assert!(received_power(-1.0, 1.0, 1.0, 2.0).is_err());
        assert!(received_power(1.0, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn distance_symmetry_exact() {
        let layout = AgentLayout::new(
            [[0.3, -1.7], [2.9, 4.1], [-3.3, 0.2], [7.7, -2.2]],
            [0.0; 4],
            [0.0; 4],
        )
        .unwrap();
        for &i in &AgentId::ALL {
            for &j in &AgentId::ALL {
                assert_eq!(layout.distance(i, j), layout.distance(j, i));
            }
        }
    }

    #[test]
    fn sinr_interference_free() {
        // Team B jams nothing; team A communicates at full fraction.
        let layout = square_layout(10.0);
        let params = params_with(0.01, 0.33, 0.5);
        let comm_only = Simplex3::new([1.0, 0.0, 0.0]).unwrap();
        let alloc = AllocationProfile::new([comm_only; 4]);
        let s = sinr_all(&layout, &alloc, &params);
        let expected = params.pmax * params.rho_a() * 10.0_f64.powf(-2.0) / params.sigma;
        assert!((s.s_a1 - expected).abs() < 1e-12 * expected);
        assert!((s.s_a2 - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn sinr_square_hand_expansion() {
        // Frozen from an independent spreadsheet-style evaluation:
        // square side 10, all agents at (1/3,1/3,1/3), pmax=100, sigma=0.01,
        // alpha=2, lambda_a=0.33, lambda_b=0.5.
        let layout = square_layout(10.0);
        let params = params_with(0.01, 0.33, 0.5);
        let s = sinr_all(&layout, &uniform_profile(), &params);
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        assert!(rel(s.s_a1, 0.022221042756556942) < 1e-12, "{}", s.s_a1);
        assert!(rel(s.s_a2, 0.022221042756556942) < 1e-12);
        assert!(rel(s.s_b1, 0.04890061526707782) < 1e-12, "{}", s.s_b1);
        assert!(rel(s.s_b2, 0.04890061526707782) < 1e-12);
    }

    #[test]
    fn sinr_homogeneous_in_power_and_noise() {
        let layout = square_layout(10.0);
        let alloc = uniform_profile();
        let p1 = params_with(0.01, 0.33, 0.5);
        let mut p2 = p1;
        p2.pmax *= 37.5;
        p2.sigma *= 37.5;
        let s1 = sinr_all(&layout, &alloc, &p1);
        let s2 = sinr_all(&layout, &alloc, &p2);
        for (a, b) in [
            (s1.s_a1, s2.s_a1),
            (s1.s_a2, s2.s_a2),
            (s1.s_b1, s2.s_b1),
            (s1.s_b2, s2.s_b2),
        ] {
            assert!((a - b).abs() / a.abs() < 1e-12);
        }
    }

    #[test]
    fn sinr_monotone_in_allocations() {
        // Every receiver's SINR rises with its team-mate's communication
        // fraction and falls with each opposing jamming fraction aimed at it.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let params = params_with(0.05, 0.33, 0.5);
        for _ in 0..100 {
            let mut positions = [[0.0; 2]; 4];
            for p in &mut positions {
                p[0] = rng.gen_range(-20.0..20.0);
                p[1] = rng.gen_range(-20.0..20.0);
            }
            let layout = AgentLayout::new(positions, [0.0; 4], [1.0; 4]).unwrap();
            if !layout.well_separated() {
                continue;
            }
            let base = rand_profile(&mut rng);
            let s0 = sinr_all(&layout, &base, &params);

            for &receiver in &AgentId::ALL {
                // more mate communication: this receiver's SINR increases
                let bumped = shift_mass(&base, receiver.teammate(), 0, 1, 1e-4);
                let s = sinr_all(&layout, &bumped, &params);
                assert!(s.received_by(receiver) > s0.received_by(receiver));

                // more jamming from either opponent: it decreases
                let slot = 1 + receiver.team_slot();
                for &jammer in &receiver.opponents() {
                    let bumped = shift_mass(&base, jammer, slot, 0, 1e-4);
                    let s = sinr_all(&layout, &bumped, &params);
                    assert!(s.received_by(receiver) < s0.received_by(receiver));
                }
            }
        }
    }

    fn rand_profile(rng: &mut impl Rng) -> AllocationProfile {
        let mut vs = [Simplex3::new([1.0, 0.0, 0.0]).unwrap(); 4];
        for v in &mut vs {
            // keep all components strictly positive so mass shifts stay valid
            let raw: [f64; 3] = [
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..1.0),
            ];
            let sum: f64 = raw.iter().sum();
            *v = Simplex3::new([raw[0] / sum, raw[1] / sum, raw[2] / sum]).unwrap();
        }
        AllocationProfile::new(vs)
    }

    /// Move `eps` of mass from component `from` to component `to` of one
    /// agent's vector.
    fn shift_mass(
        profile: &AllocationProfile,
        agent: AgentId,
        to: usize,
        from: usize,
        eps: f64,
    ) -> AllocationProfile {
        let mut vectors = profile.vectors();
        let mut raw = vectors[agent.index()].as_array();
        raw[to] += eps;
        raw[from] -= eps;
        vectors[agent.index()] = Simplex3::new(raw).unwrap();
        AllocationProfile::new(vectors)
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 2.0, 1.0, 1.0, 0.3, 0.5, 2).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 0.3, 0.5, 3).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, -1.0, 2.0, 1.0, 1.0, 0.3, 0.5, 2).is_err());
        let p = params_with(0.01, 0.33, 0.5);
        assert!((p.rho_a() - rho(1.0, 1.0, 0.33).unwrap()).abs() < 1e-18);
        assert!((p.rho_b() - rho(1.0, 1.0, 0.5).unwrap()).abs() < 1e-18);
    }

    #[test]
    fn wavelength_conversion() {
        let l = wavelength_from_frequency(3.0e8).unwrap();
        assert!((l - 2.998e8 / 3.0e8).abs() < 1e-15);
        assert!(wavelength_from_frequency(0.0).is_err());
    }
}
