//! Scenario ingestion, the command surface, and trace persistence.
//!
//! Scenario files are flat structured text with dotted keys, one key per
//! line, and `#` comments:
//!
//! ```text
//! # physical constants
//! physical.pmax = 100.0
//! physical.freq_a = 3.0e8
//! agents.a1.x = 0.0
//! game.steps = 200
//! ```
//!
//! Recognized keys (all optional; omitted keys take the defaults below):
//!
//! | key | default |
//! |-----|---------|
//! | `physical.pmax` | `100.0` W |
//! | `physical.energy` | `100.0` J |
//! | `physical.sigma` | `0.1` W |
//! | `physical.alpha` | `2.0` |
//! | `physical.gt`, `physical.gr` | `1.0` |
//! | `physical.freq_a` / `physical.lambda_a` | `3.0e8` Hz |
//! | `physical.freq_b` / `physical.lambda_b` | `1.0e8` Hz |
//! | `physical.modulation_size` | `2` |
//! | `agents.{a1,a2,b1,b2}.{x,y}` | unit square of side 10 |
//! | `agents.*.heading` | toward (team A) / away from (team B) the opposing centroid |
//! | `agents.*.speed` | `1.0` m/s |
//! | `game.steps` / `game.dt` | `200` steps |
//! | `game.mode` | `saddle` |
//! | `game.sweeps_max` | `50` |
//! | `game.control_relaxation` | `0.5` |
//! | `game.sweep_tol` | `1e-6` rad |
//! | `solver.tol` | `1e-10` |
//! | `solver.max_sweeps` | `500` |
//! | `solver.relaxation` | `1.0` |
//! | `seed` | `0` (reserved for sampling utilities) |
//!
//! Giving both a wavelength and a frequency for the same band is an error.
//! Trace files are CSV with every float printed at 17 significant digits so
//! repeated runs are byte-identical.

use crate::allocation::{
    focal_coefficients, focal_payoff, mqam_sufficient_condition, nash_solve, verify_nash,
    AllocationProfile, SolverOptions,
};
use crate::channel::{wavelength_from_frequency, AgentId, AgentLayout, PhysicalParams};
use crate::error::{Error, Result};
use crate::game::{simulate, GameOptions, SimulationMode, Trace};
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

/// How a band's carrier was specified; kept so configs round-trip verbatim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandSpec {
    Wavelength(f64),
    Frequency(f64),
}

impl BandSpec {
    pub fn wavelength(&self) -> Result<f64> {
        match *self {
            BandSpec::Wavelength(l) => {
                if l > 0.0 {
                    Ok(l)
                } else {
                    Err(Error::Domain(format!(
                        "wavelength must be positive, got {l}"
                    )))
                }
            }
            BandSpec::Frequency(f) => wavelength_from_frequency(f),
        }
    }
}

/// Per-agent initial conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    pub x: f64,
    pub y: f64,
    /// Initial heading; `None` selects the opposing-centroid default.
    pub heading: Option<f64>,
    pub speed: f64,
}

/// Time-grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSpec {
    Steps(usize),
    Dt(f64),
}

/// A fully parsed scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub pmax: f64,
    pub energy: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub gt: f64,
    pub gr: f64,
    pub band_a: BandSpec,
    pub band_b: BandSpec,
    pub modulation_size: u32,
    /// A1, A2, B1, B2.
    pub agents: [AgentConfig; 4],
    pub steps: StepSpec,
    pub mode: SimulationMode,
    pub sweeps_max: usize,
    pub control_relaxation: f64,
    pub sweep_tol: f64,
    pub solver_tol: f64,
    pub solver_max_sweeps: usize,
    pub solver_relaxation: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let agent = |x: f64, y: f64| AgentConfig {
            x,
            y,
            heading: None,
            speed: 1.0,
        };
        Self {
            pmax: 100.0,
            energy: 100.0,
            sigma: 0.1,
            alpha: 2.0,
            gt: 1.0,
            gr: 1.0,
            band_a: BandSpec::Frequency(3.0e8),
            band_b: BandSpec::Frequency(1.0e8),
            modulation_size: 2,
            agents: [
                agent(0.0, 0.0),
                agent(10.0, 0.0),
                agent(0.0, 10.0),
                agent(10.0, 10.0),
            ],
            steps: StepSpec::Steps(200),
            mode: SimulationMode::Saddle,
            sweeps_max: 50,
            control_relaxation: 0.5,
            sweep_tol: 1e-6,
            solver_tol: 1e-10,
            solver_max_sweeps: 500,
            solver_relaxation: 1.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn physical_params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(
            self.pmax,
            self.energy,
            self.sigma,
            self.alpha,
            self.gt,
            self.gr,
            self.band_a.wavelength()?,
            self.band_b.wavelength()?,
            self.modulation_size,
        )
    }

    /// Initial layout with centroid-rule headings filled in: team A points at
    /// the opposing centroid, team B points away from it.
    pub fn initial_layout(&self) -> Result<AgentLayout> {
        let centroid = |lo: usize| {
            let a = &self.agents[lo];
            let b = &self.agents[lo + 1];
            [(a.x + b.x) / 2.0, (a.y + b.y) / 2.0]
        };
        let centroid_a = centroid(0);
        let centroid_b = centroid(2);
        let mut positions = [[0.0; 2]; 4];
        let mut headings = [0.0; 4];
        let mut speeds = [0.0; 4];
        for (i, agent) in self.agents.iter().enumerate() {
            positions[i] = [agent.x, agent.y];
            speeds[i] = agent.speed;
            headings[i] = agent.heading.unwrap_or_else(|| {
                if i < 2 {
                    (centroid_b[1] - agent.y).atan2(centroid_b[0] - agent.x)
                } else {
                    (agent.y - centroid_a[1]).atan2(agent.x - centroid_a[0])
                }
            });
        }
        let layout = AgentLayout::new(positions, headings, speeds)?;
        if !layout.well_separated() {
            return Err(Error::Domain(
                "initial agent positions closer than the minimum separation".into(),
            ));
        }
        Ok(layout)
    }

    pub fn game_options(&self) -> Result<GameOptions> {
        let params = self.physical_params()?;
        let mut opts = match self.steps {
            StepSpec::Steps(n) => GameOptions::with_steps(&params, n)?,
            StepSpec::Dt(dt) => GameOptions {
                dt,
                sweeps_max: 50,
                control_relaxation: 0.5,
                sweep_tol: 1e-6,
            },
        };
        opts.sweeps_max = self.sweeps_max;
        opts.control_relaxation = self.control_relaxation;
        opts.sweep_tol = self.sweep_tol;
        opts.steps(&params)?;
        Ok(opts)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver_tol,
            max_sweeps: self.solver_max_sweeps,
            relaxation: self.solver_relaxation,
            ..SolverOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        self.physical_params()?;
        self.initial_layout()?;
        self.game_options()?;
        if !(self.control_relaxation > 0.0 && self.control_relaxation <= 1.0) {
            return Err(Error::Domain(format!(
                "game.control_relaxation must lie in (0, 1], got {}",
                self.control_relaxation
            )));
        }
        if !(self.solver_relaxation > 0.0 && self.solver_relaxation <= 1.0) {
            return Err(Error::Domain(format!(
                "solver.relaxation must lie in (0, 1], got {}",
                self.solver_relaxation
            )));
        }
        Ok(())
    }
}

fn parse_err(line: usize, field: &str, reason: impl std::fmt::Display) -> Error {
    Error::Domain(format!("line {line}: {field}: {reason}"))
}

fn parse_f64(value: &str, line: usize, field: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|e| parse_err(line, field, e))
}

fn parse_usize(value: &str, line: usize, field: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|e| parse_err(line, field, e))
}

/// Applies one `key = value` assignment. `line` is 1-based for messages.
fn apply_field(
    cfg: &mut ScenarioConfig,
    key: &str,
    value: &str,
    line: usize,
    seen: &mut HashSet<String>,
) -> Result<()> {
    // Wavelength and frequency keys address the same band, so they share a
    // canonical name: giving both (or either twice) is a conflict.
    let canonical = match key {
        "physical.lambda_a" | "physical.freq_a" => "physical.band_a",
        "physical.lambda_b" | "physical.freq_b" => "physical.band_b",
        "game.steps" | "game.dt" => "game.grid",
        other => other,
    };
    if !seen.insert(canonical.to_string()) {
        return Err(parse_err(
            line,
            key,
            "field already set (wavelength/frequency and steps/dt are exclusive pairs)",
        ));
    }

    match key {
        "physical.pmax" => cfg.pmax = parse_f64(value, line, key)?,
        "physical.energy" => cfg.energy = parse_f64(value, line, key)?,
        "physical.sigma" => cfg.sigma = parse_f64(value, line, key)?,
        "physical.alpha" => cfg.alpha = parse_f64(value, line, key)?,
        "physical.gt" => cfg.gt = parse_f64(value, line, key)?,
        "physical.gr" => cfg.gr = parse_f64(value, line, key)?,
        "physical.lambda_a" => cfg.band_a = BandSpec::Wavelength(parse_f64(value, line, key)?),
        "physical.freq_a" => cfg.band_a = BandSpec::Frequency(parse_f64(value, line, key)?),
        "physical.lambda_b" => cfg.band_b = BandSpec::Wavelength(parse_f64(value, line, key)?),
        "physical.freq_b" => cfg.band_b = BandSpec::Frequency(parse_f64(value, line, key)?),
        "physical.modulation_size" => {
            let m = value.parse::<u32>().map_err(|e| parse_err(line, key, e))?;
            crate::modulation::MqamScheme::new(m).map_err(|e| match e {
                Error::Domain(msg) => parse_err(line, key, msg),
                other => other,
            })?;
            cfg.modulation_size = m;
        }
        "game.steps" => cfg.steps = StepSpec::Steps(parse_usize(value, line, key)?),
        "game.dt" => cfg.steps = StepSpec::Dt(parse_f64(value, line, key)?),
        "game.mode" => {
            cfg.mode = match value {
                "saddle" => SimulationMode::Saddle,
                "myopic" => SimulationMode::Myopic,
                other => return Err(parse_err(line, key, format!("unknown mode '{other}'"))),
            }
        }
        "game.sweeps_max" => cfg.sweeps_max = parse_usize(value, line, key)?,
        "game.control_relaxation" => cfg.control_relaxation = parse_f64(value, line, key)?,
        "game.sweep_tol" => cfg.sweep_tol = parse_f64(value, line, key)?,
        "solver.tol" => cfg.solver_tol = parse_f64(value, line, key)?,
        "solver.max_sweeps" => cfg.solver_max_sweeps = parse_usize(value, line, key)?,
        "solver.relaxation" => cfg.solver_relaxation = parse_f64(value, line, key)?,
        "seed" => cfg.seed = value.parse::<u64>().map_err(|e| parse_err(line, key, e))?,
        other => {
            if let Some(rest) = other.strip_prefix("agents.") {
                let (id, field) = rest
                    .split_once('.')
                    .ok_or_else(|| parse_err(line, other, "unknown field"))?;
                let idx = match id {
                    "a1" => 0,
                    "a2" => 1,
                    "b1" => 2,
                    "b2" => 3,
                    _ => return Err(parse_err(line, other, "unknown agent (a1|a2|b1|b2)")),
                };
                let v = parse_f64(value, line, other)?;
                match field {
                    "x" => cfg.agents[idx].x = v,
                    "y" => cfg.agents[idx].y = v,
                    "heading" => cfg.agents[idx].heading = Some(v),
                    "speed" => {
                        if v < 0.0 {
                            return Err(parse_err(line, other, "speed must be nonnegative"));
                        }
                        cfg.agents[idx].speed = v;
                    }
                    _ => {
                        return Err(parse_err(line, other, "unknown field (x|y|heading|speed)"))
                    }
                }
            } else {
                return Err(parse_err(line, other, "unknown field"));
            }
        }
    }
    Ok(())
}

/// Parses scenario text; omitted fields take the documented defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| parse_err(line, stripped, "expected 'key = value'"))?;
        apply_field(&mut cfg, key.trim(), value.trim(), line, &mut seen)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a config so that `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "physical.pmax = {}", cfg.pmax);
    let _ = writeln!(out, "physical.energy = {}", cfg.energy);
    let _ = writeln!(out, "physical.sigma = {}", cfg.sigma);
    let _ = writeln!(out, "physical.alpha = {}", cfg.alpha);
    let _ = writeln!(out, "physical.gt = {}", cfg.gt);
    let _ = writeln!(out, "physical.gr = {}", cfg.gr);
    for (band, name) in [(cfg.band_a, 'a'), (cfg.band_b, 'b')] {
        match band {
            BandSpec::Wavelength(l) => {
                let _ = writeln!(out, "physical.lambda_{name} = {l}");
            }
            BandSpec::Frequency(f) => {
                let _ = writeln!(out, "physical.freq_{name} = {f}");
            }
        }
    }
    let _ = writeln!(out, "physical.modulation_size = {}", cfg.modulation_size);
    for (i, id) in ["a1", "a2", "b1", "b2"].iter().enumerate() {
        let a = &cfg.agents[i];
        let _ = writeln!(out, "agents.{id}.x = {}", a.x);
        let _ = writeln!(out, "agents.{id}.y = {}", a.y);
        if let Some(h) = a.heading {
            let _ = writeln!(out, "agents.{id}.heading = {h}");
        }
        let _ = writeln!(out, "agents.{id}.speed = {}", a.speed);
    }
    match cfg.steps {
        StepSpec::Steps(n) => {
            let _ = writeln!(out, "game.steps = {n}");
        }
        StepSpec::Dt(dt) => {
            let _ = writeln!(out, "game.dt = {dt}");
        }
    }
    let _ = writeln!(out, "game.mode = {}", cfg.mode.label());
    let _ = writeln!(out, "game.sweeps_max = {}", cfg.sweeps_max);
    let _ = writeln!(out, "game.control_relaxation = {}", cfg.control_relaxation);
    let _ = writeln!(out, "game.sweep_tol = {}", cfg.sweep_tol);
    let _ = writeln!(out, "solver.tol = {}", cfg.solver_tol);
    let _ = writeln!(out, "solver.max_sweeps = {}", cfg.solver_max_sweeps);
    let _ = writeln!(out, "solver.relaxation = {}", cfg.solver_relaxation);
    let _ = writeln!(out, "seed = {}", cfg.seed);
    out
}

/// Formats a float at 17 significant digits for byte-stable traces.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a trace as CSV with the documented column layout.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = vec!["t".into()];
    for id in ["a1", "a2", "b1", "b2"] {
        for field in ["x", "y", "heading", "comm", "jam1", "jam2"] {
            header.push(format!("{id}_{field}"));
        }
    }
    for s in ["s_a1", "s_a2", "s_b1", "s_b2", "L"] {
        header.push(s.into());
    }
    for id in ["a1", "a2", "b1", "b2"] {
        header.push(format!("Jx_{id}"));
        header.push(format!("Jy_{id}"));
    }
    header.push("certified".into());
    header.push("converged".into());
    out.push_str(&header.join(","));
    out.push('\n');

    for rec in &trace.records {
        let mut row: Vec<String> = vec![fmt17(rec.t)];
        for i in 0..4 {
            let v = rec.alloc.vector(AgentId::ALL[i]).as_array();
            row.push(fmt17(rec.positions[i][0]));
            row.push(fmt17(rec.positions[i][1]));
            row.push(fmt17(rec.headings[i]));
            row.push(fmt17(v[0]));
            row.push(fmt17(v[1]));
            row.push(fmt17(v[2]));
        }
        for s in [rec.sinr.s_a1, rec.sinr.s_a2, rec.sinr.s_b1, rec.sinr.s_b2] {
            row.push(fmt17(s));
        }
        row.push(fmt17(rec.team_payoff));
        for i in 0..4 {
            row.push(fmt17(rec.costate.grad[i][0]));
            row.push(fmt17(rec.costate.grad[i][1]));
        }
        row.push(rec.certified.to_string());
        row.push(rec.nash_converged.to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Run summary in the same key-value format as configs.
pub fn trace_summary(trace: &Trace, dt: f64) -> String {
    let certified = trace.records.iter().filter(|r| r.certified).count();
    let clamped = trace.records.iter().filter(|r| r.clamped).count();
    let mut out = String::new();
    let _ = writeln!(out, "mode = {}", trace.mode.label());
    let _ = writeln!(out, "records = {}", trace.records.len());
    let _ = writeln!(out, "sweeps = {}", trace.sweeps);
    let _ = writeln!(out, "converged = {}", trace.converged);
    let _ = writeln!(
        out,
        "payoff_integral = {}",
        fmt17(trace.payoff_integral(dt))
    );
    let _ = writeln!(out, "certified_steps = {certified}");
    let _ = writeln!(out, "clamped_steps = {clamped}");
    let _ = writeln!(
        out,
        "hamiltonian_residual = {}",
        fmt17(trace.isaacs_residual())
    );
    out
}

/// Solves the static allocation game at the initial geometry and reports the
/// equilibrium, the per-player objectives, and the certification summary.
pub fn cmd_allocate(cfg: &ScenarioConfig) -> Result<String> {
    let params = cfg.physical_params()?;
    let scheme = params.scheme();
    let layout = cfg.initial_layout()?;
    let opts = cfg.solver_options();
    let (profile, report) = nash_solve(
        &layout,
        &params,
        scheme,
        &AllocationProfile::uniform(),
        &opts,
    )?;

    let mut out = String::new();
    let _ = writeln!(out, "equilibrium:");
    for &agent in &AgentId::ALL {
        let v = profile.vector(agent).as_array();
        let co = focal_coefficients(agent, &layout, &profile, &params);
        let objective = focal_payoff(&profile.vector(agent), &co, scheme);
        let _ = writeln!(
            out,
            "  {} comm={} jam1={} jam2={} objective={}",
            agent.label(),
            fmt17(v[0]),
            fmt17(v[1]),
            fmt17(v[2]),
            fmt17(objective),
        );
    }
    let _ = writeln!(out, "converged = {}", report.converged);
    let _ = writeln!(out, "iterations = {}", report.iterations);
    let _ = writeln!(out, "mqam_sufficient = {}", report.mqam_sufficient);
    let _ = writeln!(out, "lhs_30 = {}", fmt17(report.lhs_30));
    let _ = writeln!(out, "rhs_30 = {}", fmt17(report.rhs_30));
    let _ = writeln!(
        out,
        "hessian_ok = {}",
        report
            .hessian_ok_per_player
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let certified = report.mqam_sufficient && report.hessian_ok_per_player.iter().all(|&b| b);
    if !certified {
        let _ = writeln!(out, "warning = non-certified equilibrium");
    }
    let deviation_free = verify_nash(&profile, &layout, &params, scheme, 200, 1e-9);
    let _ = writeln!(out, "deviation_check = {deviation_free}");
    Ok(out)
}

/// Runs a trajectory and writes `trace.csv` and `summary.txt` under `out_dir`.
pub fn cmd_simulate(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    mode_override: Option<SimulationMode>,
) -> Result<String> {
    let params = cfg.physical_params()?;
    let scheme = params.scheme();
    let layout = cfg.initial_layout()?;
    let game_opts = cfg.game_options()?;
    let solver_opts = cfg.solver_options();
    let mode = mode_override.unwrap_or(cfg.mode);
    let trace = simulate(&layout, &params, scheme, &game_opts, &solver_opts, mode)?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Domain(format!("cannot create {}: {e}", out_dir.display())))?;
    let trace_path = out_dir.join("trace.csv");
    let summary_path = out_dir.join("summary.txt");
    std::fs::write(&trace_path, trace_to_csv(&trace))
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", trace_path.display())))?;
    let summary = trace_summary(&trace, game_opts.dt);
    std::fs::write(&summary_path, &summary)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", summary_path.display())))?;
    Ok(summary)
}

/// Prints the three equivalent certification views: the closed-form
/// inequality, the worst-case received-SNR form, and the minimum-rate form,
/// plus per-player SNR diagnostics at the uniform starting profile.
pub fn cmd_check(cfg: &ScenarioConfig) -> Result<String> {
    let params = cfg.physical_params()?;
    let scheme = params.scheme();
    let layout = cfg.initial_layout()?;
    let beta = scheme.beta();
    let (certified, lhs, rhs) = mqam_sufficient_condition(&layout, &params);

    let mut out = String::new();
    let _ = writeln!(out, "lhs_30 = {}", fmt17(lhs));
    let _ = writeln!(out, "rhs_30 = {}", fmt17(rhs));
    let _ = writeln!(out, "certified_inequality = {certified}");

    // Worst-case SNR form: the stronger opposing internal link at full comm
    // fraction and zero jamming support. Algebraically the same inequality.
    let snr_worst = lhs / (beta * params.sigma);
    let snr_certified = snr_worst < 3.0 / beta;
    let _ = writeln!(out, "snr_worst = {}", fmt17(snr_worst));
    let _ = writeln!(out, "snr_bound = {}", fmt17(3.0 / beta));
    let _ = writeln!(out, "certified_snr = {snr_certified}");

    // Minimum-rate form: R = log2(M) must exceed the rate supported by the
    // strongest intra-team SNR.
    let rate = scheme.bits();
    let rate_threshold = (1.0 + snr_worst).log2();
    let rate_certified = rate > rate_threshold;
    let _ = writeln!(out, "rate = {}", fmt17(rate));
    let _ = writeln!(out, "rate_threshold = {}", fmt17(rate_threshold));
    let _ = writeln!(out, "certified_rate = {rate_certified}");

    // Per-player SNR-form diagnostics at the uniform profile: each jamming
    // condition in normal form reads (beta/3) b < c + x1.
    let profile = AllocationProfile::uniform();
    let _ = writeln!(out, "per_player_snr_conditions:");
    for &agent in &AgentId::ALL {
        let co = focal_coefficients(agent, &layout, &profile, &params);
        let x = profile.vector(agent);
        for (idx, (num, den_off, frac)) in
            [(co.b, co.c, x.jam(0)), (co.d, co.e, x.jam(1))].iter().enumerate()
        {
            let holds = num * beta / 3.0 < den_off + frac;
            let _ = writeln!(
                out,
                "  {} jam{} lhs={} rhs={} ok={}",
                agent.label(),
                idx + 1,
                fmt17(num * beta / 3.0),
                fmt17(den_off + frac),
                holds,
            );
        }
    }

    if certified {
        let _ = writeln!(out, "verdict = PSNE certified");
    } else {
        let _ = writeln!(out, "verdict = not certified; MSNE guaranteed to exist");
    }
    Ok(out)
}

/// Applies `key = value` to a parsed config, reusing the scenario field
/// dispatch. Used by parameter sweeps.
pub fn set_config_field(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    let mut seen = HashSet::new();
    apply_field(cfg, key, value, 0, &mut seen)?;
    cfg.validate()
}

/// Runs `n` simulations with `key` swept linearly over `[lo, hi]`, writing
/// each run under `out_dir/run_###` plus a `sweep.txt` index.
pub fn cmd_sweep(
    cfg: &ScenarioConfig,
    key: &str,
    lo: f64,
    hi: f64,
    n: usize,
    out_dir: &Path,
) -> Result<String> {
    if n == 0 {
        return Err(Error::Domain("sweep needs at least one point".into()));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Domain(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut index = String::new();
    for i in 0..n {
        let value = if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        // integer-valued fields reject a trailing ".0"
        let rendered = if value.fract() == 0.0 && value.abs() < 1e15 {
            format!("{}", value as i64)
        } else {
            format!("{value}")
        };
        let mut run_cfg = cfg.clone();
        set_config_field(&mut run_cfg, key, &rendered)?;
        let run_dir = out_dir.join(format!("run_{i:03}"));
        let summary = cmd_simulate(&run_cfg, &run_dir, None)?;
        let _ = writeln!(index, "run_{i:03}: {key} = {rendered}");
        for line in summary.lines() {
            let _ = writeln!(index, "  {line}");
        }
    }
    let index_path = out_dir.join("sweep.txt");
    std::fs::write(&index_path, &index)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", index_path.display())))?;
    Ok(index)
}
