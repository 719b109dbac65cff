//! End-to-end experiment: wave, singularities, operator checks, evolution,
//! strip verdict and Picard solve, with every table persisted as CSV.
//!
//! The computation runs in the normalized frame (`c = 0`, `nu = 1`); config
//! inputs and all outputs are in physical units, lengths and times scaled by
//! `nu`.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::error::{Result, ShockError};
use crate::evolve::{make_initial_data, potential_of, Evolver, Grid, PerturbationState, SPECTRAL_FLOOR};
use crate::flux::{PolynomialFlux, ShockProblem};
use crate::linop::{heat_kernel, spectral_gap, LinearOperatorModel};
use crate::picard::{estimate_tstar, picard_solve, Duhamel, FixedPointRun, SIGMA_MAX};
use crate::strip::{estimate_delta, fit_growth_law, StripEstimate, TheoremVerdict};
use crate::wave::{default_anchor, locate_singularities, solve_profile, WaveProfile};
use crate::weights::{weighted_energy, WeightFunction};

const PICARD_MAX_ITER: usize = 60;
const PICARD_TOL: f64 = 1e-12;
/// Kernel sampling times for the operator checks, in normalized units.
const KERNEL_TIMES: [f64; 6] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0];

/// One row of `timeseries.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub delta: f64,
    pub beta: f64,
    pub fit_r2: f64,
    pub energy_potential: f64,
    pub energy: f64,
    pub mass: f64,
    pub max_h: f64,
}

/// `E(t) ~ C1 exp(-C2 t)` fitted on the last two thirds of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFit {
    pub c1: f64,
    pub c2: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSummary {
    pub omega: f64,
    pub essential_edge: f64,
    /// max/min of `t^{1/4} e^{omega t} ||K||` over the sampled times.
    pub kernel_variation: f64,
    /// Same for `t^{3/4} e^{omega t} ||d_x K||`.
    pub derivative_variation: f64,
}

impl OperatorSummary {
    pub fn passed(&self) -> bool {
        self.omega > 0.0 && self.kernel_variation < 2.0 && self.derivative_variation < 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSummary {
    /// NaN when no trial time contracts.
    pub tstar: f64,
    pub sigma_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub ball_ok: bool,
    /// Relative L2 distance to the time-stepper at `T* + horizon`.
    pub rel_error: f64,
    pub energy_at_tstar: f64,
    pub energy_initial: f64,
    /// `(T, sigma_hat, converged)` per launch, physical times.
    pub trials: Vec<(f64, f64, bool)>,
}

impl PicardSummary {
    pub fn passed(&self) -> bool {
        self.converged && self.sigma_hat <= SIGMA_MAX && self.ball_ok
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub y0: f64,
    pub lattice_lines: usize,
    pub nearest_singularity: (f64, f64),
    pub operator: Option<OperatorSummary>,
    pub rows: Vec<SeriesRow>,
    pub verdict: TheoremVerdict,
    pub energy_potential_fit: EnergyFit,
    pub energy_fit: EnergyFit,
    pub picard: Option<PicardSummary>,
    pub timings: Vec<(&'static str, f64)>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
            && self.operator.as_ref().is_none_or(OperatorSummary::passed)
            && self.picard.as_ref().is_none_or(PicardSummary::passed)
    }

    /// `report.txt` body.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# config\n");
        for line in self.config.to_text().lines() {
            let _ = writeln!(s, "config.{}", line.replacen(" = ", "=", 1));
        }
        s.push_str("# wave\n");
        let _ = writeln!(s, "y0={}", self.y0);
        let _ = writeln!(s, "lattice_lines={}", self.lattice_lines);
        let _ = writeln!(s, "nearest_re={}\nnearest_im={}", self.nearest_singularity.0, self.nearest_singularity.1);
        if let Some(op) = &self.operator {
            s.push_str("# operator\n");
            let _ = writeln!(s, "omega={}\nessential_edge={}", op.omega, op.essential_edge);
            let _ = writeln!(s, "kernel_variation={}\nderivative_variation={}", op.kernel_variation, op.derivative_variation);
            let _ = writeln!(s, "operator_ok={}", op.passed());
        }
        s.push_str("# strip\n");
        if let Some(last) = self.rows.last() {
            let _ = writeln!(s, "final_t={}\nfinal_delta={}", last.t, last.delta);
        }
        s.push_str(&self.verdict.to_kv());
        let _ = writeln!(s, "verdict_ok={}", self.verdict.passed());
        let _ = writeln!(s, "verdict_diagnostics={}", self.verdict.diagnostics);
        s.push_str("# energy\n");
        for (name, fit) in [("E_H", &self.energy_potential_fit), ("E_h", &self.energy_fit)] {
            let _ = writeln!(s, "{name}_C1={}\n{name}_C2={}\n{name}_r2={}", fit.c1, fit.c2, fit.r2);
        }
        if let Some(p) = &self.picard {
            s.push_str("# picard\n");
            let _ = writeln!(s, "tstar={}\nsigma_hat={}\nconverged={}", p.tstar, p.sigma_hat, p.converged);
            let _ = writeln!(s, "iterations={}\nfinal_residual={}\nball_ok={}", p.iterations, p.final_residual, p.ball_ok);
            let _ = writeln!(s, "rel_error_vs_evolve={}", p.rel_error);
            let _ = writeln!(s, "E_H_initial={}\nE_H_at_tstar={}", p.energy_initial, p.energy_at_tstar);
            for (t, sigma, conv) in &p.trials {
                let _ = writeln!(s, "trial={t},{sigma},{conv}");
            }
            let _ = writeln!(s, "picard_ok={}", p.passed());
        }
        let _ = writeln!(s, "passed={}", self.passed());
        s.push_str("# timings (s)\n");
        for (name, secs) in &self.timings {
            let _ = writeln!(s, "time_{name}={secs:.3}");
        }
        s
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &ShockError) -> i32 {
    match err {
        ShockError::Inadmissible { .. }
        | ShockError::InvalidInput(_)
        | ShockError::Config(_)
        | ShockError::DomainTooShort { .. }
        | ShockError::Unsupported(_)
        | ShockError::Io(_) => 2,
        _ => 3,
    }
}

fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut s = String::with_capacity(1 << 16);
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Log-linear fit of a positive energy series on `t >= t_from`.
pub fn fit_energy(t: &[f64], e: &[f64], t_from: f64) -> EnergyFit {
    let (x, y): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(e)
        .filter(|(t, e)| **t >= t_from && **e > 0.0 && e.is_finite())
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    if x.len() < 3 {
        return EnergyFit { c1: f64::NAN, c2: f64::NAN, r2: f64::NAN };
    }
    let (slope, intercept, r2) = linear_fit(&x, &y);
    EnergyFit { c1: intercept.exp(), c2: -slope, r2 }
}

/// Max/min ratio of a positive sample.
fn variation(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

#[derive(Clone, Copy, Default)]
struct Event {
    t: f64,
    sample: bool,
    snapshot: bool,
    checkpoint: bool,
}

fn merge_events(mut events: Vec<Event>) -> Vec<Event> {
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out: Vec<Event> = Vec::with_capacity(events.len());
    for e in events {
        match out.last_mut() {
            Some(last) if (e.t - last.t).abs() <= 1e-12 * e.t.abs().max(1.0) => {
                last.sample |= e.sample;
                last.snapshot |= e.snapshot;
                last.checkpoint |= e.checkpoint;
            }
            _ => out.push(e),
        }
    }
    out
}

/// Dirichlet grid for the operator, a sub-lattice of the periodic grid: the
/// inner half at stride 2, or the whole box at stride 4 when the profile has
/// not relaxed inside the inner half.
struct OperatorWindow {
    profile: WaveProfile,
    offset: usize,
    stride: usize,
}

impl OperatorWindow {
    fn fit(problem: &ShockProblem, grid: &Grid, anchor: f64) -> Result<Self> {
        match solve_profile(problem, 0.5 * grid.half_width, 2.0 * grid.dx(), anchor) {
            Ok(profile) => Ok(Self { profile, offset: grid.n / 4, stride: 2 }),
            Err(ShockError::DomainTooShort { .. }) => {
                let profile = solve_profile(problem, grid.half_width, 4.0 * grid.dx(), anchor)?;
                Ok(Self { profile, offset: 0, stride: 4 })
            }
            Err(e) => Err(e),
        }
    }

    /// Periodic-grid values at the interior Dirichlet points.
    fn restrict(&self, v: &[f64]) -> Vec<f64> {
        let nx = self.profile.x.len() - 2;
        (1..=nx).map(|i| v[self.offset + self.stride * i]).collect()
    }
}

/// Wave, operator and evolution objects shared by the stages of one run.
struct Lab {
    scale: f64,
    grid: Grid,
    evolver: Evolver,
    dt: f64,
    wave: Arc<WaveProfile>,
    weight: Vec<f64>,
    checkpoints: RefCell<Vec<PerturbationState>>,
}

impl Lab {
    /// State at normalized time `t`, advanced from the latest checkpoint not after `t`.
    fn state_at(&self, t: f64) -> Result<PerturbationState> {
        let mut s = {
            let cps = self.checkpoints.borrow();
            cps.iter().rev().find(|s| s.t <= t + 1e-12).cloned().expect("initial checkpoint")
        };
        self.evolver.advance(&mut s, t, self.dt)?;
        Ok(s)
    }

    fn energies(&self, s: &PerturbationState) -> Result<(f64, f64, Vec<f64>)> {
        let big_h = potential_of(s)?;
        let h = s.values();
        let dx = self.grid.dx();
        let e_big = weighted_energy(&self.weight, &big_h, dx).value * self.scale.powi(3);
        let e = weighted_energy(&self.weight, &h, dx).value * self.scale;
        Ok((e_big, e, big_h))
    }
}

/// Runs the full pipeline, writing all outputs under `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut clock = Instant::now();
    let mut timings = Vec::new();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, f64)>| {
        timings.push((name, clock.elapsed().as_secs_f64()));
        clock = Instant::now();
    };

    let flux = PolynomialFlux::new(config.phi.clone())?;
    let physical = ShockProblem::new(flux, config.alpha_minus, config.alpha_plus, config.nu)?;
    physical.ensure_admissible()?;
    let problem = physical.normalize();
    let scale = problem.frame.scale;
    let out = config.out.clone();
    fs::create_dir_all(&out)?;

    let anchor = default_anchor(&problem);
    let lattice = locate_singularities(&problem, anchor)?;
    fs::write(out.join("singularities.csv"), lattice.to_csv())?;
    let y0 = lattice.y0_physical();
    lap("wave", &mut timings);

    let half_width = config.half_width / scale;
    let grid = Grid::new(half_width, config.n)?;
    let wave = Arc::new(solve_profile(&problem, half_width, grid.dx(), anchor)?);
    let evolver = Evolver::new(&wave, &grid)?;
    let dt = if config.dt > 0.0 { config.dt / scale } else { evolver.default_dt() };
    let weight = WeightFunction::new(wave.clone())?.real_values(&grid.x())?;
    let initial = make_initial_data(config.initial_data(scale), &grid)?;

    let needs_operator = config.run_linop_checks || config.run_picard;
    let fd = if needs_operator {
        let window = OperatorWindow::fit(&problem, &grid, anchor)?;
        let model = Arc::new(LinearOperatorModel::from_profile_with_order(&window.profile, 4)?);
        Some((window, model))
    } else {
        None
    };
    let operator = match (&fd, config.run_linop_checks) {
        (Some((_, model)), true) => Some(operator_checks(model, scale, &out)?),
        _ => None,
    };
    lap("operator", &mut timings);

    let lab = Lab { scale, grid, evolver, dt, wave, weight, checkpoints: RefCell::new(vec![initial.clone()]) };
    let t_end = config.t_end / scale;
    let mut events: Vec<Event> = (1..=config.samples)
        .map(|i| t_end * (i as f64 / config.samples as f64).powi(2))
        .filter(|t| *t >= 10.0 * dt)
        .map(|t| Event { t, sample: true, ..Default::default() })
        .collect();
    events.extend(config.snapshots.iter().map(|t| Event { t: t / scale, snapshot: true, ..Default::default() }));
    if config.run_picard {
        events.extend(config.trial_times.iter().map(|t| Event { t: t / scale, checkpoint: true, ..Default::default() }));
    }
    let events = merge_events(events);

    let mut state = initial;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for ev in &events {
        lab.evolver.advance(&mut state, ev.t, dt)?;
        if ev.checkpoint {
            lab.checkpoints.borrow_mut().push(state.clone());
        }
        if ev.sample {
            let (e_big, e, _) = lab.energies(&state)?;
            let h = state.values();
            let mass = h.iter().sum::<f64>() * lab.grid.dx() * scale;
            let max_h = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let t = ev.t * scale;
            let (delta, beta, fit_r2) = match estimate_delta(&state.spectrum(), SPECTRAL_FLOOR) {
                Ok(est) => {
                    series.push(StripEstimate {
                        t,
                        delta: est.delta * scale,
                        cap: est.cap * scale,
                        k_window: (est.k_window.0 / scale, est.k_window.1 / scale),
                        ..est
                    });
                    (est.delta * scale, est.beta, est.fit_r2)
                }
                Err(ShockError::Unresolved { .. }) => (f64::NAN, f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            rows.push(SeriesRow { t, delta, beta, fit_r2, energy_potential: e_big, energy: e, mass, max_h });
        }
        if ev.snapshot {
            write_snapshot(&lab, &state, &out)?;
        }
    }
    write_csv(
        &out.join("timeseries.csv"),
        "t,delta,beta,fit_r2,E_H,E_h,mass,max_h",
        rows.iter().map(|r| vec![r.t, r.delta, r.beta, r.fit_r2, r.energy_potential, r.energy, r.mass, r.max_h]),
    )?;
    let verdict = fit_growth_law(&series, config.nu, y0, config.epsilon);
    fs::write(out.join("verdict.txt"), verdict.to_kv())?;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let t_fit = config.t_end / 3.0;
    let energy_potential_fit = fit_energy(&ts, &rows.iter().map(|r| r.energy_potential).collect::<Vec<_>>(), t_fit);
    let energy_fit = fit_energy(&ts, &rows.iter().map(|r| r.energy).collect::<Vec<_>>(), t_fit);
    lap("evolve", &mut timings);

    let picard = match (&fd, config.run_picard) {
        (Some((window, model)), true) => Some(picard_stage(config, &lab, window, model.clone(), &out)?),
        _ => None,
    };
    lap("picard", &mut timings);

    let report = ExperimentReport {
        config: config.clone(),
        y0,
        lattice_lines: lattice.lines.len(),
        nearest_singularity: (lattice.nearest.re * scale, lattice.nearest.im * scale),
        operator,
        rows,
        verdict,
        energy_potential_fit,
        energy_fit,
        picard,
        timings,
    };
    fs::write(out.join("report.txt"), report.to_text())?;
    Ok(report)
}

fn operator_checks(model: &LinearOperatorModel, scale: f64, out: &Path) -> Result<OperatorSummary> {
    write_csv(
        &out.join("spectrum.csv"),
        "index,eigenvalue",
        model.spectrum().iter().enumerate().map(|(i, l)| vec![i as f64, l / scale]),
    )?;
    let gap = spectral_gap(model)?;
    let mid = model.len() / 2;
    let mut k_norms = Vec::new();
    let mut dk_norms = Vec::new();
    for t in KERNEL_TIMES {
        let k = heat_kernel(model, t)?;
        let decay = (gap.omega * t).exp();
        k_norms.push(t.powf(0.25) * decay * k.column_norm(mid));
        dk_norms.push(t.powf(0.75) * decay * k.derivative_column_norm(mid));
    }
    Ok(OperatorSummary {
        omega: gap.omega / scale,
        essential_edge: gap.essential_edge / scale,
        kernel_variation: variation(&k_norms),
        derivative_variation: variation(&dk_norms),
    })
}

fn write_snapshot(lab: &Lab, state: &PerturbationState, out: &Path) -> Result<()> {
    let t = state.t * lab.scale;
    let big_h = potential_of(state)?;
    let h = state.values();
    let xs = lab.grid.x();
    let f = lab.wave.sample(&xs)?;
    write_csv(
        &out.join(format!("fields_t{t}.csv")),
        "x,f_wave,h,H",
        (0..xs.len()).map(|i| vec![xs[i] * lab.scale, f[i].f, h[i], big_h[i] * lab.scale]),
    )?;
    write_csv(
        &out.join(format!("spectrum_t{t}.csv")),
        "k,abs_h_hat",
        state.spectrum().into_iter().map(|(k, a)| vec![k / lab.scale, a]),
    )
}

fn picard_stage(
    config: &ExperimentConfig,
    lab: &Lab,
    window: &OperatorWindow,
    model: Arc<LinearOperatorModel>,
    out: &Path,
) -> Result<PicardSummary> {
    let scale = lab.scale;
    let horizon = config.picard_horizon / scale;
    let levels = config.picard_levels;
    let t_grid = (0..=levels).map(|i| horizon * i as f64 / levels as f64).collect();
    let duhamel = Duhamel::new(model, &window.profile, t_grid)?;
    let restrict = |v: &[f64]| window.restrict(v);

    let memo: RefCell<Vec<(f64, FixedPointRun)>> = RefCell::new(Vec::new());
    let launch = |t: f64| -> Result<FixedPointRun> {
        if let Some((_, run)) = memo.borrow().iter().find(|(s, _)| *s == t) {
            return Ok(run.clone());
        }
        let s = lab.state_at(t)?;
        let a = duhamel.linear_term(&restrict(&potential_of(&s)?))?;
        let run = picard_solve(&a, |h| duhamel.apply_b(h), |v| duhamel.norm(v), PICARD_MAX_ITER, PICARD_TOL)?;
        memo.borrow_mut().push((t, run.clone()));
        Ok(run)
    };
    let trial_times: Vec<f64> = config.trial_times.iter().map(|t| t / scale).collect();
    let energy_initial = lab.energies(&lab.state_at(0.0)?)?.0;
    let estimate = match estimate_tstar(&trial_times, launch) {
        Ok(e) => Some(e),
        Err(ShockError::Fit(_)) => None,
        Err(e) => return Err(e),
    };
    let mut trials: Vec<(f64, f64, bool)> =
        memo.borrow().iter().map(|(t, r)| (t * scale, r.sigma_hat, r.converged)).collect();
    trials.sort_by(|a, b| a.0.total_cmp(&b.0));

    let Some(est) = estimate else {
        fs::write(out.join("picard_run.csv"), "n,residual,ratio\n")?;
        return Ok(PicardSummary {
            tstar: f64::NAN,
            sigma_hat: f64::NAN,
            converged: false,
            iterations: 0,
            final_residual: f64::NAN,
            ball_ok: false,
            rel_error: f64::NAN,
            energy_at_tstar: f64::NAN,
            energy_initial,
            trials,
        });
    };
    let run = launch(est.tstar)?;
    fs::write(out.join("picard_run.csv"), run.to_csv())?;
    let a_norm = duhamel.norm(&run.a);
    let bound = a_norm / (1.0 - run.sigma_hat) * (1.0 + 1e-10);
    let ball_ok = run.sigma_hat < 1.0 && run.iterates.iter().all(|h| duhamel.norm(h) <= bound);
    let end = lab.state_at(est.tstar + horizon)?;
    let reference = restrict(&end.values());
    let got = duhamel.level(run.solution(), levels);
    let num: f64 = got.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = reference.iter().map(|v| v * v).sum();
    let energy_at_tstar = lab.energies(&lab.state_at(est.tstar)?)?.0;
    Ok(PicardSummary {
        tstar: est.tstar * scale,
        sigma_hat: run.sigma_hat,
        converged: run.converged,
        iterations: run.increments.len(),
        final_residual: run.final_residual,
        ball_ok,
        rel_error: (num / den).sqrt(),
        energy_at_tstar,
        energy_initial,
        trials,
    })
}

/// Outcome of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub out: PathBuf,
    pub outcome: std::result::Result<ExperimentReport, (i32, String)>,
}

impl SweepRow {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(r) if r.passed() => 0,
            Ok(_) => 1,
            Err((code, _)) => *code,
        }
    }
}

/// Runs one experiment per value of `axis` in parallel; each run writes to
/// `<out>/<axis>_<value>` and the summary goes to `<out>/sweep_<axis>.csv`.
pub fn sweep(template: &ExperimentConfig, axis: &str, values: &[String]) -> Result<Vec<SweepRow>> {
    if !crate::config::NUMERIC_KEYS.contains(&axis) {
        return Err(ShockError::Config(format!("`{axis}` is not a numeric config key")));
    }
    let base = template.out.clone();
    fs::create_dir_all(&base)?;
    let jobs: Vec<(String, std::result::Result<ExperimentConfig, ShockError>)> = values
        .iter()
        .map(|v| {
            let mut c = template.clone();
            c.out = base.join(format!("{axis}_{v}"));
            let prepared = c.set(axis, v).and_then(|_| c.validate()).map(|_| c);
            (v.clone(), prepared)
        })
        .collect();
    let base = &base;
    let rows: Vec<SweepRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(v, job)| {
                scope.spawn(move || {
                    let out = base.join(format!("{axis}_{v}"));
                    let outcome = match job {
                        Ok(cfg) => run(cfg).map_err(|e| (exit_code(&e), e.to_string())),
                        Err(e) => Err((exit_code(e), e.to_string())),
                    };
                    SweepRow { value: v.clone(), out, outcome }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut csv = format!("{axis},exit_code,y0,omega,final_delta,fitted_M,fitted_Tstar,tstar,sigma_hat,passed,error\n");
    for row in &rows {
        match &row.outcome {
            Ok(r) => {
                let omega = r.operator.as_ref().map_or(f64::NAN, |o| o.omega);
                let delta = r.rows.last().map_or(f64::NAN, |l| l.delta);
                let (tstar, sigma) = r.picard.as_ref().map_or((f64::NAN, f64::NAN), |p| (p.tstar, p.sigma_hat));
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},",
                    row.value,
                    row.exit_code(),
                    r.y0,
                    omega,
                    delta,
                    r.verdict.fitted_m,
                    r.verdict.fitted_tstar,
                    tstar,
                    sigma,
                    r.passed()
                );
            }
            Err((code, msg)) => {
                let msg = msg.replace([',', '\n'], ";");
                let _ = writeln!(csv, "{},{code},NaN,NaN,NaN,NaN,NaN,NaN,NaN,false,{msg}", row.value);
            }
        }
    }
    fs::write(base.join(format!("sweep_{axis}.csv")), csv)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_fit_recovers_exponential() {
        let t: Vec<f64> = (0..50).map(|i| 0.2 * i as f64).collect();
        let e: Vec<f64> = t.iter().map(|t| 3.0 * (-0.5 * t).exp()).collect();
        let fit = fit_energy(&t, &e, 1.0);
        assert!((fit.c1 - 3.0).abs() < 1e-12 && (fit.c2 - 0.5).abs() < 1e-12 && fit.r2 > 1.0 - 1e-12);
        assert!(fit_energy(&t[..2], &e[..2], 0.0).c2.is_nan());
    }

    #[test]
    fn events_merge() {
        let ev = |t, sample, checkpoint| Event { t, sample, checkpoint, snapshot: false };
        let m = merge_events(vec![ev(1.0, true, false), ev(0.5, true, false), ev(1.0, false, true)]);
        assert_eq!(m.len(), 2);
        assert!(m[1].sample && m[1].checkpoint && m[0].t == 0.5);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&ShockError::Inadmissible { predicate: "entropy" }), 2);
        assert_eq!(exit_code(&ShockError::Config("x".into())), 2);
        assert_eq!(exit_code(&ShockError::BlowUp { t: 1.0, detail: String::new() }), 3);
    }

    #[test]
    fn refuses_inadmissible_flux() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::parse("phi = [0, 0, 0.5]\nalpha_minus = -1\nalpha_plus = 1\n").unwrap();
        c.out = dir.path().to_path_buf();
        match run(&c) {
            Err(ShockError::Inadmissible { predicate }) => assert_eq!(predicate, "entropy"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_rejects_unknown_axis_and_accepts_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::parse("phi = [0, 0, -0.5]\nalpha_minus = -1\nalpha_plus = 1\n").unwrap();
        c.out = dir.path().to_path_buf();
        assert!(sweep(&c, "datum", &[]).is_err());
        assert!(sweep(&c, "nu", &[]).unwrap().is_empty());
        let csv = fs::read_to_string(dir.path().join("sweep_nu.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1);
    }
}
