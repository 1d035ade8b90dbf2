//! Trajectory runs behind the `simulate`, `converge` and `compare` commands.

use nalgebra::DVector;
use rayon::prelude::*;

use super::config::{InitialData, IntegratorKind, ModelKind, RunConfig, INITIAL_RESIDUAL_TOL};
use super::output::Table;
use crate::control::ControlSpec;
use crate::error::{Error, Partial, Result};
use crate::gni::{gni_trajectory_partial, oscillation_index, rattle_trajectory_partial};
use crate::mech::{energy_and_constraints, projectors, ConstrainedSystem, PhaseState};
use crate::models::{sleigh, Sleigh, Snakeboard};
use crate::rdp::{
    rdp_trajectory_partial, reduced_initial, to_full_state, xi_and_momentum, RdpConfig, RdpInitial, ReducedSystem,
};
use crate::reference::{reference_sampled, reference_trajectory_partial, RkScheme};
use crate::se2::GroupElement;

pub const DEFAULT_ORACLE_REFINE: usize = 100;

/// A built-in model instantiated with its configured parameters.
#[derive(Debug, Clone)]
pub enum Model {
    Sleigh(Sleigh),
    Snakeboard(Snakeboard),
}

/// Initial data in both coordinate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Initial {
    pub full: PhaseState,
    pub reduced: RdpInitial,
}

impl Model {
    pub fn from_config(cfg: &RunConfig) -> Result<Model> {
        let invalid = |e: Error| Error::Validation(e.to_string());
        Ok(match cfg.model {
            ModelKind::Sleigh => Model::Sleigh(Sleigh::new(cfg.sleigh).map_err(invalid)?),
            ModelKind::Snakeboard => Model::Snakeboard(Snakeboard::new(cfg.snakeboard).map_err(invalid)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Sleigh(_) => ModelKind::Sleigh,
            Model::Snakeboard(_) => ModelKind::Snakeboard,
        }
    }

    pub fn system(&self) -> &(dyn ConstrainedSystem + Sync) {
        match self {
            Model::Sleigh(s) => s,
            Model::Snakeboard(s) => s,
        }
    }

    pub fn reduced(&self) -> &(dyn ReducedSystem + Sync) {
        match self {
            Model::Sleigh(s) => s,
            Model::Snakeboard(s) => s,
        }
    }

    /// Converts and checks initial data. Inadmissible or singular states are
    /// validation errors.
    pub fn initial(&self, data: &InitialData) -> Result<Initial> {
        let sys = self.system();
        let full = match data {
            InitialData::Full { q0, v0 } => PhaseState::new(q0.clone(), v0.clone()),
            InitialData::Reduced { r0, u0, p0, g0 } => {
                let rsys = self.reduced();
                let omega = rsys.locked_velocity(r0, p0);
                let (xi, _) = xi_and_momentum(rsys, r0, u0, omega);
                to_full_state(r0, GroupElement::from_slice(g0), u0, xi)
            }
        };
        if full.q.len() != sys.dim() || full.v.len() != sys.dim() {
            return Err(Error::Validation(format!(
                "initial state must have {} coordinates",
                sys.dim()
            )));
        }
        if !full.q.iter().chain(full.v.iter()).all(|x| x.is_finite()) {
            return Err(Error::Validation("initial state is not finite".into()));
        }
        projectors(sys, &full.q).map_err(|e| Error::Validation(format!("initial configuration is singular: {e}")))?;
        let (_, mu_v) = energy_and_constraints(sys, &full.q, &full.v);
        let residual = mu_v.amax();
        if residual > INITIAL_RESIDUAL_TOL {
            return Err(Error::Validation(format!(
                "initial velocity violates the constraints by {residual:e} (limit {INITIAL_RESIDUAL_TOL:e})"
            )));
        }
        let reduced = match data {
            InitialData::Reduced { r0, u0, p0, g0 } => RdpInitial {
                r: r0.clone(),
                g: GroupElement::from_slice(g0),
                u: u0.clone(),
                p: p0.clone(),
            },
            InitialData::Full { .. } => reduced_initial(self.reduced(), &full)?,
        };
        Ok(Initial { full, reduced })
    }

    fn coordinate_names(&self) -> Vec<String> {
        self.system().coordinate_names()
    }
}

/// Node states of one integrator run, possibly cut short by `error`.
#[derive(Debug)]
pub struct Run {
    pub integrator: IntegratorKind,
    pub h: f64,
    pub states: Vec<PhaseState>,
    pub warnings: Vec<String>,
    /// One-line diagnostics, e.g. the GNI oscillation index.
    pub diagnostics: Vec<String>,
    pub error: Option<Error>,
}

impl Run {
    pub fn completed_steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }
}

/// Runs `kind` for `steps` steps of size `h`. Input errors are returned as
/// `Err`; a numerical failure mid-run leaves the completed nodes in the
/// returned [`Run`] together with the error.
pub fn run_integrator(
    model: &Model,
    initial: &Initial,
    kind: IntegratorKind,
    controls: &ControlSpec,
    h: f64,
    steps: usize,
    rdp: &RdpConfig,
) -> Result<Run> {
    let sys = model.system();
    let ctrl = controls.as_fn();
    let full = &initial.full;
    let from_p = |q: &DVector<f64>, p: &DVector<f64>| PhaseState::from_momentum(sys, q.clone(), p);
    let mut diagnostics = Vec::new();
    let (states, warnings, error) = match kind {
        IntegratorKind::Gni => {
            let Partial { value, error } = gni_trajectory_partial(sys, &full.q, &full.momentum(sys), &ctrl, h, steps)?;
            diagnostics.push(format!("gni oscillation index: {:.3}", oscillation_index(&value.p)));
            let states = value.q.iter().zip(&value.p).map(|(q, p)| from_p(q, p)).collect();
            (states, value.warnings, error)
        }
        IntegratorKind::Rattle => {
            let Partial { value, error } =
                rattle_trajectory_partial(sys, &full.q, &full.momentum(sys), &ctrl, h, steps)?;
            (value.iter().map(|s| from_p(&s.q, &s.p)).collect(), Vec::new(), error)
        }
        IntegratorKind::Rdp => {
            let Partial { value, error } =
                rdp_trajectory_partial(model.reduced(), &initial.reduced, &ctrl, h, steps, rdp)?;
            if let Some(max) = value.iterations.iter().max() {
                diagnostics.push(format!("rdp Newton iterations per step: at most {max}"));
            }
            (value.nodes.iter().map(|n| n.full_state()).collect(), Vec::new(), error)
        }
        IntegratorKind::Rk2 | IntegratorKind::Rk4 => {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
            }
            let scheme = if kind == IntegratorKind::Rk2 {
                RkScheme::Rk2
            } else {
                RkScheme::Rk4
            };
            let Partial { value, error } = reference_trajectory_partial(sys, full.clone(), &ctrl, h, steps, scheme);
            (value.states, value.warnings, error)
        }
    };
    Ok(Run {
        integrator: kind,
        h,
        states,
        warnings,
        diagnostics,
        error,
    })
}

/// RK4 at `h / refine`, sampled on the `h` grid.
pub fn oracle(
    model: &Model,
    initial: &Initial,
    controls: &ControlSpec,
    h: f64,
    steps: usize,
    refine: usize,
) -> Result<Vec<PhaseState>> {
    if refine == 0 {
        return Err(Error::Validation("oracle refinement must be at least 1".into()));
    }
    let ctrl = controls.as_fn();
    reference_sampled(
        model.system(),
        initial.full.clone(),
        &ctrl,
        h / refine as f64,
        steps * refine,
        refine,
        RkScheme::Rk4,
    )
}

fn energy(model: &Model, s: &PhaseState) -> (f64, f64) {
    let (e, mu_v) = energy_and_constraints(model.system(), &s.q, &s.v);
    (e, if mu_v.is_empty() { 0.0 } else { mu_v.amax() })
}

/// Planar position `(x, y)`: the last two coordinates of both models.
fn position(s: &PhaseState) -> (f64, f64) {
    let n = s.q.len();
    (s.q[n - 2], s.q[n - 1])
}

/// Result of `simulate`: the table (with an error trailer on failure) and
/// the run it came from.
#[derive(Debug)]
pub struct Simulation {
    pub table: Table,
    pub run: Run,
}

pub fn simulate(cfg: &RunConfig) -> Result<Simulation> {
    let model = Model::from_config(cfg)?;
    let initial = model.initial(&cfg.initial)?;
    let run = run_integrator(
        &model,
        &initial,
        cfg.integrator,
        &cfg.controls,
        cfg.h,
        cfg.steps,
        &cfg.rdp,
    )?;
    let names = model.coordinate_names();
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().cloned());
    header.extend(names.iter().map(|n| format!("v_{n}")));
    header.extend(names.iter().map(|n| format!("p_{n}")));
    header.extend(["energy".to_string(), "constraint_residual".to_string()]);
    if let Model::Sleigh(_) = model {
        header.extend(["x_s".to_string(), "y_s".to_string()]);
    }
    let mut table = Table::new(header);
    // N = 0 writes the header only
    let nodes = if cfg.steps == 0 { 0 } else { run.states.len() };
    for (k, s) in run.states.iter().take(nodes).enumerate() {
        let mut row = vec![k as f64 * cfg.h];
        row.extend(s.q.iter());
        row.extend(s.v.iter());
        row.extend(s.momentum(model.system()).iter());
        let (e, res) = energy(&model, s);
        row.extend([e, res]);
        if let Model::Sleigh(sl) = &model {
            let (xs, ys) = sleigh::skate_coordinates(&sl.params(), s.q.as_slice());
            row.extend([xs, ys]);
        }
        table.rows.push(row);
    }
    if let Some(e) = &run.error {
        table.trailer.push(format!("error: {e}"));
    }
    Ok(Simulation { table, run })
}

/// Weighted distance between two states: `sqrt(|Δq|² + Δvᵀ M Δv)`, i.e. the
/// momentum difference measured in the inverse kinetic metric.
pub fn state_error(model: &Model, a: &PhaseState, b: &PhaseState) -> f64 {
    let dq = &a.q - &b.q;
    let dv = &a.v - &b.v;
    (dq.norm_squared() + dv.dot(&(model.system().mass().matrix() * &dv))).sqrt()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|x| x.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub h: f64,
    pub steps: usize,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergeReport {
    pub rows: Vec<ConvergeRow>,
    pub slope: f64,
    pub oracle_h: f64,
}

impl ConvergeReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["h".into(), "steps".into(), "error".into()]);
        t.rows = self.rows.iter().map(|r| vec![r.h, r.steps as f64, r.error]).collect();
        t.trailer.push(format!("slope: {:.6}", self.slope));
        t.trailer.push(format!("oracle_h: {:e}", self.oracle_h));
        t
    }
}

fn steps_for(horizon: f64, h: f64) -> Result<usize> {
    let n = (horizon / h).round();
    if !(h > 0.0) || (n * h - horizon).abs() > 1e-9 * horizon.max(h) {
        return Err(Error::Validation(format!(
            "T = {horizon} is not a whole number of steps h = {h}"
        )));
    }
    Ok(n as usize)
}

/// Final-time error of `cfg.integrator` at each step size against an RK4
/// oracle at `min(h) / refine`, over the configured horizon.
pub fn converge(cfg: &RunConfig, step_sizes: &[f64], refine: usize) -> Result<ConvergeReport> {
    if step_sizes.len() < 3 {
        return Err(Error::Validation("converge needs at least 3 step sizes".into()));
    }
    let mut hs = step_sizes.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    for w in hs.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "step sizes must halve successively, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if refine == 0 {
        return Err(Error::Validation("oracle refinement must be at least 1".into()));
    }
    let horizon = cfg.horizon();
    let model = Model::from_config(cfg)?;
    let initial = model.initial(&cfg.initial)?;
    let steps: Vec<usize> = hs.iter().map(|&h| steps_for(horizon, h)).collect::<Result<_>>()?;
    let h_min = hs[hs.len() - 1];
    let oracle_h = h_min / refine as f64;
    let oracle_steps = steps[steps.len() - 1] * refine;

    let (truth, finals) = rayon::join(
        || {
            let ctrl = cfg.controls.as_fn();
            crate::reference::reference_final_state(
                model.system(),
                initial.full.clone(),
                &ctrl,
                oracle_h,
                oracle_steps,
                RkScheme::Rk4,
            )
        },
        || {
            hs.par_iter()
                .zip(steps.par_iter())
                .map(|(&h, &n)| {
                    let run = run_integrator(&model, &initial, cfg.integrator, &cfg.controls, h, n, &cfg.rdp)?;
                    match run.error {
                        Some(e) => Err(e),
                        None => Ok(run.states.into_iter().last().expect("initial state is always present")),
                    }
                })
                .collect::<Vec<Result<PhaseState>>>()
        },
    );
    let truth = truth?;
    let mut rows = Vec::with_capacity(hs.len());
    for ((&h, &n), fin) in hs.iter().zip(&steps).zip(finals) {
        rows.push(ConvergeRow {
            h,
            steps: n,
            error: state_error(&model, &fin?, &truth),
        });
    }
    let slope = fitted_slope(
        &rows.iter().map(|r| r.h).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.error).collect::<Vec<_>>(),
    );
    Ok(ConvergeReport { rows, slope, oracle_h })
}

/// Final-time errors of one integrator in a comparison.
#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub integrator: IntegratorKind,
    pub completed_steps: usize,
    /// `‖(x, y) − (x, y)_oracle‖` at the last completed node.
    pub final_position_error: f64,
    /// `|E − E_oracle|` at the last completed node.
    pub final_energy_error: f64,
    pub error: Option<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug)]
pub struct Comparison {
    pub table: Table,
    pub summaries: Vec<CompareSummary>,
}

impl Comparison {
    pub fn summary(&self, kind: IntegratorKind) -> Option<&CompareSummary> {
        self.summaries.iter().find(|s| s.integrator == kind)
    }
}

pub const COMPARED: [IntegratorKind; 3] = [IntegratorKind::Gni, IntegratorKind::Rdp, IntegratorKind::Rk2];

/// GNI, RDP and RK2 against the RK4 oracle on identical initial data.
/// A failing integrator leaves `nan` rows and a trailer line; an oracle
/// failure aborts.
pub fn compare(cfg: &RunConfig, refine: usize) -> Result<Comparison> {
    let model = Model::from_config(cfg)?;
    let initial = model.initial(&cfg.initial)?;
    let (truth, runs) = rayon::join(
        || oracle(&model, &initial, &cfg.controls, cfg.h, cfg.steps, refine),
        || {
            COMPARED
                .par_iter()
                .map(|&k| run_integrator(&model, &initial, k, &cfg.controls, cfg.h, cfg.steps, &cfg.rdp))
                .collect::<Vec<_>>()
        },
    );
    let truth = truth?;
    let runs: Vec<Run> = runs.into_iter().collect::<Result<_>>()?;

    let names = model.coordinate_names();
    let group = |prefix: &str| -> Vec<String> {
        let mut cols: Vec<String> = names.iter().map(|n| format!("{prefix}_{n}")).collect();
        cols.extend(names.iter().map(|n| format!("{prefix}_v_{n}")));
        cols.push(format!("{prefix}_energy"));
        cols
    };
    let mut header = vec!["t".to_string()];
    for k in COMPARED {
        header.extend(group(k.name()));
        header.push(format!("{}_energy_error", k.name()));
        header.push(format!("{}_position_error", k.name()));
    }
    header.extend(group("oracle"));
    let mut table = Table::new(header);
    let width = 2 * names.len() + 3;
    let mut summaries = Vec::new();
    for run in &runs {
        let last = run.completed_steps().min(truth.len() - 1);
        let (pe, ee) = errors_at(&model, &run.states[last], &truth[last]);
        summaries.push(CompareSummary {
            integrator: run.integrator,
            completed_steps: run.completed_steps(),
            final_position_error: pe,
            final_energy_error: ee,
            error: run.error.as_ref().map(|e| e.to_string()),
            diagnostics: run.diagnostics.clone(),
        });
        if let Some(e) = &run.error {
            table.trailer.push(format!("error ({}): {e}", run.integrator.name()));
        }
    }
    let rows = if cfg.steps == 0 { 0 } else { truth.len() };
    for (k, o) in truth.iter().take(rows).enumerate() {
        let mut row = vec![k as f64 * cfg.h];
        for run in &runs {
            match run.states.get(k) {
                Some(s) => {
                    row.extend(s.q.iter());
                    row.extend(s.v.iter());
                    row.push(energy(&model, s).0);
                    let (pe, ee) = errors_at(&model, s, o);
                    row.extend([ee, pe]);
                }
                None => row.extend(std::iter::repeat_n(f64::NAN, width)),
            }
        }
        row.extend(o.q.iter());
        row.extend(o.v.iter());
        row.push(energy(&model, o).0);
        table.rows.push(row);
    }
    Ok(Comparison { table, summaries })
}

/// (position error, energy error) of `s` against the oracle state `o`.
fn errors_at(model: &Model, s: &PhaseState, o: &PhaseState) -> (f64, f64) {
    let (x, y) = position(s);
    let (xo, yo) = position(o);
    let pe = ((x - xo).powi(2) + (y - yo).powi(2)).sqrt();
    (pe, (energy(model, s).0 - energy(model, o).0).abs())
}
