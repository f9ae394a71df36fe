//! Config-driven runs behind the command-line subcommands.
//!
//! Every run resolves the same quantities first: the model, the ground-state
//! spectral function at `λ`, the cutoff `Ω` and (optionally) `η`.

use std::f64::consts::PI;

use crate::config::{KSpec, ModelConfig, OmegaMode, RunConfig};
use crate::drive::{
    composite_unitary_ordered, drive_infidelity, generator_gap, quench_infidelity, sweep_k, Cutoff,
    SweepSpec,
};
use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::gates::{gate_sequence, GateSequence};
use crate::hamiltonians::{Model, ParametrizedHamiltonian};
use crate::linalg::{hs_norm, HermitianOperator};
use crate::schedule::{
    complexity_estimate, period_prediction, regularized_angles, standard_angles, AngleSchedule,
    ComplexityReport,
};
use crate::spectral::{agp_distance, effective_generator, exact_agp, kernel_curve, SpectralFunction};
use crate::table::{format_number, Cell, CsvTable};

/// A config with every run-time quantity resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub model: Model,
    pub ground: SpectralFunction,
    pub omega: f64,
    pub eta: Option<f64>,
    pub predicted_period: f64,
}

impl Resolved {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let model = config.model.build()?;
        let ground = crate::drive::ground_spectrum(&model, config.lambda)?;
        let omega = match (config.omega, &model) {
            // A single line at Δ sits on the node of every sin(kπω/Ω) when
            // Ω = Δ, so the two-level cutoff is the exact-schedule value 2Δ.
            (OmegaMode::Auto, Model::TwoLevel(_)) => 2.0 * ground.delta_max(),
            (OmegaMode::Auto, Model::Lmg(_)) => ground.delta_max(),
            (OmegaMode::Explicit(w), _) => w,
        };
        let eta = config.eta.map(|e| e.resolve(ground.delta_min()));
        let predicted_period = period_prediction(omega, ground.delta_min())?;
        Ok(Resolved {
            config: config.clone(),
            model,
            ground,
            omega,
            eta,
            predicted_period,
        })
    }

    pub fn h(&self) -> HermitianOperator {
        self.model.hamiltonian(self.config.lambda)
    }

    pub fn dh(&self) -> HermitianOperator {
        self.model.derivative(self.config.lambda)
    }

    /// Two-level models at the automatic cutoff use the exact `K = 1`
    /// schedule `θ₁ = π/(2Δ)`, `φ₁ = -δλ/Δ`.
    fn exact_two_level(&self, k: usize, regularized: bool) -> Option<f64> {
        match (&self.model, self.config.omega) {
            (Model::TwoLevel(_), OmegaMode::Auto) if k == 1 && !regularized => {
                Some(self.ground.delta_max())
            }
            _ => None,
        }
    }

    pub fn schedule(&self, k: usize, regularized: bool) -> Result<AngleSchedule> {
        let dl = self.config.delta_lambda;
        if let Some(gap) = self.exact_two_level(k, regularized) {
            return AngleSchedule::two_level_exact(gap, dl);
        }
        match (regularized, self.eta) {
            (true, Some(eta)) => regularized_angles(k, self.omega, dl, eta),
            (true, None) => Err(Error::invalid("regularized schedule requested without eta")),
            (false, _) => standard_angles(k, self.omega, dl),
        }
    }

    /// Largest `|eigenvalue|` of `H(λ)` and `∂λH(λ)`.
    pub fn norms(&self) -> Result<(f64, f64)> {
        let h = eigendecompose(&self.h())?;
        let d = eigendecompose(&self.dh())?;
        Ok((
            crate::drive::max_abs_eigenvalue(&h),
            crate::drive::max_abs_eigenvalue(&d),
        ))
    }

    fn ks(&self) -> Vec<usize> {
        match self.config.k {
            KSpec::Max(k) => (1..=k).collect(),
            KSpec::Single(k) => vec![k],
        }
    }

    fn single_k(&self) -> Result<usize> {
        match self.config.k {
            KSpec::Single(k) => Ok(k),
            KSpec::Max(_) => Err(Error::Config {
                line: None,
                key: "k".into(),
                message: "this command needs a single `k`, not `k_max`".into(),
            }),
        }
    }

    fn model_comments(&self, table: &mut CsvTable) {
        match self.config.model {
            ModelConfig::Lmg { n_spins, j0, hx0 } => {
                table.comment(format!("model = lmg, n_spins = {n_spins}"));
                table.meta("j0", j0);
                table.meta("hx0", hx0);
            }
            ModelConfig::TwoLevel { hx, hz } => {
                table.comment("model = two_level");
                table.meta("hx_offset", hx.offset);
                table.meta("hx_slope", hx.slope);
                table.meta("hz_offset", hz.offset);
                table.meta("hz_slope", hz.slope);
            }
        }
        table.meta("lambda", self.config.lambda);
        table.meta("delta_lambda", self.config.delta_lambda);
        table.meta("omega", self.omega);
        table.meta("delta_min", self.ground.delta_min());
        table.meta("delta_max", self.ground.delta_max());
        table.meta("K_p", self.predicted_period);
        if let Some(eta) = self.eta {
            table.meta("eta", eta);
        }
        table.comment(format!("ordering = {}", self.config.ordering.name()));
    }
}

fn with_context(e: Error, what: &str) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::invalid(format!("{what}: {other}")),
    }
}

/// Infidelity against `K`; columns `K, infidelity, [infidelity_regularized],
/// quench_infidelity, predicted_half_period_multiples, complexity_total`.
pub fn run_sweep(config: &RunConfig) -> Result<CsvTable> {
    let r = Resolved::new(config).map_err(|e| with_context(e, "sweep setup"))?;
    let ks = r.ks();
    let k_max = *ks.last().expect("K >= 1");
    let spec = SweepSpec {
        lambda: config.lambda,
        delta_lambda: config.delta_lambda,
        cutoff: Cutoff::Explicit(r.omega),
        k_max,
        eta: None,
        order: config.ordering,
    };
    let plain = sweep_k(&r.model, &spec).map_err(|e| with_context(e, "sweep"))?;
    let reg = match r.eta {
        Some(eta) => Some(
            sweep_k(&r.model, &SweepSpec { eta: Some(eta), ..spec })
                .map_err(|e| with_context(e, "regularized sweep"))?,
        ),
        None => None,
    };

    let mut plain = plain;
    if r.exact_two_level(1, false).is_some() {
        let sched = r.schedule(1, false)?;
        let (h_norm, dh_norm) = r.norms()?;
        let row = &mut plain.rows[0];
        row.infidelity = crate::drive::drive_infidelity_ordered(
            &r.model,
            config.lambda,
            &sched,
            0,
            config.ordering,
        )?;
        row.complexity = complexity_estimate(&sched, h_norm, dh_norm)?;
    }

    let mut header = vec!["K", "infidelity"];
    if reg.is_some() {
        header.push("infidelity_regularized");
    }
    header.extend([
        "quench_infidelity",
        "predicted_half_period_multiples",
        "complexity_total",
    ]);
    let mut table = CsvTable::new(header);
    r.model_comments(&mut table);
    for k in ks {
        let row = &plain.rows[k - 1];
        let mut cells: Vec<Cell> = vec![k.into(), row.infidelity.into()];
        if let Some(reg) = &reg {
            cells.push(reg.rows[k - 1].infidelity.into());
        }
        cells.push(row.quench_infidelity.into());
        cells.push((2.0 * k as f64 / r.predicted_period).into());
        cells.push(row.complexity.total.into());
        table.push(cells)?;
    }
    Ok(table)
}

/// Grid for kernel curves.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    pub ks: Vec<usize>,
    /// Upper end of the grid; `None` uses the resolved `Ω`.
    pub omega_max: Option<f64>,
    pub points: usize,
}

/// Kernel `[g(ω) + S_K(ω)]²` on a uniform grid, one column per `K`.
///
/// With `eta` set, the regularized angles and `g(ω) = ω/(ω²+η²)` are used
/// and the grid starts at `ω = 0`; otherwise it starts one step above zero.
/// An empty `K` list gives the bare `g(ω)²` column.
pub fn run_kernel(config: &RunConfig, grid: &KernelGrid) -> Result<CsvTable> {
    let r = Resolved::new(config).map_err(|e| with_context(e, "kernel setup"))?;
    if grid.points == 0 {
        return Err(Error::invalid("kernel grid needs at least one point"));
    }
    let omega_max = grid.omega_max.unwrap_or(r.omega);
    if !(omega_max > 0.0) || !omega_max.is_finite() {
        return Err(Error::invalid("kernel omega_max must be positive"));
    }
    let regularized = r.eta.is_some();
    let n = grid.points;
    let omegas: Vec<f64> = if regularized {
        (0..n)
            .map(|i| if n == 1 { omega_max } else { omega_max * i as f64 / (n - 1) as f64 })
            .collect()
    } else {
        (1..=n).map(|i| omega_max * i as f64 / n as f64).collect()
    };

    let mut columns = Vec::new();
    let mut header = vec!["omega".to_string()];
    if grid.ks.is_empty() {
        header.push("kernel_bare".into());
        // K = 0: no drive, just g(ω)².
        let sched = match r.eta {
            Some(eta) => regularized_angles(1, r.omega, config.delta_lambda, eta)?.without_drive(),
            None => standard_angles(1, r.omega, config.delta_lambda)?.without_drive(),
        };
        columns.push(kernel_curve(&sched, &omegas, regularized)?);
    }
    for &k in &grid.ks {
        header.push(format!("kernel_K{k}"));
        let sched = r.schedule(k, regularized)?;
        columns.push(kernel_curve(&sched, &omegas, regularized)?);
    }

    let mut table = CsvTable::new(header);
    r.model_comments(&mut table);
    for (i, &w) in omegas.iter().enumerate() {
        let mut row: Vec<Cell> = vec![w.into()];
        row.extend(columns.iter().map(|c| Cell::Real(c[i])));
        table.push(row)?;
    }
    Ok(table)
}

/// Schedule dump with columns `K, k, theta_k, phi_k` for `k = 1..=K`.
pub fn run_angles(config: &RunConfig) -> Result<CsvTable> {
    let r = Resolved::new(config).map_err(|e| with_context(e, "angles setup"))?;
    let mut table = CsvTable::new(["K", "k", "theta_k", "phi_k"]);
    r.model_comments(&mut table);
    for big_k in r.ks() {
        let sched = r.schedule(big_k, r.eta.is_some())?;
        for (i, p) in sched.pairs().iter().enumerate() {
            table.push(vec![big_k.into(), (i + 1).into(), p.theta.into(), p.phi.into()])?;
        }
    }
    Ok(table)
}

/// Gate IR for a single `K`, with run metadata in the header comments.
pub fn export_gates(config: &RunConfig) -> Result<String> {
    let r = Resolved::new(config).map_err(|e| with_context(e, "gates setup"))?;
    let k = r.single_k()?;
    let sched = r.schedule(k, r.eta.is_some())?;
    let seq = gate_sequence(&sched, config.merge, config.ordering);
    let (h_norm, dh_norm) = r.norms()?;
    let c = complexity_estimate(&sched, h_norm, dh_norm)?;
    let mut header = vec![
        format!("K = {k}"),
        format!("omega = {}", format_number(r.omega)),
        format!("delta_lambda = {}", format_number(config.delta_lambda)),
        match r.eta {
            Some(eta) => format!("eta = {}", format_number(eta)),
            None => "eta = none".into(),
        },
        format!("ordering = {}", config.ordering.name()),
        format!("merged = {}", config.merge),
        "step (G, t) means exp(-i t G); steps in time order".into(),
    ];
    header.extend(complexity_lines(&c, h_norm, dh_norm));
    Ok(seq.to_ir(&header))
}

fn complexity_lines(c: &ComplexityReport, h_norm: f64, dh_norm: f64) -> Vec<String> {
    vec![
        format!("h_norm = {}", format_number(h_norm)),
        format!("dh_norm = {}", format_number(dh_norm)),
        format!("complexity_h = {}", format_number(c.h_term)),
        format!("complexity_dh = {}", format_number(c.dh_term)),
        format!("complexity_total = {}", format_number(c.total)),
    ]
}

/// Replays a gate IR against the config's model and compares with the
/// composite unitary built directly; returns the largest entry difference.
pub fn replay_deviation(config: &RunConfig, ir: &str) -> Result<f64> {
    let r = Resolved::new(config)?;
    let k = r.single_k()?;
    let sched = r.schedule(k, r.eta.is_some())?;
    let seq = GateSequence::parse_ir(ir)?;
    let replayed = seq.replay(&r.h(), &r.dh())?;
    let direct = composite_unitary_ordered(&r.h(), &r.dh(), &sched, seq.order)?;
    Ok(crate::linalg::max_abs_diff(replayed.matrix(), direct.matrix()))
}

/// Complexity per `K`: the closed-form estimate next to the cost of the
/// merged gate sequence counted step by step.
pub fn run_complexity(config: &RunConfig) -> Result<CsvTable> {
    let r = Resolved::new(config).map_err(|e| with_context(e, "complexity setup"))?;
    let (h_norm, dh_norm) = r.norms()?;
    let mut table = CsvTable::new(["K", "h_term", "dh_term", "total", "gate_sequence_cost"]);
    r.model_comments(&mut table);
    table.meta("h_norm", h_norm);
    table.meta("dh_norm", dh_norm);
    for k in r.ks() {
        let sched = r.schedule(k, r.eta.is_some())?;
        let c = complexity_estimate(&sched, h_norm, dh_norm)?;
        let cost = gate_sequence(&sched, true, config.ordering).cost(h_norm, dh_norm);
        table.push(vec![k.into(), c.h_term.into(), c.dh_term.into(), c.total.into(), cost.into()])?;
    }
    Ok(table)
}

/// Exactness check for a two-level model with the `K = 1` schedule
/// `θ₁ = π/(2Δ)`, `φ₁ = -δλ/Δ`.
///
/// Rows halve `δλ` four times starting from the configured value; the
/// comments carry the generator error, the distance and fitted log-log
/// slopes.
pub fn run_twolevel_check(config: &RunConfig) -> Result<CsvTable> {
    let model = match (config.model, config.model.build()?) {
        (ModelConfig::TwoLevel { .. }, Model::TwoLevel(m)) => m,
        _ => {
            return Err(Error::Config {
                line: None,
                key: "model".into(),
                message: "twolevel-check needs `model = two_level`".into(),
            })
        }
    };
    let lambda = config.lambda;
    let gap = model.gap(lambda)?;
    let h = model.hamiltonian(lambda);
    let dh = model.derivative(lambda);
    let exact = exact_agp(&h, &dh)?;
    let closed_form = model.exact_agp(lambda)?;

    let base = AngleSchedule::two_level_exact(gap, config.delta_lambda)?;
    let v = effective_generator(&h, &dh, &base)?;
    let a_norm = hs_norm(exact.matrix());
    let rel = if a_norm == 0.0 {
        hs_norm(v.matrix())
    } else {
        hs_norm(&(v.matrix() - exact.matrix())) / a_norm
    };
    let spec = crate::spectral::spectral_function(&h, &dh, false)?;
    let distance = agp_distance(&spec, &base)?;

    let mut table = CsvTable::new([
        "delta_lambda",
        "drive_infidelity",
        "quench_infidelity",
        "generator_gap",
    ]);
    table.comment("model = two_level");
    table.meta("lambda", lambda);
    table.meta("gap", gap);
    table.meta("theta_1", PI / (2.0 * gap));
    table.meta("omega", 2.0 * gap);
    table.meta("generator_relative_error", rel);
    table.meta(
        "closed_form_agp_deviation",
        crate::linalg::max_abs_diff(exact.matrix(), closed_form.matrix()),
    );
    table.meta("agp_distance", distance);

    let mut xs = Vec::new();
    let mut drive = Vec::new();
    let mut gaps = Vec::new();
    for i in 0..4 {
        let dl = config.delta_lambda / f64::powi(2.0, i);
        let sched = AngleSchedule::two_level_exact(gap, dl)?;
        let d = drive_infidelity(&model, lambda, &sched, 0)?;
        let q = quench_infidelity(&model, lambda, dl, 0)?;
        let g = generator_gap(&h, &dh, &sched)?;
        table.push(vec![dl.into(), d.into(), q.into(), g.into()])?;
        xs.push(dl.abs().ln());
        drive.push(d.ln());
        gaps.push(g.ln());
    }
    table.meta("drive_infidelity_slope", fit_slope(&xs, &drive));
    table.meta("generator_gap_slope", fit_slope(&xs, &gaps));
    Ok(table)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
