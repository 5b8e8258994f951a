//! Parameter sweeps over the protocol family: exponent convergence in the
//! truncation dimension, interference-norm ratios, exponent curves in p and
//! eta, and the interference-weight sweep. Each grid point is a pure function
//! of its parameters; points are evaluated by a fixed-width worker pool and
//! sorted before emission, so output is identical for any worker count.

use rayon::prelude::*;

use qi_core::chernoff::{epsilon_blocks, q_min, ChernoffResult};
use qi_core::linalg::spectral_norm;
use qi_core::protocols::{
    assemble_controlled, qi_output, sigma_ico, sigma_psde, ProtocolParams,
};
use qi_core::states::solve_lambda_for_nt;

use crate::config::SimConfig;
use crate::emit::{Field, Record};
use crate::error::{Result, SimError};

/// Truncation dimensions scanned by the convergence sweep.
pub const DIM_GRID: [usize; 7] = [4, 6, 8, 10, 12, 14, 16];
/// Reflectivity anchors for the p-indexed sweeps.
pub const ETA_ANCHORS: [f64; 3] = [0.01, 0.05, 0.1];
/// Survival-probability anchors for the eta-indexed sweep.
pub const P_ANCHORS: [f64; 3] = [0.2, 0.5, 0.8];
/// Alternative (eta, p) setting for the convergence sweep.
pub const TEXT_VARIANT: (f64, f64) = (0.01, 0.9);
/// Pinned reflectivity of the interference-weight sweep.
pub const GAMMA_SWEEP_ETA: f64 = 0.05;

/// Survival probabilities 0.1, 0.2, ..., 0.9.
pub fn p_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Reflectivities 0.00, 0.02, ..., 0.10.
pub fn eta_grid() -> Vec<f64> {
    (0..=5).map(|k| k as f64 * 0.02).collect()
}

/// Interference weights 0.0, 0.1, ..., 1.0.
pub fn gamma_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// One fully specified grid point.
#[derive(Clone, Copy, Debug)]
pub struct Instance {
    pub eta: f64,
    pub p: f64,
    pub thermal_n: f64,
    pub nt: f64,
    pub dim: usize,
    pub gamma: f64,
    pub tol_s: f64,
}

impl Instance {
    pub fn from_config(cfg: &SimConfig) -> Self {
        Self {
            eta: cfg.eta,
            p: cfg.p,
            thermal_n: cfg.thermal_n,
            nt: cfg.nt,
            dim: cfg.dim,
            gamma: cfg.gamma,
            tol_s: cfg.tol_s,
        }
    }
}

/// Error exponents of the three protocols at one grid point.
#[derive(Clone, Copy, Debug)]
pub struct Exponents {
    pub lambda: f64,
    pub eps_qi: f64,
    pub s_qi: f64,
    pub eps_ico: f64,
    pub s_ico: f64,
    pub eps_psde: f64,
    pub s_psde: f64,
}

fn branch_exponent(
    rho_on: &qi_core::ComplexMatrix,
    rho_off: &qi_core::ComplexMatrix,
    sig_on: &qi_core::ComplexMatrix,
    sig_off: &qi_core::ComplexMatrix,
    gamma: f64,
    tol_s: f64,
) -> Result<ChernoffResult> {
    let cs_on = assemble_controlled(rho_on, sig_on, gamma)?;
    let cs_off = assemble_controlled(rho_off, sig_off, gamma)?;
    Ok(epsilon_blocks(&cs_on, &cs_off, tol_s)?)
}

/// Full exponent evaluation at one point: the plain two-state problem plus
/// both interference-assisted variants at the instance's gamma.
pub fn exponents(inst: &Instance) -> Result<Exponents> {
    let lambda = solve_lambda_for_nt(inst.nt, inst.dim)?;
    let pr = ProtocolParams::new(inst.eta, inst.thermal_n, inst.p, inst.dim, lambda)?;
    let rho_on = qi_output(&pr, inst.eta)?;
    let rho_off = qi_output(&pr, 0.0)?;
    let flat = q_min(&rho_on, &rho_off, inst.tol_s)?;

    let ico = branch_exponent(
        &rho_on,
        &rho_off,
        &sigma_ico(&pr, inst.eta)?,
        &sigma_ico(&pr, 0.0)?,
        inst.gamma,
        inst.tol_s,
    )?;
    let psde = branch_exponent(
        &rho_on,
        &rho_off,
        &sigma_psde(&pr, inst.eta)?,
        &sigma_psde(&pr, 0.0)?,
        inst.gamma,
        inst.tol_s,
    )?;

    Ok(Exponents {
        lambda,
        eps_qi: flat.epsilon,
        s_qi: flat.s_star,
        eps_ico: ico.epsilon,
        s_ico: ico.s_star,
        eps_psde: psde.epsilon,
        s_psde: psde.s_star,
    })
}

/// Spectral norms of the two interference blocks at one point.
#[derive(Clone, Copy, Debug)]
pub struct InterferenceNorms {
    pub lambda: f64,
    pub norm_ico: f64,
    pub norm_psde: f64,
    pub ratio: f64,
}

pub fn interference_norms(inst: &Instance) -> Result<InterferenceNorms> {
    let lambda = solve_lambda_for_nt(inst.nt, inst.dim)?;
    let pr = ProtocolParams::new(inst.eta, inst.thermal_n, inst.p, inst.dim, lambda)?;
    let norm_ico = spectral_norm(&sigma_ico(&pr, inst.eta)?)?;
    let norm_psde = spectral_norm(&sigma_psde(&pr, inst.eta)?)?;
    if norm_ico <= 0.0 {
        return Err(SimError::Numerical("interference block vanished".into()));
    }
    Ok(InterferenceNorms { lambda, norm_ico, norm_psde, ratio: norm_psde / norm_ico })
}

/// Maps `f` over a grid, serially for one worker or on a dedicated pool
/// otherwise. Collection preserves grid order either way.
pub fn map_grid<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    if jobs <= 1 {
        items.iter().map(f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SimError::Config(format!("worker pool: {e}")))?;
        pool.install(|| items.par_iter().map(f).collect())
    }
}

fn relative_change(current: f64, next: f64) -> f64 {
    if current == 0.0 {
        0.0
    } else {
        (current - next).abs() / current
    }
}

// ---------------------------------------------------------------------------
// Convergence in the truncation dimension.

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub dim: usize,
    pub eta: f64,
    pub p: f64,
    pub thermal_n: f64,
    pub nt: f64,
    pub exp: Exponents,
    /// Forward relative change |eps(D) - eps(D_next)| / eps(D); 0 on the
    /// final row.
    pub rel_qi: f64,
    pub rel_ico: f64,
    pub rel_psde: f64,
}

impl Record for ConvergenceRow {
    const HEADER: &'static [&'static str] = &[
        "dim",
        "eta",
        "p",
        "thermal_n",
        "nt",
        "lambda",
        "eps_qi",
        "eps_ico",
        "eps_psde",
        "s_star_qi",
        "s_star_ico",
        "s_star_psde",
        "rel_change_qi",
        "rel_change_ico",
        "rel_change_psde",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Int(self.dim as i64),
            Field::Float(self.eta),
            Field::Float(self.p),
            Field::Float(self.thermal_n),
            Field::Float(self.nt),
            Field::Float(self.exp.lambda),
            Field::Float(self.exp.eps_qi),
            Field::Float(self.exp.eps_ico),
            Field::Float(self.exp.eps_psde),
            Field::Float(self.exp.s_qi),
            Field::Float(self.exp.s_ico),
            Field::Float(self.exp.s_psde),
            Field::Float(self.rel_qi),
            Field::Float(self.rel_ico),
            Field::Float(self.rel_psde),
        ]
    }
}

/// Exponents across the given truncation dimensions. The squeezing parameter
/// is re-solved per dimension so every point carries the same probe photon
/// number.
pub fn run_convergence(
    cfg: &SimConfig,
    dims: &[usize],
    textparams: bool,
) -> Result<Vec<ConvergenceRow>> {
    let (eta, p) = if textparams { TEXT_VARIANT } else { (cfg.eta, cfg.p) };
    let instances: Vec<Instance> = dims
        .iter()
        .map(|&dim| Instance { eta, p, dim, ..Instance::from_config(cfg) })
        .collect();
    let results = map_grid(&instances, cfg.jobs, exponents)?;
    let mut rows: Vec<ConvergenceRow> = instances
        .iter()
        .zip(&results)
        .map(|(inst, exp)| ConvergenceRow {
            dim: inst.dim,
            eta: inst.eta,
            p: inst.p,
            thermal_n: inst.thermal_n,
            nt: inst.nt,
            exp: *exp,
            rel_qi: 0.0,
            rel_ico: 0.0,
            rel_psde: 0.0,
        })
        .collect();
    rows.sort_by_key(|row| row.dim);
    for i in 0..rows.len().saturating_sub(1) {
        let next = rows[i + 1].exp;
        let here = rows[i].exp;
        rows[i].rel_qi = relative_change(here.eps_qi, next.eps_qi);
        rows[i].rel_ico = relative_change(here.eps_ico, next.eps_ico);
        rows[i].rel_psde = relative_change(here.eps_psde, next.eps_psde);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Interference-norm ratio over (p, eta).

#[derive(Clone, Debug)]
pub struct RatioRow {
    pub p: f64,
    pub eta: f64,
    pub dim: usize,
    pub thermal_n: f64,
    pub nt: f64,
    pub norms: InterferenceNorms,
}

impl Record for RatioRow {
    const HEADER: &'static [&'static str] =
        &["p", "eta", "dim", "thermal_n", "nt", "lambda", "norm_ico", "norm_psde", "ratio"];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Float(self.p),
            Field::Float(self.eta),
            Field::Int(self.dim as i64),
            Field::Float(self.thermal_n),
            Field::Float(self.nt),
            Field::Float(self.norms.lambda),
            Field::Float(self.norms.norm_ico),
            Field::Float(self.norms.norm_psde),
            Field::Float(self.norms.ratio),
        ]
    }
}

pub fn run_norm_ratio(
    cfg: &SimConfig,
    p_values: &[f64],
    eta_values: &[f64],
) -> Result<Vec<RatioRow>> {
    let mut instances = Vec::new();
    for &p in p_values {
        for &eta in eta_values {
            instances.push(Instance { eta, p, ..Instance::from_config(cfg) });
        }
    }
    let results = map_grid(&instances, cfg.jobs, interference_norms)?;
    let mut rows: Vec<RatioRow> = instances
        .iter()
        .zip(&results)
        .map(|(inst, norms)| RatioRow {
            p: inst.p,
            eta: inst.eta,
            dim: inst.dim,
            thermal_n: inst.thermal_n,
            nt: inst.nt,
            norms: *norms,
        })
        .collect();
    rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.eta.total_cmp(&b.eta)));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Exponent curves over p and over eta.

#[derive(Clone, Debug)]
pub struct ExponentPoint {
    pub p: f64,
    pub eta: f64,
    pub dim: usize,
    pub thermal_n: f64,
    pub nt: f64,
    pub gamma: f64,
    pub exp: Exponents,
}

fn exponent_fields_tail(point: &ExponentPoint) -> Vec<Field> {
    vec![
        Field::Int(point.dim as i64),
        Field::Float(point.thermal_n),
        Field::Float(point.nt),
        Field::Float(point.gamma),
        Field::Float(point.exp.lambda),
        Field::Float(point.exp.eps_qi),
        Field::Float(point.exp.eps_ico),
        Field::Float(point.exp.eps_psde),
        Field::Float(point.exp.s_qi),
        Field::Float(point.exp.s_ico),
        Field::Float(point.exp.s_psde),
    ]
}

/// Row of the p-indexed exponent sweep.
#[derive(Clone, Debug)]
pub struct EpsVsPRow(pub ExponentPoint);

impl Record for EpsVsPRow {
    const HEADER: &'static [&'static str] = &[
        "p",
        "eta",
        "dim",
        "thermal_n",
        "nt",
        "gamma",
        "lambda",
        "eps_qi",
        "eps_ico",
        "eps_psde",
        "s_star_qi",
        "s_star_ico",
        "s_star_psde",
    ];

    fn fields(&self) -> Vec<Field> {
        let mut fields = vec![Field::Float(self.0.p), Field::Float(self.0.eta)];
        fields.extend(exponent_fields_tail(&self.0));
        fields
    }
}

/// Row of the eta-indexed exponent sweep.
#[derive(Clone, Debug)]
pub struct EpsVsEtaRow(pub ExponentPoint);

impl Record for EpsVsEtaRow {
    const HEADER: &'static [&'static str] = &[
        "eta",
        "p",
        "dim",
        "thermal_n",
        "nt",
        "gamma",
        "lambda",
        "eps_qi",
        "eps_ico",
        "eps_psde",
        "s_star_qi",
        "s_star_ico",
        "s_star_psde",
    ];

    fn fields(&self) -> Vec<Field> {
        let mut fields = vec![Field::Float(self.0.eta), Field::Float(self.0.p)];
        fields.extend(exponent_fields_tail(&self.0));
        fields
    }
}

fn exponent_grid(
    cfg: &SimConfig,
    p_values: &[f64],
    eta_values: &[f64],
) -> Result<Vec<ExponentPoint>> {
    let mut instances = Vec::new();
    for &p in p_values {
        for &eta in eta_values {
            instances.push(Instance { eta, p, ..Instance::from_config(cfg) });
        }
    }
    let results = map_grid(&instances, cfg.jobs, exponents)?;
    Ok(instances
        .iter()
        .zip(&results)
        .map(|(inst, exp)| ExponentPoint {
            p: inst.p,
            eta: inst.eta,
            dim: inst.dim,
            thermal_n: inst.thermal_n,
            nt: inst.nt,
            gamma: inst.gamma,
            exp: *exp,
        })
        .collect())
}

pub fn run_p_sweep(
    cfg: &SimConfig,
    p_values: &[f64],
    eta_values: &[f64],
) -> Result<Vec<EpsVsPRow>> {
    let mut rows: Vec<EpsVsPRow> =
        exponent_grid(cfg, p_values, eta_values)?.into_iter().map(EpsVsPRow).collect();
    rows.sort_by(|a, b| a.0.p.total_cmp(&b.0.p).then(a.0.eta.total_cmp(&b.0.eta)));
    Ok(rows)
}

pub fn run_eta_sweep(
    cfg: &SimConfig,
    eta_values: &[f64],
    p_values: &[f64],
) -> Result<Vec<EpsVsEtaRow>> {
    let mut rows: Vec<EpsVsEtaRow> =
        exponent_grid(cfg, p_values, eta_values)?.into_iter().map(EpsVsEtaRow).collect();
    rows.sort_by(|a, b| a.0.eta.total_cmp(&b.0.eta).then(a.0.p.total_cmp(&b.0.p)));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Interference-weight sweep at fixed eta.

#[derive(Clone, Debug)]
pub struct GammaRow {
    pub gamma: f64,
    pub eta: f64,
    pub p: f64,
    pub dim: usize,
    pub thermal_n: f64,
    pub nt: f64,
    pub lambda: f64,
    pub eps_qi: f64,
    pub eps_ico: f64,
    pub rel_improvement: f64,
}

impl Record for GammaRow {
    const HEADER: &'static [&'static str] = &[
        "gamma",
        "eta",
        "p",
        "dim",
        "thermal_n",
        "nt",
        "lambda",
        "eps_qi",
        "eps_ico",
        "rel_improvement",
    ];

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Float(self.gamma),
            Field::Float(self.eta),
            Field::Float(self.p),
            Field::Int(self.dim as i64),
            Field::Float(self.thermal_n),
            Field::Float(self.nt),
            Field::Float(self.lambda),
            Field::Float(self.eps_qi),
            Field::Float(self.eps_ico),
            Field::Float(self.rel_improvement),
        ]
    }
}

/// Exponent versus interference weight at fixed reflectivity. The heavy
/// pieces (outputs and interference blocks) are shared across the gamma
/// grid; only the block assembly and the s-search repeat per point.
pub fn run_gamma_sweep(
    cfg: &SimConfig,
    eta: f64,
    gamma_values: &[f64],
) -> Result<Vec<GammaRow>> {
    let lambda = solve_lambda_for_nt(cfg.nt, cfg.dim)?;
    let pr = ProtocolParams::new(eta, cfg.thermal_n, cfg.p, cfg.dim, lambda)?;
    let rho_on = qi_output(&pr, eta)?;
    let rho_off = qi_output(&pr, 0.0)?;
    let sig_on = sigma_ico(&pr, eta)?;
    let sig_off = sigma_ico(&pr, 0.0)?;
    let flat = q_min(&rho_on, &rho_off, cfg.tol_s)?;

    let mut rows = map_grid(gamma_values, cfg.jobs, |&gamma| {
        let ico = branch_exponent(&rho_on, &rho_off, &sig_on, &sig_off, gamma, cfg.tol_s)?;
        let rel = if flat.epsilon == 0.0 && ico.epsilon == 0.0 {
            0.0
        } else {
            (ico.epsilon - flat.epsilon) / flat.epsilon
        };
        Ok(GammaRow {
            gamma,
            eta,
            p: cfg.p,
            dim: cfg.dim,
            thermal_n: cfg.thermal_n,
            nt: cfg.nt,
            lambda,
            eps_qi: flat.epsilon,
            eps_ico: ico.epsilon,
            rel_improvement: rel,
        })
    })?;
    rows.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    Ok(rows)
}
