//! The dual variational problem on the cylinder and everything built on
//! top of it: the optimal constant `μ(λ)`, its inversion `Λ(μ)`, the
//! potential functional `J[V]`, the rigidity functional `K[p_V]`, the
//! symmetry detector and the threshold search.
//!
//! The minimized quotient is
//! `Q_λ[u] = (‖∂_s u‖² + ‖∇_g u‖² + λ‖u‖₂²) / ‖u‖_p²`
//! over nonnegative fields on the cylinder, with the volume-normalized
//! measure. Minimization is projected gradient descent with the gradient
//! taken in the `H¹_λ` metric (the separable operator `L + λ` is inverted
//! exactly through an angular DFT), normalization `‖u‖_p = 1` after every
//! step and Armijo backtracking. Multi-start covers the symmetric profile,
//! a first-harmonic kick and optional seeded random perturbations.

use crate::cylinder::{CylinderPotential, Grid2D, SeparableHelmholtz};
use crate::error::{KltError, Result};
use crate::grid::Grid1D;
use crate::line::{self, SampledPotential1D};
use crate::manifold::ManifoldSpec;
use crate::params::{self, InequalityParams, RigidityParams};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Initial line-search step.
    pub step: f64,
    /// Relative stationarity tolerance of the optimizer.
    pub tol: f64,
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Extra seeded random starts beyond the two canonical ones.
    pub starts: usize,
    /// Axial points (0 = choose from λ).
    pub grid_n: usize,
    /// Angular points (0 = choose from λ).
    pub grid_m: usize,
    /// Axial half width (0 = choose from λ).
    pub half_width: f64,
    /// Relative width of the μ* bracket returned by the threshold search.
    pub threshold_tol: f64,
    /// Relative tolerance of the λ root solve in `capital_lambda`.
    pub lambda_tol: f64,
    /// Seed for the random starts.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step: 0.5,
            tol: 1e-7,
            max_iter: 20_000,
            starts: 0,
            grid_n: 0,
            grid_m: 0,
            half_width: 0.0,
            threshold_tol: 0.02,
            lambda_tol: 3e-5,
            seed: 0x6b6c74,
        }
    }
}

impl OptimizerConfig {
    /// Parse `name=value` lines (`#` comments allowed).
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = OptimizerConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                KltError::invalid(format!("config line {} is not name=value: {line}", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = || KltError::invalid(format!("bad value for {key}: {value}"));
            match key {
                "step" => cfg.step = value.parse().map_err(|_| bad())?,
                "tol" => cfg.tol = value.parse().map_err(|_| bad())?,
                "max_iter" => cfg.max_iter = value.parse().map_err(|_| bad())?,
                "starts" => cfg.starts = value.parse().map_err(|_| bad())?,
                "grid_n" => cfg.grid_n = value.parse().map_err(|_| bad())?,
                "grid_m" => cfg.grid_m = value.parse().map_err(|_| bad())?,
                "half_width" => cfg.half_width = value.parse().map_err(|_| bad())?,
                "threshold_tol" => cfg.threshold_tol = value.parse().map_err(|_| bad())?,
                "lambda_tol" => cfg.lambda_tol = value.parse().map_err(|_| bad())?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
                _ => return Err(KltError::invalid(format!("unknown config key: {key}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| KltError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMode {
    /// Fields depending on the axial variable only (any cylinder).
    Symmetric,
    /// Full fields on `R x S¹` (d = 2 only).
    General2d,
}

// ---------------------------------------------------------------------------
// States.
// ---------------------------------------------------------------------------

/// Candidate optimizer field.
#[derive(Debug, Clone)]
pub enum CylinderField {
    Symmetric { grid: Grid1D, values: Vec<f64> },
    General2d { grid: Grid2D, values: Vec<f64> },
}

impl CylinderField {
    pub fn grid_sizes(&self) -> (usize, usize) {
        match self {
            CylinderField::Symmetric { grid, .. } => (grid.n(), 1),
            CylinderField::General2d { grid, .. } => (grid.s.n(), grid.m),
        }
    }
}

/// Converged (or best-effort) state of the dual minimization.
#[derive(Debug, Clone)]
pub struct GnsState {
    pub field: CylinderField,
    pub lambda: f64,
    /// `Q_λ` at the state — equals `μ(λ)` at the global minimizer.
    pub quotient: f64,
    /// Relative stationarity residual of the Euler–Lagrange equation.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Set when no non-symmetric start beat the symmetric optimum.
    pub symmetric_best: bool,
}

// ---------------------------------------------------------------------------
// Discrete energies.
// ---------------------------------------------------------------------------

struct Energy1d {
    h: f64,
    lambda: f64,
    p: f64,
}

impl Energy1d {
    fn dirichlet(&self, u: &[f64]) -> f64 {
        let n = u.len();
        let mut acc = u[0] * u[0] + u[n - 1] * u[n - 1];
        for i in 0..n - 1 {
            acc += (u[i + 1] - u[i]).powi(2);
        }
        acc / self.h
    }

    fn numerator(&self, u: &[f64]) -> f64 {
        self.dirichlet(u) + self.lambda * u.iter().map(|&x| x * x).sum::<f64>() * self.h
    }

    fn lp_pow(&self, u: &[f64]) -> f64 {
        u.iter().map(|&x| x.abs().powf(self.p)).sum::<f64>() * self.h
    }

    fn quotient(&self, u: &[f64]) -> f64 {
        self.numerator(u) / self.lp_pow(u).powf(2.0 / self.p)
    }

    /// Weighted-L² gradient of `Q` at arbitrary `u` (no normalization
    /// assumed): `∇Q = (2(L+λ)u - Q ∇D) / D` with `D = ‖u‖_p²`.
    fn gradient(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let n = u.len();
        let s = self.lp_pow(u);
        let d = s.powf(2.0 / self.p);
        let q = self.numerator(u) / d;
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut g = vec![0.0; n];
        for i in 0..n {
            let mut lap = 2.0 * u[i];
            if i > 0 {
                lap -= u[i - 1];
            }
            if i + 1 < n {
                lap -= u[i + 1];
            }
            let grad_n = 2.0 * (lap * inv_h2 + self.lambda * u[i]);
            let grad_d = 2.0 * s.powf(2.0 / self.p - 1.0) * u[i].abs().powf(self.p - 2.0) * u[i];
            g[i] = (grad_n - q * grad_d) / d;
        }
        (q, g)
    }
}

struct Energy2d {
    grid: Grid2D,
    lambda: f64,
    p: f64,
}

impl Energy2d {
    fn w(&self) -> f64 {
        self.grid.cell_weight()
    }

    fn dirichlet(&self, u: &[f64]) -> f64 {
        let n = self.grid.s.n();
        let m = self.grid.m;
        let h = self.grid.s.h();
        let ht = self.grid.h_theta();
        let mut acc_s = 0.0;
        for j in 0..m {
            acc_s += u[j] * u[j] + u[(n - 1) * m + j] * u[(n - 1) * m + j];
            for i in 0..n - 1 {
                acc_s += (u[(i + 1) * m + j] - u[i * m + j]).powi(2);
            }
        }
        let mut acc_t = 0.0;
        for i in 0..n {
            let row = i * m;
            for j in 0..m {
                let jr = if j + 1 == m { 0 } else { j + 1 };
                acc_t += (u[row + jr] - u[row + j]).powi(2);
            }
        }
        // Weighted forms: ⟨u, -D_s² u⟩_w = acc_s / (h m), ⟨u, -D_θ² u⟩_w
        // = h acc_t / (m h_θ²).
        acc_s / (h * m as f64) + h * acc_t / (m as f64 * ht * ht)
    }

    fn l2_sq(&self, u: &[f64]) -> f64 {
        u.iter().map(|&x| x * x).sum::<f64>() * self.w()
    }

    fn numerator(&self, u: &[f64]) -> f64 {
        self.dirichlet(u) + self.lambda * self.l2_sq(u)
    }

    fn lp_pow(&self, u: &[f64]) -> f64 {
        u.iter().map(|&x| x.abs().powf(self.p)).sum::<f64>() * self.w()
    }

    fn quotient(&self, u: &[f64]) -> f64 {
        self.numerator(u) / self.lp_pow(u).powf(2.0 / self.p)
    }

    fn gradient(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let n = self.grid.s.n();
        let m = self.grid.m;
        let inv_hs2 = 1.0 / (self.grid.s.h() * self.grid.s.h());
        let inv_ht2 = 1.0 / (self.grid.h_theta() * self.grid.h_theta());
        let s = self.lp_pow(u);
        let d = s.powf(2.0 / self.p);
        let q = self.numerator(u) / d;
        let mut g = vec![0.0; n * m];
        for i in 0..n {
            let row = i * m;
            for j in 0..m {
                let idx = row + j;
                let mut lap = 2.0 * (inv_hs2 + inv_ht2) * u[idx];
                if i > 0 {
                    lap -= inv_hs2 * u[idx - m];
                }
                if i + 1 < n {
                    lap -= inv_hs2 * u[idx + m];
                }
                let jl = if j == 0 { m - 1 } else { j - 1 };
                let jr = if j + 1 == m { 0 } else { j + 1 };
                lap -= inv_ht2 * (u[row + jl] + u[row + jr]);
                let grad_n = 2.0 * (lap + self.lambda * u[idx]);
                let grad_d =
                    2.0 * s.powf(2.0 / self.p - 1.0) * u[idx].abs().powf(self.p - 2.0) * u[idx];
                g[idx] = (grad_n - q * grad_d) / d;
            }
        }
        (q, g)
    }
}

/// `Q_λ` and its weighted-L² gradient at an arbitrary field (used by the
/// finite-difference gradient checks).
pub fn gns_quotient_and_gradient(
    field: &CylinderField,
    lambda: f64,
    params: &InequalityParams,
) -> (f64, Vec<f64>) {
    match field {
        CylinderField::Symmetric { grid, values } => {
            Energy1d { h: grid.h(), lambda, p: params.p }.gradient(values)
        }
        CylinderField::General2d { grid, values } => {
            Energy2d { grid: *grid, lambda, p: params.p }.gradient(values)
        }
    }
}

// ---------------------------------------------------------------------------
// The optimizer.
// ---------------------------------------------------------------------------

fn normalize_p(u: &mut [f64], w: f64, p: f64) -> bool {
    for x in u.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s = u.iter().map(|&x| x.powf(p)).sum::<f64>() * w;
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    let scale = s.powf(-1.0 / p);
    for x in u.iter_mut() {
        *x *= scale;
    }
    true
}

struct RunOutcome {
    values: Vec<f64>,
    quotient: f64,
    gradient_norm: f64,
    iterations: usize,
}

/// Preconditioned projected gradient descent from one start. `solve` must
/// apply `(L + λ)^{-1}` in the same discrete metric as the energies.
fn descend(
    mut u: Vec<f64>,
    weight: f64,
    p: f64,
    cfg: &OptimizerConfig,
    quotient: &dyn Fn(&[f64]) -> f64,
    quotient_and_grad: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    solve: &dyn Fn(&[f64]) -> Vec<f64>,
) -> RunOutcome {
    if !normalize_p(&mut u, weight, p) {
        return RunOutcome { values: u, quotient: f64::INFINITY, gradient_norm: f64::INFINITY, iterations: 0 };
    }
    let trace = std::env::var_os("KLT_TRACE").is_some();
    let mut step = cfg.step;
    let (mut q, mut g) = quotient_and_grad(&u);
    let mut res = f64::INFINITY;
    let mut iterations = 0usize;

    for it in 0..cfg.max_iter {
        if trace && it % 1000 == 0 && it > 0 {
            eprintln!("[iter {it}] q={q:.12} res={res:.3e} step={step:.3e}");
        }
        iterations = it + 1;
        // Relative stationarity: ‖g‖ scaled by the Euler–Lagrange balance.
        let g_norm = (g.iter().map(|&x| x * x).sum::<f64>() * weight).sqrt();
        let scale = 2.0
            * q.abs()
            * (u.iter().map(|&x| x.abs().powf(2.0 * (p - 1.0))).sum::<f64>() * weight).sqrt();
        res = if scale > 0.0 { g_norm / scale } else { g_norm };
        if res <= cfg.tol {
            break;
        }

        let dir = solve(&g);
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() * weight;
        if !(slope > 0.0) {
            break; // numerically flat; nothing more to gain
        }
        let mut eta = step;
        let mut accepted = false;
        for _ in 0..50 {
            let mut trial: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a - eta * b).collect();
            if normalize_p(&mut trial, weight, p) {
                let qt = quotient(&trial);
                // The decrease must clear rounding noise, otherwise the
                // iteration creeps forever at the accuracy floor.
                if qt <= q - 1e-4 * eta * slope && q - qt > 8.0 * f64::EPSILON * q.abs() {
                    let (qt, gt) = quotient_and_grad(&trial);
                    u = trial;
                    q = qt;
                    g = gt;
                    step = (eta * 1.3).min(4.0);
                    accepted = true;
                    break;
                }
            }
            eta *= 0.5;
            if eta < 1e-14 {
                break;
            }
        }
        if !accepted {
            break; // at the numerical floor for this grid
        }
    }
    RunOutcome { values: u, quotient: q, gradient_norm: res, iterations }
}

/// Axial grid and angular count chosen from the penalization strength.
fn auto_grid(lambda: f64, params: &InequalityParams, cfg: &OptimizerConfig, need_m: bool) -> Result<(Grid1D, usize)> {
    let q = params.q;
    let sqrt_l = lambda.sqrt();
    let nu0 = sqrt_l / (q - 1.0);
    let half = if cfg.half_width > 0.0 { cfg.half_width } else { 16.0 / sqrt_l };
    let n = if cfg.grid_n > 0 {
        cfg.grid_n
    } else {
        let h_target = (0.08 / nu0).min(0.09 / sqrt_l);
        let n = ((2.0 * half / h_target).ceil() as usize).clamp(321, 2001);
        n | 1 // odd, so refinements stay aligned
    };
    let m = if !need_m {
        1
    } else if cfg.grid_m > 0 {
        cfg.grid_m
    } else {
        let raw = (2.0 * std::f64::consts::PI * sqrt_l / 0.11).ceil() as usize;
        raw.next_power_of_two().clamp(32, 512)
    };
    Ok((Grid1D::symmetric(half, n)?, m))
}

fn symmetric_profile(grid: &Grid1D, lambda: f64, params: &InequalityParams) -> Vec<f64> {
    let nu0 = lambda.sqrt() / (params.q - 1.0);
    (0..grid.n())
        .map(|i| params::sech(nu0 * grid.point(i)).powf(params.q - 1.0))
        .collect()
}

fn solve_symmetric(
    lambda: f64,
    params: &InequalityParams,
    cfg: &OptimizerConfig,
    grid: Grid1D,
    warm: Option<&[f64]>,
) -> GnsState {
    let h = grid.h();
    let energy = Energy1d { h, lambda, p: params.p };
    let qf = |u: &[f64]| energy.quotient(u);
    let qg = |u: &[f64]| energy.gradient(u);
    let inv_h2 = 1.0 / (h * h);
    let solve = |g: &[f64]| {
        let mut rhs = g.to_vec();
        let mut scratch = vec![0.0; rhs.len()];
        crate::cylinder::solve_const_tridiag(2.0 * inv_h2 + lambda, -inv_h2, &mut rhs, &mut scratch);
        rhs
    };
    let mut inits: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = warm {
        inits.push(w.to_vec());
    }
    inits.push(symmetric_profile(&grid, lambda, params));
    let mut best: Option<RunOutcome> = None;
    for init in inits {
        let out = descend(init, h, params.p, cfg, &qf, &qg, &solve);
        if best.as_ref().map_or(true, |b| out.quotient < b.quotient) {
            best = Some(out);
        }
    }
    let out = best.unwrap();
    GnsState {
        field: CylinderField::Symmetric { grid, values: out.values },
        lambda,
        quotient: out.quotient,
        gradient_norm: out.gradient_norm,
        iterations: out.iterations,
        symmetric_best: true,
    }
}

fn solve_general2d(
    lambda: f64,
    params: &InequalityParams,
    cfg: &OptimizerConfig,
    grid2: Grid2D,
    warm: Option<&CylinderField>,
) -> Result<GnsState> {
    let energy = Energy2d { grid: grid2, lambda, p: params.p };
    let w = energy.w();
    let qf = |u: &[f64]| energy.quotient(u);
    let qg = |u: &[f64]| energy.gradient(u);
    let helm = SeparableHelmholtz::new(grid2);
    let solve = move |g: &[f64]| helm.solve(lambda, g);

    let (n, m) = (grid2.s.n(), grid2.m);
    let profile = symmetric_profile(&grid2.s, lambda, params);
    let broadcast = |f: &dyn Fn(usize, usize) -> f64| -> Vec<f64> {
        let mut v = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                v.push(f(i, j));
            }
        }
        v
    };

    let mut inits: Vec<Vec<f64>> = Vec::new();
    if let Some(CylinderField::General2d { grid: wg, values }) = warm {
        if *wg == grid2 {
            inits.push(values.clone());
        }
    }
    // Symmetric start and the destabilizing first-harmonic kick.
    inits.push(broadcast(&|i, _| profile[i]));
    let ht = grid2.h_theta();
    inits.push(broadcast(&|i, j| {
        profile[i] * (1.0 + 0.1 * (2.0f64).sqrt() * (ht * j as f64).cos()).max(0.0)
    }));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.starts {
        let noise: Vec<f64> = (0..n * m).map(|_| rng.random_range(-0.05..0.05)).collect();
        inits.push(
            (0..n * m)
                .map(|k| (profile[k / m] * (1.0 + noise[k])).max(0.0))
                .collect(),
        );
    }

    // Symmetric reference on the same axial grid, for the saddle flag.
    let t_sym = std::time::Instant::now();
    let sym = solve_symmetric(lambda, params, cfg, grid2.s, None);
    if std::env::var_os("KLT_TRACE").is_some() {
        eprintln!(
            "[descend1d] q={:.8} res={:.2e} iters={} {:.1?}",
            sym.quotient, sym.gradient_norm, sym.iterations, t_sym.elapsed()
        );
    }

    let trace = std::env::var_os("KLT_TRACE").is_some();
    let mut best: Option<RunOutcome> = None;
    for (k, init) in inits.into_iter().enumerate() {
        let t = std::time::Instant::now();
        let out = descend(init, w, params.p, cfg, &qf, &qg, &solve);
        if trace {
            eprintln!(
                "[descend2d] start {k}: q={:.8} res={:.2e} iters={} {:.1?}",
                out.quotient, out.gradient_norm, out.iterations, t.elapsed()
            );
        }
        if best.as_ref().map_or(true, |b| out.quotient < b.quotient) {
            best = Some(out);
        }
    }
    let out = best.unwrap();
    let margin = 20.0 * cfg.tol * sym.quotient.abs();
    if !(out.quotient < sym.quotient - margin) {
        // Nothing beat the symmetric optimum: report it, flagged.
        return Ok(GnsState { symmetric_best: true, ..sym });
    }
    Ok(GnsState {
        field: CylinderField::General2d { grid: grid2, values: out.values },
        lambda,
        quotient: out.quotient,
        gradient_norm: out.gradient_norm,
        iterations: out.iterations,
        symmetric_best: false,
    })
}

/// Optimal constant `μ(λ)` of the penalized interpolation inequality on
/// the cylinder, with the minimizing state.
pub fn gns_constant(
    lambda: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
    mode: OptMode,
    cfg: &OptimizerConfig,
) -> Result<(f64, GnsState)> {
    gns_constant_warm(lambda, params, spec, mode, cfg, None)
}

/// Same as [`gns_constant`] with an optional warm-start field (must match
/// the grid the configuration produces to be used).
pub fn gns_constant_warm(
    lambda: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
    mode: OptMode,
    cfg: &OptimizerConfig,
    warm: Option<&CylinderField>,
) -> Result<(f64, GnsState)> {
    if !(lambda > 0.0) {
        return Err(KltError::invalid(format!("gns_constant requires lambda > 0, got {lambda}")));
    }
    let trace = std::env::var_os("KLT_TRACE").is_some();
    let t0 = std::time::Instant::now();
    let state = match mode {
        OptMode::Symmetric => {
            let (grid, _) = auto_grid(lambda, params, cfg, false)?;
            let warm_vals = match warm {
                Some(CylinderField::Symmetric { grid: wg, values }) if *wg == grid => {
                    Some(values.as_slice())
                }
                _ => None,
            };
            solve_symmetric(lambda, params, cfg, grid, warm_vals)
        }
        OptMode::General2d => {
            if spec.dim != 1 {
                return Err(KltError::invalid(
                    "general2d optimization is available for M = S¹ only",
                ));
            }
            let (grid, m) = auto_grid(lambda, params, cfg, true)?;
            solve_general2d(lambda, params, cfg, Grid2D::new(grid, m)?, warm)?
        }
    };
    if trace {
        let (gn, gm) = state.field.grid_sizes();
        eprintln!(
            "[gns] lambda={lambda:.6} mode={mode:?} grid={gn}x{gm} q={:.8} res={:.2e} iters={} {:.1?}",
            state.quotient, state.gradient_norm, state.iterations, t0.elapsed()
        );
    }
    if state.gradient_norm > 100.0 * cfg.tol && state.quotient.is_finite() {
        return Err(KltError::OptimizerNonConvergence {
            iterations: state.iterations,
            residual: state.gradient_norm,
            best: Box::new(state),
        });
    }
    Ok((state.quotient, state))
}

// ---------------------------------------------------------------------------
// Λ(μ) by inverting λ ↦ μ(λ).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CapitalLambda {
    pub lambda: f64,
    pub state: GnsState,
}

/// The cylinder constant `Λ(μ)`: the value of λ with `μ(λ) = μ`, found by
/// a safeguarded secant iteration on a bracket seeded at `Λ_R(μ)` and the
/// doubled semiclassical estimate, widened geometrically on failure.
pub fn capital_lambda(
    mu: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
    mode: OptMode,
    cfg: &OptimizerConfig,
) -> Result<CapitalLambda> {
    if !(mu > 0.0) {
        return Err(KltError::invalid(format!("capital_lambda requires mu > 0, got {mu}")));
    }
    let lam_r = params::lambda_r(mu, params)?;
    // μ(λ) is nondecreasing; μ(Λ_R(μ)) <= μ with equality in the symmetric
    // regime, so Λ_R(μ) seeds the lower end (shrunk slightly for the
    // discretization bias).
    let mut lo = 0.97 * lam_r;
    // Semiclassical seed for the upper end. Norms here use the normalized
    // measure, which differs from the Riemannian one by vol(M); the round
    // sphere's volume is a serviceable stand-in for the bracket seed and
    // any shortfall is repaired by geometric widening below.
    let d = params.d;
    let vol = 2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / params::gamma_fn(d as f64 / 2.0);
    let semiclassical = line::radial_gns_constant(d, params.p)
        .map(|l1| (vol * l1 * mu.powf(params.q)).powf(1.0 / params.gamma))
        .unwrap_or(lam_r);
    let mut hi = 2.0 * lam_r.max(semiclassical);

    // Fix the discretization once for the whole root solve so warm starts
    // stay valid: window from the soft end, spacing from the stiff end.
    let mut cfg_fixed = *cfg;
    if cfg.half_width == 0.0 || cfg.grid_n == 0 || (mode == OptMode::General2d && cfg.grid_m == 0)
    {
        let (glo, _) = auto_grid(lo, params, cfg, mode == OptMode::General2d)?;
        let (ghi, mhi) = auto_grid(hi, params, cfg, mode == OptMode::General2d)?;
        if cfg_fixed.half_width == 0.0 {
            cfg_fixed.half_width = glo.s_max();
        }
        if cfg_fixed.grid_n == 0 {
            let h_target = (ghi.s_max() - ghi.s_min()) / (ghi.n() as f64 + 1.0);
            cfg_fixed.grid_n = (((2.0 * cfg_fixed.half_width) / h_target).ceil() as usize)
                .clamp(321, 4001)
                | 1;
        }
        if mode == OptMode::General2d && cfg_fixed.grid_m == 0 {
            cfg_fixed.grid_m = mhi;
        }
    }

    let mut warm: Option<CylinderField> = None;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut eval = |lambda: f64, warm: &mut Option<CylinderField>| -> Result<f64> {
        let (mu_l, state) = gns_constant_warm(lambda, params, spec, mode, &cfg_fixed, warm.as_ref())?;
        *warm = Some(state.field.clone());
        samples.push((lambda, mu_l));
        Ok(mu_l)
    };

    let mut f_lo = eval(lo, &mut warm)? - mu;
    let mut widen = 0;
    while f_lo > 0.0 {
        lo *= 0.5;
        f_lo = eval(lo, &mut warm)? - mu;
        widen += 1;
        if widen > 12 {
            return Err(KltError::Bracket {
                msg: format!("mu(lambda) exceeds {mu} even at lambda = {lo}"),
                samples,
            });
        }
    }
    let mut f_hi = eval(hi, &mut warm)? - mu;
    widen = 0;
    while f_hi < 0.0 {
        hi *= 4.0;
        f_hi = eval(hi, &mut warm)? - mu;
        widen += 1;
        if widen > 12 {
            return Err(KltError::Bracket {
                msg: format!("mu(lambda) below {mu} even at lambda = {hi}"),
                samples,
            });
        }
    }

    // Illinois-damped regula falsi with a bisection safeguard.
    for _ in 0..80 {
        if (hi - lo) <= cfg.lambda_tol * hi {
            break;
        }
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        let lambda = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let f_mid = eval(lambda, &mut warm)? - mu;
        if f_mid == 0.0 {
            lo = lambda;
            hi = lambda;
            break;
        } else if f_mid < 0.0 {
            if f_lo < 0.0 {
                f_hi *= 0.5; // Illinois damping keeps the secant moving
            }
            lo = lambda;
            f_lo = f_mid;
        } else {
            if f_hi > 0.0 {
                f_lo *= 0.5;
            }
            hi = lambda;
            f_hi = f_mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let (_, state) = gns_constant_warm(lambda, params, spec, mode, &cfg_fixed, warm.as_ref())?;
    Ok(CapitalLambda { lambda, state })
}

// ---------------------------------------------------------------------------
// The potential functional J[V] and the dual correspondence.
// ---------------------------------------------------------------------------

/// `J[V] = (‖V‖_q^q - ‖∂_s V^((q-1)/2)‖² - ‖∇_g V^((q-1)/2)‖²) / ‖V^((q-1)/2)‖₂²`.
pub fn evaluate_j(v: &CylinderPotential, params: &InequalityParams) -> Result<f64> {
    let q = params.q;
    let e = (q - 1.0) / 2.0;
    match v {
        CylinderPotential::Symmetric(v1) => {
            if v1.values.iter().any(|&x| x < 0.0) {
                return Err(KltError::Domain("J[V] requires V >= 0".into()));
            }
            let h = v1.grid.h();
            let u: Vec<f64> = v1.values.iter().map(|&x| x.powf(e)).collect();
            let l2: f64 = u.iter().map(|&x| x * x).sum::<f64>() * h;
            if l2 == 0.0 {
                return Err(KltError::Domain("J[V] undefined for V = 0".into()));
            }
            let norm_q_pow: f64 = v1.values.iter().map(|&x| x.powf(q)).sum::<f64>() * h;
            let dir = Energy1d { h, lambda: 0.0, p: params.p }.dirichlet(&u);
            Ok((norm_q_pow - dir) / l2)
        }
        CylinderPotential::General2d { grid, values } => {
            if values.iter().any(|&x| x < 0.0) {
                return Err(KltError::Domain("J[V] requires V >= 0".into()));
            }
            let w = grid.cell_weight();
            let u: Vec<f64> = values.iter().map(|&x| x.powf(e)).collect();
            let l2: f64 = u.iter().map(|&x| x * x).sum::<f64>() * w;
            if l2 == 0.0 {
                return Err(KltError::Domain("J[V] undefined for V = 0".into()));
            }
            let norm_q_pow: f64 = values.iter().map(|&x| x.powf(q)).sum::<f64>() * w;
            let dir = Energy2d { grid: *grid, lambda: 0.0, p: params.p }.dirichlet(&u);
            Ok((norm_q_pow - dir) / l2)
        }
    }
}

/// Optimal potential associated to a state through the Hölder equality
/// case: `V = μ u^(p-2) / ‖u‖_p^(p-2)`; `‖V‖_q = μ` holds exactly on the
/// grid.
pub fn potential_from_state(
    state: &GnsState,
    mu: f64,
    params: &InequalityParams,
) -> Result<CylinderPotential> {
    if !(mu > 0.0) {
        return Err(KltError::invalid("potential_from_state requires mu > 0"));
    }
    let pm2 = params.p - 2.0;
    match &state.field {
        CylinderField::Symmetric { grid, values } => {
            let h = grid.h();
            let s: f64 = values.iter().map(|&x| x.abs().powf(params.p)).sum::<f64>() * h;
            let scale = mu / s.powf(pm2 / params.p);
            let v: Vec<f64> = values.iter().map(|&x| scale * x.abs().powf(pm2)).collect();
            Ok(CylinderPotential::Symmetric(SampledPotential1D::new(*grid, v)?))
        }
        CylinderField::General2d { grid, values } => {
            let w = grid.cell_weight();
            let s: f64 = values.iter().map(|&x| x.abs().powf(params.p)).sum::<f64>() * w;
            let scale = mu / s.powf(pm2 / params.p);
            let v: Vec<f64> = values.iter().map(|&x| scale * x.abs().powf(pm2)).collect();
            CylinderPotential::general2d(*grid, v)
        }
    }
}

// ---------------------------------------------------------------------------
// The rigidity functional K[p_V].
// ---------------------------------------------------------------------------

/// Pressure function of an axial potential: `p_V(r) = r V(s)^(-1/2)` with
/// `r = e^(-αs)`, `α = √Λ_R(μ)/(q-1)`, tabulated over the axial window
/// where `V >= 1e-10 · max V`. The measure on `r` carries the density
/// `r^(2q-1)`.
#[derive(Debug, Clone)]
pub struct PressureData {
    pub alpha: f64,
    /// Axial coordinates of the kept window.
    pub s_points: Vec<f64>,
    /// `p_V` at those points (equal to `w(s) = e^(-αs) V(s)^(-1/2)`).
    pub values: Vec<f64>,
    /// Grid spacing of the window.
    pub h: f64,
}

impl PressureData {
    pub fn from_potential(
        v: &SampledPotential1D,
        mu: f64,
        params: &InequalityParams,
    ) -> Result<Self> {
        let lam_r = params::lambda_r(mu, params)?;
        let alpha = lam_r.sqrt() / (params.q - 1.0);
        let max_v = v.values.iter().cloned().fold(0.0f64, f64::max);
        if !(max_v > 0.0) {
            return Err(KltError::Domain("pressure requires a nontrivial positive potential".into()));
        }
        let floor = 1e-10 * max_v;
        let i0 = v.values.iter().position(|&x| x >= floor).unwrap();
        let i1 = v.values.iter().rposition(|&x| x >= floor).unwrap();
        if v.values[i0..=i1].iter().any(|&x| x < floor) {
            return Err(KltError::Domain(
                "potential touches zero inside the evaluation window".into(),
            ));
        }
        if i1 - i0 < 8 {
            return Err(KltError::Domain("evaluation window too narrow".into()));
        }
        let s_points: Vec<f64> = (i0..=i1).map(|i| v.grid.point(i)).collect();
        let values = s_points
            .iter()
            .zip(&v.values[i0..=i1])
            .map(|(&s, &vi)| (-alpha * s).exp() / vi.sqrt())
            .collect();
        Ok(PressureData { alpha, s_points, values, h: v.grid.h() })
    }

    /// Radius coordinate `r = e^(-αs)` of window point `k`.
    pub fn r(&self, k: usize) -> f64 {
        (-self.alpha * self.s_points[k]).exp()
    }
}

/// `K[p_V]` in axial coordinates. The pressure is `p_V(r) = r V^(-1/2)`
/// with `r = e^(-αs)`, `α = √Λ_R(μ)/(q-1)`; in terms of
/// `w(s) = e^(-αs) V(s)^(-1/2)` the three terms reduce to integrals of
/// `(w_ss + 2α w_s - w_θθ/(2q-1))²`, `(w_sθ + α w_θ)²` and `w_θ²` against
/// the weight `w^(1-2q) e^(-(2q-4)αs)`, each carrying one factor α from
/// the change of measure.
///
/// Evaluation is restricted to the axial window where
/// `V >= 1e-10 · max V`; a potential vanishing inside that window is a
/// domain error.
pub fn evaluate_k(
    v: &CylinderPotential,
    mu: f64,
    params: &InequalityParams,
    rp: &RigidityParams,
    _spec: &ManifoldSpec,
) -> Result<f64> {
    let q = params.q;
    let lam_r = params::lambda_r(mu, params)?;
    let alpha = lam_r.sqrt() / (q - 1.0);
    let lam_star = params::lambda_star(rp, params.d)?;
    let third_coeff = lam_star - 2.0 * lam_r / (q - 1.0);

    match v {
        CylinderPotential::Symmetric(v1) => {
            let p = PressureData::from_potential(v1, mu, params)?;
            let h = p.h;
            let w = &p.values;
            let nw = w.len();
            let mut acc = 0.0;
            for k in 1..nw - 1 {
                let ws = (w[k + 1] - w[k - 1]) / (2.0 * h);
                let wss = (w[k + 1] - 2.0 * w[k] + w[k - 1]) / (h * h);
                let weight =
                    w[k].powf(1.0 - 2.0 * q) * (-(2.0 * q - 4.0) * alpha * p.s_points[k]).exp();
                acc += (wss + 2.0 * alpha * ws).powi(2) * weight;
            }
            Ok((2.0 * q - 1.0) / (2.0 * q) * alpha * acc * h)
        }
        CylinderPotential::General2d { grid, values } => {
            let n = grid.s.n();
            let m = grid.m;
            let h = grid.s.h();
            let ht = grid.h_theta();
            let max_v = values.iter().cloned().fold(0.0f64, f64::max);
            if !(max_v > 0.0) {
                return Err(KltError::Domain("K requires a nontrivial positive potential".into()));
            }
            let floor = 1e-10 * max_v;
            let row_min = |i: usize| {
                values[i * m..(i + 1) * m].iter().cloned().fold(f64::MAX, f64::min)
            };
            let i0 = (0..n)
                .find(|&i| row_min(i) >= floor)
                .ok_or_else(|| KltError::Domain("potential below floor everywhere".into()))?;
            let i1 = (0..n).rev().find(|&i| row_min(i) >= floor).unwrap();
            if (i0..=i1).any(|i| row_min(i) < floor) {
                return Err(KltError::Domain(
                    "potential touches zero inside the evaluation window".into(),
                ));
            }
            if i1 - i0 < 8 {
                return Err(KltError::Domain("evaluation window too narrow for K".into()));
            }
            let nw = i1 - i0 + 1;
            let mut w = vec![0.0; nw * m];
            for k in 0..nw {
                let s = grid.s.point(i0 + k);
                let es = (-alpha * s).exp();
                for j in 0..m {
                    w[k * m + j] = es / values[(i0 + k) * m + j].sqrt();
                }
            }
            let at = |k: usize, j: usize| w[k * m + (j % m)];
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            let mut t3 = 0.0;
            for k in 1..nw - 1 {
                let s = grid.s.point(i0 + k);
                let env = (-(2.0 * q - 4.0) * alpha * s).exp();
                for j in 0..m {
                    let jl = (j + m - 1) % m;
                    let jr = (j + 1) % m;
                    let ws = (at(k + 1, j) - at(k - 1, j)) / (2.0 * h);
                    let wss = (at(k + 1, j) - 2.0 * at(k, j) + at(k - 1, j)) / (h * h);
                    let wt = (at(k, jr) - at(k, jl)) / (2.0 * ht);
                    let wtt = (at(k, jr) - 2.0 * at(k, j) + at(k, jl)) / (ht * ht);
                    let wst = (at(k + 1, jr) - at(k + 1, jl) - at(k - 1, jr) + at(k - 1, jl))
                        / (4.0 * h * ht);
                    let weight = at(k, j).powf(1.0 - 2.0 * q) * env;
                    t1 += (wss + 2.0 * alpha * ws - wtt / (2.0 * q - 1.0)).powi(2) * weight;
                    t2 += (wst + alpha * wt).powi(2) * weight;
                    t3 += wt * wt * weight;
                }
            }
            let cell = h / m as f64;
            Ok((2.0 * q - 1.0) / (2.0 * q) * alpha * t1 * cell
                + 2.0 * alpha * t2 * cell
                + third_coeff * alpha * t3 * cell)
        }
    }
}

// ---------------------------------------------------------------------------
// Symmetry detector and threshold search.
// ---------------------------------------------------------------------------

/// Fraction of the discrete Dirichlet energy carried by the nonzero
/// angular modes (the angular mean and its complement are energy-orthogonal
/// on the uniform grid).
pub fn symmetry_fraction(state: &GnsState) -> f64 {
    match &state.field {
        CylinderField::Symmetric { .. } => 0.0,
        CylinderField::General2d { grid, values } => {
            let n = grid.s.n();
            let m = grid.m;
            let mean: Vec<f64> = (0..n)
                .map(|i| values[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64)
                .collect();
            let e2 = Energy2d { grid: *grid, lambda: 0.0, p: 2.0 };
            let total = e2.dirichlet(values);
            if !(total > 0.0) {
                return 0.0;
            }
            let e1 = Energy1d { h: grid.s.h(), lambda: 0.0, p: 2.0 };
            let sym = e1.dirichlet(&mean);
            ((total - sym) / total).max(0.0)
        }
    }
}

/// Detector threshold on [`symmetry_fraction`] below which a converged
/// state counts as symmetric.
pub const SYMMETRY_FRACTION_CUT: f64 = 1e-4;

/// Bracket the symmetry-breaking threshold `μ*`.
///
/// For `d = 2` each probe runs the full 2D optimizer at `λ = Λ_R(μ)` and
/// tests the converged symmetry fraction; for `d >= 3` the probe is the
/// sign of the closed-form instability coefficient. The initial bracket
/// comes from the rigidity bounds widened by 25–35%; a detector that is
/// not monotone across it is reported as inconclusive.
pub fn threshold_search(
    params: &InequalityParams,
    spec: &ManifoldSpec,
    cfg: &OptimizerConfig,
) -> Result<(f64, f64)> {
    let rp = RigidityParams::standard(params, spec.kappa, spec.lambda1());
    let (b_lo, b_hi) = params::mu_star_bounds(&rp, params)?;
    let mut lo = 0.75 * if b_lo > 0.0 { b_lo } else { 0.5 * b_hi };
    let mut hi = 1.35 * b_hi;

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let broken = |mu: f64, samples: &mut Vec<(f64, f64)>| -> Result<bool> {
        if params.d == 2 {
            let lam = params::lambda_r(mu, params)?;
            let (_, state) = gns_constant(lam, params, spec, OptMode::General2d, cfg)?;
            let frac = symmetry_fraction(&state);
            samples.push((mu, frac));
            Ok(frac > SYMMETRY_FRACTION_CUT)
        } else {
            let c = crate::cylinder::instability_coefficient(mu, params, spec)?;
            samples.push((mu, c));
            Ok(c < 0.0)
        }
    };

    if hi - lo <= cfg.threshold_tol * 0.5 * (hi + lo) {
        return Ok((lo, hi));
    }
    if broken(lo, &mut samples)? {
        return Err(KltError::Inconclusive {
            msg: format!("symmetry already broken at the lower bracket end mu = {lo}"),
            samples,
        });
    }
    if !broken(hi, &mut samples)? {
        return Err(KltError::Inconclusive {
            msg: format!("no symmetry breaking detected at the upper bracket end mu = {hi}"),
            samples,
        });
    }
    while hi - lo > cfg.threshold_tol * 0.5 * (hi + lo) {
        let mid = 0.5 * (lo + hi);
        if broken(mid, &mut samples)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------------------
// Machine-readable records.
// ---------------------------------------------------------------------------

/// One sweep row; serialized as a single JSON object per line.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub schema: u32,
    pub mu: f64,
    pub lambda: f64,
    pub lambda_r: f64,
    pub symmetry_fraction: f64,
    pub iterations: usize,
    pub residual: f64,
    pub grid_n: usize,
    pub grid_m: usize,
    pub tol: f64,
}

pub const SCHEMA_VERSION: u32 = 1;

impl SweepRecord {
    pub fn from_state(mu: f64, lambda: f64, lambda_r: f64, state: &GnsState, tol: f64) -> Self {
        let (grid_n, grid_m) = state.field.grid_sizes();
        SweepRecord {
            schema: SCHEMA_VERSION,
            mu,
            lambda,
            lambda_r,
            symmetry_fraction: symmetry_fraction(state),
            iterations: state.iterations,
            residual: state.gradient_norm,
            grid_n,
            grid_m,
            tol,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("sweep record serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::sphere_spec;
    use crate::params::{lambda_r, make_params, mu_one, optimal_potential};

    fn quick_cfg() -> OptimizerConfig {
        OptimizerConfig { tol: 1e-7, ..OptimizerConfig::default() }
    }

    #[test]
    fn config_parse_roundtrip() {
        let cfg = OptimizerConfig::parse(
            "# comment\nstep = 0.25\ntol=1e-6\nmax_iter=500\nstarts=2\ngrid_n=401\nseed=9\n",
        )
        .unwrap();
        assert_eq!(cfg.max_iter, 500);
        assert_eq!(cfg.starts, 2);
        assert_eq!(cfg.grid_n, 401);
        assert!((cfg.step - 0.25).abs() < 1e-15);
        assert!(OptimizerConfig::parse("nonsense\n").is_err());
        assert!(OptimizerConfig::parse("unknown_key=1\n").is_err());
    }

    #[test]
    fn symmetric_constant_matches_closed_form() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = quick_cfg();
        for &lam in &[0.6, 1.0, 2.5] {
            let (mu_l, state) = gns_constant(lam, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
            let closed = crate::params::invert_lambda_r(lam, &pr).unwrap();
            assert!(
                (mu_l - closed).abs() < 1e-3 * closed,
                "lambda={lam}: {mu_l} vs {closed}"
            );
            assert!(state.gradient_norm <= 1e-6);
        }
    }

    #[test]
    fn symmetric_minimizer_is_the_sech_profile() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let (_, state) = gns_constant(1.0, &pr, &circle, OptMode::Symmetric, &quick_cfg()).unwrap();
        if let CylinderField::Symmetric { grid, values } = &state.field {
            // Normalize the exact profile the same way (‖·‖_p = 1).
            let h = grid.h();
            let exact: Vec<f64> = (0..grid.n()).map(|i| 1.0 / grid.point(i).cosh()).collect();
            let s: f64 = exact.iter().map(|&x| x.powf(pr.p)).sum::<f64>() * h;
            let scale = s.powf(-1.0 / pr.p);
            let mut max_err = 0.0f64;
            for (a, b) in values.iter().zip(&exact) {
                max_err = max_err.max((a - b * scale).abs());
            }
            assert!(max_err < 5e-3, "profile error {max_err}");
        } else {
            panic!("expected symmetric field");
        }
    }

    #[test]
    fn mu_lambda_nondecreasing() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = quick_cfg();
        let mut prev = 0.0;
        for &lam in &[0.3, 0.6, 1.2, 2.4] {
            let (mu_l, _) = gns_constant(lam, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
            assert!(mu_l >= prev - 1e-9, "mu({lam}) = {mu_l} below previous {prev}");
            prev = mu_l;
        }
    }

    #[test]
    fn general2d_beats_symmetric_past_threshold() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = OptimizerConfig { grid_n: 501, grid_m: 48, ..quick_cfg() };
        let lam = 10.0; // far above the instability value 1/3
        let (mu_sym, _) = gns_constant(lam, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
        let (mu_2d, state) = gns_constant(lam, &pr, &circle, OptMode::General2d, &cfg).unwrap();
        assert!(
            mu_2d < mu_sym * (1.0 - 1e-3),
            "broken minimizer does not beat symmetric: {mu_2d} vs {mu_sym}"
        );
        assert!(!state.symmetric_best);
        assert!(symmetry_fraction(&state) > 1e-2);
    }

    #[test]
    fn general2d_stays_symmetric_below_threshold() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = OptimizerConfig { grid_n: 401, grid_m: 32, ..quick_cfg() };
        let lam = 0.2; // below the instability value 1/3
        let (mu_2d, state) = gns_constant(lam, &pr, &circle, OptMode::General2d, &cfg).unwrap();
        let (mu_sym, _) = gns_constant(lam, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
        assert!(state.symmetric_best);
        assert!((mu_2d - mu_sym).abs() <= 1e-6 * mu_sym);
        assert_eq!(symmetry_fraction(&state), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let pr = make_params(2, 2.0).unwrap();
        let grid = Grid1D::symmetric(8.0, 101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let values: Vec<f64> = (0..101)
            .map(|i| {
                let s = grid.point(i);
                (-(s * s) / 4.0).exp() * (1.0 + 0.3 * rng.random_range(-1.0..1.0))
            })
            .collect();
        let field = CylinderField::Symmetric { grid, values: values.clone() };
        let lambda = 1.3;
        let (_, g) = gns_quotient_and_gradient(&field, lambda, &pr);
        let h_grid = grid.h();
        let e = Energy1d { h: h_grid, lambda, p: pr.p };
        for _ in 0..10 {
            let dir: Vec<f64> = (0..101).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = 3e-6;
            let up: Vec<f64> = values.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let dn: Vec<f64> = values.iter().zip(&dir).map(|(a, b)| a - t * b).collect();
            let fd = (e.quotient(&up) - e.quotient(&dn)) / (2.0 * t);
            let an: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() * h_grid;
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1e-3),
                "directional derivative mismatch: fd {fd} vs analytic {an}"
            );
        }
    }

    #[test]
    fn duality_gap_vanishes_at_converged_states() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = quick_cfg();
        let lam = 1.0;
        let (mu_l, state) = gns_constant(lam, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
        let v = potential_from_state(&state, mu_l, &pr).unwrap();
        // Exact discrete norm identity ‖V‖_q = μ.
        let norm = v.lq_norm(pr.q).unwrap();
        assert!((norm - mu_l).abs() < 1e-10 * mu_l, "{norm} vs {mu_l}");
        let j = evaluate_j(&v, &pr).unwrap();
        assert!((j - lam).abs() < 1e-3 * lam, "J = {j} vs lambda = {lam}");
    }

    #[test]
    fn duality_holds_for_broken_states_too() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = OptimizerConfig { grid_n: 401, grid_m: 32, ..quick_cfg() };
        let lam = 2.0; // above the instability value
        let (mu_l, state) = gns_constant(lam, &pr, &circle, OptMode::General2d, &cfg).unwrap();
        assert!(!state.symmetric_best);
        let v = potential_from_state(&state, mu_l, &pr).unwrap();
        let norm = v.lq_norm(pr.q).unwrap();
        assert!((norm - mu_l).abs() < 1e-10 * mu_l);
        let j = evaluate_j(&v, &pr).unwrap();
        assert!((j - lam).abs() < 1e-3 * lam, "J = {j} vs lambda = {lam}");
    }

    #[test]
    fn j_reference_values() {
        let pr = make_params(2, 2.0).unwrap();
        let m1 = mu_one(&pr);
        // Optimal family below threshold: J[V_{1,μ}] = Λ_R(μ).
        let mu = 0.8 * m1;
        let vopt = optimal_potential(mu, &pr).unwrap();
        let v = CylinderPotential::Symmetric(vopt.sample(vopt.default_grid(2001).unwrap()));
        let j = evaluate_j(&v, &pr).unwrap();
        let expect = lambda_r(mu, &pr).unwrap();
        assert!((j - expect).abs() < 1e-3 * expect, "{j} vs {expect}");
        // Scaling consistency J[V_ν] = ν² J[V].
        if let CylinderPotential::Symmetric(v1) = &v {
            let scaled = crate::line::scale_potential(v1, 2.0).unwrap();
            let j2 = evaluate_j(&CylinderPotential::Symmetric(scaled), &pr).unwrap();
            assert!((j2 / j - 4.0).abs() < 1e-3, "ratio {}", j2 / j);
        }
        // A plateau is admissible and stays below the optimum.
        let grid = Grid1D::symmetric(12.0, 801).unwrap();
        let plat = SampledPotential1D::from_fn(grid, |s| if s.abs() < 2.0 { 1.0 } else { 0.0 });
        let mu_p = crate::line::lq_norm_1d(&plat, pr.q).unwrap();
        let jp = evaluate_j(&CylinderPotential::Symmetric(plat), &pr).unwrap();
        assert!(jp.is_finite());
        assert!(jp < lambda_r(mu_p, &pr).unwrap());
    }

    #[test]
    fn optimal_profile_maps_back_to_optimal_potential() {
        // u = φ_μ produces V = V_{1,μ} through the Hölder equality map.
        let pr = make_params(2, 2.0).unwrap();
        let mu = 1.6 * mu_one(&pr);
        let phi = crate::params::optimal_eigenfunction(mu, &pr).unwrap();
        let vopt = optimal_potential(mu, &pr).unwrap();
        let grid = vopt.default_grid(4001).unwrap();
        let values: Vec<f64> = (0..grid.n()).map(|i| phi.eval(grid.point(i))).collect();
        let state = GnsState {
            field: CylinderField::Symmetric { grid, values },
            lambda: 0.0,
            quotient: 0.0,
            gradient_norm: 0.0,
            iterations: 0,
            symmetric_best: true,
        };
        let v = potential_from_state(&state, mu, &pr).unwrap();
        if let CylinderPotential::Symmetric(v1) = v {
            let mut max_rel = 0.0f64;
            for (i, &vi) in v1.values.iter().enumerate() {
                let exact = vopt.eval(grid.point(i));
                if exact > 1e-12 {
                    max_rel = max_rel.max((vi / exact - 1.0).abs());
                }
            }
            assert!(max_rel < 1e-9, "pointwise mismatch {max_rel}");
        } else {
            panic!("expected symmetric potential");
        }
    }

    #[test]
    fn third_term_coefficient_flips_at_lower_rigidity_bound() {
        // λ* - 2Λ_R(μ)/(q-1) changes sign exactly at the lower end of the
        // μ* interval.
        let pr = make_params(2, 2.5).unwrap();
        let rp = RigidityParams::standard(&pr, 0.0, 1.0);
        let (lower, _) = crate::params::mu_star_bounds(&rp, &pr).unwrap();
        let lam_star = crate::params::lambda_star(&rp, 2).unwrap();
        let coeff = |mu: f64| lam_star - 2.0 * lambda_r(mu, &pr).unwrap() / (pr.q - 1.0);
        assert!(coeff(lower * (1.0 - 1e-6)) > 0.0);
        assert!(coeff(lower * (1.0 + 1e-6)) < 0.0);
        assert!(coeff(lower).abs() < 1e-10);
    }

    #[test]
    fn pressure_data_closed_form() {
        // For the optimal family p(r) = (r² + 1)/(2ν√(q(q-1))).
        let pr = make_params(2, 2.0).unwrap();
        let mu = 1.2 * mu_one(&pr);
        let vopt = optimal_potential(mu, &pr).unwrap();
        let grid = Grid1D::symmetric(10.0 / vopt.nu, 1001).unwrap();
        let v = vopt.sample(grid);
        let p = PressureData::from_potential(&v, mu, &pr).unwrap();
        assert!((p.alpha - vopt.nu).abs() < 1e-12);
        let denom = 2.0 * vopt.nu * (pr.q * (pr.q - 1.0)).sqrt();
        let mut max_err = 0.0f64;
        for k in 0..p.values.len() {
            let r = p.r(k);
            let exact = (r * r + 1.0) / denom;
            max_err = max_err.max((p.values[k] - exact).abs() / exact);
        }
        assert!(max_err < 1e-12, "pressure closed form error {max_err}");
    }

    #[test]
    fn k_vanishes_exactly_on_the_optimal_family() {
        let pr = make_params(2, 2.0).unwrap();
        let m1 = mu_one(&pr);
        let circle = sphere_spec(2, 2).unwrap();
        let rp = RigidityParams::standard(&pr, 0.0, 1.0);
        for &f in &[0.5, 1.0, 2.0] {
            let mu = f * m1;
            let vopt = optimal_potential(mu, &pr).unwrap();
            let grid = Grid1D::symmetric(12.0 / vopt.nu, 2001).unwrap();
            let v = CylinderPotential::Symmetric(vopt.sample(grid));
            let k = evaluate_k(&v, mu, &pr, &rp, &circle).unwrap();
            assert!(k.abs() < 1e-6, "K = {k} at mu = {f} mu1");
        }
    }

    #[test]
    fn k_positive_off_the_optimal_family() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 2).unwrap();
        let rp = RigidityParams::standard(&pr, 0.0, 1.0);
        let grid = Grid1D::symmetric(8.0, 1201).unwrap();
        let g = SampledPotential1D::from_fn(grid, |s| 2.0 * (-(s * s) / 3.0).exp());
        let mu = crate::line::lq_norm_1d(&g, pr.q).unwrap();
        let k = evaluate_k(&CylinderPotential::Symmetric(g), mu, &pr, &rp, &circle).unwrap();
        assert!(k > 1e-6, "K = {k}");
    }

    #[test]
    fn k_domain_error_on_interior_zero() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 2).unwrap();
        let rp = RigidityParams::standard(&pr, 0.0, 1.0);
        let grid = Grid1D::symmetric(8.0, 801).unwrap();
        let v = SampledPotential1D::from_fn(grid, |s| {
            if s.abs() < 0.5 {
                0.0
            } else {
                (-(s.abs() - 0.5)).exp()
            }
        });
        let r = evaluate_k(&CylinderPotential::Symmetric(v), 1.0, &pr, &rp, &circle);
        assert!(matches!(r, Err(KltError::Domain(_))));
    }

    #[test]
    fn symmetry_fraction_detects_modulation() {
        let pr = make_params(2, 2.0).unwrap();
        let sgrid = Grid1D::symmetric(10.0, 201).unwrap();
        let grid = Grid2D::new(sgrid, 32).unwrap();
        let phi: Vec<f64> = (0..201).map(|i| 1.0 / sgrid.point(i).cosh()).collect();
        let mut flat = Vec::new();
        let mut modulated = Vec::new();
        for i in 0..201 {
            for j in 0..32 {
                let t = grid.h_theta() * j as f64;
                flat.push(phi[i]);
                modulated.push(phi[i] * (1.0 + 0.3 * t.cos()));
            }
        }
        let mk = |values: Vec<f64>| GnsState {
            field: CylinderField::General2d { grid, values },
            lambda: 1.0,
            quotient: 1.0,
            gradient_norm: 0.0,
            iterations: 0,
            symmetric_best: false,
        };
        assert!(symmetry_fraction(&mk(flat)) < 1e-14);
        let frac = symmetry_fraction(&mk(modulated));
        // Regression value for the 0.3 cos θ modulation of the sech profile
        // on this grid (energy split: 4.5% axial + first-harmonic angular).
        assert!(frac > 0.05 && frac < 0.30, "fraction {frac}");
        let _ = pr;
    }

    #[test]
    fn threshold_degenerate_tolerance_returns_initial_bracket() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 2).unwrap();
        let cfg = OptimizerConfig { threshold_tol: 10.0, ..quick_cfg() };
        let (lo, hi) = threshold_search(&pr, &circle, &cfg).unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn threshold_by_instability_for_higher_dimensions() {
        let pr = make_params(3, 2.0).unwrap();
        let s2 = sphere_spec(3, 3).unwrap();
        let cfg = OptimizerConfig { threshold_tol: 0.01, ..quick_cfg() };
        let (lo, hi) = threshold_search(&pr, &s2, &cfg).unwrap();
        // For spheres the rigidity interval collapses, so the numerical
        // bracket must straddle the closed-form point.
        let rp = RigidityParams::standard(&pr, s2.kappa, s2.lambda1());
        let (_, mu_star) = crate::params::mu_star_bounds(&rp, &pr).unwrap();
        assert!(lo <= mu_star && mu_star <= hi, "[{lo}, {hi}] vs {mu_star}");
    }

    #[test]
    fn capital_lambda_gap_above_threshold_regression() {
        // Past the threshold the cylinder constant exceeds the line value
        // by a definite margin; the value at 1.2 mu* on this grid is kept
        // as a regression band (1.15e-2 when recorded).
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let mu_star = mu_one(&pr) * 3.0f64.powf(-0.75);
        let cfg = OptimizerConfig {
            grid_n: 301,
            grid_m: 32,
            lambda_tol: 3e-4,
            ..OptimizerConfig::default()
        };
        let mu = 1.2 * mu_star;
        let out = capital_lambda(mu, &pr, &circle, OptMode::General2d, &cfg).unwrap();
        let gap = out.lambda - lambda_r(mu, &pr).unwrap();
        assert!(
            gap > 1.0e-2 && gap < 1.3e-2,
            "gap at 1.2 mu* drifted out of the regression band: {gap:.4e}"
        );
    }

    #[test]
    fn capital_lambda_symmetric_matches_line_constant() {
        let pr = make_params(2, 2.0).unwrap();
        let circle = sphere_spec(2, 4).unwrap();
        let cfg = quick_cfg();
        let mu = 0.8 * mu_one(&pr);
        let out = capital_lambda(mu, &pr, &circle, OptMode::Symmetric, &cfg).unwrap();
        let expect = lambda_r(mu, &pr).unwrap();
        assert!(
            (out.lambda - expect).abs() < 2e-3 * expect,
            "{} vs {expect}",
            out.lambda
        );
    }

    #[test]
    fn sweep_record_is_deterministic_json() {
        let grid = Grid1D::symmetric(5.0, 33).unwrap();
        let state = GnsState {
            field: CylinderField::Symmetric { grid, values: vec![0.0; 33] },
            lambda: 1.5,
            quotient: 2.0,
            gradient_norm: 1e-8,
            iterations: 12,
            symmetric_best: true,
        };
        let rec = SweepRecord::from_state(1.0, 1.5, 1.4, &state, 1e-7);
        let a = rec.to_json_line();
        let b = rec.to_json_line();
        assert_eq!(a, b);
        assert!(a.starts_with("{\"schema\":1,"));
    }
}
