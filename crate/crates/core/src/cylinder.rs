//! Ground states on the cylinder `R x M`.
//!
//! For potentials depending only on the axial variable the problem splits
//! over the Laplace–Beltrami modes of `M` into shifted 1D problems. For
//! `d = 2` (`M = S¹`) a dense five-point discretization solved by shifted
//! inverse-power iteration serves as an independent oracle. The module
//! also carries the second-variation instability tests that certify
//! symmetry breaking.

use crate::error::{KltError, Result};
use crate::fourier;
use crate::grid::Grid1D;
use crate::line::{self, SampledPotential1D, SpectralResult};
use crate::manifold::ManifoldSpec;
use crate::params::{self, InequalityParams};
use std::fmt::Write as _;
use std::path::Path;

/// Cells allowed in the dense 2D oracle.
pub const ORACLE_CELL_LIMIT: usize = 200_000;

/// Axial grid plus a uniform angular grid of `m` points on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub s: Grid1D,
    pub m: usize,
}

impl Grid2D {
    pub fn new(s: Grid1D, m: usize) -> Result<Self> {
        if m < 4 {
            return Err(KltError::invalid(format!("angular grid needs at least 4 points, got {m}")));
        }
        Ok(Grid2D { s, m })
    }

    pub fn h_theta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.m as f64
    }

    pub fn cells(&self) -> usize {
        self.s.n() * self.m
    }

    /// Weight of one cell under the normalized cylinder measure
    /// `ds · dθ/(2π)`.
    pub fn cell_weight(&self) -> f64 {
        self.s.h() / self.m as f64
    }
}

/// Potential on the cylinder: either axial samples (any `d`) or a full
/// `n x m` matrix for `M = S¹` (row-major, `values[i*m + j] = V(s_i, θ_j)`).
#[derive(Debug, Clone)]
pub enum CylinderPotential {
    Symmetric(SampledPotential1D),
    General2d { grid: Grid2D, values: Vec<f64> },
}

impl CylinderPotential {
    pub fn general2d(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(KltError::invalid(format!(
                "value count {} does not match {}x{} grid",
                values.len(),
                grid.s.n(),
                grid.m
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KltError::invalid("potential samples must be finite"));
        }
        Ok(CylinderPotential::General2d { grid, values })
    }

    /// Broadcast axial samples over `m` angular points.
    pub fn broadcast(v: &SampledPotential1D, m: usize) -> Result<Self> {
        let grid = Grid2D::new(v.grid, m)?;
        let mut values = Vec::with_capacity(grid.cells());
        for &x in &v.values {
            for _ in 0..m {
                values.push(x);
            }
        }
        Ok(CylinderPotential::General2d { grid, values })
    }

    /// `‖V‖_{L^q}` under the volume-normalized cylinder measure; for
    /// symmetric potentials this equals the line norm.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        match self {
            CylinderPotential::Symmetric(v) => line::lq_norm_1d(v, q),
            CylinderPotential::General2d { grid, values } => {
                if !(q >= 1.0) {
                    return Err(KltError::invalid(format!("lq_norm requires q >= 1, got {q}")));
                }
                let acc: f64 = values.iter().map(|&x| x.abs().powf(q)).sum();
                Ok((acc * grid.cell_weight()).powf(1.0 / q))
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            CylinderPotential::Symmetric(v) => v.values.iter().cloned().fold(f64::MIN, f64::max),
            CylinderPotential::General2d { values, .. } => {
                values.iter().cloned().fold(f64::MIN, f64::max)
            }
        }
    }
}

/// Per-mode bottom eigenvalues `e_ℓ` of `-d²/ds² + λ_ℓ - V(s)`.
#[derive(Debug, Clone)]
pub struct ModeEntry {
    pub ell: usize,
    pub lambda_ell: f64,
    pub multiplicity: u32,
    pub e_ell: f64,
}

#[derive(Debug, Clone)]
pub struct ModeResult {
    pub modes: Vec<ModeEntry>,
    /// Overall bottom eigenvalue, `min_ℓ e_ℓ`.
    pub eigenvalue: f64,
    /// Index of the minimizing mode.
    pub min_mode: usize,
    /// The underlying axial solve (mode 0).
    pub base: SpectralResult,
}

impl ModeResult {
    /// CSV export with the fixed header `ell,lambda_ell,e_ell`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,lambda_ell,e_ell\n");
        for m in &self.modes {
            let _ = writeln!(out, "{},{},{}", m.ell, m.lambda_ell, m.e_ell);
        }
        out
    }
}

/// Ground state of `-d²/ds² - Δ_g - V` for an axial potential, by mode
/// decomposition: `e_ℓ = e_0 + λ_ℓ` where `e_0` is the bottom of the 1D
/// problem. Modes are listed up to `l_max` or, by default, up to the first
/// `λ_ℓ` exceeding `sup V + |e_0|` (no lower mode can be missed for
/// nonnegative potentials).
pub fn ground_state_symmetric(
    v: &SampledPotential1D,
    spec: &ManifoldSpec,
    l_max: Option<usize>,
) -> Result<ModeResult> {
    let base = line::ground_state_1d(v)?;
    let e0 = base.eigenvalue;
    let cutoff = v.max_abs() + e0.abs();
    let mut modes = Vec::new();
    for (ell, lam, mult) in spec.modes() {
        let within = match l_max {
            Some(l) => ell <= l,
            None => ell == 0 || lam <= cutoff,
        };
        if !within {
            break;
        }
        modes.push(ModeEntry { ell, lambda_ell: lam, multiplicity: mult, e_ell: e0 + lam });
    }
    let (min_mode, eigenvalue) = modes
        .iter()
        .map(|m| (m.ell, m.e_ell))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    Ok(ModeResult { modes, eigenvalue, min_mode, base })
}

// ---------------------------------------------------------------------------
// Dense 2D oracle for M = S¹.
// ---------------------------------------------------------------------------

struct DenseOperator<'a> {
    grid: Grid2D,
    v: &'a [f64],
    inv_hs2: f64,
    inv_ht2: f64,
}

impl<'a> DenseOperator<'a> {
    fn new(grid: Grid2D, v: &'a [f64]) -> Self {
        let hs = grid.s.h();
        let ht = grid.h_theta();
        DenseOperator { grid, v, inv_hs2: 1.0 / (hs * hs), inv_ht2: 1.0 / (ht * ht) }
    }

    /// `y = (H - shift) x` with `H = -D_s² - D_θ² - V`.
    fn apply(&self, shift: f64, x: &[f64], y: &mut [f64]) {
        let n = self.grid.s.n();
        let m = self.grid.m;
        let c = 2.0 * self.inv_hs2 + 2.0 * self.inv_ht2;
        for i in 0..n {
            let row = i * m;
            for j in 0..m {
                let idx = row + j;
                let mut val = (c - self.v[idx] - shift) * x[idx];
                if i > 0 {
                    val -= self.inv_hs2 * x[idx - m];
                }
                if i + 1 < n {
                    val -= self.inv_hs2 * x[idx + m];
                }
                let jl = if j == 0 { m - 1 } else { j - 1 };
                let jr = if j + 1 == m { 0 } else { j + 1 };
                val -= self.inv_ht2 * (x[row + jl] + x[row + jr]);
                y[idx] = val;
            }
        }
    }
}

/// Thomas solve for a constant-coefficient tridiagonal system.
pub(crate) fn solve_const_tridiag(diag: f64, off: f64, b: &mut [f64], scratch: &mut [f64]) {
    let n = b.len();
    let mut piv = diag;
    scratch[0] = off / piv;
    b[0] /= piv;
    for i in 1..n {
        piv = diag - off * scratch[i - 1];
        scratch[i] = off / piv;
        b[i] = (b[i] - off * b[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        b[i] -= scratch[i] * b[i + 1];
    }
}

/// Exact inverse of the separable operator `-D_s² - D_θ² + c` (Dirichlet
/// in s, periodic in θ) through an angular DFT and per-mode tridiagonal
/// solves. Requires `c` to keep every mode positive definite, i.e.
/// `c > -λ_min(-D_s²)`.
pub(crate) struct SeparableHelmholtz {
    n: usize,
    m: usize,
    inv_hs2: f64,
    mode_shift: Vec<f64>,
}

impl SeparableHelmholtz {
    pub(crate) fn new(grid: Grid2D) -> Self {
        let hs = grid.s.h();
        let ht = grid.h_theta();
        let m = grid.m;
        let mode_shift = (0..m).map(|k| fourier::periodic_mode_eigenvalue(k, m, ht)).collect();
        SeparableHelmholtz { n: grid.s.n(), m, inv_hs2: 1.0 / (hs * hs), mode_shift }
    }

    pub(crate) fn solve(&self, c: f64, rhs: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        debug_assert_eq!(rhs.len(), n * m);
        let mut re = rhs.to_vec();
        let mut im = vec![0.0; n * m];
        for i in 0..n {
            fourier::dft(&mut re[i * m..(i + 1) * m], &mut im[i * m..(i + 1) * m], false);
        }
        let mut col_re = vec![0.0; n];
        let mut col_im = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        for k in 0..m {
            for i in 0..n {
                col_re[i] = re[i * m + k];
                col_im[i] = im[i * m + k];
            }
            let diag = 2.0 * self.inv_hs2 + self.mode_shift[k] + c;
            solve_const_tridiag(diag, -self.inv_hs2, &mut col_re, &mut scratch);
            solve_const_tridiag(diag, -self.inv_hs2, &mut col_im, &mut scratch);
            for i in 0..n {
                re[i * m + k] = col_re[i];
                im[i * m + k] = col_im[i];
            }
        }
        for i in 0..n {
            fourier::dft(&mut re[i * m..(i + 1) * m], &mut im[i * m..(i + 1) * m], true);
        }
        re
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned CG for `(H - shift) x = b`; the preconditioner is the
/// separable part of the operator. Deterministic: zero initial guess,
/// fixed iteration cap.
fn pcg_solve(
    op: &DenseOperator<'_>,
    helm: &SeparableHelmholtz,
    pc_shift: f64,
    shift: f64,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let nm = b.len();
    let mut x = vec![0.0; nm];
    let mut r = b.to_vec();
    let b_norm = norm2(b).max(f64::MIN_POSITIVE);
    let mut z = helm.solve(pc_shift, &r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; nm];
    for _ in 0..max_iter {
        op.apply(shift, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // shift not below the spectrum; bail with current iterate
        }
        let alpha = rz / pap;
        for i in 0..nm {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= tol * b_norm {
            break;
        }
        z = helm.solve(pc_shift, &r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..nm {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

fn oracle_eigen_raw(grid: Grid2D, values: &[f64], shift_guess: Option<f64>) -> Result<(f64, Vec<f64>, f64)> {
    let nm = grid.cells();
    let op = DenseOperator::new(grid, values);
    let helm = SeparableHelmholtz::new(grid);
    let max_v = values.iter().cloned().fold(f64::MIN, f64::max);
    // H >= -max V, so this shift is strictly below the spectrum.
    let shift = match shift_guess {
        Some(e) => (e - 0.5).min(-max_v.max(0.0) - 0.5),
        None => -max_v.max(0.0) - 0.5,
    };
    let pc_shift = if shift < 0.0 { -shift } else { 0.5 };

    let mut v = vec![1.0 / (nm as f64).sqrt(); nm];
    let mut hv = vec![0.0; nm];
    let mut eig = 0.0;
    let mut residual = f64::MAX;
    let max_power = 300;
    for it in 0..max_power {
        let w = pcg_solve(&op, &helm, pc_shift, shift, &v, 1e-13, 20_000);
        let wn = norm2(&w);
        if !(wn > 0.0) || !wn.is_finite() {
            return Err(KltError::NonConvergence { iterations: it, residual });
        }
        for i in 0..nm {
            v[i] = w[i] / wn;
        }
        op.apply(0.0, &v, &mut hv);
        eig = dot(&v, &hv);
        residual = (0..nm).map(|i| (hv[i] - eig * v[i]).powi(2)).sum::<f64>().sqrt();
        if residual <= 1e-9 * eig.abs().max(1.0) {
            return Ok((eig, v, residual));
        }
    }
    if residual <= 1e-8 {
        return Ok((eig, v, residual));
    }
    Err(KltError::NonConvergence { iterations: max_power, residual })
}

/// Bottom eigenvalue of the five-point discretization of
/// `-∂²_s - ∂²_θ - V` on `R x S¹` (Dirichlet in s, periodic in θ), by
/// shifted inverse-power iteration from the all-ones vector. When the grid
/// permits (odd `n`, even `m`) a doubled-spacing solve supplies a
/// Richardson error estimate.
pub fn ground_state_2d_oracle(
    v: &CylinderPotential,
    shift_guess: Option<f64>,
) -> Result<SpectralResult> {
    let (grid, values) = match v {
        CylinderPotential::General2d { grid, values } => (*grid, values.as_slice()),
        CylinderPotential::Symmetric(_) => {
            return Err(KltError::invalid(
                "the dense oracle needs a general2d potential; broadcast symmetric samples first",
            ))
        }
    };
    if grid.cells() > ORACLE_CELL_LIMIT {
        return Err(KltError::MemoryGuard { cells: grid.cells(), limit: ORACLE_CELL_LIMIT });
    }
    let (e_h, vec_h, residual) = oracle_eigen_raw(grid, values, shift_guess)?;

    // Coarse companion grid for the error estimate.
    let (eigenvalue, error_estimate) = match (grid.s.coarsened(), grid.m % 2 == 0) {
        (Some(coarse_s), true) if coarse_s.n() >= crate::grid::MIN_INTERIOR_POINTS && grid.m / 2 >= 4 => {
            let cm = grid.m / 2;
            let cgrid = Grid2D::new(coarse_s, cm)?;
            let mut cvals = Vec::with_capacity(cgrid.cells());
            for ci in 0..coarse_s.n() {
                let fi = 2 * ci + 1;
                for cj in 0..cm {
                    cvals.push(values[fi * grid.m + 2 * cj]);
                }
            }
            let (e_c, _, _) = oracle_eigen_raw(cgrid, &cvals, Some(e_h))?;
            let extrap = e_h + (e_h - e_c) / 3.0;
            (extrap, (extrap - e_h).abs())
        }
        _ => (e_h, f64::NAN),
    };

    // Positive sign and continuum normalization.
    let mut u = vec_h;
    let peak = u.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    let scale = if peak < 0.0 { -1.0 } else { 1.0 } / grid.cell_weight().sqrt();
    for x in u.iter_mut() {
        *x *= scale;
    }

    let boundary_defect = {
        let n = grid.s.n();
        let m = grid.m;
        let maxv = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if maxv == 0.0 {
            0.0
        } else {
            let first = values[..m].iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let last = values[(n - 1) * m..].iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            first.max(last) / maxv
        }
    };

    Ok(SpectralResult {
        eigenvalue,
        eigenvalue_h: e_h,
        lambda1: (-eigenvalue).max(0.0),
        eigenfunction: u,
        residual,
        error_estimate,
        boundary_defect,
    })
}

// ---------------------------------------------------------------------------
// Second-variation instability tests.
// ---------------------------------------------------------------------------

/// Closed-form instability coefficient
/// `c(μ) = λ₁(M) - ¼ (p² - 4) Λ_R(μ)`.
///
/// Negative values certify that no axial potential of norm `μ` can be
/// optimal on the cylinder.
pub fn instability_coefficient(
    mu: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
) -> Result<f64> {
    let lam = params::lambda_r(mu, params)?;
    let p = params.p;
    Ok(spec.lambda1() - 0.25 * (p * p - 4.0) * lam)
}

/// Operator route to the same sign: `λ₁(M) + e* + Λ_R(μ)` where `e*` is
/// the numerically computed bottom eigenvalue of `-d²/ds² - (p-1) V_{1,μ}`.
/// Equal to [`instability_coefficient`] through the identity
/// `e* = -¼ p² Λ_R(μ)`.
pub fn instability_operator_check(
    mu: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
    n: usize,
) -> Result<f64> {
    let vopt = params::optimal_potential(mu, params)?;
    let grid = vopt.default_grid(n)?;
    let mut v = vopt.sample(grid);
    for x in v.values.iter_mut() {
        *x *= params.p - 1.0;
    }
    let e_star = line::ground_state_1d(&v)?.eigenvalue;
    Ok(spec.lambda1() + e_star + params::lambda_r(mu, params)?)
}

/// Rayleigh-quotient split of the trial family
/// `φ_ε(s,θ) = φ_μ(s) + ε φ_μ^{p/2}(s) √2 cos θ` on `R x S¹`.
///
/// Returns `(symmetric, correction)` where `symmetric` is the normalized
/// quadratic form at ε = 0 (equal to `-Λ_R(μ)` up to discretization) and
/// `correction` is the finite-ε difference; `correction/ε²` converges to
/// `4/(p+2)` times [`instability_coefficient`] as ε → 0.
pub fn perturbation_energy_split(
    mu: f64,
    eps: f64,
    params: &InequalityParams,
    spec: &ManifoldSpec,
) -> Result<(f64, f64)> {
    if spec.dim != 1 || (spec.lambda1() - 1.0).abs() > 1e-12 {
        return Err(KltError::Domain(
            "the explicit first harmonic is available only on the unit circle".into(),
        ));
    }
    if !(eps.abs() <= 0.5) {
        return Err(KltError::invalid(format!("|eps| must be <= 0.5, got {eps}")));
    }
    let p = params.p;
    let phi = params::optimal_eigenfunction(mu, params)?;
    let vopt = params::optimal_potential(mu, params)?;
    let n = 4001;
    let grid = vopt.default_grid(n)?;
    let h = grid.h();
    let m = 128usize;

    let phi_s: Vec<f64> = (0..n).map(|i| phi.eval(grid.point(i))).collect();
    let chi: Vec<f64> = phi_s.iter().map(|&x| x.powf(p / 2.0)).collect();

    // Symmetric part: (‖φ'‖² - μ ‖φ‖_p²) / ‖φ‖₂².
    let dirichlet_1d = |u: &[f64]| -> f64 {
        let mut acc = u[0] * u[0] + u[n - 1] * u[n - 1];
        for i in 0..n - 1 {
            acc += (u[i + 1] - u[i]).powi(2);
        }
        acc / h
    };
    let l2sq_1d = |u: &[f64]| -> f64 { u.iter().map(|&x| x * x).sum::<f64>() * h };
    let lp_sq_1d = |u: &[f64]| -> f64 {
        (u.iter().map(|&x| x.abs().powf(p)).sum::<f64>() * h).powf(2.0 / p)
    };
    let sym = (dirichlet_1d(&phi_s) - mu * lp_sq_1d(&phi_s)) / l2sq_1d(&phi_s);

    // Finite-ε quadratic form on the 2D grid, normalized angular measure.
    let ht = 2.0 * std::f64::consts::PI / m as f64;
    let wj: Vec<f64> = (0..m).map(|j| (2.0f64).sqrt() * (ht * j as f64).cos()).collect();
    let mut num = 0.0; // ‖∂_s φ_ε‖² + ‖∂_θ φ_ε‖²
    let mut l2 = 0.0;
    let mut lp = 0.0;
    for j in 0..m {
        let f = |i: usize| phi_s[i] + eps * chi[i] * wj[j];
        // s-derivative including the Dirichlet boundary differences.
        let mut acc = f(0) * f(0) + f(n - 1) * f(n - 1);
        for i in 0..n - 1 {
            acc += (f(i + 1) - f(i)).powi(2);
        }
        num += acc / h / m as f64;
        for i in 0..n {
            let x = f(i);
            l2 += x * x;
            lp += x.abs().powf(p);
        }
    }
    // θ-derivative: only the harmonic factor varies in θ.
    let chi_sq = chi.iter().map(|&x| x * x).sum::<f64>() * h;
    let mut dtheta = 0.0;
    for j in 0..m {
        let jr = (j + 1) % m;
        dtheta += ((wj[jr] - wj[j]) / ht).powi(2);
    }
    num += eps * eps * chi_sq * dtheta / m as f64;
    let w = h / m as f64;
    let l2sq = l2 * w;
    let lpsq = (lp * w).powf(2.0 / p);
    let full = (num - mu * lpsq) / l2sq;

    Ok((sym, full - sym))
}

// ---------------------------------------------------------------------------
// 2D potential files: header `n m s_min s_max`, then row-major values.
// ---------------------------------------------------------------------------

pub fn parse_potential_2d(text: &str, path: &str) -> Result<CylinderPotential> {
    let err = |msg: String| KltError::Parse { path: path.to_string(), msg };
    let mut tokens = text.split_whitespace();
    let mut next_f64 = |what: &str| -> Result<f64> {
        tokens
            .next()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| err(format!("missing or invalid {what}")))
    };
    let n = next_f64("grid size n")? as usize;
    let m = next_f64("angular count m")? as usize;
    let s_min = next_f64("s_min")?;
    let s_max = next_f64("s_max")?;
    let grid = Grid2D::new(Grid1D::new(s_min, s_max, n)?, m)?;
    let mut values = Vec::with_capacity(n * m);
    for k in 0..n * m {
        values.push(next_f64(&format!("value {k}"))?);
    }
    if tokens.next().is_some() {
        return Err(err("trailing data after the value block".into()));
    }
    CylinderPotential::general2d(grid, values)
}

pub fn load_potential_2d(path: &Path) -> Result<CylinderPotential> {
    let text = std::fs::read_to_string(path).map_err(|source| KltError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_potential_2d(&text, &path.display().to_string())
}

pub fn format_potential_2d(grid: Grid2D, values: &[f64]) -> String {
    let mut out = format!("{} {} {} {}\n", grid.s.n(), grid.m, grid.s.s_min(), grid.s.s_max());
    for row in values.chunks(grid.m) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
