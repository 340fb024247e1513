//! Ground states of `-d²/ds² - V` on a truncated line by second-order
//! finite differences, plus the norms, scalings and consistency checks
//! built on top of the same grid.
//!
//! The Dirichlet discretization is a symmetric tridiagonal matrix; its
//! bottom eigenvalue comes from Sturm bisection and the eigenvector from
//! inverse iteration (see [`crate::tridiag`]). Every solve also runs on a
//! half-spacing refinement so the reported eigenvalue is Richardson
//! extrapolated and carries a discretization-error estimate.

use crate::error::{KltError, Result};
use crate::grid::{trapezoid_sum, Grid1D};
use crate::params::InequalityParams;
use crate::tridiag;
use std::path::Path;

/// Potential samples on the interior points of a 1D grid.
#[derive(Debug, Clone)]
pub struct SampledPotential1D {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    /// Optional `(q, ‖V‖_q)` pair propagated exactly through scalings.
    pub q_norm_cache: Option<(f64, f64)>,
}

impl SampledPotential1D {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(KltError::invalid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KltError::invalid("potential samples must be finite"));
        }
        Ok(SampledPotential1D { grid, values, q_norm_cache: None })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.point(i))).collect();
        SampledPotential1D { grid, values, q_norm_cache: None }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Relative size of the potential at the truncation endpoints; large
    /// values mean the Dirichlet window is too narrow.
    pub fn boundary_defect(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        self.values[0].abs().max(self.values[n - 1].abs()) / m
    }
}

/// `‖V‖_q` by composite trapezoid on the sampling grid (boundary values
/// are taken as zero, consistent with the Dirichlet truncation).
pub fn lq_norm_1d(v: &SampledPotential1D, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(KltError::invalid(format!("lq_norm_1d requires q >= 1, got {q}")));
    }
    if let Some((qc, norm)) = v.q_norm_cache {
        if (qc - q).abs() <= 1e-14 * q {
            return Ok(norm);
        }
    }
    let h = v.grid.h();
    let acc: f64 = v.values.iter().map(|&x| x.abs().powf(q)).sum();
    Ok((acc * h).powf(1.0 / q))
}

/// `‖V₊‖_q`: only the positive part contributes.
pub fn lq_norm_positive_1d(v: &SampledPotential1D, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(KltError::invalid(format!("lq_norm requires q >= 1, got {q}")));
    }
    let h = v.grid.h();
    let acc: f64 = v.values.iter().map(|&x| x.max(0.0).powf(q)).sum();
    Ok((acc * h).powf(1.0 / q))
}

/// Scaled potential `V_ν(s) = ν² V(ν s)` on the rescaled grid. The new
/// samples coincide with the old ones up to the factor ν², so no
/// resampling error is introduced, and the discrete norm obeys the exact
/// scaling law `‖V_ν‖_q = ν^(2-1/q) ‖V‖_q`.
pub fn scale_potential(v: &SampledPotential1D, nu: f64) -> Result<SampledPotential1D> {
    if !(nu > 0.0) {
        return Err(KltError::invalid(format!("scale_potential requires nu > 0, got {nu}")));
    }
    let grid = Grid1D::new(v.grid.s_min() / nu, v.grid.s_max() / nu, v.grid.n())?;
    let values = v.values.iter().map(|&x| nu * nu * x).collect();
    let q_norm_cache = v
        .q_norm_cache
        .map(|(q, norm)| (q, nu.powf(2.0 - 1.0 / q) * norm));
    Ok(SampledPotential1D { grid, values, q_norm_cache })
}

/// Output of a 1D ground-state solve.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Richardson-extrapolated bottom eigenvalue (h and h/2 grids).
    pub eigenvalue: f64,
    /// Raw bottom eigenvalue of the sampling-grid discretization.
    pub eigenvalue_h: f64,
    /// `max(0, -eigenvalue)` — the spectral quantity entering the bounds.
    pub lambda1: f64,
    /// Ground state on the sampling grid, positive, unit L² norm
    /// (continuum normalization `h Σ u² = 1`).
    pub eigenfunction: Vec<f64>,
    /// `‖(H - e_h) u‖₂` for the discrete pair on the sampling grid.
    pub residual: f64,
    /// `|eigenvalue - eigenvalue_h|`, the Richardson error estimate for
    /// the raw value.
    pub error_estimate: f64,
    /// Endpoint size of `V` relative to its maximum (truncation warning
    /// indicator; the caller decides whether to warn).
    pub boundary_defect: f64,
}

/// Midpoint samples by 4-point cubic interpolation; one-sided at the two
/// window ends. Interpolation error is O(h⁴), below the O(h²)
/// discretization error the refinement is meant to estimate.
fn refine_values(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(2 * n + 1);
    // One-sided cubic at t = -1/2 relative to the first four samples.
    let left = if n >= 4 {
        2.1875 * values[0] - 2.1875 * values[1] + 1.3125 * values[2] - 0.3125 * values[3]
    } else {
        values[0]
    };
    out.push(left.max(0.0).min(values[0].max(left))); // keep within sane range
    for i in 0..n {
        out.push(values[i]);
        if i + 1 < n {
            let mid = if i >= 1 && i + 2 < n {
                (-values[i - 1] + 9.0 * values[i] + 9.0 * values[i + 1] - values[i + 2]) / 16.0
            } else {
                0.5 * (values[i] + values[i + 1])
            };
            out.push(mid);
        }
    }
    let right = if n >= 4 {
        2.1875 * values[n - 1] - 2.1875 * values[n - 2] + 1.3125 * values[n - 3]
            - 0.3125 * values[n - 4]
    } else {
        values[n - 1]
    };
    out.push(right.max(0.0).min(values[n - 1].max(right)));
    debug_assert_eq!(out.len(), 2 * n + 1);
    out
}

fn bottom_eigenvalue_of(values: &[f64], h: f64) -> f64 {
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = values.iter().map(|&v| 2.0 * inv_h2 - v).collect();
    tridiag::bottom_eigenvalue(&diag, -inv_h2)
}

/// Bottom of the spectrum of the Dirichlet discretization of
/// `-d²/ds² - V`, with eigenfunction, residual and a Richardson error
/// estimate from an internal half-spacing solve.
pub fn ground_state_1d(v: &SampledPotential1D) -> Result<SpectralResult> {
    let h = v.grid.h();
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = v.values.iter().map(|&x| 2.0 * inv_h2 - x).collect();
    let off = -inv_h2;
    let e_h = tridiag::bottom_eigenvalue(&diag, off);
    let (mut u, residual) = tridiag::inverse_iteration(&diag, off, e_h);

    let op_scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * inv_h2;
    if residual > 1e-8_f64.max(1e-12 * op_scale) {
        return Err(KltError::NonConvergence { iterations: 25, residual });
    }

    // Positive sign convention, continuum L² normalization.
    let peak = u
        .iter()
        .cloned()
        .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    let scale = if peak < 0.0 { -1.0 } else { 1.0 } / h.sqrt();
    for x in u.iter_mut() {
        *x *= scale;
    }

    // Half-spacing solve for the Richardson estimate.
    let fine_values = refine_values(&v.values);
    let e_fine = bottom_eigenvalue_of(&fine_values, h / 2.0);
    let eigenvalue = e_fine + (e_fine - e_h) / 3.0;

    Ok(SpectralResult {
        eigenvalue,
        eigenvalue_h: e_h,
        lambda1: (-eigenvalue).max(0.0),
        eigenfunction: u,
        residual,
        error_estimate: (eigenvalue - e_h).abs(),
        boundary_defect: v.boundary_defect(),
    })
}

/// Richardson extrapolation across two independently computed eigenvalues
/// at spacings `h1 > h2` (second-order scheme, general ratio).
pub fn extrapolate_eigenvalue(h1: f64, e1: f64, h2: f64, e2: f64) -> f64 {
    (h1 * h1 * e2 - h2 * h2 * e1) / (h1 * h1 - h2 * h2)
}

/// Bottom eigenvalue of the sampling-grid discretization alone, without
/// eigenvector or refinement work.
pub fn raw_bottom_eigenvalue(v: &SampledPotential1D) -> f64 {
    bottom_eigenvalue_of(&v.values, v.grid.h())
}

/// Slack in the Keller bound: `Λ_R(‖V₊‖_q) - λ₁[V]`. Zero (to numerical
/// tolerance) exactly on the optimal family; the all-zero potential
/// returns zero by convention.
pub fn keller_gap(v: &SampledPotential1D, params: &InequalityParams) -> Result<f64> {
    let mu = lq_norm_positive_1d(v, params.q)?;
    if mu == 0.0 {
        return Ok(0.0);
    }
    let bound = crate::params::lambda_r(mu, params)?;
    let gs = ground_state_1d(v)?;
    Ok(bound - gs.lambda1)
}

// ---------------------------------------------------------------------------
// Radial solver for the Euclidean one-bound-state constant.
// ---------------------------------------------------------------------------

/// Surface area of the unit sphere in `R^d` (σ₀ = 2 accounts for the two
/// half-lines of the even 1D problem).
fn sphere_area(d: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / crate::params::gamma_fn(d as f64 / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ShotOutcome {
    Crossed,
    TurnedBack,
}

/// Integrate `u'' + (d-1)/r u' = u - u^(p-1)` outward by RK4 from the
/// series start at `r0`, classifying the trajectory. When `collect` is
/// set, also accumulates `∫ u^p r^(d-1) dr` by the trapezoid rule until
/// the solution leaves the decaying regime.
fn shoot(a: f64, d: u32, p: f64, r_max: f64, step: f64, collect: bool) -> (ShotOutcome, f64) {
    let dm1 = d as f64 - 1.0;
    let rhs = |r: f64, u: f64, w: f64| -> (f64, f64) {
        let g = u - u.abs().powf(p - 2.0) * u;
        (w, g - if r > 0.0 { dm1 * w / r } else { 0.0 })
    };

    let r0 = 1e-6;
    let g0 = a - a.powf(p - 1.0);
    let mut r = r0;
    let mut u = a + g0 * r0 * r0 / (2.0 * d as f64);
    let mut w = g0 * r0 / d as f64;

    let mut integral = 0.0;
    let mut prev_f = u.powf(p) * r.powf(dm1);
    let mut falling = false;

    while r < r_max {
        let h = step;
        let (k1u, k1w) = rhs(r, u, w);
        let (k2u, k2w) = rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w);
        let (k3u, k3w) = rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w);
        let (k4u, k4w) = rhs(r + h, u + h * k3u, w + h * k3w);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        r += h;

        if u < 0.0 {
            return (ShotOutcome::Crossed, integral);
        }
        if collect {
            let f = u.powf(p) * r.powf(dm1);
            integral += 0.5 * (prev_f + f) * h;
            prev_f = f;
        }
        if w < 0.0 {
            falling = true;
        }
        // Once past the peak, a positive slope means the trajectory has
        // left the decaying separatrix on the growing side.
        if falling && w > 0.0 && u > 1e-12 {
            return (ShotOutcome::TurnedBack, integral);
        }
        if u < 1e-10 {
            break;
        }
    }
    (ShotOutcome::TurnedBack, integral)
}

fn validate_radial_exponent(d: u32, p: f64) -> Result<()> {
    if d < 1 {
        return Err(KltError::invalid("radial solver requires d >= 1"));
    }
    if d >= 3 {
        let p_crit = 2.0 * d as f64 / (d as f64 - 2.0);
        if !(p > 2.0 && p < p_crit) {
            return Err(KltError::invalid(format!(
                "for d = {d} the exponent must lie in (2, {p_crit}), got {p}"
            )));
        }
    } else if !(p > 2.0) || !p.is_finite() {
        return Err(KltError::invalid(format!("exponent must exceed 2, got {p}")));
    }
    Ok(())
}

/// Central amplitude of the decaying radial ground state, by bisection on
/// the shooting outcome.
fn critical_amplitude(d: u32, p: f64, r_max: f64, step: f64) -> Result<f64> {
    let mut a_lo = 1.0 + 1e-6;
    if shoot(a_lo, d, p, r_max, step, false).0 != ShotOutcome::TurnedBack {
        return Err(KltError::Bracket {
            msg: format!("shooting lower end a = {a_lo} already crosses zero"),
            samples: vec![],
        });
    }
    let mut a_hi = 2.0;
    let mut found = false;
    for _ in 0..60 {
        if shoot(a_hi, d, p, r_max, step, false).0 == ShotOutcome::Crossed {
            found = true;
            break;
        }
        a_lo = a_hi;
        a_hi *= 1.5;
    }
    if !found {
        return Err(KltError::Bracket {
            msg: format!("no sign change of the shooting function up to a = {a_hi}"),
            samples: vec![],
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (a_lo + a_hi);
        if (a_hi - a_lo) < 4.0 * f64::EPSILON * mid {
            break;
        }
        match shoot(mid, d, p, r_max, step, false).0 {
            ShotOutcome::Crossed => a_hi = mid,
            ShotOutcome::TurnedBack => a_lo = mid,
        }
    }
    Ok(0.5 * (a_lo + a_hi))
}

/// Best constant of the Euclidean one-bound-state inequality at
/// `γ = q - d/2`, computed from the radial ground state of
/// `-u'' - (d-1)/r u' + u = u^(p-1)` by bisection shooting on `u(0)`:
/// `L¹ = (σ_{d-1} ∫₀^∞ u^p r^(d-1) dr)^(-1)`.
pub fn radial_gns_constant(d: u32, p: f64) -> Result<f64> {
    validate_radial_exponent(d, p)?;
    let r_max = 30.0;
    let step = 1e-3;
    let a_star = critical_amplitude(d, p, r_max, step)?;
    let (_, integral) = shoot(a_star, d, p, r_max, step, true);
    if !(integral > 0.0) {
        return Err(KltError::Domain("radial quadrature degenerated".into()));
    }
    Ok(1.0 / (sphere_area(d) * integral))
}

/// Radial ground-state profile at the requested radii (ascending order),
/// by RK4 integration at the critical amplitude.
pub fn radial_ground_profile(d: u32, p: f64, r_points: &[f64]) -> Result<Vec<f64>> {
    validate_radial_exponent(d, p)?;
    if r_points.windows(2).any(|w| w[1] <= w[0]) || r_points.iter().any(|&r| r < 0.0) {
        return Err(KltError::invalid("radii must be nonnegative and strictly increasing"));
    }
    let step = 1e-3;
    let r_max = r_points.last().copied().unwrap_or(0.0).min(25.0) + step;
    let a_star = critical_amplitude(d, p, 30.0, step)?;

    let dm1 = d as f64 - 1.0;
    let rhs = |r: f64, u: f64, w: f64| -> (f64, f64) {
        let g = u - u.abs().powf(p - 2.0) * u;
        (w, g - if r > 0.0 { dm1 * w / r } else { 0.0 })
    };
    let r0 = 1e-6;
    let g0 = a_star - a_star.powf(p - 1.0);
    let mut r = r0;
    let mut u = a_star + g0 * r0 * r0 / (2.0 * d as f64);
    let mut w = g0 * r0 / d as f64;
    let mut out = Vec::with_capacity(r_points.len());
    let mut idx = 0;
    while idx < r_points.len() && r_points[idx] <= r {
        out.push(u);
        idx += 1;
    }
    while r < r_max && idx < r_points.len() {
        let (pu, pr) = (u, r);
        let h = step;
        let (k1u, k1w) = rhs(r, u, w);
        let (k2u, k2w) = rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w);
        let (k3u, k3w) = rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w);
        let (k4u, k4w) = rhs(r + h, u + h * k3u, w + h * k3w);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        r += h;
        while idx < r_points.len() && r_points[idx] <= r {
            let t = (r_points[idx] - pr) / (r - pr);
            out.push(pu + t * (u - pu));
            idx += 1;
        }
    }
    while out.len() < r_points.len() {
        out.push(0.0);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Plain-text potential files: two columns `s value`.
// ---------------------------------------------------------------------------

pub fn parse_potential_1d(text: &str, path: &str) -> Result<SampledPotential1D> {
    let err = |msg: String| KltError::Parse { path: path.to_string(), msg };
    let mut ss = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let s: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(format!("bad coordinate on line {}", lineno + 1)))?;
        let v: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(format!("bad value on line {}", lineno + 1)))?;
        if it.next().is_some() {
            return Err(err(format!("trailing fields on line {}", lineno + 1)));
        }
        ss.push(s);
        vs.push(v);
    }
    if ss.len() < crate::grid::MIN_INTERIOR_POINTS {
        return Err(err(format!("need at least {} samples", crate::grid::MIN_INTERIOR_POINTS)));
    }
    let n = ss.len();
    let h = (ss[n - 1] - ss[0]) / (n as f64 - 1.0);
    if !(h > 0.0) {
        return Err(err("coordinates must be strictly increasing".into()));
    }
    let tol = 1e-9 * ss.iter().fold(h.abs(), |m, s| m.max(s.abs()));
    for i in 1..n {
        if ((ss[i] - ss[i - 1]) - h).abs() > tol {
            return Err(err(format!(
                "grid not uniform near line {}: spacing {} vs {}",
                i + 1,
                ss[i] - ss[i - 1],
                h
            )));
        }
    }
    let grid = Grid1D::new(ss[0] - h, ss[n - 1] + h, n)?;
    SampledPotential1D::new(grid, vs)
}

pub fn load_potential_1d(path: &Path) -> Result<SampledPotential1D> {
    let text = std::fs::read_to_string(path).map_err(|source| KltError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_potential_1d(&text, &path.display().to_string())
}

pub fn format_potential_1d(v: &SampledPotential1D) -> String {
    let mut out = String::with_capacity(v.values.len() * 24);
    for (i, &val) in v.values.iter().enumerate() {
        out.push_str(&format!("{:.17e} {:.17e}\n", v.grid.point(i), val));
    }
    out
}

/// L² norm of interior samples under the continuum weight.
pub fn l2_norm(values: &[f64], h: f64) -> f64 {
    (values.iter().map(|&x| x * x).sum::<f64>() * h).sqrt()
}

/// Trapezoid integral of interior samples (zero boundary convention).
pub fn integrate(values: &[f64], h: f64) -> f64 {
    trapezoid_sum(values, h)
}
