//! Exponent bookkeeping and closed-form constants.
//!
//! Everything here is a pure formula: the dual exponents `(q, p, β, γ)`,
//! the norm `μ₁` of the reference potential, the line constant `Λ_R(μ)`,
//! the optimal potential/eigenfunction family, and the rigidity constants
//! `λ_θ`, `θ*`, `λ*` together with the two-sided bounds on the
//! symmetry-breaking threshold `μ*`.

use crate::error::{KltError, Result};
use crate::grid::Grid1D;
use crate::line::SampledPotential1D;
use num_rational::Rational64;

/// Exponent bundle for a cylinder of dimension `d`.
///
/// `q > d/2` is the Lebesgue exponent of the potential norm; the dual
/// exponent is `p = 2q/(q-1)`, the threshold exponent is `β = 2q/(2q-1)`
/// and `γ = q - d/2` is the semiclassical power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityParams {
    pub d: u32,
    pub q: f64,
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn make_params(d: u32, q: f64) -> Result<InequalityParams> {
    if d < 2 {
        return Err(KltError::invalid(format!("cylinder dimension d must be >= 2, got {d}")));
    }
    if !q.is_finite() || q <= d as f64 / 2.0 {
        return Err(KltError::invalid(format!(
            "exponent q must satisfy q > d/2 = {}, got {q}",
            d as f64 / 2.0
        )));
    }
    let p = 2.0 * q / (q - 1.0);
    let beta = 2.0 * q / (2.0 * q - 1.0);
    let gamma = q - d as f64 / 2.0;
    let params = InequalityParams { d, q, p, beta, gamma };
    debug_assert!((params.q_from_p() - q).abs() <= 1e-12 * q);
    debug_assert!(beta > 1.0 && beta < 2.0);
    Ok(params)
}

impl InequalityParams {
    pub fn new(d: u32, q: f64) -> Result<Self> {
        make_params(d, q)
    }

    /// Recover `q` from `p`; consistent with the stored `q` to machine
    /// precision by construction.
    pub fn q_from_p(&self) -> f64 {
        self.p / (self.p - 2.0)
    }

    /// Scaling exponent: `ν = (μ/μ₁)^(q/(2q-1))`.
    pub fn nu_of_mu(&self, mu: f64) -> f64 {
        (mu / mu_one(self)).powf(self.q / (2.0 * self.q - 1.0))
    }
}

/// Lanczos approximation of Γ(x) for x > 0 (g = 7, 9 coefficients,
/// relative error below 1e-13 over the range used here).
pub(crate) fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0, "gamma_fn defined for positive arguments only");
    if x < 0.5 {
        // Reflection; not hit by the admissible exponent ranges but kept
        // for completeness.
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x));
    }
    let z = x - 1.0;
    let mut a = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// `μ₁ = q(q-1) (√π Γ(q) / Γ(q+1/2))^(1/q)`, the `L^q` norm of the
/// reference potential `V₁(s) = q(q-1)/cosh²(s)`.
pub fn mu_one(params: &InequalityParams) -> f64 {
    let q = params.q;
    let ratio = std::f64::consts::PI.sqrt() * gamma_fn(q) / gamma_fn(q + 0.5);
    q * (q - 1.0) * ratio.powf(1.0 / q)
}

/// Line constant `Λ_R(μ) = (q-1)² (μ/μ₁)^β`; strictly increasing and
/// strictly convex in `μ` since `β > 1`.
pub fn lambda_r(mu: f64, params: &InequalityParams) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(KltError::invalid(format!("lambda_r requires mu > 0, got {mu}")));
    }
    let q = params.q;
    Ok((q - 1.0) * (q - 1.0) * (mu / mu_one(params)).powf(params.beta))
}

/// Inverse of [`lambda_r`]: the norm `μ(λ) = μ₁ (λ/(q-1)²)^(1/β)`.
pub fn invert_lambda_r(lambda: f64, params: &InequalityParams) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(KltError::invalid(format!(
            "invert_lambda_r requires lambda > 0, got {lambda}"
        )));
    }
    let q = params.q;
    Ok(mu_one(params) * (lambda / ((q - 1.0) * (q - 1.0))).powf(1.0 / params.beta))
}

/// Numerically stable sech(x).
pub(crate) fn sech(x: f64) -> f64 {
    let a = x.abs();
    let e = (-a).exp();
    2.0 * e / (1.0 + e * e)
}

/// The optimal potential `V_{1,μ}(s) = ν² V₁(ν s)` with
/// `ν = (μ/μ₁)^(q/(2q-1))` and `V₁(s) = q(q-1)/cosh²(s)`.
#[derive(Debug, Clone, Copy)]
pub struct OptimalPotential {
    pub nu: f64,
    pub q: f64,
    pub mu: f64,
}

impl OptimalPotential {
    pub fn eval(&self, s: f64) -> f64 {
        let sch = sech(self.nu * s);
        self.nu * self.nu * self.q * (self.q - 1.0) * sch * sch
    }

    pub fn sample(&self, grid: Grid1D) -> SampledPotential1D {
        SampledPotential1D::from_fn(grid, |s| self.eval(s))
    }

    /// Window on which the associated eigenfunction decays below ~1e-10,
    /// following the default truncation rule `[-20/ν, 20/ν]` stretched for
    /// slow decay rates `ν(q-1)`.
    pub fn default_grid(&self, n: usize) -> Result<Grid1D> {
        let rate = self.nu * (self.q - 1.0);
        let half = (23.0 / rate).max(20.0 / self.nu);
        Grid1D::symmetric(half, n)
    }
}

pub fn optimal_potential(mu: f64, params: &InequalityParams) -> Result<OptimalPotential> {
    if !(mu > 0.0) {
        return Err(KltError::invalid(format!("optimal_potential requires mu > 0, got {mu}")));
    }
    Ok(OptimalPotential { nu: params.nu_of_mu(mu), q: params.q, mu })
}

/// The ground-state profile `φ_μ(s) = cosh(ν s)^(1-q)`, eigenfunction of
/// `-d²/ds² - V_{1,μ}` with eigenvalue `-Λ_R(μ)`.
#[derive(Debug, Clone, Copy)]
pub struct OptimalEigenfunction {
    pub nu: f64,
    pub q: f64,
}

impl OptimalEigenfunction {
    pub fn eval(&self, s: f64) -> f64 {
        sech(self.nu * s).powf(self.q - 1.0)
    }
}

pub fn optimal_eigenfunction(mu: f64, params: &InequalityParams) -> Result<OptimalEigenfunction> {
    if !(mu > 0.0) {
        return Err(KltError::invalid(format!(
            "optimal_eigenfunction requires mu > 0, got {mu}"
        )));
    }
    Ok(OptimalEigenfunction { nu: params.nu_of_mu(mu), q: params.q })
}

/// Inputs of the rigidity estimate: the effective dimension `n` (default
/// convention `n = 2q`), the interpolation parameter `θ`, the Ricci lower
/// bound `κ` of the compact factor and its spectral gap `λ₁`.
#[derive(Debug, Clone, Copy)]
pub struct RigidityParams {
    pub n: f64,
    pub theta: f64,
    pub kappa: f64,
    pub lambda1_m: f64,
}

impl RigidityParams {
    /// Default convention `n = 2q`, `θ = θ*`.
    pub fn standard(params: &InequalityParams, kappa: f64, lambda1_m: f64) -> Self {
        let mut rp = RigidityParams { n: 2.0 * params.q, theta: 0.0, kappa, lambda1_m };
        if let Ok(t) = theta_star(&rp, params.d) {
            rp.theta = t;
        }
        rp
    }

    /// `δ = (n-d) / ((d-1)(n-1))`.
    pub fn delta(&self, d: u32) -> f64 {
        (self.n - d as f64) / ((d as f64 - 1.0) * (self.n - 1.0))
    }
}

/// `λ_θ = (1 + δθ(d-1)/(d-2)) κ + δ(1-θ) λ₁` evaluated at `rp.theta`.
///
/// At `d = 2` the κ-coefficient is singular; the formula is defined only
/// for flat circles (`κ = 0`), where the κ term drops.
pub fn lambda_theta(rp: &RigidityParams, d: u32) -> Result<f64> {
    lambda_theta_at(rp, d, rp.theta)
}

pub fn lambda_theta_at(rp: &RigidityParams, d: u32, theta: f64) -> Result<f64> {
    if d < 2 {
        return Err(KltError::invalid(format!("lambda_theta requires d >= 2, got {d}")));
    }
    let delta = rp.delta(d);
    if d == 2 {
        if rp.kappa != 0.0 {
            return Err(KltError::Degenerate(
                "lambda_theta at d = 2 is defined only for kappa = 0 (flat circle)".into(),
            ));
        }
        return Ok(delta * (1.0 - theta) * rp.lambda1_m);
    }
    let df = d as f64;
    Ok((1.0 + delta * theta * (df - 1.0) / (df - 2.0)) * rp.kappa
        + delta * (1.0 - theta) * rp.lambda1_m)
}

/// `θ* = (d-2)(n-1)(3n+1-d(3n+5)) / ((d+1)(d(n²-n-4)-n²+3n+2))`.
pub fn theta_star(rp: &RigidityParams, d: u32) -> Result<f64> {
    let df = d as f64;
    let n = rp.n;
    let num = (df - 2.0) * (n - 1.0) * (3.0 * n + 1.0 - df * (3.0 * n + 5.0));
    let den = (df + 1.0) * (df * (n * n - n - 4.0) - n * n + 3.0 * n + 2.0);
    if den.abs() < 1e-14 * (1.0 + num.abs()) {
        return Err(KltError::Degenerate(format!(
            "theta_star denominator vanishes at d = {d}, n = {n}"
        )));
    }
    Ok(num / den)
}

/// `λ* = λ_{θ*}`.
pub fn lambda_star(rp: &RigidityParams, d: u32) -> Result<f64> {
    let t = theta_star(rp, d)?;
    lambda_theta_at(rp, d, t)
}

/// Two-sided bounds on the threshold norm from the rigidity estimate:
/// `μ₁ (λ*/(2(q-1)))^(1/β) <= μ* <= μ₁ (λ₁/(2q-1))^(1/β)`.
///
/// For the sphere with `n = 2q` the two sides coincide. A non-positive
/// `λ*` makes the lower bound vacuous; it is clamped to zero.
pub fn mu_star_bounds(rp: &RigidityParams, params: &InequalityParams) -> Result<(f64, f64)> {
    let q = params.q;
    let m1 = mu_one(params);
    let ls = lambda_star(rp, params.d)?;
    let lower = if ls > 0.0 {
        m1 * (ls / (2.0 * (q - 1.0))).powf(1.0 / params.beta)
    } else {
        0.0
    };
    let upper = m1 * (rp.lambda1_m / (2.0 * q - 1.0)).powf(1.0 / params.beta);
    Ok((lower, upper))
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the identities that hold exactly.
// ---------------------------------------------------------------------------

fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// `θ*` as an exact rational, `None` when the denominator vanishes.
pub fn theta_star_exact(d: i64, n: i64) -> Option<Rational64> {
    let num = (d - 2) * (n - 1) * (3 * n + 1 - d * (3 * n + 5));
    let den = (d + 1) * (d * (n * n - n - 4) - n * n + 3 * n + 2);
    if den == 0 {
        None
    } else {
        Some(ratio(num, den))
    }
}

/// `λ_θ` as an exact rational. For `d = 2` requires `κ = 0`.
pub fn lambda_theta_exact(
    d: i64,
    n: i64,
    theta: Rational64,
    kappa: Rational64,
    lambda1: Rational64,
) -> Option<Rational64> {
    if n == 1 {
        return None;
    }
    let delta = ratio(n - d, (d - 1) * (n - 1));
    if d == 2 {
        if kappa != ratio(0, 1) {
            return None;
        }
        return Some(delta * (ratio(1, 1) - theta) * lambda1);
    }
    let coeff = ratio(1, 1) + delta * theta * ratio(d - 1, d - 2);
    Some(coeff * kappa + delta * (ratio(1, 1) - theta) * lambda1)
}

/// Exact check of the sphere equality: with `n = 2q`, `M = S^(d-1)`
/// (`κ = d-2`, `λ₁ = d-1`; `κ = 0`, `λ₁ = 1` for the circle), the identity
/// `λ*/(2(q-1)) = λ₁/(2q-1)` holds in exact rational arithmetic.
pub fn sphere_equality_exact(d: i64, q: i64) -> bool {
    let n = 2 * q;
    let (kappa, lambda1) = if d == 2 {
        (ratio(0, 1), ratio(1, 1))
    } else {
        (ratio(d - 2, 1), ratio(d - 1, 1))
    };
    let theta = match theta_star_exact(d, n) {
        Some(t) => t,
        None => return false,
    };
    let lam_star = match lambda_theta_exact(d, n, theta, kappa, lambda1) {
        Some(l) => l,
        None => return false,
    };
    lam_star * ratio(2 * q - 1, 1) == lambda1 * ratio(2 * (q - 1), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: u32, q: f64) -> InequalityParams {
        make_params(d, q).unwrap()
    }

    #[test]
    fn exponents_direct_substitution() {
        let p22 = params(2, 2.0);
        assert!((p22.p - 4.0).abs() < 1e-15);
        assert!((p22.beta - 4.0 / 3.0).abs() < 1e-15);
        assert!((p22.gamma - 1.0).abs() < 1e-15);
        let p33 = params(3, 3.0);
        assert!((p33.p - 3.0).abs() < 1e-15);
        assert!((p33.beta - 6.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_hypothesis_violations() {
        assert!(make_params(3, 1.4).is_err());
        assert!(make_params(3, 1.5).is_err());
        assert!(make_params(1, 2.0).is_err());
        assert!(make_params(2, f64::NAN).is_err());
    }

    #[test]
    fn gamma_reference_values() {
        assert!((gamma_fn(2.0) - 1.0).abs() < 1e-13);
        assert!((gamma_fn(3.0) - 2.0).abs() < 1e-13);
        assert!((gamma_fn(5.0) - 24.0).abs() < 1e-12);
        let sp = std::f64::consts::PI.sqrt();
        assert!((gamma_fn(2.5) - 0.75 * sp).abs() < 1e-13);
        assert!((gamma_fn(3.5) - 15.0 / 8.0 * sp).abs() < 1e-13);
    }

    #[test]
    fn mu_one_closed_forms() {
        // q = 2: μ₁ = 4/√3; q = 3: μ₁ = 6 (16/15)^(1/3).
        let m2 = mu_one(&params(2, 2.0));
        assert!((m2 - 4.0 / 3.0f64.sqrt()).abs() < 1e-12, "{m2}");
        let m3 = mu_one(&params(2, 3.0));
        assert!((m3 - 6.0 * (16.0 / 15.0f64).powf(1.0 / 3.0)).abs() < 1e-12, "{m3}");
    }

    #[test]
    fn mu_one_matches_quadrature_oracle() {
        // Independent oracle: trapezoid quadrature of ‖q(q-1) sech²‖_q.
        for &q in &[1.5, 2.0, 2.5, 3.0, 5.0] {
            let pr = params(2, q);
            let h = 1e-3;
            let half = 40.0;
            let steps = (2.0 * half / h) as usize;
            let mut acc = 0.0;
            for i in 0..=steps {
                let s = -half + i as f64 * h;
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                acc += w * (q * (q - 1.0) * sech(s) * sech(s)).powf(q);
            }
            let quad = (acc * h).powf(1.0 / q);
            let formula = mu_one(&pr);
            assert!(
                (quad - formula).abs() < 1e-9,
                "q={q}: quadrature {quad} vs formula {formula}"
            );
        }
    }

    #[test]
    fn lambda_r_equality_cases() {
        let pr = params(2, 2.0);
        let m1 = mu_one(&pr);
        assert!((lambda_r(m1, &pr).unwrap() - 1.0).abs() < 1e-12);
        let pr3 = params(2, 3.0);
        assert!((lambda_r(mu_one(&pr3), &pr3).unwrap() - 4.0).abs() < 1e-12);
        // μ = 2^((2q-1)/(2q)) μ₁ doubles Λ_R.
        let mu = 2.0f64.powf(3.0 / 4.0) * m1;
        assert!((lambda_r(mu, &pr).unwrap() - 2.0).abs() < 1e-12);
        assert!(lambda_r(0.0, &pr).is_err());
        assert!(lambda_r(-1.0, &pr).is_err());
    }

    #[test]
    fn invert_lambda_r_examples() {
        let pr = params(2, 2.0);
        let m1 = mu_one(&pr);
        assert!((invert_lambda_r(1.0, &pr).unwrap() - m1).abs() < 1e-12);
        assert!(invert_lambda_r(0.0, &pr).is_err());
        let pr3 = params(3, 3.0);
        assert!((invert_lambda_r(4.0, &pr3).unwrap() - mu_one(&pr3)).abs() < 1e-12);
    }

    #[test]
    fn optimal_family_at_mu_one() {
        let pr = params(2, 2.0);
        let m1 = mu_one(&pr);
        let v = optimal_potential(m1, &pr).unwrap();
        assert!((v.nu - 1.0).abs() < 1e-13);
        assert!((v.eval(0.0) - 2.0).abs() < 1e-13);
        let phi = optimal_eigenfunction(m1, &pr).unwrap();
        assert!((phi.eval(0.0) - 1.0).abs() < 1e-14);
        assert!((phi.eval(1.3) - 1.0 / 1.3f64.cosh()).abs() < 1e-14);
        let pr3 = params(2, 3.0);
        let phi3 = optimal_eigenfunction(mu_one(&pr3), &pr3).unwrap();
        assert!((phi3.eval(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn optimal_potential_norm_is_mu_by_quadrature() {
        // ‖V_{1,μ}‖_q = μ, checked on wide fine grids at 1e-8.
        for &(q, f) in &[(2.0, 0.7), (2.0, 2.3), (3.0, 1.0), (1.5, 1.3)] {
            let pr = params(2, q);
            let mu = f * mu_one(&pr);
            let v = optimal_potential(mu, &pr).unwrap();
            let grid = v.default_grid(20_001).unwrap();
            let sampled = v.sample(grid);
            let norm = crate::line::lq_norm_1d(&sampled, q).unwrap();
            assert!(
                (norm - mu).abs() < 1e-8 * mu.max(1.0),
                "q={q}, mu={mu}: quadrature norm {norm}"
            );
        }
    }

    #[test]
    fn theta_star_degenerate_denominator_rejected() {
        // At d = 3 the denominator vanishes on the curve 2n² = 10.
        let rp = RigidityParams { n: 5.0f64.sqrt(), theta: 0.0, kappa: 1.0, lambda1_m: 2.0 };
        assert!(matches!(theta_star(&rp, 3), Err(KltError::Degenerate(_))));
    }

    #[test]
    fn sech_stable_at_large_arguments() {
        assert!(sech(800.0) >= 0.0);
        assert!(sech(800.0) < 1e-300);
        assert!((sech(-3.0) - sech(3.0)).abs() < 1e-16);
    }

    #[test]
    fn lambda_theta_sphere_is_theta_independent() {
        for d in 3u32..=10 {
            let df = d as f64;
            for &qi in &[2.0, 3.0, 4.0] {
                let rp = RigidityParams { n: 2.0 * qi, theta: 0.0, kappa: df - 2.0, lambda1_m: df - 1.0 };
                let base = lambda_theta_at(&rp, d, 0.0).unwrap();
                let ts = theta_star(&rp, d).unwrap();
                for &t in &[-1.0, ts, 1.0] {
                    let v = lambda_theta_at(&rp, d, t).unwrap();
                    assert!((v - base).abs() < 1e-12, "d={d} theta={t}: {v} vs {base}");
                }
            }
        }
    }

    #[test]
    fn lambda_theta_flat_circle() {
        // d = 2, n = 4, λ₁ = 1, θ = 0: δ = 2/3, λ₀ = 2/3.
        let rp = RigidityParams { n: 4.0, theta: 0.0, kappa: 0.0, lambda1_m: 1.0 };
        assert!((rp.delta(2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((lambda_theta(&rp, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let bad = RigidityParams { kappa: 0.5, ..rp };
        assert!(lambda_theta(&bad, 2).is_err());
    }

    #[test]
    fn theta_star_reference_value() {
        // d = 3, n = 6: exact value -125/124.
        let rp = RigidityParams { n: 6.0, theta: 0.0, kappa: 1.0, lambda1_m: 2.0 };
        let t = theta_star(&rp, 3).unwrap();
        assert!((t + 125.0 / 124.0).abs() < 1e-13, "{t}");
        assert_eq!(theta_star_exact(3, 6).unwrap(), Rational64::new(-125, 124));
        // d = 2 zeroes the numerator.
        assert_eq!(theta_star_exact(2, 8).unwrap(), Rational64::new(0, 1));
    }

    #[test]
    fn theta_star_nonpositive_and_lambda_star_above_lambda0() {
        // θ ↦ λ_θ is non-increasing under Lichnerowicz, θ* <= 0, so
        // λ* >= λ₀ = κ + δ λ₁.
        for d in 3u32..=8 {
            let df = d as f64;
            for &n in &[6.0, 8.0, 12.0] {
                if n <= df {
                    continue; // convention requires n > d so that δ > 0
                }
                let kappa = 0.5 * (df - 2.0); // strictly below the sphere value
                let lambda1 = df - 1.0;
                let rp = RigidityParams { n, theta: 0.0, kappa, lambda1_m: lambda1 };
                let ts = theta_star(&rp, d).unwrap();
                assert!(ts <= 1e-15, "d={d} n={n}: theta_star = {ts}");
                let l0 = lambda_theta_at(&rp, d, 0.0).unwrap();
                let ls = lambda_star(&rp, d).unwrap();
                assert!(ls >= l0 - 1e-13, "d={d} n={n}: {ls} < {l0}");
            }
        }
    }

    #[test]
    fn mu_star_bounds_examples() {
        // Sphere with n = 2q collapses the interval.
        let pr = params(3, 2.0);
        let rp = RigidityParams::standard(&pr, 1.0, 2.0);
        let (lo, hi) = mu_star_bounds(&rp, &pr).unwrap();
        assert!((lo - hi).abs() < 1e-12 * hi, "lo={lo} hi={hi}");

        // d = 2, q = 2, λ₁ = 1: upper = μ₁ 3^(-3/4).
        let pr2 = params(2, 2.0);
        let rp2 = RigidityParams::standard(&pr2, 0.0, 1.0);
        let (lo2, hi2) = mu_star_bounds(&rp2, &pr2).unwrap();
        let expect = mu_one(&pr2) * 3.0f64.powf(-0.75);
        assert!((hi2 - expect).abs() < 1e-12, "{hi2} vs {expect}");
        assert!((hi2 - 1.013114).abs() < 1e-6);
        assert!(lo2 <= hi2 + 1e-13);
        // Cross-check through the instability threshold: Λ_R(μ*) = 1/3.
        assert!((lambda_r(hi2, &pr2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_equality_identity_exact() {
        for d in 2i64..=10 {
            for q in 2i64..=4 {
                assert!(sphere_equality_exact(d, q), "equality fails at d={d}, q={q}");
            }
        }
    }

    #[test]
    fn algebraic_coincidence_collapses_bounds() {
        // If λ* = 2(q-1) λ₁ / (2q-1) then lower = upper regardless of M.
        let pr = params(3, 2.5);
        let lambda1 = 1.7;
        // Pick κ to force the coincidence at fixed n: solve λ_{θ*}(κ) = target.
        let mut rp = RigidityParams { n: 2.0 * pr.q, theta: 0.0, kappa: 0.0, lambda1_m: lambda1 };
        let target = 2.0 * (pr.q - 1.0) * lambda1 / (2.0 * pr.q - 1.0);
        let ts = theta_star(&rp, 3).unwrap();
        // λ_θ is affine in κ with slope (1 + δ θ* (d-1)/(d-2)).
        let at0 = lambda_theta_at(&rp, 3, ts).unwrap();
        rp.kappa = 1.0;
        let at1 = lambda_theta_at(&rp, 3, ts).unwrap();
        rp.kappa = (target - at0) / (at1 - at0);
        let (lo, hi) = mu_star_bounds(&rp, &pr).unwrap();
        assert!((lo - hi).abs() < 1e-10 * hi, "lo={lo} hi={hi}");
    }
}
