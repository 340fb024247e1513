//! Spectral description of the compact factor `M`.
//!
//! A manifold enters every computation only through its dimension, its
//! Ricci lower bound `κ` and the eigenvalues of `-Δ_g` with multiplicities
//! (volume-normalized metric, `vol_g(M) = 1`). No mesh or metric tensor is
//! ever stored. Volume normalization scales the integration measure, not
//! the metric, so sphere eigenvalues keep their unit-radius values
//! `λ_ℓ = ℓ(ℓ+d-2)`.

use crate::error::{KltError, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    /// Dimension of `M` (= d - 1 for a cylinder of dimension d).
    pub dim: u32,
    /// Infimum of the Ricci curvature.
    pub kappa: f64,
    /// Eigenvalues of `-Δ_g` with multiplicities, starting at λ₀ = 0.
    pub eigenvalues: Vec<(f64, u32)>,
    pub name: String,
}

impl ManifoldSpec {
    /// Validates the ordering invariants: `λ₀ = 0` with multiplicity 1 and
    /// a nondecreasing, positive-after-zero eigenvalue list. The
    /// Lichnerowicz inequality is checked separately by
    /// [`lichnerowicz_check`] so that deliberately inconsistent specs can
    /// still be constructed and rejected downstream.
    pub fn new(dim: u32, kappa: f64, eigenvalues: Vec<(f64, u32)>, name: impl Into<String>) -> Result<Self> {
        if dim < 1 {
            return Err(KltError::invalid("manifold dimension must be >= 1"));
        }
        if eigenvalues.is_empty() || eigenvalues[0].0 != 0.0 || eigenvalues[0].1 != 1 {
            return Err(KltError::invalid(
                "eigenvalue list must start with lambda_0 = 0 of multiplicity 1 (M connected)",
            ));
        }
        if eigenvalues.len() < 2 {
            return Err(KltError::invalid("eigenvalue list must contain lambda_1"));
        }
        let mut prev = 0.0;
        for (i, &(l, m)) in eigenvalues.iter().enumerate().skip(1) {
            if !(l > 0.0) || !l.is_finite() {
                return Err(KltError::invalid(format!(
                    "eigenvalue {i} must be positive and finite, got {l}"
                )));
            }
            if l < prev {
                return Err(KltError::invalid("eigenvalues must be nondecreasing"));
            }
            if m == 0 {
                return Err(KltError::invalid("multiplicities must be positive"));
            }
            prev = l;
        }
        Ok(ManifoldSpec { dim, kappa, eigenvalues, name: name.into() })
    }

    /// Lowest positive eigenvalue `λ₁`.
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[1].0
    }

    /// Distinct eigenvalues in order, as `(index, lambda, multiplicity)`.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, u32)> + '_ {
        self.eigenvalues.iter().enumerate().map(|(i, &(l, m))| (i, l, m))
    }
}

/// Number of linearly independent harmonic homogeneous polynomials of
/// degree `l` in `d` variables — the multiplicity of `λ_ℓ` on `S^(d-1)`.
fn harmonic_multiplicity(d: u32, l: u32) -> u32 {
    fn binom(n: i64, k: i64) -> i64 {
        if k < 0 || k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: i64 = 1;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }
    let d = d as i64;
    let l = l as i64;
    (binom(d + l - 1, l) - binom(d + l - 3, l - 2)) as u32
}

/// Round sphere `S^(d-1)` of unit radius: `κ = d - 2`,
/// `λ_ℓ = ℓ(ℓ+d-2)` with the spherical-harmonic multiplicities, for
/// `ℓ = 0..=l_max`. The circle (`d = 2`) is flat with `λ_k = k²` and
/// multiplicity 2 for `k >= 1`.
pub fn sphere_spec(d: u32, l_max: u32) -> Result<ManifoldSpec> {
    if d < 2 {
        return Err(KltError::invalid("sphere_spec requires d >= 2"));
    }
    if l_max < 1 {
        return Err(KltError::invalid("sphere_spec requires l_max >= 1"));
    }
    let eigenvalues = (0..=l_max)
        .map(|l| {
            let lam = (l as f64) * (l as f64 + d as f64 - 2.0);
            (lam, harmonic_multiplicity(d, l))
        })
        .collect();
    ManifoldSpec::new(d - 1, d as f64 - 2.0, eigenvalues, format!("S^{}", d - 1))
}

/// Lichnerowicz inequality `κ · dim/(dim-1) <= λ₁` (with tolerance 1e-12).
/// One-dimensional factors have no Ricci curvature; the check is vacuously
/// true for them (the only compact case is the flat circle, `κ = 0`).
pub fn lichnerowicz_check(spec: &ManifoldSpec) -> bool {
    if spec.dim < 2 {
        return true;
    }
    let m = spec.dim as f64;
    spec.kappa * m / (m - 1.0) <= spec.lambda1() + 1e-12
}

/// Plain-text format: one header line `dim kappa`, then one line
/// `lambda multiplicity` per eigenvalue in nondecreasing order.
pub fn parse_manifold_spec(text: &str, path: &str) -> Result<ManifoldSpec> {
    let err = |msg: String| KltError::Parse { path: path.to_string(), msg };
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| err("empty file".into()))?;
    let mut it = header.split_whitespace();
    let dim: u32 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("header must be `dim kappa`".into()))?;
    let kappa: f64 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("header must be `dim kappa`".into()))?;
    if it.next().is_some() {
        return Err(err("header must contain exactly two fields".into()));
    }
    let mut eigenvalues = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let mut it = line.split_whitespace();
        let lam: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(format!("bad eigenvalue line {}", lineno + 2)))?;
        let mult: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(format!("bad multiplicity on line {}", lineno + 2)))?;
        if it.next().is_some() {
            return Err(err(format!("trailing fields on line {}", lineno + 2)));
        }
        eigenvalues.push((lam, mult));
    }
    let spec = ManifoldSpec::new(dim, kappa, eigenvalues, path.to_string())?;
    if !lichnerowicz_check(&spec) {
        return Err(err(format!(
            "Lichnerowicz inequality violated: kappa dim/(dim-1) = {} > lambda_1 = {}",
            spec.kappa * spec.dim as f64 / (spec.dim as f64 - 1.0),
            spec.lambda1()
        )));
    }
    Ok(spec)
}

pub fn load_manifold_spec(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| KltError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_manifold_spec(&text, &path.display().to_string())
}

pub fn format_manifold_spec(spec: &ManifoldSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", spec.dim, spec.kappa);
    for &(l, m) in &spec.eigenvalues {
        let _ = writeln!(out, "{l} {m}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_low_modes() {
        let s3 = sphere_spec(3, 4).unwrap();
        assert_eq!(s3.dim, 2);
        assert!((s3.kappa - 1.0).abs() < 1e-15);
        assert_eq!(s3.eigenvalues[0], (0.0, 1));
        assert_eq!(s3.eigenvalues[1], (2.0, 3)); // λ₁ = d-1 = 2, degree-1 harmonics
        assert_eq!(s3.eigenvalues[2], (6.0, 5));

        let circle = sphere_spec(2, 3).unwrap();
        assert_eq!(circle.kappa, 0.0);
        assert_eq!(circle.eigenvalues[1], (1.0, 2));
        assert_eq!(circle.eigenvalues[2], (4.0, 2));
        assert_eq!(circle.eigenvalues[3], (9.0, 2));
    }

    #[test]
    fn multiplicities_sum_to_polynomial_space_dimension() {
        // Σ_{ℓ<=L} mult(ℓ) = C(L+d-1, L) + C(L+d-2, L-1), checked through
        // the Pascal recursion rather than the closed form.
        fn binom(n: u64, k: u64) -> u64 {
            if k > n {
                return 0;
            }
            let mut row = vec![0u64; (k + 1) as usize];
            row[0] = 1;
            for _ in 0..n {
                for j in (1..row.len()).rev() {
                    row[j] += row[j - 1];
                }
            }
            row[k as usize]
        }
        for d in 2u32..=6 {
            for l_max in 1u32..=6 {
                let spec = sphere_spec(d, l_max).unwrap();
                let total: u64 = spec.eigenvalues.iter().map(|&(_, m)| m as u64).sum();
                let expect = binom((l_max + d - 1) as u64, l_max as u64)
                    + binom((l_max + d - 2) as u64, (l_max - 1) as u64);
                assert_eq!(total, expect, "d={d} L={l_max}");
            }
        }
    }

    #[test]
    fn lichnerowicz_equality_on_spheres() {
        for d in 3u32..=8 {
            let s = sphere_spec(d, 2).unwrap();
            let m = s.dim as f64;
            assert!((s.kappa * m / (m - 1.0) - s.lambda1()).abs() < 1e-12);
            assert!(lichnerowicz_check(&s));
        }
        // d = 4 numbers spelled out: κ = 2, λ₁ = 3, 2·3/2 = 3 <= 3.
        let s4 = sphere_spec(4, 1).unwrap();
        assert_eq!(s4.kappa, 2.0);
        assert_eq!(s4.lambda1(), 3.0);
    }

    #[test]
    fn lichnerowicz_violations_detected() {
        let bad = ManifoldSpec::new(3, 5.0, vec![(0.0, 1), (1.0, 2)], "bad").unwrap();
        assert!(!lichnerowicz_check(&bad));
        let circle = sphere_spec(2, 2).unwrap();
        assert!(lichnerowicz_check(&circle));
    }

    #[test]
    fn spec_file_roundtrip_and_validation() {
        let s = sphere_spec(3, 3).unwrap();
        let text = format_manifold_spec(&s);
        let back = parse_manifold_spec(&text, "mem").unwrap();
        assert_eq!(back.dim, s.dim);
        assert_eq!(back.eigenvalues, s.eigenvalues);

        assert!(parse_manifold_spec("", "mem").is_err());
        assert!(parse_manifold_spec("2 0\n0 1\n-1 2\n", "mem").is_err());
        assert!(parse_manifold_spec("2 0\n0 2\n1 2\n", "mem").is_err());
        // Lichnerowicz enforced on load.
        assert!(parse_manifold_spec("3 9\n0 1\n1 2\n", "mem").is_err());
    }

    #[test]
    fn rejects_decreasing_and_empty() {
        assert!(ManifoldSpec::new(2, 0.0, vec![(0.0, 1), (4.0, 2), (1.0, 2)], "x").is_err());
        assert!(ManifoldSpec::new(2, 0.0, vec![(0.0, 1)], "x").is_err());
    }
}
