//! Fringe analysis: visibility, distinguishability and the duality sum
//! D² + V², with Poisson uncertainty propagation.
//!
//! Visibility follows V = (C_max - C_min)/(C_max + C_min) and
//! distinguishability D = |R₁ - R₂|/(R₁ + R₂) from the coincidence rates
//! with a reference marking path 1.
//!
//! The sinusoid fit is linear: the scan parameter is a phase, so the model
//! a + b·cos(φ - φ₀) expands on the basis (1, cos φ, sin φ) and the normal
//! equations solve in closed form. No iterative solver, deterministic output.

use crate::bench::{FringeScan, ScanMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("visibility undefined: scan has no counts")]
    AllZeroScan,
    #[error("scan spans {span} rad but the sinusoid fit needs a full 2π period")]
    InsufficientSpan { span: f64 },
    #[error("sinusoid fit failed: {reason} (rms residual {rms_residual})")]
    FitFailed { reason: String, rms_residual: f64 },
    #[error("distinguishability undefined: both path rates are zero")]
    BothPathsZero,
    #[error("negative rate {0} in scan")]
    NegativeRate(f64),
}

/// How visibility is extracted from a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VisibilityMethod {
    /// Max/min of the sampled rates. Biased high on noisy data.
    RawExtrema,
    /// Weighted least squares of a + b·cos(φ - φ₀) on the (1, cos, sin)
    /// basis; Poisson weights when the scan carries counts.
    SinusoidFit,
}

/// Visibility with its statistical uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visibility {
    pub value: f64,
    pub sigma: f64,
    pub method: VisibilityMethod,
}

/// D = |r1 - r2|/(r1 + r2) for plain rates (no counting uncertainty).
pub fn distinguishability(r_path1: f64, r_path2: f64) -> Result<(f64, f64), AnalysisError> {
    if r_path1 < 0.0 {
        return Err(AnalysisError::NegativeRate(r_path1));
    }
    if r_path2 < 0.0 {
        return Err(AnalysisError::NegativeRate(r_path2));
    }
    let sum = r_path1 + r_path2;
    if sum == 0.0 {
        return Err(AnalysisError::BothPathsZero);
    }
    Ok(((r_path1 - r_path2).abs() / sum, 0.0))
}

/// D from Poisson counts, with the propagated counting sigma:
/// Var(D) = 4 (n2² n1 + n1² n2) / (n1 + n2)⁴.
pub fn distinguishability_counts(n1: f64, n2: f64) -> Result<(f64, f64), AnalysisError> {
    let (d, _) = distinguishability(n1, n2)?;
    let sum = n1 + n2;
    let var = 4.0 * (n2 * n2 * n1 + n1 * n1 * n2) / sum.powi(4);
    Ok((d, var.sqrt()))
}

fn raw_extrema(scan: &FringeScan) -> Result<Visibility, AnalysisError> {
    let max = scan.rates.iter().cloned().fold(f64::MIN, f64::max);
    let min = scan.rates.iter().cloned().fold(f64::MAX, f64::min);
    if min < 0.0 {
        return Err(AnalysisError::NegativeRate(min));
    }
    if max <= 0.0 {
        return Err(AnalysisError::AllZeroScan);
    }
    let v = (max - min) / (max + min);
    let sigma = if matches!(scan.mode, ScanMode::Poisson { .. }) {
        // Treat the extreme samples as independent Poisson counts.
        let denom = (max + min).powi(2);
        ((2.0 * min / denom).powi(2) * max + (2.0 * max / denom).powi(2) * min).sqrt()
    } else {
        0.0
    };
    Ok(Visibility {
        value: v,
        sigma,
        method: VisibilityMethod::RawExtrema,
    })
}

/// Solve the symmetric 3x3 system M c = r by Gaussian elimination with
/// partial pivoting. Returns None when M is numerically singular.
fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-14 * scale.max(1e-300) {
            return None;
        }
        m.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let (pivot_row, rest) = m.split_at_mut(col + 1);
            for (k, entry) in rest[row - col - 1].iter_mut().enumerate().skip(col) {
                *entry -= f * pivot_row[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut c = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = r[row];
        for k in row + 1..3 {
            acc -= m[row][k] * c[k];
        }
        c[row] = acc / m[row][row];
    }
    Some(c)
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0; 3];
        e[col] = 1.0;
        let column = solve3(m, e)?;
        for row in 0..3 {
            inv[row][col] = column[row];
        }
    }
    Some(inv)
}

fn sinusoid_fit(scan: &FringeScan) -> Result<Visibility, AnalysisError> {
    let span = scan.parameter.last().unwrap_or(&0.0) - scan.parameter.first().unwrap_or(&0.0);
    if span < std::f64::consts::TAU - 1e-9 {
        return Err(AnalysisError::InsufficientSpan { span });
    }
    if scan.rates.iter().all(|&r| r == 0.0) {
        return Err(AnalysisError::AllZeroScan);
    }
    if let Some(&bad) = scan.rates.iter().find(|&&r| r < 0.0) {
        return Err(AnalysisError::NegativeRate(bad));
    }
    let poisson = matches!(scan.mode, ScanMode::Poisson { .. });
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&phi, &y) in scan.parameter.iter().zip(&scan.rates) {
        let basis = [1.0, phi.cos(), phi.sin()];
        let w = if poisson { 1.0 / y.max(1.0) } else { 1.0 };
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += w * basis[i] * basis[j];
            }
            rhs[i] += w * basis[i] * y;
        }
    }
    let residual_of = |c: &[f64; 3]| {
        let mut ss = 0.0;
        for (&phi, &y) in scan.parameter.iter().zip(&scan.rates) {
            let model = c[0] + c[1] * phi.cos() + c[2] * phi.sin();
            ss += (y - model).powi(2);
        }
        (ss / scan.rates.len() as f64).sqrt()
    };
    let c = solve3(m, rhs).ok_or_else(|| AnalysisError::FitFailed {
        reason: "singular normal equations".into(),
        rms_residual: f64::NAN,
    })?;
    let a = c[0];
    let b = c[1].hypot(c[2]);
    if a <= 0.0 {
        return Err(AnalysisError::FitFailed {
            reason: format!("non-positive mean level {a}"),
            rms_residual: residual_of(&c),
        });
    }
    // Covariance of the coefficients: (X^T W X)^{-1}, scaled by the residual
    // variance for unweighted fits (unit variance is built into Poisson
    // weights).
    let cov_scale = if poisson {
        1.0
    } else {
        let n = scan.rates.len() as f64;
        let dof = (n - 3.0).max(1.0);
        let mut ss = 0.0;
        for (&phi, &y) in scan.parameter.iter().zip(&scan.rates) {
            let model = c[0] + c[1] * phi.cos() + c[2] * phi.sin();
            ss += (y - model).powi(2);
        }
        ss / dof
    };
    let sigma = match invert3(m) {
        Some(inv) if b > 0.0 => {
            // Delta method for V = hypot(c1, c2)/c0.
            let g = [-b / (a * a), c[1] / (b * a), c[2] / (b * a)];
            let mut var = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    var += g[i] * cov_scale * inv[i][j] * g[j];
                }
            }
            var.max(0.0).sqrt()
        }
        _ => 0.0,
    };
    Ok(Visibility {
        value: b / a,
        sigma,
        method: VisibilityMethod::SinusoidFit,
    })
}

/// Extract fringe visibility from a scan.
pub fn visibility(scan: &FringeScan, method: VisibilityMethod) -> Result<Visibility, AnalysisError> {
    match method {
        VisibilityMethod::RawExtrema => raw_extrema(scan),
        VisibilityMethod::SinusoidFit => sinusoid_fit(scan),
    }
}

/// Visibility, distinguishability and their duality sum for one
/// measurement configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub visibility: f64,
    pub distinguishability: f64,
    pub duality_sum: f64,
    pub sigma_v: f64,
    pub sigma_d: f64,
    pub method: VisibilityMethod,
    /// Set when duality_sum exceeds 1 by more than twice its propagated
    /// sigma; a pure-model violation, not statistics.
    pub violation: bool,
}

/// Combine V and D into D² + V² with sigmas propagated in quadrature.
pub fn duality_report(
    v: Visibility,
    d: f64,
    sigma_d: f64,
) -> DualityReport {
    let duality_sum = d * d + v.value * v.value;
    let sigma_sum = ((2.0 * v.value * v.sigma).powi(2) + (2.0 * d * sigma_d).powi(2)).sqrt();
    // The small absolute guard keeps rounding dust on saturated (sum = 1)
    // configurations from reading as a model violation.
    DualityReport {
        visibility: v.value,
        distinguishability: d,
        duality_sum,
        sigma_v: v.sigma,
        sigma_d,
        method: v.method,
        violation: duality_sum > 1.0 + 2.0 * sigma_sum + 1e-12,
    }
}
