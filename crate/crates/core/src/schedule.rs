//! Rotation-angle schedules for the composite drive.
//!
//! A schedule stores the pairs `(θ_k, φ_k)` for `k = 1..K`. The negative-`k`
//! half is never stored: it is defined by odd symmetry, `θ_{-k} = -θ_k` and
//! `φ_{-k} = -φ_k`.
//!
//! Standard angles are `θ_k = kπ/Ω` and `φ_k = -(2δλ/Ω) Si(kπ)`, the Fourier
//! sine coefficients of `-1/ω` on `(0, Ω)`. Regularized angles replace `1/ω`
//! by `ω/(ω² + η²)` and evaluate the coefficients by quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, sine_integral};

const REGULARIZED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub theta: f64,
    pub phi: f64,
}

/// How the `φ_k` of a schedule were produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Standard,
    Regularized { eta: f64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleSchedule {
    omega: f64,
    delta_lambda: f64,
    kind: ScheduleKind,
    pairs: Vec<AnglePair>,
}

impl AngleSchedule {
    /// Arbitrary pairs for `k = 1..K`. `omega` is kept as metadata only.
    pub fn custom(omega: f64, delta_lambda: f64, pairs: Vec<AnglePair>) -> Result<Self> {
        if delta_lambda == 0.0 || !delta_lambda.is_finite() {
            return Err(Error::invalid("delta_lambda must be finite and nonzero"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid("omega must be positive"));
        }
        if pairs
            .iter()
            .any(|p| !p.theta.is_finite() || !p.phi.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            omega,
            delta_lambda,
            kind: ScheduleKind::Custom,
            pairs,
        })
    }

    /// Single-step schedule that reproduces the exact two-level gauge
    /// potential: `θ_1 = π/(2Δ)`, `φ_1 = -δλ/Δ`.
    pub fn two_level_exact(gap: f64, delta_lambda: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(Error::invalid("two-level gap must be positive"));
        }
        let pair = AnglePair {
            theta: PI / (2.0 * gap),
            phi: -delta_lambda / gap,
        };
        Self::custom(2.0 * gap, delta_lambda, vec![pair])
    }

    /// Same schedule with every `φ_k` set to zero.
    pub fn without_drive(&self) -> Self {
        let mut out = self.clone();
        out.pairs.iter_mut().for_each(|p| p.phi = 0.0);
        out.kind = ScheduleKind::Custom;
        out
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta_lambda(&self) -> f64 {
        self.delta_lambda
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn eta(&self) -> Option<f64> {
        match self.kind {
            ScheduleKind::Regularized { eta } => Some(eta),
            _ => None,
        }
    }

    /// Pairs for `k = 1..K`.
    pub fn pairs(&self) -> &[AnglePair] {
        &self.pairs
    }

    /// `(θ_k, φ_k)` for any nonzero `k` in `-K..=K`, using odd symmetry.
    pub fn pair(&self, k: i64) -> Option<AnglePair> {
        if k == 0 {
            return None;
        }
        let p = *self.pairs.get(k.unsigned_abs() as usize - 1)?;
        Some(if k > 0 {
            p
        } else {
            AnglePair {
                theta: -p.theta,
                phi: -p.phi,
            }
        })
    }

    /// `Σ_k (φ_k/δλ) sin(θ_k ω)` over `k = 1..K`.
    pub fn drive_sum(&self, omega: f64) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.phi * (p.theta * omega).sin())
            .sum::<f64>()
            / self.delta_lambda
    }
}

fn check_common(k: usize, omega: f64, delta_lambda: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    if delta_lambda == 0.0 || !delta_lambda.is_finite() {
        return Err(Error::invalid("delta_lambda must be finite and nonzero"));
    }
    Ok(())
}

pub(crate) fn thetas(k: usize, omega: f64) -> impl Iterator<Item = f64> {
    (1..=k).map(move |i| i as f64 * PI / omega)
}

pub fn standard_angles(k: usize, omega: f64, delta_lambda: f64) -> Result<AngleSchedule> {
    check_common(k, omega, delta_lambda)?;
    let pairs = thetas(k, omega)
        .enumerate()
        .map(|(i, theta)| AnglePair {
            theta,
            phi: -2.0 * delta_lambda / omega * sine_integral((i + 1) as f64 * PI),
        })
        .collect();
    Ok(AngleSchedule {
        omega,
        delta_lambda,
        kind: ScheduleKind::Standard,
        pairs,
    })
}

/// `φ_k = -(2δλ/Ω) ∫_0^Ω ω/(ω²+η²) sin(kπω/Ω) dω`.
pub fn regularized_angles(
    k: usize,
    omega: f64,
    delta_lambda: f64,
    eta: f64,
) -> Result<AngleSchedule> {
    check_common(k, omega, delta_lambda)?;
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::invalid(format!("eta must be non-negative, got {eta}")));
    }
    let pairs = thetas(k, omega)
        .map(|theta| AnglePair {
            theta,
            phi: -2.0 * delta_lambda / omega * regularized_integral(theta, omega, eta),
        })
        .collect();
    Ok(AngleSchedule {
        omega,
        delta_lambda,
        kind: ScheduleKind::Regularized { eta },
        pairs,
    })
}

/// `∫_0^Ω ω/(ω²+η²) sin(θ ω) dω` with `θ = kπ/Ω`.
fn regularized_integral(theta: f64, omega: f64, eta: f64) -> f64 {
    let eta2 = eta * eta;
    let integrand = |w: f64| {
        if w == 0.0 {
            if eta == 0.0 {
                theta
            } else {
                0.0
            }
        } else {
            w / (w * w + eta2) * (theta * w).sin()
        }
    };
    // θΩ/π = k half-periods; 16 panels per half-period gives 32 per period.
    let half_periods = (theta * omega / PI).round().max(1.0) as usize;
    let mut panels = (16 * half_periods).max(32);
    // Resolve the η-wide peak of ω/(ω²+η²) as well.
    if eta > 0.0 && eta < omega {
        panels = panels.max(((omega / eta).ceil() as usize).min(1 << 16));
    }
    adaptive_simpson(integrand, 0.0, omega, REGULARIZED_TOL, panels)
}

/// `K_p = Ω / Δmin`.
pub fn period_prediction(omega: f64, delta_min: f64) -> Result<f64> {
    if !(omega > 0.0) || !(delta_min > 0.0) {
        return Err(Error::invalid("period prediction needs positive omega and delta_min"));
    }
    Ok(omega / delta_min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityReport {
    pub h_term: f64,
    pub dh_term: f64,
    pub total: f64,
}

/// Cost `Σ ||h|| |t|` of the merged gate sequence.
///
/// Merging adjacent `H` rotations leaves a total `H` angle of `4Kπ/Ω`; the
/// derivative rotations contribute `Σ_k |φ_k|`, which equals
/// `(2|δλ|/Ω) Σ Si(kπ)` for standard angles.
pub fn complexity_estimate(
    sched: &AngleSchedule,
    h_norm: f64,
    dh_norm: f64,
) -> Result<ComplexityReport> {
    if !(h_norm >= 0.0) || !(dh_norm >= 0.0) {
        return Err(Error::invalid("norms must be non-negative"));
    }
    let h_term = 4.0 * sched.k() as f64 * PI / sched.omega() * h_norm;
    let dh_term = sched.pairs().iter().map(|p| p.phi.abs()).sum::<f64>() * dh_norm;
    Ok(ComplexityReport {
        h_term,
        dh_term,
        total: h_term + dh_term,
    })
}
