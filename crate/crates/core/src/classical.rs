//! Closed-form `φ = 0` kinks and bubbles, and their `φ = π/2` images
//! obtained from `V(θ; η, π/2) = V(θ + π/2; −η, 0)`.
//!
//! These are the ground-truth fixtures for the Möbius pipeline.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::energy::{self, EnergyReport};
use crate::potential::{action_from_branch, Branch, DsgeParams};
use crate::{DsgeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    /// `2 arctan[±A coth(ks)]`, crosses the absolute maximum (η < −1/4).
    LargeKinkCase1,
    /// `2 arctan[±A tanh(ks)]`, crosses the relative maximum (η < −1/4).
    SmallKinkCase1,
    /// `2 arctan[±√(1+4η) csch(√(1+4η) s)]` (η > −1/4).
    KinkCase23,
    /// `2 arctan[±cosh(√(4η−1) s)/√(4η−1)]` (η > 1/4).
    BubbleCase3,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 4] = [
        SolutionKind::LargeKinkCase1,
        SolutionKind::SmallKinkCase1,
        SolutionKind::KinkCase23,
        SolutionKind::BubbleCase3,
    ];

    /// Kinks sit on the absolute minimum, the bubble on the relative one.
    pub fn branch(self) -> Branch {
        match self {
            SolutionKind::BubbleCase3 => Branch::RelativeMin,
            _ => Branch::AbsoluteMin,
        }
    }

    fn admissible(self, eta: f64) -> bool {
        match self {
            SolutionKind::LargeKinkCase1 | SolutionKind::SmallKinkCase1 => eta < -0.25,
            SolutionKind::KinkCase23 => eta > -0.25,
            SolutionKind::BubbleCase3 => eta > 0.25,
        }
    }
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolutionKind::LargeKinkCase1 => "large-kink",
            SolutionKind::SmallKinkCase1 => "small-kink",
            SolutionKind::KinkCase23 => "kink",
            SolutionKind::BubbleCase3 => "bubble",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Zero,
    HalfPi,
}

impl Phase {
    pub fn phi(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::HalfPi => FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// η < −1/4
    Case1,
    /// |η| < 1/4
    Case2,
    /// η > 1/4
    Case3,
    /// |η| = 1/4 within tolerance
    DegenerateQuarter,
}

pub fn classify_regime(eta: f64) -> Regime {
    classify_regime_with_tol(eta, DsgeParams::DEFAULT_TOL)
}

pub fn classify_regime_with_tol(eta: f64, tol: f64) -> Regime {
    if (eta.abs() - 0.25).abs() < tol {
        Regime::DegenerateQuarter
    } else if eta < -0.25 {
        Regime::Case1
    } else if eta > 0.25 {
        Regime::Case3
    } else {
        Regime::Case2
    }
}

/// A closed-form solution. `eta` is the physical η; for [`Phase::HalfPi`]
/// the profile is the `φ = 0` form at `−η`, shifted by `−π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSolution {
    pub kind: SolutionKind,
    pub eta: f64,
    pub phase: Phase,
    pub sign: Sign,
    /// Argument scale `k` of the hyperbolic function.
    pub width: f64,
    /// Prefactor multiplying the hyperbolic function.
    pub amplitude: f64,
}

impl ClassicalSolution {
    pub fn new(kind: SolutionKind, eta: f64, phase: Phase, sign: Sign) -> Result<Self> {
        let inadmissible = || DsgeError::InadmissibleKind {
            kind: kind.to_string(),
            eta,
        };
        if !eta.is_finite() {
            return Err(inadmissible());
        }
        let e = match phase {
            Phase::Zero => eta,
            Phase::HalfPi => -eta,
        };
        if classify_regime(e) == Regime::DegenerateQuarter || !kind.admissible(e) {
            return Err(inadmissible());
        }
        let a = e.abs();
        let (width, amplitude) = match kind {
            SolutionKind::LargeKinkCase1 | SolutionKind::SmallKinkCase1 => (
                ((16.0 * e * e - 1.0) / (16.0 * a)).sqrt(),
                ((4.0 * a - 1.0) / (4.0 * a + 1.0)).sqrt(),
            ),
            SolutionKind::KinkCase23 => {
                let k = (1.0 + 4.0 * e).sqrt();
                (k, k)
            }
            SolutionKind::BubbleCase3 => {
                let k = (4.0 * e - 1.0).sqrt();
                (k, 1.0 / k)
            }
        };
        Ok(Self {
            kind,
            eta,
            phase,
            sign,
            width,
            amplitude,
        })
    }

    pub fn params(&self) -> DsgeParams {
        DsgeParams {
            eta: self.eta,
            phi: self.phase.phi(),
            tol: DsgeParams::DEFAULT_TOL,
        }
    }

    /// `S` of the minimum this solution approaches.
    pub fn action(&self) -> Result<f64> {
        action_from_branch(&self.params(), self.kind.branch()).map(|(s, _)| s)
    }

    fn shift(&self) -> f64 {
        match self.phase {
            Phase::Zero => 0.0,
            Phase::HalfPi => -FRAC_PI_2,
        }
    }

    /// Limits `(θ(−∞), θ(+∞))` of the continuous profile.
    pub fn limits(&self) -> (f64, f64) {
        let sg = self.sign.value();
        let a = self.amplitude;
        let (lo, hi) = match self.kind {
            SolutionKind::LargeKinkCase1 => (2.0 * (sg * a).atan2(-1.0), 2.0 * (sg * a).atan()),
            SolutionKind::SmallKinkCase1 => (-2.0 * (sg * a).atan(), 2.0 * (sg * a).atan()),
            SolutionKind::KinkCase23 => (sg * TAU, 0.0),
            SolutionKind::BubbleCase3 => (sg * PI, sg * PI),
        };
        (lo + self.shift(), hi + self.shift())
    }
}

/// `θ(s)` as a continuous lift: the `coth`/`csch` poles at `s = 0` are
/// removed by writing `2 arctan(N/D)` as `2 atan2(N, D)` with `N` of fixed
/// sign.
pub fn eval_classical(sol: &ClassicalSolution, s: f64) -> f64 {
    let sg = sol.sign.value();
    let (k, a) = (sol.width, sol.amplitude);
    let x = k * s;
    let theta = match sol.kind {
        SolutionKind::LargeKinkCase1 => 2.0 * (sg * a).atan2(x.tanh()),
        SolutionKind::SmallKinkCase1 => 2.0 * (sg * a * x.tanh()).atan(),
        SolutionKind::KinkCase23 => 2.0 * (sg * a).atan2(x.sinh()),
        SolutionKind::BubbleCase3 => 2.0 * (sg * a * x.cosh()).atan(),
    };
    theta + sol.shift()
}

/// Analytic `dθ/ds`.
pub fn eval_classical_derivative(sol: &ClassicalSolution, s: f64) -> f64 {
    let sg = sol.sign.value();
    let (k, a) = (sol.width, sol.amplitude);
    let x = k * s;
    if x.abs() > 350.0 {
        return 0.0;
    }
    match sol.kind {
        SolutionKind::LargeKinkCase1 => {
            let (t, c) = (x.tanh(), x.cosh());
            -2.0 * sg * a * k / (c * c * (a * a + t * t))
        }
        SolutionKind::SmallKinkCase1 => {
            let (sh, c) = (x.sinh(), x.cosh());
            2.0 * sg * a * k / (c * c + a * a * sh * sh)
        }
        SolutionKind::KinkCase23 => {
            let (sh, c) = (x.sinh(), x.cosh());
            -2.0 * sg * a * k * c / (a * a + sh * sh)
        }
        SolutionKind::BubbleCase3 => {
            let (sh, c) = (x.sinh(), x.cosh());
            let w = k;
            2.0 * sg * k * w * sh / (w * w + c * c)
        }
    }
}

/// The published closed-form energy at `φ = 0`, evaluated as printed.
pub fn closed_form_energy(kind: SolutionKind, eta: f64) -> Result<f64> {
    ClassicalSolution::new(kind, eta, Phase::Zero, Sign::Plus)?;
    let a = eta.abs();
    Ok(match kind {
        SolutionKind::LargeKinkCase1 => {
            let phi0 = (-1.0 / (4.0 * eta)).acos();
            ((16.0 * eta * eta - 1.0).sqrt() + PI - phi0) / a.sqrt()
        }
        SolutionKind::SmallKinkCase1 => {
            let phi0 = (-1.0 / (4.0 * eta)).acos();
            ((16.0 * eta * eta - 1.0).sqrt() - phi0) / a.sqrt()
        }
        SolutionKind::KinkCase23 => {
            let base = 4.0 * (4.0 * eta + 1.0).sqrt();
            if eta > 0.0 {
                base + 2.0 * (2.0 * eta.sqrt() + (4.0 * eta + 1.0).sqrt()).ln() / eta.sqrt()
            } else if eta < 0.0 {
                base + 2.0 * (2.0 * a.sqrt()).asin() / a.sqrt()
            } else {
                8.0
            }
        }
        SolutionKind::BubbleCase3 => {
            4.0 * (4.0 * eta - 1.0).sqrt()
                - 4.0 * (2.0 * eta.sqrt() + (4.0 * eta - 1.0).sqrt()).ln() / eta.sqrt()
        }
    })
}

/// θ-interval and multiplicity used to express `H` through
/// [`energy::quadrature_vs`]: `H = factor · quadrature_vs(lo, hi)`.
pub fn quadrature_bounds(kind: SolutionKind, eta: f64) -> Result<(f64, f64, f64)> {
    ClassicalSolution::new(kind, eta, Phase::Zero, Sign::Plus)?;
    Ok(match kind {
        SolutionKind::LargeKinkCase1 => {
            let phi0 = (-1.0 / (4.0 * eta)).acos();
            (phi0, TAU - phi0, 2.0)
        }
        SolutionKind::SmallKinkCase1 => {
            let phi0 = (-1.0 / (4.0 * eta)).acos();
            (-phi0, phi0, 2.0)
        }
        SolutionKind::KinkCase23 => (0.0, TAU, 2.0),
        SolutionKind::BubbleCase3 => (2.0 * (1.0 / (4.0 * eta - 1.0).sqrt()).atan(), PI, 4.0),
    })
}

/// Closed form next to quadrature; quadrature is the reference value.
pub fn energy_closed_form(kind: SolutionKind, eta: f64) -> Result<EnergyReport> {
    energy::compare_energy(kind, eta)
}
