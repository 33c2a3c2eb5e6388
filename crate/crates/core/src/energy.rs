//! Soliton energies.
//!
//! With the vacuum energy subtracted, `H = ∫ θ_s² ds`. On a solution the
//! first integral turns this into a θ-space integral,
//! `∫ θ_s² ds = √2 ∫ √(S − cos(θ + φ) − η cos 2θ) dθ` per monotone pass,
//! which is what [`quadrature_vs`] evaluates (up to the factor 2).

use serde::{Deserialize, Serialize};

use crate::classical::{self, SolutionKind};
use crate::potential::{action_from_branch, eval_potential, DsgeParams};
use crate::quad::{integrate, integrate_endpoint_safe};
use crate::{DsgeError, Result};

/// Absolute tolerance handed to the adaptive quadrature.
const QUAD_TOL: f64 = 1e-12;

/// Difference above which a closed form is flagged.
pub const FLAG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub closed_form: Option<f64>,
    pub quadrature: f64,
    /// `closed_form − quadrature`.
    pub difference: Option<f64>,
    pub branch: String,
    pub flagged: bool,
}

impl EnergyReport {
    pub fn new(closed_form: Option<f64>, quadrature: f64, branch: impl Into<String>) -> Self {
        let difference = closed_form.map(|c| c - quadrature);
        let flagged = match (closed_form, difference) {
            (Some(c), Some(d)) => d.abs() > FLAG_THRESHOLD || c <= 0.0,
            _ => false,
        };
        Self {
            closed_form,
            quadrature,
            difference,
            branch: branch.into(),
            flagged,
        }
    }
}

/// `(1/√2) ∫ √(S − cos(θ + φ) − η cos 2θ) dθ` over `[theta_lo, theta_hi]`.
///
/// Radicands down to `−params.tol` are clamped to zero; anything more
/// negative means `S` and the bounds do not belong together.
pub fn quadrature_vs(params: &DsgeParams, s: f64, theta_lo: f64, theta_hi: f64) -> Result<f64> {
    let mut worst = (0.0_f64, f64::INFINITY);
    let q = integrate_endpoint_safe(
        |theta| {
            let rad = s + eval_potential(theta, params);
            if rad < worst.1 {
                worst = (theta, rad);
            }
            rad.max(0.0).sqrt()
        },
        theta_lo,
        theta_hi,
        QUAD_TOL,
    );
    if worst.1 < -params.tol {
        return Err(DsgeError::NegativeRadicand {
            theta: worst.0,
            value: worst.1,
        });
    }
    Ok(q.value / std::f64::consts::SQRT_2)
}

/// `∫ θ_s² ds` over a symmetric window, with an estimate of what lies
/// outside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEnergy {
    pub value: f64,
    pub tail_estimate: f64,
}

/// Five-point central difference with `h = 1e-4`.
pub fn central_difference<F: Fn(f64) -> f64>(theta: &F, s: f64) -> f64 {
    let h = 1e-4;
    (theta(s - 2.0 * h) - 8.0 * theta(s - h) + 8.0 * theta(s + h) - theta(s + 2.0 * h)) / (12.0 * h)
}

/// Energy of a profile given only `θ(s)`.
pub fn energy_of_profile<F: Fn(f64) -> f64>(theta: F, s_window: f64) -> ProfileEnergy {
    energy_from_derivative(|s| central_difference(&theta, s), s_window)
}

/// Energy of a profile with a known `dθ/ds`.
pub fn energy_from_derivative<F: Fn(f64) -> f64>(dtheta: F, s_window: f64) -> ProfileEnergy {
    let l = s_window.abs();
    let density = |s: f64| {
        let d = dtheta(s);
        d * d
    };
    // Unit panels keep the localized core from hiding between Kronrod nodes.
    let panels = (2.0 * l).ceil().max(1.0) as usize;
    let width = 2.0 * l / panels as f64;
    let value = (0..panels)
        .map(|k| {
            let a = -l + k as f64 * width;
            integrate(density, a, a + width, QUAD_TOL / panels as f64).value
        })
        .sum();
    ProfileEnergy {
        value,
        tail_estimate: tail(&density, -l, -1.0) + tail(&density, l, 1.0),
    }
}

/// Exponential-tail extrapolation `g(L)/α` with `α` read off `g` one unit
/// further inside.
fn tail<F: Fn(f64) -> f64>(density: &F, edge: f64, outward: f64) -> f64 {
    let g_edge = density(edge);
    let g_in = density(edge - outward);
    if g_edge <= 0.0 || !g_edge.is_finite() {
        return 0.0;
    }
    if g_in > g_edge {
        g_edge / (g_in / g_edge).ln()
    } else {
        // Not decaying: the whole remaining line is unknown.
        f64::INFINITY
    }
}

/// `∫ (V + S) ds − ½ ∫ θ_s² ds` over `[−L, L]`. The potential part alone
/// diverges like `2L·S` without the shift by `S`; on a solution the
/// balance tends to zero.
pub fn potential_balance<F, G>(theta: F, dtheta: G, params: &DsgeParams, s: f64, l: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let panels = (2.0 * l).ceil().max(1.0) as usize;
    let width = 2.0 * l / panels as f64;
    (0..panels)
        .map(|k| {
            let a = -l + k as f64 * width;
            integrate(
                |x| {
                    let d = dtheta(x);
                    eval_potential(theta(x), params) + s - 0.5 * d * d
                },
                a,
                a + width,
                QUAD_TOL / panels as f64,
            )
            .value
        })
        .sum()
}

/// Printed closed form next to quadrature at `φ = 0`.
pub fn compare_energy(kind: SolutionKind, eta: f64) -> Result<EnergyReport> {
    let closed = classical::closed_form_energy(kind, eta)?;
    let (lo, hi, factor) = classical::quadrature_bounds(kind, eta)?;
    let params = DsgeParams::new(eta, 0.0)?;
    let (s, _) = action_from_branch(&params, kind.branch())?;
    let vs = quadrature_vs(&params, s, lo, hi)?;
    Ok(EnergyReport::new(Some(closed), factor * vs, kind.to_string()))
}
