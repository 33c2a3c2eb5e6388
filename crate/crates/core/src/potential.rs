//! The tilted double-well potential `V(θ; η, φ) = −cos(θ + φ) − η cos 2θ`,
//! its stationary points and the action `S = −V` at a chosen minimum.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::polyroots::{solve_quartic, QuarticPoly};
use crate::{DsgeError, Result};

/// Below this `|sin φ|` the extremum quartic is ill-conditioned and the
/// factored `φ ∈ {0, π}` stationary points are used as Newton seeds instead.
const SIN_PHI_EPS: f64 = 1e-6;

/// Stationary points closer than this (radians) are merged.
const MERGE_DIST: f64 = 1e-7;

/// `|V''|` below this is an inflection, not an extremum. Newton converges
/// only to about `ε^{1/3}` near a triple root, so the curvature there is
/// resolved no better than roughly `1e-8`.
pub const DEGENERATE_CURVATURE: f64 = 1e-6;

/// The problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsgeParams {
    /// Second-harmonic coefficient η.
    pub eta: f64,
    /// Phase φ in radians.
    pub phi: f64,
    pub tol: f64,
}

impl DsgeParams {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(eta: f64, phi: f64) -> Result<Self> {
        Self::with_tol(eta, phi, Self::DEFAULT_TOL)
    }

    pub fn with_tol(eta: f64, phi: f64, tol: f64) -> Result<Self> {
        if !eta.is_finite() || !phi.is_finite() {
            return Err(DsgeError::InvalidParams(format!(
                "eta = {eta}, phi = {phi} must be finite"
            )));
        }
        if tol <= 0.0 || !tol.is_finite() {
            return Err(DsgeError::InvalidParams(format!("tol = {tol} must be > 0")));
        }
        Ok(Self { eta, phi, tol })
    }

    /// Same instance with the phase replaced.
    pub fn at_phi(&self, phi: f64) -> Self {
        Self { phi, ..*self }
    }
}

/// Which minimum the solution approaches as `s → ±∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    AbsoluteMin,
    RelativeMin,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::AbsoluteMin => "abs-min",
            Branch::RelativeMin => "rel-min",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = DsgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs-min" | "absolute-min" => Ok(Branch::AbsoluteMin),
            "rel-min" | "relative-min" => Ok(Branch::RelativeMin),
            other => Err(DsgeError::InvalidParams(format!("unknown branch {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumKind {
    AbsMin,
    RelMin,
    AbsMax,
    RelMax,
    /// Vanishing curvature; left unclassified.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Location in `[0, 2π)`.
    pub theta: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// `tan(θ/2)`; infinite at `θ = π`.
    pub tan_half: f64,
    /// `V''(θ)`.
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumSet {
    /// Ascending in `theta`.
    pub items: Vec<Extremum>,
    pub params: DsgeParams,
    /// Set when two stationary points merge or a curvature vanishes.
    pub degenerate: bool,
}

impl ExtremumSet {
    pub fn of_kind(&self, kind: ExtremumKind) -> impl Iterator<Item = &Extremum> {
        self.items.iter().filter(move |e| e.kind == kind)
    }

    pub fn minima(&self) -> impl Iterator<Item = &Extremum> {
        self.items
            .iter()
            .filter(|e| matches!(e.kind, ExtremumKind::AbsMin | ExtremumKind::RelMin))
    }
}

pub fn eval_potential(theta: f64, params: &DsgeParams) -> f64 {
    -(theta + params.phi).cos() - params.eta * (2.0 * theta).cos()
}

pub fn eval_potential_gradient(theta: f64, params: &DsgeParams) -> f64 {
    (theta + params.phi).sin() + 2.0 * params.eta * (2.0 * theta).sin()
}

pub fn eval_potential_curvature(theta: f64, params: &DsgeParams) -> f64 {
    (theta + params.phi).cos() + 4.0 * params.eta * (2.0 * theta).cos()
}

/// `dV/dθ = 0` under `t = tan(θ/2)`, divided by `−sin φ`:
/// `t⁴ + (8η − 2cos φ)/sin φ · t³ − (2cos φ + 8η)/sin φ · t − 1`.
pub fn extremum_quartic(params: &DsgeParams) -> Result<QuarticPoly> {
    let (s, c) = params.phi.sin_cos();
    if s.abs() < SIN_PHI_EPS {
        return Err(DsgeError::DegreeCollapse(s));
    }
    let eta = params.eta;
    QuarticPoly::new(
        (2.0 * c - 8.0 * eta) / s,
        0.0,
        (2.0 * c + 8.0 * eta) / s,
        -1.0,
    )
}

fn canonical(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn tan_half(theta: f64) -> f64 {
    if (theta - PI).abs() < 1e-12 {
        f64::INFINITY
    } else {
        (theta / 2.0).tan()
    }
}

/// Newton on `V'`; gives up (returns `None`) if it leaves the basin.
fn refine_stationary(seed: f64, params: &DsgeParams) -> Option<f64> {
    let mut theta = seed;
    for _ in 0..60 {
        let g = eval_potential_gradient(theta, params);
        if g == 0.0 {
            break;
        }
        let h = eval_potential_curvature(theta, params);
        if h.abs() < 1e-300 {
            break;
        }
        let step = g / h;
        theta -= step.clamp(-0.5, 0.5);
        if step.abs() < 1e-16 * theta.abs().max(1.0) {
            break;
        }
    }
    let g = eval_potential_gradient(theta, params);
    (g.abs() < 1e-9 && circular_gap(theta, seed) < 0.5).then_some(theta)
}

fn stationary_seeds(params: &DsgeParams) -> Vec<f64> {
    let mut seeds = Vec::with_capacity(5);
    match extremum_quartic(params) {
        Ok(q) => {
            for a in solve_quartic(&q).alphas {
                if a.im.abs() <= 1e-6 * a.norm().max(1.0) {
                    seeds.push(2.0 * a.re.atan());
                }
            }
            // θ = π is invisible to t = tan(θ/2).
            if eval_potential_gradient(PI, params).abs() < params.tol {
                seeds.push(PI);
            }
        }
        Err(_) => {
            // sin φ ≈ 0: V' = sin θ (cos φ + 4η cos θ).
            let c = params.phi.cos().signum();
            seeds.extend([0.0, PI]);
            if params.eta != 0.0 {
                let x = -c / (4.0 * params.eta);
                if x.abs() <= 1.0 {
                    let a = x.acos();
                    seeds.extend([a, TAU - a]);
                }
            }
        }
    }
    seeds
}

pub fn find_extrema(params: &DsgeParams) -> ExtremumSet {
    let mut points: Vec<f64> = stationary_seeds(params)
        .into_iter()
        .filter_map(|s| refine_stationary(s, params))
        .map(canonical)
        .collect();
    points.sort_by(f64::total_cmp);

    let mut degenerate = false;
    let mut merged: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(&last) = merged.last() {
            if circular_gap(p, last) < MERGE_DIST {
                degenerate |= eval_potential_curvature(p, params).abs() < DEGENERATE_CURVATURE;
                continue;
            }
        }
        if let Some(&first) = merged.first() {
            if merged.len() > 1 && circular_gap(p, first) < MERGE_DIST {
                degenerate |= eval_potential_curvature(p, params).abs() < DEGENERATE_CURVATURE;
                continue;
            }
        }
        merged.push(p);
    }

    let curv_tol = params.tol.max(DEGENERATE_CURVATURE);
    let val_tol = params.tol.max(1e-12);
    let raw: Vec<(f64, f64, f64)> = merged
        .iter()
        .map(|&t| {
            (
                t,
                eval_potential(t, params),
                eval_potential_curvature(t, params),
            )
        })
        .collect();
    let vmin = raw
        .iter()
        .filter(|r| r.2 >= curv_tol)
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    let vmax = raw
        .iter()
        .filter(|r| r.2 <= -curv_tol)
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);

    let items = raw
        .into_iter()
        .map(|(theta, value, curvature)| {
            let kind = if curvature.abs() < curv_tol {
                degenerate = true;
                ExtremumKind::Degenerate
            } else if curvature > 0.0 {
                if (value - vmin).abs() <= val_tol {
                    ExtremumKind::AbsMin
                } else {
                    ExtremumKind::RelMin
                }
            } else if (value - vmax).abs() <= val_tol {
                ExtremumKind::AbsMax
            } else {
                ExtremumKind::RelMax
            };
            Extremum {
                theta,
                value,
                kind,
                tan_half: tan_half(theta),
                curvature,
            }
        })
        .collect();

    ExtremumSet {
        items,
        params: *params,
        degenerate,
    }
}

/// The branch's stationary point; among equal candidates the one with the
/// smallest `|tan(θ/2)|`.
pub fn select_branch(set: &ExtremumSet, branch: Branch) -> Result<Extremum> {
    let kind = match branch {
        Branch::AbsoluteMin => ExtremumKind::AbsMin,
        Branch::RelativeMin => ExtremumKind::RelMin,
    };
    set.of_kind(kind)
        .min_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.tan_half.abs().total_cmp(&b.tan_half.abs()))
        })
        .copied()
        .ok_or_else(|| {
            DsgeError::NoSuchBranch(format!(
                "no {branch} at eta = {}, phi = {}",
                set.params.eta, set.params.phi
            ))
        })
}

/// `S = −V` at the branch's minimum.
pub fn action_from_branch(params: &DsgeParams, branch: Branch) -> Result<(f64, Extremum)> {
    let ext = select_branch(&find_extrema(params), branch)?;
    Ok((-ext.value, ext))
}
