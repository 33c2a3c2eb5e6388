//! The coefficient system for `(a, b, c, d, r, S)`.
//!
//! Substituting `f = (aζ + b)/(cζ + d)`, `ζ = sinh(rs)`, into
//! `(df/ds)² = P(f)` and clearing `(cζ + d)⁴` gives a polynomial identity in
//! `ζ`. Together with the scaling `(ad − bc)² = 1` its five coefficients
//! are six equations in six unknowns, solved here by damped Newton.
//! [`symmetry_map58`] relates roots at `φ` and `π − φ`, and
//! [`obstruction_check`] treats the self-symmetric ansatz at `φ = π/2`.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::exec::{self, Strategy};
use crate::mobius::{self, Carrier, Chart, MobiusSolution};
use crate::potential::{Branch, DsgeParams};
use crate::{DsgeError, Result, C64};

pub const MAX_ITERATIONS: usize = 200;
pub const CONVERGED_NORM: f64 = 1e-10;
const FD_STEP: f64 = 1e-7;
const MIN_DAMPING: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemCandidate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub s: f64,
    pub params: DsgeParams,
}

impl SystemCandidate {
    fn to_vec(self) -> Vector6<f64> {
        Vector6::new(self.a, self.b, self.c, self.d, self.r, self.s)
    }

    fn with_vec(self, v: &Vector6<f64>) -> Self {
        Self {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
            r: v[4],
            s: v[5],
            params: self.params,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_finite())
    }

    /// Maps into the reported gauge `r ≥ 0`, `b ≥ 0`. Both flips preserve
    /// the residuals.
    pub fn gauged(mut self) -> Self {
        self.r = self.r.abs();
        if self.b < 0.0 {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c;
            self.d = -self.d;
        }
        self
    }

    pub fn coefficient_size(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// The `sinh` profile these coefficients describe, with the turning
    /// points read off as the images of `ζ = ±i`.
    pub fn to_solution(&self, branch: Branch) -> MobiusSolution {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let image = |z: C64| (z * a + b) / (z * c + d);
        MobiusSolution {
            f0: image(C64::i()),
            f1: image(-C64::i()),
            f3: a / c,
            s: self.s,
            a,
            b,
            c,
            d,
            r: self.r,
            carrier: Carrier::Sinh,
            chart: Chart::Zero,
            params: self.params,
            branch,
        }
    }
}

/// The physical-chart candidate of a Möbius solution.
impl From<&MobiusSolution> for SystemCandidate {
    fn from(sol: &MobiusSolution) -> Self {
        let [a, b, c, d] = sol.zero_chart_coefficients();
        SystemCandidate {
            a,
            b,
            c,
            d,
            r: sol.r,
            s: sol.s,
            params: sol.params,
        }
    }
}

/// Sign of the `cos φ` terms in the coefficient system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Regenerated from the first integral; the one the solver uses.
    #[default]
    Regenerated,
    /// As printed in the source, equivalent to `cos φ → −cos φ`. Kept as a
    /// diff oracle and as a mutation for the verification suite.
    Printed,
}

type Quartic = [f64; 5];

fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Ascending ζ-coefficients of `2[a₄N⁴ + σN³D + a₂N²D² + σND³ + a₀D⁴]`.
fn substituted(cand: &SystemCandidate, convention: Convention) -> Quartic {
    let mut q = mobius::first_integral_quartic(&cand.params, cand.s);
    if convention == Convention::Printed {
        std::mem::swap(&mut q.a4, &mut q.a0);
    }
    let n = [cand.b, cand.a];
    let d = [cand.d, cand.c];
    let mut n_pows = vec![vec![1.0]];
    let mut d_pows = vec![vec![1.0]];
    for k in 1..=4 {
        n_pows.push(mul(&n_pows[k - 1], &n));
        d_pows.push(mul(&d_pows[k - 1], &d));
    }
    let weights = [q.a0, q.a1, q.a2, q.a3, q.a4];
    let mut out = [0.0; 5];
    for (k, w) in weights.iter().enumerate() {
        for (i, c) in mul(&n_pows[k], &d_pows[4 - k]).iter().enumerate() {
            out[i] += 2.0 * w * c;
        }
    }
    out
}

/// Residuals for a general carrier: `(dζ/ds)² = r²(ζ² + ε)` with `ε = +1`
/// for `sinh` and `−1` for `cosh`.
pub fn residuals_with_carrier(cand: &SystemCandidate, carrier: Carrier) -> [f64; 6] {
    residuals_in(cand, carrier, Convention::Regenerated)
}

/// [`residuals_with_carrier`] under an explicit `cos φ` convention.
pub fn residuals_in(cand: &SystemCandidate, carrier: Carrier, convention: Convention) -> [f64; 6] {
    let eps = match carrier {
        Carrier::Sinh => 1.0,
        Carrier::Cosh => -1.0,
    };
    let det = cand.a * cand.d - cand.b * cand.c;
    let p = substituted(cand, convention);
    let r2 = cand.r * cand.r;
    [
        det * det - 1.0,
        p[4],
        p[3],
        p[2] - 2.0 * r2,
        p[1],
        p[0] - 2.0 * eps * r2,
    ]
}

/// `[(ad − bc)² − 1, ζ⁴, ζ³, ζ² − 2r², ζ¹, ζ⁰ − 2r²]`.
pub fn residuals57(cand: &SystemCandidate) -> [f64; 6] {
    residuals_with_carrier(cand, Carrier::Sinh)
}

pub fn residual_norm(res: &[f64; 6]) -> f64 {
    res.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(a, b, c, d) → (−c, d, −a, b)` with `φ → π − φ`, i.e. `f → 1/f(−ζ)`.
pub fn symmetry_map58(cand: &SystemCandidate) -> SystemCandidate {
    SystemCandidate {
        a: -cand.c,
        b: cand.d,
        c: -cand.a,
        d: cand.b,
        r: cand.r,
        s: cand.s,
        params: cand.params.at_phi(PI - cand.params.phi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ObstructionVerdict {
    /// The ansatz closes with a real `r`; `r = 0` at `η = 1/4` is flagged.
    Consistent {
        r: f64,
        degenerate: bool,
        candidate: Option<SystemCandidate>,
    },
    /// `r² = 1 − 4η < 0`.
    Contradiction { r_squared: f64 },
}

/// The self-symmetric ansatz `a = −c`, `b = d` at `φ = π/2`.
///
/// The `ζ⁴` coefficient is `a⁴(S − 1 + η)` up to a constant, so `S = 1 − η`
/// for `a ≠ 0`. The scaling becomes `4a²b² = 1` and the remaining
/// equations reduce to `b⁴ = r²/4` with `r² = 1 − 4η`.
pub fn obstruction_check(eta: f64) -> ObstructionVerdict {
    let r_squared = 1.0 - 4.0 * eta;
    let tol = 1e-12;
    if r_squared < -tol {
        return ObstructionVerdict::Contradiction { r_squared };
    }
    if r_squared <= tol {
        return ObstructionVerdict::Consistent {
            r: 0.0,
            degenerate: true,
            candidate: None,
        };
    }
    let r = r_squared.sqrt();
    let b = (r_squared / 4.0).powf(0.25);
    let a = 1.0 / (2.0 * b);
    let params = DsgeParams {
        eta,
        phi: PI / 2.0,
        tol: DsgeParams::DEFAULT_TOL,
    };
    ObstructionVerdict::Consistent {
        r,
        degenerate: false,
        candidate: Some(SystemCandidate {
            a,
            b,
            c: -a,
            d: b,
            r,
            s: 1.0 - eta,
            params,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub candidate: SystemCandidate,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub obstruction: Option<bool>,
    /// Residual norm before the first and after every accepted step.
    pub history: Vec<f64>,
}

impl SolveReport {
    pub fn into_result(self) -> Result<SystemCandidate> {
        if self.converged {
            Ok(self.candidate)
        } else {
            Err(DsgeError::Degenerate(format!(
                "Newton did not converge (residual {:e} after {} iterations)",
                self.residual_norm, self.iterations
            )))
        }
    }
}

fn eval(cand: &SystemCandidate, x: &Vector6<f64>) -> Vector6<f64> {
    Vector6::from(residuals57(&cand.with_vec(x)))
}

fn jacobian(cand: &SystemCandidate, x: &Vector6<f64>, fx: &Vector6<f64>) -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    for k in 0..6 {
        let h = FD_STEP * x[k].abs().max(1.0);
        let mut xh = *x;
        xh[k] += h;
        let col = (eval(cand, &xh) - fx) / h;
        j.set_column(k, &col);
    }
    j
}

/// Damped Newton from `guess` with forward-difference Jacobian. The step
/// length halves while the residual norm grows; the run stops once the
/// damping would drop below 1/1024.
pub fn solve57(params: &DsgeParams, guess: SystemCandidate) -> SolveReport {
    let base = SystemCandidate {
        params: *params,
        ..guess
    };
    let mut x = base.to_vec();
    let mut fx = eval(&base, &x);
    let mut norm = fx.norm();
    let mut history = vec![norm];
    let mut iterations = 0;

    if guess.is_finite() {
        while norm >= CONVERGED_NORM && iterations < MAX_ITERATIONS {
            iterations += 1;
            let j = jacobian(&base, &x, &fx);
            let step = match j.lu().solve(&(-fx)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => match j.svd(true, true).solve(&(-fx), 1e-14) {
                    Ok(s) => s,
                    Err(_) => break,
                },
            };
            let mut lambda = 1.0;
            let mut accepted = false;
            while lambda >= MIN_DAMPING {
                let trial = x + step * lambda;
                let ft = eval(&base, &trial);
                let nt = ft.norm();
                if nt.is_finite() && nt < norm {
                    x = trial;
                    fx = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
            history.push(norm);
        }
    }

    let candidate = base.with_vec(&x).gauged();
    SolveReport {
        candidate,
        residual_norm: norm,
        iterations,
        converged: norm < CONVERGED_NORM,
        obstruction: None,
        history,
    }
}

/// One point of a φ-continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub phi: f64,
    pub report: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Continuation {
    pub steps: Vec<ContinuationStep>,
    /// Last φ reached with a converged, admissible candidate.
    pub last_converged_phi: f64,
    /// Set when the step size fell below the minimum before reaching the
    /// target.
    pub obstruction: bool,
    pub reason: Option<String>,
}

pub const CONTINUATION_STEP: f64 = 0.05;
pub const MIN_CONTINUATION_STEP: f64 = 1e-4;

/// Coefficient magnitude beyond which a candidate is treated as having run
/// off to infinity.
const BLOWUP: f64 = 1e8;

fn admissible(rep: &SolveReport) -> bool {
    rep.converged && rep.candidate.r > 1e-8 && rep.candidate.coefficient_size() < BLOWUP
}

/// Warm-started continuation in φ from `start` to `phi_to`.
///
/// Steps start at `step`, halve on failure and double again (up to `step`)
/// after success. Failing below [`MIN_CONTINUATION_STEP`] ends the run with
/// the obstruction flag.
pub fn continue_in_phi(start: SystemCandidate, phi_to: f64, step: f64) -> Continuation {
    let mut current = start;
    let mut phi = start.params.phi;
    let dir = (phi_to - phi).signum();
    let mut h = step.abs();
    let mut steps = Vec::new();
    let mut reason = None;
    while (phi_to - phi) * dir > 1e-15 {
        let next = if (phi_to - phi).abs() <= h {
            phi_to
        } else {
            phi + dir * h
        };
        let rep = solve57(&current.params.at_phi(next), current);
        if admissible(&rep) {
            current = rep.candidate;
            phi = next;
            steps.push(ContinuationStep { phi, report: rep });
            h = (2.0 * h).min(step.abs());
        } else {
            h *= 0.5;
            if h < MIN_CONTINUATION_STEP {
                reason = Some(if rep.converged {
                    format!(
                        "branch degenerates past phi = {phi} (r = {:e}, max coefficient {:e})",
                        rep.candidate.r,
                        rep.candidate.coefficient_size()
                    )
                } else {
                    format!(
                        "Newton fails past phi = {phi} (residual {:e})",
                        rep.residual_norm
                    )
                });
                break;
            }
        }
    }
    Continuation {
        steps,
        last_converged_phi: phi,
        obstruction: reason.is_some(),
        reason,
    }
}

/// Result of one grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub phi: f64,
    pub candidate: Option<SystemCandidate>,
    pub residual_norm: f64,
    pub converged: bool,
    pub obstruction: bool,
    /// `‖Δ(a, b, c, d, r, S)‖` to the previous converged point.
    pub jump: Option<f64>,
    pub note: Option<String>,
}

fn cold_point(params: DsgeParams, branch: Branch) -> SweepPoint {
    let fail = |note: String| SweepPoint {
        phi: params.phi,
        candidate: None,
        residual_norm: f64::NAN,
        converged: false,
        obstruction: false,
        jump: None,
        note: Some(note),
    };
    match mobius::construct(&params, branch) {
        Ok(sol) if sol.carrier == Carrier::Sinh => {
            let rep = solve57(&params, SystemCandidate::from(&sol));
            SweepPoint {
                phi: params.phi,
                candidate: Some(rep.candidate),
                residual_norm: rep.residual_norm,
                converged: rep.converged,
                obstruction: false,
                jump: None,
                note: None,
            }
        }
        Ok(_) => fail("cosh-type solution is outside the sinh coefficient system".into()),
        Err(e @ DsgeError::NegativeRSquared { .. }) => SweepPoint {
            obstruction: true,
            ..fail(e.to_string())
        },
        Err(e) => fail(e.to_string()),
    }
}

/// `steps` evenly spaced φ-values from `phi_from` to `phi_to`.
///
/// Warm mode continues the branch through the grid (sub-stepping between
/// grid points as needed) and marks every point after an obstruction.
/// Cold mode solves each point independently from its own Möbius guess,
/// which lets the grid run through [`exec`].
pub fn sweep(
    eta: f64,
    phi_from: f64,
    phi_to: f64,
    steps: usize,
    branch: Branch,
    cold_start: Option<Strategy>,
) -> Result<Vec<SweepPoint>> {
    if steps < 2 {
        return Err(DsgeError::InvalidParams(format!("steps = {steps} < 2")));
    }
    let params = DsgeParams::new(eta, phi_from)?;
    let grid: Vec<f64> = (0..steps)
        .map(|k| phi_from + (phi_to - phi_from) * k as f64 / (steps - 1) as f64)
        .collect();

    let mut points = match cold_start {
        Some(strategy) => exec::map(strategy, &grid, |&phi| cold_point(params.at_phi(phi), branch)),
        None => warm_sweep(params, &grid, branch),
    };

    let mut prev: Option<SystemCandidate> = None;
    for p in points.iter_mut() {
        if let (Some(c), true) = (p.candidate, p.converged) {
            p.jump = prev.map(|q| (c.to_vec() - q.to_vec()).norm());
            prev = Some(c);
        }
    }
    Ok(points)
}

fn warm_sweep(params: DsgeParams, grid: &[f64], branch: Branch) -> Vec<SweepPoint> {
    let first = cold_point(params.at_phi(grid[0]), branch);
    let mut out = vec![first.clone()];
    let mut current = match (first.candidate, first.converged) {
        (Some(c), true) => c,
        _ => {
            out.extend(grid[1..].iter().map(|&phi| SweepPoint {
                phi,
                note: Some("no converged starting point".into()),
                ..first.clone()
            }));
            return out;
        }
    };
    let mut blocked: Option<String> = None;
    for &phi in &grid[1..] {
        if let Some(reason) = &blocked {
            out.push(SweepPoint {
                phi,
                candidate: None,
                residual_norm: f64::NAN,
                converged: false,
                obstruction: true,
                jump: None,
                note: Some(reason.clone()),
            });
            continue;
        }
        let cont = continue_in_phi(current, phi, CONTINUATION_STEP);
        if cont.obstruction {
            let reason = cont.reason.unwrap_or_default();
            out.push(SweepPoint {
                phi,
                candidate: None,
                residual_norm: f64::NAN,
                converged: false,
                obstruction: true,
                jump: None,
                note: Some(format!("last converged phi = {}: {reason}", cont.last_converged_phi)),
            });
            blocked = Some(reason);
            continue;
        }
        let last = cont.steps.last().map(|s| s.report.clone());
        match last {
            Some(rep) => {
                current = rep.candidate;
                out.push(SweepPoint {
                    phi,
                    candidate: Some(rep.candidate),
                    residual_norm: rep.residual_norm,
                    converged: rep.converged,
                    obstruction: false,
                    jump: None,
                    note: None,
                });
            }
            None => out.push(SweepPoint {
                phi,
                candidate: Some(current),
                residual_norm: residual_norm(&residuals57(&current)),
                converged: true,
                obstruction: false,
                jump: None,
                note: None,
            }),
        }
    }
    out
}
