//! Solutions `θ = 2 arctan f(s)` with `f = (aζ + b)/(cζ + d)` a Möbius image
//! of `ζ = sinh(rs)` or `ζ = cosh(rs)`.
//!
//! Under `θ = 2 arctan f` the first integral becomes `(df/ds)² = P(f)` with
//! the quartic of [`FirstIntegralQuartic`]. A solution that settles into a
//! minimum needs `P` to have a double root `f₃ = tan(θ∞/2)`; the other two
//! roots `f₀, f₁` are the turning points. Sending `ζ = ±κ` to `f₀, f₁` and
//! `ζ = ∞` to `f₃` fixes the map up to scale.
//!
//! Near `θ = π` the variable `f` blows up, so the construction can run in the
//! shifted chart `θ = π + 2 arctan g`, which is the same problem at `φ + π`.

mod elimination;

pub use elimination::{euclidean_eliminate, EliminationCandidate, EliminationTrace};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::polyroots::solve_monic_quadratic;
use crate::potential::{action_from_branch, eval_potential, Branch, DsgeParams};
use crate::{DsgeError, Result, C64};

/// Relative size of the imaginary parts tolerated when realizing `(a,b,c,d)`.
/// Relative gap below which two turning points count as one.
pub const COINCIDENT_TOL: f64 = 1e-6;

const REALIZE_TOL: f64 = 1e-8;

/// Relative tolerance on the two Vieta relations not used to build `t, p`.
const VIETA_TOL: f64 = 1e-8;

/// `(df/ds)² = a4 f⁴ + a3 f³ + a2 f² + a1 f + a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegralQuartic {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub source_s: f64,
}

impl FirstIntegralQuartic {
    pub fn eval(&self, f: f64) -> f64 {
        (((self.a4 * f + self.a3) * f + self.a2) * f + self.a1) * f + self.a0
    }

    pub fn eval_complex(&self, f: C64) -> C64 {
        (((f * self.a4 + self.a3) * f + self.a2) * f + self.a1) * f + self.a0
    }

    pub fn derivative(&self, f: f64) -> f64 {
        ((4.0 * self.a4 * f + 3.0 * self.a3) * f + 2.0 * self.a2) * f + self.a1
    }

    pub fn second_derivative(&self, f: f64) -> f64 {
        (12.0 * self.a4 * f + 6.0 * self.a3) * f + 2.0 * self.a2
    }
}

/// Coefficients of `(df/ds)²` after substituting `θ = 2 arctan f` into
/// `½θ_s² = S − cos(θ + φ) − η cos 2θ`.
pub fn first_integral_quartic(params: &DsgeParams, s: f64) -> FirstIntegralQuartic {
    let (sn, cs) = params.phi.sin_cos();
    let eta = params.eta;
    FirstIntegralQuartic {
        a4: (s - eta + cs) / 2.0,
        a3: sn,
        a2: s + 3.0 * eta,
        a1: sn,
        a0: (s - eta - cs) / 2.0,
        source_s: s,
    }
}

/// The function `ζ(s)` the Möbius map is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    /// `ζ = sinh(rs)`, turning points a conjugate pair: kinks.
    Sinh,
    /// `ζ = cosh(rs)`, real turning points: bubbles.
    Cosh,
}

/// Which half-angle variable the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// `θ = 2 arctan f`
    Zero,
    /// `θ = π + 2 arctan g`
    Pi,
}

impl Chart {
    pub fn offset(self) -> f64 {
        match self {
            Chart::Zero => 0.0,
            Chart::Pi => PI,
        }
    }

    /// Parameters of the equivalent problem seen by the chart variable.
    pub fn local_params(self, params: &DsgeParams) -> DsgeParams {
        match self {
            Chart::Zero => *params,
            Chart::Pi => params.at_phi(params.phi + PI),
        }
    }
}

/// A constructed solution. `f0, f1, f3` and `(a, b, c, d)` are in the
/// variable of `chart`; `params` are always the physical ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusSolution {
    pub f0: C64,
    pub f1: C64,
    pub f3: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub carrier: Carrier,
    pub chart: Chart,
    pub params: DsgeParams,
    pub branch: Branch,
}

impl MobiusSolution {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Coefficients expressed in the `θ = 2 arctan f` chart.
    pub fn zero_chart_coefficients(&self) -> [f64; 4] {
        match self.chart {
            Chart::Zero => [self.a, self.b, self.c, self.d],
            // f = −1/g
            Chart::Pi => [-self.c, -self.d, self.a, self.b],
        }
    }

    /// `tan(θ∞/2)` in the physical chart; infinite for `θ∞ = π`.
    pub fn asymptote_tan_half(&self) -> f64 {
        let [a, _, c, _] = self.zero_chart_coefficients();
        a / c
    }

    /// The same orbit with the turning points exchanged: `s → −s` for kinks,
    /// the opposite bubble for `cosh`.
    pub fn mirrored(&self) -> Result<Self> {
        let local = self.chart.local_params(&self.params);
        let mut out = build_in_chart(self.f1, self.f0, self.f3, self.s, &local, self.carrier)?;
        out.chart = self.chart;
        out.params = self.params;
        out.branch = self.branch;
        Ok(out)
    }

    fn zeta(&self, s: f64) -> (f64, f64) {
        let x = self.r * s;
        match self.carrier {
            Carrier::Sinh => (x.sinh(), self.r * x.cosh()),
            Carrier::Cosh => (x.cosh(), self.r * x.sinh()),
        }
    }
}

fn to_chart(theta: f64) -> (Chart, f64) {
    let t = (theta / 2.0).tan();
    if t.abs() <= 1.0 {
        (Chart::Zero, t)
    } else {
        (Chart::Pi, ((theta - PI) / 2.0).tan())
    }
}

/// `(f₃, S)` for the branch: the branch minimum found from the real roots of
/// the extremum quartic, `f₃ = tan(θ/2)` and `S = −V` there.
pub fn solve_f3_s(params: &DsgeParams, branch: Branch) -> Result<(f64, f64)> {
    let (s, ext) = action_from_branch(params, branch)?;
    Ok((ext.tan_half, s))
}

/// Turning points from the double root: `t = f₀ + f₁` and `p = f₀f₁` follow
/// from the `f³` and `f²` Vieta relations, the other two are checked.
pub fn recover_f0_f1(f3: f64, s: f64, params: &DsgeParams) -> Result<(C64, C64)> {
    let q = first_integral_quartic(params, s);
    let scale = q.a4.abs().max(q.a3.abs()).max(q.a2.abs()).max(q.a0.abs()).max(1.0);
    if q.a4.abs() < 1e-12 * scale {
        return Err(DsgeError::DegreeCollapse(q.a4));
    }
    let th1 = -q.a3 / q.a4;
    let th2 = q.a2 / q.a4;
    let th3 = -q.a1 / q.a4;
    let th4 = q.a0 / q.a4;
    let t = th1 - 2.0 * f3;
    let p = th2 - f3 * f3 - 2.0 * f3 * t;
    let r3 = (2.0 * p * f3 + t * f3 * f3 - th3).abs() / th3.abs().max(1.0);
    let r4 = (p * f3 * f3 - th4).abs() / th4.abs().max(1.0);
    let residual = r3.max(r4);
    if residual.is_nan() || residual > VIETA_TOL {
        return Err(DsgeError::InconsistentVieta { residual });
    }
    let [z0, z1] = solve_monic_quadratic(t, p);
    let (f0, f1) = if z0.im != 0.0 {
        if z0.im > 0.0 {
            (z0, z1)
        } else {
            (z1, z0)
        }
    } else if z0.re <= z1.re {
        (z0, z1)
    } else {
        (z1, z0)
    };
    Ok((f0, f1))
}

/// Möbius coefficients sending `ζ = κ ↦ f₀`, `ζ = −κ ↦ f₁`, `ζ = ∞ ↦ f₃`,
/// with `κ = i` for a conjugate pair and `κ = 1` for real turning points.
pub fn build_mobius(
    f0: C64,
    f1: C64,
    f3: f64,
    s: f64,
    params: &DsgeParams,
    branch: Branch,
) -> Result<MobiusSolution> {
    let gap = (f0 - f1).norm();
    let scale = f0.norm().max(f1.norm()).max(1.0);
    // A double root of the reduced quadratic only resolves to about √ε.
    if gap < COINCIDENT_TOL * scale {
        return Err(DsgeError::Degenerate(
            "coincident turning points (tanh-type profile)".into(),
        ));
    }
    let carrier = if f0.im.abs().max(f1.im.abs()) > 1e-12 * scale {
        Carrier::Sinh
    } else {
        Carrier::Cosh
    };
    let mut sol = build_in_chart(f0, f1, f3, s, params, carrier)?;
    sol.branch = branch;
    Ok(sol)
}

fn build_in_chart(
    f0: C64,
    f1: C64,
    f3: f64,
    s: f64,
    params: &DsgeParams,
    carrier: Carrier,
) -> Result<MobiusSolution> {
    let kappa = match carrier {
        Carrier::Sinh => C64::i(),
        Carrier::Cosh => C64::new(1.0, 0.0),
    };
    let raw = [
        (f1 - f0) * f3,
        kappa * (f0 * f1 * 2.0 - (f0 + f1) * f3),
        f1 - f0,
        kappa * (f0 + f1 - 2.0 * f3),
    ];
    let w = raw
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap_or_default();
    if w.norm() == 0.0 {
        return Err(DsgeError::Degenerate("all Möbius coefficients vanish".into()));
    }
    let phase = w.conj() / w.norm();
    let rotated = raw.map(|z| z * phase);
    let imag = rotated.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / w.norm();
    if imag > REALIZE_TOL {
        return Err(DsgeError::NonRealizable { imag });
    }
    let [mut a, mut b, mut c, mut d] = rotated.map(|z| z.re);
    let det = a * d - b * c;
    if det.abs() < 1e-300 {
        return Err(DsgeError::Degenerate("singular Möbius map".into()));
    }
    let norm = det.abs().sqrt();
    a /= norm;
    b /= norm;
    c /= norm;
    d /= norm;
    if b < 0.0 {
        (a, b, c, d) = (-a, -b, -c, -d);
    }

    let r_squared = check_r_squared(f3, s, params)?;

    Ok(MobiusSolution {
        f0,
        f1,
        f3,
        s,
        a,
        b,
        c,
        d,
        r: r_squared.sqrt(),
        carrier,
        chart: Chart::Zero,
        params: *params,
        branch: Branch::AbsoluteMin,
    })
}

/// The whole pipeline: branch minimum, chart choice, turning points and
/// Möbius coefficients.
pub fn construct(params: &DsgeParams, branch: Branch) -> Result<MobiusSolution> {
    let (s, ext) = action_from_branch(params, branch)?;
    construct_from_asymptote(ext.theta, s, params, branch)
}

/// `r² = ½P''(f₃)`: the decay rate of `f − f₃` at the asymptote.
pub fn r_squared(f3: f64, s: f64, params: &DsgeParams) -> f64 {
    0.5 * first_integral_quartic(params, s).second_derivative(f3)
}

/// The pipeline from a given asymptote `θ∞` and action `S`.
pub fn construct_from_asymptote(
    theta_inf: f64,
    s: f64,
    params: &DsgeParams,
    branch: Branch,
) -> Result<MobiusSolution> {
    let (preferred, _) = to_chart(theta_inf);
    let other = match preferred {
        Chart::Zero => Chart::Pi,
        Chart::Pi => Chart::Zero,
    };
    let mut last = None;
    for chart in [preferred, other] {
        let local = chart.local_params(params);
        let g3 = ((theta_inf - chart.offset()) / 2.0).tan();
        check_r_squared(g3, s, &local)?;
        let attempt = recover_f0_f1(g3, s, &local)
            .and_then(|(f0, f1)| build_mobius(f0, f1, g3, s, &local, branch));
        match attempt {
            Ok(mut sol) => {
                sol.chart = chart;
                sol.params = *params;
                return Ok(sol);
            }
            // Only a vanishing leading coefficient is a chart artifact.
            Err(e @ DsgeError::DegreeCollapse(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(DsgeError::NoRealRoot))
}

fn check_r_squared(f3: f64, s: f64, params: &DsgeParams) -> Result<f64> {
    let r2 = r_squared(f3, s, params);
    let tol = params.tol.max(1e-12) * (s.abs() + 3.0 * params.eta.abs()).max(1.0);
    if r2 < -tol {
        Err(DsgeError::NegativeRSquared { r_squared: r2 })
    } else if r2 <= tol {
        Err(DsgeError::Degenerate(format!(
            "r^2 = {r2:e} vanishes at the asymptote"
        )))
    } else {
        Ok(r2)
    }
}

/// `θ(s)` as a continuous function of `s`.
///
/// `arg((cζ + d) + i(aζ + b)) = arg(c + ia) + arg(ζ + w)` where `w` has the
/// constant imaginary part `−Δ/(a² + c²)`, so the second term never crosses
/// the branch cut.
pub fn eval_theta(sol: &MobiusSolution, s: f64) -> f64 {
    let (zeta, _) = sol.zeta(s);
    let (a, b, c, d) = (sol.a, sol.b, sol.c, sol.d);
    let det = sol.det();
    let n2 = a * a + c * c;
    // Keeps θ(+∞) = offset + 2 arctan(a/c).
    let base = if c >= 0.0 { a.atan2(c) } else { (-a).atan2(-c) };
    let tail = if zeta.is_finite() {
        (-det).atan2(zeta * n2 + a * b + c * d)
    } else if zeta > 0.0 {
        0.0_f64.copysign(-det)
    } else {
        PI.copysign(-det)
    };
    sol.chart.offset() + 2.0 * (base + tail)
}

/// Analytic `dθ/ds = 2Δζ'/((aζ + b)² + (cζ + d)²)`.
pub fn eval_dtheta(sol: &MobiusSolution, s: f64) -> f64 {
    let (zeta, dzeta) = sol.zeta(s);
    let (a, b, c, d) = (sol.a, sol.b, sol.c, sol.d);
    let det = sol.det();
    if !zeta.is_finite() || !dzeta.is_finite() {
        return 0.0;
    }
    if zeta.abs() > 1.0 {
        let u = 1.0 / zeta;
        let n = a + b * u;
        let m = c + d * u;
        2.0 * det * (dzeta * u) * u / (n * n + m * m)
    } else {
        let n = a * zeta + b;
        let m = c * zeta + d;
        2.0 * det * dzeta / (n * n + m * m)
    }
}

/// `|½θ_s² + cos(θ + φ) + η cos 2θ − S|`.
pub fn first_integral_residual(theta: f64, dtheta: f64, params: &DsgeParams, s: f64) -> f64 {
    (0.5 * dtheta * dtheta - eval_potential(theta, params) - s).abs()
}

/// Largest first-integral residual over the grid.
pub fn residual(sol: &MobiusSolution, s_grid: &[f64]) -> f64 {
    s_grid
        .iter()
        .map(|&s| first_integral_residual(eval_theta(sol, s), eval_dtheta(sol, s), &sol.params, sol.s))
        .fold(0.0, f64::max)
}

/// `n` evenly spaced points on `[−half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|k| -half_width + 2.0 * half_width * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
