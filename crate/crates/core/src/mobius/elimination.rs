//! Polynomial elimination of `f` from the double-root conditions
//! `P(f) = P'(f) = 0`, leaving a single polynomial in `S`.
//!
//! The steps mirror a Euclidean algorithm on `P'` and the cubic
//! `4P − fP' = σf³ + 2a₂f² + 3σf + 4a₀` (σ = sin φ): two quadratic
//! remainders, then a linear one `Af + B`, and finally the resultant
//! `AD − BC` with `C = b₁A − a₁B`, `D = c₁A`. Every coefficient is a
//! polynomial in `S`, carried exactly through the recursion.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{first_integral_quartic, Chart};
use crate::potential::DsgeParams;
use crate::{DsgeError, Result};

/// Intermediate coefficients at one value of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub big_c: f64,
    pub big_d: f64,
    /// `|AD − BC|`
    pub consistency: f64,
}

impl EliminationTrace {
    /// `max(|AD|, |BC|, 1)`, the natural size of [`Self::consistency`].
    pub fn scale(&self) -> f64 {
        (self.big_a * self.big_d)
            .abs()
            .max((self.big_b * self.big_c).abs())
            .max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationCandidate {
    pub f3: f64,
    pub s: f64,
    pub trace: EliminationTrace,
    /// `A` and `C` both vanished; `f₃` came from a direct root search.
    pub degenerate: bool,
    /// Chart in which the elimination found this candidate; `trace`
    /// refers to that chart's coefficients.
    pub chart: Chart,
}

/// Dense polynomial, ascending powers.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn c(x: f64) -> Self {
        Poly(vec![x])
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|x| x * k).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in o.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Poly(out)
    }

    /// Real parts of the approximately real roots, from the companion
    /// matrix eigenvalues.
    fn real_roots(&self) -> Vec<f64> {
        let peak = self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.0.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= 1e-13 * peak {
            coeffs.pop();
        }
        let n = coeffs.len() - 1;
        if n == 0 {
            return Vec::new();
        }
        let lead = coeffs[n];
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -coeffs[i] / lead;
        }
        m.complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
            .map(|z| z.re)
            .collect()
    }
}

/// `AD − BC` as a polynomial in `S`.
fn resultant(params: &DsgeParams) -> Poly {
    let (sigma, cs) = params.phi.sin_cos();
    let eta = params.eta;
    let s2 = sigma * sigma;
    let a4 = Poly(vec![(-eta + cs) / 2.0, 0.5]);
    let a0 = Poly(vec![(-eta - cs) / 2.0, 0.5]);
    let a2 = Poly(vec![3.0 * eta, 1.0]);
    let a1 = a4.mul(&a2).scale(8.0).sub(&Poly::c(3.0 * s2));
    let b1 = a4.scale(6.0).sub(&a2).scale(2.0 * sigma);
    let c1 = a4.mul(&a0).scale(16.0).sub(&Poly::c(s2));
    let a2_ = b1.scale(sigma).sub(&a2.mul(&a1).scale(2.0));
    let b2_ = c1.sub(&a1.scale(3.0)).scale(sigma);
    let c2_ = a0.mul(&a1).scale(-4.0);
    let big_a = b1.mul(&a2_).sub(&b2_.mul(&a1));
    let big_b = c1.mul(&a2_).sub(&c2_.mul(&a1));
    let big_c = b1.mul(&big_a).sub(&a1.mul(&big_b));
    let big_d = c1.mul(&big_a);
    big_a.mul(&big_d).sub(&big_b.mul(&big_c))
}

fn trace_at(params: &DsgeParams, s: f64) -> EliminationTrace {
    let q = first_integral_quartic(params, s);
    let sigma = q.a3;
    let s2 = sigma * sigma;
    let (a4, a2, a0) = (q.a4, q.a2, q.a0);
    let a1 = 8.0 * a4 * a2 - 3.0 * s2;
    let b1 = 2.0 * sigma * (6.0 * a4 - a2);
    let c1 = 16.0 * a4 * a0 - s2;
    let a2_ = sigma * b1 - 2.0 * a2 * a1;
    let b2_ = sigma * (c1 - 3.0 * a1);
    let c2_ = -4.0 * a0 * a1;
    let big_a = b1 * a2_ - b2_ * a1;
    let big_b = c1 * a2_ - c2_ * a1;
    let big_c = b1 * big_a - a1 * big_b;
    let big_d = c1 * big_a;
    EliminationTrace {
        a1,
        b1,
        c1,
        a2: a2_,
        b2: b2_,
        c2: c2_,
        big_a,
        big_b,
        big_c,
        big_d,
        consistency: (big_a * big_d - big_b * big_c).abs(),
    }
}

/// Newton on `(P, P') = 0` in the unknowns `(f, S)`.
fn polish(params: &DsgeParams, mut f: f64, mut s: f64) -> Option<(f64, f64)> {
    for _ in 0..50 {
        let q = first_integral_quartic(params, s);
        let (p, dp, ddp) = (q.eval(f), q.derivative(f), q.second_derivative(f));
        let w = 1.0 + f * f;
        let (ps, dps) = (0.5 * w * w, 2.0 * f * w);
        let det = dp * dps - ps * ddp;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let df = (p * dps - ps * dp) / det;
        let ds = (dp * dp - ddp * p) / det;
        f -= df;
        s -= ds;
        if df.abs() <= 1e-16 * f.abs().max(1.0) && ds.abs() <= 1e-16 * s.abs().max(1.0) {
            break;
        }
    }
    let q = first_integral_quartic(params, s);
    let m = f.abs().max(1.0);
    let size = (q.a4.abs() * m.powi(4) + q.a3.abs() * m.powi(3) + q.a2.abs() * m * m + q.a0.abs() + q.a1.abs() * m)
        .max(1.0);
    let ok = f.is_finite()
        && s.is_finite()
        && q.eval(f).abs() <= 1e-10 * size
        && q.derivative(f).abs() <= 1e-10 * size;
    ok.then_some((f, s))
}

/// All real `(f₃, S)` pairs with `f₃` a double root of the first-integral
/// quartic, found from the real roots of the resultant in `S`.
///
/// Each root is refined by a two-variable Newton step on `(P, P')`. When
/// `A` vanishes the linear remainder is read from `Cf + D` instead; when
/// both vanish the candidate is flagged. Double roots with `|f| > 1` are
/// badly scaled in `f`, so the elimination also runs in the shifted chart
/// `g = −1/f` (the same problem at `φ + π`); each stationary point is
/// reported once, from the chart where its coordinate is smaller.
/// `f3` is always given in the unshifted variable.
pub fn euclidean_eliminate(params: &DsgeParams) -> Result<Vec<EliminationCandidate>> {
    if params.phi.sin().abs() < 1e-12 {
        return Err(DsgeError::DegenerateElimination(
            "sin φ = 0 removes the odd terms the elimination relies on".into(),
        ));
    }
    let mut out: Vec<EliminationCandidate> = Vec::new();
    for chart in [Chart::Zero, Chart::Pi] {
        let local = chart.local_params(params);
        for mut cand in eliminate_in_chart(&local)? {
            if cand.f3.abs() > 1.0 {
                continue;
            }
            if chart == Chart::Pi {
                cand.f3 = -1.0 / cand.f3;
            }
            cand.chart = chart;
            out.push(cand);
        }
    }
    out.sort_by(|x, y| x.s.total_cmp(&y.s));
    Ok(out)
}

fn eliminate_in_chart(params: &DsgeParams) -> Result<Vec<EliminationCandidate>> {
    let r = resultant(params);
    let peak = r.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return Err(DsgeError::DegenerateElimination(
            "resultant vanishes identically".into(),
        ));
    }
    let mut out: Vec<EliminationCandidate> = Vec::new();
    for s0 in r.real_roots() {
        let t = trace_at(params, s0);
        let lin_scale = t.big_a.abs().max(t.big_b.abs()).max(1e-300);
        let (f0, degenerate) = if t.big_a.abs() > 1e-9 * lin_scale {
            (-t.big_b / t.big_a, false)
        } else if t.big_c.abs() > 1e-9 * t.big_c.abs().max(t.big_d.abs()).max(1e-300) {
            (-t.big_d / t.big_c, false)
        } else {
            let q = first_integral_quartic(params, s0);
            let roots = crate::polyroots::solve_cubic(4.0 * q.a4, 3.0 * q.a3, 2.0 * q.a2, q.a1)
                .map_err(|e| DsgeError::DegenerateElimination(e.to_string()))?;
            let best = roots
                .iter()
                .filter(|z| z.im.abs() < 1e-8 * z.re.abs().max(1.0))
                .map(|z| z.re)
                .min_by(|x, y| q.eval(*x).abs().total_cmp(&q.eval(*y).abs()));
            match best {
                Some(f) => (f, true),
                None => continue,
            }
        };
        let Some((f3, s)) = polish(params, f0, s0) else {
            continue;
        };
        let duplicate = out.iter().any(|c| {
            (c.s - s).abs() <= 1e-9 * s.abs().max(1.0) && (c.f3 - f3).abs() <= 1e-7 * f3.abs().max(1.0)
        });
        if !duplicate {
            out.push(EliminationCandidate {
                f3,
                s,
                trace: trace_at(params, s),
                degenerate,
                chart: Chart::Zero,
            });
        }
    }
    out.sort_by(|x, y| x.s.total_cmp(&y.s));
    Ok(out)
}
