//! The three solution pipelines behind `dsge solve` and `dsge sweep`.

use std::f64::consts::FRAC_PI_2;

use dsge_core::classical::{self, ClassicalSolution, Phase, Sign, SolutionKind};
use dsge_core::energy;
use dsge_core::exec::{self, Strategy};
use dsge_core::mobius::{self, Carrier, MobiusSolution};
use dsge_core::system57::{self, ObstructionVerdict, SystemCandidate};
use dsge_core::{Branch, DsgeError, DsgeParams};

use crate::record::{Method, SolutionRecord};

/// Profiles cover `[−10, 10]/r`.
pub const GRID_HALF_WIDTH: f64 = 10.0;
pub const GRID_POINTS: usize = 2001;
/// Energies integrate over `[−40, 40]/r`, where the tails are below 1e-30.
const ENERGY_HALF_WIDTH: f64 = 40.0;
/// `φ` this close to `0` or `π/2` is treated as exactly there.
pub const PHASE_SNAP: f64 = 1e-6;
/// Adjacent sweep records further apart than this are flagged `"abrupt"`.
pub const ABRUPT_JUMP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Exit code 3.
    Obstruction(String),
    /// Exit code 2.
    NoSolution { reason: &'static str, message: String },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Obstruction(_) => 3,
            Failure::NoSolution { .. } => 2,
        }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Failure::Obstruction(_) => "obstruction",
            Failure::NoSolution { reason, .. } => reason,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Obstruction(m) | Failure::NoSolution { message: m, .. } => m,
        }
    }
}

impl From<DsgeError> for Failure {
    fn from(e: DsgeError) -> Self {
        let reason = match &e {
            DsgeError::NegativeRSquared { .. } => return Failure::Obstruction(e.to_string()),
            DsgeError::InvalidParams(_) => "invalid-params",
            DsgeError::NoSuchBranch(_) => "no-such-branch",
            DsgeError::NoRealRoot => "no-real-root",
            DsgeError::InadmissibleKind { .. } => "inadmissible-kind",
            DsgeError::NegativeRadicand { .. } => "negative-radicand",
            DsgeError::InconsistentVieta { .. } => "inconsistent-vieta",
            DsgeError::NonRealizable { .. } => "non-realizable",
            DsgeError::DegenerateElimination(_) => "degenerate-elimination",
            DsgeError::DegreeCollapse(_) => "degree-collapse",
            DsgeError::Degenerate(_) => "degenerate",
        };
        Failure::NoSolution {
            reason,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub s: f64,
    pub theta: f64,
    pub dtheta_ds: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub record: SolutionRecord,
    pub profile: Vec<ProfileRow>,
}

fn profile<F, G>(theta: F, dtheta: G, params: &DsgeParams, s_action: f64, scale: f64) -> Vec<ProfileRow>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    mobius::symmetric_grid(GRID_HALF_WIDTH / scale, GRID_POINTS)
        .into_iter()
        .map(|s| {
            let (t, d) = (theta(s), dtheta(s));
            ProfileRow {
                s,
                theta: t,
                dtheta_ds: d,
                residual: mobius::first_integral_residual(t, d, params, s_action),
            }
        })
        .collect()
}

fn max_residual(rows: &[ProfileRow]) -> f64 {
    rows.iter().map(|r| r.residual).fold(0.0, |m, x| if x.is_nan() { x } else { m.max(x) })
}

fn from_mobius(sol: &MobiusSolution, method: Method) -> Solved {
    let rows = profile(
        |s| mobius::eval_theta(sol, s),
        |s| mobius::eval_dtheta(sol, s),
        &sol.params,
        sol.s,
        sol.r,
    );
    let energy = energy::energy_from_derivative(|s| mobius::eval_dtheta(sol, s), ENERGY_HALF_WIDTH / sol.r).value;
    let record = SolutionRecord::from_solution(sol, method, energy, max_residual(&rows));
    Solved { record, profile: rows }
}

pub fn mobius(params: &DsgeParams, branch: Branch) -> Result<Solved, Failure> {
    let sol = mobius::construct(params, branch)?;
    Ok(from_mobius(&sol, Method::Mobius))
}

/// Newton on the coefficient system, warm-started from the Möbius
/// construction. At `φ = π/2` the self-symmetric ansatz decides first.
pub fn system57(params: &DsgeParams, branch: Branch) -> Result<Solved, Failure> {
    let mut params = *params;
    let mut fallback = None;
    if (params.phi - FRAC_PI_2).abs() <= PHASE_SNAP {
        params = params.at_phi(FRAC_PI_2);
        match system57::obstruction_check(params.eta) {
            ObstructionVerdict::Contradiction { r_squared } => {
                return Err(Failure::Obstruction(format!(
                    "no real sinh-type solution at phi = pi/2, eta = {}: the symmetric ansatz needs r^2 = 1 - 4 eta = {r_squared} >= 0",
                    params.eta
                )));
            }
            ObstructionVerdict::Consistent { candidate: None, .. } => {
                return Err(DsgeError::Degenerate("r = 0 at eta = 1/4".into()).into());
            }
            ObstructionVerdict::Consistent { candidate, .. } => fallback = candidate,
        }
    }

    let guess = match (mobius::construct(&params, branch), fallback) {
        (Ok(sol), _) if sol.carrier == Carrier::Sinh => SystemCandidate::from(&sol),
        (Ok(_), None) => {
            return Err(Failure::NoSolution {
                reason: "cosh-carrier",
                message: "this branch is bubble-like and lies outside the sinh coefficient system; use --method mobius".into(),
            })
        }
        (_, Some(c)) => c,
        (Err(e), None) => return Err(e.into()),
    };

    let report = system57::solve57(&params, guess);
    if !report.converged {
        return Err(Failure::NoSolution {
            reason: "not-converged",
            message: format!(
                "Newton stopped at residual {:e} after {} iterations",
                report.residual_norm, report.iterations
            ),
        });
    }
    let mut solved = from_mobius(&report.candidate.to_solution(branch), Method::System57);
    solved.record.note = Some(format!("{} Newton iterations", report.iterations));
    Ok(solved)
}

/// The kink for the absolute minimum, the bubble for the relative one.
pub fn default_kind(eta: f64, phase: Phase, branch: Branch) -> SolutionKind {
    let e = match phase {
        Phase::Zero => eta,
        Phase::HalfPi => -eta,
    };
    match branch {
        Branch::RelativeMin => SolutionKind::BubbleCase3,
        Branch::AbsoluteMin if e < -0.25 => SolutionKind::LargeKinkCase1,
        Branch::AbsoluteMin => SolutionKind::KinkCase23,
    }
}

pub fn classical(
    params: &DsgeParams,
    branch: Branch,
    kind: Option<SolutionKind>,
    sign: Sign,
) -> Result<Solved, Failure> {
    let phase = if params.phi.abs() <= PHASE_SNAP {
        Phase::Zero
    } else if (params.phi - FRAC_PI_2).abs() <= PHASE_SNAP {
        Phase::HalfPi
    } else {
        return Err(Failure::NoSolution {
            reason: "no-closed-form",
            message: format!("closed forms exist only at phi = 0 and pi/2, not {}", params.phi),
        });
    };
    let kind = kind.unwrap_or_else(|| default_kind(params.eta, phase, branch));
    let sol = ClassicalSolution::new(kind, params.eta, phase, sign)?;
    let s_action = sol.action()?;
    let p = sol.params();
    let rows = profile(
        |s| classical::eval_classical(&sol, s),
        |s| classical::eval_classical_derivative(&sol, s),
        &p,
        s_action,
        sol.width,
    );
    let energy = energy::energy_from_derivative(
        |s| classical::eval_classical_derivative(&sol, s),
        ENERGY_HALF_WIDTH / sol.width,
    )
    .value;
    let mut record = SolutionRecord {
        s: s_action.into(),
        f3: tan_half(sol.limits().1).into(),
        r: sol.width.into(),
        energy: energy.into(),
        note: Some(kind.to_string()),
        ..SolutionRecord::blank(p.eta, p.phi, kind.branch().to_string(), Method::Classical)
    };
    record.set_residual(max_residual(&rows));
    Ok(Solved { record, profile: rows })
}

/// `tan(θ/2)`, infinite (written as `null`) at odd multiples of `π`.
fn tan_half(theta: f64) -> f64 {
    let (sin, cos) = (theta / 2.0).sin_cos();
    if cos.abs() < 1e-12 {
        f64::INFINITY
    } else {
        sin / cos
    }
}

/// Records of a φ-sweep of the coefficient system and whether an
/// obstruction was met.
pub fn sweep(
    eta: f64,
    phi_from: f64,
    phi_to: f64,
    steps: usize,
    branch: Branch,
    cold_start: Option<Strategy>,
) -> Result<(Vec<SolutionRecord>, bool), Failure> {
    let points = system57::sweep(eta, phi_from, phi_to, steps, branch, cold_start)?;
    let obstruction = points.iter().any(|p| p.obstruction);
    let records = exec::map(cold_start.unwrap_or_default(), &points, |p| {
        let mut rec = match (p.candidate, p.converged) {
            (Some(c), true) => from_mobius(&c.to_solution(branch), Method::System57).record,
            _ => {
                let mut rec = SolutionRecord::blank(eta, p.phi, branch.to_string(), Method::System57);
                rec.set_residual(f64::NAN);
                rec.flag(if p.obstruction { "obstruction" } else { "not-converged" });
                rec
            }
        };
        if let Some(j) = p.jump {
            rec.jump = Some(j.into());
            if j > ABRUPT_JUMP {
                rec.flag("abrupt");
            }
        }
        rec.note = p.note.clone();
        rec
    });
    Ok((records, obstruction))
}
