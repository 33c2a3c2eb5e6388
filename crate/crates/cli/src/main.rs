mod record;
mod solve;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dsge_core::classical::{self, Sign, SolutionKind};
use dsge_core::energy;
use dsge_core::errata::ERRATA;
use dsge_core::exec::Strategy;
use dsge_core::mobius;
use dsge_core::potential::{self, select_branch};
use dsge_core::verify::{self, VerifyOptions};
use dsge_core::{Branch, DsgeParams};

use record::Method;
use solve::{Failure, ProfileRow};

#[derive(Parser, Debug)]
#[command(name = "dsge", version, about = "Traveling waves of the double sine-Gordon equation")]
struct Cli {
    /// Print angles in degrees. Inputs are always radians.
    #[arg(long, global = true)]
    degrees: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for one (eta, phi) and print a JSON record.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, default_value = "abs-min")]
        branch: Branch,
        #[arg(long, value_enum, default_value_t = Method::Mobius)]
        method: Method,
        /// Closed-form family for --method classical.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
        /// Write the profile (s, theta, dtheta_ds, residual) as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Regime and stationary points of the potential.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Continue the coefficient system in phi; one JSON record per line.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi_from: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        phi_to: f64,
        #[arg(long, default_value_t = 32)]
        steps: usize,
        #[arg(long, default_value = "abs-min")]
        branch: Branch,
        /// Solve every point from its own Möbius guess instead of continuing.
        #[arg(long)]
        cold_start: bool,
        /// Keep cold-start points on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        sequential: bool,
        /// Evaluate the coefficient system with the printed cos(phi) signs.
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// Soliton energy: closed form against quadrature with --kind, otherwise
    /// profile against theta-space quadrature for the constructed solution.
    Energy {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, default_value = "abs-min")]
        branch: Branch,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Printed formulas that differ from the implemented ones.
    Ledger {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    LargeKink,
    SmallKink,
    Kink,
    Bubble,
}

impl From<KindArg> for SolutionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::LargeKink => SolutionKind::LargeKinkCase1,
            KindArg::SmallKink => SolutionKind::SmallKinkCase1,
            KindArg::Kink => SolutionKind::KinkCase23,
            KindArg::Bubble => SolutionKind::BubbleCase3,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

fn angle(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_degrees()
    } else {
        x
    }
}

fn report(failure: &Failure) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": failure.reason(), "message": failure.message() })
    );
    ExitCode::from(failure.exit_code())
}

fn write_profile(path: &Path, rows: &[ProfileRow], degrees: bool) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "s,theta,dtheta_ds,residual")?;
    for r in rows {
        writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e}",
            r.s,
            angle(r.theta, degrees),
            angle(r.dtheta_ds, degrees),
            r.residual
        )?;
    }
    out.flush()?;
    Ok(())
}

fn params(eta: f64, phi: f64) -> Result<DsgeParams, Failure> {
    DsgeParams::new(eta, phi).map_err(Failure::from)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let degrees = cli.degrees;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve {
            eta,
            phi,
            branch,
            method,
            kind,
            sign,
            profile,
        } => {
            let solved = params(eta, phi).and_then(|p| match method {
                Method::Mobius => solve::mobius(&p, branch),
                Method::System57 => solve::system57(&p, branch),
                Method::Classical => solve::classical(&p, branch, kind.map(Into::into), sign.into()),
            });
            let mut solved = match solved {
                Ok(s) => s,
                Err(f) => return Ok(report(&f)),
            };
            if let Some(path) = profile {
                write_profile(&path, &solved.profile, degrees)?;
            }
            if degrees {
                solved.record.phi.0 = solved.record.phi.0.to_degrees();
            }
            writeln!(out, "{}", solved.record.to_json())?;
        }
        Command::Classify { eta, phi } => {
            let p = match params(eta, phi) {
                Ok(p) => p,
                Err(f) => return Ok(report(&f)),
            };
            let set = potential::find_extrema(&p);
            let branch = |b: Branch| {
                select_branch(&set, b)
                    .map(|e| json!({ "theta": angle(e.theta, degrees), "S": -e.value }))
                    .unwrap_or(serde_json::Value::Null)
            };
            let extrema: Vec<_> = set
                .items
                .iter()
                .map(|e| {
                    json!({
                        "theta": angle(e.theta, degrees),
                        "value": e.value,
                        "kind": e.kind,
                        "curvature": e.curvature,
                    })
                })
                .collect();
            let doc = json!({
                "eta": eta,
                "phi": angle(phi, degrees),
                "regime": classical::classify_regime(eta),
                "degenerate": set.degenerate,
                "extrema": extrema,
                "abs-min": branch(Branch::AbsoluteMin),
                "rel-min": branch(Branch::RelativeMin),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Sweep {
            eta,
            phi_from,
            phi_to,
            steps,
            branch,
            cold_start,
            sequential,
        } => {
            let strategy = if sequential { Strategy::Sequential } else { Strategy::Parallel };
            let cold = cold_start.then_some(strategy);
            let (records, obstruction) = match solve::sweep(eta, phi_from, phi_to, steps, branch, cold) {
                Ok(r) => r,
                Err(f) => return Ok(report(&f)),
            };
            for mut rec in records {
                if degrees {
                    rec.phi.0 = rec.phi.0.to_degrees();
                }
                writeln!(out, "{}", rec.to_json())?;
            }
            if obstruction {
                return Ok(report(&Failure::Obstruction(format!(
                    "sweep at eta = {eta} met an obstruction before phi = {phi_to}"
                ))));
            }
        }
        Command::Verify {
            json,
            sequential,
            inject_sign_flip,
        } => {
            let start = Instant::now();
            let opts = VerifyOptions {
                inject_sign_flip,
                strategy: if sequential { Strategy::Sequential } else { Strategy::Parallel },
            };
            let checks = verify::run_all(&opts);
            let passed = checks.iter().filter(|c| c.passed).count();
            let ok = passed == checks.len();
            if json {
                let doc = json!({ "passed": ok, "checks": checks, "ledger": ERRATA });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                for c in &checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{tag} {}: {}", c.name, c.detail)?;
                }
                writeln!(out, "typo ledger: {} entries", ERRATA.len())?;
                for e in ERRATA {
                    writeln!(out, "  - {}", e.item)?;
                }
                writeln!(
                    out,
                    "{passed}/{} checks passed in {:.2}s",
                    checks.len(),
                    start.elapsed().as_secs_f64()
                )?;
            }
            if !ok {
                let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                eprintln!("verification failed: {}", failed.join(", "));
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Energy { eta, phi, branch, kind } => {
            let doc = match kind {
                Some(k) => match energy::compare_energy(k.into(), eta) {
                    Ok(r) => serde_json::to_value(r)?,
                    Err(e) => return Ok(report(&e.into())),
                },
                None => match params(eta, phi).and_then(|p| mobius::construct(&p, branch).map_err(Into::into)) {
                    Ok(sol) => {
                        let l = 40.0 / sol.r;
                        let profile = energy::energy_from_derivative(|s| mobius::eval_dtheta(&sol, s), l);
                        let (lo, mid, hi) = (
                            mobius::eval_theta(&sol, -l),
                            mobius::eval_theta(&sol, 0.0),
                            mobius::eval_theta(&sol, l),
                        );
                        let leg = |x: f64, y: f64| {
                            energy::quadrature_vs(&sol.params, sol.s, x.min(y), x.max(y)).map(|v| 2.0 * v)
                        };
                        let theta_space = match (leg(lo, mid), leg(mid, hi)) {
                            (Ok(a), Ok(b)) => Some(a + b),
                            _ => None,
                        };
                        json!({
                            "branch": branch,
                            "S": sol.s,
                            "profile": profile.value,
                            "tail_estimate": profile.tail_estimate,
                            "theta_space": theta_space,
                            "difference": theta_space.map(|t| profile.value - t),
                        })
                    }
                    Err(f) => return Ok(report(&f)),
                },
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Ledger { json } => {
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(ERRATA)?)?;
            } else {
                for e in ERRATA {
                    writeln!(out, "{}", e.item)?;
                    writeln!(out, "  printed:     {}", e.printed)?;
                    writeln!(out, "  implemented: {}", e.implemented)?;
                    writeln!(out, "  evidence:    {}", e.evidence)?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
