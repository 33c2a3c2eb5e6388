//! Output records and number formatting.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use dsge_core::mobius::MobiusSolution;
use dsge_core::C64;

/// Residual above which a record is marked `"unverified"`.
pub const VERIFIED_RESIDUAL: f64 = 1e-6;

/// A float written with 17 significant digits; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return ser.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(ser)
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Pair {
    pub re: Num,
    pub im: Num,
}

impl From<C64> for Pair {
    fn from(z: C64) -> Self {
        Pair {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mobius,
    System57,
    Classical,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolutionRecord {
    pub eta: Num,
    pub phi: Num,
    pub branch: String,
    pub method: Method,
    #[serde(rename = "S")]
    pub s: Num,
    pub f3: Num,
    pub f0: Option<Pair>,
    pub f1: Option<Pair>,
    pub a: Num,
    pub b: Num,
    pub c: Num,
    pub d: Num,
    pub r: Num,
    pub energy: Num,
    pub max_residual: Num,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jump: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SolutionRecord {
    /// A record with every numeric field empty.
    pub fn blank(eta: f64, phi: f64, branch: impl Into<String>, method: Method) -> Self {
        let nan = Num(f64::NAN);
        SolutionRecord {
            eta: eta.into(),
            phi: phi.into(),
            branch: branch.into(),
            method,
            s: nan,
            f3: nan,
            f0: None,
            f1: None,
            a: nan,
            b: nan,
            c: nan,
            d: nan,
            r: nan,
            energy: nan,
            max_residual: nan,
            flags: Vec::new(),
            jump: None,
            note: None,
        }
    }

    /// Physical-chart coefficients of a Möbius-form solution.
    pub fn from_solution(sol: &MobiusSolution, method: Method, energy: f64, max_residual: f64) -> Self {
        let [a, b, c, d] = sol.zero_chart_coefficients();
        let mut rec = SolutionRecord {
            s: sol.s.into(),
            f3: sol.asymptote_tan_half().into(),
            f0: Some(sol.f0.into()),
            f1: Some(sol.f1.into()),
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            r: sol.r.into(),
            energy: energy.into(),
            ..Self::blank(sol.params.eta, sol.params.phi, sol.branch.to_string(), method)
        };
        rec.set_residual(max_residual);
        rec
    }

    pub fn set_residual(&mut self, max_residual: f64) {
        self.max_residual = max_residual.into();
        if max_residual.is_nan() || max_residual > VERIFIED_RESIDUAL {
            self.flag("unverified");
        }
    }

    pub fn flag(&mut self, flag: &str) {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.to_string());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}
