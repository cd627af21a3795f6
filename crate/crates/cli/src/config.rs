use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wkw_core::classical::{Factor, TestSymbol};
use wkw_core::Potential64;

use crate::fail::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Pendulum {
        #[serde(default = "one")]
        kappa: f64,
    },
    TwoHarmonic {
        #[serde(default = "one")]
        kappa: f64,
        beta: Option<f64>,
    },
    Zero,
}

fn one() -> f64 {
    1.0
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::Pendulum { kappa: 1.0 }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Potential64 {
        match *self {
            Self::Pendulum { kappa } => Potential64::pendulum(kappa),
            Self::TwoHarmonic { kappa, beta: None } => Potential64::two_harmonic(kappa),
            Self::TwoHarmonic { kappa, beta: Some(beta) } => Potential64::TwoHarmonic { kappa, beta },
            Self::Zero => Potential64::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FactorSpec {
    Constant(f64),
    Bump { center: f64, half_width: f64 },
    Plateau { lo: f64, hi: f64, ramp: f64 },
}

impl From<FactorSpec> for Factor<f64> {
    fn from(f: FactorSpec) -> Self {
        match f {
            FactorSpec::Constant(c) => Factor::Constant(c),
            FactorSpec::Bump { center, half_width } => Factor::Bump { center, half_width },
            FactorSpec::Plateau { lo, hi, ramp } => Factor::Plateau { lo, hi, ramp },
        }
    }
}

/// Separable symbol `f(x, p) = fx(x) · fp(p)`; `p` is the phase-space
/// momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub x: FactorSpec,
    pub p: FactorSpec,
}

impl SymbolSpec {
    pub fn build(&self) -> TestSymbol<f64> {
        TestSymbol::new(self.x.into(), self.p.into())
    }

    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("symbol{index}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub cell: f64,
    pub tail: f64,
    pub direct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cell: 1e-11, tail: 1e-6, direct: 1e-7 }
    }
}

/// Everything a run needs. Unset fields fall back to the defaults listed
/// in `--help`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    pub h: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub order: Option<usize>,
    /// Lattice window half-width in units of `p_max - p_min`.
    pub window_factor: Option<f64>,
    pub symbols: Vec<SymbolSpec>,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

pub const DEFAULT_P: f64 = 1.6;
pub const DEFAULT_H: f64 = 0.05;
pub const DEFAULT_ORDER: usize = 2;
pub const DEFAULT_H_LIST: [f64; 4] = [0.16, 0.08, 0.04, 0.02];
pub const DEFAULT_WINDOW: f64 = 3.0;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("config {}: {e}", path.display())))
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(DEFAULT_P)
    }

    pub fn h(&self) -> f64 {
        self.h.unwrap_or(DEFAULT_H)
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(DEFAULT_ORDER)
    }

    pub fn h_list(&self) -> Vec<f64> {
        self.h_list.clone().unwrap_or_else(|| DEFAULT_H_LIST.to_vec())
    }

    pub fn window_factor(&self) -> f64 {
        self.window_factor.unwrap_or(DEFAULT_WINDOW)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::validation(m));
        if let Some(p) = self.p {
            if !p.is_finite() {
                return bad(format!("P must be finite, got {p}"));
            }
        }
        for h in self.h.iter().chain(self.h_list.iter().flatten()) {
            if !(*h > 0.0 && *h <= wkw_core::cell::H_MAX) {
                return bad(format!("h = {h} outside (0, {}]", wkw_core::cell::H_MAX));
            }
        }
        if let Some(m) = self.grid {
            if m < 16 || !m.is_power_of_two() {
                return bad(format!("grid {m} must be a power of two and at least 16"));
            }
        }
        if self.order.is_some_and(|n| n > 6) {
            return bad("expansion order is capped at 6".into());
        }
        if self.window_factor.is_some_and(|w| w.is_nan() || w <= 0.0) {
            return bad("window_factor must be positive".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the effective configuration,
    /// leaving out the output directory.
    pub fn hash(&self) -> String {
        let canonical = Self { out: None, ..self.clone() };
        let text = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_descriptions() {
        let p: PotentialSpec = serde_json::from_str(r#"{ "name": "pendulum", "kappa": 1.0 }"#).unwrap();
        assert_eq!(p, PotentialSpec::Pendulum { kappa: 1.0 });
        let z: PotentialSpec = serde_json::from_str(r#"{ "name": "zero" }"#).unwrap();
        assert_eq!(z.build(), Potential64::Zero);
        assert!(serde_json::from_str::<PotentialSpec>(r#"{ "name": "pendulum", "kapa": 1.0 }"#).is_err());
        assert!(serde_json::from_str::<PotentialSpec>(r#"{ "name": "quartic" }"#).is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!((c.p(), c.h(), c.order()), (DEFAULT_P, DEFAULT_H, DEFAULT_ORDER));
        assert!(c.validate().is_ok());
        let bad = RunConfig { h_list: Some(vec![0.1, -0.1]), ..RunConfig::default() };
        assert_eq!(bad.validate().unwrap_err().code, crate::fail::EXIT_VALIDATION);
        assert!(serde_json::from_str::<RunConfig>(r#"{ "tolerances": { "cel": 1 } }"#).is_err());
    }

    #[test]
    fn symbols_parse() {
        let s: SymbolSpec =
            serde_json::from_str(r#"{ "x": { "plateau": { "lo": -0.1, "hi": 0.1, "ramp": 0.05 } }, "p": { "constant": 1.0 } }"#)
                .unwrap();
        assert_eq!(s.label(3), "symbol3");
        assert_eq!(s.build().eval(0.0, 5.0), 1.0);
    }
}
