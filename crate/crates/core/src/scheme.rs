//! Level scheme of the four-level atom.
//!
//! States: upper `a`, lower metastable `b` (initially occupied), `c` and `d`.
//! Field 1 (signal) drives b-a, field 2 (control) drives c-a. In case (a)
//! an electric-dipole field 4 couples c-d; in case (b) a second signal field 3
//! drives d-a and an effective interaction 4 couples b-d.

use crate::error::{Error, Result};
use crate::units::dipole_from_rate;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Field 4 couples the initially empty state c to d.
    CaseA,
    /// Effective coupling between the occupied state b and d, second signal on d-a.
    CaseB,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::CaseA => "case (a)",
            Variant::CaseB => "case (b)",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Variant::CaseA => "a",
            Variant::CaseB => "b",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "casea" | "case_a" => Ok(Variant::CaseA),
            "b" | "caseb" | "case_b" => Ok(Variant::CaseB),
            other => Err(Error::InvalidConfig(format!("unknown variant `{other}`"))),
        }
    }
}

/// Energies, dipole matrix elements and decay rates, all in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelScheme {
    pub variant: Variant,
    pub e_a: f64,
    pub e_b: f64,
    pub e_c: f64,
    pub e_d: f64,
    /// b-a
    pub d1: f64,
    /// c-a
    pub d2: f64,
    /// d-a (case (b) only)
    pub d3: f64,
    /// c-d (case (a) only)
    pub d4: f64,
    pub gamma_ab: f64,
    pub gamma_ac: f64,
    pub gamma_ad: f64,
}

const SPONTANEOUS_RATE: f64 = 2.4e-9;

impl LevelScheme {
    /// The model atom used for both coupling variants. Dipoles of the optical
    /// transitions follow from the decay rates.
    pub fn model_atom(variant: Variant) -> Self {
        let e_a = -0.10;
        let e_b = -0.20;
        let e_c = -0.18;
        let (e_d, gamma_ad) = match variant {
            Variant::CaseA => (-0.22, 0.0),
            Variant::CaseB => (e_b + 1e-7, SPONTANEOUS_RATE),
        };
        let mut s = LevelScheme {
            variant,
            e_a,
            e_b,
            e_c,
            e_d,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
            d4: -2.74e-1,
            gamma_ab: SPONTANEOUS_RATE,
            gamma_ac: SPONTANEOUS_RATE,
            gamma_ad,
        };
        s.d1 = dipole_from_rate(s.gamma_ab, s.omega1()).expect("positive frequency");
        s.d2 = dipole_from_rate(s.gamma_ac, s.omega2()).expect("positive frequency");
        if variant == Variant::CaseB {
            s.d3 = dipole_from_rate(s.gamma_ad, s.omega3()).expect("positive frequency");
        }
        s
    }

    pub fn omega1(&self) -> f64 {
        self.e_a - self.e_b
    }

    pub fn omega2(&self) -> f64 {
        self.e_a - self.e_c
    }

    pub fn omega3(&self) -> f64 {
        self.e_a - self.e_d
    }

    /// Carrier of field 4: c-d in case (a), d-b in case (b).
    pub fn omega4(&self) -> f64 {
        match self.variant {
            Variant::CaseA => self.e_c - self.e_d,
            Variant::CaseB => self.e_d - self.e_b,
        }
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_ab + self.gamma_ac + self.gamma_ad
    }

    /// Control Rabi frequency for a control amplitude, Omega2 = -eps2 d2 / hbar.
    pub fn omega2_rabi(&self, eps2: f64) -> f64 {
        -eps2 * self.d2 / crate::units::HBAR
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.e_a,
            self.e_b,
            self.e_c,
            self.e_d,
            self.d1,
            self.d2,
            self.d3,
            self.d4,
            self.gamma_ab,
            self.gamma_ac,
            self.gamma_ad,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("level scheme has non-finite entries".into()));
        }
        if self.gamma_ab < 0.0 || self.gamma_ac < 0.0 || self.gamma_ad < 0.0 {
            return Err(Error::InvalidConfig("decay rates must be non-negative".into()));
        }
        if !(self.omega1() > 0.0) || !(self.omega2() > 0.0) {
            return Err(Error::InvalidConfig(
                "state a must lie above b and c (omega1, omega2 > 0)".into(),
            ));
        }
        if self.variant == Variant::CaseA && (self.gamma_ad != 0.0 || self.d3 != 0.0) {
            return Err(Error::InvalidConfig(
                "case (a) has no d-a transition: gamma_ad and d3 must be zero".into(),
            ));
        }
        if self.variant == Variant::CaseB && !(self.omega3() > 0.0) {
            return Err(Error::InvalidConfig("state d must lie below a in case (b)".into()));
        }
        Ok(())
    }
}
