//! Analytic envelopes of the four fields and pulse-area bookkeeping.

use crate::error::{Error, Result};
use crate::scheme::{LevelScheme, Variant};
use crate::units::HBAR;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Signal channel: field 1 (b-a) or field 3 (d-a, case (b) only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    One,
    Three,
}

impl Channel {
    pub fn number(self) -> u8 {
        match self {
            Channel::One => 1,
            Channel::Three => 3,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Channel::One),
            "3" => Ok(Channel::Three),
            other => Err(Error::InvalidConfig(format!("signal channel must be 1 or 3, got `{other}`"))),
        }
    }
}

/// sin^2 signal pulse injected at z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalPulse {
    pub eps10: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub channel: Channel,
}

impl SignalPulse {
    pub fn envelope(&self, t: f64) -> f64 {
        if t < self.tau1 || t > self.tau2 {
            return 0.0;
        }
        let s = (PI * (t - self.tau1) / (self.tau2 - self.tau1)).sin();
        self.eps10 * s * s
    }

    pub fn peak_time(&self) -> f64 {
        0.5 * (self.tau1 + self.tau2)
    }

    /// Integral of envelope^2 over the pulse, 3/8 eps10^2 (tau2 - tau1).
    pub fn fluence(&self) -> f64 {
        0.375 * self.eps10 * self.eps10 * (self.tau2 - self.tau1)
    }
}

/// Control field 2: on, switched off at `t_off`, back on at `t_on`, tanh edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSwitch {
    pub eps2_max: f64,
    pub t_off: f64,
    pub t_on: f64,
    pub rise: f64,
}

impl ControlSwitch {
    pub fn envelope(&self, t: f64) -> f64 {
        let off = 0.5 * (1.0 - ((t - self.t_off) / self.rise).tanh());
        let on = 0.5 * (1.0 + ((t - self.t_on) / self.rise).tanh());
        (self.eps2_max * (off + on)).clamp(0.0, self.eps2_max.max(0.0))
    }

    /// A control that stays on for the whole run (no storage).
    pub fn always_on(eps2_max: f64, rise: f64) -> Self {
        ControlSwitch {
            eps2_max,
            t_off: f64::MAX,
            t_on: f64::MAX,
            rise,
        }
    }
}

/// Rectangular control pulse 4: `amp` on [t1, t2). `amp` is U in case (b)
/// and eps4 in case (a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPulse {
    pub amp: f64,
    pub t1: f64,
    pub t2: f64,
}

impl RectPulse {
    pub fn off() -> Self {
        RectPulse {
            amp: 0.0,
            t1: 0.0,
            t2: 0.0,
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        if t >= self.t1 && t < self.t2 {
            self.amp
        } else {
            0.0
        }
    }

    pub fn duration(&self) -> f64 {
        (self.t2 - self.t1).max(0.0)
    }

    /// Mean amplitude over [a, b]; a step held at this value carries the exact area.
    pub fn mean_over(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return self.envelope(a);
        }
        let overlap = (b.min(self.t2) - a.max(self.t1)).max(0.0);
        self.amp * overlap / (b - a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    pub signal: SignalPulse,
    pub control2: ControlSwitch,
    pub control4: RectPulse,
}

impl PulseSchedule {
    pub fn signal_envelope(&self, t: f64) -> f64 {
        self.signal.envelope(t)
    }

    pub fn control2_envelope(&self, t: f64) -> f64 {
        self.control2.envelope(t)
    }

    pub fn control4_envelope(&self, t: f64) -> f64 {
        self.control4.envelope(t)
    }

    /// Boundary values (eps1, eps3) at z = 0.
    pub fn boundary(&self, t: f64) -> (f64, f64) {
        let e = self.signal.envelope(t);
        match self.signal.channel {
            Channel::One => (e, 0.0),
            Channel::Three => (0.0, e),
        }
    }

    pub fn validate(&self, variant: Variant) -> Result<()> {
        let s = &self.signal;
        let c2 = &self.control2;
        let c4 = &self.control4;
        let vals = [s.eps10, s.tau1, s.tau2, c2.eps2_max, c2.t_off, c2.t_on, c2.rise, c4.amp, c4.t1, c4.t2];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("pulse schedule has non-finite entries".into()));
        }
        if !(s.tau1 < s.tau2) {
            return Err(Error::InvalidConfig("signal pulse needs tau1 < tau2".into()));
        }
        if c2.t_off > c2.t_on {
            return Err(Error::InvalidConfig("control 2 must switch off before it switches on".into()));
        }
        if !(c2.rise > 0.0) {
            return Err(Error::InvalidConfig("control 2 rise time must be positive".into()));
        }
        if c4.t2 < c4.t1 {
            return Err(Error::InvalidConfig("control 4 needs t1 <= t2".into()));
        }
        if variant == Variant::CaseA && s.channel == Channel::Three {
            return Err(Error::InvalidChannel {
                channel: 3,
                variant: variant.name(),
            });
        }
        Ok(())
    }
}

/// Rabi coupling (per unit amplitude) of control 4 entering the pulse area.
fn area_factor(scheme: &LevelScheme) -> f64 {
    match scheme.variant {
        Variant::CaseB => 1.0,
        Variant::CaseA => scheme.d4.abs(),
    }
}

/// Pulse area of control 4: U (t2 - t1) / 2 hbar in case (b),
/// |eps4 d4| (t2 - t1) / 2 hbar in case (a). Sign follows `amp`.
pub fn pulse_area(amp: f64, t1: f64, t2: f64, scheme: &LevelScheme) -> f64 {
    amp * area_factor(scheme) * (t2 - t1) / (2.0 * HBAR)
}

/// Duration of a rectangular control-4 pulse of height `amp` reaching area `theta`.
pub fn duration_for_area(theta: f64, amp: f64, scheme: &LevelScheme) -> Result<f64> {
    let k = amp * area_factor(scheme);
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain("control 4 amplitude must be non-zero".into()));
    }
    let t = 2.0 * HBAR * theta / k;
    if t < 0.0 {
        return Err(Error::Domain(format!(
            "area {theta} has the opposite sign of amplitude {amp}"
        )));
    }
    Ok(t)
}
