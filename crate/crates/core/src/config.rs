//! Simulation configuration, presets and the `key = value` file format.
//!
//! Every value is in atomic units. Keys mirror the field paths of
//! [`SimulationConfig`], e.g. `scheme.d4`, `schedule.control2.t_off`, `nz`.

use crate::error::{Error, Result};
use crate::output::fmt_g17;
use crate::pulses::{duration_for_area, Channel, ControlSwitch, PulseSchedule, RectPulse, SignalPulse};
use crate::scheme::{LevelScheme, Variant};
use crate::units::{C_LIGHT, EPS0, HBAR};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// How field propagation is interleaved with the atomic time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldCoupling {
    /// Envelopes recomputed along z at every Runge-Kutta stage.
    Staged,
    /// Atoms stepped with frozen envelopes, then envelopes recomputed.
    LieTrotter,
}

impl fmt::Display for FieldCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldCoupling::Staged => "staged",
            FieldCoupling::LieTrotter => "lie-trotter",
        })
    }
}

impl FromStr for FieldCoupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "staged" => Ok(FieldCoupling::Staged),
            "lie-trotter" => Ok(FieldCoupling::LieTrotter),
            other => Err(Error::InvalidConfig(format!("unknown field coupling `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub scheme: LevelScheme,
    pub schedule: PulseSchedule,
    /// Medium length L.
    pub length: f64,
    /// Atom number density N.
    pub density: f64,
    /// Number of z nodes, including both faces of the medium.
    pub nz: usize,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub field_coupling: FieldCoupling,
}

/// Problem size of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Medium length and signal duration reduced tenfold.
    Desk,
    /// The model parameters as given.
    Full,
}

pub const DEFAULT_NZ: usize = 200;
/// Steps per period of the fastest Rabi oscillation.
pub const STEPS_PER_RABI_PERIOD: f64 = 200.0;
/// Fraction of the storage plateau by which the control-4 window may be shifted.
pub const WINDOW_SHIFT_MARGIN: f64 = 0.2;

const SIGNAL_LENGTH: f64 = 1e11;
const EPS10: f64 = 1e-10;
const EPS2_MAX: f64 = 1.2e-9;
const DENSITY: f64 = 3e-13;
const U_DEFAULT: f64 = 1e-10;
const EPS4_DEFAULT: f64 = 2e-9;

/// The model parameter set at full scale, control 4 switched off.
pub fn default_config(variant: Variant) -> SimulationConfig {
    protocol_config(variant, Scale::Full)
}

/// Store-rotate-release protocol: the signal enters at t' = 0, control 2 is
/// switched off near the moment the pulse centre reaches the middle of the
/// medium, stays off for a plateau long enough to hold a pi-area control-4
/// pulse (with room to shift it), then switches back on for the release.
pub fn protocol_config(variant: Variant, scale: Scale) -> SimulationConfig {
    let scheme = LevelScheme::model_atom(variant);
    let k = match scale {
        Scale::Desk => 0.1,
        Scale::Full => 1.0,
    };
    let t_sig = SIGNAL_LENGTH * k;
    let length = k * match variant {
        Variant::CaseA => 2.5e7,
        Variant::CaseB => 3e7,
    };
    let amp4 = match variant {
        Variant::CaseA => EPS4_DEFAULT,
        Variant::CaseB => U_DEFAULT,
    };
    let rise = 0.01 * t_sig;
    let omega2 = scheme.omega2_rabi(EPS2_MAX);
    let transit = length / slow_light_velocity(&scheme, DENSITY, omega2);

    let t_off = 0.5 * t_sig + 0.5 * transit;
    let w_pi = duration_for_area(PI, amp4, &scheme).expect("non-zero control 4");
    let plateau = (0.5 * t_sig).max((0.5 * w_pi + 10.0 * rise) / (0.5 - WINDOW_SHIFT_MARGIN));
    let t_on = t_off + plateau;
    let mid = 0.5 * (t_off + t_on);
    let t_end = t_on + 10.0 * rise + 2.0 * transit;

    let schedule = PulseSchedule {
        signal: SignalPulse {
            eps10: EPS10,
            tau1: 0.0,
            tau2: t_sig,
            channel: Channel::One,
        },
        control2: ControlSwitch {
            eps2_max: EPS2_MAX,
            t_off,
            t_on,
            rise,
        },
        control4: RectPulse {
            amp: amp4,
            t1: mid,
            t2: mid,
        },
    };
    let mut cfg = SimulationConfig {
        scheme,
        schedule,
        length,
        density: DENSITY,
        nz: DEFAULT_NZ,
        dt: 0.0,
        t_end,
        record_stride: 1,
        field_coupling: FieldCoupling::Staged,
    };
    cfg.dt = resolved_dt(&cfg);
    cfg
}

/// Three-level group velocity for a constant control, used to lay out presets.
fn slow_light_velocity(scheme: &LevelScheme, density: f64, omega2: f64) -> f64 {
    let a = 2.0 * density * scheme.d1 * scheme.d1 * scheme.omega1() / (HBAR * EPS0 * omega2 * omega2);
    C_LIGHT / (1.0 + a)
}

/// Step resolving the fastest Rabi period of the configured fields by
/// [`STEPS_PER_RABI_PERIOD`] steps.
pub fn resolved_dt(cfg: &SimulationConfig) -> f64 {
    let s = &cfg.scheme;
    let sched = &cfg.schedule;
    let ctrl4 = match s.variant {
        Variant::CaseA => (sched.control4.amp * s.d4).abs(),
        Variant::CaseB => sched.control4.amp.abs(),
    } / HBAR;
    let d_sig = match sched.signal.channel {
        Channel::One => s.d1,
        Channel::Three => s.d3,
    };
    let rate = s
        .omega2_rabi(sched.control2.eps2_max)
        .abs()
        .max(ctrl4)
        .max((sched.signal.eps10 * d_sig / HBAR).abs());
    if rate > 0.0 {
        2.0 * PI / (STEPS_PER_RABI_PERIOD * rate)
    } else {
        cfg.t_end / 1000.0
    }
}

impl SimulationConfig {
    pub fn variant(&self) -> Variant {
        self.scheme.variant
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.nz - 1) as f64
    }

    /// Number of steps needed to reach `t_end` from t' = 0.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).ceil() as usize
    }

    /// Mid-point of the storage plateau.
    pub fn plateau_mid(&self) -> f64 {
        0.5 * (self.schedule.control2.t_off + self.schedule.control2.t_on)
    }

    /// Start of the release window, 5 rise times after control 2 returns.
    pub fn release_start(&self) -> f64 {
        let c = &self.schedule.control2;
        c.t_on + 5.0 * c.rise
    }

    /// Place a control-4 window of area `theta` centred at `mid + offset`.
    pub fn with_pulse_area(mut self, theta: f64, offset: f64) -> Result<Self> {
        let amp = self.schedule.control4.amp.abs() * if theta < 0.0 { -1.0 } else { 1.0 };
        let w = duration_for_area(theta, amp, &self.scheme)?;
        let centre = self.plateau_mid() + offset;
        self.schedule.control4 = RectPulse {
            amp,
            t1: centre - 0.5 * w,
            t2: centre + 0.5 * w,
        };
        Ok(self)
    }

    /// Same configuration with the time step re-derived from the fields.
    pub fn with_resolved_dt(mut self) -> Self {
        self.dt = resolved_dt(&self);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        self.schedule.validate(self.scheme.variant)?;
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad("length must be positive");
        }
        if !(self.density >= 0.0) || !self.density.is_finite() {
            return bad("density must be non-negative");
        }
        if self.nz < 2 {
            return bad("nz must be at least 2");
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad("dt must be positive");
        }
        if !(self.t_end > self.dt) || !self.t_end.is_finite() {
            return bad("t_end must exceed dt");
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1");
        }
        Ok(())
    }

    /// All keys with their values, in file order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.scheme;
        let p = &self.schedule;
        let f = fmt_g17;
        vec![
            ("scheme.variant", s.variant.to_string()),
            ("scheme.e_a", f(s.e_a)),
            ("scheme.e_b", f(s.e_b)),
            ("scheme.e_c", f(s.e_c)),
            ("scheme.e_d", f(s.e_d)),
            ("scheme.d1", f(s.d1)),
            ("scheme.d2", f(s.d2)),
            ("scheme.d3", f(s.d3)),
            ("scheme.d4", f(s.d4)),
            ("scheme.gamma_ab", f(s.gamma_ab)),
            ("scheme.gamma_ac", f(s.gamma_ac)),
            ("scheme.gamma_ad", f(s.gamma_ad)),
            ("schedule.signal.eps10", f(p.signal.eps10)),
            ("schedule.signal.tau1", f(p.signal.tau1)),
            ("schedule.signal.tau2", f(p.signal.tau2)),
            ("schedule.signal.channel", p.signal.channel.to_string()),
            ("schedule.control2.eps2_max", f(p.control2.eps2_max)),
            ("schedule.control2.t_off", f(p.control2.t_off)),
            ("schedule.control2.t_on", f(p.control2.t_on)),
            ("schedule.control2.rise", f(p.control2.rise)),
            ("schedule.control4.amp", f(p.control4.amp)),
            ("schedule.control4.t1", f(p.control4.t1)),
            ("schedule.control4.t2", f(p.control4.t2)),
            ("length", f(self.length)),
            ("density", f(self.density)),
            ("nz", self.nz.to_string()),
            ("dt", f(self.dt)),
            ("t_end", f(self.t_end)),
            ("record_stride", self.record_stride.to_string()),
            ("field_coupling", self.field_coupling.to_string()),
        ]
    }

    /// Render in the configuration file format.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// Set one key. Values are not validated beyond parsing.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || parse_f64(value);
        let s = &mut self.scheme;
        let p = &mut self.schedule;
        match key {
            "scheme.variant" => s.variant = value.parse()?,
            "scheme.e_a" => s.e_a = num()?,
            "scheme.e_b" => s.e_b = num()?,
            "scheme.e_c" => s.e_c = num()?,
            "scheme.e_d" => s.e_d = num()?,
            "scheme.d1" => s.d1 = num()?,
            "scheme.d2" => s.d2 = num()?,
            "scheme.d3" => s.d3 = num()?,
            "scheme.d4" => s.d4 = num()?,
            "scheme.gamma_ab" => s.gamma_ab = num()?,
            "scheme.gamma_ac" => s.gamma_ac = num()?,
            "scheme.gamma_ad" => s.gamma_ad = num()?,
            "schedule.signal.eps10" => p.signal.eps10 = num()?,
            "schedule.signal.tau1" => p.signal.tau1 = num()?,
            "schedule.signal.tau2" => p.signal.tau2 = num()?,
            "schedule.signal.channel" => p.signal.channel = value.parse()?,
            "schedule.control2.eps2_max" => p.control2.eps2_max = num()?,
            "schedule.control2.t_off" => p.control2.t_off = num()?,
            "schedule.control2.t_on" => p.control2.t_on = num()?,
            "schedule.control2.rise" => p.control2.rise = num()?,
            "schedule.control4.amp" => p.control4.amp = num()?,
            "schedule.control4.t1" => p.control4.t1 = num()?,
            "schedule.control4.t2" => p.control4.t2 = num()?,
            "length" => self.length = num()?,
            "density" => self.density = num()?,
            "nz" => self.nz = parse_usize(value)?,
            "dt" => self.dt = num()?,
            "t_end" => self.t_end = num()?,
            "record_stride" => self.record_stride = parse_usize(value)?,
            "field_coupling" => self.field_coupling = value.parse()?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Apply a configuration file on top of `self`.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (line, key, value) in parse_entries(text)? {
            self.set(&key, &value).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }
}

fn parse_f64(value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::InvalidConfig(format!("`{value}` is not finite")));
    }
    Ok(v)
}

fn parse_usize(value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("`{value}` is not a non-negative integer")))
}

/// Split a configuration file into `(line number, key, value)` entries.
/// `#` starts a comment; blank lines are ignored.
pub fn parse_entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Parse {
                line,
                msg: "expected `key = value`".into(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(Error::Parse {
                line,
                msg: format!("invalid key `{k}`"),
            });
        }
        if v.is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("missing value for `{k}`"),
            });
        }
        out.push((line, k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Parse a full configuration: `base` overridden by the entries of `text`, then validated.
pub fn parse_config(text: &str, base: SimulationConfig) -> Result<SimulationConfig> {
    let mut cfg = base;
    cfg.apply_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parse a comma separated list of angles. Items are plain numbers or
/// multiples of pi: `0`, `pi/6`, `3pi/4`, `-0.5*pi`, `1.2`.
pub fn parse_theta_list(text: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(Error::InvalidConfig("empty angle list".into()));
    }
    items.into_iter().map(parse_angle).collect()
}

pub fn parse_angle(item: &str) -> Result<f64> {
    let bad = || Error::InvalidConfig(format!("cannot read angle `{item}`"));
    let s = item.trim().to_ascii_lowercase();
    if s.is_empty() {
        return Err(bad());
    }
    let v = if let Some((coef, rest)) = s.split_once("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let k = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = rest.trim();
        let div = if rest.is_empty() {
            1.0
        } else {
            let d = rest.strip_prefix('/').ok_or_else(bad)?;
            d.trim().parse::<f64>().map_err(|_| bad())?
        };
        if div == 0.0 {
            return Err(bad());
        }
        k * PI / div
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_model_parameters() {
        let a = default_config(Variant::CaseA);
        assert_eq!(a.scheme.d4, -2.74e-1);
        assert_eq!(a.density, 3e-13);
        assert_eq!(a.length, 2.5e7);
        assert_eq!(a.schedule.signal.eps10, 1e-10);
        assert_eq!(a.schedule.signal.tau2 - a.schedule.signal.tau1, 1e11);
        assert_eq!(a.schedule.control2.eps2_max, 1.2e-9);
        assert_eq!(a.schedule.control4.amp, 2e-9);
        assert_eq!(a.scheme.gamma_ab, 2.4e-9);
        assert_eq!(a.scheme.gamma_ac, 2.4e-9);
        assert_eq!(a.nz, 200);
        a.validate().unwrap();

        let b = default_config(Variant::CaseB);
        assert!((b.scheme.e_d - b.scheme.e_b - 1e-7).abs() < 1e-15);
        assert_eq!(b.length, 3e7);
        assert_eq!(b.schedule.control4.amp, 1e-10);
        assert_eq!(b.scheme.gamma_ad, 2.4e-9);
        b.validate().unwrap();
    }

    #[test]
    fn dt_resolves_fastest_rabi_period() {
        for v in [Variant::CaseA, Variant::CaseB] {
            let c = default_config(v);
            let omega2 = c.scheme.omega2_rabi(c.schedule.control2.eps2_max).abs();
            assert!((2.0 * PI / omega2) / c.dt >= 200.0 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn control4_window_fits_plateau_with_shift_margin() {
        for v in [Variant::CaseA, Variant::CaseB] {
            for scale in [Scale::Desk, Scale::Full] {
                let base = protocol_config(v, scale);
                let p = base.schedule.control2.t_on - base.schedule.control2.t_off;
                for off in [-WINDOW_SHIFT_MARGIN * p, WINDOW_SHIFT_MARGIN * p] {
                    let c = base.with_pulse_area(PI, off).unwrap();
                    let w = &c.schedule.control4;
                    let r = c.schedule.control2.rise;
                    assert!(w.t1 >= c.schedule.control2.t_off + 9.99 * r);
                    assert!(w.t2 <= c.schedule.control2.t_on - 9.99 * r);
                }
            }
        }
    }

    #[test]
    fn pulse_area_window_is_centred() {
        let c = default_config(Variant::CaseB).with_pulse_area(PI / 2.0, 0.0).unwrap();
        let w = c.schedule.control4;
        assert!(((w.t1 + w.t2) / 2.0 - c.plateau_mid()).abs() < 1.0);
        let th = crate::pulses::pulse_area(w.amp, w.t1, w.t2, &c.scheme);
        assert!((th - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn config_file_overrides() {
        let text = "# comment\n\nnz = 50  # trailing\nscheme.d4 = -0.3\nschedule.signal.channel = 3\nscheme.variant = b\n";
        let c = parse_config(text, default_config(Variant::CaseA)).unwrap();
        assert_eq!(c.nz, 50);
        assert_eq!(c.scheme.d4, -0.3);
        assert_eq!(c.schedule.signal.channel, Channel::Three);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let base = default_config(Variant::CaseA);
        let e = parse_config("nz = 10\nbogus = 1\n", base).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_config("nz 10\n", base).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_config("dt = \n", base).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_config("dt = inf\n", base).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(parse_config("nz = 1\n", base).is_err());
        assert!(parse_config("length = -1\n", base).is_err());
    }

    #[test]
    fn rendered_config_parses_back() {
        for v in [Variant::CaseA, Variant::CaseB] {
            let c = protocol_config(v, Scale::Desk).with_pulse_area(0.3, 1e9).unwrap();
            let back = parse_config(&c.to_config_string(), default_config(Variant::CaseA)).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn angles() {
        let v = parse_theta_list("0, pi/6,3pi/4, -0.5*pi, 1.25, pi").unwrap();
        let want = [0.0, PI / 6.0, 0.75 * PI, -0.5 * PI, 1.25, PI];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(parse_theta_list("").is_err());
        assert!(parse_theta_list("pi/0").is_err());
        assert!(parse_theta_list("pi/").is_err());
        assert!(parse_theta_list("1,,2").is_err());
        assert!(parse_theta_list("nan").is_err());
        assert!(parse_theta_list("2pi3").is_err());
    }
}
