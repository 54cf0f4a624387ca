//! End-to-end runs: store the signal, rotate the stored coherence with
//! control 4, release, and measure what leaves the medium.

use crate::config::SimulationConfig;
use crate::density::{B, C, C64, D};
use crate::error::{Error, Result};
use crate::field::{MediumState, Propagator, StepDiagnostics};
use crate::polariton::polariton_velocity;
use crate::pulses::{duration_for_area, pulse_area, Channel, ControlSwitch, RectPulse};
use crate::scheme::Variant;
use crate::units::C_LIGHT;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    /// Area of the control-4 pulse.
    pub theta: f64,
    pub times: Vec<f64>,
    /// Envelopes at z = L.
    pub out1: Vec<C64>,
    pub out3: Vec<C64>,
    /// Integral of |eps|^2 over the release window.
    pub released_energy_1: f64,
    pub released_energy_3: f64,
    /// Signed real-part extremum in the release window.
    pub peak_amp_1: f64,
    pub peak_amp_3: f64,
    /// Spatial mean of |sigma_bc|^2 + |sigma_dc|^2 + |sigma_bd|^2 at the end of the run.
    pub residual_coherence_norm: f64,
    /// Integral of |eps|^2 of the injected signal.
    pub input_fluence: f64,
    pub release_start: f64,
    pub diagnostics: StepDiagnostics,
}

impl ScenarioResult {
    pub fn output(&self, channel: Channel) -> &[C64] {
        match channel {
            Channel::One => &self.out1,
            Channel::Three => &self.out3,
        }
    }

    /// Integral of |eps|^2 of one output channel over [from, to].
    pub fn fluence(&self, channel: Channel, from: f64, to: f64) -> f64 {
        fluence(&self.times, self.output(channel), from, to)
    }

    /// Real parts of one channel restricted to [from, to].
    pub fn window(&self, channel: Channel, from: f64, to: f64) -> (Vec<f64>, Vec<f64>) {
        self.times
            .iter()
            .zip(self.output(channel))
            .filter(|(t, _)| **t >= from && **t <= to)
            .map(|(t, e)| (*t, e.re))
            .unzip()
    }
}

/// Trapezoidal integral of |e|^2 over the samples inside [from, to].
pub fn fluence(times: &[f64], values: &[C64], from: f64, to: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t0 >= from && t1 <= to {
            acc += 0.5 * (values[k - 1].norm_sqr() + values[k].norm_sqr()) * (t1 - t0);
        }
    }
    acc
}

/// Sample with the largest |Re|, sign kept.
pub fn signed_peak(times: &[f64], values: &[C64], from: f64) -> f64 {
    times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= from)
        .map(|(_, e)| e.re)
        .fold(0.0, |best: f64, x| if x.abs() > best.abs() { x } else { best })
}

fn residual_norm(state: &MediumState) -> f64 {
    let f = |k: usize| {
        let s = &state.sigma[k];
        s[(B, C)].norm_sqr() + s[(D, C)].norm_sqr() + s[(B, D)].norm_sqr()
    };
    let n = state.z.len();
    let sum: f64 = (1..n).map(|k| 0.5 * (f(k - 1) + f(k)) * (state.z[k] - state.z[k - 1])).sum();
    sum / (state.z[n - 1] - state.z[0])
}

/// Run the configured schedule to `t_end`. The returned snapshots are the
/// medium states at the first step at or after each of `probe_times`.
pub fn run_with_probes(cfg: &SimulationConfig, probe_times: &[f64]) -> Result<(ScenarioResult, Vec<MediumState>)> {
    cfg.validate()?;
    let mut state = MediumState::initial(cfg)?;
    let mut prop = Propagator::new(cfg)?;
    let steps = cfg.n_steps();
    let cap = steps / cfg.record_stride + 2;
    let mut times = Vec::with_capacity(cap);
    let mut out1 = Vec::with_capacity(cap);
    let mut out3 = Vec::with_capacity(cap);
    let mut record = |st: &MediumState| {
        let (e1, e3) = st.output();
        times.push(st.t_prime);
        out1.push(e1);
        out3.push(e3);
    };
    record(&state);

    let mut probes: Vec<(usize, f64)> = probe_times.iter().copied().enumerate().collect();
    probes.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut snapshots: Vec<Option<MediumState>> = vec![None; probe_times.len()];
    let mut next_probe = 0;
    let mut take = |st: &MediumState, next: &mut usize| {
        while *next < probes.len() && st.t_prime >= probes[*next].1 {
            snapshots[probes[*next].0] = Some(st.clone());
            *next += 1;
        }
    };
    take(&state, &mut next_probe);

    let mut diagnostics = StepDiagnostics::default();
    for step in 1..=steps {
        diagnostics.merge(prop.advance(&mut state)?);
        if step % cfg.record_stride == 0 || step == steps {
            record(&state);
        }
        take(&state, &mut next_probe);
    }
    let snapshots = snapshots
        .into_iter()
        .map(|s| s.unwrap_or_else(|| state.clone()))
        .collect();

    let release_start = cfg.release_start();
    let c4 = &cfg.schedule.control4;
    let result = ScenarioResult {
        theta: pulse_area(c4.amp, c4.t1, c4.t2, &cfg.scheme),
        released_energy_1: fluence(&times, &out1, release_start, f64::INFINITY),
        released_energy_3: fluence(&times, &out3, release_start, f64::INFINITY),
        peak_amp_1: signed_peak(&times, &out1, release_start),
        peak_amp_3: signed_peak(&times, &out3, release_start),
        residual_coherence_norm: residual_norm(&state),
        input_fluence: cfg.schedule.signal.fluence(),
        release_start,
        diagnostics,
        times,
        out1,
        out3,
    };
    Ok((result, snapshots))
}

/// Inject, store, apply control 4 as configured, release.
pub fn run_storage_cycle(cfg: &SimulationConfig) -> Result<ScenarioResult> {
    run_with_probes(cfg, &[]).map(|(r, _)| r)
}

/// One storage cycle per area, control-4 window centred in the storage plateau.
pub fn sweep_pulse_area(cfg: &SimulationConfig, thetas: &[f64]) -> Result<Vec<ScenarioResult>> {
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("pulse areas must be finite".into()));
    }
    thetas
        .par_iter()
        .map(|&theta| {
            let c = cfg.with_pulse_area(theta, 0.0)?;
            let mut r = run_storage_cycle(&c)?;
            r.theta = theta;
            Ok(r)
        })
        .collect()
}

/// Amplitude factor of control 4 in the overlap scenario.
pub const OVERLAP_BOOST: f64 = 10.0;

/// Release transit times covered by control 4 in the overlap scenario.
pub const OVERLAP_RELEASE_TRANSITS: f64 = 1.5;

/// Group velocity of the three-level polariton at the configured control maximum.
pub fn release_transit_time(cfg: &SimulationConfig) -> f64 {
    let omega2 = cfg.scheme.omega2_rabi(cfg.schedule.control2.eps2_max);
    cfg.length / polariton_velocity(0.0, omega2, cfg.density, &cfg.scheme)
}

/// Case (a) with a control-4 pulse ten times stronger, switched on half way
/// through the storage plateau and kept on until the stored pulse has left.
pub fn overlap_config(base: &SimulationConfig) -> Result<SimulationConfig> {
    if base.variant() != Variant::CaseA {
        return Err(Error::InvalidVariant(base.variant().name()));
    }
    let mut cfg = *base;
    let c2 = cfg.schedule.control2;
    cfg.schedule.control4.amp = OVERLAP_BOOST * base.schedule.control4.amp;
    cfg.schedule.control4.t1 = cfg.plateau_mid();
    cfg.schedule.control4.t2 = c2.t_on + OVERLAP_RELEASE_TRANSITS * release_transit_time(base);
    Ok(cfg.with_resolved_dt())
}

/// Run a configuration in which control 4 overlaps the return of control 2.
pub fn run_overlap_scenario(cfg: &SimulationConfig) -> Result<ScenarioResult> {
    if cfg.variant() != Variant::CaseA {
        return Err(Error::InvalidVariant(cfg.variant().name()));
    }
    let c4 = &cfg.schedule.control4;
    if !(c4.t1 < cfg.schedule.control2.t_on && c4.t2 > cfg.schedule.control2.t_on) {
        return Err(Error::InvalidConfig(
            "overlap scenario needs control 4 on while control 2 switches on".into(),
        ));
    }
    run_storage_cycle(cfg)
}

/// Slow-light run with control 2 held at `eps2` and no storage. In case (b) a
/// non-zero `prepared_theta` first rotates the medium with a control-4 pulse
/// of that area; the signal then follows on the channel of the more populated
/// ground level. `t_end` leaves room for the pulse to cross the medium.
pub fn slow_light_config(base: &SimulationConfig, eps2: f64, prepared_theta: f64) -> Result<SimulationConfig> {
    if !(eps2.is_finite() && eps2 > 0.0) {
        return Err(Error::Domain(format!("control amplitude must be positive, got {eps2}")));
    }
    let mut cfg = *base;
    let sched = &mut cfg.schedule;
    let t_sig = sched.signal.tau2 - sched.signal.tau1;
    sched.control2 = ControlSwitch::always_on(eps2, sched.control2.rise);
    sched.control4 = RectPulse::off();
    sched.signal.channel = Channel::One;
    let mut start = 0.0;
    if prepared_theta != 0.0 {
        if base.variant() != Variant::CaseB {
            return Err(Error::InvalidVariant(base.variant().name()));
        }
        let amp = base.schedule.control4.amp.abs() * prepared_theta.signum();
        let w = duration_for_area(prepared_theta, amp, &cfg.scheme)?;
        sched.control4 = RectPulse { amp, t1: 0.0, t2: w };
        start = w + 0.05 * t_sig;
        if prepared_theta.sin().powi(2) > 0.5 {
            sched.signal.channel = Channel::Three;
        }
    }
    sched.signal.tau1 = start;
    sched.signal.tau2 = start + t_sig;
    let omega2 = cfg.scheme.omega2_rabi(eps2);
    let v = polariton_velocity(prepared_theta, omega2, cfg.density, &cfg.scheme);
    cfg.t_end = sched.signal.tau2 + 1.5 * cfg.length / v;
    Ok(cfg.with_resolved_dt())
}

/// c-d Rabi period 2 pi hbar / |eps4 d4| of a case (a) configuration.
pub fn rabi_period_cd(cfg: &SimulationConfig) -> f64 {
    2.0 * PI * crate::units::HBAR / (cfg.schedule.control4.amp * cfg.scheme.d4).abs()
}

/// Group velocity from a run with the control held on: L / (dt' + L/c),
/// where dt' is the window-time delay between the input and output peaks.
pub fn measure_group_delay(result: &ScenarioResult, cfg: &SimulationConfig) -> Result<f64> {
    let channel = cfg.schedule.signal.channel;
    let out = result.output(channel);
    let energy = fluence(&result.times, out, f64::NEG_INFINITY, f64::INFINITY);
    if !(energy > 1e-6 * cfg.schedule.signal.fluence()) {
        return Err(Error::Measurement(format!(
            "output energy {energy:e} too small to locate a peak"
        )));
    }
    let mags: Vec<f64> = out.iter().map(|e| e.norm()).collect();
    let t_out = interpolated_peak(&result.times, &mags)
        .ok_or_else(|| Error::Measurement("no output peak".into()))?;
    let delay = t_out - cfg.schedule.signal.peak_time();
    Ok(cfg.length / (delay + cfg.length / C_LIGHT))
}

/// Location of the maximum of `y`, refined by a parabola through the three
/// samples around it.
pub fn interpolated_peak(t: &[f64], y: &[f64]) -> Option<f64> {
    let (k, _) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if k == 0 || k + 1 >= y.len() {
        return Some(t[k]);
    }
    let (ym, y0, yp) = (y[k - 1], y[k], y[k + 1]);
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
    let h = 0.5 * (t[k + 1] - t[k - 1]);
    Some(t[k] + shift.clamp(-1.0, 1.0) * h)
}

/// Least-squares quadratic removed, Hann window applied.
fn prepare_spectrum_input(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let t0 = t[0];
    let span = (t[n - 1] - t0).max(f64::MIN_POSITIVE);
    let x: Vec<f64> = t.iter().map(|v| 2.0 * (v - t0) / span - 1.0).collect();
    // normal equations for y ~ c0 + c1 x + c2 x^2
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (xi, yi) in x.iter().zip(y) {
        let p = [1.0, *xi, xi * xi];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
            r[i] += p[i] * yi;
        }
    }
    let coef = solve3(m, r).unwrap_or([y.iter().sum::<f64>() / n as f64, 0.0, 0.0]);
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(k, (xi, yi))| {
            let w = if n > 1 {
                0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos()
            } else {
                1.0
            };
            (yi - (coef[0] + coef[1] * xi + coef[2] * xi * xi)) * w
        })
        .collect()
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in 0..3 {
                    m[row][k] -= f * m[col][k];
                }
                r[row] -= f * r[col];
            }
        }
    }
    Some([r[0] / m[0][0], r[1] / m[1][1], r[2] / m[2][2]])
}

/// Dominant oscillation period of uniformly sampled data, from the largest
/// peak of the zero-padded FFT above `min_cycles` cycles per record.
pub fn dominant_period(t: &[f64], y: &[f64], min_cycles: f64) -> Result<f64> {
    let n = y.len();
    if n < 8 || t.len() != n {
        return Err(Error::Measurement("too few samples for a spectrum".into()));
    }
    let h = (t[n - 1] - t[0]) / (n - 1) as f64;
    let x = prepare_spectrum_input(t, y);
    let len = (16 * n).next_power_of_two();
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = x
        .iter()
        .map(|v| rustfft::num_complex::Complex::new(*v, 0.0))
        .chain(std::iter::repeat(rustfft::num_complex::Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let df = 1.0 / (len as f64 * h);
    let f_min = min_cycles / (n as f64 * h);
    let lo = ((f_min / df).ceil() as usize).max(1);
    let hi = len / 2;
    if lo + 1 >= hi {
        return Err(Error::Measurement("frequency band is empty".into()));
    }
    let mag: Vec<f64> = buf[..=hi].iter().map(|c| c.norm()).collect();
    let k = (lo..hi)
        .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
        .ok_or_else(|| Error::Measurement("no spectral peak".into()))?;
    let (ym, y0, yp) = (mag[k - 1], mag[k], mag[k + 1]);
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom != 0.0 { (0.5 * (ym - yp) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    let f = (k as f64 + shift) * df;
    if !(f > 0.0) {
        return Err(Error::Measurement("zero-frequency peak".into()));
    }
    Ok(1.0 / f)
}

/// |sum_k x_k e^{-2 pi i f t_k}|^2 of the detrended, windowed samples.
pub fn spectral_power_at(t: &[f64], y: &[f64], freq: f64) -> f64 {
    if y.len() < 4 {
        return 0.0;
    }
    let x = prepare_spectrum_input(t, y);
    let mut acc = C64::new(0.0, 0.0);
    for (tk, xk) in t.iter().zip(&x) {
        acc += C64::from_polar(*xk, -2.0 * PI * freq * (tk - t[0]));
    }
    acc.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fluence_of_constant() {
        let t: Vec<f64> = (0..11).map(|k| k as f64).collect();
        let v = vec![C64::new(2.0, 0.0); 11];
        assert!((fluence(&t, &v, 0.0, 10.0) - 40.0).abs() < 1e-12);
        assert!((fluence(&t, &v, 2.0, 5.0) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn signed_peak_keeps_sign() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let v = [C64::new(5.0, 0.0), C64::new(0.5, 0.0), C64::new(-2.0, 0.0), C64::new(1.0, 9.0)];
        assert_eq!(signed_peak(&t, &v, 1.0), -2.0);
        assert_eq!(signed_peak(&t, &v, 0.0), 5.0);
    }

    #[test]
    fn parabolic_peak_is_exact_for_parabola() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|x| -(x - 4.3) * (x - 4.3)).collect();
        assert!((interpolated_peak(&t, &y).unwrap() - 4.3).abs() < 1e-12);
    }

    #[test]
    fn finds_period_on_sloped_background() {
        let period = 1.15e9;
        let t: Vec<f64> = (0..800).map(|k| k as f64 * 1.3e7).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|x| 3.0 + x * 1e-10 + 0.4 * (2.0 * PI * x / period + 0.3).cos())
            .collect();
        let p = dominant_period(&t, &y, 2.0).unwrap();
        assert!((p / period - 1.0).abs() < 0.02, "p = {p:e}");
        let on = spectral_power_at(&t, &y, 1.0 / period);
        let flat: Vec<f64> = t.iter().map(|x| 3.0 + x * 1e-10).collect();
        let off = spectral_power_at(&t, &flat, 1.0 / period);
        assert!(off < 1e-6 * on);
    }

    #[test]
    fn group_delay_needs_signal() {
        let cfg = crate::config::protocol_config(Variant::CaseA, crate::config::Scale::Desk);
        let r = ScenarioResult {
            theta: 0.0,
            times: vec![0.0, 1.0, 2.0],
            out1: vec![C64::new(0.0, 0.0); 3],
            out3: vec![C64::new(0.0, 0.0); 3],
            released_energy_1: 0.0,
            released_energy_3: 0.0,
            peak_amp_1: 0.0,
            peak_amp_3: 0.0,
            residual_coherence_norm: 0.0,
            input_fluence: 1.0,
            release_start: 0.0,
            diagnostics: StepDiagnostics::default(),
        };
        assert!(matches!(measure_group_delay(&r, &cfg), Err(Error::Measurement(_))));
    }

    #[test]
    fn overlap_requires_case_a() {
        let b = crate::config::protocol_config(Variant::CaseB, crate::config::Scale::Desk);
        assert!(matches!(overlap_config(&b), Err(Error::InvalidVariant(_))));
        let a = crate::config::protocol_config(Variant::CaseA, crate::config::Scale::Desk);
        assert!(run_overlap_scenario(&a).is_err());
        let o = overlap_config(&a).unwrap();
        assert!(o.schedule.control4.t1 < o.schedule.control2.t_on);
        assert!(o.schedule.control4.t2 > o.schedule.control2.t_on);
        assert!(o.dt < a.dt);
    }
}
