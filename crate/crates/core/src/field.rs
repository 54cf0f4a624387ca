//! Signal propagation in the moving window t' = t - z/c, z' = z.
//!
//! In window coordinates the envelope equations become ordinary equations in
//! z at fixed t': d eps_j / dz = -i kappa_j sigma_(j)a, with sigma_ba for
//! field 1 and sigma_da for field 3. The control fields are functions of t'
//! only and are not depleted.

use crate::bloch::{self, LocalFields};
use crate::config::{FieldCoupling, SimulationConfig};
use crate::density::{DensityMatrix, A, B, C64, D};
use crate::error::{Error, Result};
use crate::pulses::{Channel, PulseSchedule};
use crate::scheme::{LevelScheme, Variant};
use crate::units::{C_LIGHT, EPS0};
use rayon::prelude::*;

/// z grid, atoms and signal envelopes at one window time.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumState {
    pub t_prime: f64,
    /// Node positions, z[0] = 0 (entrance) ... z[nz-1] = L (exit).
    pub z: Vec<f64>,
    pub sigma: Vec<DensityMatrix>,
    pub eps1: Vec<C64>,
    pub eps3: Vec<C64>,
}

impl MediumState {
    /// All atoms in |b>, envelopes from the boundary values at t' = 0.
    pub fn initial(cfg: &SimulationConfig) -> Result<Self> {
        let nz = cfg.nz;
        let dz = cfg.dz();
        let mut st = MediumState {
            t_prime: 0.0,
            z: (0..nz).map(|k| k as f64 * dz).collect(),
            sigma: vec![DensityMatrix::pure_level(B); nz],
            eps1: vec![C64::new(0.0, 0.0); nz],
            eps3: vec![C64::new(0.0, 0.0); nz],
        };
        let kappa = Couplings::new(cfg)?;
        let (b1, b3) = cfg.schedule.boundary(0.0);
        propagate_window(&st.sigma, dz, kappa, C64::new(b1, 0.0), C64::new(b3, 0.0), &mut st.eps1, &mut st.eps3)?;
        Ok(st)
    }

    pub fn output(&self) -> (C64, C64) {
        let n = self.z.len() - 1;
        (self.eps1[n], self.eps3[n])
    }
}

/// kappa_j = N d_j omega_j / (eps0 c).
pub fn coupling_constant(scheme: &LevelScheme, density: f64, channel: Channel) -> Result<f64> {
    let (d, w) = match (channel, scheme.variant) {
        (Channel::One, _) => (scheme.d1, scheme.omega1()),
        (Channel::Three, Variant::CaseB) => (scheme.d3, scheme.omega3()),
        (Channel::Three, Variant::CaseA) => {
            return Err(Error::InvalidChannel {
                channel: 3,
                variant: Variant::CaseA.name(),
            })
        }
    };
    Ok(density * d * w / (EPS0 * C_LIGHT))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub kappa1: f64,
    /// Zero in case (a).
    pub kappa3: f64,
}

impl Couplings {
    pub fn new(cfg: &SimulationConfig) -> Result<Self> {
        let kappa1 = coupling_constant(&cfg.scheme, cfg.density, Channel::One)?;
        let kappa3 = match cfg.scheme.variant {
            Variant::CaseA => 0.0,
            Variant::CaseB => coupling_constant(&cfg.scheme, cfg.density, Channel::Three)?,
        };
        Ok(Couplings { kappa1, kappa3 })
    }
}

/// Integrate the envelopes from z = 0 across the grid with the trapezoidal
/// rule, given the atomic state at one window time.
pub fn propagate_window(
    sigma: &[DensityMatrix],
    dz: f64,
    kappa: Couplings,
    boundary1: C64,
    boundary3: C64,
    eps1: &mut [C64],
    eps3: &mut [C64],
) -> Result<()> {
    let n = sigma.len();
    debug_assert!(eps1.len() == n && eps3.len() == n);
    let k1 = C64::new(0.0, -0.5 * kappa.kappa1 * dz);
    let k3 = C64::new(0.0, -0.5 * kappa.kappa3 * dz);
    let mut e1 = boundary1;
    let mut e3 = boundary3;
    eps1[0] = e1;
    eps3[0] = e3;
    let mut prev1 = sigma[0][(B, A)];
    let mut prev3 = sigma[0][(D, A)];
    for k in 1..n {
        let s1 = sigma[k][(B, A)];
        let s3 = sigma[k][(D, A)];
        e1 += k1 * (prev1 + s1);
        e3 += k3 * (prev3 + s3);
        eps1[k] = e1;
        eps3[k] = e3;
        prev1 = s1;
        prev3 = s3;
    }
    if !(e1.re.is_finite() && e1.im.is_finite() && e3.re.is_finite() && e3.im.is_finite()) {
        return Err(Error::NumericalFailure {
            t_prime: f64::NAN,
            cell: n - 1,
            reason: "non-finite field envelope".into(),
        });
    }
    Ok(())
}

/// Per-step diagnostics measured on the raw Runge-Kutta output, before
/// re-Hermitization.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    pub max_trace_defect: f64,
    pub max_hermiticity_defect: f64,
}

impl StepDiagnostics {
    pub fn merge(&mut self, other: StepDiagnostics) {
        self.max_trace_defect = self.max_trace_defect.max(other.max_trace_defect);
        self.max_hermiticity_defect = self.max_hermiticity_defect.max(other.max_hermiticity_defect);
    }
}

/// Advances a [`MediumState`] by one window-time step. Holds the work buffers
/// so that a run does not allocate per step.
pub struct Propagator {
    scheme: LevelScheme,
    schedule: PulseSchedule,
    coupling: FieldCoupling,
    kappa: Couplings,
    dz: f64,
    dt: f64,
    k: [Vec<DensityMatrix>; 4],
    stage: Vec<DensityMatrix>,
    e1: Vec<C64>,
    e3: Vec<C64>,
}

const MIN_CELLS_PER_TASK: usize = 32;

impl Propagator {
    pub fn new(cfg: &SimulationConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.nz;
        let zero = vec![DensityMatrix::zero(); n];
        Ok(Propagator {
            scheme: cfg.scheme,
            schedule: cfg.schedule,
            coupling: cfg.field_coupling,
            kappa: Couplings::new(cfg)?,
            dz: cfg.dz(),
            dt: cfg.dt,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            stage: zero,
            e1: vec![C64::new(0.0, 0.0); n],
            e3: vec![C64::new(0.0, 0.0); n],
        })
    }

    /// Control 2 at `t`; control 4 is held at its mean over the current step.
    fn controls(&self, t: f64, step_start: f64) -> (f64, f64) {
        let omega2 = self.scheme.omega2_rabi(self.schedule.control2_envelope(t));
        (omega2, self.schedule.control4.mean_over(step_start, step_start + self.dt))
    }

    fn scan(&self, sigma: &[DensityMatrix], t: f64, e1: &mut [C64], e3: &mut [C64]) -> Result<()> {
        let (b1, b3) = self.schedule.boundary(t);
        propagate_window(sigma, self.dz, self.kappa, C64::new(b1, 0.0), C64::new(b3, 0.0), e1, e3).map_err(|e| match e {
            Error::NumericalFailure { cell, reason, .. } => Error::NumericalFailure { t_prime: t, cell, reason },
            other => other,
        })
    }

    /// Derivative of every cell at window time `t`, envelopes recomputed from `sigma`.
    fn derivative(&mut self, which: usize, from_stage: bool, base: &[DensityMatrix], t: f64, step_start: f64) -> Result<()> {
        let sigma: &[DensityMatrix] = if from_stage { &self.stage } else { base };
        let mut e1 = std::mem::take(&mut self.e1);
        let mut e3 = std::mem::take(&mut self.e3);
        self.scan(sigma, t, &mut e1, &mut e3)?;
        let (omega2, ctrl4) = self.controls(t, step_start);
        let scheme = self.scheme;
        let sigma: &[DensityMatrix] = if from_stage { &self.stage } else { base };
        self.k[which]
            .par_iter_mut()
            .with_min_len(MIN_CELLS_PER_TASK)
            .zip(sigma.par_iter())
            .zip(e1.par_iter().zip(e3.par_iter()))
            .for_each(|((out, s), (f1, f3))| {
                let f = LocalFields {
                    eps1: *f1,
                    eps3: *f3,
                    omega2,
                    ctrl4,
                };
                *out = bloch::rhs(s, &f, &scheme);
            });
        self.e1 = e1;
        self.e3 = e3;
        Ok(())
    }

    fn set_stage(&mut self, base: &[DensityMatrix], which: usize, h: f64) {
        let k = &self.k[which];
        self.stage
            .par_iter_mut()
            .with_min_len(MIN_CELLS_PER_TASK)
            .zip(base.par_iter().zip(k.par_iter()))
            .for_each(|(out, (s, d))| *out = s.axpy(h, d));
    }

    /// Advance `state` by one step dt, returning the step diagnostics.
    pub fn advance(&mut self, state: &mut MediumState) -> Result<StepDiagnostics> {
        let t = state.t_prime;
        let dt = self.dt;
        let next: Vec<DensityMatrix> = match self.coupling {
            FieldCoupling::Staged => {
                let base = &state.sigma;
                self.derivative(0, false, base, t, t)?;
                self.set_stage(base, 0, 0.5 * dt);
                self.derivative(1, true, base, t + 0.5 * dt, t)?;
                self.set_stage(base, 1, 0.5 * dt);
                self.derivative(2, true, base, t + 0.5 * dt, t)?;
                self.set_stage(base, 2, dt);
                self.derivative(3, true, base, t + dt, t)?;
                let [k1, k2, k3, k4] = &self.k;
                base.par_iter()
                    .with_min_len(MIN_CELLS_PER_TASK)
                    .enumerate()
                    .map(|(i, s)| bloch::rk4_combine(s, dt, &k1[i], &k2[i], &k3[i], &k4[i]))
                    .collect()
            }
            FieldCoupling::LieTrotter => {
                let scheme = self.scheme;
                let sched = self.schedule;
                let ctrl4 = sched.control4.mean_over(t, t + dt);
                let fields_at = |e1: C64, e3: C64| {
                    move |tt: f64| LocalFields {
                        eps1: e1,
                        eps3: e3,
                        omega2: scheme.omega2_rabi(sched.control2_envelope(tt)),
                        ctrl4,
                    }
                };
                state
                    .sigma
                    .par_iter()
                    .with_min_len(MIN_CELLS_PER_TASK)
                    .zip(state.eps1.par_iter().zip(state.eps3.par_iter()))
                    .map(|(s, (e1, e3))| {
                        let f = fields_at(*e1, *e3);
                        let k1 = bloch::rhs(s, &f(t), &scheme);
                        let k2 = bloch::rhs(&s.axpy(0.5 * dt, &k1), &f(t + 0.5 * dt), &scheme);
                        let k3 = bloch::rhs(&s.axpy(0.5 * dt, &k2), &f(t + 0.5 * dt), &scheme);
                        let k4 = bloch::rhs(&s.axpy(dt, &k3), &f(t + dt), &scheme);
                        bloch::rk4_combine(s, dt, &k1, &k2, &k3, &k4)
                    })
                    .collect()
            }
        };

        let mut diag = StepDiagnostics::default();
        for (cell, (new, old)) in next.iter().zip(&state.sigma).enumerate() {
            diag.max_trace_defect = diag.max_trace_defect.max((new.trace().re - 1.0).abs());
            diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(new.hermiticity_defect());
            bloch::check_step(old, new, t + dt, cell)?;
        }
        state.sigma = next;
        state.sigma.iter_mut().for_each(DensityMatrix::hermitize);
        state.t_prime = t + dt;
        self.scan(&state.sigma, state.t_prime, &mut state.eps1, &mut state.eps3)?;
        Ok(diag)
    }
}

/// Convenience single step for callers that do not keep a [`Propagator`].
pub fn advance(state: &mut MediumState, cfg: &SimulationConfig) -> Result<StepDiagnostics> {
    let mut p = Propagator::new(cfg)?;
    p.advance(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{protocol_config, Scale};

    #[test]
    fn vacuum_has_no_coupling() {
        let s = LevelScheme::model_atom(Variant::CaseB);
        assert_eq!(coupling_constant(&s, 0.0, Channel::One).unwrap(), 0.0);
        let k1 = coupling_constant(&s, 3e-13, Channel::One).unwrap();
        let k2 = coupling_constant(&s, 6e-13, Channel::One).unwrap();
        assert!((k2 / k1 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coupling_constant_default_value() {
        let s = LevelScheme::model_atom(Variant::CaseB);
        let d1 = (3.0 * 2.4e-9 * 137.036f64.powi(3) / (4.0 * 1e-3)).sqrt();
        let want = 3e-13 * d1 * 0.10 * 4.0 * std::f64::consts::PI / 137.036;
        let got = coupling_constant(&s, 3e-13, Channel::One).unwrap();
        assert!((got / want - 1.0).abs() < 1e-12);
        // 5.92e-15 by hand
        assert!((got - 5.921e-15).abs() < 2e-18, "{got:e}");
    }

    #[test]
    fn channel_three_invalid_in_case_a() {
        let s = LevelScheme::model_atom(Variant::CaseA);
        assert!(matches!(
            coupling_constant(&s, 3e-13, Channel::Three),
            Err(Error::InvalidChannel { channel: 3, .. })
        ));
    }

    fn kappa() -> Couplings {
        Couplings {
            kappa1: 6e-15,
            kappa3: 5e-15,
        }
    }

    #[test]
    fn transparent_medium_keeps_boundary_value() {
        let n = 50;
        let sigma = vec![DensityMatrix::pure_level(B); n];
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        let mut e3 = e1.clone();
        let b1 = C64::new(1e-10, 0.0);
        let b3 = C64::new(-2e-11, 3e-12);
        propagate_window(&sigma, 1e5, kappa(), b1, b3, &mut e1, &mut e3).unwrap();
        assert!(e1.iter().all(|e| *e == b1));
        assert!(e3.iter().all(|e| *e == b3));
    }

    #[test]
    fn constant_source_grows_linearly() {
        let n = 101;
        let len = 2.5e7;
        let dz = len / (n - 1) as f64;
        let s = C64::new(0.0, -3e-3);
        let mut m = DensityMatrix::pure_level(B);
        m[(B, A)] = s;
        m[(A, B)] = s.conj();
        let sigma = vec![m; n];
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        let mut e3 = e1.clone();
        let k = kappa();
        propagate_window(&sigma, dz, k, C64::new(0.0, 0.0), C64::new(0.0, 0.0), &mut e1, &mut e3).unwrap();
        let want = C64::new(0.0, -k.kappa1) * s * len;
        assert!((e1[n - 1] - want).norm() < 1e-12 * want.norm());
    }

    /// sigma_ba(z) = s0 cos(q z): exact field -i kappa s0 sin(q z) / q.
    fn trapezoid_error(n: usize) -> f64 {
        let len = 1.0;
        let q = 3.0;
        let dz = len / (n - 1) as f64;
        let sigma: Vec<DensityMatrix> = (0..n)
            .map(|k| {
                let mut m = DensityMatrix::pure_level(B);
                m[(B, A)] = C64::new((q * k as f64 * dz).cos(), 0.0);
                m
            })
            .collect();
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        let mut e3 = e1.clone();
        let k = Couplings {
            kappa1: 1.0,
            kappa3: 0.0,
        };
        propagate_window(&sigma, dz, k, C64::new(0.0, 0.0), C64::new(0.0, 0.0), &mut e1, &mut e3).unwrap();
        let exact = C64::new(0.0, -(q * len).sin() / q);
        (e1[n - 1] - exact).norm()
    }

    #[test]
    fn z_integration_is_second_order() {
        let e_coarse = trapezoid_error(41);
        let e_fine = trapezoid_error(81);
        let ratio = e_coarse / e_fine;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn dark_medium_stays_dark() {
        // no signal, control on: nothing can leave |b>
        let mut cfg = protocol_config(Variant::CaseB, Scale::Desk);
        cfg.schedule.signal.eps10 = 0.0;
        cfg.nz = 20;
        let mut st = MediumState::initial(&cfg).unwrap();
        let mut p = Propagator::new(&cfg).unwrap();
        for _ in 0..200 {
            p.advance(&mut st).unwrap();
        }
        assert!(st.sigma.iter().all(|s| *s == DensityMatrix::pure_level(B)));
        assert!(st.eps1.iter().chain(&st.eps3).all(|e| e.norm() == 0.0));
    }

    #[test]
    fn vacuum_pulse_is_stationary_in_window_frame() {
        let mut cfg = protocol_config(Variant::CaseA, Scale::Desk);
        cfg.density = 0.0;
        cfg.nz = 10;
        let mut st = MediumState::initial(&cfg).unwrap();
        let mut p = Propagator::new(&cfg).unwrap();
        for _ in 0..500 {
            p.advance(&mut st).unwrap();
            let want = cfg.schedule.signal_envelope(st.t_prime);
            let (out, _) = st.output();
            assert!((out.re - want).abs() <= 1e-12 * cfg.schedule.signal.eps10);
        }
    }
}
