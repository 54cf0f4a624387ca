//! Closed-form dark-state-polariton results: the three-level polariton, the
//! coherence rotation produced by control 4, the two-channel mixing matrix,
//! the group velocity and the two-channel polariton.
//!
//! All expressions take the medium density `n` explicitly and evaluate with
//! atomic-unit constants.

use crate::density::{DensityMatrix, B, C, C64, D, LEVELS};
use crate::error::{Error, Result};
use crate::scheme::{LevelScheme, Variant};
use crate::units::{C_LIGHT, EPS0, HBAR};

/// Populations and coherences after a rotation of the stored excitation by
/// the area `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedCoherences {
    pub sigma_bb: f64,
    pub sigma_dd: f64,
    pub sigma_bd: f64,
    pub sigma_bc: C64,
    pub sigma_dc: C64,
    pub theta: f64,
}

/// Entries of the 2x2 matrix coupling the released signal fields 1 and 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingMatrix {
    pub m11: f64,
    pub m13: f64,
    pub m31: f64,
    pub m33: f64,
}

impl MixingMatrix {
    pub fn det(&self) -> f64 {
        self.m11 * self.m33 - self.m13 * self.m31
    }
}

/// Three-level dark-state polariton
/// (Omega2 eps1 + (2 w1 N d1 / eps0) sigma_bc) / sqrt(Omega2^2 + 2 w1 N d1^2 / (hbar eps0)),
/// times the sign -d2/|d2| so that the strong-control limit is eps1 itself.
pub fn dark_polariton_3(eps1: C64, sigma_bc: C64, omega2: f64, n: f64, scheme: &LevelScheme) -> Result<C64> {
    let w1 = scheme.omega1();
    let d1 = scheme.d1;
    let denom2 = omega2 * omega2 + 2.0 * w1 * n * d1 * d1 / (HBAR * EPS0);
    if !(denom2 > 0.0) {
        return Err(Error::Domain("polariton normalisation vanishes".into()));
    }
    if scheme.d2 == 0.0 {
        return Err(Error::Domain("control dipole d2 is zero".into()));
    }
    let sign = -scheme.d2.signum();
    let num = eps1 * omega2 + sigma_bc * (2.0 * w1 * n * d1 / EPS0);
    Ok(num * (sign / denom2.sqrt()))
}

/// Rotation of a stored coherence by a b-d pulse of area `theta`, starting
/// from all population in b.
pub fn rotate_coherences(sigma_bc_t1: C64, theta: f64) -> RotatedCoherences {
    rotate_state(1.0, sigma_bc_t1, theta)
}

/// As [`rotate_coherences`], with the b population before the pulse given
/// explicitly (it is slightly below one when light is stored).
pub fn rotate_state(sigma_bb_t1: f64, sigma_bc_t1: C64, theta: f64) -> RotatedCoherences {
    let (s, c) = theta.sin_cos();
    RotatedCoherences {
        sigma_bb: sigma_bb_t1 * c * c,
        sigma_dd: sigma_bb_t1 * s * s,
        sigma_bd: -sigma_bb_t1 * s * c,
        sigma_bc: sigma_bc_t1 * c,
        sigma_dc: -sigma_bc_t1 * s,
        theta,
    }
}

/// Propagator of a control-4 pulse of area `theta` acting alone: a real
/// rotation of (b, d) in case (b), the c-d Rabi rotation in case (a).
pub fn rotation_unitary(theta: f64, scheme: &LevelScheme) -> [[C64; LEVELS]; LEVELS] {
    let (s, c) = theta.sin_cos();
    let mut u = [[C64::new(0.0, 0.0); LEVELS]; LEVELS];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    match scheme.variant {
        Variant::CaseB => {
            u[B][B] = C64::new(c, 0.0);
            u[D][D] = C64::new(c, 0.0);
            u[B][D] = C64::new(s, 0.0);
            u[D][B] = C64::new(-s, 0.0);
        }
        Variant::CaseA => {
            let off = C64::new(0.0, scheme.d4.signum() * s);
            u[C][C] = C64::new(c, 0.0);
            u[D][D] = C64::new(c, 0.0);
            u[C][D] = off;
            u[D][C] = off;
        }
    }
    u
}

/// U sigma U^dagger with U from [`rotation_unitary`]; holds for any state,
/// including population that reached d by spontaneous decay.
pub fn rotate_density(sigma: &DensityMatrix, theta: f64, scheme: &LevelScheme) -> DensityMatrix {
    let u = rotation_unitary(theta, scheme);
    let mut us = [[C64::new(0.0, 0.0); LEVELS]; LEVELS];
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            us[i][j] = (0..LEVELS).map(|k| u[i][k] * sigma.0[k][j]).sum();
        }
    }
    let mut out = DensityMatrix::zero();
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            out.0[i][j] = (0..LEVELS).map(|k| us[i][k] * u[j][k].conj()).sum();
        }
    }
    out
}

/// Coupling matrix of the released fields in case (b).
pub fn mixing_matrix(theta: f64, n: f64, scheme: &LevelScheme) -> Result<MixingMatrix> {
    if scheme.variant != Variant::CaseB {
        return Err(Error::InvalidVariant(scheme.variant.name()));
    }
    let (s, c) = theta.sin_cos();
    let pre = 2.0 * n / (EPS0 * HBAR);
    let (d1, d3) = (scheme.d1, scheme.d3);
    let (w1, w3) = (scheme.omega1(), scheme.omega3());
    Ok(MixingMatrix {
        m11: -pre * w1 * d1 * d1 * c * c,
        m13: pre * w1 * d1 * d3 * s * c,
        m31: pre * w3 * d3 * d1 * s * c,
        m33: -pre * w3 * d3 * d3 * s * s,
    })
}

/// d1^2 w1 cos^2 + d3^2 w3 sin^2
fn weight(theta: f64, scheme: &LevelScheme) -> f64 {
    let (s, c) = theta.sin_cos();
    let w3 = if scheme.variant == Variant::CaseB { scheme.omega3() } else { 0.0 };
    scheme.d1 * scheme.d1 * scheme.omega1() * c * c + scheme.d3 * scheme.d3 * w3 * s * s
}

/// Group velocity of the shape-preserving released pulse,
/// c / (1 + 2N (d1^2 w1 cos^2 + d3^2 w3 sin^2) / (hbar eps0 Omega2^2)).
/// Returns 0 for Omega2 = 0 (stopped light).
pub fn polariton_velocity(theta: f64, omega2: f64, n: f64, scheme: &LevelScheme) -> f64 {
    if omega2 == 0.0 {
        return 0.0;
    }
    let a = 2.0 * n * weight(theta, scheme) / (HBAR * EPS0 * omega2 * omega2);
    C_LIGHT / (1.0 + a)
}

/// Two-channel polariton combining both fields and both coherences.
///
/// The printed expression carries a stray `sqrt(w1))`; it is read as an
/// overall factor sqrt(w1), the only reading under which the theta = 0 limit
/// reduces to the three-level polariton and the theta = -pi/2 limit gives
/// sqrt(w1/w3) eps3.
#[allow(clippy::too_many_arguments)]
pub fn dark_polariton_4(
    eps1: C64,
    eps3: C64,
    sigma_bc: C64,
    sigma_dc: C64,
    theta: f64,
    omega2: f64,
    n: f64,
    scheme: &LevelScheme,
) -> Result<C64> {
    let w = weight(theta, scheme);
    if !(w > 0.0) {
        return Err(Error::Domain("polariton weight vanishes".into()));
    }
    if omega2 == 0.0 {
        return Err(Error::Domain("polariton undefined at Omega2 = 0".into()));
    }
    if scheme.d1 == 0.0 {
        return Err(Error::Domain("signal dipole d1 is zero".into()));
    }
    let (s, c) = theta.sin_cos();
    let norm = w.sqrt() * scheme.omega1().sqrt()
        / (1.0 + 2.0 * n * w / (EPS0 * HBAR * omega2 * omega2)).sqrt()
        * scheme.d1.signum();
    let fields = (eps1 * (scheme.d1 * c) - eps3 * (scheme.d3 * s)) / w;
    let atoms = (sigma_bc * c - sigma_dc * s) * (2.0 * n / (EPS0 * omega2));
    Ok((fields + atoms) * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const N: f64 = 3e-13;

    fn case_b() -> LevelScheme {
        LevelScheme::model_atom(Variant::CaseB)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn three_level_strong_control_is_the_field() {
        let s = case_b();
        let eps1 = c(1e-10, 0.0);
        let omega2 = s.omega2_rabi(1e-3);
        let psi = dark_polariton_3(eps1, c(0.0, 0.0), omega2, N, &s).unwrap();
        assert!((psi - eps1).norm() < 1e-6 * eps1.norm());
    }

    #[test]
    fn three_level_stopped_limit_is_coherence_only() {
        let s = case_b();
        let sbc = c(0.03, 0.0);
        let psi = dark_polariton_3(c(1e-10, 0.0), sbc, 0.0, N, &s).unwrap();
        let want = sbc * (2.0 * s.omega1() * N * s.d1 / EPS0)
            / (2.0 * s.omega1() * N * s.d1 * s.d1 / EPS0).sqrt()
            * -s.d2.signum();
        assert!((psi - want).norm() < 1e-12 * want.norm());
        assert_eq!(dark_polariton_3(c(0.0, 0.0), c(0.0, 0.0), 3e-9, N, &s).unwrap(), c(0.0, 0.0));
        assert!(dark_polariton_3(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, &s).is_err());
    }

    #[test]
    fn rotate_density_matches_closed_form_from_b() {
        let s = case_b();
        let x = c(0.04, 0.01);
        let psi = [c(0.0, 0.0), c((1.0 - x.norm_sqr()).sqrt(), 0.0), x, c(0.0, 0.0)];
        let rho = DensityMatrix::from_amplitudes(psi);
        for th in [0.3, FRAC_PI_4, 2.0, PI] {
            let r = rotate_density(&rho, th, &s);
            let want = rotate_state(rho.0[B][B].re, rho.0[B][C], th);
            assert!((r.0[B][B].re - want.sigma_bb).abs() < 1e-15);
            assert!((r.0[D][D].re - want.sigma_dd).abs() < 1e-15);
            assert!((r.0[B][D].re - want.sigma_bd).abs() < 1e-15);
            assert!((r.0[B][C] - want.sigma_bc).norm() < 1e-15);
            assert!((r.0[D][C] - want.sigma_dc).norm() < 1e-15);
            assert!((r.trace() - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn case_a_rotation_moves_coherence_to_b_d() {
        let s = LevelScheme::model_atom(Variant::CaseA);
        let mut rho = DensityMatrix::pure_level(B);
        rho.0[B][C] = c(0.02, 0.0);
        rho.0[C][B] = c(0.02, 0.0);
        let r = rotate_density(&rho, FRAC_PI_2, &s);
        assert!(r.0[B][C].norm() < 1e-17);
        assert!((r.0[B][D].norm() - 0.02).abs() < 1e-15);
        assert_eq!(r.0[B][B], rho.0[B][B]);
    }

    #[test]
    fn rotation_special_angles() {
        let s0 = c(0.05, -0.01);
        let r = rotate_coherences(s0, 0.0);
        assert_eq!((r.sigma_bb, r.sigma_dd, r.sigma_bd), (1.0, 0.0, -0.0));
        assert_eq!(r.sigma_bc, s0);
        assert!(r.sigma_dc.norm() == 0.0);

        let r = rotate_coherences(s0, FRAC_PI_2);
        assert!(r.sigma_bb.abs() < 1e-30 && (r.sigma_dd - 1.0).abs() < 1e-15);
        assert!(r.sigma_bd.abs() < 1e-16 && r.sigma_bc.norm() < 1e-17);
        assert!((r.sigma_dc + s0).norm() < 1e-16);

        let r = rotate_coherences(s0, PI);
        assert!((r.sigma_bb - 1.0).abs() < 1e-15 && r.sigma_dd < 1e-30);
        assert!((r.sigma_bc + s0).norm() < 1e-16);
        assert!(r.sigma_dc.norm() < 1e-17);
    }

    #[test]
    fn mixing_special_cases() {
        let s = case_b();
        let m = mixing_matrix(0.0, N, &s).unwrap();
        assert_eq!((m.m13, m.m31, m.m33), (0.0, 0.0, -0.0));
        let want = -2.0 * N * s.omega1() * s.d1 * s.d1 / EPS0;
        assert!((m.m11 / want - 1.0).abs() < 1e-14);

        let mut sym = s;
        sym.d3 = sym.d1;
        sym.e_d = sym.e_b;
        let m = mixing_matrix(FRAC_PI_4, N, &sym).unwrap();
        assert!((m.m11 - m.m33).abs() < 1e-14 * m.m11.abs());
        assert!((m.m11 + m.m13.abs()).abs() < 1e-14 * m.m11.abs());
        assert!((m.m13 - m.m31).abs() < 1e-14 * m.m13.abs());

        let m = mixing_matrix(0.3, N, &s).unwrap();
        assert!((m.m11 * m.m33 - m.m13 * m.m31).abs() <= 1e-12 * (m.m11 * m.m33).abs());

        let a = LevelScheme::model_atom(Variant::CaseA);
        assert!(matches!(mixing_matrix(0.3, N, &a), Err(Error::InvalidVariant(_))));
    }

    #[test]
    fn velocity_limits() {
        let s = case_b();
        let omega2 = s.omega2_rabi(1.2e-9);
        assert_eq!(polariton_velocity(0.0, omega2, 0.0, &s), C_LIGHT);
        assert!((polariton_velocity(0.0, 1.0, N, &s) / C_LIGHT - 1.0).abs() < 1e-6);
        assert_eq!(polariton_velocity(0.0, 0.0, N, &s), 0.0);
        let v = polariton_velocity(0.0, omega2, N, &s);
        assert!(v > 0.0 && v < 1e-3, "v = {v:e}");
    }

    #[test]
    fn velocity_ratio_between_channels() {
        // differing d3 makes the two channels travel at different speeds
        let mut s = case_b();
        s.d3 = 1.5 * s.d1;
        let omega2 = s.omega2_rabi(1.2e-9);
        let v0 = polariton_velocity(0.0, omega2, N, &s);
        let v90 = polariton_velocity(FRAC_PI_2, omega2, N, &s);
        let k = 2.0 * N / (HBAR * EPS0 * omega2 * omega2);
        let a1 = k * s.d1 * s.d1 * s.omega1();
        let a3 = k * s.d3 * s.d3 * s.omega3();
        assert!((v0 / v90 - (1.0 + a3) / (1.0 + a1)).abs() < 1e-12);
    }

    #[test]
    fn four_level_limits() {
        let s = case_b();
        let strong = s.omega2_rabi(1.0);
        let zero = c(0.0, 0.0);
        let e1 = c(1e-10, 0.0);
        let psi = dark_polariton_4(e1, zero, zero, zero, 0.0, strong, N, &s).unwrap();
        assert!((psi - e1).norm() < 1e-9 * e1.norm());

        let e3 = c(-4e-11, 0.0);
        let psi = dark_polariton_4(zero, e3, zero, zero, -FRAC_PI_2, strong, N, &s).unwrap();
        let want = e3 * (s.omega1() / s.omega3()).sqrt() * (s.d1 * s.d3).signum();
        assert!((psi - want).norm() < 1e-9 * want.norm());
    }

    #[test]
    fn four_level_matches_three_level_at_zero_angle() {
        let s = case_b();
        for eps2 in [1e-10, 1.2e-9, 5e-9] {
            let omega2 = s.omega2_rabi(eps2);
            let e1 = c(7e-11, 0.0);
            let sbc = c(0.02, 0.0);
            let p3 = dark_polariton_3(e1, sbc, omega2, N, &s).unwrap();
            let p4 = dark_polariton_4(e1, c(0.0, 0.0), sbc, c(0.0, 0.0), 0.0, omega2, N, &s).unwrap();
            assert!((p3 - p4).norm() < 1e-10 * p3.norm(), "eps2 = {eps2:e}");
        }
    }

    #[test]
    fn four_level_storage_limit_normalisation() {
        let s = case_b();
        let theta = 0.7;
        let (sbc, sdc) = (c(0.03, 0.0), c(-0.01, 0.0));
        let tiny = s.omega2_rabi(1e-18);
        let psi = dark_polariton_4(c(0.0, 0.0), c(0.0, 0.0), sbc, sdc, theta, tiny, N, &s).unwrap();
        let want = (2.0 * N * HBAR * s.omega1() / EPS0).sqrt() * (sbc * theta.cos() - sdc * theta.sin());
        assert!((psi.norm() - want.norm()).abs() < 1e-9 * want.norm());
    }
}
