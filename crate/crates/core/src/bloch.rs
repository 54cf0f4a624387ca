//! Density-matrix evolution of a single atom (rotating frame, resonant fields).
//!
//! Field convention: the complex signal envelope `eps_j` multiplies the
//! lowering element, H_ba = -d1 eps1 / 2 and H_da = -d3 eps3 / 2, so that the
//! propagation source is sigma_ba (resp. sigma_da). For real envelopes this
//! reduces term by term to the textbook equations for the four-level scheme.

use crate::density::{DensityMatrix, A, B, C, C64, D, LEVELS};
use crate::error::{Error, Result};
use crate::scheme::{LevelScheme, Variant};
use crate::units::HBAR;

/// Field values seen by one atom at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalFields {
    pub eps1: C64,
    pub eps3: C64,
    /// Control Rabi frequency, -eps2 d2 / hbar.
    pub omega2: f64,
    /// Control 4 amplitude: U in case (b), eps4 in case (a).
    pub ctrl4: f64,
}

/// Maximum trace change tolerated in one step before the run is aborted.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

/// Time derivative for case (b): signal 1 on b-a, signal 3 on d-a, control 2
/// on c-a and the imaginary effective coupling iU between b and d.
pub fn rhs_case_b(s: &DensityMatrix, f: &LocalFields, scheme: &LevelScheme) -> DensityMatrix {
    let sg = &s.0;
    // Hamiltonian elements (hbar units): h_ba = g1, h_ab = g1*, etc.
    let g1 = f.eps1 * (-0.5 * scheme.d1 / HBAR);
    let g2 = 0.5 * f.omega2;
    let g3 = f.eps3 * (-0.5 * scheme.d3 / HBAR);
    let u = C64::new(0.0, 0.5 * f.ctrl4 / HBAR);
    let (g1c, g3c, uc) = (g1.conj(), g3.conj(), u.conj());

    let (aa, bb, cc, dd) = (sg[A][A], sg[B][B], sg[C][C], sg[D][D]);
    let (ab, ac, ad) = (sg[A][B], sg[A][C], sg[A][D]);
    let (ba, ca, da) = (sg[B][A], sg[C][A], sg[D][A]);
    let (bc, bd, cd) = (sg[B][C], sg[B][D], sg[C][D]);
    let (cb, db, dc) = (sg[C][B], sg[D][B], sg[D][C]);

    // i d/dt sigma_ij
    let i_aa = g1c * ba - ab * g1 + g2 * (ca - ac) + g3c * da - ad * g3;
    let i_bb = g1 * ab - ba * g1c + u * db - bd * uc;
    let i_cc = g2 * (ac - ca);
    let i_dd = g3 * ad - da * g3c + uc * bd - db * u;
    let i_ab = g1c * (bb - aa) + g2 * cb + g3c * db - ad * uc;
    let i_ac = g1c * bc + g2 * (cc - aa) + g3c * dc;
    let i_ad = g1c * bd + g2 * cd + g3c * (dd - aa) - ab * u;
    let i_bc = g1 * ac + u * dc - ba * g2;
    let i_bd = g1 * ad + u * dd - ba * g3c - bb * u;
    let i_cd = g2 * ad - ca * g3c - cb * u;

    let mut out = DensityMatrix::zero();
    let o = &mut out.0;
    o[A][A] = -I * i_aa;
    o[B][B] = -I * i_bb;
    o[C][C] = -I * i_cc;
    o[D][D] = -I * i_dd;
    o[A][B] = -I * i_ab;
    o[A][C] = -I * i_ac;
    o[A][D] = -I * i_ad;
    o[B][C] = -I * i_bc;
    o[B][D] = -I * i_bd;
    o[C][D] = -I * i_cd;
    add_relaxation(s, scheme, &mut out);
    fill_lower(&mut out);
    out
}

/// Time derivative for case (a): signal 1 on b-a, control 2 on c-a and the
/// electric-dipole field 4 on c-d, from -i[H, sigma] with the rotating-wave
/// Hamiltonian of V = -d (eps1 cos phi1 + eps2 cos phi2 + eps4 cos phi4).
pub fn rhs_case_a(s: &DensityMatrix, f: &LocalFields, scheme: &LevelScheme) -> DensityMatrix {
    let h = hamiltonian(f, scheme, Variant::CaseA);
    let mut out = commutator_rhs(&h, s);
    add_relaxation(s, scheme, &mut out);
    out
}

pub fn rhs(s: &DensityMatrix, f: &LocalFields, scheme: &LevelScheme) -> DensityMatrix {
    match scheme.variant {
        Variant::CaseA => rhs_case_a(s, f, scheme),
        Variant::CaseB => rhs_case_b(s, f, scheme),
    }
}

/// Interaction Hamiltonian (in units of hbar) for the given coupling variant.
pub fn hamiltonian(f: &LocalFields, scheme: &LevelScheme, variant: Variant) -> [[C64; LEVELS]; LEVELS] {
    let zero = C64::new(0.0, 0.0);
    let mut h = [[zero; LEVELS]; LEVELS];
    let g1 = f.eps1 * (-0.5 * scheme.d1 / HBAR);
    h[B][A] = g1;
    h[A][B] = g1.conj();
    h[A][C] = C64::new(0.5 * f.omega2, 0.0);
    h[C][A] = h[A][C];
    match variant {
        Variant::CaseA => {
            let g4 = C64::new(-0.5 * f.ctrl4 * scheme.d4 / HBAR, 0.0);
            h[C][D] = g4;
            h[D][C] = g4;
        }
        Variant::CaseB => {
            let g3 = f.eps3 * (-0.5 * scheme.d3 / HBAR);
            h[D][A] = g3;
            h[A][D] = g3.conj();
            h[B][D] = C64::new(0.0, 0.5 * f.ctrl4 / HBAR);
            h[D][B] = h[B][D].conj();
        }
    }
    h
}

/// -i [H, sigma]
pub fn commutator_rhs(h: &[[C64; LEVELS]; LEVELS], s: &DensityMatrix) -> DensityMatrix {
    let mut out = DensityMatrix::zero();
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..LEVELS {
                acc += h[i][k] * s.0[k][j] - s.0[i][k] * h[k][j];
            }
            out.0[i][j] = -I * acc;
        }
    }
    out
}

/// Spontaneous decay of |a> into b, c, d; the a-coherences decay at half the total rate.
fn add_relaxation(s: &DensityMatrix, scheme: &LevelScheme, out: &mut DensityMatrix) {
    let g = scheme.gamma_total();
    let aa = s.0[A][A];
    out.0[A][A] -= aa * g;
    out.0[B][B] += aa * scheme.gamma_ab;
    out.0[C][C] += aa * scheme.gamma_ac;
    out.0[D][D] += aa * scheme.gamma_ad;
    for j in [B, C, D] {
        out.0[A][j] -= s.0[A][j] * (0.5 * g);
        out.0[j][A] -= s.0[j][A] * (0.5 * g);
    }
}

fn fill_lower(m: &mut DensityMatrix) {
    for i in 0..LEVELS {
        for j in (i + 1)..LEVELS {
            m.0[j][i] = m.0[i][j].conj();
        }
    }
}

/// One classical RK4 step of a single cell. `fields(t)` is sampled at the
/// stage times t, t + dt/2 and t + dt. The result is re-Hermitized.
pub fn step_cell<F>(s: &DensityMatrix, fields: F, t: f64, dt: f64, scheme: &LevelScheme) -> Result<DensityMatrix>
where
    F: Fn(f64) -> LocalFields,
{
    if dt == 0.0 {
        return Ok(*s);
    }
    let f0 = fields(t);
    let fh = fields(t + 0.5 * dt);
    let f1 = fields(t + dt);
    let k1 = rhs(s, &f0, scheme);
    let k2 = rhs(&s.axpy(0.5 * dt, &k1), &fh, scheme);
    let k3 = rhs(&s.axpy(0.5 * dt, &k2), &fh, scheme);
    let k4 = rhs(&s.axpy(dt, &k3), &f1, scheme);
    let mut next = rk4_combine(s, dt, &k1, &k2, &k3, &k4);
    next.hermitize();
    check_step(s, &next, t + dt, 0)?;
    Ok(next)
}

/// Step with fields held constant.
pub fn step_cell_const(s: &DensityMatrix, f: &LocalFields, dt: f64, scheme: &LevelScheme) -> Result<DensityMatrix> {
    step_cell(s, |_| *f, 0.0, dt, scheme)
}

#[inline]
pub(crate) fn rk4_combine(
    s: &DensityMatrix,
    dt: f64,
    k1: &DensityMatrix,
    k2: &DensityMatrix,
    k3: &DensityMatrix,
    k4: &DensityMatrix,
) -> DensityMatrix {
    let mut next = *s;
    let w = dt / 6.0;
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            next.0[i][j] += (k1.0[i][j] + (k2.0[i][j] + k3.0[i][j]) * 2.0 + k4.0[i][j]) * w;
        }
    }
    next
}

pub(crate) fn check_step(prev: &DensityMatrix, next: &DensityMatrix, t_prime: f64, cell: usize) -> Result<()> {
    if !next.is_finite() {
        return Err(Error::NumericalFailure {
            t_prime,
            cell,
            reason: "non-finite density matrix".into(),
        });
    }
    let drift = (next.trace() - prev.trace()).norm();
    if drift > TRACE_DRIFT_LIMIT {
        return Err(Error::NumericalFailure {
            t_prime,
            cell,
            reason: format!("trace drift {drift:e} in one step"),
        });
    }
    Ok(())
}
