#![allow(dead_code)]

use nalgebra::DMatrix;
use stored_light::bloch::{rhs, step_cell_const, LocalFields};
use stored_light::density::{B, LEVELS};
use stored_light::{DensityMatrix, LevelScheme, Variant, C64};
use std::f64::consts::PI;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Hermitian matrix from 16 reals: diagonal entries, then (re, im) of each
/// upper element, row by row.
pub fn hermitian_from(v: &[f64]) -> DensityMatrix {
    let mut m = DensityMatrix::zero();
    let mut k = 0;
    for i in 0..LEVELS {
        m.0[i][i] = re(v[k]);
        k += 1;
        for j in (i + 1)..LEVELS {
            m.0[i][j] = C64::new(v[k], v[k + 1]);
            m.0[j][i] = m.0[i][j].conj();
            k += 2;
        }
    }
    m
}

/// Real 16x16 generator of the (real-linear) map sigma -> rhs(sigma) on
/// Hermitian matrices, in the basis of `hermitian_from`.
pub fn liouvillian(f: &LocalFields, sch: &LevelScheme) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(16, 16);
    for col in 0..16 {
        let mut v = [0.0; 16];
        v[col] = 1.0;
        let out = rhs(&hermitian_from(&v), f, sch);
        l.set_column(col, &DMatrix::from_column_slice(16, 1, &to_vec(&out)).column(0));
    }
    l
}

pub fn to_vec(m: &DensityMatrix) -> Vec<f64> {
    let mut v = Vec::with_capacity(16);
    for i in 0..LEVELS {
        v.push(m.0[i][i].re);
        for j in (i + 1)..LEVELS {
            v.push(m.0[i][j].re);
            v.push(m.0[i][j].im);
        }
    }
    v
}

pub fn constant_fields(variant: Variant) -> (LevelScheme, LocalFields, f64) {
    let sch = LevelScheme::model_atom(variant);
    let f = match variant {
        Variant::CaseB => LocalFields {
            eps1: re(1e-9),
            eps3: re(-0.6e-9),
            omega2: sch.omega2_rabi(1.2e-9),
            ctrl4: 2e-9,
        },
        Variant::CaseA => LocalFields {
            eps1: re(1e-9),
            eps3: re(0.0),
            omega2: sch.omega2_rabi(1.2e-9),
            ctrl4: 2e-8,
        },
    };
    let rates = [
        (f.eps1.norm() * sch.d1),
        f.omega2,
        (f.eps3.norm() * sch.d3),
        match variant {
            Variant::CaseB => f.ctrl4,
            Variant::CaseA => f.ctrl4 * sch.d4,
        },
    ];
    let omega = rates.iter().map(|r| r * r).sum::<f64>().sqrt();
    (sch, f, 2.0 * PI / omega)
}

pub fn expm_error(variant: Variant, steps: usize) -> f64 {
    let (sch, f, period) = constant_fields(variant);
    let t = 3.0 * period;
    let dt = t / steps as f64;
    let s0 = DensityMatrix::pure_level(B);
    let mut s = s0;
    for _ in 0..steps {
        s = step_cell_const(&s, &f, dt, &sch).unwrap();
    }
    let exact = (liouvillian(&f, &sch) * t).exp() * DMatrix::from_column_slice(16, 1, &to_vec(&s0));
    let got = to_vec(&s);
    (0..16).map(|k| (got[k] - exact[k]).abs()).fold(0.0, f64::max)
}

