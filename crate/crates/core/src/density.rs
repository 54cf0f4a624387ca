//! 4x4 density matrix in the slowly varying frame.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

pub const LEVELS: usize = 4;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[C64; LEVELS]; LEVELS]);

impl Default for DensityMatrix {
    fn default() -> Self {
        Self::zero()
    }
}

impl DensityMatrix {
    pub fn zero() -> Self {
        DensityMatrix([[ZERO; LEVELS]; LEVELS])
    }

    /// |i><i|
    pub fn pure_level(i: usize) -> Self {
        let mut m = Self::zero();
        m.0[i][i] = C64::new(1.0, 0.0);
        m
    }

    /// |psi><psi| for a (not necessarily normalised) amplitude vector.
    pub fn from_amplitudes(psi: [C64; LEVELS]) -> Self {
        let mut m = Self::zero();
        for i in 0..LEVELS {
            for j in 0..LEVELS {
                m.0[i][j] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..LEVELS).map(|i| self.0[i][i]).sum()
    }

    /// tr(sigma^2)
    pub fn purity(&self) -> f64 {
        let mut p = ZERO;
        for i in 0..LEVELS {
            for j in 0..LEVELS {
                p += self.0[i][j] * self.0[j][i];
            }
        }
        p.re
    }

    /// max |sigma_ij - conj(sigma_ji)|
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..LEVELS {
            for j in i..LEVELS {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Replace by (sigma + sigma^dagger) / 2.
    pub fn hermitize(&mut self) {
        for i in 0..LEVELS {
            self.0[i][i].im = 0.0;
            for j in (i + 1)..LEVELS {
                let avg = 0.5 * (self.0[i][j] + self.0[j][i].conj());
                self.0[i][j] = avg;
                self.0[j][i] = avg.conj();
            }
        }
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..LEVELS {
            for j in 0..LEVELS {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// self + k * other
    #[inline]
    pub fn axpy(&self, k: f64, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..LEVELS {
            for j in 0..LEVELS {
                m.0[i][j] += other.0[i][j] * k;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..LEVELS {
            for j in 0..LEVELS {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0[i][i].re
    }
}

impl Index<(usize, usize)> for DensityMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for DensityMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}
