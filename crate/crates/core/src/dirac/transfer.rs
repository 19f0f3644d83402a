use super::SpinorSample;

/// The SO(2) rotation `A(a) = [[cos a, -sin a], [sin a, cos a]]` carrying
/// `(F⁻, G⁻)` to `(F⁺, G⁺)` across the shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    angle: f64,
    entries: [[f64; 2]; 2],
}

pub fn transfer_matrix(a: f64) -> TransferMatrix {
    let (s, c) = a.sin_cos();
    TransferMatrix {
        angle: a,
        entries: [[c, -s], [s, c]],
    }
}

pub fn apply_transfer(m: &TransferMatrix, s: &SpinorSample) -> SpinorSample {
    let [[a, b], [c, d]] = m.entries;
    SpinorSample::new(s.r, a * s.f + b * s.g, c * s.f + d * s.g)
}

impl TransferMatrix {
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn determinant(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn transpose(&self) -> TransferMatrix {
        let [[a, b], [c, d]] = self.entries;
        TransferMatrix {
            angle: -self.angle,
            entries: [[a, c], [b, d]],
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &TransferMatrix) -> TransferMatrix {
        let x = self.entries;
        let y = other.entries;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        TransferMatrix {
            angle: self.angle + other.angle,
            entries: out,
        }
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `AᵀA` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose().compose(self);
        let identity = transfer_matrix(0.0);
        p.max_abs_diff(&identity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identity_at_zero() {
        let a = transfer_matrix(0.0);
        assert_eq!(a.entries(), [[1.0, 0.0], [0.0, 1.0]]);
        let s = SpinorSample::new(1.0, 0.3, -0.7);
        assert_eq!(apply_transfer(&a, &s), s);
    }

    #[test]
    fn quarter_turn() {
        let a = transfer_matrix(FRAC_PI_2);
        let want = [[0.0, -1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.entries()[i][j] - want[i][j]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn unit_determinant() {
        for a in [0.3, 1.0, 2.5] {
            assert!((transfer_matrix(a).determinant() - 1.0).abs() < 1e-14);
            assert!(transfer_matrix(a).orthogonality_defect() < 1e-14);
        }
    }
}
