/// Plain 2×2 real matrix, row major.
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[inline]
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

#[inline]
pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Spectral norm.
pub fn op_norm(a: &Mat2) -> f64 {
    let fro2 = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
    let d = det(a).abs();
    // σ_max² = (‖A‖_F² + sqrt(‖A‖_F⁴ − 4 det²)) / 2
    let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0);
    ((fro2 + disc.sqrt()) / 2.0).sqrt()
}

/// Rotation by `turns` full turns.
pub fn rotation(turns: f64) -> Mat2 {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    [[c, -s], [s, c]]
}

/// A 2×2 matrix stored as `e^{log_scale} · unit_part`, where the largest
/// entry of `unit_part` has magnitude in [2^{-1/2}, 2^{1/2}].
///
/// Rescaling is by exact powers of two, so the unit part carries no extra
/// rounding from normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMat2 {
    pub unit_part: Mat2,
    pub log_scale: f64,
}

impl ScaledMat2 {
    pub fn identity() -> Self {
        Self { unit_part: IDENTITY, log_scale: 0.0 }
    }

    pub fn from_matrix(m: Mat2) -> Self {
        let mut s = Self { unit_part: m, log_scale: 0.0 };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let max = self.unit_part.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if max == 0.0 || !max.is_finite() {
            return;
        }
        let e = max.log2().round() as i32;
        if e != 0 {
            let f = 2f64.powi(-e);
            for v in self.unit_part.iter_mut().flatten() {
                *v *= f;
            }
            self.log_scale += e as f64 * std::f64::consts::LN_2;
        }
    }

    /// `m · self`, renormalized.
    #[inline]
    pub fn left_mul(&self, m: &Mat2) -> Self {
        let mut out = Self { unit_part: mat_mul(m, &self.unit_part), log_scale: self.log_scale };
        out.normalize();
        out
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out =
            Self { unit_part: mat_mul(&self.unit_part, &other.unit_part), log_scale: self.log_scale + other.log_scale };
        out.normalize();
        out
    }

    /// The represented matrix; overflows to ±∞ for large scales.
    pub fn to_matrix(&self) -> Mat2 {
        let f = self.log_scale.exp();
        let u = &self.unit_part;
        [[u[0][0] * f, u[0][1] * f], [u[1][0] * f, u[1][1] * f]]
    }

    /// ln of the spectral norm of the represented matrix.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + op_norm(&self.unit_part).ln()
    }

    /// Determinant of the represented matrix.
    pub fn det(&self) -> f64 {
        det(&self.unit_part) * (2.0 * self.log_scale).exp()
    }

    pub fn trace(&self) -> f64 {
        (self.unit_part[0][0] + self.unit_part[1][1]) * self.log_scale.exp()
    }

    /// Largest entrywise relative difference between two represented matrices,
    /// measured against the larger norm.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        let s = self.log_scale.max(other.log_scale);
        let a = self.unit_part;
        let b = other.unit_part;
        let fa = (self.log_scale - s).exp();
        let fb = (other.log_scale - s).exp();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((a[i][j] * fa - b[i][j] * fb).abs());
            }
        }
        let scale = (op_norm(&a) * fa).max(op_norm(&b) * fb);
        worst / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_keeps_the_represented_matrix() {
        let m = [[1e10, -3.0], [7.5e9, 2e-3]];
        let s = ScaledMat2::from_matrix(m);
        let max = s.unit_part.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!((0.5..=2.0).contains(&max));
        let back = s.to_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[i][j] - m[i][j]).abs() <= 1e-14 * m[i][j].abs());
            }
        }
    }

    #[test]
    fn operator_norm_of_diagonal_and_rotation() {
        assert!((op_norm(&[[3.0, 0.0], [0.0, 1.0 / 3.0]]) - 3.0).abs() < 1e-15);
        assert!((op_norm(&rotation(0.17)) - 1.0).abs() < 1e-15);
    }
}
