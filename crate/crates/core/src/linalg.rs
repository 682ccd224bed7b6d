//! Small dense complex linear algebra: 2x2 operators on one polarization
//! mode and eigenvalue helpers for validating 4x4 density operators.

use num_complex::Complex;

use crate::error::{QeError, Result};
use crate::scalar::Scalar;

/// Complex probability amplitude over the chosen real scalar.
pub type Amplitude<T> = Complex<T>;

/// A 2x2 complex operator acting on a single polarization factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Scalar> {
    m: [[Amplitude<T>; 2]; 2],
}

/// Operator acting on the object factor.
pub type ObjectOperator<T> = Mat2<T>;
/// Operator acting on the probe factor.
pub type ProbeOperator<T> = Mat2<T>;

impl<T: Scalar> Mat2<T> {
    pub fn new(m: [[Amplitude<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[Amplitude::default(); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn diag(a: T, b: T) -> Self {
        let zero = Amplitude::default();
        Self::new([
            [Amplitude::new(a, T::zero()), zero],
            [zero, Amplitude::new(b, T::zero())],
        ])
    }

    /// Counter-clockwise rotation by `angle`: [[cos, -sin], [sin, cos]].
    pub fn rotation(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let zero = T::zero();
        Self::new([
            [Amplitude::new(c, zero), Amplitude::new(-s, zero)],
            [Amplitude::new(s, zero), Amplitude::new(c, zero)],
        ])
    }

    /// The object-basis change onto the diagonal (+45/-45 degree) detector
    /// pair: the real Hadamard matrix.
    pub fn diagonal_basis() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let zero = T::zero();
        Self::new([
            [Amplitude::new(h, zero), Amplitude::new(h, zero)],
            [Amplitude::new(h, zero), Amplitude::new(-h, zero)],
        ])
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude<T> {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[Amplitude::default(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.m;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = *cell - rhs.m[i][j];
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, factor: T) -> Self {
        let mut out = self.m;
        for row in out.iter_mut() {
            for cell in row.iter_mut() {
                *cell = cell.scale(factor);
            }
        }
        Self::new(out)
    }

    pub fn trace(&self) -> Amplitude<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// Apply to a column of two amplitudes.
    pub fn apply(&self, v: [Amplitude<T>; 2]) -> [Amplitude<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> T {
        let cross = (self.m[0][1] - self.m[1][0].conj()).norm();
        let d0 = self.m[0][0].im.abs();
        let d1 = self.m[1][1].im.abs();
        cross.max(d0).max(d1)
    }

    /// Eigenvalues of a Hermitian 2x2 matrix, in descending order.
    ///
    /// Fails with `NotHermitian` when the asymmetry exceeds the derived
    /// tolerance.
    pub fn herm_eigenvalues(&self) -> Result<(T, T)> {
        let defect = self.hermiticity_defect();
        if defect > T::tol_derived() {
            return Err(QeError::NotHermitian {
                asymmetry: defect.to_f64_lossy(),
            });
        }
        let two = T::one() + T::one();
        let mean = (self.m[0][0].re + self.m[1][1].re) / two;
        let half_gap = (self.m[0][0].re - self.m[1][1].re) / two;
        // Symmetrized off-diagonal element, robust to tolerated asymmetry.
        let off = (self.m[0][1] + self.m[1][0].conj()).scale(T::one() / two);
        let radius = (half_gap * half_gap + off.norm_sqr()).sqrt();
        Ok((mean + radius, mean - radius))
    }

    /// Trace-class norm |l1| + |l2| of a Hermitian matrix.
    pub fn trace_norm(&self) -> Result<T> {
        let (l1, l2) = self.herm_eigenvalues()?;
        Ok(l1.abs() + l2.abs())
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> (T, T) {
        let gram = self.adjoint().mul(self);
        let two = T::one() + T::one();
        let mean = (gram.m[0][0].re + gram.m[1][1].re) / two;
        let half_gap = (gram.m[0][0].re - gram.m[1][1].re) / two;
        let radius = (half_gap * half_gap + gram.m[0][1].norm_sqr()).sqrt();
        let hi = (mean + radius).max(T::zero());
        let lo = (mean - radius).max(T::zero());
        (hi.sqrt(), lo.sqrt())
    }
}

/// Trace-class norm of a Hermitian 2x2 operator.
pub fn trace_norm_2x2<T: Scalar>(h: &Mat2<T>) -> Result<T> {
    h.trace_norm()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// unsorted. Used for validating density operators; the matrices are tiny,
/// so robustness beats speed.
fn jacobi_eigenvalues<T: Scalar, const N: usize>(mut a: [[T; N]; N]) -> [T; N] {
    let mut scale = T::zero();
    for row in &a {
        for &x in row {
            scale = scale + x * x;
        }
    }
    let stop = scale * T::epsilon() * T::epsilon();

    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= T::min_positive_value() {
                    continue;
                }
                let two = T::one() + T::one();
                let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
                let t = {
                    let abs_t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -abs_t
                    } else {
                        abs_t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut out = [T::zero(); N];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = a[i][i];
    }
    out
}

/// Eigenvalues of a 4x4 complex Hermitian matrix, ascending.
///
/// Works through the standard real embedding [[X, -Y], [Y, X]] whose
/// spectrum is that of the complex matrix with every eigenvalue doubled.
pub(crate) fn herm4_eigenvalues<T: Scalar>(m: &[[Amplitude<T>; 4]; 4]) -> [T; 4] {
    let mut embed = [[T::zero(); 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            embed[i][j] = m[i][j].re;
            embed[i + 4][j + 4] = m[i][j].re;
            embed[i][j + 4] = -m[i][j].im;
            embed[i + 4][j] = m[i][j].im;
        }
    }
    let mut all = jacobi_eigenvalues(embed);
    all.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    [all[0], all[2], all[4], all[6]]
}
