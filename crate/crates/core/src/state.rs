//! The two state representations of the object-probe pair.
//!
//! Basis ordering is object-major throughout: (O+M+, O+M-, O-M+, O-M-).
//! With this ordering the 4x4 density operator splits into contiguous 2x2
//! probe-space blocks `<O_i| rho |O_j>`, and the partial trace over the
//! probe is a block-trace.

use crate::error::{QeError, Result};
use crate::linalg::{herm4_eigenvalues, Amplitude, Mat2, ObjectOperator, ProbeOperator};
use crate::scalar::Scalar;

/// Squared norm below which a filtered state counts as fully absorbed.
const ABSORBED_NORM: f64 = 1e-14;

/// A normalized pure state of the object-probe pair, stored as the four
/// complex coefficients of (|O+M+>, |O+M->, |O-M+>, |O-M->).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState<T: Scalar> {
    amps: [Amplitude<T>; 4],
}

impl<T: Scalar> PureState<T> {
    /// Builds a state from its four amplitudes, checking finiteness and
    /// unit norm.
    pub fn new(amps: [Amplitude<T>; 4]) -> Result<Self> {
        for (i, a) in amps.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(QeError::DomainError {
                    field: "amps",
                    message: format!("amplitude {i} is not finite"),
                });
            }
        }
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - T::one()).abs() > T::tol_construct() {
            return Err(QeError::DomainError {
                field: "amps",
                message: format!("squared norm is {norm_sqr}, expected 1"),
            });
        }
        Ok(Self { amps })
    }

    /// Normalizes an amplitude vector, returning the state together with the
    /// squared norm it had before normalization.
    pub fn from_unnormalized(amps: [Amplitude<T>; 4]) -> Result<(Self, T)> {
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < T::from_f64_lossy(ABSORBED_NORM) {
            return Err(QeError::ZeroNorm {
                norm: norm_sqr.sqrt().to_f64_lossy(),
            });
        }
        let inv = T::one() / norm_sqr.sqrt();
        let mut out = amps;
        for a in out.iter_mut() {
            *a = a.scale(inv);
        }
        Ok((Self { amps: out }, norm_sqr))
    }

    /// The product basis state with the given index in the fixed ordering.
    pub fn basis_state(index: usize) -> Self {
        assert!(index < 4, "basis index must be 0..4");
        let mut amps = [Amplitude::default(); 4];
        amps[index] = Amplitude::new(T::one(), T::zero());
        Self { amps }
    }

    pub fn amps(&self) -> &[Amplitude<T>; 4] {
        &self.amps
    }

    /// Coefficient of |O+M+>.
    pub fn amp_pp(&self) -> Amplitude<T> {
        self.amps[0]
    }

    /// Coefficient of |O+M->.
    pub fn amp_pm(&self) -> Amplitude<T> {
        self.amps[1]
    }

    /// Coefficient of |O-M+>.
    pub fn amp_mp(&self) -> Amplitude<T> {
        self.amps[2]
    }

    /// Coefficient of |O-M->.
    pub fn amp_mm(&self) -> Amplitude<T> {
        self.amps[3]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// The rank-1 density operator |psi><psi|.
    pub fn to_density(&self) -> DensityOperator<T> {
        let mut m = [[Amplitude::default(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityOperator { m }
    }

    /// Applies a (generally non-unitary) filter to the object factor,
    /// renormalizes, and reports the post-selection probability.
    ///
    /// The operator must be a physical filter: both singular values at
    /// most 1. The success probability is clamped to [0, 1] against
    /// rounding.
    pub fn apply_object(&self, op: &ObjectOperator<T>) -> Result<(Self, T)> {
        debug_assert!(
            op.singular_values().0 <= T::one() + T::tol_derived(),
            "object filter must be a contraction"
        );
        let plus = op.apply([self.amps[0], self.amps[2]]);
        let minus = op.apply([self.amps[1], self.amps[3]]);
        let filtered = [plus[0], minus[0], plus[1], minus[1]];
        let (state, norm_sqr) = Self::from_unnormalized(filtered)?;
        Ok((state, norm_sqr.min(T::one()).max(T::zero())))
    }

    /// Applies a unitary to the probe factor.
    pub(crate) fn apply_probe_unitary(&self, op: &ProbeOperator<T>) -> Self {
        let plus = op.apply([self.amps[0], self.amps[1]]);
        let minus = op.apply([self.amps[2], self.amps[3]]);
        Self {
            amps: [plus[0], plus[1], minus[0], minus[1]],
        }
    }

    /// Applies a unitary to the object factor.
    pub(crate) fn apply_object_unitary(&self, op: &ObjectOperator<T>) -> Self {
        let m_plus = op.apply([self.amps[0], self.amps[2]]);
        let m_minus = op.apply([self.amps[1], self.amps[3]]);
        Self {
            amps: [m_plus[0], m_minus[0], m_plus[1], m_minus[1]],
        }
    }

    /// Re-expresses the amplitudes in the probe analyzer basis rotated by
    /// `theta` (the polarization-plane rotation angle of the analyzer).
    pub fn rotate_probe(&self, theta: T) -> Self {
        self.apply_probe_unitary(&Mat2::rotation(theta))
    }
}

/// A 4x4 Hermitian, unit-trace, positive semidefinite operator over the
/// object-probe basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOperator<T: Scalar> {
    m: [[Amplitude<T>; 4]; 4],
}

impl<T: Scalar> DensityOperator<T> {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness.
    pub fn new(m: [[Amplitude<T>; 4]; 4]) -> Result<Self> {
        let mut asym = T::zero();
        for (i, row) in m.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let defect = (*cell - m[j][i].conj()).norm();
                asym = asym.max(defect);
            }
        }
        if asym > T::tol_construct() {
            return Err(QeError::NotHermitian {
                asymmetry: asym.to_f64_lossy(),
            });
        }
        let trace: T = (0..4).map(|i| m[i][i].re).sum();
        if (trace - T::one()).abs() > T::tol_construct() {
            return Err(QeError::DomainError {
                field: "m",
                message: format!("trace is {trace}, expected 1"),
            });
        }
        let min_eig = herm4_eigenvalues(&m)[0];
        if min_eig < -T::tol_derived() {
            return Err(QeError::DomainError {
                field: "m",
                message: format!("operator is not positive semidefinite (min eigenvalue {min_eig})"),
            });
        }
        Ok(Self { m })
    }

    /// Internal constructor for operators that are valid by construction.
    pub(crate) fn from_parts_unchecked(m: [[Amplitude<T>; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn from_pure(state: &PureState<T>) -> Self {
        state.to_density()
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude<T> {
        self.m[row][col]
    }

    pub fn matrix(&self) -> &[[Amplitude<T>; 4]; 4] {
        &self.m
    }

    pub fn trace(&self) -> T {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 4] {
        herm4_eigenvalues(&self.m)
    }

    /// The probe-space block `<O_bra| rho |O_ket>` (bra, ket in {0, 1} for
    /// O+, O-).
    pub fn object_block(&self, bra: usize, ket: usize) -> Mat2<T> {
        assert!(bra < 2 && ket < 2);
        let r = 2 * bra;
        let c = 2 * ket;
        Mat2::new([
            [self.m[r][c], self.m[r][c + 1]],
            [self.m[r + 1][c], self.m[r + 1][c + 1]],
        ])
    }

    /// Reduced object operator: trace over the probe factor.
    pub fn partial_trace_probe(&self) -> Mat2<T> {
        let mut out = [[Amplitude::default(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[2 * i][2 * j] + self.m[2 * i + 1][2 * j + 1];
            }
        }
        Mat2::new(out)
    }

    /// Conjugates by the product unitary `obj (x) probe`.
    pub(crate) fn transformed(&self, obj: &Mat2<T>, probe: &Mat2<T>) -> Self {
        let mut u = [[Amplitude::<T>::default(); 4]; 4];
        for oi in 0..2 {
            for oj in 0..2 {
                for pi in 0..2 {
                    for pj in 0..2 {
                        u[2 * oi + pi][2 * oj + pj] = obj.get(oi, oj) * probe.get(pi, pj);
                    }
                }
            }
        }
        let mut tmp = [[Amplitude::<T>::default(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Amplitude::<T>::default();
                for (k, row) in self.m.iter().enumerate() {
                    acc = acc + u[i][k] * row[j];
                }
                tmp[i][j] = acc;
            }
        }
        let mut out = [[Amplitude::<T>::default(); 4]; 4];
        for i in 0..4 {
            for (j, ucol) in u.iter().enumerate() {
                let mut acc = Amplitude::<T>::default();
                for k in 0..4 {
                    acc = acc + tmp[i][k] * ucol[k].conj();
                }
                out[i][j] = acc;
            }
        }
        Self { m: out }
    }
}
