//! The complementarity quantities and their estimation from coincidence
//! probabilities.
//!
//! # Angle conventions
//!
//! Two angles appear here and they are not the same thing.
//!
//! * State-level operations (`rotate_probe`, `coincidence_probs`,
//!   `theta_zero`) take the **analyzer angle**: the polarization-plane
//!   rotation of the probe analyzer, the angle the b-coefficients are
//!   written in.
//! * The quantity curves `measured_distinguishability(theta)` and
//!   `conditioned_visibility(theta)` take the **observable angle**: the
//!   probe measurement is the projective measurement of
//!   `cos(theta) sigma_z + sin(theta) sigma_x` on the probe's Bloch sphere.
//!   Its eigenbasis is the analyzer basis at `-theta/2`.
//!
//! The doubled parameterization is what makes the maximally entangled pair
//! read `D_m = |cos theta|` and `V_c = |sin theta|`, reaching zero and one
//! respectively at 90 degrees, and it makes `(-pi/2, pi/2]` a full period
//! of both curves for every state. [`analyzer_angle`] converts an
//! observable angle into the analyzer angle that realizes it.

use serde::{Deserialize, Serialize};

use crate::error::{QeError, Result};
use crate::linalg::{Amplitude, Mat2};
use crate::scalar::Scalar;
use crate::state::{DensityOperator, PureState};

/// Analyzer rotation that realizes the which-path observable at Bloch
/// angle `theta`.
pub fn analyzer_angle<T: Scalar>(theta: T) -> T {
    let two = T::one() + T::one();
    -theta / two
}

/// Object detector basis of a coincidence measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// 0/90 degree object analyzers.
    Z,
    /// 45/135 degree object analyzers.
    X,
}

/// The four joint detection probabilities at one analyzer setting.
///
/// `theta` is the analyzer angle of the probe arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceSet<T: Scalar> {
    pub basis: Basis,
    pub theta: T,
    pub p_pp: T,
    pub p_mm: T,
    pub p_pm: T,
    pub p_mp: T,
}

impl<T: Scalar> CoincidenceSet<T> {
    pub fn new(basis: Basis, theta: T, p_pp: T, p_mm: T, p_pm: T, p_mp: T) -> Result<Self> {
        let slack = T::tol_root();
        for (name, p) in [
            ("p_pp", p_pp),
            ("p_mm", p_mm),
            ("p_pm", p_pm),
            ("p_mp", p_mp),
        ] {
            if !p.is_finite() || p < -slack || p > T::one() + slack {
                return Err(QeError::DomainError {
                    field: "probabilities",
                    message: format!("{name} = {p} outside [0, 1]"),
                });
            }
        }
        let sum = p_pp + p_mm + p_pm + p_mp;
        if (sum - T::one()).abs() > slack {
            return Err(QeError::NotNormalized {
                sum: sum.to_f64_lossy(),
            });
        }
        let clamp = |p: T| p.max(T::zero()).min(T::one());
        Ok(Self {
            basis,
            theta,
            p_pp: clamp(p_pp),
            p_mm: clamp(p_mm),
            p_pm: clamp(p_pm),
            p_mp: clamp(p_mp),
        })
    }

    fn from_amplitudes(basis: Basis, theta: T, amps: &[Amplitude<T>; 4]) -> Self {
        Self::new(
            basis,
            theta,
            amps[0].norm_sqr(),
            amps[3].norm_sqr(),
            amps[1].norm_sqr(),
            amps[2].norm_sqr(),
        )
        .expect("amplitude probabilities are normalized")
    }

    pub fn sum(&self) -> T {
        self.p_pp + self.p_mm + self.p_pm + self.p_mp
    }
}

/// Bloch decomposition of the path operator `<O+|rho|O+> - <O-|rho|O->`,
/// the Hermitian probe operator whose diagonal carries the path knowledge.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathComponents<T> {
    pub m0: T,
    pub mz: T,
    pub mx: T,
    pub my: T,
}

/// Bloch decomposition of the coherence block `<O+|rho|O->`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CoherenceComponents<T: Scalar> {
    pub b0: Amplitude<T>,
    pub bz: Amplitude<T>,
    pub bx: Amplitude<T>,
}

impl<T: Scalar> PathComponents<T> {
    fn radius(&self) -> T {
        (self.mz * self.mz + self.mx * self.mx + self.my * self.my).sqrt()
    }

    /// Diagonal projection amplitude at observable angle `theta`.
    fn swing(&self, theta: T) -> T {
        let (s, c) = theta.sin_cos();
        self.mz * c + self.mx * s
    }
}

impl<T: Scalar> CoherenceComponents<T> {
    fn swing(&self, theta: T) -> Amplitude<T> {
        let (s, c) = theta.sin_cos();
        self.bz.scale(c) + self.bx.scale(s)
    }
}

impl<T: Scalar> PureState<T> {
    pub(crate) fn path_components(&self) -> PathComponents<T> {
        let a = self.amps();
        let two = T::one() + T::one();
        let d00 = a[0].norm_sqr() - a[2].norm_sqr();
        let d11 = a[1].norm_sqr() - a[3].norm_sqr();
        let d01 = a[0] * a[1].conj() - a[2] * a[3].conj();
        PathComponents {
            m0: (d00 + d11) / two,
            mz: (d00 - d11) / two,
            mx: d01.re,
            my: -d01.im,
        }
    }

    pub(crate) fn coherence_components(&self) -> CoherenceComponents<T> {
        let a = self.amps();
        let two = T::one() + T::one();
        let b00 = a[0] * a[2].conj();
        let b01 = a[0] * a[3].conj();
        let b10 = a[1] * a[2].conj();
        let b11 = a[1] * a[3].conj();
        CoherenceComponents {
            b0: (b00 + b11).unscale(two),
            bz: (b00 - b11).unscale(two),
            bx: (b01 + b10).unscale(two),
        }
    }

    /// Path probability of the O+ branch.
    pub fn w_plus(&self) -> T {
        self.amp_pp().norm_sqr() + self.amp_pm().norm_sqr()
    }

    /// A-priori path knowledge |w+ - w-|.
    pub fn predictability(&self) -> T {
        let two = T::one() + T::one();
        (two * self.w_plus() - T::one()).abs()
    }

    /// Likelihood of the best a-priori path guess, max(w+, w-).
    pub fn likelihood(&self) -> T {
        let w = self.w_plus();
        w.max(T::one() - w)
    }

    /// Fringe visibility of the reduced object state.
    pub fn visibility(&self) -> T {
        let a = self.amps();
        let two = T::one() + T::one();
        two * (a[0] * a[2].conj() + a[1] * a[3].conj()).norm()
    }

    /// Visibility before the entangling interaction, 2 sqrt(w+ w-).
    pub fn initial_visibility(&self) -> T {
        let w = self.w_plus();
        let two = T::one() + T::one();
        two * (w * (T::one() - w)).max(T::zero()).sqrt()
    }

    /// Maximum path knowledge any probe measurement can extract: the
    /// trace-class norm of the path operator.
    pub fn distinguishability(&self) -> T {
        let m = self.path_components();
        let r = m.radius();
        (m.m0 + r).abs() + (m.m0 - r).abs()
    }

    /// Path knowledge of the probe measurement at observable angle `theta`.
    pub fn measured_distinguishability(&self, theta: T) -> T {
        let m = self.path_components();
        let g = m.swing(theta);
        (m.m0 + g).abs() + (m.m0 - g).abs()
    }

    /// Fringe visibility recovered by sorting on the probe outcome at
    /// observable angle `theta`.
    pub fn conditioned_visibility(&self, theta: T) -> T {
        let b = self.coherence_components();
        let h = b.swing(theta);
        let two = T::one() + T::one();
        two * ((b.b0 + h).norm() + (b.b0 - h).norm())
    }

    /// Overlap |<m+|m->| of the probe states conditioned on the two paths.
    /// Zero means perfect entanglement, one means none.
    pub fn entanglement_c(&self) -> Result<T> {
        let a = self.amps();
        let w_plus = self.w_plus();
        let w_minus = T::one() - w_plus;
        let floor = T::tol_construct();
        if w_plus < floor || w_minus < floor {
            return Err(QeError::DegenerateBranch {
                weight: w_plus.min(w_minus).to_f64_lossy(),
            });
        }
        let overlap = (a[0].conj() * a[2] + a[1].conj() * a[3]).norm();
        Ok((overlap / (w_plus * w_minus).sqrt()).min(T::one()))
    }

    /// The analyzer angle in (-pi/2, pi/2] at which the |O+ M-> amplitude
    /// vanishes.
    ///
    /// |b3(theta)|^2 is a quadratic form in (sin theta, cos theta); its
    /// minimum over the unit circle is the smaller eigenvalue of a real
    /// symmetric 2x2 matrix and the minimizer is the matching eigenvector,
    /// so the root is found in closed form. States whose O+ amplitudes are
    /// not phase-aligned have no root and report `NotFound`.
    pub fn theta_zero(&self) -> Result<T> {
        let a = self.amp_pp().norm_sqr();
        let b = self.amp_pm().norm_sqr();
        let cross = (self.amp_pp() * self.amp_pm().conj()).re;
        let two = T::one() + T::one();
        let mean = (a + b) / two;
        let half_gap = (a - b) / two;
        let radius = (half_gap * half_gap + cross * cross).sqrt();
        let lambda_min = mean - radius;

        let mut theta = if radius <= T::min_positive_value() {
            // Isotropic form: either identically zero or never zero.
            T::zero()
        } else {
            let v1 = (cross, lambda_min - a);
            let v2 = (lambda_min - b, cross);
            let (s, c) = if v1.0 * v1.0 + v1.1 * v1.1 >= v2.0 * v2.0 + v2.1 * v2.1 {
                v1
            } else {
                v2
            };
            s.atan2(c)
        };
        let half_pi = T::FRAC_PI_2();
        while theta > half_pi {
            theta = theta - T::PI();
        }
        while theta <= -half_pi {
            theta = theta + T::PI();
        }

        let (s, c) = theta.sin_cos();
        let residual = (self.amp_pp().scale(s) + self.amp_pm().scale(c)).norm();
        if residual > T::tol_root() {
            return Err(QeError::NotFound {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(theta)
    }

    /// Joint detection probabilities with the probe analyzer at `theta`
    /// (analyzer angle) and the object detectors in `basis`.
    pub fn coincidence_probs(&self, theta: T, basis: Basis) -> CoincidenceSet<T> {
        let rotated = self.rotate_probe(theta);
        let read = match basis {
            Basis::Z => rotated,
            Basis::X => rotated.apply_object_unitary(&Mat2::diagonal_basis()),
        };
        CoincidenceSet::from_amplitudes(basis, theta, read.amps())
    }

    /// All scalar quantities in one pass.
    pub fn quantity_report(&self) -> QuantityReport<T> {
        QuantityReport {
            p_pred: self.predictability(),
            vis: self.visibility(),
            vis0: self.initial_visibility(),
            dist: self.distinguishability(),
            c_overlap: self.entanglement_c().ok(),
            w_plus: self.w_plus(),
            likelihood: self.likelihood(),
        }
    }
}

impl<T: Scalar> DensityOperator<T> {
    fn path_operator(&self) -> Mat2<T> {
        self.object_block(0, 0).sub(&self.object_block(1, 1))
    }

    pub fn w_plus(&self) -> T {
        self.object_block(0, 0).trace().re
    }

    pub fn predictability(&self) -> T {
        let reduced = self.partial_trace_probe();
        (reduced.get(0, 0).re - reduced.get(1, 1).re).abs()
    }

    pub fn likelihood(&self) -> T {
        let w = self.w_plus();
        w.max(T::one() - w)
    }

    pub fn visibility(&self) -> T {
        let reduced = self.partial_trace_probe();
        let two = T::one() + T::one();
        two * reduced.get(0, 1).norm()
    }

    pub fn initial_visibility(&self) -> T {
        let w = self.w_plus();
        let two = T::one() + T::one();
        two * (w * (T::one() - w)).max(T::zero()).sqrt()
    }

    /// Trace-norm route: eigenvalues of the Hermitian path operator.
    pub fn distinguishability(&self) -> T {
        self.path_operator()
            .trace_norm()
            .expect("path operator of a valid density operator is Hermitian")
    }

    /// Matrix route: rotate the path operator into the analyzer basis that
    /// realizes the observable angle and sum the absolute diagonal.
    pub fn measured_distinguishability(&self, theta: T) -> T {
        let rot = Mat2::rotation(analyzer_angle(theta));
        let m = rot.mul(&self.path_operator()).mul(&rot.adjoint());
        m.get(0, 0).re.abs() + m.get(1, 1).re.abs()
    }

    pub fn conditioned_visibility(&self, theta: T) -> T {
        let rot = Mat2::rotation(analyzer_angle(theta));
        let b = rot.mul(&self.object_block(0, 1)).mul(&rot.adjoint());
        let two = T::one() + T::one();
        two * (b.get(0, 0).norm() + b.get(1, 1).norm())
    }

    /// Overlap of the conditional probe states, through the normalized
    /// block product sqrt(tr(A~ C~)). Identical to |<m+|m->| whenever the
    /// conditional blocks are pure, which holds for every state this crate
    /// prepares (object dephasing leaves them untouched).
    pub fn entanglement_c(&self) -> Result<T> {
        let a = self.object_block(0, 0);
        let c = self.object_block(1, 1);
        let wa = a.trace().re;
        let wc = c.trace().re;
        let floor = T::tol_construct();
        if wa < floor || wc < floor {
            return Err(QeError::DegenerateBranch {
                weight: wa.min(wc).to_f64_lossy(),
            });
        }
        let prod = a.mul(&c).trace().re / (wa * wc);
        Ok(prod.max(T::zero()).sqrt().min(T::one()))
    }

    pub fn coincidence_probs(&self, theta: T, basis: Basis) -> CoincidenceSet<T> {
        let probe = Mat2::rotation(theta);
        let obj = match basis {
            Basis::Z => Mat2::identity(),
            Basis::X => Mat2::diagonal_basis(),
        };
        let rotated = self.transformed(&obj, &probe);
        CoincidenceSet::new(
            basis,
            theta,
            rotated.entry(0, 0).re,
            rotated.entry(3, 3).re,
            rotated.entry(1, 1).re,
            rotated.entry(2, 2).re,
        )
        .expect("diagonal of a density operator is a probability vector")
    }

    pub fn quantity_report(&self) -> QuantityReport<T> {
        QuantityReport {
            p_pred: self.predictability(),
            vis: self.visibility(),
            vis0: self.initial_visibility(),
            dist: self.distinguishability(),
            c_overlap: self.entanglement_c().ok(),
            w_plus: self.w_plus(),
            likelihood: self.likelihood(),
        }
    }
}

/// The scalar complementarity quantities of one state.
///
/// `c_overlap` is `None` when one path branch carries no weight and the
/// conditional overlap is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityReport<T: Scalar> {
    pub p_pred: T,
    pub vis: T,
    pub vis0: T,
    pub dist: T,
    pub c_overlap: Option<T>,
    pub w_plus: T,
    pub likelihood: T,
}

impl<T: Scalar> QuantityReport<T> {
    /// Checks the internal relations every report must satisfy.
    pub fn validate(&self) -> Result<()> {
        let two = T::one() + T::one();
        let from_likelihood = two * self.likelihood - T::one();
        if (self.p_pred - from_likelihood).abs() > T::tol_construct() {
            return Err(QeError::DomainError {
                field: "likelihood",
                message: "predictability must equal 2 L - 1".into(),
            });
        }
        if self.p_pred > self.dist + T::tol_derived() {
            return Err(QeError::DomainError {
                field: "dist",
                message: "predictability exceeds distinguishability".into(),
            });
        }
        if self.vis > self.vis0 + T::tol_derived() {
            return Err(QeError::DomainError {
                field: "vis0",
                message: "visibility exceeds the initial visibility".into(),
            });
        }
        Ok(())
    }
}

/// The quantities estimated from exact coincidence probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimates<T: Scalar> {
    pub p_pred: T,
    pub d_m: T,
    pub vis: T,
    pub v_c: T,
}

/// Derives path and visibility quantities from one Z-basis and one X-basis
/// coincidence set taken at the same analyzer angle.
///
/// The groupings pair amplitudes by object branch: `p_pp` with `p_pm` for
/// the path probability, `p_pp` with `p_mp` inside the measured
/// distinguishability. On exact probabilities from an analyzer at angle
/// `phi` these reproduce the state quantities at observable angle
/// `-2 phi`.
pub fn estimate_from_probs<T: Scalar>(
    z: &CoincidenceSet<T>,
    x: &CoincidenceSet<T>,
) -> Result<ProbEstimates<T>> {
    if z.basis != Basis::Z {
        return Err(QeError::DomainError {
            field: "z",
            message: "first set must be measured in the Z object basis".into(),
        });
    }
    if x.basis != Basis::X {
        return Err(QeError::DomainError {
            field: "x",
            message: "second set must be measured in the X object basis".into(),
        });
    }
    if (z.theta - x.theta).abs() > T::tol_derived() {
        return Err(QeError::DomainError {
            field: "theta",
            message: format!(
                "analyzer angles differ: {} vs {}",
                z.theta.to_f64_lossy(),
                x.theta.to_f64_lossy()
            ),
        });
    }
    let loose = T::from_f64_lossy(1e-6);
    for set in [z, x] {
        let sum = set.sum();
        if (sum - T::one()).abs() > loose {
            return Err(QeError::NotNormalized {
                sum: sum.to_f64_lossy(),
            });
        }
    }
    Ok(ProbEstimates {
        p_pred: (z.p_pp + z.p_pm - z.p_mp - z.p_mm).abs(),
        d_m: (z.p_pp - z.p_mp).abs() + (z.p_pm - z.p_mm).abs(),
        vis: (x.p_pp - x.p_mp + x.p_pm - x.p_mm).abs(),
        v_c: (x.p_pp - x.p_mp).abs() + (x.p_pm - x.p_mm).abs(),
    })
}

/// Extracts (w+, c) from a Z-basis set taken at the zero-crossing analyzer
/// angle where the |O+ M-> rate vanishes.
pub fn estimate_w_plus_c<T: Scalar>(z: &CoincidenceSet<T>) -> Result<(T, T)> {
    if z.basis != Basis::Z {
        return Err(QeError::DomainError {
            field: "z",
            message: "zero-crossing extraction needs a Z-basis set".into(),
        });
    }
    let w_plus = z.p_pp + z.p_pm;
    let denom = T::one() - z.p_pp;
    if denom < T::tol_construct() {
        return Err(QeError::DegenerateBranch {
            weight: denom.to_f64_lossy(),
        });
    }
    let c = (z.p_mp / denom).max(T::zero()).min(T::one()).sqrt();
    Ok((w_plus, c))
}
