//! State preparation: the singlet source, the canonical partially entangled
//! family, the partial-polarizer filter, and the glass-plate transmittivity
//! model.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QeError, Result};
use crate::linalg::{Amplitude, Mat2, ObjectOperator};
use crate::scalar::Scalar;
use crate::state::PureState;

/// Amplitude attenuation per Brewster-angle glass plate fitted from the two
/// published stack calibrations (10 plates -> t = 0.200, 7 -> t = 0.324).
/// A model default, overridable in [`PlateStack::new`].
pub const PLATE_FACTOR_DEFAULT: f64 = 0.8513;

/// The polarization singlet (|O+M+> - |O-M->) / sqrt(2).
pub fn singlet<T: Scalar>() -> PureState<T> {
    let h = T::FRAC_1_SQRT_2();
    let zero = T::zero();
    PureState::new([
        Amplitude::new(h, zero),
        Amplitude::default(),
        Amplitude::default(),
        Amplitude::new(-h, zero),
    ])
    .expect("singlet is normalized")
}

/// The canonical partially entangled state
/// sqrt(w+)|O+M+> + e^{i phi} c sqrt(w-)|O-M+> + e^{i phi} sqrt(w-(1-c^2))|O-M->.
///
/// `w_plus` is the path probability of O+, `c` the overlap of the two
/// conditional probe states, and `phi` the preparation phase (it rotates the
/// fringe but leaves every magnitude-valued quantity unchanged).
pub fn canonical<T: Scalar>(w_plus: T, phi: T, c: T) -> Result<PureState<T>> {
    if !(T::zero()..=T::one()).contains(&w_plus) || !w_plus.is_finite() {
        return Err(QeError::DomainError {
            field: "w_plus",
            message: format!("{w_plus} outside [0, 1]"),
        });
    }
    if !(T::zero()..=T::one()).contains(&c) || !c.is_finite() {
        return Err(QeError::DomainError {
            field: "c",
            message: format!("{c} outside [0, 1]"),
        });
    }
    let w_minus = T::one() - w_plus;
    let phase = Complex::from_polar(T::one(), phi);
    let amps = [
        Amplitude::new(w_plus.sqrt(), T::zero()),
        Amplitude::default(),
        phase.scale(c * w_minus.sqrt()),
        phase.scale((w_minus * (T::one() - c * c)).max(T::zero()).sqrt()),
    ];
    let (state, _) = PureState::from_unnormalized(amps)?;
    Ok(state)
}

/// The object-arm partial polarizer: a stack rotated by `alpha` from the
/// horizontal plane that transmits the p component fully and the s component
/// with amplitude transmittivity `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerChannel<T: Scalar> {
    alpha: T,
    t: T,
}

impl<T: Scalar> PolarizerChannel<T> {
    /// `alpha` is normalized into (-pi/2, pi/2]; `t` must lie in [0, 1].
    pub fn new(alpha: T, t: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&t) || !t.is_finite() {
            return Err(QeError::DomainError {
                field: "t",
                message: format!("amplitude transmittivity {t} outside [0, 1]"),
            });
        }
        if !alpha.is_finite() {
            return Err(QeError::DomainError {
                field: "alpha",
                message: "rotation angle is not finite".into(),
            });
        }
        let mut a = alpha;
        let half_pi = T::FRAC_PI_2();
        while a > half_pi {
            a = a - T::PI();
        }
        while a <= -half_pi {
            a = a + T::PI();
        }
        Ok(Self { alpha: a, t })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// The filter as an object-space operator: rotate the stack axis onto
    /// the horizontal, attenuate the s component, rotate back.
    pub fn operator(&self) -> ObjectOperator<T> {
        let fwd = Mat2::rotation(-self.alpha);
        let back = Mat2::rotation(self.alpha);
        fwd.mul(&Mat2::diag(T::one(), self.t)).mul(&back)
    }

    /// The three real amplitudes of the filtered singlet, normalized so that
    /// a1^2 + a2^2 + 2 a3^2 = 1:
    ///
    ///   a1 = (t + (1-t) cos^2 alpha) / sqrt(1+t^2)
    ///   a2 = (t + (1-t) sin^2 alpha) / sqrt(1+t^2)
    ///   a3 = (1-t) sin alpha cos alpha / sqrt(1+t^2)
    pub fn coeffs(&self) -> (T, T, T) {
        let (s, c) = self.alpha.sin_cos();
        let norm = (T::one() + self.t * self.t).sqrt();
        let keep = T::one() - self.t;
        let a1 = (self.t + keep * c * c) / norm;
        let a2 = (self.t + keep * s * s) / norm;
        let a3 = (keep * s * c) / norm;
        (a1, a2, a3)
    }

    /// Sends the singlet through the filter: returns the normalized state
    /// with amplitudes (a1, a3, -a3, -a2) and the survival probability
    /// (1 + t^2) / 2.
    pub fn prepare(&self) -> (PureState<T>, T) {
        let (a1, a2, a3) = self.coeffs();
        let zero = T::zero();
        let state = PureState::new([
            Amplitude::new(a1, zero),
            Amplitude::new(a3, zero),
            Amplitude::new(-a3, zero),
            Amplitude::new(-a2, zero),
        ])
        .expect("polarizer coefficients are normalized");
        let two = T::one() + T::one();
        (state, (T::one() + self.t * self.t) / two)
    }
}

/// A Brewster-angle glass-plate stack modeled as a fixed amplitude factor
/// per plate. The per-plate factor is an inference from two published
/// calibration points, not a first-principles reflectivity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateStack<T: Scalar> {
    n_plates: u32,
    per_plate_factor: T,
}

impl<T: Scalar> PlateStack<T> {
    pub fn new(n_plates: u32, per_plate_factor: T) -> Result<Self> {
        if per_plate_factor <= T::zero()
            || per_plate_factor > T::one()
            || !per_plate_factor.is_finite()
        {
            return Err(QeError::DomainError {
                field: "per_plate_factor",
                message: format!("{per_plate_factor} outside (0, 1]"),
            });
        }
        Ok(Self {
            n_plates,
            per_plate_factor,
        })
    }

    pub fn with_default_factor(n_plates: u32) -> Self {
        Self::new(n_plates, T::from_f64_lossy(PLATE_FACTOR_DEFAULT))
            .expect("default factor is in range")
    }

    pub fn n_plates(&self) -> u32 {
        self.n_plates
    }

    /// Amplitude transmittivity t = factor^n.
    pub fn amplitude_transmittivity(&self) -> T {
        self.per_plate_factor.powi(self.n_plates as i32)
    }
}

/// Draws a pure state uniformly from the real unit 3-sphere of amplitude
/// vectors, the family the real (linear-polarization) analyzer rotations
/// act on. Deterministic given the generator state.
pub fn random_pure_state<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> PureState<T> {
    loop {
        let raw: [f64; 4] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let amps = raw.map(|x| Amplitude::new(T::from_f64_lossy(x), T::zero()));
        if let Ok((state, _)) = PureState::from_unnormalized(amps) {
            return state;
        }
    }
}
