//! Test-support oracle: a deliberately naive re-implementation of every
//! quantity straight from the definitions, kept independent of the library
//! code paths it checks. Everything here works on plain `Vec`-free f64
//! structures built from first principles: explicit 4x4 density matrices,
//! explicit detector vectors, projector algebra, and dense scans instead of
//! closed forms.

#![allow(dead_code)]

use num_complex::Complex64;
use qe_core::PureState;

pub type C = Complex64;
pub type M4 = [[C; 4]; 4];
pub type M2 = [[C; 2]; 2];

pub fn amps_of(state: &PureState<f64>) -> [C; 4] {
    *state.amps()
}

/// |psi><psi| by explicit outer product.
pub fn density(amps: &[C; 4]) -> M4 {
    let mut m = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = amps[i] * amps[j].conj();
        }
    }
    m
}

/// Scales the object-off-diagonal blocks, the mode-overlap channel.
pub fn dephase(m: &M4, eta: f64) -> M4 {
    let mut out = *m;
    for i in 0..4 {
        for j in 0..4 {
            if (i < 2) != (j < 2) {
                out[i][j] *= eta;
            }
        }
    }
    out
}

/// Probe-space block <O_bra| rho |O_ket> by explicit index arithmetic.
pub fn block(m: &M4, bra: usize, ket: usize) -> M2 {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for (pi, row) in out.iter_mut().enumerate() {
        for (pj, cell) in row.iter_mut().enumerate() {
            *cell = m[2 * bra + pi][2 * ket + pj];
        }
    }
    out
}

fn sub2(a: &M2, b: &M2) -> M2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

fn trace2(m: &M2) -> C {
    m[0][0] + m[1][1]
}

/// <v| M |v> for a real detector vector.
fn expectation(m: &M2, v: [f64; 2]) -> C {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += C::new(v[i], 0.0) * m[i][j] * C::new(v[j], 0.0);
        }
    }
    acc
}

/// Detector vectors of the probe analyzer rotated by `phi`: the component
/// functionals of the rotated readout.
pub fn analyzer_vectors(phi: f64) -> ([f64; 2], [f64; 2]) {
    ([phi.cos(), -phi.sin()], [phi.sin(), phi.cos()])
}

/// Eigenvalues of a 2x2 Hermitian matrix.
pub fn eig2(m: &M2) -> (f64, f64) {
    let mean = 0.5 * (m[0][0].re + m[1][1].re);
    let half_gap = 0.5 * (m[0][0].re - m[1][1].re);
    let off = 0.5 * (m[0][1] + m[1][0].conj());
    let radius = (half_gap * half_gap + off.norm_sqr()).sqrt();
    (mean + radius, mean - radius)
}

pub fn w_plus_oracle(m: &M4) -> f64 {
    trace2(&block(m, 0, 0)).re
}

pub fn predictability_oracle(m: &M4) -> f64 {
    (trace2(&block(m, 0, 0)).re - trace2(&block(m, 1, 1)).re).abs()
}

pub fn visibility_oracle(m: &M4) -> f64 {
    2.0 * trace2(&block(m, 0, 1)).norm()
}

pub fn initial_visibility_oracle(m: &M4) -> f64 {
    let w = w_plus_oracle(m);
    2.0 * (w * (1.0 - w)).max(0.0).sqrt()
}

pub fn distinguishability_oracle(m: &M4) -> f64 {
    let path = sub2(&block(m, 0, 0), &block(m, 1, 1));
    let (l1, l2) = eig2(&path);
    l1.abs() + l2.abs()
}

/// Measured path knowledge at observable angle theta: absolute diagonal of
/// the path operator in the analyzer basis that realizes the observable.
pub fn measured_distinguishability_oracle(m: &M4, theta: f64) -> f64 {
    let path = sub2(&block(m, 0, 0), &block(m, 1, 1));
    let (plus, minus) = analyzer_vectors(-theta / 2.0);
    expectation(&path, plus).re.abs() + expectation(&path, minus).re.abs()
}

pub fn conditioned_visibility_oracle(m: &M4, theta: f64) -> f64 {
    let coherence = block(m, 0, 1);
    let (plus, minus) = analyzer_vectors(-theta / 2.0);
    2.0 * expectation(&coherence, plus).norm() + 2.0 * expectation(&coherence, minus).norm()
}

/// Conditional-state overlap for a pure amplitude vector.
pub fn entanglement_c_oracle(amps: &[C; 4]) -> f64 {
    let wp = amps[0].norm_sqr() + amps[1].norm_sqr();
    let wm = amps[2].norm_sqr() + amps[3].norm_sqr();
    let overlap = amps[0].conj() * amps[2] + amps[1].conj() * amps[3];
    overlap.norm() / (wp * wm).sqrt()
}

/// Coincidence probabilities at analyzer angle `phi` via explicit detector
/// vectors, ordered (pp, pm, mp, mm).
pub fn probs_oracle(amps: &[C; 4], phi: f64, diagonal_object: bool) -> [f64; 4] {
    let (m_plus, m_minus) = analyzer_vectors(phi);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o_plus, o_minus): ([f64; 2], [f64; 2]) = if diagonal_object {
        ([h, h], [h, -h])
    } else {
        ([1.0, 0.0], [0.0, 1.0])
    };
    let project = |obj: &[f64; 2], probe: &[f64; 2]| {
        let mut acc = C::new(0.0, 0.0);
        for oi in 0..2 {
            for pi in 0..2 {
                acc += C::new(obj[oi] * probe[pi], 0.0) * amps[2 * oi + pi];
            }
        }
        acc.norm_sqr()
    };
    [
        project(&o_plus, &m_plus),
        project(&o_plus, &m_minus),
        project(&o_minus, &m_plus),
        project(&o_minus, &m_minus),
    ]
}

/// Analyzer angle zeroing the |O+ M-> rate, found by dense scan plus
/// golden-section refinement. Returns (angle, residual rate).
pub fn theta_zero_oracle(amps: &[C; 4]) -> (f64, f64) {
    let rate = |phi: f64| probs_oracle(amps, phi, false)[1];
    let mut best_phi = 0.0;
    let mut best = f64::INFINITY;
    let n = 20_000;
    for k in 0..n {
        let phi = -std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let r = rate(phi);
        if r < best {
            best = r;
            best_phi = phi;
        }
    }
    let mut lo = best_phi - std::f64::consts::PI / n as f64;
    let mut hi = best_phi + std::f64::consts::PI / n as f64;
    let g = 0.5 * (3.0 - 5.0_f64.sqrt());
    for _ in 0..200 {
        let a = lo + g * (hi - lo);
        let b = hi - g * (hi - lo);
        if rate(a) < rate(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let phi = 0.5 * (lo + hi);
    (phi, rate(phi).sqrt())
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
