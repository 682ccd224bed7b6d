//! Experiment simulation: mode-overlap dephasing, seeded Monte Carlo
//! coincidence counting, and analyzer sweeps.
//!
//! # Reproducibility
//!
//! All sampling uses ChaCha8 seeded through [`point_seed`], which mixes the
//! base seed with the grid index by one splitmix64 round. Within a grid
//! point the Z-basis record is drawn first, then the X-basis record, from
//! the same stream. Multinomial counts are drawn as sequential conditional
//! binomials in the fixed category order (pp, pm, mp, mm). Identical
//! configurations therefore produce bit-identical results, and grid points
//! are independent of one another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{QeError, Result};
use crate::quant::{analyzer_angle, estimate_from_probs, Basis, CoincidenceSet, ProbEstimates};
use crate::scalar::Scalar;
use crate::state::DensityOperator;

/// Arguments of the absolute values closer to zero than this many standard
/// errors make first-order error propagation invalid; such standard errors
/// are withheld instead of reported.
const KINK_SIGMA: f64 = 3.0;

/// Scales the off-diagonal object blocks by `eta`, the mode-overlap factor.
///
/// This is the dephasing channel picture of imperfect mode matching: path
/// populations and every path quantity (D, D_m) are untouched while the
/// coherence block and with it V and V_c scale by exactly `eta`.
/// Requires `eta` in [0, 1].
pub fn apply_overlap_dephasing<T: Scalar>(
    rho: &DensityOperator<T>,
    eta: T,
) -> DensityOperator<T> {
    debug_assert!(
        eta >= T::zero() && eta <= T::one(),
        "overlap factor must lie in [0, 1]"
    );
    let mut m = *rho.matrix();
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if (i < 2) != (j < 2) {
                *cell = cell.scale(eta);
            }
        }
    }
    DensityOperator::from_parts_unchecked(m)
}

/// Sweep and sampling configuration.
///
/// `theta_grid` holds observable angles (see the quantity-curve convention
/// in the quant module) and must be strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<T: Scalar> {
    pub shots_per_point: u64,
    pub seed: u64,
    pub eta_overlap: T,
    pub theta_grid: Vec<T>,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(shots_per_point: u64, seed: u64, eta_overlap: T, theta_grid: Vec<T>) -> Result<Self> {
        if shots_per_point == 0 {
            return Err(QeError::DomainError {
                field: "shots_per_point",
                message: "must be at least 1".into(),
            });
        }
        if !(T::zero()..=T::one()).contains(&eta_overlap) || !eta_overlap.is_finite() {
            return Err(QeError::DomainError {
                field: "eta_overlap",
                message: format!("{eta_overlap} outside [0, 1]"),
            });
        }
        if theta_grid.is_empty() {
            return Err(QeError::DomainError {
                field: "theta_grid",
                message: "must contain at least one angle".into(),
            });
        }
        for pair in theta_grid.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(QeError::DomainError {
                    field: "theta_grid",
                    message: "must be strictly increasing".into(),
                });
            }
        }
        if theta_grid.iter().any(|t| !t.is_finite()) {
            return Err(QeError::DomainError {
                field: "theta_grid",
                message: "angles must be finite".into(),
            });
        }
        Ok(Self {
            shots_per_point,
            seed,
            eta_overlap,
            theta_grid,
        })
    }

    /// One-degree steps from 0 to 90 degrees, the figure grid.
    pub fn default_grid() -> Vec<T> {
        (0..=90)
            .map(|d| T::from_f64_lossy(f64::from(d)).to_radians())
            .collect()
    }
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            shots_per_point: 100_000,
            seed: 0,
            eta_overlap: T::from_f64_lossy(0.94),
            theta_grid: Self::default_grid(),
        }
    }
}

/// Detected coincidences at one analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord<T: Scalar> {
    pub theta: T,
    pub basis: Basis,
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
    pub n_total: u64,
}

impl<T: Scalar> CountRecord<T> {
    pub fn new(
        theta: T,
        basis: Basis,
        n_pp: u64,
        n_pm: u64,
        n_mp: u64,
        n_mm: u64,
    ) -> Result<Self> {
        let n_total = n_pp + n_pm + n_mp + n_mm;
        if n_total == 0 {
            return Err(QeError::InsufficientCounts { total: 0 });
        }
        Ok(Self {
            theta,
            basis,
            n_pp,
            n_pm,
            n_mp,
            n_mm,
            n_total,
        })
    }

    /// Empirical frequencies as a coincidence set.
    pub fn frequencies(&self) -> CoincidenceSet<T> {
        let total = T::from_f64_lossy(self.n_total as f64);
        let f = |n: u64| T::from_f64_lossy(n as f64) / total;
        CoincidenceSet::new(
            self.basis,
            self.theta,
            f(self.n_pp),
            f(self.n_mm),
            f(self.n_pm),
            f(self.n_mp),
        )
        .expect("count frequencies are normalized")
    }
}

/// Derives the per-point substream seed: one splitmix64 round over the base
/// seed xored with the golden-ratio multiple of the grid index.
pub fn point_seed(seed: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = (seed ^ index.wrapping_mul(GOLDEN)).wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn multinomial<R: Rng + ?Sized>(shots: u64, probs: [f64; 4], rng: &mut R) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut remaining = shots;
    let mut mass_left = 1.0_f64;
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let conditional = if mass_left > 0.0 {
            (probs[i] / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let n = Binomial::new(remaining, conditional)
            .expect("conditional probability lies in [0, 1]")
            .sample(rng);
        counts[i] = n;
        remaining -= n;
        mass_left -= probs[i];
    }
    counts[3] = remaining;
    counts
}

/// Draws one multinomial coincidence record at analyzer angle `theta`.
pub fn simulate_counts<T: Scalar, R: Rng + ?Sized>(
    rho: &DensityOperator<T>,
    theta: T,
    basis: Basis,
    shots: u64,
    rng: &mut R,
) -> CountRecord<T> {
    assert!(shots >= 1, "at least one shot is required");
    let probs = rho.coincidence_probs(theta, basis);
    let p = [
        probs.p_pp.to_f64_lossy(),
        probs.p_pm.to_f64_lossy(),
        probs.p_mp.to_f64_lossy(),
        probs.p_mm.to_f64_lossy(),
    ];
    let counts = multinomial(shots, p, rng);
    CountRecord {
        theta,
        basis,
        n_pp: counts[0],
        n_pm: counts[1],
        n_mp: counts[2],
        n_mm: counts[3],
        n_total: shots,
    }
}

/// Count-based estimates with first-order multinomial standard errors.
///
/// A standard error is `None` when one of the absolute-value arguments sits
/// within a few standard errors of zero, where linear propagation breaks
/// down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountEstimates<T: Scalar> {
    pub estimates: ProbEstimates<T>,
    pub se_p_pred: Option<T>,
    pub se_d_m: Option<T>,
    pub se_vis: Option<T>,
    pub se_v_c: Option<T>,
}

/// Standard error of |a| + |b| style estimators: the signed gradient has
/// unit entries, so Var = (1 - value^2) / N. Reliability requires every
/// absolute-value argument to clear zero by `KINK_SIGMA` standard errors.
fn propagate<T: Scalar>(value: T, args: &[(T, T)], n: u64) -> Option<T> {
    let n = T::from_f64_lossy(n as f64);
    let var = (T::one() - value * value).max(T::zero()) / n;
    let kink = T::from_f64_lossy(KINK_SIGMA);
    for &(arg, spread) in args {
        let arg_var = (spread - arg * arg).max(T::zero()) / n;
        if arg.abs() < kink * arg_var.sqrt() {
            return None;
        }
    }
    Some(var.sqrt())
}

/// Estimates the path and visibility quantities from one Z-basis and one
/// X-basis count record at the same analyzer angle.
pub fn estimate_from_counts<T: Scalar>(
    z: &CountRecord<T>,
    x: &CountRecord<T>,
) -> Result<CountEstimates<T>> {
    let total = z.n_total.min(x.n_total);
    if total < 100 {
        return Err(QeError::InsufficientCounts { total });
    }
    let zf = z.frequencies();
    let xf = x.frequencies();
    let estimates = estimate_from_probs(&zf, &xf)?;

    let se_p_pred = propagate(
        estimates.p_pred,
        &[(zf.p_pp + zf.p_pm - zf.p_mp - zf.p_mm, T::one())],
        z.n_total,
    );
    let se_d_m = propagate(
        estimates.d_m,
        &[
            (zf.p_pp - zf.p_mp, zf.p_pp + zf.p_mp),
            (zf.p_pm - zf.p_mm, zf.p_pm + zf.p_mm),
        ],
        z.n_total,
    );
    let se_vis = propagate(
        estimates.vis,
        &[(xf.p_pp - xf.p_mp + xf.p_pm - xf.p_mm, T::one())],
        x.n_total,
    );
    let se_v_c = propagate(
        estimates.v_c,
        &[
            (xf.p_pp - xf.p_mp, xf.p_pp + xf.p_mp),
            (xf.p_pm - xf.p_mm, xf.p_pm + xf.p_mm),
        ],
        x.n_total,
    );
    Ok(CountEstimates {
        estimates,
        se_p_pred,
        se_d_m,
        se_vis,
        se_v_c,
    })
}

/// How a sweep evaluates each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    Analytic,
    MonteCarlo,
}

/// One grid point of a sweep: the quantity pair, their squares, and the
/// coincidence probabilities (exact or empirical) in both object bases,
/// each ordered (pp, pm, mp, mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T: Scalar> {
    pub theta: T,
    pub d_m: T,
    pub v_c: T,
    pub d_m_sq: T,
    pub v_c_sq: T,
    pub sum_sq: T,
    pub z: [T; 4],
    pub x: [T; 4],
}

impl<T: Scalar> SweepPoint<T> {
    fn build(theta: T, d_m: T, v_c: T, z: [T; 4], x: [T; 4]) -> Self {
        Self {
            theta,
            d_m,
            v_c,
            d_m_sq: d_m * d_m,
            v_c_sq: v_c * v_c,
            sum_sq: d_m * d_m + v_c * v_c,
            z,
            x,
        }
    }
}

/// A full sweep: the scalar header of the swept state plus one point per
/// grid angle. `t` and `alpha` are source metadata a caller may attach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries<T: Scalar> {
    pub p_pred: T,
    pub vis: T,
    pub vis0: T,
    pub dist: T,
    pub c_overlap: Option<T>,
    pub w_plus: T,
    pub eta: T,
    pub t: Option<T>,
    pub alpha: Option<T>,
    pub points: Vec<SweepPoint<T>>,
}

fn probs_array<T: Scalar>(set: &CoincidenceSet<T>) -> [T; 4] {
    [set.p_pp, set.p_pm, set.p_mp, set.p_mm]
}

/// Sweeps the analyzer over the configured grid after applying the
/// mode-overlap dephasing of `config`.
///
/// Per grid point the probe observable sits at the grid angle and the
/// coincidence records are taken at the matching analyzer angle, so the
/// Monte Carlo estimates converge to the analytic curves point by point.
/// Points are evaluated in grid order from independent substreams.
pub fn sweep<T: Scalar>(
    rho: &DensityOperator<T>,
    config: &SimConfig<T>,
    mode: SweepMode,
) -> Result<SweepSeries<T>> {
    let dephased = apply_overlap_dephasing(rho, config.eta_overlap);
    let report = dephased.quantity_report();
    let mut points = Vec::with_capacity(config.theta_grid.len());
    for (index, &theta) in config.theta_grid.iter().enumerate() {
        let phi = analyzer_angle(theta);
        let point = match mode {
            SweepMode::Analytic => {
                let z = dephased.coincidence_probs(phi, Basis::Z);
                let x = dephased.coincidence_probs(phi, Basis::X);
                SweepPoint::build(
                    theta,
                    dephased.measured_distinguishability(theta),
                    dephased.conditioned_visibility(theta),
                    probs_array(&z),
                    probs_array(&x),
                )
            }
            SweepMode::MonteCarlo => {
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(config.seed, index as u64));
                let z = simulate_counts(&dephased, phi, Basis::Z, config.shots_per_point, &mut rng);
                let x = simulate_counts(&dephased, phi, Basis::X, config.shots_per_point, &mut rng);
                let est = estimate_from_counts(&z, &x)?;
                SweepPoint::build(
                    theta,
                    est.estimates.d_m,
                    est.estimates.v_c,
                    probs_array(&z.frequencies()),
                    probs_array(&x.frequencies()),
                )
            }
        };
        points.push(point);
    }
    Ok(SweepSeries {
        p_pred: report.p_pred,
        vis: report.vis,
        vis0: report.vis0,
        dist: report.dist,
        c_overlap: report.c_overlap,
        w_plus: report.w_plus,
        eta: config.eta_overlap,
        t: None,
        alpha: None,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::{singlet, PolarizerChannel};
    use approx::assert_abs_diff_eq;

    fn singlet_rho() -> DensityOperator<f64> {
        singlet::<f64>().to_density()
    }

    #[test]
    fn dephasing_identity_at_unit_overlap() {
        let rho = singlet_rho();
        assert_eq!(apply_overlap_dephasing(&rho, 1.0), rho);
    }

    #[test]
    fn dephasing_caps_conditioned_visibility() {
        let rho = apply_overlap_dephasing(&singlet_rho(), 0.94);
        assert_abs_diff_eq!(
            rho.conditioned_visibility(std::f64::consts::FRAC_PI_2),
            0.94,
            epsilon = 1e-12
        );
    }

    #[test]
    fn dephasing_leaves_path_quantities() {
        let rho = PolarizerChannel::new(0.4, 0.35).unwrap().prepare().0.to_density();
        let dephased = apply_overlap_dephasing(&rho, 0.94);
        assert_abs_diff_eq!(
            dephased.distinguishability(),
            rho.distinguishability(),
            epsilon = 1e-12
        );
        for k in 0..30 {
            let theta = -1.5 + 0.1 * k as f64;
            assert_abs_diff_eq!(
                dephased.measured_distinguishability(theta),
                rho.measured_distinguishability(theta),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                dephased.conditioned_visibility(theta),
                0.94 * rho.conditioned_visibility(theta),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn counts_are_deterministic() {
        let rho = singlet_rho();
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        let ra = simulate_counts(&rho, 0.3, Basis::Z, 50_000, &mut a);
        let rb = simulate_counts(&rho, 0.3, Basis::Z, 50_000, &mut b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn impossible_outcomes_never_fire() {
        let rho = singlet_rho();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rec = simulate_counts(&rho, 0.0, Basis::Z, 1_000_000, &mut rng);
        assert_eq!(rec.n_pm + rec.n_mp, 0);
        assert_eq!(rec.n_pp + rec.n_mm, 1_000_000);
    }

    #[test]
    fn balanced_counts_within_four_sigma() {
        // Analyzer at 45 degrees splits the singlet evenly over all four
        // outcomes.
        let rho = singlet_rho();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shots = 1_000_000u64;
        let rec = simulate_counts(&rho, std::f64::consts::FRAC_PI_4, Basis::Z, shots, &mut rng);
        let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
        for n in [rec.n_pp, rec.n_pm, rec.n_mp, rec.n_mm] {
            assert!((n as f64 - 250_000.0).abs() < 4.0 * sigma, "count {n} too far");
        }
    }

    #[test]
    fn exact_frequency_counts_match_prob_estimates() {
        let state = PolarizerChannel::new(43f64.to_radians(), 0.2).unwrap().prepare().0;
        let phi = -0.23;
        let zp = state.coincidence_probs(phi, Basis::Z);
        let xp = state.coincidence_probs(phi, Basis::X);
        let n = 1_000_000u64;
        let to_counts = |p: f64| (p * n as f64).round() as u64;
        let z = CountRecord::new(
            phi,
            Basis::Z,
            to_counts(zp.p_pp),
            to_counts(zp.p_pm),
            to_counts(zp.p_mp),
            to_counts(zp.p_mm),
        )
        .unwrap();
        let x = CountRecord::new(
            phi,
            Basis::X,
            to_counts(xp.p_pp),
            to_counts(xp.p_pm),
            to_counts(xp.p_mp),
            to_counts(xp.p_mm),
        )
        .unwrap();
        let est = estimate_from_counts(&z, &x).unwrap();
        let exact = estimate_from_probs(&z.frequencies(), &x.frequencies()).unwrap();
        assert_eq!(est.estimates, exact);
        assert_abs_diff_eq!(est.estimates.d_m, exact.d_m);
    }

    #[test]
    fn count_estimates_cover_truth() {
        // Observable at 60 degrees: D_m = 0.5 for the singlet.
        let rho = singlet_rho();
        let theta = std::f64::consts::FRAC_PI_3;
        let phi = analyzer_angle(theta);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = simulate_counts(&rho, phi, Basis::Z, 100_000, &mut rng);
        let x = simulate_counts(&rho, phi, Basis::X, 100_000, &mut rng);
        let est = estimate_from_counts(&z, &x).unwrap();
        let se = est.se_d_m.expect("away from kinks");
        assert!((est.estimates.d_m - 0.5).abs() < 4.0 * se);
    }

    #[test]
    fn too_few_counts_rejected() {
        let z = CountRecord::<f64>::new(0.0, Basis::Z, 20, 20, 5, 5).unwrap();
        let x = CountRecord::<f64>::new(0.0, Basis::X, 20, 20, 5, 5).unwrap();
        assert!(matches!(
            estimate_from_counts(&z, &x),
            Err(QeError::InsufficientCounts { total: 50 })
        ));
    }

    #[test]
    fn sweep_singlet_endpoints() {
        let config = SimConfig::new(
            1,
            0,
            0.94,
            vec![0.0, std::f64::consts::FRAC_PI_2],
        )
        .unwrap();
        let series = sweep(&singlet_rho(), &config, SweepMode::Analytic).unwrap();
        assert_abs_diff_eq!(series.points[0].d_m_sq, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(series.points[0].v_c_sq, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(series.points[1].d_m_sq, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(series.points[1].v_c_sq, 0.8836, epsilon = 1e-12);
    }

    #[test]
    fn sweep_is_bit_identical_across_runs() {
        let rho = PolarizerChannel::new(0.2, 0.5).unwrap().prepare().0.to_density();
        let config = SimConfig::new(5_000, 42, 1.0, SimConfig::<f64>::default_grid()).unwrap();
        let a = sweep(&rho, &config, SweepMode::MonteCarlo).unwrap();
        let b = sweep(&rho, &config, SweepMode::MonteCarlo).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_rejects_unsorted_grid() {
        assert!(matches!(
            SimConfig::new(10, 0, 1.0, vec![0.0, 0.0]),
            Err(QeError::DomainError { field: "theta_grid", .. })
        ));
    }

    #[test]
    fn point_seed_spreads() {
        let a = point_seed(0, 0);
        let b = point_seed(0, 1);
        let c = point_seed(1, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }
}
