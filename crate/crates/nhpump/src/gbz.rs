//! Generalized Brillouin zone of the open chain.
//!
//! Writing the two admissible roots of the characteristic polynomial as
//! `beta` and `beta e^{i phi}` and subtracting the dispersion at the two
//! roots kills the energy dependence, leaving
//! `beta^2 = e^{-i phi} (t1 - gamma) / (t1 + gamma)`. Every root magnitude
//! is therefore the drive-independent radius
//! `Gamma = sqrt(|t1 - gamma| / |t1 + gamma|)`: the GBZ is a circle.

use num_complex::Complex64 as C64;

use crate::eigen::principal_sqrt;
use crate::error::{Error, Result};
use crate::model::{DriveParams, PhasePoint};

/// Magnitude-match tolerance for the admissibility condition.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// One phi sample of the sweep: the two square-root branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbzSample {
    pub phi: f64,
    pub beta: (C64, C64),
}

/// The GBZ circle together with the phi-sweep evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct GBZContour {
    /// Common root magnitude Gamma.
    pub radius: f64,
    pub samples: Vec<GbzSample>,
    /// Order of the pole of `det H(beta)`; 1 for this model.
    pub pole_order: usize,
    /// Half the beta-polynomial degree; 1 for this model (quadratic).
    pub half_degree: usize,
}

/// The GBZ radius `sqrt(|t1 - gamma| / |t1 + gamma|)`, constant along the drive.
///
/// Fails with [`Error::DegenerateGBZ`] at maximal nonreciprocity `|mu| = |gamma|`,
/// where the radius collapses to 0 or diverges.
pub fn gbz_radius(p: &DriveParams) -> Result<f64> {
    // reciprocal chain: the GBZ is the Brillouin zone for every mu,
    // including the 0/0 point mu = 0
    if p.gamma == 0.0 {
        return Ok(1.0);
    }
    let num = (p.t1() - p.gamma).abs();
    let den = (p.t1() + p.gamma).abs();
    if num < 1e-12 || den < 1e-12 {
        return Err(Error::DegenerateGBZ {
            mu: p.mu,
            gamma: p.gamma,
        });
    }
    Ok((num / den).sqrt())
}

/// The two solutions of `E^2(beta) = E^2(beta e^{i phi})` at fixed drive phase.
///
/// The difference of the two dispersion expressions is formed literally, so
/// the energy cancels; what is left is solved for `beta^2` and both square
/// roots are returned as `(beta, -beta)`.
pub fn beta_roots(p: &DriveParams, drive_phase: f64, phi: f64) -> Result<(C64, C64)> {
    let t2 = p.t2(drive_phase);
    if t2.abs() < 1e-12 {
        return Err(Error::DegenerateDrive { phase: drive_phase });
    }
    let one = C64::new(1.0, 0.0);
    let rot = C64::from_polar(1.0, phi);
    let forward = one - rot;
    if forward.norm() < 1e-12 {
        return Err(Error::DegeneratePhi { phi });
    }
    let num = (p.t1() - p.gamma) * (one - rot.conj());
    let den = (p.t1() + p.gamma) * forward;
    if num.norm() < 1e-12 || den.norm() < 1e-12 {
        return Err(Error::DegenerateGBZ {
            mu: p.mu,
            gamma: p.gamma,
        });
    }
    let beta = principal_sqrt(-num / den);
    Ok((beta, -beta))
}

/// Sweeps phi over `n_phi` points strictly inside `(0, 2 pi)`, checks the
/// equal-magnitude admissibility of each root pair, and cross-checks the
/// common magnitude against [`gbz_radius`] within 1e-9.
pub fn gbz_contour(p: &DriveParams, drive_phase: f64, n_phi: usize) -> Result<GBZContour> {
    if n_phi < 8 {
        return Err(Error::InvalidArgument(format!(
            "n_phi must be >= 8, got {n_phi}"
        )));
    }
    let radius = gbz_radius(p)?;
    let mut samples = Vec::with_capacity(n_phi);
    for j in 0..n_phi {
        let phi = std::f64::consts::TAU * (j + 1) as f64 / (n_phi + 1) as f64;
        let (a, b) = beta_roots(p, drive_phase, phi)?;
        // sort by (magnitude, argument) for a deterministic record
        let (a, b) = if (a.norm(), a.arg()) <= (b.norm(), b.arg()) {
            (a, b)
        } else {
            (b, a)
        };
        let spread = (a.norm() - b.norm()).abs();
        if spread > ADMISSIBILITY_TOL {
            return Err(Error::AdmissibilityViolation {
                spread,
                tol: ADMISSIBILITY_TOL,
            });
        }
        for root in [a, b] {
            if (root.norm() - radius).abs() > 1e-9 {
                return Err(Error::AdmissibilityViolation {
                    spread: (root.norm() - radius).abs(),
                    tol: 1e-9,
                });
            }
        }
        samples.push(GbzSample { phi, beta: (a, b) });
    }
    Ok(GBZContour {
        radius,
        samples,
        pole_order: 1,
        half_degree: 1,
    })
}

/// Open-boundary spectrum over a theta grid of the GBZ circle: both bands,
/// `2 n_theta` eigenvalues ordered `(+E, -E)` per grid point.
pub fn obc_spectrum_gbz(p: &DriveParams, drive_phase: f64, n_theta: usize) -> Result<Vec<C64>> {
    if n_theta == 0 {
        return Err(Error::InvalidArgument("n_theta must be positive".into()));
    }
    gbz_radius(p)?;
    let mut spectrum = Vec::with_capacity(2 * n_theta);
    for j in 0..n_theta {
        let theta = std::f64::consts::TAU * j as f64 / n_theta as f64;
        let d = crate::model::bloch_vector_gbz(p, &PhasePoint::new(theta, drive_phase))?;
        let e = principal_sqrt(d.e_squared());
        spectrum.push(e);
        spectrum.push(-e);
    }
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn radius_hermitian_unit_circle() {
        for &mu in &[0.4, -1.2, 2.0] {
            assert_eq!(gbz_radius(&DriveParams::new(mu, 0.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn radius_substitution_values() {
        assert_eq!(gbz_radius(&DriveParams::new(0.5, 0.3)).unwrap(), 0.5);
        assert_eq!(gbz_radius(&DriveParams::new(-0.5, 0.3)).unwrap(), 2.0);
    }

    #[test]
    fn radius_degenerate() {
        assert!(matches!(
            gbz_radius(&DriveParams::new(0.3, 0.3)),
            Err(Error::DegenerateGBZ { .. })
        ));
        assert!(matches!(
            gbz_radius(&DriveParams::new(-0.3, 0.3)),
            Err(Error::DegenerateGBZ { .. })
        ));
    }

    #[test]
    fn beta_roots_phi_pi() {
        // beta^2 = e^{-i pi} * 0.25 -> beta = +-0.5i (in either order)
        let p = DriveParams::new(0.5, 0.3);
        let (a, b) = beta_roots(&p, 0.7, std::f64::consts::PI).unwrap();
        let target = C64::new(0.0, 0.5);
        let matched = ((a - target).norm() < 1e-14 && (b + target).norm() < 1e-14)
            || ((a + target).norm() < 1e-14 && (b - target).norm() < 1e-14);
        assert!(matched, "roots {a} and {b}");
    }

    #[test]
    fn beta_roots_phi_half_pi() {
        let p = DriveParams::new(0.5, 0.3);
        let (a, b) = beta_roots(&p, 0.7, std::f64::consts::FRAC_PI_2).unwrap();
        let expect = C64::from_polar(0.5, -std::f64::consts::FRAC_PI_4);
        assert!((a - expect).norm() < 1e-14 || (b - expect).norm() < 1e-14);
        assert_abs_diff_eq!(a.norm(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b.norm(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn beta_roots_degenerate_inputs() {
        let p = DriveParams::new(0.5, 0.3);
        // t2 = 0 at cos t = mu
        let phase = 0.5f64.acos();
        assert!(matches!(
            beta_roots(&p, phase, 1.0),
            Err(Error::DegenerateDrive { .. })
        ));
        assert!(matches!(
            beta_roots(&p, 0.7, 0.0),
            Err(Error::DegeneratePhi { .. })
        ));
        assert!(matches!(
            beta_roots(&p, 0.7, std::f64::consts::TAU),
            Err(Error::DegeneratePhi { .. })
        ));
    }

    #[test]
    fn contour_matches_closed_form_radius() {
        let p = DriveParams::new(0.5, 0.3);
        let contour = gbz_contour(&p, 0.3, 64).unwrap();
        assert_eq!(contour.samples.len(), 64);
        assert_eq!(contour.pole_order, 1);
        assert_eq!(contour.half_degree, 1);
        assert_abs_diff_eq!(contour.radius, 0.5, epsilon = 0.0);
        for s in &contour.samples {
            assert!(s.phi > 0.0 && s.phi < std::f64::consts::TAU);
            assert_abs_diff_eq!(s.beta.0.norm(), 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(s.beta.1.norm(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn contour_hermitian_unit_circle() {
        let contour = gbz_contour(&DriveParams::new(0.7, 0.0), 1.1, 32).unwrap();
        for s in &contour.samples {
            assert_abs_diff_eq!(s.beta.0.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn contour_degenerate_gbz() {
        assert!(matches!(
            gbz_contour(&DriveParams::new(0.3, 0.3), 0.3, 64),
            Err(Error::DegenerateGBZ { .. })
        ));
    }

    #[test]
    fn obc_spectrum_closed_form_value() {
        // theta = 0, t = pi/2: E = +-sqrt(1.81)
        let p = DriveParams::new(0.5, 0.3);
        let spec = obc_spectrum_gbz(&p, std::f64::consts::FRAC_PI_2, 4).unwrap();
        assert_abs_diff_eq!(spec[0].re, 1.81f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(spec[0].im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1].re, -(1.81f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn obc_spectrum_real_closed_form_on_chiral_slices() {
        // sin t = 0: E^2 = mu^2 - gamma^2 + t2^2 + 2 t2 sqrt(mu^2 - gamma^2) cos theta
        let p = DriveParams::new(0.5, 0.3);
        for &t in &[0.0, std::f64::consts::PI] {
            let n = 64;
            let spec = obc_spectrum_gbz(&p, t, n).unwrap();
            let root = (p.mu * p.mu - p.gamma * p.gamma).sqrt();
            let t2 = p.t2(t);
            for (j, pair) in spec.chunks(2).enumerate() {
                let theta = std::f64::consts::TAU * j as f64 / n as f64;
                let e2 = p.mu * p.mu - p.gamma * p.gamma
                    + t2 * t2
                    + t.sin().powi(2)
                    + 2.0 * t2 * root * theta.cos();
                assert_abs_diff_eq!((pair[0] * pair[0]).re, e2, epsilon = 1e-9);
                assert!(pair[0].im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn obc_spectrum_equals_pbc_at_gamma_zero() {
        let p = DriveParams::new(0.7, 0.0);
        let n = 16;
        let spec = obc_spectrum_gbz(&p, 0.9, n).unwrap();
        for (j, pair) in spec.chunks(2).enumerate() {
            let theta = std::f64::consts::TAU * j as f64 / n as f64;
            let d = crate::model::bloch_vector(&p, &PhasePoint::new(theta, 0.9));
            let e = principal_sqrt(d.e_squared());
            assert_abs_diff_eq!((pair[0] - e).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn obc_gap_closes_at_mu_star() {
        // mu = (1 + gamma^2) / 2 solves |mu - 1| = sqrt(mu^2 - gamma^2) at t = 0
        let p = DriveParams::new(0.545, 0.3);
        let spec = obc_spectrum_gbz(&p, 0.0, 2001).unwrap();
        let min_abs = spec.iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        assert!(min_abs < 1e-3, "min |E| = {min_abs}");
    }

    #[test]
    fn quadratic_residual_ties_dispersion_radius_and_hamiltonian() {
        // t2 (t1 + gamma) beta^2 + (t1^2 - gamma^2 + t2^2 + d3^2 - E^2) beta
        //   + t2 (t1 - gamma) = 0 at beta = Gamma e^{i theta}
        let p = DriveParams::new(0.5, 0.3);
        let t = 0.3;
        let n = 32;
        let spec = obc_spectrum_gbz(&p, t, n).unwrap();
        let radius = gbz_radius(&p).unwrap();
        let (t1, t2) = (p.t1(), p.t2(t));
        let d3 = p.delta * t.sin();
        for (j, pair) in spec.chunks(2).enumerate() {
            let theta = std::f64::consts::TAU * j as f64 / n as f64;
            let beta = C64::from_polar(radius, theta);
            for &e in pair {
                let residual = beta * beta * (t2 * (t1 + p.gamma))
                    + beta * C64::new(t1 * t1 - p.gamma * p.gamma + t2 * t2 + d3 * d3, 0.0)
                    - beta * e * e
                    + t2 * (t1 - p.gamma);
                assert!(residual.norm() < 1e-8, "residual {}", residual.norm());
            }
        }
    }

    proptest! {
        // Gamma is independent of drive phase and phi, and every root pair
        // satisfies beta^2 = e^{-i phi}(t1 - gamma)/(t1 + gamma)
        #[test]
        fn sweep_magnitudes_equal_radius(
            mu in -1.5f64..1.5,
            gamma in -0.9f64..0.9,
            t in 0.0f64..std::f64::consts::TAU,
            phi in 0.05f64..6.2,
        ) {
            let p = DriveParams::new(mu, gamma);
            prop_assume!((mu - gamma).abs() > 1e-3 && (mu + gamma).abs() > 1e-3);
            prop_assume!(p.t2(t).abs() > 1e-6);
            let radius = gbz_radius(&p).unwrap();
            let (a, b) = beta_roots(&p, t, phi).unwrap();
            prop_assert!((a.norm() - radius).abs() < 1e-9);
            prop_assert!((b.norm() - radius).abs() < 1e-9);
            // product of the two returned branches is -beta^2
            let closed = C64::from_polar(1.0, -phi) * (mu - gamma) / (mu + gamma);
            prop_assert!((a * b + closed).norm() < 1e-10);
            // product of the admissible pair (beta, beta e^{i phi}) is the
            // quadratic's constant/leading coefficient ratio, phi-free
            let pair_product = a * (a * C64::from_polar(1.0, phi));
            let coeff_ratio = C64::new((mu - gamma) / (mu + gamma), 0.0);
            prop_assert!((pair_product - coeff_ratio).norm() < 1e-10);
        }

        // Gamma(mu, gamma) * Gamma(mu, -gamma) = 1
        #[test]
        fn radius_duality(mu in -2.0f64..2.0, gamma in -0.9f64..0.9) {
            prop_assume!((mu - gamma).abs() > 1e-3 && (mu + gamma).abs() > 1e-3);
            let fwd = gbz_radius(&DriveParams::new(mu, gamma)).unwrap();
            let rev = gbz_radius(&DriveParams::new(mu, -gamma)).unwrap();
            prop_assert!((fwd * rev - 1.0).abs() < 1e-12);
        }
    }
}
