//! Closed-form eigensystems of `d . sigma` in a biorthogonal basis.
//!
//! Right eigenvectors come from the component form
//! `[d3 +- E, d1 + i d2]` (or the partner form `[d1 - i d2, -d3 +- E]`
//! when the first one degenerates); left eigenvectors are the right
//! eigenvectors of the conjugate Bloch vector at the conjugated
//! eigenvalue. Pairs are rescaled so `<u_L | u_R> = 1`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::BlochVector;

/// Below this |E| a point is treated as an exceptional point.
pub const EP_TOL: f64 = 1e-8;
/// Relative norm below which the primary eigenvector form is abandoned
/// for the partner form.
pub const SWITCH_TOL: f64 = 1e-6;

/// Band label; `Plus` carries the principal square root `+E`, `Minus` carries `-E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Plus,
    Minus,
}

impl Band {
    pub fn sign(&self) -> f64 {
        match self {
            Band::Plus => 1.0,
            Band::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::Plus => write!(f, "plus"),
            Band::Minus => write!(f, "minus"),
        }
    }
}

/// An eigenvalue with matched right/left eigenvectors of unit biorthogonal overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthPair {
    pub energy: C64,
    pub right: [C64; 2],
    pub left: [C64; 2],
    pub band: Band,
}

/// `<a|b>` with the conjugation on `a`.
pub fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm(v: &[C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Principal complex square root: `Re >= 0`, and `Im >= 0` on the cut `Re = 0`.
pub fn principal_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// Raw eigenvector of `d . sigma` for eigenvalue `lambda` with `lambda^2 = d . d`.
///
/// Uses `[d3 + lambda, d1 + i d2]`, switching to `[d1 - i d2, -d3 + lambda]`
/// when the first form is smaller than `switch_tol * |lambda|` in norm. Both
/// vanish simultaneously only at an EP, which callers exclude.
fn raw_eigenvector(d: &BlochVector, lambda: C64, switch_tol: f64) -> [C64; 2] {
    let i = C64::I;
    let primary = [d.d3 + lambda, d.d1 + i * d.d2];
    if norm(&primary) >= switch_tol * lambda.norm() {
        primary
    } else {
        [d.d1 - i * d.d2, -d.d3 + lambda]
    }
}

fn biorth_pair(d: &BlochVector, band: Band, e: C64, switch_tol: f64) -> BiorthPair {
    let lambda = e * band.sign();
    let mut right = raw_eigenvector(d, lambda, switch_tol);
    // H^dagger has Bloch vector conj(d) and the matching eigenvalue conj(lambda)
    let mut left = raw_eigenvector(&d.conjugate(), lambda.conj(), switch_tol);

    let nr = norm(&right);
    right = [right[0] / nr, right[1] / nr];
    let overlap = inner(&left, &right);
    let scale = overlap.conj();
    left = [left[0] / scale, left[1] / scale];

    BiorthPair {
        energy: lambda,
        right,
        left,
        band,
    }
}

/// Both bands of `d . sigma` as biorthonormal pairs, `(plus, minus)`.
///
/// Fails with [`Error::ExceptionalPoint`] when `|E| <= ep_tol`.
pub fn eigensystem(d: &BlochVector) -> Result<(BiorthPair, BiorthPair)> {
    eigensystem_with(d, EP_TOL, SWITCH_TOL)
}

/// [`eigensystem`] with explicit tolerances.
pub fn eigensystem_with(
    d: &BlochVector,
    ep_tol: f64,
    switch_tol: f64,
) -> Result<(BiorthPair, BiorthPair)> {
    let e = principal_sqrt(d.e_squared());
    if e.norm() <= ep_tol {
        return Err(Error::ExceptionalPoint {
            abs_e: e.norm(),
            tol: ep_tol,
        });
    }
    Ok((
        biorth_pair(d, Band::Plus, e, switch_tol),
        biorth_pair(d, Band::Minus, e, switch_tol),
    ))
}

/// One band of [`eigensystem`].
pub fn band_pair(d: &BlochVector, band: Band) -> Result<BiorthPair> {
    let (plus, minus) = eigensystem(d)?;
    Ok(match band {
        Band::Plus => plus,
        Band::Minus => minus,
    })
}

/// Instantaneous band energy without building eigenvectors.
pub fn band_energy(d: &BlochVector, band: Band) -> C64 {
    principal_sqrt(d.e_squared()) * band.sign()
}

/// Phase-rigidity magnitude `|<u_L|u_R>|` for unit-norm left/right vectors
/// of the same band: 1 in the Hermitian limit, 0 at an exceptional point.
pub fn ep_defect(d: &BlochVector) -> f64 {
    let e = principal_sqrt(d.e_squared());
    if e.norm() <= EP_TOL {
        return 0.0;
    }
    let right = raw_eigenvector(d, e, SWITCH_TOL);
    let left = raw_eigenvector(&d.conjugate(), e.conj(), SWITCH_TOL);
    let (nr, nl) = (norm(&right), norm(&left));
    if nr == 0.0 || nl == 0.0 {
        return 0.0;
    }
    inner(&left, &right).norm() / (nr * nl)
}

/// Rephases `pair` so the first non-vanishing component of the right vector
/// is real and positive; the left vector absorbs the same unit phase, which
/// preserves `<u_L|u_R>` exactly. Used to smooth finite differences across
/// grid lines.
pub fn fix_phase_gauge(pair: &mut BiorthPair) {
    let lead = if pair.right[0].norm() >= SWITCH_TOL {
        pair.right[0]
    } else {
        pair.right[1]
    };
    let mag = lead.norm();
    if mag == 0.0 {
        return;
    }
    let phase = lead.conj() / mag;
    for c in pair.right.iter_mut() {
        *c *= phase;
    }
    for c in pair.left.iter_mut() {
        *c *= phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bloch_vector, DriveParams, PhasePoint};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dvec(d1: C64, d2: C64, d3: C64) -> BlochVector {
        BlochVector { d1, d2, d3 }
    }

    #[test]
    fn principal_sqrt_branch() {
        assert_eq!(principal_sqrt(c(4.0, 0.0)), c(2.0, 0.0));
        assert_eq!(principal_sqrt(c(-4.0, 0.0)), c(0.0, 2.0));
        let z = principal_sqrt(c(0.0, -1.0));
        assert!(z.re > 0.0);
    }

    #[test]
    fn sigma1_eigenbasis() {
        let d = dvec(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let (plus, minus) = eigensystem(&d).unwrap();
        assert_abs_diff_eq!(plus.energy.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.energy.re, -1.0, epsilon = 1e-15);
        // u_R +- proportional to [+-1, 1]; Hermitian, so left == right
        assert_abs_diff_eq!((plus.right[0] - plus.right[1]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((minus.right[0] + minus.right[1]).norm(), 0.0, epsilon = 1e-15);
        for (l, r) in plus.left.iter().zip(plus.right.iter()) {
            assert_abs_diff_eq!((l - r).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(inner(&plus.left, &plus.right).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sigma3_eigenbasis_exercises_partner_form() {
        let d = dvec(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let (plus, minus) = eigensystem(&d).unwrap();
        // plus: Eq-form [2, 0] -> [1, 0]; minus: degenerate row, partner form -> [0, 1]
        assert_abs_diff_eq!(plus.right[0].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.right[1].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.right[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.right[1].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn jordan_block_is_an_exceptional_point() {
        // d = (0.3, 0.3i, 0): H = [[0, 0.6], [0, 0]], defective
        let d = dvec(c(0.3, 0.0), c(0.0, 0.3), c(0.0, 0.0));
        let h = d.matrix();
        assert!(h.0[0][1].norm() > 0.5 && h.0[1][0].norm() < 1e-15);
        assert!(matches!(
            eigensystem(&d),
            Err(Error::ExceptionalPoint { .. })
        ));
        assert_eq!(ep_defect(&d), 0.0);
    }

    #[test]
    fn ep_defect_hermitian_is_one() {
        assert_abs_diff_eq!(
            ep_defect(&dvec(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn ep_defect_decreases_toward_the_ep() {
        let rigidity = |eps: f64| {
            ep_defect(&dvec(c(0.3 + eps, 0.0), c(0.0, 0.3), c(0.0, 0.0)))
        };
        let r1 = rigidity(1e-1);
        let r2 = rigidity(1e-2);
        let r3 = rigidity(1e-3);
        assert!(r1 > r2 && r2 > r3, "{r1} {r2} {r3}");
        assert!(r3 > 0.0 && r3 < 0.1);
    }

    #[test]
    fn eigen_residuals_and_cross_orthogonality() {
        let p = DriveParams::new(0.5, 0.3);
        for &(k, t) in &[(0.3, 1.2), (2.8, 4.5), (5.1, 0.7), (1.9, 3.3)] {
            let d = bloch_vector(&p, &PhasePoint::new(k, t));
            let h = d.matrix();
            let hd = h.dagger();
            let (plus, minus) = eigensystem(&d).unwrap();
            for pair in [&plus, &minus] {
                let hr = h.mul_vec(&pair.right);
                let res_r = [hr[0] - pair.energy * pair.right[0], hr[1] - pair.energy * pair.right[1]];
                assert!(norm(&res_r) < 1e-10);
                let hl = hd.mul_vec(&pair.left);
                let lam_c = pair.energy.conj();
                let res_l = [hl[0] - lam_c * pair.left[0], hl[1] - lam_c * pair.left[1]];
                assert!(norm(&res_l) < 1e-10 * norm(&pair.left));
                assert_abs_diff_eq!((inner(&pair.left, &pair.right) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
            }
            assert!(inner(&plus.left, &minus.right).norm() < 1e-10);
            assert!(inner(&minus.left, &plus.right).norm() < 1e-10);
        }
    }

    #[test]
    fn gauge_fix_preserves_biorthonormality() {
        let d = dvec(c(0.4, 0.1), c(0.2, 0.3), c(-0.6, 0.05));
        let (mut plus, _) = eigensystem(&d).unwrap();
        fix_phase_gauge(&mut plus);
        assert!(plus.right[0].im.abs() < 1e-15);
        assert!(plus.right[0].re > 0.0);
        assert_abs_diff_eq!(
            (inner(&plus.left, &plus.right) - c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    proptest! {
        // Completeness and reconstruction over random gapped model points:
        //   sum_n |u_R><u_L| = 1   and   sum_n E_n |u_R><u_L| = H
        #[test]
        fn completeness_and_reconstruction(
            mu in -1.5f64..1.5,
            gamma in -0.8f64..0.8,
            delta in 0.2f64..1.5,
            k in 0.0f64..std::f64::consts::TAU,
            t in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = DriveParams::new(mu, gamma).with_delta(delta);
            let d = bloch_vector(&p, &PhasePoint::new(k, t));
            prop_assume!(principal_sqrt(d.e_squared()).norm() > 1e-3);
            let (plus, minus) = eigensystem(&d).unwrap();

            prop_assert_eq!(plus.energy, -minus.energy);

            let mut ident_err: f64 = 0.0;
            let mut recon_err: f64 = 0.0;
            let h = d.matrix();
            for r in 0..2 {
                for cc in 0..2 {
                    let outer = plus.right[r] * plus.left[cc].conj()
                        + minus.right[r] * minus.left[cc].conj();
                    let outer_e = plus.energy * plus.right[r] * plus.left[cc].conj()
                        + minus.energy * minus.right[r] * minus.left[cc].conj();
                    let id = if r == cc { 1.0 } else { 0.0 };
                    ident_err = ident_err.max((outer - id).norm());
                    recon_err = recon_err.max((outer_e - h.0[r][cc]).norm());
                }
            }
            prop_assert!(ident_err < 1e-8, "identity residual {}", ident_err);
            prop_assert!(recon_err < 1e-8, "reconstruction residual {}", recon_err);
        }

        // Hermitian reduction: left and right unit vectors coincide up to phase
        #[test]
        fn hermitian_left_right_coincide(
            mu in -1.5f64..1.5,
            k in 0.0f64..std::f64::consts::TAU,
            t in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = DriveParams::new(mu, 0.0);
            let d = bloch_vector(&p, &PhasePoint::new(k, t));
            prop_assume!(principal_sqrt(d.e_squared()).norm() > 1e-3);
            let (plus, minus) = eigensystem(&d).unwrap();
            for pair in [plus, minus] {
                let nl = norm(&pair.left);
                let overlap = inner(&pair.left, &pair.right).norm() / nl;
                prop_assert!((overlap - 1.0).abs() < 1e-10);
            }
        }
    }
}
