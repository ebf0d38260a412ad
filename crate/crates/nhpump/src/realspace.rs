//! Finite open chain in the site basis: the exact-diagonalization oracle
//! for the GBZ spectrum.

use faer::Mat;
use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::DriveParams;

/// Single-particle Hamiltonian of an `n_cells`-cell open chain in the basis
/// `(1,A), (1,B), (2,A), (2,B), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub n_cells: usize,
    pub matrix: Array2<C64>,
}

/// Builds the open chain at one drive phase.
///
/// Intra-cell hopping is `t1 + gamma` from B to A-row and `t1 - gamma` back,
/// inter-cell hopping is the reciprocal `t2`, and the staggered potential
/// `+-delta sin t` alternates by sublattice. No wrap-around coupling.
pub fn build_chain(p: &DriveParams, drive_phase: f64, n_cells: usize) -> ChainOperator {
    let n = 2 * n_cells;
    let mut m = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    let t1 = p.t1();
    let t2 = p.t2(drive_phase);
    let onsite = p.delta * drive_phase.sin();
    for cell in 0..n_cells {
        let a = 2 * cell;
        let b = 2 * cell + 1;
        m[[a, a]] = C64::new(onsite, 0.0);
        m[[b, b]] = C64::new(-onsite, 0.0);
        m[[a, b]] = C64::new(t1 + p.gamma, 0.0);
        m[[b, a]] = C64::new(t1 - p.gamma, 0.0);
        if cell + 1 < n_cells {
            let a_next = 2 * (cell + 1);
            m[[a_next, b]] = C64::new(t2, 0.0);
            m[[b, a_next]] = C64::new(t2, 0.0);
        }
    }
    ChainOperator {
        n_cells,
        matrix: m,
    }
}

fn to_faer(chain: &ChainOperator) -> Mat<C64> {
    let n = chain.matrix.nrows();
    Mat::from_fn(n, n, |i, j| chain.matrix[[i, j]])
}

fn sort_spectrum(mut vals: Vec<C64>) -> Vec<C64> {
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    vals
}

/// All `2 n_cells` eigenvalues of the dense non-normal chain matrix,
/// sorted by `(Re, Im)`.
pub fn exact_spectrum(chain: &ChainOperator) -> Result<Vec<C64>> {
    let vals = to_faer(chain)
        .eigenvalues()
        .map_err(|_| Error::NoConvergence)?;
    Ok(sort_spectrum(vals))
}

/// Eigenvalues together with right eigenvectors (one per column, matching
/// the eigenvalue order; unsorted).
pub fn exact_eigensystem(chain: &ChainOperator) -> Result<(Vec<C64>, Array2<C64>)> {
    let evd = to_faer(chain).eigen().map_err(|_| Error::NoConvergence)?;
    let n = chain.matrix.nrows();
    let vals: Vec<C64> = (0..n).map(|i| evd.S()[i]).collect();
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| evd.U()[(i, j)]);
    Ok((vals, vecs))
}

/// Symmetric Hausdorff distance between two point sets in the complex plane.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "spectral_distance needs nonempty spectra"
    );
    let directed = |from: &[C64], to: &[C64]| {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Density-weighted mean cell index (1-based) of a state vector; small values
/// mean weight piled on the `l = 1` edge.
pub fn mean_cell_position(state: &[C64]) -> f64 {
    let mut weight = 0.0;
    let mut sum = 0.0;
    for (i, amp) in state.iter().enumerate() {
        let cell = (i / 2 + 1) as f64;
        let w = amp.norm_sqr();
        weight += w;
        sum += w * cell;
    }
    sum / weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_cell_matches_hand_matrix() {
        let p = DriveParams::new(0.5, 0.3);
        let chain = build_chain(&p, std::f64::consts::FRAC_PI_2, 1);
        assert_eq!(chain.matrix.dim(), (2, 2));
        assert_abs_diff_eq!(chain.matrix[[0, 0]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chain.matrix[[0, 1]].re, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(chain.matrix[[1, 0]].re, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(chain.matrix[[1, 1]].re, -1.0, epsilon = 1e-15);
        // eigenvalues +-sqrt(1.16)
        let spec = exact_spectrum(&chain).unwrap();
        assert_abs_diff_eq!(spec[0].re, -(1.16f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1].re, 1.16f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn sparsity_pattern_is_nearest_neighbour_only() {
        let p = DriveParams::new(0.4, 0.2).with_delta(0.7);
        let chain = build_chain(&p, 1.3, 4);
        let m = &chain.matrix;
        for i in 0usize..8 {
            for j in 0usize..8 {
                let allowed = i == j
                    || (i / 2 == j / 2)                       // intra-cell
                    || (i % 2 == 0 && j == i.wrapping_sub(1)) // A_l+1 <- B_l
                    || (j % 2 == 0 && i == j.wrapping_sub(1));
                if !allowed {
                    assert_eq!(m[[i, j]], C64::new(0.0, 0.0), "entry ({i}, {j})");
                }
            }
        }
        // open ends: no coupling between cell N and cell 1
        assert_eq!(m[[0, 7]], C64::new(0.0, 0.0));
        assert_eq!(m[[7, 0]], C64::new(0.0, 0.0));
    }

    #[test]
    fn hermitian_at_gamma_zero_with_real_spectrum() {
        let p = DriveParams::new(0.6, 0.0);
        let chain = build_chain(&p, 0.8, 12);
        for i in 0..24 {
            for j in 0..24 {
                assert_eq!(chain.matrix[[i, j]], chain.matrix[[j, i]].conj());
            }
        }
        let spec = exact_spectrum(&chain).unwrap();
        for e in spec {
            assert!(e.im.abs() < 1e-10, "Im E = {}", e.im);
        }
    }

    #[test]
    fn chiral_symmetry_at_t_zero() {
        // S M S = -M with S = diag(+1, -1, +1, -1, ...): every entry with
        // matching sublattice parity must vanish (including the diagonal)
        let p = DriveParams::new(0.5, 0.3);
        let chain = build_chain(&p, 0.0, 5);
        let m = &chain.matrix;
        for i in 0..10 {
            for j in 0..10 {
                if (i + j) % 2 == 0 {
                    assert_eq!(m[[i, j]], C64::new(0.0, 0.0), "entry ({i}, {j})");
                }
            }
        }
        // spectrum symmetric under negation
        let spec = exact_spectrum(&chain).unwrap();
        let negated: Vec<C64> = spec.iter().map(|e| -e).collect();
        assert!(spectral_distance(&spec, &negated) < 1e-9);
    }

    #[test]
    fn gamma_sign_flip_is_a_similarity() {
        // explicit diagonal gauge: s(A_l) = r^l * a, s(B_l) = r^l * b with
        // a/b = (t1 - gamma)/(t1 + gamma), r = 1/(a/b) maps gamma -> -gamma
        let p = DriveParams::new(0.5, 0.3);
        let q = DriveParams::new(0.5, -0.3);
        let t = 0.9;
        let n = 8;
        let chain_p = build_chain(&p, t, n);
        let chain_q = build_chain(&q, t, n);

        let ratio = (p.t1() - p.gamma) / (p.t1() + p.gamma);
        let scale = |idx: usize| {
            let cell = idx / 2;
            let base = (1.0 / ratio).powi(cell as i32);
            if idx % 2 == 0 {
                base * ratio
            } else {
                base
            }
        };
        for i in 0..2 * n {
            for j in 0..2 * n {
                let transformed = chain_p.matrix[[i, j]] * scale(i) / scale(j);
                assert_abs_diff_eq!(
                    (transformed - chain_q.matrix[[i, j]]).norm(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }
        let spec_p = exact_spectrum(&chain_p).unwrap();
        let spec_q = exact_spectrum(&chain_q).unwrap();
        assert!(spectral_distance(&spec_p, &spec_q) < 1e-8);
    }

    #[test]
    fn eigenpair_residuals_below_contract() {
        let p = DriveParams::new(0.5, 0.3);
        let chain = build_chain(&p, 0.3, 20);
        let (vals, vecs) = exact_eigensystem(&chain).unwrap();
        let m = &chain.matrix;
        let norm_m = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (idx, &lambda) in vals.iter().enumerate() {
            let v: Vec<C64> = (0..m.nrows()).map(|i| vecs[[i, idx]]).collect();
            let mut residual = 0.0f64;
            for i in 0..m.nrows() {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m.ncols() {
                    acc += m[[i, j]] * v[j];
                }
                residual += (acc - lambda * v[i]).norm_sqr();
            }
            let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(
                residual.sqrt() < 1e-8 * norm_m * vnorm,
                "eigenpair {idx}: residual {}",
                residual.sqrt()
            );
        }
    }

    #[test]
    fn hausdorff_distance_basics() {
        let z = |re: f64| C64::new(re, 0.0);
        assert_eq!(spectral_distance(&[z(0.0), z(1.0)], &[z(0.0), z(1.0)]), 0.0);
        assert_eq!(spectral_distance(&[z(0.0)], &[z(1.0)]), 1.0);
        // asymmetric sup attained away from the shared point
        assert_eq!(spectral_distance(&[z(0.0), z(1.0)], &[z(0.0)]), 1.0);
    }

    #[test]
    fn skin_localization_follows_gbz_radius() {
        // Gamma < 1: weight piles on the l = 1 edge; Gamma > 1: opposite edge
        let n = 30;
        let left = build_chain(&DriveParams::new(0.5, 0.3), 0.3, n);
        let (_, vecs) = exact_eigensystem(&left).unwrap();
        let mean_left: f64 = (0..2 * n)
            .map(|j| {
                let v: Vec<C64> = (0..2 * n).map(|i| vecs[[i, j]]).collect();
                mean_cell_position(&v)
            })
            .sum::<f64>()
            / (2 * n) as f64;
        assert!(mean_left < n as f64 / 2.0, "mean cell {mean_left}");

        let right = build_chain(&DriveParams::new(0.5, -0.3), 0.3, n);
        let (_, vecs) = exact_eigensystem(&right).unwrap();
        let mean_right: f64 = (0..2 * n)
            .map(|j| {
                let v: Vec<C64> = (0..2 * n).map(|i| vecs[[i, j]]).collect();
                mean_cell_position(&v)
            })
            .sum::<f64>()
            / (2 * n) as f64;
        assert!(mean_right > n as f64 / 2.0, "mean cell {mean_right}");
    }

    #[test]
    fn gbz_spectrum_attracts_the_finite_chain() {
        let p = DriveParams::new(0.5, 0.3);
        let t = 0.3;
        let mut dist = Vec::new();
        for &n in &[15usize, 30, 60] {
            let exact = exact_spectrum(&build_chain(&p, t, n)).unwrap();
            let gbz = crate::gbz::obc_spectrum_gbz(&p, t, 4 * n).unwrap();
            dist.push(spectral_distance(&exact, &gbz));
        }
        assert!(dist[2] < dist[1] && dist[1] < dist[0], "distances {dist:?}");
        assert!(dist[2] < 0.05, "d(60) = {}", dist[2]);
    }
}
