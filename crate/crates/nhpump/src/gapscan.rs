//! Gap minima and gapless parameter sets over the drive torus.
//!
//! The gap measure is `min |E|` over (momentum, drive phase). A coarse grid
//! scan is followed by deterministic grid subdivision around the argmin;
//! |E| is a square-root branch point at exceptional points, where descent
//! methods stall but subdivision keeps contracting.

use crate::eigen::{self, principal_sqrt};
use crate::error::{Error, Result};
use crate::model::{bloch_vector_at, Boundary, DriveParams, PhasePoint, TAU};
use crate::topology::TorusGrid;

/// Refinement schedule: each round shrinks the sampling step by `factor`
/// and rescans a `(2 factor + 1)^2` patch spanning one previous step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOpts {
    pub rounds: usize,
    pub factor: usize,
}

impl Default for RefineOpts {
    fn default() -> Self {
        RefineOpts {
            rounds: 3,
            factor: 10,
        }
    }
}

impl RefineOpts {
    /// Deep schedule used by parameter sweeps: six rounds resolve off-grid
    /// exceptional points down to |E| ~ 1e-4, which the default tolerance
    /// of [`gapless_intervals`] needs (|E| shrinks only like the square
    /// root of the grid offset near an EP).
    pub fn deep() -> Self {
        RefineOpts {
            rounds: 6,
            factor: 10,
        }
    }
}

/// Refined gap minimum at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub mu: f64,
    /// min over the torus of |E| after refinement.
    pub min_abs_e: f64,
    pub argmin: PhasePoint,
    /// Phase rigidity at the argmin; near 0 flags an exceptional point.
    pub ep_defect_at_argmin: f64,
}

/// Gapless scan over mu at fixed gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct GaplessScan {
    /// One report per swept (non-excluded) mu, in sweep order.
    pub reports: Vec<GapReport>,
    /// Maximal runs of consecutive gapless grid points, as (mu_lo, mu_hi).
    pub intervals: Vec<(f64, f64)>,
    /// OBC-only: mu values where |mu| = |gamma| leaves the GBZ undefined.
    pub excluded: Vec<f64>,
}

fn abs_energy(p: &DriveParams, boundary: Boundary, momentum: f64, phase: f64) -> Result<f64> {
    let d = bloch_vector_at(p, &PhasePoint::new(momentum, phase), boundary)?;
    Ok(principal_sqrt(d.e_squared()).norm())
}

/// Coarse scan plus local subdivision for the minimal |E| over the torus.
pub fn min_gap(
    p: &DriveParams,
    boundary: Boundary,
    grid: &TorusGrid,
    refine: RefineOpts,
) -> Result<GapReport> {
    let mut best = (f64::INFINITY, 0.0f64, 0.0f64);
    for i in 0..grid.n_momentum {
        for j in 0..grid.n_phase {
            let (k, t) = (grid.momentum_at(i), grid.phase_at(j));
            let e = abs_energy(p, boundary, k, t)?;
            if e < best.0 {
                best = (e, k, t);
            }
        }
    }

    let mut step_k = TAU / grid.n_momentum as f64;
    let mut step_t = TAU / grid.n_phase as f64;
    for _ in 0..refine.rounds {
        step_k /= refine.factor as f64;
        step_t /= refine.factor as f64;
        let center = (best.1, best.2);
        let span = refine.factor as isize;
        for di in -span..=span {
            for dj in -span..=span {
                let k = center.0 + di as f64 * step_k;
                let t = center.1 + dj as f64 * step_t;
                let e = abs_energy(p, boundary, k, t)?;
                if e < best.0 {
                    best = (e, k, t);
                }
            }
        }
    }

    let argmin = PhasePoint::new(best.1.rem_euclid(TAU), best.2.rem_euclid(TAU));
    let d = bloch_vector_at(p, &argmin, boundary)?;
    Ok(GapReport {
        mu: p.mu,
        min_abs_e: best.0,
        argmin,
        ep_defect_at_argmin: eigen::ep_defect(&d),
    })
}

/// Sweeps mu at fixed gamma, marks gapless points where the refined
/// `min |E|` falls below `tol`, and merges adjacent marks into intervals.
///
/// Under open boundaries, mu values with `|mu| = |gamma|` are excluded from
/// the sweep and reported separately. The sweep uses `delta = 1` and the
/// literal drive.
pub fn gapless_intervals(
    gamma: f64,
    mu_range: (f64, f64),
    n_mu: usize,
    boundary: Boundary,
    tol: f64,
    grid_points: usize,
    refine: RefineOpts,
) -> Result<GaplessScan> {
    if n_mu < 50 {
        return Err(Error::InvalidArgument(format!(
            "n_mu must be >= 50, got {n_mu}"
        )));
    }
    let grid = TorusGrid::square(grid_points, boundary)?;
    let (lo, hi) = mu_range;
    let step = (hi - lo) / (n_mu - 1) as f64;

    let mut reports = Vec::with_capacity(n_mu);
    let mut excluded = Vec::new();
    for i in 0..n_mu {
        let mu = lo + step * i as f64;
        let p = DriveParams::new(mu, gamma);
        match min_gap(&p, boundary, &grid, refine) {
            Ok(r) => reports.push(r),
            Err(Error::DegenerateGBZ { .. }) => excluded.push(mu),
            Err(e) => return Err(e),
        }
    }
    let marks: Vec<(f64, bool)> = reports.iter().map(|r| (r.mu, r.min_abs_e < tol)).collect();
    Ok(GaplessScan {
        reports,
        intervals: merge_gapless_marks(&marks),
        excluded,
    })
}

/// Merges consecutive gapless marks of an ordered mu sweep into
/// `(mu_lo, mu_hi)` intervals; an isolated mark becomes a width-zero pair.
pub fn merge_gapless_marks(marks: &[(f64, bool)]) -> Vec<(f64, f64)> {
    let mut intervals = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for &(mu, gapless) in marks {
        open = match (open, gapless) {
            (None, true) => Some((mu, mu)),
            (Some((a, _)), true) => Some((a, mu)),
            (Some(done), false) => {
                intervals.push(done);
                None
            }
            (None, false) => None,
        };
    }
    if let Some(done) = open {
        intervals.push(done);
    }
    intervals
}
