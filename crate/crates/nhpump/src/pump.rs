//! Paired time evolution of biorthogonal states and the biorthogonal
//! displacement (BOD) over one drive cycle.
//!
//! The right state evolves under `H(k, t/A)` and the left under
//! `H^dagger(k, t/A)`; their overlap `<psi_L|psi_R>` is conserved exactly by
//! the continuum equations, which makes the drift a sharp integrator
//! diagnostic. Norms grow like `exp(+-Im E t)`, so after every step both
//! vectors are rescaled by reciprocal real factors; every biorthogonal
//! matrix element is invariant under that rescaling.

use num_complex::Complex64 as C64;

use crate::eigen::{self, Band};
use crate::error::{Error, Result};
use crate::model::{self, Boundary, DriveParams, Matrix2, PhasePoint, TAU};
use crate::topology::{chern_plaquette, ChernResult, TorusGrid};

/// Overlap drift beyond which the integration is declared broken.
pub const OVERLAP_TOL: f64 = 1e-4;

/// Evolving biorthogonal pair at one instant.
///
/// The physical vectors are `psi * exp(log_scale)`; the stored ones are kept
/// at `||psi_right|| = 1` by reciprocal rescaling, which leaves
/// `<psi_L| A |psi_R>` untouched for every operator `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpState {
    pub psi_right: [C64; 2],
    pub psi_left: [C64; 2],
    pub time: f64,
    pub log_scale_right: f64,
    pub log_scale_left: f64,
}

impl PumpState {
    /// Biorthogonal overlap of the stored pair (equals the physical one).
    pub fn overlap(&self) -> C64 {
        eigen::inner(&self.psi_left, &self.psi_right)
    }
}

/// Per-drive-phase extrema of `Im E` over the momentum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImSample {
    pub time: f64,
    pub max_im: f64,
    pub min_im: f64,
}

/// Imaginary-part statistics of a band over the cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ImStats {
    /// max over cycle and momentum of |Im E|.
    pub max_abs_im: f64,
    /// max minus min over the cycle of `max_k Im E(k, t)`.
    pub im_range: f64,
    /// Total variation over the cycle of the envelope `max_k |Im E(k, t)|`;
    /// measures how strongly the imaginary magnitudes fluctuate within one
    /// period, which is what correlates with BOD deviations.
    pub im_total_variation: f64,
    pub im_series: Vec<ImSample>,
}

impl ImStats {
    fn from_minmax(times: &[f64], max_im: &[f64], min_im: &[f64]) -> ImStats {
        let series: Vec<ImSample> = times
            .iter()
            .zip(max_im.iter().zip(min_im.iter()))
            .map(|(&time, (&max, &min))| ImSample {
                time,
                max_im: max,
                min_im: min,
            })
            .collect();
        let max_abs_im = series
            .iter()
            .map(|s| s.max_im.abs().max(s.min_im.abs()))
            .fold(0.0, f64::max);
        let top = series.iter().map(|s| s.max_im).fold(f64::NEG_INFINITY, f64::max);
        let bottom = series.iter().map(|s| s.max_im).fold(f64::INFINITY, f64::min);
        let envelope: Vec<f64> = series
            .iter()
            .map(|s| s.max_im.abs().max(s.min_im.abs()))
            .collect();
        let im_total_variation = envelope
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .sum::<f64>();
        ImStats {
            max_abs_im,
            im_range: top - bottom,
            im_total_variation,
            im_series: series,
        }
    }
}

/// Outcome of a full pumping cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpResult {
    /// Net biorthogonal displacement; the physical prediction is `bod.re`,
    /// the imaginary part diagnoses non-adiabaticity.
    pub bod: C64,
    /// Accumulated displacement at each time sample; starts at 0, ends at `bod`.
    pub bod_vs_time: Vec<(f64, C64)>,
    /// Chern number of the same band on the matching torus grid.
    pub chern_reference: ChernResult,
    pub im_stats: ImStats,
}

/// Configuration of a [`bod_cycle`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig {
    pub boundary: Boundary,
    /// Momentum grid points for the Brillouin-zone integral.
    pub n_momentum: usize,
    /// RK4 steps over one cycle of physical time `2 pi * adiabatic_factor`.
    pub n_steps: usize,
}

impl PumpConfig {
    pub fn new(boundary: Boundary, n_momentum: usize, n_steps: usize) -> Self {
        PumpConfig {
            boundary,
            n_momentum,
            n_steps,
        }
    }
}

fn axpy(y: &[C64; 2], a: f64, x: &[C64; 2]) -> [C64; 2] {
    [y[0] + a * x[0], y[1] + a * x[1]]
}

/// `d psi / dt = -i M psi`
fn deriv(m: &Matrix2, psi: &[C64; 2]) -> [C64; 2] {
    let mv = m.mul_vec(psi);
    [-C64::I * mv[0], -C64::I * mv[1]]
}

fn rk4_step(
    h0: &Matrix2,
    h_half: &Matrix2,
    h1: &Matrix2,
    dt: f64,
    psi: &[C64; 2],
) -> [C64; 2] {
    let k1 = deriv(h0, psi);
    let k2 = deriv(h_half, &axpy(psi, dt / 2.0, &k1));
    let k3 = deriv(h_half, &axpy(psi, dt / 2.0, &k2));
    let k4 = deriv(h1, &axpy(psi, dt, &k3));
    [
        psi[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        psi[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Fixed-step RK4 evolution of a biorthogonal pair under a generic
/// time-dependent Hamiltonian, with the reciprocal-rescaling schedule.
///
/// `hamiltonian(t)` drives the right state; its dagger drives the left.
/// `on_state` sees every sample, including the initial one. `momentum_tag`
/// only labels a possible [`Error::OverlapCollapse`].
pub fn evolve_with<H, F>(
    hamiltonian: H,
    initial_right: [C64; 2],
    initial_left: [C64; 2],
    duration: f64,
    n_steps: usize,
    momentum_tag: f64,
    mut on_state: F,
) -> Result<()>
where
    H: Fn(f64) -> Matrix2,
    F: FnMut(&PumpState) -> Result<()>,
{
    evolve_with_schedule(
        hamiltonian,
        initial_right,
        initial_left,
        duration,
        n_steps,
        momentum_tag,
        1,
        &mut on_state,
    )
}

/// [`evolve_with`] with an explicit rescaling cadence (`rescale_every = 0`
/// disables rescaling); observables must not depend on the schedule.
#[allow(clippy::too_many_arguments)]
pub fn evolve_with_schedule<H, F>(
    hamiltonian: H,
    initial_right: [C64; 2],
    initial_left: [C64; 2],
    duration: f64,
    n_steps: usize,
    momentum_tag: f64,
    rescale_every: usize,
    on_state: &mut F,
) -> Result<()>
where
    H: Fn(f64) -> Matrix2,
    F: FnMut(&PumpState) -> Result<()>,
{
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    let dt = duration / n_steps as f64;
    let mut state = PumpState {
        psi_right: initial_right,
        psi_left: initial_left,
        time: 0.0,
        log_scale_right: 0.0,
        log_scale_left: 0.0,
    };
    on_state(&state)?;

    let mut h0 = hamiltonian(0.0);
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let h_half = hamiltonian(t + dt / 2.0);
        let h1 = hamiltonian(t + dt);
        state.psi_right = rk4_step(&h0, &h_half, &h1, dt, &state.psi_right);
        let (h0d, h_halfd, h1d) = (h0.dagger(), h_half.dagger(), h1.dagger());
        state.psi_left = rk4_step(&h0d, &h_halfd, &h1d, dt, &state.psi_left);
        state.time = (step + 1) as f64 * dt;
        h0 = h1;

        let drift = (state.overlap().norm() - 1.0).abs();
        if drift > OVERLAP_TOL {
            return Err(Error::OverlapCollapse {
                drift,
                time: state.time,
                momentum: momentum_tag,
            });
        }
        if rescale_every > 0 && (step + 1) % rescale_every == 0 {
            let r = eigen::norm(&state.psi_right);
            for c in state.psi_right.iter_mut() {
                *c /= r;
            }
            for c in state.psi_left.iter_mut() {
                *c *= r;
            }
            state.log_scale_right += r.ln();
            state.log_scale_left -= r.ln();
        }
        on_state(&state)?;
    }
    Ok(())
}

/// Initial biorthonormal pair of `band` at drive phase 0.
fn initial_pair(
    p: &DriveParams,
    momentum: f64,
    band: Band,
    boundary: Boundary,
) -> Result<eigen::BiorthPair> {
    let d = model::bloch_vector_at(p, &PhasePoint::new(momentum, 0.0), boundary)?;
    eigen::band_pair(&d, band).map_err(|e| match e {
        Error::ExceptionalPoint { abs_e, .. } => Error::GaplessSpectrum {
            min_abs_e: abs_e,
            momentum,
            phase: 0.0,
        },
        other => other,
    })
}

/// Evolves the band's biorthogonal pair at one momentum over a full cycle,
/// returning every time sample.
pub fn evolve_pair(
    p: &DriveParams,
    momentum: f64,
    band: Band,
    boundary: Boundary,
    n_steps: usize,
) -> Result<Vec<PumpState>> {
    p.validate()?;
    let pair = initial_pair(p, momentum, band, boundary)?;
    let a = p.adiabatic_factor;
    let mut states = Vec::with_capacity(n_steps + 1);
    evolve_with(
        |t| model::h_at(p, &PhasePoint::new(momentum, t / a), boundary).expect("radius validated"),
        pair.right,
        pair.left,
        p.period(),
        n_steps,
        momentum,
        |s| {
            states.push(*s);
            Ok(())
        },
    )?;
    Ok(states)
}

/// Biorthogonal velocity matrix element
/// `<psi_L| dH/dk |psi_R>` at the state's instant.
pub fn velocity(
    p: &DriveParams,
    state: &PumpState,
    momentum: f64,
    boundary: Boundary,
) -> Result<C64> {
    let phase = state.time / p.adiabatic_factor;
    let dh = model::dk_h(p, &PhasePoint::new(momentum, phase), boundary)?;
    Ok(eigen::inner(&state.psi_left, &dh.mul_vec(&state.psi_right)))
}

/// Evolves one pair per momentum grid point, integrates the velocity over
/// the cycle and the Brillouin zone into the BOD, and gathers the
/// imaginary-part statistics of the instantaneous spectrum along the way.
///
/// The Chern reference is computed on the matching square torus grid.
pub fn bod_cycle(p: &DriveParams, band: Band, cfg: &PumpConfig) -> Result<PumpResult> {
    p.validate()?;
    if cfg.n_momentum == 0 {
        return Err(Error::InvalidArgument("n_momentum must be positive".into()));
    }
    let grid = TorusGrid::square(cfg.n_momentum, cfg.boundary)?;
    let chern_reference = chern_plaquette(p, band, &grid)?;

    let n = cfg.n_steps;
    let a = p.adiabatic_factor;
    let dt = p.period() / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let mut v_sum = vec![C64::new(0.0, 0.0); n + 1];
    let mut max_im = vec![f64::NEG_INFINITY; n + 1];
    let mut min_im = vec![f64::INFINITY; n + 1];

    for j in 0..cfg.n_momentum {
        let momentum = TAU * j as f64 / cfg.n_momentum as f64;
        let pair = initial_pair(p, momentum, band, cfg.boundary)?;
        let mut idx = 0usize;
        evolve_with(
            |t| {
                model::h_at(p, &PhasePoint::new(momentum, t / a), cfg.boundary)
                    .expect("radius validated")
            },
            pair.right,
            pair.left,
            p.period(),
            n,
            momentum,
            |state| {
                let phase = state.time / a;
                let pt = PhasePoint::new(momentum, phase);
                let dh = model::dk_h(p, &pt, cfg.boundary).expect("radius validated");
                v_sum[idx] += eigen::inner(&state.psi_left, &dh.mul_vec(&state.psi_right));
                let d = model::bloch_vector_at(p, &pt, cfg.boundary).expect("radius validated");
                let im = eigen::band_energy(&d, band).im;
                max_im[idx] = max_im[idx].max(im);
                min_im[idx] = min_im[idx].min(im);
                idx += 1;
                Ok(())
            },
        )?;
    }

    // dk / 2 pi over the periodic momentum grid is the plain mean
    let inv = 1.0 / cfg.n_momentum as f64;
    let vbar: Vec<C64> = v_sum.iter().map(|v| v * inv).collect();
    let mut bod_vs_time = Vec::with_capacity(n + 1);
    let mut acc = C64::new(0.0, 0.0);
    bod_vs_time.push((0.0, acc));
    for i in 0..n {
        acc += (vbar[i] + vbar[i + 1]) * (dt / 2.0);
        bod_vs_time.push((times[i + 1], acc));
    }

    Ok(PumpResult {
        bod: acc,
        bod_vs_time,
        chern_reference,
        im_stats: ImStats::from_minmax(&times, &max_im, &min_im),
    })
}

/// Imaginary-part statistics of the instantaneous band spectrum over a
/// torus grid, without any time evolution; reproduces the spectra's
/// imaginary-part traces as data.
pub fn imag_fluctuation(p: &DriveParams, band: Band, grid: &TorusGrid) -> Result<ImStats> {
    let mut times = Vec::with_capacity(grid.n_phase + 1);
    let mut max_im = Vec::with_capacity(grid.n_phase + 1);
    let mut min_im = Vec::with_capacity(grid.n_phase + 1);
    // include the wrap-around sample so the series spans one closed cycle
    for j in 0..=grid.n_phase {
        let phase = TAU * j as f64 / grid.n_phase as f64;
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for i in 0..grid.n_momentum {
            let pt = PhasePoint::new(grid.momentum_at(i), phase);
            let d = model::bloch_vector_at(p, &pt, grid.boundary)?;
            let im = eigen::band_energy(&d, band).im;
            hi = hi.max(im);
            lo = lo.min(im);
        }
        times.push(phase);
        max_im.push(hi);
        min_im.push(lo);
    }
    Ok(ImStats::from_minmax(&times, &max_im, &min_im))
}
