//! The driven non-Hermitian Rice-Mele chain in momentum space.
//!
//! The Bloch Hamiltonian is `H(k, t) = d(k, t) . sigma` with
//! `d1 = t1 + t2 cos k`, `d2 = t2 sin k + i gamma`, `d3 = delta sin t`,
//! where `t1 = mu` and `t2 = mu - cos t` are the intra- and inter-cell
//! hoppings along the drive. Open boundaries are handled through the
//! generalized Brillouin zone: `e^{ik} -> Gamma e^{i theta}` with the
//! GBZ radius `Gamma` from [`crate::gbz::gbz_radius`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gbz;

pub const TAU: f64 = std::f64::consts::TAU;

/// Model constants defining the Hamiltonian family.
///
/// The drive phase advances as `time / adiabatic_factor`, so one cycle spans
/// physical time `2 pi * adiabatic_factor`. Geometry (Chern numbers, GBZ,
/// gap scans) lives on the drive-phase torus and never sees the slowdown;
/// `adiabatic_factor = 1` reproduces the literal drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Hopping scale mu; `t1 = mu` at every drive phase.
    pub mu: f64,
    /// Nonreciprocity gamma.
    pub gamma: f64,
    /// Staggered-potential amplitude.
    pub delta: f64,
    /// Drive-slowdown multiplier A >= treated as > 0; A = 1 is the literal drive.
    pub adiabatic_factor: f64,
}

impl DriveParams {
    /// Parameters with `delta = 1` and `adiabatic_factor = 1`.
    pub fn new(mu: f64, gamma: f64) -> Self {
        DriveParams {
            mu,
            gamma,
            delta: 1.0,
            adiabatic_factor: 1.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_adiabatic_factor(mut self, a: f64) -> Self {
        self.adiabatic_factor = a;
        self
    }

    /// Checks that all constants are finite and the slowdown is positive.
    pub fn validate(&self) -> Result<()> {
        let all_finite = self.mu.is_finite()
            && self.gamma.is_finite()
            && self.delta.is_finite()
            && self.adiabatic_factor.is_finite();
        if !all_finite {
            return Err(Error::InvalidArgument(
                "drive parameters must be finite".into(),
            ));
        }
        if self.adiabatic_factor <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "adiabatic_factor must be > 0, got {}",
                self.adiabatic_factor
            )));
        }
        Ok(())
    }

    /// Intra-cell hopping `t1 = mu` (drive-phase independent).
    pub fn t1(&self) -> f64 {
        self.mu
    }

    /// Inter-cell hopping `t2(t) = mu - cos t` at drive phase `t`.
    pub fn t2(&self, drive_phase: f64) -> f64 {
        self.mu - drive_phase.cos()
    }

    /// Physical duration of one drive cycle, `2 pi * adiabatic_factor`.
    pub fn period(&self) -> f64 {
        TAU * self.adiabatic_factor
    }
}

/// A point on the closed (momentum, drive-phase) torus.
///
/// `momentum` is `k` under periodic boundaries and the GBZ angle `theta`
/// under open boundaries; both coordinates are `2 pi`-periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub momentum: f64,
    pub drive_phase: f64,
}

impl PhasePoint {
    pub fn new(momentum: f64, drive_phase: f64) -> Self {
        PhasePoint {
            momentum,
            drive_phase,
        }
    }
}

/// Boundary condition selector: Bloch momentum or GBZ angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Pbc,
    Obc,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Pbc => write!(f, "pbc"),
            Boundary::Obc => write!(f, "obc"),
        }
    }
}

/// The complex Bloch vector `(d1, d2, d3)` at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
}

impl BlochVector {
    /// `d1^2 + d2^2 + d3^2 = E^2`; the squared band energy.
    pub fn e_squared(&self) -> C64 {
        self.d1 * self.d1 + self.d2 * self.d2 + self.d3 * self.d3
    }

    /// `d . sigma` as an explicit 2x2 matrix.
    pub fn matrix(&self) -> Matrix2 {
        let i = C64::I;
        Matrix2([
            [self.d3, self.d1 - i * self.d2],
            [self.d1 + i * self.d2, -self.d3],
        ])
    }

    /// Component-wise complex conjugate; the Bloch vector of `H^dagger`.
    pub fn conjugate(&self) -> BlochVector {
        BlochVector {
            d1: self.d1.conj(),
            d2: self.d2.conj(),
            d3: self.d3.conj(),
        }
    }
}

/// Dense 2x2 complex matrix in row-major layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[C64; 2]; 2]);

pub const SIGMA_1: Matrix2 = Matrix2([
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
]);
pub const SIGMA_2: Matrix2 = Matrix2([
    [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
    [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
]);
pub const SIGMA_3: Matrix2 = Matrix2([
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
]);

impl Matrix2 {
    pub fn zero() -> Self {
        Matrix2([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Matrix2 {
        Matrix2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn sub(&self, other: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] - other.0[r][c];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Matrix2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] *= s;
            }
        }
        out
    }

    /// Largest entry magnitude; handy as a matrix distance after `sub`.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// The Bloch vector of the periodic chain at `pt`.
pub fn bloch_vector(p: &DriveParams, pt: &PhasePoint) -> BlochVector {
    let t2 = p.t2(pt.drive_phase);
    let (sk, ck) = pt.momentum.sin_cos();
    BlochVector {
        d1: C64::new(p.t1() + t2 * ck, 0.0),
        d2: C64::new(t2 * sk, p.gamma),
        d3: C64::new(p.delta * pt.drive_phase.sin(), 0.0),
    }
}

/// The effective Bloch vector of the open chain: `e^{ik} -> Gamma e^{i theta}`.
///
/// Fails with [`Error::DegenerateGBZ`] when the GBZ radius is 0 or infinite.
pub fn bloch_vector_gbz(p: &DriveParams, pt: &PhasePoint) -> Result<BlochVector> {
    let radius = gbz::gbz_radius(p)?;
    let beta = C64::from_polar(radius, pt.momentum);
    let beta_inv = C64::new(1.0, 0.0) / beta;
    let t2 = C64::new(p.t2(pt.drive_phase), 0.0);
    let i = C64::I;
    Ok(BlochVector {
        d1: C64::new(p.t1(), 0.0) + t2 * (beta + beta_inv) * 0.5,
        d2: t2 * (beta - beta_inv) / (2.0 * i) + i * p.gamma,
        d3: C64::new(p.delta * pt.drive_phase.sin(), 0.0),
    })
}

/// Bloch vector for either boundary condition.
pub fn bloch_vector_at(p: &DriveParams, pt: &PhasePoint, boundary: Boundary) -> Result<BlochVector> {
    match boundary {
        Boundary::Pbc => Ok(bloch_vector(p, pt)),
        Boundary::Obc => bloch_vector_gbz(p, pt),
    }
}

/// The PBC Hamiltonian, built entry by entry:
/// `[[delta sin t, mu + gamma + e^{-ik} t2], [mu - gamma + e^{ik} t2, -delta sin t]]`.
pub fn h_pbc(p: &DriveParams, pt: &PhasePoint) -> Matrix2 {
    let t2 = p.t2(pt.drive_phase);
    let onsite = p.delta * pt.drive_phase.sin();
    let phase = C64::from_polar(1.0, pt.momentum);
    Matrix2([
        [
            C64::new(onsite, 0.0),
            C64::new(p.mu + p.gamma, 0.0) + phase.conj() * t2,
        ],
        [
            C64::new(p.mu - p.gamma, 0.0) + phase * t2,
            C64::new(-onsite, 0.0),
        ],
    ])
}

/// The OBC effective Hamiltonian on the GBZ circle:
/// `[[delta sin t, mu + gamma + t2 / (Gamma e^{i theta})],
///   [mu - gamma + Gamma e^{i theta} t2, -delta sin t]]`.
pub fn h_obc(p: &DriveParams, pt: &PhasePoint) -> Result<Matrix2> {
    let radius = gbz::gbz_radius(p)?;
    let t2 = p.t2(pt.drive_phase);
    let onsite = p.delta * pt.drive_phase.sin();
    let beta = C64::from_polar(radius, pt.momentum);
    Ok(Matrix2([
        [
            C64::new(onsite, 0.0),
            C64::new(p.mu + p.gamma, 0.0) + C64::new(t2, 0.0) / beta,
        ],
        [
            C64::new(p.mu - p.gamma, 0.0) + beta * t2,
            C64::new(-onsite, 0.0),
        ],
    ]))
}

/// Hamiltonian for either boundary condition.
pub fn h_at(p: &DriveParams, pt: &PhasePoint, boundary: Boundary) -> Result<Matrix2> {
    match boundary {
        Boundary::Pbc => Ok(h_pbc(p, pt)),
        Boundary::Obc => h_obc(p, pt),
    }
}

/// Analytic momentum derivative of the Hamiltonian.
///
/// PBC: `d/dk` of [`h_pbc`]; OBC: `d/dtheta` of [`h_obc`]. The diagonal is
/// momentum independent, so only the hoppings survive.
pub fn dk_h(p: &DriveParams, pt: &PhasePoint, boundary: Boundary) -> Result<Matrix2> {
    let t2 = p.t2(pt.drive_phase);
    let i = C64::I;
    let zero = C64::new(0.0, 0.0);
    let beta = match boundary {
        Boundary::Pbc => C64::from_polar(1.0, pt.momentum),
        Boundary::Obc => C64::from_polar(gbz::gbz_radius(p)?, pt.momentum),
    };
    Ok(Matrix2([
        [zero, -i * t2 / beta],
        [i * t2 * beta, zero],
    ]))
}
