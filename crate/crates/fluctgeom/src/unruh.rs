//! Accelerated-frame kinematics and the thermal phase chain: the
//! transformed Hamiltonian, the phase that keeps the Schroedinger equation
//! form-invariant under uniform acceleration, the de Broglie time ↔
//! temperature map, the acceleration ↔ temperature law, the Boltzmann-like
//! exponent, and the reformulation of the phase as the line integral
//! Δξ(t) of a B-field contraction along the particle's phase-space
//! trajectory (constant or position-dependent B).

use num_complex::Complex;
use thiserror::Error;

use crate::quad::simpson_rule;
use crate::scalar::{from_f64, spec_tol, to_f64, Scalar};

/// Default Simpson step count for the line integral (power of two >= 16;
/// the integrands of interest are low-degree polynomials in τ).
pub const DEFAULT_LINE_INTEGRAL_STEPS: usize = 1024;

/// Minimum admissible Simpson step count.
pub const MIN_LINE_INTEGRAL_STEPS: usize = 16;

/// Relative finite-difference tolerance for trajectory derivative fields.
pub const TRAJECTORY_CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnruhError {
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("line integral needs at least {MIN_LINE_INTEGRAL_STEPS} steps, got {0}")]
    TooFewSteps(usize),
    #[error(
        "trajectory derivative field disagrees with the path at tau = {tau}: \
         |analytic - finite difference| = {mismatch:e}"
    )]
    InconsistentTrajectory { tau: f64, mismatch: f64 },
    #[error("B-field coefficient is not finite on the trajectory at tau = {tau}")]
    NonFiniteField { tau: f64 },
}

/// ħ, c, k_B. Defaults to natural units (all 1); an SI preset is provided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T: Scalar> {
    pub hbar: T,
    pub c: T,
    pub k_b: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn new(hbar: T, c: T, k_b: T) -> Result<Self, UnruhError> {
        for (v, name) in [(hbar, "hbar"), (c, "c"), (k_b, "k_B")] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(UnruhError::NonPositive(name));
            }
        }
        Ok(Self { hbar, c, k_b })
    }

    /// ħ = c = k_B = 1.
    pub fn natural() -> Self {
        Self {
            hbar: T::one(),
            c: T::one(),
            k_b: T::one(),
        }
    }

    /// 2018 CODATA values in SI units.
    pub fn si() -> Self {
        Self {
            hbar: from_f64(1.054_571_817e-34),
            c: from_f64(2.997_924_58e8),
            k_b: from_f64(1.380_649e-23),
        }
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::natural()
    }
}

/// Mass and constant acceleration of the noninertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec<T: Scalar> {
    pub alpha: T,
    pub m: T,
}

impl<T: Scalar> FrameSpec<T> {
    pub fn new(alpha: T, m: T) -> Result<Self, UnruhError> {
        if !alpha.is_finite() {
            return Err(UnruhError::NonFinite("alpha"));
        }
        if !(m > T::zero() && m.is_finite()) {
            return Err(UnruhError::NonPositive("m"));
        }
        Ok(Self { alpha, m })
    }
}

/// Inertial-frame coordinate of a point given in the accelerated frame:
/// x = x' + ½ α t². The transverse coordinates and time pass through
/// unchanged.
pub fn accelerated_coords<T: Scalar>(xp: T, t: T, fs: &FrameSpec<T>) -> T {
    xp + from_f64::<T>(0.5) * fs.alpha * t * t
}

/// Hamiltonian and momentum seen from the uniformly accelerated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedHamiltonian<T> {
    /// H' = H − p_x α t + (m/2) α² t²
    pub h_prime: T,
    /// p' = p_x − m α t
    pub p_prime: T,
}

pub fn transformed_hamiltonian<T: Scalar>(
    h: T,
    p_x: T,
    t: T,
    fs: &FrameSpec<T>,
) -> TransformedHamiltonian<T> {
    let half = from_f64::<T>(0.5);
    TransformedHamiltonian {
        h_prime: h - p_x * fs.alpha * t + half * fs.m * fs.alpha * fs.alpha * t * t,
        p_prime: p_x - fs.m * fs.alpha * t,
    }
}

/// The real phase φ(t) = m α² t³ / (3ħ) such that ψ' = e^{iφ} ψ keeps the
/// Schroedinger equation form-invariant in the accelerated frame (with the
/// classical momentum p_x = mαt substituted).
pub fn unruh_phase<T: Scalar>(fs: &FrameSpec<T>, t: T, pc: &PhysicalConstants<T>) -> T {
    fs.m * fs.alpha * fs.alpha * t * t * t / (from_f64::<T>(3.0) * pc.hbar)
}

/// Complex time from the inverse proportionality −i/t = k_B T/ħ:
/// t = −iħ/(k_B T), of magnitude ħ/(k_B T).
pub fn debroglie_time<T: Scalar>(
    temperature: T,
    pc: &PhysicalConstants<T>,
) -> Result<Complex<T>, UnruhError> {
    if !(temperature > T::zero() && temperature.is_finite()) {
        return Err(UnruhError::NonPositive("temperature"));
    }
    Ok(Complex::new(T::zero(), -pc.hbar / (pc.k_b * temperature)))
}

/// Temperature of a frame of acceleration α: T = ħα/(2π c k_B).
pub fn unruh_temperature<T: Scalar>(alpha: T, pc: &PhysicalConstants<T>) -> Result<T, UnruhError> {
    if !alpha.is_finite() || alpha < T::zero() {
        return Err(UnruhError::Negative("alpha"));
    }
    Ok(pc.hbar * alpha / (T::two_pi() * pc.c * pc.k_b))
}

/// Acceleration producing a given temperature: α = 2π c k_B T/ħ. Exact
/// inverse of [`unruh_temperature`].
pub fn acceleration_of<T: Scalar>(
    temperature: T,
    pc: &PhysicalConstants<T>,
) -> Result<T, UnruhError> {
    if !temperature.is_finite() || temperature < T::zero() {
        return Err(UnruhError::Negative("temperature"));
    }
    Ok(T::two_pi() * pc.c * pc.k_b * temperature / pc.hbar)
}

/// Exponent E of the Boltzmann-like factor ψ' = e^E ψ:
/// E = −(4π²/3) m c² / (k_B T).
pub fn thermal_exponent<T: Scalar>(
    m: T,
    temperature: T,
    pc: &PhysicalConstants<T>,
) -> Result<T, UnruhError> {
    if !(m > T::zero() && m.is_finite()) {
        return Err(UnruhError::NonPositive("m"));
    }
    if !(temperature > T::zero() && temperature.is_finite()) {
        return Err(UnruhError::NonPositive("temperature"));
    }
    let four_thirds = from_f64::<T>(4.0 / 3.0);
    Ok(-four_thirds * T::pi() * T::pi() * m * pc.c * pc.c / (pc.k_b * temperature))
}

/// The particle path x(τ), p_x(τ) with its derivative fields. Derivatives
/// must agree with the path to the finite-difference tolerance
/// [`TRAJECTORY_CONSISTENCY_TOL`] on the integration window.
pub struct TrajectorySpec<T: Scalar> {
    x_of_t: Box<dyn Fn(T) -> T + Send + Sync>,
    p_of_t: Box<dyn Fn(T) -> T + Send + Sync>,
    dx_dt: Box<dyn Fn(T) -> T + Send + Sync>,
    dp_dt: Box<dyn Fn(T) -> T + Send + Sync>,
}

impl<T: Scalar> TrajectorySpec<T> {
    pub fn new(
        x_of_t: impl Fn(T) -> T + Send + Sync + 'static,
        p_of_t: impl Fn(T) -> T + Send + Sync + 'static,
        dx_dt: impl Fn(T) -> T + Send + Sync + 'static,
        dp_dt: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            x_of_t: Box::new(x_of_t),
            p_of_t: Box::new(p_of_t),
            dx_dt: Box::new(dx_dt),
            dp_dt: Box::new(dp_dt),
        }
    }

    /// The default path of a particle at rest in the accelerated frame:
    /// x = ½ατ², p = mατ (the classical expectation ⟨p_x⟩ = mαt).
    pub fn uniform_acceleration(fs: &FrameSpec<T>) -> Self {
        let (alpha, m) = (fs.alpha, fs.m);
        let half = from_f64::<T>(0.5);
        Self::new(
            move |tau| half * alpha * tau * tau,
            move |tau| m * alpha * tau,
            move |tau| alpha * tau,
            move |tau| {
                let _ = tau;
                m * alpha
            },
        )
    }

    pub fn x(&self, tau: T) -> T {
        (self.x_of_t)(tau)
    }
    pub fn p(&self, tau: T) -> T {
        (self.p_of_t)(tau)
    }
    pub fn x_dot(&self, tau: T) -> T {
        (self.dx_dt)(tau)
    }
    pub fn p_dot(&self, tau: T) -> T {
        (self.dp_dt)(tau)
    }

    /// Spot-check the derivative fields against central differences of the
    /// path fields at interior sample points of the window.
    pub fn check_consistency(&self, window: (T, T), tol: T) -> Result<(), UnruhError> {
        let (lo, hi) = window;
        let span = hi - lo;
        if span <= T::zero() {
            return Ok(());
        }
        let samples = 9;
        for k in 1..samples {
            let tau = lo + span * from_f64::<T>(k as f64 / samples as f64);
            let h = from_f64::<T>(1e-5) * (T::one() + tau.abs());
            let scale = T::one() + self.x_dot(tau).abs() + self.p_dot(tau).abs();
            let fd_x = (self.x(tau + h) - self.x(tau - h)) / (from_f64::<T>(2.0) * h);
            let fd_p = (self.p(tau + h) - self.p(tau - h)) / (from_f64::<T>(2.0) * h);
            let err_x = (fd_x - self.x_dot(tau)).abs();
            let err_p = (fd_p - self.p_dot(tau)).abs();
            let worst = err_x.max(err_p);
            if !(worst <= tol * scale) {
                return Err(UnruhError::InconsistentTrajectory {
                    tau: to_f64(tau),
                    mismatch: to_f64(worst),
                });
            }
        }
        Ok(())
    }
}

/// The scalar coefficient B(x, p_x) of the phase-space 2-form
/// B(x, p_x) dx ∧ dp_x. Defaults to the constant 2/3, the value that
/// reproduces the accelerated-frame phase.
pub struct BFieldSpec<T: Scalar> {
    coefficient: Box<dyn Fn(T, T) -> T + Send + Sync>,
}

impl<T: Scalar> BFieldSpec<T> {
    pub fn new(coefficient: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self {
            coefficient: Box::new(coefficient),
        }
    }

    pub fn constant(b: T) -> Self {
        Self::new(move |_, _| b)
    }

    pub fn eval(&self, x: T, p: T) -> T {
        (self.coefficient)(x, p)
    }
}

impl<T: Scalar> Default for BFieldSpec<T> {
    fn default() -> Self {
        Self::constant(from_f64(2.0 / 3.0))
    }
}

/// Sign convention for the contraction i_X B in the line integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractionConvention {
    /// Component form δξ = a·B dp_x + b·B dx with both terms positive;
    /// on the default trajectory this integrates (3/2)·B·m·α²·τ² and gives
    /// Δξ = ½ B m α² t³ for constant B.
    #[default]
    PaperComponents,
    /// The antisymmetric matrix convention (i_X B)_i = B_ij X^j used by the
    /// doubled-fibre algebra; it flips the sign of the p·B·dx term, turning
    /// the default-path integrand into −½ B m α² τ².
    Antisymmetric,
}

/// Line integral Δξ(t) = ∫₀ᵗ i_X B along the trajectory, with X the
/// phase-space position vector, by composite Simpson quadrature.
///
/// For constant B and the uniform-acceleration path the result is
/// ½ B m α² t³ (paper-components convention), matched to machine precision
/// since Simpson is exact on quadratics.
pub fn delta_xi<T: Scalar>(
    b: &BFieldSpec<T>,
    traj: &TrajectorySpec<T>,
    t: T,
    steps: usize,
    convention: ContractionConvention,
) -> Result<T, UnruhError> {
    if !t.is_finite() {
        return Err(UnruhError::NonFinite("t"));
    }
    if t < T::zero() {
        return Err(UnruhError::Negative("t"));
    }
    if steps < MIN_LINE_INTEGRAL_STEPS {
        return Err(UnruhError::TooFewSteps(steps));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    traj.check_consistency((T::zero(), t), spec_tol(TRAJECTORY_CONSISTENCY_TOL))?;

    let points = steps + 1 + (steps % 2);
    let (nodes, weights) = simpson_rule(T::zero(), t, points);
    let mut acc = T::zero();
    for (tau, w) in nodes.iter().zip(&weights) {
        let x = traj.x(*tau);
        let p = traj.p(*tau);
        let coeff = b.eval(x, p);
        if !coeff.is_finite() {
            return Err(UnruhError::NonFiniteField { tau: to_f64(*tau) });
        }
        let pulled_back = match convention {
            ContractionConvention::PaperComponents => {
                x * coeff * traj.p_dot(*tau) + p * coeff * traj.x_dot(*tau)
            }
            ContractionConvention::Antisymmetric => {
                x * coeff * traj.p_dot(*tau) - p * coeff * traj.x_dot(*tau)
            }
        };
        acc += *w * pulled_back;
    }
    Ok(acc)
}

/// The unit-modulus factor exp(i Δξ/ħ) that multiplies the wavefunction.
pub fn transform_wavefunction_phase<T: Scalar>(
    delta_xi_value: T,
    pc: &PhysicalConstants<T>,
) -> Complex<T> {
    let theta = delta_xi_value / pc.hbar;
    Complex::new(theta.cos(), theta.sin())
}
