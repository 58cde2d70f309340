//! Coherent-state expectations for the 1-D harmonic oscillator
//! (ħ = 1, unit frequency, H = A†A + ½): the closed forms
//! ⟨H⟩ = |z|² + ½ and ΔH = |z|, backed by a truncated Fock-space vector
//! that serves as an independent numerical oracle.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{from_f64, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("coherent amplitude must be finite")]
    NonFiniteAmplitude,
    #[error("relative fluctuation is undefined at z = 0")]
    ZeroAmplitude,
    #[error("cutoff {cutoff} is too small for |z| = {abs_z}; need at least {required}")]
    CutoffTooSmall {
        cutoff: usize,
        required: usize,
        abs_z: f64,
    },
}

/// The dimensionless coherent amplitude z = (q + ip)/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude<T: Scalar> {
    z: Complex<T>,
}

impl<T: Scalar> CoherentAmplitude<T> {
    pub fn new(z: Complex<T>) -> Result<Self, CoherentError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(CoherentError::NonFiniteAmplitude);
        }
        Ok(Self { z })
    }

    pub fn from_parts(re: T, im: T) -> Result<Self, CoherentError> {
        Self::new(Complex::new(re, im))
    }

    /// Build from Darboux coordinates: z = (q + ip)/√2.
    pub fn from_darboux(q: T, p: T) -> Result<Self, CoherentError> {
        let sqrt2 = from_f64::<T>(std::f64::consts::SQRT_2);
        Self::new(Complex::new(q / sqrt2, p / sqrt2))
    }

    pub fn z(&self) -> Complex<T> {
        self.z
    }

    pub fn abs(&self) -> T {
        self.z.norm_sqr().sqrt()
    }

    pub fn abs_sqr(&self) -> T {
        self.z.norm_sqr()
    }
}

/// Number-basis coefficients c₀..c_N of a truncated state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<T: Scalar> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> FockVector<T> {
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// 1 − Σ|cₙ|²: the probability mass lost to truncation.
    pub fn norm_deficit(&self) -> T {
        T::one() - self.norm_sqr()
    }

    /// ‖(A − z)·ψ‖ for the truncated vector, with (Aψ)ₙ = √(n+1)·cₙ₊₁.
    pub fn annihilation_residual(&self, z: &CoherentAmplitude<T>) -> T {
        let n = self.cutoff();
        let mut sum = T::zero();
        for k in 0..n {
            let lowered = self.coeffs[k + 1] * Complex::new(from_f64::<T>((k + 1) as f64).sqrt(), T::zero());
            let diff = lowered - z.z() * self.coeffs[k];
            sum += diff.norm_sqr();
        }
        sum += (z.z() * self.coeffs[n]).norm_sqr();
        sum.sqrt()
    }
}

/// Recommended cutoff for a tail below ~1e−10: ⌈|z|² + 6|z| + 10⌉.
pub fn required_cutoff<T: Scalar>(z: &CoherentAmplitude<T>) -> usize {
    let a = crate::scalar::to_f64(z.abs());
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

/// Upper bound on the truncation deficit 1 − Σ|cₙ|² of a coherent state:
/// the first dropped Poisson term times the geometric majorant
/// 1/(1 − |z|²/(N+2)). Infinite when |z|² ≥ N + 2.
pub fn coherent_tail_bound<T: Scalar>(z: &CoherentAmplitude<T>, cutoff: usize) -> T {
    let lambda = z.abs_sqr();
    // e^{-|z|^2} |z|^{2(N+1)} / (N+1)! via a running product to dodge
    // factorial overflow.
    let mut term = (-lambda).exp();
    for k in 1..=(cutoff + 1) {
        term *= lambda / from_f64::<T>(k as f64);
    }
    let ratio = lambda / from_f64::<T>((cutoff + 2) as f64);
    if ratio < T::one() {
        term / (T::one() - ratio)
    } else {
        T::one() / T::zero()
    }
}

/// Truncated coherent state: cₙ = e^{−|z|²/2} zⁿ/√(n!), computed by the
/// recurrence cₙ₊₁ = cₙ·z/√(n+1).
pub fn coherent_state_vector<T: Scalar>(
    z: &CoherentAmplitude<T>,
    cutoff: usize,
) -> FockVector<T> {
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    let c0 = Complex::new((-z.abs_sqr() / from_f64::<T>(2.0)).exp(), T::zero());
    coeffs.push(c0);
    for n in 0..cutoff {
        let next = coeffs[n] * z.z() / Complex::new(from_f64::<T>((n + 1) as f64).sqrt(), T::zero());
        coeffs.push(next);
    }
    FockVector { coeffs }
}

/// Energy mean and fluctuation of a state expressed in the number basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorMoments<T> {
    /// ⟨H⟩ with H = diag(n + ½).
    pub mean: T,
    /// ΔH = √(⟨H²⟩ − ⟨H⟩²).
    pub fluctuation: T,
}

/// Numerical ⟨H⟩ and ΔH from the truncated coherent vector, normalized by
/// the truncated norm. Matches the closed forms |z|² + ½ and |z| within the
/// truncation tail for an adequate cutoff.
pub fn oscillator_moments<T: Scalar>(
    z: &CoherentAmplitude<T>,
    cutoff: usize,
) -> Result<OscillatorMoments<T>, CoherentError> {
    let required = required_cutoff(z);
    if cutoff < required {
        return Err(CoherentError::CutoffTooSmall {
            cutoff,
            required,
            abs_z: crate::scalar::to_f64(z.abs()),
        });
    }
    let psi = coherent_state_vector(z, cutoff);
    let half = from_f64::<T>(0.5);
    let mut norm = T::zero();
    let mut first = T::zero();
    let mut second = T::zero();
    for (n, c) in psi.coeffs.iter().enumerate() {
        let w = c.norm_sqr();
        let e = from_f64::<T>(n as f64) + half;
        norm += w;
        first += w * e;
        second += w * e * e;
    }
    let mean = first / norm;
    let fluctuation = (second / norm - mean * mean).max(T::zero()).sqrt();
    Ok(OscillatorMoments { mean, fluctuation })
}

/// The exact relative fluctuation ΔH/⟨H⟩ = |z| / (|z|² + ½); behaves like
/// 1/|z| for large |z|. Undefined at z = 0.
pub fn relative_fluctuation<T: Scalar>(z: &CoherentAmplitude<T>) -> Result<T, CoherentError> {
    let a = z.abs();
    if a == T::zero() {
        return Err(CoherentError::ZeroAmplitude);
    }
    Ok(a / (a * a + from_f64::<T>(0.5)))
}
