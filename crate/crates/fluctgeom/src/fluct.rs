//! Thermodynamic fluctuation statistics in the Gaussian approximation:
//! fluctuation probabilities, the induced Riemannian metric, Darboux
//! coordinates for the ideal gas, symplectic areas, Poisson brackets, and
//! the Riemannian / symplectic / Hermitian average functionals.

use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::gcs::{GcsError, SymplecticForm};
use crate::quad::{grid_ratio_average, mc_mean, Estimate, QuadError, QuadratureSpec, Scheme};
use crate::scalar::{from_f64, spec_tol, to_f64, Scalar};

/// Default central-difference base step for Poisson brackets; the per-axis
/// step is `step * (1 + |x_j|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluctError {
    #[error("thermodynamic state invalid: {0}")]
    InvalidState(&'static str),
    #[error("equation of state violated: PV = {pv:e} vs S0*T = {s0t:e}")]
    EquationOfState { pv: f64, s0t: f64 },
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("value of {0} must be finite")]
    NonFinite(&'static str),
    #[error("Hermitian matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not Hermitian: max |h - h^dagger| entry = {residual:e}")]
    NotHermitian { residual: f64 },
    #[error("unknown Darboux plane tag: {0:?} (expected \"1\" or \"2\")")]
    UnknownPlane(String),
    #[error("domain dimension {got} does not match phase-space dimension {expected}")]
    DomainDimension { expected: usize, got: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Gcs(#[from] GcsError),
}

/// Equilibrium thermodynamic data. `k_B` is configurable and defaults to 1
/// (natural units) in the helper constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState<T: Scalar> {
    t: T,
    v: T,
    p: T,
    s: T,
    c_v: T,
    dp_dv_t: T,
    k_b: T,
}

impl<T: Scalar> ThermoState<T> {
    /// Validates the thermodynamic inequalities C_V > 0 and (∂P/∂V)_T < 0
    /// together with T > 0, V > 0, k_B > 0.
    #[allow(clippy::too_many_arguments)]
    pub fn new(t: T, v: T, p: T, s: T, c_v: T, dp_dv_t: T, k_b: T) -> Result<Self, FluctError> {
        for (val, name) in [
            (t, "T"),
            (v, "V"),
            (p, "P"),
            (s, "S"),
            (c_v, "C_V"),
            (dp_dv_t, "dPdV_T"),
            (k_b, "k_B"),
        ] {
            if !val.is_finite() {
                return Err(FluctError::NonFinite(name));
            }
        }
        if !(t > T::zero()) {
            return Err(FluctError::InvalidState("T must be > 0"));
        }
        if !(v > T::zero()) {
            return Err(FluctError::InvalidState("V must be > 0"));
        }
        if !(c_v > T::zero()) {
            return Err(FluctError::InvalidState("C_V must be > 0"));
        }
        if !(dp_dv_t < T::zero()) {
            return Err(FluctError::InvalidState("dPdV_T must be < 0"));
        }
        if !(k_b > T::zero()) {
            return Err(FluctError::InvalidState("k_B must be > 0"));
        }
        Ok(Self {
            t,
            v,
            p,
            s,
            c_v,
            dp_dv_t,
            k_b,
        })
    }

    /// An ideal-gas state with PV = S0·T: pressure and the isothermal
    /// pressure derivative follow from (T, V), with the monatomic heat
    /// capacity C_V = (3/2)·S0.
    pub fn ideal_gas(t: T, v: T, s: T, refs: &IdealGasRefs<T>, k_b: T) -> Result<Self, FluctError> {
        if !(t > T::zero() && v > T::zero()) {
            return Err(FluctError::InvalidState("T and V must be > 0"));
        }
        let p = refs.s0 * t / v;
        let c_v = from_f64::<T>(1.5) * refs.s0;
        let dp_dv_t = -refs.s0 * t / (v * v);
        Self::new(t, v, p, s, c_v, dp_dv_t, k_b)
    }

    pub fn t(&self) -> T {
        self.t
    }
    pub fn v(&self) -> T {
        self.v
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn s(&self) -> T {
        self.s
    }
    pub fn c_v(&self) -> T {
        self.c_v
    }
    pub fn dp_dv_t(&self) -> T {
        self.dp_dv_t
    }
    pub fn k_b(&self) -> T {
        self.k_b
    }
}

/// Reference values for the dimensionless ideal-gas variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGasRefs<T: Scalar> {
    s0: T,
    p0: T,
    v0: T,
    t0: T,
}

impl<T: Scalar> IdealGasRefs<T> {
    pub fn new(s0: T, p0: T, v0: T, t0: T) -> Result<Self, FluctError> {
        for (val, name) in [(s0, "S0"), (p0, "P0"), (v0, "V0"), (t0, "T0")] {
            if !(val > T::zero() && val.is_finite()) {
                return Err(FluctError::NonPositive(name));
            }
        }
        Ok(Self { s0, p0, v0, t0 })
    }

    /// All reference values 1.
    pub fn unit() -> Self {
        Self {
            s0: T::one(),
            p0: T::one(),
            v0: T::one(),
            t0: T::one(),
        }
    }

    pub fn s0(&self) -> T {
        self.s0
    }
    pub fn p0(&self) -> T {
        self.p0
    }
    pub fn v0(&self) -> T {
        self.v0
    }
    pub fn t0(&self) -> T {
        self.t0
    }
}

/// Positive-definite coefficients of the fluctuation metric
/// ds² = g_TT dT² + g_VV dV².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationMetric<T: Scalar> {
    g_tt: T,
    g_vv: T,
}

impl<T: Scalar> FluctuationMetric<T> {
    pub fn new(g_tt: T, g_vv: T) -> Result<Self, FluctError> {
        if !(g_tt > T::zero() && g_vv > T::zero() && g_tt.is_finite() && g_vv.is_finite()) {
            return Err(FluctError::InvalidState(
                "metric coefficients must be strictly positive",
            ));
        }
        Ok(Self { g_tt, g_vv })
    }

    pub fn g_tt(&self) -> T {
        self.g_tt
    }
    pub fn g_vv(&self) -> T {
        self.g_vv
    }
}

/// The dimensionless Darboux coordinates (p₁, q₁, p₂, q₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxPoint<T: Scalar> {
    pub p1: T,
    pub q1: T,
    pub p2: T,
    pub q2: T,
}

/// Fluctuation metric induced by the Gaussian probability:
/// g_TT = C_V / (2 k_B T²), g_VV = −(∂P/∂V)_T / (2 k_B T).
pub fn fluctuation_metric<T: Scalar>(state: &ThermoState<T>) -> FluctuationMetric<T> {
    let two = from_f64::<T>(2.0);
    let g_tt = state.c_v / (two * state.k_b * state.t * state.t);
    let g_vv = -state.dp_dv_t / (two * state.k_b * state.t);
    FluctuationMetric { g_tt, g_vv }
}

/// Log of the fluctuation probability ratio W/W₀ for a (ΔT, ΔV)
/// fluctuation: −(g_TT ΔT² + g_VV ΔV²). Computed through the metric so the
/// two displays of the Gaussian probability agree exactly by construction.
pub fn log_gaussian_fluct_prob_tv<T: Scalar>(state: &ThermoState<T>, dt: T, dv: T) -> T {
    let m = fluctuation_metric(state);
    -(m.g_tt * dt * dt + m.g_vv * dv * dv)
}

/// Fluctuation probability ratio W/W₀ ∈ (0, 1], equal to 1 iff both
/// fluctuations vanish.
pub fn gaussian_fluct_prob_tv<T: Scalar>(state: &ThermoState<T>, dt: T, dv: T) -> T {
    log_gaussian_fluct_prob_tv(state, dt, dv).exp()
}

/// Map physical variables to the dimensionless Darboux coordinates:
/// (−ln(P/P₀), ln(V/V₀), ln(T/T₀), S/S₀).
pub fn to_darboux<T: Scalar>(
    p: T,
    v: T,
    t: T,
    s: T,
    refs: &IdealGasRefs<T>,
) -> Result<DarbouxPoint<T>, FluctError> {
    for (val, name) in [(p, "P"), (v, "V"), (t, "T"), (s, "S")] {
        if !(val > T::zero() && val.is_finite()) {
            return Err(FluctError::NonPositive(name));
        }
    }
    Ok(DarbouxPoint {
        p1: -(p / refs.p0).ln(),
        q1: (v / refs.v0).ln(),
        p2: (t / refs.t0).ln(),
        q2: s / refs.s0,
    })
}

/// Ideal-gas fluctuation probability ratio in physical variables:
/// exp[−(1/2k_B)(−S₀ ΔP ΔV / (PV) + ΔT ΔS / T)].
///
/// The state must satisfy PV = S₀·T to 1e−9 relative.
pub fn fluct_prob_physical<T: Scalar>(
    state: &ThermoState<T>,
    dp: T,
    dv: T,
    dt: T,
    ds: T,
    refs: &IdealGasRefs<T>,
) -> Result<T, FluctError> {
    let pv = state.p * state.v;
    let s0t = refs.s0 * state.t;
    if (pv - s0t).abs() > spec_tol::<T>(1e-9) * s0t.abs() {
        return Err(FluctError::EquationOfState {
            pv: to_f64(pv),
            s0t: to_f64(s0t),
        });
    }
    let half = from_f64::<T>(0.5);
    let exponent = -half / state.k_b * (-refs.s0 * dp * dv / pv + dt * ds / state.t);
    Ok(exponent.exp())
}

/// Fluctuation probability ratio in Darboux variables:
/// exp[−(S₀/2k_B)(Δp₁Δq₁ + Δp₂Δq₂)].
pub fn fluct_prob_darboux<T: Scalar>(dp1: T, dq1: T, dp2: T, dq2: T, s0: T, k_b: T) -> T {
    let half = from_f64::<T>(0.5);
    (-(s0 * half / k_b) * (dp1 * dq1 + dp2 * dq2)).exp()
}

/// Which Darboux plane an area patch lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DarbouxPlane {
    One,
    Two,
}

impl FromStr for DarbouxPlane {
    type Err = FluctError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" => Ok(Self::One),
            "2" => Ok(Self::Two),
            other => Err(FluctError::UnknownPlane(other.to_string())),
        }
    }
}

/// An oriented coordinate rectangle in one Darboux plane; the side lengths
/// carry orientation signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaPatch<T: Scalar> {
    pub plane: DarbouxPlane,
    pub dp: T,
    pub dq: T,
}

/// Signed symplectic area of a disjoint union of oriented rectangles:
/// Σ Δp·Δq over patches.
pub fn symplectic_area<T: Scalar>(patches: &[AreaPatch<T>]) -> T {
    patches
        .iter()
        .fold(T::zero(), |acc, patch| acc + patch.dp * patch.dq)
}

/// Poisson bracket {f, g} = π^{jk} ∂_j f ∂_k g at a point, with π = ω⁻¹ and
/// partial derivatives by central differences of per-axis step
/// `step · (1 + |x_j|)`.
pub fn poisson_bracket<T, F, G>(
    f: F,
    g: G,
    omega: &SymplecticForm<T>,
    point: &[T],
    step: Option<T>,
) -> Result<T, FluctError>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
    G: Fn(&[T]) -> T,
{
    let dim = 2 * omega.n();
    if point.len() != dim {
        return Err(FluctError::Gcs(GcsError::DimensionMismatch {
            expected: dim,
            got: point.len(),
        }));
    }
    let h0 = step.unwrap_or_else(|| from_f64(DEFAULT_FD_STEP));
    if !(h0 > T::zero() && h0.is_finite()) {
        return Err(FluctError::NonPositive("finite-difference step"));
    }
    let pi = omega.inverse()?;

    let gradient = |func: &dyn Fn(&[T]) -> T| -> Vec<T> {
        let mut x = point.to_vec();
        let mut out = Vec::with_capacity(dim);
        for j in 0..dim {
            let hj = h0 * (T::one() + point[j].abs());
            x[j] = point[j] + hj;
            let fp = func(&x);
            x[j] = point[j] - hj;
            let fm = func(&x);
            x[j] = point[j];
            out.push((fp - fm) / (from_f64::<T>(2.0) * hj));
        }
        out
    };

    let df = gradient(&f);
    let dg = gradient(&g);
    let mut bracket = T::zero();
    for j in 0..dim {
        for k in 0..dim {
            bracket += pi[(j, k)] * df[j] * dg[k];
        }
    }
    Ok(bracket)
}

/// Riemannian fluctuation average: the normalized Gaussian mean of
/// f(ΔT, ΔV) under the weight exp(−g_TT ΔT² − g_VV ΔV²) with coefficients
/// frozen at the equilibrium point. The constant √g cancels between the
/// numerator and the normalization.
pub fn riemann_average<T, F>(
    f: F,
    metric: &FluctuationMetric<T>,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, FluctError>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    spec.validate()?;
    let sigma_t = (from_f64::<T>(2.0) * metric.g_tt).sqrt().recip();
    let sigma_v = (from_f64::<T>(2.0) * metric.g_vv).sqrt().recip();
    match spec.scheme {
        Scheme::TensorGrid { points } => {
            let half_t = from_f64::<T>(spec.truncation) * sigma_t;
            let half_v = from_f64::<T>(spec.truncation) * sigma_v;
            let axes = [(-half_t, half_t), (-half_v, half_v)];
            let g_tt = metric.g_tt;
            let g_vv = metric.g_vv;
            let value = grid_ratio_average(
                &axes,
                points,
                |x| f(x[0], x[1]),
                |x| (-(g_tt * x[0] * x[0] + g_vv * x[1] * x[1])).exp(),
            )?;
            Ok(Estimate {
                value,
                std_err: T::zero(),
            })
        }
        Scheme::MonteCarlo { samples, seed } => {
            let sigmas = [to_f64(sigma_t), to_f64(sigma_v)];
            let dists = [
                Normal::new(0.0, sigmas[0]).expect("positive sigma"),
                Normal::new(0.0, sigmas[1]).expect("positive sigma"),
            ];
            let trunc = spec.truncation;
            mc_mean(
                samples,
                seed,
                2,
                move |rng, p| {
                    for d in 0..2 {
                        p[d] = sample_truncated(&dists[d], sigmas[d], trunc, rng)?;
                    }
                    Ok(())
                },
                |p| to_f64(f(from_f64(p[0]), from_f64(p[1]))),
            )
            .map_err(FluctError::from)
        }
    }
}

fn sample_truncated<R: rand::Rng>(
    dist: &Normal<f64>,
    sigma: f64,
    trunc: f64,
    rng: &mut R,
) -> Result<f64, QuadError> {
    for _ in 0..10_000 {
        let x = dist.sample(rng);
        if x.abs() <= trunc * sigma {
            return Ok(x);
        }
    }
    Err(QuadError::Domain(
        "truncated Gaussian sampling kept rejecting".into(),
    ))
}

/// A bounded axis-aligned box in phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain<T: Scalar> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Scalar> BoxDomain<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self, FluctError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(FluctError::DomainDimension {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(FluctError::Quadrature(QuadError::Domain(
                    "box must be bounded with lo < hi on every axis".into(),
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// A cube [lo, hi]^dim.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self, FluctError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn axes(&self) -> Vec<(T, T)> {
        self.lo.iter().copied().zip(self.hi.iter().copied()).collect()
    }
}

/// Symplectic (Liouville) average of f over a bounded box: the weight is
/// the constant density |Pf(ω)| = √det ω from the top wedge power of the
/// constant-coefficient form; signs and the 1/n! are absorbed into the
/// normalization, where the constant cancels.
pub fn symplectic_average<T, F>(
    f: F,
    omega: &SymplecticForm<T>,
    domain: &BoxDomain<T>,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, FluctError>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    spec.validate()?;
    let dim = 2 * omega.n();
    if domain.dim() != dim {
        return Err(FluctError::DomainDimension {
            expected: dim,
            got: domain.dim(),
        });
    }
    let det = omega.mat().determinant();
    if !(det > T::zero() && det.is_finite()) {
        return Err(FluctError::Gcs(GcsError::Singular {
            cond: f64::INFINITY,
        }));
    }
    let liouville = det.sqrt();
    match spec.scheme {
        Scheme::TensorGrid { points } => {
            let value = grid_ratio_average(&domain.axes(), points, &f, |_| liouville)?;
            Ok(Estimate {
                value,
                std_err: T::zero(),
            })
        }
        Scheme::MonteCarlo { samples, seed } => {
            let lo: Vec<f64> = domain.lo.iter().map(|x| to_f64(*x)).collect();
            let hi: Vec<f64> = domain.hi.iter().map(|x| to_f64(*x)).collect();
            let mut buf = vec![T::zero(); dim];
            let buf_cell = std::cell::RefCell::new(&mut buf);
            mc_mean(
                samples,
                seed,
                dim,
                |rng, p| {
                    for d in 0..dim {
                        p[d] = rng.random_range(lo[d]..hi[d]);
                    }
                    Ok(())
                },
                |p| {
                    let mut b = buf_cell.borrow_mut();
                    for (dst, src) in b.iter_mut().zip(p) {
                        *dst = from_f64(*src);
                    }
                    to_f64(f(&b))
                },
            )
            .map_err(FluctError::from)
        }
    }
}

/// Hermitian (coherent-state) average of f over ℂⁿ with weight
/// exp(−z† h z), h positive-definite Hermitian. The integral runs over the
/// real embedding ℝ²ⁿ; √det h and the volume-element factors of i cancel
/// in the ratio.
pub fn hermitian_average<T, F>(
    f: F,
    h: &DMatrix<Complex<T>>,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, FluctError>
where
    T: Scalar,
    F: Fn(&[Complex<T>]) -> T,
{
    spec.validate()?;
    let n = h.nrows();
    if h.ncols() != n || n == 0 {
        return Err(FluctError::Gcs(GcsError::BadShape {
            rows: n,
            cols: h.ncols(),
        }));
    }
    // Hermiticity: h = h^dagger within the construction tolerance.
    let mut herm_residual = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = h[(i, j)] - h[(j, i)].conj();
            herm_residual = herm_residual.max(d.re.abs().max(d.im.abs()));
        }
    }
    let h_scale = h
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.re.abs().max(z.im.abs())))
        .max(T::one());
    if herm_residual > spec_tol::<T>(1e-12) * h_scale {
        return Err(FluctError::NotHermitian {
            residual: to_f64(herm_residual),
        });
    }

    // Real embedding: z† h z = uᵀ H u with u = (x; y), H = [[A, -B], [B, A]].
    let dim = 2 * n;
    let mut big_h = DMatrix::<T>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let a = h[(i, j)].re;
            let b = h[(i, j)].im;
            big_h[(i, j)] = a;
            big_h[(n + i, n + j)] = a;
            big_h[(i, n + j)] = -b;
            big_h[(n + i, j)] = b;
        }
    }
    let chol = Cholesky::new(big_h.clone()).ok_or(FluctError::NotPositiveDefinite)?;

    // Covariance of the weight is H⁻¹/2; per-axis σ_i from its diagonal.
    let cov = {
        let mut inv = chol.inverse();
        inv *= from_f64::<T>(0.5);
        inv
    };
    let sigmas: Vec<T> = (0..dim).map(|i| cov[(i, i)].sqrt()).collect();

    let embed = |u: &[T], z: &mut Vec<Complex<T>>| {
        z.clear();
        for j in 0..n {
            z.push(Complex::new(u[j], u[n + j]));
        }
    };

    match spec.scheme {
        Scheme::TensorGrid { points } => {
            let trunc = from_f64::<T>(spec.truncation);
            let axes: Vec<(T, T)> = sigmas.iter().map(|s| (-trunc * *s, trunc * *s)).collect();
            let mut zbuf = Vec::with_capacity(n);
            let zcell = std::cell::RefCell::new(&mut zbuf);
            let weight = |u: &[T]| {
                let uv = DVector::from_column_slice(u);
                (-(uv.transpose() * &big_h * &uv)[(0, 0)]).exp()
            };
            let value = grid_ratio_average(
                &axes,
                points,
                |u| {
                    let mut z = zcell.borrow_mut();
                    embed(u, &mut z);
                    f(&z)
                },
                weight,
            )?;
            Ok(Estimate {
                value,
                std_err: T::zero(),
            })
        }
        Scheme::MonteCarlo { samples, seed } => {
            // u = L⁻ᵀ ξ / √2 with H = L Lᵀ gives cov(u) = H⁻¹/2.
            let l_t = chol.l().transpose();
            let std_normal = Normal::new(0.0, 1.0).expect("unit sigma");
            let trunc = spec.truncation;
            let sig64: Vec<f64> = sigmas.iter().map(|s| to_f64(*s)).collect();
            let sqrt2 = from_f64::<T>(std::f64::consts::SQRT_2);
            let mut zbuf = Vec::with_capacity(n);
            let zcell = std::cell::RefCell::new(&mut zbuf);
            mc_mean(
                samples,
                seed,
                dim,
                |rng, p| {
                    'attempt: for _ in 0..10_000 {
                        let xi =
                            DVector::<T>::from_fn(dim, |_, _| from_f64(std_normal.sample(rng)));
                        let u = l_t
                            .solve_upper_triangular(&xi)
                            .ok_or(QuadError::NonFinite)?
                            / sqrt2;
                        for d in 0..dim {
                            if to_f64(u[d].abs()) > trunc * sig64[d] {
                                continue 'attempt;
                            }
                        }
                        for d in 0..dim {
                            p[d] = to_f64(u[d]);
                        }
                        return Ok(());
                    }
                    Err(QuadError::Domain(
                        "truncated Gaussian sampling kept rejecting".into(),
                    ))
                },
                |p| {
                    let u: Vec<T> = p.iter().map(|x| from_f64(*x)).collect();
                    let mut z = zcell.borrow_mut();
                    embed(&u, &mut z);
                    to_f64(f(&z))
                },
            )
            .map_err(FluctError::from)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn demo_state() -> ThermoState<f64> {
        ThermoState::new(1.0, 1.0, 1.0, 1.0, 1.5, -1.0, 1.0).unwrap()
    }

    #[test]
    fn state_rejects_violated_inequalities() {
        assert!(ThermoState::new(1.0, 1.0, 1.0, 1.0, -0.5, -1.0, 1.0).is_err());
        assert!(ThermoState::new(1.0, 1.0, 1.0, 1.0, 1.5, 0.0, 1.0).is_err());
        assert!(ThermoState::new(-1.0, 1.0, 1.0, 1.0, 1.5, -1.0, 1.0).is_err());
        assert!(ThermoState::new(1.0, 0.0, 1.0, 1.0, 1.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn metric_hand_values() {
        let m = fluctuation_metric(&demo_state());
        assert_eq!(m.g_tt(), 0.75);
        assert_eq!(m.g_vv(), 0.5);
    }

    #[test]
    fn metric_power_law_scaling() {
        let base = fluctuation_metric(&demo_state());
        let doubled =
            fluctuation_metric(&ThermoState::new(2.0, 1.0, 1.0, 1.0, 1.5, -1.0, 1.0).unwrap());
        assert_abs_diff_eq!(doubled.g_tt(), base.g_tt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(doubled.g_vv(), base.g_vv() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn metric_vanishes_with_heat_capacity() {
        let tiny = ThermoState::new(1.0, 1.0, 1.0, 1.0, 1e-12, -1.0, 1.0).unwrap();
        let m = fluctuation_metric(&tiny);
        assert!(m.g_tt() > 0.0 && m.g_tt() < 1e-11);
    }

    #[test]
    fn prob_is_one_at_equilibrium() {
        assert_eq!(gaussian_fluct_prob_tv(&demo_state(), 0.0, 0.0), 1.0);
    }

    #[test]
    fn prob_hand_value() {
        let w = gaussian_fluct_prob_tv(&demo_state(), 0.1, 0.2);
        // exponent = -(0.75*0.01 + 0.5*0.04) = -0.0275
        assert_abs_diff_eq!(w, (-0.0275f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(w, 0.972875, epsilon = 1e-6);
    }

    #[test]
    fn prob_bounded_by_one_with_equality_only_at_zero() {
        let state = demo_state();
        for (dt, dv) in [(0.3, 0.0), (0.0, -0.2), (1.5, 2.0), (-0.7, 0.4)] {
            let w = gaussian_fluct_prob_tv(&state, dt, dv);
            assert!(w < 1.0 && w > 0.0);
        }
    }

    #[test]
    fn log_prob_matches_metric_quadratic_form_exactly() {
        let state = ThermoState::new(1.7, 0.9, 2.0, 0.4, 2.3, -0.8, 1.0).unwrap();
        let m = fluctuation_metric(&state);
        for (dt, dv) in [(0.13, -0.21), (1.0, 2.0), (-0.5, 0.25)] {
            let lhs = log_gaussian_fluct_prob_tv(&state, dt, dv);
            let quad = m.g_tt() * dt * dt + m.g_vv() * dv * dv;
            assert_eq!(lhs + quad, 0.0);
        }
    }

    #[test]
    fn darboux_reference_point() {
        let refs = IdealGasRefs::unit();
        let d = to_darboux(1.0, 1.0, 1.0, 1.0, &refs).unwrap();
        assert_eq!((d.p1, d.q1, d.p2, d.q2), (0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn darboux_log_values() {
        let refs = IdealGasRefs::unit();
        let d = to_darboux((-1.0f64).exp(), 1.0, 1.0, 1.0, &refs).unwrap();
        assert_abs_diff_eq!(d.p1, 1.0, epsilon = 1e-15);
        let d = to_darboux(1.0, (2.0f64).exp(), 1.0, 1.0, &refs).unwrap();
        assert_abs_diff_eq!(d.q1, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn darboux_rejects_nonpositive() {
        let refs = IdealGasRefs::unit();
        assert!(to_darboux(0.0, 1.0, 1.0, 1.0, &refs).is_err());
        assert!(to_darboux(1.0, -2.0, 1.0, 1.0, &refs).is_err());
    }

    #[test]
    fn physical_prob_trivial_and_hand_values() {
        let refs = IdealGasRefs::unit();
        let state = ThermoState::ideal_gas(1.0, 1.0, 1.0, &refs, 1.0).unwrap();
        assert_eq!(
            fluct_prob_physical(&state, 0.0, 0.0, 0.0, 0.0, &refs).unwrap(),
            1.0
        );
        let w = fluct_prob_physical(&state, 0.01, 0.02, 0.01, 0.03, &refs).unwrap();
        assert_abs_diff_eq!(w, (-5e-5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(w, 0.99995, epsilon = 1e-6);
    }

    #[test]
    fn physical_prob_sign_convention() {
        let refs = IdealGasRefs::unit();
        let state = ThermoState::ideal_gas(1.0, 1.0, 1.0, &refs, 1.0).unwrap();
        let w = fluct_prob_physical(&state, 0.0, 0.0, 0.05, 0.07, &refs).unwrap();
        assert!(w < 1.0);
    }

    #[test]
    fn physical_prob_rejects_equation_of_state_violation() {
        let refs = IdealGasRefs::unit();
        let bad = ThermoState::new(1.0, 1.0, 2.0, 1.0, 1.5, -1.0, 1.0).unwrap();
        assert!(matches!(
            fluct_prob_physical(&bad, 0.0, 0.0, 0.0, 0.0, &refs),
            Err(FluctError::EquationOfState { .. })
        ));
    }

    #[test]
    fn darboux_prob_hand_values() {
        assert_eq!(fluct_prob_darboux(0.0, 0.0, 0.0, 0.0, 1.0, 1.0), 1.0);
        let w = fluct_prob_darboux(0.1, 0.2, 0.0, 0.0, 1.0, 1.0);
        assert_abs_diff_eq!(w, (-0.01f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(w, 0.990050, epsilon = 1e-6);
    }

    /// Log-probability discrepancy between the physical and Darboux forms
    /// for a fluctuation of scale eps along a fixed direction.
    fn phys_vs_darboux_gap(eps: f64) -> f64 {
        let refs = IdealGasRefs::unit();
        let state = ThermoState::ideal_gas(1.0, 1.0, 1.0, &refs, 1.0).unwrap();
        let (dp, dv, dt, ds) = (0.3 * eps, -0.2 * eps, 0.15 * eps, 0.1 * eps);
        let w_phys = fluct_prob_physical(&state, dp, dv, dt, ds, &refs).unwrap();
        let a = to_darboux(state.p(), state.v(), state.t(), state.s(), &refs).unwrap();
        let b = to_darboux(
            state.p() + dp,
            state.v() + dv,
            state.t() + dt,
            state.s() + ds,
            &refs,
        )
        .unwrap();
        let w_darb =
            fluct_prob_darboux(b.p1 - a.p1, b.q1 - a.q1, b.p2 - a.p2, b.q2 - a.q2, 1.0, 1.0);
        (w_phys.ln() - w_darb.ln()).abs()
    }

    #[test]
    fn physical_and_darboux_agree_to_third_order() {
        let g1 = phys_vs_darboux_gap(1e-1);
        let g2 = phys_vs_darboux_gap(5e-2);
        let g3 = phys_vs_darboux_gap(2.5e-2);
        let order12 = (g1 / g2).log2();
        let order23 = (g2 / g3).log2();
        assert!(order12 >= 2.7, "observed order {order12}");
        assert!(order23 >= 2.7, "observed order {order23}");
    }

    #[test]
    fn area_of_single_patch() {
        let patches = [AreaPatch {
            plane: DarbouxPlane::One,
            dp: 2.0,
            dq: 3.0,
        }];
        assert_eq!(symplectic_area(&patches), 6.0);
    }

    #[test]
    fn area_is_additive_and_matches_probability() {
        let patches: [AreaPatch<f64>; 2] = [
            AreaPatch {
                plane: DarbouxPlane::One,
                dp: 0.1,
                dq: 0.2,
            },
            AreaPatch {
                plane: DarbouxPlane::Two,
                dp: 0.3,
                dq: 0.4,
            },
        ];
        let area = symplectic_area(&patches);
        assert_abs_diff_eq!(area, 0.14, epsilon = 1e-16);
        let prob = fluct_prob_darboux(0.1, 0.2, 0.3, 0.4, 1.0, 1.0);
        assert_eq!(prob, (-0.5 * area).exp());
    }

    #[test]
    fn plane_tag_parsing() {
        assert_eq!("1".parse::<DarbouxPlane>().unwrap(), DarbouxPlane::One);
        assert_eq!(" 2 ".parse::<DarbouxPlane>().unwrap(), DarbouxPlane::Two);
        assert!(matches!(
            "3".parse::<DarbouxPlane>(),
            Err(FluctError::UnknownPlane(_))
        ));
    }

    #[test]
    fn bracket_of_conjugate_coordinates() {
        // Axis order (p, q): q is coordinate 1, p is coordinate 0.
        let omega = SymplecticForm::<f64>::standard(1);
        let q = |x: &[f64]| x[1];
        let p = |x: &[f64]| x[0];
        let at_origin = poisson_bracket(q, p, &omega, &[0.0, 0.0], None).unwrap();
        assert_abs_diff_eq!(at_origin, 1.0, epsilon = 1e-12);
        let elsewhere = poisson_bracket(q, p, &omega, &[0.37, -1.2], None).unwrap();
        assert_abs_diff_eq!(elsewhere, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bracket_is_antisymmetric_in_its_arguments() {
        let omega = SymplecticForm::<f64>::standard(2);
        let f = |x: &[f64]| x[0] * x[1] + x[2] * x[2] - 0.5 * x[3];
        let point = [0.4, -0.3, 0.8, 0.1];
        let ff = poisson_bracket(f, f, &omega, &point, None).unwrap();
        assert_abs_diff_eq!(ff, 0.0, epsilon = 1e-10);
        let g = |x: &[f64]| x[3] * x[0] - x[1];
        let fg = poisson_bracket(f, g, &omega, &point, None).unwrap();
        let gf = poisson_bracket(g, f, &omega, &point, None).unwrap();
        assert_abs_diff_eq!(fg + gf, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn bracket_quadratic_oracle() {
        // {q^2, p} = 2q {q, p} = 2q at q = 3.
        let omega = SymplecticForm::<f64>::standard(1);
        let f = |x: &[f64]| x[1] * x[1];
        let g = |x: &[f64]| x[0];
        let val = poisson_bracket(f, g, &omega, &[0.0, 3.0], None).unwrap();
        assert_abs_diff_eq!(val, 6.0, epsilon = 1e-6);
    }

    #[test]
    fn bracket_jacobi_identity_on_polynomials() {
        let omega = SymplecticForm::<f64>::standard(1);
        let f = |x: &[f64]| x[1] * x[1] + x[0];
        let g = |x: &[f64]| x[0] * x[1];
        let h = |x: &[f64]| x[0] * x[0];
        let point = [0.7, -0.4];
        let br = |a: &dyn Fn(&[f64]) -> f64, b: &dyn Fn(&[f64]) -> f64, x: &[f64]| {
            poisson_bracket(a, b, &omega, x, None).unwrap()
        };
        let fgh = br(&|x: &[f64]| br(&g, &h, x), &f, &point);
        let ghf = br(&|x: &[f64]| br(&h, &f, x), &g, &point);
        let hfg = br(&|x: &[f64]| br(&f, &g, x), &h, &point);
        assert_abs_diff_eq!(fgh + ghf + hfg, 0.0, epsilon = 1e-5);
    }

    #[test]
    fn riemann_average_normalization_is_exact() {
        let metric = FluctuationMetric::new(1.0, 1.0).unwrap();
        let est = riemann_average(|_, _| 1.0, &metric, &QuadratureSpec::grid(65)).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn riemann_average_second_moments() {
        let spec = QuadratureSpec::grid(513);
        let metric = FluctuationMetric::new(1.0, 1.0).unwrap();
        let est = riemann_average(|t, _| t * t, &metric, &spec).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-6);
        let metric = FluctuationMetric::new(2.0, 1.0).unwrap();
        let est = riemann_average(|t, _| t * t, &metric, &spec).unwrap();
        assert_abs_diff_eq!(est.value, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn riemann_average_monte_carlo_agrees() {
        let metric = FluctuationMetric::<f64>::new(1.0, 1.0).unwrap();
        let spec = QuadratureSpec::monte_carlo(200_000, 42);
        let one = riemann_average(|_, _| 1.0, &metric, &spec).unwrap();
        assert_eq!(one.value, 1.0);
        let t2 = riemann_average(|t: f64, _| t * t, &metric, &spec).unwrap();
        assert!((t2.value - 0.5).abs() <= 4.0 * t2.std_err.max(1e-4));
    }

    #[test]
    fn riemann_average_detects_divergence() {
        let metric = FluctuationMetric::new(1.0, 1.0).unwrap();
        let est = riemann_average(|t, _| 1.0 / t, &metric, &QuadratureSpec::grid(65));
        assert!(matches!(
            est,
            Err(FluctError::Quadrature(QuadError::NonFinite))
        ));
    }

    #[test]
    fn symplectic_average_uniform_box() {
        let omega = SymplecticForm::<f64>::standard(1);
        let domain = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        let spec = QuadratureSpec::grid(33);
        let one = symplectic_average(|_| 1.0, &omega, &domain, &spec).unwrap();
        assert_eq!(one.value, 1.0);
        let q = symplectic_average(|x| x[1], &omega, &domain, &spec).unwrap();
        assert_abs_diff_eq!(q.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn symplectic_average_n2_grid_vs_monte_carlo() {
        let omega = SymplecticForm::<f64>::standard(2);
        let domain = BoxDomain::cube(4, 0.0, 1.0).unwrap();
        let grid = symplectic_average(|x| x[1], &omega, &domain, &QuadratureSpec::grid(17))
            .unwrap();
        assert_abs_diff_eq!(grid.value, 0.5, epsilon = 1e-12);
        let mc = symplectic_average(
            |x| x[1],
            &omega,
            &domain,
            &QuadratureSpec::monte_carlo(200_000, 7),
        )
        .unwrap();
        assert!((mc.value - grid.value).abs() <= 4.0 * mc.std_err);
    }

    #[test]
    fn symplectic_average_dimension_mismatch() {
        let omega = SymplecticForm::<f64>::standard(2);
        let domain = BoxDomain::cube(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            symplectic_average(|_| 1.0, &omega, &domain, &QuadratureSpec::grid(9)),
            Err(FluctError::DomainDimension { .. })
        ));
    }

    fn scalar_h(h: f64) -> DMatrix<Complex<f64>> {
        DMatrix::from_element(1, 1, Complex::new(h, 0.0))
    }

    #[test]
    fn hermitian_average_normalization_and_moments() {
        let spec = QuadratureSpec::grid(513);
        let one = hermitian_average(|_| 1.0, &scalar_h(1.0), &spec).unwrap();
        assert_eq!(one.value, 1.0);
        let m1 = hermitian_average(|z| z[0].norm_sqr(), &scalar_h(1.0), &spec).unwrap();
        assert_abs_diff_eq!(m1.value, 1.0, epsilon = 1e-6);
        let m2 = hermitian_average(|z| z[0].norm_sqr(), &scalar_h(2.0), &spec).unwrap();
        assert_abs_diff_eq!(m2.value, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn hermitian_average_monte_carlo_agrees() {
        let spec = QuadratureSpec::monte_carlo(200_000, 11);
        let m2 = hermitian_average(|z| z[0].norm_sqr(), &scalar_h(2.0), &spec).unwrap();
        assert!((m2.value - 0.5).abs() <= 4.0 * m2.std_err.max(1e-4));
    }

    #[test]
    fn hermitian_average_general_matrix() {
        // 2x2 Hermitian with off-diagonal coupling: <|z1|^2> = (h^{-1})_{11}.
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(2.0, 0.0),
                Complex::new(0.3, 0.4),
                Complex::new(0.3, -0.4),
                Complex::new(1.5, 0.0),
            ],
        );
        let expected: f64 = {
            let inv = h.clone().try_inverse().unwrap();
            inv[(0, 0)].re
        };
        let est = hermitian_average(
            |z| z[0].norm_sqr(),
            &h,
            &QuadratureSpec::monte_carlo(400_000, 3),
        )
        .unwrap();
        assert!(
            (est.value - expected).abs() <= 5.0 * est.std_err.max(1e-3),
            "estimate {} vs expected {expected}",
            est.value
        );
    }

    #[test]
    fn hermitian_average_rejects_bad_inputs() {
        let spec = QuadratureSpec::grid(33);
        assert!(matches!(
            hermitian_average(|_| 1.0, &scalar_h(-1.0), &spec),
            Err(FluctError::NotPositiveDefinite)
        ));
        let non_herm = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(0.5, 0.0),
                Complex::new(-0.5, 0.0),
                Complex::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            hermitian_average(|_| 1.0, &non_herm, &spec),
            Err(FluctError::NotHermitian { .. })
        ));
    }
}
