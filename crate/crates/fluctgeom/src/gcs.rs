//! Linear algebra of generalized complex structures on the doubled fibre
//! T ⊕ T* over a point of a 2n-dimensional phase space.
//!
//! Elements of the doubled fibre are pairs X + ξ of a tangent vector and a
//! 1-form. The fibre carries the split-signature pairing
//! ⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X)), and a generalized complex structure is an
//! endomorphism 𝒥 with 𝒥² = −1 that is antisymmetric with respect to that
//! pairing. Symplectic forms and complex structures embed as the two
//! extremal types, and B-transformations (shear isometries generated by a
//! 2-form) conjugate one structure into another.
//!
//! All matrices are dense and row-indexed in the basis
//! (∂₁, …, ∂₂ₙ, dx¹, …, dx²ⁿ); the fibre dimension is 4n with n small, so
//! no sparse paths exist. Phase-space axes are ordered momentum-first in
//! each Darboux plane, (p₁, q₁, p₂, q₂, …), which makes the standard
//! symplectic block `[[0, 1], [-1, 0]]` and gives `{q, p} = +1` downstream.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::report::{CheckResult, Report};
use crate::scalar::{from_f64, spec_tol, to_f64, Scalar};

/// Verification tolerance for GCS axioms, stated for `f64`.
pub const GCS_VERIFY_TOL: f64 = 1e-10;
/// Construction tolerance for complex structures (J² = −1), stated for `f64`.
pub const COMPLEX_STRUCTURE_TOL: f64 = 1e-12;
/// Relative singular-value cutoff used for the rank in type computation.
pub const RANK_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must be square with even dimension >= 2, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },
    #[error("matrix dimension {dim} is not of the form 4n")]
    NotDoubled { dim: usize },
    #[error("matrix is not antisymmetric: max |m + m^T| entry = {max_violation:e}")]
    NotAntisymmetric { max_violation: f64 },
    #[error("form is numerically singular (condition number {cond:e})")]
    Singular { cond: f64 },
    #[error("matrix fails J^2 = -1: max residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotComplexStructure { residual: f64, tolerance: f64 },
    #[error(
        "rank of the bivector block is odd ({rank}); relative singular values \
         straddling the cutoff: {below:e} / {above:e}"
    )]
    OddRank { rank: usize, below: f64, above: f64 },
}

fn max_abs<T: Scalar>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn check_antisymmetric_exact<T: Scalar>(m: &DMatrix<T>) -> Result<(), GcsError> {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let s = (m[(i, j)] + m[(j, i)]).abs();
            worst = worst.max(s);
        }
    }
    if worst > T::zero() {
        return Err(GcsError::NotAntisymmetric {
            max_violation: to_f64(worst),
        });
    }
    Ok(())
}

fn check_even_square<T: Scalar>(m: &DMatrix<T>) -> Result<usize, GcsError> {
    let (rows, cols) = m.shape();
    if rows != cols || rows < 2 || rows % 2 != 0 {
        return Err(GcsError::BadShape { rows, cols });
    }
    Ok(rows / 2)
}

/// An element X + ξ of the doubled fibre: a tangent vector and a 1-form,
/// each with 2n real components.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedVector<T: Scalar> {
    n: usize,
    vec_part: DVector<T>,
    form_part: DVector<T>,
}

impl<T: Scalar> GeneralizedVector<T> {
    pub fn new(vec_part: DVector<T>, form_part: DVector<T>) -> Result<Self, GcsError> {
        let len = vec_part.len();
        if form_part.len() != len {
            return Err(GcsError::DimensionMismatch {
                expected: len,
                got: form_part.len(),
            });
        }
        if len < 2 || len % 2 != 0 {
            return Err(GcsError::BadShape {
                rows: len,
                cols: 1,
            });
        }
        Ok(Self {
            n: len / 2,
            vec_part,
            form_part,
        })
    }

    /// A pure tangent vector (zero form part).
    pub fn tangent(vec_part: DVector<T>) -> Result<Self, GcsError> {
        let zero = DVector::zeros(vec_part.len());
        Self::new(vec_part, zero)
    }

    /// A pure 1-form (zero vector part).
    pub fn covector(form_part: DVector<T>) -> Result<Self, GcsError> {
        let zero = DVector::zeros(form_part.len());
        Self::new(zero, form_part)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vec_part(&self) -> &DVector<T> {
        &self.vec_part
    }

    pub fn form_part(&self) -> &DVector<T> {
        &self.form_part
    }

    /// Stack into a single 4n column in the (vector, form) basis order.
    pub fn as_doubled(&self) -> DVector<T> {
        let dim = 2 * self.n;
        let mut out = DVector::zeros(2 * dim);
        out.rows_mut(0, dim).copy_from(&self.vec_part);
        out.rows_mut(dim, dim).copy_from(&self.form_part);
        out
    }
}

/// ⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X)), the split-signature pairing on T ⊕ T*.
pub fn inner_product<T: Scalar>(
    v: &GeneralizedVector<T>,
    w: &GeneralizedVector<T>,
) -> Result<T, GcsError> {
    if v.n != w.n {
        return Err(GcsError::DimensionMismatch {
            expected: 2 * v.n,
            got: 2 * w.n,
        });
    }
    let half = from_f64::<T>(0.5);
    Ok(half * (v.form_part.dot(&w.vec_part) + w.form_part.dot(&v.vec_part)))
}

/// Gram matrix of [`inner_product`] in the standard basis: ½ [[0, I], [I, 0]].
pub fn inner_product_matrix<T: Scalar>(n: usize) -> DMatrix<T> {
    let dim = 2 * n;
    let half = from_f64::<T>(0.5);
    let mut g = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        g[(i, dim + i)] = half;
        g[(dim + i, i)] = half;
    }
    g
}

/// Eigenvalue sign counts (positive, negative, zero) of a symmetric matrix.
///
/// Eigenvalues with |λ| ≤ tol · max|λ| count as zero; the split-signature
/// Gram matrix comes out as (2n, 2n, 0).
pub fn signature<T: Scalar>(sym: &DMatrix<T>) -> (usize, usize, usize) {
    let eig = sym.clone().symmetric_eigen();
    let max_mag = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, x| acc.max(x.abs()));
    let cut = spec_tol::<T>(RANK_REL_TOL) * max_mag;
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for lam in eig.eigenvalues.iter() {
        if lam.abs() <= cut {
            zero += 1;
        } else if *lam > T::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    (pos, neg, zero)
}

/// An antisymmetric 2n×2n matrix regarded as a 2-form on phase space.
/// Antisymmetry is enforced exactly, entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm<T: Scalar> {
    n: usize,
    mat: DMatrix<T>,
}

impl<T: Scalar> TwoForm<T> {
    pub fn new(mat: DMatrix<T>) -> Result<Self, GcsError> {
        let n = check_even_square(&mat)?;
        check_antisymmetric_exact(&mat)?;
        Ok(Self { n, mat })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            mat: DMatrix::zeros(2 * n, 2 * n),
        }
    }

    /// Antisymmetrize an arbitrary square matrix: (m − mᵀ)/2. The result
    /// is exactly antisymmetric in floating point.
    pub fn antisymmetrize(m: &DMatrix<T>) -> Result<Self, GcsError> {
        check_even_square(m)?;
        let half = from_f64::<T>(0.5);
        let a = (m - m.transpose()) * half;
        Self::new(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &DMatrix<T> {
        &self.mat
    }

    pub fn scaled(&self, c: T) -> Self {
        // c * (-x) and -(c * x) round identically, so antisymmetry survives.
        Self {
            n: self.n,
            mat: &self.mat * c,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            mat: -&self.mat,
        }
    }
}

/// A nondegenerate antisymmetric 2n×2n matrix: a constant-coefficient
/// symplectic form on phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm<T: Scalar> {
    n: usize,
    mat: DMatrix<T>,
}

impl<T: Scalar> SymplecticForm<T> {
    pub fn new(mat: DMatrix<T>) -> Result<Self, GcsError> {
        let n = check_even_square(&mat)?;
        check_antisymmetric_exact(&mat)?;
        let sv = mat.clone().svd(false, false).singular_values;
        let s_max = sv.iter().fold(T::zero(), |a, x| a.max(*x));
        let s_min = sv.iter().fold(s_max, |a, x| a.min(*x));
        if s_min <= spec_tol::<T>(1e-12) * s_max || s_max == T::zero() {
            let cond = if s_min > T::zero() {
                to_f64(s_max / s_min)
            } else {
                f64::INFINITY
            };
            return Err(GcsError::Singular { cond });
        }
        Ok(Self { n, mat })
    }

    /// Darboux-normal form: block diagonal `[[0, 1], [-1, 0]]` per plane,
    /// i.e. momentum-first axis ordering (p₁, q₁, p₂, q₂, …).
    pub fn standard(n: usize) -> Self {
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            mat[(2 * k, 2 * k + 1)] = T::one();
            mat[(2 * k + 1, 2 * k)] = -T::one();
        }
        Self { n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &DMatrix<T> {
        &self.mat
    }

    /// The Poisson matrix π = ω⁻¹.
    pub fn inverse(&self) -> Result<DMatrix<T>, GcsError> {
        self.mat
            .clone()
            .try_inverse()
            .ok_or(GcsError::Singular { cond: f64::INFINITY })
    }

    /// Reinterpret as a plain 2-form (for B-field use).
    pub fn as_two_form(&self) -> TwoForm<T> {
        TwoForm {
            n: self.n,
            mat: self.mat.clone(),
        }
    }
}

/// A 2n×2n matrix J with J² = −1: a linear complex structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure<T: Scalar> {
    n: usize,
    mat: DMatrix<T>,
}

impl<T: Scalar> ComplexStructure<T> {
    pub fn new(mat: DMatrix<T>) -> Result<Self, GcsError> {
        let n = check_even_square(&mat)?;
        let dim = 2 * n;
        let residual = max_abs(&(&mat * &mat + DMatrix::<T>::identity(dim, dim)));
        let tol = spec_tol::<T>(COMPLEX_STRUCTURE_TOL);
        if residual > tol {
            return Err(GcsError::NotComplexStructure {
                residual: to_f64(residual),
                tolerance: to_f64(tol),
            });
        }
        Ok(Self { n, mat })
    }

    /// Block diagonal `[[0, -1], [1, 0]]` per plane.
    pub fn standard(n: usize) -> Self {
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            mat[(2 * k, 2 * k + 1)] = -T::one();
            mat[(2 * k + 1, 2 * k)] = T::one();
        }
        Self { n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &DMatrix<T> {
        &self.mat
    }
}

fn assemble_blocks<T: Scalar>(
    ul: &DMatrix<T>,
    ur: &DMatrix<T>,
    ll: &DMatrix<T>,
    lr: &DMatrix<T>,
) -> DMatrix<T> {
    let dim = ul.nrows();
    let mut out = DMatrix::zeros(2 * dim, 2 * dim);
    out.view_mut((0, 0), (dim, dim)).copy_from(ul);
    out.view_mut((0, dim), (dim, dim)).copy_from(ur);
    out.view_mut((dim, 0), (dim, dim)).copy_from(ll);
    out.view_mut((dim, dim), (dim, dim)).copy_from(lr);
    out
}

/// The shear matrix exp of `[[0, 0], [±B, 0]]`, i.e. `[[I, 0], [±B, I]]`.
fn shear<T: Scalar>(b: &DMatrix<T>, negate: bool) -> DMatrix<T> {
    let dim = b.nrows();
    let eye = DMatrix::<T>::identity(dim, dim);
    let lower = if negate { -b } else { b.clone() };
    assemble_blocks(&eye, &DMatrix::zeros(dim, dim), &lower, &eye)
}

/// A 4n×4n endomorphism of the doubled fibre, candidate or verified
/// generalized complex structure.
///
/// Block layout (2n×2n each):
/// `[[tangent_endo, bivector], [two_form, cotangent_endo]]`, where the
/// cotangent block of a valid structure equals minus the transpose of the
/// tangent block.
#[derive(Debug, Clone, PartialEq)]
pub struct Gcs<T: Scalar> {
    n: usize,
    mat: DMatrix<T>,
}

impl<T: Scalar> Gcs<T> {
    /// Wrap a candidate matrix without checking the structure axioms
    /// (dimension is still validated). Use [`Gcs::verify`] to test it.
    pub fn candidate(mat: DMatrix<T>) -> Result<Self, GcsError> {
        let (rows, cols) = mat.shape();
        if rows != cols {
            return Err(GcsError::BadShape { rows, cols });
        }
        if rows % 4 != 0 || rows == 0 {
            return Err(GcsError::NotDoubled { dim: rows });
        }
        Ok(Self { n: rows / 4, mat })
    }

    /// The symplectic-type structure `[[0, -ω⁻¹], [ω, 0]]`.
    pub fn from_symplectic(omega: &SymplecticForm<T>) -> Result<Self, GcsError> {
        let dim = 2 * omega.n;
        let pi = omega.inverse()?;
        let mat = assemble_blocks(
            &DMatrix::zeros(dim, dim),
            &(-pi),
            omega.mat(),
            &DMatrix::zeros(dim, dim),
        );
        Ok(Self { n: omega.n, mat })
    }

    /// The complex-type structure `[[-J, 0], [0, Jᵀ]]`.
    pub fn from_complex(j: &ComplexStructure<T>) -> Self {
        let dim = 2 * j.n;
        let mat = assemble_blocks(
            &(-j.mat()),
            &DMatrix::zeros(dim, dim),
            &DMatrix::zeros(dim, dim),
            &j.mat().transpose(),
        );
        Self { n: j.n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &DMatrix<T> {
        &self.mat
    }

    /// Upper-left block: the endomorphism of the tangent fibre.
    pub fn tangent_endo(&self) -> DMatrix<T> {
        let dim = 2 * self.n;
        self.mat.view((0, 0), (dim, dim)).into_owned()
    }

    /// Upper-right block: the bivector part β mapping T* → T. Its rank
    /// determines the type.
    pub fn bivector_block(&self) -> DMatrix<T> {
        let dim = 2 * self.n;
        self.mat.view((0, dim), (dim, dim)).into_owned()
    }

    /// Lower-left block: the 2-form part mapping T → T*.
    pub fn two_form_block(&self) -> DMatrix<T> {
        let dim = 2 * self.n;
        self.mat.view((dim, 0), (dim, dim)).into_owned()
    }

    /// Lower-right block: the endomorphism of the cotangent fibre.
    pub fn cotangent_endo(&self) -> DMatrix<T> {
        let dim = 2 * self.n;
        self.mat.view((dim, dim), (dim, dim)).into_owned()
    }

    /// Conjugate by the shear generated by a 2-form:
    /// `[[I, 0], [-B, I]] · 𝒥 · [[I, 0], [B, I]]`.
    ///
    /// The bivector block is untouched entry-for-entry, so the type is
    /// exactly invariant.
    pub fn b_transform(&self, b: &TwoForm<T>) -> Result<Self, GcsError> {
        if b.n != self.n {
            return Err(GcsError::DimensionMismatch {
                expected: 2 * self.n,
                got: 2 * b.n,
            });
        }
        let e_minus = shear(b.mat(), true);
        let e_plus = shear(b.mat(), false);
        let mat = &e_minus * &(&self.mat * &e_plus);
        Ok(Self { n: self.n, mat })
    }

    /// Check the structure axioms and report residuals: the square
    /// condition 𝒥² = −1, antisymmetry with respect to the pairing
    /// (G𝒥 antisymmetric), the so(2n,2n) block pattern, and isometry of
    /// the pairing under 𝒥. Failures are report content, not errors.
    pub fn verify(&self) -> Report {
        let dim4 = 4 * self.n;
        let tol = to_f64(spec_tol::<T>(GCS_VERIFY_TOL));
        let eye = DMatrix::<T>::identity(dim4, dim4);
        let g = inner_product_matrix::<T>(self.n);

        let square = max_abs(&(&self.mat * &self.mat + &eye));

        let gj = &g * &self.mat;
        let duality = max_abs(&(&gj + gj.transpose()));

        let beta = self.bivector_block();
        let bb = self.two_form_block();
        let block_res = max_abs(&(&beta + beta.transpose()))
            .max(max_abs(&(&bb + bb.transpose())))
            .max(max_abs(
                &(self.cotangent_endo() + self.tangent_endo().transpose()),
            ));

        let isometry = max_abs(&(self.mat.transpose() * &(&g * &self.mat) - &g));

        Report::new(vec![
            CheckResult::new("square_condition", to_f64(square), tol),
            CheckResult::new("duality_condition", to_f64(duality), tol),
            CheckResult::new("block_structure", to_f64(block_res), tol),
            CheckResult::new("inner_product_isometry", to_f64(isometry), tol),
        ])
    }

    /// The type k = n − rank(bivector block)/2. Rank counts singular
    /// values above `RANK_REL_TOL` times the largest one; an odd rank is
    /// an error carrying the singular-value gap, never rounded away.
    ///
    /// Assumes the structure axioms hold (see [`Gcs::verify`]).
    pub fn gcs_type(&self) -> Result<usize, GcsError> {
        let beta = self.bivector_block();
        let mut sv: Vec<T> = self
            .bivector_block()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        debug_assert_eq!(sv.len(), beta.nrows());
        sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are ordered"));
        let s_max = sv.first().copied().unwrap_or_else(T::zero);
        let rank = if s_max == T::zero() {
            0
        } else {
            let cut = spec_tol::<T>(RANK_REL_TOL) * s_max;
            sv.iter().take_while(|s| **s > cut).count()
        };
        if rank % 2 != 0 {
            let rel = |s: T| to_f64(s / s_max);
            return Err(GcsError::OddRank {
                rank,
                below: rel(sv[rank - 1]),
                above: sv.get(rank).map(|s| rel(*s)).unwrap_or(0.0),
            });
        }
        Ok(self.n - rank / 2)
    }
}

/// B-transformation of a fibre element: X + ξ ↦ X + ξ + i_X B.
pub fn b_transform_vector<T: Scalar>(
    v: &GeneralizedVector<T>,
    b: &TwoForm<T>,
) -> Result<GeneralizedVector<T>, GcsError> {
    if b.n != v.n {
        return Err(GcsError::DimensionMismatch {
            expected: 2 * v.n,
            got: 2 * b.n,
        });
    }
    let form = &v.form_part + b.mat() * &v.vec_part;
    Ok(GeneralizedVector {
        n: v.n,
        vec_part: v.vec_part.clone(),
        form_part: form,
    })
}

/// Interior product i_X B of a vector with a 2-form, in the antisymmetric
/// matrix convention: the covector with components (i_X B)_i = B_ij X^j.
pub fn interior_product<T: Scalar>(
    x_vec: &DVector<T>,
    b: &TwoForm<T>,
) -> Result<DVector<T>, GcsError> {
    if x_vec.len() != 2 * b.n {
        return Err(GcsError::DimensionMismatch {
            expected: 2 * b.n,
            got: x_vec.len(),
        });
    }
    Ok(b.mat() * x_vec)
}

/// Random well-conditioned fixtures for property suites.
pub mod sample {
    use super::*;
    use rand::Rng;

    fn random_entries<T: Scalar, R: Rng>(n: usize, scale: f64, rng: &mut R) -> DMatrix<T> {
        DMatrix::from_fn(2 * n, 2 * n, |_, _| {
            from_f64(scale * rng.random_range(-1.0..1.0))
        })
    }

    /// I + 0.3·R with R uniform in [-1, 1]: invertible and well conditioned.
    fn mild_perturbation<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> DMatrix<T> {
        DMatrix::<T>::identity(2 * n, 2 * n) + random_entries(n, 0.3, rng)
    }

    /// A random antisymmetric 2-form with entries of order `scale`.
    pub fn two_form<T: Scalar, R: Rng>(n: usize, scale: f64, rng: &mut R) -> TwoForm<T> {
        TwoForm::antisymmetrize(&random_entries(n, scale, rng))
            .expect("antisymmetrized matrix is a valid two-form")
    }

    /// A random nondegenerate symplectic form Sᵀ ω_std S (antisymmetrized
    /// to kill matmul roundoff), with S well conditioned.
    pub fn symplectic<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> SymplecticForm<T> {
        let s = mild_perturbation::<T, R>(n, rng);
        let raw = s.transpose() * SymplecticForm::<T>::standard(n).mat() * &s;
        let anti = TwoForm::antisymmetrize(&raw).expect("even square");
        SymplecticForm::new(anti.mat().clone()).expect("congruence preserves nondegeneracy")
    }

    /// A random complex structure S J_std S⁻¹ with S well conditioned.
    pub fn complex_structure<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> ComplexStructure<T> {
        let s = mild_perturbation::<T, R>(n, rng);
        let s_inv = s.clone().try_inverse().expect("mild perturbation is invertible");
        let j = &s * ComplexStructure::<T>::standard(n).mat() * s_inv;
        ComplexStructure::new(j).expect("conjugation preserves J^2 = -1 within tolerance")
    }

    /// A random fibre element with entries in [-1, 1].
    pub fn generalized_vector<T: Scalar, R: Rng>(n: usize, rng: &mut R) -> GeneralizedVector<T> {
        let part = |rng: &mut R| {
            DVector::from_fn(2 * n, |_, _| from_f64::<T>(rng.random_range(-1.0..1.0)))
        };
        GeneralizedVector::new(part(rng), part(rng)).expect("matching lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn std_omega(n: usize) -> SymplecticForm<f64> {
        SymplecticForm::standard(n)
    }

    #[test]
    fn inner_product_single_pairing_term() {
        // v = (e1; 0), w = (0; dx1): only η(X) contributes.
        let v = GeneralizedVector::tangent(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let w = GeneralizedVector::covector(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(inner_product(&v, &w).unwrap(), 0.5);
    }

    #[test]
    fn inner_product_diagonal_element() {
        let v = GeneralizedVector::new(
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(inner_product(&v, &v).unwrap(), 1.0);
    }

    #[test]
    fn pure_vectors_are_null() {
        let v = GeneralizedVector::tangent(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let w = GeneralizedVector::tangent(DVector::from_vec(vec![0.0, 1.0])).unwrap();
        assert_eq!(inner_product(&v, &w).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let v = GeneralizedVector::tangent(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let w = GeneralizedVector::tangent(DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(
            inner_product(&v, &w),
            Err(GcsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_matrix_is_half_block_swap() {
        let g = inner_product_matrix::<f64>(1);
        let mut expected = DMatrix::zeros(4, 4);
        for i in 0..2 {
            expected[(i, 2 + i)] = 0.5;
            expected[(2 + i, i)] = 0.5;
        }
        assert_eq!(g, expected);
    }

    #[test]
    fn gram_matrix_eigenvalues_are_half() {
        let g = inner_product_matrix::<f64>(1);
        let mut eig: Vec<f64> = g.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (lam, expected) in eig.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(lam, &expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn gram_matrix_signature_split() {
        for n in 1..=6 {
            let g = inner_product_matrix::<f64>(n);
            assert_eq!(signature(&g), (2 * n, 2 * n, 0));
        }
    }

    #[test]
    fn two_form_rejects_non_antisymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            TwoForm::new(m),
            Err(GcsError::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn antisymmetrize_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let b = sample::two_form::<f64, _>(3, 1.0, &mut rng);
            check_antisymmetric_exact(b.mat()).unwrap();
        }
    }

    #[test]
    fn symplectic_rejects_singular() {
        let m = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(
            SymplecticForm::new(m),
            Err(GcsError::Singular { .. })
        ));
    }

    #[test]
    fn complex_structure_rejects_identity() {
        let m = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(
            ComplexStructure::new(m),
            Err(GcsError::NotComplexStructure { .. })
        ));
    }

    #[test]
    fn symplectic_gcs_squares_to_minus_identity() {
        let g = Gcs::from_symplectic(&std_omega(1)).unwrap();
        let sq = g.mat() * g.mat();
        assert_abs_diff_eq!(sq, -DMatrix::<f64>::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn symplectic_gcs_bivector_is_minus_inverse() {
        // For the standard 2x2 block, omega^{-1} = -omega, so the upper
        // right block -omega^{-1} equals omega itself.
        let omega = std_omega(1);
        let g = Gcs::from_symplectic(&omega).unwrap();
        let pi = omega.inverse().unwrap();
        assert_abs_diff_eq!(pi, -omega.mat().clone(), epsilon = 0.0);
        assert_abs_diff_eq!(g.bivector_block(), omega.mat().clone(), epsilon = 0.0);
    }

    #[test]
    fn symplectic_gcs_has_type_zero() {
        let g = Gcs::from_symplectic(&std_omega(1)).unwrap();
        assert_eq!(g.gcs_type().unwrap(), 0);
    }

    #[test]
    fn complex_gcs_squares_to_minus_identity() {
        let g = Gcs::from_complex(&ComplexStructure::<f64>::standard(1));
        let sq = g.mat() * g.mat();
        assert_abs_diff_eq!(sq, -DMatrix::<f64>::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn complex_gcs_bivector_is_zero() {
        let g = Gcs::from_complex(&ComplexStructure::<f64>::standard(1));
        assert_eq!(g.bivector_block(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn complex_gcs_has_type_n() {
        let g1 = Gcs::from_complex(&ComplexStructure::<f64>::standard(1));
        assert_eq!(g1.gcs_type().unwrap(), 1);
        let g2 = Gcs::from_complex(&ComplexStructure::<f64>::standard(2));
        assert_eq!(g2.gcs_type().unwrap(), 2);
    }

    #[test]
    fn b_transform_matches_frozen_blocks() {
        // b = (2/3) omega on the standard n=1 form. Frozen from the
        // closed-form conjugation worked out by hand:
        // upper-left -(2/3)I, upper-right omega, lower-left (13/9) omega,
        // lower-right (2/3)I.
        let omega = std_omega(1);
        let g = Gcs::from_symplectic(&omega).unwrap();
        let b = omega.as_two_form().scaled(2.0 / 3.0);
        let gb = g.b_transform(&b).unwrap();

        let eye = DMatrix::<f64>::identity(2, 2);
        assert_abs_diff_eq!(gb.tangent_endo(), -&eye * (2.0 / 3.0), epsilon = 1e-15);
        assert_abs_diff_eq!(gb.bivector_block(), omega.mat().clone(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            gb.two_form_block(),
            omega.mat() * (13.0 / 9.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(gb.cotangent_endo(), &eye * (2.0 / 3.0), epsilon = 1e-15);

        // Independent oracle: the explicit triple matrix product.
        let e_plus = shear(b.mat(), false);
        let e_minus = shear(b.mat(), true);
        let oracle = &e_minus * g.mat() * &e_plus;
        assert_abs_diff_eq!(gb.mat().clone(), oracle, epsilon = 0.0);
    }

    #[test]
    fn zero_b_transform_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Gcs::from_symplectic(&sample::symplectic::<f64, _>(2, &mut rng)).unwrap();
        let gb = g.b_transform(&TwoForm::zero(2)).unwrap();
        assert_eq!(gb.mat(), g.mat());
    }

    #[test]
    fn b_transform_of_complex_type_keeps_zero_bivector() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = Gcs::from_complex(&ComplexStructure::<f64>::standard(1));
        let b = sample::two_form::<f64, _>(1, 1.0, &mut rng);
        let gb = g.b_transform(&b).unwrap();
        assert_eq!(gb.bivector_block(), DMatrix::zeros(2, 2));
        // and the closed-form lower-left block BJ + J^T B
        let j = ComplexStructure::<f64>::standard(1);
        let expected = b.mat() * j.mat() + j.mat().transpose() * b.mat();
        assert_abs_diff_eq!(gb.two_form_block(), expected, epsilon = 1e-14);
    }

    #[test]
    fn b_transform_group_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let g = Gcs::from_symplectic(&sample::symplectic::<f64, _>(2, &mut rng)).unwrap();
            let b = sample::two_form::<f64, _>(2, 1.0, &mut rng);
            let back = g
                .b_transform(&b)
                .unwrap()
                .b_transform(&b.negated())
                .unwrap();
            assert_abs_diff_eq!(back.mat().clone(), g.mat().clone(), epsilon = 1e-12);
        }
    }

    #[test]
    fn type_invariant_under_b_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 1..=3 {
            let gs = Gcs::from_symplectic(&sample::symplectic::<f64, _>(n, &mut rng)).unwrap();
            let gc = Gcs::from_complex(&sample::complex_structure::<f64, _>(n, &mut rng));
            let b = sample::two_form::<f64, _>(n, 1.0, &mut rng);
            assert_eq!(gs.b_transform(&b).unwrap().gcs_type().unwrap(), 0);
            assert_eq!(gc.b_transform(&b).unwrap().gcs_type().unwrap(), n);
        }
    }

    #[test]
    fn verify_passes_on_constructions_and_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=4 {
            let g = Gcs::from_symplectic(&sample::symplectic::<f64, _>(n, &mut rng)).unwrap();
            let b = sample::two_form::<f64, _>(n, 1.0, &mut rng);
            assert!(g.verify().all_pass());
            assert!(g.b_transform(&b).unwrap().verify().all_pass());
            let gc = Gcs::from_complex(&sample::complex_structure::<f64, _>(n, &mut rng));
            assert!(gc.verify().all_pass());
            assert!(gc.b_transform(&b).unwrap().verify().all_pass());
        }
    }

    #[test]
    fn identity_candidate_fails_square_condition_with_residual_two() {
        let g = Gcs::candidate(DMatrix::<f64>::identity(4, 4)).unwrap();
        let report = g.verify();
        assert!(!report.all_pass());
        let square = &report.checks[0];
        assert_eq!(square.name, "square_condition");
        assert_eq!(square.residual, 2.0);
        assert!(!square.pass);
    }

    #[test]
    fn candidate_rejects_non_doubled_dimension() {
        assert!(matches!(
            Gcs::candidate(DMatrix::<f64>::identity(6, 6)),
            Err(GcsError::NotDoubled { dim: 6 })
        ));
    }

    #[test]
    fn b_transform_vector_fixed_components() {
        // X = e1, B with B_{12} = 1: the form part gains (B11*1, B21*1) = (0, -1).
        let b = TwoForm::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let v = GeneralizedVector::tangent(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let out = b_transform_vector(&v, &b).unwrap();
        assert_eq!(out.vec_part(), v.vec_part());
        assert_eq!(out.form_part(), &DVector::from_vec(vec![0.0, -1.0]));
    }

    #[test]
    fn b_transform_vector_fixes_pure_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let b = sample::two_form::<f64, _>(1, 1.0, &mut rng);
        let v = GeneralizedVector::covector(DVector::from_vec(vec![0.3, -0.7])).unwrap();
        assert_eq!(b_transform_vector(&v, &b).unwrap(), v);
    }

    #[test]
    fn b_transform_vector_preserves_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let b = sample::two_form::<f64, _>(2, 1.0, &mut rng);
            let v = sample::generalized_vector::<f64, _>(2, &mut rng);
            let w = sample::generalized_vector::<f64, _>(2, &mut rng);
            let lhs = inner_product(
                &b_transform_vector(&v, &b).unwrap(),
                &b_transform_vector(&w, &b).unwrap(),
            )
            .unwrap();
            let rhs = inner_product(&v, &w).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn interior_product_of_zero_vector() {
        let b = TwoForm::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let out = interior_product(&DVector::zeros(2), &b).unwrap();
        assert_eq!(out, DVector::zeros(2));
    }

    #[test]
    fn interior_product_fixed_components() {
        let b = TwoForm::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let x = DVector::from_vec(vec![1.0, 2.0]);
        let out = interior_product(&x, &b).unwrap();
        assert_eq!(out, DVector::from_vec(vec![2.0, -1.0]));
    }

    #[test]
    fn interior_product_pairs_to_zero_with_itself() {
        // Integer-valued fixture: every product is exact, so the pairing
        // cancels to exactly zero.
        let b = TwoForm::new(DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 2.0, -3.0, 1.0, //
                -2.0, 0.0, 4.0, -5.0, //
                3.0, -4.0, 0.0, 6.0, //
                -1.0, 5.0, -6.0, 0.0,
            ],
        ))
        .unwrap();
        let x = DVector::from_vec(vec![3.0, -2.0, 7.0, 5.0]);
        let xi = interior_product(&x, &b).unwrap();
        assert_eq!(xi.dot(&x), 0.0);

        // Random floating-point inputs cancel to rounding noise.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let b = sample::two_form::<f64, _>(3, 1.0, &mut rng);
            let x = DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
            let xi = interior_product(&x, &b).unwrap();
            assert_abs_diff_eq!(xi.dot(&x), 0.0, epsilon = 1e-13);
        }
    }
}
