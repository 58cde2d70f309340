//! Cross-module property suites: every named check compares a residual
//! against its stated tolerance. The CLI `verify` command runs
//! [`run_all`] and formats the report; the acceptance tests reuse the
//! individual suites. Everything here runs at `f64`.

use nalgebra::DVector;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coherent::{
    coherent_state_vector, coherent_tail_bound, oscillator_moments, relative_fluctuation,
    CoherentAmplitude,
};
use crate::fluct::{
    fluct_prob_darboux, fluct_prob_physical, fluctuation_metric, hermitian_average,
    log_gaussian_fluct_prob_tv, poisson_bracket, riemann_average, symplectic_area,
    symplectic_average, to_darboux, AreaPatch, BoxDomain, DarbouxPlane, FluctuationMetric,
    IdealGasRefs, ThermoState,
};
use crate::gcs::{
    b_transform_vector, inner_product, inner_product_matrix, interior_product, sample, signature,
    Gcs, SymplecticForm,
};
use crate::quad::QuadratureSpec;
use crate::report::{CheckResult, Report};
use crate::unruh::{
    acceleration_of, accelerated_coords, debroglie_time, delta_xi, thermal_exponent,
    transform_wavefunction_phase, transformed_hamiltonian, unruh_phase, BFieldSpec,
    ContractionConvention, FrameSpec, PhysicalConstants, TrajectorySpec,
};

/// Trials per randomized check in [`gcs_checks`].
pub const GCS_TRIALS: usize = 40;

/// Run every module suite at the given fibre half-dimension and seed.
pub fn run_all(n: usize, seed: u64) -> Report {
    let mut report = Report::default();
    report.extend(gcs_checks(n, seed, GCS_TRIALS));
    report.extend(fluct_checks(seed));
    report.extend(coherent_checks());
    report.extend(unruh_checks());
    report
}

/// Axioms, closed forms, classification and isometry of the doubled-fibre
/// algebra, on random well-conditioned inputs at fixed n.
pub fn gcs_checks(n: usize, seed: u64, trials: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();

    let mut axiom_sympl = 0.0f64;
    let mut axiom_cplx = 0.0f64;
    let mut axiom_transformed = 0.0f64;
    let mut closed_form = 0.0f64;
    let mut group_inverse = 0.0f64;
    let mut type_sympl_bad = 0usize;
    let mut type_cplx_bad = 0usize;
    let mut type_invariance_bad = 0usize;
    let mut vec_isometry = 0.0f64;
    let mut ixb_pairing = 0.0f64;

    for _ in 0..trials {
        let omega = sample::symplectic::<f64, _>(n, &mut rng);
        let j = sample::complex_structure::<f64, _>(n, &mut rng);
        let b = sample::two_form::<f64, _>(n, 1.0, &mut rng);

        let gs = Gcs::from_symplectic(&omega).expect("sampled form is nondegenerate");
        let gc = Gcs::from_complex(&j);
        axiom_sympl = axiom_sympl.max(gs.verify().max_residual());
        axiom_cplx = axiom_cplx.max(gc.verify().max_residual());

        let gs_b = gs.b_transform(&b).expect("matching dimensions");
        let gc_b = gc.b_transform(&b).expect("matching dimensions");
        axiom_transformed = axiom_transformed
            .max(gs_b.verify().max_residual())
            .max(gc_b.verify().max_residual());

        // Closed-form blocks of the conjugated structures.
        let pi = omega.inverse().expect("nondegenerate");
        let bm = b.mat();
        closed_form = closed_form
            .max(max_abs(&(gs_b.tangent_endo() + &pi * bm)))
            .max(max_abs(&(gs_b.bivector_block() + &pi)))
            .max(max_abs(
                &(gs_b.two_form_block() - (omega.mat() + bm * &pi * bm)),
            ))
            .max(max_abs(&(gs_b.cotangent_endo() - bm * &pi)));
        closed_form = closed_form
            .max(max_abs(&(gc_b.tangent_endo() + j.mat())))
            .max(max_abs(&gc_b.bivector_block()))
            .max(max_abs(
                &(gc_b.two_form_block() - (bm * j.mat() + j.mat().transpose() * bm)),
            ))
            .max(max_abs(&(gc_b.cotangent_endo() - j.mat().transpose())));

        let back = gs_b.b_transform(&b.negated()).expect("matching dimensions");
        group_inverse = group_inverse.max(max_abs(&(back.mat() - gs.mat())));

        if gs.gcs_type().ok() != Some(0) {
            type_sympl_bad += 1;
        }
        if gc.gcs_type().ok() != Some(n) {
            type_cplx_bad += 1;
        }
        if gs_b.gcs_type().ok() != Some(0) || gc_b.gcs_type().ok() != Some(n) {
            type_invariance_bad += 1;
        }

        let v = sample::generalized_vector::<f64, _>(n, &mut rng);
        let w = sample::generalized_vector::<f64, _>(n, &mut rng);
        let before = inner_product(&v, &w).expect("matching n");
        let after = inner_product(
            &b_transform_vector(&v, &b).expect("matching n"),
            &b_transform_vector(&w, &b).expect("matching n"),
        )
        .expect("matching n");
        vec_isometry = vec_isometry.max((after - before).abs());

        let xi = interior_product(v.vec_part(), &b).expect("matching n");
        ixb_pairing = ixb_pairing.max(xi.dot(v.vec_part()).abs());
    }

    let sig = signature(&inner_product_matrix::<f64>(n));
    let sig_bad = usize::from(sig != (2 * n, 2 * n, 0));

    report.push(CheckResult::new("gcs/symplectic_axioms", axiom_sympl, 1e-10));
    report.push(CheckResult::new("gcs/complex_axioms", axiom_cplx, 1e-10));
    report.push(CheckResult::new(
        "gcs/b_transform_axioms",
        axiom_transformed,
        1e-10,
    ));
    report.push(CheckResult::new(
        "gcs/b_transform_closed_form",
        closed_form,
        1e-12,
    ));
    report.push(CheckResult::new(
        "gcs/b_transform_group_inverse",
        group_inverse,
        1e-12,
    ));
    report.push(CheckResult::new(
        "gcs/type_symplectic_is_zero",
        type_sympl_bad as f64,
        0.0,
    ));
    report.push(CheckResult::new(
        "gcs/type_complex_is_n",
        type_cplx_bad as f64,
        0.0,
    ));
    report.push(CheckResult::new(
        "gcs/type_invariant_under_b_transform",
        type_invariance_bad as f64,
        0.0,
    ));
    report.push(CheckResult::new(
        "gcs/gram_signature_split",
        sig_bad as f64,
        0.0,
    ));
    report.push(CheckResult::new(
        "gcs/vector_isometry",
        vec_isometry,
        1e-12,
    ));
    report.push(CheckResult::new(
        "gcs/interior_product_null_pairing",
        ixb_pairing,
        1e-13,
    ));
    report
}

/// Fluctuation probabilities, brackets and the three average functionals.
pub fn fluct_checks(seed: u64) -> Report {
    let mut report = Report::default();
    let refs = IdealGasRefs::<f64>::unit();

    // Two displays of the Gaussian probability agree exactly.
    let mut consistency = 0.0f64;
    for (t, v, cv, dpdv) in [(1.0f64, 1.0, 1.5, -1.0), (1.7, 0.9, 2.3, -0.8), (0.4, 3.0, 0.7, -2.5)]
    {
        let state = ThermoState::new(t, v, 1.0, 1.0, cv, dpdv, 1.0).expect("valid state");
        let m = fluctuation_metric(&state);
        for (dt, dv) in [(0.1f64, 0.2), (-0.4, 0.05), (1.0, -1.0)] {
            let lhs = log_gaussian_fluct_prob_tv(&state, dt, dv);
            let quad = m.g_tt() * dt * dt + m.g_vv() * dv * dv;
            consistency = consistency.max((lhs + quad).abs());
        }
    }
    report.push(CheckResult::new(
        "fluct/log_prob_metric_consistency",
        consistency,
        0.0,
    ));

    // Physical vs Darboux probability: observed convergence order >= 2.7.
    let gap = |eps: f64| -> f64 {
        let state = ThermoState::ideal_gas(1.0, 1.0, 1.0, &refs, 1.0).expect("ideal gas");
        let (dp, dv, dt, ds) = (0.3 * eps, -0.2 * eps, 0.15 * eps, 0.1 * eps);
        let w_phys = fluct_prob_physical(&state, dp, dv, dt, ds, &refs).expect("on shell");
        let a = to_darboux(state.p(), state.v(), state.t(), state.s(), &refs).expect("positive");
        let b = to_darboux(
            state.p() + dp,
            state.v() + dv,
            state.t() + dt,
            state.s() + ds,
            &refs,
        )
        .expect("positive");
        let w_darb =
            fluct_prob_darboux(b.p1 - a.p1, b.q1 - a.q1, b.p2 - a.p2, b.q2 - a.q2, 1.0, 1.0);
        (w_phys.ln() - w_darb.ln()).abs()
    };
    let (g1, g2, g3) = (gap(1e-1), gap(5e-2), gap(2.5e-2));
    let order = (g1 / g2).log2().min((g2 / g3).log2());
    report.push(CheckResult::new(
        "fluct/darboux_order_deficit",
        (2.7 - order).max(0.0),
        0.0,
    ));

    // Rectangle areas reproduce the Darboux probability exactly.
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
    let area_residual =
        (fluct_prob_darboux(0.1f64, 0.2, 0.3, 0.4, 1.0, 1.0) - (-0.5 * area).exp()).abs();
    report.push(CheckResult::new(
        "fluct/area_probability_identity",
        area_residual,
        0.0,
    ));

    // Poisson bracket: antisymmetry and the Jacobi identity.
    let omega = SymplecticForm::<f64>::standard(1);
    let f = |x: &[f64]| x[1] * x[1] + x[0];
    let g = |x: &[f64]| x[0] * x[1];
    let h = |x: &[f64]| x[0] * x[0];
    let point = [0.7, -0.4];
    let fg = poisson_bracket(f, g, &omega, &point, None).expect("bracket");
    let gf = poisson_bracket(g, f, &omega, &point, None).expect("bracket");
    let ff = poisson_bracket(f, f, &omega, &point, None).expect("bracket");
    report.push(CheckResult::new(
        "fluct/poisson_antisymmetry",
        (fg + gf).abs().max(ff.abs()),
        1e-10,
    ));
    let br = |a: &dyn Fn(&[f64]) -> f64, b: &dyn Fn(&[f64]) -> f64, x: &[f64]| {
        poisson_bracket(a, b, &omega, x, None).expect("bracket")
    };
    let jacobi = br(&|x: &[f64]| br(&g, &h, x), &f, &point)
        + br(&|x: &[f64]| br(&h, &f, x), &g, &point)
        + br(&|x: &[f64]| br(&f, &g, x), &h, &point);
    report.push(CheckResult::new("fluct/poisson_jacobi", jacobi.abs(), 1e-5));

    // Average functionals: exact normalization and Gaussian moments.
    let metric = FluctuationMetric::<f64>::new(1.0, 1.0).expect("positive");
    let grid = QuadratureSpec::grid(513);
    let one = riemann_average(|_, _| 1.0, &metric, &QuadratureSpec::grid(129)).expect("grid");
    report.push(CheckResult::new(
        "fluct/riemann_normalization",
        (one.value - 1.0).abs(),
        1e-9,
    ));
    let t2 = riemann_average(|t, _| t * t, &metric, &grid).expect("grid");
    let metric2 = FluctuationMetric::<f64>::new(2.0, 1.0).expect("positive");
    let t2b = riemann_average(|t, _| t * t, &metric2, &grid).expect("grid");
    report.push(CheckResult::new(
        "fluct/riemann_second_moment",
        (t2.value - 0.5).abs().max((t2b.value - 0.25).abs()),
        1e-6,
    ));

    let omega1 = SymplecticForm::<f64>::standard(1);
    let domain = BoxDomain::cube(2, 0.0, 1.0).expect("box");
    let q_mean = symplectic_average(|x| x[1], &omega1, &domain, &QuadratureSpec::grid(33))
        .expect("grid");
    report.push(CheckResult::new(
        "fluct/symplectic_uniform_mean",
        (q_mean.value - 0.5).abs(),
        1e-9,
    ));

    let h1 = nalgebra::DMatrix::from_element(1, 1, Complex::new(2.0f64, 0.0));
    let absz2 = hermitian_average(|z| z[0].norm_sqr(), &h1, &grid).expect("grid");
    report.push(CheckResult::new(
        "fluct/hermitian_second_moment",
        (absz2.value - 0.5).abs(),
        1e-6,
    ));

    let mc = QuadratureSpec::monte_carlo(100_000, seed);
    let mc_one = riemann_average(|_, _| 1.0, &metric, &mc).expect("mc");
    report.push(CheckResult::new(
        "fluct/monte_carlo_normalization",
        (mc_one.value - 1.0).abs(),
        1e-12,
    ));

    report
}

/// Coherent-state moments against the closed forms and the Fock oracle.
pub fn coherent_checks() -> Report {
    let mut report = Report::default();
    let cutoff = 64;

    let mut mean_err = 0.0f64;
    let mut fluct_err = 0.0f64;
    let mut resid_ratio = 0.0f64;
    for (re, im) in [
        (0.0f64, 0.0),
        (0.5, 0.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (1.5, -0.5),
        (2.0, 0.0),
        (0.6, -0.8),
    ] {
        let z = CoherentAmplitude::from_parts(re, im).expect("finite");
        let m = oscillator_moments(&z, cutoff).expect("adequate cutoff");
        let a2 = z.abs_sqr();
        mean_err = mean_err.max((m.mean - (a2 + 0.5)).abs());
        fluct_err = fluct_err.max((m.fluctuation - a2.sqrt()).abs());

        let resid = coherent_state_vector(&z, cutoff).annihilation_residual(&z);
        let allowed = 10.0 * (((cutoff as f64 + 1.0) * coherent_tail_bound(&z, cutoff)).sqrt()
            + 1e-14);
        resid_ratio = resid_ratio.max(resid / allowed);
    }
    report.push(CheckResult::new("coherent/mean_closed_form", mean_err, 1e-8));
    report.push(CheckResult::new(
        "coherent/fluctuation_closed_form",
        fluct_err,
        1e-8,
    ));
    report.push(CheckResult::new(
        "coherent/annihilation_residual_ratio",
        resid_ratio,
        1.0,
    ));

    let mut asym = 0.0f64;
    for a in [3.0f64, 4.0, 5.0, 8.0, 16.0] {
        let z = CoherentAmplitude::from_parts(a, 0.0).expect("finite");
        let r = relative_fluctuation(&z).expect("nonzero");
        asym = asym.max(((r - 1.0 / a).abs() - 1.0 / (a * a * a)).max(0.0));
    }
    report.push(CheckResult::new(
        "coherent/kaehler_asymptote_margin",
        asym,
        0.0,
    ));

    let z10 = CoherentAmplitude::from_parts(10.0f64, 0.0).expect("finite");
    let r10 = relative_fluctuation(&z10).expect("nonzero");
    report.push(CheckResult::new(
        "coherent/relative_fluctuation_at_ten",
        (r10 - 0.1).abs() / 0.1,
        5e-3,
    ));
    report
}

/// The accelerated-frame chain: phase/line-integral equivalence, Simpson
/// behaviour, and the complexified thermal substitution.
pub fn unruh_checks() -> Report {
    let mut report = Report::default();
    let pc = PhysicalConstants::<f64>::natural();
    let conv = ContractionConvention::PaperComponents;

    let mut equiv = 0.0f64;
    let mut exactness = 0.0f64;
    for m in [0.5f64, 1.0, 2.0] {
        for alpha in [0.5f64, 1.0, 2.0] {
            let fs = FrameSpec::new(alpha, m).expect("valid frame");
            let traj = TrajectorySpec::uniform_acceleration(&fs);
            for k in 0..7 {
                let t = 0.1 + (2.9 / 6.0) * k as f64;
                let dxi =
                    delta_xi(&BFieldSpec::default(), &traj, t, 256, conv).expect("line integral");
                let phase = unruh_phase(&fs, t, &pc);
                equiv = equiv.max(((dxi / pc.hbar - phase) / phase).abs());
            }
        }
    }
    // Unit-scale closed-form match, absolute.
    let fs = FrameSpec::<f64>::new(1.0, 1.0).expect("valid frame");
    let traj = TrajectorySpec::uniform_acceleration(&fs);
    for t in [0.25f64, 0.5, 1.0] {
        for b in [2.0f64 / 3.0, 1.0] {
            let dxi =
                delta_xi(&BFieldSpec::constant(b), &traj, t, 1024, conv).expect("line integral");
            exactness = exactness.max((dxi - 0.5 * b * t * t * t).abs());
        }
    }
    report.push(CheckResult::new("unruh/phase_equivalence", equiv, 1e-9));
    report.push(CheckResult::new(
        "unruh/constant_field_quadrature",
        exactness,
        1e-12,
    ));

    // Simpson order on the tau^4 integrand from B(x, p) = x.
    let bx = BFieldSpec::new(|x, _| x);
    let err = |steps: usize| {
        (delta_xi(&bx, &traj, 1.0, steps, conv).expect("line integral") - 0.15).abs()
    };
    let min_ratio = (err(16) / err(32)).min(err(32) / err(64));
    report.push(CheckResult::new(
        "unruh/quadrature_order_margin",
        (8.0 - min_ratio).max(0.0),
        0.0,
    ));

    // Thermal chain on 20 (m, T) pairs.
    let mut chain = 0.0f64;
    for m in [0.5f64, 1.0, 1.5, 2.0, 3.0] {
        for temp in [0.5f64, 1.0, 2.0, 5.0] {
            let alpha = acceleration_of(temp, &pc).expect("nonnegative");
            let t = debroglie_time(temp, &pc).expect("positive temperature");
            let i = Complex::new(0.0, 1.0);
            let composed = i / pc.hbar * (m / 3.0) * alpha * alpha * t * t * t;
            let expected = thermal_exponent(m, temp, &pc).expect("positive inputs");
            chain = chain
                .max(((composed.re - expected) / expected).abs())
                .max((composed.im / expected).abs());
        }
    }
    report.push(CheckResult::new("unruh/thermal_chain", chain, 1e-12));

    let mut modulus = 0.0f64;
    for dxi in [0.0f64, 0.3, 1.0 / 3.0, 48.0, -7.0] {
        let f = transform_wavefunction_phase(dxi, &pc);
        modulus = modulus.max((f.norm_sqr().sqrt() - 1.0).abs());
    }
    report.push(CheckResult::new("unruh/phase_unit_modulus", modulus, 1e-15));

    let fs0 = FrameSpec::<f64>::new(0.0, 1.0).expect("valid frame");
    let th = transformed_hamiltonian(3.7, 1.1, 2.0, &fs0);
    let inertial = (th.h_prime - 3.7)
        .abs()
        .max((accelerated_coords(0.9, 2.0, &fs0) - 0.9).abs());
    report.push(CheckResult::new("unruh/inertial_limit", inertial, 0.0));

    report
}

/// Axiom checks for a candidate matrix supplied from a file, with names
/// prefixed `candidate/`.
pub fn candidate_checks(g: &Gcs<f64>) -> Report {
    let mut report = Report::default();
    for check in g.verify().checks {
        report.push(CheckResult::new(
            format!("candidate/{}", check.name),
            check.residual,
            check.tolerance,
        ));
    }
    report
}

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Convenience used by tests: an interior-product pairing residual for a
/// deterministic vector, exercising the dot against the contraction.
pub fn pairing_residual(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = sample::two_form::<f64, _>(n, 1.0, &mut rng);
    let v = sample::generalized_vector::<f64, _>(n, &mut rng);
    let xi = interior_product(v.vec_part(), &b).expect("matching n");
    let x: &DVector<f64> = v.vec_part();
    xi.dot(x).abs()
}
