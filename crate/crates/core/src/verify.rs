//! Seeded verifiers behind the `verify` command.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::maps::{choi_min_eigenvalue, compose_maps, sampled_positivity_margin, transpose_map, LinMap};
use crate::monads::{
    dist_mult, dist_unit, from_pu, function_to_miu, kleisli_compose, miu_to_function, to_pu, Dist, FinDist,
    FunctionMap, KleisliMap,
};
use crate::random::{random_dist, random_fin_dist, random_state, random_stochastic, rng};
use crate::report::{Check, MaxResidual};
use crate::states::{barycentre, FinMeasure};
use crate::triangle::stat_of_map;
use crate::AlgebraSignature;

pub use crate::report::VerificationReport;

/// Function spaces larger than this are sampled instead of enumerated.
const MAX_ENUMERATED_FUNCTIONS: usize = 4096;

/// Magnitude of the noise added to PU maps before extracting a kernel.
pub const PU_NOISE: f64 = 1e-12;

/// Adds uniform noise of magnitude at most `eps` to every coefficient.
pub fn perturb<R: Rng + ?Sized>(f: &LinMap, eps: f64, rng: &mut R) -> Result<LinMap> {
    let c = f.coeffs();
    let data = c
        .as_slice()
        .iter()
        .map(|z| {
            let noise = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            z + noise.scale(eps / std::f64::consts::SQRT_2)
        })
        .collect();
    LinMap::new(f.dom().clone(), f.cod().clone(), ComplexMatrix::new(c.rows(), c.cols(), data)?)
}

/// Round trips between `n × m` stochastic matrices and PU maps
/// `ℂᵐ → ℂⁿ`, the contravariant functor law, and the function ↔ MIU
/// correspondence for `n → m`.
pub fn verify_equivalence(n: usize, m: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let mut r = rng(seed);
    let mut kleisli_round = MaxResidual::default();
    let mut pu_round = MaxResidual::default();
    let mut functor = MaxResidual::default();
    for _ in 0..trials {
        let f = random_stochastic(n, m, &mut r);
        kleisli_round.push_result(from_pu(&to_pu(&f)).and_then(|back| back.max_distance(&f)));

        let h = perturb(&to_pu(&random_stochastic(n, m, &mut r)), PU_NOISE, &mut r)?;
        pu_round.push_result(from_pu(&h).and_then(|k| to_pu(&k).distance(&h)));

        let g = random_stochastic(m, n, &mut r);
        functor.push_result(
            kleisli_compose(&g, &f)
                .and_then(|gf| compose_maps(&to_pu(&f), &to_pu(&g)).and_then(|fg| to_pu(&gf).distance(&fg))),
        );
    }
    let mut checks = vec![
        kleisli_round.into_check("from_pu_after_to_pu", tol),
        pu_round.into_check("to_pu_after_from_pu", tol),
        functor.into_check("contravariant_functor_law", tol),
    ];

    let count = (m as f64).powi(n as i32);
    let functions = if count <= MAX_ENUMERATED_FUNCTIONS as f64 {
        FunctionMap::enumerate(n, m)
    } else {
        (0..trials).map(|_| FunctionMap::new(m, (0..n).map(|_| r.gen_range(0..m)).collect())).collect::<Result<_>>()?
    };
    let failures = functions
        .iter()
        .filter(|f| !matches!(function_to_miu(f).and_then(|h| miu_to_function(&h)), Ok(back) if &back == *f))
        .count();
    checks.push(Check::at_most("miu_function_round_trip_failures", failures as f64, 0.0));

    Ok(VerificationReport { target: format!("equivalence n={n} m={m}"), checks, metrics: BTreeMap::new() })
}

pub const MONAD_LAW_TOL: f64 = 1e-12;
pub const BARYCENTRE_TOL: f64 = 1e-10;

/// Largest atom count used when sampling nested distributions.
const MAX_ATOMS: usize = 4;

fn random_nested<R: Rng + ?Sized>(n: usize, rng: &mut R) -> FinDist<Dist> {
    let k = rng.gen_range(1..=MAX_ATOMS);
    let inner = (0..k).map(|_| random_dist(n, rng)).collect();
    random_fin_dist(inner, rng)
}

/// Unit and associativity laws of the distribution monad, Kleisli unit
/// laws and associativity, the barycentre of a Dirac measure, and the
/// barycentre of a nested distribution agreeing with its flattening.
pub fn verify_monad_laws(n: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut r = rng(seed);
    let sig = AlgebraSignature::commutative(n)?;
    let mut left_unit = MaxResidual::default();
    let mut right_unit = MaxResidual::default();
    let mut assoc = MaxResidual::default();
    let mut kleisli = MaxResidual::default();
    let mut counit = MaxResidual::default();
    let mut mu_bary = MaxResidual::default();

    for _ in 0..trials {
        let phi = random_dist(n, &mut r);
        left_unit.push_result(dist_mult(&FinDist::point(phi.clone())).and_then(|d| d.distance(&phi)));
        let spread: Result<Vec<(f64, Dist)>> =
            phi.weights().iter().enumerate().map(|(i, &w)| Ok((w, dist_unit(i, n)?))).collect();
        right_unit
            .push_result(spread.and_then(FinDist::new).and_then(|fd| dist_mult(&fd)).and_then(|d| d.distance(&phi)));

        let outer_k = r.gen_range(1..=MAX_ATOMS);
        let inner: Vec<FinDist<Dist>> = (0..outer_k).map(|_| random_nested(n, &mut r)).collect();
        let triple = random_fin_dist(inner, &mut r);
        let flat_first = dist_mult(&triple.join());
        let inner_first = triple
            .atoms()
            .iter()
            .map(|(w, x)| Ok((*w, dist_mult(x)?)))
            .collect::<Result<Vec<_>>>()
            .and_then(FinDist::new)
            .and_then(|fd| dist_mult(&fd));
        assoc.push_result(flat_first.and_then(|a| a.distance(&inner_first?)));

        let f = random_stochastic(n, n, &mut r);
        let g = random_stochastic(n, n, &mut r);
        let h = random_stochastic(n, n, &mut r);
        let id = KleisliMap::identity(n)?;
        let residual = (|| -> Result<f64> {
            let lhs = kleisli_compose(&h, &kleisli_compose(&g, &f)?)?;
            let rhs = kleisli_compose(&kleisli_compose(&h, &g)?, &f)?;
            Ok(lhs
                .max_distance(&rhs)?
                .max(kleisli_compose(&id, &f)?.max_distance(&f)?)
                .max(kleisli_compose(&f, &id)?.max_distance(&f)?))
        })();
        kleisli.push_result(residual);

        let s = random_state(&sig, &mut r);
        counit.push_result(barycentre(&FinMeasure::dirac(s.clone())).and_then(|b| b.distance(&s)));

        let nested = random_nested(n, &mut r);
        let residual = (|| -> Result<f64> {
            let bary = barycentre(&FinMeasure::from_nested(&nested)?)?;
            let flat = crate::monads::dist_to_state(&dist_mult(&nested)?);
            bary.distance(&flat)
        })();
        mu_bary.push_result(residual);
    }

    Ok(VerificationReport {
        target: format!("monad-laws n={n}"),
        checks: vec![
            left_unit.into_check("mult_after_unit", MONAD_LAW_TOL),
            right_unit.into_check("mult_after_mapped_unit", MONAD_LAW_TOL),
            assoc.into_check("mult_associativity", MONAD_LAW_TOL),
            kleisli.into_check("kleisli_category_laws", MONAD_LAW_TOL),
            counit.into_check("barycentre_of_dirac", BARYCENTRE_TOL),
            mu_bary.into_check("mult_is_barycentre", BARYCENTRE_TOL),
        ],
        metrics: BTreeMap::new(),
    })
}

pub const CHOI_TOL: f64 = 1e-9;
pub const INVOLUTION_TOL: f64 = 1e-10;

/// The transpose on `M_n` is positive but not completely positive: its
/// Choi matrix is the swap, with eigenvalue `-1`, while every sampled
/// projection has a positive image. Its state map squares to the identity.
pub fn verify_transpose_witness(
    n: usize,
    samples: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let t = transpose_map(n)?;
    let choi = choi_min_eigenvalue(&t)?;
    let margin = sampled_positivity_margin(&t, samples, seed)?;

    let sig = t.dom().clone();
    let st = stat_of_map(&t)?;
    let mut r = rng(seed.wrapping_add(1));
    let mut involution = MaxResidual::default();
    for _ in 0..trials {
        let s = random_state(&sig, &mut r);
        involution.push_result(st.apply(&s).and_then(|once| st.apply(&once)).and_then(|twice| twice.distance(&s)));
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("min_choi_eigenvalue".to_string(), choi);
    metrics.insert("min_sampled_image_eigenvalue".to_string(), margin);
    Ok(VerificationReport {
        target: format!("transpose-witness n={n}"),
        checks: vec![
            Check::at_most("choi_min_eigenvalue_is_minus_one", (choi + 1.0).abs(), CHOI_TOL),
            Check::at_most("sampled_positivity_violation", (-margin).max(0.0), tol),
            involution.into_check("state_map_squared_is_identity", INVOLUTION_TOL),
        ],
        metrics,
    })
}
