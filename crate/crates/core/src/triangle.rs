//! The state-and-effect triangle over finite-dimensional C*-algebras.
//!
//! A PU map `f: A → B` acts backwards on predicates as `[0,1]_A → [0,1]_B`
//! and forwards on states as `Stat(B) → Stat(A)`. The verifiers here check
//! that states are the same thing as effect-module maps into `[0, 1]`, that
//! effects are the same thing as affine functions on states, and that the
//! state functor loses no information about PU maps.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraSignature, Effect, Element};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::maps::{classify, LinMap};
use crate::monads::{dist_to_state, state_to_dist};
use crate::random::{random_dist, random_effect, random_pu_map, random_state, rng};
use crate::report::{Check, MaxResidual};
use crate::states::{emod_check, emod_to_state, spanning_states, xi_inverse, EModReport, State};

fn ensure_pu(f: &LinMap) -> Result<()> {
    let class = classify(f);
    if !class.is_pu() {
        return Err(Error::NotPu(format!("unital={}, positive={:?}", class.unital, class.positive)));
    }
    Ok(())
}

/// The restriction of a PU map to effects (the Heisenberg picture).
#[derive(Debug, Clone)]
pub struct PredicateMap {
    map: LinMap,
}

impl PredicateMap {
    pub fn map(&self) -> &LinMap {
        &self.map
    }

    pub fn apply(&self, e: &Effect) -> Result<Effect> {
        Effect::new(self.map.apply(e.element())?)
    }

    /// Probes the effect-module homomorphism axioms.
    pub fn check(&self, trials: usize, seed: u64) -> EModReport {
        emod_check(self.map.dom(), self.map.cod(), |e| self.map.apply(e.element()), trials, seed)
    }
}

pub fn pred_of_map(f: &LinMap) -> Result<PredicateMap> {
    ensure_pu(f)?;
    Ok(PredicateMap { map: f.clone() })
}

/// Precomposition with a PU map `f: A → B`, sending states of `B` to states
/// of `A` (the Schrödinger picture).
#[derive(Debug, Clone)]
pub struct StateMap {
    map: LinMap,
}

impl StateMap {
    pub fn map(&self) -> &LinMap {
        &self.map
    }

    /// `σ ↦ σ ∘ f`, assembled from its values on the matrix units of `A`.
    pub fn apply(&self, s: &State) -> Result<State> {
        let dom = self.map.dom();
        self.map.cod().ensure_eq(s.signature())?;
        let sigma = s.functional();
        let coeffs = self.map.coeffs();
        let values: Vec<Complex64> =
            (0..dom.dim()).map(|k| sigma.iter().enumerate().map(|(r, c)| c * coeffs[(r, k)]).sum()).collect();
        let offsets = dom.offsets();
        let mut densities = Vec::with_capacity(dom.num_blocks());
        for (b, &n) in dom.blocks().iter().enumerate() {
            let mut rho = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    rho[(j, i)] = values[offsets[b] + i * n + j];
                }
            }
            densities.push(rho);
        }
        State::new(dom.clone(), densities)
    }
}

pub fn stat_of_map(f: &LinMap) -> Result<StateMap> {
    ensure_pu(f)?;
    Ok(StateMap { map: f.clone() })
}

/// Outcome of [`verify_triangle`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub algebra: AlgebraSignature,
    pub checks: Vec<Check>,
}

impl TriangleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const TRIANGLE_TOL: f64 = 1e-7;
pub const MAX_TRIANGLE_DIM: usize = 64;
pub const MAX_FULL_FAITHFUL_DIM: usize = 16;

/// Samples drawn by each inner effect-module probe during verification.
const INNER_EMOD_TRIALS: usize = 5;

/// Largest deviation of a state's restriction from `map` on `k` random
/// effects.
fn restriction_gap(
    sig: &AlgebraSignature,
    state: &State,
    map: &impl Fn(&Effect) -> f64,
    k: usize,
    seed: u64,
) -> Result<f64> {
    let mut r = rng(seed);
    let mut gap: f64 = 0.0;
    for _ in 0..k {
        let e = random_effect(sig, &mut r);
        gap = gap.max((state.eval(e.element())?.re - map(&e)).abs());
    }
    Ok(gap)
}

/// Runs both triangle round trips on `A`:
///
/// 1. states → effect-module maps → states,
/// 2. effect-module maps → states → effect-module maps,
/// 3. effects → affine functions on the spanning states → effects,
/// 4. on `ℂⁿ` additionally distributions → effect-module maps → states →
///    distributions.
pub fn verify_triangle(sig: &AlgebraSignature, trials: usize, seed: u64) -> Result<TriangleReport> {
    if sig.dim() > MAX_TRIANGLE_DIM {
        return Err(Error::DimensionTooLarge { dim: sig.dim(), max: MAX_TRIANGLE_DIM });
    }
    let mut r = rng(seed);
    let family = spanning_states(sig);

    let mut state_round = MaxResidual::default();
    let mut emod_round = MaxResidual::default();
    let mut xi_round = MaxResidual::default();
    let mut dist_round = MaxResidual::default();

    for t in 0..trials {
        let inner_seed = seed.wrapping_mul(1_000_003).wrapping_add(t as u64);

        let s = random_state(sig, &mut r);
        state_round.push_result(
            emod_to_state(sig, s.restrict(), INNER_EMOD_TRIALS, inner_seed).and_then(|back| back.distance(&s)),
        );

        let generator = random_state(sig, &mut r);
        let e_map = generator.restrict();
        emod_round.push_result(
            emod_to_state(sig, &e_map, INNER_EMOD_TRIALS, inner_seed)
                .and_then(|st| restriction_gap(sig, &st, &e_map, 10, inner_seed ^ 0x5555)),
        );

        let effect = random_effect(sig, &mut r);
        let values: Result<Vec<Complex64>> = family.iter().map(|st| st.eval(effect.element())).collect();
        xi_round.push_result(
            values
                .and_then(|v| xi_inverse(sig, &family, &v))
                .and_then(|back| Ok(back.sub(effect.element())?.max_abs())),
        );

        if sig.is_commutative() {
            let d = random_dist(sig.dim(), &mut r);
            let as_state = dist_to_state(&d);
            dist_round.push_result(
                emod_to_state(sig, as_state.restrict(), INNER_EMOD_TRIALS, inner_seed)
                    .and_then(|st| state_to_dist(&st))
                    .and_then(|back| back.distance(&d)),
            );
        }
    }

    let mut checks = vec![
        state_round.into_check("states_to_emod_to_states", TRIANGLE_TOL),
        emod_round.into_check("emod_to_states_to_emod", TRIANGLE_TOL),
        xi_round.into_check("effects_to_affine_to_effects", TRIANGLE_TOL),
    ];
    if sig.is_commutative() {
        checks.push(dist_round.into_check("emod_dist_correspondence", TRIANGLE_TOL));
    }
    Ok(TriangleReport { algebra: sig.clone(), checks })
}

/// Outcome of [`verify_stat_full_faithful`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullFaithfulReport {
    pub dom: AlgebraSignature,
    pub cod: AlgebraSignature,
    pub checks: Vec<Check>,
}

impl FullFaithfulReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Rebuilds `f: A → B` from its action on states alone: for each matrix
/// unit `a` of `A`, the affine function `σ ↦ g(σ)(a)` on `Stat(B)` is sampled
/// on the spanning states of `B` and pulled back to an element of `B`.
pub fn reconstruct_from_states(g: &StateMap) -> Result<LinMap> {
    let dom = g.map().dom();
    let cod = g.map().cod();
    let family = spanning_states(cod);
    let images: Vec<State> = family.iter().map(|s| g.apply(s)).collect::<Result<_>>()?;
    let mut coeffs = ComplexMatrix::zeros(cod.dim(), dom.dim());
    for k in 0..dom.dim() {
        let a = Element::basis(dom, k)?;
        let values: Vec<Complex64> = images.iter().map(|s| s.eval(&a)).collect::<Result<_>>()?;
        let fa = xi_inverse(cod, &family, &values)?;
        for (row, z) in fa.coords().into_iter().enumerate() {
            coeffs[(row, k)] = z;
        }
    }
    LinMap::new(dom.clone(), cod.clone(), coeffs)
}

/// Largest difference between the state maps of `f1` and `f2`, probed on
/// the spanning states of the codomain and the matrix units of the domain.
pub fn state_map_separation(f1: &LinMap, f2: &LinMap) -> Result<f64> {
    let g1 = stat_of_map(f1)?;
    let g2 = stat_of_map(f2)?;
    let mut sep: f64 = 0.0;
    for s in spanning_states(f1.cod()) {
        sep = sep.max(g1.apply(&s)?.distance(&g2.apply(&s)?)?);
    }
    Ok(sep)
}

/// Faithfulness: distinct random PU maps induce distinct state maps.
/// Fullness: a PU map is recovered from its state map.
pub fn verify_stat_full_faithful(
    dom: &AlgebraSignature,
    cod: &AlgebraSignature,
    trials: usize,
    seed: u64,
) -> Result<FullFaithfulReport> {
    const SEPARATION: f64 = 1e-8;
    const DISTINCT: f64 = 1e-6;
    for s in [dom, cod] {
        if s.dim() > MAX_FULL_FAITHFUL_DIM {
            return Err(Error::DimensionTooLarge { dim: s.dim(), max: MAX_FULL_FAITHFUL_DIM });
        }
    }
    let mut r = rng(seed);
    let mut fullness = MaxResidual::default();
    let mut min_separation = f64::INFINITY;
    let mut broken = false;
    for _ in 0..trials {
        let f = random_pu_map(dom, cod, &mut r)?;
        fullness
            .push_result(stat_of_map(&f).and_then(|g| reconstruct_from_states(&g)).and_then(|back| back.distance(&f)));

        let f2 = random_pu_map(dom, cod, &mut r)?;
        if f.distance(&f2)? <= DISTINCT {
            continue;
        }
        match state_map_separation(&f, &f2) {
            Ok(sep) => min_separation = min_separation.min(sep),
            Err(_) => broken = true,
        }
    }
    let faithful = if broken {
        Check::failed("faithfulness_min_separation")
    } else {
        Check::exceeds("faithfulness_min_separation", min_separation, SEPARATION)
    };
    Ok(FullFaithfulReport {
        dom: dom.clone(),
        cod: cod.clone(),
        checks: vec![fullness.into_check("fullness_reconstruction", TRIANGLE_TOL), faithful],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{compose_maps, transpose_map};
    use crate::monads::{to_pu, Dist, KleisliMap};

    fn sig(blocks: &[usize]) -> AlgebraSignature {
        AlgebraSignature::new(blocks.to_vec()).unwrap()
    }

    #[test]
    fn predicate_examples() {
        let g = sig(&[1, 2]);
        let id = pred_of_map(&LinMap::identity(&g)).unwrap();
        let e = random_effect(&g, &mut rng(0));
        assert_eq!(id.apply(&e).unwrap(), e);

        let f = to_pu(&KleisliMap::new(2, 2, vec![0.5, 0.5, 0.0, 1.0]).unwrap());
        let p = pred_of_map(&f).unwrap();
        let out = p.apply(&Effect::new(Element::from_real_vector(&[1.0, 0.0]).unwrap()).unwrap()).unwrap();
        assert_eq!(out.element(), &Element::from_real_vector(&[0.5, 0.0]).unwrap());

        let e = random_effect(&sig(&[1, 1]), &mut rng(1));
        let lhs = p.apply(&e.complement()).unwrap();
        let rhs = p.apply(&e).unwrap().complement();
        assert!(lhs.element().sub(rhs.element()).unwrap().max_abs() < 1e-15);
        assert!(p.check(30, 2).pass());

        let not_pu = LinMap::new(sig(&[1, 1]), sig(&[1, 1]), ComplexMatrix::identity(2).scale_real(2.0)).unwrap();
        assert!(matches!(pred_of_map(&not_pu), Err(Error::NotPu(_))));
    }

    #[test]
    fn state_map_examples() {
        let g = sig(&[2, 1]);
        let s = random_state(&g, &mut rng(2));
        let id = stat_of_map(&LinMap::identity(&g)).unwrap();
        assert!(id.apply(&s).unwrap().distance(&s).unwrap() < 1e-15);

        let m = KleisliMap::new(2, 3, vec![0.2, 0.3, 0.5, 0.6, 0.0, 0.4]).unwrap();
        let d = Dist::new(vec![0.25, 0.75]).unwrap();
        let pushed = stat_of_map(&to_pu(&m)).unwrap().apply(&dist_to_state(&d)).unwrap();
        // d·M = (0.05 + 0.45, 0.075, 0.125 + 0.3)
        let expected = [0.5, 0.075, 0.425];
        for (got, want) in state_to_dist(&pushed).unwrap().weights().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }

        let mut r = rng(3);
        let f = random_pu_map(&sig(&[1, 2]), &g, &mut r).unwrap();
        let gmap = stat_of_map(&f).unwrap();
        let (a, b) = (random_state(&g, &mut r), random_state(&g, &mut r));
        let lhs = gmap.apply(&a.mix(0.3, &b).unwrap()).unwrap();
        let rhs = gmap.apply(&a).unwrap().mix(0.3, &gmap.apply(&b).unwrap()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() <= 1e-10);
    }

    #[test]
    fn functoriality() {
        let mut r = rng(4);
        let (a, b, c) = (sig(&[2]), sig(&[1, 1]), sig(&[1, 2]));
        let f = random_pu_map(&a, &b, &mut r).unwrap();
        let g = random_pu_map(&b, &c, &mut r).unwrap();
        let gf = compose_maps(&g, &f).unwrap();
        let s = random_state(&c, &mut r);
        let direct = stat_of_map(&gf).unwrap().apply(&s).unwrap();
        let staged = stat_of_map(&f).unwrap().apply(&stat_of_map(&g).unwrap().apply(&s).unwrap()).unwrap();
        assert!(direct.distance(&staged).unwrap() <= 1e-9);

        let e = random_effect(&a, &mut r);
        let direct = pred_of_map(&gf).unwrap().apply(&e).unwrap();
        let staged = pred_of_map(&g).unwrap().apply(&pred_of_map(&f).unwrap().apply(&e).unwrap()).unwrap();
        assert!(direct.element().sub(staged.element()).unwrap().max_abs() <= 1e-9);
    }

    #[test]
    fn transpose_acts_as_involution_on_states() {
        let t = stat_of_map(&transpose_map(2).unwrap()).unwrap();
        let mut r = rng(5);
        for _ in 0..20 {
            let s = random_state(&sig(&[2]), &mut r);
            assert!(t.apply(&t.apply(&s).unwrap()).unwrap().distance(&s).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn triangle_examples() {
        let rep = verify_triangle(&sig(&[1]), 10, 0).unwrap();
        assert!(rep.passed());
        assert!(rep.checks.iter().all(|c| c.residual < 1e-14), "{rep:?}");

        let rep = verify_triangle(&sig(&[1, 1, 1]), 50, 7).unwrap();
        assert!(rep.checks.iter().all(|c| c.residual <= 1e-8), "{rep:?}");
        assert_eq!(rep.checks.len(), 4);

        let rep = verify_triangle(&sig(&[2]), 50, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");

        assert!(matches!(verify_triangle(&sig(&[9]), 1, 0), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn full_faithful_examples() {
        let c2 = sig(&[1, 1]);
        let f = to_pu(&KleisliMap::new(2, 2, vec![0.9, 0.1, 0.4, 0.6]).unwrap());
        let back = reconstruct_from_states(&stat_of_map(&f).unwrap()).unwrap();
        assert!(back.distance(&f).unwrap() <= 1e-9);

        let id = LinMap::identity(&sig(&[1, 2]));
        let back = reconstruct_from_states(&stat_of_map(&id).unwrap()).unwrap();
        assert!(back.distance(&id).unwrap() <= 1e-14);

        // measurement in the computational basis: M₂ → ℂ², x ↦ diag(x)
        let m2 = sig(&[2]);
        let measure = LinMap::from_fn(&m2, &c2, |x| {
            let b = &x.blocks()[0];
            Element::from_vector(&[b[(0, 0)], b[(1, 1)]])
        })
        .unwrap();
        let back = reconstruct_from_states(&stat_of_map(&measure).unwrap()).unwrap();
        assert!(back.distance(&measure).unwrap() <= 1e-7);

        let rep = verify_stat_full_faithful(&m2, &c2, 10, 3).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
