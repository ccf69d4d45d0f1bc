//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use gelfand_core::linalg::ComplexMatrix;
use gelfand_core::maps::{classify, compose_maps, transpose_map, LinMap};
use gelfand_core::monads::{
    dist_to_state, enumerate_miu_states, from_pu, function_to_miu, kleisli_compose, miu_to_function, state_to_dist,
    to_pu, Dist, FunctionMap,
};
use gelfand_core::random::{
    random_dist, random_element, random_positive, random_pu_map, random_pure_state, random_self_adjoint, random_state,
    random_stochastic, random_unitary, rng,
};
use gelfand_core::states::{barycentre, is_extreme, spanning_states, xi_eval, xi_inverse, FinMeasure, State};
use gelfand_core::tol::POSITIVITY_TOL;
use gelfand_core::triangle::{verify_stat_full_faithful, verify_triangle};
use gelfand_core::verify::{perturb, verify_monad_laws, verify_transpose_witness, PU_NOISE};
use gelfand_core::{AlgebraSignature, Complex64, Element};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sig(blocks: &[usize]) -> AlgebraSignature {
    AlgebraSignature::new(blocks.to_vec()).unwrap()
}

fn equivalence() -> Outcome {
    let mut r = rng(1);
    let mut kleisli_round: f64 = 0.0;
    let mut pu_round: f64 = 0.0;
    let mut functor: f64 = 0.0;
    for _ in 0..200 {
        let (n, m) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let f = random_stochastic(n, m, &mut r);
        kleisli_round = kleisli_round.max(from_pu(&to_pu(&f)).unwrap().max_distance(&f).unwrap());

        let h = perturb(&to_pu(&random_stochastic(n, m, &mut r)), PU_NOISE, &mut r).unwrap();
        let back = to_pu(&from_pu(&h).unwrap());
        pu_round = pu_round.max(back.distance(&h).unwrap());
    }
    for _ in 0..100 {
        let (n, m, k) = (r.gen_range(1..=6), r.gen_range(1..=6), r.gen_range(1..=6));
        let f = random_stochastic(n, m, &mut r);
        let g = random_stochastic(m, k, &mut r);
        let lhs = to_pu(&kleisli_compose(&g, &f).unwrap());
        let rhs = compose_maps(&to_pu(&f), &to_pu(&g)).unwrap();
        functor = functor.max(lhs.distance(&rhs).unwrap());
    }
    outcome(
        kleisli_round <= 1e-10 && pu_round <= 1e-10 && functor <= 1e-10,
        format!("from_pu∘to_pu {kleisli_round:.1e}, to_pu∘from_pu {pu_round:.1e}, functor law {functor:.1e}"),
    )
}

fn miu_functions() -> Outcome {
    let mut cases = 0;
    let mut failures = 0;
    for n in 1..=4 {
        for m in 1..=4 {
            for f in FunctionMap::enumerate(n, m) {
                cases += 1;
                match function_to_miu(&f).and_then(|h| miu_to_function(&h)) {
                    Ok(back) if back == f => {}
                    _ => failures += 1,
                }
            }
        }
    }
    let counts: Vec<usize> = (1..=8).map(|n| enumerate_miu_states(n).unwrap().len()).collect();
    let counts_ok = counts.iter().enumerate().all(|(i, &c)| c == i + 1);
    outcome(
        failures == 0 && counts_ok,
        format!("{cases} functions, {failures} failures; MIU state counts for n=1..8: {counts:?}"),
    )
}

fn basis_separation(a: &State, b: &State) -> f64 {
    (0..a.signature().dim())
        .map(|i| {
            let e = Element::basis(a.signature(), i).unwrap();
            (a.eval(&e).unwrap() - b.eval(&e).unwrap()).norm()
        })
        .fold(0.0, f64::max)
}

fn dist_states() -> Outcome {
    let mut r = rng(3);
    let mut round: f64 = 0.0;
    let mut min_sep = f64::INFINITY;
    let mut pairs = 0;
    for k in 0..500 {
        let n = 1 + k % 10;
        let d = random_dist(n, &mut r);
        round = round.max(state_to_dist(&dist_to_state(&d)).unwrap().distance(&d).unwrap());
        let s = random_state(&AlgebraSignature::commutative(n).unwrap(), &mut r);
        round = round.max(dist_to_state(&state_to_dist(&s).unwrap()).distance(&s).unwrap());

        // a far pair and a pair just over the distinctness threshold
        let far = random_dist(n, &mut r);
        let target = r.gen_range(0..n);
        let eps = 2e-6;
        let near = Dist::new(
            d.weights()
                .iter()
                .enumerate()
                .map(|(i, w)| (1.0 - eps) * w + if i == target { eps } else { 0.0 })
                .collect(),
        )
        .unwrap();
        for other in [far, near] {
            if other.distance(&d).unwrap() > 1e-6 {
                pairs += 1;
                min_sep = min_sep.min(basis_separation(&dist_to_state(&d), &dist_to_state(&other)));
            }
        }
    }
    outcome(
        round <= 1e-10 && min_sep > 1e-7,
        format!("round trip {round:.1e}; {pairs} distinct pairs, min basis separation {min_sep:.2e}"),
    )
}

fn monad_laws() -> Outcome {
    let mut worst = Vec::new();
    let mut pass = true;
    for n in 1..=5 {
        let rep = verify_monad_laws(n, 40, n as u64).unwrap();
        pass &= rep.passed();
        for c in rep.checks {
            match worst.iter_mut().find(|(name, _): &&mut (String, f64)| *name == c.name) {
                Some((_, r)) => *r = f64::max(*r, c.residual),
                None => worst.push((c.name, c.residual)),
            }
        }
    }
    // counit on noncommutative state spaces
    let mut r = rng(4);
    let mut counit: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(&sig(&[1, 2]), &mut r);
        counit = counit.max(barycentre(&FinMeasure::dirac(s.clone())).unwrap().distance(&s).unwrap());
    }
    pass &= counit <= 1e-10;
    let detail: Vec<String> = worst.iter().map(|(n, r)| format!("{n} {r:.1e}")).collect();
    outcome(pass, format!("{}; counit on C+M2 {counit:.1e}", detail.join(", ")))
}

fn norm_and_order() -> Outcome {
    let signatures = [sig(&[1]), sig(&[1, 1]), sig(&[2]), sig(&[1, 2]), sig(&[3]), sig(&[2, 2])];
    let mut r = rng(5);
    let mut involution: f64 = 0.0;
    let mut order_failures = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut norm_failures = 0;
    let mut maps = 0;
    for k in 0..100 {
        let dom = signatures[r.gen_range(0..signatures.len())].clone();
        let cod = signatures[r.gen_range(0..signatures.len())].clone();
        // every fifth map is followed by a transpose, giving PU maps that are not CP
        let f: LinMap = match (k % 5, cod.blocks()) {
            (0, [n]) if *n > 1 => {
                compose_maps(&transpose_map(*n).unwrap(), &random_pu_map(&dom, &cod, &mut r).unwrap()).unwrap()
            }
            _ => random_pu_map(&dom, &cod, &mut r).unwrap(),
        };
        assert!(classify(&f).is_pu());
        maps += 1;
        for _ in 0..20 {
            let x = random_element(&dom, &mut r);
            let diff = f.apply(&x.star()).unwrap().sub(&f.apply(&x).unwrap().star()).unwrap();
            involution = involution.max(diff.max_abs());

            let lo = random_self_adjoint(&dom, &mut r);
            let hi = lo.add(&random_positive(&dom, &mut r)).unwrap();
            if !f.apply(&lo).unwrap().leq(&f.apply(&hi).unwrap()).unwrap() {
                order_failures += 1;
            }

            let (nx, nfx) = (x.norm(), f.apply(&x).unwrap().norm());
            worst_ratio = worst_ratio.max(nfx / nx);
            if nfx > 4.0 * nx + 1e-8 {
                norm_failures += 1;
            }
        }
    }
    let mut decomposition: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    for s in &signatures {
        for _ in 0..100 {
            let x = random_self_adjoint(s, &mut r);
            let (p, n) = x.decompose_self_adjoint().unwrap();
            decomposition = decomposition.max(p.sub(&n).unwrap().sub(&x).unwrap().max_abs());
            orthogonality = orthogonality.max(p.mul(&n).unwrap().norm());
        }
    }
    outcome(
        involution <= 1e-8
            && order_failures == 0
            && norm_failures == 0
            && decomposition <= 1e-8
            && orthogonality <= 1e-8,
        format!(
            "{maps} maps: involution {involution:.1e}, order failures {order_failures}, max ‖f(x)‖/‖x‖ {worst_ratio:.3}; \
             decomposition {decomposition:.1e}, ‖x₊x₋‖ {orthogonality:.1e}"
        ),
    )
}

fn triangle() -> Outcome {
    let signatures = [sig(&[1]), sig(&[1, 1]), sig(&[1, 1, 1]), sig(&[2]), sig(&[1, 2]), sig(&[2, 2])];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (i, s) in signatures.iter().enumerate() {
        let rep = verify_triangle(s, 100, i as u64).unwrap();
        pass &= rep.passed();
        worst = rep.checks.iter().map(|c| c.residual).fold(worst, f64::max);
    }
    let mut fullness: f64 = 0.0;
    let mut separation = f64::INFINITY;
    for (i, a) in signatures.iter().enumerate() {
        for (j, b) in signatures.iter().enumerate() {
            let rep = verify_stat_full_faithful(a, b, 3, (10 * i + j) as u64).unwrap();
            pass &= rep.passed();
            fullness = fullness.max(rep.checks[0].residual);
            separation = separation.min(rep.checks[1].residual);
        }
    }
    outcome(
        pass && worst <= 1e-7 && fullness <= 1e-7,
        format!(
            "triangle residual {worst:.1e}; reconstruction {fullness:.1e}, min state-map separation {separation:.2e}"
        ),
    )
}

fn transpose_witness() -> Outcome {
    let rep = verify_transpose_witness(2, 1000, 100, 0, 1e-8).unwrap();
    let choi = rep.metrics["min_choi_eigenvalue"];
    let margin = rep.metrics["min_sampled_image_eigenvalue"];
    outcome(
        rep.passed() && (choi + 1.0).abs() <= 1e-9 && margin >= -1e-8,
        format!(
            "min Choi eigenvalue {choi}, min sampled image eigenvalue {margin:.2e}, Stat(T)² residual {:.1e}",
            rep.checks[2].residual
        ),
    )
}

fn extreme_points() -> Outcome {
    let c3 = AlgebraSignature::commutative(3).unwrap();
    let mut grid = 0;
    let mut grid_errors = 0;
    for i in 0..=100usize {
        for j in 0..=(100 - i) {
            let k = 100 - i - j;
            let w = [i, j, k].map(|x| x as f64 / 100.0);
            let s = State::new(c3.clone(), w.iter().map(|&x| ComplexMatrix::from_real_diag(&[x])).collect()).unwrap();
            let vertex = i == 100 || j == 100 || k == 100;
            grid += 1;
            if is_extreme(&s) != vertex {
                grid_errors += 1;
            }
        }
    }
    let m2 = sig(&[2]);
    let mut r = rng(8);
    let pure_errors = (0..500).filter(|_| !is_extreme(&random_pure_state(&m2, &mut r))).count();
    let mixed_errors = (0..500).filter(|_| is_extreme(&random_state(&m2, &mut r))).count();
    outcome(
        grid_errors == 0 && pure_errors == 0 && mixed_errors == 0,
        format!(
            "{grid} grid states, {grid_errors} misclassified; M2 rank-one misses {pure_errors}/500, full-rank misses {mixed_errors}/500"
        ),
    )
}

/// A self-adjoint element with a unit-trace-scale negative eigenvalue.
fn indefinite<R: Rng>(s: &AlgebraSignature, r: &mut R) -> Element {
    let blocks = s
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            let mut diag: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
            if b == 0 {
                diag[0] = -r.gen_range(0.1..1.0);
            }
            let u = random_unitary(n, r);
            u.mul(&ComplexMatrix::from_real_diag(&diag)).unwrap().mul(&u.adjoint()).unwrap().hermitian_part()
        })
        .collect();
    Element::new(s.clone(), blocks).unwrap()
}

fn kadison() -> Outcome {
    let signatures = [sig(&[1, 1, 1, 1]), sig(&[2]), sig(&[1, 2])];
    let mut r = rng(9);
    let mut round: f64 = 0.0;
    let mut mismatches = 0;
    let mut tested = 0;
    for s in &signatures {
        let family = spanning_states(s);
        for _ in 0..100 {
            let a = random_element(s, &mut r);
            let values: Vec<Complex64> = family.iter().map(|st| xi_eval(&a, st).unwrap()).collect();
            round = round.max(xi_inverse(s, &family, &values).unwrap().sub(&a).unwrap().max_abs());
        }

        let mut probes = family.clone();
        probes.extend((0..500).map(|_| random_pure_state(s, &mut r)));
        probes.extend((0..100).map(|_| random_state(s, &mut r)));
        let mut candidates: Vec<Element> = Vec::new();
        for _ in 0..100 {
            candidates.push(random_positive(s, &mut r));
            candidates.push(indefinite(s, &mut r));
        }
        for x in candidates {
            let tol = POSITIVITY_TOL * (1.0 + x.norm());
            let nonneg = probes.iter().all(|st| xi_eval(&x, st).unwrap().re >= -tol);
            tested += 1;
            if x.is_positive() != nonneg {
                mismatches += 1;
            }
        }
    }
    outcome(
        round <= 1e-8 && mismatches == 0,
        format!("round trip {round:.1e}; cone agreement {mismatches} mismatches in {tested}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 equivalence of stochastic matrices and PU maps", equivalence, Duration::from_secs(5)),
        ("2 MIU maps and functions, MIU state count", miu_functions, Duration::from_secs(2)),
        ("3 states of C^n and distributions", dist_states, Duration::from_secs(2)),
        ("4 monad and barycentre laws", monad_laws, Duration::from_secs(2)),
        ("5 PU maps preserve involution, order and norm bound", norm_and_order, Duration::from_secs(3)),
        ("6 state-and-effect triangle", triangle, Duration::from_secs(10)),
        ("7 transpose witness", transpose_witness, Duration::from_secs(1)),
        ("8 extreme points", extreme_points, Duration::from_secs(3)),
        ("9 Kadison round trip and cone", kadison, Duration::from_secs(3)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed < budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.3}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
