//! Seeded generators for test instances: elements, effects, states,
//! distributions, stochastic matrices and PU maps.
//!
//! All generators take an explicit RNG; [`rng`] builds the reproducible one
//! used throughout the crate.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraSignature, Effect, Element};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::maps::LinMap;
use crate::monads::{Dist, FinDist, KleisliMap};
use crate::states::State;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| uniform_complex(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite entries")
}

/// Hermitian matrix with entries drawn from `[-1, 1]`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = Complex64::new(rng.gen_range(-1.0..=1.0), 0.0);
        for c in (r + 1)..n {
            let z = uniform_complex(rng);
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}

/// A normalised uniform-box sample. Not Haar distributed, which the callers
/// do not need.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| uniform_complex(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    herm_eig(&random_hermitian(n, rng)).expect("random Hermitian matrices diagonalise").eigenvectors
}

/// Element with every block entry uniform in the unit complex box.
pub fn random_element<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> Element {
    let blocks = sig.blocks().iter().map(|&n| random_matrix(n, n, rng)).collect();
    Element::new(sig.clone(), blocks).expect("shapes follow the signature")
}

pub fn random_self_adjoint<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> Element {
    let blocks = sig.blocks().iter().map(|&n| random_hermitian(n, rng)).collect();
    Element::new(sig.clone(), blocks).expect("shapes follow the signature")
}

/// `y* y` for a random `y`.
pub fn random_positive<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> Element {
    let y = random_element(sig, rng);
    let p = y.star().mul(&y).expect("same signature");
    hermitise(&p)
}

fn hermitise(x: &Element) -> Element {
    let blocks = x.blocks().iter().map(ComplexMatrix::hermitian_part).collect();
    Element::new(x.signature().clone(), blocks).expect("shapes preserved")
}

/// Effect `V diag(u) V*` per block with `u` uniform in `[0, 1]`.
pub fn random_effect<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> Effect {
    let blocks = sig
        .blocks()
        .iter()
        .map(|&n| {
            let v = random_unitary(n, rng);
            let spectrum: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let eig = crate::linalg::EigenDecomposition { eigenvalues: spectrum, eigenvectors: v };
            eig.reconstruct().hermitian_part()
        })
        .collect();
    Effect::new_unchecked(Element::new(sig.clone(), blocks).expect("shapes follow the signature"))
}

/// A state with full-rank random densities `G G* / tr`.
pub fn random_state<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> State {
    let raw: Vec<ComplexMatrix> = sig
        .blocks()
        .iter()
        .map(|&n| {
            let g = random_matrix(n, n, rng);
            g.mul(&g.adjoint()).expect("square").hermitian_part()
        })
        .collect();
    let total: f64 = raw.iter().map(|b| b.trace().re).sum();
    let densities = raw.into_iter().map(|b| b.scale_real(1.0 / total)).collect();
    State::new(sig.clone(), densities).expect("normalised positive densities")
}

/// A pure state `|u><u|` in a randomly chosen block.
pub fn random_pure_state<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> State {
    let b = rng.gen_range(0..sig.num_blocks());
    let n = sig.blocks()[b];
    let u = random_unit_vector(n, rng);
    let densities = sig
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, &m)| if k == b { ComplexMatrix::outer(&u, &u).hermitian_part() } else { ComplexMatrix::zeros(m, m) })
        .collect();
    State::new(sig.clone(), densities).expect("rank-one projection")
}

/// Normalised exponential weights (flat Dirichlet).
pub fn random_dist<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Dist {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    Dist::new(raw.into_iter().map(|w| w / total).collect()).expect("normalised weights")
}

/// Random weights over the given atoms.
pub fn random_fin_dist<T, R: Rng + ?Sized>(values: Vec<T>, rng: &mut R) -> FinDist<T> {
    let w = random_dist(values.len(), rng);
    FinDist::new(w.weights().iter().copied().zip(values).collect()).expect("normalised weights")
}

pub fn random_stochastic<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> KleisliMap {
    let rows: Vec<Dist> = (0..n).map(|_| random_dist(m, rng)).collect();
    KleisliMap::from_rows(m, &rows).expect("rows are distributions")
}

/// A random unital completely positive map `dom → cod`, built from Kraus
/// operators `K` with `Σ K* K = 1` on every codomain block.
pub fn random_pu_map<R: Rng + ?Sized>(dom: &AlgebraSignature, cod: &AlgebraSignature, rng: &mut R) -> Result<LinMap> {
    // kraus[j] lists (dom block, operator n_i × m_j).
    let mut kraus: Vec<Vec<(usize, ComplexMatrix)>> = Vec::new();
    let rank: usize = dom.blocks().iter().sum();
    for &m in cod.blocks() {
        // enough operators for Σ K*K to have full rank m
        let per_block = 1 + m.div_ceil(rank);
        let mut ops = Vec::new();
        for (i, &n) in dom.blocks().iter().enumerate() {
            for _ in 0..per_block {
                ops.push((i, random_matrix(n, m, rng)));
            }
        }
        let mut gram = ComplexMatrix::zeros(m, m);
        for (_, g) in &ops {
            gram = gram.add(&g.adjoint().mul(g)?)?;
        }
        let eig = herm_eig(&gram.hermitian_part())?;
        if eig.min_eigenvalue() <= 1e-12 * (1.0 + eig.max_eigenvalue()) {
            return Err(Error::SingularSystem { pivot: eig.min_eigenvalue() });
        }
        let inv_sqrt = eig.reconstruct_with(|x| 1.0 / x.sqrt());
        let normalised = ops.into_iter().map(|(i, g)| Ok((i, g.mul(&inv_sqrt)?))).collect::<Result<Vec<_>>>()?;
        kraus.push(normalised);
    }
    LinMap::from_fn(dom, cod, |x| {
        let blocks = kraus
            .iter()
            .zip(cod.blocks())
            .map(|(ops, &m)| {
                let mut acc = ComplexMatrix::zeros(m, m);
                for (i, k) in ops {
                    let term = k.adjoint().mul(&x.blocks()[*i])?.mul(k)?;
                    acc = acc.add(&term)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Element::new(cod.clone(), blocks)
    })
}
