//! Linear maps between finite-dimensional C*-algebras and their
//! classification as MIU (`*`-homomorphisms), PU and CP maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSignature, Element};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::random::{random_element, random_unit_vector, rng};
use crate::tol::{CLASSIFY_TOL, DEFAULT_POSITIVITY_SAMPLES, POSITIVITY_TOL};

/// A linear map `dom → cod` as a `dim(cod) × dim(dom)` matrix over the
/// matrix-unit bases.
#[derive(Debug, Clone, PartialEq)]
pub struct LinMap {
    dom: AlgebraSignature,
    cod: AlgebraSignature,
    coeffs: ComplexMatrix,
}

impl LinMap {
    pub fn new(dom: AlgebraSignature, cod: AlgebraSignature, coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.rows() != cod.dim() || coeffs.cols() != dom.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coefficients {}x{} for a map {:?} -> {:?} need {}x{}",
                coeffs.rows(),
                coeffs.cols(),
                dom,
                cod,
                cod.dim(),
                dom.dim()
            )));
        }
        if !coeffs.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dom, cod, coeffs })
    }

    pub fn identity(sig: &AlgebraSignature) -> Self {
        Self { dom: sig.clone(), cod: sig.clone(), coeffs: ComplexMatrix::identity(sig.dim()) }
    }

    /// Tabulates a linear function by its values on the matrix units.
    pub fn from_fn(
        dom: &AlgebraSignature,
        cod: &AlgebraSignature,
        f: impl Fn(&Element) -> Result<Element>,
    ) -> Result<Self> {
        let mut coeffs = ComplexMatrix::zeros(cod.dim(), dom.dim());
        for k in 0..dom.dim() {
            let image = f(&Element::basis(dom, k)?)?;
            cod.ensure_eq(image.signature())?;
            for (r, z) in image.coords().into_iter().enumerate() {
                coeffs[(r, k)] = z;
            }
        }
        Self::new(dom.clone(), cod.clone(), coeffs)
    }

    pub fn dom(&self) -> &AlgebraSignature {
        &self.dom
    }

    pub fn cod(&self) -> &AlgebraSignature {
        &self.cod
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.dom.ensure_eq(x.signature())?;
        let image = self.coeffs.mul_vec(&x.coords())?;
        Element::from_coords(&self.cod, &image)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LinMap) -> Result<LinMap> {
        compose_maps(self, first)
    }

    /// Largest coefficient difference; signatures must agree.
    pub fn distance(&self, other: &LinMap) -> Result<f64> {
        self.dom.ensure_eq(&other.dom)?;
        self.cod.ensure_eq(&other.cod)?;
        Ok(self.coeffs.sub(&other.coeffs)?.max_abs())
    }
}

pub fn apply_map(f: &LinMap, x: &Element) -> Result<Element> {
    f.apply(x)
}

/// `g ∘ f`.
pub fn compose_maps(g: &LinMap, f: &LinMap) -> Result<LinMap> {
    g.dom.ensure_eq(&f.cod)?;
    Ok(LinMap { dom: f.dom.clone(), cod: g.cod.clone(), coeffs: g.coeffs.mul(&f.coeffs)? })
}

/// Verdict of a positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Positivity {
    /// Decided exactly.
    Yes,
    No,
    /// No counterexample among the sampled rank-one projections.
    SampledYes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompletePositivity {
    Yes,
    No,
    NotComputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapClass {
    pub unital: bool,
    pub involutive: bool,
    pub multiplicative: bool,
    pub positive: Positivity,
    pub completely_positive: CompletePositivity,
}

impl MapClass {
    pub fn is_miu(&self) -> bool {
        self.multiplicative && self.involutive && self.unital
    }

    /// Unital and not refuted positive.
    pub fn is_pu(&self) -> bool {
        self.unital && self.positive != Positivity::No
    }
}

/// Operator norm at most `tol`, skipping the eigensolve when the Frobenius
/// bound already settles it.
fn norm_at_most(x: &Element, tol: f64) -> bool {
    let frob: f64 = x.blocks().iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt();
    frob <= tol || x.norm() <= tol
}

/// Classifies `f`: unitality, involution and multiplicativity on the basis,
/// positivity (exact on commutative domains, seeded sampling otherwise) and
/// complete positivity via the Choi matrix for single-block domains.
pub fn classify_map(f: &LinMap, samples: usize, seed: u64) -> MapClass {
    let dom = &f.dom;
    let one = Element::one(dom);
    let unital = f
        .apply(&one)
        .and_then(|img| img.sub(&Element::one(&f.cod)))
        .map(|d| norm_at_most(&d, CLASSIFY_TOL))
        .unwrap_or(false);

    let images: Vec<Element> =
        (0..dom.dim()).map(|k| f.apply(&Element::basis(dom, k).expect("in range")).expect("dom matches")).collect();

    let involutive = (0..dom.dim()).all(|k| {
        let (b, i, j) = dom.locate(k).expect("in range");
        let adj = dom.offsets()[b] + j * dom.blocks()[b] + i;
        let diff = images[adj].sub(&images[k].star()).expect("same cod");
        norm_at_most(&diff, CLASSIFY_TOL)
    });

    let multiplicative = is_multiplicative_on_basis(f, &images);

    let positive = if multiplicative && involutive && unital {
        // *-homomorphisms send y*y to f(y)*f(y).
        Positivity::Yes
    } else if dom.is_commutative() {
        // The cone of ℂⁿ is generated by the coordinate projections.
        if images.iter().all(Element::is_positive) {
            Positivity::Yes
        } else {
            Positivity::No
        }
    } else {
        sample_positivity(f, samples, seed)
    };

    let completely_positive = if dom.num_blocks() == 1 {
        match choi_is_psd(f) {
            Ok(true) => CompletePositivity::Yes,
            Ok(false) => CompletePositivity::No,
            Err(_) => CompletePositivity::NotComputed,
        }
    } else {
        CompletePositivity::NotComputed
    };

    MapClass { unital, involutive, multiplicative, positive, completely_positive }
}

/// [`classify_map`] with the default sample count and seed 0.
pub fn classify(f: &LinMap) -> MapClass {
    classify_map(f, DEFAULT_POSITIVITY_SAMPLES, 0)
}

fn is_multiplicative_on_basis(f: &LinMap, images: &[Element]) -> bool {
    let dom = &f.dom;
    let offsets = dom.offsets();
    for k in 0..dom.dim() {
        let (bk, i, j) = dom.locate(k).expect("in range");
        for l in 0..dom.dim() {
            let (bl, p, q) = dom.locate(l).expect("in range");
            // E_ij E_pq = δ_jp E_iq within a block, zero across blocks.
            let product = images[k].mul(&images[l]).expect("same cod");
            let expected = if bk == bl && j == p {
                images[offsets[bk] + i * dom.blocks()[bk] + q].clone()
            } else {
                Element::zero(&f.cod)
            };
            if !norm_at_most(&expected.sub(&product).expect("same cod"), CLASSIFY_TOL) {
                return false;
            }
        }
    }
    true
}

fn sample_positivity(f: &LinMap, samples: usize, seed: u64) -> Positivity {
    let dom = &f.dom;
    let mut rng = rng(seed);
    let accept = |img: &Element| -> bool {
        img.is_self_adjoint()
            && img.blocks().iter().all(|b| match herm_eig(&b.hermitian_part()) {
                Ok(eig) => eig.min_eigenvalue() >= -CLASSIFY_TOL,
                Err(_) => false,
            })
    };
    for (b, &n) in dom.blocks().iter().enumerate() {
        let draws = if n == 1 { 1 } else { samples };
        for _ in 0..draws {
            let u = random_unit_vector(n, &mut rng);
            let proj = ComplexMatrix::outer(&u, &u);
            let x = Element::embed_block(dom, b, proj).expect("block shape");
            match f.apply(&x) {
                Ok(img) if accept(&img) => {}
                _ => return Positivity::No,
            }
        }
    }
    Positivity::SampledYes
}

/// Smallest eigenvalue of `f(P)` over `samples` random rank-one projections
/// `P` in each domain block. Non-self-adjoint images count as `-inf`.
pub fn sampled_positivity_margin(f: &LinMap, samples: usize, seed: u64) -> Result<f64> {
    let dom = &f.dom;
    let mut rng = rng(seed);
    let mut margin = f64::INFINITY;
    for (b, &n) in dom.blocks().iter().enumerate() {
        for _ in 0..samples {
            let u = random_unit_vector(n, &mut rng);
            let x = Element::embed_block(dom, b, ComplexMatrix::outer(&u, &u))?;
            let img = f.apply(&x)?;
            if !img.is_self_adjoint() {
                return Ok(f64::NEG_INFINITY);
            }
            for blk in img.blocks() {
                margin = margin.min(herm_eig(&blk.hermitian_part())?.min_eigenvalue());
            }
        }
    }
    Ok(margin)
}

/// Choi matrices of `f` per codomain block: `Σ_ij E_ij ⊗ f(E_ij)_b`.
pub fn choi_blocks(f: &LinMap) -> Result<Vec<ComplexMatrix>> {
    if f.dom.num_blocks() != 1 {
        return Err(Error::DomainNotSingleBlock(f.dom.blocks().to_vec()));
    }
    let n = f.dom.blocks()[0];
    let mut out: Vec<ComplexMatrix> = f.cod.blocks().iter().map(|&m| ComplexMatrix::zeros(n * m, n * m)).collect();
    for i in 0..n {
        for j in 0..n {
            let unit = ComplexMatrix::unit(n, i, j);
            let image = f.apply(&Element::basis(&f.dom, i * n + j)?)?;
            for (acc, block) in out.iter_mut().zip(image.blocks()) {
                *acc = acc.add(&unit.kron(block))?;
            }
        }
    }
    Ok(out)
}

/// The Choi matrix `Σ_ij E_ij ⊗ f(E_ij)` with `f(E_ij)` read as a
/// block-diagonal matrix. It is PSD iff every per-block Choi matrix is.
pub fn choi_matrix(f: &LinMap) -> Result<ComplexMatrix> {
    if f.dom.num_blocks() != 1 {
        return Err(Error::DomainNotSingleBlock(f.dom.blocks().to_vec()));
    }
    let n = f.dom.blocks()[0];
    let total: usize = f.cod.blocks().iter().sum();
    let mut out = ComplexMatrix::zeros(n * total, n * total);
    for i in 0..n {
        for j in 0..n {
            let image = f.apply(&Element::basis(&f.dom, i * n + j)?)?;
            let dense = ComplexMatrix::direct_sum(image.blocks());
            out = out.add(&ComplexMatrix::unit(n, i, j).kron(&dense))?;
        }
    }
    Ok(out)
}

/// Smallest eigenvalue over the per-block Choi matrices.
pub fn choi_min_eigenvalue(f: &LinMap) -> Result<f64> {
    let mut min = f64::INFINITY;
    for c in choi_blocks(f)? {
        min = min.min(herm_eig(&c)?.min_eigenvalue());
    }
    Ok(min)
}

fn choi_is_psd(f: &LinMap) -> Result<bool> {
    for c in choi_blocks(f)? {
        let tol = POSITIVITY_TOL * (1.0 + c.frobenius_norm());
        if herm_eig(&c)?.min_eigenvalue() < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The transpose `M_n → M_n`. For `n = 1` this is the identity on `ℂ`.
pub fn transpose_map(n: usize) -> Result<LinMap> {
    if n == 0 {
        return Err(Error::InvalidDimension("transpose of a 0x0 block".into()));
    }
    let sig = AlgebraSignature::matrix(n)?;
    LinMap::from_fn(&sig, &sig, |x| Element::new(sig.clone(), vec![x.blocks()[0].transpose()]))
}

/// Outcome of sampling `||f(x)|| / ||x||` for a PU map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub trials: usize,
    pub max_ratio: f64,
    /// Samples with `||f(x)|| > 4||x|| + 1e-8`.
    pub violations: usize,
    /// Whether the sharper contraction `||f(x)|| ≤ ||x|| + 1e-8` also held.
    /// Informational only.
    pub contractive: bool,
}

impl NormBoundReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Samples random elements and checks `||f(x)|| ≤ 4||x||` for a PU map.
pub fn pu_norm_bound_check(f: &LinMap, trials: usize, seed: u64) -> Result<NormBoundReport> {
    let class = classify(f);
    if !class.is_pu() {
        return Err(Error::NotPu(format!("{class:?}")));
    }
    let mut rng = rng(seed);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut contractive = true;
    for _ in 0..trials {
        let x = random_element(&f.dom, &mut rng);
        let nx = x.norm();
        if nx == 0.0 {
            continue;
        }
        let nfx = f.apply(&x)?.norm();
        max_ratio = max_ratio.max(nfx / nx);
        if nfx > 4.0 * nx + CLASSIFY_TOL {
            violations += 1;
        }
        if nfx > nx + CLASSIFY_TOL {
            contractive = false;
        }
    }
    Ok(NormBoundReport { trials, max_ratio, violations, contractive })
}

/// `x ↦ V* x V` for a single Kraus operator `V` (`n × m`): `M_n → M_m`.
pub fn kraus_map(v: &ComplexMatrix) -> Result<LinMap> {
    let dom = AlgebraSignature::matrix(v.rows())?;
    let cod = AlgebraSignature::matrix(v.cols())?;
    let vh = v.adjoint();
    LinMap::from_fn(&dom, &cod, |x| Element::new(cod.clone(), vec![vh.mul(&x.blocks()[0])?.mul(v)?]))
}

/// A state viewed as the PU map `A → ℂ`.
pub fn functional_map(dom: &AlgebraSignature, values_on_basis: &[Complex64]) -> Result<LinMap> {
    let cod = AlgebraSignature::commutative(1)?;
    LinMap::new(dom.clone(), cod, ComplexMatrix::new(1, dom.dim(), values_on_basis.to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_pu_map;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cn(n: usize) -> AlgebraSignature {
        AlgebraSignature::commutative(n).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = LinMap::identity(&cn(3));
        let x = Element::from_real_vector(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(id.apply(&x).unwrap(), x);

        let proj = LinMap::new(cn(2), cn(1), ComplexMatrix::from_real(1, 2, &[1.0, 0.0]).unwrap()).unwrap();
        let y = proj.apply(&Element::from_real_vector(&[5.0, 7.0]).unwrap()).unwrap();
        assert_eq!(y, Element::from_real_vector(&[5.0]).unwrap());

        let t = transpose_map(2).unwrap();
        let m = Element::from_blocks(vec![ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap()]).unwrap();
        let mt = Element::from_blocks(vec![ComplexMatrix::from_real(2, 2, &[1.0, 3.0, 2.0, 4.0]).unwrap()]).unwrap();
        assert_eq!(t.apply(&m).unwrap(), mt);

        assert!(matches!(t.apply(&x), Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn composition_examples() {
        let mut r = rng(3);
        let f = random_pu_map(&cn(3), &cn(3), &mut r).unwrap();
        let g = random_pu_map(&cn(3), &cn(3), &mut r).unwrap();
        let id = LinMap::identity(&cn(3));
        assert!(compose_maps(&g, &id).unwrap().distance(&g).unwrap() < 1e-15);
        assert!(compose_maps(&id, &f).unwrap().distance(&f).unwrap() < 1e-15);
        let gf = compose_maps(&g, &f).unwrap();
        for _ in 0..20 {
            let x = random_element(&cn(3), &mut r);
            let seq = g.apply(&f.apply(&x).unwrap()).unwrap();
            assert!(gf.apply(&x).unwrap().sub(&seq).unwrap().max_abs() <= 1e-10);
        }
        assert!(compose_maps(&transpose_map(2).unwrap(), &f).is_err());
    }

    #[test]
    fn transpose_witness() {
        let t = transpose_map(2).unwrap();
        let class = classify_map(&t, 1000, 0);
        assert!(class.unital && class.involutive && !class.multiplicative);
        assert_eq!(class.positive, Positivity::SampledYes);
        assert_eq!(class.completely_positive, CompletePositivity::No);

        let tt = compose_maps(&t, &t).unwrap();
        assert!(tt.distance(&LinMap::identity(t.dom())).unwrap() <= 1e-12);

        let sym = Element::from_blocks(vec![ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 5.0]).unwrap()]).unwrap();
        assert_eq!(t.apply(&sym).unwrap(), sym);

        for n in [2, 3] {
            let min = choi_min_eigenvalue(&transpose_map(n).unwrap()).unwrap();
            assert!((min + 1.0).abs() <= 1e-9, "n={n}: {min}");
        }
        assert_eq!(transpose_map(1).unwrap(), LinMap::identity(&cn(1)));
        assert!(transpose_map(0).is_err());
    }

    #[test]
    fn choi_examples() {
        // identity on M₂: Σ E_ij ⊗ E_ij = 2 |Ω><Ω|, |Ω> = (|00> + |11>)/√2
        let id = LinMap::identity(&AlgebraSignature::matrix(2).unwrap());
        let choi = choi_matrix(&id).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for (r, c_) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(r, c_)] = c(1.0, 0.0);
        }
        assert_eq!(choi, expected);
        let eig = herm_eig(&choi).unwrap();
        assert!(eig.min_eigenvalue().abs() < 1e-12);
        assert!((eig.max_eigenvalue() - 2.0).abs() < 1e-12);

        // transpose: swap operator, spectrum {-1, 1, 1, 1}
        let swap = choi_matrix(&transpose_map(2).unwrap()).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for (r, c_) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            expected[(r, c_)] = c(1.0, 0.0);
        }
        assert_eq!(swap, expected);
        let ev = herm_eig(&swap).unwrap().eigenvalues;
        for (got, want) in ev.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }

        // x ↦ tr(x) I/2: Choi = I ⊗ I/2 = I/2
        let m2 = AlgebraSignature::matrix(2).unwrap();
        let depol = LinMap::from_fn(&m2, &m2, |x| Ok(Element::one(&m2).scale(x.blocks()[0].trace() * 0.5))).unwrap();
        let choi = choi_matrix(&depol).unwrap();
        assert!(choi.sub(&ComplexMatrix::identity(4).scale_real(0.5)).unwrap().max_abs() < 1e-15);
        assert_eq!(classify(&depol).completely_positive, CompletePositivity::Yes);

        assert!(matches!(choi_matrix(&LinMap::identity(&cn(2))), Err(Error::DomainNotSingleBlock(_))));
    }

    #[test]
    fn kraus_maps_are_cp() {
        let mut r = rng(11);
        for (n, m) in [(2, 2), (3, 2), (2, 3)] {
            let v = crate::random::random_matrix(n, m, &mut r);
            let f = kraus_map(&v).unwrap();
            assert_eq!(classify_map(&f, 50, 1).completely_positive, CompletePositivity::Yes);
        }
    }

    #[test]
    fn classification_is_deterministic() {
        let mut r = rng(5);
        let f = random_pu_map(&AlgebraSignature::new(vec![2, 1]).unwrap(), &cn(2), &mut r).unwrap();
        assert_eq!(classify_map(&f, 100, 9), classify_map(&f, 100, 9));
    }

    #[test]
    fn negative_map_is_refuted() {
        let neg = LinMap::new(cn(2), cn(2), ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        let class = classify(&neg);
        assert_eq!(class.positive, Positivity::No);
        assert!(!class.unital);
        assert!(matches!(pu_norm_bound_check(&neg, 10, 0), Err(Error::NotPu(_))));

        let m2 = AlgebraSignature::matrix(2).unwrap();
        let neg = LinMap::new(m2.clone(), m2, ComplexMatrix::identity(4).scale_real(-1.0)).unwrap();
        assert_eq!(classify(&neg).positive, Positivity::No);
    }

    #[test]
    fn norm_bound_examples() {
        let id = LinMap::identity(&AlgebraSignature::new(vec![1, 2]).unwrap());
        let rep = pu_norm_bound_check(&id, 30, 2).unwrap();
        assert!((rep.max_ratio - 1.0).abs() < 1e-12 && rep.pass());

        let mut r = rng(8);
        let f = crate::monads::to_pu(&crate::random::random_stochastic(4, 4, &mut r));
        let rep = pu_norm_bound_check(&f, 100, 3).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-8 && rep.contractive);

        let d = crate::monads::Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let state = functional_map(&cn(3), &d.weights().iter().map(|&w| c(w, 0.0)).collect::<Vec<_>>()).unwrap();
        let rep = pu_norm_bound_check(&state, 100, 4).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-12);
    }
}
