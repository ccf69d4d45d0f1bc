//! Finite-dimensional C*-algebras `M_{n_1}(ℂ) ⊕ … ⊕ M_{n_k}(ℂ)`.
//!
//! Elements carry their signature. Coordinates are taken over the matrix-unit
//! basis: blocks in signature order, row-major within a block.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, operator_norm, ComplexMatrix};
use crate::tol::POSITIVITY_TOL;

/// Ordered block dimensions of a finite-dimensional C*-algebra.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraSignature {
    blocks: Vec<usize>,
}

impl AlgebraSignature {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidSignature("no blocks".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidSignature(format!("zero-sized block in {blocks:?}")));
        }
        Ok(Self { blocks })
    }

    /// The commutative algebra `ℂⁿ`.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// The full matrix algebra `M_n(ℂ)`.
    pub fn matrix(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    /// Complex dimension `Σ nᵢ²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Starting coordinate of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, n| {
                let start = *acc;
                *acc += n * n;
                Some(start)
            })
            .collect()
    }

    /// `(block, row, col)` of a flat coordinate.
    pub fn locate(&self, mut coord: usize) -> Option<(usize, usize, usize)> {
        for (b, &n) in self.blocks.iter().enumerate() {
            if coord < n * n {
                return Some((b, coord / n, coord % n));
            }
            coord -= n * n;
        }
        None
    }

    pub fn ensure_eq(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::SignatureMismatch { expected: self.blocks.clone(), found: other.blocks.clone() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for AlgebraSignature {
    type Error = Error;

    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<AlgebraSignature> for Vec<usize> {
    fn from(sig: AlgebraSignature) -> Self {
        sig.blocks
    }
}

impl fmt::Debug for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.blocks)
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.blocks.iter().map(|&n| if n == 1 { "C".to_string() } else { format!("M{n}") }).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A block-diagonal element of an algebra.
#[derive(Clone, PartialEq)]
pub struct Element {
    signature: AlgebraSignature,
    blocks: Vec<ComplexMatrix>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element").field("signature", &self.signature).field("blocks", &self.blocks).finish()
    }
}

/// Binary operations accepted by [`element_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Element {
    pub fn new(signature: AlgebraSignature, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(Error::ShapeMismatch(format!("{} blocks for signature {:?}", blocks.len(), signature)));
        }
        for (b, &n) in blocks.iter().zip(signature.blocks()) {
            if b.rows() != n || b.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block of shape {}x{} where {n}x{n} expected",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(Self { signature, blocks })
    }

    /// Infers the signature from the block shapes.
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
            return Err(Error::NotSquare { rows: b.rows(), cols: b.cols() });
        }
        let sig = AlgebraSignature::new(blocks.iter().map(|b| b.rows()).collect())?;
        Self::new(sig, blocks)
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        let blocks = signature.blocks().iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        Self { signature: signature.clone(), blocks }
    }

    pub fn one(signature: &AlgebraSignature) -> Self {
        let blocks = signature.blocks().iter().map(|&n| ComplexMatrix::identity(n)).collect();
        Self { signature: signature.clone(), blocks }
    }

    /// An element of `ℂⁿ` from its coordinates.
    pub fn from_vector(values: &[Complex64]) -> Result<Self> {
        let sig = AlgebraSignature::commutative(values.len())?;
        Self::from_coords(&sig, values)
    }

    pub fn from_real_vector(values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_vector(&v)
    }

    /// Rebuilds an element from matrix-unit coordinates.
    pub fn from_coords(signature: &AlgebraSignature, coords: &[Complex64]) -> Result<Self> {
        if coords.len() != signature.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for algebra of dimension {}",
                coords.len(),
                signature.dim()
            )));
        }
        let mut blocks = Vec::with_capacity(signature.num_blocks());
        let mut start = 0;
        for &n in signature.blocks() {
            blocks.push(ComplexMatrix::new(n, n, coords[start..start + n * n].to_vec())?);
            start += n * n;
        }
        Ok(Self { signature: signature.clone(), blocks })
    }

    /// The `coord`-th matrix unit.
    pub fn basis(signature: &AlgebraSignature, coord: usize) -> Result<Self> {
        let (b, i, j) =
            signature.locate(coord).ok_or(Error::IndexOutOfRange { index: coord, size: signature.dim() })?;
        let mut e = Self::zero(signature);
        e.blocks[b][(i, j)] = Complex64::new(1.0, 0.0);
        Ok(e)
    }

    /// Embeds a matrix as block `b`, zero elsewhere.
    pub fn embed_block(signature: &AlgebraSignature, b: usize, block: ComplexMatrix) -> Result<Self> {
        let mut e = Self::zero(signature);
        let n = *signature.blocks().get(b).ok_or(Error::IndexOutOfRange { index: b, size: signature.num_blocks() })?;
        if block.rows() != n || block.cols() != n {
            return Err(Error::ShapeMismatch(format!("block {b} must be {n}x{n}")));
        }
        e.blocks[b] = block;
        Ok(e)
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn coords(&self) -> Vec<Complex64> {
        self.blocks.iter().flat_map(|b| b.as_slice().iter().copied()).collect()
    }

    fn zip_blocks(
        &self,
        other: &Self,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        self.signature.ensure_eq(&other.signature)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(Self { signature: self.signature.clone(), blocks })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a.sub(b))
    }

    /// Blockwise matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a.mul(b))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { signature: self.signature.clone(), blocks: self.blocks.iter().map(|b| b.scale(z)).collect() }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Blockwise conjugate transpose.
    pub fn star(&self) -> Self {
        Self { signature: self.signature.clone(), blocks: self.blocks.iter().map(ComplexMatrix::adjoint).collect() }
    }

    /// The C*-norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(operator_norm).fold(0.0, f64::max)
    }

    /// Largest absolute coordinate; a cheap distance for residual reporting.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }

    fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }

    fn self_adjoint_defect(&self) -> f64 {
        self.blocks.iter().map(|b| b.hermitian_defect().powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_defect() <= POSITIVITY_TOL * (1.0 + self.frobenius_norm())
    }

    /// `x = y*y` for some `y`, i.e. every block is positive semidefinite.
    /// Non-self-adjoint elements are not positive.
    pub fn is_positive(&self) -> bool {
        if !self.is_self_adjoint() {
            return false;
        }
        self.blocks.iter().all(|b| match herm_eig(b) {
            Ok(eig) => eig.min_eigenvalue() >= -POSITIVITY_TOL * (1.0 + b.frobenius_norm()),
            Err(_) => false,
        })
    }

    /// `self ≤ other` in the order induced by the positive cone.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        Ok(other.sub(self)?.is_positive())
    }

    /// `0 ≤ x ≤ 1`.
    pub fn is_effect(&self) -> bool {
        self.is_positive() && Element::one(&self.signature).sub(self).map(|d| d.is_positive()).unwrap_or(false)
    }

    /// Splits a self-adjoint element into orthogonal positive and negative
    /// parts, `x = x_p - x_n` with `x_p x_n = 0`.
    pub fn decompose_self_adjoint(&self) -> Result<(Element, Element)> {
        let defect = self.self_adjoint_defect();
        if defect > POSITIVITY_TOL * (1.0 + self.norm()) {
            return Err(Error::NotSelfAdjoint { asymmetry: defect });
        }
        let mut pos = Vec::with_capacity(self.blocks.len());
        let mut neg = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let eig = herm_eig(&b.hermitian_part())?;
            pos.push(eig.reconstruct_with(|x| x.max(0.0)).hermitian_part());
            neg.push(eig.reconstruct_with(|x| (-x).max(0.0)).hermitian_part());
        }
        Ok((
            Element { signature: self.signature.clone(), blocks: pos },
            Element { signature: self.signature.clone(), blocks: neg },
        ))
    }

    /// `y_r = (y + y*)/2` and `y_i = (y - y*)/2i`, so `y = y_r + i y_i`.
    pub fn real_imag_parts(&self) -> (Element, Element) {
        let star = self.star();
        let re = self.add(&star).expect("same signature").scale_real(0.5);
        let im = self.sub(&star).expect("same signature").scale(Complex64::new(0.0, -0.5));
        (re, im)
    }

    /// The four positive parts `(r₊, r₋, i₊, i₋)` with
    /// `x = r₊ - r₋ + i(i₊ - i₋)`.
    pub fn positive_parts(&self) -> Result<[Element; 4]> {
        let (re, im) = self.real_imag_parts();
        let (rp, rn) = re.decompose_self_adjoint()?;
        let (ip, in_) = im.decompose_self_adjoint()?;
        Ok([rp, rn, ip, in_])
    }
}

/// Elementwise arithmetic on elements; `Mul` is the algebra product.
pub fn element_arith(op: ArithOp, x: &Element, y: &Element) -> Result<Element> {
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
    }
}

/// A positive element below the unit: a fuzzy predicate.
#[derive(Clone, PartialEq)]
pub struct Effect(Element);

impl fmt::Debug for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Effect").field(&self.0).finish()
    }
}

impl Effect {
    pub fn new(element: Element) -> Result<Self> {
        if !element.is_effect() {
            return Err(Error::NotEffect);
        }
        Ok(Self(element))
    }

    /// Wraps an element already known to lie in `[0, 1]`.
    pub(crate) fn new_unchecked(element: Element) -> Self {
        Self(element)
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        Self(Element::zero(signature))
    }

    pub fn one(signature: &AlgebraSignature) -> Self {
        Self(Element::one(signature))
    }

    pub fn element(&self) -> &Element {
        &self.0
    }

    pub fn into_element(self) -> Element {
        self.0
    }

    pub fn signature(&self) -> &AlgebraSignature {
        self.0.signature()
    }

    /// Orthocomplement `1 - e`.
    pub fn complement(&self) -> Effect {
        Effect(Element::one(self.signature()).sub(&self.0).expect("same signature"))
    }

    /// Partial sum `e ⊞ e'`, defined when `e + e' ≤ 1`.
    pub fn ortho_sum(&self, other: &Effect) -> Option<Effect> {
        let sum = self.0.add(&other.0).ok()?;
        sum.is_effect().then_some(Effect(sum))
    }

    /// Scalar action by `r ∈ [0, 1]`.
    pub fn scale(&self, r: f64) -> Result<Effect> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::NotEffect);
        }
        Ok(Effect(self.0.scale_real(r)))
    }
}

impl TryFrom<Element> for Effect {
    type Error = Error;

    fn try_from(e: Element) -> Result<Self> {
        Effect::new(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(data: &[Complex64]) -> Element {
        Element::from_blocks(vec![ComplexMatrix::new(2, 2, data.to_vec()).unwrap()]).unwrap()
    }

    fn m2r(data: &[f64]) -> Element {
        Element::from_blocks(vec![ComplexMatrix::from_real(2, 2, data).unwrap()]).unwrap()
    }

    fn vec_r(v: &[f64]) -> Element {
        Element::from_real_vector(v).unwrap()
    }

    fn close(a: &Element, b: &Element, tol: f64) -> bool {
        a.sub(b).unwrap().max_abs() <= tol
    }

    #[test]
    fn signature_validation() {
        assert!(AlgebraSignature::new(vec![]).is_err());
        assert!(AlgebraSignature::new(vec![1, 0]).is_err());
        let s = AlgebraSignature::new(vec![1, 2, 3]).unwrap();
        assert_eq!(s.dim(), 14);
        assert_eq!(s.offsets(), vec![0, 1, 5]);
        assert_eq!(s.locate(7), Some((2, 0, 2)));
        assert!(!s.is_commutative());
        assert!(AlgebraSignature::commutative(3).unwrap().is_commutative());
        assert_eq!(s.to_string(), "C+M2+M3");
    }

    #[test]
    fn arithmetic_examples() {
        let x = vec_r(&[1.0, 2.0]);
        let y = vec_r(&[3.0, 4.0]);
        assert_eq!(element_arith(ArithOp::Mul, &x, &y).unwrap(), vec_r(&[3.0, 8.0]));

        let z = m2(&[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-2.0, 0.0)]);
        let one = Element::one(z.signature());
        assert_eq!(z.mul(&one).unwrap(), z);

        let s = vec_r(&[1.0, 0.0, 1.0]).scale(c(0.0, 2.0));
        assert_eq!(s, Element::from_vector(&[c(0.0, 2.0), c(0.0, 0.0), c(0.0, 2.0)]).unwrap());

        let err = x.add(&vec_r(&[1.0, 2.0, 3.0])).unwrap_err();
        assert!(matches!(err, Error::SignatureMismatch { .. }));
    }

    #[test]
    fn star_examples() {
        let x = Element::from_vector(&[c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(x.star(), Element::from_vector(&[c(0.0, -1.0), c(2.0, 0.0)]).unwrap());
        assert_eq!(x.star().star(), x);
        assert_eq!(m2r(&[0.0, 1.0, 0.0, 0.0]).star(), m2r(&[0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn positivity_examples() {
        assert!(vec_r(&[0.0, 1.0, 2.0]).is_positive());
        assert!(m2r(&[1.0, 1.0, 1.0, 1.0]).is_positive());
        assert!(!vec_r(&[1.0, -1e-3]).is_positive());
        // non-self-adjoint
        assert!(!m2r(&[1.0, 1.0, 0.0, 1.0]).is_positive());
    }

    #[test]
    fn order_examples() {
        assert!(vec_r(&[0.0, 0.0]).leq(&vec_r(&[1.0, 2.0])).unwrap());
        let x = m2(&[c(1.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(-3.0, 0.0)]);
        assert!(x.leq(&x).unwrap());
        // difference diag(-1, 1) has eigenvalues ±1
        assert!(!m2r(&[1.0, 0.0, 0.0, 0.0]).leq(&m2r(&[0.0, 0.0, 0.0, 1.0])).unwrap());
    }

    #[test]
    fn norm_examples() {
        let x = Element::from_vector(&[c(0.0, 3.0), c(-4.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((x.norm() - 4.0).abs() < 1e-12);
        for blocks in [vec![1], vec![3], vec![1, 2, 2]] {
            let sig = AlgebraSignature::new(blocks).unwrap();
            assert!((Element::one(&sig).norm() - 1.0).abs() < 1e-12);
        }
        let mixed = Element::from_blocks(vec![
            ComplexMatrix::from_real(1, 1, &[2.0]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[0.0, 3.0, 0.0, 0.0]).unwrap(),
        ])
        .unwrap();
        assert!((mixed.norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn self_adjoint_decomposition_examples() {
        let (p, n) = vec_r(&[3.0, -2.0]).decompose_self_adjoint().unwrap();
        assert!(close(&p, &vec_r(&[3.0, 0.0]), 1e-12));
        assert!(close(&n, &vec_r(&[0.0, 2.0]), 1e-12));

        let pos = m2r(&[2.0, 1.0, 1.0, 2.0]);
        let (p, n) = pos.decompose_self_adjoint().unwrap();
        assert!(close(&p, &pos, 1e-12));
        assert!(n.max_abs() < 1e-12);

        let (p, n) = m2r(&[0.0, 1.0, 1.0, 0.0]).decompose_self_adjoint().unwrap();
        assert!(close(&p, &m2r(&[0.5, 0.5, 0.5, 0.5]), 1e-12));
        assert!(close(&n, &m2r(&[0.5, -0.5, -0.5, 0.5]), 1e-12));
        assert!(p.mul(&n).unwrap().norm() < 1e-12);

        assert!(matches!(m2r(&[0.0, 1.0, 0.0, 0.0]).decompose_self_adjoint(), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn real_imag_examples() {
        let y = Element::from_vector(&[c(3.0, 4.0)]).unwrap();
        let (re, im) = y.real_imag_parts();
        assert_eq!(re, vec_r(&[3.0]));
        assert_eq!(im, vec_r(&[4.0]));

        let sa = m2(&[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(5.0, 0.0)]);
        let (re, im) = sa.real_imag_parts();
        assert_eq!(re, sa);
        assert_eq!(im.max_abs(), 0.0);

        // (1/2i)(y - y*) for y = E_01: y - y* = [[0,1],[-1,0]]
        let (re, im) = m2r(&[0.0, 1.0, 0.0, 0.0]).real_imag_parts();
        assert!(close(&re, &m2r(&[0.0, 0.5, 0.5, 0.0]), 1e-15));
        assert!(close(&im, &m2(&[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]), 1e-15));
    }

    #[test]
    fn effect_examples() {
        assert!(vec_r(&[0.3, 1.0]).is_effect());
        assert!(!vec_r(&[0.3, 1.1]).is_effect());
        assert!(m2r(&[0.5, 0.0, 0.0, 0.5]).is_effect());
        let e = Effect::new(vec_r(&[0.3, 1.0])).unwrap();
        assert!(close(e.complement().element(), &vec_r(&[0.7, 0.0]), 1e-15));
        assert!(e.ortho_sum(&Effect::new(vec_r(&[0.7, 0.0])).unwrap()).is_some());
        assert!(e.ortho_sum(&Effect::new(vec_r(&[0.8, 0.0])).unwrap()).is_none());
        assert!(Effect::new(vec_r(&[-0.1])).is_err());
    }
}
