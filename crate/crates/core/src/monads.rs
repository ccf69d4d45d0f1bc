//! The finite distribution monad, its Kleisli category of stochastic
//! matrices, and the translations to and from maps between commutative
//! algebras `ℂⁿ`.
//!
//! Kleisli maps `n → D(m)` go to PU maps `ℂᵐ → ℂⁿ` (predicate transformers,
//! running backwards), functions `n → m` go to MIU maps `ℂᵐ → ℂⁿ` by
//! precomposition, and distributions on `n` are the states of `ℂⁿ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSignature, Element};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::maps::{classify, LinMap, Positivity};
use crate::states::State;
use crate::tol::{DIST_CLAMP, DIST_SUM_TOL, EXTRACTION_TOL};

/// A probability distribution on `{0, …, n-1}`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dist {
    weights: Vec<f64>,
}

impl Dist {
    /// Validates and clamps: weights within `1e-12` of `[0, 1]` are clamped,
    /// the total must be within `1e-9` of 1.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDist("empty support".into()));
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < -DIST_CLAMP || *w > 1.0 + DIST_CLAMP {
                return Err(Error::InvalidDist(format!("weight {i} is {w}")));
            }
            *w = w.clamp(0.0, 1.0);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidDist(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDist("empty support".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// Index of the point mass, if this is one.
    pub fn point_mass(&self) -> Option<usize> {
        self.weights.iter().position(|&w| w > 1.0 - EXTRACTION_TOL)
    }

    /// `∞`-distance between two distributions on the same set.
    pub fn distance(&self, other: &Dist) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch(format!("{} vs {}", self.len(), other.len())));
        }
        Ok(self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weights: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Dist::new(raw.weights).map_err(serde::de::Error::custom)
    }
}

/// `η(x) = 1·x`.
pub fn dist_unit(x: usize, n: usize) -> Result<Dist> {
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, size: n });
    }
    let mut w = vec![0.0; n];
    w[x] = 1.0;
    Ok(Dist { weights: w })
}

/// A finitely supported distribution over arbitrary values, as a formal
/// convex combination. Atoms may repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct FinDist<T> {
    atoms: Vec<(f64, T)>,
}

impl<T> FinDist<T> {
    pub fn new(atoms: Vec<(f64, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDist("empty support".into()));
        }
        let mut atoms = atoms;
        for (w, _) in atoms.iter_mut() {
            if !w.is_finite() || *w < -DIST_CLAMP || *w > 1.0 + DIST_CLAMP {
                return Err(Error::InvalidDist(format!("atom weight {w}")));
            }
            *w = w.clamp(0.0, 1.0);
        }
        let total: f64 = atoms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidDist(format!("atom weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    pub fn point(value: T) -> Self {
        Self { atoms: vec![(1.0, value)] }
    }

    pub fn atoms(&self) -> &[(f64, T)] {
        &self.atoms
    }

    /// Functor action.
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> FinDist<U> {
        FinDist { atoms: self.atoms.iter().map(|(w, x)| (*w, f(x))).collect() }
    }
}

impl<T: Clone> FinDist<FinDist<T>> {
    /// Multiplication at the level of formal sums.
    pub fn join(&self) -> FinDist<T> {
        let atoms =
            self.atoms.iter().flat_map(|(w, inner)| inner.atoms.iter().map(move |(v, x)| (w * v, x.clone()))).collect();
        FinDist { atoms }
    }
}

/// `μ(Φ)(x) = Σ_φ Φ(φ) φ(x)`.
pub fn dist_mult(phi: &FinDist<Dist>) -> Result<Dist> {
    let n = phi.atoms[0].1.len();
    let mut out = vec![0.0; n];
    for (w, d) in &phi.atoms {
        if d.len() != n {
            return Err(Error::SizeMismatch(format!("inner distributions on {n} and {}", d.len())));
        }
        for (o, x) in out.iter_mut().zip(&d.weights) {
            *o += w * x;
        }
    }
    Dist::new(out)
}

/// A row-stochastic `n × m` matrix: a Kleisli map `n → D(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleisliMap {
    dom_size: usize,
    cod_size: usize,
    matrix: Vec<f64>,
}

impl KleisliMap {
    pub fn new(dom_size: usize, cod_size: usize, matrix: Vec<f64>) -> Result<Self> {
        if dom_size == 0 || cod_size == 0 {
            return Err(Error::NotStochastic(format!("empty shape {dom_size}x{cod_size}")));
        }
        if matrix.len() != dom_size * cod_size {
            return Err(Error::NotStochastic(format!("{} entries for a {dom_size}x{cod_size} matrix", matrix.len())));
        }
        let mut rows = Vec::with_capacity(dom_size);
        for (i, row) in matrix.chunks(cod_size).enumerate() {
            let d = Dist::new(row.to_vec()).map_err(|e| Error::NotStochastic(format!("row {i}: {e}")))?;
            rows.push(d);
        }
        Self::from_rows(cod_size, &rows)
    }

    pub fn from_rows(cod_size: usize, rows: &[Dist]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NotStochastic("no rows".into()));
        }
        let mut matrix = Vec::with_capacity(rows.len() * cod_size);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cod_size {
                return Err(Error::NotStochastic(format!("row {i} has {} entries, expected {cod_size}", r.len())));
            }
            matrix.extend_from_slice(r.weights());
        }
        Ok(Self { dom_size: rows.len(), cod_size, matrix })
    }

    /// The Kleisli identity `η`.
    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n).map(|i| dist_unit(i, n)).collect::<Result<Vec<_>>>()?;
        Self::from_rows(n, &rows)
    }

    pub fn dom_size(&self) -> usize {
        self.dom_size
    }

    pub fn cod_size(&self) -> usize {
        self.cod_size
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cod_size + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> Dist {
        Dist { weights: self.matrix[i * self.cod_size..(i + 1) * self.cod_size].to_vec() }
    }

    pub fn rows(&self) -> Vec<Dist> {
        (0..self.dom_size).map(|i| self.row(i)).collect()
    }

    /// Forward (Schrödinger) evolution `d ↦ d·M`.
    pub fn push(&self, d: &Dist) -> Result<Dist> {
        if d.len() != self.dom_size {
            return Err(Error::SizeMismatch(format!(
                "distribution on {} points for a kernel from {}",
                d.len(),
                self.dom_size
            )));
        }
        let phi = FinDist::new(d.weights.iter().enumerate().map(|(i, &w)| (w, self.row(i))).collect())?;
        dist_mult(&phi)
    }

    pub fn max_distance(&self, other: &KleisliMap) -> Result<f64> {
        if self.dom_size != other.dom_size || self.cod_size != other.cod_size {
            return Err(Error::SizeMismatch("kernels of different shapes".into()));
        }
        Ok(self.matrix.iter().zip(&other.matrix).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Kleisli composition `g ⊙ f = μ ∘ D(g) ∘ f`.
pub fn kleisli_compose(g: &KleisliMap, f: &KleisliMap) -> Result<KleisliMap> {
    if f.cod_size != g.dom_size {
        return Err(Error::SizeMismatch(format!(
            "cannot compose {}->{} after {}->{}",
            g.dom_size, g.cod_size, f.dom_size, f.cod_size
        )));
    }
    let rows = (0..f.dom_size)
        .map(|i| {
            // D(g)(f(i)) is the formal mixture Σ_j f(i)(j)·δ_{g(j)}.
            let phi = FinDist::new((0..f.cod_size).map(|j| (f.entry(i, j), g.row(j))).collect())?;
            dist_mult(&phi)
        })
        .collect::<Result<Vec<_>>>()?;
    KleisliMap::from_rows(g.cod_size, &rows)
}

/// A function `n → m` as a lookup table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionMap {
    dom_size: usize,
    cod_size: usize,
    table: Vec<usize>,
}

impl FunctionMap {
    pub fn new(cod_size: usize, table: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = table.iter().find(|&&j| j >= cod_size) {
            return Err(Error::IndexOutOfRange { index: bad, size: cod_size });
        }
        Ok(Self { dom_size: table.len(), cod_size, table })
    }

    pub fn identity(n: usize) -> Self {
        Self { dom_size: n, cod_size: n, table: (0..n).collect() }
    }

    pub fn dom_size(&self) -> usize {
        self.dom_size
    }

    pub fn cod_size(&self) -> usize {
        self.cod_size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// Every function `n → m`, in lexicographic order of tables.
    pub fn enumerate(n: usize, m: usize) -> Vec<FunctionMap> {
        let total = (m as u64).pow(n as u32) as usize;
        (0..total)
            .map(|mut code| {
                let mut table = vec![0; n];
                for slot in table.iter_mut().rev() {
                    *slot = code % m;
                    code /= m;
                }
                FunctionMap { dom_size: n, cod_size: m, table }
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for FunctionMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            cod_size: usize,
            table: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        FunctionMap::new(raw.cod_size, raw.table).map_err(serde::de::Error::custom)
    }
}

fn cn(n: usize) -> Result<AlgebraSignature> {
    AlgebraSignature::commutative(n)
}

/// `v ↦ (i ↦ Σ_j f(i)(j) v(j))`: the PU map `ℂᵐ → ℂⁿ` of a Kleisli map.
pub fn to_pu(f: &KleisliMap) -> LinMap {
    let coeffs = ComplexMatrix::from_real(f.dom_size, f.cod_size, &f.matrix).expect("finite entries");
    LinMap::new(cn(f.cod_size).expect("m ≥ 1"), cn(f.dom_size).expect("n ≥ 1"), coeffs).expect("shape matches")
}

fn ensure_commutative(h: &LinMap) -> Result<()> {
    for sig in [h.dom(), h.cod()] {
        if !sig.is_commutative() {
            return Err(Error::NotCommutative(sig.blocks().to_vec()));
        }
    }
    Ok(())
}

/// Reads the stochastic matrix `M_ij = h(e_j)_i` off a PU map `ℂᵐ → ℂⁿ`.
pub fn from_pu(h: &LinMap) -> Result<KleisliMap> {
    ensure_commutative(h)?;
    let class = classify(h);
    if !(class.unital && class.positive == Positivity::Yes) {
        return Err(Error::NotPu(format!("unital={}, positive={:?}", class.unital, class.positive)));
    }
    let n = h.cod().dim();
    let m = h.dom().dim();
    let coeffs = h.coeffs();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let z = coeffs[(i, j)];
            if z.im.abs() > EXTRACTION_TOL {
                return Err(Error::NotStochastic(format!("entry ({i},{j}) has imaginary part {}", z.im)));
            }
            if z.re < -EXTRACTION_TOL || z.re > 1.0 + EXTRACTION_TOL {
                return Err(Error::NotStochastic(format!("entry ({i},{j}) = {}", z.re)));
            }
            row.push(z.re.clamp(0.0, 1.0));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > EXTRACTION_TOL {
            return Err(Error::NotStochastic(format!("row {i} sums to {total}")));
        }
        rows.push(Dist::new(row.into_iter().map(|w| w / total).collect())?);
    }
    KleisliMap::from_rows(m, &rows)
}

/// Precomposition `v ↦ v ∘ f`: the MIU map `ℂᵐ → ℂⁿ` of a function `n → m`.
pub fn function_to_miu(f: &FunctionMap) -> Result<LinMap> {
    let mut coeffs = ComplexMatrix::zeros(f.dom_size, f.cod_size);
    for (i, &j) in f.table.iter().enumerate() {
        coeffs[(i, j)] = Complex64::new(1.0, 0.0);
    }
    LinMap::new(cn(f.cod_size)?, cn(f.dom_size)?, coeffs)
}

/// Recovers the function behind a MIU map `ℂᵐ → ℂⁿ`: its matrix is Boolean
/// with exactly one 1 per row.
pub fn miu_to_function(h: &LinMap) -> Result<FunctionMap> {
    const BOOLEAN_TOL: f64 = 1e-6;
    ensure_commutative(h)?;
    let class = classify(h);
    if !class.is_miu() {
        return Err(Error::NotMiu(format!(
            "multiplicative={}, involutive={}, unital={}",
            class.multiplicative, class.involutive, class.unital
        )));
    }
    let n = h.cod().dim();
    let m = h.dom().dim();
    let one = Complex64::new(1.0, 0.0);
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let mut hit = None;
        for j in 0..m {
            let z = h.coeffs()[(i, j)];
            if (z - one).norm() <= BOOLEAN_TOL {
                if hit.is_some() {
                    return Err(Error::NotFunctional { row: i });
                }
                hit = Some(j);
            } else if z.norm() > BOOLEAN_TOL {
                return Err(Error::NotFunctional { row: i });
            }
        }
        table.push(hit.ok_or(Error::NotFunctional { row: i })?);
    }
    FunctionMap::new(m, table)
}

/// Exhaustively tests every Boolean functional `ℂⁿ → ℂ` for being MIU and
/// returns the ones that are.
pub fn enumerate_miu_states(n: usize) -> Result<Vec<LinMap>> {
    let dom = cn(n)?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let coeffs: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        let h = LinMap::new(dom.clone(), cn(1)?, ComplexMatrix::from_real(1, n, &coeffs)?)?;
        if classify(&h).is_miu() {
            out.push(h);
        }
    }
    Ok(out)
}

/// `φ ↦ (v ↦ Σ_i φ(i) v(i))`.
pub fn dist_to_state(d: &Dist) -> State {
    let sig = cn(d.len()).expect("nonempty");
    let densities = d.weights.iter().map(|&w| ComplexMatrix::from_real_diag(&[w])).collect();
    State::new(sig, densities).expect("distributions are states")
}

/// `σ ↦ (i ↦ σ(|i⟩))` on a commutative algebra.
pub fn state_to_dist(s: &State) -> Result<Dist> {
    if !s.signature().is_commutative() {
        return Err(Error::NotCommutative(s.signature().blocks().to_vec()));
    }
    Dist::new(s.densities().iter().map(|rho| rho[(0, 0)].re).collect())
}

/// `v ↦ Σ_i d_i v_i`, the expectation of a random variable on `n`.
pub fn expectation(d: &Dist, v: &Element) -> Result<Complex64> {
    dist_to_state(d).eval(v)
}
