//! States as block density matrices, effect-module maps and their extension
//! to states, barycentres of finitely supported measures, and the
//! identification of an algebra with affine functions on its state space.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraSignature, Effect, Element};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, least_squares, psd_sqrt, ComplexMatrix};
use crate::monads::{dist_to_state, Dist, FinDist};
use crate::random::{random_effect, rng};
use crate::tol::{CLASSIFY_TOL, POSITIVITY_TOL};

/// A state `a ↦ Σᵢ tr(ρᵢ aᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    signature: AlgebraSignature,
    densities: Vec<ComplexMatrix>,
}

impl State {
    /// Checks that every density is Hermitian and PSD and that the traces sum
    /// to one. Densities are stored Hermitised.
    pub fn new(signature: AlgebraSignature, densities: Vec<ComplexMatrix>) -> Result<Self> {
        if densities.len() != signature.num_blocks() {
            return Err(Error::InvalidState(format!("{} densities for signature {:?}", densities.len(), signature)));
        }
        let mut total = 0.0;
        let mut clean = Vec::with_capacity(densities.len());
        for (b, (rho, &n)) in densities.iter().zip(signature.blocks()).enumerate() {
            if rho.rows() != n || rho.cols() != n {
                return Err(Error::InvalidState(format!("density {b} is not {n}x{n}")));
            }
            if !rho.is_hermitian(POSITIVITY_TOL) {
                return Err(Error::InvalidState(format!("density {b} is not Hermitian")));
            }
            let h = rho.hermitian_part();
            let min = herm_eig(&h)?.min_eigenvalue();
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidState(format!("density {b} has negative eigenvalue {min:e}")));
            }
            total += h.trace().re;
            clean.push(h);
        }
        if (total - 1.0).abs() > POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("total trace {total}")));
        }
        Ok(Self { signature, densities: clean })
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn densities(&self) -> &[ComplexMatrix] {
        &self.densities
    }

    /// `Σᵢ tr(ρᵢ xᵢ)`.
    pub fn eval(&self, x: &Element) -> Result<Complex64> {
        self.signature.ensure_eq(x.signature())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (rho, a) in self.densities.iter().zip(x.blocks()) {
            let n = rho.rows();
            for i in 0..n {
                for j in 0..n {
                    acc += rho[(j, i)] * a[(i, j)];
                }
            }
        }
        Ok(acc)
    }

    /// Coefficients `c` with `eval(x) = Σ_k c_k x_k` in matrix-unit
    /// coordinates; the coordinate `(i, j)` of a block carries `ρ_ji`.
    pub fn functional(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.signature.dim());
        for rho in &self.densities {
            let n = rho.rows();
            for i in 0..n {
                for j in 0..n {
                    out.push(rho[(j, i)]);
                }
            }
        }
        out
    }

    /// `α·self + (1-α)·other`.
    pub fn mix(&self, alpha: f64, other: &State) -> Result<State> {
        self.signature.ensure_eq(&other.signature)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidState(format!("mixing weight {alpha}")));
        }
        let densities = self
            .densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| a.scale_real(alpha).add(&b.scale_real(1.0 - alpha)))
            .collect::<Result<Vec<_>>>()?;
        State::new(self.signature.clone(), densities)
    }

    /// Largest entrywise difference of the densities.
    pub fn distance(&self, other: &State) -> Result<f64> {
        self.signature.ensure_eq(&other.signature)?;
        let mut d: f64 = 0.0;
        for (a, b) in self.densities.iter().zip(&other.densities) {
            d = d.max(a.sub(b)?.max_abs());
        }
        Ok(d)
    }

    /// The effect-module map `e ↦ σ(e)` obtained by restricting to effects.
    pub fn restrict(&self) -> impl Fn(&Effect) -> f64 + '_ {
        move |e| self.eval(e.element()).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

/// The Dirac state `v ↦ v_i` on `ℂⁿ`.
pub fn dirac_state(i: usize, n: usize) -> Result<State> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, size: n });
    }
    let sig = AlgebraSignature::commutative(n)?;
    let densities = (0..n).map(|k| ComplexMatrix::from_real_diag(&[if k == i { 1.0 } else { 0.0 }])).collect();
    State::new(sig, densities)
}

/// Pure-state test. On `ℂⁿ` the state must be a point mass; in general
/// exactly one block carries weight and its density has rank one.
pub fn is_extreme(s: &State) -> bool {
    const RANK_TOL: f64 = 1e-8;
    if s.signature.is_commutative() {
        return s.densities.iter().any(|rho| rho[(0, 0)].re > 1.0 - RANK_TOL);
    }
    let weighted: Vec<&ComplexMatrix> = s.densities.iter().filter(|rho| rho.trace().re > RANK_TOL).collect();
    if weighted.len() != 1 {
        return false;
    }
    let rho = weighted[0];
    if rho.rows() == 1 {
        return true;
    }
    match herm_eig(rho) {
        // eigenvalues ascending: the second largest is the rank-two witness
        Ok(eig) => eig.eigenvalues[eig.eigenvalues.len() - 2] <= RANK_TOL,
        Err(_) => false,
    }
}

/// A finitely supported probability measure on a state space.
#[derive(Debug, Clone)]
pub struct FinMeasure {
    signature: AlgebraSignature,
    atoms: FinDist<State>,
}

impl FinMeasure {
    pub fn new(atoms: Vec<(f64, State)>) -> Result<Self> {
        let atoms = FinDist::new(atoms)?;
        let signature = atoms.atoms()[0].1.signature().clone();
        for (_, s) in atoms.atoms() {
            signature.ensure_eq(s.signature())?;
        }
        Ok(Self { signature, atoms })
    }

    pub fn dirac(s: State) -> Self {
        Self { signature: s.signature().clone(), atoms: FinDist::point(s) }
    }

    /// The image of a distribution over distributions under `D(n) ≅ Stat(ℂⁿ)`.
    pub fn from_nested(phi: &FinDist<Dist>) -> Result<Self> {
        Self::new(phi.atoms().iter().map(|(w, d)| (*w, dist_to_state(d))).collect())
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn atoms(&self) -> &[(f64, State)] {
        self.atoms.atoms()
    }

    /// `α·self ⊕ (1-α)·other` as a formal mixture.
    pub fn mix(&self, alpha: f64, other: &FinMeasure) -> Result<FinMeasure> {
        let mut atoms: Vec<(f64, State)> = self.atoms().iter().map(|(w, s)| (alpha * w, s.clone())).collect();
        atoms.extend(other.atoms().iter().map(|(w, s)| ((1.0 - alpha) * w, s.clone())));
        FinMeasure::new(atoms)
    }
}

/// The state `Σ wₖ σₖ`, at which every affine observable equals its integral.
pub fn barycentre(mu: &FinMeasure) -> Result<State> {
    let mut densities: Vec<ComplexMatrix> = mu.signature.blocks().iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
    for (w, s) in mu.atoms() {
        for (acc, rho) in densities.iter_mut().zip(s.densities()) {
            *acc = acc.add(&rho.scale_real(*w))?;
        }
    }
    State::new(mu.signature.clone(), densities)
}

/// Result of probing the effect-module axioms on samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EModReport {
    pub trials: usize,
    pub violations: Vec<String>,
}

impl EModReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A random pair of effects `(e, e')` with `e + e' ≤ 1`.
pub(crate) fn orthogonal_pair<R: Rng + ?Sized>(sig: &AlgebraSignature, rng: &mut R) -> (Effect, Effect) {
    let e = random_effect(sig, rng);
    let g = random_effect(sig, rng);
    let room = e.complement();
    // e' = √(1-e) g √(1-e) ≤ 1 - e
    let blocks = room
        .element()
        .blocks()
        .iter()
        .zip(g.element().blocks())
        .map(|(r, gb)| {
            let s = psd_sqrt(&r.hermitian_part()).expect("complement of an effect is positive");
            s.mul(gb).and_then(|x| x.mul(&s)).map(|x| x.hermitian_part()).expect("square blocks")
        })
        .collect();
    let other = Element::new(sig.clone(), blocks).expect("shapes follow the signature");
    (e, Effect::new_unchecked(other))
}

/// Probes a map between effect sets `[0,1]_A → [0,1]_B` for the
/// effect-module homomorphism axioms: preservation of `1`, of orthogonal sums
/// and of `[0,1]`-scalar multiples, and that values are effects.
pub fn emod_check(
    dom: &AlgebraSignature,
    cod: &AlgebraSignature,
    map: impl Fn(&Effect) -> Result<Element>,
    trials: usize,
    seed: u64,
) -> EModReport {
    let mut report = EModReport { trials, violations: Vec::new() };
    let mut violate = |msg: String| report.violations.push(msg);
    let mut rng = rng(seed);
    let one = Element::one(cod);

    match map(&Effect::one(dom)) {
        Ok(v) if v.signature() == cod => {
            let d = v.sub(&one).expect("same signature").norm();
            if d > POSITIVITY_TOL {
                violate(format!("unit: ||E(1) - 1|| = {d:e}"));
            }
        }
        Ok(v) => violate(format!("codomain: value in {:?}, expected {:?}", v.signature(), cod)),
        Err(e) => violate(format!("unit: {e}")),
    }

    for t in 0..trials {
        let (a, b) = orthogonal_pair(dom, &mut rng);
        let sum = Effect::new_unchecked(a.element().add(b.element()).expect("same signature"));
        let r: f64 = rng.gen_range(0.0..=1.0);
        let ra = a.scale(r).expect("r in [0,1]");
        let values = (map(&a), map(&b), map(&sum), map(&ra));
        let (va, vb, vs, vr) = match values {
            (Ok(va), Ok(vb), Ok(vs), Ok(vr)) => (va, vb, vs, vr),
            _ => {
                violate(format!("trial {t}: map failed on a sampled effect"));
                continue;
            }
        };
        if [&va, &vb, &vs, &vr].iter().any(|v| v.signature() != cod) {
            violate(format!("trial {t}: value outside the codomain"));
            continue;
        }
        if ![&va, &vb, &vs, &vr].iter().all(|v| v.is_effect()) {
            violate(format!("trial {t}: value is not an effect"));
        }
        let add = vs.sub(&va.add(&vb).expect("cod")).expect("cod").norm();
        if add > CLASSIFY_TOL {
            violate(format!("trial {t}: additivity defect {add:e}"));
        }
        let hom = vr.sub(&va.scale_real(r)).expect("cod").norm();
        if hom > CLASSIFY_TOL {
            violate(format!("trial {t}: scalar defect {hom:e}"));
        }
    }
    report
}

/// [`emod_check`] for maps into `[0, 1]`.
pub fn emod_check_scalar(dom: &AlgebraSignature, map: impl Fn(&Effect) -> f64, trials: usize, seed: u64) -> EModReport {
    let c1 = AlgebraSignature::commutative(1).expect("one block");
    emod_check(dom, &c1, |e| Element::from_real_vector(&[map(e)]), trials, seed)
}

/// Extends an effect-module map on `[0,1]_A` linearly: positive `p` goes to
/// `||p|| E(p/||p||)`, general elements through their four positive parts.
fn extend_linearly(map: &impl Fn(&Effect) -> f64, x: &Element) -> Result<Complex64> {
    let on_positive = |p: &Element| -> f64 {
        let n = p.norm();
        if n == 0.0 {
            return 0.0;
        }
        n * map(&Effect::new_unchecked(p.scale_real(1.0 / n)))
    };
    let [rp, rn, ip, in_] = x.positive_parts()?;
    Ok(Complex64::new(on_positive(&rp) - on_positive(&rn), on_positive(&ip) - on_positive(&in_)))
}

/// Number of sampled effects on which a reconstructed state must agree with
/// the map it came from.
pub const EMOD_AGREEMENT_SAMPLES: usize = 100;

/// The unique state whose restriction to effects is `map`.
///
/// `map` is first probed with [`emod_check_scalar`] (`trials` samples); the
/// state is assembled from the linear extension on the matrix units and must
/// then agree with `map` on [`EMOD_AGREEMENT_SAMPLES`] further effects.
pub fn emod_to_state(sig: &AlgebraSignature, map: impl Fn(&Effect) -> f64, trials: usize, seed: u64) -> Result<State> {
    let report = emod_check_scalar(sig, &map, trials, seed);
    if !report.pass() {
        return Err(Error::NotEModHom(report.violations.join("; ")));
    }
    let offsets = sig.offsets();
    let mut densities = Vec::with_capacity(sig.num_blocks());
    for (b, &n) in sig.blocks().iter().enumerate() {
        let mut rho = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let unit = Element::basis(sig, offsets[b] + i * n + j)?;
                // σ(E_ij) = tr(ρ E_ij) = ρ_ji
                rho[(j, i)] = extend_linearly(&map, &unit)?;
            }
        }
        densities.push(rho);
    }
    let state = State::new(sig.clone(), densities).map_err(|e| Error::NotEModHom(e.to_string()))?;

    let mut rng = rng(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    for _ in 0..EMOD_AGREEMENT_SAMPLES {
        let e = random_effect(sig, &mut rng);
        let gap = (state.eval(e.element())?.re - map(&e)).abs();
        if gap.is_nan() || gap > CLASSIFY_TOL {
            return Err(Error::NotEModHom(format!("reconstruction disagrees by {gap:e}")));
        }
    }
    Ok(state)
}

/// An element read as the affine function `σ ↦ σ(a)` on the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineObservable(pub Element);

impl AffineObservable {
    pub fn eval(&self, s: &State) -> Result<Complex64> {
        s.eval(&self.0)
    }

    /// Values on a family of states: the finite encoding consumed by
    /// [`xi_inverse`].
    pub fn sample(&self, family: &[State]) -> Result<Vec<Complex64>> {
        family.iter().map(|s| self.eval(s)).collect()
    }
}

pub fn xi_eval(a: &Element, s: &State) -> Result<Complex64> {
    s.eval(a)
}

/// `dim(A)` states with linearly independent evaluation functionals: per
/// block the diagonal projections `|i⟩⟨i|` and, for `i < j`, the projections
/// onto `(|i⟩ + |j⟩)/√2` and `(|i⟩ + i|j⟩)/√2`.
pub fn spanning_states(sig: &AlgebraSignature) -> Vec<State> {
    let mut out = Vec::with_capacity(sig.dim());
    let embed = |b: usize, rho: ComplexMatrix| {
        let densities = sig
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, &m)| if k == b { rho.clone() } else { ComplexMatrix::zeros(m, m) })
            .collect();
        State::new(sig.clone(), densities).expect("rank-one projections are states")
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (b, &n) in sig.blocks().iter().enumerate() {
        for i in 0..n {
            out.push(embed(b, ComplexMatrix::unit(n, i, i)));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut re = vec![Complex64::new(0.0, 0.0); n];
                re[i] = Complex64::new(h, 0.0);
                re[j] = Complex64::new(h, 0.0);
                out.push(embed(b, ComplexMatrix::outer(&re, &re)));
                let mut im = vec![Complex64::new(0.0, 0.0); n];
                im[i] = Complex64::new(h, 0.0);
                im[j] = Complex64::new(0.0, h);
                out.push(embed(b, ComplexMatrix::outer(&im, &im)));
            }
        }
    }
    out
}

/// Rows are the evaluation functionals of `family` in matrix-unit
/// coordinates.
pub fn evaluation_matrix(sig: &AlgebraSignature, family: &[State]) -> Result<ComplexMatrix> {
    let mut data = Vec::with_capacity(family.len() * sig.dim());
    for s in family {
        sig.ensure_eq(s.signature())?;
        data.extend(s.functional());
    }
    ComplexMatrix::new(family.len(), sig.dim(), data)
}

/// Recovers the element whose affine function takes `values` on `family`.
/// Fails if the data is not the restriction of any element.
pub fn xi_inverse(sig: &AlgebraSignature, family: &[State], values: &[Complex64]) -> Result<Element> {
    const CONSISTENCY_TOL: f64 = 1e-7;
    if family.len() != values.len() {
        return Err(Error::SizeMismatch(format!("{} states but {} values", family.len(), values.len())));
    }
    let a = evaluation_matrix(sig, family)?;
    let (coords, residual) = least_squares(&a, values)?;
    if residual > CONSISTENCY_TOL {
        return Err(Error::InconsistentAffineData { residual });
    }
    Element::from_coords(sig, &coords)
}

/// [`xi_inverse`] against [`spanning_states`].
pub fn xi_inverse_canonical(sig: &AlgebraSignature, values: &[Complex64]) -> Result<Element> {
    xi_inverse(sig, &spanning_states(sig), values)
}
