//! Polynomial symbols `Θ(z*, z)` over `d` modes.
//!
//! A [`PolySymbol`] is a finite sum of monomials `c · z*^β z^α` with complex
//! coefficients. The starred and unstarred variables are independent, so a symbol
//! can be evaluated off the real diagonal `z* = conj(z)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_index::{factorial, MultiIndex};

/// `z*^zs · z^z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub zs: MultiIndex,
    pub z: MultiIndex,
}

impl Monomial {
    pub fn new(zs: MultiIndex, z: MultiIndex) -> Self {
        debug_assert_eq!(zs.modes(), z.modes());
        Monomial { zs, z }
    }

    pub fn one(modes: usize) -> Self {
        Monomial::new(MultiIndex::zeros(modes), MultiIndex::zeros(modes))
    }

    pub fn modes(&self) -> usize {
        self.z.modes()
    }

    pub fn degree(&self) -> u32 {
        self.zs.degree() + self.z.degree()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial::new(self.zs.add(&other.zs), self.z.add(&other.z))
    }

    /// Swap the roles of `z` and `z*`.
    pub fn conjugate(&self) -> Self {
        Monomial::new(self.z.clone(), self.zs.clone())
    }

    pub fn eval(&self, z: &[Complex64], zstar: &[Complex64]) -> Complex64 {
        self.zs.power(zstar) * self.z.power(z)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.zs.cmp(&other.zs))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Which of the two independent variables a derivative acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    Z,
    ZStar,
}

/// Binary operation accepted by [`PolySymbol::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

/// Polynomial in `(z*, z)` kept in canonical form: graded-lex term order and no
/// stored zero coefficients.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySymbol {
    modes: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl PolySymbol {
    pub fn zero(modes: usize) -> Self {
        PolySymbol {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modes: usize, c: Complex64) -> Self {
        let mut p = Self::zero(modes);
        p.add_term(Monomial::one(modes), c);
        p
    }

    pub fn one(modes: usize) -> Self {
        Self::constant(modes, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(zs: MultiIndex, z: MultiIndex, c: Complex64) -> Result<Self> {
        if zs.modes() != z.modes() {
            return Err(Error::dims("monomial exponents", zs.modes(), z.modes()));
        }
        let mut p = Self::zero(z.modes());
        p.add_term(Monomial::new(zs, z), c);
        Ok(p)
    }

    /// `z*_mode^zs_pow · z_mode^z_pow` with unit coefficient.
    pub fn single_mode(modes: usize, mode: usize, zs_pow: u32, z_pow: u32) -> Self {
        let zs = MultiIndex::zeros(modes).with_entry(mode, zs_pow);
        let z = MultiIndex::zeros(modes).with_entry(mode, z_pow);
        let mut p = Self::zero(modes);
        p.add_term(Monomial::new(zs, z), Complex64::new(1.0, 0.0));
        p
    }

    /// Total number operator symbol `Σ_i z*_i z_i`.
    pub fn number(modes: usize) -> Self {
        let mut p = Self::zero(modes);
        for i in 0..modes {
            p.add_term(
                Monomial::new(MultiIndex::unit(modes, i), MultiIndex::unit(modes, i)),
                Complex64::new(1.0, 0.0),
            );
        }
        p
    }

    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut p = Self::zero(modes);
        for (m, c) in terms {
            if m.modes() != modes {
                return Err(Error::dims("term mode count", m.modes(), modes));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&Monomial::one(self.modes))
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Accumulate `c · m`, dropping the entry if it cancels to exactly zero.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        use std::collections::btree_map::Entry;
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_modes(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::dims("symbol mode count", self.modes, other.modes));
        }
        Ok(())
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => self.add(other),
            ArithOp::Mul => self.mul(other),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_truncated(other, u32::MAX)
    }

    /// Product with every term of total degree above `max_degree` discarded.
    pub fn mul_truncated(&self, other: &Self, max_degree: u32) -> Result<Self> {
        self.check_modes(other)?;
        let mut out = Self::zero(self.modes);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > max_degree {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.modes);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    /// Swap `z ↔ z*` and conjugate coefficients.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for (m, c) in &self.terms {
            out.add_term(m.conjugate(), c.conj());
        }
        out
    }

    /// Largest coefficient difference `max |P_m − Q_m|` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self
            .terms
            .iter()
            .map(|(m, c)| (c - other.coefficient(m)).norm());
        let b = other
            .terms
            .iter()
            .filter(|(m, _)| !self.terms.contains_key(*m))
            .map(|(_, c)| c.norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// `max |P − conj(P)|` coefficient-wise; zero exactly for real observables.
    pub fn reality_defect(&self) -> f64 {
        self.max_abs_diff(&self.conjugate())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_defect() <= tol
    }

    /// Drop coefficients with modulus `≤ tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.modes);
        for (m, c) in &self.terms {
            if c.norm() > tol {
                out.add_term(m.clone(), *c);
            }
        }
        out
    }

    /// `(constant term, remainder)`.
    pub fn split_constant(&self) -> (Complex64, Self) {
        let c = self.constant_term();
        let mut rest = self.clone();
        rest.terms.remove(&Monomial::one(self.modes));
        (c, rest)
    }

    pub fn derivative(&self, mode: usize, wrt: Variable) -> Result<Self> {
        if mode >= self.modes {
            return Err(Error::Dimension(format!(
                "derivative mode {mode} out of range for {} modes",
                self.modes
            )));
        }
        let mut out = Self::zero(self.modes);
        for (m, c) in &self.terms {
            let exps = match wrt {
                Variable::Z => &m.z,
                Variable::ZStar => &m.zs,
            };
            let k = exps.get(mode);
            if k == 0 {
                continue;
            }
            let lowered = exps.with_entry(mode, k - 1);
            let dm = match wrt {
                Variable::Z => Monomial::new(m.zs.clone(), lowered),
                Variable::ZStar => Monomial::new(lowered, m.z.clone()),
            };
            out.add_term(dm, c * k as f64);
        }
        Ok(out)
    }

    /// `Δ P = Σ_i ∂_{z*_i} ∂_{z_i} P`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for (m, c) in &self.terms {
            for i in 0..self.modes {
                let (b, a) = (m.zs.get(i), m.z.get(i));
                if a == 0 || b == 0 {
                    continue;
                }
                let dm = Monomial::new(m.zs.with_entry(i, b - 1), m.z.with_entry(i, a - 1));
                out.add_term(dm, c * (a as f64 * b as f64));
            }
        }
        out
    }

    /// `exp(s Δ) P = Σ_k s^k/k! Δ^k P`; the series terminates because `Δ` lowers degree.
    pub fn heat_transform(&self, s: f64) -> Self {
        let mut out = self.clone();
        let mut term = self.clone();
        let mut k = 0u32;
        loop {
            term = term.laplacian();
            if term.is_zero() {
                break;
            }
            k += 1;
            out = out
                .add(&term.scale(Complex64::new(s.powi(k as i32) / factorial(k), 0.0)))
                .expect("same mode count");
        }
        out
    }

    /// Evaluate at independent `z` and `z*` vectors.
    pub fn evaluate(&self, z: &[Complex64], zstar: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.modes {
            return Err(Error::dims("z length", z.len(), self.modes));
        }
        if zstar.len() != self.modes {
            return Err(Error::dims("z* length", zstar.len(), self.modes));
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(z, zstar)).sum())
    }

    /// Evaluate on the real diagonal `z* = conj(z)`.
    pub fn evaluate_diagonal(&self, z: &[Complex64]) -> Result<Complex64> {
        let zs: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
        self.evaluate(z, &zs)
    }

    /// Keep only terms supported on the first `n` modes, as a symbol on `n` modes.
    pub fn restrict_modes(&self, n: usize) -> Result<Self> {
        if n > self.modes {
            return Err(Error::Dimension(format!(
                "cannot restrict {} modes to {n}",
                self.modes
            )));
        }
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            if let (Some(zs), Some(z)) = (m.zs.restrict(n), m.z.restrict(n)) {
                out.add_term(Monomial::new(zs, z), *c);
            }
        }
        Ok(out)
    }

    /// Same polynomial viewed on `modes ≥ self.modes()` modes.
    pub fn embed(&self, modes: usize) -> Result<Self> {
        if modes < self.modes {
            return Err(Error::dims("embedding target", modes, self.modes));
        }
        let mut out = Self::zero(modes);
        for (m, c) in &self.terms {
            out.add_term(
                Monomial::new(m.zs.extend_to(modes), m.z.extend_to(modes)),
                *c,
            );
        }
        Ok(out)
    }
}

/// `∫ ζ^α conj(ζ)^β dμ(ζ)` for the normalized Gaussian `π^{-d} e^{-|ζ|²}`: `δ_{αβ} α!`.
pub fn gaussian_moment(alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    if alpha.modes() != beta.modes() {
        return Err(Error::dims(
            "moment multi-index length",
            alpha.modes(),
            beta.modes(),
        ));
    }
    Ok(if alpha == beta {
        alpha.factorial()
    } else {
        0.0
    })
}

impl fmt::Debug for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolySymbol[{}]{{", self.modes)?;
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}·zs{:?}z{:?}", m.zs, m.z)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn n1() -> PolySymbol {
        PolySymbol::single_mode(1, 0, 1, 1)
    }

    fn n1_sq() -> PolySymbol {
        PolySymbol::single_mode(1, 0, 2, 2)
    }

    #[test]
    fn add_merges_coefficients() {
        let p = n1().add(&PolySymbol::one(1)).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.constant_term(), c(1.0));
        assert_eq!(
            p.coefficient(&Monomial::new(vec![1].into(), vec![1].into())),
            c(1.0)
        );
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = n1().sub(&n1()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn monomial_products() {
        let zs = PolySymbol::single_mode(1, 0, 1, 0);
        let z = PolySymbol::single_mode(1, 0, 0, 1);
        assert_eq!(zs.mul(&z).unwrap(), n1());
        assert_eq!(n1().mul(&n1()).unwrap(), n1_sq());
    }

    #[test]
    fn brute_force_convolution_of_binomial_square() {
        // (z* + z)^2 = z*^2 + 2 z* z + z^2
        let p = PolySymbol::single_mode(1, 0, 1, 0)
            .add(&PolySymbol::single_mode(1, 0, 0, 1))
            .unwrap();
        let sq = p.mul(&p).unwrap();
        assert_eq!(
            sq.coefficient(&Monomial::new(vec![2].into(), vec![0].into())),
            c(1.0)
        );
        assert_eq!(
            sq.coefficient(&Monomial::new(vec![1].into(), vec![1].into())),
            c(2.0)
        );
        assert_eq!(
            sq.coefficient(&Monomial::new(vec![0].into(), vec![2].into())),
            c(1.0)
        );
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn mode_mismatch_is_dimension_error() {
        let err = n1().add(&PolySymbol::number(2)).unwrap_err();
        assert_eq!(err.code(), "E_DIMENSION");
        assert!(n1().mul(&PolySymbol::number(2)).is_err());
    }

    #[test]
    fn derivatives() {
        assert_eq!(
            n1().derivative(0, Variable::Z).unwrap(),
            PolySymbol::single_mode(1, 0, 1, 0)
        );
        assert_eq!(
            n1_sq().derivative(0, Variable::ZStar).unwrap(),
            PolySymbol::monomial(vec![1].into(), vec![2].into(), c(2.0)).unwrap()
        );
        // ∂_{z_2}(z_1* z_2) = z_1*
        let p = PolySymbol::monomial(vec![1, 0].into(), vec![0, 1].into(), c(1.0)).unwrap();
        assert_eq!(
            p.derivative(1, Variable::Z).unwrap(),
            PolySymbol::monomial(vec![1, 0].into(), vec![0, 0].into(), c(1.0)).unwrap()
        );
        assert!(p.derivative(2, Variable::Z).is_err());
    }

    #[test]
    fn heat_transform_examples() {
        assert_eq!(PolySymbol::one(1).heat_transform(0.7), PolySymbol::one(1));
        assert_eq!(
            n1().heat_transform(1.0),
            n1().add(&PolySymbol::one(1)).unwrap()
        );
        let expected = n1_sq()
            .add(&n1().scale(c(4.0)))
            .unwrap()
            .add(&PolySymbol::constant(1, c(2.0)))
            .unwrap();
        assert_eq!(n1_sq().heat_transform(1.0), expected);
    }

    #[test]
    fn gaussian_moment_examples() {
        let m = |a: Vec<u32>, b: Vec<u32>| gaussian_moment(&a.into(), &b.into()).unwrap();
        assert_eq!(m(vec![1], vec![1]), 1.0);
        assert_eq!(m(vec![2], vec![1]), 0.0);
        assert_eq!(m(vec![2, 1], vec![2, 1]), 2.0);
        assert!(gaussian_moment(&vec![1].into(), &vec![1, 0].into()).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let two = [c(2.0)];
        assert_eq!(n1().evaluate(&two, &[two[0].conj()]).unwrap(), c(4.0));
        let z = Complex64::new(1.0, 1.0);
        assert!((n1().evaluate_diagonal(&[z]).unwrap() - c(2.0)).norm() < 1e-15);
        assert_eq!(n1_sq().evaluate(&[c(0.5)], &[c(0.5)]).unwrap(), c(0.0625));
        assert!(n1().evaluate(&[c(1.0), c(1.0)], &[c(1.0)]).is_err());
    }

    #[test]
    fn conjugation_and_reality() {
        let hop = PolySymbol::monomial(vec![1, 0].into(), vec![0, 1].into(), c(1.0))
            .unwrap()
            .add(&PolySymbol::monomial(vec![0, 1].into(), vec![1, 0].into(), c(1.0)).unwrap())
            .unwrap();
        assert!(hop.is_real(0.0));
        let skew =
            PolySymbol::monomial(vec![1].into(), vec![0].into(), Complex64::new(0.0, 1.0)).unwrap();
        assert!(!skew.is_real(1e-12));
        assert_eq!(skew.conjugate().conjugate(), skew);
    }

    #[test]
    fn restrict_and_embed() {
        let p = PolySymbol::number(2)
            .add(&PolySymbol::monomial(vec![1, 0].into(), vec![0, 1].into(), c(3.0)).unwrap())
            .unwrap();
        assert_eq!(p.restrict_modes(1).unwrap(), n1());
        assert_eq!(n1().embed(2).unwrap().restrict_modes(1).unwrap(), n1());
    }
}
