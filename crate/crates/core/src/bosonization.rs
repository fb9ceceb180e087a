//! Finite bosonization of fermionic states.
//!
//! An antisymmetric amplitude on `n`-tuples of modes is fixed by its values on
//! strictly increasing tuples. Sending the increasing tuple `S` to the hard-core
//! occupation vector `α(S)` (`α_i = 1` iff `i ∈ S`) and symmetrizing gives a unitary
//! onto the span of Fock states with all occupations `≤ 1`.
//!
//! The Grassmann algebra on `d` generators is kept alongside as the algebraic side:
//! its left derivatives and left multiplications realize the canonical
//! anticommutation relations exactly, which lets [`super_ccr_residual`] measure how
//! far the conjugated bosonic ladder operators are from doing the same.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, Ladder};
use crate::multi_index::MultiIndex;
use crate::quantization::{max_abs, OperatorMatrix};

/// Subset of `{0, …, d−1}` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSet(u64);

pub const MAX_FERMION_MODES: usize = 64;

impl ModeSet {
    pub const EMPTY: ModeSet = ModeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ModeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Canonical set for a strictly increasing tuple.
    pub fn from_sorted(tuple: &[usize]) -> Result<Self> {
        if tuple.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "tuple {tuple:?} is not strictly increasing"
            )));
        }
        Self::from_tuple(tuple).map(|(s, _)| s)
    }

    /// Canonical set for an arbitrary tuple together with the sign of the sorting
    /// permutation; `None` when an index repeats (the antisymmetric value vanishes).
    pub fn from_tuple(tuple: &[usize]) -> Result<(Self, f64)> {
        let mut bits = 0u64;
        for &i in tuple {
            if i >= MAX_FERMION_MODES {
                return Err(Error::Dimension(format!(
                    "mode {i} exceeds {MAX_FERMION_MODES}"
                )));
            }
            if bits & (1 << i) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "repeated mode {i} in {tuple:?}"
                )));
            }
            bits |= 1 << i;
        }
        let inversions = (0..tuple.len())
            .flat_map(|a| (a + 1..tuple.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| tuple[a] > tuple[b])
            .count();
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Ok((ModeSet(bits), sign))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(self, i: usize) -> Self {
        ModeSet(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> Self {
        ModeSet(self.0 & !(1 << i))
    }

    /// Number of members strictly below `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }

    /// Increasing tuple of members.
    pub fn members(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    pub fn max_mode(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Hard-core occupation vector `α(S)` on `modes` modes.
    pub fn occupation(self, modes: usize) -> MultiIndex {
        MultiIndex::new((0..modes).map(|i| self.contains(i) as u32).collect())
    }

    /// Inverse of [`ModeSet::occupation`]; fails on any occupation above one.
    pub fn from_occupation(alpha: &MultiIndex) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &a) in alpha.entries().iter().enumerate() {
            match a {
                0 => {}
                1 => bits |= 1 << i,
                _ => return Err(Error::NotHardCore(alpha.clone())),
            }
        }
        Ok(ModeSet(bits))
    }
}

impl Ord for ModeSet {
    /// Grade first, then lexicographic on the increasing tuples.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(&other.members()))
    }
}

impl PartialOrd for ModeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.members())
    }
}

/// All subsets of `{0..modes}` in grade-then-lex order.
pub fn subset_basis(modes: usize) -> Vec<ModeSet> {
    assert!(
        modes < MAX_FERMION_MODES,
        "subset basis needs fewer than 64 modes"
    );
    let mut all: Vec<ModeSet> = (0..1u64 << modes).map(ModeSet).collect();
    all.sort();
    all
}

/// Fermionic state with coefficients on canonical (increasing) tuples, any grades.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionVector {
    modes: usize,
    coeffs: BTreeMap<ModeSet, Complex64>,
}

impl FermionVector {
    pub fn zero(modes: usize) -> Result<Self> {
        if modes > MAX_FERMION_MODES {
            return Err(Error::Dimension(format!(
                "{modes} fermion modes exceeds {MAX_FERMION_MODES}"
            )));
        }
        Ok(FermionVector {
            modes,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn basis_state(modes: usize, set: ModeSet) -> Result<Self> {
        let mut v = Self::zero(modes)?;
        v.add(set, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&ModeSet, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, set: ModeSet) -> Complex64 {
        self.coeffs.get(&set).copied().unwrap_or_default()
    }

    fn check_set(&self, set: ModeSet) -> Result<()> {
        if let Some(m) = set.max_mode() {
            if m >= self.modes {
                return Err(Error::Dimension(format!(
                    "mode {m} out of range for {} modes",
                    self.modes
                )));
            }
        }
        Ok(())
    }

    /// Accumulate `c` on the canonical tuple `set`.
    pub fn add(&mut self, set: ModeSet, c: Complex64) -> Result<()> {
        self.check_set(set)?;
        let e = self.coeffs.entry(set).or_default();
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&set);
        }
        Ok(())
    }

    /// Record the antisymmetric amplitude `f(tuple) = value` for an arbitrary ordering
    /// of distinct modes; stored on the sorted tuple with the permutation sign.
    pub fn set_tuple(&mut self, tuple: &[usize], value: Complex64) -> Result<()> {
        let (set, sign) = ModeSet::from_tuple(tuple)?;
        self.check_set(set)?;
        if value == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&set);
        } else {
            self.coeffs.insert(set, value * sign);
        }
        Ok(())
    }

    /// Antisymmetric amplitude at an arbitrary tuple; zero when an index repeats.
    pub fn value_at(&self, tuple: &[usize]) -> Complex64 {
        match ModeSet::from_tuple(tuple) {
            Ok((set, sign)) => self.coeff(set) * sign,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::dims("fermion mode count", self.modes, other.modes));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(s, c)| c.conj() * other.coeff(*s))
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_grade(&self) -> usize {
        self.coeffs.keys().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self
            .coeffs
            .iter()
            .map(|(s, c)| (c - other.coeff(*s)).norm());
        let b = other
            .coeffs
            .iter()
            .filter(|(s, _)| !self.coeffs.contains_key(s))
            .map(|(_, c)| c.norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Dense coefficients in [`subset_basis`] order.
    pub fn to_dense(&self) -> Vec<Complex64> {
        subset_basis(self.modes)
            .into_iter()
            .map(|s| self.coeff(s))
            .collect()
    }

    pub fn from_dense(modes: usize, dense: &[Complex64]) -> Result<Self> {
        let basis = subset_basis(modes);
        if dense.len() != basis.len() {
            return Err(Error::dims(
                "dense fermion vector",
                dense.len(),
                basis.len(),
            ));
        }
        let mut v = Self::zero(modes)?;
        for (s, c) in basis.into_iter().zip(dense) {
            v.add(s, *c)?;
        }
        Ok(v)
    }
}

/// Map a fermionic state to the hard-core bosonic subspace of the cutoff-`M` Fock
/// space. Isometric by construction.
pub fn bosonize(f: &FermionVector, cutoff: u32) -> Result<FockVector> {
    let grade = f.max_grade();
    if (cutoff as usize) < grade {
        return Err(Error::Dimension(format!(
            "cutoff {cutoff} cannot hold grade-{grade} components"
        )));
    }
    let basis = FockBasis::new(f.modes(), cutoff);
    let mut out = FockVector::zero(&basis);
    for (s, c) in f.coeffs() {
        let i = basis
            .index_of(&s.occupation(f.modes()))
            .expect("grade fits below cutoff");
        out.coeffs_mut()[i] = *c;
    }
    Ok(out)
}

/// Inverse of [`bosonize`] on the hard-core subspace.
pub fn debosonize(psi: &FockVector) -> Result<FermionVector> {
    let basis = psi.basis();
    let mut out = FermionVector::zero(basis.modes())?;
    for (alpha, c) in basis.states().iter().zip(psi.coeffs()) {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        out.add(ModeSet::from_occupation(alpha)?, *c)?;
    }
    Ok(out)
}

pub fn is_hard_core(alpha: &MultiIndex) -> bool {
    alpha.entries().iter().all(|&a| a <= 1)
}

/// Span of the Fock states with every occupation `≤ 1`; needs `M ≥ d`.
#[derive(Clone, Debug)]
pub struct HardCoreSubspace {
    basis: Arc<FockBasis>,
    indices: Vec<usize>,
}

impl HardCoreSubspace {
    pub fn new(basis: &Arc<FockBasis>) -> Result<Self> {
        let d = basis.modes();
        if (basis.cutoff() as usize) < d || d >= MAX_FERMION_MODES {
            return Err(Error::Dimension(format!(
                "hard-core subspace of {d} modes needs cutoff ≥ {d}, got {}",
                basis.cutoff()
            )));
        }
        let indices = subset_basis(d)
            .into_iter()
            .map(|s| {
                basis
                    .index_of(&s.occupation(d))
                    .expect("hard-core state in basis")
            })
            .collect();
        Ok(HardCoreSubspace {
            basis: basis.clone(),
            indices,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// `2^d`.
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Fock-basis positions in [`subset_basis`] order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, psi: &FockVector) -> bool {
        self.basis.same_shape(psi.basis())
            && psi
                .basis()
                .states()
                .iter()
                .zip(psi.coeffs())
                .all(|(a, c)| c.norm_sqr() == 0.0 || is_hard_core(a))
    }

    /// Orthogonal projection `P_hc ψ`.
    pub fn project(&self, psi: &FockVector) -> Result<FockVector> {
        if !self.basis.same_shape(psi.basis()) {
            return Err(Error::dims(
                "hard-core projection",
                psi.basis().dim(),
                self.basis.dim(),
            ));
        }
        let mut out = FockVector::zero(&self.basis);
        for &i in &self.indices {
            out.coeffs_mut()[i] = psi.coeffs()[i];
        }
        Ok(out)
    }
}

/// Dense operator on the fermionic subset basis.
#[derive(Clone, Debug)]
pub struct FermionMatrix {
    modes: usize,
    basis: Vec<ModeSet>,
    entries: DMatrix<Complex64>,
}

impl FermionMatrix {
    fn from_fn(modes: usize, f: impl Fn(ModeSet, ModeSet) -> Complex64) -> Self {
        let basis = subset_basis(modes);
        let entries = DMatrix::from_fn(basis.len(), basis.len(), |r, c| f(basis[r], basis[c]));
        FermionMatrix {
            modes,
            basis,
            entries,
        }
    }

    pub fn identity(modes: usize) -> Self {
        Self::from_fn(modes, |r, c| {
            Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// `diag(|S|)`.
    pub fn number(modes: usize) -> Self {
        Self::from_fn(modes, |r, c| {
            Complex64::new(if r == c { r.len() as f64 } else { 0.0 }, 0.0)
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn basis(&self) -> &[ModeSet] {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        FermionMatrix {
            modes: self.modes,
            basis: self.basis.clone(),
            entries: &self.entries * &other.entries,
        }
    }

    pub fn adjoint(&self) -> Self {
        FermionMatrix {
            modes: self.modes,
            basis: self.basis.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        FermionMatrix {
            modes: self.modes,
            basis: self.basis.clone(),
            entries: &self.entries * &other.entries + &other.entries * &self.entries,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }

    pub fn apply(&self, f: &FermionVector) -> Result<FermionVector> {
        if f.modes() != self.modes {
            return Err(Error::dims("fermion mode count", f.modes(), self.modes));
        }
        let dense = nalgebra::DVector::from_vec(f.to_dense());
        let out = &self.entries * dense;
        FermionVector::from_dense(self.modes, out.as_slice())
    }

    /// `max |(self − target)_{rc}|` over columns whose basis set has grade `≤ max_grade`.
    fn residual_on_grades(&self, target: &Self, max_grade: usize) -> f64 {
        let diff = &self.entries - &target.entries;
        let mut r: f64 = 0.0;
        for (c, s) in self.basis.iter().enumerate() {
            if s.len() > max_grade {
                continue;
            }
            for row in 0..diff.nrows() {
                r = r.max(diff[(row, c)].norm());
            }
        }
        r
    }
}

/// `ϖ† · P_hc A P_hc · ϖ` in the subset basis, where `P_hc` compresses to the
/// hard-core subspace.
pub fn conjugate_operator(a: &OperatorMatrix) -> Result<FermionMatrix> {
    let hc = HardCoreSubspace::new(a.basis())?;
    let idx = hc.indices();
    let d = a.basis().modes();
    let sets = subset_basis(d);
    let entries = DMatrix::from_fn(sets.len(), sets.len(), |r, c| a.get(idx[r], idx[c]));
    Ok(FermionMatrix {
        modes: d,
        basis: sets,
        entries,
    })
}

/// Element of the exterior algebra on `d` generators.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoly {
    modes: usize,
    coeffs: BTreeMap<ModeSet, Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl GrassmannPoly {
    pub fn zero(modes: usize) -> Self {
        assert!(modes <= MAX_FERMION_MODES);
        GrassmannPoly {
            modes,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(modes: usize) -> Self {
        Self::monomial(modes, ModeSet::EMPTY, Complex64::new(1.0, 0.0))
    }

    pub fn generator(modes: usize, i: usize) -> Self {
        Self::monomial(modes, ModeSet::EMPTY.insert(i), Complex64::new(1.0, 0.0))
    }

    /// `c · ξ_S` with `S` read as an increasing product.
    pub fn monomial(modes: usize, set: ModeSet, c: Complex64) -> Self {
        let mut g = Self::zero(modes);
        g.add_term(set, c);
        g
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeSet, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, set: ModeSet) -> Complex64 {
        self.coeffs.get(&set).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, set: ModeSet, c: Complex64) {
        let e = self.coeffs.entry(set).or_default();
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&set);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_term(*s, *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.modes);
        for (k, c) in &self.coeffs {
            out.add_term(*k, c * s);
        }
        out
    }

    /// Exterior product with the reordering sign `(−1)^{#{(s,t): s∈S, t∈T, s>t}}`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.modes.max(other.modes));
        for (s, a) in &self.coeffs {
            for (t, b) in &other.coeffs {
                if s.bits() & t.bits() != 0 {
                    continue;
                }
                let swaps: usize = t
                    .members()
                    .iter()
                    .map(|&j| s.len() - s.count_below(j))
                    .sum();
                let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
                out.add_term(ModeSet(s.bits() | t.bits()), a * b * sign);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self
            .coeffs
            .iter()
            .map(|(s, c)| (c - other.coeff(*s)).norm());
        let b = other
            .coeffs
            .iter()
            .filter(|(s, _)| !self.coeffs.contains_key(s))
            .map(|(_, c)| c.norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Left or right derivative with respect to generator `i`.
    pub fn derivative(&self, i: usize, side: Side) -> Result<Self> {
        if i >= self.modes {
            return Err(Error::Dimension(format!(
                "generator {i} out of range for {} generators",
                self.modes
            )));
        }
        let mut out = Self::zero(self.modes);
        for (s, c) in &self.coeffs {
            if !s.contains(i) {
                continue;
            }
            let before = s.count_below(i);
            let moves = match side {
                Side::Left => before,
                Side::Right => s.len() - 1 - before,
            };
            let sign = if moves % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(s.remove(i), c * sign);
        }
        Ok(out)
    }
}

/// `grassmann_derivative(g, i, side)`.
pub fn grassmann_derivative(g: &GrassmannPoly, i: usize, side: Side) -> Result<GrassmannPoly> {
    g.derivative(i, side)
}

/// Fermionic annihilators realized two ways on the `2^d` subset basis.
#[derive(Clone, Debug)]
pub struct CarRealizations {
    /// Left Grassmann derivatives `∂_i`; creators are left multiplications `ξ_i ·`.
    pub grassmann: Vec<FermionMatrix>,
    /// `ϖ† a_i ϖ`: the bosonic annihilator compressed to the hard-core subspace.
    pub bosonized: Vec<FermionMatrix>,
}

impl CarRealizations {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes >= MAX_FERMION_MODES {
            return Err(Error::InvalidArgument(format!(
                "CAR realizations need 1..{MAX_FERMION_MODES} modes, got {modes}"
            )));
        }
        let grassmann = (0..modes)
            .map(|i| {
                FermionMatrix::from_fn(modes, |r, c| {
                    let g = GrassmannPoly::monomial(modes, c, Complex64::new(1.0, 0.0));
                    g.derivative(i, Side::Left).expect("in range").coeff(r)
                })
            })
            .collect();
        let basis = FockBasis::new(modes, modes as u32);
        let bosonized = (0..modes)
            .map(|i| {
                let a = OperatorMatrix::ladder(&basis, i, Ladder::Annihilate)?;
                conjugate_operator(&a)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CarRealizations {
            grassmann,
            bosonized,
        })
    }
}

/// Worst-case `‖{c_i, c_j†} − δ_ij I‖_max` over `i, j` for both realizations, tested on
/// input grades `≤ max_grade`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarResidual {
    pub grassmann: f64,
    pub bosonized: f64,
}

pub fn super_ccr_residual(modes: usize, max_grade: usize) -> Result<CarResidual> {
    let r = CarRealizations::new(modes)?;
    let id = FermionMatrix::identity(modes);
    let zero = id.mul(&FermionMatrix::from_fn(modes, |_, _| {
        Complex64::new(0.0, 0.0)
    }));
    let worst = |ops: &[FermionMatrix]| {
        let mut worst: f64 = 0.0;
        for (i, ci) in ops.iter().enumerate() {
            for (j, cj) in ops.iter().enumerate() {
                let ac = ci.anticommutator(&cj.adjoint());
                let target = if i == j { &id } else { &zero };
                worst = worst.max(ac.residual_on_grades(target, max_grade));
            }
        }
        worst
    };
    Ok(CarResidual {
        grassmann: worst(&r.grassmann),
        bosonized: worst(&r.bosonized),
    })
}
