//! Truncated Bargmann–Fock space over `d` modes.
//!
//! States are holomorphic polynomials `Ψ(ζ*) = Σ_α c_α φ_α(ζ*)` in the normalized
//! basis `φ_α = ζ*^α / √(α!)`, restricted to total degree `|α| ≤ M`. Creation
//! `a_i†` multiplies by `ζ*_i`, annihilation `a_i` differentiates in `ζ*_i`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multi_index::{binomial, MultiIndex};
use crate::quadrature::GaussianGrid;

/// Graded-lex ordered list of multi-indices with `|α| ≤ cutoff`.
#[derive(Debug)]
pub struct FockBasis {
    modes: usize,
    cutoff: u32,
    states: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: u32) -> Arc<Self> {
        let states = MultiIndex::up_to_degree(modes, cutoff);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Arc::new(FockBasis {
            modes,
            cutoff,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[MultiIndex] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &MultiIndex {
        &self.states[i]
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.modes == other.modes && self.cutoff == other.cutoff
    }

    /// `φ_α(ζ*)` for every basis vector, i.e. `conj(ζ)^α/√α!` at `ζ* = conj(ζ)`.
    pub fn evaluate_basis(&self, zstar: &[Complex64]) -> Vec<Complex64> {
        self.states
            .iter()
            .map(|a| a.power(zstar) / a.factorial().sqrt())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    coeffs: Vec<Complex64>,
}

impl FockVector {
    pub fn zero(basis: &Arc<FockBasis>) -> Self {
        FockVector {
            basis: basis.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); basis.dim()],
        }
    }

    pub fn vacuum(basis: &Arc<FockBasis>) -> Self {
        let mut v = Self::zero(basis);
        v.coeffs[0] = Complex64::new(1.0, 0.0);
        v
    }

    /// `φ_α`; fails when `α` is outside the truncated basis.
    pub fn basis_state(basis: &Arc<FockBasis>, alpha: &MultiIndex) -> Result<Self> {
        let i = basis.index_of(alpha).ok_or_else(|| {
            Error::Dimension(format!(
                "{alpha} is not in the basis with {} modes and cutoff {}",
                basis.modes(),
                basis.cutoff()
            ))
        })?;
        let mut v = Self::zero(basis);
        v.coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_coeffs(basis: &Arc<FockBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::dims("coefficient count", coeffs.len(), basis.dim()));
        }
        Ok(FockVector {
            basis: basis.clone(),
            coeffs,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.basis
            .index_of(alpha)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if !self.basis.same_shape(&other.basis) {
            return Err(Error::Dimension(format!(
                "Fock shapes differ: (d={}, M={}) vs (d={}, M={})",
                self.basis.modes(),
                self.basis.cutoff(),
                other.basis.modes(),
                other.basis.cutoff()
            )));
        }
        Ok(())
    }

    /// `⟨self, other⟩ = Σ conj(ψ_α) φ_α`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Highest total degree carrying a nonzero coefficient; `None` for the zero vector.
    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, _)| self.basis.state(i).degree())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FockVector {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        FockVector {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// The holomorphic function `Ψ(ζ*) = Σ c_α ζ*^α / √(α!)` at a point.
    pub fn evaluate(&self, zstar: &[Complex64]) -> Result<Complex64> {
        if zstar.len() != self.basis.modes() {
            return Err(Error::dims(
                "evaluation point",
                zstar.len(),
                self.basis.modes(),
            ));
        }
        Ok(self
            .basis
            .evaluate_basis(zstar)
            .iter()
            .zip(&self.coeffs)
            .map(|(p, c)| p * c)
            .sum())
    }

    /// Re-express in a basis with the same modes and a different cutoff.
    /// Returns the squared mass of dropped components.
    pub fn recut(&self, cutoff: u32) -> (Self, f64) {
        let target = FockBasis::new(self.basis.modes(), cutoff);
        let mut out = FockVector::zero(&target);
        let mut lost = 0.0;
        for (alpha, c) in self.basis.states().iter().zip(&self.coeffs) {
            match target.index_of(alpha) {
                Some(j) => out.coeffs[j] = *c,
                None => lost += c.norm_sqr(),
            }
        }
        (out, lost)
    }
}

/// A truncated exponential functional `e_z(ζ*) = e^{ζ*·z}`.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub z: Vec<Complex64>,
    pub realized: FockVector,
    /// `Σ_{|α|>M} |z^α|²/α!`, the squared norm cut off by truncation.
    pub truncation_mass: f64,
}

impl CoherentState {
    pub fn new(basis: &Arc<FockBasis>, z: &[Complex64]) -> Result<Self> {
        if z.len() != basis.modes() {
            return Err(Error::dims("coherent-state label", z.len(), basis.modes()));
        }
        if z.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "coherent-state label must be finite".into(),
            ));
        }
        let coeffs = basis
            .states()
            .iter()
            .map(|a| a.power(z) / a.factorial().sqrt())
            .collect();
        let r = z.iter().map(|w| w.norm_sqr()).sum::<f64>();
        Ok(CoherentState {
            z: z.to_vec(),
            realized: FockVector::from_coeffs(basis, coeffs)?,
            truncation_mass: exp_tail(r, basis.cutoff()),
        })
    }
}

/// `coherent_state(z, M)` on the `d = z.len()` mode space.
pub fn coherent_state(z: &[Complex64], cutoff: u32) -> Result<CoherentState> {
    CoherentState::new(&FockBasis::new(z.len(), cutoff), z)
}

/// `Σ_{k>m} r^k/k!`, summed directly so tiny tails keep full relative precision.
pub fn exp_tail(r: f64, m: u32) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let mut term = (1..=m + 1).fold(1.0, |acc, k| acc * r / k as f64);
    let mut sum = 0.0;
    let mut k = m + 1;
    while term > 0.0 && term > sum * 1e-18 {
        sum += term;
        k += 1;
        term *= r / k as f64;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Apply `a_i†` or `a_i`. Components pushed past the cutoff by `a_i†` are dropped
/// and their squared mass returned alongside the result.
pub fn apply_ladder(mode: usize, kind: Ladder, psi: &FockVector) -> Result<(FockVector, f64)> {
    let basis = psi.basis();
    if mode >= basis.modes() {
        return Err(Error::Dimension(format!(
            "ladder mode {mode} out of range for {} modes",
            basis.modes()
        )));
    }
    let mut out = FockVector::zero(basis);
    let mut lost = 0.0;
    for (i, alpha) in basis.states().iter().enumerate() {
        let c = psi.coeffs[i];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let n = alpha.get(mode);
        match kind {
            Ladder::Create => {
                let v = c * ((n + 1) as f64).sqrt();
                match basis.index_of(&alpha.with_entry(mode, n + 1)) {
                    Some(j) => out.coeffs[j] += v,
                    None => lost += v.norm_sqr(),
                }
            }
            Ladder::Annihilate => {
                if n > 0 {
                    let j = basis
                        .index_of(&alpha.with_entry(mode, n - 1))
                        .expect("lower degree stays in basis");
                    out.coeffs[j] += c * (n as f64).sqrt();
                }
            }
        }
    }
    Ok((out, lost))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// `Ψ(ζ*) ↦ e^{ζ*·w} Ψ(ζ*)`
    MultExp,
    /// `Ψ(ζ*) ↦ Ψ(ζ* + w)`, with `w` playing the role of `z*`
    Translate,
}

/// Apply one of the exponential shift groups. Translation is exact on polynomials;
/// multiplication by `e^{ζ*·w}` is carried out with extra headroom and truncated back
/// to the cutoff, returning the squared mass that did not fit.
pub fn apply_shift(kind: Shift, w: &[Complex64], psi: &FockVector) -> Result<(FockVector, f64)> {
    let basis = psi.basis();
    if w.len() != basis.modes() {
        return Err(Error::dims("shift vector", w.len(), basis.modes()));
    }
    match kind {
        Shift::Translate => Ok((translate(w, psi), 0.0)),
        Shift::MultExp => Ok(mult_exp(w, psi)),
    }
}

fn translate(w: &[Complex64], psi: &FockVector) -> FockVector {
    let basis = psi.basis();
    let mut out = FockVector::zero(basis);
    for (alpha, c) in basis.states().iter().zip(psi.coeffs()) {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let norm_alpha = alpha.factorial().sqrt();
        // (ζ*+w)^α / √α! = Σ_{μ≤α} C(α,μ) w^{α−μ} √(μ!)/√(α!) φ_μ
        for (j, mu) in basis.states().iter().enumerate() {
            if mu.degree() > alpha.degree() {
                break;
            }
            let Some(rest) = alpha.checked_sub(mu) else {
                continue;
            };
            let binom: f64 = alpha
                .entries()
                .iter()
                .zip(mu.entries())
                .map(|(&a, &m)| binomial(a, m))
                .product();
            out.coeffs[j] += c * rest.power(w) * (binom * mu.factorial().sqrt() / norm_alpha);
        }
    }
    out
}

fn mult_exp(w: &[Complex64], psi: &FockVector) -> (FockVector, f64) {
    let basis = psi.basis();
    let r: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let headroom = {
        // smallest k with r^k/k! below 1e-34 relative to the largest term
        let mut k = 1u32;
        let mut term = r;
        let peak = r.exp();
        while term > 1e-34 * peak && k < 400 {
            k += 1;
            term *= r / k as f64;
        }
        k + 4
    };
    let (mut acc, _) = psi.recut(basis.cutoff() + headroom);
    let mut term = acc.clone();
    for k in 1..=(basis.cutoff() + headroom) {
        let mut next = FockVector::zero(acc.basis());
        for (i, wi) in w.iter().enumerate() {
            if wi.norm_sqr() == 0.0 {
                continue;
            }
            let (raised, _) = apply_ladder(i, Ladder::Create, &term).expect("mode in range");
            next = next.add(&raised.scale(*wi)).expect("same shape");
        }
        term = next.scale(Complex64::new(1.0 / k as f64, 0.0));
        if term.norm_sqr() == 0.0 {
            break;
        }
        acc = acc.add(&term).expect("same shape");
    }
    acc.recut(basis.cutoff())
}

/// `max |∫ dμ(ζ) |e_ζ⟩⟨e_ζ| − I|` over the truncated basis, by tensor Gauss–Hermite
/// quadrature with `nodes` points per real axis.
pub fn resolution_of_identity_residual(modes: usize, cutoff: u32, nodes: usize) -> Result<f64> {
    let basis = FockBasis::new(modes, cutoff);
    let grid = GaussianGrid::new(modes, nodes)?;
    let dim = basis.dim();
    let gram = grid.accumulate(
        || vec![Complex64::new(0.0, 0.0); dim * dim],
        |acc, zeta, w| {
            // ⟨φ_γ|e_ζ⟩ = ζ^γ/√γ!
            let v: Vec<Complex64> = basis
                .states()
                .iter()
                .map(|g| g.power(zeta) / g.factorial().sqrt())
                .collect();
            for (r, vr) in v.iter().enumerate() {
                let vr = vr * w;
                for (c, vc) in v.iter().enumerate() {
                    acc[r * dim + c] += vr * vc.conj();
                }
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let mut residual: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let target = if r == c { 1.0 } else { 0.0 };
            residual = residual.max((gram[r * dim + c] - target).norm());
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::factorial;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn orthonormal_basis() {
        let b = FockBasis::new(1, 5);
        let p1 = FockVector::basis_state(&b, &vec![1].into()).unwrap();
        let p2 = FockVector::basis_state(&b, &vec![2].into()).unwrap();
        assert_eq!(p1.inner_product(&p1).unwrap(), c(1.0));
        assert_eq!(p2.inner_product(&p1).unwrap(), c(0.0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = FockVector::vacuum(&FockBasis::new(1, 3));
        let b = FockVector::vacuum(&FockBasis::new(1, 4));
        assert_eq!(a.inner_product(&b).unwrap_err().code(), "E_DIMENSION");
        assert!(FockVector::basis_state(&FockBasis::new(1, 3), &vec![4].into()).is_err());
    }

    #[test]
    fn coherent_overlap_is_exponential() {
        let b = FockBasis::new(1, 40);
        let ez = CoherentState::new(&b, &[c(0.3)]).unwrap();
        let ew = CoherentState::new(&b, &[c(0.5)]).unwrap();
        let got = ez.realized.inner_product(&ew.realized).unwrap();
        assert!((got - c((0.3f64 * 0.5).exp())).norm() < 1e-12);
    }

    #[test]
    fn coherent_state_examples() {
        let vac = coherent_state(&[c(0.0)], 6).unwrap();
        assert_eq!(vac.truncation_mass, 0.0);
        assert_eq!(vac.realized.coeffs()[0], c(1.0));
        assert!(vac.realized.coeffs()[1..].iter().all(|x| x.norm() == 0.0));

        let one = coherent_state(&[c(1.0)], 10).unwrap();
        for (n, x) in one.realized.coeffs().iter().enumerate() {
            assert!((x - c(1.0 / factorial(n as u32).sqrt())).norm() < 1e-15);
        }
        let expected_tail = std::f64::consts::E - (0..=10).map(|k| 1.0 / factorial(k)).sum::<f64>();
        assert!((one.truncation_mass - expected_tail).abs() < 1e-15);
        assert!(one.realized.norm_sqr() <= 1f64.exp());
    }

    #[test]
    fn ladder_examples() {
        let b = FockBasis::new(1, 4);
        let p0 = FockVector::vacuum(&b);
        let p1 = FockVector::basis_state(&b, &vec![1].into()).unwrap();
        let (down, lost) = apply_ladder(0, Ladder::Annihilate, &p1).unwrap();
        assert_eq!(lost, 0.0);
        assert_eq!(down.max_abs_diff(&p0).unwrap(), 0.0);
        let (up, lost) = apply_ladder(0, Ladder::Create, &p0).unwrap();
        assert_eq!(lost, 0.0);
        assert_eq!(up.max_abs_diff(&p1).unwrap(), 0.0);

        let top = FockVector::basis_state(&b, &vec![4].into()).unwrap();
        let (gone, lost) = apply_ladder(0, Ladder::Create, &top).unwrap();
        assert_eq!(gone.norm_sqr(), 0.0);
        assert!((lost - 5.0).abs() < 1e-14);
        assert!(apply_ladder(1, Ladder::Create, &top).is_err());
    }

    #[test]
    fn commutator_on_number_states() {
        let b = FockBasis::new(1, 8);
        for n in 0..8u32 {
            let pn = FockVector::basis_state(&b, &vec![n].into()).unwrap();
            let (ad, _) = apply_ladder(0, Ladder::Create, &pn).unwrap();
            let (a_ad, _) = apply_ladder(0, Ladder::Annihilate, &ad).unwrap();
            let (a, _) = apply_ladder(0, Ladder::Annihilate, &pn).unwrap();
            let (ad_a, _) = apply_ladder(0, Ladder::Create, &a).unwrap();
            let comm = a_ad.add(&ad_a.scale(c(-1.0))).unwrap();
            assert!(comm.max_abs_diff(&pn).unwrap() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn translate_examples() {
        let b = FockBasis::new(1, 6);
        let p1 = FockVector::basis_state(&b, &vec![1].into()).unwrap();
        let (same, _) = apply_shift(Shift::Translate, &[c(0.0)], &p1).unwrap();
        assert_eq!(same.max_abs_diff(&p1).unwrap(), 0.0);
        let w = Complex64::new(0.3, -0.7);
        let (moved, lost) = apply_shift(Shift::Translate, &[w], &p1).unwrap();
        assert_eq!(lost, 0.0);
        let expected = p1.add(&FockVector::vacuum(&b).scale(w)).unwrap();
        assert!(moved.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn translate_matches_pointwise_shift() {
        let b = FockBasis::new(2, 5);
        let coeffs = (0..b.dim())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let psi = FockVector::from_coeffs(&b, coeffs).unwrap();
        let w = [Complex64::new(0.2, 0.1), Complex64::new(-0.4, 0.3)];
        let (moved, _) = apply_shift(Shift::Translate, &w, &psi).unwrap();
        let x = [Complex64::new(0.5, -0.2), Complex64::new(0.1, 0.9)];
        let shifted = [x[0] + w[0], x[1] + w[1]];
        let lhs = moved.evaluate(&x).unwrap();
        let rhs = psi.evaluate(&shifted).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn mult_exp_of_vacuum_is_coherent_state() {
        let b = FockBasis::new(1, 12);
        let z = Complex64::new(0.8, 0.3);
        let (v, lost) = apply_shift(Shift::MultExp, &[z], &FockVector::vacuum(&b)).unwrap();
        let coh = CoherentState::new(&b, &[z]).unwrap();
        assert!(v.max_abs_diff(&coh.realized).unwrap() < 1e-14);
        assert!((lost - coh.truncation_mass).abs() < 1e-15);
    }

    #[test]
    fn weyl_group_commutator_on_vacuum() {
        let b = FockBasis::new(1, 24);
        let z = Complex64::new(0.4, -0.3);
        let vac = FockVector::vacuum(&b);
        // T(z*) M(z) vs M(z) T(z*)
        let (m, _) = apply_shift(Shift::MultExp, &[z], &vac).unwrap();
        let (tm, _) = apply_shift(Shift::Translate, &[z.conj()], &m).unwrap();
        let (t, _) = apply_shift(Shift::Translate, &[z.conj()], &vac).unwrap();
        let (mt, _) = apply_shift(Shift::MultExp, &[z], &t).unwrap();
        let expected = mt.scale(c(z.norm_sqr().exp()));
        assert!(tm.max_abs_diff(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn resolution_of_identity_examples() {
        assert!(resolution_of_identity_residual(1, 0, 4).unwrap() <= 1e-12);
        assert!(resolution_of_identity_residual(1, 8, 24).unwrap() <= 1e-10);
        assert!(resolution_of_identity_residual(2, 4, 16).unwrap() <= 1e-10);
        // too few nodes cannot integrate the top-degree products exactly
        assert!(resolution_of_identity_residual(1, 8, 3).unwrap() > 1e-3);
    }

    #[test]
    fn exp_tail_matches_complement() {
        let r = 2.5f64;
        let head: f64 = (0..=6).map(|k| r.powi(k) / factorial(k as u32)).sum();
        assert!((exp_tail(r, 6) - (r.exp() - head)).abs() < 1e-13);
        assert_eq!(exp_tail(0.0, 3), 0.0);
    }
}
