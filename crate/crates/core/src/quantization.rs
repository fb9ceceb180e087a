//! The symbol ↔ operator dictionary on a truncated Fock space.
//!
//! * Normal (Wick) quantization places creations left of annihilations:
//!   `z*^β z^α ↦ (a†)^β a^α`.
//! * Anti-normal (Berezin) quantization is the Gaussian average
//!   `∫ dμ(ζ) Θ(conj ζ, ζ) |e_ζ⟩⟨e_ζ|`, computed from closed-form moments.
//!
//! Both produce the exact compression of the infinite-dimensional operator onto
//! `|α| ≤ M`: normal-ordered products never leave the truncated space in between,
//! and the anti-normal matrix elements are plain moment integrals.
//!
//! The two symbols are related by `normal = exp(+Δ) antinormal`, `Δ = Σ ∂_{z*_i}∂_{z_i}`.
//! The `+1` is fixed by the moment computation `antinormal(z*z) = diag(n + 1)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, Ladder};
use crate::symbol::{Monomial, PolySymbol};

/// Heat-transform parameter taking an anti-normal symbol to its normal symbol.
pub const NORMAL_FROM_ANTINORMAL: f64 = 1.0;

/// Dense matrix in the graded-lex ordered normalized Fock basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    basis: Arc<FockBasis>,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(basis: &Arc<FockBasis>) -> Self {
        OperatorMatrix {
            basis: basis.clone(),
            entries: DMatrix::zeros(basis.dim(), basis.dim()),
        }
    }

    pub fn identity(basis: &Arc<FockBasis>) -> Self {
        OperatorMatrix {
            basis: basis.clone(),
            entries: DMatrix::identity(basis.dim(), basis.dim()),
        }
    }

    pub fn from_entries(basis: &Arc<FockBasis>, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != basis.dim() || entries.ncols() != basis.dim() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, basis has dimension {}",
                entries.nrows(),
                entries.ncols(),
                basis.dim()
            )));
        }
        Ok(OperatorMatrix {
            basis: basis.clone(),
            entries,
        })
    }

    /// Truncated `a_i†` or `a_i`.
    pub fn ladder(basis: &Arc<FockBasis>, mode: usize, kind: Ladder) -> Result<Self> {
        if mode >= basis.modes() {
            return Err(Error::Dimension(format!(
                "ladder mode {mode} out of range for {} modes",
                basis.modes()
            )));
        }
        let mut m = Self::zeros(basis);
        for (col, alpha) in basis.states().iter().enumerate() {
            let n = alpha.get(mode);
            let (target, amp) = match kind {
                Ladder::Create => (alpha.with_entry(mode, n + 1), ((n + 1) as f64).sqrt()),
                Ladder::Annihilate if n > 0 => (alpha.with_entry(mode, n - 1), (n as f64).sqrt()),
                Ladder::Annihilate => continue,
            };
            if let Some(row) = basis.index_of(&target) {
                m.entries[(row, col)] = Complex64::new(amp, 0.0);
            }
        }
        Ok(m)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if !self.basis.same_shape(&other.basis) {
            return Err(Error::Dimension(format!(
                "operator shapes differ: (d={}, M={}) vs (d={}, M={})",
                self.basis.modes(),
                self.basis.cutoff(),
                other.basis.modes(),
                other.basis.cutoff()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            basis: self.basis.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            basis: self.basis.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(OperatorMatrix {
            basis: self.basis.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        OperatorMatrix {
            basis: self.basis.clone(),
            entries: self.entries.map(|x| x * s),
        }
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            basis: self.basis.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if !self.basis.same_shape(v.basis()) {
            return Err(Error::dims(
                "operator/vector dimension",
                self.dim(),
                v.basis().dim(),
            ));
        }
        let mut out = FockVector::zero(&self.basis);
        for (c, x) in v.coeffs().iter().enumerate() {
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for (r, y) in out.coeffs_mut().iter_mut().enumerate() {
                *y += self.entries[(r, c)] * x;
            }
        }
        Ok(out)
    }

    /// `⟨u, A v⟩`.
    pub fn matrix_element(&self, u: &FockVector, v: &FockVector) -> Result<Complex64> {
        u.inner_product(&self.apply(v)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }

    /// `max |A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()).map(|x| x * 0.5);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::NAN)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .entries
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Compression onto the sub-basis of states supported on the first `n` modes,
    /// expressed as an operator on the `n`-mode space with the same cutoff.
    pub fn compress_modes(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.basis.modes() {
            return Err(Error::Dimension(format!(
                "cannot compress {} modes to {n}",
                self.basis.modes()
            )));
        }
        let sub = FockBasis::new(n, self.basis.cutoff());
        let map: Vec<usize> = sub
            .states()
            .iter()
            .map(|a| {
                self.basis
                    .index_of(&a.extend_to(self.basis.modes()))
                    .expect("sub-basis embeds")
            })
            .collect();
        let entries = DMatrix::from_fn(sub.dim(), sub.dim(), |r, c| self.entries[(map[r], map[c])]);
        Ok(OperatorMatrix {
            basis: sub,
            entries,
        })
    }

    /// Restrict to the block `|γ|, |δ| ≤ cutoff` with `cutoff ≤ M`.
    pub fn compress_cutoff(&self, cutoff: u32) -> Result<Self> {
        if cutoff > self.basis.cutoff() {
            return Err(Error::dims(
                "compression cutoff",
                cutoff as usize,
                self.basis.cutoff() as usize,
            ));
        }
        let sub = FockBasis::new(self.basis.modes(), cutoff);
        // graded-lex order puts the lower-cutoff basis first
        let k = sub.dim();
        Ok(OperatorMatrix {
            basis: sub,
            entries: self.entries.view((0, 0), (k, k)).into_owned(),
        })
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn check_cutoff_modes(p: &PolySymbol) -> Result<()> {
    if p.modes() == 0 {
        return Err(Error::InvalidArgument(
            "symbol must have at least one mode".into(),
        ));
    }
    Ok(())
}

/// `√(n!/(n−k)!)` for `n ≥ k`.
fn sqrt_falling(n: u32, k: u32) -> f64 {
    ((n - k + 1)..=n).fold(1.0, |acc, j| acc * j as f64).sqrt()
}

/// Normal quantization `Σ c (a†)^β a^α` on the cutoff-`M` space.
pub fn normal_quantize(p: &PolySymbol, cutoff: u32) -> Result<OperatorMatrix> {
    check_cutoff_modes(p)?;
    let basis = FockBasis::new(p.modes(), cutoff);
    let mut out = OperatorMatrix::zeros(&basis);
    for (m, c) in p.terms() {
        for (col, delta) in basis.states().iter().enumerate() {
            let Some(lowered) = delta.checked_sub(&m.z) else {
                continue;
            };
            let gamma = lowered.add(&m.zs);
            let Some(row) = basis.index_of(&gamma) else {
                continue;
            };
            let mut amp = 1.0;
            for i in 0..basis.modes() {
                amp *= sqrt_falling(delta.get(i), m.z.get(i));
                amp *= sqrt_falling(gamma.get(i), m.zs.get(i));
            }
            out.entries[(row, col)] += c * amp;
        }
    }
    Ok(out)
}

/// Anti-normal (Berezin) quantization via exact Gaussian moments:
/// `⟨φ_γ|A|φ_δ⟩ = Σ c · (γ+α)! / √(γ! δ!)` over terms with `γ + α = δ + β`.
pub fn antinormal_quantize(p: &PolySymbol, cutoff: u32) -> Result<OperatorMatrix> {
    check_cutoff_modes(p)?;
    let basis = FockBasis::new(p.modes(), cutoff);
    let mut out = OperatorMatrix::zeros(&basis);
    for (m, c) in p.terms() {
        for (row, gamma) in basis.states().iter().enumerate() {
            let top = gamma.add(&m.z);
            let Some(delta) = top.checked_sub(&m.zs) else {
                continue;
            };
            let Some(col) = basis.index_of(&delta) else {
                continue;
            };
            let mut amp = 1.0;
            for i in 0..basis.modes() {
                let t = top.get(i);
                amp *= sqrt_falling(t, t - gamma.get(i)) * sqrt_falling(t, t - delta.get(i));
            }
            out.entries[(row, col)] += c * amp;
        }
    }
    Ok(out)
}

/// Extracted normal symbol together with what did not fit below the degree bound.
#[derive(Clone, Debug)]
pub struct NormalSymbol {
    pub symbol: PolySymbol,
    /// Largest coefficient modulus among extracted terms of degree above the bound.
    pub residual: f64,
}

/// Recover the normal symbol from the coherent matrix elements
/// `⟨e_z|A|e_w⟩ = Θ̃(z*, w) e^{z*·w}` by multiplying the Taylor coefficients with those
/// of `e^{−z*·w}`. Only coefficients with `|β|, |α| ≤ M` are determined by the
/// truncated matrix; terms of total degree `≤ max_degree` are returned and the rest
/// are reported through `residual`.
pub fn normal_symbol_of(a: &OperatorMatrix, max_degree: u32) -> Result<NormalSymbol> {
    let basis = a.basis();
    if max_degree > 2 * basis.cutoff() {
        return Err(Error::Dimension(format!(
            "degree bound {max_degree} exceeds what cutoff {} can resolve",
            basis.cutoff()
        )));
    }
    let d = basis.modes();
    let states = basis.states();
    // k_{γδ} = A_{γδ} / √(γ! δ!)
    let inv: Vec<f64> = states.iter().map(|g| 1.0 / g.factorial().sqrt()).collect();
    let mut symbol = PolySymbol::zero(d);
    let mut residual: f64 = 0.0;
    for (bi, beta) in states.iter().enumerate() {
        for (ai, alpha) in states.iter().enumerate() {
            let mut acc = a.get(bi, ai) * (inv[bi] * inv[ai]);
            // Σ_{0 < μ ≤ β∧α} k_{β−μ, α−μ} (−1)^{|μ|} / μ!
            for mu in states.iter().skip(1) {
                if mu.degree() > beta.degree().min(alpha.degree()) {
                    break;
                }
                let (Some(b), Some(al)) = (beta.checked_sub(mu), alpha.checked_sub(mu)) else {
                    continue;
                };
                let (r, c) = (
                    basis.index_of(&b).expect("in basis"),
                    basis.index_of(&al).expect("in basis"),
                );
                let sign = if mu.degree() % 2 == 0 { 1.0 } else { -1.0 };
                acc += a.get(r, c) * (inv[r] * inv[c] * sign / mu.factorial());
            }
            if beta.degree() + alpha.degree() <= max_degree {
                symbol.add_term(Monomial::new(beta.clone(), alpha.clone()), acc);
            } else {
                residual = residual.max(acc.norm());
            }
        }
    }
    Ok(NormalSymbol { symbol, residual })
}

/// Anti-normal symbol of the operator whose normal symbol is given.
pub fn antinormal_symbol_of(normal: &PolySymbol) -> PolySymbol {
    normal.heat_transform(-NORMAL_FROM_ANTINORMAL)
}

/// Normal symbol of the operator whose anti-normal symbol is given.
pub fn normal_symbol_from_antinormal(antinormal: &PolySymbol) -> PolySymbol {
    antinormal.heat_transform(NORMAL_FROM_ANTINORMAL)
}

/// Diagonal kernel `K(z, z*) = Θ(z, z*) e^{z*·z}` kept as the polynomial factor plus an
/// implicit exponential.
#[derive(Clone, Debug)]
pub struct DiagonalKernel {
    pub symbol: PolySymbol,
}

pub fn kernel_diag(p: &PolySymbol) -> DiagonalKernel {
    DiagonalKernel { symbol: p.clone() }
}

impl DiagonalKernel {
    pub fn evaluate(&self, z: &[Complex64], zstar: &[Complex64]) -> Result<Complex64> {
        let poly = self.symbol.evaluate(z, zstar)?;
        let phase: Complex64 = z.iter().zip(zstar).map(|(a, b)| a * b).sum();
        Ok(poly * phase.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use crate::quadrature::GaussianGrid;

    /// `(γ+α)!/√(γ!δ!)` straight from factorials.
    fn moment_entry(gamma: &MultiIndex, delta: &MultiIndex, m: &Monomial) -> f64 {
        if gamma.add(&m.z) != delta.add(&m.zs) {
            return 0.0;
        }
        gamma.add(&m.z).factorial() / (gamma.factorial() * delta.factorial()).sqrt()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(values.len(), values.len(), |r, k| {
            if r == k {
                c(values[r])
            } else {
                c(0.0)
            }
        })
    }

    #[test]
    fn identity_both_ways() {
        let one = PolySymbol::one(2);
        let b = FockBasis::new(2, 3);
        let id = OperatorMatrix::identity(&b);
        assert_eq!(
            normal_quantize(&one, 3).unwrap().max_abs_diff(&id).unwrap(),
            0.0
        );
        assert_eq!(
            antinormal_quantize(&one, 3)
                .unwrap()
                .max_abs_diff(&id)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn number_operator_orderings() {
        let n = PolySymbol::number(1);
        let normal = normal_quantize(&n, 6).unwrap();
        let anti = antinormal_quantize(&n, 6).unwrap();
        assert!(max_abs(&(normal.entries() - diag(&[0., 1., 2., 3., 4., 5., 6.]))) < 1e-14);
        assert!(max_abs(&(anti.entries() - diag(&[1., 2., 3., 4., 5., 6., 7.]))) < 1e-14);
        let diff = anti.sub(&normal).unwrap();
        assert!(
            diff.max_abs_diff(&OperatorMatrix::identity(normal.basis()))
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn quartic_antinormal_diagonal() {
        let p = PolySymbol::single_mode(1, 0, 2, 2);
        let a = antinormal_quantize(&p, 8).unwrap();
        for n in 0..=8usize {
            let expected = ((n + 1) * (n + 2)) as f64;
            assert!((a.get(n, n) - c(expected)).norm() < 1e-12 * expected);
        }
    }

    #[test]
    fn position_like_symbol_is_tridiagonal() {
        let p = PolySymbol::single_mode(1, 0, 0, 1)
            .add(&PolySymbol::single_mode(1, 0, 1, 0))
            .unwrap();
        let m = normal_quantize(&p, 2).unwrap();
        let s2 = 2f64.sqrt();
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.),
                c(1.),
                c(0.),
                c(1.),
                c(0.),
                c(s2),
                c(0.),
                c(s2),
                c(0.),
            ],
        );
        assert!(max_abs(&(m.entries() - expected)) < 1e-15);
    }

    #[test]
    fn normal_quantize_matches_ladder_products_with_headroom() {
        // z1*^2 z2 on two modes vs explicit a1† a1† a2, compared where no truncation leaks
        let p = PolySymbol::monomial(vec![2, 0].into(), vec![0, 1].into(), c(1.0)).unwrap();
        let b = FockBasis::new(2, 6);
        let ad = OperatorMatrix::ladder(&b, 0, Ladder::Create).unwrap();
        let a2 = OperatorMatrix::ladder(&b, 1, Ladder::Annihilate).unwrap();
        let prod = ad.mul(&ad).unwrap().mul(&a2).unwrap();
        let nq = normal_quantize(&p, 6).unwrap();
        assert!(nq.max_abs_diff(&prod).unwrap() < 1e-13);
    }

    #[test]
    fn antinormal_matches_moment_formula_and_quadrature() {
        let p = PolySymbol::monomial(
            vec![1, 2].into(),
            vec![2, 0].into(),
            Complex64::new(0.5, -1.0),
        )
        .unwrap();
        let a = antinormal_quantize(&p, 4).unwrap();
        let b = a.basis().clone();
        let (m, coeff) = p.terms().next().map(|(m, c)| (m.clone(), *c)).unwrap();
        for (r, g) in b.states().iter().enumerate() {
            for (k, dl) in b.states().iter().enumerate() {
                let expected = coeff * moment_entry(g, dl, &m);
                assert!((a.get(r, k) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
            }
        }
        // independent route: ∫ P(conj ζ, ζ) ζ^γ conj(ζ)^δ / √(γ!δ!) dμ by quadrature
        let grid = GaussianGrid::new(2, 10).unwrap();
        let g: MultiIndex = vec![0, 2].into();
        let dl = b
            .index_of(&g.add(&m.z).checked_sub(&m.zs).unwrap())
            .unwrap();
        let dl_state = b.state(dl).clone();
        let q = grid.integrate(|z| {
            let zs: Vec<Complex64> = z.iter().map(|x| x.conj()).collect();
            p.evaluate(z, &zs).unwrap() * g.power(z) * dl_state.power(&zs)
                / (g.factorial() * dl_state.factorial()).sqrt()
        });
        assert!((q - a.get(b.index_of(&g).unwrap(), dl)).norm() < 1e-12);
    }

    #[test]
    fn extraction_examples() {
        let b = FockBasis::new(1, 6);
        let id = normal_symbol_of(&OperatorMatrix::identity(&b), 2).unwrap();
        assert!(id.symbol.chop(1e-14).max_abs_diff(&PolySymbol::one(1)) < 1e-14);
        assert!(id.residual < 1e-14);

        let num = normal_quantize(&PolySymbol::number(1), 6).unwrap();
        let s = normal_symbol_of(&num, 2).unwrap();
        assert!(s.symbol.max_abs_diff(&PolySymbol::number(1)) < 1e-14);

        let anti = antinormal_quantize(&PolySymbol::number(1), 6).unwrap();
        let s = normal_symbol_of(&anti, 2).unwrap();
        let expected = PolySymbol::number(1).add(&PolySymbol::one(1)).unwrap();
        assert!(s.symbol.max_abs_diff(&expected) < 1e-13);
        assert!(s.residual < 1e-13);
    }

    #[test]
    fn extraction_reports_non_polynomial_residue() {
        // the projector onto the vacuum has normal symbol e^{-z*z}, not a polynomial
        let b = FockBasis::new(1, 6);
        let mut m = OperatorMatrix::zeros(&b);
        m.entries[(0, 0)] = c(1.0);
        let s = normal_symbol_of(&m, 2).unwrap();
        assert!(s.residual > 0.1);
        assert!(normal_symbol_of(&m, 13).is_err());
    }

    #[test]
    fn antinormal_symbol_examples() {
        assert_eq!(
            antinormal_symbol_of(&PolySymbol::one(1)),
            PolySymbol::one(1)
        );
        let n = PolySymbol::number(1);
        assert_eq!(
            antinormal_symbol_of(&n),
            n.sub(&PolySymbol::one(1)).unwrap()
        );
        let q = PolySymbol::single_mode(1, 0, 2, 2);
        let expected = q
            .sub(&n.scale(c(4.0)))
            .unwrap()
            .add(&PolySymbol::constant(1, c(2.0)))
            .unwrap();
        assert_eq!(antinormal_symbol_of(&q), expected);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_diag(&PolySymbol::one(1));
        let z = Complex64::new(0.3, 0.4);
        assert!((k.evaluate(&[z], &[z.conj()]).unwrap() - c(0.25f64.exp())).norm() < 1e-15);
        let p = PolySymbol::number(1)
            .add(&PolySymbol::constant(1, c(2.5)))
            .unwrap();
        let at0 = kernel_diag(&p).evaluate(&[c(0.0)], &[c(0.0)]).unwrap();
        assert_eq!(at0, c(2.5));
        let at1 = kernel_diag(&PolySymbol::number(1))
            .evaluate(&[c(1.0)], &[c(1.0)])
            .unwrap();
        assert!((at1 - c(std::f64::consts::E)).norm() < 1e-15);
    }

    #[test]
    fn compress_modes_picks_sub_basis() {
        let p = PolySymbol::number(2);
        let full = normal_quantize(&p, 3).unwrap();
        let small = full.compress_modes(1).unwrap();
        let direct = normal_quantize(&PolySymbol::number(1), 3).unwrap();
        assert_eq!(small.max_abs_diff(&direct).unwrap(), 0.0);
        assert!(full.compress_modes(3).is_err());
    }
}
