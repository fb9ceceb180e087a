#![allow(dead_code)]

use std::sync::Arc;

use bargmann_core::{FockBasis, FockVector, Monomial, MultiIndex, PolySymbol};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn exponents(modes: usize, max_each: u32) -> impl Strategy<Value = MultiIndex> {
    proptest::collection::vec(0..=max_each, modes).prop_map(MultiIndex::new)
}

/// Random symbol on `modes` modes with per-variable exponents `≤ max_each`.
pub fn symbol(modes: usize, max_each: u32, max_terms: usize) -> impl Strategy<Value = PolySymbol> {
    proptest::collection::vec(
        (
            exponents(modes, max_each),
            exponents(modes, max_each),
            complex(),
        ),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        PolySymbol::from_terms(
            modes,
            terms
                .into_iter()
                .map(|(zs, z, c)| (Monomial::new(zs, z), c)),
        )
        .unwrap()
    })
}

/// Random vector supported on basis states of degree `≤ max_degree`.
pub fn vector(basis: Arc<FockBasis>, max_degree: u32) -> impl Strategy<Value = FockVector> {
    let dim = basis.dim();
    proptest::collection::vec(complex(), dim).prop_map(move |mut coeffs| {
        for (c, a) in coeffs.iter_mut().zip(basis.states()) {
            if a.degree() > max_degree {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        FockVector::from_coeffs(&basis, coeffs).unwrap()
    })
}
