mod common;

use bargmann_core::quadrature::GaussianGrid;
use bargmann_core::quantization::{antinormal_quantize, normal_quantize, normal_symbol_of};
use bargmann_core::symbol::gaussian_moment;
use bargmann_core::{MultiIndex, PolySymbol};
use num_complex::Complex64;
use proptest::prelude::*;

fn scale(p: &PolySymbol) -> f64 {
    p.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heat_transform_is_invertible(p in common::symbol(2, 3, 6), s in -2.0..2.0f64) {
        let back = p.heat_transform(s).heat_transform(-s);
        prop_assert!(back.max_abs_diff(&p) <= 1e-10 * scale(&p.heat_transform(s)));
    }

    #[test]
    fn heat_transform_is_a_semigroup(p in common::symbol(2, 3, 6), s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let lhs = p.heat_transform(s).heat_transform(t);
        let rhs = p.heat_transform(s + t);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * scale(&rhs));
    }

    #[test]
    fn conjugation_distributes_over_products(p in common::symbol(2, 2, 4), q in common::symbol(2, 2, 4)) {
        let lhs = p.mul(&q).unwrap().conjugate();
        let rhs = p.conjugate().mul(&q.conjugate()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14 * scale(&lhs));
        prop_assert_eq!(p.conjugate().conjugate(), p);
    }

    #[test]
    fn normal_symbol_of_antinormal_is_forward_heat(p in common::symbol(2, 2, 5)) {
        let a = antinormal_quantize(&p, 4).unwrap();
        let extracted = normal_symbol_of(&a, 8).unwrap();
        prop_assert!(extracted.symbol.max_abs_diff(&p.heat_transform(1.0)) <= 1e-10 * scale(&p));
        prop_assert!(extracted.residual <= 1e-10 * scale(&p));
    }

    #[test]
    fn normal_quantization_round_trips(p in common::symbol(2, 2, 5)) {
        let extracted = normal_symbol_of(&normal_quantize(&p, 4).unwrap(), 8).unwrap();
        prop_assert!(extracted.symbol.max_abs_diff(&p) <= 1e-12 * scale(&p));
    }

    #[test]
    fn diagonal_evaluation_of_real_symbols_is_real(
        p in common::symbol(2, 2, 4),
        z in proptest::collection::vec(common::complex(), 2),
    ) {
        let h = p.add(&p.conjugate()).unwrap();
        prop_assert!(h.is_real(1e-15));
        prop_assert!(h.evaluate_diagonal(&z).unwrap().im.abs() <= 1e-13 * scale(&h));
    }
}

#[test]
fn gaussian_moments_match_quadrature() {
    let grid1 = GaussianGrid::new(1, 8).unwrap();
    let grid2 = GaussianGrid::new(2, 8).unwrap();
    for (modes, grid) in [(1, &grid1), (2, &grid2)] {
        let idx = MultiIndex::up_to_degree(modes, 6);
        for a in &idx {
            for b in &idx {
                let q = grid.integrate(|z| {
                    let zs: Vec<Complex64> = z.iter().map(|x| x.conj()).collect();
                    a.power(z) * b.power(&zs)
                });
                let exact = gaussian_moment(a, b).unwrap();
                assert!(
                    (q - Complex64::new(exact, 0.0)).norm() <= 1e-12 * exact.max(1.0),
                    "{a} {b}: {q} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn every_low_degree_monomial_obeys_the_transform_oracle() {
    for modes in 1..=2 {
        let idx = MultiIndex::up_to_degree(modes, 4);
        for zs in &idx {
            for z in &idx {
                if zs.degree() + z.degree() > 4 {
                    continue;
                }
                let p =
                    PolySymbol::monomial(zs.clone(), z.clone(), Complex64::new(1.0, 0.0)).unwrap();
                let a = antinormal_quantize(&p, 4).unwrap();
                let got = normal_symbol_of(&a, 4).unwrap().symbol;
                assert!(
                    got.max_abs_diff(&p.heat_transform(1.0)) <= 1e-10,
                    "{zs} {z}"
                );
            }
        }
    }
}
