mod common;

use bargmann_core::propagator::{
    chernoff_amplitude, exact_amplitude, project_modes, slice_operator, SliceBackend, SliceConfig,
};
use bargmann_core::quantization::{antinormal_quantize, normal_quantize};
use bargmann_core::PolySymbol;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn quartic() -> PolySymbol {
    PolySymbol::number(1)
        .add(&PolySymbol::single_mode(1, 0, 2, 2).scale(c(0.1)))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constant_shift_multiplies_by_a_phase(shift in -3.0..3.0f64, slices in 1usize..24, t in 0.1..2.0f64) {
        let base = SliceConfig::new(quartic(), t, slices, 8).with_backend(SliceBackend::Quadrature { nodes: 64 });
        let shifted = SliceConfig {
            symbol: base.symbol.add(&PolySymbol::constant(1, c(shift))).unwrap(),
            ..base.clone()
        };
        let z = [Complex64::new(0.5, 0.2)];
        let a = chernoff_amplitude(&base, &z, &z).unwrap().amplitude;
        let b = chernoff_amplitude(&shifted, &z, &z).unwrap().amplitude;
        let phase = Complex64::new(0.0, -shift * t).exp();
        prop_assert!((b - a * phase).norm() <= 1e-12);
    }

    #[test]
    fn normal_quantization_commutes_with_mode_projection(p in common::symbol(3, 2, 6), n in 1usize..=3) {
        let lhs = normal_quantize(&project_modes(&p, n).unwrap(), 4).unwrap();
        let rhs = normal_quantize(&p, 4).unwrap().compress_modes(n).unwrap();
        prop_assert_eq!(lhs.max_abs_diff(&rhs).unwrap(), 0.0);
    }

    #[test]
    fn antinormal_projection_is_exact_without_dropped_diagonal_terms(p in common::symbol(2, 2, 6)) {
        // keep only terms whose dropped-mode exponents differ, so their Gaussian average vanishes
        let mut q = PolySymbol::zero(2);
        for (m, k) in p.terms() {
            if m.zs.get(1) != m.z.get(1) || (m.zs.get(1) == 0 && m.z.get(1) == 0) {
                q.add_term(m.clone(), *k);
            }
        }
        let lhs = antinormal_quantize(&project_modes(&q, 1).unwrap(), 4).unwrap();
        let rhs = antinormal_quantize(&q, 4).unwrap().compress_modes(1).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn real_slices_have_no_singular_value_above_one(
        a in 0.1..1.5f64, b in 0.0..0.3f64, tau in 0.01..0.3f64,
    ) {
        let p = PolySymbol::number(1).scale(c(a))
            .add(&PolySymbol::single_mode(1, 0, 2, 2).scale(c(b))).unwrap();
        let cfg = SliceConfig::new(p, 1.0, 1, 10).with_backend(SliceBackend::Quadrature { nodes: 96 });
        let s = slice_operator(&cfg, tau).unwrap().matrix.singular_values();
        prop_assert!(s[0] <= 1.0 + 1e-10, "{}", s[0]);
    }
}

#[test]
fn harmonic_amplitude_closed_form_over_times_and_endpoints() {
    let cfg = SliceConfig::new(PolySymbol::number(1), 1.0, 1, 32);
    let pts = [
        c(0.0),
        c(0.8),
        Complex64::new(0.5, -0.6),
        Complex64::new(-0.3, 0.7),
    ];
    for t in [0.5, 1.0, 2.0] {
        let cfg = SliceConfig {
            time: t,
            ..cfg.clone()
        };
        for z0 in pts {
            for z1 in pts {
                let got = exact_amplitude(&cfg, &[z0], &[z1]).unwrap();
                let phase = Complex64::new(0.0, -t).exp();
                let want = phase * (z1.conj() * z0 * phase).exp();
                assert!((got - want).norm() <= 1e-8);
            }
        }
    }
}

#[test]
fn backends_agree_for_weak_quartic_coupling_at_small_cutoff() {
    let p = PolySymbol::number(1)
        .add(&PolySymbol::single_mode(1, 0, 2, 2).scale(c(0.01)))
        .unwrap();
    let s = SliceConfig::new(p, 1.0, 1, 6).with_backend(SliceBackend::Series { degree: 40 });
    let q = s
        .clone()
        .with_backend(SliceBackend::Quadrature { nodes: 96 });
    let a = slice_operator(&s, 0.1).unwrap().matrix;
    let b = slice_operator(&q, 0.1).unwrap().matrix;
    assert!(a.max_abs_diff(&b).unwrap() <= 1e-8);
}
