//! Dispatch of a resolved configuration to the core operations.

use bargmann_core::bosonization::{
    bosonize, conjugate_operator, debosonize, subset_basis, super_ccr_residual, FermionMatrix,
    FermionVector, HardCoreSubspace,
};
use bargmann_core::fock::resolution_of_identity_residual;
use bargmann_core::propagator::{convergence_sweep, SliceBackend, SliceConfig};
use bargmann_core::quantization::{
    antinormal_quantize, antinormal_symbol_of, normal_quantize, normal_symbol_from_antinormal,
    OperatorMatrix,
};
use bargmann_core::{FockBasis, PolySymbol};
use num_complex::Complex64;

use crate::config::{Backend, Command, ExperimentConfig};
use crate::error::CliError;
use crate::parser::{format_symbol, SymbolSpec};
use crate::report::{
    BosonizeReport, IdentityReport, PropagateReport, PropagateRow, QuantizeReport, Report,
    ReportBody, SymbolsReport, Trend,
};

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let body = match cfg.command {
        Command::Symbols => ReportBody::Symbols(symbols(cfg)?),
        Command::Quantize => ReportBody::Quantize(quantize(cfg)?),
        Command::Propagate => ReportBody::Propagate(propagate(cfg)?),
        Command::Bosonize => ReportBody::Bosonize(bosonize_report(cfg)?),
        Command::IdentityCheck => ReportBody::IdentityCheck(IdentityReport {
            modes: cfg.modes,
            cutoff: cfg.cutoff,
            nodes: cfg.quad_nodes,
            residual: resolution_of_identity_residual(cfg.modes, cfg.cutoff, cfg.quad_nodes)?,
        }),
    };
    Ok(Report {
        config: cfg.clone(),
        body,
    })
}

fn symbols(cfg: &ExperimentConfig) -> Result<SymbolsReport, CliError> {
    let sym = SymbolSpec::parse(&cfg.symbol, cfg.modes)?;
    let p = &sym.parsed;
    Ok(SymbolsReport {
        canonical: format_symbol(p),
        modes: p.modes(),
        degree: p.degree(),
        terms: p.len(),
        is_real: sym.is_real(),
        reality_defect: p.reality_defect(),
        normal_from_antinormal: format_symbol(&normal_symbol_from_antinormal(p)),
        antinormal_from_normal: format_symbol(&antinormal_symbol_of(p)),
    })
}

fn dense(m: &OperatorMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|r| {
            (0..m.dim())
                .map(|c| {
                    let x = m.get(r, c);
                    [x.re, x.im]
                })
                .collect()
        })
        .collect()
}

fn quantize(cfg: &ExperimentConfig) -> Result<QuantizeReport, CliError> {
    let sym = SymbolSpec::parse(&cfg.symbol, cfg.modes)?;
    let normal = normal_quantize(&sym.parsed, cfg.cutoff)?;
    let anti = antinormal_quantize(&sym.parsed, cfg.cutoff)?;
    let hermitian = sym.is_real();
    Ok(QuantizeReport {
        basis: normal
            .basis()
            .states()
            .iter()
            .map(|a| a.to_string())
            .collect(),
        normal: dense(&normal),
        antinormal: dense(&anti),
        hermitian,
        normal_min_eigenvalue: hermitian.then(|| normal.min_eigenvalue()),
        antinormal_min_eigenvalue: hermitian.then(|| anti.min_eigenvalue()),
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn propagate(cfg: &ExperimentConfig) -> Result<PropagateReport, CliError> {
    let sym = SymbolSpec::parse(&cfg.symbol, cfg.modes)?;
    let backend = match cfg.backend {
        Backend::Quadrature => SliceBackend::Quadrature {
            nodes: cfg.quad_nodes,
        },
        Backend::Series => SliceBackend::Series {
            degree: cfg.series_degree,
        },
    };
    let template = SliceConfig::new(sym.parsed, cfg.time, 1, cfg.cutoff).with_backend(backend);
    let sweep = convergence_sweep(
        &template,
        &cfg.z0.0,
        &cfg.z1.0,
        &cfg.slices,
        &cfg.flag_modes,
    )?;
    let mut warnings: Vec<String> = Vec::new();
    let rows = sweep
        .cells
        .iter()
        .map(|c| {
            if let Some(w) = &c.warning {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
            let exact = c.exact.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            PropagateRow {
                slices: c.slices,
                n: c.modes,
                amp_re: c.amplitude.re,
                amp_im: c.amplitude.im,
                exact_re: exact.re,
                exact_im: exact.im,
                abs_error: c.abs_error.unwrap_or(f64::NAN),
                trunc_loss: c.truncation_loss,
                wall_ms: c.wall_ms,
            }
        })
        .collect();
    let trends = sweep
        .trends
        .into_iter()
        .map(|t| Trend {
            n: t.modes,
            strictly_decreasing: t.strictly_decreasing,
            log2_ratios: t.log2_ratios.into_iter().map(finite).collect(),
        })
        .collect();
    Ok(PropagateReport {
        rows,
        trends,
        warnings,
    })
}

fn bosonize_report(cfg: &ExperimentConfig) -> Result<BosonizeReport, CliError> {
    let d = cfg.modes;
    let basis = FockBasis::new(d, cfg.cutoff);
    let hc = HardCoreSubspace::new(&basis)?;
    let sets = subset_basis(d);
    let mut images = Vec::with_capacity(sets.len());
    let mut inverse_residual: f64 = 0.0;
    for s in &sets {
        let f = FermionVector::basis_state(d, *s)?;
        let b = bosonize(&f, cfg.cutoff)?;
        inverse_residual = inverse_residual.max(debosonize(&b)?.max_abs_diff(&f));
        images.push(b);
    }
    let mut isometry_residual: f64 = 0.0;
    for (a, ia) in images.iter().enumerate() {
        for (b, ib) in images.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            isometry_residual =
                isometry_residual.max((ia.inner_product(ib)? - Complex64::new(want, 0.0)).norm());
        }
    }
    let number = conjugate_operator(&normal_quantize(&PolySymbol::number(d), cfg.cutoff)?)?;
    let car = super_ccr_residual(d, d)?;
    Ok(BosonizeReport {
        modes: d,
        cutoff: cfg.cutoff,
        grade_dims: (0..=d)
            .map(|n| {
                images
                    .iter()
                    .filter(|v| {
                        v.basis()
                            .states()
                            .iter()
                            .zip(v.coeffs())
                            .any(|(a, c)| c.norm_sqr() > 0.0 && a.degree() == n as u32)
                    })
                    .count()
            })
            .collect(),
        hard_core_dim: hc.dim(),
        isometry_residual,
        inverse_residual,
        number_operator_residual: number.max_abs_diff(&FermionMatrix::number(d)),
        car_residual_grassmann: car.grassmann,
        car_residual_bosonized: car.bosonized,
    })
}
