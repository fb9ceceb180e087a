//! Time-sliced anti-normal propagator.
//!
//! The slice operator `Â_τ` is the anti-normal quantization of `e^{−iτΘ}`. Its
//! `N`-fold power approximates `e^{−itĤ}` with `Ĥ = antinormal_quantize(Θ)`, and the
//! exact propagator is computed from the spectral decomposition of `Ĥ` so the
//! comparison carries no exponential-approximation error.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CoherentState, FockBasis, FockVector};
use crate::quadrature::GaussianGrid;
use crate::quantization::{antinormal_quantize, max_abs, OperatorMatrix};
use crate::symbol::PolySymbol;

/// Symbols are treated as real when `max |P − conj P| ≤ REALITY_TOL · max(1, max |c|)`.
pub const REALITY_TOL: f64 = 1e-12;

/// Relative tolerance of the quadrature cross-check against exact moments.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Series remainder bounds above this attach a warning to the slice operator.
pub const REMAINDER_WARN: f64 = 1e-8;

/// Gaussian mass, weighted by the truncated basis, below which the series bound
/// ignores the tail of the measure.
const SUPPORT_MASS: f64 = 1e-16;

/// Drop every term touching a mode `≥ n` (zero-based); the result lives on `n` modes.
pub fn project_modes(p: &PolySymbol, n: usize) -> Result<PolySymbol> {
    p.restrict_modes(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SliceBackend {
    /// Taylor series of `e^{−iτΘ}` truncated at total degree `degree`, quantized exactly.
    Series { degree: u32 },
    /// Tensor Gauss–Hermite evaluation of `∫ dμ e^{−iτΘ} |e_ζ⟩⟨e_ζ|`.
    Quadrature { nodes: usize },
}

impl SliceBackend {
    /// Quadrature with enough nodes to resolve the oscillating weight at cutoff `M`.
    pub fn default_for(cutoff: u32) -> Self {
        SliceBackend::Quadrature {
            nodes: (8 * cutoff as usize).clamp(24, 400),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub symbol: PolySymbol,
    pub time: f64,
    pub slices: usize,
    pub cutoff: u32,
    pub backend: SliceBackend,
}

impl SliceConfig {
    pub fn new(symbol: PolySymbol, time: f64, slices: usize, cutoff: u32) -> Self {
        SliceConfig {
            symbol,
            time,
            slices,
            cutoff,
            backend: SliceBackend::default_for(cutoff),
        }
    }

    pub fn with_backend(mut self, backend: SliceBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn modes(&self) -> usize {
        self.symbol.modes()
    }

    pub fn validate(&self) -> Result<()> {
        if self.slices == 0 {
            return Err(Error::InvalidArgument(
                "slice count must be at least 1".into(),
            ));
        }
        if !self.time.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time {} is not finite",
                self.time
            )));
        }
        if self.symbol.modes() == 0 {
            return Err(Error::InvalidArgument(
                "symbol must have at least one mode".into(),
            ));
        }
        check_real(&self.symbol)
    }
}

fn check_real(p: &PolySymbol) -> Result<()> {
    let scale = p.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max);
    let defect = p.reality_defect();
    if defect > REALITY_TOL * scale {
        return Err(Error::NonReal(defect));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SliceOperator {
    pub matrix: OperatorMatrix,
    /// `(τB)^{k+1}/(k+1)!` for the series backend.
    pub remainder_bound: Option<f64>,
    pub warning: Option<String>,
}

/// `Â_τ` on the cutoff-`M` space of `cfg`.
pub fn slice_operator(cfg: &SliceConfig, tau: f64) -> Result<SliceOperator> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "slice step τ = {tau} must be ≥ 0"
        )));
    }
    if cfg.symbol.modes() == 0 {
        return Err(Error::InvalidArgument(
            "symbol must have at least one mode".into(),
        ));
    }
    match cfg.backend {
        SliceBackend::Series { degree } => series_slice(&cfg.symbol, cfg.cutoff, tau, degree),
        SliceBackend::Quadrature { nodes } => quadrature_slice(&cfg.symbol, cfg.cutoff, tau, nodes),
    }
}

/// `e^{−iτΘ}` truncated at total degree `degree`. The constant part is factored out
/// exactly so a constant shift of `Θ` only changes a global phase.
pub fn exp_series(p: &PolySymbol, tau: f64, degree: u32) -> PolySymbol {
    let (theta0, rest) = p.split_constant();
    let one = PolySymbol::one(p.modes());
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u32;
    while !rest.is_zero() {
        term = term
            .mul_truncated(&rest, degree)
            .expect("same mode count")
            .scale(Complex64::new(0.0, -tau / k as f64));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term).expect("same mode count");
        k += 1;
    }
    sum.scale((Complex64::new(0.0, -tau) * theta0).exp())
}

fn series_slice(p: &PolySymbol, cutoff: u32, tau: f64, degree: u32) -> Result<SliceOperator> {
    let symbol = exp_series(p, tau, degree);
    let matrix = antinormal_quantize(&symbol, cutoff)?;
    let (_, rest) = p.split_constant();
    if rest.is_zero() || tau == 0.0 {
        return Ok(SliceOperator {
            matrix,
            remainder_bound: Some(0.0),
            warning: None,
        });
    }
    let complete = degree / rest.degree();
    let b = support_bound(&rest, cutoff);
    let k1 = complete + 1;
    let bound = (1..=k1).fold(1.0, |acc, j| acc * tau * b / j as f64);
    let warning = (bound > REMAINDER_WARN).then(|| {
        format!(
            "series degree {degree} keeps {complete} complete orders; remainder bound {bound:.3e} at τ = {tau}"
        )
    });
    Ok(SliceOperator {
        matrix,
        remainder_bound: Some(bound),
        warning,
    })
}

/// `Σ |c| R^{deg}` with `R²` the radius beyond which the basis-weighted Gaussian mass
/// `e^{−r} Σ_{k≤M} r^k/k!` drops below [`SUPPORT_MASS`].
fn support_bound(p: &PolySymbol, cutoff: u32) -> f64 {
    let tail = |r: f64| {
        let mut term = (-r).exp();
        let mut s = term;
        for k in 1..=cutoff {
            term *= r / k as f64;
            s += term;
        }
        s
    };
    let mut r = cutoff.max(1) as f64;
    while tail(r) > SUPPORT_MASS {
        r *= 1.1;
    }
    let radius = r.sqrt();
    p.terms()
        .map(|(m, c)| c.norm() * radius.powi(m.degree() as i32))
        .sum()
}

fn quadrature_slice(p: &PolySymbol, cutoff: u32, tau: f64, nodes: usize) -> Result<SliceOperator> {
    let basis = FockBasis::new(p.modes(), cutoff);
    let grid = GaussianGrid::new(p.modes(), nodes)?;
    let dim = basis.dim();
    let inv_sqrt_fact: Vec<f64> = basis
        .states()
        .iter()
        .map(|g| 1.0 / g.factorial().sqrt())
        .collect();
    let sq = dim * dim;
    // [e^{−iτΘ} | 1 | Θ] weighted outer products, for the slice and the two cross-checks
    let acc = grid.accumulate(
        || vec![Complex64::new(0.0, 0.0); 3 * sq],
        |acc, zeta, w| {
            let theta = p
                .evaluate_diagonal(zeta)
                .expect("grid matches symbol modes");
            let phase = (Complex64::new(0.0, -tau) * theta).exp();
            let v: Vec<Complex64> = basis
                .states()
                .iter()
                .zip(&inv_sqrt_fact)
                .map(|(g, s)| g.power(zeta) * s)
                .collect();
            for (r, vr) in v.iter().enumerate() {
                let vr = vr * w;
                for (c, vc) in v.iter().enumerate() {
                    let o = vr * vc.conj();
                    acc[r * dim + c] += phase * o;
                    acc[sq + r * dim + c] += o;
                    acc[2 * sq + r * dim + c] += theta * o;
                }
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let block = |k: usize| DMatrix::from_fn(dim, dim, |r, c| acc[k * sq + r * dim + c]);
    let identity_err = max_abs(&(block(1) - DMatrix::identity(dim, dim)));
    if identity_err > CROSS_CHECK_TOL {
        return Err(Error::QuadratureMismatch(format!(
            "resolution of identity off by {identity_err:.3e} with {nodes} nodes per axis at M = {cutoff}"
        )));
    }
    let exact = antinormal_quantize(p, cutoff)?;
    let scale = max_abs(exact.entries()).max(1.0);
    let theta_err = max_abs(&(block(2) - exact.entries()));
    if theta_err > CROSS_CHECK_TOL * scale {
        return Err(Error::QuadratureMismatch(format!(
            "anti-normal moments off by {theta_err:.3e} with {nodes} nodes per axis at M = {cutoff}"
        )));
    }
    Ok(SliceOperator {
        matrix: OperatorMatrix::from_entries(&basis, block(0))?,
        remainder_bound: None,
        warning: None,
    })
}

/// Spectral data of `Ĥ = antinormal_quantize(Θ)`.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    basis: std::sync::Arc<FockBasis>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl ExactPropagator {
    pub fn new(symbol: &PolySymbol, cutoff: u32) -> Result<Self> {
        check_real(symbol)?;
        let h = antinormal_quantize(symbol, cutoff)?;
        let herm = (h.entries() + h.entries().adjoint()).map(|x| x * 0.5);
        let eig = herm.symmetric_eigen();
        Ok(ExactPropagator {
            basis: h.basis().clone(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `⟨u, e^{−itĤ} v⟩`.
    pub fn amplitude(&self, t: f64, u: &FockVector, v: &FockVector) -> Result<Complex64> {
        if !self.basis.same_shape(u.basis()) || !self.basis.same_shape(v.basis()) {
            return Err(Error::dims(
                "propagator/vector dimension",
                self.basis.dim(),
                u.basis().dim().max(v.basis().dim()),
            ));
        }
        let uv = DVector::from_column_slice(u.coeffs());
        let vv = DVector::from_column_slice(v.coeffs());
        let pu = self.eigenvectors.adjoint() * uv;
        let pv = self.eigenvectors.adjoint() * vv;
        Ok(self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, lam)| pu[k].conj() * Complex64::new(0.0, -t * lam).exp() * pv[k])
            .sum())
    }
}

fn endpoints(
    cfg: &SliceConfig,
    z0: &[Complex64],
    z1: &[Complex64],
) -> Result<(CoherentState, CoherentState)> {
    let basis = FockBasis::new(cfg.modes(), cfg.cutoff);
    Ok((
        CoherentState::new(&basis, z0)?,
        CoherentState::new(&basis, z1)?,
    ))
}

/// `⟨e_{z1}, e^{−itĤ} e_{z0}⟩` on the cutoff-`M` space.
pub fn exact_amplitude(cfg: &SliceConfig, z0: &[Complex64], z1: &[Complex64]) -> Result<Complex64> {
    let (e0, e1) = endpoints(cfg, z0, z1)?;
    ExactPropagator::new(&cfg.symbol, cfg.cutoff)?.amplitude(cfg.time, &e1.realized, &e0.realized)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub z0: Vec<Complex64>,
    pub z1: Vec<Complex64>,
    pub slices: usize,
    /// Number of leading modes kept by the flag projection.
    pub modes: usize,
    pub amplitude: Complex64,
    pub exact: Option<Complex64>,
    pub abs_error: Option<f64>,
    /// Sum of the two endpoint coherent-state truncation masses.
    pub truncation_loss: f64,
    pub wall_ms: f64,
    pub warning: Option<String>,
}

/// `(Â_{t/N})^N e_{z0}` as a vector, with the slice operator's warning.
fn evolve(cfg: &SliceConfig, start: &FockVector) -> Result<(FockVector, Option<String>)> {
    cfg.validate()?;
    if cfg.time < 0.0 {
        return Err(Error::InvalidArgument(
            "negative time is not supported".into(),
        ));
    }
    let op = slice_operator(cfg, cfg.time / cfg.slices as f64)?;
    let m = op.matrix.entries();
    let mut v = DVector::from_column_slice(start.coeffs());
    for _ in 0..cfg.slices {
        v = m * v;
    }
    Ok((
        FockVector::from_coeffs(start.basis(), v.iter().copied().collect())?,
        op.warning,
    ))
}

/// `⟨e_{z1}, (Â_{t/N})^N e_{z0}⟩`, compared against [`exact_amplitude`].
pub fn chernoff_amplitude(
    cfg: &SliceConfig,
    z0: &[Complex64],
    z1: &[Complex64],
) -> Result<AmplitudeReport> {
    let start = Instant::now();
    let (e0, e1) = endpoints(cfg, z0, z1)?;
    let (evolved, warning) = evolve(cfg, &e0.realized)?;
    let amplitude = e1.realized.inner_product(&evolved)?;
    let exact = ExactPropagator::new(&cfg.symbol, cfg.cutoff)?.amplitude(
        cfg.time,
        &e1.realized,
        &e0.realized,
    )?;
    Ok(AmplitudeReport {
        z0: z0.to_vec(),
        z1: z1.to_vec(),
        slices: cfg.slices,
        modes: cfg.modes(),
        amplitude,
        exact: Some(exact),
        abs_error: Some((amplitude - exact).norm()),
        truncation_loss: e0.truncation_mass + e1.truncation_mass,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        warning,
    })
}

/// `‖(Â_{t/N})^N ψ‖` for a state `ψ`.
pub fn evolved_norm(cfg: &SliceConfig, psi: &FockVector) -> Result<f64> {
    Ok(evolve(cfg, psi)?.0.norm_sqr().sqrt())
}

/// Monotonicity summary of one flag column of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnTrend {
    pub modes: usize,
    pub strictly_decreasing: bool,
    /// `log₂(err(N_k)/err(N_{k+1}))` for consecutive slice counts.
    pub log2_ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub cells: Vec<AmplitudeReport>,
    pub trends: Vec<ColumnTrend>,
}

/// Reports over all `(N, n)` cells, ordered by `(N, n)`. Each cell projects the symbol
/// and endpoints onto the first `n` modes.
pub fn convergence_sweep(
    template: &SliceConfig,
    z0: &[Complex64],
    z1: &[Complex64],
    slices: &[usize],
    flag_modes: &[usize],
) -> Result<Sweep> {
    if slices.is_empty() || flag_modes.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep lists must be nonempty".into(),
        ));
    }
    let d = template.modes();
    for &n in flag_modes {
        if n == 0 || n > d {
            return Err(Error::Dimension(format!("flag modes {n} outside 1..={d}")));
        }
    }
    if z0.len() != d || z1.len() != d {
        return Err(Error::dims("endpoint length", z0.len().max(z1.len()), d));
    }
    let mut keys: Vec<(usize, usize)> = slices
        .iter()
        .flat_map(|&nn| flag_modes.iter().map(move |&n| (nn, n)))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let cells = keys
        .par_iter()
        .map(|&(nn, n)| {
            let cfg = SliceConfig {
                symbol: project_modes(&template.symbol, n)?,
                slices: nn,
                ..template.clone()
            };
            chernoff_amplitude(&cfg, &z0[..n], &z1[..n])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<usize> = flag_modes.to_vec();
    columns.sort_unstable();
    columns.dedup();
    let trends = columns
        .into_iter()
        .map(|n| {
            let errs: Vec<f64> = cells
                .iter()
                .filter(|c| c.modes == n)
                .map(|c| c.abs_error.unwrap_or(f64::NAN))
                .collect();
            ColumnTrend {
                modes: n,
                strictly_decreasing: errs.windows(2).all(|w| w[1] < w[0]),
                log2_ratios: errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect(),
            }
        })
        .collect();
    Ok(Sweep { cells, trends })
}
