//! Gauss–Hermite rules and tensor-product grids for the complex Gaussian measure
//! `dμ(ζ) = π^{-d} e^{-|ζ|²} d²ζ` on `C^d`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes and weights for `∫ f(x) e^{-x²} dx ≈ Σ w_k f(x_k)`, nodes ascending.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_NODES: usize = 400;

impl GaussHermite {
    /// `n`-point rule, exact for polynomials of degree `≤ 2n − 1`.
    ///
    /// Starting points are the eigenvalues of the Jacobi matrix; each root is then
    /// polished by Newton iteration on the orthonormal Hermite recurrence scaled by
    /// `e^{−x²/2}`, which stays finite far out on the real line.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::InvalidArgument(format!(
                "Gauss–Hermite node count must be in 1..={MAX_NODES}, got {n}"
            )));
        }
        let jacobi = DMatrix::<f64>::from_fn(n, n, |r, c| {
            if r + 1 == c || c + 1 == r {
                (r.max(c) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        guesses.sort_by(f64::total_cmp);
        let nf = n as f64;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        // positive half, mirrored
        for i in n / 2..n {
            let mut z = guesses[i].abs();
            if 2 * i + 1 == n {
                z = 0.0;
            }
            for _ in 0..100 {
                let (p1, p2) = scaled_hermite(n, z);
                let step = p1 / ((2.0 * nf).sqrt() * p2);
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, p2) = scaled_hermite(n, z);
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = (-z * z).exp() / (nf * p2 * p2);
            w[n - 1 - i] = w[i];
        }
        Ok(GaussHermite {
            nodes: x,
            weights: w,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(h_n(z), h_{n−1}(z)) · e^{−z²/2}` for the orthonormal Hermite family,
/// `h_0 = π^{-1/4}`.
fn scaled_hermite(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = std::f64::consts::PI.powf(-0.25) * (-z * z / 2.0).exp();
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Tensor-product rule over `2d` real axes, normalized so the total mass is one.
#[derive(Clone, Debug)]
pub struct GaussianGrid {
    modes: usize,
    rule: GaussHermite,
}

impl GaussianGrid {
    pub fn new(modes: usize, nodes_per_axis: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument(
                "grid needs at least one mode".into(),
            ));
        }
        Ok(GaussianGrid {
            modes,
            rule: GaussHermite::new(nodes_per_axis)?,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.rule.len()
    }

    pub fn total_points(&self) -> usize {
        self.rule.len().pow(2 * self.modes as u32)
    }

    /// Visit every grid point `(ζ, weight)` with the points of one slab of the
    /// first real axis handled in order.
    fn visit_slab<F>(&self, first: usize, visit: &mut F)
    where
        F: FnMut(&[Complex64], f64),
    {
        let q = self.rule.len();
        let axes = 2 * self.modes;
        let norm = std::f64::consts::PI.powi(-(self.modes as i32));
        let mut idx = vec![0usize; axes];
        idx[0] = first;
        let mut zeta = vec![Complex64::new(0.0, 0.0); self.modes];
        loop {
            let mut w = norm;
            for (m, z) in zeta.iter_mut().enumerate() {
                let (ix, iy) = (idx[2 * m], idx[2 * m + 1]);
                *z = Complex64::new(self.rule.nodes[ix], self.rule.nodes[iy]);
                w *= self.rule.weights[ix] * self.rule.weights[iy];
            }
            visit(&zeta, w);
            // odometer over axes 1..
            let mut a = 1;
            loop {
                if a == axes {
                    return;
                }
                idx[a] += 1;
                if idx[a] < q {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    /// Sequential visit of all points.
    pub fn for_each<F>(&self, mut visit: F)
    where
        F: FnMut(&[Complex64], f64),
    {
        for first in 0..self.rule.len() {
            self.visit_slab(first, &mut visit);
        }
    }

    /// Parallel accumulation. Slabs along the first axis are reduced into separate
    /// accumulators and then combined in slab order, so the result does not depend
    /// on thread scheduling.
    pub fn accumulate<T, Z, F, C>(&self, zero: Z, visit: F, combine: C) -> T
    where
        T: Send,
        Z: Fn() -> T + Sync,
        F: Fn(&mut T, &[Complex64], f64) + Sync,
        C: Fn(T, T) -> T,
    {
        let partials: Vec<T> = (0..self.rule.len())
            .into_par_iter()
            .map(|first| {
                let mut acc = zero();
                self.visit_slab(first, &mut |z, w| visit(&mut acc, z, w));
                acc
            })
            .collect();
        partials.into_iter().fold(zero(), combine)
    }

    /// `∫ f dμ` for a scalar integrand.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[Complex64]) -> Complex64 + Sync,
    {
        self.accumulate(
            || Complex64::new(0.0, 0.0),
            |acc, z, w| *acc += f(z) * w,
            |a, b| a + b,
        )
    }
}
