//! Lowest eigenvalues of the discretized Landau operator.
//!
//! Chebyshev-filtered subspace iteration: a block of vectors is repeatedly
//! passed through a Chebyshev polynomial that damps the unwanted upper part
//! of the spectrum, then Rayleigh-Ritz extracts the approximations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fd::{assemble_unchecked, SparseMatrix, MIN_GRID};
use crate::character::AutomorphicData;
use crate::error::{Error, Result};
use crate::verify::closed_dimension;

/// Largest number of eigenvalues `spectrum_fd` will compute.
pub const MAX_EIGS: usize = 20;

/// Clustering factor applied to the N vs N/2 eigenvalue shift.
pub const CLUSTER_FACTOR: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Relative residual ‖Ax − λx‖ / max(|λ|, 1) at convergence.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Chebyshev filter degree.
    pub degree: usize,
    /// Guard vectors beyond the requested count.
    pub guard: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 300, degree: 40, guard: 8, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn apply_block(a: &SparseMatrix, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut y = DMatrix::zeros(x.nrows(), x.ncols());
    for j in 0..x.ncols() {
        a.matvec_into(x.column(j).as_slice(), y.column_mut(j).as_mut_slice());
    }
    y
}

/// Degree-m Chebyshev filter damping [lo, hi], scaled at `floor`.
fn chebyshev_filter(
    a: &SparseMatrix,
    x: &DMatrix<Complex64>,
    degree: usize,
    lo: f64,
    hi: f64,
    floor: f64,
) -> DMatrix<Complex64> {
    let e = (hi - lo) / 2.0;
    let c = (hi + lo) / 2.0;
    let mut sigma = e / (floor - c);
    let tau = 2.0 / sigma;
    let mut prev = x.clone();
    let mut cur = (apply_block(a, x) - x * Complex64::new(c, 0.0)) * Complex64::new(sigma / e, 0.0);
    for _ in 1..degree {
        let sigma_next = 1.0 / (tau - sigma);
        let next = (apply_block(a, &cur) - &cur * Complex64::new(c, 0.0)) * Complex64::new(2.0 * sigma_next / e, 0.0)
            - prev * Complex64::new(sigma * sigma_next, 0.0);
        prev = cur;
        cur = next;
        sigma = sigma_next;
    }
    cur
}

fn orthonormalize(x: DMatrix<Complex64>) -> DMatrix<Complex64> {
    x.qr().q()
}

/// The k smallest eigenpairs of a Hermitian sparse matrix.
pub fn lowest_eigenpairs(a: &SparseMatrix, k: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    let dim = a.dim();
    if k == 0 || k > dim {
        return Err(Error::Precondition(format!("cannot compute {k} eigenvalues of a {dim}x{dim} matrix")));
    }
    let block = (k + opts.guard).min(dim);
    let upper = a.gershgorin_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x =
        DMatrix::from_fn(dim, block, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut worst = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        x = orthonormalize(x);
        let ax = apply_block(a, &x);
        let projected = x.adjoint() * &ax;
        let projected = (&projected + projected.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(projected);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let rot = DMatrix::from_fn(block, block, |r, c| eig.eigenvectors[(r, order[c])]);
        x = &x * &rot;
        let ax = ax * &rot;
        let residuals: Vec<f64> = (0..block)
            .map(|j| (ax.column(j) - x.column(j) * Complex64::new(values[j], 0.0)).norm() / values[j].abs().max(1.0))
            .collect();
        worst = residuals[..k].iter().copied().fold(0.0, f64::max);
        if worst <= opts.tolerance {
            return Ok(Eigenpairs {
                values: values[..k].to_vec(),
                vectors: x.columns(0, k).into_owned(),
                residuals: residuals[..k].to_vec(),
                iterations: iteration,
            });
        }
        if block == dim {
            return Err(Error::Numeric(format!("dense Rayleigh-Ritz left residual {worst:.3e}")));
        }
        let lo = values[block - 1];
        x = chebyshev_filter(a, &x, opts.degree, lo, upper, values[0]);
    }
    Err(Error::Numeric(format!(
        "subspace iteration did not converge in {} iterations (worst residual {worst:.3e}, tolerance {:.1e})",
        opts.max_iterations, opts.tolerance
    )))
}

/// A group of nearly equal eigenvalues identified with one Landau level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub eigenvalues: Vec<f64>,
    pub multiplicity: usize,
    /// Nearest level l with ν(2l + n) closest to the center.
    pub level: usize,
    pub expected_value: f64,
    pub relative_error: f64,
    /// Closed-form dimension of the level-l eigenspace.
    pub expected_multiplicity: f64,
    /// False when the requested eigenvalue count may cut this cluster.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub nu: f64,
    pub grid: usize,
    pub coarse_grid: usize,
    pub eigenvalues: Vec<f64>,
    pub coarse_eigenvalues: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub clusters: Vec<Cluster>,
    /// Distance from the spectrum to the half-integer level λ = 1/2, ν(2λ + n).
    pub midgap_distance: f64,
    pub max_residual: f64,
    pub iterations: usize,
}

/// Groups sorted eigenvalues: neighbours join when their gap is below
/// `factor` times the larger error estimate.
pub fn cluster_eigenvalues(values: &[f64], errors: &[f64], factor: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        let joins = i > 0 && {
            let gap = values[i] - values[i - 1];
            let scale = factor * errors[i].max(errors[i - 1]) + 1e-9 * values[i].abs();
            gap <= scale
        };
        match groups.last_mut() {
            Some(g) if joins => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Lowest k eigenvalues of L^ν on the N-grid, clustered by comparison with N/2.
pub fn spectrum_fd(data: &AutomorphicData, n_grid: usize, k: usize, opts: &EigenOptions) -> Result<SpectralReport> {
    if data.n() != 1 {
        return Err(Error::UnsupportedDimension(data.n()));
    }
    if k == 0 || k > MAX_EIGS {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={MAX_EIGS}")));
    }
    if n_grid < MIN_GRID {
        return Err(Error::Precondition(format!("grid N = {n_grid} is below the minimum {MIN_GRID}")));
    }
    data.require_rdq()?;
    let coarse_grid = n_grid / 2;
    // one extra eigenvalue decides whether the top cluster is complete
    let fine = lowest_eigenpairs(&assemble_unchecked(data, n_grid)?, k + 1, opts)?;
    let coarse = lowest_eigenpairs(&assemble_unchecked(data, coarse_grid)?, k + 1, opts)?;
    let errors: Vec<f64> = fine.values.iter().zip(&coarse.values).map(|(a, b)| (a - b).abs()).collect();
    let groups = cluster_eigenvalues(&fine.values, &errors, CLUSTER_FACTOR);

    let nu = data.nu();
    let n = data.n() as f64;
    let vol = data.lattice().cell_volume();
    let mut clusters = Vec::new();
    for group in &groups {
        let members: Vec<usize> = group.iter().copied().filter(|&i| i < k).collect();
        if members.is_empty() {
            continue;
        }
        let eigenvalues: Vec<f64> = members.iter().map(|&i| fine.values[i]).collect();
        let center = eigenvalues.iter().sum::<f64>() / eigenvalues.len() as f64;
        let level = ((center / nu - n) / 2.0).round().max(0.0) as usize;
        let expected_value = nu * (2.0 * level as f64 + n);
        clusters.push(Cluster {
            center,
            multiplicity: eigenvalues.len(),
            eigenvalues,
            level,
            expected_value,
            relative_error: (center - expected_value).abs() / expected_value,
            expected_multiplicity: closed_dimension(data.n(), level, nu, vol),
            complete: !group.contains(&k),
        });
    }
    let midgap = nu * (1.0 + n);
    let midgap_distance = fine.values[..k].iter().map(|v| (v - midgap).abs()).fold(f64::INFINITY, f64::min);
    Ok(SpectralReport {
        nu,
        grid: n_grid,
        coarse_grid,
        eigenvalues: fine.values[..k].to_vec(),
        coarse_eigenvalues: coarse.values[..k].to_vec(),
        error_estimates: errors[..k].to_vec(),
        clusters,
        midgap_distance,
        max_residual: fine.residuals[..k].iter().copied().fold(0.0, f64::max),
        iterations: fine.iterations + coarse.iterations,
    })
}
