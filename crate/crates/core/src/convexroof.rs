//! Numerical convex roof of the pure-state concurrence.
//!
//! Every decomposition of `rho = sum_j mu_j |e_j><e_j|` into `m` pure states is
//! `|phi_i> = sum_j v_ij sqrt(mu_j) |e_j>` for some `m x r` isometry `v`. The
//! search runs over unconstrained complex `m x r` matrices `z` mapped onto
//! isometries by the Q factor of their QR decomposition, so every iterate is
//! a valid decomposition. Descent is L-BFGS on central-difference gradients
//! with Armijo backtracking, repeated from seeded random starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C64, ZERO};
use crate::measures::{pure_c3, Family};
use crate::qsys::{DensityMatrix, PureState, DIM};

/// Members lighter than this are dropped from an ensemble.
pub const MIN_WEIGHT: f64 = 1e-14;
const ISOMETRY_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-6;
const LBFGS_MEMORY: usize = 12;
/// Memory is cleared and `z` re-orthonormalized this often.
const RESET_EVERY: usize = 60;

/// Probability-weighted pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(p, _)| p).sum()
    }

    /// `sum_i p_i |psi_i><psi_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(DIM, DIM);
        for (p, psi) in &self.members {
            let a = psi.amplitudes();
            out = &out + &ComplexMatrix::outer(a, a).scale_real(*p);
        }
        out
    }

    /// `sum_i p_i C3(psi_i)`, unnormalized.
    pub fn average_c3(&self) -> f64 {
        self.members.iter().map(|(p, psi)| p * pure_c3(psi)).sum()
    }
}

/// Eigenbasis of `rho` restricted to its numerically nonzero spectrum.
#[derive(Clone, Debug)]
struct Support {
    /// Columns `sqrt(mu_j) e_j`, one per retained eigenvalue.
    scaled: Vec<[C64; DIM]>,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        let eig = hermitian_eigen(rho.matrix())?;
        let tol = 1e-10 * eig.max_abs();
        let scaled: Vec<[C64; DIM]> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &mu)| mu > tol && mu > 0.0)
            .map(|(j, &mu)| std::array::from_fn(|row| eig.vectors[(row, j)] * mu.sqrt()))
            .collect();
        if scaled.is_empty() {
            return Err(Error::Degenerate);
        }
        Ok(Self { scaled })
    }

    fn rank(&self) -> usize {
        self.scaled.len()
    }

    /// Unnormalized `|phi_i>` for row `i` of the isometry.
    fn member(&self, v_row: &[C64]) -> [C64; DIM] {
        let mut phi = [ZERO; DIM];
        for (coef, col) in v_row.iter().zip(&self.scaled) {
            for (p, c) in phi.iter_mut().zip(col) {
                *p += coef * c;
            }
        }
        phi
    }
}

/// `p * C3(phi / sqrt(p))` for unnormalized `phi` with `p = <phi|phi>`,
/// written so that it stays smooth in `phi`.
fn weighted_c3(phi: &[C64; DIM]) -> f64 {
    let p: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
    if p < MIN_WEIGHT {
        return 0.0;
    }
    let mut purity_sum = 0.0;
    for bit in [2usize, 1, 0] {
        let mask = 1 << bit;
        // reduced matrix entries of the kept qubit: r00, r11 real, r01 complex
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
        for i in 0..DIM {
            if i & mask == 0 {
                let j = i | mask;
                r00 += phi[i].norm_sqr();
                r11 += phi[j].norm_sqr();
                r01 += phi[i] * phi[j].conj();
            }
        }
        purity_sum += r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    }
    ((3.0 * p * p - purity_sum) / 3.0).max(0.0).sqrt()
}

/// Builds the decomposition generated by an `m x r` isometry `v`.
pub fn ensemble_from_isometry(rho: &DensityMatrix, v: &ComplexMatrix) -> Result<Ensemble> {
    let support = Support::of(rho)?;
    if v.cols() != support.rank() || v.rows() < v.cols() {
        return Err(Error::DimensionMismatch {
            left: v.cols(),
            right: support.rank(),
        });
    }
    let deviation = (&v.adjoint() * v).distance(&ComplexMatrix::identity(v.cols()));
    if deviation > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    Ok(ensemble_from_rows(&support, v))
}

fn ensemble_from_rows(support: &Support, v: &ComplexMatrix) -> Ensemble {
    let members = (0..v.rows())
        .filter_map(|i| {
            let phi = support.member(v.row(i));
            let p: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
            if p < MIN_WEIGHT {
                return None;
            }
            let s = p.sqrt();
            Some((p, PureState::new(phi.map(|a| a / s)).ok()?))
        })
        .collect();
    Ensemble { members }
}

/// Orthonormalizes the columns of a row-major `rows x cols` buffer in place
/// (modified Gram-Schmidt, applied twice). Returns `false` if they are
/// numerically dependent.
fn orthonormalize_columns(a: &mut [C64], rows: usize, cols: usize) -> bool {
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let mut proj = ZERO;
                for i in 0..rows {
                    proj += a[i * cols + k].conj() * a[i * cols + j];
                }
                for i in 0..rows {
                    let q = a[i * cols + k];
                    a[i * cols + j] -= proj * q;
                }
            }
        }
        let norm = (0..rows)
            .map(|i| a[i * cols + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm.is_nan() || norm <= 1e-12 {
            return false;
        }
        for i in 0..rows {
            a[i * cols + j] /= norm;
        }
    }
    true
}

/// Q factor of `z`; `None` when `z` is rank deficient.
fn orthonormalize(z: &ComplexMatrix) -> Option<ComplexMatrix> {
    let mut data = z.as_slice().to_vec();
    orthonormalize_columns(&mut data, z.rows(), z.cols())
        .then(|| ComplexMatrix::from_fn(z.rows(), z.cols(), |i, j| data[i * z.cols() + j]))
}

#[derive(Clone, Copy, Debug)]
pub struct RoofSettings {
    /// Number of ensemble members; defaults to `rank^2`.
    pub cardinality: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for RoofSettings {
    fn default() -> Self {
        Self {
            cardinality: None,
            restarts: 32,
            seed: 0,
            max_iterations: 1500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoofResult {
    pub value_raw: f64,
    pub value_normalized: f64,
    pub best_ensemble: Ensemble,
    pub restarts_used: usize,
    pub converged: bool,
    /// Rank of the input state.
    pub rank: usize,
}

/// Objective over flattened `z` (real parts then imaginary parts).
struct Problem<'a> {
    support: &'a Support,
    rows: usize,
}

impl Problem<'_> {
    fn cols(&self) -> usize {
        self.support.rank()
    }

    fn unpack(&self, x: &[f64]) -> ComplexMatrix {
        let n = self.rows * self.cols();
        ComplexMatrix::from_fn(self.rows, self.cols(), |i, j| {
            let k = i * self.cols() + j;
            C64::new(x[k], x[n + k])
        })
    }

    fn pack(&self, z: &ComplexMatrix) -> Vec<f64> {
        let mut x: Vec<f64> = z.as_slice().iter().map(|c| c.re).collect();
        x.extend(z.as_slice().iter().map(|c| c.im));
        x
    }

    fn value_of_isometry(&self, v: &ComplexMatrix) -> f64 {
        (0..v.rows())
            .map(|i| weighted_c3(&self.support.member(v.row(i))))
            .sum()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (rows, cols) = (self.rows, self.cols());
        let n = rows * cols;
        let mut v: Vec<C64> = (0..n).map(|k| C64::new(x[k], x[n + k])).collect();
        if !orthonormalize_columns(&mut v, rows, cols) {
            return f64::INFINITY;
        }
        v.chunks_exact(cols)
            .map(|row| weighted_c3(&self.support.member(row)))
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut probe = x.to_vec();
        (0..x.len())
            .map(|k| {
                let orig = probe[k];
                probe[k] = orig + FD_STEP;
                let up = self.value(&probe);
                probe[k] = orig - FD_STEP;
                let down = self.value(&probe);
                probe[k] = orig;
                let g = (up - down) / (2.0 * FD_STEP);
                if g.is_finite() {
                    g
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of one local descent.
struct Descent {
    value: f64,
    isometry: ComplexMatrix,
    converged: bool,
}

/// L-BFGS with Armijo backtracking. Every accepted step lowers the objective.
fn descend(problem: &Problem, start: ComplexMatrix, max_iterations: usize) -> Descent {
    let mut x = problem.pack(&start);
    let mut f = problem.value(&x);
    let mut g = problem.gradient(&x);
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut last_improvement = f64::INFINITY;
    let mut small_steps = 0;

    for iteration in 0..max_iterations {
        if iteration > 0 && iteration % RESET_EVERY == 0 {
            // re-orthonormalize without changing the objective
            if let Some(v) = orthonormalize(&problem.unpack(&x)) {
                x = problem.pack(&v);
                g = problem.gradient(&x);
            }
            history.clear();
        }

        let mut direction = two_loop(&g, &history);
        if dot(&direction, &g) >= 0.0 {
            history.clear();
            direction = g.iter().map(|v| -v).collect();
        }
        let slope = dot(&direction, &g);
        if slope.abs() < 1e-300 {
            last_improvement = 0.0;
            break;
        }

        let mut step = 1.0;
        if history.is_empty() {
            // first step: unit length in parameter space
            let norm = dot(&direction, &direction).sqrt();
            step = (0.1 / norm).min(1.0);
        }
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(a, d)| a + step * d)
                .collect();
            let ft = problem.value(&trial);
            if ft <= f + 1e-4 * step * slope && ft < f {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            if history.is_empty() {
                // steepest descent found nothing either
                last_improvement = 0.0;
                break;
            }
            history.clear();
            continue;
        };

        let g_new = problem.gradient(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            history.push((s, y, 1.0 / sy));
            if history.len() > LBFGS_MEMORY {
                history.remove(0);
            }
        }

        last_improvement = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;

        if last_improvement < 1e-11 {
            small_steps += 1;
            if small_steps >= 5 {
                break;
            }
        } else {
            small_steps = 0;
        }
    }

    let isometry = orthonormalize(&problem.unpack(&x)).unwrap_or(start);
    Descent {
        value: problem.value_of_isometry(&isometry),
        isometry,
        converged: last_improvement < 1e-9,
    }
}

fn two_loop(g: &[f64], history: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

/// Random starting point for restart `index`; depends only on `(seed, index)`.
fn random_start(rows: usize, cols: usize, seed: u64, index: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Smallest average concurrence found over decompositions of `rho`.
pub fn roof_minimize(
    rho: &DensityMatrix,
    family: Family,
    settings: &RoofSettings,
) -> Result<RoofResult> {
    let support = Support::of(rho)?;
    let rank = support.rank();
    let rows = settings.cardinality.unwrap_or(rank * rank);
    if rows < rank {
        return Err(Error::BadRoofSettings(format!(
            "cardinality {rows} is below the rank {rank}"
        )));
    }
    if settings.restarts == 0 {
        return Err(Error::BadRoofSettings(
            "at least one restart is required".into(),
        ));
    }
    let problem = Problem {
        support: &support,
        rows,
    };

    let runs: Vec<Descent> = (0..settings.restarts)
        .into_par_iter()
        .map(|index| {
            let start = if rank == 1 {
                ComplexMatrix::identity(1)
            } else {
                random_start(rows, rank, settings.seed, index)
            };
            let start = orthonormalize(&start).unwrap_or_else(|| padded_identity(rows, rank));
            descend(&problem, start, settings.max_iterations)
        })
        .collect();

    // lowest value wins, ties go to the lowest restart index
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.value < best.value { run } else { best })
        .expect("at least one restart");

    let ensemble = ensemble_from_rows(&support, &best.isometry);
    let value_raw = best.value;
    Ok(RoofResult {
        value_raw,
        value_normalized: value_raw * family.c3_factor(),
        best_ensemble: ensemble,
        restarts_used: settings.restarts,
        converged: best.converged,
        rank,
    })
}

fn padded_identity(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(
        rows,
        cols,
        |i, j| if i == j { C64::new(1.0, 0.0) } else { ZERO },
    )
}
