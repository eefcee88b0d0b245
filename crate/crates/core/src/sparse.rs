//! Sparse synthesis and recovery over a dictionary.
//!
//! Recovery is orthogonal matching pursuit: greedy selection by correlation
//! with the residual, followed by a least-squares refit on the selected atoms.
//! For a `μ`-coherent dictionary, OMP recovers every `k`-sparse signal with
//! `k < (1 + 1/μ)/2`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::{inner_unchecked, Signal, C64};

/// Smallest Gram eigenvalue accepted for a least-squares refit.
pub const MIN_GRAM_EIGENVALUE: f64 = 1e-10;
/// Default stopping tolerance, relative to `‖f‖`.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseRepresentation {
    pub support: Vec<usize>,
    pub coefficients: Vec<C64>,
    pub residual_norm: f64,
    /// Residual norm after each selection step.
    pub residual_history: Vec<f64>,
}

impl SparseRepresentation {
    pub fn empty() -> Self {
        SparseRepresentation {
            support: Vec::new(),
            coefficients: Vec::new(),
            residual_norm: 0.0,
            residual_history: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Omp,
    /// Single-pass correlation thresholding with a least-squares refit.
    Thresholding,
}

/// `Σ a_φ·φ`.
pub fn synthesize(dict: &Dictionary, support: &[usize], coefficients: &[C64]) -> Result<Signal> {
    if support.len() != coefficients.len() {
        return Err(Error::DimensionMismatch {
            expected: support.len(),
            got: coefficients.len(),
        });
    }
    let mut out = Signal::zeros(dict.p() as usize);
    for (&i, &a) in support.iter().zip(coefficients) {
        out.axpy(a, &dict.atom(i)?.vector)?;
    }
    Ok(out)
}

fn correlations(dict: &Dictionary, r: &Signal) -> Vec<f64> {
    dict.atoms
        .iter()
        .map(|a| inner_unchecked(r.entries(), a.vector.entries()).norm())
        .collect()
}

/// First index of the maximum; NaN-free input assumed.
fn argmax(values: &[f64], skip: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Least-squares coefficients of `f` on the given atoms and the residual.
fn refit(dict: &Dictionary, support: &[usize], f: &Signal) -> Result<(Vec<C64>, Signal)> {
    let n = f.len();
    let k = support.len();
    let a = DMatrix::from_fn(n, k, |t, c| dict.atoms[support[c]].vector.entries()[t]);
    let gram = a.adjoint() * &a;
    let min_eig = SymmetricEigen::new(gram.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < MIN_GRAM_EIGENVALUE {
        return Err(Error::IllConditioned);
    }
    let rhs = a.adjoint() * DVector::from_column_slice(f.entries());
    let x = gram
        .cholesky()
        .ok_or(Error::IllConditioned)?
        .solve(&rhs);
    let approx = &a * &x;
    let residual = Signal::new(
        f.entries()
            .iter()
            .zip(approx.iter())
            .map(|(y, z)| y - z)
            .collect(),
    );
    Ok((x.iter().copied().collect(), residual))
}

/// Orthogonal matching pursuit. Stops once the residual norm is at most
/// `residual_tol` or `max_support` atoms are selected.
pub fn omp(
    dict: &Dictionary,
    f: &Signal,
    max_support: usize,
    residual_tol: f64,
) -> Result<SparseRepresentation> {
    if max_support == 0 {
        return Err(Error::InvalidArgument("max_support must be at least 1".into()));
    }
    if dict.is_empty() {
        return Err(Error::InvalidArgument("empty dictionary".into()));
    }
    if f.len() != dict.p() as usize {
        return Err(Error::DimensionMismatch {
            expected: dict.p() as usize,
            got: f.len(),
        });
    }
    let mut rep = SparseRepresentation::empty();
    let mut residual = f.clone();
    rep.residual_norm = residual.norm();
    while rep.residual_norm > residual_tol && rep.support.len() < max_support {
        let corr = correlations(dict, &residual);
        let Some(next) = argmax(&corr, &rep.support) else {
            break;
        };
        rep.support.push(next);
        let (coef, r) = refit(dict, &rep.support, f)?;
        rep.coefficients = coef;
        residual = r;
        rep.residual_norm = residual.norm();
        rep.residual_history.push(rep.residual_norm);
    }
    Ok(rep)
}

/// Picks the `k` atoms best correlated with `f` in one pass, then refits.
pub fn thresholding(dict: &Dictionary, f: &Signal, k: usize) -> Result<SparseRepresentation> {
    if k == 0 || k > dict.len() {
        return Err(Error::InvalidArgument(format!("bad support size {k}")));
    }
    if f.norm() == 0.0 {
        return Ok(SparseRepresentation::empty());
    }
    let corr = correlations(dict, f);
    let mut order: Vec<usize> = (0..dict.len()).collect();
    order.sort_by(|&i, &j| corr[j].total_cmp(&corr[i]).then(i.cmp(&j)));
    let support: Vec<usize> = order[..k].to_vec();
    let (coefficients, residual) = refit(dict, &support, f)?;
    let residual_norm = residual.norm();
    Ok(SparseRepresentation {
        support,
        coefficients,
        residual_norm,
        residual_history: vec![residual_norm],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub algorithm: Algorithm,
    pub prime: u64,
    pub atoms: usize,
    pub sparsity: usize,
    pub trials: usize,
    pub seed: u64,
    pub successes: usize,
    pub success_rate: f64,
    /// Trials where the solver returned an error (counted as failures).
    pub errors: usize,
    /// Quantiles (min, median, 90%, max) of the coefficient max-error over
    /// successful trials.
    pub coefficient_error_quantiles: [f64; 4],
}

#[derive(Clone, Debug)]
struct Trial {
    success: bool,
    errored: bool,
    coefficient_error: f64,
}

/// Draws the trial's support (sorted) and unit-modulus coefficients.
pub fn draw_trial(n_atoms: usize, sparsity: usize, seed: u64, trial: u64) -> (Vec<usize>, Vec<C64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut support = sample(&mut rng, n_atoms, sparsity).into_vec();
    support.sort_unstable();
    let coefficients = support
        .iter()
        .map(|_| C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    (support, coefficients)
}

/// Monte-Carlo exact-support recovery rate for random `sparsity`-sparse
/// signals with unit-magnitude, uniform-phase coefficients.
pub fn recovery_experiment(
    dict: &Dictionary,
    sparsity: usize,
    trials: usize,
    seed: u64,
    algorithm: Algorithm,
) -> Result<RecoveryReport> {
    if sparsity == 0 || sparsity > dict.len() {
        return Err(Error::InvalidArgument(format!("bad sparsity {sparsity}")));
    }
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (support, coefficients) = draw_trial(dict.len(), sparsity, seed, t);
            let f = synthesize(dict, &support, &coefficients).expect("indices in range");
            let tol = DEFAULT_RELATIVE_TOL * f.norm();
            let rep = match algorithm {
                Algorithm::Omp => omp(dict, &f, sparsity, tol),
                Algorithm::Thresholding => thresholding(dict, &f, sparsity),
            };
            match rep {
                Err(_) => Trial {
                    success: false,
                    errored: true,
                    coefficient_error: f64::INFINITY,
                },
                Ok(rep) => {
                    let mut pairs: Vec<(usize, C64)> =
                        rep.support.iter().copied().zip(rep.coefficients.iter().copied()).collect();
                    pairs.sort_by_key(|x| x.0);
                    let found: Vec<usize> = pairs.iter().map(|x| x.0).collect();
                    let success = found == support;
                    let coefficient_error = if success {
                        pairs
                            .iter()
                            .zip(&coefficients)
                            .map(|((_, a), b)| (a - b).norm())
                            .fold(0.0, f64::max)
                    } else {
                        f64::INFINITY
                    };
                    Trial {
                        success,
                        errored: false,
                        coefficient_error,
                    }
                }
            }
        })
        .collect();
    let successes = results.iter().filter(|t| t.success).count();
    let mut errs: Vec<f64> = results
        .iter()
        .filter(|t| t.success)
        .map(|t| t.coefficient_error)
        .collect();
    errs.sort_by(f64::total_cmp);
    let q = |frac: f64| {
        if errs.is_empty() {
            f64::NAN
        } else {
            errs[((errs.len() - 1) as f64 * frac).round() as usize]
        }
    };
    Ok(RecoveryReport {
        algorithm,
        prime: dict.p(),
        atoms: dict.len(),
        sparsity,
        trials,
        seed,
        successes,
        success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        errors: results.iter().filter(|t| t.errored).count(),
        coefficient_error_quantiles: [q(0.0), q(0.5), q(0.9), q(1.0)],
    })
}
