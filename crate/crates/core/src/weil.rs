//! The Weil representation of `SL₂(F_p)`, realized up to unimodular scalars.
//!
//! Building blocks:
//! - `S_a[f](t) = σ(a)·f(a⁻¹t)` for the diagonal torus,
//! - `M_u[f](t) = ψ(−(u/2)t²)·f(t)` for lower unipotents,
//! - `F[f](w) = p^{-1/2}·Σ_t ψ(wt)·f(t)` for the Weyl element.
//!
//! A general `ρ(g)` is `M_{u₂}·S_a` or `M_{u₂}·S_a·F·M_{u₁}` following the
//! Bruhat cell of `g`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::ff::{Fp, FpField};
use crate::heisenberg::{pi, psi, psi_raw, HeisenbergElement};
use crate::linalg::{scalar_defect, Operator, Signal, C64};
use crate::symplectic::{bruhat, sp_action, BruhatCell, BruhatFactorization, SL2Element};

pub fn scaling_op(a: Fp) -> Result<Operator> {
    let ai = a.inv()?;
    let sign = a.legendre() as f64;
    let p = a.modulus();
    Ok(Operator::from_fn(p as usize, |t, s| {
        if s as u64 == (ai.value() * t as u64) % p {
            C64::new(sign, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .assume_unitary())
}

/// Diagonal of `M_u`.
fn chirp_diag(u: Fp) -> Vec<C64> {
    let k = u.field();
    let coeff = -(u * k.half());
    k.elements().map(|t| psi(coeff * t * t)).collect()
}

pub fn chirp_op(u: Fp) -> Operator {
    Operator::diagonal(&chirp_diag(u)).assume_unitary()
}

pub fn fourier_op(field: FpField) -> Operator {
    let p = field.p();
    let s = 1.0 / (p as f64).sqrt();
    Operator::from_fn(p as usize, |w, t| psi_raw(w as u64 * t as u64 % p, p) * s).assume_unitary()
}

/// `ρ(g)` as a dense unitary with its Bruhat data.
#[derive(Clone, Debug)]
pub struct WeilOperator {
    pub matrix: Operator,
    pub source: SL2Element,
    pub factorization: BruhatFactorization,
}

/// Dense `ρ(g)`, entries computed directly from the factor formulas in `O(p²)`.
pub fn rho(g: &SL2Element) -> WeilOperator {
    let k = g.field();
    let p = k.p();
    let fac = bruhat(g);
    let m2 = chirp_diag(fac.u2);
    let ai = fac.a.inv().expect("torus parameter is nonzero");
    let sign = fac.a.legendre() as f64;
    let matrix = match fac.cell {
        BruhatCell::Small => Operator::from_fn(p as usize, |t, s| {
            if s as u64 == ai.value() * t as u64 % p {
                m2[t] * sign
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        BruhatCell::Big => {
            let m1 = chirp_diag(fac.u1);
            let scale = sign / (p as f64).sqrt();
            Operator::from_fn(p as usize, |t, s| {
                let row = ai.value() * t as u64 % p;
                m2[t] * psi_raw(row * s as u64 % p, p) * m1[s] * scale
            })
        }
    }
    .assume_unitary();
    WeilOperator {
        matrix,
        source: *g,
        factorization: fac,
    }
}

/// `ρ(g)` composed literally from the building-block matrices.
pub fn rho_composed(g: &SL2Element) -> Operator {
    let fac = bruhat(g);
    let head = chirp_op(fac.u2)
        .compose(&scaling_op(fac.a).expect("nonzero"))
        .expect("same size");
    match fac.cell {
        BruhatCell::Small => head,
        BruhatCell::Big => head
            .compose(&fourier_op(g.field()))
            .and_then(|x| x.compose(&chirp_op(fac.u1)))
            .expect("same size"),
    }
}

/// `min_λ ‖ρ(g)·π(h)·ρ(g)⁻¹ − λ·π(g·h)‖_max`.
pub fn egorov_defect(g: &SL2Element, h: HeisenbergElement) -> f64 {
    let r = rho(g).matrix;
    let lhs = r
        .compose(&pi(h))
        .and_then(|x| x.compose(&r.adjoint()))
        .expect("same size");
    scalar_defect(&lhs, &pi(sp_action(g, h)))
}

/// `min_λ ‖ρ(g)·ρ(h) − λ·ρ(gh)‖_max`.
pub fn multiplicativity_defect(g: &SL2Element, h: &SL2Element) -> f64 {
    let lhs = rho(g).matrix.compose(&rho(h).matrix).expect("same size");
    scalar_defect(&lhs, &rho(&g.mul(h)).matrix)
}

/// Applies `ρ(g)` factor by factor, with `F` through an FFT: `O(p log p)`
/// per vector.
#[derive(Clone)]
pub struct FastWeil {
    field: FpField,
    fft: Arc<dyn Fft<f64>>,
}

impl FastWeil {
    pub fn new(field: FpField) -> Self {
        // ψ(wt) = e^{+2πiwt/p} is the unnormalized inverse transform
        let fft = FftPlanner::new().plan_fft_inverse(field.size());
        FastWeil { field, fft }
    }

    pub fn field(&self) -> FpField {
        self.field
    }

    /// Prepared factor data for repeated application of one `ρ(g)`.
    pub fn prepare(&self, g: &SL2Element) -> PreparedWeil {
        let fac = bruhat(g);
        let p = self.field.p();
        let ai = fac.a.inv().expect("nonzero");
        PreparedWeil {
            cell: fac.cell,
            m1: chirp_diag(fac.u1),
            m2: chirp_diag(fac.u2),
            source_index: (0..p).map(|t| (ai.value() * t % p) as usize).collect(),
            sign: fac.a.legendre() as f64,
        }
    }

    pub fn apply(&self, op: &PreparedWeil, f: &Signal) -> Result<Signal> {
        let n = self.field.size();
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
        let mut buf = f.entries().to_vec();
        let mut sign = op.sign;
        if op.cell == BruhatCell::Big {
            for (x, m) in buf.iter_mut().zip(&op.m1) {
                *x *= m;
            }
            self.fft.process(&mut buf);
            sign /= (n as f64).sqrt();
        }
        Ok(Signal::new(
            (0..n)
                .map(|t| op.m2[t] * buf[op.source_index[t]] * sign)
                .collect(),
        ))
    }
}

/// Factor data of one `ρ(g)` for [`FastWeil::apply`].
#[derive(Clone, Debug)]
pub struct PreparedWeil {
    cell: BruhatCell,
    m1: Vec<C64>,
    m2: Vec<C64>,
    source_index: Vec<usize>,
    sign: f64,
}
