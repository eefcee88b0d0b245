//! The finite Heisenberg group `H = V × F_p` and its Schrödinger model.
//!
//! Group law: `(v, z)·(v', z') = (v + v', z + z' + ½ω(v, v'))` with
//! `ω((τ, w), (τ', w')) = τw' − wτ'`.
//!
//! `π(τ, 0)` translates, `π(0, w)` modulates by `ψ(wt)`, and the center acts
//! by `ψ(z)` where `ψ(z) = e^{2πiz/p}`. A general element is synthesized as
//! `π(τ, w, z) = ψ(z)·ψ(−½τw)·π(τ, 0)·π(0, w)`, which makes `π` an honest
//! homomorphism for the group law above.

use std::f64::consts::PI;

use crate::ff::{Fp, FpField};
use crate::linalg::{Operator, Signal, C64};

/// A point `(τ, w)` of the symplectic plane `V = F_p²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlanePoint {
    pub tau: Fp,
    pub w: Fp,
}

impl PlanePoint {
    pub fn new(tau: Fp, w: Fp) -> Self {
        PlanePoint { tau, w }
    }

    pub fn is_zero(&self) -> bool {
        self.tau.is_zero() && self.w.is_zero()
    }

    /// Lifts to `H` with central coordinate `0`.
    pub fn lift(self) -> HeisenbergElement {
        HeisenbergElement {
            tau: self.tau,
            w: self.w,
            z: self.tau.field().zero(),
        }
    }
}

/// `ω(v, v') = τw' − wτ'`.
pub fn omega(v: PlanePoint, v2: PlanePoint) -> Fp {
    v.tau * v2.w - v.w * v2.tau
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub tau: Fp,
    pub w: Fp,
    pub z: Fp,
}

impl HeisenbergElement {
    pub fn new(tau: Fp, w: Fp, z: Fp) -> Self {
        HeisenbergElement { tau, w, z }
    }

    pub fn identity(field: FpField) -> Self {
        let o = field.zero();
        HeisenbergElement { tau: o, w: o, z: o }
    }

    pub fn plane(&self) -> PlanePoint {
        PlanePoint::new(self.tau, self.w)
    }

    pub fn inverse(&self) -> Self {
        HeisenbergElement {
            tau: -self.tau,
            w: -self.w,
            z: -self.z,
        }
    }

    /// The three generators `(1,0,0)`, `(0,1,0)`, `(0,0,1)`.
    pub fn generators(field: FpField) -> [HeisenbergElement; 3] {
        let (o, l) = (field.zero(), field.one());
        [
            HeisenbergElement::new(l, o, o),
            HeisenbergElement::new(o, l, o),
            HeisenbergElement::new(o, o, l),
        ]
    }
}

pub fn h_mul(h1: HeisenbergElement, h2: HeisenbergElement) -> HeisenbergElement {
    let half = h1.tau.field().half();
    HeisenbergElement {
        tau: h1.tau + h2.tau,
        w: h1.w + h2.w,
        z: h1.z + h2.z + half * omega(h1.plane(), h2.plane()),
    }
}

/// `ψ(x) = e^{2πix/p}`.
#[inline]
pub fn psi(x: Fp) -> C64 {
    psi_raw(x.value(), x.modulus())
}

#[inline]
pub(crate) fn psi_raw(x: u64, p: u64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (x % p) as f64 / p as f64)
}

/// Phase and source index: `π(h)[f](t) = phase(t) · f(t + τ)`.
fn pi_parts(h: HeisenbergElement) -> (u64, impl Fn(u64) -> C64) {
    let field = h.tau.field();
    let p = field.p();
    let base = h.z - field.half() * h.tau * h.w;
    let (tau, w, base) = (h.tau.value(), h.w.value(), base.value());
    (tau, move |t: u64| psi_raw(base + w * ((t + tau) % p), p))
}

/// Dense matrix of `π(h)`.
pub fn pi(h: HeisenbergElement) -> Operator {
    let p = h.tau.modulus();
    let (tau, phase) = pi_parts(h);
    Operator::from_fn(p as usize, |t, s| {
        if s as u64 == (t as u64 + tau) % p {
            phase(t as u64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .assume_unitary()
}

/// `π(h)·f` in `O(p)`.
pub fn pi_apply(h: HeisenbergElement, f: &Signal) -> Signal {
    let p = h.tau.modulus();
    let (tau, phase) = pi_parts(h);
    let src = f.entries();
    Signal::new(
        (0..p)
            .map(|t| phase(t) * src[((t + tau) % p) as usize])
            .collect(),
    )
}
