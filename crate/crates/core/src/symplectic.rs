//! `SL₂(F_p)`: arithmetic, Bruhat factorization and maximal tori.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ff::{prime_divisors, Fp, FpField};
use crate::heisenberg::HeisenbergElement;

/// `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SL2Element {
    pub a: Fp,
    pub b: Fp,
    pub c: Fp,
    pub d: Fp,
}

impl SL2Element {
    pub fn new(a: Fp, b: Fp, c: Fp, d: Fp) -> Result<Self> {
        let g = SL2Element { a, b, c, d };
        if (a * d - b * c) != a.field().one() {
            return Err(Error::InvalidArgument(format!(
                "determinant of [[{a}, {b}], [{c}, {d}]] is not 1"
            )));
        }
        Ok(g)
    }

    /// Builds from integers; panics unless the determinant is 1.
    pub fn from_ints(field: FpField, a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(field.elem(a), field.elem(b), field.elem(c), field.elem(d))
            .expect("determinant must be 1")
    }

    pub fn identity(field: FpField) -> Self {
        Self::from_ints(field, 1, 0, 0, 1)
    }

    /// The Weyl element `[[0, 1], [−1, 0]]`.
    pub fn weyl(field: FpField) -> Self {
        Self::from_ints(field, 0, 1, -1, 0)
    }

    /// `[[1, 0], [u, 1]]`.
    pub fn lower_unipotent(u: Fp) -> Self {
        let k = u.field();
        SL2Element {
            a: k.one(),
            b: k.zero(),
            c: u,
            d: k.one(),
        }
    }

    /// `[[a, 0], [0, a⁻¹]]`.
    pub fn diag(a: Fp) -> Result<Self> {
        let k = a.field();
        Ok(SL2Element {
            a,
            b: k.zero(),
            c: k.zero(),
            d: a.inv()?,
        })
    }

    pub fn field(&self) -> FpField {
        self.a.field()
    }

    pub fn key(&self) -> [u64; 4] {
        [self.a.value(), self.b.value(), self.c.value(), self.d.value()]
    }

    pub fn trace(&self) -> Fp {
        self.a + self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field())
    }

    pub fn mul(&self, h: &SL2Element) -> SL2Element {
        SL2Element {
            a: self.a * h.a + self.b * h.c,
            b: self.a * h.b + self.b * h.d,
            c: self.c * h.a + self.d * h.c,
            d: self.c * h.b + self.d * h.d,
        }
    }

    /// Adjugate inverse `[[d, −b], [−c, a]]`.
    pub fn inv(&self) -> SL2Element {
        SL2Element {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pow(&self, mut e: u64) -> SL2Element {
        let mut acc = Self::identity(self.field());
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, h: &SL2Element) -> SL2Element {
        self.mul(h).mul(&self.inv())
    }

    /// True when the order is exactly `n`.
    pub fn has_order(&self, n: u64) -> bool {
        self.pow(n).is_identity() && prime_divisors(n).iter().all(|q| !self.pow(n / q).is_identity())
    }

    /// Order by repeated multiplication; at most `2p` for `SL₂(F_p)`.
    pub fn order(&self) -> u64 {
        let id = Self::identity(self.field());
        let mut x = *self;
        let mut n = 1;
        while x != id {
            x = x.mul(self);
            n += 1;
        }
        n
    }
}

/// All of `SL₂(F_p)` in lexicographic `(a, b, c, d)` order.
pub fn sl2_elements(field: FpField) -> Vec<SL2Element> {
    let p = field.p() as i64;
    let mut out = Vec::with_capacity((p * p * p - p) as usize);
    for a in 0..p {
        for b in 0..p {
            let (fa, fb) = (field.elem(a), field.elem(b));
            if a != 0 {
                let ai = fa.inv().expect("nonzero");
                for c in 0..p {
                    let fc = field.elem(c);
                    let d = (field.one() + fb * fc) * ai;
                    out.push(SL2Element { a: fa, b: fb, c: fc, d });
                }
            } else if b != 0 {
                let c = -fb.inv().expect("nonzero");
                for d in 0..p {
                    out.push(SL2Element { a: fa, b: fb, c, d: field.elem(d) });
                }
            }
        }
    }
    out
}

/// `g·(τ, w, z) = (aτ + bw, cτ + dw, z)`.
pub fn sp_action(g: &SL2Element, h: HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        tau: g.a * h.tau + g.b * h.w,
        w: g.c * h.tau + g.d * h.w,
        z: h.z,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BruhatCell {
    Small,
    Big,
}

/// `g = U(u2)·A(a)` (small cell) or `g = U(u2)·A(a)·w·U(u1)` (big cell), where
/// `U(u) = [[1, 0], [u, 1]]`, `A(a) = diag(a, a⁻¹)` and `w` is the Weyl element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruhatFactorization {
    pub cell: BruhatCell,
    pub u1: Fp,
    pub a: Fp,
    pub u2: Fp,
}

impl BruhatFactorization {
    pub fn reconstruct(&self) -> SL2Element {
        let k = self.a.field();
        let head = SL2Element::lower_unipotent(self.u2)
            .mul(&SL2Element::diag(self.a).expect("a is nonzero by construction"));
        match self.cell {
            BruhatCell::Small => head,
            BruhatCell::Big => head
                .mul(&SL2Element::weyl(k))
                .mul(&SL2Element::lower_unipotent(self.u1)),
        }
    }
}

pub fn bruhat(g: &SL2Element) -> BruhatFactorization {
    let k = g.field();
    if g.b.is_zero() {
        // [[a, 0], [u2 a, a⁻¹]]
        BruhatFactorization {
            cell: BruhatCell::Small,
            u1: k.zero(),
            a: g.a,
            u2: g.c * g.a.inv().expect("a ≠ 0 when b = 0"),
        }
    } else {
        // U(u2) A(a) w U(u1) = [[a u1, a], [u2 a u1 − a⁻¹, u2 a]]
        let bi = g.b.inv().expect("b ≠ 0");
        BruhatFactorization {
            cell: BruhatCell::Big,
            u1: g.a * bi,
            a: g.b,
            u2: g.d * bi,
        }
    }
}

/// The set of representatives `[[1, b], [c, 1 + bc]]`, one per split torus
/// `gAg⁻¹`. For `b ≠ 0`, `(b, c)` and `(−b, (1 + bc)/b)` give the same torus;
/// the lexicographically smaller pair is kept. Size `p(p+1)/2`.
pub fn split_representatives(field: FpField) -> Vec<SL2Element> {
    let p = field.p() as i64;
    let mut out = Vec::with_capacity((p * (p + 1) / 2) as usize);
    for b in 0..p {
        for c in 0..p {
            let (fb, fc) = (field.elem(b), field.elem(c));
            if b != 0 {
                let partner_b = (-fb).value();
                let partner_c = ((field.one() + fb * fc) * fb.inv().expect("nonzero")).value();
                if (partner_b, partner_c) < (b as u64, c as u64) {
                    continue;
                }
            }
            out.push(SL2Element {
                a: field.one(),
                b: fb,
                c: fc,
                d: field.one() + fb * fc,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    Split,
    Nonsplit,
}

/// A maximal torus `T = conjugator · T₀ · conjugator⁻¹`, with `T₀` the diagonal
/// torus (split) or the reference non-split torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusDescriptor {
    pub kind: TorusKind,
    pub conjugator: SL2Element,
    pub generator: SL2Element,
}

impl TorusDescriptor {
    pub fn order(&self) -> u64 {
        let p = self.generator.field().p();
        match self.kind {
            TorusKind::Split => p - 1,
            TorusKind::Nonsplit => p + 1,
        }
    }

    /// The split torus `gAg⁻¹`, generated by `g·diag(r, r⁻¹)·g⁻¹` with `r`
    /// the smallest generator of F_p^×.
    pub fn split(conjugator: SL2Element) -> Self {
        let r = conjugator.field().mult_generator();
        let gen = SL2Element::diag(r).expect("generator is nonzero");
        TorusDescriptor {
            kind: TorusKind::Split,
            conjugator,
            generator: conjugator.conjugate(&gen),
        }
    }

    /// Sorted element list; equal lists mean equal subgroups.
    pub fn elements(&self) -> Vec<[u64; 4]> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut x = self.generator;
        for _ in 0..self.order() {
            out.push(x.key());
            x = x.mul(&self.generator);
        }
        out.sort_unstable();
        out
    }
}

pub fn torus_generator(t: &TorusDescriptor) -> SL2Element {
    t.generator
}

/// Element of order `p + 1`: the companion matrix `[[0, −1], [1, t]]` for the
/// smallest trace `t` with `t² − 4` a non-square and the right order.
pub fn nonsplit_reference_generator(field: FpField) -> SL2Element {
    let p = field.p();
    field
        .elements()
        .filter(|t| (*t * *t - field.elem(4)).legendre() == -1)
        .map(|t| SL2Element::new(field.zero(), -field.one(), field.one(), t).expect("det 1"))
        .find(|g| g.has_order(p + 1))
        .expect("a non-split torus always contains an element of order p + 1")
}

/// All non-split maximal tori, as conjugates `g T₀ g⁻¹` of the reference torus
/// for `g` scanned in lexicographic order, deduplicated by subgroup equality.
///
/// There are `p(p − 1)/2` of them: the normalizer of a non-split torus has
/// order `2(p + 1)`.
pub fn nonsplit_tori(field: FpField) -> Vec<TorusDescriptor> {
    let p = field.p();
    let expected = (p * (p - 1) / 2) as usize;
    let t0 = nonsplit_reference_generator(field);
    let mut seen: HashSet<Vec<[u64; 4]>> = HashSet::with_capacity(expected);
    let mut out = Vec::with_capacity(expected);
    for g in sl2_elements(field) {
        let desc = TorusDescriptor {
            kind: TorusKind::Nonsplit,
            conjugator: g,
            generator: g.conjugate(&t0),
        };
        if seen.insert(desc.elements()) {
            out.push(desc);
            if out.len() == expected {
                break;
            }
        }
    }
    out
}

/// Split tori, one per element of [`split_representatives`].
pub fn split_tori(field: FpField) -> Vec<TorusDescriptor> {
    split_representatives(field)
        .into_iter()
        .map(TorusDescriptor::split)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::h_mul;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn field(p: u64) -> FpField {
        FpField::new(p).unwrap()
    }

    /// Every cyclic subgroup of the given order, by brute force over the group.
    fn brute_cyclic_subgroups(k: FpField, order: u64) -> BTreeSet<Vec<[u64; 4]>> {
        let id = SL2Element::identity(k);
        let mut out = BTreeSet::new();
        for g in sl2_elements(k) {
            if g.order() == order {
                let mut elems = vec![id.key()];
                let mut x = g;
                while x != id {
                    elems.push(x.key());
                    x = x.mul(&g);
                }
                elems.sort_unstable();
                out.insert(elems);
            }
        }
        out
    }

    #[test]
    fn sl2_enumeration_is_complete() {
        for p in [5, 7] {
            let k = field(p);
            let all = sl2_elements(k);
            assert_eq!(all.len() as u64, p * p * p - p);
            let keys: HashSet<_> = all.iter().map(|g| g.key()).collect();
            assert_eq!(keys.len(), all.len());
            assert!(all.windows(2).all(|w| w[0].key() < w[1].key()));
        }
    }

    #[test]
    fn mul_inv_examples() {
        let k = field(7);
        let g = SL2Element::from_ints(k, 2, 3, 3, 5);
        assert!(g.mul(&g.inv()).is_identity());
        assert_eq!(SL2Element::identity(k).mul(&g), g);
        let w = SL2Element::weyl(k);
        assert_eq!(w.mul(&w), SL2Element::from_ints(k, -1, 0, 0, -1));
        assert!(SL2Element::new(k.one(), k.one(), k.one(), k.one()).is_err());
    }

    #[test]
    fn action_examples() {
        let k = field(7);
        let h = HeisenbergElement::new(k.elem(2), k.elem(5), k.elem(3));
        assert_eq!(sp_action(&SL2Element::identity(k), h), h);
        let wh = sp_action(&SL2Element::weyl(k), h);
        assert_eq!((wh.tau, wh.w, wh.z), (k.elem(5), k.elem(-2), k.elem(3)));
        let center = HeisenbergElement::new(k.zero(), k.zero(), k.elem(4));
        assert_eq!(sp_action(&SL2Element::from_ints(k, 2, 3, 3, 5), center), center);
    }

    #[test]
    fn action_is_automorphism() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [5, 7, 11] {
            let k = field(p);
            let group = sl2_elements(k);
            for _ in 0..200 {
                let g = group[rng.gen_range(0..group.len())];
                let mut e = || k.elem(rng.gen_range(0..p) as i64);
                let h1 = HeisenbergElement::new(e(), e(), e());
                let h2 = HeisenbergElement::new(e(), e(), e());
                assert_eq!(
                    sp_action(&g, h_mul(h1, h2)),
                    h_mul(sp_action(&g, h1), sp_action(&g, h2))
                );
            }
        }
    }

    #[test]
    fn bruhat_examples() {
        let k = field(7);
        let f = bruhat(&SL2Element::identity(k));
        assert_eq!((f.cell, f.a, f.u2), (BruhatCell::Small, k.one(), k.zero()));
        let f = bruhat(&SL2Element::weyl(k));
        assert_eq!((f.cell, f.u2, f.a, f.u1), (BruhatCell::Big, k.zero(), k.one(), k.zero()));
        for b in 1..7 {
            for c in 0..7 {
                let (fb, fc) = (k.elem(b), k.elem(c));
                let g = SL2Element::new(k.one(), fb, fc, k.one() + fb * fc).unwrap();
                let f = bruhat(&g);
                let bi = fb.inv().unwrap();
                assert_eq!(f.cell, BruhatCell::Big);
                assert_eq!(f.u2, (k.one() + fb * fc) * bi);
                assert_eq!(f.a, fb);
                assert_eq!(f.u1, bi);
            }
        }
    }

    #[test]
    fn bruhat_round_trip_is_exhaustive() {
        for p in [5, 7] {
            for g in sl2_elements(field(p)) {
                assert_eq!(bruhat(&g).reconstruct(), g);
            }
        }
    }

    #[test]
    fn split_representative_counts() {
        for p in [5, 7, 11, 13] {
            assert_eq!(split_representatives(field(p)).len() as u64, p * (p + 1) / 2);
        }
    }

    #[test]
    fn split_tori_match_brute_force() {
        for p in [5, 7] {
            let k = field(p);
            let tori = split_tori(k);
            let ours: BTreeSet<_> = tori.iter().map(TorusDescriptor::elements).collect();
            assert_eq!(ours.len(), tori.len(), "representatives must give distinct tori");
            assert_eq!(ours, brute_cyclic_subgroups(k, p - 1));
            for t in &tori {
                assert!(t.generator.has_order(p - 1));
                assert!(t.conjugator.key()[0] == 1);
            }
        }
    }

    #[test]
    fn nonsplit_tori_match_brute_force() {
        // brute force: 10, 21 distinct cyclic subgroups of order p + 1
        for p in [5, 7] {
            let k = field(p);
            let tori = nonsplit_tori(k);
            let ours: BTreeSet<_> = tori.iter().map(TorusDescriptor::elements).collect();
            let brute = brute_cyclic_subgroups(k, p + 1);
            assert_eq!(ours, brute);
            assert_eq!(tori.len() as u64, p * (p - 1) / 2);
            for t in &tori {
                assert!(t.generator.has_order(p + 1));
                assert_eq!((t.generator.trace() * t.generator.trace() - k.elem(4)).legendre(), -1);
            }
        }
    }

    #[test]
    fn torus_counts() {
        for p in [5, 7, 11, 13] {
            let k = field(p);
            assert_eq!(nonsplit_tori(k).len() as u64, p * (p - 1) / 2);
        }
    }

    #[test]
    fn split_and_nonsplit_are_disjoint() {
        for p in [5, 7] {
            let k = field(p);
            let mut all: HashSet<Vec<[u64; 4]>> = HashSet::new();
            let tori: Vec<_> = split_tori(k).into_iter().chain(nonsplit_tori(k)).collect();
            for t in &tori {
                assert!(all.insert(t.elements()));
            }
            assert_eq!(all.len() as u64, p * (p + 1) / 2 + p * (p - 1) / 2);
        }
    }

    #[test]
    fn circle_group_is_a_nonsplit_torus_when_minus_one_is_not_a_square() {
        for p in [7, 11, 19, 23] {
            let k = field(p);
            assert_eq!(k.elem(-1).legendre(), -1);
            let mut so: Vec<[u64; 4]> = sl2_elements(k)
                .into_iter()
                .filter(|g| g.a == g.d && g.b == -g.c)
                .map(|g| g.key())
                .collect();
            so.sort_unstable();
            assert_eq!(so.len() as u64, p + 1);
            assert!(nonsplit_tori(k).iter().any(|t| t.elements() == so), "p = {p}");
        }
    }

    #[test]
    fn generator_examples() {
        let k = field(7);
        let a = TorusDescriptor::split(SL2Element::identity(k));
        assert_eq!(torus_generator(&a), SL2Element::from_ints(k, 3, 0, 0, 5));
        for t in split_tori(k).iter().chain(nonsplit_tori(k).iter()) {
            let g = torus_generator(t);
            assert!(g.pow(t.order()).is_identity());
            for q in prime_divisors(t.order()) {
                assert!(!g.pow(t.order() / q).is_identity());
            }
            assert_eq!(g.order(), t.order());
        }
    }
}
