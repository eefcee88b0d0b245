//! Builders for the Heisenberg, oscillator and extended oscillator dictionaries.
//!
//! Every dictionary is a list of unit atoms partitioned into groups; each group
//! is an orthonormal system (a line basis, a torus basis, or a shifted copy of
//! one). Builds are deterministic: fixed field generator, fixed enumeration
//! order, and the phase convention of [`Signal::normalize_phase`].

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::FpField;
use crate::heisenberg::{pi, pi_apply, HeisenbergElement, PlanePoint};
use crate::linalg::{eig_unitary, EigenDecomposition, Signal, C64};
use crate::symplectic::{nonsplit_tori, split_representatives, SL2Element, TorusDescriptor, TorusKind};
use crate::weil::{rho, FastWeil};

/// Version tag of the eigenvector phase convention recorded in manifests.
pub const PHASE_CONVENTION_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictionaryKind {
    Heisenberg,
    OscillatorSplit,
    OscillatorNonsplit,
    /// Union of the split and non-split oscillator dictionaries.
    Oscillator,
    /// Heisenberg orbits `π(v)φ` of an oscillator dictionary.
    Extended,
}

impl DictionaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            DictionaryKind::Heisenberg => "heisenberg",
            DictionaryKind::OscillatorSplit => "oscillator-split",
            DictionaryKind::OscillatorNonsplit => "oscillator-nonsplit",
            DictionaryKind::Oscillator => "oscillator",
            DictionaryKind::Extended => "extended",
        }
    }

    pub fn code(&self) -> u32 {
        match self {
            DictionaryKind::Heisenberg => 1,
            DictionaryKind::OscillatorSplit => 2,
            DictionaryKind::OscillatorNonsplit => 3,
            DictionaryKind::Oscillator => 4,
            DictionaryKind::Extended => 5,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Some(match code {
            1 => DictionaryKind::Heisenberg,
            2 => DictionaryKind::OscillatorSplit,
            3 => DictionaryKind::OscillatorNonsplit,
            4 => DictionaryKind::Oscillator,
            5 => DictionaryKind::Extended,
            _ => return None,
        })
    }

    pub fn is_oscillator(&self) -> bool {
        matches!(
            self,
            DictionaryKind::OscillatorSplit
                | DictionaryKind::OscillatorNonsplit
                | DictionaryKind::Oscillator
        )
    }

    /// Expected atom count. The extended count is relative to the oscillator
    /// union; extended builds over other bases are checked against
    /// `p²·|base|` instead.
    pub fn expected_atoms(&self, p: u64) -> u64 {
        match self {
            DictionaryKind::Heisenberg => p * (p + 1),
            DictionaryKind::OscillatorSplit => p * (p + 1) * (p - 2) / 2,
            DictionaryKind::OscillatorNonsplit => p * p * (p - 1) / 2,
            DictionaryKind::Oscillator => {
                DictionaryKind::OscillatorSplit.expected_atoms(p)
                    + DictionaryKind::OscillatorNonsplit.expected_atoms(p)
            }
            DictionaryKind::Extended => p * p * DictionaryKind::Oscillator.expected_atoms(p),
        }
    }
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DictionaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "heisenberg" => DictionaryKind::Heisenberg,
            "oscillator-split" => DictionaryKind::OscillatorSplit,
            "oscillator-nonsplit" => DictionaryKind::OscillatorNonsplit,
            "oscillator" => DictionaryKind::Oscillator,
            "extended" => DictionaryKind::Extended,
            other => return Err(Error::InvalidArgument(format!("unknown kind {other:?}"))),
        })
    }
}

/// Where an atom came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Eigenvector `index` of `π(direction)` for the line spanned by `direction`.
    Line { direction: (u64, u64), index: usize },
    /// Character vector `index` of torus `torus` (position in the enumeration).
    Torus { kind: TorusKind, torus: usize, index: usize },
    /// `π(τ, w, 0)` applied to atom `base` of the underlying dictionary.
    Shift { base: usize, tau: u64, w: u64 },
}

impl Provenance {
    /// Character or eigenvalue index within the atom's group.
    pub fn index(&self) -> usize {
        match *self {
            Provenance::Line { index, .. } | Provenance::Torus { index, .. } => index,
            Provenance::Shift { base, .. } => base,
        }
    }

    pub fn shift(&self) -> (u64, u64) {
        match *self {
            Provenance::Shift { tau, w, .. } => (tau, w),
            _ => (0, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub vector: Signal,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    pub kind: DictionaryKind,
    pub field: FpField,
    pub atoms: Vec<Atom>,
    /// Contiguous index ranges, one per orthonormal system.
    pub groups: Vec<Range<usize>>,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn atom(&self, i: usize) -> Result<&Atom> {
        self.atoms.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.atoms.len(),
        })
    }

    /// Group index of every atom.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.atoms.len()];
        for (g, r) in self.groups.iter().enumerate() {
            for i in r.clone() {
                out[i] = g;
            }
        }
        out
    }

    pub fn group_atoms(&self, g: usize) -> &[Atom] {
        &self.atoms[self.groups[g].clone()]
    }

    fn from_groups(kind: DictionaryKind, field: FpField, groups: Vec<Vec<Atom>>) -> Self {
        let mut atoms = Vec::with_capacity(groups.iter().map(Vec::len).sum());
        let mut ranges = Vec::with_capacity(groups.len());
        for g in groups {
            let start = atoms.len();
            atoms.extend(g);
            ranges.push(start..atoms.len());
        }
        Dictionary {
            kind,
            field,
            atoms,
            groups: ranges,
        }
    }
}

/// Line directions: `(1, 0)` first, then `(s, 1)` for `s = 0..p`.
pub fn line_directions(field: FpField) -> Vec<PlanePoint> {
    let (o, l) = (field.zero(), field.one());
    std::iter::once(PlanePoint::new(l, o))
        .chain(field.elements().map(|s| PlanePoint::new(s, l)))
        .collect()
}

fn simple_spectrum(e: EigenDecomposition) -> Result<Vec<Signal>> {
    if let Some(m) = e.multiplicities().into_iter().find(|&m| m > 1) {
        return Err(Error::DegenerateSpectrum(m));
    }
    Ok(e.spaces.into_iter().flat_map(|s| s.basis).collect())
}

/// `p + 1` orthonormal bases, the eigenbases of `π(l)` for a nonzero `l` on
/// each line through the origin.
pub fn heisenberg_dictionary(field: FpField) -> Result<Dictionary> {
    let groups = line_directions(field)
        .into_par_iter()
        .map(|dir| {
            let vectors = simple_spectrum(eig_unitary(&pi(dir.lift()))?)?;
            Ok(vectors
                .into_iter()
                .enumerate()
                .map(|(index, vector)| Atom {
                    vector,
                    provenance: Provenance::Line {
                        direction: (dir.tau.value(), dir.w.value()),
                        index,
                    },
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dictionary::from_groups(DictionaryKind::Heisenberg, field, groups))
}

/// `φ_χ(t) = χ(t)/√(p−1)` for `t ≠ 0` and `0` at `t = 0`, for the `p − 2`
/// nontrivial multiplicative characters `χ_j(r^k) = e^{2πijk/(p−1)}`,
/// `j = 1..p−1`, with `r` the smallest generator of F_p^×.
pub fn standard_torus_basis(field: FpField) -> Vec<Signal> {
    let p = field.p();
    let n = p - 1;
    let r = field.mult_generator();
    let mut log = vec![0u64; p as usize];
    let mut x = field.one();
    for k in 0..n {
        log[x.index()] = k;
        x = x * r;
    }
    let scale = 1.0 / (n as f64).sqrt();
    (1..n)
        .map(|j| {
            let mut entries = vec![C64::new(0.0, 0.0); p as usize];
            for t in 1..p as usize {
                let angle = 2.0 * std::f64::consts::PI * ((j * log[t]) % n) as f64 / n as f64;
                entries[t] = C64::from_polar(scale, angle);
            }
            let mut s = Signal::new(entries);
            s.normalize_phase();
            s
        })
        .collect()
}

/// The diagonal-torus basis obtained numerically: eigenvectors of `ρ(g_A)`
/// with the single two-dimensional eigenspace removed.
pub fn standard_torus_eigenbasis(field: FpField) -> Result<(Vec<Signal>, Vec<Signal>)> {
    let ga = SL2Element::diag(field.mult_generator())?;
    let e = eig_unitary(&rho(&ga).matrix)?;
    let doubles: Vec<usize> = (0..e.spaces.len())
        .filter(|&i| e.spaces[i].multiplicity() == 2)
        .collect();
    if doubles.len() != 1 || e.spaces.iter().any(|s| s.multiplicity() > 2) {
        return Err(Error::DegenerateSpectrum(
            e.multiplicities().into_iter().max().unwrap_or(0),
        ));
    }
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (i, s) in e.spaces.into_iter().enumerate() {
        if i == doubles[0] {
            excluded = s.basis;
        } else {
            kept.extend(s.basis);
        }
    }
    if kept.len() as u64 != field.p() - 2 {
        return Err(Error::DegenerateSpectrum(2));
    }
    Ok((kept, excluded))
}

/// Work counters of a build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub groups: u64,
    pub atoms: u64,
    /// Weil operator applications (one per atom of the split construction).
    pub weil_applications: u64,
    /// Dense unitary eigendecompositions.
    pub eigendecompositions: u64,
}

/// Streams the split oscillator groups `{ρ(g)φ : φ ∈ B_A}`, `g ∈ R`, in
/// representative order, without retaining them.
pub fn for_each_split_group(
    field: FpField,
    mut visit: impl FnMut(usize, Vec<Signal>),
) -> BuildStats {
    let base = standard_torus_basis(field);
    let reps = split_representatives(field);
    let fast = FastWeil::new(field);
    let mut stats = BuildStats::default();
    for (i, g) in reps.iter().enumerate() {
        let op = fast.prepare(g);
        let group: Vec<Signal> = base
            .iter()
            .map(|phi| {
                let mut v = fast.apply(&op, phi).expect("dimension matches field");
                v.normalize_phase();
                v
            })
            .collect();
        stats.groups += 1;
        stats.atoms += group.len() as u64;
        stats.weil_applications += group.len() as u64;
        visit(i, group);
    }
    stats
}

pub fn split_oscillator(field: FpField) -> Result<Dictionary> {
    Ok(split_oscillator_with_stats(field).0)
}

pub fn split_oscillator_with_stats(field: FpField) -> (Dictionary, BuildStats) {
    let reps = split_representatives(field);
    let base = standard_torus_basis(field);
    let fast = FastWeil::new(field);
    let groups: Vec<Vec<Atom>> = reps
        .par_iter()
        .enumerate()
        .map(|(torus, g)| {
            let op = fast.prepare(g);
            base.iter()
                .enumerate()
                .map(|(index, phi)| {
                    let mut vector = fast.apply(&op, phi).expect("dimension matches field");
                    vector.normalize_phase();
                    Atom {
                        vector,
                        provenance: Provenance::Torus {
                            kind: TorusKind::Split,
                            torus,
                            index,
                        },
                    }
                })
                .collect()
        })
        .collect();
    let atoms = groups.iter().map(Vec::len).sum::<usize>() as u64;
    let stats = BuildStats {
        groups: groups.len() as u64,
        atoms,
        weil_applications: atoms,
        eigendecompositions: 0,
    };
    (
        Dictionary::from_groups(DictionaryKind::OscillatorSplit, field, groups),
        stats,
    )
}

fn torus_basis(t: &TorusDescriptor) -> Result<Vec<Signal>> {
    simple_spectrum(eig_unitary(&rho(&t.generator).matrix)?)
}

/// Eigenbases of `ρ(t)` for a generator `t` of every non-split torus. Each
/// spectrum must be simple.
pub fn nonsplit_oscillator(field: FpField) -> Result<Dictionary> {
    let tori = nonsplit_tori(field);
    let groups = tori
        .par_iter()
        .enumerate()
        .map(|(torus, t)| {
            Ok(torus_basis(t)?
                .into_iter()
                .enumerate()
                .map(|(index, vector)| Atom {
                    vector,
                    provenance: Provenance::Torus {
                        kind: TorusKind::Nonsplit,
                        torus,
                        index,
                    },
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dictionary::from_groups(DictionaryKind::OscillatorNonsplit, field, groups))
}

/// Split followed by non-split atoms.
pub fn oscillator(field: FpField) -> Result<Dictionary> {
    let split = split_oscillator(field)?;
    let nonsplit = nonsplit_oscillator(field)?;
    Ok(union(DictionaryKind::Oscillator, &[split, nonsplit]))
}

fn union(kind: DictionaryKind, parts: &[Dictionary]) -> Dictionary {
    let mut atoms = Vec::new();
    let mut groups = Vec::new();
    for d in parts {
        let offset = atoms.len();
        atoms.extend(d.atoms.iter().cloned());
        groups.extend(d.groups.iter().map(|r| r.start + offset..r.end + offset));
    }
    Dictionary {
        kind,
        field: parts[0].field,
        atoms,
        groups,
    }
}

/// `{π(τ, w, 0)·φ}` over all shifts (shift-major, `(τ, w)` lexicographic) and
/// all base atoms. The zero-shift slice is the base dictionary.
pub fn extended_dictionary(base: &Dictionary) -> Result<Dictionary> {
    if !base.kind.is_oscillator() {
        return Err(Error::InvalidArgument(format!(
            "extended dictionary needs an oscillator base, got {}",
            base.kind
        )));
    }
    let field = base.field;
    let shifts: Vec<(u64, u64)> = field
        .elements()
        .flat_map(|t| field.elements().map(move |w| (t.value(), w.value())))
        .collect();
    let slices: Vec<Vec<Atom>> = shifts
        .par_iter()
        .map(|&(tau, w)| {
            let h = HeisenbergElement::new(field.elem(tau as i64), field.elem(w as i64), field.zero());
            base.atoms
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let mut vector = pi_apply(h, &a.vector);
                    vector.normalize_phase();
                    Atom {
                        vector,
                        provenance: Provenance::Shift { base: i, tau, w },
                    }
                })
                .collect()
        })
        .collect();
    let n = base.atoms.len();
    let mut atoms = Vec::with_capacity(n * shifts.len());
    let mut groups = Vec::with_capacity(base.groups.len() * shifts.len());
    for slice in slices {
        let offset = atoms.len();
        atoms.extend(slice);
        groups.extend(base.groups.iter().map(|r| r.start + offset..r.end + offset));
    }
    Ok(Dictionary {
        kind: DictionaryKind::Extended,
        field,
        atoms,
        groups,
    })
}

/// Builds a dictionary of the given kind; `Extended` extends the full
/// oscillator union.
pub fn build(field: FpField, kind: DictionaryKind) -> Result<(Dictionary, BuildStats)> {
    let p = field.p();
    let mut stats = BuildStats::default();
    let dict = match kind {
        DictionaryKind::Heisenberg => {
            stats.eigendecompositions = p + 1;
            heisenberg_dictionary(field)?
        }
        DictionaryKind::OscillatorSplit => {
            let (d, s) = split_oscillator_with_stats(field);
            stats = s;
            d
        }
        DictionaryKind::OscillatorNonsplit => {
            stats.eigendecompositions = p * (p - 1) / 2;
            nonsplit_oscillator(field)?
        }
        DictionaryKind::Oscillator => {
            let (s, st) = split_oscillator_with_stats(field);
            stats = st;
            stats.eigendecompositions = p * (p - 1) / 2;
            union(kind, &[s, nonsplit_oscillator(field)?])
        }
        DictionaryKind::Extended => {
            let (s, st) = split_oscillator_with_stats(field);
            stats = st;
            stats.eigendecompositions = p * (p - 1) / 2;
            let base = union(DictionaryKind::Oscillator, &[s, nonsplit_oscillator(field)?]);
            extended_dictionary(&base)?
        }
    };
    stats.groups = dict.groups.len() as u64;
    stats.atoms = dict.atoms.len() as u64;
    Ok((dict, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, subspace_distance};

    fn field(p: u64) -> FpField {
        FpField::new(p).unwrap()
    }

    fn assert_orthonormal(atoms: &[Atom]) {
        for (i, a) in atoms.iter().enumerate() {
            assert!(a.vector.is_unit());
            for b in &atoms[i + 1..] {
                assert!(inner(&a.vector, &b.vector).unwrap().norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn heisenberg_shape_and_standard_bases() {
        let k = field(5);
        let d = heisenberg_dictionary(k).unwrap();
        assert_eq!(d.len(), 30);
        assert_eq!(d.groups.len(), 6);
        for g in 0..6 {
            assert_orthonormal(d.group_atoms(g));
        }
        // direction (0, 1): modulations, eigenvectors are deltas
        let deltas: Vec<Signal> = (0..5).map(|a| Signal::delta(5, a)).collect();
        let w_basis = d.group_atoms(1);
        assert_eq!(w_basis[0].provenance, Provenance::Line { direction: (0, 1), index: 0 });
        for a in w_basis {
            assert!(deltas.iter().any(|e| a.vector.max_abs_diff(e) < 1e-10));
        }
        // direction (1, 0): translations, eigenvectors are normalized characters
        for a in d.group_atoms(0) {
            let v = a.vector.entries();
            let ratio = v[1] / v[0];
            for t in 0..5 {
                assert!((v[t].norm() - 1.0 / 5f64.sqrt()).abs() < 1e-10);
                assert!((v[(t + 1) % 5] - v[t] * ratio).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn heisenberg_cross_line_coherence_is_exact() {
        let k = field(7);
        let d = heisenberg_dictionary(k).unwrap();
        let group = d.group_of();
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if group[i] != group[j] {
                    let m = inner(&d.atoms[i].vector, &d.atoms[j].vector).unwrap().norm();
                    assert!((m - 1.0 / 7f64.sqrt()).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn standard_basis_shape() {
        let b = standard_torus_basis(field(5));
        assert_eq!(b.len(), 3);
        for v in &b {
            assert_eq!(v.entries()[0], C64::new(0.0, 0.0));
            assert!(v.is_unit());
        }
        for (i, u) in b.iter().enumerate() {
            for v in &b[i + 1..] {
                assert!(inner(u, v).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_basis_matches_eigenvectors() {
        for p in [5, 7, 11, 13] {
            let k = field(p);
            let explicit = standard_torus_basis(k);
            let (numeric, excluded) = standard_torus_eigenbasis(k).unwrap();
            assert_eq!(numeric.len(), explicit.len());
            for v in &explicit {
                let best = numeric
                    .iter()
                    .map(|u| subspace_distance(std::slice::from_ref(u), std::slice::from_ref(v)))
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= 1e-8, "p={p}");
            }
            // the excluded plane is span{δ₀, 1}
            let n = p as usize;
            let mut ones = Signal::constant(n, C64::new(0.0, 0.0));
            for t in 1..n {
                ones.entries_mut()[t] = C64::new(1.0 / ((p - 1) as f64).sqrt(), 0.0);
            }
            assert!(subspace_distance(&excluded, &[Signal::delta(n, 0), ones]) < 1e-8);
        }
    }

    #[test]
    fn split_oscillator_shape() {
        let k = field(5);
        let d = split_oscillator(k).unwrap();
        assert_eq!(d.len(), 45);
        assert_eq!(d.groups.len(), 15);
        assert!(d.groups.iter().all(|g| g.len() == 3));
        let base = standard_torus_basis(k);
        for (a, b) in d.group_atoms(0).iter().zip(&base) {
            assert!(a.vector.max_abs_diff(b) < 1e-12);
        }
        for g in 0..d.groups.len() {
            assert_orthonormal(d.group_atoms(g));
        }
        assert_eq!(split_oscillator(field(7)).unwrap().len(), 140);
    }

    #[test]
    fn split_groups_are_eigenvectors_of_conjugated_generator() {
        let k = field(7);
        let d = split_oscillator(k).unwrap();
        for (g, rep) in split_representatives(k).iter().enumerate() {
            let t = TorusDescriptor::split(*rep);
            let op = rho(&t.generator).matrix;
            for a in d.group_atoms(g) {
                let image = op.apply(&a.vector).unwrap();
                let lambda = inner(&image, &a.vector).unwrap();
                assert!((lambda.norm() - 1.0).abs() < 1e-9);
                assert!(image.max_abs_diff(&a.vector.scaled(lambda)) < 1e-9);
            }
        }
    }

    #[test]
    fn streaming_build_matches_collected_build() {
        let k = field(7);
        let d = split_oscillator(k).unwrap();
        let mut seen = 0;
        let stats = for_each_split_group(k, |g, vectors| {
            for (a, v) in d.group_atoms(g).iter().zip(&vectors) {
                assert_eq!(&a.vector, v);
            }
            seen += vectors.len();
        });
        assert_eq!(seen, d.len());
        assert_eq!(stats.atoms, 140);
        assert_eq!(stats.groups, 28);
    }

    #[test]
    fn nonsplit_oscillator_shape() {
        let k = field(5);
        let d = nonsplit_oscillator(k).unwrap();
        assert_eq!(d.len(), 50);
        assert_eq!(d.groups.len(), 10);
        for g in 0..d.groups.len() {
            assert_eq!(d.group_atoms(g).len(), 5);
            assert_orthonormal(d.group_atoms(g));
        }
        assert_eq!(nonsplit_oscillator(field(7)).unwrap().len(), 147);
    }

    #[test]
    fn extended_shape() {
        let k = field(5);
        let base = oscillator(k).unwrap();
        assert_eq!(base.len(), 95);
        let e = extended_dictionary(&base).unwrap();
        assert_eq!(e.len(), 25 * 95);
        for (a, b) in e.atoms.iter().zip(&base.atoms) {
            assert_eq!(a.vector, b.vector);
        }
        // each orbit has p² distinct atoms, even modulo phase
        for i in [0, 7, 50, 94] {
            let orbit: Vec<&Atom> = e
                .atoms
                .iter()
                .filter(|a| matches!(a.provenance, Provenance::Shift { base, .. } if base == i))
                .collect();
            assert_eq!(orbit.len(), 25);
            for (x, a) in orbit.iter().enumerate() {
                for b in &orbit[x + 1..] {
                    assert!(inner(&a.vector, &b.vector).unwrap().norm() < 1.0 - 1e-6);
                }
            }
        }
        let h = heisenberg_dictionary(k).unwrap();
        assert!(extended_dictionary(&h).is_err());
    }

    #[test]
    fn builds_are_reproducible() {
        let k = field(7);
        for kind in [DictionaryKind::Heisenberg, DictionaryKind::Oscillator] {
            let (a, _) = build(k, kind).unwrap();
            let (b, _) = build(k, kind).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in [
            DictionaryKind::Heisenberg,
            DictionaryKind::OscillatorSplit,
            DictionaryKind::OscillatorNonsplit,
            DictionaryKind::Oscillator,
            DictionaryKind::Extended,
        ] {
            assert_eq!(kind.name().parse::<DictionaryKind>().unwrap(), kind);
            assert_eq!(DictionaryKind::from_code(kind.code()), Some(kind));
        }
        assert!("nope".parse::<DictionaryKind>().is_err());
    }
}
