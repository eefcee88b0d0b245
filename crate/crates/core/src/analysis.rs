//! Coherence audits over a dictionary's Gram matrix.
//!
//! The headline number is the cross-group coherence: the largest `|⟨φ, ϕ⟩|`
//! over atoms from different groups (lines or tori). Pairs inside a group are
//! reported separately as an orthonormality defect.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Atom, Dictionary, DictionaryKind};
use crate::error::{Error, Result};
use crate::heisenberg::{pi_apply, HeisenbergElement};
use crate::linalg::{inner_unchecked, C64};

/// Pair count up to which `auto` mode scans exhaustively.
pub const EXHAUSTIVE_PAIR_LIMIT: u64 = 50_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;
pub const HISTOGRAM_BINS: usize = 20;
/// Slack for comparing a measured maximum against its bound.
pub const BOUND_SLACK: f64 = 1e-9;

const SAMPLE_BLOCK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

impl Mode {
    /// Exhaustive when `pairs` fits under the limit, otherwise the default sample.
    pub fn auto(pairs: u64, seed: u64) -> Mode {
        if pairs <= EXHAUSTIVE_PAIR_LIMIT {
            Mode::Exhaustive
        } else {
            Mode::Sampled {
                seed,
                count: DEFAULT_SAMPLES,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub kind: DictionaryKind,
    pub prime: u64,
    pub atoms: usize,
    /// What was measured: `"cross-group"` or `"shifted"`.
    pub statistic: String,
    pub mode: Mode,
    pub pairs_evaluated: u64,
    pub max_coherence: f64,
    pub argmax: Option<(usize, usize)>,
    /// Shift `(τ, w)` realizing the maximum for shifted statistics.
    pub argmax_shift: Option<(u64, u64)>,
    pub bound: f64,
    pub bound_label: String,
    pub bound_holds: bool,
    /// True when the bound is `>= 1`, which every unit vector satisfies.
    pub bound_vacuous: bool,
    pub within_group_defect: f64,
    /// Counts of `|⟨φ, ϕ⟩|` in `HISTOGRAM_BINS` equal bins over `[0, 1]`.
    pub histogram: Vec<u64>,
}

impl CoherenceReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let row = |s: &mut String, k: &str, v: String| {
            let _ = writeln!(s, "{k:<22}{v}");
        };
        row(&mut s, "kind", self.kind.to_string());
        row(&mut s, "prime", self.prime.to_string());
        row(&mut s, "atoms", self.atoms.to_string());
        row(&mut s, "statistic", self.statistic.clone());
        row(
            &mut s,
            "mode",
            match self.mode {
                Mode::Exhaustive => "exhaustive".into(),
                Mode::Sampled { seed, count } => format!("sampled (seed {seed}, {count} pairs)"),
            },
        );
        row(&mut s, "pairs evaluated", self.pairs_evaluated.to_string());
        row(&mut s, "max coherence", format!("{:.12}", self.max_coherence));
        if let Some((i, j)) = self.argmax {
            row(&mut s, "argmax", format!("({i}, {j})"));
        }
        if let Some((t, w)) = self.argmax_shift {
            row(&mut s, "argmax shift", format!("({t}, {w})"));
        }
        row(&mut s, "bound", format!("{:.12} ({})", self.bound, self.bound_label));
        row(
            &mut s,
            "bound holds",
            format!(
                "{}{}",
                self.bound_holds,
                if self.bound_vacuous { " (bound vacuous)" } else { "" }
            ),
        );
        row(&mut s, "within-group defect", format!("{:.3e}", self.within_group_defect));
        s
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("bin_low,bin_high,count\n");
        let w = 1.0 / HISTOGRAM_BINS as f64;
        for (i, c) in self.histogram.iter().enumerate() {
            let _ = writeln!(s, "{:.2},{:.2},{}", i as f64 * w, (i + 1) as f64 * w, c);
        }
        s
    }
}

/// Bound that applies to a dictionary kind, with its label.
pub fn bound_for(kind: DictionaryKind, p: u64) -> (f64, &'static str) {
    let root = (p as f64).sqrt();
    match kind {
        DictionaryKind::Heisenberg => (1.0 / root, "1/sqrt(p), equality across lines"),
        DictionaryKind::Extended => (4.0 / root, "4/sqrt(p), shifted oscillator atoms"),
        _ => (4.0 / root, "4/sqrt(p), across tori"),
    }
}

#[derive(Clone, Debug)]
struct Accum {
    max: f64,
    argmax: Option<(usize, usize)>,
    shift: Option<(u64, u64)>,
    hist: Vec<u64>,
    pairs: u64,
    within: f64,
}

impl Accum {
    fn new() -> Self {
        Accum {
            max: 0.0,
            argmax: None,
            shift: None,
            hist: vec![0; HISTOGRAM_BINS],
            pairs: 0,
            within: 0.0,
        }
    }

    /// Records one pair; true when it became the new argmax.
    #[inline]
    fn push(&mut self, m: f64, i: usize, j: usize) -> bool {
        self.pairs += 1;
        let bin = ((m * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        self.hist[bin] += 1;
        // strict comparison keeps the first pair in evaluation order on ties
        if m > self.max || self.argmax.is_none() {
            self.max = m;
            self.argmax = Some((i, j));
            return true;
        }
        false
    }

    fn merge(mut self, other: Accum) -> Accum {
        if other.argmax.is_some() && (self.argmax.is_none() || other.max > self.max) {
            self.max = other.max;
            self.argmax = other.argmax;
            self.shift = other.shift;
        }
        for (a, b) in self.hist.iter_mut().zip(other.hist) {
            *a += b;
        }
        self.pairs += other.pairs;
        self.within = self.within.max(other.within);
        self
    }
}

/// Atoms as one contiguous row-major buffer.
struct Flat {
    n: usize,
    data: Vec<C64>,
}

impl Flat {
    fn new(atoms: &[Atom], n: usize) -> Self {
        let mut data = Vec::with_capacity(atoms.len() * n);
        for a in atoms {
            data.extend_from_slice(a.vector.entries());
        }
        Flat { n, data }
    }

    #[inline]
    fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn cross_pair_count(dict: &Dictionary) -> u64 {
    let n = dict.len() as u64;
    let within: u64 = dict
        .groups
        .iter()
        .map(|g| {
            let m = g.len() as u64;
            m * m.saturating_sub(1) / 2
        })
        .sum();
    n * n.saturating_sub(1) / 2 - within
}

/// Within-group defect `max |⟨φᵢ, φⱼ⟩ − δᵢⱼ|` over all groups.
fn within_group_defect(dict: &Dictionary, flat: &Flat) -> f64 {
    dict.groups
        .par_iter()
        .map(|g| {
            let mut d: f64 = 0.0;
            for i in g.clone() {
                for j in i..g.end {
                    let v = inner_unchecked(flat.row(i), flat.row(j));
                    let target = if i == j { 1.0 } else { 0.0 };
                    d = d.max((v - C64::new(target, 0.0)).norm());
                }
            }
            d
        })
        .reduce(|| 0.0, f64::max)
}

fn finish(dict: &Dictionary, statistic: &str, mode: Mode, acc: Accum) -> CoherenceReport {
    let p = dict.p();
    let (bound, label) = bound_for(dict.kind, p);
    CoherenceReport {
        kind: dict.kind,
        prime: p,
        atoms: dict.len(),
        statistic: statistic.to_string(),
        mode,
        pairs_evaluated: acc.pairs,
        max_coherence: acc.max,
        argmax: acc.argmax,
        argmax_shift: acc.shift,
        bound,
        bound_label: label.to_string(),
        bound_holds: acc.max <= bound + BOUND_SLACK,
        bound_vacuous: bound >= 1.0,
        within_group_defect: acc.within,
        histogram: acc.hist,
    }
}

/// Cross-group coherence. Requires at least two atoms; a dictionary with a
/// single group has no cross pairs and reports a maximum of `0` with no argmax.
pub fn coherence(dict: &Dictionary, mode: Mode) -> Result<CoherenceReport> {
    if dict.len() < 2 {
        return Err(Error::InvalidArgument(
            "coherence needs at least two atoms".into(),
        ));
    }
    let flat = Flat::new(&dict.atoms, dict.p() as usize);
    let group = dict.group_of();
    let mut acc = match mode {
        Mode::Exhaustive => (0..dict.len())
            .into_par_iter()
            .map(|i| {
                let mut a = Accum::new();
                let gi = group[i];
                let start = dict.groups[gi].end;
                for j in start..dict.len() {
                    if group[j] != gi {
                        a.push(inner_unchecked(flat.row(i), flat.row(j)).norm(), i, j);
                    }
                }
                a
            })
            .reduce(Accum::new, Accum::merge),
        Mode::Sampled { seed, count } => {
            let pairs = sample_pairs(dict, &group, seed, count);
            eval_pairs(&flat, &pairs)
        }
    };
    acc.within = within_group_defect(dict, &flat);
    Ok(finish(dict, "cross-group", mode, acc))
}

/// Seeded cross-group pairs `(i, j)`, `i < j`.
pub fn sample_pairs(dict: &Dictionary, group: &[usize], seed: u64, count: u64) -> Vec<(usize, usize)> {
    let n = dict.len();
    if dict.groups.len() < 2 {
        return Vec::new();
    }
    let blocks = count.div_ceil(SAMPLE_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let take = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
            let mut out = Vec::with_capacity(take as usize);
            while (out.len() as u64) < take {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if group[i] != group[j] {
                    out.push((i.min(j), i.max(j)));
                }
            }
            out
        })
        .collect()
}

fn eval_pairs(flat: &Flat, pairs: &[(usize, usize)]) -> Accum {
    pairs
        .par_chunks(4096)
        .map(|chunk| {
            let mut a = Accum::new();
            for &(i, j) in chunk {
                a.push(inner_unchecked(flat.row(i), flat.row(j)).norm(), i, j);
            }
            a
        })
        .reduce(Accum::new, Accum::merge)
}

/// Coherence over an explicit pair list (cross-group or not).
pub fn coherence_of_pairs(dict: &Dictionary, pairs: &[(usize, usize)]) -> Result<(f64, Option<(usize, usize)>)> {
    for &(i, j) in pairs {
        dict.atom(i)?;
        dict.atom(j)?;
    }
    let flat = Flat::new(&dict.atoms, dict.p() as usize);
    let a = eval_pairs(&flat, pairs);
    Ok((a.max, a.argmax))
}

/// `max |⟨φ, π(v)ϕ⟩|` over atoms `φ, ϕ` and nonzero shifts `v = (τ, w)`.
///
/// Exhaustive mode visits every ordered atom pair for every shift; sampled
/// mode draws `(φ, ϕ, v)` triples.
pub fn shift_coherence(dict: &Dictionary, mode: Mode) -> Result<CoherenceReport> {
    if dict.is_empty() {
        return Err(Error::InvalidArgument("empty dictionary".into()));
    }
    let field = dict.field;
    let p = field.p();
    let n = dict.len();
    let flat = Flat::new(&dict.atoms, p as usize);
    let shift_of = |k: u64| {
        let (tau, w) = ((k + 1) / p, (k + 1) % p);
        HeisenbergElement::new(field.elem(tau as i64), field.elem(w as i64), field.zero())
    };
    let shift_key = |h: HeisenbergElement| (h.tau.value(), h.w.value());
    let acc = match mode {
        Mode::Exhaustive => (0..p * p - 1)
            .into_par_iter()
            .map(|k| {
                let h = shift_of(k);
                let shifted: Vec<C64> = dict
                    .atoms
                    .iter()
                    .flat_map(|a| pi_apply(h, &a.vector).into_vec())
                    .collect();
                let mut a = Accum::new();
                for i in 0..n {
                    for j in 0..n {
                        let m = inner_unchecked(flat.row(i), &shifted[j * p as usize..(j + 1) * p as usize]).norm();
                        if a.push(m, i, j) {
                            a.shift = Some(shift_key(h));
                        }
                    }
                }
                a
            })
            .reduce(Accum::new, Accum::merge),
        Mode::Sampled { seed, count } => {
            let blocks = count.div_ceil(SAMPLE_BLOCK);
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(b);
                    let take = SAMPLE_BLOCK.min(count - b * SAMPLE_BLOCK);
                    let mut a = Accum::new();
                    for _ in 0..take {
                        let i = rng.gen_range(0..n);
                        let j = rng.gen_range(0..n);
                        let h = shift_of(rng.gen_range(0..p * p - 1));
                        let moved = pi_apply(h, &dict.atoms[j].vector);
                        let m = inner_unchecked(flat.row(i), moved.entries()).norm();
                        if a.push(m, i, j) {
                            a.shift = Some(shift_key(h));
                        }
                    }
                    a
                })
                .reduce(Accum::new, Accum::merge)
        }
    };
    let mut report = finish(dict, "shifted", mode, acc);
    let (bound, _) = bound_for(DictionaryKind::Extended, p);
    report.bound = bound;
    report.bound_label = "4/sqrt(p), |<phi, pi(v) varphi>| for v != 0".into();
    report.bound_holds = report.max_coherence <= bound + BOUND_SLACK;
    report.bound_vacuous = bound >= 1.0;
    Ok(report)
}

/// `max |⟨φᵢ, φⱼ⟩ − δᵢⱼ|` over a group.
pub fn verify_orthonormal(group: &[Atom]) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    let mut d: f64 = 0.0;
    for (i, a) in group.iter().enumerate() {
        for (j, b) in group.iter().enumerate().skip(i) {
            let v = inner_unchecked(a.vector.entries(), b.vector.entries());
            let target = if i == j { 1.0 } else { 0.0 };
            d = d.max((v - C64::new(target, 0.0)).norm());
        }
    }
    Ok(d)
}

/// Babel function: the largest sum of the `k` biggest `|⟨φ, ϕ⟩|` from one atom
/// to the others.
pub fn babel_profile(dict: &Dictionary, k: usize) -> Result<f64> {
    let n = dict.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "k must satisfy 1 <= k < {n}, got {k}"
        )));
    }
    let flat = Flat::new(&dict.atoms, dict.p() as usize);
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| inner_unchecked(flat.row(i), flat.row(j)).norm())
                .collect();
            row.sort_unstable_by(|a, b| b.total_cmp(a));
            row[..k].iter().sum::<f64>()
        })
        .reduce(|| 0.0, f64::max))
}
