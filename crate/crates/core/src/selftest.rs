//! Invariant suite run by `oscdict selftest`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{coherence, Mode};
use crate::dictionary::{
    extended_dictionary, heisenberg_dictionary, nonsplit_oscillator, split_oscillator,
    standard_torus_basis, standard_torus_eigenbasis, Dictionary, DictionaryKind,
};
use crate::error::Result;
use crate::ff::FpField;
use crate::heisenberg::{h_mul, pi, HeisenbergElement};
use crate::linalg::subspace_distance;
use crate::symplectic::{bruhat, sl2_elements, split_representatives, split_tori, nonsplit_tori, SL2Element};
use crate::weil::{egorov_defect, multiplicativity_defect};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

fn random_h(k: FpField, rng: &mut ChaCha8Rng) -> HeisenbergElement {
    let mut e = || k.elem(rng.gen_range(0..k.p()) as i64);
    HeisenbergElement::new(e(), e(), e())
}

fn random_sl2(k: FpField, rng: &mut ChaCha8Rng) -> SL2Element {
    loop {
        let mut e = || k.elem(rng.gen_range(0..k.p()) as i64);
        if let Ok(g) = SL2Element::new(e(), e(), e(), e()) {
            return g;
        }
    }
}

fn counts(field: FpField, h: &Dictionary, s: &Dictionary, ns: &Dictionary) -> Check {
    let p = field.p();
    let ext_expected = p * p * (s.len() + ns.len()) as u64;
    let got = [h.len() as u64, s.len() as u64, ns.len() as u64];
    let want = [
        DictionaryKind::Heisenberg.expected_atoms(p),
        DictionaryKind::OscillatorSplit.expected_atoms(p),
        DictionaryKind::OscillatorNonsplit.expected_atoms(p),
    ];
    check(
        "cardinalities",
        got == want && ext_expected == DictionaryKind::Extended.expected_atoms(p),
        format!("H={} Os={} Ons={} (want {want:?})", got[0], got[1], got[2]),
    )
}

/// Runs every invariant at the given prime.
pub fn run(field: FpField) -> Result<Vec<Check>> {
    let p = field.p();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = (random_h(field, &mut rng), random_h(field, &mut rng));
        worst = worst.max(pi(a).compose(&pi(b))?.max_abs_diff(&pi(h_mul(a, b))));
    }
    out.push(check("heisenberg homomorphism", worst <= 1e-10, format!("max defect {worst:.2e}")));

    let (elements, label) = if p <= 31 {
        (sl2_elements(field), "exhaustive")
    } else {
        ((0..20_000).map(|_| random_sl2(field, &mut rng)).collect(), "20000 samples")
    };
    let bad = elements.iter().filter(|g| bruhat(g).reconstruct() != **g).count();
    out.push(check("bruhat round trip", bad == 0, format!("{label}, {bad} failures")));

    let reps = split_representatives(field);
    let mut worst: f64 = 0.0;
    for g in &reps {
        for h in HeisenbergElement::generators(field) {
            worst = worst.max(egorov_defect(g, h));
        }
    }
    out.push(check("egorov relation", worst <= 1e-9, format!("{} x 3, max defect {worst:.2e}", reps.len())));

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (g, h) = (random_sl2(field, &mut rng), random_sl2(field, &mut rng));
        worst = worst.max(multiplicativity_defect(&g, &h));
    }
    out.push(check("projective multiplicativity", worst <= 1e-9, format!("max defect {worst:.2e}")));

    if p <= 13 {
        let mut seen = HashSet::new();
        let tori: Vec<_> = split_tori(field).into_iter().chain(nonsplit_tori(field)).collect();
        let distinct = tori.iter().all(|t| seen.insert(t.elements()));
        out.push(check("torus distinctness", distinct, format!("{} tori", tori.len())));
    }

    let h = heisenberg_dictionary(field)?;
    let s = split_oscillator(field)?;
    let ns = nonsplit_oscillator(field)?;
    out.push(counts(field, &h, &s, &ns));

    let rep = coherence(&h, Mode::auto(crate::analysis::cross_pair_count(&h), 0))?;
    let target = 1.0 / (p as f64).sqrt();
    let eq = (rep.max_coherence - target).abs() <= 1e-9 && rep.within_group_defect <= 1e-10;
    out.push(check(
        "heisenberg coherence",
        eq,
        format!("max {:.12} vs 1/sqrt(p) {target:.12}", rep.max_coherence),
    ));

    for (name, d) in [("split orthonormality", &s), ("nonsplit orthonormality", &ns)] {
        let r = coherence(d, Mode::Sampled { seed: 0, count: 10_000 })?;
        out.push(check(name, r.within_group_defect <= 1e-10, format!("defect {:.2e}", r.within_group_defect)));
    }

    let explicit = standard_torus_basis(field);
    let (numeric, excluded) = standard_torus_eigenbasis(field)?;
    let worst = explicit
        .iter()
        .map(|v| {
            numeric
                .iter()
                .map(|u| subspace_distance(std::slice::from_ref(u), std::slice::from_ref(v)))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    out.push(check(
        "explicit torus basis",
        worst <= 1e-8 && excluded.len() == 2,
        format!("max subspace distance {worst:.2e}"),
    ));

    if p <= 7 {
        let union = crate::dictionary::oscillator(field)?;
        let e = extended_dictionary(&union)?;
        out.push(check(
            "extended cardinality",
            e.len() as u64 == p * p * union.len() as u64,
            format!("{} atoms", e.len()),
        ));
    }
    Ok(out)
}

pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| {
            format!(
                "{:<width$}  {}  {}\n",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            )
        })
        .collect()
}
