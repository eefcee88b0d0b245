//! Brute-force oracles checked against the library.

use nalgebra::DMatrix;
use oscdict::analysis::{coherence, Mode};
use oscdict::dictionary::{heisenberg_dictionary, oscillator};
use oscdict::ff::FpField;
use oscdict::heisenberg::{pi, HeisenbergElement};
use oscdict::linalg::{scalar_defect, Operator, C64};
use oscdict::symplectic::{sl2_elements, sp_action, SL2Element};
use oscdict::weil::rho;

/// The intertwiner of `π` and `π∘g`, found as the null vector of
/// `U π(h) − π(g·h) U = 0` over the shift and modulation generators.
fn intertwiner(g: &SL2Element) -> (Operator, f64) {
    let k = g.field();
    let n = k.p() as usize;
    let nn = n * n;
    let mut normal = DMatrix::<C64>::zeros(nn, nn);
    for h in HeisenbergElement::generators(k).into_iter().take(2) {
        let a = pi(h);
        let b = pi(sp_action(g, h));
        // vec(U A − B U) = (Aᵀ ⊗ I − I ⊗ B) vec(U), column-major.
        let mut m = DMatrix::<C64>::zeros(nn, nn);
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    m[(j * n + r, i * n + r)] += a.get(i, j);
                    m[(j * n + r, j * n + i)] -= b.get(r, i);
                }
            }
        }
        normal += m.adjoint() * &m;
    }
    let eig = normal.symmetric_eigen();
    let mut order: Vec<usize> = (0..nn).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let v = eig.eigenvectors.column(order[0]);
    let scale = (n as f64).sqrt() / v.norm();
    let u = DMatrix::from_fn(n, n, |r, c| v[c * n + r] * scale);
    (Operator::from_matrix(u), eig.eigenvalues[order[1]])
}

#[test]
fn weil_operators_match_intertwiner_null_space() {
    for p in [5u64, 7] {
        let k = FpField::new(p).unwrap();
        for g in sl2_elements(k) {
            let (u, gap) = intertwiner(&g);
            assert!(gap > 1e-3, "intertwiner not unique at {g:?}");
            let d = scalar_defect(&rho(&g).matrix, &u);
            assert!(d < 1e-9, "p={p} g={g:?} defect {d}");
        }
    }
}

fn gram_oracle(dict: &oscdict::dictionary::Dictionary) -> (f64, f64) {
    let n = dict.p() as usize;
    let a = DMatrix::from_fn(n, dict.len(), |t, j| dict.atoms[j].vector.entries()[t]);
    let gram = a.adjoint() * &a;
    let group = dict.group_of();
    let (mut cross, mut within): (f64, f64) = (0.0, 0.0);
    for i in 0..dict.len() {
        for j in 0..dict.len() {
            let z = gram[(i, j)];
            if group[i] != group[j] {
                cross = cross.max(z.norm());
            } else {
                let target = if i == j { 1.0 } else { 0.0 };
                within = within.max((z - C64::new(target, 0.0)).norm());
            }
        }
    }
    (cross, within)
}

#[test]
fn coherence_matches_gram_matrix() {
    for p in [5u64, 7, 11] {
        let k = FpField::new(p).unwrap();
        for d in [heisenberg_dictionary(k).unwrap(), oscillator(k).unwrap()] {
            let (cross, within) = gram_oracle(&d);
            let r = coherence(&d, Mode::Exhaustive).unwrap();
            assert!((r.max_coherence - cross).abs() < 1e-12, "p={p} {} vs {cross}", r.max_coherence);
            assert!(within < 1e-10);
            assert!(r.within_group_defect < 1e-10);
        }
    }
}

#[test]
fn sampled_coherence_never_exceeds_exhaustive() {
    let k = FpField::new(13).unwrap();
    let d = oscillator(k).unwrap();
    let full = coherence(&d, Mode::Exhaustive).unwrap().max_coherence;
    for seed in 0..3 {
        let s = coherence(&d, Mode::Sampled { seed, count: 20_000 }).unwrap();
        assert!(s.max_coherence <= full + 1e-15);
        assert_eq!(s.pairs_evaluated, 20_000);
    }
}
