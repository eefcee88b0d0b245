//! Dense complex signals and operators of size `p` and `p x p`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unit-norm tolerance for atoms.
pub const UNIT_TOL: f64 = 1e-12;
/// Max-norm tolerance for `A A* = I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenvalue clustering radius on the unit circle.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Relative tolerance for the "largest entry" tie-break of the phase convention.
const PHASE_TIE_TOL: f64 = 1e-9;
/// Rotation applied before the Hermitian split; any angle avoiding the
/// structured root-of-unity spectra works.
const SPLIT_ANGLE: f64 = 0.618_033_988_749_894_8;
/// Hermitian eigenvalues closer than this are resolved jointly.
const GROUP_GAP: f64 = 1e-5;

/// A complex vector indexed by F_p.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal(Vec<C64>);

impl Signal {
    pub fn new(entries: Vec<C64>) -> Self {
        Signal(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Signal(vec![C64::new(0.0, 0.0); n])
    }

    /// Delta function at `a`.
    pub fn delta(n: usize, a: usize) -> Self {
        let mut s = Self::zeros(n);
        s.0[a] = C64::new(1.0, 0.0);
        s
    }

    pub fn constant(n: usize, v: C64) -> Self {
        Signal(vec![v; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn scaled(&self, s: C64) -> Signal {
        Signal(self.0.iter().map(|z| z * s).collect())
    }

    /// `self + s * other`, in place.
    pub fn axpy(&mut self, s: C64, other: &Signal) -> Result<()> {
        check_len(self.len(), other.len())?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies by a unimodular scalar so that the largest-magnitude entry
    /// is real positive. Entries within a relative `1e-9` of the maximum
    /// count as tied; the smallest index wins.
    pub fn normalize_phase(&mut self) {
        let max = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return;
        }
        let pivot = self
            .0
            .iter()
            .position(|z| z.norm() >= max * (1.0 - PHASE_TIE_TOL))
            .unwrap_or(0);
        let z = self.0[pivot];
        let rot = z.conj() / z.norm();
        for v in &mut self.0 {
            *v *= rot;
        }
        self.0[pivot] = C64::new(self.0[pivot].norm(), 0.0);
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `sum_t f(t) * conj(g(t))`.
pub fn inner(f: &Signal, g: &Signal) -> Result<C64> {
    check_len(f.len(), g.len())?;
    Ok(inner_unchecked(f.entries(), g.entries()))
}

#[inline]
pub fn inner_unchecked(f: &[C64], g: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in f.iter().zip(g) {
        // a * conj(b)
        re += a.re * b.re + a.im * b.im;
        im += a.im * b.re - a.re * b.im;
    }
    C64::new(re, im)
}

/// A dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    unitary: bool,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Self {
        Operator {
            mat,
            unitary: false,
        }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_matrix(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Operator {
            mat: DMatrix::identity(n, n),
            unitary: true,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(n, n))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// Marks the operator as unitary after checking `‖A A* − I‖_max ≤ 1e-10`.
    pub fn into_unitary(mut self) -> Result<Self> {
        let d = self.unitary_defect();
        if d > UNITARY_TOL {
            return Err(Error::NotUnitary(d));
        }
        self.unitary = true;
        Ok(self)
    }

    /// Marks as unitary without checking; for operators unitary by construction.
    pub(crate) fn assume_unitary(mut self) -> Self {
        self.unitary = true;
        self
    }

    #[inline]
    pub fn is_flagged_unitary(&self) -> bool {
        self.unitary
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            mat: self.mat.adjoint(),
            unitary: self.unitary,
        }
    }

    pub fn scaled(&self, s: C64) -> Operator {
        Operator {
            mat: &self.mat * s,
            unitary: self.unitary && (s.norm() - 1.0).abs() <= UNIT_TOL,
        }
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        check_len(self.dim(), f.len())?;
        let v = DVector::from_column_slice(f.entries());
        Ok(Signal::new((&self.mat * v).as_slice().to_vec()))
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        check_len(self.dim(), other.dim())?;
        Ok(Operator {
            mat: &self.mat * &other.mat,
            unitary: self.unitary && other.unitary,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        check_len(self.dim(), other.dim())?;
        Ok(Operator::from_matrix(&self.mat - &other.mat))
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A A* − I‖_max`.
    pub fn unitary_defect(&self) -> f64 {
        let n = self.dim();
        let prod = &self.mat * self.mat.adjoint();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                d = d.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        d
    }

    pub fn column(&self, j: usize) -> Signal {
        Signal::new(self.mat.column(j).iter().copied().collect())
    }
}

/// Smallest `max_ij |A_ij − λ B_ij|` over unimodular λ, with λ taken from the
/// entry of `B` of largest magnitude.
pub fn scalar_defect(a: &Operator, b: &Operator) -> f64 {
    let (idx, pivot) = b
        .mat
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bm), (i, z)| {
            let m = z.norm();
            if m > bm {
                (i, m)
            } else {
                (bi, bm)
            }
        });
    if pivot == 0.0 {
        return a.max_abs();
    }
    let ratio = a.mat.as_slice()[idx] / b.mat.as_slice()[idx];
    let lambda = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.max_abs_diff(&b.scaled(lambda))
}

/// One eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub eigenvalue: C64,
    pub basis: Vec<Signal>,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.basis.len()
    }
}

/// Spectral decomposition of a unitary operator into eigenspaces, ordered by
/// eigenvalue angle ascending in `(−π, π]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub spaces: Vec<Eigenspace>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.spaces.iter().map(|s| s.eigenvalue).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.spaces.iter().map(Eigenspace::multiplicity).collect()
    }

    /// `Σ λ P_λ`.
    pub fn reconstruct(&self, n: usize) -> Operator {
        let mut m = DMatrix::<C64>::zeros(n, n);
        for space in &self.spaces {
            for v in &space.basis {
                let col = DVector::from_column_slice(v.entries());
                m += (&col * col.adjoint()) * space.eigenvalue;
            }
        }
        Operator::from_matrix(m)
    }
}

fn circle_dist(a: C64, b: C64) -> f64 {
    (a - b).norm()
}

/// Eigendecomposition of a unitary operator.
///
/// The spectrum is separated through Hermitian eigensolvers: first on
/// `Re(e^{-iα} A)`, then, inside groups of nearly equal real parts, on the
/// imaginary part restricted to the group's subspace. Resulting vectors are
/// clustered by Rayleigh quotient within [`CLUSTER_TOL`].
pub fn eig_unitary(a: &Operator) -> Result<EigenDecomposition> {
    let defect = a.unitary_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let n = a.dim();
    let rot = C64::from_polar(1.0, -SPLIT_ANGLE);
    let rotated = &a.mat * rot;
    let re_part = (&rotated + rotated.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(re_part);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(Ordering::Equal)
    });

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if eig.eigenvalues[i] - eig.eigenvalues[*g.last().unwrap()] < GROUP_GAP => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }

    let mut vectors: Vec<(C64, Signal)> = Vec::with_capacity(n);
    for g in groups {
        let q = DMatrix::from_fn(n, g.len(), |r, c| eig.eigenvectors[(r, g[c])]);
        let resolved = if g.len() == 1 {
            q
        } else {
            let restricted = q.adjoint() * &rotated * &q;
            let im_part =
                (&restricted - restricted.adjoint()) * C64::new(0.0, -0.5);
            let inner_eig = SymmetricEigen::new(im_part);
            let mut idx: Vec<usize> = (0..g.len()).collect();
            idx.sort_by(|&i, &j| {
                inner_eig.eigenvalues[i]
                    .partial_cmp(&inner_eig.eigenvalues[j])
                    .unwrap_or(Ordering::Equal)
            });
            let w = DMatrix::from_fn(g.len(), g.len(), |r, c| inner_eig.eigenvectors[(r, idx[c])]);
            q * w
        };
        for c in 0..resolved.ncols() {
            let col = resolved.column(c).into_owned();
            let lambda = (col.adjoint() * &a.mat * &col)[(0, 0)];
            vectors.push((lambda, Signal::new(col.as_slice().to_vec())));
        }
    }

    vectors.sort_by(|x, y| x.0.arg().partial_cmp(&y.0.arg()).unwrap_or(Ordering::Equal));

    let mut clusters: Vec<Vec<(C64, Signal)>> = Vec::new();
    for item in vectors {
        match clusters.last_mut() {
            Some(c) if circle_dist(c.last().unwrap().0, item.0) <= CLUSTER_TOL => c.push(item),
            _ => clusters.push(vec![item]),
        }
    }
    // wrap-around at the branch cut
    if clusters.len() > 1 {
        let first = clusters[0][0].0;
        let last = clusters.last().unwrap().last().unwrap().0;
        if circle_dist(first, last) <= CLUSTER_TOL {
            let mut tail = clusters.pop().unwrap();
            tail.append(&mut clusters[0]);
            clusters[0] = tail;
        }
    }

    let mut spaces: Vec<Eigenspace> = clusters
        .into_iter()
        .map(|c| {
            let sum: C64 = c.iter().map(|(l, _)| *l).sum();
            let eigenvalue = sum / sum.norm();
            let basis = c
                .into_iter()
                .map(|(_, mut v)| {
                    v.normalize_phase();
                    v
                })
                .collect();
            Eigenspace { eigenvalue, basis }
        })
        .collect();
    spaces.sort_by(|x, y| {
        x.eigenvalue
            .arg()
            .partial_cmp(&y.eigenvalue.arg())
            .unwrap_or(Ordering::Equal)
    });

    let mut min_gap = f64::INFINITY;
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            min_gap = min_gap.min(circle_dist(spaces[i].eigenvalue, spaces[j].eigenvalue));
        }
    }
    if min_gap <= 10.0 * CLUSTER_TOL {
        return Err(Error::SpectralGap(min_gap));
    }
    Ok(EigenDecomposition { spaces })
}

/// Angle of a unit complex number mapped into `(−π, π]`.
pub fn angle(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Dimension-independent distance between two equal-dimension subspaces:
/// `‖P_U − P_V‖_max` for their orthogonal projectors.
pub fn subspace_distance(u: &[Signal], v: &[Signal]) -> f64 {
    let proj = |basis: &[Signal]| {
        let n = basis.first().map_or(0, Signal::len);
        let mut m = DMatrix::<C64>::zeros(n, n);
        for b in basis {
            let col = DVector::from_column_slice(b.entries());
            m += &col * col.adjoint();
        }
        m
    };
    let (pu, pv) = (proj(u), proj(v));
    pu.iter()
        .zip(pv.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_signal(seed: u64, n: usize) -> Signal {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Signal::new((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
    }

    fn dft(n: usize) -> Operator {
        let s = (n as f64).sqrt();
        Operator::from_fn(n, |w, t| C64::from_polar(1.0 / s, 2.0 * PI * (w * t) as f64 / n as f64))
    }

    #[test]
    fn delta_inner_products() {
        let n = 7;
        assert_eq!(inner(&Signal::delta(n, 3), &Signal::delta(n, 3)).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&Signal::delta(n, 3), &Signal::delta(n, 4)).unwrap(), c(0.0, 0.0));
        assert!(inner(&Signal::delta(5, 0), &Signal::delta(6, 0)).is_err());
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_argument() {
        let f = random_signal(1, 5);
        let g = random_signal(2, 5);
        let s = c(0.3, -1.2);
        let lhs = inner(&f, &g.scaled(s)).unwrap();
        let rhs = inner(&f, &g).unwrap() * s.conj();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let n = 5;
        let f = random_signal(3, n);
        assert_eq!(Operator::identity(n).apply(&f).unwrap(), f);
        assert_eq!(Operator::zeros(n).apply(&f).unwrap(), Signal::zeros(n));
        let out = dft(n).apply(&Signal::delta(n, 0)).unwrap();
        for z in out.entries() {
            assert!((z - c(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        assert!(Operator::identity(4).apply(&f).is_err());
    }

    #[test]
    fn compose_examples() {
        let n = 6;
        let f = dft(n).into_unitary().unwrap();
        let a = Operator::from_fn(n, |i, j| c(i as f64, j as f64 * 0.5));
        assert_eq!(a.compose(&Operator::identity(n)).unwrap(), a);
        let id = f.compose(&f.adjoint()).unwrap();
        assert!(id.max_abs_diff(&Operator::identity(n)) < 1e-10);
        assert!(id.is_flagged_unitary());
        assert!(a.compose(&Operator::identity(5)).is_err());
    }

    #[test]
    fn non_unitary_is_rejected() {
        let a = Operator::identity(4).scaled(c(2.0, 0.0));
        assert!(matches!(eig_unitary(&a), Err(Error::NotUnitary(_))));
        assert!(a.into_unitary().is_err());
    }

    #[test]
    fn identity_has_single_full_eigenspace() {
        let e = eig_unitary(&Operator::identity(7)).unwrap();
        assert_eq!(e.multiplicities(), vec![7]);
        assert!((e.spaces[0].eigenvalue - c(1.0, 0.0)).norm() < 1e-12);
        assert!(e.reconstruct(7).max_abs_diff(&Operator::identity(7)) < 1e-10);
    }

    #[test]
    fn distinct_diagonal_gives_delta_basis() {
        let n = 9;
        let diag: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 0.3 + 0.6 * k as f64)).collect();
        let d = Operator::diagonal(&diag);
        let e = eig_unitary(&d).unwrap();
        assert_eq!(e.spaces.len(), n);
        for space in &e.spaces {
            let v = &space.basis[0];
            let k = (0..n).find(|&k| (diag[k] - space.eigenvalue).norm() < 1e-10).unwrap();
            // phase convention makes the delta exactly real positive
            assert!(v.max_abs_diff(&Signal::delta(n, k)) < 1e-10);
        }
        let angles: Vec<f64> = e.eigenvalues().iter().map(|z| z.arg()).collect();
        assert!(angles.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn permutation_matrix_with_degenerate_spectrum() {
        // a cyclic shift on 4 points plus 3 fixed points: eigenvalue 1 has multiplicity 4
        let n = 7;
        let perm = [1, 2, 3, 0, 4, 5, 6];
        let a = Operator::from_fn(n, |i, j| if perm[j] == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .into_unitary()
            .unwrap();
        let e = eig_unitary(&a).unwrap();
        let mut mult = e.multiplicities();
        mult.sort();
        assert_eq!(mult, vec![1, 1, 1, 4]);
        assert!(e.reconstruct(n).max_abs_diff(&a) < 1e-8);
        for s in &e.spaces {
            for (i, u) in s.basis.iter().enumerate() {
                for (j, v) in s.basis.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(u, v).unwrap() - c(expect, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn close_but_unmerged_clusters_error() {
        let diag = [c(1.0, 0.0), C64::from_polar(1.0, 5e-8), C64::from_polar(1.0, 2.0)];
        assert!(matches!(
            eig_unitary(&Operator::diagonal(&diag)),
            Err(Error::SpectralGap(_))
        ));
    }

    #[test]
    fn dft_spectrum_reconstructs() {
        for n in [5, 7, 11, 13] {
            let f = dft(n).into_unitary().unwrap();
            let e = eig_unitary(&f).unwrap();
            assert_eq!(e.multiplicities().iter().sum::<usize>(), n);
            assert!(e.spaces.len() <= 4);
            for s in &e.spaces {
                assert!((s.eigenvalue.norm() - 1.0).abs() < 1e-10);
            }
            assert!(e.reconstruct(n).max_abs_diff(&f) < 1e-8);
        }
    }

    #[test]
    fn phase_convention_prefers_lowest_index_on_ties() {
        let mut s = Signal::new(vec![c(0.0, 0.5), c(-0.5, 0.0), c(0.1, 0.0)]);
        s.normalize_phase();
        assert!((s.entries()[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((s.entries()[1] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn scalar_defect_ignores_global_phase() {
        let f = dft(5);
        let g = f.scaled(C64::from_polar(1.0, 1.1));
        assert!(scalar_defect(&g, &f) < 1e-14);
        assert!(scalar_defect(&Operator::identity(5), &f) > 0.1);
    }

    proptest! {
        #[test]
        fn inner_hermitian_symmetry(s1 in 0u64..1000, s2 in 0u64..1000) {
            let f = random_signal(s1, 6);
            let g = random_signal(s2 + 5000, 6);
            let a = inner(&f, &g).unwrap();
            let b = inner(&g, &f).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-14);
        }

        #[test]
        fn compose_matches_sequential_apply(seed in 0u64..1000) {
            let n = 5;
            let f = random_signal(seed, n);
            let a = Operator::from_fn(n, |i, j| c((i * 3 + j) as f64 * 0.1, (seed % 7) as f64 * 0.05 - j as f64 * 0.1));
            let b = dft(n);
            let lhs = a.compose(&b).unwrap().apply(&f).unwrap();
            let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
