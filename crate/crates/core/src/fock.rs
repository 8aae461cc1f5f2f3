//! Truncated Fock spaces for `N` bosonic or fermionic modes and the
//! elementary operators `a^i`, `a⁺_i`, `n_i` as explicit matrices.
//!
//! Bosonic spaces keep every occupation tuple with total number `≤ Λ`.
//! Identities of creator-degree `d` only hold on the safe subspace
//! `Σn ≤ Λ − d`; [`FockSpace::safe_projector`] builds the matching projector.
//! Fermionic spaces are exact (`dim = 2^N`) and use a left-to-right
//! Jordan–Wigner sign string.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    /// `+1` for Weyl (Bose), `−1` for Clifford (Fermi).
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => -1.0,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Bose => write!(f, "bose"),
            Statistics::Fermi => write!(f, "fermi"),
        }
    }
}

/// Occupation-number basis of `N` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    modes: usize,
    statistics: Statistics,
    cutoff: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockSpace {
    /// Builds the basis in lexicographic order. For fermions the cutoff is
    /// ignored and forced to `N`.
    pub fn new(modes: usize, statistics: Statistics, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("number of modes must be positive".into()));
        }
        let (cutoff, basis) = match statistics {
            Statistics::Fermi => (modes, enumerate(modes, 1, modes)),
            Statistics::Bose => {
                if cutoff == 0 {
                    return Err(Error::InvalidArgument(
                        "bosonic cutoff must be at least 1".into(),
                    ));
                }
                (cutoff, enumerate(modes, cutoff as u32, cutoff))
            }
        };
        let index = basis.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect();
        Ok(FockSpace { modes, statistics, cutoff, basis, index })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn state(&self, k: usize) -> &[u32] {
        &self.basis[k]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total(&self, k: usize) -> u32 {
        self.basis[k].iter().sum()
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i >= self.modes {
            Err(Error::IndexOutOfRange { index: i, len: self.modes })
        } else {
            Ok(())
        }
    }

    /// `a^i` (0-based mode index). Grade −1.
    pub fn annihilator(&self, i: usize) -> Result<LinOp> {
        self.check_mode(i)?;
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (k, t) in self.basis.iter().enumerate() {
            if t[i] == 0 {
                continue;
            }
            let mut lowered = t.clone();
            lowered[i] -= 1;
            let amp = match self.statistics {
                Statistics::Bose => (t[i] as f64).sqrt(),
                Statistics::Fermi => {
                    let string: u32 = t[..i].iter().sum();
                    if string % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            m[(self.index[&lowered], k)] = re(amp);
        }
        Ok(LinOp::graded(m, -1))
    }

    /// `a⁺_i`, the conjugate transpose of `a^i`. Grade +1.
    pub fn creator(&self, i: usize) -> Result<LinOp> {
        Ok(self.annihilator(i)?.adjoint())
    }

    pub fn annihilators(&self) -> Vec<LinOp> {
        (0..self.modes).map(|i| self.annihilator(i).expect("mode in range")).collect()
    }

    pub fn creators(&self) -> Vec<LinOp> {
        (0..self.modes).map(|i| self.creator(i).expect("mode in range")).collect()
    }

    /// `n_i = a⁺_i a^i`, diagonal in the occupation basis.
    pub fn number_op(&self, i: usize) -> Result<LinOp> {
        self.check_mode(i)?;
        self.diag_fn(|t| re(t[i] as f64))
    }

    /// `n = Σ n_i`.
    pub fn total_number(&self) -> LinOp {
        self.diag_fn(|t| re(t.iter().sum::<u32>() as f64)).expect("finite")
    }

    /// Orthogonal projector onto states with total occupation `≤ Λ − d`.
    pub fn safe_projector(&self, d: usize) -> Result<LinOp> {
        if d > self.cutoff {
            return Err(Error::InvalidArgument(format!(
                "safe degree {d} exceeds cutoff {}",
                self.cutoff
            )));
        }
        let top = (self.cutoff - d) as u32;
        self.diag_fn(|t| re(if t.iter().sum::<u32>() <= top { 1.0 } else { 0.0 }))
    }

    /// Diagonal operator with entries `f(occupation)`. Fails on non-finite values.
    pub fn diag_fn(&self, mut f: impl FnMut(&[u32]) -> C64) -> Result<LinOp> {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (k, t) in self.basis.iter().enumerate() {
            let v = f(t);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!("diagonal function at {t:?}")));
            }
            m[(k, k)] = v;
        }
        Ok(LinOp::graded(m, 0))
    }

    pub fn identity(&self) -> LinOp {
        LinOp::graded(linalg::identity(self.dim()), 0)
    }

    /// `‖[n, X] − gX‖ / ‖X‖` for an operator carrying grade `g`.
    /// Operators on `C^k ⊗ Fock` are handled by lifting `n` to the auxiliary factor.
    pub fn grade_residual(&self, op: &LinOp) -> Option<f64> {
        let g = op.grade?;
        let d = self.dim();
        let aux = op.matrix.nrows() / d;
        let n = linalg::kron(&linalg::identity(aux), self.total_number().matrix());
        let lhs = linalg::commutator(&n, &op.matrix) - &op.matrix * re(g as f64);
        let norm = linalg::spectral_norm(&op.matrix);
        let r = linalg::spectral_norm(&lhs);
        Some(if norm > 0.0 { r / norm } else { r })
    }
}

/// All tuples of length `modes` with entries `≤ max_each` and sum `≤ max_total`,
/// in lexicographic order.
fn enumerate(modes: usize, max_each: u32, max_total: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, max_each: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=budget.min(max_each) {
            prefix.push(v);
            rec(prefix, left - 1, budget - v, max_each, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(modes), modes, max_total as u32, max_each, &mut out);
    out
}

/// A complex matrix acting on a Fock space (possibly tensored with auxiliary
/// `C^k` factors on the left), with optional particle-number grade.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    matrix: CMat,
    grade: Option<i32>,
}

impl LinOp {
    pub fn new(matrix: CMat) -> Self {
        LinOp { matrix, grade: None }
    }

    pub fn graded(matrix: CMat, grade: i32) -> Self {
        LinOp { matrix, grade: Some(grade) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn grade(&self) -> Option<i32> {
        self.grade
    }

    pub fn with_grade(mut self, grade: Option<i32>) -> Self {
        self.grade = grade;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> LinOp {
        LinOp { matrix: self.matrix.adjoint(), grade: self.grade.map(|g| -g) }
    }

    pub fn scale(&self, s: C64) -> LinOp {
        LinOp { matrix: &self.matrix * s, grade: self.grade }
    }

    pub fn commutator(&self, other: &LinOp) -> LinOp {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &LinOp) -> LinOp {
        &(self * other) + &(other * self)
    }

    /// `P X P` for a projector `P`.
    pub fn project(&self, p: &LinOp) -> LinOp {
        LinOp { matrix: &p.matrix * &self.matrix * &p.matrix, grade: self.grade }
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    pub fn apply(&self, v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        &self.matrix * v
    }
}

fn merge_grades(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    }
}

impl Mul for &LinOp {
    type Output = LinOp;
    fn mul(self, rhs: &LinOp) -> LinOp {
        let grade = match (self.grade, rhs.grade) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        LinOp { matrix: &self.matrix * &rhs.matrix, grade }
    }
}

impl Add for &LinOp {
    type Output = LinOp;
    fn add(self, rhs: &LinOp) -> LinOp {
        LinOp { matrix: &self.matrix + &rhs.matrix, grade: merge_grades(self.grade, rhs.grade) }
    }
}

impl Sub for &LinOp {
    type Output = LinOp;
    fn sub(self, rhs: &LinOp) -> LinOp {
        LinOp { matrix: &self.matrix - &rhs.matrix, grade: merge_grades(self.grade, rhs.grade) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        assert_eq!(FockSpace::new(2, Statistics::Fermi, 0).unwrap().dim(), 4);
        assert_eq!(FockSpace::new(2, Statistics::Bose, 3).unwrap().dim(), 10);
        for n in 1..4 {
            for l in 1..5 {
                let s = FockSpace::new(n, Statistics::Bose, l).unwrap();
                assert_eq!(s.dim(), binom(n + l, n));
            }
        }
    }

    #[test]
    fn single_mode_basis_is_ordered() {
        let s = FockSpace::new(1, Statistics::Bose, 5).unwrap();
        let want: Vec<Vec<u32>> = (0..=5).map(|k| vec![k]).collect();
        assert_eq!(s.basis(), &want[..]);
    }

    #[test]
    fn rejects_degenerate_spaces() {
        assert!(FockSpace::new(0, Statistics::Bose, 3).is_err());
        assert!(FockSpace::new(2, Statistics::Bose, 0).is_err());
        let f = FockSpace::new(3, Statistics::Fermi, 0).unwrap();
        assert_eq!(f.cutoff(), 3);
        assert!(f.annihilator(3).is_err());
    }

    #[test]
    fn index_maps_are_inverse() {
        let s = FockSpace::new(3, Statistics::Bose, 4).unwrap();
        for k in 0..s.dim() {
            assert_eq!(s.index_of(s.state(k)), Some(k));
        }
        let mut sorted = s.basis().to_vec();
        sorted.sort();
        assert_eq!(sorted, s.basis());
    }

    #[test]
    fn number_eigenvalues() {
        let s = FockSpace::new(2, Statistics::Bose, 4).unwrap();
        let a = s.annihilator(0).unwrap();
        let n0 = &s.creator(0).unwrap() * &a;
        for k in 0..s.dim() {
            assert!((n0.matrix()[(k, k)].re - s.state(k)[0] as f64).abs() < 1e-14);
        }
        let n = s.total_number();
        let k = s.index_of(&[1, 2]).unwrap();
        assert_eq!(n.matrix()[(k, k)], re(3.0));
        assert_eq!(n.matrix()[(0, 0)], re(0.0));
        // n = Σ a⁺_i a^i entrywise
        let sum = &(&s.creator(0).unwrap() * &s.annihilator(0).unwrap())
            + &(&s.creator(1).unwrap() * &s.annihilator(1).unwrap());
        assert!(linalg::max_abs(&(sum.matrix() - n.matrix())) < 1e-14);
    }

    #[test]
    fn car_hold_exactly() {
        let s = FockSpace::new(3, Statistics::Fermi, 0).unwrap();
        let id = s.identity();
        for i in 0..3 {
            for j in 0..3 {
                let a = s.annihilator(i).unwrap();
                let ap = s.creator(j).unwrap();
                let mut r = a.anticommutator(&ap);
                if i == j {
                    r = &r - &id;
                }
                assert_eq!(r.norm(), 0.0, "{{a{i}, a+{j}}}");
                let aa = a.anticommutator(&s.annihilator(j).unwrap());
                assert_eq!(aa.norm(), 0.0);
            }
        }
    }

    #[test]
    fn ccr_defect_lives_on_top_shell() {
        let s = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        let a = s.annihilator(0).unwrap();
        let ap = s.creator(0).unwrap();
        let defect = &a.commutator(&ap) - &s.identity();
        let p = s.safe_projector(1).unwrap();
        assert!(defect.project(&p).norm() < 1e-14);
        assert!(defect.norm() > 1.0);
    }

    #[test]
    fn creator_is_adjoint_and_grades() {
        let s = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        for i in 0..2 {
            let a = s.annihilator(i).unwrap();
            let ap = s.creator(i).unwrap();
            assert_eq!(ap.matrix(), &a.matrix().adjoint());
            assert_eq!(a.grade(), Some(-1));
            assert_eq!(ap.grade(), Some(1));
            assert!(s.grade_residual(&a).unwrap() < 1e-13);
            assert!(s.grade_residual(&ap).unwrap() < 1e-13);
        }
    }

    #[test]
    fn safe_projectors() {
        let s = FockSpace::new(1, Statistics::Bose, 3).unwrap();
        assert_eq!(s.safe_projector(0).unwrap(), s.identity());
        let p1 = s.safe_projector(1).unwrap();
        let rank: f64 = (0..s.dim()).map(|k| p1.matrix()[(k, k)].re).sum();
        assert_eq!(rank, 3.0);
        let s2 = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        let top = s2.safe_projector(3).unwrap();
        let rank: f64 = (0..s2.dim()).map(|k| top.matrix()[(k, k)].re).sum();
        assert_eq!(rank, 1.0);
        assert_eq!(top.matrix()[(0, 0)], re(1.0));
        assert!(s2.safe_projector(4).is_err());
    }

    #[test]
    fn diag_fn_values() {
        let s = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        assert_eq!(s.diag_fn(|_| re(1.0)).unwrap(), s.identity());
        let q = 2.0_f64;
        let d = s.diag_fn(|t| re(q.powi(t[1] as i32))).unwrap();
        let k = s.index_of(&[0, 3]).unwrap();
        assert_eq!(d.matrix()[(k, k)], re(8.0));
        assert!(s.diag_fn(|_| re(f64::NAN)).is_err());
        // functions of n commute with every n_i
        let qq = 1.3_f64 * 1.3;
        let f = s
            .diag_fn(|t| {
                let n: u32 = t.iter().sum();
                re(if n == 0 { 1.0 } else { (qq.powi(n as i32) - 1.0) / (qq - 1.0) / n as f64 })
            })
            .unwrap();
        for i in 0..2 {
            assert_eq!(f.commutator(&s.number_op(i).unwrap()).norm(), 0.0);
        }
    }
}
