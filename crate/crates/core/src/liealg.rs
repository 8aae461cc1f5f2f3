//! sl(N) and so(N) structure data: the defining representation ρ, the
//! Jordan–Schwinger realization σ, quadratic Casimirs, the split Casimir
//! `t`, and the classical adjoint action on Fock operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinOp, Statistics};
use crate::linalg::{self, re, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SlN,
    SoN,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::SlN => write!(f, "sl"),
            Family::SoN => write!(f, "so"),
        }
    }
}

/// A simple Lie algebra in its defining `N`-dimensional representation.
/// For so(N) the metric is Cartesian, `c_ij = δ_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LieData {
    pub family: Family,
    pub n: usize,
}

/// A finite linear combination `Σ c·X_ij` of basis labels
/// (`E_ij` for sl(N), `L_ij` for so(N)); indices are 0-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LieElement {
    pub terms: Vec<(C64, usize, usize)>,
}

impl LieElement {
    pub fn basis(i: usize, j: usize) -> Self {
        LieElement { terms: vec![(re(1.0), i, j)] }
    }

    pub fn zero() -> Self {
        LieElement::default()
    }

    pub fn add_term(mut self, coeff: C64, i: usize, j: usize) -> Self {
        self.terms.push((coeff, i, j));
        self
    }

    pub fn scale(&self, s: C64) -> Self {
        LieElement { terms: self.terms.iter().map(|&(c, i, j)| (c * s, i, j)).collect() }
    }

    pub fn plus(&self, other: &LieElement) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        LieElement { terms }
    }
}

impl LieData {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("{family}({n}) needs N >= 2")));
        }
        Ok(LieData { family, n })
    }

    pub fn sl(n: usize) -> Result<Self> {
        Self::new(Family::SlN, n)
    }

    pub fn so(n: usize) -> Result<Self> {
        Self::new(Family::SoN, n)
    }

    fn check_label(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidArgument(format!(
                "label ({i},{j}) outside the basis of {}({})",
                self.family, self.n
            )));
        }
        if self.family == Family::SoN && i == j {
            return Err(Error::InvalidArgument(format!("L_{{{i}{i}}} is not an so(N) basis label")));
        }
        Ok(())
    }

    /// A spanning set: all `E_ij` (with `Σ E_ii = 0` understood) or `L_ij`, `i < j`.
    pub fn basis(&self) -> Vec<LieElement> {
        let n = self.n;
        match self.family {
            Family::SlN => (0..n)
                .flat_map(|i| (0..n).map(move |j| LieElement::basis(i, j)))
                .collect(),
            Family::SoN => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| LieElement::basis(i, j)))
                .collect(),
        }
    }

    /// `ρ(E_ij) = e_ij − δ_ij/N` or `ρ(L_ij) = e_ij − e_ji`.
    pub fn rho(&self, x: &LieElement) -> Result<CMat> {
        let n = self.n;
        let mut m = CMat::zeros(n, n);
        for &(c, i, j) in &x.terms {
            self.check_label(i, j)?;
            match self.family {
                Family::SlN => {
                    m[(i, j)] += c;
                    if i == j {
                        for k in 0..n {
                            m[(k, k)] -= c / n as f64;
                        }
                    }
                }
                Family::SoN => {
                    m[(i, j)] += c;
                    m[(j, i)] -= c;
                }
            }
        }
        Ok(m)
    }

    /// Lie bracket from the structure constants:
    /// sl: `[E_ij, E_hk] = E_ik δ_jh − E_hj δ_ik`;
    /// so: `[L_ij, L_hk] = L_ik c_jh + L_kj c_ih − L_hj c_ik − L_ih c_jk`.
    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        let mut out = LieElement::zero();
        for &(a, i, j) in &x.terms {
            self.check_label(i, j)?;
            for &(b, h, k) in &y.terms {
                self.check_label(h, k)?;
                let c = a * b;
                match self.family {
                    Family::SlN => {
                        if j == h {
                            out = out.add_term(c, i, k);
                        }
                        if i == k {
                            out = out.add_term(-c, h, j);
                        }
                    }
                    Family::SoN => {
                        // L_ii = 0, so diagonal labels are dropped.
                        let mut push = |s: f64, p: usize, r: usize| {
                            if p != r {
                                out = std::mem::take(&mut out).add_term(c * s, p, r);
                            }
                        };
                        if j == h {
                            push(1.0, i, k);
                        }
                        if i == h {
                            push(1.0, k, j);
                        }
                        if i == k {
                            push(-1.0, h, j);
                        }
                        if j == k {
                            push(-1.0, i, h);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Antipode on Lie elements, `S(X) = −X`.
    pub fn antipode(&self, x: &LieElement) -> LieElement {
        x.scale(re(-1.0))
    }

    /// `(ρ⊗ρ)Δ(X) = ρ(X)⊗1 + 1⊗ρ(X)`.
    pub fn coproduct_rho(&self, x: &LieElement) -> Result<CMat> {
        let r = self.rho(x)?;
        let id = linalg::identity(self.n);
        Ok(linalg::kron(&r, &id) + linalg::kron(&id, &r))
    }

    /// `(ρ⊗ρ)(t)` with `t = 2 E_ij⊗E_ji` (sl) or `t = L_ij⊗L^{ji}` (so).
    /// Closed forms: `2(P − 1/N)` and `2(P − K)`, `K = Σ e_ij⊗e_ij`.
    pub fn t_matrix(&self) -> CMat {
        let n = self.n;
        let mut t = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let (x, y, w) = match self.family {
                    Family::SlN => (LieElement::basis(i, j), LieElement::basis(j, i), 2.0),
                    Family::SoN if i != j => (LieElement::basis(i, j), LieElement::basis(j, i), 1.0),
                    Family::SoN => continue,
                };
                let a = self.rho(&x).expect("basis label");
                let b = self.rho(&y).expect("basis label");
                t += linalg::kron(&a, &b) * re(w);
            }
        }
        t
    }
}

fn check_space(space: &FockSpace, data: &LieData) -> Result<()> {
    if space.modes() != data.n {
        return Err(Error::DimensionMismatch { expected: data.n, found: space.modes() });
    }
    Ok(())
}

/// Jordan–Schwinger realization `σ(X) = ρ(X)^i_j a⁺_i a^j`.
pub fn sigma(space: &FockSpace, data: &LieData, x: &LieElement) -> Result<LinOp> {
    check_space(space, data)?;
    let r = data.rho(x)?;
    let a = space.annihilators();
    let ap = space.creators();
    let d = space.dim();
    let mut m = CMat::zeros(d, d);
    for i in 0..data.n {
        for j in 0..data.n {
            let c = r[(i, j)];
            if c != re(0.0) {
                m += (ap[i].matrix() * a[j].matrix()) * c;
            }
        }
    }
    Ok(LinOp::graded(m, 0))
}

/// `σ(E_ij E_ji)` for sl(N), `σ(½ L_ij L^{ji})` for so(N).
pub fn casimir_sigma(space: &FockSpace, data: &LieData) -> Result<LinOp> {
    check_space(space, data)?;
    let n = data.n;
    let d = space.dim();
    let mut m = CMat::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            let (w, skip) = match data.family {
                Family::SlN => (1.0, false),
                Family::SoN => (0.5, i == j),
            };
            if skip {
                continue;
            }
            let x = sigma(space, data, &LieElement::basis(i, j))?;
            let y = sigma(space, data, &LieElement::basis(j, i))?;
            m += (x.matrix() * y.matrix()) * re(w);
        }
    }
    Ok(LinOp::graded(m, 0))
}

/// Closed-form sl(N) Casimir `n(N ± n ∓ 1) − n²/N` (upper sign Bose).
pub fn casimir_closed_form(space: &FockSpace, data: &LieData) -> Result<LinOp> {
    check_space(space, data)?;
    if data.family != Family::SlN {
        return Err(Error::Unsupported("closed-form Casimir is stated for sl(N) only".into()));
    }
    let big_n = data.n as f64;
    let s = match space.statistics() {
        Statistics::Bose => 1.0,
        Statistics::Fermi => -1.0,
    };
    space.diag_fn(|t| {
        let n = t.iter().sum::<u32>() as f64;
        re(n * (big_n + s * n - s) - n * n / big_n)
    })
}

/// Classical action of a Lie element, `X ▷ b = [σ(X), b]`.
pub fn classical_action(
    space: &FockSpace,
    data: &LieData,
    x: &LieElement,
    b: &LinOp,
) -> Result<LinOp> {
    let s = sigma(space, data, x)?;
    if b.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: b.dim() });
    }
    Ok(s.commutator(b).with_grade(b.grade()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, flip, identity, max_abs};

    #[test]
    fn rho_examples() {
        let sl2 = LieData::sl(2).unwrap();
        let e11 = sl2.rho(&LieElement::basis(0, 0)).unwrap();
        assert_eq!(e11[(0, 0)], re(0.5));
        assert_eq!(e11[(1, 1)], re(-0.5));
        let so3 = LieData::so(3).unwrap();
        let l12 = so3.rho(&LieElement::basis(0, 1)).unwrap();
        assert!(dist(&l12, &(linalg::unit(3, 0, 1) - linalg::unit(3, 1, 0))) == 0.0);
        assert!(so3.rho(&LieElement::basis(1, 1)).is_err());
        assert!(sl2.rho(&LieElement::basis(0, 2)).is_err());
    }

    #[test]
    fn rho_is_a_representation() {
        for data in [LieData::sl(2).unwrap(), LieData::sl(3).unwrap(), LieData::so(3).unwrap(), LieData::so(4).unwrap()] {
            let basis = data.basis();
            for x in &basis {
                for y in &basis {
                    let lhs = data.rho(&data.bracket(x, y).unwrap()).unwrap();
                    let (rx, ry) = (data.rho(x).unwrap(), data.rho(y).unwrap());
                    assert!(dist(&lhs, &linalg::commutator(&rx, &ry)) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn t_matrix_closed_forms() {
        let sl2 = LieData::sl(2).unwrap();
        let half = sl2.t_matrix() * re(0.5);
        assert!(dist(&half, &(flip(2) - identity(4) * re(0.5))) < 1e-14);
        let so3 = LieData::so(3).unwrap();
        let mut k = CMat::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                k += linalg::kron(&linalg::unit(3, i, j), &linalg::unit(3, i, j));
            }
        }
        assert!(dist(&(so3.t_matrix() * re(0.5)), &(flip(3) - k)) < 1e-14);
    }

    #[test]
    fn t_is_invariant_and_symmetric() {
        for data in [LieData::sl(2).unwrap(), LieData::sl(3).unwrap(), LieData::so(3).unwrap()] {
            let t = data.t_matrix();
            let p = flip(data.n);
            assert!(dist(&(&p * &t * &p), &t) < 1e-14);
            for x in data.basis() {
                let dx = data.coproduct_rho(&x).unwrap();
                assert!(max_abs(&linalg::commutator(&t, &dx)) < 1e-14);
            }
        }
    }

    #[test]
    fn sigma_homomorphism_sl3() {
        let data = LieData::sl(3).unwrap();
        let space = FockSpace::new(3, Statistics::Bose, 4).unwrap();
        let p = space.safe_projector(0).unwrap();
        for x in data.basis() {
            for y in data.basis() {
                let lhs = sigma(&space, &data, &data.bracket(&x, &y).unwrap()).unwrap();
                let sx = sigma(&space, &data, &x).unwrap();
                let sy = sigma(&space, &data, &y).unwrap();
                let r = (&lhs - &sx.commutator(&sy)).project(&p).norm();
                assert!(r < 1e-12);
            }
        }
    }

    #[test]
    fn sigma_kills_vacuum() {
        let data = LieData::sl(2).unwrap();
        let space = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        for x in data.basis() {
            let s = sigma(&space, &data, &x).unwrap();
            assert!(s.matrix().column(0).iter().all(|z| z.norm() == 0.0));
        }
        let jp = sigma(&space, &data, &LieElement::basis(0, 1)).unwrap();
        let want = &space.creator(0).unwrap() * &space.annihilator(1).unwrap();
        assert!(dist(jp.matrix(), want.matrix()) == 0.0);
    }

    #[test]
    fn casimir_matches_closed_form() {
        for (n, stat, cut) in [(2, Statistics::Bose, 4), (3, Statistics::Fermi, 0), (3, Statistics::Bose, 3)] {
            let data = LieData::sl(n).unwrap();
            let space = FockSpace::new(n, stat, cut).unwrap();
            let c = casimir_sigma(&space, &data).unwrap();
            let want = casimir_closed_form(&space, &data).unwrap();
            assert!((&c - &want).norm() < 1e-12, "{n} {stat}");
        }
        let data = LieData::sl(2).unwrap();
        let space = FockSpace::new(2, Statistics::Bose, 3).unwrap();
        let c = casimir_sigma(&space, &data).unwrap();
        let k = space.index_of(&[1, 0]).unwrap();
        assert!((c.matrix()[(k, k)].re - 1.5).abs() < 1e-14);
        assert_eq!(c.matrix()[(0, 0)], re(0.0));
    }

    #[test]
    fn covariance_of_creators() {
        let data = LieData::sl(2).unwrap();
        let space = FockSpace::new(2, Statistics::Bose, 4).unwrap();
        let p = space.safe_projector(1).unwrap();
        let e12 = LieElement::basis(0, 1);
        let got = classical_action(&space, &data, &e12, &space.creator(1).unwrap()).unwrap();
        assert!((&got - &space.creator(0).unwrap()).project(&p).norm() < 1e-13);
        let id = classical_action(&space, &data, &e12, &space.identity()).unwrap();
        assert_eq!(id.norm(), 0.0);
        let n = classical_action(&space, &data, &e12, &space.total_number()).unwrap();
        assert!(n.norm() < 1e-14);
    }
}
