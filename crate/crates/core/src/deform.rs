//! Explicit q-deforming maps realized on truncated Fock spaces.
//!
//! Every map here dresses the classical `a⁺_i` with diagonal functions of the
//! occupation numbers; `A^i` is always taken as the adjoint of `A⁺_i`, which
//! is the compact `*`-structure for real `q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinOp, Statistics};
use crate::linalg::{self, re, C64};
use crate::qspecial::{self, DeformParams};

/// Which modes enter the `q^{Σ n_j}` string of the per-mode sl(N) candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ordering {
    /// `S(i) = {j > i}`
    Above,
    /// `S(i) = {j < i}`
    Below,
}

impl std::fmt::Display for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ordering::Above => write!(f, "above"),
            Ordering::Below => write!(f, "below"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeformedGenerators {
    pub space: FockSpace,
    pub params: DeformParams,
    /// `A^i`, grade −1.
    pub a: Vec<LinOp>,
    /// `A⁺_i`, grade +1.
    pub aplus: Vec<LinOp>,
    /// Human-readable description of the dressing, copied into reports.
    pub dressing: String,
}

impl DeformedGenerators {
    /// Wraps user-supplied generators.
    pub fn from_parts(
        space: FockSpace,
        params: DeformParams,
        a: Vec<LinOp>,
        aplus: Vec<LinOp>,
        dressing: impl Into<String>,
    ) -> Result<Self> {
        let n = space.modes();
        if a.len() != n || aplus.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.len().min(aplus.len()) });
        }
        for op in a.iter().chain(aplus.iter()) {
            if op.dim() != space.dim() {
                return Err(Error::DimensionMismatch { expected: space.dim(), found: op.dim() });
            }
        }
        Ok(DeformedGenerators { space, params, a, aplus, dressing: dressing.into() })
    }

    /// The undeformed generators `a^i`, `a⁺_i`.
    pub fn classical(space: &FockSpace, params: DeformParams) -> Self {
        DeformedGenerators {
            space: space.clone(),
            params,
            a: space.annihilators(),
            aplus: space.creators(),
            dressing: "classical a, a+".into(),
        }
    }

    pub fn modes(&self) -> usize {
        self.space.modes()
    }

    /// q-number operator `N_h = A⁺_i A^i`.
    pub fn number_h(&self) -> LinOp {
        let mut acc = &self.aplus[0] * &self.a[0];
        for i in 1..self.modes() {
            acc = &acc + &(&self.aplus[i] * &self.a[i]);
        }
        acc
    }

    /// Largest spectral-norm distance to another generator set.
    pub fn distance(&self, other: &DeformedGenerators) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.aplus.iter().zip(&other.aplus))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

fn real_q(params: &DeformParams) -> Result<f64> {
    let q = params.q;
    if q.im.abs() > 1e-14 || q.re <= 0.0 {
        return Err(Error::InvalidArgument(format!("deforming maps need real q > 0, got {q}")));
    }
    Ok(q.re)
}

/// `√((m)_{q²}/m)` with the value at `m = 0` supplied by the caller.
fn sqrt_ratio(m: u32, q: f64, at_zero: f64) -> Result<f64> {
    let v = if m == 0 { at_zero } else { qspecial::qnum(m as f64, q * q) / m as f64 };
    if v < 0.0 {
        return Err(Error::Domain(format!("negative dressing {v} at n = {m}")));
    }
    Ok(v.sqrt())
}

/// Builds `A⁺_i = D_i a⁺_i` from diagonal dressings `D_i` evaluated on the
/// post-creation occupation, and `A^i = (A⁺_i)†`.
fn from_creator_dressings(
    space: &FockSpace,
    params: DeformParams,
    dressing: impl Fn(usize, &[u32]) -> Result<f64>,
    label: String,
) -> Result<DeformedGenerators> {
    let mut aplus = Vec::with_capacity(space.modes());
    for i in 0..space.modes() {
        let mut err = None;
        let d = space.diag_fn(|t| match dressing(i, t) {
            Ok(v) => re(v),
            Err(e) => {
                err.get_or_insert(e);
                re(0.0)
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        aplus.push(&d * &space.creator(i)?);
    }
    let a = aplus.iter().map(LinOp::adjoint).collect();
    Ok(DeformedGenerators { space: space.clone(), params, a, aplus, dressing: label })
}

fn sln_with_zero_value(
    space: &FockSpace,
    params: DeformParams,
    ordering: Ordering,
    at_zero: f64,
) -> Result<DeformedGenerators> {
    if space.statistics() != Statistics::Bose || space.modes() < 2 {
        return Err(Error::InvalidArgument("sl(N) candidate map needs a bosonic space with N >= 2".into()));
    }
    let q = real_q(&params)?;
    let n = space.modes();
    from_creator_dressings(
        space,
        params,
        |i, t| {
            let exponent: u32 = match ordering {
                Ordering::Above => t[i + 1..n].iter().sum(),
                Ordering::Below => t[..i].iter().sum(),
            };
            Ok(sqrt_ratio(t[i], q, at_zero)? * q.powi(exponent as i32))
        },
        format!("A+_i = sqrt((n_i)_(q^2)/n_i) q^(sum_(j {ordering} i) n_j) a+_i"),
    )
}

/// Per-mode sl(N) candidate `A⁺_i = √((n_i)_{q²}/n_i) q^{Σ_{j∈S(i)} n_j} a⁺_i`.
/// Whether it satisfies the deformed relations is for the DCR oracle to decide.
#[allow(non_snake_case)]
pub fn slN_candidate_map(
    space: &FockSpace,
    params: DeformParams,
    ordering: Ordering,
) -> Result<DeformedGenerators> {
    sln_with_zero_value(space, params, ordering, 1.0)
}

/// Bosonic sl(2) map `A⁺_↑ = √((n_↑)_{q²}/n_↑) q^{n_↓} a⁺_↑`, `A⁺_↓ = √((n_↓)_{q²}/n_↓) a⁺_↓`.
pub fn sl2_bose_map(space: &FockSpace, params: DeformParams) -> Result<DeformedGenerators> {
    if space.modes() != 2 || space.statistics() != Statistics::Bose || space.cutoff() < 3 {
        return Err(Error::InvalidArgument("sl(2) Bose map needs N = 2, Bose, cutoff >= 3".into()));
    }
    let mut g = slN_candidate_map(space, params, Ordering::Above)?;
    g.dressing = "A+_up = sqrt((n_up)_(q^2)/n_up) q^(n_down) a+_up, A+_down = sqrt((n_down)_(q^2)/n_down) a+_down".into();
    Ok(g)
}

/// Fermionic sl(2) map `A⁺_↑ = q^{−n_↓} a⁺_↑`, `A⁺_↓ = a⁺_↓`.
pub fn sl2_fermi_map(space: &FockSpace, params: DeformParams) -> Result<DeformedGenerators> {
    if space.modes() != 2 || space.statistics() != Statistics::Fermi {
        return Err(Error::InvalidArgument("sl(2) Fermi map needs N = 2, Fermi".into()));
    }
    let q = real_q(&params)?;
    from_creator_dressings(
        space,
        params,
        |i, t| Ok(if i == 0 { q.powi(-(t[1] as i32)) } else { 1.0 }),
        "A+_up = q^(-n_down) a+_up, A+_down = a+_down".into(),
    )
}

/// Diagnostics of an inner automorphism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphismInfo {
    pub condition_number: f64,
    /// `‖α − 1‖`
    pub deviation: f64,
}

/// `A^{α i} = α A^i α⁻¹`, `A⁺_{α i} = α A⁺_i α⁻¹`.
pub fn inner_automorphism(
    gens: &DeformedGenerators,
    alpha: &LinOp,
) -> Result<(DeformedGenerators, AutomorphismInfo)> {
    if alpha.dim() != gens.space.dim() {
        return Err(Error::DimensionMismatch { expected: gens.space.dim(), found: alpha.dim() });
    }
    let cond = linalg::condition_number(alpha.matrix());
    if !(cond < 1e12) {
        return Err(Error::Singular(format!("alpha has condition number {cond:e}")));
    }
    let inv = LinOp::graded(linalg::inverse(alpha.matrix())?, 0).with_grade(alpha.grade());
    let conj = |x: &LinOp| (&(alpha * x) * &inv).with_grade(x.grade());
    let out = DeformedGenerators {
        space: gens.space.clone(),
        params: gens.params,
        a: gens.a.iter().map(conj).collect(),
        aplus: gens.aplus.iter().map(conj).collect(),
        dressing: format!("alpha-conjugate of [{}]", gens.dressing),
    };
    let info = AutomorphismInfo {
        condition_number: cond,
        deviation: (alpha - &gens.space.identity()).norm(),
    };
    Ok((out, info))
}

/// `α = √(Γ(n_↑+1)Γ(n_↓+1) / (Γ_{q²}(n_↑+1)Γ_{q²}(n_↓+1)))`, relating the
/// √y-dressed sl(2) map to the earlier non-unitary realization.
pub fn oleg_alpha_sl2(space: &FockSpace, params: DeformParams) -> Result<LinOp> {
    if space.modes() != 2 || space.statistics() != Statistics::Bose {
        return Err(Error::InvalidArgument("alpha is defined on the sl(2) Bose space".into()));
    }
    let q = real_q(&params)?;
    space.diag_fn(|t| re((qspecial::y_sln(t[0], q) * qspecial::y_sln(t[1], q)).sqrt()))
}

/// Earlier sl(2) realization: `A^↑ = a^↑ ((n_↑)_{q²}/n_↑) q^{n_↓}`, `A⁺_↑ = q^{n_↓} a⁺_↑`,
/// `A^↓ = a^↓ (n_↓)_{q²}/n_↓`, `A⁺_↓ = a⁺_↓`.
pub fn prior_work_generators(space: &FockSpace, params: DeformParams) -> Result<DeformedGenerators> {
    if space.modes() != 2 || space.statistics() != Statistics::Bose {
        return Err(Error::InvalidArgument("prior-work generators live on the sl(2) Bose space".into()));
    }
    let q = real_q(&params)?;
    let ratio = |m: u32| if m == 0 { 1.0 } else { qspecial::qnum(m as f64, q * q) / m as f64 };
    let a_up = &space.annihilator(0)? * &space.diag_fn(|t| re(ratio(t[0]) * q.powi(t[1] as i32)))?;
    let a_dn = &space.annihilator(1)? * &space.diag_fn(|t| re(ratio(t[1])))?;
    let ap_up = &space.diag_fn(|t| re(q.powi(t[1] as i32)))? * &space.creator(0)?;
    let ap_dn = space.creator(1)?;
    Ok(DeformedGenerators {
        space: space.clone(),
        params,
        a: vec![a_up, a_dn],
        aplus: vec![ap_up, ap_dn],
        dressing: "prior-work generators (u = 1)".into(),
    })
}

/// `max_i ‖(A^i)† − A⁺_i‖` on the safe subspace of degree 1 (the full space for fermions).
pub fn hermiticity_check(gens: &DeformedGenerators) -> Result<f64> {
    let p = match gens.space.statistics() {
        Statistics::Bose => gens.space.safe_projector(1)?,
        Statistics::Fermi => gens.space.identity(),
    };
    Ok(gens
        .a
        .iter()
        .zip(&gens.aplus)
        .map(|(a, ap)| (&a.adjoint() - ap).project(&p).norm())
        .fold(0.0, f64::max))
}

/// `max_i ‖A⁺_i|0⟩ − a⁺_i|0⟩‖`.
pub fn vacuum_residual(gens: &DeformedGenerators) -> f64 {
    let classical = gens.space.creators();
    gens.aplus
        .iter()
        .zip(&classical)
        .map(|(x, y)| (x.matrix().column(0) - y.matrix().column(0)).norm())
        .fold(0.0, f64::max)
}

/// Value of `2 ln q/(q² − 1)`, the `n → 0` limit of `(n)_{q²}/n`.
pub fn removable_limit(q: f64) -> f64 {
    if (q - 1.0).abs() < 1e-14 {
        1.0
    } else {
        2.0 * q.ln() / (q * q - 1.0)
    }
}

/// Rebuilds the sl(N) candidate with the `n_i = 0` dressing set to the
/// analytic limit instead of 1 and returns the largest entrywise difference.
pub fn removable_singularity_difference(
    space: &FockSpace,
    params: DeformParams,
    ordering: Ordering,
) -> Result<f64> {
    let q = real_q(&params)?;
    let one = sln_with_zero_value(space, params, ordering, 1.0)?;
    let lim = sln_with_zero_value(space, params, ordering, removable_limit(q))?;
    Ok(one
        .a
        .iter()
        .zip(&lim.a)
        .chain(one.aplus.iter().zip(&lim.aplus))
        .map(|(x, y)| linalg::max_abs(&(x.matrix() - y.matrix())))
        .fold(0.0, f64::max))
}

/// Scalar helper used by reports: `A⁺` applied to a single basis state.
pub fn apply_to_state(op: &LinOp, space: &FockSpace, occupation: &[u32]) -> Result<Vec<(Vec<u32>, C64)>> {
    let k = space
        .index_of(occupation)
        .ok_or_else(|| Error::InvalidArgument(format!("{occupation:?} is not a basis state")))?;
    Ok((0..space.dim())
        .filter_map(|r| {
            let v = op.matrix()[(r, k)];
            (v.norm() > 0.0).then(|| (space.state(r).to_vec(), v))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspecial::Sign;

    fn bose(n: usize, l: usize) -> FockSpace {
        FockSpace::new(n, Statistics::Bose, l).unwrap()
    }

    fn params(q: f64) -> DeformParams {
        DeformParams::from_q(q, Sign::Plus).unwrap()
    }

    #[test]
    fn classical_limit() {
        let s = bose(2, 4);
        let g = sl2_bose_map(&s, params(1.0)).unwrap();
        assert!(g.distance(&DeformedGenerators::classical(&s, params(1.0))) < 1e-15);
        let f = FockSpace::new(2, Statistics::Fermi, 0).unwrap();
        let g = sl2_fermi_map(&f, params(1.0)).unwrap();
        assert_eq!(g.distance(&DeformedGenerators::classical(&f, params(1.0))), 0.0);
        for n in 2..4 {
            let s = bose(n, 3);
            let g = slN_candidate_map(&s, params(1.0), Ordering::Below).unwrap();
            assert!(g.distance(&DeformedGenerators::classical(&s, params(1.0))) < 1e-15);
        }
    }

    #[test]
    fn classical_limit_is_linear_in_eps() {
        let s = bose(2, 4);
        let c = DeformedGenerators::classical(&s, params(1.0));
        let d1 = sl2_bose_map(&s, params(1.0 + 1e-3)).unwrap().distance(&c);
        let d2 = sl2_bose_map(&s, params(1.0 + 5e-4)).unwrap().distance(&c);
        let ratio = d1 / d2;
        assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn bose_map_entries() {
        let q = 1.3;
        let s = bose(2, 4);
        let g = sl2_bose_map(&s, params(q)).unwrap();
        let out = apply_to_state(&g.aplus[1], &s, &[0, 1]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, vec![0, 2]);
        assert!((out[0].1.re - (1.0 + q * q).sqrt()).abs() < 1e-14);
        let nh = g.number_h();
        for k in 0..s.dim() {
            let n = s.total(k) as f64;
            if s.total(k) < 4 {
                assert!((nh.matrix()[(k, k)].re - qspecial::qnum(n, q * q)).abs() < 1e-12);
            }
        }
        assert_eq!(vacuum_residual(&g), 0.0);
        for i in 0..2 {
            assert_eq!(g.a[i].grade(), Some(-1));
            assert_eq!(g.aplus[i].grade(), Some(1));
        }
    }

    #[test]
    fn candidate_above_reproduces_sl2() {
        let s = bose(2, 5);
        let a = slN_candidate_map(&s, params(0.7), Ordering::Above).unwrap();
        let b = sl2_bose_map(&s, params(0.7)).unwrap();
        assert_eq!(a.distance(&b), 0.0);
    }

    #[test]
    fn fermi_map_entries() {
        let q = 1.3;
        let f = FockSpace::new(2, Statistics::Fermi, 0).unwrap();
        let g = sl2_fermi_map(&f, params(q)).unwrap();
        let out = apply_to_state(&g.aplus[0], &f, &[0, 1]).unwrap();
        assert_eq!(out[0].0, vec![1, 1]);
        assert!((out[0].1.re - 1.0 / q).abs() < 1e-15);
        assert_eq!((&g.aplus[0] * &g.aplus[0]).norm(), 0.0);
        assert_eq!(hermiticity_check(&g).unwrap(), 0.0);
    }

    #[test]
    fn removable_singularity_is_invisible() {
        for q in [0.7, 1.3] {
            let s = bose(3, 4);
            for o in [Ordering::Above, Ordering::Below] {
                assert_eq!(removable_singularity_difference(&s, params(q), o).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn alpha_reconciles_prior_work() {
        let q = 1.3;
        let s = bose(2, 6);
        let alpha = oleg_alpha_sl2(&s, params(q)).unwrap();
        assert_eq!(alpha.matrix()[(0, 0)], re(1.0));
        let k = s.index_of(&[2, 0]).unwrap();
        assert!((alpha.matrix()[(k, k)].re - (2.0 / (1.0 + q * q)).sqrt()).abs() < 1e-15);
        let g = sl2_bose_map(&s, params(q)).unwrap();
        let (conj, info) = inner_automorphism(&g, &alpha).unwrap();
        let prior = prior_work_generators(&s, params(q)).unwrap();
        let worst = conj
            .a
            .iter()
            .zip(&prior.a)
            .chain(conj.aplus.iter().zip(&prior.aplus))
            .map(|(x, y)| linalg::max_abs(&(x.matrix() - y.matrix())))
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
        assert!(info.deviation > 0.0);
        assert!(hermiticity_check(&prior).unwrap() > 1e-3);
        assert!(hermiticity_check(&g).unwrap() < 1e-12);
    }

    #[test]
    fn identity_automorphism_is_trivial() {
        let s = bose(2, 4);
        let g = sl2_bose_map(&s, params(1.3)).unwrap();
        let (h, info) = inner_automorphism(&g, &s.identity()).unwrap();
        assert_eq!(h.distance(&g), 0.0);
        assert_eq!(info.deviation, 0.0);
        let singular = s.diag_fn(|t| re(if t[0] == 0 { 0.0 } else { 1.0 })).unwrap();
        assert!(inner_automorphism(&g, &singular).is_err());
    }

    #[test]
    fn shape_errors() {
        let f = FockSpace::new(2, Statistics::Fermi, 0).unwrap();
        assert!(sl2_bose_map(&f, params(1.3)).is_err());
        assert!(sl2_fermi_map(&bose(2, 3), params(1.3)).is_err());
        assert!(sl2_bose_map(&bose(3, 3), params(1.3)).is_err());
        assert!(slN_candidate_map(&f, params(1.3), Ordering::Above).is_err());
    }
}
