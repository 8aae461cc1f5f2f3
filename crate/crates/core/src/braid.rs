//! FRT braid matrices in the defining representation, their spectral
//! projectors, the deformed so(N) metric, and the matrices entering the
//! deformed commutation relations.
//!
//! Index convention: `C^N ⊗ C^N` is flattened as `i*N + j`, so a matrix `X`
//! on it has entries `X[(i,j),(h,k)] = X[(i*N+j, h*N+k)]`.
//!
//! sl(N) uses `R̂ = q Σ e_ii⊗e_ii + Σ_{i≠j} e_ji⊗e_ij + (q−q⁻¹) Σ_{i<j} e_ii⊗e_jj`
//! with eigenvalues `q` (q-symmetric) and `−q⁻¹` (q-antisymmetric).
//! so(N) is built in light-cone coordinates and conjugated into Cartesian
//! ones, where the `q → 1` metric is `δ`.

use crate::error::{Error, Result};
use crate::fock::Statistics;
use crate::liealg::Family;
use crate::linalg::{self, c, re, CMat, C64};

/// A cross-relation candidate matrix together with a short label.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCandidate {
    pub name: String,
    pub matrix: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationMatrices {
    pub family: Family,
    pub n: usize,
    pub q: f64,
    pub statistics: Statistics,
    pub rhat: CMat,
    /// `(eigenvalue, projector)` pairs, projectors summing to the identity.
    pub projectors: Vec<(f64, CMat)>,
    /// `(C_ij, C^ij)` for so(N).
    pub metric: Option<(CMat, CMat)>,
    /// `q^{±1}R̂` and `q^{±1}R̂⁻¹`, the power of `q` following the statistics.
    pub cross_candidates: Vec<CrossCandidate>,
    /// Projector whose contraction with `A⊗A` and `A⁺⊗A⁺` must vanish.
    pub annihilating_projector: CMat,
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("q must be positive and finite, got {q}")))
    }
}

/// sl(N) braid matrix.
pub fn rhat_sl(n: usize, q: f64) -> CMat {
    let mut r = CMat::zeros(n * n, n * n);
    let e = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                r[(e(i, i), e(i, i))] = re(q);
            } else {
                r[(e(i, j), e(j, i))] = re(1.0);
            }
            if i < j {
                r[(e(i, j), e(i, j))] += re(q - 1.0 / q);
            }
        }
    }
    r
}

/// Weyl vector components in light-cone order:
/// `(N/2−1, …, ½, 0, −½, …)` for odd `N`, `(N/2−1, …, 0, 0, …, −(N/2−1))` for even `N`.
pub fn rho_vector(n: usize) -> Vec<f64> {
    let top: Vec<f64> = (0..n / 2).map(|k| n as f64 / 2.0 - 1.0 - k as f64).collect();
    let mut v = top.clone();
    if n % 2 == 1 {
        v.push(0.0);
    }
    v.extend(top.iter().rev().map(|x| -x));
    v
}

fn conj_index(n: usize, i: usize) -> usize {
    n - 1 - i
}

/// so(N) braid matrix `P·R` in light-cone coordinates.
pub fn rhat_so_lightcone(n: usize, q: f64) -> CMat {
    let rho = rho_vector(n);
    let lam = q - 1.0 / q;
    let mut r = CMat::zeros(n * n, n * n);
    let e = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        let ip = conj_index(n, i);
        for j in 0..n {
            let diag = if i == j {
                if i != ip {
                    q
                } else {
                    1.0
                }
            } else if j == ip {
                1.0 / q
            } else {
                1.0
            };
            r[(e(i, j), e(i, j))] += re(diag);
            if i > j {
                // e_ij ⊗ e_ji
                r[(e(i, j), e(j, i))] += re(lam);
                // e_ij ⊗ e_{i'j'}
                let jp = conj_index(n, j);
                r[(e(i, ip), e(j, jp))] -= re(lam * q.powf(rho[i] - rho[j]));
            }
        }
    }
    linalg::flip(n) * r
}

/// Light-cone → Cartesian basis change `U` with columns
/// `f_k = (e_k + i e_k')/√2`, `f_k' = (e_k − i e_k')/√2`, `f_m = e_m`.
pub fn cartesian_basis(n: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMat::zeros(n, n);
    for k in 0..n / 2 {
        let kp = conj_index(n, k);
        u[(k, k)] = re(s);
        u[(kp, k)] = c(0.0, s);
        u[(k, kp)] = re(s);
        u[(kp, kp)] = c(0.0, -s);
    }
    if n % 2 == 1 {
        u[(n / 2, n / 2)] = re(1.0);
    }
    u
}

/// so(N) braid matrix in Cartesian coordinates, `(U⊗U) R̂ (U⊗U)⁻¹`.
pub fn rhat_so(n: usize, q: f64) -> CMat {
    let u = cartesian_basis(n);
    let uu = linalg::kron(&u, &u);
    // U is unitary
    &uu * rhat_so_lightcone(n, q) * uu.adjoint()
}

/// Deformed so(N) metric `(C_ij, C^ij)` in Cartesian coordinates. The
/// light-cone form is `C_ij = q^{−ρ_i} δ_{ij'}`, which is its own inverse.
pub fn metric(family: Family, n: usize, q: f64) -> Result<(CMat, CMat)> {
    if family != Family::SoN {
        return Err(Error::Unsupported("the deformed metric exists for so(N) only".into()));
    }
    check_q(q)?;
    if n < 3 {
        return Err(Error::InvalidArgument(format!("so(N) metric needs N >= 3, got {n}")));
    }
    let rho = rho_vector(n);
    let mut lc = CMat::zeros(n, n);
    for i in 0..n {
        lc[(i, conj_index(n, i))] = re(q.powf(-rho[i]));
    }
    let u = cartesian_basis(n);
    let uinv = u.adjoint();
    let lower = uinv.transpose() * &lc * &uinv;
    let upper = &u * &lc * u.transpose();
    Ok((lower, upper))
}

/// Flattens a 2-tensor `T^{ij}` into a vector on `C^N⊗C^N`.
pub fn vectorize(t: &CMat) -> nalgebra::DVector<C64> {
    let n = t.nrows();
    nalgebra::DVector::from_fn(n * n, |k, _| t[(k / n, k % n)])
}

/// `‖R̂ vec(C^{··}) − q^{1−N} vec(C^{··})‖`: the upper metric spans the
/// rank-one eigenspace of `R̂`.
pub fn metric_twist_residual(n: usize, q: f64) -> Result<f64> {
    let (_, upper) = metric(Family::SoN, n, q)?;
    let v = vectorize(&upper);
    let r = rhat_so(n, q);
    Ok((&r * &v - &v * re(q.powf(1.0 - n as f64))).norm())
}

/// Braid matrix of the family (sl: Hecke; so: cubic minimal polynomial).
pub fn rhat(family: Family, n: usize, q: f64) -> Result<CMat> {
    check_q(q)?;
    match family {
        Family::SlN if n >= 2 => Ok(rhat_sl(n, q)),
        Family::SoN if n >= 3 => Ok(rhat_so(n, q)),
        _ => Err(Error::InvalidArgument(format!("{family}({n}) is not supported"))),
    }
}

/// Distinct eigenvalues of `R̂`.
pub fn eigenvalues(family: Family, n: usize, q: f64) -> Vec<f64> {
    match family {
        Family::SlN => vec![q, -1.0 / q],
        Family::SoN => vec![q, -1.0 / q, q.powf(1.0 - n as f64)],
    }
}

/// Minimal-polynomial residual `‖Π_k (R̂ − λ_k)‖`.
pub fn characteristic_residual(family: Family, n: usize, q: f64) -> Result<f64> {
    let r = rhat(family, n, q)?;
    let id = linalg::identity(n * n);
    let mut acc = id.clone();
    for lam in eigenvalues(family, n, q) {
        acc *= &r - &id * re(lam);
    }
    Ok(linalg::spectral_norm(&acc))
}

/// Braid relation residual `‖R̂₁₂R̂₂₃R̂₁₂ − R̂₂₃R̂₁₂R̂₂₃‖`.
pub fn yang_baxter_residual(r: &CMat, n: usize) -> f64 {
    let id = linalg::identity(n);
    let r12 = linalg::kron(r, &id);
    let r23 = linalg::kron(&id, r);
    linalg::spectral_norm(&(&r12 * &r23 * &r12 - &r23 * &r12 * &r23))
}

fn spectral_projectors(family: Family, n: usize, q: f64, r: &CMat) -> Vec<(f64, CMat)> {
    let dim = n * n;
    let id = linalg::identity(dim);
    let lams = eigenvalues(family, n, q);
    if family == Family::SoN && (q - 1.0).abs() < 1e-12 {
        // q = 1: eigenvalues q and q^{1−N} coincide; use the classical split.
        let p = linalg::flip(n);
        let mut k = CMat::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                k[(i * n + i, j * n + j)] = re(1.0 / n as f64);
            }
        }
        let sym = (&id + &p) * re(0.5) - &k;
        let anti = (&id - &p) * re(0.5);
        return vec![(lams[0], sym), (lams[1], anti), (lams[2], k)];
    }
    lams.iter()
        .enumerate()
        .map(|(a, &la)| {
            let mut m = id.clone();
            for (b, &lb) in lams.iter().enumerate() {
                if a != b {
                    m *= (r - &id * re(lb)) / re(la - lb);
                }
            }
            (la, m)
        })
        .collect()
}

/// Assembles every relation matrix for `(family, N, q, statistics)`.
pub fn build_relations(
    family: Family,
    n: usize,
    q: f64,
    statistics: Statistics,
) -> Result<RelationMatrices> {
    if family == Family::SoN && statistics == Statistics::Fermi {
        return Err(Error::Unsupported("so(N) relations are defined for Weyl statistics only".into()));
    }
    let r = rhat(family, n, q)?;
    let projectors = spectral_projectors(family, n, q, &r);
    let rinv = linalg::inverse(&r)?;
    let (w, tag) = match statistics {
        Statistics::Bose => (q, "q"),
        Statistics::Fermi => (1.0 / q, "q^-1"),
    };
    let cross_candidates = vec![
        CrossCandidate { name: format!("{tag}R"), matrix: &r * re(w) },
        CrossCandidate { name: format!("{tag}Rinv"), matrix: &rinv * re(w) },
    ];
    // Weyl: q-antisymmetrizer (eigenvalue −q⁻¹); Clifford: q-symmetrizer (eigenvalue q).
    let target = match statistics {
        Statistics::Bose => -1.0 / q,
        Statistics::Fermi => q,
    };
    let annihilating_projector = projectors
        .iter()
        .find(|(l, _)| (l - target).abs() < 1e-15 * (1.0 + target.abs()))
        .map(|(_, p)| p.clone())
        .expect("eigenvalue list contains the target");
    let metric = match family {
        Family::SoN => Some(metric(family, n, q)?),
        Family::SlN => None,
    };
    Ok(RelationMatrices {
        family,
        n,
        q,
        statistics,
        rhat: r,
        projectors,
        metric,
        cross_candidates,
        annihilating_projector,
    })
}

impl RelationMatrices {
    /// `(‖ΣP_k − 1‖, max_{j,k} ‖P_jP_k − δ_jk P_k‖)`.
    pub fn projector_residuals(&self) -> (f64, f64) {
        let dim = self.n * self.n;
        let id = linalg::identity(dim);
        let mut sum = CMat::zeros(dim, dim);
        let mut worst: f64 = 0.0;
        for (a, (_, pa)) in self.projectors.iter().enumerate() {
            sum += pa;
            for (b, (_, pb)) in self.projectors.iter().enumerate() {
                let prod = pa * pb;
                let r = if a == b { linalg::dist(&prod, pb) } else { linalg::spectral_norm(&prod) };
                worst = worst.max(r);
            }
        }
        (linalg::dist(&sum, &id), worst)
    }

    /// Ranks of the projectors (their traces), in eigenvalue order.
    pub fn projector_ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|(_, p)| p.trace().re.round() as usize).collect()
    }

    /// The cross candidate with the given label.
    pub fn candidate(&self, name: &str) -> Option<&CrossCandidate> {
        self.cross_candidates.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, flip, identity, max_abs};

    const CASES: [(Family, usize); 4] =
        [(Family::SlN, 2), (Family::SlN, 3), (Family::SoN, 3), (Family::SoN, 4)];

    #[test]
    fn sl2_entries() {
        let q = 1.3;
        let r = rhat_sl(2, q);
        let want = [
            [q, 0.0, 0.0, 0.0],
            [0.0, q - 1.0 / q, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, q],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((r[(i, j)].re - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn braid_and_characteristic_identities() {
        for (fam, n) in CASES {
            for q in [0.7, 1.3] {
                let r = rhat(fam, n, q).unwrap();
                assert!(yang_baxter_residual(&r, n) < 1e-12, "{fam}{n} q={q}");
                assert!(characteristic_residual(fam, n, q).unwrap() < 1e-12, "{fam}{n} q={q}");
            }
        }
    }

    #[test]
    fn classical_limit_is_flip() {
        for (fam, n) in CASES {
            let q = 1.0 + 1e-8;
            assert!(max_abs(&(rhat(fam, n, q).unwrap() - flip(n))) < 1e-6);
            let rel = build_relations(fam, n, 1.0, Statistics::Bose).unwrap();
            for cand in &rel.cross_candidates {
                assert!(max_abs(&(&cand.matrix - flip(n))) < 1e-14);
            }
        }
    }

    #[test]
    fn projectors_complete_and_ranked() {
        for (fam, n) in CASES {
            for q in [0.7, 1.0, 1.3] {
                let rel = build_relations(fam, n, q, Statistics::Bose).unwrap();
                let (sum, orth) = rel.projector_residuals();
                assert!(sum < 1e-12 && orth < 1e-12, "{fam}{n} q={q}: {sum} {orth}");
            }
        }
        let so3 = build_relations(Family::SoN, 3, 1.3, Statistics::Bose).unwrap();
        assert_eq!(so3.projector_ranks(), vec![5, 3, 1]);
        let sl3 = build_relations(Family::SlN, 3, 0.7, Statistics::Bose).unwrap();
        assert_eq!(sl3.projector_ranks(), vec![6, 3]);
    }

    #[test]
    fn annihilating_projector_choice() {
        let q = 1.3;
        let weyl = build_relations(Family::SlN, 2, q, Statistics::Bose).unwrap();
        let id = identity(4);
        let want = (&weyl.rhat - &id * re(q)) / re(-1.0 / q - q);
        assert!(dist(&weyl.annihilating_projector, &want) < 1e-14);
        let cliff = build_relations(Family::SlN, 2, q, Statistics::Fermi).unwrap();
        let want = (&cliff.rhat + &id * re(1.0 / q)) / re(q + 1.0 / q);
        assert!(dist(&cliff.annihilating_projector, &want) < 1e-14);
        assert!(build_relations(Family::SoN, 3, q, Statistics::Fermi).is_err());
    }

    #[test]
    fn metric_properties() {
        assert!(metric(Family::SlN, 3, 1.2).is_err());
        for n in [3, 4, 5] {
            let (lo, _) = metric(Family::SoN, n, 1.0).unwrap();
            assert!(dist(&lo, &identity(n)) < 1e-15);
            for q in [0.7, 1.2] {
                let (lo, up) = metric(Family::SoN, n, q).unwrap();
                assert!(dist(&(&up * &lo), &identity(n)) < 1e-14);
                assert!(metric_twist_residual(n, q).unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn so3_metric_by_hand() {
        // light-cone C = antidiag(q^{-1/2}, 1, q^{1/2}) rotated by U
        let q: f64 = 1.2;
        let (a, b) = (q.powf(-0.5), q.sqrt());
        let (lo, _) = metric(Family::SoN, 3, q).unwrap();
        let want = [
            [re((a + b) / 2.0), re(0.0), c(0.0, (a - b) / 2.0)],
            [re(0.0), re(1.0), re(0.0)],
            [c(0.0, -(a - b) / 2.0), re(0.0), re((a + b) / 2.0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((lo[(i, j)] - want[i][j]).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn rho_vectors() {
        assert_eq!(rho_vector(3), vec![0.5, 0.0, -0.5]);
        assert_eq!(rho_vector(4), vec![1.0, 0.0, -0.0, -1.0]);
        assert_eq!(rho_vector(5), vec![1.5, 0.5, 0.0, -0.5, -1.5]);
    }
}
