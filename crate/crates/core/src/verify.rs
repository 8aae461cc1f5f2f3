//! Residual checks of the deformed commutation relations and of the
//! invariants built from deformed generators.
//!
//! All residuals are spectral norms of safe-projected operators; the safe
//! degree follows the creator-degree of each relation (fermionic spaces are
//! exact and never projected).

use serde_json::{json, Value};

use crate::braid::RelationMatrices;
use crate::deform::DeformedGenerators;
use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinOp, Statistics};
use crate::liealg::{self, LieData};
use crate::linalg::{self, re, CMat, C64};
use crate::qspecial;
use crate::report::Case;

/// Residual pair for one operator identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub spectral: f64,
    pub frobenius: f64,
}

impl Norms {
    fn of(m: &CMat) -> Self {
        Norms { spectral: linalg::spectral_norm(m), frobenius: linalg::frobenius_norm(m) }
    }

    fn max(self, other: Norms) -> Norms {
        Norms { spectral: self.spectral.max(other.spectral), frobenius: self.frobenius.max(other.frobenius) }
    }

    const ZERO: Norms = Norms { spectral: 0.0, frobenius: 0.0 };
}

/// Safe projector of degree `d` (identity on fermionic spaces).
pub fn safe(space: &FockSpace, d: usize) -> Result<LinOp> {
    match space.statistics() {
        Statistics::Fermi => Ok(space.identity()),
        Statistics::Bose => space.safe_projector(d),
    }
}

fn projected(x: &CMat, s: &LinOp) -> Norms {
    Norms::of(&(s.matrix() * x * s.matrix()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossResidual {
    pub name: String,
    pub norms: Norms,
}

/// Raw DCR residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct DcrResiduals {
    /// `Π^{ij}_{hk} A^k A^h`
    pub annihilators: Norms,
    /// `Π^{ij}_{hk} A⁺_h A⁺_k`
    pub creators: Norms,
    /// `A^iA⁺_j − δ^i_j ∓ C^{ih}_{jk} A⁺_h A^k` per candidate.
    pub cross: Vec<CrossResidual>,
}

impl DcrResiduals {
    /// Candidates whose cross residual is within `tol`.
    pub fn passing(&self, tol: f64) -> Vec<&str> {
        self.cross.iter().filter(|c| c.norms.spectral <= tol).map(|c| c.name.as_str()).collect()
    }

    pub fn best_cross(&self) -> &CrossResidual {
        self.cross
            .iter()
            .min_by(|a, b| a.norms.spectral.total_cmp(&b.norms.spectral))
            .expect("at least one candidate")
    }

    /// Largest residual among the quadratic relations and the best cross candidate.
    pub fn worst_accepted(&self) -> f64 {
        self.annihilators.spectral.max(self.creators.spectral).max(self.best_cross().norms.spectral)
    }
}

fn check_shapes(gens: &DeformedGenerators, rel: &RelationMatrices) -> Result<()> {
    if gens.modes() != rel.n {
        return Err(Error::DimensionMismatch { expected: rel.n, found: gens.modes() });
    }
    if gens.space.statistics() != rel.statistics {
        return Err(Error::InvalidArgument(format!(
            "generators are {} but relations were built for {}",
            gens.space.statistics(),
            rel.statistics
        )));
    }
    if (gens.params.q - re(rel.q)).norm() > 1e-12 * rel.q.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "generators have q = {} but relations q = {}",
            gens.params.q, rel.q
        )));
    }
    Ok(())
}

/// Quadratic and cross relation residuals on the degree-2 safe subspace.
pub fn dcr_residuals(gens: &DeformedGenerators, rel: &RelationMatrices) -> Result<DcrResiduals> {
    check_shapes(gens, rel)?;
    let n = rel.n;
    let s = safe(&gens.space, 2)?;
    let sign = gens.space.statistics().sign();
    let d = gens.space.dim();
    let a: Vec<&CMat> = gens.a.iter().map(LinOp::matrix).collect();
    let ap: Vec<&CMat> = gens.aplus.iter().map(LinOp::matrix).collect();
    let mut aa = vec![CMat::zeros(d, d); n * n];
    let mut apap = vec![CMat::zeros(d, d); n * n];
    let mut apa = vec![CMat::zeros(d, d); n * n];
    for h in 0..n {
        for k in 0..n {
            aa[h * n + k] = a[h] * a[k];
            apap[h * n + k] = ap[h] * ap[k];
            apa[h * n + k] = ap[h] * a[k];
        }
    }
    let pi = &rel.annihilating_projector;
    let mut annihilators = Norms::ZERO;
    let mut creators = Norms::ZERO;
    for i in 0..n {
        for j in 0..n {
            let mut x = CMat::zeros(d, d);
            let mut y = CMat::zeros(d, d);
            for h in 0..n {
                for k in 0..n {
                    let c = pi[(i * n + j, h * n + k)];
                    if c != re(0.0) {
                        x += &aa[k * n + h] * c;
                        y += &apap[h * n + k] * c;
                    }
                }
            }
            annihilators = annihilators.max(projected(&x, &s));
            creators = creators.max(projected(&y, &s));
        }
    }
    let id = linalg::identity(d);
    let mut cross = Vec::new();
    for cand in &rel.cross_candidates {
        let mut worst = Norms::ZERO;
        for i in 0..n {
            for j in 0..n {
                let mut x = a[i] * ap[j];
                if i == j {
                    x -= &id;
                }
                for h in 0..n {
                    for k in 0..n {
                        let c = cand.matrix[(i * n + h, j * n + k)];
                        if c != re(0.0) {
                            x -= &apa[h * n + k] * (c * sign);
                        }
                    }
                }
                worst = worst.max(projected(&x, &s));
            }
        }
        cross.push(CrossResidual { name: cand.name.clone(), norms: worst });
    }
    Ok(DcrResiduals { annihilators, creators, cross })
}

/// Report rows for the DCR oracle. The cross row carries the best candidate;
/// every candidate's residual goes to metadata, and a `uniqueness` row has
/// residual `|#passing − 1|` with tolerance 0.
pub fn dcr_cases(prefix: &str, res: &DcrResiduals, tol: f64) -> Vec<Case> {
    let best = res.best_cross();
    let passing = res.passing(tol);
    let mut per: serde_json::Map<String, Value> = serde_json::Map::new();
    for c in &res.cross {
        per.insert(c.name.clone(), json!(c.norms.spectral));
    }
    vec![
        Case::new(format!("{prefix}.dcr.quad_annihilators"), res.annihilators.spectral, tol)
            .with("frobenius", res.annihilators.frobenius),
        Case::new(format!("{prefix}.dcr.quad_creators"), res.creators.spectral, tol)
            .with("frobenius", res.creators.frobenius),
        Case::new(format!("{prefix}.dcr.cross"), best.norms.spectral, tol)
            .with("frobenius", best.norms.frobenius)
            .with("selected", best.name.clone())
            .with("candidates", Value::Object(per)),
        Case::new(format!("{prefix}.dcr.cross_uniqueness"), (passing.len() as f64 - 1.0).abs(), 0.0)
            .with("passing", passing.iter().map(|s| Value::from(*s)).collect::<Vec<_>>()),
    ]
}

/// Exponent `±2` of the q-number relations, by statistics.
fn ncr_power(space: &FockSpace) -> f64 {
    2.0 * space.statistics().sign()
}

/// Residuals of `N_h A⁺_i = A⁺_i + q^{±2} A⁺_i N_h` and
/// `N_h A^i = q^{∓2}(−A^i + A^i N_h)`, maximized over `i`.
pub fn ncr_residuals(gens: &DeformedGenerators) -> Result<(f64, f64)> {
    let s = safe(&gens.space, 2)?;
    let nh = gens.number_h();
    let q = gens.params.q;
    let qq = q.powf(ncr_power(&gens.space));
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    for (a, ap) in gens.a.iter().zip(&gens.aplus) {
        let x = nh.matrix() * ap.matrix() - ap.matrix() - ap.matrix() * nh.matrix() * qq;
        r1 = r1.max(projected(&x, &s).spectral);
        let y = nh.matrix() * a.matrix() - (a.matrix() * nh.matrix() - a.matrix()) / qq;
        r2 = r2.max(projected(&y, &s).spectral);
    }
    Ok((r1, r2))
}

/// Largest deviation of `N_h` from `diag((n)_{q^{±2}})`, off-diagonal entries included.
pub fn nh_spectrum_residual(gens: &DeformedGenerators) -> Result<f64> {
    let q = gens.params.q;
    if q.im.abs() > 1e-14 {
        return Err(Error::InvalidArgument("spectrum check needs real q".into()));
    }
    let base = q.re.powf(ncr_power(&gens.space));
    let want = gens.space.diag_fn(|t| re(qspecial::qnum(t.iter().sum::<u32>() as f64, base)))?;
    Ok(linalg::max_abs(&(gens.number_h().matrix() - want.matrix())))
}

pub fn ncr_cases(prefix: &str, gens: &DeformedGenerators, tol_rel: f64, tol_spec: f64) -> Vec<Case> {
    let mut out = Vec::new();
    match ncr_residuals(gens) {
        Ok((r1, r2)) => {
            out.push(Case::new(format!("{prefix}.ncr.creator"), r1, tol_rel));
            out.push(Case::new(format!("{prefix}.ncr.annihilator"), r2, tol_rel));
        }
        Err(e) => out.push(Case::failed(format!("{prefix}.ncr"), tol_rel, &e)),
    }
    match nh_spectrum_residual(gens) {
        Ok(r) => out.push(Case::new(format!("{prefix}.ncr.spectrum"), r, tol_spec)),
        Err(e) => out.push(Case::failed(format!("{prefix}.ncr.spectrum"), tol_spec, &e)),
    }
    out
}

/// so(N)-shaped generator data for the invariant relations: `A^i`, `A⁺_i`,
/// lower metric `C_ij`, upper metric `C^ij`, and `q`.
pub struct PappaInput<'a> {
    pub space: &'a FockSpace,
    pub a: &'a [LinOp],
    pub aplus: &'a [LinOp],
    pub lower: &'a CMat,
    pub upper: &'a CMat,
    pub q: f64,
}

/// Residuals of the four relations for `ACA = A^i C_ji A^j` and
/// `A⁺CA⁺ = A⁺_i C^ij A⁺_j`:
/// `[ACA, A^i]`, `[A⁺CA⁺, A⁺_i]`, `(ACA)A⁺_i − q²A⁺_i(ACA) − (1+q^{2−N})C_ij A^j`,
/// `A^i(A⁺CA⁺) − q²(A⁺CA⁺)A^i − (1+q^{2−N})C^ij A⁺_j`.
pub fn pappa_residuals(input: &PappaInput<'_>) -> Result<[f64; 4]> {
    let n = input.a.len();
    if input.aplus.len() != n || input.lower.nrows() != n || input.upper.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: input.lower.nrows() });
    }
    let d = input.space.dim();
    let q = input.q;
    let factor = 1.0 + q.powf(2.0 - n as f64);
    let mut aca = CMat::zeros(d, d);
    let mut apcap = CMat::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            aca += input.a[i].matrix() * input.a[j].matrix() * input.lower[(j, i)];
            apcap += input.aplus[i].matrix() * input.aplus[j].matrix() * input.upper[(i, j)];
        }
    }
    let projs: Vec<LinOp> = [0, 3, 1, 2].iter().map(|&k| safe(input.space, k)).collect::<Result<_>>()?;
    let mut r = [0.0f64; 4];
    for i in 0..n {
        let ai = input.a[i].matrix();
        let api = input.aplus[i].matrix();
        let x1 = linalg::commutator(&aca, ai);
        let x2 = linalg::commutator(&apcap, api);
        let mut x3 = &aca * api - api * &aca * C64::from(q * q);
        let mut x4 = ai * &apcap - &apcap * ai * C64::from(q * q);
        for j in 0..n {
            x3 -= input.a[j].matrix() * (input.lower[(i, j)] * factor);
            x4 -= input.aplus[j].matrix() * (input.upper[(i, j)] * factor);
        }
        for (k, x) in [x1, x2, x3, x4].iter().enumerate() {
            r[k] = r[k].max(projected(x, &projs[k]).spectral);
        }
    }
    Ok(r)
}

pub fn pappa_cases(prefix: &str, input: &PappaInput<'_>, tol: f64) -> Vec<Case> {
    match pappa_residuals(input) {
        Ok(r) => (0..4)
            .map(|k| Case::new(format!("{prefix}.pappa{}", k + 1), r[k], tol).with("q", input.q))
            .collect(),
        Err(e) => vec![Case::failed(format!("{prefix}.pappa"), tol, &e)],
    }
}

/// `max_X ‖[σ(X), I]‖` over the Lie basis, on the degree-1 safe subspace.
pub fn commutant_residual(space: &FockSpace, data: &LieData, invariant: &LinOp) -> Result<f64> {
    let s = safe(space, 1)?;
    let mut worst: f64 = 0.0;
    for x in data.basis() {
        let sx = liealg::sigma(space, data, &x)?;
        let c = linalg::commutator(sx.matrix(), invariant.matrix());
        worst = worst.max(projected(&c, &s).spectral);
    }
    Ok(worst)
}

/// Commutant characterization of invariants: `N_h` plus any named extras.
pub fn invariant_commutant_cases(
    prefix: &str,
    gens: &DeformedGenerators,
    data: &LieData,
    extras: &[(&str, LinOp)],
    tol: f64,
) -> Vec<Case> {
    let mut items: Vec<(String, LinOp)> = vec![("N_h".into(), gens.number_h())];
    items.extend(extras.iter().map(|(k, v)| (k.to_string(), v.clone())));
    items
        .into_iter()
        .map(|(label, op)| {
            let name = format!("{prefix}.commutant.{label}");
            match commutant_residual(&gens.space, data, &op) {
                Ok(r) => Case::new(name, r, tol),
                Err(e) => Case::failed(name, tol, &e),
            }
        })
        .collect()
}
