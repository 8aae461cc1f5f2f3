//! Suite registry, configuration, and report assembly for the `qheis` CLI.
//!
//! Each suite expands into independent tasks (one per parameter point) that
//! run on a bounded rayon pool; their rows are merged and sorted by name, so
//! the report does not depend on scheduling.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::braid;
use crate::deform::{self, Ordering};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, Statistics};
use crate::kz::{self, Dressing, KzOperatorSystem, KzScalarParams};
use crate::liealg::{self, Family, LieData};
use crate::linalg::{self, c, re, C64};
use crate::qspecial::{self, DeformParams, Sign};
use crate::report::{Case, Report};
use crate::soshift;
use crate::verify::{self, PappaInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    Sl2Bose,
    Sl2Fermi,
    SlN,
    SoNOrbital,
    QSpecial,
    KzScalar,
    KzOperator,
    Braid,
}

impl SuiteId {
    pub const ALL: [SuiteId; 8] = [
        SuiteId::Sl2Bose,
        SuiteId::Sl2Fermi,
        SuiteId::SlN,
        SuiteId::SoNOrbital,
        SuiteId::QSpecial,
        SuiteId::KzScalar,
        SuiteId::KzOperator,
        SuiteId::Braid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Sl2Bose => "sl2-bose",
            SuiteId::Sl2Fermi => "sl2-fermi",
            SuiteId::SlN => "slN",
            SuiteId::SoNOrbital => "soN-orbital",
            SuiteId::QSpecial => "qspecial",
            SuiteId::KzScalar => "kz-scalar",
            SuiteId::KzOperator => "kz-operator",
            SuiteId::Braid => "braid",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL.iter().copied().find(|id| id.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = SuiteId::ALL.iter().map(|id| id.as_str()).collect();
            Error::Config(format!("unknown suite {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// Every setting optional: the shape of both the JSON config file and the
/// command-line flags. Flags are merged over the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub suite: Option<String>,
    pub q: Option<Vec<f64>>,
    pub cutoff: Option<usize>,
    pub modes: Option<usize>,
    pub sign: Option<String>,
    pub eps: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub n: Option<Vec<f64>>,
    /// Complex literals such as `"0.05"`, `"0.1i"`, `"0.02+0.1i"`.
    pub hbar2: Option<Vec<String>>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))
    }

    /// `self` with every field set in `over` replaced.
    pub fn merged(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            suite: over.suite.or(self.suite),
            q: over.q.or(self.q),
            cutoff: over.cutoff.or(self.cutoff),
            modes: over.modes.or(self.modes),
            sign: over.sign.or(self.sign),
            eps: over.eps.or(self.eps),
            tol: over.tol.or(self.tol),
            jobs: over.jobs.or(self.jobs),
            out: over.out.or(self.out),
            n: over.n.or(self.n),
            hbar2: over.hbar2.or(self.hbar2),
        }
    }
}

/// Fully resolved, validated suite configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: SuiteId,
    pub q: Vec<f64>,
    pub cutoff: usize,
    pub modes: Vec<usize>,
    pub signs: Vec<Sign>,
    pub eps: Vec<f64>,
    /// Replaces the default tolerance of every residual row (structural rows
    /// such as uniqueness counts and negative controls keep theirs).
    pub tol: Option<f64>,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub n: Vec<f64>,
    pub hbar2: Vec<C64>,
}

impl SuiteConfig {
    pub fn defaults(suite: SuiteId) -> Self {
        let base = SuiteConfig {
            suite,
            q: vec![0.7, 1.3],
            cutoff: 8,
            modes: vec![2],
            signs: vec![Sign::Plus],
            eps: vec![],
            tol: None,
            jobs: 1,
            out: None,
            n: vec![],
            hbar2: vec![],
        };
        match suite {
            SuiteId::Sl2Bose => base,
            SuiteId::Sl2Fermi => SuiteConfig { cutoff: 2, signs: vec![Sign::Minus], ..base },
            SuiteId::SlN => SuiteConfig { q: vec![1.3], cutoff: 5, modes: vec![3], ..base },
            SuiteId::SoNOrbital => SuiteConfig { cutoff: 6, modes: vec![3, 4], ..base },
            SuiteId::QSpecial => SuiteConfig { q: vec![0.5, 0.9, 1.1, 2.0], ..base },
            SuiteId::KzScalar => SuiteConfig {
                q: vec![],
                signs: vec![Sign::Plus, Sign::Minus],
                eps: vec![kz::DEFAULT_SCALAR_EPS],
                n: vec![2.0, 3.0, 5.0],
                hbar2: vec![re(0.05), c(0.0, 0.1)],
                ..base
            },
            SuiteId::KzOperator => SuiteConfig {
                q: vec![0.1f64.exp()],
                cutoff: 5,
                eps: vec![kz::DEFAULT_OPERATOR_EPS],
                ..base
            },
            SuiteId::Braid => base,
        }
    }

    /// Defaults for `suite`, overridden by the merged file/flag settings.
    pub fn resolve(suite: SuiteId, partial: PartialConfig) -> Result<Self> {
        if let Some(s) = &partial.suite {
            let named: SuiteId = s.parse()?;
            if named != suite {
                return Err(Error::Config(format!("config names suite {named} but {suite} was requested")));
            }
        }
        let mut cfg = SuiteConfig::defaults(suite);
        if let Some(q) = partial.q {
            cfg.q = q;
        }
        if let Some(k) = partial.cutoff {
            cfg.cutoff = k;
        }
        if let Some(m) = partial.modes {
            cfg.modes = vec![m];
        }
        if let Some(s) = partial.sign {
            if !matches!(suite, SuiteId::KzScalar | SuiteId::KzOperator) {
                return Err(Error::Config(format!("--sign applies to the kz suites only, not {suite}")));
            }
            cfg.signs = vec![s.parse().map_err(|e: Error| Error::Config(e.to_string()))?];
        }
        if let Some(e) = partial.eps {
            cfg.eps = e;
        }
        cfg.tol = partial.tol.or(cfg.tol);
        if let Some(j) = partial.jobs {
            cfg.jobs = j;
        }
        cfg.out = partial.out.or(cfg.out);
        if let Some(n) = partial.n {
            cfg.n = n;
        }
        if let Some(h) = partial.hbar2 {
            cfg.hbar2 = h.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.jobs == 0 {
            return bad("--jobs must be at least 1".into());
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("--tol must be a finite non-negative number, got {t}"));
            }
        }
        let needs_q = !matches!(self.suite, SuiteId::KzScalar);
        if needs_q && self.q.is_empty() {
            return bad(format!("suite {} needs at least one --q", self.suite));
        }
        if let Some(q) = self.q.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
            return bad(format!("q must be positive and finite, got {q}"));
        }
        let modes_in = |lo: usize, hi: usize| self.modes.iter().all(|m| (lo..=hi).contains(m));
        let cutoff_in = |lo: usize, hi: usize| (lo..=hi).contains(&self.cutoff);
        match self.suite {
            SuiteId::Sl2Bose | SuiteId::Sl2Fermi => {
                if self.modes != [2] {
                    return bad("sl(2) suites have exactly 2 modes".into());
                }
                if self.suite == SuiteId::Sl2Bose && !cutoff_in(3, 30) {
                    return bad(format!("sl2-bose needs 3 <= cutoff <= 30, got {}", self.cutoff));
                }
            }
            SuiteId::SlN => {
                if !modes_in(2, 4) || !cutoff_in(2, 10) {
                    return bad("slN needs 2 <= modes <= 4 and 2 <= cutoff <= 10".into());
                }
            }
            SuiteId::SoNOrbital => {
                if !modes_in(3, 5) || !cutoff_in(4, 10) {
                    return bad("soN-orbital needs 3 <= modes <= 5 and 4 <= cutoff <= 10".into());
                }
            }
            SuiteId::KzOperator => {
                if !modes_in(2, 3) || !cutoff_in(2, 6) {
                    return bad("kz-operator needs modes in {2, 3} and 2 <= cutoff <= 6".into());
                }
                if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && *e <= 1e-3)) {
                    return bad("kz-operator eps must lie in (0, 1e-3]".into());
                }
                if self.q.iter().any(|q| q.ln().abs() > 0.5) {
                    return bad("kz-operator needs |ln q| <= 0.5".into());
                }
            }
            SuiteId::KzScalar => {
                if self.n.is_empty() || self.hbar2.is_empty() || self.eps.is_empty() {
                    return bad("kz-scalar needs at least one --n, --hbar2 and --eps".into());
                }
                if let Some(n) = self.n.iter().find(|n| !(**n >= 1.0 && n.is_finite())) {
                    return bad(format!("n must be >= 1, got {n}"));
                }
                if let Some(h) = self.hbar2.iter().find(|h| !(h.norm() <= 0.2)) {
                    return bad(format!("|hbar2| must be <= 0.2, got {h}"));
                }
                if let Some(e) = self.eps.iter().find(|e| !(1e-8..=1e-6).contains(*e)) {
                    return bad(format!("kz-scalar eps must lie in [1e-8, 1e-6], got {e}"));
                }
            }
            SuiteId::QSpecial | SuiteId::Braid => {}
        }
        Ok(())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn params_json(&self) -> Vec<(&'static str, Value)> {
        // `jobs` is deliberately absent: reports must not depend on it.
        let mut out: Vec<(&'static str, Value)> = Vec::new();
        if !self.q.is_empty() {
            out.push(("q", json!(self.q)));
        }
        if let Some(t) = self.tol {
            out.push(("tol", json!(t)));
        }
        match self.suite {
            SuiteId::Sl2Bose | SuiteId::SlN | SuiteId::SoNOrbital | SuiteId::KzOperator => {
                out.push(("cutoff", json!(self.cutoff)));
                out.push(("modes", json!(self.modes)));
            }
            SuiteId::Sl2Fermi => out.push(("modes", json!(self.modes))),
            _ => {}
        }
        if matches!(self.suite, SuiteId::KzScalar | SuiteId::KzOperator) {
            out.push(("eps", json!(self.eps)));
            out.push(("sign", json!(self.signs.iter().map(|s| s.symbol()).collect::<Vec<_>>())));
        }
        if self.suite == SuiteId::KzScalar {
            out.push(("n", json!(self.n)));
            out.push(("hbar2", json!(self.hbar2.iter().map(|h| complex_label(*h)).collect::<Vec<_>>())));
        }
        out
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim().replace('j', "i");
    let bad = || Error::Config(format!("cannot parse complex number {s:?}"));
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not an exponent sign or the leading one
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re_v = re_part.parse::<f64>().map_err(|_| bad())?;
        Ok(c(re_v, im))
    } else {
        t.parse::<f64>().map(re).map_err(|_| bad())
    }
}

fn complex_label(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

type Task<'a> = Box<dyn Fn() -> Vec<Case> + Send + Sync + 'a>;

/// Runs `f`, turning an error into a single failed row named `name`.
fn guarded(name: &str, tol: f64, f: impl FnOnce() -> Result<Vec<Case>>) -> Vec<Case> {
    f().unwrap_or_else(|e| vec![Case::failed(name, tol, &e)])
}

/// Row for a deliberately failing configuration: passes when `observed`
/// exceeds `threshold`; the residual is the shortfall.
pub fn negative_control(name: impl Into<String>, observed: f64, threshold: f64) -> Case {
    Case::new(name, (threshold - observed).max(0.0), 0.0)
        .with("observed", observed)
        .with("threshold", threshold)
        .with("kind", "negative control")
}

fn qlabel(q: f64) -> String {
    format!("q={q}")
}

/// Executes the suite and returns its (sorted) report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let tasks: Vec<Task<'_>> = match cfg.suite {
        SuiteId::Sl2Bose => sl2_bose_tasks(cfg),
        SuiteId::Sl2Fermi => sl2_fermi_tasks(cfg),
        SuiteId::SlN => sln_tasks(cfg),
        SuiteId::SoNOrbital => son_tasks(cfg),
        SuiteId::QSpecial => qspecial_tasks(cfg),
        SuiteId::KzScalar => kz_scalar_tasks(cfg),
        SuiteId::KzOperator => kz_operator_tasks(cfg),
        SuiteId::Braid => braid_tasks(cfg),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let rows: Vec<Vec<Case>> = pool.install(|| tasks.par_iter().map(|t| t()).collect());
    let mut report = Report::new(cfg.suite.as_str());
    for (k, v) in cfg.params_json() {
        report = report.param(k, v);
    }
    report.extend(rows.into_iter().flatten());
    Ok(report.finalize())
}

// ---------------------------------------------------------------------------
// sl(2) / sl(N)

fn sl2_bose_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    cfg.q
        .iter()
        .map(|&q| -> Task<'_> {
            Box::new(move || {
                let p = format!("sl2-bose.{}", qlabel(q));
                guarded(&p, cfg.tol(1e-10), || {
                    let space = FockSpace::new(2, Statistics::Bose, cfg.cutoff)?;
                    let params = DeformParams::from_q(q, Sign::Plus)?;
                    let gens = deform::sl2_bose_map(&space, params)?;
                    let rel = braid::build_relations(Family::SlN, 2, q, Statistics::Bose)?;
                    let res = verify::dcr_residuals(&gens, &rel)?;
                    let mut out = verify::dcr_cases(&p, &res, cfg.tol(1e-10));
                    out.extend(verify::ncr_cases(&p, &gens, cfg.tol(1e-10), cfg.tol(1e-12)));
                    out.push(Case::new(format!("{p}.hermiticity"), deform::hermiticity_check(&gens)?, cfg.tol(1e-12)));
                    out.push(Case::new(format!("{p}.vacuum"), deform::vacuum_residual(&gens), cfg.tol(1e-14)));
                    out.extend(verify::invariant_commutant_cases(&p, &gens, &LieData::sl(2)?, &[], cfg.tol(1e-11)));
                    out.push(
                        Case::new(
                            format!("{p}.removable_singularity"),
                            deform::removable_singularity_difference(&space, params, Ordering::Above)?,
                            0.0,
                        )
                        .with("kind", "convention insensitivity"),
                    );
                    // prior-work reconciliation through α
                    let alpha = deform::oleg_alpha_sl2(&space, params)?;
                    let (conj, info) = deform::inner_automorphism(&gens, &alpha)?;
                    let prior = deform::prior_work_generators(&space, params)?;
                    let entrywise = conj
                        .a
                        .iter()
                        .zip(&prior.a)
                        .chain(conj.aplus.iter().zip(&prior.aplus))
                        .map(|(x, y)| linalg::max_abs(&(x.matrix() - y.matrix())))
                        .fold(0.0, f64::max);
                    out.push(
                        Case::new(format!("{p}.prior_work"), entrywise, cfg.tol(1e-12))
                            .with("alpha_condition_number", info.condition_number)
                            .with("alpha_deviation", info.deviation),
                    );
                    // the prior-work realization is not *-compatible (u = 1)
                    out.push(negative_control(
                        format!("{p}.prior_work.hermiticity"),
                        deform::hermiticity_check(&prior)?,
                        1e-3,
                    ));
                    // q^n-conjugation preserves the relations
                    let qn = space.diag_fn(|t| re(q.powi(t.iter().sum::<u32>() as i32)))?;
                    let (moved, minfo) = deform::inner_automorphism(&gens, &qn)?;
                    let moved_res = verify::dcr_residuals(&moved, &rel)?;
                    let shift = (moved_res.worst_accepted() - res.worst_accepted()).abs();
                    let allowance = 10.0 * f64::EPSILON * minfo.condition_number.max(1.0) * 100.0;
                    out.push(
                        Case::new(format!("{p}.inner_automorphism"), shift, allowance)
                            .with("condition_number", minfo.condition_number),
                    );
                    Ok(out)
                })
            })
        })
        .collect()
}

fn sl2_fermi_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    cfg.q
        .iter()
        .map(|&q| -> Task<'_> {
            Box::new(move || {
                let p = format!("sl2-fermi.{}", qlabel(q));
                guarded(&p, cfg.tol(1e-12), || {
                    let space = FockSpace::new(2, Statistics::Fermi, 2)?;
                    let params = DeformParams::from_q(q, Sign::Minus)?;
                    let gens = deform::sl2_fermi_map(&space, params)?;
                    let rel = braid::build_relations(Family::SlN, 2, q, Statistics::Fermi)?;
                    let res = verify::dcr_residuals(&gens, &rel)?;
                    let mut out = verify::dcr_cases(&p, &res, cfg.tol(1e-12));
                    out.extend(verify::ncr_cases(&p, &gens, cfg.tol(1e-12), cfg.tol(1e-12)));
                    out.push(Case::new(format!("{p}.hermiticity"), deform::hermiticity_check(&gens)?, cfg.tol(1e-12)));
                    out.push(Case::new(format!("{p}.vacuum"), deform::vacuum_residual(&gens), cfg.tol(1e-14)));
                    let nil = gens.aplus.iter().map(|x| linalg::max_abs(&(x.matrix() * x.matrix()))).fold(0.0, f64::max);
                    out.push(Case::new(format!("{p}.nilpotency"), nil, cfg.tol(1e-14)));
                    out.extend(verify::invariant_commutant_cases(&p, &gens, &LieData::sl(2)?, &[], cfg.tol(1e-11)));
                    Ok(out)
                })
            })
        })
        .collect()
}

fn sln_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for &n in &cfg.modes {
        for &q in &cfg.q {
            tasks.push(Box::new(move || {
                let p = format!("slN.N={n}.{}", qlabel(q));
                guarded(&p, cfg.tol(1e-10), || {
                    let space = FockSpace::new(n, Statistics::Bose, cfg.cutoff)?;
                    let params = DeformParams::from_q(q, Sign::Plus)?;
                    let rel = braid::build_relations(Family::SlN, n, q, Statistics::Bose)?;
                    let mut scored = Vec::new();
                    for ordering in [Ordering::Above, Ordering::Below] {
                        let gens = deform::slN_candidate_map(&space, params, ordering)?;
                        let res = verify::dcr_residuals(&gens, &rel)?;
                        scored.push((ordering, gens, res));
                    }
                    let tol = cfg.tol(1e-10);
                    let passing: Vec<Ordering> =
                        scored.iter().filter(|(_, _, r)| r.worst_accepted() <= tol).map(|(o, _, _)| *o).collect();
                    scored.sort_by(|a, b| a.2.worst_accepted().total_cmp(&b.2.worst_accepted()));
                    let (best_order, best_gens, best_res) = &scored[0];
                    let (worst_order, _, worst_res) = &scored[1];
                    let mut out: Vec<Case> = verify::dcr_cases(&format!("{p}.{best_order}"), best_res, tol)
                        .into_iter()
                        .map(|c| c.with("ordering", best_order.to_string()))
                        .collect();
                    out.push(
                        Case::new(format!("{p}.ordering_uniqueness"), (passing.len() as f64 - 1.0).abs(), 0.0)
                            .with("passing", passing.iter().map(|o| o.to_string()).collect::<Vec<_>>()),
                    );
                    out.push(
                        negative_control(format!("{p}.{worst_order}.dcr"), worst_res.worst_accepted(), 1e-2)
                            .with("ordering", worst_order.to_string()),
                    );
                    out.extend(verify::ncr_cases(&format!("{p}.{best_order}"), best_gens, tol, cfg.tol(1e-12)));
                    out.push(Case::new(
                        format!("{p}.{best_order}.hermiticity"),
                        deform::hermiticity_check(best_gens)?,
                        cfg.tol(1e-12),
                    ));
                    let data = LieData::sl(n)?;
                    out.extend(verify::invariant_commutant_cases(&p, best_gens, &data, &[], cfg.tol(1e-11)));
                    let s2 = verify::safe(&space, 2)?;
                    let cas = liealg::casimir_sigma(&space, &data)?;
                    let closed = liealg::casimir_closed_form(&space, &data)?;
                    out.push(Case::new(
                        format!("{p}.casimir"),
                        (&cas - &closed).project(&s2).norm(),
                        cfg.tol(1e-12),
                    ));
                    Ok(out)
                })
            }));
        }
    }
    tasks
}

// ---------------------------------------------------------------------------
// so(N)

fn son_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    cfg.modes
        .iter()
        .map(|&n| -> Task<'_> {
            Box::new(move || {
                let p = format!("soN-orbital.N={n}");
                guarded(&p, cfg.tol(1e-10), || {
                    let space = FockSpace::new(n, Statistics::Bose, cfg.cutoff)?;
                    let orb = soshift::build_orbital(&space)?;
                    let grid: Vec<Value> =
                        orb.spectral_grid.iter().map(|g| json!([g.n, g.l, g.multiplicity])).collect();
                    let inv = orb.invariant_residuals()?;
                    let mut out = vec![
                        Case::new(format!("{p}.l2_aa"), inv[0], cfg.tol(1e-12)),
                        Case::new(format!("{p}.l2_apap"), inv[1], cfg.tol(1e-12)),
                        Case::new(format!("{p}.l_n"), inv[2], cfg.tol(1e-12)),
                        Case::new(format!("{p}.l_squared"), inv[3], cfg.tol(1e-10)).with("grid", grid),
                        Case::new(format!("{p}.l2_commutators"), orb.commutator_formula_residual()?, cfg.tol(1e-11)),
                    ];
                    for sign in [Sign::Plus, Sign::Minus] {
                        let ops = soshift::shift_operators(&orb, sign)?;
                        let tag = if sign == Sign::Plus { "plus" } else { "minus" };
                        out.push(Case::new(format!("{p}.alpha_{tag}.orderings"), ops.ordering_residual, cfg.tol(1e-12)));
                        out.push(Case::new(
                            format!("{p}.alpha_{tag}.eige"),
                            soshift::eige_residual(&orb, &ops)?,
                            cfg.tol(1e-10),
                        ));
                    }
                    for &q in &cfg.q {
                        let r = soshift::verify_y_son(&orb, q)?;
                        for k in 0..4 {
                            out.push(
                                Case::new(format!("{p}.{}.functional_eq{}", qlabel(q), k + 1), r.residuals[k], cfg.tol(1e-10))
                                    .with("points", r.evaluated[k]),
                            );
                        }
                    }
                    // classical invariant relations at q = 1 with c = δ
                    let a = space.annihilators();
                    let ap = space.creators();
                    let delta = linalg::identity(n);
                    let input = PappaInput { space: &space, a: &a, aplus: &ap, lower: &delta, upper: &delta, q: 1.0 };
                    out.extend(verify::pappa_cases(&format!("{p}.classical"), &input, cfg.tol(1e-12)));
                    Ok(out)
                })
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// special functions

fn qspecial_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = cfg
        .q
        .iter()
        .map(|&q| -> Task<'_> {
            Box::new(move || {
                let p = format!("qspecial.{}", qlabel(q));
                guarded(&p, cfg.tol(1e-12), || {
                    let mut args: Vec<C64> = (1..=20).map(|k| re(k as f64)).collect();
                    if q < 1.0 {
                        args.extend([re(0.5), re(2.5), c(1.3, 0.4), c(3.7, -1.2), re(7.25)]);
                    }
                    let mut rec: f64 = 0.0;
                    let mut rec_tilde: f64 = 0.0;
                    for &a in &args {
                        let g0 = qspecial::qgamma(a, q)?;
                        let g1 = qspecial::qgamma(a + 1.0, q)?;
                        let want = qspecial::qnum_c(a, re(q)) * g0;
                        rec = rec.max((g1 - want).norm() / want.norm());
                        if a.im == 0.0 && a.re.fract() == 0.0 || q * q < 1.0 {
                            let t0 = qspecial::qgamma_tilde(a, q)?;
                            let t1 = qspecial::qgamma_tilde(a + 1.0, q)?;
                            let want = qspecial::qbracket_c(a, re(q)) * t0;
                            rec_tilde = rec_tilde.max((t1 - want).norm() / want.norm());
                        }
                    }
                    let mut y: f64 = 0.0;
                    for n in 0..20u32 {
                        let r = qspecial::y_sln(n + 1, q) / qspecial::y_sln(n, q);
                        let want = (n + 1) as f64 / qspecial::qnum((n + 1) as f64, q * q);
                        y = y.max((r - want).abs() / want);
                    }
                    Ok(vec![
                        Case::new(format!("{p}.gamma_q_recurrence"), rec, cfg.tol(1e-12)).with("arguments", args.len()),
                        Case::new(format!("{p}.gamma_q_tilde_recurrence"), rec_tilde, cfg.tol(1e-12)),
                        Case::new(format!("{p}.y_sln_recurrence"), y, cfg.tol(1e-12)),
                    ])
                })
            })
        })
        .collect();
    tasks.push(Box::new(move || {
        guarded("qspecial.classical", cfg.tol(1e-12), || {
            let mut refl: f64 = 0.0;
            for k in 0..20 {
                let a = c(0.05 + 0.17 * k as f64, 0.3 * ((k % 5) as f64 - 2.0));
                refl = refl.max(qspecial::reflection_residual(a)?);
            }
            let beta11 = (qspecial::beta(re(1.0), re(1.0))? - 1.0).norm();
            let gamma5 = (qspecial::gamma(re(5.0))? - 24.0).norm();
            let conn_params = [
                (re(0.1), re(-0.1), re(1.3)),
                (c(0.0, 0.1), c(0.0, -0.1), c(1.0, 0.2)),
                (re(0.05), re(-0.05), re(1.15)),
            ];
            let mut conn: f64 = 0.0;
            let mut ode: f64 = 0.0;
            for &(a, b, cc) in &conn_params {
                conn = conn.max(qspecial::connection_residual(a, b, cc, re(0.5))?);
                for z in [-0.6, -0.2, 0.1, 0.3, 0.5, 0.65] {
                    ode = ode.max(qspecial::hyper_ode_residual(a, b, cc, re(z))?);
                }
            }
            let f112 = qspecial::gauss_2f1(re(1.0), re(1.0), re(2.0), re(0.5))?;
            let log_form = (2f64.ln() / 0.5 - f112.re).abs().max(f112.im.abs());
            Ok(vec![
                Case::new("qspecial.reflection", refl, cfg.tol(1e-12)).with("points", 20),
                Case::new("qspecial.beta_1_1", beta11, cfg.tol(1e-14)),
                Case::new("qspecial.gamma_5", gamma5, cfg.tol(1e-12)),
                Case::new("qspecial.hyp2f1.connection", conn, cfg.tol(1e-10)),
                Case::new("qspecial.hyp2f1.ode", ode, cfg.tol(1e-9)),
                Case::new("qspecial.hyp2f1.log_form", log_form, cfg.tol(1e-13)),
            ])
        })
    }));
    tasks
}

// ---------------------------------------------------------------------------
// KZ

fn kz_scalar_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for &n in &cfg.n {
        for &k in &cfg.hbar2 {
            for &sign in &cfg.signs {
                for &eps in &cfg.eps {
                    tasks.push(Box::new(move || {
                        let mut p = format!("kz-scalar.n={n}.hbar2={}.sign={}", complex_label(k), sign.symbol());
                        if cfg.eps.len() > 1 {
                            p.push_str(&format!(".eps={eps:e}"));
                        }
                        guarded(&p, cfg.tol(1e-8), || kz_scalar_case(&p, cfg, n, k, sign, eps))
                    }));
                }
            }
        }
    }
    tasks
}

fn kz_scalar_case(p: &str, cfg: &SuiteConfig, n: f64, k: C64, sign: Sign, eps: f64) -> Result<Vec<Case>> {
    let params = KzScalarParams::new(n, k, sign)?.with_eps(eps)?;
    let a = kz::analyze_scalar(&params)?;
    let printed_l1 = kz::printed_l1(&params);
    let mut out = vec![
        Case::new(format!("{p}.closed_form_vs_trajectory"), a.closed_form_deviation, cfg.tol(1e-8))
            .with("samples", a.samples)
            .with("steps", a.steps),
        Case::new(format!("{p}.combination_identity"), a.combination, cfg.tol(1e-8)),
        Case::new(format!("{p}.closed_form_ode"), a.closed_form_ode, cfg.tol(1e-9)),
        Case::new(format!("{p}.riccati"), a.riccati, cfg.tol(1e-8)),
    ];
    for i in 0..3 {
        let want = a.expected[i];
        let tag = |z: C64| json!([z.re, z.im]);
        let mut closed = Case::new(format!("{p}.l{}.closed_form", i + 1), (a.limits.closed_form[i] - want).norm(), cfg.tol(1e-10))
            .with("value", tag(a.limits.closed_form[i]))
            .with("expected", tag(want));
        let mut traj = Case::new(format!("{p}.l{}.trajectory", i + 1), (a.limits.trajectory[i] - want).norm(), cfg.tol(1e-6))
            .with("value", tag(a.limits.trajectory[i]))
            .with("expected", tag(want));
        if i == 0 {
            closed = closed.with("printed_value", tag(printed_l1)).with("ratio_to_printed", tag(want / printed_l1));
            traj = traj.with("printed_value", tag(printed_l1));
        }
        out.push(closed);
        out.push(traj);
    }
    let routes = (0..3).map(|i| (a.limits.closed_form[i] - a.limits.trajectory[i]).norm()).fold(0.0, f64::max);
    out.push(Case::new(format!("{p}.limits.route_agreement"), routes, cfg.tol(1e-6)));
    Ok(out)
}

fn kz_operator_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for &n in &cfg.modes {
        for &q in &cfg.q {
            for &eps in &cfg.eps {
                for &sign in &cfg.signs {
                    tasks.push(Box::new(move || {
                        let mut p = format!("kz-operator.N={n}.{}", qlabel(q));
                        if cfg.eps.len() > 1 {
                            p.push_str(&format!(".eps={eps:e}"));
                        }
                        if cfg.signs.len() > 1 {
                            p.push_str(&format!(".sign={}", sign.symbol()));
                        }
                        guarded(&p, cfg.tol(1e-6), || kz_operator_case(&p, cfg, n, q, eps, sign))
                    }));
                }
            }
        }
    }
    tasks
}

fn kz_operator_case(p: &str, cfg: &SuiteConfig, n: usize, q: f64, eps: f64, sign: Sign) -> Result<Vec<Case>> {
    let space = FockSpace::new(n, Statistics::Bose, cfg.cutoff)?;
    let h = q.ln();
    let sys = KzOperatorSystem::from_h(&space, h)?;
    let coas = kz::coassociator_matrix(&sys, eps)?;
    let m = coas.m.matrix();
    let tol = cfg.tol(1e-6);
    let dev = kz::deviation_from_identity(m);
    let mut out = vec![
        Case::new(format!("{p}.m.eps_halving"), coas.error_estimate, tol).with("eps", coas.eps),
        Case::new(format!("{p}.m.trivial_action"), kz::trivial_action_residual(&sys, m), tol),
        Case::new(format!("{p}.m.invariance"), kz::invariance_residual(&sys, m)?, tol),
        Case::new(format!("{p}.m.permutation"), sys.permutation_residual(), cfg.tol(1e-14)),
    ];
    if h != 0.0 {
        let half = KzOperatorSystem::from_h(&space, h / 2.0)?;
        let m_half = kz::coassociator_matrix(&half, eps)?;
        let ratio = dev / kz::deviation_from_identity(m_half.m.matrix());
        let outside = if ratio < 3.2 { 3.2 - ratio } else if ratio > 4.8 { ratio - 4.8 } else { 0.0 };
        out.push(
            Case::new(format!("{p}.m.h_scaling"), outside, 0.0)
                .with("ratio", ratio)
                .with("norm_m_minus_1", dev)
                .with("interval", json!([3.2, 4.8])),
        );
    }
    for dressing in [Dressing::Unit, Dressing::Symmetric] {
        let tag = match dressing {
            Dressing::Unit => "unit",
            Dressing::Symmetric => "symmetric",
        };
        let r = kz::figata_check(&sys, m, sign, dressing)?;
        for (k, v) in [r.figata1, r.figata2, r.figata3].iter().enumerate() {
            out.push(Case::new(format!("{p}.figata{}.{tag}", k + 1), *v, tol));
        }
    }
    let wrong = kz::figata_check(&sys, m, sign.flip(), Dressing::Unit)?;
    out.push(negative_control(
        format!("{p}.figata.wrong_sign"),
        wrong.figata1.max(wrong.figata2).max(wrong.figata3),
        0.1,
    ));
    let trivial = KzOperatorSystem::from_h(&space, 0.0)?;
    let m1 = kz::coassociator_matrix(&trivial, eps)?;
    let r1 = kz::figata_check(&trivial, m1.m.matrix(), sign, Dressing::Unit)?;
    out.push(Case::new(
        format!("{p}.figata.q1_control"),
        r1.figata1.max(r1.figata2).max(r1.figata3).max(kz::deviation_from_identity(m1.m.matrix())),
        cfg.tol(1e-12),
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// braid matrices

fn braid_tasks(cfg: &SuiteConfig) -> Vec<Task<'_>> {
    let cases = [(Family::SlN, 2usize), (Family::SlN, 3), (Family::SoN, 3), (Family::SoN, 4)];
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for (family, n) in cases {
        let fam = if family == Family::SlN { "sl" } else { "so" };
        for &q in &cfg.q {
            tasks.push(Box::new(move || {
                let p = format!("braid.{fam}{n}.{}", qlabel(q));
                guarded(&p, cfg.tol(1e-12), || {
                    let r = braid::rhat(family, n, q)?;
                    let rel = braid::build_relations(family, n, q, Statistics::Bose)?;
                    let (complete, orth) = rel.projector_residuals();
                    let mut out = vec![
                        Case::new(format!("{p}.yang_baxter"), braid::yang_baxter_residual(&r, n), cfg.tol(1e-12)),
                        Case::new(format!("{p}.characteristic"), braid::characteristic_residual(family, n, q)?, cfg.tol(1e-12)),
                        Case::new(format!("{p}.projectors.completeness"), complete, cfg.tol(1e-12))
                            .with("ranks", rel.projector_ranks()),
                        Case::new(format!("{p}.projectors.orthogonality"), orth, cfg.tol(1e-12)),
                    ];
                    if family == Family::SoN {
                        out.push(Case::new(
                            format!("{p}.metric_twist"),
                            braid::metric_twist_residual(n, q)?,
                            cfg.tol(1e-12),
                        ));
                    }
                    Ok(out)
                })
            }));
        }
        tasks.push(Box::new(move || {
            let p = format!("braid.{fam}{n}.classical_limit");
            guarded(&p, 1e-6, || {
                let r = braid::rhat(family, n, 1.0 + 1e-8)?;
                let dist = linalg::max_abs(&(r - linalg::flip(n)));
                Ok(vec![Case::new(p.clone(), dist, 1e-6).with("q", 1.0 + 1e-8)])
            })
        }));
    }
    tasks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.as_str().parse::<SuiteId>().unwrap(), id);
        }
        assert!("sl4".parse::<SuiteId>().is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.1i").unwrap(), c(0.0, 0.1));
        assert_eq!(parse_complex("0.05").unwrap(), re(0.05));
        assert_eq!(parse_complex("0.02-0.1i").unwrap(), c(0.02, -0.1));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-2+3e-2j").unwrap(), c(0.01, 0.03));
        assert!(parse_complex("abc").is_err());
        assert_eq!(complex_label(c(0.0, 0.1)), "0.1i");
    }

    #[test]
    fn flags_override_file() {
        let file = PartialConfig { q: Some(vec![0.7]), cutoff: Some(6), ..Default::default() };
        let flags = PartialConfig { q: Some(vec![1.3]), ..Default::default() };
        let cfg = SuiteConfig::resolve(SuiteId::Sl2Bose, file.merged(flags)).unwrap();
        assert_eq!(cfg.q, vec![1.3]);
        assert_eq!(cfg.cutoff, 6);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = |p: PartialConfig, id| SuiteConfig::resolve(id, p).is_err();
        assert!(bad(PartialConfig { q: Some(vec![-1.0]), ..Default::default() }, SuiteId::Sl2Bose));
        assert!(bad(PartialConfig { cutoff: Some(2), ..Default::default() }, SuiteId::Sl2Bose));
        assert!(bad(PartialConfig { sign: Some("+".into()), ..Default::default() }, SuiteId::Braid));
        assert!(bad(PartialConfig { jobs: Some(0), ..Default::default() }, SuiteId::Braid));
        assert!(bad(PartialConfig { hbar2: Some(vec!["0.5".into()]), ..Default::default() }, SuiteId::KzScalar));
        assert!(bad(PartialConfig { suite: Some("braid".into()), ..Default::default() }, SuiteId::QSpecial));
    }

    #[test]
    fn fermi_suite_passes() {
        let cfg = SuiteConfig::defaults(SuiteId::Sl2Fermi);
        let r = run_suite(&cfg).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
        assert!(r.case("sl2-fermi.q=1.3.dcr.cross").is_some());
    }

    #[test]
    fn negative_control_semantics() {
        assert!(negative_control("x", 0.5, 0.1).pass);
        assert!(!negative_control("x", 0.05, 0.1).pass);
    }
}
