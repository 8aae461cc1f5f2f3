//! so(N) orbital machinery in Cartesian coordinates (`c_ij = δ_ij`):
//! `l² = (n + N/2 − 1)² − (a⁺·a⁺)(a·a)`, its spectral square root `l`, the
//! shift operators `α^i_±`, `α⁺_{i,±}` and the four functional equations
//! whose solution is `y_{so(N)}`.

use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinOp, Statistics};
use crate::linalg::{self, re, CMat};
use crate::qspecial::{self, Sign};
use crate::verify;

/// Eigenvalues of `l²` in `[−CLAMP, 0)` are treated as zero.
pub const CLAMP: f64 = 1e-10;

/// One point `(n, l)` of the joint spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: u32,
    pub l: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct OrbitalData {
    pub space: FockSpace,
    pub l2: LinOp,
    pub l: LinOp,
    pub spectral_grid: Vec<GridPoint>,
    /// `a·a` and `a⁺·a⁺`.
    pub aa: LinOp,
    pub apap: LinOp,
}

fn block_indices(space: &FockSpace) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); space.cutoff() + 1];
    for k in 0..space.dim() {
        blocks[space.total(k) as usize].push(k);
    }
    blocks
}

/// Diagonalizes `l²` in each total-number block and takes the square root.
pub fn build_orbital(space: &FockSpace) -> Result<OrbitalData> {
    let big_n = space.modes();
    if space.statistics() != Statistics::Bose || big_n < 3 || space.cutoff() < 4 {
        return Err(Error::InvalidArgument(format!(
            "orbital data needs a bosonic space with N >= 3 and cutoff >= 4, got N = {big_n}, cutoff = {}",
            space.cutoff()
        )));
    }
    let a = space.annihilators();
    let ap = space.creators();
    let d = space.dim();
    let mut aa = CMat::zeros(d, d);
    let mut apap = CMat::zeros(d, d);
    for i in 0..big_n {
        aa += a[i].matrix() * a[i].matrix();
        apap += ap[i].matrix() * ap[i].matrix();
    }
    let shift = big_n as f64 / 2.0 - 1.0;
    let casimir = space.diag_fn(|occ| {
        let n: u32 = occ.iter().sum();
        re((n as f64 + shift).powi(2))
    })?;
    let l2 = casimir.matrix() - &apap * &aa;

    let mut l = CMat::zeros(d, d);
    let mut grid: Vec<GridPoint> = Vec::new();
    for (n, idx) in block_indices(space).iter().enumerate() {
        let sub = CMat::from_fn(idx.len(), idx.len(), |i, j| l2[(idx[i], idx[j])]);
        let (vals, vecs) = linalg::hermitian_eigen(&sub);
        let mut roots = Vec::with_capacity(vals.len());
        for &v in &vals {
            if v < -CLAMP {
                return Err(Error::Domain(format!("l² has eigenvalue {v:e} < 0 in the n = {n} block")));
            }
            roots.push(v.max(0.0).sqrt());
        }
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(roots.len(), roots.iter().map(|&r| re(r))));
        let lb = &vecs * diag * vecs.adjoint();
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                l[(gi, gj)] = lb[(i, j)];
            }
        }
        let mut sorted = roots;
        sorted.sort_by(f64::total_cmp);
        for r in sorted {
            match grid.last_mut() {
                Some(p) if p.n == n as u32 && (p.l - r).abs() < 1e-8 => p.multiplicity += 1,
                _ => grid.push(GridPoint { n: n as u32, l: r, multiplicity: 1 }),
            }
        }
    }
    // snap to the exact half-integers the diagonalization approximates
    for p in &mut grid {
        p.l = (p.l * 2.0).round() / 2.0;
    }
    Ok(OrbitalData {
        space: space.clone(),
        l2: LinOp::graded(l2, 0),
        l: LinOp::graded(l, 0),
        spectral_grid: grid,
        aa: LinOp::graded(aa, -2),
        apap: LinOp::graded(apap, 2),
    })
}

impl OrbitalData {
    pub fn modes(&self) -> usize {
        self.space.modes()
    }

    pub fn is_realized(&self, n: f64, l: f64) -> bool {
        self.spectral_grid.iter().any(|p| (p.n as f64 - n).abs() < 1e-9 && (p.l - l).abs() < 1e-9)
    }

    /// `n + N/2 + offset ± l` as an operator (a function of commuting `n`, `l`).
    fn affine(&self, offset: f64, sign: f64) -> CMat {
        let n = self.space.total_number();
        let id = linalg::identity(self.space.dim());
        n.matrix() + &id * re(self.modes() as f64 / 2.0 + offset) + self.l.matrix() * re(sign)
    }

    /// `‖[l², a·a]‖`, `‖[l², a⁺·a⁺]‖`, `‖[l, n]‖` and `‖l² − l·l‖` on the degree-2 safe subspace.
    pub fn invariant_residuals(&self) -> Result<[f64; 4]> {
        let s = verify::safe(&self.space, 2)?;
        let sp = s.matrix();
        let proj = |m: CMat| linalg::spectral_norm(&(sp * m * sp));
        let l2 = self.l2.matrix();
        let l = self.l.matrix();
        Ok([
            proj(linalg::commutator(l2, self.aa.matrix())),
            proj(linalg::commutator(l2, self.apap.matrix())),
            linalg::spectral_norm(&linalg::commutator(l, self.space.total_number().matrix())),
            linalg::spectral_norm(&(l * l - l2)),
        ])
    }

    /// Both printed forms of `[l², a^i]` and `[l², a⁺_i]`, max residual over `i`
    /// on the degree-2 safe subspace.
    pub fn commutator_formula_residual(&self) -> Result<f64> {
        let s = verify::safe(&self.space, 2)?;
        let sp = s.matrix();
        let big_n = self.modes() as f64;
        let n = self.space.total_number();
        let nm = n.matrix();
        let id = linalg::identity(self.space.dim());
        let l2 = self.l2.matrix();
        let aa = self.aa.matrix();
        let apap = self.apap.matrix();
        let a = self.space.annihilators();
        let ap = self.space.creators();
        let lin = |c: f64| nm * re(2.0) + &id * re(c);
        let mut worst: f64 = 0.0;
        for i in 0..self.modes() {
            let (ai, api) = (a[i].matrix(), ap[i].matrix());
            let lhs = linalg::commutator(l2, ai);
            let f1 = -(ai * lin(1.0 + big_n)) + aa * api * re(2.0);
            let f2 = -(ai * lin(big_n - 3.0)) + api * aa * re(2.0);
            let lhs_p = linalg::commutator(l2, api);
            let g1 = api * lin(3.0 + big_n) - ai * apap * re(2.0);
            let g2 = api * lin(big_n - 1.0) - apap * ai * re(2.0);
            for r in [&lhs - f1, &lhs - f2, &lhs_p - g1, &lhs_p - g2] {
                worst = worst.max(linalg::spectral_norm(&(sp * r * sp)));
            }
        }
        Ok(worst)
    }
}

/// `α^i_±` and `α⁺_{i,±}` for one choice of `±`.
#[derive(Debug, Clone)]
pub struct ShiftOperators {
    pub sign: Sign,
    pub alpha: Vec<LinOp>,
    pub alpha_plus: Vec<LinOp>,
    /// Largest disagreement between the two printed orderings (degree-2 safe subspace).
    pub ordering_residual: f64,
}

/// `α^i_± = a^i(n+N/2−1±l) − a⁺_i(a·a) = a^i(n+N/2+1±l) − (a·a)a⁺_i` and
/// `α⁺_{i,±} = a⁺_i(n+N/2−1±l) − (a⁺·a⁺)a^i = a⁺_i(n+N/2+1±l) − a^i(a⁺·a⁺)`.
pub fn shift_operators(orb: &OrbitalData, sign: Sign) -> Result<ShiftOperators> {
    let s = sign.value();
    let sp = verify::safe(&orb.space, 2)?;
    let sp = sp.matrix();
    let lo = orb.affine(-1.0, s);
    let hi = orb.affine(1.0, s);
    let aa = orb.aa.matrix();
    let apap = orb.apap.matrix();
    let a = orb.space.annihilators();
    let ap = orb.space.creators();
    let mut alpha = Vec::new();
    let mut alpha_plus = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..orb.modes() {
        let (ai, api) = (a[i].matrix(), ap[i].matrix());
        let m1 = ai * &lo - api * aa;
        let m2 = ai * &hi - aa * api;
        let p1 = api * &lo - apap * ai;
        let p2 = api * &hi - ai * apap;
        worst = worst.max(linalg::spectral_norm(&(sp * (&m1 - m2) * sp)));
        worst = worst.max(linalg::spectral_norm(&(sp * (&p1 - p2) * sp)));
        alpha.push(LinOp::graded(m1, -1));
        alpha_plus.push(LinOp::graded(p1, 1));
    }
    Ok(ShiftOperators { sign, alpha, alpha_plus, ordering_residual: worst })
}

/// Max of `‖l α⁺_{i,±} − α⁺_{i,±}(l±1)‖` and `‖l α^i_± − α^i_±(l∓1)‖` on the
/// degree-2 safe subspace.
pub fn eige_residual(orb: &OrbitalData, ops: &ShiftOperators) -> Result<f64> {
    let s = ops.sign.value();
    let sp = verify::safe(&orb.space, 2)?;
    let sp = sp.matrix();
    let l = orb.l.matrix();
    let id = linalg::identity(orb.space.dim());
    let up = l + &id * re(s);
    let down = l - &id * re(s);
    let mut worst: f64 = 0.0;
    for (al, alp) in ops.alpha.iter().zip(&ops.alpha_plus) {
        let (m, p) = (al.matrix(), alp.matrix());
        worst = worst.max(linalg::spectral_norm(&(sp * (l * p - p * &up) * sp)));
        worst = worst.max(linalg::spectral_norm(&(sp * (l * m - m * &down) * sp)));
    }
    Ok(worst)
}

/// Max residuals of the four functional equations and the number of grid
/// points at which each could be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalResiduals {
    pub residuals: [f64; 4],
    pub evaluated: [usize; 4],
}

impl FunctionalResiduals {
    pub fn max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Term `coeff · y(p)/y(r)` of a functional equation.
type Term = (f64, (f64, f64), (f64, f64));

/// The four equations at `(n, l)`, each as `[term₁, term₂]` with
/// `term₁ − q²·term₂ = 1 + q^{N−2}`; with `k = n + N/2`:
/// `(k+1∓l) y(n+1,l±1)/y(n+2,l) − q²(k−1∓l) y(n−1,l±1)/y(n,l)` and
/// `(k+1∓l) y(n,l)/y(n+1,l∓1) − q²(k−1∓l) y(n−2,l)/y(n−1,l∓1)`.
fn equations(n: f64, l: f64, big_n: usize) -> [[Term; 2]; 4] {
    let k = n + big_n as f64 / 2.0;
    [
        [(k + 1.0 - l, (n + 1.0, l + 1.0), (n + 2.0, l)), (k - 1.0 - l, (n - 1.0, l + 1.0), (n, l))],
        [(k + 1.0 + l, (n + 1.0, l - 1.0), (n + 2.0, l)), (k - 1.0 + l, (n - 1.0, l - 1.0), (n, l))],
        [(k + 1.0 - l, (n, l), (n + 1.0, l - 1.0)), (k - 1.0 - l, (n - 2.0, l), (n - 1.0, l - 1.0))],
        [(k + 1.0 + l, (n, l), (n + 1.0, l + 1.0)), (k - 1.0 + l, (n - 2.0, l), (n - 1.0, l + 1.0))],
    ]
}

/// Checks the functional equations pointwise on the realized `(n, l)` grid,
/// with `y` ratios from [`qspecial::y_son_ratio`].
pub fn verify_y_son(orb: &OrbitalData, q: f64) -> Result<FunctionalResiduals> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
    }
    if orb.space.cutoff() < 4 {
        return Err(Error::InvalidArgument("grid too small: cutoff must be >= 4".into()));
    }
    let big_n = orb.modes();
    let rhs = 1.0 + q.powi(big_n as i32 - 2);
    let mut out = FunctionalResiduals { residuals: [0.0; 4], evaluated: [0; 4] };
    for pt in &orb.spectral_grid {
        let (n, l) = (pt.n as f64, pt.l);
        for (e, terms) in equations(n, l, big_n).iter().enumerate() {
            let realized = terms.iter().all(|(_, p, r)| orb.is_realized(p.0, p.1) && orb.is_realized(r.0, r.1));
            if !realized {
                continue;
            }
            let mut lhs = 0.0;
            for (k, (coeff, p, r)) in terms.iter().enumerate() {
                let ratio = qspecial::y_son_ratio(r.0, r.1, p.0, p.1, big_n, q)?;
                lhs += if k == 0 { coeff * ratio } else { -q * q * coeff * ratio };
            }
            out.residuals[e] = out.residuals[e].max((lhs - rhs).abs());
            out.evaluated[e] += 1;
        }
    }
    Ok(out)
}
