//! The reduced Knizhnik–Zamolodchikov machinery: the scalar system for
//! `f₁, f₂, f₃` with its hypergeometric closed forms and limits at `x → 0⁺`,
//! and the operator-valued path-ordered integral giving the coassociator
//! matrix `M` on `C^N ⊗ C^N ⊗ Fock`.
//!
//! Both endpoints are regular singular points, so integration runs in the
//! log variables `t = ln x` on `[eps, ½]` and `s = −ln(1−x)` on `[½, 1−eps]`,
//! where the right-hand sides stay bounded.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, LinOp, Statistics};
use crate::liealg::{self, LieData};
use crate::linalg::{self, c, re, CMat, C64};
use crate::ode::{self, OdeOptions};
use crate::qspecial::{self, Sign};

// ---------------------------------------------------------------------------
// scalar system

/// `K = hbar2 = 2ħ`, `±` = `sign`, seed/termination distance `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KzScalarParams {
    pub n: f64,
    pub hbar2: C64,
    pub sign: Sign,
    pub eps: f64,
}

pub const DEFAULT_SCALAR_EPS: f64 = 1e-8;

impl KzScalarParams {
    pub fn new(n: f64, hbar2: C64, sign: Sign) -> Result<Self> {
        Self { n, hbar2, sign, eps: DEFAULT_SCALAR_EPS }.validated()
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self { eps, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.n >= 1.0 && self.n.is_finite()) {
            return Err(Error::InvalidArgument(format!("n must be >= 1, got {}", self.n)));
        }
        if !(self.hbar2.norm() <= 0.2) {
            return Err(Error::InvalidArgument(format!("|hbar2| must be <= 0.2, got {}", self.hbar2)));
        }
        if !(1e-8..=1e-3).contains(&self.eps) {
            return Err(Error::InvalidArgument(format!("eps must lie in [1e-8, 1e-3], got {}", self.eps)));
        }
        Ok(self)
    }

    fn s(&self) -> f64 {
        self.sign.value()
    }

    /// `q = e^h` with `h = iπ·hbar2`.
    pub fn q(&self) -> C64 {
        (c(0.0, PI) * self.hbar2).exp()
    }

    /// Exponent `±K(n−1)` of the prefactors.
    fn beta(&self) -> C64 {
        self.hbar2 * (self.s() * (self.n - 1.0))
    }
}

/// Right-hand side `f'(x)`.
pub fn scalar_rhs(p: &KzScalarParams, x: f64, f: &[C64; 3]) -> [C64; 3] {
    let (k, s, n) = (p.hbar2, p.s(), p.n);
    let om = 1.0 - x;
    [
        k * ((1.0 / om + (n - 1.0) / x) * s * f[0] - f[1] / x),
        k * (f[0] / om - ((n - 1.0) / om + 1.0 / x) * s * f[1]),
        k * (-f[0] * s / om + f[1] / x - (1.0 / om - 1.0 / x) * (n - 1.0) * s * f[2]),
    ]
}

/// `x·f'(x)` with `r = x/(1−x)`, used on the `t = ln x` segment.
fn rhs_log_x(p: &KzScalarParams, r: f64, f: &[C64], out: &mut [C64]) {
    let (k, s, n) = (p.hbar2, p.s(), p.n);
    out[0] = k * ((r + n - 1.0) * s * f[0] - f[1]);
    out[1] = k * (f[0] * r - ((n - 1.0) * r + 1.0) * s * f[1]);
    out[2] = k * (-f[0] * s * r + f[1] - (r - 1.0) * (n - 1.0) * s * f[2]);
}

/// `(1−x)·f'(x)` with `w = (1−x)/x`, used on the `s = −ln(1−x)` segment.
fn rhs_log_one_minus_x(p: &KzScalarParams, w: f64, f: &[C64], out: &mut [C64]) {
    let (k, s, n) = (p.hbar2, p.s(), p.n);
    out[0] = k * ((1.0 + (n - 1.0) * w) * s * f[0] - f[1] * w);
    out[1] = k * (f[0] - ((n - 1.0) + w) * s * f[1]);
    out[2] = k * (-f[0] * s + f[1] * w - (1.0 - w) * (n - 1.0) * s * f[2]);
}

/// `±[x(1−x)]^{±K(n−1)}`, the closed form of `f₁ ± f₂ + (n+1)f₃`.
pub fn combination_target(p: &KzScalarParams, x: f64) -> C64 {
    (p.beta() * (x * (1.0 - x)).ln()).exp() * p.s()
}

fn powc(x: f64, e: C64) -> C64 {
    (e * x.ln()).exp()
}

/// `F(a, b, c; 1−x)`, routed through the connection formula for small `x`.
fn hyp_one_minus(a: C64, b: C64, cc: C64, x: f64) -> Result<C64> {
    if x <= 0.5 {
        qspecial::gauss_2f1_at_one_minus(a, b, cc, re(x))
    } else {
        Ok(qspecial::gauss_2f1_series(a, b, cc, re(1.0 - x))?.0)
    }
}

/// Closed forms and their derivatives at `x ∈ (0, 1)`:
/// `f₂ = x^{∓K}(1−x)^{±K(n−1)} F(±K, ∓K, 1±Kn; 1−x)`,
/// `f₁ = −K⁻¹ F'(…; 1−x) x^{∓K}(1−x)^{1±K(n−1)}`, `f₃` from the combination identity.
pub fn closed_form_with_derivative(p: &KzScalarParams, x: f64) -> Result<([C64; 3], [C64; 3])> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("closed forms need 0 < x < 1, got {x}")));
    }
    let zero = re(0.0);
    if p.hbar2 == zero {
        return Ok(([zero, re(1.0), zero], [zero; 3]));
    }
    let (k, s, n) = (p.hbar2, p.s(), p.n);
    let a = k * s;
    let b = -k * s;
    let cc = 1.0 + k * s * n;
    let alpha = -k * s;
    let beta = p.beta();
    let om = 1.0 - x;
    let f = hyp_one_minus(a, b, cc, x)?;
    let g1 = a * b / cc;
    let fp = g1 * hyp_one_minus(a + 1.0, b + 1.0, cc + 1.0, x)?;
    let fpp = g1 * (a + 1.0) * (b + 1.0) / (cc + 1.0) * hyp_one_minus(a + 2.0, b + 2.0, cc + 2.0, x)?;
    let pref2 = powc(x, alpha) * powc(om, beta);
    let f2 = pref2 * f;
    // d/dx F(1−x) = −F'(1−x)
    let df2 = f2 * (alpha / x - beta / om) - pref2 * fp;
    let pref1 = -(1.0 / k) * powc(x, alpha) * powc(om, beta + 1.0);
    let f1 = pref1 * fp;
    let df1 = f1 * (alpha / x - (beta + 1.0) / om) - pref1 * fpp;
    let target = combination_target(p, x);
    let dtarget = target * beta * (1.0 / x - 1.0 / om);
    let f3 = (target - f1 - f2 * s) / (n + 1.0);
    let df3 = (dtarget - df1 - df2 * s) / (n + 1.0);
    Ok(([f1, f2, f3], [df1, df2, df3]))
}

pub fn closed_form_f(p: &KzScalarParams, x: f64) -> Result<[C64; 3]> {
    Ok(closed_form_with_derivative(p, x)?.0)
}

/// `max_k |f_k' − rhs_k| / (1 + |rhs_k|)` for the closed forms at `x`.
pub fn closed_form_ode_residual(p: &KzScalarParams, x: f64) -> Result<f64> {
    let (f, df) = closed_form_with_derivative(p, x)?;
    let r = scalar_rhs(p, x, &f);
    Ok((0..3).map(|k| (df[k] - r[k]).norm() / (1.0 + r[k].norm())).fold(0.0, f64::max))
}

/// Two-term Frobenius expansion `u^β (v₀ + u v₁)`, `u = 1 − x`, of the
/// solution with pure `(1−x)^{±K(n−1)}` behaviour; `v₀ = (0, 1, 0)`.
fn frobenius_seed(p: &KzScalarParams, u: f64) -> [C64; 3] {
    let (k, s) = (p.hbar2, p.s());
    let beta = p.beta();
    let v0 = k / (k * s + beta + 1.0);
    let v1 = k * s - k * v0;
    let v2 = -k + k * s * v0;
    let lead = powc(u, beta);
    [lead * v0 * u, lead * (1.0 + v1 * u), lead * v2 * u]
}

/// Integrated values at the requested abscissae (same order as requested).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub f: Vec<[C64; 3]>,
    pub steps: usize,
}

/// Integrates from `x = 1 − eps` (seeded with the two-term expansion of the
/// solution behaving as `f₂ ≈ (1−x)^{±K(n−1)}`) down to the smallest requested abscissa.
pub fn integrate_scalar(p: &KzScalarParams, xs: &[f64]) -> Result<Trajectory> {
    for &x in xs {
        if !(x >= p.eps && x <= 1.0 - p.eps) {
            return Err(Error::InvalidArgument(format!("sample {x} outside [eps, 1-eps]")));
        }
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[j].total_cmp(&xs[i]));
    let upper: Vec<usize> = order.iter().copied().filter(|&i| xs[i] > 0.5).collect();
    let lower: Vec<usize> = order.iter().copied().filter(|&i| xs[i] <= 0.5).collect();
    let opts = OdeOptions::default();

    let s0 = -p.eps.ln();
    let seed = frobenius_seed(p, p.eps);
    let mut s_samples: Vec<f64> = upper.iter().map(|&i| -(-xs[i]).ln_1p()).collect();
    s_samples.push(2f64.ln());
    let (ys_up, st1) = ode::integrate(
        |s, f, out| {
            let om = (-s).exp();
            let x = -(-s).exp_m1();
            rhs_log_one_minus_x(p, om / x, f, out)
        },
        s0,
        &seed,
        &s_samples,
        &opts,
    )?;
    let mid = ys_up.last().expect("landing at x = 1/2").clone();
    let t_samples: Vec<f64> = lower.iter().map(|&i| xs[i].ln()).collect();
    let (ys_lo, st2) = ode::integrate(
        |t, f, out| {
            let x = t.exp();
            rhs_log_x(p, x / (1.0 - x), f, out)
        },
        0.5f64.ln(),
        &mid,
        &t_samples,
        &opts,
    )?;
    let mut f = vec![[re(0.0); 3]; xs.len()];
    for (k, &i) in upper.iter().enumerate() {
        f[i] = [ys_up[k][0], ys_up[k][1], ys_up[k][2]];
    }
    for (k, &i) in lower.iter().enumerate() {
        f[i] = [ys_lo[k][0], ys_lo[k][1], ys_lo[k][2]];
    }
    Ok(Trajectory { x: xs.to_vec(), f, steps: st1.accepted + st2.accepted })
}

/// 24 comparison abscissae spread over `(0, 1)` on both log scales.
pub fn default_sample_grid(eps: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = (1..=19).map(|k| k as f64 / 20.0).collect();
    for e in [1e-2f64, 1e-3, 1e-4] {
        xs.push(e.max(eps));
        xs.push(1.0 - e.max(eps));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// The combinations whose `x → 0⁺` limits are `l₁, l₂, l₃`:
/// `x^{∓K(n−1)}·(n f₁ ∓ f₂, n f₃ ± f₂, f₁ ± f₂ + (n+1) f₃)`.
pub fn limit_combinations(p: &KzScalarParams, x: f64, f: &[C64; 3]) -> [C64; 3] {
    let s = p.s();
    let pre = powc(x, -p.beta());
    [
        pre * (f[0] * p.n - f[1] * s),
        pre * (f[2] * p.n + f[1] * s),
        pre * (f[0] + f[1] * s + f[2] * (p.n + 1.0)),
    ]
}

/// Limits implied by the hypergeometric connection formula:
/// `l₁ = ∓n/[n]_q`, `l₂ = ±n/(n+1)·(1 + 1/[n]_q)`, `l₃ = ±1`.
pub fn expected_limits(p: &KzScalarParams) -> [C64; 3] {
    let s = p.s();
    let n = p.n;
    let bn = qspecial::qbracket_c(re(n), p.q());
    [-(n / bn) * s, (1.0 + 1.0 / bn) * (s * n / (n + 1.0)), re(s)]
}

/// `l₁` exactly as printed in the source, `∓1/[n]_q`; it differs from
/// [`expected_limits`] by the factor `n`.
pub fn printed_l1(p: &KzScalarParams) -> C64 {
    -(1.0 / qspecial::qbracket_c(re(p.n), p.q())) * p.s()
}

/// Three-point extrapolation of `g(x) = l + c₁x + c₂x^p` to `x = 0`.
pub fn richardson(xs: [f64; 3], gs: [C64; 3], p: C64) -> Result<C64> {
    let m = CMat::from_fn(3, 3, |i, j| match j {
        0 => re(1.0),
        1 => re(xs[i]),
        _ => powc(xs[i], p),
    });
    let rhs = nalgebra::DVector::from_column_slice(&gs);
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NoConvergence("singular Richardson system".into()))?;
    if !(sol[0].re.is_finite() && sol[0].im.is_finite()) {
        return Err(Error::NoConvergence("non-finite Richardson extrapolate".into()));
    }
    Ok(sol[0])
}

/// Correction exponent `1 ∓ Kn` of the approach to the limits.
fn correction_exponent(p: &KzScalarParams) -> C64 {
    1.0 - p.hbar2 * (p.s() * p.n)
}

pub const TRAJECTORY_LIMIT_POINTS: [f64; 3] = [1e-4, 1e-5, 1e-6];
pub const CLOSED_LIMIT_POINTS: [f64; 3] = [1e-10, 1e-11, 1e-12];

fn extrapolate(p: &KzScalarParams, xs: [f64; 3], fs: [[C64; 3]; 3]) -> Result<[C64; 3]> {
    let g: Vec<[C64; 3]> = (0..3).map(|k| limit_combinations(p, xs[k], &fs[k])).collect();
    let e = correction_exponent(p);
    let mut out = [re(0.0); 3];
    for i in 0..3 {
        out[i] = richardson(xs, [g[0][i], g[1][i], g[2][i]], e)?;
    }
    Ok(out)
}

/// Limits from the closed forms (near `x = 0` via the connection formula).
pub fn limits_from_closed_form(p: &KzScalarParams) -> Result<[C64; 3]> {
    let xs = CLOSED_LIMIT_POINTS;
    let fs = [closed_form_f(p, xs[0])?, closed_form_f(p, xs[1])?, closed_form_f(p, xs[2])?];
    extrapolate(p, xs, fs)
}

/// Limits from an integrated trajectory that contains the three
/// [`TRAJECTORY_LIMIT_POINTS`].
pub fn limits_from_trajectory(p: &KzScalarParams, traj: &Trajectory) -> Result<[C64; 3]> {
    let xs = TRAJECTORY_LIMIT_POINTS;
    let mut fs = [[re(0.0); 3]; 3];
    for (k, &x) in xs.iter().enumerate() {
        let idx = traj
            .x
            .iter()
            .position(|&y| y == x)
            .ok_or_else(|| Error::InvalidArgument(format!("trajectory lacks sample x = {x}")))?;
        fs[k] = traj.f[idx];
    }
    extrapolate(p, xs, fs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub closed_form: [C64; 3],
    pub trajectory: [C64; 3],
}

/// Both independent routes to `(l₁, l₂, l₃)`.
pub fn extract_limits(p: &KzScalarParams) -> Result<Limits> {
    if p.eps > TRAJECTORY_LIMIT_POINTS[2] {
        return Err(Error::InvalidArgument("trajectory limits need eps <= 1e-6".into()));
    }
    let traj = integrate_scalar(p, &TRAJECTORY_LIMIT_POINTS)?;
    Ok(Limits { closed_form: limits_from_closed_form(p)?, trajectory: limits_from_trajectory(p, &traj)? })
}

/// Everything the scalar suite checks, computed from one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarAnalysis {
    /// `max |f_traj − f_closed| / (1 + |f_closed|)` over the comparison grid.
    pub closed_form_deviation: f64,
    /// `max |f₁ ± f₂ + (n+1)f₃ ∓ [x(1−x)]^{±K(n−1)}|` along the trajectory.
    pub combination: f64,
    /// `max |u' − R(u)| / (1 + |R(u)|)` for `u = f₁/f₂`.
    pub riccati: f64,
    /// Worst closed-form ODE residual on the grid.
    pub closed_form_ode: f64,
    pub limits: Limits,
    pub expected: [C64; 3],
    pub samples: usize,
    pub steps: usize,
}

const RICCATI_CENTERS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
const RICCATI_DELTA: f64 = 1e-3;

pub fn analyze_scalar(p: &KzScalarParams) -> Result<ScalarAnalysis> {
    let grid = default_sample_grid(p.eps);
    let mut xs = grid.clone();
    xs.extend(TRAJECTORY_LIMIT_POINTS);
    for &xc in &RICCATI_CENTERS {
        for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            xs.push(xc + k * RICCATI_DELTA);
        }
    }
    let traj = integrate_scalar(p, &xs)?;
    let at = |x: f64| traj.f[traj.x.iter().position(|&y| y == x).unwrap_or_else(|| panic!("sampled {x} {:?}", traj.x))];

    let mut dev: f64 = 0.0;
    let mut ode_res: f64 = 0.0;
    for &x in &grid {
        let cf = closed_form_f(p, x)?;
        let tf = at(x);
        for k in 0..3 {
            dev = dev.max((tf[k] - cf[k]).norm() / (1.0 + cf[k].norm()));
        }
        ode_res = ode_res.max(closed_form_ode_residual(p, x)?);
    }
    let mut comb: f64 = 0.0;
    for (x, f) in traj.x.iter().zip(&traj.f) {
        let lhs = f[0] + f[1] * p.s() + f[2] * (p.n + 1.0);
        comb = comb.max((lhs - combination_target(p, *x)).norm());
    }
    let mut ric: f64 = 0.0;
    if p.hbar2 != re(0.0) {
        for &xc in &RICCATI_CENTERS {
            let u = |x: f64| {
                let f = at(x);
                f[0] / f[1]
            };
            let d = RICCATI_DELTA;
            let du = (-u(xc + 2.0 * d) + u(xc + d) * 8.0 - u(xc - d) * 8.0 + u(xc - 2.0 * d)) / (12.0 * d);
            let uc = u(xc);
            let r = p.hbar2 * (uc * (p.s() * p.n / (xc * (1.0 - xc))) - 1.0 / xc - uc * uc / (1.0 - xc));
            ric = ric.max((du - r).norm() / (1.0 + r.norm()));
        }
    }
    let limits = Limits { closed_form: limits_from_closed_form(p)?, trajectory: limits_from_trajectory(p, &traj)? };
    Ok(ScalarAnalysis {
        closed_form_deviation: dev,
        combination: comb,
        riccati: ric,
        closed_form_ode: ode_res,
        limits,
        expected: expected_limits(p),
        samples: grid.len(),
        steps: traj.steps,
    })
}

// ---------------------------------------------------------------------------
// operator system

/// `P`, `A`, `B` on `C^N ⊗ C^N ⊗ Fock`:
/// `P = flip ⊗ 1`, `A = Σ 1 ⊗ e_ij ⊗ a⁺_j a^i`, `B = Σ e_ij ⊗ 1 ⊗ a⁺_j a^i`.
#[derive(Debug, Clone)]
pub struct KzOperatorSystem {
    pub space: FockSpace,
    pub p: CMat,
    pub a: CMat,
    pub b: CMat,
    pub hbar: C64,
    blocks: Vec<Vec<usize>>,
}

impl KzOperatorSystem {
    /// `ħ = h/(2πi)` for the deformation parameter `q = e^h`.
    pub fn from_h(space: &FockSpace, h: f64) -> Result<Self> {
        Self::new(space, re(h) / c(0.0, 2.0 * PI))
    }

    pub fn new(space: &FockSpace, hbar: C64) -> Result<Self> {
        if space.statistics() != Statistics::Bose {
            return Err(Error::Unsupported("the coassociator is computed on bosonic spaces".into()));
        }
        let n = space.modes();
        if !(2..=3).contains(&n) || space.cutoff() > 6 {
            return Err(Error::InvalidArgument(format!(
                "coassociator needs N in {{2,3}} and cutoff <= 6, got N = {n}, cutoff = {}",
                space.cutoff()
            )));
        }
        let d = space.dim();
        let a = space.annihilators();
        let ap = space.creators();
        let id_n = linalg::identity(n);
        let p = linalg::kron(&linalg::flip(n), &linalg::identity(d));
        let mut big_a = CMat::zeros(n * n * d, n * n * d);
        let mut big_b = big_a.clone();
        for i in 0..n {
            for j in 0..n {
                let op = ap[j].matrix() * a[i].matrix();
                let e = linalg::unit(n, i, j);
                big_a += linalg::kron(&linalg::kron(&id_n, &e), &op);
                big_b += linalg::kron(&linalg::kron(&e, &id_n), &op);
            }
        }
        let mut blocks = vec![Vec::new(); space.cutoff() + 1];
        for alpha in 0..n * n {
            for k in 0..d {
                blocks[space.total(k) as usize].push(alpha * d + k);
            }
        }
        Ok(KzOperatorSystem { space: space.clone(), p, a: big_a, b: big_b, hbar, blocks })
    }

    pub fn modes(&self) -> usize {
        self.space.modes()
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// `h = 2πi ħ`.
    pub fn h(&self) -> C64 {
        self.hbar * c(0.0, 2.0 * PI)
    }

    /// `‖P A P − B‖`, the factor-permutation relation between `A` and `B`.
    pub fn permutation_residual(&self) -> f64 {
        linalg::max_abs(&(&self.p * &self.a * &self.p - &self.b))
    }
}

fn sub(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// `eps^{−2ħP} · W(1−eps) · eps^{2ħA}` with `dW/dx = W·(−2ħ)(P/x + A/(x−1))`, `W(eps) = 1`.
fn coassociator_at(sys: &KzOperatorSystem, eps: f64) -> Result<CMat> {
    let dim = sys.dim();
    let mut m = CMat::zeros(dim, dim);
    let k = sys.hbar * -2.0;
    let opts = OdeOptions::default();
    for idx in sys.blocks.iter().filter(|b| !b.is_empty()) {
        let pb = sub(&sys.p, idx);
        let ab = sub(&sys.a, idx);
        let nb = idx.len();
        let w0 = CMat::identity(nb, nb);
        let rhs = |g: CMat, y: &[C64], out: &mut [C64]| {
            let w = DMatrix::from_column_slice(nb, nb, y);
            out.copy_from_slice((w * g).as_slice());
        };
        let (w1, _) = ode::integrate(
            |t, y, out| {
                let x = t.exp();
                rhs((&pb + &ab * re(x / (x - 1.0))) * k, y, out)
            },
            eps.ln(),
            w0.as_slice(),
            &[0.5f64.ln()],
            &opts,
        )?;
        let (w2, _) = ode::integrate(
            |s, y, out| {
                let om = (-s).exp();
                let x = -(-s).exp_m1();
                rhs((&pb * re(om / x) - &ab) * k, y, out)
            },
            2f64.ln(),
            &w1[0],
            &[-eps.ln()],
            &opts,
        )?;
        let w = DMatrix::from_column_slice(nb, nb, &w2[0]);
        let left = linalg::hermitian_power(eps, -2.0 * sys.hbar, &pb);
        let right = linalg::hermitian_power(eps, 2.0 * sys.hbar, &ab);
        let mb = left * w * right;
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                m[(gi, gj)] = mb[(i, j)];
            }
        }
    }
    if !linalg::is_finite(&m) {
        return Err(Error::NonFinite("coassociator matrix".into()));
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct Coassociator {
    pub m: LinOp,
    pub eps: f64,
    /// `‖M(eps) − M(eps/2)‖`
    pub error_estimate: f64,
}

pub const DEFAULT_OPERATOR_EPS: f64 = 1e-7;
const HALVING_LIMIT: f64 = 1e-6;

/// The coassociator matrix, certified by one eps-halving.
pub fn coassociator_matrix(sys: &KzOperatorSystem, eps: f64) -> Result<Coassociator> {
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1e-3], got {eps}")));
    }
    let m = coassociator_at(sys, eps)?;
    let m_half = coassociator_at(sys, eps / 2.0)?;
    let error_estimate = linalg::spectral_norm(&(&m - &m_half));
    if error_estimate > HALVING_LIMIT {
        return Err(Error::NoConvergence(format!(
            "coassociator changes by {error_estimate:e} under eps halving at eps = {eps:e}"
        )));
    }
    Ok(Coassociator { m: LinOp::graded(m_half, 0), eps: eps / 2.0, error_estimate })
}

/// `‖M − 1‖`.
pub fn deviation_from_identity(m: &CMat) -> f64 {
    linalg::dist(m, &linalg::identity(m.nrows()))
}

/// Stacked `a^i a^j` as a `(N²·d) × d` operator, row block `i*N + j`.
pub fn stacked_aa(space: &FockSpace) -> CMat {
    let n = space.modes();
    let d = space.dim();
    let a = space.annihilators();
    let mut out = CMat::zeros(n * n * d, d);
    for i in 0..n {
        for j in 0..n {
            out.view_mut(((i * n + j) * d, 0), (d, d)).copy_from(&(a[i].matrix() * a[j].matrix()));
        }
    }
    out
}

/// Stacked `a⁺_i a⁺_j` as a `d × (N²·d)` operator, column block `i*N + j`.
pub fn stacked_apap(space: &FockSpace) -> CMat {
    let n = space.modes();
    let d = space.dim();
    let ap = space.creators();
    let mut out = CMat::zeros(d, n * n * d);
    for i in 0..n {
        for j in 0..n {
            out.view_mut((0, (i * n + j) * d), (d, d)).copy_from(&(ap[i].matrix() * ap[j].matrix()));
        }
    }
    out
}

/// `‖M·(aa) − aa‖`.
pub fn trivial_action_residual(sys: &KzOperatorSystem, m: &CMat) -> f64 {
    let aa = stacked_aa(&sys.space);
    linalg::spectral_norm(&(m * &aa - &aa))
}

/// `max_X ‖[M, (ρ⊗ρ⊗σ)Δ²(X)]‖` over the sl(N) basis.
pub fn invariance_residual(sys: &KzOperatorSystem, m: &CMat) -> Result<f64> {
    let n = sys.modes();
    let data = LieData::sl(n)?;
    let id_n = linalg::identity(n);
    let id_d = linalg::identity(sys.space.dim());
    let mut worst: f64 = 0.0;
    for x in data.basis() {
        let r = data.rho(&x)?;
        let s = liealg::sigma(&sys.space, &data, &x)?;
        let d2 = linalg::kron(&linalg::kron(&r, &id_n), &id_d)
            + linalg::kron(&linalg::kron(&id_n, &r), &id_d)
            + linalg::kron(&linalg::kron(&id_n, &id_n), s.matrix());
        worst = worst.max(linalg::spectral_norm(&linalg::commutator(m, &d2)));
    }
    Ok(worst)
}

/// Choice of the free invariant `I(n)` in `𝗮^i = I(n)a^i`, `𝗮⁺_i = a⁺_i Î(n)/I(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dressing {
    /// `I(n) = 1`
    Unit,
    /// `I(n) = √Î(n)`
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigataResiduals {
    pub figata1: f64,
    pub figata2: f64,
    pub figata3: f64,
}

/// Residuals of the three relations characterizing the deformed generators
/// through `M`:
/// `(1 ∓ M⁻¹PM)·aa`, `a⁺a⁺·(1 ∓ M⁻¹PM)`, and
/// `𝗮^i𝗮⁺_j − δ^i_j ∓ 𝗮⁺_l (M⁻¹VM)^{il}_{jm} 𝗮^m` with `V = q P q^{P} ⊗ 1`,
/// on the degree-2 safe subspace. `Î(n) = (n+1)_{q²}/(n+1)`.
pub fn figata_check(sys: &KzOperatorSystem, m: &CMat, sign: Sign, dressing: Dressing) -> Result<FigataResiduals> {
    let h = sys.h();
    if h.im.abs() > 1e-12 {
        return Err(Error::InvalidArgument("figata relations are checked for real h".into()));
    }
    let h = h.re;
    let q = h.exp();
    let s = sign.value();
    let space = &sys.space;
    let n = space.modes();
    let d = space.dim();
    let minv = linalg::inverse(m)?;
    let cond = linalg::condition_number(m);
    if cond > 1e8 {
        return Err(Error::Singular(format!("M has condition number {cond:e}")));
    }
    let ppm = &minv * &sys.p * m;
    let safe2 = space.safe_projector(2)?;
    let sp = safe2.matrix();
    let big_s = linalg::kron(&linalg::identity(n * n), sp);

    let aa = stacked_aa(space);
    let r1 = linalg::spectral_norm(&((&aa - &ppm * &aa * re(s)) * sp));
    let apap = stacked_apap(space);
    let r2 = linalg::spectral_norm(&(sp * (&apap - &apap * &ppm * re(s)) * &big_s));

    let flip = linalg::flip(n);
    let qp = linalg::hermitian_power(q, re(1.0), &flip);
    let v = linalg::kron(&(&flip * &qp * re(q)), &linalg::identity(d));
    let x = &minv * v * m;
    let ihat = |k: u32| qspecial::qnum(k as f64 + 1.0, q * q) / (k as f64 + 1.0);
    let i_of = |k: u32| match dressing {
        Dressing::Unit => 1.0,
        Dressing::Symmetric => ihat(k).sqrt(),
    };
    let i_left = space.diag_fn(|t| re(i_of(t.iter().sum())))?;
    let i_tilde = space.diag_fn(|t| {
        let k = t.iter().sum();
        re(ihat(k) / i_of(k))
    })?;
    let da: Vec<CMat> = space.annihilators().iter().map(|a| i_left.matrix() * a.matrix()).collect();
    let dap: Vec<CMat> = space.creators().iter().map(|a| a.matrix() * i_tilde.matrix()).collect();
    let id = linalg::identity(d);
    let mut r3: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut y = &da[i] * &dap[j];
            if i == j {
                y -= &id;
            }
            for l in 0..n {
                for mm in 0..n {
                    let blk = x.view(((i * n + l) * d, (j * n + mm) * d), (d, d));
                    y -= &dap[l] * blk * &da[mm] * re(s);
                }
            }
            r3 = r3.max(linalg::spectral_norm(&(sp * y * sp)));
        }
    }
    Ok(FigataResiduals { figata1: r1, figata2: r2, figata3: r3 })
}
