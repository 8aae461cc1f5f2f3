//! q-numbers, Euler and q-deformed gamma functions, Gauss 2F1 with its
//! 0↔1 connection formula, and the y-invariants that dress the deforming maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, re, C64};

/// The ± convention: `Plus` for Weyl (Bose), `Minus` for Clifford (Fermi).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "weyl" => Ok(Sign::Plus),
            "-" | "minus" | "clifford" => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

/// Deformation data: `q = e^h`, `ħ = h/(2πi)`, and the statistics sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParams {
    pub q: C64,
    pub h: C64,
    pub hbar: C64,
    pub sign: Sign,
}

impl DeformParams {
    /// Real deformation parameter `q > 0`.
    pub fn from_q(q: f64, sign: Sign) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        Ok(Self::from_h(re(q.ln()), sign))
    }

    pub fn from_h(h: C64, sign: Sign) -> Self {
        DeformParams { q: h.exp(), h, hbar: h / c(0.0, 2.0 * PI), sign }
    }

    /// Real part of `q`; the compact-case constructions assume `q` real.
    pub fn q_real(&self) -> f64 {
        self.q.re
    }
}

const Q_ONE: f64 = 1e-14;

/// `(x)_q = (q^x − 1)/(q − 1)`, continuous at `q = 1`.
pub fn qnum(x: f64, q: f64) -> f64 {
    if (q - 1.0).abs() < Q_ONE {
        return x;
    }
    let lq = q.ln();
    (x * lq).exp_m1() / lq.exp_m1()
}

/// `[x]_q = (q^x − q^{−x})/(q − q^{−1})`.
pub fn qbracket(x: f64, q: f64) -> f64 {
    if (q - 1.0).abs() < Q_ONE {
        return x;
    }
    let lq = q.ln();
    (x * lq).sinh() / lq.sinh()
}

pub fn qnum_c(x: C64, q: C64) -> C64 {
    if (q - 1.0).norm() < Q_ONE {
        return x;
    }
    let lq = q.ln();
    ((x * lq).exp() - 1.0) / (q - 1.0)
}

pub fn qbracket_c(x: C64, q: C64) -> C64 {
    if (q - 1.0).norm() < Q_ONE {
        return x;
    }
    let lq = q.ln();
    (x * lq).sinh() / lq.sinh()
}

fn as_positive_integer(a: C64) -> Option<u32> {
    if a.im == 0.0 && a.re >= 1.0 && a.re.fract() == 0.0 && a.re < 1e6 {
        Some(a.re as u32)
    } else {
        None
    }
}

fn is_nonpositive_integer(a: C64) -> bool {
    a.im.abs() < 1e-14 && a.re <= 0.0 && (a.re - a.re.round()).abs() < 1e-14
}

/// Jackson q-gamma. Positive integers use `Γ_q(1) = 1`, `Γ_q(a+1) = (a)_q Γ_q(a)`
/// for any `q > 0`; other arguments need `0 < q < 1` and the product
/// `(1−q)^{1−a} Π_k (1−q^{k+1})/(1−q^{a+k})`.
pub fn qgamma(a: C64, q: f64) -> Result<C64> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q-gamma needs q > 0, got {q}")));
    }
    if let Some(m) = as_positive_integer(a) {
        let mut g = 1.0;
        for k in 1..m {
            g *= qnum(k as f64, q);
        }
        return Ok(re(g));
    }
    if (q - 1.0).abs() < Q_ONE {
        return gamma(a);
    }
    if q > 1.0 {
        return Err(Error::Domain(format!(
            "q-gamma at non-integer argument {a} needs q < 1, got q = {q}"
        )));
    }
    if is_nonpositive_integer(a) {
        return Err(Error::Domain(format!("q-gamma pole at {a}")));
    }
    let lq = q.ln();
    let mut prod = ((1.0 - q).ln() * (1.0 - a)).exp();
    let mut k = 0u32;
    loop {
        let qk1 = q.powi(k as i32 + 1);
        let qak = ((a + k as f64) * lq).exp();
        prod *= (1.0 - qk1) / (1.0 - qak);
        if qk1 < 1e-18 && qak.norm() < 1e-18 {
            break;
        }
        k += 1;
        if k > 200_000 {
            return Err(Error::NoConvergence(format!("q-gamma product at q = {q}")));
        }
    }
    Ok(prod)
}

/// `Γ̃_q(a) = Γ_{q²}(a) q^{−a(a−3)/2}`, satisfying `Γ̃_q(a+1) = [a]_q Γ̃_q(a)`.
pub fn qgamma_tilde(a: C64, q: f64) -> Result<C64> {
    let g = qgamma(a, q * q)?;
    Ok(g * (-(a * (a - 3.0)) * 0.5 * q.ln()).exp())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn gamma_lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = re(LANCZOS[0]);
    for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// Euler gamma via Lanczos, with reflection for `Re a < ½`.
pub fn gamma(a: C64) -> Result<C64> {
    if is_nonpositive_integer(a) {
        return Err(Error::Domain(format!("gamma pole at {a}")));
    }
    if let Some(m) = as_positive_integer(a) {
        if m <= 171 {
            return Ok(re((1..m).fold(1.0, |acc, k| acc * k as f64)));
        }
    }
    if a.re < 0.5 {
        let s = (a * PI).sin();
        Ok(re(PI) / (s * gamma_lanczos(1.0 - a)))
    } else {
        Ok(gamma_lanczos(a))
    }
}

/// `1/Γ(a)`, entire: zero at the poles of Γ.
pub fn rgamma(a: C64) -> C64 {
    if is_nonpositive_integer(a) {
        re(0.0)
    } else {
        1.0 / gamma(a).expect("not a pole")
    }
}

pub fn beta(a: C64, b: C64) -> Result<C64> {
    Ok(gamma(a)? * gamma(b)? * rgamma(a + b))
}

/// Relative residual of `Γ(a)Γ(−a) = −π/(a sin πa)`.
pub fn reflection_residual(a: C64) -> Result<f64> {
    let lhs = gamma(a)? * gamma(-a)?;
    let rhs = -PI / (a * (a * PI).sin());
    Ok((lhs - rhs).norm() / rhs.norm())
}

const SERIES_RADIUS: f64 = 0.7;
const DEGENERACY: f64 = 1e-8;

/// Direct hypergeometric series with term-wise first and second derivatives.
pub fn gauss_2f1_series(a: C64, b: C64, cc: C64, z: C64) -> Result<(C64, C64, C64)> {
    if is_nonpositive_integer(cc) {
        return Err(Error::Domain(format!("2F1 with c = {cc}")));
    }
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("2F1 series needs |z| < 1, got {z}")));
    }
    // term_k = (a)_k (b)_k / ((c)_k k!) z^k
    let mut coef = re(1.0);
    let mut f = re(0.0);
    let mut df = re(0.0);
    let mut d2f = re(0.0);
    let mut small = 0;
    let mut zpow_m2 = re(0.0); // z^{k-2}
    let mut zpow_m1 = re(0.0); // z^{k-1}
    let mut zpow = re(1.0); // z^k
    for k in 0..100_000u32 {
        let kf = k as f64;
        let term = coef * zpow;
        f += term;
        if k >= 1 {
            df += coef * kf * zpow_m1;
        }
        if k >= 2 {
            d2f += coef * kf * (kf - 1.0) * zpow_m2;
        }
        let mag = (coef * zpow).norm().max((coef * kf * zpow_m1).norm());
        if mag <= 1e-17 * f.norm().max(1e-300) {
            small += 1;
            if small >= 3 {
                return Ok((f, df, d2f));
            }
        } else {
            small = 0;
        }
        if coef == re(0.0) {
            return Ok((f, df, d2f));
        }
        coef = coef * (a + kf) * (b + kf) / ((cc + kf) * (kf + 1.0));
        zpow_m2 = zpow_m1;
        zpow_m1 = zpow;
        zpow *= z;
    }
    Err(Error::NoConvergence(format!("2F1 series at z = {z}")))
}

/// `F(a,b,c;z)` expressed through the connection formula around `z = 1`,
/// taking `w = 1 − z` directly so that small `w` loses no digits.
pub fn gauss_2f1_at_one_minus(a: C64, b: C64, cc: C64, w: C64) -> Result<C64> {
    if a == re(0.0) || b == re(0.0) {
        return Ok(re(1.0));
    }
    let s = cc - a - b;
    if (s.re - s.re.round()).abs() < DEGENERACY && s.im.abs() < DEGENERACY {
        return Err(Error::Domain(format!("connection formula degenerate: c − a − b = {s}")));
    }
    let gc = gamma(cc)?;
    let c1 = gc * gamma(s)? * rgamma(cc - a) * rgamma(cc - b);
    let c2 = gc * gamma(-s)? * rgamma(a) * rgamma(b);
    let f1 = gauss_2f1_series(a, b, 1.0 - s, w)?.0;
    let f2 = gauss_2f1_series(cc - a, cc - b, s + 1.0, w)?.0;
    Ok(c1 * f1 + c2 * w.powc(s) * f2)
}

/// Gauss hypergeometric function: direct series for `|z| ≤ 0.7`,
/// connection formula for `|1 − z| ≤ 0.7`.
pub fn gauss_2f1(a: C64, b: C64, cc: C64, z: C64) -> Result<C64> {
    if z.norm() <= SERIES_RADIUS {
        Ok(gauss_2f1_series(a, b, cc, z)?.0)
    } else if (1.0 - z).norm() <= SERIES_RADIUS {
        gauss_2f1_at_one_minus(a, b, cc, 1.0 - z)
    } else {
        Err(Error::Domain(format!("2F1 argument {z} outside both expansion discs")))
    }
}

/// `dF/dz = (ab/c) F(a+1, b+1, c+1; z)`.
pub fn gauss_2f1_derivative(a: C64, b: C64, cc: C64, z: C64) -> Result<C64> {
    Ok(a * b / cc * gauss_2f1(a + 1.0, b + 1.0, cc + 1.0, z)?)
}

/// Residual of the hypergeometric ODE
/// `z(1−z)F'' + [c − (a+b+1)z]F' − abF` with term-wise derivatives.
pub fn hyper_ode_residual(a: C64, b: C64, cc: C64, z: C64) -> Result<f64> {
    let (f, df, d2f) = gauss_2f1_series(a, b, cc, z)?;
    let r = z * (1.0 - z) * d2f + (cc - (a + b + 1.0) * z) * df - a * b * f;
    let scale = 1.0 + (z * (1.0 - z) * d2f).norm() + ((cc - (a + b + 1.0) * z) * df).norm();
    Ok(r.norm() / scale)
}

/// `|F_series(z) − F_connection(z)|` at a point inside both discs.
pub fn connection_residual(a: C64, b: C64, cc: C64, z: C64) -> Result<f64> {
    let direct = gauss_2f1_series(a, b, cc, z)?.0;
    let conn = gauss_2f1_at_one_minus(a, b, cc, 1.0 - z)?;
    Ok((direct - conn).norm())
}

/// `y_{sl(N)}(n) = Γ(n+1)/Γ_{q²}(n+1) = Π_{k≤n} k/(k)_{q²}`.
pub fn y_sln(n: u32, q: f64) -> f64 {
    let q2 = q * q;
    (1..=n).fold(1.0, |acc, k| acc * k as f64 / qnum(k as f64, q2))
}

/// `y_{so(N)}(n',l')/y_{so(N)}(n,l)` by telescoping the Γ/Γ_{q²} recurrences in
/// `A = ½(n+N/2+1−l)` and `B = ½(n+N/2+1+l)`, with prefactor `((1+q^{N−2})/2)^{−Δn}`.
pub fn y_son_ratio(n: f64, l: f64, n2: f64, l2: f64, big_n: usize, q: f64) -> Result<f64> {
    let half = big_n as f64 / 2.0;
    let da = ((n2 - n) - (l2 - l)) / 2.0;
    let db = ((n2 - n) + (l2 - l)) / 2.0;
    for d in [da, db] {
        if (d - d.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "shift ({n},{l}) -> ({n2},{l2}) is not reducible by unit recurrences"
            )));
        }
    }
    let q2 = q * q;
    let mut r = ((1.0 + q.powf(big_n as f64 - 2.0)) / 2.0).powf(-(n2 - n));
    let a0 = (n + half + 1.0 - l) / 2.0;
    let b0 = (n + half + 1.0 + l) / 2.0;
    for (x, d) in [(a0, da.round() as i64), (b0, db.round() as i64)] {
        // Γ(x+1)/Γ_{q²}(x+1) = x/(x)_{q²} · Γ(x)/Γ_{q²}(x)
        let step = |y: f64| -> Result<f64> {
            if y <= 1e-12 {
                return Err(Error::Domain(format!("gamma pole at argument {y}")));
            }
            Ok(y / qnum(y, q2))
        };
        if d >= 0 {
            if d > 0 && x <= 1e-12 {
                return Err(Error::Domain(format!("gamma pole at argument {x}")));
            }
            for k in 0..d {
                r *= step(x + k as f64)?;
            }
        } else {
            if x <= 1e-12 {
                return Err(Error::Domain(format!("gamma pole at argument {x}")));
            }
            for k in 1..=(-d) {
                r /= step(x - k as f64)?;
            }
        }
    }
    Ok(r)
}
