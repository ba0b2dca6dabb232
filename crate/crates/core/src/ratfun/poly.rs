use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Real polynomial with coefficients stored in ascending powers of the
/// indeterminate (`coeffs[i]` multiplies `s^i`).
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial is the empty coefficient list.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Polynomial::try_new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients.
    ///
    /// Panics if any coefficient is not finite; use [`Polynomial::try_new`]
    /// for untrusted input.
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self::try_new(coeffs).expect("polynomial coefficients must be finite")
    }

    pub fn try_new(mut coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite polynomial coefficient {bad}")));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * s^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `s^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiplies by `s^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Number of exactly-zero low-order coefficients, i.e. the multiplicity of
    /// the root at the origin when no rounding is involved.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0.0).count()
    }

    /// Divides by `s^k`, dropping the `k` lowest coefficients.
    pub fn unshift(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// Polynomial long division, returning `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; nd - dd + 1];
        let lead = divisor.leading();
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Real polynomial `lead * prod (s - r_i)`. Imaginary residue from
    /// unpaired complex roots is discarded.
    pub fn from_roots(roots: &[Complex64], lead: f64) -> Self {
        let mut acc = vec![Complex64::new(lead, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    /// All complex roots with multiplicity. See [`poly_roots`].
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        poly_roots(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a} s")?,
                _ => write!(f, "{a} s^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Roots of `p` with multiplicity.
///
/// Exactly-zero low coefficients are peeled off as roots at the origin. The
/// remaining roots are the eigenvalues of the companion matrix of the
/// variable-scaled monic polynomial, each refined by one Newton step on the
/// original coefficients.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let deg = match p.degree() {
        None => return Err(Error::Domain("roots of the zero polynomial".into())),
        Some(0) => return Err(Error::Domain("roots of a constant polynomial".into())),
        Some(d) => d,
    };
    let zeros = p.zero_root_multiplicity();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let q = p.unshift(zeros);
    let n = deg - zeros;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(Complex64::new(-q.coeff(0) / q.coeff(1), 0.0));
        return Ok(roots);
    }

    // s = gamma * t brings |a0| and |an| of the polynomial in t to the same size.
    let gamma = (q.coeff(0).abs() / q.leading().abs()).powf(1.0 / n as f64);
    let gamma = if gamma.is_finite() && gamma > 0.0 { gamma } else { 1.0 };
    let scaled: Vec<f64> = (0..=n).map(|i| q.coeff(i) * gamma.powi(i as i32)).collect();
    let lead = scaled[n];

    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -scaled[i] / lead;
    }
    let eig = companion.complex_eigenvalues();

    let dq = q.derivative();
    let mut found: Vec<Complex64> = eig
        .iter()
        .map(|&t| {
            let r = t * gamma;
            newton_polish(&q, &dq, r)
        })
        .collect();
    symmetrize_conjugates(&mut found);
    roots.extend(found);
    Ok(roots)
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, r: Complex64) -> Complex64 {
    let f = p.eval_complex(r);
    let df = dp.eval_complex(r);
    if df.norm() == 0.0 || !df.is_finite() {
        return r;
    }
    let candidate = r - f / df;
    if candidate.is_finite() && p.eval_complex(candidate).norm() <= f.norm() {
        candidate
    } else {
        r
    }
}

/// Pairs each upper-half-plane root with its closest lower-half-plane partner
/// and makes them exact conjugates; snaps numerically-real roots to the axis.
fn symmetrize_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].im <= 0.0 {
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !used[j] && roots[j].im < 0.0)
            .min_by(|&a, &b| {
                (roots[a] - target)
                    .norm()
                    .total_cmp(&(roots[b] - target).norm())
            });
        if let Some(j) = partner {
            let avg = (roots[i] + roots[j].conj()) * 0.5;
            roots[i] = avg;
            roots[j] = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
    for (i, r) in roots.iter_mut().enumerate() {
        if !used[i] && r.im.abs() <= 1e-14 * r.norm().max(1e-300) {
            r.im = 0.0;
        }
    }
}

/// `P(w) = Re[N(jw) D(-jw)]` returned as a polynomial in `x = w^2`.
///
/// Odd powers of `w` cancel identically, so only the even terms are
/// accumulated.
pub fn even_part(num: &Polynomial, den: &Polynomial) -> Result<Polynomial> {
    if num.is_zero() || den.is_zero() {
        return Err(Error::Domain("even part of a zero polynomial".into()));
    }
    let total = num.coeffs().len() + den.coeffs().len() - 1;
    let mut out = vec![0.0; total / 2 + 1];
    let mut size = vec![0.0; total / 2 + 1];
    for (k, &n) in num.coeffs().iter().enumerate() {
        for (l, &d) in den.coeffs().iter().enumerate() {
            if (k + l) % 2 != 0 {
                continue;
            }
            let m = (k + l) / 2;
            // j^(k+l) (-1)^l = (-1)^(m + l)
            let sign = if (m + l) % 2 == 0 { 1.0 } else { -1.0 };
            out[m] += sign * n * d;
            size[m] += (n * d).abs();
        }
    }
    // coefficients that cancel analytically leave rounding residue behind
    for (c, s) in out.iter_mut().zip(&size) {
        if c.abs() <= 64.0 * f64::EPSILON * s {
            *c = 0.0;
        }
    }
    Ok(Polynomial::new(out))
}

/// Outcome of a nonnegativity test of `p(x)` over `x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineCheck {
    pub nonneg: bool,
    /// Point where `p(x) < -eps_abs`, present exactly when `nonneg` is false.
    pub witness: Option<f64>,
    /// Smallest value of `p` found on the half-line, and where.
    pub min_value: f64,
    pub min_at: f64,
    /// Absolute slack used for the decision.
    pub eps_abs: f64,
}

impl HalfLineCheck {
    /// `min_value` normalized by the largest coefficient magnitude.
    pub fn margin(&self, p: &Polynomial) -> f64 {
        let scale = p.max_abs_coeff();
        if scale == 0.0 {
            0.0
        } else {
            self.min_value / scale
        }
    }
}

/// Relative slack applied to nonnegativity decisions.
pub const NONNEG_REL_EPS: f64 = 1e-12;

/// Decides whether `p(x) >= -eps_abs` for every `x >= 0`, with
/// `eps_abs = 1e-12 * max |p_i|`.
///
/// Quadratics use the closed-form test `p2 >= 0, p0 >= 0,
/// p1 >= -2 sqrt(p0 p2)`; higher degrees evaluate `p` at the origin and at
/// every positive critical point.
pub fn nonneg_on_halfline(p: &Polynomial) -> HalfLineCheck {
    let eps = NONNEG_REL_EPS * p.max_abs_coeff();
    let Some(deg) = p.degree() else {
        return HalfLineCheck { nonneg: true, witness: None, min_value: 0.0, min_at: 0.0, eps_abs: 0.0 };
    };

    if p.leading() < 0.0 && deg > 0 {
        let x = runaway_point(p, eps);
        return HalfLineCheck {
            nonneg: false,
            witness: Some(x),
            min_value: f64::NEG_INFINITY,
            min_at: f64::INFINITY,
            eps_abs: eps,
        };
    }

    let (min_at, min_value) = match deg {
        0 | 1 => (0.0, p.coeff(0)),
        2 => {
            let (p0, p1, p2) = (p.coeff(0), p.coeff(1), p.coeff(2));
            let quadratic_ok = p0 >= -eps && p1 >= -2.0 * (p2 * (p0 + eps)).max(0.0).sqrt();
            let x = (-p1 / (2.0 * p2)).max(0.0);
            let (at, val) = if p.eval(x) < p0 { (x, p.eval(x)) } else { (0.0, p0) };
            if quadratic_ok {
                return HalfLineCheck {
                    nonneg: true,
                    witness: None,
                    min_value: val,
                    min_at: at,
                    eps_abs: eps,
                };
            }
            (at, val)
        }
        _ => {
            let mut best = (0.0, p.coeff(0));
            let dp = p.derivative();
            if dp.degree().unwrap_or(0) >= 1 {
                if let Ok(crit) = poly_roots(&dp) {
                    for r in crit.into_iter().filter(|r| r.re > 0.0) {
                        let v = p.eval(r.re);
                        if v < best.1 {
                            best = (r.re, v);
                        }
                    }
                }
            }
            best
        }
    };

    let nonneg = min_value >= -eps;
    HalfLineCheck {
        nonneg,
        witness: (!nonneg).then_some(min_at),
        min_value,
        min_at,
        eps_abs: eps,
    }
}

fn runaway_point(p: &Polynomial, eps: f64) -> f64 {
    let mut x = 1.0;
    while p.eval(x) >= -eps && x < 1e300 {
        x *= 2.0;
    }
    x
}
