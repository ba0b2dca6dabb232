use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{poly_roots, Polynomial};
use crate::{Error, Result};

/// Default relative distance under which a zero and a pole are cancelled.
pub const CANCEL_RHO: f64 = 1e-8;

/// Ratio of two real polynomials in `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    /// Convenience constructor from ascending coefficient lists.
    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::try_new(num.to_vec())?, Polynomial::try_new(den.to_vec())?)
    }

    pub fn constant(c: f64) -> Self {
        Self { num: Polynomial::constant(c), den: Polynomial::constant(1.0) }
    }

    /// The identity `s`.
    pub fn s() -> Self {
        Self { num: Polynomial::monomial(1.0, 1), den: Polynomial::constant(1.0) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator degree minus denominator degree; `None` for the zero function.
    pub fn relative_degree(&self) -> Option<i64> {
        let n = self.num.degree()? as i64;
        Some(n - self.den.degree().unwrap_or(0) as i64)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// `Z(jw)`, refusing points that sit on a pole.
    pub fn eval_jw(&self, omega: f64) -> Result<Complex64> {
        let s = Complex64::new(0.0, omega);
        let d = self.den.eval_complex(s);
        let size: f64 = self
            .den
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * omega.abs().powi(i as i32))
            .sum();
        if d.norm() <= 1e-12 * size {
            let pole = self
                .poles()
                .ok()
                .and_then(|ps| {
                    ps.into_iter()
                        .min_by(|a, b| (a - s).norm().total_cmp(&(b - s).norm()))
                })
                .unwrap_or(s);
            return Err(Error::PoleProximity { omega, pole });
        }
        Ok(self.num.eval_complex(s) / d)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == Some(0) {
            return Ok(Vec::new());
        }
        poly_roots(&self.den)
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        match self.num.degree() {
            None => Err(Error::Domain("zeros of the zero function".into())),
            Some(0) => Ok(Vec::new()),
            Some(_) => poly_roots(&self.num),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        Self {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(-1.0))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { num: &self.num * &rhs.num, den: &self.den * &rhs.den }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { num: self.num.scale(k), den: self.den.clone() }
    }

    /// Normalized form with the default cancellation tolerance.
    pub fn normalize(&self) -> Self {
        normalize_with(self, CANCEL_RHO)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Cancels common factors and scales the denominator to be monic.
///
/// Exact common powers of `s` are removed first. Remaining zero/pole pairs are
/// cancelled when `|z - p| <= rho * max(1, |p|)`; complex pairs are removed as
/// real quadratic factors.
pub fn normalize_with(z: &RationalFunction, rho: f64) -> RationalFunction {
    if z.num.is_zero() {
        return RationalFunction::constant(0.0);
    }
    let k = z.num.zero_root_multiplicity().min(z.den.zero_root_multiplicity());
    let mut num = z.num.unshift(k);
    let mut den = z.den.unshift(k);

    if num.degree().unwrap_or(0) >= 1 && den.degree().unwrap_or(0) >= 1 {
        if let (Ok(zs), Ok(ps)) = (poly_roots(&num), poly_roots(&den)) {
            for factor in common_factors(&num, &den, &zs, &ps, rho) {
                if let (Ok((qn, _)), Ok((qd, _))) = (num.div_rem(&factor), den.div_rem(&factor)) {
                    num = qn;
                    den = qd;
                }
            }
        }
    }

    let lead = den.leading();
    RationalFunction { num: num.scale(1.0 / lead), den: den.scale(1.0 / lead) }
}

/// Roots this close (relative) are read as one repeated root. A computed
/// `m`-fold root splits by roughly `eps^(1/m)`, so its center is recovered as
/// the nearby simple root of the `(m-1)`-th derivative instead.
const CLUSTER_REL: f64 = 1e-6;

fn cluster_centers(poly: &Polynomial, rs: &[Complex64]) -> Vec<Complex64> {
    rs.iter()
        .map(|&r| {
            let tol = CLUSTER_REL * r.norm().max(1.0);
            let (sum, m) = rs
                .iter()
                .filter(|&&q| (q - r).norm() <= tol)
                .fold((Complex64::new(0.0, 0.0), 0usize), |(s, n), &q| (s + q, n + 1));
            let mut d = poly.clone();
            for _ in 1..m {
                d = d.derivative();
            }
            let c = newton_polish(&d, sum / m as f64);
            if c.im.abs() <= tol { Complex64::new(c.re, 0.0) } else { c }
        })
        .collect()
}

/// A few Newton steps, each kept only if it reduces the residual.
fn newton_polish(p: &Polynomial, mut x: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut fx = p.eval_complex(x).norm();
    for _ in 0..4 {
        let d = dp.eval_complex(x);
        if d.norm() == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - p.eval_complex(x) / d;
        let fn_ = p.eval_complex(next).norm();
        if !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

fn common_factors(num: &Polynomial, den: &Polynomial, zs: &[Complex64], ps: &[Complex64], rho: f64) -> Vec<Polynomial> {
    let zs = cluster_centers(num, zs);
    let ps = cluster_centers(den, ps);
    let mut used = vec![false; zs.len()];
    let mut out = Vec::new();
    for &p in ps.iter().filter(|p| p.im >= 0.0) {
        let tol = rho * p.norm().max(1.0);
        let hit = (0..zs.len())
            .filter(|&i| !used[i] && (zs[i] - p).norm() <= tol)
            .min_by(|&a, &b| (zs[a] - p).norm().total_cmp(&(zs[b] - p).norm()));
        let Some(i) = hit else { continue };
        let c = (zs[i] + p) * 0.5;
        used[i] = true;
        if p.im == 0.0 {
            out.push(Polynomial::new(vec![-c.re, 1.0]));
        } else {
            // the conjugate zero must also be present to drop a real quadratic
            let conj = (0..zs.len())
                .filter(|&j| !used[j] && (zs[j] - p.conj()).norm() <= tol)
                .min_by(|&a, &b| (zs[a] - p.conj()).norm().total_cmp(&(zs[b] - p.conj()).norm()));
            match conj {
                Some(j) => {
                    used[j] = true;
                    out.push(Polynomial::new(vec![c.norm_sqr(), -2.0 * c.re, 1.0]));
                }
                None => used[i] = false,
            }
        }
    }
    out
}

/// Largest coefficient-wise relative mismatch between two normalized
/// functions, measured per polynomial against its max-norm. Infinite when
/// the degrees differ.
pub fn coefficient_mismatch(a: &RationalFunction, b: &RationalFunction) -> f64 {
    let a = a.normalize();
    let b = b.normalize();
    let poly_err = |x: &Polynomial, y: &Polynomial| -> f64 {
        if x.degree() != y.degree() {
            return f64::INFINITY;
        }
        let scale = x.max_abs_coeff().max(y.max_abs_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        x.coeffs()
            .iter()
            .zip(y.coeffs())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
            / scale
    };
    poly_err(&a.num, &b.num).max(poly_err(&a.den, &b.den))
}
