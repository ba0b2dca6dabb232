//! Positive-realness test for rational impedances.
//!
//! `Z = N/D` is positive real iff
//! 1. `D` has no roots in the open right half plane,
//! 2. `Re Z(jw) >= 0` for every `w`, checked through the even polynomial
//!    `p(w^2) = Re[N(jw) D(-jw)]`,
//! 3. poles on the imaginary axis (including infinity) are simple with real,
//!    positive residues.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ratfun::{even_part, nonneg_on_halfline, poly_roots, Polynomial, RationalFunction};

/// Real-part threshold relative to the largest pole magnitude.
pub const EPS_RHP: f64 = 1e-9;
/// Relative tolerance on the imaginary part of a residue.
pub const EPS_RES: f64 = 1e-8;
/// Relative slack of the coefficient tests for denominators of degree <= 3.
const COEF_SLACK: f64 = 1e-12;
/// Two axis poles closer than this (relative) count as one repeated pole.
const CLUSTER_REL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhpRecord {
    pub ok: bool,
    /// Poles with `Re > eps_rhp`. When a coefficient test fails on a
    /// borderline denominator this holds the rightmost pole instead.
    pub offending: Vec<Complex64>,
    /// `"coefficients"` for the closed-form test, `"roots"` otherwise.
    pub method: String,
    /// Normalized distance to violation; negative when violated.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealPartRecord {
    pub ok: bool,
    /// `p(x)` with `x = w^2`.
    pub even_part: Polynomial,
    /// `(w*, Re Z(jw*))` at a violating frequency.
    pub witness: Option<(f64, f64)>,
    /// Minimum of `p` over `x >= 0` divided by its largest coefficient;
    /// `None` when `p` is unbounded below.
    pub margin: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleLocation {
    Finite(Complex64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub pole: PoleLocation,
    pub multiplicity: usize,
    pub residue: Complex64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub ok: bool,
    pub entries: Vec<ResidueEntry>,
    /// Smallest `Re(residue)/|residue|` over axis poles, `-1` for a repeated
    /// pole; `None` when no pole lies on the axis.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub cond1: f64,
    pub cond2: Option<f64>,
    pub cond3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassivityVerdict {
    pub passive: bool,
    pub cond1_rhp_poles: Vec<Complex64>,
    pub cond2_witness: Option<(f64, f64)>,
    pub cond3_residues: Vec<ResidueEntry>,
    pub margins: Margins,
    pub rhp: RhpRecord,
    pub real_part: RealPartRecord,
    pub axis: AxisRecord,
}

fn pole_scale(poles: &[Complex64]) -> f64 {
    poles.iter().fold(0.0, |m, p| m.max(p.norm()))
}

fn denominator_poles(den: &Polynomial) -> Vec<Complex64> {
    if den.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    poly_roots(den).unwrap_or_default()
}

/// Condition 1. Denominators up to degree three use sign and Hurwitz-type
/// coefficient tests; higher degrees use computed roots.
pub fn check_rhp_poles(z: &RationalFunction) -> RhpRecord {
    let poles = denominator_poles(&z.den);
    let eps = EPS_RHP * pole_scale(&poles);
    let mut offending: Vec<Complex64> = poles.iter().copied().filter(|p| p.re > eps).collect();
    let deg = z.den.degree().unwrap_or(0);
    let rightmost = poles.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re));
    let root_margin = match rightmost {
        Some(p) => -p.re / pole_scale(&poles).max(f64::MIN_POSITIVE),
        None => 1.0,
    };

    if deg == 0 {
        return RhpRecord { ok: true, offending, method: "coefficients".into(), margin: 1.0 };
    }
    if deg > 3 {
        return RhpRecord {
            ok: offending.is_empty(),
            offending,
            method: "roots".into(),
            margin: root_margin,
        };
    }

    // make the leading coefficient positive, then require every coefficient
    // and, for cubics, a1 a2 - a0 a3 to be nonnegative
    let sign = z.den.leading().signum();
    let a: Vec<f64> = (0..=deg).map(|i| sign * z.den.coeff(i)).collect();
    let scale = a.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut margin = a.iter().fold(f64::INFINITY, |m, c| m.min(c / scale));
    if deg == 3 {
        let (x, y) = (a[1] * a[2], a[0] * a[3]);
        let h = x - y;
        let hs = x.abs() + y.abs();
        margin = margin.min(if hs == 0.0 { 0.0 } else { h / hs });
    }
    let ok = margin >= -COEF_SLACK;
    if !ok && offending.is_empty() {
        offending.extend(rightmost);
    }
    RhpRecord { ok, offending, method: "coefficients".into(), margin }
}

/// Condition 2 via the even part of `N(jw) D(-jw)`.
pub fn check_real_part(z: &RationalFunction) -> RealPartRecord {
    let p = match even_part(&z.num, &z.den) {
        Ok(p) => p,
        // zero numerator: Re Z is identically zero
        Err(_) => {
            return RealPartRecord { ok: true, even_part: Polynomial::zero(), witness: None, margin: Some(0.0) };
        }
    };
    let check = nonneg_on_halfline(&p);
    let margin = check.margin(&p);
    let witness = check.witness.map(|x| {
        let w = x.sqrt();
        let re = match z.eval_jw(w) {
            Ok(v) => v.re,
            Err(_) => p.eval(x),
        };
        (w, re)
    });
    RealPartRecord {
        ok: check.nonneg,
        even_part: p,
        witness,
        margin: margin.is_finite().then_some(margin),
    }
}

/// Condition 3: simple imaginary-axis poles with real positive residues,
/// plus the behavior at infinity.
pub fn check_imag_residues(z: &RationalFunction) -> AxisRecord {
    let poles = denominator_poles(&z.den);
    let eps = EPS_RHP * pole_scale(&poles);
    let axis: Vec<Complex64> = poles.iter().copied().filter(|p| p.re.abs() <= eps).collect();
    let dden = z.den.derivative();

    let mut entries = Vec::new();
    let mut seen = vec![false; axis.len()];
    for i in 0..axis.len() {
        if seen[i] {
            continue;
        }
        let p = axis[i];
        let tol = CLUSTER_REL * p.norm().max(1.0);
        let mut mult = 0;
        for j in i..axis.len() {
            if !seen[j] && (axis[j] - p).norm() <= tol {
                seen[j] = true;
                mult += 1;
            }
        }
        let p = Complex64::new(0.0, p.im);
        let residue = if mult == 1 {
            z.num.eval_complex(p) / dden.eval_complex(p)
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
        let ok = mult == 1
            && residue.is_finite()
            && residue.im.abs() <= EPS_RES * residue.norm()
            && residue.re > 0.0;
        entries.push(ResidueEntry {
            pole: PoleLocation::Finite(p),
            multiplicity: mult,
            residue: if residue.is_finite() { residue } else { Complex64::new(0.0, 0.0) },
            ok,
        });
    }

    if let (Some(dn), Some(dd)) = (z.num.degree(), z.den.degree()) {
        if dn > dd {
            let mult = dn - dd;
            let r = if mult == 1 { z.num.leading() / z.den.leading() } else { 0.0 };
            entries.push(ResidueEntry {
                pole: PoleLocation::Infinity,
                multiplicity: mult,
                residue: Complex64::new(r, 0.0),
                ok: mult == 1 && r > 0.0,
            });
        }
    }

    let margin = entries
        .iter()
        .map(|e| {
            if e.multiplicity > 1 || e.residue.norm() == 0.0 {
                -1.0
            } else {
                e.residue.re / e.residue.norm()
            }
        })
        .reduce(f64::min);
    AxisRecord { ok: entries.iter().all(|e| e.ok), entries, margin }
}

/// Full positive-realness verdict. `z` is normalized first.
pub fn is_positive_real(z: &RationalFunction) -> PassivityVerdict {
    let z = z.normalize();
    let rhp = check_rhp_poles(&z);
    let real_part = check_real_part(&z);
    let axis = check_imag_residues(&z);
    PassivityVerdict {
        passive: rhp.ok && real_part.ok && axis.ok,
        cond1_rhp_poles: if rhp.ok { Vec::new() } else { rhp.offending.clone() },
        cond2_witness: real_part.witness,
        cond3_residues: axis.entries.clone(),
        margins: Margins { cond1: rhp.margin, cond2: real_part.margin, cond3: axis.margin },
        rhp,
        real_part,
        axis,
    }
}
