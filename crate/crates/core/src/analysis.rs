//! Effective impedance, parasitic dynamics and frequency response.

use serde::{Deserialize, Serialize};

use crate::conditions::rendered_stiffness;
use crate::models::{ClosedLoopCase, Configuration, ControllerGains, PlantParams};
use crate::ratfun::{Polynomial, RationalFunction};
use crate::{Error, Result};

pub const DEFAULT_GRID_LO: f64 = 1e-2;
pub const DEFAULT_GRID_HI: f64 = 1e5;
pub const DEFAULT_GRID_POINTS: usize = 1000;

/// Strictly increasing positive frequencies, rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::Domain("empty frequency grid".into()));
        }
        if omega.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Domain("grid frequencies must be finite and positive".into()));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid frequencies must be strictly increasing".into()));
        }
        Ok(Self { omega })
    }

    /// `n` log-spaced points on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Domain(format!("invalid grid bounds [{lo}, {hi}]")));
        }
        if n == 1 {
            return Self::new(vec![lo]);
        }
        if n == 0 {
            return Err(Error::Domain("grid needs at least one point".into()));
        }
        let (a, b) = (lo.log10(), hi.log10());
        let step = (b - a) / (n - 1) as f64;
        let mut omega: Vec<f64> = (0..n).map(|i| 10f64.powf(a + step * i as f64)).collect();
        omega[0] = lo;
        omega[n - 1] = hi;
        Self::new(omega)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::log_spaced(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS).expect("valid default grid")
    }
}

/// `Z(jw)` split into mechanical primitives. `k_eff` is set when the
/// reactance is spring-like (`Im Z < 0`), `b_eff` when it is mass-like
/// (`Im Z > 0`); both are zero exactly at `Im Z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveImpedanceSample {
    pub omega: f64,
    pub re: f64,
    pub im: f64,
    pub c_eff: f64,
    pub k_eff: Option<f64>,
    pub b_eff: Option<f64>,
    /// `Im Z` is zero here or changed sign since the previous sample.
    pub crossing: bool,
}

pub fn effective_decompose(z: &RationalFunction, grid: &FrequencyGrid) -> Result<Vec<EffectiveImpedanceSample>> {
    let mut out: Vec<EffectiveImpedanceSample> = Vec::with_capacity(grid.len());
    for &w in grid.omega() {
        let v = z.eval_jw(w)?;
        let (k_eff, b_eff) = if v.im < 0.0 {
            (Some(-w * v.im), None)
        } else if v.im > 0.0 {
            (None, Some(v.im / w))
        } else {
            (Some(0.0), Some(0.0))
        };
        let crossing = v.im == 0.0 || out.last().is_some_and(|p| p.im * v.im < 0.0);
        out.push(EffectiveImpedanceSample { omega: w, re: v.re, im: v.im, c_eff: v.re, k_eff, b_eff, crossing });
    }
    Ok(out)
}

/// Frequencies where `Im Z` changes sign, interpolated linearly in `log w`.
pub fn crossing_frequencies(samples: &[EffectiveImpedanceSample]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if s.im == 0.0 {
            out.push(s.omega);
        } else if i > 0 {
            let p = &samples[i - 1];
            if p.im != 0.0 && p.im * s.im < 0.0 {
                let t = p.im / (p.im - s.im);
                let lw = p.omega.ln() + t * (s.omega.ln() - p.omega.ln());
                out.push(lw.exp());
            }
        }
    }
    out
}

fn require_sea_ppi(plant: &PlantParams, gains: &ControllerGains) -> Result<()> {
    if plant.is_sdea() || !gains.is_ppi() {
        return Err(Error::Configuration("needs an SEA (B_f = 0) under P-PI control".into()));
    }
    Ok(())
}

fn require_sdea_pp(plant: &PlantParams, gains: &ControllerGains) -> Result<()> {
    if !plant.is_sdea() || gains.is_ppi() {
        return Err(Error::Configuration("needs an SDEA (B_f > 0) under P-P control".into()));
    }
    Ok(())
}

/// Closed-form effective damping and inertance of the SEA P-PI null
/// rendering with the filter spring removed.
pub fn ceff_beff_sea_ppi_null(plant: &PlantParams, gains: &ControllerGains, omega: f64) -> Result<(f64, f64)> {
    require_sea_ppi(plant, gains)?;
    let (jm, bm) = (plant.jm, plant.bm);
    let (gt, im) = (gains.gt, gains.im);
    let a1 = gains.alpha() + 1.0;
    let b = bm + gains.gm;
    let w2 = omega * omega;
    let den = a1 * a1 * w2 + gt * gt * im * im;
    let c = ((b * a1 - gt * im * jm) * w2 + gt * im * im) / den;
    let m = (jm * a1 * w2 + im * (bm * gt - 1.0)) / den;
    Ok((c, m))
}

/// Closed-form effective damping and inertance of the SDEA P-P spring
/// rendering with the coupling filter and the rendered spring removed.
pub fn ceff_beff_sdea_pp_spring(plant: &PlantParams, gains: &ControllerGains, kd: f64, omega: f64) -> Result<(f64, f64)> {
    require_sdea_pp(plant, gains)?;
    let (jm, k, bf) = (plant.jm, plant.k, plant.bf);
    let a = gains.alpha();
    let a1 = a + 1.0;
    let b = plant.bm + gains.gm;
    let w2 = omega * omega;
    let den = bf * bf * a1 * a1 * w2 + k * k * a1 * a1;
    let c = (bf * (bf * b * a1 - jm * kd * a) * w2 + k * (k * b * a1 - kd * a * b)) / den;
    let m = (bf * bf * jm * a1 * w2 + jm * k * k * a1 + bf * kd * a * b - jm * k * kd * a) / den;
    Ok((c, m))
}

/// Controllable part of `Z_out`: the rendered spring `alpha K_d/(alpha+1)`
/// is subtracted, then the series filter branch (`K`, `K - alpha K_d/(alpha+1)`,
/// and `B_f` in parallel for an SDEA) is removed by inverting the series sum.
pub fn parasitic_impedance(case: &ClosedLoopCase) -> Result<RationalFunction> {
    let cfg = case.configuration()?;
    let z = crate::models::z_out(case)?;
    let (p, g) = (&case.plant, &case.gains);
    let s = Polynomial::monomial(1.0, 1);
    let spring = |k: f64| RationalFunction { num: Polynomial::constant(k), den: s.clone() };

    let (zp, coupling) = if cfg.is_spring() {
        let kv = rendered_stiffness(g, case.env.kd);
        (z.sub(&spring(kv)).normalize(), p.k - kv)
    } else {
        (z, p.k)
    };
    let filter = RationalFunction { num: Polynomial::new(vec![coupling, p.bf]), den: s.clone() };
    let y = zp.recip()?.sub(&filter.recip()?).normalize();
    if y.is_zero() {
        return Err(Error::Domain(format!("{cfg}: no parasitic dynamics left after removing the filter")));
    }
    Ok(y.recip()?.normalize())
}

/// Whether `parasitic_impedance` has a printed closed form to compare with.
pub fn has_closed_form_parasitics(cfg: Configuration) -> bool {
    matches!(cfg, Configuration::SeaPpiNull | Configuration::SdeaPpSpring)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodePoint {
    pub omega: f64,
    pub mag_db: f64,
    pub phase_deg: f64,
}

/// Magnitude in dB and phase in degrees, unwrapped along the grid.
pub fn bode(z: &RationalFunction, grid: &FrequencyGrid) -> Result<Vec<BodePoint>> {
    let mut out: Vec<BodePoint> = Vec::with_capacity(grid.len());
    for &w in grid.omega() {
        let v = z.eval_jw(w)?;
        let mut phase = v.arg().to_degrees();
        if let Some(prev) = out.last() {
            while phase - prev.phase_deg > 180.0 {
                phase -= 360.0;
            }
            while phase - prev.phase_deg < -180.0 {
                phase += 360.0;
            }
        }
        out.push(BodePoint { omega: w, mag_db: 20.0 * v.norm().log10(), phase_deg: phase });
    }
    Ok(out)
}

/// One row of the frequency-response table written by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub omega_rad_s: f64,
    pub re: f64,
    pub im: f64,
    pub mag_db: f64,
    pub phase_deg: f64,
    pub c_eff: f64,
    pub k_eff: Option<f64>,
    pub b_eff: Option<f64>,
}

pub fn frequency_table(z: &RationalFunction, grid: &FrequencyGrid) -> Result<Vec<FrequencyRow>> {
    let eff = effective_decompose(z, grid)?;
    let bd = bode(z, grid)?;
    Ok(eff
        .iter()
        .zip(&bd)
        .map(|(e, b)| FrequencyRow {
            omega_rad_s: e.omega,
            re: e.re,
            im: e.im,
            mag_db: b.mag_db,
            phase_deg: b.phase_deg,
            c_eff: e.c_eff,
            k_eff: e.k_eff,
            b_eff: e.b_eff,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![0.0, 1.0]).is_err());
        let g = FrequencyGrid::log_spaced(1e-2, 1e5, 8).unwrap();
        assert_eq!(g.omega()[0], 1e-2);
        assert_eq!(g.omega()[7], 1e5);
        assert!((g.omega()[1] - 1e-1).abs() < 1e-15);
        assert_eq!(FrequencyGrid::default().len(), 1000);
    }

    #[test]
    fn primitive_decompositions() {
        let grid = FrequencyGrid::log_spaced(0.1, 100.0, 7).unwrap();
        for s in effective_decompose(&RationalFunction::constant(0.22), &grid).unwrap() {
            assert_eq!(s.c_eff, 0.22);
            assert_eq!((s.k_eff, s.b_eff), (Some(0.0), Some(0.0)));
        }
        let spring = RationalFunction::from_coeffs(&[360.0], &[0.0, 1.0]).unwrap();
        for s in effective_decompose(&spring, &grid).unwrap() {
            assert_eq!(s.c_eff, 0.0);
            assert!(rel(s.k_eff.unwrap(), 360.0) < 1e-14);
            assert!(s.b_eff.is_none());
        }
        let inerter = RationalFunction::from_coeffs(&[0.0, 0.002], &[1.0]).unwrap();
        for s in effective_decompose(&inerter, &grid).unwrap() {
            assert!(rel(s.b_eff.unwrap(), 0.002) < 1e-14);
        }
    }

    #[test]
    fn pole_on_grid_is_an_error() {
        let z = RationalFunction::from_coeffs(&[1.0], &[1.0, 0.0, 1.0]).unwrap();
        let grid = FrequencyGrid::new(vec![0.5, 1.0]).unwrap();
        assert!(matches!(effective_decompose(&z, &grid), Err(Error::PoleProximity { .. })));
        assert!(bode(&z, &grid).is_err());
    }

    #[test]
    fn ppi_limits() {
        let p = PlantParams::reference_sea();
        let g = ControllerGains::new(5.0, 10.0, 10.0).unwrap();
        let (c0, b0) = ceff_beff_sea_ppi_null(&p, &g, 1e-6).unwrap();
        let (ci, bi) = ceff_beff_sea_ppi_null(&p, &g, 1e9).unwrap();
        assert!(rel(c0, 0.2) < 1e-6);
        assert!(rel(ci, 0.219962) < 1e-5);
        assert!(rel(bi, 0.002 / 51.0) < 1e-6);
        assert!(rel(b0, 0.002 / 51.0 + 0.0203608) < 1e-5);
        assert!(ceff_beff_sea_ppi_null(&PlantParams::reference_sdea(), &g, 1.0).is_err());
    }

    #[test]
    fn sdea_spring_limits() {
        let p = PlantParams::reference_sdea();
        let g = ControllerGains::pp(5.0, 10.0);
        let (c0, b0) = ceff_beff_sdea_pp_spring(&p, &g, 150.0, 1e-6).unwrap();
        let (ci, bi) = ceff_beff_sdea_pp_spring(&p, &g, 150.0, 1e9).unwrap();
        assert!(rel(c0, 0.13013) < 1e-4);
        assert!(rel(ci, 0.13013 + 0.078335) < 1e-4);
        assert!(rel(b0, 3.9216e-5 + 1.08799e-4) < 1e-4);
        assert!(rel(bi, 3.9216e-5) < 1e-4);
    }

    #[test]
    fn closed_forms_match_parasitic_extraction() {
        let cases = [
            ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::new(5.0, 10.0, 10.0).unwrap(), VirtualEnv::null()).unwrap(),
            ClosedLoopCase::new(PlantParams::reference_sdea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap()).unwrap(),
        ];
        let grid = FrequencyGrid::log_spaced(1e-2, 1e5, 100).unwrap();
        for case in cases {
            let q = parasitic_impedance(&case).unwrap();
            for s in effective_decompose(&q, &grid).unwrap() {
                let (c, b) = match case.configuration().unwrap() {
                    Configuration::SeaPpiNull => ceff_beff_sea_ppi_null(&case.plant, &case.gains, s.omega).unwrap(),
                    _ => ceff_beff_sdea_pp_spring(&case.plant, &case.gains, case.env.kd, s.omega).unwrap(),
                };
                assert!(rel(s.c_eff, c) < 1e-8, "c_eff at {}: {} vs {c}", s.omega, s.c_eff);
                assert!(rel(s.b_eff.unwrap(), b) < 1e-8, "b_eff at {}", s.omega);
            }
        }
    }

    #[test]
    fn bode_of_spring_and_null_rendering() {
        let grid = FrequencyGrid::log_spaced(1.0, 1000.0, 4).unwrap();
        let spring = RationalFunction::from_coeffs(&[360.0], &[0.0, 1.0]).unwrap();
        let b = bode(&spring, &grid).unwrap();
        for w in b.windows(2) {
            assert!((w[1].mag_db - w[0].mag_db + 20.0).abs() < 1e-9);
        }
        assert!(b.iter().all(|p| (p.phase_deg + 90.0).abs() < 1e-9));

        let case = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::null()).unwrap();
        let z = z_out(&case).unwrap();
        let ends = bode(&z, &FrequencyGrid::new(vec![1e-3, 1e5]).unwrap()).unwrap();
        assert!((ends[0].mag_db - 20.0 * 0.22f64.log10()).abs() < 1e-3);
        assert!((ends[0].mag_db + 13.15).abs() < 0.01);
        assert!(rel(10f64.powf(ends[1].mag_db / 20.0), 360.0 / 1e5) < 0.01);
    }

    #[test]
    fn crossings_are_flagged() {
        // lightly damped resonance: mass-like below, spring-like above the antiresonance
        let z = RationalFunction::from_coeffs(&[0.0, 1.0], &[1.0, 0.1, 1.0]).unwrap();
        let grid = FrequencyGrid::log_spaced(0.1, 10.0, 101).unwrap();
        let eff = effective_decompose(&z, &grid).unwrap();
        let x = crossing_frequencies(&eff);
        assert_eq!(x.len(), 1);
        assert!((x[0] - 1.0).abs() < 0.05);
        assert!(eff.iter().any(|s| s.crossing));
    }
}
