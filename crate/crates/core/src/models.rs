//! Plant, controller and rendering-target parameters, and the closed-loop
//! transfer functions of an S(D)EA under velocity-sourced impedance control.
//!
//! Every impedance is produced by one block-diagram reduction. With
//! `m(s) = J_m s^2 + (B_m + G_m) s + I_m`, `g(s) = alpha s + G_t I_m` and
//! `f(s) = B_f s + K` the interaction-port impedance is
//!
//! ```text
//! Z(s) = (s m + g K_d) f / ( s (s m + (s + g) f) )
//! ```
//!
//! with `K_d = 0` for null rendering, after removing common powers of `s`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ratfun::{Polynomial, RationalFunction};
use crate::{Error, Result};

/// Physical actuator parameters. `B_f = 0` is an SEA, `B_f > 0` an SDEA.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    /// Reflected actuator inertia, kg m^2.
    #[serde(rename = "Jm")]
    pub jm: f64,
    /// Actuator viscous friction, N m s/rad.
    #[serde(rename = "Bm")]
    pub bm: f64,
    /// Filter stiffness, N m/rad.
    #[serde(rename = "K")]
    pub k: f64,
    /// Filter damping, N m s/rad.
    #[serde(rename = "Bf", default)]
    pub bf: f64,
}

impl PlantParams {
    pub fn new(jm: f64, bm: f64, k: f64, bf: f64) -> Result<Self> {
        let p = Self { jm, bm, k, bf };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.jm, self.bm, self.k, self.bf];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite plant parameter in {self:?}")));
        }
        if self.jm <= 0.0 || self.bm <= 0.0 || self.k <= 0.0 {
            return Err(Error::Domain(format!("J_m, B_m and K must be positive, got {self:?}")));
        }
        if self.bf < 0.0 {
            return Err(Error::Domain(format!("B_f must be nonnegative, got {}", self.bf)));
        }
        Ok(())
    }

    /// Simulation plant used throughout the performance study (SEA).
    pub fn reference_sea() -> Self {
        Self { jm: 0.002, bm: 1.22, k: 360.0, bf: 0.0 }
    }

    /// Simulation plant with the filter damper `B_f = 0.5` (SDEA).
    pub fn reference_sdea() -> Self {
        Self { bf: 0.5, ..Self::reference_sea() }
    }

    /// Identified brake-pedal plant as an SEA.
    pub fn experimental() -> Self {
        Self { jm: 0.0024, bm: 0.0177, k: 121.8, bf: 0.0 }
    }

    /// Identified brake-pedal plant including the measured filter damping.
    pub fn experimental_sdea() -> Self {
        Self { bf: 0.0127, ..Self::experimental() }
    }

    pub fn is_sdea(&self) -> bool {
        self.bf > 0.0
    }
}

/// Gains of the cascaded torque (P) and velocity (P or PI) loops. Gains may be
/// negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    /// Torque-loop proportional gain, rad/(s N m).
    #[serde(rename = "Gt")]
    pub gt: f64,
    /// Velocity-loop proportional gain, N m s/rad.
    #[serde(rename = "Gm")]
    pub gm: f64,
    /// Velocity-loop integral gain, N m/rad.
    #[serde(rename = "Im", default)]
    pub im: f64,
}

impl ControllerGains {
    pub fn new(gt: f64, gm: f64, im: f64) -> Result<Self> {
        let g = Self { gt, gm, im };
        g.validate()?;
        Ok(g)
    }

    pub fn pp(gt: f64, gm: f64) -> Self {
        Self { gt, gm, im: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.gt, self.gm, self.im].iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite controller gain in {self:?}")));
        }
        Ok(())
    }

    /// Loop-gain product `G_m G_t`.
    pub fn alpha(&self) -> f64 {
        self.gm * self.gt
    }

    pub fn is_ppi(&self) -> bool {
        self.im != 0.0
    }

    /// Default gains of the brake-pedal experiments.
    pub fn experimental() -> Self {
        Self::pp(25.0, 0.0576)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Null,
    Spring,
}

/// Rendering target: null impedance or a virtual spring of stiffness `K_d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualEnv {
    pub kind: EnvKind,
    #[serde(rename = "Kd", default)]
    pub kd: f64,
}

impl VirtualEnv {
    pub fn null() -> Self {
        Self { kind: EnvKind::Null, kd: 0.0 }
    }

    pub fn spring(kd: f64) -> Result<Self> {
        let e = Self { kind: EnvKind::Spring, kd };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kd.is_finite() {
            return Err(Error::Domain("K_d must be finite".into()));
        }
        if self.kind == EnvKind::Spring && self.kd <= 0.0 {
            return Err(Error::Domain(format!("spring rendering needs K_d > 0, got {}", self.kd)));
        }
        Ok(())
    }

    /// Stiffness entering the loop (zero for null rendering).
    pub fn effective_kd(&self) -> f64 {
        match self.kind {
            EnvKind::Null => 0.0,
            EnvKind::Spring => self.kd,
        }
    }
}

/// The five analyzed closed-loop configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Configuration {
    SeaPpNull,
    SeaPpiNull,
    SeaPpSpring,
    SdeaPpNull,
    SdeaPpSpring,
}

impl Configuration {
    pub const ALL: [Configuration; 5] = [
        Configuration::SeaPpNull,
        Configuration::SeaPpiNull,
        Configuration::SeaPpSpring,
        Configuration::SdeaPpNull,
        Configuration::SdeaPpSpring,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Configuration::SeaPpNull => "SEA P-P null",
            Configuration::SeaPpiNull => "SEA P-PI null",
            Configuration::SeaPpSpring => "SEA P-P spring",
            Configuration::SdeaPpNull => "SDEA P-P null",
            Configuration::SdeaPpSpring => "SDEA P-P spring",
        }
    }

    pub fn is_sdea(&self) -> bool {
        matches!(self, Configuration::SdeaPpNull | Configuration::SdeaPpSpring)
    }

    pub fn is_spring(&self) -> bool {
        matches!(self, Configuration::SeaPpSpring | Configuration::SdeaPpSpring)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopCase {
    pub plant: PlantParams,
    pub gains: ControllerGains,
    pub env: VirtualEnv,
}

impl ClosedLoopCase {
    pub fn new(plant: PlantParams, gains: ControllerGains, env: VirtualEnv) -> Result<Self> {
        plant.validate()?;
        gains.validate()?;
        env.validate()?;
        Ok(Self { plant, gains, env })
    }

    /// Which analyzed configuration this case belongs to.
    pub fn configuration(&self) -> Result<Configuration> {
        let sdea = self.plant.is_sdea();
        let ppi = self.gains.is_ppi();
        match (sdea, ppi, self.env.kind) {
            (false, false, EnvKind::Null) => Ok(Configuration::SeaPpNull),
            (false, true, EnvKind::Null) => Ok(Configuration::SeaPpiNull),
            (false, false, EnvKind::Spring) => Ok(Configuration::SeaPpSpring),
            (true, false, EnvKind::Null) => Ok(Configuration::SdeaPpNull),
            (true, false, EnvKind::Spring) => Ok(Configuration::SdeaPpSpring),
            (false, true, EnvKind::Spring) => Err(Error::Configuration(
                "SEA under P-PI control rendering a spring has no closed-form analysis; \
                 use block_diagram_impedance for an unverified transfer function"
                    .into(),
            )),
            (true, true, _) => Err(Error::Configuration(
                "SDEA under P-PI control has no closed-form analysis; \
                 use block_diagram_impedance for an unverified transfer function"
                    .into(),
            )),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.gains.alpha()
    }

    /// `B_m + G_m`.
    pub fn b(&self) -> f64 {
        self.plant.bm + self.gains.gm
    }
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec())
}

fn strip_common_s(num: Polynomial, den: Polynomial, max: usize) -> RationalFunction {
    let k = num
        .zero_root_multiplicity()
        .min(den.zero_root_multiplicity())
        .min(max);
    RationalFunction { num: num.unshift(k), den: den.unshift(k) }
}

/// Interaction-port impedance `-tau_sea / omega_end` for any parameter
/// combination, including those outside the five analyzed configurations.
/// Results for P-PI control of an SDEA or for P-PI spring rendering have no
/// independent closed-form check.
pub fn block_diagram_impedance(
    plant: &PlantParams,
    gains: &ControllerGains,
    kd: f64,
) -> RationalFunction {
    let alpha = gains.alpha();
    let m = poly(&[gains.im, plant.bm + gains.gm, plant.jm]);
    let g = poly(&[gains.gt * gains.im, alpha]);
    let f = poly(&[plant.k, plant.bf]);
    let s = Polynomial::monomial(1.0, 1);

    let sm = &s * &m;
    let num = &(&sm + &g.scale(kd)) * &f;
    let s_plus_g = &s + &g;
    let den = &s * &(&sm + &(&s_plus_g * &f));
    strip_common_s(num, den, usize::MAX)
}

/// Output impedance of a supported closed-loop case.
pub fn z_out(case: &ClosedLoopCase) -> Result<RationalFunction> {
    case.configuration()?;
    Ok(block_diagram_impedance(&case.plant, &case.gains, case.env.effective_kd()))
}

/// Motor-velocity response to a disturbance torque at the actuator input with
/// a free end-effector: `s / (J_m s^2 + (B_m + G_m) s + I_m + G_m G_t K_d)`
/// for the supported cases.
pub fn disturbance_admittance(case: &ClosedLoopCase) -> Result<RationalFunction> {
    let cfg = case.configuration()?;
    if cfg == Configuration::SeaPpiNull || !case.gains.is_ppi() {
        let (p, g, kd) = (&case.plant, &case.gains, case.env.effective_kd());
        let m = poly(&[g.im, p.bm + g.gm, p.jm]);
        let gg = poly(&[g.gt * g.im, g.alpha()]);
        let s = Polynomial::monomial(1.0, 1);
        let num = Polynomial::monomial(1.0, 2);
        let den = &(&s * &m) + &gg.scale(kd);
        return Ok(strip_common_s(num, den, 1));
    }
    Err(Error::Configuration(format!("no disturbance admittance for {cfg}")))
}

/// Reflects actuator-side parameters through a transmission of ratio `n`:
/// inertia, friction and velocity gains scale with `n^2`, the torque gain
/// with `1/n`. The loop gain therefore becomes `n * alpha`.
pub fn reflect_through_gear(
    plant: &PlantParams,
    gains: &ControllerGains,
    n: f64,
) -> Result<(PlantParams, ControllerGains)> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!("gear ratio must be positive and finite, got {n}")));
    }
    let n2 = n * n;
    let p = PlantParams { jm: plant.jm * n2, bm: plant.bm * n2, ..*plant };
    let g = ControllerGains { gt: gains.gt / n, gm: gains.gm * n2, im: gains.im * n2 };
    Ok((p, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::coefficient_mismatch;

    fn rf(n: &[f64], d: &[f64]) -> RationalFunction {
        RationalFunction::from_coeffs(n, d).unwrap()
    }

    #[test]
    fn sea_pp_null_table_values() {
        let case = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::null()).unwrap();
        let z = z_out(&case).unwrap();
        assert!(coefficient_mismatch(&z, &rf(&[4039.2, 0.72], &[18360.0, 11.22, 0.002])) < 1e-12);
        assert!((z.eval_jw(1e-9).unwrap().re - 0.22).abs() < 1e-9);
    }

    #[test]
    fn sdea_null_with_cancelled_loop_is_voigt() {
        let case = ClosedLoopCase::new(PlantParams::reference_sdea(), ControllerGains::pp(5.0, -0.2), VirtualEnv::null()).unwrap();
        let z = z_out(&case).unwrap();
        assert!(coefficient_mismatch(&z, &rf(&[360.0, 0.5], &[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn torque_gain_only_is_open_chain() {
        // filter in series with the bare motor: f (J s + B) / (s (J s + B) + f)
        let p = PlantParams::reference_sea();
        let z = block_diagram_impedance(&p, &ControllerGains::pp(3.0, 0.0), 0.0);
        let expect = rf(&[360.0 * 1.22, 360.0 * 0.002], &[360.0, 1.22, 0.002]);
        assert!(coefficient_mismatch(&z, &expect) < 1e-12);
    }

    #[test]
    fn unsupported_cases_rejected() {
        let sdea_ppi = ClosedLoopCase::new(PlantParams::reference_sdea(), ControllerGains::new(5.0, 10.0, 1.0).unwrap(), VirtualEnv::null()).unwrap();
        assert!(matches!(z_out(&sdea_ppi), Err(Error::Configuration(_))));
        let ppi_spring = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::new(5.0, 10.0, 1.0).unwrap(), VirtualEnv::spring(10.0).unwrap()).unwrap();
        assert!(z_out(&ppi_spring).is_err());
        assert!(disturbance_admittance(&ppi_spring).is_err());
    }

    #[test]
    fn disturbance_admittance_forms() {
        let p = PlantParams::reference_sea();
        let ppi = ClosedLoopCase::new(p, ControllerGains::new(5.0, 10.0, 10.0).unwrap(), VirtualEnv::null()).unwrap();
        let y = disturbance_admittance(&ppi).unwrap();
        assert_eq!(y.num, Polynomial::monomial(1.0, 1));
        assert_eq!(y.den, poly(&[10.0, 11.22, 0.002]));

        let spring = ClosedLoopCase::new(p, ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap()).unwrap();
        let y = disturbance_admittance(&spring).unwrap();
        assert_eq!(y.den, poly(&[50.0 * 150.0, 11.22, 0.002]));
        assert_eq!(y.eval_jw(0.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn gear_reflection() {
        let p = PlantParams::experimental();
        let g = ControllerGains::experimental();
        let (p1, g1) = reflect_through_gear(&p, &g, 1.0).unwrap();
        assert_eq!((p1, g1), (p, g));
        let (pn, gn) = reflect_through_gear(&p, &g, 39.5).unwrap();
        assert!((pn.jm - 0.0024 * 39.5 * 39.5).abs() < 1e-12);
        assert!((pn.bm - 0.0177 * 39.5 * 39.5).abs() < 1e-12);
        assert!((gn.alpha() - 39.5 * g.alpha()).abs() < 1e-12 * gn.alpha());
        let (pb, gb) = reflect_through_gear(&pn, &gn, 1.0 / 39.5).unwrap();
        assert!((pb.jm - p.jm).abs() < 1e-12 * p.jm);
        assert!((gb.gt - g.gt).abs() < 1e-12 * g.gt);
        assert!(reflect_through_gear(&p, &g, 0.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PlantParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(PlantParams::new(1.0, 1.0, 1.0, -0.1).is_err());
        assert!(VirtualEnv::spring(0.0).is_err());
        assert!(ControllerGains::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn json_field_names() {
        let case = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap()).unwrap();
        let v = serde_json::to_value(case).unwrap();
        assert_eq!(v["plant"]["Jm"], 0.002);
        assert_eq!(v["gains"]["Gt"], 5.0);
        assert_eq!(v["env"]["kind"], "spring");
        assert_eq!(v["env"]["Kd"], 150.0);
    }
}
