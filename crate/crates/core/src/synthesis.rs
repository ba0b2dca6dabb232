//! Spring/damper/inerter networks whose driving-point impedance equals the
//! closed-loop output impedance.
//!
//! Mechanical impedance convention: a spring `k` is `k/s`, a damper `c` is
//! `c`, an inerter `b` is `b s`. Parallel branches share velocity and their
//! impedances add; series branches share force and their admittances add.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::models::{ClosedLoopCase, Configuration};
use crate::ratfun::{Polynomial, RationalFunction};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    /// Stiffness, N m/rad.
    Spring,
    /// Damping, N m s/rad.
    Damper,
    /// Inertance, kg m^2.
    Inerter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechElement {
    pub kind: ElementKind,
    pub value: f64,
    pub label: String,
}

impl MechElement {
    pub fn spring(value: f64, label: &str) -> Self {
        Self { kind: ElementKind::Spring, value, label: label.into() }
    }

    pub fn damper(value: f64, label: &str) -> Self {
        Self { kind: ElementKind::Damper, value, label: label.into() }
    }

    pub fn inerter(value: f64, label: &str) -> Self {
        Self { kind: ElementKind::Inerter, value, label: label.into() }
    }

    pub fn impedance(&self) -> RationalFunction {
        match self.kind {
            ElementKind::Spring => RationalFunction {
                num: Polynomial::constant(self.value),
                den: Polynomial::monomial(1.0, 1),
            },
            ElementKind::Damper => RationalFunction::constant(self.value),
            ElementKind::Inerter => RationalFunction {
                num: Polynomial::monomial(self.value, 1),
                den: Polynomial::constant(1.0),
            },
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.value >= 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechNetwork {
    Element(MechElement),
    Series(Vec<MechNetwork>),
    Parallel(Vec<MechNetwork>),
}

impl From<MechElement> for MechNetwork {
    fn from(e: MechElement) -> Self {
        MechNetwork::Element(e)
    }
}

impl MechNetwork {
    /// All elements in depth-first order.
    pub fn elements(&self) -> Vec<&MechElement> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a MechElement>) {
        match self {
            MechNetwork::Element(e) => out.push(e),
            MechNetwork::Series(c) | MechNetwork::Parallel(c) => c.iter().for_each(|n| n.collect(out)),
        }
    }

    pub fn element(&self, label: &str) -> Option<&MechElement> {
        self.elements().into_iter().find(|e| e.label == label)
    }

    /// Graphviz `digraph` of the composition tree.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph network {\n  node [fontname=\"Helvetica\"];\n  port [shape=point];\n");
        let mut next = 0usize;
        let root = self.dot_node(&mut s, &mut next);
        let _ = writeln!(s, "  port -> {root};");
        s.push_str("}\n");
        s
    }

    fn dot_node(&self, out: &mut String, next: &mut usize) -> String {
        let id = format!("n{}", *next);
        *next += 1;
        match self {
            MechNetwork::Element(e) => {
                let kind = match e.kind {
                    ElementKind::Spring => "spring",
                    ElementKind::Damper => "damper",
                    ElementKind::Inerter => "inerter",
                };
                let _ = writeln!(out, "  {id} [shape=box, label=\"{kind} {}\\n{:.6e}\"];", e.label, e.value);
            }
            MechNetwork::Series(children) | MechNetwork::Parallel(children) => {
                let name = if matches!(self, MechNetwork::Series(_)) { "series" } else { "parallel" };
                let _ = writeln!(out, "  {id} [shape=ellipse, label=\"{name}\"];");
                for c in children {
                    let cid = c.dot_node(out, next);
                    let _ = writeln!(out, "  {id} -> {cid};");
                }
            }
        }
        id
    }
}

/// Driving-point impedance of a network, normalized.
pub fn network_impedance(net: &MechNetwork) -> Result<RationalFunction> {
    Ok(raw_impedance(net)?.normalize())
}

fn raw_impedance(net: &MechNetwork) -> Result<RationalFunction> {
    match net {
        MechNetwork::Element(e) => Ok(e.impedance()),
        MechNetwork::Parallel(children) => {
            let mut acc: Option<RationalFunction> = None;
            for c in children {
                let z = raw_impedance(c)?;
                acc = Some(match acc {
                    None => z,
                    Some(a) => a.add(&z).normalize(),
                });
            }
            acc.ok_or_else(|| Error::Domain("empty parallel composition".into()))
        }
        MechNetwork::Series(children) => {
            if children.is_empty() {
                return Err(Error::Domain("empty series composition".into()));
            }
            let zs = children.iter().map(raw_impedance).collect::<Result<Vec<_>>>()?;
            // a branch that carries no force blocks the whole chain
            if zs.iter().any(RationalFunction::is_zero) {
                return Ok(RationalFunction::constant(0.0));
            }
            let mut y = zs[0].recip()?;
            for z in &zs[1..] {
                y = y.add(&z.recip()?).normalize();
            }
            if y.is_zero() {
                return Err(Error::Domain("series composition with zero total admittance".into()));
            }
            Ok(y.recip()?.normalize())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub offenders: Vec<MechElement>,
}

/// A realization is physical when every element value is nonnegative.
pub fn feasibility(net: &MechNetwork) -> Feasibility {
    let offenders: Vec<MechElement> = net.elements().into_iter().filter(|e| !e.is_feasible()).cloned().collect();
    Feasibility { feasible: offenders.is_empty(), offenders }
}

pub const LABEL_FILTER_SPRING: &str = "K";
pub const LABEL_FILTER_DAMPER: &str = "B_f";
pub const LABEL_DAMPER: &str = "(B_m+G_m)/(alpha+1)";
pub const LABEL_INERTER: &str = "J_m/(alpha+1)";
pub const LABEL_C1N: &str = "c1n";
pub const LABEL_C2N: &str = "c2n";
pub const LABEL_B1N: &str = "b1n";
pub const LABEL_SIGMA_DAMPER: &str = "sigma(B_m+G_m)";
pub const LABEL_SIGMA_INERTER: &str = "sigma J_m";
pub const LABEL_RENDERED_SPRING: &str = "alpha K_d/(alpha+1)";
pub const LABEL_COUPLING_SPRING: &str = "K - alpha K_d/(alpha+1)";
pub const LABEL_C1S: &str = "c1s";
pub const LABEL_B1S: &str = "b1s";

/// Scale of the parasitic dynamics during spring rendering,
/// `1/(alpha+1) - alpha/(alpha+1)^2 K_d/K`.
pub fn sigma(alpha: f64, kd: f64, k: f64) -> f64 {
    1.0 / (alpha + 1.0) - alpha / ((alpha + 1.0) * (alpha + 1.0)) * kd / k
}

/// Element values of the P-PI null realization: `(c1n, c2n, b1n)`.
pub fn ppi_null_elements(case: &ClosedLoopCase) -> (f64, f64, f64) {
    let (p, g) = (&case.plant, &case.gains);
    let a1 = g.alpha() + 1.0;
    let c1n = 1.0 / g.gt;
    let c2n = (p.bm - 1.0 / g.gt) / a1 - g.gt * g.im * p.jm / (a1 * a1);
    let b1n = (p.bm * g.gt - 1.0) / (g.gt * g.gt * g.im) - p.jm / a1;
    (c1n, c2n, b1n)
}

/// Element values of the extra SDEA spring-rendering branch: `(c1s, b1s)`.
pub fn sdea_spring_elements(case: &ClosedLoopCase) -> (f64, f64) {
    let (p, g, kd) = (&case.plant, &case.gains, case.env.kd);
    let a = g.alpha();
    let a1 = a + 1.0;
    let b = p.bm + g.gm;
    let common = kd * a * (p.bf * b - p.jm * p.k);
    let c1s = common / (p.bf * p.k * a1 * a1);
    let b1s = common / (p.k * p.k * a1 * a1);
    (c1s, b1s)
}

fn par(v: Vec<MechNetwork>) -> MechNetwork {
    MechNetwork::Parallel(v)
}

fn ser(v: Vec<MechNetwork>) -> MechNetwork {
    MechNetwork::Series(v)
}

/// Passive physical equivalent of a supported closed-loop case.
///
/// With `alpha + 1 = 0` the null-rendering cases reduce to the bare filter
/// (`K`, or `K` parallel to `B_f`); other configurations have no network in
/// that limit.
pub fn realize(case: &ClosedLoopCase) -> Result<MechNetwork> {
    let cfg = case.configuration()?;
    let (p, g) = (&case.plant, &case.gains);
    let a = g.alpha();
    let a1 = a + 1.0;
    let b = p.bm + g.gm;
    let spring_k = || MechNetwork::from(MechElement::spring(p.k, LABEL_FILTER_SPRING));
    let filter = || -> MechNetwork {
        if p.is_sdea() {
            par(vec![spring_k(), MechElement::damper(p.bf, LABEL_FILTER_DAMPER).into()])
        } else {
            spring_k()
        }
    };

    if a1 == 0.0 {
        return match cfg {
            Configuration::SeaPpNull | Configuration::SdeaPpNull => Ok(filter()),
            _ => Err(Error::Domain(format!("{cfg} has no realization when alpha + 1 = 0"))),
        };
    }

    let net = match cfg {
        Configuration::SeaPpNull | Configuration::SdeaPpNull => ser(vec![
            filter(),
            par(vec![
                MechElement::damper(b / a1, LABEL_DAMPER).into(),
                MechElement::inerter(p.jm / a1, LABEL_INERTER).into(),
            ]),
        ]),
        Configuration::SeaPpiNull => {
            if g.gt == 0.0 {
                return Err(Error::Domain("P-PI realization needs G_t != 0".into()));
            }
            let (c1n, c2n, b1n) = ppi_null_elements(case);
            ser(vec![
                spring_k(),
                par(vec![
                    MechElement::inerter(p.jm / a1, LABEL_INERTER).into(),
                    MechElement::damper(c1n, LABEL_C1N).into(),
                    ser(vec![
                        MechElement::damper(c2n, LABEL_C2N).into(),
                        MechElement::inerter(b1n, LABEL_B1N).into(),
                    ]),
                ]),
            ])
        }
        Configuration::SeaPpSpring => {
            let kv = a * case.env.kd / a1;
            let sg = sigma(a, case.env.kd, p.k);
            par(vec![
                MechElement::spring(kv, LABEL_RENDERED_SPRING).into(),
                ser(vec![
                    MechElement::spring(p.k - kv, LABEL_COUPLING_SPRING).into(),
                    par(vec![
                        MechElement::damper(sg * b, LABEL_SIGMA_DAMPER).into(),
                        MechElement::inerter(sg * p.jm, LABEL_SIGMA_INERTER).into(),
                    ]),
                ]),
            ])
        }
        Configuration::SdeaPpSpring => {
            let kv = a * case.env.kd / a1;
            let sg = sigma(a, case.env.kd, p.k);
            let (c1s, b1s) = sdea_spring_elements(case);
            par(vec![
                MechElement::spring(kv, LABEL_RENDERED_SPRING).into(),
                ser(vec![
                    par(vec![
                        MechElement::spring(p.k - kv, LABEL_COUPLING_SPRING).into(),
                        MechElement::damper(p.bf, LABEL_FILTER_DAMPER).into(),
                    ]),
                    par(vec![
                        MechElement::damper(sg * b, LABEL_SIGMA_DAMPER).into(),
                        MechElement::inerter(p.jm / a1, LABEL_INERTER).into(),
                        ser(vec![
                            MechElement::damper(c1s, LABEL_C1S).into(),
                            MechElement::inerter(b1s, LABEL_B1S).into(),
                        ]),
                    ]),
                ]),
            ])
        }
    };
    Ok(net)
}

/// The parallel inerter and damper values tabulated for each configuration:
/// `(inerter, damper)`.
pub fn parasitic_pair(net: &MechNetwork, cfg: Configuration) -> Option<(f64, f64)> {
    let (inerter, damper) = match cfg {
        Configuration::SeaPpNull | Configuration::SdeaPpNull => (LABEL_INERTER, LABEL_DAMPER),
        Configuration::SeaPpiNull => (LABEL_INERTER, LABEL_C1N),
        Configuration::SeaPpSpring => (LABEL_SIGMA_INERTER, LABEL_SIGMA_DAMPER),
        Configuration::SdeaPpSpring => (LABEL_INERTER, LABEL_SIGMA_DAMPER),
    };
    Some((net.element(inerter)?.value, net.element(damper)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;
    use crate::ratfun::coefficient_mismatch;

    fn case(plant: PlantParams, gains: ControllerGains, env: VirtualEnv) -> ClosedLoopCase {
        ClosedLoopCase::new(plant, gains, env).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn elementary_impedances() {
        let d = network_impedance(&MechElement::damper(0.22, "c").into()).unwrap();
        assert!(coefficient_mismatch(&d, &RationalFunction::constant(0.22)) < 1e-15);
        let voigt = par(vec![MechElement::spring(360.0, "k").into(), MechElement::damper(0.5, "c").into()]);
        let z = network_impedance(&voigt).unwrap();
        assert!(coefficient_mismatch(&z, &RationalFunction::from_coeffs(&[360.0, 0.5], &[0.0, 1.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn series_with_blocked_branch_is_zero() {
        let net = ser(vec![MechElement::damper(0.0, "c").into(), MechElement::inerter(1.0, "b").into()]);
        assert!(network_impedance(&net).unwrap().is_zero());
    }

    #[test]
    fn sea_null_values_and_identity() {
        let c = case(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::null());
        let net = realize(&c).unwrap();
        let (b, d) = parasitic_pair(&net, Configuration::SeaPpNull).unwrap();
        assert!(rel(d, 0.22) < 1e-12);
        assert!(rel(b, 0.002 / 51.0) < 1e-12);
        let z = network_impedance(&net).unwrap();
        assert!(coefficient_mismatch(&z, &z_out(&c).unwrap()) < 1e-10);
    }

    #[test]
    fn ppi_elements() {
        let c = case(PlantParams::reference_sea(), ControllerGains::new(5.0, 10.0, 10.0).unwrap(), VirtualEnv::null());
        let (c1n, c2n, b1n) = ppi_null_elements(&c);
        assert!(rel(c1n, 0.2) < 1e-12);
        assert!(rel(c2n, 0.0199616) < 1e-5);
        assert!(rel(b1n, 0.0203608) < 1e-5);
        let net = realize(&c).unwrap();
        assert!(coefficient_mismatch(&network_impedance(&net).unwrap(), &z_out(&c).unwrap()) < 1e-9);
    }

    #[test]
    fn sea_spring_elements() {
        let c = case(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap());
        let net = realize(&c).unwrap();
        assert!(rel(net.element(LABEL_SIGMA_DAMPER).unwrap().value, 0.13013) < 1e-4);
        assert!(rel(net.element(LABEL_SIGMA_INERTER).unwrap().value, 2.3196e-5) < 1e-4);
        assert!(rel(net.element(LABEL_RENDERED_SPRING).unwrap().value, 147.0588) < 1e-6);
        assert!(rel(net.element(LABEL_COUPLING_SPRING).unwrap().value, 212.9412) < 1e-6);
        assert!(feasibility(&net).feasible);
        assert!(coefficient_mismatch(&network_impedance(&net).unwrap(), &z_out(&c).unwrap()) < 1e-9);
    }

    #[test]
    fn stiff_spring_is_infeasible() {
        let c = case(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(380.0).unwrap());
        let f = feasibility(&realize(&c).unwrap());
        assert!(!f.feasible);
        let coupling = f.offenders.iter().find(|e| e.label == LABEL_COUPLING_SPRING).unwrap();
        assert!((coupling.value - (360.0 - 50.0 / 51.0 * 380.0)).abs() < 1e-9);
    }

    #[test]
    fn sdea_spring_elements_and_identity() {
        let c = case(PlantParams::reference_sdea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap());
        let (c1s, b1s) = sdea_spring_elements(&c);
        assert!(rel(c1s, 0.078335) < 1e-4);
        assert!(rel(b1s, 1.08799e-4) < 1e-4);
        let net = realize(&c).unwrap();
        assert!(feasibility(&net).feasible);
        assert!(coefficient_mismatch(&network_impedance(&net).unwrap(), &z_out(&c).unwrap()) < 1e-9);

        // J_m K / B_f above B_m + G_m turns c1s and b1s negative
        let slow = case(PlantParams { bf: 0.05, ..PlantParams::reference_sdea() }, ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0).unwrap());
        let f = feasibility(&realize(&slow).unwrap());
        let labels: Vec<_> = f.offenders.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, vec![LABEL_C1S, LABEL_B1S]);
    }

    #[test]
    fn cancelled_loop_null_networks() {
        let sea = case(PlantParams::reference_sea(), ControllerGains::pp(5.0, -0.2), VirtualEnv::null());
        assert_eq!(realize(&sea).unwrap(), MechNetwork::Element(MechElement::spring(360.0, LABEL_FILTER_SPRING)));
        let sdea = case(PlantParams::reference_sdea(), ControllerGains::pp(5.0, -0.2), VirtualEnv::null());
        let z = network_impedance(&realize(&sdea).unwrap()).unwrap();
        assert!(coefficient_mismatch(&z, &z_out(&sdea).unwrap()) < 1e-12);
    }

    #[test]
    fn dot_output_mentions_elements() {
        let c = case(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::null());
        let dot = realize(&c).unwrap().to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("inerter J_m/(alpha+1)"));
    }
}
