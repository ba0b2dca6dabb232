//! Closed-form passivity conditions for the five analyzed configurations and
//! the element-nonnegativity conditions of their physical realizations.
//!
//! Each row keeps the inequality exactly as stated, strict or not, with both
//! sides evaluated numerically.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::models::{ClosedLoopCase, Configuration, ControllerGains, PlantParams, VirtualEnv};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub label: String,
    pub expression: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub satisfied: bool,
    /// Reported for reference only; does not enter the overall verdict.
    pub informational: bool,
    /// Slack `lhs - rhs` (or `rhs - lhs` for upper bounds) divided by a
    /// natural magnitude of the quantities involved. NaN sides give `-inf`.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    /// The rows are necessary and sufficient for passivity.
    Exact,
    /// The rows are sufficient for passivity but not necessary.
    Sufficient,
    /// Element nonnegativity of a realization that coincides with the exact
    /// passivity conditions.
    Equivalent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub id: String,
    pub configuration: Configuration,
    pub kind: ReportKind,
    pub rows: Vec<ConditionRow>,
    pub passive: bool,
    /// Smallest row margin; a small magnitude means the verdict sits near a
    /// boundary.
    pub margin: f64,
}

impl ConditionReport {
    fn build(id: &str, configuration: Configuration, kind: ReportKind, rows: Vec<ConditionRow>) -> Self {
        let decisive = rows.iter().filter(|r| !r.informational);
        let passive = decisive.clone().all(|r| r.satisfied);
        let margin = decisive.map(|r| r.margin).fold(f64::INFINITY, f64::min);
        Self { id: id.to_string(), configuration, kind, rows, passive, margin }
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &ConditionRow> {
        self.rows.iter().filter(|r| !r.informational && !r.satisfied)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ReportKind::Exact => "necessary and sufficient",
            ReportKind::Sufficient => "sufficient",
            ReportKind::Equivalent => "realization feasibility, equivalent to passivity",
        };
        writeln!(f, "{} [{}] ({kind})", self.configuration, self.id)?;
        writeln!(f, "  {:<6} {:<48} {:>14}    {:>14}  {}", "row", "condition", "lhs", "rhs", "ok")?;
        for r in &self.rows {
            let ok = match (r.informational, r.satisfied) {
                (true, true) => "(yes)",
                (true, false) => "(no)",
                (false, true) => "yes",
                (false, false) => "NO",
            };
            writeln!(
                f,
                "  {:<6} {:<48} {:>14.6e} {:<3} {:>14.6e}  {ok}",
                r.label,
                r.expression,
                r.lhs,
                r.relation.symbol(),
                r.rhs
            )?;
        }
        write!(f, "  verdict: {}", if self.passive { "satisfied" } else { "violated" })
    }
}

fn row(label: &str, expression: &str, lhs: f64, relation: Relation, rhs: f64, scale: f64) -> ConditionRow {
    let satisfied = relation.holds(lhs, rhs);
    let slack = match relation {
        Relation::Ge | Relation::Gt => lhs - rhs,
        Relation::Le | Relation::Lt => rhs - lhs,
    };
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let margin = if slack.is_nan() {
        f64::NEG_INFINITY
    } else if slack.is_infinite() {
        slack.signum()
    } else {
        slack / scale
    };
    ConditionRow {
        label: label.to_string(),
        expression: expression.to_string(),
        lhs,
        relation,
        rhs,
        satisfied,
        informational: false,
        margin,
    }
}

fn info(mut r: ConditionRow) -> ConditionRow {
    r.informational = true;
    r
}

fn mag(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { m })
}

fn require(plant: &PlantParams, gains: &ControllerGains, sdea: bool, ppi: bool, what: &str) -> Result<()> {
    if plant.is_sdea() != sdea || gains.is_ppi() != ppi {
        return Err(Error::Configuration(format!(
            "{what} needs B_f {} 0 and I_m {} 0",
            if sdea { ">" } else { "=" },
            if ppi { "!=" } else { "=" }
        )));
    }
    Ok(())
}

fn b_row(label: &str, plant: &PlantParams, gains: &ControllerGains, relation: Relation) -> ConditionRow {
    let b = plant.bm + gains.gm;
    let expr = format!("B_m + G_m {} 0", relation.symbol());
    row(label, &expr, b, relation, 0.0, plant.bm + gains.gm.abs())
}

fn alpha_row(label: &str, gains: &ControllerGains, relation: Relation) -> ConditionRow {
    let a = gains.alpha();
    let expr = format!("alpha + 1 {} 0", relation.symbol());
    row(label, &expr, a + 1.0, relation, 0.0, 1.0 + a.abs())
}

/// Virtual stiffness `alpha/(alpha+1) K_d` actually rendered at low frequency.
pub fn rendered_stiffness(gains: &ControllerGains, kd: f64) -> f64 {
    let a = gains.alpha();
    a / (a + 1.0) * kd
}

/// SEA, P-P control, null rendering.
pub fn thm_sea_pp_null(plant: &PlantParams, gains: &ControllerGains) -> Result<ConditionReport> {
    require(plant, gains, false, false, "SEA P-P null conditions")?;
    let rows = vec![b_row("(i)", plant, gains, Relation::Ge), alpha_row("(ii)", gains, Relation::Ge)];
    Ok(ConditionReport::build("sea-pp-null", Configuration::SeaPpNull, ReportKind::Exact, rows))
}

/// SEA, P-PI control, null rendering. Rows (vi) and (vii) report the Routh
/// bound and the stricter realization bound for reference.
pub fn thm_sea_ppi_null(plant: &PlantParams, gains: &ControllerGains) -> Result<ConditionReport> {
    require(plant, gains, false, true, "SEA P-PI null conditions")?;
    let (jm, bm, k) = (plant.jm, plant.bm, plant.k);
    let (gt, im, a) = (gains.gt, gains.im, gains.alpha());
    let b = bm + gains.gm;
    let bound = if gt * im == 0.0 { f64::INFINITY } else { (a + 1.0) * b / (gt * im) };
    let routh = if gt * im == 0.0 { f64::INFINITY } else { b * (im + (1.0 + a) * k) / (gt * im * k) };
    let realization = if gt == 0.0 { f64::NEG_INFINITY } else { (a + 1.0) * (bm * gt - 1.0) / (gt * gt * im) };
    let rows = vec![
        row("(i)", "J_m <= (alpha+1)(B_m+G_m)/(G_t I_m)", jm, Relation::Le, bound, mag(&[jm, bound])),
        alpha_row("(ii)", gains, Relation::Gt),
        b_row("(iii)", plant, gains, Relation::Gt),
        row("(iv)", "G_t >= 0", gt, Relation::Ge, 0.0, gt.abs().max(1.0 / bm)),
        row("(v)", "I_m >= 0", im, Relation::Ge, 0.0, im.abs()),
        info(row("(vi)", "J_m <= (B_m+G_m)(I_m+(1+alpha)K)/(G_t I_m K)", jm, Relation::Le, routh, mag(&[jm, routh]))),
        info(row("(vii)", "J_m <= (alpha+1)(B_m G_t-1)/(G_t^2 I_m)", jm, Relation::Le, realization, mag(&[jm, realization]))),
    ];
    Ok(ConditionReport::build("sea-ppi-null", Configuration::SeaPpiNull, ReportKind::Exact, rows))
}

fn kvir_rows(plant: &PlantParams, gains: &ControllerGains, kd: f64) -> [ConditionRow; 2] {
    let kv = rendered_stiffness(gains, kd);
    let k = plant.k;
    [
        row("(i)", "K >= alpha/(alpha+1) K_d", k, Relation::Ge, kv, mag(&[k, kv])),
        row("(ii)", "alpha/(alpha+1) K_d > 0", kv, Relation::Gt, 0.0, mag(&[kv, k])),
    ]
}

/// SEA, P-P control, spring rendering.
pub fn thm_sea_pp_spring(plant: &PlantParams, gains: &ControllerGains, kd: f64) -> Result<ConditionReport> {
    require(plant, gains, false, false, "SEA P-P spring conditions")?;
    let [r1, r2] = kvir_rows(plant, gains, kd);
    let rows = vec![r1, r2, alpha_row("(iii)", gains, Relation::Gt), b_row("(iv)", plant, gains, Relation::Ge)];
    Ok(ConditionReport::build("sea-pp-spring", Configuration::SeaPpSpring, ReportKind::Exact, rows))
}

/// SDEA, P-P control, null rendering.
pub fn thm_sdea_pp_null(plant: &PlantParams, gains: &ControllerGains) -> Result<ConditionReport> {
    require(plant, gains, true, false, "SDEA P-P null conditions")?;
    let rows = vec![b_row("(i)", plant, gains, Relation::Ge), alpha_row("(ii)", gains, Relation::Ge)];
    Ok(ConditionReport::build("sdea-pp-null", Configuration::SdeaPpNull, ReportKind::Exact, rows))
}

/// Both sides of the quadratic-discriminant row of the SDEA spring
/// conditions:
/// `-2 J_m sqrt(B_f K b (K + alpha (K - K_d))) <= B_f (b (B_f (1+alpha) + b) - alpha J_m K_d)`
/// with `b = B_m + G_m`. A negative radicand yields NaN on the left.
pub fn sdea_spring_discriminant(plant: &PlantParams, gains: &ControllerGains, kd: f64) -> (f64, f64) {
    let (jm, k, bf) = (plant.jm, plant.k, plant.bf);
    let a = gains.alpha();
    let b = plant.bm + gains.gm;
    let lhs = -2.0 * jm * (bf * k * b * (k + a * (k - kd))).sqrt();
    let rhs = bf * (b * (bf * (1.0 + a) + b) - a * jm * kd);
    (lhs, rhs)
}

/// SDEA, P-P control, spring rendering.
pub fn thm_sdea_pp_spring(plant: &PlantParams, gains: &ControllerGains, kd: f64) -> Result<ConditionReport> {
    require(plant, gains, true, false, "SDEA P-P spring conditions")?;
    let [r1, r2] = kvir_rows(plant, gains, kd);
    let (lhs, rhs) = sdea_spring_discriminant(plant, gains, kd);
    let rows = vec![
        r1,
        r2,
        alpha_row("(iii)", gains, Relation::Gt),
        b_row("(iv)", plant, gains, Relation::Gt),
        row(
            "(v)",
            "-2 J_m sqrt(B_f K b (K+alpha(K-K_d))) <= B_f (b (B_f(1+alpha)+b) - alpha J_m K_d)",
            lhs,
            Relation::Le,
            rhs,
            mag(&[lhs, rhs]),
        ),
    ];
    Ok(ConditionReport::build("sdea-pp-spring", Configuration::SdeaPpSpring, ReportKind::Exact, rows))
}

/// Closed-form passivity conditions for whichever configuration `case` is.
pub fn passivity_conditions(case: &ClosedLoopCase) -> Result<ConditionReport> {
    let (p, g, kd) = (&case.plant, &case.gains, case.env.kd);
    match case.configuration()? {
        Configuration::SeaPpNull => thm_sea_pp_null(p, g),
        Configuration::SeaPpiNull => thm_sea_ppi_null(p, g),
        Configuration::SeaPpSpring => thm_sea_pp_spring(p, g, kd),
        Configuration::SdeaPpNull => thm_sdea_pp_null(p, g),
        Configuration::SdeaPpSpring => thm_sdea_pp_spring(p, g, kd),
    }
}

/// Iterations of the K_d bisection for SDEA plants.
pub const KVIR_BISECTION_STEPS: usize = 80;

/// Largest virtual stiffness `alpha/(alpha+1) K_d` that can be rendered
/// passively under P-P control.
///
/// For an SEA this is the filter stiffness `K` whenever some positive virtual
/// spring is renderable at all, and `0` otherwise. For an SDEA the discriminant
/// row is searched by bisection on `K_d` over `[0, 10 K]` (extended upward if
/// the upper end still passes) and the result is capped at `K`.
pub fn max_passive_virtual_stiffness(plant: &PlantParams, gains: &ControllerGains) -> Result<f64> {
    if gains.is_ppi() {
        return Err(Error::Configuration("virtual stiffness bound needs P-P control (I_m = 0)".into()));
    }
    plant.validate()?;
    let a = gains.alpha();
    if !plant.is_sdea() {
        let report = thm_sea_pp_spring(plant, gains, plant.k)?;
        let renderable = report.rows.iter().skip(1).all(|r| r.satisfied);
        return Ok(if renderable { plant.k } else { 0.0 });
    }

    let passes = |kd: f64| thm_sdea_pp_spring(plant, gains, kd).map(|r| r.passive).unwrap_or(false);
    let mut lo = plant.k * 1e-12;
    if !passes(lo) {
        return Ok(0.0);
    }
    let mut hi = 10.0 * plant.k;
    let mut extensions = 0;
    while passes(hi) {
        lo = hi;
        hi *= 2.0;
        extensions += 1;
        if extensions > 200 {
            return Err(Error::Monotonicity("spring rendering stays passive for unbounded K_d".into()));
        }
    }

    let coarse: Vec<bool> = (0..=64).map(|i| passes(lo + (hi - lo) * i as f64 / 64.0)).collect();
    if coarse.windows(2).any(|w| !w[0] && w[1]) {
        return Err(Error::Monotonicity(format!(
            "SDEA spring verdict is not monotone in K_d on [{lo}, {hi}]"
        )));
    }

    for _ in 0..KVIR_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(plant.k.min(a / (a + 1.0) * lo))
}

/// Nonnegativity conditions for every element of the realization of `case`.
pub fn feasibility_conditions(case: &ClosedLoopCase) -> Result<ConditionReport> {
    let (p, g) = (&case.plant, &case.gains);
    let a = g.alpha();
    let b = p.bm + g.gm;
    let cfg = case.configuration()?;
    let report = match cfg {
        Configuration::SeaPpNull | Configuration::SdeaPpNull => {
            let rows = vec![b_row("(i)", p, g, Relation::Ge), alpha_row("(ii)", g, Relation::Ge)];
            ConditionReport::build("realization-null-pp", cfg, ReportKind::Equivalent, rows)
        }
        Configuration::SeaPpiNull => {
            let bound = (a + 1.0) * (p.bm * g.gt - 1.0) / (g.gt * g.gt * g.im);
            let rows = vec![
                row("(i)", "G_t > 0", g.gt, Relation::Gt, 0.0, g.gt.abs().max(1.0 / p.bm)),
                alpha_row("(ii)", g, Relation::Gt),
                row("(iii)", "B_m G_t - 1 > 0", p.bm * g.gt - 1.0, Relation::Gt, 0.0, 1.0 + (p.bm * g.gt).abs()),
                row("(iv)", "I_m >= 0", g.im, Relation::Ge, 0.0, g.im.abs()),
                row("(v)", "J_m <= (alpha+1)(B_m G_t-1)/(G_t^2 I_m)", p.jm, Relation::Le, bound, mag(&[p.jm, bound])),
            ];
            ConditionReport::build("realization-sea-ppi-null", cfg, ReportKind::Sufficient, rows)
        }
        Configuration::SeaPpSpring | Configuration::SdeaPpSpring => {
            let kv = rendered_stiffness(g, case.env.kd);
            let mut rows = vec![
                alpha_row("(i)", g, Relation::Gt),
                row("(ii)", "alpha/(alpha+1) K_d > 0", kv, Relation::Gt, 0.0, mag(&[kv, p.k])),
                row("(iii)", "K - alpha/(alpha+1) K_d >= 0", p.k - kv, Relation::Ge, 0.0, mag(&[kv, p.k])),
            ];
            let (id, kind) = if cfg == Configuration::SeaPpSpring {
                rows.push(b_row("(iv)", p, g, Relation::Ge));
                ("realization-sea-pp-spring", ReportKind::Equivalent)
            } else {
                let lhs = p.jm * p.k / p.bf;
                rows.push(row("(iv)", "J_m K / B_f <= B_m + G_m", lhs, Relation::Le, b, mag(&[lhs, b])));
                ("realization-sdea-pp-spring", ReportKind::Sufficient)
            };
            ConditionReport::build(id, cfg, kind, rows)
        }
    };
    Ok(report)
}

/// Convenience wrapper building a case and returning its closed-form report.
pub fn check_case(plant: PlantParams, gains: ControllerGains, env: VirtualEnv) -> Result<ConditionReport> {
    passivity_conditions(&ClosedLoopCase::new(plant, gains, env)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sea() -> PlantParams {
        PlantParams::reference_sea()
    }

    fn sdea() -> PlantParams {
        PlantParams::reference_sdea()
    }

    fn g(gt: f64, gm: f64) -> ControllerGains {
        ControllerGains::pp(gt, gm)
    }

    #[test]
    fn sea_null_nominal_and_boundaries() {
        assert!(thm_sea_pp_null(&sea(), &g(5.0, 10.0)).unwrap().passive);
        let r = thm_sea_pp_null(&sea(), &g(5.0, -1.22)).unwrap();
        assert_eq!(r.rows[0].lhs, 0.0);
        assert!(r.rows[0].satisfied);
        assert!(!thm_sea_pp_null(&sea(), &g(5.0, -0.21)).unwrap().passive);
        assert!(thm_sea_pp_null(&sdea(), &g(5.0, 10.0)).is_err());
    }

    #[test]
    fn sea_ppi_bound() {
        let ok = thm_sea_ppi_null(&sea(), &ControllerGains::new(5.0, 10.0, 10.0).unwrap()).unwrap();
        assert!(ok.passive);
        assert!((ok.rows[0].rhs - 51.0 * 11.22 / 50.0).abs() < 1e-12);
        let bad = thm_sea_ppi_null(&sea(), &ControllerGains::new(5.0, 10.0, 60000.0).unwrap()).unwrap();
        assert!(!bad.passive);
        assert!(!bad.rows[0].satisfied);
        assert!(bad.rows[1..5].iter().all(|r| r.satisfied));
        // threshold on I_m where the bound becomes an equality
        let threshold: f64 = 51.0 * 11.22 / (5.0 * 0.002);
        assert!((threshold - 57222.0).abs() < 1.0);
    }

    #[test]
    fn sea_ppi_tiny_integral_matches_pp_verdict() {
        for gm in [10.0, -0.5, -2.0] {
            let pi = thm_sea_ppi_null(&sea(), &ControllerGains::new(5.0, gm, 1e-9).unwrap()).unwrap();
            let pp = thm_sea_pp_null(&sea(), &g(5.0, gm)).unwrap();
            assert_eq!(pi.passive, pp.passive, "G_m = {gm}");
        }
    }

    #[test]
    fn sea_spring_bound() {
        let r = thm_sea_pp_spring(&sea(), &g(5.0, 10.0), 150.0).unwrap();
        assert!(r.passive);
        assert!((r.rows[0].rhs - 50.0 / 51.0 * 150.0).abs() < 1e-12);
        let r = thm_sea_pp_spring(&sea(), &g(5.0, 10.0), 380.0).unwrap();
        assert!(!r.passive);
        assert!(!r.rows[0].satisfied);
        assert!((r.rows[0].rhs - 372.549).abs() < 1e-3);
        let neg = thm_sea_pp_spring(&sea(), &g(-5.0, -10.0), 150.0).unwrap();
        assert!(neg.rows[1].satisfied);
        assert!(!neg.passive); // B_m + G_m < 0
    }

    #[test]
    fn sdea_null() {
        assert!(thm_sdea_pp_null(&sdea(), &g(5.0, 10.0)).unwrap().passive);
        assert!(thm_sdea_pp_null(&sdea(), &g(5.0, -0.2)).unwrap().passive);
        assert!(!thm_sdea_pp_null(&sdea(), &g(5.0, -2.0)).unwrap().passive);
    }

    #[test]
    fn sdea_spring_discriminant_values() {
        let r = thm_sdea_pp_spring(&sdea(), &g(5.0, 10.0), 150.0).unwrap();
        assert!(r.passive);
        let v = &r.rows[4];
        assert!((v.lhs + 18.733).abs() < 1e-3, "{}", v.lhs);
        assert!((v.rhs - 198.5).abs() < 0.05, "{}", v.rhs);
        assert!(!thm_sdea_pp_spring(&sdea(), &g(5.0, 10.0), 380.0).unwrap().passive);
    }

    #[test]
    fn sdea_spring_small_damping_tracks_sea_rows() {
        let p = PlantParams { bf: 1e-9, ..sea() };
        for kd in [150.0, 380.0] {
            let s = thm_sdea_pp_spring(&p, &g(5.0, 10.0), kd).unwrap();
            let e = thm_sea_pp_spring(&sea(), &g(5.0, 10.0), kd).unwrap();
            for i in 0..3 {
                assert_eq!(s.rows[i].satisfied, e.rows[i].satisfied);
            }
            assert!(s.rows[4].lhs.abs() < 1e-3 || s.rows[4].lhs.is_nan());
        }
    }

    #[test]
    fn virtual_stiffness_bounds() {
        for gt in [15.0, 20.0, 25.0, 30.0] {
            let k = max_passive_virtual_stiffness(&PlantParams::experimental(), &g(gt, 0.0576)).unwrap();
            assert_eq!(k, 121.8);
        }
        assert_eq!(max_passive_virtual_stiffness(&sea(), &g(5.0, 10.0)).unwrap(), 360.0);
        assert_eq!(max_passive_virtual_stiffness(&sea(), &g(5.0, -10.0)).unwrap(), 0.0);
        let k = max_passive_virtual_stiffness(&sdea(), &g(5.0, 10.0)).unwrap();
        assert!(k > 0.0 && k <= 360.0);
        // just above the returned bound the rendering is no longer passive
        let a = 50.0;
        let kd = k * (a + 1.0) / a;
        assert!(thm_sdea_pp_spring(&sdea(), &g(5.0, 10.0), kd * 0.999).unwrap().passive);
        assert!(!thm_sdea_pp_spring(&sdea(), &g(5.0, 10.0), kd * 1.001).unwrap().passive || k == 360.0);
        assert!(max_passive_virtual_stiffness(&sea(), &ControllerGains::new(5.0, 10.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let ppi = ClosedLoopCase::new(sea(), ControllerGains::new(5.0, 10.0, 10.0).unwrap(), VirtualEnv::null()).unwrap();
        let r = feasibility_conditions(&ppi).unwrap();
        assert!(r.passive);
        assert!((r.rows[4].rhs - 1.0404).abs() < 1e-9);
        assert_eq!(r.kind, ReportKind::Sufficient);

        let sp = ClosedLoopCase::new(sdea(), g(5.0, 10.0), VirtualEnv::spring(150.0).unwrap()).unwrap();
        let r = feasibility_conditions(&sp).unwrap();
        assert!(r.passive);
        assert!((r.rows[3].lhs - 1.44).abs() < 1e-12);

        let low_gt = ClosedLoopCase::new(sea(), ControllerGains::new(0.5, 10.0, 10.0).unwrap(), VirtualEnv::null()).unwrap();
        assert!(!feasibility_conditions(&low_gt).unwrap().passive);
    }

    #[test]
    fn report_table_renders() {
        let r = thm_sea_pp_spring(&sea(), &g(5.0, 10.0), 380.0).unwrap();
        let text = r.to_string();
        assert!(text.contains("K >= alpha/(alpha+1) K_d"));
        assert!(text.contains("violated"));
    }
}
