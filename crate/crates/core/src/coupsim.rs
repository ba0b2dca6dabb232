//! Coupled-environment stability: the closed loop interconnected with a
//! passive inertia or spring at the interaction port, checked by eigenvalue
//! sweeps and by impulse simulations with a port-energy observer.
//!
//! Time-domain model (motor side, filter, cascaded controller):
//!
//! ```text
//! tau     = K (th_m - th_e) + B_f (w_m - w_e)
//! w_ref   = G_t (-K_d th_e - tau)
//! z'      = w_ref - w_m
//! J_m w_m' = G_m (w_ref - w_m) + I_m z - B_m w_m - tau
//! ```
//!
//! An inertial environment obeys `J_env w_e' = tau + u`; a spring environment
//! with a massless end-effector obeys `tau + u = K_env th_e`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::models::{z_out, ClosedLoopCase};
use crate::ratfun::{Polynomial, RationalFunction};
use crate::{Error, Result};

/// Spectral abscissa above which a coupled system counts as unstable.
pub const EPS_EIG: f64 = 1e-7;
/// Allowed negative port energy, relative to the impulse energy.
pub const EPS_ENERGY: f64 = 1e-6;
/// Relative width at which the destabilizing-environment bisection stops.
pub const ENV_BISECTION_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoupledEnvKind {
    Inertia,
    Spring,
}

impl std::str::FromStr for CoupledEnvKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inertia" => Ok(Self::Inertia),
            "spring" => Ok(Self::Spring),
            other => Err(Error::Domain(format!("unknown environment kind '{other}'"))),
        }
    }
}

/// Passive environment attached to the end-effector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledEnv {
    pub kind: CoupledEnvKind,
    pub value: f64,
}

impl CoupledEnv {
    pub fn new(kind: CoupledEnvKind, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain(format!("environment value must be positive and finite, got {value}")));
        }
        Ok(Self { kind, value })
    }

    pub fn inertia(j: f64) -> Result<Self> {
        Self::new(CoupledEnvKind::Inertia, j)
    }

    pub fn spring(k: f64) -> Result<Self> {
        Self::new(CoupledEnvKind::Spring, k)
    }

    /// `J s` or `K / s`.
    pub fn impedance(&self) -> RationalFunction {
        match self.kind {
            CoupledEnvKind::Inertia => RationalFunction { num: Polynomial::monomial(self.value, 1), den: Polynomial::constant(1.0) },
            CoupledEnvKind::Spring => RationalFunction { num: Polynomial::constant(self.value), den: Polynomial::monomial(1.0, 1) },
        }
    }
}

/// Continuous-time LTI model `x' = A x + B u`, `y = C x + D u`.
/// The single input is an exogenous end-effector torque. Outputs are the
/// port variable (`w_end` for an inertia, `th_end` for a spring), `w_m` and
/// `tau_sea`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub state_labels: Vec<&'static str>,
    pub output_labels: Vec<&'static str>,
}

pub const OUT_PORT: usize = 0;
pub const OUT_OMEGA_M: usize = 1;
pub const OUT_TAU: usize = 2;

impl StateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.order() == 0 {
            return Vec::new();
        }
        self.a.clone().complex_eigenvalues().iter().copied().collect()
    }

    /// Largest real part of the spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `C_i (jw I - A)^{-1} B_j + D_ij`.
    pub fn frequency_response(&self, output: usize, input: usize, omega: f64) -> Result<Complex64> {
        let n = self.order();
        let jw = Complex64::new(0.0, omega);
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let a = Complex64::new(-self.a[(i, j)], 0.0);
            if i == j {
                a + jw
            } else {
                a
            }
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[(i, input)], 0.0));
        let x = m.lu().solve(&rhs).ok_or(Error::PoleProximity { omega, pole: jw })?;
        let mut y = Complex64::new(self.d[(output, input)], 0.0);
        for i in 0..n {
            y += self.c[(output, i)] * x[i];
        }
        Ok(y)
    }
}

/// Linear combination of states plus a feedthrough from `u`.
#[derive(Clone, Debug)]
struct Signal {
    x: Vec<f64>,
    u: f64,
}

impl Signal {
    fn zero(n: usize) -> Self {
        Self { x: vec![0.0; n], u: 0.0 }
    }
    fn state(n: usize, i: usize) -> Self {
        let mut s = Self::zero(n);
        s.x[i] = 1.0;
        s
    }
    fn axpy(mut self, a: f64, other: &Signal) -> Self {
        for (v, o) in self.x.iter_mut().zip(&other.x) {
            *v += a * o;
        }
        self.u += a * other.u;
        self
    }
    fn scaled(&self, a: f64) -> Self {
        Signal::zero(self.x.len()).axpy(a, self)
    }
}

struct Builder {
    n: usize,
    rows: Vec<Option<Signal>>,
}

impl Builder {
    fn set(&mut self, i: usize, s: Signal) {
        self.rows[i] = Some(s);
    }
    fn finish(self, outputs: [Signal; 3], state_labels: Vec<&'static str>, port_label: &'static str) -> StateSpace {
        let n = self.n;
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, 1);
        for (i, r) in self.rows.into_iter().enumerate() {
            let r = r.expect("every state has a derivative");
            for j in 0..n {
                a[(i, j)] = r.x[j];
            }
            b[(i, 0)] = r.u;
        }
        let mut c = DMatrix::zeros(3, n);
        let mut d = DMatrix::zeros(3, 1);
        for (i, o) in outputs.iter().enumerate() {
            for j in 0..n {
                c[(i, j)] = o.x[j];
            }
            d[(i, 0)] = o.u;
        }
        StateSpace { a, b, c, d, state_labels, output_labels: vec![port_label, "omega_m", "tau_sea"] }
    }
}

/// State-space model of the case coupled to `env`.
///
/// Inertia: states `(delta, w_m, w_end[, th_end][, z])`, where `th_end` is
/// kept only for spring rendering and `z` only for P-PI control.
/// Spring: states `(th_m, w_m[, th_end][, z])`, with `th_end` algebraic for an
/// SEA because the end-effector is massless.
pub fn coupled_statespace(case: &ClosedLoopCase, env: CoupledEnv) -> Result<StateSpace> {
    case.configuration()?;
    let (p, g) = (&case.plant, &case.gains);
    let kd = case.env.effective_kd();
    let ppi = g.is_ppi();
    let rendering_spring = kd != 0.0;

    let mut labels = Vec::new();
    let idx = |name: &'static str, labels: &mut Vec<&'static str>| {
        labels.push(name);
        labels.len() - 1
    };

    match env.kind {
        CoupledEnvKind::Inertia => {
            let i_d = idx("delta", &mut labels);
            let i_wm = idx("omega_m", &mut labels);
            let i_we = idx("omega_end", &mut labels);
            let i_te = rendering_spring.then(|| idx("theta_end", &mut labels));
            let i_z = ppi.then(|| idx("z", &mut labels));
            let n = labels.len();
            let st = |i| Signal::state(n, i);

            let tau = st(i_d).scaled(p.k).axpy(p.bf, &st(i_wm)).axpy(-p.bf, &st(i_we));
            let mut tau_d = Signal::zero(n);
            if let Some(i) = i_te {
                tau_d = st(i).scaled(-kd);
            }
            let w_ref = tau_d.axpy(-1.0, &tau).scaled(g.gt);

            let mut bld = Builder { n, rows: vec![None; n] };
            bld.set(i_d, st(i_wm).axpy(-1.0, &st(i_we)));
            let mut motor = w_ref.scaled(g.gm).axpy(-(g.gm + p.bm), &st(i_wm)).axpy(-1.0, &tau);
            if let Some(i) = i_z {
                motor = motor.axpy(g.im, &st(i));
                bld.set(i, w_ref.clone().axpy(-1.0, &st(i_wm)));
            }
            bld.set(i_wm, motor.scaled(1.0 / p.jm));
            let mut end = tau.clone();
            end.u += 1.0;
            bld.set(i_we, end.scaled(1.0 / env.value));
            if let Some(i) = i_te {
                bld.set(i, st(i_we));
            }
            Ok(bld.finish([st(i_we), st(i_wm), tau], labels, "omega_end"))
        }
        CoupledEnvKind::Spring => {
            let ke = env.value;
            let i_tm = idx("theta_m", &mut labels);
            let i_wm = idx("omega_m", &mut labels);
            let i_te = p.is_sdea().then(|| idx("theta_end", &mut labels));
            let i_z = ppi.then(|| idx("z", &mut labels));
            let n = labels.len();
            let st = |i| Signal::state(n, i);

            let theta_e = match i_te {
                Some(i) => st(i),
                None => {
                    // K (th_m - th_e) + u = K_env th_e
                    let mut s = st(i_tm).scaled(p.k / (p.k + ke));
                    s.u = 1.0 / (p.k + ke);
                    s
                }
            };
            // tau + u = K_env th_e
            let mut tau = theta_e.scaled(ke);
            tau.u -= 1.0;
            let w_ref = theta_e.scaled(-kd).axpy(-1.0, &tau).scaled(g.gt);

            let mut bld = Builder { n, rows: vec![None; n] };
            bld.set(i_tm, st(i_wm));
            let mut motor = w_ref.scaled(g.gm).axpy(-(g.gm + p.bm), &st(i_wm)).axpy(-1.0, &tau);
            if let Some(i) = i_z {
                motor = motor.axpy(g.im, &st(i));
                bld.set(i, w_ref.clone().axpy(-1.0, &st(i_wm)));
            }
            bld.set(i_wm, motor.scaled(1.0 / p.jm));
            if let Some(i) = i_te {
                // B_f w_e = K (th_m - th_e) + B_f w_m + u - K_env th_e
                let mut we = st(i_tm).scaled(p.k).axpy(-(p.k + ke), &st(i)).axpy(p.bf, &st(i_wm)).scaled(1.0 / p.bf);
                we.u = 1.0 / p.bf;
                bld.set(i, we);
            }
            Ok(bld.finish([theta_e, st(i_wm), tau], labels, "theta_end"))
        }
    }
}

/// Transfer function the coupled model must reproduce from `u` to its port
/// output: `1 / (Z_out + J s)` for an inertia, `1 / (s Z_out + K_env)` for a
/// spring (position output).
pub fn coupled_reference(case: &ClosedLoopCase, env: CoupledEnv) -> Result<RationalFunction> {
    let z = z_out(case)?;
    let sum = match env.kind {
        CoupledEnvKind::Inertia => z.add(&env.impedance()),
        CoupledEnvKind::Spring => z.mul(&RationalFunction::s()).add(&RationalFunction::constant(env.value)),
    };
    Ok(sum.normalize().recip()?.normalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub value: f64,
    pub spectral_abscissa: f64,
    pub unstable: bool,
}

/// Spectral abscissa of the coupled system against environment value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityMap {
    pub kind: CoupledEnvKind,
    pub eps_eig: f64,
    pub points: Vec<StabilityPoint>,
}

impl StabilityMap {
    pub fn any_unstable(&self) -> bool {
        self.points.iter().any(|p| p.unstable)
    }

    /// One-sided reading: a clean sweep is not a proof of passivity.
    pub fn summary(&self) -> String {
        match self.points.iter().find(|p| p.unstable) {
            Some(p) => format!("unstable at {:?} value {:.6e} (max Re = {:.3e})", self.kind, p.value, p.spectral_abscissa),
            None => "no destabilizing environment found in grid".to_string(),
        }
    }
}

/// `n` log-spaced environment values on `[1e-6, 1e3]`.
pub fn default_env_grid() -> Vec<f64> {
    log_grid(1e-6, 1e3, 60)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn abscissa_at(case: &ClosedLoopCase, kind: CoupledEnvKind, value: f64) -> Result<f64> {
    Ok(coupled_statespace(case, CoupledEnv::new(kind, value)?)?.spectral_abscissa())
}

pub fn eig_sweep(case: &ClosedLoopCase, kind: CoupledEnvKind, values: &[f64]) -> Result<StabilityMap> {
    let points = values
        .iter()
        .map(|&v| {
            let sa = abscissa_at(case, kind, v)?;
            Ok(StabilityPoint { value: v, spectral_abscissa: sa, unstable: sa > EPS_EIG })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityMap { kind, eps_eig: EPS_EIG, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestabilizingEnv {
    pub kind: CoupledEnvKind,
    pub value: f64,
    pub spectral_abscissa: f64,
    /// Stable value just below `value` when refined; `None` when the
    /// smallest grid value is already unstable.
    pub stable_below: Option<f64>,
}

/// Smallest unstable environment on `grid`, refined by log-space bisection
/// against the preceding stable grid value.
pub fn find_destabilizing_env(case: &ClosedLoopCase, kind: CoupledEnvKind, grid: &[f64]) -> Result<Option<DestabilizingEnv>> {
    let map = eig_sweep(case, kind, grid)?;
    let Some(first) = map.points.iter().position(|p| p.unstable) else {
        return Ok(None);
    };
    let hit = map.points[first];
    if first == 0 {
        return Ok(Some(DestabilizingEnv { kind, value: hit.value, spectral_abscissa: hit.spectral_abscissa, stable_below: None }));
    }
    let (mut lo, mut hi, mut sa_hi) = (map.points[first - 1].value, hit.value, hit.spectral_abscissa);
    while hi / lo - 1.0 > ENV_BISECTION_TOL {
        let mid = (lo * hi).sqrt();
        let sa = abscissa_at(case, kind, mid)?;
        if sa > EPS_EIG {
            hi = mid;
            sa_hi = sa;
        } else {
            lo = mid;
        }
    }
    Ok(Some(DestabilizingEnv { kind, value: hi, spectral_abscissa: sa_hi, stable_below: Some(lo) }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Step size; `None` picks `min(1e-4, 0.01 / max |lambda|)`.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Upper bound on stored samples; the step loop is not decimated.
    pub max_samples: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { dt: None, t_end: 1.0, max_samples: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub dt: f64,
    pub impulse: f64,
    pub t: Vec<f64>,
    pub omega_m: Vec<f64>,
    pub omega_end: Vec<f64>,
    pub tau_sea: Vec<f64>,
    /// Energy absorbed by the actuator port, `int tau_sea (-w_end) dt`.
    pub energy: Vec<f64>,
    pub state_norm: Vec<f64>,
    /// Time at which the state left the representable range.
    pub diverged_at: Option<f64>,
}

impl Simulation {
    /// Kinetic energy injected by the impulse.
    pub fn impulse_energy(&self, j_env: f64) -> f64 {
        self.impulse * self.impulse / (2.0 * j_env)
    }

    pub fn min_energy(&self) -> f64 {
        self.energy.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Least-squares slope of `ln |x|` over the second half of the run.
    pub fn growth_rate(&self) -> Option<f64> {
        let end = *self.t.last()?;
        let pts: Vec<(f64, f64)> = self
            .t
            .iter()
            .zip(&self.state_norm)
            .filter(|(t, n)| **t >= end / 2.0 && **n > 0.0 && n.is_finite())
            .map(|(t, n)| (*t, n.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let k = pts.len() as f64;
        let (mt, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

/// Step size resolving the fastest coupled mode.
pub fn default_dt(ss: &StateSpace) -> f64 {
    let fastest = ss.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
    if fastest > 0.0 {
        (0.01 / fastest).min(1e-4)
    } else {
        1e-4
    }
}

/// Response to an impulsive end-effector torque of the given magnitude,
/// integrated by fixed-step RK4 with the port energy as an extra state.
pub fn simulate(case: &ClosedLoopCase, env: CoupledEnv, impulse: f64, opts: SimOptions) -> Result<Simulation> {
    if env.kind != CoupledEnvKind::Inertia {
        return Err(Error::Configuration("impulse simulation needs an inertial environment".into()));
    }
    if !impulse.is_finite() {
        return Err(Error::Domain("impulse must be finite".into()));
    }
    let ss = coupled_statespace(case, env)?;
    let dt = opts.dt.unwrap_or_else(|| default_dt(&ss));
    if !(dt > 0.0 && dt.is_finite()) || !(opts.t_end > dt) {
        return Err(Error::Domain(format!("need dt > 0 and T > dt, got dt = {dt}, T = {}", opts.t_end)));
    }
    let n = ss.order();
    let a = &ss.a;
    let c_tau = ss.c.row(OUT_TAU).clone_owned();
    let c_we = ss.c.row(OUT_PORT).clone_owned();
    let c_wm = ss.c.row(OUT_OMEGA_M).clone_owned();

    // state plus energy
    let rhs = |x: &DVector<f64>| -> (DVector<f64>, f64) {
        let tau = (&c_tau * x)[0];
        let we = (&c_we * x)[0];
        (a * x, -tau * we)
    };

    let steps = (opts.t_end / dt).ceil() as usize;
    let stride = steps.div_ceil(opts.max_samples.max(2) - 1).max(1);
    let mut x = DVector::from_fn(n, |i, _| ss.b[(i, 0)] * impulse);
    let mut e = 0.0;
    let mut sim = Simulation {
        dt,
        impulse,
        t: Vec::new(),
        omega_m: Vec::new(),
        omega_end: Vec::new(),
        tau_sea: Vec::new(),
        energy: Vec::new(),
        state_norm: Vec::new(),
        diverged_at: None,
    };
    let record = |t: f64, x: &DVector<f64>, e: f64, sim: &mut Simulation| {
        sim.t.push(t);
        sim.omega_m.push((&c_wm * x)[0]);
        sim.omega_end.push((&c_we * x)[0]);
        sim.tau_sea.push((&c_tau * x)[0]);
        sim.energy.push(e);
        sim.state_norm.push(x.norm());
    };
    record(0.0, &x, e, &mut sim);
    for k in 1..=steps {
        let (k1, e1) = rhs(&x);
        let (k2, e2) = rhs(&(&x + &k1 * (dt / 2.0)));
        let (k3, e3) = rhs(&(&x + &k2 * (dt / 2.0)));
        let (k4, e4) = rhs(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        e += (e1 + 2.0 * e2 + 2.0 * e3 + e4) * (dt / 6.0);
        let t = k as f64 * dt;
        let norm = x.norm();
        if !norm.is_finite() || norm > 1e150 {
            sim.diverged_at = Some(t);
            log::debug!("trajectory left the representable range at t = {t}");
            break;
        }
        if k % stride == 0 || k == steps {
            record(t, &x, e, &mut sim);
        }
    }
    Ok(sim)
}

/// Simulated versus eigenvalue-predicted growth of the dominant mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub env: CoupledEnv,
    pub spectral_abscissa: f64,
    pub measured: f64,
    pub rel_error: f64,
    pub t_end: f64,
}

/// Simulates an impulse long enough for the dominant mode to grow or decay by
/// `e_folds` and compares the fitted rate with the spectral abscissa.
pub fn growth_check(case: &ClosedLoopCase, env: CoupledEnv, e_folds: f64) -> Result<GrowthCheck> {
    let sa = coupled_statespace(case, env)?.spectral_abscissa();
    if sa.abs() <= EPS_EIG {
        return Err(Error::Domain("dominant mode is marginal, no growth rate to measure".into()));
    }
    let t_end = e_folds / sa.abs();
    let sim = simulate(case, env, 1.0, SimOptions { dt: None, t_end, max_samples: 20_000 })?;
    let measured = sim.growth_rate().ok_or_else(|| Error::Domain("too few samples to fit a growth rate".into()))?;
    Ok(GrowthCheck { env, spectral_abscissa: sa, measured, rel_error: (measured - sa).abs() / sa.abs(), t_end })
}

/// Grid point with the largest spectral abscissa.
pub fn most_unstable(map: &StabilityMap) -> Option<StabilityPoint> {
    map.points.iter().copied().filter(|p| p.unstable).max_by(|a, b| a.spectral_abscissa.total_cmp(&b.spectral_abscissa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;

    fn sea_spring(kd: f64) -> ClosedLoopCase {
        ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(kd).unwrap()).unwrap()
    }

    fn all_cases() -> Vec<ClosedLoopCase> {
        let ppi = ControllerGains::new(5.0, 10.0, 10.0).unwrap();
        let pp = ControllerGains::pp(5.0, 10.0);
        vec![
            ClosedLoopCase::new(PlantParams::reference_sea(), pp, VirtualEnv::null()).unwrap(),
            ClosedLoopCase::new(PlantParams::reference_sea(), ppi, VirtualEnv::null()).unwrap(),
            sea_spring(150.0),
            ClosedLoopCase::new(PlantParams::reference_sdea(), pp, VirtualEnv::null()).unwrap(),
            ClosedLoopCase::new(PlantParams::reference_sdea(), pp, VirtualEnv::spring(150.0).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn state_counts() {
        let c = all_cases();
        let j = CoupledEnv::inertia(0.01).unwrap();
        assert_eq!(coupled_statespace(&c[0], j).unwrap().order(), 3);
        assert_eq!(coupled_statespace(&c[1], j).unwrap().order(), 4);
        assert_eq!(coupled_statespace(&c[2], j).unwrap().order(), 4);
    }

    #[test]
    fn transfer_matches_impedance_sum() {
        let grid = log_grid(1e-2, 1e5, 100);
        for case in all_cases() {
            for env in [CoupledEnv::inertia(0.01).unwrap(), CoupledEnv::spring(50.0).unwrap()] {
                let ss = coupled_statespace(&case, env).unwrap();
                let reference = coupled_reference(&case, env).unwrap();
                for &w in &grid {
                    let a = ss.frequency_response(OUT_PORT, 0, w).unwrap();
                    let b = reference.eval_jw(w).unwrap();
                    assert!((a - b).norm() <= 1e-8 * b.norm(), "{:?} {env:?} w={w}: {a} vs {b}", case.configuration());
                }
            }
        }
    }

    #[test]
    fn spring_rendering_stability_threshold() {
        // stable iff (1 + alpha) K > alpha K_d, independent of J_env
        let grid = default_env_grid();
        assert!(!eig_sweep(&sea_spring(150.0), CoupledEnvKind::Inertia, &grid).unwrap().any_unstable());
        assert!(!eig_sweep(&sea_spring(360.0), CoupledEnvKind::Inertia, &grid).unwrap().any_unstable());
        let bad = eig_sweep(&sea_spring(380.0), CoupledEnvKind::Inertia, &grid).unwrap();
        assert!(bad.points.iter().all(|p| p.unstable));
        assert_eq!(find_destabilizing_env(&sea_spring(150.0), CoupledEnvKind::Inertia, &grid).unwrap(), None);
        assert!(find_destabilizing_env(&sea_spring(380.0), CoupledEnvKind::Inertia, &grid).unwrap().is_some());
    }

    #[test]
    fn lossless_sdea_null_is_marginal_at_worst() {
        let case = ClosedLoopCase::new(PlantParams::reference_sdea(), ControllerGains::pp(-0.1, 10.0), VirtualEnv::null()).unwrap();
        assert!((case.alpha() + 1.0).abs() < 1e-15);
        for &j in &default_env_grid() {
            let sa = coupled_statespace(&case, CoupledEnv::inertia(j).unwrap()).unwrap().spectral_abscissa();
            assert!(sa <= EPS_EIG, "J_env = {j}: {sa}");
        }
    }

    #[test]
    fn tiny_inertia_recovers_free_end_poles() {
        let case = &all_cases()[1];
        let zeros = z_out(case).unwrap().zeros().unwrap();
        let eig = coupled_statespace(case, CoupledEnv::inertia(1e-10).unwrap()).unwrap().eigenvalues();
        for z in zeros {
            let d = eig.iter().map(|l| (l - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-3 * z.norm().max(1.0), "zero {z} not found in {eig:?}");
        }
    }

    #[test]
    fn simulated_growth_matches_eigenvalues() {
        let case = sea_spring(380.0);
        let map = eig_sweep(&case, CoupledEnvKind::Inertia, &default_env_grid()).unwrap();
        let worst = most_unstable(&map).unwrap();
        let g = growth_check(&case, CoupledEnv::inertia(worst.value).unwrap(), 20.0).unwrap();
        assert!(g.rel_error < 0.05, "{g:?}");
    }

    #[test]
    fn bisection_brackets_the_onset() {
        let case = ClosedLoopCase::new(PlantParams::reference_sdea(), ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(800.0).unwrap()).unwrap();
        let hit = find_destabilizing_env(&case, CoupledEnvKind::Inertia, &default_env_grid()).unwrap().unwrap();
        let lo = hit.stable_below.unwrap();
        assert!(hit.value / lo - 1.0 <= ENV_BISECTION_TOL);
        assert!(abscissa_at(&case, CoupledEnvKind::Inertia, hit.value).unwrap() > EPS_EIG);
        assert!(abscissa_at(&case, CoupledEnvKind::Inertia, hit.value / 1.01).unwrap() <= EPS_EIG);
    }

    #[test]
    fn zero_impulse_stays_at_rest() {
        let sim = simulate(&all_cases()[0], CoupledEnv::inertia(0.01).unwrap(), 0.0, SimOptions { dt: None, t_end: 0.05, max_samples: 100 }).unwrap();
        assert!(sim.state_norm.iter().all(|&n| n == 0.0));
        assert!(sim.energy.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn passive_case_absorbs_energy() {
        let env = CoupledEnv::inertia(0.01).unwrap();
        let sim = simulate(&all_cases()[0], env, 1.0, SimOptions { dt: None, t_end: 0.5, max_samples: 2000 }).unwrap();
        assert!(sim.diverged_at.is_none());
        assert!(sim.min_energy() >= -EPS_ENERGY * sim.impulse_energy(0.01));
        assert!(sim.growth_rate().unwrap() < 0.0);
    }

    #[test]
    fn bad_options_rejected() {
        let env = CoupledEnv::inertia(0.01).unwrap();
        let opts = SimOptions { dt: Some(0.1), t_end: 0.05, max_samples: 10 };
        assert!(simulate(&all_cases()[0], env, 1.0, opts).is_err());
        assert!(simulate(&all_cases()[0], CoupledEnv::spring(1.0).unwrap(), 1.0, SimOptions::default()).is_err());
        assert!(CoupledEnv::inertia(0.0).is_err());
    }
}
