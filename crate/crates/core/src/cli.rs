//! Command-line front end. `run` parses arguments, dispatches a subcommand
//! and returns the process exit code: 0 on success (passive, feasible),
//! 2 for a non-passive or infeasible result, 1 on any error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, FrequencyGrid, FrequencyRow};
use crate::conditions::{self, ConditionReport};
use crate::coupsim::{self, CoupledEnv, CoupledEnvKind};
use crate::models::{reflect_through_gear, z_out, ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};
use crate::passivity::{self, PassivityVerdict};
use crate::synthesis::{self, Feasibility, MechNetwork};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

/// Transmission between motor and filter, reflected onto the actuator side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gear {
    pub n: f64,
}

/// Case description read from `--config`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plant: PlantParams,
    pub gains: ControllerGains,
    pub env: VirtualEnv,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gear: Option<Gear>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.case()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The case seen at the interaction port, after gear reflection.
    pub fn case(&self) -> Result<ClosedLoopCase> {
        let (plant, gains) = match self.gear {
            Some(g) if g.n != 1.0 => reflect_through_gear(&self.plant, &self.gains, g.n)?,
            _ => (self.plant, self.gains),
        };
        ClosedLoopCase::new(plant, gains, self.env).map_err(|e| Error::Config(e.to_string()))
    }
}

/// `lo:hi:n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got '{s}'"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
        let n: usize = n.trim().parse().map_err(|e| format!("bad point count: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && hi >= lo && n >= 1) {
            return Err(format!("invalid grid '{s}'"));
        }
        Ok(Self { lo, hi, n })
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl GridSpec {
    pub fn linear(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64).collect()
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::log_spaced(self.lo, self.hi, self.n)
    }
}

fn default_freq_grid() -> GridSpec {
    GridSpec { lo: analysis::DEFAULT_GRID_LO, hi: analysis::DEFAULT_GRID_HI, n: analysis::DEFAULT_GRID_POINTS }
}

#[derive(Parser, Debug)]
#[command(name = "elastpass", version, about = "Passivity, passive realizations and rendering performance of series (damped) elastic actuators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide passivity with the positive-real engine and the closed-form conditions.
    Check(CheckArgs),
    /// Build the passive spring/damper/inerter equivalent.
    Realize(RealizeArgs),
    /// Frequency response of the output impedance.
    Bode(FreqArgs),
    /// Effective damping, stiffness and inertance over frequency.
    Effective(EffectiveArgs),
    /// Impulse response when coupled to an inertial environment.
    Simulate(SimulateArgs),
    /// Passivity maps over gain grids, or coupled stability over environments.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Case JSON: {plant:{Jm,Bm,K,Bf}, gains:{Gt,Gm,Im}, env:{kind,Kd}, gear:{n}}.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Print the closed-form condition table.
    #[arg(long)]
    pub closed_form: bool,
    /// Use only the positive-real engine.
    #[arg(long, conflicts_with = "closed_form")]
    pub engine: bool,
}

#[derive(Args, Debug)]
pub struct RealizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also write the network as a Graphviz file.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FreqArgs {
    #[command(flatten)]
    pub common: Common,
    /// Log-spaced frequency grid, rad/s.
    #[arg(long, default_value_t = default_freq_grid())]
    pub grid: GridSpec,
}

#[derive(Args, Debug)]
pub struct EffectiveArgs {
    #[command(flatten)]
    pub freq: FreqArgs,
    /// Decompose the parasitic part (filter and rendered spring removed).
    #[arg(long)]
    pub parasitic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnvKindArg {
    Inertia,
    Spring,
}

impl From<EnvKindArg> for CoupledEnvKind {
    fn from(k: EnvKindArg) -> Self {
        match k {
            EnvKindArg::Inertia => CoupledEnvKind::Inertia,
            EnvKindArg::Spring => CoupledEnvKind::Spring,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = EnvKindArg::Inertia)]
    pub env_kind: EnvKindArg,
    /// Environment inertia, kg m^2.
    #[arg(long, default_value_t = 0.01)]
    pub env_value: f64,
    /// Angular impulse applied to the end-effector, N m s.
    #[arg(long, default_value_t = 1.0)]
    pub impulse: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Step size; resolved from the fastest mode when omitted.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxes {
    /// Torque gain against rendered stiffness (P-P spring rendering).
    GtKvir,
    /// Torque gain against integral gain (P-PI null rendering).
    GtIm,
    /// Environment value against coupled stability.
    Env,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = SweepAxes::GtKvir)]
    pub axes: SweepAxes,
    /// Linear torque-gain grid.
    #[arg(long, default_value = "1:40:40")]
    pub gt: GridSpec,
    /// Linear grid of the second axis; defaults to `0.5K:1.5K:101` for
    /// stiffness and `0.1:10:100` for the integral gain.
    #[arg(long)]
    pub y: Option<GridSpec>,
    #[arg(long, value_enum, default_value_t = EnvKindArg::Inertia)]
    pub env_kind: EnvKindArg,
    /// Log-spaced environment grid.
    #[arg(long, default_value = "1e-6:1e3:60")]
    pub env_grid: GridSpec,
}

/// Settings echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub eps_rhp: f64,
    pub eps_res: f64,
    pub eps_eig: f64,
    pub eps_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

impl Meta {
    fn new(command: &str, grid: Option<String>) -> Self {
        Self {
            tool: "elastpass".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            eps_rhp: passivity::EPS_RHP,
            eps_res: passivity::EPS_RES,
            eps_eig: coupsim::EPS_EIG,
            eps_energy: coupsim::EPS_ENERGY,
            grid,
        }
    }

    fn csv_header(&self, cfg: &RunConfig) -> Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {} {}", self.tool, self.version, self.command);
        let _ = writeln!(s, "# config: {}", serde_json::to_string(cfg)?);
        if let Some(g) = &self.grid {
            let _ = writeln!(s, "# grid: {g}");
        }
        let _ = writeln!(
            s,
            "# eps_rhp={} eps_res={} eps_eig={} eps_energy={}",
            self.eps_rhp, self.eps_res, self.eps_eig, self.eps_energy
        );
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub meta: Meta,
    pub config: RunConfig,
    pub configuration: String,
    pub passive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<PassivityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ConditionReport>,
    /// Engine and closed-form verdicts coincide, when both were computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizeOutput {
    pub meta: Meta,
    pub config: RunConfig,
    pub configuration: String,
    pub network: MechNetwork,
    pub feasibility: Feasibility,
    /// `(inerter, damper)` of the parasitic branch.
    pub parasitic_pair: Option<(f64, f64)>,
    pub impedance_num: Vec<f64>,
    pub impedance_den: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub meta: Meta,
    pub env: CoupledEnv,
    pub dt: f64,
    pub spectral_abscissa: f64,
    pub growth_rate: Option<f64>,
    pub min_energy: f64,
    pub impulse_energy: f64,
    pub diverged_at: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub gt: f64,
    /// Rendered stiffness or integral gain, depending on the axes.
    pub y: f64,
    pub kd: f64,
    pub engine_passive: Option<bool>,
    pub closed_form_passive: Option<bool>,
    pub closed_form_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvSweepOutput {
    pub meta: Meta,
    pub config: RunConfig,
    pub map: coupsim::StabilityMap,
    pub destabilizing: Option<coupsim::DestabilizingEnv>,
    pub summary: String,
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn csv_bytes<T: Serialize>(header: String, rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(header.into_bytes());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Reads a CSV written by this tool, skipping `#` header lines.
pub fn read_csv<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn cmd_check(cfg: &RunConfig, closed_form_only: bool, engine_only: bool) -> Result<CheckOutput> {
    let case = cfg.case()?;
    let cfgn = case.configuration()?;
    let engine = (!closed_form_only).then(|| z_out(&case).map(|z| passivity::is_positive_real(&z))).transpose()?;
    let closed_form = (!engine_only).then(|| conditions::passivity_conditions(&case)).transpose()?;
    let passive = match (&engine, &closed_form) {
        (Some(e), _) => e.passive,
        (None, Some(c)) => c.passive,
        (None, None) => unreachable!("at least one verdict is computed"),
    };
    let agree = match (&engine, &closed_form) {
        (Some(e), Some(c)) => Some(e.passive == c.passive),
        _ => None,
    };
    if agree == Some(false) {
        log::warn!("engine and closed-form verdicts disagree for {cfgn}");
    }
    Ok(CheckOutput {
        meta: Meta::new("check", None),
        config: *cfg,
        configuration: cfgn.label().into(),
        passive,
        engine,
        closed_form,
        agree,
    })
}

pub fn cmd_realize(cfg: &RunConfig) -> Result<RealizeOutput> {
    let case = cfg.case()?;
    let cfgn = case.configuration()?;
    let network = synthesis::realize(&case)?;
    let z = synthesis::network_impedance(&network)?;
    Ok(RealizeOutput {
        meta: Meta::new("realize", None),
        config: *cfg,
        configuration: cfgn.label().into(),
        feasibility: synthesis::feasibility(&network),
        parasitic_pair: synthesis::parasitic_pair(&network, cfgn),
        impedance_num: z.num.coeffs().to_vec(),
        impedance_den: z.den.coeffs().to_vec(),
        network,
    })
}

/// Element table in the layout used for published parameter studies.
pub fn element_table(out: &RealizeOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", out.configuration);
    if let Some((inerter, damper)) = out.parasitic_pair {
        let _ = writeln!(s, "  parasitic inerter {inerter:.3e} kg m^2, damper {damper:.3} N m s/rad");
    }
    let _ = writeln!(s, "  {:<26} {:<8} {:>14}", "element", "kind", "value");
    for e in out.network.elements() {
        let _ = writeln!(s, "  {:<26} {:<8} {:>14.6e}", e.label, format!("{:?}", e.kind).to_lowercase(), e.value);
    }
    let _ = write!(s, "  feasible: {}", out.feasibility.feasible);
    s
}

pub fn cmd_frequency(cfg: &RunConfig, grid: &GridSpec, parasitic: bool) -> Result<Vec<FrequencyRow>> {
    let case = cfg.case()?;
    let z = if parasitic { analysis::parasitic_impedance(&case)? } else { z_out(&case)? };
    analysis::frequency_table(&z, &grid.frequency_grid()?)
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    omega_m: f64,
    omega_end: f64,
    tau_sea: f64,
    energy: f64,
}

pub fn cmd_simulate(cfg: &RunConfig, args: &SimulateArgs) -> Result<(coupsim::Simulation, SimulationSummary)> {
    let case = cfg.case()?;
    let env = CoupledEnv::new(args.env_kind.into(), args.env_value)?;
    let sa = coupsim::coupled_statespace(&case, env)?.spectral_abscissa();
    let opts = coupsim::SimOptions { dt: args.dt, t_end: args.t_end, ..Default::default() };
    let sim = coupsim::simulate(&case, env, args.impulse, opts)?;
    let summary = SimulationSummary {
        meta: Meta::new("simulate", None),
        env,
        dt: sim.dt,
        spectral_abscissa: sa,
        growth_rate: sim.growth_rate(),
        min_energy: sim.min_energy(),
        impulse_energy: sim.impulse_energy(env.value),
        diverged_at: sim.diverged_at,
    };
    Ok((sim, summary))
}

/// Engine and closed-form verdicts over a rectangular gain grid. For
/// `GtKvir`, `y` is the rendered stiffness and `K_d` is recovered from it;
/// for `GtIm`, `y` is the velocity-loop integral gain.
pub fn boundary_sweep(base: &ClosedLoopCase, axes: SweepAxes, gt: &[f64], y: &[f64]) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::with_capacity(gt.len() * y.len());
    for &g in gt {
        for &v in y {
            let mut case = *base;
            case.gains.gt = g;
            let kd = match axes {
                SweepAxes::GtKvir => {
                    if case.gains.is_ppi() {
                        return Err(Error::Configuration("stiffness sweeps need P-P gains (I_m = 0)".into()));
                    }
                    let a = case.gains.alpha();
                    let kd = v * (a + 1.0) / a;
                    case.env = VirtualEnv { kind: crate::models::EnvKind::Spring, kd };
                    kd
                }
                SweepAxes::GtIm => {
                    if case.plant.is_sdea() || case.env.effective_kd() != 0.0 {
                        return Err(Error::Configuration("integral-gain sweeps need an SEA rendering null impedance".into()));
                    }
                    case.gains.im = v;
                    0.0
                }
                SweepAxes::Env => return Err(Error::Configuration("environment sweeps are not gain maps".into())),
            };
            let valid = case.plant.validate().and(case.gains.validate()).and(case.env.validate()).and(case.configuration().map(|_| ()));
            let (engine, closed) = match valid {
                Ok(()) => (
                    z_out(&case).ok().map(|z| passivity::is_positive_real(&z).passive),
                    conditions::passivity_conditions(&case).ok(),
                ),
                Err(e) => {
                    log::debug!("skipping G_t = {g}, y = {v}: {e}");
                    (None, None)
                }
            };
            cells.push(SweepCell {
                gt: g,
                y: v,
                kd,
                engine_passive: engine,
                closed_form_passive: closed.as_ref().map(|r| r.passive),
                closed_form_margin: closed.as_ref().map(|r| r.margin),
            });
        }
    }
    Ok(cells)
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(a) => {
            let cfg = RunConfig::load(&a.common.config)?;
            let out = cmd_check(&cfg, false, a.engine)?;
            if a.closed_form {
                let mut s = String::new();
                if let Some(e) = &out.engine {
                    let _ = writeln!(s, "positive-real engine: {}", if e.passive { "passive" } else { "non-passive" });
                }
                if let Some(c) = &out.closed_form {
                    let _ = writeln!(s, "{c}");
                }
                if a.common.out.is_some() {
                    emit(a.common.out.as_deref(), &to_json(&out)?)?;
                }
                print!("{s}");
            } else {
                emit(a.common.out.as_deref(), &to_json(&out)?)?;
            }
            if let Some(c) = &out.closed_form {
                for r in c.failed_rows() {
                    log::info!("violated {} {}", r.label, r.expression);
                }
            }
            Ok(exit_for(out.passive))
        }
        Command::Realize(a) => {
            let cfg = RunConfig::load(&a.common.config)?;
            let out = cmd_realize(&cfg)?;
            if let Some(p) = &a.dot {
                write_atomic(p, out.network.to_dot().as_bytes())?;
            }
            match &a.common.out {
                Some(p) => {
                    write_atomic(p, &to_json(&out)?)?;
                    println!("{}", element_table(&out));
                }
                None => emit(None, &to_json(&out)?)?,
            }
            if !out.feasibility.feasible {
                for e in &out.feasibility.offenders {
                    eprintln!("infeasible element {} = {:e}", e.label, e.value);
                }
            }
            Ok(exit_for(out.feasibility.feasible))
        }
        Command::Bode(a) => frequency_command(&a, false, "bode"),
        Command::Effective(a) => frequency_command(&a.freq, a.parasitic, "effective"),
        Command::Simulate(a) => {
            let cfg = RunConfig::load(&a.common.config)?;
            let (sim, summary) = cmd_simulate(&cfg, &a)?;
            let rows: Vec<TrajectoryRow> = (0..sim.t.len())
                .map(|i| TrajectoryRow {
                    t: sim.t[i],
                    omega_m: sim.omega_m[i],
                    omega_end: sim.omega_end[i],
                    tau_sea: sim.tau_sea[i],
                    energy: sim.energy[i],
                })
                .collect();
            let mut header = summary.meta.csv_header(&cfg)?;
            let _ = writeln!(header, "# env: {:?} {} impulse={} dt={} T={}", summary.env.kind, summary.env.value, a.impulse, sim.dt, a.t_end);
            emit(a.common.out.as_deref(), &csv_bytes(header, &rows)?)?;
            if a.common.out.is_some() {
                print!("{}", String::from_utf8_lossy(&to_json(&summary)?));
            }
            Ok(EXIT_OK)
        }
        Command::Sweep(a) => {
            let cfg = RunConfig::load(&a.common.config)?;
            let case = cfg.case()?;
            if a.axes == SweepAxes::Env {
                let grid = coupsim_grid(&a.env_grid)?;
                let kind: CoupledEnvKind = a.env_kind.into();
                let map = coupsim::eig_sweep(&case, kind, &grid)?;
                let destabilizing = coupsim::find_destabilizing_env(&case, kind, &grid)?;
                let out = EnvSweepOutput {
                    meta: Meta::new("sweep env", Some(format!("{} log", a.env_grid))),
                    config: cfg,
                    summary: map.summary(),
                    map,
                    destabilizing,
                };
                emit(a.common.out.as_deref(), &to_json(&out)?)?;
                return Ok(EXIT_OK);
            }
            let y = a.y.unwrap_or(match a.axes {
                SweepAxes::GtKvir => GridSpec { lo: 0.5 * case.plant.k, hi: 1.5 * case.plant.k, n: 101 },
                _ => GridSpec { lo: 0.1, hi: 10.0, n: 100 },
            });
            let cells = boundary_sweep(&case, a.axes, &a.gt.linear(), &y.linear())?;
            let name = match a.axes {
                SweepAxes::GtKvir => "sweep gt-kvir",
                _ => "sweep gt-im",
            };
            let meta = Meta::new(name, Some(format!("gt {} linear, y {} linear", a.gt, y)));
            emit(a.common.out.as_deref(), &csv_bytes(meta.csv_header(&cfg)?, &cells)?)?;
            Ok(EXIT_OK)
        }
    }
}

fn coupsim_grid(g: &GridSpec) -> Result<Vec<f64>> {
    Ok(FrequencyGrid::log_spaced(g.lo, g.hi, g.n)?.omega().to_vec())
}

fn frequency_command(a: &FreqArgs, parasitic: bool, name: &str) -> Result<i32> {
    let cfg = RunConfig::load(&a.common.config)?;
    let rows = cmd_frequency(&cfg, &a.grid, parasitic)?;
    let label = if parasitic { format!("{name} parasitic") } else { name.to_string() };
    let meta = Meta::new(&label, Some(format!("{} log", a.grid)));
    emit(a.common.out.as_deref(), &csv_bytes(meta.csv_header(&cfg)?, &rows)?)?;
    Ok(EXIT_OK)
}

/// Logging level from `ELASTPASS_LOG` (e.g. `debug`), warnings by default.
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("ELASTPASS_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULTS: &str = r#"{"plant":{"Jm":0.002,"Bm":1.22,"K":360,"Bf":0},
        "gains":{"Gt":5,"Gm":10,"Im":0},"env":{"kind":"null"}}"#;

    #[test]
    fn grid_spec_parsing() {
        let g: GridSpec = "1e-2:1e5:1000".parse().unwrap();
        assert_eq!((g.lo, g.hi, g.n), (1e-2, 1e5, 1000));
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("2:1:5".parse::<GridSpec>().is_err());
        assert_eq!("0:1:3".parse::<GridSpec>().unwrap().linear(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn config_schema() {
        let cfg = RunConfig::from_json(DEFAULTS).unwrap();
        assert_eq!(cfg.case().unwrap().plant, PlantParams::reference_sea());
        assert!(RunConfig::from_json(r#"{"plant":{}}"#).is_err());
        assert!(RunConfig::from_json(&DEFAULTS.replace("\"Jm\":0.002", "\"Jm\":-1")).is_err());
        assert!(RunConfig::from_json(&DEFAULTS.replace("}}", "},\"extra\":1}")).is_err());
        let geared = RunConfig::from_json(&DEFAULTS.replace("\"null\"}", "\"null\"},\"gear\":{\"n\":2}")).unwrap();
        assert!((geared.case().unwrap().plant.jm - 0.008).abs() < 1e-15);
    }

    #[test]
    fn check_defaults_passive() {
        let out = cmd_check(&RunConfig::from_json(DEFAULTS).unwrap(), false, false).unwrap();
        assert!(out.passive);
        assert_eq!(out.agree, Some(true));
        let text = serde_json::to_string(&out).unwrap();
        let back: CheckOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(back.passive, out.passive);
    }

    #[test]
    fn first_bode_row() {
        let rows = cmd_frequency(&RunConfig::from_json(DEFAULTS).unwrap(), &default_freq_grid(), false).unwrap();
        assert_eq!(rows.len(), 1000);
        assert!((rows[0].mag_db + 13.15).abs() < 0.01);
        let header = Meta::new("bode", None).csv_header(&RunConfig::from_json(DEFAULTS).unwrap()).unwrap();
        let text = String::from_utf8(csv_bytes(header, &rows[..3]).unwrap()).unwrap();
        assert!(text.lines().any(|l| l == "omega_rad_s,re,im,mag_db,phase_deg,c_eff,k_eff,b_eff"));
        let back: Vec<FrequencyRow> = read_csv(&text).unwrap();
        assert_eq!(back, rows[..3].to_vec());
    }
}
