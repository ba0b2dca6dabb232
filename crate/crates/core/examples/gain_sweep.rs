//! Passivity maps over gain grids: torque gain against rendered stiffness
//! for spring rendering, and against the integral gain for P-PI control.

use elastpass::cli::{boundary_sweep, SweepAxes};
use elastpass::conditions::max_passive_virtual_stiffness;
use elastpass::models::{ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};

fn map(cells: &[elastpass::cli::SweepCell], cols: usize) {
    for row in (0..cells.len() / cols).rev() {
        let line: String = (0..cols).map(|c| if cells[c * (cells.len() / cols) + row].engine_passive == Some(true) { '#' } else { '.' }).collect();
        println!("  {line}");
    }
}

fn main() -> elastpass::Result<()> {
    let plant = PlantParams::experimental();
    let gm = ControllerGains::experimental().gm;
    let gts: Vec<f64> = (1..=40).map(f64::from).collect();

    for gt in [15.0, 25.0] {
        println!("largest passive stiffness at G_t = {gt}: {:.2} N m/rad", max_passive_virtual_stiffness(&plant, &ControllerGains::pp(gt, gm))?);
    }

    let base = ClosedLoopCase::new(plant, ControllerGains::pp(5.0, gm), VirtualEnv::spring(100.0)?)?;
    let kv: Vec<f64> = (0..20).map(|i| 10.0 + 10.0 * i as f64).collect();
    println!("G_t (1..40, left to right) vs rendered stiffness (10..200, bottom to top), # = passive");
    map(&boundary_sweep(&base, SweepAxes::GtKvir, &gts, &kv)?, gts.len());

    let base = ClosedLoopCase::new(plant, ControllerGains::new(5.0, gm, 1.0)?, VirtualEnv::null())?;
    let im: Vec<f64> = (0..20).map(|i| 0.5 + 0.5 * i as f64).collect();
    println!("G_t (1..40) vs I_m (0.5..10), # = passive");
    map(&boundary_sweep(&base, SweepAxes::GtIm, &gts, &im)?, gts.len());
    Ok(())
}
