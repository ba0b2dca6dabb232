//! Effective damping and inertance of the parasitic dynamics over frequency,
//! compared with the closed-form expressions for the same loops.

use elastpass::analysis::{ceff_beff_sdea_pp_spring, ceff_beff_sea_ppi_null, effective_decompose, parasitic_impedance, FrequencyGrid};
use elastpass::models::{ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};

fn main() -> elastpass::Result<()> {
    let grid = FrequencyGrid::log_spaced(1e-1, 1e4, 11)?;

    let plant = PlantParams::reference_sea();
    let gains = ControllerGains::new(5.0, 10.0, 10.0)?;
    let case = ClosedLoopCase::new(plant, gains, VirtualEnv::null())?;
    println!("SEA P-PI null: numeric decomposition vs closed form");
    for s in effective_decompose(&parasitic_impedance(&case)?, &grid)? {
        let (c, b) = ceff_beff_sea_ppi_null(&plant, &gains, s.omega)?;
        println!("  w {:>9.3e}  c_eff {:.5} ({c:.5})  b_eff {:.4e} ({b:.4e})", s.omega, s.c_eff, s.b_eff.unwrap_or(f64::NAN));
    }

    let sdea = PlantParams::reference_sdea();
    let pp = ControllerGains::pp(5.0, 10.0);
    let case = ClosedLoopCase::new(sdea, pp, VirtualEnv::spring(150.0)?)?;
    println!("SDEA P-P spring 150");
    for s in effective_decompose(&parasitic_impedance(&case)?, &grid)? {
        let (c, b) = ceff_beff_sdea_pp_spring(&sdea, &pp, 150.0, s.omega)?;
        println!("  w {:>9.3e}  c_eff {:.5} ({c:.5})  b_eff {:.4e} ({b:.4e})", s.omega, s.c_eff, s.b_eff.unwrap_or(f64::NAN));
    }
    Ok(())
}
