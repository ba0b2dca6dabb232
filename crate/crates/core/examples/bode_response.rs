//! Magnitude and phase of the output impedance for the default SEA gains,
//! printed at one point per decade.

use elastpass::analysis::{bode, FrequencyGrid};
use elastpass::models::{z_out, ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};

fn main() -> elastpass::Result<()> {
    let grid = FrequencyGrid::log_spaced(1e-2, 1e5, 8)?;
    for (label, env) in [("null", VirtualEnv::null()), ("spring 150", VirtualEnv::spring(150.0)?)] {
        let case = ClosedLoopCase::new(PlantParams::reference_sea(), ControllerGains::pp(5.0, 10.0), env)?;
        println!("{label}");
        println!("  {:>10} {:>10} {:>10}", "w rad/s", "|Z| dB", "phase deg");
        for p in bode(&z_out(&case)?, &grid)? {
            println!("  {:>10.3e} {:>10.2} {:>10.2}", p.omega, p.mag_db, p.phase_deg);
        }
    }
    Ok(())
}
