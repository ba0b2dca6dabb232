//! Decide passivity of a few closed loops two ways: the general
//! positive-real test on Z(s), and the closed-form gain conditions.

use elastpass::conditions::{passivity_conditions, rendered_stiffness};
use elastpass::models::{z_out, ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};
use elastpass::passivity::is_positive_real;

fn main() -> elastpass::Result<()> {
    let plant = PlantParams::reference_sea();
    let gains = ControllerGains::pp(5.0, 10.0);

    for env in [VirtualEnv::null(), VirtualEnv::spring(150.0)?, VirtualEnv::spring(380.0)?] {
        let case = ClosedLoopCase::new(plant, gains, env)?;
        let z = z_out(&case)?;
        let verdict = is_positive_real(&z);
        let report = passivity_conditions(&case)?;

        println!("Z(s) = {z}");
        println!("rendered stiffness {:.1} N m/rad", rendered_stiffness(&gains, env.effective_kd()));
        println!("positive-real test: {}", if verdict.passive { "passive" } else { "not passive" });
        if let Some((w, re)) = verdict.cond2_witness {
            println!("  Re Z(jw) = {re:.3e} at w = {w:.3e} rad/s");
        }
        print!("{report}");
        println!();
    }

    // An integral gain on the motor velocity loop keeps a null rendering passive
    // only while I_m stays under a gain-dependent ceiling.
    for im in [10.0, 40.0] {
        let case = ClosedLoopCase::new(plant, ControllerGains::new(5.0, 10.0, im)?, VirtualEnv::null())?;
        let report = passivity_conditions(&case)?;
        println!("P-PI with I_m = {im}: {} (margin {:.3e})", if report.passive { "passive" } else { "not passive" }, report.margin);
    }
    Ok(())
}
