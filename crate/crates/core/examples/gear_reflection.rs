//! Reflect motor-side parameters through a transmission and check that the
//! passivity verdict depends only on the reflected loop.

use elastpass::conditions::passivity_conditions;
use elastpass::models::{reflect_through_gear, ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};

fn main() -> elastpass::Result<()> {
    let plant = PlantParams::reference_sea();
    let gains = ControllerGains::pp(5.0, 10.0);
    for n in [1.0, 2.0, 10.0, 50.0] {
        let (p, g) = reflect_through_gear(&plant, &gains, n)?;
        let case = ClosedLoopCase::new(p, g, VirtualEnv::spring(150.0)?)?;
        let report = passivity_conditions(&case)?;
        println!(
            "n = {n:<4} J_m {:.3e}  B_m {:.3}  alpha {:>6.1}  passive with K_d = 150: {}",
            p.jm,
            p.bm,
            g.alpha(),
            report.passive
        );
    }
    Ok(())
}
