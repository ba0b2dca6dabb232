//! Passive spring/damper/inerter equivalents and the parasitic pair
//! (inerter, damper) for several gain sets.

use elastpass::models::{z_out, ClosedLoopCase, ControllerGains, PlantParams, VirtualEnv};
use elastpass::ratfun::coefficient_mismatch;
use elastpass::synthesis::{feasibility, network_impedance, parasitic_pair, realize};

fn show(case: &ClosedLoopCase) -> elastpass::Result<()> {
    let net = realize(case)?;
    let cfg = case.configuration()?;
    let err = coefficient_mismatch(&network_impedance(&net)?, &z_out(case)?);
    let (b, d) = parasitic_pair(&net, cfg).unwrap_or((f64::NAN, f64::NAN));
    println!(
        "{:<18} Gt={:<5} Gm={:<5} Im={:<5} Kd={:<5} inerter {b:.3e}  damper {d:.3}  feasible {}  identity error {err:.1e}",
        cfg.to_string(),
        case.gains.gt,
        case.gains.gm,
        case.gains.im,
        case.env.effective_kd(),
        feasibility(&net).feasible
    );
    Ok(())
}

fn main() -> elastpass::Result<()> {
    let sea = PlantParams::reference_sea();
    let sdea = PlantParams::reference_sdea();

    for (gt, gm) in [(5.0, 10.0), (50.0, 10.0), (100.0, 10.0), (5.0, 50.0), (5.0, 100.0)] {
        let pp = ControllerGains::pp(gt, gm);
        show(&ClosedLoopCase::new(sea, pp, VirtualEnv::null())?)?;
        show(&ClosedLoopCase::new(sdea, pp, VirtualEnv::null())?)?;
        show(&ClosedLoopCase::new(sea, pp, VirtualEnv::spring(150.0)?)?)?;
        show(&ClosedLoopCase::new(sdea, pp, VirtualEnv::spring(150.0)?)?)?;
    }
    for im in [10.0, 50.0, 100.0] {
        show(&ClosedLoopCase::new(sea, ControllerGains::new(5.0, 10.0, im)?, VirtualEnv::null())?)?;
    }
    for kd in [200.0, 250.0] {
        show(&ClosedLoopCase::new(sea, ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(kd)?)?)?;
    }

    // full element list and a Graphviz drawing of one network
    let net = realize(&ClosedLoopCase::new(sdea, ControllerGains::pp(5.0, 10.0), VirtualEnv::spring(150.0)?)?)?;
    for e in net.elements() {
        println!("  {:<26} {:?} {:.6e}", e.label, e.kind, e.value);
    }
    println!("{}", net.to_dot());
    Ok(())
}
