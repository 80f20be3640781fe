//! The regularized integral S(a, b) and smeared C_n along the regulator schedule.

use volkov::oscillatory::{c_integral_smeared, s_integral, s_partial, CIndex, RegularizedOscillatory, SmearingFunction, SCHEDULE};

fn main() -> volkov::Result<()> {
    for (a, b) in [(0.5, 2.0), (1.0, 1.0), (4.0, 0.25), (0.1, 30.0)] {
        let reg = RegularizedOscillatory::new(a, b)?;
        let res = s_integral(&reg, 1e-10)?;
        println!("S({a}, {b}) = {:.12}  +- {:.1e}  [{}]", res.value, res.error, res.method);
        for &(eps, l) in &SCHEDULE {
            let partial = s_partial(&reg.with_window(eps, l)?)?;
            println!("    window [{eps:.0e}, {l:.0e}]  {partial:.12}");
        }
    }
    let g = SmearingFunction::gaussian(0.1, 0.2)?;
    for (n, name) in [(CIndex::Zero, "C_0"), (CIndex::MinusTwo, "C_-2")] {
        let res = c_integral_smeared(n, 1.0, &g, 1e-10)?;
        println!("{name} against g: {:.10}  pi g(0) = {:.10}", res.value, std::f64::consts::PI * g.value(0.0));
    }
    Ok(())
}
