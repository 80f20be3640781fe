//! Light-cone coordinates and the accumulated phase integrals of a sin^2 pulse.

use volkov::{FourVector, Particle, PhaseAccumulator, PropagationGeometry, PulseModel, PulseShape, Vec3};

fn main() -> volkov::Result<()> {
    let geom = PropagationGeometry::new(Vec3::new(1.0, 0.0, 1.0))?;
    let x = FourVector::new(3.0, Vec3::new(0.5, -1.0, 2.0));
    let c = geom.lightcone_coords(&x);
    println!("phi = {:.6}  phitilde = {:.6}  r_perp = {:?}", c.phi, c.phitilde, c.r_perp.as_slice());
    let back = geom.from_lightcone(&c);
    println!("round trip error {:.1e}", (back.t - x.t).abs() + (back.r - x.r).norm());

    let pulse = PulseModel::new(
        PulseShape::SinSquared {
            a0: 1.0,
            polarization: Vec3::x(),
            omega: 1.0,
            cycles: 4,
            cep: 0.0,
        },
        PropagationGeometry::along_z(),
    )?;
    let acc = PhaseAccumulator::new(pulse)?;
    let particle = Particle::default();
    let p_perp = Vec3::new(0.3, 0.0, 0.0);
    println!("{:>8} {:>14} {:>14} {:>14}", "phi", "int A_perp.x", "int A_perp^2", "b(0, phi)");
    for k in 0..=8 {
        let phi = 4.0 * k as f64;
        let d = acc.integrals_between(0.0, phi)?;
        let b = if phi > 0.0 { acc.b_coefficient(&particle, &p_perp, 0.0, phi)? } else { 0.0 };
        println!("{phi:>8.2} {:>14.6e} {:>14.6e} {b:>14.6e}", d.a_perp.x, d.a_perp_sq);
    }
    Ok(())
}
