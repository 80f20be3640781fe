//! Smeared completeness sums at a packet center and in its transverse tail.

use volkov::oscillatory::{completeness_smeared, CompletenessOptions, GaussianTestFunction};
use volkov::volkov::Background;
use volkov::{Particle, PropagationGeometry, PulseModel, PulseShape, Vec3};

fn main() -> volkov::Result<()> {
    let pulse = PulseModel::new(
        PulseShape::TopHat {
            amplitude: Vec3::new(0.5, 0.0, 0.0),
            start: -4.0,
            end: 4.0,
        },
        PropagationGeometry::along_z(),
    )?;
    let bg = Background::new(Particle::default(), pulse)?;
    let center = Vec3::new(0.1, 0.0, 0.2);
    let f = GaussianTestFunction::new(center, 1.0, 1.0)?;
    for (label, r) in [("center", center), ("tail", center + Vec3::new(5.0, 0.0, 0.0))] {
        let res = completeness_smeared(&bg, 0.0, &r, &f, &CompletenessOptions::default())?;
        println!(
            "{label:>6}: I1 = {:.3e}  I2 = {:.8}  f(r) = {:.8}  error {:.1e}",
            res.i1.norm(),
            res.i2.re,
            res.expected,
            res.error
        );
    }
    Ok(())
}
