//! Forward and backward propagation of a mixed plus/minus packet through a
//! top-hat pulse, compared with direct evaluation of each branch.

use num_complex::Complex64;
use std::time::Instant;
use volkov::kgproduct::SpatialQuadrature;
use volkov::propsmat::{propagate_packet, PacketMix, PropagatorSpec};
use volkov::pulse::{Particle, PulseModel, PulseShape};
use volkov::volkov::Background;
use volkov::{Branch, FourVector, PropagationGeometry, Vec3};

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
    let quad = SpatialQuadrature::default();
    let t_from = 0.0;
    let mix = PacketMix::gaussian(
        &bg,
        0.2,
        Some((Vec3::new(0.2, 0.0, 0.1), Complex64::new(0.8, 0.0))),
        Some((Vec3::new(-0.1, 0.1, 0.0), Complex64::new(0.0, 0.6))),
        t_from,
        &quad,
        5.5,
    )?;
    let spec = PropagatorSpec::new(bg.clone());
    for (t_to, branch, factor) in [(10.0, Branch::Plus, Complex64::new(0.0, -1.0)), (-10.0, Branch::Minus, Complex64::new(0.0, 1.0))] {
        let component = mix.component(branch).expect("both branches present");
        let center = component.classical_center(t_to)?;
        for offset in [Vec3::zeros(), Vec3::new(2.0, -1.0, 1.5)] {
            let x = center + offset;
            let start = Instant::now();
            let got = propagate_packet(&spec, &mix, t_from, t_to, &x)?;
            let want = factor * component.value(&FourVector::new(t_to, x))?;
            println!(
                "t {t_from} -> {t_to} at {:?}: got {:.8e} want {:.8e} rel {:.2e} ({:.1?})",
                x.as_slice(),
                got,
                want,
                (got - want).norm() / want.norm(),
                start.elapsed()
            );
        }
    }
    Ok(())
}
