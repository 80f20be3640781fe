//! First-order transition amplitudes: a Gaussian bump without a laser against
//! its closed form, and a plane-wave probe inside a top-hat pulse computed two ways.

use std::time::Instant;
use volkov::propsmat::{
    gaussian_bump_free_amplitude, scaling_slope, transition_amplitude_full, transition_amplitude_reduced,
    InteractionModel, LightConeGaussian, Quad4Spec, SMatrixElement,
};
use volkov::pulse::{Particle, PulseModel, PulseShape};
use volkov::volkov::Background;
use volkov::{FourVector, PropagationGeometry, Vec3};

fn main() -> volkov::Result<()> {
    let particle = Particle::default();
    let p1 = particle.momentum(Vec3::new(0.1, 0.0, 0.2))?;
    let p2 = particle.momentum(Vec3::new(0.15, 0.05, 0.1))?;

    let free = Background::free(particle);
    let center = FourVector::new(0.5, Vec3::new(-0.3, 0.2, 0.1));
    let widths = [2.0, 1.5, 1.5, 2.0];
    let bump = InteractionModel::GaussianBump { g: 0.01, center, widths };
    let start = Instant::now();
    let full = transition_amplitude_full(&p1, &p2, &bump, &free, &Quad4Spec::default())?;
    let exact = gaussian_bump_free_amplitude(&p1, &p2, 0.01, &center, &widths);
    println!("bump, no laser: 4d {:.10e}  closed form {:.10e}", full.value, exact);
    println!("  relative difference {:.3e}  ({:.1?})", (full.value - exact).norm() / exact.norm(), start.elapsed());

    let pulse = PulseModel::new(
        PulseShape::TopHat {
            amplitude: Vec3::new(0.5, 0.0, 0.0),
            start: -4.0,
            end: 4.0,
        },
        PropagationGeometry::along_z(),
    )?;
    let bg = Background::new(particle, pulse)?;
    let probe = InteractionModel::PlaneWaveProbe {
        g: 0.01,
        k: FourVector::new(0.2, Vec3::new(0.05, 0.0, 0.1)),
        envelope: LightConeGaussian {
            phi: 0.0,
            phitilde: 0.0,
            perp: Vec3::zeros(),
            width_phi: 3.0,
            width_phitilde: 3.0,
            width_perp: 2.0,
        },
    };
    let start = Instant::now();
    let full = transition_amplitude_full(&p1, &p2, &probe, &bg, &Quad4Spec::default())?;
    let reduced = transition_amplitude_reduced(&p1, &p2, &probe, &bg, 1e-12)?;
    println!("probe in pulse: 4d {:.10e} (err {:.1e})  reduced {:.10e}", full.value, full.error, reduced.value);
    println!("  relative difference {:.3e}  ({:.1?})", (full.value - reduced.value).norm() / reduced.value.norm(), start.elapsed());

    let mut pts = Vec::new();
    for g in [1e-3, 1e-2, 1e-1] {
        let a = transition_amplitude_reduced(&p1, &p2, &probe.with_strength(g), &bg, 1e-12)?;
        pts.push((g, a.value.norm()));
    }
    println!("slope of |A| in g: {:.12}", scaling_slope(&pts)?);
    let s = SMatrixElement::new(&p1, &p2, reduced);
    println!("S = {}A with A = {:.6e}", if s.forward_delta { "delta + " } else { "" }, s.amplitude.value);
    Ok(())
}
