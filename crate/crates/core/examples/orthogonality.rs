//! Gram matrix of four Gaussian packets before, during and after a top-hat pulse.

use std::time::Instant;
use volkov::kgproduct::{orthogonality_report, SpatialQuadrature};
use volkov::pulse::{Particle, PulseModel, PulseShape};
use volkov::volkov::Background;
use volkov::{Branch, PropagationGeometry, Vec3};

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
    let a = Vec3::new(0.2, 0.0, 0.0);
    let b = Vec3::new(-0.2, 0.05, 0.1);
    let centers = [(Branch::Plus, a), (Branch::Plus, b), (Branch::Minus, a), (Branch::Minus, b)];
    let start = Instant::now();
    let report = orthogonality_report(&centers, 0.2, &[-20.0, 0.0, 20.0], &bg, &SpatialQuadrature::default(), 5.5)?;
    for (t, g) in report.times.iter().zip(&report.gram) {
        println!("t = {t}");
        for r in 0..g.nrows() {
            let row: Vec<String> = (0..g.ncols()).map(|c| format!("{:+.6}{:+.6}i", g[(r, c)].re, g[(r, c)].im)).collect();
            println!("  {}", row.join("  "));
        }
    }
    println!("diagonal error  {:.3e}", report.diagonal_error());
    println!("cross branch    {:.3e}", report.cross_branch());
    println!("overlap error   {:.3e}", report.overlap_error());
    println!("drift           {:.3e}", report.drift());
    println!("boundary ratio  {:?}", report.boundary_ratio);
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
