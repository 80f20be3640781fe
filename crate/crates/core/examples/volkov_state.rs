//! Evaluates a Volkov state in a top-hat pulse, checks the Klein-Gordon residual
//! and the light-front momentum eigenvalues by finite differences.

use volkov::suites::eigen_relative_error;
use volkov::volkov::Background;
use volkov::{Branch, FourVector, Particle, PropagationGeometry, PulseModel, PulseShape, Vec3};

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
    let x = FourVector::new(1.0, Vec3::new(0.2, -0.4, 0.3));
    for branch in [Branch::Plus, Branch::Minus] {
        let st = bg.state(Vec3::new(0.4, 0.1, -0.3), branch)?;
        let psi = st.eval(&x)?;
        println!("{}: psi = {:.6e} {:+.6e}i  |psi|/N = {:.12}", branch.name(), psi.re, psi.im, psi.norm() / st.normalization());
        for h in [4e-3, 2e-3, 1e-3] {
            println!("  h = {h:.0e}  residual {:.3e}", st.normalized_residual(&x, h)?);
        }
        let got = st.lightfront_eigencheck(&x, 1e-3)?;
        let want = st.expected_eigenvalues();
        println!("  eigenvalues {:?} / {:.6}  expected {:?} / {:.6}", got.perp, got.lightfront, want.perp, want.lightfront);
        println!("  relative error {:.2e}", eigen_relative_error(&st, &got));
    }
    Ok(())
}
