//! Volkov solutions of the Klein-Gordon equation in a plane-wave pulse.
//!
//! `psi_{+/-}(p; x) = N exp(-/+ i p.x +/- i F_{+/-}(phi))` with
//! `N = 1/(sqrt(2E) (2 pi)^{3/2})` and `F` the phase term of
//! [`PhaseAccumulator::volkov_phase_term`]. Both branches are evaluated from
//! this single stacked expression with the lower limit `phi0` fixed by the
//! pulse; writing the branches separately with another lower limit only
//! multiplies each state by a constant phase.

use crate::error::{Error, Result};
use crate::lightcone::{FourVector, OnShellMomentum, PropagationGeometry, Vec3};
use crate::pulse::{volkov_phase_from_integrals, Branch, Particle, PhaseAccumulator, PulseModel};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// A particle species together with the pulse it moves in.
#[derive(Clone, Debug)]
pub struct Background {
    pub particle: Particle,
    acc: Arc<PhaseAccumulator>,
}

impl Background {
    pub fn new(particle: Particle, pulse: PulseModel) -> Result<Self> {
        Ok(Self {
            particle,
            acc: Arc::new(PhaseAccumulator::new(pulse)?),
        })
    }

    pub fn from_accumulator(particle: Particle, acc: Arc<PhaseAccumulator>) -> Self {
        Self { particle, acc }
    }

    /// Field-free background along `z`.
    pub fn free(particle: Particle) -> Self {
        Self::new(particle, PulseModel::zero(PropagationGeometry::along_z())).expect("zero pulse is valid")
    }

    pub fn accumulator(&self) -> &PhaseAccumulator {
        &self.acc
    }

    pub fn shared_accumulator(&self) -> Arc<PhaseAccumulator> {
        self.acc.clone()
    }

    pub fn pulse(&self) -> &PulseModel {
        self.acc.pulse()
    }

    pub fn geometry(&self) -> &PropagationGeometry {
        self.acc.pulse().geometry()
    }

    pub fn state(&self, p: Vec3, branch: Branch) -> Result<VolkovState> {
        VolkovState::new(self.particle, p, branch, self.acc.clone())
    }
}

/// One Volkov state: a momentum, a branch and a pulse.
#[derive(Clone, Debug)]
pub struct VolkovState {
    particle: Particle,
    momentum: OnShellMomentum,
    branch: Branch,
    acc: Arc<PhaseAccumulator>,
}

/// Eigenvalues extracted by [`VolkovState::lightfront_eigencheck`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalues {
    /// Components of the transverse momentum along `(e1, e2)`.
    pub perp: [f64; 2],
    /// Eigenvalue of `n.P`.
    pub lightfront: f64,
}

/// `1/(sqrt(2E) (2 pi)^{3/2})`
pub fn normalization(energy: f64) -> f64 {
    1.0 / ((2.0 * energy).sqrt() * (2.0 * PI).powf(1.5))
}

impl VolkovState {
    pub fn new(particle: Particle, p: Vec3, branch: Branch, acc: Arc<PhaseAccumulator>) -> Result<Self> {
        let momentum = particle.momentum(p)?;
        Ok(Self {
            particle,
            momentum,
            branch,
            acc,
        })
    }

    pub fn momentum(&self) -> &OnShellMomentum {
        &self.momentum
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn particle(&self) -> &Particle {
        &self.particle
    }

    pub fn accumulator(&self) -> &PhaseAccumulator {
        &self.acc
    }

    pub fn normalization(&self) -> f64 {
        normalization(self.momentum.energy())
    }

    /// `lambda = (n.p)/2`
    pub fn lambda(&self) -> f64 {
        0.5 * self.momentum.lightfront(self.acc.pulse().geometry())
    }

    /// The real exponent `Theta` with `psi = N exp(i Theta)`.
    pub fn phase(&self, x: &FourVector) -> Result<f64> {
        let s = self.branch.sign();
        let phi = self.acc.pulse().geometry().lightcone_coords(x).phi;
        let f = self.acc.volkov_phase_term(&self.particle, &self.momentum, self.branch, phi)?;
        Ok(-s * self.momentum.four().dot(x) + s * f)
    }

    pub fn eval(&self, x: &FourVector) -> Result<Complex64> {
        Ok(Complex64::from_polar(self.normalization(), self.phase(x)?))
    }

    /// `d psi / dt = psi i (-/+ E +/- F'(phi))`, exact.
    pub fn time_derivative(&self, x: &FourVector) -> Result<Complex64> {
        let psi = self.eval(x)?;
        Ok(psi * Complex64::i() * self.phase_rate(x))
    }

    /// `d Theta / dt` at `x`.
    pub fn phase_rate(&self, x: &FourVector) -> f64 {
        let s = self.branch.sign();
        let phi = self.acc.pulse().geometry().lightcone_coords(x).phi;
        let rate = self.acc.volkov_phase_rate(&self.particle, &self.momentum, self.branch, phi);
        -s * self.momentum.energy() + s * rate
    }

    /// `Theta(x + d) - Theta(x)` computed from the integrals over the short
    /// phase interval, so no large absolute phase is ever subtracted.
    fn phase_increment(&self, phi: f64, d: &FourVector) -> Result<f64> {
        let s = self.branch.sign();
        let geom = self.acc.pulse().geometry();
        let dphi = geom.lightcone_coords(d).phi;
        let df = if dphi == 0.0 {
            0.0
        } else {
            let ints = self.acc.integrals_between(phi, phi + dphi)?;
            volkov_phase_from_integrals(&ints, &self.particle, &self.momentum, geom, self.branch)
        };
        Ok(-s * self.momentum.four().dot(d) + s * df)
    }

    fn guard(&self, phi: f64, h: f64) -> Result<()> {
        if !(h.is_finite() && h > 0.0) {
            return Err(crate::error::invalid("finite-difference step h must be positive"));
        }
        let margin = 2.0 * h;
        match self.acc.pulse().near_discontinuity(phi, margin) {
            Some(edge) => Err(Error::NearDiscontinuity { edge, margin }),
            None => Ok(()),
        }
    }

    /// First and second derivatives of `psi(x + s dir)/psi(x)` at `s = 0` by
    /// five-point stencils.
    fn stencil(&self, phi: f64, dir: &FourVector, h: f64) -> Result<(Complex64, Complex64)> {
        let mut d = [Complex64::new(0.0, 0.0); 5];
        for (k, off) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
            let y = self.phase_increment(phi, &(*dir * (off * h)))?;
            let half = (0.5 * y).sin();
            // exp(iy) - 1 without cancellation.
            let val = Complex64::new(-2.0 * half * half, y.sin());
            d[if k < 2 { k } else { k + 1 }] = val;
        }
        let first = (-d[4] + d[3] * 8.0 - d[1] * 8.0 + d[0]) / (12.0 * h);
        let second = (-d[4] + d[3] * 16.0 + d[1] * 16.0 - d[0]) / (12.0 * h * h);
        Ok((first, second))
    }

    /// `(H psi)(x) / psi(x)` for
    /// `H = box + 2ie (A0 d_t + A.grad) - e^2 A^2 + m^2`.
    fn relative_residual(&self, x: &FourVector, h: f64) -> Result<Complex64> {
        let geom = self.acc.pulse().geometry();
        let phi = geom.lightcone_coords(x).phi;
        self.guard(phi, h)?;
        let a = self.acc.pulse().eval_potential(phi);
        let e = self.particle.charge;
        let m2 = self.particle.mass * self.particle.mass;

        let (gt, gtt) = self.stencil(phi, &FourVector::new(1.0, Vec3::zeros()), h)?;
        let mut lap = Complex64::new(0.0, 0.0);
        let mut a_grad = Complex64::new(0.0, 0.0);
        for axis in 0..3 {
            let mut r = Vec3::zeros();
            r[axis] = 1.0;
            let (g1, g2) = self.stencil(phi, &FourVector::new(0.0, r), h)?;
            lap += g2;
            a_grad += g1 * a.r[axis];
        }
        let i = Complex64::i();
        Ok(gtt - lap + i * (2.0 * e) * (gt * a.t + a_grad) - e * e * a.square() + m2)
    }

    /// `|H psi|` at `x` with fourth-order stencils of spacing `h`.
    pub fn kg_residual(&self, x: &FourVector, h: f64) -> Result<f64> {
        Ok(self.relative_residual(x, h)?.norm() * self.normalization())
    }

    /// `|H psi| / (|psi| max(E, omega)^2)`.
    pub fn normalized_residual(&self, x: &FourVector, h: f64) -> Result<f64> {
        let scale = self.momentum.energy().max(self.acc.pulse().carrier_frequency());
        Ok(self.relative_residual(x, h)?.norm() / (scale * scale))
    }

    /// Applies `P_perp = -i grad_perp` and `n.P = i (d_t + d_{n.r})` by finite
    /// differences and returns the eigenvalues. Expected: `+/- p_perp`, `+/- n.p`.
    pub fn lightfront_eigencheck(&self, x: &FourVector, h: f64) -> Result<Eigenvalues> {
        let geom = self.acc.pulse().geometry();
        let phi = geom.lightcone_coords(x).phi;
        self.guard(phi, h)?;
        let (e1, e2) = geom.transverse_basis();
        let i = Complex64::i();
        let (d1, _) = self.stencil(phi, &FourVector::new(0.0, e1), h)?;
        let (d2, _) = self.stencil(phi, &FourVector::new(0.0, e2), h)?;
        let (dn, _) = self.stencil(phi, &FourVector::new(1.0, geom.direction()), h)?;
        Ok(Eigenvalues {
            perp: [(-i * d1).re, (-i * d2).re],
            lightfront: (i * dn).re,
        })
    }

    /// The eigenvalues the state should have.
    pub fn expected_eigenvalues(&self) -> Eigenvalues {
        let geom = self.acc.pulse().geometry();
        let s = self.branch.sign();
        let local = geom.to_local(&self.momentum.spatial());
        Eigenvalues {
            perp: [s * local[0], s * local[1]],
            lightfront: s * self.momentum.lightfront(geom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseShape;
    use approx::assert_abs_diff_eq;

    fn zero_acc() -> Arc<PhaseAccumulator> {
        Arc::new(PhaseAccumulator::new(PulseModel::zero(PropagationGeometry::along_z())).unwrap())
    }

    fn tophat_acc() -> Arc<PhaseAccumulator> {
        let pulse = PulseModel::new(
            PulseShape::TopHat {
                amplitude: Vec3::new(0.5, 0.0, 0.0),
                start: 0.0,
                end: 10.0,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap();
        Arc::new(PhaseAccumulator::new(pulse).unwrap())
    }

    fn sin2_acc() -> Arc<PhaseAccumulator> {
        let pulse = PulseModel::new(
            PulseShape::SinSquared {
                a0: 1.0,
                polarization: Vec3::x(),
                omega: 1.0,
                cycles: 4,
                cep: 0.0,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap();
        Arc::new(PhaseAccumulator::new(pulse).unwrap())
    }

    #[test]
    fn zero_field_is_plane_wave() {
        let particle = Particle::default();
        let p = Vec3::new(0.3, -0.1, 0.7);
        let st = VolkovState::new(particle, p, Branch::Plus, zero_acc()).unwrap();
        let x = FourVector::new(1.7, Vec3::new(-2.0, 0.4, 3.1));
        let expect = Complex64::from_polar(st.normalization(), -st.momentum().four().dot(&x));
        assert_abs_diff_eq!((st.eval(&x).unwrap() - expect).norm(), 0.0, epsilon = 1e-16);
        let e = st.momentum().energy();
        let dt = st.time_derivative(&x).unwrap();
        assert_abs_diff_eq!((dt - st.eval(&x).unwrap() * Complex64::new(0.0, -e)).norm(), 0.0, epsilon = 1e-16);
        let minus = VolkovState::new(particle, p, Branch::Minus, zero_acc()).unwrap();
        let dt = minus.time_derivative(&x).unwrap();
        assert_abs_diff_eq!((dt - minus.eval(&x).unwrap() * Complex64::new(0.0, e)).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn tophat_value_example() {
        let st = VolkovState::new(Particle::default(), Vec3::zeros(), Branch::Plus, tophat_acc()).unwrap();
        // phi = 4 with t = 6, z = 2.
        let x = FourVector::new(6.0, Vec3::new(0.0, 0.0, 2.0));
        let expect = Complex64::from_polar(st.normalization(), -6.0 - 0.5);
        assert_abs_diff_eq!((st.eval(&x).unwrap() - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn before_pulse_is_free() {
        let st = VolkovState::new(Particle::default(), Vec3::new(0.2, 0.1, -0.3), Branch::Minus, sin2_acc()).unwrap();
        let x = FourVector::new(-40.0, Vec3::new(1.0, 2.0, 3.0));
        let expect = Complex64::from_polar(st.normalization(), st.momentum().four().dot(&x));
        assert_abs_diff_eq!((st.eval(&x).unwrap() - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn time_derivative_matches_differences() {
        let st = VolkovState::new(Particle::default(), Vec3::new(0.4, -0.2, 0.6), Branch::Plus, sin2_acc()).unwrap();
        let x = FourVector::new(9.0, Vec3::new(0.3, 0.2, -3.0));
        let h = 1e-4;
        let at = |dt: f64| st.eval(&FourVector::new(x.t + dt, x.r)).unwrap();
        let fd = (-at(2.0 * h) + at(h) * 8.0 - at(-h) * 8.0 + at(-2.0 * h)) / (12.0 * h);
        let exact = st.time_derivative(&x).unwrap();
        assert!((fd - exact).norm() / exact.norm() < 1e-8);
    }

    #[test]
    fn residual_is_small_inside_pulses() {
        let x = FourVector::new(5.0, Vec3::new(0.1, -0.4, 1.0));
        for acc in [zero_acc(), tophat_acc(), sin2_acc()] {
            for branch in [Branch::Plus, Branch::Minus] {
                let st = VolkovState::new(Particle::default(), Vec3::new(0.5, 0.3, -0.2), branch, acc.clone()).unwrap();
                assert!(st.normalized_residual(&x, 1e-3).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn refuses_points_at_edges() {
        let st = VolkovState::new(Particle::default(), Vec3::zeros(), Branch::Plus, tophat_acc()).unwrap();
        let x = FourVector::new(10.001, Vec3::zeros());
        assert!(matches!(st.kg_residual(&x, 1e-3), Err(Error::NearDiscontinuity { .. })));
    }

    #[test]
    fn eigenvalues_by_branch() {
        for branch in [Branch::Plus, Branch::Minus] {
            let st = VolkovState::new(Particle::default(), Vec3::new(1.0, 0.0, 0.4), branch, tophat_acc()).unwrap();
            let x = FourVector::new(3.0, Vec3::new(0.2, 0.0, -1.5));
            let got = st.lightfront_eigencheck(&x, 1e-3).unwrap();
            let want = st.expected_eigenvalues();
            assert_abs_diff_eq!(got.perp[0], branch.sign(), epsilon = 1e-9);
            assert_abs_diff_eq!(got.perp[1], 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(got.lightfront, want.lightfront, epsilon = 1e-9);
        }
    }
}
