//! Plane-wave four-potentials `A(phi)` obeying `n.A = 0`, and the phase
//! integrals that enter the Volkov exponent.
//!
//! A pulse is described by its transverse vector potential `A_perp(phi)` and
//! an optional longitudinal profile `a_par(phi)`. The gauge condition then
//! fixes `A = (a_par; A_perp + n a_par)`.

use crate::error::{invalid, Error, Result};
use crate::lightcone::{FourVector, OnShellMomentum, PropagationGeometry, Vec3};
use crate::quadrature::{integrate, AdaptiveOptions};
use std::f64::consts::PI;

/// Mass and charge of the scalar particle. Natural units; the default is
/// an electron-like particle with `m = 1`, `e = -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub mass: f64,
    pub charge: f64,
}

impl Default for Particle {
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: -1.0,
        }
    }
}

impl Particle {
    pub fn new(mass: f64, charge: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("particle.mass must be positive"));
        }
        if !charge.is_finite() {
            return Err(invalid("particle.charge must be finite"));
        }
        Ok(Self { mass, charge })
    }

    pub fn momentum(&self, p: Vec3) -> Result<OnShellMomentum> {
        OnShellMomentum::new(p, self.mass)
    }
}

/// Transverse part of the potential.
#[derive(Clone, Debug, PartialEq)]
pub enum PulseShape {
    Zero,
    /// Constant `amplitude` for `start <= phi < end`.
    TopHat { amplitude: Vec3, start: f64, end: f64 },
    /// `a0 pol sin^2(pi phi / T) cos(omega phi + cep)` on `[0, T]`, `T = 2 pi cycles / omega`.
    SinSquared {
        a0: f64,
        polarization: Vec3,
        omega: f64,
        cycles: u32,
        cep: f64,
    },
    /// `a0 pol cos(omega phi)` for all `phi`.
    Monochromatic { a0: f64, polarization: Vec3, omega: f64 },
}

/// Longitudinal profile `a_par(phi) = A0(phi)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum LongitudinalProfile {
    #[default]
    None,
    Rect { value: f64, start: f64, end: f64 },
    /// `amplitude sin^2(pi (phi - start) / length)` on `[start, start + length]`.
    SinSquared { amplitude: f64, start: f64, length: f64 },
}

/// A plane-wave pulse propagating along a fixed direction.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseModel {
    shape: PulseShape,
    longitudinal: LongitudinalProfile,
    geometry: PropagationGeometry,
}

impl PulseModel {
    pub fn new(shape: PulseShape, geometry: PropagationGeometry) -> Result<Self> {
        Self::with_longitudinal(shape, LongitudinalProfile::None, geometry)
    }

    pub fn with_longitudinal(
        shape: PulseShape,
        longitudinal: LongitudinalProfile,
        geometry: PropagationGeometry,
    ) -> Result<Self> {
        let n = geometry.direction();
        let check_perp = |v: &Vec3, what: &str| -> Result<()> {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(invalid(format!("pulse.{what} must be finite")));
            }
            if v.dot(&n).abs() > 1e-12 * v.norm().max(1.0) {
                return Err(invalid(format!("pulse.{what} must be orthogonal to the propagation direction")));
            }
            Ok(())
        };
        match &shape {
            PulseShape::Zero => {}
            PulseShape::TopHat { amplitude, start, end } => {
                check_perp(amplitude, "amplitude")?;
                if !(start.is_finite() && end.is_finite() && start < end) {
                    return Err(invalid("pulse.start must be below pulse.end"));
                }
            }
            PulseShape::SinSquared {
                a0,
                polarization,
                omega,
                cycles,
                cep,
            } => {
                check_perp(polarization, "polarization")?;
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(invalid("pulse.omega must be positive"));
                }
                if *cycles == 0 {
                    return Err(invalid("pulse.cycles must be positive"));
                }
                if !(a0.is_finite() && cep.is_finite()) {
                    return Err(invalid("pulse.a0 and pulse.cep must be finite"));
                }
            }
            PulseShape::Monochromatic { a0, polarization, omega } => {
                check_perp(polarization, "polarization")?;
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(invalid("pulse.omega must be positive"));
                }
                if !a0.is_finite() {
                    return Err(invalid("pulse.a0 must be finite"));
                }
            }
        }
        match &longitudinal {
            LongitudinalProfile::None => {}
            LongitudinalProfile::Rect { value, start, end } => {
                if !(value.is_finite() && start < end) {
                    return Err(invalid("pulse.longitudinal rect needs finite value and start < end"));
                }
            }
            LongitudinalProfile::SinSquared { amplitude, length, .. } => {
                if !(amplitude.is_finite() && *length > 0.0) {
                    return Err(invalid("pulse.longitudinal sin_squared needs a positive length"));
                }
            }
        }
        Ok(Self {
            shape,
            longitudinal,
            geometry,
        })
    }

    pub fn zero(geometry: PropagationGeometry) -> Self {
        Self {
            shape: PulseShape::Zero,
            longitudinal: LongitudinalProfile::None,
            geometry,
        }
    }

    pub fn shape(&self) -> &PulseShape {
        &self.shape
    }

    pub fn longitudinal(&self) -> &LongitudinalProfile {
        &self.longitudinal
    }

    pub fn geometry(&self) -> &PropagationGeometry {
        &self.geometry
    }

    /// Transverse vector potential `A_perp(phi)`.
    pub fn transverse(&self, phi: f64) -> Vec3 {
        match &self.shape {
            PulseShape::Zero => Vec3::zeros(),
            PulseShape::TopHat { amplitude, start, end } => {
                if phi >= *start && phi < *end {
                    *amplitude
                } else {
                    Vec3::zeros()
                }
            }
            PulseShape::SinSquared {
                a0,
                polarization,
                omega,
                cycles,
                cep,
            } => {
                let len = sin_squared_length(*omega, *cycles);
                if (0.0..=len).contains(&phi) {
                    let env = (PI * phi / len).sin().powi(2);
                    polarization * (a0 * env * (omega * phi + cep).cos())
                } else {
                    Vec3::zeros()
                }
            }
            PulseShape::Monochromatic { a0, polarization, omega } => polarization * (a0 * (omega * phi).cos()),
        }
    }

    /// Longitudinal profile, equal to the time component `A0(phi)`.
    pub fn longitudinal_value(&self, phi: f64) -> f64 {
        match &self.longitudinal {
            LongitudinalProfile::None => 0.0,
            LongitudinalProfile::Rect { value, start, end } => {
                if phi >= *start && phi < *end {
                    *value
                } else {
                    0.0
                }
            }
            LongitudinalProfile::SinSquared {
                amplitude,
                start,
                length,
            } => {
                let s = phi - start;
                if (0.0..=*length).contains(&s) {
                    amplitude * (PI * s / length).sin().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// The four-potential `A(phi)`; satisfies `n.A = 0` by construction.
    pub fn eval_potential(&self, phi: f64) -> FourVector {
        let par = self.longitudinal_value(phi);
        FourVector::new(par, self.transverse(phi) + self.geometry.direction() * par)
    }

    /// Locations in `phi` where the potential jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let PulseShape::TopHat { start, end, .. } = self.shape {
            out.extend([start, end]);
        }
        if let LongitudinalProfile::Rect { start, end, .. } = self.longitudinal {
            out.extend([start, end]);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Points where the potential is continuous but not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let PulseShape::SinSquared { omega, cycles, .. } = self.shape {
            out.extend([0.0, sin_squared_length(omega, cycles)]);
        }
        if let LongitudinalProfile::SinSquared { start, length, .. } = self.longitudinal {
            out.extend([start, start + length]);
        }
        out
    }

    /// Support of the pulse in `phi`, `None` for an everlasting wave.
    /// A vanishing field reports an empty support.
    pub fn support(&self) -> Option<(f64, f64)> {
        let transverse = match &self.shape {
            PulseShape::Zero => Some((f64::INFINITY, f64::NEG_INFINITY)),
            PulseShape::TopHat { start, end, .. } => Some((*start, *end)),
            PulseShape::SinSquared { omega, cycles, .. } => Some((0.0, sin_squared_length(*omega, *cycles))),
            PulseShape::Monochromatic { .. } => None,
        }?;
        let par = match &self.longitudinal {
            LongitudinalProfile::None => (f64::INFINITY, f64::NEG_INFINITY),
            LongitudinalProfile::Rect { start, end, .. } => (*start, *end),
            LongitudinalProfile::SinSquared { start, length, .. } => (*start, start + length),
        };
        Some((transverse.0.min(par.0), transverse.1.max(par.1)))
    }

    /// Lower limit of the phase integrals: the start of the support for a
    /// finite pulse, zero for a monochromatic wave or a vanishing field.
    pub fn phase_origin(&self) -> f64 {
        match self.support() {
            Some((a, b)) if a <= b => a,
            _ => 0.0,
        }
    }

    /// Upper bound on `|A_perp|`.
    pub fn max_transverse(&self) -> f64 {
        match &self.shape {
            PulseShape::Zero => 0.0,
            PulseShape::TopHat { amplitude, .. } => amplitude.norm(),
            PulseShape::SinSquared { a0, polarization, .. } | PulseShape::Monochromatic { a0, polarization, .. } => {
                a0.abs() * polarization.norm()
            }
        }
    }

    pub fn max_longitudinal(&self) -> f64 {
        match &self.longitudinal {
            LongitudinalProfile::None => 0.0,
            LongitudinalProfile::Rect { value, .. } => value.abs(),
            LongitudinalProfile::SinSquared { amplitude, .. } => amplitude.abs(),
        }
    }

    /// Carrier frequency, zero for non-oscillating shapes.
    pub fn carrier_frequency(&self) -> f64 {
        match &self.shape {
            PulseShape::SinSquared { omega, .. } | PulseShape::Monochromatic { omega, .. } => *omega,
            _ => 0.0,
        }
    }

    /// Whether `phi` is within `margin` of a jump of the potential.
    pub fn near_discontinuity(&self, phi: f64, margin: f64) -> Option<f64> {
        self.breakpoints().into_iter().find(|edge| (phi - edge).abs() <= margin)
    }
}

fn sin_squared_length(omega: f64, cycles: u32) -> f64 {
    2.0 * PI * cycles as f64 / omega
}

/// The integrals `int A_perp`, `int |A_perp|^2` and `int a_par` over a
/// phase interval.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseIntegrals {
    pub a_perp: Vec3,
    pub a_perp_sq: f64,
    pub a_par: f64,
}

impl std::ops::Sub for PhaseIntegrals {
    type Output = PhaseIntegrals;
    fn sub(self, rhs: PhaseIntegrals) -> PhaseIntegrals {
        PhaseIntegrals {
            a_perp: self.a_perp - rhs.a_perp,
            a_perp_sq: self.a_perp_sq - rhs.a_perp_sq,
            a_par: self.a_par - rhs.a_par,
        }
    }
}

impl std::ops::Add for PhaseIntegrals {
    type Output = PhaseIntegrals;
    fn add(self, rhs: PhaseIntegrals) -> PhaseIntegrals {
        PhaseIntegrals {
            a_perp: self.a_perp + rhs.a_perp,
            a_perp_sq: self.a_perp_sq + rhs.a_perp_sq,
            a_par: self.a_par + rhs.a_par,
        }
    }
}

/// Which of the two Volkov families a state belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(invalid(format!("unknown branch '{other}'"))),
        }
    }
}

/// Cumulative transverse integrals tabulated on a grid over a finite
/// support, for shapes without a closed-form antiderivative.
#[derive(Clone, Debug)]
struct CumulativeTable {
    nodes: Vec<f64>,
    values: Vec<(Vec3, f64)>,
}

/// Evaluates the phase integrals of a pulse from a fixed lower limit
/// `phi0`. Immutable once built; the tabulated integrals are computed at
/// construction.
#[derive(Clone, Debug)]
pub struct PhaseAccumulator {
    pulse: PulseModel,
    phi0: f64,
    tolerance: f64,
    table: Option<CumulativeTable>,
}

impl PhaseAccumulator {
    pub fn new(pulse: PulseModel) -> Result<Self> {
        Self::with_tolerance(pulse, 1e-10)
    }

    pub fn with_tolerance(pulse: PulseModel, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(invalid("quadrature.tolerance must be positive"));
        }
        let phi0 = pulse.phase_origin();
        let mut acc = Self {
            pulse,
            phi0,
            tolerance,
            table: None,
        };
        if let PulseShape::SinSquared { omega, cycles, .. } = acc.pulse.shape {
            let len = sin_squared_length(omega, cycles);
            // Eight cells per carrier period.
            let cells = (8 * cycles as usize).max(8);
            let nodes: Vec<f64> = (0..=cells).map(|k| len * k as f64 / cells as f64).collect();
            let mut values = Vec::with_capacity(nodes.len());
            let mut running = (Vec3::zeros(), 0.0);
            values.push(running);
            for w in nodes.windows(2) {
                let step = acc.transverse_quadrature(w[0], w[1])?;
                running = (running.0 + step.0, running.1 + step.1);
                values.push(running);
            }
            acc.table = Some(CumulativeTable { nodes, values });
        }
        Ok(acc)
    }

    pub fn pulse(&self) -> &PulseModel {
        &self.pulse
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn transverse_quadrature(&self, from: f64, to: f64) -> Result<(Vec3, f64)> {
        let opts = AdaptiveOptions {
            abs_tol: self.tolerance,
            rel_tol: 0.0,
            max_panels: 500,
        };
        let mut parts = [0.0; 4];
        for (k, part) in parts.iter_mut().enumerate() {
            let est = integrate(
                |x| {
                    let a = self.pulse.transverse(x);
                    if k < 3 {
                        a[k]
                    } else {
                        a.norm_squared()
                    }
                },
                from,
                to,
                opts,
            )?;
            *part = est.value;
        }
        Ok((Vec3::new(parts[0], parts[1], parts[2]), parts[3]))
    }

    /// `int_{phi0}^{phi}` of `A_perp` and `|A_perp|^2`.
    fn transverse_cumulative(&self, phi: f64) -> Result<(Vec3, f64)> {
        Ok(match &self.pulse.shape {
            PulseShape::Zero => (Vec3::zeros(), 0.0),
            PulseShape::TopHat { amplitude, start, end } => {
                let len = phi.clamp(*start, *end) - start;
                (amplitude * len, amplitude.norm_squared() * len)
            }
            PulseShape::Monochromatic { a0, polarization, omega } => {
                let (s, c) = (omega * phi).sin_cos();
                let _ = c;
                let i1 = polarization * (a0 * s / omega);
                let i2 = a0 * a0 * polarization.norm_squared() * (0.5 * phi + (2.0 * omega * phi).sin() / (4.0 * omega));
                (i1, i2)
            }
            PulseShape::SinSquared { .. } => {
                let table = self.table.as_ref().expect("sin-squared pulses carry a table");
                let last = *table.nodes.last().expect("table has nodes");
                if phi <= 0.0 {
                    (Vec3::zeros(), 0.0)
                } else if phi >= last {
                    *table.values.last().expect("table has values")
                } else {
                    let h = table.nodes[1] - table.nodes[0];
                    let k = ((phi / h).floor() as usize).min(table.nodes.len() - 2);
                    let base = table.values[k];
                    let step = self.transverse_quadrature(table.nodes[k], phi)?;
                    (base.0 + step.0, base.1 + step.1)
                }
            }
        })
    }

    fn longitudinal_cumulative(&self, phi: f64) -> f64 {
        match &self.pulse.longitudinal {
            LongitudinalProfile::None => 0.0,
            LongitudinalProfile::Rect { value, start, end } => value * (phi.clamp(*start, *end) - start),
            LongitudinalProfile::SinSquared {
                amplitude,
                start,
                length,
            } => {
                let s = (phi - start).clamp(0.0, *length);
                amplitude * (0.5 * s - length / (4.0 * PI) * (2.0 * PI * s / length).sin())
            }
        }
    }

    /// Integrals from `phi0` up to `phi`.
    pub fn integrals(&self, phi: f64) -> Result<PhaseIntegrals> {
        let (a_perp, a_perp_sq) = self.transverse_cumulative(phi)?;
        Ok(PhaseIntegrals {
            a_perp,
            a_perp_sq,
            a_par: self.longitudinal_cumulative(phi),
        })
    }

    /// Integrals over `[from, to]`. Short intervals inside a tabulated pulse
    /// are integrated directly so the result keeps full relative accuracy.
    pub fn integrals_between(&self, from: f64, to: f64) -> Result<PhaseIntegrals> {
        if let PulseShape::SinSquared { omega, .. } = self.pulse.shape {
            if (to - from).abs() < 0.25 / omega {
                let (a_perp, a_perp_sq) = self.transverse_quadrature(from, to)?;
                return Ok(PhaseIntegrals {
                    a_perp,
                    a_perp_sq,
                    a_par: self.longitudinal_cumulative(to) - self.longitudinal_cumulative(from),
                });
            }
        }
        Ok(self.integrals(to)? - self.integrals(from)?)
    }

    /// The Volkov exponent coefficient
    /// `(1/(2 n.p)) int_{phi0}^{phi} [e^2 A^2 -/+ 2 e A.p]` for the given branch.
    pub fn volkov_phase_term(&self, particle: &Particle, p: &OnShellMomentum, branch: Branch, phi: f64) -> Result<f64> {
        let ints = self.integrals(phi)?;
        Ok(volkov_phase_from_integrals(&ints, particle, p, self.pulse.geometry(), branch))
    }

    /// Derivative of [`volkov_phase_term`](Self::volkov_phase_term) with respect to `phi`.
    pub fn volkov_phase_rate(&self, particle: &Particle, p: &OnShellMomentum, branch: Branch, phi: f64) -> f64 {
        let a = self.pulse.eval_potential(phi);
        let geom = self.pulse.geometry();
        let e = particle.charge;
        let v = p.lightfront(geom);
        (e * e * a.square() - branch.sign() * 2.0 * e * a.dot(&p.four())) / (2.0 * v)
    }

    /// `int_{from}^{to} e A0`.
    pub fn a0_phase(&self, particle: &Particle, from: f64, to: f64) -> f64 {
        particle.charge * (self.longitudinal_cumulative(to) - self.longitudinal_cumulative(from))
    }

    /// `(1/2) int_{from}^{to} [(p_perp - e A_perp)^2 + m^2]`.
    pub fn b_coefficient(&self, particle: &Particle, p_perp: &Vec3, from: f64, to: f64) -> Result<f64> {
        let d = self.integrals_between(from, to)?;
        Ok(b_from_integrals(&d, particle, p_perp, to - from))
    }
}

/// The branch phase term from precomputed integrals, using
/// `A.p = a_par (n.p) - A_perp.p_perp` and `A^2 = -|A_perp|^2`.
pub fn volkov_phase_from_integrals(
    ints: &PhaseIntegrals,
    particle: &Particle,
    p: &OnShellMomentum,
    geom: &PropagationGeometry,
    branch: Branch,
) -> f64 {
    let e = particle.charge;
    let v = p.lightfront(geom);
    let a_dot_p = ints.a_par * v - ints.a_perp.dot(&p.spatial());
    (-e * e * ints.a_perp_sq - branch.sign() * 2.0 * e * a_dot_p) / (2.0 * v)
}

/// `b` from integrals over an interval of length `span`.
pub fn b_from_integrals(d: &PhaseIntegrals, particle: &Particle, p_perp: &Vec3, span: f64) -> f64 {
    let e = particle.charge;
    let m2 = particle.mass * particle.mass;
    0.5 * ((p_perp.norm_squared() + m2) * span - 2.0 * e * p_perp.dot(&d.a_perp) + e * e * d.a_perp_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tophat() -> PulseModel {
        PulseModel::new(
            PulseShape::TopHat {
                amplitude: Vec3::new(0.5, 0.0, 0.0),
                start: 0.0,
                end: 10.0,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap()
    }

    fn sin2() -> PulseModel {
        PulseModel::new(
            PulseShape::SinSquared {
                a0: 1.0,
                polarization: Vec3::x(),
                omega: 1.0,
                cycles: 4,
                cep: 0.3,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap()
    }

    #[test]
    fn potential_examples() {
        let zero = PulseModel::zero(PropagationGeometry::along_z());
        assert_eq!(zero.eval_potential(1.3), FourVector::zero());
        let p = tophat();
        assert_eq!(p.eval_potential(-1.0), FourVector::zero());
        assert_eq!(p.eval_potential(3.0), FourVector::new(0.0, Vec3::new(0.5, 0.0, 0.0)));
    }

    #[test]
    fn rejects_longitudinal_amplitude() {
        let res = PulseModel::new(
            PulseShape::TopHat {
                amplitude: Vec3::new(0.0, 0.0, 1.0),
                start: 0.0,
                end: 1.0,
            },
            PropagationGeometry::along_z(),
        );
        assert!(res.is_err());
    }

    #[test]
    fn phase_term_examples() {
        let particle = Particle::default();
        let p0 = particle.momentum(Vec3::zeros()).unwrap();
        let zero = PhaseAccumulator::new(PulseModel::zero(PropagationGeometry::along_z())).unwrap();
        assert_eq!(zero.volkov_phase_term(&particle, &p0, Branch::Plus, 7.0).unwrap(), 0.0);

        let acc = PhaseAccumulator::new(tophat()).unwrap();
        let f = acc.volkov_phase_term(&particle, &p0, Branch::Plus, 4.0).unwrap();
        assert_abs_diff_eq!(f, -0.5, epsilon = 1e-15);
        // Adaptive quadrature of the integrand agrees with the closed form.
        let quad = integrate(
            |x| {
                let a = acc.pulse().eval_potential(x);
                a.square() / 2.0
            },
            0.0,
            4.0,
            AdaptiveOptions::absolute(1e-10),
        )
        .unwrap();
        assert_abs_diff_eq!(quad.value, f, epsilon = 1e-10);
    }

    #[test]
    fn sin_squared_phase_is_constant_after_pulse() {
        let particle = Particle::default();
        let acc = PhaseAccumulator::new(sin2()).unwrap();
        let p = particle.momentum(Vec3::new(0.3, -0.2, 0.4)).unwrap();
        let end = 8.0 * PI;
        let after = acc.volkov_phase_term(&particle, &p, Branch::Plus, end + 1.0).unwrap();
        let later = acc.volkov_phase_term(&particle, &p, Branch::Plus, end + 50.0).unwrap();
        assert_eq!(after, later);
        // Composite Simpson oracle at two resolutions.
        let integrand = |x: f64| {
            let a = acc.pulse().eval_potential(x);
            let v = p.lightfront(acc.pulse().geometry());
            (a.square() + 2.0 * a.dot(&p.four())) / (2.0 * v)
        };
        let simpson = |n: usize| {
            let h = end / n as f64;
            let mut s = integrand(0.0) + integrand(end);
            for k in 1..n {
                s += integrand(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let coarse = simpson(20_000);
        let fine = simpson(40_000);
        assert!((coarse - fine).abs() < 1e-11);
        assert_abs_diff_eq!(after, fine, epsilon = 1e-9);
    }

    #[test]
    fn a0_phase_examples() {
        let particle = Particle::default();
        let acc = PhaseAccumulator::new(tophat()).unwrap();
        assert_eq!(acc.a0_phase(&particle, 0.0, 5.0), 0.0);
        let with_par = PulseModel::with_longitudinal(
            PulseShape::Zero,
            LongitudinalProfile::Rect {
                value: 0.1,
                start: 0.0,
                end: 10.0,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap();
        let acc = PhaseAccumulator::new(with_par).unwrap();
        assert_abs_diff_eq!(acc.a0_phase(&particle, 0.0, 5.0), -0.5, epsilon = 1e-15);
        let quad = integrate(|x| -acc.pulse().longitudinal_value(x), 0.0, 5.0, AdaptiveOptions::default()).unwrap();
        assert_abs_diff_eq!(quad.value, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn b_coefficient_examples() {
        let particle = Particle::default();
        let zero = PhaseAccumulator::new(PulseModel::zero(PropagationGeometry::along_z())).unwrap();
        assert_eq!(zero.b_coefficient(&particle, &Vec3::zeros(), 1.5, 1.5).unwrap(), 0.0);
        assert_abs_diff_eq!(zero.b_coefficient(&particle, &Vec3::zeros(), 0.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        let acc = PhaseAccumulator::new(tophat()).unwrap();
        let b = acc.b_coefficient(&particle, &Vec3::x(), 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(b, 3.25, epsilon = 1e-14);
        // (1.5^2 + 1) * 2 / 2 from the constant integrand.
        assert_abs_diff_eq!(b, 0.5 * (1.5f64.powi(2) + 1.0) * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn monochromatic_matches_quadrature() {
        let pulse = PulseModel::new(
            PulseShape::Monochromatic {
                a0: 0.7,
                polarization: Vec3::y(),
                omega: 1.3,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap();
        let acc = PhaseAccumulator::new(pulse).unwrap();
        assert_eq!(acc.phi0(), 0.0);
        let ints = acc.integrals(2.7).unwrap();
        let q1 = integrate(|x| acc.pulse().transverse(x).y, 0.0, 2.7, AdaptiveOptions::default()).unwrap();
        let q2 = integrate(|x| acc.pulse().transverse(x).norm_squared(), 0.0, 2.7, AdaptiveOptions::default()).unwrap();
        assert_abs_diff_eq!(ints.a_perp.y, q1.value, epsilon = 1e-12);
        assert_abs_diff_eq!(ints.a_perp_sq, q2.value, epsilon = 1e-12);
    }

    #[test]
    fn support_and_origin() {
        assert_eq!(tophat().support(), Some((0.0, 10.0)));
        assert_eq!(tophat().phase_origin(), 0.0);
        assert_eq!(PulseModel::zero(PropagationGeometry::along_z()).phase_origin(), 0.0);
        assert_eq!(tophat().breakpoints(), vec![0.0, 10.0]);
        assert_eq!(tophat().near_discontinuity(9.9995, 1e-3), Some(10.0));
        assert_eq!(tophat().near_discontinuity(5.0, 1e-3), None);
    }
}
