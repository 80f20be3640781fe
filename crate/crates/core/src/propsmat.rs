//! The Volkov-built Feynman propagator, acting on packets through the KG
//! inner product, and first-order transition amplitudes
//! `A_if = -i int d^4x psi_+^*(p2; x) H_int(x) psi_+(p1; x)`.

use crate::error::{invalid, Error, Result};
use crate::kgproduct::{
    project_onto_states, CMatrix, Extent, GaussianEnvelope, KgField, MomentumGrid, SpatialQuadrature, WavePacket,
};
use crate::lightcone::{FourVector, OnShellMomentum, Vec3};
use crate::pulse::{Branch, PhaseIntegrals};
use crate::quadrature::{composite_legendre, integrate_with_breaks, AdaptiveOptions};
use crate::volkov::{normalization, Background};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// A field with a plus-branch and a minus-branch component.
#[derive(Clone, Debug)]
pub struct PacketMix {
    pub plus: Option<WavePacket>,
    pub minus: Option<WavePacket>,
}

impl PacketMix {
    pub fn new(plus: Option<WavePacket>, minus: Option<WavePacket>) -> Result<Self> {
        if plus.is_none() && minus.is_none() {
            return Err(invalid("a packet mix needs at least one component"));
        }
        Ok(Self { plus, minus })
    }

    /// Gaussian components with amplitudes, on equally spaced momentum grids
    /// whose position-space period covers the box around both at time `t`.
    pub fn gaussian(
        bg: &Background,
        sigma: f64,
        plus: Option<(Vec3, Complex64)>,
        minus: Option<(Vec3, Complex64)>,
        t: f64,
        quad: &SpatialQuadrature,
        range_sigmas: f64,
    ) -> Result<Self> {
        let specs: Vec<(Branch, Vec3, Complex64)> = plus
            .map(|(c, a)| (Branch::Plus, c, a))
            .into_iter()
            .chain(minus.map(|(c, a)| (Branch::Minus, c, a)))
            .collect();
        if specs.is_empty() {
            return Err(invalid("a packet mix needs at least one component"));
        }
        let sizing = specs
            .iter()
            .map(|(b, c, _)| WavePacket::gaussian(*b, GaussianEnvelope::new(*c, sigma)?, 2, bg))
            .collect::<Result<Vec<_>>>()?;
        let fields: Vec<&dyn KgField> = sizing.iter().map(|p| p as &dyn KgField).collect();
        let spans = quad.grid(&fields, t, bg)?.spans();
        let periods = spans.map(|s| 1.05 * s);
        let mut out = Self {
            plus: None,
            minus: None,
        };
        for (branch, center, amp) in specs {
            let env = GaussianEnvelope::new(center, sigma)?;
            let grid = MomentumGrid::periodic(center, sigma, range_sigmas, periods, bg)?;
            let packet = WavePacket::gaussian_on(branch, env, grid, bg)?.scaled(amp);
            match branch {
                Branch::Plus => out.plus = Some(packet),
                Branch::Minus => out.minus = Some(packet),
            }
        }
        Ok(out)
    }

    pub fn component(&self, branch: Branch) -> Option<&WavePacket> {
        match branch {
            Branch::Plus => self.plus.as_ref(),
            Branch::Minus => self.minus.as_ref(),
        }
    }

    fn parts(&self) -> impl Iterator<Item = &WavePacket> {
        self.plus.iter().chain(self.minus.iter())
    }

    pub fn value(&self, x: &FourVector) -> Result<Complex64> {
        Ok(KgField::value_and_time_derivative(self, x)?.0)
    }
}

impl KgField for PacketMix {
    fn value_and_time_derivative(&self, x: &FourVector) -> Result<(Complex64, Complex64)> {
        let mut out = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for p in self.parts() {
            let (v, d) = p.value_and_time_derivative(x)?;
            out.0 += v;
            out.1 += d;
        }
        Ok(out)
    }

    fn slice(&self, t: f64, zeta: f64, xi1: &[f64], xi2: &[f64]) -> Result<(CMatrix, CMatrix)> {
        let mut val = CMatrix::zeros(xi1.len(), xi2.len());
        let mut dt = val.clone();
        for p in self.parts() {
            let (v, d) = p.slice(t, zeta, xi1, xi2)?;
            val += v;
            dt += d;
        }
        Ok((val, dt))
    }

    fn extents(&self, t: f64) -> Result<Vec<Extent>> {
        let mut out = Vec::new();
        for p in self.parts() {
            out.extend(p.extents(t)?);
        }
        Ok(out)
    }
}

/// Settings for applying the propagator.
#[derive(Clone, Debug)]
pub struct PropagatorSpec {
    pub background: Background,
    /// Gauss-Hermite nodes per axis of the momentum integral inside the kernel.
    pub momentum_nodes: usize,
    pub quadrature: SpatialQuadrature,
}

impl PropagatorSpec {
    pub fn new(background: Background) -> Self {
        Self {
            background,
            momentum_nodes: 24,
            quadrature: SpatialQuadrature::default(),
        }
    }
}

/// `int d^3r K(x', x) <- field at t_from`, evaluated at `(t_to, x_eval)`.
///
/// The kernel is `-i sum_p psi_b(p; x') <psi_b(p), .>` with `b = plus`
/// for `t_to >= t_from` and `b = minus` otherwise; the result is
/// `-i phi_+(x')` forward and `+i phi_-(x')` backward.
pub fn propagate_packet(spec: &PropagatorSpec, mix: &PacketMix, t_from: f64, t_to: f64, x_eval: &Vec3) -> Result<Complex64> {
    let bg = &spec.background;
    let branch = if t_to >= t_from { Branch::Plus } else { Branch::Minus };
    let guide = mix
        .component(branch)
        .or_else(|| mix.component(opposite(branch)))
        .expect("a mix has at least one component");
    let env = *guide.envelope();
    let grid = MomentumGrid::gauss_hermite(env.center, env.sigma, spec.momentum_nodes, bg)?;
    let spatial = spec.quadrature.grid(&[mix as &dyn KgField], t_from, bg)?;
    let coefficients = project_onto_states(mix, branch, &grid, &spatial, bg)?
        .into_iter()
        .map(|c| c * Complex64::new(0.0, -1.0))
        .collect();
    let propagated = WavePacket::from_coefficients(branch, env, grid, coefficients, bg)?;
    propagated.value(&FourVector::new(t_to, *x_eval))
}

fn opposite(b: Branch) -> Branch {
    match b {
        Branch::Plus => Branch::Minus,
        Branch::Minus => Branch::Plus,
    }
}

/// Envelope `exp(-(phi-c)^2/(2 w^2) - (phitilde-ct)^2/(2 wt^2) - |r_perp-c_perp|^2/(2 wp^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightConeGaussian {
    pub phi: f64,
    pub phitilde: f64,
    pub perp: Vec3,
    pub width_phi: f64,
    pub width_phitilde: f64,
    pub width_perp: f64,
}

/// The perturbation `H_int(x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum InteractionModel {
    /// `g exp(-sum_mu (x_mu - c_mu)^2 / (2 w_mu^2))`
    GaussianBump { g: f64, center: FourVector, widths: [f64; 4] },
    /// `g exp(-i k.x) envelope(x)`
    PlaneWaveProbe { g: f64, k: FourVector, envelope: LightConeGaussian },
}

impl InteractionModel {
    pub fn strength(&self) -> f64 {
        match self {
            InteractionModel::GaussianBump { g, .. } | InteractionModel::PlaneWaveProbe { g, .. } => *g,
        }
    }

    pub fn with_strength(&self, g_new: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            InteractionModel::GaussianBump { g, .. } | InteractionModel::PlaneWaveProbe { g, .. } => *g = g_new,
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            InteractionModel::GaussianBump { g, widths, .. } => g.is_finite() && widths.iter().all(|w| *w > 0.0),
            InteractionModel::PlaneWaveProbe { g, envelope, .. } => {
                g.is_finite() && envelope.width_phi > 0.0 && envelope.width_phitilde > 0.0 && envelope.width_perp > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("interaction widths must be positive and strength finite"))
        }
    }

    /// Probe wave vector, zero for a bump.
    pub fn probe_momentum(&self) -> FourVector {
        match self {
            InteractionModel::PlaneWaveProbe { k, .. } => *k,
            InteractionModel::GaussianBump { .. } => FourVector::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplitudeMethod {
    Full4d,
    Reduced1d,
    ClosedForm,
}

impl AmplitudeMethod {
    pub fn name(self) -> &'static str {
        match self {
            AmplitudeMethod::Full4d => "full-4d",
            AmplitudeMethod::Reduced1d => "reduced-1d",
            AmplitudeMethod::ClosedForm => "closed-form",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeResult {
    pub value: Complex64,
    pub error: f64,
    pub method: AmplitudeMethod,
}

/// First-order S-matrix element `delta(p1 - p2) + A_if`. The delta term is
/// kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrixElement {
    pub forward_delta: bool,
    pub amplitude: AmplitudeResult,
}

impl SMatrixElement {
    pub fn new(p1: &OnShellMomentum, p2: &OnShellMomentum, amplitude: AmplitudeResult) -> Self {
        Self {
            forward_delta: p1.spatial() == p2.spatial(),
            amplitude,
        }
    }
}

/// Tensor-product box for the 4D amplitude quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad4Spec {
    /// Box half-width in envelope widths.
    pub half_widths: f64,
    /// Nodes per axis; the error estimate uses `refined_nodes`.
    pub nodes: usize,
    pub refined_nodes: usize,
}

impl Default for Quad4Spec {
    fn default() -> Self {
        Self {
            half_widths: 8.0,
            nodes: 48,
            refined_nodes: 64,
        }
    }
}

/// Gauss-Legendre nodes on `[a, b]`, about `n` in total, split at `breaks`.
fn axis_nodes(a: f64, b: f64, breaks: &[f64], n: usize) -> Vec<(f64, f64)> {
    let order = 16.min(n).max(2);
    let panels = n.div_ceil(order).max(1);
    composite_legendre(a, b, breaks, (b - a) / panels as f64 * (1.0 + 1e-12), order)
}

struct StatePair<'a> {
    bg: &'a Background,
    p1: OnShellMomentum,
    p2: OnShellMomentum,
}

impl StatePair<'_> {
    /// `F1(phi) - F2(phi)` for plus-branch states.
    fn phase_difference(&self, ints: &PhaseIntegrals) -> f64 {
        let geom = self.bg.geometry();
        let f = |p: &OnShellMomentum| crate::pulse::volkov_phase_from_integrals(ints, &self.bg.particle, p, geom, Branch::Plus);
        f(&self.p1) - f(&self.p2)
    }

    fn prefactor(&self) -> f64 {
        normalization(self.p1.energy()) * normalization(self.p2.energy())
    }

    /// `p2 - p1` as a four-vector.
    fn transfer(&self) -> FourVector {
        self.p2.four() - self.p1.four()
    }
}

fn check_pair(bg: &Background, p1: &OnShellMomentum, p2: &OnShellMomentum) -> Result<()> {
    let m = bg.particle.mass;
    if (p1.mass() - m).abs() > 1e-12 * m || (p2.mass() - m).abs() > 1e-12 * m {
        return Err(invalid("momenta must be on the particle's mass shell"));
    }
    Ok(())
}

fn full_4d_once(pair: &StatePair, interaction: &InteractionModel, spec: &Quad4Spec, nodes: usize) -> Result<Complex64> {
    let bg = pair.bg;
    let geom = *bg.geometry();
    let q = pair.transfer();
    let edges = bg.pulse().breakpoints();
    let sum = match interaction {
        InteractionModel::GaussianBump { g, center, widths } => {
            let h = spec.half_widths;
            let c = [center.t, center.r.x, center.r.y, center.r.z];
            let ax: Vec<Vec<(f64, f64)>> = (0..4).map(|d| axis_nodes(c[d] - h * widths[d], c[d] + h * widths[d], &[], nodes)).collect();
            let env = |d: usize, x: f64| (-(x - c[d]).powi(2) / (2.0 * widths[d] * widths[d])).exp();
            let parts: Vec<Result<Complex64>> = ax[0]
                .par_iter()
                .map(|&(t, wt)| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(z, wz) in &ax[3] {
                        for &(x, wx) in &ax[1] {
                            for &(y, wy) in &ax[2] {
                                let x4 = FourVector::new(t, Vec3::new(x, y, z));
                                let phi = geom.lightcone_coords(&x4).phi;
                                let dphase = pair.phase_difference(&bg.accumulator().integrals(phi)?);
                                let h = env(0, t) * env(1, x) * env(2, y) * env(3, z);
                                acc += Complex64::cis(q.dot(&x4) + dphase) * (h * wt * wx * wy * wz);
                            }
                        }
                    }
                    Ok(acc)
                })
                .collect();
            let mut total = Complex64::new(0.0, 0.0);
            for p in parts {
                total += p?;
            }
            total * *g
        }
        InteractionModel::PlaneWaveProbe { g, k, envelope } => {
            let h = spec.half_widths;
            let e = envelope;
            let ax_phi = axis_nodes(e.phi - h * e.width_phi, e.phi + h * e.width_phi, &edges, nodes);
            let ax_pt = axis_nodes(e.phitilde - h * e.width_phitilde, e.phitilde + h * e.width_phitilde, &[], nodes);
            let cl = geom.to_local(&e.perp);
            let ax1 = axis_nodes(cl[0] - h * e.width_perp, cl[0] + h * e.width_perp, &[], nodes);
            let ax2 = axis_nodes(cl[1] - h * e.width_perp, cl[1] + h * e.width_perp, &[], nodes);
            let (e1, e2) = geom.transverse_basis();
            let total_q = q - *k;
            let gauss = |x: f64, c: f64, w: f64| (-(x - c).powi(2) / (2.0 * w * w)).exp();
            let parts: Vec<Result<Complex64>> = ax_phi
                .par_iter()
                .map(|&(phi, wphi)| {
                    let ints = bg.accumulator().integrals(phi)?;
                    let dphase = pair.phase_difference(&ints);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(pt, wpt) in &ax_pt {
                        for &(x1, w1) in &ax1 {
                            for &(x2, w2) in &ax2 {
                                let r_perp = e1 * x1 + e2 * x2;
                                let x4 = geom.from_lightcone(&crate::lightcone::LightConeCoords {
                                    phi,
                                    phitilde: pt,
                                    r_perp,
                                });
                                let env = gauss(phi, e.phi, e.width_phi)
                                    * gauss(pt, e.phitilde, e.width_phitilde)
                                    * (-(r_perp - e.perp).norm_squared() / (2.0 * e.width_perp * e.width_perp)).exp();
                                let phase = total_q.dot(&x4) + dphase;
                                acc += Complex64::cis(phase) * (env * wphi * wpt * w1 * w2);
                            }
                        }
                    }
                    Ok(acc)
                })
                .collect();
            let mut total = Complex64::new(0.0, 0.0);
            for p in parts {
                total += p?;
            }
            // dt d^3r = (1/2) dphi dphitilde d^2r_perp
            total * (0.5 * *g)
        }
    };
    Ok(sum * Complex64::new(0.0, -pair.prefactor()))
}

/// `A_if` by tensor-product quadrature over a box around the interaction,
/// with the difference from a finer grid as the error estimate.
pub fn transition_amplitude_full(
    p1: &OnShellMomentum,
    p2: &OnShellMomentum,
    interaction: &InteractionModel,
    bg: &Background,
    spec: &Quad4Spec,
) -> Result<AmplitudeResult> {
    check_pair(bg, p1, p2)?;
    interaction.validate()?;
    if spec.nodes < 2 || spec.refined_nodes <= spec.nodes || !(spec.half_widths > 0.0) {
        return Err(invalid("quadrature.amplitude_nodes must be at least 2 and below the refined count"));
    }
    if interaction.strength() == 0.0 {
        return Ok(AmplitudeResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            method: AmplitudeMethod::Full4d,
        });
    }
    let pair = StatePair { bg, p1: *p1, p2: *p2 };
    let coarse = full_4d_once(&pair, interaction, spec, spec.nodes)?;
    let fine = full_4d_once(&pair, interaction, spec, spec.refined_nodes)?;
    Ok(AmplitudeResult {
        value: fine,
        error: (fine - coarse).norm(),
        method: AmplitudeMethod::Full4d,
    })
}

/// `A_if` for a plane-wave probe with the `phitilde` and `r_perp` integrals
/// done analytically and the remaining `phi` integral by adaptive
/// quadrature split at the pulse edges.
pub fn transition_amplitude_reduced(
    p1: &OnShellMomentum,
    p2: &OnShellMomentum,
    probe: &InteractionModel,
    bg: &Background,
    tolerance: f64,
) -> Result<AmplitudeResult> {
    check_pair(bg, p1, p2)?;
    probe.validate()?;
    let InteractionModel::PlaneWaveProbe { g, k, envelope: e } = probe else {
        return Err(invalid("the reduced amplitude needs a plane-wave probe"));
    };
    let geom = *bg.geometry();
    let pair = StatePair { bg, p1: *p1, p2: *p2 };
    let q = pair.transfer() - *k;
    let nq = geom.n().dot(&q);
    let ntq = geom.ntilde().dot(&q);
    let q_perp = geom.perp_decompose(&q.r).1;

    let along_pt = (2.0 * PI).sqrt() * e.width_phitilde
        * Complex64::cis(nq * e.phitilde / 2.0)
        * (-(nq * e.width_phitilde).powi(2) / 8.0).exp();
    let perp = 2.0 * PI * e.width_perp.powi(2)
        * Complex64::cis(-q_perp.dot(&e.perp))
        * (-q_perp.norm_squared() * e.width_perp.powi(2) / 2.0).exp();

    let span = 12.0 * e.width_phi;
    let edges = bg.pulse().breakpoints();
    let mut failure = None;
    let est = integrate_with_breaks(
        |phi| {
            let ints = match bg.accumulator().integrals(phi) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    return Complex64::new(0.0, 0.0);
                }
            };
            let env = (-(phi - e.phi).powi(2) / (2.0 * e.width_phi * e.width_phi)).exp();
            Complex64::cis(ntq * phi / 2.0 + pair.phase_difference(&ints)) * env
        },
        e.phi - span,
        e.phi + span,
        &edges,
        AdaptiveOptions::absolute(tolerance * e.width_phi),
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    let scale = Complex64::new(0.0, -0.5 * g * pair.prefactor()) * along_pt * perp;
    Ok(AmplitudeResult {
        value: scale * est.value,
        error: scale.norm() * est.error,
        method: AmplitudeMethod::Reduced1d,
    })
}

/// Closed form for a Gaussian bump without a laser:
/// `-i g N1 N2 prod_mu (sqrt(2 pi) w_mu) exp(i q.c) exp(-sum q_mu^2 w_mu^2 / 2)`, `q = p2 - p1`.
pub fn gaussian_bump_free_amplitude(
    p1: &OnShellMomentum,
    p2: &OnShellMomentum,
    g: f64,
    center: &FourVector,
    widths: &[f64; 4],
) -> Complex64 {
    let q = p2.four() - p1.four();
    let qs = [q.t, q.r.x, q.r.y, q.r.z];
    let gauss: f64 = (0..4).map(|d| (2.0 * PI).sqrt() * widths[d] * (-(qs[d] * widths[d]).powi(2) / 2.0).exp()).product();
    let n = normalization(p1.energy()) * normalization(p2.energy());
    Complex64::new(0.0, -g * n * gauss) * Complex64::cis(q.dot(center))
}

/// Least-squares slope of `log|A|` against `log g`.
pub fn scaling_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|(g, a)| !(*g > 0.0 && *a > 0.0)) {
        return Err(Error::InvalidParameter("scaling fit needs two or more positive points".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Particle;

    #[test]
    fn zero_strength_gives_zero() {
        let bg = Background::free(Particle::default());
        let p = bg.particle.momentum(Vec3::new(0.1, 0.0, 0.0)).unwrap();
        let bump = InteractionModel::GaussianBump {
            g: 0.0,
            center: FourVector::zero(),
            widths: [1.0; 4],
        };
        let res = transition_amplitude_full(&p, &p, &bump, &bg, &Quad4Spec::default()).unwrap();
        assert_eq!(res.value, Complex64::new(0.0, 0.0));
        assert_eq!(res.method.name(), "full-4d");
    }

    #[test]
    fn delta_flag_follows_momenta() {
        let bg = Background::free(Particle::default());
        let p = bg.particle.momentum(Vec3::new(0.1, 0.0, 0.0)).unwrap();
        let q = bg.particle.momentum(Vec3::new(0.2, 0.0, 0.0)).unwrap();
        let amp = AmplitudeResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            method: AmplitudeMethod::Reduced1d,
        };
        assert!(SMatrixElement::new(&p, &p, amp).forward_delta);
        assert!(!SMatrixElement::new(&p, &q, amp).forward_delta);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1e-3, 1e-2, 1e-1].iter().map(|g| (*g, 3.0 * g)).collect();
        assert!((scaling_slope(&pts).unwrap() - 1.0).abs() < 1e-12);
    }
}
