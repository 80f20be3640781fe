//! Regularized oscillatory integrals
//!
//! `S(a,b) = int dv/v sin(a v - b/v)` and `C_n(a,b) = int dv v^n cos(a v - b/v)`
//! on `(eps, L)`, their limits, and the smeared completeness kernels built
//! from them.

use crate::error::{invalid, Error, Result};
use crate::lightcone::Vec3;
use crate::quadrature::{composite_legendre, integrate, integrate_with_breaks, wynn_epsilon, AdaptiveOptions, Integrand};
use crate::volkov::Background;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Regulator schedule `(eps, L)` used for the extrapolated limits.
pub const SCHEDULE: [(f64, f64); 3] = [(1e-2, 1e2), (1e-3, 1e3), (1e-4, 1e4)];

/// The parameters of a regularized integral: phase `a v - b/v` on
/// `[epsilon, l]` with optional damping `exp(-eta v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizedOscillatory {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub l: f64,
    pub eta: f64,
}

impl RegularizedOscillatory {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self {
            a,
            b,
            epsilon: 1e-4,
            l: 1e4,
            eta: 0.0,
        }
        .validated()
    }

    pub fn with_window(self, epsilon: f64, l: f64) -> Result<Self> {
        Self { epsilon, l, ..self }.validated()
    }

    pub fn with_damping(self, eta: f64) -> Result<Self> {
        Self { eta, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(invalid("oscillatory.a and oscillatory.b must be finite"));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid("oscillatory.epsilon must be positive"));
        }
        if !(self.l > self.epsilon) || !self.l.is_finite() {
            return Err(invalid("oscillatory.l must exceed oscillatory.epsilon"));
        }
        if !(self.eta >= 0.0) {
            return Err(invalid("oscillatory.eta must be non-negative"));
        }
        Ok(self)
    }

    fn require_positive_product(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(invalid("oscillatory limit requires a > 0 and b > 0"));
        }
        Ok(())
    }

    /// The `k`-th zero of `a v - b/v - k pi`, increasing in `k`.
    pub fn phase_zero(&self, k: i64) -> f64 {
        let kp = k as f64 * PI;
        let root = (kp * kp + 4.0 * self.a * self.b).sqrt();
        if k >= 0 {
            (kp + root) / (2.0 * self.a)
        } else {
            2.0 * self.b / (root - kp)
        }
    }
}

/// One regulator stage of an extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegulatorStage {
    pub epsilon: f64,
    pub l: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatoryResult {
    pub value: f64,
    pub error: f64,
    pub method: &'static str,
    pub trace: Vec<RegulatorStage>,
}

fn log_integral(reg: &RegularizedOscillatory, lo: f64, hi: f64) -> Result<f64> {
    let (a, b, eta) = (reg.a, reg.b, reg.eta);
    let est = integrate(
        |u: f64| {
            let v = u.exp();
            (a * v - b / v).sin() * (-eta * v).exp()
        },
        lo.ln(),
        hi.ln(),
        AdaptiveOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_panels: 200,
        },
    )?;
    Ok(est.value)
}

/// `int_eps^L dv/v sin(a v - b/v) exp(-eta v)`, integrated between
/// consecutive zeros of the phase.
pub fn s_partial(reg: &RegularizedOscillatory) -> Result<f64> {
    let mut cuts = vec![reg.epsilon];
    if reg.a > 0.0 && reg.b > 0.0 {
        let theta = |v: f64| reg.a * v - reg.b / v;
        let k_lo = (theta(reg.epsilon) / PI).ceil() as i64;
        let k_hi = (theta(reg.l) / PI).floor() as i64;
        cuts.extend((k_lo..=k_hi).map(|k| reg.phase_zero(k)).filter(|&v| v > reg.epsilon && v < reg.l));
    } else {
        // No monotone phase: cut where the phase has advanced by about pi.
        let mut v = reg.epsilon;
        loop {
            let rate = reg.a.abs() + reg.b.abs() / (v * v);
            v += v.min(PI / rate);
            if v >= reg.l {
                break;
            }
            cuts.push(v);
        }
    }
    cuts.push(reg.l);
    let parts: Vec<f64> = cuts
        .par_windows(2)
        .map(|w| log_integral(reg, w[0], w[1]))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Partial sums of the panel integrals to the right of the zero `v_0`
/// (`sum_{k < K} int_{v_k}^{v_{k+1}}`) and to its left.
pub fn s_tail_partial_sums(reg: &RegularizedOscillatory, terms: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    reg.require_positive_product()?;
    let panel = |k: i64| log_integral(reg, reg.phase_zero(k), reg.phase_zero(k + 1));
    let right: Vec<f64> = (0..terms as i64).into_par_iter().map(panel).collect::<Result<_>>()?;
    let left: Vec<f64> = (0..terms as i64).into_par_iter().map(|k| panel(-k - 1)).collect::<Result<_>>()?;
    let cumulate = |xs: Vec<f64>| {
        xs.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect::<Vec<_>>()
    };
    Ok((cumulate(right), cumulate(left)))
}

const TAIL_TERMS: usize = 40;

fn damped_limit(reg: &RegularizedOscillatory) -> Result<f64> {
    let eta0 = 0.05 * reg.a.max(1e-3);
    // Only the right tail is damped; the left one keeps its zero panels.
    let (_, left) = s_tail_partial_sums(reg, TAIL_TERMS)?;
    let (left_lim, _) = wynn_epsilon(&left);
    let at = |eta: f64| -> Result<f64> {
        let right = s_partial(&RegularizedOscillatory {
            eta,
            epsilon: reg.phase_zero(0),
            l: 40.0 / eta,
            ..*reg
        })?;
        Ok(left_lim + right)
    };
    let (s1, s2, s4) = (at(eta0)?, at(eta0 / 2.0)?, at(eta0 / 4.0)?);
    Ok((8.0 * s4 - 6.0 * s2 + s1) / 3.0)
}

/// The `eps -> 0, L -> inf` limit of `S(a, b)`, from zero-to-zero panels and
/// Wynn acceleration of both tails; `eta` damping with Richardson
/// extrapolation is the fallback.
pub fn s_integral(reg: &RegularizedOscillatory, tolerance: f64) -> Result<OscillatoryResult> {
    reg.require_positive_product()?;
    let (right, left) = s_tail_partial_sums(reg, TAIL_TERMS)?;
    let (r, r_err) = wynn_epsilon(&right);
    let (l, l_err) = wynn_epsilon(&left);
    let mut result = OscillatoryResult {
        value: r + l,
        error: r_err + l_err,
        method: "zeros+wynn",
        trace: Vec::new(),
    };
    if !(result.error <= tolerance) {
        let damped = damped_limit(reg)?;
        result = OscillatoryResult {
            error: (damped - result.value).abs(),
            value: damped,
            method: "damped+richardson",
            trace: Vec::new(),
        };
    }
    for (epsilon, l) in SCHEDULE {
        let value = s_partial(&RegularizedOscillatory {
            epsilon,
            l,
            eta: 0.0,
            ..*reg
        })?;
        result.trace.push(RegulatorStage { epsilon, l, value });
    }
    if !(result.error <= tolerance) {
        return Err(Error::Extrapolation {
            stage: "s-integral",
            requested: tolerance,
            achieved: result.error,
        });
    }
    Ok(result)
}

/// Normalized Gaussian test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmearingFunction {
    pub center: f64,
    pub width: f64,
}

impl SmearingFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(invalid("smearing.width must be positive"));
        }
        if !center.is_finite() {
            return Err(invalid("smearing.center must be finite"));
        }
        Ok(Self { center, width })
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = (x - self.center) / self.width;
        (-0.5 * d * d).exp() / ((2.0 * PI).sqrt() * self.width)
    }

    pub fn peak(&self) -> f64 {
        self.value(self.center)
    }

    /// `int g(x) exp(i w x) dx`.
    pub fn fourier(&self, w: f64) -> Complex64 {
        let s = self.width * w;
        Complex64::from_polar((-0.5 * s * s).exp(), self.center * w)
    }
}

/// Power of `v` in `C_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CIndex {
    Zero,
    MinusTwo,
}

impl CIndex {
    pub fn power(self) -> i32 {
        match self {
            CIndex::Zero => 0,
            CIndex::MinusTwo => -2,
        }
    }
}

fn decade_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    (a..=b).map(|d| 10f64.powi(d).ln()).collect()
}

/// Runs the regulator schedule over shells `[eps_k, eps_{k-1}]` and
/// `[L_{k-1}, L_k]`, returning cumulative values per stage.
fn run_schedule<T: Integrand, F: FnMut(f64) -> T>(mut f: F, opts: AdaptiveOptions) -> Result<(Vec<(f64, f64, T)>, f64)> {
    let mut stages = Vec::new();
    let mut total = T::zero();
    let mut quad_err = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (eps, l) in SCHEDULE {
        let pieces: Vec<(f64, f64)> = match prev {
            None => vec![(eps, l)],
            Some((pe, pl)) => vec![(eps, pe), (pl, l)],
        };
        for (lo, hi) in pieces {
            let est = integrate_with_breaks(|u: f64| f(u), lo.ln(), hi.ln(), &decade_breaks(lo, hi), opts)?;
            total = total + est.value;
            quad_err += est.error;
        }
        stages.push((eps, l, total));
        prev = Some((eps, l));
    }
    Ok((stages, quad_err))
}

/// `int g C_n` along the ray `b = kappa a` (`n = 0`, smeared in `a`) or
/// `a = b / kappa` (`n = -2`, smeared in `b`). The limit is `pi g(0)`.
pub fn c_integral_smeared(n: CIndex, kappa: f64, g: &SmearingFunction, tolerance: f64) -> Result<OscillatoryResult> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(invalid("oscillatory.kappa must be positive"));
    }
    let integrand = |u: f64| {
        let v = u.exp();
        let (w, jac) = match n {
            CIndex::Zero => (v - kappa / v, v),
            CIndex::MinusTwo => (v / kappa - 1.0 / v, 1.0 / v),
        };
        g.fourier(w).re * jac
    };
    let opts = AdaptiveOptions {
        abs_tol: 0.01 * tolerance,
        rel_tol: 1e-12,
        max_panels: 4000,
    };
    let (stages, quad_err) = run_schedule(integrand, opts)?;
    let trace: Vec<RegulatorStage> = stages
        .iter()
        .map(|&(epsilon, l, value)| RegulatorStage { epsilon, l, value })
        .collect();
    let k = trace.len();
    let value = trace[k - 1].value;
    let error = (value - trace[k - 2].value).abs() + quad_err;
    if !(error <= tolerance) {
        return Err(Error::Extrapolation {
            stage: "regulator",
            requested: tolerance,
            achieved: error,
        });
    }
    Ok(OscillatoryResult {
        value,
        error,
        method: "ray-smeared",
        trace,
    })
}

/// Separable Gaussian `f(r) = exp(-|r_perp - c_perp|^2 / (2 s_perp^2))
/// exp(-(z - c_z)^2 / (2 s_par^2))` with unit peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTestFunction {
    pub center: Vec3,
    pub width_perp: f64,
    pub width_par: f64,
}

impl GaussianTestFunction {
    pub fn new(center: Vec3, width_perp: f64, width_par: f64) -> Result<Self> {
        if !(width_perp > 0.0) || !(width_par > 0.0) {
            return Err(invalid("completeness.width must be positive"));
        }
        Ok(Self {
            center,
            width_perp,
            width_par,
        })
    }

    pub fn value(&self, r: &Vec3, bg: &Background) -> f64 {
        let geom = bg.geometry();
        let d = r - self.center;
        let (par, perp) = geom.perp_decompose(&d);
        let zp = par.norm() / self.width_par;
        let rp = perp.norm() / self.width_perp;
        (-0.5 * (zp * zp + rp * rp)).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletenessOptions {
    pub tolerance: f64,
    /// Half-width of the longitudinal window in units of `width_par`.
    pub cutoff_widths: f64,
    pub panel_order: usize,
}

impl Default for CompletenessOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            cutoff_widths: 8.0,
            panel_order: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletenessStage {
    pub epsilon: f64,
    pub l: f64,
    pub i1: Complex64,
    pub i2: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessResult {
    pub i1: Complex64,
    pub i2: Complex64,
    /// `f(r)`, the value `i2` should reproduce.
    pub expected: f64,
    pub error: f64,
    pub trace: Vec<CompletenessStage>,
}

#[derive(Clone, Copy, Debug)]
struct Pair(Complex64, Complex64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}
impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}
impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, s: f64) -> Pair {
        Pair(self.0 * s, self.1 * s)
    }
}
impl Integrand for Pair {
    fn zero() -> Self {
        Pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    fn magnitude(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
}

type V2 = [f64; 2];

fn dot2(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Field data along the longitudinal window that does not depend on `v`.
struct SliceData {
    d: f64,
    weight: f64,
    j1: V2,
    j2: f64,
    a_perp: V2,
    a_par: f64,
    gauge: Complex64,
}

/// Smeared completeness kernels at equal times: `int dr' I_1(x, x') f(r')`
/// and `int dr' I_2(x, x') f(r')` at `x = (t, r)`, summed over both
/// branches. The transverse momentum integral is done in closed form, the
/// longitudinal window with composite Gauss-Legendre and `v = n.p` along the
/// regulator schedule.
pub fn completeness_smeared(
    bg: &Background,
    t: f64,
    r: &Vec3,
    f: &GaussianTestFunction,
    opts: &CompletenessOptions,
) -> Result<CompletenessResult> {
    if !(opts.tolerance > 0.0) || !(opts.cutoff_widths > 0.0) || opts.panel_order < 2 {
        return Err(invalid("completeness options must be positive"));
    }
    let geom = bg.geometry();
    let acc = bg.accumulator();
    let pulse = bg.pulse();
    let e = bg.particle.charge;
    let m2 = bg.particle.mass * bg.particle.mass;
    let (e1, e2) = geom.transverse_basis();
    let nz = geom.direction();
    let proj = |x: &Vec3| -> V2 { [x.dot(&e1), x.dot(&e2)] };
    let s2 = f.width_perp * f.width_perp;
    let sp = f.width_par;
    let z = r.dot(&nz);
    let cz = f.center.dot(&nz);
    let rho = {
        let (a, b) = (proj(r), proj(&f.center));
        [a[0] - b[0], a[1] - b[1]]
    };
    let phi = t - z;
    let (zlo, zhi) = (cz - opts.cutoff_widths * sp, cz + opts.cutoff_widths * sp);
    let mut breaks: Vec<f64> = vec![z];
    breaks.extend(pulse.breakpoints().iter().chain(pulse.kinks().iter()).map(|edge| t - edge));
    let a_max = pulse.max_transverse();
    let kmax = e.abs() * a_max + 4.0 / f.width_perp;

    let slices = |v: f64| -> Result<Vec<SliceData>> {
        let rate = 0.5 * v + (m2 + kmax * kmax) / (2.0 * v);
        let h = (0.5 * sp).min(PI / rate).min(2.0 * s2 * v);
        let rule = composite_legendre(zlo, zhi, &breaks, h, opts.panel_order);
        rule.iter()
            .map(|&(zp, w)| {
                let phi_p = t - zp;
                let ints = acc.integrals_between(phi_p, phi)?;
                let dz = (zp - cz) / sp;
                Ok(SliceData {
                    d: zp - z,
                    weight: w * (-0.5 * dz * dz).exp(),
                    j1: proj(&ints.a_perp),
                    j2: ints.a_perp_sq,
                    a_perp: proj(&pulse.transverse(phi_p)),
                    a_par: pulse.longitudinal_value(phi_p),
                    gauge: Complex64::from_polar(1.0, -e * ints.a_par),
                })
            })
            .collect()
    };

    let prefactor = 1.0 / (2.0 * (2.0 * PI).powi(3));
    let i = Complex64::i();
    let mut failure: Option<Error> = None;
    let integrand = |u: f64| -> Pair {
        let v = u.exp();
        let data = match slices(v) {
            Ok(d) => d,
            Err(err) => {
                failure.get_or_insert(err);
                return Pair::zero();
            }
        };
        let mut sum = Pair::zero();
        for s in &data {
            let mut g = [Complex64::new(0.0, 0.0); 2];
            let mut kexp = [Complex64::new(0.0, 0.0); 2];
            for (idx, sigma) in [1.0, -1.0].into_iter().enumerate() {
                let alpha = Complex64::new(s2, sigma * s.d / v);
                let beta = [rho[0] + sigma * e * s.j1[0] / v, rho[1] + sigma * e * s.j1[1] / v];
                let phase = 0.5 * s.d * v - (s.d * m2 + e * e * s.j2) / (2.0 * v);
                let expo = -dot2(beta, beta) / (2.0 * alpha) + i * (sigma * phase);
                g[idx] = 4.0 * PI * PI * s2 / alpha * expo.exp();
                let mu = [i * beta[0] / alpha, i * beta[1] / alpha];
                let mu_mu = mu[0] * mu[0] + mu[1] * mu[1];
                let mu_a = mu[0] * s.a_perp[0] + mu[1] * s.a_perp[1];
                kexp[idx] = mu_mu + 2.0 / alpha - 2.0 * e * mu_a + e * e * dot2(s.a_perp, s.a_perp) + m2;
            }
            let diff = (g[0] - g[1]) / v;
            let first = diff;
            let second = 0.5 * (g[0] * (1.0 + kexp[0] / (v * v)) + g[1] * (1.0 + kexp[1] / (v * v))) - e * s.a_par * diff;
            let w = s.gauge * s.weight;
            sum = sum + Pair(w * first, w * second);
        }
        // dv = v du
        sum * (prefactor * v)
    };
    let quad = AdaptiveOptions {
        abs_tol: 0.01 * opts.tolerance,
        rel_tol: 0.0,
        max_panels: 4000,
    };
    let (stages, quad_err) = run_schedule(integrand, quad)?;
    if let Some(err) = failure {
        return Err(err);
    }
    let trace: Vec<CompletenessStage> = stages
        .iter()
        .map(|&(epsilon, l, Pair(i1, i2))| CompletenessStage { epsilon, l, i1, i2 })
        .collect();
    let k = trace.len();
    let last = trace[k - 1];
    let before = trace[k - 2];
    let error = (last.i1 - before.i1).norm().max((last.i2 - before.i2).norm()) + quad_err;
    if !(error <= opts.tolerance) {
        return Err(Error::Extrapolation {
            stage: "completeness regulator",
            requested: opts.tolerance,
            achieved: error,
        });
    }
    Ok(CompletenessResult {
        i1: last.i1,
        i2: last.i2,
        expected: f.value(r, bg),
        error,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightcone::PropagationGeometry;
    use crate::pulse::{Particle, PulseModel, PulseShape};

    #[test]
    fn phase_zeros_are_zeros() {
        let reg = RegularizedOscillatory::new(1.3, 0.7).unwrap();
        for k in -50..50 {
            let v = reg.phase_zero(k);
            assert!(v > 0.0);
            let theta = reg.a * v - reg.b / v;
            assert!((theta - k as f64 * PI).abs() < 1e-9 * (1.0 + k.abs() as f64));
        }
    }

    #[test]
    fn s_vanishes() {
        let reg = RegularizedOscillatory::new(1.0, 1.0).unwrap();
        let res = s_integral(&reg, 1e-6).unwrap();
        assert!(res.value.abs() < 1e-8, "{res:?}");
        assert_eq!(res.trace.len(), 3);
    }

    #[test]
    fn s_partial_matches_sine_integral_when_b_is_zero() {
        // int_eps^L sin(v)/v dv with small eps -> Si(L) - eps.
        let reg = RegularizedOscillatory {
            a: 1.0,
            b: 0.0,
            epsilon: 1e-6,
            l: 1e3,
            eta: 0.0,
        };
        let got = s_partial(&reg).unwrap();
        // Si(1000) = pi/2 - cos(1000)/1000 - sin(1000)/1e6 + ...
        let si = PI / 2.0 - 1000f64.cos() / 1000.0 - 1000f64.sin() / 1e6;
        assert!((got - si).abs() < 1e-6, "{got} vs {si}");
    }

    #[test]
    fn damped_fallback_agrees() {
        let reg = RegularizedOscillatory::new(2.0, 0.5).unwrap();
        let damped = damped_limit(&reg).unwrap();
        assert!(damped.abs() < 1e-3, "{damped}");
    }

    #[test]
    fn c_limits() {
        let g = SmearingFunction::gaussian(0.0, 0.2).unwrap();
        for n in [CIndex::Zero, CIndex::MinusTwo] {
            let res = c_integral_smeared(n, 1.0, &g, 1e-6).unwrap();
            assert!((res.value - PI * g.peak()).abs() < 1e-6 * PI * g.peak(), "{res:?}");
        }
    }

    #[test]
    fn completeness_zero_field_center() {
        let bg = Background::free(Particle::default());
        let f = GaussianTestFunction::new(Vec3::zeros(), 1.0, 1.0).unwrap();
        let res = completeness_smeared(&bg, 0.0, &Vec3::zeros(), &f, &CompletenessOptions::default()).unwrap();
        assert!(res.i1.norm() < 1e-4, "{res:?}");
        assert!((res.i2 - 1.0).norm() < 1e-4, "{res:?}");
    }

    #[test]
    fn completeness_inside_tophat() {
        let pulse = PulseModel::new(
            PulseShape::TopHat {
                amplitude: Vec3::new(0.5, 0.0, 0.0),
                start: 0.0,
                end: 60.0,
            },
            PropagationGeometry::along_z(),
        )
        .unwrap();
        let bg = Background::new(Particle::default(), pulse).unwrap();
        let f = GaussianTestFunction::new(Vec3::zeros(), 1.0, 1.0).unwrap();
        let r = Vec3::new(0.5, 0.0, 0.3);
        let res = completeness_smeared(&bg, 30.0, &r, &f, &CompletenessOptions::default()).unwrap();
        assert!(res.i1.norm() < 1e-4, "{res:?}");
        assert!((res.i2 - res.expected).norm() < 1e-4, "{res:?}");
    }
}
