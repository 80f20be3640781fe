//! Quadrature building blocks: Gauss-Legendre and Gauss-Hermite rules,
//! an adaptive Gauss-Kronrod (7, 15) integrator for real and complex
//! integrands, and the Wynn epsilon algorithm for sequence acceleration.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Values an integrator can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of an interpolatory rule on `[-1, 1]` (or the real line
/// for Gauss-Hermite).
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Maps a `[-1, 1]` rule onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre rule with `n` points on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n > 0, "Gauss-Hermite rule needs at least one node");
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0_f64;
    for i in 0..m {
        // Initial guesses for the largest roots, then extrapolate inward.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n + 1 - i],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 3e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        let w = 2.0 / (pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    // Nodes are stored from most negative to most positive.
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

/// Composite Gauss-Legendre nodes on `[a, b]` split at `breaks` (points
/// outside the interval are ignored). Each segment gets enough panels of
/// `order` nodes that no panel is longer than `max_panel`.
pub fn composite_legendre(a: f64, b: f64, breaks: &[f64], max_panel: f64, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for seg in cuts.windows(2) {
        let len = seg[1] - seg[0];
        if len <= 0.0 {
            continue;
        }
        let panels = (len / max_panel).ceil().max(1.0) as usize;
        let h = len / panels as f64;
        for k in 0..panels {
            let lo = seg[0] + k as f64 * h;
            out.extend(rule.on_interval(lo, lo + h));
        }
    }
    out
}

/// Result of a quadrature with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod evaluation on `[a, b]`: (kronrod value, |K - G|).
pub fn gk15<T: Integrand, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    let err = (k - g).magnitude();
    (k, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Settings for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_panels: 2000,
        }
    }
}

impl AdaptiveOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`, with
/// the interval pre-split at `breaks`.
pub fn integrate_with_breaks<T: Integrand, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = std::iter::once(lo)
        .chain(breaks.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for seg in cuts.windows(2) {
        let (value, error) = gk15(&mut f, seg[0], seg[1]);
        evaluations += 15;
        total = total + value;
        total_err += error;
        heap.push(Panel {
            a: seg[0],
            b: seg[1],
            value,
            error,
        });
    }
    let target = |v: &T| opts.abs_tol.max(opts.rel_tol * v.magnitude());
    while total_err > target(&total) && heap.len() < opts.max_panels {
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum in interval order so the result does not depend on heap history.
    let mut panels: Vec<Panel<T>> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
    let error: f64 = panels.iter().map(|p| p.error).sum();
    if error > target(&value) {
        return Err(Error::Quadrature {
            requested: target(&value),
            achieved: error,
        });
    }
    Ok(Estimate {
        value: value * sign,
        error,
        evaluations,
    })
}

pub fn integrate<T: Integrand, F: FnMut(f64) -> T>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<Estimate<T>> {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums. Returns
/// the accelerated limit and the difference between the two most recent
/// accelerated estimates as an error indicator.
pub fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    match n {
        0 => return (0.0, f64::INFINITY),
        1 => return (partial_sums[0], f64::INFINITY),
        _ => {}
    }
    // e[k] holds column k of the epsilon table for the current diagonal.
    let mut prev: Vec<f64> = partial_sums.to_vec();
    let mut prev_prev = vec![0.0; n + 1];
    let mut estimates: Vec<f64> = vec![partial_sums[n - 1]];
    let mut col = 0;
    while prev.len() > 1 {
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let diff = prev[i + 1] - prev[i];
            let base = prev_prev.get(i + 1).copied().unwrap_or(0.0);
            let v = if diff == 0.0 { f64::INFINITY } else { base + 1.0 / diff };
            next.push(v);
        }
        col += 1;
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if col % 2 == 0 {
            estimates.push(*next.last().expect("non-empty column"));
        }
        prev_prev = prev;
        prev = next;
    }
    let best = *estimates.last().expect("at least one estimate");
    let err = if estimates.len() >= 2 {
        (best - estimates[estimates.len() - 2]).abs()
    } else {
        (partial_sums[n - 1] - partial_sums[n - 2]).abs()
    };
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(7);
        let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(s, 2.0 / 13.0, max_relative = 1e-14);
        let total: f64 = rule.weights.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn hermite_moments() {
        for n in [1, 2, 5, 24, 40] {
            let rule = gauss_hermite(n);
            let m0: f64 = rule.weights.iter().sum();
            assert_relative_eq!(m0, PI.sqrt(), max_relative = 1e-13);
            if n >= 3 {
                let m4: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(4)).sum();
                assert_relative_eq!(m4, 0.75 * PI.sqrt(), max_relative = 1e-13);
            }
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn hermite_fourier_transform() {
        // int exp(-x^2) cos(w x) dx = sqrt(pi) exp(-w^2/4)
        let rule = gauss_hermite(24);
        let w = 3.0;
        let s: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, wt)| wt * (w * x).cos()).sum();
        assert_relative_eq!(s, PI.sqrt() * (-w * w / 4.0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn adaptive_handles_breaks_and_complex() {
        let est = integrate_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0], AdaptiveOptions::default()).unwrap();
        assert_relative_eq!(est.value, 2.5, max_relative = 1e-14);

        let est = integrate(|x: f64| Complex64::new(0.0, x).exp(), 0.0, PI, AdaptiveOptions::default()).unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);

        let rev = integrate(|x: f64| x * x, 1.0, 0.0, AdaptiveOptions::default()).unwrap();
        assert_relative_eq!(rev.value, -1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_reports_failure() {
        let opts = AdaptiveOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_panels: 4,
        };
        let res = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, opts);
        assert!(matches!(res, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut sums = Vec::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            sums.push(s);
        }
        let (v, err) = wynn_epsilon(&sums);
        assert!((v - 2f64.ln()).abs() < 1e-12, "{v}");
        assert!(err < 1e-9);
    }

    #[test]
    fn composite_rule_respects_breaks() {
        let nodes = composite_legendre(-1.0, 3.0, &[0.5, 10.0], 0.75, 6);
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 4.0, max_relative = 1e-14);
        let step: f64 = nodes.iter().map(|(x, w)| w * if *x < 0.5 { 1.0 } else { 0.0 }).sum();
        assert_relative_eq!(step, 1.5, max_relative = 1e-14);
    }
}
