//! Gaussian wave packets built from Volkov states and the constant-time
//! Klein-Gordon inner product
//! `<f, g> = int d^3r [f* i d_t g - g i d_t f* - 2 e A0 f* g]`.
//!
//! Fields are evaluated on tensor grids in the local frame `(e1, e2, n)`.
//! At fixed `t` and `zeta = n.r` the Volkov phase is separable in the two
//! transverse coordinates, so a packet on a transverse grid is two small
//! matrix products away from a sum over its momentum nodes.

use crate::error::{invalid, Error, Result};
use crate::lightcone::{FourVector, OnShellMomentum, Vec3};
use crate::pulse::Branch;
use crate::quadrature::{composite_legendre, gauss_hermite};
use crate::volkov::{normalization, Background};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

/// `c(p) = (pi sigma^2)^{-3/4} exp(-|p - center|^2 / (2 sigma^2))`, so that
/// `int |c|^2 d^3p = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianEnvelope {
    pub center: Vec3,
    pub sigma: f64,
}

impl GaussianEnvelope {
    pub fn new(center: Vec3, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("packet.sigma must be positive"));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(invalid("packet.center must be finite"));
        }
        Ok(Self { center, sigma })
    }

    pub fn value(&self, p: &Vec3) -> f64 {
        let s2 = self.sigma * self.sigma;
        (PI * s2).powf(-0.75) * (-(p - self.center).norm_squared() / (2.0 * s2)).exp()
    }

    /// `int c_self c_other d^3p`
    pub fn overlap(&self, other: &GaussianEnvelope) -> f64 {
        let (a, b) = (self.sigma * self.sigma, other.sigma * other.sigma);
        let d2 = (self.center - other.center).norm_squared();
        (PI * a).powf(-0.75) * (PI * b).powf(-0.75) * (2.0 * PI * a * b / (a + b)).powf(1.5) * (-d2 / (2.0 * (a + b))).exp()
    }

    /// Position-space standard deviation of `|packet|^2` at focus.
    pub fn position_width(&self) -> f64 {
        1.0 / (2.0f64.sqrt() * self.sigma)
    }
}

/// Tensor-product Gauss-Hermite nodes in the local frame, matched to a
/// Gaussian of width `sigma` about `center`. Weights integrate plain
/// functions: `sum w f(p) ~ int f d^3p`.
#[derive(Clone, Debug)]
pub struct MomentumGrid {
    axes: [Vec<f64>; 3],
    weights: [Vec<f64>; 3],
    center: Vec3,
    sigma: f64,
}

impl MomentumGrid {
    pub fn gauss_hermite(center: Vec3, sigma: f64, nodes: usize, bg: &Background) -> Result<Self> {
        if nodes < 2 {
            return Err(invalid("quadrature.momentum_nodes must be at least 2"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("packet.sigma must be positive"));
        }
        let rule = gauss_hermite(nodes);
        let local = bg.geometry().to_local(&center);
        let scale = 2.0f64.sqrt() * sigma;
        let mut axes: [Vec<f64>; 3] = Default::default();
        let mut weights: [Vec<f64>; 3] = Default::default();
        for d in 0..3 {
            axes[d] = rule.nodes.iter().map(|x| local[d] + scale * x).collect();
            weights[d] = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| scale * w * (x * x).exp())
                .collect();
        }
        Ok(Self {
            axes,
            weights,
            center,
            sigma,
        })
    }

    /// Equally spaced nodes covering `center +/- range_sigmas * sigma` with
    /// spacing `2 pi / periods[d]` along local axis `d`. The sum over nodes is
    /// then exactly periodic in position with those periods, so a box
    /// shorter than the periods sees no spurious images of the packet.
    pub fn periodic(center: Vec3, sigma: f64, range_sigmas: f64, periods: [f64; 3], bg: &Background) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("packet.sigma must be positive"));
        }
        if !(range_sigmas > 0.0) || periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(invalid("quadrature.momentum_range must be positive"));
        }
        let local = bg.geometry().to_local(&center);
        let mut axes: [Vec<f64>; 3] = Default::default();
        let mut weights: [Vec<f64>; 3] = Default::default();
        for d in 0..3 {
            let step = 2.0 * PI / periods[d];
            let half = (range_sigmas * sigma / step).ceil() as i64;
            axes[d] = (-half..=half).map(|k| local[d] + step * k as f64).collect();
            weights[d] = vec![step; axes[d].len()];
        }
        Ok(Self {
            axes,
            weights,
            center,
            sigma,
        })
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.axes[0].len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Local-frame node coordinates along axis `d`.
    pub fn axis(&self, d: usize) -> &[f64] {
        &self.axes[d]
    }

    /// Nodes and weights in index order `(i * n2 + j) * n3 + k`.
    pub fn points(&self, bg: &Background) -> Vec<(Vec3, f64)> {
        let geom = bg.geometry();
        let mut out = Vec::with_capacity(self.len());
        for (i, p1) in self.axes[0].iter().enumerate() {
            for (j, p2) in self.axes[1].iter().enumerate() {
                for (k, pn) in self.axes[2].iter().enumerate() {
                    let w = self.weights[0][i] * self.weights[1][j] * self.weights[2][k];
                    out.push((geom.from_local([*p1, *p2, *pn]), w));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct Node {
    p: Vec3,
    momentum: OnShellMomentum,
    energy: f64,
    lightfront: f64,
    along: f64,
    /// Quadrature weight times coefficient times normalization.
    amplitude: Complex64,
}

/// A superposition `sum_k w_k c_k psi_branch(p_k; x)` over a momentum grid.
#[derive(Clone, Debug)]
pub struct WavePacket {
    branch: Branch,
    envelope: GaussianEnvelope,
    grid: MomentumGrid,
    coefficients: Vec<Complex64>,
    nodes: Vec<Node>,
    bg: Background,
}

impl WavePacket {
    /// Gaussian packet with `momentum_nodes` Gauss-Hermite nodes per axis.
    pub fn gaussian(branch: Branch, envelope: GaussianEnvelope, momentum_nodes: usize, bg: &Background) -> Result<Self> {
        let grid = MomentumGrid::gauss_hermite(envelope.center, envelope.sigma, momentum_nodes, bg)?;
        Self::gaussian_on(branch, envelope, grid, bg)
    }

    /// Gaussian packet sampled on a given grid.
    pub fn gaussian_on(branch: Branch, envelope: GaussianEnvelope, grid: MomentumGrid, bg: &Background) -> Result<Self> {
        let coefficients = grid
            .points(bg)
            .iter()
            .map(|(p, _)| Complex64::new(envelope.value(p), 0.0))
            .collect();
        Self::from_coefficients(branch, envelope, grid, coefficients, bg)
    }

    /// A packet with arbitrary coefficients on `grid`; `envelope` is only
    /// used to size quadrature boxes.
    pub fn from_coefficients(
        branch: Branch,
        envelope: GaussianEnvelope,
        grid: MomentumGrid,
        coefficients: Vec<Complex64>,
        bg: &Background,
    ) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(invalid("coefficient count does not match the momentum grid"));
        }
        let geom = bg.geometry();
        let nodes = grid
            .points(bg)
            .into_iter()
            .zip(&coefficients)
            .map(|((p, w), c)| {
                let momentum = bg.particle.momentum(p)?;
                let energy = momentum.energy();
                Ok(Node {
                    p,
                    momentum,
                    energy,
                    lightfront: momentum.lightfront(geom),
                    along: geom.direction().dot(&p),
                    amplitude: c * (w * normalization(energy)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            branch,
            envelope,
            grid,
            coefficients,
            nodes,
            bg: bg.clone(),
        })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn envelope(&self) -> &GaussianEnvelope {
        &self.envelope
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn background(&self) -> &Background {
        &self.bg
    }

    /// The same packet with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.coefficients.iter_mut().for_each(|c| *c *= factor);
        out.nodes.iter_mut().for_each(|n| n.amplitude *= factor);
        out
    }

    /// Branch phase term `s F_s(phi)` and its rate for one node, from the
    /// integrals and potential at `phi`.
    fn node_phase(&self, node: &Node, ints: &crate::pulse::PhaseIntegrals, a: &FourVector) -> (f64, f64) {
        let s = self.branch.sign();
        let e = self.bg.particle.charge;
        let v = node.lightfront;
        let f = (-e * e * ints.a_perp_sq - s * 2.0 * e * (ints.a_par * v - ints.a_perp.dot(&node.p))) / (2.0 * v);
        let a_perp = a.r - self.bg.geometry().direction() * a.t;
        let rate = (-e * e * a_perp.norm_squared() - s * 2.0 * e * (a.t * v - a_perp.dot(&node.p))) / (2.0 * v);
        (f, rate)
    }

    /// Point value by direct summation over the momentum nodes.
    pub fn value(&self, x: &FourVector) -> Result<Complex64> {
        Ok(self.value_and_time_derivative(x)?.0)
    }

    pub fn value_and_time_derivative(&self, x: &FourVector) -> Result<(Complex64, Complex64)> {
        let phi = self.bg.geometry().lightcone_coords(x).phi;
        let ints = self.bg.accumulator().integrals(phi)?;
        let a = self.bg.pulse().eval_potential(phi);
        let s = self.branch.sign();
        let mut val = Complex64::new(0.0, 0.0);
        let mut dt = Complex64::new(0.0, 0.0);
        for node in &self.nodes {
            let (f, rate) = self.node_phase(node, &ints, &a);
            let theta = -s * node.momentum.four().dot(x) + s * f;
            let term = node.amplitude * Complex64::cis(theta);
            val += term;
            dt += term * Complex64::new(0.0, s * (rate - node.energy));
        }
        Ok((val, dt))
    }

    /// Compares the point value with a packet on a grid with `extra` more
    /// nodes per axis. Returns the absolute change.
    pub fn check_resolution(&self, x: &FourVector, extra: usize, tolerance: f64) -> Result<f64> {
        let finer = WavePacket::gaussian(self.branch, self.envelope, self.grid.nodes_per_axis() + extra, &self.bg)?;
        let change = (finer.value(x)? - self.value(x)?).norm();
        let scale = self.peak_estimate(x.t);
        if change > tolerance * scale {
            return Err(Error::GridResolution {
                change: change / scale,
                tolerance,
            });
        }
        Ok(change)
    }

    /// Rough peak magnitude of a Gaussian packet at time `t`.
    fn peak_estimate(&self, t: f64) -> f64 {
        let w0 = self.envelope.position_width();
        let w = self.width(t);
        let e = (self.bg.particle.mass.powi(2) + self.envelope.center.norm_squared()).sqrt();
        (PI * self.envelope.sigma.powi(2)).powf(-0.75) * (2.0 * PI * self.envelope.sigma.powi(2)).powf(1.5) * normalization(e) * (w0 / w).powf(1.5)
    }

    /// Position of the classical trajectory with the envelope's central
    /// momentum at time `t`; the packet is focused there at `t = 0` before
    /// the pulse.
    pub fn classical_center(&self, t: f64) -> Result<Vec3> {
        let geom = *self.bg.geometry();
        let acc = self.bg.accumulator();
        let e = self.bg.particle.charge;
        let m2 = self.bg.particle.mass.powi(2);
        let p = self.bg.particle.momentum(self.envelope.center)?;
        let v = p.lightfront(&geom);
        let s = self.branch.sign();
        let p_perp = p.perp(&geom) * s;
        let phitilde = |phi: f64| -> Result<(f64, Vec3)> {
            let ints = acc.integrals(phi)?;
            let pt = ((m2 + p_perp.norm_squared()) * phi + e * e * ints.a_perp_sq - 2.0 * e * p_perp.dot(&ints.a_perp)) / (v * v);
            let r_perp = (p_perp * phi - ints.a_perp * e) / v * s;
            Ok((pt, r_perp))
        };
        // phi + phitilde(phi) is increasing; bracket 2t and bisect.
        let target = 2.0 * t;
        let g = |phi: f64| -> Result<f64> { Ok(phi + phitilde(phi)?.0 - target) };
        let mut step = 1.0 + t.abs();
        let (mut lo, mut hi) = (t - step, t + step);
        while g(lo)? > 0.0 {
            step *= 2.0;
            lo = t - step;
        }
        while g(hi)? < 0.0 {
            step *= 2.0;
            hi = t + step;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-13 * (1.0 + t.abs()) {
                break;
            }
        }
        let phi = 0.5 * (lo + hi);
        let (pt, r_perp) = phitilde(phi)?;
        Ok(r_perp + geom.direction() * (0.5 * (pt - phi)))
    }

    /// Position-space width at time `t`, grown for dispersion and for the
    /// extra velocity spread a pulse can impart.
    pub fn width(&self, t: f64) -> f64 {
        let m = self.bg.particle.mass;
        let kick = self.bg.particle.charge.abs() * self.bg.pulse().max_transverse() / m;
        let spread = self.envelope.sigma / m * (1.0 + kick * kick);
        let w0 = self.envelope.position_width();
        // While a finite pulse passes, parts of the packet at different
        // phases have received different kicks.
        let shear = match self.bg.pulse().support() {
            Some((a, b)) if a < b && t > a - 8.0 * w0 && t < b + 8.0 * w0 => 0.5 * kick * (b - a),
            None if kick > 0.0 => kick / self.bg.pulse().carrier_frequency().max(1e-12),
            _ => 0.0,
        };
        (w0 * w0 + (spread * t).powi(2) + shear * shear).sqrt()
    }

    /// Largest transverse wavenumber the packet carries, used to choose
    /// spatial node spacing.
    pub fn max_wavenumber(&self) -> f64 {
        let e = self.bg.particle.charge.abs();
        self.envelope.center.norm() + 7.0 * self.envelope.sigma + e * self.bg.pulse().max_transverse()
    }
}

/// Where a field lives at a given time, for sizing quadrature boxes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extent {
    pub center: Vec3,
    pub width: f64,
    pub max_wavenumber: f64,
}

/// A field that can be sampled, with its exact time derivative, on the
/// transverse grid of a constant-`zeta` slice.
pub trait KgField: Sync {
    fn value_and_time_derivative(&self, x: &FourVector) -> Result<(Complex64, Complex64)>;

    /// `(psi, d_t psi)` at `(t, xi1[a] e1 + xi2[b] e2 + zeta n)`.
    fn slice(&self, t: f64, zeta: f64, xi1: &[f64], xi2: &[f64]) -> Result<(CMatrix, CMatrix)>;

    fn extents(&self, t: f64) -> Result<Vec<Extent>>;
}

impl KgField for WavePacket {
    fn value_and_time_derivative(&self, x: &FourVector) -> Result<(Complex64, Complex64)> {
        WavePacket::value_and_time_derivative(self, x)
    }

    fn slice(&self, t: f64, zeta: f64, xi1: &[f64], xi2: &[f64]) -> Result<(CMatrix, CMatrix)> {
        let phi = t - zeta;
        let ints = self.bg.accumulator().integrals(phi)?;
        let a = self.bg.pulse().eval_potential(phi);
        let s = self.branch.sign();
        let (n1, n2) = (self.grid.axes[0].len(), self.grid.axes[1].len());
        let n3 = self.grid.axes[2].len();
        let mut m = CMatrix::zeros(n1, n2);
        let mut mt = CMatrix::zeros(n1, n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut acc_t = Complex64::new(0.0, 0.0);
                for node in &self.nodes[(i * n2 + j) * n3..(i * n2 + j + 1) * n3] {
                    let (f, rate) = self.node_phase(node, &ints, &a);
                    let theta = s * (-node.energy * t + node.along * zeta + f);
                    let term = node.amplitude * Complex64::cis(theta);
                    acc += term;
                    acc_t += term * Complex64::new(0.0, s * (rate - node.energy));
                }
                m[(i, j)] = acc;
                mt[(i, j)] = acc_t;
            }
        }
        let u = CMatrix::from_fn(xi1.len(), n1, |r, i| Complex64::cis(s * self.grid.axes[0][i] * xi1[r]));
        let vt = CMatrix::from_fn(n2, xi2.len(), |j, c| Complex64::cis(s * self.grid.axes[1][j] * xi2[c]));
        Ok((&u * m * &vt, &u * mt * &vt))
    }

    fn extents(&self, t: f64) -> Result<Vec<Extent>> {
        Ok(vec![Extent {
            center: self.classical_center(t)?,
            width: self.width(t),
            max_wavenumber: self.max_wavenumber(),
        }])
    }
}

/// Settings for spatial boxes around a set of fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialQuadrature {
    /// Box half-width in units of the packet position width.
    pub half_widths: f64,
    /// Minimum trapezoid nodes per transverse axis.
    pub transverse_nodes: usize,
    /// Longitudinal Gauss-Legendre panel length and order.
    pub panel_length: f64,
    pub panel_order: usize,
    /// Largest allowed ratio of boundary to peak magnitude.
    pub truncation_limit: f64,
}

impl Default for SpatialQuadrature {
    fn default() -> Self {
        Self {
            half_widths: 8.0,
            transverse_nodes: 96,
            panel_length: 6.0,
            panel_order: 12,
            truncation_limit: 1e-5,
        }
    }
}

impl SpatialQuadrature {
    /// A finer version for error estimation.
    pub fn refined(&self) -> Self {
        Self {
            transverse_nodes: self.transverse_nodes * 3 / 2,
            panel_length: self.panel_length * 2.0 / 3.0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_widths > 0.0) {
            return Err(invalid("quadrature.half_widths must be positive"));
        }
        if self.transverse_nodes < 4 {
            return Err(invalid("quadrature.spatial_nodes must be at least 4"));
        }
        if !(self.panel_length > 0.0) || self.panel_order < 2 {
            return Err(invalid("quadrature.panel_length must be positive and panel_order at least 2"));
        }
        if !(self.truncation_limit > 0.0) {
            return Err(invalid("quadrature.truncation_limit must be positive"));
        }
        Ok(())
    }

    /// A box at time `t` covering every field's extent.
    pub fn grid(&self, fields: &[&dyn KgField], t: f64, bg: &Background) -> Result<SpatialGrid> {
        self.validate()?;
        let geom = bg.geometry();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut kmax: f64 = 0.0;
        for f in fields {
            for ext in f.extents(t)? {
                let c = geom.to_local(&ext.center);
                for d in 0..3 {
                    lo[d] = lo[d].min(c[d] - self.half_widths * ext.width);
                    hi[d] = hi[d].max(c[d] + self.half_widths * ext.width);
                }
                kmax = kmax.max(ext.max_wavenumber);
            }
        }
        if fields.is_empty() {
            return Err(invalid("no fields to integrate"));
        }
        // Products of two fields carry wavenumbers up to 2 kmax; keep the
        // trapezoid spacing below the aliasing limit pi / kmax.
        let spacing = 0.8 * PI / kmax.max(1e-3);
        let transverse = |d: usize| {
            let len = hi[d] - lo[d];
            let n = self.transverse_nodes.max((len / spacing).ceil() as usize + 1);
            trapezoid(lo[d], hi[d], n)
        };
        let edges: Vec<f64> = bg.pulse().breakpoints().iter().map(|e| t - e).collect();
        let panel = self.panel_length.min(spacing * self.panel_order as f64 / 4.0);
        let zeta = composite_legendre(lo[2], hi[2], &edges, panel, self.panel_order);
        Ok(SpatialGrid {
            t,
            xi1: transverse(0),
            xi2: transverse(1),
            zeta,
            truncation_limit: self.truncation_limit,
        })
    }
}

fn trapezoid(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| {
            let w = if k == 0 || k == n - 1 { 0.5 * h } else { h };
            (a + h * k as f64, w)
        })
        .collect()
}

/// Nodes and weights of a spatial box at a fixed time, in local-frame
/// coordinates `(xi1, xi2, zeta)`.
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    pub t: f64,
    pub xi1: Vec<(f64, f64)>,
    pub xi2: Vec<(f64, f64)>,
    pub zeta: Vec<(f64, f64)>,
    pub truncation_limit: f64,
}

impl SpatialGrid {
    pub fn len(&self) -> usize {
        self.xi1.len() * self.xi2.len() * self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Box lengths along `(e1, e2, n)`.
    pub fn spans(&self) -> [f64; 3] {
        let span = |v: &[(f64, f64)]| v.last().map_or(0.0, |l| l.0) - v.first().map_or(0.0, |f| f.0);
        // Gauss-Legendre nodes stop short of the box ends by less than a panel.
        [span(&self.xi1), span(&self.xi2), span(&self.zeta)]
    }

    pub fn transverse_coordinates(&self) -> (Vec<f64>, Vec<f64>) {
        (self.xi1.iter().map(|p| p.0).collect(), self.xi2.iter().map(|p| p.0).collect())
    }
}

/// Gram matrix of a list of fields with the largest boundary-to-peak ratio
/// seen over all fields.
#[derive(Clone, Debug)]
pub struct GramResult {
    pub matrix: CMatrix,
    pub boundary_ratio: f64,
}

struct SliceSums {
    gram: CMatrix,
    peak: Vec<f64>,
    boundary: Vec<f64>,
}

/// `G_ij = <f_i, f_j>` on `grid`. Fails with [`Error::BoxTruncation`] if any
/// field is not negligible on the box boundary.
pub fn gram_matrix(fields: &[&dyn KgField], grid: &SpatialGrid, bg: &Background) -> Result<GramResult> {
    let k = fields.len();
    let (xi1, xi2) = grid.transverse_coordinates();
    let wt = DMatrix::from_fn(xi1.len(), xi2.len(), |a, b| grid.xi1[a].1 * grid.xi2[b].1);
    let e = bg.particle.charge;
    let last = grid.zeta.len().saturating_sub(1);
    let slices: Vec<SliceSums> = grid
        .zeta
        .par_iter()
        .enumerate()
        .map(|(idx, &(zeta, wz))| {
            let a0 = bg.pulse().longitudinal_value(grid.t - zeta);
            let sampled = fields
                .iter()
                .map(|f| f.slice(grid.t, zeta, &xi1, &xi2))
                .collect::<Result<Vec<_>>>()?;
            let mut gram = CMatrix::zeros(k, k);
            let i = Complex64::i();
            for (r, (fv, ft)) in sampled.iter().enumerate() {
                for (c, (gv, gt)) in sampled.iter().enumerate() {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for ((w, (f, fdt)), (g, gdt)) in wt.iter().zip(fv.iter().zip(ft.iter())).zip(gv.iter().zip(gt.iter())) {
                        let fc = f.conj();
                        sum += (fc * i * gdt - g * i * fdt.conj() - fc * g * (2.0 * e * a0)) * *w;
                    }
                    gram[(r, c)] = sum * wz;
                }
            }
            let mut peak = vec![0.0; k];
            let mut boundary = vec![0.0; k];
            for (n, (fv, _)) in sampled.iter().enumerate() {
                let (rows, cols) = fv.shape();
                for a in 0..rows {
                    for b in 0..cols {
                        let m = fv[(a, b)].norm();
                        peak[n] = f64::max(peak[n], m);
                        if idx == 0 || idx == last || a == 0 || b == 0 || a == rows - 1 || b == cols - 1 {
                            boundary[n] = f64::max(boundary[n], m);
                        }
                    }
                }
            }
            Ok(SliceSums { gram, peak, boundary })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut matrix = CMatrix::zeros(k, k);
    let mut peak = vec![0.0f64; k];
    let mut boundary = vec![0.0f64; k];
    for s in &slices {
        matrix += &s.gram;
        for n in 0..k {
            peak[n] = peak[n].max(s.peak[n]);
            boundary[n] = boundary[n].max(s.boundary[n]);
        }
    }
    let ratio = peak
        .iter()
        .zip(&boundary)
        .map(|(p, b)| if *p > 0.0 { b / p } else { 0.0 })
        .fold(0.0, f64::max);
    if ratio > grid.truncation_limit {
        return Err(Error::BoxTruncation {
            ratio,
            limit: grid.truncation_limit,
        });
    }
    Ok(GramResult { matrix, boundary_ratio: ratio })
}

/// `<f, g>` at the time of `grid`.
pub fn kg_inner_product(f: &dyn KgField, g: &dyn KgField, grid: &SpatialGrid, bg: &Background) -> Result<Complex64> {
    Ok(gram_matrix(&[f, g], grid, bg)?.matrix[(0, 1)])
}

/// Coefficients `<psi_branch(p_k), field>` for every node of `grid`, in
/// the node order of [`MomentumGrid::points`].
pub fn project_onto_states(
    field: &dyn KgField,
    branch: Branch,
    grid: &MomentumGrid,
    spatial: &SpatialGrid,
    bg: &Background,
) -> Result<Vec<Complex64>> {
    let s = branch.sign();
    let e = bg.particle.charge;
    let geom = *bg.geometry();
    let (xi1, xi2) = spatial.transverse_coordinates();
    let (n1, n2, n3) = (grid.axes[0].len(), grid.axes[1].len(), grid.axes[2].len());
    // conj(psi) carries exp(-i s (p1 xi1 + p2 xi2)); fold the weights in.
    let u = CMatrix::from_fn(n1, xi1.len(), |i, a| Complex64::cis(-s * grid.axes[0][i] * xi1[a]) * spatial.xi1[a].1);
    let vt = CMatrix::from_fn(xi2.len(), n2, |b, j| Complex64::cis(-s * grid.axes[1][j] * xi2[b]) * spatial.xi2[b].1);
    let points = grid.points(bg);
    let t = spatial.t;
    let parts: Vec<Vec<Complex64>> = spatial
        .zeta
        .par_iter()
        .map(|&(zeta, wz)| {
            let (val, dt) = field.slice(t, zeta, &xi1, &xi2)?;
            let t0 = &u * val * &vt;
            let t1 = &u * dt * &vt;
            let phi = t - zeta;
            let ints = bg.accumulator().integrals(phi)?;
            let a = bg.pulse().eval_potential(phi);
            let a_perp = a.r - geom.direction() * a.t;
            let mut out = vec![Complex64::new(0.0, 0.0); points.len()];
            for i in 0..n1 {
                for j in 0..n2 {
                    for k in 0..n3 {
                        let idx = (i * n2 + j) * n3 + k;
                        let p = points[idx].0;
                        let mom = bg.particle.momentum(p)?;
                        let energy = mom.energy();
                        let v = mom.lightfront(&geom);
                        let f = (-e * e * ints.a_perp_sq - s * 2.0 * e * (ints.a_par * v - ints.a_perp.dot(&p))) / (2.0 * v);
                        let rate = (-e * e * a_perp.norm_squared() - s * 2.0 * e * (a.t * v - a_perp.dot(&p))) / (2.0 * v);
                        let theta_rest = s * (-energy * t + grid.axes[2][k] * zeta + f);
                        let theta_t = s * (rate - energy);
                        let conj_psi = Complex64::cis(-theta_rest) * normalization(energy);
                        let tr = Complex64::i() * t1[(i, j)] - t0[(i, j)] * (theta_t + 2.0 * e * a.t);
                        out[idx] = conj_psi * tr * wz;
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![Complex64::new(0.0, 0.0); points.len()];
    for part in parts {
        for (acc, v) in total.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(total)
}

/// Gram matrices of Gaussian packets at several times with the values
/// the orthogonality relations predict.
#[derive(Clone, Debug)]
pub struct OrthogonalityReport {
    pub labels: Vec<(Branch, Vec3)>,
    pub times: Vec<f64>,
    pub gram: Vec<CMatrix>,
    pub expected: CMatrix,
    pub boundary_ratio: Vec<f64>,
}

impl OrthogonalityReport {
    /// Largest `|G_ii - (+/-1)|`.
    pub fn diagonal_error(&self) -> f64 {
        self.max_over(|r, c| r == c)
    }

    /// Largest `|G_ij|` between packets of opposite branches.
    pub fn cross_branch(&self) -> f64 {
        self.max_over(|r, c| self.labels[r].0 != self.labels[c].0)
    }

    /// Largest deviation of same-branch off-diagonal entries from the
    /// analytic envelope overlap.
    pub fn overlap_error(&self) -> f64 {
        self.max_over(|r, c| r != c && self.labels[r].0 == self.labels[c].0)
    }

    /// Largest entrywise change between any two times.
    pub fn drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.gram.len() {
            for b in a + 1..self.gram.len() {
                for (x, y) in self.gram[a].iter().zip(self.gram[b].iter()) {
                    worst = worst.max((x - y).norm());
                }
            }
        }
        worst
    }

    fn max_over(&self, select: impl Fn(usize, usize) -> bool) -> f64 {
        let n = self.labels.len();
        let mut worst: f64 = 0.0;
        for g in &self.gram {
            for r in 0..n {
                for c in 0..n {
                    if select(r, c) {
                        worst = worst.max((g[(r, c)] - self.expected[(r, c)]).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Builds one Gaussian packet per `(branch, center)` and their Gram matrix
/// at each time. Expected entries are `+/- int c_i c_j` within a branch and
/// zero across branches.
///
/// The packets share equally spaced momentum grids whose position-space
/// period exceeds every box, so images of a packet stay outside it.
pub fn orthogonality_report(
    centers: &[(Branch, Vec3)],
    sigma: f64,
    times: &[f64],
    bg: &Background,
    quad: &SpatialQuadrature,
    range_sigmas: f64,
) -> Result<OrthogonalityReport> {
    let envelopes = centers
        .iter()
        .map(|(_, c)| GaussianEnvelope::new(*c, sigma))
        .collect::<Result<Vec<_>>>()?;
    let sizing = centers
        .iter()
        .zip(&envelopes)
        .map(|((b, _), env)| WavePacket::gaussian(*b, *env, 2, bg))
        .collect::<Result<Vec<_>>>()?;
    let sizing_fields: Vec<&dyn KgField> = sizing.iter().map(|p| p as &dyn KgField).collect();
    let mut grids = Vec::new();
    let mut periods = [0.0f64; 3];
    for &t in times {
        let grid = quad.grid(&sizing_fields, t, bg)?;
        let spans = grid.spans();
        for d in 0..3 {
            periods[d] = periods[d].max(1.05 * spans[d]);
        }
        grids.push(grid);
    }
    let packets = centers
        .iter()
        .zip(&envelopes)
        .map(|((b, _), env)| {
            let grid = MomentumGrid::periodic(env.center, sigma, range_sigmas, periods, bg)?;
            WavePacket::gaussian_on(*b, *env, grid, bg)
        })
        .collect::<Result<Vec<_>>>()?;
    let fields: Vec<&dyn KgField> = packets.iter().map(|p| p as &dyn KgField).collect();
    let n = packets.len();
    let expected = CMatrix::from_fn(n, n, |r, c| {
        if packets[r].branch != packets[c].branch {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(packets[r].branch.sign() * packets[r].envelope.overlap(&packets[c].envelope), 0.0)
        }
    });
    let mut gram = Vec::new();
    let mut ratios = Vec::new();
    for grid in &grids {
        let res = gram_matrix(&fields, grid, bg)?;
        gram.push(res.matrix);
        ratios.push(res.boundary_ratio);
    }
    Ok(OrthogonalityReport {
        labels: centers.to_vec(),
        times: times.to_vec(),
        gram,
        expected,
        boundary_ratio: ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Particle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn envelope_is_normalized() {
        let env = GaussianEnvelope::new(Vec3::new(0.1, 0.2, -0.3), 0.2).unwrap();
        let bg = Background::free(Particle::default());
        let grid = MomentumGrid::gauss_hermite(env.center, env.sigma, 16, &bg).unwrap();
        let total: f64 = grid.points(&bg).iter().map(|(p, w)| w * env.value(p)).sum();
        let exact = (PI * 0.04f64).powf(-0.75) * (2.0 * PI * 0.04f64).powf(1.5);
        assert_abs_diff_eq!(total, exact, epsilon = 1e-12 * exact);
        assert_abs_diff_eq!(env.overlap(&env), 1.0, epsilon = 1e-14);
        let other = GaussianEnvelope::new(env.center + Vec3::new(2.0, 0.0, 0.0), 0.2).unwrap();
        assert_abs_diff_eq!(env.overlap(&other), (-4.0f64 / 0.16).exp(), epsilon = 1e-20);
    }

    #[test]
    fn rejects_bad_sigma() {
        let err = GaussianEnvelope::new(Vec3::zeros(), -0.2).unwrap_err();
        assert_eq!(err.to_string(), "invalid parameter: packet.sigma must be positive");
    }

    #[test]
    fn slice_matches_point_values() {
        let bg = Background::new(
            Particle::default(),
            crate::pulse::PulseModel::new(
                crate::pulse::PulseShape::TopHat {
                    amplitude: Vec3::new(0.5, 0.0, 0.0),
                    start: -4.0,
                    end: 4.0,
                },
                crate::lightcone::PropagationGeometry::along_z(),
            )
            .unwrap(),
        )
        .unwrap();
        for branch in [Branch::Plus, Branch::Minus] {
            let env = GaussianEnvelope::new(Vec3::new(0.2, -0.1, 0.3), 0.2).unwrap();
            let packet = WavePacket::gaussian(branch, env, 10, &bg).unwrap();
            let (t, zeta) = (1.5, -0.7);
            let xi1 = [0.3, -1.2];
            let xi2 = [2.0, 0.1, -0.4];
            let (val, dt) = packet.slice(t, zeta, &xi1, &xi2).unwrap();
            for a in 0..2 {
                for b in 0..3 {
                    let x = FourVector::new(t, Vec3::new(xi1[a], xi2[b], zeta));
                    let (pv, pt) = packet.value_and_time_derivative(&x).unwrap();
                    assert!((val[(a, b)] - pv).norm() < 1e-14);
                    assert!((dt[(a, b)] - pt).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn free_center_moves_with_group_velocity() {
        let bg = Background::free(Particle::default());
        let env = GaussianEnvelope::new(Vec3::new(0.3, 0.0, 0.4), 0.2).unwrap();
        let plus = WavePacket::gaussian(Branch::Plus, env, 4, &bg).unwrap();
        let minus = WavePacket::gaussian(Branch::Minus, env, 4, &bg).unwrap();
        let e = (1.0f64 + 0.25).sqrt();
        let c = plus.classical_center(10.0).unwrap();
        assert!((c - env.center * (10.0 / e)).norm() < 1e-10);
        let c = minus.classical_center(10.0).unwrap();
        assert!((c - env.center * (10.0 / e)).norm() < 1e-10);
    }
}
