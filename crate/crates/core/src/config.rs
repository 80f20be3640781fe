//! Run configuration: a TOML file with one section per concern.
//!
//! ```toml
//! [run]
//! suite = "ortho"
//! seed = 1
//! threads = 1
//!
//! [pulse]
//! shape = "top_hat"
//! amplitude = [0.5, 0.0, 0.0]
//! start = -4.0
//! end = 4.0
//! ```
//!
//! Every section and key has a default, so an empty file is valid.

use crate::error::Error;
use crate::lightcone::{FourVector, PropagationGeometry, Vec3};
use crate::pulse::{Branch, Particle, PulseModel, PulseShape};
use crate::volkov::Background;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => ConfigError::Invalid(msg),
            other => ConfigError::Invalid(other.to_string()),
        }
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Residual,
    Eigen,
    Ortho,
    Completeness,
    Propagator,
    Amplitude,
    Oscillatory,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Residual,
        Suite::Eigen,
        Suite::Ortho,
        Suite::Completeness,
        Suite::Propagator,
        Suite::Amplitude,
        Suite::Oscillatory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Residual => "residual",
            Suite::Eigen => "eigen",
            Suite::Ortho => "ortho",
            Suite::Completeness => "completeness",
            Suite::Propagator => "propagator",
            Suite::Amplitude => "amplitude",
            Suite::Oscillatory => "oscillatory",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| bad(format!("unknown suite '{s}'")))
    }
}

fn along_z() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub suite: Suite,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            suite: Suite::Ortho,
            seed: 1,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleSection {
    pub mass: f64,
    pub charge: f64,
}

impl Default for ParticleSection {
    fn default() -> Self {
        Self { mass: 1.0, charge: -1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSection {
    Zero {
        #[serde(default = "along_z")]
        direction: [f64; 3],
    },
    TopHat {
        #[serde(default = "along_z")]
        direction: [f64; 3],
        amplitude: [f64; 3],
        start: f64,
        end: f64,
    },
    SinSquared {
        #[serde(default = "along_z")]
        direction: [f64; 3],
        a0: f64,
        polarization: [f64; 3],
        omega: f64,
        cycles: u32,
        #[serde(default)]
        cep: f64,
    },
    Monochromatic {
        #[serde(default = "along_z")]
        direction: [f64; 3],
        a0: f64,
        polarization: [f64; 3],
        omega: f64,
    },
}

impl Default for PulseSection {
    fn default() -> Self {
        PulseSection::TopHat {
            direction: along_z(),
            amplitude: [0.5, 0.0, 0.0],
            start: -4.0,
            end: 4.0,
        }
    }
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl PulseSection {
    pub fn model(&self) -> Result<PulseModel, ConfigError> {
        let (direction, shape) = match *self {
            PulseSection::Zero { direction } => (direction, PulseShape::Zero),
            PulseSection::TopHat {
                direction,
                amplitude,
                start,
                end,
            } => {
                if !(end > start) {
                    return Err(bad("pulse.end must exceed pulse.start"));
                }
                (
                    direction,
                    PulseShape::TopHat {
                        amplitude: v3(amplitude),
                        start,
                        end,
                    },
                )
            }
            PulseSection::SinSquared {
                direction,
                a0,
                polarization,
                omega,
                cycles,
                cep,
            } => {
                if !(omega > 0.0) {
                    return Err(bad("pulse.omega must be positive"));
                }
                if cycles == 0 {
                    return Err(bad("pulse.cycles must be positive"));
                }
                (
                    direction,
                    PulseShape::SinSquared {
                        a0,
                        polarization: v3(polarization),
                        omega,
                        cycles,
                        cep,
                    },
                )
            }
            PulseSection::Monochromatic {
                direction,
                a0,
                polarization,
                omega,
            } => {
                if !(omega > 0.0) {
                    return Err(bad("pulse.omega must be positive"));
                }
                (
                    direction,
                    PulseShape::Monochromatic {
                        a0,
                        polarization: v3(polarization),
                        omega,
                    },
                )
            }
        };
        let geom = PropagationGeometry::new(v3(direction)).map_err(|_| bad("pulse.direction must be a nonzero vector"))?;
        PulseModel::new(shape, geom).map_err(|e| bad(format!("pulse: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSection {
    pub sigma: f64,
    pub centers: Vec<[f64; 3]>,
    pub branches: Vec<String>,
    pub times: Vec<f64>,
    /// Half-range of the momentum grid in units of `sigma`.
    pub range_sigmas: f64,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            centers: vec![[0.2, 0.0, 0.0], [-0.2, 0.05, 0.1], [0.2, 0.0, 0.0], [-0.2, 0.05, 0.1]],
            branches: ["plus", "plus", "minus", "minus"].map(String::from).to_vec(),
            times: vec![-20.0, 0.0, 20.0],
            range_sigmas: 5.5,
        }
    }
}

impl PacketSection {
    pub fn labelled_centers(&self) -> Result<Vec<(Branch, Vec3)>, ConfigError> {
        self.branches
            .iter()
            .zip(&self.centers)
            .map(|(b, c)| {
                let branch = Branch::from_str(b).map_err(|_| bad(format!("packet.branches: unknown branch '{b}'")))?;
                Ok((branch, v3(*c)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub half_widths: f64,
    pub transverse_nodes: usize,
    pub panel_length: f64,
    pub panel_order: usize,
    pub truncation_limit: f64,
    pub momentum_nodes: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = crate::kgproduct::SpatialQuadrature::default();
        Self {
            half_widths: q.half_widths,
            transverse_nodes: q.transverse_nodes,
            panel_length: q.panel_length,
            panel_order: q.panel_order,
            truncation_limit: q.truncation_limit,
            momentum_nodes: 24,
        }
    }
}

impl QuadratureSection {
    pub fn spatial(&self) -> crate::kgproduct::SpatialQuadrature {
        crate::kgproduct::SpatialQuadrature {
            half_widths: self.half_widths,
            transverse_nodes: self.transverse_nodes,
            panel_length: self.panel_length,
            panel_order: self.panel_order,
            truncation_limit: self.truncation_limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualSection {
    pub points: usize,
    pub step: f64,
    /// Steps used for the order-of-decay fit.
    pub fit_steps: Vec<f64>,
    pub momentum_min: f64,
    pub momentum_max: f64,
    pub tolerance: f64,
    pub order_min: f64,
    pub order_max: f64,
}

impl Default for ResidualSection {
    fn default() -> Self {
        Self {
            points: 100,
            step: 1e-3,
            fit_steps: vec![4e-3, 2e-3, 1e-3],
            momentum_min: 3.0,
            momentum_max: 8.0,
            tolerance: 1e-6,
            order_min: 3.7,
            order_max: 4.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenSection {
    pub pairs: usize,
    pub step: f64,
    pub momentum_max: f64,
    pub tolerance: f64,
}

impl Default for EigenSection {
    fn default() -> Self {
        Self {
            pairs: 20,
            step: 1e-3,
            momentum_max: 3.0,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrthoSection {
    pub tolerance: f64,
    pub drift_tolerance: f64,
}

impl Default for OrthoSection {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            drift_tolerance: 5e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompletenessSection {
    /// Evaluation time; the middle of the pulse support when absent.
    pub time: Option<f64>,
    pub center: [f64; 3],
    pub width_perp: f64,
    pub width_par: f64,
    /// Transverse offset of the tail point, in units of `width_perp`.
    pub tail_widths: f64,
    pub tolerance: f64,
}

impl Default for CompletenessSection {
    fn default() -> Self {
        Self {
            time: None,
            center: [0.0; 3],
            width_perp: 1.0,
            width_par: 1.0,
            tail_widths: 5.0,
            tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorSection {
    pub t_from: f64,
    pub t_to: Vec<f64>,
    /// Evaluation points relative to the classical packet centre.
    pub offsets: Vec<[f64; 3]>,
    pub amplitude_plus: [f64; 2],
    pub amplitude_minus: [f64; 2],
    pub tolerance: f64,
}

impl Default for PropagatorSection {
    fn default() -> Self {
        Self {
            t_from: 0.0,
            t_to: vec![10.0, -10.0],
            offsets: vec![[0.0; 3], [2.0, -1.0, 1.5]],
            amplitude_plus: [0.8, 0.0],
            amplitude_minus: [0.0, 0.6],
            tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudeSection {
    pub p1: [f64; 3],
    pub p2: [f64; 3],
    pub g: f64,
    pub bump_center: [f64; 4],
    pub bump_widths: [f64; 4],
    pub probe_k: [f64; 4],
    /// Light-cone envelope widths `(phi, phitilde, perp)`.
    pub probe_widths: [f64; 3],
    pub strengths: Vec<f64>,
    pub bump_tolerance: f64,
    pub cross_tolerance: f64,
    pub slope_tolerance: f64,
}

impl Default for AmplitudeSection {
    fn default() -> Self {
        Self {
            p1: [0.1, 0.0, 0.2],
            p2: [0.15, 0.05, 0.1],
            g: 0.01,
            bump_center: [0.5, -0.3, 0.2, 0.1],
            bump_widths: [2.0, 1.5, 1.5, 2.0],
            probe_k: [0.2, 0.05, 0.0, 0.1],
            probe_widths: [3.0, 3.0, 2.0],
            strengths: vec![1e-3, 1e-2, 1e-1],
            bump_tolerance: 1e-8,
            cross_tolerance: 1e-4,
            slope_tolerance: 1e-3,
        }
    }
}

impl AmplitudeSection {
    pub fn bump_center(&self) -> FourVector {
        let c = self.bump_center;
        FourVector::new(c[0], Vec3::new(c[1], c[2], c[3]))
    }

    pub fn probe_k(&self) -> FourVector {
        let k = self.probe_k;
        FourVector::new(k[0], Vec3::new(k[1], k[2], k[3]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorySection {
    /// Values of `ab` at which `S` is extrapolated (with `a = b`).
    pub products: Vec<f64>,
    /// `a` values of the fixed-product scaling grid (`b = 1/a`).
    pub grid: Vec<f64>,
    pub smearing_width: f64,
    pub offset_widths: f64,
    pub kappa: f64,
    pub s_tolerance: f64,
    pub scaling_tolerance: f64,
    pub c_tolerance: f64,
    pub c_offset_tolerance: f64,
}

impl Default for OscillatorySection {
    fn default() -> Self {
        Self {
            products: vec![0.5, 1.0, 2.0, 5.0],
            grid: vec![0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 5.0, 8.0, 10.0],
            smearing_width: 0.2,
            offset_widths: 15.0,
            kappa: 1.0,
            s_tolerance: 1e-3,
            scaling_tolerance: 1e-4,
            c_tolerance: 1e-2,
            c_offset_tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub particle: ParticleSection,
    pub pulse: PulseSection,
    pub packet: PacketSection,
    pub quadrature: QuadratureSection,
    pub residual: ResidualSection,
    pub eigen: EigenSection,
    pub ortho: OrthoSection,
    pub completeness: CompletenessSection,
    pub propagator: PropagatorSection,
    pub amplitude: AmplitudeSection,
    pub oscillatory: OscillatorySection,
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{key} must be positive")))
    }
}

fn nonzero(key: &str, n: usize) -> Result<(), ConfigError> {
    if n > 0 {
        Ok(())
    } else {
        Err(bad(format!("{key} must be positive")))
    }
}

fn nonempty<T>(key: &str, xs: &[T]) -> Result<(), ConfigError> {
    if xs.is_empty() {
        Err(bad(format!("{key} must not be empty")))
    } else {
        Ok(())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        nonzero("run.threads", self.run.threads)?;
        positive("particle.mass", self.particle.mass)?;
        if !self.particle.charge.is_finite() {
            return Err(bad("particle.charge must be finite"));
        }
        self.pulse.model()?;

        let p = &self.packet;
        positive("packet.sigma", p.sigma)?;
        positive("packet.range_sigmas", p.range_sigmas)?;
        nonempty("packet.centers", &p.centers)?;
        nonempty("packet.times", &p.times)?;
        if p.branches.len() != p.centers.len() {
            return Err(bad("packet.branches must have one entry per packet.centers entry"));
        }
        p.labelled_centers()?;

        let q = &self.quadrature;
        positive("quadrature.half_widths", q.half_widths)?;
        nonzero("quadrature.transverse_nodes", q.transverse_nodes)?;
        positive("quadrature.panel_length", q.panel_length)?;
        nonzero("quadrature.panel_order", q.panel_order)?;
        positive("quadrature.truncation_limit", q.truncation_limit)?;
        nonzero("quadrature.momentum_nodes", q.momentum_nodes)?;

        let r = &self.residual;
        nonzero("residual.points", r.points)?;
        positive("residual.step", r.step)?;
        if r.fit_steps.len() < 2 {
            return Err(bad("residual.fit_steps needs at least two entries"));
        }
        for h in &r.fit_steps {
            positive("residual.fit_steps", *h)?;
        }
        positive("residual.momentum_min", r.momentum_min)?;
        if !(r.momentum_max >= r.momentum_min) {
            return Err(bad("residual.momentum_max must not be below residual.momentum_min"));
        }
        positive("residual.tolerance", r.tolerance)?;

        let e = &self.eigen;
        nonzero("eigen.pairs", e.pairs)?;
        positive("eigen.step", e.step)?;
        positive("eigen.momentum_max", e.momentum_max)?;
        positive("eigen.tolerance", e.tolerance)?;

        positive("ortho.tolerance", self.ortho.tolerance)?;
        positive("ortho.drift_tolerance", self.ortho.drift_tolerance)?;

        let c = &self.completeness;
        positive("completeness.width_perp", c.width_perp)?;
        positive("completeness.width_par", c.width_par)?;
        positive("completeness.tolerance", c.tolerance)?;
        if let Some(t) = c.time {
            if !t.is_finite() {
                return Err(bad("completeness.time must be finite"));
            }
        }

        let pr = &self.propagator;
        nonempty("propagator.t_to", &pr.t_to)?;
        if pr.t_to.iter().any(|&t| t == pr.t_from) {
            return Err(bad("propagator.t_to must differ from propagator.t_from"));
        }
        positive("propagator.tolerance", pr.tolerance)?;

        let a = &self.amplitude;
        positive("amplitude.g", a.g)?;
        for w in a.bump_widths.iter() {
            positive("amplitude.bump_widths", *w)?;
        }
        for w in a.probe_widths.iter() {
            positive("amplitude.probe_widths", *w)?;
        }
        if a.strengths.len() < 2 {
            return Err(bad("amplitude.strengths needs at least two entries"));
        }
        for g in &a.strengths {
            positive("amplitude.strengths", *g)?;
        }

        let o = &self.oscillatory;
        for x in &o.products {
            positive("oscillatory.products", *x)?;
        }
        for x in &o.grid {
            positive("oscillatory.grid", *x)?;
        }
        positive("oscillatory.smearing_width", o.smearing_width)?;
        positive("oscillatory.kappa", o.kappa)?;
        Ok(())
    }

    pub fn particle(&self) -> Result<Particle, ConfigError> {
        Ok(Particle::new(self.particle.mass, self.particle.charge)?)
    }

    pub fn background(&self) -> Result<Background, ConfigError> {
        Ok(Background::new(self.particle()?, self.pulse.model()?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn negative_sigma_names_the_key() {
        let err = RunConfig::parse("[packet]\nsigma = -0.2\n").unwrap_err();
        assert_eq!(err.to_string(), "packet.sigma must be positive");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = RunConfig::parse("[packet]\nsigmaa = 0.2\n").unwrap_err();
        assert!(err.to_string().contains("sigmaa"), "{err}");
    }

    #[test]
    fn pulse_variants_parse() {
        let cfg = RunConfig::parse("[pulse]\nshape = \"sin_squared\"\na0 = 1.0\npolarization = [1.0, 0.0, 0.0]\nomega = 1.0\ncycles = 4\n").unwrap();
        assert!(matches!(cfg.pulse.model().unwrap().shape(), PulseShape::SinSquared { cycles: 4, .. }));
        let err = RunConfig::parse("[pulse]\nshape = \"top_hat\"\namplitude = [1.0, 0.0, 0.0]\nstart = 1.0\nend = 0.0\n").unwrap_err();
        assert_eq!(err.to_string(), "pulse.end must exceed pulse.start");
    }
}
