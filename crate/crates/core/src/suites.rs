//! Verification suites driven by a [`RunConfig`]. Each suite returns a list
//! of checks (achieved against required) and CSV tables; numerical failures
//! become failed checks, configuration problems become errors.

use crate::config::{ConfigError, RunConfig, Suite};
use crate::error::Error;
use crate::kgproduct::orthogonality_report;
use crate::lightcone::{LightConeCoords, Vec3};
use crate::oscillatory::{
    c_integral_smeared, completeness_smeared, s_integral, CIndex, CompletenessOptions, GaussianTestFunction,
    RegularizedOscillatory, SmearingFunction,
};
use crate::propsmat::{
    gaussian_bump_free_amplitude, propagate_packet, scaling_slope, transition_amplitude_full, transition_amplitude_reduced,
    AmplitudeResult, InteractionModel, LightConeGaussian, PacketMix, PropagatorSpec, Quad4Spec,
};
use crate::pulse::Branch;
use crate::volkov::{Background, VolkovState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Below(f64),
    Between(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub achieved: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

impl Check {
    pub fn below(name: impl Into<String>, achieved: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            achieved,
            bound: Bound::Below(limit),
            passed: achieved < limit,
            error: None,
        }
    }

    pub fn between(name: impl Into<String>, achieved: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            achieved,
            bound: Bound::Between(lo, hi),
            passed: achieved >= lo && achieved <= hi,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, bound: Bound, err: &Error) -> Self {
        Self {
            name: name.into(),
            achieved: f64::NAN,
            bound,
            passed: false,
            error: Some(err.to_string()),
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let required = match self.bound {
            Bound::Below(x) => format!("< {x:e}"),
            Bound::Between(a, b) => format!("in [{a}, {b}]"),
        };
        match &self.error {
            Some(e) => format!("{status}  {:<32} error: {e} (required {required})", self.name),
            None => format!("{status}  {:<32} achieved {:.3e}  required {required}", self.name, self.achieved),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(file: &str, columns: &[&'static str]) -> Self {
        Self {
            file: file.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "suite {}: {} ({} checks, {} failed, {:.1} s)",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed,
            self.seconds
        );
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.line());
        }
        out
    }

    /// Writes `summary.txt` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(&t.file))?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs one suite on a thread pool of `cfg.run.threads` workers.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<SuiteReport, ConfigError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.threads)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("run.threads: {e}")))?;
    let start = Instant::now();
    let (checks, tables) = pool.install(|| match suite {
        Suite::Residual => residual(cfg),
        Suite::Eigen => eigen(cfg),
        Suite::Ortho => ortho(cfg),
        Suite::Completeness => completeness(cfg),
        Suite::Propagator => propagator(cfg),
        Suite::Amplitude => amplitude(cfg),
        Suite::Oscillatory => oscillatory(cfg),
    })?;
    Ok(SuiteReport {
        suite,
        checks,
        tables,
        seconds: start.elapsed().as_secs_f64(),
    })
}

type SuiteOutput = Result<(Vec<Check>, Vec<Table>), ConfigError>;

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    let c: f64 = rng.gen_range(-1.0..1.0);
    let s = (1.0 - c * c).sqrt();
    let a: f64 = rng.gen_range(0.0..2.0 * PI);
    Vec3::new(s * a.cos(), s * a.sin(), c)
}

/// A spacetime point with `phi` inside the pulse support (or a default
/// window) and at least `margin` away from its edges.
fn random_interior_point(bg: &Background, rng: &mut ChaCha8Rng, margin: f64) -> crate::lightcone::FourVector {
    let pulse = bg.pulse();
    let (lo, hi) = pulse.support().unwrap_or((-20.0, 20.0));
    let geom = bg.geometry();
    let (e1, e2) = geom.transverse_basis();
    loop {
        let phi = rng.gen_range(lo + margin..hi - margin);
        let phitilde = rng.gen_range(-10.0..10.0);
        let r_perp = e1 * rng.gen_range(-5.0..5.0) + e2 * rng.gen_range(-5.0..5.0);
        if pulse.near_discontinuity(phi, margin).is_none() {
            return geom.from_lightcone(&LightConeCoords { phi, phitilde, r_perp });
        }
    }
}

fn residual(cfg: &RunConfig) -> SuiteOutput {
    let rc = &cfg.residual;
    let bg = cfg.background()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let mut steps = rc.fit_steps.clone();
    if !steps.contains(&rc.step) {
        steps.push(rc.step);
    }
    let hmax = steps.iter().cloned().fold(0.0, f64::max);
    let mut table = Table::new(
        "residual.csv",
        &["point", "branch", "p_x", "p_y", "p_z", "t", "x", "y", "z", "h", "residual"],
    );
    let mut sums = vec![0.0; steps.len()];
    let mut worst = 0.0f64;
    let mut failure = None;
    for i in 0..rc.points {
        let branch = if i % 2 == 0 { Branch::Plus } else { Branch::Minus };
        let p = random_direction(&mut rng) * rng.gen_range(rc.momentum_min..=rc.momentum_max);
        let x = random_interior_point(&bg, &mut rng, 0.1 + 4.0 * hmax);
        let state = bg.state(p, branch)?;
        for (k, &h) in steps.iter().enumerate() {
            match state.normalized_residual(&x, h) {
                Ok(r) => {
                    sums[k] += r;
                    if h == rc.step {
                        worst = worst.max(r);
                    }
                    table.rows.push(vec![
                        i.to_string(),
                        branch.name().to_string(),
                        num(p.x),
                        num(p.y),
                        num(p.z),
                        num(x.t),
                        num(x.r.x),
                        num(x.r.y),
                        num(x.r.z),
                        num(h),
                        num(r),
                    ]);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
    }
    let mut checks = Vec::new();
    if let Some(e) = failure {
        checks.push(Check::failed("residual.evaluation", Bound::Below(rc.tolerance), &e));
    }
    checks.push(Check::below(format!("residual.max (h={:e})", rc.step), worst, rc.tolerance));
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(&sums)
        .filter(|(h, _)| rc.fit_steps.contains(h))
        .map(|(h, s)| (*h, *s))
        .collect();
    match scaling_slope(&pts) {
        Ok(order) => checks.push(Check::between("residual.order", order, rc.order_min, rc.order_max)),
        Err(e) => checks.push(Check::failed("residual.order", Bound::Between(rc.order_min, rc.order_max), &e)),
    }
    Ok((checks, vec![table]))
}

/// `|got - want| / max(|want|, m)`
pub fn eigen_relative_error(state: &VolkovState, got: &crate::volkov::Eigenvalues) -> f64 {
    let want = state.expected_eigenvalues();
    let m = state.particle().mass;
    let rel = |g: f64, w: f64| (g - w).abs() / w.abs().max(m);
    rel(got.perp[0], want.perp[0])
        .max(rel(got.perp[1], want.perp[1]))
        .max(rel(got.lightfront, want.lightfront))
}

fn eigen(cfg: &RunConfig) -> SuiteOutput {
    let ec = &cfg.eigen;
    let bg = cfg.background()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let mut table = Table::new(
        "eigen.csv",
        &["branch", "p_x", "p_y", "p_z", "t", "x", "y", "z", "perp_1", "perp_2", "lightfront", "relative_error"],
    );
    let mut checks = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        let mut worst = 0.0f64;
        let mut failure = None;
        for _ in 0..ec.pairs {
            let p = random_direction(&mut rng) * rng.gen_range(0.05..=ec.momentum_max);
            let x = random_interior_point(&bg, &mut rng, 0.1 + 4.0 * ec.step);
            let state = bg.state(p, branch)?;
            match state.lightfront_eigencheck(&x, ec.step) {
                Ok(got) => {
                    let err = eigen_relative_error(&state, &got);
                    worst = worst.max(err);
                    table.rows.push(vec![
                        branch.name().to_string(),
                        num(p.x),
                        num(p.y),
                        num(p.z),
                        num(x.t),
                        num(x.r.x),
                        num(x.r.y),
                        num(x.r.z),
                        num(got.perp[0]),
                        num(got.perp[1]),
                        num(got.lightfront),
                        num(err),
                    ]);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        let name = format!("eigen.{}", branch.name());
        match failure {
            Some(e) => checks.push(Check::failed(name, Bound::Below(ec.tolerance), &e)),
            None => checks.push(Check::below(name, worst, ec.tolerance)),
        }
    }
    Ok((checks, vec![table]))
}

fn ortho(cfg: &RunConfig) -> SuiteOutput {
    let bg = cfg.background()?;
    let labels = cfg.packet.labelled_centers()?;
    let quad = cfg.quadrature.spatial();
    let tol = cfg.ortho.tolerance;
    let names = ["ortho.diagonal", "ortho.cross_branch", "ortho.overlap", "ortho.drift"];
    let report = match orthogonality_report(&labels, cfg.packet.sigma, &cfg.packet.times, &bg, &quad, cfg.packet.range_sigmas) {
        Ok(r) => r,
        Err(Error::InvalidParameter(msg)) => return Err(ConfigError::Invalid(msg)),
        Err(e) => {
            let checks = names.iter().map(|n| Check::failed(*n, Bound::Below(tol), &e)).collect();
            return Ok((checks, Vec::new()));
        }
    };
    let checks = vec![
        Check::below(names[0], report.diagonal_error(), tol),
        Check::below(names[1], report.cross_branch(), tol),
        Check::below(names[2], report.overlap_error(), tol),
        Check::below(names[3], report.drift(), cfg.ortho.drift_tolerance),
    ];
    let mut table = Table::new("gram.csv", &["time", "row", "column", "re", "im", "expected_re", "expected_im"]);
    for (t, g) in report.times.iter().zip(&report.gram) {
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let e = report.expected[(i, j)];
                table.rows.push(vec![
                    num(*t),
                    i.to_string(),
                    j.to_string(),
                    num(g[(i, j)].re),
                    num(g[(i, j)].im),
                    num(e.re),
                    num(e.im),
                ]);
            }
        }
    }
    Ok((checks, vec![table]))
}

fn completeness(cfg: &RunConfig) -> SuiteOutput {
    let cc = &cfg.completeness;
    let bg = cfg.background()?;
    let t = cc.time.unwrap_or_else(|| bg.pulse().support().map(|(a, b)| 0.5 * (a + b)).unwrap_or(0.0));
    let center = Vec3::new(cc.center[0], cc.center[1], cc.center[2]);
    let f = GaussianTestFunction::new(center, cc.width_perp, cc.width_par)?;
    let opts = CompletenessOptions {
        tolerance: cc.tolerance,
        ..CompletenessOptions::default()
    };
    let (e1, _) = bg.geometry().transverse_basis();
    let points = [("center", center), ("tail", center + e1 * (cc.tail_widths * cc.width_perp))];
    let mut table = Table::new(
        "completeness.csv",
        &["point", "t", "x", "y", "z", "re_i1", "im_i1", "re_i2", "im_i2", "expected", "error"],
    );
    let mut checks = Vec::new();
    for (label, r) in points {
        let (i1_bound, i2_bound) = if label == "center" { (1e-3, 1e-2) } else { (1e-3, 1e-3) };
        match completeness_smeared(&bg, t, &r, &f, &opts) {
            Ok(res) => {
                // f has unit peak, so absolute and f_max-relative coincide.
                let i2_err = if label == "center" {
                    (res.i2 - res.expected).norm() / res.expected
                } else {
                    (res.i2 - res.expected).norm()
                };
                checks.push(Check::below(format!("completeness.{label}.i1"), res.i1.norm(), i1_bound));
                checks.push(Check::below(format!("completeness.{label}.i2"), i2_err, i2_bound));
                table.rows.push(vec![
                    label.to_string(),
                    num(t),
                    num(r.x),
                    num(r.y),
                    num(r.z),
                    num(res.i1.re),
                    num(res.i1.im),
                    num(res.i2.re),
                    num(res.i2.im),
                    num(res.expected),
                    num(res.error),
                ]);
            }
            Err(e) => {
                checks.push(Check::failed(format!("completeness.{label}.i1"), Bound::Below(i1_bound), &e));
                checks.push(Check::failed(format!("completeness.{label}.i2"), Bound::Below(i2_bound), &e));
            }
        }
    }
    Ok((checks, vec![table]))
}

fn propagator(cfg: &RunConfig) -> SuiteOutput {
    let pc = &cfg.propagator;
    let bg = cfg.background()?;
    let labels = cfg.packet.labelled_centers()?;
    let find = |b: Branch| labels.iter().find(|(x, _)| *x == b).map(|(_, c)| *c);
    let (Some(cp), Some(cm)) = (find(Branch::Plus), find(Branch::Minus)) else {
        return Err(ConfigError::Invalid(
            "packet.branches needs a plus and a minus entry for the propagator suite".into(),
        ));
    };
    let quad = cfg.quadrature.spatial();
    let ap = Complex64::new(pc.amplitude_plus[0], pc.amplitude_plus[1]);
    let am = Complex64::new(pc.amplitude_minus[0], pc.amplitude_minus[1]);
    let spec = PropagatorSpec {
        momentum_nodes: cfg.quadrature.momentum_nodes,
        quadrature: quad,
        ..PropagatorSpec::new(bg.clone())
    };
    let mut table = Table::new(
        "propagator.csv",
        &["t_from", "t_to", "x", "y", "z", "re_got", "im_got", "re_want", "im_want", "relative_error"],
    );
    let mut checks = Vec::new();
    let mix = match PacketMix::gaussian(&bg, cfg.packet.sigma, Some((cp, ap)), Some((cm, am)), pc.t_from, &quad, cfg.packet.range_sigmas) {
        Ok(m) => m,
        Err(e) => {
            checks.push(Check::failed("propagator.setup", Bound::Below(pc.tolerance), &e));
            return Ok((checks, vec![table]));
        }
    };
    for &t_to in &pc.t_to {
        let (branch, factor) = if t_to > pc.t_from {
            (Branch::Plus, Complex64::new(0.0, -1.0))
        } else {
            (Branch::Minus, Complex64::new(0.0, 1.0))
        };
        let other = match branch {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        };
        let component = mix.component(branch).expect("mix has both branches");
        let mut run = || -> crate::Result<(f64, f64)> {
            let center = component.classical_center(t_to)?;
            let mut worst = 0.0f64;
            for o in &pc.offsets {
                let x = center + Vec3::new(o[0], o[1], o[2]);
                let got = propagate_packet(&spec, &mix, pc.t_from, t_to, &x)?;
                let want = factor * component.value(&crate::FourVector::new(t_to, x))?;
                let rel = (got - want).norm() / want.norm();
                worst = worst.max(rel);
                table.rows.push(vec![
                    num(pc.t_from),
                    num(t_to),
                    num(x.x),
                    num(x.y),
                    num(x.z),
                    num(got.re),
                    num(got.im),
                    num(want.re),
                    num(want.im),
                    num(rel),
                ]);
            }
            // Propagating only the wrong branch must give nothing.
            let wrong = mix.component(other).expect("mix has both branches").clone();
            let lone = match other {
                Branch::Plus => PacketMix::new(Some(wrong.clone()), None)?,
                Branch::Minus => PacketMix::new(None, Some(wrong.clone()))?,
            };
            let x = wrong.classical_center(t_to)?;
            let got = propagate_packet(&spec, &lone, pc.t_from, t_to, &x)?;
            let scale = wrong.value(&crate::FourVector::new(t_to, x))?.norm();
            Ok((worst, got.norm() / scale))
        };
        let name = format!("propagator.{}.t{}", branch.name(), t_to);
        match run() {
            Ok((rel, leak)) => {
                checks.push(Check::below(format!("{name}.match"), rel, pc.tolerance));
                checks.push(Check::below(format!("{name}.annihilate"), leak, pc.tolerance));
            }
            Err(e) => checks.push(Check::failed(name, Bound::Below(pc.tolerance), &e)),
        }
    }
    Ok((checks, vec![table]))
}

fn amplitude(cfg: &RunConfig) -> SuiteOutput {
    let ac = &cfg.amplitude;
    let particle = cfg.particle()?;
    let p1 = particle.momentum(Vec3::new(ac.p1[0], ac.p1[1], ac.p1[2]))?;
    let p2 = particle.momentum(Vec3::new(ac.p2[0], ac.p2[1], ac.p2[2]))?;
    let bg = cfg.background()?;
    let free = Background::free(particle);
    let center = ac.bump_center();
    let bump = InteractionModel::GaussianBump {
        g: ac.g,
        center,
        widths: ac.bump_widths,
    };
    let phi_mid = bg.pulse().support().map(|(a, b)| 0.5 * (a + b)).unwrap_or(0.0);
    let k = ac.probe_k();
    let probe = InteractionModel::PlaneWaveProbe {
        g: ac.g,
        k,
        envelope: LightConeGaussian {
            phi: phi_mid,
            phitilde: 0.0,
            perp: Vec3::zeros(),
            width_phi: ac.probe_widths[0],
            width_phitilde: ac.probe_widths[1],
            width_perp: ac.probe_widths[2],
        },
    };
    bump.validate()?;
    probe.validate()?;

    let mut table = Table::new(
        "amplitude.csv",
        &[
            "p1_x", "p1_y", "p1_z", "p2_x", "p2_y", "p2_z", "k_0", "k_x", "k_y", "k_z", "g", "re_a", "im_a", "abs_a_sq", "error",
            "method",
        ],
    );
    let mut row = |kv: [f64; 4], g: f64, a: &AmplitudeResult| {
        let (s1, s2) = (p1.spatial(), p2.spatial());
        table.rows.push(vec![
            num(s1.x),
            num(s1.y),
            num(s1.z),
            num(s2.x),
            num(s2.y),
            num(s2.z),
            num(kv[0]),
            num(kv[1]),
            num(kv[2]),
            num(kv[3]),
            num(g),
            num(a.value.re),
            num(a.value.im),
            num(a.value.norm_sqr()),
            num(a.error),
            a.method.name().to_string(),
        ]);
    };
    let no_k = [0.0; 4];
    let kv = [k.t, k.r.x, k.r.y, k.r.z];
    let mut checks = Vec::new();

    match transition_amplitude_full(&p1, &p2, &bump, &free, &Quad4Spec::default()) {
        Ok(full) => {
            let exact = gaussian_bump_free_amplitude(&p1, &p2, ac.g, &center, &ac.bump_widths);
            row(no_k, ac.g, &full);
            row(
                no_k,
                ac.g,
                &AmplitudeResult {
                    value: exact,
                    error: 0.0,
                    method: crate::propsmat::AmplitudeMethod::ClosedForm,
                },
            );
            checks.push(Check::below("amplitude.bump_vs_closed_form", (full.value - exact).norm() / exact.norm(), ac.bump_tolerance));
        }
        Err(e) => checks.push(Check::failed("amplitude.bump_vs_closed_form", Bound::Below(ac.bump_tolerance), &e)),
    }

    let cross = transition_amplitude_full(&p1, &p2, &probe, &bg, &Quad4Spec::default())
        .and_then(|full| Ok((full, transition_amplitude_reduced(&p1, &p2, &probe, &bg, 1e-12)?)));
    match cross {
        Ok((full, reduced)) => {
            row(kv, ac.g, &full);
            row(kv, ac.g, &reduced);
            let rel = (full.value - reduced.value).norm() / reduced.value.norm();
            checks.push(Check::below("amplitude.full_vs_reduced", rel, ac.cross_tolerance));
        }
        Err(e) => checks.push(Check::failed("amplitude.full_vs_reduced", Bound::Below(ac.cross_tolerance), &e)),
    }

    let mut pts = Vec::new();
    let mut failure = None;
    for &g in &ac.strengths {
        match transition_amplitude_reduced(&p1, &p2, &probe.with_strength(g), &bg, 1e-12) {
            Ok(a) => {
                row(kv, g, &a);
                pts.push((g, a.value.norm()));
            }
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    let slope_bound = Bound::Between(1.0 - ac.slope_tolerance, 1.0 + ac.slope_tolerance);
    match failure.map_or_else(|| scaling_slope(&pts), Err) {
        Ok(s) => checks.push(Check::between("amplitude.slope", s, 1.0 - ac.slope_tolerance, 1.0 + ac.slope_tolerance)),
        Err(e) => checks.push(Check::failed("amplitude.slope", slope_bound, &e)),
    }
    Ok((checks, vec![table]))
}

fn oscillatory(cfg: &RunConfig) -> SuiteOutput {
    let oc = &cfg.oscillatory;
    let mut s_table = Table::new("s_integral.csv", &["a", "b", "epsilon", "l", "value", "error", "method"]);
    let mut c_table = Table::new("c_smeared.csv", &["n", "kappa", "center", "width", "epsilon", "l", "value", "expected", "error"]);
    let mut checks = Vec::new();
    let quad_tol = 1e-2 * oc.s_tolerance.min(oc.scaling_tolerance);
    let mut s_at = |a: f64, b: f64| -> crate::Result<f64> {
        let reg = RegularizedOscillatory::new(a, b)?;
        let res = s_integral(&reg, quad_tol)?;
        for st in &res.trace {
            s_table
                .rows
                .push(vec![num(a), num(b), num(st.epsilon), num(st.l), num(st.value), String::new(), "partial".into()]);
        }
        s_table
            .rows
            .push(vec![num(a), num(b), num(0.0), num(f64::INFINITY), num(res.value), num(res.error), res.method.into()]);
        Ok(res.value)
    };

    for &ab in &oc.products {
        let a = ab.sqrt();
        let name = format!("oscillatory.s(ab={ab})");
        match s_at(a, a) {
            Ok(v) => checks.push(Check::below(name, v.abs(), oc.s_tolerance)),
            Err(e) => checks.push(Check::failed(name, Bound::Below(oc.s_tolerance), &e)),
        }
    }
    let scaling = s_at(1.0, 1.0).and_then(|reference| {
        let mut worst = 0.0f64;
        for &a in &oc.grid {
            worst = worst.max((s_at(a, 1.0 / a)? - reference).abs());
        }
        Ok(worst)
    });
    match scaling {
        Ok(w) => checks.push(Check::below("oscillatory.s_scaling", w, oc.scaling_tolerance)),
        Err(e) => checks.push(Check::failed("oscillatory.s_scaling", Bound::Below(oc.scaling_tolerance), &e)),
    }

    for (n, label) in [(CIndex::Zero, "c0"), (CIndex::MinusTwo, "c-2")] {
        for (center, offset) in [(0.0, false), (oc.offset_widths * oc.smearing_width, true)] {
            let g = SmearingFunction::gaussian(center, oc.smearing_width)?;
            let scale = PI * g.peak();
            let expected = PI * g.value(0.0);
            let (name, limit) = if offset {
                (format!("oscillatory.{label}.offset"), oc.c_offset_tolerance)
            } else {
                (format!("oscillatory.{label}.center"), oc.c_tolerance)
            };
            match c_integral_smeared(n, oc.kappa, &g, 1e-4 * scale) {
                Ok(res) => {
                    for st in &res.trace {
                        c_table.rows.push(vec![
                            n.power().to_string(),
                            num(oc.kappa),
                            num(center),
                            num(oc.smearing_width),
                            num(st.epsilon),
                            num(st.l),
                            num(st.value),
                            num(expected),
                            num(res.error),
                        ]);
                    }
                    let err = if offset {
                        (res.value - expected).abs() / scale
                    } else {
                        (res.value - expected).abs() / expected
                    };
                    checks.push(Check::below(name, err, limit));
                }
                Err(e) => checks.push(Check::failed(name, Bound::Below(limit), &e)),
            }
        }
    }
    Ok((checks, vec![s_table, c_table]))
}
