use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use volkov::config::RunConfig;
use volkov::kgproduct::{orthogonality_report, SpatialQuadrature};
use volkov::oscillatory::{c_integral_smeared, s_integral, s_tail_partial_sums, CIndex, RegularizedOscillatory, SmearingFunction};
use volkov::propsmat::{propagate_packet, PacketMix, PropagatorSpec};
use volkov::volkov::{Background, VolkovState};
use volkov::{Branch, FourVector, LightConeCoords, Particle, PhaseAccumulator, PropagationGeometry, PulseModel, PulseShape, Vec3};

fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn direction() -> impl Strategy<Value = PropagationGeometry> {
    vec3(1.0)
        .prop_filter("non-zero", |v| v.norm() > 0.1)
        .prop_map(|v| PropagationGeometry::new(v).unwrap())
}

fn pulses() -> Vec<PulseModel> {
    let g = PropagationGeometry::along_z();
    vec![
        PulseModel::new(
            PulseShape::TopHat {
                amplitude: Vec3::new(0.5, -0.2, 0.0),
                start: 0.0,
                end: 10.0,
            },
            g,
        )
        .unwrap(),
        PulseModel::new(
            PulseShape::SinSquared {
                a0: 1.0,
                polarization: Vec3::x(),
                omega: 1.0,
                cycles: 4,
                cep: 0.3,
            },
            g,
        )
        .unwrap(),
        PulseModel::new(
            PulseShape::Monochromatic {
                a0: 0.7,
                polarization: Vec3::y(),
                omega: 1.3,
            },
            g,
        )
        .unwrap(),
    ]
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lightcone_round_trip(geom in direction(), t in -50.0..50.0f64, r in vec3(50.0)) {
        let x = FourVector::new(t, r);
        let c = geom.lightcone_coords(&x);
        prop_assert!((c.phi - geom.n().dot(&x)).abs() < 1e-12);
        prop_assert!((c.phitilde - geom.ntilde().dot(&x)).abs() < 1e-12);
        prop_assert!(c.r_perp.dot(&geom.direction()).abs() < 1e-12);
        let back = geom.from_lightcone(&c);
        prop_assert!((back.t - t).abs() < 1e-11 && (back.r - r).norm() < 1e-11);
    }

    #[test]
    fn minkowski_product_in_lightcone_form(geom in direction(), q0 in -5.0..5.0f64, q in vec3(5.0), t in -9.0..9.0f64, r in vec3(9.0)) {
        let qv = FourVector::new(q0, q);
        let x = FourVector::new(t, r);
        let c = geom.lightcone_coords(&x);
        let (_, q_perp) = geom.perp_decompose(&q);
        let via = 0.5 * geom.n().dot(&qv) * c.phitilde + 0.5 * geom.ntilde().dot(&qv) * c.phi - q_perp.dot(&c.r_perp);
        prop_assert!((via - qv.dot(&x)).abs() < 1e-10);
    }

    #[test]
    fn lightfront_momentum_is_positive_and_exact(geom in direction(), p in vec3(1e3)) {
        let p = Particle::default().momentum(p).unwrap();
        let v = p.lightfront(&geom);
        prop_assert!(v > 0.0);
        let naive = p.energy() - geom.direction().dot(&p.spatial());
        prop_assert!((v - naive).abs() <= 1e-9 * p.energy());
    }

    #[test]
    fn phase_integrals_are_additive(which in 0usize..3, a in -5.0..30.0f64, b in -5.0..30.0f64, c in -5.0..30.0f64) {
        let acc = PhaseAccumulator::new(pulses()[which].clone()).unwrap();
        let ab = acc.integrals_between(a, b).unwrap();
        let bc = acc.integrals_between(b, c).unwrap();
        let ac = acc.integrals_between(a, c).unwrap();
        let sum = ab + bc;
        prop_assert!((sum.a_perp - ac.a_perp).norm() < 1e-9);
        prop_assert!((sum.a_perp_sq - ac.a_perp_sq).abs() < 1e-9);
        prop_assert!((sum.a_par - ac.a_par).abs() < 1e-12);
    }

    #[test]
    fn b_has_the_sign_of_the_interval(which in 0usize..3, from in -5.0..30.0f64, len in -20.0..20.0f64, p in vec3(3.0)) {
        prop_assume!(len.abs() > 1e-6);
        let acc = PhaseAccumulator::new(pulses()[which].clone()).unwrap();
        let p_perp = Vec3::new(p.x, p.y, 0.0);
        let b = acc.b_coefficient(&Particle::default(), &p_perp, from, from + len).unwrap();
        // ab > 0 with a = len / 2, and b >= m^2 |len| / 2.
        prop_assert!(b * len > 0.0);
        prop_assert!(b.abs() >= 0.5 * len.abs() * (1.0 - 1e-9));
    }

    #[test]
    fn volkov_modulus_is_normalization(which in 0usize..3, p in vec3(4.0), t in -20.0..20.0f64, r in vec3(20.0), plus in any::<bool>()) {
        let branch = if plus { Branch::Plus } else { Branch::Minus };
        let bg = Background::new(Particle::default(), pulses()[which].clone()).unwrap();
        let st = bg.state(p, branch).unwrap();
        let psi = st.eval(&FourVector::new(t, r)).unwrap();
        prop_assert!((psi.norm() - st.normalization()).abs() < 1e-12 * st.normalization());
    }

    #[test]
    fn transverse_shift_is_a_phase(which in 0usize..3, p in vec3(4.0), t in -20.0..20.0f64, r in vec3(20.0), d in vec3(5.0), plus in any::<bool>()) {
        let branch = if plus { Branch::Plus } else { Branch::Minus };
        let bg = Background::new(Particle::default(), pulses()[which].clone()).unwrap();
        let st = bg.state(p, branch).unwrap();
        let shift = Vec3::new(d.x, d.y, 0.0);
        let a = st.eval(&FourVector::new(t, r)).unwrap();
        let b = st.eval(&FourVector::new(t, r + shift)).unwrap();
        let want = a * Complex64::cis(branch.sign() * p.dot(&shift));
        prop_assert!(close(b, want, 1e-9));
    }

    #[test]
    fn minus_branch_is_conjugate_with_opposite_charge(which in 0usize..3, p in vec3(4.0), t in -20.0..20.0f64, r in vec3(20.0)) {
        let acc = std::sync::Arc::new(PhaseAccumulator::new(pulses()[which].clone()).unwrap());
        let minus = VolkovState::new(Particle::new(1.0, -1.0).unwrap(), p, Branch::Minus, acc.clone()).unwrap();
        let plus = VolkovState::new(Particle::new(1.0, 1.0).unwrap(), p, Branch::Plus, acc).unwrap();
        let x = FourVector::new(t, r);
        prop_assert!(close(minus.eval(&x).unwrap(), plus.eval(&x).unwrap().conj(), 1e-10));
    }

    #[test]
    fn s_depends_on_ab_only(a in 0.2..5.0f64, ab in 0.3..5.0f64) {
        let s = s_integral(&RegularizedOscillatory::new(a, ab / a).unwrap(), 1e-8).unwrap().value;
        let r = ab.sqrt();
        let reference = s_integral(&RegularizedOscillatory::new(r, r).unwrap(), 1e-8).unwrap().value;
        prop_assert!((s - reference).abs() < 1e-8);
    }

    #[test]
    fn tail_partial_sums_bracket_the_limit(a in 0.3..3.0f64, b in 0.3..3.0f64) {
        let reg = RegularizedOscillatory::new(a, b).unwrap();
        let (right, left) = s_tail_partial_sums(&reg, 30).unwrap();
        for sums in [right, left] {
            let (limit, _) = volkov::quadrature::wynn_epsilon(&sums);
            for w in sums.windows(2).take(20) {
                prop_assert!((w[0] - limit) * (w[1] - limit) <= 0.0, "{} {} {}", w[0], w[1], limit);
            }
        }
    }

    #[test]
    fn smeared_c_sifts(center in -1.0..1.0f64, width in 0.1..0.5f64, kappa in 0.5..2.0f64, minus_two in any::<bool>()) {
        let g = SmearingFunction::gaussian(center, width).unwrap();
        let n = if minus_two { CIndex::MinusTwo } else { CIndex::Zero };
        let res = c_integral_smeared(n, kappa, &g, 1e-8).unwrap();
        prop_assert!((res.value - PI * g.value(0.0)).abs() < 1e-6 * PI * g.peak());
    }

    #[test]
    fn config_round_trips(sigma in 0.01..2.0f64, seed in any::<u64>(), threads in 1usize..16, times in prop::collection::vec(-50.0..50.0f64, 1..5)) {
        let mut cfg = RunConfig::default();
        cfg.packet.sigma = sigma;
        cfg.packet.times = times;
        cfg.run.seed = seed;
        cfg.run.threads = threads;
        let text = cfg.to_toml();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn gram_matrix_is_hermitian_with_signed_norms(c1 in vec3(0.3), c2 in vec3(0.3), t in -5.0..5.0f64) {
        let bg = Background::free(Particle::default());
        let labels = [(Branch::Plus, c1), (Branch::Plus, c2), (Branch::Minus, c1)];
        let report = orthogonality_report(&labels, 0.2, &[t], &bg, &SpatialQuadrature::default(), 5.5).unwrap();
        let g = &report.gram[0];
        prop_assert!((g - g.adjoint()).iter().all(|z| z.norm() < 1e-12));
        prop_assert!((g[(0, 0)].re - 1.0).abs() < 1e-6 && (g[(2, 2)].re + 1.0).abs() < 1e-6);
        let overlap = (-(c1 - c2).norm_squared() / (4.0 * 0.04)).exp();
        prop_assert!((g[(0, 1)] - overlap).norm() < 1e-6);
        prop_assert!(g[(0, 2)].norm() < 1e-6 && g[(1, 2)].norm() < 1e-6);
    }

    #[test]
    fn propagator_keeps_only_the_time_ordered_branch(offset in vec3(1.5), forward in any::<bool>()) {
        let bg = Background::free(Particle::default());
        let quad = SpatialQuadrature::default();
        let mix = PacketMix::gaussian(
            &bg,
            0.2,
            Some((Vec3::new(0.2, 0.0, 0.1), Complex64::new(1.0, 0.0))),
            Some((Vec3::new(-0.1, 0.1, 0.0), Complex64::new(0.0, 1.0))),
            0.0,
            &quad,
            5.5,
        )
        .unwrap();
        let (t_to, branch, factor) = if forward {
            (6.0, Branch::Plus, -Complex64::i())
        } else {
            (-6.0, Branch::Minus, Complex64::i())
        };
        let right = mix.component(branch).unwrap();
        let x = right.classical_center(t_to).unwrap() + offset;
        let got = propagate_packet(&PropagatorSpec::new(bg.clone()), &mix, 0.0, t_to, &x).unwrap();
        let want = factor * right.value(&FourVector::new(t_to, x)).unwrap();
        let peak = right.value(&FourVector::new(t_to, right.classical_center(t_to).unwrap())).unwrap().norm();
        prop_assert!((got - want).norm() < 1e-6 * peak, "{got} vs {want}");
    }
}

#[test]
fn lightcone_coords_example() {
    let geom = PropagationGeometry::along_z();
    let c = geom.lightcone_coords(&FourVector::new(2.0, Vec3::new(1.0, -1.0, 0.5)));
    assert_eq!(
        c,
        LightConeCoords {
            phi: 1.5,
            phitilde: 2.5,
            r_perp: Vec3::new(1.0, -1.0, 0.0)
        }
    );
}
