mod common;

use hypernet::admissible::{example58_library, random_probe_library, ResponseFunction};
use hypernet::partition::enumerate_balanced;
use hypernet::sim::{final_state, integrate, linspace, loglog_slope, sweep, Integrator};
use hypernet::{gallery, AdmissibleSystem, BifurcationDiagram, Polynomial, ResponseLibrary, SimConfig, Slot};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn running() -> AdmissibleSystem {
    AdmissibleSystem::new(gallery::running_example(), example58_library()).unwrap()
}

fn max_class_spread(p: &hypernet::Partition, x: &[f64]) -> f64 {
    p.classes()
        .iter()
        .flat_map(|c| c.iter().map(move |&v| (x[v] - x[c[0]]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn example_trajectories_stay_synchronized() {
    let sys = running();
    let net = sys.network();
    let default = SimConfig::default().initial;
    for p in enumerate_balanced(net, 12).unwrap() {
        // Each class starts at the default value of its first vertex.
        let cfg = SimConfig {
            initial: (0..net.vertex_count()).map(|v| default[p.class_of(v)[0]]).collect(),
            t_end: 1000.0,
            stride: 1000,
            ..SimConfig::default()
        };
        assert_eq!(cfg.steps(), 10_000);
        for lambda in [-0.02, 0.0, 0.03] {
            let trace = integrate(&sys, lambda, &cfg).unwrap_or_else(|e| panic!("{e} {} {:?}", p.display(net), cfg.initial));
            for x in &trace.states {
                assert!(max_class_spread(&p, x) <= 1e-9, "{} at {lambda}", p.display(net));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polynomial_trajectories_stay_synchronized(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Probe responses plus strong linear damping keep orbits bounded.
        let lib: ResponseLibrary = random_probe_library(&net, 2, &mut rng)
            .into_iter()
            .map(|(t, r)| {
                let damped = r.as_polynomial().unwrap().iter().enumerate()
                    .map(|(c, p)| &p.scale(&hypernet::poly::ratio(1, 50)) - &Polynomial::term(hypernet::poly::int(4), hypernet::Monomial::var(Slot::Own(c), 1)))
                    .collect();
                (t, ResponseFunction::Polynomial(damped))
            })
            .collect();
        let sys = AdmissibleSystem::new(net.clone(), lib).unwrap();
        for p in enumerate_balanced(&net, 12).unwrap() {
            let z: Vec<f64> = (0..p.num_colours()).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let cfg = SimConfig {
                dt: 0.01,
                t_end: 100.0,
                initial: (0..net.vertex_count()).map(|v| z[p.colour(v) - 1]).collect(),
                stride: 500,
                ..SimConfig::default()
            };
            let Ok(trace) = integrate(&sys, 0.1, &cfg) else { continue };
            for x in &trace.states {
                prop_assert!(max_class_spread(&p, x) <= 1e-9);
            }
        }
    }
}

#[test]
fn parallel_sweep_is_bitwise_identical() {
    let sys = running();
    let cfg = SimConfig { lambdas: linspace(-0.03, 0.03, 24), t_end: 200.0, ..SimConfig::default() };
    let serial = sweep(&sys, &cfg, 1).unwrap();
    for jobs in [2, 4] {
        let parallel = sweep(&sys, &cfg, jobs).unwrap();
        assert_eq!(serial.rows.len(), parallel.rows.len());
        for (a, b) in serial.rows.iter().zip(&parallel.rows) {
            assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
            assert!(a.state.iter().zip(&b.state).all(|(x, y)| x.to_bits() == y.to_bits()));
            assert_eq!(a.residual.to_bits(), b.residual.to_bits());
        }
    }
}

#[test]
fn euler_error_halves_with_the_step() {
    // Over a short horizon the three runs still differ by discretization
    // error; by t = 2000 they sit on the same fixed point.
    let sys = running();
    let run = |dt: f64| {
        final_state(&sys, -0.02, &SimConfig { dt, t_end: 4.0, ..SimConfig::default() }).unwrap()
    };
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let dist = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let ratio = dist(&a, &b) / dist(&b, &c);
    assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rk4_agrees_with_fine_euler() {
    let sys = running();
    let cfg = SimConfig { dt: 0.05, t_end: 5.0, ..SimConfig::default() };
    let rk = final_state(&sys, 0.01, &SimConfig { integrator: Integrator::Rk4, ..cfg.clone() }).unwrap();
    let eu = final_state(&sys, 0.01, &SimConfig { dt: 0.0005, ..cfg }).unwrap();
    for (p, q) in rk.iter().zip(&eu) {
        assert!((p - q).abs() < 1e-3, "{p} vs {q}");
    }
}

#[test]
fn csv_round_trip_preserves_the_slope() {
    let sys = running();
    let cfg = SimConfig { lambdas: linspace(0.005, 0.03, 12), ..SimConfig::default() };
    let d = sweep(&sys, &cfg, 1).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("lambda,v0,v1,v2,w0,w1,residual,converged\n"));
    let back = BifurcationDiagram::read_csv(buf.as_slice()).unwrap();
    let (s1, s2) = (
        loglog_slope(&d, "w0", "w1", 0.005, 0.03).unwrap(),
        loglog_slope(&back, "w0", "w1", 0.005, 0.03).unwrap(),
    );
    assert_eq!(s1.slope.to_bits(), s2.slope.to_bits());
}
