//! Stability verdicts agree with what trajectories actually do nearby.

mod common;

use alleedyn::equilibria::boundary_equilibria;
use alleedyn::integrator::{basin_probe, integrate, IntegrationOpts};
use alleedyn::model::State;
use alleedyn::stability::{classify, Classification};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

/// Smallest |Re λ| accepted, so that 1e4 time units resolve the dynamics.
const MIN_RATE: f64 = 2e-3;

#[test]
fn verdicts_match_nearby_trajectories() {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut stable_seen, mut unstable_seen) = (0, 0);
    for _ in 0..60 {
        let p = common::random_params(&mut rng);
        let b = boundary_equilibria(&p);
        for e in b.iter().filter(|e| e.feasible) {
            let r = classify(&p, e).unwrap();
            if r.eigenvalues.iter().any(|z| z.re.abs() < MIN_RATE) {
                continue;
            }
            match r.classification {
                Classification::StableNode => {
                    stable_seen += 1;
                    let f = basin_probe(&p, &e.point, 1e-3, 10, 1e4, rng.random()).unwrap();
                    assert_eq!(f, 1.0, "{:?} at {:?}", e.label, p);
                }
                c if c.is_unstable() => {
                    unstable_seen += 1;
                    let departs = (0..10).any(|_| {
                        let dir: [f64; 3] =
                            std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                        let start = e
                            .point
                            .to_array()
                            .iter()
                            .zip(dir)
                            .map(|(v, d)| (v + 1e-3 * d / n).max(0.0))
                            .collect::<Vec<_>>();
                        let t = integrate(
                            &p,
                            &State::from_array([start[0], start[1], start[2]]),
                            &IntegrationOpts::rk45(1e4),
                        )
                        .unwrap();
                        t.states.iter().any(|s| s.dist_inf(&e.point) > 1e-2)
                    });
                    assert!(departs, "{:?} at {:?}", e.label, p);
                }
                _ => {}
            }
        }
    }
    assert!(
        stable_seen > 5 && unstable_seen > 5,
        "{stable_seen} / {unstable_seen}"
    );
}
