//! Built-in seeded scenario generators, so the reference scenarios are
//! reproducible without shipping data files.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub struct Scenario {
    pub name: &'static str,
    pub q: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

pub fn generate(spec: &str, seed: u64) -> Result<Scenario, CliError> {
    match spec {
        "circles" => Ok(circles(seed)),
        "clusters" => Ok(clusters(seed)),
        "torus" => Ok(torus(seed)),
        other => Err(CliError::input(format!(
            "unknown generator '{other}' (expected circles, clusters or torus)"
        ))),
    }
}

/// Two 12-point samples of the same unit circle, jittered.
fn circles(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng, phase: f64| {
        (0..12)
            .map(|i| {
                let a = std::f64::consts::TAU * (i as f64 / 12.0)
                    + phase
                    + rng.gen_range(-0.08..0.08);
                let r = 1.0 + rng.gen_range(-0.08..0.08);
                vec![r * a.cos(), r * a.sin()]
            })
            .collect::<Vec<_>>()
    };
    let q = sample(&mut rng, 0.0);
    let p = sample(&mut rng, 0.26);
    Scenario { name: "circles", q, p }
}

/// Q: four 3-point blobs at the corners of a square; P: one point per
/// blob. The blobs trace a loop at coarse scale.
fn clusters(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corners = [[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
    let mut q = Vec::new();
    for c in &corners {
        for _ in 0..3 {
            q.push(vec![
                c[0] + rng.gen_range(-0.25..0.25),
                c[1] + rng.gen_range(-0.25..0.25),
            ]);
        }
    }
    let p = corners
        .iter()
        .map(|c| {
            vec![
                c[0] + rng.gen_range(-0.1..0.1),
                c[1] + rng.gen_range(-0.1..0.1),
            ]
        })
        .collect();
    Scenario { name: "clusters", q, p }
}

/// Two jittered samples of a 4x4 grid on the flat torus, embedded in
/// R^4 as a product of two circles.
fn torus(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng, phase: f64| {
        let mut pts = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                let u = std::f64::consts::TAU * (i as f64 / 4.0)
                    + phase
                    + rng.gen_range(-0.05..0.05);
                let v = std::f64::consts::TAU * (j as f64 / 4.0)
                    + phase
                    + rng.gen_range(-0.05..0.05);
                pts.push(vec![u.cos(), u.sin(), v.cos(), v.sin()]);
            }
        }
        pts
    };
    let q = sample(&mut rng, 0.0);
    let p = sample(&mut rng, 0.4);
    Scenario { name: "torus", q, p }
}
