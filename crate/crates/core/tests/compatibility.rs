//! Exact enumeration over joints that satisfy conditional independence:
//! reweighting every cell by `γ_y^{H(x, x*)}` keeps the attributes
//! independent given the class and leaves the class posterior at `x*`
//! unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Joint {
    m: usize,
    prior: Vec<f64>,
    // cond[y][i] = Pr(X_i = 1 | Y = y)
    cond: Vec<Vec<f64>>,
}

impl Joint {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let m = rng.random_range(1..=3);
        let r = rng.random_range(2..=3);
        let raw: Vec<f64> = (0..r).map(|_| rng.random_range(0.05..1.0)).collect();
        let z: f64 = raw.iter().sum();
        Self {
            m,
            prior: raw.iter().map(|p| p / z).collect(),
            cond: (0..r).map(|_| (0..m).map(|_| rng.random_range(0.05..0.95)).collect()).collect(),
        }
    }

    fn cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..1usize << self.m).map(move |bits| (0..self.m).map(|i| (bits >> i) & 1).collect())
    }

    fn prob(&self, x: &[usize], y: usize) -> f64 {
        let mut p = self.prior[y];
        for (i, &v) in x.iter().enumerate() {
            p *= if v == 1 { self.cond[y][i] } else { 1.0 - self.cond[y][i] };
        }
        p
    }
}

fn hamming(a: &[usize], b: &[usize]) -> i32 {
    a.iter().zip(b).filter(|(u, v)| u != v).count() as i32
}

#[test]
fn cell_weights_preserve_independence_and_posterior() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..50 {
        let joint = Joint::random(&mut rng);
        let r = joint.prior.len();
        let x_star: Vec<usize> = (0..joint.m).map(|_| rng.random_range(0..2)).collect();
        let gamma: Vec<f64> = (0..r).map(|_| rng.random_range(0.0..=1.0)).collect();
        let weighted = |x: &[usize], y: usize| gamma[y].powi(hamming(x, &x_star)) * joint.prob(x, y);
        let z: f64 = joint.cells().flat_map(|x| (0..r).map(move |y| (x.clone(), y))).map(|(x, y)| weighted(&x, y)).sum();

        for y in 0..r {
            let class_mass: f64 = joint.cells().map(|x| weighted(&x, y)).sum::<f64>() / z;
            for x in joint.cells() {
                let lhs = weighted(&x, y) / z / class_mass;
                let mut rhs = 1.0;
                for i in 0..joint.m {
                    let marginal: f64 =
                        joint.cells().filter(|c| c[i] == x[i]).map(|c| weighted(&c, y)).sum::<f64>() / z / class_mass;
                    rhs *= marginal;
                }
                assert!((lhs - rhs).abs() <= 1e-12, "case {case}: Pr_w(x|y) {lhs} vs product {rhs}");
            }
        }

        let plain: f64 = (0..r).map(|y| joint.prob(&x_star, y)).sum();
        let reweighted: f64 = (0..r).map(|y| weighted(&x_star, y)).sum();
        for y in 0..r {
            let before = joint.prob(&x_star, y) / plain;
            let after = weighted(&x_star, y) / reweighted;
            assert!((before - after).abs() <= 1e-12, "case {case}: posterior moved");
        }
    }
}
