//! The sum `S(X) = sum f(x_i . x_j)` is at least `c_0 M^2` for any `M` unit
//! vectors when `f` has nonnegative Gegenbauer coefficients. Random point
//! sets and the 24-cell.

use kissing::builtins::f4;
use kissing::delsarte::{fixtures, sum_functional, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> kissing::Result<()> {
    let f = f4();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let m = rng.gen_range(1..=30);
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let v: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
                let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / r).collect()
            })
            .collect();
        let x = PointSet::from_points(&pts)?;
        let ratio = sum_functional(&f, &x) / (m * m) as f64;
        worst = worst.min(ratio);
    }
    println!("min S(X)/M^2 over 200 random sets: {worst:.6} (>= c_0 = 1)");

    let cell = fixtures::twenty_four_cell();
    let s = sum_functional(&f, &cell);
    println!("24-cell: S = {s:.6}, 576 <= S < 600");
    Ok(())
}
