//! Polynomial search by linear programming: solve for the optimal
//! coefficients, sweep t0, and certify the result exactly.

use kissing::polyalg::{rat, to_f64};
use kissing::polysearch::{refine_and_certify, scan_t0, solve_lp, t0_range, RoundingOptions, SearchParams};

fn main() -> kissing::Result<()> {
    let p = SearchParams::new(4, rat(1, 2), rat(6058, 10000), 9, 2000)?;
    let r = solve_lp(&p)?;
    println!("n = 4, d = 9, t0 = 0.6058: E = {:.6} ({} pivots)", r.e, r.log.pivots);
    for (k, c) in r.c.iter().enumerate() {
        println!("  c_{} = {c:.6}", k + 1);
    }

    let opts = RoundingOptions {
        shift: Some(rat(1, 1_000_000)),
        ..Default::default()
    };
    let refined = refine_and_certify(&r, &opts)?;
    println!(
        "exact certificate: t0 in [{:.6}, {:.6}], E = {:.6}",
        to_f64(&refined.phi_star.t0_lo),
        to_f64(&refined.phi_star.t0_hi),
        refined.e_after
    );

    let coarse = SearchParams::new(4, rat(1, 2), rat(6, 10), 9, 500)?;
    let t0s = t0_range(&rat(59, 100), &rat(62, 100), &rat(1, 200))?;
    for (t0, e) in scan_t0(&coarse, &t0s) {
        match e {
            Ok(e) => println!("  t0 = {:.3}: E = {e:.6}", to_f64(&t0)),
            Err(err) => println!("  t0 = {:.3}: {err}", to_f64(&t0)),
        }
    }

    for (n, t0) in [(9, rat(54, 100)), (10, rat(586, 1000))] {
        let r = solve_lp(&SearchParams::new(n, rat(1, 2), t0, 11, 2000)?)?;
        println!("n = {n}, d = 11: E = {:.4}", r.e);
    }
    Ok(())
}
