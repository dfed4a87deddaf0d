//! The classical bound `f(1)/c_0` for polynomials nonpositive on all of
//! `[-1, z]`: the LP optimum by degree, and an exact check of a known one.

use kissing::delsarte::{delsarte_bound, CodeProblem};
use kissing::polyalg::{rat, Polynomial};
use kissing::polysearch::delsarte_lp;

fn main() -> kissing::Result<()> {
    for n in [3, 4] {
        for d in [4, 6, 9] {
            let lp = delsarte_lp(n, &rat(1, 2), d, 2000)?;
            println!("n = {n}, degree {d}: LP optimum f(1)/c_0 = {:.4}", lp.bound);
        }
    }

    // (t + 1)(t + 1/2)^2 t^2 (t - 1/2): double roots at the inner grid points
    let t = Polynomial::x();
    let c = Polynomial::constant;
    let f = &(&(&(&t + &c(rat(1, 1))) * &(&t + &c(rat(1, 2)))) * &(&(&t + &c(rat(1, 2))) * &(&t * &t))) * &(&t - &c(rat(1, 2)));
    match delsarte_bound(&f, &CodeProblem::kissing(3)?) {
        Ok(b) => println!("exact bound for the sextic in 3D: {} ({:.4})", b.exact, b.value()),
        Err(e) => println!("sextic rejected: {e}"),
    }
    Ok(())
}
