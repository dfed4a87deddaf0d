//! Class certificates: where the polynomial changes sign below `-z`, and
//! exact Sturm-based proofs that it is nonpositive on `[-t0, z]` and
//! decreasing on `[-1, -t0]`.

use kissing::builtins::{f4, k3};
use kissing::gegenbauer::certify_phi_star;
use kissing::geometry::mu_bound;
use kissing::polyalg::{rat, to_f64, Polynomial};

fn show(name: &str, f: &Polynomial, n: usize) {
    let z = rat(1, 2);
    match certify_phi_star(f, &z) {
        Ok(c) => {
            let mu = mu_bound(n, &z, &c.tau0).expect("mu");
            println!(
                "{name}: t0 in [{:.8}, {:.8}], tau0 = {}, theta0 <= {:.4} deg, f(-1) = {:.4}, mu = {}",
                to_f64(&c.t0_lo),
                to_f64(&c.t0_hi),
                c.tau0,
                c.theta0_upper().to_degrees(),
                to_f64(&c.f_at_minus_one),
                mu.mu_star
            );
            println!("  sign samples: {}, derivative samples: {}", c.nonpositive.samples.len(), c.decreasing.samples.len());
        }
        Err(e) => println!("{name}: not in the class: {e}"),
    }
}

fn main() {
    show("f4", &f4(), 4);
    show("k3", &k3(), 3);
    // increasing where it must decrease
    show("t", &Polynomial::x(), 4);
}
