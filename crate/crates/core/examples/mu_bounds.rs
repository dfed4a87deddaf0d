//! How many points of a 60-degree code fit in a cap of radius `theta0`:
//! project onto the boundary sphere and read off the known optimal codes.

use kissing::geometry::mu_bound;
use kissing::polyalg::{rat, to_f64};

fn main() {
    let z = rat(1, 2);
    for n in [3, 4] {
        for t0 in [rat(55, 100), rat(5907, 10000), rat(6058, 10000), rat(65, 100), rat(72, 100), rat(8, 10)] {
            match mu_bound(n, &z, &t0) {
                Ok(m) => println!(
                    "n = {n}, t0 = {:.4}: delta = {}, mu <= {}",
                    to_f64(&t0),
                    m.delta.map_or("-".into(), |d| format!("{:.3} deg", d.to_degrees())),
                    m.mu_star
                ),
                Err(e) => println!("n = {n}, t0 = {:.4}: {e}", to_f64(&t0)),
            }
        }
    }
}
