//! The three-dimensional case: a degree-9 polynomial whose `h_max` is below
//! 13, so no 13 unit spheres touch a fourteenth.

use kissing::builtins::k3;
use kissing::gegenbauer::expand;
use kissing::hbounds::{certify_code_bound, CertifyOptions};
use kissing::polyalg::{rat, to_f64};

fn main() -> kissing::Result<()> {
    let f = k3();
    let e = expand(&f, 3)?;
    let legendre: Vec<String> = e
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| to_f64(c) != 0.0)
        .map(|(k, c)| format!("{:.2} P_{k}", to_f64(c)))
        .collect();
    println!("f = {}", legendre.join(" + "));

    let cert = certify_code_bound(&f, 3, &rat(1, 2), &CertifyOptions::default())?;
    println!("t0 ~ {:.4}, mu = {}", cert.phi_star.as_ref().unwrap().t0_f64(), cert.mu);
    for v in &cert.values {
        println!("h_{} = {:.6} ({})", v.m, v.value, v.method.name());
    }
    println!("k(3) <= {}", cert.code_bound);
    Ok(())
}
