//! The degree-9 polynomial behind the four-dimensional bound, in the monomial
//! and Gegenbauer bases, and the classical Delsarte value it gives.

use kissing::builtins::f4;
use kissing::gegenbauer::{certify_gnplus, expand};
use kissing::hbounds::h0_h1;
use kissing::polyalg::to_f64;

fn main() -> kissing::Result<()> {
    let f = f4();
    println!("f(t) = {f}");
    let e = expand(&f, 4)?;
    for (k, c) in e.coeffs.iter().enumerate() {
        println!("  c_{k} = {c}");
    }
    let cert = certify_gnplus(&e).expect("nonnegative coefficients");
    println!("c_0 = {}, all c_k >= 0", cert.c0());
    assert_eq!(e.reconstruct(), f);

    let (h0, h1) = h0_h1(&f);
    println!("f(1) = {h0} ({:.4}), f(1) + f(-1) = {h1} ({:.4})", to_f64(&h0), to_f64(&h1));
    Ok(())
}
