//! Full certificate that a kissing configuration in four dimensions has at
//! most 24 points. Runs every stage with the default grids (about half a
//! minute in release mode).

use kissing::builtins::f4;
use kissing::hbounds::{certify_code_bound, CertifyOptions};
use kissing::polyalg::rat;

fn main() -> kissing::Result<()> {
    let cert = certify_code_bound(&f4(), 4, &rat(1, 2), &CertifyOptions::default())?;
    print!("{}", cert.to_report());
    println!();
    for v in &cert.values {
        println!("h_{} = {:.6} ({})", v.m, v.value, v.method.name());
    }
    println!("h_max = h_{} = {:.6}, so at most {} points", cert.argmax_m, cert.h_max, cert.code_bound);
    Ok(())
}
