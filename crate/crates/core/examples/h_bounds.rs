//! Grid bounds on h_2 .. h_6 for the built-in degree-9 polynomial in four
//! dimensions, uniform grid value next to the refined bound.

use std::f64::consts::PI;
use std::time::Instant;

use kissing::builtins::f4;
use kissing::gegenbauer::certify_phi_star;
use kissing::hbounds::{default_theta0_prime, h6_bound, lambda2, lambda5, lambda_simplex, FTilde, GridSpec};
use kissing::polyalg::rat;

fn show(name: &str, out: &kissing::hbounds::GridOutcome, t: Instant) {
    let lower = out.lower.as_ref().map_or(f64::NAN, |w| w.value);
    let at: Vec<String> = out
        .lower
        .as_ref()
        .map(|w| w.point.iter().map(|x| format!("{:.4}", x.to_degrees())).collect())
        .unwrap_or_default();
    println!(
        "{name:<4} uniform {:.6}  upper {:.6}  witness {:.6} at [{}]  ({:.1}s)",
        out.uniform,
        out.upper,
        lower,
        at.join(", "),
        t.elapsed().as_secs_f64()
    );
}

fn main() -> kissing::Result<()> {
    let f = f4();
    let cert = certify_phi_star(&f, &rat(1, 2)).expect("f4 is in the class");
    let ft = FTilde::new(&f, cert.theta0_upper());
    let g = GridSpec::default();
    let psi = PI / 3.0;
    println!("theta0 = {:.6} deg", ft.theta0().to_degrees());

    let t = Instant::now();
    show("h2", &lambda2(&ft, psi, g.n2, g.refine), t);
    let t = Instant::now();
    show("h3", &lambda_simplex(&ft, psi, 3, g.n3, g.refine)?, t);
    let t = Instant::now();
    show("h4", &lambda_simplex(&ft, psi, 4, g.n4, g.refine)?, t);
    let t = Instant::now();
    let l5 = lambda5(&ft, 0.5, g.n5, g.alpha, g.refine)?;
    show("h5", &l5, t);
    let t = Instant::now();
    let tp = default_theta0_prime(0.5, ft.theta0());
    let h6 = h6_bound(&ft, 0.5, tp, l5.upper, &g)?;
    show("l5'", &h6.lambda5_prime, t);
    println!("h6   {:.6} = max({:.6}, {:.6}) at theta0' = {:.1} deg", h6.value, h6.outer, h6.inner, tp.to_degrees());
    Ok(())
}
