//! Distance from a regular simplex apex to the point fixed by its distances to
//! the other vertices, via the Gram solver and via the closed forms, plus the
//! closest point of a cap intersection.

use std::f64::consts::PI;

use kissing::geometry::{min_theta_on_domain, theta3_explicit, theta4_explicit, CapDomain, GramConfiguration};

fn main() -> kissing::Result<()> {
    let tri = GramConfiguration::regular_simplex(3, 0.5)?;
    let tet = GramConfiguration::regular_simplex(4, 0.5)?;
    let deg = |x: f64| x.to_radians();

    for (t1, t2) in [(30.0, 30.0), (20.0, 45.0), (35.26, 35.26)] {
        let a = tri.solve_theta(&[deg(t1), deg(t2)], 2);
        let b = theta3_explicit(deg(t1), deg(t2))?;
        println!("theta3({t1}, {t2}) = {:.8} deg (solver {:?})", b.to_degrees(), a.map(f64::to_degrees));
    }
    for t in [[30.231, 30.231, 51.6765], [40.0, 40.0, 40.0]] {
        let a = tet.solve_theta(&t.map(deg), 3);
        let b = theta4_explicit(deg(t[0]), deg(t[1]), deg(t[2]))?;
        println!("theta4({t:?}) = {:.8} deg (solver {:?})", b.to_degrees(), a.map(f64::to_degrees));
    }

    let theta0 = deg(52.5588);
    for r in [35.0, 45.0, 52.5588] {
        let a = CapDomain::new(vec![deg(r), deg(r), theta0])?;
        let m = min_theta_on_domain(&tet, &a, 3)?;
        println!("min distance to apex over caps ({r}, {r}, 52.5588) = {:.6} deg", m * 180.0 / PI);
    }
    Ok(())
}
