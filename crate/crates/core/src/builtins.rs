//! Named polynomials shipped with the crate.

use crate::polyalg::{rat, Polynomial};

/// Degree-9 polynomial for the four-dimensional kissing problem.
pub fn f4() -> Polynomial {
    Polynomial::new(vec![
        rat(-2, 125),
        rat(-217, 500),
        rat(-516, 125),
        rat(-1229, 125),
        rat(2048, 125),
        rat(1764, 25),
        rat(0, 1),
        rat(-2688, 25),
        rat(0, 1),
        rat(1344, 25),
    ])
}

/// Degree-9 polynomial for the three-dimensional kissing problem.
pub fn k3() -> Polynomial {
    Polynomial::new(vec![
        rat(-1, 200),
        rat(1, 10),
        rat(-213, 100),
        rat(-83, 10),
        rat(343, 40),
        rat(18333, 400),
        rat(0, 1),
        rat(-1287, 20),
        rat(0, 1),
        rat(2431, 80),
    ])
}

/// Dimension each builtin is meant for, alongside the polynomial.
pub fn lookup(name: &str) -> Option<(usize, Polynomial)> {
    match name {
        "f4" => Some((4, f4())),
        "k3" | "musin-k3" => Some((3, k3())),
        _ => None,
    }
}

pub const NAMES: &[&str] = &["f4", "k3"];
