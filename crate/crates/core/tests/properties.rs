use std::f64::consts::PI;

use kissing::builtins::f4;
use kissing::gegenbauer::certify_phi_star;
use kissing::geometry::{build_p5, mu_bound, p5_alpha_max};
use kissing::hbounds::{lambda2, FTilde, Refinement};
use kissing::polyalg::rat;
use nalgebra::{DMatrix, Vector3};
use proptest::prelude::*;

fn f4_tilde() -> FTilde {
    let c = certify_phi_star(&f4(), &rat(1, 2)).unwrap();
    FTilde::new(&f4(), c.theta0_upper())
}

/// Coordinates in a frame fixed by the facet `{y1, y2, y3}`: facet points via
/// Cholesky, the other points on the side that reproduces `y4 . y5`.
fn p5_frame(alpha: f64) -> (Vec<[f64; 4]>, [f64; 4], [f64; 4]) {
    let cfg = build_p5(alpha, &rat(1, 2)).unwrap();
    let g = cfg.gram();
    let fg = DMatrix::from_fn(3, 3, |i, j| g[(i, j)]);
    let l = fg.cholesky().unwrap().l();
    let facet: Vec<[f64; 4]> = (0..3).map(|i| [l[(i, 0)], l[(i, 1)], l[(i, 2)], 0.0]).collect();
    let lift = |k: usize, sign: f64| {
        let x = l.solve_lower_triangular(&Vector3::new(g[(0, k)], g[(1, k)], g[(2, k)])).unwrap();
        [x[0], x[1], x[2], sign * (1.0 - x.norm_squared()).max(0.0).sqrt()]
    };
    let y4 = lift(3, 1.0);
    let (same, other) = (lift(4, 1.0), lift(4, -1.0));
    let y5 = if (dot(&y4, &same) - g[(3, 4)]).abs() <= (dot(&y4, &other) - g[(3, 4)]).abs() { same } else { other };
    (facet, y4, y5)
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p5_distances_monotone_in_alpha(
        c in prop::array::uniform3(0.0f64..1.0),
    ) {
        let theta0 = f4_tilde().theta0();
        let (facet, _, _) = p5_frame(PI / 3.0);
        // y . y_i = cos a_i with a_i in [0, theta0]
        let cosines = Vector3::from_iterator(c.iter().map(|t| (t * theta0).cos()));
        let fg = DMatrix::from_fn(3, 3, |i, j| dot(&facet[i], &facet[j]));
        let l = fg.cholesky().unwrap().l();
        let x = l.solve_lower_triangular(&cosines).unwrap();
        prop_assume!(x.norm_squared() <= 1.0);
        let w = (1.0 - x.norm_squared()).sqrt();
        // same side of the facet hyperplane as y4 and y5
        let y = [x[0], x[1], x[2], w];

        let (lo, hi) = (PI / 3.0, p5_alpha_max(0.5));
        let steps = 1000;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let alpha = lo + (hi - lo) * i as f64 / steps as f64;
            let (f, y4, y5) = p5_frame(alpha);
            prop_assert!(y4[3] > 0.0 && y5[3] > 0.0);
            for k in 0..3 {
                prop_assert!((dot(&f[k], &facet[k]) - 1.0).abs() < 1e-12);
            }
            let d4 = dot(&y, &y4).clamp(-1.0, 1.0).acos();
            let d5 = dot(&y, &y5).clamp(-1.0, 1.0).acos();
            if let Some((p4, p5)) = prev {
                prop_assert!(d4 >= p4 - 1e-9, "theta4 decreased at alpha = {}", alpha.to_degrees());
                prop_assert!(d5 <= p5 + 1e-9, "theta5 increased at alpha = {}", alpha.to_degrees());
            }
            prev = Some((d4, d5));
        }
    }

    #[test]
    fn grid_bound_sandwich(n in 4usize..120) {
        let ft = f4_tilde();
        let out = lambda2(&ft, PI / 3.0, n, Some(Refinement { gap: 1e-3, ..Refinement::default() }));
        let w = out.lower.as_ref().unwrap();
        prop_assert!(out.uniform >= out.upper - 1e-12);
        prop_assert!(out.upper >= w.value - 1e-12);
        // the witness is a real configuration: H at its distance
        let theta = w.point[0];
        let h = ft.f_one() + 2.0 * ft.eval(theta);
        prop_assert!((h - w.value).abs() < 1e-9);
        prop_assert!(w.value <= 24.8645);
    }

    #[test]
    fn uniform_grid_refinement_monotone(n in 2usize..300) {
        let ft = f4_tilde();
        let a = lambda2(&ft, PI / 3.0, n, None).uniform;
        let b = lambda2(&ft, PI / 3.0, 2 * n, None).uniform;
        prop_assert!(b <= a + 1e-9, "N = {}: {} then {}", n, a, b);
    }

    #[test]
    fn mu_nonincreasing_in_t0(a in 5100u32..9900, b in 5100u32..9900, n in 3usize..=4) {
        let (lo, hi) = (a.min(b), a.max(b));
        let z = rat(1, 2);
        let m_lo = mu_bound(n, &z, &rat(lo as i64, 10000));
        let m_hi = mu_bound(n, &z, &rat(hi as i64, 10000));
        if let (Ok(x), Ok(y)) = (m_lo, m_hi) {
            prop_assert!(y.mu_star <= x.mu_star);
        }
    }
}
