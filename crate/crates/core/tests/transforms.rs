mod common;

use proptest::prelude::*;
use qmk::sequences::halton;
use qmk::transforms::{
    chelson_identity_check, conditional_transform_2d, pseudo_inverse_fn, product_transform, tilde_g_map,
    ChelsonFixture, ConditionalCdf2D, ProductCdf2D,
};
use qmk::{star_discrepancy, MeasureSpec, PointSet, SideClosure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Area of a convex polygon.
fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Clips a convex polygon to the half-plane `y1 <= y2` (or its complement).
fn clip(poly: &[(f64, f64)], upper: bool) -> Vec<(f64, f64)> {
    let inside = |p: (f64, f64)| if upper { p.0 <= p.1 } else { p.0 >= p.1 };
    let cross = |p: (f64, f64), q: (f64, f64)| {
        let t = (p.1 - p.0) / ((p.1 - p.0) - (q.1 - q.0));
        (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
    };
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        match (inside(p), inside(q)) {
            (true, true) => out.push(q),
            (true, false) => out.push(cross(p, q)),
            (false, true) => {
                out.push(cross(p, q));
                out.push(q);
            }
            (false, false) => {}
        }
    }
    out
}

fn triangle_density_mass(lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let rect = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])];
    let above = clip(&rect, true);
    let below = clip(&rect, false);
    let area = |p: &Vec<(f64, f64)>| if p.len() < 3 { 0.0 } else { shoelace(p) };
    0.5 * area(&above) + 1.5 * area(&below)
}

#[test]
fn triangle_density_against_polygon_clipping() {
    let m = ChelsonFixture.measure();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (c, d): (f64, f64) = (rng.gen(), rng.gen());
        let lo = [a.min(b), c.min(d)];
        let hi = [a.max(b), c.max(d)];
        let got = m.box_measure(&lo, &hi, &[SideClosure::CLOSED; 2]).unwrap();
        let want = triangle_density_mass(lo, hi);
        assert!((got - want).abs() < 1e-9, "{lo:?} {hi:?}: {got} vs {want}");
    }
}

#[test]
fn counterexample_report() {
    let ps = PointSet::new(2, vec![vec![56.0 / 81.0, 20.0 / 23.0]]).unwrap();
    let r = chelson_identity_check(&ps, &ChelsonFixture, &ChelsonFixture.measure(), &[1.0, 0.8]).unwrap();
    assert!((r.transformed.value - 610.0 / 729.0).abs() < 1e-12);
    assert!((r.uniform.value - 20.0 / 23.0).abs() < 1e-12);
    assert!(!r.identity_holds);
    assert!((r.probe.measure_of_box - 22.0 / 25.0).abs() < 1e-12);
    assert!((r.probe.lebesgue_of_tilde_box - 0.8).abs() < 1e-12);
    assert!(!r.probe.measures_agree);
}

#[test]
fn product_form_satisfies_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let g1 = common::AxisModel::random(&mut rng, true, false, false).cdf();
        let g2 = common::AxisModel::random(&mut rng, true, false, false).cdf();
        let cdf = ProductCdf2D::new(g1, g2);
        let ps = halton(rng.gen_range(1..=32), 2).unwrap();
        let r = chelson_identity_check(&ps, &cdf, &cdf.measure(), &[0.6, 0.9]).unwrap();
        assert!(r.identity_holds, "difference {}", r.difference);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_transform_never_increases_discrepancy(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axes: Vec<_> = (0..d).map(|_| common::AxisModel::random(&mut rng, false, true, true).cdf()).collect();
        let m = MeasureSpec::product(axes).unwrap();
        let ps = common::point_set(&mut rng, d, n);
        let lhs = star_discrepancy(&product_transform(&ps, &m).unwrap(), &m).unwrap().value;
        let rhs = star_discrepancy(&ps, &MeasureSpec::Uniform(d)).unwrap().value;
        prop_assert!(lhs <= rhs + 1e-12, "{} > {}", lhs, rhs);
    }

    #[test]
    fn callback_pseudo_inverse_is_galois(seed in any::<u64>(), y in 0.0f64..=1.0, x in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::AxisModel::random(&mut rng, false, true, true).cdf();
        let q = pseudo_inverse_fn(|t| g.eval(t), y);
        prop_assert!(g.eval(q) >= y);
        prop_assert!(pseudo_inverse_fn(|t| g.eval(t), g.eval(x)) <= x);
        prop_assert!((q - g.pseudo_inverse(y)).abs() <= 1e-12);
    }

    #[test]
    fn conditional_transform_round_trips(x1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0) {
        let z = conditional_transform_2d(&[x1, x2], &ChelsonFixture).unwrap();
        let back = tilde_g_map(&z, &ChelsonFixture).unwrap();
        prop_assert!((back[0] - x1).abs() <= 1e-12 && (back[1] - x2).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_inverses_match_bisection(x in 0.0f64..=1.0, y1 in 0.0f64..=1.0) {
        let f = ChelsonFixture;
        prop_assert!((f.marginal_inverse(x) - pseudo_inverse_fn(|t| f.marginal(t), x)).abs() <= 1e-12);
        let bisected = pseudo_inverse_fn(|t| f.conditional(t, y1), x);
        prop_assert!((f.conditional_inverse(x, y1) - bisected).abs() <= 1e-12);
    }
}
