use qmk::sequences::{halton, van_der_corput};
use qmk::{star_discrepancy, ExactOptions, MeasureSpec, PointSet, uniform_star_discrepancy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn coordinates_inside_and_index_stable() {
    let short = halton(50, 8).unwrap();
    let long = halton(200, 8).unwrap();
    assert_eq!(&long.points()[..50], short.points());
    assert!(long.iter().flatten().all(|&x| x > 0.0 && x < 1.0));
    for n in 1..100 {
        let v = van_der_corput(n, 2).unwrap();
        assert_eq!(v, long.points()[n as usize - 1][0]);
    }
}

#[test]
fn sixteen_points_in_one_dimension() {
    let ps = halton(16, 1).unwrap();
    assert!(star_discrepancy(&ps, &MeasureSpec::Uniform(1)).unwrap().value <= 0.2);
}

#[test]
fn base_two_discrepancy_decreases_along_powers_of_two() {
    let opts = ExactOptions::default();
    let mut previous = f64::INFINITY;
    for k in 0..=10 {
        let d = uniform_star_discrepancy(&halton(1 << k, 1).unwrap(), &opts).unwrap();
        assert!(d <= previous, "N = {}: {d} > {previous}", 1 << k);
        previous = d;
    }
}

#[test]
fn beats_pseudo_random_points_for_most_seeds() {
    let opts = ExactOptions::default();
    let h = uniform_star_discrepancy(&halton(64, 2).unwrap(), &opts).unwrap();
    let wins = (0..20u64)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = (0..64).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            h < uniform_star_discrepancy(&PointSet::new(2, pts).unwrap(), &opts).unwrap()
        })
        .count();
    assert!(wins > 10, "halton won {wins} of 20");
}
