#![allow(dead_code)]

use qmk::{Atom, AxisCdf, DiscreteSignedMeasure, GridFunction, Interpolation, PointSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Coordinates on a coarse lattice half of the time so that points, atoms
/// and breakpoints collide.
pub fn coord(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(0..=4) as f64 / 4.0
    } else {
        rng.gen::<f64>()
    }
}

pub fn breakpoints(rng: &mut ChaCha8Rng, max_interior: usize) -> Vec<f64> {
    let k = rng.gen_range(0..=max_interior);
    let mut b: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..0.99)).collect();
    b.push(0.0);
    b.push(1.0);
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup();
    b
}

pub fn point_set(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointSet {
    PointSet::new(d, (0..n).map(|_| (0..d).map(|_| coord(rng)).collect()).collect()).unwrap()
}

pub fn signed_measure(rng: &mut ChaCha8Rng, d: usize, max_atoms: usize) -> DiscreteSignedMeasure {
    let k = rng.gen_range(1..=max_atoms);
    let atoms: Vec<Atom> = (0..k)
        .map(|_| Atom::new((0..d).map(|_| coord(rng)).collect(), rng.gen_range(-2.0..=2.0)))
        .collect();
    DiscreteSignedMeasure::new(d, atoms).unwrap()
}

pub fn probability_atoms(rng: &mut ChaCha8Rng, d: usize, max_atoms: usize) -> DiscreteSignedMeasure {
    let k = rng.gen_range(1..=max_atoms);
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let atoms: Vec<Atom> = w
        .iter()
        .map(|&wi| Atom::new((0..d).map(|_| coord(rng)).collect(), wi / total))
        .collect();
    DiscreteSignedMeasure::new(d, atoms).unwrap()
}

pub fn step_function(rng: &mut ChaCha8Rng, d: usize, max_interior: usize) -> GridFunction {
    let bps: Vec<Vec<f64>> = (0..d).map(|_| breakpoints(rng, max_interior)).collect();
    let n: usize = bps.iter().map(Vec::len).product();
    let values = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    GridFunction::new(bps, values, Interpolation::RightContinuousStep).unwrap()
}

/// A one-dimensional distribution kept as raw arrays, with its own evaluation
/// so that tests do not lean on the library's interpolation.
#[derive(Clone, Debug)]
pub struct AxisModel {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub values_left: Vec<f64>,
}

impl AxisModel {
    /// Linear pieces between breakpoints with masses `pieces`, plus atoms `jumps`
    /// at the breakpoints, normalized to total mass 1.
    pub fn build(breakpoints: Vec<f64>, pieces: &[f64], jumps: &[f64]) -> Self {
        let total: f64 = pieces.iter().sum::<f64>() + jumps.iter().sum::<f64>();
        let mut values = Vec::new();
        let mut values_left = Vec::new();
        let mut acc = 0.0;
        for i in 0..breakpoints.len() {
            if i > 0 {
                acc += pieces[i - 1];
            }
            values_left.push((acc / total).min(1.0));
            acc += jumps[i];
            values.push((acc / total).min(1.0));
        }
        *values.last_mut().unwrap() = 1.0;
        AxisModel {
            breakpoints,
            values,
            values_left,
        }
    }

    pub fn random(rng: &mut ChaCha8Rng, strictly_increasing: bool, flats: bool, atoms: bool) -> Self {
        let b = breakpoints(rng, 4);
        let pieces: Vec<f64> = (0..b.len() - 1)
            .map(|_| {
                if flats && rng.gen_bool(0.4) {
                    0.0
                } else {
                    rng.gen_range(0.1..1.0)
                }
            })
            .collect();
        let mut jumps: Vec<f64> = (0..b.len())
            .map(|_| {
                if atoms && !strictly_increasing && rng.gen_bool(0.4) {
                    rng.gen_range(0.1..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        if pieces.iter().sum::<f64>() + jumps.iter().sum::<f64>() == 0.0 {
            jumps[0] = 1.0;
        }
        Self::build(b, &pieces, &jumps)
    }

    pub fn cdf(&self) -> AxisCdf {
        AxisCdf::new(self.breakpoints.clone(), self.values.clone(), Some(self.values_left.clone())).unwrap()
    }

    /// `G(t)` or `G(t⁻)`.
    pub fn eval(&self, t: f64, left: bool) -> f64 {
        let b = &self.breakpoints;
        if let Some(i) = b.iter().position(|&x| x == t) {
            return if left { self.values_left[i] } else { self.values[i] };
        }
        let i = b.iter().rposition(|&x| x < t).unwrap();
        let frac = (t - b[i]) / (b[i + 1] - b[i]);
        self.values[i] + frac * (self.values_left[i + 1] - self.values[i])
    }
}

/// Any normalized measure: uniform, discrete, product with atoms and flat
/// pieces, or the two-dimensional triangle-density measure.
pub fn probability_spec(rng: &mut ChaCha8Rng, d: usize) -> qmk::MeasureSpec {
    use qmk::transforms::ChelsonFixture;
    use qmk::MeasureSpec;
    match rng.gen_range(0..4) {
        0 => MeasureSpec::Uniform(d),
        1 => MeasureSpec::discrete(probability_atoms(rng, d, 8)).unwrap(),
        3 if d == 2 => ChelsonFixture.measure(),
        _ => MeasureSpec::product((0..d).map(|_| AxisModel::random(rng, false, true, true).cdf()).collect())
            .unwrap(),
    }
}
