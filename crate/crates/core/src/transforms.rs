//! Inverse-CDF transforms of point sets.
//!
//! For product measures the coordinatewise pseudo-inverse never increases the
//! star-discrepancy and preserves it when every axis CDF is invertible. The
//! sequential two-dimensional transform through conditional CDFs does not
//! have that property in general; [`chelson_identity_check`] measures both
//! sides of the would-be identity, and [`ChelsonFixture`] is a measure on
//! which it fails.

use serde::Serialize;

use crate::discrepancy::{star_discrepancy_with, DiscrepancyResult, ExactOptions, PointSet};
use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::measures::{AnalyticCdf, AxisCdf, MeasureSpec};

/// `min { x in [0,1] : g(x) >= y }` for a nondecreasing `g` with `g(1) = 1`,
/// by bisection down to adjacent floating-point numbers.
pub fn pseudo_inverse_fn<G: Fn(f64) -> f64>(g: G, y: f64) -> f64 {
    if g(0.0) >= y {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Coordinatewise pseudo-inverse `x ↦ (G_1⁻(x_1), …, G_d⁻(x_d))` for a product
/// measure. The uniform measure maps every point to itself.
pub fn product_transform(ps: &PointSet, m: &MeasureSpec) -> Result<PointSet> {
    check_dim(ps.dim(), m.dim())?;
    let axes = match m {
        MeasureSpec::Product(axes) => axes,
        MeasureSpec::Uniform(_) => return Ok(ps.clone()),
        _ => return Err(Error::Unsupported("product transform needs a product measure".into())),
    };
    let points = ps
        .iter()
        .map(|p| p.iter().zip(axes).map(|(&x, g)| g.pseudo_inverse(x)).collect())
        .collect();
    PointSet::new(ps.dim(), points)
}

/// `y ↦ (G_1(y_1), …, G_d(y_d))` for a product measure.
pub fn tilde_g_product(y: &[f64], axes: &[AxisCdf]) -> Result<Vec<f64>> {
    check_dim(axes.len(), y.len())?;
    check_unit_point(y)?;
    Ok(y.iter().zip(axes).map(|(&v, g)| g.eval(v)).collect())
}

/// A two-dimensional distribution given by the marginal CDF of the first
/// coordinate and the conditional CDF of the second given the first.
pub trait ConditionalCdf2D: Send + Sync {
    /// `G_1(y_1)`
    fn marginal(&self, y1: f64) -> f64;

    /// `G_2(y_2 | y_1)`
    fn conditional(&self, y2: f64, y1: f64) -> f64;

    /// True when the density is strictly positive, so both CDFs are invertible.
    fn positive_density(&self) -> bool;

    fn marginal_inverse(&self, x1: f64) -> f64 {
        pseudo_inverse_fn(|t| self.marginal(t), x1)
    }

    fn conditional_inverse(&self, x2: f64, y1: f64) -> f64 {
        pseudo_inverse_fn(|t| self.conditional(t, y1), x2)
    }
}

/// Density `1/2` on `{y_1 <= y_2}` and `3/2` on `{y_1 > y_2}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChelsonFixture;

impl ChelsonFixture {
    pub fn density(&self, y: &[f64]) -> f64 {
        if y[0] <= y[1] {
            0.5
        } else {
            1.5
        }
    }

    /// `μ([0, a])`: `a_1²/2 + a_1 a_2/2` for `a_1 <= a_2`, else `3 a_1 a_2/2 − a_2²/2`.
    pub fn cdf(a: &[f64]) -> f64 {
        let (a1, a2) = (a[0], a[1]);
        if a1 <= a2 {
            0.5 * a1 * a1 + 0.5 * a1 * a2
        } else {
            1.5 * a1 * a2 - 0.5 * a2 * a2
        }
    }

    pub fn measure(&self) -> MeasureSpec {
        MeasureSpec::Analytic(AnalyticCdf::continuous("chelson", 2, ChelsonFixture::cdf))
    }
}

impl ConditionalCdf2D for ChelsonFixture {
    fn marginal(&self, y1: f64) -> f64 {
        0.5 * (y1 * y1 + y1)
    }

    fn conditional(&self, y2: f64, y1: f64) -> f64 {
        if y1 <= y2 {
            (y2 + 2.0 * y1) / (1.0 + 2.0 * y1)
        } else {
            3.0 * y2 / (1.0 + 2.0 * y1)
        }
    }

    fn positive_density(&self) -> bool {
        true
    }

    fn marginal_inverse(&self, x1: f64) -> f64 {
        0.5 * ((1.0 + 8.0 * x1).sqrt() - 1.0)
    }

    fn conditional_inverse(&self, x2: f64, y1: f64) -> f64 {
        let scale = 1.0 + 2.0 * y1;
        if x2 * scale <= 3.0 * y1 {
            x2 * scale / 3.0
        } else {
            x2 * scale - 2.0 * y1
        }
    }
}

/// A product distribution seen as a conditional one: the second CDF ignores `y_1`.
#[derive(Clone, Debug)]
pub struct ProductCdf2D {
    first: AxisCdf,
    second: AxisCdf,
}

impl ProductCdf2D {
    pub fn new(first: AxisCdf, second: AxisCdf) -> Self {
        ProductCdf2D { first, second }
    }

    pub fn uniform() -> Self {
        Self::new(AxisCdf::identity(), AxisCdf::identity())
    }

    pub fn measure(&self) -> MeasureSpec {
        MeasureSpec::Product(vec![self.first.clone(), self.second.clone()])
    }
}

impl ConditionalCdf2D for ProductCdf2D {
    fn marginal(&self, y1: f64) -> f64 {
        self.first.eval(y1)
    }

    fn conditional(&self, y2: f64, _y1: f64) -> f64 {
        self.second.eval(y2)
    }

    fn positive_density(&self) -> bool {
        self.first.is_invertible() && self.second.is_invertible()
    }

    fn marginal_inverse(&self, x1: f64) -> f64 {
        self.first.pseudo_inverse(x1)
    }

    fn conditional_inverse(&self, x2: f64, _y1: f64) -> f64 {
        self.second.pseudo_inverse(x2)
    }
}

/// Sequential transform `z_1 = G_1⁻¹(x_1)`, `z_2 = G_2⁻¹(x_2 | z_1)`.
///
/// Without the positive-density flag the conditional inverse must reproduce
/// `x_2`, otherwise the conditional CDF jumps over `x_2` at `z_1`.
pub fn conditional_transform_2d(x: &[f64], cdf: &dyn ConditionalCdf2D) -> Result<[f64; 2]> {
    check_dim(2, x.len())?;
    check_unit_point(x)?;
    let z1 = cdf.marginal_inverse(x[0]);
    let z2 = cdf.conditional_inverse(x[1], z1);
    if !cdf.positive_density() && (cdf.conditional(z2, z1) - x[1]).abs() > 1e-12 {
        return Err(Error::NotInvertible(z1));
    }
    Ok([z1, z2])
}

/// `y ↦ (G_1(y_1), G_2(y_2 | y_1))`.
pub fn tilde_g_map(y: &[f64], cdf: &dyn ConditionalCdf2D) -> Result<[f64; 2]> {
    check_dim(2, y.len())?;
    check_unit_point(y)?;
    Ok([cdf.marginal(y[0]), cdf.conditional(y[1], y[0])])
}

/// Both sides of the would-be identities for one anchored box `[0, a]`.
#[derive(Clone, Debug, Serialize)]
pub struct BoxProbe {
    pub a: Vec<f64>,
    pub tilde_a: Vec<f64>,
    /// `Σ 1[z_n <= a]`
    pub transformed_in_box: usize,
    /// `Σ 1[x_n <= G̃(a)]`
    pub original_in_tilde_box: usize,
    /// `μ([0, a])`
    pub measure_of_box: f64,
    /// `λ([0, G̃(a)])`
    pub lebesgue_of_tilde_box: f64,
    pub counts_agree: bool,
    pub measures_agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChelsonReport {
    pub images: Vec<[f64; 2]>,
    /// Star-discrepancy of the images with respect to the target measure.
    pub transformed: DiscrepancyResult,
    /// Star-discrepancy of the original points with respect to Lebesgue measure.
    pub uniform: DiscrepancyResult,
    pub difference: f64,
    pub identity_holds: bool,
    pub probe: BoxProbe,
}

/// Tolerance under which the two discrepancies count as equal.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Transforms `ps` through `cdf`, then compares the discrepancy of the images
/// under `m` with the uniform discrepancy of `ps`, and probes the box `[0, a]`.
pub fn chelson_identity_check(
    ps: &PointSet,
    cdf: &dyn ConditionalCdf2D,
    m: &MeasureSpec,
    a: &[f64],
) -> Result<ChelsonReport> {
    check_dim(2, ps.dim())?;
    check_dim(2, m.dim())?;
    let images = ps
        .iter()
        .map(|x| conditional_transform_2d(x, cdf))
        .collect::<Result<Vec<_>>>()?;
    let image_set = PointSet::new(2, images.iter().map(|z| z.to_vec()).collect())?;
    let opts = ExactOptions::default();
    let transformed = star_discrepancy_with(&image_set, m, &opts)?;
    let uniform = star_discrepancy_with(ps, &MeasureSpec::Uniform(2), &opts)?;
    let difference = transformed.value - uniform.value;

    let tilde_a = tilde_g_map(a, cdf)?;
    let transformed_in_box = images.iter().filter(|z| z[0] <= a[0] && z[1] <= a[1]).count();
    let original_in_tilde_box = ps
        .iter()
        .filter(|x| x[0] <= tilde_a[0] && x[1] <= tilde_a[1])
        .count();
    let measure_of_box = m.cdf_eval(a)?;
    let lebesgue_of_tilde_box = tilde_a[0] * tilde_a[1];
    let probe = BoxProbe {
        a: a.to_vec(),
        tilde_a: tilde_a.to_vec(),
        transformed_in_box,
        original_in_tilde_box,
        measure_of_box,
        lebesgue_of_tilde_box,
        counts_agree: transformed_in_box == original_in_tilde_box,
        measures_agree: (measure_of_box - lebesgue_of_tilde_box).abs() <= IDENTITY_TOLERANCE,
    };
    Ok(ChelsonReport {
        images,
        identity_holds: difference.abs() <= IDENTITY_TOLERANCE,
        transformed,
        uniform,
        difference,
        probe,
    })
}

/// A sample on the boundary of `G̃([0, a])` (set `"image"`) or of the box
/// `[0, G̃(a)]` (set `"box"`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub set: &'static str,
    pub x1: f64,
    pub x2: f64,
}

/// Samples the upper and right edges of the image set `{G̃(y) : y in [0, a]}`
/// (which is not a box in general) together with the corners of `[0, G̃(a)]`.
pub fn image_boundary(cdf: &dyn ConditionalCdf2D, a: &[f64], samples: usize) -> Result<Vec<BoundaryPoint>> {
    check_dim(2, a.len())?;
    check_unit_point(a)?;
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(2 * samples + 4);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let y1 = t * a[0];
        out.push(BoundaryPoint {
            set: "image",
            x1: cdf.marginal(y1),
            x2: cdf.conditional(a[1], y1),
        });
    }
    for i in (0..samples).rev() {
        let t = i as f64 / (samples - 1) as f64;
        let y2 = t * a[1];
        out.push(BoundaryPoint {
            set: "image",
            x1: cdf.marginal(a[0]),
            x2: cdf.conditional(y2, a[0]),
        });
    }
    let ga = tilde_g_map(a, cdf)?;
    for (x1, x2) in [(0.0, ga[1]), (ga[0], ga[1]), (ga[0], 0.0), (0.0, 0.0)] {
        out.push(BoundaryPoint { set: "box", x1, x2 });
    }
    Ok(out)
}
