//! Normalized and signed measures on the unit cube.
//!
//! Every measure here is described through its anchored distribution function
//! `F(a) = μ([0, a])`. Open box sides are handled with one-sided limits
//! `F(.., a_s^-, ..)`, selected per axis by [`Limit`].

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_unit_point, Error, Result};

/// Absolute comparison tolerance used throughout the crate.
pub const TOLERANCE: f64 = 1e-12;

/// How a coordinate of an anchored box corner is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    /// The closed side `x_s <= a_s`.
    AtPoint,
    /// The left limit `a_s^-`, i.e. the open side `x_s < a_s`.
    LeftLimit,
}

impl Limit {
    pub fn is_left(self) -> bool {
        matches!(self, Limit::LeftLimit)
    }
}

/// Open/closed flags for the two sides of one axis of a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideClosure {
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl SideClosure {
    pub const CLOSED: SideClosure = SideClosure {
        lower_closed: true,
        upper_closed: true,
    };
    /// `[l, u)`
    pub const HALF_OPEN: SideClosure = SideClosure {
        lower_closed: true,
        upper_closed: false,
    };
    /// `(l, u]`
    pub const OPEN_CLOSED: SideClosure = SideClosure {
        lower_closed: false,
        upper_closed: true,
    };
}

/// A weighted point mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "x")]
    pub location: Vec<f64>,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl Atom {
    pub fn new(location: Vec<f64>, weight: f64) -> Self {
        Atom { location, weight }
    }
}

fn cmp_location(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// A finite signed measure made of point masses.
///
/// Atoms sharing a location are merged on construction and zero weights are
/// dropped, so the atom list is canonical (sorted lexicographically by
/// location).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSignedMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteSignedMeasure {
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        let mut raw = Vec::new();
        for mut atom in atoms {
            check_dim(dim, atom.location.len())?;
            check_unit_point(&atom.location)?;
            if !atom.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom weight {} is not finite",
                    atom.weight
                )));
            }
            // -0.0 and 0.0 must merge
            for x in atom.location.iter_mut() {
                *x += 0.0;
            }
            raw.push(atom);
        }
        raw.sort_by(|a, b| cmp_location(&a.location, &b.location));
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for atom in raw {
            match atoms.last_mut() {
                Some(last) if last.location == atom.location => last.weight += atom.weight,
                _ => atoms.push(atom),
            }
        }
        atoms.retain(|a| a.weight != 0.0);
        Ok(DiscreteSignedMeasure { dim, atoms })
    }

    pub fn empty(dim: usize) -> Self {
        DiscreteSignedMeasure {
            dim,
            atoms: Vec::new(),
        }
    }

    /// A single point mass.
    pub fn dirac(location: Vec<f64>, weight: f64) -> Result<Self> {
        let dim = location.len();
        Self::new(dim, [Atom::new(location, weight)])
    }

    /// Empirical measure of a list of points: weight `1/N` on each point.
    pub fn empirical(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::new(dim, points.iter().map(|p| Atom::new(p.clone(), w)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Signed total mass `ν([0,1]^d)`.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `|ν|([0,1]^d)`, the sum of absolute atom weights.
    pub fn total_variation(&self) -> f64 {
        // summed per sign so the result equals mass(ν⁺) + mass(ν⁻) bit for bit
        let pos: f64 = self.atoms.iter().filter(|a| a.weight > 0.0).map(|a| a.weight).sum();
        let neg: f64 = self.atoms.iter().filter(|a| a.weight < 0.0).map(|a| -a.weight).sum();
        pos + neg
    }

    /// Splits `ν = ν⁺ − ν⁻` into mutually singular non-negative parts.
    pub fn jordan_decompose(&self) -> (DiscreteSignedMeasure, DiscreteSignedMeasure) {
        let part = |sign: f64| DiscreteSignedMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .filter(|a| a.weight * sign > 0.0)
                .map(|a| Atom::new(a.location.clone(), a.weight.abs()))
                .collect(),
        };
        (part(1.0), part(-1.0))
    }

    /// Drops atoms whose absolute weight does not exceed `eps`.
    pub fn pruned(mut self, eps: f64) -> Self {
        self.atoms.retain(|a| a.weight.abs() > eps);
        self
    }

    /// `ν([0, a])`, with the closed side on every axis.
    pub fn cdf(&self, a: &[f64]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        Ok(self.cdf_unchecked(a, None))
    }

    /// `ν` of the anchored box with per-axis closed or open upper sides.
    pub fn cdf_limit(&self, a: &[f64], limits: &[Limit]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, limits.len())?;
        Ok(self.cdf_unchecked(a, Some(limits)))
    }

    fn cdf_unchecked(&self, a: &[f64], limits: Option<&[Limit]>) -> f64 {
        self.atoms
            .iter()
            .filter(|atom| {
                atom.location.iter().enumerate().all(|(s, &x)| match limits {
                    Some(l) if l[s].is_left() => x < a[s],
                    _ => x <= a[s],
                })
            })
            .map(|atom| atom.weight)
            .sum()
    }
}

/// A one-dimensional distribution function on `[0, 1]`.
///
/// Between consecutive breakpoints the function is linear, running from the
/// right value `values[i]` at `breakpoints[i]` to the left limit
/// `values_left[i + 1]` at `breakpoints[i + 1]`. A jump at a breakpoint is an
/// atom of mass `values[i] - values_left[i]`. The left limit at 0 is always 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisCdf {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    values_left: Vec<f64>,
}

impl AxisCdf {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, values_left: Option<Vec<f64>>) -> Result<Self> {
        let n = breakpoints.len();
        if n < 2 {
            return Err(Error::InvalidCdf("need at least the breakpoints 0 and 1".into()));
        }
        if values.len() != n {
            return Err(Error::InvalidCdf(format!(
                "{} values for {} breakpoints",
                values.len(),
                n
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints[n - 1] != 1.0 {
            return Err(Error::InvalidCdf("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidCdf("breakpoints must be strictly increasing".into()));
        }
        let mut values_left = match values_left {
            Some(v) if v.len() != n => {
                return Err(Error::InvalidCdf(format!(
                    "{} left values for {} breakpoints",
                    v.len(),
                    n
                )))
            }
            Some(v) => {
                if v[0] != 0.0 {
                    return Err(Error::InvalidCdf("left limit at 0 must be 0".into()));
                }
                v
            }
            None => values.clone(),
        };
        values_left[0] = 0.0;
        for i in 0..n {
            let (l, r) = (values_left[i], values[i]);
            if !(l.is_finite() && r.is_finite()) || l < 0.0 || r > 1.0 + TOLERANCE || l > r {
                return Err(Error::InvalidCdf(format!(
                    "values at breakpoint {} are not monotone within [0, 1]",
                    breakpoints[i]
                )));
            }
            if i + 1 < n && values_left[i + 1] < r {
                return Err(Error::InvalidCdf(format!(
                    "decreasing segment after breakpoint {}",
                    breakpoints[i]
                )));
            }
        }
        if (values[n - 1] - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidCdf(format!(
                "value at 1 is {}, expected 1",
                values[n - 1]
            )));
        }
        Ok(AxisCdf {
            breakpoints,
            values,
            values_left,
        })
    }

    /// `G(x) = x`.
    pub fn identity() -> Self {
        AxisCdf {
            breakpoints: vec![0.0, 1.0],
            values: vec![0.0, 1.0],
            values_left: vec![0.0, 1.0],
        }
    }

    /// Distribution function of a piecewise-constant density. `densities[i]`
    /// applies on `[breakpoints[i], breakpoints[i + 1])` and the result is
    /// normalized to total mass 1.
    pub fn from_step_density(breakpoints: Vec<f64>, densities: &[f64]) -> Result<Self> {
        if densities.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidCdf("need one density per segment".into()));
        }
        if densities.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidCdf("densities must be finite and non-negative".into()));
        }
        let mut values = vec![0.0];
        let mut acc = 0.0;
        for (i, g) in densities.iter().enumerate() {
            acc += g * (breakpoints[i + 1] - breakpoints[i]);
            values.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidCdf("density integrates to zero".into()));
        }
        for v in values.iter_mut() {
            *v /= acc;
        }
        *values.last_mut().unwrap() = 1.0;
        Self::new(breakpoints, values, None)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_left(&self) -> &[f64] {
        &self.values_left
    }

    /// Index of the last breakpoint `<= x`.
    fn segment(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x).saturating_sub(1)
    }

    fn interior(&self, i: usize, x: f64) -> f64 {
        let (b0, b1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (v0, v1) = (self.values[i], self.values_left[i + 1]);
        v0 + (v1 - v0) * (x - b0) / (b1 - b0)
    }

    /// `G(x)`, right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 1.0;
        }
        if x < 0.0 {
            return 0.0;
        }
        let i = self.segment(x);
        if self.breakpoints[i] == x {
            self.values[i]
        } else {
            self.interior(i, x)
        }
    }

    /// `G(x^-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x > 1.0 {
            return 1.0;
        }
        let i = self.segment(x);
        if self.breakpoints[i] == x {
            self.values_left[i]
        } else {
            self.interior(i, x)
        }
    }

    pub fn eval_limit(&self, x: f64, limit: Limit) -> f64 {
        match limit {
            Limit::AtPoint => self.eval(x),
            Limit::LeftLimit => self.eval_left(x),
        }
    }

    /// `min { x in [0,1] : G(x) >= y }`, computed exactly from the breakpoint data.
    pub fn pseudo_inverse(&self, y: f64) -> f64 {
        let n = self.breakpoints.len();
        for i in 0..n {
            if self.values[i] >= y {
                // reached at the breakpoint itself, or inside the preceding segment
                if i > 0 && self.values_left[i] >= y && self.values[i - 1] < y {
                    return self.invert_segment(i - 1, y);
                }
                return self.breakpoints[i];
            }
        }
        1.0
    }

    fn invert_segment(&self, i: usize, y: f64) -> f64 {
        let (b0, b1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (v0, v1) = (self.values[i], self.values_left[i + 1]);
        let x = b0 + (y - v0) / (v1 - v0) * (b1 - b0);
        x.clamp(b0, b1)
    }

    /// True when `G` is a continuous bijection of `[0, 1]`.
    pub fn is_invertible(&self) -> bool {
        self.values[0] == 0.0
            && self.values.iter().zip(&self.values_left).all(|(r, l)| r == l)
            && self
                .values
                .windows(2)
                .all(|w| w[1] > w[0])
    }

    pub fn has_atoms(&self) -> bool {
        self.values.iter().zip(&self.values_left).any(|(r, l)| r > l)
    }
}

type CdfFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type CdfLimitFn = dyn Fn(&[f64], &[Limit]) -> f64 + Send + Sync;

/// A measure given by a closed-form anchored distribution function.
#[derive(Clone)]
pub struct AnalyticCdf {
    name: String,
    dim: usize,
    cdf: Arc<CdfFn>,
    left: Option<Arc<CdfLimitFn>>,
    continuous: bool,
}

impl AnalyticCdf {
    /// A continuous distribution function: left limits equal point values.
    pub fn continuous<F>(name: impl Into<String>, dim: usize, cdf: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        AnalyticCdf {
            name: name.into(),
            dim,
            cdf: Arc::new(cdf),
            left: None,
            continuous: true,
        }
    }

    /// A distribution function that may jump. Without `left`, open box sides
    /// cannot be evaluated.
    pub fn with_jumps<F, L>(name: impl Into<String>, dim: usize, cdf: F, left: Option<L>) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        L: Fn(&[f64], &[Limit]) -> f64 + Send + Sync + 'static,
    {
        AnalyticCdf {
            name: name.into(),
            dim,
            cdf: Arc::new(cdf),
            left: left.map(|l| Arc::new(l) as Arc<CdfLimitFn>),
            continuous: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    fn eval_limit(&self, a: &[f64], limits: &[Limit]) -> Result<f64> {
        if self.continuous || limits.iter().all(|l| !l.is_left()) {
            return Ok((self.cdf)(a));
        }
        match &self.left {
            Some(left) => Ok(left(a, limits)),
            None => Err(Error::MissingLeftLimit),
        }
    }
}

impl fmt::Debug for AnalyticCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCdf")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("continuous", &self.continuous)
            .finish()
    }
}

/// A normalized Borel measure on `[0,1]^d`.
#[derive(Clone, Debug)]
pub enum MeasureSpec {
    /// Lebesgue measure.
    Uniform(usize),
    /// Non-negative point masses of total mass 1.
    Discrete(DiscreteSignedMeasure),
    /// Product of one-dimensional distributions, one per axis.
    Product(Vec<AxisCdf>),
    Analytic(AnalyticCdf),
}

impl MeasureSpec {
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        Ok(MeasureSpec::Uniform(dim))
    }

    /// Wraps a discrete measure after checking that it is a probability measure.
    pub fn discrete(nu: DiscreteSignedMeasure) -> Result<Self> {
        if nu.atoms().iter().any(|a| a.weight < 0.0) {
            return Err(Error::InvalidMeasure("discrete measure has negative atoms".into()));
        }
        if (nu.mass() - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "discrete measure has mass {}, expected 1",
                nu.mass()
            )));
        }
        Ok(MeasureSpec::Discrete(nu))
    }

    pub fn product(axes: Vec<AxisCdf>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidMeasure("product needs at least one axis".into()));
        }
        Ok(MeasureSpec::Product(axes))
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Uniform(d) => *d,
            MeasureSpec::Discrete(nu) => nu.dim(),
            MeasureSpec::Product(axes) => axes.len(),
            MeasureSpec::Analytic(a) => a.dim(),
        }
    }

    /// True when every left limit equals the point value.
    pub fn is_continuous(&self) -> bool {
        match self {
            MeasureSpec::Uniform(_) => true,
            MeasureSpec::Discrete(nu) => nu.is_empty(),
            MeasureSpec::Product(axes) => axes.iter().all(|a| !a.has_atoms()),
            MeasureSpec::Analytic(a) => a.is_continuous(),
        }
    }

    /// `μ([0, a])`.
    pub fn cdf_eval(&self, a: &[f64]) -> Result<f64> {
        check_dim(self.dim(), a.len())?;
        check_unit_point(a)?;
        Ok(match self {
            MeasureSpec::Uniform(_) => a.iter().product(),
            MeasureSpec::Discrete(nu) => nu.cdf_unchecked(a, None),
            MeasureSpec::Product(axes) => axes.iter().zip(a).map(|(g, &x)| g.eval(x)).product(),
            MeasureSpec::Analytic(an) => (an.cdf)(a),
        })
    }

    /// `μ` of the anchored box whose side on axis `s` is `[0, a_s]` or
    /// `[0, a_s)` according to `limits[s]`.
    pub fn cdf_limit(&self, a: &[f64], limits: &[Limit]) -> Result<f64> {
        check_dim(self.dim(), a.len())?;
        check_dim(self.dim(), limits.len())?;
        check_unit_point(a)?;
        self.cdf_limit_unchecked(a, limits)
    }

    pub(crate) fn cdf_limit_unchecked(&self, a: &[f64], limits: &[Limit]) -> Result<f64> {
        Ok(match self {
            MeasureSpec::Uniform(_) => a
                .iter()
                .zip(limits)
                .map(|(&x, l)| if l.is_left() && x <= 0.0 { 0.0 } else { x })
                .product(),
            MeasureSpec::Discrete(nu) => nu.cdf_unchecked(a, Some(limits)),
            MeasureSpec::Product(axes) => axes
                .iter()
                .zip(a)
                .zip(limits)
                .map(|((g, &x), &l)| g.eval_limit(x, l))
                .product(),
            MeasureSpec::Analytic(an) => {
                if a.iter().zip(limits).any(|(&x, l)| l.is_left() && x <= 0.0) {
                    0.0
                } else {
                    an.eval_limit(a, limits)?
                }
            }
        })
    }

    /// `μ` of an axis-parallel box with the given per-axis side closures,
    /// by inclusion–exclusion over anchored boxes.
    pub fn box_measure(&self, lower: &[f64], upper: &[f64], closure: &[SideClosure]) -> Result<f64> {
        let d = self.dim();
        check_dim(d, lower.len())?;
        check_dim(d, upper.len())?;
        check_dim(d, closure.len())?;
        check_unit_point(lower)?;
        check_unit_point(upper)?;
        if lower.iter().zip(upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
        }
        let mut corner = vec![0.0; d];
        let mut limits = vec![Limit::AtPoint; d];
        let mut total = 0.0;
        for mask in 0u32..(1 << d) {
            let mut sign = 1.0;
            for s in 0..d {
                if mask >> s & 1 == 1 {
                    // lower term: subtract [0, l) for a closed side, [0, l] for an open one
                    sign = -sign;
                    corner[s] = lower[s];
                    limits[s] = if closure[s].lower_closed {
                        Limit::LeftLimit
                    } else {
                        Limit::AtPoint
                    };
                } else {
                    corner[s] = upper[s];
                    limits[s] = if closure[s].upper_closed {
                        Limit::AtPoint
                    } else {
                        Limit::LeftLimit
                    };
                }
            }
            total += sign * self.cdf_limit_unchecked(&corner, &limits)?;
        }
        Ok(total)
    }

    /// Coordinates on `axis` where the distribution function may jump or
    /// change slope (atom coordinates, CDF breakpoints).
    pub fn critical_values(&self, axis: usize) -> Vec<f64> {
        match self {
            MeasureSpec::Uniform(_) | MeasureSpec::Analytic(_) => Vec::new(),
            MeasureSpec::Discrete(nu) => nu.atoms().iter().map(|a| a.location[axis]).collect(),
            MeasureSpec::Product(axes) => axes[axis].breakpoints().to_vec(),
        }
    }
}
