//! Grid functions and their variation.
//!
//! A [`GridFunction`] is known through its values on the vertices of a
//! tensor grid. All variations are taken over sub-partitions of that grid.
//! Refinement never decreases a Vitali sum, so the supremum is attained on
//! the grid itself; for the step and multilinear interpretations this is the
//! variation of the function on the whole cube.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::grid::{prefix_sum_in_place, ravel, strides, unravel, Odometer};
use crate::measures::{Atom, DiscreteSignedMeasure, TOLERANCE};

/// How a grid function is extended from vertices to the whole cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    #[serde(rename = "multilinear")]
    Multilinear,
    /// Constant on `[b_i, b_{i+1})` with the value of the lower vertex; right-continuous.
    #[serde(rename = "step")]
    RightContinuousStep,
    /// Constant on `(b_i, b_{i+1}]` with the value of the upper vertex; left-continuous.
    #[serde(rename = "left_step")]
    LeftContinuousStep,
}

/// Corner of the cube at which a Hardy–Krause variation is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    One,
    Zero,
}

/// An axis-parallel box `[lower, upper]` inside the unit cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        check_unit_point(&lower)?;
        check_unit_point(&upper)?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
        }
        Ok(AxisBox { lower, upper })
    }

    /// The anchored box `[0, a]`.
    pub fn anchored(a: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; a.len()], a)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

/// A face of the cube: the coordinates in `axes` are free, all others are
/// pinned to 1 (anchor `One`) or 0 (anchor `Zero`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSelector {
    axes: Vec<usize>,
    anchor: Anchor,
}

impl FaceSelector {
    pub fn new(mut axes: Vec<usize>, anchor: Anchor) -> Result<Self> {
        axes.sort_unstable();
        axes.dedup();
        if axes.is_empty() {
            return Err(Error::InvalidArgument("face needs at least one free axis".into()));
        }
        Ok(FaceSelector { axes, anchor })
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }
}

/// A function on `[0,1]^d` given by its values on a tensor grid.
///
/// Values are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    breakpoints: Vec<Vec<f64>>,
    values: Vec<f64>,
    interp: Interpolation,
    shape: Vec<usize>,
    strides: Vec<usize>,
}

/// Jordan decomposition `f = f(0) + plus − minus`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanPair {
    pub plus: GridFunction,
    pub minus: GridFunction,
}

impl GridFunction {
    pub fn new(breakpoints: Vec<Vec<f64>>, values: Vec<f64>, interp: Interpolation) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        for (axis, b) in breakpoints.iter().enumerate() {
            if b.len() < 2 || b[0] != 0.0 || *b.last().unwrap() != 1.0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: breakpoints must start at 0 and end at 1"
                )));
            }
            if b.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: breakpoints must be strictly increasing"
                )));
            }
        }
        let shape: Vec<usize> = breakpoints.iter().map(Vec::len).collect();
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid with {} vertices",
                values.len(),
                expected
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("values must be finite".into()));
        }
        let strides = strides(&shape);
        Ok(GridFunction {
            breakpoints,
            values,
            interp,
            shape,
            strides,
        })
    }

    /// Samples `f` at every grid vertex.
    pub fn from_fn<F>(breakpoints: Vec<Vec<f64>>, interp: Interpolation, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let shape: Vec<usize> = breakpoints.iter().map(Vec::len).collect();
        let mut values = Vec::with_capacity(shape.iter().product());
        let mut point = vec![0.0; shape.len()];
        let mut od = Odometer::over(&shape);
        while let Some(idx) = od.next_index() {
            for (s, &i) in idx.iter().enumerate() {
                point[s] = breakpoints[s][i];
            }
            values.push(f(&point));
        }
        Self::new(breakpoints, values, interp)
    }

    /// Same grid and interpolation, new vertex values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.breakpoints.clone(), values, self.interp)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn breakpoints(&self) -> &[Vec<f64>] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.breakpoints == other.breakpoints
    }

    /// Value at the vertex with multi-index `idx`.
    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[ravel(idx, &self.strides)]
    }

    /// `f(0)`.
    pub fn at_origin(&self) -> f64 {
        self.values[0]
    }

    /// `f(1, …, 1)`.
    pub fn at_one(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn vertex(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(s, &i)| self.breakpoints[s][i])
            .collect()
    }

    /// Multi-index of a point that must sit exactly on grid vertices.
    pub fn vertex_index(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_dim(self.dim(), x.len())?;
        x.iter()
            .enumerate()
            .map(|(axis, &value)| {
                self.breakpoints[axis]
                    .iter()
                    .position(|&b| b == value)
                    .ok_or(Error::OffGrid { axis, value })
            })
            .collect()
    }

    /// Evaluates the function anywhere in the cube, according to its interpolation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_unit_point(x)?;
        match self.interp {
            Interpolation::RightContinuousStep | Interpolation::LeftContinuousStep => {
                let right = self.interp == Interpolation::RightContinuousStep;
                let lin = x
                    .iter()
                    .enumerate()
                    .map(|(s, &v)| {
                        let b = &self.breakpoints[s];
                        let i = if right {
                            b.partition_point(|&t| t <= v) - 1
                        } else {
                            b.partition_point(|&t| t < v)
                        };
                        i * self.strides[s]
                    })
                    .sum::<usize>();
                Ok(self.values[lin])
            }
            Interpolation::Multilinear => {
                let d = self.dim();
                let mut base = 0;
                let mut frac = vec![0.0; d];
                for (s, &v) in x.iter().enumerate() {
                    let b = &self.breakpoints[s];
                    let i = (b.partition_point(|&t| t <= v) - 1).min(b.len() - 2);
                    frac[s] = (v - b[i]) / (b[i + 1] - b[i]);
                    base += i * self.strides[s];
                }
                let mut acc = 0.0;
                for mask in 0usize..(1 << d) {
                    let mut w = 1.0;
                    let mut lin = base;
                    for (s, t) in frac.iter().enumerate() {
                        if mask >> s & 1 == 1 {
                            w *= t;
                            lin += self.strides[s];
                        } else {
                            w *= 1.0 - t;
                        }
                    }
                    if w != 0.0 {
                        acc += w * self.values[lin];
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Mixed difference over `axes` of the cell whose lower vertex has linear index `lin`.
    fn cell_difference(&self, lin: usize, axes: &[usize]) -> f64 {
        let k = axes.len();
        let mut acc = 0.0;
        for mask in 0usize..(1 << k) {
            let mut off = lin;
            for (j, &s) in axes.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    off += self.strides[s];
                }
            }
            if (k - mask.count_ones() as usize) % 2 == 0 {
                acc += self.values[off];
            } else {
                acc -= self.values[off];
            }
        }
        acc
    }

    /// Σ |Δ_axes| over the grid cells of the face spanned by `axes`, with the
    /// free coordinates running over `[lo_s, hi_s]` (vertex indices) and every
    /// other coordinate fixed to `pin`.
    fn face_vitali(&self, axes: &[usize], pin: &[usize], lo: &[usize], hi: &[usize]) -> f64 {
        let mut start = pin.to_vec();
        let mut end: Vec<usize> = pin.iter().map(|p| p + 1).collect();
        for &s in axes {
            start[s] = lo[s];
            end[s] = hi[s];
        }
        let mut od = Odometer::new(start, end);
        let mut total = 0.0;
        while let Some(idx) = od.next_index() {
            total += self.cell_difference(ravel(idx, &self.strides), axes).abs();
        }
        total
    }

    fn pin_for(&self, anchor: Anchor) -> Vec<usize> {
        match anchor {
            Anchor::One => self.shape.iter().map(|n| n - 1).collect(),
            Anchor::Zero => vec![0; self.dim()],
        }
    }

    fn full_range(&self) -> (Vec<usize>, Vec<usize>) {
        (vec![0; self.dim()], self.shape.iter().map(|n| n - 1).collect())
    }

    /// The quasi-volume `Δ^(d)(f; box)`: the alternating sum of `f` over the
    /// `2^d` corners. Corners must be grid vertices.
    pub fn quasi_volume(&self, b: &AxisBox) -> Result<f64> {
        check_dim(self.dim(), b.dim())?;
        let lo = self.vertex_index(&b.lower)?;
        let hi = self.vertex_index(&b.upper)?;
        let d = self.dim();
        let mut acc = 0.0;
        for mask in 0usize..(1 << d) {
            let idx: Vec<usize> = (0..d)
                .map(|s| if mask >> s & 1 == 1 { lo[s] } else { hi[s] })
                .collect();
            let v = self.at(&idx);
            if mask.count_ones() % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        Ok(acc)
    }

    /// Vitali variation on the whole cube, or on one face when `face` is given.
    pub fn vitali_variation(&self, face: Option<&FaceSelector>) -> f64 {
        let (lo, hi) = self.full_range();
        match face {
            None => {
                let axes: Vec<usize> = (0..self.dim()).collect();
                self.face_vitali(&axes, &lo, &lo, &hi)
            }
            Some(face) => {
                let pin = self.pin_for(face.anchor);
                self.face_vitali(&face.axes, &pin, &lo, &hi)
            }
        }
    }

    /// Full-dimensional Vitali variation on a grid-aligned box.
    pub fn vitali_variation_on(&self, b: &AxisBox) -> Result<f64> {
        check_dim(self.dim(), b.dim())?;
        let lo = self.vertex_index(&b.lower)?;
        let hi = self.vertex_index(&b.upper)?;
        let axes: Vec<usize> = (0..self.dim()).collect();
        Ok(self.face_vitali(&axes, &lo, &lo, &hi))
    }

    /// Hardy–Krause variation: the sum of Vitali variations over the `2^d − 1`
    /// faces adjacent to the anchor corner.
    pub fn hk_variation(&self, anchor: Anchor) -> f64 {
        let d = self.dim();
        let pin = self.pin_for(anchor);
        let (lo, hi) = self.full_range();
        (1usize..(1 << d))
            .map(|mask| {
                let axes: Vec<usize> = (0..d).filter(|s| mask >> s & 1 == 1).collect();
                self.face_vitali(&axes, &pin, &lo, &hi)
            })
            .sum()
    }

    /// `V_HK0(f; [0, x])` for a grid vertex `x`, zero at the origin.
    pub fn hk0_prefix(&self, x: &[f64]) -> Result<f64> {
        let hi = self.vertex_index(x)?;
        let d = self.dim();
        let zero = vec![0; d];
        Ok((1usize..(1 << d))
            .map(|mask| {
                let axes: Vec<usize> = (0..d).filter(|s| mask >> s & 1 == 1).collect();
                self.face_vitali(&axes, &zero, &zero, &hi)
            })
            .sum())
    }

    /// Mixed backward difference at a vertex over the axes where its index is
    /// positive. At the origin this is `f(0)`.
    fn backward_difference(&self, idx: &[usize]) -> f64 {
        let axes: Vec<usize> = (0..self.dim()).filter(|&s| idx[s] > 0).collect();
        let lower: usize = ravel(idx, &self.strides) - axes.iter().map(|&s| self.strides[s]).sum::<usize>();
        self.cell_difference(lower, &axes)
    }

    fn backward_differences(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut od = Odometer::over(&self.shape);
        while let Some(idx) = od.next_index() {
            out.push(self.backward_difference(idx));
        }
        out
    }

    /// `V_HK0(f; [0, x])` at every vertex, as anchored sums of absolute
    /// backward differences.
    pub fn hk0_prefix_all(&self) -> Vec<f64> {
        let mut acc: Vec<f64> = self.backward_differences().into_iter().map(f64::abs).collect();
        acc[0] = 0.0;
        prefix_sum_in_place(&mut acc, &self.shape);
        acc
    }

    /// Leonov's decomposition `f = f1 − f2` with `f1(x) = V_HK0(f; [0, x])`;
    /// both parts are completely monotone.
    pub fn leonov_decompose(&self) -> (GridFunction, GridFunction) {
        let f1 = self.hk0_prefix_all();
        let f2: Vec<f64> = f1.iter().zip(&self.values).map(|(a, b)| a - b).collect();
        (self.rebuilt(f1), self.rebuilt(f2))
    }

    /// The unique decomposition `f = f(0) + f⁺ − f⁻` into completely monotone
    /// parts vanishing at the origin with additive HK0-variation.
    pub fn jordan_decompose(&self) -> JordanPair {
        let prefix = self.hk0_prefix_all();
        let f0 = self.at_origin();
        let (plus, minus): (Vec<f64>, Vec<f64>) = prefix
            .iter()
            .zip(&self.values)
            .map(|(&v, &f)| {
                let centred = f - f0;
                ((v + centred) / 2.0, (v - centred) / 2.0)
            })
            .unzip();
        JordanPair {
            plus: self.rebuilt(plus),
            minus: self.rebuilt(minus),
        }
    }

    fn rebuilt(&self, values: Vec<f64>) -> GridFunction {
        GridFunction {
            breakpoints: self.breakpoints.clone(),
            values,
            interp: self.interp,
            shape: self.shape.clone(),
            strides: self.strides.clone(),
        }
    }

    fn scale(&self) -> f64 {
        self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    /// Checks that every quasi-volume of every dimension is non-negative,
    /// over all faces and pin positions. Exponential in the dimension:
    /// `O(3^d · Π m_s)` cell differences.
    pub fn is_completely_monotone(&self) -> bool {
        let d = self.dim();
        let tol = -TOLERANCE * self.scale();
        for mask in 1usize..(1 << d) {
            let axes: Vec<usize> = (0..d).filter(|s| mask >> s & 1 == 1).collect();
            let mut hi = self.shape.clone();
            for &s in &axes {
                hi[s] -= 1;
            }
            let mut od = Odometer::new(vec![0; d], hi);
            while let Some(idx) = od.next_index() {
                if self.cell_difference(ravel(idx, &self.strides), &axes) < tol {
                    return false;
                }
            }
        }
        true
    }

    /// `g(x) = f(1 − x)`. Breakpoints are reflected and a right-continuous
    /// step turns into a left-continuous one (and back).
    pub fn mirror(&self) -> GridFunction {
        let breakpoints: Vec<Vec<f64>> = self
            .breakpoints
            .iter()
            .map(|b| b.iter().rev().map(|x| 1.0 - x).collect())
            .collect();
        let mut values = Vec::with_capacity(self.values.len());
        let mut reflected = vec![0; self.dim()];
        let mut od = Odometer::over(&self.shape);
        while let Some(idx) = od.next_index() {
            for s in 0..idx.len() {
                reflected[s] = self.shape[s] - 1 - idx[s];
            }
            values.push(self.at(&reflected));
        }
        let interp = match self.interp {
            Interpolation::Multilinear => Interpolation::Multilinear,
            Interpolation::RightContinuousStep => Interpolation::LeftContinuousStep,
            Interpolation::LeftContinuousStep => Interpolation::RightContinuousStep,
        };
        let shape = self.shape.clone();
        GridFunction {
            breakpoints,
            values,
            interp,
            strides: strides(&shape),
            shape,
        }
    }

    /// The signed measure `ν` with `ν([0, x]) = f(x)`. Atoms sit on grid
    /// vertices; the weight at a vertex is the mixed backward difference of `f`
    /// there, with `f(0)` carried by an atom at the origin. Weights that are
    /// round-off (below `1e-12 · max(1, max|f|)`) are dropped.
    pub fn to_measure(&self) -> Result<DiscreteSignedMeasure> {
        if self.interp != Interpolation::RightContinuousStep {
            return Err(Error::NotStep);
        }
        let eps = TOLERANCE * self.scale();
        let weights = self.backward_differences();
        let mut idx = vec![0; self.dim()];
        let atoms = weights
            .into_iter()
            .enumerate()
            .filter(|(_, w)| w.abs() > eps)
            .map(|(lin, w)| {
                unravel(lin, &self.shape, &mut idx);
                Atom::new(self.vertex(&idx), w)
            });
        DiscreteSignedMeasure::new(self.dim(), atoms)
    }

    /// The right-continuous step function `f(x) = ν([0, x])`, on the grid of
    /// atom coordinates together with 0 and 1.
    pub fn from_measure(nu: &DiscreteSignedMeasure) -> GridFunction {
        let d = nu.dim();
        let breakpoints: Vec<Vec<f64>> = (0..d)
            .map(|s| {
                let mut b: Vec<f64> = nu.atoms().iter().map(|a| a.location[s]).collect();
                b.push(0.0);
                b.push(1.0);
                b.sort_by(|x, y| x.partial_cmp(y).unwrap());
                b.dedup();
                b
            })
            .collect();
        let shape: Vec<usize> = breakpoints.iter().map(Vec::len).collect();
        let strides = strides(&shape);
        let mut values = vec![0.0; shape.iter().product()];
        for atom in nu.atoms() {
            let lin: usize = atom
                .location
                .iter()
                .enumerate()
                .map(|(s, x)| {
                    breakpoints[s].iter().position(|b| b == x).unwrap() * strides[s]
                })
                .sum();
            values[lin] += atom.weight;
        }
        prefix_sum_in_place(&mut values, &shape);
        GridFunction {
            breakpoints,
            values,
            interp: Interpolation::RightContinuousStep,
            shape,
            strides,
        }
    }
}

impl std::ops::Add for &GridFunction {
    type Output = Result<GridFunction>;

    fn add(self, rhs: &GridFunction) -> Result<GridFunction> {
        if !self.same_grid(rhs) {
            return Err(Error::InvalidGrid("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect();
        Ok(self.rebuilt(values))
    }
}
