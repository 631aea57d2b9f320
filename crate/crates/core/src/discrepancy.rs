//! Star-discrepancy of finite point sets with respect to normalized measures.
//!
//! The exact engine works on the critical grid spanned by the point
//! coordinates, the measure's own critical coordinates, 0 and 1. On each grid
//! cell `[g_j, g_{j+1})` (or the singleton `{1}`) the point count is constant
//! and the distribution function is monotone, so the supremum of the local
//! discrepancy over the cell is either attained at the lower corner or is the
//! left limit at the upper corner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::grid::{prefix_sum_in_place, strides, unravel, Odometer};
use crate::measures::{Limit, MeasureSpec};
use crate::variation::AxisBox;

/// `N >= 1` points in `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct PointSet {
    #[serde(rename = "d")]
    dim: usize,
    points: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawPointSet {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        PointSet::new(raw.d, raw.points)
    }
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("point set is empty".into()));
        }
        for p in &points {
            check_dim(dim, p.len())?;
            check_unit_point(p)?;
        }
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }

    /// Number of points in the anchored box `[0, a]`, with open sides where
    /// `limits` asks for a left limit.
    pub fn count_in(&self, a: &[f64], limits: &[Limit]) -> usize {
        self.points
            .iter()
            .filter(|p| {
                p.iter().zip(a).zip(limits).all(|((&x, &y), l)| {
                    if l.is_left() {
                        x < y
                    } else {
                        x <= y
                    }
                })
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    ExactGrid,
    #[serde(rename = "search")]
    RandomSearch,
}

/// Discrepancy value with the anchored box that realizes it.
///
/// When `attained` is false the value is a one-sided supremum: it is the
/// limit of the local discrepancy as the corner approaches `witness.upper`
/// from below on the axes flagged [`Limit::LeftLimit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub witness: AxisBox,
    pub limits: Vec<Limit>,
    pub attained: bool,
    pub method: Method,
}

/// Limits for the exact grid engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    pub max_dim: usize,
    pub cell_budget: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            max_dim: 4,
            cell_budget: 100_000_000,
        }
    }
}

/// `|#{x_n in [0,a]}/N − μ([0,a])|`, where each axis flagged
/// [`Limit::LeftLimit`] is taken as the open side `[0, a_s)` for both the
/// count and the measure.
pub fn local_discrepancy(a: &[f64], ps: &PointSet, m: &MeasureSpec, limits: &[Limit]) -> Result<f64> {
    check_dim(ps.dim(), m.dim())?;
    let f = m.cdf_limit(a, limits)?;
    let c = ps.count_in(a, limits) as f64 / ps.len() as f64;
    Ok((c - f).abs())
}

fn critical_grid(ps: &PointSet, m: &MeasureSpec) -> Vec<Vec<f64>> {
    (0..ps.dim())
        .map(|s| {
            let mut g: Vec<f64> = ps.points().iter().map(|p| p[s]).collect();
            g.extend(m.critical_values(s));
            g.push(0.0);
            g.push(1.0);
            g.sort_by(|a, b| a.partial_cmp(b).unwrap());
            g.dedup();
            g
        })
        .collect()
}

fn check_budget(shape: &[usize], opts: &ExactOptions) -> Result<()> {
    let cells: u128 = shape.iter().map(|&n| n as u128).product();
    if shape.len() > opts.max_dim || cells > opts.cell_budget {
        return Err(Error::BudgetExceeded {
            cells,
            dim: shape.len(),
            budget: opts.cell_budget,
            max_dim: opts.max_dim,
        });
    }
    Ok(())
}

/// Anchored sums of `weight(item)` on a grid: entry `j` holds the total weight
/// of items lying in `[0, g_j]`. Items must sit on grid coordinates.
fn anchored_sums<'a>(
    grid: &[Vec<f64>],
    items: impl Iterator<Item = (&'a [f64], f64)>,
) -> Vec<f64> {
    let shape: Vec<usize> = grid.iter().map(Vec::len).collect();
    let st = strides(&shape);
    let mut acc = vec![0.0; shape.iter().product()];
    for (x, w) in items {
        let lin: usize = x
            .iter()
            .enumerate()
            .map(|(s, v)| grid[s].partition_point(|g| g < v) * st[s])
            .sum();
        acc[lin] += w;
    }
    prefix_sum_in_place(&mut acc, &shape);
    acc
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    value: f64,
    attained: bool,
    lin: usize,
    upper: bool,
}

impl Candidate {
    /// Total order used for the max-reduction; ties prefer attained values,
    /// then lower cells, then lower corners.
    fn better_than(&self, other: &Candidate) -> bool {
        if self.value != other.value {
            return self.value > other.value;
        }
        if self.attained != other.attained {
            return self.attained;
        }
        if self.lin != other.lin {
            return self.lin < other.lin;
        }
        !self.upper && other.upper
    }

    fn max(self, other: Candidate) -> Candidate {
        if other.better_than(&self) {
            other
        } else {
            self
        }
    }
}

/// Exact star-discrepancy with default limits (`d <= 4`, `10^8` cells).
pub fn star_discrepancy(ps: &PointSet, m: &MeasureSpec) -> Result<DiscrepancyResult> {
    star_discrepancy_with(ps, m, &ExactOptions::default())
}

/// Exact star-discrepancy `sup_a |#{x_n <= a}/N − μ([0,a])|`.
///
/// Fails with [`Error::BudgetExceeded`] when the critical grid is too large;
/// [`random_search_lower_bound`] is the fallback for such instances.
pub fn star_discrepancy_with(ps: &PointSet, m: &MeasureSpec, opts: &ExactOptions) -> Result<DiscrepancyResult> {
    let d = ps.dim();
    check_dim(d, m.dim())?;
    let grid = critical_grid(ps, m);
    let shape: Vec<usize> = grid.iter().map(Vec::len).collect();
    check_budget(&shape, opts)?;

    let n = ps.len() as f64;
    let counts = anchored_sums(&grid, ps.iter().map(|p| (p, 1.0)));
    // atoms sit on the grid, so the discrete CDF is constant on every cell
    let discrete_cdf = match m {
        MeasureSpec::Discrete(nu) => Some(anchored_sums(
            &grid,
            nu.atoms().iter().map(|a| (a.location.as_slice(), a.weight)),
        )),
        _ => None,
    };
    if discrete_cdf.is_none() {
        // surface a missing left-limit before fanning out
        m.cdf_limit(&vec![1.0; d], &vec![Limit::LeftLimit; d])?;
    }

    let total: usize = shape.iter().product();
    let best = (0..total)
        .into_par_iter()
        .map_init(
            || {
                let closed = vec![Limit::AtPoint; d];
                (vec![0usize; d], vec![0.0; d], vec![0.0; d], closed.clone(), closed)
            },
            |(idx, lower, upper, limits, closed), lin| -> Result<Candidate> {
                unravel(lin, &shape, idx);
                let c = counts[lin] / n;
                let (lo, up) = match &discrete_cdf {
                    Some(cdf) => (cdf[lin], cdf[lin]),
                    None => {
                        for s in 0..d {
                            let j = idx[s];
                            lower[s] = grid[s][j];
                            if j + 1 < shape[s] {
                                upper[s] = grid[s][j + 1];
                                limits[s] = Limit::LeftLimit;
                            } else {
                                upper[s] = 1.0;
                                limits[s] = Limit::AtPoint;
                            }
                        }
                        let lo = m.cdf_limit_unchecked(lower, closed)?;
                        let up = m.cdf_limit_unchecked(upper, limits)?;
                        (lo, up)
                    }
                };
                let at_lower = Candidate {
                    value: c - lo,
                    attained: true,
                    lin,
                    upper: false,
                };
                let all_closed = idx.iter().zip(&shape).all(|(j, n)| j + 1 == *n);
                let at_upper = Candidate {
                    value: up - c,
                    attained: all_closed || lo >= up,
                    lin,
                    upper: true,
                };
                Ok(at_lower.max(at_upper))
            },
        )
        .try_reduce_with(|a, b| Ok(a.max(b)))
        .expect("grid has at least one cell")?;

    let mut idx = vec![0; d];
    unravel(best.lin, &shape, &mut idx);
    let mut corner = vec![0.0; d];
    let mut limits = vec![Limit::AtPoint; d];
    for s in 0..d {
        let j = idx[s];
        // an attained upper-corner value is also reached at the lower corner
        if best.upper && !best.attained && j + 1 < shape[s] {
            corner[s] = grid[s][j + 1];
            limits[s] = Limit::LeftLimit;
        } else if best.upper && !best.attained {
            corner[s] = 1.0;
        } else {
            corner[s] = grid[s][j];
        }
    }
    let mut attained = best.attained;
    if !attained {
        // keep a left limit only on the axes where closing the side loses value
        for s in 0..d {
            if !limits[s].is_left() {
                continue;
            }
            limits[s] = Limit::AtPoint;
            let closed_value = m.cdf_limit(&corner, &limits)? - ps.count_in(&corner, &limits) as f64 / n;
            if closed_value < best.value {
                limits[s] = Limit::LeftLimit;
            }
        }
        attained = limits.iter().all(|l| !l.is_left());
    }
    Ok(DiscrepancyResult {
        value: best.value.max(0.0),
        witness: AxisBox::anchored(corner)?,
        limits,
        attained,
        method: Method::ExactGrid,
    })
}

/// Star-discrepancy against the Lebesgue measure by direct enumeration of
/// the corners `a` built from point coordinates, 0 and 1:
/// `max(#{x <= a}/N − vol(a), vol(a) − #{x < a}/N)`.
pub fn uniform_star_discrepancy(ps: &PointSet, opts: &ExactOptions) -> Result<f64> {
    let d = ps.dim();
    let grid = critical_grid(ps, &MeasureSpec::Uniform(d));
    let shape: Vec<usize> = grid.iter().map(Vec::len).collect();
    check_budget(&shape, opts)?;
    let n = ps.len() as f64;
    let mut best: f64 = 0.0;
    let mut a = vec![0.0; d];
    let mut od = Odometer::over(&shape);
    while let Some(idx) = od.next_index() {
        for s in 0..d {
            a[s] = grid[s][idx[s]];
        }
        let vol: f64 = a.iter().product();
        let (mut closed, mut open) = (0usize, 0usize);
        for p in ps.points() {
            if p.iter().zip(&a).all(|(x, y)| x <= y) {
                closed += 1;
                if p.iter().zip(&a).all(|(x, y)| x < y) {
                    open += 1;
                }
            }
        }
        best = best
            .max(closed as f64 / n - vol)
            .max(vol - open as f64 / n);
    }
    Ok(best)
}

/// Randomized lower bound on the star-discrepancy: the best local
/// discrepancy over `trials` random corners. Each coordinate is either drawn
/// uniformly or snapped to a critical coordinate, and each axis is evaluated
/// closed or as a left limit at random. Deterministic for a given seed.
pub fn random_search_lower_bound(ps: &PointSet, m: &MeasureSpec, trials: usize, seed: u64) -> Result<DiscrepancyResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let d = ps.dim();
    check_dim(d, m.dim())?;
    let grid = critical_grid(ps, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>, Vec<Limit>)> = None;
    let mut a = vec![0.0; d];
    let mut limits = vec![Limit::AtPoint; d];
    for _ in 0..trials {
        for s in 0..d {
            a[s] = if rng.gen_bool(0.5) {
                grid[s][rng.gen_range(0..grid[s].len())]
            } else {
                rng.gen::<f64>()
            };
            limits[s] = if rng.gen_bool(0.5) {
                Limit::LeftLimit
            } else {
                Limit::AtPoint
            };
        }
        let v = local_discrepancy(&a, ps, m, &limits)?;
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, a.clone(), limits.clone()));
        }
    }
    let (value, corner, limits) = best.expect("at least one trial");
    Ok(DiscrepancyResult {
        value,
        witness: AxisBox::anchored(corner)?,
        attained: limits.iter().all(|l| !l.is_left()),
        limits,
        method: Method::RandomSearch,
    })
}
