//! Quasi-Monte Carlo estimates and Koksma–Hlawka error certificates.

use serde::Serialize;

use crate::discrepancy::{star_discrepancy_with, ExactOptions, PointSet};
use crate::error::{check_dim, Error, Result};
use crate::grid::Odometer;
use crate::measures::{MeasureSpec, SideClosure};
use crate::variation::{Anchor, GridFunction, Interpolation};

/// Slack added to the bound when checking a certificate against an observed error.
pub const CERTIFICATE_SLACK: f64 = 1e-10;

/// `(1/N) Σ f(x_n)`.
pub fn qmc_estimate<F: Fn(&[f64]) -> f64>(f: F, ps: &PointSet) -> f64 {
    ps.iter().map(f).sum::<f64>() / ps.len() as f64
}

/// [`qmc_estimate`] for a grid function.
pub fn qmc_estimate_grid(f: &GridFunction, ps: &PointSet) -> Result<f64> {
    check_dim(f.dim(), ps.dim())?;
    let mut sum = 0.0;
    for x in ps.iter() {
        sum += f.eval(x)?;
    }
    Ok(sum / ps.len() as f64)
}

/// Pieces of `[0,1]` on which a step function is constant, paired with the
/// grid index whose value it takes.
fn step_pieces(b: &[f64], interp: Interpolation) -> Vec<(f64, f64, SideClosure, usize)> {
    let m = b.len();
    let mut out = Vec::with_capacity(m);
    if interp == Interpolation::RightContinuousStep {
        for i in 0..m - 1 {
            out.push((b[i], b[i + 1], SideClosure::HALF_OPEN, i));
        }
        out.push((1.0, 1.0, SideClosure::CLOSED, m - 1));
    } else {
        out.push((0.0, 0.0, SideClosure::CLOSED, 0));
        for i in 1..m {
            out.push((b[i - 1], b[i], SideClosure::OPEN_CLOSED, i));
        }
    }
    out
}

/// `∫ f dμ`, exact for the supported combinations: any function against a
/// discrete measure, step functions against any measure, and multilinear
/// functions against the uniform measure.
pub fn integral_under_measure(f: &GridFunction, m: &MeasureSpec) -> Result<f64> {
    check_dim(f.dim(), m.dim())?;
    let d = f.dim();
    if let MeasureSpec::Discrete(nu) = m {
        let mut total = 0.0;
        for atom in nu.atoms() {
            total += atom.weight * f.eval(&atom.location)?;
        }
        return Ok(total);
    }
    match f.interpolation() {
        Interpolation::RightContinuousStep | Interpolation::LeftContinuousStep => {
            let pieces: Vec<_> = f
                .breakpoints()
                .iter()
                .map(|b| step_pieces(b, f.interpolation()))
                .collect();
            let shape: Vec<usize> = pieces.iter().map(Vec::len).collect();
            let (mut lower, mut upper) = (vec![0.0; d], vec![0.0; d]);
            let mut closure = vec![SideClosure::CLOSED; d];
            let mut idx = vec![0; d];
            let mut total = 0.0;
            let mut od = Odometer::over(&shape);
            while let Some(cell) = od.next_index() {
                for s in 0..d {
                    let (lo, hi, c, i) = pieces[s][cell[s]];
                    lower[s] = lo;
                    upper[s] = hi;
                    closure[s] = c;
                    idx[s] = i;
                }
                let v = f.at(&idx);
                if v != 0.0 {
                    total += v * m.box_measure(&lower, &upper, &closure)?;
                }
            }
            Ok(total)
        }
        Interpolation::Multilinear => {
            if !matches!(m, MeasureSpec::Uniform(_)) {
                return Err(Error::Unsupported(
                    "multilinear functions integrate exactly only against uniform or discrete measures".into(),
                ));
            }
            // trapezoid weights per axis; their tensor product is exact for multilinear cells
            let weights: Vec<Vec<f64>> = f
                .breakpoints()
                .iter()
                .map(|b| {
                    let m = b.len();
                    (0..m)
                        .map(|i| {
                            let left = if i > 0 { b[i] - b[i - 1] } else { 0.0 };
                            let right = if i + 1 < m { b[i + 1] - b[i] } else { 0.0 };
                            0.5 * (left + right)
                        })
                        .collect()
                })
                .collect();
            let mut total = 0.0;
            let mut od = Odometer::over(f.shape());
            while let Some(idx) = od.next_index() {
                let w: f64 = idx.iter().zip(&weights).map(|(&i, ws)| ws[i]).product();
                total += w * f.at(idx);
            }
            Ok(total)
        }
    }
}

/// A Koksma–Hlawka error bound for one estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhCertificate {
    pub estimate: f64,
    pub reference_integral: Option<f64>,
    pub observed_error: Option<f64>,
    pub variation: f64,
    /// False when the variation was measured on a sampled grid rather than known exactly.
    pub variation_certified: bool,
    pub discrepancy: f64,
    pub bound: f64,
    pub satisfied: Option<bool>,
}

impl KhCertificate {
    fn assemble(
        estimate: f64,
        reference_integral: Option<f64>,
        variation: f64,
        variation_certified: bool,
        discrepancy: f64,
    ) -> Self {
        let bound = variation * discrepancy;
        let observed_error = reference_integral.map(|r| (estimate - r).abs());
        KhCertificate {
            estimate,
            reference_integral,
            observed_error,
            variation,
            variation_certified,
            discrepancy,
            bound,
            satisfied: observed_error.map(|e| e <= bound + CERTIFICATE_SLACK),
        }
    }
}

/// Estimate, exact integral, Hardy–Krause variation anchored at 1 and exact
/// star-discrepancy for a grid function.
pub fn kh_certificate(f: &GridFunction, ps: &PointSet, m: &MeasureSpec) -> Result<KhCertificate> {
    kh_certificate_with(f, ps, m, &ExactOptions::default())
}

pub fn kh_certificate_with(
    f: &GridFunction,
    ps: &PointSet,
    m: &MeasureSpec,
    opts: &ExactOptions,
) -> Result<KhCertificate> {
    check_dim(f.dim(), ps.dim())?;
    check_dim(f.dim(), m.dim())?;
    let estimate = qmc_estimate_grid(f, ps)?;
    let reference = integral_under_measure(f, m)?;
    let discrepancy = star_discrepancy_with(ps, m, opts)?.value;
    Ok(KhCertificate::assemble(
        estimate,
        Some(reference),
        f.hk_variation(Anchor::One),
        true,
        discrepancy,
    ))
}

/// How the variation of `f/g` enters an importance-sampling certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum VariationInput {
    /// A known value, reported as certified.
    Supplied(f64),
    /// Sample `f/g` on this grid and take the multilinear variation; not certified.
    SampleOnGrid(Vec<Vec<f64>>),
}

fn positive_density_at(g: f64, index: usize) -> Result<f64> {
    if g > 0.0 {
        Ok(g)
    } else {
        Err(Error::NonPositiveDensity { index, value: g })
    }
}

/// Estimates `∫ f dλ` by `(1/N) Σ f(x_n)/g(x_n)`, where `ps` is meant to be
/// spread according to `m_g`, the measure with density `g`. The certificate
/// bounds the error by `V(f/g) · D*(ps; m_g)`.
pub fn importance_sampling_estimate<F, G>(
    f: F,
    g: G,
    ps: &PointSet,
    m_g: &MeasureSpec,
    variation: VariationInput,
    reference: Option<f64>,
    opts: &ExactOptions,
) -> Result<KhCertificate>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    check_dim(ps.dim(), m_g.dim())?;
    let mut sum = 0.0;
    for (n, x) in ps.iter().enumerate() {
        sum += f(x) / positive_density_at(g(x), n)?;
    }
    let estimate = sum / ps.len() as f64;
    let (v, certified) = match variation {
        VariationInput::Supplied(v) => (v, true),
        VariationInput::SampleOnGrid(bps) => {
            check_dim(ps.dim(), bps.len())?;
            let mut bad = None;
            let ratio = GridFunction::from_fn(bps, Interpolation::Multilinear, |x| {
                let gx = g(x);
                if gx <= 0.0 && bad.is_none() {
                    bad = Some(gx);
                }
                f(x) / gx
            })?;
            if let Some(value) = bad {
                return Err(Error::NonPositiveDensity { index: 0, value });
            }
            (ratio.hk_variation(Anchor::One), false)
        }
    };
    let discrepancy = star_discrepancy_with(ps, m_g, opts)?.value;
    Ok(KhCertificate::assemble(estimate, reference, v, certified, discrepancy))
}

/// Importance sampling with `f` and `g` right-continuous step functions on a
/// shared grid. The ratio is again a step function, so its variation is exact,
/// and the reference is `∫ f dλ`.
pub fn importance_sampling_grid(
    f: &GridFunction,
    g: &GridFunction,
    ps: &PointSet,
    m_g: &MeasureSpec,
) -> Result<KhCertificate> {
    if !f.same_grid(g) {
        return Err(Error::InvalidGrid("f and g must share one grid".into()));
    }
    if f.interpolation() != Interpolation::RightContinuousStep || g.interpolation() != Interpolation::RightContinuousStep {
        return Err(Error::NotStep);
    }
    let ratio_values = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(i, (&fv, &gv))| Ok(fv / positive_density_at(gv, i)?))
        .collect::<Result<Vec<_>>>()?;
    let ratio = f.with_values(ratio_values)?;
    let estimate = qmc_estimate_grid(&ratio, ps)?;
    let reference = integral_under_measure(f, &MeasureSpec::Uniform(f.dim()))?;
    let discrepancy = star_discrepancy_with(ps, m_g, &ExactOptions::default())?.value;
    Ok(KhCertificate::assemble(
        estimate,
        Some(reference),
        ratio.hk_variation(Anchor::One),
        true,
        discrepancy,
    ))
}
