//! JSON documents for measures and grid functions.
//!
//! Measures are tagged by `"type"`: `{"type":"uniform","d":2}`,
//! `{"type":"discrete","atoms":[{"x":[0.5,0.5],"w":1.0}]}`,
//! `{"type":"product","axes":[{"breakpoints":[..],"values":[..],"values_left":[..]}]}`
//! and `{"type":"chelson"}`. Grid functions are
//! `{"breakpoints":[[..],[..]],"values":[..],"interp":"step"}` with values in
//! row-major order. Point sets deserialize directly into [`PointSet`](crate::PointSet).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Atom, AxisCdf, DiscreteSignedMeasure, MeasureSpec};
use crate::transforms::ChelsonFixture;
use crate::variation::{GridFunction, Interpolation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisDoc {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_left: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Uniform,
    Discrete,
    Product,
    Chelson,
}

/// A measure document. Kept flat rather than as a tagged enum so that parse
/// errors carry line and column positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    #[serde(rename = "type")]
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisDoc>>,
}

fn field<T>(value: Option<T>, kind: &str, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidMeasure(format!("{kind} measure needs the field `{name}`")))
}

impl MeasureDoc {
    pub fn into_spec(self) -> Result<MeasureSpec> {
        let extra = |name: &str, present: bool| {
            if present {
                Err(Error::InvalidMeasure(format!("field `{name}` does not apply to this measure type")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            MeasureKind::Uniform => {
                extra("atoms", self.atoms.is_some())?;
                extra("axes", self.axes.is_some())?;
                MeasureSpec::uniform(field(self.d, "uniform", "d")?)
            }
            MeasureKind::Discrete => {
                extra("axes", self.axes.is_some())?;
                let atoms = field(self.atoms, "discrete", "atoms")?;
                let d = atoms
                    .first()
                    .map(|a| a.location.len())
                    .ok_or_else(|| Error::InvalidMeasure("discrete measure has no atoms".into()))?;
                if let Some(given) = self.d {
                    crate::error::check_dim(given, d)?;
                }
                MeasureSpec::discrete(DiscreteSignedMeasure::new(d, atoms)?)
            }
            MeasureKind::Product => {
                extra("atoms", self.atoms.is_some())?;
                let axes = field(self.axes, "product", "axes")?;
                if let Some(given) = self.d {
                    crate::error::check_dim(given, axes.len())?;
                }
                MeasureSpec::product(
                    axes.into_iter()
                        .map(|a| AxisCdf::new(a.breakpoints, a.values, a.values_left))
                        .collect::<Result<_>>()?,
                )
            }
            MeasureKind::Chelson => {
                extra("atoms", self.atoms.is_some())?;
                extra("axes", self.axes.is_some())?;
                Ok(ChelsonFixture.measure())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub breakpoints: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub interp: Interpolation,
}

impl GridDoc {
    pub fn into_function(self) -> Result<GridFunction> {
        GridFunction::new(self.breakpoints, self.values, self.interp)
    }
}

impl From<&GridFunction> for GridDoc {
    fn from(f: &GridFunction) -> Self {
        GridDoc {
            breakpoints: f.breakpoints().to_vec(),
            values: f.values().to_vec(),
            interp: f.interpolation(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PointSet;

    #[test]
    fn parses_every_measure_kind() {
        let docs = [
            r#"{"type":"uniform","d":2}"#,
            r#"{"type":"discrete","atoms":[{"x":[0.5,0.5],"w":1.0}]}"#,
            r#"{"type":"product","axes":[{"breakpoints":[0,1],"values":[0,1]},{"breakpoints":[0,0.5,1],"values":[0,1,1],"values_left":[0,0,1]}]}"#,
            r#"{"type":"chelson"}"#,
        ];
        for doc in docs {
            let m: MeasureDoc = serde_json::from_str(doc).unwrap();
            assert_eq!(m.into_spec().unwrap().dim(), 2);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(serde_json::from_str::<MeasureDoc>(r#"{"type":"gauss"}"#).is_err());
        let m: MeasureDoc = serde_json::from_str(r#"{"type":"discrete","atoms":[{"x":[0.5],"w":0.5}]}"#).unwrap();
        assert!(m.into_spec().is_err());
        let m: MeasureDoc = serde_json::from_str(r#"{"type":"uniform"}"#).unwrap();
        assert!(m.into_spec().is_err());
        assert!(serde_json::from_str::<PointSet>(r#"{"d":2,"points":[[0.5,1.5]]}"#).is_err());
        assert!(serde_json::from_str::<PointSet>(r#"{"d":2,"points":[[0.5]]}"#).is_err());
    }

    #[test]
    fn grid_round_trip() {
        let doc: GridDoc =
            serde_json::from_str(r#"{"breakpoints":[[0,0.5,1]],"values":[0,1,0],"interp":"step"}"#).unwrap();
        let f = doc.clone().into_function().unwrap();
        assert_eq!(GridDoc::from(&f), doc);
    }
}
