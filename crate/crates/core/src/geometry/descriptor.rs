//! JSON descriptors for bodies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, ConvexBody, Ellipsoid, Halfspace, PolytopeH, PolytopeV, Shape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceDescriptor {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMapDescriptor {
    pub linear: Vec<Vec<f64>>,
    pub shift: Vec<f64>,
}

/// Serialized form of a [`ConvexBody`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyDescriptor {
    PolytopeV { vertices: Vec<Vec<f64>> },
    PolytopeH { halfspaces: Vec<HalfspaceDescriptor> },
    Ellipsoid { center: Vec<f64>, shape: Vec<Vec<f64>> },
    Affine { map: AffineMapDescriptor, base: Box<BodyDescriptor> },
    Section { base: Box<BodyDescriptor>, anchor: Vec<f64>, basis: [Vec<f64>; 2] },
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidInput("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl BodyDescriptor {
    pub fn from_json(text: &str) -> Result<BodyDescriptor> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodyDescriptor::PolytopeV { vertices } => {
                ConvexBody::polytope_v(vertices.iter().map(|v| DVector::from_column_slice(v)).collect())
            }
            BodyDescriptor::PolytopeH { halfspaces } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| Halfspace::new(DVector::from_column_slice(&h.normal), h.offset))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PolytopeH::new(hs)?.into())
            }
            BodyDescriptor::Ellipsoid { center, shape } => {
                Ok(Ellipsoid::new(DVector::from_column_slice(center), matrix(shape)?)?.into())
            }
            BodyDescriptor::Affine { map, base } => {
                let map = AffineMap::new(matrix(&map.linear)?, DVector::from_column_slice(&map.shift))?;
                base.build()?.affine_image(&map)
            }
            BodyDescriptor::Section { base, anchor, basis } => {
                let basis = [DVector::from_column_slice(&basis[0]), DVector::from_column_slice(&basis[1])];
                Ok(base.build()?.plane_section(&DVector::from_column_slice(anchor), basis)?.body)
            }
        }
    }

    pub(crate) fn from_body(body: &ConvexBody) -> BodyDescriptor {
        let v = |x: &DVector<f64>| x.iter().copied().collect::<Vec<f64>>();
        match &*body.shape {
            Shape::H(h) => BodyDescriptor::PolytopeH {
                halfspaces: h
                    .halfspaces()
                    .iter()
                    .map(|f| HalfspaceDescriptor { normal: v(&f.normal), offset: f.offset })
                    .collect(),
            },
            Shape::V(p) => BodyDescriptor::PolytopeV { vertices: PolytopeV::input_points(p).iter().map(v).collect() },
            Shape::Ellipsoid(e) => BodyDescriptor::Ellipsoid { center: v(e.center()), shape: rows(e.shape()) },
            Shape::Affine { base, map } => BodyDescriptor::Affine {
                map: AffineMapDescriptor { linear: rows(map.linear()), shift: v(map.shift()) },
                base: Box::new(base.descriptor()),
            },
            Shape::Section(s) => BodyDescriptor::Section {
                base: Box::new(s.base.descriptor()),
                anchor: v(&s.anchor),
                basis: [v(&s.basis[0]), v(&s.basis[1])],
            },
        }
    }
}
