use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hull_facets, Halfspace};

#[derive(Clone, Debug)]
enum Kind {
    Lp { p: f64 },
    Polyhedral { vertices: Vec<DVector<f64>>, facets: Vec<Halfspace>, coord_bound: f64 },
    Variation,
}

/// A norm on `R^dim`.
///
/// The variation norm `max_i w_i - min_i w_i` lives on `R^{m+1}` modulo the
/// diagonal: vectors have length `m + 1` while the space has dimension `m`.
#[derive(Clone, Debug)]
pub struct Norm {
    kind: Kind,
    dim: usize,
}

/// Lp exponent as written in JSON: a number or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormDescriptor {
    Lp { p: Exponent, dim: usize },
    Polyhedral { vertices: Vec<Vec<f64>> },
    Variation { m: usize },
}

impl Norm {
    pub fn lp(p: f64, dim: usize) -> Result<Norm> {
        if !(p >= 1.0) {
            return Err(Error::InvalidInput(format!("Lp exponent must be in [1, inf], got {p}")));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("norm dimension must be positive".into()));
        }
        Ok(Norm { kind: Kind::Lp { p }, dim })
    }

    pub fn euclidean(dim: usize) -> Norm {
        Norm::lp(2.0, dim).expect("valid exponent")
    }

    /// Norm whose unit ball is `conv(V ∪ -V)`.
    pub fn polyhedral(vertices: Vec<DVector<f64>>) -> Result<Norm> {
        let dim = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidInput("polyhedral norm needs vertices".into()))?;
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidInput("polyhedral vertices differ in length".into()));
        }
        let mut all = vertices.clone();
        all.extend(vertices.iter().map(|v| -v));
        if crate::geometry::affine_rank(&all) < dim {
            return Err(Error::Degenerate("polyhedral unit ball is not full-dimensional".into()));
        }
        let facets = hull_facets(&all)?;
        let coord_bound = all.iter().map(|v| v.amax()).fold(0.0, f64::max);
        Ok(Norm { kind: Kind::Polyhedral { vertices, facets, coord_bound }, dim })
    }

    /// Variation norm on `R^{m+1} / diagonal`.
    pub fn variation(m: usize) -> Result<Norm> {
        if m == 0 {
            return Err(Error::InvalidInput("variation norm needs m >= 1".into()));
        }
        Ok(Norm { kind: Kind::Variation, dim: m + 1 })
    }

    /// `lp1`, `lp2`, `lpinf`, `variation`: `dim` is the space dimension.
    pub fn from_shorthand(name: &str, dim: usize) -> Result<Norm> {
        let lower = name.to_ascii_lowercase();
        if lower == "variation" {
            return Norm::variation(dim);
        }
        if let Some(rest) = lower.strip_prefix("lp") {
            let p = if rest == "inf" {
                f64::INFINITY
            } else {
                rest.parse::<f64>().map_err(|_| Error::InvalidInput(format!("unknown norm {name}")))?
            };
            return Norm::lp(p, dim);
        }
        Err(Error::InvalidInput(format!("unknown norm {name}")))
    }

    pub fn from_descriptor(d: &NormDescriptor) -> Result<Norm> {
        match d {
            NormDescriptor::Lp { p, dim } => {
                let p = match p {
                    Exponent::Finite(p) => *p,
                    Exponent::Named(s) if s == "inf" => f64::INFINITY,
                    Exponent::Named(s) => return Err(Error::InvalidInput(format!("bad exponent {s}"))),
                };
                Norm::lp(p, *dim)
            }
            NormDescriptor::Polyhedral { vertices } => {
                Norm::polyhedral(vertices.iter().map(|v| DVector::from_column_slice(v)).collect())
            }
            NormDescriptor::Variation { m } => Norm::variation(*m),
        }
    }

    pub fn descriptor(&self) -> NormDescriptor {
        match &self.kind {
            Kind::Lp { p } => NormDescriptor::Lp {
                p: if p.is_infinite() { Exponent::Named("inf".into()) } else { Exponent::Finite(*p) },
                dim: self.dim,
            },
            Kind::Polyhedral { vertices, .. } => NormDescriptor::Polyhedral {
                vertices: vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            },
            Kind::Variation => NormDescriptor::Variation { m: self.dim - 1 },
        }
    }

    /// Length of the vectors the norm accepts.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the normed space (one less than [`dim`](Self::dim) for
    /// the variation quotient).
    pub fn space_dim(&self) -> usize {
        match self.kind {
            Kind::Variation => self.dim - 1,
            _ => self.dim,
        }
    }

    pub fn eval(&self, v: &DVector<f64>) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(self.eval_slice(v.as_slice()))
    }

    /// Norm of a representative vector, without the dimension check.
    pub(crate) fn eval_slice(&self, v: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lp { p } => {
                if p.is_infinite() {
                    v.iter().fold(0.0, |m, x| m.max(x.abs()))
                } else if *p == 1.0 {
                    v.iter().map(|x| x.abs()).sum()
                } else if *p == 2.0 {
                    v.iter().map(|x| x * x).sum::<f64>().sqrt()
                } else {
                    let scale = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
                    if scale == 0.0 {
                        return 0.0;
                    }
                    scale * v.iter().map(|x| (x.abs() / scale).powf(*p)).sum::<f64>().powf(1.0 / p)
                }
            }
            Kind::Polyhedral { facets, .. } => facets.iter().fold(0.0, |m, f| {
                let s: f64 = f.normal.iter().zip(v).map(|(a, b)| a * b).sum();
                m.max(s / f.offset)
            }),
            Kind::Variation => {
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                hi - lo
            }
        }
    }

    /// Norm of a point given in space coordinates (`space_dim` entries).
    pub(crate) fn eval_space(&self, x: &[f64]) -> f64 {
        match self.kind {
            Kind::Variation => {
                let hi = x.iter().copied().fold(0.0, f64::max);
                let lo = x.iter().copied().fold(0.0, f64::min);
                hi - lo
            }
            _ => self.eval_slice(x),
        }
    }

    /// Representative vector for space coordinates.
    pub fn embed_space(&self, x: &[f64]) -> DVector<f64> {
        match self.kind {
            Kind::Variation => DVector::from_iterator(self.dim, x.iter().copied().chain(std::iter::once(0.0))),
            _ => DVector::from_column_slice(x),
        }
    }

    /// `c` with `|x|_inf <= c * ||x||` in space coordinates.
    pub(crate) fn sup_per_norm(&self) -> f64 {
        match &self.kind {
            Kind::Lp { .. } | Kind::Variation => 1.0,
            Kind::Polyhedral { coord_bound, .. } => *coord_bound,
        }
    }
}
