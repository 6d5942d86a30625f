//! Points as plain JSON number arrays.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::Point;

pub fn serialize<S: Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
    p.as_slice().serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point, D::Error> {
    Ok(Point::from_vec(Vec::<f64>::deserialize(d)?))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(ps: &[Point], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = ps.iter().map(|p| p.as_slice()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point>, D::Error> {
        Ok(Vec::<Vec<f64>>::deserialize(d)?.into_iter().map(Point::from_vec).collect())
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Option<Point>, s: S) -> Result<S::Ok, S::Error> {
        p.as_ref().map(|p| p.as_slice()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Point>, D::Error> {
        Ok(Option::<Vec<f64>>::deserialize(d)?.map(Point::from_vec))
    }
}
