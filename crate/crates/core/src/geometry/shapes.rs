//! Stock bodies used throughout tests, benches and the experiment suite.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geometry::{ConvexBody, Ellipsoid, PolytopeH, PolytopeV, Point};

/// The open square `(-1, 1)^2`, in H-representation.
pub fn square() -> ConvexBody {
    cube(2)
}

/// The open cube `(-1, 1)^m`, in H-representation.
pub fn cube(m: usize) -> ConvexBody {
    PolytopeH::axis_box(&vec![-1.0; m], &vec![1.0; m])
        .expect("axis box is a valid polytope")
        .into()
}

/// The square `(-1, 1)^2` given by its four vertices.
pub fn square_v() -> ConvexBody {
    let v = |x: f64, y: f64| Point::from_vec(vec![x, y]);
    PolytopeV::new(vec![v(-1., -1.), v(1., -1.), v(1., 1.), v(-1., 1.)])
        .expect("square vertices span the plane")
        .into()
}

pub fn unit_disk() -> ConvexBody {
    unit_ball(2)
}

pub fn unit_ball(m: usize) -> ConvexBody {
    Ellipsoid::ball(Point::zeros(m), 1.0).expect("unit ball").into()
}

/// Ellipse with semi-axes `a`, `b`, rotated by `angle`, centered at the origin.
pub fn ellipse(a: f64, b: f64, angle: f64) -> Result<ConvexBody> {
    let (c, s) = (angle.cos(), angle.sin());
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (a * a), 1.0 / (b * b)]));
    let shape = &rot * diag * rot.transpose();
    let shape = (&shape + shape.transpose()) * 0.5;
    Ok(Ellipsoid::new(Point::zeros(2), shape)?.into())
}

/// Vertices of the regular `k`-gon of circumradius `r`, first vertex on the x-axis.
pub fn regular_polygon_vertices(k: usize, r: f64) -> Vec<Point> {
    (0..k)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / k as f64;
            Point::from_vec(vec![r * th.cos(), r * th.sin()])
        })
        .collect()
}

pub fn regular_polygon(k: usize, r: f64) -> Result<ConvexBody> {
    Ok(PolytopeV::new(regular_polygon_vertices(k, r))?.into())
}

/// The simplex with vertices `0, e_1, ..., e_m`.
pub fn standard_simplex(m: usize) -> ConvexBody {
    PolytopeV::new(standard_simplex_vertices(m)).expect("standard simplex").into()
}

pub fn standard_simplex_vertices(m: usize) -> Vec<Point> {
    let mut vs = vec![Point::zeros(m)];
    for i in 0..m {
        let mut e = Point::zeros(m);
        e[i] = 1.0;
        vs.push(e);
    }
    vs
}
