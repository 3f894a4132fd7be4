//! 2D polygon geometry: validation, convex decomposition, Minkowski sums,
//! separation/distance predicates, and arc arithmetic on the unit circle.
//!
//! Coordinates are `f64` world units. Predicates use the absolute tolerance
//! [`EPS_GEO`]; angular comparisons use [`EPS_ANG`]. All types are immutable
//! values after construction.

mod arc;
mod decomp;
mod intersect;
mod minkowski;
mod poly;

pub use arc::{Arc, ArcSet};
pub use decomp::{convex_decompose, ConvexPiece, Shape};
pub use intersect::{
    convex_contains_point, convex_distance, convex_interiors_intersect, convex_strictly_contains,
    interiors_intersect, shape_distance,
};
pub use minkowski::{minkowski_sum_convex, reflect_origin};
pub use poly::{validate_polygon, Point2, Polygon};

use thiserror::Error;

/// Absolute geometric tolerance in world units.
pub const EPS_GEO: f64 = 1e-9;
/// Angular tolerance in radians.
pub const EPS_ANG: f64 = 1e-7;

pub const TAU: f64 = std::f64::consts::TAU;

/// Normalizes an angle into `[0, 2*pi)`.
#[inline]
pub fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps an angle difference into `(-pi, pi]`.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r -= TAU;
    }
    r
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("polygon has fewer than 3 distinct vertices")]
    TooFewVertices,
    #[error("polygon boundary self-intersects")]
    SelfIntersecting,
    #[error("polygon area is degenerate")]
    DegenerateArea,
    #[error("coordinates must be finite")]
    NonFinite,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_normalization() {
        assert!((norm_angle(-0.1) - (TAU - 0.1)).abs() < 1e-12);
        assert_eq!(norm_angle(0.0), 0.0);
        assert!(norm_angle(TAU) < 1e-12);
        assert!((wrap_angle(3.5 * std::f64::consts::PI) - (-0.5 * std::f64::consts::PI)).abs() < 1e-12);
    }
}
