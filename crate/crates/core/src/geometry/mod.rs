//! Planar geometry: Frenet frames over polylines, polynomial motion
//! profiles, Fresnel integrals and clothoids, bicycle-model kinematics and
//! oriented-box tests.

pub mod clothoid;
pub mod frenet;
pub mod fresnel;
pub mod kinematics;
pub mod poly;
pub mod shapes;

pub use clothoid::{clothoid_point, ClothoidParams};
pub use frenet::{frenet_to_cartesian, project_to_frenet, CartesianState, FrenetState, ReferenceLine};
pub use fresnel::fresnel;
pub use kinematics::{curvature_from_steering, from_fixed_oriented, steering_from_curvature, to_fixed_oriented};
pub use poly::{fit_quartic, fit_quintic, PolynomialProfile};
pub use shapes::OrientedBox;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}
