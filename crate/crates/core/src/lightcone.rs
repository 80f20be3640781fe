//! Minkowski four-vectors, light-cone variables and the split of spatial
//! vectors into components parallel and orthogonal to the laser direction.
//!
//! Natural units (hbar = c = 1) and the metric signature (+,-,-,-) are used
//! throughout the crate.

use crate::error::{invalid, Result};
use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// A contravariant four-vector `(x0; x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub r: Vec3,
}

impl FourVector {
    pub fn new(t: f64, r: Vec3) -> Self {
        Self { t, r }
    }

    pub fn zero() -> Self {
        Self::new(0.0, Vec3::zeros())
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn square(&self) -> f64 {
        minkowski_dot(self, self)
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t + rhs.t, self.r + rhs.r)
    }
}

impl std::ops::Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t - rhs.t, self.r - rhs.r)
    }
}

impl std::ops::Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        FourVector::new(self.t * rhs, self.r * rhs)
    }
}

/// `x0 y0 - x.y`
pub fn minkowski_dot(x: &FourVector, y: &FourVector) -> f64 {
    x.t * y.t - x.r.dot(&y.r)
}

/// Light-cone coordinates of an event relative to a propagation direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightConeCoords {
    /// `n.x = t - n.r`
    pub phi: f64,
    /// `ñ.x = t + n.r`
    pub phitilde: f64,
    /// Spatial component orthogonal to the propagation direction.
    pub r_perp: Vec3,
}

/// The laser propagation direction together with an orthonormal transverse
/// basis `(e1, e2)` such that `(e1, e2, n)` is right-handed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationGeometry {
    n: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl PropagationGeometry {
    pub fn new(direction: Vec3) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("propagation direction must be a non-zero finite vector"));
        }
        let n = direction / norm;
        // Pick the Cartesian axis least aligned with n to seed e1.
        let seed = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
            Vec3::x()
        } else if n.y.abs() <= n.z.abs() {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let e1 = (seed - n * n.dot(&seed)).normalize();
        let e2 = n.cross(&e1);
        Ok(Self { n, e1, e2 })
    }

    /// Laser along +z with `e1 = x`, `e2 = y`.
    pub fn along_z() -> Self {
        Self {
            n: Vec3::z(),
            e1: Vec3::x(),
            e2: Vec3::y(),
        }
    }

    pub fn direction(&self) -> Vec3 {
        self.n
    }

    pub fn transverse_basis(&self) -> (Vec3, Vec3) {
        (self.e1, self.e2)
    }

    /// `n = (1, n)`
    pub fn n(&self) -> FourVector {
        FourVector::new(1.0, self.n)
    }

    /// `ñ = (1, -n)`
    pub fn ntilde(&self) -> FourVector {
        FourVector::new(1.0, -self.n)
    }

    pub fn perp_decompose(&self, b: &Vec3) -> (Vec3, Vec3) {
        perp_decompose(b, self)
    }

    pub fn lightcone_coords(&self, x: &FourVector) -> LightConeCoords {
        lightcone_coords(x, self)
    }

    /// Inverse of [`lightcone_coords`].
    pub fn from_lightcone(&self, c: &LightConeCoords) -> FourVector {
        let t = 0.5 * (c.phi + c.phitilde);
        let along = 0.5 * (c.phitilde - c.phi);
        FourVector::new(t, c.r_perp + self.n * along)
    }

    /// Components of `v` in the local frame `(e1, e2, n)`.
    pub fn to_local(&self, v: &Vec3) -> [f64; 3] {
        [v.dot(&self.e1), v.dot(&self.e2), v.dot(&self.n)]
    }

    pub fn from_local(&self, c: [f64; 3]) -> Vec3 {
        self.e1 * c[0] + self.e2 * c[1] + self.n * c[2]
    }
}

impl Default for PropagationGeometry {
    fn default() -> Self {
        Self::along_z()
    }
}

/// Returns `(phi, phitilde, r_perp)` for the event `x`.
pub fn lightcone_coords(x: &FourVector, geom: &PropagationGeometry) -> LightConeCoords {
    let along = geom.n.dot(&x.r);
    LightConeCoords {
        phi: x.t - along,
        phitilde: x.t + along,
        r_perp: geom.n.cross(&x.r.cross(&geom.n)),
    }
}

/// Splits `b` into `n (n.b)` and `n x (b x n)`.
pub fn perp_decompose(b: &Vec3, geom: &PropagationGeometry) -> (Vec3, Vec3) {
    let n = geom.n;
    (n * n.dot(b), n.cross(&b.cross(&n)))
}

/// A mass-shell four-momentum `p = (sqrt(m^2 + p^2), p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnShellMomentum {
    p: Vec3,
    mass: f64,
}

impl OnShellMomentum {
    pub fn new(p: Vec3, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass must be positive"));
        }
        if !p.iter().all(|c| c.is_finite()) {
            return Err(invalid("momentum components must be finite"));
        }
        Ok(Self { p, mass })
    }

    pub fn spatial(&self) -> Vec3 {
        self.p
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        (self.mass * self.mass + self.p.norm_squared()).sqrt()
    }

    pub fn four(&self) -> FourVector {
        FourVector::new(self.energy(), self.p)
    }

    /// `n.p = E - n.p`, computed without cancellation when `p` points along `n`.
    pub fn lightfront(&self, geom: &PropagationGeometry) -> f64 {
        let e = self.energy();
        let along = geom.n.dot(&self.p);
        if along > 0.0 {
            let perp2 = self.p.norm_squared() - along * along;
            (self.mass * self.mass + perp2.max(0.0)) / (e + along)
        } else {
            e - along
        }
    }

    pub fn perp(&self, geom: &PropagationGeometry) -> Vec3 {
        perp_decompose(&self.p, geom).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn null_vectors() {
        let g = PropagationGeometry::along_z();
        assert_eq!(g.n().square(), 0.0);
        assert_eq!(g.ntilde().square(), 0.0);
        assert_eq!(g.n().dot(&g.ntilde()), 2.0);
        let p = OnShellMomentum::new(Vec3::zeros(), 1.0).unwrap();
        assert_eq!(g.n().dot(&p.four()), 1.0);
    }

    #[test]
    fn lightcone_examples() {
        let g = PropagationGeometry::along_z();
        let c = g.lightcone_coords(&FourVector::new(3.5, Vec3::zeros()));
        assert_eq!((c.phi, c.phitilde, c.r_perp), (3.5, 3.5, Vec3::zeros()));

        let c = g.lightcone_coords(&FourVector::new(0.0, Vec3::z()));
        assert_eq!((c.phi, c.phitilde, c.r_perp), (-1.0, 1.0, Vec3::zeros()));

        let x = FourVector::new(2.0, Vec3::new(1.0, 0.0, 3.0));
        let c = g.lightcone_coords(&x);
        assert_eq!((c.phi, c.phitilde), (-1.0, 5.0));
        assert_eq!(c.r_perp, Vec3::new(1.0, 0.0, 0.0));
        // t = (phi + phitilde)/2 and n.r = (phitilde - phi)/2
        assert_eq!(0.5 * (c.phi + c.phitilde), x.t);
        assert_eq!(0.5 * (c.phitilde - c.phi), x.r.z);
    }

    #[test]
    fn perp_examples() {
        let g = PropagationGeometry::along_z();
        assert_eq!(g.perp_decompose(&Vec3::z()), (Vec3::z(), Vec3::zeros()));
        let b = Vec3::new(0.3, -2.0, 0.0);
        assert_eq!(g.perp_decompose(&b), (Vec3::zeros(), b));
        let (par, perp) = g.perp_decompose(&Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(par, Vec3::new(0.0, 0.0, 3.0));
        assert_eq!(perp, Vec3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn oblique_basis_is_orthonormal() {
        let g = PropagationGeometry::new(Vec3::new(1.0, -2.0, 0.5)).unwrap();
        let (e1, e2) = g.transverse_basis();
        let n = g.direction();
        assert_abs_diff_eq!(e1.dot(&e2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e1.dot(&n), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e2.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e1.cross(&e2).dot(&n), 1.0, epsilon = 1e-15);
        let v = Vec3::new(0.2, 0.7, -1.1);
        assert_abs_diff_eq!((g.from_local(g.to_local(&v)) - v).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(PropagationGeometry::new(Vec3::zeros()).is_err());
        assert!(OnShellMomentum::new(Vec3::zeros(), 0.0).is_err());
        assert!(OnShellMomentum::new(Vec3::new(f64::NAN, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn lightfront_without_cancellation() {
        let g = PropagationGeometry::along_z();
        let p = OnShellMomentum::new(Vec3::new(0.0, 0.0, 1e8), 1.0).unwrap();
        // E - p_z = m^2 / (E + p_z)
        assert_abs_diff_eq!(p.lightfront(&g), 0.5e-8, epsilon = 1e-20);
    }
}
