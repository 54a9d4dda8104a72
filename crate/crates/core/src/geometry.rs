//! Surface parameterization of the finger and geodesic utilities.
//!
//! The sensorized surface is a hemisphere of radius `r` (the tip) welded to
//! half the circumference of a cylinder of the same radius (the body). It is
//! charted by two coordinates `(a, b)`: an equal-area square-to-hemisphere
//! projection covers the tip with the square `[-L, L]^2`, `L = r*sqrt(pi/2)`,
//! and two sheared parallelogram extensions of that square cover the two
//! 90-degree quarters of the sensorized cylinder half. Points in the
//! extensions are projected back onto a square edge, and the projection
//! distance (scaled by `gamma = 2/sqrt(pi)`) becomes depth along the
//! cylinder axis. The map preserves areas exactly on both parts, so uniform
//! sampling in `(a, b)` is uniform sampling on the surface.
//!
//! Coordinates carry millimeter scale: `a`, `b` are commensurate with `r`,
//! so `L ≈ 22.56` for the default 18 mm radius.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use thiserror::Error;

/// Radius of the default finger tip (36 mm diameter hemisphere).
pub const DEFAULT_RADIUS_MM: f64 = 18.0;
/// Height of the default cylindrical body.
pub const DEFAULT_CYL_HEIGHT_MM: f64 = 72.0;
/// Thickness of the transparent waveguide layer.
pub const DEFAULT_WAVEGUIDE_THICKNESS_MM: f64 = 7.0;

/// Cartesian residual tolerance for "is this point on the surface".
pub const SURFACE_TOL_MM: f64 = 1e-6;

/// Errors raised by surface-map operations.
#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("point ({0}, {1}) lies outside the sensorized (a,b) domain")]
    OutOfDomain(f64, f64),
    #[error("point ({0}, {1}, {2}) is not on the finger surface (residual {3} mm)")]
    NotOnSurface(f64, f64, f64, f64),
    #[error("point ({0}, {1}, {2}) lies on the unsensed back half of the cylinder")]
    UnsensedRegion(f64, f64, f64),
    #[error("finger dimension {0} must be strictly positive, got {1}")]
    NonPositiveDimension(&'static str, f64),
}

/// Minimal 3-vector used for Cartesian points and directions (mm).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn dist(self, o: Vec3) -> f64 {
        self.sub(o).norm()
    }
}

/// Physical dimensions of the finger. Derived quantities (`half_side`,
/// `gamma`, `region_depth`) are recomputed on every call so they can never
/// go stale with respect to the stored lengths.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FingerDims {
    pub radius_mm: f64,
    pub cyl_height_mm: f64,
    pub waveguide_thickness_mm: f64,
}

impl Default for FingerDims {
    fn default() -> Self {
        FingerDims {
            radius_mm: DEFAULT_RADIUS_MM,
            cyl_height_mm: DEFAULT_CYL_HEIGHT_MM,
            waveguide_thickness_mm: DEFAULT_WAVEGUIDE_THICKNESS_MM,
        }
    }
}

impl FingerDims {
    pub fn new(
        radius_mm: f64,
        cyl_height_mm: f64,
        waveguide_thickness_mm: f64,
    ) -> Result<Self, GeometryError> {
        for (name, v) in [
            ("radius_mm", radius_mm),
            ("cyl_height_mm", cyl_height_mm),
            ("waveguide_thickness_mm", waveguide_thickness_mm),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(GeometryError::NonPositiveDimension(name, v));
            }
        }
        Ok(FingerDims {
            radius_mm,
            cyl_height_mm,
            waveguide_thickness_mm,
        })
    }

    /// Half-side `L = r*sqrt(pi/2)` of the square that maps onto the tip.
    pub fn half_side(&self) -> f64 {
        self.radius_mm * FRAC_PI_2.sqrt()
    }

    /// Depth-per-projection-distance scaling for the cylinder extensions.
    ///
    /// Equals the cylinder height divided by the length of the seam segment
    /// where the two extension regions meet. With the regions sized so their
    /// chart area matches the surface area they cover, the ratio collapses
    /// to the constant `2/sqrt(pi)` and the extension map is exactly
    /// area-preserving.
    pub fn gamma(&self) -> f64 {
        2.0 / PI.sqrt()
    }

    /// Extent of the extension regions measured along the shear direction:
    /// the point `(a, b)` at shear depth `t` maps `gamma*sqrt(2)*t` down the
    /// cylinder, so `t = region_depth()` lands on the cylinder rim.
    pub fn region_depth(&self) -> f64 {
        self.cyl_height_mm / (self.gamma() * SQRT_2)
    }

    /// Total sensorized area: hemisphere plus half the cylinder shell.
    pub fn sensorized_area_mm2(&self) -> f64 {
        2.0 * PI * self.radius_mm * self.radius_mm
            + PI * self.radius_mm * self.cyl_height_mm
    }

    /// Azimuth interval (radians) of the sensed cylinder half.
    ///
    /// The extension attached to the `b = -L` edge covers azimuths
    /// `[-3pi/4, -pi/4]` and the one attached to `a = +L` covers
    /// `[-pi/4, pi/4]`; together they form the contiguous front half.
    pub fn sensed_azimuth(&self) -> (f64, f64) {
        (-3.0 * FRAC_PI_4, FRAC_PI_4)
    }
}

/// Which chart region an `(a, b)` point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Region {
    /// The square `[-L, L]^2`, mapping onto the hemispherical tip.
    Tip,
    /// Parallelogram below the `b = -L` edge, mapping onto the cylinder
    /// quarter centered on the `-y` axis.
    Green,
    /// Parallelogram right of the `a = +L` edge, mapping onto the cylinder
    /// quarter centered on the `+x` axis.
    Blue,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Tip => "tip",
            Region::Green => "green",
            Region::Blue => "blue",
        }
    }
}

/// A chart point with its region tag. Construct through [`ABPoint::new`] so
/// the tag is always consistent with the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ABPoint {
    pub a: f64,
    pub b: f64,
    pub region: Region,
}

/// Classification slack: boundary points may be tagged with either adjacent
/// region; both map to the same Cartesian point.
const EDGE_EPS: f64 = 1e-9;

impl ABPoint {
    pub fn new(a: f64, b: f64, dims: &FingerDims) -> Result<Self, GeometryError> {
        Ok(ABPoint {
            a,
            b,
            region: classify(a, b, dims)?,
        })
    }

    /// Shear depth into the extension region (0 on the tip).
    pub fn shear_depth(&self, dims: &FingerDims) -> f64 {
        let l = dims.half_side();
        match self.region {
            Region::Tip => 0.0,
            Region::Green => -(self.b + l),
            Region::Blue => self.a - l,
        }
    }
}

fn classify(a: f64, b: f64, dims: &FingerDims) -> Result<Region, GeometryError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(GeometryError::OutOfDomain(a, b));
    }
    let l = dims.half_side();
    let t_max = dims.region_depth();
    if a.abs() <= l + EDGE_EPS && b.abs() <= l + EDGE_EPS {
        return Ok(Region::Tip);
    }
    if b < -l {
        // Candidate green point: projects to (a + b + L, -L).
        let t = -(b + l);
        let ap = a + b + l;
        if ap >= -l - EDGE_EPS && ap <= l + EDGE_EPS && t <= t_max + EDGE_EPS {
            return Ok(Region::Green);
        }
    }
    if a > l {
        // Candidate blue point: projects to (L, a + b - L).
        let t = a - l;
        let bp = a + b - l;
        if bp.abs() <= l + EDGE_EPS && t <= t_max + EDGE_EPS {
            return Ok(Region::Blue);
        }
    }
    Err(GeometryError::OutOfDomain(a, b))
}

/// A chart point together with its Cartesian image and outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub ab: ABPoint,
    pub xyz: Vec3,
    pub normal: Vec3,
}

/// Equal-area square-to-hemisphere map, extended by the cylinder offset `d`.
///
/// `d = 0` yields a point on the hemisphere; `d > 0` is only meaningful when
/// `(a, b)` lies on the square boundary, where it pushes the point straight
/// down the cylinder wall.
fn square_to_sphere(a: f64, b: f64, d: f64, r: f64) -> Vec3 {
    if a == 0.0 && b == 0.0 {
        // Removable singularity: both branch conditions exclude the origin,
        // whose continuous limit is the pole.
        return Vec3::new(0.0, 0.0, r - d);
    }
    if b.abs() <= a.abs() {
        let alpha = (2.0 * a / PI) * (PI - a * a / (r * r)).sqrt();
        let phase = b * PI / (4.0 * a);
        Vec3::new(
            alpha * phase.cos(),
            alpha * phase.sin(),
            r - 2.0 * a * a / (PI * r) - d,
        )
    } else {
        let beta = (2.0 * b / PI) * (PI - b * b / (r * r)).sqrt();
        let phase = a * PI / (4.0 * b);
        Vec3::new(
            beta * phase.sin(),
            beta * phase.cos(),
            r - 2.0 * b * b / (PI * r) - d,
        )
    }
}

/// Forward map: chart point to Cartesian surface point with normal.
pub fn ab_to_xyz(p: &ABPoint, dims: &FingerDims) -> Result<SurfacePoint, GeometryError> {
    // Re-validate so stale tags cannot smuggle a point outside the domain.
    let region = classify(p.a, p.b, dims)?;
    let r = dims.radius_mm;
    let l = dims.half_side();
    let (xyz, normal) = match region {
        Region::Tip => {
            let xyz = square_to_sphere(p.a, p.b, 0.0, r);
            (xyz, xyz.scale(1.0 / r))
        }
        Region::Green => {
            let ap = p.a + p.b + l;
            let bp = -l;
            let d = dims.gamma() * ((ap - p.a).hypot(bp - p.b));
            let xyz = square_to_sphere(ap, bp, d, r);
            (xyz, Vec3::new(xyz.x / r, xyz.y / r, 0.0))
        }
        Region::Blue => {
            let ap = l;
            let bp = p.a + p.b - l;
            let d = dims.gamma() * ((ap - p.a).hypot(bp - p.b));
            let xyz = square_to_sphere(ap, bp, d, r);
            (xyz, Vec3::new(xyz.x / r, xyz.y / r, 0.0))
        }
    };
    Ok(SurfacePoint {
        ab: ABPoint {
            a: p.a,
            b: p.b,
            region,
        },
        xyz,
        normal,
    })
}

/// Inverse map: Cartesian point (within [`SURFACE_TOL_MM`] of the surface)
/// back to chart coordinates.
pub fn xyz_to_ab(q: Vec3, dims: &FingerDims) -> Result<ABPoint, GeometryError> {
    let r = dims.radius_mm;
    let ab = if q.z >= 0.0 {
        let rho = q.norm();
        if (rho - r).abs() > SURFACE_TOL_MM {
            return Err(GeometryError::NotOnSurface(q.x, q.y, q.z, (rho - r).abs()));
        }
        invert_sphere(q.scale(r / rho), dims)
    } else {
        let rho = q.x.hypot(q.y);
        if (rho - r).abs() > SURFACE_TOL_MM {
            return Err(GeometryError::NotOnSurface(q.x, q.y, q.z, (rho - r).abs()));
        }
        if q.z < -dims.cyl_height_mm - SURFACE_TOL_MM {
            return Err(GeometryError::NotOnSurface(
                q.x,
                q.y,
                q.z,
                -dims.cyl_height_mm - q.z,
            ));
        }
        let phi = q.y.atan2(q.x);
        let (lo, hi) = dims.sensed_azimuth();
        let ang_tol = SURFACE_TOL_MM / r;
        if phi < lo - ang_tol || phi > hi + ang_tol {
            return Err(GeometryError::UnsensedRegion(q.x, q.y, q.z));
        }
        invert_cylinder(phi.clamp(lo, hi), (-q.z).clamp(0.0, dims.cyl_height_mm), dims)
    };
    let ab = ABPoint::new(ab.0, ab.1, dims)?;
    // Guard: the analytic branches above are exact, but verify the
    // round-trip residual and fall back to a local numeric polish if a
    // boundary case ever degrades it.
    let fwd = ab_to_xyz(&ab, dims)?;
    if fwd.xyz.dist(q) > 1e-7_f64.max(4.0 * SURFACE_TOL_MM) {
        return polish_inverse(ab, q, dims);
    }
    Ok(ab)
}

/// Analytic inversion on the hemisphere (`q` already snapped to radius `r`).
fn invert_sphere(q: Vec3, dims: &FingerDims) -> (f64, f64) {
    let r = dims.radius_mm;
    let m = (PI * r * (r - q.z).max(0.0) / 2.0).sqrt();
    if m < 1e-12 {
        return (0.0, 0.0);
    }
    let phi = q.y.atan2(q.x);
    if phi.abs() <= FRAC_PI_4 {
        let a = m;
        (a, 4.0 * a * phi / PI)
    } else if phi.abs() >= 3.0 * FRAC_PI_4 {
        let a = -m;
        let t = if phi > 0.0 { phi - PI } else { phi + PI };
        (a, 4.0 * a * t / PI)
    } else if phi > 0.0 {
        let b = m;
        let t = FRAC_PI_2 - phi;
        (4.0 * b * t / PI, b)
    } else {
        let b = -m;
        let t = -FRAC_PI_2 - phi;
        (4.0 * b * t / PI, b)
    }
}

/// Analytic inversion on the sensed cylinder half.
fn invert_cylinder(phi: f64, depth: f64, dims: &FingerDims) -> (f64, f64) {
    let l = dims.half_side();
    let t = depth / (dims.gamma() * SQRT_2);
    if phi >= -FRAC_PI_4 {
        // Blue quarter, attached to the a = +L edge.
        let bp = 4.0 * l * phi / PI;
        (l + t, bp - t)
    } else {
        // Green quarter, attached to the b = -L edge.
        let ap = 4.0 * l * (phi + FRAC_PI_2) / PI;
        (ap + t, -l - t)
    }
}

/// Numeric fallback for the inverse map: shrink a local search box around
/// the analytic candidate until the forward residual is below tolerance.
fn polish_inverse(seed: ABPoint, q: Vec3, dims: &FingerDims) -> Result<ABPoint, GeometryError> {
    let mut best = seed;
    let mut best_res = ab_to_xyz(&best, dims)?.xyz.dist(q);
    let mut h = 1e-4;
    for _ in 0..60 {
        let mut improved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            if let Ok(cand) = ABPoint::new(best.a + da, best.b + db, dims) {
                let res = ab_to_xyz(&cand, dims)?.xyz.dist(q);
                if res < best_res {
                    best = cand;
                    best_res = res;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
        if best_res < 1e-10 {
            break;
        }
    }
    if best_res > SURFACE_TOL_MM {
        return Err(GeometryError::NotOnSurface(q.x, q.y, q.z, best_res));
    }
    Ok(best)
}

/// A geodesic between two surface points: its exact construction plus a
/// polyline sampling used to report length.
#[derive(Debug, Clone)]
pub struct Geodesic {
    /// Polyline vertices on the surface, ordered from start to end.
    pub points: Vec<Vec3>,
    /// Length of the refined polyline (mm).
    pub length_mm: f64,
}

/// Relative convergence target for polyline-length refinement.
const POLYLINE_REL_TOL: f64 = 1e-3;

enum Side {
    Sphere(Vec3),
    Cylinder { phi: f64, z: f64 },
}

fn side_of(q: Vec3, dims: &FingerDims) -> Side {
    if q.z >= -1e-12 {
        Side::Sphere(q)
    } else {
        Side::Cylinder {
            phi: q.y.atan2(q.x),
            z: q.z,
        }
    }
}

/// Sample the great-circle arc between two points on the sphere of radius r.
fn arc_points(u1: Vec3, u2: Vec3, r: f64, n: usize, out: &mut Vec<Vec3>) {
    let a = u1.normalized();
    let b = u2.normalized();
    let cosw = a.dot(b).clamp(-1.0, 1.0);
    let w = cosw.acos();
    if w < 1e-12 {
        out.push(u2);
        return;
    }
    if PI - w < 1e-9 {
        // Near-antipodal equator pair: route over the pole, which is the
        // shortest on-surface connection for points of the upper hemisphere.
        let pole = Vec3::new(0.0, 0.0, 1.0);
        arc_points(a.scale(r), pole.scale(r), r, n / 2 + 1, out);
        arc_points(pole.scale(r), b.scale(r), r, n / 2 + 1, out);
        return;
    }
    let sinw = w.sin();
    for k in 1..=n {
        let t = k as f64 / n as f64;
        let c1 = ((1.0 - t) * w).sin() / sinw;
        let c2 = (t * w).sin() / sinw;
        out.push(a.scale(c1).add(b.scale(c2)).scale(r));
    }
}

/// Sample the unrolled-plane straight line between two cylinder points.
fn cyl_points(phi1: f64, z1: f64, phi2: f64, z2: f64, r: f64, n: usize, out: &mut Vec<Vec3>) {
    for k in 1..=n {
        let t = k as f64 / n as f64;
        let phi = phi1 + t * (phi2 - phi1);
        let z = z1 + t * (z2 - z1);
        out.push(Vec3::new(r * phi.cos(), r * phi.sin(), z));
    }
}

fn polyline_len(pts: &[Vec3]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Construct the geodesic path between two on-surface Cartesian points,
/// sampled with roughly `seg` segments.
fn geodesic_path(q1: Vec3, q2: Vec3, dims: &FingerDims, seg: usize) -> Vec<Vec3> {
    let r = dims.radius_mm;
    let mut pts = vec![q1];
    match (side_of(q1, dims), side_of(q2, dims)) {
        (Side::Sphere(p1), Side::Sphere(p2)) => {
            arc_points(p1, p2, r, seg, &mut pts);
        }
        (Side::Cylinder { phi: f1, z: z1 }, Side::Cylinder { phi: f2, z: z2 }) => {
            cyl_points(f1, z1, f2, z2, r, seg, &mut pts);
        }
        (Side::Sphere(sp), Side::Cylinder { phi, z }) => {
            let psi = best_crossing(sp, phi, z, dims);
            let cross = Vec3::new(r * psi.cos(), r * psi.sin(), 0.0);
            let arc = sp.dist(cross);
            let line = (r * (phi - psi)).hypot(z);
            let total = (arc + line).max(1e-9);
            let n1 = ((seg as f64 * arc / total).round() as usize).max(1);
            let n2 = (seg.saturating_sub(n1)).max(1);
            arc_points(sp, cross, r, n1, &mut pts);
            cyl_points(psi, 0.0, phi, z, r, n2, &mut pts);
        }
        (Side::Cylinder { phi, z }, Side::Sphere(sp)) => {
            let psi = best_crossing(sp, phi, z, dims);
            let cross = Vec3::new(r * psi.cos(), r * psi.sin(), 0.0);
            let arc = sp.dist(cross);
            let line = (r * (phi - psi)).hypot(z);
            let total = (arc + line).max(1e-9);
            let n2 = ((seg as f64 * arc / total).round() as usize).max(1);
            let n1 = (seg.saturating_sub(n2)).max(1);
            cyl_points(phi, z, psi, 0.0, r, n1, &mut pts);
            arc_points(cross, sp, r, n2, &mut pts);
        }
    }
    pts
}

/// Equator azimuth where the tip-to-body geodesic crosses the weld:
/// minimizes great-arc length on the sphere plus unrolled line length on
/// the cylinder. Dense scan followed by golden-section refinement.
fn best_crossing(sphere_pt: Vec3, phi_cyl: f64, z_cyl: f64, dims: &FingerDims) -> f64 {
    let r = dims.radius_mm;
    let (lo, hi) = dims.sensed_azimuth();
    let u = sphere_pt.normalized();
    let cost = |psi: f64| -> f64 {
        let e = Vec3::new(psi.cos(), psi.sin(), 0.0);
        let arc = r * u.dot(e).clamp(-1.0, 1.0).acos();
        let line = (r * (phi_cyl - psi)).hypot(z_cyl);
        arc + line
    };
    let n = 64;
    let mut best_psi = lo;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let psi = lo + (hi - lo) * k as f64 / n as f64;
        let c = cost(psi);
        if c < best {
            best = c;
            best_psi = psi;
        }
    }
    let span = (hi - lo) / n as f64;
    let (mut a, mut b) = (
        (best_psi - span).max(lo),
        (best_psi + span).min(hi),
    );
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = cost(x2);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Geodesic between two chart points with the refined polyline and length.
pub fn geodesic(p1: &ABPoint, p2: &ABPoint, dims: &FingerDims) -> Result<Geodesic, GeometryError> {
    let q1 = ab_to_xyz(p1, dims)?.xyz;
    let q2 = ab_to_xyz(p2, dims)?.xyz;
    Ok(geodesic_xyz(q1, q2, dims))
}

pub(crate) fn geodesic_xyz(q1: Vec3, q2: Vec3, dims: &FingerDims) -> Geodesic {
    if q1.dist(q2) < 1e-12 {
        return Geodesic {
            points: vec![q1, q2],
            length_mm: 0.0,
        };
    }
    // Refine the polyline by doubling the segment count until the length
    // converges to 0.1% relative.
    let mut seg = 64usize;
    let mut pts = geodesic_path(q1, q2, dims, seg);
    let mut len = polyline_len(&pts);
    while seg < 4096 {
        seg *= 2;
        let pts2 = geodesic_path(q1, q2, dims, seg);
        let len2 = polyline_len(&pts2);
        let converged = (len2 - len).abs() <= POLYLINE_REL_TOL * len2.max(1e-12);
        pts = pts2;
        len = len2;
        if converged {
            break;
        }
    }
    Geodesic {
        points: pts,
        length_mm: len,
    }
}

/// Geodesic distance along the finger surface (mm), via polyline refinement.
pub fn surface_distance(
    p1: &ABPoint,
    p2: &ABPoint,
    dims: &FingerDims,
) -> Result<f64, GeometryError> {
    Ok(geodesic(p1, p2, dims)?.length_mm)
}

pub(crate) fn surface_distance_xyz(q1: Vec3, q2: Vec3, dims: &FingerDims) -> f64 {
    geodesic_xyz(q1, q2, dims).length_mm
}

/// The evaluation metric for touch localization: straight-line (chordal)
/// distance in mm between the Cartesian images of the two chart points.
pub fn localization_error_mm(
    pred: &ABPoint,
    truth: &ABPoint,
    dims: &FingerDims,
) -> Result<f64, GeometryError> {
    let qp = ab_to_xyz(pred, dims)?.xyz;
    let qt = ab_to_xyz(truth, dims)?.xyz;
    Ok(qp.dist(qt))
}

/// Clamp an arbitrary `(a, b)` pair into the chart domain (nearest point of
/// the convex domain hexagon). Used to sanitize regressor outputs before
/// converting them to Cartesian space.
pub fn clamp_to_domain(a: f64, b: f64, dims: &FingerDims) -> ABPoint {
    if let Ok(p) = ABPoint::new(a, b, dims) {
        return p;
    }
    let l = dims.half_side();
    let t_max = dims.region_depth();
    // Domain hexagon vertices, counterclockwise.
    let verts = [
        (-l, l),
        (-l, -l),
        (-l + t_max, -l - t_max),
        (l + t_max, -l - t_max),
        (l + t_max, l - t_max),
        (l, l),
    ];
    let mut best = (l, 0.0);
    let mut best_d2 = f64::INFINITY;
    for i in 0..verts.len() {
        let (x1, y1) = verts[i];
        let (x2, y2) = verts[(i + 1) % verts.len()];
        let (dx, dy) = (x2 - x1, y2 - y1);
        let t = (((a - x1) * dx + (b - y1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
        let (px, py) = (x1 + t * dx, y1 + t * dy);
        let d2 = (a - px) * (a - px) + (b - py) * (b - py);
        if d2 < best_d2 {
            best_d2 = d2;
            best = (px, py);
        }
    }
    // Nudge inward so classification cannot fail on the exact boundary.
    let (mut pa, mut pb) = best;
    let (ca, cb) = (0.35 * t_max, -0.35 * t_max);
    pa += (ca - pa) * 1e-9;
    pb += (cb - pb) * 1e-9;
    ABPoint::new(pa, pb, dims).expect("clamped point is inside the domain")
}

/// Uniform random chart point (uniform in surface area, since the map is
/// area-preserving). Rejection-samples the bounding box of the domain.
pub fn sample_domain_point<R: rand::Rng>(rng: &mut R, dims: &FingerDims) -> ABPoint {
    let l = dims.half_side();
    let t = dims.region_depth();
    loop {
        let a = rng.random_range(-l..l + t);
        let b = rng.random_range(-l - t..l);
        if let Ok(p) = ABPoint::new(a, b, dims) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dims() -> FingerDims {
        FingerDims::default()
    }

    #[test]
    fn pole_maps_to_apex() {
        let p = ABPoint::new(0.0, 0.0, &dims()).unwrap();
        let sp = ab_to_xyz(&p, &dims()).unwrap();
        assert_relative_eq!(sp.xyz.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(sp.xyz.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(sp.xyz.z, 18.0, epsilon = 1e-12);
    }

    #[test]
    fn square_edge_midpoint_maps_to_equator() {
        let d = dims();
        let l = d.half_side();
        let p = ABPoint::new(l, 0.0, &d).unwrap();
        let sp = ab_to_xyz(&p, &d).unwrap();
        // Hand evaluation: alpha = (2L/pi)*sqrt(pi - L^2/r^2) = r and
        // z = r - 2L^2/(pi r) = 0.
        assert_relative_eq!(sp.xyz.x, 18.0, epsilon = 1e-12);
        assert_relative_eq!(sp.xyz.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(sp.xyz.z, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn branch_formulas_agree_on_diagonals() {
        let d = dims();
        let r = d.radius_mm;
        let l = d.half_side();
        for k in 1..=40 {
            let a0 = l * k as f64 / 40.0;
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let (a, b) = (sa * a0, sb * a0);
                // Evaluate both branch formulas directly at |A| == |B|.
                let alpha = (2.0 * a / PI) * (PI - a * a / (r * r)).sqrt();
                let p1 = Vec3::new(
                    alpha * (b * PI / (4.0 * a)).cos(),
                    alpha * (b * PI / (4.0 * a)).sin(),
                    r - 2.0 * a * a / (PI * r),
                );
                let beta = (2.0 * b / PI) * (PI - b * b / (r * r)).sqrt();
                let p2 = Vec3::new(
                    beta * (a * PI / (4.0 * b)).sin(),
                    beta * (a * PI / (4.0 * b)).cos(),
                    r - 2.0 * b * b / (PI * r),
                );
                assert!(p1.dist(p2) < 1e-12, "branch mismatch at ({a}, {b})");
            }
        }
    }

    #[test]
    fn green_region_depth_is_gamma_times_projection() {
        let d = dims();
        let l = d.half_side();
        // Pick a green point with known shear depth.
        let t = 10.0;
        let ap = 3.0;
        let p = ABPoint::new(ap + t, -l - t, &d).unwrap();
        assert_eq!(p.region, Region::Green);
        let sp = ab_to_xyz(&p, &d).unwrap();
        let s = (t * t + t * t).sqrt(); // projection distance
        assert_relative_eq!(sp.xyz.z, -d.gamma() * s, epsilon = 1e-9);
        // Independent numeric evaluation of the projected formulas.
        let bp = -l;
        let dd = d.gamma() * s;
        let q = square_to_sphere(ap, bp, dd, d.radius_mm);
        assert!(sp.xyz.dist(q) < 1e-12);
    }

    #[test]
    fn inverse_of_equator_point() {
        let d = dims();
        let l = d.half_side();
        let p = xyz_to_ab(Vec3::new(18.0, 0.0, 0.0), &d).unwrap();
        assert_relative_eq!(p.a, l, epsilon = 1e-9);
        assert_relative_eq!(p.b, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn inverse_of_pole() {
        let p = xyz_to_ab(Vec3::new(0.0, 0.0, 18.0), &dims()).unwrap();
        assert_relative_eq!(p.a, 0.0, epsilon = 1e-9);
        assert_relative_eq!(p.b, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn off_surface_and_unsensed_points_are_rejected() {
        let d = dims();
        assert!(matches!(
            xyz_to_ab(Vec3::new(0.0, 0.0, 19.0), &d),
            Err(GeometryError::NotOnSurface(..))
        ));
        // Back of the cylinder: azimuth pi/2 + something outside (-3pi/4, pi/4).
        let q = Vec3::new(-12.727922061357857, 12.727922061357855, -10.0);
        assert!(matches!(
            xyz_to_ab(q, &d),
            Err(GeometryError::UnsensedRegion(..))
        ));
    }

    #[test]
    fn pole_to_equator_distance_is_quarter_circle() {
        let d = dims();
        let pole = ABPoint::new(0.0, 0.0, &d).unwrap();
        let eq = ABPoint::new(d.half_side(), 0.0, &d).unwrap();
        let dist = surface_distance(&pole, &eq, &d).unwrap();
        let expected = FRAC_PI_2 * d.radius_mm;
        assert!(
            (dist - expected).abs() <= 1e-3 * expected,
            "got {dist}, want {expected}"
        );
    }

    #[test]
    fn axial_cylinder_distance_is_height_difference() {
        let d = dims();
        let q1 = Vec3::new(18.0, 0.0, -5.0);
        let q2 = Vec3::new(18.0, 0.0, -10.0);
        let p1 = xyz_to_ab(q1, &d).unwrap();
        let p2 = xyz_to_ab(q2, &d).unwrap();
        let dist = surface_distance(&p1, &p2, &d).unwrap();
        assert!((dist - 5.0).abs() < 5e-3, "got {dist}");
    }

    #[test]
    fn distance_of_point_to_itself_is_zero() {
        let d = dims();
        let p = ABPoint::new(4.0, -3.0, &d).unwrap();
        assert_eq!(surface_distance(&p, &p, &d).unwrap(), 0.0);
    }

    #[test]
    fn chordal_error_pole_vs_equator() {
        let d = dims();
        let pole = ABPoint::new(0.0, 0.0, &d).unwrap();
        let eq = ABPoint::new(d.half_side(), 0.0, &d).unwrap();
        let e = localization_error_mm(&pole, &eq, &d).unwrap();
        assert_relative_eq!(e, 18.0 * SQRT_2, epsilon = 1e-9);
        let e2 = localization_error_mm(&eq, &pole, &d).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn clamp_returns_interior_points_unchanged() {
        let d = dims();
        let p = clamp_to_domain(1.0, 2.0, &d);
        assert_eq!((p.a, p.b), (1.0, 2.0));
        let q = clamp_to_domain(1000.0, 1000.0, &d);
        assert!(ABPoint::new(q.a, q.b, &d).is_ok());
    }

    #[test]
    fn region_classification_matches_layout() {
        let d = dims();
        let l = d.half_side();
        assert_eq!(ABPoint::new(0.0, 0.0, &d).unwrap().region, Region::Tip);
        assert_eq!(
            ABPoint::new(5.0 + 2.0, -l - 2.0, &d).unwrap().region,
            Region::Green
        );
        assert_eq!(
            ABPoint::new(l + 2.0, 5.0 - 2.0, &d).unwrap().region,
            Region::Blue
        );
        // Far corners beyond the parallelograms are out of domain.
        assert!(ABPoint::new(-l - 1.0, -l - 1.0, &d).is_err());
        assert!(ABPoint::new(l + 1.0, l + 1.0, &d).is_err());
        let t_max = d.region_depth();
        assert!(ABPoint::new(0.0, -l - t_max - 1.0, &d).is_err());
    }

    #[test]
    fn dims_validation_rejects_nonpositive() {
        assert!(FingerDims::new(0.0, 72.0, 7.0).is_err());
        assert!(FingerDims::new(18.0, -1.0, 7.0).is_err());
        assert!(FingerDims::new(18.0, 72.0, f64::NAN).is_err());
    }
}
