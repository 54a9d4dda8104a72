//! Indenter tips, contact deformation fields and the normal-force law.
//!
//! Contact is always commanded normal to the surface. A press is described
//! by a chart location, a commanded depth and a tip shape; the resulting
//! surface deformation `u(q) >= 0` is the commanded depth minus a tip-shape
//! clearance penalty, floored at zero. Normal force is linear in depth with
//! a per-tip multiplier on the soft-layer stiffness.

use crate::geometry::{
    ab_to_xyz, surface_distance_xyz, ABPoint, FingerDims, GeometryError, SurfacePoint, Vec3,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MechanicsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("force {0} N exceeds the load cell maximum of {1} N")]
    LoadCellOverrange(f64, f64),
    #[error("tip size must be positive for {0:?}, got {1}")]
    BadTipSize(TipKind, f64),
}

/// The five indenter geometries used for data collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum TipKind {
    Hemisphere,
    Planar,
    EdgeH,
    EdgeV,
    Corner,
}

impl TipKind {
    pub const ALL: [TipKind; 5] = [
        TipKind::Hemisphere,
        TipKind::Planar,
        TipKind::EdgeH,
        TipKind::EdgeV,
        TipKind::Corner,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TipKind::Hemisphere => "hemisphere",
            TipKind::Planar => "planar",
            TipKind::EdgeH => "edge_h",
            TipKind::EdgeV => "edge_v",
            TipKind::Corner => "corner",
        }
    }

    pub fn parse(s: &str) -> Option<TipKind> {
        match s {
            "hemisphere" => Some(TipKind::Hemisphere),
            "planar" => Some(TipKind::Planar),
            "edge_h" => Some(TipKind::EdgeH),
            "edge_v" => Some(TipKind::EdgeV),
            "corner" => Some(TipKind::Corner),
            _ => None,
        }
    }
}

/// A tip shape: kind plus its characteristic dimension in mm
/// (hemisphere: diameter, planar: disc radius, edge: blade length; the
/// corner is a point and carries no size).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TipShape {
    pub kind: TipKind,
    pub size_mm: f64,
}

impl TipShape {
    pub fn new(kind: TipKind, size_mm: f64) -> Result<Self, MechanicsError> {
        let needs_size = !matches!(kind, TipKind::Corner);
        if needs_size && !(size_mm > 0.0) {
            return Err(MechanicsError::BadTipSize(kind, size_mm));
        }
        Ok(TipShape { kind, size_mm })
    }

    /// Catalog default for each kind.
    pub fn default_for(kind: TipKind) -> TipShape {
        let size_mm = match kind {
            TipKind::Hemisphere => 10.0, // diameter
            TipKind::Planar => 15.0,     // radius
            TipKind::EdgeH | TipKind::EdgeV => 12.0, // length
            TipKind::Corner => 0.0,
        };
        TipShape { kind, size_mm }
    }
}

/// Curvature of the 1 mm skirt used by the planar rim, edges and corner:
/// clearance grows as `(s / 1 mm)^2 * 1 mm` away from the contact set.
const SKIRT_CURV_PER_MM: f64 = 1.0;

/// Linear force model with per-tip stiffness multipliers and the load-cell
/// range used by the metrology emulation path.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForceModel {
    pub stiffness_n_per_mm: f64,
    pub factor_hemisphere: f64,
    pub factor_planar: f64,
    pub factor_edge: f64,
    pub factor_corner: f64,
    pub load_cell_min_n: f64,
    pub load_cell_max_n: f64,
}

impl Default for ForceModel {
    fn default() -> Self {
        ForceModel {
            stiffness_n_per_mm: 2.8,
            factor_hemisphere: 1.0,
            factor_planar: 3.0,
            factor_edge: 1.8,
            factor_corner: 0.6,
            load_cell_min_n: 0.2,
            load_cell_max_n: 44.5,
        }
    }
}

impl ForceModel {
    pub fn tip_factor(&self, kind: TipKind) -> f64 {
        match kind {
            TipKind::Hemisphere => self.factor_hemisphere,
            TipKind::Planar => self.factor_planar,
            TipKind::EdgeH | TipKind::EdgeV => self.factor_edge,
            TipKind::Corner => self.factor_corner,
        }
    }
}

/// Ground-truth normal force for a commanded depth: zero when the tip is
/// above the surface, otherwise linear in depth.
pub fn force(depth_mm: f64, tip: TipKind, model: &ForceModel) -> f64 {
    depth_mm.max(0.0) * model.stiffness_n_per_mm * model.tip_factor(tip)
}

/// Load-cell emulation: forces below the detection floor read as zero and
/// forces above the rated maximum are an error.
pub fn measured_force(
    true_force_n: f64,
    model: &ForceModel,
) -> Result<f64, MechanicsError> {
    if true_force_n > model.load_cell_max_n {
        return Err(MechanicsError::LoadCellOverrange(
            true_force_n,
            model.load_cell_max_n,
        ));
    }
    if true_force_n < model.load_cell_min_n {
        return Ok(0.0);
    }
    Ok(true_force_n)
}

/// A deformation field: commanded press plus the machinery to evaluate the
/// indentation depth `u(q)` anywhere on the surface. Evaluation is pure and
/// re-entrant.
#[derive(Debug, Clone)]
pub struct DeformationField {
    pub center: SurfacePoint,
    pub depth_mm: f64,
    pub tip: TipShape,
    dims: FingerDims,
    /// Contact polyline for edge tips (single point otherwise).
    blade: Vec<Vec3>,
}

/// Build the deformation field for a commanded press.
pub fn deformation(
    center: &ABPoint,
    depth_mm: f64,
    tip: TipShape,
    dims: &FingerDims,
) -> Result<DeformationField, MechanicsError> {
    let center = ab_to_xyz(center, dims)?;
    let blade = match tip.kind {
        TipKind::EdgeH | TipKind::EdgeV => {
            blade_polyline(&center, tip.kind, tip.size_mm, dims)
        }
        _ => vec![center.xyz],
    };
    Ok(DeformationField {
        center,
        depth_mm,
        tip,
        dims: *dims,
        blade,
    })
}

/// Walk the blade contact line across the surface: straight steps along the
/// horizontal (circumferential) or vertical (meridian/axial) tangent,
/// re-projected onto the surface each step.
fn blade_polyline(
    center: &SurfacePoint,
    kind: TipKind,
    length_mm: f64,
    dims: &FingerDims,
) -> Vec<Vec3> {
    let step = 0.5;
    let n = (length_mm / 2.0 / step).ceil() as usize;
    let tangent0 = surface_tangent(center, kind);
    let mut pts = vec![center.xyz];
    for dir in [-1.0, 1.0] {
        let mut q = center.xyz;
        let mut t = tangent0.scale(dir);
        for _ in 0..n {
            let cand = q.add(t.scale(step));
            let proj = project_to_surface(cand, dims);
            t = proj.sub(q).normalized();
            q = proj;
            pts.push(q);
        }
    }
    pts
}

/// Horizontal (azimuthal) or vertical (meridian / axial) unit tangent at a
/// surface point.
fn surface_tangent(p: &SurfacePoint, kind: TipKind) -> Vec3 {
    let horizontal = matches!(kind, TipKind::EdgeH);
    let phi = p.xyz.y.atan2(p.xyz.x);
    let e_phi = Vec3::new(-phi.sin(), phi.cos(), 0.0);
    if horizontal {
        // Azimuthal direction; at the exact pole any direction works.
        if p.xyz.x.hypot(p.xyz.y) < 1e-9 {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            e_phi
        }
    } else if p.xyz.z > 0.0 {
        // Meridian direction on the tip.
        if p.xyz.x.hypot(p.xyz.y) < 1e-9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            p.normal.cross(e_phi).normalized()
        }
    } else {
        Vec3::new(0.0, 0.0, -1.0)
    }
}

/// Nearest point on the (whole) finger surface, used when stepping the
/// blade polyline across the weld.
fn project_to_surface(q: Vec3, dims: &FingerDims) -> Vec3 {
    let r = dims.radius_mm;
    if q.z >= 0.0 {
        q.scale(r / q.norm())
    } else {
        let rho = q.x.hypot(q.y);
        let s = r / rho;
        Vec3::new(q.x * s, q.y * s, q.z.max(-dims.cyl_height_mm))
    }
}

impl DeformationField {
    /// Indentation depth at a chart point.
    pub fn evaluate(&self, q: &ABPoint) -> Result<f64, MechanicsError> {
        let sp = ab_to_xyz(q, &self.dims)?;
        Ok(self.evaluate_xyz(sp.xyz))
    }

    /// Indentation depth at an on-surface Cartesian point.
    pub fn evaluate_xyz(&self, q: Vec3) -> f64 {
        if self.depth_mm <= 0.0 {
            return 0.0;
        }
        let penalty = match self.tip.kind {
            TipKind::Hemisphere => {
                let s = surface_distance_xyz(self.center.xyz, q, &self.dims);
                let r_tip = self.tip.size_mm / 2.0;
                s * s / (2.0 * r_tip)
            }
            TipKind::Planar => {
                let s = surface_distance_xyz(self.center.xyz, q, &self.dims);
                let over = (s - self.tip.size_mm).max(0.0);
                over * over * SKIRT_CURV_PER_MM
            }
            TipKind::Corner => {
                let s = surface_distance_xyz(self.center.xyz, q, &self.dims);
                s * s * SKIRT_CURV_PER_MM
            }
            TipKind::EdgeH | TipKind::EdgeV => {
                let s = dist_to_polyline(q, &self.blade);
                s * s * SKIRT_CURV_PER_MM
            }
        };
        (self.depth_mm - penalty).max(0.0)
    }

    /// Radius (from the press center) beyond which `u` is identically zero.
    pub fn support_radius_mm(&self) -> f64 {
        if self.depth_mm <= 0.0 {
            return 0.0;
        }
        let d = self.depth_mm;
        match self.tip.kind {
            TipKind::Hemisphere => (2.0 * (self.tip.size_mm / 2.0) * d).sqrt(),
            TipKind::Planar => self.tip.size_mm + (d / SKIRT_CURV_PER_MM).sqrt(),
            TipKind::Corner => (d / SKIRT_CURV_PER_MM).sqrt(),
            TipKind::EdgeH | TipKind::EdgeV => {
                self.tip.size_mm / 2.0 + (d / SKIRT_CURV_PER_MM).sqrt()
            }
        }
    }
}

fn dist_to_polyline(q: Vec3, pts: &[Vec3]) -> f64 {
    let mut best = f64::INFINITY;
    for p in pts {
        let d = q.dist(*p);
        if d < best {
            best = d;
        }
    }
    best
}
