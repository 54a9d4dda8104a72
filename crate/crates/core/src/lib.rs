//! Core library for the `pskin` sensorized-finger toolkit.
//!
//! The finger under simulation is a hemispherical tip on a cylindrical body,
//! covered by a transparent waveguide with embedded light emitters and
//! receivers. Touch deforms the waveguide and perturbs light transport
//! between every emitter/receiver pair, so a single contact moves many
//! signals at once. This crate provides, in order of the data flow:
//!
//! * [`geometry`] — the equal-area square-to-hemisphere surface
//!   parameterization and its cylinder extension, plus geodesics.
//! * [`mechanics`] — indenter tips, deformation fields and the normal
//!   force law.
//! * [`sensing`] — the phenomenological optical response model that turns a
//!   deformation field into a 990-element signal frame.
//! * [`campaign`] — scripted indentation campaigns producing labeled
//!   datasets (single-touch sweeps and multitouch grid presses).
//! * [`learn`] — from-scratch dense networks (batch norm, Adam) for
//!   location/force regression and multitouch classification.
//! * [`eval`] — force-binned error reports, leave-one-out comparisons and
//!   the all-cells multitouch decision rule.
//! * [`stream`] — frame acquisition emulation: scan schedule, binary wire
//!   format and a paced TCP frame server.

pub mod geometry;
pub mod mechanics;

pub use geometry::{ABPoint, FingerDims, GeometryError, Region, SurfacePoint, Vec3};
pub use mechanics::{DeformationField, ForceModel, TipKind, TipShape};
