//! Angular billiard dynamics and its polar duality with the Birkhoff billiard.
//!
//! The library implements two dynamical systems on a strictly convex oval and
//! the correspondence between them:
//!
//! - the **angular billiard**, a map on points exterior to a convex curve
//!   `Γ` defined by equal angles about a fixed interior origin `O` along the
//!   tangent lines of `Γ`;
//! - the classical **Birkhoff billiard** on oriented lines meeting the dual
//!   table `γ` (the envelope of the lines polar-dual to the points of `Γ`).
//!
//! On top of the dynamics it carries the algebraic machinery needed to test
//! polynomial integrability of the Birkhoff billiard: bivariate polynomial
//! algebra, homogenization, the `H` operator and the 3×3 Hessian, implicit
//! curve tracing, detection of real singular/inflection points, and the
//! resulting non-integrability certificates.
//!
//! Entry points by topic:
//! - [`geometry`]: points, oriented lines, polar duality.
//! - [`curve`]: convex ovals given by their polar position function.
//! - [`poly`]: dense bivariate/homogeneous polynomial algebra.
//! - [`trace`]: implicit curve tracing and flex/singularity detection.
//! - [`angular`], [`birkhoff`]: the two billiard maps.
//! - [`bridge`]: orbit and integral dualization between the two systems.
//! - [`integrability`]: identity checks and certificates.
//! - [`normal_form`]: near-boundary twist/KAM coefficient diagnostics.

pub mod angular;
pub mod birkhoff;
pub mod bridge;
pub mod curve;
pub mod geometry;
pub mod integrability;
pub mod io;
pub mod normal_form;
pub mod poly;
pub mod render;
pub mod solve;
pub mod trace;

pub use curve::{make_ellipse, make_fermat_oval, make_offset_circle, make_trig_poly, SupportCurve};
pub use geometry::{OrientedLine, PlanePoint};
pub use poly::BivariatePoly;
