//! Weak Birkhoff normal form around finitely many tangential sites.
//!
//! The quartic part of the mKdV Hamiltonian is normalized by the time-1 flow
//! of a quartic generator supported on mode quadruples with at least three
//! indices among the tangential sites. Everything here lives on a
//! finite-dimensional mode window, so the flow is an ODE in a few complex
//! coordinates and the transformation is the identity outside that window.

mod flow;
mod generator;
mod normal_form;
mod sites;

pub use flow::{flow_jacobian_defect, Direction, FlowError, WindowJacobian};
pub use generator::BirkhoffGenerator;
pub use normal_form::{quartic_part, verify_normal_form, NormalFormError, NormalFormReport};
pub use sites::{admissible, cube_identity, Admissibility, CubeError, SiteError, SiteSet};
