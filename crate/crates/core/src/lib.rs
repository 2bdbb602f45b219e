//! Exact-arithmetic toolkit for tropical fans.
//!
//! Everything here is computed over arbitrary-precision integers and
//! rationals; there is no floating point and no numerical tolerance.
//!
//! * [`linalg`]: integer and rational matrices, Hermite and Smith normal
//!   forms, lattices, saturation, indices.
//! * [`fan`]: rational polyhedral cones with dual descriptions, fans,
//!   standard fans, products and intersections.
//! * [`tropical`]: weighted and marked fans, the balancing condition,
//!   refinements, equivalence, irreducibility certificates.
//! * [`morphism`]: morphisms of fans, image fans with induced weights,
//!   preimages, multiplicities, degrees.
//! * [`moduli`]: the moduli fan of abstract rational tropical curves,
//!   forgetful maps, parameterized stable maps, evaluation maps.
//! * [`enumeration`]: counting rational tropical curves through generic
//!   point and subspace constraints, with cross-ratio style targets.

pub mod enumeration;
pub mod fan;
pub mod json;
pub mod linalg;
pub mod moduli;
pub mod morphism;
pub mod tropical;
