//! Lie point symmetry analysis for scalar second-order PDEs in two
//! independent variables.
//!
//! The pipeline runs from symbolic expressions ([`expr`]) through jet-space
//! bookkeeping ([`jet`]) to determining equations and their polynomial
//! solutions ([`symmetry`]), then analyses the resulting algebra
//! ([`liealg`], [`adjoint`]) and checks solutions and reductions
//! ([`solutions`]). [`report`] runs everything against the Born-Infeld
//! fixtures.

pub mod adjoint;
pub mod expr;
pub mod fixture;
pub mod jet;
pub mod liealg;
pub mod linalg;
pub mod report;
pub mod solutions;
pub mod symmetry;
