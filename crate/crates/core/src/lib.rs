//! Natural frequencies of thin circular nano-arches and rings with edge
//! cracks and thickness steps, under a nonlocal (Eringen) Euler-Bernoulli
//! model with rotational-spring crack joints.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod eigensolve;
pub mod fracture;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod segment;
