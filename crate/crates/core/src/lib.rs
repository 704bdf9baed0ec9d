//! Parametrized sub-quadratic `k`-Diameter for graphs of bounded distance
//! VC-dimension.
//!
//! The crate contains three deciders for "is `diam(G) <= k`?":
//!
//! * [`graph::k_diameter_naive`], all-pairs BFS, the oracle everything else is
//!   checked against;
//! * [`explicit::k_diameter_explicit`], which grows interval-encoded balls
//!   over an explicitly stored sparse graph;
//! * [`implicit::k_diameter_implicit`], which grows delta-encoded balls over
//!   any [`nsds::NeighbourSets`] implementation. [`plane::GeometricNeighbourSets`]
//!   supplies one for intersection graphs of translates of a convex polygon
//!   (unit squares included) without ever listing their edges.
//!
//! Both fast deciders rely on vertex orders under which consecutive balls
//! differ little; those come from the randomized sampling construction in
//! [`order`].
//!
//! ```
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//! use vcdiam::graph::{k_diameter_naive, Graph};
//! use vcdiam::explicit::k_diameter_explicit;
//!
//! // A 6-cycle has diameter 3.
//! let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! assert!(!k_diameter_explicit(&g, 2, 2, &mut rng).unwrap());
//! assert!(k_diameter_explicit(&g, 3, 2, &mut rng).unwrap());
//! assert!(k_diameter_naive(&g, 3).unwrap());
//! ```

pub mod error;
pub mod explicit;
pub mod fingerprint;
pub mod geometry;
pub mod graph;
pub mod implicit;
pub mod instances;
pub mod interval;
pub mod nsds;
pub mod order;
pub mod plane;
pub mod stripe;

pub use error::{Error, Result};

/// Book chapters, compiled as doctests so the guide never drifts from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/balls.md")]
    mod balls {}
    #[doc = include_str!("../../../book/src/orders.md")]
    mod orders {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    mod intervals {}
    #[doc = include_str!("../../../book/src/neighbour_sets.md")]
    mod neighbour_sets {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/stripes.md")]
    mod stripes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
