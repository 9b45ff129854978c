//! Construction of Bishop-type pseudoholomorphic discs attached to a totally
//! real wedge edge in an almost complex chart, and the plurisubharmonicity
//! machinery used to reason about them.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`geometry`] — almost complex structures as complex matrix fields
//!    `A(z)`, coordinate normalizations, wedge truncation and edge flattening.
//! 2. [`disc_ops`] — function spaces on the closed unit disc and the three
//!    integral operators: Cauchy transform `K`, Schwarz integral `S`, and the
//!    Cauchy-Green transform `T` solving `∂̄u = f`.
//! 3. [`bishop`] — the model holomorphic disc family and the Picard solver
//!    for the Bishop-type integral equation producing discs glued to the
//!    edge along the upper semicircle.
//! 4. [`family`] — parameter sweeps, the evaluation map `(c, t) ↦ z(0)`, its
//!    Newton inversion, and covering certification of a truncated wedge.
//! 5. [`psh`] — Levi forms, plurisubharmonicity certificates, subharmonicity
//!    of compositions `u ∘ z`, and the quantitative boundary-uniqueness bound.

pub mod bishop;
pub mod disc_ops;
pub mod family;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod poly;
pub mod psh;

pub use num_complex::Complex64;
