//! pcoh — an exact-arithmetic engine for mod-p cohomology of finite p-groups.
//!
//! The crate computes with the standard (bar) resolution and its cup product,
//! semidirect-product and tensor double complexes, the column-filtration
//! spectral sequence, twisted abelian p-groups, Leedham-Green style
//! constructible groups, uniserial p-adic lattices at finite precision and
//! the universal zig-zag models `U(p,d)` / `U(p,d,n)` with their P-actions.
//! All arithmetic is over F_p and every verification is an exact matrix or
//! element identity; nothing is floating point and nothing is approximate.
//!
//! Entry points by theme:
//!
//! * [`fplinalg`] — sparse/dense elimination over F_p (ranks, kernels,
//!   solves, subquotients) with deterministic pivoting.
//! * [`groups`] — finite p-group constructions (abelian, twisted, semidirect,
//!   wreath, cocycle extensions, Baer sums, constructible data) and the
//!   predicates powerful / p-central / nilpotency class / sectional rank.
//! * [`lattices`] — finite-precision p-adic lattices, the standard uniserial
//!   action, uniserial filtrations and integral liftings.
//! * [`homalg`] — bar cochain complexes, cup products, double complexes and
//!   their total complexes, Nakaoka dimensions.
//! * [`spectra`] — spectral sequences of first-quadrant double complexes and
//!   bigraded algebras of the column filtration.
//! * [`zigzag`] — the universal models and the quasi-isomorphisms out of
//!   them, P-invariance checks, and the twisted zig-zag witness verifier.
//! * [`rings`] — truncated graded-ring extraction and isomorphism search.
//! * [`scenario`] — scenario files, reports and the bundled suites behind
//!   the `pcoh` command-line tool.
//!
//! The `examples/` directory contains one runnable program per capability;
//! `tests/acceptance.rs` runs the full verification suite.

pub mod error;
pub mod fp;
pub mod fplinalg;
pub mod groups;
pub mod homalg;
pub mod lattices;
pub mod rings;
pub mod scenario;
pub mod spectra;
pub mod zigzag;
