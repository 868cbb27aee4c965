//! Lie foliations with transverse group SL(n) on triangulated manifolds.
//!
//! The crate covers exact sl(n) structure constants ([`algebra`]), Iwasawa
//! and GA x S^1 decompositions ([`group`]), simplicial cochains on tori with
//! a `Z^d` covering ([`complex`], [`cochain`]), Lie G-foliation data and its
//! checks ([`foliation`]), and a constructive circle fibration from closed
//! cochains ([`tischler`]). [`report`] builds the JSON reports of the `slfol`
//! binary.

pub mod algebra;
pub mod cochain;
pub mod complex;
pub mod foliation;
pub mod group;
pub mod io;
pub mod linalg;
pub mod report;
pub mod tischler;
