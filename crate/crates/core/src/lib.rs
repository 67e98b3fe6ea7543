//! A canonicity kernel for cubical type theory with the circle and
//! propositional truncation.

pub mod check;
pub mod derived;
pub mod eval;
pub mod faces;
pub mod interval;
pub mod parse;
pub mod pretty;
pub mod reduce;
pub mod subst;
pub mod syntax;
