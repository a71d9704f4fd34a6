//! Runs the guide's code samples as doc-tests.

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/circuits.md")]
pub struct Circuits;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/formulas.md")]
pub struct Formulas;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/squeezing.md")]
pub struct Squeezing;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/nechiporuk.md")]
pub struct Nechiporuk;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/counting.md")]
pub struct Counting;
