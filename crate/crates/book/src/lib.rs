//! Runs the code blocks of the guide in `book/` as doc-tests, one module
//! per chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}
#[doc = include_str!("../../../book/src/elements.md")]
pub mod elements {}
#[doc = include_str!("../../../book/src/bubbles.md")]
pub mod bubbles {}
#[doc = include_str!("../../../book/src/mesh.md")]
pub mod mesh {}
#[doc = include_str!("../../../book/src/complexes.md")]
pub mod complexes {}
#[doc = include_str!("../../../book/src/schemes.md")]
pub mod schemes {}
#[doc = include_str!("../../../book/src/bench.md")]
pub mod bench {}
