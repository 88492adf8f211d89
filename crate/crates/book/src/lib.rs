//! The guide in `book/`, compiled so that every snippet runs as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/amplification.md")]
pub mod amplification {}

#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}

#[doc = include_str!("../../../book/src/recovery.md")]
pub mod recovery {}

#[doc = include_str!("../../../book/src/offset.md")]
pub mod offset {}

#[doc = include_str!("../../../book/src/workfactor.md")]
pub mod workfactor {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
