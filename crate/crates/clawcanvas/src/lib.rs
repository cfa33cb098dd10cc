//! Deterministic "code as brush" toolchain.
//!
//! The crate turns structured scene records into executable, verifiable
//! canvas artifacts and traces every step:
//!
//! - [`scene`] parses, validates, and canonicalizes `*.scene.jsonl` records.
//! - [`layout`] places every object instance so relational constraints hold,
//!   and ships an independent placement checker used as the solver oracle.
//! - [`canvas`] compiles records plus layouts into a canvas IR, emits
//!   canonical SVG and HTML text layers, and parses the SVG subset back.
//! - [`verify`] checks canvases against their records and diffs canvases.
//! - [`layers`] is the layered image document: alpha compositing, edits,
//!   unedited-region masks, and masked PSNR/SSIM metrics.
//! - [`physics`] computes deterministic physical drafts (reflection, springs,
//!   efflux jets, buoyancy) and splices them into a canvas.
//! - [`pipeline`] orchestrates conceptualize -> sketch -> color -> review over
//!   pluggable tool clients with a provenance ledger and failure attribution.
//!
//! Everything here is pure and reproducible: identical inputs and seeds give
//! byte-identical artifacts.

pub mod canvas;
pub mod color;
pub mod digest;
pub mod geom;
pub mod layers;
pub mod layout;
pub mod physics;
pub mod pipeline;
pub mod rng;
pub mod scene;
pub mod testkit;
pub mod verify;

pub use color::Color;
pub use scene::SceneRecord;
