//! Pieces of the `skodom` command-line tool that are worth testing on their
//! own: output formats, the SVG emitter, run manifests and `verify`.

pub mod format;
pub mod manifest;
pub mod svg;
pub mod verify;
