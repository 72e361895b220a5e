//! Stick-knot files, mesh export and session documents.

pub mod export;
pub mod knot_file;
pub mod session;

pub use export::{export_mesh, read_obj, write_obj, write_ply, write_witness_obj, MeshFormat};
pub use knot_file::{parse_stick_knot, parse_stick_knot_unchecked, serialize_stick_knot, KnotRecord};
pub use session::{load_session, save_session, SessionDocument, SESSION_FORMAT_VERSION};
