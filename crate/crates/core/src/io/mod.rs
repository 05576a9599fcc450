//! Scheme files and the on-disk best-scheme registry.

mod file;
mod store;

pub use file::{parse, parse_file, serialize, InvariantsBlock, Provenance, SchemeFile};
pub use store::{
    file_name, parse_file_name, registry_load, registry_store, store_scheme, LoadWarning,
};
