pub mod assemble;
pub mod infer;
pub mod owl;
pub mod skos;
pub mod rdf;
pub mod sssom;
pub mod store;
mod digest;
mod unionfind;
mod warning;

pub use digest::sha256_hex;
pub use warning::Warning;
