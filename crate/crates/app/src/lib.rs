//! The `poncelet` command-line tool and HTTP service.

mod cli;
mod server;

pub use cli::{classification_json, run, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE};
pub use server::{router, serve};
