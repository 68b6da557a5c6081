//! Command line front end and HTTP steering server for the search-and-rescue
//! agents in `sarhrl_core`.

pub mod server;
pub mod session;
