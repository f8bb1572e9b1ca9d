//! Real-time cockpit server for riskhud sessions.

pub mod server;

pub use server::{Ending, ServeError, ServeReport, Server};
