//! Command-line front end for the engine: expression parsing, the family
//! registry file format, report rendering and the command dispatcher.

pub mod commands;
pub mod doc;
pub mod expr;
pub mod registry;
