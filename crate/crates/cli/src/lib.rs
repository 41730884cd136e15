//! Command-line front end for `kwitness`: file formats, corpus generation,
//! an independent reference oracle and the self-test suites.

pub mod commands;
pub mod corpus;
pub mod format;
pub mod oracle;
pub mod suites;
