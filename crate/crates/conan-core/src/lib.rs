//! Static detection of Internet-connectivity issues in Android application
//! projects.
//!
//! The analysis pipeline is: discover the project layout on disk, parse the
//! Android manifest and every Java/Kotlin source file into a normalized
//! source model, classify network operation triggers per HTTP library, run
//! the sixteen detection rules, and serialize the findings as JSON or HTML.
//!
//! Everything operates on immutable models; with the `parallel` feature
//! (default) file parsing and per-unit analysis fan out across threads.

pub mod error;
pub mod evalkit;
pub mod location;
pub mod manifest;
pub mod project;
pub mod report;
pub mod rules;
pub mod source;
pub mod triggers;

mod par;

pub use error::ConanError;
pub use location::SourceLocation;
pub use manifest::ManifestModel;
pub use project::{ProjectLayout, ProjectModel};
pub use report::Report;
pub use rules::{Finding, RuleConfig, RuleId};
pub use source::{CallSite, Language, MethodModel, SourceUnit};
pub use triggers::{LibraryId, NetworkTrigger, TriggerFlavor};

/// Version string embedded in reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
