//! Network-trigger detection: which call sites start network requests,
//! through which HTTP library, synchronously or asynchronously.
//!
//! Attribution is import-driven: a unit must import a supported library
//! before any of its calls can be a trigger for it (HttpURLConnection may
//! alternatively show up as a declared receiver type). `add` is gated on
//! request-queue receiver evidence because the bare name collides with
//! collection APIs.

use std::fmt;

use crate::par;
use crate::project::ProjectModel;
use crate::source::{CallSite, SourceUnit};

/// Supported HTTP libraries. Variant order is the lexicographic order of
/// the display names — ambiguity resolution picks the smallest.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum LibraryId {
    HttpURLConnection,
    OkHttp,
    Retrofit,
    Volley,
}

impl fmt::Display for LibraryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LibraryId::HttpURLConnection => "HttpURLConnection",
            LibraryId::OkHttp => "OkHttp",
            LibraryId::Retrofit => "Retrofit",
            LibraryId::Volley => "Volley",
        })
    }
}

/// Whether a trigger blocks the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TriggerFlavor {
    Asynchronous,
    Synchronous,
}

impl fmt::Display for TriggerFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriggerFlavor::Asynchronous => "asynchronous",
            TriggerFlavor::Synchronous => "synchronous",
        })
    }
}

/// Per-library API surface the rules consult.
#[derive(Debug, Clone)]
pub struct LibraryProfile {
    pub library: LibraryId,
    /// Import prefixes; a trailing `.` means "whole package", otherwise
    /// the prefix names a class (wildcard imports of its package match).
    pub import_prefixes: &'static [&'static str],
    pub trigger_methods: &'static [(&'static str, TriggerFlavor)],
    /// Callback method names opening a response region (empty for Volley,
    /// whose listener is positional, and HttpURLConnection, which has no
    /// callbacks at all).
    pub response_callback_names: &'static [&'static str],
    /// Payload accessors (empty for Volley: the body IS the listener's
    /// payload parameter).
    pub body_access_names: &'static [&'static str],
    pub code_access_names: &'static [&'static str],
    /// Failure-handling surface; empty for HttpURLConnection, where
    /// try/catch enclosure is the failure handler.
    pub failure_handler_names: &'static [&'static str],
}

/// The four built-in library profiles.
pub fn builtin_profiles() -> Vec<LibraryProfile> {
    vec![
        LibraryProfile {
            library: LibraryId::HttpURLConnection,
            import_prefixes: &["java.net.HttpURLConnection", "java.net.URL"],
            trigger_methods: &[("openConnection", TriggerFlavor::Synchronous)],
            response_callback_names: &[],
            body_access_names: &["getResponseMessage", "getInputStream"],
            code_access_names: &["getResponseCode"],
            failure_handler_names: &[],
        },
        LibraryProfile {
            library: LibraryId::OkHttp,
            import_prefixes: &["okhttp3."],
            trigger_methods: &[
                ("enqueue", TriggerFlavor::Asynchronous),
                ("execute", TriggerFlavor::Synchronous),
            ],
            response_callback_names: &["onResponse"],
            body_access_names: &["body"],
            code_access_names: &["code", "isSuccessful"],
            failure_handler_names: &["onFailure"],
        },
        LibraryProfile {
            library: LibraryId::Retrofit,
            import_prefixes: &["retrofit2."],
            trigger_methods: &[
                ("enqueue", TriggerFlavor::Asynchronous),
                ("execute", TriggerFlavor::Synchronous),
            ],
            response_callback_names: &["onResponse"],
            body_access_names: &["body"],
            // retrofit2.Response also exposes isSuccessful(); only code()
            // is credited as a status check here, deliberately stricter
            // than the real API surface.
            code_access_names: &["code"],
            failure_handler_names: &["onFailure"],
        },
        LibraryProfile {
            library: LibraryId::Volley,
            import_prefixes: &["com.android.volley"],
            trigger_methods: &[("add", TriggerFlavor::Asynchronous)],
            response_callback_names: &[],
            body_access_names: &[],
            code_access_names: &["statusCode"],
            failure_handler_names: &["ErrorListener"],
        },
    ]
}

/// Look up one profile.
pub fn profile(library: LibraryId) -> LibraryProfile {
    builtin_profiles()
        .into_iter()
        .find(|p| p.library == library)
        .expect("all library ids have profiles")
}

/// Does `import` fall under `prefix`? Package prefixes (trailing `.`)
/// match by prefix; class prefixes match the class itself, its nested
/// names, or a wildcard import of its package.
pub(crate) fn import_matches(import: &str, prefix: &str) -> bool {
    if let Some(_pkg) = prefix.strip_suffix('.') {
        return import.starts_with(prefix);
    }
    if import == prefix {
        return true;
    }
    if import.len() > prefix.len()
        && import.starts_with(prefix)
        && import.as_bytes()[prefix.len()] == b'.'
    {
        return true;
    }
    if let Some(dot) = prefix.rfind('.') {
        if import == format!("{}.*", &prefix[..dot]) {
            return true;
        }
    }
    false
}

/// Which libraries a unit demonstrably uses.
pub fn detect_library_usage(unit: &SourceUnit) -> Vec<LibraryId> {
    let mut found: Vec<LibraryId> = Vec::new();
    for p in builtin_profiles() {
        let by_import = unit
            .imports
            .iter()
            .any(|imp| p.import_prefixes.iter().any(|pre| import_matches(imp, pre)));
        let by_receiver = p.library == LibraryId::HttpURLConnection
            && unit.all_calls().any(|c| {
                c.receiver_hint
                    .as_deref()
                    .is_some_and(|h| h.contains("HttpURLConnection"))
            });
        if by_import || by_receiver {
            found.push(p.library);
        }
    }
    found
}

/// One network operation trigger.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTrigger {
    pub call: CallSite,
    pub library: LibraryId,
    pub flavor: TriggerFlavor,
    /// Other libraries whose trigger set also matched this call.
    pub alternates: Vec<LibraryId>,
    /// Qualified name of the method containing the call; `None` for
    /// initializer or top-level code.
    pub enclosing_method: Option<String>,
}

fn volley_receiver_ok(call: &CallSite) -> bool {
    let has = |s: &Option<String>| {
        s.as_deref()
            .is_some_and(|t| t.contains("RequestQueue") || t.contains("newRequestQueue"))
    };
    has(&call.receiver_hint) || has(&call.receiver_raw)
}

fn triggers_in_unit(unit: &SourceUnit) -> Vec<NetworkTrigger> {
    let libs = detect_library_usage(unit);
    if libs.is_empty() {
        return Vec::new();
    }
    let profiles: Vec<LibraryProfile> = builtin_profiles()
        .into_iter()
        .filter(|p| libs.contains(&p.library))
        .collect();

    let mut out: Vec<NetworkTrigger> = Vec::new();
    for call in unit.all_calls() {
        if call.is_member_access || call.is_constructor {
            continue;
        }
        let mut matches: Vec<(LibraryId, TriggerFlavor)> = Vec::new();
        for p in &profiles {
            for (name, flavor) in p.trigger_methods {
                if *name != call.callee_name {
                    continue;
                }
                if p.library == LibraryId::Volley && !volley_receiver_ok(call) {
                    continue;
                }
                matches.push((p.library, *flavor));
            }
        }
        if matches.is_empty() {
            continue;
        }
        matches.sort();
        let (library, flavor) = matches[0];
        out.push(NetworkTrigger {
            call: call.clone(),
            library,
            flavor,
            alternates: matches[1..].iter().map(|(l, _)| *l).collect(),
            enclosing_method: unit
                .enclosing_method(&call.location)
                .map(|m| m.qualified_name.clone()),
        });
    }
    out.sort_by(|a, b| a.call.location.cmp(&b.call.location));
    out
}

/// All network triggers in the project, ordered by location (units are
/// already path-sorted, so the result is deterministic).
pub fn find_network_triggers(project: &ProjectModel) -> Vec<NetworkTrigger> {
    par::map_vec(&project.units, triggers_in_unit)
        .into_iter()
        .flatten()
        .collect()
}
