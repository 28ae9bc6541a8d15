//! The sixteen connectivity detection rules, grouped in six categories:
//!
//! - **CNP** — connectivity permissions missing from the manifest (INP, ACP)
//! - **CSC** — connection status never checked (NP/NM, TP/TM, IP/IM)
//! - **NMG** — no data-usage management activity (AMN)
//! - **RH** — response handling gaps (RI, RB, RC, OF)
//! - **TS** — thread-blocking or legacy scheduling (SYN, WM)
//! - **LBS** — library best practices (OK)
//!
//! Every CSC pair is mutually exclusive per run: either one project-level
//! finding (the check appears nowhere) or per-method findings (the check
//! exists but specific trigger methods cannot reach it), never both.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::location::SourceLocation;
use crate::project::ProjectModel;
use crate::source::{
    find_calls, resolve_scope, ArgTokenFilter, CallbackKind, MethodModel, SourceUnit,
};
use crate::triggers::{
    find_network_triggers, import_matches, profile, LibraryId, NetworkTrigger, TriggerFlavor,
};

/// Rule family.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleCategory {
    CNP,
    CSC,
    NMG,
    RH,
    TS,
    LBS,
}

impl fmt::Display for RuleCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleCategory::CNP => "CNP",
            RuleCategory::CSC => "CSC",
            RuleCategory::NMG => "NMG",
            RuleCategory::RH => "RH",
            RuleCategory::TS => "TS",
            RuleCategory::LBS => "LBS",
        })
    }
}

/// Granularity a rule reports at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleLevel {
    Project,
    Method,
    CallSite,
    File,
}

/// The sixteen rule identifiers. Variant order is the canonical report
/// order, so the derived `Ord` is the sort key.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    /// Internet permission not declared despite network triggers.
    INP,
    /// Access-network-state permission missing despite connectivity APIs.
    ACP,
    /// No connection status check anywhere in the project.
    NP,
    /// Method triggers a request without a connection status check in scope.
    NM,
    /// No network type check anywhere in the project.
    TP,
    /// Method triggers a request without a network type check in scope.
    TM,
    /// No Internet capability check anywhere in the project.
    IP,
    /// Method triggers a request without an Internet capability check in scope.
    IM,
    /// No activity lets the user manage network usage.
    AMN,
    /// Response callback not implemented for an asynchronous trigger.
    RI,
    /// Response body used without a null check.
    RB,
    /// HTTP status code never verified.
    RC,
    /// Failure handling missing (no failure callback / no real catch).
    OF,
    /// Synchronous network request.
    SYN,
    /// Legacy job scheduler API instead of WorkManager.
    WM,
    /// More than one OkHttpClient instance.
    OK,
}

impl RuleId {
    pub const ALL: [RuleId; 16] = [
        RuleId::INP,
        RuleId::ACP,
        RuleId::NP,
        RuleId::NM,
        RuleId::TP,
        RuleId::TM,
        RuleId::IP,
        RuleId::IM,
        RuleId::AMN,
        RuleId::RI,
        RuleId::RB,
        RuleId::RC,
        RuleId::OF,
        RuleId::SYN,
        RuleId::WM,
        RuleId::OK,
    ];

    pub fn category(self) -> RuleCategory {
        match self {
            RuleId::INP | RuleId::ACP => RuleCategory::CNP,
            RuleId::NP | RuleId::NM | RuleId::TP | RuleId::TM | RuleId::IP | RuleId::IM => {
                RuleCategory::CSC
            }
            RuleId::AMN => RuleCategory::NMG,
            RuleId::RI | RuleId::RB | RuleId::RC | RuleId::OF => RuleCategory::RH,
            RuleId::SYN | RuleId::WM => RuleCategory::TS,
            RuleId::OK => RuleCategory::LBS,
        }
    }

    pub fn level(self) -> RuleLevel {
        match self {
            RuleId::INP
            | RuleId::ACP
            | RuleId::NP
            | RuleId::TP
            | RuleId::IP
            | RuleId::AMN
            | RuleId::OK => RuleLevel::Project,
            RuleId::NM | RuleId::TM | RuleId::IM => RuleLevel::Method,
            RuleId::RI | RuleId::RB | RuleId::RC | RuleId::OF | RuleId::SYN => RuleLevel::CallSite,
            RuleId::WM => RuleLevel::File,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<RuleId, String> {
        let up = s.trim().to_ascii_uppercase();
        RuleId::ALL
            .into_iter()
            .find(|r| r.to_string() == up)
            .ok_or_else(|| format!("unknown rule id: {s}"))
    }
}

/// All findings share one severity; context-adaptive severity is out of
/// scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Warning,
}

/// One reported issue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: RuleId,
    pub category: RuleCategory,
    pub severity: Severity,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub library: Option<LibraryId>,
    /// Non-empty, sorted, deduplicated.
    pub locations: Vec<SourceLocation>,
}

impl Finding {
    fn new(
        rule: RuleId,
        message: String,
        library: Option<LibraryId>,
        mut locations: Vec<SourceLocation>,
    ) -> Finding {
        locations.sort();
        locations.dedup();
        debug_assert!(!locations.is_empty(), "findings must carry a location");
        Finding {
            rule,
            category: rule.category(),
            severity: Severity::Warning,
            message,
            library,
            locations,
        }
    }
}

/// What to run and how far call chains are followed.
#[derive(Debug, Clone)]
pub struct RuleConfig {
    pub enabled_rules: BTreeSet<RuleId>,
    /// Call-chain hops followed when resolving a trigger's scope.
    pub interprocedural_depth: u32,
    pub include_tests: bool,
}

impl Default for RuleConfig {
    fn default() -> RuleConfig {
        RuleConfig {
            enabled_rules: RuleId::ALL.into_iter().collect(),
            interprocedural_depth: 3,
            include_tests: false,
        }
    }
}

fn unit_of<'p>(project: &'p ProjectModel, path: &str) -> Option<&'p SourceUnit> {
    project.units.iter().find(|u| u.path == path)
}

fn trigger_locations(triggers: &[NetworkTrigger]) -> Vec<SourceLocation> {
    triggers.iter().map(|t| t.call.location.clone()).collect()
}

/// Connectivity-permission rules (INP, ACP).
pub fn detect_cnp(project: &ProjectModel, triggers: &[NetworkTrigger]) -> Vec<Finding> {
    let mut out = Vec::new();

    if !triggers.is_empty()
        && !project
            .manifest
            .has_permission("android.permission.INTERNET")
    {
        out.push(Finding::new(
            RuleId::INP,
            "Network requests are triggered but android.permission.INTERNET is not declared in the manifest.".to_string(),
            None,
            trigger_locations(triggers),
        ));
    }

    let state_imports = ["android.net.ConnectivityManager", "android.net.NetworkInfo"];
    let importing: Vec<SourceLocation> = project
        .units
        .iter()
        .filter(|u| {
            u.imports
                .iter()
                .any(|imp| state_imports.iter().any(|pre| import_matches(imp, pre)))
        })
        .map(|u| SourceLocation::file_start(&u.path))
        .collect();
    if !importing.is_empty()
        && !project
            .manifest
            .has_permission("android.permission.ACCESS_NETWORK_STATE")
    {
        out.push(Finding::new(
            RuleId::ACP,
            "Connectivity state APIs are imported but android.permission.ACCESS_NETWORK_STATE is not declared in the manifest.".to_string(),
            None,
            importing,
        ));
    }

    out
}

/// Connection-status-check rules (NP/NM, TP/TM, IP/IM).
pub fn detect_csc(
    project: &ProjectModel,
    triggers: &[NetworkTrigger],
    config: &RuleConfig,
) -> Vec<Finding> {
    if triggers.is_empty() {
        return Vec::new();
    }

    type ArgFilter = fn(&[String]) -> bool;
    fn internet_capability(args: &[String]) -> bool {
        args.iter()
            .any(|t| t == "NET_CAPABILITY_INTERNET" || t == "NET_CAPABILITY_VALIDATED")
    }

    struct Pair {
        names: &'static [&'static str],
        filter: Option<ArgFilter>,
        project_rule: RuleId,
        method_rule: RuleId,
        what: &'static str,
    }
    let pairs = [
        Pair {
            names: &["isConnected", "onAvailable"],
            filter: None,
            project_rule: RuleId::NP,
            method_rule: RuleId::NM,
            what: "connection status check (isConnected/onAvailable)",
        },
        Pair {
            names: &["getType", "hasTransport"],
            filter: None,
            project_rule: RuleId::TP,
            method_rule: RuleId::TM,
            what: "network type check (getType/hasTransport)",
        },
        Pair {
            names: &["hasCapability"],
            filter: Some(internet_capability),
            project_rule: RuleId::IP,
            method_rule: RuleId::IM,
            what: "Internet capability check (hasCapability)",
        },
    ];

    // Trigger-enclosing methods, each with its trigger locations. Keyed by
    // the method's own span, which is unique within a file.
    let mut by_method: BTreeMap<SourceLocation, (&MethodModel, Vec<SourceLocation>)> =
        BTreeMap::new();
    for t in triggers {
        let Some(unit) = unit_of(project, &t.call.location.path) else {
            continue;
        };
        let Some(m) = unit.enclosing_method(&t.call.location) else {
            continue;
        };
        by_method
            .entry(m.location.clone())
            .or_insert_with(|| (m, Vec::new()))
            .1
            .push(t.call.location.clone());
    }

    let mut out = Vec::new();
    for pair in &pairs {
        let names: BTreeSet<&str> = pair.names.iter().copied().collect();
        let anywhere = project.units.iter().any(|u| {
            u.all_calls().any(|c| {
                names.contains(c.callee_name.as_str())
                    && pair.filter.is_none_or(|f| f(&c.arg_tokens))
            })
        });

        if !anywhere {
            out.push(Finding::new(
                pair.project_rule,
                format!(
                    "Network requests are triggered but no {} appears anywhere in the project.",
                    pair.what
                ),
                None,
                trigger_locations(triggers),
            ));
            continue;
        }

        for (method, trig_locs) in by_method.values() {
            let scope = resolve_scope(project, method, config.interprocedural_depth);
            let filter_dyn: Option<ArgTokenFilter> =
                pair.filter.as_ref().map(|f| f as ArgTokenFilter);
            if find_calls(&scope, &names, filter_dyn).is_empty() {
                out.push(Finding::new(
                    pair.method_rule,
                    format!(
                        "{} triggers a network request without {} {} in scope.",
                        method.qualified_name,
                        if pair.what.starts_with(['A', 'E', 'I', 'O', 'U']) {
                            "an"
                        } else {
                            "a"
                        },
                        pair.what
                    ),
                    None,
                    trig_locs.clone(),
                ));
            }
        }
    }
    out
}

/// Network-management rule (AMN).
pub fn detect_nmg(project: &ProjectModel, triggers: &[NetworkTrigger]) -> Vec<Finding> {
    if triggers.is_empty()
        || project
            .manifest
            .has_intent_action("android.intent.action.MANAGE_NETWORK_USAGE")
    {
        return Vec::new();
    }
    let mut locations = vec![SourceLocation::file_start(&project.layout.manifest_path)];
    locations.extend(trigger_locations(triggers));
    vec![Finding::new(
        RuleId::AMN,
        "No activity declares an intent filter for android.intent.action.MANAGE_NETWORK_USAGE, so users cannot manage the app's network usage.".to_string(),
        None,
        locations,
    )]
}

/// Response-handling rules (RI, RB, RC, OF) for one project.
pub fn detect_rh(project: &ProjectModel, triggers: &[NetworkTrigger]) -> Vec<Finding> {
    let mut out = Vec::new();
    for t in triggers {
        let Some(unit) = unit_of(project, &t.call.location.path) else {
            continue;
        };
        let prof = profile(t.library);
        let method = unit.enclosing_method(&t.call.location);
        // Scope for positional callbacks and synchronous response use: the
        // enclosing method's body, or the whole file for top-level code.
        let method_span = method
            .map(|m| m.body_location.clone())
            .unwrap_or_else(|| SourceLocation::new(&unit.path, 1, 1, u32::MAX, u32::MAX));

        let body_names: BTreeSet<&str> = prof.body_access_names.iter().copied().collect();
        let code_names: BTreeSet<&str> = prof.code_access_names.iter().copied().collect();
        let code_checked_in = |region: &SourceLocation| {
            unit.all_calls().any(|c| {
                code_names.contains(c.callee_name.as_str())
                    && c.inside_decision
                    && region.contains(&c.location)
            })
        };
        let push_rb_in = |out: &mut Vec<Finding>, region: &SourceLocation| {
            for c in unit.all_calls() {
                if body_names.contains(c.callee_name.as_str())
                    && region.contains(&c.location)
                    && !c.guarded_by_null_check
                {
                    out.push(Finding::new(
                        RuleId::RB,
                        format!(
                            "Response body {}() is used without a null check ({}).",
                            c.callee_name, t.library
                        ),
                        Some(t.library),
                        vec![c.location.clone()],
                    ));
                }
            }
        };
        let rc_finding = || {
            Finding::new(
                RuleId::RC,
                format!(
                    "The HTTP status code is never verified for the {} request {}().",
                    t.library, t.call.callee_name
                ),
                Some(t.library),
                vec![t.call.location.clone()],
            )
        };

        let asynchronous = t.flavor == TriggerFlavor::Asynchronous;
        match t.library {
            LibraryId::Retrofit | LibraryId::OkHttp if asynchronous => {
                // Callbacks live in the trigger's own argument list.
                let responses: Vec<&SourceLocation> = unit
                    .callback_regions
                    .iter()
                    .filter(|r| {
                        r.kind == CallbackKind::Response && t.call.location.contains(&r.location)
                    })
                    .map(|r| &r.location)
                    .collect();
                if responses.is_empty() {
                    // Missing response callback pre-empts body/code checks.
                    out.push(Finding::new(
                        RuleId::RI,
                        format!(
                            "{} request {}() has no response callback implementation.",
                            t.library, t.call.callee_name
                        ),
                        Some(t.library),
                        vec![t.call.location.clone()],
                    ));
                } else {
                    for r in &responses {
                        push_rb_in(&mut out, r);
                    }
                    if !responses.iter().any(|r| code_checked_in(r)) {
                        out.push(rc_finding());
                    }
                }
                let has_failure = unit.callback_regions.iter().any(|r| {
                    r.kind == CallbackKind::Failure && t.call.location.contains(&r.location)
                });
                if !has_failure {
                    out.push(Finding::new(
                        RuleId::OF,
                        format!(
                            "{} request {}() has no failure handler (onFailure).",
                            t.library, t.call.callee_name
                        ),
                        Some(t.library),
                        vec![t.call.location.clone()],
                    ));
                }
            }
            LibraryId::Volley => {
                // Listeners are positional constructor arguments, wired up
                // somewhere in the same method as the queue.add() call.
                let responses: Vec<_> = unit
                    .callback_regions
                    .iter()
                    .filter(|r| {
                        r.kind == CallbackKind::Response && method_span.contains(&r.location)
                    })
                    .collect();
                let errors: Vec<_> = unit
                    .callback_regions
                    .iter()
                    .filter(|r| {
                        r.kind == CallbackKind::ErrorListener && method_span.contains(&r.location)
                    })
                    .collect();
                if responses.is_empty() {
                    out.push(Finding::new(
                        RuleId::RI,
                        format!(
                            "{} request {}() has no response listener implementation.",
                            t.library, t.call.callee_name
                        ),
                        Some(t.library),
                        vec![t.call.location.clone()],
                    ));
                } else {
                    // The Volley response body IS the listener's payload
                    // parameter.
                    for r in &responses {
                        if !r.payload_null_guarded {
                            for use_loc in &r.payload_uses {
                                let param = r.payload_param.as_deref().unwrap_or("it").to_string();
                                out.push(Finding::new(
                                    RuleId::RB,
                                    format!(
                                        "Volley response payload '{param}' is used without a null check."
                                    ),
                                    Some(t.library),
                                    vec![use_loc.clone()],
                                ));
                            }
                        }
                    }
                    let checked = responses
                        .iter()
                        .map(|r| &r.location)
                        .chain(errors.iter().map(|r| &r.location))
                        .any(&code_checked_in);
                    if !checked {
                        out.push(rc_finding());
                    }
                }
                if errors.is_empty() {
                    out.push(Finding::new(
                        RuleId::OF,
                        format!(
                            "{} request {}() has no failure handler (ErrorListener).",
                            t.library, t.call.callee_name
                        ),
                        Some(t.library),
                        vec![t.call.location.clone()],
                    ));
                }
            }
            _ => {
                // Synchronous triggers (execute, openConnection): the
                // response is consumed in the enclosing method.
                push_rb_in(&mut out, &method_span);
                if !code_checked_in(&method_span) {
                    out.push(rc_finding());
                }
                if !t.call.inside_try_with_nonempty_catch {
                    out.push(Finding::new(
                        RuleId::OF,
                        format!(
                            "Synchronous {} request {}() is not wrapped in a try/catch with a non-empty catch block.",
                            t.library, t.call.callee_name
                        ),
                        Some(t.library),
                        vec![t.call.location.clone()],
                    ));
                }
            }
        }
    }
    out
}

/// Thread-and-scheduling rules (SYN, WM).
pub fn detect_ts(project: &ProjectModel, triggers: &[NetworkTrigger]) -> Vec<Finding> {
    let mut out = Vec::new();
    for t in triggers {
        if t.flavor == TriggerFlavor::Synchronous {
            out.push(Finding::new(
                RuleId::SYN,
                format!(
                    "Synchronous network request {}() blocks the calling thread ({}).",
                    t.call.callee_name, t.library
                ),
                Some(t.library),
                vec![t.call.location.clone()],
            ));
        }
    }

    let legacy = ["FirebaseJobDispatcher", "GcmNetworkManager", "JobScheduler"];
    for unit in &project.units {
        let mut present: Vec<&str> = legacy
            .iter()
            .copied()
            .filter(|name| {
                unit.imports
                    .iter()
                    .any(|imp| imp == name || imp.ends_with(&format!(".{name}")))
            })
            .collect();
        present.sort_unstable();
        if !present.is_empty() {
            out.push(Finding::new(
                RuleId::WM,
                format!(
                    "Legacy job scheduling API imported ({}); migrate to WorkManager.",
                    present.join(", ")
                ),
                None,
                vec![SourceLocation::file_start(&unit.path)],
            ));
        }
    }
    out
}

/// Library-best-practice rule (OK).
pub fn detect_lbs(project: &ProjectModel) -> Vec<Finding> {
    let ctors: Vec<SourceLocation> = project
        .units
        .iter()
        .flat_map(|u| u.all_calls())
        .filter(|c| c.is_constructor && c.callee_name == "OkHttpClient")
        .map(|c| c.location.clone())
        .collect();
    if ctors.len() >= 2 {
        vec![Finding::new(
            RuleId::OK,
            format!(
                "{} OkHttpClient instances are constructed; reuse a single shared client.",
                ctors.len()
            ),
            Some(LibraryId::OkHttp),
            ctors,
        )]
    } else {
        Vec::new()
    }
}

/// Run every enabled rule over the project: detect triggers, evaluate the
/// six categories, then sort by (rule, locations, message) and collapse
/// duplicates sharing rule and location set.
pub fn evaluate(project: &ProjectModel, config: &RuleConfig) -> Vec<Finding> {
    let triggers = find_network_triggers(project);

    let mut findings = Vec::new();
    findings.extend(detect_cnp(project, &triggers));
    findings.extend(detect_csc(project, &triggers, config));
    findings.extend(detect_nmg(project, &triggers));
    findings.extend(detect_rh(project, &triggers));
    findings.extend(detect_ts(project, &triggers));
    findings.extend(detect_lbs(project));

    findings.retain(|f| config.enabled_rules.contains(&f.rule));
    findings.sort_by(|a, b| {
        (a.rule, &a.locations, &a.message).cmp(&(b.rule, &b.locations, &b.message))
    });
    let mut seen: BTreeSet<(RuleId, Vec<SourceLocation>)> = BTreeSet::new();
    findings.retain(|f| seen.insert((f.rule, f.locations.clone())));
    findings
}
