//! Normalized source model for Java and Kotlin files.
//!
//! Both languages flow through the same lexer/scanner pair into one set of
//! facts — imports, methods, call sites, guards, try/catch coverage and
//! callback regions — so every detection rule is written once and applies
//! to either language.
//!
//! # Null-guard contract
//!
//! `guarded_by_null_check` is computed from direct syntactic enclosure or
//! immediate result-variable guarding only:
//!
//! 1. **Condition** — the call occurs inside the condition region of an
//!    `if`/`while`/`when` subject/`when` branch/ternary whose tokens include
//!    `null`.
//! 2. **SafeAccess** — the call is immediately followed by `?.` or `?:`
//!    (Kotlin).
//! 3. **ResultVariable** — the call occurs in the right-hand side of a
//!    `name = …` binding, and the first later mention of `name` inside the
//!    same method body is null-compared (adjacent `name == null`/
//!    `name != null` in either order), safe-accessed (`name?.`/`name ?:`),
//!    or sits inside a null-mentioning condition region. Any other first
//!    use leaves the call unguarded.
//!
//! `inside_try_with_nonempty_catch` is true when any enclosing `try` in the
//! same file has at least one catch clause with a non-empty body.

mod lexer;
mod scanner;

use std::collections::BTreeSet;

use crate::error::ConanError;
use crate::location::SourceLocation;
use crate::project::ProjectModel;

use scanner::{RawScan, Span};

/// Source language of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Language {
    Java,
    Kotlin,
}

impl Language {
    /// Detect the language from a file extension, if recognized.
    pub fn from_path(path: &str) -> Option<Language> {
        match path.rsplit('.').next() {
            Some("java") => Some(Language::Java),
            Some("kt") => Some(Language::Kotlin),
            _ => None,
        }
    }
}

/// Position of a call site relative to HTTP-library callbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallbackKind {
    Response,
    Failure,
    ErrorListener,
}

/// Which branch of the null-guard contract matched (see module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullGuardKind {
    Condition,
    SafeAccess,
    ResultVariable,
}

/// One method invocation, object instantiation, or member access.
#[derive(Debug, Clone, PartialEq)]
pub struct CallSite {
    /// Simple method or type name.
    pub callee_name: String,
    /// Textual receiver type/name when syntactically evident: the declared
    /// type of a receiver variable, else its initializer text, else the
    /// receiver expression itself.
    pub receiver_hint: Option<String>,
    /// The receiver expression exactly as written (compressed).
    pub receiver_raw: Option<String>,
    /// Argument source tokens, flattened (capped).
    pub arg_tokens: Vec<String>,
    /// Spans from the callee name to the end of the argument list.
    pub location: SourceLocation,
    pub guarded_by_null_check: bool,
    /// Which guard branch matched, when guarded.
    pub null_guard: Option<NullGuardKind>,
    /// The call occurs inside a decision-making statement's condition
    /// region (`if`/`while` condition, `when` subject or branch, ternary).
    pub inside_decision: bool,
    pub inside_try_with_nonempty_catch: bool,
    pub inside_callback: Option<CallbackKind>,
    /// `.name` without an argument list (field/property access).
    pub is_member_access: bool,
    pub is_constructor: bool,
}

/// A `try` statement and whether any of its catch clauses does something.
#[derive(Debug, Clone, PartialEq)]
pub struct TryBlock {
    pub location: SourceLocation,
    pub catch_nonempty: bool,
    pub call_locations_covered: Vec<SourceLocation>,
}

/// One declared method (or constructor) with a body.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodModel {
    /// `Type.method`; nested types join with `.`, Kotlin top-level
    /// functions use the file facade name (`FooKt.bar`).
    pub qualified_name: String,
    pub name: String,
    /// Whole declaration: signature through body end.
    pub location: SourceLocation,
    /// The body alone (scope checks use this).
    pub body_location: SourceLocation,
    pub calls: Vec<CallSite>,
    pub constructor_calls: Vec<CallSite>,
    pub try_blocks: Vec<TryBlock>,
    /// Qualified names of project-internal methods this method invokes,
    /// resolved by simple name when the project model is assembled.
    pub callees_internal: BTreeSet<String>,
}

impl MethodModel {
    /// All call sites (invocations and instantiations) in this method.
    pub fn all_calls(&self) -> impl Iterator<Item = &CallSite> {
        self.calls.iter().chain(self.constructor_calls.iter())
    }
}

/// A recognized HTTP-library callback body (anonymous-class method,
/// object-expression method, or listener lambda).
#[derive(Debug, Clone, PartialEq)]
pub struct CallbackRegion {
    pub kind: CallbackKind,
    pub location: SourceLocation,
    /// The response/error parameter name ("it" for bare lambdas).
    pub payload_param: Option<String>,
    /// Mentions of the payload parameter inside the region.
    pub payload_uses: Vec<SourceLocation>,
    /// True when any payload mention is null-compared or safe-accessed.
    pub payload_null_guarded: bool,
}

/// One parsed source file.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    /// Project-relative path with forward slashes.
    pub path: String,
    pub language: Language,
    /// Imported names exactly as written (wildcards keep the trailing
    /// `.*`; `static`/aliases dropped).
    pub imports: BTreeSet<String>,
    pub types_declared: Vec<String>,
    pub methods: Vec<MethodModel>,
    /// Calls in field/property initializers, initializer blocks and Kotlin
    /// top-level code — everything outside any method body.
    pub top_level_calls: Vec<CallSite>,
    pub callback_regions: Vec<CallbackRegion>,
    pub diagnostics: Vec<String>,
}

impl SourceUnit {
    /// Every call site in the unit.
    pub fn all_calls(&self) -> impl Iterator<Item = &CallSite> {
        self.methods
            .iter()
            .flat_map(|m| m.all_calls())
            .chain(self.top_level_calls.iter())
    }

    /// The innermost method whose body contains `loc`.
    pub fn enclosing_method(&self, loc: &SourceLocation) -> Option<&MethodModel> {
        self.methods
            .iter()
            .filter(|m| contains_loc(&m.body_location, loc))
            .min_by_key(|m| span_size(&m.body_location))
    }
}

fn contains_loc(outer: &SourceLocation, inner: &SourceLocation) -> bool {
    (outer.line, outer.column) <= (inner.line, inner.column)
        && (inner.end_line, inner.end_column) <= (outer.end_line, outer.end_column)
}

fn span_size(loc: &SourceLocation) -> (u32, u32) {
    (
        loc.end_line - loc.line,
        loc.end_column.wrapping_sub(loc.column),
    )
}

/// Parse one file into the normalized model.
///
/// Recovers from localized syntax problems (recording diagnostics); fails
/// with [`ConanError::FatalParse`] only when the text has plenty of tokens
/// yet no recognizable structure at all.
pub fn parse_source_unit(
    path: &str,
    text: &str,
    language: Language,
) -> Result<SourceUnit, ConanError> {
    let toks = lexer::lex(text, language);
    let file_tag = file_facade_name(path);
    let raw = scanner::scan(&toks, language, &file_tag);

    if toks.len() > 50
        && raw.types.is_empty()
        && raw.methods.is_empty()
        && raw.imports.is_empty()
        && raw.calls.is_empty()
    {
        return Err(ConanError::FatalParse(format!(
            "{path}: no recognizable structure in {} tokens",
            toks.len()
        )));
    }

    Ok(assemble_unit(path, language, &toks, raw))
}

/// `Foo.kt` → `FooKt`: the facade type name for Kotlin top-level functions.
fn file_facade_name(path: &str) -> String {
    let stem = path
        .rsplit('/')
        .next()
        .unwrap_or(path)
        .split('.')
        .next()
        .unwrap_or("File");
    let clean: String = stem
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect();
    format!("{clean}Kt")
}

fn loc(path: &str, s: &Span) -> SourceLocation {
    SourceLocation::new(path, s.sl, s.sc, s.el, s.ec)
}

fn assemble_unit(path: &str, language: Language, toks: &[lexer::Tok], raw: RawScan) -> SourceUnit {
    let RawScan {
        imports,
        types,
        methods: raw_methods,
        calls: raw_calls,
        tries: raw_tries,
        decisions,
        callbacks: raw_callbacks,
        decls,
        diagnostics,
    } = raw;

    let tok_in = |range: (usize, usize), idx: usize| range.0 <= idx && idx < range.1;

    // Innermost enclosing method (by body token range) for a token index.
    let method_of = |idx: usize| -> Option<usize> {
        raw_methods
            .iter()
            .enumerate()
            .filter(|(_, m)| tok_in(m.body_toks, idx))
            .min_by_key(|(_, m)| m.body_toks.1 - m.body_toks.0)
            .map(|(i, _)| i)
    };

    let is_null_ident = |idx: usize| {
        toks.get(idx)
            .is_some_and(|t| t.kind == lexer::TokKind::Ident && t.text == "null")
    };
    let is_cmp = |idx: usize| toks.get(idx).is_some_and(|t| t.is("==") || t.is("!="));
    let is_safe_postfix = |idx: usize| toks.get(idx).is_some_and(|t| t.is("?.") || t.is("?:"));

    // A token index is "null-guarded in place" when it is null-compared
    // adjacently, safe-accessed, or inside a null-mentioning condition.
    let guarded_mention = |idx: usize| -> bool {
        if is_safe_postfix(idx + 1) {
            return true;
        }
        if is_cmp(idx + 1) && is_null_ident(idx + 2) {
            return true;
        }
        if idx >= 2 && is_cmp(idx - 1) && is_null_ident(idx - 2) {
            return true;
        }
        decisions.iter().any(|d| d.has_null && tok_in(d.toks, idx))
    };

    // Null-guard resolution per raw call.
    let guard_of = |call: &scanner::RawCall| -> Option<NullGuardKind> {
        if is_safe_postfix(call.end_tok + 1) {
            return Some(NullGuardKind::SafeAccess);
        }
        if decisions
            .iter()
            .any(|d| d.has_null && d.span.contains(&call.span))
        {
            return Some(NullGuardKind::Condition);
        }
        // Result-variable branch: the call is in a binding's right-hand
        // side and the first later mention of the variable is guarded.
        let decl = decls
            .iter()
            .rev()
            .find(|d| tok_in(d.init_toks, call.callee_tok))?;
        let search_end = method_of(call.callee_tok)
            .map(|m| raw_methods[m].body_toks.1)
            .unwrap_or(toks.len());
        let mut idx = decl.init_toks.1;
        while idx < search_end {
            let t = &toks[idx];
            if t.kind == lexer::TokKind::Ident && t.text == decl.name {
                return guarded_mention(idx).then_some(NullGuardKind::ResultVariable);
            }
            idx += 1;
        }
        None
    };

    let receiver_hint = |call: &scanner::RawCall| -> Option<String> {
        let rawr = call.receiver_raw.as_ref()?;
        if rawr
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        {
            // Simple identifier: resolve through the last preceding binding
            // or, failing that, keep the name itself.
            if let Some(d) = decls
                .iter()
                .rev()
                .find(|d| d.name == *rawr && d.name_tok < call.callee_tok)
            {
                if let Some(ty) = &d.ty {
                    return Some(ty.clone());
                }
                if !d.init_text.is_empty() {
                    return Some(d.init_text.clone());
                }
            }
            return Some(rawr.clone());
        }
        Some(rawr.clone())
    };

    // Innermost callback region per token index.
    let callback_of = |idx: usize| -> Option<CallbackKind> {
        raw_callbacks
            .iter()
            .filter(|c| tok_in(c.body_toks, idx))
            .min_by_key(|c| c.body_toks.1 - c.body_toks.0)
            .map(|c| c.kind)
    };

    let try_covers = |idx: usize| -> bool {
        raw_tries
            .iter()
            .any(|t| t.catch_nonempty && tok_in(t.body_toks, idx))
    };

    // Build call sites, bucketed per enclosing method (or top level).
    let mut per_method: Vec<(Vec<CallSite>, Vec<CallSite>)> =
        vec![(Vec::new(), Vec::new()); raw_methods.len()];
    let mut top_level: Vec<CallSite> = Vec::new();
    for rc in &raw_calls {
        let guard = guard_of(rc);
        let site = CallSite {
            callee_name: rc.callee.clone(),
            receiver_hint: receiver_hint(rc),
            receiver_raw: rc.receiver_raw.clone(),
            arg_tokens: rc.args.clone(),
            location: loc(path, &rc.span),
            guarded_by_null_check: guard.is_some(),
            null_guard: guard,
            inside_decision: decisions.iter().any(|d| tok_in(d.toks, rc.callee_tok)),
            inside_try_with_nonempty_catch: try_covers(rc.callee_tok),
            inside_callback: callback_of(rc.callee_tok),
            is_member_access: rc.is_member,
            is_constructor: rc.is_ctor,
        };
        match method_of(rc.callee_tok) {
            Some(m) if rc.is_ctor => per_method[m].1.push(site),
            Some(m) => per_method[m].0.push(site),
            None => top_level.push(site),
        }
    }

    // Try blocks per enclosing method; coverage lists the calls inside.
    let mut per_method_tries: Vec<Vec<TryBlock>> = vec![Vec::new(); raw_methods.len()];
    for rt in &raw_tries {
        let covered: Vec<SourceLocation> = raw_calls
            .iter()
            .filter(|c| tok_in(rt.body_toks, c.callee_tok))
            .map(|c| loc(path, &c.span))
            .collect();
        let block = TryBlock {
            location: loc(path, &rt.body),
            catch_nonempty: rt.catch_nonempty,
            call_locations_covered: covered,
        };
        if let Some(m) = method_of(rt.body_toks.0) {
            per_method_tries[m].push(block)
        }
    }

    let methods: Vec<MethodModel> = raw_methods
        .iter()
        .zip(per_method)
        .zip(per_method_tries)
        .map(|((rm, (calls, ctors)), tries)| MethodModel {
            qualified_name: rm.qualified.clone(),
            name: rm.name.clone(),
            location: loc(path, &rm.span),
            body_location: loc(path, &rm.body),
            calls,
            constructor_calls: ctors,
            try_blocks: tries,
            callees_internal: BTreeSet::new(),
        })
        .collect();

    // Callback regions with payload usage facts.
    let callback_regions: Vec<CallbackRegion> = raw_callbacks
        .iter()
        .map(|cb| {
            let mut uses = Vec::new();
            let mut guarded = false;
            if let Some(p) = &cb.payload {
                // Lambda regions open with `params ->`; uses start after it.
                let scan_end = (cb.body_toks.0 + 30).min(cb.body_toks.1);
                let start = toks[cb.body_toks.0..scan_end]
                    .iter()
                    .position(|t| t.is("->"))
                    .map_or(cb.body_toks.0, |off| cb.body_toks.0 + off + 1);
                for (idx, t) in toks.iter().enumerate().take(cb.body_toks.1).skip(start) {
                    if t.kind == lexer::TokKind::Ident && t.text == *p {
                        uses.push(loc(path, &Span::of(t)));
                        if guarded_mention(idx) {
                            guarded = true;
                        }
                    }
                }
            }
            CallbackRegion {
                kind: cb.kind,
                location: loc(path, &cb.body),
                payload_param: cb.payload.clone(),
                payload_uses: uses,
                payload_null_guarded: guarded,
            }
        })
        .collect();

    SourceUnit {
        path: path.to_string(),
        language,
        imports,
        types_declared: types,
        methods,
        top_level_calls: top_level,
        callback_regions,
        diagnostics,
    }
}

/// `{method}` plus project-internal callees transitively up to `depth`
/// hops, following `callees_internal` edges; cycle-safe, each qualified
/// name expanded once.
pub fn resolve_scope<'p>(
    project: &'p ProjectModel,
    method: &'p MethodModel,
    depth: u32,
) -> Vec<&'p MethodModel> {
    let index = project.method_index();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    seen.insert(&method.qualified_name);
    let mut result: Vec<&MethodModel> = vec![method];
    let mut frontier: Vec<&MethodModel> = vec![method];
    for _ in 0..depth {
        let mut next: Vec<&MethodModel> = Vec::new();
        for m in &frontier {
            for callee in &m.callees_internal {
                if seen.insert(callee) {
                    if let Some(found) = index.get(callee.as_str()) {
                        for mm in found {
                            result.push(mm);
                            next.push(mm);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    result
}

/// Predicate over a call's argument tokens, used to narrow matches.
pub type ArgTokenFilter<'a> = &'a dyn Fn(&[String]) -> bool;

/// All call sites in `scope` whose callee is in `names` and whose argument
/// tokens pass `arg_filter`, ordered by location. Member accesses count:
/// Kotlin spells `isConnected()` as a property.
pub fn find_calls<'a>(
    scope: &[&'a MethodModel],
    names: &BTreeSet<&str>,
    arg_filter: Option<ArgTokenFilter>,
) -> Vec<&'a CallSite> {
    let mut out: Vec<&CallSite> = scope
        .iter()
        .flat_map(|m| m.calls.iter())
        .filter(|c| names.contains(c.callee_name.as_str()))
        .filter(|c| arg_filter.is_none_or(|f| f(&c.arg_tokens)))
        .collect();
    out.sort_by(|a, b| a.location.cmp(&b.location));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::parse_manifest;
    use crate::project::{ProjectLayout, ProjectModel};

    fn java(src: &str) -> SourceUnit {
        parse_source_unit("Test.java", src, Language::Java).unwrap()
    }

    fn kotlin(src: &str) -> SourceUnit {
        parse_source_unit("Test.kt", src, Language::Kotlin).unwrap()
    }

    #[test]
    fn java_open_connection_single_method() {
        let unit = java(
            r#"import java.net.URL;
               class Fetcher {
                 void fetch() throws Exception {
                   URL url = new URL("https://example.org");
                   url.openConnection();
                 }
               }"#,
        );
        assert_eq!(unit.methods.len(), 1);
        let calls: Vec<&str> = unit.methods[0]
            .calls
            .iter()
            .map(|c| c.callee_name.as_str())
            .collect();
        assert!(calls.contains(&"openConnection"));
        assert_eq!(unit.methods[0].qualified_name, "Fetcher.fetch");
    }

    #[test]
    fn empty_file_parses_to_empty_unit() {
        let unit = java("");
        assert!(unit.methods.is_empty());
        assert!(unit.top_level_calls.is_empty());
        assert!(unit.imports.is_empty());
    }

    #[test]
    fn kotlin_execute_call() {
        let unit = kotlin(
            "import okhttp3.OkHttpClient\nclass A { fun go(call: Call) { call.execute() } }",
        );
        assert_eq!(unit.language, Language::Kotlin);
        let c = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "execute")
            .unwrap();
        assert!(!c.is_member_access);
    }

    #[test]
    fn garbage_file_is_fatal() {
        let junk = "¤¤ %% || && :: ;; ,, .. !! ?? ^^ ~~ ## ¤¤ %% || && :: ;; ,, .. !! ?? ^^ ~~ ## ¤¤ %% ||";
        let err = parse_source_unit("junk.java", junk, Language::Java).unwrap_err();
        assert!(matches!(err, ConanError::FatalParse(_)));
    }

    #[test]
    fn bom_tolerated() {
        let unit = java("\u{feff}import okhttp3.OkHttpClient;\nclass A {}");
        assert!(unit.imports.contains("okhttp3.OkHttpClient"));
    }

    #[test]
    fn guard_condition_branch() {
        let unit =
            java("class A { void f(Response r) { if (r.body() != null) { use(r.body()); } } }");
        let bodies: Vec<&CallSite> = unit.methods[0]
            .calls
            .iter()
            .filter(|c| c.callee_name == "body")
            .collect();
        assert_eq!(bodies.len(), 2);
        assert_eq!(bodies[0].null_guard, Some(NullGuardKind::Condition));
        // The second access sits in the guarded branch but is not DIRECTLY
        // enclosed — the contract is strict about this.
        assert_eq!(bodies[1].null_guard, None);
    }

    #[test]
    fn decision_containment_flag() {
        let unit =
            java("class A { void f(Response r) { if (r.code() == 200) { use(r); } r.code(); } }");
        let codes: Vec<&CallSite> = unit.methods[0]
            .calls
            .iter()
            .filter(|c| c.callee_name == "code")
            .collect();
        assert_eq!(codes.len(), 2);
        assert!(codes[0].inside_decision);
        assert!(!codes[1].inside_decision);
    }

    #[test]
    fn guard_result_variable_branch() {
        let unit = java(
            r#"class A {
                 void guarded(Response r) {
                   ResponseBody b = r.body();
                   if (b == null) { return; }
                   use(b);
                 }
                 void unguarded(Response r) {
                   ResponseBody b = r.body();
                   use(b);
                 }
               }"#,
        );
        let g = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "body")
            .unwrap();
        assert_eq!(g.null_guard, Some(NullGuardKind::ResultVariable));
        let u = unit.methods[1]
            .calls
            .iter()
            .find(|c| c.callee_name == "body")
            .unwrap();
        assert_eq!(u.null_guard, None);
    }

    #[test]
    fn guard_safe_access_postfix() {
        let unit = kotlin("class A { fun f(r: Response<User>) { r.body()?.let { use(it) } } }");
        let b = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "body")
            .unwrap();
        assert_eq!(b.null_guard, Some(NullGuardKind::SafeAccess));
    }

    #[test]
    fn try_with_nonempty_catch_flag() {
        let unit = java(
            r#"class A {
                 void a() { try { f(); } catch (Exception e) { log(e); } }
                 void b() { try { g(); } catch (Exception e) { } }
                 void c() { h(); }
               }"#,
        );
        let call = |m: usize, name: &str| {
            unit.methods[m]
                .calls
                .iter()
                .find(|c| c.callee_name == name)
                .unwrap()
                .inside_try_with_nonempty_catch
        };
        assert!(call(0, "f"));
        assert!(!call(1, "g"));
        assert!(!call(2, "h"));
        assert!(unit.methods[0].try_blocks[0].catch_nonempty);
        assert!(!unit.methods[1].try_blocks[0].catch_nonempty);
        assert_eq!(
            unit.methods[0].try_blocks[0].call_locations_covered.len(),
            1
        );
    }

    #[test]
    fn callback_flags_and_regions() {
        let unit = java(
            r#"class A { void go(Call call) {
                 call.enqueue(new Callback() {
                   public void onResponse(Call c, Response response) { use(response.body()); }
                   public void onFailure(Call c, Throwable t) { log(t); }
                 });
               } }"#,
        );
        let body = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "body")
            .unwrap();
        assert_eq!(body.inside_callback, Some(CallbackKind::Response));
        let log = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "log")
            .unwrap();
        assert_eq!(log.inside_callback, Some(CallbackKind::Failure));
        let enq = unit.methods[0]
            .calls
            .iter()
            .find(|c| c.callee_name == "enqueue")
            .unwrap();
        assert_eq!(enq.inside_callback, None);
        assert_eq!(unit.callback_regions.len(), 2);
    }

    #[test]
    fn volley_payload_facts() {
        let unit = kotlin(
            r#"class A { fun f(queue: RequestQueue) {
                 val req = StringRequest(url, { resp -> show(resp.length) }, { err -> log(err) })
                 queue.add(req)
               } }"#,
        );
        let region = unit
            .callback_regions
            .iter()
            .find(|r| r.kind == CallbackKind::Response)
            .unwrap();
        assert_eq!(region.payload_param.as_deref(), Some("resp"));
        assert_eq!(region.payload_uses.len(), 1);
        assert!(!region.payload_null_guarded);
    }

    #[test]
    fn every_call_site_has_exactly_one_owner() {
        let unit = java(
            r#"class A {
                 private final OkHttpClient client = new OkHttpClient();
                 void f() { g(1); }
                 void g(int x) { h(); }
               }"#,
        );
        let in_methods: usize = unit
            .methods
            .iter()
            .map(|m| m.calls.len() + m.constructor_calls.len())
            .sum();
        let total = in_methods + unit.top_level_calls.len();
        assert_eq!(total, unit.all_calls().count());
        assert!(unit
            .top_level_calls
            .iter()
            .any(|c| c.callee_name == "OkHttpClient" && c.is_constructor));
    }

    fn tiny_project(units: Vec<SourceUnit>) -> ProjectModel {
        let manifest = parse_manifest(
            r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="t"/>"#,
        )
        .unwrap();
        ProjectModel::from_parts(
            ProjectLayout {
                root_path: "mem".into(),
                module_name: "app".into(),
                manifest_path: "mem/AndroidManifest.xml".into(),
                source_paths: Vec::new(),
            },
            manifest,
            units,
            Vec::new(),
        )
    }

    #[test]
    fn resolve_scope_depth_zero_is_identity() {
        let unit = java("class A { void a() { b(); } void b() { } }");
        let project = tiny_project(vec![unit]);
        let a = &project.units[0].methods[0];
        let scope = resolve_scope(&project, a, 0);
        assert_eq!(scope.len(), 1);
        assert_eq!(scope[0].qualified_name, "A.a");
    }

    #[test]
    fn resolve_scope_bounded_chain() {
        let unit = java("class A { void a() { b(); } void b() { c(); } void c() { } }");
        let project = tiny_project(vec![unit]);
        let a = &project.units[0].methods[0];
        let names: Vec<&str> = resolve_scope(&project, a, 1)
            .iter()
            .map(|m| m.qualified_name.as_str())
            .collect();
        assert_eq!(names, vec!["A.a", "A.b"]);
        let names2: Vec<&str> = resolve_scope(&project, a, 2)
            .iter()
            .map(|m| m.qualified_name.as_str())
            .collect();
        assert_eq!(names2, vec!["A.a", "A.b", "A.c"]);
    }

    #[test]
    fn resolve_scope_cycle_terminates() {
        let unit = java("class A { void a() { b(); } void b() { a(); } }");
        let project = tiny_project(vec![unit]);
        let a = &project.units[0].methods[0];
        let scope = resolve_scope(&project, a, 10);
        assert_eq!(scope.len(), 2);
    }

    #[test]
    fn find_calls_capability_filter() {
        let unit = java(
            "class A { void f(NetworkCapabilities nc) { nc.hasCapability(NetworkCapabilities.NET_CAPABILITY_INTERNET); } }",
        );
        let project = tiny_project(vec![unit]);
        let m = &project.units[0].methods[0];
        let scope = vec![m];
        let names: BTreeSet<&str> = ["hasCapability"].into();
        let internet = |args: &[String]| {
            args.iter()
                .any(|t| t == "NET_CAPABILITY_INTERNET" || t == "NET_CAPABILITY_VALIDATED")
        };
        let validated_only = |args: &[String]| args.iter().any(|t| t == "NET_CAPABILITY_VALIDATED");
        assert_eq!(find_calls(&scope, &names, Some(&internet)).len(), 1);
        assert_eq!(find_calls(&scope, &names, Some(&validated_only)).len(), 0);
        assert_eq!(find_calls(&[], &names, None).len(), 0);
    }

    #[test]
    fn parity_java_kotlin_same_facts() {
        let j = java(
            r#"import okhttp3.OkHttpClient;
               class A { void f(Call call) { call.execute(); } }"#,
        );
        let k = kotlin(
            r#"import okhttp3.OkHttpClient
               class A { fun f(call: Call) { call.execute() } }"#,
        );
        assert_eq!(j.imports, k.imports);
        assert_eq!(j.types_declared, k.types_declared);
        assert_eq!(j.methods.len(), k.methods.len());
        assert_eq!(
            j.methods[0]
                .calls
                .iter()
                .map(|c| &c.callee_name)
                .collect::<Vec<_>>(),
            k.methods[0]
                .calls
                .iter()
                .map(|c| &c.callee_name)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn determinism_same_bytes_same_model() {
        let src = r#"import okhttp3.OkHttpClient
            class A { fun f(call: Call) { if (x == null) { call.execute() } } }"#;
        assert_eq!(kotlin(src), kotlin(src));
    }
}
