//! Structural scan over the token stream: a single forward walk with an
//! explicit frame stack (type bodies, method bodies, lambdas, try/catch,
//! argument lists, conditions) producing the raw facts the source model is
//! assembled from. No grammar, no type resolution — recovery from anything
//! unexpected is "treat it as an opaque token and move on".

use std::collections::BTreeSet;

use crate::source::lexer::{Tok, TokKind};
use crate::source::{CallbackKind, Language};

/// Line/column span, 1-based, end column exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Span {
    pub sl: u32,
    pub sc: u32,
    pub el: u32,
    pub ec: u32,
}

impl Span {
    pub fn of(t: &Tok) -> Span {
        Span {
            sl: t.line,
            sc: t.col,
            el: t.end_line,
            ec: t.end_col,
        }
    }

    pub fn between(a: &Tok, b: &Tok) -> Span {
        Span {
            sl: a.line,
            sc: a.col,
            el: b.end_line,
            ec: b.end_col,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        (self.sl, self.sc) <= (other.sl, other.sc) && (other.el, other.ec) <= (self.el, self.ec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DecisionKind {
    IfCond,
    WhileCond,
    WhenSubject,
    WhenBranch,
    Ternary,
}

#[derive(Debug)]
pub(crate) struct RawMethod {
    pub name: String,
    pub qualified: String,
    pub span: Span,
    pub body: Span,
    /// Token indices of the body contents (post-pass statement analysis).
    pub body_toks: (usize, usize),
}

#[derive(Debug)]
pub(crate) struct RawCall {
    pub callee: String,
    pub receiver_raw: Option<String>,
    pub args: Vec<String>,
    pub span: Span,
    pub callee_tok: usize,
    /// Index of the call's last token (closing paren / lambda brace; the
    /// identifier itself for member accesses).
    pub end_tok: usize,
    pub is_member: bool,
    pub is_ctor: bool,
}

#[derive(Debug)]
pub(crate) struct RawTry {
    pub body: Span,
    pub body_toks: (usize, usize),
    pub catch_nonempty: bool,
}

#[derive(Debug)]
pub(crate) struct RawDecision {
    /// Which construct formed the region. Detectors treat every decision
    /// region uniformly, so outside the scanner's own tests only the span
    /// matters.
    #[allow(dead_code)]
    pub kind: DecisionKind,
    pub span: Span,
    pub toks: (usize, usize),
    pub has_null: bool,
}

#[derive(Debug)]
pub(crate) struct RawCallback {
    pub kind: CallbackKind,
    pub body: Span,
    pub body_toks: (usize, usize),
    pub payload: Option<String>,
}

/// A `name = <expr>` local binding (or declaration with initializer).
#[derive(Debug)]
pub(crate) struct RawDecl {
    pub name: String,
    pub ty: Option<String>,
    pub init_text: String,
    pub name_tok: usize,
    pub init_toks: (usize, usize),
}

#[derive(Debug, Default)]
pub(crate) struct RawScan {
    pub imports: BTreeSet<String>,
    pub types: Vec<String>,
    pub methods: Vec<RawMethod>,
    pub calls: Vec<RawCall>,
    pub tries: Vec<RawTry>,
    pub decisions: Vec<RawDecision>,
    pub callbacks: Vec<RawCallback>,
    pub decls: Vec<RawDecl>,
    pub diagnostics: Vec<String>,
}

const CONT_END: &[&str] = &[
    ".",
    "?.",
    ",",
    "=",
    "(",
    "[",
    "{",
    "+",
    "-",
    "*",
    "/",
    "%",
    "&&",
    "||",
    "==",
    "!=",
    "<=",
    ">=",
    "<",
    ">",
    "!",
    "?:",
    "->",
    ":",
    "throw",
    "return",
    "else",
    "in",
    "is",
    "public",
    "private",
    "protected",
    "internal",
    "override",
    "open",
    "abstract",
    "final",
    "operator",
    "suspend",
    "inline",
    "@",
];
const CONT_START: &[&str] = &[
    ".", "?.", "?:", "&&", "||", "else", "catch", "finally", ":", "=", "->", "{",
];

const SHARED_KEYWORDS: &[&str] = &[
    "if",
    "else",
    "while",
    "for",
    "switch",
    "catch",
    "try",
    "finally",
    "do",
    "return",
    "throw",
    "this",
    "super",
    "class",
    "interface",
    "enum",
    "import",
    "package",
    "public",
    "private",
    "protected",
    "final",
    "abstract",
    "null",
    "true",
    "false",
    "void",
    "int",
    "long",
    "boolean",
    "char",
    "byte",
    "short",
    "float",
    "double",
    "break",
    "continue",
    "case",
    "default",
];
const JAVA_KEYWORDS: &[&str] = &[
    "new",
    "instanceof",
    "synchronized",
    "assert",
    "throws",
    "static",
];
const KOTLIN_KEYWORDS: &[&str] = &[
    "fun",
    "val",
    "var",
    "when",
    "object",
    "init",
    "companion",
    "is",
    "in",
    "as",
    "override",
    "internal",
    "open",
    "suspend",
    "operator",
    "constructor",
];

fn is_keyword(lang: Language, text: &str) -> bool {
    SHARED_KEYWORDS.contains(&text)
        || match lang {
            Language::Java => JAVA_KEYWORDS.contains(&text),
            Language::Kotlin => KOTLIN_KEYWORDS.contains(&text),
        }
}

fn callback_kind_for(name: &str) -> Option<CallbackKind> {
    match name {
        "onResponse" => Some(CallbackKind::Response),
        "onFailure" => Some(CallbackKind::Failure),
        "onErrorResponse" => Some(CallbackKind::ErrorListener),
        _ => None,
    }
}

fn sam_kind_for(callee: &str) -> Option<CallbackKind> {
    match callee {
        "Listener" => Some(CallbackKind::Response),
        "ErrorListener" => Some(CallbackKind::ErrorListener),
        _ => None,
    }
}

#[derive(Debug)]
enum FrameKind {
    File,
    Type,
    Anon,
    /// Method body (named method, or anonymous-class method when `midx` is
    /// None and `cb` identifies a callback region).
    Body {
        midx: Option<usize>,
        cb: Option<usize>,
    },
    Lambda {
        payload: Option<String>,
        /// Set for trailing lambdas attached to a call by SAM-name.
        named_kind: Option<CallbackKind>,
        /// Call whose span should extend over this lambda.
        extends_call: Option<usize>,
        /// True when the lambda is a direct parenthesized argument.
        direct_arg: bool,
    },
    Control,
    WhenBody {
        branch_start: usize,
        /// Line of the last `->`; `usize::MAX` branch_start means "waiting
        /// for the first token on a later line".
        arrow_line: u32,
    },
    Try,
    Catch {
        try_idx: Option<usize>,
    },
    Finally,
    Block,
    Init,
    // Parenthesis frames.
    Args {
        call_idx: usize,
        arg_lambdas: Vec<(Span, (usize, usize), Option<String>)>,
    },
    Cond {
        kind: DecisionKind,
        after: After,
    },
    Params {
        after: After,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum After {
    None,
    Control,
    When,
    Catch,
}

struct Frame {
    kind: FrameKind,
    open_tok: usize,
    member_start: usize,
    stmt_start: usize,
}

impl Frame {
    fn is_paren(&self) -> bool {
        matches!(
            self.kind,
            FrameKind::Args { .. } | FrameKind::Cond { .. } | FrameKind::Params { .. }
        )
    }

    fn is_memberish(&self) -> bool {
        matches!(
            self.kind,
            FrameKind::File | FrameKind::Type | FrameKind::Anon
        )
    }
}

/// What the next `{` should become.
#[derive(Debug)]
enum PendingBrace {
    Type(String),
    Anon,
    Control,
    When,
    Try,
    Catch,
    Finally,
    Init,
    JavaLambda,
}

pub(crate) struct Scanner<'t> {
    toks: &'t [Tok],
    lang: Language,
    file_tag: String,
    i: usize,
    frames: Vec<Frame>,
    type_stack: Vec<String>,
    pending_brace: Option<PendingBrace>,
    /// (token index of expected `(`, callee token, receiver) from a
    /// generic-argument lookahead.
    pending_call: Option<(usize, usize)>,
    /// (call idx, token index of expected `{`) for a trailing-lambda call.
    pending_trailing: Option<(usize, usize)>,
    /// Call that just closed its `)` at this token index.
    last_call_closed: Option<(usize, usize)>,
    /// Keyword at i-1 wants the `(` at i to be a condition/params frame.
    paren_intent: Option<(usize, DecisionKind, After)>,
    params_intent: Option<(usize, After)>,
    awaiting_catch: Option<usize>,
    out: RawScan,
}

pub(crate) fn scan(toks: &[Tok], lang: Language, file_tag: &str) -> RawScan {
    let mut s = Scanner {
        toks,
        lang,
        file_tag: file_tag.to_string(),
        i: 0,
        frames: vec![Frame {
            kind: FrameKind::File,
            open_tok: 0,
            member_start: 0,
            stmt_start: 0,
        }],
        type_stack: Vec::new(),
        pending_brace: None,
        pending_call: None,
        pending_trailing: None,
        last_call_closed: None,
        paren_intent: None,
        params_intent: None,
        awaiting_catch: None,
        out: RawScan::default(),
    };
    s.run();
    s.out
}

impl<'t> Scanner<'t> {
    fn run(&mut self) {
        while self.i < self.toks.len() {
            self.kotlin_newline_boundary();
            let i = self.i;
            // Lookahead expectations that the stream has moved past.
            if self.pending_call.is_some_and(|(e, _)| i > e) {
                self.pending_call = None;
            }
            if self.pending_trailing.is_some_and(|(_, e)| i > e) {
                self.pending_trailing = None;
            }
            if self.paren_intent.is_some_and(|(e, _, _)| i > e) {
                self.paren_intent = None;
            }
            if self.params_intent.is_some_and(|(e, _)| i > e) {
                self.params_intent = None;
            }
            // A `when` branch begins at the first token on a line after the
            // previous branch's `->`.
            let line = self.toks[i].line;
            if let FrameKind::WhenBody {
                branch_start,
                arrow_line,
            } = &mut self.top_mut().kind
            {
                if *branch_start == usize::MAX && line > *arrow_line {
                    *branch_start = i;
                }
            }
            let t = &self.toks[i];
            match t.kind {
                TokKind::Ident => self.on_ident(i),
                TokKind::Punct => self.on_punct(i),
                _ => {
                    self.i += 1;
                }
            }
            if self.i == i && !matches!(self.toks[i].kind, TokKind::Punct | TokKind::Ident) {
                self.i += 1;
            }
            debug_assert!(self.i > i, "scanner must always advance");
            if self.i <= i {
                self.i = i + 1;
            }
        }
        // Close anything left open (unbalanced input): pop with the last
        // token as the close position.
        if self.frames.len() > 1 && !self.toks.is_empty() {
            self.out.diagnostics.push(format!(
                "{} unclosed block(s) at end of file; spans truncated",
                self.frames.len() - 1
            ));
        }
        let last = self.toks.len().saturating_sub(1);
        while self.frames.len() > 1 {
            self.close_frame(last);
        }
    }

    /// At a statement boundary in Kotlin (token starts a new line and
    /// neither side demands continuation), reset member/statement starts.
    fn kotlin_newline_boundary(&mut self) {
        if self.lang != Language::Kotlin || self.i == 0 || self.i >= self.toks.len() {
            return;
        }
        let prev = &self.toks[self.i - 1];
        let t = &self.toks[self.i];
        if t.line > prev.end_line
            && !CONT_END.contains(&prev.text.as_str())
            && !CONT_START.contains(&t.text.as_str())
        {
            let i = self.i;
            if let Some(f) = self.frames.last_mut() {
                if !f.is_paren() {
                    // A brace owed to the previous statement never arrived
                    // (e.g. a body-less `data class`): drop it.
                    self.pending_brace = None;
                    f.stmt_start = i;
                    if f.is_memberish() {
                        f.member_start = i;
                    }
                }
            }
        }
    }

    fn top(&self) -> &Frame {
        self.frames.last().expect("file frame always present")
    }

    fn top_mut(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("file frame always present")
    }

    fn tok(&self, idx: usize) -> Option<&Tok> {
        self.toks.get(idx)
    }

    fn push_frame(&mut self, kind: FrameKind, open_tok: usize) {
        self.frames.push(Frame {
            kind,
            open_tok,
            member_start: open_tok + 1,
            stmt_start: open_tok + 1,
        });
    }

    // ----- identifiers ---------------------------------------------------

    fn on_ident(&mut self, i: usize) {
        let text = self.toks[i].text.clone();

        if matches!(self.top().kind, FrameKind::File) {
            if text == "package" {
                self.skip_dotted_statement(i);
                return;
            }
            if text == "import" {
                self.consume_import(i);
                return;
            }
        }

        match text.as_str() {
            "if" => {
                self.paren_intent = Some((i + 1, DecisionKind::IfCond, After::Control));
            }
            "while" => {
                self.paren_intent = Some((i + 1, DecisionKind::WhileCond, After::Control));
            }
            "switch" if self.lang == Language::Java => {
                self.paren_intent = Some((i + 1, DecisionKind::WhenSubject, After::Control));
            }
            "when" if self.lang == Language::Kotlin => {
                if self.tok(i + 1).is_some_and(|t| t.is("{")) {
                    self.pending_brace = Some(PendingBrace::When);
                } else {
                    self.paren_intent = Some((i + 1, DecisionKind::WhenSubject, After::When));
                }
            }
            "for" | "synchronized" => {
                self.params_intent = Some((i + 1, After::Control));
            }
            "catch" => {
                self.params_intent = Some((i + 1, After::Catch));
            }
            "try" => {
                self.pending_brace = Some(PendingBrace::Try);
            }
            "finally" => {
                self.pending_brace = Some(PendingBrace::Finally);
            }
            "else" | "do" => {
                self.pending_brace = Some(PendingBrace::Control);
            }
            "static" if self.lang == Language::Java => {
                // Leave in the member buffer; `static {` becomes an
                // initializer via member inspection.
            }
            "init" if self.lang == Language::Kotlin => {
                if self.tok(i + 1).is_some_and(|t| t.is("{")) {
                    self.pending_brace = Some(PendingBrace::Init);
                }
            }
            "class" | "interface" | "enum" => {
                // Skip the declared name so it is never taken for a call.
                if let Some(name) = self.next_ident_text(i + 1) {
                    self.pending_brace = Some(PendingBrace::Type(name));
                    self.i = i + 2;
                    return;
                }
            }
            "object" if self.lang == Language::Kotlin => {
                // `companion object` already holds a type pending; keep it.
                let keep = matches!(self.pending_brace, Some(PendingBrace::Type(_)));
                if let Some(name) = self.next_ident_text(i + 1) {
                    if !keep {
                        self.pending_brace = Some(PendingBrace::Type(name));
                    }
                    self.i = i + 2;
                    return;
                }
                if !keep {
                    self.pending_brace = Some(PendingBrace::Anon);
                }
            }
            "companion" if self.lang == Language::Kotlin => {
                self.pending_brace = Some(PendingBrace::Type("Companion".to_string()));
            }
            _ if is_keyword(self.lang, &text) => {}
            _ => {
                self.maybe_call_or_member(i);
                return;
            }
        }
        self.i = i + 1;
    }

    fn next_ident_text(&self, from: usize) -> Option<String> {
        let t = self.tok(from)?;
        (t.kind == TokKind::Ident && !is_keyword(self.lang, &t.text)).then(|| t.text.clone())
    }

    fn skip_dotted_statement(&mut self, i: usize) {
        let mut j = i + 1;
        while let Some(t) = self.tok(j) {
            if t.is(";") {
                j += 1;
                break;
            }
            if t.kind != TokKind::Ident && !t.is(".") && !t.is("*") {
                break;
            }
            if j > i + 1 && t.line > self.toks[j - 1].end_line && !self.toks[j - 1].is(".") {
                break;
            }
            j += 1;
        }
        self.i = j;
        self.top_mut().member_start = j;
    }

    fn consume_import(&mut self, i: usize) {
        let mut j = i + 1;
        if self.tok(j).is_some_and(|t| t.is_ident("static")) {
            j += 1;
        }
        let mut parts: Vec<String> = Vec::new();
        let mut expect_name = true;
        while let Some(t) = self.tok(j) {
            if expect_name && (t.kind == TokKind::Ident || t.is("*")) {
                parts.push(t.text.clone());
                expect_name = false;
                j += 1;
            } else if !expect_name && t.is(".") {
                expect_name = true;
                j += 1;
            } else {
                break;
            }
        }
        // `import a.b.C as D` — the alias does not change the imported name.
        if self.tok(j).is_some_and(|t| t.is_ident("as")) {
            j += 1;
            if self.tok(j).is_some_and(|t| t.kind == TokKind::Ident) {
                j += 1;
            }
        }
        if self.tok(j).is_some_and(|t| t.is(";")) {
            j += 1;
        }
        if !parts.is_empty() {
            self.out.imports.insert(parts.join("."));
        }
        self.i = j;
        self.top_mut().member_start = j;
    }

    /// Skip a plausible generic-argument list starting at `from` (which must
    /// be `<`); returns the index after `>` or None when it does not look
    /// like generics.
    fn skip_generics(&self, from: usize) -> Option<usize> {
        if !self.tok(from)?.is("<") {
            return Some(from);
        }
        let mut depth = 0i32;
        let mut j = from;
        while let Some(t) = self.tok(j) {
            if j - from > 64 {
                return None;
            }
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(j + 1);
                    }
                }
                "," | "." | "?" | "*" | "&" | "[" | "]" | "extends" | "in" | "out" => {}
                _ if t.kind == TokKind::Ident => {}
                _ => return None,
            }
            j += 1;
        }
        None
    }

    /// True when the next `{` is already owed to a type/object/when body,
    /// so it must not be taken for a trailing lambda or anonymous class.
    fn structural_brace_pending(&self) -> bool {
        matches!(
            self.pending_brace,
            Some(PendingBrace::Type(_) | PendingBrace::Anon | PendingBrace::When)
        )
    }

    /// True when token `i` is the name position of a member declaration
    /// rather than a call: the tokens gathered since `member_start` read
    /// like a signature (`fun … name` in Kotlin, `Type name` in Java) with
    /// no initializer `=` in between.
    fn in_member_signature(&self, i: usize) -> bool {
        let f = self.top();
        if !f.is_memberish() {
            return false;
        }
        let start = f.member_start;
        if start >= i {
            return false;
        }
        let window = &self.toks[start..i];
        if window.iter().any(|t| t.is("=")) {
            return false;
        }
        match self.lang {
            Language::Kotlin => window.iter().any(|t| t.is_ident("fun")),
            Language::Java => {
                let p = &self.toks[i - 1];
                p.kind == TokKind::Ident || p.is(">") || p.is("]")
            }
        }
    }

    fn maybe_call_or_member(&mut self, i: usize) {
        let after_generics = self
            .skip_generics(i + 1)
            .filter(|&j| j > i + 1 && self.tok(j).is_some_and(|t| t.is("(") || t.is("{")));
        let next_effective = after_generics.unwrap_or(i + 1);
        let next_is = |s: &str| self.tok(next_effective).is_some_and(|t| t.is(s));

        if (next_is("(") || next_is("{")) && self.in_member_signature(i) {
            // Declaration name (`fun go(`, `void go(`), not a call.
            self.i = i + 1;
            return;
        }
        if next_is("(") {
            let call_idx = self.record_call(i, false);
            self.pending_call = Some((next_effective, call_idx));
            self.i = i + 1;
            return;
        }
        if next_is("{") && self.lang == Language::Kotlin && !self.structural_brace_pending() {
            let call_idx = self.record_call(i, false);
            self.pending_trailing = Some((call_idx, next_effective));
            self.i = i + 1;
            return;
        }
        // Member access: `.name` not followed by an argument list.
        if i > 0 && (self.toks[i - 1].is(".") || self.toks[i - 1].is("?.")) {
            let (receiver, _) = self.receiver_before(i);
            let span = Span::of(&self.toks[i]);
            self.out.calls.push(RawCall {
                callee: self.toks[i].text.clone(),
                receiver_raw: receiver,
                args: Vec::new(),
                span,
                callee_tok: i,
                end_tok: i,
                is_member: true,
                is_ctor: false,
            });
        }
        self.i = i + 1;
    }

    /// Record a (not yet closed) call or constructor at callee token `i`.
    fn record_call(&mut self, i: usize, _trailing_only: bool) -> usize {
        let (receiver, recv_start) = self.receiver_before(i);
        let before = recv_start.unwrap_or(i).checked_sub(1);
        // `new a.b.Type(` — a dotted type name never contains parentheses;
        // `new URL(x).m(` is a method call on a fresh object, not a ctor.
        let is_new = self.lang == Language::Java
            && before.is_some_and(|b| self.toks[b].is_ident("new"))
            && receiver.as_deref().is_none_or(|r| !r.contains('('));
        let is_ctor = is_new
            || (self.lang == Language::Kotlin
                && receiver.is_none()
                && self.toks[i]
                    .text
                    .starts_with(|c: char| c.is_ascii_uppercase()));
        self.out.calls.push(RawCall {
            callee: self.toks[i].text.clone(),
            receiver_raw: if is_new { None } else { receiver },
            args: Vec::new(),
            span: Span::of(&self.toks[i]),
            callee_tok: i,
            end_tok: i,
            is_member: false,
            is_ctor,
        });
        self.out.calls.len() - 1
    }

    /// Walk back over a receiver chain ending with `.`/`?.` at `i - 1`.
    /// Returns (compressed text, index of the chain's first token).
    fn receiver_before(&self, i: usize) -> (Option<String>, Option<usize>) {
        if i == 0 || !(self.toks[i - 1].is(".") || self.toks[i - 1].is("?.")) {
            return (None, None);
        }
        let mut j = i - 1; // points at the dot
        let mut start = j;
        let mut steps = 0;
        loop {
            if j == 0 || steps > 60 {
                break;
            }
            let prev = &self.toks[j - 1];
            match prev.text.as_str() {
                ")" | "]" => {
                    // Skip the balanced group backwards.
                    let open = if prev.is(")") { "(" } else { "[" };
                    let close = prev.text.as_str();
                    let mut depth = 0i32;
                    let mut k = j - 1;
                    loop {
                        let t = &self.toks[k];
                        if t.is(close) {
                            depth += 1;
                        } else if t.is(open) {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        steps += 1;
                        if steps > 60 {
                            break;
                        }
                    }
                    if k == 0 {
                        start = k;
                        break;
                    }
                    j = k;
                    start = k;
                }
                _ if prev.kind == TokKind::Ident || prev.is("!!") => {
                    j -= 1;
                    start = j;
                    // Continue only through another dot.
                    if j == 0 || !(self.toks[j - 1].is(".") || self.toks[j - 1].is("?.")) {
                        break;
                    }
                    j -= 1;
                    start = j;
                }
                _ => break,
            }
            steps += 1;
        }
        if start >= i - 1 {
            return (None, None);
        }
        let mut text = String::new();
        for t in &self.toks[start..i - 1] {
            text.push_str(&t.text);
        }
        for prefix in ["this.", "super."] {
            if let Some(stripped) = text.strip_prefix(prefix) {
                text = stripped.to_string();
            }
        }
        if text == "this" || text == "super" || text.is_empty() {
            return (None, Some(start));
        }
        if text.len() > 120 {
            text.truncate(120);
        }
        (Some(text), Some(start))
    }

    // ----- punctuation ---------------------------------------------------

    fn on_punct(&mut self, i: usize) {
        let text = self.toks[i].text.clone();
        match text.as_str() {
            "(" => self.on_open_paren(i),
            ")" => self.on_close_paren(i),
            "{" => self.on_open_brace(i),
            "}" => self.close_frame_at(i),
            ";" => {
                self.pending_brace = None;
                self.awaiting_catch = None;
                let f = self.top_mut();
                f.stmt_start = i + 1;
                if f.is_memberish() {
                    f.member_start = i + 1;
                }
                self.i = i + 1;
            }
            "=" => {
                self.on_assign(i);
                self.i = i + 1;
            }
            "?" if self.lang == Language::Java => {
                self.on_ternary(i);
                self.i = i + 1;
            }
            "->" => {
                self.on_arrow(i);
                self.i = i + 1;
            }
            "@" => {
                // Annotation: skip name; argument parens are scanned
                // normally (their calls are inert for every rule).
                self.i = i + 1;
            }
            _ => {
                self.i = i + 1;
            }
        }
    }

    fn on_open_paren(&mut self, i: usize) {
        if let Some((expect, call_idx)) = self.pending_call {
            if expect == i {
                self.pending_call = None;
                self.push_frame(
                    FrameKind::Args {
                        call_idx,
                        arg_lambdas: Vec::new(),
                    },
                    i,
                );
                self.i = i + 1;
                return;
            }
        }
        if let Some((expect, kind, after)) = self.paren_intent {
            if expect == i {
                self.paren_intent = None;
                self.push_frame(FrameKind::Cond { kind, after }, i);
                self.i = i + 1;
                return;
            }
        }
        if let Some((expect, after)) = self.params_intent {
            if expect == i {
                self.params_intent = None;
                self.push_frame(FrameKind::Params { after }, i);
                self.i = i + 1;
                return;
            }
        }
        self.push_frame(FrameKind::Params { after: After::None }, i);
        self.i = i + 1;
    }

    fn on_close_paren(&mut self, i: usize) {
        if !self.top().is_paren() {
            // Stray `)`: recovery, ignore.
            self.i = i + 1;
            return;
        }
        let frame = self.frames.pop().expect("checked non-empty");
        let open = frame.open_tok;
        match frame.kind {
            FrameKind::Args {
                call_idx,
                arg_lambdas,
            } => {
                let call = &mut self.out.calls[call_idx];
                let mut args = Vec::new();
                for t in &self.toks[open + 1..i] {
                    if args.len() >= 256 {
                        break;
                    }
                    args.push(t.text.clone());
                }
                call.args = args;
                call.span = Span::between(&self.toks[call.callee_tok], &self.toks[i]);
                call.end_tok = i;
                let callee_is_request = call.callee.ends_with("Request");
                if callee_is_request && !arg_lambdas.is_empty() {
                    let n = arg_lambdas.len();
                    for (idx, (body, body_toks, payload)) in arg_lambdas.into_iter().enumerate() {
                        let kind = if (n == 1 && idx == 0) || (n >= 2 && idx == n - 2) {
                            Some(CallbackKind::Response)
                        } else if n >= 2 && idx == n - 1 {
                            Some(CallbackKind::ErrorListener)
                        } else {
                            None
                        };
                        if let Some(kind) = kind {
                            self.out.callbacks.push(RawCallback {
                                kind,
                                body,
                                body_toks,
                                payload,
                            });
                        }
                    }
                }
                self.last_call_closed = Some((call_idx, i));
                // Java anonymous class: `new X(...) {`.
                if self.lang == Language::Java
                    && self.out.calls[call_idx].is_ctor
                    && self.tok(i + 1).is_some_and(|t| t.is("{"))
                    && !self.structural_brace_pending()
                {
                    self.pending_brace = Some(PendingBrace::Anon);
                }
                // Kotlin trailing lambda: `call(...) {` — unless the brace
                // is already owed to a type body (`class A : B() {`).
                if self.lang == Language::Kotlin
                    && self.tok(i + 1).is_some_and(|t| t.is("{"))
                    && !self.structural_brace_pending()
                {
                    self.pending_trailing = Some((call_idx, i + 1));
                }
            }
            FrameKind::Cond { kind, after } => {
                let has_null = self.toks[open + 1..i].iter().any(|t| t.is_ident("null"));
                let span = if i > open + 1 {
                    Span::between(&self.toks[open + 1], &self.toks[i - 1])
                } else {
                    Span::of(&self.toks[open])
                };
                self.out.decisions.push(RawDecision {
                    kind,
                    span,
                    toks: (open + 1, i),
                    has_null,
                });
                self.pending_brace = match after {
                    After::Control => Some(PendingBrace::Control),
                    After::When => Some(PendingBrace::When),
                    After::Catch => Some(PendingBrace::Catch),
                    After::None => None,
                };
            }
            FrameKind::Params { after } => {
                self.pending_brace = match after {
                    After::Control => Some(PendingBrace::Control),
                    After::When => Some(PendingBrace::When),
                    After::Catch => Some(PendingBrace::Catch),
                    After::None => self.pending_brace.take(),
                };
            }
            _ => unreachable!("is_paren checked"),
        }
        self.i = i + 1;
    }

    fn on_open_brace(&mut self, i: usize) {
        // Trailing lambda expected right here?
        if let Some((call_idx, expect)) = self.pending_trailing {
            if expect == i {
                self.pending_trailing = None;
                let named_kind = sam_kind_for(&self.out.calls[call_idx].callee);
                let payload = self.lambda_payload(i);
                let direct_arg = matches!(self.top().kind, FrameKind::Args { .. });
                self.push_frame(
                    FrameKind::Lambda {
                        payload,
                        named_kind,
                        extends_call: Some(call_idx),
                        direct_arg,
                    },
                    i,
                );
                self.i = i + 1;
                return;
            }
            self.pending_trailing = None;
        }

        if let Some(pending) = self.pending_brace.take() {
            match pending {
                PendingBrace::Type(name) => {
                    self.type_stack.push(name.clone());
                    self.out.types.push(name);
                    self.push_frame(FrameKind::Type, i);
                }
                PendingBrace::Anon => self.push_frame(FrameKind::Anon, i),
                PendingBrace::Control => self.push_frame(FrameKind::Control, i),
                PendingBrace::When => self.push_frame(
                    FrameKind::WhenBody {
                        branch_start: i + 1,
                        arrow_line: 0,
                    },
                    i,
                ),
                PendingBrace::Try => self.push_frame(FrameKind::Try, i),
                PendingBrace::Catch => {
                    let try_idx = self.awaiting_catch;
                    self.push_frame(FrameKind::Catch { try_idx }, i);
                }
                PendingBrace::Finally => self.push_frame(FrameKind::Finally, i),
                PendingBrace::Init => self.push_frame(FrameKind::Init, i),
                PendingBrace::JavaLambda => self.push_frame(
                    FrameKind::Lambda {
                        payload: None,
                        named_kind: None,
                        extends_call: None,
                        direct_arg: matches!(self.top().kind, FrameKind::Args { .. }),
                    },
                    i,
                ),
            }
            self.i = i + 1;
            return;
        }

        if self.top().is_memberish() {
            self.open_member_body(i);
            return;
        }

        // Code context without a pending classification.
        if self.lang == Language::Kotlin {
            let payload = self.lambda_payload(i);
            let direct_arg = matches!(self.top().kind, FrameKind::Args { .. });
            self.push_frame(
                FrameKind::Lambda {
                    payload,
                    named_kind: None,
                    extends_call: None,
                    direct_arg,
                },
                i,
            );
        } else {
            self.push_frame(FrameKind::Block, i);
        }
        self.i = i + 1;
    }

    /// `{ a, b -> ...` — the first identifier of the last parameter (the
    /// payload position), or "it" when the lambda declares none.
    fn lambda_payload(&self, open: usize) -> Option<String> {
        let mut j = open + 1;
        let mut current_first: Option<String> = None;
        while let Some(t) = self.tok(j) {
            if j - open > 30 {
                break;
            }
            match t.text.as_str() {
                "->" => return current_first.or_else(|| Some("it".into())),
                "{" | "}" | ";" | "(" => break,
                "," => current_first = None,
                _ if t.kind == TokKind::Ident && current_first.is_none() => {
                    current_first = Some(t.text.clone());
                }
                _ => {}
            }
            j += 1;
        }
        Some("it".to_string())
    }

    /// A `{` directly inside a type body / file: classify the member whose
    /// tokens run from `member_start` to here.
    fn open_member_body(&mut self, i: usize) {
        let mstart = self.top().member_start;
        let buf = self.strip_annotations(mstart, i);
        let in_anon = matches!(self.top().kind, FrameKind::Anon);
        let at_file = matches!(self.top().kind, FrameKind::File);

        let decl = self.classify_member(&buf, i);
        match decl {
            Member::Init => {
                self.push_frame(FrameKind::Init, i);
            }
            Member::Method { name, params } => {
                let cb = callback_kind_for(&name).map(|kind| {
                    let payload = self.param_payload(&params);
                    self.out.callbacks.push(RawCallback {
                        kind,
                        body: Span::of(&self.toks[i]),
                        body_toks: (i + 1, i + 1),
                        payload,
                    });
                    self.out.callbacks.len() - 1
                });
                let midx = if in_anon {
                    None
                } else {
                    let qualified = if self.type_stack.is_empty() || at_file {
                        format!("{}.{}", self.file_tag, name)
                    } else {
                        format!("{}.{}", self.type_stack.join("."), name)
                    };
                    let sig_start = buf.first().copied().unwrap_or(i);
                    self.out.methods.push(RawMethod {
                        name,
                        qualified,
                        span: Span::of(&self.toks[sig_start]),
                        body: Span::of(&self.toks[i]),
                        body_toks: (i + 1, i + 1),
                    });
                    Some(self.out.methods.len() - 1)
                };
                self.push_frame(FrameKind::Body { midx, cb }, i);
            }
            Member::Other => {
                self.push_frame(FrameKind::Block, i);
            }
        }
        self.i = i + 1;
    }

    /// Token indices of the member signature with leading annotations
    /// removed.
    fn strip_annotations(&self, from: usize, to: usize) -> Vec<usize> {
        let mut idxs: Vec<usize> = (from..to).collect();
        while let Some(&first) = idxs.first() {
            if !self.toks[first].is("@") {
                break;
            }
            let mut k = 1; // skip '@' and the dotted name
            while k < idxs.len()
                && (self.toks[idxs[k]].kind == TokKind::Ident || self.toks[idxs[k]].is("."))
            {
                k += 1;
                if k >= 2
                    && !self.toks[idxs[k - 1]].is(".")
                    && self.toks[idxs[k - 1]].kind == TokKind::Ident
                {
                    break;
                }
            }
            if k < idxs.len() && self.toks[idxs[k]].is("(") {
                let mut depth = 0i32;
                while k < idxs.len() {
                    if self.toks[idxs[k]].is("(") {
                        depth += 1;
                    } else if self.toks[idxs[k]].is(")") {
                        depth -= 1;
                        if depth == 0 {
                            k += 1;
                            break;
                        }
                    }
                    k += 1;
                }
            }
            idxs.drain(..k.min(idxs.len()));
        }
        idxs
    }

    fn classify_member(&self, buf: &[usize], _brace: usize) -> Member {
        if buf.is_empty() {
            return Member::Init;
        }
        if buf.len() == 1 && self.toks[buf[0]].is_ident("static") {
            return Member::Init;
        }
        if self.lang == Language::Kotlin {
            if self.toks[buf[0]].is_ident("init") && buf.len() == 1 {
                return Member::Init;
            }
            if let Some(fpos) = buf.iter().position(|&k| self.toks[k].is_ident("fun")) {
                // `fun [<T>] [Recv.]name(params)...` — name is the ident
                // right before the first `(` after `fun`.
                let open = buf[fpos..]
                    .iter()
                    .position(|&k| self.toks[k].is("("))
                    .map(|p| p + fpos);
                if let Some(open) = open {
                    if open > fpos {
                        let name_tok = buf[open - 1];
                        if self.toks[name_tok].kind == TokKind::Ident {
                            let params = self.param_range(buf, open);
                            return Member::Method {
                                name: self.toks[name_tok].text.clone(),
                                params,
                            };
                        }
                    }
                }
                return Member::Other;
            }
            if buf.iter().any(|&k| self.toks[k].is_ident("constructor")) {
                let name = self.type_stack.last().cloned().unwrap_or_default();
                if let Some(open) = buf.iter().position(|&k| self.toks[k].is("(")) {
                    let params = self.param_range(buf, open);
                    return Member::Method { name, params };
                }
            }
            return Member::Other;
        }
        // Java: first top-level `(` — the ident before it is the name; an
        // `=` before it means a field initializer instead.
        let mut depth = 0i32;
        for (pos, &k) in buf.iter().enumerate() {
            let t = &self.toks[k];
            if depth == 0 && t.is("=") {
                return Member::Other;
            }
            if t.is("(") {
                if depth == 0 {
                    if pos == 0 {
                        return Member::Other;
                    }
                    let name_tok = buf[pos - 1];
                    if self.toks[name_tok].kind != TokKind::Ident
                        || is_keyword(self.lang, &self.toks[name_tok].text)
                    {
                        return Member::Other;
                    }
                    let params = self.param_range(buf, pos);
                    return Member::Method {
                        name: self.toks[name_tok].text.clone(),
                        params,
                    };
                }
                depth += 1;
            } else if t.is(")") {
                depth -= 1;
            } else if t.is("<") {
                depth += 1;
            } else if t.is(">") {
                depth = (depth - 1).max(0);
            }
        }
        Member::Other
    }

    /// Token indices of the parameter list contents for the `(` at buffer
    /// position `open`.
    fn param_range(&self, buf: &[usize], open: usize) -> Vec<usize> {
        let mut depth = 0i32;
        let mut out = Vec::new();
        for &k in &buf[open..] {
            let t = &self.toks[k];
            if t.is("(") {
                depth += 1;
                if depth == 1 {
                    continue;
                }
            } else if t.is(")") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            if depth >= 1 {
                out.push(k);
            }
        }
        out
    }

    /// The payload parameter of a callback method: the response/error value.
    /// Java: last identifier of the last parameter; Kotlin: the name before
    /// the type annotation of the last parameter.
    fn param_payload(&self, params: &[usize]) -> Option<String> {
        if params.is_empty() {
            return None;
        }
        let mut depth = 0i32;
        let mut last_start = 0usize;
        for (pos, &k) in params.iter().enumerate() {
            let t = &self.toks[k];
            match t.text.as_str() {
                "<" | "(" | "[" => depth += 1,
                ">" | ")" | "]" => depth -= 1,
                "," if depth == 0 => last_start = pos + 1,
                _ => {}
            }
        }
        let seg = &params[last_start..];
        match self.lang {
            Language::Kotlin => seg
                .iter()
                .find(|&&k| self.toks[k].kind == TokKind::Ident)
                .map(|&k| self.toks[k].text.clone()),
            Language::Java => seg
                .iter()
                .rev()
                .find(|&&k| self.toks[k].kind == TokKind::Ident)
                .map(|&k| self.toks[k].text.clone()),
        }
    }

    fn close_frame_at(&mut self, i: usize) {
        if self.frames.len() <= 1 || self.top().is_paren() {
            if self.frames.len() <= 1 {
                self.out.diagnostics.push(format!(
                    "stray closing brace at line {} ignored",
                    self.toks[i].line
                ));
            }
            // Stray `}` or unbalanced parens: pop paren frames defensively.
            while self.frames.len() > 1 && self.top().is_paren() {
                self.frames.pop();
            }
            if self.frames.len() > 1 {
                self.close_frame(i);
            }
            self.i = i + 1;
            return;
        }
        self.close_frame(i);
        self.i = i + 1;
    }

    fn close_frame(&mut self, close: usize) {
        let frame = self.frames.pop().expect("caller checks depth");
        let open = frame.open_tok;
        let body = Span::between(&self.toks[open], &self.toks[close]);
        match frame.kind {
            FrameKind::Type => {
                self.type_stack.pop();
            }
            FrameKind::Body { midx, cb } => {
                if let Some(m) = midx {
                    let meth = &mut self.out.methods[m];
                    meth.body = body;
                    meth.span = Span {
                        sl: meth.span.sl,
                        sc: meth.span.sc,
                        el: body.el,
                        ec: body.ec,
                    };
                    meth.body_toks = (open + 1, close);
                }
                if let Some(c) = cb {
                    let cbk = &mut self.out.callbacks[c];
                    cbk.body = body;
                    cbk.body_toks = (open + 1, close);
                }
            }
            FrameKind::Lambda {
                payload,
                named_kind,
                extends_call,
                direct_arg,
            } => {
                if let Some(call_idx) = extends_call {
                    let call = &mut self.out.calls[call_idx];
                    call.span = Span {
                        sl: call.span.sl,
                        sc: call.span.sc,
                        el: body.el,
                        ec: body.ec,
                    };
                    call.end_tok = close;
                    self.last_call_closed = Some((call_idx, close));
                }
                if let Some(kind) = named_kind {
                    self.out.callbacks.push(RawCallback {
                        kind,
                        body,
                        body_toks: (open + 1, close),
                        payload,
                    });
                } else if direct_arg {
                    if let Some(Frame {
                        kind: FrameKind::Args { arg_lambdas, .. },
                        ..
                    }) = self.frames.last_mut()
                    {
                        arg_lambdas.push((body, (open + 1, close), payload));
                    }
                }
            }
            FrameKind::Try => {
                self.out.tries.push(RawTry {
                    body,
                    body_toks: (open + 1, close),
                    catch_nonempty: false,
                });
                self.awaiting_catch = Some(self.out.tries.len() - 1);
            }
            FrameKind::Catch { try_idx: Some(t) } if close > open + 1 => {
                self.out.tries[t].catch_nonempty = true;
            }
            _ => {}
        }
        // The parent resumes a fresh member/statement.
        if let Some(parent) = self.frames.last_mut() {
            parent.member_start = close + 1;
            parent.stmt_start = close + 1;
        }
    }

    // ----- assignments, ternaries, arrows --------------------------------

    /// `name = <expr>`: record the binding for receiver-hint and
    /// result-variable guard resolution.
    fn on_assign(&mut self, i: usize) {
        // Expression-body members (`fun f() = ...`, `val x = ...`) end the
        // current member for buffer purposes; the expression tokens are
        // scanned normally and attributed by span.
        let memberish = self.top().is_memberish();
        if memberish && self.lang == Language::Kotlin {
            let mstart = self.top().member_start;
            let buf = self.strip_annotations(mstart, i);
            if let Some(fpos) = buf.iter().position(|&k| self.toks[k].is_ident("fun")) {
                self.record_expr_body_fun(&buf, fpos, i);
            }
        }
        // Field/property initializer: the member ends with the
        // expression; reset handled by `;`/newline/frame-pop logic.

        if i == 0 {
            return;
        }
        // Identify the bound name, scanning back over a type annotation.
        let mut j = i - 1;
        // Skip Kotlin nullability marker and generic argument lists.
        let mut guard = 0;
        while guard < 32 {
            guard += 1;
            let t = &self.toks[j];
            if t.is("?") && j > 0 {
                j -= 1;
                continue;
            }
            if t.is(">") {
                let mut depth = 0i32;
                while j > 0 {
                    if self.toks[j].is(">") {
                        depth += 1;
                    } else if self.toks[j].is("<") {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    j -= 1;
                }
                if j == 0 {
                    return;
                }
                j -= 1;
                continue;
            }
            break;
        }
        if self.toks[j].kind != TokKind::Ident || is_keyword(self.lang, &self.toks[j].text) {
            return;
        }
        let (name_tok, ty) = if j > 0 && self.toks[j - 1].is(":") && j >= 2 {
            // Kotlin `name: Type =`.
            let name_tok = j - 2;
            if self.toks[name_tok].kind != TokKind::Ident {
                return;
            }
            let ty: String = self.toks[j..i].iter().map(|t| t.text.as_str()).collect();
            (name_tok, Some(ty))
        } else {
            // `name =` or Java `Type name =`.
            let name_tok = j;
            if j != i - 1 {
                return;
            }
            if j > 0 && (self.toks[j - 1].is(".") || self.toks[j - 1].is("?.")) {
                return; // field store, not a local binding
            }
            let ty = if j > 0 {
                let p = &self.toks[j - 1];
                if p.kind == TokKind::Ident && !is_keyword(self.lang, &p.text) {
                    Some(p.text.clone())
                } else if p.is(">") || p.is("]") {
                    // `Call<User> name =` / `int[] name =`: take the base
                    // identifier of the type.
                    let mut depth = 0i32;
                    let mut k = j - 1;
                    loop {
                        let t = &self.toks[k];
                        if t.is(">") || t.is("]") {
                            depth += 1;
                        } else if t.is("<") || t.is("[") {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                    }
                    (k > 0 && self.toks[k - 1].kind == TokKind::Ident)
                        .then(|| self.toks[k - 1].text.clone())
                } else {
                    None
                }
            } else {
                None
            };
            (name_tok, ty)
        };
        let name = self.toks[name_tok].text.clone();
        if is_keyword(self.lang, &name) {
            return;
        }
        let end = self.expr_end(i + 1);
        let init_text: String = self.toks[i + 1..end.min(i + 41)]
            .iter()
            .map(|t| t.text.as_str())
            .collect();
        self.out.decls.push(RawDecl {
            name,
            ty,
            init_text,
            name_tok,
            init_toks: (i + 1, end),
        });
    }

    /// Kotlin `fun f(...) = expr`: record a method whose body is the
    /// expression region.
    fn record_expr_body_fun(&mut self, buf: &[usize], fpos: usize, eq: usize) {
        let open = buf[fpos..]
            .iter()
            .position(|&k| self.toks[k].is("("))
            .map(|p| p + fpos);
        let Some(open) = open else { return };
        if open == fpos {
            return;
        }
        let name_tok = buf[open - 1];
        if self.toks[name_tok].kind != TokKind::Ident {
            return;
        }
        let name = self.toks[name_tok].text.clone();
        let end = self.expr_end(eq + 1);
        if end <= eq + 1 {
            return;
        }
        let at_file = matches!(self.top().kind, FrameKind::File);
        let qualified = if self.type_stack.is_empty() || at_file {
            format!("{}.{}", self.file_tag, name)
        } else {
            format!("{}.{}", self.type_stack.join("."), name)
        };
        let sig_start = buf.first().copied().unwrap_or(eq);
        let body = Span::between(&self.toks[eq + 1], &self.toks[end - 1]);
        self.out.methods.push(RawMethod {
            name,
            qualified,
            span: Span {
                sl: self.toks[sig_start].line,
                sc: self.toks[sig_start].col,
                el: body.el,
                ec: body.ec,
            },
            body,
            body_toks: (eq + 1, end),
        });
    }

    /// End (exclusive token index) of an expression starting at `from`:
    /// stops at `;`, at a top-level `,`/`)`/`}`, or (Kotlin) at a newline
    /// statement boundary.
    fn expr_end(&self, from: usize) -> usize {
        let mut depth = 0i32;
        let mut j = from;
        while let Some(t) = self.tok(j) {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return j;
                    }
                    depth -= 1;
                }
                ";" if depth == 0 => return j,
                "," if depth == 0 => return j,
                _ => {}
            }
            if self.lang == Language::Kotlin && depth == 0 && j > from {
                let prev = &self.toks[j - 1];
                if t.line > prev.end_line
                    && !CONT_END.contains(&prev.text.as_str())
                    && !CONT_START.contains(&t.text.as_str())
                {
                    return j;
                }
            }
            j += 1;
            if j - from > 4000 {
                break;
            }
        }
        j.min(self.toks.len())
    }

    /// Java ternary `cond ? a : b` — the tokens from the statement start to
    /// `?` act as a decision region.
    fn on_ternary(&mut self, i: usize) {
        let start = self.top().stmt_start;
        if start >= i {
            return;
        }
        let has_null = self.toks[start..i].iter().any(|t| t.is_ident("null"));
        self.out.decisions.push(RawDecision {
            kind: DecisionKind::Ternary,
            span: Span::between(&self.toks[start], &self.toks[i - 1]),
            toks: (start, i),
            has_null,
        });
    }

    fn on_arrow(&mut self, i: usize) {
        match self.lang {
            Language::Java => {
                // Lambda: `(x) -> {` or `x -> {`; expression bodies need no
                // frame.
                if self.tok(i + 1).is_some_and(|t| t.is("{")) {
                    self.pending_brace = Some(PendingBrace::JavaLambda);
                }
            }
            Language::Kotlin => {
                // Inside a `when` body, `cond -> ...` marks a branch
                // condition region.
                if let FrameKind::WhenBody { branch_start, .. } = self.top().kind {
                    if branch_start < i && branch_start != usize::MAX {
                        let has_null = self.toks[branch_start..i]
                            .iter()
                            .any(|t| t.is_ident("null"));
                        self.out.decisions.push(RawDecision {
                            kind: DecisionKind::WhenBranch,
                            span: Span::between(&self.toks[branch_start], &self.toks[i - 1]),
                            toks: (branch_start, i),
                            has_null,
                        });
                    }
                    let line = self.toks[i].line;
                    if let FrameKind::WhenBody {
                        branch_start,
                        arrow_line,
                    } = &mut self.top_mut().kind
                    {
                        *branch_start = usize::MAX;
                        *arrow_line = line;
                    }
                    if self.tok(i + 1).is_some_and(|t| t.is("{")) {
                        self.pending_brace = Some(PendingBrace::Control);
                    }
                }
            }
        }
    }
}

enum Member {
    Init,
    Method { name: String, params: Vec<usize> },
    Other,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::lexer::lex;

    fn scan_java(src: &str) -> RawScan {
        let toks = lex(src, Language::Java);
        scan(&toks, Language::Java, "TestKt")
    }

    fn scan_kotlin(src: &str) -> RawScan {
        let toks = lex(src, Language::Kotlin);
        scan(&toks, Language::Kotlin, "TestKt")
    }

    #[test]
    fn java_method_and_call() {
        let raw = scan_java("class A { void go() throws Exception { url.openConnection(); } }");
        assert_eq!(raw.types, vec!["A"]);
        assert_eq!(raw.methods.len(), 1);
        assert_eq!(raw.methods[0].qualified, "A.go");
        let call = raw
            .calls
            .iter()
            .find(|c| c.callee == "openConnection")
            .unwrap();
        assert_eq!(call.receiver_raw.as_deref(), Some("url"));
        assert!(!call.is_ctor);
        assert!(raw.methods[0].body.contains(&call.span));
    }

    #[test]
    fn java_constructor_and_anon_class() {
        let raw = scan_java(
            r#"class A { void go() {
                 call.enqueue(new Callback() {
                   public void onResponse(Call c, Response response) { use(response); }
                   public void onFailure(Call c, Throwable t) { log(t); }
                 });
               } }"#,
        );
        assert!(raw
            .calls
            .iter()
            .any(|c| c.callee == "Callback" && c.is_ctor));
        assert_eq!(raw.callbacks.len(), 2);
        let on_resp = raw
            .callbacks
            .iter()
            .find(|c| c.kind == CallbackKind::Response)
            .unwrap();
        assert_eq!(on_resp.payload.as_deref(), Some("response"));
        // The callback bodies sit inside the enqueue call's span.
        let enq = raw.calls.iter().find(|c| c.callee == "enqueue").unwrap();
        assert!(enq.span.contains(&on_resp.body));
        // Only the named method `go` is a method; anon methods are regions.
        assert_eq!(raw.methods.len(), 1);
    }

    #[test]
    fn kotlin_object_expression_callbacks() {
        let raw = scan_kotlin(
            r#"class A { fun go() {
                 call.enqueue(object : Callback<User> {
                   override fun onResponse(call: Call<User>, response: Response<User>) { use(response) }
                   override fun onFailure(call: Call<User>, t: Throwable) { }
                 })
               } }"#,
        );
        assert_eq!(raw.methods.len(), 1, "anon methods are not model methods");
        assert_eq!(raw.callbacks.len(), 2);
        let on_resp = raw
            .callbacks
            .iter()
            .find(|c| c.kind == CallbackKind::Response)
            .unwrap();
        assert_eq!(on_resp.payload.as_deref(), Some("response"));
    }

    #[test]
    fn kotlin_ctor_heuristic_and_imports() {
        let raw = scan_kotlin(
            "import okhttp3.OkHttpClient\nimport a.b.C as D\nval client = OkHttpClient()\n",
        );
        assert!(raw.imports.contains("okhttp3.OkHttpClient"));
        assert!(raw.imports.contains("a.b.C"));
        let ctor = raw
            .calls
            .iter()
            .find(|c| c.callee == "OkHttpClient")
            .unwrap();
        assert!(ctor.is_ctor);
        assert_eq!(raw.decls.len(), 1);
        assert_eq!(raw.decls[0].name, "client");
        assert_eq!(raw.decls[0].init_text, "OkHttpClient()");
    }

    #[test]
    fn try_catch_emptiness() {
        let raw = scan_java(
            "class A { void f() { try { g(); } catch (Exception e) { } try { h(); } catch (Exception e) { log(e); } } }",
        );
        assert_eq!(raw.tries.len(), 2);
        assert!(!raw.tries[0].catch_nonempty);
        assert!(raw.tries[1].catch_nonempty);
        let g = raw.calls.iter().find(|c| c.callee == "g").unwrap();
        assert!(raw.tries[0].body.contains(&g.span));
    }

    #[test]
    fn decision_regions_if_and_ternary() {
        let raw = scan_java(
            "class A { void f() { if (x.body() != null) { use(x); } int y = ok() ? 1 : 2; } }",
        );
        let ifc = raw
            .decisions
            .iter()
            .find(|d| d.kind == DecisionKind::IfCond)
            .unwrap();
        assert!(ifc.has_null);
        let body = raw.calls.iter().find(|c| c.callee == "body").unwrap();
        assert!(ifc.span.contains(&body.span));
        let tern = raw
            .decisions
            .iter()
            .find(|d| d.kind == DecisionKind::Ternary)
            .unwrap();
        let ok = raw.calls.iter().find(|c| c.callee == "ok").unwrap();
        assert!(tern.span.contains(&ok.span));
        assert!(!tern.has_null);
    }

    #[test]
    fn kotlin_when_subject_region() {
        let raw = scan_kotlin(
            "class A { fun f(r: Response) { when (r.code()) { 200 -> ok()\nelse -> bad() } } }",
        );
        let subj = raw
            .decisions
            .iter()
            .find(|d| d.kind == DecisionKind::WhenSubject)
            .unwrap();
        let code = raw.calls.iter().find(|c| c.callee == "code").unwrap();
        assert!(subj.span.contains(&code.span));
    }

    #[test]
    fn volley_positional_lambdas() {
        let raw = scan_kotlin(
            r#"class A { fun f(queue: RequestQueue) {
                 val req = StringRequest(url, { resp -> show(resp) }, { err -> log(err) })
                 queue.add(req)
               } }"#,
        );
        let kinds: Vec<CallbackKind> = raw.callbacks.iter().map(|c| c.kind).collect();
        assert!(kinds.contains(&CallbackKind::Response));
        assert!(kinds.contains(&CallbackKind::ErrorListener));
        let resp = raw
            .callbacks
            .iter()
            .find(|c| c.kind == CallbackKind::Response)
            .unwrap();
        assert_eq!(resp.payload.as_deref(), Some("resp"));
        let add = raw.calls.iter().find(|c| c.callee == "add").unwrap();
        assert_eq!(add.receiver_raw.as_deref(), Some("queue"));
        let decl = raw.decls.iter().find(|d| d.name == "queue");
        assert!(decl.is_none(), "parameters are not bindings");
        let req_decl = raw.decls.iter().find(|d| d.name == "req").unwrap();
        assert!(req_decl.init_text.starts_with("StringRequest("));
    }

    #[test]
    fn kotlin_sam_trailing_lambda() {
        let raw = scan_kotlin(
            "class A { fun f() { val l = Response.Listener<String> { resp -> show(resp) } } }",
        );
        let cb = raw
            .callbacks
            .iter()
            .find(|c| c.kind == CallbackKind::Response)
            .unwrap();
        assert_eq!(cb.payload.as_deref(), Some("resp"));
        let show = raw.calls.iter().find(|c| c.callee == "show").unwrap();
        assert!(cb.body.contains(&show.span));
    }

    #[test]
    fn java_field_initializer_calls_have_no_method() {
        let raw = scan_java(
            "class A { private final OkHttpClient client = new OkHttpClient(); void f() { g(); } }",
        );
        let ctor = raw
            .calls
            .iter()
            .find(|c| c.callee == "OkHttpClient")
            .unwrap();
        assert!(ctor.is_ctor);
        assert!(!raw.methods[0].body.contains(&ctor.span));
        assert_eq!(raw.methods.len(), 1);
    }

    #[test]
    fn member_access_is_flagged() {
        let raw = scan_kotlin("class A { fun f(r: NetworkResponse) { val c = r.statusCode } }");
        let sc = raw.calls.iter().find(|c| c.callee == "statusCode").unwrap();
        assert!(sc.is_member);
        assert_eq!(sc.receiver_raw.as_deref(), Some("r"));
    }

    #[test]
    fn kotlin_expression_body_function() {
        let raw = scan_kotlin("fun twice(x: Int) = mul(x, 2)\nfun other() { }");
        assert_eq!(raw.methods.len(), 2);
        let twice = raw.methods.iter().find(|m| m.name == "twice").unwrap();
        assert_eq!(twice.qualified, "TestKt.twice");
        let mul = raw.calls.iter().find(|c| c.callee == "mul").unwrap();
        assert!(twice.body.contains(&mul.span));
    }

    #[test]
    fn unbalanced_input_recovers() {
        let raw = scan_java("class A { void f() { g(; } ");
        assert_eq!(raw.methods.len(), 1);
        assert!(raw.calls.iter().any(|c| c.callee == "g"));
    }

    #[test]
    fn receiver_chain_with_call() {
        let raw = scan_java("class A { void f() { Volley.newRequestQueue(this).add(req); } }");
        let add = raw.calls.iter().find(|c| c.callee == "add").unwrap();
        assert_eq!(
            add.receiver_raw.as_deref(),
            Some("Volley.newRequestQueue(this)")
        );
    }
}
