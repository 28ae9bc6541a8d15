//! Token stream shared by the Java and Kotlin structural scanners.
//!
//! Comments are dropped, string/char literals are collapsed into single
//! tokens (Kotlin `${...}` templates are swallowed whole, including nested
//! strings), and a small set of compound operators is fused so that the
//! scanner can match on token text alone.

use crate::source::Language;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokKind {
    Ident,
    Punct,
    Str,
    Char,
    Num,
}

#[derive(Debug, Clone)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub text: String,
    /// 1-based start position.
    pub line: u32,
    pub col: u32,
    /// End position; `end_col` points one past the last character.
    pub end_line: u32,
    pub end_col: u32,
}

impl Tok {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn is_ident(&self, text: &str) -> bool {
        self.kind == TokKind::Ident && self.text == text
    }
}

/// Operators emitted as one token; longest match wins.
const FUSED: &[&str] = &[
    "?.", "?:", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=",
];

struct Cursor<'a> {
    rest: &'a str,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.rest.chars().nth(1)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest.starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn is_eof(&self) -> bool {
        self.rest.is_empty()
    }
}

/// Tokenize `text`, tolerating a leading byte-order mark. Never fails:
/// unrecognized characters become single-character punctuation tokens and
/// unterminated literals extend to end of input.
pub(crate) fn lex(text: &str, language: Language) -> Vec<Tok> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut cur = Cursor {
        rest: text,
        line: 1,
        col: 1,
    };
    let mut toks = Vec::new();

    while let Some(c) = cur.peek() {
        // Whitespace (CR counts as plain whitespace; LF advances the line).
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        // Comments.
        if cur.starts_with("//") {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if cur.starts_with("/*") {
            skip_block_comment(&mut cur, language == Language::Kotlin);
            continue;
        }

        let (line, col) = (cur.line, cur.col);

        // String literals (raw/text-block `"""` first).
        if cur.starts_with("\"\"\"") {
            let s = scan_raw_string(&mut cur);
            toks.push(tok(TokKind::Str, s, line, col, &cur));
            continue;
        }
        if c == '"' {
            let s = scan_string(&mut cur);
            toks.push(tok(TokKind::Str, s, line, col, &cur));
            continue;
        }
        if c == '\'' {
            let s = scan_char(&mut cur);
            let kind = if s.len() >= 2 && s.ends_with('\'') {
                TokKind::Char
            } else {
                TokKind::Punct
            };
            toks.push(tok(kind, s, line, col, &cur));
            continue;
        }

        // Identifiers (plus Kotlin backquoted names).
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if c.is_alphanumeric() || c == '_' || c == '$' {
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            toks.push(tok(TokKind::Ident, s, line, col, &cur));
            continue;
        }
        if c == '`' {
            cur.bump();
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                cur.bump();
                if c == '`' || c == '\n' {
                    break;
                }
                s.push(c);
            }
            toks.push(tok(TokKind::Ident, s, line, col, &cur));
            continue;
        }

        // Numbers (coarse: soaks up hex digits, underscores, exponents).
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                    // A dot only belongs to the number when followed by a
                    // digit (else `1.toString()` would swallow the call).
                    if c == '.' && !cur.peek2().is_some_and(|d| d.is_ascii_digit()) {
                        break;
                    }
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            toks.push(tok(TokKind::Num, s, line, col, &cur));
            continue;
        }

        // Fused operators, then single-character punctuation.
        if let Some(op) = FUSED.iter().find(|op| cur.starts_with(op)) {
            cur.bump();
            cur.bump();
            toks.push(tok(TokKind::Punct, op.to_string(), line, col, &cur));
            continue;
        }
        cur.bump();
        toks.push(tok(TokKind::Punct, c.to_string(), line, col, &cur));
    }

    toks
}

fn tok(kind: TokKind, text: String, line: u32, col: u32, cur: &Cursor) -> Tok {
    Tok {
        kind,
        text,
        line,
        col,
        end_line: cur.line,
        end_col: cur.col,
    }
}

fn skip_block_comment(cur: &mut Cursor, nested: bool) {
    cur.bump();
    cur.bump();
    let mut depth = 1u32;
    while !cur.is_eof() {
        if nested && cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            depth += 1;
        } else if cur.starts_with("*/") {
            cur.bump();
            cur.bump();
            depth -= 1;
            if depth == 0 {
                return;
            }
        } else {
            cur.bump();
        }
    }
}

/// `"..."` with backslash escapes and `${...}` templates (brace-balanced,
/// strings inside the template skipped recursively).
fn scan_string(cur: &mut Cursor) -> String {
    let mut s = String::from('"');
    cur.bump();
    while let Some(c) = cur.peek() {
        if c == '\\' {
            s.push(c);
            cur.bump();
            if let Some(e) = cur.bump() {
                s.push(e);
            }
            continue;
        }
        if c == '\n' {
            // Unterminated on this line; stop rather than eating the file.
            break;
        }
        if cur.starts_with("${") {
            skip_template(cur, &mut s);
            continue;
        }
        s.push(c);
        cur.bump();
        if c == '"' {
            break;
        }
    }
    s
}

/// `"""..."""`: no escapes; templates still interpolate.
fn scan_raw_string(cur: &mut Cursor) -> String {
    let mut s = String::from("\"\"\"");
    for _ in 0..3 {
        cur.bump();
    }
    while !cur.is_eof() {
        if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                cur.bump();
            }
            s.push_str("\"\"\"");
            return s;
        }
        if cur.starts_with("${") {
            skip_template(cur, &mut s);
            continue;
        }
        s.push(cur.bump().unwrap());
    }
    s
}

fn skip_template(cur: &mut Cursor, s: &mut String) {
    s.push_str("${");
    cur.bump();
    cur.bump();
    let mut depth = 1u32;
    while let Some(c) = cur.peek() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    s.push('}');
                    cur.bump();
                    return;
                }
            }
            '"' => {
                // A nested string inside the template expression.
                let inner = if cur.starts_with("\"\"\"") {
                    scan_raw_string(cur)
                } else {
                    scan_string(cur)
                };
                s.push_str(&inner);
                continue;
            }
            _ => {}
        }
        s.push(c);
        cur.bump();
    }
}

fn scan_char(cur: &mut Cursor) -> String {
    let mut s = String::from('\'');
    cur.bump();
    let mut count = 0;
    while let Some(c) = cur.peek() {
        if c == '\n' || count > 8 {
            break;
        }
        if c == '\\' {
            s.push(c);
            cur.bump();
            if let Some(e) = cur.bump() {
                s.push(e);
            }
            count += 2;
            continue;
        }
        s.push(c);
        cur.bump();
        count += 1;
        if c == '\'' {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str, lang: Language) -> Vec<String> {
        lex(src, lang).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn idents_calls_and_operators() {
        assert_eq!(
            texts("resp.code() != 200", Language::Java),
            vec!["resp", ".", "code", "(", ")", "!=", "200"]
        );
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(
            texts("a // x\n/* y\nz */ b", Language::Java),
            vec!["a", "b"]
        );
    }

    #[test]
    fn kotlin_block_comments_nest() {
        assert_eq!(texts("/* a /* b */ c */ d", Language::Kotlin), vec!["d"]);
        // Java does not nest: the comment closes at the first `*/`.
        assert_eq!(
            texts("/* a /* b */ c */ d", Language::Java),
            vec!["c", "*", "/", "d"]
        );
    }

    #[test]
    fn string_template_swallows_braces_and_calls() {
        let toks = texts(r#"val s = "n=${f(x) { g() }}" ; h()"#, Language::Kotlin);
        assert!(toks.contains(&r#""n=${f(x) { g() }}""#.to_string()));
        assert!(toks.contains(&"h".to_string()));
        assert!(!toks.contains(&"g".to_string()));
    }

    #[test]
    fn raw_strings_span_lines() {
        let toks = lex("\"\"\"a\nb\"\"\" x", Language::Kotlin);
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].text, "x");
        assert_eq!(toks[1].line, 2);
    }

    #[test]
    fn positions_are_one_based_with_exclusive_end() {
        let toks = lex("ab cd", Language::Java);
        assert_eq!((toks[0].line, toks[0].col, toks[0].end_col), (1, 1, 3));
        assert_eq!((toks[1].line, toks[1].col, toks[1].end_col), (1, 4, 6));
    }

    #[test]
    fn bom_is_tolerated() {
        let toks = lex("\u{feff}x", Language::Java);
        assert_eq!(toks[0].text, "x");
        assert_eq!(toks[0].col, 1);
    }

    #[test]
    fn safe_call_and_elvis_fuse() {
        assert_eq!(
            texts("a?.b ?: c", Language::Kotlin),
            vec!["a", "?.", "b", "?:", "c"]
        );
        // Java ternary `?` stays single so the scanner can see it.
        assert_eq!(
            texts("x ? y : z", Language::Java),
            vec!["x", "?", "y", ":", "z"]
        );
    }

    #[test]
    fn char_literals_do_not_derail() {
        assert_eq!(
            texts("c == '\\'' && f()", Language::Java),
            vec!["c", "==", "'\\''", "&&", "f", "(", ")"]
        );
    }

    #[test]
    fn number_then_method_call() {
        assert_eq!(
            texts("1.toString()", Language::Kotlin),
            vec!["1", ".", "toString", "(", ")"]
        );
        assert_eq!(texts("1.5f", Language::Java), vec!["1.5f"]);
    }
}
