//! Text formats: `.cm` market files, matching literals, and set literals.
//!
//! ```text
//! # comment
//! hospitals: h1 h2 h3
//! couple c1 = (s1, s2)
//! prefs hospital h1: s2 > s1
//! prefs couple c1: (h3,h1) > (h2,u)
//! ```

use std::fmt::Write as _;

use farsight_core::market::{Name, RawPair, UNEMPLOYED_KEYWORD};
use farsight_core::{Diagnostic, Market, MarketBuilder, Matching, Slot, Span, StudentId};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens; `#` starts a comment running to the end of the line.
fn lex(text: &str, first_line: u32, errors: &mut Vec<Diagnostic>) -> Vec<Token> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = first_line + i as u32;
        let chars: Vec<char> = line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            let span = Span::new(line_no, j as u32 + 1);
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                j += 1;
            } else if is_ident_start(c) {
                let start = j;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..j].iter().collect()),
                    span,
                });
            } else if ":=(),>{}[]".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    span,
                });
                j += 1;
            } else {
                errors.push(Diagnostic::error(span, format!("unexpected character `{c}`")));
                j += 1;
            }
        }
    }
    out
}

struct Cursor<'t> {
    toks: &'t [Token],
    pos: usize,
    /// Where "end of input" errors point.
    end: Span,
}

impl<'t> Cursor<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> Span {
        self.peek().map_or(self.end, |t| t.span)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => format!("`{s}`"),
            Some(Token { tok: Tok::Punct(c), .. }) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Diagnostic> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Diagnostic::error(
                self.here(),
                format!("expected `{c}`, found {}", self.found()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Name, Diagnostic> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s),
                span,
            }) => {
                self.pos += 1;
                Ok(Name::at(s.clone(), *span))
            }
            _ => Err(Diagnostic::error(
                self.here(),
                format!("expected {what}, found {}", self.found()),
            )),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Diagnostic::error(self.here(), format!("unexpected {}", self.found())))
        }
    }
}

fn line_end(line_no: u32, line: &str) -> Span {
    Span::new(line_no, line.chars().count() as u32 + 1)
}

/// Parses a market file. Syntax errors are reported for every line; if there
/// are none, the market is validated and all semantic errors are reported.
pub fn parse_market(text: &str) -> Result<Market, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut b = MarketBuilder::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u32 + 1;
        let toks = lex(line, line_no, &mut errors);
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            end: line_end(line_no, line),
        };
        if let Err(d) = statement(&mut cur, &mut b) {
            errors.push(d);
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    b.build()
}

fn statement(cur: &mut Cursor<'_>, b: &mut MarketBuilder) -> Result<(), Diagnostic> {
    let head = cur.ident("`hospitals`, `couple` or `prefs`")?;
    match head.text.as_str() {
        "hospitals" => {
            cur.expect(':')?;
            while !cur.at_end() {
                let h = cur.ident("a hospital id")?;
                b.add_hospital(h);
            }
        }
        "couple" => {
            let c = cur.ident("a couple id")?;
            cur.expect('=')?;
            cur.expect('(')?;
            let s1 = cur.ident("a student id")?;
            cur.expect(',')?;
            let s2 = cur.ident("a student id")?;
            cur.expect(')')?;
            cur.finish()?;
            b.add_couple(c, [s1, s2]);
        }
        "prefs" => {
            let kind = cur.ident("`hospital` or `couple`")?;
            match kind.text.as_str() {
                "hospital" => {
                    let h = cur.ident("a hospital id")?;
                    cur.expect(':')?;
                    let mut list = Vec::new();
                    if !cur.at_end() {
                        list.push(cur.ident("a student id")?);
                        while cur.eat('>') {
                            list.push(cur.ident("a student id")?);
                        }
                    }
                    cur.finish()?;
                    b.add_hospital_prefs(h, list);
                }
                "couple" => {
                    let c = cur.ident("a couple id")?;
                    cur.expect(':')?;
                    let mut list = Vec::new();
                    if !cur.at_end() {
                        list.push(pair(cur)?);
                        while cur.eat('>') {
                            list.push(pair(cur)?);
                        }
                    }
                    cur.finish()?;
                    b.add_couple_prefs(c, list);
                }
                other => {
                    return Err(Diagnostic::error(
                        kind.span,
                        format!("expected `hospital` or `couple`, found `{other}`"),
                    ))
                }
            }
        }
        other => {
            return Err(Diagnostic::error(
                head.span,
                format!("expected `hospitals`, `couple` or `prefs`, found `{other}`"),
            ))
        }
    }
    Ok(())
}

fn pair(cur: &mut Cursor<'_>) -> Result<RawPair, Diagnostic> {
    let span = cur.here();
    cur.expect('(')?;
    let slot = |n: Name| (n.text != UNEMPLOYED_KEYWORD).then_some(n);
    let first = slot(cur.ident("a hospital id or `u`")?);
    cur.expect(',')?;
    let second = slot(cur.ident("a hospital id or `u`")?);
    cur.expect(')')?;
    Ok(RawPair { first, second, span })
}

/// Canonical text: agents in index order, one statement per line.
pub fn serialize_market(market: &Market) -> String {
    let mut out = String::new();
    out.push_str("hospitals:");
    for h in market.hospitals() {
        write!(out, " {}", market.hospital_name(h)).unwrap();
    }
    out.push('\n');
    for c in market.couples() {
        let [a, b] = c.students();
        writeln!(
            out,
            "couple {} = ({}, {})",
            market.couple_name(c),
            market.student_name(a),
            market.student_name(b)
        )
        .unwrap();
    }
    let mut prefs = String::new();
    for h in market.hospitals() {
        let list = market.hospital_list(h);
        if !list.is_empty() {
            let names: Vec<&str> = list.iter().map(|&s| market.student_name(s)).collect();
            writeln!(
                prefs,
                "prefs hospital {}: {}",
                market.hospital_name(h),
                names.join(" > ")
            )
            .unwrap();
        }
    }
    for c in market.couples() {
        let list = market.couple_list(c);
        if !list.is_empty() {
            let pairs: Vec<String> = list
                .iter()
                .map(|p| format!("({},{})", market.slot_name(p.0), market.slot_name(p.1)))
                .collect();
            writeln!(prefs, "prefs couple {}: {}", market.couple_name(c), pairs.join(" > ")).unwrap();
        }
    }
    if !prefs.is_empty() {
        out.push('\n');
        out.push_str(&prefs);
    }
    out
}

/// `{s1:h2, s2:h3, s3:u, s4:u}` with every student listed.
pub fn serialize_matching(market: &Market, m: &Matching) -> String {
    let parts: Vec<String> = market
        .students()
        .map(|s| format!("{}:{}", market.student_name(s), market.slot_name(m.slot(s))))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// `[{...}, {...}]`
pub fn serialize_set(market: &Market, set: &[Matching]) -> String {
    let parts: Vec<String> = set.iter().map(|m| serialize_matching(market, m)).collect();
    format!("[{}]", parts.join(", "))
}

fn matching_body(cur: &mut Cursor<'_>, market: &Market) -> Result<Matching, Diagnostic> {
    cur.expect('{')?;
    let mut slots = vec![Slot::Unemployed; market.student_count()];
    let mut seen_students: Vec<bool> = vec![false; market.student_count()];
    let mut holder: Vec<Option<StudentId>> = vec![None; market.hospital_count()];
    if !cur.eat('}') {
        loop {
            let s = cur.ident("a student id")?;
            let Some(sid) = market.student_by_name(&s.text) else {
                return Err(Diagnostic::error(s.span, format!("unknown student {}", s.text)));
            };
            if seen_students[sid.0] {
                return Err(Diagnostic::error(s.span, format!("student {} assigned twice", s.text)));
            }
            seen_students[sid.0] = true;
            cur.expect(':')?;
            let h = cur.ident("a hospital id or `u`")?;
            if h.text != UNEMPLOYED_KEYWORD {
                let Some(hid) = market.hospital_by_name(&h.text) else {
                    return Err(Diagnostic::error(h.span, format!("unknown hospital {}", h.text)));
                };
                if holder[hid.0].is_some() {
                    return Err(Diagnostic::error(h.span, format!("hospital {} assigned twice", h.text)));
                }
                holder[hid.0] = Some(sid);
                slots[sid.0] = Slot::Hospital(hid);
            }
            if cur.eat('}') {
                break;
            }
            cur.expect(',')?;
            if cur.eat('}') {
                break;
            }
        }
    }
    Matching::from_slots(market, slots).map_err(|e| Diagnostic::error(Span::NONE, e.to_string()))
}

fn single_line(text: &str) -> (Vec<Token>, Span, Vec<Diagnostic>) {
    let mut errors = Vec::new();
    let toks = lex(text, 1, &mut errors);
    let last = text.lines().count().max(1) as u32;
    let end = Span::new(last, text.lines().last().map_or(0, |l| l.chars().count()) as u32 + 1);
    (toks, end, errors)
}

/// Parses a matching literal; omitted students are unemployed.
pub fn parse_matching(text: &str, market: &Market) -> Result<Matching, Diagnostic> {
    let (toks, end, errors) = single_line(text);
    if let Some(d) = errors.into_iter().next() {
        return Err(d);
    }
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        end,
    };
    let m = matching_body(&mut cur, market)?;
    cur.finish()?;
    Ok(m)
}

/// Parses `[m, m, ...]` (or `{m, m, ...}`) where each element is a matching literal or a name
/// that `named` resolves.
pub fn parse_set(
    text: &str,
    market: &Market,
    named: &dyn Fn(&str) -> Option<Matching>,
) -> Result<Vec<Matching>, Diagnostic> {
    let (toks, end, errors) = single_line(text);
    if let Some(d) = errors.into_iter().next() {
        return Err(d);
    }
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        end,
    };
    // `{mu1, mu2}` is accepted too; `{s1:h1}` alone stays a matching.
    let brace_set = matches!(
        cur.peek(),
        Some(Token {
            tok: Tok::Punct('{'),
            ..
        })
    ) && match (toks.get(1), toks.get(2)) {
        (
            Some(Token {
                tok: Tok::Punct('{'), ..
            }),
            _,
        ) => true,
        (Some(Token { tok: Tok::Ident(_), .. }), Some(Token { tok: Tok::Punct(p), .. })) => *p != ':',
        _ => false,
    };
    let close = if brace_set {
        cur.expect('{')?;
        '}'
    } else {
        cur.expect('[')?;
        ']'
    };
    let mut out = Vec::new();
    if !cur.eat(close) {
        loop {
            out.push(element(&mut cur, market, named)?);
            if cur.eat(close) {
                break;
            }
            cur.expect(',')?;
        }
    }
    cur.finish()?;
    Ok(out)
}

fn element(
    cur: &mut Cursor<'_>,
    market: &Market,
    named: &dyn Fn(&str) -> Option<Matching>,
) -> Result<Matching, Diagnostic> {
    if let Some(Token { tok: Tok::Ident(_), .. }) = cur.peek() {
        let n = cur.ident("a matching")?;
        return named(&n.text).ok_or_else(|| Diagnostic::error(n.span, format!("unknown matching name {}", n.text)));
    }
    matching_body(cur, market)
}

/// A matching literal, or a name that `named` resolves.
pub fn parse_matching_or_name(
    text: &str,
    market: &Market,
    named: &dyn Fn(&str) -> Option<Matching>,
) -> Result<Matching, Diagnostic> {
    let (toks, end, errors) = single_line(text);
    if let Some(d) = errors.into_iter().next() {
        return Err(d);
    }
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        end,
    };
    let m = element(&mut cur, market, named)?;
    cur.finish()?;
    Ok(m)
}
