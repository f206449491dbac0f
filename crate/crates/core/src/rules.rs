//! Compiling matching rules (a regex subset) into prefix-accepting NFAs.
//!
//! Supported syntax: literals, escaped bytes `\xNN`, the usual single-byte
//! escapes, perl classes `\d \D \w \W \s \S` (ASCII), character classes
//! `[...]` with ranges and negation, `.` (any byte but `\n`), the
//! quantifiers `*`, `+`, `?`, `{m}`, `{m,n}`, `{m,}`, alternation,
//! (optionally named-less) grouping, and a whole-pattern case-insensitive
//! flag written `(?i)` at the start. Everything else (backreferences,
//! lookaround, lazy quantifiers, anchors other than a leading `^`) raises an
//! error naming the construct.
//!
//! Search semantics follow signature matching: a pattern matches anywhere in
//! the packet unless anchored with a leading `^`, i.e. an implicit `.*`
//! (over all bytes) is prepended. Combined with prefix acceptance this makes
//! the compiled automaton accept exactly the packets containing a match.
//!
//! Construction is Thompson-style over byte classes with epsilon
//! transitions, which are eliminated before the automaton is returned;
//! bounded repetition is expanded by duplication up to a configurable cap.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::byteclass::ByteClass;
use crate::nfa::Nfa;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported feature at byte {pos}: {construct}")]
    Unsupported { pos: usize, construct: String },
    #[error("repetition at byte {pos} expands to {count} copies, above the cap of {cap}")]
    RepetitionTooLarge { pos: usize, count: u32, cap: u32 },
    #[error("rule `{id}`: {source}")]
    InRule {
        id: String,
        #[source]
        source: Box<RuleError>,
    },
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("rule file line {line}: {msg}")]
    RuleFile { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn syntax(pos: usize, msg: impl Into<String>) -> RuleError {
    RuleError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn unsupported(pos: usize, construct: impl Into<String>) -> RuleError {
    RuleError::Unsupported {
        pos,
        construct: construct.into(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    pub case_insensitive: bool,
    /// Upper bound on the copies a single bounded repetition may expand to.
    pub repeat_expansion_cap: u32,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            case_insensitive: false,
            repeat_expansion_cap: 64,
        }
    }
}

/// An ordered list of (rule id, pattern) pairs; ids are unique.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<(String, String)>,
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        id: impl Into<String>,
        pattern: impl Into<String>,
    ) -> Result<(), RuleError> {
        let id = id.into();
        if self.rules.iter().any(|(existing, _)| *existing == id) {
            return Err(RuleError::DuplicateRuleId(id));
        }
        self.rules.push((id, pattern.into()));
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.rules.iter().map(|(id, p)| (id.as_str(), p.as_str()))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Parses the rule file format: one `id<TAB>pattern` per line, lines
    /// starting with `#` are comments. Patterns keep their bytes verbatim
    /// (no trimming), since whitespace may be meaningful.
    pub fn parse(input: &str) -> Result<RuleSet, RuleError> {
        let mut rules = RuleSet::new();
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (id, pattern) = line.split_once('\t').ok_or_else(|| RuleError::RuleFile {
                line: line_no,
                msg: "expected `id<TAB>pattern`".to_string(),
            })?;
            let id = id.trim();
            if id.is_empty() {
                return Err(RuleError::RuleFile {
                    line: line_no,
                    msg: "empty rule id".to_string(),
                });
            }
            rules.push(id, pattern).map_err(|e| match e {
                RuleError::DuplicateRuleId(id) => RuleError::RuleFile {
                    line: line_no,
                    msg: format!("duplicate rule id `{id}`"),
                },
                other => other,
            })?;
        }
        Ok(rules)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<RuleSet, RuleError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| RuleError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

// ---------------------------------------------------------------------------
// Pattern AST
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Ast {
    Empty,
    Class(ByteClass),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Star(Box<Ast>),
    Plus(Box<Ast>),
    Opt(Box<Ast>),
    Repeat {
        node: Box<Ast>,
        min: u32,
        max: Option<u32>,
    },
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    case_insensitive: bool,
    cap: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn eat(&mut self, expected: u8) -> bool {
        if self.peek() == Some(expected) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn literal_class(&self, byte: u8) -> ByteClass {
        let c = ByteClass::single(byte);
        if self.case_insensitive {
            c.ascii_case_fold()
        } else {
            c
        }
    }

    fn parse_alternation(&mut self) -> Result<Ast, RuleError> {
        let mut branches = vec![self.parse_concat()?];
        while self.eat(b'|') {
            branches.push(self.parse_concat()?);
        }
        if branches.len() == 1 {
            Ok(branches.pop().unwrap())
        } else {
            Ok(Ast::Alt(branches))
        }
    }

    fn parse_concat(&mut self) -> Result<Ast, RuleError> {
        let mut items = Vec::new();
        while let Some(b) = self.peek() {
            if b == b'|' || b == b')' {
                break;
            }
            items.push(self.parse_repeat()?);
        }
        match items.len() {
            0 => Ok(Ast::Empty),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Ast::Concat(items)),
        }
    }

    fn parse_repeat(&mut self) -> Result<Ast, RuleError> {
        let mut node = self.parse_atom()?;
        let mut quantified = false;
        loop {
            let op_pos = self.pos;
            match self.peek() {
                Some(op @ (b'*' | b'+' | b'?')) => {
                    if quantified {
                        if op == b'?' {
                            return Err(unsupported(op_pos, "lazy quantifier"));
                        }
                        return Err(syntax(
                            op_pos,
                            "quantifier applied to a quantifier; use grouping",
                        ));
                    }
                    self.pos += 1;
                    node = match op {
                        b'*' => Ast::Star(Box::new(node)),
                        b'+' => Ast::Plus(Box::new(node)),
                        _ => Ast::Opt(Box::new(node)),
                    };
                    quantified = true;
                }
                Some(b'{') => {
                    if quantified {
                        return Err(syntax(
                            op_pos,
                            "quantifier applied to a quantifier; use grouping",
                        ));
                    }
                    node = self.parse_bounded(node)?;
                    quantified = true;
                }
                _ => break,
            }
        }
        Ok(node)
    }

    /// `{m}`, `{m,n}` or `{m,}` after an atom.
    fn parse_bounded(&mut self, node: Ast) -> Result<Ast, RuleError> {
        let open = self.pos;
        self.pos += 1; // '{'
        let min = self.parse_number(open)?;
        let max = if self.eat(b',') {
            if self.peek() == Some(b'}') {
                None
            } else {
                Some(self.parse_number(open)?)
            }
        } else {
            Some(min)
        };
        if !self.eat(b'}') {
            return Err(syntax(open, "unterminated repetition, expected `}`"));
        }
        if self.peek() == Some(b'?') {
            return Err(unsupported(self.pos, "lazy quantifier"));
        }
        if let Some(max) = max {
            if min > max {
                return Err(syntax(
                    open,
                    format!("descending repetition {{{min},{max}}}"),
                ));
            }
        }
        let count = max.unwrap_or(min).max(min).max(1);
        if count > self.cap {
            return Err(RuleError::RepetitionTooLarge {
                pos: open,
                count,
                cap: self.cap,
            });
        }
        Ok(Ast::Repeat {
            node: Box::new(node),
            min,
            max,
        })
    }

    fn parse_number(&mut self, ctx: usize) -> Result<u32, RuleError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(ctx, "expected a decimal repetition count"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| syntax(ctx, "repetition count out of range"))
    }

    fn parse_atom(&mut self) -> Result<Ast, RuleError> {
        let pos = self.pos;
        match self.bump().expect("caller checked for input") {
            b'(' => self.parse_group(pos),
            b'[' => {
                let class = self.parse_class(pos)?;
                Ok(Ast::Class(class))
            }
            // any byte except newline, the usual search default
            b'.' => Ok(Ast::Class(ByteClass::single(b'\n').negate())),
            b'\\' => {
                let class = self.parse_escape(pos, false)?;
                Ok(Ast::Class(class))
            }
            b'^' => Err(unsupported(pos, "anchor `^` not at pattern start")),
            b'$' => Err(unsupported(pos, "end anchor `$`")),
            b'*' | b'+' | b'?' => Err(syntax(pos, "quantifier with nothing to repeat")),
            b'{' => Err(syntax(pos, "repetition with nothing to repeat")),
            b')' => Err(syntax(pos, "unmatched `)`")),
            byte => Ok(Ast::Class(self.literal_class(byte))),
        }
    }

    fn parse_group(&mut self, open: usize) -> Result<Ast, RuleError> {
        if self.eat(b'?') {
            match self.peek() {
                Some(b':') => {
                    self.pos += 1;
                }
                Some(b'=') | Some(b'!') => return Err(unsupported(open, "lookahead")),
                Some(b'<') => {
                    let next = self.bytes.get(self.pos + 1).copied();
                    if next == Some(b'=') || next == Some(b'!') {
                        return Err(unsupported(open, "lookbehind"));
                    }
                    return Err(unsupported(open, "named capture group"));
                }
                Some(b'P') => return Err(unsupported(open, "named capture group")),
                Some(b'i') => return Err(unsupported(open, "inline flags not at pattern start")),
                _ => return Err(unsupported(open, "special group")),
            }
        }
        let inner = self.parse_alternation()?;
        if !self.eat(b')') {
            return Err(syntax(open, "unterminated group, expected `)`"));
        }
        Ok(inner)
    }

    /// Escape sequences, shared between atoms and character classes. When
    /// `in_class` is set, multi-byte perl classes are still allowed but may
    /// not form range endpoints (the caller enforces that).
    fn parse_escape(&mut self, pos: usize, _in_class: bool) -> Result<ByteClass, RuleError> {
        let Some(b) = self.bump() else {
            return Err(syntax(pos, "dangling `\\`"));
        };
        let single = |byte: u8, parser: &Parser| -> ByteClass { parser.literal_class(byte) };
        match b {
            b'x' => {
                if self.peek() == Some(b'{') {
                    return Err(unsupported(pos, "brace hex escape `\\x{...}`"));
                }
                let hi = self.bump();
                let lo = self.bump();
                match (hi, lo) {
                    (Some(h), Some(l)) if h.is_ascii_hexdigit() && l.is_ascii_hexdigit() => {
                        let value =
                            u8::from_str_radix(std::str::from_utf8(&[h, l]).unwrap(), 16).unwrap();
                        Ok(single(value, self))
                    }
                    _ => Err(syntax(pos, "`\\x` expects two hex digits")),
                }
            }
            b'n' => Ok(ByteClass::single(b'\n')),
            b'r' => Ok(ByteClass::single(b'\r')),
            b't' => Ok(ByteClass::single(b'\t')),
            b'f' => Ok(ByteClass::single(0x0c)),
            b'v' => Ok(ByteClass::single(0x0b)),
            b'0' => Ok(ByteClass::single(0x00)),
            b'd' => Ok(ByteClass::range(b'0', b'9')),
            b'D' => Ok(ByteClass::range(b'0', b'9').negate()),
            b'w' => Ok(word_class()),
            b'W' => Ok(word_class().negate()),
            b's' => Ok(space_class()),
            b'S' => Ok(space_class().negate()),
            b'1'..=b'9' => Err(unsupported(pos, format!("backreference `\\{}`", b as char))),
            b'A' | b'z' | b'Z' | b'b' | b'B' => Err(unsupported(
                pos,
                format!("anchor or boundary `\\{}`", b as char),
            )),
            b'Q' => Err(unsupported(pos, "quoted literal `\\Q...\\E`")),
            byte if byte.is_ascii_alphanumeric() => {
                Err(syntax(pos, format!("unknown escape `\\{}`", byte as char)))
            }
            byte => Ok(single(byte, self)),
        }
    }

    /// `[...]` with optional negation, ranges, and escapes.
    fn parse_class(&mut self, open: usize) -> Result<ByteClass, RuleError> {
        let negated = self.eat(b'^');
        let mut set = ByteClass::EMPTY;
        let mut any = false;
        loop {
            let item_pos = self.pos;
            let Some(b) = self.bump() else {
                return Err(syntax(open, "unterminated character class, expected `]`"));
            };
            match b {
                b']' => {
                    if !any {
                        return Err(syntax(open, "empty character class"));
                    }
                    break;
                }
                _ => {
                    any = true;
                    // first endpoint: a literal byte or an escape
                    let (first_byte, first_class) = if b == b'\\' {
                        let class = self.parse_escape(item_pos, true)?;
                        let single = (class.len() == 1).then(|| class.first_byte().unwrap());
                        (single, class)
                    } else {
                        (Some(b), ByteClass::single(b))
                    };
                    // range?
                    if self.peek() == Some(b'-') && self.bytes.get(self.pos + 1) != Some(&b']') {
                        self.pos += 1; // '-'
                        let lo = first_byte
                            .ok_or_else(|| syntax(item_pos, "class escape cannot start a range"))?;
                        let hi_pos = self.pos;
                        let hi = match self.bump() {
                            Some(b'\\') => {
                                let class = self.parse_escape(hi_pos, true)?;
                                if class.len() != 1 {
                                    return Err(syntax(hi_pos, "class escape cannot end a range"));
                                }
                                class.first_byte().unwrap()
                            }
                            Some(b']') | None => {
                                return Err(syntax(item_pos, "unterminated range in class"))
                            }
                            Some(byte) => byte,
                        };
                        if lo > hi {
                            return Err(syntax(item_pos, "descending range in class"));
                        }
                        set.union_with(&ByteClass::range(lo, hi));
                    } else {
                        set.union_with(&first_class);
                    }
                }
            }
        }
        if self.case_insensitive {
            set = set.ascii_case_fold();
        }
        Ok(if negated { set.negate() } else { set })
    }
}

fn word_class() -> ByteClass {
    let mut c = ByteClass::range(b'a', b'z');
    c.union_with(&ByteClass::range(b'A', b'Z'));
    c.union_with(&ByteClass::range(b'0', b'9'));
    c.insert(b'_');
    c
}

fn space_class() -> ByteClass {
    let mut c = ByteClass::single(b' ');
    for b in [b'\t', b'\n', 0x0b, 0x0c, b'\r'] {
        c.insert(b);
    }
    c
}

/// Parsed pattern: whether it was `^`-anchored, plus its AST.
fn parse_pattern(pattern: &str, options: &CompileOptions) -> Result<(bool, Ast), RuleError> {
    let bytes = pattern.as_bytes();
    let mut case_insensitive = options.case_insensitive;
    let mut start = 0;
    if bytes.starts_with(b"(?i)") {
        case_insensitive = true;
        start = 4;
    }
    let anchored = bytes.get(start) == Some(&b'^');
    if anchored {
        start += 1;
    }
    let mut parser = Parser {
        bytes: &bytes[start..],
        pos: 0,
        case_insensitive,
        cap: options.repeat_expansion_cap,
    };
    let ast = parser.parse_alternation()?;
    if let Some(b) = parser.peek() {
        let pos = start + parser.pos;
        if b == b')' {
            return Err(syntax(pos, "unmatched `)`"));
        }
        return Err(syntax(pos, format!("unexpected `{}`", b as char)));
    }
    Ok((anchored, ast))
}

// ---------------------------------------------------------------------------
// Thompson construction and epsilon elimination
// ---------------------------------------------------------------------------

struct EpsBuilder {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(ByteClass, usize)>>,
}

#[derive(Clone, Copy)]
struct Frag {
    start: usize,
    end: usize,
}

impl EpsBuilder {
    fn new() -> Self {
        EpsBuilder {
            eps: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn eps(&mut self, from: usize, to: usize) {
        self.eps[from].push(to);
    }

    fn edge(&mut self, from: usize, class: ByteClass, to: usize) {
        self.edges[from].push((class, to));
    }

    fn build(&mut self, ast: &Ast) -> Frag {
        match ast {
            Ast::Empty => {
                let start = self.state();
                let end = self.state();
                self.eps(start, end);
                Frag { start, end }
            }
            Ast::Class(class) => {
                let start = self.state();
                let end = self.state();
                self.edge(start, *class, end);
                Frag { start, end }
            }
            Ast::Concat(items) => {
                let frags: Vec<Frag> = items.iter().map(|item| self.build(item)).collect();
                for pair in frags.windows(2) {
                    self.eps(pair[0].end, pair[1].start);
                }
                Frag {
                    start: frags.first().unwrap().start,
                    end: frags.last().unwrap().end,
                }
            }
            Ast::Alt(branches) => {
                let start = self.state();
                let end = self.state();
                for branch in branches {
                    let frag = self.build(branch);
                    self.eps(start, frag.start);
                    self.eps(frag.end, end);
                }
                Frag { start, end }
            }
            Ast::Star(node) => {
                let start = self.state();
                let end = self.state();
                let inner = self.build(node);
                self.eps(start, inner.start);
                self.eps(start, end);
                self.eps(inner.end, inner.start);
                self.eps(inner.end, end);
                Frag { start, end }
            }
            Ast::Plus(node) => {
                let start = self.state();
                let end = self.state();
                let inner = self.build(node);
                self.eps(start, inner.start);
                self.eps(inner.end, inner.start);
                self.eps(inner.end, end);
                Frag { start, end }
            }
            Ast::Opt(node) => {
                let start = self.state();
                let end = self.state();
                let inner = self.build(node);
                self.eps(start, inner.start);
                self.eps(start, end);
                self.eps(inner.end, end);
                Frag { start, end }
            }
            Ast::Repeat { node, min, max } => self.build_repeat(node, *min, *max),
        }
    }

    /// `{m}` chains m copies; `{m,}` appends a plus-loop; `{m,n}` appends
    /// nested optional copies so a later copy cannot match without the
    /// earlier ones.
    fn build_repeat(&mut self, node: &Ast, min: u32, max: Option<u32>) -> Frag {
        match max {
            None => {
                // m mandatory copies, the last one looping (min may be 0)
                if min == 0 {
                    return self.build(&Ast::Star(Box::new(node.clone())));
                }
                let mandatory: Vec<Ast> = (0..min - 1).map(|_| node.clone()).collect();
                let mut items = mandatory;
                items.push(Ast::Plus(Box::new(node.clone())));
                self.build(&Ast::Concat(items))
            }
            Some(max) => {
                if max == 0 {
                    return self.build(&Ast::Empty);
                }
                // innermost optional first: (x (x (x)?)?)?
                let optional_count = max - min;
                let mut tail = Ast::Empty;
                for _ in 0..optional_count {
                    let mut seq = vec![node.clone()];
                    if !matches!(tail, Ast::Empty) {
                        seq.push(tail);
                    }
                    let body = if seq.len() == 1 {
                        seq.pop().unwrap()
                    } else {
                        Ast::Concat(seq)
                    };
                    tail = Ast::Opt(Box::new(body));
                }
                let mut items: Vec<Ast> = (0..min).map(|_| node.clone()).collect();
                if !matches!(tail, Ast::Empty) {
                    items.push(tail);
                }
                if items.is_empty() {
                    self.build(&Ast::Empty)
                } else {
                    self.build(&Ast::Concat(items))
                }
            }
        }
    }

    fn closure(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack = vec![from];
        seen[from] = true;
        let mut out = Vec::new();
        while let Some(q) = stack.pop() {
            out.push(q);
            for &next in &self.eps[q] {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        out
    }

    /// Epsilon elimination plus unreachable-state trim. `accepts` maps
    /// accepting end states to the rule tags they carry.
    fn into_nfa(self, start: usize, accepts: &BTreeMap<usize, BTreeSet<String>>) -> Nfa {
        let n = self.eps.len();
        let mut finals: Vec<bool> = vec![false; n];
        let mut tags: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n];
        let mut out_edges: Vec<BTreeMap<usize, ByteClass>> = vec![BTreeMap::new(); n];
        for q in 0..n {
            for p in self.closure(q) {
                if let Some(rule_tags) = accepts.get(&p) {
                    finals[q] = true;
                    tags[q].extend(rule_tags.iter().cloned());
                }
                for (class, dst) in &self.edges[p] {
                    out_edges[q]
                        .entry(*dst)
                        .and_modify(|c| c.union_with(class))
                        .or_insert(*class);
                }
            }
        }
        // keep states reachable from the start
        let mut reachable = vec![false; n];
        reachable[start] = true;
        let mut stack = vec![start];
        while let Some(q) = stack.pop() {
            for &dst in out_edges[q].keys() {
                if !reachable[dst] {
                    reachable[dst] = true;
                    stack.push(dst);
                }
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut count = 0;
        for q in 0..n {
            if reachable[q] {
                new_id[q] = count;
                count += 1;
            }
        }
        let mut transitions = Vec::new();
        let mut final_states = Vec::new();
        let mut final_tags = BTreeMap::new();
        for q in 0..n {
            if !reachable[q] {
                continue;
            }
            if finals[q] {
                final_states.push(new_id[q]);
                if !tags[q].is_empty() {
                    final_tags.insert(new_id[q], tags[q].clone());
                }
            }
            for (dst, class) in &out_edges[q] {
                if reachable[*dst] {
                    transitions.push((new_id[q], new_id[*dst], *class));
                }
            }
        }
        Nfa::with_tags(count, new_id[start], final_states, transitions, final_tags)
            .expect("construction produces a valid automaton")
    }
}

/// Ast for one rule with search semantics applied: unanchored patterns get
/// an implicit `.*` prefix over all bytes.
fn searchable_ast(pattern: &str, options: &CompileOptions) -> Result<Ast, RuleError> {
    let (anchored, ast) = parse_pattern(pattern, options)?;
    if anchored {
        Ok(ast)
    } else {
        Ok(Ast::Concat(vec![
            Ast::Star(Box::new(Ast::Class(ByteClass::ALL))),
            ast,
        ]))
    }
}

/// Compiles one pattern into a prefix-accepting NFA.
pub fn compile_regex(pattern: &str, options: &CompileOptions) -> Result<Nfa, RuleError> {
    let ast = searchable_ast(pattern, options)?;
    let mut builder = EpsBuilder::new();
    let frag = builder.build(&ast);
    let accepts = BTreeMap::from([(frag.end, BTreeSet::new())]);
    Ok(builder.into_nfa(frag.start, &accepts))
}

/// Compiles a rule set into one union automaton whose final states are
/// tagged with the ids of the rules they accept for. The empty rule set
/// yields the automaton that accepts nothing.
pub fn compile_ruleset(rules: &RuleSet, options: &CompileOptions) -> Result<Nfa, RuleError> {
    if rules.is_empty() {
        return Ok(Nfa::new(1, 0, [], []).expect("trivial automaton"));
    }
    let mut builder = EpsBuilder::new();
    let union_start = builder.state();
    let mut accepts: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (id, pattern) in rules.iter() {
        let ast = searchable_ast(pattern, options).map_err(|source| RuleError::InRule {
            id: id.to_string(),
            source: Box::new(source),
        })?;
        let frag = builder.build(&ast);
        builder.eps(union_start, frag.start);
        accepts.entry(frag.end).or_default().insert(id.to_string());
    }
    Ok(builder.into_nfa(union_start, &accepts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compile(pattern: &str) -> Nfa {
        compile_regex(pattern, &CompileOptions::default()).unwrap()
    }

    #[test]
    fn anchored_literal_chain() {
        let nfa = compile("^ab");
        assert_eq!(nfa.num_states(), 3);
        assert!(nfa.accepts_prefix(b"ab"));
        assert!(nfa.accepts_prefix(b"abxyz"));
        assert!(!nfa.accepts_prefix(b"a"));
        assert!(!nfa.accepts_prefix(b"ba"));
    }

    #[test]
    fn plus_and_optional() {
        let nfa = compile("^a+b?");
        assert!(nfa.accepts_prefix(b"a"));
        assert!(nfa.accepts_prefix(b"ab"));
        assert!(nfa.accepts_prefix(b"aaa"));
        assert!(!nfa.accepts_prefix(b"b"));
        assert!(!nfa.accepts_prefix(b""));
    }

    #[test]
    fn unanchored_search_semantics() {
        let nfa = compile("bc");
        assert!(nfa.accepts_prefix(b"abcd"));
        assert!(nfa.accepts_prefix(b"bc"));
        assert!(!nfa.accepts_prefix(b"b"));
        assert!(!nfa.accepts_prefix(b"cb"));
    }

    #[test]
    fn classes_ranges_negation() {
        let nfa = compile("^[a-c]x");
        assert!(nfa.accepts_prefix(b"ax"));
        assert!(nfa.accepts_prefix(b"cx"));
        assert!(!nfa.accepts_prefix(b"dx"));

        let neg = compile("^[^a-c]x");
        assert!(!neg.accepts_prefix(b"ax"));
        assert!(neg.accepts_prefix(b"zx"));
        assert!(neg.accepts_prefix(&[0xff, b'x']));
    }

    #[test]
    fn dot_excludes_newline() {
        let nfa = compile("^.x");
        assert!(nfa.accepts_prefix(b"ax"));
        assert!(nfa.accepts_prefix(&[0x00, b'x']));
        assert!(!nfa.accepts_prefix(b"\nx"));
    }

    #[test]
    fn hex_escapes_are_bytes() {
        let nfa = compile(r"^\x00\xff");
        assert!(nfa.accepts_prefix(&[0x00, 0xff]));
        assert!(!nfa.accepts_prefix(&[0x00, 0xfe]));
    }

    #[test]
    fn bounded_repetition() {
        let nfa = compile("^a{2,3}b");
        assert!(!nfa.accepts_prefix(b"ab"));
        assert!(nfa.accepts_prefix(b"aab"));
        assert!(nfa.accepts_prefix(b"aaab"));
        assert!(!nfa.accepts_prefix(b"aaaab"));

        let exact = compile("^a{3}");
        assert!(exact.accepts_prefix(b"aaa"));
        assert!(!exact.accepts_prefix(b"aa"));

        let open = compile("^a{2,}b");
        assert!(!open.accepts_prefix(b"ab"));
        assert!(open.accepts_prefix(b"aab"));
        assert!(open.accepts_prefix(b"aaaaab"));
    }

    #[test]
    fn repetition_cap_is_an_error_not_truncation() {
        let err = compile_regex("^a{100}", &CompileOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            RuleError::RepetitionTooLarge {
                count: 100,
                cap: 64,
                ..
            }
        ));
        let relaxed = CompileOptions {
            repeat_expansion_cap: 128,
            ..Default::default()
        };
        assert!(compile_regex("^a{100}", &relaxed).is_ok());
    }

    #[test]
    fn case_insensitive_flag() {
        let nfa = compile("(?i)^ab[c-e]");
        assert!(nfa.accepts_prefix(b"ABD"));
        assert!(nfa.accepts_prefix(b"abd"));
        assert!(nfa.accepts_prefix(b"AbE"));
        assert!(!nfa.accepts_prefix(b"af"));

        let opts = CompileOptions {
            case_insensitive: true,
            ..Default::default()
        };
        let nfa = compile_regex("^ab", &opts).unwrap();
        assert!(nfa.accepts_prefix(b"AB"));
    }

    #[test]
    fn alternation_and_grouping() {
        let nfa = compile("^(ab|cd)+e");
        assert!(nfa.accepts_prefix(b"abe"));
        assert!(nfa.accepts_prefix(b"abcde"));
        assert!(!nfa.accepts_prefix(b"e"));
        assert!(!nfa.accepts_prefix(b"ace"));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let cases: &[(&str, &str)] = &[
            (r"^(a)\1", "backreference"),
            ("^a(?=b)", "lookahead"),
            ("^a(?<=b)", "lookbehind"),
            ("^a+?", "lazy quantifier"),
            ("^a{1,2}?", "lazy quantifier"),
            ("^ab$", "end anchor"),
            (r"^a\b", "boundary"),
            ("^a(?P<x>b)", "named capture group"),
            ("a(?i)b", "inline flags"),
        ];
        for (pattern, needle) in cases {
            match compile_regex(pattern, &CompileOptions::default()) {
                Err(RuleError::Unsupported { construct, .. }) => {
                    assert!(
                        construct.contains(needle),
                        "{pattern}: `{construct}` does not mention `{needle}`"
                    );
                }
                other => panic!("{pattern}: expected unsupported error, got {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors() {
        for pattern in ["^(ab", "^[a-", "^[z-a]", "^a{2", "^*", "^a)", r"^\q", "^[]"] {
            assert!(
                matches!(
                    compile_regex(pattern, &CompileOptions::default()),
                    Err(RuleError::Syntax { .. })
                ),
                "{pattern} should be a syntax error"
            );
        }
    }

    #[test]
    fn ruleset_union_with_tags() {
        let mut rules = RuleSet::new();
        rules.push("r1", "^ab").unwrap();
        rules.push("r2", "^cd").unwrap();
        let nfa = compile_ruleset(&rules, &CompileOptions::default()).unwrap();
        assert!(nfa.accepts_prefix(b"abx"));
        assert!(nfa.accepts_prefix(b"cdx"));
        assert!(!nfa.accepts_prefix(b"ad"));
        let all_tags: BTreeSet<&str> = nfa
            .final_tags()
            .values()
            .flat_map(|tags| tags.iter().map(String::as_str))
            .collect();
        assert_eq!(all_tags, BTreeSet::from(["r1", "r2"]));
    }

    #[test]
    fn empty_ruleset_accepts_nothing() {
        let nfa = compile_ruleset(&RuleSet::new(), &CompileOptions::default()).unwrap();
        assert!(!nfa.accepts_prefix(b""));
        assert!(!nfa.accepts_prefix(b"anything"));
    }

    #[test]
    fn ruleset_errors_are_tagged() {
        let mut rules = RuleSet::new();
        rules.push("bad-rule", "^a(?=b)").unwrap();
        match compile_ruleset(&rules, &CompileOptions::default()) {
            Err(RuleError::InRule { id, .. }) => assert_eq!(id, "bad-rule"),
            other => panic!("expected tagged error, got {other:?}"),
        }
    }

    #[test]
    fn rule_file_parsing() {
        let text = "# comment\nr1\t^ab\nr2\tc.d\n\n";
        let rules = RuleSet::parse(text).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules.iter().next(), Some(("r1", "^ab")));

        assert!(RuleSet::parse("r1 no-tab\n").is_err());
        assert!(RuleSet::parse("r1\ta\nr1\tb\n").is_err());
    }

    #[test]
    fn duplicate_rule_ids_rejected() {
        let mut rules = RuleSet::new();
        rules.push("x", "a").unwrap();
        assert!(matches!(
            rules.push("x", "b"),
            Err(RuleError::DuplicateRuleId(_))
        ));
    }
}
