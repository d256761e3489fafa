//! A small textual format for systems.
//!
//! ```text
//! # comment
//! system modulo2 {
//!   atom x {
//!     ports p;
//!     states init a, b;
//!     trans a -[p]-> b;
//!     trans b -[p]-> a;
//!   }
//!   connector c = p' [q r];
//!   priority maximal_progress;
//! }
//! ```
//!
//! Names are `[A-Za-z_][A-Za-z0-9_]*`. Connector terms are juxtaposed factors,
//! each a port, `0`, `1` or a bracketed term, optionally followed by `'` to
//! mark it as a trigger. Explicit priorities are written `{p} < {p, q}`.

use std::fmt::{self, Write as _};

use crate::connector::{AcTerm, Factor};
use crate::model::{
    validate, AtomicBehavior, Connector, Interaction, Location, Port, PriorityModel, SystemModel, Transition,
};

const MAX_NESTING: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DslErrorKind {
    Lexical,
    Syntax,
    Semantic,
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DslErrorKind::Lexical => "lexical error",
            DslErrorKind::Syntax => "syntax error",
            DslErrorKind::Semantic => "semantic error",
        })
    }
}

/// 1-based line and column, counted in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslDiagnostic {
    pub kind: DslErrorKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for DslDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.message)
    }
}

impl std::error::Error for DslDiagnostic {}

/// Where each element of a parsed system was declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub system: Span,
    pub atoms: Vec<Span>,
    /// Per atom, one span per transition.
    pub transitions: Vec<Vec<Span>>,
    pub connectors: Vec<Span>,
    /// One span per explicit priority pair, or the keyword for maximal progress.
    pub priorities: Vec<Span>,
}

impl SourceMap {
    pub fn locate(&self, location: Location) -> Span {
        let found = match location {
            Location::Atom(i) => self.atoms.get(i),
            Location::Transition { atom, index } => self.transitions.get(atom).and_then(|t| t.get(index)),
            Location::Connector(i) => self.connectors.get(i),
            Location::Priority(i) => self.priorities.get(i),
        };
        found.copied().unwrap_or(self.system)
    }
}

/// Source text together with the system it describes.
#[derive(Debug, Clone)]
pub struct SourceModel {
    pub text: String,
    pub system: SystemModel,
    pub map: SourceMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Zero,
    One,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Quote,
    Eq,
    Lt,
    /// `-[`
    LabelOpen,
    /// `]->`
    LabelClose,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "`{n}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::One => f.write_str("`1`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Quote => f.write_str("`'`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::LabelOpen => f.write_str("`-[`"),
            Tok::LabelClose => f.write_str("`]->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, DslDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |span, message: String| DslDiagnostic {
        kind: DslErrorKind::Lexical,
        span,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        let take = |n: usize, tok: Tok, out: &mut Vec<(Tok, Span)>| {
            out.push((tok, span));
            n
        };
        let used = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '#' => {
                let mut n = 0;
                while i + n < chars.len() && chars[i + n] != '\n' {
                    n += 1;
                }
                n
            }
            '{' => take(1, Tok::LBrace, &mut out),
            '}' => take(1, Tok::RBrace, &mut out),
            '[' => take(1, Tok::LBracket, &mut out),
            ']' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                take(3, Tok::LabelClose, &mut out)
            }
            ']' => take(1, Tok::RBracket, &mut out),
            ';' => take(1, Tok::Semi, &mut out),
            ',' => take(1, Tok::Comma, &mut out),
            '\'' => take(1, Tok::Quote, &mut out),
            '=' => take(1, Tok::Eq, &mut out),
            '<' => take(1, Tok::Lt, &mut out),
            '-' if chars.get(i + 1) == Some(&'[') => take(2, Tok::LabelOpen, &mut out),
            c if c.is_ascii_digit() => {
                let mut n = 0;
                while i + n < chars.len() && (chars[i + n].is_ascii_alphanumeric() || chars[i + n] == '_') {
                    n += 1;
                }
                let word: String = chars[i..i + n].iter().collect();
                match word.as_str() {
                    "0" => take(1, Tok::Zero, &mut out),
                    "1" => take(1, Tok::One, &mut out),
                    _ => {
                        return Err(err(
                            span,
                            format!("`{word}` is not a name; names start with a letter or `_`"),
                        ))
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut n = 0;
                while i + n < chars.len() && (chars[i + n].is_ascii_alphanumeric() || chars[i + n] == '_') {
                    n += 1;
                }
                let word: String = chars[i..i + n].iter().collect();
                take(n, Tok::Name(word), &mut out)
            }
            other => return Err(err(span, format!("unexpected character {other:?}"))),
        };
        i += used;
        col += used;
    }
    out.push((Tok::Eof, Span { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, DslDiagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> PResult<T> {
        Err(DslDiagnostic {
            kind: DslErrorKind::Syntax,
            span: self.span(),
            message,
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn name(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Name(n) => {
                let span = self.bump().1;
                Ok((n, span))
            }
            other => self.error(format!("expected {what}, found {other}")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.is_keyword(kw) {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    /// Names separated by commas, possibly none, up to `end` (not consumed).
    fn name_list(&mut self, what: &str, end: &Tok) -> PResult<Vec<(String, Span)>> {
        let mut out = Vec::new();
        if self.peek() == end {
            return Ok(out);
        }
        loop {
            out.push(self.name(what)?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn system(&mut self) -> PResult<(SystemModel, SourceMap)> {
        let mut map = SourceMap {
            system: self.keyword("system")?,
            ..SourceMap::default()
        };
        let (name, _) = self.name("a system name")?;
        self.expect(Tok::LBrace)?;
        let mut atoms = Vec::new();
        while self.is_keyword("atom") {
            let (atom, span, trans) = self.atom()?;
            atoms.push(atom);
            map.atoms.push(span);
            map.transitions.push(trans);
        }
        let mut connectors = Vec::new();
        while self.is_keyword("connector") {
            let span = self.bump().1;
            let (cname, _) = self.name("a connector name")?;
            self.expect(Tok::Eq)?;
            let term = self.term(&Tok::Semi)?;
            self.expect(Tok::Semi)?;
            connectors.push(Connector::new(cname, term));
            map.connectors.push(span);
        }
        let mut priority = PriorityModel::none();
        if self.is_keyword("priority") {
            let span = self.bump().1;
            if self.is_keyword("maximal_progress") {
                self.bump();
                priority = PriorityModel::MaximalProgress;
                map.priorities.push(span);
            } else {
                let mut pairs = Vec::new();
                while *self.peek() == Tok::LBrace {
                    let at = self.span();
                    let lo = self.interaction()?;
                    self.expect(Tok::Lt)?;
                    let hi = self.interaction()?;
                    pairs.push((lo, hi));
                    map.priorities.push(at);
                }
                if pairs.is_empty() {
                    return self.error(format!("expected `maximal_progress` or `{{`, found {}", self.peek()));
                }
                priority = PriorityModel::ExplicitPairs(pairs);
            }
            self.expect(Tok::Semi)?;
        }
        match self.peek() {
            Tok::RBrace => {}
            Tok::Name(n) if n == "atom" || n == "connector" || n == "priority" => {
                return self.error(format!(
                    "`{n}` is out of place; declare atoms, then connectors, then at most one priority"
                ))
            }
            other => return self.error(format!("expected `}}`, found {other}")),
        }
        self.bump();
        self.expect(Tok::Eof)?;
        Ok((SystemModel::new(name, atoms, connectors, priority), map))
    }

    fn interaction(&mut self) -> PResult<Interaction> {
        self.expect(Tok::LBrace)?;
        let ports = self.name_list("a port name", &Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(Interaction::new(ports.iter().map(|(p, _)| p.as_str())))
    }

    fn atom(&mut self) -> PResult<(AtomicBehavior, Span, Vec<Span>)> {
        let span = self.keyword("atom")?;
        let (name, _) = self.name("an atom name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("ports")?;
        let ports: Vec<Port> = self
            .name_list("a port name", &Tok::Semi)?
            .iter()
            .map(|(p, _)| Port::new(p))
            .collect();
        self.expect(Tok::Semi)?;
        let states_at = self.keyword("states")?;
        let mut states = Vec::new();
        let mut init: Option<usize> = None;
        loop {
            let marked = self.is_keyword("init") && matches!(self.peek_at(1), Tok::Name(_));
            if marked {
                let at = self.bump().1;
                if init.is_some() {
                    return semantic(at, format!("atom `{name}` marks more than one initial state"));
                }
                init = Some(states.len());
            }
            states.push(self.name("a state name")?.0);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        let Some(init) = init else {
            return semantic(states_at, format!("atom `{name}` has no state marked `init`"));
        };
        let mut transitions = Vec::new();
        let mut spans = Vec::new();
        while self.is_keyword("trans") {
            let at = self.bump().1;
            let (from, from_at) = self.name("a source state")?;
            self.expect(Tok::LabelOpen)?;
            let label = self.name_list("a port name", &Tok::LabelClose)?;
            self.expect(Tok::LabelClose)?;
            let (to, to_at) = self.name("a target state")?;
            self.expect(Tok::Semi)?;
            let lookup = |s: &str, at: Span| match states.iter().position(|x| x == s) {
                Some(k) => Ok(k),
                None => semantic(at, format!("atom `{name}` has no state `{s}`")),
            };
            transitions.push(Transition {
                from: lookup(&from, from_at)?,
                label: Interaction::new(label.iter().map(|(p, _)| p.as_str())),
                to: lookup(&to, to_at)?,
            });
            spans.push(at);
        }
        self.expect(Tok::RBrace)?;
        Ok((
            AtomicBehavior::from_parts(name, ports, states, init, transitions),
            span,
            spans,
        ))
    }

    /// One or more factors up to `end` (not consumed).
    fn term(&mut self, end: &Tok) -> PResult<AcTerm> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.error(format!("connector nesting deeper than {MAX_NESTING} levels"));
        }
        let mut factors = Vec::new();
        let mut bare_leaf = false;
        while self.peek() != end {
            let (term, bare) = match self.peek().clone() {
                Tok::Name(n) => {
                    self.bump();
                    (AcTerm::Port(Port::new(&n)), true)
                }
                Tok::Zero => {
                    self.bump();
                    (AcTerm::Zero, true)
                }
                Tok::One => {
                    self.bump();
                    (AcTerm::One, true)
                }
                Tok::LBracket => {
                    self.bump();
                    let inner = self.term(&Tok::RBracket)?;
                    self.expect(Tok::RBracket)?;
                    (inner, false)
                }
                other => return self.error(format!("expected a port, `0`, `1` or `[`, found {other}")),
            };
            let trigger = *self.peek() == Tok::Quote;
            if trigger {
                self.bump();
            }
            bare_leaf = bare && !trigger;
            factors.push(if trigger {
                Factor::trigger(term)
            } else {
                Factor::synchron(term)
            });
        }
        self.depth -= 1;
        if factors.is_empty() {
            return self.error(format!("expected a connector term, found {}", self.peek()));
        }
        if factors.len() == 1 && bare_leaf {
            return Ok(factors.pop().expect("one factor").term);
        }
        Ok(AcTerm::Fusion(factors))
    }
}

fn semantic<T>(span: Span, message: String) -> PResult<T> {
    Err(DslDiagnostic {
        kind: DslErrorKind::Semantic,
        span,
        message,
    })
}

/// Parses `text`, keeping the source and declaration locations.
pub fn parse_source(text: &str) -> Result<SourceModel, Vec<DslDiagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let mut parser = Parser { toks, pos: 0, depth: 0 };
    let (system, map) = parser.system().map_err(|d| vec![d])?;
    let diagnostics: Vec<DslDiagnostic> = validate(&system)
        .into_iter()
        .map(|d| DslDiagnostic {
            kind: DslErrorKind::Semantic,
            span: map.locate(d.location),
            message: d.to_string(),
        })
        .collect();
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    Ok(SourceModel {
        text: text.to_string(),
        system,
        map,
    })
}

/// Parses and validates a system description.
pub fn parse(text: &str) -> Result<SystemModel, Vec<DslDiagnostic>> {
    parse_source(text).map(|s| s.system)
}

/// As [`parse`], for raw bytes that may not be UTF-8.
pub fn parse_bytes(bytes: &[u8]) -> Result<SystemModel, Vec<DslDiagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = 1 + valid.matches('\n').count();
            let column = 1 + valid.rsplit('\n').next().map_or(0, |l| l.chars().count());
            Err(vec![DslDiagnostic {
                kind: DslErrorKind::Lexical,
                span: Span { line, column },
                message: "input is not valid UTF-8".to_string(),
            }])
        }
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text for `system`; [`parse`] reads it back to an equal model.
pub fn serialize(system: &SystemModel) -> String {
    let mut out = String::new();
    let empty =
        system.atoms().is_empty() && system.connectors().is_empty() && *system.priority() == PriorityModel::none();
    if empty {
        let _ = writeln!(out, "system {} {{ }}", system.name());
        return out;
    }
    let _ = writeln!(out, "system {} {{", system.name());
    for atom in system.atoms() {
        let _ = writeln!(out, "  atom {} {{", atom.name());
        let _ = writeln!(out, "    ports {};", join(atom.ports()));
        let states = atom.states().iter().enumerate().map(|(k, s)| {
            if k == atom.init() {
                format!("init {s}")
            } else {
                s.clone()
            }
        });
        let _ = writeln!(out, "    states {};", join(states));
        for t in atom.transitions() {
            let _ = writeln!(
                out,
                "    trans {} -[{}]-> {};",
                atom.states()[t.from],
                join(t.label.ports()),
                atom.states()[t.to]
            );
        }
        out.push_str("  }\n");
    }
    for c in system.connectors() {
        let _ = writeln!(out, "  connector {} = {};", c.name, c.term);
    }
    match system.priority() {
        PriorityModel::MaximalProgress => out.push_str("  priority maximal_progress;\n"),
        PriorityModel::ExplicitPairs(pairs) if pairs.is_empty() => {}
        PriorityModel::ExplicitPairs(pairs) => {
            let pairs = pairs
                .iter()
                .map(|(lo, hi)| format!("{{{}}} < {{{}}}", join(lo.ports()), join(hi.ports())));
            let _ = writeln!(out, "  priority {};", pairs.collect::<Vec<_>>().join(" "));
        }
    }
    out.push_str("}\n");
    out
}
