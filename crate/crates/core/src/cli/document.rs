//! Input documents: one tower block followed by task blocks.
//!
//! ```text
//! tower {
//!   p 3
//!   base t
//!   sep i { minpoly "i^2 + 1" autos { id "i" g "2*i" } }
//!   insep b { n 1 value "t" }
//! }
//! task check-subspace {
//!   dim 2
//!   vector ("1", "i")
//! }
//! ```

use std::fmt;

use super::lexer::{tokenize, Pos, Tok};
use crate::error::InputError;

/// A string literal together with where its text starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SepDecl {
    pub name: String,
    pub minpoly: Source,
    pub autos: Vec<(String, Source)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsepDecl {
    pub name: String,
    pub n: u32,
    pub value: Source,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerDecl {
    pub p: u32,
    pub p_pos: Pos,
    pub base: Vec<String>,
    pub sep: Option<SepDecl>,
    pub insep: Vec<InsepDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Uint(u64, Pos),
    Ident(String, Pos),
    Str(Source),
    Vector(Vec<Source>, Pos),
    Block(Vec<Entry>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub pos: Pos,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDecl {
    pub kind: String,
    pub pos: Pos,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub tower: TowerDecl,
    pub tasks: Vec<TaskDecl>,
}

pub const COMMANDS: [&str; 9] = [
    "validate",
    "check-subspace",
    "kform",
    "check-ideal",
    "check-morphism",
    "deform-check",
    "fixed-ring",
    "apply",
    "describe",
];

/// Keys that may start an entry inside a task block.
const ENTRY_KEYS: [&str; 11] = [
    "dim", "vector", "matrix", "row", "vars", "poly", "source", "target", "image", "gen", "element",
];

const TOWER_KEYS: [&str; 4] = ["p", "base", "sep", "insep"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, InputError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.pos().syntax(format!("{}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Pos, InputError> {
        self.expect(Tok::Ident(word.into()))
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), InputError> {
        match self.next() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(p.syntax(format!("{}, found {}", what, t.describe()))),
        }
    }

    fn uint(&mut self, what: &str) -> Result<(u64, Pos), InputError> {
        match self.next() {
            (Tok::Uint(n), p) => Ok((n, p)),
            (t, p) => Err(p.syntax(format!("{}, found {}", what, t.describe()))),
        }
    }

    fn string(&mut self, what: &str) -> Result<Source, InputError> {
        match self.next() {
            (Tok::Str(text), pos) => Ok(Source { text, pos }),
            (t, p) => Err(p.syntax(format!("{}, found {}", what, t.describe()))),
        }
    }

    fn document(&mut self) -> Result<InputDocument, InputError> {
        let tower = self.tower()?;
        let mut tasks = Vec::new();
        while *self.peek() != Tok::Eof {
            tasks.push(self.task()?);
        }
        Ok(InputDocument { tower, tasks })
    }

    fn tower(&mut self) -> Result<TowerDecl, InputError> {
        self.keyword("tower")?;
        self.expect(Tok::LBrace)?;
        self.keyword("p")?;
        let (p, p_pos) = self.uint("the characteristic")?;
        let p = u32::try_from(p).map_err(|_| p_pos.invalid("characteristic too large"))?;
        let mut base = Vec::new();
        if *self.peek() == Tok::Ident("base".into()) {
            self.next();
            while let Tok::Ident(s) = self.peek().clone() {
                if TOWER_KEYS.contains(&s.as_str()) {
                    break;
                }
                if s == "X" {
                    return Err(self.pos().invalid("X is reserved for the truncation variable"));
                }
                self.next();
                base.push(s);
            }
            if base.is_empty() {
                return Err(self.pos().syntax("at least one base variable"));
            }
        }
        let sep = if *self.peek() == Tok::Ident("sep".into()) {
            Some(self.sep()?)
        } else {
            None
        };
        let mut insep = Vec::new();
        while *self.peek() == Tok::Ident("insep".into()) {
            insep.push(self.insep()?);
        }
        self.expect(Tok::RBrace)
            .map_err(|_| self.pos().syntax(format!("'sep', 'insep' or '}}', found {}", self.peek().describe())))?;
        Ok(TowerDecl {
            p,
            p_pos,
            base,
            sep,
            insep,
        })
    }

    fn sep(&mut self) -> Result<SepDecl, InputError> {
        self.keyword("sep")?;
        let (name, _) = self.ident("the separable generator name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("minpoly")?;
        let minpoly = self.string("the minimal polynomial as a string")?;
        let mut autos = Vec::new();
        if *self.peek() == Tok::Ident("autos".into()) {
            self.next();
            self.expect(Tok::LBrace)?;
            loop {
                let (g, _) = self.ident("an automorphism name")?;
                autos.push((g, self.string("the image of the generator as a string")?));
                if *self.peek() == Tok::RBrace {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(SepDecl { name, minpoly, autos })
    }

    fn insep(&mut self) -> Result<InsepDecl, InputError> {
        self.keyword("insep")?;
        let (name, _) = self.ident("the inseparable generator name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("n")?;
        let (n, pos) = self.uint("the height n")?;
        if n == 0 {
            return Err(pos.syntax("a height n of at least 1"));
        }
        let n = u32::try_from(n).map_err(|_| pos.invalid("height too large"))?;
        self.keyword("value")?;
        let value = self.string("the value of the p^n-th power as a string")?;
        self.expect(Tok::RBrace)?;
        Ok(InsepDecl { name, n, value })
    }

    fn task(&mut self) -> Result<TaskDecl, InputError> {
        self.keyword("task")?;
        let (kind, pos) = self.ident("a command name")?;
        if !COMMANDS.contains(&kind.as_str()) {
            return Err(pos.syntax(format!("one of {}", COMMANDS.join(", "))));
        }
        let entries = self.block()?;
        Ok(TaskDecl { kind, pos, entries })
    }

    fn block(&mut self) -> Result<Vec<Entry>, InputError> {
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while *self.peek() != Tok::RBrace {
            entries.push(self.entry()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(entries)
    }

    fn entry(&mut self) -> Result<Entry, InputError> {
        let pos = self.pos();
        let key = match self.peek().clone() {
            Tok::Ident(k) if ENTRY_KEYS.contains(&k.as_str()) => k,
            t => return Err(pos.syntax(format!("one of {} or '}}', found {}", ENTRY_KEYS.join(", "), t.describe()))),
        };
        self.next();
        let mut args = Vec::new();
        loop {
            let p = self.pos();
            match self.peek().clone() {
                Tok::Uint(n) => {
                    self.next();
                    args.push(Arg::Uint(n, p));
                }
                Tok::Str(_) => args.push(Arg::Str(self.string("a string")?)),
                Tok::Ident(s) if !ENTRY_KEYS.contains(&s.as_str()) => {
                    self.next();
                    args.push(Arg::Ident(s, p));
                }
                Tok::LParen => args.push(self.vector()?),
                Tok::LBrace => {
                    args.push(Arg::Block(self.block()?));
                    break;
                }
                _ => break,
            }
        }
        Ok(Entry { key, pos, args })
    }

    fn vector(&mut self) -> Result<Arg, InputError> {
        let pos = self.expect(Tok::LParen)?;
        let mut items = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                items.push(self.string("an element as a string")?);
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Arg::Vector(items, pos))
    }
}

pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
    };
    p.document()
}

fn quote(s: &Source) -> String {
    format!("\"{}\"", s.text)
}

fn write_entries(f: &mut fmt::Formatter<'_>, entries: &[Entry], indent: usize) -> fmt::Result {
    let pad = " ".repeat(indent);
    for e in entries {
        write!(f, "{}{}", pad, e.key)?;
        for a in &e.args {
            match a {
                Arg::Uint(n, _) => write!(f, " {}", n)?,
                Arg::Ident(s, _) => write!(f, " {}", s)?,
                Arg::Str(s) => write!(f, " {}", quote(s))?,
                Arg::Vector(v, _) => write!(f, " ({})", v.iter().map(quote).collect::<Vec<_>>().join(", "))?,
                Arg::Block(b) => {
                    writeln!(f, " {{")?;
                    write_entries(f, b, indent + 2)?;
                    write!(f, "{}}}", pad)?;
                }
            }
        }
        writeln!(f)?;
    }
    Ok(())
}

/// Canonical text of a document; parsing it gives back an equal document.
impl fmt::Display for InputDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tower;
        writeln!(f, "tower {{")?;
        writeln!(f, "  p {}", t.p)?;
        if !t.base.is_empty() {
            writeln!(f, "  base {}", t.base.join(" "))?;
        }
        if let Some(s) = &t.sep {
            write!(f, "  sep {} {{ minpoly {}", s.name, quote(&s.minpoly))?;
            if !s.autos.is_empty() {
                write!(f, " autos {{")?;
                for (g, img) in &s.autos {
                    write!(f, " {} {}", g, quote(img))?;
                }
                write!(f, " }}")?;
            }
            writeln!(f, " }}")?;
        }
        for g in &t.insep {
            writeln!(f, "  insep {} {{ n {} value {} }}", g.name, g.n, quote(&g.value))?;
        }
        writeln!(f, "}}")?;
        for task in &self.tasks {
            writeln!(f, "task {} {{", task.kind)?;
            write_entries(f, &task.entries, 2)?;
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
