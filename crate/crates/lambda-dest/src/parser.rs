//! Lexer and parser for the ASCII program syntax (`.ld` files).
//!
//! One surface form per grammar production:
//!
//! - types: `1`, `T (+) U`, `T (*) U`, `!{m} T`, `T -{m}o U`, `[n T]`,
//!   `S >< T`, `rec a. T`, abbreviation application `List 1`
//! - terms: application by juxtaposition, `t ; u`, `case[m] t of {...}`,
//!   `upd t with x -> u`, `to t`, `from t`, `from' t`, `new : T`,
//!   fill operators `<| () | Inl | Inr | (,) | Mod{m} | fun x{m} -> u`,
//!   `t <o> t'`, `t <! t'`, and sugar `()`, `(t, t)`, `Inl t`, `Inr t`,
//!   `Mod{m} t`, `fun x{m} -> u`
//! - modes: multiplicity `1` or `w`, age `v`, `^k`, or `inf`, written
//!   adjacently as in `1v`, `w^2`, `1inf`
//!
//! `--` starts a line comment. Identifiers beginning with `%` are reserved
//! for internally generated names and rejected here.

use crate::mode::{Age, Mode, Mult, LIN_NOW};
use crate::surface::{Def, Diagnostic, Program, Surface, SurfaceType, TypeDef};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    UIdent(String),
    Num(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Colon,
    Eq,
    Pipe,
    Caret,
    Arrow,       // ->
    TyArrowPre,  // -{  (mode follows, then } o)
    TyArrowUnit, // -o
    FillHollow,  // <|
    FillLeafOp,  // <!
    FillCompOp,  // <o>
    TyPlus,      // (+)
    TyStar,      // (*)
    PairCtor,    // (,)
    UnitTok,     // ()
    AmparOp,     // ><
    Bang,        // !
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) | Tok::UIdent(s) => write!(f, "`{}`", s),
            Tok::Num(n) => write!(f, "`{}`", n),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::TyArrowPre => write!(f, "`-{{`"),
            Tok::TyArrowUnit => write!(f, "`-o`"),
            Tok::FillHollow => write!(f, "`<|`"),
            Tok::FillLeafOp => write!(f, "`<!`"),
            Tok::FillCompOp => write!(f, "`<o>`"),
            Tok::TyPlus => write!(f, "`(+)`"),
            Tok::TyStar => write!(f, "`(*)`"),
            Tok::PairCtor => write!(f, "`(,)`"),
            Tok::UnitTok => write!(f, "`()`"),
            Tok::AmparOp => write!(f, "`><`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn peek_at(&self, off: usize) -> u8 {
        *self.src.get(self.pos + off).unwrap_or(&0)
    }

    fn bump(&mut self) -> u8 {
        let c = self.peek_at(0);
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn err(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(msg, self.line, self.col)
    }

    fn lex(mut self) -> Result<Vec<Spanned>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            // skip whitespace and -- comments
            loop {
                let c = self.peek_at(0);
                if c == b' ' || c == b'\t' || c == b'\r' || c == b'\n' {
                    self.bump();
                } else if c == b'-' && self.peek_at(1) == b'-' {
                    while self.peek_at(0) != b'\n' && self.peek_at(0) != 0 {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let c = self.peek_at(0);
            if c == 0 {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            }
            let tok = match c {
                b'(' => {
                    self.bump();
                    match (self.peek_at(0), self.peek_at(1)) {
                        (b'+', b')') => {
                            self.bump();
                            self.bump();
                            Tok::TyPlus
                        }
                        (b'*', b')') => {
                            self.bump();
                            self.bump();
                            Tok::TyStar
                        }
                        (b',', b')') => {
                            self.bump();
                            self.bump();
                            Tok::PairCtor
                        }
                        (b')', _) => {
                            self.bump();
                            Tok::UnitTok
                        }
                        _ => Tok::LParen,
                    }
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b';' => {
                    self.bump();
                    Tok::Semi
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b':' => {
                    self.bump();
                    Tok::Colon
                }
                b'=' => {
                    self.bump();
                    Tok::Eq
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'!' => {
                    self.bump();
                    Tok::Bang
                }
                b'<' => {
                    self.bump();
                    match self.peek_at(0) {
                        b'|' => {
                            self.bump();
                            Tok::FillHollow
                        }
                        b'!' => {
                            self.bump();
                            Tok::FillLeafOp
                        }
                        b'o' if self.peek_at(1) == b'>' => {
                            self.bump();
                            self.bump();
                            Tok::FillCompOp
                        }
                        _ => return Err(self.err("stray `<`; expected `<|`, `<!`, or `<o>`")),
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek_at(0) == b'<' {
                        self.bump();
                        Tok::AmparOp
                    } else {
                        return Err(self.err("stray `>`; expected `><`"));
                    }
                }
                b'-' => {
                    self.bump();
                    match self.peek_at(0) {
                        b'>' => {
                            self.bump();
                            Tok::Arrow
                        }
                        b'{' => {
                            self.bump();
                            Tok::TyArrowPre
                        }
                        b'o' if !is_ident_char(self.peek_at(1)) => {
                            self.bump();
                            Tok::TyArrowUnit
                        }
                        _ => return Err(self.err("stray `-`; expected `->`, `-{m}o`, or `-o`")),
                    }
                }
                b'%' => {
                    return Err(self.err("identifiers starting with `%` are reserved"));
                }
                b'0'..=b'9' => {
                    let mut n: u32 = 0;
                    while self.peek_at(0).is_ascii_digit() {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add((self.peek_at(0) - b'0') as u32))
                            .ok_or_else(|| self.err("number literal too large"))?;
                        self.bump();
                    }
                    Tok::Num(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while is_ident_char(self.peek_at(0)) {
                        self.bump();
                    }
                    let s = std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .to_string();
                    if c.is_ascii_uppercase() {
                        Tok::UIdent(s)
                    } else {
                        Tok::Ident(s)
                    }
                }
                _ => {
                    return Err(self.err(format!(
                        "unexpected character `{}`",
                        char::from(c)
                    )))
                }
            };
            out.push((tok, line, col));
        }
    }
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

const STOP_IDENTS: &[&str] = &[
    "with", "of", "def", "main", "type", "rec", "case", "upd", "fun",
];

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, Diagnostic> {
        Ok(Parser { toks: Lexer::new(src).lex()?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), Diagnostic> {
        if self.eat(t) {
            Ok(())
        } else {
            let (l, c) = self.here();
            Err(Diagnostic::error(
                format!("expected {}, found {}", t, self.peek()),
                l,
                c,
            ))
        }
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        let (l, c) = self.here();
        Diagnostic::error(msg, l, c)
    }

    fn ident(&mut self) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) if !STOP_IDENTS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err_here(format!("expected identifier, found {}", other))),
        }
    }

    // -- modes --------------------------------------------------------------

    fn try_mode(&mut self) -> Option<Mode> {
        let save = self.pos;
        match self.mode_inner() {
            Some(m) => Some(m),
            None => {
                self.pos = save;
                None
            }
        }
    }

    fn mode_inner(&mut self) -> Option<Mode> {
        let mult = match self.peek().clone() {
            Tok::Num(1) => {
                self.bump();
                Mult::One
            }
            Tok::Ident(s) if s.starts_with('w') => {
                self.bump();
                match s.as_str() {
                    "w" => Mult::Many,
                    "wv" => return Some(Mode::new(Mult::Many, Age::Fin(0))),
                    "winf" => return Some(Mode::new(Mult::Many, Age::Inf)),
                    _ => return None,
                }
            }
            _ => return None,
        };
        let age = match self.peek().clone() {
            Tok::Ident(s) if s == "v" => {
                self.bump();
                Age::Fin(0)
            }
            Tok::Ident(s) if s == "inf" => {
                self.bump();
                Age::Inf
            }
            Tok::Caret => {
                self.bump();
                match self.peek().clone() {
                    Tok::Num(k) => {
                        self.bump();
                        Age::Fin(k)
                    }
                    _ => return None,
                }
            }
            _ => return None,
        };
        Some(Mode::new(mult, age))
    }

    fn mode(&mut self) -> Result<Mode, Diagnostic> {
        self.try_mode()
            .ok_or_else(|| self.err_here("expected a mode (e.g. `1v`, `w^2`, `1inf`)"))
    }

    /// `{m}`, or nothing (defaulting to the unit mode `1v`)
    fn opt_braced_mode(&mut self) -> Result<Mode, Diagnostic> {
        if self.eat(&Tok::LBrace) {
            let m = self.mode()?;
            self.expect(&Tok::RBrace)?;
            Ok(m)
        } else {
            Ok(LIN_NOW)
        }
    }

    // -- types --------------------------------------------------------------

    fn ty(&mut self) -> Result<SurfaceType, Diagnostic> {
        let lhs = self.ty_ampar()?;
        match self.peek() {
            Tok::TyArrowPre => {
                self.bump();
                let m = self.mode()?;
                self.expect(&Tok::RBrace)?;
                match self.peek().clone() {
                    Tok::Ident(s) if s == "o" => {
                        self.bump();
                    }
                    _ => return Err(self.err_here("expected `o` to finish `-{m}o`")),
                }
                let rhs = self.ty()?;
                Ok(SurfaceType::Arrow(Box::new(lhs), m, Box::new(rhs)))
            }
            Tok::TyArrowUnit => {
                self.bump();
                let rhs = self.ty()?;
                Ok(SurfaceType::Arrow(Box::new(lhs), LIN_NOW, Box::new(rhs)))
            }
            _ => Ok(lhs),
        }
    }

    fn ty_ampar(&mut self) -> Result<SurfaceType, Diagnostic> {
        let mut lhs = self.ty_sum()?;
        while self.eat(&Tok::AmparOp) {
            let rhs = self.ty_sum()?;
            lhs = SurfaceType::Ampar(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn ty_sum(&mut self) -> Result<SurfaceType, Diagnostic> {
        let lhs = self.ty_prod()?;
        if self.eat(&Tok::TyPlus) {
            let rhs = self.ty_sum()?;
            Ok(SurfaceType::Sum(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_prod(&mut self) -> Result<SurfaceType, Diagnostic> {
        let lhs = self.ty_app()?;
        if self.eat(&Tok::TyStar) {
            let rhs = self.ty_prod()?;
            Ok(SurfaceType::Prod(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_app(&mut self) -> Result<SurfaceType, Diagnostic> {
        if let Tok::UIdent(name) = self.peek().clone() {
            self.bump();
            let mut args = Vec::new();
            while self.starts_ty_atom() {
                args.push(self.ty_atom()?);
            }
            Ok(SurfaceType::Name(name, args))
        } else {
            self.ty_atom()
        }
    }

    fn starts_ty_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Num(1) | Tok::LParen | Tok::LBracket | Tok::Bang | Tok::UIdent(_)
        ) || matches!(self.peek(), Tok::Ident(s)
            if !STOP_IDENTS.contains(&s.as_str()))
    }

    fn ty_atom(&mut self) -> Result<SurfaceType, Diagnostic> {
        match self.peek().clone() {
            Tok::Num(1) => {
                self.bump();
                Ok(SurfaceType::Unit)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBracket => {
                self.bump();
                let mode = self.try_mode().unwrap_or(LIN_NOW);
                let t = self.ty()?;
                self.expect(&Tok::RBracket)?;
                Ok(SurfaceType::Dest(mode, Box::new(t)))
            }
            Tok::Bang => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let m = self.mode()?;
                self.expect(&Tok::RBrace)?;
                let t = self.ty_atom()?;
                Ok(SurfaceType::Exp(m, Box::new(t)))
            }
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                let name = self.ident()?;
                self.expect(&Tok::Dot)?;
                let body = self.ty()?;
                Ok(SurfaceType::Rec(name, Box::new(body)))
            }
            Tok::UIdent(name) => {
                self.bump();
                Ok(SurfaceType::Name(name, Vec::new()))
            }
            Tok::Ident(s) if !STOP_IDENTS.contains(&s.as_str()) => {
                self.bump();
                Ok(SurfaceType::Var(s))
            }
            other => Err(self.err_here(format!("expected a type, found {}", other))),
        }
    }

    // -- terms --------------------------------------------------------------

    fn term(&mut self) -> Result<Surface, Diagnostic> {
        let lhs = self.open_term()?;
        if self.eat(&Tok::Semi) {
            let rhs = self.term()?;
            Ok(Surface::Seq(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn open_term(&mut self) -> Result<Surface, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "fun" => {
                self.bump();
                let x = self.ident()?;
                let m = self.opt_braced_mode()?;
                self.expect(&Tok::Arrow)?;
                let body = self.term()?;
                Ok(Surface::SLam(x, m, Box::new(body)))
            }
            Tok::Ident(s) if s == "upd" => {
                self.bump();
                let scrut = self.fill_term()?;
                match self.peek().clone() {
                    Tok::Ident(w) if w == "with" => {
                        self.bump();
                    }
                    _ => return Err(self.err_here("expected `with` in `upd t with x -> u`")),
                }
                let x = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let body = self.term()?;
                Ok(Surface::Upd(Box::new(scrut), x, Box::new(body)))
            }
            Tok::Ident(s) if s == "case" => {
                self.bump();
                let m = if self.eat(&Tok::LBracket) {
                    let m = self.mode()?;
                    self.expect(&Tok::RBracket)?;
                    m
                } else {
                    LIN_NOW
                };
                let scrut = self.fill_term()?;
                match self.peek().clone() {
                    Tok::Ident(w) if w == "of" => {
                        self.bump();
                    }
                    _ => return Err(self.err_here("expected `of` in case expression")),
                }
                self.expect(&Tok::LBrace)?;
                let out = self.case_branches(m, scrut)?;
                self.expect(&Tok::RBrace)?;
                Ok(out)
            }
            _ => self.fill_term(),
        }
    }

    fn case_branches(&mut self, m: Mode, scrut: Surface) -> Result<Surface, Diagnostic> {
        match self.peek().clone() {
            Tok::UIdent(s) if s == "Inl" => {
                self.bump();
                let x1 = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let u1 = self.term()?;
                self.expect(&Tok::Pipe)?;
                match self.peek().clone() {
                    Tok::UIdent(s) if s == "Inr" => {
                        self.bump();
                    }
                    _ => return Err(self.err_here("expected `Inr` branch")),
                }
                let x2 = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let u2 = self.term()?;
                Ok(Surface::CaseSum(m, Box::new(scrut), x1, Box::new(u1), x2, Box::new(u2)))
            }
            Tok::LParen => {
                self.bump();
                let x1 = self.ident()?;
                self.expect(&Tok::Comma)?;
                let x2 = self.ident()?;
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Arrow)?;
                let u = self.term()?;
                Ok(Surface::CaseProd(m, Box::new(scrut), x1, x2, Box::new(u)))
            }
            Tok::UIdent(s) if s == "Mod" => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let n = self.mode()?;
                self.expect(&Tok::RBrace)?;
                let x = self.ident()?;
                self.expect(&Tok::Arrow)?;
                let u = self.term()?;
                Ok(Surface::CaseExp(m, n, Box::new(scrut), x, Box::new(u)))
            }
            other => Err(self.err_here(format!(
                "expected `Inl`, `(`, or `Mod` to open a case branch, found {}",
                other
            ))),
        }
    }

    fn fill_term(&mut self) -> Result<Surface, Diagnostic> {
        let mut lhs = self.app_term()?;
        loop {
            match self.peek() {
                Tok::FillHollow => {
                    self.bump();
                    lhs = self.hollow(lhs)?;
                }
                Tok::FillCompOp => {
                    self.bump();
                    let rhs = self.app_term()?;
                    lhs = Surface::FillComp(Box::new(lhs), Box::new(rhs));
                }
                Tok::FillLeafOp => {
                    self.bump();
                    let rhs = self.app_term()?;
                    lhs = Surface::FillLeaf(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn hollow(&mut self, lhs: Surface) -> Result<Surface, Diagnostic> {
        match self.peek().clone() {
            Tok::UnitTok => {
                self.bump();
                Ok(Surface::FillUnit(Box::new(lhs)))
            }
            Tok::PairCtor => {
                self.bump();
                Ok(Surface::FillProd(Box::new(lhs)))
            }
            Tok::UIdent(s) if s == "Inl" => {
                self.bump();
                Ok(Surface::FillInl(Box::new(lhs)))
            }
            Tok::UIdent(s) if s == "Inr" => {
                self.bump();
                Ok(Surface::FillInr(Box::new(lhs)))
            }
            Tok::UIdent(s) if s == "Mod" => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let m = self.mode()?;
                self.expect(&Tok::RBrace)?;
                Ok(Surface::FillExp(m, Box::new(lhs)))
            }
            Tok::Ident(s) if s == "fun" => {
                self.bump();
                let x = self.ident()?;
                let m = self.opt_braced_mode()?;
                self.expect(&Tok::Arrow)?;
                let body = self.term()?;
                Ok(Surface::FillFun(Box::new(lhs), x, m, Box::new(body)))
            }
            other => Err(self.err_here(format!(
                "expected `()`, `Inl`, `Inr`, `(,)`, `Mod{{m}}`, or `fun` after `<|`, found {}",
                other
            ))),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::UnitTok => true,
            Tok::UIdent(s) => s == "Inl" || s == "Inr" || s == "Mod",
            Tok::Ident(s) => !STOP_IDENTS.contains(&s.as_str()),
            _ => false,
        }
    }

    fn app_term(&mut self) -> Result<Surface, Diagnostic> {
        let mut lhs = self.prefix_term()?;
        while self.starts_atom() {
            let rhs = self.prefix_term()?;
            lhs = Surface::App(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix_term(&mut self) -> Result<Surface, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "to" => {
                self.bump();
                Ok(Surface::To(Box::new(self.prefix_term()?)))
            }
            Tok::Ident(s) if s == "from" => {
                self.bump();
                Ok(Surface::From(Box::new(self.prefix_term()?)))
            }
            Tok::Ident(s) if s == "from'" => {
                self.bump();
                Ok(Surface::SFromPrime(Box::new(self.prefix_term()?)))
            }
            Tok::UIdent(s) if s == "Inl" => {
                self.bump();
                Ok(Surface::SInl(Box::new(self.prefix_term()?)))
            }
            Tok::UIdent(s) if s == "Inr" => {
                self.bump();
                Ok(Surface::SInr(Box::new(self.prefix_term()?)))
            }
            Tok::UIdent(s) if s == "Mod" => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let m = self.mode()?;
                self.expect(&Tok::RBrace)?;
                Ok(Surface::SMod(m, Box::new(self.prefix_term()?)))
            }
            _ => self.atom_term(),
        }
    }

    fn atom_term(&mut self) -> Result<Surface, Diagnostic> {
        match self.peek().clone() {
            Tok::UnitTok => {
                self.bump();
                Ok(Surface::SUnit)
            }
            Tok::Ident(s) if s == "new" => {
                self.bump();
                if self.eat(&Tok::Colon) {
                    let t = self.ty()?;
                    Ok(Surface::New(Some(t)))
                } else {
                    Ok(Surface::New(None))
                }
            }
            Tok::Ident(s) if !STOP_IDENTS.contains(&s.as_str()) => {
                self.bump();
                Ok(Surface::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if self.eat(&Tok::Comma) {
                    let t2 = self.term()?;
                    self.expect(&Tok::RParen)?;
                    Ok(Surface::SPair(Box::new(t), Box::new(t2)))
                } else {
                    self.expect(&Tok::RParen)?;
                    Ok(t)
                }
            }
            other => Err(self.err_here(format!("expected a term, found {}", other))),
        }
    }

    // -- program items ------------------------------------------------------

    fn program(&mut self) -> Result<Program, Diagnostic> {
        let mut type_defs: Vec<TypeDef> = Vec::new();
        let mut defs: Vec<Def> = Vec::new();
        let mut main: Option<(Surface, Option<SurfaceType>)> = None;
        loop {
            let (line, col) = self.here();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(s) if s == "type" => {
                    self.bump();
                    let name = match self.peek().clone() {
                        Tok::UIdent(n) => {
                            self.bump();
                            n
                        }
                        _ => {
                            return Err(self.err_here(
                                "type names start with an uppercase letter",
                            ))
                        }
                    };
                    let mut params = Vec::new();
                    while let Tok::Ident(p) = self.peek().clone() {
                        if STOP_IDENTS.contains(&p.as_str()) {
                            break;
                        }
                        self.bump();
                        params.push(p);
                    }
                    self.expect(&Tok::Eq)?;
                    let body = self.ty()?;
                    if type_defs.iter().any(|td| td.name == name) {
                        return Err(Diagnostic::error(
                            format!("duplicate type definition `{}`", name),
                            line,
                            col,
                        ));
                    }
                    type_defs.push(TypeDef { name, params, body, line });
                }
                Tok::Ident(s) if s == "rec" || s == "def" => {
                    let recursive = s == "rec";
                    self.bump();
                    if recursive {
                        match self.peek().clone() {
                            Tok::Ident(d) if d == "def" => {
                                self.bump();
                            }
                            _ => return Err(self.err_here("expected `def` after `rec`")),
                        }
                    }
                    let name = self.ident()?;
                    let ascription = if self.eat(&Tok::Colon) {
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    self.expect(&Tok::Eq)?;
                    let body = self.term()?;
                    if defs.iter().any(|d| d.name == name) {
                        return Err(Diagnostic::error(
                            format!("duplicate definition `{}`", name),
                            line,
                            col,
                        ));
                    }
                    if recursive && ascription.is_none() {
                        return Err(Diagnostic::error(
                            format!("recursive definition `{}` needs a type ascription", name),
                            line,
                            col,
                        ));
                    }
                    defs.push(Def { name, ascription, body, recursive, line });
                }
                Tok::Ident(s) if s == "main" => {
                    self.bump();
                    let asc = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                    self.expect(&Tok::Eq)?;
                    let body = self.term()?;
                    if main.is_some() {
                        return Err(Diagnostic::error("duplicate `main`", line, col));
                    }
                    main = Some((body, asc));
                }
                other => {
                    return Err(self.err_here(format!(
                        "expected `type`, `def`, `rec def`, or `main`, found {}",
                        other
                    )))
                }
            }
        }
        let (main, main_ascription) = main.ok_or_else(|| {
            Diagnostic::error("program has no `main = ...` entry", 1, 1)
        })?;
        Ok(Program { type_defs, defs, main, main_ascription })
    }
}

/// Parse a whole program.
pub fn parse(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|d| vec![d])?;
    p.program().map_err(|d| vec![d])
}

/// Parse a single term (used by tests and the prelude builder).
pub fn parse_term(src: &str) -> Result<Surface, Diagnostic> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

/// Parse a single type.
pub fn parse_type(src: &str) -> Result<SurfaceType, Diagnostic> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

/// Parse a standalone mode like `1v` or `w^2`.
pub fn parse_mode(src: &str) -> Result<Mode, Diagnostic> {
    let mut p = Parser::new(src)?;
    let m = p.mode()?;
    p.expect(&Tok::Eof)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{LIN_NOW, UNR_INF};

    #[test]
    fn fill_inl_production() {
        let t = parse_term("d <| Inl").unwrap();
        assert_eq!(t, Surface::FillInl(Box::new(Surface::Var("d".into()))));
    }

    #[test]
    fn upd_production() {
        let t = parse_term("upd t with x -> x").unwrap();
        assert_eq!(
            t,
            Surface::Upd(
                Box::new(Surface::Var("t".into())),
                "x".into(),
                Box::new(Surface::Var("x".into()))
            )
        );
    }

    #[test]
    fn case_sum_production() {
        let t = parse_term("case[1v] t of {Inl a -> a | Inr b -> b}").unwrap();
        match t {
            Surface::CaseSum(m, _, x1, _, x2, _) => {
                assert_eq!(m, LIN_NOW);
                assert_eq!(x1, "a");
                assert_eq!(x2, "b");
            }
            other => panic!("unexpected parse: {:?}", other),
        }
    }

    #[test]
    fn sum_type() {
        let t = parse_type("1 (+) 1").unwrap();
        assert_eq!(
            t,
            SurfaceType::Sum(Box::new(SurfaceType::Unit), Box::new(SurfaceType::Unit))
        );
    }

    #[test]
    fn ampar_type_keeps_structure_side_left() {
        let t = parse_type("[1v 1] >< 1").unwrap();
        assert_eq!(
            t,
            SurfaceType::Ampar(
                Box::new(SurfaceType::Dest(LIN_NOW, Box::new(SurfaceType::Unit))),
                Box::new(SurfaceType::Unit)
            )
        );
    }

    #[test]
    fn exp_type_with_spaced_mode() {
        let t = parse_type("!{w inf} 1").unwrap();
        assert_eq!(t, SurfaceType::Exp(UNR_INF, Box::new(SurfaceType::Unit)));
    }

    #[test]
    fn modes() {
        assert_eq!(parse_mode("1v").unwrap(), LIN_NOW);
        assert_eq!(parse_mode("w^2").unwrap().to_string(), "w^2");
        assert_eq!(parse_mode("1inf").unwrap().to_string(), "1inf");
        assert!(parse_mode("^2").is_err());
    }

    #[test]
    fn reserved_prefix_rejected() {
        assert!(parse_term("%d0").is_err());
    }

    #[test]
    fn fills_bind_tighter_than_seq() {
        let t = parse_term("d <| Inl <! x ; y").unwrap();
        match t {
            Surface::Seq(lhs, _) => match *lhs {
                Surface::FillLeaf(inner, _) => {
                    assert!(matches!(*inner, Surface::FillInl(_)));
                }
                other => panic!("unexpected: {:?}", other),
            },
            other => panic!("unexpected: {:?}", other),
        }
    }

    #[test]
    fn application_left_associative() {
        let t = parse_term("f x y").unwrap();
        assert_eq!(
            t,
            Surface::App(
                Box::new(Surface::App(
                    Box::new(Surface::Var("f".into())),
                    Box::new(Surface::Var("x".into()))
                )),
                Box::new(Surface::Var("y".into()))
            )
        );
    }

    #[test]
    fn program_requires_main() {
        assert!(parse("def x = ()").is_err());
        let p = parse("main = ()").unwrap();
        assert_eq!(p.main, Surface::SUnit);
    }

    #[test]
    fn duplicate_def_rejected() {
        let err = parse("def a = () def a = () main = ()").unwrap_err();
        assert!(err[0].message.contains("duplicate"));
    }

    #[test]
    fn parse_failures_carry_positions() {
        let err = parse_term("case t of").unwrap_err();
        assert!(err.line >= 1 && err.column >= 1);
    }
}
