//! Pretty-printing of types, terms, values, and commands.
//!
//! For sugar-free terms without embedded runtime-only values, the output
//! parses back to a structurally equal term (`parse . pretty = id`).

use std::fmt::Write;

use crate::syntax::{Term, TypeExpr, Value};

// Type precedence levels, loosest first: arrow < ampar < sum < prod < atom.
const TY_ARROW: u8 = 0;
const TY_AMPAR: u8 = 1;
const TY_SUM: u8 = 2;
const TY_PROD: u8 = 3;
const TY_ATOM: u8 = 4;

pub fn type_to_string(t: &TypeExpr) -> String {
    let mut s = String::new();
    ty(&mut s, t, TY_ARROW, 0);
    s
}

fn rec_name(depth: u32) -> String {
    let letter = (b'a' + (depth % 26) as u8) as char;
    if depth < 26 {
        letter.to_string()
    } else {
        format!("{}{}", letter, depth / 26)
    }
}

fn ty(out: &mut String, t: &TypeExpr, min: u8, depth: u32) {
    let level = match t {
        TypeExpr::Arrow(..) => TY_ARROW,
        TypeExpr::Ampar(..) => TY_AMPAR,
        TypeExpr::Sum(..) => TY_SUM,
        TypeExpr::Prod(..) => TY_PROD,
        _ => TY_ATOM,
    };
    let paren = level < min;
    if paren {
        out.push('(');
    }
    match t {
        TypeExpr::Unit => out.push('1'),
        TypeExpr::Sum(a, b) => {
            ty(out, a, TY_PROD, depth);
            out.push_str(" (+) ");
            ty(out, b, TY_SUM, depth);
        }
        TypeExpr::Prod(a, b) => {
            ty(out, a, TY_ATOM, depth);
            out.push_str(" (*) ");
            ty(out, b, TY_PROD, depth);
        }
        TypeExpr::Exp(m, a) => {
            let _ = write!(out, "!{{{}}} ", m);
            ty(out, a, TY_ATOM, depth);
        }
        TypeExpr::Arrow(a, m, b) => {
            ty(out, a, TY_AMPAR, depth);
            let _ = write!(out, " -{{{}}}o ", m);
            ty(out, b, TY_ARROW, depth);
        }
        TypeExpr::Dest(n, a) => {
            let _ = write!(out, "[{} ", n);
            ty(out, a, TY_ARROW, depth);
            out.push(']');
        }
        TypeExpr::Ampar(s, r) => {
            ty(out, s, TY_SUM, depth);
            out.push_str(" >< ");
            ty(out, r, TY_SUM, depth);
        }
        TypeExpr::Rec(body) => {
            let _ = write!(out, "rec {}. ", rec_name(depth));
            ty(out, body, TY_ARROW, depth + 1);
        }
        TypeExpr::RecVar(i) => {
            let name = if *i < depth {
                rec_name(depth - 1 - i)
            } else {
                format!("#{}", i)
            };
            out.push_str(&name);
        }
        TypeExpr::Meta(n) => {
            let _ = write!(out, "?{}", n);
        }
    }
    if paren {
        out.push(')');
    }
}

// Term precedence: seq and open forms < fill chains < application < atoms.
const TM_OPEN: u8 = 0;
const TM_FILL: u8 = 1;
const TM_APP: u8 = 2;
const TM_ATOM: u8 = 3;

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    term(&mut s, t, TM_OPEN);
    s
}

pub fn value_to_string(v: &Value) -> String {
    let mut s = String::new();
    value(&mut s, v, TM_OPEN);
    s
}

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Seq(..)
        | Term::CaseSum(..)
        | Term::CaseProd(..)
        | Term::CaseExp(..)
        | Term::UpdAmpar(..)
        | Term::Fix(..) => TM_OPEN,
        Term::NewAmpar(Some(_)) => TM_OPEN,
        Term::FillUnit(..)
        | Term::FillInl(..)
        | Term::FillInr(..)
        | Term::FillProd(..)
        | Term::FillExp(..)
        | Term::FillFun(..)
        | Term::FillComp(..)
        | Term::FillLeaf(..) => TM_FILL,
        Term::App(..) | Term::ToAmpar(..) | Term::FromAmpar(..) => TM_APP,
        Term::Var(_) | Term::NewAmpar(None) => TM_ATOM,
        Term::Val(v) => value_level(v),
    }
}

fn value_level(v: &Value) -> u8 {
    match v {
        Value::Fun(..) => TM_OPEN,
        Value::InlV(..) | Value::InrV(..) | Value::ModV(..) => TM_APP,
        _ => TM_ATOM,
    }
}

fn term(out: &mut String, t: &Term, min: u8) {
    let paren = term_level(t) < min;
    if paren {
        out.push('(');
    }
    match t {
        Term::Var(x) => out.push_str(x),
        Term::App(f, a) => {
            term(out, f, TM_APP);
            out.push(' ');
            term(out, a, TM_ATOM);
        }
        Term::Seq(a, b) => {
            term(out, a, TM_FILL);
            out.push_str(" ; ");
            term(out, b, TM_OPEN);
        }
        Term::CaseSum(m, s, x1, u1, x2, u2) => {
            let _ = write!(out, "case[{}] ", m);
            term(out, s, TM_FILL);
            let _ = write!(out, " of {{Inl {} -> ", x1);
            term(out, u1, TM_OPEN);
            let _ = write!(out, " | Inr {} -> ", x2);
            term(out, u2, TM_OPEN);
            out.push('}');
        }
        Term::CaseProd(m, s, x1, x2, u) => {
            let _ = write!(out, "case[{}] ", m);
            term(out, s, TM_FILL);
            let _ = write!(out, " of {{({}, {}) -> ", x1, x2);
            term(out, u, TM_OPEN);
            out.push('}');
        }
        Term::CaseExp(m, n, s, x, u) => {
            let _ = write!(out, "case[{}] ", m);
            term(out, s, TM_FILL);
            let _ = write!(out, " of {{Mod{{{}}} {} -> ", n, x);
            term(out, u, TM_OPEN);
            out.push('}');
        }
        Term::UpdAmpar(s, x, u) => {
            out.push_str("upd ");
            term(out, s, TM_FILL);
            let _ = write!(out, " with {} -> ", x);
            term(out, u, TM_OPEN);
        }
        Term::ToAmpar(s) => {
            out.push_str("to ");
            term(out, s, TM_ATOM);
        }
        Term::FromAmpar(s) => {
            out.push_str("from ");
            term(out, s, TM_ATOM);
        }
        Term::NewAmpar(None) => out.push_str("new"),
        Term::NewAmpar(Some(ty0)) => {
            out.push_str("new : ");
            out.push_str(&type_to_string(ty0));
        }
        Term::FillUnit(s) => {
            term(out, s, TM_FILL);
            out.push_str(" <| ()");
        }
        Term::FillInl(s) => {
            term(out, s, TM_FILL);
            out.push_str(" <| Inl");
        }
        Term::FillInr(s) => {
            term(out, s, TM_FILL);
            out.push_str(" <| Inr");
        }
        Term::FillProd(s) => {
            term(out, s, TM_FILL);
            out.push_str(" <| (,)");
        }
        Term::FillExp(m, s) => {
            term(out, s, TM_FILL);
            let _ = write!(out, " <| Mod{{{}}}", m);
        }
        Term::FillFun(s, x, m, u) => {
            term(out, s, TM_FILL);
            let _ = write!(out, " <| fun {}{{{}}} -> ", x, m);
            term(out, u, TM_OPEN);
        }
        Term::FillComp(a, b) => {
            term(out, a, TM_FILL);
            out.push_str(" <o> ");
            term(out, b, TM_APP);
        }
        Term::FillLeaf(a, b) => {
            term(out, a, TM_FILL);
            out.push_str(" <! ");
            term(out, b, TM_APP);
        }
        Term::Val(v) => value(out, v, min.max(term_level(t))),
        Term::Fix(x, m, body) => {
            let _ = write!(out, "fix {}{{{}}} -> ", x, m);
            term(out, body, TM_OPEN);
        }
    }
    if paren {
        out.push(')');
    }
}

fn value(out: &mut String, v: &Value, min: u8) {
    let paren = value_level(v) < min;
    if paren {
        out.push('(');
    }
    match v {
        Value::Hole(h) => {
            let _ = write!(out, "[]{}", h);
        }
        Value::DestV(h) => {
            let _ = write!(out, "->{}", h);
        }
        Value::AmparV(set, v2, v1, _) => {
            out.push('{');
            for (i, h) in set.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", h);
            }
            out.push_str("}< ");
            value(out, v2, TM_OPEN);
            out.push_str(" /\\ ");
            value(out, v1, TM_OPEN);
            out.push_str(" >");
        }
        Value::UnitV => out.push_str("()"),
        Value::Fun(x, m, body) => {
            let _ = write!(out, "fun {}{{{}}} -> ", x, m);
            term(out, body, TM_OPEN);
        }
        Value::InlV(v0) => {
            out.push_str("Inl ");
            value(out, v0, TM_ATOM);
        }
        Value::InrV(v0) => {
            out.push_str("Inr ");
            value(out, v0, TM_ATOM);
        }
        Value::ModV(m, v0) => {
            let _ = write!(out, "Mod{{{}}} ", m);
            value(out, v0, TM_ATOM);
        }
        Value::PairV(a, b) => {
            out.push('(');
            value(out, a, TM_OPEN);
            out.push_str(", ");
            value(out, b, TM_OPEN);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{LIN_NOW, UNR_INF};
    use crate::syntax::{Term, TypeExpr, Value};

    #[test]
    fn unit_value() {
        assert_eq!(value_to_string(&Value::UnitV), "()");
    }

    #[test]
    fn dest_type() {
        let t = TypeExpr::dest(LIN_NOW, TypeExpr::Unit);
        assert_eq!(type_to_string(&t), "[1v 1]");
    }

    #[test]
    fn arrow_type() {
        let t = TypeExpr::arrow(TypeExpr::Unit, UNR_INF, TypeExpr::Unit);
        assert_eq!(type_to_string(&t), "1 -{winf}o 1");
    }

    #[test]
    fn fill_chain() {
        let t = Term::FillLeaf(
            Box::new(Term::FillInl(Box::new(Term::var("d")))),
            Box::new(Term::var("x")),
        );
        assert_eq!(term_to_string(&t), "d <| Inl <! x");
    }

    #[test]
    fn ampar_value() {
        let v = Value::ampar(
            [1, 2].into_iter().collect(),
            Value::pair(Value::Hole(1), Value::Hole(2)),
            Value::pair(Value::DestV(1), Value::DestV(2)),
        );
        assert_eq!(
            value_to_string(&v),
            "{1,2}< ([]1, []2) /\\ (->1, ->2) >"
        );
    }
}
