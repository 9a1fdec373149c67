//! Encoding and decoding between host values and terminal machine values.
//!
//! Naturals are Peano-encoded (`Nat = rec n. 1 (+) n`, zero on the left),
//! lists are `rec l. 1 (+) (a (*) l)` with nil on the left, trees are
//! `rec t. 1 (+) (a (*) (t (*) t))`. Decoding is type-directed and rejects
//! values containing holes or destinations — holes are not data.

use std::fmt;

use crate::syntax::{TypeExpr, Value};
use crate::typecheck::unify::{types_equal, unfold_rec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Unit,
    Bool(bool),
    Nat(u64),
    List(Vec<Decoded>),
    Tree(Box<TreeNode>),
    Nil,
    Pair(Box<Decoded>, Box<Decoded>),
    Inl(Box<Decoded>),
    Inr(Box<Decoded>),
    Boxed(Box<Decoded>),
    Fun,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Decoded,
    pub left: Decoded,
    pub right: Decoded,
}

impl fmt::Display for Decoded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoded::Unit => write!(f, "()"),
            Decoded::Bool(b) => write!(f, "{}", b),
            Decoded::Nat(n) => write!(f, "{}", n),
            Decoded::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, "]")
            }
            Decoded::Tree(node) => {
                write!(f, "node({}, {}, {})", node.label, node.left, node.right)
            }
            Decoded::Nil => write!(f, "nil"),
            Decoded::Pair(a, b) => write!(f, "({}, {})", a, b),
            Decoded::Inl(a) => write!(f, "Inl {}", a),
            Decoded::Inr(a) => write!(f, "Inr {}", a),
            Decoded::Boxed(a) => write!(f, "box {}", a),
            Decoded::Fun => write!(f, "<fun>"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecodeError(pub String);

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "decode error: {}", self.0)
    }
}

pub fn nat_type() -> TypeExpr {
    TypeExpr::Rec(Box::new(TypeExpr::sum(TypeExpr::Unit, TypeExpr::RecVar(0))))
}

pub fn list_type(elem: TypeExpr) -> TypeExpr {
    TypeExpr::Rec(Box::new(TypeExpr::sum(
        TypeExpr::Unit,
        TypeExpr::prod(elem, TypeExpr::RecVar(0)),
    )))
}

pub fn tree_type(elem: TypeExpr) -> TypeExpr {
    TypeExpr::Rec(Box::new(TypeExpr::sum(
        TypeExpr::Unit,
        TypeExpr::prod(
            elem,
            TypeExpr::prod(TypeExpr::RecVar(0), TypeExpr::RecVar(0)),
        ),
    )))
}

pub fn bool_type() -> TypeExpr {
    TypeExpr::sum(TypeExpr::Unit, TypeExpr::Unit)
}

/// `0 -> Inl ()`, `k+1 -> Inr (encoding of k)`.
pub fn encode_nat(k: u64) -> Value {
    let mut v = Value::inl(Value::UnitV);
    for _ in 0..k {
        v = Value::inr(v);
    }
    v
}

pub fn encode_list(items: impl IntoIterator<Item = Value>) -> Value {
    let items: Vec<Value> = items.into_iter().collect();
    let mut v = Value::inl(Value::UnitV);
    for item in items.into_iter().rev() {
        v = Value::inr(Value::pair(item, v));
    }
    v
}

fn is_nat(ty: &TypeExpr) -> bool {
    types_equal(ty, &nat_type())
}

fn as_list_elem(ty: &TypeExpr) -> Option<TypeExpr> {
    // Match rec l. 1 (+) (a (*) l) up to unfolding.
    if let TypeExpr::Sum(nil, cons) = shape(ty) {
        if !types_equal(&nil, &TypeExpr::Unit) {
            return None;
        }
        if let TypeExpr::Prod(head, tail) = shape(&cons) {
            if types_equal(&tail, ty) {
                return Some(*head);
            }
        }
    }
    None
}

fn as_tree_elem(ty: &TypeExpr) -> Option<TypeExpr> {
    if let TypeExpr::Sum(nil, node) = shape(ty) {
        if !types_equal(&nil, &TypeExpr::Unit) {
            return None;
        }
        if let TypeExpr::Prod(label, subs) = shape(&node) {
            if let TypeExpr::Prod(l, r) = shape(&subs) {
                if types_equal(&l, ty) && types_equal(&r, ty) {
                    return Some(*label);
                }
            }
        }
    }
    None
}

fn shape(ty: &TypeExpr) -> TypeExpr {
    let mut cur = ty.clone();
    let mut fuel = 64;
    while let TypeExpr::Rec(body) = &cur {
        cur = unfold_rec(body);
        fuel -= 1;
        if fuel == 0 {
            break;
        }
    }
    match cur {
        TypeExpr::Sum(a, b) => TypeExpr::Sum(a, b),
        other => other,
    }
}

/// Interpret a terminal value against its type.
pub fn decode(v: &Value, ty: &TypeExpr) -> Result<Decoded, DecodeError> {
    match v {
        Value::Hole(h) => return Err(DecodeError(format!("value contains hole []{}", h))),
        Value::DestV(h) => {
            return Err(DecodeError(format!("value contains destination ->{}", h)))
        }
        _ => {}
    }
    if is_nat(ty) {
        let mut n: u64 = 0;
        let mut cur = v;
        loop {
            match cur {
                Value::InlV(inner) if **inner == Value::UnitV => return Ok(Decoded::Nat(n)),
                Value::InrV(inner) => {
                    n += 1;
                    cur = inner;
                }
                other => {
                    return Err(DecodeError(format!("not a natural number: {}", other)))
                }
            }
        }
    }
    if types_equal(ty, &bool_type()) {
        return match v {
            Value::InlV(inner) if **inner == Value::UnitV => Ok(Decoded::Bool(true)),
            Value::InrV(inner) if **inner == Value::UnitV => Ok(Decoded::Bool(false)),
            other => Err(DecodeError(format!("not a boolean: {}", other))),
        };
    }
    if let Some(elem) = as_list_elem(ty) {
        let mut items = Vec::new();
        let mut cur = v;
        loop {
            match cur {
                Value::InlV(inner) if **inner == Value::UnitV => {
                    return Ok(Decoded::List(items))
                }
                Value::InrV(cell) => match &**cell {
                    Value::PairV(head, tail) => {
                        items.push(decode(head, &elem)?);
                        cur = tail;
                    }
                    other => return Err(DecodeError(format!("not a list cell: {}", other))),
                },
                other => return Err(DecodeError(format!("not a list: {}", other))),
            }
        }
    }
    if let Some(elem) = as_tree_elem(ty) {
        return decode_tree(v, ty, &elem);
    }
    match (v, shape(ty)) {
        (Value::UnitV, _) => Ok(Decoded::Unit),
        (Value::PairV(a, b), TypeExpr::Prod(ta, tb)) => Ok(Decoded::Pair(
            Box::new(decode(a, &ta)?),
            Box::new(decode(b, &tb)?),
        )),
        (Value::InlV(a), TypeExpr::Sum(ta, _)) => Ok(Decoded::Inl(Box::new(decode(a, &ta)?))),
        (Value::InrV(b), TypeExpr::Sum(_, tb)) => Ok(Decoded::Inr(Box::new(decode(b, &tb)?))),
        (Value::ModV(_, a), TypeExpr::Exp(_, ta)) => {
            Ok(Decoded::Boxed(Box::new(decode(a, &ta)?)))
        }
        (Value::Fun(..), _) => Ok(Decoded::Fun),
        (other, ty) => Err(DecodeError(format!("cannot decode {} at type {}", other, ty))),
    }
}

fn decode_tree(v: &Value, ty: &TypeExpr, elem: &TypeExpr) -> Result<Decoded, DecodeError> {
    match v {
        Value::InlV(inner) if **inner == Value::UnitV => Ok(Decoded::Nil),
        Value::InrV(node) => match &**node {
            Value::PairV(label, subs) => match &**subs {
                Value::PairV(l, r) => Ok(Decoded::Tree(Box::new(TreeNode {
                    label: decode(label, elem)?,
                    left: decode_tree(l, ty, elem)?,
                    right: decode_tree(r, ty, elem)?,
                }))),
                other => Err(DecodeError(format!("not tree children: {}", other))),
            },
            other => Err(DecodeError(format!("not a tree node: {}", other))),
        },
        other => Err(DecodeError(format!("not a tree: {}", other))),
    }
}

/// Decode a list of naturals, the common corpus result shape.
pub fn decode_list(v: &Value) -> Result<Vec<u64>, DecodeError> {
    match decode(v, &list_type(nat_type()))? {
        Decoded::List(items) => items
            .into_iter()
            .map(|d| match d {
                Decoded::Nat(n) => Ok(n),
                other => Err(DecodeError(format!("list item is not a natural: {}", other))),
            })
            .collect(),
        other => Err(DecodeError(format!("not a list: {}", other))),
    }
}

/// Decode a tree of naturals into `(label, left, right)` nesting.
pub fn decode_tree_nat(v: &Value) -> Result<Decoded, DecodeError> {
    decode(v, &tree_type(nat_type()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nat_round_trip() {
        assert_eq!(encode_nat(0), Value::inl(Value::UnitV));
        for k in 0..5 {
            assert_eq!(decode(&encode_nat(k), &nat_type()).unwrap(), Decoded::Nat(k));
        }
    }

    #[test]
    fn list_round_trip() {
        let v = encode_list([encode_nat(0), encode_nat(1)]);
        assert_eq!(decode_list(&v).unwrap(), vec![0, 1]);
    }

    #[test]
    fn holes_are_not_data() {
        let v = Value::inl(Value::Hole(3));
        assert!(decode(&v, &bool_type()).is_err());
    }
}
