//! Abstract syntax: types, terms, runtime values, hole names, and the
//! free-name and shifting operations on them.
//!
//! Terms follow the core grammar plus embedded runtime values (values only
//! arise during reduction, but substitution puts them inside terms, so the
//! term type carries them). Surface terms with sugar live in [`crate::surface`].

use std::collections::BTreeSet;
use std::fmt;

use crate::mode::Mode;

/// Hole names are positive naturals. `0` never names a hole; the freshness
/// arithmetic uses `max(empty) = 0` so the first generated name is `1`.
pub type HoleName = u32;

pub type HoleSet = BTreeSet<HoleName>;

/// Types. `Rec`/`RecVar` (de Bruijn) belong to the equirecursive extension
/// and are only produced when it is enabled. `Meta` is checker-internal:
/// the parser never produces it and pretty-printing shows it as `?n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Unit,
    Sum(Box<TypeExpr>, Box<TypeExpr>),
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    /// `!{n} T`
    Exp(Mode, Box<TypeExpr>),
    /// `T -{m}o U`
    Arrow(Box<TypeExpr>, Mode, Box<TypeExpr>),
    /// `[n T]`, a destination for a hole of type `T` accepting mode-`n` values
    Dest(Mode, Box<TypeExpr>),
    /// `S >< T`: structure `S` with holes, destinations carried by `T`
    Ampar(Box<TypeExpr>, Box<TypeExpr>),
    /// Equirecursive binder (de Bruijn)
    Rec(Box<TypeExpr>),
    RecVar(u32),
    /// Unification variable (internal)
    Meta(u32),
}

impl TypeExpr {
    pub fn sum(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Sum(Box::new(a), Box::new(b))
    }
    pub fn prod(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Prod(Box::new(a), Box::new(b))
    }
    pub fn exp(m: Mode, t: TypeExpr) -> TypeExpr {
        TypeExpr::Exp(m, Box::new(t))
    }
    pub fn arrow(t: TypeExpr, m: Mode, u: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(t), m, Box::new(u))
    }
    pub fn dest(n: Mode, t: TypeExpr) -> TypeExpr {
        TypeExpr::Dest(n, Box::new(t))
    }
    pub fn ampar(s: TypeExpr, t: TypeExpr) -> TypeExpr {
        TypeExpr::Ampar(Box::new(s), Box::new(t))
    }

    pub fn contains_meta(&self) -> bool {
        match self {
            TypeExpr::Meta(_) => true,
            TypeExpr::Unit | TypeExpr::RecVar(_) => false,
            TypeExpr::Sum(a, b) | TypeExpr::Prod(a, b) | TypeExpr::Ampar(a, b) => {
                a.contains_meta() || b.contains_meta()
            }
            TypeExpr::Arrow(a, _, b) => a.contains_meta() || b.contains_meta(),
            TypeExpr::Exp(_, t) | TypeExpr::Dest(_, t) | TypeExpr::Rec(t) => t.contains_meta(),
        }
    }
}

/// Core terms, with binder modes recorded at every binding site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    /// `t' t` — function on the left, argument on the right
    App(Box<Term>, Box<Term>),
    /// `t ; u`
    Seq(Box<Term>, Box<Term>),
    /// `case[m] t of {Inl x1 -> u1 | Inr x2 -> u2}`
    CaseSum(Mode, Box<Term>, String, Box<Term>, String, Box<Term>),
    /// `case[m] t of {(x1, x2) -> u}`
    CaseProd(Mode, Box<Term>, String, String, Box<Term>),
    /// `case[m] t of {Mod{n} x -> u}`
    CaseExp(Mode, Mode, Box<Term>, String, Box<Term>),
    /// `upd t with x -> u`
    UpdAmpar(Box<Term>, String, Box<Term>),
    /// `to t`
    ToAmpar(Box<Term>),
    /// `from t`
    FromAmpar(Box<Term>),
    /// `new : T` (ascription optional in source, filled in by elaboration)
    NewAmpar(Option<Box<TypeExpr>>),
    /// `t <| ()`
    FillUnit(Box<Term>),
    FillInl(Box<Term>),
    FillInr(Box<Term>),
    /// `t <| (,)`
    FillProd(Box<Term>),
    /// `t <| Mod{m}`
    FillExp(Mode, Box<Term>),
    /// `t <| fun x{m} -> u`
    FillFun(Box<Term>, String, Mode, Box<Term>),
    /// `t <o> t'` — graft another ampar's structure into the hole
    FillComp(Box<Term>, Box<Term>),
    /// `t <! t'` — write a full value into the hole
    FillLeaf(Box<Term>, Box<Term>),
    /// Embedded runtime value
    Val(Value),
    /// `fix x{m} -> t` (recursion extension; m is always winf)
    Fix(String, Mode, Box<Term>),
}

/// Runtime values. Holes and destinations are two views of one name; an
/// ampar value `H< v2 /\ v1 >` binds the names in `H`. The optional type
/// on an ampar is the structure side's type, carried over from the `new`
/// that introduced it; reduction never reads it, but re-checking a
/// mid-trace command does, since the ascription it came from is gone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Hole(HoleName),
    DestV(HoleName),
    AmparV(HoleSet, Box<Value>, Box<Value>, Option<Box<TypeExpr>>),
    UnitV,
    Fun(String, Mode, Box<Term>),
    InlV(Box<Value>),
    InrV(Box<Value>),
    ModV(Mode, Box<Value>),
    PairV(Box<Value>, Box<Value>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn seq(t: Term, u: Term) -> Term {
        Term::Seq(Box::new(t), Box::new(u))
    }
    pub fn unit() -> Term {
        Term::Val(Value::UnitV)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Val(_))
    }
}

impl Value {
    pub fn inl(v: Value) -> Value {
        Value::InlV(Box::new(v))
    }
    pub fn inr(v: Value) -> Value {
        Value::InrV(Box::new(v))
    }
    pub fn pair(a: Value, b: Value) -> Value {
        Value::PairV(Box::new(a), Box::new(b))
    }
    pub fn ampar(h: HoleSet, v2: Value, v1: Value) -> Value {
        Value::AmparV(h, Box::new(v2), Box::new(v1), None)
    }

    pub fn ampar_tagged(
        h: HoleSet,
        v2: Value,
        v1: Value,
        left_ty: Option<Box<TypeExpr>>,
    ) -> Value {
        Value::AmparV(h, Box::new(v2), Box::new(v1), left_ty)
    }
}

// ---------------------------------------------------------------------------
// Free hole names

pub trait HasHoleNames {
    fn collect_hnames(&self, acc: &mut HoleSet);

    fn hnames(&self) -> HoleSet {
        let mut acc = HoleSet::new();
        self.collect_hnames(&mut acc);
        acc
    }
}

impl HasHoleNames for Value {
    fn collect_hnames(&self, acc: &mut HoleSet) {
        match self {
            Value::Hole(h) | Value::DestV(h) => {
                acc.insert(*h);
            }
            Value::AmparV(bound, v2, v1, _) => {
                let mut inner = HoleSet::new();
                v2.collect_hnames(&mut inner);
                v1.collect_hnames(&mut inner);
                for h in inner {
                    if !bound.contains(&h) {
                        acc.insert(h);
                    }
                }
            }
            Value::UnitV => {}
            Value::Fun(_, _, body) => body.collect_hnames(acc),
            Value::InlV(v) | Value::InrV(v) | Value::ModV(_, v) => v.collect_hnames(acc),
            Value::PairV(a, b) => {
                a.collect_hnames(acc);
                b.collect_hnames(acc);
            }
        }
    }
}

impl HasHoleNames for Term {
    fn collect_hnames(&self, acc: &mut HoleSet) {
        match self {
            Term::Var(_) | Term::NewAmpar(_) => {}
            Term::App(a, b)
            | Term::Seq(a, b)
            | Term::FillComp(a, b)
            | Term::FillLeaf(a, b) => {
                a.collect_hnames(acc);
                b.collect_hnames(acc);
            }
            Term::CaseSum(_, t, _, u1, _, u2) => {
                t.collect_hnames(acc);
                u1.collect_hnames(acc);
                u2.collect_hnames(acc);
            }
            Term::CaseProd(_, t, _, _, u) => {
                t.collect_hnames(acc);
                u.collect_hnames(acc);
            }
            Term::CaseExp(_, _, t, _, u) => {
                t.collect_hnames(acc);
                u.collect_hnames(acc);
            }
            Term::UpdAmpar(t, _, u) | Term::FillFun(t, _, _, u) => {
                t.collect_hnames(acc);
                u.collect_hnames(acc);
            }
            Term::ToAmpar(t)
            | Term::FromAmpar(t)
            | Term::FillUnit(t)
            | Term::FillInl(t)
            | Term::FillInr(t)
            | Term::FillProd(t)
            | Term::FillExp(_, t)
            | Term::Fix(_, _, t) => t.collect_hnames(acc),
            Term::Val(v) => v.collect_hnames(acc),
        }
    }
}

// ---------------------------------------------------------------------------
// Conditional name shift

/// Shift every free occurrence of a name in `names` up by `amount`.
/// Binder sets on closed ampars capture: the shift does not descend into
/// occurrences an inner binder set shadows, and shifts the set itself only
/// via the shifted-set operation at the reduction sites that dissolve it.
pub trait ShiftNames: Sized {
    fn shift_names(&self, names: &HoleSet, amount: u32) -> Self;
}

pub fn shift_set(set: &HoleSet, names: &HoleSet, amount: u32) -> HoleSet {
    set.iter()
        .map(|h| if names.contains(h) { h + amount } else { *h })
        .collect()
}

/// The shifted set `H += h'` from the freshness arithmetic: every member moves.
pub fn shift_all(set: &HoleSet, amount: u32) -> HoleSet {
    set.iter().map(|h| h + amount).collect()
}

impl ShiftNames for Value {
    fn shift_names(&self, names: &HoleSet, amount: u32) -> Value {
        match self {
            Value::Hole(h) => {
                Value::Hole(if names.contains(h) { h + amount } else { *h })
            }
            Value::DestV(h) => {
                Value::DestV(if names.contains(h) { h + amount } else { *h })
            }
            Value::AmparV(bound, v2, v1, tag) => {
                let visible: HoleSet = names.difference(bound).copied().collect();
                Value::AmparV(
                    bound.clone(),
                    Box::new(v2.shift_names(&visible, amount)),
                    Box::new(v1.shift_names(&visible, amount)),
                    tag.clone(),
                )
            }
            Value::UnitV => Value::UnitV,
            Value::Fun(x, m, body) => {
                Value::Fun(x.clone(), *m, Box::new(body.shift_names(names, amount)))
            }
            Value::InlV(v) => Value::InlV(Box::new(v.shift_names(names, amount))),
            Value::InrV(v) => Value::InrV(Box::new(v.shift_names(names, amount))),
            Value::ModV(m, v) => Value::ModV(*m, Box::new(v.shift_names(names, amount))),
            Value::PairV(a, b) => Value::PairV(
                Box::new(a.shift_names(names, amount)),
                Box::new(b.shift_names(names, amount)),
            ),
        }
    }
}

impl ShiftNames for Term {
    fn shift_names(&self, names: &HoleSet, amount: u32) -> Term {
        let go = |t: &Term| Box::new(t.shift_names(names, amount));
        match self {
            Term::Var(x) => Term::Var(x.clone()),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Seq(a, b) => Term::Seq(go(a), go(b)),
            Term::CaseSum(m, t, x1, u1, x2, u2) => {
                Term::CaseSum(*m, go(t), x1.clone(), go(u1), x2.clone(), go(u2))
            }
            Term::CaseProd(m, t, x1, x2, u) => {
                Term::CaseProd(*m, go(t), x1.clone(), x2.clone(), go(u))
            }
            Term::CaseExp(m, n, t, x, u) => Term::CaseExp(*m, *n, go(t), x.clone(), go(u)),
            Term::UpdAmpar(t, x, u) => Term::UpdAmpar(go(t), x.clone(), go(u)),
            Term::ToAmpar(t) => Term::ToAmpar(go(t)),
            Term::FromAmpar(t) => Term::FromAmpar(go(t)),
            Term::NewAmpar(a) => Term::NewAmpar(a.clone()),
            Term::FillUnit(t) => Term::FillUnit(go(t)),
            Term::FillInl(t) => Term::FillInl(go(t)),
            Term::FillInr(t) => Term::FillInr(go(t)),
            Term::FillProd(t) => Term::FillProd(go(t)),
            Term::FillExp(m, t) => Term::FillExp(*m, go(t)),
            Term::FillFun(t, x, m, u) => Term::FillFun(go(t), x.clone(), *m, go(u)),
            Term::FillComp(a, b) => Term::FillComp(go(a), go(b)),
            Term::FillLeaf(a, b) => Term::FillLeaf(go(a), go(b)),
            Term::Val(v) => Term::Val(v.shift_names(names, amount)),
            Term::Fix(x, m, t) => Term::Fix(x.clone(), *m, go(t)),
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution

/// Substitute `r` for every free occurrence of `x` in `t`. Binders that
/// shadow `x` stop the walk. The replacement is closed in practice (a value,
/// or a closed fixpoint body), so no capture can occur and hole names are
/// left untouched; all hole renaming happens at the reduction sites.
pub fn subst_term(t: &Term, x: &str, r: &Term) -> Term {
    let go = |t: &Term| Box::new(subst_term(t, x, r));
    match t {
        Term::Var(y) => {
            if y == x {
                r.clone()
            } else {
                Term::Var(y.clone())
            }
        }
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Seq(a, b) => Term::Seq(go(a), go(b)),
        Term::CaseSum(m, t0, x1, u1, x2, u2) => {
            let u1 = if x1 == x { u1.clone() } else { go(u1) };
            let u2 = if x2 == x { u2.clone() } else { go(u2) };
            Term::CaseSum(*m, go(t0), x1.clone(), u1, x2.clone(), u2)
        }
        Term::CaseProd(m, t0, x1, x2, u) => {
            let u = if x1 == x || x2 == x { u.clone() } else { go(u) };
            Term::CaseProd(*m, go(t0), x1.clone(), x2.clone(), u)
        }
        Term::CaseExp(m, n, t0, y, u) => {
            let u = if y == x { u.clone() } else { go(u) };
            Term::CaseExp(*m, *n, go(t0), y.clone(), u)
        }
        Term::UpdAmpar(t0, y, u) => {
            let u = if y == x { u.clone() } else { go(u) };
            Term::UpdAmpar(go(t0), y.clone(), u)
        }
        Term::ToAmpar(t0) => Term::ToAmpar(go(t0)),
        Term::FromAmpar(t0) => Term::FromAmpar(go(t0)),
        Term::NewAmpar(a) => Term::NewAmpar(a.clone()),
        Term::FillUnit(t0) => Term::FillUnit(go(t0)),
        Term::FillInl(t0) => Term::FillInl(go(t0)),
        Term::FillInr(t0) => Term::FillInr(go(t0)),
        Term::FillProd(t0) => Term::FillProd(go(t0)),
        Term::FillExp(m, t0) => Term::FillExp(*m, go(t0)),
        Term::FillFun(t0, y, m, u) => {
            let u = if y == x { u.clone() } else { go(u) };
            Term::FillFun(go(t0), y.clone(), *m, u)
        }
        Term::FillComp(a, b) => Term::FillComp(go(a), go(b)),
        Term::FillLeaf(a, b) => Term::FillLeaf(go(a), go(b)),
        Term::Val(v) => Term::Val(subst_in_value(v, x, r)),
        Term::Fix(y, m, t0) => {
            let t0 = if y == x { t0.clone() } else { go(t0) };
            Term::Fix(y.clone(), *m, t0)
        }
    }
}

fn subst_in_value(v: &Value, x: &str, r: &Term) -> Value {
    match v {
        Value::Fun(y, m, body) => {
            let body = if y == x {
                body.clone()
            } else {
                Box::new(subst_term(body, x, r))
            };
            Value::Fun(y.clone(), *m, body)
        }
        Value::AmparV(h, v2, v1, tag) => Value::AmparV(
            h.clone(),
            Box::new(subst_in_value(v2, x, r)),
            Box::new(subst_in_value(v1, x, r)),
            tag.clone(),
        ),
        Value::InlV(v) => Value::InlV(Box::new(subst_in_value(v, x, r))),
        Value::InrV(v) => Value::InrV(Box::new(subst_in_value(v, x, r))),
        Value::ModV(m, v) => Value::ModV(*m, Box::new(subst_in_value(v, x, r))),
        Value::PairV(a, b) => Value::PairV(
            Box::new(subst_in_value(a, x, r)),
            Box::new(subst_in_value(b, x, r)),
        ),
        Value::Hole(_) | Value::DestV(_) | Value::UnitV => v.clone(),
    }
}

/// Substitute a closed value for a variable.
pub fn subst_var(t: &Term, x: &str, v: &Value) -> Term {
    subst_term(t, x, &Term::Val(v.clone()))
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::type_to_string(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::term_to_string(self))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::value_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::LIN_NOW;

    fn set(xs: &[HoleName]) -> HoleSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn hnames_of_pair() {
        let v = Value::pair(Value::Hole(2), Value::DestV(5));
        assert_eq!(v.hnames(), set(&[2, 5]));
    }

    #[test]
    fn hnames_binder_subtraction() {
        // {2,5}< ([]2, []5) /\ (->2, ->5) > is closed.
        let v = Value::ampar(
            set(&[2, 5]),
            Value::pair(Value::Hole(2), Value::Hole(5)),
            Value::pair(Value::DestV(2), Value::DestV(5)),
        );
        assert_eq!(v.hnames(), set(&[]));
        // Manual count oracle: names in subtrees minus the binder set.
        let mut all = HoleSet::new();
        Value::pair(Value::Hole(2), Value::Hole(5)).collect_hnames(&mut all);
        Value::pair(Value::DestV(2), Value::DestV(5)).collect_hnames(&mut all);
        let expect: HoleSet = all.difference(&set(&[2, 5])).copied().collect();
        assert_eq!(v.hnames(), expect);
    }

    #[test]
    fn hnames_unit() {
        assert_eq!(Value::UnitV.hnames(), set(&[]));
    }

    #[test]
    fn shift_set_examples() {
        assert_eq!(shift_all(&set(&[1, 3]), 2), set(&[3, 5]));
        assert_eq!(
            Value::Hole(2).shift_names(&set(&[2]), 3),
            Value::Hole(5)
        );
        assert_eq!(
            Value::DestV(7).shift_names(&set(&[2]), 3),
            Value::DestV(7)
        );
    }

    #[test]
    fn shift_respects_inner_binders() {
        // The inner ampar binds 2; only the free 2 outside it moves.
        let inner = Value::ampar(set(&[2]), Value::Hole(2), Value::DestV(2));
        let v = Value::pair(inner.clone(), Value::Hole(2));
        let shifted = v.shift_names(&set(&[2]), 10);
        assert_eq!(shifted, Value::pair(inner, Value::Hole(12)));
    }

    #[test]
    fn shift_disjoint_is_identity() {
        let v = Value::pair(Value::Hole(1), Value::DestV(4));
        assert_eq!(v.shift_names(&set(&[7, 9]), 3), v);
    }

    #[test]
    fn shift_composition() {
        let v = Value::pair(
            Value::Hole(1),
            Value::pair(Value::DestV(3), Value::Hole(6)),
        );
        let h = set(&[1, 3]);
        let once = v.shift_names(&h, 2);
        let twice = once.shift_names(&shift_all(&h, 2), 5);
        assert_eq!(twice, v.shift_names(&h, 7));
    }

    #[test]
    fn subst_shadowing() {
        // (fun x{1v} -> x)[x := v] leaves the body alone.
        let lam = Term::Val(Value::Fun(
            "x".into(),
            LIN_NOW,
            Box::new(Term::var("x")),
        ));
        assert_eq!(subst_var(&lam, "x", &Value::UnitV), lam);

        let t = Term::seq(Term::var("x"), Term::unit());
        assert_eq!(
            subst_var(&t, "x", &Value::UnitV),
            Term::seq(Term::unit(), Term::unit())
        );
    }

    #[test]
    fn subst_structural_matches_naive_walk() {
        // case[1v] y of (a, b) -> a <! x, substituting ->3 for x.
        let t = Term::CaseProd(
            LIN_NOW,
            Box::new(Term::var("y")),
            "a".into(),
            "b".into(),
            Box::new(Term::FillLeaf(
                Box::new(Term::var("a")),
                Box::new(Term::var("x")),
            )),
        );
        let got = subst_var(&t, "x", &Value::DestV(3));
        let want = Term::CaseProd(
            LIN_NOW,
            Box::new(Term::var("y")),
            "a".into(),
            "b".into(),
            Box::new(Term::FillLeaf(
                Box::new(Term::var("a")),
                Box::new(Term::Val(Value::DestV(3))),
            )),
        );
        assert_eq!(got, want);
    }
}
