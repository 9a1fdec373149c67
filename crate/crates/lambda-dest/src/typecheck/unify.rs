//! Type equality and unification.
//!
//! Ground equality is structural, except that `rec` types compare
//! equirecursively: a bisimulation that unfolds on demand with a visited
//! pair set. Unification adds metavariables on top; checking runs in
//! check-mode with a possibly-underdetermined expected type, and resolves
//! metas as the surrounding structure pins them down.

use std::collections::{HashMap, HashSet};

use crate::syntax::TypeExpr;

/// Unfold `rec. body` one step: substitute the whole rec type for the
/// bound variable. Resolved types are closed, so no shifting is needed.
pub fn unfold_rec(body: &TypeExpr) -> TypeExpr {
    let whole = TypeExpr::Rec(Box::new(body.clone()));
    subst_recvar(body, 0, &whole)
}

fn subst_recvar(t: &TypeExpr, depth: u32, replacement: &TypeExpr) -> TypeExpr {
    match t {
        TypeExpr::RecVar(i) if *i == depth => replacement.clone(),
        TypeExpr::RecVar(i) => TypeExpr::RecVar(*i),
        TypeExpr::Unit => TypeExpr::Unit,
        TypeExpr::Meta(n) => TypeExpr::Meta(*n),
        TypeExpr::Sum(a, b) => TypeExpr::sum(
            subst_recvar(a, depth, replacement),
            subst_recvar(b, depth, replacement),
        ),
        TypeExpr::Prod(a, b) => TypeExpr::prod(
            subst_recvar(a, depth, replacement),
            subst_recvar(b, depth, replacement),
        ),
        TypeExpr::Exp(m, a) => TypeExpr::exp(*m, subst_recvar(a, depth, replacement)),
        TypeExpr::Arrow(a, m, b) => TypeExpr::arrow(
            subst_recvar(a, depth, replacement),
            *m,
            subst_recvar(b, depth, replacement),
        ),
        TypeExpr::Dest(n, a) => TypeExpr::dest(*n, subst_recvar(a, depth, replacement)),
        TypeExpr::Ampar(a, b) => TypeExpr::ampar(
            subst_recvar(a, depth, replacement),
            subst_recvar(b, depth, replacement),
        ),
        TypeExpr::Rec(a) => TypeExpr::Rec(Box::new(subst_recvar(a, depth + 1, replacement))),
    }
}

/// Equirecursive equality on ground types (metas compare by identity).
pub fn types_equal(a: &TypeExpr, b: &TypeExpr) -> bool {
    let mut seen = HashSet::new();
    eq(a, b, &mut seen)
}

fn eq(a: &TypeExpr, b: &TypeExpr, seen: &mut HashSet<(TypeExpr, TypeExpr)>) -> bool {
    if a == b {
        return true;
    }
    if matches!(a, TypeExpr::Rec(_)) || matches!(b, TypeExpr::Rec(_)) {
        let key = (a.clone(), b.clone());
        if !seen.insert(key) {
            return true;
        }
        let a2 = match a {
            TypeExpr::Rec(body) => unfold_rec(body),
            _ => a.clone(),
        };
        let b2 = match b {
            TypeExpr::Rec(body) => unfold_rec(body),
            _ => b.clone(),
        };
        return eq(&a2, &b2, seen);
    }
    match (a, b) {
        (TypeExpr::Sum(a1, a2), TypeExpr::Sum(b1, b2))
        | (TypeExpr::Prod(a1, a2), TypeExpr::Prod(b1, b2))
        | (TypeExpr::Ampar(a1, a2), TypeExpr::Ampar(b1, b2)) => {
            eq(a1, b1, seen) && eq(a2, b2, seen)
        }
        (TypeExpr::Exp(m, a1), TypeExpr::Exp(n, b1)) => m == n && eq(a1, b1, seen),
        (TypeExpr::Dest(m, a1), TypeExpr::Dest(n, b1)) => m == n && eq(a1, b1, seen),
        (TypeExpr::Arrow(a1, m, a2), TypeExpr::Arrow(b1, n, b2)) => {
            m == n && eq(a1, b1, seen) && eq(a2, b2, seen)
        }
        _ => false,
    }
}

/// Metavariable store. Bindings are write-once; `resolve` follows chains.
#[derive(Default, Debug)]
pub struct InferCtx {
    next_meta: u32,
    bindings: HashMap<u32, TypeExpr>,
}

impl InferCtx {
    pub fn new() -> InferCtx {
        InferCtx::default()
    }

    pub fn fresh(&mut self) -> TypeExpr {
        let n = self.next_meta;
        self.next_meta += 1;
        TypeExpr::Meta(n)
    }

    /// Follow meta bindings at the root only.
    pub fn shallow(&self, t: &TypeExpr) -> TypeExpr {
        let mut cur = t.clone();
        while let TypeExpr::Meta(n) = cur {
            match self.bindings.get(&n) {
                Some(next) => cur = next.clone(),
                None => return TypeExpr::Meta(n),
            }
        }
        cur
    }

    /// Substitute all resolved metas recursively.
    pub fn deep(&self, t: &TypeExpr) -> TypeExpr {
        let root = self.shallow(t);
        match root {
            TypeExpr::Unit | TypeExpr::RecVar(_) | TypeExpr::Meta(_) => root,
            TypeExpr::Sum(a, b) => TypeExpr::sum(self.deep(&a), self.deep(&b)),
            TypeExpr::Prod(a, b) => TypeExpr::prod(self.deep(&a), self.deep(&b)),
            TypeExpr::Exp(m, a) => TypeExpr::exp(m, self.deep(&a)),
            TypeExpr::Arrow(a, m, b) => TypeExpr::arrow(self.deep(&a), m, self.deep(&b)),
            TypeExpr::Dest(n, a) => TypeExpr::dest(n, self.deep(&a)),
            TypeExpr::Ampar(a, b) => TypeExpr::ampar(self.deep(&a), self.deep(&b)),
            TypeExpr::Rec(a) => TypeExpr::Rec(Box::new(self.deep(&a))),
        }
    }

    fn occurs(&self, meta: u32, t: &TypeExpr) -> bool {
        match self.shallow(t) {
            TypeExpr::Meta(n) => n == meta,
            TypeExpr::Unit | TypeExpr::RecVar(_) => false,
            TypeExpr::Sum(a, b) | TypeExpr::Prod(a, b) | TypeExpr::Ampar(a, b) => {
                self.occurs(meta, &a) || self.occurs(meta, &b)
            }
            TypeExpr::Arrow(a, _, b) => self.occurs(meta, &a) || self.occurs(meta, &b),
            TypeExpr::Exp(_, a) | TypeExpr::Dest(_, a) | TypeExpr::Rec(a) => self.occurs(meta, &a),
        }
    }

    pub fn unify(&mut self, a: &TypeExpr, b: &TypeExpr) -> Result<(), (TypeExpr, TypeExpr)> {
        let mut seen = HashSet::new();
        self.unify_inner(a, b, &mut seen)
    }

    fn unify_inner(
        &mut self,
        a: &TypeExpr,
        b: &TypeExpr,
        seen: &mut HashSet<(TypeExpr, TypeExpr)>,
    ) -> Result<(), (TypeExpr, TypeExpr)> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        if a == b {
            return Ok(());
        }
        match (&a, &b) {
            (TypeExpr::Meta(n), t) | (t, TypeExpr::Meta(n)) => {
                if self.occurs(*n, t) {
                    return Err((a.clone(), b.clone()));
                }
                self.bindings.insert(*n, t.clone());
                Ok(())
            }
            (TypeExpr::Rec(_), _) | (_, TypeExpr::Rec(_)) => {
                let key = (a.clone(), b.clone());
                if !seen.insert(key) {
                    return Ok(());
                }
                let a2 = match &a {
                    TypeExpr::Rec(body) => unfold_rec(body),
                    _ => a.clone(),
                };
                let b2 = match &b {
                    TypeExpr::Rec(body) => unfold_rec(body),
                    _ => b.clone(),
                };
                self.unify_inner(&a2, &b2, seen)
            }
            (TypeExpr::Sum(a1, a2), TypeExpr::Sum(b1, b2))
            | (TypeExpr::Prod(a1, a2), TypeExpr::Prod(b1, b2))
            | (TypeExpr::Ampar(a1, a2), TypeExpr::Ampar(b1, b2)) => {
                self.unify_inner(a1, b1, seen)?;
                self.unify_inner(a2, b2, seen)
            }
            (TypeExpr::Exp(m, a1), TypeExpr::Exp(n, b1))
            | (TypeExpr::Dest(m, a1), TypeExpr::Dest(n, b1)) => {
                if m != n {
                    return Err((a.clone(), b.clone()));
                }
                self.unify_inner(a1, b1, seen)
            }
            (TypeExpr::Arrow(a1, m, a2), TypeExpr::Arrow(b1, n, b2)) => {
                if m != n {
                    return Err((a.clone(), b.clone()));
                }
                self.unify_inner(a1, b1, seen)?;
                self.unify_inner(a2, b2, seen)
            }
            _ => Err((a.clone(), b.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::LIN_NOW;

    fn list_unit() -> TypeExpr {
        // rec l. 1 (+) (1 (*) l)
        TypeExpr::Rec(Box::new(TypeExpr::sum(
            TypeExpr::Unit,
            TypeExpr::prod(TypeExpr::Unit, TypeExpr::RecVar(0)),
        )))
    }

    #[test]
    fn equirec_unfolding_equality() {
        let l = list_unit();
        let unfolded = unfold_rec(&TypeExpr::sum(
            TypeExpr::Unit,
            TypeExpr::prod(TypeExpr::Unit, TypeExpr::RecVar(0)),
        ));
        assert!(types_equal(&l, &unfolded));
        assert!(types_equal(&unfolded, &l));
        assert!(!types_equal(&l, &TypeExpr::Unit));
    }

    #[test]
    fn unify_resolves_meta_through_structure() {
        let mut icx = InferCtx::new();
        let m = icx.fresh();
        let expect = TypeExpr::dest(LIN_NOW, TypeExpr::Unit);
        icx.unify(&m, &expect).unwrap();
        assert_eq!(icx.deep(&m), expect);
    }

    #[test]
    fn unify_rec_against_unfolding() {
        let mut icx = InferCtx::new();
        let l = list_unit();
        let m = icx.fresh();
        let partial = TypeExpr::sum(TypeExpr::Unit, TypeExpr::prod(TypeExpr::Unit, m.clone()));
        icx.unify(&l, &partial).unwrap();
        assert!(types_equal(&icx.deep(&m), &l));
    }

    #[test]
    fn unify_mode_mismatch_fails() {
        let mut icx = InferCtx::new();
        let a = TypeExpr::dest(LIN_NOW, TypeExpr::Unit);
        let b = TypeExpr::dest(crate::mode::UNR_INF, TypeExpr::Unit);
        assert!(icx.unify(&a, &b).is_err());
    }
}
