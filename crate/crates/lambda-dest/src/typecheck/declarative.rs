//! A declarative proof-search oracle for the term judgment, used to
//! cross-validate the algorithmic checker on small terms.
//!
//! The search enumerates context splits (with mode decompositions drawn
//! from a bounded universe), scaling factors, intermediate types, and leaf
//! coercions, so it is sound and complete relative to those bounds. Budget
//! exhaustion is reported separately from rejection.

use std::collections::{BTreeMap, HashMap};

use crate::context::{BindingKey, Ctx};
use crate::mode::{Mode, Mult, LIN_NOW, LIN_UP};
use crate::syntax::{Term, TypeExpr, Value};

use super::unify::types_equal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclarativeOutcome {
    Accept,
    Reject,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct DeclarativeParams {
    pub modes: Vec<Mode>,
    pub types: Vec<TypeExpr>,
    pub budget: u64,
}

impl Default for DeclarativeParams {
    fn default() -> DeclarativeParams {
        DeclarativeParams {
            modes: vec![
                LIN_NOW,
                crate::mode::UNR_NOW,
                LIN_UP,
                crate::mode::LIN_INF,
                crate::mode::UNR_INF,
            ],
            types: vec![
                TypeExpr::Unit,
                TypeExpr::sum(TypeExpr::Unit, TypeExpr::Unit),
                TypeExpr::prod(TypeExpr::Unit, TypeExpr::Unit),
                TypeExpr::dest(LIN_NOW, TypeExpr::Unit),
                TypeExpr::ampar(TypeExpr::Unit, TypeExpr::dest(LIN_NOW, TypeExpr::Unit)),
            ],
            budget: 4_000_000,
        }
    }
}

type SCtx = BTreeMap<String, (Mode, TypeExpr)>;

struct Search<'a> {
    params: &'a DeclarativeParams,
    budget: u64,
    memo: HashMap<(usize, String, String), bool>,
}

struct Exhausted;

fn render_ctx(ctx: &SCtx) -> String {
    let mut s = String::new();
    for (x, (m, t)) in ctx {
        s.push_str(x);
        s.push(':');
        s.push_str(&m.to_string());
        s.push(' ');
        s.push_str(&t.to_string());
        s.push(',');
    }
    s
}

fn disposable(ctx: &SCtx) -> bool {
    ctx.values().all(|(m, _)| m.mult == Mult::Many)
}

impl<'a> Search<'a> {
    /// All ways to write `ctx = s1*ctx1 + s2*ctx2` pointwise, with
    /// component modes from the universe. `None` on a side means the
    /// binding is absent there.
    fn splits(&self, ctx: &SCtx, s1: Mode, s2: Mode) -> Vec<(SCtx, SCtx)> {
        let mut acc: Vec<(SCtx, SCtx)> = vec![(SCtx::new(), SCtx::new())];
        for (x, (m, t)) in ctx {
            let mut options: Vec<(Option<Mode>, Option<Mode>)> = Vec::new();
            for &m1 in &self.params.modes {
                if s1.mul(m1) == *m {
                    options.push((Some(m1), None));
                }
                for &m2 in &self.params.modes {
                    if s1.mul(m1).add(s2.mul(m2)) == *m {
                        options.push((Some(m1), Some(m2)));
                    }
                }
            }
            for &m2 in &self.params.modes {
                if s2.mul(m2) == *m {
                    options.push((None, Some(m2)));
                }
            }
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (left, right) in &acc {
                for (o1, o2) in &options {
                    let mut l = left.clone();
                    let mut r = right.clone();
                    if let Some(m1) = o1 {
                        l.insert(x.clone(), (*m1, t.clone()));
                    }
                    if let Some(m2) = o2 {
                        r.insert(x.clone(), (*m2, t.clone()));
                    }
                    next.push((l, r));
                }
            }
            acc = next;
            if acc.is_empty() {
                return acc;
            }
        }
        acc
    }

    fn derive(&mut self, ctx: &SCtx, t: &Term, ty: &TypeExpr) -> Result<bool, Exhausted> {
        if self.budget == 0 {
            return Err(Exhausted);
        }
        self.budget -= 1;
        let key = (t as *const Term as usize, render_ctx(ctx), ty.to_string());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(*hit);
        }
        let out = self.derive_uncached(ctx, t, ty)?;
        self.memo.insert(key, out);
        Ok(out)
    }

    fn derive_uncached(&mut self, ctx: &SCtx, t: &Term, ty: &TypeExpr) -> Result<bool, Exhausted> {
        match t {
            Term::Var(x) => {
                let Some((m, xt)) = ctx.get(x) else { return Ok(false) };
                if !types_equal(xt, ty) || !LIN_NOW.le(*m) {
                    return Ok(false);
                }
                let rest_ok = ctx
                    .iter()
                    .filter(|(y, _)| *y != x)
                    .all(|(_, (m, _))| m.mult == Mult::Many);
                Ok(rest_ok)
            }
            Term::Val(Value::UnitV) => {
                Ok(types_equal(ty, &TypeExpr::Unit) && disposable(ctx))
            }
            Term::Val(_) => Ok(false),
            Term::Seq(a, b) => {
                for (g1, g2) in self.splits(ctx, LIN_NOW, LIN_NOW) {
                    if self.derive(&g1, a, &TypeExpr::Unit)? && self.derive(&g2, b, ty)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::App(f, a) => {
                let arg_types = self.params.types.clone();
                let modes = self.params.modes.clone();
                for m in &modes {
                    for s in &arg_types {
                        let fun_ty = TypeExpr::arrow(s.clone(), *m, ty.clone());
                        for (g1, g2) in self.splits(ctx, *m, LIN_NOW) {
                            if self.derive(&g1, a, s)? && self.derive(&g2, f, &fun_ty)? {
                                return Ok(true);
                            }
                        }
                    }
                }
                Ok(false)
            }
            Term::CaseSum(m, scrut, x1, u1, x2, u2) => {
                let tys = self.params.types.clone();
                for t1 in &tys {
                    for t2 in &tys {
                        let sum = TypeExpr::sum(t1.clone(), t2.clone());
                        for (g1, g2) in self.splits(ctx, *m, LIN_NOW) {
                            if !self.derive(&g1, scrut, &sum)? {
                                continue;
                            }
                            let mut b1 = g2.clone();
                            b1.insert(x1.clone(), (*m, t1.clone()));
                            let mut b2 = g2.clone();
                            b2.insert(x2.clone(), (*m, t2.clone()));
                            if self.derive(&b1, u1, ty)? && self.derive(&b2, u2, ty)? {
                                return Ok(true);
                            }
                        }
                    }
                }
                Ok(false)
            }
            Term::CaseProd(m, scrut, x1, x2, u) => {
                let tys = self.params.types.clone();
                for t1 in &tys {
                    for t2 in &tys {
                        let prod = TypeExpr::prod(t1.clone(), t2.clone());
                        for (g1, g2) in self.splits(ctx, *m, LIN_NOW) {
                            if !self.derive(&g1, scrut, &prod)? {
                                continue;
                            }
                            let mut body = g2.clone();
                            body.insert(x1.clone(), (*m, t1.clone()));
                            body.insert(x2.clone(), (*m, t2.clone()));
                            if self.derive(&body, u, ty)? {
                                return Ok(true);
                            }
                        }
                    }
                }
                Ok(false)
            }
            Term::CaseExp(m, n, scrut, x, u) => {
                let tys = self.params.types.clone();
                for t0 in &tys {
                    let exp = TypeExpr::exp(*n, t0.clone());
                    for (g1, g2) in self.splits(ctx, *m, LIN_NOW) {
                        if !self.derive(&g1, scrut, &exp)? {
                            continue;
                        }
                        let mut body = g2.clone();
                        body.insert(x.clone(), (m.mul(*n), t0.clone()));
                        if self.derive(&body, u, ty)? {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            Term::UpdAmpar(scrut, x, body) => {
                let TypeExpr::Ampar(u_ty, t_out) = ty else { return Ok(false) };
                let tys = self.params.types.clone();
                for t0 in &tys {
                    let scrut_ty = TypeExpr::ampar((**u_ty).clone(), t0.clone());
                    for (g1, g2) in self.splits(ctx, LIN_NOW, LIN_NOW) {
                        if !self.derive(&g1, scrut, &scrut_ty)? {
                            continue;
                        }
                        let mut b: SCtx = g2
                            .iter()
                            .map(|(y, (m, t))| (y.clone(), (LIN_UP.mul(*m), t.clone())))
                            .collect();
                        b.insert(x.clone(), (LIN_NOW, t0.clone()));
                        if self.derive(&b, body, t_out)? {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            Term::ToAmpar(inner) => match ty {
                TypeExpr::Ampar(u_ty, unit) if types_equal(unit, &TypeExpr::Unit) => {
                    self.derive(ctx, inner, u_ty)
                }
                _ => Ok(false),
            },
            Term::FromAmpar(inner) => match ty {
                TypeExpr::Prod(u_ty, exp) => match &**exp {
                    TypeExpr::Exp(m, _) if *m == crate::mode::LIN_INF => {
                        let scrut = TypeExpr::ampar((**u_ty).clone(), (**exp).clone());
                        self.derive(ctx, inner, &scrut)
                    }
                    _ => Ok(false),
                },
                _ => Ok(false),
            },
            Term::NewAmpar(asc) => {
                let shape_ok = match ty {
                    TypeExpr::Ampar(s, v) => match &**v {
                        TypeExpr::Dest(n, inner) => *n == LIN_NOW && types_equal(s, inner),
                        _ => false,
                    },
                    _ => false,
                };
                let asc_ok = match asc {
                    None => true,
                    Some(a) => types_equal(a, ty),
                };
                Ok(shape_ok && asc_ok && disposable(ctx))
            }
            Term::FillUnit(inner) => {
                if !types_equal(ty, &TypeExpr::Unit) {
                    return Ok(false);
                }
                for n in self.params.modes.clone() {
                    let d = TypeExpr::dest(n, TypeExpr::Unit);
                    if self.derive(ctx, inner, &d)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::FillInl(inner) => {
                let TypeExpr::Dest(n, t1) = ty else { return Ok(false) };
                for t2 in self.params.types.clone() {
                    let d = TypeExpr::dest(*n, TypeExpr::sum((**t1).clone(), t2));
                    if self.derive(ctx, inner, &d)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::FillInr(inner) => {
                let TypeExpr::Dest(n, t2) = ty else { return Ok(false) };
                for t1 in self.params.types.clone() {
                    let d = TypeExpr::dest(*n, TypeExpr::sum(t1, (**t2).clone()));
                    if self.derive(ctx, inner, &d)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::FillProd(inner) => {
                let TypeExpr::Prod(d1, d2) = ty else { return Ok(false) };
                let (TypeExpr::Dest(n1, t1), TypeExpr::Dest(n2, t2)) = (&**d1, &**d2) else {
                    return Ok(false);
                };
                if n1 != n2 {
                    return Ok(false);
                }
                let d = TypeExpr::dest(*n1, TypeExpr::prod((**t1).clone(), (**t2).clone()));
                self.derive(ctx, inner, &d)
            }
            Term::FillExp(m, inner) => {
                let TypeExpr::Dest(q, t0) = ty else { return Ok(false) };
                for n in self.params.modes.clone() {
                    if m.mul(n) != *q {
                        continue;
                    }
                    let d = TypeExpr::dest(n, TypeExpr::exp(*m, (**t0).clone()));
                    if self.derive(ctx, inner, &d)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::FillFun(inner, x, m, body) => {
                if !types_equal(ty, &TypeExpr::Unit) {
                    return Ok(false);
                }
                let tys = self.params.types.clone();
                let modes = self.params.modes.clone();
                for n in &modes {
                    for a in &tys {
                        for b in &tys {
                            let d = TypeExpr::dest(
                                *n,
                                TypeExpr::arrow(a.clone(), *m, b.clone()),
                            );
                            for (g1, g2) in self.splits(ctx, LIN_NOW, LIN_UP.mul(*n)) {
                                if !self.derive(&g1, inner, &d)? {
                                    continue;
                                }
                                let mut bc = g2.clone();
                                bc.insert(x.clone(), (*m, a.clone()));
                                if self.derive(&bc, body, b)? {
                                    return Ok(true);
                                }
                            }
                        }
                    }
                }
                Ok(false)
            }
            Term::FillComp(inner, rhs) => {
                let tys = self.params.types.clone();
                for u in &tys {
                    let d = TypeExpr::dest(LIN_NOW, u.clone());
                    let amp = TypeExpr::ampar(u.clone(), ty.clone());
                    for (g1, g2) in self.splits(ctx, LIN_NOW, LIN_UP) {
                        if self.derive(&g1, inner, &d)? && self.derive(&g2, rhs, &amp)? {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            Term::FillLeaf(inner, rhs) => {
                if !types_equal(ty, &TypeExpr::Unit) {
                    return Ok(false);
                }
                let tys = self.params.types.clone();
                let modes = self.params.modes.clone();
                for n in &modes {
                    for a in &tys {
                        let d = TypeExpr::dest(*n, a.clone());
                        for (g1, g2) in self.splits(ctx, LIN_NOW, LIN_UP.mul(*n)) {
                            if self.derive(&g1, inner, &d)? && self.derive(&g2, rhs, a)? {
                                return Ok(true);
                            }
                        }
                    }
                }
                Ok(false)
            }
            // Outside the enumerated fragment.
            Term::Fix(..) => Ok(false),
        }
    }
}

/// Complete proof search over the declarative rules, bounded by the mode
/// and type universes in `params`.
pub fn check_term_declarative(
    g: &Ctx,
    t: &Term,
    expected: &TypeExpr,
    params: &DeclarativeParams,
) -> DeclarativeOutcome {
    let mut ctx = SCtx::new();
    for (k, b) in g.iter() {
        match k {
            BindingKey::VarKey(x) => {
                ctx.insert(x.clone(), (b.mode, b.ty.clone()));
            }
            // The enumeration universe uses variable contexts only.
            _ => return DeclarativeOutcome::Reject,
        }
    }
    let mut search = Search { params, budget: params.budget, memo: HashMap::new() };
    match search.derive(&ctx, t, expected) {
        Ok(true) => DeclarativeOutcome::Accept,
        Ok(false) => DeclarativeOutcome::Reject,
        Err(Exhausted) => DeclarativeOutcome::BudgetExhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{BindingKey, Ctx};
    use crate::mode::{LIN_NOW, LIN_UP};

    fn unit_var_ctx(m: Mode) -> Ctx {
        Ctx::empty_gamma()
            .bind(BindingKey::VarKey("x".into()), m, TypeExpr::Unit)
            .unwrap()
    }

    #[test]
    fn accepts_plain_var() {
        let g = unit_var_ctx(LIN_NOW);
        let out = check_term_declarative(
            &g,
            &Term::var("x"),
            &TypeExpr::Unit,
            &DeclarativeParams::default(),
        );
        assert_eq!(out, DeclarativeOutcome::Accept);
    }

    #[test]
    fn rejects_double_use_of_linear() {
        let g = unit_var_ctx(LIN_NOW);
        let t = Term::seq(Term::var("x"), Term::var("x"));
        let out =
            check_term_declarative(&g, &t, &TypeExpr::Unit, &DeclarativeParams::default());
        assert_eq!(out, DeclarativeOutcome::Reject);
    }

    #[test]
    fn rejects_aged_var_use() {
        let g = unit_var_ctx(LIN_UP);
        let out = check_term_declarative(
            &g,
            &Term::var("x"),
            &TypeExpr::Unit,
            &DeclarativeParams::default(),
        );
        assert_eq!(out, DeclarativeOutcome::Reject);
    }

    #[test]
    fn accepts_unit_in_empty_ctx() {
        let out = check_term_declarative(
            &Ctx::empty_gamma(),
            &Term::unit(),
            &TypeExpr::Unit,
            &DeclarativeParams::default(),
        );
        assert_eq!(out, DeclarativeOutcome::Accept);
    }
}
