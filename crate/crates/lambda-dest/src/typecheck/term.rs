//! The term judgment, checked bidirectionally against a possibly
//! underdetermined expected type, synthesizing usage demands bottom-up.

use std::collections::BTreeMap;

use crate::context::{BindingKey, Ctx, CtxClass};
use crate::mode::{Mode, LIN_INF, LIN_NOW, LIN_UP, UNR_INF};
use crate::syntax::{HoleName, Term, TypeExpr};

use super::demand::{solve_binder, Demand, DemandTree};
use super::unify::InferCtx;
use super::TypeError;
use super::{
    R_CANNOT_SYNTH, R_HOLE_IN_TERM, R_NEW_UNDETERMINED, R_TYPE_MISMATCH, R_UNKNOWN_VAR,
};

pub struct Checker {
    pub icx: InferCtx,
    env: Vec<(String, Mode, TypeExpr)>,
    /// Known destination types, `h -> [n T]`. Seeded from the supplied
    /// context, and by the command walk from open-ampar components.
    pub dest_types: BTreeMap<HoleName, TypeExpr>,
    /// Elaboration output: paths of `new` nodes whose ascriptions were
    /// inferred, with the (meta-containing) ampar type to write back.
    pub new_ascriptions: Vec<(Vec<u32>, TypeExpr)>,
    pub path: Vec<u32>,
    pub recursion_enabled: bool,
    /// Function-value bodies whose argument type was still a metavariable
    /// when the value was reached. A mid-trace command can mention a
    /// function before the component that pins its type, so these re-run
    /// after the walk has finished unifying. Deferred bodies must be
    /// closed (no free destinations); anything else keeps its immediate
    /// error.
    pub deferred: Vec<DeferredBody>,
}

pub struct DeferredBody {
    pub param: String,
    pub mode: Mode,
    pub arg_ty: TypeExpr,
    pub res_ty: TypeExpr,
    pub body: Term,
    pub path: Vec<u32>,
}

impl Checker {
    pub fn new(recursion_enabled: bool) -> Checker {
        Checker {
            icx: InferCtx::new(),
            env: Vec::new(),
            dest_types: BTreeMap::new(),
            new_ascriptions: Vec::new(),
            path: Vec::new(),
            recursion_enabled,
            deferred: Vec::new(),
        }
    }

    /// Re-run deferred function bodies until they all check or a full
    /// round makes no progress. Deferred bodies may queue further
    /// deferrals as their types resolve.
    pub fn flush_deferred(&mut self) -> Result<(), TypeError> {
        loop {
            let pending = std::mem::take(&mut self.deferred);
            if pending.is_empty() {
                return Ok(());
            }
            let count = pending.len();
            let mut stuck: Vec<(DeferredBody, TypeError)> = Vec::new();
            for d in pending {
                match self.run_deferred(&d) {
                    Ok(()) => {}
                    Err(e) if e.rule == R_CANNOT_SYNTH => stuck.push((d, e)),
                    Err(e) => return Err(e),
                }
            }
            // run_deferred may have queued new deferrals.
            if stuck.len() == count && self.deferred.is_empty() {
                return Err(stuck.into_iter().next().expect("nonempty").1);
            }
            for (d, _) in stuck {
                self.deferred.push(d);
            }
        }
    }

    fn run_deferred(&mut self, d: &DeferredBody) -> Result<(), TypeError> {
        self.push_binder(&d.param, d.mode, d.arg_ty.clone());
        let checked = self.check(&d.body, &d.res_ty);
        self.pop_binder();
        let mut demand = checked?;
        let kd = demand.remove(&BindingKey::VarKey(d.param.clone()));
        solve_binder(
            kd,
            &BindingKey::VarKey(d.param.clone()),
            d.mode,
            &d.arg_ty,
            true,
            &mut self.icx,
            &d.path,
        )?;
        if let Some((k, _)) = demand.map.iter().next() {
            return Err(TypeError::new(
                super::R_FREE_VAR_IN_VALUE,
                &d.path,
                format!(
                    "deferred function body is not closed: it still needs {}",
                    k
                ),
            ));
        }
        Ok(())
    }

    pub fn push_binder(&mut self, x: &str, m: Mode, ty: TypeExpr) {
        self.env.push((x.to_string(), m, ty));
    }

    pub fn pop_binder(&mut self) {
        self.env.pop();
    }

    fn lookup(&self, x: &str) -> Option<(Mode, TypeExpr)> {
        self.env
            .iter()
            .rev()
            .find(|(n, _, _)| n == x)
            .map(|(_, m, t)| (*m, t.clone()))
    }

    pub fn err(&self, rule: &'static str, msg: impl Into<String>) -> TypeError {
        TypeError::new(rule, &self.path, msg)
    }

    pub fn unify(&mut self, a: &TypeExpr, b: &TypeExpr) -> Result<(), TypeError> {
        let path = self.path.clone();
        self.icx.unify(a, b).map_err(|(x, y)| {
            TypeError::new(
                R_TYPE_MISMATCH,
                &path,
                format!("expected {}, found {}", self.icx.deep(&y), self.icx.deep(&x)),
            )
        })
    }

    /// Shallow-resolve and unfold `rec` heads until a constructor or meta
    /// surfaces.
    pub fn shape(&self, t: &TypeExpr) -> TypeExpr {
        let mut cur = self.icx.shallow(t);
        let mut fuel = 64;
        while let TypeExpr::Rec(body) = &cur {
            cur = self.icx.shallow(&super::unify::unfold_rec(body));
            fuel -= 1;
            if fuel == 0 {
                break;
            }
        }
        cur
    }

    fn child<R>(
        &mut self,
        idx: u32,
        f: impl FnOnce(&mut Self) -> Result<R, TypeError>,
    ) -> Result<R, TypeError> {
        self.path.push(idx);
        let r = f(self);
        self.path.pop();
        r
    }

    /// Resolve a fill operand down to its destination type `[n T]`.
    /// The pointee `T` may still be a metavariable; the mode may not.
    fn dest_operand(&mut self, t: &Term, idx: u32) -> Result<(Demand, Mode, TypeExpr), TypeError> {
        let fresh = self.icx.fresh();
        let d = self.child(idx, |me| me.check(t, &fresh))?;
        match self.shape(&fresh) {
            TypeExpr::Dest(n, inner) => Ok((d, n, *inner)),
            TypeExpr::Meta(_) => Err(self.err(
                R_CANNOT_SYNTH,
                "cannot determine the destination type of the fill operand",
            )),
            other => Err(self.err(
                R_TYPE_MISMATCH,
                format!("fill operand must be a destination, found {}", self.icx.deep(&other)),
            )),
        }
    }

    fn solve_var_binder(
        &mut self,
        demand: &mut Demand,
        x: &str,
        m: Mode,
        ty: &TypeExpr,
    ) -> Result<(), TypeError> {
        let kd = demand.remove(&BindingKey::VarKey(x.to_string()));
        let path = self.path.clone();
        solve_binder(kd, &BindingKey::VarKey(x.to_string()), m, ty, true, &mut self.icx, &path)
    }

    /// Check `t` against `expected`, returning the demands of its free
    /// bindings. `expected` may contain metas; synthesis is checking
    /// against a fresh one.
    pub fn check(&mut self, t: &Term, expected: &TypeExpr) -> Result<Demand, TypeError> {
        match t {
            Term::Var(x) => {
                let (_, ty) = self
                    .lookup(x)
                    .ok_or_else(|| self.err(R_UNKNOWN_VAR, format!("unknown variable `{}`", x)))?;
                self.unify(expected, &ty)?;
                Ok(Demand::single(
                    BindingKey::VarKey(x.clone()),
                    ty,
                    DemandTree::coercible(),
                ))
            }
            Term::App(f, a) => {
                let fty = self.icx.fresh();
                let d_f = self.child(0, |me| me.check(f, &fty))?;
                let (arg_ty, m, res_ty) = match self.shape(&fty) {
                    TypeExpr::Arrow(arg, m, res) => (*arg, m, *res),
                    TypeExpr::Meta(_) => {
                        return Err(self.err(
                            R_CANNOT_SYNTH,
                            "cannot determine the type of the applied function",
                        ))
                    }
                    other => {
                        return Err(self.err(
                            R_TYPE_MISMATCH,
                            format!("applied a non-function of type {}", self.icx.deep(&other)),
                        ))
                    }
                };
                self.unify(expected, &res_ty)?;
                let d_a = self.child(1, |me| me.check(a, &arg_ty))?;
                let path = self.path.clone();
                d_f.add(d_a.scale(m), &mut self.icx, &path)
            }
            Term::Seq(a, b) => {
                let d_a = self.child(0, |me| me.check(a, &TypeExpr::Unit))?;
                let d_b = self.child(1, |me| me.check(b, expected))?;
                let path = self.path.clone();
                d_a.add(d_b, &mut self.icx, &path)
            }
            Term::CaseProd(..) if from_prime_inner(t).is_some() => {
                // The `from'` expansion, checked by its derived rule:
                // the wrapped term at `expected >< 1` with the same
                // demands. Checking the raw expansion would reach the
                // inner `new` before the expected type has flowed to it.
                let inner = from_prime_inner(t).expect("matched");
                self.child(0, |me| {
                    me.child(0, |me| {
                        me.child(0, |me| {
                            me.check(inner, &TypeExpr::ampar(expected.clone(), TypeExpr::Unit))
                        })
                    })
                })
            }
            Term::CaseSum(m, scrut, x1, u1, x2, u2) => {
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                let d_s = self.child(0, |me| me.check(scrut, &TypeExpr::sum(t1.clone(), t2.clone())))?;
                self.push_binder(x1, *m, t1.clone());
                let d1 = self.child(1, |me| me.check(u1, expected));
                self.pop_binder();
                let mut d1 = d1?;
                self.solve_var_binder(&mut d1, x1, *m, &t1)?;
                self.push_binder(x2, *m, t2.clone());
                let d2 = self.child(2, |me| me.check(u2, expected));
                self.pop_binder();
                let mut d2 = d2?;
                self.solve_var_binder(&mut d2, x2, *m, &t2)?;
                let path = self.path.clone();
                let arms = Demand::branch(vec![d1, d2], &mut self.icx, &path)?;
                d_s.scale(*m).add(arms, &mut self.icx, &path)
            }
            Term::CaseProd(m, scrut, x1, x2, u) => {
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                let d_s =
                    self.child(0, |me| me.check(scrut, &TypeExpr::prod(t1.clone(), t2.clone())))?;
                self.push_binder(x1, *m, t1.clone());
                self.push_binder(x2, *m, t2.clone());
                let du = self.child(1, |me| me.check(u, expected));
                self.pop_binder();
                self.pop_binder();
                let mut du = du?;
                self.solve_var_binder(&mut du, x2, *m, &t2)?;
                self.solve_var_binder(&mut du, x1, *m, &t1)?;
                let path = self.path.clone();
                d_s.scale(*m).add(du, &mut self.icx, &path)
            }
            Term::CaseExp(m, n, scrut, x, u) => {
                let inner = self.icx.fresh();
                let d_s =
                    self.child(0, |me| me.check(scrut, &TypeExpr::exp(*n, inner.clone())))?;
                let xm = m.mul(*n);
                self.push_binder(x, xm, inner.clone());
                let du = self.child(1, |me| me.check(u, expected));
                self.pop_binder();
                let mut du = du?;
                self.solve_var_binder(&mut du, x, xm, &inner)?;
                let path = self.path.clone();
                d_s.scale(*m).add(du, &mut self.icx, &path)
            }
            Term::UpdAmpar(scrut, x, body) => {
                let left = self.icx.fresh();
                let right = self.icx.fresh();
                let d_s = self.child(0, |me| {
                    me.check(scrut, &TypeExpr::ampar(left.clone(), right.clone()))
                })?;
                let out = self.icx.fresh();
                // Pin the result shape before the body: the expected left
                // side is what determines an unascribed `new` underneath.
                self.unify(expected, &TypeExpr::ampar(left, out.clone()))?;
                self.push_binder(x, LIN_NOW, right.clone());
                let db = self.child(1, |me| me.check(body, &out));
                self.pop_binder();
                let mut db = db?;
                self.solve_var_binder(&mut db, x, LIN_NOW, &right)?;
                if db.has_hole_demands() {
                    return Err(self.err(R_HOLE_IN_TERM, "hole escapes into an update body"));
                }
                let path = self.path.clone();
                d_s.add(db.div_up(), &mut self.icx, &path)
            }
            Term::ToAmpar(inner) => {
                let left = self.icx.fresh();
                self.unify(expected, &TypeExpr::ampar(left.clone(), TypeExpr::Unit))?;
                self.child(0, |me| me.check(inner, &left))
            }
            Term::FromAmpar(inner) => {
                let left = self.icx.fresh();
                let boxed = self.icx.fresh();
                let exp = TypeExpr::exp(LIN_INF, boxed);
                let d = self.child(0, |me| {
                    me.check(inner, &TypeExpr::ampar(left.clone(), exp.clone()))
                })?;
                self.unify(expected, &TypeExpr::prod(left, exp))?;
                Ok(d)
            }
            Term::NewAmpar(asc) => {
                match asc {
                    Some(ty) => {
                        let ok = match &**ty {
                            TypeExpr::Ampar(s, v) => match &**v {
                                TypeExpr::Dest(n, inner) => {
                                    *n == LIN_NOW && super::unify::types_equal(s, inner)
                                }
                                _ => false,
                            },
                            _ => false,
                        };
                        if !ok {
                            return Err(self.err(
                                R_TYPE_MISMATCH,
                                format!("`new` ascription must have shape T >< [1v T], found {}", ty),
                            ));
                        }
                        self.unify(expected, ty)?;
                    }
                    None => {
                        let t = self.icx.fresh();
                        let shape =
                            TypeExpr::ampar(t.clone(), TypeExpr::dest(LIN_NOW, t));
                        self.unify(expected, &shape)?;
                        let path = self.path.clone();
                        self.new_ascriptions.push((path, shape));
                    }
                }
                Ok(Demand::new())
            }
            Term::FillUnit(t0) => {
                let (d, _, pointee) = self.dest_operand(t0, 0)?;
                self.unify(&pointee, &TypeExpr::Unit)?;
                self.unify(expected, &TypeExpr::Unit)?;
                Ok(d)
            }
            Term::FillInl(t0) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(&pointee, &TypeExpr::sum(t1.clone(), t2))?;
                self.unify(expected, &TypeExpr::dest(n, t1))?;
                Ok(d)
            }
            Term::FillInr(t0) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(&pointee, &TypeExpr::sum(t1, t2.clone()))?;
                self.unify(expected, &TypeExpr::dest(n, t2))?;
                Ok(d)
            }
            Term::FillProd(t0) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(&pointee, &TypeExpr::prod(t1.clone(), t2.clone()))?;
                self.unify(
                    expected,
                    &TypeExpr::prod(TypeExpr::dest(n, t1), TypeExpr::dest(n, t2)),
                )?;
                Ok(d)
            }
            Term::FillExp(m, t0) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let inner = self.icx.fresh();
                self.unify(&pointee, &TypeExpr::exp(*m, inner.clone()))?;
                self.unify(expected, &TypeExpr::dest(m.mul(n), inner))?;
                Ok(d)
            }
            Term::FillFun(t0, x, m, body) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let arg = self.icx.fresh();
                let res = self.icx.fresh();
                self.unify(&pointee, &TypeExpr::arrow(arg.clone(), *m, res.clone()))?;
                self.push_binder(x, *m, arg.clone());
                let db = self.child(1, |me| me.check(body, &res));
                self.pop_binder();
                let mut db = db?;
                self.solve_var_binder(&mut db, x, *m, &arg)?;
                self.unify(expected, &TypeExpr::Unit)?;
                let path = self.path.clone();
                d.add(db.scale(LIN_UP.mul(n)), &mut self.icx, &path)
            }
            Term::FillComp(t0, t1) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                if n != LIN_NOW {
                    return Err(self.err(
                        R_TYPE_MISMATCH,
                        format!("composition needs a [1v _] destination, found pointee mode {}", n),
                    ));
                }
                let right = self.icx.fresh();
                let d1 = self.child(1, |me| {
                    me.check(t1, &TypeExpr::ampar(pointee.clone(), right.clone()))
                })?;
                self.unify(expected, &right)?;
                let path = self.path.clone();
                d.add(d1.scale(LIN_UP), &mut self.icx, &path)
            }
            Term::FillLeaf(t0, t1) => {
                let (d, n, pointee) = self.dest_operand(t0, 0)?;
                let d1 = self.child(1, |me| me.check(t1, &pointee))?;
                self.unify(expected, &TypeExpr::Unit)?;
                let path = self.path.clone();
                d.add(d1.scale(LIN_UP.mul(n)), &mut self.icx, &path)
            }
            Term::Val(v) => {
                let d = self.check_value(v, expected)?;
                if d.has_hole_demands() {
                    return Err(self.err(
                        R_HOLE_IN_TERM,
                        "a value with free holes cannot be used as a term",
                    ));
                }
                Ok(d)
            }
            Term::Fix(x, m, body) => {
                if !self.recursion_enabled {
                    return Err(self.err(
                        R_TYPE_MISMATCH,
                        "fixpoints require the recursion extension (--ext rec)",
                    ));
                }
                debug_assert_eq!(*m, UNR_INF);
                let ty = expected.clone();
                self.push_binder(x, UNR_INF, ty.clone());
                let db = self.child(0, |me| me.check(body, &ty));
                self.pop_binder();
                let mut db = db?;
                self.solve_var_binder(&mut db, x, UNR_INF, &ty)?;
                Ok(db)
            }
        }
    }
}

/// Recognize the `from'` expansion:
/// `case[1v] (from (upd T with un -> un ; Mod{1inf} ())) of {(st, ex) ->
///  case[1v] ex of {Mod{1inf} un2 -> un2 ; st}}`
/// and return the wrapped term `T`.
fn from_prime_inner(t: &Term) -> Option<&Term> {
    let Term::CaseProd(m, scrut, st, ex, body) = t else { return None };
    if *m != LIN_NOW {
        return None;
    }
    let Term::FromAmpar(upd) = &**scrut else { return None };
    let Term::UpdAmpar(inner, un, upd_body) = &**upd else { return None };
    let Term::Seq(un_use, boxed_unit) = &**upd_body else { return None };
    let ok_seq = matches!(&**un_use, Term::Var(v) if v == un)
        && matches!(
            &**boxed_unit,
            Term::Val(crate::syntax::Value::ModV(mode, v))
                if *mode == LIN_INF && **v == crate::syntax::Value::UnitV
        );
    if !ok_seq {
        return None;
    }
    let Term::CaseExp(m2, n2, ex_use, un2, last) = &**body else { return None };
    if *m2 != LIN_NOW || *n2 != LIN_INF {
        return None;
    }
    if !matches!(&**ex_use, Term::Var(v) if v == ex) {
        return None;
    }
    let Term::Seq(un2_use, st_use) = &**last else { return None };
    let ok_last = matches!(&**un2_use, Term::Var(v) if v == un2)
        && matches!(&**st_use, Term::Var(v) if v == st);
    if !ok_last {
        return None;
    }
    Some(inner)
}

/// The outcome of a successful top-level check.
pub struct TermCheck {
    /// The (deep-resolved) type of the term.
    pub ty: TypeExpr,
    /// Inferred `new` ascriptions, fully resolved, by AST path.
    pub new_ascriptions: Vec<(Vec<u32>, TypeExpr)>,
}

/// Check `t` in context `g` (variables and destinations; holes rejected),
/// against `expected` when given, synthesizing otherwise.
pub fn check_term_full(
    g: &Ctx,
    t: &Term,
    expected: Option<&TypeExpr>,
    recursion_enabled: bool,
) -> Result<TermCheck, TypeError> {
    if g.iter().any(|(k, _)| matches!(k, BindingKey::HoleKey(_))) {
        return Err(TypeError::new(
            R_HOLE_IN_TERM,
            &[],
            "terms type in contexts without hole bindings",
        ));
    }
    let mut ck = Checker::new(recursion_enabled);
    for (k, b) in g.iter() {
        match k {
            BindingKey::VarKey(x) => ck.push_binder(x, b.mode, b.ty.clone()),
            BindingKey::DestKey(h) => {
                ck.dest_types.insert(*h, b.ty.clone());
            }
            BindingKey::HoleKey(_) => unreachable!(),
        }
    }
    let goal = match expected {
        Some(e) => e.clone(),
        None => ck.icx.fresh(),
    };
    let mut demand = ck.check(t, &goal)?;
    for (k, b) in g.iter() {
        let kd = demand.remove(k);
        solve_binder(kd, k, b.mode, &b.ty, true, &mut ck.icx, &[])?;
    }
    finish(ck, demand, &goal)
}

pub(super) fn finish(
    mut ck: Checker,
    demand: Demand,
    goal: &TypeExpr,
) -> Result<TermCheck, TypeError> {
    ck.flush_deferred()?;
    if let Some((k, _)) = demand.map.iter().next() {
        let (rule, msg) = match k {
            BindingKey::VarKey(x) => (R_UNKNOWN_VAR, format!("unbound variable `{}`", x)),
            BindingKey::DestKey(h) => (
                super::R_DEST_UNOWNED,
                format!("destination ->{} has no binding in scope", h),
            ),
            BindingKey::HoleKey(h) => {
                (R_HOLE_IN_TERM, format!("hole []{} has no binding in scope", h))
            }
        };
        return Err(TypeError::new(rule, &[], msg));
    }
    let mut out = Vec::new();
    for (path, ty) in std::mem::take(&mut ck.new_ascriptions) {
        let resolved = ck.icx.deep(&ty);
        if resolved.contains_meta() {
            return Err(TypeError::new(
                R_NEW_UNDETERMINED,
                &path,
                "type of `new` is not determined by its surroundings; add an ascription",
            ));
        }
        out.push((path, resolved));
    }
    Ok(TermCheck { ty: ck.icx.deep(goal), new_ascriptions: out })
}

/// Spec-level entry point: accept or reject `g |- t : expected`.
pub fn check_term(
    g: &Ctx,
    t: &Term,
    expected: &TypeExpr,
    recursion_enabled: bool,
) -> Result<(), TypeError> {
    check_term_full(g, t, Some(expected), recursion_enabled).map(|_| ())
}

/// Write inferred ascriptions back into the term.
pub fn apply_ascriptions(t: &mut Term, ascriptions: &[(Vec<u32>, TypeExpr)]) {
    for (path, ty) in ascriptions {
        set_ascription(t, path, ty);
    }
}

fn set_ascription(t: &mut Term, path: &[u32], ty: &TypeExpr) {
    match (t, path) {
        (Term::NewAmpar(asc), []) => *asc = Some(Box::new(ty.clone())),
        (t0, [i, rest @ ..]) => {
            if let Some(child) = term_child_mut(t0, *i) {
                set_ascription(child, rest, ty);
            }
        }
        _ => {}
    }
}

fn term_child_mut(t: &mut Term, i: u32) -> Option<&mut Term> {
    match (t, i) {
        (Term::App(a, _), 0) | (Term::Seq(a, _), 0) => Some(a),
        (Term::App(_, b), 1) | (Term::Seq(_, b), 1) => Some(b),
        (Term::CaseSum(_, s, _, _, _, _), 0) => Some(s),
        (Term::CaseSum(_, _, _, u1, _, _), 1) => Some(u1),
        (Term::CaseSum(_, _, _, _, _, u2), 2) => Some(u2),
        (Term::CaseProd(_, s, _, _, _), 0) => Some(s),
        (Term::CaseProd(_, _, _, _, u), 1) => Some(u),
        (Term::CaseExp(_, _, s, _, _), 0) => Some(s),
        (Term::CaseExp(_, _, _, _, u), 1) => Some(u),
        (Term::UpdAmpar(s, _, _), 0) => Some(s),
        (Term::UpdAmpar(_, _, u), 1) => Some(u),
        (Term::ToAmpar(s), 0)
        | (Term::FromAmpar(s), 0)
        | (Term::FillUnit(s), 0)
        | (Term::FillInl(s), 0)
        | (Term::FillInr(s), 0)
        | (Term::FillProd(s), 0)
        | (Term::FillExp(_, s), 0) => Some(s),
        (Term::FillFun(s, _, _, _), 0) => Some(s),
        (Term::FillFun(_, _, _, u), 1) => Some(u),
        (Term::FillComp(a, _), 0) | (Term::FillLeaf(a, _), 0) => Some(a),
        (Term::FillComp(_, b), 1) | (Term::FillLeaf(_, b), 1) => Some(b),
        (Term::Fix(_, _, b), 0) => Some(b),
        (Term::Val(v), i) => value_child_term_mut(v, i),
        _ => None,
    }
}

fn value_child_term_mut(v: &mut crate::syntax::Value, i: u32) -> Option<&mut Term> {
    use crate::syntax::Value;
    match (v, i) {
        (Value::Fun(_, _, body), 0) => Some(body),
        _ => None,
    }
}

/// Convenience: an empty Gamma context.
pub fn empty_gamma() -> Ctx {
    Ctx::new(CtxClass::Gamma)
}
