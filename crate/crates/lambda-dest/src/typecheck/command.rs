//! Typing of evaluation contexts and whole commands.
//!
//! The walk runs from the focus outward. Each focusing component applies
//! its term rule's context arithmetic to the accumulated demand and
//! rewrites the virtual focus type; open-ampar components check their
//! attached structure, bind its holes against the destinations the inner
//! command consumed, and age everything else that crosses the boundary.

use std::collections::BTreeMap;

use crate::context::{BindingKey, Ctx};
use crate::eval::{EvaluationContext, FocusComponent};
use crate::mode::{Age, Mode, Mult, LIN_INF, LIN_NOW, LIN_UP};
use crate::syntax::{HasHoleNames, HoleName, HoleSet, Term, TypeExpr, Value};

use super::demand::{solve, solve_binder, Demand};
use super::term::{finish, Checker};
use super::TypeError;
use super::{
    R_AMPAR_NAMES, R_CANNOT_SYNTH, R_DISJOINTNESS, R_HOLE_IN_TERM, R_MODE_MISMATCH,
    R_TYPE_MISMATCH,
};

/// The mode a hole carries in the structure that declares it: `1v` unless
/// an enclosing exponential replaced it (outermost wins). Purely
/// structural, so the command walk can pin destination modes up front.
fn hole_modes(v: &Value, locked: Option<Mode>, out: &mut BTreeMap<HoleName, Mode>) {
    match v {
        Value::Hole(h) => {
            out.insert(*h, locked.unwrap_or(LIN_NOW));
        }
        Value::DestV(_) | Value::UnitV | Value::Fun(..) => {}
        Value::ModV(n, inner) => hole_modes(inner, Some(locked.unwrap_or(*n)), out),
        Value::InlV(inner) | Value::InrV(inner) => hole_modes(inner, locked, out),
        Value::PairV(a, b) => {
            hole_modes(a, locked, out);
            hole_modes(b, locked, out);
        }
        Value::AmparV(_, v2, v1, _) => {
            // A nested closed ampar binds its own names; global uniqueness
            // keeps them apart from the set we care about.
            hole_modes(v2, locked, out);
            hole_modes(v1, locked, out);
        }
    }
}

/// Position-directed hole types: walk a structure together with its
/// (ground) type, recording the type at each hole. Nested closed ampars
/// bind their own names; their interiors still contribute, which is
/// harmless because names are globally unique.
fn hole_types(
    v: &Value,
    ty: &TypeExpr,
    out: &mut BTreeMap<HoleName, TypeExpr>,
) {
    let mut shape = ty.clone();
    let mut fuel = 64;
    while let TypeExpr::Rec(body) = &shape {
        shape = super::unify::unfold_rec(body);
        fuel -= 1;
        if fuel == 0 {
            return;
        }
    }
    match (v, shape) {
        (Value::Hole(h), t) => {
            out.insert(*h, t);
        }
        (Value::InlV(inner), TypeExpr::Sum(a, _)) => hole_types(inner, &a, out),
        (Value::InrV(inner), TypeExpr::Sum(_, b)) => hole_types(inner, &b, out),
        (Value::ModV(_, inner), TypeExpr::Exp(_, a)) => hole_types(inner, &a, out),
        (Value::PairV(x, y), TypeExpr::Prod(a, b)) => {
            hole_types(x, &a, out);
            hole_types(y, &b, out);
        }
        (Value::AmparV(_, v2, v1, tag), TypeExpr::Ampar(a, b)) => {
            let left = tag.as_deref().unwrap_or(&a).clone();
            hole_types(v2, &left, out);
            hole_types(v1, &b, out);
        }
        _ => {}
    }
}

/// Pre-pass: disjointness of each open ampar's names against the context
/// outside it, and a destination-type table for every open name. Tagged
/// components pin their holes' types up front, so destination values in
/// the focus resolve before the walk reaches their owning component.
fn prepare(ck: &mut Checker, stack: &[FocusComponent]) -> Result<(), TypeError> {
    for (i, comp) in stack.iter().enumerate() {
        if let FocusComponent::OpenAmpar(set, v2, tag) = comp {
            let mut outer = HoleSet::new();
            for outer_comp in &stack[..i] {
                outer_comp.collect_hnames(&mut outer);
            }
            if let Some(h) = set.iter().find(|h| outer.contains(h)) {
                return Err(TypeError::new(
                    R_DISJOINTNESS,
                    &[],
                    format!("open ampar name {} also occurs outside its component", h),
                ));
            }
            let mut modes = BTreeMap::new();
            hole_modes(v2, None, &mut modes);
            let mut types = BTreeMap::new();
            if let Some(tag) = tag {
                hole_types(v2, tag, &mut types);
            }
            for h in set {
                let x = modes.get(h).copied().ok_or_else(|| {
                    TypeError::new(
                        R_AMPAR_NAMES,
                        &[],
                        format!("open ampar binds {} but its structure has no hole []{}", h, h),
                    )
                })?;
                let pointee = match types.get(h) {
                    Some(t) => t.clone(),
                    None => ck.icx.fresh(),
                };
                ck.dest_types.insert(*h, TypeExpr::dest(x, pointee));
            }
        }
    }
    Ok(())
}

fn dest_shape(ck: &mut Checker, ty: &TypeExpr) -> Result<(Mode, TypeExpr), TypeError> {
    match ck.shape(ty) {
        TypeExpr::Dest(n, inner) => Ok((n, *inner)),
        TypeExpr::Meta(_) => Err(ck.err(
            R_CANNOT_SYNTH,
            "destination type undetermined in fill component",
        )),
        other => Err(ck.err(
            R_TYPE_MISMATCH,
            format!("fill component over a non-destination type {}", ck.icx.deep(&other)),
        )),
    }
}

struct WalkResult {
    ty: TypeExpr,
    demand: Demand,
    provided: Ctx,
}

fn walk(
    ck: &mut Checker,
    stack: &[FocusComponent],
    mut ty: TypeExpr,
    mut demand: Demand,
    provide_missing: bool,
) -> Result<WalkResult, TypeError> {
    let mut provided = Ctx::empty_delta();
    let mut ops_passed: u32 = 0;
    for comp in stack.iter().rev() {
        match comp {
            FocusComponent::AppL(t1) => {
                let fty = ck.icx.fresh();
                let d_f = ck.check(t1, &fty)?;
                let (arg, m, res) = match ck.shape(&fty) {
                    TypeExpr::Arrow(a, m, r) => (*a, m, *r),
                    TypeExpr::Meta(_) => {
                        return Err(ck.err(R_CANNOT_SYNTH, "pending function type undetermined"))
                    }
                    other => {
                        return Err(ck.err(
                            R_TYPE_MISMATCH,
                            format!("pending function has type {}", ck.icx.deep(&other)),
                        ))
                    }
                };
                ck.unify(&arg, &ty)?;
                ty = res;
                demand = d_f.add(demand.scale(m), &mut ck.icx, &[])?;
            }
            FocusComponent::AppR(v) => {
                let arg_ty = ck.icx.fresh();
                let d_v = ck.check_value(v, &arg_ty)?;
                if d_v.has_hole_demands() {
                    return Err(ck.err(R_HOLE_IN_TERM, "argument value has free holes"));
                }
                let (arg, m, res) = match ck.shape(&ty) {
                    TypeExpr::Arrow(a, m, r) => (*a, m, *r),
                    TypeExpr::Meta(_) => {
                        return Err(ck.err(R_CANNOT_SYNTH, "function type undetermined"))
                    }
                    other => {
                        return Err(ck.err(
                            R_TYPE_MISMATCH,
                            format!("applying a non-function of type {}", ck.icx.deep(&other)),
                        ))
                    }
                };
                ck.unify(&arg_ty, &arg)?;
                ty = res;
                demand = demand.add(d_v.scale(m), &mut ck.icx, &[])?;
            }
            FocusComponent::SeqF(u) => {
                ck.unify(&ty, &TypeExpr::Unit)?;
                let out = ck.icx.fresh();
                let d_u = ck.check(u, &out)?;
                ty = out;
                demand = demand.add(d_u, &mut ck.icx, &[])?;
            }
            FocusComponent::CaseSumF(m, x1, u1, x2, u2) => {
                let t1 = ck.icx.fresh();
                let t2 = ck.icx.fresh();
                ck.unify(&ty, &TypeExpr::sum(t1.clone(), t2.clone()))?;
                let out = ck.icx.fresh();
                ck.push_binder(x1, *m, t1.clone());
                let d1 = ck.check(u1, &out);
                ck.pop_binder();
                let mut d1 = d1?;
                let kd = d1.remove(&BindingKey::VarKey(x1.clone()));
                solve_binder(kd, &BindingKey::VarKey(x1.clone()), *m, &t1, true, &mut ck.icx, &[])?;
                ck.push_binder(x2, *m, t2.clone());
                let d2 = ck.check(u2, &out);
                ck.pop_binder();
                let mut d2 = d2?;
                let kd = d2.remove(&BindingKey::VarKey(x2.clone()));
                solve_binder(kd, &BindingKey::VarKey(x2.clone()), *m, &t2, true, &mut ck.icx, &[])?;
                let arms = Demand::branch(vec![d1, d2], &mut ck.icx, &[])?;
                demand = demand.scale(*m).add(arms, &mut ck.icx, &[])?;
                ty = out;
            }
            FocusComponent::CaseProdF(m, x1, x2, u) => {
                let t1 = ck.icx.fresh();
                let t2 = ck.icx.fresh();
                ck.unify(&ty, &TypeExpr::prod(t1.clone(), t2.clone()))?;
                let out = ck.icx.fresh();
                ck.push_binder(x1, *m, t1.clone());
                ck.push_binder(x2, *m, t2.clone());
                let du = ck.check(u, &out);
                ck.pop_binder();
                ck.pop_binder();
                let mut du = du?;
                let kd = du.remove(&BindingKey::VarKey(x2.clone()));
                solve_binder(kd, &BindingKey::VarKey(x2.clone()), *m, &t2, true, &mut ck.icx, &[])?;
                let kd = du.remove(&BindingKey::VarKey(x1.clone()));
                solve_binder(kd, &BindingKey::VarKey(x1.clone()), *m, &t1, true, &mut ck.icx, &[])?;
                demand = demand.scale(*m).add(du, &mut ck.icx, &[])?;
                ty = out;
            }
            FocusComponent::CaseExpF(m, n, x, u) => {
                let inner = ck.icx.fresh();
                ck.unify(&ty, &TypeExpr::exp(*n, inner.clone()))?;
                let out = ck.icx.fresh();
                let xm = m.mul(*n);
                ck.push_binder(x, xm, inner.clone());
                let du = ck.check(u, &out);
                ck.pop_binder();
                let mut du = du?;
                let kd = du.remove(&BindingKey::VarKey(x.clone()));
                solve_binder(kd, &BindingKey::VarKey(x.clone()), xm, &inner, true, &mut ck.icx, &[])?;
                demand = demand.scale(*m).add(du, &mut ck.icx, &[])?;
                ty = out;
            }
            FocusComponent::UpdF(x, body) => {
                let left = ck.icx.fresh();
                let right = ck.icx.fresh();
                ck.unify(&ty, &TypeExpr::ampar(left.clone(), right.clone()))?;
                let out = ck.icx.fresh();
                ck.push_binder(x, LIN_NOW, right.clone());
                let db = ck.check(body, &out);
                ck.pop_binder();
                let mut db = db?;
                let kd = db.remove(&BindingKey::VarKey(x.clone()));
                solve_binder(kd, &BindingKey::VarKey(x.clone()), LIN_NOW, &right, true, &mut ck.icx, &[])?;
                if db.has_hole_demands() {
                    return Err(ck.err(R_HOLE_IN_TERM, "hole escapes into an update body"));
                }
                demand = demand.add(db.div_up(), &mut ck.icx, &[])?;
                ty = TypeExpr::ampar(left, out);
            }
            FocusComponent::ToF => {
                ty = TypeExpr::ampar(ty, TypeExpr::Unit);
            }
            FocusComponent::FromF => {
                let left = ck.icx.fresh();
                let boxed = ck.icx.fresh();
                let exp = TypeExpr::exp(LIN_INF, boxed);
                ck.unify(&ty, &TypeExpr::ampar(left.clone(), exp.clone()))?;
                ty = TypeExpr::prod(left, exp);
            }
            FocusComponent::FillUnitF => {
                let (_, pointee) = dest_shape(ck, &ty)?;
                ck.unify(&pointee, &TypeExpr::Unit)?;
                ty = TypeExpr::Unit;
            }
            FocusComponent::FillInlF => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let t1 = ck.icx.fresh();
                let t2 = ck.icx.fresh();
                ck.unify(&pointee, &TypeExpr::sum(t1.clone(), t2))?;
                ty = TypeExpr::dest(n, t1);
            }
            FocusComponent::FillInrF => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let t1 = ck.icx.fresh();
                let t2 = ck.icx.fresh();
                ck.unify(&pointee, &TypeExpr::sum(t1, t2.clone()))?;
                ty = TypeExpr::dest(n, t2);
            }
            FocusComponent::FillProdF => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let t1 = ck.icx.fresh();
                let t2 = ck.icx.fresh();
                ck.unify(&pointee, &TypeExpr::prod(t1.clone(), t2.clone()))?;
                ty = TypeExpr::prod(TypeExpr::dest(n, t1), TypeExpr::dest(n, t2));
            }
            FocusComponent::FillExpF(m) => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let inner = ck.icx.fresh();
                ck.unify(&pointee, &TypeExpr::exp(*m, inner.clone()))?;
                ty = TypeExpr::dest(m.mul(n), inner);
            }
            FocusComponent::FillFunF(x, m, u) => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let arg = ck.icx.fresh();
                let res = ck.icx.fresh();
                ck.unify(&pointee, &TypeExpr::arrow(arg.clone(), *m, res.clone()))?;
                ck.push_binder(x, *m, arg.clone());
                let du = ck.check(u, &res);
                ck.pop_binder();
                let mut du = du?;
                let kd = du.remove(&BindingKey::VarKey(x.clone()));
                solve_binder(kd, &BindingKey::VarKey(x.clone()), *m, &arg, true, &mut ck.icx, &[])?;
                demand = demand.add(du.scale(LIN_UP.mul(n)), &mut ck.icx, &[])?;
                ty = TypeExpr::Unit;
            }
            FocusComponent::FillCompL(t1) => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                if n != LIN_NOW {
                    return Err(ck.err(
                        R_TYPE_MISMATCH,
                        format!("composition needs a [1v _] destination, found pointee mode {}", n),
                    ));
                }
                let right = ck.icx.fresh();
                let d1 = ck.check(t1, &TypeExpr::ampar(pointee, right.clone()))?;
                demand = demand.add(d1.scale(LIN_UP), &mut ck.icx, &[])?;
                ty = right;
            }
            FocusComponent::FillCompR(v) => {
                let dty = ck.icx.fresh();
                let d_v = ck.check_value(v, &dty)?;
                if d_v.has_hole_demands() {
                    return Err(ck.err(R_HOLE_IN_TERM, "fill operand value has free holes"));
                }
                let (n, pointee) = dest_shape(ck, &dty)?;
                if n != LIN_NOW {
                    return Err(ck.err(
                        R_TYPE_MISMATCH,
                        format!("composition needs a [1v _] destination, found pointee mode {}", n),
                    ));
                }
                let right = ck.icx.fresh();
                ck.unify(&ty, &TypeExpr::ampar(pointee, right.clone()))?;
                demand = d_v.add(demand.scale(LIN_UP), &mut ck.icx, &[])?;
                ty = right;
            }
            FocusComponent::FillLeafL(t1) => {
                let (n, pointee) = dest_shape(ck, &ty)?;
                let d1 = ck.check(t1, &pointee)?;
                demand = demand.add(d1.scale(LIN_UP.mul(n)), &mut ck.icx, &[])?;
                ty = TypeExpr::Unit;
            }
            FocusComponent::FillLeafR(v) => {
                let dty = ck.icx.fresh();
                let d_v = ck.check_value(v, &dty)?;
                if d_v.has_hole_demands() {
                    return Err(ck.err(R_HOLE_IN_TERM, "fill operand value has free holes"));
                }
                let (n, pointee) = dest_shape(ck, &dty)?;
                ck.unify(&ty, &pointee)?;
                demand = d_v.add(demand.scale(LIN_UP.mul(n)), &mut ck.icx, &[])?;
                ty = TypeExpr::Unit;
            }
            FocusComponent::OpenAmpar(set, v2, tag) => {
                let left = ck.icx.fresh();
                if let Some(tag) = tag {
                    ck.unify(&left, tag)?;
                }
                let mut d2 = ck.check_value(v2, &left)?;
                // The attached structure's holes must be exactly this
                // component's name set.
                let holes: HoleSet = d2
                    .map
                    .keys()
                    .filter_map(|k| match k {
                        BindingKey::HoleKey(h) => Some(*h),
                        _ => None,
                    })
                    .collect();
                if &holes != set {
                    return Err(ck.err(
                        R_AMPAR_NAMES,
                        format!(
                            "open ampar binds {:?} but its structure has holes {:?}",
                            set, holes
                        ),
                    ));
                }
                for h in set {
                    let kd_hole = d2.remove(&BindingKey::HoleKey(*h)).expect("present");
                    let dest_ty = ck.dest_types.get(h).cloned().expect("prepared");
                    let pointee = match &dest_ty {
                        TypeExpr::Dest(_, inner) => (**inner).clone(),
                        _ => unreachable!(),
                    };
                    ck.unify(&kd_hole.ty, &pointee)?;
                    match demand.remove(&BindingKey::DestKey(*h)) {
                        Some(kd1) => {
                            ck.unify(&kd1.ty, &dest_ty)?;
                            solve(&kd1.tree, LIN_NOW).map_err(|_| {
                                ck.err(
                                    R_MODE_MISMATCH,
                                    format!(
                                        "destination ->{} must be consumed linearly at age v within its scope",
                                        h
                                    ),
                                )
                            })?;
                        }
                        None => {
                            if provide_missing {
                                provided = provided
                                    .bind(
                                        BindingKey::DestKey(*h),
                                        Mode::new(Mult::One, Age::Fin(ops_passed)),
                                        dest_ty,
                                    )
                                    .map_err(|e| ck.err(R_AMPAR_NAMES, e.to_string()))?;
                            } else {
                                return Err(ck.err(
                                    R_AMPAR_NAMES,
                                    format!(
                                        "destination ->{} for an open hole does not occur in the command",
                                        h
                                    ),
                                ));
                            }
                        }
                    }
                }
                demand = d2.add(demand.div_up(), &mut ck.icx, &[])?;
                ty = TypeExpr::ampar(left, ty);
                ops_passed += 1;
            }
        }
    }
    Ok(WalkResult { ty, demand, provided })
}

/// Find `T` and the provided context such that the context takes a focus
/// of type `T` to a command result `U0`; returns `U0`.
///
/// When `expect_u0` is given (re-checking along a trace), the final type is
/// unified against it, which also pins sum arms that became unobservable
/// when their ascriptions reduced away.
pub fn check_command(
    ectx: &EvaluationContext,
    focus: &Term,
    recursion_enabled: bool,
    expect_u0: Option<&TypeExpr>,
) -> Result<TypeExpr, TypeError> {
    let mut ck = Checker::new(recursion_enabled);
    prepare(&mut ck, &ectx.stack)?;
    let goal = ck.icx.fresh();
    let d = ck.check(focus, &goal)?;
    let result = walk(&mut ck, &ectx.stack, goal, d, false)?;
    if let Some(expect) = expect_u0 {
        ck.unify(&result.ty, expect)?;
    }
    let final_ty = result.ty.clone();
    let out = finish(ck, result.demand, &final_ty)?;
    Ok(out.ty)
}

/// Synthesize the context `Delta` provided by an evaluation context at
/// `hole_ty -> result_ty`.
pub fn check_ectx(
    ectx: &EvaluationContext,
    hole_ty: &TypeExpr,
    result_ty: &TypeExpr,
    recursion_enabled: bool,
) -> Result<Ctx, TypeError> {
    let mut ck = Checker::new(recursion_enabled);
    prepare(&mut ck, &ectx.stack)?;
    let result = walk(&mut ck, &ectx.stack, hole_ty.clone(), Demand::new(), true)?;
    ck.unify(&result.ty, result_ty)?;
    let final_ty = result.ty.clone();
    let provided = result.provided.clone();
    finish(ck, result.demand, &final_ty)?;
    Ok(provided)
}

/// The used half of `Term` re-export for callers that build commands.
pub fn command_of(ectx: EvaluationContext, focus: Term) -> crate::eval::Command {
    crate::eval::Command { ctx: ectx, focus }
}
