//! The value judgment. Values type in hole-and-destination contexts with
//! no weakening; the ampar rule binds a hole set and the matching
//! destination bindings together and removes them.

use crate::context::{BindingKey, Ctx};
use crate::mode::LIN_NOW;
use crate::syntax::{TypeExpr, Value};

use super::demand::{achievable_modes, solve, solve_binder, Demand, DemandTree};
use super::term::Checker;
use super::TypeError;
use super::{R_AMPAR_NAMES, R_FREE_VAR_IN_VALUE, R_HOLE_MODE, R_MODE_MISMATCH};

impl Checker {
    pub fn check_value(&mut self, v: &Value, expected: &TypeExpr) -> Result<Demand, TypeError> {
        match v {
            Value::Hole(h) => Ok(Demand::single(
                BindingKey::HoleKey(*h),
                expected.clone(),
                DemandTree::exact(LIN_NOW),
            )),
            Value::DestV(h) => {
                if let Some(known) = self.dest_types.get(h).cloned() {
                    self.unify(expected, &known)?;
                }
                Ok(Demand::single(
                    BindingKey::DestKey(*h),
                    expected.clone(),
                    DemandTree::coercible(),
                ))
            }
            Value::UnitV => {
                self.unify(expected, &TypeExpr::Unit)?;
                Ok(Demand::new())
            }
            Value::Fun(x, m, body) => {
                let arg = self.icx.fresh();
                let res = self.icx.fresh();
                self.unify(expected, &TypeExpr::arrow(arg.clone(), *m, res.clone()))?;
                self.push_binder(x, *m, arg.clone());
                let db = self.child_value(0, |me| me.check(body, &res));
                self.pop_binder();
                if matches!(&db, Err(e) if e.rule == super::R_CANNOT_SYNTH) {
                    // The argument type is not pinned down yet; retry the
                    // body once the rest of the command has unified.
                    self.deferred.push(crate::typecheck::term::DeferredBody {
                        param: x.clone(),
                        mode: *m,
                        arg_ty: arg,
                        res_ty: res,
                        body: (**body).clone(),
                        path: self.path.clone(),
                    });
                    return Ok(Demand::new());
                }
                let mut db = db?;
                let path = self.path.clone();
                let kd = db.remove(&BindingKey::VarKey(x.clone()));
                solve_binder(
                    kd,
                    &BindingKey::VarKey(x.clone()),
                    *m,
                    &arg,
                    true,
                    &mut self.icx,
                    &path,
                )?;
                if let Some(k) = db.map.keys().find(|k| matches!(k, BindingKey::VarKey(_))) {
                    return Err(self.err(
                        R_FREE_VAR_IN_VALUE,
                        format!("function value captures free variable {}", k),
                    ));
                }
                if db.has_hole_demands() {
                    return Err(self.err(
                        R_HOLE_MODE,
                        "function values cannot contain free holes",
                    ));
                }
                Ok(db)
            }
            Value::InlV(inner) => {
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(expected, &TypeExpr::sum(t1.clone(), t2))?;
                self.child_value(0, |me| me.check_value(inner, &t1))
            }
            Value::InrV(inner) => {
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(expected, &TypeExpr::sum(t1, t2.clone()))?;
                self.child_value(0, |me| me.check_value(inner, &t2))
            }
            Value::ModV(n, inner) => {
                let t = self.icx.fresh();
                self.unify(expected, &TypeExpr::exp(*n, t.clone()))?;
                let d = self.child_value(0, |me| me.check_value(inner, &t))?;
                Ok(d.scale_exp(*n))
            }
            Value::PairV(a, b) => {
                let t1 = self.icx.fresh();
                let t2 = self.icx.fresh();
                self.unify(expected, &TypeExpr::prod(t1.clone(), t2.clone()))?;
                let d1 = self.child_value(0, |me| me.check_value(a, &t1))?;
                let d2 = self.child_value(1, |me| me.check_value(b, &t2))?;
                let path = self.path.clone();
                d1.add(d2, &mut self.icx, &path)
            }
            Value::AmparV(bound, v2, v1, tag) => {
                let left = self.icx.fresh();
                let right = self.icx.fresh();
                self.unify(expected, &TypeExpr::ampar(left.clone(), right.clone()))?;
                if let Some(tag) = tag {
                    self.unify(&left, tag)?;
                }
                let mut d2 = self.child_value(0, |me| me.check_value(v2, &left))?;
                let mut d1 = self.child_value(1, |me| me.check_value(v1, &right))?;
                if d1.has_hole_demands() {
                    return Err(self.err(
                        R_HOLE_MODE,
                        "holes cannot appear on the destination side of an ampar",
                    ));
                }
                // The structure side's holes must be exactly the bound set.
                let holes: Vec<_> = d2
                    .map
                    .keys()
                    .filter_map(|k| match k {
                        BindingKey::HoleKey(h) => Some(*h),
                        _ => None,
                    })
                    .collect();
                let hole_set: crate::syntax::HoleSet = holes.iter().copied().collect();
                if &hole_set != bound {
                    return Err(self.err(
                        R_AMPAR_NAMES,
                        format!(
                            "ampar binds {{{}}} but its structure has holes {{{}}}",
                            render_set(bound),
                            render_set(&hole_set)
                        ),
                    ));
                }
                for h in holes {
                    let kd_hole = d2.remove(&BindingKey::HoleKey(h)).expect("present");
                    let modes = achievable_modes(&kd_hole.tree);
                    let hole_mode = match modes.as_slice() {
                        [one] => *one,
                        _ => {
                            return Err(self.err(
                                R_HOLE_MODE,
                                format!("hole []{} has no single required mode", h),
                            ))
                        }
                    };
                    let dest_ty = TypeExpr::dest(hole_mode, kd_hole.ty.clone());
                    let kd_dest = d1.remove(&BindingKey::DestKey(h)).ok_or_else(|| {
                        self.err(
                            R_AMPAR_NAMES,
                            format!("no destination for hole []{} on the right side", h),
                        )
                    })?;
                    self.unify(&kd_dest.ty, &dest_ty)?;
                    solve(&kd_dest.tree, LIN_NOW).map_err(|_| {
                        self.err(
                            R_MODE_MISMATCH,
                            format!("destination ->{} must be used linearly at age v", h),
                        )
                    })?;
                }
                let path = self.path.clone();
                d2.add(d1.div_up(), &mut self.icx, &path)
            }
        }
    }

    fn child_value<R>(
        &mut self,
        idx: u32,
        f: impl FnOnce(&mut Self) -> Result<R, TypeError>,
    ) -> Result<R, TypeError> {
        self.path.push(idx);
        let r = f(self);
        self.path.pop();
        r
    }
}

fn render_set(s: &crate::syntax::HoleSet) -> String {
    s.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",")
}

/// Check `th |- v : expected` where `th` supplies hole and destination
/// bindings exactly (no weakening).
pub fn check_value(
    th: &Ctx,
    v: &Value,
    expected: &TypeExpr,
    recursion_enabled: bool,
) -> Result<(), TypeError> {
    let mut ck = Checker::new(recursion_enabled);
    for (k, b) in th.iter() {
        if let BindingKey::DestKey(h) = k {
            ck.dest_types.insert(*h, b.ty.clone());
        }
    }
    let mut demand = ck.check_value(v, expected)?;
    ck.flush_deferred()?;
    for (k, b) in th.iter() {
        let kd = demand.remove(k);
        solve_binder(kd, k, b.mode, &b.ty, false, &mut ck.icx, &[])?;
    }
    if let Some((k, _)) = demand.map.iter().next() {
        return Err(TypeError::new(
            super::R_DEST_UNOWNED,
            &[],
            format!("{} has no binding in the supplied context", k),
        ));
    }
    Ok(())
}
