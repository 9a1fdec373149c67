//! Usage demands.
//!
//! Each free binding accumulates a tree of atomic occurrences. A leaf is
//! one use site: variables and destinations start at the coercion lower
//! bound `1v` and may rise (multiplicity freely, age only to `v` or `inf`);
//! holes are exact. Interior nodes record the context arithmetic the rules
//! perform on the route from the occurrence to the binder:
//!
//! - `Mul(s)` for premises whose context is scaled in a conclusion
//!   (argument positions, fill enclaves, exponential boxes);
//! - `DivUp` for premises typed under a scope boundary (the body side of an
//!   update, the structure side of an ampar), where the binding arrives
//!   multiplied by `1^1` — the obligation divides back, and failure to
//!   divide is exactly a scope escape;
//! - `Sum` when two subterms share a binding;
//! - `Branch` when case arms share a context (each arm must route the same
//!   portion; an arm that ignores the binding needs it weakenable).
//!
//! A binder obligation asks: does some choice of leaf modes make the tree
//! evaluate to the declared mode.

use std::collections::BTreeSet;

use crate::context::BindingKey;
use crate::mode::{Age, Mode, Mult, LIN_INF, LIN_NOW, UNR_INF, UNR_NOW};
use crate::syntax::TypeExpr;

use super::unify::InferCtx;
use super::TypeError;
use super::{R_MODE_MISMATCH, R_SCOPE_ESCAPE, R_TYPE_MISMATCH, R_UNUSED_BINDER};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    Coercible,
    Exact(Mode),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemandTree {
    Leaf(Leaf),
    Sum(Vec<DemandTree>),
    Mul(Mode, Box<DemandTree>),
    DivUp(Box<DemandTree>),
    Branch(Vec<Option<DemandTree>>),
}

impl DemandTree {
    pub fn coercible() -> DemandTree {
        DemandTree::Leaf(Leaf::Coercible)
    }

    pub fn exact(m: Mode) -> DemandTree {
        DemandTree::Leaf(Leaf::Exact(m))
    }

    fn count_coercible(&self) -> usize {
        match self {
            DemandTree::Leaf(Leaf::Coercible) => 1,
            DemandTree::Leaf(Leaf::Exact(_)) => 0,
            DemandTree::Sum(ts) => ts.iter().map(|t| t.count_coercible()).sum(),
            DemandTree::Mul(_, t) | DemandTree::DivUp(t) => t.count_coercible(),
            DemandTree::Branch(arms) => arms
                .iter()
                .flatten()
                .map(|t| t.count_coercible())
                .sum(),
        }
    }

    fn eval(&self, choices: &[Mode], idx: &mut usize, div_failed: &mut bool) -> Option<Mode> {
        match self {
            DemandTree::Leaf(Leaf::Coercible) => {
                let m = choices[*idx];
                *idx += 1;
                Some(m)
            }
            DemandTree::Leaf(Leaf::Exact(m)) => Some(*m),
            DemandTree::Sum(ts) => {
                let mut acc: Option<Mode> = None;
                let mut ok = true;
                for t in ts {
                    match t.eval(choices, idx, div_failed) {
                        Some(v) => acc = Some(acc.map_or(v, |a| a.add(v))),
                        None => ok = false,
                    }
                }
                if ok {
                    acc
                } else {
                    None
                }
            }
            DemandTree::Mul(s, t) => t.eval(choices, idx, div_failed).map(|v| s.mul(v)),
            DemandTree::DivUp(t) => match t.eval(choices, idx, div_failed) {
                Some(v) => {
                    let q = v.div_up();
                    if q.is_none() {
                        *div_failed = true;
                    }
                    q
                }
                None => None,
            },
            DemandTree::Branch(arms) => {
                let mut value: Option<Mode> = None;
                let mut any_unused = false;
                let mut ok = true;
                for arm in arms {
                    match arm {
                        None => any_unused = true,
                        Some(t) => match t.eval(choices, idx, div_failed) {
                            None => ok = false,
                            Some(v) => match value {
                                None => value = Some(v),
                                Some(prev) if prev == v => {}
                                Some(_) => ok = false,
                            },
                        },
                    }
                }
                let v = value?;
                if !ok {
                    return None;
                }
                if any_unused && v.mult != Mult::Many {
                    return None;
                }
                Some(v)
            }
        }
    }
}

/// The four modes a coercible leaf can take: `1v <= m` constrains the age
/// to `v` or `inf` and leaves the multiplicity free.
const LEAF_CHOICES: [Mode; 4] = [LIN_NOW, UNR_NOW, LIN_INF, UNR_INF];

const MAX_COERCIBLE: usize = 10;

#[derive(Clone, Debug)]
pub struct SolveFailure {
    /// Some evaluation died dividing an age-`v` demand across a scope
    /// boundary: the telltale sign of a destination escaping its scope.
    pub scope_escape: bool,
    pub achievable: Vec<Mode>,
}

/// Enumerate leaf choices, looking for one that evaluates to `declared`.
pub fn solve(tree: &DemandTree, declared: Mode) -> Result<(), SolveFailure> {
    let n = tree.count_coercible();
    if n > MAX_COERCIBLE {
        return Err(SolveFailure { scope_escape: false, achievable: Vec::new() });
    }
    let mut div_failed = false;
    let mut achievable = BTreeSet::new();
    let total = 4usize.pow(n as u32);
    let mut choices = vec![LIN_NOW; n];
    for mask in 0..total {
        let mut m = mask;
        for slot in choices.iter_mut() {
            *slot = LEAF_CHOICES[m % 4];
            m /= 4;
        }
        let mut idx = 0;
        if let Some(v) = tree.eval(&choices, &mut idx, &mut div_failed) {
            if v == declared {
                return Ok(());
            }
            achievable.insert(v);
        }
    }
    Err(SolveFailure { scope_escape: div_failed, achievable: achievable.into_iter().collect() })
}

/// All root values any choice can produce (used to materialize a provided
/// context from residual demands).
pub fn achievable_modes(tree: &DemandTree) -> Vec<Mode> {
    let n = tree.count_coercible();
    if n > MAX_COERCIBLE {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    let mut div_failed = false;
    let total = 4usize.pow(n as u32);
    let mut choices = vec![LIN_NOW; n];
    for mask in 0..total {
        let mut m = mask;
        for slot in choices.iter_mut() {
            *slot = LEAF_CHOICES[m % 4];
            m /= 4;
        }
        let mut idx = 0;
        if let Some(v) = tree.eval(&choices, &mut idx, &mut div_failed) {
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// Prefer linear over unrestricted and young finite ages over `inf` when a
/// residual demand admits several provided modes.
pub fn minimal_mode(candidates: &[Mode]) -> Option<Mode> {
    candidates
        .iter()
        .copied()
        .min_by_key(|m| {
            let mult_rank = match m.mult {
                Mult::One => 0u32,
                Mult::Many => 1,
            };
            let age_rank = match m.age {
                Age::Fin(k) => k,
                Age::Inf => u32::MAX,
            };
            (mult_rank, age_rank)
        })
}

#[derive(Clone, Debug)]
pub struct KeyDemand {
    pub ty: TypeExpr,
    pub tree: DemandTree,
}

/// Demands per free binding, accumulated bottom-up.
#[derive(Clone, Debug, Default)]
pub struct Demand {
    pub map: std::collections::BTreeMap<BindingKey, KeyDemand>,
}

impl Demand {
    pub fn new() -> Demand {
        Demand::default()
    }

    pub fn single(key: BindingKey, ty: TypeExpr, tree: DemandTree) -> Demand {
        let mut d = Demand::new();
        d.map.insert(key, KeyDemand { ty, tree });
        d
    }

    pub fn remove(&mut self, key: &BindingKey) -> Option<KeyDemand> {
        self.map.remove(key)
    }

    pub fn has_hole_demands(&self) -> bool {
        self.map.keys().any(|k| matches!(k, BindingKey::HoleKey(_)))
    }

    /// `self + other`: shared keys unify their types and join with `Sum`.
    pub fn add(
        mut self,
        other: Demand,
        icx: &mut InferCtx,
        path: &[u32],
    ) -> Result<Demand, TypeError> {
        for (k, kd) in other.map {
            match self.map.remove(&k) {
                None => {
                    self.map.insert(k, kd);
                }
                Some(mine) => {
                    icx.unify(&mine.ty, &kd.ty).map_err(|(a, b)| {
                        TypeError::new(
                            R_TYPE_MISMATCH,
                            path,
                            format!("{} used at both {} and {}", k, icx.deep(&a), icx.deep(&b)),
                        )
                    })?;
                    let tree = match mine.tree {
                        DemandTree::Sum(mut ts) => {
                            ts.push(kd.tree);
                            DemandTree::Sum(ts)
                        }
                        t => DemandTree::Sum(vec![t, kd.tree]),
                    };
                    self.map.insert(k, KeyDemand { ty: mine.ty, tree });
                }
            }
        }
        Ok(self)
    }

    /// Case arms share one context: every key demanded by any arm gets a
    /// `Branch` node with one slot per arm.
    pub fn branch(
        arms: Vec<Demand>,
        icx: &mut InferCtx,
        path: &[u32],
    ) -> Result<Demand, TypeError> {
        let mut keys: BTreeSet<BindingKey> = BTreeSet::new();
        for arm in &arms {
            keys.extend(arm.map.keys().cloned());
        }
        let mut out = Demand::new();
        for key in keys {
            let mut ty: Option<TypeExpr> = None;
            let mut slots = Vec::with_capacity(arms.len());
            for arm in &arms {
                match arm.map.get(&key) {
                    None => slots.push(None),
                    Some(kd) => {
                        if let Some(t0) = &ty {
                            icx.unify(t0, &kd.ty).map_err(|(a, b)| {
                                TypeError::new(
                                    R_TYPE_MISMATCH,
                                    path,
                                    format!(
                                        "{} used at both {} and {}",
                                        key,
                                        icx.deep(&a),
                                        icx.deep(&b)
                                    ),
                                )
                            })?;
                        } else {
                            ty = Some(kd.ty.clone());
                        }
                        slots.push(Some(kd.tree.clone()));
                    }
                }
            }
            out.map.insert(
                key,
                KeyDemand { ty: ty.expect("branch key demanded somewhere"), tree: DemandTree::Branch(slots) },
            );
        }
        Ok(out)
    }

    /// Contribution scaling: the rule multiplies this premise's context by
    /// `s` in its conclusion.
    pub fn scale(mut self, s: Mode) -> Demand {
        if s == LIN_NOW {
            return self;
        }
        for kd in self.map.values_mut() {
            let tree = std::mem::replace(&mut kd.tree, DemandTree::Sum(Vec::new()));
            kd.tree = DemandTree::Mul(s, Box::new(tree));
        }
        self
    }

    /// Exponential scaling of a value demand: destination atoms multiply,
    /// hole atoms have their required mode replaced outright.
    pub fn scale_exp(mut self, n: Mode) -> Demand {
        for (k, kd) in self.map.iter_mut() {
            let tree = std::mem::replace(&mut kd.tree, DemandTree::Sum(Vec::new()));
            kd.tree = match k {
                BindingKey::HoleKey(_) => DemandTree::exact(n),
                _ => {
                    if n == LIN_NOW {
                        tree
                    } else {
                        DemandTree::Mul(n, Box::new(tree))
                    }
                }
            };
        }
        self
    }

    /// View scaling: these demands cross a scope boundary on their way to
    /// their binders.
    pub fn div_up(mut self) -> Demand {
        for kd in self.map.values_mut() {
            let tree = std::mem::replace(&mut kd.tree, DemandTree::Sum(Vec::new()));
            kd.tree = DemandTree::DivUp(Box::new(tree));
        }
        self
    }
}

/// Solve one binder (or root binding) obligation.
pub fn solve_binder(
    demand: Option<KeyDemand>,
    key: &BindingKey,
    declared_mode: Mode,
    declared_ty: &TypeExpr,
    weakening_allowed: bool,
    icx: &mut InferCtx,
    path: &[u32],
) -> Result<(), TypeError> {
    match demand {
        None => {
            if weakening_allowed && declared_mode.mult == Mult::Many {
                Ok(())
            } else {
                Err(TypeError::new(
                    R_UNUSED_BINDER,
                    path,
                    format!(
                        "{} is unused but its mode {} is not weakenable",
                        key, declared_mode
                    ),
                ))
            }
        }
        Some(kd) => {
            icx.unify(&kd.ty, declared_ty).map_err(|(a, b)| {
                TypeError::new(
                    R_TYPE_MISMATCH,
                    path,
                    format!(
                        "{} declared at {} but used at {}",
                        key,
                        icx.deep(&b),
                        icx.deep(&a)
                    ),
                )
            })?;
            solve(&kd.tree, declared_mode).map_err(|fail| {
                let rule = if fail.scope_escape { R_SCOPE_ESCAPE } else { R_MODE_MISMATCH };
                let achievable = if fail.achievable.is_empty() {
                    "none".to_string()
                } else {
                    fail.achievable
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                TypeError::new(
                    rule,
                    path,
                    format!(
                        "{} declared at mode {} but its uses demand {}",
                        key, declared_mode, achievable
                    ),
                )
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_linear_uses_demand_unrestricted() {
        let tree = DemandTree::Sum(vec![DemandTree::coercible(), DemandTree::coercible()]);
        assert!(solve(&tree, UNR_NOW).is_ok());
        assert!(solve(&tree, LIN_NOW).is_err());
    }

    #[test]
    fn single_use_coerces_up_but_not_to_finite_age() {
        let tree = DemandTree::coercible();
        assert!(solve(&tree, LIN_NOW).is_ok());
        assert!(solve(&tree, UNR_INF).is_ok());
        assert!(solve(&tree, crate::mode::LIN_UP).is_err());
    }

    #[test]
    fn enclave_cancels_scope_boundary() {
        // A fill enclave multiplies by 1^1, the update boundary divides it
        // back out: a 1v binder works.
        let tree = DemandTree::DivUp(Box::new(DemandTree::Mul(
            crate::mode::LIN_UP,
            Box::new(DemandTree::coercible()),
        )));
        assert!(solve(&tree, LIN_NOW).is_ok());
    }

    #[test]
    fn bare_use_across_boundary_escapes() {
        let tree = DemandTree::DivUp(Box::new(DemandTree::coercible()));
        let err = solve(&tree, LIN_NOW).unwrap_err();
        assert!(err.scope_escape);
        // An age-inf binder is fine across any boundary.
        assert!(solve(&tree, LIN_INF).is_ok());
    }

    #[test]
    fn branch_arms_must_agree() {
        let both = DemandTree::Branch(vec![
            Some(DemandTree::coercible()),
            Some(DemandTree::coercible()),
        ]);
        assert!(solve(&both, LIN_NOW).is_ok());
        let one_side = DemandTree::Branch(vec![Some(DemandTree::coercible()), None]);
        assert!(solve(&one_side, LIN_NOW).is_err());
        assert!(solve(&one_side, UNR_NOW).is_ok());
    }

    #[test]
    fn exact_hole_leaf() {
        let tree = DemandTree::exact(LIN_NOW);
        assert!(solve(&tree, LIN_NOW).is_ok());
        assert!(solve(&tree, UNR_NOW).is_err());
    }
}
