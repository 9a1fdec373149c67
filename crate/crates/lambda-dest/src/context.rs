//! Typing contexts with three binding forms: variables, destinations, and
//! holes. Contexts add partially (same key needs same kind and type) and
//! scale, with the hole form scaled by replacement rather than
//! multiplication.

use std::collections::BTreeMap;
use std::fmt;

use crate::mode::{Mode, Mult, LIN_NOW};
use crate::syntax::{HoleName, HoleSet, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BindingKey {
    VarKey(String),
    DestKey(HoleName),
    HoleKey(HoleName),
}

impl fmt::Display for BindingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingKey::VarKey(x) => write!(f, "{}", x),
            BindingKey::DestKey(h) => write!(f, "->{}", h),
            BindingKey::HoleKey(h) => write!(f, "[]{}", h),
        }
    }
}

/// For `DestKey` bindings the type is the full destination type `[n T]`;
/// scaling touches the binding mode only, never the pointee mode inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub mode: Mode,
    pub ty: TypeExpr,
}

/// Context class: `Delta` holds destinations only, `Gamma` destinations and
/// variables, `Theta` destinations and holes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CtxClass {
    Delta,
    Gamma,
    Theta,
}

impl CtxClass {
    fn admits(self, key: &BindingKey) -> bool {
        match (self, key) {
            (_, BindingKey::DestKey(_)) => true,
            (CtxClass::Gamma, BindingKey::VarKey(_)) => true,
            (CtxClass::Theta, BindingKey::HoleKey(_)) => true,
            _ => false,
        }
    }

    fn join(self, other: CtxClass) -> Option<CtxClass> {
        match (self, other) {
            (a, b) if a == b => Some(a),
            (CtxClass::Delta, c) | (c, CtxClass::Delta) => Some(c),
            // Gamma and Theta are incomparable: variables and holes never mix.
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub class: CtxClass,
    map: BTreeMap<BindingKey, Binding>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtxError {
    /// Same key bound at two different types.
    TypeClash(BindingKey),
    /// One side binds `->h`, the other `[]h`.
    KindClash(HoleName),
    /// Binding form not allowed by the context class.
    ClassViolation(BindingKey),
    /// Gamma + Theta has no common class.
    ClassJoin,
    /// `holes_from_dests` hit a destination binding with mode other than 1v.
    NonUnitDest(HoleName, Mode),
}

impl fmt::Display for CtxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxError::TypeClash(k) => write!(f, "binding {} added at two different types", k),
            CtxError::KindClash(h) => {
                write!(f, "hole name {} bound both as a destination and as a hole", h)
            }
            CtxError::ClassViolation(k) => write!(f, "binding {} not allowed in this context class", k),
            CtxError::ClassJoin => write!(f, "cannot mix variable and hole bindings"),
            CtxError::NonUnitDest(h, m) => {
                write!(f, "destination ->{} has mode {} where 1v is required", h, m)
            }
        }
    }
}

impl Ctx {
    pub fn new(class: CtxClass) -> Ctx {
        Ctx { class, map: BTreeMap::new() }
    }

    pub fn empty_delta() -> Ctx {
        Ctx::new(CtxClass::Delta)
    }
    pub fn empty_gamma() -> Ctx {
        Ctx::new(CtxClass::Gamma)
    }
    pub fn empty_theta() -> Ctx {
        Ctx::new(CtxClass::Theta)
    }

    pub fn bind(mut self, key: BindingKey, mode: Mode, ty: TypeExpr) -> Result<Ctx, CtxError> {
        if !self.class.admits(&key) {
            return Err(CtxError::ClassViolation(key));
        }
        if let Some(clash) = self.kind_clash(&key) {
            return Err(CtxError::KindClash(clash));
        }
        self.map.insert(key, Binding { mode, ty });
        Ok(self)
    }

    fn kind_clash(&self, key: &BindingKey) -> Option<HoleName> {
        let h = match key {
            BindingKey::DestKey(h) => *h,
            BindingKey::HoleKey(h) => *h,
            BindingKey::VarKey(_) => return None,
        };
        let other = match key {
            BindingKey::DestKey(_) => BindingKey::HoleKey(h),
            _ => BindingKey::DestKey(h),
        };
        if self.map.contains_key(&other) {
            Some(h)
        } else {
            None
        }
    }

    pub fn get(&self, key: &BindingKey) -> Option<&Binding> {
        self.map.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BindingKey, &Binding)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Partial context addition: disjoint keys union, shared keys need the
    /// same kind and a structurally equal type; their modes add.
    pub fn add(&self, other: &Ctx) -> Result<Ctx, CtxError> {
        let class = self.class.join(other.class).ok_or(CtxError::ClassJoin)?;
        let mut out = Ctx::new(class);
        for (k, b) in self.map.iter().chain(other.map.iter()) {
            if let Some(clash) = out.kind_clash(k) {
                return Err(CtxError::KindClash(clash));
            }
            match out.map.get_mut(k) {
                None => {
                    out.map.insert(k.clone(), b.clone());
                }
                Some(existing) => {
                    if !crate::typecheck::unify::types_equal(&existing.ty, &b.ty) {
                        return Err(CtxError::TypeClash(k.clone()));
                    }
                    existing.mode = existing.mode.add(b.mode);
                }
            }
        }
        Ok(out)
    }

    /// Scale every binding by `n` on the left. Hole bindings take mode `n`
    /// outright (the replacement form the extended scaling rule uses);
    /// variable and destination bindings multiply, and a destination's
    /// pointee mode inside `[n T]` is untouched.
    pub fn scale(&self, n: Mode) -> Ctx {
        let mut out = Ctx::new(self.class);
        for (k, b) in self.map.iter() {
            let mode = match k {
                BindingKey::HoleKey(_) => n,
                _ => n.mul(b.mode),
            };
            out.map.insert(k.clone(), Binding { mode, ty: b.ty.clone() });
        }
        out
    }

    /// True iff every binding is weakenable (multiplicity w).
    pub fn disposable_only(&self) -> bool {
        self.map.values().all(|b| b.mode.mult == Mult::Many)
    }

    /// Turn a destination-only context into the matching hole context:
    /// each `->h : 1v [n T]` becomes `[]h : n T`. Undefined as soon as a
    /// destination binding has mode other than 1v.
    pub fn holes_from_dests(&self) -> Result<Ctx, CtxError> {
        let mut out = Ctx::new(CtxClass::Theta);
        for (k, b) in self.map.iter() {
            match k {
                BindingKey::DestKey(h) => {
                    if b.mode != LIN_NOW {
                        return Err(CtxError::NonUnitDest(*h, b.mode));
                    }
                    match &b.ty {
                        TypeExpr::Dest(n, inner) => {
                            out.map.insert(
                                BindingKey::HoleKey(*h),
                                Binding { mode: *n, ty: (**inner).clone() },
                            );
                        }
                        _ => return Err(CtxError::TypeClash(k.clone())),
                    }
                }
                _ => return Err(CtxError::ClassViolation(k.clone())),
            }
        }
        Ok(out)
    }

    pub fn hole_names(&self) -> HoleSet {
        self.map
            .keys()
            .filter_map(|k| match k {
                BindingKey::DestKey(h) | BindingKey::HoleKey(h) => Some(*h),
                BindingKey::VarKey(_) => None,
            })
            .collect()
    }

    /// Debug rendering used in diagnostics: bindings sorted by key,
    /// `x :m T, ->h :m [n T], []h :n T`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (k, b) in self.map.iter() {
            parts.push(format!("{} :{} {}", k, b.mode, b.ty));
        }
        parts.join(", ")
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{LIN_NOW, LIN_UP, UNR_INF, UNR_NOW};
    use crate::syntax::TypeExpr;

    fn var(x: &str, m: Mode, ty: TypeExpr) -> Ctx {
        Ctx::empty_gamma().bind(BindingKey::VarKey(x.into()), m, ty).unwrap()
    }

    #[test]
    fn add_same_var_adds_modes() {
        let a = var("x", LIN_NOW, TypeExpr::Unit);
        let b = var("x", LIN_NOW, TypeExpr::Unit);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.get(&BindingKey::VarKey("x".into())).unwrap().mode, UNR_NOW);
    }

    #[test]
    fn add_disjoint_unions() {
        let a = var("x", LIN_NOW, TypeExpr::Unit);
        let b = var("y", LIN_NOW, TypeExpr::Unit);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.len(), 2);
    }

    #[test]
    fn add_dest_hole_clash_is_undefined() {
        let a = Ctx::empty_theta()
            .bind(BindingKey::HoleKey(3), LIN_NOW, TypeExpr::Unit)
            .unwrap();
        let b = Ctx::empty_theta()
            .bind(
                BindingKey::DestKey(3),
                LIN_NOW,
                TypeExpr::dest(LIN_NOW, TypeExpr::Unit),
            )
            .unwrap();
        assert_eq!(a.add(&b), Err(CtxError::KindClash(3)));
    }

    #[test]
    fn scale_var_multiplies() {
        let a = var("x", LIN_NOW, TypeExpr::Unit);
        let scaled = a.scale(LIN_UP);
        assert_eq!(scaled.get(&BindingKey::VarKey("x".into())).unwrap().mode, LIN_UP);
    }

    #[test]
    fn scale_dest_keeps_pointee_mode() {
        let a = Ctx::empty_delta()
            .bind(
                BindingKey::DestKey(2),
                LIN_NOW,
                TypeExpr::dest(LIN_NOW, TypeExpr::Unit),
            )
            .unwrap();
        let scaled = a.scale(UNR_INF);
        let b = scaled.get(&BindingKey::DestKey(2)).unwrap();
        assert_eq!(b.mode, UNR_INF);
        assert_eq!(b.ty, TypeExpr::dest(LIN_NOW, TypeExpr::Unit));
    }

    #[test]
    fn scale_hole_replaces() {
        let a = Ctx::empty_theta()
            .bind(BindingKey::HoleKey(1), LIN_UP, TypeExpr::Unit)
            .unwrap();
        let scaled = a.scale(UNR_INF);
        assert_eq!(scaled.get(&BindingKey::HoleKey(1)).unwrap().mode, UNR_INF);
    }

    #[test]
    fn scale_by_unit_is_identity() {
        let a = var("x", UNR_INF, TypeExpr::Unit);
        assert_eq!(a.scale(LIN_NOW), a);
    }

    #[test]
    fn disposable() {
        assert!(Ctx::empty_gamma().disposable_only());
        assert!(var("x", UNR_INF, TypeExpr::Unit).disposable_only());
        assert!(!var("x", LIN_NOW, TypeExpr::Unit).disposable_only());
    }

    #[test]
    fn holes_from_dests_examples() {
        assert_eq!(
            Ctx::empty_delta().holes_from_dests().unwrap(),
            Ctx::empty_theta()
        );
        let d = Ctx::empty_delta()
            .bind(
                BindingKey::DestKey(4),
                LIN_NOW,
                TypeExpr::dest(UNR_INF, TypeExpr::Unit),
            )
            .unwrap();
        let th = d.holes_from_dests().unwrap();
        let b = th.get(&BindingKey::HoleKey(4)).unwrap();
        assert_eq!(b.mode, UNR_INF);
        assert_eq!(b.ty, TypeExpr::Unit);

        let bad = Ctx::empty_delta()
            .bind(
                BindingKey::DestKey(4),
                UNR_NOW,
                TypeExpr::dest(LIN_NOW, TypeExpr::Unit),
            )
            .unwrap();
        assert!(matches!(bad.holes_from_dests(), Err(CtxError::NonUnitDest(4, _))));
    }

    #[test]
    fn add_distributes_under_var_dest_scaling() {
        // n * (a + b) == n*a + n*b for hole-free contexts.
        let universe = crate::mode::mode_universe(3);
        for &n in &universe {
            for &ma in &universe {
                for &mb in &universe {
                    let a = var("x", ma, TypeExpr::Unit);
                    let b = var("x", mb, TypeExpr::Unit);
                    let lhs = a.add(&b).unwrap().scale(n);
                    let rhs = a.scale(n).add(&b.scale(n)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
