//! The small-step machine over commands `E[t]`.
//!
//! A command pairs a stack of focusing components (outermost first) with a
//! focused term. Dispatch is deterministic: a non-value focus either is a
//! redex (reduction fires) or has a designated non-value subterm (a focus
//! rule pushes a component); a value focus closes the innermost open ampar
//! or pops one component back into term form. Fresh hole names come from
//! the max-plus-one arithmetic over the names visible in the command.

use std::fmt;

use crate::mode::{Mode, LIN_INF};
use crate::syntax::{
    shift_all, subst_term, subst_var, HasHoleNames, HoleName, HoleSet, ShiftNames, Term, Value,
};

#[derive(Clone, Debug, PartialEq)]
pub enum FocusComponent {
    /// `t' []` — evaluating the argument, function term pending
    AppL(Term),
    /// `[] v` — evaluating the function, argument already a value
    AppR(Value),
    /// `[] ; u`
    SeqF(Term),
    CaseSumF(Mode, String, Term, String, Term),
    CaseProdF(Mode, String, String, Term),
    CaseExpF(Mode, Mode, String, Term),
    /// `upd [] with x -> t'`
    UpdF(String, Term),
    ToF,
    FromF,
    FillUnitF,
    FillInlF,
    FillInrF,
    FillProdF,
    FillExpF(Mode),
    FillFunF(String, Mode, Term),
    /// `[] <o> t'`
    FillCompL(Term),
    /// `v <o> []`
    FillCompR(Value),
    /// `[] <! t'`
    FillLeafL(Term),
    /// `v <! []`
    FillLeafR(Value),
    /// `op H< v2 /\ [] >` — an ampar opened by upd, structure attached,
    /// with the structure type carried along for re-checking
    OpenAmpar(HoleSet, Value, Option<Box<crate::syntax::TypeExpr>>),
}

/// Stack of focusing components, outermost first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EvaluationContext {
    pub stack: Vec<FocusComponent>,
}

impl EvaluationContext {
    pub fn empty() -> EvaluationContext {
        EvaluationContext::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub ctx: EvaluationContext,
    pub focus: Term,
}

impl Command {
    pub fn initial(t: Term) -> Command {
        Command { ctx: EvaluationContext::empty(), focus: t }
    }

    pub fn is_terminal(&self) -> bool {
        self.ctx.stack.is_empty() && self.focus.is_value()
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Next(&'static str, Command),
    Terminal(Value),
    Stuck(String),
}

impl HasHoleNames for FocusComponent {
    fn collect_hnames(&self, acc: &mut HoleSet) {
        match self {
            FocusComponent::AppL(t)
            | FocusComponent::SeqF(t)
            | FocusComponent::UpdF(_, t)
            | FocusComponent::FillFunF(_, _, t)
            | FocusComponent::FillCompL(t)
            | FocusComponent::FillLeafL(t) => t.collect_hnames(acc),
            FocusComponent::AppR(v)
            | FocusComponent::FillCompR(v)
            | FocusComponent::FillLeafR(v) => v.collect_hnames(acc),
            FocusComponent::CaseSumF(_, _, u1, _, u2) => {
                u1.collect_hnames(acc);
                u2.collect_hnames(acc);
            }
            FocusComponent::CaseProdF(_, _, _, u) | FocusComponent::CaseExpF(_, _, _, u) => {
                u.collect_hnames(acc)
            }
            FocusComponent::ToF
            | FocusComponent::FromF
            | FocusComponent::FillUnitF
            | FocusComponent::FillInlF
            | FocusComponent::FillInrF
            | FocusComponent::FillProdF
            | FocusComponent::FillExpF(_) => {}
            FocusComponent::OpenAmpar(set, v2, _) => {
                // Open ampars do not bind: their names are live in the command.
                acc.extend(set.iter().copied());
                v2.collect_hnames(acc);
            }
        }
    }
}

impl HasHoleNames for EvaluationContext {
    fn collect_hnames(&self, acc: &mut HoleSet) {
        for c in &self.stack {
            c.collect_hnames(acc);
        }
    }
}

impl HasHoleNames for Command {
    fn collect_hnames(&self, acc: &mut HoleSet) {
        self.ctx.collect_hnames(acc);
        self.focus.collect_hnames(acc);
    }
}

fn max_name(set: &HoleSet) -> HoleName {
    set.iter().next_back().copied().unwrap_or(0)
}

/// Replace hole `h` (owned by exactly one open ampar in the stack) with
/// `v`, removing `h` from the owner's name set and adding `new_names`.
pub fn hole_substitute(
    ctx: &EvaluationContext,
    h: HoleName,
    new_names: &HoleSet,
    v: &Value,
) -> Result<EvaluationContext, String> {
    let mut out = ctx.clone();
    for comp in out.stack.iter_mut().rev() {
        if let FocusComponent::OpenAmpar(set, v2, _) = comp {
            if set.contains(&h) {
                let filled = fill_hole(v2, h, v);
                if !filled.1 {
                    return Err(format!(
                        "open ampar owns name {} but its structure has no hole []{}",
                        h, h
                    ));
                }
                *v2 = filled.0;
                set.remove(&h);
                set.extend(new_names.iter().copied());
                return Ok(out);
            }
        }
    }
    Err(format!("no open ampar owns hole name {}", h))
}

fn fill_hole(v: &Value, h: HoleName, repl: &Value) -> (Value, bool) {
    match v {
        Value::Hole(h0) if *h0 == h => (repl.clone(), true),
        Value::Hole(h0) => (Value::Hole(*h0), false),
        Value::DestV(h0) => (Value::DestV(*h0), false),
        Value::AmparV(bound, v2, v1, tag) => {
            if bound.contains(&h) {
                (v.clone(), false)
            } else {
                let (a, fa) = fill_hole(v2, h, repl);
                let (b, fb) = fill_hole(v1, h, repl);
                (Value::ampar_tagged(bound.clone(), a, b, tag.clone()), fa || fb)
            }
        }
        Value::UnitV => (Value::UnitV, false),
        Value::Fun(x, m, body) => (Value::Fun(x.clone(), *m, body.clone()), false),
        Value::InlV(a) => {
            let (a, f) = fill_hole(a, h, repl);
            (Value::InlV(Box::new(a)), f)
        }
        Value::InrV(a) => {
            let (a, f) = fill_hole(a, h, repl);
            (Value::InrV(Box::new(a)), f)
        }
        Value::ModV(m, a) => {
            let (a, f) = fill_hole(a, h, repl);
            (Value::ModV(*m, Box::new(a)), f)
        }
        Value::PairV(a, b) => {
            let (a, fa) = fill_hole(a, h, repl);
            let (b, fb) = fill_hole(b, h, repl);
            (Value::pair(a, b), fa || fb)
        }
    }
}

fn as_value(t: &Term) -> Option<&Value> {
    match t {
        Term::Val(v) => Some(v),
        _ => None,
    }
}

/// One deterministic step.
pub fn step(c: &Command) -> StepOutcome {
    if let Term::Val(v) = &c.focus {
        return step_value(c, v);
    }
    step_term(c)
}

fn step_value(c: &Command, v: &Value) -> StepOutcome {
    let mut ctx = c.ctx.clone();
    let comp = match ctx.stack.pop() {
        None => return StepOutcome::Terminal(v.clone()),
        Some(comp) => comp,
    };
    let v = v.clone();
    let (rule, focus) = match comp {
        FocusComponent::OpenAmpar(set, v2, tag) => {
            ("AMPAR-CLOSE", Term::Val(Value::ampar_tagged(set, v2, v, tag)))
        }
        FocusComponent::AppL(f) => ("APP-UNFOCUS1", Term::app(f, Term::Val(v))),
        FocusComponent::AppR(arg) => {
            ("APP-UNFOCUS2", Term::app(Term::Val(v), Term::Val(arg)))
        }
        FocusComponent::SeqF(u) => ("PATU-UNFOCUS", Term::seq(Term::Val(v), u)),
        FocusComponent::CaseSumF(m, x1, u1, x2, u2) => (
            "PATS-UNFOCUS",
            Term::CaseSum(m, Box::new(Term::Val(v)), x1, Box::new(u1), x2, Box::new(u2)),
        ),
        FocusComponent::CaseProdF(m, x1, x2, u) => (
            "PATP-UNFOCUS",
            Term::CaseProd(m, Box::new(Term::Val(v)), x1, x2, Box::new(u)),
        ),
        FocusComponent::CaseExpF(m, n, x, u) => (
            "PATE-UNFOCUS",
            Term::CaseExp(m, n, Box::new(Term::Val(v)), x, Box::new(u)),
        ),
        FocusComponent::UpdF(x, t1) => (
            "UPDA-UNFOCUS",
            Term::UpdAmpar(Box::new(Term::Val(v)), x, Box::new(t1)),
        ),
        FocusComponent::ToF => ("TOA-UNFOCUS", Term::ToAmpar(Box::new(Term::Val(v)))),
        FocusComponent::FromF => ("FROMA-UNFOCUS", Term::FromAmpar(Box::new(Term::Val(v)))),
        FocusComponent::FillUnitF => ("FILLU-UNFOCUS", Term::FillUnit(Box::new(Term::Val(v)))),
        FocusComponent::FillInlF => ("FILLL-UNFOCUS", Term::FillInl(Box::new(Term::Val(v)))),
        FocusComponent::FillInrF => ("FILLR-UNFOCUS", Term::FillInr(Box::new(Term::Val(v)))),
        FocusComponent::FillProdF => ("FILLP-UNFOCUS", Term::FillProd(Box::new(Term::Val(v)))),
        FocusComponent::FillExpF(m) => {
            ("FILLE-UNFOCUS", Term::FillExp(m, Box::new(Term::Val(v))))
        }
        FocusComponent::FillFunF(x, m, u) => (
            "FILLF-UNFOCUS",
            Term::FillFun(Box::new(Term::Val(v)), x, m, Box::new(u)),
        ),
        FocusComponent::FillCompL(t1) => (
            "FILLCOMP-UNFOCUS1",
            Term::FillComp(Box::new(Term::Val(v)), Box::new(t1)),
        ),
        FocusComponent::FillCompR(vd) => (
            "FILLCOMP-UNFOCUS2",
            Term::FillComp(Box::new(Term::Val(vd)), Box::new(Term::Val(v))),
        ),
        FocusComponent::FillLeafL(t1) => (
            "FILLLEAF-UNFOCUS1",
            Term::FillLeaf(Box::new(Term::Val(v)), Box::new(t1)),
        ),
        FocusComponent::FillLeafR(vd) => (
            "FILLLEAF-UNFOCUS2",
            Term::FillLeaf(Box::new(Term::Val(vd)), Box::new(Term::Val(v))),
        ),
    };
    StepOutcome::Next(rule, Command { ctx, focus })
}

fn step_term(c: &Command) -> StepOutcome {
    let ctx = &c.ctx;
    let push = |comp: FocusComponent, focus: Term, rule: &'static str| {
        let mut ctx = ctx.clone();
        ctx.stack.push(comp);
        StepOutcome::Next(rule, Command { ctx, focus })
    };
    let keep = |focus: Term, rule: &'static str| {
        StepOutcome::Next(rule, Command { ctx: ctx.clone(), focus })
    };
    let stuck = |what: &str, t: &Term| {
        StepOutcome::Stuck(format!("{}: {}", what, t))
    };

    match &c.focus {
        Term::Val(_) => unreachable!("value focus handled by step_value"),
        Term::Var(x) => StepOutcome::Stuck(format!("unsubstituted variable `{}`", x)),
        Term::App(f, a) => match (as_value(f), as_value(a)) {
            (_, None) => push(FocusComponent::AppL((**f).clone()), (**a).clone(), "APP-FOCUS1"),
            (None, Some(av)) => {
                push(FocusComponent::AppR(av.clone()), (**f).clone(), "APP-FOCUS2")
            }
            (Some(Value::Fun(x, _, body)), Some(av)) => {
                keep(subst_var(body, x, av), "APP-RED")
            }
            (Some(_), Some(_)) => stuck("application of a non-function", &c.focus),
        },
        Term::Seq(t, u) => match as_value(t) {
            None => push(FocusComponent::SeqF((**u).clone()), (**t).clone(), "PATU-FOCUS"),
            Some(Value::UnitV) => keep((**u).clone(), "PATU-RED"),
            Some(_) => stuck("sequencing a non-unit", &c.focus),
        },
        Term::CaseSum(m, t, x1, u1, x2, u2) => match as_value(t) {
            None => push(
                FocusComponent::CaseSumF(*m, x1.clone(), (**u1).clone(), x2.clone(), (**u2).clone()),
                (**t).clone(),
                "PATS-FOCUS",
            ),
            Some(Value::InlV(v1)) => keep(subst_var(u1, x1, v1), "PATL-RED"),
            Some(Value::InrV(v2)) => keep(subst_var(u2, x2, v2), "PATR-RED"),
            Some(_) => stuck("sum case on a non-sum value", &c.focus),
        },
        Term::CaseProd(m, t, x1, x2, u) => match as_value(t) {
            None => push(
                FocusComponent::CaseProdF(*m, x1.clone(), x2.clone(), (**u).clone()),
                (**t).clone(),
                "PATP-FOCUS",
            ),
            Some(Value::PairV(v1, v2)) => {
                keep(subst_var(&subst_var(u, x1, v1), x2, v2), "PATP-RED")
            }
            Some(_) => stuck("pair case on a non-pair value", &c.focus),
        },
        Term::CaseExp(m, n, t, x, u) => match as_value(t) {
            None => push(
                FocusComponent::CaseExpF(*m, *n, x.clone(), (**u).clone()),
                (**t).clone(),
                "PATE-FOCUS",
            ),
            Some(Value::ModV(n2, v)) if n2 == n => keep(subst_var(u, x, v), "PATE-RED"),
            Some(_) => stuck("exponential case mismatch", &c.focus),
        },
        Term::UpdAmpar(t, x, t1) => match as_value(t) {
            None => push(
                FocusComponent::UpdF(x.clone(), (**t1).clone()),
                (**t).clone(),
                "UPDA-FOCUS",
            ),
            Some(Value::AmparV(set, v2, v1, tag)) => {
                let mut live = ctx.hnames();
                live.extend(set.iter().copied());
                let shift = max_name(&live) + 1;
                let new_set = shift_all(set, shift);
                let v2s = v2.shift_names(set, shift);
                let v1s = v1.shift_names(set, shift);
                let mut ctx = ctx.clone();
                ctx.stack
                    .push(FocusComponent::OpenAmpar(new_set, v2s, tag.clone()));
                let focus = subst_var(t1, x, &v1s);
                StepOutcome::Next("AMPAR-OPEN", Command { ctx, focus })
            }
            Some(_) => stuck("update of a non-ampar value", &c.focus),
        },
        Term::ToAmpar(t) => match as_value(t) {
            None => push(FocusComponent::ToF, (**t).clone(), "TOA-FOCUS"),
            Some(v2) => keep(
                Term::Val(Value::ampar(HoleSet::new(), v2.clone(), Value::UnitV)),
                "TOA-RED",
            ),
        },
        Term::FromAmpar(t) => match as_value(t) {
            None => push(FocusComponent::FromF, (**t).clone(), "FROMA-FOCUS"),
            Some(Value::AmparV(set, v2, v1, _)) => {
                if !set.is_empty() {
                    return stuck("reading an ampar that still has holes", &c.focus);
                }
                match &**v1 {
                    Value::ModV(m, inner) if *m == LIN_INF => keep(
                        Term::Val(Value::pair(
                            (**v2).clone(),
                            Value::ModV(*m, inner.clone()),
                        )),
                        "FROMA-RED",
                    ),
                    _ => stuck("ampar right side is not a 1inf exponential", &c.focus),
                }
            }
            Some(_) => stuck("reading a non-ampar value", &c.focus),
        },
        Term::NewAmpar(asc) => {
            let one: HoleSet = [1].into_iter().collect();
            // The structure type from the ascription rides along as the
            // checker tag; with `T >< [T]` the left side is the left arm.
            let tag = asc.as_ref().and_then(|t| match &**t {
                crate::syntax::TypeExpr::Ampar(left, _) => Some(left.clone()),
                _ => None,
            });
            keep(
                Term::Val(Value::ampar_tagged(one, Value::Hole(1), Value::DestV(1), tag)),
                "NEWA-RED",
            )
        }
        Term::FillUnit(t) => match as_value(t) {
            None => push(FocusComponent::FillUnitF, (**t).clone(), "FILLU-FOCUS"),
            Some(Value::DestV(h)) => fill_simple(c, *h, Value::UnitV, Value::UnitV, "FILLU-RED"),
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillInl(t) => match as_value(t) {
            None => push(FocusComponent::FillInlF, (**t).clone(), "FILLL-FOCUS"),
            Some(Value::DestV(h)) => fill_hollow_one(c, *h, Value::InlV, "FILLL-RED"),
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillInr(t) => match as_value(t) {
            None => push(FocusComponent::FillInrF, (**t).clone(), "FILLR-FOCUS"),
            Some(Value::DestV(h)) => fill_hollow_one(c, *h, Value::InrV, "FILLR-RED"),
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillExp(m, t) => match as_value(t) {
            None => push(FocusComponent::FillExpF(*m), (**t).clone(), "FILLE-FOCUS"),
            Some(Value::DestV(h)) => {
                let m = *m;
                fill_hollow_one(c, *h, move |inner| Value::ModV(m, inner), "FILLE-RED")
            }
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillProd(t) => match as_value(t) {
            None => push(FocusComponent::FillProdF, (**t).clone(), "FILLP-FOCUS"),
            Some(Value::DestV(h)) => {
                let h = *h;
                let base = max_name(&{
                    let mut s = c.ctx.hnames();
                    s.insert(h);
                    s
                }) + 1;
                let (h1, h2) = (base + 1, base + 2);
                let new_names: HoleSet = [h1, h2].into_iter().collect();
                let hollow = Value::pair(Value::Hole(h1), Value::Hole(h2));
                match hole_substitute(&c.ctx, h, &new_names, &hollow) {
                    Ok(ctx) => StepOutcome::Next(
                        "FILLP-RED",
                        Command {
                            ctx,
                            focus: Term::Val(Value::pair(Value::DestV(h1), Value::DestV(h2))),
                        },
                    ),
                    Err(e) => StepOutcome::Stuck(e),
                }
            }
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillFun(t, x, m, u) => match as_value(t) {
            None => push(
                FocusComponent::FillFunF(x.clone(), *m, (**u).clone()),
                (**t).clone(),
                "FILLF-FOCUS",
            ),
            Some(Value::DestV(h)) => {
                let fun = Value::Fun(x.clone(), *m, u.clone());
                fill_simple(c, *h, fun, Value::UnitV, "FILLF-RED")
            }
            Some(_) => stuck("filling a non-destination", &c.focus),
        },
        Term::FillComp(t, t1) => match (as_value(t), as_value(t1)) {
            (None, _) => push(
                FocusComponent::FillCompL((**t1).clone()),
                (**t).clone(),
                "FILLCOMP-FOCUS1",
            ),
            (Some(vd), None) => push(
                FocusComponent::FillCompR(vd.clone()),
                (**t1).clone(),
                "FILLCOMP-FOCUS2",
            ),
            (Some(Value::DestV(h)), Some(Value::AmparV(set, v2, v1, _))) => {
                let h = *h;
                let mut live = c.ctx.hnames();
                live.insert(h);
                live.extend(set.iter().copied());
                let shift = max_name(&live) + 1;
                let new_names = shift_all(set, shift);
                let v2s = v2.shift_names(set, shift);
                let v1s = v1.shift_names(set, shift);
                match hole_substitute(&c.ctx, h, &new_names, &v2s) {
                    Ok(ctx) => StepOutcome::Next(
                        "FILLCOMP-RED",
                        Command { ctx, focus: Term::Val(v1s) },
                    ),
                    Err(e) => StepOutcome::Stuck(e),
                }
            }
            (Some(_), Some(_)) => stuck("composing a non-ampar into a hole", &c.focus),
        },
        Term::FillLeaf(t, t1) => match (as_value(t), as_value(t1)) {
            (None, _) => push(
                FocusComponent::FillLeafL((**t1).clone()),
                (**t).clone(),
                "FILLLEAF-FOCUS1",
            ),
            (Some(vd), None) => push(
                FocusComponent::FillLeafR(vd.clone()),
                (**t1).clone(),
                "FILLLEAF-FOCUS2",
            ),
            (Some(Value::DestV(h)), Some(v)) => {
                fill_simple(c, *h, v.clone(), Value::UnitV, "FILLLEAF-RED")
            }
            (Some(_), Some(_)) => stuck("filling a non-destination", &c.focus),
        },
        Term::Fix(x, m, body) => {
            let unfolding = subst_term(body, x, &Term::Fix(x.clone(), *m, body.clone()));
            keep(unfolding, "FIX-RED")
        }
    }
}

/// Fills that introduce no new holes.
fn fill_simple(
    c: &Command,
    h: HoleName,
    written: Value,
    result: Value,
    rule: &'static str,
) -> StepOutcome {
    match hole_substitute(&c.ctx, h, &HoleSet::new(), &written) {
        Ok(ctx) => StepOutcome::Next(rule, Command { ctx, focus: Term::Val(result) }),
        Err(e) => StepOutcome::Stuck(e),
    }
}

/// Hollow constructors with one new hole: the fresh name is h'+1 where
/// h' = max(hnames(E) + h) + 1, exactly as the rules write it.
fn fill_hollow_one(
    c: &Command,
    h: HoleName,
    wrap: impl FnOnce(Box<Value>) -> Value,
    rule: &'static str,
) -> StepOutcome {
    let mut live = c.ctx.hnames();
    live.insert(h);
    let base = max_name(&live) + 1;
    let fresh = base + 1;
    let new_names: HoleSet = [fresh].into_iter().collect();
    let hollow = wrap(Box::new(Value::Hole(fresh)));
    match hole_substitute(&c.ctx, h, &new_names, &hollow) {
        Ok(ctx) => {
            StepOutcome::Next(rule, Command { ctx, focus: Term::Val(Value::DestV(fresh)) })
        }
        Err(e) => StepOutcome::Stuck(e),
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub value: Value,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub enum RunError {
    Stuck { step: usize, description: String, command: Command },
    BudgetExceeded { steps: usize },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Stuck { step, description, .. } => {
                write!(f, "stuck at step {}: {}", step, description)
            }
            RunError::BudgetExceeded { steps } => {
                write!(f, "step budget exceeded after {} steps", steps)
            }
        }
    }
}

/// Iterate `step` from `initial(t)`. The callback sees every transition:
/// `(index, rule, command-after)`.
pub fn run(
    t: Term,
    max_steps: usize,
    mut on_step: impl FnMut(usize, &'static str, &Command),
) -> Result<RunResult, RunError> {
    let mut cmd = Command::initial(t);
    for i in 0..max_steps {
        match step(&cmd) {
            StepOutcome::Terminal(v) => return Ok(RunResult { value: v, steps: i }),
            StepOutcome::Next(rule, next) => {
                on_step(i, rule, &next);
                cmd = next;
            }
            StepOutcome::Stuck(description) => {
                return Err(RunError::Stuck { step: i, description, command: cmd })
            }
        }
    }
    Err(RunError::BudgetExceeded { steps: max_steps })
}

// -- pretty-printing of commands --------------------------------------------

impl fmt::Display for FocusComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FocusComponent::AppL(t) => write!(f, "({}) []", t),
            FocusComponent::AppR(v) => write!(f, "[] ({})", v),
            FocusComponent::SeqF(u) => write!(f, "[] ; {}", u),
            FocusComponent::CaseSumF(m, x1, u1, x2, u2) => {
                write!(f, "case[{}] [] of {{Inl {} -> {} | Inr {} -> {}}}", m, x1, u1, x2, u2)
            }
            FocusComponent::CaseProdF(m, x1, x2, u) => {
                write!(f, "case[{}] [] of {{({}, {}) -> {}}}", m, x1, x2, u)
            }
            FocusComponent::CaseExpF(m, n, x, u) => {
                write!(f, "case[{}] [] of {{Mod{{{}}} {} -> {}}}", m, n, x, u)
            }
            FocusComponent::UpdF(x, t1) => write!(f, "upd [] with {} -> {}", x, t1),
            FocusComponent::ToF => write!(f, "to []"),
            FocusComponent::FromF => write!(f, "from []"),
            FocusComponent::FillUnitF => write!(f, "[] <| ()"),
            FocusComponent::FillInlF => write!(f, "[] <| Inl"),
            FocusComponent::FillInrF => write!(f, "[] <| Inr"),
            FocusComponent::FillProdF => write!(f, "[] <| (,)"),
            FocusComponent::FillExpF(m) => write!(f, "[] <| Mod{{{}}}", m),
            FocusComponent::FillFunF(x, m, u) => write!(f, "[] <| fun {}{{{}}} -> {}", x, m, u),
            FocusComponent::FillCompL(t1) => write!(f, "[] <o> ({})", t1),
            FocusComponent::FillCompR(v) => write!(f, "({}) <o> []", v),
            FocusComponent::FillLeafL(t1) => write!(f, "[] <! ({})", t1),
            FocusComponent::FillLeafR(v) => write!(f, "({}) <! []", v),
            FocusComponent::OpenAmpar(set, v2, _) => {
                let names: Vec<String> = set.iter().map(|h| h.to_string()).collect();
                write!(f, "op{{{}}}< {} /\\ [] >", names.join(","), v2)
            }
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([]")?;
        for comp in &self.ctx.stack {
            write!(f, " o {}", comp)?;
        }
        write!(f, ")[ {} ]", self.focus)
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
    fn newa_red_produces_name_one() {
        let out = step(&Command::initial(Term::NewAmpar(None)));
        match out {
            StepOutcome::Next(rule, cmd) => {
                assert_eq!(rule, "NEWA-RED");
                assert_eq!(
                    cmd.focus,
                    Term::Val(Value::ampar(set(&[1]), Value::Hole(1), Value::DestV(1)))
                );
            }
            other => panic!("unexpected: {:?}", other),
        }
    }

    #[test]
    fn ampar_close_rebuilds_value() {
        let ctx = EvaluationContext {
            stack: vec![FocusComponent::OpenAmpar(set(&[]), Value::UnitV, None)],
        };
        let cmd = Command { ctx, focus: Term::unit() };
        match step(&cmd) {
            StepOutcome::Next(rule, cmd) => {
                assert_eq!(rule, "AMPAR-CLOSE");
                assert_eq!(
                    cmd.focus,
                    Term::Val(Value::ampar(set(&[]), Value::UnitV, Value::UnitV))
                );
                assert!(cmd.ctx.stack.is_empty());
            }
            other => panic!("unexpected: {:?}", other),
        }
    }

    #[test]
    fn app_red_substitutes() {
        let lam = Value::Fun("x".into(), LIN_NOW, Box::new(Term::var("x")));
        let app = Term::app(Term::Val(lam), Term::unit());
        match step(&Command::initial(app)) {
            StepOutcome::Next(rule, cmd) => {
                assert_eq!(rule, "APP-RED");
                assert_eq!(cmd.focus, Term::unit());
            }
            other => panic!("unexpected: {:?}", other),
        }
    }

    #[test]
    fn hole_substitute_fills_owner() {
        let ctx = EvaluationContext {
            stack: vec![FocusComponent::OpenAmpar(set(&[1]), Value::Hole(1), None)],
        };
        let out = hole_substitute(&ctx, 1, &set(&[]), &Value::UnitV).unwrap();
        assert_eq!(
            out.stack,
            vec![FocusComponent::OpenAmpar(set(&[]), Value::UnitV, None)]
        );

        let out2 = hole_substitute(&ctx, 1, &set(&[2]), &Value::InlV(Box::new(Value::Hole(2))))
            .unwrap();
        assert_eq!(
            out2.stack,
            vec![FocusComponent::OpenAmpar(
                set(&[2]),
                Value::InlV(Box::new(Value::Hole(2))),
                None
            )]
        );
    }

    #[test]
    fn hole_substitute_touches_only_owner() {
        let ctx = EvaluationContext {
            stack: vec![
                FocusComponent::OpenAmpar(set(&[1]), Value::Hole(1), None),
                FocusComponent::OpenAmpar(set(&[2]), Value::Hole(2), None),
            ],
        };
        let out = hole_substitute(&ctx, 1, &set(&[]), &Value::UnitV).unwrap();
        assert_eq!(
            out.stack[1],
            FocusComponent::OpenAmpar(set(&[2]), Value::Hole(2), None)
        );
        assert_eq!(out.stack[0], FocusComponent::OpenAmpar(set(&[]), Value::UnitV, None));
        assert!(hole_substitute(&ctx, 9, &set(&[]), &Value::UnitV).is_err());
    }

    #[test]
    fn fill_into_open_ampar() {
        // op{3}< []3 /\ [] > with focus ->3 <| Inl: writes a hollow Inl.
        let ctx = EvaluationContext {
            stack: vec![FocusComponent::OpenAmpar(set(&[3]), Value::Hole(3), None)],
        };
        let cmd = Command { ctx, focus: Term::FillInl(Box::new(Term::Val(Value::DestV(3)))) };
        match step(&cmd) {
            StepOutcome::Next(rule, next) => {
                assert_eq!(rule, "FILLL-RED");
                // h' = max({3}) + 1 = 4, new name h'+1 = 5.
                assert_eq!(next.focus, Term::Val(Value::DestV(5)));
                assert_eq!(
                    next.ctx.stack[0],
                    FocusComponent::OpenAmpar(
                        set(&[5]),
                        Value::InlV(Box::new(Value::Hole(5))),
                        None
                    )
                );
            }
            other => panic!("unexpected: {:?}", other),
        }
    }
}
