//! Executable metatheory: per-step preservation and progress along traces,
//! the hole-name discipline, and differential agreement between the
//! algorithmic and declarative checkers on an exhaustive small-term
//! universe.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::context::{BindingKey, Ctx};
use crate::eval::{step, Command, FocusComponent, StepOutcome};
use crate::mode::{LIN_NOW, UNR_NOW};
use crate::syntax::{HasHoleNames, HoleName, HoleSet, Term, TypeExpr, Value};
use crate::typecheck::declarative::{
    check_term_declarative, DeclarativeOutcome, DeclarativeParams,
};
use crate::typecheck::{check_command, check_term};

/// One program's metatheory verdict. A passing report has no failures and
/// a terminal state whose value checks at the step-0 type in the empty
/// context.
#[derive(Clone, Debug, Serialize)]
pub struct MetaReport {
    pub program: String,
    pub steps: usize,
    pub preservation_failures: Vec<StepFailure>,
    pub progress_failure: Option<StepFailure>,
    pub name_discipline_failures: Vec<StepFailure>,
    pub terminal_ok: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepFailure {
    pub step: usize,
    pub detail: String,
}

/// Run a checked term, re-checking the command after every `stride`-th
/// step against the step-0 type, watching for stuckness, and auditing the
/// hole-name discipline.
pub fn check_preservation_progress(
    name: &str,
    term: &Term,
    ty: &TypeExpr,
    recursion_enabled: bool,
    max_steps: usize,
    stride: usize,
) -> MetaReport {
    let stride = stride.max(1);
    let mut report = MetaReport {
        program: name.to_string(),
        steps: 0,
        preservation_failures: Vec::new(),
        progress_failure: None,
        name_discipline_failures: Vec::new(),
        terminal_ok: false,
        passed: false,
    };
    let mut cmd = Command::initial(term.clone());
    let mut i: usize = 0;
    loop {
        if i > max_steps {
            report.progress_failure = Some(StepFailure {
                step: i,
                detail: format!("step budget {} exceeded", max_steps),
            });
            break;
        }
        if i % stride == 0 && !report_preservation(&mut report, i, &cmd, ty, recursion_enabled) {
            break;
        }
        if let Err(detail) = name_discipline(&cmd) {
            report
                .name_discipline_failures
                .push(StepFailure { step: i, detail });
            break;
        }
        let names_before = cmd_names(&cmd);
        let max_before = names_before.iter().next_back().copied().unwrap_or(0);
        match step(&cmd) {
            StepOutcome::Terminal(v) => {
                report.steps = i;
                let empty = Ctx::empty_theta();
                match crate::typecheck::check_value(&empty, &v, ty, recursion_enabled) {
                    Ok(()) => report.terminal_ok = true,
                    Err(e) => report.preservation_failures.push(StepFailure {
                        step: i,
                        detail: format!("terminal value does not check: {}", e),
                    }),
                }
                break;
            }
            StepOutcome::Next(rule, next) => {
                if fresh_name_rule(rule) {
                    let names_after = cmd_names(&next);
                    for h in names_after.difference(&names_before) {
                        if *h <= max_before {
                            report.name_discipline_failures.push(StepFailure {
                                step: i,
                                detail: format!(
                                    "{} introduced name {} not above prior max {}",
                                    rule, h, max_before
                                ),
                            });
                        }
                    }
                }
                cmd = next;
                i += 1;
            }
            StepOutcome::Stuck(detail) => {
                report.steps = i;
                report.progress_failure = Some(StepFailure { step: i, detail });
                break;
            }
        }
    }
    report.passed = report.preservation_failures.is_empty()
        && report.progress_failure.is_none()
        && report.name_discipline_failures.is_empty()
        && report.terminal_ok;
    report
}

fn report_preservation(
    report: &mut MetaReport,
    i: usize,
    cmd: &Command,
    ty: &TypeExpr,
    recursion_enabled: bool,
) -> bool {
    match check_command(&cmd.ctx, &cmd.focus, recursion_enabled, Some(ty)) {
        Ok(_) => true,
        Err(e) => {
            report
                .preservation_failures
                .push(StepFailure { step: i, detail: format!("{} in {}", e, cmd) });
            false
        }
    }
}

fn fresh_name_rule(rule: &str) -> bool {
    matches!(
        rule,
        "FILLL-RED" | "FILLR-RED" | "FILLE-RED" | "FILLP-RED" | "FILLCOMP-RED" | "AMPAR-OPEN"
    )
}

fn cmd_names(cmd: &Command) -> HoleSet {
    cmd.hnames()
}

/// Occurrence counts per free name, as (min, max) over execution paths:
/// case branches are alternatives, so a destination may occur once in
/// every arm and still be used exactly once on any run.
type Counts = BTreeMap<HoleName, (u32, u32)>;

fn seq_counts(mut a: Counts, b: Counts) -> Counts {
    for (h, (lo, hi)) in b {
        let e = a.entry(h).or_insert((0, 0));
        e.0 += lo;
        e.1 += hi;
    }
    a
}

fn alt_counts(a: Counts, b: Counts) -> Counts {
    let mut out = Counts::new();
    for h in a.keys().chain(b.keys()) {
        let (alo, ahi) = a.get(h).copied().unwrap_or((0, 0));
        let (blo, bhi) = b.get(h).copied().unwrap_or((0, 0));
        out.insert(*h, (alo.min(blo), ahi.max(bhi)));
    }
    out
}

fn one(h: HoleName) -> Counts {
    let mut c = Counts::new();
    c.insert(h, (1, 1));
    c
}

/// (hole counts, destination counts) of free occurrences in a value,
/// respecting closed-ampar binders.
fn counts_value(v: &Value, bound: &HoleSet) -> (Counts, Counts) {
    match v {
        Value::Hole(h) => {
            if bound.contains(h) {
                (Counts::new(), Counts::new())
            } else {
                (one(*h), Counts::new())
            }
        }
        Value::DestV(h) => {
            if bound.contains(h) {
                (Counts::new(), Counts::new())
            } else {
                (Counts::new(), one(*h))
            }
        }
        Value::AmparV(set, v2, v1, _) => {
            let mut inner = bound.clone();
            inner.extend(set.iter().copied());
            let (h2, d2) = counts_value(v2, &inner);
            let (h1, d1) = counts_value(v1, &inner);
            (seq_counts(h2, h1), seq_counts(d2, d1))
        }
        Value::UnitV => (Counts::new(), Counts::new()),
        Value::Fun(_, _, body) => counts_term(body, bound),
        Value::InlV(a) | Value::InrV(a) | Value::ModV(_, a) => counts_value(a, bound),
        Value::PairV(a, b) => {
            let (ha, da) = counts_value(a, bound);
            let (hb, db) = counts_value(b, bound);
            (seq_counts(ha, hb), seq_counts(da, db))
        }
    }
}

fn counts_term(t: &Term, bound: &HoleSet) -> (Counts, Counts) {
    match t {
        Term::Val(v) => counts_value(v, bound),
        Term::Var(_) | Term::NewAmpar(_) => (Counts::new(), Counts::new()),
        Term::App(a, b)
        | Term::Seq(a, b)
        | Term::FillComp(a, b)
        | Term::FillLeaf(a, b)
        | Term::UpdAmpar(a, _, b)
        | Term::FillFun(a, _, _, b) => {
            let (ha, da) = counts_term(a, bound);
            let (hb, db) = counts_term(b, bound);
            (seq_counts(ha, hb), seq_counts(da, db))
        }
        Term::CaseSum(_, scrut, _, u1, _, u2) => {
            let (hs, ds) = counts_term(scrut, bound);
            let (h1, d1) = counts_term(u1, bound);
            let (h2, d2) = counts_term(u2, bound);
            (
                seq_counts(hs, alt_counts(h1, h2)),
                seq_counts(ds, alt_counts(d1, d2)),
            )
        }
        Term::CaseProd(_, scrut, _, _, u) | Term::CaseExp(_, _, scrut, _, u) => {
            let (hs, ds) = counts_term(scrut, bound);
            let (hu, du) = counts_term(u, bound);
            (seq_counts(hs, hu), seq_counts(ds, du))
        }
        Term::ToAmpar(a)
        | Term::FromAmpar(a)
        | Term::FillUnit(a)
        | Term::FillInl(a)
        | Term::FillInr(a)
        | Term::FillProd(a)
        | Term::FillExp(_, a)
        | Term::Fix(_, _, a) => counts_term(a, bound),
    }
}

fn component_counts(comp: &FocusComponent) -> (Counts, Counts) {
    let empty = HoleSet::new();
    match comp {
        FocusComponent::OpenAmpar(_, v2, _) => counts_value(v2, &empty),
        FocusComponent::AppL(t)
        | FocusComponent::SeqF(t)
        | FocusComponent::UpdF(_, t)
        | FocusComponent::FillFunF(_, _, t)
        | FocusComponent::FillCompL(t)
        | FocusComponent::FillLeafL(t) => counts_term(t, &empty),
        FocusComponent::AppR(v)
        | FocusComponent::FillCompR(v)
        | FocusComponent::FillLeafR(v) => counts_value(v, &empty),
        FocusComponent::CaseSumF(_, _, u1, _, u2) => {
            let (h1, d1) = counts_term(u1, &empty);
            let (h2, d2) = counts_term(u2, &empty);
            (alt_counts(h1, h2), alt_counts(d1, d2))
        }
        FocusComponent::CaseProdF(_, _, _, u) | FocusComponent::CaseExpF(_, _, _, u) => {
            counts_term(u, &empty)
        }
        FocusComponent::ToF
        | FocusComponent::FromF
        | FocusComponent::FillUnitF
        | FocusComponent::FillInlF
        | FocusComponent::FillInrF
        | FocusComponent::FillProdF
        | FocusComponent::FillExpF(_) => (Counts::new(), Counts::new()),
    }
}

/// Global hole-name uniqueness and one-to-one hole/destination pairing:
/// open-ampar name sets are pairwise disjoint; inside each component the
/// attached structure has exactly the component's holes, once each; each
/// open name has exactly one live destination somewhere in the command.
pub fn name_discipline(cmd: &Command) -> Result<(), String> {
    let mut open: BTreeMap<HoleName, usize> = BTreeMap::new();
    for (i, comp) in cmd.ctx.stack.iter().enumerate() {
        if let FocusComponent::OpenAmpar(set, ..) = comp {
            for h in set {
                if open.insert(*h, i).is_some() {
                    return Err(format!("hole name {} attached to two open ampars", h));
                }
            }
        }
    }
    let mut holes = Counts::new();
    let mut dests = Counts::new();
    for (i, comp) in cmd.ctx.stack.iter().enumerate() {
        let (h, d) = component_counts(comp);
        if let FocusComponent::OpenAmpar(set, ..) = comp {
            // The attached structure must hold exactly this component's
            // holes, once each.
            let h_set: HoleSet = h.keys().copied().collect();
            if &h_set != set || h.values().any(|c| *c != (1, 1)) {
                return Err(format!(
                    "component {} owns names {:?} but its structure has holes {:?}",
                    i, set, h
                ));
            }
        } else if let Some(name) = h.keys().next() {
            return Err(format!("free hole []{} outside any open ampar", name));
        }
        holes = seq_counts(holes, h);
        dests = seq_counts(dests, d);
    }
    let (hf, df) = counts_term(&cmd.focus, &HoleSet::new());
    if let Some(name) = hf.keys().next() {
        return Err(format!("free hole []{} in the focused term", name));
    }
    holes = seq_counts(holes, hf);
    dests = seq_counts(dests, df);

    for (h, (lo, hi)) in &dests {
        if !open.contains_key(h) {
            return Err(format!("destination ->{} has no owning open ampar", h));
        }
        if *hi > 1 {
            return Err(format!("destination ->{} can occur {} times on one path", h, hi));
        }
        if *lo < 1 {
            return Err(format!("destination ->{} is dropped on some path", h));
        }
    }
    for (h, _) in open.iter() {
        if dests.get(h).copied().unwrap_or((0, 0)) != (1, 1) {
            return Err(format!(
                "open hole {} is not paired with exactly one destination",
                h
            ));
        }
        if holes.get(h).copied().unwrap_or((0, 0)) != (1, 1) {
            return Err(format!("open hole {} does not occur exactly once", h));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Differential enumeration

#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub total: usize,
    pub accepts: usize,
    pub rejects: usize,
    pub budget_exhausted: usize,
    pub disagreements: Vec<String>,
}

/// Every term of size up to `size_bound` over a small constructor menu,
/// with variables `x` and `y`.
pub fn enumerate_terms(size_bound: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); size_bound + 1];
    if size_bound >= 1 {
        by_size[1] = vec![
            Term::var("x"),
            Term::var("y"),
            Term::unit(),
            Term::NewAmpar(Some(Box::new(TypeExpr::ampar(
                TypeExpr::Unit,
                TypeExpr::dest(LIN_NOW, TypeExpr::Unit),
            )))),
        ];
    }
    for n in 2..=size_bound {
        let mut terms = Vec::new();
        for sub in &by_size[n - 1] {
            terms.push(Term::FillUnit(Box::new(sub.clone())));
            terms.push(Term::FillInl(Box::new(sub.clone())));
            terms.push(Term::ToAmpar(Box::new(sub.clone())));
        }
        for i in 1..n - 1 {
            let j = n - 1 - i;
            for a in &by_size[i] {
                for b in &by_size[j] {
                    terms.push(Term::seq(a.clone(), b.clone()));
                    terms.push(Term::FillLeaf(Box::new(a.clone()), Box::new(b.clone())));
                    terms.push(Term::UpdAmpar(
                        Box::new(a.clone()),
                        "d".to_string(),
                        Box::new(b.clone()),
                    ));
                    terms.push(Term::CaseProd(
                        LIN_NOW,
                        Box::new(a.clone()),
                        "p".to_string(),
                        "q".to_string(),
                        Box::new(b.clone()),
                    ));
                }
            }
        }
        by_size[n] = terms;
    }
    by_size.into_iter().flatten().collect()
}

/// The contexts the differential harness ranges over.
pub fn enumeration_contexts(params: &DeclarativeParams) -> Vec<Ctx> {
    let mut out = vec![Ctx::empty_gamma()];
    for m in &params.modes {
        for ty in &params.types {
            out.push(
                Ctx::empty_gamma()
                    .bind(BindingKey::VarKey("x".into()), *m, ty.clone())
                    .unwrap(),
            );
        }
    }
    // A couple of two-binding contexts exercise splits across keys.
    let two = |mx, tx: &TypeExpr, my, ty_: &TypeExpr| {
        Ctx::empty_gamma()
            .bind(BindingKey::VarKey("x".into()), mx, tx.clone())
            .unwrap()
            .bind(BindingKey::VarKey("y".into()), my, ty_.clone())
            .unwrap()
    };
    let unit = TypeExpr::Unit;
    let dest = TypeExpr::dest(LIN_NOW, TypeExpr::Unit);
    out.push(two(LIN_NOW, &unit, LIN_NOW, &dest));
    out.push(two(UNR_NOW, &unit, LIN_NOW, &unit));
    out.push(two(
        crate::mode::LIN_INF,
        &unit,
        LIN_NOW,
        &TypeExpr::ampar(TypeExpr::Unit, dest.clone()),
    ));
    out
}

/// Run both checkers over the whole (context, term, type) universe.
pub fn enumerate_and_compare(size_bound: usize, params: &DeclarativeParams) -> AgreementReport {
    let terms = enumerate_terms(size_bound);
    let contexts = enumeration_contexts(params);
    let mut report = AgreementReport {
        total: 0,
        accepts: 0,
        rejects: 0,
        budget_exhausted: 0,
        disagreements: Vec::new(),
    };
    for ctx in &contexts {
        for term in &terms {
            for ty in &params.types {
                report.total += 1;
                let algorithmic = check_term(ctx, term, ty, false).is_ok();
                let declarative = check_term_declarative(ctx, term, ty, params);
                match declarative {
                    DeclarativeOutcome::BudgetExhausted => report.budget_exhausted += 1,
                    DeclarativeOutcome::Accept => {
                        if algorithmic {
                            report.accepts += 1;
                        } else {
                            disagree(&mut report, ctx, term, ty, true);
                        }
                    }
                    DeclarativeOutcome::Reject => {
                        if algorithmic {
                            disagree(&mut report, ctx, term, ty, false);
                        } else {
                            report.rejects += 1;
                        }
                    }
                }
            }
        }
    }
    report
}

fn disagree(report: &mut AgreementReport, ctx: &Ctx, term: &Term, ty: &TypeExpr, decl: bool) {
    if report.disagreements.len() < 50 {
        report.disagreements.push(format!(
            "[{}] |- {} : {} — declarative {}, algorithmic {}",
            ctx.render(),
            term,
            ty,
            if decl { "accepts" } else { "rejects" },
            if decl { "rejects" } else { "accepts" },
        ));
    } else if report.disagreements.len() == 50 {
        report.disagreements.push("(further disagreements elided)".into());
    } else {
        report.disagreements.push(String::new());
        report.disagreements.pop();
    }
}

/// The runtime invariant on destinations: a live destination is always
/// linear (exactly one occurrence — see [`name_discipline`]) and of finite
/// age. Finite age means the occurrence sits inside its owning open
/// ampar's scope: in the focus, or in a component strictly inside the
/// owner. An occurrence outside the owner would have escaped its scope.
pub fn destinations_in_scope(cmd: &Command) -> Result<(), String> {
    let mut owner: BTreeMap<HoleName, usize> = BTreeMap::new();
    for (i, comp) in cmd.ctx.stack.iter().enumerate() {
        if let FocusComponent::OpenAmpar(set, ..) = comp {
            for h in set {
                owner.insert(*h, i);
            }
        }
    }
    for (i, comp) in cmd.ctx.stack.iter().enumerate() {
        let (_, dests) = component_counts(comp);
        for h in dests.keys() {
            match owner.get(h) {
                None => return Err(format!("destination ->{} has no owner", h)),
                Some(j) if *j >= i => {
                    return Err(format!(
                        "destination ->{} occurs outside its owning scope (owner {}, occurrence {})",
                        h, j, i
                    ))
                }
                Some(_) => {}
            }
        }
    }
    let (_, dests) = counts_term(&cmd.focus, &HoleSet::new());
    for h in dests.keys() {
        if !owner.contains_key(h) {
            return Err(format!("destination ->{} has no owner", h));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_grow() {
        let t3 = enumerate_terms(3).len();
        let t4 = enumerate_terms(4).len();
        assert!(t3 > 10);
        assert!(t4 > t3);
    }

    #[test]
    fn trivial_program_report_passes() {
        let p = crate::pipeline::check_program("main = ()", false).unwrap();
        let report =
            check_preservation_progress("unit", &p.term, &p.ty, false, 10_000, 1);
        assert!(report.passed, "{:?}", report);
    }
}
