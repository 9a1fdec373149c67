//! From source text to a checked, elaborated, closed term.
//!
//! Definitions are inlined bottom-up in declaration order (a definition may
//! only refer to earlier ones, or to itself when marked `rec`). Each
//! definition is checked against its ascription before inlining, which also
//! fills in the inferred ascription on every `new` it contains — by the
//! time a term reaches the evaluator, every `new` carries its type, so
//! commands can be re-checked mid-trace without the surrounding source.

use std::collections::BTreeMap;
use std::fmt;

use crate::surface::{Desugarer, Diagnostic, Program, TypeEnv, FIX_MODE};
use crate::syntax::{subst_term, Term, TypeExpr};
use crate::typecheck::term::{apply_ascriptions, check_term_full};
use crate::typecheck::TypeError;

#[derive(Debug)]
pub enum PipelineError {
    Parse(Vec<Diagnostic>),
    Resolve(Diagnostic),
    Type { def: Option<String>, error: TypeError },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Parse(ds) => {
                for d in ds {
                    writeln!(f, "parse error: {}", d)?;
                }
                Ok(())
            }
            PipelineError::Resolve(d) => write!(f, "error: {}", d),
            PipelineError::Type { def: Some(name), error } => {
                write!(f, "type error in `{}`: {}", name, error)
            }
            PipelineError::Type { def: None, error } => {
                write!(f, "type error in `main`: {}", error)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckedProgram {
    /// The elaborated closed term for `main`, definitions inlined.
    pub term: Term,
    /// The type of `main`.
    pub ty: TypeExpr,
}

pub fn check_program(src: &str, recursion_enabled: bool) -> Result<CheckedProgram, PipelineError> {
    let program = crate::parser::parse(src).map_err(PipelineError::Parse)?;
    check_parsed(&program, recursion_enabled)
}

pub fn check_parsed(
    program: &Program,
    recursion_enabled: bool,
) -> Result<CheckedProgram, PipelineError> {
    let mut env = TypeEnv::new(recursion_enabled);
    for td in &program.type_defs {
        env.add(td).map_err(PipelineError::Resolve)?;
    }

    let mut elaborated: BTreeMap<String, Term> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();

    for def in &program.defs {
        if def.recursive && !recursion_enabled {
            return Err(PipelineError::Resolve(Diagnostic::error(
                format!(
                    "recursive definition `{}` requires the recursion extension (--ext rec)",
                    def.name
                ),
                def.line,
                1,
            )));
        }
        let mut desugarer = Desugarer::new(&env);
        let mut body = desugarer.desugar(&def.body).map_err(PipelineError::Resolve)?;
        for name in order.iter().rev() {
            body = subst_term(&body, name, &elaborated[name]);
        }
        if def.recursive {
            body = Term::Fix(def.name.clone(), FIX_MODE, Box::new(body));
        }
        let ascription = match &def.ascription {
            None => None,
            Some(st) => Some(env.resolve(st).map_err(PipelineError::Resolve)?),
        };
        let check = check_term_full(
            &crate::context::Ctx::empty_gamma(),
            &body,
            ascription.as_ref(),
            recursion_enabled,
        )
        .map_err(|error| PipelineError::Type { def: Some(def.name.clone()), error })?;
        apply_ascriptions(&mut body, &check.new_ascriptions);
        elaborated.insert(def.name.clone(), body);
        order.push(def.name.clone());
    }

    let mut desugarer = Desugarer::new(&env);
    let mut main = desugarer.desugar(&program.main).map_err(PipelineError::Resolve)?;
    for name in order.iter().rev() {
        main = subst_term(&main, name, &elaborated[name]);
    }
    let ascription = match &program.main_ascription {
        None => None,
        Some(st) => Some(env.resolve(st).map_err(PipelineError::Resolve)?),
    };
    let check = check_term_full(
        &crate::context::Ctx::empty_gamma(),
        &main,
        ascription.as_ref(),
        recursion_enabled,
    )
    .map_err(|error| PipelineError::Type { def: None, error })?;
    apply_ascriptions(&mut main, &check.new_ascriptions);

    Ok(CheckedProgram { term: main, ty: check.ty })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_program_checks() {
        let p = check_program("main = ()", false).unwrap();
        assert_eq!(p.ty, TypeExpr::Unit);
    }

    #[test]
    fn forget_is_rejected_for_unused_destination() {
        let src = "type Bool = 1 (+) 1\n\
                   main : Bool = from' (upd (new : Bool >< [Bool]) with d -> ())";
        match check_program(src, false) {
            Err(PipelineError::Type { error, .. }) => {
                assert_eq!(error.rule, crate::typecheck::R_UNUSED_BINDER, "{}", error);
            }
            other => panic!("expected a type error, got {:?}", other.map(|p| p.ty)),
        }
    }

    #[test]
    fn fill_twice_is_rejected() {
        let src = "type Bool = 1 (+) 1\n\
                   main : Bool = from' (upd (new : Bool >< [Bool]) with d -> \
                   (d <! Inl ()) ; (d <! Inr ()))";
        match check_program(src, false) {
            Err(PipelineError::Type { error, .. }) => {
                assert_eq!(error.rule, crate::typecheck::R_MODE_MISMATCH, "{}", error);
            }
            other => panic!("expected a type error, got {:?}", other.map(|p| p.ty)),
        }
    }
}
