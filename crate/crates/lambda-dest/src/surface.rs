//! Surface syntax: programs with named definitions, type abbreviations,
//! and constructor sugar, plus the desugaring into core terms.

use std::collections::BTreeMap;

use crate::mode::{Mode, LIN_INF, LIN_NOW, UNR_INF};
use crate::syntax::{Term, TypeExpr, Value};

/// Types as written, before abbreviation expansion and de Bruijn conversion.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceType {
    Unit,
    Sum(Box<SurfaceType>, Box<SurfaceType>),
    Prod(Box<SurfaceType>, Box<SurfaceType>),
    Exp(Mode, Box<SurfaceType>),
    Arrow(Box<SurfaceType>, Mode, Box<SurfaceType>),
    Dest(Mode, Box<SurfaceType>),
    Ampar(Box<SurfaceType>, Box<SurfaceType>),
    /// Abbreviation application, e.g. `List 1`
    Name(String, Vec<SurfaceType>),
    /// A `rec`-bound type variable (or a parameter inside an abbreviation body)
    Var(String),
    Rec(String, Box<SurfaceType>),
}

/// Terms as written: the core forms plus sugar nodes. Sugar is eliminated
/// by [`desugar`] before typing or evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Surface {
    Var(String),
    App(Box<Surface>, Box<Surface>),
    Seq(Box<Surface>, Box<Surface>),
    CaseSum(Mode, Box<Surface>, String, Box<Surface>, String, Box<Surface>),
    CaseProd(Mode, Box<Surface>, String, String, Box<Surface>),
    CaseExp(Mode, Mode, Box<Surface>, String, Box<Surface>),
    Upd(Box<Surface>, String, Box<Surface>),
    To(Box<Surface>),
    From(Box<Surface>),
    New(Option<SurfaceType>),
    FillUnit(Box<Surface>),
    FillInl(Box<Surface>),
    FillInr(Box<Surface>),
    FillProd(Box<Surface>),
    FillExp(Mode, Box<Surface>),
    FillFun(Box<Surface>, String, Mode, Box<Surface>),
    FillComp(Box<Surface>, Box<Surface>),
    FillLeaf(Box<Surface>, Box<Surface>),
    // Sugar
    SUnit,
    SPair(Box<Surface>, Box<Surface>),
    SInl(Box<Surface>),
    SInr(Box<Surface>),
    SMod(Mode, Box<Surface>),
    SLam(String, Mode, Box<Surface>),
    SFromPrime(Box<Surface>),
}

#[derive(Clone, Debug)]
pub struct TypeDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: SurfaceType,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub struct Def {
    pub name: String,
    pub ascription: Option<SurfaceType>,
    pub body: Surface,
    pub recursive: bool,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub type_defs: Vec<TypeDef>,
    pub defs: Vec<Def>,
    pub main: Surface,
    pub main_ascription: Option<SurfaceType>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
}

/// A positioned message. Parse failures always carry the position of the
/// offending token.
#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, line: usize, column: usize) -> Diagnostic {
        Diagnostic { severity: Severity::Error, message: message.into(), line, column }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

// ---------------------------------------------------------------------------
// Type resolution

pub struct TypeEnv {
    abbrevs: BTreeMap<String, (Vec<String>, SurfaceType)>,
    pub recursion_enabled: bool,
}

impl TypeEnv {
    pub fn new(recursion_enabled: bool) -> TypeEnv {
        TypeEnv { abbrevs: BTreeMap::new(), recursion_enabled }
    }

    pub fn add(&mut self, td: &TypeDef) -> Result<(), Diagnostic> {
        if self.abbrevs.contains_key(&td.name) {
            return Err(Diagnostic::error(
                format!("duplicate type definition `{}`", td.name),
                td.line,
                1,
            ));
        }
        self.abbrevs.insert(td.name.clone(), (td.params.clone(), td.body.clone()));
        Ok(())
    }

    /// Expand abbreviations and convert `rec` binders to de Bruijn form.
    pub fn resolve(&self, st: &SurfaceType) -> Result<TypeExpr, Diagnostic> {
        self.go(st, &mut Vec::new(), 0)
    }

    fn go(
        &self,
        st: &SurfaceType,
        scope: &mut Vec<String>,
        expansion_depth: u32,
    ) -> Result<TypeExpr, Diagnostic> {
        if expansion_depth > 64 {
            return Err(Diagnostic::error("type abbreviation expansion too deep", 0, 0));
        }
        Ok(match st {
            SurfaceType::Unit => TypeExpr::Unit,
            SurfaceType::Sum(a, b) => {
                TypeExpr::sum(self.go(a, scope, expansion_depth)?, self.go(b, scope, expansion_depth)?)
            }
            SurfaceType::Prod(a, b) => {
                TypeExpr::prod(self.go(a, scope, expansion_depth)?, self.go(b, scope, expansion_depth)?)
            }
            SurfaceType::Exp(m, t) => TypeExpr::exp(*m, self.go(t, scope, expansion_depth)?),
            SurfaceType::Arrow(a, m, b) => TypeExpr::arrow(
                self.go(a, scope, expansion_depth)?,
                *m,
                self.go(b, scope, expansion_depth)?,
            ),
            SurfaceType::Dest(n, t) => TypeExpr::dest(*n, self.go(t, scope, expansion_depth)?),
            SurfaceType::Ampar(a, b) => TypeExpr::ampar(
                self.go(a, scope, expansion_depth)?,
                self.go(b, scope, expansion_depth)?,
            ),
            SurfaceType::Var(a) => {
                if let Some(pos) = scope.iter().rposition(|s| s == a) {
                    TypeExpr::RecVar((scope.len() - 1 - pos) as u32)
                } else {
                    return Err(Diagnostic::error(format!("unknown type variable `{}`", a), 0, 0));
                }
            }
            SurfaceType::Rec(a, body) => {
                if !self.recursion_enabled {
                    return Err(Diagnostic::error(
                        "recursive types require the recursion extension (--ext rec)",
                        0,
                        0,
                    ));
                }
                scope.push(a.clone());
                let body = self.go(body, scope, expansion_depth)?;
                scope.pop();
                TypeExpr::Rec(Box::new(body))
            }
            SurfaceType::Name(n, args) => {
                let (params, body) = self.abbrevs.get(n).ok_or_else(|| {
                    Diagnostic::error(format!("unknown type `{}`", n), 0, 0)
                })?;
                if params.len() != args.len() {
                    return Err(Diagnostic::error(
                        format!("type `{}` expects {} argument(s), got {}", n, params.len(), args.len()),
                        0,
                        0,
                    ));
                }
                let mut subst = BTreeMap::new();
                for (p, a) in params.iter().zip(args.iter()) {
                    subst.insert(p.clone(), a.clone());
                }
                let expanded = substitute_surface_type(body, &subst);
                self.go(&expanded, scope, expansion_depth + 1)?
            }
        })
    }
}

fn substitute_surface_type(
    st: &SurfaceType,
    subst: &BTreeMap<String, SurfaceType>,
) -> SurfaceType {
    match st {
        SurfaceType::Unit => SurfaceType::Unit,
        SurfaceType::Sum(a, b) => SurfaceType::Sum(
            Box::new(substitute_surface_type(a, subst)),
            Box::new(substitute_surface_type(b, subst)),
        ),
        SurfaceType::Prod(a, b) => SurfaceType::Prod(
            Box::new(substitute_surface_type(a, subst)),
            Box::new(substitute_surface_type(b, subst)),
        ),
        SurfaceType::Exp(m, t) => {
            SurfaceType::Exp(*m, Box::new(substitute_surface_type(t, subst)))
        }
        SurfaceType::Arrow(a, m, b) => SurfaceType::Arrow(
            Box::new(substitute_surface_type(a, subst)),
            *m,
            Box::new(substitute_surface_type(b, subst)),
        ),
        SurfaceType::Dest(n, t) => {
            SurfaceType::Dest(*n, Box::new(substitute_surface_type(t, subst)))
        }
        SurfaceType::Ampar(a, b) => SurfaceType::Ampar(
            Box::new(substitute_surface_type(a, subst)),
            Box::new(substitute_surface_type(b, subst)),
        ),
        SurfaceType::Var(a) => subst.get(a).cloned().unwrap_or_else(|| SurfaceType::Var(a.clone())),
        SurfaceType::Rec(a, body) => {
            // Abbreviation parameters and rec binders live in separate
            // namespaces by convention; shadowing stops the substitution.
            let mut inner = subst.clone();
            inner.remove(a);
            SurfaceType::Rec(a.clone(), Box::new(substitute_surface_type(body, &inner)))
        }
        SurfaceType::Name(n, args) => SurfaceType::Name(
            n.clone(),
            args.iter().map(|a| substitute_surface_type(a, subst)).collect(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Desugaring

pub struct Desugarer<'a> {
    env: &'a TypeEnv,
    fresh: u32,
}

impl<'a> Desugarer<'a> {
    pub fn new(env: &'a TypeEnv) -> Desugarer<'a> {
        Desugarer { env, fresh: 0 }
    }

    fn fresh(&mut self, stem: &str) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("%{}{}", stem, n)
    }

    /// The `from'` wrapper: extract the structure once the destination side
    /// has been consumed down to unit. The exponential payload is the
    /// runtime unit value; writing it as unit sugar would expand forever.
    fn from_prime(&mut self, inner: Term) -> Term {
        let un = self.fresh("un");
        let st = self.fresh("st");
        let ex = self.fresh("ex");
        let un2 = self.fresh("un");
        let updated = Term::UpdAmpar(
            Box::new(inner),
            un.clone(),
            Box::new(Term::seq(
                Term::Var(un),
                Term::Val(Value::ModV(LIN_INF, Box::new(Value::UnitV))),
            )),
        );
        Term::CaseProd(
            LIN_NOW,
            Box::new(Term::FromAmpar(Box::new(updated))),
            st.clone(),
            ex.clone(),
            Box::new(Term::CaseExp(
                LIN_NOW,
                LIN_INF,
                Box::new(Term::Var(ex)),
                un2.clone(),
                Box::new(Term::seq(Term::Var(un2), Term::Var(st))),
            )),
        )
    }

    /// `from' (upd new with d -> body(d))`, the shape shared by every
    /// constructor expansion.
    fn build(&mut self, body: impl FnOnce(&mut Self, Term) -> Term) -> Term {
        let d = self.fresh("d");
        let filled = body(self, Term::Var(d.clone()));
        let upd = Term::UpdAmpar(Box::new(Term::NewAmpar(None)), d, Box::new(filled));
        self.from_prime(upd)
    }

    pub fn desugar(&mut self, s: &Surface) -> Result<Term, Diagnostic> {
        Ok(match s {
            Surface::Var(x) => Term::Var(x.clone()),
            Surface::App(f, a) => Term::app(self.desugar(f)?, self.desugar(a)?),
            Surface::Seq(a, b) => Term::seq(self.desugar(a)?, self.desugar(b)?),
            Surface::CaseSum(m, t, x1, u1, x2, u2) => Term::CaseSum(
                *m,
                Box::new(self.desugar(t)?),
                x1.clone(),
                Box::new(self.desugar(u1)?),
                x2.clone(),
                Box::new(self.desugar(u2)?),
            ),
            Surface::CaseProd(m, t, x1, x2, u) => Term::CaseProd(
                *m,
                Box::new(self.desugar(t)?),
                x1.clone(),
                x2.clone(),
                Box::new(self.desugar(u)?),
            ),
            Surface::CaseExp(m, n, t, x, u) => Term::CaseExp(
                *m,
                *n,
                Box::new(self.desugar(t)?),
                x.clone(),
                Box::new(self.desugar(u)?),
            ),
            Surface::Upd(t, x, u) => Term::UpdAmpar(
                Box::new(self.desugar(t)?),
                x.clone(),
                Box::new(self.desugar(u)?),
            ),
            Surface::To(t) => Term::ToAmpar(Box::new(self.desugar(t)?)),
            Surface::From(t) => Term::FromAmpar(Box::new(self.desugar(t)?)),
            Surface::New(asc) => {
                let asc = match asc {
                    None => None,
                    Some(st) => Some(Box::new(self.env.resolve(st)?)),
                };
                Term::NewAmpar(asc)
            }
            Surface::FillUnit(t) => Term::FillUnit(Box::new(self.desugar(t)?)),
            Surface::FillInl(t) => Term::FillInl(Box::new(self.desugar(t)?)),
            Surface::FillInr(t) => Term::FillInr(Box::new(self.desugar(t)?)),
            Surface::FillProd(t) => Term::FillProd(Box::new(self.desugar(t)?)),
            Surface::FillExp(m, t) => Term::FillExp(*m, Box::new(self.desugar(t)?)),
            Surface::FillFun(t, x, m, u) => Term::FillFun(
                Box::new(self.desugar(t)?),
                x.clone(),
                *m,
                Box::new(self.desugar(u)?),
            ),
            Surface::FillComp(a, b) => {
                Term::FillComp(Box::new(self.desugar(a)?), Box::new(self.desugar(b)?))
            }
            Surface::FillLeaf(a, b) => {
                Term::FillLeaf(Box::new(self.desugar(a)?), Box::new(self.desugar(b)?))
            }
            Surface::SUnit => self.build(|_, d| Term::FillUnit(Box::new(d))),
            Surface::SInl(t) => {
                let t = self.desugar(t)?;
                self.build(|_, d| {
                    Term::FillLeaf(Box::new(Term::FillInl(Box::new(d))), Box::new(t))
                })
            }
            Surface::SInr(t) => {
                let t = self.desugar(t)?;
                self.build(|_, d| {
                    Term::FillLeaf(Box::new(Term::FillInr(Box::new(d))), Box::new(t))
                })
            }
            Surface::SMod(m, t) => {
                let t = self.desugar(t)?;
                let m = *m;
                self.build(|_, d| {
                    Term::FillLeaf(Box::new(Term::FillExp(m, Box::new(d))), Box::new(t))
                })
            }
            Surface::SLam(x, m, u) => {
                let u = self.desugar(u)?;
                let x = x.clone();
                let m = *m;
                self.build(|_, d| Term::FillFun(Box::new(d), x, m, Box::new(u)))
            }
            Surface::SPair(t1, t2) => {
                let t1 = self.desugar(t1)?;
                let t2 = self.desugar(t2)?;
                self.build(|me, d| {
                    let d1 = me.fresh("d1_");
                    let d2 = me.fresh("d2_");
                    Term::CaseProd(
                        LIN_NOW,
                        Box::new(Term::FillProd(Box::new(d))),
                        d1.clone(),
                        d2.clone(),
                        Box::new(Term::seq(
                            Term::FillLeaf(Box::new(Term::Var(d1)), Box::new(t1)),
                            Term::FillLeaf(Box::new(Term::Var(d2)), Box::new(t2)),
                        )),
                    )
                })
            }
            Surface::SFromPrime(t) => {
                let t = self.desugar(t)?;
                self.from_prime(t)
            }
        })
    }
}

/// Fixpoint self-references always carry `winf`: the recursive name may be
/// used any number of times and cannot capture destinations.
pub const FIX_MODE: Mode = UNR_INF;

#[cfg(test)]
mod tests {
    use super::*;

    fn desugar_one(s: &Surface) -> Term {
        let env = TypeEnv::new(false);
        Desugarer::new(&env).desugar(s).unwrap()
    }

    #[test]
    fn unit_expands_to_fill_dance() {
        let t = desugar_one(&Surface::SUnit);
        // from' (upd new with d -> d <| ()) with from' expanded around it.
        let s = crate::pretty::term_to_string(&t);
        assert!(s.contains("upd new with %d0 -> %d0 <| ()"), "got: {}", s);
        assert!(s.starts_with("case[1v] from (upd"), "got: {}", s);
    }

    #[test]
    fn inl_expands_through_fill() {
        let t = desugar_one(&Surface::SInl(Box::new(Surface::SUnit)));
        let s = crate::pretty::term_to_string(&t);
        assert!(s.contains("<| Inl <!"), "got: {}", s);
    }

    #[test]
    fn desugar_is_identity_on_core() {
        let core = Surface::Seq(
            Box::new(Surface::FillUnit(Box::new(Surface::Var("d".into())))),
            Box::new(Surface::Var("x".into())),
        );
        let t = desugar_one(&core);
        assert_eq!(
            t,
            Term::seq(
                Term::FillUnit(Box::new(Term::var("d"))),
                Term::var("x")
            )
        );
    }
}
