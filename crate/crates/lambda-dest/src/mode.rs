//! The ordered semiring of modes.
//!
//! A mode is a pair of a multiplicity (`1` or `w`) and an age (`v`, `^k`, or
//! `inf`). Multiplicities track how many times a binding may be used; ages
//! track how many scopes separate a binding's definition site from its use
//! site. Both carry a commutative semiring structure and a partial order,
//! and modes combine them componentwise.

use std::fmt;

/// Usage multiplicity: linear (`1`) or unrestricted (`w`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mult {
    One,
    Many,
}

impl Mult {
    pub fn add(self, _other: Mult) -> Mult {
        // Every entry of the addition table is w: 1+1 = 1+w = w+w = w.
        Mult::Many
    }

    pub fn mul(self, other: Mult) -> Mult {
        match (self, other) {
            (Mult::One, m) | (m, Mult::One) => m,
            (Mult::Many, Mult::Many) => Mult::Many,
        }
    }

    pub fn le(self, other: Mult) -> bool {
        matches!(
            (self, other),
            (Mult::One, _) | (Mult::Many, Mult::Many)
        )
    }
}

/// Scope age: `Fin(k)` means "defined k scopes ago", `Inf` means
/// scope-insensitive (the value cannot contain destinations).
///
/// Finite ages sit in a flat order: `Fin(j) <= Fin(k)` only when `j == k`,
/// and everything is below `Inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Age {
    Fin(u32),
    Inf,
}

impl Age {
    /// Addition is least upper bound in the flat order: equal finite ages
    /// stay put, unequal ones jump to `Inf`.
    pub fn add(self, other: Age) -> Age {
        match (self, other) {
            (Age::Fin(j), Age::Fin(k)) if j == k => Age::Fin(k),
            _ => Age::Inf,
        }
    }

    /// Multiplication nests scopes: exponents add, `Inf` absorbs.
    pub fn mul(self, other: Age) -> Age {
        match (self, other) {
            (Age::Fin(j), Age::Fin(k)) => Age::Fin(j + k),
            _ => Age::Inf,
        }
    }

    pub fn le(self, other: Age) -> bool {
        match (self, other) {
            (Age::Fin(j), Age::Fin(k)) => j == k,
            (_, Age::Inf) => true,
            (Age::Inf, Age::Fin(_)) => false,
        }
    }
}

/// A mode: multiplicity paired with age. All operations are componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub mult: Mult,
    pub age: Age,
}

/// `1v`, the multiplicative unit: linear, current scope.
pub const LIN_NOW: Mode = Mode { mult: Mult::One, age: Age::Fin(0) };
/// `1^1`, linear one scope up. Scaling by this is how scopes open.
pub const LIN_UP: Mode = Mode { mult: Mult::One, age: Age::Fin(1) };
/// `1inf`: linear but scope-insensitive.
pub const LIN_INF: Mode = Mode { mult: Mult::One, age: Age::Inf };
/// `winf`: unrestricted and scope-insensitive.
pub const UNR_INF: Mode = Mode { mult: Mult::Many, age: Age::Inf };
/// `wv`: unrestricted, current scope.
pub const UNR_NOW: Mode = Mode { mult: Mult::Many, age: Age::Fin(0) };

impl Mode {
    pub const fn new(mult: Mult, age: Age) -> Mode {
        Mode { mult, age }
    }

    pub fn add(self, other: Mode) -> Mode {
        Mode { mult: self.mult.add(other.mult), age: self.age.add(other.age) }
    }

    pub fn mul(self, other: Mode) -> Mode {
        Mode { mult: self.mult.mul(other.mult), age: self.age.mul(other.age) }
    }

    pub fn le(self, other: Mode) -> bool {
        self.mult.le(other.mult) && self.age.le(other.age)
    }

    /// Exact division by `1^1`: the unique `m` with `1^1 * m == self`, if any.
    /// Used when demands cross a scope boundary in the inward direction.
    pub fn div_up(self) -> Option<Mode> {
        match self.age {
            Age::Fin(0) => None,
            Age::Fin(k) => Some(Mode { mult: self.mult, age: Age::Fin(k - 1) }),
            Age::Inf => Some(Mode { mult: self.mult, age: Age::Inf }),
        }
    }
}

pub fn mode_add(m: Mode, n: Mode) -> Mode {
    m.add(n)
}

pub fn mode_mul(m: Mode, n: Mode) -> Mode {
    m.mul(n)
}

pub fn mode_le(m: Mode, n: Mode) -> bool {
    m.le(n)
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::One => write!(f, "1"),
            Mult::Many => write!(f, "w"),
        }
    }
}

impl fmt::Display for Age {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Age::Fin(0) => write!(f, "v"),
            Age::Fin(k) => write!(f, "^{}", k),
            Age::Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mult, self.age)
    }
}

/// The finite slice of modes the exhaustive algebra tests range over:
/// both multiplicities crossed with ages `v, ^1, .., ^max_k, inf`.
pub fn mode_universe(max_k: u32) -> Vec<Mode> {
    let mut out = Vec::new();
    for mult in [Mult::One, Mult::Many] {
        for k in 0..=max_k {
            out.push(Mode::new(mult, Age::Fin(k)));
        }
        out.push(Mode::new(mult, Age::Inf));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Mode {
        crate::parser::parse_mode(s).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(m("1v").add(m("1v")), m("wv"));
        assert_eq!(m("1^1").add(m("1^2")), m("winf"));
        assert_eq!(m("winf").add(m("1^3")), m("winf"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(m("1^1").mul(m("1^2")), m("1^3"));
        for mode in mode_universe(4) {
            assert_eq!(LIN_NOW.mul(mode), mode);
            assert_eq!(mode.mul(LIN_NOW), mode);
        }
        assert_eq!(m("w^1").mul(m("1inf")), m("winf"));
    }

    #[test]
    fn le_examples() {
        assert!(m("1v").le(m("winf")));
        assert!(!m("1^1").le(m("1^2")));
        for mode in mode_universe(4) {
            assert!(mode.le(mode));
        }
    }

    #[test]
    fn flat_age_order() {
        for j in 0..5 {
            for k in 0..5 {
                assert_eq!(Age::Fin(j).le(Age::Fin(k)), j == k);
            }
            assert!(Age::Fin(j).le(Age::Inf));
            assert!(!Age::Inf.le(Age::Fin(j)));
        }
        assert!(Age::Inf.le(Age::Inf));
    }

    #[test]
    fn semiring_laws_exhaustive() {
        let universe = mode_universe(4);
        for &a in &universe {
            for &b in &universe {
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
                for &c in &universe {
                    assert_eq!(a.add(b).add(c), a.add(b.add(c)));
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                    assert_eq!(a.mul(b.add(c)), a.mul(b).add(a.mul(c)));
                }
            }
        }
    }

    #[test]
    fn order_is_partial_order_and_monotone() {
        let universe = mode_universe(4);
        for &a in &universe {
            for &b in &universe {
                if a.le(b) && b.le(a) {
                    assert_eq!(a, b);
                }
                for &c in &universe {
                    if a.le(b) && b.le(c) {
                        assert!(a.le(c));
                    }
                }
            }
        }
        for &a in &universe {
            for &a2 in &universe {
                if !a.le(a2) {
                    continue;
                }
                for &b in &universe {
                    for &b2 in &universe {
                        if b.le(b2) {
                            assert!(a.add(b).le(a2.add(b2)));
                            assert!(a.mul(b).le(a2.mul(b2)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn div_up_is_exact_partial_inverse() {
        for mode in mode_universe(6) {
            match mode.div_up() {
                Some(q) => assert_eq!(LIN_UP.mul(q), mode),
                None => assert_eq!(mode.age, Age::Fin(0)),
            }
        }
    }
}
