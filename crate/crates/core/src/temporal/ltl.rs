//! Linear temporal logic over finite traces.
//!
//! Positions `0..n` are the observed steps; position `n` is the empty
//! suffix. Until is strong, Eventually needs an in-trace witness and Always
//! ranges over the observed steps only.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{Outcome, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("atom `{0}` is not recorded in the trace")]
    UnknownAtom(String),
    #[error("position {index} is past the end of a trace of length {len}")]
    Position { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Always(Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
}

pub fn atom(id: impl Into<String>) -> LtlFormula {
    LtlFormula::Atom(id.into())
}

impl LtlFormula {
    pub fn implies(self, rhs: LtlFormula) -> Self {
        LtlFormula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn until(self, rhs: LtlFormula) -> Self {
        LtlFormula::Until(Box::new(self), Box::new(rhs))
    }

    /// `self W rhs`, i.e. `(self U rhs) ∨ □self`.
    pub fn weak_until(self, rhs: LtlFormula) -> Self {
        self.clone().until(rhs) | self.always()
    }

    pub fn next(self) -> Self {
        LtlFormula::Next(Box::new(self))
    }

    pub fn always(self) -> Self {
        LtlFormula::Always(Box::new(self))
    }

    pub fn eventually(self) -> Self {
        LtlFormula::Eventually(Box::new(self))
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            LtlFormula::True | LtlFormula::False => {}
            LtlFormula::Atom(a) => {
                out.insert(a);
            }
            LtlFormula::Not(g)
            | LtlFormula::Next(g)
            | LtlFormula::Always(g)
            | LtlFormula::Eventually(g) => g.collect_atoms(out),
            LtlFormula::And(a, b)
            | LtlFormula::Or(a, b)
            | LtlFormula::Implies(a, b)
            | LtlFormula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LtlFormula::True | LtlFormula::False | LtlFormula::Atom(_) => 1,
            LtlFormula::Not(g)
            | LtlFormula::Next(g)
            | LtlFormula::Always(g)
            | LtlFormula::Eventually(g) => 1 + g.size(),
            LtlFormula::And(a, b)
            | LtlFormula::Or(a, b)
            | LtlFormula::Implies(a, b)
            | LtlFormula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Plain-ASCII rendering (`G`, `F`, `X`, `U`, `!`, `&`, `|`, `->`).
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, &ASCII, true);
        out
    }

    fn write(&self, out: &mut String, sym: &Symbols, top: bool) {
        let binary = |out: &mut String, a: &LtlFormula, op: &str, b: &LtlFormula| {
            if !top {
                out.push('(');
            }
            a.write(out, sym, false);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            b.write(out, sym, false);
            if !top {
                out.push(')');
            }
        };
        match self {
            LtlFormula::True => out.push_str(sym.top),
            LtlFormula::False => out.push_str(sym.bottom),
            LtlFormula::Atom(a) => out.push_str(a),
            LtlFormula::Not(g) => {
                out.push_str(sym.not);
                g.write(out, sym, false);
            }
            LtlFormula::Next(g) => {
                out.push_str(sym.next);
                g.write(out, sym, false);
            }
            LtlFormula::Always(g) => {
                out.push_str(sym.always);
                g.write(out, sym, false);
            }
            LtlFormula::Eventually(g) => {
                out.push_str(sym.eventually);
                g.write(out, sym, false);
            }
            LtlFormula::And(a, b) => binary(out, a, sym.and, b),
            LtlFormula::Or(a, b) => binary(out, a, sym.or, b),
            LtlFormula::Implies(a, b) => binary(out, a, sym.implies, b),
            LtlFormula::Until(a, b) => binary(out, a, sym.until, b),
        }
    }
}

struct Symbols {
    top: &'static str,
    bottom: &'static str,
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    next: &'static str,
    always: &'static str,
    eventually: &'static str,
    until: &'static str,
}

const UNICODE: Symbols = Symbols {
    top: "⊤",
    bottom: "⊥",
    not: "¬",
    and: "∧",
    or: "∨",
    implies: "⟹",
    next: "◯",
    always: "□",
    eventually: "◇",
    until: "𝒰",
};

const ASCII: Symbols = Symbols {
    top: "true",
    bottom: "false",
    not: "!",
    and: "&",
    or: "|",
    implies: "->",
    next: "X",
    always: "G",
    eventually: "F",
    until: "U",
};

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, &UNICODE, true);
        f.write_str(&out)
    }
}

impl Not for LtlFormula {
    type Output = LtlFormula;
    fn not(self) -> LtlFormula {
        LtlFormula::Not(Box::new(self))
    }
}

impl BitAnd for LtlFormula {
    type Output = LtlFormula;
    fn bitand(self, rhs: LtlFormula) -> LtlFormula {
        LtlFormula::And(Box::new(self), Box::new(rhs))
    }
}

impl BitOr for LtlFormula {
    type Output = LtlFormula;
    fn bitor(self, rhs: LtlFormula) -> LtlFormula {
        LtlFormula::Or(Box::new(self), Box::new(rhs))
    }
}

/// How obligations still open at the end of the trace are valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Two-valued finite-trace semantics.
    Finite,
    /// Pending Eventually, Until and Next count as satisfied.
    Optimistic,
    /// Pending Eventually, Until and Next count as failed.
    Pessimistic,
}

impl Mode {
    fn dual(self) -> Mode {
        match self {
            Mode::Finite => Mode::Finite,
            Mode::Optimistic => Mode::Pessimistic,
            Mode::Pessimistic => Mode::Optimistic,
        }
    }

    fn pending(self) -> bool {
        self == Mode::Optimistic
    }
}

/// Truth values of `f` at every position `0..=n` of `t`.
pub fn valuate(f: &LtlFormula, t: &Trace, mode: Mode) -> Result<Vec<bool>, LtlError> {
    let n = t.len();
    Ok(match f {
        LtlFormula::True => vec![true; n + 1],
        LtlFormula::False => vec![false; n + 1],
        LtlFormula::Atom(a) => {
            let mut col = t
                .column(a)
                .ok_or_else(|| LtlError::UnknownAtom(a.clone()))?;
            col.push(false);
            col
        }
        LtlFormula::Not(g) => valuate(g, t, mode.dual())?.into_iter().map(|v| !v).collect(),
        LtlFormula::And(a, b) => zip(valuate(a, t, mode)?, valuate(b, t, mode)?, |x, y| x && y),
        LtlFormula::Or(a, b) => zip(valuate(a, t, mode)?, valuate(b, t, mode)?, |x, y| x || y),
        LtlFormula::Implies(a, b) => zip(
            valuate(a, t, mode.dual())?,
            valuate(b, t, mode)?,
            |x, y| !x || y,
        ),
        LtlFormula::Next(g) => {
            let g = valuate(g, t, mode)?;
            (0..=n)
                .map(|i| if i + 1 < n { g[i + 1] } else { mode.pending() })
                .collect()
        }
        LtlFormula::Always(g) => {
            let g = valuate(g, t, mode)?;
            let mut out = vec![true; n + 1];
            for i in (0..n).rev() {
                out[i] = g[i] && out[i + 1];
            }
            out
        }
        LtlFormula::Eventually(g) => {
            let g = valuate(g, t, mode)?;
            let mut out = vec![mode.pending(); n + 1];
            for i in (0..n).rev() {
                out[i] = g[i] || out[i + 1];
            }
            out
        }
        LtlFormula::Until(a, b) => {
            let a = valuate(a, t, mode)?;
            let b = valuate(b, t, mode)?;
            let mut out = vec![mode.pending(); n + 1];
            for i in (0..n).rev() {
                out[i] = b[i] || (a[i] && out[i + 1]);
            }
            out
        }
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Finite-trace truth of `f` at position `i`, where `i == t.len()` is the empty suffix.
pub fn ltl_eval(f: &LtlFormula, t: &Trace, i: usize) -> Result<bool, LtlError> {
    ltl_eval_mode(f, t, i, Mode::Finite)
}

pub fn ltl_eval_mode(f: &LtlFormula, t: &Trace, i: usize, mode: Mode) -> Result<bool, LtlError> {
    if i > t.len() {
        return Err(LtlError::Position {
            index: i,
            len: t.len(),
        });
    }
    Ok(valuate(f, t, mode)?[i])
}

/// Three-way reading of `f` on `t`: true is `Holds`; false only because of
/// obligations still open at the end is `BoundExhausted`; otherwise `Violated`.
pub fn classify(f: &LtlFormula, t: &Trace) -> Result<Outcome, LtlError> {
    if ltl_eval(f, t, 0)? {
        Ok(Outcome::Holds)
    } else if ltl_eval_mode(f, t, 0, Mode::Optimistic)? {
        Ok(Outcome::BoundExhausted)
    } else {
        Ok(Outcome::Violated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trace(cols: &[(&str, &[u8])]) -> Trace {
        let names: Vec<&str> = cols.iter().map(|(n, _)| *n).collect();
        let len = cols[0].1.len();
        Trace::from_fn(&names, len, |step, c| cols[c].1[step] == 1)
    }

    /// Direct recursive reading of the finite semantics, used as an oracle.
    fn naive(f: &LtlFormula, t: &Trace, i: usize) -> bool {
        let n = t.len();
        match f {
            LtlFormula::True => true,
            LtlFormula::False => false,
            LtlFormula::Atom(a) => i < n && t.value(i, a).unwrap(),
            LtlFormula::Not(g) => !naive(g, t, i),
            LtlFormula::And(a, b) => naive(a, t, i) && naive(b, t, i),
            LtlFormula::Or(a, b) => naive(a, t, i) || naive(b, t, i),
            LtlFormula::Implies(a, b) => !naive(a, t, i) || naive(b, t, i),
            LtlFormula::Next(g) => i + 1 < n && naive(g, t, i + 1),
            LtlFormula::Always(g) => (i..n).all(|j| naive(g, t, j)),
            LtlFormula::Eventually(g) => (i..n).any(|j| naive(g, t, j)),
            LtlFormula::Until(a, b) => {
                (i..n).any(|j| naive(b, t, j) && (i..j).all(|k| naive(a, t, k)))
            }
        }
    }

    #[test]
    fn always_true_holds_on_any_trace() {
        let t = trace(&[("p", &[0, 1, 0])]);
        assert!(ltl_eval(&LtlFormula::True.always(), &t, 0).unwrap());
    }

    #[test]
    fn eventually_needs_a_witness() {
        let t = trace(&[("p", &[0, 0, 0, 0])]);
        assert!(!ltl_eval(&atom("p").eventually(), &t, 0).unwrap());
        assert_eq!(classify(&atom("p").eventually(), &t).unwrap(), Outcome::BoundExhausted);
    }

    #[test]
    fn until_fails_when_left_side_breaks_first() {
        let t = trace(&[("P", &[1, 0, 0, 0]), ("R", &[0, 0, 1, 0])]);
        assert!(!ltl_eval(&(!atom("P")).until(atom("R")), &t, 0).unwrap());
        assert_eq!(classify(&(!atom("P")).until(atom("R")), &t).unwrap(), Outcome::Violated);
    }

    #[test]
    fn empty_suffix_semantics() {
        let t = trace(&[("p", &[1, 1])]);
        assert!(ltl_eval(&atom("p").always(), &t, 2).unwrap());
        assert!(!ltl_eval(&atom("p").eventually(), &t, 2).unwrap());
        assert!(!ltl_eval(&atom("p"), &t, 2).unwrap());
        assert!(ltl_eval(&atom("p"), &t, 3).is_err());
    }

    #[test]
    fn unknown_atom_is_reported() {
        let t = trace(&[("p", &[1])]);
        assert_eq!(
            ltl_eval(&atom("q"), &t, 0),
            Err(LtlError::UnknownAtom("q".into()))
        );
    }

    #[test]
    fn next_at_the_last_step_is_pending() {
        let t = trace(&[("p", &[0, 1])]);
        let f = atom("p").next();
        assert!(ltl_eval(&f, &t, 0).unwrap());
        assert!(!ltl_eval(&f, &t, 1).unwrap());
        assert!(ltl_eval_mode(&f, &t, 1, Mode::Optimistic).unwrap());
        assert!(!ltl_eval_mode(&f, &t, 1, Mode::Pessimistic).unwrap());
    }

    #[test]
    fn rendering() {
        let f = (atom("P").implies(atom("S").eventually())).always();
        assert_eq!(f.to_string(), "□(P ⟹ ◇S)");
        assert_eq!(f.to_ascii(), "G(P -> FS)");
        let g = (!atom("P") & !atom("R")).until(atom("R"));
        assert_eq!(g.to_string(), "(¬P ∧ ¬R) 𝒰 R");
    }

    fn arb_formula() -> impl Strategy<Value = LtlFormula> {
        let leaf = prop_oneof![
            Just(LtlFormula::True),
            Just(LtlFormula::False),
            Just(atom("a")),
            Just(atom("b")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|g| !g),
                inner.clone().prop_map(LtlFormula::next),
                inner.clone().prop_map(LtlFormula::always),
                inner.clone().prop_map(LtlFormula::eventually),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a & b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a | b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
            ]
        })
    }

    fn arb_trace() -> impl Strategy<Value = Trace> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 0..7).prop_map(|steps| {
            Trace::from_steps(
                vec!["a".into(), "b".into()],
                steps.into_iter().map(|(a, b)| vec![a, b]).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn tabulation_matches_recursive_semantics(f in arb_formula(), t in arb_trace()) {
            for i in 0..=t.len() {
                prop_assert_eq!(ltl_eval(&f, &t, i).unwrap(), naive(&f, &t, i));
            }
        }

        #[test]
        fn modes_are_ordered(f in arb_formula(), t in arb_trace()) {
            let o = valuate(&f, &t, Mode::Optimistic).unwrap();
            let v = valuate(&f, &t, Mode::Finite).unwrap();
            let u = valuate(&f, &t, Mode::Pessimistic).unwrap();
            for i in 0..=t.len() {
                prop_assert!(!u[i] || v[i]);
                prop_assert!(!v[i] || o[i]);
            }
        }

        #[test]
        fn weak_until_is_until_or_always(t in arb_trace()) {
            let w = atom("a").weak_until(atom("b"));
            for i in 0..t.len() {
                let direct = (i..t.len()).all(|j| t.value(j, "a").unwrap())
                    || (i..t.len()).any(|j| t.value(j, "b").unwrap()
                        && (i..j).all(|k| t.value(k, "a").unwrap()));
                prop_assert_eq!(ltl_eval(&w, &t, i).unwrap(), direct);
            }
        }
    }
}
