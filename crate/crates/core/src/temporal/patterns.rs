//! Specification patterns and scopes, compiled to LTL.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ltl::{atom, LtlFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("{pattern} {scope} is missing slots: {}", .missing.join(", "))]
    MissingSlots {
        pattern: String,
        scope: String,
        missing: Vec<String>,
    },
    #[error("{pattern} {scope} does not take slots: {}", .extra.join(", "))]
    ExtraSlots {
        pattern: String,
        scope: String,
        extra: Vec<String>,
    },
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Ltl(#[from] super::ltl::LtlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternId {
    Absence,
    Existence,
    BoundedExistence { k: u32 },
    Universality,
    Precedence,
    Response,
    PrecedenceChain21,
    PrecedenceChain12,
    ResponseChain21,
    ResponseChain12,
}

impl PatternId {
    pub const DEFAULT_K: u32 = 2;

    /// Every pattern, with bounded existence at its default bound.
    pub fn all() -> [PatternId; 10] {
        [
            PatternId::Absence,
            PatternId::Existence,
            PatternId::BoundedExistence { k: Self::DEFAULT_K },
            PatternId::Universality,
            PatternId::Precedence,
            PatternId::Response,
            PatternId::PrecedenceChain21,
            PatternId::PrecedenceChain12,
            PatternId::ResponseChain21,
            PatternId::ResponseChain12,
        ]
    }

    /// Catalog identifier, e.g. `BOUNDED_EXISTENCE`.
    pub fn key(self) -> &'static str {
        match self {
            PatternId::Absence => "ABSENCE",
            PatternId::Existence => "EXISTENCE",
            PatternId::BoundedExistence { .. } => "BOUNDED_EXISTENCE",
            PatternId::Universality => "UNIVERSALITY",
            PatternId::Precedence => "PRECEDENCE",
            PatternId::Response => "RESPONSE",
            PatternId::PrecedenceChain21 => "PRECEDENCE_CHAIN_2_1",
            PatternId::PrecedenceChain12 => "PRECEDENCE_CHAIN_1_2",
            PatternId::ResponseChain21 => "RESPONSE_CHAIN_2_1",
            PatternId::ResponseChain12 => "RESPONSE_CHAIN_1_2",
        }
    }

    pub fn from_key(key: &str) -> Option<PatternId> {
        Self::all().into_iter().find(|p| p.key() == key)
    }

    /// Condition slots used by the pattern body.
    pub fn slots(self) -> &'static [&'static str] {
        match self {
            PatternId::Absence
            | PatternId::Existence
            | PatternId::BoundedExistence { .. }
            | PatternId::Universality => &["P"],
            PatternId::Precedence | PatternId::Response => &["P", "S"],
            PatternId::PrecedenceChain21
            | PatternId::PrecedenceChain12
            | PatternId::ResponseChain21
            | PatternId::ResponseChain12 => &["P", "S", "T"],
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternId::BoundedExistence { k } => write!(f, "BOUNDED_EXISTENCE(k={k})"),
            other => f.write_str(other.key()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeId {
    Global,
    BeforeR,
    AfterQ,
    BetweenQandR,
    AfterQuntilR,
}

impl ScopeId {
    pub fn all() -> [ScopeId; 5] {
        [
            ScopeId::Global,
            ScopeId::BeforeR,
            ScopeId::AfterQ,
            ScopeId::BetweenQandR,
            ScopeId::AfterQuntilR,
        ]
    }

    pub fn key(self) -> &'static str {
        match self {
            ScopeId::Global => "GLOBAL",
            ScopeId::BeforeR => "BEFORE",
            ScopeId::AfterQ => "AFTER",
            ScopeId::BetweenQandR => "BETWEEN",
            ScopeId::AfterQuntilR => "AFTER_UNTIL",
        }
    }

    pub fn from_key(key: &str) -> Option<ScopeId> {
        Self::all().into_iter().find(|s| s.key() == key)
    }

    pub fn slots(self) -> &'static [&'static str] {
        match self {
            ScopeId::Global => &[],
            ScopeId::BeforeR => &["R"],
            ScopeId::AfterQ => &["Q"],
            ScopeId::BetweenQandR | ScopeId::AfterQuntilR => &["Q", "R"],
        }
    }
}

impl fmt::Display for ScopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Slot letter (`P`, `S`, `T`, `Q`, `R`) to condition id.
pub type PatternSlots = BTreeMap<String, String>;

/// Slot letters demanded by a pattern under a scope, pattern slots first.
pub fn required_slots(p: PatternId, sc: ScopeId) -> Vec<&'static str> {
    p.slots().iter().chain(sc.slots()).copied().collect()
}

pub(crate) fn check_slots(p: PatternId, sc: ScopeId, slots: &PatternSlots) -> Result<(), PatternError> {
    let required = required_slots(p, sc);
    let missing: Vec<String> = required
        .iter()
        .filter(|s| !slots.contains_key(**s))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(PatternError::MissingSlots {
            pattern: p.to_string(),
            scope: sc.to_string(),
            missing,
        });
    }
    let extra: Vec<String> = slots
        .keys()
        .filter(|s| !required.contains(&s.as_str()))
        .cloned()
        .collect();
    if !extra.is_empty() {
        return Err(PatternError::ExtraSlots {
            pattern: p.to_string(),
            scope: sc.to_string(),
            extra,
        });
    }
    if let PatternId::BoundedExistence { k: 0 } = p {
        return Err(PatternError::Unsupported(
            "bounded existence needs k >= 1; use absence for k = 0".into(),
        ));
    }
    Ok(())
}

struct Atoms {
    p: LtlFormula,
    s: LtlFormula,
    t: LtlFormula,
    q: LtlFormula,
    r: LtlFormula,
}

impl Atoms {
    fn new(slots: &PatternSlots) -> Self {
        let get = |k: &str| slots.get(k).map(atom).unwrap_or(LtlFormula::False);
        Atoms {
            p: get("P"),
            s: get("S"),
            t: get("T"),
            q: get("Q"),
            r: get("R"),
        }
    }
}

/// Compiles a pattern under a scope to a finite-trace LTL formula over the
/// bound condition ids.
pub fn pattern_to_ltl(p: PatternId, sc: ScopeId, slots: &PatternSlots) -> Result<LtlFormula, PatternError> {
    check_slots(p, sc, slots)?;
    let a = Atoms::new(slots);
    let (pp, s, t, q, r) = (a.p, a.s, a.t, a.q, a.r);
    let np = || !pp.clone();
    let nr = || !r.clone();
    // Q ∧ ¬R ∧ ◇R, the opener of a closed segment
    let opens_closed = || q.clone() & nr() & r.clone().eventually();
    let opens = || q.clone() & nr();
    // ¬Q 𝒰 (Q ∧ φ), anchored at the first Q
    let after_first_q = |phi: LtlFormula| {
        q.clone()
            .eventually()
            .implies((!q.clone()).until(q.clone() & phi))
    };

    use PatternId as P;
    use ScopeId as Sc;
    let f = match (p, sc) {
        (P::Absence, Sc::Global) => np().always(),
        (P::Absence, Sc::BeforeR) => r.clone().eventually().implies(np().until(r.clone())),
        (P::Absence, Sc::AfterQ) => q.clone().implies(np().always()).always(),
        (P::Absence, Sc::BetweenQandR) => opens_closed().implies(np().until(r.clone())).always(),
        (P::Absence, Sc::AfterQuntilR) => opens().implies(np().weak_until(r.clone())).always(),

        (P::Existence, Sc::Global) => pp.clone().eventually(),
        (P::Existence, Sc::BeforeR) => nr().weak_until(pp.clone() & nr()),
        (P::Existence, Sc::AfterQ) => {
            (!q.clone()).always() | (q.clone() & pp.clone().eventually()).eventually()
        }
        (P::Existence, Sc::BetweenQandR) => opens().implies(nr().weak_until(pp.clone() & nr())).always(),
        (P::Existence, Sc::AfterQuntilR) => opens().implies(nr().until(pp.clone() & nr())).always(),

        (P::BoundedExistence { k }, Sc::Global) => chain_global(&pp, k),
        (P::BoundedExistence { k }, Sc::BeforeR) => {
            r.clone().eventually().implies(chain_until_r(&pp, &r, k))
        }
        (P::BoundedExistence { k }, Sc::AfterQ) => after_first_q(chain_global(&pp, k)),
        (P::BoundedExistence { k }, Sc::BetweenQandR) => (q.clone() & r.clone().eventually())
            .implies(chain_until_r(&pp, &r, k))
            .always(),
        (P::BoundedExistence { k }, Sc::AfterQuntilR) => {
            opens().implies(chain_weak_until_r(&pp, &r, k)).always()
        }

        (P::Universality, Sc::Global) => pp.clone().always(),
        (P::Universality, Sc::BeforeR) => r.clone().eventually().implies(pp.clone().until(r.clone())),
        (P::Universality, Sc::AfterQ) => q.clone().implies(pp.clone().always()).always(),
        (P::Universality, Sc::BetweenQandR) => {
            opens_closed().implies(pp.clone().until(r.clone())).always()
        }
        (P::Universality, Sc::AfterQuntilR) => {
            opens().implies(pp.clone().weak_until(r.clone())).always()
        }

        (P::Precedence, Sc::Global) => np().weak_until(s.clone()),
        (P::Precedence, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(np().until(s.clone() | r.clone())),
        (P::Precedence, Sc::AfterQ) => after_first_q(np().weak_until(s.clone())),
        (P::Precedence, Sc::BetweenQandR) => {
            opens_closed().implies(np().until(s.clone() | r.clone())).always()
        }
        (P::Precedence, Sc::AfterQuntilR) => {
            opens().implies(np().weak_until(s.clone() | r.clone())).always()
        }

        (P::Response, Sc::Global) => pp.clone().implies(s.clone().eventually()).always(),
        (P::Response, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(response_within(&pp, &s, &r).until(r.clone())),
        (P::Response, Sc::AfterQ) => q
            .clone()
            .implies(pp.clone().implies(s.clone().eventually()).always())
            .always(),
        (P::Response, Sc::BetweenQandR) => opens_closed()
            .implies(response_within(&pp, &s, &r).until(r.clone()))
            .always(),
        (P::Response, Sc::AfterQuntilR) => opens()
            .implies(response_within(&pp, &s, &r).weak_until(r.clone()))
            .always(),

        // P is preceded by S followed by T
        (P::PrecedenceChain21, Sc::Global) => pc21_global(&pp, &s, &t),
        (P::PrecedenceChain21, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(np().until(r.clone() | pc21_cause(&pp, &s, &t))),
        (P::PrecedenceChain21, Sc::AfterQ) => after_first_q(pc21_global(&pp, &s, &t)),
        (P::PrecedenceChain21, Sc::BetweenQandR) => opens_closed()
            .implies(np().until(r.clone() | pc21_cause(&pp, &s, &t)))
            .always(),
        (P::PrecedenceChain21, Sc::AfterQuntilR) => opens()
            .implies(np().until(r.clone() | pc21_cause(&pp, &s, &t)) | np().always())
            .always(),

        // S followed by T is preceded by P
        (P::PrecedenceChain12, Sc::Global) => pc12_global(&pp, &s, &t),
        (P::PrecedenceChain12, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(pc12_guard(&s, &t, &r).until(r.clone() | pp.clone())),
        (P::PrecedenceChain12, Sc::AfterQ) => after_first_q(pc12_global(&pp, &s, &t)),
        (P::PrecedenceChain12, Sc::BetweenQandR) => opens_closed()
            .implies(pc12_guard(&s, &t, &r).until(r.clone() | pp.clone()))
            .always(),
        (P::PrecedenceChain12, Sc::AfterQuntilR) => opens()
            .implies(pc12_guard(&s, &t, &r).weak_until(r.clone() | pp.clone()))
            .always(),

        // S followed by T is followed by P
        (P::ResponseChain21, Sc::Global) => rc21_global(&pp, &s, &t),
        (P::ResponseChain21, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(rc21_step(&pp, &s, &t, &r).until(r.clone())),
        (P::ResponseChain21, Sc::AfterQ) => q.clone().implies(rc21_global(&pp, &s, &t)).always(),
        (P::ResponseChain21, Sc::BetweenQandR) => opens_closed()
            .implies(rc21_step(&pp, &s, &t, &r).until(r.clone()))
            .always(),
        (P::ResponseChain21, Sc::AfterQuntilR) => opens()
            .implies(rc21_step(&pp, &s, &t, &r).weak_until(r.clone()))
            .always(),

        // P is followed by S followed by T
        (P::ResponseChain12, Sc::Global) => rc12_global(&pp, &s, &t),
        (P::ResponseChain12, Sc::BeforeR) => r
            .clone()
            .eventually()
            .implies(rc12_step(&pp, &s, &t, &r).until(r.clone())),
        (P::ResponseChain12, Sc::AfterQ) => q.clone().implies(rc12_global(&pp, &s, &t)).always(),
        (P::ResponseChain12, Sc::BetweenQandR) => opens_closed()
            .implies(rc12_step(&pp, &s, &t, &r).until(r.clone()))
            .always(),
        (P::ResponseChain12, Sc::AfterQuntilR) => opens()
            .implies(rc12_step(&pp, &s, &t, &r).weak_until(r.clone()))
            .always(),
    };
    Ok(f)
}

/// At most `k` maximal P-runs over the whole observed trace.
fn chain_global(p: &LtlFormula, k: u32) -> LtlFormula {
    let mut f = (!p.clone()).always();
    for _ in 0..k {
        f = (!p.clone()).weak_until(p.clone().weak_until(f));
    }
    f
}

/// At most `k` maximal P-runs before the next R, R required.
fn chain_until_r(p: &LtlFormula, r: &LtlFormula, k: u32) -> LtlFormula {
    let mut f = (!p.clone()).until(r.clone());
    for _ in 0..k {
        let inner = (p.clone() & !r.clone()).until(r.clone() | f);
        f = (!p.clone() & !r.clone()).until(r.clone() | inner);
    }
    f
}

/// As [`chain_until_r`], but R need never come.
fn chain_weak_until_r(p: &LtlFormula, r: &LtlFormula, k: u32) -> LtlFormula {
    let mut f = (!p.clone()).weak_until(r.clone());
    for _ in 0..k {
        let inner = (p.clone() & !r.clone()).weak_until(r.clone() | f);
        f = (!p.clone() & !r.clone()).weak_until(r.clone() | inner);
    }
    f
}

fn response_within(p: &LtlFormula, s: &LtlFormula, r: &LtlFormula) -> LtlFormula {
    p.clone()
        .implies((!r.clone()).until(s.clone() & !r.clone()))
}

fn pc21_cause(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula) -> LtlFormula {
    s.clone() & !p.clone() & (!p.clone()).until(t.clone()).next()
}

fn pc21_global(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula) -> LtlFormula {
    p.clone()
        .eventually()
        .implies((!p.clone()).until(pc21_cause(p, s, t)))
}

fn pc12_global(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula) -> LtlFormula {
    (s.clone() & t.clone().eventually().next())
        .eventually()
        .implies((!s.clone()).until(p.clone()))
}

/// No S followed by T inside the current R-segment.
fn pc12_guard(s: &LtlFormula, t: &LtlFormula, r: &LtlFormula) -> LtlFormula {
    !(s.clone() & !r.clone() & (!r.clone()).until(t.clone() & !r.clone()).next())
}

fn rc21_global(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula) -> LtlFormula {
    (s.clone() & t.clone().eventually().next())
        .implies((t.clone() & p.clone().eventually()).eventually().next())
        .always()
}

fn rc21_step(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula, r: &LtlFormula) -> LtlFormula {
    (s.clone() & (!r.clone()).until(t.clone()).next())
        .implies((!r.clone()).until(t.clone() & p.clone().eventually()).next())
}

fn rc12_global(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula) -> LtlFormula {
    p.clone()
        .implies((s.clone() & t.clone().eventually().next()).eventually())
        .always()
}

fn rc12_step(p: &LtlFormula, s: &LtlFormula, t: &LtlFormula, r: &LtlFormula) -> LtlFormula {
    p.clone().implies(
        (!r.clone()).until(s.clone() & !r.clone() & (!r.clone()).until(t.clone()).next()),
    )
}

pub fn slots_from<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> PatternSlots {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_response() {
        let f = pattern_to_ltl(
            PatternId::Response,
            ScopeId::Global,
            &slots_from([("P", "P"), ("S", "S")]),
        )
        .unwrap();
        assert_eq!(f.to_string(), "□(P ⟹ ◇S)");
    }

    #[test]
    fn bounded_existence_between_two_has_the_reference_nesting() {
        let slots = slots_from([("P", "P"), ("Q", "Q"), ("R", "R")]);
        let f = pattern_to_ltl(PatternId::BoundedExistence { k: 2 }, ScopeId::BetweenQandR, &slots).unwrap();
        assert_eq!(
            f.to_string(),
            "□((Q ∧ ◇R) ⟹ ((¬P ∧ ¬R) 𝒰 (R ∨ ((P ∧ ¬R) 𝒰 (R ∨ ((¬P ∧ ¬R) 𝒰 (R ∨ ((P ∧ ¬R) 𝒰 (R ∨ (¬P 𝒰 R))))))))))"
        );
    }

    #[test]
    fn missing_and_extra_slots_are_named() {
        let err = pattern_to_ltl(PatternId::Response, ScopeId::BetweenQandR, &slots_from([("P", "a")]))
            .unwrap_err();
        assert_eq!(
            err,
            PatternError::MissingSlots {
                pattern: "RESPONSE".into(),
                scope: "BETWEEN".into(),
                missing: vec!["S".into(), "Q".into(), "R".into()],
            }
        );
        let err = pattern_to_ltl(PatternId::Absence, ScopeId::Global, &slots_from([("P", "a"), ("R", "b")]))
            .unwrap_err();
        assert!(matches!(err, PatternError::ExtraSlots { extra, .. } if extra == vec!["R".to_string()]));
    }

    #[test]
    fn zero_bound_is_unsupported() {
        let err = pattern_to_ltl(PatternId::BoundedExistence { k: 0 }, ScopeId::Global, &slots_from([("P", "a")]))
            .unwrap_err();
        assert!(matches!(err, PatternError::Unsupported(_)));
    }

    #[test]
    fn every_pair_compiles() {
        for p in PatternId::all() {
            for sc in ScopeId::all() {
                let slots: PatternSlots = required_slots(p, sc)
                    .into_iter()
                    .map(|s| (s.to_string(), s.to_lowercase()))
                    .collect();
                let f = pattern_to_ltl(p, sc, &slots).unwrap();
                let atoms: Vec<String> = f.atoms().into_iter().map(str::to_string).collect();
                let mut expected: Vec<String> = slots.values().cloned().collect();
                expected.sort();
                assert_eq!(atoms, expected, "{p} {sc}");
            }
        }
    }

    #[test]
    fn keys_round_trip() {
        for p in PatternId::all() {
            assert_eq!(PatternId::from_key(p.key()), Some(p));
        }
        for s in ScopeId::all() {
            assert_eq!(ScopeId::from_key(s.key()), Some(s));
        }
    }
}
