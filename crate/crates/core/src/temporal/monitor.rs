//! Direct trace monitor for the pattern catalog.
//!
//! Works on scope intervals rather than formulas, so it doubles as an
//! independent check of the LTL compiler.

use crate::kernel::{Failure, Outcome, Trace, Verdict, Witness};

use super::ltl::LtlError;
use super::patterns::{check_slots, PatternError, PatternId, PatternSlots, ScopeId};

/// A scope occurrence: `[start, end)` where `end` is `None` when the closing
/// R has not been observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: usize,
    pub end: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Local {
    Ok,
    Pending,
    Violated(usize),
}

struct Columns {
    p: Vec<bool>,
    s: Vec<bool>,
    t: Vec<bool>,
    q: Vec<bool>,
    r: Vec<bool>,
    n: usize,
}

impl Columns {
    fn new(t: &Trace, slots: &PatternSlots) -> Result<Self, PatternError> {
        let col = |k: &str| -> Result<Vec<bool>, PatternError> {
            match slots.get(k) {
                Some(id) => t
                    .column(id)
                    .ok_or_else(|| PatternError::Ltl(LtlError::UnknownAtom(id.clone()))),
                None => Ok(vec![false; t.len()]),
            }
        };
        Ok(Columns {
            p: col("P")?,
            s: col("S")?,
            t: col("T")?,
            q: col("Q")?,
            r: col("R")?,
            n: t.len(),
        })
    }
}

/// Scope intervals of a trace, given the Q and R columns.
pub fn scope_intervals(scope: ScopeId, q: &[bool], r: &[bool]) -> Vec<Interval> {
    let n = q.len().max(r.len());
    let next_r = |from: usize| (from..n).find(|&j| r[j]);
    match scope {
        ScopeId::Global => vec![Interval { start: 0, end: None }],
        ScopeId::BeforeR => next_r(0)
            .map(|b| Interval { start: 0, end: Some(b) })
            .into_iter()
            .collect(),
        ScopeId::AfterQ => (0..n)
            .find(|&i| q[i])
            .map(|a| Interval { start: a, end: None })
            .into_iter()
            .collect(),
        ScopeId::BetweenQandR => (0..n)
            .filter(|&i| q[i] && !r[i])
            .filter_map(|i| next_r(i).map(|b| Interval { start: i, end: Some(b) }))
            .collect(),
        ScopeId::AfterQuntilR => (0..n)
            .filter(|&i| q[i] && !r[i])
            .map(|i| Interval { start: i, end: next_r(i) })
            .collect(),
    }
}

/// Checks a pattern under a scope directly on a trace.
pub fn check_trace(
    p: PatternId,
    scope: ScopeId,
    slots: &PatternSlots,
    trace: &Trace,
) -> Result<Verdict, PatternError> {
    check_slots(p, scope, slots)?;
    let c = Columns::new(trace, slots)?;
    let intervals = scope_intervals(scope, &c.q, &c.r);
    let anchored = matches!(scope, ScopeId::Global | ScopeId::AfterQ);

    let mut violated: Option<usize> = None;
    let mut pending = false;
    for iv in &intervals {
        match check_interval(p, anchored, &c, *iv) {
            Local::Ok => {}
            Local::Pending => pending = true,
            Local::Violated(step) => violated = Some(violated.map_or(step, |v| v.min(step))),
        }
    }

    let label = format!("{p} {scope}");
    Ok(if let Some(step) = violated {
        Verdict::violated(
            Failure::Pattern,
            Witness::Trace {
                trace: trace.clone(),
                step,
            },
            format!("{label} violated at step {step}"),
        )
    } else if pending {
        let step = trace.len().saturating_sub(1);
        Verdict::bound_exhausted(
            Witness::Trace {
                trace: trace.clone(),
                step,
            },
            format!("{label}: obligation still open after {} steps", trace.len()),
        )
    } else {
        Verdict::holds(format!("{label} holds on {} steps", trace.len()))
    })
}

fn check_interval(p: PatternId, anchored: bool, c: &Columns, iv: Interval) -> Local {
    let a = iv.start;
    let closed = iv.end.is_some();
    let b = iv.end.unwrap_or(c.n);
    let first = |col: &[bool], from: usize, to: usize| (from..to).find(|&i| col[i]);
    // open obligations are pending, closed ones fail at the segment end
    let unmet = || if closed { Local::Violated(b) } else { Local::Pending };

    match p {
        PatternId::Absence => first(&c.p, a, b).map_or(Local::Ok, Local::Violated),
        PatternId::Universality => (a..b).find(|&i| !c.p[i]).map_or(Local::Ok, Local::Violated),
        PatternId::Existence => {
            if first(&c.p, a, b).is_some() {
                Local::Ok
            } else {
                unmet()
            }
        }
        PatternId::BoundedExistence { k } => {
            let starts = (a..b).filter(|&i| c.p[i] && (i == a || !c.p[i - 1]));
            starts.clone().nth(k as usize).map_or(Local::Ok, Local::Violated)
        }
        PatternId::Precedence => match first(&c.p, a, b) {
            Some(pi) if first(&c.s, a, pi + 1).is_none() => Local::Violated(pi),
            _ => Local::Ok,
        },
        PatternId::Response => {
            let answered = (a..b)
                .filter(|&i| c.p[i])
                .all(|pi| first(&c.s, pi, b).is_some());
            if answered {
                Local::Ok
            } else {
                unmet()
            }
        }
        PatternId::PrecedenceChain21 => match first(&c.p, a, b) {
            Some(pi) => {
                let caused = first(&c.s, a, pi)
                    .is_some_and(|si| first(&c.t, si + 1, pi + 1).is_some());
                if caused {
                    Local::Ok
                } else {
                    Local::Violated(pi)
                }
            }
            None => Local::Ok,
        },
        PatternId::PrecedenceChain12 if anchored => {
            // any S followed by T forces P no later than the first S
            let Some(s0) = first(&c.s, a, c.n) else {
                return Local::Ok;
            };
            let chained = (s0..c.n)
                .filter(|&i| c.s[i])
                .any(|si| first(&c.t, si + 1, c.n).is_some());
            if !chained || first(&c.p, a, s0 + 1).is_some() {
                Local::Ok
            } else {
                Local::Violated(s0)
            }
        }
        PatternId::PrecedenceChain12 => {
            let stop = first(&c.p, a, b).unwrap_or(b);
            (a..stop)
                .find(|&si| c.s[si] && first(&c.t, si + 1, b).is_some())
                .map_or(Local::Ok, Local::Violated)
        }
        PatternId::ResponseChain12 => {
            // T may coincide with the closing R
            let t_end = if closed { b + 1 } else { c.n };
            let answered = (a..b).filter(|&i| c.p[i]).all(|pi| {
                (pi..b)
                    .filter(|&si| c.s[si])
                    .any(|si| first(&c.t, si + 1, t_end).is_some())
            });
            if answered {
                Local::Ok
            } else {
                unmet()
            }
        }
        PatternId::ResponseChain21 => {
            let t_end = if closed { b + 1 } else { c.n };
            let last_p = (0..c.n).rev().find(|&i| c.p[i]);
            let answered = (a..b).filter(|&i| c.s[i]).all(|si| {
                match first(&c.t, si + 1, t_end) {
                    Some(ti) => last_p.is_some_and(|lp| lp >= ti),
                    None => true,
                }
            });
            // P is never bounded by the scope, so a miss is never final
            if answered {
                Local::Ok
            } else {
                Local::Pending
            }
        }
    }
}

/// Holds/Violated/BoundExhausted reading of a pattern on a trace.
pub fn classify_trace(
    p: PatternId,
    scope: ScopeId,
    slots: &PatternSlots,
    trace: &Trace,
) -> Result<Outcome, PatternError> {
    check_trace(p, scope, slots, trace).map(|v| v.outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::patterns::slots_from;

    fn trace(cols: &[(&str, &[u8])]) -> Trace {
        let names: Vec<&str> = cols.iter().map(|(n, _)| *n).collect();
        Trace::from_fn(&names, cols[0].1.len(), |step, c| cols[c].1[step] == 1)
    }

    fn ps() -> PatternSlots {
        slots_from([("P", "p"), ("S", "s")])
    }

    #[test]
    fn response_answered_holds() {
        let t = trace(&[("p", &[0, 1, 0, 0]), ("s", &[0, 0, 0, 1])]);
        let v = check_trace(PatternId::Response, ScopeId::Global, &ps(), &t).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.witness.is_none());
    }

    #[test]
    fn response_at_final_step_is_undecided() {
        let t = trace(&[("p", &[0, 0, 0, 1]), ("s", &[1, 0, 0, 0])]);
        let v = check_trace(PatternId::Response, ScopeId::Global, &ps(), &t).unwrap();
        assert_eq!(v.outcome, Outcome::BoundExhausted);
        assert_eq!(v.witness_step(), Some(3));
    }

    #[test]
    fn absence_without_p_is_vacuous() {
        let t = trace(&[("p", &[0, 0, 0])]);
        let v = check_trace(PatternId::Absence, ScopeId::Global, &slots_from([("P", "p")]), &t).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn violations_report_the_earliest_step() {
        let t = trace(&[("p", &[0, 0, 1, 0, 1])]);
        let v = check_trace(PatternId::Absence, ScopeId::Global, &slots_from([("P", "p")]), &t).unwrap();
        assert_eq!(v.outcome, Outcome::Violated);
        assert_eq!(v.witness_step(), Some(2));
        assert_eq!(v.failure, Some(Failure::Pattern));
    }

    #[test]
    fn between_ignores_an_unclosed_segment() {
        let slots = slots_from([("P", "p"), ("Q", "q"), ("R", "r")]);
        let t = trace(&[
            ("p", &[0, 1, 0, 1, 1]),
            ("q", &[1, 0, 0, 1, 0]),
            ("r", &[0, 0, 1, 0, 0]),
        ]);
        let v = check_trace(PatternId::Absence, ScopeId::BetweenQandR, &slots, &t).unwrap();
        assert_eq!(v.witness_step(), Some(1));
        let t2 = t.clone();
        let ivs = scope_intervals(
            ScopeId::BetweenQandR,
            &t2.column("q").unwrap(),
            &t2.column("r").unwrap(),
        );
        assert_eq!(ivs, vec![Interval { start: 0, end: Some(2) }]);
    }

    #[test]
    fn bounded_existence_counts_runs_not_steps() {
        let slots = slots_from([("P", "p")]);
        let t = trace(&[("p", &[1, 1, 1, 0, 1, 1])]);
        let k2 = check_trace(PatternId::BoundedExistence { k: 2 }, ScopeId::Global, &slots, &t).unwrap();
        assert_eq!(k2.outcome, Outcome::Holds);
        let k1 = check_trace(PatternId::BoundedExistence { k: 1 }, ScopeId::Global, &slots, &t).unwrap();
        assert_eq!(k1.witness_step(), Some(4));
    }
}
