//! Transition-system fixtures: a stack drained by popping, a turnstile and a
//! day-stepping calendar.

use crate::kernel::{KernelError, State, SystemModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackState {
    pub items: Vec<i64>,
}

impl StackState {
    /// A stack holding `1..=n`, top last.
    pub fn of_len(n: usize) -> Self {
        Self {
            items: (1..=n as i64).collect(),
        }
    }
}

impl State for StackState {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![("items".into(), format!("{:?}", self.items))]
    }
}

/// Stack of `1 + seed % 16` elements whose main step pops.
pub fn stack_model() -> Result<SystemModel, KernelError> {
    Ok(SystemModel::builder("stack", |seed| StackState::of_len(1 + (seed % 16) as usize))
        .describe("integer stack, popped once per step")
        .main_step(&["items"], |s: &mut StackState| {
            s.items.pop();
        })
        .condition("is_empty", "the stack is empty", |s: &StackState| s.items.is_empty())
        .condition("not_is_empty", "the stack is not empty", |s: &StackState| {
            !s.items.is_empty()
        })
        .measure("count", "the number of stack elements", |s: &StackState| {
            s.items.len() as u64
        })
        .guarded_action("pop", "not_is_empty", &["items"], |s: &mut StackState| {
            s.items.pop();
        })?
        .action("push_zero", &["items"], |s: &mut StackState| s.items.push(0))
        .equivalence("elementwise", |a: &StackState, b: &StackState| a.items == b.items)
        .horizon(20)
        .build())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnstileEvent {
    Idle,
    Coin,
    Push,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnstileState {
    pub coins: u64,
    pub locked: bool,
    pub last: TurnstileEvent,
    /// Whether the last push went through.
    pub passed: bool,
    pub tick: usize,
    pub offset: usize,
}

impl State for TurnstileState {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![
            ("coins".into(), self.coins.to_string()),
            ("locked".into(), self.locked.to_string()),
            ("last".into(), format!("{:?}/{}", self.last, self.passed)),
            ("tick".into(), self.tick.to_string()),
        ]
    }
}

const TURNSTILE_SCRIPT: [TurnstileEvent; 8] = {
    use TurnstileEvent::*;
    [Idle, Coin, Push, Idle, Coin, Coin, Push, Push]
};

fn insert_coin(s: &mut TurnstileState) {
    s.coins += 1;
    s.locked = false;
    s.last = TurnstileEvent::Coin;
    s.passed = false;
}

fn push_arm(s: &mut TurnstileState) {
    s.last = TurnstileEvent::Push;
    s.passed = s.coins > 0;
    if s.passed {
        s.coins -= 1;
        s.locked = s.coins == 0;
    }
}

/// Coin-operated turnstile replaying a fixed visitor script; the seed picks
/// where in each script cycle visitors arrive.
pub fn turnstile_model() -> Result<SystemModel, KernelError> {
    Ok(SystemModel::builder("turnstile", |seed| TurnstileState {
        coins: 0,
        locked: true,
        last: TurnstileEvent::Idle,
        passed: false,
        tick: 0,
        offset: (seed % 3) as usize,
    })
    .describe("turnstile unlocked by coins, one passage per coin")
    .main_step(&["coins", "locked", "last", "tick"], |s: &mut TurnstileState| {
        let event = if s.tick % TURNSTILE_SCRIPT.len() < s.offset {
            TurnstileEvent::Idle
        } else {
            TURNSTILE_SCRIPT[(s.tick - s.offset) % TURNSTILE_SCRIPT.len()]
        };
        s.tick += 1;
        match event {
            TurnstileEvent::Idle => {
                s.last = TurnstileEvent::Idle;
                s.passed = false;
            }
            TurnstileEvent::Coin => insert_coin(s),
            TurnstileEvent::Push => push_arm(s),
        }
    })
    .condition("locked", "the turnstile is locked", |s: &TurnstileState| s.locked)
    .condition("unlocked", "the turnstile is unlocked", |s: &TurnstileState| !s.locked)
    .condition("coins_positive", "unused coins remain", |s: &TurnstileState| s.coins > 0)
    .condition("no_credit", "no unused coins remain", |s: &TurnstileState| s.coins == 0)
    .condition("coin_inserted", "a coin was just inserted", |s: &TurnstileState| {
        s.last == TurnstileEvent::Coin
    })
    .condition("passed", "a visitor just passed", |s: &TurnstileState| {
        s.last == TurnstileEvent::Push && s.passed
    })
    .measure("coins", "the number of unused coins", |s: &TurnstileState| s.coins)
    .measure("coins_missing", "the coins still needed to unlock", |s: &TurnstileState| {
        u64::from(s.locked)
    })
    .action("insert_coin", &["coins", "locked", "last"], insert_coin)
    .guarded_action("pass", "coins_positive", &["coins", "locked", "last"], push_arm)?
    .horizon(40)
    .build())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalendarState {
    pub year: u32,
    /// Zero-based day of the year.
    pub day: u32,
    pub year_len: u32,
    pub equinoxes: Vec<u32>,
}

impl State for CalendarState {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![
            ("year".into(), self.year.to_string()),
            ("day".into(), self.day.to_string()),
        ]
    }
}

const MONTH_LENGTHS: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

fn month_start(day: u32) -> bool {
    MONTH_LENGTHS
        .iter()
        .scan(0, |start, len| {
            let this = *start;
            *start += len;
            Some(this)
        })
        .any(|start| start == day)
}

fn calendar_state(seed: u64, extra_equinox: Option<u32>) -> CalendarState {
    let year_len = 365;
    let shift = (seed % 3) as u32;
    let mut equinoxes = vec![78 + shift, 264 + shift];
    equinoxes.extend(extra_equinox);
    equinoxes.sort_unstable();
    CalendarState {
        year: 2000 + (seed % 100) as u32,
        day: 0,
        year_len,
        equinoxes,
    }
}

fn calendar(name: &str, description: &str, extra_equinox: Option<u32>) -> SystemModel {
    SystemModel::builder(name, move |seed| calendar_state(seed, extra_equinox))
        .describe(description)
        .main_step(&["year", "day"], |s: &mut CalendarState| {
            s.day += 1;
            if s.day == s.year_len {
                s.day = 0;
                s.year += 1;
            }
        })
        .condition("year_beginning", "the year begins", |s: &CalendarState| s.day == 0)
        .condition("year_end", "the end of the year", |s: &CalendarState| {
            s.day + 1 == s.year_len
        })
        .condition("equinox", "an equinox day", |s: &CalendarState| s.equinoxes.contains(&s.day))
        .condition("solstice", "a solstice day", |s: &CalendarState| {
            s.day == 171 || s.day == 354
        })
        .condition("month_start", "the first day of a month", |s: &CalendarState| {
            month_start(s.day)
        })
        .condition("not_year_end", "the year has not ended", |s: &CalendarState| {
            s.day + 1 != s.year_len
        })
        .measure("days_left", "the days left in the year", |s: &CalendarState| {
            u64::from(s.year_len - 1 - s.day)
        })
        .action("advance_day", &["year", "day"], |s: &mut CalendarState| {
            s.day += 1;
            if s.day == s.year_len {
                s.day = 0;
                s.year += 1;
            }
        })
        .horizon(364)
        .build()
}

/// A 365-day year; the seed shifts both equinoxes by up to two days.
pub fn calendar_model() -> SystemModel {
    calendar("calendar", "day-stepping calendar with two equinoxes per year", None)
}

/// The calendar with a third equinox on day 170.
pub fn calendar_3eq_model() -> SystemModel {
    calendar("calendar_3eq", "day-stepping calendar with three equinoxes per year", Some(170))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calendar_has_twelve_month_starts_and_two_equinoxes() {
        let m = calendar_model();
        let t = m
            .generate_trace(m.init(7), 364, &["month_start", "equinox", "year_beginning", "year_end"])
            .unwrap();
        let count = |c: &str| t.column(c).unwrap().iter().filter(|v| **v).count();
        assert_eq!(count("month_start"), 12);
        assert_eq!(count("equinox"), 2);
        assert_eq!(count("year_beginning"), 1);
        assert_eq!(count("year_end"), 1);
        assert_eq!(t.len(), 365);
    }

    #[test]
    fn third_equinox_lies_inside_the_year() {
        let m = calendar_3eq_model();
        let t = m.generate_trace(m.init(7), 364, &["equinox"]).unwrap();
        assert_eq!(t.column("equinox").unwrap().iter().filter(|v| **v).count(), 3);
    }

    #[test]
    fn turnstile_coin_increments_coins() {
        let m = turnstile_model().unwrap();
        let mut s = m.init(0);
        let before = m.eval_measure("coins", &s).unwrap();
        m.apply_action("insert_coin", &mut s).unwrap();
        assert_eq!(m.eval_measure("coins", &s).unwrap(), before + 1);
        assert!(m.eval_condition("unlocked", &s).unwrap());
    }

    #[test]
    fn turnstile_refuses_pass_without_credit() {
        let m = turnstile_model().unwrap();
        let mut s = m.init(0);
        assert!(matches!(
            m.apply_action("pass", &mut s),
            Err(KernelError::GuardFailed { .. })
        ));
    }

    #[test]
    fn stack_model_pops_to_empty() {
        let m = stack_model().unwrap();
        let t = m.generate_trace(m.init(3), 20, &["is_empty"]).unwrap();
        assert!(!t.value(0, "is_empty").unwrap());
        assert!(t.value(4, "is_empty").unwrap());
    }
}
