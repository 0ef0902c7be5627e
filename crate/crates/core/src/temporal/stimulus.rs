//! Bounded stimulus/response verification with a timer variant.

use crate::kernel::{Failure, KernelError, StateRef, Trace, Verdict, Witness};

use super::template::{TemplateKind, TemporalError, TemporalRequirement};

/// Starting from `s0` where the stimulus holds, applies the bound action until
/// the response holds. The timer measure, read once on `s0`, caps the number
/// of iterations.
pub fn verify_stimulus_response(r: &TemporalRequirement, s0: StateRef) -> Result<Verdict, TemporalError> {
    if r.template.kind != TemplateKind::StimulusResponse {
        return Err(TemporalError::Family {
            template: r.template.name.clone(),
            expected: "stimulus/response",
        });
    }
    let slot = |name: &str| r.bindings[name].as_str();
    let m = &r.model;
    let stimulus = m.condition(slot("stimulus"))?;
    let response = m.condition(slot("response"))?;
    let action = m.action(slot("action"))?;
    let timer = m.measure(slot("timer"))?;

    if !stimulus.eval(&s0)? {
        return Ok(Verdict::precondition_unmet(format!(
            "`{}` does not hold initially",
            stimulus.id()
        ))
        .with_iterations(0));
    }

    let variant = timer.eval(&s0)?;
    let mut trace = Trace::new(vec![stimulus.id().to_string(), response.id().to_string()]);
    let mut state = s0;
    let mut iterations: u64 = 0;
    loop {
        let done = response.eval(&state)?;
        trace.push(vec![stimulus.eval(&state)?, done])?;
        let step = trace.len() - 1;
        let witness = |trace: &Trace| Witness::Trace {
            trace: trace.clone(),
            step,
        };
        if done {
            return Ok(Verdict::holds(format!(
                "`{}` reached after {iterations} of at most {variant} iterations",
                response.id()
            ))
            .with_iterations(iterations));
        }
        if iterations == variant {
            return Ok(Verdict::violated(
                Failure::Variant,
                witness(&trace),
                format!(
                    "timer `{}` exhausted after {variant} iterations without `{}`",
                    timer.id(),
                    response.id()
                ),
            )
            .with_iterations(iterations));
        }
        if iterations >= r.time_boundary {
            return Ok(Verdict::bound_exhausted(
                witness(&trace),
                format!("time boundary {} reached", r.time_boundary),
            )
            .with_iterations(iterations));
        }
        match action.apply(&mut state) {
            Ok(()) => iterations += 1,
            Err(err @ (KernelError::GuardFailed { .. } | KernelError::ActionFailed { .. })) => {
                return Ok(Verdict::violated(Failure::Guard, witness(&trace), err.to_string())
                    .with_iterations(iterations));
            }
            Err(err) => return Err(err.into()),
        }
    }
}
