use std::collections::BTreeMap;

use super::{EngineError, ResourceStats, RunOptions, RunOutcome, RunReport, Storage, SurfaceConfiguration, TraceRecord, Verdict};
use crate::model::{Flavor, MhTrans, MultiHeadSdaSpec, SdaSpec, BLANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Counter {
    Home,
    Out,
    Returning,
}

/// Runs a k-sda₂(ℓ). All heads start on `▷`. When a counter head is
/// declared, the run aborts if it stops or reverses on its way back, or if
/// the storage head moves while the counter head is away from `▷`.
pub fn run_multihead(spec: &MultiHeadSdaSpec, x: &str, opts: &RunOptions) -> Result<RunReport, EngineError> {
    let tape = spec.input.tape(x)?;
    let n = tape.len() - 2;
    let limit = opts.step_limit.unwrap_or_else(|| spec.default_step_limit(n));
    let a = &spec.alphabet;
    let mut q = spec.control.q0;
    let mut heads = vec![0usize; spec.heads];
    let mut store = Storage::new();
    let mut steps = 0u64;
    let mut implicit = false;
    let mut counter = Counter::Home;
    let mut trace = Vec::new();
    let mut key = vec![0usize; spec.heads];
    let verdict = loop {
        if spec.control.is_accepting(q) {
            break Verdict::Accept;
        }
        if spec.control.is_rejecting(q) {
            break Verdict::Reject;
        }
        if steps >= limit {
            break Verdict::StepLimit;
        }
        for (k, &h) in key.iter_mut().zip(&heads) {
            *k = tape[h];
        }
        let g = store.read();
        let Some(t) = spec.delta.get(&(q, key.clone(), g)) else {
            implicit = true;
            break Verdict::Reject;
        };
        if !opts.no_audit {
            store.audit(a, t.write, t.d_store, steps)?;
            if spec.flavor == Flavor::Susceptible {
                if a.dv(g) + 1 >= a.k() && t.moves.iter().any(|&d| d != 0) {
                    return Err(EngineError::DepthAudit {
                        t: steps,
                        cell: store.pos,
                        detail: "input head moved over a near-frozen cell".into(),
                    });
                }
                if g == BLANK && t.next != q {
                    return Err(EngineError::DepthAudit {
                        t: steps,
                        cell: store.pos,
                        detail: "state changed on a frozen blank".into(),
                    });
                }
            }
        }
        if let Some(c) = spec.counter {
            counter = check_counter(counter, heads[c], t.moves[c], t.d_store, steps)?;
        }
        let mut next_heads = heads.clone();
        for (h, &d) in next_heads.iter_mut().zip(&t.moves) {
            let nh = *h as i64 + d as i64;
            if nh < 0 || nh as usize >= tape.len() {
                return Err(EngineError::InputOverrun { t: steps });
            }
            *h = nh as usize;
        }
        if opts.trace {
            let mut dirs = t.moves.clone();
            dirs.push(t.d_store);
            trace.push(TraceRecord {
                t: steps,
                state: q,
                next: t.next,
                heads: heads.clone(),
                storage: store.pos,
                scanned: g,
                write: t.write,
                dirs,
            });
        }
        store.apply(a, t.write, t.d_store);
        heads = next_heads;
        q = t.next;
        steps += 1;
    };
    let stats = ResourceStats { steps, cells_touched: store.writes.len(), max_aux_cells: 0, writes: store.writes.clone() };
    let final_config = SurfaceConfiguration { q, l1: heads.first().copied().unwrap_or(0), l2: store.pos, z: store.z };
    let outcome = RunOutcome { verdict, steps, final_config, implicit_reject: implicit };
    Ok(RunReport { outcome, stats, trace })
}

fn check_counter(phase: Counter, pos: usize, d: i8, d_store: i8, t: u64) -> Result<Counter, EngineError> {
    let fail = |detail: &str| Err(EngineError::CounterContractViolation { t, detail: detail.into() });
    let away_after = pos as i64 + d as i64 > 0;
    if (pos > 0 || away_after) && d_store != 0 {
        return fail("storage head moved while the counter head was away from the endmarker");
    }
    match phase {
        Counter::Home => match d {
            1 => Ok(Counter::Out),
            0 => Ok(Counter::Home),
            _ => fail("counter head moved left of the endmarker"),
        },
        Counter::Out => match d {
            -1 if pos == 1 => Ok(Counter::Home),
            -1 => Ok(Counter::Returning),
            _ => Ok(Counter::Out),
        },
        Counter::Returning => match d {
            -1 if pos == 1 => Ok(Counter::Home),
            -1 => Ok(Counter::Returning),
            _ => fail("counter head stopped or reversed on its way back"),
        },
    }
}

/// Views a one-way k-sda as a k-sda₂(1) with the same transitions.
pub fn sda_as_multihead(spec: &SdaSpec) -> MultiHeadSdaSpec {
    let mut delta = BTreeMap::new();
    for (q, s, g, t) in spec.transitions() {
        delta.insert((q, vec![s], g), MhTrans { next: t.next, write: t.write, moves: vec![t.d1], d_store: t.d2 });
    }
    MultiHeadSdaSpec {
        flavor: spec.flavor,
        alphabet: spec.alphabet.clone(),
        control: spec.control.clone(),
        input: spec.input.clone(),
        heads: 1,
        counter: None,
        delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_contract_phases() {
        assert_eq!(check_counter(Counter::Home, 0, 1, 0, 0).unwrap(), Counter::Out);
        assert_eq!(check_counter(Counter::Out, 2, 0, 0, 0).unwrap(), Counter::Out);
        assert_eq!(check_counter(Counter::Out, 2, -1, 0, 0).unwrap(), Counter::Returning);
        assert_eq!(check_counter(Counter::Returning, 1, -1, 0, 0).unwrap(), Counter::Home);
        assert!(check_counter(Counter::Returning, 2, 0, 0, 0).is_err());
        assert!(check_counter(Counter::Out, 2, 1, 1, 0).is_err());
        assert_eq!(check_counter(Counter::Home, 0, 0, 1, 0).unwrap(), Counter::Home);
    }
}
