use super::{EngineError, ResourceStats, RunOptions, RunOutcome, RunReport, Storage, SurfaceConfiguration, TraceRecord, Verdict};
use crate::model::{AuxSdaSpec, Flavor, BLANK};

/// Auxiliary tape contents and head at the end of an aux run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxConfig {
    pub tape: Vec<usize>,
    pub head: usize,
}

/// Runs an aux-k-sda. The auxiliary tape starts blank; leaving the declared
/// space bound is an error.
pub fn run_aux(spec: &AuxSdaSpec, x: &str, opts: &RunOptions) -> Result<(RunReport, AuxConfig), EngineError> {
    let tape = spec.input.tape(x)?;
    let n = tape.len() - 2;
    let bound = spec.space.cells(n);
    let limit = opts.step_limit.unwrap_or_else(|| spec.default_step_limit(n));
    let a = &spec.alphabet;
    let mut q = spec.control.q0;
    let mut l1 = 0usize;
    let mut aux = vec![0usize];
    let mut ah = 0usize;
    let mut store = Storage::new();
    let mut steps = 0u64;
    let mut implicit = false;
    let mut trace = Vec::new();
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
        let s = tape[l1];
        let tau = aux[ah];
        let g = store.read();
        let Some(&t) = spec.delta.get(&(q, s, tau, g)) else {
            implicit = true;
            break Verdict::Reject;
        };
        if !opts.no_audit {
            store.audit(a, t.write, t.d3, steps)?;
            if t.d2 == 0 && t.aux_write != tau {
                return Err(EngineError::DepthAudit {
                    t: steps,
                    cell: store.pos,
                    detail: "stationary auxiliary head rewrote its cell".into(),
                });
            }
            if spec.flavor == Flavor::Susceptible {
                if a.dv(g) + 1 >= a.k() && (t.d1 != 0 || t.d2 != 0) {
                    return Err(EngineError::DepthAudit {
                        t: steps,
                        cell: store.pos,
                        detail: "input or auxiliary head moved over a near-frozen cell".into(),
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
        let nl1 = l1 as i64 + t.d1 as i64;
        if nl1 < 0 || nl1 as usize >= tape.len() {
            return Err(EngineError::InputOverrun { t: steps });
        }
        let nah = ah as i64 + t.d2 as i64;
        if nah < 0 {
            return Err(EngineError::AuxUnderflow { t: steps });
        }
        if opts.trace {
            trace.push(TraceRecord {
                t: steps,
                state: q,
                next: t.next,
                heads: vec![l1, ah],
                storage: store.pos,
                scanned: g,
                write: t.write,
                dirs: vec![t.d1, t.d2, t.d3],
            });
        }
        aux[ah] = t.aux_write;
        ah = nah as usize;
        if ah >= aux.len() {
            aux.resize(ah + 1, 0);
            if let Some(b) = bound {
                if aux.len() > b {
                    return Err(EngineError::AuxSpaceExceeded { t: steps, used: aux.len(), bound: b });
                }
            }
        }
        store.apply(a, t.write, t.d3);
        l1 = nl1 as usize;
        q = t.next;
        steps += 1;
    };
    let stats = ResourceStats { steps, cells_touched: store.writes.len(), max_aux_cells: aux.len(), writes: store.writes.clone() };
    let final_config = SurfaceConfiguration { q, l1, l2: store.pos, z: store.z };
    let outcome = RunOutcome { verdict, steps, final_config, implicit_reject: implicit };
    Ok((RunReport { outcome, stats, trace }, AuxConfig { tape: aux, head: ah }))
}
