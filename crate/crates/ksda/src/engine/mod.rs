//! Direct step-by-step execution with runtime depth auditing.
//!
//! The audit re-derives every storage write from the actual arrival direction
//! of the storage head (a reversal is a turn and counts twice), independently
//! of the static parity rule used by [`crate::model::Validate`].

mod aux;
mod cross;
mod multihead;

use std::fmt;

use thiserror::Error;

use crate::model::{ModelError, SdaSpec, State, Sym, Trans, BLANK, BOX, END};

pub use aux::{run_aux, AuxConfig};
pub use cross::{all_strings, cross_check, cross_check_with, EquivalenceReport, Recognizer};
pub use multihead::{run_multihead, sda_as_multihead};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
    StepLimit,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::StepLimit => "step-limit",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("depth audit failed at step {t}, storage cell {cell}: {detail}")]
    DepthAudit { t: u64, cell: usize, detail: String },
    #[error("input head left the tape at step {t}")]
    InputOverrun { t: u64 },
    #[error("auxiliary head moved left of cell 0 at step {t}")]
    AuxUnderflow { t: u64 },
    #[error("auxiliary space exceeded at step {t}: {used} cells > bound {bound}")]
    AuxSpaceExceeded { t: u64, used: usize, bound: usize },
    #[error("counter head contract violated at step {t}: {detail}")]
    CounterContractViolation { t: u64, detail: String },
    #[error(transparent)]
    Input(#[from] ModelError),
}

/// The run snapshot `(q, l1, l2, z)`; `z` is the non-□ storage prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceConfiguration {
    pub q: State,
    pub l1: usize,
    pub l2: usize,
    pub z: Vec<Sym>,
}

impl SurfaceConfiguration {
    pub fn initial(q0: State) -> Self {
        SurfaceConfiguration { q: q0, l1: 0, l2: 0, z: vec![END] }
    }

    /// Symbol in storage cell `i` (□ beyond the written prefix).
    pub fn cell(&self, i: usize) -> Sym {
        self.z.get(i).copied().unwrap_or(BOX)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub steps: u64,
    pub final_config: SurfaceConfiguration,
    /// Rejected because no transition was defined.
    pub implicit_reject: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceStats {
    pub steps: u64,
    pub cells_touched: usize,
    pub max_aux_cells: usize,
    /// Depth gained by each storage cell over the run, turns counted twice.
    pub writes: Vec<u32>,
}

impl ResourceStats {
    pub fn max_writes(&self) -> u32 {
        self.writes.iter().skip(1).copied().max().unwrap_or(0)
    }
}

/// One δ application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub t: u64,
    pub state: State,
    pub next: State,
    /// Input head positions before the step (plus the auxiliary head for aux runs).
    pub heads: Vec<usize>,
    pub storage: usize,
    pub scanned: Sym,
    pub write: Sym,
    /// Input head directions followed by the storage head direction.
    pub dirs: Vec<i8>,
}

impl TraceRecord {
    /// `t state heads storage write dirs`, whitespace-separated.
    pub fn to_line(&self, state_name: &dyn Fn(State) -> String, sym_name: &dyn Fn(Sym) -> String) -> String {
        let heads: Vec<String> = self.heads.iter().map(|h| h.to_string()).collect();
        let dirs: Vec<String> = self.dirs.iter().map(|d| format!("{d:+}")).collect();
        format!(
            "{} {} {} {} {} {}",
            self.t,
            state_name(self.state),
            heads.join(","),
            self.storage,
            sym_name(self.write),
            dirs.join(",")
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub step_limit: Option<u64>,
    pub trace: bool,
    pub no_audit: bool,
}

impl RunOptions {
    pub fn limit(n: u64) -> Self {
        RunOptions { step_limit: Some(n), ..Default::default() }
    }

    pub fn traced() -> Self {
        RunOptions { trace: true, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub stats: ResourceStats,
    pub trace: Vec<TraceRecord>,
}

/// Result of a single [`SdaRun::step`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Moved { q: State, s: usize, g: Sym, t: Trans },
    Halt(Verdict),
}

/// Storage tape with audit bookkeeping, shared by all engines.
#[derive(Clone, Debug)]
pub(crate) struct Storage {
    pub z: Vec<Sym>,
    pub pos: usize,
    /// Direction of the last non-stationary storage move.
    pub prev_dir: i8,
    pub writes: Vec<u32>,
}

impl Storage {
    pub fn new() -> Self {
        Storage { z: vec![END], pos: 0, prev_dir: 1, writes: vec![0] }
    }

    #[inline]
    pub fn read(&self) -> Sym {
        self.z.get(self.pos).copied().unwrap_or(BOX)
    }

    /// Runtime depth audit of writing `xi` and moving `d`.
    pub fn audit(&self, a: &crate::model::Alphabet, xi: Sym, d: i8, t: u64) -> Result<(), EngineError> {
        let g = self.read();
        let fail = |detail: String| Err(EngineError::DepthAudit { t, cell: self.pos, detail });
        if g == END || g == BLANK {
            if xi != g {
                return fail(format!("level-k symbol {} rewritten to {}", a.name(g), a.name(xi)));
            }
            if g == END && d == -1 {
                return fail("storage head moved left of the endmarker".into());
            }
            return Ok(());
        }
        if xi == END {
            return fail("endmarker written".into());
        }
        if d == 0 {
            if xi != g {
                return fail(format!("stationary move rewrote {} to {}", a.name(g), a.name(xi)));
            }
            return Ok(());
        }
        let e = a.dv(g);
        let turn = d == -self.prev_dir;
        let want = if turn { (e + 2).min(a.k()) } else { (e + 1).min(a.k()) };
        if a.dv(xi) != want {
            return fail(format!(
                "{} at level {e} left {} wrote {} at level {}, expected level {want}",
                a.name(g),
                if turn { "by a turn" } else { "by a pass" },
                a.name(xi),
                a.dv(xi)
            ));
        }
        Ok(())
    }

    /// Applies a write and a move. The caller has audited it.
    pub fn apply(&mut self, a: &crate::model::Alphabet, xi: Sym, d: i8) {
        let g = self.read();
        if d != 0 {
            let gain = a.dv(xi).saturating_sub(a.dv(g)) as u32;
            if g != END && g != BLANK {
                self.writes[self.pos] += gain;
            }
        }
        if self.pos < self.z.len() {
            self.z[self.pos] = xi;
        } else if xi != BOX {
            self.z.push(xi);
        }
        if d != 0 {
            self.prev_dir = d;
            self.pos = (self.pos as i64 + d as i64) as usize;
            if self.writes.len() <= self.pos {
                self.writes.resize(self.pos + 1, 0);
            }
        }
    }
}

/// Extra input-head rules of the susceptible flavor.
pub(crate) fn susceptible_audit(spec: &SdaSpec, q: State, g: Sym, t: &Trans, steps: u64, cell: usize) -> Result<(), EngineError> {
    if spec.flavor != crate::model::Flavor::Susceptible {
        return Ok(());
    }
    let a = &spec.alphabet;
    if a.dv(g) + 1 >= a.k() && t.d1 != 0 {
        return Err(EngineError::DepthAudit { t: steps, cell, detail: "input head moved over a near-frozen cell".into() });
    }
    if g == BLANK && t.next != q {
        return Err(EngineError::DepthAudit { t: steps, cell, detail: "state changed on a frozen blank".into() });
    }
    Ok(())
}

/// Step-by-step execution of a k-sda on one input.
#[derive(Clone, Debug)]
pub struct SdaRun<'a> {
    spec: &'a SdaSpec,
    tape: Vec<usize>,
    q: State,
    l1: usize,
    store: Storage,
    steps: u64,
    audit: bool,
    implicit: bool,
}

impl<'a> SdaRun<'a> {
    pub fn new(spec: &'a SdaSpec, x: &str) -> Result<Self, EngineError> {
        Ok(Self::from_tape(spec, spec.input.tape(x)?))
    }

    /// Runs on a prepared tape `▷ x ◁` of input symbol ids.
    pub fn from_tape(spec: &'a SdaSpec, tape: Vec<usize>) -> Self {
        SdaRun { spec, tape, q: spec.control.q0, l1: 0, store: Storage::new(), steps: 0, audit: true, implicit: false }
    }

    pub fn without_audit(mut self) -> Self {
        self.audit = false;
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn state(&self) -> State {
        self.q
    }

    pub fn config(&self) -> SurfaceConfiguration {
        SurfaceConfiguration { q: self.q, l1: self.l1, l2: self.store.pos, z: self.store.z.clone() }
    }

    pub fn input_pos(&self) -> usize {
        self.l1
    }

    pub fn storage_pos(&self) -> usize {
        self.store.pos
    }

    pub fn storage(&self) -> &[Sym] {
        &self.store.z
    }

    /// Direction of the last non-stationary storage move.
    pub fn last_direction(&self) -> i8 {
        self.store.prev_dir
    }

    pub fn halted(&self) -> Option<Verdict> {
        let c = &self.spec.control;
        if c.is_accepting(self.q) {
            Some(Verdict::Accept)
        } else if c.is_rejecting(self.q) || self.implicit {
            Some(Verdict::Reject)
        } else {
            None
        }
    }

    pub fn step(&mut self) -> Result<Step, EngineError> {
        if let Some(v) = self.halted() {
            return Ok(Step::Halt(v));
        }
        let spec = self.spec;
        let s = self.tape[self.l1];
        let g = self.store.read();
        let Some(&t) = spec.get(self.q, s, g) else {
            self.implicit = true;
            return Ok(Step::Halt(Verdict::Reject));
        };
        let a = &spec.alphabet;
        if self.audit {
            self.store.audit(a, t.write, t.d2, self.steps)?;
            susceptible_audit(spec, self.q, g, &t, self.steps, self.store.pos)?;
        }
        let l1 = self.l1 as i64 + t.d1 as i64;
        if l1 < 0 || l1 as usize >= self.tape.len() || !(0..=1).contains(&t.d1) {
            return Err(EngineError::InputOverrun { t: self.steps });
        }
        self.store.apply(a, t.write, t.d2);
        self.l1 = l1 as usize;
        let q = self.q;
        self.q = t.next;
        self.steps += 1;
        Ok(Step::Moved { q, s, g, t })
    }

    fn stats(&self) -> ResourceStats {
        ResourceStats {
            steps: self.steps,
            cells_touched: self.store.writes.len(),
            max_aux_cells: 0,
            writes: self.store.writes.clone(),
        }
    }

    /// Runs to completion.
    pub fn finish(mut self, opts: &RunOptions) -> Result<RunReport, EngineError> {
        let n = self.tape.len() - 2;
        let limit = opts.step_limit.unwrap_or_else(|| self.spec.default_step_limit(n));
        let mut trace = Vec::new();
        let verdict = loop {
            if let Some(v) = self.halted() {
                break v;
            }
            if self.steps >= limit {
                break Verdict::StepLimit;
            }
            let (l1, l2, t0) = (self.l1, self.store.pos, self.steps);
            match self.step()? {
                Step::Halt(v) => break v,
                Step::Moved { q, g, t, .. } => {
                    if opts.trace {
                        trace.push(TraceRecord {
                            t: t0,
                            state: q,
                            next: t.next,
                            heads: vec![l1],
                            storage: l2,
                            scanned: g,
                            write: t.write,
                            dirs: vec![t.d1, t.d2],
                        });
                    }
                }
            }
        };
        let stats = self.stats();
        let outcome = RunOutcome { verdict, steps: self.steps, final_config: self.config(), implicit_reject: self.implicit };
        Ok(RunReport { outcome, stats, trace })
    }
}

/// Runs `spec` on `x` from the initial configuration `(q0, 0, 0, ▷)`.
pub fn run(spec: &SdaSpec, x: &str, opts: &RunOptions) -> Result<RunReport, EngineError> {
    let r = SdaRun::new(spec, x)?;
    let r = if opts.no_audit { r.without_audit() } else { r };
    r.finish(opts)
}

/// Verdict only, default options.
pub fn verdict(spec: &SdaSpec, x: &str) -> Result<Verdict, EngineError> {
    Ok(run(spec, x, &RunOptions::default())?.outcome.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alphabet, Control, Flavor, InputAlphabet, LEFT, RIGHT};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Writes one level-1 mark per input symbol, accepts at ◁.
    fn marker() -> SdaSpec {
        let a = Alphabet::new(2, &[names(&["m"])]).unwrap();
        let c = Control::new(&names(&["s", "acc"]), "s", &names(&["acc"]), &[]).unwrap();
        let i = InputAlphabet::new(&['a']).unwrap();
        let mut m = SdaSpec::new(Flavor::Susceptible, a, c, i);
        let mark = m.alphabet.sym("m").unwrap();
        m.insert(0, LEFT, END, Trans { next: 0, write: END, d1: 0, d2: 1 });
        m.insert(0, LEFT, BOX, Trans { next: 0, write: BOX, d1: 1, d2: 0 });
        m.insert(0, 2, BOX, Trans { next: 0, write: mark, d1: 1, d2: 1 });
        m.insert(0, RIGHT, BOX, Trans { next: 1, write: BOX, d1: 0, d2: 0 });
        m
    }

    #[test]
    fn marker_machine_accepts_and_counts_writes() {
        let m = marker();
        let r = run(&m, "aaa", &RunOptions::traced()).unwrap();
        assert_eq!(r.outcome.verdict, Verdict::Accept);
        assert_eq!(r.outcome.steps, 6);
        assert_eq!(r.outcome.final_config.z.len(), 4);
        assert_eq!(r.stats.max_writes(), 1);
        assert_eq!(r.trace.len(), 6);
        assert_eq!(r.trace[2].to_line(&|q| q.to_string(), &|s| s.to_string()), "2 0 1 1 3 +1,+1");
    }

    #[test]
    fn undefined_transition_is_implicit_reject() {
        let mut m = marker();
        m.remove(0, RIGHT, BOX);
        let r = run(&m, "a", &RunOptions::default()).unwrap();
        assert_eq!(r.outcome.verdict, Verdict::Reject);
        assert!(r.outcome.implicit_reject);
    }

    #[test]
    fn step_limit_is_its_own_verdict() {
        let m = marker();
        let r = run(&m, "aaaa", &RunOptions::limit(3)).unwrap();
        assert_eq!(r.outcome.verdict, Verdict::StepLimit);
        assert_eq!(r.outcome.steps, 3);
    }

    #[test]
    fn audit_catches_a_bad_write() {
        let mut m = marker();
        // moving left off a fresh cell is a turn and must write level 2
        let mark = m.alphabet.sym("m").unwrap();
        m.insert(0, 2, BOX, Trans { next: 0, write: mark, d1: 1, d2: -1 });
        let err = run(&m, "a", &RunOptions::default()).unwrap_err();
        assert!(matches!(err, EngineError::DepthAudit { cell: 1, .. }));
    }

    #[test]
    fn halted_config_returns_halt() {
        let m = marker();
        let mut r = SdaRun::new(&m, "").unwrap();
        for _ in 0..3 {
            assert!(matches!(r.step().unwrap(), Step::Moved { .. }));
        }
        assert_eq!(r.step().unwrap(), Step::Halt(Verdict::Accept));
    }
}
