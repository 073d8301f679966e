//! FL transducers, their composition with a k-sda, the three input
//! transforms, and the embedding of k-limited automata into depth-immune
//! k-sda's.

use std::fmt;

use thiserror::Error;

use crate::engine::{susceptible_audit, EngineError, RunOptions, Storage, Verdict};
use crate::model::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlError {
    #[error("transducer step limit {0} reached")]
    StepLimit(u64),
    #[error("work tape exceeded {bound} cells at step {t}")]
    SpaceExceeded { t: u64, bound: usize },
    #[error("transducer has no move in state {state} at step {t}")]
    Stuck { t: u64, state: String },
    #[error("transducer head left its tape at step {t}")]
    Overrun { t: u64 },
    #[error(transparent)]
    Input(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlOutput {
    pub output: String,
    pub steps: u64,
    /// Most work-tape cells the head has reached.
    pub work_cells: usize,
    /// Cells ever written with a non-blank symbol.
    pub work_used: usize,
}

/// A resumable transducer run, one output symbol at a time.
#[derive(Clone, Debug)]
pub struct FlRun<'a> {
    spec: &'a FlTransducerSpec,
    tape: Vec<InSym>,
    q: State,
    pos: usize,
    work: Vec<usize>,
    wh: usize,
    bound: usize,
    limit: u64,
    pub steps: u64,
    pub work_cells: usize,
    pub work_used: usize,
}

impl<'a> FlRun<'a> {
    pub fn new(spec: &'a FlTransducerSpec, x: &str, step_limit: Option<u64>) -> Result<Self, FlError> {
        let tape = spec.input.tape(x)?;
        let n = tape.len() - 2;
        let limit = step_limit.unwrap_or_else(|| default_limit(n, spec.control.len(), spec.work.len()));
        Ok(FlRun { spec, tape, q: spec.control.q0, pos: 0, work: vec![0], wh: 0, bound: spec.space.cells(n), limit, steps: 0, work_cells: 1, work_used: 0 })
    }

    /// Runs until the next output symbol, or `None` once halted.
    pub fn next_symbol(&mut self) -> Result<Option<char>, FlError> {
        let spec = self.spec;
        loop {
            if spec.control.is_halting(self.q) {
                return Ok(None);
            }
            if self.steps >= self.limit {
                return Err(FlError::StepLimit(self.limit));
            }
            let Some(t) = spec.delta.get(&(self.q, self.tape[self.pos], self.work[self.wh])) else {
                return Err(FlError::Stuck { t: self.steps, state: spec.control.name(self.q).into() });
            };
            let pos = self.pos as i64 + t.d_in as i64;
            let wh = self.wh as i64 + t.d_work as i64;
            if pos < 0 || pos as usize >= self.tape.len() || wh < 0 {
                return Err(FlError::Overrun { t: self.steps });
            }
            self.work[self.wh] = t.work_write;
            if t.work_write != 0 {
                self.work_used = self.work_used.max(self.wh + 1);
            }
            self.pos = pos as usize;
            self.wh = wh as usize;
            if self.wh >= self.work.len() {
                self.work.resize(self.wh + 1, 0);
                self.work_cells = self.work_cells.max(self.work.len());
                if self.work.len() > self.bound {
                    return Err(FlError::SpaceExceeded { t: self.steps, bound: self.bound });
                }
            }
            self.q = t.next;
            self.steps += 1;
            if let Some(c) = t.out {
                return Ok(Some(c));
            }
        }
    }

    /// Cells a checkpoint of this run occupies: the input head position in
    /// binary plus the work tape, with one cell for the work head.
    pub fn checkpoint_cells(&self) -> usize {
        log_cells(self.tape.len()) + self.work.len() + 1
    }
}

/// Runs `spec` on `x` to completion.
pub fn fl_run(spec: &FlTransducerSpec, x: &str, step_limit: Option<u64>) -> Result<FlOutput, FlError> {
    let mut r = FlRun::new(spec, x, step_limit)?;
    let mut output = String::new();
    while let Some(c) = r.next_symbol()? {
        output.push(c);
    }
    Ok(FlOutput { output, steps: r.steps, work_cells: r.work_cells, work_used: r.work_used })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("transducer output `{0}` is not an input symbol of the machine")]
    AlphabetMismatch(char),
    #[error(transparent)]
    Transducer(#[from] FlError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("auxiliary tape exceeded {bound} cells")]
    SpaceExceeded { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedOutcome {
    pub verdict: Verdict,
    /// Machine steps plus transducer steps.
    pub steps: u64,
    pub machine_steps: u64,
    /// Peak auxiliary-tape usage, in cells.
    pub aux_cells: usize,
    pub aux_bound: usize,
}

/// `x ↦ [f(x) ∈ L(M)]` run as an aux-k-sda: the auxiliary tape holds a
/// checkpoint of `f` (state, input head, work tape), never the output `f(x)`.
/// Only the current output symbol is kept; an input advance of `M` resumes
/// `f` from its checkpoint while the storage head stands still.
#[derive(Clone, Debug)]
pub struct Composed<'a> {
    pub f: &'a FlTransducerSpec,
    pub m: &'a SdaSpec,
    /// Declared auxiliary bound.
    pub space: SpaceBound,
}

/// Builds the composition. The auxiliary bound is enough for the checkpoint
/// of a transducer within its declared work space.
pub fn compose_lemma32<'a>(f: &'a FlTransducerSpec, m: &'a SdaSpec) -> Result<Composed<'a>, ComposeError> {
    if let Some(&c) = f.output.iter().find(|&&c| m.input.index(c).is_none()) {
        return Err(ComposeError::AlphabetMismatch(c));
    }
    // checkpoint = work tape + work head + input head in binary:
    // 3·log_cells(n+2)+3 ≤ 9·log_cells(n) cells for a log-space f
    let factor = match f.space {
        FlSpace::Log => 9,
        FlSpace::Const => 5,
    };
    Ok(Composed { f, m, space: SpaceBound::Log { factor } })
}

impl Composed<'_> {
    pub fn run(&self, x: &str, opts: &RunOptions) -> Result<ComposedOutcome, ComposeError> {
        let m = self.m;
        let a = &m.alphabet;
        let n = x.chars().count();
        let bound = self.space.cells(n).unwrap_or(usize::MAX);
        let mut f = FlRun::new(self.f, x, None)?;
        let mut sym = LEFT;
        let mut aux = f.checkpoint_cells();
        let limit = opts.step_limit.unwrap_or_else(|| m.default_step_limit(n.max(1) * 4));
        let mut q = m.control.q0;
        let mut store = Storage::new();
        let mut steps = 0u64;
        let verdict = loop {
            if m.control.is_accepting(q) {
                break Verdict::Accept;
            }
            if m.control.is_rejecting(q) {
                break Verdict::Reject;
            }
            if steps >= limit {
                break Verdict::StepLimit;
            }
            let g = store.read();
            let Some(&t) = m.get(q, sym, g) else { break Verdict::Reject };
            if !opts.no_audit {
                store.audit(a, t.write, t.d2, steps)?;
                susceptible_audit(m, q, g, &t, steps, store.pos)?;
            }
            if !(0..=1).contains(&t.d1) {
                return Err(EngineError::InputOverrun { t: steps }.into());
            }
            if t.d1 == 1 {
                if sym == RIGHT {
                    return Err(EngineError::InputOverrun { t: steps }.into());
                }
                sym = match f.next_symbol()? {
                    Some(c) => m.input.index(c).ok_or(ComposeError::AlphabetMismatch(c))?,
                    None => RIGHT,
                };
                aux = aux.max(f.checkpoint_cells());
                if aux > bound {
                    return Err(ComposeError::SpaceExceeded { bound });
                }
            }
            store.apply(a, t.write, t.d2);
            q = t.next;
            steps += 1;
        };
        Ok(ComposedOutcome { verdict, steps: steps + f.steps, machine_steps: steps, aux_cells: aux, aux_bound: bound })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("marker `{0}` occurs in the input")]
    MarkerCollision(char),
}

/// A symbol of `x̃`: a block marker or a two-track cell `⟨upper, lower⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrackSym {
    Marker(char),
    Pair(char, char),
}

impl fmt::Display for TrackSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackSym::Marker(c) => write!(f, "{c}"),
            TrackSym::Pair(u, l) => write!(f, "⟨{u},{l}⟩"),
        }
    }
}

pub fn render_track(x: &[TrackSym]) -> String {
    x.iter().map(|s| s.to_string()).collect()
}

fn no_collision(x: &str, markers: &[char]) -> Result<(), TransformError> {
    match markers.iter().find(|&&m| x.contains(m)) {
        Some(&m) => Err(TransformError::MarkerCollision(m)),
        None => Ok(()),
    }
}

/// `x̃ = (a x̃₁ b)⋯(a x̃ₙ b)` with `x̃ᵢ = ⟨x₁,xᵢ⟩⋯⟨xₙ,xᵢ⟩`; length `n(n+2)`.
pub fn tilde_transform(x: &str, a: char, b: char) -> Result<Vec<TrackSym>, TransformError> {
    no_collision(x, &[a, b])?;
    let xs: Vec<char> = x.chars().collect();
    let mut out = Vec::with_capacity(xs.len() * (xs.len() + 2));
    for &xi in &xs {
        out.push(TrackSym::Marker(a));
        out.extend(xs.iter().map(|&xj| TrackSym::Pair(xj, xi)));
        out.push(TrackSym::Marker(b));
    }
    Ok(out)
}

/// `x̂ = (a x # xᴿ b)^{n+2}`; length `(n+2)(2n+3)`.
pub fn hat_transform(x: &str, a: char, b: char, sep: char) -> Result<String, TransformError> {
    no_collision(x, &[a, b, sep])?;
    let rev: String = x.chars().rev().collect();
    let block = format!("{a}{x}{sep}{rev}{b}");
    Ok(block.repeat(x.chars().count() + 2))
}

/// `x̄ = x₁ 1ⁿ x₂ 1ⁿ ⋯ 1ⁿ xₙ`; length `n²`.
pub fn bar_transform(x: &str) -> String {
    let n = x.chars().count();
    let sep = "1".repeat(n);
    let parts: Vec<String> = x.chars().map(|c| c.to_string()).collect();
    parts.join(&sep)
}

/// Runs a k-lda on `▷ x ◁` from cell 0, auditing each write against the
/// actual arrival direction (a turn counts twice).
pub fn run_lda(spec: &LdaSpec, x: &str, step_limit: Option<u64>) -> Result<(Verdict, u64), EngineError> {
    let input = spec.input.tape(x)?;
    let last = input.len() - 1;
    let mut tape: Vec<LdaCell> = input
        .iter()
        .enumerate()
        .map(|(i, &s)| if i == 0 || i == last { LdaCell::End(s) } else { LdaCell::Input(s) })
        .collect();
    let limit = step_limit.unwrap_or_else(|| spec.default_step_limit(last - 1));
    let k = spec.k();
    let c = &spec.control;
    let (mut q, mut pos, mut prev, mut steps) = (c.q0, 0usize, 1i8, 0u64);
    let verdict = loop {
        if c.is_accepting(q) {
            break Verdict::Accept;
        }
        if c.is_rejecting(q) {
            break Verdict::Reject;
        }
        if steps >= limit {
            break Verdict::StepLimit;
        }
        let cell = tape[pos];
        let Some(&t) = spec.delta.get(&(q, cell)) else { break Verdict::Reject };
        let fail = |detail: String| Err(EngineError::DepthAudit { t: steps, cell: pos, detail });
        match cell {
            LdaCell::End(_) if t.write != cell => return fail("endmarker rewritten".into()),
            LdaCell::End(_) => {}
            LdaCell::Store(BLANK) if t.write != cell => return fail("frozen cell rewritten".into()),
            _ if t.d == 0 && t.write != cell => return fail("stationary rewrite".into()),
            _ if t.d != 0 && cell != LdaCell::Store(BLANK) => {
                let e = spec.cell_level(cell);
                let want = if t.d == prev { e + 1 } else { e + 2 }.min(k);
                if spec.cell_level(t.write) != want {
                    return fail(format!("level {e} cell left with a level-{} symbol, expected {want}", spec.cell_level(t.write)));
                }
            }
            _ => {}
        }
        let np = pos as i64 + t.d as i64;
        if np < 0 || np as usize > last {
            return Err(EngineError::InputOverrun { t: steps });
        }
        tape[pos] = t.write;
        if t.d != 0 {
            prev = t.d;
        }
        pos = np as usize;
        q = t.next;
        steps += 1;
    };
    Ok((verdict, steps))
}

/// A k-lda embedded as a depth-immune sda.
#[derive(Clone, Debug)]
pub struct LdaEmbedding {
    pub sda: SdaSpec,
    /// Depth of the produced machine: `max(k, 2)`.
    pub k: usize,
    /// Extra depth spent on copying the input: none, the copy is lazy.
    pub copy_levels: usize,
    /// Visits to `◁` the embedding can tell apart from frozen cells.
    pub end_visits: usize,
}

/// Embeds a k-lda into a depth-immune `max(k,2)`-sda.
///
/// Storage cell i stands for lda cell i. The input head always rests on the
/// first unvisited cell's input symbol, so a □ under the storage head reads
/// as that symbol; it advances whenever the storage head leaves □. The right
/// endmarker cell is written with `R2, R4, …` on each departure, which
/// identifies it until those levels run out.
pub fn lda_to_sda_imm(lda: &LdaSpec) -> Result<LdaEmbedding, ModelError> {
    let k = lda.k().max(2);
    let la = &lda.alphabet;
    let mut inner: Vec<Vec<String>> = la.inner_levels();
    inner.resize(k - 1, Vec::new());
    let one = lda.k() == 1;
    let mut used: Vec<String> = inner.iter().flatten().cloned().collect();
    let mut fresh = |base: String| {
        let mut s = base;
        while used.contains(&s) || [BOX_NAME, END_NAME, BLANK_NAME, RIGHT_NAME].contains(&s.as_str()) {
            s.push('\'');
        }
        used.push(s.clone());
        s
    };
    // a 1-lda freezes on the first departure; rightward that is level 1 here
    let f1 = one.then(|| fresh("F1".into()));
    if let Some(f) = &f1 {
        inner[0].push(f.clone());
    }
    let mut r_names = vec![None; k];
    for e in (2..k).step_by(2) {
        let n = fresh(format!("R{e}"));
        inner[e - 1].push(n.clone());
        r_names[e] = Some(n);
    }
    let alphabet = Alphabet::new(k, &inner)?;
    let map = |g: Sym| -> Sym { if g == BLANK { BLANK } else { alphabet.sym(la.name(g)).unwrap() } };
    let f1 = f1.map(|n| alphabet.sym(&n).unwrap());
    let r_sym = |e: usize| -> Sym {
        match r_names.get(e).and_then(|n| n.as_ref()) {
            Some(n) => alphabet.sym(n).unwrap(),
            None => BLANK,
        }
    };
    let c = &lda.control;
    let mut m = SdaSpec::new(Flavor::Immune, alphabet.clone(), c.clone(), lda.input.clone());
    let all_in: Vec<InSym> = (0..lda.input.len()).collect();
    let write_of = |cell: LdaCell, d: i8| -> Sym {
        match cell {
            LdaCell::Store(BLANK) if one && d == 1 => f1.unwrap(),
            LdaCell::Store(g) => map(g),
            _ => BOX,
        }
    };
    for (&(q, cell), t) in &lda.delta {
        let tr = |write: Sym, d1: i8| Trans { next: t.next, write, d1, d2: t.d };
        match cell {
            LdaCell::End(LEFT) => {
                for &s in &all_in {
                    m.insert(q, s, END, tr(END, (s == LEFT && t.d == 1) as i8));
                }
            }
            LdaCell::End(_) => {
                if t.d == 0 {
                    m.insert(q, RIGHT, BOX, tr(BOX, 0));
                } else {
                    m.insert(q, RIGHT, BOX, tr(r_sym(2), 0));
                }
                for e in (2..k).step_by(2) {
                    let g = r_sym(e);
                    let w = if t.d == 0 { g } else { r_sym(e + 2) };
                    for &s in &all_in {
                        m.insert(q, s, g, tr(w, 0));
                    }
                }
            }
            LdaCell::Input(s) => {
                let w = if t.d == 0 { BOX } else { write_of(t.write, t.d) };
                m.insert(q, s, BOX, tr(w, (t.d != 0) as i8));
            }
            LdaCell::Store(g) => {
                let mut cells = vec![map(g)];
                if g == BLANK {
                    cells.extend(f1);
                }
                for cell in cells {
                    let w = if t.d == 0 || g == BLANK { cell } else { write_of(t.write, t.d) };
                    let w = if cell == f1.unwrap_or(usize::MAX) && t.d != 0 { BLANK } else { w };
                    for &s in &all_in {
                        m.insert(q, s, cell, tr(w, 0));
                    }
                }
            }
        }
    }
    Ok(LdaEmbedding { sda: m, k, copy_levels: 0, end_visits: 1 + (k - 1) / 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilde_examples() {
        let t = tilde_transform("01", 'a', 'b').unwrap();
        assert_eq!(render_track(&t), "a⟨0,0⟩⟨1,0⟩ba⟨0,1⟩⟨1,1⟩b");
        assert_eq!(t.len(), 8);
        assert!(tilde_transform("", 'a', 'b').unwrap().is_empty());
        assert_eq!(render_track(&tilde_transform("a", 'p', 'q').unwrap()), "p⟨a,a⟩q");
        assert_eq!(tilde_transform("ab", 'a', 'z'), Err(TransformError::MarkerCollision('a')));
    }

    #[test]
    fn hat_and_bar_examples() {
        assert_eq!(hat_transform("01", 'a', 'b', '#').unwrap(), "a01#10b".repeat(4));
        // |a ε b| = 2 blocks, matching (n+2)(2n+3) = 6
        assert_eq!(hat_transform("", 'a', 'b', '#').unwrap(), "a#b".repeat(2));
        assert_eq!(hat_transform("abcde", 'x', 'y', '#').unwrap().len(), 91);
        assert_eq!(bar_transform("abc"), "a111b111c");
        assert_eq!(bar_transform("a"), "a");
        assert_eq!(bar_transform(""), "");
    }

    use crate::corpus::fixture;
    use crate::engine::{all_strings, verdict};

    fn flt(name: &str) -> FlTransducerSpec {
        fixture(name).unwrap().flt()
    }

    #[test]
    fn transducer_examples() {
        assert_eq!(fl_run(&flt("identity"), "abc", None).unwrap().output, "abc");
        assert_eq!(fl_run(&flt("duplicate"), "ab", None).unwrap().output, "abab");
        assert_eq!(fl_run(&flt("duplicate"), "", None).unwrap().output, "");
        assert_eq!(fl_run(&flt("const_eps"), "abba", None).unwrap().output, "");
        let b = flt("binlen");
        assert_eq!(fl_run(&b, "aaaa", None).unwrap().output, "100");
        assert_eq!(fl_run(&b, "", None).unwrap().output, "0");
        for n in 0..70usize {
            let out = fl_run(&b, &"a".repeat(n), None).unwrap();
            assert_eq!(out.output, format!("{n:b}"));
            assert!(out.work_cells <= b.space.cells(n));
        }
        assert_eq!(fl_run(&b, "ab", Some(3)), Err(FlError::StepLimit(3)));
    }

    #[test]
    fn work_space_is_enforced() {
        let mut b = flt("binlen");
        b.space = FlSpace::Const;
        assert!(matches!(fl_run(&b, "aaaaaaaa", None), Err(FlError::SpaceExceeded { .. })));
    }

    #[test]
    fn composition_matches_the_pipeline() {
        for (f, m) in [("identity", "labc"), ("duplicate", "unary_ww"), ("binlen", "bin_even"), ("const_eps", "bin_even")] {
            let f = flt(f);
            let m = fixture(m).unwrap().sda();
            let c = compose_lemma32(&f, &m).unwrap();
            for x in all_strings(f.input.chars(), 6) {
                let y = fl_run(&f, &x, None).unwrap().output;
                let got = c.run(&x, &RunOptions::default()).unwrap();
                assert_eq!(got.verdict, verdict(&m, &y).unwrap(), "{x:?}");
                assert!(got.aux_cells <= got.aux_bound);
            }
        }
        assert!(matches!(compose_lemma32(&flt("identity"), &fixture("bin_even").unwrap().sda()), Err(ComposeError::AlphabetMismatch('a'))));
    }

    #[test]
    fn lda_interpreter_audits_turns() {
        let m = fixture("anbn_lda").unwrap().lda();
        assert_eq!(run_lda(&m, "aabb", None).unwrap().0, Verdict::Accept);
        assert_eq!(run_lda(&m, "aab", None).unwrap().0, Verdict::Reject);
        // a turn on a fresh cell counts twice, so writing A there is wrong
        let mut bad = m.clone();
        let a = bad.alphabet.sym("A").unwrap();
        let qa = bad.control.state("qa").unwrap();
        let pop = bad.control.state("pop").unwrap();
        bad.delta.insert((qa, LdaCell::Input(3)), LdaTrans { next: pop, write: LdaCell::Store(a), d: -1 });
        assert!(matches!(run_lda(&bad, "ab", None), Err(EngineError::DepthAudit { .. })));
    }

    #[test]
    fn lda_embeddings_are_equivalent() {
        for (name, len) in [("last_a", 8), ("sigma_star", 8), ("anbn_lda", 10)] {
            let lda = fixture(name).unwrap().lda();
            let emb = lda_to_sda_imm(&lda).unwrap();
            assert_eq!(emb.sda.flavor, Flavor::Immune);
            assert!(crate::model::Validate::validate(&emb.sda).is_ok(), "{name}");
            for x in all_strings(lda.input.chars(), len) {
                assert_eq!(verdict(&emb.sda, &x).unwrap(), run_lda(&lda, &x, None).unwrap().0, "{name} on {x:?}");
            }
        }
    }
}
