//! One-way deterministic pushdown automata and their equivalence with
//! depth-susceptible 2-sda's.
//!
//! A susceptible 2-sda can only read input on □, can only be stationary on
//! level-1 cells, and must keep its state across frozen B cells. Its storage
//! tape is therefore a stack of level-1 cells separated by runs of B, with
//! the head always at the top cell, at the first □, or drifting along B.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::engine::{EngineError, Recognizer, RunOutcome, SurfaceConfiguration, Verdict};
use crate::model::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvertError {
    #[error("expected a 2-sda, got k = {0}")]
    NotDepth2(usize),
    #[error("expected a depth-susceptible machine")]
    NotSusceptible,
    #[error("pda cannot be normalized: {0}")]
    NotNormalizable(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Runs a pda from `(q0, ▷, [bottom])`. ε-moves take precedence; reading
/// consumes the symbol unless it is `◁`.
pub fn run_pda(spec: &PdaSpec, x: &str, step_limit: Option<u64>) -> Result<RunOutcome, EngineError> {
    let tape = spec.input.tape(x)?;
    let limit = step_limit.unwrap_or_else(|| spec.default_step_limit(tape.len() - 2));
    let c = &spec.control;
    let mut q = c.q0;
    let mut pos = 0usize;
    let mut stack = vec![BOTTOM];
    let mut steps = 0u64;
    let mut implicit = false;
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
        let top = *stack.last().expect("bottom marker is never popped");
        let (t, consume) = match spec.delta.get(&(q, PdaRead::Eps, top)) {
            Some(t) => (t, false),
            None => match spec.delta.get(&(q, PdaRead::Sym(tape[pos]), top)) {
                Some(t) => (t, tape[pos] != RIGHT),
                None => {
                    implicit = true;
                    break Verdict::Reject;
                }
            },
        };
        stack.pop();
        stack.extend_from_slice(&t.push);
        if stack.is_empty() {
            // only a malformed spec pops the bottom marker
            implicit = true;
            break Verdict::Reject;
        }
        if consume {
            pos += 1;
        }
        q = t.next;
        steps += 1;
    };
    let final_config = SurfaceConfiguration { q, l1: pos, l2: stack.len() - 1, z: stack };
    Ok(RunOutcome { verdict, steps, final_config, implicit_reject: implicit })
}

impl Recognizer for PdaSpec {
    fn recognize(&self, x: &str) -> Result<Verdict, EngineError> {
        Ok(run_pda(self, x, None)?.verdict)
    }
}

fn fresh(used: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while !used.insert(name.clone()) {
        name.push('\'');
    }
    name
}

/// Where the simulated storage head is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Mode {
    /// On the first □; `gap`: the cell to its left is B.
    Front { gap: bool },
    /// On the top level-1 cell, or on ▷ when the stack is empty; `gap`: the
    /// cell to its right is B.
    Top { gap: bool },
    /// On a B cell.
    Drift,
}

const MODES: [Mode; 5] = [
    Mode::Front { gap: false },
    Mode::Front { gap: true },
    Mode::Top { gap: false },
    Mode::Top { gap: true },
    Mode::Drift,
];

impl Mode {
    fn tag(self) -> &'static str {
        match self {
            Mode::Front { gap: false } => "F",
            Mode::Front { gap: true } => "Fb",
            Mode::Top { gap: false } => "T",
            Mode::Top { gap: true } => "Tb",
            Mode::Drift => "D",
        }
    }
}

/// Converts a depth-susceptible 2-sda into an equivalent pda.
///
/// A pda state is `(q, buffered input symbol, head mode)`; a stack symbol is
/// a level-1 cell together with whether a B run sits directly below it. The
/// pda consumes an input symbol the first time the 2-sda looks at it and
/// replays it by ε-moves while the 2-sda's input head stays put.
pub fn sda2_to_pda(spec: &SdaSpec) -> Result<PdaSpec, ConvertError> {
    if spec.k() != 2 {
        return Err(ConvertError::NotDepth2(spec.k()));
    }
    if spec.flavor != Flavor::Susceptible {
        return Err(ConvertError::NotSusceptible);
    }
    let a = &spec.alphabet;
    let inp = &spec.input;
    let level1 = a.level(1);
    // stack ids: 0 bottom, then (γ, gap_below) pairs
    let mut used = HashSet::new();
    let mut stack = vec![END_NAME.to_string()];
    used.insert(END_NAME.to_string());
    for &g in &level1 {
        for gap in [false, true] {
            stack.push(fresh(&mut used, format!("{}.{}", a.name(g), if gap { "b" } else { "n" })));
        }
    }
    let stack_id = |g: Sym, gap: bool| 1 + 2 * level1.iter().position(|&h| h == g).unwrap() + gap as usize;
    let decode = |z: usize| -> Option<(Sym, bool)> { (z != BOTTOM).then(|| (level1[(z - 1) / 2], (z - 1) % 2 == 1)) };

    let n_in = inp.len();
    let bufs: Vec<Option<InSym>> = std::iter::once(None).chain((0..n_in).map(Some)).collect();
    let sid = |q: State, buf: Option<InSym>, m: Mode| -> State {
        let b = buf.map_or(0, |s| s + 1);
        let mi = MODES.iter().position(|&x| x == m).unwrap();
        (q * bufs.len() + b) * MODES.len() + mi
    };
    let mut names = Vec::new();
    let mut used = HashSet::new();
    for q in 0..spec.control.len() {
        for &buf in &bufs {
            for m in MODES {
                let b = buf.map_or("-".to_string(), |s| inp.name(s));
                names.push(fresh(&mut used, format!("{}/{}/{}", spec.control.name(q), b, m.tag())));
            }
        }
    }
    let pick = |states: &[State]| -> Vec<String> {
        let mut v = Vec::new();
        for &q in states {
            for &buf in &bufs {
                for m in MODES {
                    v.push(names[sid(q, buf, m)].clone());
                }
            }
        }
        v
    };
    let c = &spec.control;
    let q0 = names[sid(c.q0, None, Mode::Top { gap: false })].clone();
    let control = Control::new(&names, &q0, &pick(&c.accept), &pick(&c.reject))?;

    let mut delta = BTreeMap::new();
    for q in 0..c.len() {
        if c.is_halting(q) {
            continue;
        }
        for &buf in &bufs {
            for m in MODES {
                for z in 0..stack.len() {
                    let reads: Vec<(PdaRead, InSym)> = match buf {
                        None => (0..n_in).map(|s| (PdaRead::Sym(s), s)).collect(),
                        Some(s) => vec![(PdaRead::Eps, s)],
                    };
                    for (read, s) in reads {
                        let cell = match m {
                            Mode::Front { .. } => BOX,
                            Mode::Drift => BLANK,
                            Mode::Top { .. } => decode(z).map_or(END, |(g, _)| g),
                        };
                        let Some(t) = spec.get(q, s, cell) else { continue };
                        if t.d1 == 1 && s == RIGHT {
                            continue;
                        }
                        let nbuf = if t.d1 == 1 { None } else { Some(s) };
                        let keep = vec![z];
                        let (mode, push) = match (m, t.d2) {
                            (_, 0) => (m, keep),
                            (Mode::Front { gap }, 1) => {
                                if a.dv(t.write) != 1 {
                                    continue;
                                }
                                (Mode::Front { gap: false }, vec![z, stack_id(t.write, gap)])
                            }
                            (Mode::Front { gap }, _) => (if gap { Mode::Drift } else { Mode::Top { gap: true } }, keep),
                            (Mode::Drift, 1) => (Mode::Front { gap: true }, keep),
                            (Mode::Drift, _) => (Mode::Top { gap: true }, keep),
                            (Mode::Top { gap }, d) => match decode(z) {
                                None if d == 1 => (if gap { Mode::Drift } else { Mode::Front { gap: false } }, keep),
                                None => continue,
                                Some((_, below)) if d == -1 => {
                                    (if below { Mode::Drift } else { Mode::Top { gap: true } }, Vec::new())
                                }
                                Some(_) => (if gap { Mode::Drift } else { Mode::Front { gap: true } }, Vec::new()),
                            },
                        };
                        delta.insert((sid(q, buf, m), read, z), PdaTrans { next: sid(t.next, nbuf, mode), push });
                    }
                }
            }
        }
    }
    Ok(PdaSpec { control, input: inp.clone(), stack, delta })
}

/// Converts a pda into an equivalent depth-susceptible 2-sda.
///
/// The 2-sda keeps the pda's top symbol in its state and the rest of the
/// stack on the storage tape as level-1 cells, reading input only on the
/// first □. A push writes the symbols below the new top moving right. A pop
/// turns on the first □ (leaving B), walks left across B to the newest
/// level-1 cell, freezes it by a turn while moving its symbol into the
/// state, and walks right across B back to the first □.
pub fn pda_to_sda2(spec: &PdaSpec) -> Result<SdaSpec, ConvertError> {
    let nz = spec.stack.len();
    let mut used: HashSet<String> = [BOX_NAME, END_NAME, BLANK_NAME, RIGHT_NAME].iter().map(|s| s.to_string()).collect();
    let g_names: Vec<String> = spec.stack[1..].iter().map(|z| fresh(&mut used, z.clone())).collect();
    let alphabet = Alphabet::new(2, &[g_names.clone()])?;
    let gsyms: Vec<Sym> = g_names.iter().map(|n| alphabet.sym(n).unwrap()).collect();
    let store = |z: usize| gsyms[z - 1];

    let c = &spec.control;
    let mut used = HashSet::new();
    let mut names = Vec::new();
    // (q, top) states first, then fetch(q), then push chains
    for q in 0..c.len() {
        for z in 0..nz {
            let zn = if z == BOTTOM { "_".to_string() } else { spec.stack[z].clone() };
            names.push(fresh(&mut used, format!("{}.{}", c.name(q), zn)));
        }
    }
    let top_state = |q: State, z: usize| q * nz + z;
    let fetch0 = names.len();
    for q in 0..c.len() {
        names.push(fresh(&mut used, format!("fetch.{}", c.name(q))));
    }

    struct Chain {
        writes: Vec<usize>,
        then: State,
    }
    let mut chains: Vec<(usize, Chain)> = Vec::new();
    let mut plan = Vec::new();
    for (&(q, read, z), t) in &spec.delta {
        if z >= nz || t.push.iter().any(|&w| w >= nz) {
            return Err(ConvertError::NotNormalizable("unknown stack symbol".into()));
        }
        let mut w = t.push.clone();
        if z == BOTTOM {
            if w.first() != Some(&BOTTOM) || w[1..].contains(&BOTTOM) {
                return Err(ConvertError::NotNormalizable("bottom marker must stay at the bottom".into()));
            }
            w.remove(0);
        } else if w.contains(&BOTTOM) {
            return Err(ConvertError::NotNormalizable("bottom marker pushed above the bottom".into()));
        }
        let (new_top, writes) = match (w.pop(), z) {
            (Some(top), _) => (Some(top), w),
            (None, BOTTOM) => (Some(BOTTOM), w),
            (None, _) => (None, w),
        };
        let first_chain = if writes.len() > 1 {
            let id = names.len();
            for i in 1..writes.len() {
                names.push(fresh(&mut used, format!("push{}.{}", chains.len(), i)));
            }
            let then = top_state(t.next, new_top.unwrap());
            chains.push((id, Chain { writes: writes[1..].to_vec(), then }));
            Some(id)
        } else {
            None
        };
        plan.push((q, read, z, t.next, new_top, writes, first_chain));
    }

    let pick = |qs: &[State]| -> Vec<String> { qs.iter().flat_map(|&q| (0..nz).map(move |z| top_state(q, z))).map(|s| names[s].clone()).collect() };
    let control = Control::new(&names, &names[top_state(c.q0, BOTTOM)], &pick(&c.accept), &pick(&c.reject))?;
    let input = spec.input.clone();
    let mut m = SdaSpec::new(Flavor::Susceptible, alphabet, control, input.clone());
    let tr = |next: State, write: Sym, d1: i8, d2: i8| Trans { next, write, d1, d2 };
    let all_in: Vec<InSym> = (0..input.len()).collect();

    // walking across B and leaving ▷ are the same for every (q, top)
    for q in 0..c.len() {
        for z in 0..nz {
            let st = top_state(q, z);
            for &s in &all_in {
                if c.is_halting(q) {
                    break;
                }
                m.insert(st, s, BLANK, tr(st, BLANK, 0, 1));
                if z == BOTTOM {
                    m.insert(st, s, END, tr(st, END, 0, 1));
                }
            }
        }
        let f = fetch0 + q;
        for &s in &all_in {
            m.insert(f, s, BLANK, tr(f, BLANK, 0, -1));
            m.insert(f, s, END, tr(top_state(q, BOTTOM), END, 0, 1));
            for z in 1..nz {
                m.insert(f, s, store(z), tr(top_state(q, z), BLANK, 0, 1));
            }
        }
    }
    // pda moves, taken on the first □
    for (q, read, z, next, new_top, writes, chain) in plan {
        if c.is_halting(q) {
            continue;
        }
        let st = top_state(q, z);
        let syms: Vec<InSym> = match read {
            PdaRead::Eps => all_in.clone(),
            PdaRead::Sym(s) => vec![s],
        };
        for s in syms {
            let d1 = if read != PdaRead::Eps && s != RIGHT { 1 } else { 0 };
            let t = match (new_top, writes.first()) {
                (None, _) => tr(fetch0 + next, BLANK, d1, -1),
                (Some(top), None) => tr(top_state(next, top), BOX, d1, 0),
                (Some(top), Some(&w)) => tr(chain.unwrap_or(top_state(next, top)), store(w), d1, 1),
            };
            m.insert(st, s, BOX, t);
        }
    }
    for (id, ch) in chains {
        for (i, &w) in ch.writes.iter().enumerate() {
            let next = if i + 1 == ch.writes.len() { ch.then } else { id + i + 1 };
            for &s in &all_in {
                m.insert(id + i, s, BOX, tr(next, store(w), 0, 1));
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::load;

    const PARENS: &str = "pda
states: s q acc
accept: acc
input: ( )
stack: X
delta:
s > > -> q >
q ( > -> q > X
q ( X -> q X X
q ) X -> q -
q < > -> acc >
";

    fn pda(text: &str) -> PdaSpec {
        match load(text).unwrap() {
            crate::dsl::Machine::Pda(p) => p,
            other => panic!("{}", other.kind()),
        }
    }

    #[test]
    fn balanced_parentheses() {
        let p = pda(PARENS);
        assert_eq!(run_pda(&p, "(())", None).unwrap().verdict, Verdict::Accept);
        assert_eq!(run_pda(&p, "(()", None).unwrap().verdict, Verdict::Reject);
        assert_eq!(run_pda(&p, ")(", None).unwrap().verdict, Verdict::Reject);
    }

    #[test]
    fn eps_loop_hits_the_limit() {
        let p = pda("pda\nstates: l\ninput: a\ndelta:\nl eps > -> l >\n");
        assert_eq!(run_pda(&p, "aa", Some(50)).unwrap().verdict, Verdict::StepLimit);
    }

    #[test]
    fn conversion_preconditions() {
        let m = crate::corpus::fixture("zigzag").unwrap().sda();
        assert_eq!(sda2_to_pda(&m).unwrap_err(), ConvertError::NotDepth2(3));
    }

    #[test]
    fn parens_to_sda_and_back() {
        use crate::engine::cross_check;
        let p = pda(PARENS);
        let m = pda_to_sda2(&p).unwrap();
        assert!(m.validate().is_ok(), "{}", m.validate());
        let sigma = ['(', ')'];
        assert!(cross_check(&p, &m, &sigma, 8).unwrap().equivalent());
        let back = sda2_to_pda(&m).unwrap();
        assert!(back.validate().is_ok());
        assert!(cross_check(&p, &back, &sigma, 8).unwrap().equivalent());
    }
}
