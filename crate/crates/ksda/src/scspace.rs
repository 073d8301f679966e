//! Space-efficient simulation of depth-immune k-sda's by markers and
//! contingency lists.
//!
//! The left-visible markers of a configuration form a stack ordered by both
//! time and cell: the last visit of every cell left of the storage head. A
//! contingency list samples that stack (and its right-hand mirror) per
//! section level: for each `d` it keeps the earliest visible marker of each
//! `d`-half of the current `(d+1)`-section, and of the latest completed
//! `(d+1)`-section still holding a visible marker. Every stored marker
//! carries a snapshot of the list at its own time, stripped of further
//! snapshots. Popping a cut restores the list from the cut's snapshot; a
//! missing snapshot is rebuilt by replaying Subroutine 𝒜 from an older stored
//! marker, which is where recursion happens.

use std::rc::Rc;

use thiserror::Error;

use crate::engine::{run, EngineError, RunOptions, Verdict};
use crate::model::{ceil_log2, InSym, SdaSpec, State, Sym, BOX, END};

/// `(q, l1, l2, σ, r, t)`: state, input head, storage head, scanned storage
/// symbol, section time and step time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Marker {
    pub q: State,
    pub l1: usize,
    pub l2: usize,
    pub sym: Sym,
    pub r: u64,
    pub t: u64,
}

impl Marker {
    pub fn initial(q0: State) -> Self {
        Marker { q: q0, l1: 0, l2: 0, sym: END, r: 0, t: 0 }
    }

    pub fn state(&self) -> State {
        self.q
    }
    pub fn in_loc(&self) -> usize {
        self.l1
    }
    pub fn st_loc(&self) -> usize {
        self.l2
    }
    pub fn symb(&self) -> Sym {
        self.sym
    }
    pub fn sectime(&self) -> u64 {
        self.r
    }
    pub fn time(&self) -> u64 {
        self.t
    }
}

#[derive(Debug, Error)]
pub enum ScError {
    #[error("step limit {0} reached")]
    StepLimit(u64),
    #[error("recursion depth {depth} exceeds the bound {bound}")]
    RecursionOverflow { depth: usize, bound: usize },
    #[error("replay diverged at time {t}: {detail}")]
    ContractViolation { t: u64, detail: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Section times of a run given its storage directions: `r₀ = 0` and
/// `r_{t+1} = r_t + |d2_t|`. One entry per marker, so one more than moves.
pub fn section_time(d2: &[i8]) -> Vec<u64> {
    let mut out = Vec::with_capacity(d2.len() + 1);
    let mut r = 0u64;
    out.push(0);
    for &d in d2 {
        r += d.unsigned_abs() as u64;
        out.push(r);
    }
    out
}

/// All markers of a direct engine run, `C_0 … C_T`.
pub fn trace_markers(spec: &SdaSpec, x: &str, step_limit: Option<u64>) -> Result<Vec<Marker>, EngineError> {
    let mut opts = RunOptions::traced();
    opts.step_limit = step_limit;
    opts.no_audit = true;
    let rep = run(spec, x, &opts)?;
    let d2: Vec<i8> = rep.trace.iter().map(|r| r.dirs[1]).collect();
    let rs = section_time(&d2);
    let mut out: Vec<Marker> = rep
        .trace
        .iter()
        .zip(&rs)
        .map(|(tr, &r)| Marker { q: tr.state, l1: tr.heads[0], l2: tr.storage, sym: tr.scanned, r, t: tr.t })
        .collect();
    let f = &rep.outcome.final_config;
    out.push(Marker { q: f.q, l1: f.l1, l2: f.l2, sym: f.cell(f.l2), r: *rs.last().unwrap(), t: rep.outcome.steps });
    Ok(out)
}

/// Which half of the storage tape a list looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Last-good or current part of `L^{(a)}(d, l2, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListKind {
    Last,
    Cur,
}

fn beyond(side: Side, a: usize, b: usize) -> bool {
    match side {
        Side::Left => a < b,
        Side::Right => a > b,
    }
}

/// Left or right cut of `markers[t]`, by direct scan.
pub fn cut(markers: &[Marker], t: usize, side: Side) -> Option<usize> {
    (0..t).rev().find(|&j| visible(markers, j, t, side))
}

/// Left- and right-cut of `markers[t]`.
pub fn cuts(markers: &[Marker], t: usize) -> (Option<usize>, Option<usize>) {
    (cut(markers, t, Side::Left), cut(markers, t, Side::Right))
}

/// Whether `markers[j]` is left- (right-) visible from `markers[t]`.
pub fn visible(markers: &[Marker], j: usize, t: usize, side: Side) -> bool {
    let lj = markers[j].l2;
    j < t
        && beyond(side, lj, markers[t].l2)
        && !markers[j + 1..t].iter().any(|m| m.l2 == lj || beyond(side, m.l2, lj))
}

/// Representative of the `d`-section `s` among `markers[..=t]`: leftmost
/// (rightmost) cell, latest on ties.
fn representative(markers: &[Marker], t: usize, d: usize, s: u64, side: Side) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in markers[..=t].iter().enumerate() {
        if m.r >> d != s {
            continue;
        }
        match best {
            Some(b) if beyond(side, markers[b].l2, m.l2) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// `L^{(a)}_b(d, l2, t)` for every `d < levels`, as marker times, re-derived
/// from a full run by the definitions. Completed-section lists keep only
/// visible representatives, like the current ones.
pub fn brute_force_lists(markers: &[Marker], t: usize, levels: usize, side: Side) -> Vec<(Vec<u64>, Vec<u64>)> {
    let r = markers[t].r;
    let vis_rep = |d: usize, s: u64| {
        representative(markers, t, d, s, side).filter(|&i| visible(markers, i, t, side)).map(|i| markers[i].t)
    };
    (0..levels)
        .map(|d| {
            let cs = r >> (d + 1);
            let cur: Vec<u64> = [2 * cs, 2 * cs + 1].iter().filter_map(|&h| vis_rep(d, h)).collect();
            let good = (0..cs).rev().find(|&s| vis_rep(d + 1, s).is_some());
            let last = match good {
                Some(s) => [2 * s, 2 * s + 1].iter().filter_map(|&h| vis_rep(d, h)).collect(),
                None => Vec::new(),
            };
            (last, cur)
        })
        .collect()
}

/// A stored marker and, when kept, the contingency tree at its own time.
#[derive(Clone, Debug)]
pub struct Node {
    pub marker: Marker,
    /// Symbol the marker's step left in its cell: `next-symb`.
    pub next_symb: Sym,
    pub child: Option<Rc<ContingencyTree>>,
}

/// One level `d` of one side: `(last, cur)` marker sequences, oldest first.
#[derive(Clone, Debug, Default)]
pub struct Level {
    pub last: Vec<Rc<Node>>,
    pub cur: Vec<Rc<Node>>,
}

#[derive(Clone, Debug, Default)]
pub struct SideList {
    pub levels: Vec<Level>,
}

impl SideList {
    fn empty(levels: usize) -> Self {
        SideList { levels: vec![Level::default(); levels] }
    }

    fn nodes(&self) -> impl Iterator<Item = &Rc<Node>> {
        self.levels.iter().flat_map(|l| l.last.iter().chain(&l.cur))
    }

    /// The newest stored marker: the cut.
    pub fn top(&self) -> Option<&Rc<Node>> {
        self.nodes().max_by_key(|n| n.marker.t)
    }

    fn bottom(&self) -> Option<Rc<Node>> {
        self.levels.last().and_then(|l| l.last.iter().chain(&l.cur).min_by_key(|n| n.marker.t).cloned())
    }

    /// `(last, cur)` at level `d`; levels beyond the stored ones see the whole
    /// run inside one section, so only the bottom marker appears.
    fn view(&self, d: usize) -> (Vec<Rc<Node>>, Vec<Rc<Node>>) {
        match self.levels.get(d) {
            Some(l) => (l.last.clone(), l.cur.clone()),
            None => (Vec::new(), self.bottom().into_iter().collect()),
        }
    }

    /// Marker times of `L_b(d)`.
    pub fn times(&self, d: usize, kind: ListKind) -> Vec<u64> {
        let l = &self.levels[d];
        let v = if kind == ListKind::Last { &l.last } else { &l.cur };
        v.iter().map(|n| n.marker.t).collect()
    }

    /// The newest marker becomes visible: `C_t` with section time `r` just
    /// moved away from this side.
    fn push(&self, node: Rc<Node>, r: u64) -> SideList {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(d, l)| {
                let has = l.cur.iter().any(|n| n.marker.r >> d == r >> d);
                let mut cur = l.cur.clone();
                if !has {
                    cur.push(node.clone());
                }
                if r >> (d + 1) == (r + 1) >> (d + 1) {
                    Level { last: l.last.clone(), cur }
                } else {
                    Level { last: cur, cur: Vec::new() }
                }
            })
            .collect();
        SideList { levels }
    }

    /// The cut was popped: the visible stack is now the one seen by the cut
    /// itself, whose list `self` was taken at section time `r_s`.
    fn reopen(&self, r_s: u64, r_new: u64, levels: usize) -> SideList {
        let levels = (0..levels)
            .map(|d| {
                let (last, cur) = self.view(d);
                if r_s >> (d + 1) == r_new >> (d + 1) {
                    Level { last, cur }
                } else if cur.is_empty() {
                    Level { last, cur: Vec::new() }
                } else {
                    Level { last: cur, cur: Vec::new() }
                }
            })
            .collect();
        SideList { levels }
    }

    fn grow(&mut self) {
        let cur = self.bottom().into_iter().collect();
        self.levels.push(Level { last: Vec::new(), cur });
    }
}

/// The principal contingency list: both sides.
#[derive(Clone, Debug, Default)]
pub struct ContingencyList {
    pub left: SideList,
    pub right: SideList,
}

impl ContingencyList {
    pub fn side(&self, side: Side) -> &SideList {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// `𝒟(dv, e1, e2, l2, t)`: the root marker, its principal list, and the
/// snapshots hanging off the listed markers.
#[derive(Clone, Debug)]
pub struct ContingencyTree {
    pub dv: usize,
    pub root: Marker,
    pub list: ContingencyList,
}

impl ContingencyTree {
    pub fn e1(&self) -> usize {
        self.list.left.levels.len() - 1
    }

    pub fn e2(&self) -> usize {
        self.list.right.levels.len() - 1
    }

    /// Copy keeping `depth` further levels of snapshots below the listed
    /// markers.
    fn truncated(&self, depth: usize) -> ContingencyTree {
        let cut = |v: &[Rc<Node>]| -> Vec<Rc<Node>> {
            v.iter()
                .map(|n| {
                    let child = if depth == 0 { None } else { n.child.as_ref().map(|c| Rc::new(c.truncated(depth - 1))) };
                    Rc::new(Node { marker: n.marker, next_symb: n.next_symb, child })
                })
                .collect()
        };
        let side = |s: &SideList| SideList { levels: s.levels.iter().map(|l| Level { last: cut(&l.last), cur: cut(&l.cur) }).collect() };
        ContingencyTree { dv: self.dv, root: self.root, list: ContingencyList { left: side(&self.list.left), right: side(&self.list.right) } }
    }

    fn nodes(&self) -> impl Iterator<Item = &Rc<Node>> {
        self.list.left.nodes().chain(self.list.right.nodes())
    }
}

/// All markers stored in the tree, counting every list entry, snapshots
/// included.
pub fn marker_count(tree: &ContingencyTree) -> usize {
    tree.list
        .left
        .nodes()
        .chain(tree.list.right.nodes())
        .map(|n| 1 + n.child.as_deref().map_or(0, marker_count))
        .sum()
}

/// Resource record of one run of Procedure 𝒫.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpaceStats {
    pub n: usize,
    pub k: usize,
    pub steps: u64,
    /// Most markers held at once, over the principal tree and every tree
    /// alive on the recursion stack.
    pub peak_markers: usize,
    pub bits_per_marker: usize,
    pub peak_bits: usize,
    pub recursion_depth: usize,
    pub recursive_calls: u64,
    pub replayed_steps: u64,
}

impl SpaceStats {
    /// `key=value` pairs, one line.
    pub fn record(&self) -> String {
        format!(
            "n={} k={} peak_markers={} peak_bits={} recursion_depth={} steps={}",
            self.n, self.k, self.peak_markers, self.peak_bits, self.recursion_depth, self.steps
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcedureOutcome {
    pub verdict: Verdict,
    pub steps: u64,
    pub last: Marker,
    pub implicit_reject: bool,
    pub stats: SpaceStats,
}

impl ProcedureOutcome {
    pub const CSV_HEADER: &'static str = "n,k,steps,peak_markers,peak_bits,recursion_depth,verdict";

    pub fn csv_row(&self) -> String {
        let s = &self.stats;
        format!("{},{},{},{},{},{},{}", s.n, s.k, s.steps, s.peak_markers, s.peak_bits, s.recursion_depth, self.verdict)
    }
}

/// One application of Subroutine 𝒜.
pub enum Advance {
    Next(ContingencyTree),
    Halt { verdict: Verdict, implicit: bool },
}

/// Simulation context shared by the top level and every replay.
pub struct Simulator<'a> {
    spec: &'a SdaSpec,
    tape: Vec<InSym>,
    /// Snapshot levels kept below the principal list.
    snapshot_depth: usize,
    base_levels: usize,
    depth_bound: usize,
    held: Vec<usize>,
    peak: usize,
    max_depth: usize,
    calls: u64,
    replayed: u64,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a SdaSpec, x: &str) -> Result<Self, ScError> {
        let tape = spec.input.tape(x).map_err(EngineError::from)?;
        let n = tape.len() - 2;
        let e = ceil_log2(n);
        Ok(Simulator {
            spec,
            tape,
            snapshot_depth: spec.k().saturating_sub(3),
            base_levels: e + 1,
            depth_bound: 8 * (e + 2) + 4 * spec.k(),
            held: Vec::new(),
            peak: 0,
            max_depth: 0,
            calls: 0,
            replayed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.tape.len() - 2
    }

    /// `𝒟(k, e, e, 0, 0)` rooted at `C₀` with empty lists.
    pub fn genesis(&self) -> ContingencyTree {
        let side = SideList::empty(self.base_levels);
        ContingencyTree {
            dv: self.spec.k(),
            root: Marker::initial(self.spec.control.q0),
            list: ContingencyList { left: side.clone(), right: side },
        }
    }

    fn levels_for(&self, r: u64, have: usize) -> usize {
        let mut l = have.max(self.base_levels);
        while l < 64 && r >> l != 0 {
            l += 1;
        }
        l
    }

    fn note(&mut self, tree: &ContingencyTree) {
        let live = self.held.iter().sum::<usize>() + marker_count(tree);
        self.peak = self.peak.max(live);
    }

    /// Subroutine 𝒜: from the tree at time `t` to the tree at `t + 1`.
    pub fn advance(&mut self, tree: &ContingencyTree, depth: usize) -> Result<Advance, ScError> {
        let spec = self.spec;
        let c = tree.root;
        if spec.control.is_accepting(c.q) {
            return Ok(Advance::Halt { verdict: Verdict::Accept, implicit: false });
        }
        if spec.control.is_rejecting(c.q) {
            return Ok(Advance::Halt { verdict: Verdict::Reject, implicit: false });
        }
        let Some(&tr) = spec.get(c.q, self.tape[c.l1], c.sym) else {
            return Ok(Advance::Halt { verdict: Verdict::Reject, implicit: true });
        };
        let l1 = c.l1 as i64 + tr.d1 as i64;
        if l1 < 0 || l1 as usize >= self.tape.len() {
            return Err(EngineError::InputOverrun { t: c.t }.into());
        }
        let l1 = l1 as usize;
        if tr.d2 == 0 {
            let root = Marker { q: tr.next, l1, l2: c.l2, sym: tr.write, r: c.r, t: c.t + 1 };
            return Ok(Advance::Next(ContingencyTree { dv: tree.dv, root, list: tree.list.clone() }));
        }
        if tr.d2 == -1 && c.l2 == 0 {
            return Err(ScError::ContractViolation { t: c.t, detail: "storage head left the endmarker".into() });
        }
        let r = c.r + 1;
        let l2 = (c.l2 as i64 + tr.d2 as i64) as usize;
        let levels = self.levels_for(r, tree.list.left.levels.len());
        let child = (self.snapshot_depth > 0).then(|| Rc::new(tree.truncated(self.snapshot_depth - 1)));
        let node = Rc::new(Node { marker: c, next_symb: tr.write, child });
        let (push_side, pop_side) = if tr.d2 == 1 { (Side::Left, Side::Right) } else { (Side::Right, Side::Left) };
        let mut pushed = tree.list.side(push_side).push(node, c.r);
        while pushed.levels.len() < levels {
            pushed.grow();
        }
        let (popped, sym) = match tree.list.side(pop_side).top().cloned() {
            None if tr.d2 == 1 => (SideList::empty(levels), BOX),
            None => return Err(ScError::ContractViolation { t: c.t, detail: "no left cut for a left move".into() }),
            Some(cut) => {
                if cut.marker.l2 != l2 {
                    return Err(ScError::ContractViolation {
                        t: c.t,
                        detail: format!("cut at cell {} but the head moves to {l2}", cut.marker.l2),
                    });
                }
                let at_cut = match &cut.child {
                    Some(ch) => ch.clone(),
                    None => self.rebuild(cut.marker, tree, depth + 1)?,
                };
                (at_cut.list.side(pop_side).reopen(cut.marker.r, r, levels), cut.next_symb)
            }
        };
        let (left, right) = if tr.d2 == 1 { (pushed, popped) } else { (popped, pushed) };
        let root = Marker { q: tr.next, l1, l2, sym, r, t: c.t + 1 };
        Ok(Advance::Next(ContingencyTree { dv: tree.dv, root, list: ContingencyList { left, right } }))
    }

    /// Tree at the time of `target`, replayed from the newest stored marker
    /// of `ctx` older than `target` that still has its snapshot, or from `C₀`.
    fn rebuild(&mut self, target: Marker, ctx: &ContingencyTree, depth: usize) -> Result<Rc<ContingencyTree>, ScError> {
        if depth > self.depth_bound {
            return Err(ScError::RecursionOverflow { depth, bound: self.depth_bound });
        }
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
        let start = ctx
            .nodes()
            .filter(|n| n.marker.t < target.t)
            .filter_map(|n| n.child.clone())
            .max_by_key(|c| c.root.t);
        let mut cur = match start {
            Some(c) => (*c).clone(),
            None => self.genesis(),
        };
        cur.dv = ctx.dv.saturating_sub(1);
        self.held.push(marker_count(ctx));
        while cur.root.t < target.t {
            match self.advance(&cur, depth)? {
                Advance::Next(next) => cur = next,
                Advance::Halt { .. } => {
                    self.held.pop();
                    return Err(ScError::ContractViolation { t: cur.root.t, detail: "replay halted before its target".into() });
                }
            }
            self.replayed += 1;
            self.note(&cur);
        }
        self.held.pop();
        if cur.root != target {
            return Err(ScError::ContractViolation { t: target.t, detail: format!("replay reached {:?}, expected {target:?}", cur.root) });
        }
        Ok(Rc::new(cur))
    }

    fn stats(&self, steps: u64) -> SpaceStats {
        let spec = self.spec;
        let n = self.n();
        let limit = spec.default_step_limit(n) as usize;
        let bits = ceil_log2(spec.control.len()) + ceil_log2(n + 2) + 3 * ceil_log2(limit + 1) + ceil_log2(spec.alphabet.len());
        SpaceStats {
            n,
            k: spec.k(),
            steps,
            peak_markers: self.peak,
            bits_per_marker: bits,
            peak_bits: self.peak * bits,
            recursion_depth: self.max_depth,
            recursive_calls: self.calls,
            replayed_steps: self.replayed,
        }
    }
}

/// Procedure 𝒫: iterates Subroutine 𝒜 from `C₀` until a halting state.
pub fn procedure_p(spec: &SdaSpec, x: &str, step_limit: Option<u64>) -> Result<ProcedureOutcome, ScError> {
    procedure_p_observed(spec, x, step_limit, &mut |_| {})
}

/// [`procedure_p`], handing every principal tree to `observe`.
pub fn procedure_p_observed(
    spec: &SdaSpec,
    x: &str,
    step_limit: Option<u64>,
    observe: &mut dyn FnMut(&ContingencyTree),
) -> Result<ProcedureOutcome, ScError> {
    let mut sim = Simulator::new(spec, x)?;
    let limit = step_limit.unwrap_or_else(|| spec.default_step_limit(sim.n()));
    let mut tree = sim.genesis();
    observe(&tree);
    loop {
        match sim.advance(&tree, 0)? {
            Advance::Halt { verdict, implicit } => {
                let steps = tree.root.t;
                return Ok(ProcedureOutcome { verdict, steps, last: tree.root, implicit_reject: implicit, stats: sim.stats(steps) });
            }
            Advance::Next(next) => {
                if next.root.t > limit {
                    return Err(ScError::StepLimit(limit));
                }
                tree = next;
                sim.note(&tree);
                observe(&tree);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use crate::engine::{all_strings, verdict};

    #[test]
    fn section_times() {
        assert_eq!(section_time(&[0, 0, 0]), vec![0; 4]);
        assert_eq!(section_time(&[1, 1, 1]), vec![0, 1, 2, 3]);
        assert_eq!(section_time(&[1, 0, 0, 1]), vec![0, 1, 1, 1, 2]);
        assert_eq!(section_time(&[1, -1]), vec![0, 1, 2]);
    }

    #[test]
    fn cuts_on_a_sweep() {
        let m = fixture("zigzag").unwrap().sda();
        let ms = trace_markers(&m, "abba", None).unwrap();
        // t = 2 is the first step on a fresh cell after moving right from cell 1
        let t = ms.iter().position(|c| c.l2 == 2).unwrap();
        assert_eq!(cut(&ms, t, Side::Left), Some(t - 1));
        assert_eq!(cut(&ms, 0, Side::Left), None);
        assert_eq!(cut(&ms, t, Side::Right), None);
    }

    #[test]
    fn empty_tree_has_no_markers() {
        let m = fixture("zigzag").unwrap().sda();
        let sim = Simulator::new(&m, "ab").unwrap();
        assert_eq!(marker_count(&sim.genesis()), 0);
    }

    #[test]
    fn verdicts_match_the_engine() {
        for name in ["zigzag", "labc_immune"] {
            let m = fixture(name).unwrap().sda();
            for x in all_strings(m.input.chars(), 6) {
                let out = procedure_p(&m, &x, None).unwrap_or_else(|e| panic!("{name} {x:?}: {e}"));
                assert_eq!(out.verdict, verdict(&m, &x).unwrap(), "{name} {x:?}");
            }
        }
    }

    #[test]
    fn roots_and_lists_follow_the_trace() {
        let m = fixture("zigzag").unwrap().sda();
        for x in ["", "a", "abba", "babaabba", "aaaaabbbbbab"] {
            let ms = trace_markers(&m, x, None).unwrap();
            let mut t = 0usize;
            procedure_p_observed(&m, x, None, &mut |tree| {
                assert_eq!(tree.root, ms[t], "{x:?} t={t}");
                for side in [Side::Left, Side::Right] {
                    let s = tree.list.side(side);
                    let want = brute_force_lists(&ms, t, s.levels.len(), side);
                    for (d, (last, cur)) in want.iter().enumerate() {
                        assert_eq!(&s.times(d, ListKind::Last), last, "{x:?} t={t} {side:?} d={d} last");
                        assert_eq!(&s.times(d, ListKind::Cur), cur, "{x:?} t={t} {side:?} d={d} cur");
                    }
                }
                t += 1;
            })
            .unwrap();
            assert_eq!(t, ms.len());
        }
    }

    #[test]
    fn zigzag_recurses() {
        let m = fixture("zigzag").unwrap().sda();
        let out = procedure_p(&m, "abababab", None).unwrap();
        assert!(out.stats.recursive_calls > 0);
        assert!(out.stats.peak_markers > 0);
    }
}
