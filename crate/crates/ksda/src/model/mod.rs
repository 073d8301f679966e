//! Machine descriptions shared by every engine and construction.
//!
//! Symbols are interned: storage symbols, input symbols and states are small
//! integer ids with a name table next to them. Depth levels are explicit and
//! never inferred from names.

pub mod validate;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use validate::{Severity, Validate, ValidationReport, Violation, ViolationKind};

/// State id, an index into the owning spec's state table.
pub type State = usize;
/// Storage symbol id, an index into an [`Alphabet`].
pub type Sym = usize;
/// Input tape symbol id, an index into an [`InputAlphabet`].
pub type InSym = usize;

/// The initial blank, the only level-0 symbol.
pub const BOX: Sym = 0;
/// The left endmarker of the storage tape (level k).
pub const END: Sym = 1;
/// The frozen blank (level k).
pub const BLANK: Sym = 2;

/// Left endmarker of the input tape.
pub const LEFT: InSym = 0;
/// Right endmarker of the input tape.
pub const RIGHT: InSym = 1;

/// DSL names of the reserved storage symbols.
pub const BOX_NAME: &str = "BOX";
pub const END_NAME: &str = ">";
pub const BLANK_NAME: &str = "B";
pub const RIGHT_NAME: &str = "<";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("depth must be at least {min}, got {k}")]
    BadDepth { k: usize, min: usize },
    #[error("symbol `{0}` is reserved")]
    Reserved(String),
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("unknown storage symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown input symbol `{0}`")]
    UnknownInput(String),
    #[error("state set is empty")]
    NoStates,
    #[error("transition for ({0}) defined twice")]
    DuplicateTransition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Susceptible,
    Immune,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Susceptible => "susceptible",
            Flavor::Immune => "immune",
        }
    }
}

/// Depth-leveled storage alphabet. Level 0 is `{□}`, level k is `{▷, B}`,
/// levels 1..k-1 hold user symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    k: usize,
    names: Vec<String>,
    levels: Vec<usize>,
    index: HashMap<String, Sym>,
}

impl Alphabet {
    /// `inner[i]` lists the symbols of level `i + 1`; its length must be `k - 1`.
    pub fn new(k: usize, inner: &[Vec<String>]) -> Result<Self, ModelError> {
        if k < 1 {
            return Err(ModelError::BadDepth { k, min: 1 });
        }
        let mut a = Alphabet {
            k,
            names: vec![BOX_NAME.into(), END_NAME.into(), BLANK_NAME.into()],
            levels: vec![0, k, k],
            index: HashMap::new(),
        };
        for (i, n) in a.names.iter().enumerate() {
            a.index.insert(n.clone(), i);
        }
        for (i, level) in inner.iter().enumerate() {
            let e = i + 1;
            if e >= k {
                return Err(ModelError::BadDepth { k, min: e + 1 });
            }
            for name in level {
                a.push(name, e)?;
            }
        }
        Ok(a)
    }

    fn push(&mut self, name: &str, e: usize) -> Result<Sym, ModelError> {
        if is_reserved(name) {
            return Err(ModelError::Reserved(name.into()));
        }
        if self.index.contains_key(name) {
            return Err(ModelError::Duplicate(name.into()));
        }
        let id = self.names.len();
        self.names.push(name.into());
        self.levels.push(e);
        self.index.insert(name.into(), id);
        Ok(id)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Depth value of a symbol.
    pub fn dv(&self, s: Sym) -> usize {
        self.levels[s]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s]
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        0..self.names.len()
    }

    /// Symbols of level `e`.
    pub fn level(&self, e: usize) -> Vec<Sym> {
        self.symbols().filter(|&s| self.levels[s] == e).collect()
    }

    /// User symbols grouped by level 1..k-1, in declaration order.
    pub fn inner_levels(&self) -> Vec<Vec<String>> {
        (1..self.k)
            .map(|e| self.level(e).into_iter().map(|s| self.names[s].clone()).collect())
            .collect()
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(name, BOX_NAME | END_NAME | BLANK_NAME | RIGHT_NAME | "->" | "#") || name.is_empty()
}

/// Input alphabet Σ extended with the two endmarkers. Id 0 is `▷`, id 1 is
/// `◁`, id `2 + i` is the i-th declared character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputAlphabet {
    chars: Vec<char>,
    lookup: HashMap<char, InSym>,
}

impl InputAlphabet {
    pub fn new(chars: &[char]) -> Result<Self, ModelError> {
        let mut lookup = HashMap::new();
        for (i, &c) in chars.iter().enumerate() {
            if c == '>' || c == '<' || c.is_whitespace() {
                return Err(ModelError::Reserved(c.to_string()));
            }
            if lookup.insert(c, i + 2).is_some() {
                return Err(ModelError::Duplicate(c.to_string()));
            }
        }
        Ok(InputAlphabet { chars: chars.to_vec(), lookup })
    }

    /// Number of tape symbols including both endmarkers.
    pub fn len(&self) -> usize {
        self.chars.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn index(&self, c: char) -> Option<InSym> {
        self.lookup.get(&c).copied()
    }

    pub fn char_of(&self, s: InSym) -> Option<char> {
        if s >= 2 {
            self.chars.get(s - 2).copied()
        } else {
            None
        }
    }

    pub fn name(&self, s: InSym) -> String {
        match s {
            LEFT => END_NAME.into(),
            RIGHT => RIGHT_NAME.into(),
            _ => self.chars[s - 2].to_string(),
        }
    }

    pub fn parse_name(&self, name: &str) -> Option<InSym> {
        match name {
            END_NAME => Some(LEFT),
            RIGHT_NAME => Some(RIGHT),
            _ => {
                let mut it = name.chars();
                let c = it.next()?;
                if it.next().is_some() {
                    return None;
                }
                self.index(c)
            }
        }
    }

    /// The input tape `▷ x ◁` as symbol ids.
    pub fn tape(&self, x: &str) -> Result<Vec<InSym>, ModelError> {
        let mut t = Vec::with_capacity(x.len() + 2);
        t.push(LEFT);
        for c in x.chars() {
            t.push(self.index(c).ok_or_else(|| ModelError::UnknownInput(c.to_string()))?);
        }
        t.push(RIGHT);
        Ok(t)
    }

    /// Ids of Σ without the endmarkers.
    pub fn letters(&self) -> impl Iterator<Item = InSym> {
        2..self.len()
    }
}

/// Shared finite-control data: state names, initial state and halting sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Control {
    names: Vec<String>,
    index: HashMap<String, State>,
    pub q0: State,
    pub accept: Vec<State>,
    pub reject: Vec<State>,
    halting: Vec<u8>,
}

impl Control {
    pub fn new(names: &[String], q0: &str, accept: &[String], reject: &[String]) -> Result<Self, ModelError> {
        if names.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::Duplicate(n.clone()));
            }
        }
        let find = |n: &str| index.get(n).copied().ok_or_else(|| ModelError::UnknownState(n.into()));
        let q0 = find(q0)?;
        let accept = accept.iter().map(|n| find(n)).collect::<Result<Vec<_>, _>>()?;
        let reject = reject.iter().map(|n| find(n)).collect::<Result<Vec<_>, _>>()?;
        let mut halting = vec![0u8; names.len()];
        for &q in &accept {
            halting[q] |= 1;
        }
        for &q in &reject {
            halting[q] |= 2;
        }
        Ok(Control { names: names.to_vec(), index, q0, accept, reject, halting })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, q: State) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.index.get(name).copied()
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.halting[q] & 1 != 0
    }

    pub fn is_rejecting(&self, q: State) -> bool {
        self.halting[q] & 2 != 0
    }

    pub fn is_halting(&self, q: State) -> bool {
        self.halting[q] != 0
    }

    pub fn accept_names(&self) -> Vec<String> {
        self.accept.iter().map(|&q| self.names[q].clone()).collect()
    }

    pub fn reject_names(&self) -> Vec<String> {
        self.reject.iter().map(|&q| self.names[q].clone()).collect()
    }
}

/// `δ(q, σ, γ) = (next, write, d1, d2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trans {
    pub next: State,
    pub write: Sym,
    pub d1: i8,
    pub d2: i8,
}

/// A one-way deterministic depth-k storage automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdaSpec {
    pub flavor: Flavor,
    pub alphabet: Alphabet,
    pub control: Control,
    pub input: InputAlphabet,
    delta: Vec<Option<Trans>>,
}

impl SdaSpec {
    pub fn new(flavor: Flavor, alphabet: Alphabet, control: Control, input: InputAlphabet) -> Self {
        let size = control.len() * input.len() * alphabet.len();
        SdaSpec { flavor, alphabet, control, input, delta: vec![None; size] }
    }

    pub fn k(&self) -> usize {
        self.alphabet.k()
    }

    #[inline]
    fn slot(&self, q: State, s: InSym, g: Sym) -> usize {
        (q * self.input.len() + s) * self.alphabet.len() + g
    }

    #[inline]
    pub fn get(&self, q: State, s: InSym, g: Sym) -> Option<&Trans> {
        self.delta[self.slot(q, s, g)].as_ref()
    }

    /// Adds a transition, returning the one it replaced.
    pub fn insert(&mut self, q: State, s: InSym, g: Sym, t: Trans) -> Option<Trans> {
        let i = self.slot(q, s, g);
        self.delta[i].replace(t)
    }

    pub fn remove(&mut self, q: State, s: InSym, g: Sym) -> Option<Trans> {
        let i = self.slot(q, s, g);
        self.delta[i].take()
    }

    /// Every defined transition in (q, σ, γ) order.
    pub fn transitions(&self) -> impl Iterator<Item = (State, InSym, Sym, &Trans)> + '_ {
        let ni = self.input.len();
        let ng = self.alphabet.len();
        self.delta.iter().enumerate().filter_map(move |(i, t)| {
            t.as_ref().map(|t| (i / (ni * ng), (i / ng) % ni, i % ng, t))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().filter(|t| t.is_some()).count()
    }

    /// Default step limit `2·(n+2)^4·|Q|·|Γ|`.
    pub fn default_step_limit(&self, n: usize) -> u64 {
        default_limit(n, self.control.len(), self.alphabet.len())
    }

    pub fn describe(&self, q: State, s: InSym, g: Sym, t: &Trans) -> String {
        format!(
            "δ({}, {}, {}) = ({}, {}, {}, {})",
            self.control.name(q),
            self.input.name(s),
            self.alphabet.name(g),
            self.control.name(t.next),
            self.alphabet.name(t.write),
            t.d1,
            t.d2
        )
    }
}

pub(crate) fn default_limit(n: usize, states: usize, gamma: usize) -> u64 {
    let base = (n as u64 + 2).pow(4);
    2u64.saturating_mul(base).saturating_mul(states as u64).saturating_mul(gamma as u64)
}

/// `⌊log₂ n⌋ + 1` for n ≥ 1 and 1 for n = 0: the bit length of n, the
/// smallest positive cell count that can hold a head position.
pub fn log_cells(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        (usize::BITS - n.leading_zeros()) as usize
    }
}

/// `⌈log₂ n⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Auxiliary-tape space bound as a function of the input length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceBound {
    /// `factor · log_cells(n)` cells.
    Log { factor: usize },
    /// A fixed number of cells.
    Cells(usize),
    Unbounded,
}

impl SpaceBound {
    pub fn cells(self, n: usize) -> Option<usize> {
        match self {
            SpaceBound::Log { factor } => Some(factor * log_cells(n)),
            SpaceBound::Cells(c) => Some(c),
            SpaceBound::Unbounded => None,
        }
    }
}

impl Default for SpaceBound {
    fn default() -> Self {
        SpaceBound::Log { factor: 1 }
    }
}

/// `δ(q, σ, τ, γ) = (next, aux_write, write, d1, d2, d3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxTrans {
    pub next: State,
    pub aux_write: usize,
    pub write: Sym,
    pub d1: i8,
    pub d2: i8,
    pub d3: i8,
}

/// A k-sda with a two-way input head and a rewritable auxiliary tape.
/// Auxiliary symbol 0 is the blank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxSdaSpec {
    pub flavor: Flavor,
    pub alphabet: Alphabet,
    pub control: Control,
    pub input: InputAlphabet,
    pub aux: Vec<String>,
    pub space: SpaceBound,
    pub delta: BTreeMap<(State, InSym, usize, Sym), AuxTrans>,
}

impl AuxSdaSpec {
    pub fn aux_symbol(&self, name: &str) -> Option<usize> {
        self.aux.iter().position(|a| a == name)
    }

    pub fn default_step_limit(&self, n: usize) -> u64 {
        default_limit(n, self.control.len(), self.alphabet.len() * self.aux.len().max(1))
    }
}

/// `δ(q, σ1..σℓ, γ) = (next, write, d1..dℓ, d_{ℓ+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhTrans {
    pub next: State,
    pub write: Sym,
    pub moves: Vec<i8>,
    pub d_store: i8,
}

/// A k-sda with ℓ two-way read-only input heads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHeadSdaSpec {
    pub flavor: Flavor,
    pub alphabet: Alphabet,
    pub control: Control,
    pub input: InputAlphabet,
    pub heads: usize,
    pub counter: Option<usize>,
    pub delta: BTreeMap<(State, Vec<InSym>, Sym), MhTrans>,
}

impl MultiHeadSdaSpec {
    pub fn default_step_limit(&self, n: usize) -> u64 {
        default_limit(n, self.control.len(), self.alphabet.len()).saturating_mul(n as u64 + 2)
    }
}

/// What a pda move reads from the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PdaRead {
    Eps,
    Sym(InSym),
}

/// Replace the top of the stack by `push` (last element becomes the top).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaTrans {
    pub next: State,
    pub push: Vec<usize>,
}

/// Stack symbol 0 of a [`PdaSpec`]: the bottom marker.
pub const BOTTOM: usize = 0;

/// A one-way deterministic pushdown automaton over the endmarked tape
/// `▷ x ◁`. Reading a symbol consumes it, except that `◁` stays put.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaSpec {
    pub control: Control,
    pub input: InputAlphabet,
    /// Stack symbol names; index 0 is the bottom marker `>`.
    pub stack: Vec<String>,
    pub delta: BTreeMap<(State, PdaRead, usize), PdaTrans>,
}

impl PdaSpec {
    pub fn stack_symbol(&self, name: &str) -> Option<usize> {
        self.stack.iter().position(|s| s == name)
    }

    pub fn default_step_limit(&self, n: usize) -> u64 {
        default_limit(n, self.control.len(), self.stack.len())
    }

    pub fn read_name(&self, r: PdaRead) -> String {
        match r {
            PdaRead::Eps => "eps".into(),
            PdaRead::Sym(s) => self.input.name(s),
        }
    }
}

/// One move of an FL transducer. `out` appends one output symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlTrans {
    pub next: State,
    pub work_write: usize,
    pub d_in: i8,
    pub d_work: i8,
    pub out: Option<char>,
}

/// Declared work-space class of a transducer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlSpace {
    Log,
    Const,
}

impl FlSpace {
    /// Concrete cell budget: `2·log_cells(n+2) + 2` for `Log`, 2 for `Const`.
    pub fn cells(self, n: usize) -> usize {
        match self {
            FlSpace::Log => 2 * log_cells(n + 2) + 2,
            FlSpace::Const => 2,
        }
    }
}

/// Deterministic transducer: two-way read-only input, one work tape,
/// write-once output. Work symbol 0 is the blank. Halting states are the
/// control's accepting states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlTransducerSpec {
    pub control: Control,
    pub input: InputAlphabet,
    pub work: Vec<String>,
    pub output: Vec<char>,
    pub space: FlSpace,
    pub delta: BTreeMap<(State, InSym, usize), FlTrans>,
}

impl FlTransducerSpec {
    pub fn work_symbol(&self, name: &str) -> Option<usize> {
        self.work.iter().position(|w| w == name)
    }
}

/// Content of a k-lda tape cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LdaCell {
    /// `▷` or `◁`.
    End(InSym),
    /// An untouched input symbol (level 0).
    Input(InSym),
    /// A written symbol of the storage alphabet (levels 1..k, `B` at level k).
    Store(Sym),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LdaTrans {
    pub next: State,
    pub write: LdaCell,
    pub d: i8,
}

/// Deterministic k-limited automaton: a single two-way tape initially
/// holding `▷ x ◁` whose cells are rewritable during their first k visits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdaSpec {
    pub alphabet: Alphabet,
    pub control: Control,
    pub input: InputAlphabet,
    pub delta: BTreeMap<(State, LdaCell), LdaTrans>,
}

impl LdaSpec {
    pub fn k(&self) -> usize {
        self.alphabet.k()
    }

    pub fn cell_name(&self, c: LdaCell) -> String {
        match c {
            LdaCell::End(s) | LdaCell::Input(s) => self.input.name(s),
            LdaCell::Store(g) => self.alphabet.name(g).to_string(),
        }
    }

    pub fn cell_level(&self, c: LdaCell) -> usize {
        match c {
            LdaCell::End(_) => usize::MAX,
            LdaCell::Input(_) => 0,
            LdaCell::Store(g) => self.alphabet.dv(g),
        }
    }

    pub fn default_step_limit(&self, n: usize) -> u64 {
        default_limit(n, self.control.len(), self.alphabet.len() + self.input.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn levels_are_disjoint_and_total() {
        let a = Alphabet::new(3, &[names(&["x", "y"]), names(&["z"])]).unwrap();
        assert_eq!(a.dv(BOX), 0);
        assert_eq!(a.dv(END), 3);
        assert_eq!(a.dv(BLANK), 3);
        assert_eq!(a.dv(a.sym("x").unwrap()), 1);
        assert_eq!(a.dv(a.sym("z").unwrap()), 2);
        assert_eq!(a.level(3), vec![END, BLANK]);
        assert_eq!(a.inner_levels(), vec![names(&["x", "y"]), names(&["z"])]);
    }

    #[test]
    fn duplicate_and_reserved_symbols_rejected() {
        assert_eq!(
            Alphabet::new(3, &[names(&["x"]), names(&["x"])]),
            Err(ModelError::Duplicate("x".into()))
        );
        assert_eq!(Alphabet::new(2, &[names(&["B"])]), Err(ModelError::Reserved("B".into())));
        assert!(Alphabet::new(2, &[names(&[]), names(&["q"])]).is_err());
    }

    #[test]
    fn input_tape_has_endmarkers() {
        let i = InputAlphabet::new(&['a', 'b']).unwrap();
        assert_eq!(i.tape("ba").unwrap(), vec![LEFT, 3, 2, RIGHT]);
        assert_eq!(i.tape("").unwrap(), vec![LEFT, RIGHT]);
        assert!(i.tape("c").is_err());
        assert_eq!(i.parse_name(">"), Some(LEFT));
        assert_eq!(i.name(RIGHT), "<");
    }

    #[test]
    fn log_helpers() {
        assert_eq!(log_cells(0), 1);
        assert_eq!(log_cells(1), 1);
        assert_eq!(log_cells(8), 4);
        assert_eq!(log_cells(255), 8);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(8), 3);
    }

    #[test]
    fn transitions_iterate_in_key_order() {
        let a = Alphabet::new(2, &[names(&["x"])]).unwrap();
        let c = Control::new(&names(&["s", "t"]), "s", &names(&["t"]), &[]).unwrap();
        let i = InputAlphabet::new(&['a']).unwrap();
        let mut m = SdaSpec::new(Flavor::Susceptible, a, c, i);
        let t = Trans { next: 1, write: END, d1: 0, d2: 0 };
        m.insert(0, 2, END, t);
        m.insert(0, LEFT, END, t);
        let keys: Vec<_> = m.transitions().map(|(q, s, g, _)| (q, s, g)).collect();
        assert_eq!(keys, vec![(0, LEFT, END), (0, 2, END)]);
        assert_eq!(m.default_step_limit(0), 2 * 16 * 2 * 4);
    }
}
