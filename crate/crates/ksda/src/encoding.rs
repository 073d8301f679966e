//! The instance encoding `⟨M,x⟩ = X# S# G# P#` over the five characters
//! `a b 0 1 #`, its decoder, and the reduction `x ↦ ⟨M,x⟩` as a
//! constant-space FL transducer.
//!
//! Codewords are binary over `a < b`, most significant bit first. State
//! `p_h` gets code `h - 1` where `p1 = q0`, `p2` accepts and `p3` rejects.
//! Storage symbol `γ_h` is symbol id `h - 1` and input symbol `σ_h` is
//! input id `h - 1`, so `σ1 = ▷` and `σ2 = ◁`. All three counts are
//! padded to powers of two (at least 4 for states and storage symbols);
//! padding entries appear in `S` and `G` but no transition mentions them.
//!
//! An encoded transition is `σ#γ#p#d̃#core#p'#d1#` where `d̃` is the
//! storage direction and `core` the written symbol repeated `θ` times.
//! `P` holds seven sublists grouped into five families:
//!
//! | family | sublists            | storage move                         |
//! |--------|---------------------|--------------------------------------|
//! | `+`    | right, end          | `+1` from even level, or from `▷`    |
//! | `lt`   | left turn           | `-1` from even level                 |
//! | `-`    | left                | `-1` from odd level                  |
//! | `rt`   | right turn          | `+1` from odd level                  |
//! | `d`    | frozen, then stay   | level `k-1` or `k`; then `d2 = 0`    |
//!
//! Each item is followed by `#`, each sublist by `#`, and each family by
//! one more `#` (the `+` family separates its two sublists with `#` too).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Alphabet, Control, Flavor, FlSpace, FlTrans, FlTransducerSpec, InSym, InputAlphabet, ModelError, SdaSpec, State,
    Sym, Trans, BLANK, END, LEFT, RIGHT,
};

/// Text characters: `a0`, `a1`, `0`, `1`, `#`.
pub const TEXT_ALPHABET: [char; 5] = ['a', 'b', '0', '1', '#'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("only depth-susceptible machines can be encoded")]
    NotSusceptible,
    #[error("cannot normalise halting states: {0}")]
    NormalizationFailure(String),
    #[error("malformed encoding at offset {pos}: {msg}")]
    MalformedEncoding { pos: usize, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn malformed(pos: usize, msg: impl Into<String>) -> EncodingError {
    EncodingError::MalformedEncoding { pos, msg: msg.into() }
}

/// Which kind of encoded transition an item is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Shape {
    /// `d2 = +1` from an even level below `k - 1`.
    Right,
    /// `d2 = +1` from `▷`.
    End,
    /// `d2 = -1` from an even level: the head turns inside the block.
    LeftTurn,
    /// `d2 = -1` from an odd level.
    Left,
    /// `d2 = +1` from an odd level: the head turns inside the block.
    RightTurn,
    /// Any move from level `k - 1` or `k`: the cell becomes `B`.
    Frozen,
    /// `d2 = 0`.
    Stay,
}

impl Shape {
    /// Sublists in text order.
    pub const ORDER: [Shape; 7] =
        [Shape::Right, Shape::End, Shape::LeftTurn, Shape::Left, Shape::RightTurn, Shape::Frozen, Shape::Stay];

    /// Classifies `δ(q, σ, γ) = t`.
    pub fn of(alphabet: &Alphabet, g: Sym, t: &Trans) -> Shape {
        let k = alphabet.k();
        let e = alphabet.dv(g);
        if t.d2 == 0 {
            Shape::Stay
        } else if g == END {
            Shape::End
        } else if e + 1 >= k {
            Shape::Frozen
        } else {
            match (e % 2 == 0, t.d2 > 0) {
                (true, true) => Shape::Right,
                (true, false) => Shape::LeftTurn,
                (false, false) => Shape::Left,
                (false, true) => Shape::RightTurn,
            }
        }
    }

    fn index(self) -> usize {
        Shape::ORDER.iter().position(|&s| s == self).unwrap()
    }

    /// Whether the sublist is followed by one extra `#`.
    fn closes_family(self) -> bool {
        self != Shape::Right && self != Shape::Frozen
    }
}

/// Size parameters of an encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingParams {
    pub k: usize,
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub c: usize,
    /// `m1 · m2`.
    pub theta: usize,
    /// `(log m2 + 1) · θ`, the length of a core.
    pub alpha: usize,
    pub q_bits: usize,
    pub g_bits: usize,
    pub s_bits: usize,
    pub x_offset: usize,
    pub s_offset: usize,
    pub g_offset: usize,
    pub p_offset: usize,
    /// Start of each sublist, in [`Shape::ORDER`].
    pub sublists: [usize; 7],
}

/// Names needed to rebuild the machine; the text itself only carries indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMeta {
    /// Real states in `p`-order.
    pub states: Vec<String>,
    /// Original accepting (rejecting) states merged into `p2` (`p3`).
    pub merged_accept: Vec<String>,
    pub merged_reject: Vec<String>,
    /// Storage symbols in id order with their levels.
    pub gammas: Vec<(String, usize)>,
    pub sigma: Vec<char>,
}

/// Where one item sits in the text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSpan {
    pub shape: Shape,
    /// First character of `σ`.
    pub receptor: usize,
    /// First character of `d̃`.
    pub residue: usize,
    /// One past the item's trailing `#`.
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedInstance {
    pub text: String,
    pub params: EncodingParams,
    pub meta: EncodingMeta,
    pub items: Vec<ItemSpan>,
}

impl EncodedInstance {
    /// The sidecar record: everything but the text.
    pub fn sidecar_json(&self) -> String {
        let v = serde_json::json!({ "params": self.params, "meta": self.meta, "items": self.items });
        serde_json::to_string_pretty(&v).expect("sidecar is plain data")
    }

    pub fn from_parts(text: String, sidecar: &str) -> Result<Self, EncodingError> {
        #[derive(Deserialize)]
        struct Side {
            params: EncodingParams,
            meta: EncodingMeta,
            items: Vec<ItemSpan>,
        }
        let s: Side = serde_json::from_str(sidecar).map_err(|e| malformed(0, format!("sidecar: {e}")))?;
        Ok(EncodedInstance { text, params: s.params, meta: s.meta, items: s.items })
    }
}

/// A machine whose halting states are exactly `p2` (accept) and `p3`
/// (reject), with states in `p`-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub spec: SdaSpec,
    pub merged_accept: Vec<String>,
    pub merged_reject: Vec<String>,
}

fn fresh(names: &[String], base: &str) -> String {
    let mut s = base.to_string();
    while names.iter().any(|n| *n == s) {
        s.push('\'');
    }
    s
}

/// Reorders states to `q0, accept, reject, rest…`, merging all accepting
/// (rejecting) states into one and adding a fresh one if none exists.
pub fn normalize(m: &SdaSpec) -> Result<Normalized, EncodingError> {
    if m.flavor != Flavor::Susceptible {
        return Err(EncodingError::NotSusceptible);
    }
    let c = &m.control;
    if c.is_halting(c.q0) {
        return Err(EncodingError::NormalizationFailure(format!("initial state `{}` halts", c.name(c.q0))));
    }
    let merged_accept = c.accept_names();
    let merged_reject = c.reject_names();
    let all = c.names().to_vec();
    let acc = merged_accept.first().cloned().unwrap_or_else(|| fresh(&all, "acc"));
    let rej = merged_reject.first().cloned().unwrap_or_else(|| fresh(&all, "rej"));
    if acc == rej {
        return Err(EncodingError::NormalizationFailure(format!("`{acc}` both accepts and rejects")));
    }
    let mut names = vec![c.name(c.q0).to_string(), acc.clone(), rej.clone()];
    let mut map = vec![0; c.len()];
    for q in 0..c.len() {
        if c.is_accepting(q) {
            map[q] = 1;
        } else if c.is_rejecting(q) {
            map[q] = 2;
        } else if q == c.q0 {
            map[q] = 0;
        } else {
            map[q] = names.len();
            names.push(c.name(q).to_string());
        }
    }
    let control = Control::new(&names, &names[0], &[acc], &[rej])?;
    let mut spec = SdaSpec::new(m.flavor, m.alphabet.clone(), control, m.input.clone());
    for (q, s, g, t) in m.transitions() {
        if !c.is_halting(q) {
            spec.insert(map[q], s, g, Trans { next: map[t.next], ..*t });
        }
    }
    Ok(Normalized { spec, merged_accept, merged_reject })
}

fn bits_for(m: usize) -> usize {
    m.trailing_zeros() as usize
}

fn pad(n: usize, min: usize) -> usize {
    n.next_power_of_two().max(min)
}

/// Binary codeword of `v` with `bits` digits over `a < b`.
pub fn code(v: usize, bits: usize) -> String {
    (0..bits).rev().map(|i| if v >> i & 1 == 1 { 'b' } else { 'a' }).collect()
}

fn dir_code(d: i8) -> &'static str {
    match d {
        -1 => "100",
        0 => "000",
        _ => "001",
    }
}

struct Item {
    shape: Shape,
    sigma: InSym,
    gamma: Sym,
    p: State,
    t: Trans,
}

fn items_of(spec: &SdaSpec) -> Vec<Item> {
    let mut v: Vec<Item> = spec
        .transitions()
        .map(|(p, sigma, gamma, t)| Item { shape: Shape::of(&spec.alphabet, gamma, t), sigma, gamma, p, t: *t })
        .collect();
    // Row-major over (γ, p, write, p'), then σ and d1.
    v.sort_by_key(|i| (i.shape.index(), i.gamma, i.p, i.t.write, i.t.next, i.sigma, i.t.d1));
    v
}

/// Encodes `(M, x)`; `M` is normalised first.
pub fn encode(m: &SdaSpec, x: &str) -> Result<EncodedInstance, EncodingError> {
    let norm = normalize(m)?;
    let spec = &norm.spec;
    let tape = spec.input.tape(x)?;
    let k = spec.k();
    let m1 = pad(spec.control.len(), 4);
    let m2 = pad(spec.alphabet.len(), 4);
    let c = pad(spec.input.len(), 2);
    let (q_bits, g_bits, s_bits) = (bits_for(m1), bits_for(m2), bits_for(c));
    let theta = m1 * m2;
    let alpha = (g_bits + 1) * theta;

    let mut text = String::new();
    let x_offset = 0;
    for &s in &tape {
        text.push_str(&code(s, s_bits));
        text.push('#');
    }
    text.push_str("##");
    let s_offset = text.len();
    for h in 0..m1 {
        text.push_str(&code(h, q_bits));
        text.push('#');
    }
    text.push('#');
    let g_offset = text.len();
    for h in 0..m2 {
        text.push_str(&code(h, g_bits));
        text.push('#');
    }
    text.push('#');
    let p_offset = text.len();

    let items = items_of(spec);
    let mut spans = Vec::with_capacity(items.len());
    let mut sublists = [0; 7];
    let mut it = items.iter().peekable();
    for (si, &shape) in Shape::ORDER.iter().enumerate() {
        sublists[si] = text.len();
        while let Some(item) = it.next_if(|i| i.shape == shape) {
            let receptor = text.len();
            let _ = write!(text, "{}#{}#{}#", code(item.sigma, s_bits), code(item.gamma, g_bits), code(item.p, q_bits));
            let residue = text.len();
            text.push_str(dir_code(item.t.d2));
            text.push('#');
            if shape == Shape::End {
                text.push_str(&code(END, g_bits));
                text.push('#');
            } else {
                let w = code(item.t.write, g_bits);
                for _ in 0..theta {
                    text.push_str(&w);
                    text.push('#');
                }
            }
            let _ = write!(text, "#{}#{}#", code(item.t.next, q_bits), if item.t.d1 == 1 { "11" } else { "10" });
            text.push('#');
            spans.push(ItemSpan { shape, receptor, residue, end: text.len() });
        }
        text.push('#');
        if shape.closes_family() || shape == Shape::Right {
            text.push('#');
        }
    }
    text.push('#');

    let meta = EncodingMeta {
        states: spec.control.names().to_vec(),
        merged_accept: norm.merged_accept.clone(),
        merged_reject: norm.merged_reject.clone(),
        gammas: spec.alphabet.symbols().map(|g| (spec.alphabet.name(g).to_string(), spec.alphabet.dv(g))).collect(),
        sigma: spec.input.chars().to_vec(),
    };
    let params = EncodingParams {
        k,
        n: tape.len() - 2,
        m1,
        m2,
        c,
        theta,
        alpha,
        q_bits,
        g_bits,
        s_bits,
        x_offset,
        s_offset,
        g_offset,
        p_offset,
        sublists,
    };
    Ok(EncodedInstance { text, params, meta, items: spans })
}

/// One encoded transition as read back from text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParsedItem {
    pub shape: Shape,
    pub sigma: InSym,
    pub gamma: Sym,
    pub p: State,
    pub d2: i8,
    pub write: Sym,
    pub next: State,
    pub d1: i8,
}

/// The structure of a text, independent of any names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedText {
    pub x: Vec<InSym>,
    pub m1: usize,
    pub m2: usize,
    pub c: usize,
    pub items: Vec<ParsedItem>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn hash(&mut self) -> Result<(), EncodingError> {
        match self.peek() {
            Some(b'#') => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(malformed(self.pos, format!("expected `#`, found `{}`", c as char))),
            None => Err(malformed(self.pos, "text ends early, expected `#`")),
        }
    }

    /// A maximal run of `a`/`b` followed by `#`.
    fn word(&mut self) -> Result<(usize, usize), EncodingError> {
        let start = self.pos;
        let mut v = 0usize;
        while let Some(c @ (b'a' | b'b')) = self.peek() {
            if self.pos - start >= 48 {
                return Err(malformed(start, "codeword too long"));
            }
            v = v << 1 | usize::from(c == b'b');
            self.pos += 1;
        }
        let len = self.pos - start;
        self.hash()?;
        Ok((v, len))
    }

    fn code(&mut self, bits: usize, what: &str) -> Result<usize, EncodingError> {
        let start = self.pos;
        let (v, len) = self.word()?;
        if len != bits {
            return Err(malformed(start, format!("{what} code has {len} digits, expected {bits}")));
        }
        Ok(v)
    }

    fn digits(&mut self, n: usize) -> Result<&str, EncodingError> {
        let start = self.pos;
        let end = start + n;
        if end > self.s.len() || !self.s[start..end].iter().all(|c| matches!(c, b'0' | b'1')) {
            return Err(malformed(start, format!("expected {n} binary digits")));
        }
        self.pos = end;
        self.hash()?;
        Ok(std::str::from_utf8(&self.s[start..end]).unwrap())
    }

    /// A canonical list `code(0)# … code(m-1)# #`.
    fn table(&mut self, what: &str) -> Result<(usize, usize), EncodingError> {
        let start = self.pos;
        let (first, bits) = self.word()?;
        if first != 0 || bits == 0 {
            return Err(malformed(start, format!("{what} table must start with the zero code")));
        }
        let mut m = 1;
        while self.peek() != Some(b'#') {
            let at = self.pos;
            if self.code(bits, what)? != m {
                return Err(malformed(at, format!("{what} table is out of order")));
            }
            m += 1;
        }
        self.hash()?;
        if m != 1 << bits {
            return Err(malformed(start, format!("{what} count {m} is not 2^{bits}")));
        }
        Ok((m, bits))
    }
}

fn dir_value(pos: usize, d: &str) -> Result<i8, EncodingError> {
    match d {
        "100" => Ok(-1),
        "000" => Ok(0),
        "001" => Ok(1),
        _ => Err(malformed(pos, format!("bad direction `{d}`"))),
    }
}

/// Parses a text into its tables and items and checks every structural
/// constraint that does not need the level of a storage symbol.
pub fn parse_text(text: &str) -> Result<ParsedText, EncodingError> {
    if let Some((i, c)) = text.char_indices().find(|&(_, c)| !TEXT_ALPHABET.contains(&c)) {
        return Err(malformed(i, format!("character `{c}` outside the text alphabet")));
    }
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    let start = cur.pos;
    let (v0, s_bits) = cur.word()?;
    if s_bits == 0 {
        return Err(malformed(start, "empty input code"));
    }
    let c = 1 << s_bits;
    let mut x = vec![v0];
    while cur.peek() != Some(b'#') {
        x.push(cur.code(s_bits, "input")?);
    }
    cur.hash()?;
    cur.hash()?;
    if x.len() < 2 || x[0] != LEFT || x[x.len() - 1] != RIGHT || x[1..x.len() - 1].iter().any(|&s| s < 2) {
        return Err(malformed(start, "input segment must be ▷ x ◁"));
    }
    let (m1, q_bits) = cur.table("state")?;
    let (m2, g_bits) = cur.table("storage")?;
    if m1 < 4 || m2 < 4 {
        return Err(malformed(cur.pos, "fewer than four states or storage symbols"));
    }
    let theta = m1 * m2;
    let mut items = Vec::new();
    for &shape in &Shape::ORDER {
        while cur.peek() != Some(b'#') {
            let at = cur.pos;
            let sigma = cur.code(s_bits, "input")?;
            let gamma = cur.code(g_bits, "storage")?;
            let p = cur.code(q_bits, "state")?;
            let dp = cur.pos;
            let d2 = dir_value(dp, cur.digits(3)?)?;
            let core_at = cur.pos;
            let write = cur.code(g_bits, "storage")?;
            let copies = if shape == Shape::End { 1 } else { theta };
            for _ in 1..copies {
                let cp = cur.pos;
                if cur.code(g_bits, "storage")? != write {
                    return Err(malformed(cp, "core copies differ"));
                }
            }
            if cur.peek() != Some(b'#') {
                return Err(malformed(cur.pos, format!("core must hold {copies} copies")));
            }
            cur.hash()?;
            let next = cur.code(q_bits, "state")?;
            let d1p = cur.pos;
            let d1 = match cur.digits(2)? {
                "10" => 0,
                "11" => 1,
                d => return Err(malformed(d1p, format!("bad input move `{d}`"))),
            };
            cur.hash()?;
            let ok = match shape {
                Shape::Right | Shape::RightTurn => d2 == 1,
                Shape::End => d2 == 1 && gamma == END && write == END,
                Shape::LeftTurn | Shape::Left => d2 == -1,
                Shape::Frozen => d2 != 0 && write == BLANK && d1 == 0,
                Shape::Stay => d2 == 0 && write == gamma,
            };
            if !ok {
                return Err(malformed(core_at, format!("item does not fit the {shape:?} sublist")));
            }
            if sigma >= c || gamma >= m2 || p >= m1 || write >= m2 || next >= m1 {
                return Err(malformed(at, "index out of range"));
            }
            items.push(ParsedItem { shape, sigma, gamma, p, d2, write, next, d1 });
        }
        cur.hash()?;
        if shape.closes_family() || shape == Shape::Right {
            cur.hash()?;
        }
    }
    cur.hash()?;
    if cur.pos != text.len() {
        return Err(malformed(cur.pos, "trailing characters"));
    }
    Ok(ParsedText { x, m1, m2, c, items })
}

/// Rebuilds the normalised machine and the input.
pub fn decode(e: &EncodedInstance) -> Result<(SdaSpec, String), EncodingError> {
    let parsed = parse_text(&e.text)?;
    let meta = &e.meta;
    let k = e.params.k;
    let mut inner = vec![Vec::new(); k.saturating_sub(1)];
    for (name, level) in meta.gammas.iter().skip(3) {
        if *level == 0 || *level >= k {
            return Err(malformed(0, format!("sidecar level {level} for `{name}`")));
        }
        inner[level - 1].push(name.clone());
    }
    let alphabet = Alphabet::new(k, &inner)?;
    if alphabet.symbols().any(|g| alphabet.name(g) != meta.gammas[g].0) {
        return Err(malformed(0, "sidecar storage symbols are not level-ordered"));
    }
    if meta.states.len() < 3 {
        return Err(malformed(0, "sidecar lists fewer than three states"));
    }
    let control = Control::new(&meta.states, &meta.states[0], &meta.states[1..2], &meta.states[2..3])?;
    let input = InputAlphabet::new(&meta.sigma)?;
    if parsed.m1 != pad(control.len(), 4) || parsed.m2 != pad(alphabet.len(), 4) || parsed.c != pad(input.len(), 2) {
        return Err(malformed(0, "table sizes disagree with the sidecar"));
    }
    let mut spec = SdaSpec::new(Flavor::Susceptible, alphabet, control, input);
    for (i, it) in parsed.items.iter().enumerate() {
        let pos = e.items.get(i).map_or(0, |s| s.receptor);
        if it.p >= spec.control.len() || it.next >= spec.control.len() {
            return Err(malformed(pos, "item names a padding state"));
        }
        if it.gamma >= spec.alphabet.len() || it.write >= spec.alphabet.len() || it.sigma >= spec.input.len() {
            return Err(malformed(pos, "item names a padding symbol"));
        }
        if spec.control.is_halting(it.p) {
            return Err(malformed(pos, "item leaves a halting state"));
        }
        let t = Trans { next: it.next, write: it.write, d1: it.d1, d2: it.d2 };
        if Shape::of(&spec.alphabet, it.gamma, &t) != it.shape {
            return Err(malformed(pos, "item is in the wrong sublist for its level"));
        }
        if spec.insert(it.p, it.sigma, it.gamma, t).is_some() {
            return Err(malformed(pos, "transition listed twice"));
        }
    }
    let x = parsed.x[1..parsed.x.len() - 1]
        .iter()
        .map(|&s| spec.input.char_of(s).ok_or_else(|| malformed(0, "input names a padding letter")))
        .collect::<Result<String, _>>()?;
    Ok((spec, x))
}

/// A constant-space transducer computing `x ↦ encode(M, x).text`. The
/// machine's tables live in the finite control; the work tape stays blank.
pub fn reduce_f_m(m: &SdaSpec) -> Result<FlTransducerSpec, EncodingError> {
    let empty = encode(m, "")?;
    let s_bits = empty.params.s_bits;
    let head: Vec<char> = format!("{}#", code(LEFT, s_bits)).chars().collect();
    let tail: Vec<char> = empty.text[head.len()..].chars().collect();
    let input = m.input.clone();

    // State layout: head chain, reader, one chain per letter, tail chain, halt.
    let mut names = Vec::new();
    names.extend((0..head.len()).map(|i| format!("h{i}")));
    names.push("read".to_string());
    let letters: Vec<InSym> = input.letters().collect();
    for &s in &letters {
        names.extend((1..=s_bits).map(|i| format!("l{s}.{i}")));
    }
    names.extend((1..tail.len()).map(|i| format!("t{i}")));
    names.push("done".to_string());
    let control = Control::new(&names, "h0", &["done".to_string()], &[])?;
    let id = |n: &str| control.state(n).expect("generated name");
    let mut delta = std::collections::BTreeMap::new();
    let emit = |next: State, d_in: i8, c: char| FlTrans { next, work_write: 0, d_in, d_work: 0, out: Some(c) };

    for (i, &ch) in head.iter().enumerate() {
        let last = i + 1 == head.len();
        let next = if last { id("read") } else { id(&format!("h{}", i + 1)) };
        delta.insert((id(&format!("h{i}")), LEFT, 0), emit(next, i8::from(last), ch));
    }
    let read = id("read");
    for &s in &letters {
        let word: Vec<char> = format!("{}#", code(s, s_bits)).chars().collect();
        let next = id(&format!("l{s}.1"));
        delta.insert((read, s, 0), emit(next, 0, word[0]));
        for i in 1..word.len() {
            let last = i + 1 == word.len();
            let next = if last { read } else { id(&format!("l{s}.{}", i + 1)) };
            delta.insert((id(&format!("l{s}.{i}")), s, 0), emit(next, i8::from(last), word[i]));
        }
    }
    let t_next = |i: usize| if i == tail.len() { id("done") } else { id(&format!("t{i}")) };
    delta.insert((read, RIGHT, 0), emit(t_next(1), 0, tail[0]));
    for i in 1..tail.len() {
        delta.insert((id(&format!("t{i}")), RIGHT, 0), emit(t_next(i + 1), 0, tail[i]));
    }
    Ok(FlTransducerSpec {
        control,
        input,
        work: vec!["_".to_string()],
        output: TEXT_ALPHABET.to_vec(),
        space: FlSpace::Const,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::transforms::fl_run;

    fn labc() -> SdaSpec {
        corpus::fixture("labc").unwrap().sda()
    }

    #[test]
    fn codes_are_msb_first() {
        assert_eq!(code(0, 2), "aa");
        assert_eq!(code(1, 2), "ab");
        assert_eq!(code(6, 3), "bba");
        assert_eq!(code(0, 0), "");
    }

    #[test]
    fn empty_input_segment() {
        let m = labc();
        let e = encode(&m, "").unwrap();
        let b = e.params.s_bits;
        let x = format!("{}#{}##", code(LEFT, b), code(RIGHT, b));
        assert!(e.text.starts_with(&(x + "#")));
        assert_eq!(e.params.s_offset, 2 * (b + 1) + 2);
    }

    #[test]
    fn toy_sizes() {
        // k = 2 with Q = {q0, acc, rej}, Γ = {□, ▷, B} and Σ̌ = {▷, ◁, a}, all padded to 4.
        let src = "sda k=2 flavor=susceptible\nstates: q0 acc rej\naccept: acc\nreject: rej\ninput: a\n\
                   delta:\nq0 > > -> q0 > S R\nq0 a BOX -> q0 B R R\nq0 < BOX -> acc B S R\n";
        let m = crate::dsl::parse_dsl(src).unwrap().into_sda().unwrap();
        let e = encode(&m, "aa").unwrap();
        let p = &e.params;
        assert_eq!((p.m1, p.m2, p.c), (4, 4, 4));
        assert_eq!(p.g_offset - 1 - p.s_offset, 12);
        assert_eq!((p.theta, p.alpha), (16, 48));
        for s in e.items.iter().filter(|s| s.shape != Shape::End) {
            let core = &e.text[s.residue + 4..s.residue + 4 + 48];
            assert_eq!(core, format!("{}#", code(BLANK, 2)).repeat(16));
            assert_eq!(&e.text[s.residue + 52..s.residue + 53], "#");
        }
    }

    #[test]
    fn round_trip_labc() {
        let m = labc();
        let e = encode(&m, "abcc").unwrap();
        let (spec, x) = decode(&e).unwrap();
        assert_eq!(x, "abcc");
        assert_eq!(spec, normalize(&m).unwrap().spec);
        let back = EncodedInstance::from_parts(e.text.clone(), &e.sidecar_json()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn malformed_texts() {
        let m = labc();
        let e = encode(&m, "abc").unwrap();
        let cut = EncodedInstance { text: e.text[..e.items[0].residue + 10].to_string(), ..e.clone() };
        assert!(matches!(decode(&cut), Err(EncodingError::MalformedEncoding { .. })));
        // Drop the last state from S: the count is no longer a power of two.
        let s = e.params.s_offset;
        let w = e.params.q_bits + 1;
        let mut t = e.text.clone();
        t.replace_range(e.params.g_offset - 1 - w..e.params.g_offset - 1, "");
        let bad = EncodedInstance { text: t, ..e.clone() };
        assert!(matches!(decode(&bad), Err(EncodingError::MalformedEncoding { pos, .. }) if pos == s));
        let foreign = EncodedInstance { text: e.text.replace('#', "$"), ..e };
        assert!(matches!(decode(&foreign), Err(EncodingError::MalformedEncoding { .. })));
    }

    #[test]
    fn reduction_matches_encode() {
        let m = labc();
        let f = reduce_f_m(&m).unwrap();
        for x in ["", "abcc", "abc", "cba", "aabbcc"] {
            let out = fl_run(&f, x, None).unwrap();
            assert_eq!(out.output, encode(&m, x).unwrap().text, "x = {x:?}");
            assert_eq!(out.work_used, 0);
        }
    }
}
