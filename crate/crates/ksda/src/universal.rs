//! A universal simulator over `⟨M,x⟩` and the membership procedure built
//! on it.
//!
//! [`Universal`] is an interpreter for a depth-immune k-sda with four
//! input heads on `▷⟨M,x⟩◁`: head 1 reads `P`, head 2 marks the current
//! state in `S`, head 3 the current input symbol in `X` and head 4 the
//! scanned storage symbol in `G`. Every primitive move shifts each head by
//! at most one cell and goes through the same storage-tape depth audit as
//! the engine, on U's own alphabet
//!
//! * level 0: `□`; level k: `▷`, `B`,
//! * level e in 1..k-1: `a_e b_e #_e` (core letters), `B_e` and `B̂_e`.
//!
//! Storage cell l of M becomes a block of `2α` cells preceded by a
//! separator cell. A block at level e holds the core `(code(γ)#)^θ` on the
//! side M's head arrives from (left for even e) and `B_e^α` on the other.
//! Separators go from `□` to `B` in one step the first time they are
//! crossed; that is the only move allowed to break the depth rule and
//! each use is counted.

use std::fmt;

use thiserror::Error;

use crate::encoding::{decode, parse_text, EncodedInstance, EncodingError, Shape};
use crate::engine::{EngineError, SdaRun, Storage, SurfaceConfiguration, Verdict};
use crate::model::{Alphabet, Sym, BLANK, BOX, END};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniversalError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("block discipline violated at step {step}: {detail}")]
    BlockDisciplineViolation { step: u64, detail: String },
    #[error("simulation diverged from the source machine after step {session}: {detail}")]
    Lockstep { session: u64, detail: String },
    #[error("primitive step limit {0} reached")]
    StepLimit(u64),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One line of the audit log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRecord {
    pub session: u64,
    /// `read`, `search`, or the case label `(1)`–`(7)`.
    pub case: String,
    pub block: usize,
    pub summary: String,
}

impl AuditRecord {
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.session, self.case, self.block, self.summary)
    }
}

#[derive(Clone, Debug, Default)]
pub struct UniversalOptions {
    /// Simulated steps of M; defaults to M's own default limit.
    pub session_limit: Option<u64>,
    /// Primitive steps of U; defaults to the session limit times `|e|²`.
    pub step_limit: Option<u64>,
    /// Compare against the engine after every simulated step.
    pub lockstep: bool,
    /// Keep the audit log.
    pub audit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalReport {
    pub verdict: Verdict,
    /// Simulated steps of M.
    pub sessions: u64,
    /// Primitive steps of U.
    pub steps: u64,
    pub storage_cells: usize,
    /// Separator writes that used the depth shortcut.
    pub shortcuts: u64,
    pub audit: Vec<AuditRecord>,
}

/// What a U storage symbol is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Box,
    End,
    Blank,
    Letter(u8, usize),
    Sec(usize),
    Hat(usize),
}

const PER_LEVEL: usize = 5;

/// U's storage alphabet for depth k.
fn u_alphabet(k: usize) -> Alphabet {
    let inner: Vec<Vec<String>> =
        (1..k).map(|e| ["a", "b", "#", "B", "H"].iter().map(|s| format!("{s}{e}")).collect()).collect();
    Alphabet::new(k, &inner).expect("fresh names")
}

fn classify(s: Sym) -> Cell {
    match s {
        BOX => Cell::Box,
        END => Cell::End,
        BLANK => Cell::Blank,
        _ => {
            let e = (s - 3) / PER_LEVEL + 1;
            match (s - 3) % PER_LEVEL {
                0 => Cell::Letter(b'a', e),
                1 => Cell::Letter(b'b', e),
                2 => Cell::Letter(b'#', e),
                3 => Cell::Sec(e),
                _ => Cell::Hat(e),
            }
        }
    }
}

/// Block geometry: block l ≥ 1 starts right after its separator.
#[derive(Clone, Copy, Debug)]
struct Geometry {
    alpha: usize,
}

impl Geometry {
    fn sep(self, l: usize) -> usize {
        1 + (l - 1) * (2 * self.alpha + 1)
    }

    /// `(block, offset)` of cell c ≥ 1; the separator has offset `None`.
    fn locate(self, c: usize) -> (usize, Option<usize>) {
        let w = 2 * self.alpha + 1;
        let l = (c - 1) / w + 1;
        let r = (c - 1) % w;
        (l, if r == 0 { None } else { Some(r - 1) })
    }
}

/// The interpreter state between primitive steps.
#[derive(Clone, Debug)]
pub struct Universal {
    /// `▷ text ◁`.
    tape: Vec<u8>,
    k: usize,
    alpha: usize,
    g_bits: usize,
    ua: Alphabet,
    store: Storage,
    heads: [usize; 4],
    /// Head 4 holds the scanned symbol and the core has been consumed.
    known: bool,
    started: bool,
    steps: u64,
    sessions: u64,
    step_limit: u64,
    shortcuts: u64,
    keep_audit: bool,
    audit: Vec<AuditRecord>,
}

const H1: usize = 0;
const H2: usize = 1;
const H3: usize = 2;
const H4: usize = 3;

impl Universal {
    /// Prepares U on a well-formed text; `k` comes from the sidecar.
    pub fn new(e: &EncodedInstance, step_limit: u64) -> Result<Self, UniversalError> {
        parse_text(&e.text)?;
        let mut tape = Vec::with_capacity(e.text.len() + 2);
        tape.push(b'>');
        tape.extend_from_slice(e.text.as_bytes());
        tape.push(b'<');
        let k = e.params.k;
        Ok(Universal {
            tape,
            k,
            alpha: e.params.alpha,
            g_bits: e.params.g_bits,
            ua: u_alphabet(k),
            store: Storage::new(),
            heads: [0; 4],
            known: false,
            started: false,
            steps: 0,
            sessions: 0,
            step_limit,
            shortcuts: 0,
            keep_audit: false,
            audit: Vec::new(),
        })
    }

    pub fn with_audit(mut self) -> Self {
        self.keep_audit = true;
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn sessions(&self) -> u64 {
        self.sessions
    }

    pub fn heads(&self) -> [usize; 4] {
        self.heads
    }

    pub fn storage(&self) -> &[Sym] {
        &self.store.z
    }

    pub fn storage_pos(&self) -> usize {
        self.store.pos
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.ua
    }

    fn geo(&self) -> Geometry {
        Geometry { alpha: self.alpha }
    }

    fn violation(&self, detail: impl Into<String>) -> UniversalError {
        UniversalError::BlockDisciplineViolation { step: self.steps, detail: detail.into() }
    }

    fn log(&mut self, case: &str, summary: impl FnOnce() -> String) {
        if self.keep_audit {
            let block = self.current_block();
            self.audit.push(AuditRecord { session: self.sessions, case: case.into(), block, summary: summary() });
        }
    }

    fn current_block(&self) -> usize {
        if self.store.pos == 0 {
            0
        } else {
            self.geo().locate(self.store.pos).0
        }
    }

    fn is_separator(&self, c: usize) -> bool {
        c > 0 && self.geo().locate(c).1.is_none()
    }

    // ---- primitive moves ----

    fn mv(&mut self, dh: [i8; 4], write: Sym, d: i8) -> Result<(), UniversalError> {
        if self.steps >= self.step_limit {
            return Err(UniversalError::StepLimit(self.step_limit));
        }
        let mut heads = self.heads;
        for (h, &dx) in heads.iter_mut().zip(&dh) {
            let p = *h as i64 + dx as i64;
            if p < 0 || p as usize >= self.tape.len() {
                return Err(self.violation("input head left the tape"));
            }
            *h = p as usize;
        }
        if let Err(e) = self.store.audit(&self.ua, write, d, self.steps) {
            let pos = self.store.pos;
            if !(self.is_separator(pos) && self.store.read() == BOX && write == BLANK) {
                return Err(self.violation(e.to_string()));
            }
            self.shortcuts += 1;
        }
        self.store.apply(&self.ua, write, d);
        self.heads = heads;
        self.steps += 1;
        Ok(())
    }

    fn ch(&self, h: usize) -> u8 {
        self.tape[self.heads[h]]
    }

    fn cell(&self) -> Cell {
        classify(self.store.read())
    }

    /// Moves input head `h` with the storage head parked.
    fn step(&mut self, h: usize, d: i8) -> Result<(), UniversalError> {
        let mut dh = [0; 4];
        dh[h] = d;
        self.mv(dh, self.store.read(), 0)
    }

    fn goto(&mut self, h: usize, target: usize) -> Result<(), UniversalError> {
        while self.heads[h] != target {
            self.step(h, if self.heads[h] < target { 1 } else { -1 })?;
        }
        Ok(())
    }

    fn skip_word(&mut self, h: usize) -> Result<(), UniversalError> {
        while self.ch(h) != b'#' {
            self.step(h, 1)?;
        }
        self.step(h, 1)
    }

    /// Back to the first character of the word under head `h`.
    fn rewind(&mut self, h: usize) -> Result<(), UniversalError> {
        if self.ch(h) == b'#' {
            self.step(h, -1)?;
        }
        while !matches!(self.ch(h), b'#' | b'>') {
            self.step(h, -1)?;
        }
        self.step(h, 1)
    }

    /// Head `h` to the start of segment `seg` (0 = X, 1 = S, 2 = G, 3 = P).
    fn home(&mut self, h: usize, seg: usize) -> Result<(), UniversalError> {
        while self.ch(h) != b'>' {
            self.step(h, -1)?;
        }
        self.step(h, 1)?;
        for s in 0..seg {
            while self.ch(h) != b'#' {
                self.skip_word(h)?;
            }
            self.step(h, 1)?;
            if s == 0 {
                self.step(h, 1)?;
            }
        }
        Ok(())
    }

    /// Compares the words under two heads moving right; both stop on the
    /// first difference or on the shared `#`.
    fn compare(&mut self, a: usize, b: usize) -> Result<bool, UniversalError> {
        loop {
            let (ca, cb) = (self.ch(a), self.ch(b));
            if ca != cb {
                return Ok(false);
            }
            if ca == b'#' {
                return Ok(true);
            }
            let mut dh = [0; 4];
            dh[a] = 1;
            dh[b] = 1;
            self.mv(dh, self.store.read(), 0)?;
        }
    }

    fn write_move(&mut self, s: Sym, d: i8) -> Result<(), UniversalError> {
        self.mv([0; 4], s, d)
    }

    // ---- U symbols ----

    fn letter(&self, c: u8, e: usize) -> Sym {
        3 + PER_LEVEL * (e - 1) + match c {
            b'a' => 0,
            b'b' => 1,
            _ => 2,
        }
    }

    /// `B_e`, or `B` at level k.
    fn sec(&self, e: usize) -> Sym {
        if e >= self.k {
            BLANK
        } else {
            3 + PER_LEVEL * (e - 1) + 3
        }
    }

    fn hat(&self, e: usize) -> Sym {
        3 + PER_LEVEL * (e - 1) + 4
    }

    // ---- session phases ----

    fn start(&mut self) -> Result<(), UniversalError> {
        // Head 3 on code(▷), head 2 on p1.
        self.step(H3, 1)?;
        self.home(H2, 1)?;
        self.started = true;
        Ok(())
    }

    /// Simulates one step of M; returns M's verdict once it halts.
    pub fn session(&mut self) -> Result<Option<Verdict>, UniversalError> {
        if !self.started {
            self.start()?;
        }
        if !self.known {
            self.read_gamma()?;
        }
        let Some((shape, core)) = self.search()? else {
            self.log("search", || "no encoded transition applies".into());
            return Ok(Some(Verdict::Reject));
        };
        self.execute(shape, core)?;
        self.update(shape, core)?;
        self.known = shape == Shape::Stay;
        self.sessions += 1;
        Ok(self.halted()?)
    }

    /// Positions head 4 on the scanned symbol, consuming a core if needed.
    fn read_gamma(&mut self) -> Result<(), UniversalError> {
        let entry = match self.cell() {
            Cell::End => Some(END),
            Cell::Box => Some(BOX),
            Cell::Blank => Some(BLANK),
            Cell::Letter(_, e) => {
                self.read_core(e)?;
                None
            }
            c => return Err(self.violation(format!("rest position on {c:?}"))),
        };
        if let Some(idx) = entry {
            self.home(H4, 2)?;
            for _ in 0..idx {
                self.skip_word(H4)?;
            }
        }
        self.log("read", || "scanned symbol located in G".into());
        Ok(())
    }

    /// Reads the core under the head in the arrival direction, matching
    /// one copy against each G entry in turn and overwriting it by `B_{e+1}`.
    fn read_core(&mut self, e: usize) -> Result<(), UniversalError> {
        let a = self.store.prev_dir;
        if (e % 2 == 0) != (a == 1) {
            return Err(self.violation("core entered against its parity"));
        }
        let w = self.sec(e + 1);
        self.home(H4, 2)?;
        if a == -1 {
            while self.ch(H4) != b'#' {
                self.step(H4, 1)?;
            }
        }
        let mut found = false;
        let mut comparing = true;
        while let Cell::Letter(c, lv) = self.cell() {
            if lv != e {
                return Err(self.violation("core letters of mixed levels"));
            }
            if found {
                self.write_move(w, a)?;
                continue;
            }
            if a == -1 && c == b'#' {
                comparing = true;
            }
            if comparing && c == self.ch(H4) {
                if a == 1 && c == b'#' {
                    found = true;
                    self.write_move(w, a)?;
                    self.rewind(H4)?;
                    continue;
                }
                let mut dh = [0; 4];
                dh[H4] = a;
                self.mv(dh, w, a)?;
                if a == -1 && self.ch(H4) == b'#' {
                    found = true;
                    self.step(H4, 1)?;
                }
                continue;
            }
            if comparing {
                // Mismatch: head 4 moves on to the next entry.
                comparing = false;
                while self.ch(H4) != b'#' {
                    self.step(H4, 1)?;
                }
                self.step(H4, 1)?;
                if a == -1 {
                    while self.ch(H4) != b'#' {
                        self.step(H4, 1)?;
                    }
                }
            }
            self.write_move(w, a)?;
            if a == 1 && c == b'#' {
                comparing = true;
            }
        }
        if !found {
            return Err(self.violation("core matches no G entry"));
        }
        Ok(())
    }

    /// Scans P for the item whose receptor matches heads 3, 4 and 2.
    /// Leaves head 1 on the item's core and returns the core position.
    fn search(&mut self) -> Result<Option<(Shape, usize)>, UniversalError> {
        self.home(H1, 3)?;
        let mut si = 0;
        loop {
            if self.ch(H1) == b'#' {
                self.step(H1, 1)?;
                let shape = Shape::ORDER[si];
                if shape != Shape::Frozen {
                    self.step(H1, 1)?;
                }
                si += 1;
                if si == Shape::ORDER.len() {
                    return Ok(None);
                }
                continue;
            }
            let mut field = 0;
            for h in [H3, H4, H2] {
                let ok = self.compare(H1, h)?;
                self.rewind(h)?;
                if !ok {
                    break;
                }
                self.step(H1, 1)?;
                field += 1;
            }
            if field == 3 {
                let shape = Shape::ORDER[si];
                // Skip d̃; head 1 lands on the core.
                for _ in 0..4 {
                    self.step(H1, 1)?;
                }
                let core = self.heads[H1];
                self.log("search", || format!("found a {shape:?} item at offset {}", core - 1));
                return Ok(Some((shape, core)));
            }
            // Rest of the receptor, d̃, the core, p' and d1.
            self.skip_word(H1)?;
            for _ in field + 1..4 {
                self.skip_word(H1)?;
            }
            while self.ch(H1) != b'#' {
                self.skip_word(H1)?;
            }
            self.step(H1, 1)?;
            self.skip_word(H1)?;
            self.skip_word(H1)?;
            self.step(H1, 1)?;
        }
    }

    /// Moves the storage head across `α` cells writing `s`, head 1 pacing
    /// it over the item core in direction `h1`.
    fn ruler(&mut self, s: Sym, d: i8, h1: i8) -> Result<(), UniversalError> {
        for _ in 0..self.alpha {
            let mut dh = [0; 4];
            dh[H1] = h1;
            self.mv(dh, s, d)?;
        }
        Ok(())
    }

    /// Writes `s` while the scanned cell is `what`.
    fn fill_while(&mut self, what: Sym, s: Sym, d: i8) -> Result<(), UniversalError> {
        while self.store.read() == what {
            self.write_move(s, d)?;
        }
        Ok(())
    }

    /// Copies the item core at level `e`: forward from its first
    /// character, or backward from its last.
    fn copy_core(&mut self, e: usize, d: i8, forward: bool) -> Result<(), UniversalError> {
        let h1 = if forward { 1 } else { -1 };
        for _ in 0..self.alpha {
            let c = self.ch(H1);
            let mut dh = [0; 4];
            dh[H1] = h1;
            self.mv(dh, self.letter(c, e), d)?;
        }
        Ok(())
    }

    fn expect(&self, what: Sym) -> Result<(), UniversalError> {
        if self.store.read() != what {
            return Err(self.violation(format!("expected {} under the head", self.ua.name(what))));
        }
        Ok(())
    }

    /// Level of the block under the head: 0 for □, k for B, else the
    /// level of its unread section.
    fn level_here(&self) -> Result<usize, UniversalError> {
        match self.cell() {
            Cell::Box => Ok(0),
            Cell::Blank | Cell::End => Ok(self.k),
            Cell::Sec(e) => Ok(e),
            c => Err(self.violation(format!("no transition starts on {c:?}"))),
        }
    }

    fn execute(&mut self, shape: Shape, core: usize) -> Result<(), UniversalError> {
        let alpha = self.alpha;
        let k = self.k;
        let block = self.current_block();
        match shape {
            Shape::Stay => {}
            Shape::End => {
                self.expect(END)?;
                self.write_move(END, 1)?;
                self.write_move(BLANK, 1)?;
            }
            Shape::Right => {
                let e = self.level_here()?;
                if e == 0 {
                    self.ruler(self.sec(1), 1, 1)?;
                    self.goto(H1, core)?;
                }
                self.copy_core(e + 1, 1, true)?;
                self.write_move(BLANK, 1)?;
            }
            Shape::LeftTurn => {
                let e = self.level_here()?;
                let hat = self.hat(e + 1);
                if e == 0 {
                    self.ruler(self.sec(1), 1, 1)?;
                    self.ruler(hat, 1, -1)?;
                } else {
                    self.fill_while(self.sec(e), hat, 1)?;
                }
                self.write_move(BLANK, -1)?;
                self.fill_while(hat, self.sec(e + 2), -1)?;
                if e + 2 >= k {
                    self.fill_while(self.sec(e + 1), BLANK, -1)?;
                } else {
                    self.goto(H1, core + alpha - 1)?;
                    self.copy_core(e + 2, -1, false)?;
                }
                self.write_move(BLANK, -1)?;
            }
            Shape::Left => {
                let e = self.level_here()?;
                self.goto(H1, core + alpha - 1)?;
                self.copy_core(e + 1, -1, false)?;
                self.write_move(BLANK, -1)?;
            }
            Shape::RightTurn => {
                let e = self.level_here()?;
                let hat = self.hat(e + 1);
                self.fill_while(self.sec(e), hat, -1)?;
                self.write_move(BLANK, 1)?;
                self.fill_while(hat, self.sec(e + 2), 1)?;
                if e + 2 >= k {
                    self.fill_while(self.sec(e + 1), BLANK, 1)?;
                } else {
                    self.copy_core(e + 2, 1, true)?;
                }
                self.write_move(BLANK, 1)?;
            }
            Shape::Frozen => {
                // d̃ sits four characters before the core: 100 or 001.
                let d2: i8 = if self.tape[core - 4] == b'1' { -1 } else { 1 };
                let a = self.store.prev_dir;
                match self.cell() {
                    Cell::Blank => {
                        if d2 == a {
                            self.ruler(BLANK, a, 1)?;
                            self.ruler(BLANK, a, -1)?;
                            self.write_move(BLANK, a)?;
                        } else {
                            self.write_move(BLANK, -a)?;
                            self.write_move(BLANK, -a)?;
                        }
                    }
                    c => {
                        if c == Cell::Box {
                            self.ruler(BLANK, a, 1)?;
                            self.ruler(BLANK, a, -1)?;
                        } else {
                            self.fill_while(self.sec(k - 1), BLANK, a)?;
                        }
                        if d2 == a {
                            self.write_move(BLANK, a)?;
                        } else {
                            self.write_move(BLANK, -a)?;
                            self.ruler(BLANK, -a, 1)?;
                            self.ruler(BLANK, -a, -1)?;
                            self.write_move(BLANK, -a)?;
                        }
                    }
                }
            }
        }
        if shape != Shape::Stay {
            let now = self.current_block();
            self.log(shape_label(shape), || format!("block {block} rewritten, head now in block {now}"));
        }
        Ok(())
    }

    /// Head 2 to `p'`, head 3 forward when `d1 = 1`.
    fn update(&mut self, shape: Shape, core: usize) -> Result<(), UniversalError> {
        let core_len = if shape == Shape::End { self.g_bits + 1 } else { self.alpha };
        let p_next = core + core_len + 1;
        self.goto(H1, p_next)?;
        self.home(H2, 1)?;
        loop {
            let ok = self.compare(H1, H2)?;
            self.rewind(H1)?;
            if ok {
                self.rewind(H2)?;
                break;
            }
            self.skip_word(H2)?;
            if self.ch(H2) == b'#' {
                return Err(self.violation("next state is missing from S"));
            }
        }
        self.skip_word(H1)?;
        self.step(H1, 1)?;
        if self.ch(H1) == b'1' {
            self.skip_word(H3)?;
            if self.ch(H3) == b'#' {
                return Err(self.violation("input head moved past the right endmarker"));
            }
        }
        Ok(())
    }

    /// Reads head 2's code: `a…ab` is p2, `a…aba` is p3.
    fn halted(&mut self) -> Result<Option<Verdict>, UniversalError> {
        let (mut bs, mut after) = (0, 0);
        while self.ch(H2) != b'#' {
            if self.ch(H2) == b'b' {
                bs += 1;
                after = 0;
            } else if bs > 0 {
                after += 1;
            }
            self.step(H2, 1)?;
        }
        self.rewind(H2)?;
        Ok(match (bs, after) {
            (1, 0) => Some(Verdict::Accept),
            (1, 1) => Some(Verdict::Reject),
            _ => None,
        })
    }

    /// Reads M's surface configuration back off U's tape and heads.
    pub fn decode_blocks(&self) -> Result<SurfaceConfiguration, UniversalError> {
        if !self.started {
            return Ok(SurfaceConfiguration::initial(0));
        }
        let word_at = |p: usize| -> usize {
            let mut v = 0;
            let mut i = p;
            while self.tape[i] != b'#' {
                v = v << 1 | usize::from(self.tape[i] == b'b');
                i += 1;
            }
            v
        };
        let q = word_at(self.heads[H2]);
        if self.tape[self.heads[H3] - 1] != b'>' && self.tape[self.heads[H3] - 1] != b'#' {
            return Err(self.violation("head 3 is not on a word start"));
        }
        let l1 = self.tape[1..self.heads[H3]].iter().filter(|&&c| c == b'#').count();
        let geo = self.geo();
        let pos = self.store.pos;
        let l2 = self.current_block();
        let z = &self.store.z;
        let at = |c: usize| z.get(c).copied().unwrap_or(BOX);
        let mut y = vec![END];
        if at(0) != END {
            return Err(self.violation("cell 0 lost the endmarker"));
        }
        let blocks = if z.len() <= 1 { 0 } else { geo.locate(z.len() - 1).0 };
        let alpha = self.alpha;
        for l in 1..=blocks.max(l2) {
            let s = geo.sep(l);
            if !matches!(at(s), BOX | BLANK) {
                return Err(self.violation(format!("separator of block {l} holds {}", self.ua.name(at(s)))));
            }
            let cells: Vec<Cell> = (s + 1..=s + 2 * alpha).map(|c| classify(at(c))).collect();
            let here = l == l2;
            let (sym, entry) = self.decode_block(&cells, here && self.known)?;
            if here {
                let off = geo.locate(pos).1.ok_or_else(|| self.violation("head rests on a separator"))?;
                let ok = match entry {
                    Entry::First => off == 0,
                    Entry::Last => off == 2 * alpha - 1,
                    Entry::Either => {
                        (off == 0 && self.store.prev_dir == 1) || (off == 2 * alpha - 1 && self.store.prev_dir == -1)
                    }
                    Entry::Mid(m) => off == m,
                };
                if !ok {
                    return Err(self.violation(format!("head at offset {off} of block {l} is not a rest position")));
                }
            }
            y.push(sym);
        }
        if pos == 0 && self.known && self.word_at_h4() != END {
            return Err(self.violation("head 4 does not hold ▷ at cell 0"));
        }
        while y.len() > 1 && y.last() == Some(&BOX) {
            y.pop();
        }
        Ok(SurfaceConfiguration { q, l1, l2, z: y })
    }

    fn word_at_h4(&self) -> Sym {
        let mut v = 0;
        let mut i = self.heads[H4];
        while self.tape[i] != b'#' {
            v = v << 1 | usize::from(self.tape[i] == b'b');
            i += 1;
        }
        v
    }

    fn decode_block(&self, cells: &[Cell], read: bool) -> Result<(Sym, Entry), UniversalError> {
        let alpha = self.alpha;
        let (left, right) = cells.split_at(alpha);
        let all = |s: &[Cell], c: Cell| s.iter().all(|&x| x == c);
        if all(cells, Cell::Box) {
            return Ok((BOX, Entry::First));
        }
        if read {
            let g = self.word_at_h4();
            for e in 1..self.k {
                let done = if e + 1 >= self.k { Cell::Blank } else { Cell::Sec(e + 1) };
                if e % 2 == 0 && all(left, done) && all(right, Cell::Sec(e)) {
                    return Ok((g, Entry::Mid(alpha)));
                }
                if e % 2 == 1 && all(left, Cell::Sec(e)) && all(right, done) {
                    return Ok((g, Entry::Mid(alpha - 1)));
                }
            }
            if all(cells, Cell::Blank) && g == BLANK {
                return Ok((BLANK, Entry::Either));
            }
            return Err(self.violation("scanned block is not in a read shape"));
        }
        if all(cells, Cell::Blank) {
            return Ok((BLANK, Entry::Either));
        }
        for e in 1..self.k {
            let (core, rest, entry) = if e % 2 == 0 { (left, right, Entry::First) } else { (right, left, Entry::Last) };
            if all(rest, Cell::Sec(e)) {
                if let Some(g) = self.decode_core(core, e) {
                    return Ok((g, entry));
                }
            }
        }
        Err(self.violation("block is in no legal shape"))
    }

    fn decode_core(&self, core: &[Cell], e: usize) -> Option<Sym> {
        let text: Vec<u8> = core
            .iter()
            .map(|&c| match c {
                Cell::Letter(ch, lv) if lv == e => Some(ch),
                _ => None,
            })
            .collect::<Option<_>>()?;
        let unit = self.g_bits + 1;
        let first = &text[..unit];
        if first[self.g_bits] != b'#' || first[..self.g_bits].contains(&b'#') || text.chunks(unit).any(|c| c != first) {
            return None;
        }
        Some(first[..self.g_bits].iter().fold(0, |v, &c| v << 1 | usize::from(c == b'b')))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Entry {
    First,
    Last,
    Either,
    Mid(usize),
}

fn shape_label(s: Shape) -> &'static str {
    match s {
        Shape::Right => "(1)",
        Shape::LeftTurn => "(2)",
        Shape::Left => "(3)",
        Shape::RightTurn => "(4)",
        Shape::End => "(5)",
        Shape::Frozen => "(6)",
        Shape::Stay => "(7)",
    }
}

impl fmt::Display for UniversalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} simulated steps ({} primitive steps, {} storage cells, {} separator shortcuts)",
            self.verdict, self.sessions, self.steps, self.storage_cells, self.shortcuts
        )
    }
}

/// Runs U on `e`. With `lockstep`, the decoded configuration is compared
/// with the engine's after every simulated step.
pub fn universal_run(e: &EncodedInstance, opts: &UniversalOptions) -> Result<UniversalReport, UniversalError> {
    let (spec, x) = decode(e)?;
    let session_limit = opts.session_limit.unwrap_or_else(|| spec.default_step_limit(x.chars().count()));
    let len = e.text.len() as u64;
    let step_limit = opts.step_limit.unwrap_or_else(|| session_limit.saturating_mul(len.saturating_mul(len)));
    let mut u = Universal::new(e, step_limit)?;
    u.keep_audit = opts.audit;
    let mut engine = if opts.lockstep { Some(SdaRun::new(&spec, &x)?) } else { None };
    let verdict = loop {
        if u.sessions >= session_limit {
            break Verdict::StepLimit;
        }
        let r = match u.session() {
            Ok(r) => r,
            Err(UniversalError::StepLimit(_)) => break Verdict::StepLimit,
            Err(err) => return Err(err),
        };
        if let Some(m) = engine.as_mut() {
            let step = m.step()?;
            let session = u.sessions;
            if let crate::engine::Step::Halt(v) = step {
                if r != Some(v) {
                    return Err(UniversalError::Lockstep { session, detail: format!("source halted with {v}, U gave {r:?}") });
                }
            } else {
                let got = u.decode_blocks()?;
                let want = m.config();
                if got != want {
                    return Err(UniversalError::Lockstep { session, detail: format!("decoded {got:?}, source {want:?}") });
                }
                if let Some(v) = r {
                    if m.halted() != Some(v) {
                        return Err(UniversalError::Lockstep { session, detail: format!("U halted with {v} early") });
                    }
                }
            }
        }
        if let Some(v) = r {
            break v;
        }
    };
    Ok(UniversalReport {
        verdict,
        sessions: u.sessions,
        steps: u.steps,
        storage_cells: u.store.z.len(),
        shortcuts: u.shortcuts,
        audit: u.audit,
    })
}

/// Decides whether M accepts x from `⟨M,x⟩`.
pub fn memb_k(e: &EncodedInstance) -> Result<Verdict, UniversalError> {
    Ok(universal_run(e, &UniversalOptions::default())?.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::encoding::encode;
    use crate::engine::verdict;

    fn labc() -> crate::model::SdaSpec {
        corpus::fixture("labc").unwrap().sda()
    }

    fn lockstep() -> UniversalOptions {
        UniversalOptions { lockstep: true, audit: true, ..Default::default() }
    }

    #[test]
    fn alphabet_layout() {
        let a = u_alphabet(3);
        assert_eq!(a.len(), 3 + 2 * PER_LEVEL);
        assert_eq!(a.name(3 + PER_LEVEL + 4), "H2");
        assert_eq!(a.dv(3 + PER_LEVEL), 2);
        assert_eq!(classify(3 + PER_LEVEL + 3), Cell::Sec(2));
    }

    #[test]
    fn labc_verdicts() {
        let m = labc();
        for (x, v) in [("abcc", Verdict::Accept), ("abc", Verdict::Reject), ("", Verdict::Accept), ("aabbccc", Verdict::Reject)] {
            let e = encode(&m, x).unwrap();
            let r = universal_run(&e, &lockstep()).unwrap();
            assert_eq!(r.verdict, v, "x = {x:?}");
            assert_eq!(memb_k(&e).unwrap(), v);
        }
    }

    #[test]
    fn first_step_leaves_the_endmarker() {
        let m = labc();
        let e = encode(&m, "abcc").unwrap();
        let mut u = Universal::new(&e, u64::MAX).unwrap();
        let y0 = u.decode_blocks().unwrap();
        assert_eq!((y0.z.clone(), y0.l2), (vec![END], 0));
        assert_eq!(u.session().unwrap(), None);
        let y1 = u.decode_blocks().unwrap();
        assert_eq!((y1.z, y1.l2, y1.l1), (vec![END], 1, 0));
        // The fresh block right of ▷ is all □.
        let s = Geometry { alpha: e.params.alpha }.sep(1);
        assert!((s + 1..s + 1 + 2 * e.params.alpha).all(|c| u.storage().get(c).copied().unwrap_or(BOX) == BOX));
    }

    #[test]
    fn audit_log_lines() {
        let e = encode(&labc(), "abcc").unwrap();
        let r = universal_run(&e, &lockstep()).unwrap();
        assert!(r.audit.iter().any(|a| a.case == "(2)"));
        assert!(r.audit.iter().any(|a| a.case == "(6)"));
        assert!(r.shortcuts > 0);
        assert_eq!(r.audit[0].to_line().split('\t').count(), 4);
    }

    #[test]
    fn small_fixtures_agree() {
        for (name, m) in corpus::sda_fixtures(crate::model::Flavor::Susceptible) {
            let sigma: Vec<char> = m.input.chars().to_vec();
            for x in crate::engine::all_strings(&sigma, 3) {
                let e = encode(&m, &x).unwrap();
                let r = universal_run(&e, &lockstep()).unwrap_or_else(|err| panic!("{name} on {x:?}: {err}"));
                assert_eq!(r.verdict, verdict(&m, &x).unwrap(), "{name} on {x:?}");
            }
        }
    }

    #[test]
    fn malformed_text_is_rejected() {
        let mut e = encode(&labc(), "ab").unwrap();
        e.text.truncate(e.text.len() - 3);
        assert!(matches!(memb_k(&e), Err(UniversalError::Encoding(EncodingError::MalformedEncoding { .. }))));
    }
}
