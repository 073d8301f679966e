//! Static well-formedness checks for every machine kind.

use std::fmt;

use super::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    DepthTooSmall,
    HaltingOverlap,
    TransitionFromHalting,
    BadDirection,
    DepthJumpWithoutTurn,
    DepthMismatchOnPass,
    DepthMismatchOnTurn,
    StationaryRewrite,
    EndmarkerOverwritten,
    EndmarkerLeftMove,
    EndmarkerWritten,
    FrozenBlankRewritten,
    InputMoveNearFrozen,
    StateChangeOnFrozenBlank,
    RightEndOverrun,
    LeftEndOverrun,
    AuxStationaryRewrite,
    CounterHeadIndex,
    Nondeterministic,
    BottomMarkerMisuse,
    UnknownSymbol,
    UndefinedTransition,
}

impl ViolationKind {
    pub fn message(self) -> &'static str {
        use ViolationKind::*;
        match self {
            DepthTooSmall => "depth k must be at least 2",
            HaltingOverlap => "state is both accepting and rejecting",
            TransitionFromHalting => "transition leaves a halting state",
            BadDirection => "head direction outside its allowed set",
            DepthJumpWithoutTurn => "depth jump without turn",
            DepthMismatchOnPass => "written symbol has the wrong depth for a pass",
            DepthMismatchOnTurn => "written symbol has the wrong depth for a turn",
            StationaryRewrite => "stationary move rewrites the scanned symbol",
            EndmarkerOverwritten => "left endmarker overwritten",
            EndmarkerLeftMove => "storage head moves left of the endmarker",
            EndmarkerWritten => "left endmarker written away from cell 0",
            FrozenBlankRewritten => "frozen blank rewritten",
            InputMoveNearFrozen => "input head moves while scanning a near-frozen symbol",
            StateChangeOnFrozenBlank => "state change on frozen blank",
            RightEndOverrun => "input head moves past the right endmarker",
            LeftEndOverrun => "input head moves past the left endmarker",
            AuxStationaryRewrite => "stationary auxiliary head rewrites its cell",
            CounterHeadIndex => "counter head index out of range",
            Nondeterministic => "more than one move applies",
            BottomMarkerMisuse => "bottom marker popped or pushed above the bottom",
            UnknownSymbol => "transition refers to an undeclared symbol",
            UndefinedTransition => "undefined transitions at a non-halting state (implicit reject)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub kind: ViolationKind,
    /// The offending transition, rendered.
    pub transition: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.kind.message())?;
        if let Some(t) = &self.transition {
            write!(f, " in {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn error(&mut self, kind: ViolationKind, transition: Option<String>) {
        self.violations.push(Violation { severity: Severity::Error, kind, transition });
    }

    fn warn(&mut self, kind: ViolationKind, transition: Option<String>) {
        self.violations.push(Violation { severity: Severity::Warning, kind, transition });
    }

    /// No errors (warnings allowed).
    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Warning)
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

/// Expected depth of the symbol written when leaving a level-`e` cell in
/// direction `d` (nonzero): a pass adds one access, a turn adds two.
pub fn expected_depth(e: usize, k: usize, d: i8) -> usize {
    if is_pass(e, d) {
        (e + 1).min(k)
    } else {
        (e + 2).min(k)
    }
}

/// Whether leaving a level-`e` cell in direction `d` continues the sweep
/// that created that level: `d = (-1)^e`.
pub fn is_pass(e: usize, d: i8) -> bool {
    let pass = if e % 2 == 0 { 1 } else { -1 };
    d == pass
}

/// Depth rule for one storage write, shared by every machine kind.
pub fn storage_rule(a: &Alphabet, gamma: Sym, xi: Sym, d: i8) -> Option<ViolationKind> {
    use ViolationKind::*;
    if !(-1..=1).contains(&d) {
        return Some(BadDirection);
    }
    if gamma == END {
        if xi != END {
            return Some(EndmarkerOverwritten);
        }
        if d == -1 {
            return Some(EndmarkerLeftMove);
        }
        return None;
    }
    if xi == END {
        return Some(EndmarkerWritten);
    }
    if gamma == BLANK {
        return (xi != BLANK).then_some(FrozenBlankRewritten);
    }
    if d == 0 {
        return (xi != gamma).then_some(StationaryRewrite);
    }
    let e = a.dv(gamma);
    let want = expected_depth(e, a.k(), d);
    let got = a.dv(xi);
    if got == want {
        None
    } else if is_pass(e, d) {
        Some(if got > want { DepthJumpWithoutTurn } else { DepthMismatchOnPass })
    } else {
        Some(DepthMismatchOnTurn)
    }
}

fn near_frozen(a: &Alphabet, g: Sym) -> bool {
    a.dv(g) + 1 >= a.k()
}

fn control_checks(c: &Control, r: &mut ValidationReport) {
    for q in 0..c.len() {
        if c.is_accepting(q) && c.is_rejecting(q) {
            r.error(ViolationKind::HaltingOverlap, Some(c.name(q).to_string()));
        }
    }
}

fn input_move(s: InSym, d: i8, two_way: bool) -> Option<ViolationKind> {
    let ok = if two_way { (-1..=1).contains(&d) } else { (0..=1).contains(&d) };
    if !ok {
        return Some(ViolationKind::BadDirection);
    }
    if s == RIGHT && d == 1 {
        return Some(ViolationKind::RightEndOverrun);
    }
    if s == LEFT && d == -1 {
        return Some(ViolationKind::LeftEndOverrun);
    }
    None
}

impl Validate for SdaSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let a = &self.alphabet;
        if a.k() < 2 {
            r.error(ViolationKind::DepthTooSmall, None);
        }
        control_checks(&self.control, &mut r);
        let mut defined = vec![0usize; self.control.len()];
        for (q, s, g, t) in self.transitions() {
            defined[q] += 1;
            let desc = || Some(self.describe(q, s, g, t));
            if self.control.is_halting(q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            if let Some(v) = input_move(s, t.d1, false) {
                r.error(v, desc());
            }
            if let Some(v) = storage_rule(a, g, t.write, t.d2) {
                r.error(v, desc());
            }
            if self.flavor == Flavor::Susceptible {
                if near_frozen(a, g) && t.d1 != 0 {
                    r.error(ViolationKind::InputMoveNearFrozen, desc());
                }
                if g == BLANK && t.next != q {
                    r.error(ViolationKind::StateChangeOnFrozenBlank, desc());
                }
            }
        }
        let full = self.input.len() * a.len();
        for (q, &n) in defined.iter().enumerate() {
            if !self.control.is_halting(q) && n < full {
                r.warn(
                    ViolationKind::UndefinedTransition,
                    Some(format!("{} ({} of {} entries undefined)", self.control.name(q), full - n, full)),
                );
            }
        }
        r
    }
}

impl Validate for AuxSdaSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let a = &self.alphabet;
        if a.k() < 2 {
            r.error(ViolationKind::DepthTooSmall, None);
        }
        control_checks(&self.control, &mut r);
        for (&(q, s, tau, g), t) in &self.delta {
            let desc = || {
                Some(format!(
                    "δ({}, {}, {}, {}) = ({}, {}, {}, {}, {}, {})",
                    self.control.name(q),
                    self.input.name(s),
                    self.aux[tau],
                    a.name(g),
                    self.control.name(t.next),
                    self.aux[t.aux_write],
                    a.name(t.write),
                    t.d1,
                    t.d2,
                    t.d3
                ))
            };
            if tau >= self.aux.len() || t.aux_write >= self.aux.len() {
                r.error(ViolationKind::UnknownSymbol, desc());
                continue;
            }
            if self.control.is_halting(q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            if let Some(v) = input_move(s, t.d1, true) {
                r.error(v, desc());
            }
            if !(-1..=1).contains(&t.d2) {
                r.error(ViolationKind::BadDirection, desc());
            }
            if t.d2 == 0 && t.aux_write != tau {
                r.error(ViolationKind::AuxStationaryRewrite, desc());
            }
            if let Some(v) = storage_rule(a, g, t.write, t.d3) {
                r.error(v, desc());
            }
            if self.flavor == Flavor::Susceptible {
                if near_frozen(a, g) && (t.d1 != 0 || t.d2 != 0) {
                    r.error(ViolationKind::InputMoveNearFrozen, desc());
                }
                if g == BLANK && t.next != q {
                    r.error(ViolationKind::StateChangeOnFrozenBlank, desc());
                }
            }
        }
        r
    }
}

impl Validate for MultiHeadSdaSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let a = &self.alphabet;
        if a.k() < 2 {
            r.error(ViolationKind::DepthTooSmall, None);
        }
        if matches!(self.counter, Some(c) if c >= self.heads) {
            r.error(ViolationKind::CounterHeadIndex, None);
        }
        control_checks(&self.control, &mut r);
        for ((q, syms, g), t) in &self.delta {
            let desc = || {
                let read: Vec<String> = syms.iter().map(|&s| self.input.name(s)).collect();
                Some(format!(
                    "δ({}, {}, {}) = ({}, {}, {:?}, {})",
                    self.control.name(*q),
                    read.join(" "),
                    a.name(*g),
                    self.control.name(t.next),
                    a.name(t.write),
                    t.moves,
                    t.d_store
                ))
            };
            if syms.len() != self.heads || t.moves.len() != self.heads {
                r.error(ViolationKind::BadDirection, desc());
                continue;
            }
            if self.control.is_halting(*q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            for (&s, &d) in syms.iter().zip(&t.moves) {
                if let Some(v) = input_move(s, d, true) {
                    r.error(v, desc());
                }
            }
            if let Some(v) = storage_rule(a, *g, t.write, t.d_store) {
                r.error(v, desc());
            }
            if self.flavor == Flavor::Susceptible {
                if near_frozen(a, *g) && t.moves.iter().any(|&d| d != 0) {
                    r.error(ViolationKind::InputMoveNearFrozen, desc());
                }
                if *g == BLANK && t.next != *q {
                    r.error(ViolationKind::StateChangeOnFrozenBlank, desc());
                }
            }
        }
        r
    }
}

impl Validate for PdaSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        control_checks(&self.control, &mut r);
        for (&(q, read, top), t) in &self.delta {
            let desc = || {
                let push: Vec<&str> = t.push.iter().map(|&z| self.stack[z].as_str()).collect();
                Some(format!(
                    "{} {} {} -> {} {}",
                    self.control.name(q),
                    self.read_name(read),
                    self.stack[top],
                    self.control.name(t.next),
                    if push.is_empty() { "-".to_string() } else { push.join(" ") }
                ))
            };
            if top >= self.stack.len() || t.push.iter().any(|&z| z >= self.stack.len()) {
                r.error(ViolationKind::UnknownSymbol, desc());
                continue;
            }
            if self.control.is_halting(q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            if read != PdaRead::Eps && self.delta.contains_key(&(q, PdaRead::Eps, top)) {
                r.error(ViolationKind::Nondeterministic, desc());
            }
            let bottom_ok = if top == BOTTOM {
                t.push.first() == Some(&BOTTOM) && !t.push[1..].contains(&BOTTOM)
            } else {
                !t.push.contains(&BOTTOM)
            };
            if !bottom_ok {
                r.error(ViolationKind::BottomMarkerMisuse, desc());
            }
        }
        r
    }
}

impl Validate for FlTransducerSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for (&(q, s, w), t) in &self.delta {
            let desc = || Some(format!("{} {} {}", self.control.name(q), self.input.name(s), self.work[w]));
            if w >= self.work.len() || t.work_write >= self.work.len() {
                r.error(ViolationKind::UnknownSymbol, desc());
                continue;
            }
            if matches!(t.out, Some(c) if !self.output.contains(&c)) {
                r.error(ViolationKind::UnknownSymbol, desc());
            }
            if self.control.is_halting(q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            if let Some(v) = input_move(s, t.d_in, true) {
                r.error(v, desc());
            }
            if !(-1..=1).contains(&t.d_work) {
                r.error(ViolationKind::BadDirection, desc());
            }
        }
        r
    }
}

impl Validate for LdaSpec {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        control_checks(&self.control, &mut r);
        let k = self.k();
        for (&(q, cell), t) in &self.delta {
            let desc = || {
                Some(format!(
                    "δ({}, {}) = ({}, {}, {})",
                    self.control.name(q),
                    self.cell_name(cell),
                    self.control.name(t.next),
                    self.cell_name(t.write),
                    t.d
                ))
            };
            if self.control.is_halting(q) {
                r.error(ViolationKind::TransitionFromHalting, desc());
            }
            if !(-1..=1).contains(&t.d) {
                r.error(ViolationKind::BadDirection, desc());
                continue;
            }
            match cell {
                LdaCell::End(s) => {
                    if t.write != cell {
                        r.error(ViolationKind::EndmarkerOverwritten, desc());
                    }
                    if (s == LEFT && t.d == -1) || (s == RIGHT && t.d == 1) {
                        r.error(ViolationKind::EndmarkerLeftMove, desc());
                    }
                }
                _ => {
                    if matches!(t.write, LdaCell::End(_)) {
                        r.error(ViolationKind::EndmarkerWritten, desc());
                        continue;
                    }
                    if cell == LdaCell::Store(BLANK) {
                        if t.write != cell {
                            r.error(ViolationKind::FrozenBlankRewritten, desc());
                        }
                        continue;
                    }
                    let e = self.cell_level(cell);
                    if t.d == 0 {
                        if t.write != cell {
                            r.error(ViolationKind::StationaryRewrite, desc());
                        }
                        continue;
                    }
                    let want = expected_depth(e, k, t.d);
                    let got = self.cell_level(t.write);
                    if got != want || t.write == LdaCell::Store(END) {
                        let kind = if !is_pass(e, t.d) {
                            ViolationKind::DepthMismatchOnTurn
                        } else if got > want {
                            ViolationKind::DepthJumpWithoutTurn
                        } else {
                            ViolationKind::DepthMismatchOnPass
                        };
                        r.error(kind, desc());
                    }
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn toy(flavor: Flavor) -> SdaSpec {
        let a = Alphabet::new(4, &[names(&["x"]), names(&["y"]), names(&["z"])]).unwrap();
        let c = Control::new(&names(&["s", "t", "acc"]), "s", &names(&["acc"]), &[]).unwrap();
        let i = InputAlphabet::new(&['a']).unwrap();
        SdaSpec::new(flavor, a, c, i)
    }

    #[test]
    fn parity_rule_table() {
        // level 0 and 2 pass rightward, levels 1 and 3 pass leftward
        assert_eq!(expected_depth(0, 4, 1), 1);
        assert_eq!(expected_depth(0, 4, -1), 2);
        assert_eq!(expected_depth(1, 4, -1), 2);
        assert_eq!(expected_depth(1, 4, 1), 3);
        assert_eq!(expected_depth(3, 4, 1), 4);
        assert_eq!(expected_depth(3, 4, -1), 4);
    }

    #[test]
    fn depth_jump_without_turn_is_reported() {
        let mut m = toy(Flavor::Immune);
        let (x, z) = (m.alphabet.sym("x").unwrap(), m.alphabet.sym("z").unwrap());
        m.insert(0, 2, x, Trans { next: 1, write: z, d1: 0, d2: -1 });
        let r = m.validate();
        assert!(r.has(ViolationKind::DepthJumpWithoutTurn));
        assert!(r.to_string().contains("depth jump without turn"));
    }

    #[test]
    fn frozen_blank_state_change_is_reported_for_susceptible_only() {
        let mut m = toy(Flavor::Susceptible);
        m.insert(0, 2, BLANK, Trans { next: 1, write: BLANK, d1: 0, d2: 1 });
        let r = m.validate();
        assert!(r.has(ViolationKind::StateChangeOnFrozenBlank));
        assert!(r.to_string().contains("state change on frozen blank"));
        m.flavor = Flavor::Immune;
        assert!(m.validate().is_ok());
    }

    #[test]
    fn endmarker_and_stationary_rules() {
        let mut m = toy(Flavor::Immune);
        let x = m.alphabet.sym("x").unwrap();
        m.insert(0, LEFT, END, Trans { next: 1, write: END, d1: 0, d2: -1 });
        m.insert(1, LEFT, END, Trans { next: 1, write: x, d1: 0, d2: 1 });
        m.insert(0, 2, BOX, Trans { next: 1, write: x, d1: 0, d2: 0 });
        m.insert(1, 2, BOX, Trans { next: 1, write: END, d1: 0, d2: 1 });
        m.insert(1, RIGHT, BOX, Trans { next: 1, write: BOX, d1: 1, d2: 0 });
        let r = m.validate();
        for kind in [
            ViolationKind::EndmarkerLeftMove,
            ViolationKind::EndmarkerOverwritten,
            ViolationKind::StationaryRewrite,
            ViolationKind::EndmarkerWritten,
            ViolationKind::RightEndOverrun,
        ] {
            assert!(r.has(kind), "{kind:?}");
        }
    }

    #[test]
    fn undefined_entries_are_warnings() {
        let m = toy(Flavor::Susceptible);
        let r = m.validate();
        assert!(r.is_ok());
        assert_eq!(r.warnings().count(), 2);
    }
}
