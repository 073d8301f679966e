//! Line-oriented machine description language.
//!
//! ```text
//! # comment
//! sda k=2 flavor=susceptible
//! states: q0 q1 acc rej
//! accept: acc
//! reject: rej
//! input: a b
//! gamma[1]: A
//! delta:
//! q0 > > -> q0 > S R
//! q0 > BOX -> q0 BOX R S
//! q0 a BOX -> q0 A R R
//! ```
//!
//! Headers: `sda k= flavor=`, `pda`, `aux k= flavor= space=`,
//! `mh k= flavor= heads= [counter=]`, `flt space=<log|const>`, `lda k=`.
//! Reserved symbols: `>` (▷), `<` (◁), `BOX` (□), `B` (frozen blank).
//! Directions: `L`, `S`, `R`. The first listed state is initial unless an
//! `initial:` line says otherwise.
//!
//! Delta line shapes:
//! * sda: `q σ γ -> p ξ D1 D2`
//! * aux: `q σ τ γ -> p θ ξ D1 D2 D3` (auxiliary blank is `_`)
//! * mh: `q σ1 … σℓ γ -> p ξ D1 … Dℓ D`
//! * pda: `q σ Z -> p Z1 … Zm` with `σ = eps` for ε-moves and `-` for an empty push
//! * flt: `q σ ω -> p ω' Din Dwork OUT` with `OUT = -` for no output (work blank is `_`)
//! * lda: `q γ -> p ξ D`

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::*;

#[derive(Debug, Error)]
pub enum DslError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation failed:\n{0}")]
    Invalid(ValidationReport),
}

/// Any machine the DSL can describe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Sda(SdaSpec),
    Pda(PdaSpec),
    Aux(AuxSdaSpec),
    MultiHead(MultiHeadSdaSpec),
    Flt(FlTransducerSpec),
    Lda(LdaSpec),
}

impl Machine {
    pub fn kind(&self) -> &'static str {
        match self {
            Machine::Sda(_) => "sda",
            Machine::Pda(_) => "pda",
            Machine::Aux(_) => "aux",
            Machine::MultiHead(_) => "mh",
            Machine::Flt(_) => "flt",
            Machine::Lda(_) => "lda",
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Machine::Sda(m) => m.validate(),
            Machine::Pda(m) => m.validate(),
            Machine::Aux(m) => m.validate(),
            Machine::MultiHead(m) => m.validate(),
            Machine::Flt(m) => m.validate(),
            Machine::Lda(m) => m.validate(),
        }
    }

    pub fn into_sda(self) -> Option<SdaSpec> {
        match self {
            Machine::Sda(m) => Some(m),
            _ => None,
        }
    }
}

/// Parses and validates; validation errors (not warnings) fail.
pub fn load(text: &str) -> Result<Machine, DslError> {
    let m = parse_dsl(text)?;
    let r = m.validate();
    if r.is_ok() {
        Ok(m)
    } else {
        Err(DslError::Invalid(r))
    }
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    toks: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn err(&self, i: usize, msg: impl Into<String>) -> DslError {
        let col = self.toks.get(i).map(|t| t.0 + 1).unwrap_or(self.text.len() + 1);
        DslError::Parse { line: self.no, col, msg: msg.into() }
    }
}

fn tokenize(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

#[derive(Default)]
struct Sections<'a> {
    header: Option<Line<'a>>,
    lists: BTreeMap<String, (usize, Vec<String>)>,
    delta: Vec<Line<'a>>,
}

fn split(text: &str) -> Result<Sections<'_>, DslError> {
    let mut s = Sections::default();
    let mut in_delta = false;
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim_start();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let line = Line { no: i + 1, text: raw, toks: tokenize(raw) };
        if s.header.is_none() {
            s.header = Some(line);
            continue;
        }
        let first = line.toks[0].1;
        if let Some(name) = first.strip_suffix(':') {
            if name == "delta" {
                if line.toks.len() > 1 {
                    return Err(line.err(1, "delta lines start on the next line"));
                }
                in_delta = true;
                continue;
            }
            in_delta = false;
            if s.lists.contains_key(name) {
                return Err(line.err(0, format!("section `{name}` repeated")));
            }
            let vals = line.toks[1..].iter().map(|t| t.1.to_string()).collect();
            s.lists.insert(name.to_string(), (line.no, vals));
            continue;
        }
        if !in_delta {
            return Err(line.err(0, "expected a section header"));
        }
        s.delta.push(line);
    }
    Ok(s)
}

fn model_err(line: usize, e: ModelError) -> DslError {
    DslError::Parse { line, col: 1, msg: e.to_string() }
}

fn dir(line: &Line, i: usize) -> Result<i8, DslError> {
    match line.toks.get(i).map(|t| t.1) {
        Some("L") => Ok(-1),
        Some("S") => Ok(0),
        Some("R") => Ok(1),
        _ => Err(line.err(i, "expected a direction L, S or R")),
    }
}

fn dir_name(d: i8) -> &'static str {
    match d {
        -1 => "L",
        0 => "S",
        _ => "R",
    }
}

struct Common {
    control: Control,
    input: InputAlphabet,
}

fn common(s: &Sections, header_line: usize) -> Result<Common, DslError> {
    let get = |n: &str| s.lists.get(n).map(|v| v.1.clone()).unwrap_or_default();
    let line_of = |n: &str| s.lists.get(n).map(|v| v.0).unwrap_or(header_line);
    let states = get("states");
    if states.is_empty() {
        return Err(DslError::Parse { line: header_line, col: 1, msg: "missing `states:` section".into() });
    }
    let q0 = get("initial").first().cloned().unwrap_or_else(|| states[0].clone());
    let control = Control::new(&states, &q0, &get("accept"), &get("reject")).map_err(|e| model_err(line_of("states"), e))?;
    let mut chars = Vec::new();
    for tok in get("input") {
        let mut it = tok.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => chars.push(c),
            _ => {
                return Err(DslError::Parse {
                    line: line_of("input"),
                    col: 1,
                    msg: format!("input symbol `{tok}` must be a single character"),
                })
            }
        }
    }
    let input = InputAlphabet::new(&chars).map_err(|e| model_err(line_of("input"), e))?;
    Ok(Common { control, input })
}

fn alphabet(s: &Sections, k: usize, header_line: usize) -> Result<Alphabet, DslError> {
    let mut inner = Vec::new();
    for e in 1..k {
        inner.push(s.lists.get(&format!("gamma[{e}]")).map(|v| v.1.clone()).unwrap_or_default());
    }
    for name in s.lists.keys() {
        if let Some(rest) = name.strip_prefix("gamma[") {
            let ok = rest.strip_suffix(']').and_then(|n| n.parse::<usize>().ok()).is_some_and(|e| e >= 1 && e < k);
            if !ok {
                return Err(DslError::Parse { line: s.lists[name].0, col: 1, msg: format!("no level `{name}` for k={k}") });
            }
        }
    }
    Alphabet::new(k, &inner).map_err(|e| model_err(header_line, e))
}

fn header_args<'a>(h: &'a Line) -> Result<BTreeMap<&'a str, (usize, &'a str)>, DslError> {
    let mut m = BTreeMap::new();
    for (i, (_, tok)) in h.toks.iter().enumerate().skip(1) {
        let Some((k, v)) = tok.split_once('=') else {
            return Err(h.err(i, format!("expected key=value, got `{tok}`")));
        };
        m.insert(k, (i, v));
    }
    Ok(m)
}

fn num(h: &Line, args: &BTreeMap<&str, (usize, &str)>, key: &str) -> Result<Option<usize>, DslError> {
    match args.get(key) {
        None => Ok(None),
        Some(&(i, v)) => v.parse().map(Some).map_err(|_| h.err(i, format!("`{key}` must be an integer"))),
    }
}

fn flavor(h: &Line, args: &BTreeMap<&str, (usize, &str)>) -> Result<Flavor, DslError> {
    match args.get("flavor") {
        None | Some((_, "susceptible")) => Ok(Flavor::Susceptible),
        Some((_, "immune")) => Ok(Flavor::Immune),
        Some(&(i, _)) => Err(h.err(i, "flavor must be susceptible or immune")),
    }
}

fn arrow(line: &Line, lhs: usize) -> Result<(), DslError> {
    match line.toks.get(lhs) {
        Some((_, "->")) => Ok(()),
        _ => Err(line.err(lhs, "expected `->`")),
    }
}

fn state(line: &Line, c: &Control, i: usize) -> Result<State, DslError> {
    let name = line.toks.get(i).map(|t| t.1).ok_or_else(|| line.err(i, "missing state"))?;
    c.state(name).ok_or_else(|| line.err(i, format!("unknown state `{name}`")))
}

fn insym(line: &Line, inp: &InputAlphabet, i: usize) -> Result<InSym, DslError> {
    let name = line.toks.get(i).map(|t| t.1).ok_or_else(|| line.err(i, "missing input symbol"))?;
    inp.parse_name(name).ok_or_else(|| line.err(i, format!("unknown input symbol `{name}`")))
}

fn stsym(line: &Line, a: &Alphabet, i: usize) -> Result<Sym, DslError> {
    let name = line.toks.get(i).map(|t| t.1).ok_or_else(|| line.err(i, "missing storage symbol"))?;
    a.sym(name).ok_or_else(|| line.err(i, format!("unknown storage symbol `{name}`")))
}

fn list_sym(line: &Line, names: &[String], i: usize, what: &str) -> Result<usize, DslError> {
    let name = line.toks.get(i).map(|t| t.1).ok_or_else(|| line.err(i, format!("missing {what} symbol")))?;
    names.iter().position(|n| n == name).ok_or_else(|| line.err(i, format!("unknown {what} symbol `{name}`")))
}

fn arity(line: &Line, n: usize) -> Result<(), DslError> {
    if line.toks.len() == n {
        Ok(())
    } else {
        Err(line.err(n.min(line.toks.len()), format!("expected {n} tokens, found {}", line.toks.len())))
    }
}

fn dup(line: &Line) -> DslError {
    line.err(0, "transition defined twice")
}

/// Parses any machine kind. Does not validate.
pub fn parse_dsl(text: &str) -> Result<Machine, DslError> {
    let s = split(text)?;
    let Some(h) = &s.header else {
        return Err(DslError::Parse { line: 1, col: 1, msg: "empty description".into() });
    };
    let args = header_args(h)?;
    let hl = h.no;
    match h.toks[0].1 {
        "sda" => {
            let k = num(h, &args, "k")?.ok_or_else(|| h.err(0, "missing k="))?;
            let a = alphabet(&s, k, hl)?;
            let c = common(&s, hl)?;
            let mut m = SdaSpec::new(flavor(h, &args)?, a, c.control, c.input);
            for l in &s.delta {
                arity(l, 8)?;
                arrow(l, 3)?;
                let q = state(l, &m.control, 0)?;
                let sg = insym(l, &m.input, 1)?;
                let g = stsym(l, &m.alphabet, 2)?;
                let t = Trans { next: state(l, &m.control, 4)?, write: stsym(l, &m.alphabet, 5)?, d1: dir(l, 6)?, d2: dir(l, 7)? };
                if m.insert(q, sg, g, t).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::Sda(m))
        }
        "aux" => {
            let k = num(h, &args, "k")?.ok_or_else(|| h.err(0, "missing k="))?;
            let space = match args.get("space") {
                None | Some((_, "log")) => SpaceBound::Log { factor: 1 },
                Some((_, "unbounded")) => SpaceBound::Unbounded,
                Some(&(i, v)) => {
                    if let Some(f) = v.strip_prefix("log*") {
                        SpaceBound::Log { factor: f.parse().map_err(|_| h.err(i, "bad log factor"))? }
                    } else {
                        SpaceBound::Cells(v.parse().map_err(|_| h.err(i, "space must be log, log*C, N or unbounded"))?)
                    }
                }
            };
            let a = alphabet(&s, k, hl)?;
            let c = common(&s, hl)?;
            let mut aux = vec!["_".to_string()];
            aux.extend(s.lists.get("aux").map(|v| v.1.clone()).unwrap_or_default());
            let mut m = AuxSdaSpec {
                flavor: flavor(h, &args)?,
                alphabet: a,
                control: c.control,
                input: c.input,
                aux,
                space,
                delta: BTreeMap::new(),
            };
            for l in &s.delta {
                arity(l, 11)?;
                arrow(l, 4)?;
                let key = (
                    state(l, &m.control, 0)?,
                    insym(l, &m.input, 1)?,
                    list_sym(l, &m.aux, 2, "auxiliary")?,
                    stsym(l, &m.alphabet, 3)?,
                );
                let t = AuxTrans {
                    next: state(l, &m.control, 5)?,
                    aux_write: list_sym(l, &m.aux, 6, "auxiliary")?,
                    write: stsym(l, &m.alphabet, 7)?,
                    d1: dir(l, 8)?,
                    d2: dir(l, 9)?,
                    d3: dir(l, 10)?,
                };
                if m.delta.insert(key, t).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::Aux(m))
        }
        "mh" => {
            let k = num(h, &args, "k")?.ok_or_else(|| h.err(0, "missing k="))?;
            let heads = num(h, &args, "heads")?.ok_or_else(|| h.err(0, "missing heads="))?;
            if heads == 0 {
                return Err(h.err(0, "heads must be at least 1"));
            }
            let counter = num(h, &args, "counter")?;
            let a = alphabet(&s, k, hl)?;
            let c = common(&s, hl)?;
            let mut m = MultiHeadSdaSpec {
                flavor: flavor(h, &args)?,
                alphabet: a,
                control: c.control,
                input: c.input,
                heads,
                counter,
                delta: BTreeMap::new(),
            };
            for l in &s.delta {
                arity(l, 2 * heads + 6)?;
                arrow(l, heads + 2)?;
                let q = state(l, &m.control, 0)?;
                let read = (0..heads).map(|i| insym(l, &m.input, 1 + i)).collect::<Result<Vec<_>, _>>()?;
                let g = stsym(l, &m.alphabet, heads + 1)?;
                let base = heads + 3;
                let moves = (0..heads).map(|i| dir(l, base + 2 + i)).collect::<Result<Vec<_>, _>>()?;
                let t = MhTrans {
                    next: state(l, &m.control, base)?,
                    write: stsym(l, &m.alphabet, base + 1)?,
                    moves,
                    d_store: dir(l, base + 2 + heads)?,
                };
                if m.delta.insert((q, read, g), t).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::MultiHead(m))
        }
        "pda" => {
            let c = common(&s, hl)?;
            let mut stack = vec![END_NAME.to_string()];
            for z in s.lists.get("stack").map(|v| v.1.clone()).unwrap_or_default() {
                if stack.contains(&z) || z == "-" || z == "eps" {
                    return Err(DslError::Parse { line: s.lists["stack"].0, col: 1, msg: format!("bad stack symbol `{z}`") });
                }
                stack.push(z);
            }
            let mut m = PdaSpec { control: c.control, input: c.input, stack, delta: BTreeMap::new() };
            for l in &s.delta {
                if l.toks.len() < 6 {
                    return Err(l.err(l.toks.len(), "expected `q σ Z -> p W…`"));
                }
                arrow(l, 3)?;
                let q = state(l, &m.control, 0)?;
                let read = if l.toks[1].1 == "eps" { PdaRead::Eps } else { PdaRead::Sym(insym(l, &m.input, 1)?) };
                let top = list_sym(l, &m.stack, 2, "stack")?;
                let next = state(l, &m.control, 4)?;
                let push = if l.toks.len() == 6 && l.toks[5].1 == "-" {
                    Vec::new()
                } else {
                    (5..l.toks.len()).map(|i| list_sym(l, &m.stack, i, "stack")).collect::<Result<Vec<_>, _>>()?
                };
                if m.delta.insert((q, read, top), PdaTrans { next, push }).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::Pda(m))
        }
        "flt" => {
            let space = match args.get("space") {
                None | Some((_, "log")) => FlSpace::Log,
                Some((_, "const")) => FlSpace::Const,
                Some(&(i, _)) => return Err(h.err(i, "space must be log or const")),
            };
            let c = common(&s, hl)?;
            let mut work = vec!["_".to_string()];
            work.extend(s.lists.get("work").map(|v| v.1.clone()).unwrap_or_default());
            let mut output = Vec::new();
            for tok in s.lists.get("output").map(|v| v.1.clone()).unwrap_or_default() {
                let mut it = tok.chars();
                match (it.next(), it.next()) {
                    (Some(ch), None) if ch != '-' => output.push(ch),
                    _ => return Err(DslError::Parse { line: s.lists["output"].0, col: 1, msg: format!("bad output symbol `{tok}`") }),
                }
            }
            let mut m = FlTransducerSpec { control: c.control, input: c.input, work, output, space, delta: BTreeMap::new() };
            for l in &s.delta {
                arity(l, 9)?;
                arrow(l, 3)?;
                let key = (state(l, &m.control, 0)?, insym(l, &m.input, 1)?, list_sym(l, &m.work, 2, "work")?);
                let out = match l.toks[8].1 {
                    "-" => None,
                    o => {
                        let mut it = o.chars();
                        match (it.next(), it.next()) {
                            (Some(ch), None) => Some(ch),
                            _ => return Err(l.err(8, "output must be one character or `-`")),
                        }
                    }
                };
                let t = FlTrans {
                    next: state(l, &m.control, 4)?,
                    work_write: list_sym(l, &m.work, 5, "work")?,
                    d_in: dir(l, 6)?,
                    d_work: dir(l, 7)?,
                    out,
                };
                if m.delta.insert(key, t).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::Flt(m))
        }
        "lda" => {
            let k = num(h, &args, "k")?.ok_or_else(|| h.err(0, "missing k="))?;
            let a = alphabet(&s, k, hl)?;
            let c = common(&s, hl)?;
            for &ch in c.input.chars() {
                if a.sym(&ch.to_string()).is_some() {
                    return Err(DslError::Parse { line: hl, col: 1, msg: format!("`{ch}` is both an input and a storage symbol") });
                }
            }
            let mut m = LdaSpec { alphabet: a, control: c.control, input: c.input, delta: BTreeMap::new() };
            let cell = |l: &Line, m: &LdaSpec, i: usize| -> Result<LdaCell, DslError> {
                let name = l.toks[i].1;
                if let Some(s) = m.input.parse_name(name) {
                    return Ok(if s == LEFT || s == RIGHT { LdaCell::End(s) } else { LdaCell::Input(s) });
                }
                if name == END_NAME {
                    return Ok(LdaCell::End(LEFT));
                }
                m.alphabet.sym(name).map(LdaCell::Store).ok_or_else(|| l.err(i, format!("unknown symbol `{name}`")))
            };
            for l in &s.delta {
                arity(l, 6)?;
                arrow(l, 2)?;
                let q = state(l, &m.control, 0)?;
                let g = cell(l, &m, 1)?;
                let t = LdaTrans { next: state(l, &m.control, 3)?, write: cell(l, &m, 4)?, d: dir(l, 5)? };
                if m.delta.insert((q, g), t).is_some() {
                    return Err(dup(l));
                }
            }
            Ok(Machine::Lda(m))
        }
        other => Err(h.err(0, format!("unknown machine kind `{other}`"))),
    }
}

fn render_control(out: &mut String, c: &Control, input: &InputAlphabet) {
    let _ = writeln!(out, "states: {}", c.names().join(" "));
    let _ = writeln!(out, "initial: {}", c.name(c.q0));
    let _ = writeln!(out, "accept: {}", c.accept_names().join(" "));
    let _ = writeln!(out, "reject: {}", c.reject_names().join(" "));
    let chars: Vec<String> = input.chars().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "input: {}", chars.join(" "));
}

fn render_gamma(out: &mut String, a: &Alphabet) {
    for (i, level) in a.inner_levels().iter().enumerate() {
        let _ = writeln!(out, "gamma[{}]: {}", i + 1, level.join(" "));
    }
}

/// Renders a machine back to DSL text; `parse_dsl(render_dsl(m)) == m`.
pub fn render_dsl(m: &Machine) -> String {
    let mut out = String::new();
    match m {
        Machine::Sda(m) => {
            let _ = writeln!(out, "sda k={} flavor={}", m.k(), m.flavor.name());
            render_control(&mut out, &m.control, &m.input);
            render_gamma(&mut out, &m.alphabet);
            out.push_str("delta:\n");
            for (q, s, g, t) in m.transitions() {
                let _ = writeln!(
                    out,
                    "{} {} {} -> {} {} {} {}",
                    m.control.name(q),
                    m.input.name(s),
                    m.alphabet.name(g),
                    m.control.name(t.next),
                    m.alphabet.name(t.write),
                    dir_name(t.d1),
                    dir_name(t.d2)
                );
            }
        }
        Machine::Aux(m) => {
            let space = match m.space {
                SpaceBound::Log { factor: 1 } => "log".to_string(),
                SpaceBound::Log { factor } => format!("log*{factor}"),
                SpaceBound::Cells(c) => c.to_string(),
                SpaceBound::Unbounded => "unbounded".into(),
            };
            let _ = writeln!(out, "aux k={} flavor={} space={space}", m.alphabet.k(), m.flavor.name());
            render_control(&mut out, &m.control, &m.input);
            render_gamma(&mut out, &m.alphabet);
            let _ = writeln!(out, "aux: {}", m.aux[1..].join(" "));
            out.push_str("delta:\n");
            for (&(q, s, tau, g), t) in &m.delta {
                let _ = writeln!(
                    out,
                    "{} {} {} {} -> {} {} {} {} {} {}",
                    m.control.name(q),
                    m.input.name(s),
                    m.aux[tau],
                    m.alphabet.name(g),
                    m.control.name(t.next),
                    m.aux[t.aux_write],
                    m.alphabet.name(t.write),
                    dir_name(t.d1),
                    dir_name(t.d2),
                    dir_name(t.d3)
                );
            }
        }
        Machine::MultiHead(m) => {
            let _ = write!(out, "mh k={} flavor={} heads={}", m.alphabet.k(), m.flavor.name(), m.heads);
            if let Some(c) = m.counter {
                let _ = write!(out, " counter={c}");
            }
            out.push('\n');
            render_control(&mut out, &m.control, &m.input);
            render_gamma(&mut out, &m.alphabet);
            out.push_str("delta:\n");
            for ((q, read, g), t) in &m.delta {
                let read: Vec<String> = read.iter().map(|&s| m.input.name(s)).collect();
                let moves: Vec<&str> = t.moves.iter().map(|&d| dir_name(d)).collect();
                let _ = writeln!(
                    out,
                    "{} {} {} -> {} {} {} {}",
                    m.control.name(*q),
                    read.join(" "),
                    m.alphabet.name(*g),
                    m.control.name(t.next),
                    m.alphabet.name(t.write),
                    moves.join(" "),
                    dir_name(t.d_store)
                );
            }
        }
        Machine::Pda(m) => {
            out.push_str("pda\n");
            render_control(&mut out, &m.control, &m.input);
            let _ = writeln!(out, "stack: {}", m.stack[1..].join(" "));
            out.push_str("delta:\n");
            for (&(q, read, top), t) in &m.delta {
                let push: Vec<&str> = t.push.iter().map(|&z| m.stack[z].as_str()).collect();
                let _ = writeln!(
                    out,
                    "{} {} {} -> {} {}",
                    m.control.name(q),
                    m.read_name(read),
                    m.stack[top],
                    m.control.name(t.next),
                    if push.is_empty() { "-".to_string() } else { push.join(" ") }
                );
            }
        }
        Machine::Flt(m) => {
            let _ = writeln!(out, "flt space={}", if m.space == FlSpace::Log { "log" } else { "const" });
            render_control(&mut out, &m.control, &m.input);
            let _ = writeln!(out, "work: {}", m.work[1..].join(" "));
            let outs: Vec<String> = m.output.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "output: {}", outs.join(" "));
            out.push_str("delta:\n");
            for (&(q, s, w), t) in &m.delta {
                let _ = writeln!(
                    out,
                    "{} {} {} -> {} {} {} {} {}",
                    m.control.name(q),
                    m.input.name(s),
                    m.work[w],
                    m.control.name(t.next),
                    m.work[t.work_write],
                    dir_name(t.d_in),
                    dir_name(t.d_work),
                    t.out.map(|c| c.to_string()).unwrap_or_else(|| "-".into())
                );
            }
        }
        Machine::Lda(m) => {
            let _ = writeln!(out, "lda k={}", m.k());
            render_control(&mut out, &m.control, &m.input);
            render_gamma(&mut out, &m.alphabet);
            out.push_str("delta:\n");
            for (&(q, g), t) in &m.delta {
                let _ = writeln!(
                    out,
                    "{} {} -> {} {} {}",
                    m.control.name(q),
                    m.cell_name(g),
                    m.control.name(t.next),
                    m.cell_name(t.write),
                    dir_name(t.d)
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "# tiny
sda k=2 flavor=susceptible
states: s acc
accept: acc
input: a
gamma[1]: m
delta:
s > > -> s > S R
s > BOX -> s BOX R S
s a BOX -> s m R R
s < BOX -> acc BOX S S
";

    #[test]
    fn parse_render_round_trip() {
        let m = parse_dsl(TINY).unwrap();
        let text = render_dsl(&m);
        assert_eq!(parse_dsl(&text).unwrap(), m);
        let sda = m.into_sda().unwrap();
        assert_eq!(sda.transition_count(), 4);
        assert_eq!(sda.k(), 2);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let bad = TINY.replace("s a BOX -> s m R R", "s a BOX -> s m R X");
        match parse_dsl(&bad) {
            Err(DslError::Parse { line, col, .. }) => assert_eq!((line, col), (10, 18)),
            other => panic!("{other:?}"),
        }
        let unknown = TINY.replace("s a BOX -> s m R R", "s a BOX -> t m R R");
        assert!(matches!(parse_dsl(&unknown), Err(DslError::Parse { line: 10, col: 12, .. })));
    }

    #[test]
    fn validation_failures_surface() {
        // leaving a fresh cell to the left is a turn: level 1 is wrong
        let bad = TINY.replace("s a BOX -> s m R R", "s a BOX -> s m R L");
        match load(&bad) {
            Err(DslError::Invalid(r)) => assert!(r.has(ViolationKind::DepthMismatchOnTurn)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_delta_rejects_everything() {
        let text = "sda k=2\nstates: s\ninput: a\ndelta:\n";
        let m = load(text).unwrap().into_sda().unwrap();
        assert_eq!(crate::engine::verdict(&m, "aa").unwrap(), crate::engine::Verdict::Reject);
    }
}
