//! Fixture machines, shipped as DSL files under `fixtures/`.

use crate::dsl::{load, Machine};
use crate::model::{AuxSdaSpec, FlTransducerSpec, LdaSpec, MultiHeadSdaSpec, PdaSpec, SdaSpec};

/// A named fixture and a membership oracle for its language.
#[derive(Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub text: &'static str,
    pub about: &'static str,
    /// Membership in the documented language; `None` for transducers.
    pub language: Option<fn(&str) -> bool>,
}

impl Fixture {
    pub fn machine(&self) -> Machine {
        load(self.text).unwrap_or_else(|e| panic!("fixture {}: {e}", self.name))
    }

    pub fn pda(&self) -> PdaSpec {
        match self.machine() {
            Machine::Pda(p) => p,
            _ => panic!("fixture {} is not a pda", self.name),
        }
    }

    pub fn sda(&self) -> SdaSpec {
        self.machine().into_sda().unwrap_or_else(|| panic!("fixture {} is not an sda", self.name))
    }

    pub fn flt(&self) -> FlTransducerSpec {
        match self.machine() {
            Machine::Flt(m) => m,
            _ => panic!("fixture {} is not a transducer", self.name),
        }
    }

    pub fn lda(&self) -> LdaSpec {
        match self.machine() {
            Machine::Lda(m) => m,
            _ => panic!("fixture {} is not an lda", self.name),
        }
    }

    pub fn aux(&self) -> AuxSdaSpec {
        match self.machine() {
            Machine::Aux(m) => m,
            _ => panic!("fixture {} is not an aux-sda", self.name),
        }
    }

    pub fn multihead(&self) -> MultiHeadSdaSpec {
        match self.machine() {
            Machine::MultiHead(m) => m,
            _ => panic!("fixture {} is not a multi-head sda", self.name),
        }
    }
}

macro_rules! fixture {
    ($name:literal, $file:literal, $about:literal, $lang:expr) => {
        Fixture { name: $name, file: $file, text: include_str!(concat!("../fixtures/", $file)), about: $about, language: $lang }
    };
}

/// `x = a^i b^j c^l`, as `(i, j, l)`.
fn abc_blocks(x: &str) -> Option<(usize, usize, usize)> {
    let i = x.chars().take_while(|&c| c == 'a').count();
    let j = x[i..].chars().take_while(|&c| c == 'b').count();
    let l = x[i + j..].chars().take_while(|&c| c == 'c').count();
    (i + j + l == x.len()).then_some((i, j, l))
}

pub fn in_labc(x: &str) -> bool {
    matches!(abc_blocks(x), Some((i, j, l)) if i == j && l == 2 * i)
}

pub fn in_anbncn(x: &str) -> bool {
    matches!(abc_blocks(x), Some((i, j, l)) if i == j && j == l)
}

pub fn in_anbn(x: &str) -> bool {
    let i = x.chars().take_while(|&c| c == 'a').count();
    let rest = &x[i..];
    rest.len() == i && rest.chars().all(|c| c == 'b')
}

pub fn in_even(x: &str) -> bool {
    x.chars().count() % 2 == 0
}

pub fn in_zigzag(x: &str) -> bool {
    x.chars().step_by(2).filter(|&c| c == 'a').count() % 2 == 0
}

pub fn in_balanced(x: &str) -> bool {
    let mut h = 0i64;
    for c in x.chars() {
        h += if c == '(' { 1 } else { -1 };
        if h < 0 {
            return false;
        }
    }
    h == 0
}

pub fn in_eps(x: &str) -> bool {
    x.is_empty()
}

pub fn in_all(_: &str) -> bool {
    true
}

pub fn in_last_a(x: &str) -> bool {
    x.ends_with('a')
}

pub fn in_unary_ww(x: &str) -> bool {
    x.chars().all(|c| c == 'a') && x.len() % 4 == 0
}

pub fn in_bin_even(x: &str) -> bool {
    x.starts_with('1') && x.ends_with('0')
}

/// `a^m` with `m ≥ 3`; shorter inputs run the counter head off the tape.
pub fn in_counter3(x: &str) -> bool {
    x.len() >= 3
}

/// Every fixture.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        fixture!("labc", "labc.sda", "susceptible 4-sda for {a^n b^n c^2n}", Some(in_labc)),
        fixture!("labc_immune", "labc_immune.sda", "immune 4-sda for {a^n b^n c^2n}", Some(in_labc)),
        fixture!("labc_wrong", "labc_wrong.sda", "susceptible 4-sda for {a^n b^n c^n}", Some(in_anbncn)),
        fixture!("anbn", "anbn.sda", "susceptible 2-sda for {a^n b^n}", Some(in_anbn)),
        fixture!("even", "even.sda", "susceptible 2-sda for even-length strings", Some(in_even)),
        fixture!("empty", "empty.sda", "2-sda for the empty language", Some(|_| false)),
        fixture!("zigzag", "zigzag.sda", "immune 3-sda, even number of a's at odd positions", Some(in_zigzag)),
        fixture!("parens", "parens.pda", "pda for balanced parentheses", Some(in_balanced)),
        fixture!("epsonly", "epsonly.pda", "pda for {ε}", Some(in_eps)),
        fixture!("anbn_pda", "anbn.pda", "pda for {a^n b^n}", Some(in_anbn)),
        fixture!("epsloop", "epsloop.pda", "pda that never halts", None),
        fixture!("unary_ww", "unary_ww.sda", "susceptible 2-sda for (aa)(aa) blocks, a^m with 4 | m", Some(in_unary_ww)),
        fixture!("bin_even", "bin_even.sda", "susceptible 2-sda for binary strings starting with 1 and ending with 0", Some(in_bin_even)),
        fixture!("comparator", "comparator.mh", "immune 2-head 2-sda for {a^n b^n}", Some(in_anbn)),
        fixture!("counter3", "counter3.mh", "2-head 2-sda whose counter head measures 3 cells", Some(in_counter3)),
        fixture!("logbits", "logbits.aux", "aux-2-sda counting |x|-1 in binary on the auxiliary tape", Some(in_all)),
        fixture!("last_a", "last_a.lda", "1-lda for strings ending in a", Some(in_last_a)),
        fixture!("sigma_star", "sigma_star.lda", "1-lda for every string", Some(in_all)),
        fixture!("anbn_lda", "anbn.lda", "2-lda for {a^n b^n}", Some(in_anbn)),
        fixture!("identity", "identity.flt", "transducer x -> x", None),
        fixture!("duplicate", "duplicate.flt", "transducer x -> xx", None),
        fixture!("binlen", "binlen.flt", "transducer x -> |x| in binary", None),
        fixture!("const_eps", "const_eps.flt", "transducer x -> empty string", None),
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

/// Runs any fixture with a language on `x`.
pub fn recognize(m: &Machine, x: &str) -> Result<Option<crate::engine::Verdict>, crate::engine::EngineError> {
    use crate::engine::{run, run_aux, run_multihead, RunOptions};
    let o = RunOptions::default();
    Ok(Some(match m {
        Machine::Sda(m) => run(m, x, &o)?.outcome.verdict,
        Machine::Pda(p) => crate::dcfl::run_pda(p, x, None)?.verdict,
        Machine::Aux(m) => run_aux(m, x, &o)?.0.outcome.verdict,
        Machine::MultiHead(m) => match run_multihead(m, x, &o) {
            Ok(r) => r.outcome.verdict,
            // a head that falls off the tape
            Err(crate::engine::EngineError::InputOverrun { .. }) => crate::engine::Verdict::Reject,
            Err(e) => return Err(e),
        },
        Machine::Lda(m) => crate::transforms::run_lda(m, x, None)?.0,
        Machine::Flt(_) => return Ok(None),
    }))
}

/// Input alphabet of any machine.
pub fn sigma(m: &Machine) -> Vec<char> {
    match m {
        Machine::Sda(m) => m.input.chars().to_vec(),
        Machine::Pda(m) => m.input.chars().to_vec(),
        Machine::Aux(m) => m.input.chars().to_vec(),
        Machine::MultiHead(m) => m.input.chars().to_vec(),
        Machine::Flt(m) => m.input.chars().to_vec(),
        Machine::Lda(m) => m.input.chars().to_vec(),
    }
}

/// The k-sda fixtures of one flavor, by name.
pub fn sda_fixtures(flavor: crate::model::Flavor) -> Vec<(&'static str, SdaSpec)> {
    fixtures()
        .into_iter()
        .filter_map(|f| match f.machine() {
            Machine::Sda(m) if m.flavor == flavor => Some((f.name, m)),
            _ => None,
        })
        .collect()
}
