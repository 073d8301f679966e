//! Random validated k-sda generator shared by the integration tests.
#![allow(dead_code)]

use ksda::model::validate::expected_depth;
use ksda::model::{Alphabet, Control, Flavor, InputAlphabet, SdaSpec, Sym, Trans, Validate, BLANK, BOX, END, RIGHT};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random spec over {a, b} that passes validation. Every level has one or
/// two symbols; roughly one entry in eight is left undefined.
pub fn random_spec(r: &mut impl Rng, k: usize, flavor: Flavor) -> SdaSpec {
    let inner: Vec<Vec<String>> = (1..k).map(|e| names(&format!("g{e}_"), r.gen_range(1..=2))).collect();
    let alphabet = Alphabet::new(k, &inner).unwrap();
    let live = r.gen_range(1..=3);
    let mut states = names("q", live);
    states.push("acc".into());
    states.push("rej".into());
    let control = Control::new(&states, "q0", &["acc".into()], &["rej".into()]).unwrap();
    let input = InputAlphabet::new(&['a', 'b']).unwrap();
    let mut m = SdaSpec::new(flavor, alphabet, control, input);
    let a = m.alphabet.clone();
    let syms: Vec<Sym> = a.symbols().collect();
    let pick_level = |r: &mut dyn rand::RngCore, e: usize| -> Sym {
        if e >= k {
            BLANK
        } else {
            *a.level(e).choose(r).unwrap()
        }
    };
    for q in 0..live {
        for s in 0..m.input.len() {
            for &g in &syms {
                if r.gen_ratio(1, 8) {
                    continue;
                }
                let d2: i8 = if g == END { r.gen_range(0..=1) } else { r.gen_range(-1..=1) };
                let write = if g == END || g == BLANK || d2 == 0 {
                    g
                } else {
                    pick_level(r, expected_depth(a.dv(g), k, d2))
                };
                let near_frozen = a.dv(g) + 1 >= k;
                let mut d1: i8 = r.gen_range(0..=1);
                if s == RIGHT || (flavor == Flavor::Susceptible && near_frozen) {
                    d1 = 0;
                }
                let next = if flavor == Flavor::Susceptible && g == BLANK {
                    q
                } else if r.gen_ratio(1, 5) {
                    live + r.gen_range(0..2)
                } else {
                    r.gen_range(0..live)
                };
                m.insert(q, s, g, Trans { next, write, d1, d2 });
            }
        }
    }
    debug_assert!(syms.contains(&BOX));
    let report = m.validate();
    assert!(report.is_ok(), "generator produced an invalid spec:\n{report}");
    m
}

/// `count` specs cycling through k = 2, 3, 4 and alternating flavors.
pub fn random_specs(seed: u64, count: usize) -> Vec<SdaSpec> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let flavor = if i % 2 == 0 { Flavor::Susceptible } else { Flavor::Immune };
            random_spec(&mut r, 2 + (i / 2) % 3, flavor)
        })
        .collect()
}
