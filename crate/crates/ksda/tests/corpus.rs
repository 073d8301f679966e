//! Catalog checks: every fixture validates, matches its language and
//! survives a DSL round trip.

use ksda::corpus::{fixtures, recognize, sigma};
use ksda::dsl::{parse_dsl, render_dsl};
use ksda::engine::{all_strings, Verdict};
use ksda::par::{self, Exec};

#[test]
fn every_fixture_validates() {
    for f in fixtures() {
        let r = f.machine().validate();
        assert!(r.is_ok(), "{}:\n{r}", f.name);
    }
}

#[test]
fn languages_up_to_length_ten() {
    for f in fixtures() {
        let Some(lang) = f.language else { continue };
        let m = f.machine();
        let inputs = all_strings(&sigma(&m), 10);
        let bad = par::map(Exec::default(), &inputs, |x| {
            let v = recognize(&m, x).unwrap().unwrap();
            ((v == Verdict::Accept) != lang(x)).then(|| x.clone())
        });
        let bad: Vec<String> = bad.into_iter().flatten().collect();
        assert!(bad.is_empty(), "{} disagrees on {:?}", f.name, &bad[..bad.len().min(5)]);
    }
}

#[test]
fn render_then_parse_is_identity() {
    for f in fixtures() {
        let m = f.machine();
        let text = render_dsl(&m);
        assert_eq!(parse_dsl(&text).unwrap(), m, "{}", f.name);
    }
}

#[test]
fn epsloop_hits_its_limit() {
    let p = ksda::corpus::fixture("epsloop").unwrap().pda();
    let r = ksda::dcfl::run_pda(&p, "", Some(1000)).unwrap();
    assert_eq!(r.verdict, Verdict::StepLimit);
}
