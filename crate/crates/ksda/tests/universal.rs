use ksda::corpus;
use ksda::encoding::encode;
use ksda::engine::{all_strings, verdict};
use ksda::model::Flavor;
use ksda::universal::{universal_run, UniversalOptions};

#[test]
fn lockstep_on_every_susceptible_fixture() {
    let opts = UniversalOptions { lockstep: true, ..Default::default() };
    for (name, m) in corpus::sda_fixtures(Flavor::Susceptible) {
        let t = std::time::Instant::now();
        let mut steps = 0;
        for x in all_strings(m.input.chars(), 6) {
            let e = encode(&m, &x).unwrap();
            let r = universal_run(&e, &opts).unwrap_or_else(|err| panic!("{name} on {x:?}: {err}"));
            assert_eq!(r.verdict, verdict(&m, &x).unwrap(), "{name} on {x:?}");
            steps += r.steps;
        }
        eprintln!("{name}: {steps} primitive steps in {:?}", t.elapsed());
    }
}
