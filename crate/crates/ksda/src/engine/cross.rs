use super::{run, run_multihead, EngineError, RunOptions, Verdict};
use crate::model::{MultiHeadSdaSpec, SdaSpec};
use crate::par::{self, Exec};

/// Anything that decides membership of an input string.
pub trait Recognizer: Sync {
    fn recognize(&self, x: &str) -> Result<Verdict, EngineError>;
}

impl Recognizer for SdaSpec {
    fn recognize(&self, x: &str) -> Result<Verdict, EngineError> {
        Ok(run(self, x, &RunOptions::default())?.outcome.verdict)
    }
}

impl Recognizer for MultiHeadSdaSpec {
    fn recognize(&self, x: &str) -> Result<Verdict, EngineError> {
        Ok(run_multihead(self, x, &RunOptions::default())?.outcome.verdict)
    }
}

impl<F> Recognizer for F
where
    F: Fn(&str) -> Result<Verdict, EngineError> + Sync,
{
    fn recognize(&self, x: &str) -> Result<Verdict, EngineError> {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub checked: usize,
    /// Inputs where either side hit its step limit.
    pub inconclusive: Vec<String>,
    /// First disagreement in length-lexicographic order.
    pub disagreement: Option<(String, Verdict, Verdict)>,
}

impl EquivalenceReport {
    pub fn equivalent(&self) -> bool {
        self.disagreement.is_none() && self.inconclusive.is_empty()
    }
}

/// All strings over `sigma` of length at most `max_len`, in
/// length-lexicographic order.
pub fn all_strings(sigma: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * sigma.len());
        for w in &layer {
            for &c in sigma {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Runs both recognizers on every string of `Σ^{≤ max_len}`.
pub fn cross_check(a: &dyn Recognizer, b: &dyn Recognizer, sigma: &[char], max_len: usize) -> Result<EquivalenceReport, EngineError> {
    cross_check_with(Exec::default(), a, b, sigma, max_len)
}

pub fn cross_check_with(
    exec: Exec,
    a: &dyn Recognizer,
    b: &dyn Recognizer,
    sigma: &[char],
    max_len: usize,
) -> Result<EquivalenceReport, EngineError> {
    let inputs = all_strings(sigma, max_len);
    let results = par::map(exec, &inputs, |x| Ok::<_, EngineError>((a.recognize(x)?, b.recognize(x)?)));
    let mut report = EquivalenceReport { checked: inputs.len(), inconclusive: Vec::new(), disagreement: None };
    for (x, r) in inputs.iter().zip(results) {
        let (va, vb) = r?;
        if va == Verdict::StepLimit || vb == Verdict::StepLimit {
            report.inconclusive.push(x.clone());
        } else if va != vb && report.disagreement.is_none() {
            report.disagreement = Some((x.clone(), va, vb));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_strings(&['a', 'b'], 3).len(), 15);
        assert_eq!(all_strings(&['a', 'b', 'c'], 12).len(), 797_161);
        assert_eq!(all_strings(&['x'], 0), vec![String::new()]);
        assert_eq!(&all_strings(&['a', 'b'], 2)[..4], ["", "a", "b", "aa"]);
    }

    #[test]
    fn closures_cross_check() {
        let even = |x: &str| Ok(if x.len() % 2 == 0 { Verdict::Accept } else { Verdict::Reject });
        let also_even = |x: &str| Ok(if x.chars().count() % 2 == 0 { Verdict::Accept } else { Verdict::Reject });
        let never = |_: &str| Ok(Verdict::Reject);
        assert!(cross_check(&even, &also_even, &['a', 'b'], 6).unwrap().equivalent());
        let r = cross_check(&even, &never, &['a'], 3).unwrap();
        assert_eq!(r.disagreement, Some((String::new(), Verdict::Accept, Verdict::Reject)));
    }
}
