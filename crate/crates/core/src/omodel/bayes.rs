use std::collections::BTreeMap;

use crate::{Error, Result};

type Conditionals = BTreeMap<(String, String), f64>;

fn likelihood(conditionals: &Conditionals, prep: &str, observed: &str) -> Result<f64> {
    conditionals
        .get(&(prep.to_string(), observed.to_string()))
        .copied()
        .ok_or_else(|| Error::Input(format!("no conditional for ({prep}, {observed})")))
}

fn check_inputs(prior: &BTreeMap<String, f64>, conditionals: &Conditionals) -> Result<()> {
    if prior.values().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Input("prior weights must be finite and nonnegative".into()));
    }
    for prep in prior.keys() {
        let row: Vec<f64> = conditionals
            .iter()
            .filter(|((p, _), _)| p == prep)
            .map(|(_, &v)| v)
            .collect();
        if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Input(format!("conditionals of `{prep}` outside [0, 1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::Input(format!("conditionals of `{prep}` sum to {s}")));
        }
    }
    Ok(())
}

/// Posterior over preparations after observing `observed`.
///
/// The prior only needs to be nonnegative with positive mass; it is
/// normalized here, so rescaling it leaves the posterior unchanged.
pub fn bayes_posterior(
    prior: &BTreeMap<String, f64>,
    conditionals: &Conditionals,
    observed: &str,
) -> Result<BTreeMap<String, f64>> {
    check_inputs(prior, conditionals)?;
    let mut joint = BTreeMap::new();
    for (prep, &w) in prior {
        joint.insert(prep.clone(), w * likelihood(conditionals, prep, observed)?);
    }
    let total: f64 = joint.values().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroEvidence(observed.to_string()));
    }
    Ok(joint.into_iter().map(|(k, v)| (k, v / total)).collect())
}

/// `Cr(num|observed) / Cr(den|observed)` as likelihood ratio times prior ratio.
pub fn posterior_ratio(
    prior: &BTreeMap<String, f64>,
    conditionals: &Conditionals,
    observed: &str,
    num: &str,
    den: &str,
) -> Result<f64> {
    check_inputs(prior, conditionals)?;
    let pw = |k: &str| {
        prior
            .get(k)
            .copied()
            .ok_or_else(|| Error::UnknownPreparation(k.to_string()))
    };
    let lr = likelihood(conditionals, num, observed)? / likelihood(conditionals, den, observed)?;
    Ok(lr * (pw(num)? / pw(den)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> (BTreeMap<String, f64>, Conditionals) {
        let prior = [("P0".to_string(), 0.5), ("P1".to_string(), 0.5)].into();
        let c = [
            (("P0".to_string(), "H".to_string()), 0.5),
            (("P0".to_string(), "T".to_string()), 0.5),
            (("P1".to_string(), "H".to_string()), 2.0 / 3.0),
            (("P1".to_string(), "T".to_string()), 1.0 / 3.0),
        ]
        .into();
        (prior, c)
    }

    #[test]
    fn coin_heads_and_tails() {
        let (prior, c) = coin();
        let h = bayes_posterior(&prior, &c, "H").unwrap();
        assert!((h["P1"] / h["P0"] - 4.0 / 3.0).abs() < 1e-15);
        let t = bayes_posterior(&prior, &c, "T").unwrap();
        assert!((t["P1"] / t["P0"] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(posterior_ratio(&prior, &c, "H", "P1", "P0").unwrap(), 4.0 / 3.0);
        assert_eq!(posterior_ratio(&prior, &c, "T", "P1", "P0").unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn ratio_scales_with_prior_ratio() {
        let (_, c) = coin();
        let prior = [("P0".to_string(), 0.8), ("P1".to_string(), 0.2)].into();
        let h = bayes_posterior(&prior, &c, "H").unwrap();
        assert!((h["P1"] / h["P0"] - 4.0 / 3.0 * 0.25).abs() < 1e-15);
        let scaled: BTreeMap<String, f64> = [("P0".to_string(), 8.0), ("P1".to_string(), 2.0)].into();
        let h2 = bayes_posterior(&scaled, &c, "H").unwrap();
        for k in ["P0", "P1"] {
            assert!((h[k] - h2[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn uninformative_outcome_keeps_prior() {
        let prior: BTreeMap<String, f64> = [("a".to_string(), 0.3), ("b".to_string(), 0.7)].into();
        let c = [
            (("a".to_string(), "x".to_string()), 0.4),
            (("a".to_string(), "y".to_string()), 0.6),
            (("b".to_string(), "x".to_string()), 0.4),
            (("b".to_string(), "y".to_string()), 0.6),
        ]
        .into();
        let post = bayes_posterior(&prior, &c, "x").unwrap();
        assert!((post["a"] - 0.3).abs() < 1e-15 && (post["b"] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let prior: BTreeMap<String, f64> = [("a".to_string(), 1.0)].into();
        let c = [
            (("a".to_string(), "x".to_string()), 0.0),
            (("a".to_string(), "y".to_string()), 1.0),
        ]
        .into();
        assert!(matches!(bayes_posterior(&prior, &c, "x"), Err(Error::ZeroEvidence(_))));
    }
}
