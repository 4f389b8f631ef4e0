use super::model::{predicted_distribution, FiniteDistribution, OntModel};
use crate::{Error, Result, Tolerances};

fn check_len(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// Statistical (total variation) distance `sup_A |P(A) − Q(A)|`.
///
/// On a finite space the supremum is attained at `A = {λ : p > q}`, giving
/// `½ Σ |p − q|`.
pub fn tv_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    check_len(p, q)?;
    let s: f64 = p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

/// Classical overlap `1 − δ(P, Q)`.
pub fn classical_overlap(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    Ok(1.0 - tv_distance(p, q)?)
}

/// Indices carrying more than the support tolerance.
pub fn support(p: &FiniteDistribution) -> Vec<usize> {
    let t = Tolerances::DEFAULT.support;
    p.0.iter()
        .enumerate()
        .filter(|(_, &w)| w > t)
        .map(|(i, _)| i)
        .collect()
}

/// True iff the supports are disjoint.
pub fn ontologically_distinct(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<bool> {
    check_len(p, q)?;
    let t = Tolerances::DEFAULT.support;
    Ok(!p.0.iter().zip(&q.0).any(|(&a, &b)| a > t && b > t))
}

/// Fragment-relative distinguishability: the largest gap, over the model's
/// declared experiments, between the probabilities the two preparations give
/// to an outcome event (a coarse-graining of the declared outcomes).
pub fn model_distinguishability(m: &OntModel, prep1: &str, prep2: &str) -> Result<f64> {
    m.preparation(prep1)?;
    m.preparation(prep2)?;
    let mut best = 0.0f64;
    for name in m.experiments.keys() {
        let a = predicted_distribution(m, prep1, name)?;
        let b = predicted_distribution(m, prep2, name)?;
        let gap: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).max(0.0)).sum();
        let gap_rev: f64 = a.iter().zip(&b).map(|(x, y)| (y - x).max(0.0)).sum();
        best = best.max(gap).max(gap_rev);
    }
    Ok(best.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omodel::{ResponseFunction, ResponseOutcome};
    use proptest::prelude::*;

    fn d(v: &[f64]) -> FiniteDistribution {
        FiniteDistribution(v.to_vec())
    }

    #[test]
    fn coin_distributions() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[2.0 / 3.0, 1.0 / 3.0]);
        assert!((tv_distance(&p, &q).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((classical_overlap(&p, &q).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!(!ontologically_distinct(&p, &q).unwrap());
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(classical_overlap(&p, &p).unwrap(), 1.0);
        let (a, b) = (d(&[1.0, 0.0]), d(&[0.0, 1.0]));
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(classical_overlap(&a, &b).unwrap(), 0.0);
        assert!(ontologically_distinct(&a, &b).unwrap());
        assert!(tv_distance(&a, &d(&[1.0])).is_err());
    }

    #[test]
    fn trivial_experiment_cannot_distinguish() {
        let mut m = OntModel::new(3);
        m.preparations.insert("a".into(), d(&[1.0, 0.0, 0.0]));
        m.preparations.insert("b".into(), d(&[0.0, 0.5, 0.5]));
        m.experiments.insert(
            "t".into(),
            vec![
                ResponseOutcome { label: "x".into(), response: ResponseFunction::constant(3, 1.0) },
                ResponseOutcome { label: "y".into(), response: ResponseFunction::constant(3, 0.0) },
            ],
        );
        assert_eq!(model_distinguishability(&m, "a", "b").unwrap(), 0.0);
        assert_eq!(tv_distance(&m.preparations["a"], &m.preparations["b"]).unwrap(), 1.0);
    }

    fn dist(n: usize) -> impl Strategy<Value = FiniteDistribution> {
        proptest::collection::vec(0.0f64..1.0, n).prop_filter_map("zero", |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-6).then(|| FiniteDistribution(v.iter().map(|x| x / s).collect()))
        })
    }

    proptest! {
        #[test]
        fn tv_is_a_metric((p, q, r) in (1usize..8).prop_flat_map(|n| (dist(n), dist(n), dist(n)))) {
            let pq = tv_distance(&p, &q).unwrap();
            prop_assert!((pq - tv_distance(&q, &p).unwrap()).abs() < 1e-15);
            prop_assert!(pq <= tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap() + 1e-12);
            let min_sum: f64 = p.0.iter().zip(&q.0).map(|(a, b)| a.min(*b)).sum();
            prop_assert!((classical_overlap(&p, &q).unwrap() - min_sum).abs() < 1e-12);
            prop_assert_eq!(classical_overlap(&p, &q).unwrap() + pq, 1.0);
        }

        #[test]
        fn distinctness_iff_full_distance((p, q) in (1usize..8).prop_flat_map(|n| (dist(n), dist(n)))) {
            if ontologically_distinct(&p, &q).unwrap() {
                prop_assert!((tv_distance(&p, &q).unwrap() - 1.0).abs() < 1e-9);
            }
            if tv_distance(&p, &q).unwrap() < 1.0 - 1e-9 {
                prop_assert!(!ontologically_distinct(&p, &q).unwrap());
            }
        }
    }
}
