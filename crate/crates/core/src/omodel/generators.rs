use std::collections::BTreeMap;

use super::model::{FiniteDistribution, OntModel, ResponseFunction, ResponseOutcome};
use crate::qcore::{born_distribution, Experiment, Fragment, PureState};
use crate::{Error, Result};

/// The reference ψ-ontic model: one ontic state per preparation (in name
/// order), point-mass preparations, Born probabilities as responses.
pub fn canonical_psi_ontic(f: &Fragment) -> Result<OntModel> {
    let n = f.preparations().len();
    if n == 0 {
        return Err(Error::Input("fragment has no preparations".into()));
    }
    let mut m = OntModel::new(n);
    for (i, name) in f.preparations().keys().enumerate() {
        m.preparations.insert(name.clone(), FiniteDistribution::point(n, i));
    }
    for (ename, e) in f.experiments() {
        let mut table = vec![vec![0.0; n]; e.outcomes().len()];
        for (i, s) in f.preparations().values().enumerate() {
            let born = born_distribution(s, e)?;
            let total: f64 = born.iter().sum();
            for (k, p) in born.iter().enumerate() {
                table[k][i] = p / total;
            }
        }
        let outs = e
            .labels()
            .zip(table)
            .map(|(l, v)| ResponseOutcome {
                label: l.to_string(),
                response: ResponseFunction(v),
            })
            .collect();
        m.experiments.insert(ename.clone(), outs);
    }
    Ok(m)
}

/// `n` deterministic, nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(n: [f64; 3]) -> Result<[f64; 3]> {
    let r = dot(&n, &n).sqrt();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Input("measurement direction must be a nonzero vector".into()));
    }
    Ok([n[0] / r, n[1] / r, n[2] / r])
}

/// A discretized hemisphere model of qubit preparations and projective
/// measurements.
///
/// Λ is a Fibonacci sample of `resolution` points. A state with Bloch vector
/// `n` gets weight proportional to `max(0, n·λ)`; the `+` outcome of a
/// measurement along `m` fires exactly on the closed hemisphere `m·λ ≥ 0`.
/// Experiments are named `m0`, `m1`, ... in net order.
pub fn discretized_qubit_model(
    resolution: usize,
    measurement_net: &[[f64; 3]],
    preparations: &[(String, PureState)],
) -> Result<(OntModel, Fragment)> {
    if resolution < 1000 {
        return Err(Error::Input(format!("resolution {resolution} below 1000")));
    }
    let points = fibonacci_sphere(resolution);
    let mut model = OntModel::new(resolution);
    let mut preps = BTreeMap::new();
    for (name, state) in preparations {
        let n = state.bloch()?;
        let w: Vec<f64> = points.iter().map(|l| dot(&n, l).max(0.0)).collect();
        let total: f64 = w.iter().sum();
        model
            .preparations
            .insert(name.clone(), FiniteDistribution(w.into_iter().map(|x| x / total).collect()));
        preps.insert(name.clone(), state.clone());
    }
    let mut exps = BTreeMap::new();
    for (i, dir) in measurement_net.iter().enumerate() {
        let d = unit(*dir)?;
        let up: Vec<f64> = points
            .iter()
            .map(|l| if dot(&d, l) >= 0.0 { 1.0 } else { 0.0 })
            .collect();
        let down = up.iter().map(|v| 1.0 - v).collect();
        let name = format!("m{i}");
        model.experiments.insert(
            name.clone(),
            vec![
                ResponseOutcome { label: "+".into(), response: ResponseFunction(up) },
                ResponseOutcome { label: "-".into(), response: ResponseFunction(down) },
            ],
        );
        let plus = PureState::from_bloch(d)?;
        let minus = PureState::from_bloch([-d[0], -d[1], -d[2]])?;
        exps.insert(name, Experiment::projective(&[plus, minus], ["+", "-"])?);
    }
    let fragment = Fragment::new(2, preps, exps)?;
    Ok((model, fragment))
}
