//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use ontic::omodel::{FiniteDistribution, OntModel, ResponseFunction, ResponseOutcome};
use ontic::pucthm::{JointScenario, ProductJointScenario, KEYS};
use ontic::qcore::PureState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random normalized weights, each entry zeroed with probability `sparsity`.
pub fn random_dist(rng: &mut ChaCha8Rng, n: usize, sparsity: f64) -> FiniteDistribution {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(sparsity) { 0.0 } else { rng.random::<f64>() })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 1e-3 {
            return FiniteDistribution(w.into_iter().map(|x| x / s).collect());
        }
    }
}

/// Random response functions for `k` outcomes on `n` ontic states.
pub fn random_responses(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<ResponseOutcome> {
    random_responses_with(rng, n, k, 0.3)
}

pub fn random_responses_with(rng: &mut ChaCha8Rng, n: usize, k: usize, sparsity: f64) -> Vec<ResponseOutcome> {
    let cols: Vec<FiniteDistribution> = (0..n).map(|_| random_dist(rng, k, sparsity)).collect();
    (0..k)
        .map(|o| ResponseOutcome {
            label: format!("o{o}"),
            response: ResponseFunction(cols.iter().map(|c| c.0[o]).collect()),
        })
        .collect()
}

pub fn random_model(rng: &mut ChaCha8Rng) -> OntModel {
    let n = rng.random_range(1..=10);
    let mut m = OntModel::new(n);
    for p in 0..rng.random_range(2..=4) {
        m.preparations.insert(format!("p{p}"), random_dist(rng, n, 0.4));
    }
    for e in 0..rng.random_range(1..=3) {
        let k = rng.random_range(2..=4);
        m.experiments.insert(format!("e{e}"), random_responses(rng, n, k));
    }
    m
}

/// Product scenario from random local distributions on each side.
pub fn random_product_scenario(rng: &mut ChaCha8Rng) -> ProductJointScenario {
    let na = rng.random_range(1..=4);
    let nb = rng.random_range(1..=4);
    let a = [random_dist(rng, na, 0.3), random_dist(rng, na, 0.3)];
    let b = [random_dist(rng, nb, 0.3), random_dist(rng, nb, 0.3)];
    ProductJointScenario::from_locals([&a[0], &a[1]], [&b[0], &b[1]], BTreeMap::new()).unwrap()
}

/// Joint scenario whose four distributions live on disjoint random blocks.
pub fn random_disjoint_scenario(rng: &mut ChaCha8Rng) -> JointScenario {
    let sizes: Vec<usize> = (0..4).map(|_| rng.random_range(1..=3)).collect();
    let n: usize = sizes.iter().sum::<usize>() + rng.random_range(0..=2);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut m = OntModel::new(n);
    let mut next = 0;
    for (k, &size) in KEYS.iter().zip(&sizes) {
        let local = random_dist(rng, size, 0.0);
        let mut w = vec![0.0; n];
        for (j, &x) in local.0.iter().enumerate() {
            w[order[next + j]] = x;
        }
        next += size;
        m.preparations.insert(k.to_string(), FiniteDistribution(w));
    }
    JointScenario::new(m).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    PureState::normalized(amps).unwrap()
}

/// `(1/π) ∫ min(max(0, a·λ), max(0, b·λ)) dΩ` by midpoint quadrature on a
/// `k x 2k` polar grid: the overlap of two hemisphere-cosine densities.
pub fn sphere_overlap(a: [f64; 3], b: [f64; 3], k: usize) -> f64 {
    let h = std::f64::consts::PI / k as f64;
    let mut total = 0.0;
    for i in 0..k {
        let t = (i as f64 + 0.5) * h;
        let (st, ct) = t.sin_cos();
        for j in 0..2 * k {
            let p = (j as f64 + 0.5) * h;
            let l = [st * p.cos(), st * p.sin(), ct];
            let da = (a[0] * l[0] + a[1] * l[1] + a[2] * l[2]).max(0.0);
            let db = (b[0] * l[0] + b[1] * l[1] + b[2] * l[2]).max(0.0);
            total += da.min(db) * st;
        }
    }
    total * h * h / std::f64::consts::PI
}

/// `Σ min(p, q)`, written out independently of the library.
pub fn min_sum(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a.min(*b)).sum()
}

/// One malformed input: file name, CLI arguments after the binary name
/// (`{}` stands for the file path, `{dir}` for the output directory) and
/// its bytes, `None` for a file that does not exist.
pub struct Malformed {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub bytes: Option<Vec<u8>>,
}

fn edit(v: &serde_json::Value, f: impl FnOnce(&mut serde_json::Value)) -> Vec<u8> {
    let mut v = v.clone();
    f(&mut v);
    serde_json::to_vec(&v).unwrap()
}

/// Inputs that every loader must reject as input errors (exit code 2).
pub fn malformed_corpus() -> Vec<Malformed> {
    use serde_json::json;
    let cert = serde_json::to_value(ontic::antidist::pbr_measurement()).unwrap();
    let scen = serde_json::to_value(ontic::pucthm::Scenario::Joint(ontic::pucthm::phi_plus_example())).unwrap();
    let model = serde_json::to_value(ontic::pucthm::canonical_pbr_scenario().model).unwrap();
    let text = |s: &str| s.as_bytes().to_vec();
    let m = |name, args: &[&'static str], bytes| Malformed { name, args: args.to_vec(), bytes: Some(bytes) };
    let vm = ["verify", "model", "{}"];
    let vc = ["verify", "certificate", "{}"];
    let vs = ["verify", "scenario", "{}"];
    vec![
        m("empty.json", &vm, Vec::new()),
        m("truncated.json", &vm, text(r#"{"lambda_size": 2, "preparations": {"#)),
        m("not_json.json", &vm, text("hello")),
        m("binary.json", &vm, vec![0xff, 0xfe, 0x00, 0x7b]),
        m("array.json", &vm, text("[1, 2, 3]")),
        m("unknown_field.json", &vm, edit(&model, |v| v["colour"] = json!("red"))),
        m("lambda_string.json", &vm, edit(&model, |v| v["lambda_size"] = json!("four"))),
        m("lambda_negative.json", &vm, edit(&model, |v| v["lambda_size"] = json!(-4))),
        m("lambda_zero.json", &vm, text(r#"{"lambda_size":0,"preparations":{},"experiments":{}}"#)),
        m("weights_short.json", &vm, edit(&model, |v| v["preparations"]["psi,psi"] = json!([1.0]))),
        m("weight_overflow.json", &vm, text(r#"{"lambda_size":1,"preparations":{"a":[1e999]},"experiments":{}}"#)),
        m("response_long.json", &vm, edit(&model, |v| v["experiments"]["pbr"][0]["response"] = json!([0, 0, 0, 0, 0]))),
        m(
            "duplicate_label.json",
            &vm,
            text(r#"{"lambda_size":1,"preparations":{"a":[1.0]},"experiments":{"e":[{"label":"x","response":[0.5]},{"label":"x","response":[0.5]}]}}"#),
        ),
        m("cert_missing_field.json", &vc, edit(&cert, |v| { v.as_object_mut().unwrap().remove("assignment"); })),
        m("cert_unnormalized.json", &vc, edit(&cert, |v| v["states"][0][0] = json!([2.0, 0.0]))),
        m("cert_index.json", &vc, edit(&cert, |v| v["assignment"]["xi1"] = json!(9))),
        m(
            "cert_label.json",
            &vc,
            edit(&cert, |v| {
                let a = v["assignment"].as_object_mut().unwrap();
                let x = a.remove("xi1").unwrap();
                a.insert("zz".into(), x);
            }),
        ),
        m("cert_dimension.json", &vc, edit(&cert, |v| v["states"][0] = json!([[1.0, 0.0], [0.0, 0.0]]))),
        m(
            "cert_effect_shape.json",
            &vc,
            edit(&cert, |v| { v["experiment"]["outcomes"][0]["effect"].as_array_mut().unwrap().pop(); }),
        ),
        m("scenario_missing_key.json", &vs, edit(&scen, |v| { v["preparations"].as_object_mut().unwrap().remove("psi,psi"); })),
        m("scenario_extra_key.json", &vs, edit(&scen, |v| v["preparations"]["bogus"] = json!([1.0, 0.0]))),
        m(
            "scenario_grid.json",
            &vs,
            edit(&scen, |v| {
                v["lambda_a_size"] = json!(3);
                v["lambda_b_size"] = json!(1);
            }),
        ),
        m("scenario_for_audit.json", &["audit", "pbr", "--input", "{}", "--out", "{dir}"], text("{\"lambda_size\": true}")),
        Malformed { name: "missing.json", args: vm.to_vec(), bytes: None },
    ]
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn ontic(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_ontic"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Writes the corpus under `dir` and runs each case; returns the exit code
/// and whether a report file was written, per case.
pub fn run_corpus(dir: &std::path::Path) -> Vec<(&'static str, i32, bool)> {
    malformed_corpus()
        .into_iter()
        .map(|c| {
            let path = dir.join(c.name);
            if let Some(b) = &c.bytes {
                std::fs::write(&path, b).unwrap();
            }
            let out_dir = dir.join(format!("{}.out", c.name));
            let p = path.display().to_string();
            let o = out_dir.display().to_string();
            let args: Vec<String> = c
                .args
                .iter()
                .map(|a| match *a {
                    "{}" => p.clone(),
                    "{dir}" => o.clone(),
                    other => other.to_string(),
                })
                .collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let r = ontic(&refs);
            let report = if c.args[0] == "audit" {
                out_dir.join("pbr_audit.report.json")
            } else {
                PathBuf::from(format!("{p}.report.json"))
            };
            (c.name, r.code, report.exists())
        })
        .collect()
}

fn reserialize<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq>(text: &str) -> Option<String> {
    let v: T = serde_json::from_str(text).ok()?;
    let out = serde_json::to_string_pretty(&v).ok()? + "\n";
    let again: T = serde_json::from_str(&out).ok()?;
    (again == v).then_some(out)
}

/// Parses `path` as the schema its name implies and checks that writing
/// it back reproduces the file byte for byte.
pub fn round_trips(path: &std::path::Path) -> bool {
    use ontic::antidist::AntidistCertificate;
    use ontic::bclm::{BclmFamily, MubSet};
    use ontic::cli::RunReport;
    use ontic::io::BayesInput;
    use ontic::pucthm::Scenario;
    use ontic::qcore::Fragment;
    let text = std::fs::read_to_string(path).unwrap();
    let name = path.file_name().unwrap().to_string_lossy();
    let back = if name.ends_with("fragment.json") {
        reserialize::<Fragment>(&text)
    } else if name.ends_with("certificate.json") {
        reserialize::<AntidistCertificate>(&text)
    } else if name.ends_with("model.json") {
        reserialize::<OntModel>(&text)
    } else if name.ends_with("scenario.json") {
        reserialize::<Scenario>(&text)
    } else if name.ends_with("mubs.json") {
        reserialize::<MubSet>(&text)
    } else if name.ends_with("family.json") {
        reserialize::<BclmFamily>(&text)
    } else if name.ends_with("report.json") {
        reserialize::<RunReport>(&text)
    } else if name == "coin.json" {
        reserialize::<BayesInput>(&text)
    } else {
        panic!("no schema for {name}")
    };
    back.as_deref() == Some(text.as_str())
}
