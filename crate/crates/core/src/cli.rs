//! Command-line driver: built-in fixtures, verification of JSON inputs and
//! the seeded audits.
//!
//! Exit codes: 0 when every check passes, 1 when a check or precondition
//! fails, 2 on malformed input. A [`RunReport`] is written for every run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antidist::{pbr_measurement, verify_certificate, AntidistCertificate};
use crate::bclm::{audit_model, construct_family, mubs_d4, seeded_audit};
use crate::io::{digest, fmt12, load, write_json, BayesInput};
use crate::omodel::{
    canonical_psi_ontic, discretized_qubit_model, posterior_ratio, reproduces_fragment,
    validate_model, FiniteDistribution, OntModel,
};
use crate::pucthm::{
    canonical_array, canonical_pbr_scenario, check_pip, check_puc, extendibility_probe,
    hand_built_array, n_array_determination, pbr_fragment, PbrVerdict, ProductJointScenario, phi_plus_example, pip_fit, puc_lp_scenario,
    verify_pbr_conclusion, verify_puc_theorem, verify_robustness, RobustnessMode, Scenario,
    PBR_EXPERIMENT,
};
use crate::qcore::{Fragment, PureState};
use crate::{Error, Result, Tolerances};

pub const FIXTURES: [&str; 5] = ["pbr-0plus", "bclm-d4", "phi-plus", "coin", "ks-qubit"];

#[derive(Debug, Parser)]
#[command(name = "ontic", version, about = "Finite ontological models and psi-ontology checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in fixture as JSON files.
    Fixture {
        /// One of pbr-0plus, bclm-d4, phi-plus, coin, ks-qubit.
        name: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check a JSON model, certificate or scenario.
    Verify {
        kind: VerifyKind,
        path: PathBuf,
        /// Scenario check to run.
        #[arg(long, value_enum, default_value_t = ScenarioCheck::Puc)]
        check: ScenarioCheck,
        /// Tolerance (defaults: 1e-10 for certificates, 1e-9 otherwise).
        #[arg(long)]
        tol: Option<f64>,
        /// Fragment a model must reproduce.
        #[arg(long)]
        fragment: Option<PathBuf>,
        /// Report path (default: `<path>.report.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded audit and write CSV and JSON reports.
    Audit {
        kind: AuditKind,
        /// Scenario to audit instead of generated ones (pbr, puc).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of seeded runs (defaults: bclm 20, pbr 10, puc 50).
        #[arg(long)]
        seeds: Option<u64>,
        /// First seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Precluded-outcome probability for puc audits.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for seeded runs (0: all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Model,
    Certificate,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioCheck {
    Puc,
    Pip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKind {
    Bclm,
    Pbr,
    Puc,
    NArray,
}

/// One executed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub check: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_violation: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bounds: BTreeMap<String, f64>,
}

impl VerdictRow {
    fn new(check: impl Into<String>, pass: bool, worst: Option<f64>) -> Self {
        Self {
            check: check.into(),
            pass,
            worst_violation: worst,
            bounds: BTreeMap::new(),
        }
    }

    fn bound(mut self, name: &str, value: f64) -> Self {
        self.bounds.insert(name.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// `path sha256:<hex>` per input file.
    pub inputs: Vec<String>,
    pub verdicts: Vec<VerdictRow>,
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn new(command: String) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            verdicts: Vec::new(),
            artifacts: Vec::new(),
            error: None,
        }
    }

    fn input(&mut self, p: &Path) {
        self.inputs.push(format!("{} {}", p.display(), digest(p)));
    }

    fn push(&mut self, row: VerdictRow) {
        self.verdicts.push(row);
    }

    /// Precondition and check failures become a failed verdict; anything
    /// else is returned.
    fn absorb(&mut self, check: &str, r: Result<()>) -> Result<()> {
        match r {
            Ok(()) => Ok(()),
            Err(Error::Precondition(m)) => {
                self.push(VerdictRow::new(format!("{check}: {m}"), false, None));
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn write_artifact(&mut self, path: PathBuf, text: &str) -> Result<()> {
        fs::write(&path, text)?;
        self.artifacts.push(path.display().to_string());
        Ok(())
    }

    fn write_json_artifact<T: Serialize>(&mut self, path: PathBuf, v: &T) -> Result<()> {
        write_json(&path, v)?;
        self.artifacts.push(path.display().to_string());
        Ok(())
    }

    fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> u8 {
    let (command, report_path) = describe(&cli.command);
    let mut report = RunReport::new(command);
    let outcome = dispatch(&cli.command, &mut report);
    let code = match &outcome {
        Ok(()) if report.passed() => 0,
        Ok(()) => 1,
        Err(Error::Input(_) | Error::Json(_) | Error::Io(_)) => 2,
        Err(Error::Precondition(_) | Error::Infeasible(_) | Error::Certification(_)) => 1,
        Err(_) => 2,
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        report.error = Some(e.to_string());
    }
    for v in &report.verdicts {
        println!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.check);
    }
    if let Err(e) = write_json(&report_path, &report) {
        eprintln!("could not write report {}: {e}", report_path.display());
        println!("{}", serde_json::to_string(&report).unwrap_or_default());
    }
    code
}

fn describe(c: &Command) -> (String, PathBuf) {
    match c {
        Command::Fixture { name, out_dir } => (format!("fixture {name}"), out_dir.join("fixture.report.json")),
        Command::Verify { kind, path, out, .. } => {
            let k = format!("{kind:?}").to_lowercase();
            let default = PathBuf::from(format!("{}.report.json", path.display()));
            (format!("verify {k}"), out.clone().unwrap_or(default))
        }
        Command::Audit { kind, out, .. } => {
            let k = match kind {
                AuditKind::NArray => "n-array".to_string(),
                other => format!("{other:?}").to_lowercase(),
            };
            (format!("audit {k}"), out.join(format!("{k}_audit.report.json")))
        }
    }
}

fn dispatch(c: &Command, report: &mut RunReport) -> Result<()> {
    match c {
        Command::Fixture { name, out_dir } => {
            fs::create_dir_all(out_dir)?;
            cmd_fixture(name, out_dir, report)
        }
        Command::Verify {
            kind,
            path,
            check,
            tol,
            fragment,
            ..
        } => cmd_verify(*kind, path, *check, *tol, fragment.as_deref(), report),
        Command::Audit {
            kind,
            input,
            seeds,
            seed,
            epsilon,
            out,
            jobs,
        } => {
            fs::create_dir_all(out)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(*jobs)
                .build()
                .map_err(|e| Error::Input(e.to_string()))?;
            pool.install(|| cmd_audit(*kind, input.as_deref(), *seeds, *seed, *epsilon, out, report))
        }
    }
}

fn coin() -> BayesInput {
    let row = |h: f64, t: f64| [("heads".to_string(), h), ("tails".to_string(), t)].into();
    BayesInput {
        prior: [("P0".to_string(), 0.5), ("P1".to_string(), 0.5)].into(),
        conditionals: [("P0".to_string(), row(0.5, 0.5)), ("P1".to_string(), row(2.0 / 3.0, 1.0 / 3.0))].into(),
    }
}

/// Writes `value`, reloads it and checks the reload reserializes to the
/// same bytes and compares equal.
fn emit<T>(report: &mut RunReport, dir: &Path, file: &str, value: &T) -> Result<()>
where
    T: Serialize + serde::de::DeserializeOwned + PartialEq,
{
    let path = dir.join(file);
    report.write_json_artifact(path.clone(), value)?;
    let back: T = load(&path)?;
    let same = back == *value
        && serde_json::to_string_pretty(&back)? + "\n" == fs::read_to_string(&path)?;
    report.push(VerdictRow::new(format!("round-trip {file}"), same, None));
    Ok(())
}

pub fn cmd_fixture(name: &str, dir: &Path, report: &mut RunReport) -> Result<()> {
    match name {
        "pbr-0plus" => {
            let cert = pbr_measurement();
            let (ok, max) = verify_certificate(&cert, Tolerances::DEFAULT.preclusion)?;
            report.push(VerdictRow::new("verify_certificate", ok, Some(max)));
            emit(report, dir, "pbr-0plus.fragment.json", &pbr_fragment())?;
            emit(report, dir, "pbr-0plus.certificate.json", &cert)?;
        }
        "bclm-d4" => {
            let mubs = mubs_d4();
            let fam = construct_family(0, 0)?;
            report.push(VerdictRow::new(
                "mub invariants",
                mubs.violations(1e-10).is_empty(),
                None,
            ));
            report.push(
                VerdictRow::new("explicit triple certificates", true, None)
                    .bound("certified_fraction", fam.certified_fraction()),
            );
            emit(report, dir, "bclm-d4.mubs.json", &mubs)?;
            emit(report, dir, "bclm-d4.family.json", &fam)?;
            emit(report, dir, "bclm-d4.fragment.json", &fam.fragment()?)?;
        }
        "phi-plus" => {
            let s = phi_plus_example();
            let c = check_puc(&s, 1e-9);
            report.push(VerdictRow::new("check_puc fails as expected", !c.holds, Some(c.worst)));
            emit(report, dir, "phi-plus.scenario.json", &Scenario::Joint(s))?;
        }
        "coin" => {
            let c = coin();
            let cond = c.flat_conditionals();
            let heads = posterior_ratio(&c.prior, &cond, "heads", "P1", "P0")?;
            let tails = posterior_ratio(&c.prior, &cond, "tails", "P1", "P0")?;
            report.push(VerdictRow::new("heads ratio 4/3", heads == 4.0 / 3.0, None).bound("ratio", heads));
            report.push(VerdictRow::new("tails ratio 2/3", tails == 2.0 / 3.0, None).bound("ratio", tails));
            emit(report, dir, "coin.json", &c)?;
        }
        "ks-qubit" => {
            let preps = [("zero".to_string(), PureState::zero()), ("plus".to_string(), PureState::plus())];
            let net = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
            let (m, f) = discretized_qubit_model(1000, &net, &preps)?;
            let rep = reproduces_fragment(&m, &f, 5e-2)?;
            report.push(VerdictRow::new("reproduces within 5e-2 at resolution 1000", rep.reproduces, Some(rep.max_deviation)));
            emit(report, dir, "ks-qubit.model.json", &m)?;
            emit(report, dir, "ks-qubit.fragment.json", &f)?;
        }
        other => {
            return Err(Error::Input(format!(
                "unknown fixture `{other}`; valid names: {}",
                FIXTURES.join(", ")
            )))
        }
    }
    Ok(())
}

fn cmd_verify(
    kind: VerifyKind,
    path: &Path,
    check: ScenarioCheck,
    tol: Option<f64>,
    fragment: Option<&Path>,
    report: &mut RunReport,
) -> Result<()> {
    report.input(path);
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Input(format!("tolerance {t} must be finite and nonnegative")));
        }
    }
    match kind {
        VerifyKind::Model => {
            let m: OntModel = load(path)?;
            let mut tols = Tolerances::DEFAULT;
            if let Some(t) = tol {
                tols.distribution = t;
            }
            let v = validate_model(&m, &tols);
            let mut row = VerdictRow::new("validate_model", v.is_empty(), None);
            for (i, msg) in v.iter().take(20).enumerate() {
                row.check.push_str(if i == 0 { ": " } else { "; " });
                row.check.push_str(msg);
            }
            report.push(row);
            if let Some(fp) = fragment {
                report.input(fp);
                let f: Fragment = load(fp)?;
                let t = tol.unwrap_or(1e-9);
                match reproduces_fragment(&m, &f, t) {
                    Ok(r) => report.push(
                        VerdictRow::new("reproduces_fragment", r.reproduces, Some(r.max_deviation)).bound("tol", t),
                    ),
                    Err(e) => report.push(VerdictRow::new(format!("reproduces_fragment: {e}"), false, None)),
                }
            }
        }
        VerifyKind::Certificate => {
            let c: AntidistCertificate = load(path)?;
            let t = tol.unwrap_or(Tolerances::DEFAULT.preclusion);
            let (ok, max) = verify_certificate(&c, t).map_err(|e| Error::Input(e.to_string()))?;
            report.push(VerdictRow::new("verify_certificate", ok, Some(max)).bound("tol", t));
        }
        VerifyKind::Scenario => {
            let s: Scenario = load(path)?;
            let t = tol.unwrap_or(1e-9);
            match check {
                ScenarioCheck::Puc => {
                    let c = check_puc(&s.joint(), t);
                    report.push(VerdictRow::new("check_puc", c.holds, Some(c.worst)).bound("tol", t));
                }
                ScenarioCheck::Pip => match &s {
                    Scenario::Product(p) => {
                        let c = check_pip(p, t);
                        report.push(VerdictRow::new("check_opi", c.opi.holds, Some(c.opi.worst)));
                        report.push(VerdictRow::new(
                            "check_independence",
                            c.independence.holds,
                            Some(c.independence.worst),
                        ));
                    }
                    Scenario::Joint(_) => {
                        report.push(VerdictRow::new("check_pip: scenario has no product structure", false, None))
                    }
                },
            }
        }
    }
    Ok(())
}

/// Quotes a CSV field holding a comma, quote or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn default_seeds(kind: AuditKind) -> u64 {
    match kind {
        AuditKind::Bclm => 20,
        AuditKind::Pbr => 10,
        AuditKind::Puc => 50,
        AuditKind::NArray => 0,
    }
}

fn cmd_audit(
    kind: AuditKind,
    input: Option<&Path>,
    seeds: Option<u64>,
    seed: u64,
    epsilon: f64,
    out: &Path,
    report: &mut RunReport,
) -> Result<()> {
    let n = seeds.unwrap_or(default_seeds(kind));
    let seed_list: Vec<u64> = (seed..seed + n).collect();
    match kind {
        AuditKind::Bclm => audit_bclm(&seed_list, out, report),
        AuditKind::Pbr => audit_pbr(input, &seed_list, out, report),
        AuditKind::Puc => audit_puc(input, &seed_list, epsilon, out, report),
        AuditKind::NArray => audit_n_array(out, report),
    }
}

fn audit_bclm(seeds: &[u64], out: &Path, report: &mut RunReport) -> Result<()> {
    let fam = construct_family(0, 0)?;
    let canon = audit_model(&canonical_psi_ontic(&fam.fragment()?)?, &fam)?;
    let b = canon.bounds.clone();
    let bounded = |row: VerdictRow| {
        row.bound("mean_bound", b.mean_bound)
            .bound("ratio_coefficient", b.ratio_coefficient)
            .bound("omega_q", b.omega_q)
    };
    report.push(bounded(VerdictRow::new("canonical model", canon.pass, Some(canon.omega_bar))));
    let runs = seeds
        .par_iter()
        .map(|&s| seeded_audit(&fam, s).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from(
        "seed,lambda_size,omega_bar,mean_bound,omega_sum,min_index,min_omega,min_ratio,ratio_coefficient,two_over_d,pass\n",
    );
    let mut pairs = String::from("seed,pair_index,omega,omega_q,ratio,evidence\n");
    for r in &runs {
        let rep = &r.report;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.lambda_size,
            fmt12(rep.omega_bar),
            fmt12(b.mean_bound),
            fmt12(rep.omega_sum),
            rep.min_index,
            fmt12(rep.min_omega),
            fmt12(rep.min_ratio),
            fmt12(b.ratio_coefficient),
            fmt12(b.two_over_d),
            rep.pass
        ));
        for row in &rep.rows {
            pairs.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.seed,
                row.index,
                fmt12(row.omega),
                fmt12(row.omega_q),
                fmt12(row.ratio),
                row.evidence
            ));
        }
        report.push(bounded(VerdictRow::new(
            format!("seed {}: mean overlap <= 1/d^2", r.seed),
            rep.mean_ok,
            Some(rep.omega_bar),
        )));
        report.push(bounded(VerdictRow::new(
            format!("seed {}: some pair below coefficient * omega_q", r.seed),
            rep.strict_witness_ok && rep.witness_ok,
            Some(rep.min_omega),
        )));
    }
    report.write_artifact(out.join("bclm_audit.csv"), &csv)?;
    report.write_artifact(out.join("bclm_pairs.csv"), &pairs)?;
    report.write_json_artifact(out.join("bclm_audit.json"), &runs)?;
    Ok(())
}

fn pbr_row(
    label: String,
    s: &ProductJointScenario,
    cert: &AntidistCertificate,
    csv: &mut String,
    verdicts: &mut Vec<PbrVerdict>,
    report: &mut RunReport,
) -> Result<()> {
    let r = verify_pbr_conclusion(s, cert, PBR_EXPERIMENT, 1e-9).map(|v| {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&label),
            v.distinct_a,
            v.distinct_b,
            fmt12(v.omega_a),
            fmt12(v.omega_b),
            v.pass
        ));
        report.push(VerdictRow::new(format!("{label}: ontologically distinct"), v.pass, None));
        verdicts.push(v);
    });
    report.absorb(&label, r)
}

fn audit_pbr(input: Option<&Path>, seeds: &[u64], out: &Path, report: &mut RunReport) -> Result<()> {
    use rand::{Rng, SeedableRng};
    let cert = pbr_measurement();
    let mut csv = String::from("source,distinct_a,distinct_b,omega_a,omega_b,pass\n");
    let mut verdicts = Vec::new();
    if let Some(p) = input {
        report.input(p);
        match load::<Scenario>(p)? {
            Scenario::Product(s) => pbr_row(p.display().to_string(), &s, &cert, &mut csv, &mut verdicts, report)?,
            Scenario::Joint(_) => report.push(VerdictRow::new("check_pip failed: no product structure", false, None)),
        }
    } else {
        pbr_row("canonical".into(), &canonical_pbr_scenario(), &cert, &mut csv, &mut verdicts, report)?;
        for &seed in seeds {
            // Random local distributions on four ontic states: atom 0 is
            // private to ψ, atom 3 to φ, atoms 1 and 2 private to either or
            // (rarely) shared.
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (mut p, mut q) = (vec![0.0; 4], vec![0.0; 4]);
            p[0] = rng.random_range(0.1..1.0);
            q[3] = rng.random_range(0.1..1.0);
            for l in 1..3 {
                let w = rng.random_range(0.1..1.0);
                match rng.random_range(0..5) {
                    0 | 1 => p[l] = w,
                    2 | 3 => q[l] = w,
                    _ => {
                        p[l] = w;
                        q[l] = w;
                    }
                }
            }
            let shared = (0..4).any(|l| p[l] > 0.0 && q[l] > 0.0);
            let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
            let p = FiniteDistribution(p.iter().map(|x| x / sp).collect());
            let q = FiniteDistribution(q.iter().map(|x| x / sq).collect());
            match pip_fit(&p, &q, 0.0)? {
                Some(s) => pbr_row(format!("seed {seed}"), &s, &cert, &mut csv, &mut verdicts, report)?,
                None => {
                    csv.push_str(&format!("seed {seed},,,,,no exact model\n"));
                    report.push(VerdictRow::new(
                        format!("seed {seed}: no exact model only with shared support"),
                        shared,
                        None,
                    ));
                }
            }
        }
    }
    report.write_artifact(out.join("pbr_audit.csv"), &csv)?;
    report.write_json_artifact(out.join("pbr_audit.json"), &verdicts)?;
    Ok(())
}

fn audit_puc(input: Option<&Path>, seeds: &[u64], epsilon: f64, out: &Path, report: &mut RunReport) -> Result<()> {
    use rand::{Rng, SeedableRng};
    if !(0.0..=0.25).contains(&epsilon) {
        return Err(Error::Input(format!("epsilon {epsilon} outside [0, 1/4]")));
    }
    let cert = pbr_measurement();
    let mut runs: Vec<(String, Scenario, RobustnessMode)> = Vec::new();
    let mut csv = String::from("source,mode,epsilon,bound,overlap,value,pass\n");
    if let Some(p) = input {
        report.input(p);
        let s: Scenario = load(p)?;
        if matches!(s, Scenario::Product(_)) {
            runs.push((p.display().to_string(), s.clone(), RobustnessMode::Pip));
        }
        runs.push((p.display().to_string(), s, RobustnessMode::Puc));
    } else {
        let generated = seeds
            .par_iter()
            .map(|&s| puc_lp_scenario(s, epsilon, 24).map(|o| (s, o)))
            .collect::<Result<Vec<_>>>()?;
        for (s, o) in generated {
            match o {
                Some(j) => runs.push((format!("seed {s}"), Scenario::Joint(j), RobustnessMode::Puc)),
                None => report.push(VerdictRow::new(format!("seed {s}: generator infeasible"), false, None)),
            }
        }
        // Product scenarios whose local distributions overlap by a random
        // amount up to 2 sqrt(ε) on a shared atom.
        for &seed in seeds {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let shared = rng.random_range(0.0..=2.0 * epsilon.sqrt());
            let p = FiniteDistribution(vec![1.0 - shared, 0.0, shared]);
            let q = FiniteDistribution(vec![0.0, 1.0 - shared, shared]);
            match pip_fit(&p, &q, epsilon)? {
                Some(s) => runs.push((format!("seed {seed}"), Scenario::Product(s), RobustnessMode::Pip)),
                None => csv.push_str(&format!("seed {seed},pip,{},,shared,{},no fit\n", fmt12(epsilon), fmt12(shared))),
            }
        }
    }
    let mut verdicts = Vec::new();
    for (label, s, mode) in &runs {
        let r = verify_robustness(s, PBR_EXPERIMENT, *mode).map(|v| {
            let (m, bound_name) = match mode {
                RobustnessMode::Pip => ("pip", "two_sqrt_epsilon"),
                RobustnessMode::Puc => ("puc", "four_sqrt_epsilon"),
            };
            for (name, value) in &v.overlaps {
                csv.push_str(&format!(
                    "{},{m},{},{},{},{},{}\n",
                    csv_field(label),
                    fmt12(v.epsilon),
                    fmt12(v.bound),
                    csv_field(name),
                    fmt12(*value),
                    v.pass
                ));
            }
            let worst = v.overlaps.iter().map(|o| o.1).fold(0.0, f64::max);
            report.push(
                VerdictRow::new(format!("{label}: {m} overlaps within {bound_name}"), v.pass, Some(worst))
                    .bound("epsilon", v.epsilon)
                    .bound(bound_name, v.bound),
            );
            verdicts.push(v);
        });
        report.absorb(label, r)?;
        if epsilon == 0.0 && *mode == RobustnessMode::Puc {
            let r = verify_puc_theorem(&s.joint(), &cert, PBR_EXPERIMENT, 1e-9).map(|v| {
                report.push(VerdictRow::new(format!("{label}: PUC theorem"), v.pass, None));
            });
            report.absorb(label, r)?;
        }
    }
    report.write_artifact(out.join("puc_audit.csv"), &csv)?;
    report.write_json_artifact(out.join("puc_audit.json"), &verdicts)?;
    Ok(())
}

fn audit_n_array(out: &Path, report: &mut RunReport) -> Result<()> {
    let mut csv = String::from("n,kind,min_fraction,bound,pass\n");
    let mut reports = Vec::new();
    for n in 3..=6 {
        for (kind, s) in [("canonical", canonical_array(n)?), ("hand-built", hand_built_array(n, 0.4)?)] {
            let r = n_array_determination(&s)?;
            csv.push_str(&format!("{n},{kind},{},{},{}\n", fmt12(r.min_fraction), fmt12(r.bound), r.pass));
            report.push(
                VerdictRow::new(format!("n={n} {kind}: at most one undetermined"), r.pass, None)
                    .bound("min_fraction", r.min_fraction)
                    .bound("n_minus_1_over_n", r.bound),
            );
            reports.push(r);
        }
    }
    let ext = extendibility_probe(canonical_array, 6)?;
    report.push(VerdictRow::new("extendibility of the canonical family", ext.consistent, None));
    report.write_artifact(out.join("n_array_audit.csv"), &csv)?;
    report.write_json_artifact(out.join("n_array_audit.json"), &(reports, ext))?;
    Ok(())
}
