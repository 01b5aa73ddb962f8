//! Scenario orchestration and reporting.
//!
//! [`run_scenario`] wires the quantum and classical modules together for one
//! `(N, M, d)` triple: the exact GHZ expectation value, the optional dense
//! eigenvalue check, and — for tripartite scenarios — both classical oracles
//! with cross-validation. [`sweep`] runs a grid of scenarios and the output
//! helpers render one run as JSON (stable key order, byte-identical across
//! repeated runs), CSV summary, or a human-readable table. Phase timings are
//! kept out of the serialized report so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::congruence::{
    max_satisfiable_subset, minimal_infeasible_subsets, CongruenceSystem, InfeasibilityCertificate,
    MAX_SUBSET_CONSTRAINTS,
};
use crate::lhv::{
    brute_force_max, generate_constraints, DeltaConstraint, DEFAULT_BRUTE_FORCE_BUDGET, PARTIES,
};
use crate::quantum::{
    bell_expectation_ghz, ghz_eigencheck, BellScenario, DEFAULT_DENSE_AMPLITUDE_CAP,
};

pub const SCHEMA_VERSION: u32 = 1;

/// A classical bound counts as violated when it sits below the quantum bound
/// by more than this margin.
pub const VIOLATION_MARGIN: f64 = 1e-12;

/// Tolerance for the quantum bound to match `d - 1`.
pub const QUANTUM_BOUND_TOLERANCE: f64 = 1e-9;

/// Upper limit on party count accepted by the runner; the exact expectation
/// sum grows as `M^(N-1)` and becomes unreasonable beyond this.
pub const MAX_PARTIES: usize = 12;

/// Which classical oracle(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Congruence,
    Both,
}

impl Method {
    pub fn wants_brute(&self) -> bool {
        matches!(self, Method::Brute | Method::Both)
    }

    pub fn wants_congruence(&self) -> bool {
        matches!(self, Method::Congruence | Method::Both)
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" => Ok(Method::Brute),
            "congruence" => Ok(Method::Congruence),
            "both" => Ok(Method::Both),
            other => Err(format!(
                "unknown method '{other}' (expected brute, congruence, or both)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOptions {
    pub method: Method,
    pub budget: u128,
    pub dense_cap: usize,
    pub eigencheck: bool,
    pub certificates: bool,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            method: Method::Both,
            budget: DEFAULT_BRUTE_FORCE_BUDGET,
            dense_cap: DEFAULT_DENSE_AMPLITUDE_CAP,
            eigencheck: false,
            certificates: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioStatus {
    /// Parameter validation failed; nothing ran.
    Invalid,
    /// Both classical oracles ran and agree.
    Verified,
    /// Only the exhaustive search ran.
    BruteOnly,
    /// Only the congruence analysis ran.
    CongruenceOnly,
    /// Classical analysis not applicable (non-tripartite scenario).
    QuantumOnly,
    /// Both oracles ran and disagree; a bug signal.
    Disagreement,
    /// Classical analysis was requested but no oracle could run.
    OraclesExhausted,
}

/// Wall-clock cost per phase; rendered in the text output only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub quantum: Duration,
    pub eigencheck: Duration,
    pub brute_force: Duration,
    pub congruence: Duration,
    pub certificates: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigencheckReport {
    pub ran: bool,
    pub residual: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumReport {
    pub bound: f64,
    pub imag_residue: f64,
    pub matches_dimension_minus_one: bool,
    pub eigencheck: Option<EigencheckReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub ran: bool,
    pub skipped: Option<String>,
    pub l_max: Option<String>,
    pub max_satisfied: Option<usize>,
    pub subset: Option<Vec<usize>>,
    pub witness: Option<BTreeMap<String, i64>>,
}

impl OracleReport {
    fn skipped(reason: String) -> Self {
        Self {
            ran: false,
            skipped: Some(reason),
            l_max: None,
            max_satisfied: None,
            subset: None,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub l_max: Option<String>,
    pub bound: Option<String>,
    pub bound_decimal: Option<f64>,
    pub brute_force: OracleReport,
    pub congruence: OracleReport,
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub subset: Vec<usize>,
    pub constraints: Vec<String>,
    pub row_combination: Vec<i64>,
    pub reduced: String,
    pub coefficient_gcd: i64,
    pub constant: i64,
    pub modulus: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub parties: usize,
    pub settings: usize,
    pub dim: usize,
    pub status: ScenarioStatus,
    pub error: Option<String>,
    pub notes: Vec<String>,
    pub quantum: Option<QuantumReport>,
    pub classical: Option<ClassicalReport>,
    pub violation: Option<bool>,
    pub violation_factor: Option<String>,
    pub certificates: Option<Vec<CertificateReport>>,
    #[serde(skip)]
    pub timings: Timings,
    #[serde(skip)]
    pub l_max: Option<Ratio<i64>>,
    #[serde(skip)]
    pub classical_bound: Option<Ratio<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub parties: usize,
    pub method: Method,
    pub budget: u128,
    pub scenarios: Vec<ScenarioReport>,
}

fn ratio_string(r: Ratio<i64>) -> String {
    r.to_string()
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn witness_map(labels: &[(String, i64)]) -> BTreeMap<String, i64> {
    labels.iter().cloned().collect()
}

/// Renders `lambda^T A x + e = 0 (mod d)` with named variables.
fn render_reduced(cert: &InfeasibilityCertificate, labels: &[String]) -> String {
    let mut terms = String::new();
    for (coeff, label) in cert.combined_coefficients.iter().zip(labels) {
        match *coeff {
            0 => continue,
            c => {
                if terms.is_empty() {
                    if c == 1 {
                        let _ = write!(terms, "{label}");
                    } else if c == -1 {
                        let _ = write!(terms, "-{label}");
                    } else {
                        let _ = write!(terms, "{c}*{label}");
                    }
                } else if c > 0 {
                    let _ = write!(
                        terms,
                        " + {}",
                        if c == 1 {
                            label.clone()
                        } else {
                            format!("{c}*{label}")
                        }
                    );
                } else {
                    let _ = write!(
                        terms,
                        " - {}",
                        if c == -1 {
                            label.clone()
                        } else {
                            format!("{}*{label}", -c)
                        }
                    );
                }
            }
        }
    }
    if cert.constant != 0 || terms.is_empty() {
        if terms.is_empty() {
            let _ = write!(terms, "{}", cert.constant);
        } else if cert.constant > 0 {
            let _ = write!(terms, " + {}", cert.constant);
        } else {
            let _ = write!(terms, " - {}", -cert.constant);
        }
    }
    format!("{terms} = 0 (mod {})", cert.modulus)
}

struct ClassicalOutcome {
    report: ClassicalReport,
    l_max: Option<Ratio<i64>>,
    bound: Option<Ratio<i64>>,
    any_ran: bool,
    disagreement: bool,
}

fn run_classical(
    settings: usize,
    dim: usize,
    constraints: &[DeltaConstraint],
    options: &ScenarioOptions,
    timings: &mut Timings,
) -> ClassicalOutcome {
    let squared = (settings * settings) as i64;

    let mut brute = if options.method.wants_brute() {
        let started = Instant::now();
        match brute_force_max(settings, dim, options.budget) {
            Ok(result) => {
                timings.brute_force = started.elapsed();
                let satisfied = (result.l_max * Ratio::new(squared, 1)).to_integer() as usize;
                OracleReport {
                    ran: true,
                    skipped: None,
                    l_max: Some(ratio_string(result.l_max)),
                    max_satisfied: Some(satisfied),
                    subset: None,
                    witness: Some(witness_map(&result.witness.labeled())),
                }
            }
            Err(err) => OracleReport::skipped(err.to_string()),
        }
    } else {
        OracleReport::skipped("not requested".into())
    };

    let congruence = if options.method.wants_congruence() {
        let started = Instant::now();
        let system = CongruenceSystem::from_constraints(constraints)
            .expect("generated family is well formed");
        match max_satisfiable_subset(&system) {
            Ok(result) => {
                timings.congruence = started.elapsed();
                let witness: Vec<(String, i64)> = system
                    .labels()
                    .iter()
                    .cloned()
                    .zip(result.witness.iter().copied())
                    .collect();
                OracleReport {
                    ran: true,
                    skipped: None,
                    l_max: Some(ratio_string(Ratio::new(result.size as i64, squared))),
                    max_satisfied: Some(result.size),
                    subset: Some(result.subset),
                    witness: Some(witness_map(&witness)),
                }
            }
            Err(err) => OracleReport::skipped(err.to_string()),
        }
    } else {
        OracleReport::skipped("not requested".into())
    };

    let brute_l = brute
        .max_satisfied
        .map(|satisfied| Ratio::new(satisfied as i64, squared));
    let congruence_l = congruence
        .max_satisfied
        .map(|size| Ratio::new(size as i64, squared));
    let agreement = match (brute_l, congruence_l) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let disagreement = agreement == Some(false);
    let l_max = if disagreement {
        None
    } else {
        congruence_l.or(brute_l)
    };
    let bound = l_max.map(|l| l * Ratio::new(dim as i64, 1) - Ratio::new(1, 1));
    let any_ran = brute.ran || congruence.ran;

    // a skipped brute force under method "both" falls back to congruence only
    if !brute.ran && options.method == Method::Both && congruence.ran {
        if let Some(reason) = &mut brute.skipped {
            reason.push_str("; falling back to the congruence oracle");
        }
    }

    ClassicalOutcome {
        report: ClassicalReport {
            l_max: l_max.map(ratio_string),
            bound: bound.map(ratio_string),
            bound_decimal: bound.map(ratio_f64),
            brute_force: brute,
            congruence,
            agreement,
        },
        l_max,
        bound,
        any_ran,
        disagreement,
    }
}

fn invalid_report(parties: usize, settings: usize, dim: usize, error: String) -> ScenarioReport {
    ScenarioReport {
        parties,
        settings,
        dim,
        status: ScenarioStatus::Invalid,
        error: Some(error),
        notes: Vec::new(),
        quantum: None,
        classical: None,
        violation: None,
        violation_factor: None,
        certificates: None,
        timings: Timings::default(),
        l_max: None,
        classical_bound: None,
    }
}

/// Runs every requested phase for one scenario. Parameter problems and
/// budget/cap exhaustion are recorded in the report, never panicked on.
pub fn run_scenario(
    parties: usize,
    settings: usize,
    dim: usize,
    options: &ScenarioOptions,
) -> ScenarioReport {
    if parties > MAX_PARTIES {
        return invalid_report(
            parties,
            settings,
            dim,
            format!("number of parties must be at most {MAX_PARTIES} (got {parties})"),
        );
    }
    let scenario = match BellScenario::new(parties, settings, dim) {
        Ok(s) => s,
        Err(err) => return invalid_report(parties, settings, dim, err.to_string()),
    };

    let mut timings = Timings::default();
    let mut notes = Vec::new();

    let started = Instant::now();
    let expectation = bell_expectation_ghz(&scenario);
    timings.quantum = started.elapsed();
    let expected = (dim - 1) as f64;
    let eigencheck = if options.eigencheck {
        let started = Instant::now();
        match ghz_eigencheck(&scenario, options.dense_cap) {
            Ok(residual) => {
                timings.eigencheck = started.elapsed();
                Some(EigencheckReport {
                    ran: true,
                    residual: Some(residual),
                    skipped: None,
                })
            }
            Err(err) => Some(EigencheckReport {
                ran: false,
                residual: None,
                skipped: Some(err.to_string()),
            }),
        }
    } else {
        None
    };
    let quantum = QuantumReport {
        bound: expectation.value,
        imag_residue: expectation.imag_magnitude,
        matches_dimension_minus_one: (expectation.value - expected).abs() < QUANTUM_BOUND_TOLERANCE,
        eigencheck,
    };

    let mut classical = None;
    let mut certificates = None;
    let mut l_max = None;
    let mut classical_bound = None;
    let status;

    if parties == PARTIES {
        let constraints = generate_constraints(settings, dim).expect("validated parameters");
        let outcome = run_classical(settings, dim, &constraints, options, &mut timings);
        status = if outcome.disagreement {
            ScenarioStatus::Disagreement
        } else if outcome.report.brute_force.ran && outcome.report.congruence.ran {
            ScenarioStatus::Verified
        } else if outcome.report.brute_force.ran {
            ScenarioStatus::BruteOnly
        } else if outcome.report.congruence.ran {
            ScenarioStatus::CongruenceOnly
        } else {
            ScenarioStatus::OraclesExhausted
        };
        debug_assert!(outcome.any_ran == (status != ScenarioStatus::OraclesExhausted));
        l_max = outcome.l_max;
        classical_bound = outcome.bound;
        classical = Some(outcome.report);

        if options.certificates {
            if constraints.len() <= MAX_SUBSET_CONSTRAINTS {
                let started = Instant::now();
                let system = CongruenceSystem::from_constraints(&constraints)
                    .expect("generated family is well formed");
                let certs = minimal_infeasible_subsets(&system).expect("cap checked above");
                timings.certificates = started.elapsed();
                certificates = Some(
                    certs
                        .iter()
                        .map(|cert| CertificateReport {
                            subset: cert.subset.clone(),
                            constraints: cert
                                .subset
                                .iter()
                                .map(|&i| constraints[i].describe())
                                .collect(),
                            row_combination: cert.row_combination.clone(),
                            reduced: render_reduced(cert, system.labels()),
                            coefficient_gcd: cert.coefficient_gcd,
                            constant: cert.constant,
                            modulus: cert.modulus,
                        })
                        .collect(),
                );
            } else {
                notes.push(format!(
                    "certificates skipped: {} constraints exceed the subset-enumeration cap {}",
                    constraints.len(),
                    MAX_SUBSET_CONSTRAINTS
                ));
            }
        }
    } else {
        notes.push(format!(
            "classical analysis requires {PARTIES} parties (got {parties}); quantum bound only"
        ));
        status = ScenarioStatus::QuantumOnly;
    }

    let violation =
        classical_bound.map(|bound| ratio_f64(bound) < quantum.bound - VIOLATION_MARGIN);
    let violation_factor = l_max.map(|l| ratio_string(l.recip()));

    ScenarioReport {
        parties,
        settings,
        dim,
        status,
        error: None,
        notes,
        quantum: Some(quantum),
        classical,
        violation,
        violation_factor,
        certificates,
        timings,
        l_max,
        classical_bound,
    }
}

/// Runs the cross product of setting counts and dimensions; scenarios execute
/// in parallel but the report order is the deterministic input order.
pub fn sweep(
    parties: usize,
    settings_list: &[usize],
    dims: &[usize],
    options: &ScenarioOptions,
) -> RunReport {
    let grid: Vec<(usize, usize)> = settings_list
        .iter()
        .flat_map(|&m| dims.iter().map(move |&d| (m, d)))
        .collect();
    let scenarios: Vec<ScenarioReport> = grid
        .par_iter()
        .map(|&(m, d)| run_scenario(parties, m, d, options))
        .collect();
    RunReport {
        schema_version: SCHEMA_VERSION,
        parties,
        method: options.method,
        budget: options.budget,
        scenarios,
    }
}

/// Process exit code for a finished run: oracle disagreement dominates (it
/// signals a bug), then validation errors, then full oracle exhaustion.
pub fn exit_code(run: &RunReport) -> i32 {
    let statuses: Vec<ScenarioStatus> = run.scenarios.iter().map(|s| s.status).collect();
    if statuses.contains(&ScenarioStatus::Disagreement) {
        3
    } else if statuses.contains(&ScenarioStatus::Invalid) {
        2
    } else if statuses.contains(&ScenarioStatus::OraclesExhausted) {
        4
    } else {
        0
    }
}

/// Full report as pretty JSON with stable key order and a trailing newline.
pub fn to_json(run: &RunReport) -> String {
    let mut out = serde_json::to_string_pretty(run).expect("report serializes");
    out.push('\n');
    out
}

/// Summary CSV, one row per scenario.
pub fn to_csv(run: &RunReport) -> String {
    let mut out = String::from("N,M,d,quantum,classical_num,classical_den,violation\n");
    for scenario in &run.scenarios {
        let quantum = scenario
            .quantum
            .as_ref()
            .map(|q| q.bound.to_string())
            .unwrap_or_default();
        let (num, den) = scenario
            .classical_bound
            .map(|b| (b.numer().to_string(), b.denom().to_string()))
            .unwrap_or_default();
        let violation = scenario
            .violation
            .map(|v| v.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            scenario.parties, scenario.settings, scenario.dim, quantum, num, den, violation
        );
    }
    out
}

fn describe_status(status: ScenarioStatus) -> &'static str {
    match status {
        ScenarioStatus::Invalid => "invalid",
        ScenarioStatus::Verified => "verified",
        ScenarioStatus::BruteOnly => "brute_only",
        ScenarioStatus::CongruenceOnly => "congruence_only",
        ScenarioStatus::QuantumOnly => "quantum_only",
        ScenarioStatus::Disagreement => "DISAGREEMENT",
        ScenarioStatus::OraclesExhausted => "oracles_exhausted",
    }
}

/// Human-readable rendering: one block per scenario plus a summary table with
/// the violation factor `(quantum + 1)/(classical + 1) = 1/L`.
pub fn render_text(run: &RunReport) -> String {
    let mut out = String::new();
    for scenario in &run.scenarios {
        let _ = writeln!(
            out,
            "scenario N={} M={} d={}: {}",
            scenario.parties,
            scenario.settings,
            scenario.dim,
            describe_status(scenario.status)
        );
        if let Some(error) = &scenario.error {
            let _ = writeln!(out, "  error            {error}");
            continue;
        }
        if let Some(quantum) = &scenario.quantum {
            let _ = writeln!(
                out,
                "  quantum bound    {:.9} (imag residue {:.2e})",
                quantum.bound, quantum.imag_residue
            );
            if let Some(eigen) = &quantum.eigencheck {
                match (&eigen.residual, &eigen.skipped) {
                    (Some(residual), _) => {
                        let _ = writeln!(out, "  eigencheck       residual {residual:.2e}");
                    }
                    (None, Some(reason)) => {
                        let _ = writeln!(out, "  eigencheck       skipped: {reason}");
                    }
                    _ => {}
                }
            }
        }
        if let Some(classical) = &scenario.classical {
            match (&classical.l_max, &classical.bound, classical.bound_decimal) {
                (Some(l), Some(bound), Some(decimal)) => {
                    let oracles = match (classical.brute_force.ran, classical.congruence.ran) {
                        (true, true) => "brute force + congruence",
                        (true, false) => "brute force",
                        (false, true) => "congruence",
                        (false, false) => "none",
                    };
                    let _ = writeln!(
                        out,
                        "  classical bound  {bound} ({decimal:.6}) with L_max = {l} via {oracles}"
                    );
                }
                _ => {
                    let _ = writeln!(out, "  classical bound  unavailable");
                    for oracle in [&classical.brute_force, &classical.congruence] {
                        if let Some(reason) = &oracle.skipped {
                            let _ = writeln!(out, "                   skipped: {reason}");
                        }
                    }
                }
            }
        }
        match (scenario.violation, &scenario.violation_factor) {
            (Some(true), Some(factor)) => {
                let _ = writeln!(out, "  violation        yes (factor {factor})");
            }
            (Some(false), _) => {
                let _ = writeln!(out, "  violation        no");
            }
            _ => {}
        }
        if let Some(certs) = &scenario.certificates {
            let _ = writeln!(out, "  minimal infeasible subsets: {}", certs.len());
            for cert in certs {
                let _ = writeln!(out, "    {:?} -> {}", cert.subset, cert.reduced);
            }
        }
        for note in &scenario.notes {
            let _ = writeln!(out, "  note             {note}");
        }
        let t = &scenario.timings;
        let _ = writeln!(
            out,
            "  timing           quantum {:?}, eigencheck {:?}, brute {:?}, congruence {:?}",
            t.quantum, t.eigencheck, t.brute_force, t.congruence
        );
    }

    let _ = writeln!(out, "summary");
    let _ = writeln!(
        out,
        "  {:>2} {:>2} {:>2}  {:>10}  {:>9}  {:>6}  {:>9}  {:>7}  status",
        "N", "M", "d", "quantum", "classical", "L_max", "violation", "factor"
    );
    for scenario in &run.scenarios {
        let quantum = scenario
            .quantum
            .as_ref()
            .map(|q| format!("{:.6}", q.bound))
            .unwrap_or_else(|| "-".into());
        let classical = scenario
            .classical_bound
            .map(ratio_string)
            .unwrap_or_else(|| "-".into());
        let l_max = scenario
            .l_max
            .map(ratio_string)
            .unwrap_or_else(|| "-".into());
        let violation = match scenario.violation {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        let factor = scenario
            .violation_factor
            .clone()
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "  {:>2} {:>2} {:>2}  {:>10}  {:>9}  {:>6}  {:>9}  {:>7}  {}",
            scenario.parties,
            scenario.settings,
            scenario.dim,
            quantum,
            classical,
            l_max,
            violation,
            factor,
            describe_status(scenario.status)
        );
    }
    out
}
