//! `sponge`: validate weight systems, sponges and characteristic data, reduce
//! quasitoric pairs, compare data and run the built-in catalog.
//!
//! Exit status: 0 when every check passes, 1 on validation failures, 2 on
//! input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use torus_sponge::catalog;
use torus_sponge::chardata::{
    assemble_euler_cycle, cocycle_check, compatibility_check, orbit_types, validate_mu, CharacteristicData,
};
use torus_sponge::classify::{canonical_invariants, compare, Comparison};
use torus_sponge::format;
use torus_sponge::quasitoric::{find_strict_subtorus, reduce, validate_star, SubtorusChoice};
use torus_sponge::report::ValidationReport;
use torus_sponge::sponge::{face_star, filtration, homology, validate_sponge};
use torus_sponge::{Error, IntVector};

const CATALOG_DIR_VAR: &str = "SPONGE_CATALOG_DIR";

#[derive(Parser, Debug)]
#[command(name = "sponge", version, about = "Combinatorial invariants of complexity-one torus actions")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cramer coefficients, general position and strictness of a weight system.
    ValidateWeights { file: PathBuf },
    /// Boundary and local-model counts of a sponge complex.
    ValidateSponge { file: PathBuf },
    /// All validators on characteristic data, including Euler cycle assembly.
    ValidateChardata { file: PathBuf },
    /// Reduce a quasitoric pair to characteristic data.
    Reduce {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        /// Character α_T as comma-separated integers; searched for when omitted.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Entry bound for the α_T search.
        #[arg(long, default_value_t = 3)]
        bound: u32,
        /// Write the characteristic data here (default: stdout in text mode).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide cellular equivalence of two characteristic data files.
    Compare { first: PathBuf, second: PathBuf },
    /// Integral homology of a sponge (or of the sponge inside characteristic data).
    Homology { file: PathBuf },
    /// Load and verify a built-in example.
    Catalog {
        /// g42, f3, cp3-reduction or local-model-<n>.
        name: Option<String>,
        /// List the available names.
        #[arg(long)]
        list: bool,
        /// Write the entry's characteristic data here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// A command's outcome: one line per check.
struct Report {
    command: String,
    inputs: Vec<String>,
    results: Vec<(String, Status, String)>,
    data: Option<Value>,
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

impl Report {
    fn new(command: &str, inputs: &[&Path]) -> Self {
        Report {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            results: Vec::new(),
            data: None,
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.results.push((name.to_string(), if ok { Status::Pass } else { Status::Fail }, detail.into()));
    }

    fn info(&mut self, name: &str, detail: impl Into<String>) {
        self.results.push((name.to_string(), Status::Info, detail.into()));
    }

    /// One failing line per violation, or one passing line.
    fn violations(&mut self, name: &str, r: &ValidationReport) {
        if r.passes() {
            self.check(name, true, "");
        }
        for v in &r.violations {
            self.check(&format!("{}/{}", name, v.check), false, format!("[{}] {}", v.cells.join(", "), v.detail));
        }
    }

    fn failed(&self) -> bool {
        self.results.iter().any(|(_, s, _)| *s == Status::Fail)
    }

    fn to_json(&self) -> Value {
        let results: Vec<Value> =
            self.results.iter().map(|(c, s, d)| json!({"check": c, "status": s.as_str(), "detail": d})).collect();
        let mut obj = Map::new();
        obj.insert("command".into(), Value::from(self.command.clone()));
        obj.insert("inputs".into(), json!(self.inputs));
        obj.insert("results".into(), Value::Array(results));
        if let Some(d) = &self.data {
            obj.insert("data".into(), d.clone());
        }
        Value::Object(obj)
    }

    fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if !self.inputs.is_empty() {
            out.push_str(&format!("inputs: {}\n", self.inputs.join(" ")));
        }
        for (c, s, d) in &self.results {
            let tag = match s {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            if d.is_empty() {
                out.push_str(&format!("{} {}\n", tag, c));
            } else {
                out.push_str(&format!("{} {}: {}\n", tag, c, d));
            }
        }
        out
    }
}

/// Failures that abort a command.
enum Failure {
    /// Unreadable or malformed input (exit 2).
    Input(String),
    /// The input was read but fails a hard validation (exit 1).
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(_) | Error::StarCondition(_) | Error::Precondition(_) | Error::Coloring(..) => {
                Failure::Invalid(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {}", path.display(), e)))?;
    format::parse(&text).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {}", path.display(), e)))
}

fn parse_alpha(s: &str) -> Result<IntVector, Failure> {
    let entries = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| Failure::Input(format!("`{}` is not an integer in --alpha", x.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntVector::new(entries))
}

fn validate_weights(path: &Path) -> Result<Report, Failure> {
    let ws = format::weights_from_json(&read_json(path)?)?;
    let mut r = Report::new("validate-weights", &[path]);
    match ws.cramer_coefficients() {
        Ok(cc) => {
            r.info("cramer-c-tilde", IntVector::new(cc.c_tilde.clone()).to_string());
            r.info("cramer-c", IntVector::new(cc.c.clone()).to_string());
        }
        Err(e) => r.check("cramer", false, e.to_string()),
    }
    let gp = ws.is_general_position();
    r.check("general-position", gp, "");
    if gp {
        let strict = ws.is_strictly_appropriate()?;
        r.check("strictly-appropriate", strict, format!("strict = {}", strict));
        for i in 0..ws.n() {
            let st = ws.stabilizer_structure(&[i])?;
            let orders: Vec<String> = st.finite_orders.iter().map(|x| x.to_string()).collect();
            r.info(
                &format!("stabilizer-{}", i),
                format!("torus rank {}, finite orders [{}]", st.torus_rank, orders.join(", ")),
            );
        }
    }
    r.data = Some(format::weights_to_json(&ws));
    Ok(r)
}

fn validate_sponge_cmd(path: &Path) -> Result<Report, Failure> {
    let s = format::sponge_from_json(&read_json(path)?)?;
    let mut r = Report::new("validate-sponge", &[path]);
    let rep = validate_sponge(&s);
    r.violations("sponge", &rep);
    if rep.passes() {
        let bad: Vec<String> = (0..s.len())
            .filter(|&c| !face_star(&s, s.id(c)).is_ok_and(|st| st.is_local_model))
            .map(|c| s.id(c).to_string())
            .collect();
        r.check("stars", bad.is_empty(), if bad.is_empty() { String::new() } else { bad.join(", ") });
    }
    for (k, z) in filtration(&s).iter().enumerate() {
        r.info(&format!("filtration-{}", k), format!("{} cells", z.len()));
    }
    Ok(r)
}

fn chardata_checks(r: &mut Report, cd: &CharacteristicData) -> Result<(), Failure> {
    r.violations("sponge", &validate_sponge(&cd.sponge));
    r.violations("mu-rank", &validate_mu(cd));
    r.check("compatibility", compatibility_check(cd), "");
    r.violations("cocycle", &cocycle_check(cd));
    match assemble_euler_cycle(cd) {
        Ok(c) => {
            let mut detail = format!("cycle = {}", c.is_cycle);
            if c.determines_euler_class {
                detail.push_str("; local classes determine the Euler class");
            }
            r.check("euler-cycle", c.is_cycle, detail);
        }
        Err(e) => r.check("euler-cycle", false, e.to_string()),
    }
    Ok(())
}

fn validate_chardata_cmd(path: &Path) -> Result<Report, Failure> {
    let cd = format::chardata_from_json(&read_json(path)?)?;
    let mut r = Report::new("validate-chardata", &[path]);
    chardata_checks(&mut r, &cd)?;
    if !r.failed() {
        let types = orbit_types(&cd)?;
        r.info("orbit-types", format!("{} strata", types.len()));
    }
    Ok(r)
}

fn reduce_cmd(
    polytope: &Path,
    lambda: &Path,
    alpha: Option<&str>,
    bound: u32,
) -> Result<(Report, CharacteristicData), Failure> {
    let p = format::polytope_from_json(&read_json(polytope)?)?;
    let l = format::lambda_from_json(&read_json(lambda)?)?;
    let mut r = Report::new("reduce", &[polytope, lambda]);
    let star = validate_star(&p, &l);
    r.violations("star", &star);
    if !star.passes() {
        return Err(Failure::Invalid(star.to_string()));
    }
    let st = match alpha {
        Some(a) => SubtorusChoice::new(parse_alpha(a)?)?,
        None => find_strict_subtorus(&p, &l, bound)?
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Invalid(format!("no strict α_T with entries bounded by {}", bound)))?,
    };
    r.info("alpha", st.alpha_t.to_string());
    let cd = reduce(&p, &l, &st)?;
    chardata_checks(&mut r, &cd)?;
    Ok((r, cd))
}

fn compare_cmd(first: &Path, second: &Path) -> Result<Report, Failure> {
    let a = format::chardata_from_json(&read_json(first)?)?;
    let b = format::chardata_from_json(&read_json(second)?)?;
    let mut r = Report::new("compare", &[first, second]);
    let verdict = compare(&a, &b)?;
    match &verdict {
        Comparison::Equivalent(w) => r.check("verdict", true, format!("Equivalent (global sign {})", w.global_sign)),
        Comparison::Inequivalent(c) => r.check("verdict", false, format!("Inequivalent: {:?}", c)),
        Comparison::Incomparable(reason) => r.check("verdict", false, format!("Incomparable: {}", reason)),
    }
    r.info("scope", "equivalence is decided among cell-structure-preserving maps");
    let mut data = format::comparison_to_json(&verdict);
    if let Value::Object(obj) = &mut data {
        obj.insert(
            "fingerprints".into(),
            json!([
                format::fingerprint_to_json(&canonical_invariants(&a)?),
                format::fingerprint_to_json(&canonical_invariants(&b)?),
            ]),
        );
    }
    r.data = Some(data);
    Ok(r)
}

fn homology_cmd(path: &Path) -> Result<Report, Failure> {
    let v = read_json(path)?;
    let s =
        if v.get("sponge").is_some() { format::chardata_from_json(&v)?.sponge } else { format::sponge_from_json(&v)? };
    let mut r = Report::new("homology", &[path]);
    let h = homology(&s)?;
    for (d, b) in h.betti.iter().enumerate() {
        let t: Vec<String> = h.torsion[d].iter().map(|x| x.to_string()).collect();
        r.info(&format!("H{}", d), format!("rank {}, torsion [{}]", b, t.join(", ")));
    }
    r.data = Some(format::homology_to_json(&h));
    Ok(r)
}

fn catalog_cmd(name: Option<&str>, list: bool, export: Option<&Path>) -> Result<Report, Failure> {
    if list || name.is_none() {
        let mut r = Report::new("catalog", &[]);
        for n in catalog::NAMES {
            r.info("entry", n);
        }
        r.info("entry", "local-model-<n> for 2 <= n <= 8");
        return Ok(r);
    }
    let name = name.expect("checked above");
    let mut r = Report::new("catalog", &[]);
    r.inputs.push(name.to_string());
    let override_file = std::env::var_os(CATALOG_DIR_VAR).map(|d| PathBuf::from(d).join(format!("{}.json", name)));
    let cd = match override_file.filter(|p| p.exists()) {
        Some(path) => {
            let cd = format::chardata_from_json(&read_json(&path)?)?;
            r.info("source", path.display().to_string());
            chardata_checks(&mut r, &cd)?;
            cd
        }
        None => {
            let entry = catalog::load(name)?;
            r.info("description", entry.description.clone());
            for o in catalog::verify(&entry) {
                r.check(&o.check, o.passed, o.detail);
            }
            entry.data
        }
    };
    if let Some(path) = export {
        write_file(path, &format::to_canonical_string(&format::chardata_to_json(&cd)))?;
    }
    r.data = Some(format::chardata_to_json(&cd));
    Ok(r)
}

fn emit(cli: &Cli, report: &Report, extra_text: Option<String>) -> Result<(), Failure> {
    let text = match cli.format {
        OutputFormat::Json => format::to_canonical_string(&report.to_json()),
        OutputFormat::Text => {
            let mut t = report.to_text();
            if let Some(x) = extra_text {
                t.push_str(&x);
            }
            t
        }
    };
    match &cli.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let mut extra = None;
    let report = match &cli.command {
        Command::ValidateWeights { file } => validate_weights(file)?,
        Command::ValidateSponge { file } => validate_sponge_cmd(file)?,
        Command::ValidateChardata { file } => validate_chardata_cmd(file)?,
        Command::Reduce { polytope, lambda, alpha, bound, emit } => {
            let (mut r, cd) = reduce_cmd(polytope, lambda, alpha.as_deref(), *bound)?;
            let text = format::to_canonical_string(&format::chardata_to_json(&cd));
            match emit {
                Some(path) => write_file(path, &text)?,
                None => extra = Some(text),
            }
            r.data = Some(format::chardata_to_json(&cd));
            r
        }
        Command::Compare { first, second } => compare_cmd(first, second)?,
        Command::Homology { file } => homology_cmd(file)?,
        Command::Catalog { name, list, export } => catalog_cmd(name.as_deref(), *list, export.as_deref())?,
    };
    emit(cli, &report, extra)?;
    Ok(!report.failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("validation failed: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
