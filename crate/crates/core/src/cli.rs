//! Subcommand dispatch and report rendering.
//!
//! Exit codes: 0 on success, 2 on schema or validation errors, 3 when
//! `--strict` is set and the verdict is inconclusive for lack of inputs
//! (no local-existence assertion, or no datum).

use crate::datum::LocalDatum;
use crate::descent::{build_table, check_rho_descent, descent_verdict, odd_place_parity};
use crate::engine::{decide, GroupEvidence, Outcome, Reason, RhoEntry, Verdict};
use crate::error::{Error, Result};
use crate::local::Place;
use crate::multiquad::{v_intersection, VIntersection};
use crate::obstruction::{brute_force_sha, build_c, build_c_indep, check_iso_f};
use crate::schema::{
    parse_document, EmptyCertificateDoc, Report, ReportBody, RunInputs, TableRowDoc,
};
use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Read;

#[derive(Parser)]
#[command(name = "hasse-embed", version)]
#[command(about = "Exact local-global embedding obstruction calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input configuration document (JSON file path, or - for stdin)
    #[arg(short, long, global = true, default_value = "-")]
    input: String,

    /// Emit the machine-readable JSON report instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Exit 3 when the verdict is inconclusive for missing inputs
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and report the verdict with evidence
    Analyze,
    /// Report the obstruction groups C and C_indep with witnesses
    Obstruction,
    /// Tabulate rho on the basis classes of C
    Rho,
    /// Search V_i intersect V_j for a witness place (1-based indices)
    Witness { i: usize, j: usize },
    /// Compare the brute-force tuple model against C
    ShaCheck,
    /// Splitting tables, the descent identity, and verdict transfer
    Descent,
}

/// What a CLI invocation produced; the binary prints and exits with this.
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn fail(code: i32, message: String) -> CliOutcome {
    CliOutcome { code, stdout: String::new(), stderr: message }
}

/// Entry point shared by the binary and tests.
pub fn run<I, S>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version on stdout with code 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                CliOutcome { code, stdout: rendered, stderr: String::new() }
            } else {
                fail(code, rendered)
            };
        }
    };
    let text = match read_input(&cli.input) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("error: {e}\n")),
    };
    match dispatch(&cli, &text) {
        Ok(report) => {
            let code = strict_code(&cli, &report);
            let stdout = if cli.json {
                format!("{}\n", report.to_json())
            } else {
                render_human(&report)
            };
            CliOutcome { code, stdout, stderr: String::new() }
        }
        Err(e) => fail(e.exit_code(), format!("error: {e}\n")),
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn strict_code(cli: &Cli, report: &Report) -> i32 {
    if !cli.strict {
        return 0;
    }
    let verdict = match &report.body {
        ReportBody::Analyze { verdict } => Some(verdict),
        ReportBody::Descent { verdict, .. } => Some(verdict),
        _ => None,
    };
    match verdict {
        Some(v)
            if v.outcome == Outcome::Inconclusive
                && matches!(v.reason, Reason::NoLocalAssertion | Reason::DatumRequired) =>
        {
            3
        }
        _ => 0,
    }
}

/// A report request against parsed inputs; the string forms accepted by
/// [`ReportCommand::parse`] are the CLI subcommand names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportCommand {
    Analyze,
    Obstruction,
    Rho,
    Witness { i: usize, j: usize },
    ShaCheck,
    Descent,
}

impl ReportCommand {
    /// Parse a command line like "analyze" or "witness 1 2".
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let head = words.next().unwrap_or("");
        let cmd = match head {
            "analyze" => ReportCommand::Analyze,
            "obstruction" => ReportCommand::Obstruction,
            "rho" => ReportCommand::Rho,
            "sha-check" => ReportCommand::ShaCheck,
            "descent" => ReportCommand::Descent,
            "witness" => {
                let parse_idx = |w: Option<&str>| -> Result<usize> {
                    w.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Schema {
                        path: "command".to_string(),
                        message: "witness takes two 1-based factor indices".to_string(),
                    })
                };
                let i = parse_idx(words.next())?;
                let j = parse_idx(words.next())?;
                ReportCommand::Witness { i, j }
            }
            other => {
                return Err(Error::Schema {
                    path: "command".to_string(),
                    message: format!("unknown command {other:?}"),
                })
            }
        };
        if words.next().is_some() {
            return Err(Error::Schema {
                path: "command".to_string(),
                message: "trailing arguments".to_string(),
            });
        }
        Ok(cmd)
    }
}

/// Build the report for one command against validated inputs.
pub fn report_for(inputs: &RunInputs, command: &ReportCommand) -> Result<Report> {
    let body = match command {
        ReportCommand::Analyze => analyze(inputs)?,
        ReportCommand::Obstruction => obstruction(inputs)?,
        ReportCommand::Rho => rho_table(inputs)?,
        ReportCommand::Witness { i, j } => witness(inputs, *i, *j)?,
        ReportCommand::ShaCheck => sha_check(inputs)?,
        ReportCommand::Descent => descent(inputs)?,
    };
    Ok(Report::new(body))
}

fn dispatch(cli: &Cli, text: &str) -> Result<Report> {
    let inputs = parse_document(text)?.into_inputs()?;
    let command = match cli.command {
        Command::Analyze => ReportCommand::Analyze,
        Command::Obstruction => ReportCommand::Obstruction,
        Command::Rho => ReportCommand::Rho,
        Command::Witness { i, j } => ReportCommand::Witness { i, j },
        Command::ShaCheck => ReportCommand::ShaCheck,
        Command::Descent => ReportCommand::Descent,
    };
    report_for(&inputs, &command)
}

fn analyze(inputs: &RunInputs) -> Result<ReportBody> {
    let verdict = decide(
        &inputs.config,
        inputs.datum.as_ref(),
        inputs.clifford.as_deref(),
        inputs.assert_local_existence,
        inputs.prime_bound,
    )?;
    Ok(ReportBody::Analyze { verdict })
}

fn obstruction(inputs: &RunInputs) -> Result<ReportBody> {
    let c = build_c(&inputs.config, inputs.prime_bound)?;
    let c_indep = build_c_indep(&inputs.config);
    Ok(ReportBody::Obstruction {
        c: GroupEvidence::of(&c),
        c_indep: GroupEvidence::of(&c_indep),
    })
}

fn rho_table(inputs: &RunInputs) -> Result<ReportBody> {
    let datum = inputs.datum.as_ref().ok_or(Error::DatumRequired)?;
    crate::datum::validate_datum(&inputs.config, datum)?;
    let group = build_c(&inputs.config, inputs.prime_bound)?;
    let mut rho = Vec::new();
    for c in group.basis() {
        let value = crate::datum::rho(&inputs.config, &group, datum, &c)?;
        let class = (0..c.len()).filter(|&i| c[i]).map(|i| i + 1).collect();
        rho.push(RhoEntry { class, value });
    }
    Ok(ReportBody::Rho { obstruction: GroupEvidence::of(&group), rho })
}

fn witness(inputs: &RunInputs, i: usize, j: usize) -> Result<ReportBody> {
    let m = inputs.config.index_count();
    for idx in [i, j] {
        if idx == 0 || idx > m {
            return Err(Error::BadFactorIndex(idx));
        }
    }
    let a = inputs.config.factor(i - 1)?;
    let b = inputs.config.factor(j - 1)?;
    let body = match v_intersection(a, b, inputs.prime_bound)? {
        VIntersection::Witness(place) => ReportBody::Witness {
            pair: (i, j),
            witness: Some(place),
            empty_certificate: None,
        },
        VIntersection::Empty(cert) => ReportBody::Witness {
            pair: (i, j),
            witness: None,
            empty_certificate: Some(EmptyCertificateDoc {
                special_places: cert.special_places,
                patterns_checked: cert.patterns_checked,
            }),
        },
    };
    Ok(body)
}

fn sha_check(inputs: &RunInputs) -> Result<ReportBody> {
    let sha = brute_force_sha(&inputs.config)?;
    let c = build_c(&inputs.config, inputs.prime_bound)?;
    let isomorphic = check_iso_f(&inputs.config, inputs.prime_bound)?;
    let tuples = sha
        .tuples()
        .iter()
        .map(|t| t.iter().map(|&b| u8::from(b)).collect())
        .collect();
    Ok(ReportBody::ShaCheck {
        index_count: sha.index_count(),
        tuples,
        sha_quotient_order: sha.quotient_order().to_string(),
        c_order: c.order().to_string(),
        isomorphic,
    })
}

fn descent(inputs: &RunInputs) -> Result<ReportBody> {
    let ext = inputs
        .extension
        .as_ref()
        .ok_or_else(|| Error::Schema {
            path: "extension".to_string(),
            message: "an extension polynomial is required for descent".to_string(),
        })?;
    let empty;
    let datum = match inputs.datum.as_ref() {
        Some(d) => d,
        None => {
            empty = LocalDatum::new(inputs.config.algebra().orientation_active(), vec![]);
            &empty
        }
    };
    let group = build_c(&inputs.config, inputs.prime_bound)?;
    let rho_identity =
        check_rho_descent(&inputs.config, &group, datum, ext, &BTreeMap::new())?;
    let mut places: Vec<Place> = datum.support_places().into_iter().collect();
    places.push(Place::Infinite);
    let table = build_table(ext, &places, &BTreeMap::new())?;
    for v in table.rows().keys() {
        odd_place_parity(&table, v)?;
    }
    let table_doc: Vec<TableRowDoc> = table
        .rows()
        .iter()
        .map(|(place, row)| TableRowDoc::of(place, row))
        .collect();
    let verdict_over_extension = decide(
        &inputs.config,
        inputs.datum.as_ref(),
        inputs.clifford.as_deref(),
        inputs.assert_local_existence,
        inputs.prime_bound,
    )?;
    let verdict = descent_verdict(verdict_over_extension.clone());
    Ok(ReportBody::Descent {
        table: table_doc,
        rho_identity,
        verdict_over_extension,
        verdict,
    })
}

fn class_string(class: &[usize]) -> String {
    let xs: Vec<String> = class.iter().map(|i| i.to_string()).collect();
    format!("[{}]", xs.join(", "))
}

fn classes_string(classes: &[Vec<usize>]) -> String {
    let inner: Vec<String> = classes
        .iter()
        .map(|c| {
            let xs: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            format!("[{}]", xs.join(", "))
        })
        .collect();
    format!("[{}]", inner.join(", "))
}

fn group_lines(label: &str, ev: &GroupEvidence, out: &mut String) {
    out.push_str(&format!(
        "{label}: order {}, classes {}",
        ev.order,
        classes_string(&ev.classes)
    ));
    if ev.witnesses.is_empty() {
        out.push_str(", no witnesses\n");
    } else {
        out.push('\n');
        for w in &ev.witnesses {
            match &w.place {
                Some(v) => out.push_str(&format!(
                    "  witness ({}, {}): place {v}\n",
                    w.pair.0, w.pair.1
                )),
                None => out.push_str(&format!(
                    "  witness ({}, {}): linearly disjoint\n",
                    w.pair.0, w.pair.1
                )),
            }
        }
    }
}

fn verdict_lines(v: &Verdict, out: &mut String) {
    let outcome = match v.outcome {
        Outcome::Exists => "Exists",
        Outcome::NotExists => "NotExists",
        Outcome::Inconclusive => "Inconclusive",
    };
    out.push_str(&format!("{outcome} ({})\n", v.reason));
    if let Some(row) = &v.evidence.violating_class {
        out.push_str(&format!(
            "  violating class {}: rho = {}\n",
            class_string(&row.class),
            row.value
        ));
    }
    if let Some(rows) = &v.evidence.rho_table {
        for row in rows {
            out.push_str(&format!(
                "  rho{} = {}\n",
                class_string(&row.class),
                row.value
            ));
        }
    }
    if let Some(g) = &v.evidence.obstruction {
        group_lines("  obstruction", g, out);
    }
    if let Some(g) = &v.evidence.independence {
        group_lines("  independence", g, out);
    }
    if let Some(h) = v.evidence.hub_factor {
        out.push_str(&format!("  hub factor: {h}\n"));
    }
    if let Some(checks) = &v.evidence.oriented_checks {
        for c in checks {
            out.push_str(&format!(
                "  critical place {}: Clifford classes {}\n",
                c.place,
                if c.classes_equal { "equal" } else { "differ" }
            ));
        }
    }
    if let Some(missing) = &v.evidence.missing {
        for m in missing {
            out.push_str(&format!("  missing: {m}\n"));
        }
    }
}

fn render_human(report: &Report) -> String {
    let mut out = String::new();
    match &report.body {
        ReportBody::Analyze { verdict } => verdict_lines(verdict, &mut out),
        ReportBody::Obstruction { c, c_indep } => {
            group_lines("C", c, &mut out);
            group_lines("C_indep", c_indep, &mut out);
        }
        ReportBody::Rho { obstruction, rho } => {
            group_lines("C", obstruction, &mut out);
            if rho.is_empty() {
                out.push_str("rho: trivial group, nothing to evaluate\n");
            }
            for row in rho {
                out.push_str(&format!(
                    "rho{} = {}\n",
                    class_string(&row.class),
                    row.value
                ));
            }
        }
        ReportBody::Witness { pair, witness, empty_certificate } => match witness {
            Some(v) => out.push_str(&format!("place {v}\n")),
            None => {
                let cert = empty_certificate.as_ref().expect("empty carries certificate");
                let specials: Vec<String> =
                    cert.special_places.iter().map(|p| p.to_string()).collect();
                out.push_str(&format!(
                    "empty: V_{} and V_{} share no place (special places {}; {} patterns)\n",
                    pair.0,
                    pair.1,
                    specials.join(", "),
                    cert.patterns_checked
                ));
            }
        },
        ReportBody::ShaCheck {
            index_count,
            tuples,
            sha_quotient_order,
            c_order,
            isomorphic,
        } => {
            let words: Vec<String> = tuples
                .iter()
                .map(|t| t.iter().map(|b| b.to_string()).collect::<String>())
                .collect();
            out.push_str(&format!(
                "tuple model on {index_count} indices: quotient order {sha_quotient_order}, \
                 C order {c_order}, isomorphic: {isomorphic}\n"
            ));
            out.push_str(&format!("tuples: {}\n", words.join(" ")));
        }
        ReportBody::Descent { table, rho_identity, verdict_over_extension, verdict } => {
            out.push_str("splitting table:\n");
            for row in table {
                out.push_str(&format!(
                    "  place {}: degrees {:?} ({})\n",
                    row.place,
                    row.degrees,
                    match row.provenance {
                        crate::descent::Provenance::Computed => "computed",
                        crate::descent::Provenance::UserSupplied => "user-supplied",
                    }
                ));
            }
            out.push_str(&format!("rho descent identity: {rho_identity}\n"));
            out.push_str("over the extension: ");
            verdict_lines(verdict_over_extension, &mut out);
            out.push_str("transferred: ");
            verdict_lines(verdict, &mut out);
        }
    }
    out
}
