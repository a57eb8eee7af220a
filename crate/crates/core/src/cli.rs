//! Command-line front end: `tor`, `toric`, `strata`, `group`, `ss` and `selftest`.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 internal inconsistency.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::graded::{GradedModule, ModuleJson, WeightedGradedVectorSpace, WeightedJson};
use crate::groups::catalog_lookup;
use crate::selftest::{self, FixtureSet, Options};
use crate::spectral::{degeneration_certificate, em_residue_field, Page, PurityFlags};
use crate::strata::{equivariant_series, recover_from_strata, OrbitStratification};
use crate::toric::{Fan, FanFile};
use crate::tor::{assemble_cohomology, koszul_tor, tor_with_residue_field, BigradedTor, Method, TorEntry, TorJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "emtor", version, about = "Weight-filtered equivariant cohomology from bigraded Tor")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Koszul,
    Bar,
    Smith,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tor of a graded module (or a saved Tor table) against Q, and the cohomology it assembles into.
    Tor(TorArgs),
    /// Smoothness, completeness, h-vector and weighted cohomology of toric varieties.
    Toric(ToricArgs),
    /// Equivariant series of an orbit stratification.
    Strata(StrataArgs),
    /// Classifying ring and weighted cohomology of a catalog group.
    Group(GroupArgs),
    /// Pages of the bar-degree spectral sequence and the degeneration certificate.
    Ss(SsArgs),
    /// Runs acceptance criteria 1-9 on the bundled or given fixtures.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct TorArgs {
    /// Module JSON, or a Tor report previously emitted with `--format json`.
    input: PathBuf,
    /// Truncation degree; defaults to the module's.
    #[arg(short = 'D', long = "degree")]
    degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Koszul)]
    method: MethodArg,
}

#[derive(Debug, Args)]
struct ToricArgs {
    /// Fan file: a single fan or a family.
    input: PathBuf,
    #[arg(short = 'D', long = "degree", default_value_t = 12)]
    degree: usize,
    /// Also write the Stanley-Reisner module JSON (single fans only).
    #[arg(long)]
    module_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StrataArgs {
    /// Orbit stratification file.
    input: PathBuf,
    #[arg(short = 'D', long = "degree", default_value_t = 20)]
    degree: usize,
    /// Module structure to run through Tor, over the classifying ring of the group.
    #[arg(long)]
    module: Option<PathBuf>,
    /// Acting group; defaults to the one named in the file.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// Catalog spec such as `SL:3`, `torus:2` or `custom:[2,6]`.
    spec: String,
    #[arg(short = 'D', long = "degree", default_value_t = 24)]
    degree: usize,
}

#[derive(Debug, Args)]
struct SsArgs {
    /// Module JSON over a polynomial ring.
    input: Option<PathBuf>,
    /// Use Q over the classifying ring of this group instead of a module file.
    #[arg(long, conflicts_with = "input")]
    group: Option<String>,
    /// Use the Stanley-Reisner module of this fan file instead of a module file.
    #[arg(long, conflicts_with_all = ["input", "group"])]
    fan: Option<PathBuf>,
    #[arg(short = 'D', long = "degree", default_value_t = 6)]
    degree: usize,
    /// Declare the inputs pure and print the degeneration certificate.
    #[arg(long)]
    pure: bool,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Fixture directory; defaults to the fixtures compiled into the binary.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Seed for the randomized criteria; recorded instance fingerprints are then skipped.
    #[arg(long)]
    seed: Option<u64>,
}

/// A failed run, with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Inconsistent(_) => EXIT_INCONSISTENT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Inconsistent(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

/// A rendered report plus an exit code for runs that finish but fail a check.
struct Rendered {
    text: String,
    code: i32,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(r) => match emit(&cli.out, &r.text) {
            Ok(()) => r.code,
            Err(f) => {
                eprintln!("error: {}", f.message());
                f.code()
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Rendered, Failure> {
    match &cli.command {
        Command::Tor(a) => cmd_tor(a, cli.format),
        Command::Toric(a) => cmd_toric(a, cli.format),
        Command::Strata(a) => cmd_strata(a, cli.format),
        Command::Group(a) => cmd_group(a, cli.format),
        Command::Ss(a) => cmd_ss(a, cli.format),
        Command::Selftest(a) => cmd_selftest(a, cli.format),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_module(path: &Path) -> Result<GradedModule, Failure> {
    let j: ModuleJson = serde_json::from_str(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let m = GradedModule::from_json(&j).map_err(invalid)?;
    if let Some(v) = m.validate().first() {
        return Err(invalid(format!("{}: {v}", path.display())));
    }
    Ok(m)
}

fn weighted_rows(w: &WeightedGradedVectorSpace, out: &mut String) {
    let _ = writeln!(out, "{:>6} {:>6} {:>6}", "n", "weight", "dim");
    for e in w.entries() {
        let _ = writeln!(out, "{:>6} {:>6} {:>6}", e.n, e.weight, e.dim);
    }
}

fn tor_rows(t: &BigradedTor, out: &mut String) {
    let _ = writeln!(out, "Tor_p^q (trusted for q <= {})", t.trusted_q());
    let _ = writeln!(out, "{:>6} {:>6} {:>6}", "p", "q", "dim");
    for e in t.entries() {
        let mark = if e.q > t.trusted_q() { "  untrusted" } else { "" };
        let _ = writeln!(out, "{:>6} {:>6} {:>6}{mark}", e.p, e.q, e.dim);
    }
}

fn purity_line(w: &WeightedGradedVectorSpace) -> String {
    match w.purity_violation() {
        None => "pure: yes".into(),
        Some((n, wt)) => format!("pure: no (weight {wt} in degree {n})"),
    }
}

/// Degree-weight diagram: one disc per nonzero piece with area proportional
/// to its dimension; pure cohomology sits on the dashed diagonal.
pub fn weight_svg(w: &WeightedGradedVectorSpace, title: &str) -> String {
    let max_n = w.entries().map(|e| e.n).max().unwrap_or(0).max(1);
    let max_w = w.entries().map(|e| e.weight).max().unwrap_or(0).max(max_n);
    let max_dim = w.entries().map(|e| e.dim).max().unwrap_or(1) as f64;
    let (cell, margin) = (40.0, 50.0);
    let width = margin * 2.0 + cell * max_n as f64;
    let height = margin * 2.0 + cell * max_w as f64;
    let x = |n: usize| margin + cell * n as f64;
    let y = |wt: usize| height - margin - cell * wt as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for n in 0..=max_n {
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#dddddd"/><text x="{0}" y="{3}" font-size="11" text-anchor="middle">{n}</text>"##,
            x(n),
            y(0),
            y(max_w),
            y(0) + 18.0
        );
    }
    for wt in 0..=max_w {
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#dddddd"/><text x="{3}" y="{4}" font-size="11" text-anchor="end">{wt}</text>"##,
            x(0),
            x(max_n),
            y(wt),
            x(0) - 10.0,
            y(wt) + 4.0
        );
    }
    let diag = max_n.min(max_w);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        x(0),
        y(0),
        x(diag),
        y(diag)
    );
    for e in w.entries() {
        let r = 0.4 * cell * (e.dim as f64 / max_dim).sqrt();
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{r:.2}" fill="#3366aa"><title>H^{} weight {}: {}</title></circle>"##,
            x(e.n),
            y(e.weight),
            e.n,
            e.weight,
            e.dim
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">degree n</text>"#, width / 2.0, height - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{0}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {0})">weight</text>"#,
        height / 2.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="13" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn weighted_csv(w: &WeightedGradedVectorSpace, table: &str, out: &mut String) {
    for e in w.entries() {
        let _ = writeln!(out, "{table},{},{},{}", e.n, e.weight, e.dim);
    }
}

#[derive(Serialize)]
struct TorReport {
    tor: TorJson,
    cohomology: WeightedJson,
    pure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
}

fn cmd_tor(a: &TorArgs, format: Format) -> Result<Rendered, Failure> {
    let text = read(&a.input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", a.input.display())))?;
    let mut notes = Vec::new();
    let mut agreement = None;
    let saved = match value.get("tor") {
        Some(t) if t.get("entries").is_some() => Some(t.clone()),
        _ => value.get("entries").is_some().then_some(value),
    };
    let tor = if let Some(saved) = saved {
        let j: TorJson = serde_json::from_value(saved).map_err(|e| invalid(format!("{}: {e}", a.input.display())))?;
        let t = BigradedTor::from_json(&j).map_err(invalid)?;
        notes.push("source: saved Tor table".to_string());
        match a.degree {
            Some(d) => t.restrict(d),
            None => t,
        }
    } else {
        let m = load_module(&a.input)?;
        let d = a.degree.unwrap_or(m.truncation());
        if d > m.truncation() {
            return Err(invalid(format!("degree {d} exceeds the module truncation {}", m.truncation())));
        }
        let methods: Vec<Method> = match a.method {
            MethodArg::Koszul => vec![Method::Koszul],
            MethodArg::Bar => vec![Method::Bar],
            MethodArg::Smith => vec![Method::Smith],
            MethodArg::All => Method::ALL.to_vec(),
        };
        let tors = methods
            .iter()
            .map(|&meth| tor_with_residue_field(meth, &m, d).map_err(invalid))
            .collect::<Result<Vec<_>, _>>()?;
        if tors.len() > 1 {
            let mut agree = true;
            for (meth, t) in methods.iter().zip(&tors).skip(1) {
                if let Some(&(p, q, x, y)) = tors[0].diff_trusted(t).first() {
                    agree = false;
                    notes.push(format!("koszul and {} differ at Tor_{p}^{q}: {x} vs {y}", meth.name()));
                }
            }
            notes.push(format!("methods koszul, bar, smith: {}", if agree { "agree" } else { "DISAGREE" }));
            agreement = Some(agree);
        } else {
            notes.push(format!("method: {}", methods[0].name()));
        }
        tors.into_iter().next().expect("at least one method")
    };
    let w = assemble_cohomology(&tor);
    let code = if agreement == Some(false) { EXIT_INCONSISTENT } else { EXIT_OK };
    let text = match format {
        Format::Json => to_json(&TorReport { tor: tor.to_json(), cohomology: w.to_json(), pure: w.is_pure(), agreement }),
        Format::Csv => {
            let mut s = String::from("table,i,j,dim\n");
            for e in tor.entries() {
                let _ = writeln!(s, "tor,{},{},{}", e.p, e.q, e.dim);
            }
            weighted_csv(&w, "cohomology", &mut s);
            s
        }
        Format::Svg => weight_svg(&w, &a.input.display().to_string()),
        Format::Table => {
            let mut s = String::new();
            for n in &notes {
                let _ = writeln!(s, "{n}");
            }
            tor_rows(&tor, &mut s);
            let _ = writeln!(s, "\ncohomology (gr^W, trusted range)");
            weighted_rows(&w, &mut s);
            let _ = writeln!(s, "{}", purity_line(&w));
            s
        }
    };
    Ok(Rendered { text, code })
}

#[derive(Serialize)]
struct FanReport {
    name: String,
    smooth: bool,
    complete: bool,
    f_vector: Vec<usize>,
    h_vector: Vec<i64>,
    betti: Vec<usize>,
    cohomology: WeightedJson,
    pure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_check: Option<bool>,
}

fn fan_report(name: &str, fan: &Fan, degree: usize) -> Result<(FanReport, WeightedGradedVectorSpace), Failure> {
    let module = fan.stanley_reisner_module(degree).map_err(invalid)?;
    let tor = koszul_tor(&module, degree).map_err(invalid)?;
    let w = assemble_cohomology(&tor);
    let top = 2 * fan.rank;
    let betti: Vec<usize> = (0..=top).map(|k| w.total(k)).collect();
    let h = fan.h_vector();
    let (smooth, complete) = (fan.is_smooth(), fan.is_complete());
    let h_check = (smooth && complete).then(|| {
        (0..=top).all(|k| k % 2 == 0 || betti[k] == 0) && (0..=fan.rank).all(|k| betti[2 * k] as i64 == h[k])
    });
    let report = FanReport {
        name: name.to_string(),
        smooth,
        complete,
        f_vector: fan.f_vector(),
        h_vector: h,
        betti,
        cohomology: w.to_json(),
        pure: w.is_pure(),
        h_check,
    };
    Ok((report, w))
}

fn cmd_toric(a: &ToricArgs, format: Format) -> Result<Rendered, Failure> {
    let stem = a.input.file_stem().map_or("fan".into(), |s| s.to_string_lossy().into_owned());
    let fans = FanFile::parse(&read(&a.input)?).and_then(|f| f.fans(&stem)).map_err(invalid)?;
    if let Some(path) = &a.module_out {
        let [(_, fan)] = fans.as_slice() else {
            return Err(Failure::Usage("--module-out needs a file with a single fan".into()));
        };
        let m = fan.stanley_reisner_module(a.degree).map_err(invalid)?;
        std::fs::write(path, to_json(&m.to_json())).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut reports = Vec::new();
    for (name, fan) in &fans {
        reports.push(fan_report(name, fan, a.degree)?);
    }
    let code = if reports.iter().any(|(r, _)| r.h_check == Some(false)) { EXIT_INCONSISTENT } else { EXIT_OK };
    let text = match format {
        Format::Json => to_json(&reports.iter().map(|(r, _)| r).collect::<Vec<_>>()),
        Format::Csv => {
            let mut s = String::from("fan,n,weight,dim\n");
            for (r, w) in &reports {
                weighted_csv(w, &r.name, &mut s);
            }
            s
        }
        Format::Svg => {
            let [(r, w)] = reports.as_slice() else {
                return Err(Failure::Usage("svg output needs a file with a single fan".into()));
            };
            weight_svg(w, &r.name)
        }
        Format::Table => {
            let mut s = String::new();
            for (r, w) in &reports {
                let _ = writeln!(s, "fan {}", r.name);
                let _ = writeln!(s, "smooth: {}  complete: {}", yes_no(r.smooth), yes_no(r.complete));
                if !r.smooth {
                    let _ = writeln!(s, "warning: fan is not smooth; the module is built but the cohomology reading assumes smoothness");
                }
                let _ = writeln!(s, "f-vector: {:?}  h-vector: {:?}", r.f_vector, r.h_vector);
                let _ = writeln!(s, "Betti numbers: {:?}", r.betti);
                weighted_rows(w, &mut s);
                let _ = writeln!(s, "{}", purity_line(w));
                if let Some(ok) = r.h_check {
                    let _ = writeln!(s, "b_2k = h_k, odd Betti numbers zero: {}", if ok { "pass" } else { "FAIL" });
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Rendered { text, code })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct StrataReport {
    series: WeightedJson,
    pure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovered: Option<RecoveredReport>,
}

#[derive(Serialize)]
struct RecoveredReport {
    cohomology: WeightedJson,
    tor: TorJson,
    obligations: usize,
    discharged: bool,
    assumed: Vec<String>,
}

fn cmd_strata(a: &StrataArgs, format: Format) -> Result<Rendered, Failure> {
    let s = OrbitStratification::from_json(&read(&a.input)?).map_err(invalid)?;
    let series = equivariant_series(&s, a.degree);
    let recovered = match &a.module {
        None => None,
        Some(path) => {
            let group = match (&a.group, &s.group) {
                (Some(spec), _) => catalog_lookup(spec).map_err(invalid)?,
                (None, Some(g)) => g.clone(),
                (None, None) => return Err(Failure::Usage("--module needs --group or a group in the orbit file".into())),
            };
            let m = load_module(path)?;
            let d = a.degree.min(m.truncation());
            let r = recover_from_strata(&s, &group, &m, d).map_err(invalid)?;
            Some(RecoveredReport {
                cohomology: r.cohomology.to_json(),
                tor: r.tor.to_json(),
                obligations: r.certificate.obligations.len(),
                discharged: r.certificate.obligations.iter().all(|o| o.discharged()),
                assumed: r.assumed,
            })
        }
    };
    let report = StrataReport { series: series.to_json(), pure: series.is_pure(), recovered };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("table,n,weight,dim\n");
            weighted_csv(&series, "series", &mut s);
            if let Some(r) = &report.recovered {
                weighted_csv(&WeightedGradedVectorSpace::from_json(&r.cohomology), "cohomology", &mut s);
            }
            s
        }
        Format::Svg => weight_svg(&series, &a.input.display().to_string()),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "equivariant series up to degree {}", a.degree);
            let terms: Vec<String> = (0..=a.degree)
                .filter(|&k| series.total(k) > 0)
                .map(|k| if k == 0 { series.total(0).to_string() } else { format!("{}t^{k}", series.total(k)) })
                .collect();
            let _ = writeln!(out, "{}", terms.join(" + "));
            let _ = writeln!(out, "{}", purity_line(&series));
            if let Some(r) = &report.recovered {
                let _ = writeln!(out, "\nrecovered cohomology");
                weighted_rows(&WeightedGradedVectorSpace::from_json(&r.cohomology), &mut out);
                let _ = writeln!(
                    out,
                    "degeneration certificate: {} obligations, {}",
                    r.obligations,
                    if r.discharged { "all discharged by weight" } else { "NOT discharged" }
                );
                for note in &r.assumed {
                    let _ = writeln!(out, "assumed: {note}");
                }
            }
            out
        }
    };
    Ok(Rendered { text, code: EXIT_OK })
}

#[derive(Serialize)]
struct GroupReport {
    group: String,
    bg_generator_degrees: Vec<usize>,
    primitive_degrees: Vec<usize>,
    primitive_weights: Vec<usize>,
    cohomology: WeightedJson,
    tor_agrees: bool,
}

fn cmd_group(a: &GroupArgs, format: Format) -> Result<Rendered, Failure> {
    let g = catalog_lookup(&a.spec).map_err(invalid)?;
    let ext = g.group_cohomology();
    let expected = ext.to_weighted();
    let trivial = GradedModule::trivial(&g.classifying_ring(), a.degree);
    let tor = koszul_tor(&trivial, a.degree).map_err(invalid)?;
    let assembled = assemble_cohomology(&tor);
    let bound = tor.trusted_q();
    let agrees = assembled.entries().filter(|e| e.weight <= bound).eq(expected.entries().filter(|e| e.weight <= bound));
    let report = GroupReport {
        group: g.name.clone(),
        bg_generator_degrees: g.bg_generator_degrees().to_vec(),
        primitive_degrees: ext.generator_degrees.clone(),
        primitive_weights: ext.generator_weights.clone(),
        cohomology: expected.to_json(),
        tor_agrees: agrees,
    };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("table,n,weight,dim\n");
            weighted_csv(&expected, "cohomology", &mut s);
            s
        }
        Format::Svg => weight_svg(&expected, &g.name),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "group {}", g.name);
            let _ = writeln!(s, "BG generators in degrees {:?}", report.bg_generator_degrees);
            for (d, w) in ext.generator_degrees.iter().zip(&ext.generator_weights) {
                let _ = writeln!(s, "G cohomology generator: degree {d} weight {w}");
            }
            weighted_rows(&expected, &mut s);
            let _ = writeln!(
                s,
                "Tor(Q, Q) over H*(BG) up to q = {bound}: {}",
                if agrees { "agrees" } else { "DISAGREES" }
            );
            s
        }
    };
    Ok(Rendered { text, code: if agrees { EXIT_OK } else { EXIT_INCONSISTENT } })
}

#[derive(Serialize)]
struct SsReport {
    pages: Vec<SsPage>,
    stabilized_at: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateReport>,
}

/// One page in bar bidegrees: `dim E_r^{-p,q}`.
#[derive(Serialize)]
struct SsPage {
    r: usize,
    entries: Vec<TorEntry>,
    differentials_nonzero: usize,
}

#[derive(Serialize)]
struct CertificateReport {
    obligations: usize,
    live: usize,
    discharged: bool,
    agrees_with_pages: bool,
}

/// The first page from which every differential vanishes.
fn stabilized_at(pages: &[Page]) -> usize {
    pages.iter().rposition(|p| p.differentials_nonzero() > 0).map_or(0, |i| pages[i].r + 1)
}

fn cmd_ss(a: &SsArgs, format: Format) -> Result<Rendered, Failure> {
    let module = match (&a.input, &a.group, &a.fan) {
        (Some(path), _, _) => load_module(path)?,
        (None, Some(spec), _) => {
            let g = catalog_lookup(spec).map_err(invalid)?;
            GradedModule::trivial(&g.classifying_ring(), a.degree)
        }
        (None, None, Some(path)) => {
            let stem = path.file_stem().map_or("fan".into(), |s| s.to_string_lossy().into_owned());
            let fans = FanFile::parse(&read(path)?).and_then(|f| f.fans(&stem)).map_err(invalid)?;
            let [(_, fan)] = fans.as_slice() else {
                return Err(Failure::Usage("--fan needs a file with a single fan".into()));
            };
            fan.stanley_reisner_module(a.degree).map_err(invalid)?
        }
        (None, None, None) => return Err(Failure::Usage("give a module file, --group or --fan".into())),
    };
    if a.degree > module.truncation() {
        return Err(invalid(format!("degree {} exceeds the module truncation {}", a.degree, module.truncation())));
    }
    let em = em_residue_field(&module, a.degree).map_err(|e| Failure::Inconsistent(e.to_string()))?;
    let pages = em.pages().map_err(|e| Failure::Inconsistent(e.to_string()))?;
    let stable = stabilized_at(&pages);
    let certificate = if a.pure {
        let tor = koszul_tor(&module, a.degree).map_err(invalid)?;
        let cert = degeneration_certificate(&tor, PurityFlags::PURE).map_err(invalid)?;
        Some(CertificateReport {
            obligations: cert.obligations.len(),
            live: cert.live().count(),
            discharged: cert.verify(&tor),
            agrees_with_pages: cert.agrees_with(&pages),
        })
    } else {
        None
    };
    let code = match &certificate {
        Some(c) if !(c.discharged && c.agrees_with_pages) => EXIT_INCONSISTENT,
        _ => EXIT_OK,
    };
    let top = em.max_bar_degree().unwrap_or(0);
    let pages_out = pages
        .iter()
        .map(|pg| SsPage {
            r: pg.r,
            entries: pg.bar_bigraded(top).into_iter().map(|((p, q), dim)| TorEntry { p, q, dim }).collect(),
            differentials_nonzero: pg.differentials_nonzero(),
        })
        .collect();
    let report = SsReport { pages: pages_out, stabilized_at: stable, certificate };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("r,p,q,dim\n");
            for page in &report.pages {
                for e in &page.entries {
                    let _ = writeln!(s, "{},{},{},{}", page.r, e.p, e.q, e.dim);
                }
            }
            s
        }
        Format::Svg => return Err(Failure::Usage("svg output is not available for ss".into())),
        Format::Table => {
            let mut s = String::new();
            for page in &report.pages {
                let entries: Vec<String> = page.entries.iter().map(|e| format!("E^{{-{},{}}}={}", e.p, e.q, e.dim)).collect();
                let _ = writeln!(s, "E_{}: {}", page.r, if entries.is_empty() { "0".into() } else { entries.join(" ") });
                let _ = writeln!(s, "  nonzero d_{}: {}", page.r, page.differentials_nonzero);
            }
            let _ = writeln!(s, "stabilized at r = {stable}");
            if let Some(c) = &report.certificate {
                let _ = writeln!(
                    s,
                    "degeneration certificate: {} obligations ({} live), {}; pages {}",
                    c.obligations,
                    c.live,
                    if c.discharged { "all discharged by weight" } else { "NOT discharged" },
                    if c.agrees_with_pages { "agree" } else { "DISAGREE" }
                );
            }
            s
        }
    };
    Ok(Rendered { text, code })
}

fn cmd_selftest(a: &SelftestArgs, format: Format) -> Result<Rendered, Failure> {
    let fixtures = match &a.fixtures {
        Some(dir) => FixtureSet::from_dir(dir).map_err(invalid)?,
        None => FixtureSet::bundled(),
    };
    let report = selftest::run(&fixtures, Options { seed: a.seed }).map_err(invalid)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_INCONSISTENT };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Table => {
            let mut s = String::new();
            for c in &report.criteria {
                let _ = writeln!(s, "{}", c.line());
            }
            let _ = writeln!(s, "selftest: {}", if report.passed() { "PASS" } else { "FAIL" });
            s
        }
        Format::Csv | Format::Svg => return Err(Failure::Usage("selftest supports table and json output".into())),
    };
    Ok(Rendered { text, code })
}
