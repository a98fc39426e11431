//! Batch front end: construct setups, emit the shift matrix and L(z), and
//! run the verification suites.
//!
//! Exit codes: 0 = success / all checks pass, 1 = a check failed,
//! 2 = invalid configuration, 3 = computation error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use wlax_core::jsonio::{self, RepInput};
use wlax_core::laxop::{self, CheckReport};
use wlax_core::liealg::{build_algebra, build_graded_setup, Family, Partition};
use wlax_core::rect;
use wlax_core::scalar::render;
use wlax_core::uea::Algebra;
use wlax_core::yangian;
use wlax_core::{Error, Result};

#[derive(Parser)]
#[command(name = "wlax", about = "Lax operators for finite W-algebras, exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct SetupArgs {
    /// Algebra family: gl, sl, so, sp.
    #[arg(long)]
    family: Option<String>,
    /// Size of the standard representation.
    #[arg(long)]
    n: Option<usize>,
    /// Jordan type of the nilpotent, e.g. "3,1,1".
    #[arg(long)]
    partition: Option<String>,
    /// Precision floor as a doubled exponent (default -(2d+6)).
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<i64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Seed for the randomized relation samples.
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Generic representation input (JSON: labels, matrices, grading/triple).
    #[arg(long)]
    rep_file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the shift matrix and compare with the closed form.
    Shift(SetupArgs),
    /// Build L(z) and print it as JSON or text.
    Lax(SetupArgs),
    /// Run a verification suite.
    Check {
        /// membership | yangian | skewadjoint | main-lemma | oracle | all
        which: String,
        #[command(flatten)]
        setup: SetupArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    };
    std::process::exit(code);
}

fn classify(e: &Error) -> i32 {
    match e {
        Error::InvalidFamily(_)
        | Error::InvalidPartition(_)
        | Error::InvalidRectangle(_)
        | Error::UnsupportedFamily(_)
        | Error::ShapeMismatch(_) => 2,
        _ => 3,
    }
}

struct Setup {
    family: Family,
    n: usize,
    partition: Partition,
    alg: Algebra,
    floor2: i64,
}

fn build_setup(args: &SetupArgs) -> Result<Setup> {
    let family = Family::parse(args.family.as_deref().ok_or_else(|| {
        Error::InvalidFamily("missing --family (or use --rep-file)".into())
    })?)?;
    let n = args
        .n
        .ok_or_else(|| Error::InvalidFamily("missing --n".into()))?;
    let partition = Partition::parse(args.partition.as_deref().ok_or_else(|| {
        Error::InvalidPartition("missing --partition".into())
    })?)?;
    let model = build_algebra(family, n)?;
    let setup = build_graded_setup(&model, &partition)?;
    let alg = Algebra::new(model, setup);
    let floor2 = args.floor.unwrap_or_else(|| laxop::default_floor2(&alg));
    if floor2 >= 0 {
        return Err(Error::InvalidPartition("floor must be negative".into()));
    }
    Ok(Setup { family, n, partition, alg, floor2 })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Shift(args) => cmd_shift(&args),
        Command::Lax(args) => cmd_lax(&args),
        Command::Check { which, setup } => cmd_check(&which, &setup),
    }
}

fn cmd_shift(args: &SetupArgs) -> Result<i32> {
    if let Some(path) = &args.rep_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Other(format!("cannot read {path}: {e}")))?;
        let (model, d) = match jsonio::parse_rep_file(&text)? {
            RepInput::Graded(model, setup) => {
                let delta2 = setup.delta2.clone();
                let d = laxop::shift_matrix_generic(&model, &delta2)?;
                (model, d)
            }
            RepInput::GradedWeights(model, delta2) => {
                let d = laxop::shift_matrix_generic(&model, &delta2)?;
                (model, d)
            }
        };
        let _ = model;
        match args.format {
            Format::Json => println!(
                "{}",
                json!({ "D": d.render_rows(), "closed_form": null, "verdict": "N/A" })
            ),
            Format::Text => {
                println!("shift matrix (generic representation):");
                print_qmat(&d);
            }
        }
        return Ok(0);
    }
    let setup = build_setup(args)?;
    let d = laxop::shift_matrix(&setup.alg);
    let closed = laxop::shift_matrix_closed_form(&setup.alg)?;
    let matched = d == closed;
    match args.format {
        Format::Json => println!(
            "{}",
            json!({
                "family": setup.family.name(),
                "n": setup.n,
                "partition": setup.partition.render(),
                "D": d.render_rows(),
                "closed_form": closed.render_rows(),
                "verdict": if matched { "MATCH" } else { "MISMATCH" },
            })
        ),
        Format::Text => {
            println!(
                "{}_{} partition ({})",
                setup.family.name(),
                setup.n,
                setup.partition.render()
            );
            println!("shift matrix:");
            print_qmat(&d);
            println!("closed form verdict: {}", if matched { "MATCH" } else { "MISMATCH" });
        }
    }
    Ok(if matched { 0 } else { 1 })
}

fn cmd_lax(args: &SetupArgs) -> Result<i32> {
    let setup = build_setup(args)?;
    let res = laxop::lax(&setup.alg, setup.floor2)?;
    match args.format {
        Format::Json => {
            let out = jsonio::lax_to_json(&setup.alg, &res);
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Format::Text => {
            println!(
                "{}_{} partition ({}), d = {}, L is {}x{}, floor z^{}",
                setup.family.name(),
                setup.n,
                setup.partition.render(),
                res.d2,
                res.r1,
                res.r1,
                wlax_core::scalar::render_half(res.floor2),
            );
            for r in 0..res.l.rows {
                for c in 0..res.l.cols {
                    println!("L[{},{}](z):", r + 1, c + 1);
                    let entry = res.l.at(r, c);
                    for (e2, coeff) in entry.terms.iter().rev() {
                        println!(
                            "  z^{}: {}",
                            wlax_core::scalar::render_half(*e2),
                            setup.alg.render_elem(coeff)
                        );
                    }
                }
            }
        }
    }
    Ok(0)
}

fn report_to_json(r: &CheckReport) -> serde_json::Value {
    serde_json::to_value(r).unwrap()
}

fn cmd_check(which: &str, args: &SetupArgs) -> Result<i32> {
    let known = ["membership", "yangian", "skewadjoint", "main-lemma", "oracle", "all"];
    if !known.contains(&which) {
        return Err(Error::InvalidFamily(format!(
            "unknown check `{which}` (expected one of {})",
            known.join(", ")
        )));
    }
    let setup = build_setup(args)?;
    let alg = &setup.alg;
    let is_so_sp = matches!(setup.family, Family::So | Family::Sp);
    let is_rect = setup.partition.is_rectangular();
    if which == "oracle" && !(is_so_sp && is_rect) {
        return Err(Error::InvalidRectangle(
            "the oracle check needs a rectangular so/sp setup".into(),
        ));
    }
    if which == "skewadjoint" && !is_so_sp {
        return Err(Error::InvalidFamily("skewadjointness needs so or sp".into()));
    }

    let mut reports: Vec<serde_json::Value> = Vec::new();
    let mut all_pass = true;
    let mut text_lines: Vec<String> = Vec::new();

    let res = laxop::lax(alg, setup.floor2)?;

    if which == "membership" || which == "all" {
        let r = laxop::check_membership(alg, &res);
        all_pass &= r.is_pass();
        text_lines.push(format!("membership: {}", r.status));
        reports.push(report_to_json(&r));
    }
    if which == "yangian" || which == "all" {
        let r = yangian::check_lax_identity(alg, &res)?;
        all_pass &= r.is_pass();
        let p = yangian::lax_params(alg)?;
        text_lines.push(format!(
            "yangian (alpha={}, beta={}, gamma={}): {}",
            render(&p.alpha),
            render(&p.beta),
            render(&p.gamma),
            if r.is_pass() { "pass" } else { "fail" }
        ));
        reports.push(serde_json::to_value(&r).unwrap());
    }
    if (which == "skewadjoint" || which == "all") && is_so_sp {
        let pairing = yangian::induced_pairing(alg)?;
        let eps = alg.model.form_on_v.as_ref().unwrap().epsilon;
        let r = yangian::check_skewadjoint(alg, &res.l, &pairing, eps)?;
        all_pass &= r.is_pass();
        text_lines.push(format!("skewadjoint: {}", r.status));
        reports.push(report_to_json(&r));
    }
    if which == "main-lemma" || which == "all" {
        let r = laxop::main_lemma_check(alg, setup.floor2)?;
        all_pass &= r.is_pass();
        text_lines.push(format!("main-lemma: {}", r.status));
        reports.push(report_to_json(&r));
    }
    if (which == "oracle" || which == "all") && is_so_sp && is_rect {
        let parts = &setup.partition.0;
        let (rect_setup, rect_alg) = rect::build_rect(setup.family, parts.len(), parts[0])?;
        rect::check_commutation_relations(&rect_setup, 40 + args.seed % 17)?;
        let r = rect::cross_check(&rect_setup, &rect_alg, setup.floor2)?;
        all_pass &= r.is_pass();
        text_lines.push(format!("oracle: {}", r.status));
        reports.push(report_to_json(&r));
    }

    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "family": setup.family.name(),
                "n": setup.n,
                "partition": setup.partition.render(),
                "floor": setup.floor2,
                "reports": reports,
            }))
            .unwrap()
        ),
        Format::Text => {
            for line in text_lines {
                println!("{line}");
            }
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn print_qmat(d: &wlax_core::matrix::QMat) {
    for row in d.render_rows() {
        println!("  [{}]", row.join(", "));
    }
}
