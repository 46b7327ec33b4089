use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use acs_core::algebroid::Section;
use acs_core::arith::Ratio;
use acs_core::chern::{cs_form, secondary_class_rep, transgression_residual_form};
use acs_core::cohomology::{build_complex, dense_form, Exactness};
use acs_core::connection::{flatness_probe, ConnectionExpr, Setting};
use acs_core::fixture::{
    load_fixture, load_fixture_unchecked, parse_fixture, parse_fixture_unchecked, Fixture,
};
use acs_core::forms::{form_eval, FormExpr};
use acs_core::random::random_sections;
use acs_core::suite::{run_suite, SuiteConfig};
use acs_core::{fixtures, AcsError, Result};

/// Exact verification of Chern–Simons identities on Lie algebroid fixtures.
#[derive(Parser)]
#[command(name = "acs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full identity suite on a fixture.
    Verify(VerifyArgs),
    /// Evaluate the Chern character form ch_p(∇).
    Ch(EvalArgs),
    /// Evaluate the Chern–Simons form cs_p(∇⁰, …, ∇ᵏ).
    Cs(EvalArgs),
    /// Evaluate the transgression residual of cs_p(∇⁰, …, ∇ᵏ).
    TransgressionCheck(EvalArgs),
    /// Evaluate a representative of the secondary class u_{2p−1}.
    SecondaryClass(SecondaryArgs),
    /// Betti numbers of the Chevalley–Eilenberg complex of a point fixture.
    Cohomology(CohomologyArgs),
    /// Decide whether a closed cochain is exact.
    IsExact(IsExactArgs),
    /// Print a built-in fixture as JSON, or list them.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Fixture file, or `builtin:NAME`.
    fixture: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    p_max: usize,
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    #[arg(long, default_value_t = 2)]
    degree_cap: u32,
    /// Write the JSON-lines report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON-lines report on standard output instead of the table.
    #[arg(long)]
    jsonl: bool,
}

#[derive(Args)]
struct Probes {
    /// A JSON list of sections, each a list of coefficients.
    #[arg(long, conflicts_with = "random")]
    sections: Option<String>,
    /// Number of random section tuples.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    degree_cap: u32,
}

#[derive(Args)]
struct EvalArgs {
    fixture: String,
    /// Connection names, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    connections: Vec<String>,
    #[arg(long, short)]
    p: usize,
    #[command(flatten)]
    probes: Probes,
}

#[derive(Args)]
struct SecondaryArgs {
    fixture: String,
    #[arg(long)]
    connection: String,
    #[arg(long)]
    metric: String,
    #[arg(long, short)]
    p: usize,
    #[command(flatten)]
    probes: Probes,
    #[arg(long, default_value_t = 5)]
    samples: usize,
}

#[derive(Args)]
struct CohomologyArgs {
    fixture: String,
    /// Highest degree to report.
    #[arg(long)]
    degree: Option<usize>,
}

#[derive(Args)]
struct IsExactArgs {
    fixture: String,
    #[arg(long)]
    degree: Option<usize>,
    /// Dense cochain as a JSON list of rationals on the lexicographic frame tuples.
    #[arg(long, conflicts_with = "form_name")]
    form: Option<String>,
    /// A scalar form declared in the fixture.
    #[arg(long)]
    form_name: Option<String>,
}

#[derive(Args)]
struct FixtureArgs {
    name: Option<String>,
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_fixture(source: &str, checked: bool) -> Result<Fixture> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let file = fixtures::file_by_name(name)
            .ok_or_else(|| AcsError::UnresolvedRef(name.to_string()))?;
        let json = serde_json::to_string(&file).expect("fixtures serialize");
        return if checked {
            parse_fixture(&json)
        } else {
            parse_fixture_unchecked(&json)
        };
    }
    let path = PathBuf::from(source);
    if checked {
        load_fixture(&path)
    } else {
        load_fixture_unchecked(&path)
    }
}

fn connections(fx: &Fixture, names: &[String]) -> Result<Vec<ConnectionExpr>> {
    names.iter().map(|n| fx.connection(n).cloned()).collect()
}

fn tuples(probes: &Probes, set: &Setting, arity: usize) -> Result<Vec<Vec<Section>>> {
    if let Some(text) = &probes.sections {
        let secs: Vec<Section> = serde_json::from_str(text)
            .map_err(|e| AcsError::InvalidArgument(format!("--sections: {e}")))?;
        if secs.len() != arity {
            return Err(AcsError::Arity {
                expected: arity,
                got: secs.len(),
            });
        }
        for s in &secs {
            set.alg.check_section(s)?;
        }
        return Ok(vec![secs]);
    }
    let n = probes.random.unwrap_or(1);
    if arity == 0 {
        return Ok(vec![Vec::new(); n]);
    }
    let all = random_sections(&set.alg, n * arity, probes.degree_cap, probes.seed);
    Ok(all.chunks(arity).map(<[Section]>::to_vec).collect())
}

fn evaluate(form: &FormExpr, set: &Setting, probes: &Probes) -> Result<(Vec<Value>, bool)> {
    let deg = form.degree()?;
    let mut all_zero = true;
    let mut out = Vec::new();
    for args in tuples(probes, set, deg)? {
        let v = form_eval(form, set, &args)?.into_scalar("value")?;
        all_zero &= v.is_zero();
        out.push(json!({ "args": args, "value": v, "display": v.to_string() }));
    }
    Ok((out, all_zero))
}

fn cmd_eval(which: &str, a: &EvalArgs) -> Result<(Value, bool)> {
    let fx = read_fixture(&a.fixture, true)?;
    let set = fx.setting();
    let conns = connections(&fx, &a.connections)?;
    let form = match which {
        "ch" => {
            if conns.len() != 1 {
                return Err(AcsError::InvalidArgument(
                    "ch takes exactly one connection".into(),
                ));
            }
            cs_form(&conns, a.p)?
        }
        "cs" => cs_form(&conns, a.p)?,
        _ => transgression_residual_form(&conns, a.p)?,
    };
    let (evals, zero) = evaluate(&form, &set, &a.probes)?;
    let mut report = json!({
        "command": which,
        "fixture": fx.name,
        "connections": a.connections,
        "p": a.p,
        "k": conns.len().saturating_sub(1),
        "exact": true,
        "evaluations": evals,
    });
    if which == "transgression-check" {
        report["residual_zero"] = json!(zero);
        return Ok((report, zero));
    }
    Ok((report, true))
}

fn cmd_secondary(a: &SecondaryArgs) -> Result<Value> {
    let fx = read_fixture(&a.fixture, true)?;
    let set = fx.setting();
    let conn = fx.connection(&a.connection)?;
    let h = fx.metric(&a.metric)?;
    let rep = secondary_class_rep(conn, h, a.p)?;
    let flat = flatness_probe(conn, &set, a.samples, a.probes.seed)?;
    let (evals, _) = evaluate(&rep.form, &set, &a.probes)?;
    let mut out = json!({
        "command": "secondary-class",
        "fixture": fx.name,
        "connection": a.connection,
        "metric": a.metric,
        "p": a.p,
        "degree": 2 * a.p - 1,
        "flat": flat.is_none(),
        "exact": true,
        "evaluations": evals,
    });
    if let Some(w) = &flat {
        out["flatness_witness"] = json!(w);
    }
    if let Some(w) = rep.warning {
        out["warning"] = json!(w);
    }
    if fx.algebroid.is_point() && 2 * a.p - 1 <= fx.algebroid.rank() {
        let cx = build_complex(&fx.algebroid, None)?;
        let dense = dense_form(&rep.form, &set)?;
        out["cochain"] = json!(dense);
        if flat.is_none() {
            out["class"] = json!(cx.is_exact(2 * a.p - 1, &dense)?);
        }
    }
    Ok(out)
}

fn cmd_cohomology(a: &CohomologyArgs) -> Result<(Value, bool)> {
    let fx = read_fixture(&a.fixture, true)?;
    let cx = build_complex(&fx.algebroid, a.degree)?;
    let witness = cx.d_squared_witness();
    let dims: Vec<usize> = (0..=cx.top()).map(|k| cx.dim(k)).collect();
    let ok = witness.is_none();
    Ok((
        json!({
            "command": "cohomology",
            "fixture": fx.name,
            "dimension": cx.dimension(),
            "cochain_dims": dims,
            "betti": cx.betti_numbers(),
            "d_squared_zero": ok,
            "d_squared_witness": witness,
        }),
        ok,
    ))
}

fn cmd_is_exact(a: &IsExactArgs) -> Result<(Value, bool)> {
    let fx = read_fixture(&a.fixture, true)?;
    let cx = build_complex(&fx.algebroid, None)?;
    let (deg, dense) = match (&a.form, &a.form_name) {
        (Some(text), _) => {
            let v: Vec<Ratio> = serde_json::from_str(text)
                .map_err(|e| AcsError::InvalidArgument(format!("--form: {e}")))?;
            let deg = a
                .degree
                .ok_or_else(|| AcsError::InvalidArgument("--form needs --degree".into()))?;
            (deg, v)
        }
        (None, Some(name)) => {
            let form = fx.form(name)?;
            (form.degree()?, dense_form(form, &fx.setting())?)
        }
        (None, None) => {
            return Err(AcsError::InvalidArgument(
                "give --form or --form-name".into(),
            ))
        }
    };
    let verdict = cx.is_exact(deg, &dense)?;
    let exact = verdict.is_exact();
    let mut out = json!({
        "command": "is-exact",
        "fixture": fx.name,
        "degree": deg,
        "cochain": dense,
        "result": verdict,
    });
    if let Exactness::Exact { primitive } = &verdict {
        if deg > 0 {
            out["check"] = json!(cx.apply_d(deg - 1, primitive)? == dense);
        }
    }
    Ok((out, exact))
}

fn cmd_fixture(a: &FixtureArgs) -> Result<()> {
    if a.list || a.name.is_none() {
        for (name, _) in fixtures::all_algebroids() {
            println!("{name}");
        }
        return Ok(());
    }
    let name = a.name.as_deref().unwrap_or_default();
    let file =
        fixtures::file_by_name(name).ok_or_else(|| AcsError::UnresolvedRef(name.to_string()))?;
    let text = serde_json::to_string_pretty(&file).expect("fixtures serialize") + "\n";
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    if a.p_max == 0 || a.p_max > 3 || a.k_max == 0 || a.k_max > 3 {
        return Err(AcsError::InvalidArgument(
            "--p-max and --k-max must lie in 1..=3".into(),
        ));
    }
    let fx = read_fixture(&a.fixture, false)?;
    let cfg = SuiteConfig {
        seed: a.seed,
        samples: a.samples,
        p_max: a.p_max,
        k_max: a.k_max,
        degree_cap: a.degree_cap,
    };
    let report = run_suite(&fx, &cfg);
    let lines = report.to_jsonl();
    if let Some(p) = &a.report {
        std::fs::write(p, &lines)?;
    }
    if a.jsonl {
        print!("{lines}");
    } else {
        print!("{}", report.summary_table());
    }
    Ok(report.passed())
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("values serialize")
    );
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Ch(a) => cmd_eval("ch", &a).map(|(v, ok)| {
            print_json(&v);
            ok
        }),
        Command::Cs(a) => cmd_eval("cs", &a).map(|(v, ok)| {
            print_json(&v);
            ok
        }),
        Command::TransgressionCheck(a) => cmd_eval("transgression-check", &a).map(|(v, ok)| {
            print_json(&v);
            ok
        }),
        Command::SecondaryClass(a) => cmd_secondary(&a).map(|v| {
            print_json(&v);
            true
        }),
        Command::Cohomology(a) => cmd_cohomology(&a).map(|(v, ok)| {
            print_json(&v);
            ok
        }),
        Command::IsExact(a) => cmd_is_exact(&a).map(|(v, _)| {
            print_json(&v);
            true
        }),
        Command::Fixture(a) => cmd_fixture(&a).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
