//! `oddkh` command-line front end: Khovanov homology, Steenrod squares,
//! Chang words, refined s-invariants and axiom validation for knot
//! diagrams given as PD codes, bundled knot names, or table files.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{ArgGroup, Parser, ValueEnum};
use serde_json::{json, Value};

use oddkh::flowcat::{build_cover, CoverParams, FramingTable, Variant};
use oddkh::oddcomplex::{build_complex, Choices, OddCube, Reduction, Theory};
use oddkh::sinvariant::s_invariants;
use oddkh::steenrod::{
    self, chang_table, slice_chang_word, steenrod_report_with_dims, Operation, ReportOptions,
};
use oddkh::{knottable, Error, LinkDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Homology,
    Sq2e0,
    Sq2e1,
    Sq2even,
    Sq1odd,
    Sq1even,
    Chang,
    Sinv,
    Validate,
    DualityReport,
}

/// Odd Khovanov homology and second Steenrod squares of knots and links.
#[derive(Parser, Debug)]
#[command(name = "oddkh", version)]
#[command(group(ArgGroup::new("input").required(true).args(["pd", "knot", "table"])))]
struct Cli {
    /// PD code, e.g. "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]".
    #[arg(long)]
    pd: Option<String>,
    /// Name in the bundled table (e.g. 8_19; m8_19 or 8_19* for the mirror).
    #[arg(long)]
    knot: Option<String>,
    /// Table file with `name<TAB>pd-code` lines.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// Operation to run.
    #[arg(long, value_enum, default_value = "homology")]
    op: Op,
    /// Restrict validate and duality-report to one ε.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    epsilon: Option<u8>,
    /// Cover type δ used for Steenrod squares.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    delta: u8,
    /// Re-roll all auxiliary choices from this seed (validate: base seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Use the mirror image of every input diagram.
    #[arg(long)]
    mirror: bool,
    /// Arc label carrying the basepoint of the reduced theory.
    #[arg(long, value_name = "ARC")]
    basepoint: Option<u32>,
    /// Emit JSON (the default is text).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit human-readable text.
    #[arg(long)]
    text: bool,
    /// Number of worker threads for table input.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

struct Job {
    name: String,
    diagram: Result<LinkDiagram, Error>,
}

fn jobs(cli: &Cli) -> Result<Vec<Job>, Error> {
    let prep = |d: Result<LinkDiagram, Error>| -> Result<LinkDiagram, Error> {
        let mut d = d?;
        if cli.mirror {
            d = d.mirror();
        }
        if let Some(b) = cli.basepoint {
            d = d.with_basepoint(b)?;
        }
        Ok(d)
    };
    if let Some(pd) = &cli.pd {
        return Ok(vec![Job {
            name: "pd".into(),
            diagram: prep(LinkDiagram::parse_pd(pd)),
        }]);
    }
    if let Some(k) = &cli.knot {
        return Ok(vec![Job {
            name: k.clone(),
            diagram: prep(knottable::lookup(k)),
        }]);
    }
    let path = cli.table.as_ref().expect("input group is required");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Ok(knottable::parse_table(&text)?
        .into_iter()
        .map(|e| Job {
            diagram: prep(e.diagram()),
            name: e.name,
        })
        .collect())
}

fn cube(cli: &Cli, d: &LinkDiagram) -> Result<OddCube, Error> {
    let ch = match cli.seed {
        Some(s) => Choices::random(d.n(), s),
        None => Choices::standard(),
    };
    OddCube::new(d, &ch)
}

fn report_opts(cli: &Cli) -> ReportOptions {
    ReportOptions {
        delta: cli.delta,
        ..Default::default()
    }
}

fn groups_json(g: &std::collections::BTreeMap<(i32, i32), oddkh::AbelianGroup>) -> Value {
    Value::Array(
        g.iter()
            .map(|(&(i, j), a)| json!({"i": i, "j": j, "group": a.to_string()}))
            .collect(),
    )
}

fn homology(cli: &Cli, d: &LinkDiagram) -> Result<Value, Error> {
    let oc = cube(cli, d)?;
    let odd = build_complex(&oc, Theory::Odd, Reduction::Unreduced)?;
    let mut out = json!({
        "odd": groups_json(&odd.integral()?),
        "f2": odd.f2_dims().iter().map(|(&(i, j), &n)| json!({"i": i, "j": j, "dim": n})).collect::<Vec<_>>(),
    });
    if oc.diagram.basepoint().is_some() {
        let red = build_complex(&oc, Theory::Odd, Reduction::Reduced)?;
        out["odd_reduced"] = groups_json(&red.integral()?);
    }
    Ok(out)
}

fn operation(op: Op) -> Operation {
    match op {
        Op::Sq2e0 => Operation::Sq2Odd(0),
        Op::Sq2e1 => Operation::Sq2Odd(1),
        Op::Sq2even => Operation::Sq2Even,
        Op::Sq1odd => Operation::Sq1Odd,
        _ => Operation::Sq1Even,
    }
}

fn matrix_json(m: &oddkh::F2Matrix) -> Value {
    json!(m.to_rows())
}

fn steenrod_op(cli: &Cli, d: &LinkDiagram, op: Operation) -> Result<Value, Error> {
    let oc = cube(cli, d)?;
    let opts = report_opts(cli);
    let dims = steenrod::f2_dims(&oc, None)?;
    let rep = steenrod_report_with_dims(&oc, op, opts, &dims)?;
    let bock = match op {
        Operation::Sq2Odd(_) => Some(steenrod_report_with_dims(
            &oc,
            Operation::Sq1Odd,
            opts,
            &dims,
        )?),
        Operation::Sq2Even => Some(steenrod_report_with_dims(
            &oc,
            Operation::Sq1Even,
            opts,
            &dims,
        )?),
        _ => None,
    };
    let entries: Vec<Value> = rep
        .entries
        .iter()
        .map(|e| {
            let word = bock.as_ref().map(|b| slice_chang_word(&rep, b, &dims, e.j).to_string());
            json!({"i": e.i, "j": e.j, "rank": e.rank, "matrix": matrix_json(&e.matrix), "chang_word": word})
        })
        .collect();
    Ok(json!({"variant": op.name(), "entries": entries}))
}

fn chang(cli: &Cli, d: &LinkDiagram) -> Result<Value, Error> {
    let oc = cube(cli, d)?;
    let t = chang_table(&oc, report_opts(cli))?;
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|(j, a, b, c)| json!({"j": j, "sq2even": a.to_string(), "sq2e0": b.to_string(), "sq2e1": c.to_string()}))
        .collect();
    Ok(json!({"rows": rows}))
}

fn sinv(d: &LinkDiagram) -> Result<Value, Error> {
    let ops = [
        Operation::Sq2Even,
        Operation::Sq2Odd(0),
        Operation::Sq2Odd(1),
        Operation::Sq1Odd,
        Operation::Sq1Even,
    ];
    let r = s_invariants(d, &ops)?;
    let mut refinements = serde_json::Map::new();
    for (op, t) in &r.refinements {
        refinements.insert(op.name().to_string(), json!(t));
    }
    Ok(json!({"s_f2": r.s_f2, "refinements": refinements}))
}

fn epsilons(cli: &Cli) -> Vec<u8> {
    cli.epsilon.map_or(vec![0, 1], |e| vec![e])
}

/// Axiom validation of every cover plus choice independence of `Sq²_ε`
/// under five seeded re-rolls.
fn validate(cli: &Cli, d: &LinkDiagram) -> Result<Value, Error> {
    let base = cli.seed.unwrap_or(0);
    let std_oc = OddCube::new(d, &Choices::standard())?;
    let dims = steenrod::f2_dims(&std_oc, None)?;
    let qs: std::collections::BTreeSet<i32> = dims.keys().map(|k| k.1).collect();
    let mut checks = 0usize;
    let mut violations = Vec::new();
    let mut reference = Vec::new();
    for &eps in &epsilons(cli) {
        let opts = ReportOptions {
            delta: cli.delta,
            ..Default::default()
        };
        reference.push(steenrod_report_with_dims(
            &std_oc,
            Operation::Sq2Odd(eps),
            opts,
            &dims,
        )?);
    }
    for r in 0..5u64 {
        let seed = base.wrapping_add(r);
        let oc = OddCube::new(d, &Choices::random(d.n(), seed))?;
        for &q in &qs {
            for variant in [Variant::Odd, Variant::Even] {
                for &eps in &epsilons(cli) {
                    for table in [FramingTable::Standard, FramingTable::Alternative] {
                        let p = CoverParams {
                            delta: cli.delta,
                            epsilon: eps,
                            variant,
                            table,
                        };
                        let rep = build_cover(&oc, q, None, p)?.validate();
                        checks += 1;
                        if !rep.is_ok() {
                            violations.push(json!({"seed": seed, "q": q, "variant": format!("{variant:?}"),
                                "epsilon": eps, "table": format!("{table:?}"), "report": format!("{rep:?}")}));
                        }
                    }
                }
            }
        }
        for (k, &eps) in epsilons(cli).iter().enumerate() {
            let opts = ReportOptions {
                delta: cli.delta,
                ..Default::default()
            };
            let rep = steenrod_report_with_dims(&oc, Operation::Sq2Odd(eps), opts, &dims)?;
            checks += 1;
            if rep != reference[k] {
                violations.push(json!({"seed": seed, "epsilon": eps, "report": "Sq² matrices depend on the choices"}));
            }
        }
    }
    Ok(json!({"checks": checks, "violations": violations}))
}

/// Ranks of `Sq²_ε` on `L` against ranks on the mirror at the dual bidegree,
/// for both `ε` and `1 + ε` on the mirror side.
fn duality(cli: &Cli, d: &LinkDiagram) -> Result<Value, Error> {
    let oc = cube(cli, d)?;
    let om = cube(cli, &d.mirror())?;
    let opts = report_opts(cli);
    let (dl, dm) = (steenrod::f2_dims(&oc, None)?, steenrod::f2_dims(&om, None)?);
    let mut rows = Vec::new();
    let (mut same, mut other) = (true, true);
    for &eps in &epsilons(cli) {
        let r = steenrod_report_with_dims(&oc, Operation::Sq2Odd(eps), opts, &dl)?;
        let m_same = steenrod_report_with_dims(&om, Operation::Sq2Odd(eps), opts, &dm)?;
        let m_other = steenrod_report_with_dims(&om, Operation::Sq2Odd(1 - eps), opts, &dm)?;
        for e in &r.entries {
            let rank_at = |m: &oddkh::SteenrodReport| m.entry(-e.i - 2, -e.j).map_or(0, |x| x.rank);
            let (a, b) = (rank_at(&m_same), rank_at(&m_other));
            same &= a == e.rank;
            other &= b == e.rank;
            rows.push(json!({"epsilon": eps, "i": e.i, "j": e.j, "rank": e.rank,
                "mirror_rank_same_epsilon": a, "mirror_rank_other_epsilon": b}));
        }
    }
    Ok(json!({"rows": rows, "ranks_match_same_epsilon": same, "ranks_match_other_epsilon": other}))
}

fn run(cli: &Cli, d: &LinkDiagram) -> Result<Value, Error> {
    match cli.op {
        Op::Homology => homology(cli, d),
        Op::Sq2e0 | Op::Sq2e1 | Op::Sq2even | Op::Sq1odd | Op::Sq1even => {
            steenrod_op(cli, d, operation(cli.op))
        }
        Op::Chang => chang(cli, d),
        Op::Sinv => sinv(d),
        Op::Validate => validate(cli, d),
        Op::DualityReport => duality(cli, d),
    }
}

fn exit_code(e: &Error) -> u8 {
    if matches!(e, Error::Input(_)) {
        2
    } else {
        1
    }
}

/// Runs all jobs on up to `cli.jobs` threads; results keep input order.
fn run_all(cli: &Cli, jobs: &[Job]) -> Vec<Result<Value, Error>> {
    let results: Mutex<Vec<Option<Result<Value, Error>>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..cli.jobs.max(1).min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= jobs.len() {
                    break;
                }
                let r = jobs[k].diagram.clone().and_then(|d| run(cli, &d));
                results.lock().unwrap()[k] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn text_lines(op: Op, v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let arr = |k: &str| v[k].as_array().cloned().unwrap_or_default();
    match op {
        Op::Homology => {
            for key in ["odd", "odd_reduced"] {
                for g in arr(key) {
                    out.push(format!(
                        "{key} ({}, {}): {}",
                        g["i"],
                        g["j"],
                        g["group"].as_str().unwrap_or("")
                    ));
                }
            }
            for g in arr("f2") {
                out.push(format!("f2 ({}, {}): {}", g["i"], g["j"], g["dim"]));
            }
        }
        Op::Chang => {
            for r in arr("rows") {
                out.push(format!(
                    "q={}: Sq2 {} | Sq2_0 {} | Sq2_1 {}",
                    r["j"],
                    r["sq2even"].as_str().unwrap_or(""),
                    r["sq2e0"].as_str().unwrap_or(""),
                    r["sq2e1"].as_str().unwrap_or("")
                ));
            }
        }
        Op::Sinv => {
            out.push(format!("s = {}", v["s_f2"]));
            if let Some(m) = v["refinements"].as_object() {
                for (k, t) in m {
                    out.push(format!("{k}: {t}"));
                }
            }
        }
        Op::Validate => {
            out.push(format!(
                "checks: {}, violations: {}",
                v["checks"],
                arr("violations").len()
            ));
            for x in arr("violations") {
                out.push(format!("  {x}"));
            }
        }
        Op::DualityReport => {
            for r in arr("rows") {
                out.push(format!(
                    "eps={} ({}, {}) rank {}; mirror same eps {}, other eps {}",
                    r["epsilon"],
                    r["i"],
                    r["j"],
                    r["rank"],
                    r["mirror_rank_same_epsilon"],
                    r["mirror_rank_other_epsilon"]
                ));
            }
            out.push(format!(
                "ranks match: same eps {}, other eps {}",
                v["ranks_match_same_epsilon"], v["ranks_match_other_epsilon"]
            ));
        }
        _ => {
            for e in arr("entries") {
                let word = e["chang_word"]
                    .as_str()
                    .map(|w| format!(" [{w}]"))
                    .unwrap_or_default();
                out.push(format!(
                    "({}, {}) rank {}: {}{}",
                    e["i"], e["j"], e["rank"], e["matrix"], word
                ));
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = match jobs(&cli) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("oddkh: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let results = run_all(&cli, &jobs);
    let mut code = 0u8;
    let mut stdout = std::io::stdout().lock();
    let mut values = Vec::new();
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok(mut v) => {
                if cli.op == Op::Validate
                    && v["violations"].as_array().is_some_and(|a| !a.is_empty())
                {
                    code = code.max(1);
                }
                v["knot"] = json!(job.name);
                v["op"] = json!(format!("{:?}", cli.op).to_lowercase());
                values.push(v);
            }
            Err(e) => {
                eprintln!("oddkh: {}: {e}", job.name);
                code = code.max(exit_code(&e));
                values.push(json!({"knot": job.name, "error": e.to_string()}));
            }
        }
    }
    if cli.json {
        let doc = if cli.table.is_some() {
            json!({"schema": 1, "results": values})
        } else {
            let mut v = values.pop().unwrap_or(Value::Null);
            v["schema"] = json!(1);
            v
        };
        let _ = writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
    } else {
        for v in &values {
            let _ = writeln!(stdout, "{}", v["knot"].as_str().unwrap_or(""));
            if let Some(e) = v["error"].as_str() {
                let _ = writeln!(stdout, "  error: {e}");
                continue;
            }
            for l in text_lines(cli.op, v) {
                let _ = writeln!(stdout, "  {l}");
            }
        }
    }
    ExitCode::from(code)
}
