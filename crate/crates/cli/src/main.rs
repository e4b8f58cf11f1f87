use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use nle_core::dissect::LeafStatus;
use nle_core::infobounds::Relation;
use nle_core::quantify::{DirectionalReport, QuantifierReport};
use nle_core::reproduce::reproduce;
use nle_core::{
    big_delta, build, chsh_max, classify, cnot_bounds, delta_s, dissect, weighted_nonlocal_entropy, Ensemble,
    LocalSides, Mode, ModeKind, Params, Party, ProductSet,
};

mod file;

#[derive(Parser)]
#[command(
    name = "nle",
    version,
    about = "Nonlocal entropy and average-state entropy gap of bipartite ensembles"
)]
struct Cli {
    /// Emit a flat JSON record instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement generated from a product ensemble.
    Delta(QuantArgs),
    /// Reduction of the local entropy of the average state.
    BigDelta(QuantArgs),
    /// Dissect an orthogonal product set by local orthogonal splits.
    Dissect(DissectArgs),
    /// Holevo quantity and local bounds, before and after the transform.
    Bounds(BoundsArgs),
    /// Catalog of named ensembles.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print an ensemble's members.
    Show(SourceArgs),
    /// Recompute every reference value and compare.
    Reproduce {
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Args)]
struct SourceArgs {
    /// Catalog entry name.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    ensemble: Option<String>,
    /// JSON ensemble file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Catalog parameter, `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Keep only these members (numbered from 1), comma separated.
    #[arg(long, value_delimiter = ',')]
    indices: Option<Vec<usize>>,
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = ModeName::Fixed)]
    mode: ModeName,
    /// Layers of (local unitaries, CNOT) in the lu modes.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which parties rotate in the lu modes, relative to the CNOT direction.
    #[arg(long, value_enum, default_value_t = Rotate::Both)]
    rotate: Rotate,
}

#[derive(Args)]
struct QuantArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    direction: DirectionArg,
}

#[derive(Args)]
struct DissectArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Party allowed to make the first split.
    #[arg(long, value_enum, default_value_t = First::Any)]
    first: First,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeName {
    Fixed,
    EnsembleLu,
    PerStateLu,
    Assign,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rotate {
    Both,
    Target,
    Control,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DirectionArg {
    Right,
    Left,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum First {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Any,
}

/// Failures, each with its exit code.
enum Failure {
    /// The input was understood but the computation does not apply (2).
    Domain(nle_core::Error),
    /// The input could not be read or parsed (3).
    Input(anyhow::Error),
    /// `reproduce` found failing rows (1).
    Rows(usize),
}

impl From<nle_core::Error> for Failure {
    fn from(e: nle_core::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Rows(n)) => {
            eprintln!("{n} reference rows failed");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Delta(args) => cmd_quantity(args, cli.json, false),
        Command::BigDelta(args) => cmd_quantity(args, cli.json, true),
        Command::Dissect(args) => cmd_dissect(args, cli.json),
        Command::Bounds(args) => cmd_bounds(args, cli.json),
        Command::Catalog {
            action: CatalogAction::List,
        } => cmd_catalog(cli.json),
        Command::Show(args) => cmd_show(args, cli.json),
        Command::Reproduce { restarts, seed } => cmd_reproduce(*restarts, *seed, cli.json),
    }
}

struct Loaded {
    label: String,
    ensemble: Ensemble,
}

fn load(src: &SourceArgs) -> Result<Loaded, Failure> {
    let indices = match &src.indices {
        Some(idx) => {
            if idx.contains(&0) {
                return Err(Failure::Input(anyhow!("member indices start at 1")));
            }
            Some(idx.iter().map(|i| i - 1).collect::<Vec<_>>())
        }
        None => None,
    };
    if let Some(path) = &src.file {
        if !src.params.is_empty() {
            return Err(Failure::Input(anyhow!("--param applies to catalog entries only")));
        }
        let full = file::load(path).map_err(Failure::Input)?;
        let ensemble = match &indices {
            Some(idx) => full.subset(idx)?,
            None => full,
        };
        return Ok(Loaded {
            label: path.display().to_string(),
            ensemble,
        });
    }
    let name = src.ensemble.as_deref().expect("clap requires a source");
    let mut params = Params::new();
    for kv in &src.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Input(anyhow!("--param expects key=value, got `{kv}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(anyhow!("--param {k}: `{v}` is not a number")))?;
        params = params.with(k.trim(), v);
    }
    params.indices = indices;
    Ok(Loaded {
        label: name.to_string(),
        ensemble: build(name, &params)?,
    })
}

fn mode_of(args: &ModeArgs) -> Mode {
    let kind = match args.mode {
        ModeName::Fixed => ModeKind::Fixed,
        ModeName::EnsembleLu => ModeKind::EnsembleLu,
        ModeName::PerStateLu => ModeKind::PerStateLu,
        ModeName::Assign => ModeKind::Assign,
    };
    let sides = match args.rotate {
        Rotate::Both => LocalSides::Both,
        Rotate::Target => LocalSides::Target,
        Rotate::Control => LocalSides::Control,
    };
    Mode {
        kind,
        ..Mode::default()
    }
    .with_depth(args.depth)
    .with_restarts(args.restarts)
    .with_seed(args.seed)
    .with_sides(sides)
}

fn f6(x: f64) -> String {
    // Avoid printing "-0.000000" for values that are zero up to round-off.
    let x = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{x:.6}")
}

fn header(rec: &mut Map<String, Value>, command: &str, l: &Loaded) {
    let d = l.ensemble.dims();
    rec.insert("command".into(), json!(command));
    rec.insert("ensemble".into(), json!(l.label));
    rec.insert("dims_a".into(), json!(d.a));
    rec.insert("dims_b".into(), json!(d.b));
    rec.insert("members".into(), json!(l.ensemble.len()));
}

fn mode_fields(rec: &mut Map<String, Value>, m: &Mode) {
    rec.insert("mode".into(), json!(m.kind.name()));
    rec.insert("depth".into(), json!(m.depth));
    rec.insert("restarts".into(), json!(m.restarts));
    rec.insert("seed".into(), json!(m.seed));
    rec.insert("rotate".into(), json!(m.sides.name()));
}

fn print_header(l: &Loaded) {
    let d = l.ensemble.dims();
    println!(
        "{:<14}{} ({}x{}, {} members)",
        "ensemble",
        l.label,
        d.a,
        d.b,
        l.ensemble.len()
    );
}

fn print_mode(m: &Mode) {
    match m.kind {
        ModeKind::Fixed | ModeKind::Assign => println!("{:<14}{}", "mode", m.kind.name()),
        _ => println!(
            "{:<14}{} (depth {}, restarts {}, seed {}, rotate {})",
            "mode",
            m.kind.name(),
            m.depth,
            m.restarts,
            m.seed,
            m.sides.name()
        ),
    }
}

fn cmd_quantity(args: &QuantArgs, as_json: bool, gap: bool) -> Outcome {
    let l = load(&args.source)?;
    let mode = mode_of(&args.mode);
    let report = if gap {
        big_delta(&l.ensemble, &mode)?
    } else {
        delta_s(&l.ensemble, &mode)?
    };
    let prefix = if gap { "Delta" } else { "delta" };
    let dirs: Vec<&DirectionalReport> = match args.direction {
        DirectionArg::Right => vec![&report.right],
        DirectionArg::Left => vec![&report.left],
        DirectionArg::Both => vec![&report.right, &report.left],
    };
    let show_sym = args.direction == DirectionArg::Both;

    if as_json {
        let mut rec = Map::new();
        header(&mut rec, if gap { "big-delta" } else { "delta" }, &l);
        mode_fields(&mut rec, &mode);
        for r in &dirs {
            direction_fields(&mut rec, prefix, r);
        }
        if show_sym {
            rec.insert(format!("{prefix}_sym"), json!(report.symmetric));
        }
        println!("{}", Value::Object(rec));
        return Ok(());
    }

    print_header(&l);
    print_mode(&mode);
    println!();
    for r in &dirs {
        println!("{prefix}_{} = {}", r.direction.name(), f6(r.value));
    }
    if show_sym {
        println!("{prefix}_sym = {}", f6(report.symmetric));
    }
    println!();
    print_details(&report, &dirs, gap);
    Ok(())
}

fn direction_fields(rec: &mut Map<String, Value>, prefix: &str, r: &DirectionalReport) {
    let d = r.direction.name();
    rec.insert(format!("{prefix}_{d}"), json!(r.value));
    rec.insert(format!("contributions_{d}"), json!(r.contributions));
    rec.insert(format!("repetitions_{d}"), json!(r.repetitions));
    rec.insert(format!("layers_{d}"), json!(r.layers));
    rec.insert(format!("entangled_after_{d}"), json!(r.entangled_after));
    rec.insert(format!("work_in_a_{d}"), json!(r.work[0].initial));
    rec.insert(format!("work_fin_a_{d}"), json!(r.work[0].fin));
    rec.insert(format!("work_in_b_{d}"), json!(r.work[1].initial));
    rec.insert(format!("work_fin_b_{d}"), json!(r.work[1].fin));
    if let Some((ga, gb)) = r.side_gaps {
        rec.insert(format!("gap_a_{d}"), json!(ga));
        rec.insert(format!("gap_b_{d}"), json!(gb));
    }
}

fn print_details(report: &QuantifierReport, dirs: &[&DirectionalReport], gap: bool) {
    print!("{:<10}", "direction");
    for col in [
        "reps",
        "layers",
        "entangled",
        "W_in(A)",
        "W_fin(A)",
        "W_in(B)",
        "W_fin(B)",
    ] {
        print!("{col:>11}");
    }
    if gap {
        print!("{:>11}{:>11}", "gap(A)", "gap(B)");
    }
    println!();
    for r in dirs {
        print!("{:<10}", r.direction.name());
        let reps = if r.repetitions == 0 {
            "-".to_string()
        } else {
            r.repetitions.to_string()
        };
        print!("{reps:>11}{:>11}", r.layers);
        print!("{:>11}", format!("{}/{}", r.entangled_after, r.contributions.len()));
        for w in &r.work {
            print!("{:>11}{:>11}", f6(w.initial), f6(w.fin));
        }
        if let Some((ga, gb)) = r.side_gaps {
            print!("{:>11}{:>11}", f6(ga), f6(gb));
        }
        println!();
    }
    println!();
    print!("{:<10}", "member");
    for r in dirs {
        print!("{:>11}", r.direction.name());
    }
    println!();
    for i in 0..report.right.contributions.len() {
        print!("{:<10}", i + 1);
        for r in dirs {
            print!("{:>11}", f6(r.contributions[i]));
        }
        println!();
    }
    if gap {
        println!("\ncolumns per member: entanglement entropy after the transform");
    } else {
        println!("\ncolumns per member: entanglement generated by the transform");
    }
}

fn cmd_dissect(args: &DissectArgs, as_json: bool) -> Outcome {
    let l = load(&args.source)?;
    let set = ProductSet::from_ensemble(&l.ensemble)?;
    let first = match args.first {
        First::A => Some(Party::A),
        First::B => Some(Party::B),
        First::Any => None,
    };
    let tree = dissect(&set, first);
    let class = classify(&set);
    let weighted = weighted_nonlocal_entropy(&set, first);
    if as_json {
        let mut rec = Map::new();
        header(&mut rec, "dissect", &l);
        rec.insert(
            "first".into(),
            json!(first.map_or("any".to_string(), |p| p.to_string())),
        );
        rec.insert("classification".into(), json!(class.to_string()));
        rec.insert("complete".into(), json!(tree.is_complete()));
        rec.insert("levels".into(), json!(tree.levels()));
        let leaves: Vec<Value> = tree
            .leaves()
            .iter()
            .map(|l| json!(l.members.iter().map(|m| m + 1).collect::<Vec<_>>()))
            .collect();
        rec.insert("leaves".into(), Value::Array(leaves));
        let irreducible = tree
            .leaves()
            .iter()
            .filter(|l| !matches!(l.kind, nle_core::dissect::NodeKind::Leaf(LeafStatus::Singleton)))
            .count();
        rec.insert("irreducible_leaves".into(), json!(irreducible));
        rec.insert("weighted_nonlocal_entropy".into(), json!(weighted));
        println!("{}", Value::Object(rec));
        return Ok(());
    }
    print_header(&l);
    println!("{:<14}{}", "first", first.map_or("any".to_string(), |p| p.to_string()));
    println!();
    print!("{}", tree.render());
    println!();
    println!("complete = {}, levels = {}", tree.is_complete(), tree.levels());
    println!("classification: {class}");
    println!("weighted_nonlocal_entropy = {}", f6(weighted));
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs, as_json: bool) -> Outcome {
    let l = load(&args.source)?;
    let mode = mode_of(&args.mode);
    let r = cnot_bounds(&l.ensemble, &mode)?;
    let relation = match r.relation {
        Relation::Lower => "lower",
        Relation::Upper => "upper",
    };
    if as_json {
        let mut rec = Map::new();
        header(&mut rec, "bounds", &l);
        mode_fields(&mut rec, &mode);
        rec.insert("chi".into(), json!(r.chi));
        rec.insert("local_holevo".into(), json!(r.local_holevo));
        rec.insert("cnot_lower".into(), json!(r.cnot_lower));
        rec.insert("cnot_upper".into(), json!(r.cnot_upper));
        rec.insert("relation".into(), json!(relation));
        rec.insert("entangled_before".into(), json!(r.entangled_before));
        rec.insert("entangled_after".into(), json!(r.entangled_after));
        rec.insert("upper_effective".into(), json!(r.upper_effective));
        println!("{}", Value::Object(rec));
        return Ok(());
    }
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), f6);
    print_header(&l);
    print_mode(&mode);
    println!();
    println!("chi = {}, local_holevo = {}", f6(r.chi), f6(r.local_holevo));
    println!("cnot_lower = {}, cnot_upper = {}", opt(r.cnot_lower), opt(r.cnot_upper));
    println!("relation: transformed local bound is compared as the {relation} bound");
    println!(
        "entangled members: {} before, {} after",
        r.entangled_before, r.entangled_after
    );
    if r.relation == Relation::Upper && !r.upper_effective {
        println!("note: no member stays entangled, so the upper bound adds nothing");
    }
    Ok(())
}

fn cmd_catalog(as_json: bool) -> Outcome {
    let entries = nle_core::list();
    if as_json {
        let rows: Vec<Value> = entries
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "dims_a": e.dims.0,
                    "dims_b": e.dims.1,
                    "members": e.members,
                    "product": e.content == nle_core::catalog::Content::Product,
                    "orthogonal": e.orthogonal,
                    "params": e.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
                    "description": e.description,
                })
            })
            .collect();
        println!("{}", Value::Array(rows));
        return Ok(());
    }
    let params: Vec<String> = entries
        .iter()
        .map(|e| {
            let p = e
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", short(*v)))
                .collect::<Vec<_>>()
                .join(",");
            if p.is_empty() {
                "-".to_string()
            } else {
                p
            }
        })
        .collect();
    let width = params.iter().map(String::len).max().unwrap_or(0).max(6) + 2;
    println!(
        "{:<18}{:<6}{:>8}  {:<10}{:<width$}description",
        "name", "dims", "members", "content", "params"
    );
    for (e, params) in entries.iter().zip(&params) {
        let content = match e.content {
            nle_core::catalog::Content::Product => "product",
            nle_core::catalog::Content::Entangled => "entangled",
        };
        println!(
            "{:<18}{:<6}{:>8}  {:<10}{:<width$}{}",
            e.name,
            format!("{}x{}", e.dims.0, e.dims.1),
            e.members,
            content,
            params,
            e.description
        );
    }
    Ok(())
}

fn short(v: f64) -> String {
    let v = if v.abs() < 5e-5 { 0.0 } else { v };
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn complex_text(re: f64, im: f64) -> String {
    let (r, i) = (short(re), short(im));
    match (r == "0", i == "0") {
        (_, true) => r,
        (true, false) => format!("{i}i"),
        (false, false) if i.starts_with('-') => format!("{r}{i}i"),
        (false, false) => format!("{r}+{i}i"),
    }
}

fn cmd_show(args: &SourceArgs, as_json: bool) -> Outcome {
    let l = load(args)?;
    let e = &l.ensemble;
    if as_json {
        println!(
            "{}",
            serde_json::to_string(&file::EnsembleFile::from_ensemble(e)).expect("serializable")
        );
        return Ok(());
    }
    print_header(&l);
    println!("{:<14}{}", "product", e.is_product());
    println!(
        "{:<14}{} (gram defect {:.2e})",
        "orthogonal",
        e.is_orthogonal(),
        e.gram_defect()
    );
    let (sa, sb) = e.marginal_entropies();
    println!("{:<14}S(A) = {}, S(B) = {}", "average", f6(sa), f6(sb));
    println!();
    let qubits = (e.dims().a, e.dims().b) == (2, 2);
    print!("{:<8}{:>12}{:>12}", "member", "probability", "entropy");
    if qubits {
        print!("{:>12}", "chsh_max");
    }
    println!("  amplitudes");
    for (k, (p, s)) in e.members().iter().enumerate() {
        print!("{:<8}{:>12}{:>12}", k + 1, f6(*p), f6(s.entanglement_entropy()));
        if qubits {
            print!("{:>12}", f6(chsh_max(s)?));
        }
        let amps: Vec<String> = s
            .amplitudes()
            .as_slice()
            .iter()
            .map(|z| complex_text(z.re, z.im))
            .collect();
        println!("  [{}]", amps.join(", "));
    }
    Ok(())
}

fn cmd_reproduce(restarts: usize, seed: u64, as_json: bool) -> Outcome {
    let rows = reproduce(restarts, seed)?;
    let failed = rows.iter().filter(|r| !r.passed()).count();
    if as_json {
        let out: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "label": r.label,
                    "expected": r.expected_text(),
                    "source": r.source.name(),
                    "got": r.got_text(),
                    "pass": r.passed(),
                })
            })
            .collect();
        println!("{}", Value::Array(out));
    } else {
        let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        for r in &rows {
            println!(
                "{:<width$} | expected {} ({}) | got {} | {}",
                r.label,
                r.expected_text(),
                r.source.name(),
                r.got_text(),
                if r.passed() { "PASS" } else { "FAIL" }
            );
        }
        println!("{} rows, {} passed, {} failed", rows.len(), rows.len() - failed, failed);
    }
    if failed > 0 {
        Err(Failure::Rows(failed))
    } else {
        Ok(())
    }
}
