mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nlum::consistency::{
    avoids_sure_loss, hbm_is_coherent_fast, is_2alternating, is_2coherent, is_2monotone, is_c_convex, is_capacity,
    is_coherent, is_convex, is_precise_probability, is_subadditive, is_superadditive,
};
use nlum::document::{IntervalDocument, ModelDocument};
use nlum::fuzz::{self, CheckOptions, Family, FuzzConfig};
use nlum::intervals::{is_reachable, natural_extension, natural_extension_table};
use nlum::{Assessment, Error, Event, NLModel, Orientation, Partition, Rational, Verdict};

#[derive(Parser)]
#[command(name = "nlum", version, about = "Nearly-linear imprecise probability models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the family of a model, its boundary flags and event counts.
    Classify {
        /// Model document (`-` reads standard input).
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check one consistency notion. Exit status 0 if it holds, 1 if not, 2 on error.
    Check {
        /// Model document, or a table written by `nlum table --format json`.
        file: PathBuf,
        #[arg(long, value_enum)]
        notion: Notion,
        /// Which row of a table to check.
        #[arg(long, value_enum, default_value = "lower")]
        row: Row,
    },
    /// Print the base probability and the lower and upper probability of every event.
    Table {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Emit (P0(A), lower(A), upper(A)) per event instead of rows per measure.
        #[arg(long)]
        plot_data: bool,
        /// Add approximate decimal rows to CSV output.
        #[arg(long)]
        decimal: bool,
    },
    /// Sample models from a family and check the structural results on each.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Atom count, either `n` or a range `lo-hi`.
        #[arg(long, default_value = "2-5")]
        atoms: AtomRange,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "all")]
        family: Family,
        /// Rerun only the case with this per-case seed (as printed in a failure).
        #[arg(long)]
        replay: Option<u64>,
        #[arg(long, default_value_t = 60)]
        denominator: i64,
        /// Skip the LP and gain cross-checks.
        #[arg(long)]
        no_oracles: bool,
    },
    /// Natural extension of a probability interval.
    ExtendInterval {
        file: PathBuf,
        /// Comma-separated atom labels; without it the whole table is printed.
        #[arg(long)]
        event: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Notion {
    Capacity,
    #[value(name = "2coherence")]
    TwoCoherence,
    Asl,
    Coherence,
    #[value(name = "2monotone")]
    TwoMonotone,
    Subadditive,
    Superadditive,
    Convex,
    #[value(name = "c-convex")]
    CConvex,
    Precise,
}

#[derive(Clone, Copy, ValueEnum)]
enum Row {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy)]
struct AtomRange(usize, usize);

impl FromStr for AtomRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad atom count {t:?}"));
        let (lo, hi) = match s.split_once('-') {
            Some((lo, hi)) => (parse(lo)?, parse(hi)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo == 0 || lo > hi {
            return Err(format!("atom range {s:?} must satisfy 1 <= lo <= hi"));
        }
        Ok(AtomRange(lo, hi))
    }
}

enum Failure {
    Error(Error),
    Message(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { file, json } => classify(&file, json),
        Command::Check { file, notion, row } => check(&file, notion, row),
        Command::Table { file, format, plot_data, decimal } => table(&file, format, plot_data, decimal),
        Command::Fuzz { cases, atoms, seed, family, replay, denominator, no_oracles } => {
            let config = FuzzConfig {
                cases,
                min_atoms: atoms.0,
                max_atoms: atoms.1,
                seed,
                family,
                denominator,
                checks: CheckOptions { oracles: !no_oracles, ..CheckOptions::default() },
            };
            run_fuzz(&config, replay)
        }
        Command::ExtendInterval { file, event } => extend_interval(&file, event.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Message(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Message(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Message(format!("reading {}: {e}", path.display())))
    }
}

fn load_model(path: &Path) -> Result<NLModel, Failure> {
    Ok(ModelDocument::from_json(&read_input(path)?)?.to_model()?)
}

/// Writes to standard output, treating a closed pipe as success.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
        }
    }
}

fn print_json(v: &Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values serialize")));
}

fn classify(path: &Path, as_json: bool) -> Outcome {
    let model = load_model(path)?;
    let class = model.classify();
    let params = model.params();
    let sets = model.event_sets()?;
    let slope_plus_twice = &params.b + &(&params.a + &params.a);
    if as_json {
        print_json(&json!({
            "tag": class.tag.to_string(),
            "orientation": model.orientation().to_string(),
            "a": params.a.to_string(),
            "b": params.b.to_string(),
            "c": params.c().to_string(),
            "b_plus_2a": slope_plus_twice.to_string(),
            "b_plus_2a_eq_1": class.b_plus_2a_eq_1,
            "a_plus_b_eq_1": class.a_plus_b_eq_1,
            "null_events": sets.null.len(),
            "universal_events": sets.universal.len(),
            "essential_events": sets.essential.len(),
        }));
    } else {
        emit(&format!(
            "{}, c={}, b+2a={}
orientation: {}
b+2a=1: {}
a+b=1: {}
null events: {}
universal events: {}
essential events: {}
",
            class.tag,
            params.c(),
            slope_plus_twice,
            model.orientation(),
            class.b_plus_2a_eq_1,
            class.a_plus_b_eq_1,
            sets.null.len(),
            sets.universal.len(),
            sets.essential.len(),
        ));
    }
    Ok(true)
}

fn load_assessment(text: &str, row: Row) -> Result<(Assessment, Option<NLModel>), Failure> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Document { field: "document".into(), message: e.to_string() })?;
    if value.get("rows").is_none() {
        let model = ModelDocument::from_json(text)?.to_model()?;
        return Ok((model.to_assessment()?, Some(model)));
    }
    let bad = |field: &str, message: &str| Error::Document { field: field.into(), message: message.into() };
    let atoms: Vec<String> =
        serde_json::from_value(value["atoms"].clone()).map_err(|e| bad("atoms", &e.to_string()))?;
    let partition = Partition::new(atoms).map_err(|e| bad("atoms", &e.to_string()))?;
    let events: Vec<Vec<String>> =
        serde_json::from_value(value["events"].clone()).map_err(|e| bad("events", &e.to_string()))?;
    let (key, orientation) = match row {
        Row::Lower => ("lower", Orientation::Lower),
        Row::Upper => ("upper", Orientation::Upper),
    };
    let field = format!("rows.{key}");
    let values: Vec<String> =
        serde_json::from_value(value["rows"][key].clone()).map_err(|e| bad(&field, &e.to_string()))?;
    if values.len() != events.len() {
        return Err(bad(&field, "one value per event is required").into());
    }
    let mut entries = Vec::with_capacity(events.len());
    for (k, (labels, v)) in events.iter().zip(&values).enumerate() {
        let e = partition.event(labels)?;
        let r: Rational = v.parse().map_err(|source| Error::Field { field: format!("{field}[{k}]"), source })?;
        entries.push((e, r));
    }
    Ok((Assessment::from_entries(partition, orientation, &entries)?, None))
}

fn check(path: &Path, notion: Notion, row: Row) -> Outcome {
    let (assessment, model) = load_assessment(&read_input(path)?, row)?;
    let p = assessment.partition().clone();
    let lower = assessment.orientation() == Orientation::Lower;
    let (name, verdict): (&str, Verdict) = match notion {
        Notion::Capacity => ("capacity", is_capacity(&assessment)),
        Notion::TwoCoherence => ("2coherence", is_2coherent(&assessment)),
        Notion::Asl => ("asl", avoids_sure_loss(&assessment)),
        Notion::Coherence => ("coherence", is_coherent(&assessment)),
        Notion::TwoMonotone if lower => ("2monotone", is_2monotone(&assessment)),
        Notion::TwoMonotone => ("2alternating", is_2alternating(&assessment)),
        Notion::Subadditive => ("subadditive", is_subadditive(&assessment)),
        Notion::Superadditive => ("superadditive", is_superadditive(&assessment)),
        Notion::Convex => ("convex", is_convex(&assessment)),
        Notion::CConvex => ("c-convex", is_c_convex(&assessment)),
        Notion::Precise => ("precise", is_precise_probability(&assessment)),
    };
    let mut out = json!({ "notion": name, "orientation": assessment.orientation().to_string() });
    let rendered = render::verdict(&p, &verdict);
    out["holds"] = rendered["holds"].clone();
    if let Some(w) = rendered.get("witness") {
        out["witness"] = w.clone();
    }
    if let (Notion::Coherence, Some(model)) = (notion, &model) {
        if model.classify().is_horizontal_barrier() {
            // coherence of the pair is decided by subadditivity of the upper probability
            let fast = hbm_is_coherent_fast(&model.upper())?;
            assert_eq!(fast.holds, verdict.holds, "subadditivity and the envelope check disagree");
            if let Some(w) = &fast.witness {
                out["oracle_witness"] = out["witness"].take();
                out["witness"] = render::witness(&p, w);
                out["rule"] = json!("subadditivity of the upper probability");
            }
        }
    }
    print_json(&out);
    Ok(verdict.holds)
}

fn table(path: &Path, format: Format, plot_data: bool, decimal: bool) -> Outcome {
    let model = load_model(path)?;
    let p = model.partition().clone();
    let lower = model.lower().to_assessment()?;
    let upper = model.upper().to_assessment()?;
    let order = render::table_order(p.len());
    let p0: Vec<Rational> = order.iter().map(|e| model.p0().value(*e)).collect::<Result<_, _>>()?;
    let lo: Vec<Rational> = order.iter().map(|e| lower[*e].clone()).collect();
    let up: Vec<Rational> = order.iter().map(|e| upper[*e].clone()).collect();
    match (format, plot_data) {
        (Format::Json, false) => print_json(&json!({
            "atoms": p.labels(),
            "events": order.iter().map(|e| render::event(&p, *e)).collect::<Vec<_>>(),
            "rows": { "p0": render::rationals(&p0), "lower": render::rationals(&lo), "upper": render::rationals(&up) },
        })),
        (Format::Json, true) => print_json(&Value::Array(
            order
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    json!({
                        "event": render::event(&p, *e),
                        "p0": p0[k].to_string(),
                        "lower": lo[k].to_string(),
                        "upper": up[k].to_string(),
                    })
                })
                .collect(),
        )),
        (Format::Csv, false) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["measure".to_string()];
            header.extend(order.iter().map(|e| p.format_event(*e)));
            write_csv(&mut w, &header)?;
            for (name, row) in [("P0", &p0), ("lower", &lo), ("upper", &up)] {
                let mut rec = vec![name.to_string()];
                rec.extend(row.iter().map(Rational::to_string));
                write_csv(&mut w, &rec)?;
            }
            if decimal {
                for (name, row) in [("P0", &p0), ("lower", &lo), ("upper", &up)] {
                    let mut rec = vec![format!("{name} (approximate)")];
                    rec.extend(row.iter().map(|r| format!("{:.6}", r.to_f64())));
                    write_csv(&mut w, &rec)?;
                }
            }
            emit_csv(w)?;
        }
        (Format::Csv, true) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            write_csv(&mut w, &["event", "p0", "lower", "upper"].map(String::from))?;
            for (k, e) in order.iter().enumerate() {
                write_csv(&mut w, &[p.format_event(*e), p0[k].to_string(), lo[k].to_string(), up[k].to_string()])?;
            }
            emit_csv(w)?;
        }
    }
    Ok(true)
}

fn write_csv(w: &mut csv::Writer<Vec<u8>>, record: &[String]) -> Result<(), Failure> {
    w.write_record(record).map_err(|e| Failure::Message(e.to_string()))
}

fn emit_csv(w: csv::Writer<Vec<u8>>) -> Result<(), Failure> {
    let bytes = w.into_inner().map_err(|e| Failure::Message(e.to_string()))?;
    emit(&String::from_utf8(bytes).expect("CSV fields are UTF-8"));
    Ok(())
}

fn run_fuzz(config: &FuzzConfig, replay: Option<u64>) -> Outcome {
    let report = match replay {
        Some(seed) => fuzz::replay(config, seed),
        None => fuzz::run(config),
    };
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("reports serialize")));
    Ok(report.is_clean())
}

fn extend_interval(path: &Path, event: Option<&str>) -> Outcome {
    let interval = IntervalDocument::from_json(&read_input(path)?)?.to_interval()?;
    let p = interval.partition().clone();
    let reach = is_reachable(&interval);
    if !reach.holds {
        print_json(&json!({ "reachable": false, "witness": render::verdict(&p, &reach)["witness"] }));
        return Ok(false);
    }
    match event {
        Some(spec) => {
            let labels: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let e: Event = p.event(&labels)?;
            let (l, u) = natural_extension(&interval, e)?;
            print_json(&json!({ "event": render::event(&p, e), "lower": l.to_string(), "upper": u.to_string() }));
        }
        None => {
            let (lower, upper) = natural_extension_table(&interval)?;
            let order = render::table_order(p.len());
            print_json(&json!({
                "atoms": p.labels(),
                "events": order.iter().map(|e| render::event(&p, *e)).collect::<Vec<_>>(),
                "rows": {
                    "lower": order.iter().map(|e| lower[*e].to_string()).collect::<Vec<_>>(),
                    "upper": order.iter().map(|e| upper[*e].to_string()).collect::<Vec<_>>(),
                },
            }));
        }
    }
    Ok(true)
}
