use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gridfloyd::bench::{self, Scenario, ScenarioConfig};
use gridfloyd::io::{format_sig, write_matrix_csv};
use gridfloyd::{
    build_weight_matrix, dispatch, fit_polynomial, parse_field, render_svg, CellId, Error, Field,
    Path, RenderSpec,
};

#[derive(Parser)]
#[command(
    name = "gridfloyd",
    version,
    about = "Obstacle-free UAV path planning on grid fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shortest path from one source to a destination.
    Plan {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        source: u64,
        #[arg(long)]
        dest: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Shortest paths from several sources and the closest one.
    Dispatch {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<u64>,
        #[arg(long)]
        dest: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Dump the direct-flight weight matrix as CSV.
    Matrix {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a timing sweep and write per-phase medians as CSV.
    Bench {
        #[arg(long, value_parser = parse_scenario)]
        scenario: Scenario,
        #[arg(long, default_value_t = bench::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = bench::DEFAULT_REPS)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the swept values (side lengths, obstacle or source counts).
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
        /// Extend the size sweep to 100x100.
        #[arg(long)]
        full: bool,
    },
    /// Least-squares polynomial fit of two CSV columns.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        degree: usize,
        /// Keep only rows where COLUMN equals VALUE, e.g. `phase=floyd`.
        #[arg(long = "where", value_name = "COLUMN=VALUE")]
        filters: Vec<String>,
    },
    /// Draw a field as SVG.
    Render {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure that maps to an exit code: 1 for "no route", 2 for everything else.
enum Failure {
    NoRoute,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoRoute) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("gridfloyd: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_field(path: &FsPath) -> Result<Field, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_field(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn format_cells(cells: &[CellId]) -> String {
    cells
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_svg(path: &FsPath, spec: &RenderSpec<'_>) -> Result<(), Failure> {
    fs::write(path, render_svg(spec)?)?;
    Ok(())
}

fn open_output(out: Option<&FsPath>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Plan {
            field,
            source,
            dest,
            svg,
        } => {
            let field = read_field(&field)?;
            let (source, dest) = (field.cell(source)?, field.cell(dest)?);
            let result = dispatch(&field, &[source], dest)?;
            let outcome = &result.per_source[&source];
            if let Some(svg) = svg {
                let mut spec = RenderSpec::new(&field);
                spec.paths.extend(outcome.path.clone());
                spec.sources.push(source);
                spec.destination = Some(dest);
                write_svg(&svg, &spec)?;
            }
            match &outcome.path {
                Some(path) => {
                    println!("path: {}", format_cells(&path.cells));
                    println!("length: {:.9}", path.length);
                    Ok(())
                }
                None => {
                    println!("NO ROUTE");
                    Err(Failure::NoRoute)
                }
            }
        }
        Command::Dispatch {
            field,
            sources,
            dest,
            svg,
        } => {
            let field = read_field(&field)?;
            let sources = sources
                .into_iter()
                .map(|s| field.cell(s))
                .collect::<gridfloyd::Result<Vec<_>>>()?;
            let dest = field.cell(dest)?;
            let result = dispatch(&field, &sources, dest)?;
            for (source, outcome) in &result.per_source {
                match &outcome.path {
                    Some(path) => println!(
                        "source {source}: distance {:.9} path {}",
                        outcome.distance,
                        format_cells(&path.cells)
                    ),
                    None => println!("source {source}: NO ROUTE"),
                }
            }
            if let Some(svg) = svg {
                let mut spec = RenderSpec::new(&field);
                spec.paths = result
                    .per_source
                    .values()
                    .filter_map(|o| o.path.clone())
                    .collect::<Vec<Path>>();
                spec.sources = sources;
                spec.destination = Some(dest);
                write_svg(&svg, &spec)?;
            }
            match result.winner {
                Some(w) => {
                    println!("winner: {w}");
                    Ok(())
                }
                None => {
                    println!("winner: NO ROUTE");
                    Err(Failure::NoRoute)
                }
            }
        }
        Command::Matrix { field, out } => {
            let field = read_field(&field)?;
            let w = build_weight_matrix(&field)?;
            let mut sink = open_output(out.as_deref())?;
            write_matrix_csv(&w, &mut sink)?;
            sink.flush()?;
            Ok(())
        }
        Command::Bench {
            scenario,
            seed,
            reps,
            out,
            values,
            full,
        } => {
            let config = match values {
                None => ScenarioConfig::standard(scenario, full),
                Some(v) => {
                    use bench::{STANDARD_OBSTACLES, STANDARD_SIDE};
                    match scenario {
                        Scenario::Size => ScenarioConfig::size(&v, STANDARD_OBSTACLES),
                        Scenario::Obstacles => ScenarioConfig::obstacles(STANDARD_SIDE, &v),
                        Scenario::Sources => {
                            ScenarioConfig::sources(STANDARD_SIDE, STANDARD_OBSTACLES, &v)
                        }
                        Scenario::Demo => {
                            return Err(Failure::Usage(
                                "--values does not apply to the demo scenario".into(),
                            ))
                        }
                    }
                }
            }
            .with_seed(seed)
            .with_reps(reps);

            let mut sink = open_output(out.as_deref())?;
            bench::write_csv_header(&mut sink)?;
            let mut write_err = None;
            bench::run_scenario_with(&config, |event| match event {
                bench::Progress::Round { done, reps } => eprintln!("round {done}/{reps} done"),
                bench::Progress::Point(records) => {
                    if let Some(r) = records.iter().find(|r| r.phase == bench::Phase::Total) {
                        eprintln!(
                            "{} {}x{} obstacles={} sources={}: total {:.6}s",
                            r.scenario,
                            r.width,
                            r.height,
                            r.num_obstacles,
                            r.num_sources,
                            r.seconds
                        );
                    }
                    if write_err.is_none() {
                        write_err = bench::write_csv_rows(records, &mut sink)
                            .and_then(|_| sink.flush())
                            .err();
                    }
                }
            })?;
            match write_err {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
        Command::Fit {
            csv,
            x,
            y,
            degree,
            filters,
        } => {
            let (xs, ys) = read_columns(&csv, &x, &y, &filters)?;
            let fit = fit_polynomial(&xs, &ys, degree)?;
            for (power, c) in fit.coefficients.iter().enumerate() {
                println!("c{power}: {}", format_sig(*c));
            }
            println!("r_squared: {}", format_sig(fit.r_squared));
            Ok(())
        }
        Command::Render { field, svg } => {
            let field = read_field(&field)?;
            write_svg(&svg, &RenderSpec::new(&field))
        }
    }
}

#[derive(Clone, Copy)]
enum Value {
    Column(usize),
    Cells(usize, usize),
}

fn read_columns(
    path: &FsPath,
    x: &str,
    y: &str,
    filters: &[String],
) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::Usage(e.to_string()))?
        .clone();
    let index = |name: &str| headers.iter().position(|h| h == name);
    let column =
        |name: &str| index(name).ok_or_else(|| Failure::Usage(format!("no column named `{name}`")));
    // `cells` is derived from width and height when the file has no such column
    let value = |name: &str| -> Result<Value, Failure> {
        match (index(name), name, index("width"), index("height")) {
            (Some(i), ..) => Ok(Value::Column(i)),
            (None, "cells", Some(w), Some(h)) => Ok(Value::Cells(w, h)),
            _ => Err(Failure::Usage(format!("no column named `{name}`"))),
        }
    };
    let (xv, yv) = (value(x)?, value(y)?);
    let mut conditions = Vec::new();
    for f in filters {
        let (name, value) = f
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("filter `{f}` is not COLUMN=VALUE")))?;
        conditions.push((column(name)?, value.to_string()));
    }

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| Failure::Usage(e.to_string()))?;
        if conditions
            .iter()
            .any(|(i, v)| record.get(*i) != Some(v.as_str()))
        {
            continue;
        }
        let num = |i: usize| -> Result<f64, Failure> {
            let field = record.get(i).unwrap_or("");
            gridfloyd::io::parse_number(field).map_err(Failure::from)
        };
        let eval = |v: Value| match v {
            Value::Column(i) => num(i),
            Value::Cells(w, h) => Ok(num(w)? * num(h)?),
        };
        xs.push(eval(xv)?);
        ys.push(eval(yv)?);
    }
    Ok((xs, ys))
}
