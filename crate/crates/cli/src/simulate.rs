use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::str::FromStr;

use regshrink::report::{format_number, write_summary_row, SUMMARY_HEADER};
use regshrink::simulation::{run_cell, SimCell, SimConfig};

use crate::cli::SimulateArgs;
use crate::error::{CliError, Result};
use crate::output::Provenance;

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{key}: cannot parse {v:?}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}

/// Applies `key = value` lines (blank lines and `#` comments ignored).
pub fn apply_config_text(config: &mut SimConfig, text: &str) -> Result<()> {
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n_grid" => config.n_grid = parse_list(key, value)?,
            "r_grid" => config.r_grid = parse_list(key, value)?,
            "rho_grid" => config.rho_grid = parse_list(key, value)?,
            "reps" => config.replications = parse_one(key, value)?,
            "validation_n" => config.validation_n = parse_one(key, value)?,
            "folds" => config.folds = parse_one(key, value)?,
            "seed" => config.master_seed = parse_one(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
        }
    }
    Ok(())
}

pub fn resolve_config(args: &SimulateArgs) -> Result<SimConfig> {
    let mut config = SimConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        apply_config_text(&mut config, &text)?;
    }
    if let Some(v) = &args.n_grid {
        config.n_grid = v.clone();
    }
    if let Some(v) = &args.r_grid {
        config.r_grid = v.clone();
    }
    if let Some(v) = &args.rho_grid {
        config.rho_grid = v.clone();
    }
    if let Some(v) = args.reps {
        config.replications = v;
    }
    if let Some(v) = args.validation_n {
        config.validation_n = v;
    }
    if let Some(v) = args.folds {
        config.folds = v;
    }
    if let Some(v) = args.seed {
        config.master_seed = v;
    }
    config.validate()?;
    Ok(config)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// The resolved configuration in the same format [`apply_config_text`] reads.
pub fn render_config(config: &SimConfig) -> String {
    format!(
        "n_grid = {}\nr_grid = {}\nrho_grid = {}\nreps = {}\nvalidation_n = {}\nfolds = {}\nseed = {}\n",
        join(&config.n_grid),
        join(&config.r_grid),
        join(&config.rho_grid),
        config.replications,
        config.validation_n,
        config.folds,
        config.master_seed,
    )
}

/// `first:step:last` for an evenly spaced grid, the full list otherwise.
fn describe_grid(grid: &[f64]) -> String {
    let f = |x| format_number(x, 6);
    match grid {
        [] => String::new(),
        [only] => f(*only),
        [first, second, ..] => {
            let last = grid[grid.len() - 1];
            let step = second - first;
            if grid.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-12) {
                format!("{}:{}:{}", f(*first), f(step), f(last))
            } else {
                grid.iter().map(|&x| f(x)).collect::<Vec<_>>().join(",")
            }
        }
    }
}

pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.txt";

fn cell_key(cell: &SimCell, digits: usize) -> String {
    format!(
        "{},{},{}",
        cell.n,
        format_number(cell.r, digits),
        format_number(cell.rho, digits)
    )
}

/// Number of finished cells in an existing summary, after dropping any
/// partially written trailing line. Errors if the rows do not match the
/// expected cell order.
fn completed_prefix(text: &str, header: &str, cells: &[SimCell], digits: usize) -> Result<(usize, String)> {
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    if !complete.starts_with(header) {
        return Err(CliError::Usage(
            "existing output has a different header; cannot resume".into(),
        ));
    }
    let rows: Vec<&str> = complete[header.len()..].lines().collect();
    if rows.len() > cells.len() {
        return Err(CliError::Usage(
            "existing output has more rows than the design; cannot resume".into(),
        ));
    }
    for (row, cell) in rows.iter().zip(cells) {
        if !row.starts_with(&format!("{},", cell_key(cell, digits))) {
            return Err(CliError::Usage(format!(
                "existing row {row:?} does not match the design; cannot resume"
            )));
        }
    }
    Ok((rows.len(), complete.to_string()))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = resolve_config(args)?;
    let digits = args.precision;
    let rendered = render_config(&config);
    let prov = Provenance::new("simulate")
        .with("n_grid", join(&config.n_grid))
        .with("r_grid", join(&config.r_grid))
        .with("rho_grid", join(&config.rho_grid))
        .with("reps", config.replications)
        .with("validation_n", config.validation_n)
        .with("folds", config.folds)
        .with("s_grid", describe_grid(&config.s_grid))
        .with("precision", digits)
        .seed(config.master_seed);
    let header = format!("{}{SUMMARY_HEADER}\n", prov.render());
    let cells = config.cells();
    fs::create_dir_all(&args.out).map_err(|e| CliError::output(&args.out, e))?;
    let out = &args.out.join(SUMMARY_FILE);
    let sidecar = args.out.join(CONFIG_FILE);

    let mut done = 0;
    let mut existing = None;
    if args.resume && out.exists() {
        let previous = fs::read_to_string(&sidecar).map_err(|e| CliError::input(&sidecar, e))?;
        if previous != rendered {
            return Err(CliError::Usage(format!(
                "{} was produced with a different configuration; cannot resume",
                out.display()
            )));
        }
        let text = fs::read_to_string(out).map_err(|e| CliError::input(out, e))?;
        let (n, kept) = completed_prefix(&text, &header, &cells, digits)?;
        done = n;
        existing = Some(kept);
    }

    fs::write(&sidecar, &rendered).map_err(|e| CliError::output(&sidecar, e))?;
    let file = match existing {
        Some(kept) => {
            fs::write(out, kept).map_err(|e| CliError::output(out, e))?;
            OpenOptions::new().append(true).open(out)
        }
        None => File::create(out).and_then(|mut f| f.write_all(header.as_bytes()).map(|_| f)),
    }
    .map_err(|e| CliError::output(out, e))?;
    let mut w = BufWriter::new(file);

    for cell in &cells[done..] {
        let summary = run_cell(&config, cell)?;
        write_summary_row(&mut w, &summary, digits)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::output(out, e))?;
    }
    Ok(())
}
