use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use rmconv::bounds::{bound_table, BoundRecord, ParamSet};
use rmconv::conversion::{apply_matrix, classify_symbols, rm_merge_procedure, verify_conversion};
use rmconv::oracle::{min_access_cost, search_space_size, SearchLimits};
use rmconv::reed_muller::{rm_generator, rm_transformed_generator};
use rmconv::report::{comparison_rows, merge_report, ReportRecord, REPORT_K_LIMIT};
use rmconv::text::{
    format_matrix, format_matrix_with_blocks, format_vector, parse_list, parse_matrix_file,
    parse_vector,
};
use rmconv::{BitMatrix, ConversionMatrix, ConvertibleInstance, Error, LinearCode};

#[derive(Parser)]
#[command(
    name = "rmconv",
    version,
    about = "Linear conversion of binary codes in the merge regime"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Reed-Muller generator matrix
    Rm {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        /// Use the row-transformed generator with a `#blocks` annotation
        #[arg(long)]
        transformed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge RM(r, m-1) and RM(r-1, m-1) into RM(r, m) and report costs against the bounds
    Merge {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        emit_y: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a conversion matrix and classify its symbols
    Verify {
        /// Block-diagonal generator of the initial codes
        #[arg(long)]
        gi: PathBuf,
        /// Initial code lengths; defaults to the `#blocks` line of the Y file
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long)]
        gf: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Comparison table for the Reed-Muller merge at r = m - 2
    Report {
        /// Inclusive range such as `4-6`, or a list such as `4,5`
        #[arg(long, default_value = "4-6")]
        m_range: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate every bound for a parameter set
    Bounds {
        /// File with one `key=value` per line, keys as in the flags below
        #[arg(long, conflicts_with_all = ["lambda", "n_i", "k_i", "n_f", "k_f", "d_f", "d_f_dual"])]
        params: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long = "nI")]
        n_i: Option<String>,
        #[arg(long = "kI")]
        k_i: Option<String>,
        #[arg(long = "nF")]
        n_f: Option<usize>,
        #[arg(long = "kF")]
        k_f: Option<usize>,
        #[arg(long = "dF")]
        d_f: Option<usize>,
        #[arg(long = "dFdual")]
        d_f_dual: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exhaustive search for a minimum-access-cost conversion
    Oracle {
        #[arg(long)]
        gi: PathBuf,
        #[arg(long)]
        blocks: String,
        #[arg(long)]
        gf: PathBuf,
        #[arg(long)]
        max_kf: Option<usize>,
        /// Wall-clock budget in seconds
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long)]
        emit_y: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Apply a conversion matrix to initial codewords
    Apply {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        blocks: Option<String>,
        /// Comma-separated codeword files, one per initial code
        #[arg(long)]
        inputs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Length, dimension and distances of a code
    Info {
        /// Generator matrix file
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value_t = 24)]
        k_limit: usize,
    },
}

/// Failure classes, mapped onto exit codes 1 and 2.
enum Failure {
    Semantic(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::NotAConversion
                | Error::NotACodeword { .. }
                | Error::SizeGuard { .. }
                | Error::TimeBudget { .. },
            ) => Failure::Semantic(e),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rm {
            r,
            m,
            transformed,
            out,
        } => cmd_rm(r, m, transformed, out.as_deref()),
        Command::Merge {
            r,
            m,
            emit_y,
            format,
        } => cmd_merge(r, m, emit_y.as_deref(), format),
        Command::Verify { gi, blocks, gf, y } => cmd_verify(&gi, blocks.as_deref(), &gf, &y),
        Command::Report { m_range, format } => cmd_report(&m_range, format),
        Command::Bounds {
            params,
            lambda,
            n_i,
            k_i,
            n_f,
            k_f,
            d_f,
            d_f_dual,
            format,
        } => {
            let p = match params {
                Some(path) => read_params(&path),
                None => params_from_flags(lambda, n_i, k_i, n_f, k_f, d_f, d_f_dual),
            };
            p.map_err(Failure::from)
                .and_then(|p| cmd_bounds(&p, format))
        }
        Command::Oracle {
            gi,
            blocks,
            gf,
            max_kf,
            time_budget,
            emit_y,
            format,
        } => cmd_oracle(
            &gi,
            &blocks,
            &gf,
            max_kf,
            time_budget,
            emit_y.as_deref(),
            format,
        ),
        Command::Apply {
            y,
            blocks,
            inputs,
            out,
        } => cmd_apply(&y, blocks.as_deref(), &inputs, out.as_deref()),
        Command::Info { g, k_limit } => cmd_info(&g, k_limit),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_matrix_file(path: &Path) -> anyhow::Result<rmconv::text::MatrixFile> {
    parse_matrix_file(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: serde::Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Splits a block-diagonal generator into one code per column block.
fn split_initial(gi: &BitMatrix, blocks: &[usize]) -> anyhow::Result<Vec<LinearCode>> {
    let total: usize = blocks.iter().sum();
    if blocks.is_empty() || blocks.contains(&0) {
        bail!("blocks must be a non-empty list of positive lengths");
    }
    if total != gi.cols() {
        bail!(
            "blocks sum to {total} but the initial generator has {} columns",
            gi.cols()
        );
    }
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for i in 0..gi.rows() {
        let support = gi.row(i).support();
        let Some(&first) = support.first() else {
            bail!("row {} of the initial generator is zero", i + 1);
        };
        let mut start = 0;
        let block = blocks
            .iter()
            .position(|&n| {
                start += n;
                first < start
            })
            .expect("first < total");
        let lo = start - blocks[block];
        if support.iter().any(|&s| s < lo || s >= start) {
            bail!(
                "row {} of the initial generator is not block diagonal",
                i + 1
            );
        }
        rows_of[block].push(i);
    }
    let mut start = 0;
    let mut codes = Vec::new();
    for (b, rows) in rows_of.iter().enumerate() {
        let cols: Vec<usize> = (start..start + blocks[b]).collect();
        start += blocks[b];
        if rows.is_empty() {
            bail!("initial code {} has no generator rows", b + 1);
        }
        let g = gi.select_rows(rows).select_columns(&cols);
        codes.push(
            LinearCode::from_generator(g).with_context(|| format!("initial code {}", b + 1))?,
        );
    }
    Ok(codes)
}

fn load_instance(gi: &Path, blocks: &[usize], gf: &Path) -> anyhow::Result<ConvertibleInstance> {
    let gi = read_matrix_file(gi)?.matrix;
    let gf = read_matrix_file(gf)?.matrix;
    let initial = split_initial(&gi, blocks)?;
    let final_code = LinearCode::from_generator(gf).context("final code")?;
    Ok(ConvertibleInstance::new(initial, final_code)?)
}

fn cmd_rm(r: usize, m: usize, transformed: bool, out: Option<&Path>) -> CmdResult {
    if r > m {
        return Err(Failure::Usage(anyhow!("need r <= m, got r={r}, m={m}")));
    }
    let text = if transformed {
        let (g, blocks) = rm_transformed_generator(r, m)?;
        let [a, b, c] = blocks.sizes;
        format!("{}#blocks {a} {b} {c}\n", format_matrix(&g))
    } else {
        format_matrix(&rm_generator(r, m)?)
    };
    Ok(write_or_print(out, &text)?)
}

fn cmd_merge(r: usize, m: usize, emit_y: Option<&Path>, format: Format) -> CmdResult {
    let c = rm_merge_procedure(r, m)?;
    let rec = merge_report(r, m, REPORT_K_LIMIT)?;
    if let Some(path) = emit_y {
        let text = format_matrix_with_blocks(&c.conversion.y, &c.conversion.blocks);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Text => print!("{}", rec.render_text()),
        Format::Json => print!("{}", to_json(&rec)?),
    }
    if !rec.violations().is_empty() {
        return Err(Failure::Semantic(anyhow!("construction violates a bound")));
    }
    Ok(())
}

fn cmd_verify(gi: &Path, blocks: Option<&str>, gf: &Path, y: &Path) -> CmdResult {
    let yfile = read_matrix_file(y)?;
    let blocks = match blocks {
        Some(b) => parse_list(b)?,
        None => yfile
            .blocks()?
            .ok_or_else(|| anyhow!("no --blocks given and {} has no #blocks line", y.display()))?,
    };
    let inst = load_instance(gi, &blocks, gf)?;
    let conv = ConversionMatrix::new(yfile.matrix, blocks)?;
    if !verify_conversion(&inst, &conv)? {
        println!("valid=false");
        return Err(Failure::Semantic(anyhow!(
            "Y is not a conversion matrix for this instance"
        )));
    }
    let report = classify_symbols(&inst, &conv)?;
    println!("valid=true");
    println!("{report}");
    Ok(())
}

/// `a-b` (inclusive, empty when `a > b`) or a comma-separated list.
fn parse_m_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once('-') {
        let a: usize = a
            .trim()
            .parse()
            .with_context(|| format!("bad range start in {s:?}"))?;
        let b: usize = b
            .trim()
            .parse()
            .with_context(|| format!("bad range end in {s:?}"))?;
        return Ok((a..=b).collect());
    }
    Ok(parse_list(s)?)
}

fn cmd_report(m_range: &str, format: Format) -> CmdResult {
    let ms = parse_m_range(m_range)?;
    let (rows, warnings) = comparison_rows(ms)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match format {
        Format::Text => {
            for (t, rec) in rows.iter().enumerate() {
                if t > 0 {
                    println!();
                }
                print!("{}", rec.render_text());
            }
        }
        Format::Json => print!("{}", to_json(&rows)?),
    }
    if rows.iter().any(|r| !r.violations().is_empty()) {
        return Err(Failure::Semantic(anyhow!(
            "a construction violates a bound"
        )));
    }
    Ok(())
}

fn params_from_flags(
    lambda: Option<usize>,
    n_i: Option<String>,
    k_i: Option<String>,
    n_f: Option<usize>,
    k_f: Option<usize>,
    d_f: Option<usize>,
    d_f_dual: Option<usize>,
) -> anyhow::Result<ParamSet> {
    let need = |name: &str| anyhow!("missing --{name}");
    let n_i = parse_list(&n_i.ok_or_else(|| need("nI"))?)?;
    let k_i = parse_list(&k_i.ok_or_else(|| need("kI"))?)?;
    build_params(
        lambda,
        n_i,
        k_i,
        n_f.ok_or_else(|| need("nF"))?,
        k_f.ok_or_else(|| need("kF"))?,
        d_f.ok_or_else(|| need("dF"))?,
        d_f_dual.ok_or_else(|| need("dFdual"))?,
    )
}

fn build_params(
    lambda: Option<usize>,
    n_i: Vec<usize>,
    k_i: Vec<usize>,
    n_f: usize,
    k_f: usize,
    d_f: usize,
    d_f_dual: usize,
) -> anyhow::Result<ParamSet> {
    if let Some(l) = lambda {
        if l != n_i.len() {
            bail!("lambda={l} but {} initial lengths given", n_i.len());
        }
    }
    Ok(ParamSet::new(n_i, k_i, n_f, k_f, d_f, d_f_dual)?)
}

fn read_params(path: &Path) -> anyhow::Result<ParamSet> {
    let text = read_text(path)?;
    let mut lambda = None;
    let (mut n_i, mut k_i) = (None, None);
    let (mut n_f, mut k_f, mut d_f, mut d_f_dual) = (None, None, None, None);
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value", ln + 1))?;
        let value = value.trim();
        let num = || -> anyhow::Result<usize> {
            value
                .parse()
                .with_context(|| format!("line {}: bad number {value:?}", ln + 1))
        };
        match key.trim() {
            "lambda" => lambda = Some(num()?),
            "nI" => n_i = Some(parse_list(value)?),
            "kI" => k_i = Some(parse_list(value)?),
            "nF" => n_f = Some(num()?),
            "kF" => k_f = Some(num()?),
            "dF" => d_f = Some(num()?),
            "dFdual" => d_f_dual = Some(num()?),
            other => bail!("line {}: unknown key {other:?}", ln + 1),
        }
    }
    let need = |name: &str| anyhow!("{}: missing {name}", path.display());
    build_params(
        lambda,
        n_i.ok_or_else(|| need("nI"))?,
        k_i.ok_or_else(|| need("kI"))?,
        n_f.ok_or_else(|| need("nF"))?,
        k_f.ok_or_else(|| need("kF"))?,
        d_f.ok_or_else(|| need("dF"))?,
        d_f_dual.ok_or_else(|| need("dFdual"))?,
    )
}

#[derive(serde::Serialize)]
struct BoundTable<'a> {
    params: &'a ParamSet,
    bounds: &'a [BoundRecord],
}

fn cmd_bounds(p: &ParamSet, format: Format) -> CmdResult {
    let table = bound_table(p)?;
    match format {
        Format::Json => print!(
            "{}",
            to_json(&BoundTable {
                params: p,
                bounds: &table.records
            })?
        ),
        Format::Text => {
            println!(
                "lambda={} nI={:?} kI={:?} nF={} kF={} dF={} dFdual={}",
                p.lambda, p.n_i, p.k_i, p.n_f, p.k_f, p.d_f, p.d_f_dual
            );
            println!(
                "{:<28} {:>2} {:<6} {:<6} {:>6}  applicable",
                "bound", "i", "kind", "scope", "value"
            );
            for b in &table.records {
                println!(
                    "{:<28} {:>2} {:<6} {:<6} {:>6}  {}",
                    b.name,
                    b.i.map_or("-".to_string(), |i| i.to_string()),
                    format!("{:?}", b.kind).to_lowercase(),
                    format!("{:?}", b.scope).to_lowercase(),
                    b.value.map_or("-".to_string(), |v| v.to_string()),
                    if b.applicable { "yes" } else { "no" }
                );
            }
        }
    }
    Ok(())
}

fn cmd_oracle(
    gi: &Path,
    blocks: &str,
    gf: &Path,
    max_kf: Option<usize>,
    time_budget: Option<f64>,
    emit_y: Option<&Path>,
    format: Format,
) -> CmdResult {
    let blocks = parse_list(blocks)?;
    let inst = load_instance(gi, &blocks, gf)?;
    let mut lim = SearchLimits::default();
    if let Some(k) = max_kf {
        lim.max_k_f = k;
    }
    if let Some(t) = time_budget {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::Usage(anyhow!(
                "--time-budget must be a positive number of seconds"
            )));
        }
        lim.time_budget = Some(Duration::from_secs_f64(t));
    }
    let (y, report) = min_access_cost(&inst, &lim)?;
    if let Some(path) = emit_y {
        fs::write(path, format_matrix_with_blocks(&y.y, &y.blocks))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Text => {
            if let Some(n) = search_space_size(&inst) {
                println!("candidates={n}");
            }
            println!("optimum_access_cost={}", report.access_cost());
            println!("{report}");
        }
        Format::Json => {
            let rec = ReportRecord::for_instance(&inst, report.summary(), REPORT_K_LIMIT)?;
            print!("{}", to_json(&rec)?);
        }
    }
    Ok(())
}

fn cmd_apply(y: &Path, blocks: Option<&str>, inputs: &str, out: Option<&Path>) -> CmdResult {
    let yfile = read_matrix_file(y)?;
    let blocks = match blocks {
        Some(b) => parse_list(b)?,
        None => yfile
            .blocks()?
            .ok_or_else(|| anyhow!("no --blocks given and {} has no #blocks line", y.display()))?,
    };
    let conv = ConversionMatrix::new(yfile.matrix, blocks.clone())?;
    let paths: Vec<&str> = inputs
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if paths.len() != blocks.len() {
        return Err(Failure::Usage(anyhow!(
            "{} input files for {} blocks",
            paths.len(),
            blocks.len()
        )));
    }
    let mut words = Vec::new();
    for (p, &n) in paths.iter().zip(&blocks) {
        let v = parse_vector(&read_text(Path::new(p))?).with_context(|| format!("parsing {p}"))?;
        if v.len() != n {
            return Err(Failure::Usage(anyhow!(
                "{p} has length {}, block length is {n}",
                v.len()
            )));
        }
        words.push(v);
    }
    let result = apply_matrix(&conv.y, &words)?;
    Ok(write_or_print(out, &format_vector(&result))?)
}

fn cmd_info(g: &Path, k_limit: usize) -> CmdResult {
    let code = LinearCode::from_generator(read_matrix_file(g)?.matrix)?;
    let show = |d: Result<Option<usize>, Error>| match d {
        Ok(Some(d)) => d.to_string(),
        Ok(None) => "none".to_string(),
        Err(_) => "unknown".to_string(),
    };
    let d = show(code.min_distance(k_limit).map(Some));
    let d_dual = show(code.dual_distance(k_limit));
    println!("n={} k={} d={d} d_dual={d_dual}", code.n(), code.k());
    Ok(())
}
