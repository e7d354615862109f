//! Plumbing for the `projrate` binary: resolved run configurations, grid and
//! moment-string parsing, and the JSON/CSV writers.
//!
//! Every run writes its full configuration into the output header, so any
//! output file can be fed back through `--config` to regenerate the run.
//! Values given as command-line flags always win over values from a config
//! file; the file only fills in what the command line left unset.
//!
//! Exit codes: 0 on success, 2 for configuration errors (bad flags, bad
//! grids, malformed config files, IO failures), 3 for domain violations
//! (query points where the requested quantity has no finite value, refused
//! tilts, numerical non-convergence).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use projrate_core::Error as CoreError;

/// Environment variable naming the directory that relative `--output` paths
/// are resolved against.
pub const OUT_DIR_ENV: &str = "PROJRATE_OUT_DIR";

/// Failure modes of a run, each carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, grids, config files, or IO: exit 2.
    Config(String),
    /// The requested quantity has no finite value at the query point: exit 3.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DomainViolation { .. }
            | CoreError::TiltRefused { .. }
            | CoreError::Numerical(_) => CliError::Domain(e.to_string()),
            CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::UnsupportedDegree { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One JSON object per line; the first line is the config header.
    Json,
    /// Header row after a `# config:` comment line.
    Csv,
}

/// The full resolved configuration of one run. Optional fields are unused by
/// some subcommands; the header serializer skips unset ones.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub what: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    /// Fill unset fields from `fallback` (command line wins over file).
    pub fn or(mut self, fallback: &RunConfig) -> RunConfig {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = fallback.$f.clone(); } )* };
        }
        fill!(
            p, n, k, gamma, r, r_grid, s_grid, statistic, w, what, moment, d, n_list,
            count, samples, method, target, scale, c, directions, alpha, beta, col, u,
            trials, seed, frame_seed, threads, output, format
        );
        self
    }

    /// Parse a config source: a TOML file mirroring the flags, or a previous
    /// JSON/CSV output whose header embeds the config block.
    pub fn from_file(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_source_text(&text)
    }

    /// Recognize any of the three config carriers by shape.
    pub fn from_source_text(text: &str) -> CliResult<RunConfig> {
        let first = text.lines().next().unwrap_or("").trim();
        if let Some(json) = first.strip_prefix("# config:") {
            return serde_json::from_str::<Header>(json.trim())
                .map(|h| h.config)
                .map_err(|e| CliError::Config(format!("bad embedded config: {e}")));
        }
        if first.starts_with('{') {
            return serde_json::from_str::<Header>(first)
                .map(|h| h.config)
                .map_err(|e| CliError::Config(format!("bad embedded config: {e}")));
        }
        toml::from_str::<RunConfig>(text)
            .map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }
}

/// The header object written as the first line of every output.
#[derive(Debug, Serialize, Deserialize)]
struct Header {
    config: RunConfig,
}

/// One output cell. Floats are rendered at 17 significant digits so parsing
/// the text recovers the exact bit pattern.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    U(u64),
    I(usize),
    B(bool),
    S(String),
}

pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => fmt17(*x),
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::F(x) if x.is_finite() => serde_json::json!(x),
            // JSON has no literal for infinities; keep them textual.
            Cell::F(x) => serde_json::json!(x.to_string()),
            Cell::U(v) => serde_json::json!(v),
            Cell::I(v) => serde_json::json!(v),
            Cell::B(b) => serde_json::json!(b),
            Cell::S(s) => serde_json::json!(s),
        }
    }
}

/// An ordered row of named cells; every row of a run shares one schema.
pub type Row = Vec<(&'static str, Cell)>;

/// Render the whole run: config header first, then the rows, in the chosen
/// format, to `--output` (resolved against [`OUT_DIR_ENV`] when relative) or
/// stdout.
pub fn emit(config: &RunConfig, rows: &[Row]) -> CliResult<()> {
    let format = config.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json => render_json(config, rows)?,
        Format::Csv => render_csv(config, rows)?,
    };
    match &config.output {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let path = resolve_output(Path::new(path));
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(&path, text)?;
            Ok(())
        }
    }
}

fn resolve_output(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

fn render_json(config: &RunConfig, rows: &[Row]) -> CliResult<String> {
    let mut out = String::new();
    let header = serde_json::to_string(&Header { config: config.clone() })
        .map_err(|e| CliError::Config(format!("serialize config: {e}")))?;
    out.push_str(&header);
    out.push('\n');
    for row in rows {
        let mut line = String::from("{");
        for (i, (key, cell)) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{}:{}", serde_json::json!(key), cell.json());
        }
        line.push('}');
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn render_csv(config: &RunConfig, rows: &[Row]) -> CliResult<String> {
    let header = serde_json::to_string(&Header { config: config.clone() })
        .map_err(|e| CliError::Config(format!("serialize config: {e}")))?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        wtr.write_record(first.iter().map(|(k, _)| *k))
            .map_err(|e| CliError::Config(format!("csv: {e}")))?;
        for row in rows {
            wtr.write_record(row.iter().map(|(_, c)| c.csv()))
                .map_err(|e| CliError::Config(format!("csv: {e}")))?;
        }
    }
    let body = String::from_utf8(
        wtr.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?,
    )
    .expect("csv output is utf8");
    Ok(format!("# config: {header}\n{body}"))
}

/// Parse a grid spec: `start:stop:step` (inclusive of both ends up to
/// rounding), a comma list, or a single number.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "grid '{spec}' must have the form start:stop:step"
            )));
        }
        let start = parse_f64(parts[0])?;
        let stop = parse_f64(parts[1])?;
        let step = parse_f64(parts[2])?;
        if step <= 0.0 || stop < start {
            return Err(CliError::Config(format!(
                "grid '{spec}' needs step > 0 and stop >= start"
            )));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    spec.split(',').map(parse_f64).collect()
}

/// Parse a comma-separated list of sizes.
pub fn parse_usize_list(spec: &str) -> CliResult<Vec<usize>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad integer '{}'", t.trim())))
        })
        .collect()
}

fn parse_f64(t: &str) -> CliResult<f64> {
    t.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("bad number '{}'", t.trim())))
}

/// Parse a comma-separated vector.
pub fn parse_f64_list(spec: &str) -> CliResult<Vec<f64>> {
    spec.split(',').map(parse_f64).collect()
}

/// A moment query: the product of matrix entries it denotes, as parallel
/// 0-based row and column index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentQuery {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Parse a product of entry powers such as `a11^4` or `a11^2*a2_2^2`.
///
/// Each factor is `a` followed by the 1-based row and column index: two
/// single digits juxtaposed (`a23` is row 2, column 3) or two numbers
/// separated by `_` for indices past 9 (`a10_3`). An optional `^e` raises
/// the factor to the e-th power. Factors are joined with `*` or whitespace.
pub fn parse_moment(spec: &str) -> CliResult<MomentQuery> {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let bad = |msg: String| CliError::Config(format!("moment '{spec}': {msg}"));
    for token in spec.split(['*', ' ']).filter(|t| !t.is_empty()) {
        let body = token
            .strip_prefix('a')
            .ok_or_else(|| bad(format!("factor '{token}' must start with 'a'")))?;
        let (idx, exp) = match body.split_once('^') {
            Some((idx, e)) => {
                let e: usize = e
                    .parse()
                    .map_err(|_| bad(format!("bad exponent in '{token}'")))?;
                (idx, e)
            }
            None => (body, 1),
        };
        let (i, j) = if let Some((a, b)) = idx.split_once('_') {
            let i: usize = a.parse().map_err(|_| bad(format!("bad row in '{token}'")))?;
            let j: usize = b.parse().map_err(|_| bad(format!("bad column in '{token}'")))?;
            (i, j)
        } else {
            let ch: Vec<char> = idx.chars().collect();
            if ch.len() != 2 || !ch[0].is_ascii_digit() || !ch[1].is_ascii_digit() {
                return Err(bad(format!(
                    "index '{idx}' must be two digits or row_column"
                )));
            }
            (ch[0] as usize - '0' as usize, ch[1] as usize - '0' as usize)
        };
        if i == 0 || j == 0 {
            return Err(bad("indices are 1-based".into()));
        }
        if exp == 0 {
            continue;
        }
        for _ in 0..exp {
            rows.push(i - 1);
            cols.push(j - 1);
        }
    }
    if rows.is_empty() {
        return Err(bad("no factors".into()));
    }
    Ok(MomentQuery { rows, cols })
}

/// Render a pair partition as cycles of paired 1-based points, `(1 2)(3 4)`.
pub fn partition_label(pp: &projrate_core::weingarten::PairPartition) -> String {
    let mut s = String::new();
    for &(a, b) in pp.pairs() {
        let _ = write!(s, "({a} {b})");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse_inclusively() {
        let g = parse_grid("0:0.9:0.1").unwrap();
        assert_eq!(g.len(), 10);
        assert!((g[5] - 0.5).abs() < 1e-12);
        assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
        assert_eq!(parse_grid("0.1,0.7").unwrap(), vec![0.1, 0.7]);
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn moment_strings_parse() {
        let q = parse_moment("a11^4").unwrap();
        assert_eq!(q.rows, vec![0, 0, 0, 0]);
        assert_eq!(q.cols, vec![0, 0, 0, 0]);
        let q = parse_moment("a12^2*a2_2").unwrap();
        assert_eq!(q.rows, vec![0, 0, 1]);
        assert_eq!(q.cols, vec![1, 1, 1]);
        assert!(parse_moment("b11").is_err());
        assert!(parse_moment("a1").is_err());
        assert!(parse_moment("a0_1").is_err());
    }

    #[test]
    fn config_round_trips_through_header_lines() {
        let cfg = RunConfig {
            subcommand: "tail".into(),
            p: Some(2.0),
            n: Some(200),
            k: Some(14),
            r: Some(0.3),
            samples: Some(1000),
            method: Some("tilted".into()),
            seed: Some(7),
            frame_seed: Some(11),
            threads: Some(1),
            format: Some(Format::Json),
            ..RunConfig::default()
        };
        let json = render_json(&cfg, &[]).unwrap();
        let back = RunConfig::from_source_text(&json).unwrap();
        assert_eq!(back, cfg);
        let csv = render_csv(&cfg, &[vec![("x", Cell::F(1.0))]]).unwrap();
        let back = RunConfig::from_source_text(&csv).unwrap();
        assert_eq!(back, cfg);
        let toml_text = "subcommand = \"tail\"\np = 2.0\nseed = 7\n";
        let back = RunConfig::from_source_text(toml_text).unwrap();
        assert_eq!(back.p, Some(2.0));
        assert_eq!(back.seed, Some(7));
    }

    #[test]
    fn float_cells_round_trip_exactly() {
        for &x in &[0.1f64, 0.143841036225890456, 3.078150430484421e-14, 1.0 / 3.0] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn command_line_wins_over_config_file() {
        let cli = RunConfig { subcommand: "tail".into(), seed: Some(9), ..RunConfig::default() };
        let file = RunConfig {
            subcommand: "tail".into(),
            seed: Some(1),
            samples: Some(500),
            ..RunConfig::default()
        };
        let merged = cli.or(&file);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.samples, Some(500));
    }
}
