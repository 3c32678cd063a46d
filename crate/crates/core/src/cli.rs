//! Command-line runner: convergence tables and pointwise dumps as CSV.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use crate::analysis::{convergence_study, superconvergence_points, ConvergenceStudy, Norm};
use crate::assembly_solve::solve_on;
use crate::coefficients::{ManufacturedSolution, PiecewiseConstantCoefficient, ProblemSpec};
use crate::error::IfeError;
use crate::mesh_space::FeSpace;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for I/O failures.
pub const EXIT_IO: i32 = 1;
/// Exit status for malformed arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

/// Convergence study of the cosine manufactured solution on (0, 1).
#[derive(Debug, Clone, Parser)]
#[command(name = "ife1d", version, about, allow_negative_numbers = true)]
pub struct RunConfig {
    /// Polynomial degree p.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Coefficient values, left to right.
    #[arg(long, value_delimiter = ',', default_value = "1,5")]
    pub beta: Vec<f64>,

    /// Interface positions; accepts expressions such as `pi/6+0.06`.
    #[arg(long, value_delimiter = ',', value_parser = parse_expression, default_value = "pi/6")]
    pub alpha: Vec<f64>,

    /// Convection coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,

    /// Reaction coefficient.
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,

    /// Element counts; defaults depend on the degree.
    #[arg(long, value_delimiter = ',')]
    pub meshes: Option<Vec<usize>>,

    /// Convergence table path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Pointwise error dump on the coarsest mesh.
    #[arg(long)]
    pub dump_pointwise: Option<PathBuf>,

    /// Shape function samples of the first interface element of the
    /// coarsest mesh.
    #[arg(long)]
    pub dump_basis: Option<PathBuf>,
}

/// Failure of a run, mapped onto an exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] IfeError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}

/// Default mesh sequence for degree `p`: doubling from 8 to 512 for `p = 1`,
/// steps of 8 up to 56 for `p = 2`, steps of 2 up to 20 otherwise.
pub fn default_meshes(p: usize) -> Vec<usize> {
    match p {
        1 => (3..=9).map(|k| 1 << k).collect(),
        2 => (1..=7).map(|k| 8 * k).collect(),
        _ => (4..=10).map(|k| 2 * k).collect(),
    }
}

/// Evaluates `+ - * /` expressions over numbers, `pi` and parentheses.
pub fn parse_expression(text: &str) -> Result<f64, String> {
    let mut parser = ExprParser {
        chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let value = parser.sum()?;
    if parser.pos != parser.chars.len() {
        return Err(format!("unexpected `{}` in `{text}`", parser.chars[parser.pos]));
    }
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(value)
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut acc = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                match word.to_ascii_lowercase().as_str() {
                    "pi" => Ok(std::f64::consts::PI),
                    _ => Err(format!("unknown name `{word}`")),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_digit() || c == '.')
                {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some('e' | 'E')) {
                    let save = self.pos;
                    self.pos += 1;
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.pos += 1;
                    }
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = save;
                    }
                }
                let token: String = self.chars[start..self.pos].iter().collect();
                token.parse().map_err(|_| format!("bad number `{token}`"))
            }
            Some(c) => Err(format!("unexpected `{c}`")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

fn build_problem(config: &RunConfig) -> Result<ProblemSpec, CliError> {
    if config.degree == 0 {
        return Err(CliError::Usage("--degree must be at least 1".into()));
    }
    if config.beta.len() != config.alpha.len() + 1 {
        return Err(CliError::Usage(format!(
            "{} coefficient values need {} interfaces, got {}",
            config.beta.len(),
            config.beta.len().saturating_sub(1),
            config.alpha.len()
        )));
    }
    let beta = PiecewiseConstantCoefficient::new((0.0, 1.0), config.alpha.clone(), config.beta.clone())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let exact = ManufacturedSolution::cosine(beta);
    Ok(ProblemSpec::manufactured(exact, config.gamma, config.c))
}

fn mesh_sizes(config: &RunConfig) -> Result<Vec<usize>, CliError> {
    let meshes = config
        .meshes
        .clone()
        .unwrap_or_else(|| default_meshes(config.degree));
    if meshes.is_empty() || meshes.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("--meshes needs element counts of at least 2".into()));
    }
    Ok(meshes)
}

fn format_rate(rate: Option<f64>) -> String {
    rate.map_or_else(|| "nan".to_string(), |r| format!("{r:.4}"))
}

/// Writes the convergence table: one row per mesh and a final `rate` row.
pub fn write_convergence_csv<W: Write>(study: &ConvergenceStudy, out: W) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["inv_h".to_string()];
    header.extend(Norm::ALL.iter().map(|n| n.name().to_string()));
    writer.write_record(&header)?;
    for (n, report) in study.mesh_sizes.iter().zip(&study.reports) {
        let mut row = vec![n.to_string()];
        for norm in Norm::ALL {
            row.push(if norm == Norm::Lobatto && study.degree == 1 {
                "nan".to_string()
            } else {
                format!("{:.6e}", report.get(norm))
            });
        }
        writer.write_record(&row)?;
    }
    let mut rates = vec!["rate".to_string()];
    rates.extend(Norm::ALL.iter().map(|&n| format_rate(study.rate(n))));
    writer.write_record(&rates)?;
    writer.flush()?;
    Ok(())
}

/// Samples per coefficient piece of every element in the pointwise dump.
pub const DUMP_SAMPLES: usize = 50;

/// Writes `x, u_err, flux_err, is_special_point` on the mesh of `n`
/// elements. Special points are mesh nodes, Lobatto points and Gauss points.
pub fn write_pointwise_csv<W: Write>(problem: &ProblemSpec, p: usize, n: usize, out: W) -> Result<(), CliError> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| CliError::Usage("pointwise dump needs an exact solution".into()))?;
    let space = Arc::new(FeSpace::uniform(n, p, &problem.beta)?);
    let uh = solve_on(space.clone(), problem)?;
    let points = superconvergence_points(&space)?;

    // (x, element, piece, xi, special)
    let mut rows: Vec<(f64, usize, usize, f64, bool)> = Vec::new();
    for e in 0..space.mesh().element_count() {
        let weight = space.weight(e);
        for piece in 0..weight.piece_count() {
            let (lo, hi) = weight.piece_bounds(piece);
            for k in 0..DUMP_SAMPLES {
                let xi = lo + (hi - lo) * k as f64 / (DUMP_SAMPLES - 1) as f64;
                rows.push((space.mesh().from_reference(e, xi), e, piece, xi, false));
            }
        }
        let mut special = |xi: f64, piece: usize| {
            rows.push((space.mesh().from_reference(e, xi), e, piece, xi, true));
        };
        special(-1.0, 0);
        for pt in points.lobatto[e].iter().chain(&points.gauss[e]) {
            special(pt.xi, weight.piece_index_side(pt.xi, crate::Side::Left));
        }
        if e + 1 == space.mesh().element_count() {
            special(1.0, weight.piece_count() - 1);
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.4.cmp(&b.4)));

    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["x", "u_err", "flux_err", "is_special_point"])?;
    for (x, e, piece, xi, special) in rows {
        let side = if piece > space.weight(e).piece_index_side(xi, crate::Side::Left) {
            crate::Side::Right
        } else {
            crate::Side::Left
        };
        let u_err = uh.value_in_piece(e, piece, xi) - exact.value_side(x, side);
        let flux_err = uh.flux_in_piece(e, piece, xi) - exact.flux_side(x, side);
        writer.write_record([
            format!("{x:.16e}"),
            format!("{u_err:.6e}"),
            format!("{flux_err:.6e}"),
            u8::from(special).to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the generalized shape functions of the first interface element
/// of the mesh with `n` elements.
pub fn write_basis_csv<W: Write>(problem: &ProblemSpec, p: usize, n: usize, out: W) -> Result<(), CliError> {
    let space = FeSpace::uniform(n, p, &problem.beta)?;
    let e = space
        .mesh()
        .interface_elements()
        .next()
        .ok_or_else(|| CliError::Usage(format!("the mesh with {n} elements has no interface element")))?;
    let basis = space
        .basis(e)
        .generalized()
        .expect("interface elements carry generalized bases");
    basis.write_samples_csv(out, DUMP_SAMPLES)?;
    Ok(())
}

fn create(path: &PathBuf) -> Result<io::BufWriter<File>, CliError> {
    Ok(io::BufWriter::new(File::create(path)?))
}

/// Executes a parsed configuration.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let problem = build_problem(config)?;
    let meshes = mesh_sizes(config)?;
    let p = config.degree;
    let coarsest = *meshes.iter().min().expect("mesh list is nonempty");
    let study = convergence_study(&problem, p, &meshes)?;
    match &config.out {
        Some(path) => write_convergence_csv(&study, create(path)?)?,
        None => write_convergence_csv(&study, io::stdout().lock())?,
    }
    if let Some(path) = &config.dump_pointwise {
        write_pointwise_csv(&problem, p, coarsest, create(path)?)?;
    }
    if let Some(path) = &config.dump_basis {
        write_basis_csv(&problem, p, coarsest, create(path)?)?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs, reports errors on stderr and
/// returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match run(&config) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("ife1d: {err}");
            err.exit_code()
        }
    }
}
