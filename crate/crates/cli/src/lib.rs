//! Command-line front end. Every command prints `key=value` lines with
//! exact rationals.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use benders_cuts::benders::{solve, BendersError, CorePointMode, IterationOutcome, SolveStatus, SolverConfig};
use benders_cuts::cglp::{build_alt_polyhedron, ObjectiveSpec};
use benders_cuts::io::{classification_name, parse_instance, serialize_trace, status_name, IoError};
use benders_cuts::lp::{LinearProgram, Relation};
use benders_cuts::rational::{fmt_rational, parse_rational, Rational};
use benders_cuts::separation::{separate, Certificate, Cut, SeparationError, SeparationResult};
use benders_cuts::verify::{enumerate_vertices, face_report, is_mis_certificate, pareto_verdict, ParetoVerdict};
use benders_cuts::{EpiPoint, Instance};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_ITERATION_LIMIT: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "benders-cuts", version, about = "Exact Benders cut generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the cutting-plane loop to optimality.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long = "max-iter", default_value_t = 100)]
        max_iter: usize,
        /// Classify every generated cut by the dimension of its face.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Separate one point from the epigraph.
    Separate {
        file: PathBuf,
        /// x_1 .. x_n followed by eta.
        #[arg(long, num_args = 1.., required = true, value_parser = rational)]
        point: Vec<Rational>,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Face, MIS and Pareto verdicts for a cut `pi·x + pi0·eta <= alpha`.
    Verify {
        file: PathBuf,
        /// pi_1 .. pi_n, pi0, alpha.
        #[arg(long, num_args = 1.., required = true, value_parser = rational)]
        cut: Vec<Rational>,
        /// Point the cut separates; needed for the MIS verdict.
        #[arg(long, num_args = 1.., value_parser = rational)]
        point: Option<Vec<Rational>>,
    },
    /// Vertices of the alternative polyhedron and its relaxation at a point.
    Enumerate {
        file: PathBuf,
        #[arg(long, num_args = 1.., required = true, value_parser = rational)]
        point: Vec<Rational>,
    },
    /// Solve every `*.json` instance in a directory with each strategy.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "mis,core")]
        strategies: Vec<BenchStrategy>,
        #[arg(long = "max-iter", default_value_t = 100)]
        max_iter: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    Mis,
    Directional,
    Custom,
}

#[derive(Args, Debug)]
struct StrategyArgs {
    #[arg(long, value_enum, default_value = "mis")]
    strategy: StrategyKind,
    #[arg(long, num_args = 1.., value_parser = rational)]
    omega: Option<Vec<Rational>>,
    #[arg(long, value_parser = rational)]
    omega0: Option<Rational>,
    /// Weights on the m rows followed by the weight on the eta row.
    #[arg(long = "omega-tilde", num_args = 1.., value_parser = rational)]
    omega_tilde: Option<Vec<Rational>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BenchStrategy {
    /// Unit weights.
    Mis,
    /// Straight up in eta: omega = 0, omega0 = 1.
    Vertical,
    /// Directional toward a core point that follows the incumbent.
    Core,
}

/// Stand-in for a leading `-` on numeric tokens, so `-1/2` is not taken
/// for a flag.
const MINUS: char = '\u{2212}';

fn rational(s: &str) -> Result<Rational, String> {
    let s = s.strip_prefix(MINUS).map_or_else(|| s.to_string(), |rest| format!("-{rest}"));
    parse_rational(&s).map_err(|e| e.to_string())
}

fn shield_negatives(arg: OsString) -> OsString {
    match arg.to_str() {
        Some(s) if s.len() > 1 && s.starts_with('-') && s.as_bytes()[1].is_ascii_digit() => {
            format!("{MINUS}{}", &s[1..]).into()
        }
        _ => arg,
    }
}

/// Failure with its exit code and message.
struct Failure(i32, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

impl From<SeparationError> for Failure {
    fn from(e: SeparationError) -> Self {
        match e {
            SeparationError::StrategyUnbounded | SeparationError::Unbounded => Failure(EXIT_UNBOUNDED, e.to_string()),
            _ => Failure(EXIT_INPUT, e.to_string()),
        }
    }
}

impl From<BendersError> for Failure {
    fn from(e: BendersError) -> Self {
        match e {
            BendersError::Separation(s) => s.into(),
            _ => Failure(EXIT_INPUT, e.to_string()),
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = args.into_iter().map(|a| shield_negatives(a.into()));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let mut out = String::new();
    let code = match execute(cli.command, &mut out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    };
    print!("{out}");
    code
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn join(v: &[Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(" ")
}

fn strategy(inst: &Instance, a: &StrategyArgs) -> Result<ObjectiveSpec, Failure> {
    match a.strategy {
        StrategyKind::Mis => Ok(ObjectiveSpec::MisOnes),
        StrategyKind::Directional => {
            let omega = a.omega.clone().ok_or_else(|| input("--strategy directional needs --omega"))?;
            let omega0 = a.omega0.clone().ok_or_else(|| input("--strategy directional needs --omega0"))?;
            if omega.len() != inst.n() {
                return Err(input(format!("--omega needs {} values, got {}", inst.n(), omega.len())));
            }
            Ok(ObjectiveSpec::Directional { omega, omega0 })
        }
        StrategyKind::Custom => {
            let mut w = a.omega_tilde.clone().ok_or_else(|| input("--strategy custom needs --omega-tilde"))?;
            if w.len() != inst.m() + 1 {
                return Err(input(format!("--omega-tilde needs {} values, got {}", inst.m() + 1, w.len())));
            }
            let w0 = w.pop().expect("length checked");
            Ok(ObjectiveSpec::Custom { omega_tilde: w, omega_tilde0: w0 })
        }
    }
}

fn epi_point(inst: &Instance, coords: Vec<Rational>, flag: &str) -> Result<EpiPoint, Failure> {
    if coords.len() != inst.n() + 1 {
        return Err(input(format!("{flag} needs {} values, got {}", inst.n() + 1, coords.len())));
    }
    Ok(EpiPoint::from_coords(coords))
}

fn execute(command: Command, out: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Solve { file, strategy: s, max_iter, verify, trace } => {
            let inst = load(&file)?;
            let mut config = SolverConfig::new(strategy(&inst, &s)?);
            config.max_iterations = max_iter;
            config.verify_each_cut = verify;
            let result = solve(&inst, &config)?;
            for rec in &result.trace {
                let i = rec.index;
                let _ = writeln!(out, "iteration.{i}.master_value={}", fmt_rational(&rec.master_value));
                if let IterationOutcome::CutAdded { cut, cglp_value, fallback, face_report, .. } = &rec.outcome {
                    let _ = writeln!(out, "iteration.{i}.cut={}", cut.canonical());
                    let _ = writeln!(out, "iteration.{i}.cglp_value={}", fmt_rational(cglp_value));
                    if *fallback {
                        let _ = writeln!(out, "iteration.{i}.fallback=true");
                    }
                    if let Some(fr) = face_report {
                        let _ = writeln!(out, "iteration.{i}.classification={}", classification_name(fr.classification));
                    }
                }
            }
            let _ = writeln!(out, "iterations={}", result.trace.len());
            let _ = writeln!(out, "status={}", status_name(&result.status));
            if let Some(path) = trace {
                std::fs::write(&path, serialize_trace(&inst, &config, &result))
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
            }
            Ok(match &result.status {
                SolveStatus::Optimal { x, y, value } => {
                    let _ = writeln!(out, "value={}", fmt_rational(value));
                    let _ = writeln!(out, "x={}", join(x));
                    let _ = writeln!(out, "y={}", join(y));
                    EXIT_OK
                }
                SolveStatus::Infeasible => EXIT_INFEASIBLE,
                SolveStatus::IllPosed(reason) => {
                    let _ = writeln!(out, "reason={reason}");
                    EXIT_UNBOUNDED
                }
                SolveStatus::IterationLimit => EXIT_ITERATION_LIMIT,
            })
        }
        Command::Separate { file, point, strategy: s } => {
            let inst = load(&file)?;
            let p = epi_point(&inst, point, "--point")?;
            let spec = strategy(&inst, &s)?;
            match separate(&inst, &p, &spec)? {
                SeparationResult::InEpigraph => {
                    let _ = writeln!(out, "status=in_epigraph");
                }
                SeparationResult::Separated(sep) => {
                    let _ = writeln!(out, "status=separated");
                    let _ = writeln!(out, "cut={}", sep.cut.canonical());
                    let _ = writeln!(out, "pi={}", join(&sep.cut.pi));
                    let _ = writeln!(out, "pi0={}", fmt_rational(&sep.cut.pi0));
                    let _ = writeln!(out, "alpha={}", fmt_rational(&sep.cut.alpha));
                    let _ = writeln!(out, "certificate={}", join(&sep.certificate.coords()));
                    let _ = writeln!(out, "cglp_value={}", fmt_rational(&sep.cglp_value));
                    let _ = writeln!(out, "supporting={}", sep.supporting);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { file, cut, point } => {
            let inst = load(&file)?;
            let n = inst.n();
            if cut.len() != n + 2 {
                return Err(input(format!("--cut needs {} values, got {}", n + 2, cut.len())));
            }
            let cut = Cut::new(cut[..n].to_vec(), cut[n].clone(), cut[n + 1].clone());
            let fr = face_report(&inst, &cut).map_err(|e| input(e.to_string()))?;
            let _ = writeln!(out, "cut={cut}");
            let _ = writeln!(out, "face_dimension={}", fr.face_dimension);
            let _ = writeln!(out, "epi_dimension={}", fr.epi_dimension);
            let _ = writeln!(out, "classification={}", classification_name(fr.classification));
            let mis = match point {
                None => "not_checked".to_string(),
                Some(coords) => {
                    let p = epi_point(&inst, coords, "--point")?;
                    match certificate_for(&inst, &cut) {
                        Some(cert) => is_mis_certificate(&inst, &p, &cert).to_string(),
                        None => "no_certificate".to_string(),
                    }
                }
            };
            let _ = writeln!(out, "mis={mis}");
            let pareto = match pareto_verdict(&inst, &cut) {
                ParetoVerdict::Pareto { witness } => {
                    let _ = writeln!(out, "pareto_witness={}", join(&witness.coords()));
                    "pareto"
                }
                ParetoVerdict::NotPareto => "not_pareto",
                ParetoVerdict::NotApplicable => "not_applicable",
            };
            let _ = writeln!(out, "pareto={pareto}");
            Ok(EXIT_OK)
        }
        Command::Enumerate { file, point } => {
            let inst = load(&file)?;
            let p = epi_point(&inst, point, "--point")?;
            for (name, relaxed) in [("P", false), ("P_le", true)] {
                let alt = build_alt_polyhedron(&inst, &p, relaxed);
                let verts = enumerate_vertices(alt.system()).map_err(|e| input(e.to_string()))?;
                let _ = writeln!(out, "{name}.count={}", verts.len());
                for (i, v) in verts.iter().enumerate() {
                    let _ = writeln!(out, "{name}.vertex.{i}={}", join(v));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bench { dir, strategies, max_iter } => bench(&dir, &strategies, max_iter, out),
    }
}

/// A basic `γ ≥ 0` with `Aᵀγ + γ₀d = 0` whose cut is exactly `cut`.
fn certificate_for(inst: &Instance, cut: &Cut) -> Option<Certificate> {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let mut lp = LinearProgram::feasibility(m + 1);
    for j in 0..=m {
        lp.nonneg(j);
    }
    let column = |f: &dyn Fn(usize) -> Rational, last: Rational| {
        let mut row: Vec<Rational> = (0..m).map(f).collect();
        row.push(last);
        row
    };
    for j in 0..k {
        lp.add_row(column(&|i| inst.a()[i][j].clone(), inst.d()[j].clone()), Relation::Eq, Rational::zero());
    }
    for j in 0..n {
        lp.add_row(column(&|i| inst.h()[i][j].clone(), Rational::zero()), Relation::Eq, cut.pi[j].clone());
    }
    lp.add_row(column(&|_| Rational::zero(), Rational::one()), Relation::Eq, -cut.pi0.clone());
    lp.add_row(column(&|i| inst.b()[i].clone(), Rational::zero()), Relation::Eq, cut.alpha.clone());
    let o = lp.solve().optimum().cloned()?;
    Some(Certificate::from_coords(o.primal))
}

fn bench_config(kind: BenchStrategy, inst: &Instance, max_iter: usize) -> SolverConfig {
    let mut config = match kind {
        BenchStrategy::Mis | BenchStrategy::Core => SolverConfig::new(ObjectiveSpec::MisOnes),
        BenchStrategy::Vertical => {
            SolverConfig::new(ObjectiveSpec::Directional { omega: vec![Rational::zero(); inst.n()], omega0: Rational::one() })
        }
    };
    if kind == BenchStrategy::Core {
        config.core_point_mode = Some(CorePointMode::UpdateOnIncumbent { blend: Rational::new(1.into(), 2.into()) });
    }
    config.max_iterations = max_iter;
    config
}

fn bench(dir: &Path, strategies: &[BenchStrategy], max_iter: usize, out: &mut String) -> Result<i32, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let rows: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|path| {
                s.spawn(move || {
                    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    let mut row = format!("file={name}");
                    match load(path) {
                        Err(Failure(_, msg)) => {
                            let _ = write!(row, " error=\"{msg}\"");
                        }
                        Ok(inst) => {
                            for &kind in strategies {
                                let label = format!("{kind:?}").to_lowercase();
                                match solve(&inst, &bench_config(kind, &inst, max_iter)) {
                                    Ok(r) => {
                                        let _ = write!(row, " {label}.iterations={}", r.trace.len());
                                        let _ = write!(row, " {label}.status={}", status_name(&r.status));
                                    }
                                    Err(e) => {
                                        let _ = write!(row, " {label}.error=\"{e}\"");
                                    }
                                }
                            }
                        }
                    }
                    row
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    let _ = writeln!(out, "instances={}", files.len());
    Ok(EXIT_OK)
}
