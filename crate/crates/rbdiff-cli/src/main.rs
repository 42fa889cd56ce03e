//! `rbdiff` — command-line front end for the exact transport engine.
//!
//! Subcommands:
//!
//! * `classify` — place a constraint in the flat hierarchy (every weight /
//!   weight 0 only / not flat).
//! * `check` — verify flatness positively on the divided-power fixtures, or
//!   produce a certified counterexample with its defect vector.
//! * `sweep` — run the symbolic classifier against experimental evidence on
//!   a whole coefficient grid; any disagreement sets the exit code.
//! * `coextend` — lift the divided-power shift through a constraint and
//!   print the lifted series components on a chosen witness.
//! * `extend` — extend a nilpotent derivation to the capped word algebra
//!   and apply it to a basis word.
//!
//! Exit codes: `0` success/consistent, `1` mismatch, disagreement, or
//! runtime failure, `2` syntax or usage error. All numbers in the output
//! are exact rationals; nothing is rounded.

mod output;
mod parse;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rbdiff_core::{
    classify_omega, coextend, default_grid, find_counterexample, make_divided_power,
    nilpotent_derivation_fixtures, sweep, tensor_context, verify_positive_with, Error, Extension,
    OmegaClass, OmegaConstraint, Scalar, SeriesSpec, TensorElem, WeightMode, Word, DEFAULT_SEED,
};

use output::{
    CheckJson, CoextendJson, ComponentJson, ExtendJson, OmegaJson, SweepJson, TensorTermJson,
};

/// Randomized witness pairs per fixture in positive verification.
const TRIALS: usize = 20;

#[derive(Parser)]
#[command(
    name = "rbdiff",
    version,
    about = "Exact transport of Rota-Baxter and differential structure along constraint-shaped operators",
    after_help = "Constraint syntax: `x*y`, `x*y - atom`, or `x*y - (c0 + c1*x^k + ... + y*p(x) ...)`,\n\
                  with exact rational coefficients like 2, -1, or 3/2.\n\
                  Examples: `x*y - 1`, `x*y - y*x`, `x*y - (y + y*x^2)`, `x*y - (1/2 + x)`."
)]
struct Cli {
    /// Weight λ, an exact rational (`p` or `p/q`).
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    lambda: String,

    /// Verify series components 0..=N (N ≥ 1).
    #[arg(long = "depth", short = 'N', global = true, default_value_t = 6)]
    depth: usize,

    /// Tensor length cap L for word-algebra work (L ≥ 2).
    #[arg(long = "cap", short = 'L', global = true, default_value_t = 5)]
    cap: usize,

    /// Divided-power fixture depths, comma-separated (each ≥ 1).
    #[arg(long, global = true, default_value = "1,2,3,4,5")]
    fixtures: String,

    /// Seed for the randomized witness pairs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit JSON (one object, or one object per line for `sweep`).
    #[arg(long, global = true)]
    json: bool,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide where a constraint sits: flat for every weight, flat at weight 0 only, or not flat.
    Classify {
        /// The constraint, e.g. "x*y - 1" or "x*y - (y + y*x^2)".
        omega: String,
    },
    /// Verify flatness on the divided-power fixtures, or certify a counterexample.
    Check {
        /// The constraint to check at the given weight.
        omega: String,
    },
    /// Compare symbolic and experimental classification over a coefficient grid.
    Sweep {
        /// Maximum x-degree of the φ and ψ polynomials in the grid.
        #[arg(long = "max-deg", default_value_t = 3)]
        max_deg: usize,
        /// Coefficient alphabet, comma-separated rationals. Empty ⇒ empty grid.
        #[arg(long, default_value = "-1,0,1,2", allow_hyphen_values = true)]
        coeffs: String,
        /// Restrict to the every-weight flat family {x*y, x*y - 1, x*y - y*x}.
        #[arg(long)]
        tk: bool,
    },
    /// Lift the divided-power shift through a constraint; print the lifted components.
    Coextend {
        /// The constraint shaping the lift.
        omega: String,
        /// Witness series: `unit`, `delta@K` (basis z0 at component K), or `delta@K:B`.
        #[arg(long, default_value = "unit")]
        witness: String,
        /// Depth of the divided-power fixture to lift on.
        #[arg(long = "fixture-depth", default_value_t = 3)]
        fixture_depth: usize,
    },
    /// Extend a nilpotent derivation to the capped word algebra and apply it to a word.
    Extend {
        /// The constraint shaping the extension.
        omega: String,
        /// Base fixture: t3, t4, t7, or t5-cubic.
        #[arg(long = "fixture-name", default_value = "t4")]
        fixture_name: String,
        /// Tensor word as comma-separated basis labels (empty for the empty word).
        #[arg(long, default_value = "t")]
        word: String,
    },
}

/// A failure with the exit code it maps to: 1 = runtime/mismatch, 2 = usage.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        runtime(e.to_string())
    }
}

struct Config {
    lambda: Scalar,
    depth: usize,
    cap: usize,
    fixtures: Vec<usize>,
    seed: u64,
}

fn build_config(cli: &Cli) -> Result<Config, Failure> {
    let lambda: Scalar = cli.lambda.trim().parse().map_err(|_| {
        usage(format!("--lambda must be an exact rational (`p` or `p/q`), got `{}`", cli.lambda))
    })?;
    if cli.depth < 1 {
        return Err(usage("--depth must be at least 1"));
    }
    if cli.cap < 2 {
        return Err(usage("--cap must be at least 2"));
    }
    let fixtures = parse_csv_usize(&cli.fixtures, "--fixtures")?;
    if fixtures.is_empty() {
        return Err(usage("--fixtures must name at least one depth"));
    }
    if fixtures.iter().any(|&d| d == 0) {
        return Err(usage("--fixtures depths must be at least 1"));
    }
    Ok(Config {
        lambda,
        depth: cli.depth,
        cap: cli.cap,
        fixtures,
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
    })
}

fn parse_csv_usize(s: &str, what: &str) -> Result<Vec<usize>, Failure> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("{what}: `{tok}` is not a non-negative integer")))
        })
        .collect()
}

fn parse_csv_scalar(s: &str, what: &str) -> Result<Vec<Scalar>, Failure> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<Scalar>()
                .map_err(|_| usage(format!("{what}: `{tok}` is not an exact rational")))
        })
        .collect()
}

fn parse_constraint(src: &str) -> Result<OmegaConstraint, Failure> {
    parse::parse_omega(src).map_err(|e| usage(e.render(src)))
}

/// Witness syntax for `coextend`: `unit`, `delta@K`, or `delta@K:B`.
fn parse_witness(spec: &str, dim: usize) -> Result<SeriesSpec, Failure> {
    let spec = spec.trim();
    if spec == "unit" {
        return Ok(SeriesSpec::Unit);
    }
    if let Some(rest) = spec.strip_prefix("delta@") {
        let (k_str, b_str) = match rest.split_once(':') {
            Some((k, b)) => (k, Some(b)),
            None => (rest, None),
        };
        let k: usize = k_str
            .trim()
            .parse()
            .map_err(|_| usage(format!("--witness: `{k_str}` is not a component index")))?;
        let b: usize = match b_str {
            Some(b) => b
                .trim()
                .parse()
                .map_err(|_| usage(format!("--witness: `{b}` is not a basis index")))?,
            None => 0,
        };
        if b >= dim {
            return Err(usage(format!(
                "--witness: basis index {b} out of range for a depth-{dim} fixture"
            )));
        }
        return Ok(SeriesSpec::delta(k, b));
    }
    Err(usage(format!(
        "--witness must be `unit`, `delta@K`, or `delta@K:B`, got `{spec}`"
    )))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let cfg = build_config(cli)?;
    let (payload, code) = match &cli.cmd {
        Cmd::Classify { omega } => cmd_classify(&cfg, &parse_constraint(omega)?, cli.json)?,
        Cmd::Check { omega } => cmd_check(&cfg, &parse_constraint(omega)?, cli.json)?,
        Cmd::Sweep { max_deg, coeffs, tk } => cmd_sweep(&cfg, *max_deg, coeffs, *tk, cli.json)?,
        Cmd::Coextend { omega, witness, fixture_depth } => {
            cmd_coextend(&cfg, &parse_constraint(omega)?, witness, *fixture_depth, cli.json)?
        }
        Cmd::Extend { omega, fixture_name, word } => {
            cmd_extend(&cfg, &parse_constraint(omega)?, fixture_name, word, cli.json)?
        }
    };
    emit(&cli.out, &payload)?;
    Ok(code)
}

fn weight_mode(lambda: &Scalar) -> WeightMode {
    if lambda.is_zero() {
        WeightMode::ZeroWeight
    } else {
        WeightMode::AllWeights
    }
}

fn cmd_classify(
    cfg: &Config,
    omega: &OmegaConstraint,
    json: bool,
) -> Result<(String, u8), Failure> {
    let class = classify_omega(omega, weight_mode(&cfg.lambda));
    let verdict = match &class {
        OmegaClass::InTk(_) => "in-Tk",
        OmegaClass::InT0Only(_) => "in-T0-only",
        OmegaClass::Outside => "outside",
    };
    let payload = if json {
        let record = CheckJson {
            omega: OmegaJson::from_omega(omega),
            lambda: cfg.lambda.to_string(),
            verdict: verdict.to_string(),
            detail: class.to_string(),
            case_id: None,
            witness: None,
            defect: None,
            orientation: None,
            formula: None,
            components_checked: 0,
        };
        to_json_line(&record)?
    } else {
        format!(
            "constraint: {omega}\nweight:     {}\nverdict:    {class}\n",
            cfg.lambda
        )
    };
    Ok((payload, 0))
}

fn cmd_check(cfg: &Config, omega: &OmegaConstraint, json: bool) -> Result<(String, u8), Failure> {
    let class = classify_omega(omega, weight_mode(&cfg.lambda));
    if class.approved() {
        let max_depth = *cfg.fixtures.iter().max().expect("validated non-empty");
        let report =
            verify_positive_with(omega, &cfg.lambda, cfg.depth, TRIALS, max_depth, cfg.seed)?;
        let verdict = if report.pass { "flat" } else { "mismatch" };
        let code = if report.pass { 0 } else { 1 };
        let payload = if json {
            let record = CheckJson {
                omega: OmegaJson::from_omega(omega),
                lambda: cfg.lambda.to_string(),
                verdict: verdict.to_string(),
                detail: report.detail.clone(),
                case_id: None,
                witness: None,
                defect: None,
                orientation: None,
                formula: None,
                components_checked: report.checked,
            };
            to_json_line(&record)?
        } else {
            let mut text = format!(
                "constraint: {omega}\nweight:     {}\nverdict:    {class}\nchecked:    {} components exactly, all zero defect\n",
                cfg.lambda, report.checked
            );
            if !report.pass {
                let w = report.witness.map(|w| w.to_string()).unwrap_or_default();
                text = format!(
                    "constraint: {omega}\nweight:     {}\nverdict:    MISMATCH — classified flat but a defect appeared\nwitness:    {w}\ndetail:     {}\n",
                    cfg.lambda, report.detail
                );
            }
            text
        };
        return Ok((payload, code));
    }

    match find_counterexample(omega, &cfg.lambda) {
        Ok(w) => {
            let fx = make_divided_power(w.fixture_depth, &cfg.lambda)?;
            let labels = fx.algebra.labels();
            let (case_id, witness, defect, orientation, formula) =
                CheckJson::witness_fields(&w, labels);
            let detail = format!(
                "certified counterexample: nonzero transport defect at component n = {}",
                w.n
            );
            let payload = if json {
                let record = CheckJson {
                    omega: OmegaJson::from_omega(omega),
                    lambda: cfg.lambda.to_string(),
                    verdict: "not-flat".to_string(),
                    detail,
                    case_id,
                    witness,
                    defect,
                    orientation,
                    formula,
                    components_checked: w.n + 1,
                };
                to_json_line(&record)?
            } else {
                let source = match w.source {
                    rbdiff_core::WitnessSource::Branch => "constructive branch",
                    rbdiff_core::WitnessSource::FallbackSearch => "fallback search",
                };
                let mut text = format!(
                    "constraint: {omega}\nweight:     {}\nverdict:    not flat (case {})\nwitness:    fixture I_{}, f = {}, g = {}, component n = {}  [{source}]\ndefect:     {}   (closed-form orientation; engine sign {:+})\n",
                    cfg.lambda,
                    w.case,
                    w.fixture_depth,
                    w.f,
                    w.g,
                    w.n,
                    w.normalized_defect(),
                    w.orientation,
                );
                if let Some(f) = &w.formula {
                    let _ = writeln!(text, "formula:    {f}");
                }
                text
            };
            Ok((payload, 0))
        }
        Err(Error::SearchExhausted(msg)) => {
            let payload = if json {
                let record = CheckJson {
                    omega: OmegaJson::from_omega(omega),
                    lambda: cfg.lambda.to_string(),
                    verdict: "undetermined".to_string(),
                    detail: msg.clone(),
                    case_id: None,
                    witness: None,
                    defect: None,
                    orientation: None,
                    formula: None,
                    components_checked: 0,
                };
                to_json_line(&record)?
            } else {
                format!(
                    "constraint: {omega}\nweight:     {}\nverdict:    undetermined\ndetail:     {msg}\n",
                    cfg.lambda
                )
            };
            Ok((payload, 1))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_sweep(
    cfg: &Config,
    max_deg: usize,
    coeffs: &str,
    tk: bool,
    json: bool,
) -> Result<(String, u8), Failure> {
    let grid: Vec<OmegaConstraint> = if tk {
        vec![OmegaConstraint::xy(), OmegaConstraint::fftc(), OmegaConstraint::commutator()]
    } else {
        let alphabet = parse_csv_scalar(coeffs, "--coeffs")?;
        if alphabet.is_empty() {
            Vec::new()
        } else {
            default_grid(max_deg, &alphabet)
        }
    };
    let rows = sweep(&grid, &[cfg.lambda.clone()], cfg.depth)?;
    let disagreements = rows.iter().filter(|r| !r.agreement).count();

    let mut payload = String::new();
    if json {
        for row in &rows {
            let _ = writeln!(payload, "{}", to_json_inline(&SweepJson::from_row(row))?);
        }
    } else if !rows.is_empty() {
        for row in &rows {
            let case = row.case_id.map(|c| c.to_string()).unwrap_or_else(|| "-".to_string());
            let agree = if row.agreement { "yes" } else { "NO" };
            let _ = writeln!(
                payload,
                "{:<44} λ={:<5} symbolic={:<8} experimental={:<8} agree={:<3} case={}",
                row.omega.to_string(),
                row.lambda.to_string(),
                row.symbolic.to_string(),
                row.experimental.to_string(),
                agree,
                case
            );
        }
        let _ = writeln!(payload, "rows: {}   disagreements: {}", rows.len(), disagreements);
    }
    Ok((payload, if disagreements == 0 { 0 } else { 1 }))
}

fn cmd_coextend(
    cfg: &Config,
    omega: &OmegaConstraint,
    witness: &str,
    fixture_depth: usize,
    json: bool,
) -> Result<(String, u8), Failure> {
    if fixture_depth == 0 {
        return Err(usage("--fixture-depth must be at least 1"));
    }
    let fx = make_divided_power(fixture_depth, &cfg.lambda)?;
    let spec = parse_witness(witness, fx.algebra.dim())?;
    let f = spec.build(&fx.algebra, &cfg.lambda);
    let lifted = coextend(&fx.p, omega, &f)?;

    let mut components = Vec::with_capacity(cfg.depth + 1);
    for n in 0..=cfg.depth {
        components.push((n, lifted.component(n)?));
    }

    let payload = if json {
        let record = CoextendJson {
            omega: OmegaJson::from_omega(omega),
            lambda: cfg.lambda.to_string(),
            fixture: fx.name.clone(),
            witness: spec.to_string(),
            basis: fx.algebra.labels().to_vec(),
            components: components
                .iter()
                .map(|(n, e)| ComponentJson {
                    n: *n,
                    coords: e.coords().iter().map(Scalar::to_string).collect(),
                })
                .collect(),
        };
        to_json_line(&record)?
    } else {
        let mut text = format!(
            "constraint: {omega}\nweight:     {}\nfixture:    {} (shift lifted through the constraint)\nwitness:    f = {}\n",
            cfg.lambda, fx.name, spec
        );
        for (n, e) in &components {
            let _ = writeln!(text, "  lift_{n}(f) = {e}");
        }
        text
    };
    Ok((payload, 0))
}

fn cmd_extend(
    cfg: &Config,
    omega: &OmegaConstraint,
    fixture_name: &str,
    word: &str,
    json: bool,
) -> Result<(String, u8), Failure> {
    let fixtures = nilpotent_derivation_fixtures()?;
    let fx = fixtures.iter().find(|f| f.name == fixture_name).ok_or_else(|| {
        let names: Vec<&str> = fixtures.iter().map(|f| f.name.as_str()).collect();
        usage(format!(
            "--fixture-name: unknown fixture `{fixture_name}` (available: {})",
            names.join(", ")
        ))
    })?;
    let labels = fx.algebra.labels();

    let word_indices: Word = if word.trim().is_empty() {
        Vec::new()
    } else {
        word.split(',')
            .map(|tok| {
                let tok = tok.trim();
                labels
                    .iter()
                    .position(|l| l == tok)
                    .map(|i| i as u16)
                    .ok_or_else(|| {
                        usage(format!(
                            "--word: unknown basis label `{tok}` (available: {})",
                            labels.join(", ")
                        ))
                    })
            })
            .collect::<Result<_, _>>()?
    };
    if word_indices.len() > cfg.cap {
        return Err(usage(format!(
            "--word: length {} exceeds --cap {}",
            word_indices.len(),
            cfg.cap
        )));
    }

    let ctx = tensor_context(&fx.algebra, &cfg.lambda, cfg.cap)?;
    let ext = Extension::new(&ctx, &fx.d, omega)?;
    let x = TensorElem::from_word(&ctx, word_indices.clone())?;
    let image = ext.apply(&x)?;

    let word_labels: Vec<String> =
        word_indices.iter().map(|&i| labels[i as usize].clone()).collect();
    let payload = if json {
        let record = ExtendJson {
            omega: OmegaJson::from_omega(omega),
            lambda: cfg.lambda.to_string(),
            fixture: fx.name.clone(),
            word: word_labels,
            image: image
                .terms()
                .iter()
                .map(|(w, c)| TensorTermJson {
                    word: w.iter().map(|&i| labels[i as usize].clone()).collect(),
                    coeff: c.to_string(),
                })
                .collect(),
        };
        to_json_line(&record)?
    } else {
        let shown = if word_labels.is_empty() {
            "1 (empty word)".to_string()
        } else {
            word_labels.join(" ⊗ ")
        };
        format!(
            "constraint: {omega}\nweight:     {}\nfixture:    {} (derivation extended to words of length ≤ {})\nextended({shown}) = {image}\n",
            cfg.lambda, fx.name, cfg.cap
        )
    };
    Ok((payload, 0))
}

fn to_json_line<T: serde::Serialize>(record: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(record)
        .map(|s| s + "\n")
        .map_err(|e| runtime(format!("JSON encoding failed: {e}")))
}

fn to_json_inline<T: serde::Serialize>(record: &T) -> Result<String, Failure> {
    serde_json::to_string(record).map_err(|e| runtime(format!("JSON encoding failed: {e}")))
}
