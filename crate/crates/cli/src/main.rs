use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use dualortho::classical::{limit_transition_check, verify_identity_2, verify_identity_3, HahnParams, KrawtchoukParams};
use dualortho::duality::{dual_system, verify_theorem1};
use dualortho::ensembles::{correlation_table, kernel, verify_correlations, verify_prop2, verify_theorem5};
use dualortho::grid::{dual_weight, WeightTable};
use dualortho::hypernum::{parse_rational, Float, FloatContext, Scalar, DEFAULT_BITS};
use dualortho::io;
use dualortho::orthopoly::{orthogonalize, KernelForm, Normalization};
use dualortho::report::{Tolerance, VerificationReport};
use dualortho::Error;

#[derive(Parser, Debug)]
#[command(name = "dualortho", version, about = "Orthogonal polynomials on finite sets and their duals")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Backend::Rational, global = true)]
    backend: Backend,

    /// Mantissa bits for the float backend.
    #[arg(long, default_value_t = DEFAULT_BITS, global = true)]
    bits: u32,

    /// Relative tolerance for the float backend.
    #[arg(long, default_value_t = 1e-30, global = true)]
    tol: f64,

    /// Maximal number of subsets enumerated by one operation.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    budget: u128,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Symmetric,
    Conjugated,
}

#[derive(Args, Debug)]
struct Input {
    /// Grid/weight JSON document.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Node products, signs and the dual weight.
    DualWeight(Input),
    /// Values, leading coefficients and norms of the monic system.
    Orthogonalize(Input),
    /// Check the duality relations between the system and its dual.
    VerifyDuality(Input),
    /// Dump the kernel of order m.
    Kernel {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: usize,
        /// Defaults to symmetric on the float backend, conjugated otherwise.
        #[arg(long, value_enum)]
        form: Option<FormArg>,
    },
    /// Brute-force and determinantal correlations side by side.
    Correlations {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: usize,
        /// Largest subset size tabulated.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Also compare the two columns and fail on mismatch.
        #[arg(long)]
        verify: bool,
    },
    /// Ensemble of order m against the complemented dual ensemble.
    VerifyProp2 {
        #[command(flatten)]
        input: Input,
        /// Defaults to every order 1..=M.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Kernel of order m against the complemented dual kernel.
    VerifyTheorem5 {
        #[command(flatten)]
        input: Input,
        /// Defaults to every order 0..=M.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Reflection identities of the classical families.
    Classical {
        #[command(subcommand)]
        family: Family,
    },
    /// Convergence of Hahn(pt, (1-p)t) to Krawtchouk(p) as t grows.
    LimitCheck {
        #[arg(long)]
        p: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "t", num_args = 1.., default_values_t = ["100".to_string(), "1000".to_string(), "10000".to_string(), "100000".to_string()])]
        t: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    Krawtchouk {
        #[arg(long)]
        p: String,
        #[arg(long = "N")]
        n: usize,
    },
    Hahn {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long = "N")]
        n: usize,
    },
}

/// What a subcommand produced: a document and, for checks, a verdict.
struct Outcome {
    json: Value,
    csv: String,
    pass: Option<bool>,
}

impl Outcome {
    fn table(json: Value, csv: String) -> Self {
        Self { json, csv, pass: None }
    }

    fn report(r: &VerificationReport) -> Self {
        let mut csv = String::from("clause,max_residual,pass\n");
        for c in &r.clauses {
            csv.push_str(&format!("{},{},{}\n", c.clause, c.max_residual, c.pass));
        }
        Self {
            json: serde_json::to_value(r).expect("report serializes"),
            csv,
            pass: Some(r.pass),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DenominatorZero { .. } => "DenominatorZero",
        Error::GammaPole(_) => "GammaPole",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::DuplicatePoint(_) => "DuplicatePoint",
        Error::EmptyGrid => "EmptyGrid",
        Error::NonPositiveWeight { .. } => "NonPositiveWeight",
        Error::LengthMismatch { .. } => "LengthMismatch",
        Error::IndexOutOfRange { .. } => "IndexOutOfRange",
        Error::BudgetExceeded { .. } => "BudgetExceeded",
        Error::NotRepresentable(_) => "NotRepresentable",
        Error::Parse(_) => "Parse",
    }
}

struct Runner<'a, S: Scalar> {
    cli: &'a Cli,
    ctx: S::Context,
    tol: Tolerance,
}

impl<S: Scalar> Runner<'_, S> {
    fn scalar(&self, text: &str) -> Result<S, Error> {
        Ok(S::from_rational(&parse_rational(text)?, &self.ctx))
    }

    fn load(&self, input: &Input) -> Result<WeightTable<S>, Error> {
        let text = fs::read_to_string(&input.input)
            .map_err(|e| Error::Parse(format!("{}: {e}", input.input.display())))?;
        io::parse_instance(&text, &self.ctx)
    }

    fn form(&self, arg: Option<FormArg>) -> KernelForm {
        match arg {
            Some(FormArg::Symmetric) => KernelForm::Symmetric,
            Some(FormArg::Conjugated) => KernelForm::Conjugated,
            None if S::EXACT => KernelForm::Conjugated,
            None => KernelForm::Symmetric,
        }
    }

    fn run(&self) -> Result<Outcome, Error> {
        let budget = self.cli.budget;
        let tol = self.tol;
        match &self.cli.command {
            Command::DualWeight(input) => {
                let u = self.load(input)?;
                let v = dual_weight(&u);
                Ok(Outcome::table(io::dual_weight_json(&u, &v), io::dual_weight_csv(&u, &v)))
            }
            Command::Orthogonalize(input) => {
                let s = orthogonalize(&self.load(input)?, &Normalization::Monic)?;
                Ok(Outcome::table(io::system_json(&s), io::system_csv(&s)))
            }
            Command::VerifyDuality(input) => {
                let s = orthogonalize(&self.load(input)?, &Normalization::Monic)?;
                Ok(Outcome::report(&verify_theorem1(&dual_system(&s)?, tol)))
            }
            Command::Kernel { input, m, form } => {
                let s = orthogonalize(&self.load(input)?, &Normalization::Monic)?;
                let k = kernel(&s, *m, self.form(*form))?;
                Ok(Outcome::table(io::kernel_json(&k), io::kernel_csv(&k)))
            }
            Command::Correlations {
                input,
                m,
                max_size,
                verify,
            } => {
                let s = orthogonalize(&self.load(input)?, &Normalization::Monic)?;
                let form = self.form(None);
                let rows = correlation_table(&s, *m, *max_size, form, budget)?;
                let mut out = Outcome::table(
                    io::correlations_json(s.grid(), *m, &rows),
                    io::correlations_csv(s.grid(), &rows),
                );
                if *verify {
                    let report = verify_correlations(&s, *m, *max_size, tol, budget)?;
                    out.json["verification"] = serde_json::to_value(&report).expect("report serializes");
                    out.pass = Some(report.pass);
                }
                Ok(out)
            }
            Command::VerifyProp2 { input, m } => {
                let u = self.load(input)?;
                let orders: Vec<usize> = match m {
                    Some(m) => vec![*m],
                    None => (1..=u.grid().degree()).collect(),
                };
                let mut report = VerificationReport::new("prop2");
                for m in orders {
                    report.absorb(&format!("m={m}"), verify_prop2(&u, m, tol, budget)?);
                }
                Ok(Outcome::report(&report))
            }
            Command::VerifyTheorem5 { input, m } => {
                let s = orthogonalize(&self.load(input)?, &Normalization::Monic)?;
                let pair = dual_system(&s)?;
                let orders: Vec<usize> = match m {
                    Some(m) => vec![*m],
                    None => (0..=pair.degree()).collect(),
                };
                let mut report = VerificationReport::new("theorem5");
                for m in orders {
                    report.absorb(&format!("m={m}"), verify_theorem5(&pair, m, tol, budget)?);
                }
                Ok(Outcome::report(&report))
            }
            Command::Classical { family } => match family {
                Family::Krawtchouk { p, n } => {
                    let params = KrawtchoukParams::new(self.scalar(p)?, *n)?;
                    Ok(Outcome::report(&verify_identity_2(&params, tol)?))
                }
                Family::Hahn { alpha, beta, n } => {
                    let params = HahnParams::new(self.scalar(alpha)?, self.scalar(beta)?, *n)?;
                    Ok(Outcome::report(&verify_identity_3(&params, tol)?))
                }
            },
            Command::LimitCheck { .. } => unreachable!("handled before backend dispatch"),
        }
    }
}

fn limit_check(p: &str, n: usize, t: &[String]) -> Result<Outcome, Error> {
    let p = parse_rational(p)?;
    let ts = t.iter().map(|s| parse_rational(s)).collect::<Result<Vec<BigRational>, _>>()?;
    let report = limit_transition_check(&p, n, &ts)?;
    let mut csv = String::from("t,max_deviation\n");
    for row in &report.rows {
        csv.push_str(&format!("{},{}\n", row.t, row.max_deviation));
    }
    csv.push_str(&format!("slope,{}\n", report.slope));
    Ok(Outcome {
        json: serde_json::to_value(&report).expect("report serializes"),
        csv,
        pass: Some(report.pass),
    })
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    if cli.budget == 0 {
        return Err(Error::InvalidArgument("--budget must be at least 1".into()));
    }
    if let Command::LimitCheck { p, n, t } = &cli.command {
        return limit_check(p, *n, t);
    }
    match cli.backend {
        Backend::Rational => Runner::<BigRational> {
            cli,
            ctx: (),
            tol: Tolerance::Exact,
        }
        .run(),
        Backend::Float => {
            if cli.tol.is_nan() || cli.tol <= 0.0 {
                return Err(Error::InvalidArgument("--tol must be positive".into()));
            }
            let ctx = FloatContext::new(cli.bits)?;
            Runner::<Float> {
                cli,
                ctx,
                tol: Tolerance::Relative(cli.tol),
            }
            .run()
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|outcome| {
        let text = match cli.format {
            Format::Json => serde_json::to_string_pretty(&outcome.json).expect("json serializes") + "\n",
            Format::Csv => outcome.csv.clone(),
        };
        emit(&cli, &text)?;
        Ok(outcome.pass)
    });
    match result {
        Ok(Some(false)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = json!({"error": error_kind(&e), "message": e.to_string()});
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
