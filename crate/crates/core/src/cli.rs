//! Command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cfa::{build_grammar, CFA_FUEL};
use crate::check::{before_first_cfa, check, run_main, InputSpec};
use crate::defunc::defunctionalize;
use crate::pcf::{load_program, parse_inputs, pcf_eval, Program};
use crate::rewriting::Atrs;
use crate::strategy::{parse_strategy, Run, Strategy};
use crate::trs_io::{emit, OutputFormat};
use crate::{eval_fuel, Error};

#[derive(Debug, Parser)]
#[command(name = "defunc-trs", version, about = "Compile higher-order programs into first-order rewrite systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Defunctionalize and simplify a program, printing the resulting TRS.
    Compile {
        file: PathBuf,
        /// Write the TRS here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// `default`, or `custom:<expr>` such as `custom:simpATRS; cfa`.
        #[arg(long, default_value = "default")]
        strategy: String,
        /// Print an intermediate result to standard error: `defunc`, a stage
        /// (`simpATRS`, `toTRS`, `simpTRS`), a transformation (`cfa`,
        /// `uncurry`, ...), `final`, `grammar` or `all`.
        #[arg(long = "dump", value_name = "STAGE")]
        dump: Vec<String>,
        /// `classic`, `applicative` or `debug`. Defaults to classic for
        /// first-order results and applicative otherwise.
        #[arg(long)]
        format: Option<String>,
    },
    /// Evaluate a program on inputs at some stage of the pipeline.
    Eval {
        file: PathBuf,
        /// Comma-separated data terms in source syntax, e.g. `[1;2], 3`.
        #[arg(long)]
        input: String,
        /// Also print the number of steps.
        #[arg(long)]
        count_steps: bool,
        /// `source` for the source interpreter, `defunc`, a stage or
        /// transformation name, or `final`.
        #[arg(long, default_value = "final")]
        stage: String,
        #[arg(long, default_value = "default")]
        strategy: String,
    },
    /// Run the invariant suite on generated inputs and print a table.
    Check {
        file: PathBuf,
        /// Input sizes, `N` or `A..B`.
        #[arg(long, default_value = "0..8")]
        inputs: String,
        #[arg(long, default_value = "default")]
        strategy: String,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

fn strategy(spec: &str) -> Result<Strategy, Error> {
    match spec {
        "default" => Ok(Strategy::simplify()),
        _ => match spec.strip_prefix("custom:") {
            Some(expr) => Ok(parse_strategy(expr)?),
            None => Err(Error::Usage(format!("unknown strategy `{spec}`, expected `default` or `custom:<expr>`"))),
        },
    }
}

fn pipeline(file: &Path, spec: &str) -> Result<(Program, Run), Error> {
    let s = strategy(spec)?;
    let (p, _) = load_program(&read(file)?)?;
    let run = s.apply(&defunctionalize(&p))?;
    Ok((p, run))
}

fn stage<'r>(run: &'r Run, name: &str) -> Result<&'r Atrs, Error> {
    match name {
        "defunc" | "input" => Ok(&run.input),
        "final" => Ok(&run.output),
        _ => run.stage(name).ok_or_else(|| {
            let known: Vec<&str> = run.log.iter().map(|s| s.label.as_str()).collect();
            Error::Usage(format!("no stage `{name}` in this run; available: defunc, {}, final", known.join(", ")))
        }),
    }
}

fn dump(run: &Run, what: &str, err: &mut dyn Write) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Io { path: "<stderr>".into(), message: e.to_string() };
    match what {
        "all" => {
            for (label, a) in run.stages() {
                writeln!(err, "-- {label}\n{a}").map_err(io)?;
            }
            writeln!(err, "-- final\n{}", run.output).map_err(io)?;
        }
        "grammar" => {
            let g = build_grammar(before_first_cfa(run), CFA_FUEL)?;
            writeln!(err, "-- grammar\n{g}").map_err(io)?;
        }
        _ => {
            let a = stage(run, what)?;
            writeln!(err, "-- {what}\n{a}").map_err(io)?;
        }
    }
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Io { path: "<stdout>".into(), message: e.to_string() };
    match cli.command {
        Command::Compile { file, output, strategy, dump: dumps, format } => {
            let format = match format.as_deref() {
                None => None,
                Some(f) => Some(OutputFormat::parse(f).ok_or_else(|| {
                    Error::Usage(format!("unknown format `{f}`, expected classic, applicative or debug"))
                })?),
            };
            let (_, run) = pipeline(&file, &strategy)?;
            for d in &dumps {
                dump(&run, d, err)?;
            }
            let format = format.unwrap_or(if run.output.has_app() {
                OutputFormat::Applicative
            } else {
                OutputFormat::Classic
            });
            let text = emit(&run.output, format)?;
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
        }
        Command::Eval { file, input, count_steps, stage: name, strategy } => {
            let fuel = eval_fuel()?;
            let (p, run) = pipeline(&file, &strategy)?;
            let inputs = parse_inputs(&input, &p)?;
            let (value, steps) = if name == "source" {
                pcf_eval(&p, &inputs, fuel)?
            } else {
                let a = stage(&run, &name)?;
                if inputs.len() != a.main.arity() {
                    return Err(Error::Usage(format!("expected {} inputs, got {}", a.main.arity(), inputs.len())));
                }
                run_main(a, &inputs, fuel)?
            };
            writeln!(out, "{value}").map_err(io)?;
            if count_steps {
                writeln!(out, "steps: {steps}").map_err(io)?;
            }
        }
        Command::Check { file, inputs, strategy } => {
            let fuel = eval_fuel()?;
            let (p, run) = pipeline(&file, &strategy)?;
            let inputs = InputSpec::parse(&inputs)?.generate(&p)?;
            let report = check(&p, &run, &inputs, fuel)?;
            write!(out, "{report}").map_err(io)?;
            if !report.ok() {
                return Err(Error::CheckFailed("some checks failed".into()));
            }
        }
    }
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/tests/fixtures/{name}.fp", env!("CARGO_MANIFEST_DIR"))
    }

    fn cli(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("defunc-trs").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn compile_rev() {
        let (code, out, _) = cli(&["compile", &fixture("rev")]);
        assert_eq!(code, 0);
        assert!(out.contains("(RULES\n"));
        assert!(out.contains("  C1u(C2,C3(x),z) -> Cons(x,z)\n"), "{out}");
        assert_eq!(out.lines().filter(|l| l.contains(" -> ")).count(), 6);
    }

    #[test]
    fn compile_dumps_stages() {
        let (code, _, err) = cli(&["compile", &fixture("rev"), "--dump", "defunc", "--dump", "grammar", "--format", "debug"]);
        assert_eq!(code, 0, "{err}");
        assert!(err.contains("-- defunc\n") && err.contains("\nC1(f,g) @ z -> f @ (g @ z)\n"), "{err}");
        assert!(err.contains("S → "));
    }

    #[test]
    fn eval_at_every_stage() {
        for stage in ["source", "defunc", "simpATRS", "cfa", "final"] {
            let (code, out, err) = cli(&["eval", &fixture("rev"), "--input", "[[];[[]]]", "--count-steps", "--stage", stage]);
            assert_eq!(code, 0, "{stage}: {err}");
            assert!(out.starts_with("([]::[])::[]::[]\nsteps: "), "{stage}: {out}");
        }
    }

    #[test]
    fn check_reports_a_table() {
        let (code, out, err) = cli(&["check", &fixture("rev"), "--inputs", "0..4"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("simulation"));
        assert!(out.contains("grammar-safety"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["compile", "/nonexistent.fp"]).0, 1);
        assert_eq!(cli(&["compile", &fixture("rev"), "--strategy", "custom:bogus"]).0, 1);
        assert_eq!(cli(&["compile", &fixture("rev"), "--format", "classic", "--strategy", "custom:id"]).0, 1);
        assert_eq!(cli(&["eval", &fixture("rev"), "--input", "[]", "--stage", "nowhere"]).0, 1);
        // uncurrying straight after defunctionalization meets head variables
        assert_eq!(cli(&["compile", &fixture("rev"), "--strategy", "custom:uncurry"]).0, 2);
        assert_eq!(cli(&["compile", &fixture("rev"), "--strategy", "custom:exhaustive id"]).0, 3);
        assert_eq!(cli(&["--help"]).0, 0);
        assert_eq!(cli(&["frobnicate"]).0, 1);
    }
}
