//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (not Sidon, no property N, ...),
//! 2 usage or parse error, 3 enumeration budget or search cap exceeded.
//! Rationals are always printed as exact strings such as `"3/4"`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{check_growth, erdos_moser_corridor, g_of_n};
use crate::construct::{extend_greedy, greedy_with_steps, GreedyState, GreedyStep};
use crate::error::{Result, SidonError};
use crate::linear_form::LinearForm;
use crate::perturb::{perturb_padic, perturb_rational, PadicSpec, PerturbStep, PerturbationSpec};
use crate::scalar::Scalar;
use crate::sidon_core::{
    forbidden_values, is_sidon_bruteforce, phi_image, verify_incremental, BruteVerdict,
    IncrementalVerdict, SidonSet,
};
use crate::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "phi-sidon", version, about = "Sidon sets for linear forms")]
struct Cli {
    /// Emit JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest number of tuples a single enumeration may visit.
    #[arg(long, global = true, env = "SIDON_MAX_TUPLES")]
    max_tuples: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FormArg {
    /// Coefficients, e.g. "1,2,-3/4".
    #[arg(long, allow_hyphen_values = true)]
    form: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide property N and print an obstruction if it fails.
    CheckN(FormArg),
    /// Check whether a set is Sidon for a form.
    Verify {
        #[command(flatten)]
        form: FormArg,
        /// Set file, one rational per line ("-" for stdin).
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = Mode::Brute)]
        mode: Mode,
    },
    /// Greedy Sidon sequence of positive integers.
    Greedy {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "1")]
        first: BigInt,
        /// Resume from a stored prefix (re-verified before extending).
        #[arg(long)]
        seed_file: Option<String>,
    },
    /// Perturb a target sequence into a Sidon sequence.
    Perturb {
        #[command(flatten)]
        form: FormArg,
        /// Targets file, one value per line ("-" for stdin).
        #[arg(long)]
        targets: String,
        /// Tolerances, e.g. "1,1/2,1/4".
        #[arg(long)]
        eps: String,
        /// Measure closeness p-adically; targets must be integers.
        #[arg(long, requires = "primes")]
        padic: bool,
        #[arg(long)]
        primes: Option<String>,
        /// Use only the first COUNT targets.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Compare a Sidon set's counting function with the growth bound.
    Growth {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        set: String,
        /// Thresholds, e.g. "5,10,100".
        #[arg(long)]
        ts: String,
    },
    /// Largest subset of {1..n} with distinct subset sums.
    Gn {
        #[arg(long)]
        n: u64,
    },
    /// Export the phi-image of a set.
    Image {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        set: String,
    },
    /// Values that cannot extend a Sidon set.
    Forbidden {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        set: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Brute,
    Incremental,
}

/// Exit code plus the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn out(code: i32, stdout: String) -> Self {
        CommandResult {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Parses `args` (program name first) and runs the command. `stdin` backs
/// any file argument given as `-`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandResult::out(code, text)
            };
        }
    };
    let limits = match cli.max_tuples {
        Some(m) => Limits::with_max_tuples(m),
        None => Limits::default(),
    };
    let ctx = Context {
        json: cli.json,
        limits,
    };
    match ctx.dispatch(cli.command, stdin) {
        Ok(result) => result,
        Err(e) => ctx.error(&e),
    }
}

/// Maps an error to its exit code.
pub fn exit_code(e: &SidonError) -> i32 {
    use SidonError::*;
    match e {
        BudgetExceeded { .. } | CapExceeded { .. } | FormTooLarge { .. } => EXIT_BUDGET,
        EmptyCoefficientList
        | Parse { .. }
        | InvalidArgument(_)
        | NotPrime(_)
        | NonPositiveTolerance { .. }
        | NegativeThreshold(_)
        | EmptySubset
        | SubsetOutOfRange { .. } => EXIT_USAGE,
        ZeroCoefficient { .. }
        | PropertyNViolated
        | NonIntegerCoefficients
        | ElementAlreadyPresent(_)
        | DuplicateElement(_)
        | PreconditionNotSidon
        | NotSidon(_)
        | StreamExhausted
        | NonIntegerElements(_)
        | GrowthBoundViolated { .. } => EXIT_DOMAIN,
    }
}

/// Reads values one per line. `#` starts a comment; blank lines are skipped.
pub fn parse_values(text: &str) -> Result<Vec<Scalar>> {
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let value = body.parse::<Scalar>().map_err(|e| SidonError::Parse {
            input: body.to_string(),
            reason: format!("line {}: {e}", n + 1),
        })?;
        values.push(value);
    }
    Ok(values)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| SidonError::Parse {
                input: text.to_string(),
                reason: format!("expected a comma-separated list of {what}"),
            })
        })
        .collect()
}

fn to_integer(x: &Scalar) -> Result<BigInt> {
    x.to_integer().ok_or_else(|| SidonError::Parse {
        input: x.to_string(),
        reason: "expected an integer".into(),
    })
}

fn render_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    text
}

fn strings<T: ToString>(values: &[T]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

struct Context {
    json: bool,
    limits: Limits,
}

impl Context {
    fn error(&self, e: &SidonError) -> CommandResult {
        let code = exit_code(e);
        if self.json {
            CommandResult::out(
                code,
                render_json(&json!({ "error": e.to_string(), "reason": e.reason() })),
            )
        } else {
            CommandResult {
                code,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    }

    fn emit(&self, code: i32, payload: Value, text: String) -> CommandResult {
        CommandResult::out(
            code,
            if self.json {
                render_json(&payload)
            } else {
                text
            },
        )
    }

    fn read_source(&self, path: &str, stdin: &mut dyn Read) -> Result<String> {
        let mut text = String::new();
        if path == "-" {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| SidonError::InvalidArgument(format!("reading stdin: {e}")))?;
        } else {
            text = fs::read_to_string(path)
                .map_err(|e| SidonError::InvalidArgument(format!("reading {path}: {e}")))?;
        }
        Ok(text)
    }

    fn read_values(&self, path: &str, stdin: &mut dyn Read) -> Result<Vec<Scalar>> {
        parse_values(&self.read_source(path, stdin)?)
    }

    fn dispatch(&self, command: Command, stdin: &mut dyn Read) -> Result<CommandResult> {
        match command {
            Command::CheckN(f) => self.check_n(&f.form.parse()?),
            Command::Verify { form, set, mode } => {
                let form: LinearForm = form.form.parse()?;
                let elements = self.read_values(&set, stdin)?;
                self.verify(&form, &elements, mode)
            }
            Command::Greedy {
                form,
                count,
                first,
                seed_file,
            } => {
                let form: LinearForm = form.form.parse()?;
                let seed = match seed_file {
                    Some(path) => Some(self.read_values(&path, stdin)?),
                    None => None,
                };
                self.greedy(&form, count, first, seed)
            }
            Command::Perturb {
                form,
                targets,
                eps,
                padic,
                primes,
                count,
            } => {
                let form: LinearForm = form.form.parse()?;
                let targets = self.read_values(&targets, stdin)?;
                let eps = Scalar::parse_list(&eps)?;
                let primes = match primes {
                    Some(p) if padic => Some(parse_list::<u64>(&p, "primes")?),
                    _ => None,
                };
                self.perturb(&form, targets, eps, primes, count)
            }
            Command::Growth { form, set, ts } => {
                let form: LinearForm = form.form.parse()?;
                let elements = self.read_values(&set, stdin)?;
                self.growth(&form, elements, &Scalar::parse_list(&ts)?)
            }
            Command::Gn { n } => self.gn(n),
            Command::Image { form, set } => {
                let form: LinearForm = form.form.parse()?;
                let elements = self.read_values(&set, stdin)?;
                self.image(&form, &elements)
            }
            Command::Forbidden { form, set } => {
                let form: LinearForm = form.form.parse()?;
                let elements = self.read_values(&set, stdin)?;
                self.forbidden(&form, elements)
            }
        }
    }

    fn check_n(&self, form: &LinearForm) -> Result<CommandResult> {
        let witness = form.witness_obstruction(&self.limits)?;
        Ok(match witness {
            None => self.emit(
                EXIT_OK,
                json!({ "form": form, "property_n": true }),
                format!("form:       {form}\nproperty N: yes\n"),
            ),
            Some((i1, i2)) => {
                let sum = form.subset_sum(i1);
                self.emit(
                    EXIT_DOMAIN,
                    json!({
                        "form": form,
                        "property_n": false,
                        "reason": "property_n_violated",
                        "witness": { "i1": i1, "i2": i2, "sum": sum },
                    }),
                    format!(
                        "form:       {form}\nproperty N: no\nI1:         {i1}\nI2:         {i2}\ns(I1) = s(I2) = {sum}\n"
                    ),
                )
            }
        })
    }

    fn verify(&self, form: &LinearForm, elements: &[Scalar], mode: Mode) -> Result<CommandResult> {
        let header = format!(
            "form:  {form}\nmode:  {}\nsize:  {}\n",
            mode_name(mode),
            elements.len()
        );
        let base = json!({
            "form": form,
            "mode": mode_name(mode),
            "size": elements.len(),
        });
        let with = |extra: Value| {
            let mut v = base.clone();
            v.as_object_mut()
                .unwrap()
                .extend(extra.as_object().unwrap().clone());
            v
        };
        match mode {
            Mode::Brute => match is_sidon_bruteforce(form, elements, &self.limits)? {
                BruteVerdict::Sidon => Ok(self.emit(
                    EXIT_OK,
                    with(json!({ "sidon": true })),
                    format!("{header}Sidon: yes\n"),
                )),
                BruteVerdict::Collision(w) => Ok(self.emit(
                    EXIT_DOMAIN,
                    with(json!({
                        "sidon": false,
                        "reason": "collision",
                        "witness": [w.first, w.second],
                        "value": w.value,
                    })),
                    format!("{header}Sidon: no\nwitness: {w}\n"),
                )),
            },
            Mode::Incremental => match verify_incremental(form, elements, &self.limits)? {
                IncrementalVerdict::Sidon(_) => Ok(self.emit(
                    EXIT_OK,
                    with(json!({ "sidon": true })),
                    format!("{header}Sidon: yes\n"),
                )),
                IncrementalVerdict::Rejected { position, element } => Ok(self.emit(
                    EXIT_DOMAIN,
                    with(json!({
                        "sidon": false,
                        "reason": "extension_rejected",
                        "position": position,
                        "element": element,
                    })),
                    format!("{header}Sidon: no\nfirst offending element: {element} (position {position})\n"),
                )),
            },
        }
    }

    fn greedy(
        &self,
        form: &LinearForm,
        count: usize,
        first: BigInt,
        seed: Option<Vec<Scalar>>,
    ) -> Result<CommandResult> {
        let (set, steps) = match seed {
            None => greedy_with_steps(form, count, first, &self.limits)?,
            Some(prefix) => {
                if prefix.len() > count {
                    return Err(SidonError::InvalidArgument(format!(
                        "seed prefix has {} elements but --count is {count}",
                        prefix.len()
                    )));
                }
                let mut state = GreedyState::resume(form, prefix, &self.limits)?;
                let steps = extend_greedy(&mut state, count, &self.limits)?;
                (state.into_set(), steps)
            }
        };
        let elements = set.elements();
        let step_json: Vec<Value> = steps.iter().map(step_to_json).collect();
        let mut text = String::new();
        let width = elements
            .iter()
            .map(|e| e.to_string().len())
            .max()
            .unwrap_or(1);
        let first_step = elements.len() - steps.len();
        for (i, a) in elements.iter().enumerate() {
            match i.checked_sub(first_step).map(|s| &steps[s]) {
                Some(GreedyStep {
                    k, bound: Some(b), ..
                }) => {
                    let _ = writeln!(text, "{:<width$}  # k={k} bound={b}", a.to_string());
                }
                Some(GreedyStep { k, bound: None, .. }) => {
                    let _ = writeln!(text, "{:<width$}  # k={k}", a.to_string());
                }
                None => {
                    let _ = writeln!(text, "{a}");
                }
            }
        }
        Ok(self.emit(
            EXIT_OK,
            json!({
                "form": form,
                "count": elements.len(),
                "elements": strings(elements),
                "steps": step_json,
            }),
            text,
        ))
    }

    fn perturb(
        &self,
        form: &LinearForm,
        targets: Vec<Scalar>,
        eps: Vec<Scalar>,
        primes: Option<Vec<u64>>,
        count: Option<usize>,
    ) -> Result<CommandResult> {
        let count = count.unwrap_or(targets.len());
        let (mode, result) = match &primes {
            None => {
                let spec = PerturbationSpec {
                    targets,
                    tolerances: eps,
                    count,
                };
                ("rational", perturb_rational(form, &spec, &self.limits)?)
            }
            Some(primes) => {
                let spec = PadicSpec {
                    targets: targets.iter().map(to_integer).collect::<Result<_>>()?,
                    primes: primes.clone(),
                    tolerances: eps,
                    count,
                };
                ("padic", perturb_padic(form, &spec, &self.limits)?)
            }
        };
        let (set, steps) = result;
        let mut payload = json!({
            "form": form,
            "mode": mode,
            "elements": strings(set.elements()),
            "steps": steps,
        });
        if let Some(primes) = &primes {
            payload["primes"] = json!(primes[..count]);
        }
        Ok(self.emit(EXIT_OK, payload, perturb_text(&steps)))
    }

    fn growth(
        &self,
        form: &LinearForm,
        elements: Vec<Scalar>,
        ts: &[Scalar],
    ) -> Result<CommandResult> {
        let set = match verify_incremental(form, &elements, &self.limits)? {
            IncrementalVerdict::Sidon(set) => set,
            IncrementalVerdict::Rejected { position, element } => {
                return Ok(self.emit(
                    EXIT_DOMAIN,
                    json!({
                        "form": form,
                        "sidon": false,
                        "reason": "not_sidon",
                        "position": position,
                        "element": element,
                    }),
                    format!("set is not Sidon: element {element} at position {position}\n"),
                ));
            }
        };
        let report = check_growth(form, &set, ts)?;
        let violations = report.violations();
        let code = if violations.is_empty() {
            EXIT_OK
        } else {
            EXIT_DOMAIN
        };
        let mut payload = json!({
            "form": report.form,
            "h": report.form.h(),
            "c": report.form.abs_sum(),
            "samples": report.samples,
            "violations": violations,
        });
        if !violations.is_empty() {
            payload["reason"] = json!("growth_bound_violated");
        }
        let mut text = format!(
            "form: {}  (h = {}, C = {})\n{:>12} {:>8} {:>14} {:>12} {:>6}\n",
            report.form,
            report.form.h(),
            report.form.abs_sum(),
            "t",
            "A(t)",
            "2[Ct]+1",
            "bound",
            "pass"
        );
        for s in &report.samples {
            let _ = writeln!(
                text,
                "{:>12} {:>8} {:>14} {:>12.4} {:>6}",
                s.t.to_string(),
                s.count,
                s.radicand.to_string(),
                s.upper,
                if s.passes { "yes" } else { "NO" }
            );
        }
        Ok(self.emit(code, payload, text))
    }

    fn gn(&self, n: u64) -> Result<CommandResult> {
        let result = g_of_n(n, &self.limits)?;
        let corridor = erdos_moser_corridor(n, result.g);
        let witness = result
            .witness
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        Ok(self.emit(
            EXIT_OK,
            json!({
                "n": n,
                "g": result.g,
                "witness": result.witness,
                "corridor": corridor,
            }),
            format!(
                "g({n}) = {}\nwitness: {witness}\nheuristic corridor [{:.3}, {:.3}]: {}\n",
                result.g,
                corridor.lower,
                corridor.upper,
                if corridor.within { "inside" } else { "outside" }
            ),
        ))
    }

    fn image(&self, form: &LinearForm, elements: &[Scalar]) -> Result<CommandResult> {
        let image = phi_image(form, elements, &self.limits)?;
        let mut text = String::new();
        for value in image.map().keys() {
            let tuples: Vec<String> = image
                .value_tuples(value)
                .iter()
                .map(|t| format!("({})", strings(t).join(",")))
                .collect();
            let _ = writeln!(text, "{value}: {}", tuples.join(" "));
        }
        Ok(self.emit(EXIT_OK, image.to_json(), text))
    }

    fn forbidden(&self, form: &LinearForm, elements: Vec<Scalar>) -> Result<CommandResult> {
        let set = match verify_incremental(form, &elements, &self.limits)? {
            IncrementalVerdict::Sidon(set) => set,
            IncrementalVerdict::Rejected { position, element } => {
                return Ok(self.emit(
                    EXIT_DOMAIN,
                    json!({ "sidon": false, "reason": "not_sidon", "position": position, "element": element }),
                    format!("set is not Sidon: element {element} at position {position}\n"),
                ))
            }
        };
        let values: Vec<Scalar> = forbidden_values(form, set.elements(), &self.limits)?
            .into_iter()
            .collect();
        let text = values.iter().map(|v| format!("{v}\n")).collect();
        Ok(self.emit(
            EXIT_OK,
            json!({ "form": form, "set": strings(set.elements()), "forbidden": strings(&values) }),
            text,
        ))
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Brute => "brute",
        Mode::Incremental => "incremental",
    }
}

fn step_to_json(step: &GreedyStep) -> Value {
    json!({
        "k": step.k,
        "element": step.element,
        "bound": step.bound.as_ref().map(ToString::to_string),
        "within_bound": step.bound.as_ref().map(|b| step.element <= Scalar::from(b.clone())),
    })
}

fn perturb_text(steps: &[PerturbStep]) -> String {
    let width = steps
        .iter()
        .map(|s| s.a_k.to_string().len())
        .max()
        .unwrap_or(1);
    steps
        .iter()
        .map(|s| {
            format!(
                "{:<width$}  # b={} error={} eps={}\n",
                s.a_k.to_string(),
                s.b_k,
                s.achieved_error,
                s.bound
            )
        })
        .collect()
}

/// Convenience for tests and callers holding a verified set.
pub fn set_to_text(set: &SidonSet) -> String {
    set.elements().iter().map(|e| format!("{e}\n")).collect()
}
