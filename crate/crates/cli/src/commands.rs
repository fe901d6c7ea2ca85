//! Subcommand implementations. Each command turns the text of an instance
//! file into a [`Report`]; the binary only handles files and exit codes.

use byzsel::ell1::solve_ell1;
use byzsel::oracle::{
    binomial, brute_deterministic, brute_value, grid_check, level_chain_holds, mwu_game_value, nice_index,
    DEFAULT_MAX_BRUTE_N, MAX_DETERMINISTIC_PAIRS,
};
use byzsel::rounding::{decompose, pad_marginals, SystematicSampler};
use byzsel::waterfill::{deterministic_baseline, solve, sweep};
use byzsel::{adversary_best_response, normalize, value_of_marginals, Instance, Marginals, Scalar};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::input::{parse_instance, parse_marginals};
use crate::render::{one_based, render_set, Render};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputOptions {
    pub json: bool,
    /// Significant digits for float output.
    pub precision: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            json: false,
            precision: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Number of grid levels for the grid check.
    pub resolution: usize,
    /// Self-play rounds for the game-value oracle.
    pub iterations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            resolution: 10_000,
            iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Solve {
        verify: bool,
    },
    Sample {
        count: usize,
        seed: u64,
    },
    Decompose,
    Curve,
    /// Carries the text of the marginals file.
    Eval {
        marginals: String,
    },
    Baseline,
    Verify,
}

/// Command output and the exit code it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub exit_code: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }
}

pub fn load_instance<T: Scalar>(text: &str) -> Result<Instance<T>, CliError> {
    let file = parse_instance::<T>(text)?;
    Ok(normalize(&file.values, file.t, file.l)?)
}

pub fn run<T: Render>(
    command: &Command,
    instance_text: &str,
    out: OutputOptions,
    verify: VerifyOptions,
) -> Result<Report, CliError> {
    let inst = load_instance::<T>(instance_text)?;
    match command {
        Command::Solve { verify: with_checks } => {
            let mut report = cmd_solve(&inst, out);
            if *with_checks {
                let checks = run_checks(&inst, verify);
                report.exit_code = checks_exit_code(&checks);
                report.text = if out.json {
                    let mut doc: Value = serde_json::from_str(&report.text).expect("own output");
                    doc["checks"] = checks_json(&checks);
                    to_json_text(&doc)
                } else {
                    format!("{}{}", report.text, checks_text(&checks))
                };
            }
            Ok(report)
        }
        Command::Sample { count, seed } => cmd_sample(&inst, *count, *seed, out),
        Command::Decompose => cmd_decompose(&inst, out),
        Command::Curve => Ok(cmd_curve(&inst, out)),
        Command::Eval { marginals } => cmd_eval(&inst, marginals, out),
        Command::Baseline => Ok(cmd_baseline(&inst, out)),
        Command::Verify => {
            let checks = run_checks(&inst, verify);
            let text = if out.json {
                to_json_text(&json!({ "checks": checks_json(&checks) }))
            } else {
                checks_text(&checks)
            };
            Ok(Report {
                text,
                exit_code: checks_exit_code(&checks),
            })
        }
    }
}

fn to_json_text(doc: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(doc).expect("serializable"))
}

fn join<T: Render>(xs: &[T], digits: usize) -> String {
    xs.iter().map(|x| x.render(digits)).collect::<Vec<_>>().join(" ")
}

fn json_list<T: Render>(xs: &[T], digits: usize) -> Value {
    Value::Array(xs.iter().map(|x| x.to_json(digits)).collect())
}

fn cmd_solve<T: Render>(inst: &Instance<T>, out: OutputOptions) -> Report {
    let d = out.precision;
    let sol = solve(inst);
    let adv = adversary_best_response(&sol.marginals, inst);
    let marginals = inst.to_original(sol.marginals.as_slice(), T::zero());
    let byz = inst.indices_to_original(&adv.byz_set);
    let dropped = &inst.report().dropped_zeros;
    if out.json {
        let mut doc = Map::new();
        doc.insert("value".into(), sol.value.to_json(d));
        doc.insert("level".into(), sol.level().to_json(d));
        doc.insert("marginals".into(), json_list(&marginals, d));
        doc.insert("byz_set".into(), json!(one_based(&byz)));
        doc.insert("dropped_zeros".into(), json!(one_based(dropped)));
        return Report::ok(to_json_text(&Value::Object(doc)));
    }
    let mut text = format!(
        "value {}\nlevel {}\nmarginals {}\nbyz_set {}\n",
        sol.value.render(d),
        sol.level().render(d),
        join(&marginals, d),
        render_set(&byz)
    );
    if !dropped.is_empty() {
        text.push_str(&format!("dropped_zeros {}\n", render_set(dropped)));
    }
    Report::ok(text)
}

fn padded_solution<T: Scalar>(inst: &Instance<T>) -> Marginals<T> {
    pad_marginals(&solve(inst).marginals, inst)
}

fn cmd_sample<T: Render>(inst: &Instance<T>, count: usize, seed: u64, out: OutputOptions) -> Result<Report, CliError> {
    if count == 0 {
        return Err(CliError::Input("--count must be at least 1".into()));
    }
    let sampler = SystematicSampler::new(&padded_solution(inst), inst.ell())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<Vec<usize>> = (0..count)
        .map(|_| inst.indices_to_original(sampler.sample(&mut rng).indices()))
        .collect();
    if out.json {
        let samples: Vec<Vec<usize>> = sets.iter().map(|s| one_based(s)).collect();
        return Ok(Report::ok(to_json_text(&json!({ "seed": seed, "samples": samples }))));
    }
    let mut text = String::new();
    for s in &sets {
        text.push_str(&render_set(s));
        text.push('\n');
    }
    Ok(Report::ok(text))
}

fn cmd_decompose<T: Render>(inst: &Instance<T>, out: OutputOptions) -> Result<Report, CliError> {
    let d = out.precision;
    let dist = decompose(&padded_solution(inst), inst)?;
    let atoms: Vec<(T, Vec<usize>)> = dist
        .atoms
        .iter()
        .map(|(set, w)| (w.clone(), inst.indices_to_original(set.indices())))
        .collect();
    if out.json {
        let atoms: Vec<Value> = atoms
            .iter()
            .map(|(w, s)| json!({ "weight": w.to_json(d), "set": one_based(s) }))
            .collect();
        return Ok(Report::ok(to_json_text(&json!({ "atoms": atoms }))));
    }
    let mut text = String::new();
    for (w, s) in &atoms {
        text.push_str(&format!("{} {}\n", w.render(d), render_set(s)));
    }
    Ok(Report::ok(text))
}

fn cmd_curve<T: Render>(inst: &Instance<T>, out: OutputOptions) -> Report {
    let d = out.precision;
    let bps = sweep(inst);
    if out.json {
        let rows: Vec<Value> = bps
            .iter()
            .map(|b| json!({ "E": b.level.to_json(d), "value": b.value.to_json(d), "k": b.k, "i": b.i }))
            .collect();
        return Report::ok(to_json_text(&json!({ "breakpoints": rows })));
    }
    let mut text = String::from("# E value k i\n");
    for b in &bps {
        text.push_str(&format!(
            "{} {} {} {}\n",
            b.level.render(d),
            b.value.render(d),
            b.k,
            b.i
        ));
    }
    Report::ok(text)
}

fn cmd_eval<T: Render>(inst: &Instance<T>, marginals_text: &str, out: OutputOptions) -> Result<Report, CliError> {
    let d = out.precision;
    let raw = parse_marginals::<T>(marginals_text)?;
    let p = Marginals::from_original(&raw, inst)?;
    let adv = adversary_best_response(&p, inst);
    let byz = inst.indices_to_original(&adv.byz_set);
    if out.json {
        let doc = json!({ "value": adv.inflicted_value.to_json(d), "byz_set": one_based(&byz) });
        return Ok(Report::ok(to_json_text(&doc)));
    }
    Ok(Report::ok(format!(
        "value {}\nbyz_set {}\n",
        adv.inflicted_value.render(d),
        render_set(&byz)
    )))
}

fn cmd_baseline<T: Render>(inst: &Instance<T>, out: OutputOptions) -> Report {
    let d = out.precision;
    let (set, value) = deterministic_baseline(inst);
    let set = inst.indices_to_original(set.indices());
    if out.json {
        return Report::ok(to_json_text(
            &json!({ "set": one_based(&set), "value": value.to_json(d) }),
        ));
    }
    Report::ok(format!("set {}\nvalue {}\n", render_set(&set), value.render(d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn skip(name: &'static str, detail: String) -> Check {
    Check {
        name,
        status: Status::Skip,
        detail,
    }
}

/// Runs every oracle that fits the instance size against the solver.
pub fn run_checks<T: Scalar>(inst: &Instance<T>, opts: VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let sol = solve(inst);
    let value = sol.value.clone();
    let n = inst.n();

    checks.push(match nice_index(&sol.marginals, inst, sol.level()) {
        Ok(i) => check(
            "nice-structure",
            level_chain_holds(&sol.marginals, inst),
            format!("saturated prefix {i}"),
        ),
        Err(e) => check("nice-structure", false, e),
    });

    let (_, base) = deterministic_baseline(inst);
    checks.push(check(
        "beats-baseline",
        base.approx_le(&value),
        format!("solve {value} vs baseline {base}"),
    ));

    if n <= DEFAULT_MAX_BRUTE_N {
        match brute_value(&sol.marginals, inst) {
            Ok(b) => checks.push(check(
                "adversary-enumeration",
                b.approx_eq(&value),
                format!("{b} vs {value}"),
            )),
            Err(e) => checks.push(skip("adversary-enumeration", e.to_string())),
        }
    } else {
        checks.push(skip(
            "adversary-enumeration",
            format!("n = {n} > {DEFAULT_MAX_BRUTE_N}"),
        ));
    }

    let pairs = binomial(n, inst.ell()).saturating_mul(binomial(n, inst.t()));
    if pairs <= MAX_DETERMINISTIC_PAIRS {
        match brute_deterministic(inst) {
            Ok(b) => checks.push(check(
                "deterministic-enumeration",
                b.approx_eq(&base),
                format!("{b} vs {base}"),
            )),
            Err(e) => checks.push(skip("deterministic-enumeration", e.to_string())),
        }
    } else {
        checks.push(skip("deterministic-enumeration", format!("{pairs} set pairs")));
    }

    if inst.ell() == 1 {
        match solve_ell1(inst) {
            Ok(c) => checks.push(check(
                "single-box-closed-form",
                c.value.approx_eq(&value),
                format!("{} vs {value}", c.value),
            )),
            Err(e) => checks.push(check("single-box-closed-form", false, e.to_string())),
        }
    }

    // Dense self-play costs rows * cols per round.
    if pairs <= 200_000 {
        match mwu_game_value(inst, opts.iterations) {
            Ok(est) => {
                let v = value.to_f64();
                let slack = 1e-9 * est.payoff_range.max(1.0);
                let ok = est.lower - slack <= v && v <= est.upper + slack;
                checks.push(check(
                    "game-value",
                    ok,
                    format!("solve {v} in [{}, {}] (+/- {})", est.lower, est.upper, est.error),
                ));
            }
            Err(e) => checks.push(skip("game-value", e.to_string())),
        }
    } else {
        checks.push(skip("game-value", format!("{pairs} matrix entries")));
    }

    match grid_check(inst, opts.resolution) {
        Ok(g) => checks.push(check(
            "grid-domination",
            g.approx_le(&value),
            format!("grid {g} vs solve {value}"),
        )),
        Err(e) => checks.push(check("grid-domination", false, e.to_string())),
    }

    let padded = pad_marginals(&sol.marginals, inst);
    let padded_value = value_of_marginals(&padded, inst);
    checks.push(check(
        "padding-monotone",
        value.approx_le(&padded_value),
        format!("{padded_value} vs {value}"),
    ));
    match decompose(&padded, inst) {
        Ok(dist) => {
            let induced = dist.induced_marginals(n);
            let exact = induced.iter().zip(padded.as_slice()).all(|(a, b)| a.approx_eq(b));
            let ok = exact && dist.atoms.len() <= n && dist.total_weight().approx_eq(&T::one());
            checks.push(check("decomposition", ok, format!("{} atoms", dist.atoms.len())));
        }
        Err(e) => checks.push(check("decomposition", false, e.to_string())),
    }
    checks
}

fn checks_exit_code(checks: &[Check]) -> i32 {
    if checks.iter().any(|c| c.status == Status::Fail) {
        1
    } else {
        0
    }
}

fn checks_text(checks: &[Check]) -> String {
    let mut text = String::new();
    for c in checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        text.push_str(&format!("{tag} {} {}\n", c.name, c.detail));
    }
    text
}

fn checks_json(checks: &[Check]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                let status = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skip => "skip",
                };
                json!({ "name": c.name, "status": status, "detail": c.detail })
            })
            .collect(),
    )
}
