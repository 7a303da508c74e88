//! The `workbench` command line: argument parsing, JSON rendering and run manifests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qoper_algebra::json::{ratfunc_to_json, series_to_json};
use qoper_core::dell::{
    degeneration_check, dell_commutativity_certificate_with, CertificateMethod, DellModel, ThetaVariant,
};
use qoper_core::macdonald::{eigencheck, macdonald_oracle, LocusConvention, Partition};
use qoper_core::numeric::C64;
use qoper_core::qoper::verify_trs_point;
use qoper_core::trs::{check_commutativity, duality_solve, sample_duality_data, DualitySolution, SolveOptions, TrsFrame};
use qoper_core::vertex::{eigen_residual, truncation_check, vertex_coefficients, CandidateOutcome, FlagFixedPoint};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "workbench", version, about = "Checks for tRS, q-opers, Macdonald truncations and the DELL tier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON result here; the manifest goes to `PATH.manifest.json`.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
    /// Manifest path (default `workbench.manifest.json`, or next to `--json-out`).
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for floating-point checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Trigonometric Ruijsenaars-Schneider model.
    #[command(subcommand)]
    Trs(TrsCommand),
    /// q-oper pipeline on duality solutions.
    #[command(subcommand)]
    Qoper(QoperCommand),
    /// Macdonald polynomial and its eigenvalues.
    Macdonald(MacdonaldArgs),
    /// Vertex series, truncation and eigen residual.
    Vertex(VertexArgs),
    /// Double-elliptic tier.
    #[command(subcommand)]
    Dell(DellCommand),
}

#[derive(Subcommand, Debug)]
pub enum TrsCommand {
    /// Symbolic commutators of all Hamiltonian pairs.
    Commute {
        #[arg(long)]
        n: usize,
    },
    /// Classical points with prescribed Hamiltonian values.
    Duality(PointArgs),
}

#[derive(Args, Debug)]
pub struct PointArgs {
    /// Number of particles when the data is sampled from `--seed`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Twists, comma separated complex numbers like `1.2,0.3-0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Vec<String>,
    /// Singularities.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum QoperCommand {
    /// Solve the duality and check D ~ Lambda, QQ and Bethe on every solution.
    Verify {
        /// Oper rank `r`; the model has `r + 1` particles.
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        point: PointArgs,
    },
}

#[derive(Args, Debug)]
pub struct MacdonaldArgs {
    /// Partition, e.g. `2,1`.
    #[arg(long)]
    pub lambda: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct VertexArgs {
    #[command(subcommand)]
    pub command: Option<VertexCommand>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub cap: Option<u32>,
    /// Evaluate on the truncation locus of this partition.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Locus direction.
    #[arg(long, value_enum, default_value_t = Locus::Resolved)]
    pub locus: Locus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Locus {
    Resolved,
    Printed,
}

#[derive(Subcommand, Debug)]
pub enum VertexCommand {
    /// Residual of the electric Hamiltonians on the vertex series.
    Eigencheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cap: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum DellCommand {
    /// Order-by-order commutativity of the DELL Hamiltonians.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p_order: u32,
        #[arg(long)]
        w_order: u32,
        #[arg(long, value_enum, default_value_t = Theta::Full)]
        theta: Theta,
        #[arg(long, value_enum, default_value_t = Method::Pointwise)]
        method: Method,
        /// Random orbits for the pointwise method.
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// DELL -> eRS -> tRS.
    Degenerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p_order: u32,
        #[arg(long, default_value_t = 0)]
        w_order: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Theta {
    Full,
    Corrupted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Pointwise,
    Symbolic,
}

/// A finished run: what was asked, what came out, and whether the check passed.
#[derive(Debug)]
pub struct Outcome {
    pub subcommand: String,
    pub params: Value,
    pub result: Value,
    pub passed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qoper_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn c64_json(z: C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn parse_complex(s: &str) -> Result<C64, CliError> {
    s.trim().parse::<C64>().map_err(|_| usage(format!("not a complex number: {s:?}")))
}

fn parse_partition(s: &str) -> Result<Partition, CliError> {
    s.parse().map_err(|e: qoper_core::Error| usage(e.to_string()))
}

/// Explicit `(xi, a, q)` or, when all are absent, sampled data for `n` particles.
fn point_data(p: &PointArgs, n: Option<usize>, seed: u64) -> Result<(Vec<C64>, Vec<C64>, C64), CliError> {
    if p.xi.is_empty() && p.a.is_empty() && p.q.is_none() {
        let n = n.or(p.n).ok_or_else(|| usage("give --xi, --a and --q, or --n to sample them"))?;
        if n == 0 {
            return Err(usage("--n must be positive"));
        }
        let d = sample_duality_data(&mut ChaCha8Rng::seed_from_u64(seed), n);
        return Ok((d.xi, d.a, d.q));
    }
    let xi = p.xi.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>, _>>()?;
    let a = p.a.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>, _>>()?;
    let q = parse_complex(p.q.as_deref().ok_or_else(|| usage("missing --q"))?)?;
    if xi.is_empty() || xi.len() != a.len() {
        return Err(usage("--xi and --a need the same positive length"));
    }
    if let Some(n) = n.or(p.n) {
        if n != xi.len() {
            return Err(usage(format!("expected {n} values in --xi and --a")));
        }
    }
    Ok((xi, a, q))
}

fn solution_json(sol: &DualitySolution) -> Value {
    let points: Vec<Value> = sol
        .points
        .iter()
        .zip(&sol.residuals)
        .map(|(p, r)| json!({"momenta": p.momenta.iter().map(|&z| c64_json(z)).collect::<Vec<_>>(), "residual": r}))
        .collect();
    json!({
        "expected": sol.expected,
        "found": sol.count(),
        "paths_converged": sol.paths_converged,
        "fallback_used": sol.fallback_used,
        "max_residual": sol.max_residual(),
        "points": points,
    })
}

fn data_json(xi: &[C64], a: &[C64], q: C64) -> Value {
    json!({
        "xi": xi.iter().map(|&z| c64_json(z)).collect::<Vec<_>>(),
        "a": a.iter().map(|&z| c64_json(z)).collect::<Vec<_>>(),
        "q": c64_json(q),
    })
}

fn trs(cmd: &TrsCommand, cli: &Cli) -> Result<Outcome, CliError> {
    match cmd {
        TrsCommand::Commute { n } => {
            if *n == 0 {
                return Err(usage("--n must be positive"));
            }
            let r = check_commutativity(&TrsFrame::generic(*n, "x", "t"))?;
            Ok(Outcome {
                subcommand: "trs commute".into(),
                params: json!({"n": n}),
                result: json!({"pairs_checked": r.pairs_checked, "all_zero": r.all_zero()}),
                passed: r.all_zero(),
            })
        }
        TrsCommand::Duality(p) => {
            let (xi, a, q) = point_data(p, None, cli.seed)?;
            let tol = cli.tol.unwrap_or(1e-10);
            let opts = SolveOptions { tol, seed: cli.seed, ..Default::default() };
            let sol = duality_solve(&xi, &a, q, &opts)?;
            let passed = sol.is_complete() && sol.max_residual() < tol;
            let mut result = solution_json(&sol);
            result["tol"] = json!(tol);
            Ok(Outcome {
                subcommand: "trs duality".into(),
                params: data_json(&xi, &a, q),
                result,
                passed,
            })
        }
    }
}

fn qoper(cmd: &QoperCommand, cli: &Cli) -> Result<Outcome, CliError> {
    let QoperCommand::Verify { rank, point } = cmd;
    let (xi, a, q) = point_data(point, Some(rank + 1), cli.seed)?;
    let (d_tol, qq_tol, bethe_tol) = match cli.tol {
        Some(t) => (t, t, t),
        None => (1e-9, 1e-10, 1e-9),
    };
    let opts = SolveOptions { seed: cli.seed, ..Default::default() };
    let sol = duality_solve(&xi, &a, q, &opts)?;
    let mut checks = vec![];
    let mut passed = sol.is_complete();
    for p in &sol.points {
        let v = verify_trs_point(&xi, &p.momenta, &a, q)?;
        passed &= v.d_check < d_tol && v.max_qq() < qq_tol && v.max_bethe() < bethe_tol;
        checks.push(json!({
            "momenta": p.momenta.iter().map(|&z| c64_json(z)).collect::<Vec<_>>(),
            "D_check": {"value": v.d_check, "tol": d_tol},
            "QQ_residuals": {"values": v.qq_residuals, "tol": qq_tol},
            "Bethe_residuals": {"values": v.bethe_residuals, "tol": bethe_tol},
            "beta_constants": v.beta_constants.iter().map(|&z| c64_json(z)).collect::<Vec<_>>(),
        }));
    }
    let mut params = data_json(&xi, &a, q);
    params["rank"] = json!(rank);
    Ok(Outcome {
        subcommand: "qoper verify".into(),
        params,
        result: json!({"solutions": sol.count(), "expected": sol.expected, "checks": checks}),
        passed,
    })
}

fn macdonald(args: &MacdonaldArgs) -> Result<Outcome, CliError> {
    let lambda = parse_partition(&args.lambda)?;
    if args.n == 0 || lambda.length() > args.n {
        return Err(usage("--lambda has more parts than --n"));
    }
    let p = macdonald_oracle(&Partition::padded(lambda.parts(), args.n)?, args.n)?;
    let r = eigencheck(&lambda, args.n)?;
    let coeffs: serde_json::Map<String, Value> = p
        .coeffs()
        .iter()
        .map(|(mu, c)| (mu.to_string(), json!({"value": ratfunc_to_json(c), "text": c.to_string()})))
        .collect();
    let eigenvalues: Vec<Value> = r
        .eigenvalues
        .iter()
        .map(|e| json!({"value": ratfunc_to_json(e), "text": e.to_string()}))
        .collect();
    let passed = r.simultaneous() && r.eigenvalues_match_formula();
    Ok(Outcome {
        subcommand: "macdonald".into(),
        params: json!({"lambda": lambda.parts(), "n": args.n}),
        result: json!({
            "basis": "monomial",
            "coeffs": coeffs,
            "eigenvalues": eigenvalues,
            "simultaneous_eigenvector": r.simultaneous(),
            "eigenvalues_match_formula": r.eigenvalues_match_formula(),
            "top_eigenvalue_is_q_power": r.top_eigenvalue_is_q_power(),
            "locus_matches": {
                "resolved": r.locus_for(LocusConvention::resolved()).map(|l| l.all()),
                "printed": r.locus_for(LocusConvention::Paper).map(|l| l.all()),
            },
        }),
        passed,
    })
}

fn outcome_json(o: &CandidateOutcome) -> Value {
    match o {
        CandidateOutcome::NoTermination(d) => json!({"status": "no_termination", "degrees": d}),
        CandidateOutcome::Failed(e) => json!({"status": "failed", "error": e.to_string()}),
        CandidateOutcome::Terminates { polynomial, matches_oracle, .. } => {
            json!({"status": "terminates", "symmetric": polynomial.is_some(), "matches_oracle": matches_oracle})
        }
    }
}

fn vertex(args: &VertexArgs) -> Result<Outcome, CliError> {
    if let Some(VertexCommand::Eigencheck { n, cap }) = &args.command {
        let r = eigen_residual(*n, *cap)?;
        let fit = r.fit.as_ref().map(|f| {
            json!({
                "sigma": f.sigma,
                "multipliers": f.multipliers.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "kappas": f.kappas.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            })
        });
        return Ok(Outcome {
            subcommand: "vertex eigencheck".into(),
            params: json!({"n": n, "cap": cap}),
            result: json!({
                "fixed_point": r.fixed_point.to_string(),
                "vanishes": r.vanishes(),
                "fit": fit,
                "lowest_nonzero_orders": r.lowest_orders(),
                "rejected": r.rejected,
            }),
            passed: r.vanishes(),
        });
    }
    let n = args.n.ok_or_else(|| usage("missing --n"))?;
    let cap = args.cap.ok_or_else(|| usage("missing --cap"))?;
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    match &args.lambda {
        None => {
            let fp = FlagFixedPoint::identity(n);
            let s = vertex_coefficients(&fp, &vec![cap; n - 1])?;
            Ok(Outcome {
                subcommand: "vertex".into(),
                params: json!({"n": n, "cap": cap}),
                result: json!({"fixed_point": fp.to_string(), "series": series_to_json(&s.series)}),
                passed: true,
            })
        }
        Some(l) => {
            let lambda = parse_partition(l)?;
            let conv = match args.locus {
                Locus::Resolved => LocusConvention::resolved(),
                Locus::Printed => LocusConvention::Paper,
            };
            let params = json!({"n": n, "cap": cap, "lambda": lambda.parts(), "locus": format!("{:?}", args.locus).to_lowercase()});
            match truncation_check(&lambda, n, cap, conv) {
                Ok(r) => {
                    let candidates: Vec<Value> = r
                        .candidates
                        .iter()
                        .map(|c| json!({"fixed_point": c.fixed_point.to_string(), "outcome": outcome_json(&c.outcome)}))
                        .collect();
                    Ok(Outcome {
                        subcommand: "vertex".into(),
                        params,
                        result: json!({
                            "fixed_point": r.fixed_point.to_string(),
                            "degree_bound": r.degree_bound,
                            "terminates": true,
                            "symmetric": r.symmetric,
                            "matches_oracle": r.matches_oracle,
                            "constant": ratfunc_to_json(&r.constant),
                            "candidates": candidates,
                        }),
                        passed: r.matches_oracle,
                    })
                }
                Err(e @ qoper_core::Error::NoTerminatingFixedPoint(_)) => Ok(Outcome {
                    subcommand: "vertex".into(),
                    params,
                    result: json!({"terminates": false, "matches_oracle": false, "error": e.to_string()}),
                    passed: false,
                }),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn dell(cmd: &DellCommand, cli: &Cli) -> Result<Outcome, CliError> {
    match cmd {
        DellCommand::Certify { n, p_order, w_order, theta, method, points } => {
            let theta_v = match theta {
                Theta::Full => ThetaVariant::Full,
                Theta::Corrupted => ThetaVariant::Corrupted,
            };
            let m = match method {
                Method::Symbolic => CertificateMethod::Symbolic,
                Method::Pointwise => CertificateMethod::Pointwise { points: *points, seed: cli.seed },
            };
            let model = DellModel::new(*n, *p_order, *w_order).map_err(|e| usage(e.to_string()))?.with_theta(theta_v);
            let t = Instant::now();
            let c = dell_commutativity_certificate_with(&model, m)?;
            let pairs: Vec<Value> = c
                .pairs
                .iter()
                .map(|p| json!({"a": p.a, "b": p.b, "zero": p.passed(), "failing_orders": p.failing_orders.iter().map(|o| json!({"p": o[0], "w": o[1]})).collect::<Vec<_>>()}))
                .collect();
            let best = c.max_verified_order();
            Ok(Outcome {
                subcommand: "dell certify".into(),
                params: json!({
                    "n": n, "p_order": p_order, "w_order": w_order,
                    "theta": format!("{theta:?}").to_lowercase(),
                    "method": format!("{method:?}").to_lowercase(),
                    "points": points,
                }),
                result: json!({
                    "pairs": pairs,
                    "max_verified_order": {"p": best[0], "w": best[1]},
                    "first_failure": c.first_failure().map(|o| json!({"p": o[0], "w": o[1]})),
                    "wall_time": t.elapsed().as_secs_f64(),
                }),
                passed: c.passed(),
            })
        }
        DellCommand::Degenerate { n, p_order, w_order } => {
            if *n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            let r = degeneration_check(*n, *p_order, *w_order)?;
            let tier = |ms: &[qoper_core::dell::TierMatch]| -> Vec<Value> {
                ms.iter()
                    .map(|m| {
                        json!({
                            "r": m.r,
                            "matches": m.matches,
                            "factor": m.factor.as_ref().map(ratfunc_to_json),
                            "factor_text": m.factor.as_ref().map(|f| f.to_string()),
                        })
                    })
                    .collect()
            };
            Ok(Outcome {
                subcommand: "dell degenerate".into(),
                params: json!({"n": n, "p_order": p_order, "w_order": w_order}),
                result: json!({
                    "dell_to_ers": tier(&r.dell_to_ers),
                    "matches_without_rescaling": r.matches_without_rescaling,
                    "ers_to_trs": tier(&r.ers_to_trs),
                    "hbar_one_consistent": r.hbar_one_consistent,
                    "passed": r.passed(),
                }),
                passed: r.passed(),
            })
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Trs(c) => trs(c, cli),
        Command::Qoper(c) => qoper(c, cli),
        Command::Macdonald(a) => macdonald(a),
        Command::Vertex(a) => vertex(a),
        Command::Dell(c) => dell(c, cli),
    }
}

/// Canonical form: sorted keys, no whitespace, `wall_time` dropped.
pub fn canonical(v: &Value) -> String {
    fn strip(v: &Value) -> Value {
        match v {
            Value::Object(m) => Value::Object(m.iter().filter(|(k, _)| *k != "wall_time").map(|(k, v)| (k.clone(), strip(v))).collect()),
            Value::Array(a) => Value::Array(a.iter().map(strip).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&strip(v)).expect("JSON values serialize")
}

pub fn digest(v: &Value) -> String {
    let h = Sha256::digest(canonical(v).as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest(o: &Outcome, seed: u64, tol: Option<f64>, wall_time: f64) -> Value {
    json!({
        "subcommand": o.subcommand,
        "params": o.params,
        "seed": seed,
        "tol": tol,
        "version": VERSION,
        "wall_time": wall_time,
        "passed": o.passed,
        "sha256": digest(&o.result),
    })
}

fn manifest_path(cli: &Cli) -> PathBuf {
    match (&cli.manifest, &cli.json_out) {
        (Some(p), _) => p.clone(),
        (None, Some(out)) => {
            let mut s = out.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        (None, None) => PathBuf::from("workbench.manifest.json"),
    }
}

fn write(path: &Path, v: &Value) -> std::io::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n")
}

/// Runs a parsed command line, prints the result and writes the files. Returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let start = Instant::now();
    match execute(cli) {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.result).expect("JSON values serialize");
            println!("{text}");
            let m = manifest(&o, cli.seed, cli.tol, start.elapsed().as_secs_f64());
            let written = cli
                .json_out
                .as_ref()
                .map_or(Ok(()), |p| write(p, &o.result))
                .and_then(|_| write(&manifest_path(cli), &m));
            if let Err(e) = written {
                eprintln!("workbench: cannot write output: {e}");
                return 1;
            }
            i32::from(!o.passed)
        }
        Err(CliError::Usage(msg)) => {
            use clap::CommandFactory;
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            2
        }
        Err(e) => {
            let err = json!({"error": {"message": e.to_string(), "detail": format!("{e:?}")}});
            println!("{}", serde_json::to_string_pretty(&err).expect("JSON values serialize"));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_sorts_keys_and_drops_wall_time() {
        let v = json!({"b": 1, "a": {"wall_time": 3.0, "z": [1, 2]}, "wall_time": 1.5});
        assert_eq!(canonical(&v), r#"{"a":{"z":[1,2]},"b":1}"#);
        let w = json!({"a": {"z": [1, 2]}, "b": 1, "wall_time": 9.0});
        assert_eq!(digest(&v), digest(&w));
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5-2i").unwrap(), C64::new(0.5, -2.0));
        assert_eq!(parse_complex(" 3 ").unwrap(), C64::new(3.0, 0.0));
        assert!(parse_complex("1+").is_err());
    }
}
