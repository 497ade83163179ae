//! One handler per subcommand. Every handler returns whether the command's
//! asserted properties held; computational commands always report true and
//! signal problems through errors instead.

use crate::render::{emit, f17, f17_str, rat_str, region_str, stability_str, to_json_text, Csv};
use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use num::rational::BigRational;
use serde::Serialize;
use serde_json::value::RawValue;
use std::path::PathBuf;

use reliq::coeffs::{coeffs_countvector, coeffs_enumerate, CoeffTable};
use reliq::dynamics::{
    den_fixed_points, enand_closed_form, enand_map, enand_verify, field_grid, MapKind, MapSpec,
};
use reliq::gates::{builtin_gate, pa_decompose, snp_restriction_check, GateKind, GateTable};
use reliq::montecarlo::{vn_experiment, Construction, ExperimentConfig};
use reliq::gates::Symbol;
use reliq::snp::{mul_distinguishability, prop_add, prop_perm, snp_output_check};
use reliq::thresholds::{
    saddle_node_eps, scalar_fixed_points, threshold_report, transcritical_eps,
};

// ---------------------------------------------------------------- coeffs

#[derive(Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub k: usize,
    /// enumerate | countvector | closed | both
    #[arg(long, default_value = "both")]
    pub method: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CoeffsPayload {
    schema_version: &'static str,
    q: usize,
    k: usize,
    method: String,
    coefficients: Vec<String>,
    /// Present only for --method both: exact agreement of the two routes.
    #[serde(skip_serializing_if = "Option::is_none")]
    routes_agree: Option<bool>,
}

pub fn coeffs(args: &CoeffsArgs) -> Result<bool> {
    let (table, agree) = match args.method.as_str() {
        "enumerate" => (coeffs_enumerate(args.q, args.k)?, None),
        "countvector" => (coeffs_countvector(args.q, args.k)?, None),
        "closed" => (CoeffTable::closed_form_k3(args.q)?, None),
        "both" => {
            let a = coeffs_enumerate(args.q, args.k)?;
            let b = coeffs_countvector(args.q, args.k)?;
            let agree = a.coeffs() == b.coeffs();
            (a, Some(agree))
        }
        other => anyhow::bail!(reliq::Error::invalid(format!(
            "unknown method '{other}', expected enumerate | countvector | closed | both"
        ))),
    };
    let payload = CoeffsPayload {
        schema_version: "reliq/coeffs/1",
        q: table.q(),
        k: table.k(),
        method: args.method.clone(),
        coefficients: table.coeffs().iter().map(rat_str).collect(),
        routes_agree: agree,
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(agree.unwrap_or(true))
}

// ------------------------------------------------------------- threshold

#[derive(Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ThresholdPayload {
    schema_version: &'static str,
    q: usize,
    k: usize,
    c_coefficient: String,
    eps_transcritical: String,
    eps_transcritical_float: Box<RawValue>,
    /// Exact value, known in closed form at k = 3 only.
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_saddle: Option<String>,
    eps_saddle_float: Box<RawValue>,
}

pub fn threshold(args: &ThresholdArgs) -> Result<bool> {
    let report = threshold_report(args.q, args.k)?;
    let payload = ThresholdPayload {
        schema_version: "reliq/threshold/1",
        q: args.q,
        k: args.k,
        c_coefficient: rat_str(&report.c_coefficient),
        eps_transcritical: rat_str(&report.transcritical),
        eps_transcritical_float: f17(rational_to_f64(&report.transcritical)),
        eps_saddle: report.saddle_node.exact_k3.as_ref().map(rat_str),
        eps_saddle_float: f17(report.saddle_node.eps),
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(true)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    reliq::weight::Weight::to_f64(r)
}

// ------------------------------------------------------------------ scan

#[derive(Subcommand)]
pub enum ScanCommand {
    /// Both bifurcation thresholds over a (q, k) grid; fig1.csv schema.
    Thresholds(ScanThresholdsArgs),
    /// Scalar fixed points over a noise grid at fixed (q, k); fig2.csv schema.
    Bifurcation(ScanBifurcationArgs),
}

#[derive(Args)]
pub struct ScanThresholdsArgs {
    #[arg(long, default_value_t = 2)]
    pub q_min: usize,
    #[arg(long, default_value_t = 7)]
    pub q_max: usize,
    /// Comma-separated odd fan-ins.
    #[arg(long, default_value = "3,5,7", value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScanBifurcationArgs {
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.22)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 0.002)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn scan(cmd: &ScanCommand) -> Result<bool> {
    match cmd {
        ScanCommand::Thresholds(args) => {
            if args.q_min < 2 || args.q_min > args.q_max {
                anyhow::bail!(reliq::Error::invalid("need 2 <= q-min <= q-max"));
            }
            let mut csv = Csv::new("reliq/fig1/1", "q,k,eps_transcritical,eps_saddle");
            for q in args.q_min..=args.q_max {
                for &k in &args.ks {
                    let coeffs = coeffs_countvector(q, k)?;
                    let trans = transcritical_eps(&coeffs)?;
                    let saddle = saddle_node_eps(&coeffs)?;
                    csv.row(&[
                        q.to_string(),
                        k.to_string(),
                        f17_str(rational_to_f64(&trans)),
                        f17_str(saddle.eps),
                    ]);
                }
            }
            emit(&args.out, &csv.finish())?;
        }
        ScanCommand::Bifurcation(args) => {
            if !(args.step > 0.0) || !(args.eps_max > 0.0) {
                anyhow::bail!(reliq::Error::invalid("step and eps-max must be positive"));
            }
            let coeffs = coeffs_countvector(args.q, args.k)?;
            let mut csv = Csv::new("reliq/fig2/1", "eps,a,stability");
            let steps = (args.eps_max / args.step).floor() as usize;
            for i in 0..=steps {
                let eps = i as f64 * args.step;
                for fp in scalar_fixed_points(&coeffs, eps)? {
                    csv.row(&[
                        f17_str(eps),
                        f17_str(fp.a),
                        stability_str(fp.stability).to_string(),
                    ]);
                }
            }
            emit(&args.out, &csv.finish())?;
        }
    }
    Ok(true)
}

// ---------------------------------------------------------- fixed-points

#[derive(Args)]
pub struct FixedPointsArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScalarFixedPointRow {
    a: Box<RawValue>,
    derivative: Box<RawValue>,
    stability: &'static str,
    /// "num/den" when the root is the balanced state, null otherwise.
    balance_exact: Option<String>,
}

#[derive(Serialize)]
struct FixedPointsPayload {
    schema_version: &'static str,
    q: usize,
    k: usize,
    eps: Box<RawValue>,
    fixed_points: Vec<ScalarFixedPointRow>,
}

pub fn fixed_points(args: &FixedPointsArgs) -> Result<bool> {
    let coeffs = coeffs_countvector(args.q, args.k)?;
    let rows = scalar_fixed_points(&coeffs, args.eps)?
        .into_iter()
        .map(|fp| ScalarFixedPointRow {
            a: f17(fp.a),
            derivative: f17(fp.derivative),
            stability: stability_str(fp.stability),
            balance_exact: fp.exact.as_ref().map(rat_str),
        })
        .collect();
    let payload = FixedPointsPayload {
        schema_version: "reliq/fixed-points/1",
        q: args.q,
        k: args.k,
        eps: f17(args.eps),
        fixed_points: rows,
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(true)
}

// ----------------------------------------------------------------- field

#[derive(Args)]
pub struct FieldArgs {
    /// maj | den | enand
    #[arg(long)]
    pub map: String,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 24)]
    pub resolution: usize,
    /// For enand: which logical fixed point the held operand sits at.
    #[arg(long, default_value_t = 1)]
    pub partner: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn field(args: &FieldArgs) -> Result<bool> {
    let kind = match args.map.as_str() {
        "maj" => MapKind::Maj {
            q: args.q,
            k: args.k,
        },
        "den" => MapKind::Den,
        "enand" => {
            let partner = den_fixed_points(args.eps)?
                .into_iter()
                .find(|fp| {
                    fp.region == reliq::dynamics::FixedPointRegion::Symbol(args.partner)
                })
                .ok_or_else(|| {
                    reliq::Error::invalid(format!(
                        "no logical fixed point for symbol {} at eps {}",
                        args.partner, args.eps
                    ))
                })?;
            MapKind::Enand {
                partner: partner.dist,
            }
        }
        other => anyhow::bail!(reliq::Error::invalid(format!(
            "unknown map '{other}', expected maj | den | enand"
        ))),
    };
    let spec = MapSpec {
        kind,
        eps: args.eps,
    };
    let mut csv = Csv::new("reliq/field/1", "x,y,dx,dy");
    for row in field_grid(&spec, args.resolution)? {
        csv.row(&[
            f17_str(row.x),
            f17_str(row.y),
            f17_str(row.dx),
            f17_str(row.dy),
        ]);
    }
    emit(&args.out, &csv.finish())?;
    Ok(true)
}

// ------------------------------------------------------ den-fixed-points

#[derive(Args)]
pub struct DenFixedPointsArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DenFixedPointRow {
    weights: Vec<Box<RawValue>>,
    region: String,
    stability: &'static str,
    spectral_radius: Box<RawValue>,
}

#[derive(Serialize)]
struct DenFixedPointsPayload {
    schema_version: &'static str,
    eps: Box<RawValue>,
    fixed_points: Vec<DenFixedPointRow>,
}

pub fn den_fixed_points_cmd(args: &DenFixedPointsArgs) -> Result<bool> {
    let rows = den_fixed_points(args.eps)?
        .into_iter()
        .map(|fp| DenFixedPointRow {
            weights: fp.dist.weights().iter().map(|w| f17(*w)).collect(),
            region: region_str(&fp.region),
            stability: stability_str(fp.stability),
            spectral_radius: f17(fp.spectral_radius),
        })
        .collect();
    let payload = DenFixedPointsPayload {
        schema_version: "reliq/den-fixed-points/1",
        eps: f17(args.eps),
        fixed_points: rows,
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(true)
}

// ---------------------------------------------------------- verify-enand

#[derive(Args)]
pub struct VerifyEnandArgs {
    /// Check a single noise rate instead of the default grid.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0.166)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 0.001)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyEnandFailure {
    eps: Box<RawValue>,
    reason: String,
}

#[derive(Serialize)]
struct VerifyEnandPayload {
    schema_version: &'static str,
    checked: usize,
    all_ok: bool,
    worst_margin: Box<RawValue>,
    failures: Vec<VerifyEnandFailure>,
}

pub fn verify_enand(args: &VerifyEnandArgs) -> Result<bool> {
    let grid: Vec<f64> = match args.eps {
        Some(e) => vec![e],
        None => {
            if !(args.step > 0.0) {
                anyhow::bail!(reliq::Error::invalid("step must be positive"));
            }
            let n = (args.eps_max / args.step).floor() as usize;
            (1..=n).map(|i| i as f64 * args.step).collect()
        }
    };
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for &eps in &grid {
        let v = enand_verify(eps)?;
        if !v.ok {
            failures.push(VerifyEnandFailure {
                eps: f17(eps),
                reason: v
                    .reason
                    .unwrap_or_else(|| "an output margin is not positive".into()),
            });
            continue;
        }
        worst = worst.min(v.margins.iter().copied().fold(f64::INFINITY, f64::min));
        // independent cross-check: closed forms against the exact pushforward
        let fps = den_fixed_points(eps)?;
        for (u, w) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let push = enand_map(&eps, &fps[u].dist, &fps[w].dist)?;
            let (c0, c1) = enand_closed_form(eps, u, w)?;
            if (push.weight(0) - c0).abs() > 1e-12 || (push.weight(1) - c1).abs() > 1e-12 {
                failures.push(VerifyEnandFailure {
                    eps: f17(eps),
                    reason: format!("closed form diverges from pushforward on inputs ({u},{w})"),
                });
            }
        }
    }
    let all_ok = failures.is_empty();
    let payload = VerifyEnandPayload {
        schema_version: "reliq/verify-enand/1",
        checked: grid.len(),
        all_ok,
        worst_margin: f17(if worst.is_finite() { worst } else { 0.0 }),
        failures,
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(all_ok)
}

// ------------------------------------------------------------- verify-pa

#[derive(Args)]
pub struct VerifyPaArgs {
    #[arg(long)]
    pub q: usize,
    /// Grid resolution for the propagation cross-checks.
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct NamedCheck {
    name: &'static str,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyPaPayload {
    schema_version: &'static str,
    q: usize,
    grid: usize,
    all_ok: bool,
    checks: Vec<NamedCheck>,
}

pub fn verify_pa(args: &VerifyPaArgs) -> Result<bool> {
    let q = args.q;
    let n = args.grid.max(2) as i64;
    let rat = |num: i64, den: i64| BigRational::new(num.into(), den.into());
    let cycle: Vec<Symbol> = (0..q as u8).map(|s| (s + 1) % q as u8).collect();
    let perm_gate = builtin_gate(&GateKind::Perm(cycle), q, 1)?;
    let add_gate = builtin_gate(&GateKind::Add, q, 2)?;
    let mul_gate = builtin_gate(&GateKind::Mul, q, 2)?;
    let mut checks = Vec::new();

    let mut perm_ok = true;
    let mut add_ok = true;
    for i in 0..n {
        for j in 0..n {
            let a1 = rat(i, n);
            let a2 = rat(j, n);
            let eps = rat(i + j, 4 * n);
            let via = snp_output_check(&perm_gate, &[(0, a1.clone())], &eps)?;
            perm_ok &= via.symmetric && via.b == prop_perm(&a1, &eps, q)?;
            let via = snp_output_check(&add_gate, &[(1, a1.clone()), (0, a2.clone())], &eps)?;
            add_ok &= via.symmetric && via.b == prop_add(&a1, &a2, &eps, q)?;
        }
    }
    checks.push(NamedCheck {
        name: "relabeling propagation closed form matches pushforward",
        passed: perm_ok,
    });
    checks.push(NamedCheck {
        name: "sum propagation closed form matches pushforward",
        passed: add_ok,
    });
    checks.push(NamedCheck {
        name: "sum gate satisfies the restriction condition",
        passed: snp_restriction_check(&add_gate),
    });
    checks.push(NamedCheck {
        name: "sum gate decomposes into unary factors",
        passed: pa_decompose(&add_gate).is_some(),
    });
    checks.push(NamedCheck {
        name: "relabeling decomposes into unary factors",
        passed: pa_decompose(&perm_gate).is_some(),
    });
    checks.push(NamedCheck {
        name: "product gate is not pseudo-additive",
        passed: pa_decompose(&mul_gate).is_none(),
    });
    let mul_breaks = {
        let a = rat(1, 10);
        let out = snp_output_check(&mul_gate, &[(1, a.clone()), (1, a)], &rat(0, 1))?;
        !out.symmetric
    };
    checks.push(NamedCheck {
        name: "product gate output is not symmetric on noisy inputs",
        passed: mul_breaks,
    });

    let all_ok = checks.iter().all(|c| c.passed);
    let payload = VerifyPaPayload {
        schema_version: "reliq/verify-pa/1",
        q,
        grid: args.grid,
        all_ok,
        checks,
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(all_ok)
}

// ------------------------------------------------------------------- mul

#[derive(Args)]
pub struct MulArgs {
    #[arg(long)]
    pub q: usize,
    /// Input noise rate of both operands.
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct MulPayload {
    schema_version: &'static str,
    q: usize,
    a: Box<RawValue>,
    p_correct: Box<RawValue>,
    p_0: Box<RawValue>,
    margin: Box<RawValue>,
    threshold: Box<RawValue>,
}

pub fn mul(args: &MulArgs) -> Result<bool> {
    let report = mul_distinguishability::<f64>(args.q, &args.a)?;
    let payload = MulPayload {
        schema_version: "reliq/mul/1",
        q: args.q,
        a: f17(args.a),
        p_correct: f17(report.p_correct),
        p_0: f17(report.p_0),
        margin: f17(report.margin),
        threshold: f17(report.threshold),
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(true)
}

// -------------------------------------------------------------- simulate

#[derive(Args)]
pub struct SimulateArgs {
    /// Experiment description (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces the seed recorded in the config file.
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ConstructionEcho {
    r#type: &'static str,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    den_rounds_per_level: Option<usize>,
}

#[derive(Serialize)]
struct ConfigEcho {
    q: usize,
    k: usize,
    construction: ConstructionEcho,
    eps: Box<RawValue>,
    leaf_noise: Box<RawValue>,
    logical_inputs: Option<Vec<Symbol>>,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct OutcomeRow {
    assignment: Vec<Symbol>,
    intended: Symbol,
    histogram: Vec<u64>,
    error_rate: Box<RawValue>,
    ci_half_width: Box<RawValue>,
    bundle_errors: Vec<Box<RawValue>>,
}

#[derive(Serialize)]
struct SimulatePayload {
    schema_version: &'static str,
    config: ConfigEcho,
    outcomes: Vec<OutcomeRow>,
    worst: usize,
    worst_error: Box<RawValue>,
}

pub fn simulate(args: &SimulateArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config: ExperimentConfig =
        serde_json::from_str(&text).context("parsing the experiment config")?;
    config.seed = args.seed;
    let report = vn_experiment(&config)?;

    let construction = match &config.construction {
        Construction::MajTree { depth } => ConstructionEcho {
            r#type: "MajTree",
            depth: *depth,
            den_rounds_per_level: None,
        },
        Construction::AlternatingEnandDen {
            depth,
            den_rounds_per_level,
        } => ConstructionEcho {
            r#type: "AlternatingEnandDen",
            depth: *depth,
            den_rounds_per_level: Some(*den_rounds_per_level),
        },
    };
    let payload = SimulatePayload {
        schema_version: "reliq/simulate/1",
        config: ConfigEcho {
            q: config.q,
            k: config.k,
            construction,
            eps: f17(config.eps),
            leaf_noise: f17(config.leaf_noise),
            logical_inputs: config.logical_inputs.clone(),
            trials: config.trials,
            seed: config.seed,
        },
        outcomes: report
            .outcomes
            .iter()
            .map(|o| OutcomeRow {
                assignment: o.assignment.clone(),
                intended: o.intended,
                histogram: o.report.histogram.clone(),
                error_rate: f17(o.report.error_rate),
                ci_half_width: f17(o.report.ci_half_width),
                bundle_errors: o.bundle_errors.iter().map(|e| f17(*e)).collect(),
            })
            .collect(),
        worst: report.worst,
        worst_error: f17(report.worst_error),
    };
    emit(&args.out, &to_json_text(&payload)?)?;
    Ok(true)
}

// ------------------------------------------------------------------ gate

#[derive(Subcommand)]
pub enum GateCommand {
    /// Write a built-in gate's truth table in the plain text format.
    Dump(GateDumpArgs),
    /// Parse a truth table file and report its structural properties.
    Load(GateLoadArgs),
}

#[derive(Args)]
pub struct GateDumpArgs {
    /// maj | den | enand | add | mul | perm | const
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub k: usize,
    /// Permutation image of 0..q-1 (for --kind perm).
    #[arg(long, value_delimiter = ',')]
    pub perm: Option<Vec<Symbol>>,
    /// Output symbol (for --kind const).
    #[arg(long)]
    pub value: Option<Symbol>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GateLoadArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GateLoadPayload {
    schema_version: &'static str,
    name: String,
    q: usize,
    k: usize,
    balanced: bool,
    restriction_condition: bool,
    pseudo_additive: bool,
}

pub fn gate(cmd: &GateCommand) -> Result<bool> {
    match cmd {
        GateCommand::Dump(args) => {
            let kind = match args.kind.as_str() {
                "maj" => GateKind::Maj,
                "den" => GateKind::Den,
                "enand" => GateKind::Enand,
                "add" => GateKind::Add,
                "mul" => GateKind::Mul,
                "perm" => GateKind::Perm(args.perm.clone().ok_or_else(|| {
                    reliq::Error::invalid("--kind perm needs --perm, e.g. --perm 1,2,0")
                })?),
                "const" => GateKind::Const(args.value.ok_or_else(|| {
                    reliq::Error::invalid("--kind const needs --value")
                })?),
                other => anyhow::bail!(reliq::Error::invalid(format!(
                    "unknown gate kind '{other}'"
                ))),
            };
            let gate = builtin_gate(&kind, args.q, args.k)?;
            emit(&args.out, &gate.dump())?;
            Ok(true)
        }
        GateCommand::Load(args) => {
            let text = std::fs::read_to_string(&args.file)
                .with_context(|| format!("reading {}", args.file.display()))?;
            let gate = GateTable::parse(&text)?;
            let payload = GateLoadPayload {
                schema_version: "reliq/gate/1",
                name: gate.name().to_string(),
                q: gate.q(),
                k: gate.k(),
                balanced: gate.is_balanced(),
                restriction_condition: snp_restriction_check(&gate),
                pseudo_additive: pa_decompose(&gate).is_some(),
            };
            emit(&args.out, &to_json_text(&payload)?)?;
            Ok(true)
        }
    }
}

// -------------------------------------------------------------- selftest

pub fn selftest() -> Result<bool> {
    let results = reliq::selftest::run_selftest();
    let mut all_ok = true;
    for r in &results {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        println!("{verdict}  {}: {}", r.name, r.detail);
        all_ok &= r.passed;
    }
    let (passed, total) = (results.iter().filter(|r| r.passed).count(), results.len());
    println!("{passed}/{total} checks passed");
    Ok(all_ok)
}

