//! Seeded Monte Carlo simulation of noisy formulas.
//!
//! Every randomized routine derives one ChaCha8 stream per (stage, slot)
//! pair from the caller's seed, so results are bit-exact for a fixed seed
//! under any thread count or scheduling. Two experiment families are
//! provided: complete plurality trees, which are materialized as real
//! formula trees and sampled leaf-to-root, and the alternating
//! compute/denoise construction, whose tree is astronomically large at
//! interesting depths and is therefore simulated as a pool of wire samples
//! per logical level (its infinite-pool limit is exactly the pushforward
//! recursion, which the tests use as the oracle).

use crate::error::{Error, Result};
use crate::gates::{builtin_gate, eval_exact, FormulaNode, GateKind, GateTable, Symbol};
use crate::simplex::{symmetric_encode, DecodeResult, Dist};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

/// Hard cap on materialized formula nodes.
pub const MAX_TREE_NODES: u128 = 10_000_000;
/// Slot indices share a stream's low bits; stages use the high bits.
const SLOT_BITS: u32 = 40;

/// Which noisy formula family an experiment runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Construction {
    /// Complete k-ary plurality tree of the given depth over noisy leaves.
    MajTree { depth: usize },
    /// Alternating compute/denoise levels: each logical level denoises its
    /// operand bundles through a complete binary denoiser tree of depth
    /// `den_rounds_per_level`, then applies the error-signaling NAND.
    AlternatingEnandDen {
        depth: usize,
        den_rounds_per_level: usize,
    },
}

/// A complete reliability experiment. Serializes field-for-field to the
/// JSON config the command line accepts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub q: usize,
    pub k: usize,
    pub construction: Construction,
    /// Gate noise.
    pub eps: f64,
    /// Leaf encoding noise.
    pub leaf_noise: f64,
    /// Logical input assignment; `None` (or empty) enumerates every
    /// assignment and the report singles out the worst one.
    pub logical_inputs: Option<Vec<Symbol>>,
    pub trials: u64,
    pub seed: u64,
}

/// Empirical outcome of a batch of seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    /// Output symbol counts; sums to `trials`.
    pub histogram: Vec<u64>,
    /// Fraction of trials missing the reference symbol.
    pub error_rate: f64,
    /// 1.96 * sqrt(p(1-p)/trials).
    pub ci_half_width: f64,
    /// Not covered by the determinism contract.
    pub wall_clock_secs: f64,
    pub seed: u64,
}

/// One logical input assignment's outcome inside an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct AssignmentOutcome {
    pub assignment: Vec<Symbol>,
    pub intended: Symbol,
    pub report: TrialReport,
    /// Pool error rates measured after each denoise stage, in level order
    /// (two entries for the first level's operand bundles, one per level
    /// after that). Empty for constructions without a denoise stage.
    pub bundle_errors: Vec<f64>,
}

/// Experiment result across all requested logical assignments.
#[derive(Debug, Clone, Serialize)]
pub struct VnReport {
    pub config: ExperimentConfig,
    pub outcomes: Vec<AssignmentOutcome>,
    /// Index into `outcomes` of the worst (largest) error rate.
    pub worst: usize,
    pub worst_error: f64,
    pub wall_clock_secs: f64,
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// One independent ChaCha8 stream per (stage, slot): same key, distinct
/// nonce. Serial and parallel consumers see identical draws.
fn stream_rng(seed: u64, stage: u64, slot: u64) -> ChaCha8Rng {
    debug_assert!(slot < 1 << SLOT_BITS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stage << SLOT_BITS) | slot);
    rng
}

/// Draw one symbol from a distribution by inverse CDF walk.
pub fn sample_dist(d: &Dist<f64>, rng: &mut impl Rng) -> Symbol {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (i, w) in d.weights().iter().enumerate() {
        cum += w;
        if u < cum {
            return i as Symbol;
        }
    }
    (d.q() - 1) as Symbol
}

/// Evaluate the gate on `inputs`, then flip to a uniformly random other
/// symbol with probability `eps`.
pub fn sample_gate(
    g: &GateTable,
    inputs: &[Symbol],
    eps: f64,
    rng: &mut impl Rng,
) -> Symbol {
    let y = g.eval(inputs);
    if rng.random::<f64>() < eps {
        let mut wrong = rng.random_range(0..(g.q() - 1) as Symbol);
        if wrong >= y {
            wrong += 1;
        }
        wrong
    } else {
        y
    }
}

fn sample_node(
    f: &FormulaNode,
    leaf_values: &HashMap<usize, Symbol>,
    eps: f64,
    rng: &mut impl Rng,
) -> Symbol {
    match f {
        FormulaNode::Leaf(slot) => leaf_values[slot],
        FormulaNode::Gate { gate, children } => {
            let inputs: Vec<Symbol> = children
                .iter()
                .map(|c| sample_node(c, leaf_values, eps, rng))
                .collect();
            sample_gate(gate, &inputs, eps, rng)
        }
    }
}

fn merge_hist(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Sample the formula `trials` times; one stream per trial, leaves sampled
/// fresh per trial in ascending slot order, then a depth-first walk of the
/// gates.
fn sample_histogram(
    f: &FormulaNode,
    leaves: &HashMap<usize, Dist<f64>>,
    q: usize,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Vec<u64> {
    let mut slots: Vec<usize> = leaves.keys().copied().collect();
    slots.sort_unstable();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, 0, trial);
            let values: HashMap<usize, Symbol> = slots
                .iter()
                .map(|&s| (s, sample_dist(&leaves[&s], &mut rng)))
                .collect();
            sample_node(f, &values, eps, &mut rng) as usize
        })
        .fold(
            || vec![0u64; q],
            |mut h, s| {
                h[s] += 1;
                h
            },
        )
        .reduce(|| vec![0u64; q], merge_hist)
}

fn report_from_histogram(
    histogram: Vec<u64>,
    reference: usize,
    trials: u64,
    seed: u64,
    started: Instant,
) -> TrialReport {
    let error_rate = 1.0 - histogram[reference] as f64 / trials as f64;
    TrialReport {
        histogram,
        error_rate,
        ci_half_width: 1.96 * (error_rate * (1.0 - error_rate) / trials as f64).sqrt(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
        seed,
    }
}

/// Monte Carlo counterpart of [`eval_exact`]: runs seeded trials and
/// reports the empirical histogram, with the error rate measured against
/// the decode of the exact output distribution.
pub fn run_formula(
    f: &FormulaNode,
    leaves: &HashMap<usize, Dist<f64>>,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    check_prob("eps", eps)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if f.node_count() as u128 > MAX_TREE_NODES {
        return Err(Error::ResourceLimit(format!(
            "formula has {} nodes, cap is {MAX_TREE_NODES}",
            f.node_count()
        )));
    }
    let started = Instant::now();
    let exact = eval_exact(f, leaves, &eps)?;
    let reference = match exact.decode() {
        DecodeResult::Decoded(s) => s,
        DecodeResult::Tie(_) => {
            return Err(Error::invalid(
                "exact output distribution has no unique decode; no reference symbol",
            ));
        }
    };
    let histogram = sample_histogram(f, leaves, exact.q(), eps, trials, seed);
    Ok(report_from_histogram(histogram, reference, trials, seed, started))
}

/// Complete k-ary plurality tree with one leaf slot per leaf position.
fn maj_tree(gate: &GateTable, depth: usize, next_slot: &mut usize) -> FormulaNode {
    if depth == 0 {
        let leaf = FormulaNode::leaf(*next_slot);
        *next_slot += 1;
        return leaf;
    }
    let children: Vec<FormulaNode> = (0..gate.k())
        .map(|_| maj_tree(gate, depth - 1, next_slot))
        .collect();
    FormulaNode::gate(gate.clone(), children).expect("arity matches by construction")
}

fn maj_tree_nodes(k: usize, depth: usize) -> u128 {
    let k = k as u128;
    if k == 1 {
        return depth as u128 + 1;
    }
    let mut leaves: u128 = 1;
    let mut total: u128 = 1;
    for _ in 0..depth {
        leaves = leaves.saturating_mul(k);
        total = total.saturating_add(leaves);
    }
    total
}

fn derived_seed(seed: u64, index: u64) -> u64 {
    // fixed odd multiplier keeps per-assignment streams disjoint
    seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn enumerate_assignments(cfg: &ExperimentConfig) -> Result<Vec<Vec<Symbol>>> {
    let (arity, alphabet): (usize, usize) = match cfg.construction {
        Construction::MajTree { .. } => (1, cfg.q),
        Construction::AlternatingEnandDen { .. } => (2, 2),
    };
    match &cfg.logical_inputs {
        Some(v) if !v.is_empty() => {
            if v.len() != arity {
                return Err(Error::invalid(format!(
                    "expected {arity} logical input(s), got {}",
                    v.len()
                )));
            }
            if v.iter().any(|&s| (s as usize) >= alphabet) {
                return Err(Error::invalid(format!(
                    "logical inputs must lie below {alphabet}"
                )));
            }
            Ok(vec![v.clone()])
        }
        _ => {
            let mut all = vec![Vec::new()];
            for _ in 0..arity {
                all = all
                    .into_iter()
                    .flat_map(|prefix| {
                        (0..alphabet).map(move |s| {
                            let mut next = prefix.clone();
                            next.push(s as Symbol);
                            next
                        })
                    })
                    .collect();
            }
            Ok(all)
        }
    }
}

/// Fill a pool with independent draws from one distribution.
fn leaf_pool(d: &Dist<f64>, n: u64, seed: u64, stage: u64) -> Vec<Symbol> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stage, i);
            sample_dist(d, &mut rng)
        })
        .collect()
}

/// One noisy gate round over operand pairs resampled from the pools.
fn pool_round(
    gate: &GateTable,
    left: &[Symbol],
    right: &[Symbol],
    eps: f64,
    seed: u64,
    stage: u64,
) -> Vec<Symbol> {
    (0..left.len() as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stage, i);
            let a = left[rng.random_range(0..left.len())];
            let b = right[rng.random_range(0..right.len())];
            sample_gate(gate, &[a, b], eps, &mut rng)
        })
        .collect()
}

fn pool_error(pool: &[Symbol], intended: Symbol) -> f64 {
    pool.iter().filter(|&&s| s != intended).count() as f64 / pool.len() as f64
}

fn pool_histogram(pool: &[Symbol], q: usize) -> Vec<u64> {
    let mut h = vec![0u64; q];
    for &s in pool {
        h[s as usize] += 1;
    }
    h
}

/// Run one assignment of the alternating compute/denoise construction as a
/// wire-sample pool. Returns the final pool histogram, the intended final
/// logical value, and the post-denoise bundle errors per level.
fn alternating_pool(
    u0: Symbol,
    v0: Symbol,
    depth: usize,
    den_rounds: usize,
    eps: f64,
    leaf_noise: f64,
    trials: u64,
    seed: u64,
) -> Result<(Vec<u64>, Symbol, Vec<f64>)> {
    let den = builtin_gate(&GateKind::Den, 3, 2)?;
    let enand = builtin_gate(&GateKind::Enand, 3, 2)?;
    let enc_u = symmetric_encode(3, u0 as usize, &leaf_noise)?;
    let enc_v = symmetric_encode(3, v0 as usize, &leaf_noise)?;
    let mut stage: u64 = 0;
    let mut next_stage = || {
        stage += 1;
        stage
    };
    let mut pool_u = leaf_pool(&enc_u, trials, seed, next_stage());
    let mut pool_v = Some(leaf_pool(&enc_v, trials, seed, next_stage()));
    let mut intended_u = u0;
    let intended_v = v0;
    let mut bundle_errors = Vec::new();
    for level in 1..=depth {
        for _ in 0..den_rounds {
            pool_u = pool_round(&den, &pool_u, &pool_u, eps, seed, next_stage());
        }
        bundle_errors.push(pool_error(&pool_u, intended_u));
        let (left, right, intended) = if level == 1 {
            let mut pv = pool_v.take().expect("first level has a second bundle");
            for _ in 0..den_rounds {
                pv = pool_round(&den, &pv, &pv, eps, seed, next_stage());
            }
            bundle_errors.push(pool_error(&pv, intended_v));
            // classical NAND on the two logical inputs
            let intended = u8::from(!(intended_u == 1 && intended_v == 1));
            (pool_u, pv, intended)
        } else {
            // both operands resample the same denoised bundle; the gate on
            // equal logical values is a negation
            let intended = 1 - intended_u;
            (pool_u.clone(), pool_u, intended)
        };
        pool_u = pool_round(&enand, &left, &right, eps, seed, next_stage());
        intended_u = intended;
    }
    Ok((pool_histogram(&pool_u, 3), intended_u, bundle_errors))
}

/// Estimate worst-case-over-inputs logical reliability for a construction.
pub fn vn_experiment(cfg: &ExperimentConfig) -> Result<VnReport> {
    check_prob("eps", cfg.eps)?;
    check_prob("leaf_noise", cfg.leaf_noise)?;
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if cfg.trials >= 1 << SLOT_BITS {
        return Err(Error::ResourceLimit(format!(
            "trials capped at {}",
            1u64 << SLOT_BITS
        )));
    }
    let started = Instant::now();
    let assignments = enumerate_assignments(cfg)?;
    let mut outcomes = Vec::with_capacity(assignments.len());
    match cfg.construction {
        Construction::MajTree { depth } => {
            let nodes = maj_tree_nodes(cfg.k, depth);
            if nodes > MAX_TREE_NODES {
                return Err(Error::ResourceLimit(format!(
                    "plurality tree of depth {depth} has {nodes} nodes, cap is {MAX_TREE_NODES}"
                )));
            }
            let gate = builtin_gate(&GateKind::Maj, cfg.q, cfg.k)?;
            let mut next_slot = 0usize;
            let tree = maj_tree(&gate, depth, &mut next_slot);
            for (idx, assignment) in assignments.iter().enumerate() {
                let s = assignment[0];
                let enc = symmetric_encode(cfg.q, s as usize, &cfg.leaf_noise)?;
                let leaves: HashMap<usize, Dist<f64>> =
                    (0..next_slot).map(|slot| (slot, enc.clone())).collect();
                let run_started = Instant::now();
                let seed = derived_seed(cfg.seed, idx as u64);
                let histogram =
                    sample_histogram(&tree, &leaves, cfg.q, cfg.eps, cfg.trials, seed);
                outcomes.push(AssignmentOutcome {
                    assignment: assignment.clone(),
                    intended: s,
                    report: report_from_histogram(
                        histogram,
                        s as usize,
                        cfg.trials,
                        seed,
                        run_started,
                    ),
                    bundle_errors: Vec::new(),
                });
            }
        }
        Construction::AlternatingEnandDen {
            depth,
            den_rounds_per_level,
        } => {
            if cfg.q != 3 || cfg.k != 2 {
                return Err(Error::invalid(
                    "the alternating construction is ternary with binary gates (q=3, k=2)",
                ));
            }
            for (idx, assignment) in assignments.iter().enumerate() {
                let run_started = Instant::now();
                let seed = derived_seed(cfg.seed, idx as u64);
                let (histogram, intended, bundle_errors) = alternating_pool(
                    assignment[0],
                    assignment[1],
                    depth,
                    den_rounds_per_level,
                    cfg.eps,
                    cfg.leaf_noise,
                    cfg.trials,
                    seed,
                )?;
                outcomes.push(AssignmentOutcome {
                    assignment: assignment.clone(),
                    intended,
                    report: report_from_histogram(
                        histogram,
                        intended as usize,
                        cfg.trials,
                        seed,
                        run_started,
                    ),
                    bundle_errors,
                });
            }
        }
    }
    let worst = outcomes
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.report
                .error_rate
                .partial_cmp(&b.1.report.error_rate)
                .expect("error rates are finite")
        })
        .map(|(i, _)| i)
        .expect("at least one assignment");
    Ok(VnReport {
        config: cfg.clone(),
        worst,
        worst_error: outcomes[worst].report.error_rate,
        outcomes,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}
