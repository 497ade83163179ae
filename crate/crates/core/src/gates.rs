//! Gate tables over q-ary alphabets, structural checks (balance, unary
//! restrictions, pseudo-additive decomposition), the exact pushforward of
//! product input distributions through a noisy gate, and formula trees.

use crate::error::{Error, Result};
use crate::simplex::{apply_channel, Dist, MAX_ALPHABET};
use crate::weight::{in_unit_interval, Weight};
use std::collections::HashMap;
use std::fmt::Write as _;

pub type Symbol = u8;

/// A k-ary gate over symbols `0..q`, stored as a dense truth table in
/// row-major order with the last input varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateTable {
    q: usize,
    k: usize,
    name: String,
    table: Vec<Symbol>,
}

fn check_alphabet(q: usize) -> Result<()> {
    if q < 2 || q > MAX_ALPHABET {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: format!("gates are defined for 2 <= q <= {MAX_ALPHABET}"),
        });
    }
    Ok(())
}

fn table_len(q: usize, k: usize) -> Result<usize> {
    let mut len: usize = 1;
    for _ in 0..k {
        len = len
            .checked_mul(q)
            .filter(|&l| l <= 1 << 30)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("truth table q^k with q={q}, k={k} is too large"))
            })?;
    }
    Ok(len)
}

impl GateTable {
    pub fn new(q: usize, k: usize, name: impl Into<String>, table: Vec<Symbol>) -> Result<Self> {
        check_alphabet(q)?;
        if k == 0 {
            return Err(Error::invalid("gate arity must be at least 1".to_string()));
        }
        let expect = table_len(q, k)?;
        if table.len() != expect {
            return Err(Error::invalid(format!(
                "table has {} entries, expected q^k = {}",
                table.len(),
                expect
            )));
        }
        if let Some(bad) = table.iter().find(|&&s| (s as usize) >= q) {
            return Err(Error::invalid(format!(
                "table entry {bad} is not a symbol below q={q}"
            )));
        }
        let name = name.into();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::invalid(
                "gate name must be nonempty and whitespace-free".to_string(),
            ));
        }
        Ok(GateTable { q, k, name, table })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    fn index(&self, inputs: &[Symbol]) -> usize {
        debug_assert_eq!(inputs.len(), self.k);
        let mut idx = 0usize;
        for &s in inputs {
            debug_assert!((s as usize) < self.q);
            idx = idx * self.q + s as usize;
        }
        idx
    }

    /// Noiseless table lookup. `inputs` must have length k with symbols < q.
    pub fn eval(&self, inputs: &[Symbol]) -> Symbol {
        self.table[self.index(inputs)]
    }

    /// True when every output symbol appears exactly q^(k-1) times.
    pub fn is_balanced(&self) -> bool {
        let mut counts = vec![0usize; self.q];
        for &s in &self.table {
            counts[s as usize] += 1;
        }
        let expect = self.table.len() / self.q;
        counts.iter().all(|&c| c == expect)
    }

    /// Serialize as `q k name` followed by the table entries, one block of
    /// q^(k-1) entries per line.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {} {}\n", self.q, self.k, self.name);
        let row = self.table.len() / self.q;
        for chunk in self.table.chunks(row.max(1)) {
            let line: Vec<String> = chunk.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parse the `dump` format. Whitespace layout of the entries is free.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty gate description".to_string()))?;
        let mut parts = header.split_whitespace();
        let q: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("gate header must start with q".to_string()))?;
        let k: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("gate header must contain k".to_string()))?;
        let name = parts
            .next()
            .ok_or_else(|| Error::invalid("gate header must contain a name".to_string()))?;
        if parts.next().is_some() {
            return Err(Error::invalid("gate header has trailing tokens".to_string()));
        }
        let mut table = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad table entry {tok:?}")))?;
                if v >= q {
                    return Err(Error::invalid(format!(
                        "table entry {v} is not a symbol below q={q}"
                    )));
                }
                table.push(v as Symbol);
            }
        }
        GateTable::new(q, k, name, table)
    }
}

/// The built-in gate families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    /// Plurality vote; ties go to the tied symbol whose first occurrence in
    /// the input tuple is earliest.
    Maj,
    /// Two-input denoiser for q=3 with error-signaling third symbol.
    Den,
    /// Error-signaling NAND for q=3.
    Enand,
    /// Addition mod q (k=2).
    Add,
    /// Multiplication mod q on the first two inputs.
    Mul,
    /// Unary relabeling by the given permutation.
    Perm(Vec<Symbol>),
    /// Unary constant.
    Const(Symbol),
}

/// Plurality vote over `inputs` with the deterministic tie-break: among the
/// symbols sharing the top count, pick the one whose earliest occurrence in
/// the tuple has the smallest index. Relabeling-equivariant, hence balanced.
pub fn maj_symbol(q: usize, inputs: &[Symbol]) -> Symbol {
    let mut counts = vec![0u32; q];
    let mut first = vec![usize::MAX; q];
    for (i, &s) in inputs.iter().enumerate() {
        counts[s as usize] += 1;
        if first[s as usize] == usize::MAX {
            first[s as usize] = i;
        }
    }
    let top = *counts.iter().max().expect("nonempty inputs");
    let mut winner = 0usize;
    let mut winner_first = usize::MAX;
    for s in 0..q {
        if counts[s] == top && first[s] < winner_first {
            winner = s;
            winner_first = first[s];
        }
    }
    winner as Symbol
}

fn build_table<F: FnMut(&[Symbol]) -> Symbol>(
    q: usize,
    k: usize,
    name: &str,
    mut f: F,
) -> Result<GateTable> {
    let len = table_len(q, k)?;
    let mut tuple = vec![0 as Symbol; k];
    let mut table = Vec::with_capacity(len);
    for idx in 0..len {
        let mut rem = idx;
        for pos in (0..k).rev() {
            tuple[pos] = (rem % q) as Symbol;
            rem /= q;
        }
        table.push(f(&tuple));
    }
    GateTable::new(q, k, name, table)
}

const DEN_TABLE: [Symbol; 9] = [0, 2, 0, 2, 1, 1, 0, 1, 2];
const ENAND_TABLE: [Symbol; 9] = [1, 1, 2, 1, 0, 0, 2, 0, 2];

/// Construct a built-in gate. Arity/alphabet constraints: MAJ takes any
/// q and k >= 1; DEN and ENAND exist for q=3, k=2; ADD requires k=2; MUL uses
/// the first two inputs; PERM and CONST are unary.
pub fn builtin_gate(kind: &GateKind, q: usize, k: usize) -> Result<GateTable> {
    check_alphabet(q)?;
    match kind {
        GateKind::Maj => {
            if k == 0 {
                return Err(Error::invalid("maj needs at least one input".to_string()));
            }
            build_table(q, k, "maj", |t| maj_symbol(q, t))
        }
        GateKind::Den => {
            if q != 3 || k != 2 {
                return Err(Error::UnsupportedAlphabet {
                    q,
                    reason: format!("den is defined for q=3, k=2 (got q={q}, k={k})"),
                });
            }
            GateTable::new(3, 2, "den", DEN_TABLE.to_vec())
        }
        GateKind::Enand => {
            if q != 3 || k != 2 {
                return Err(Error::UnsupportedAlphabet {
                    q,
                    reason: format!("enand is defined for q=3, k=2 (got q={q}, k={k})"),
                });
            }
            GateTable::new(3, 2, "enand", ENAND_TABLE.to_vec())
        }
        GateKind::Add => {
            if k != 2 {
                return Err(Error::invalid(format!("add requires k=2, got k={k}")));
            }
            build_table(q, 2, "add", |t| {
                ((t[0] as usize + t[1] as usize) % q) as Symbol
            })
        }
        GateKind::Mul => {
            if k < 2 {
                return Err(Error::invalid(format!("mul requires k>=2, got k={k}")));
            }
            build_table(q, k, "mul", |t| {
                ((t[0] as usize * t[1] as usize) % q) as Symbol
            })
        }
        GateKind::Perm(sigma) => {
            if k != 1 {
                return Err(Error::invalid(format!("perm is unary, got k={k}")));
            }
            if !is_permutation(q, sigma) {
                return Err(Error::invalid(format!(
                    "{sigma:?} is not a permutation of 0..{q}"
                )));
            }
            let name = format!(
                "perm{}",
                sigma.iter().map(|s| s.to_string()).collect::<String>()
            );
            GateTable::new(q, 1, name, sigma.clone())
        }
        GateKind::Const(c) => {
            if k != 1 {
                return Err(Error::invalid(format!("const is unary, got k={k}")));
            }
            if (*c as usize) >= q {
                return Err(Error::invalid(format!("constant {c} is not below q={q}")));
            }
            GateTable::new(q, 1, format!("const{c}"), vec![*c; q])
        }
    }
}

fn is_permutation(q: usize, sigma: &[Symbol]) -> bool {
    if sigma.len() != q {
        return false;
    }
    let mut seen = vec![false; q];
    for &s in sigma {
        if (s as usize) >= q || seen[s as usize] {
            return false;
        }
        seen[s as usize] = true;
    }
    true
}

/// Exhaustively test whether every unary restriction of the gate (fix all
/// inputs but one) is a constant map or a bijection. This is the structural
/// condition a gate must satisfy to keep symmetric noise symmetric; it is
/// necessary but not sufficient.
pub fn snp_restriction_check(g: &GateTable) -> bool {
    let q = g.q;
    let k = g.k;
    let others = g.table.len() / q;
    let mut inputs = vec![0 as Symbol; k];
    for pos in 0..k {
        for rest in 0..others {
            let mut rem = rest;
            for p in (0..k).rev() {
                if p == pos {
                    continue;
                }
                inputs[p] = (rem % q) as Symbol;
                rem /= q;
            }
            let mut outputs = Vec::with_capacity(q);
            for v in 0..q {
                inputs[pos] = v as Symbol;
                outputs.push(g.eval(&inputs));
            }
            let constant = outputs.iter().all(|&o| o == outputs[0]);
            let mut seen = vec![false; q];
            let bijection = outputs.iter().all(|&o| {
                let fresh = !seen[o as usize];
                seen[o as usize] = true;
                fresh
            });
            if !constant && !bijection {
                return false;
            }
        }
    }
    true
}

/// A unary factor of a pseudo-additive decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnaryMap {
    Constant(Symbol),
    Bijection(Vec<Symbol>),
}

impl UnaryMap {
    pub fn apply(&self, x: Symbol) -> Symbol {
        match self {
            UnaryMap::Constant(c) => *c,
            UnaryMap::Bijection(map) => map[x as usize],
        }
    }
}

/// A gate written as g(x_1..x_k) = sigma_1(x_1) + ... + sigma_k(x_k) mod q,
/// each factor a constant or a bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaDecomposition {
    pub q: usize,
    pub sigmas: Vec<UnaryMap>,
}

impl PaDecomposition {
    pub fn eval(&self, inputs: &[Symbol]) -> Symbol {
        let mut acc = 0usize;
        for (sigma, &x) in self.sigmas.iter().zip(inputs) {
            acc += sigma.apply(x) as usize;
        }
        (acc % self.q) as Symbol
    }
}

fn classify_unary(q: usize, values: &[Symbol]) -> Option<UnaryMap> {
    if values.iter().all(|&v| v == values[0]) {
        return Some(UnaryMap::Constant(values[0]));
    }
    if is_permutation(q, values) {
        return Some(UnaryMap::Bijection(values.to_vec()));
    }
    None
}

/// Find the pseudo-additive decomposition of a gate, if one exists.
///
/// Candidate factors are read off the gate's own restrictions along the axes
/// through the all-zeros input, with the gate's value there folded into the
/// first factor; any valid decomposition differs from this one only by
/// constant shifts between factors, so verifying the single candidate over
/// all q^k inputs is a complete decision procedure.
pub fn pa_decompose(g: &GateTable) -> Option<PaDecomposition> {
    let q = g.q;
    let k = g.k;
    let zeros = vec![0 as Symbol; k];
    let g0 = g.eval(&zeros) as usize;
    let mut sigmas = Vec::with_capacity(k);
    for pos in 0..k {
        let mut probe = zeros.clone();
        let mut values = Vec::with_capacity(q);
        for v in 0..q {
            probe[pos] = v as Symbol;
            let out = g.eval(&probe) as usize;
            let mut val = (out + q - g0) % q;
            if pos == 0 {
                val = (val + g0) % q;
            }
            values.push(val as Symbol);
        }
        sigmas.push(classify_unary(q, &values)?);
    }
    let cand = PaDecomposition { q, sigmas };
    let mut tuple = vec![0 as Symbol; k];
    for idx in 0..g.table.len() {
        let mut rem = idx;
        for pos in (0..k).rev() {
            tuple[pos] = (rem % q) as Symbol;
            rem /= q;
        }
        if cand.eval(&tuple) != g.table[idx] {
            return None;
        }
    }
    Some(cand)
}

/// Exact output distribution of an eps-noisy gate fed independent inputs.
pub fn pushforward<W: Weight>(g: &GateTable, inputs: &[Dist<W>], eps: &W) -> Result<Dist<W>> {
    if inputs.len() != g.k {
        return Err(Error::invalid(format!(
            "gate {} takes {} inputs, got {}",
            g.name,
            g.k,
            inputs.len()
        )));
    }
    for d in inputs {
        if d.q() != g.q {
            return Err(Error::invalid(format!(
                "input alphabet q={} does not match gate alphabet q={}",
                d.q(),
                g.q
            )));
        }
    }
    if !in_unit_interval(eps) {
        return Err(Error::invalid("gate noise outside [0, 1]".to_string()));
    }
    let mut out = vec![W::zero(); g.q];
    let mut tuple = vec![0 as Symbol; g.k];
    accumulate(g, inputs, 0, &W::one(), &mut tuple, &mut out);
    let noiseless = Dist::new(out)?;
    apply_channel(&noiseless, eps)
}

fn accumulate<W: Weight>(
    g: &GateTable,
    inputs: &[Dist<W>],
    pos: usize,
    partial: &W,
    tuple: &mut Vec<Symbol>,
    out: &mut [W],
) {
    if pos == g.k {
        let s = g.eval(tuple) as usize;
        out[s] = out[s].clone() + partial.clone();
        return;
    }
    for v in 0..g.q {
        let w = inputs[pos].weight(v);
        if w.is_zero() {
            continue;
        }
        tuple[pos] = v as Symbol;
        let next = partial.clone() * w.clone();
        accumulate(g, inputs, pos + 1, &next, tuple, out);
    }
}

/// A formula: a tree of gates with input slots at the leaves. Children are
/// owned, so sharing a subtree (fan-out above one) is unrepresentable.
#[derive(Debug, Clone)]
pub enum FormulaNode {
    /// An input wire, identified by a slot id bound at evaluation time.
    Leaf(usize),
    Gate {
        gate: GateTable,
        children: Vec<FormulaNode>,
    },
}

impl FormulaNode {
    pub fn leaf(slot: usize) -> Self {
        FormulaNode::Leaf(slot)
    }

    pub fn gate(gate: GateTable, children: Vec<FormulaNode>) -> Result<Self> {
        if children.len() != gate.k() {
            return Err(Error::invalid(format!(
                "gate {} takes {} children, got {}",
                gate.name(),
                gate.k(),
                children.len()
            )));
        }
        Ok(FormulaNode::Gate { gate, children })
    }

    pub fn node_count(&self) -> usize {
        match self {
            FormulaNode::Leaf(_) => 1,
            FormulaNode::Gate { children, .. } => {
                1 + children.iter().map(FormulaNode::node_count).sum::<usize>()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            FormulaNode::Leaf(_) => 0,
            FormulaNode::Gate { children, .. } => {
                1 + children.iter().map(FormulaNode::depth).max().unwrap_or(0)
            }
        }
    }
}

/// Exact output distribution of a formula with eps-noisy gates. Leaves return
/// their bound distribution unchanged: they are inputs, not gates.
pub fn eval_exact<W: Weight>(
    f: &FormulaNode,
    leaves: &HashMap<usize, Dist<W>>,
    eps: &W,
) -> Result<Dist<W>> {
    match f {
        FormulaNode::Leaf(slot) => leaves
            .get(slot)
            .cloned()
            .ok_or_else(|| Error::Config(format!("leaf slot {slot} is unbound"))),
        FormulaNode::Gate { gate, children } => {
            let inputs: Vec<Dist<W>> = children
                .iter()
                .map(|c| eval_exact(c, leaves, eps))
                .collect::<Result<_>>()?;
            pushforward(gate, &inputs, eps)
        }
    }
}
