//! Tree-based genetic programming genotype over the Boolean function set
//! `{OR, XOR, AND, AND2, XNOR, IF, NOT}` with variable leaves `x1..xn`.
//!
//! Depth counts edges: a single leaf has depth 0.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{valid_mask, TruthTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GpOp {
    Or,
    Xor,
    And,
    /// `a AND (NOT b)`.
    And2,
    Xnor,
    /// Multiplexer: `(a AND b) OR ((NOT a) AND c)`.
    If,
    Not,
}

impl GpOp {
    pub const ALL: [GpOp; 7] = [
        GpOp::Or,
        GpOp::Xor,
        GpOp::And,
        GpOp::And2,
        GpOp::Xnor,
        GpOp::If,
        GpOp::Not,
    ];

    pub fn arity(self) -> usize {
        match self {
            GpOp::Not => 1,
            GpOp::If => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GpOp::Or => "OR",
            GpOp::Xor => "XOR",
            GpOp::And => "AND",
            GpOp::And2 => "AND2",
            GpOp::Xnor => "XNOR",
            GpOp::If => "IF",
            GpOp::Not => "NOT",
        }
    }

    pub fn from_name(name: &str) -> Option<GpOp> {
        GpOp::ALL.into_iter().find(|op| op.name() == name)
    }

    /// Word-parallel application; `mask` clears bits beyond `2^n` for small `n`.
    fn apply(self, args: &[Vec<u64>], mask: u64) -> Vec<u64> {
        let a = &args[0];
        (0..a.len())
            .map(|i| {
                let x = a[i];
                let w = match self {
                    GpOp::Not => !x,
                    GpOp::Or => x | args[1][i],
                    GpOp::Xor => x ^ args[1][i],
                    GpOp::And => x & args[1][i],
                    GpOp::And2 => x & !args[1][i],
                    GpOp::Xnor => !(x ^ args[1][i]),
                    GpOp::If => (x & args[1][i]) | (!x & args[2][i]),
                };
                w & mask
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GpNode {
    /// Variable `x_j`, 1-based.
    Var(u8),
    Op(GpOp, Vec<GpNode>),
}

impl GpNode {
    pub fn depth(&self) -> usize {
        match self {
            GpNode::Var(_) => 0,
            GpNode::Op(_, children) => 1 + children.iter().map(GpNode::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GpNode::Var(_) => 1,
            GpNode::Op(_, children) => 1 + children.iter().map(GpNode::size).sum::<usize>(),
        }
    }

    fn arity(&self) -> usize {
        match self {
            GpNode::Var(_) => 0,
            GpNode::Op(_, c) => c.len(),
        }
    }

    fn max_var(&self) -> usize {
        match self {
            GpNode::Var(j) => *j as usize,
            GpNode::Op(_, c) => c.iter().map(GpNode::max_var).max().unwrap_or(0),
        }
    }

    fn eval(&self, vars: &[TruthTable], mask: u64) -> Vec<u64> {
        match self {
            GpNode::Var(j) => vars[*j as usize - 1].words().to_vec(),
            GpNode::Op(op, children) => {
                let args: Vec<Vec<u64>> = children.iter().map(|c| c.eval(vars, mask)).collect();
                op.apply(&args, mask)
            }
        }
    }

    fn at(&self, path: &[usize]) -> &GpNode {
        match (self, path.split_first()) {
            (_, None) => self,
            (GpNode::Op(_, c), Some((&i, rest))) => c[i].at(rest),
            (GpNode::Var(_), Some(_)) => panic!("path descends below a leaf"),
        }
    }

    fn at_mut(&mut self, path: &[usize]) -> &mut GpNode {
        match path.split_first() {
            None => self,
            Some((&i, rest)) => match self {
                GpNode::Op(_, c) => c[i].at_mut(rest),
                GpNode::Var(_) => panic!("path descends below a leaf"),
            },
        }
    }

    fn collect_paths(&self, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
        out.push((path.clone(), self.size()));
        if let GpNode::Op(_, children) = self {
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                c.collect_paths(path, out);
                path.pop();
            }
        }
    }
}

impl fmt::Display for GpNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpNode::Var(j) => write!(f, "x{j}"),
            GpNode::Op(op, children) => {
                write!(f, "({}", op.name())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A GP individual with its cached depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GpTree {
    root: GpNode,
    depth: usize,
}

impl GpTree {
    pub fn new(root: GpNode) -> Self {
        let depth = root.depth();
        GpTree { root, depth }
    }

    pub fn root(&self) -> &GpNode {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Highest variable index referenced by a leaf.
    pub fn max_var(&self) -> usize {
        self.root.max_var()
    }

    /// Evaluates the tree on all `2^n` inputs.
    pub fn truth_table(&self, n: usize) -> TruthTable {
        assert!(self.max_var() <= n, "tree references x{} but n = {n}", self.max_var());
        let vars: Vec<TruthTable> = (1..=n).map(|j| TruthTable::variable(n, j)).collect();
        let words = self.root.eval(&vars, valid_mask(n));
        TruthTable::from_words(n, words).expect("evaluation keeps the table shape")
    }

    /// Parses the prefix s-expression form produced by `Display`.
    pub fn parse(s: &str) -> Result<Self> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let root = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse {
                position: tokens[pos].0,
                message: "trailing input after expression".into(),
            });
        }
        Ok(GpTree::new(root))
    }

    /// Preorder `(path, subtree size)` pairs.
    fn paths(&self) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        self.root.collect_paths(&mut Vec::new(), &mut out);
        out
    }

    fn replaced(&self, path: &[usize], subtree: GpNode) -> GpTree {
        let mut root = self.root.clone();
        *root.at_mut(path) = subtree;
        GpTree::new(root)
    }
}

impl fmt::Display for GpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

fn tokenize(s: &str) -> Vec<(usize, String)> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, String)> = None;
    for (i, ch) in s.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(tok) = current.take() {
                tokens.push(tok);
            }
            if !ch.is_whitespace() {
                tokens.push((i, ch.to_string()));
            }
        } else {
            current.get_or_insert_with(|| (i, String::new())).1.push(ch);
        }
    }
    tokens.extend(current);
    tokens
}

fn parse_node(tokens: &[(usize, String)], pos: &mut usize) -> Result<GpNode> {
    let end = tokens.last().map_or(0, |t| t.0 + t.1.len());
    let (at, tok) = tokens.get(*pos).ok_or(Error::Parse {
        position: end,
        message: "unexpected end of expression".into(),
    })?;
    *pos += 1;
    if tok == "(" {
        let (op_at, name) = tokens.get(*pos).ok_or(Error::Parse {
            position: end,
            message: "missing operator".into(),
        })?;
        let op = GpOp::from_name(name).ok_or_else(|| Error::Parse {
            position: *op_at,
            message: format!("unknown operator {name:?}"),
        })?;
        *pos += 1;
        let children = (0..op.arity())
            .map(|_| parse_node(tokens, pos))
            .collect::<Result<Vec<_>>>()?;
        match tokens.get(*pos) {
            Some((_, t)) if t == ")" => *pos += 1,
            Some((p, _)) => {
                return Err(Error::Parse {
                    position: *p,
                    message: format!("expected ')' after {} arguments of {}", op.arity(), op.name()),
                })
            }
            None => {
                return Err(Error::Parse {
                    position: end,
                    message: "missing ')'".into(),
                })
            }
        }
        Ok(GpNode::Op(op, children))
    } else {
        tok.strip_prefix('x')
            .and_then(|v| v.parse::<u8>().ok())
            .filter(|&v| v >= 1)
            .map(GpNode::Var)
            .ok_or_else(|| Error::Parse {
                position: *at,
                message: format!("expected a variable or '(' but found {tok:?}"),
            })
    }
}

/// Tree-shape parameters for GP initialization and variation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpConfig {
    pub max_depth: usize,
    pub init_min_depth: usize,
    pub init_max_depth: usize,
    /// Depth limit of subtrees grown by subtree mutation.
    pub mutation_depth: usize,
    /// Attempts at producing a depth-legal child before copying the first parent.
    pub max_retries: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            max_depth: 8,
            init_min_depth: 2,
            init_max_depth: 6,
            mutation_depth: 4,
            max_retries: 16,
        }
    }
}

fn random_op(rng: &mut impl Rng) -> GpOp {
    GpOp::ALL[rng.gen_range(0..GpOp::ALL.len())]
}

fn random_var(n: usize, rng: &mut impl Rng) -> GpNode {
    GpNode::Var(rng.gen_range(1..=n) as u8)
}

/// Grows (or, with `full`, fills) a random tree. Nodes above `min_depth`
/// are always operators and nodes at `max_depth` are always leaves.
fn random_node(
    n: usize,
    level: usize,
    min_depth: usize,
    max_depth: usize,
    full: bool,
    rng: &mut impl Rng,
) -> GpNode {
    let leaf = if level >= max_depth {
        true
    } else if level < min_depth || full {
        false
    } else {
        rng.gen_range(0..n + GpOp::ALL.len()) < n
    };
    if leaf {
        return random_var(n, rng);
    }
    let op = random_op(rng);
    let children = (0..op.arity())
        .map(|_| random_node(n, level + 1, min_depth, max_depth, full, rng))
        .collect();
    GpNode::Op(op, children)
}

/// One ramped half-and-half sample: depth drawn uniformly from the init
/// range, then the full or grow method with equal probability.
pub fn random_tree(n: usize, config: &GpConfig, rng: &mut impl Rng) -> GpTree {
    let depth = rng.gen_range(config.init_min_depth..=config.init_max_depth);
    let full = rng.gen_bool(0.5);
    GpTree::new(random_node(n, 0, config.init_min_depth.min(depth), depth, full, rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpCrossover {
    Subtree,
    Uniform,
    SizeFair,
    OnePoint,
    ContextPreserving,
}

impl GpCrossover {
    pub const ALL: [GpCrossover; 5] = [
        GpCrossover::Subtree,
        GpCrossover::Uniform,
        GpCrossover::SizeFair,
        GpCrossover::OnePoint,
        GpCrossover::ContextPreserving,
    ];
}

/// Paths reachable from the roots while both trees agree on arity.
fn common_region(a: &GpNode, b: &GpNode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    if let (GpNode::Op(_, ca), GpNode::Op(_, cb)) = (a, b) {
        if ca.len() == cb.len() {
            for (i, (x, y)) in ca.iter().zip(cb).enumerate() {
                path.push(i);
                common_region(x, y, path, out);
                path.pop();
            }
        }
    }
}

/// Paths that exist in both trees, regardless of the operators on the way.
fn shared_coordinates(a: &GpNode, b: &GpNode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    if let (GpNode::Op(_, ca), GpNode::Op(_, cb)) = (a, b) {
        for (i, (x, y)) in ca.iter().zip(cb).enumerate() {
            path.push(i);
            shared_coordinates(x, y, path, out);
            path.pop();
        }
    }
}

fn uniform_walk(a: &mut GpNode, b: &GpNode, rng: &mut impl Rng) {
    let interior = a.arity() > 0 && a.arity() == b.arity();
    if interior {
        if let (GpNode::Op(op_a, ca), GpNode::Op(op_b, cb)) = (a, b) {
            if rng.gen_bool(0.5) {
                *op_a = *op_b;
            }
            for (x, y) in ca.iter_mut().zip(cb) {
                uniform_walk(x, y, rng);
            }
        }
    } else if rng.gen_bool(0.5) {
        *a = b.clone();
    }
}

fn pick<T: Clone>(items: &[T], rng: &mut impl Rng) -> T {
    items[rng.gen_range(0..items.len())].clone()
}

/// Applies one specific crossover operator, without the depth check.
pub fn crossover_with(
    kind: GpCrossover,
    p1: &GpTree,
    p2: &GpTree,
    rng: &mut impl Rng,
) -> GpTree {
    match kind {
        GpCrossover::Subtree => {
            let (at, _) = pick(&p1.paths(), rng);
            let (from, _) = pick(&p2.paths(), rng);
            p1.replaced(&at, p2.root.at(&from).clone())
        }
        GpCrossover::Uniform => {
            let mut root = p1.root.clone();
            uniform_walk(&mut root, &p2.root, rng);
            GpTree::new(root)
        }
        GpCrossover::SizeFair => {
            let (at, size) = pick(&p1.paths(), rng);
            let limit = 2 * size + 1;
            let candidates: Vec<Vec<usize>> = p2
                .paths()
                .into_iter()
                .filter(|(_, s)| *s <= limit)
                .map(|(p, _)| p)
                .collect();
            let from = pick(&candidates, rng);
            p1.replaced(&at, p2.root.at(&from).clone())
        }
        GpCrossover::OnePoint => {
            let mut region = Vec::new();
            common_region(&p1.root, &p2.root, &mut Vec::new(), &mut region);
            let at = pick(&region, rng);
            p1.replaced(&at, p2.root.at(&at).clone())
        }
        GpCrossover::ContextPreserving => {
            let mut shared = Vec::new();
            shared_coordinates(&p1.root, &p2.root, &mut Vec::new(), &mut shared);
            let at = pick(&shared, rng);
            p1.replaced(&at, p2.root.at(&at).clone())
        }
    }
}

/// One of the five crossovers chosen uniformly at random. Children deeper
/// than `max_depth` are rejected and regenerated; after `max_retries`
/// failures the child is a copy of `p1`.
pub fn crossover(p1: &GpTree, p2: &GpTree, config: &GpConfig, rng: &mut impl Rng) -> GpTree {
    for _ in 0..config.max_retries {
        let kind = GpCrossover::ALL[rng.gen_range(0..GpCrossover::ALL.len())];
        let child = crossover_with(kind, p1, p2, rng);
        if child.depth() <= config.max_depth {
            return child;
        }
    }
    p1.clone()
}

/// Replaces a uniformly chosen subtree with a freshly grown one that keeps
/// the tree within `max_depth`.
pub fn subtree_mutation(tree: &GpTree, n: usize, config: &GpConfig, rng: &mut impl Rng) -> GpTree {
    let paths = tree.paths();
    let (at, _) = pick(&paths, rng);
    let room = config.max_depth.saturating_sub(at.len());
    let fresh = random_node(n, 0, 0, room.min(config.mutation_depth.max(1)), false, rng);
    tree.replaced(&at, fresh)
}

/// Crossover followed, with probability `p_mut`, by subtree mutation.
pub fn variation(
    p1: &GpTree,
    p2: &GpTree,
    n: usize,
    p_mut: f64,
    config: &GpConfig,
    rng: &mut impl Rng,
) -> GpTree {
    let child = crossover(p1, p2, config, rng);
    if rng.gen_bool(p_mut) {
        subtree_mutation(&child, n, config, rng)
    } else {
        child
    }
}
