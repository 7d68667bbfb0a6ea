//! Adaptive fiducial strategies: decision trees that measure every subsystem
//! exactly once, choosing the next subsystem and its input from the outcomes
//! seen so far.
//!
//! Each leaf of a tree corresponds to exactly one joint output, so a tree is
//! characterised by the map from joint output to the joint input it used.
//! Enumeration deduplicates trees with equal maps.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::{BoxState, Signature};
use crate::error::{Error, Result};
use crate::framework::{Effect, Measurement};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyNode {
    Leaf,
    Measure {
        subsystem: usize,
        input: usize,
        /// One child per outcome of `subsystem`.
        branches: Vec<Arc<StrategyNode>>,
    },
}

impl fmt::Display for StrategyNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyNode::Leaf => Ok(()),
            StrategyNode::Measure { subsystem, input, branches } => {
                write!(f, "S{subsystem}<-{input}")?;
                if branches.iter().all(|b| **b == StrategyNode::Leaf) {
                    return Ok(());
                }
                if branches.windows(2).all(|w| w[0] == w[1]) {
                    return write!(f, " ; {}", branches[0]);
                }
                write!(f, " {{")?;
                for (o, b) in branches.iter().enumerate() {
                    if o > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{o}: {b}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// A fine-grained box-world measurement given by an adaptive tree.
#[derive(Debug, Clone)]
pub struct AdaptiveStrategy {
    root: Arc<StrategyNode>,
    /// Joint input index used for each joint output index.
    input_map: Vec<u32>,
}

impl AdaptiveStrategy {
    pub fn tree(&self) -> &StrategyNode {
        &self.root
    }

    pub fn input_map(&self) -> &[u32] {
        &self.input_map
    }

    /// Outcome probabilities `P(o | input_map[o])`, exact.
    pub fn apply(&self, state: &BoxState) -> Result<Vec<Rational>> {
        self.check(state)?;
        let m = state.signature().output_count();
        Ok(self.input_map.iter().enumerate().map(|(o, &i)| state.table()[i as usize * m + o].clone()).collect())
    }

    /// Same as [`apply`](Self::apply) on a float copy of the table.
    pub fn apply_f64(&self, table: &[f64], output_count: usize) -> Vec<f64> {
        self.input_map.iter().enumerate().map(|(o, &i)| table[i as usize * output_count + o]).collect()
    }

    /// Walks the tree, conditioning the state on each observed outcome.
    pub fn apply_by_conditioning(&self, state: &BoxState) -> Result<Vec<Rational>> {
        self.check(state)?;
        let sig = state.signature();
        let mut out = vec![Rational::zero(); sig.output_count()];
        let mut outcomes = vec![0usize; sig.len()];
        let all: Vec<usize> = (0..sig.len()).collect();
        walk(&self.root, state, &all, rational::one(), &mut outcomes, &mut out, sig)?;
        Ok(out)
    }

    /// The measurement whose effects are the indicator effects of each leaf.
    pub fn to_measurement(&self, signature: &Signature) -> Measurement {
        let m = signature.output_count();
        let outcomes = self
            .input_map
            .iter()
            .enumerate()
            .map(|(o, &i)| {
                let mut q = vec![Rational::zero(); signature.table_len()];
                q[i as usize * m + o] = rational::one();
                (signature.output_label(o), Effect::Box { signature: signature.clone(), coefficients: q })
            })
            .collect();
        Measurement::new_unchecked(outcomes)
    }

    fn check(&self, state: &BoxState) -> Result<()> {
        if self.input_map.len() != state.signature().output_count() {
            return Err(Error::SystemMismatch(format!(
                "strategy has {} leaves, state {} has {} joint outputs",
                self.input_map.len(),
                state.signature(),
                state.signature().output_count()
            )));
        }
        Ok(())
    }
}

fn walk(
    node: &StrategyNode,
    state: &BoxState,
    alive: &[usize],
    weight: Rational,
    outcomes: &mut [usize],
    out: &mut [Rational],
    sig: &Signature,
) -> Result<()> {
    match node {
        StrategyNode::Leaf => {
            out[sig.output_index(outcomes)] += weight;
            Ok(())
        }
        StrategyNode::Measure { subsystem, input, branches } => {
            let pos = alive
                .iter()
                .position(|s| s == subsystem)
                .ok_or_else(|| Error::InvalidMeasurement(format!("subsystem {subsystem} measured twice")))?;
            let rest: Vec<usize> = alive.iter().copied().filter(|s| s != subsystem).collect();
            for (o, child) in branches.iter().enumerate() {
                outcomes[*subsystem] = o;
                match state.condition(pos, *input, o) {
                    Ok((p, next)) => walk(child, &next, &rest, &weight * p, outcomes, out, sig)?,
                    Err(Error::ZeroProbability(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StrategyOptions {
    /// Measure subsystems in ascending order on every branch.
    pub fixed_order: bool,
}

/// Number of distinct decision trees before deduplication, saturating.
pub fn count_decision_trees(signature: &Signature) -> u128 {
    fn count(sig: &Signature, mask: u32, memo: &mut HashMap<u32, u128>) -> u128 {
        if mask == 0 {
            return 1;
        }
        if let Some(&c) = memo.get(&mask) {
            return c;
        }
        let mut total: u128 = 0;
        for (s, spec) in sig.boxes().iter().enumerate() {
            if mask & (1 << s) == 0 {
                continue;
            }
            let sub = count(sig, mask & !(1 << s), memo);
            let branches = sub.checked_pow(spec.outputs as u32).unwrap_or(u128::MAX);
            total = total.saturating_add(branches.saturating_mul(spec.inputs as u128));
        }
        memo.insert(mask, total);
        total
    }
    count(signature, full_mask(signature), &mut HashMap::new())
}

fn full_mask(sig: &Signature) -> u32 {
    ((1u64 << sig.len()) - 1) as u32
}

/// Strategy on the subsystems of one mask, with indices local to the mask
/// (members in ascending order).
#[derive(Clone)]
struct Partial {
    node: Arc<StrategyNode>,
    map: Vec<u32>,
}

/// All adaptive strategies on `signature`, deduplicated by their input map
/// and listed in deterministic enumeration order. Errors if any level of the
/// enumeration would examine more than `limit` trees.
pub fn enumerate_adaptive_strategies(
    signature: &Signature,
    options: StrategyOptions,
    limit: u128,
) -> Result<Vec<AdaptiveStrategy>> {
    if signature.len() > 16 {
        return Err(Error::guard("subsystems in strategy enumeration", signature.len() as u128, 16));
    }
    let mut memo = HashMap::new();
    let parts = unique(signature, full_mask(signature), options, limit, &mut memo)?;
    Ok(parts.iter().map(|p| AdaptiveStrategy { root: p.node.clone(), input_map: p.map.clone() }).collect())
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|s| mask & (1 << s) != 0).collect()
}

fn unique(
    sig: &Signature,
    mask: u32,
    options: StrategyOptions,
    limit: u128,
    memo: &mut HashMap<u32, Arc<Vec<Partial>>>,
) -> Result<Arc<Vec<Partial>>> {
    if let Some(found) = memo.get(&mask) {
        return Ok(found.clone());
    }
    if mask == 0 {
        let leaf = Arc::new(vec![Partial { node: Arc::new(StrategyNode::Leaf), map: vec![0] }]);
        memo.insert(mask, leaf.clone());
        return Ok(leaf);
    }
    let mem = members(mask);
    let local = sig.select(&mem);
    let candidates: Vec<usize> = if options.fixed_order { vec![mem[0]] } else { mem.clone() };

    let mut children = Vec::with_capacity(candidates.len());
    let mut needed: u128 = 0;
    for &s in &candidates {
        let sub = unique(sig, mask & !(1 << s), options, limit, memo)?;
        let spec = sig.boxes()[s];
        let combos = (sub.len() as u128).checked_pow(spec.outputs as u32).unwrap_or(u128::MAX);
        needed = needed.saturating_add(combos.saturating_mul(spec.inputs as u128));
        children.push(sub);
    }
    if needed > limit {
        return Err(Error::guard("adaptive strategies", needed, limit));
    }

    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = Vec::new();
    for (&s, sub) in candidates.iter().zip(&children) {
        let pos = mem.iter().position(|&x| x == s).expect("member");
        let rest: Vec<usize> = mem.iter().copied().filter(|&x| x != s).collect();
        let rest_sig = sig.select(&rest);
        let spec = sig.boxes()[s];
        for x in 0..spec.inputs {
            let mut pick = vec![0usize; spec.outputs];
            loop {
                let map = combine(&local, &rest_sig, pos, x, &pick, sub);
                if seen.insert(map.clone()) {
                    let branches = pick.iter().map(|&c| sub[c].node.clone()).collect();
                    let node = Arc::new(StrategyNode::Measure { subsystem: s, input: x, branches });
                    out.push(Partial { node, map });
                }
                if !advance(&mut pick, sub.len()) {
                    break;
                }
            }
        }
    }
    let out = Arc::new(out);
    memo.insert(mask, out.clone());
    Ok(out)
}

/// Input map of "measure local subsystem `pos` with input `x`, then follow
/// `sub[pick[o]]` on outcome `o`".
fn combine(local: &Signature, rest_sig: &Signature, pos: usize, x: usize, pick: &[usize], sub: &[Partial]) -> Vec<u32> {
    let m = local.output_count();
    let mut map = Vec::with_capacity(m);
    for o in 0..m {
        let mut outs = local.output_tuple(o);
        let first = outs.remove(pos);
        let child = &sub[pick[first]];
        let rest_in = child.map[rest_sig.output_index(&outs)] as usize;
        let mut ins = rest_sig.input_tuple(rest_in);
        ins.insert(pos, x);
        map.push(local.input_index(&ins) as u32);
    }
    map
}

fn advance(pick: &mut [usize], base: usize) -> bool {
    for d in pick.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
