//! Box world: non-signalling conditional probability tables.
//!
//! A state over subsystems `0..n` is stored as one flat table. Joint inputs
//! are the outer index and joint outputs the inner index, both in mixed
//! radix with subsystem 0 most significant:
//!
//! ```text
//! table[input_index * output_count + output_index] = P(outputs | inputs)
//! ```
//!
//! Classical boxes are subsystems with a single input.

mod polytope;
mod strategy;

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SignallingViolation};
use crate::rational::{self, Rational};

pub use polytope::{affine_hull, enumerate_pure_states, AffineHull, VertexSet};
pub use strategy::{
    count_decision_trees, enumerate_adaptive_strategies, AdaptiveStrategy, StrategyNode, StrategyOptions,
};

/// Input and output alphabet sizes of one elementary box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxSpec {
    pub inputs: usize,
    pub outputs: usize,
}

impl BoxSpec {
    pub const fn new(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs }
    }

    /// A classical box: one input, `outputs` letters.
    pub const fn classical(outputs: usize) -> Self {
        Self { inputs: 1, outputs }
    }

    pub fn is_classical(&self) -> bool {
        self.inputs == 1
    }
}

/// Ordered list of elementary boxes making up a composite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature(Vec<BoxSpec>);

impl Signature {
    pub fn new(boxes: Vec<BoxSpec>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::InvalidSystem("box-world signature is empty".into()));
        }
        if let Some(b) = boxes.iter().find(|b| b.inputs == 0 || b.outputs == 0) {
            return Err(Error::InvalidSystem(format!("box with {} inputs and {} outputs", b.inputs, b.outputs)));
        }
        Ok(Self(boxes))
    }

    /// Signature with no subsystems; only used internally for the empty
    /// remainder of a full conditioning.
    pub(crate) fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn boxes(&self) -> &[BoxSpec] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn input_count(&self) -> usize {
        self.0.iter().map(|b| b.inputs).product()
    }

    pub fn output_count(&self) -> usize {
        self.0.iter().map(|b| b.outputs).product()
    }

    pub fn table_len(&self) -> usize {
        self.input_count() * self.output_count()
    }

    pub fn input_tuple(&self, index: usize) -> Vec<usize> {
        decode(index, self.0.iter().map(|b| b.inputs))
    }

    pub fn output_tuple(&self, index: usize) -> Vec<usize> {
        decode(index, self.0.iter().map(|b| b.outputs))
    }

    pub fn input_index(&self, tuple: &[usize]) -> usize {
        encode(tuple, self.0.iter().map(|b| b.inputs))
    }

    pub fn output_index(&self, tuple: &[usize]) -> usize {
        encode(tuple, self.0.iter().map(|b| b.outputs))
    }

    pub fn select(&self, subsystems: &[usize]) -> Signature {
        Signature(subsystems.iter().map(|&s| self.0[s]).collect())
    }

    pub fn concat(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Outcome label for a joint output index, e.g. `"0:1"`.
    pub fn output_label(&self, index: usize) -> String {
        label(&self.output_tuple(index))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| format!("{}:{}", b.inputs, b.outputs)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Delimiter between per-subsystem symbols in outcome labels.
pub const LABEL_DELIMITER: char = ':';

pub fn label(symbols: &[usize]) -> String {
    let parts: Vec<String> = symbols.iter().map(usize::to_string).collect();
    parts.join(&LABEL_DELIMITER.to_string())
}

pub(crate) fn decode(mut index: usize, radices: impl DoubleEndedIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = radices
        .rev()
        .map(|r| {
            let d = index % r;
            index /= r;
            d
        })
        .collect();
    out.reverse();
    out
}

pub(crate) fn encode(tuple: &[usize], radices: impl Iterator<Item = usize>) -> usize {
    tuple.iter().zip(radices).fold(0, |acc, (&d, r)| acc * r + d)
}

/// A validated non-signalling box-world state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxState {
    signature: Signature,
    table: Vec<Rational>,
}

/// Checks nonnegativity, normalization and every non-signalling condition.
pub fn validate_nonsignalling(signature: Signature, table: Vec<Rational>) -> Result<BoxState> {
    if table.len() != signature.table_len() {
        return Err(Error::InvalidState(format!(
            "table has {} entries, signature {} needs {}",
            table.len(),
            signature,
            signature.table_len()
        )));
    }
    if let Some(pos) = table.iter().position(|p| p < &Rational::zero()) {
        return Err(Error::InvalidState(format!("negative entry at index {pos}")));
    }
    let m = signature.output_count();
    for (i, row) in table.chunks(m).enumerate() {
        let total = rational::sum(row);
        if !total.is_one() {
            return Err(Error::Normalization(format!(
                "outputs for joint input {:?} sum to {}",
                signature.input_tuple(i),
                rational::format(&total)
            )));
        }
    }
    if let Some(v) = find_signalling(&signature, &table) {
        return Err(Error::Signalling(v));
    }
    Ok(BoxState { signature, table })
}

fn find_signalling(sig: &Signature, table: &[Rational]) -> Option<SignallingViolation> {
    let m = sig.output_count();
    let boxes = sig.boxes();
    for (k, spec) in boxes.iter().enumerate() {
        if spec.inputs < 2 {
            continue;
        }
        let rest: Vec<usize> = (0..boxes.len()).filter(|&j| j != k).collect();
        let rest_sig = sig.select(&rest);
        for i in 0..sig.input_count() {
            let mut inputs = sig.input_tuple(i);
            if inputs[k] != 0 {
                continue;
            }
            let reference = marginal_row(sig, table, i, k, &rest_sig, m);
            for x in 1..spec.inputs {
                inputs[k] = x;
                let other = marginal_row(sig, table, sig.input_index(&inputs), k, &rest_sig, m);
                if let Some(pos) = (0..reference.len()).find(|&o| reference[o] != other[o]) {
                    inputs[k] = 0;
                    return Some(SignallingViolation {
                        subsystem: k,
                        inputs: (0, x),
                        context_inputs: inputs,
                        context_outputs: rest_sig.output_tuple(pos),
                    });
                }
            }
        }
    }
    None
}

/// Row of `P(outputs of rest | inputs)` obtained by summing out subsystem `k`.
fn marginal_row(
    sig: &Signature,
    table: &[Rational],
    input_index: usize,
    k: usize,
    rest_sig: &Signature,
    m: usize,
) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); rest_sig.output_count()];
    for o in 0..m {
        let p = &table[input_index * m + o];
        if p.is_zero() {
            continue;
        }
        let mut outs = sig.output_tuple(o);
        outs.remove(k);
        row[rest_sig.output_index(&outs)] += p;
    }
    row
}

impl BoxState {
    /// Builds and validates a state.
    pub fn new(signature: Signature, table: Vec<Rational>) -> Result<Self> {
        validate_nonsignalling(signature, table)
    }

    /// For operations that preserve validity by construction.
    pub(crate) fn from_parts(signature: Signature, table: Vec<Rational>) -> Self {
        debug_assert_eq!(table.len(), signature.table_len());
        Self { signature, table }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn num_subsystems(&self) -> usize {
        self.signature.len()
    }

    pub fn prob(&self, inputs: &[usize], outputs: &[usize]) -> &Rational {
        let m = self.signature.output_count();
        &self.table[self.signature.input_index(inputs) * m + self.signature.output_index(outputs)]
    }

    pub fn table_f64(&self) -> Vec<f64> {
        self.table.iter().map(rational::to_f64).collect()
    }

    /// Classical-only states have a single joint input.
    pub fn is_classical(&self) -> bool {
        self.signature.boxes().iter().all(BoxSpec::is_classical)
    }

    /// Uniformly random outputs for every input.
    pub fn uniform(signature: Signature) -> Self {
        let m = signature.output_count();
        let p = rational::ratio(1, m as i64);
        let table = vec![p; signature.table_len()];
        Self::from_parts(signature, table)
    }

    /// Product of local deterministic boxes; `responses[k][x]` is the output
    /// of subsystem `k` on input `x`.
    pub fn deterministic(signature: Signature, responses: &[Vec<usize>]) -> Result<Self> {
        if responses.len() != signature.len() {
            return Err(Error::SystemMismatch("one response function per subsystem".into()));
        }
        for (spec, r) in signature.boxes().iter().zip(responses) {
            if r.len() != spec.inputs || r.iter().any(|&o| o >= spec.outputs) {
                return Err(Error::OutOfRange(format!("response {r:?} does not fit box {spec:?}")));
            }
        }
        let m = signature.output_count();
        let mut table = vec![Rational::zero(); signature.table_len()];
        for i in 0..signature.input_count() {
            let ins = signature.input_tuple(i);
            let outs: Vec<usize> = ins.iter().zip(responses).map(|(&x, r)| r[x]).collect();
            table[i * m + signature.output_index(&outs)] = Rational::one();
        }
        Ok(Self::from_parts(signature, table))
    }

    /// Classical distribution over the joint alphabet of `signature`, which
    /// must consist of single-input boxes.
    pub fn classical(signature: Signature, probs: Vec<Rational>) -> Result<Self> {
        if !signature.boxes().iter().all(BoxSpec::is_classical) {
            return Err(Error::InvalidSystem("classical boxes have one input".into()));
        }
        validate_nonsignalling(signature, probs)
    }

    /// Tensor product; subsystems of `other` follow those of `self`.
    pub fn tensor(&self, other: &BoxState) -> BoxState {
        let sig = self.signature.concat(&other.signature);
        let (ma, mb) = (self.signature.output_count(), other.signature.output_count());
        let (ka, kb) = (self.signature.input_count(), other.signature.input_count());
        let mut table = Vec::with_capacity(sig.table_len());
        for ia in 0..ka {
            for ib in 0..kb {
                for oa in 0..ma {
                    let pa = &self.table[ia * ma + oa];
                    for ob in 0..mb {
                        table.push(pa * &other.table[ib * mb + ob]);
                    }
                }
            }
        }
        BoxState::from_parts(sig, table)
    }

    /// Reduced state on `keep`, in the given order. Discarded subsystems
    /// are fed input 0; non-signalling makes the choice irrelevant.
    pub fn marginal(&self, keep: &[usize]) -> Result<BoxState> {
        self.check_subsystems(keep)?;
        let sig = &self.signature;
        let new_sig = sig.select(keep);
        let m = sig.output_count();
        let nm = new_sig.output_count();
        let mut table = vec![Rational::zero(); new_sig.table_len()];
        let mut full_in = vec![0usize; sig.len()];
        for ni in 0..new_sig.input_count() {
            let kin = new_sig.input_tuple(ni);
            full_in.iter_mut().for_each(|x| *x = 0);
            for (&s, &x) in keep.iter().zip(&kin) {
                full_in[s] = x;
            }
            let i = sig.input_index(&full_in);
            for o in 0..m {
                let p = &self.table[i * m + o];
                if p.is_zero() {
                    continue;
                }
                let outs = sig.output_tuple(o);
                let kout: Vec<usize> = keep.iter().map(|&s| outs[s]).collect();
                table[ni * nm + new_sig.output_index(&kout)] += p;
            }
        }
        Ok(BoxState::from_parts(new_sig, table))
    }

    /// Conditions on subsystems `on` having been measured with `inputs` and
    /// giving `outputs`. Returns the branch probability and the normalized
    /// state of the remaining subsystems (in their original order).
    pub fn condition_on(&self, on: &[usize], inputs: &[usize], outputs: &[usize]) -> Result<(Rational, BoxState)> {
        self.check_subsystems(on)?;
        let sig = &self.signature;
        for ((&s, &x), &o) in on.iter().zip(inputs).zip(outputs) {
            let spec = sig.boxes()[s];
            if x >= spec.inputs || o >= spec.outputs {
                return Err(Error::OutOfRange(format!("input {x} / output {o} for subsystem {s} with {spec:?}")));
            }
        }
        let rest: Vec<usize> = (0..sig.len()).filter(|s| !on.contains(s)).collect();
        let rest_sig = sig.select(&rest);
        let m = sig.output_count();
        let rm = rest_sig.output_count();
        let mut full_in = vec![0usize; sig.len()];
        let mut full_out = vec![0usize; sig.len()];
        for ((&s, &x), &o) in on.iter().zip(inputs).zip(outputs) {
            full_in[s] = x;
            full_out[s] = o;
        }
        let mut table = Vec::with_capacity(rest_sig.table_len());
        for ri in 0..rest_sig.input_count() {
            for (&s, x) in rest.iter().zip(rest_sig.input_tuple(ri)) {
                full_in[s] = x;
            }
            let i = sig.input_index(&full_in);
            for ro in 0..rm {
                for (&s, o) in rest.iter().zip(rest_sig.output_tuple(ro)) {
                    full_out[s] = o;
                }
                table.push(self.table[i * m + sig.output_index(&full_out)].clone());
            }
        }
        let p = rational::sum(&table[..rm]);
        if p.is_zero() {
            return Err(Error::ZeroProbability(format!(
                "subsystems {on:?} with inputs {inputs:?} give outputs {outputs:?} with probability 0"
            )));
        }
        for x in table.iter_mut() {
            *x /= &p;
        }
        if rest.is_empty() {
            return Ok((p, BoxState::from_parts(Signature::empty(), table)));
        }
        Ok((p, BoxState::from_parts(rest_sig, table)))
    }

    /// Conditions on one subsystem's fiducial outcome.
    pub fn condition(&self, subsystem: usize, input: usize, outcome: usize) -> Result<(Rational, BoxState)> {
        self.condition_on(&[subsystem], &[input], &[outcome])
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, weight: &Rational, other: &BoxState) -> Result<BoxState> {
        if self.signature != other.signature {
            return Err(Error::SystemMismatch(format!("{} vs {}", self.signature, other.signature)));
        }
        if weight < &Rational::zero() || weight > &Rational::one() {
            return Err(Error::OutOfRange(format!("mixing weight {}", rational::format(weight))));
        }
        let rest = Rational::one() - weight;
        let table = self.table.iter().zip(&other.table).map(|(a, b)| weight * a + &rest * b).collect();
        Ok(BoxState::from_parts(self.signature.clone(), table))
    }

    /// Single-subsystem marginals.
    pub fn local_marginals(&self) -> Vec<BoxState> {
        (0..self.num_subsystems()).map(|s| self.marginal(&[s]).expect("subsystem in range")).collect()
    }

    /// True if the state equals the product of its single-subsystem marginals.
    pub fn is_product(&self) -> bool {
        let mut parts = self.local_marginals().into_iter();
        let first = parts.next().expect("non-empty signature");
        parts.fold(first, |acc, p| acc.tensor(&p)) == *self
    }

    fn check_subsystems(&self, subsystems: &[usize]) -> Result<()> {
        let n = self.num_subsystems();
        for (i, &s) in subsystems.iter().enumerate() {
            if s >= n {
                return Err(Error::OutOfRange(format!("subsystem {s} of a {n}-partite state")));
            }
            if subsystems[..i].contains(&s) {
                return Err(Error::OutOfRange(format!("subsystem {s} listed twice")));
            }
        }
        Ok(())
    }
}

fn binary_pair() -> Signature {
    Signature(vec![BoxSpec::new(2, 2), BoxSpec::new(2, 2)])
}

/// Bipartite binary box with `a xor b = x and y` with probability `p` and
/// uniform otherwise.
pub fn noisy_pr(p: &Rational) -> Result<BoxState> {
    if p < &rational::ratio(1, 2) || p > &Rational::one() {
        return Err(Error::OutOfRange(format!("PR-box correctness {} must lie in [1/2, 1]", rational::format(p))));
    }
    let sig = binary_pair();
    let good = p / rational::int(2);
    let bad = (Rational::one() - p) / rational::int(2);
    let mut table = Vec::with_capacity(16);
    for i in 0..4 {
        let (x, y) = (i >> 1, i & 1);
        for o in 0..4 {
            let (a, b) = (o >> 1, o & 1);
            table.push(if a ^ b == x & y { good.clone() } else { bad.clone() });
        }
    }
    Ok(BoxState::from_parts(sig, table))
}

pub fn pr_box() -> BoxState {
    noisy_pr(&Rational::one()).expect("p = 1 is in range")
}

/// CHSH value `E00 + E01 + E10 - E11` for a bipartite binary box.
pub fn chsh_value(state: &BoxState) -> Result<Rational> {
    if state.signature != binary_pair() {
        return Err(Error::SystemMismatch(format!(
            "CHSH needs two binary-input binary-output boxes, got {}",
            state.signature
        )));
    }
    let correlator = |x: usize, y: usize| -> Rational {
        let i = x * 2 + y;
        (0..4).fold(Rational::zero(), |acc, o| {
            let p = &state.table[i * 4 + o];
            if (o >> 1) ^ (o & 1) == 0 {
                acc + p
            } else {
                acc - p
            }
        })
    };
    Ok(correlator(0, 0) + correlator(0, 1) + correlator(1, 0) - correlator(1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn binary_box() -> BoxSpec {
        BoxSpec::new(2, 2)
    }

    #[test]
    fn mixed_radix_round_trips() {
        let sig = Signature::new(vec![BoxSpec::new(2, 3), BoxSpec::new(3, 2)]).unwrap();
        for o in 0..sig.output_count() {
            assert_eq!(sig.output_index(&sig.output_tuple(o)), o);
        }
        assert_eq!(sig.output_tuple(5), vec![2, 1]);
        assert_eq!(sig.output_label(5), "2:1");
    }

    #[test]
    fn pr_box_inputs_zero_gives_perfect_correlation() {
        let pr = pr_box();
        assert_eq!(pr.prob(&[0, 0], &[0, 0]), &ratio(1, 2));
        assert_eq!(pr.prob(&[0, 0], &[1, 1]), &ratio(1, 2));
        assert_eq!(pr.prob(&[0, 0], &[0, 1]), &int(0));
        assert_eq!(pr.prob(&[1, 1], &[0, 1]), &ratio(1, 2));
        assert!(validate_nonsignalling(pr.signature.clone(), pr.table.clone()).is_ok());
    }

    #[test]
    fn signalling_table_names_the_subsystem() {
        // Subsystem 0 copies the input of subsystem 1.
        let sig = Signature::new(vec![binary_box(), binary_box()]).unwrap();
        let mut table = vec![int(0); 16];
        for i in 0..4 {
            let y = i & 1;
            table[i * 4 + y * 2] = int(1);
        }
        match validate_nonsignalling(sig, table) {
            Err(Error::Signalling(v)) => {
                assert_eq!(v.subsystem, 1);
                assert_eq!(v.inputs, (0, 1));
            }
            other => panic!("expected signalling violation, got {other:?}"),
        }
    }

    #[test]
    fn normalization_failure_is_reported() {
        let sig = Signature::new(vec![binary_box()]).unwrap();
        let err = validate_nonsignalling(sig, vec![ratio(1, 2), ratio(1, 4), int(1), int(0)]).unwrap_err();
        assert!(matches!(err, Error::Normalization(_)));
    }

    #[test]
    fn pr_marginals_are_uniform() {
        let pr = pr_box();
        let uniform = BoxState::uniform(Signature::new(vec![binary_box()]).unwrap());
        assert_eq!(pr.marginal(&[0]).unwrap(), uniform);
        assert_eq!(pr.marginal(&[1]).unwrap(), uniform);
    }

    #[test]
    fn conditioning_pr_on_bob_zero_zero() {
        // P(a | x, y=0, b=0) = 2 P(a 0 | x 0): a = 0 for either x.
        let (p, alice) = pr_box().condition(1, 0, 0).unwrap();
        assert_eq!(p, ratio(1, 2));
        assert_eq!(alice.prob(&[0], &[0]), &int(1));
        assert_eq!(alice.prob(&[1], &[0]), &int(1));
    }

    #[test]
    fn zero_probability_condition_errors() {
        let det = BoxState::deterministic(
            Signature::new(vec![binary_box(), binary_box()]).unwrap(),
            &[vec![0, 0], vec![1, 1]],
        )
        .unwrap();
        assert!(matches!(det.condition(0, 0, 1), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn tensor_then_marginal_is_identity() {
        let pr = pr_box();
        let det = BoxState::deterministic(Signature::new(vec![binary_box()]).unwrap(), &[vec![1, 0]]).unwrap();
        let t = pr.tensor(&det);
        assert_eq!(t.marginal(&[0, 1]).unwrap(), pr);
        assert_eq!(t.marginal(&[2]).unwrap(), det);
        assert!(!pr.is_product());
        assert!(t.marginal(&[0, 2]).unwrap().is_product());
    }

    #[test]
    fn chsh_reference_values() {
        assert_eq!(chsh_value(&pr_box()).unwrap(), int(4));
        let zeros = BoxState::deterministic(binary_pair(), &[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(chsh_value(&zeros).unwrap(), int(2));
        assert_eq!(chsh_value(&BoxState::uniform(binary_pair())).unwrap(), int(0));
        let single = BoxState::uniform(Signature::new(vec![binary_box()]).unwrap());
        assert!(chsh_value(&single).is_err());
    }

    #[test]
    fn noisy_pr_endpoints() {
        assert_eq!(noisy_pr(&int(1)).unwrap(), pr_box());
        let half = noisy_pr(&ratio(1, 2)).unwrap();
        let u = BoxState::uniform(Signature::new(vec![binary_box()]).unwrap());
        assert_eq!(half, u.tensor(&u));
        assert!(noisy_pr(&ratio(2, 5)).is_err());
        assert!(noisy_pr(&ratio(3, 2)).is_err());
    }
}
