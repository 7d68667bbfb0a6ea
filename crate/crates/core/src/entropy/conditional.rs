use std::collections::HashMap;

use rayon::prelude::*;

use super::{first_max, first_min, Engine, EntropyReport, Partition, Witness, TIE_TOLERANCE};
use crate::boxworld::{AdaptiveStrategy, BoxState};
use crate::error::{Error, Result};
use crate::framework::State;
use crate::info;
use crate::quantum;
use crate::rational::{self, Rational};

fn names(subsystems: &[usize]) -> String {
    subsystems.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

/// A candidate for the conditional minimum: value plus what attains it.
struct Candidate {
    value: f64,
    witness: Witness,
}

impl Engine {
    /// Measurement entropy of a marginal, zero on the empty set.
    fn h_or_zero(&self, state: &State, subsystems: &[usize]) -> Result<(f64, bool)> {
        if subsystems.is_empty() {
            return Ok((0.0, true));
        }
        let r = self.hhat_of(state, subsystems)?;
        Ok((r.value_bits, r.exact))
    }

    /// `H(AB) - H(B)`.
    pub fn cond_standard(&self, state: &State, partition: &Partition) -> Result<EntropyReport> {
        partition.validate(state.num_subsystems())?;
        let ab: Vec<usize> = partition.a.iter().chain(&partition.b).copied().collect();
        let (h_ab, e1) = self.h_or_zero(state, &ab)?;
        let (h_b, e2) = self.h_or_zero(state, &partition.b)?;
        Ok(EntropyReport {
            quantity: format!("H({}|{})", names(&partition.a), names(&partition.b)),
            value_bits: h_ab - h_b,
            witness: Witness::Derived {
                terms: vec![format!("H({})={h_ab}", names(&ab)), format!("H({})={h_b}", names(&partition.b))],
            },
            exact: e1 && e2,
        })
    }

    /// Minimum over measurements on B of the average entropy of A after
    /// conditioning: the unit measurement, every fine-grained strategy, and
    /// every grouping of a strategy's outcomes when there are few enough.
    pub fn cond_plus(&self, state: &State, partition: &Partition) -> Result<EntropyReport> {
        partition.validate(state.num_subsystems())?;
        let quantity = format!("H+({}|{})", names(&partition.a), names(&partition.b));
        let Some(whole) = state.to_box() else {
            return Err(Error::Unsupported("conditional entropy with measurement on a quantum system".into()));
        };
        let ab: Vec<usize> = partition.a.iter().chain(&partition.b).copied().collect();
        let joint = whole.marginal(&ab)?;
        self.check_box(&joint)?;
        let na = partition.a.len();
        let a_pos: Vec<usize> = (0..na).collect();
        let b_pos: Vec<usize> = (na..ab.len()).collect();
        let a_sig = joint.signature().select(&a_pos);
        let a_strategies = self.strategies(&a_sig)?;

        let mut cache: HashMap<Vec<Rational>, f64> = HashMap::new();
        let mut hhat_a = |s: &BoxState| -> f64 {
            if let Some(&v) = cache.get(s.table()) {
                return v;
            }
            let v = if s.is_classical() {
                info::shannon_exact(s.table())
            } else {
                self.box_minimum(s, &a_strategies, info::shannon).0
            };
            cache.insert(s.table().to_vec(), v);
            v
        };

        let marginal_a = joint.marginal(&a_pos)?;
        let mut candidates = vec![Candidate { value: hhat_a(&marginal_a), witness: Witness::Unit }];
        if b_pos.is_empty() {
            return Ok(EntropyReport {
                quantity,
                value_bits: candidates[0].value,
                witness: Witness::Unit,
                exact: true,
            });
        }

        let b_sig = joint.signature().select(&b_pos);
        let b_strategies = self.strategies(&b_sig)?;
        for (k, strategy) in b_strategies.iter().enumerate() {
            let branches = branches(&joint, &b_pos, strategy)?;
            let fine: f64 = branches.iter().map(|(_, p, s)| rational::to_f64(p) * hhat_a(s)).sum();
            let tree = strategy.tree().to_string();
            candidates.push(Candidate {
                value: fine,
                witness: Witness::Conditioning { index: k, tree: tree.clone(), groups: None },
            });
            let n = branches.len();
            if n < 3 || n > self.limits.coarse_grain_max_outcomes {
                continue;
            }
            // Best grouping by dynamic programming over subsets of branches.
            let full = (1usize << n) - 1;
            let mut block = vec![0.0f64; full + 1];
            for mask in 1..=full {
                let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let weight = rational::sum(members.iter().map(|&i| &branches[i].1));
                let mut table = vec![Rational::default(); a_sig.table_len()];
                for &i in &members {
                    for (t, x) in table.iter_mut().zip(branches[i].2.table()) {
                        *t += &branches[i].1 * x;
                    }
                }
                for t in table.iter_mut() {
                    *t /= &weight;
                }
                let merged = BoxState::from_parts(a_sig.clone(), table);
                block[mask] = rational::to_f64(&weight) * hhat_a(&merged);
            }
            let mut best = vec![f64::INFINITY; full + 1];
            let mut choice = vec![0usize; full + 1];
            best[0] = 0.0;
            for mask in 1..=full {
                let low = mask & mask.wrapping_neg();
                let rest = mask ^ low;
                let mut sub = rest;
                loop {
                    let j = sub | low;
                    let v = block[j] + best[mask ^ j];
                    if v < best[mask] {
                        best[mask] = v;
                        choice[mask] = j;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
            }
            if best[full] < fine - TIE_TOLERANCE {
                let mut groups = Vec::new();
                let mut mask = full;
                while mask != 0 {
                    let j = choice[mask];
                    groups.push((0..n).filter(|i| j >> i & 1 == 1).map(|i| branches[i].0.clone()).collect());
                    mask ^= j;
                }
                candidates.push(Candidate {
                    value: best[full],
                    witness: Witness::Conditioning { index: k, tree, groups: Some(groups) },
                });
            }
        }
        let values: Vec<f64> = candidates.iter().map(|c| c.value).collect();
        let k = first_min(&values).expect("unit candidate");
        let c = candidates.swap_remove(k);
        Ok(EntropyReport { quantity, value_bits: c.value, witness: c.witness, exact: true })
    }

    /// `H(A) + H(B) - H(AB)`.
    pub fn mutual(&self, state: &State, partition: &Partition) -> Result<EntropyReport> {
        partition.validate(state.num_subsystems())?;
        let ab: Vec<usize> = partition.a.iter().chain(&partition.b).copied().collect();
        let (h_a, e1) = self.h_or_zero(state, &partition.a)?;
        let (h_b, e2) = self.h_or_zero(state, &partition.b)?;
        let (h_ab, e3) = self.h_or_zero(state, &ab)?;
        Ok(EntropyReport {
            quantity: format!("I({}:{})", names(&partition.a), names(&partition.b)),
            value_bits: h_a + h_b - h_ab,
            witness: Witness::Derived {
                terms: vec![
                    format!("H({})={h_a}", names(&partition.a)),
                    format!("H({})={h_b}", names(&partition.b)),
                    format!("H({})={h_ab}", names(&ab)),
                ],
            },
            exact: e1 && e2 && e3,
        })
    }

    /// `H(A) - H+(A|B)`.
    pub fn mutual_plus(&self, state: &State, partition: &Partition) -> Result<EntropyReport> {
        let (h_a, e1) = self.h_or_zero(state, &partition.a)?;
        let c = self.cond_plus(state, partition)?;
        Ok(EntropyReport {
            quantity: format!("I+({}:{})", names(&partition.a), names(&partition.b)),
            value_bits: h_a - c.value_bits,
            witness: c.witness,
            exact: e1 && c.exact,
        })
    }

    /// `H(A|C) - H(A|BC)` with the difference-form conditional entropy.
    pub fn conditional_mutual(&self, state: &State, a: &[usize], b: &[usize], c: &[usize]) -> Result<EntropyReport> {
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let h_ac = self.cond_standard(state, &Partition::new(a.to_vec(), c.to_vec()))?;
        let h_abc = self.cond_standard(state, &Partition::new(a.to_vec(), bc))?;
        Ok(EntropyReport {
            quantity: format!("I({}:{}|{})", names(a), names(b), names(c)),
            value_bits: h_ac.value_bits - h_abc.value_bits,
            witness: Witness::Derived {
                terms: vec![
                    format!("{}={}", h_ac.quantity, h_ac.value_bits),
                    format!("{}={}", h_abc.quantity, h_abc.value_bits),
                ],
            },
            exact: h_ac.exact && h_abc.exact,
        })
    }

    /// Largest classical mutual information between the outcomes of
    /// fine-grained measurements on A and on B.
    pub fn accessible_info(&self, state: &State, partition: &Partition) -> Result<EntropyReport> {
        partition.validate(state.num_subsystems())?;
        if partition.b.is_empty() {
            return Err(Error::OutOfRange("accessible information needs a second part".into()));
        }
        let quantity = format!("Iacc({}:{})", names(&partition.a), names(&partition.b));
        if let State::Quantum(_) = state {
            return Err(Error::Unsupported("accessible information of quantum states".into()));
        }
        let whole = state.to_box().expect("non-quantum state");
        let ab: Vec<usize> = partition.a.iter().chain(&partition.b).copied().collect();
        let joint = whole.marginal(&ab)?;
        self.check_box(&joint)?;
        let na = partition.a.len();
        let sig = joint.signature();
        let a_sig = sig.select(&(0..na).collect::<Vec<_>>());
        let b_sig = sig.select(&(na..ab.len()).collect::<Vec<_>>());
        let a_strategies = self.strategies(&a_sig)?;
        let b_strategies = self.strategies(&b_sig)?;
        let pairs = a_strategies.len() as u128 * b_strategies.len() as u128;
        if pairs > self.limits.max_strategies {
            return Err(Error::guard("strategy pairs", pairs, self.limits.max_strategies));
        }
        let table = joint.table_f64();
        let (ma, mb, nb, m) = (a_sig.output_count(), b_sig.output_count(), b_sig.input_count(), sig.output_count());
        let per_a: Vec<(f64, usize)> = a_strategies
            .par_iter()
            .map(|sa| {
                let values: Vec<f64> = b_strategies
                    .iter()
                    .map(|sb| {
                        let joint_p: Vec<Vec<f64>> = (0..ma)
                            .map(|oa| {
                                (0..mb)
                                    .map(|ob| {
                                        let i = sa.input_map()[oa] as usize * nb + sb.input_map()[ob] as usize;
                                        table[i * m + oa * mb + ob]
                                    })
                                    .collect()
                            })
                            .collect();
                        info::mutual_information(&joint_p)
                    })
                    .collect();
                let k = first_max(&values).expect("at least one strategy");
                (values[k], k)
            })
            .collect();
        let values: Vec<f64> = per_a.iter().map(|v| v.0).collect();
        let ka = first_max(&values).expect("at least one strategy");
        let kb = per_a[ka].1;
        Ok(EntropyReport {
            quantity,
            value_bits: values[ka],
            witness: Witness::StrategyPair {
                a_index: ka,
                a_tree: a_strategies[ka].tree().to_string(),
                b_index: kb,
                b_tree: b_strategies[kb].tree().to_string(),
            },
            exact: true,
        })
    }

    /// Quantum conditional entropy in difference form, for callers that
    /// hold a density matrix directly.
    pub fn cond_standard_quantum(&self, rho: &quantum::DensityMatrix, partition: &Partition) -> Result<f64> {
        partition.validate(rho.num_subsystems())?;
        quantum::conditional_vn(rho, &partition.a, &partition.b)
    }
}

/// Positive-probability branches of `strategy` run on the subsystems
/// `b_pos` of `joint`: outcome label, probability, conditional state of the
/// remaining subsystems.
pub(crate) fn branches(
    joint: &BoxState,
    b_pos: &[usize],
    strategy: &AdaptiveStrategy,
) -> Result<Vec<(String, Rational, BoxState)>> {
    let b_sig = joint.signature().select(b_pos);
    let mut out = Vec::new();
    for ob in 0..b_sig.output_count() {
        let ib = strategy.input_map()[ob] as usize;
        match joint.condition_on(b_pos, &b_sig.input_tuple(ib), &b_sig.output_tuple(ob)) {
            Ok((p, s)) => out.push((b_sig.output_label(ob), p, s)),
            Err(Error::ZeroProbability(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
