//! Protocol states built by explicit wirings: local operations that measure
//! some subsystems, compute classical values from the outcomes, and emit
//! classical boxes alongside the untouched subsystems.

use num_traits::Zero;

use crate::boxworld::{noisy_pr, BoxSpec, BoxState, Signature};
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::info;
use crate::rational::{self, Rational};

/// Classical expression over the register file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(usize),
    /// Value stored by the `k`-th register-writing instruction.
    Reg(usize),
    Xor(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    /// Flips the lowest bit.
    Not(Box<Expr>),
}

impl Expr {
    pub fn reg(k: usize) -> Self {
        Expr::Reg(k)
    }

    pub fn xor(a: Expr, b: Expr) -> Self {
        Expr::Xor(Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn not(a: Expr) -> Self {
        Expr::Not(Box::new(a))
    }

    fn eval(&self, regs: &[usize]) -> usize {
        match self {
            Expr::Const(c) => *c,
            Expr::Reg(k) => regs[*k],
            Expr::Xor(a, b) => a.eval(regs) ^ b.eval(regs),
            Expr::And(a, b) => a.eval(regs) & b.eval(regs),
            Expr::Not(a) => a.eval(regs) ^ 1,
        }
    }

    fn max_register(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Reg(k) => Some(*k),
            Expr::Xor(a, b) | Expr::And(a, b) => a.max_register().max(b.max_register()),
            Expr::Not(a) => a.max_register(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Measures `subsystem` with the given input; stores the outcome.
    Measure { subsystem: usize, input: Expr },
    /// Stores a computed value.
    Compute(Expr),
}

/// Final step: classical boxes `(value, alphabet size)` followed by the
/// listed unmeasured subsystems, in that order. Unmeasured subsystems not
/// listed are discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emit {
    pub classical: Vec<(Expr, usize)>,
    pub keep: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wiring {
    pub instructions: Vec<Instruction>,
    pub emit: Emit,
}

impl Wiring {
    /// Emits every subsystem unchanged.
    pub fn identity(n: usize) -> Self {
        Self { instructions: vec![], emit: Emit { classical: vec![], keep: (0..n).collect() } }
    }

    /// Measured subsystems in order. Checks register references, double
    /// measurement and the emit list.
    fn check(&self, n: usize) -> Result<Vec<usize>> {
        let mut measured = Vec::new();
        let reads = |e: &Expr, available: usize| -> Result<()> {
            match e.max_register() {
                Some(k) if k >= available => {
                    Err(Error::InvalidWiring(format!("register {k} read before it is written")))
                }
                _ => Ok(()),
            }
        };
        for (k, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instruction::Measure { subsystem, input } => {
                    if *subsystem >= n {
                        return Err(Error::InvalidWiring(format!("subsystem {subsystem} of a {n}-partite state")));
                    }
                    if measured.contains(subsystem) {
                        return Err(Error::InvalidWiring(format!("subsystem {subsystem} measured twice")));
                    }
                    reads(input, k)?;
                    measured.push(*subsystem);
                }
                Instruction::Compute(e) => reads(e, k)?,
            }
        }
        let registers = self.instructions.len();
        for (e, alphabet) in &self.emit.classical {
            reads(e, registers)?;
            if *alphabet == 0 {
                return Err(Error::InvalidWiring("emitted alphabet of size 0".into()));
            }
        }
        for (i, s) in self.emit.keep.iter().enumerate() {
            if *s >= n || measured.contains(s) || self.emit.keep[..i].contains(s) {
                return Err(Error::InvalidWiring(format!("cannot keep subsystem {s}")));
            }
        }
        if self.emit.classical.is_empty() && self.emit.keep.is_empty() {
            return Err(Error::InvalidWiring("wiring emits nothing".into()));
        }
        Ok(measured)
    }
}

/// Exact output state of `wiring` applied to `state`, re-validated.
pub fn apply_wiring(state: &BoxState, wiring: &Wiring) -> Result<BoxState> {
    let sig = state.signature();
    let n = sig.len();
    let measured = wiring.check(n)?;
    let kept = &wiring.emit.keep;
    let discarded: Vec<usize> = (0..n).filter(|s| !measured.contains(s) && !kept.contains(s)).collect();

    let mut out_boxes: Vec<BoxSpec> = wiring.emit.classical.iter().map(|&(_, a)| BoxSpec::classical(a)).collect();
    out_boxes.extend(kept.iter().map(|&s| sig.boxes()[s]));
    let out_sig = Signature::new(out_boxes)?;
    let n_classical = wiring.emit.classical.len();
    let mut table = vec![Rational::zero(); out_sig.table_len()];

    let measured_sig = sig.select(&measured);
    let kept_sig = sig.select(kept);
    let discarded_sig = sig.select(&discarded);
    let m = sig.output_count();
    let out_m = out_sig.output_count();
    let mut full_in = vec![0usize; n];
    let mut full_out = vec![0usize; n];

    for om in 0..measured_sig.output_count() {
        let outcomes = measured_sig.output_tuple(om);
        let mut regs = Vec::with_capacity(wiring.instructions.len());
        let mut next = 0;
        for ins in &wiring.instructions {
            match ins {
                Instruction::Measure { subsystem, input } => {
                    let x = input.eval(&regs);
                    if x >= sig.boxes()[*subsystem].inputs {
                        return Err(Error::InvalidWiring(format!(
                            "input {x} for subsystem {subsystem} with {} inputs",
                            sig.boxes()[*subsystem].inputs
                        )));
                    }
                    full_in[*subsystem] = x;
                    full_out[*subsystem] = outcomes[next];
                    regs.push(outcomes[next]);
                    next += 1;
                }
                Instruction::Compute(e) => regs.push(e.eval(&regs)),
            }
        }
        let mut emitted = Vec::with_capacity(n_classical);
        for (e, alphabet) in &wiring.emit.classical {
            let v = e.eval(&regs);
            if v >= *alphabet {
                return Err(Error::InvalidWiring(format!("emitted value {v} outside alphabet of size {alphabet}")));
            }
            emitted.push(v);
        }
        for &s in &discarded {
            full_in[s] = 0;
        }
        for ik in 0..kept_sig.input_count() {
            for (&s, x) in kept.iter().zip(kept_sig.input_tuple(ik)) {
                full_in[s] = x;
            }
            let i = sig.input_index(&full_in);
            for ok in 0..kept_sig.output_count() {
                for (&s, o) in kept.iter().zip(kept_sig.output_tuple(ok)) {
                    full_out[s] = o;
                }
                let mut out_tuple = emitted.clone();
                out_tuple.extend(kept_sig.output_tuple(ok));
                let cell = ik * out_m + out_sig.output_index(&out_tuple);
                for od in 0..discarded_sig.output_count() {
                    for (&s, o) in discarded.iter().zip(discarded_sig.output_tuple(od)) {
                        full_out[s] = o;
                    }
                    table[cell] += &state.table()[i * m + sig.output_index(&full_out)];
                }
            }
        }
    }
    BoxState::new(out_sig, table)
}

fn uniform_bit() -> BoxState {
    ClassicalState::uniform(2).as_box()
}

/// Parity bit X, then Alice's and Bob's halves of a noisy PR box.
fn rac_wiring() -> Wiring {
    Wiring {
        instructions: vec![
            Instruction::Measure { subsystem: 0, input: Expr::Const(0) },
            Instruction::Measure { subsystem: 1, input: Expr::reg(0) },
        ],
        emit: Emit { classical: vec![(Expr::reg(1), 2), (Expr::xor(Expr::reg(0), Expr::reg(1)), 2)], keep: vec![2] },
    }
}

/// Random access encoding of two bits into one PR box half, with
/// subsystems `[X0, X1, Z]`: `P(x0 x1 z_out | z_in) = p/4` if
/// `z_out = x_{z_in}` and `(1 - p)/4` otherwise.
pub fn build_rac_state_noisy(p: &Rational) -> Result<BoxState> {
    apply_wiring(&uniform_bit().tensor(&noisy_pr(p)?), &rac_wiring())
}

/// [`build_rac_state_noisy`] with a perfect PR box.
pub fn build_rac_state() -> BoxState {
    build_rac_state_noisy(&rational::one()).expect("p = 1 is in range")
}

/// Bits A0, A1, then Alice's and Bob's halves of a noisy PR box.
fn ic_wiring() -> Wiring {
    Wiring {
        instructions: vec![
            Instruction::Measure { subsystem: 0, input: Expr::Const(0) },
            Instruction::Measure { subsystem: 1, input: Expr::Const(0) },
            Instruction::Compute(Expr::xor(Expr::reg(0), Expr::reg(1))),
            Instruction::Measure { subsystem: 2, input: Expr::reg(2) },
            Instruction::Compute(Expr::xor(Expr::reg(3), Expr::reg(0))),
        ],
        emit: Emit { classical: vec![(Expr::reg(0), 2), (Expr::reg(1), 2), (Expr::reg(4), 2)], keep: vec![3] },
    }
}

/// Two uniform bits, a one-bit message and Bob's PR box half, with
/// subsystems `[A0, A1, M, Z]`: at `p = 1`, `P = 1/8` iff
/// `z_out = a_{z_in} XOR m`.
pub fn build_ic_state_noisy(p: &Rational) -> Result<BoxState> {
    let input = uniform_bit().tensor(&uniform_bit()).tensor(&noisy_pr(p)?);
    apply_wiring(&input, &ic_wiring())
}

pub fn build_ic_state() -> BoxState {
    build_ic_state_noisy(&rational::one()).expect("p = 1 is in range")
}

/// `I(a0; b | t=0) + I(a1; b | t=1)` where Bob inputs `z_in = t` and
/// guesses `b = z_out XOR m`.
pub fn ic_inequality_value(state: &BoxState) -> Result<f64> {
    let expected =
        Signature::new(vec![BoxSpec::classical(2), BoxSpec::classical(2), BoxSpec::classical(2), BoxSpec::new(2, 2)])?;
    if state.signature() != &expected {
        return Err(Error::SystemMismatch(format!(
            "expected an IC-shaped state {expected}, got {}",
            state.signature()
        )));
    }
    let mut total = 0.0;
    for t in 0..2 {
        let mut joint = vec![vec![0.0; 2]; 2];
        for o in 0..16 {
            let (a0, a1, msg, z) = (o >> 3 & 1, o >> 2 & 1, o >> 1 & 1, o & 1);
            let a = if t == 0 { a0 } else { a1 };
            joint[a][z ^ msg] += rational::to_f64(state.prob(&[0, 0, 0, t], &[a0, a1, msg, z]));
        }
        total += info::mutual_information(&joint);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxworld::pr_box;
    use crate::rational::ratio;

    #[test]
    fn identity_wiring_returns_input() {
        let s = uniform_bit().tensor(&pr_box());
        assert_eq!(apply_wiring(&s, &Wiring::identity(3)).unwrap(), s);
    }

    /// Checked cell by cell against the defining rule.
    #[test]
    fn rac_state_table() {
        let s = build_rac_state();
        for z_in in 0..2 {
            for o in 0..8 {
                let (x0, x1, z) = (o >> 2 & 1, o >> 1 & 1, o & 1);
                let want = if z == [x0, x1][z_in] { ratio(1, 4) } else { ratio(0, 1) };
                assert_eq!(s.prob(&[0, 0, z_in], &[x0, x1, z]), &want);
            }
        }
        assert_eq!(build_rac_state_noisy(&rational::one()).unwrap(), s);
    }

    #[test]
    fn ic_state_table() {
        let s = build_ic_state();
        for z_in in 0..2 {
            for o in 0..16 {
                let (a0, a1, m, z) = (o >> 3 & 1, o >> 2 & 1, o >> 1 & 1, o & 1);
                let want = if z == [a0, a1][z_in] ^ m { ratio(1, 8) } else { ratio(0, 1) };
                assert_eq!(s.prob(&[0, 0, 0, z_in], &[a0, a1, m, z]), &want);
            }
        }
    }

    #[test]
    fn ic_values() {
        assert!((ic_inequality_value(&build_ic_state()).unwrap() - 2.0).abs() < 1e-12);
        // Binary symmetric channel with flip probability 1 - p per bit.
        let p = 0.8;
        let v = ic_inequality_value(&build_ic_state_noisy(&ratio(4, 5)).unwrap()).unwrap();
        assert!((v - 2.0 * (1.0 - info::binary_entropy(p))).abs() < 1e-12);
        let noise = BoxState::uniform(Signature::new(vec![BoxSpec::new(2, 2)]).unwrap());
        let bits = uniform_bit().tensor(&uniform_bit()).tensor(&uniform_bit());
        assert!(ic_inequality_value(&bits.tensor(&noise)).unwrap().abs() < 1e-12);
        assert!(ic_inequality_value(&pr_box()).is_err());
    }

    #[test]
    fn invalid_wirings_are_rejected() {
        let s = uniform_bit().tensor(&pr_box());
        let twice = Wiring {
            instructions: vec![
                Instruction::Measure { subsystem: 1, input: Expr::Const(0) },
                Instruction::Measure { subsystem: 1, input: Expr::Const(1) },
            ],
            emit: Emit { classical: vec![(Expr::reg(0), 2)], keep: vec![2] },
        };
        assert!(matches!(apply_wiring(&s, &twice), Err(Error::InvalidWiring(_))));
        let early = Wiring {
            instructions: vec![Instruction::Measure { subsystem: 1, input: Expr::reg(0) }],
            emit: Emit { classical: vec![], keep: vec![2] },
        };
        assert!(matches!(apply_wiring(&s, &early), Err(Error::InvalidWiring(_))));
        let range = Wiring {
            instructions: vec![Instruction::Measure { subsystem: 1, input: Expr::Const(2) }],
            emit: Emit { classical: vec![], keep: vec![2] },
        };
        assert!(matches!(apply_wiring(&s, &range), Err(Error::InvalidWiring(_))));
        let kept_measured = Wiring {
            instructions: vec![Instruction::Measure { subsystem: 1, input: Expr::Const(0) }],
            emit: Emit { classical: vec![], keep: vec![1] },
        };
        assert!(matches!(apply_wiring(&s, &kept_measured), Err(Error::InvalidWiring(_))));
    }

    /// Discarding a subsystem gives its marginal.
    #[test]
    fn discarding_is_marginalization() {
        let s = uniform_bit().tensor(&pr_box());
        let w = Wiring { instructions: vec![], emit: Emit { classical: vec![], keep: vec![2] } };
        assert_eq!(apply_wiring(&s, &w).unwrap(), s.marginal(&[2]).unwrap());
    }
}
