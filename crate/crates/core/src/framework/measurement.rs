use std::collections::HashSet;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{State, SystemType};
use crate::boxworld::{affine_hull, AffineHull, Signature};
use crate::error::{Error, Result};
use crate::quantum::{hermitian_eigenvalues, CMatrix, TOLERANCE};
use crate::rational::{self, Rational};

/// A linear functional from states to outcome probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    /// `e(p) = sum_i q_i p_i`.
    Classical(Vec<Rational>),
    /// `e(rho) = tr(rho E)`.
    Quantum(CMatrix),
    /// Nonnegative combination of fiducial effects, laid out like a state
    /// table: `e(P) = sum Q(out|in) P(out|in)`.
    Box { signature: Signature, coefficients: Vec<Rational> },
}

/// A probability, exact where the theory allows it.
#[derive(Debug, Clone, PartialEq)]
pub enum Prob {
    Exact(Rational),
    Float(f64),
}

impl Prob {
    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => rational::to_f64(r),
            Prob::Float(x) => *x,
        }
    }
}

impl Effect {
    fn matches(&self, system: &SystemType) -> bool {
        match (self, system) {
            (Effect::Classical(q), SystemType::Classical { dims }) => q.len() == dims.iter().product::<usize>(),
            (Effect::Quantum(e), SystemType::Quantum { dims }) => e.nrows() == dims.iter().product::<usize>(),
            (Effect::Box { signature, .. }, SystemType::BoxWorld(sig)) => signature == sig,
            _ => false,
        }
    }

    pub fn evaluate(&self, state: &State) -> Result<Prob> {
        if !self.matches(&state.system()) {
            return Err(Error::SystemMismatch("effect and state live on different systems".into()));
        }
        Ok(match (self, state) {
            (Effect::Classical(q), State::Classical(c)) => Prob::Exact(dot(q, c.probs())),
            (Effect::Quantum(e), State::Quantum(rho)) => Prob::Float((rho.matrix() * e).trace().re),
            (Effect::Box { coefficients, .. }, State::Box(b)) => Prob::Exact(dot(coefficients, b.table())),
            _ => unreachable!("checked by matches"),
        })
    }

    fn add(&self, other: &Effect) -> Effect {
        match (self, other) {
            (Effect::Classical(a), Effect::Classical(b)) => Effect::Classical(add(a, b)),
            (Effect::Quantum(a), Effect::Quantum(b)) => Effect::Quantum(a + b),
            (Effect::Box { signature, coefficients: a }, Effect::Box { coefficients: b, .. }) => {
                Effect::Box { signature: signature.clone(), coefficients: add(a, b) }
            }
            _ => unreachable!("measurement effects share a system"),
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Labeled effects summing to the unit effect.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    outcomes: Vec<(String, Effect)>,
}

impl Measurement {
    pub fn new(outcomes: Vec<(String, Effect)>) -> Result<Self> {
        let m = Self { outcomes };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(outcomes: Vec<(String, Effect)>) -> Self {
        Self { outcomes }
    }

    /// The one-outcome measurement `{u}`.
    pub fn unit(system: &SystemType) -> Self {
        let effect = match system {
            SystemType::Classical { dims } => Effect::Classical(vec![Rational::one(); dims.iter().product()]),
            SystemType::Quantum { dims } => {
                let d = dims.iter().product();
                Effect::Quantum(CMatrix::identity(d, d))
            }
            SystemType::BoxWorld(sig) => {
                // Uniform weight over outputs of joint input 0.
                let mut q = vec![Rational::zero(); sig.table_len()];
                for x in q.iter_mut().take(sig.output_count()) {
                    *x = Rational::one();
                }
                Effect::Box { signature: sig.clone(), coefficients: q }
            }
        };
        Self { outcomes: vec![("u".to_string(), effect)] }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[(String, Effect)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn effect(&self, label: &str) -> Option<&Effect> {
        self.outcomes.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }

    /// System of the first effect; all effects share it once validated.
    pub fn system(&self) -> Option<SystemType> {
        self.outcomes.first().map(|(_, e)| match e {
            Effect::Classical(q) => SystemType::Classical { dims: vec![q.len()] },
            Effect::Quantum(m) => SystemType::Quantum { dims: vec![m.nrows()] },
            Effect::Box { signature, .. } => SystemType::BoxWorld(signature.clone()),
        })
    }

    /// Checks distinct labels, positivity, and that the effects sum to the
    /// unit effect.
    pub fn validate(&self) -> Result<()> {
        let Some((_, first)) = self.outcomes.first() else {
            return Err(Error::InvalidMeasurement("no outcomes".into()));
        };
        let mut labels = HashSet::new();
        for (l, _) in &self.outcomes {
            if !labels.insert(l.as_str()) {
                return Err(Error::InvalidMeasurement(format!("duplicate label {l:?}")));
            }
        }
        let total = self.outcomes[1..].iter().try_fold(first.clone(), |acc, (l, e)| {
            if std::mem::discriminant(&acc) != std::mem::discriminant(e) || !same_shape(&acc, e) {
                return Err(Error::SystemMismatch(format!("effect {l:?} lives on a different system")));
            }
            Ok(acc.add(e))
        })?;
        match &total {
            Effect::Classical(sum) => {
                for (l, e) in &self.outcomes {
                    let Effect::Classical(q) = e else { unreachable!() };
                    if q.iter().any(|x| x < &Rational::zero() || x > &Rational::one()) {
                        return Err(Error::InvalidMeasurement(format!("effect {l:?} leaves [0, 1]")));
                    }
                }
                if sum.iter().any(|x| !x.is_one()) {
                    return Err(Error::InvalidMeasurement("effects do not sum to the unit effect".into()));
                }
            }
            Effect::Quantum(sum) => {
                for (l, e) in &self.outcomes {
                    let Effect::Quantum(q) = e else { unreachable!() };
                    if hermitian_eigenvalues(q)[0] < -TOLERANCE {
                        return Err(Error::InvalidMeasurement(format!("effect {l:?} is not positive")));
                    }
                }
                let d = sum.nrows();
                let off = (sum - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if off > TOLERANCE {
                    return Err(Error::InvalidMeasurement("effects do not sum to the identity".into()));
                }
            }
            Effect::Box { signature, coefficients } => {
                for (l, e) in &self.outcomes {
                    let Effect::Box { coefficients: q, .. } = e else { unreachable!() };
                    if q.iter().any(|x| x < &Rational::zero()) {
                        return Err(Error::InvalidMeasurement(format!("effect {l:?} has a negative coefficient")));
                    }
                }
                let hull = affine_hull(signature);
                if !is_unit(&hull, coefficients) {
                    return Err(Error::InvalidMeasurement("effects do not sum to the unit effect".into()));
                }
            }
        }
        Ok(())
    }
}

fn same_shape(a: &Effect, b: &Effect) -> bool {
    match (a, b) {
        (Effect::Classical(x), Effect::Classical(y)) => x.len() == y.len(),
        (Effect::Quantum(x), Effect::Quantum(y)) => x.shape() == y.shape(),
        (Effect::Box { signature: s, .. }, Effect::Box { signature: t, .. }) => s == t,
        _ => false,
    }
}

fn is_unit(hull: &AffineHull, coefficients: &[Rational]) -> bool {
    let c = hull.canonical(coefficients);
    c[0].is_one() && c[1..].iter().all(Zero::is_zero)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probabilities {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// Outcome labels with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub labels: Vec<String>,
    pub probs: Probabilities,
}

impl OutcomeDistribution {
    pub fn exact(&self) -> Option<&[Rational]> {
        match &self.probs {
            Probabilities::Exact(p) => Some(p),
            Probabilities::Float(_) => None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match &self.probs {
            Probabilities::Exact(p) => p.iter().map(rational::to_f64).collect(),
            Probabilities::Float(p) => p.clone(),
        }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.values()[i])
    }

    /// Shannon entropy in bits; zero-probability outcomes contribute nothing.
    pub fn entropy(&self) -> f64 {
        crate::info::shannon(&self.values())
    }
}

pub fn apply_measurement(state: &State, m: &Measurement) -> Result<OutcomeDistribution> {
    m.validate()?;
    let labels = m.outcomes.iter().map(|(l, _)| l.clone()).collect();
    let probs: Vec<Prob> = m.outcomes.iter().map(|(_, e)| e.evaluate(state)).collect::<Result<_>>()?;
    let probs = if probs.iter().all(|p| matches!(p, Prob::Exact(_))) {
        Probabilities::Exact(
            probs
                .into_iter()
                .map(|p| match p {
                    Prob::Exact(r) => r,
                    Prob::Float(_) => unreachable!(),
                })
                .collect(),
        )
    } else {
        Probabilities::Float(probs.iter().map(|p| p.to_f64().max(0.0)).collect())
    };
    Ok(OutcomeDistribution { labels, probs })
}

/// Relabels outcomes through `label_map`, summing effects that share a new
/// label. New labels appear in order of first use.
pub fn coarse_grain(m: &Measurement, label_map: impl Fn(&str) -> String) -> Measurement {
    let mut out: Vec<(String, Effect)> = Vec::new();
    for (l, e) in &m.outcomes {
        let target = label_map(l);
        match out.iter_mut().find(|(t, _)| *t == target) {
            Some((_, acc)) => *acc = acc.add(e),
            None => out.push((target, e.clone())),
        }
    }
    Measurement { outcomes: out }
}

/// Canonical form of an effect as a functional on states.
enum Functional {
    Exact(Vec<Rational>),
    Float(Vec<Complex64>),
}

fn functional(e: &Effect, hull: Option<&AffineHull>) -> Functional {
    match e {
        Effect::Classical(q) => Functional::Exact(q.clone()),
        Effect::Quantum(m) => Functional::Float(m.iter().copied().collect()),
        Effect::Box { coefficients, .. } => Functional::Exact(hull.expect("box hull").canonical(coefficients)),
    }
}

fn equal(a: &Functional, b: &Functional) -> bool {
    match (a, b) {
        (Functional::Exact(x), Functional::Exact(y)) => x == y,
        (Functional::Float(x), Functional::Float(y)) => x.iter().zip(y).all(|(p, q)| (p - q).norm() <= TOLERANCE),
        _ => false,
    }
}

/// `a = c b` for some `c >= 0`.
fn proportional(a: &Functional, b: &Functional) -> bool {
    match (a, b) {
        (Functional::Exact(x), Functional::Exact(y)) => {
            let Some(i) = y.iter().position(|v| !v.is_zero()) else {
                return x.iter().all(Zero::is_zero);
            };
            let c = &x[i] / &y[i];
            c >= Rational::zero() && x.iter().zip(y).all(|(p, q)| *p == &c * q)
        }
        (Functional::Float(x), Functional::Float(y)) => {
            let Some(i) = (0..y.len()).max_by(|&i, &j| y[i].norm().total_cmp(&y[j].norm())) else {
                return true;
            };
            if y[i].norm() <= TOLERANCE {
                return x.iter().all(|p| p.norm() <= TOLERANCE);
            }
            let c = x[i] / y[i];
            c.im.abs() <= TOLERANCE
                && c.re >= -TOLERANCE
                && x.iter().zip(y).all(|(p, q)| (p - c * q).norm() <= TOLERANCE)
        }
        _ => false,
    }
}

/// True iff `label_map` coarse-grains `e` into `f` and every effect of `e`
/// is a nonnegative multiple of the effect it is mapped to.
pub fn is_trivial_refinement(e: &Measurement, f: &Measurement, label_map: impl Fn(&str) -> String) -> Result<bool> {
    e.validate()?;
    f.validate()?;
    let hull = match f.system() {
        Some(SystemType::BoxWorld(sig)) => Some(affine_hull(&sig)),
        _ => None,
    };
    let merged = coarse_grain(e, &label_map);
    for (l, eff) in &merged.outcomes {
        let Some(target) = f.effect(l) else {
            return Err(Error::InvalidMeasurement(format!("label map sends outcomes to {l:?}, which f lacks")));
        };
        if !same_shape(eff, target) {
            return Err(Error::SystemMismatch("e and f live on different systems".into()));
        }
        if !equal(&functional(eff, hull.as_ref()), &functional(target, hull.as_ref())) {
            return Err(Error::InvalidMeasurement(format!("outcomes merged into {l:?} do not sum to f's effect")));
        }
    }
    for (l, target) in &f.outcomes {
        let hit = merged.outcomes.iter().any(|(m, _)| m == l);
        let zero = match functional(target, hull.as_ref()) {
            Functional::Exact(v) => v.iter().all(Zero::is_zero),
            Functional::Float(v) => v.iter().all(|z| z.norm() <= TOLERANCE),
        };
        if !hit && !zero {
            return Err(Error::InvalidMeasurement(format!("f outcome {l:?} has no preimage")));
        }
    }
    Ok(e.outcomes.iter().all(|(l, eff)| {
        let target = f.effect(&label_map(l)).expect("checked above");
        proportional(&functional(eff, hull.as_ref()), &functional(target, hull.as_ref()))
    }))
}
