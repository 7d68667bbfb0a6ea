//! Reference instances with known entropic values, the subadditivity sweep
//! over noisy random access states, and a self-check over all of them.

use serde::Serialize;

use crate::boxworld::{chsh_value, enumerate_pure_states, pr_box, BoxSpec, BoxState, Signature};
use crate::entropy::{Engine, Partition, ZERO_TOLERANCE};
use crate::error::{Error, Result};
use crate::framework::State;
use crate::games::{build_ic_state, build_rac_state, build_rac_state_noisy, ic_inequality_value};
use crate::info;
use crate::rational::{self, ratio, Rational};

/// Resolution of the threshold search in [`ssa_sweep`].
pub const SWEEP_RESOLUTION: f64 = 1e-4;

fn single_box(table: [Rational; 4]) -> BoxState {
    let sig = Signature::new(vec![BoxSpec::new(2, 2)]).expect("binary box");
    BoxState::new(sig, table.to_vec()).expect("valid single box")
}

/// Single binary boxes `S1`, `S2` and their even mixture, on which the
/// decomposition entropy is not concave.
pub fn concavity_states() -> (BoxState, BoxState, BoxState) {
    let s1 = single_box([ratio(1, 1), ratio(0, 1), ratio(1, 2), ratio(1, 2)]);
    let s2 = single_box([ratio(1, 2), ratio(1, 2), ratio(1, 1), ratio(0, 1)]);
    let mix = s1.mix(&ratio(1, 2), &s2).expect("same signature");
    (s1, s2, mix)
}

/// Bipartite binary box whose decomposition entropy exceeds the sum over
/// its marginals.
pub fn subadditivity_state() -> BoxState {
    let rows: [[i64; 4]; 4] = [[2, 3, 3, 0], [2, 3, 3, 0], [5, 0, 0, 3], [2, 3, 3, 0]];
    let sig = Signature::new(vec![BoxSpec::new(2, 2), BoxSpec::new(2, 2)]).expect("binary pair");
    BoxState::new(sig, rows.iter().flatten().map(|&n| ratio(n, 8)).collect()).expect("non-signalling")
}

/// `[X0, X1, Z]` indices of the random access state.
const X0: usize = 0;
const X1: usize = 1;
const Z: usize = 2;

fn part(a: &[usize], b: &[usize]) -> Partition {
    Partition::new(a.to_vec(), b.to_vec())
}

/// Named entropic quantities of a random access state, subsystems
/// `[X0, X1, Z]`.
pub fn rac_values(engine: &Engine, state: &BoxState) -> Result<Vec<(String, f64)>> {
    let s = State::Box(state.clone());
    let h = |subs: &[usize]| engine.hhat_of(&s, subs).map(|r| r.value_bits);
    let cond = |a: &[usize], b: &[usize]| engine.cond_standard(&s, &part(a, b)).map(|r| r.value_bits);
    let plus = |a: &[usize], b: &[usize]| engine.cond_plus(&s, &part(a, b)).map(|r| r.value_bits);
    let mutual = |a: &[usize], b: &[usize]| engine.mutual(&s, &part(a, b)).map(|r| r.value_bits);
    let xz = State::Box(state.marginal(&[X0, Z])?);
    Ok(vec![
        ("H(X0)".into(), h(&[X0])?),
        ("H(X1)".into(), h(&[X1])?),
        ("H(Z)".into(), h(&[Z])?),
        ("H(X0X1)".into(), h(&[X0, X1])?),
        ("H(X0X1Z)".into(), h(&[X0, X1, Z])?),
        ("H(X0Z)".into(), h(&[X0, Z])?),
        ("H(X1Z)".into(), h(&[X1, Z])?),
        ("H(X0|Z)".into(), cond(&[X0], &[Z])?),
        ("H(X1|Z)".into(), cond(&[X1], &[Z])?),
        ("H(X0X1|Z)".into(), cond(&[X0, X1], &[Z])?),
        ("H(X0|X1Z)".into(), cond(&[X0], &[X1, Z])?),
        ("H+(X0|Z)".into(), plus(&[X0], &[Z])?),
        ("H+(X1|Z)".into(), plus(&[X1], &[Z])?),
        ("H+(X0X1|Z)".into(), plus(&[X0, X1], &[Z])?),
        ("H+(X0|ZX1)".into(), plus(&[X0], &[Z, X1])?),
        ("I(X0;Z)".into(), mutual(&[X0], &[Z])?),
        ("I(X1;Z)".into(), mutual(&[X1], &[Z])?),
        ("I(X0X1;Z)".into(), mutual(&[X0, X1], &[Z])?),
        ("Hdec(X0Z)".into(), engine.decomposition_entropy(&xz)?.value_bits),
    ])
}

/// Named information quantities of an information causality state,
/// subsystems `[A0, A1, M, Z]`.
pub fn ic_values(engine: &Engine, state: &BoxState) -> Result<Vec<(String, f64)>> {
    let s = State::Box(state.clone());
    let mutual = |a: &[usize], b: &[usize]| engine.mutual(&s, &part(a, b)).map(|r| r.value_bits);
    Ok(vec![
        ("I(A0;A1MZ)".into(), mutual(&[0], &[1, 2, 3])?),
        ("I(A0;MZ)".into(), mutual(&[0], &[2, 3])?),
        ("I(A1;MZ)".into(), mutual(&[1], &[2, 3])?),
        ("I(A0A1;MZ)".into(), mutual(&[0, 1], &[2, 3])?),
        ("I+(A0A1;MZ)".into(), engine.mutual_plus(&s, &part(&[0, 1], &[2, 3]))?.value_bits),
        ("IC".into(), ic_inequality_value(state)?),
    ])
}

/// `H(X0X1|Z) - H(X0|Z) - H(X1|Z)` on the random access state built from a
/// PR box that is correct with probability `p`. Positive values violate
/// subadditivity of the conditional entropy.
pub fn ssa_gap(engine: &Engine, p: &Rational) -> Result<f64> {
    let s = State::Box(build_rac_state_noisy(p)?);
    let cond = |a: &[usize]| engine.cond_standard(&s, &part(a, &[Z])).map(|r| r.value_bits);
    Ok(cond(&[X0, X1])? - cond(&[X0])? - cond(&[X1])?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Smallest `p` with a positive gap, to [`SWEEP_RESOLUTION`]; `None` if
    /// the gap does not change sign on the grid.
    pub threshold: Option<f64>,
}

fn exact(p: f64) -> Result<Rational> {
    rational::from_f64(p)
}

/// Evaluates [`ssa_gap`] on a grid over `[p_min, p_max]` and bisects the
/// first interval on which the gap becomes positive.
pub fn ssa_sweep(engine: &Engine, p_min: f64, p_max: f64, step: f64) -> Result<SweepReport> {
    if !(0.5 <= p_min && p_min <= p_max && p_max <= 1.0) {
        return Err(Error::OutOfRange(format!("need 1/2 <= p_min <= p_max <= 1, got [{p_min}, {p_max}]")));
    }
    if !(step > 0.0) {
        return Err(Error::OutOfRange(format!("step {step} must be positive")));
    }
    let steps = ((p_max - p_min) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| p_min + k as f64 * step).collect();
    if grid.last().is_some_and(|&p| p < p_max - 1e-12) {
        grid.push(p_max);
    }
    let points = grid
        .into_iter()
        .map(|p| Ok(SweepPoint { p, gap: ssa_gap(engine, &exact(p)?)? }))
        .collect::<Result<Vec<_>>>()?;
    let positive = |g: f64| g > ZERO_TOLERANCE;
    let mut threshold = None;
    if let Some(k) = (1..points.len()).find(|&k| !positive(points[k - 1].gap) && positive(points[k].gap)) {
        let (mut lo, mut hi) = (points[k - 1].p, points[k].p);
        while hi - lo > SWEEP_RESOLUTION {
            let mid = (lo + hi) / 2.0;
            if positive(ssa_gap(engine, &exact(mid)?)?) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        threshold = Some(hi);
    }
    Ok(SweepReport { points, threshold })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub group: &'static str,
    pub quantity: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Checks(Vec<CheckRow>);

impl Checks {
    fn push(&mut self, group: &'static str, quantity: impl Into<String>, value: f64, expected: f64, tolerance: f64) {
        let pass = (value - expected).abs() <= tolerance;
        self.0.push(CheckRow { group, quantity: quantity.into(), value, expected, tolerance, pass });
    }
}

/// Evaluates every reference value: random access and information
/// causality quantities, decomposition entropy counterexamples, polytope
/// counts and the subadditivity threshold.
pub fn reference_checks(engine: &Engine) -> Result<Vec<CheckRow>> {
    const TOL: f64 = 1e-9;
    let mut c = Checks(Vec::new());

    let uniform_bit = State::Classical(crate::classical::ClassicalState::uniform(2));
    c.push("pr", "H(X)", engine.hhat(&uniform_bit)?.value_bits, 1.0, TOL);
    let pr = State::Box(pr_box());
    c.push("pr", "H(Y)", engine.hhat_of(&pr, &[0])?.value_bits, 1.0, TOL);
    c.push("pr", "H(Z)", engine.hhat_of(&pr, &[1])?.value_bits, 1.0, TOL);
    c.push("pr", "H(YZ)", engine.hhat(&pr)?.value_bits, 1.0, TOL);

    let rac = build_rac_state();
    let expected_rac = [
        ("H(X0)", 1.0),
        ("H(X1)", 1.0),
        ("H(Z)", 1.0),
        ("H(X0X1)", 2.0),
        ("H(X0X1Z)", 2.0),
        ("H(X0Z)", 1.0),
        ("H(X1Z)", 1.0),
        ("H(X0|Z)", 0.0),
        ("H(X1|Z)", 0.0),
        ("H(X0X1|Z)", 1.0),
        ("H(X0|X1Z)", 1.0),
        ("H+(X0|Z)", 0.0),
        ("H+(X0X1|Z)", 1.0),
        ("H+(X0|ZX1)", 0.0),
        ("I(X0;Z)", 1.0),
        ("I(X1;Z)", 1.0),
        ("I(X0X1;Z)", 1.0),
        ("Hdec(X0Z)", 2.0),
    ];
    let values = rac_values(engine, &rac)?;
    for (name, expected) in expected_rac {
        let v = values.iter().find(|(n, _)| n == name).expect("listed quantity").1;
        c.push("rac", name, v, expected, TOL);
    }
    let ssa = engine.check_strong_subadditivity(&State::Box(rac), &[X0], &[X1], &[Z])?;
    c.push("rac", "SSA lhs-rhs", ssa.lhs - ssa.rhs, 1.0, TOL);

    let ic = build_ic_state();
    let expected_ic = [("I(A0;A1MZ)", 0.0), ("I(A0;MZ)", 1.0), ("I(A0A1;MZ)", 1.0), ("I+(A0A1;MZ)", 1.0), ("IC", 2.0)];
    let values = ic_values(engine, &ic)?;
    for (name, expected) in expected_ic {
        let v = values.iter().find(|(n, _)| n == name).expect("listed quantity").1;
        c.push("ic", name, v, expected, TOL);
    }

    let (s1, s2, mix) = concavity_states();
    let hdec = |s: &BoxState| engine.decomposition_entropy(&State::Box(s.clone())).map(|r| r.value_bits);
    let (h1, h2, hmix) = (hdec(&s1)?, hdec(&s2)?, hdec(&mix)?);
    c.push("decomposition", "Hdec(S1)", h1, 1.0, TOL);
    c.push("decomposition", "Hdec(S2)", h2, 1.0, TOL);
    c.push("decomposition", "Hdec(Smix)", hmix, info::binary_entropy(0.75), TOL);
    c.push(
        "decomposition",
        "(Hdec(S1)+Hdec(S2))/2 - Hdec(Smix) > 0",
        f64::from((h1 + h2) / 2.0 - hmix > TOL),
        1.0,
        0.0,
    );
    let sab = subadditivity_state();
    let (report, decomposition, _) = engine.decomposition_entropy_box(&sab)?;
    c.push("decomposition", "Hdec(SAB)", report.value_bits, 2.0, TOL);
    let quarter = decomposition.weights.iter().filter(|w| **w == ratio(1, 4)).count();
    c.push("decomposition", "SAB witness weights equal to 1/4", quarter as f64, 4.0, 0.0);
    let ha = hdec(&sab.marginal(&[0])?)?;
    let hb = hdec(&sab.marginal(&[1])?)?;
    c.push("decomposition", "Hdec(A)", ha, info::binary_entropy(0.375), TOL);
    c.push("decomposition", "Hdec(B)", hb, info::binary_entropy(0.375), TOL);
    c.push(
        "decomposition",
        "Hdec(SAB) - Hdec(A) - Hdec(B) > 0",
        f64::from(report.value_bits - ha - hb > TOL),
        1.0,
        0.0,
    );

    let sig = Signature::new(vec![BoxSpec::new(2, 2), BoxSpec::new(2, 2)])?;
    let vs = enumerate_pure_states(&sig, engine.limits.max_vertex_candidates)?;
    c.push("polytope", "pure states", vs.len() as f64, 24.0, 0.0);
    c.push("polytope", "product pure states", vs.product_count() as f64, 16.0, 0.0);
    c.push("polytope", "entangled pure states", vs.entangled_count() as f64, 8.0, 0.0);
    c.push("polytope", "CHSH(PR)", rational::to_f64(&chsh_value(&pr_box())?), 4.0, 0.0);
    let local = vs.vertices[..vs.product_count()]
        .iter()
        .map(|v| chsh_value(v).map(|r| rational::to_f64(&r)))
        .collect::<Result<Vec<_>>>()?;
    c.push("polytope", "max local CHSH", local.into_iter().fold(f64::NEG_INFINITY, f64::max), 2.0, 0.0);

    let sweep = ssa_sweep(engine, 0.5, 1.0, 0.01)?;
    c.push("sweep", "subadditivity threshold", sweep.threshold.unwrap_or(f64::NAN), 0.89, 0.01);
    Ok(c.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sab_marginals() {
        let sab = subadditivity_state();
        let a = sab.marginal(&[0]).unwrap();
        assert_eq!(a.table(), &[ratio(5, 8), ratio(3, 8), ratio(5, 8), ratio(3, 8)]);
        assert_eq!(sab.marginal(&[1]).unwrap(), a);
    }

    #[test]
    fn gap_at_the_ends_of_the_range() {
        let e = Engine::default();
        assert!((ssa_gap(&e, &rational::one()).unwrap() - 1.0).abs() < 1e-9);
        assert!(ssa_gap(&e, &ratio(1, 2)).unwrap() <= 1e-9);
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let e = Engine::default();
        assert!(ssa_sweep(&e, 0.4, 1.0, 0.1).is_err());
        assert!(ssa_sweep(&e, 0.6, 0.5, 0.1).is_err());
        assert!(ssa_sweep(&e, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn sweep_grid_includes_both_ends() {
        let r = ssa_sweep(&Engine::default(), 0.5, 1.0, 0.3).unwrap();
        let ps: Vec<f64> = r.points.iter().map(|p| p.p).collect();
        assert_eq!(ps, vec![0.5, 0.8, 1.0]);
        assert!(r.threshold.is_some());
    }
}
