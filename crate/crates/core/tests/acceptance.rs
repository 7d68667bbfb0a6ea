//! Acceptance suite: one PASS/FAIL line per criterion, with the individual
//! checks listed beneath it.
//!
//! Checks marked `known failure` are implemented as stated but cannot hold;
//! they are reported without failing the run. Any other failing check makes
//! the process exit nonzero.

mod common;

use std::time::Instant;

use gpt_entropy::boxworld::{chsh_value, pr_box, BoxState};
use gpt_entropy::classical::ClassicalState;
use gpt_entropy::coding::{hypothesis_test_pn, simulate_compression, typical_mass_and_count, CodingConfig, Source};
use gpt_entropy::entropy::{Engine, Partition};
use gpt_entropy::framework::{distance, State};
use gpt_entropy::games::{build_ic_state, build_rac_state, ic_inequality_value};
use gpt_entropy::golden::ssa_sweep;
use gpt_entropy::info::RenyiOrder;
use gpt_entropy::quantum::{povm_output_entropy, sample_random_density_matrix, sample_random_rank1_povm, Povm};
use gpt_entropy::rational::{self, ratio, Rational};
use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};

use common::{random_classical, random_mixture, rng, shannon, vertices};

/// Tolerance on entropy values.
const ENTROPY_TOL: f64 = 1e-9;
/// Tolerance for Shannon and von Neumann reductions.
const REDUCTION_TOL: f64 = 1e-12;
/// Slack allowed to random POVMs below the eigenbasis value.
const POVM_SLACK: f64 = 1e-9;
const PROPERTY_TOL: f64 = 1e-9;
const RATE_TOL: f64 = 0.02;
const DISTANCE_TARGET: f64 = 0.05;
/// Atypical-mass target for part (i) of the typical subspace theorem.
const TYPICAL_DELTA: f64 = 0.05;
const THRESHOLD_RANGE: (f64, f64) = (0.88, 0.90);

type Criterion = fn(&Engine) -> Vec<Check>;

struct Check {
    name: String,
    pass: bool,
    detail: String,
    known_failure: bool,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into(), known_failure: false }
}

/// `value` within `tol` of `expected`.
fn close(name: &str, value: f64, expected: f64, tol: f64) -> Check {
    check(name, (value - expected).abs() <= tol, format!("{value:.10} vs {expected:.10}"))
}

impl Check {
    fn known_failure(mut self) -> Self {
        self.known_failure = true;
        self
    }
}

fn h(p: f64) -> f64 {
    shannon(&[p, 1.0 - p])
}

fn part(a: &[usize], b: &[usize]) -> Partition {
    Partition::new(a.to_vec(), b.to_vec())
}

fn criterion_1(e: &Engine) -> Vec<Check> {
    let bit = State::Classical(ClassicalState::uniform(2));
    let pr = State::Box(pr_box());
    let rac = State::Box(build_rac_state());
    let hh = |s: &State, subs: &[usize]| e.hhat_of(s, subs).unwrap().value_bits;
    vec![
        close("H(X)", e.hhat(&bit).unwrap().value_bits, 1.0, ENTROPY_TOL),
        close("H(Y)", hh(&pr, &[0]), 1.0, ENTROPY_TOL),
        close("H(Z)", hh(&pr, &[1]), 1.0, ENTROPY_TOL),
        close("H(YZ)", hh(&pr, &[0, 1]), 1.0, ENTROPY_TOL),
        close("H(X0)", hh(&rac, &[0]), 1.0, ENTROPY_TOL),
        close("H(X1)", hh(&rac, &[1]), 1.0, ENTROPY_TOL),
        close("H(Z) on RAC", hh(&rac, &[2]), 1.0, ENTROPY_TOL),
        close("H(X0X1)", hh(&rac, &[0, 1]), 2.0, ENTROPY_TOL),
        close("H(X0X1Z)", hh(&rac, &[0, 1, 2]), 2.0, ENTROPY_TOL),
        close("H(X0Z)", hh(&rac, &[0, 2]), 1.0, ENTROPY_TOL),
        close("H(X1Z)", hh(&rac, &[1, 2]), 1.0, ENTROPY_TOL),
    ]
}

fn criterion_2(e: &Engine) -> Vec<Check> {
    let rac = State::Box(build_rac_state());
    let cs = |a: &[usize], b: &[usize]| e.cond_standard(&rac, &part(a, b)).unwrap().value_bits;
    let cp = |a: &[usize], b: &[usize]| e.cond_plus(&rac, &part(a, b)).unwrap().value_bits;
    let mi = |a: &[usize], b: &[usize]| e.mutual(&rac, &part(a, b)).unwrap().value_bits;
    vec![
        close("H(X0|Z)", cs(&[0], &[2]), 0.0, ENTROPY_TOL),
        close("H(X1|Z)", cs(&[1], &[2]), 0.0, ENTROPY_TOL),
        close("H(X0X1|Z)", cs(&[0, 1], &[2]), 1.0, ENTROPY_TOL),
        close("H(X0|X1Z)", cs(&[0], &[1, 2]), 1.0, ENTROPY_TOL),
        close("H+(X0|Z)", cp(&[0], &[2]), 0.0, ENTROPY_TOL),
        close("H+(X0X1|Z)", cp(&[0, 1], &[2]), 1.0, ENTROPY_TOL),
        close("H+(X0|ZX1)", cp(&[0], &[2, 1]), 0.0, ENTROPY_TOL),
        close("I(X0;Z)", mi(&[0], &[2]), 1.0, ENTROPY_TOL),
        close("I(X1;Z)", mi(&[1], &[2]), 1.0, ENTROPY_TOL),
        close("I(X0X1;Z)", mi(&[0, 1], &[2]), 1.0, ENTROPY_TOL),
    ]
}

fn criterion_3(e: &Engine) -> Vec<Check> {
    let r = e.check_strong_subadditivity(&State::Box(build_rac_state()), &[0], &[1], &[2]).unwrap();
    vec![close("H(X0X1Z)+H(Z)-H(X0Z)-H(X1Z)", r.lhs - r.rhs, 1.0, ENTROPY_TOL), check("violated flag", r.violated, "")]
}

fn criterion_4(e: &Engine) -> Vec<Check> {
    let ic = build_ic_state();
    let s = State::Box(ic.clone());
    let mi = |a: &[usize], b: &[usize]| e.mutual(&s, &part(a, b)).unwrap().value_bits;
    vec![
        close("I(A0;A1MZ)", mi(&[0], &[1, 2, 3]), 0.0, ENTROPY_TOL),
        close("I(A0;MZ)", mi(&[0], &[2, 3]), 1.0, ENTROPY_TOL),
        close("I(A0A1;MZ)", mi(&[0, 1], &[2, 3]), 1.0, ENTROPY_TOL),
        close("I+(A0A1;MZ)", e.mutual_plus(&s, &part(&[0, 1], &[2, 3])).unwrap().value_bits, 1.0, ENTROPY_TOL),
        close("IC value", ic_inequality_value(&ic).unwrap(), 2.0, ENTROPY_TOL),
    ]
}

fn table_box(boxes: &[(usize, usize)], eighths: &[i64], den: i64) -> BoxState {
    BoxState::new(common::sig(boxes), eighths.iter().map(|&n| ratio(n, den)).collect()).unwrap()
}

fn criterion_5(e: &Engine) -> Vec<Check> {
    let hdec = |s: &BoxState| e.decomposition_entropy(&State::Box(s.clone())).unwrap().value_bits;
    // Rows are P(.|x) for x = 0, 1.
    let s1 = table_box(&[(2, 2)], &[2, 0, 1, 1], 2);
    let s2 = table_box(&[(2, 2)], &[1, 1, 2, 0], 2);
    let mix = table_box(&[(2, 2)], &[3, 1, 3, 1], 4);
    // Rows are P(ab|xy) for xy = 00, 01, 10, 11 with ab = 00, 01, 10, 11.
    let sab = table_box(&[(2, 2), (2, 2)], &[2, 3, 3, 0, 2, 3, 3, 0, 5, 0, 0, 3, 2, 3, 3, 0], 8);
    let (h1, h2, hm) = (hdec(&s1), hdec(&s2), hdec(&mix));
    let (report, decomposition, vs) = e.decomposition_entropy_box(&sab).unwrap();
    let hab = report.value_bits;
    let ha = hdec(&sab.marginal(&[0]).unwrap());
    let hb = hdec(&sab.marginal(&[1]).unwrap());
    let quarters = decomposition.weights.iter().all(|w| *w == ratio(1, 4)) && decomposition.weights.len() == 4;
    let entangled = decomposition.vertices.iter().filter(|&&v| v >= vs.product_count()).count();
    let rac_xz = State::Box(build_rac_state().marginal(&[0, 2]).unwrap());
    let weights: Vec<String> = decomposition.weights.iter().map(rational::format).collect();
    vec![
        close("Hdec(S1)", h1, 1.0, ENTROPY_TOL),
        close("Hdec(S2)", h2, 1.0, ENTROPY_TOL),
        close("Hdec(Smix)", hm, h(0.75), ENTROPY_TOL),
        close("Hdec(SAB)", hab, 2.0, ENTROPY_TOL).known_failure(),
        check(
            "SAB witness: one entangled and three product states, weights 1/4",
            quarters && entangled == 1,
            format!("weights {weights:?}, {entangled} entangled"),
        )
        .known_failure(),
        close("Hdec(A)", ha, h(3.0 / 8.0), ENTROPY_TOL),
        close("Hdec(B)", hb, h(3.0 / 8.0), ENTROPY_TOL),
        check(
            "Hdec(Smix) < (Hdec(S1)+Hdec(S2))/2",
            hm < (h1 + h2) / 2.0 - ENTROPY_TOL,
            format!("{hm:.10} vs {:.10}", (h1 + h2) / 2.0),
        ),
        check("Hdec(AB) > Hdec(A)+Hdec(B)", hab > ha + hb + ENTROPY_TOL, format!("{hab:.10} vs {:.10}", ha + hb))
            .known_failure(),
        close("Hdec(X0Z)", e.decomposition_entropy(&rac_xz).unwrap().value_bits, 2.0, ENTROPY_TOL),
    ]
}

/// Local deterministic boxes `a = f(x)`, `b = g(y)` built directly.
fn local_deterministic() -> Vec<BoxState> {
    let mut out = Vec::new();
    for f in 0..4usize {
        for g in 0..4usize {
            let mut t = vec![0i64; 16];
            for xy in 0..4 {
                let (x, y) = (xy >> 1, xy & 1);
                let (a, b) = (f >> x & 1, g >> y & 1);
                t[xy * 4 + a * 2 + b] = 1;
            }
            out.push(table_box(&[(2, 2), (2, 2)], &t, 1));
        }
    }
    out
}

fn criterion_6(_: &Engine) -> Vec<Check> {
    let vs = gpt_entropy::boxworld::enumerate_pure_states(&common::sig(&[(2, 2), (2, 2)]), 1_000_000).unwrap();
    let local = local_deterministic();
    let product_match = local.iter().all(|l| vs.vertices[..vs.product_count()].contains(l));
    let max_local = local.iter().map(|l| rational::to_f64(&chsh_value(l).unwrap())).fold(f64::MIN, f64::max);
    vec![
        check("24 pure states", vs.len() == 24, vs.len().to_string()),
        check("16 product", vs.product_count() == 16 && product_match, vs.product_count().to_string()),
        check("8 entangled", vs.entangled_count() == 8, vs.entangled_count().to_string()),
        check("CHSH(PR) = 4", chsh_value(&pr_box()).unwrap() == rational::int(4), ""),
        close("max local CHSH", max_local, 2.0, 0.0),
    ]
}

fn criterion_7(e: &Engine) -> Vec<Check> {
    let mut r = rng(7);
    let mut worst_classical = 0.0f64;
    for k in 0..100 {
        let dims = match k % 3 {
            0 => vec![2 + k % 5],
            1 => vec![2, 3],
            _ => vec![2, 2, 2],
        };
        let c = random_classical(dims, &mut r);
        let value = e.hhat(&State::Classical(c.clone())).unwrap().value_bits;
        worst_classical = worst_classical.max((value - shannon(&c.probs_f64())).abs());
    }
    let mut worst_quantum = 0.0f64;
    let mut worst_povm = f64::INFINITY;
    for k in 0..100u64 {
        let d = 2 + (k % 2) as usize;
        let rho = sample_random_density_matrix(d, 1000 + k);
        let value = e.hhat(&State::Quantum(rho.clone())).unwrap().value_bits;
        let eig = hermitian_oracle(rho.matrix());
        worst_quantum = worst_quantum.max((value - shannon(&eig)).abs());
        for s in 0..200u64 {
            let povm: Povm = sample_random_rank1_povm(d, d + (s % (d as u64 + 1)) as usize, k * 1000 + s).unwrap();
            worst_povm = worst_povm.min(povm_output_entropy(&rho, &povm).unwrap() - value);
        }
    }
    vec![
        check(
            "Shannon reduction, 100 states",
            worst_classical <= REDUCTION_TOL,
            format!("max error {worst_classical:e}"),
        ),
        check(
            "von Neumann reduction, 100 states",
            worst_quantum <= ENTROPY_TOL,
            format!("max error {worst_quantum:e}"),
        ),
        check(
            "200 random POVMs never beat the eigenbasis",
            worst_povm >= -POVM_SLACK,
            format!("min margin {worst_povm:e}"),
        ),
    ]
}

/// Eigenvalues of a Hermitian matrix from its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is the original one doubled.
fn hermitian_oracle(m: &DMatrix<Complex64>) -> Vec<f64> {
    let d = m.nrows();
    let real = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let z = m[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut eig: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig.iter().step_by(2).copied().collect()
}

fn hval(e: &Engine, s: &BoxState) -> f64 {
    e.hhat(&State::Box(s.clone())).unwrap().value_bits
}

/// Classical C and M with a local box B: M is a uniform bit, B answers
/// independent uniform bits a, b on inputs 0, 1, and C is B's answer on
/// input M. Signature [1:2, 1:2, 2:2].
fn routed_bit() -> BoxState {
    let mut t = vec![0i64; 16];
    for m in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let c = if m == 0 { a } else { b };
                t[c * 4 + m * 2 + a] += 1;
                t[8 + c * 4 + m * 2 + b] += 1;
            }
        }
    }
    table_box(&[(1, 2), (1, 2), (2, 2)], &t, 8)
}

fn criterion_8(e: &Engine) -> Vec<Check> {
    let mut out = Vec::new();
    let mut r = rng(8);
    let single = vertices(&[(2, 2)]);
    let pair = vertices(&[(2, 2), (2, 2)]);

    // Metric axioms on single boxes, bipartite boxes and classical states.
    let mut metric_ok = true;
    let mut worst_triangle = f64::INFINITY;
    for k in 0..60 {
        let pool = if k % 2 == 0 { &single } else { &pair };
        let (a, b, c) = (random_mixture(pool, &mut r), random_mixture(pool, &mut r), random_mixture(pool, &mut r));
        let d = |x: &BoxState, y: &BoxState| distance(&State::Box(x.clone()), &State::Box(y.clone())).unwrap();
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
        metric_ok &= d(&a, &a).abs() <= PROPERTY_TOL;
        metric_ok &= (ab - ba).abs() <= PROPERTY_TOL;
        metric_ok &= (a == b) == (ab <= PROPERTY_TOL);
        worst_triangle = worst_triangle.min(ab + bc - ac);
    }
    for _ in 0..30 {
        let a = State::Classical(random_classical(vec![3], &mut r));
        let b = State::Classical(random_classical(vec![3], &mut r));
        let c = State::Classical(random_classical(vec![3], &mut r));
        let d = |x: &State, y: &State| distance(x, y).unwrap();
        metric_ok &= d(&a, &a) == 0.0 && (d(&a, &b) - d(&b, &a)).abs() <= PROPERTY_TOL;
        worst_triangle = worst_triangle.min(d(&a, &b) + d(&b, &c) - d(&a, &c));
    }
    out.push(check(
        "metric axioms for D",
        metric_ok && worst_triangle >= -PROPERTY_TOL,
        format!("min triangle slack {worst_triangle:e}"),
    ));

    // Concavity over 200 random pairs and three weights.
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let (s1, s2) = (random_mixture(&pair, &mut r), random_mixture(&pair, &mut r));
        let (h1, h2) = (hval(e, &s1), hval(e, &s2));
        for (n, d) in [(1, 4), (1, 2), (3, 4)] {
            let p = ratio(n, d);
            let hm = hval(e, &s1.mix(&p, &s2).unwrap());
            let pf = n as f64 / d as f64;
            worst = worst.min(hm - (pf * h1 + (1.0 - pf) * h2));
        }
    }
    out.push(check("concavity", worst >= -PROPERTY_TOL, format!("min slack {worst:e}")));

    // Subadditivity and boundedness.
    let mut worst_sub = f64::INFINITY;
    let mut bounded = true;
    for _ in 0..100 {
        let s = random_mixture(&pair, &mut r);
        let (hab, ha, hb) = (hval(e, &s), hval(e, &s.marginal(&[0]).unwrap()), hval(e, &s.marginal(&[1]).unwrap()));
        worst_sub = worst_sub.min(ha + hb - hab);
        let log_d = (s.signature().output_count() as f64).log2();
        bounded &= hab >= -PROPERTY_TOL && hab <= log_d + PROPERTY_TOL;
    }
    out.push(check("subadditivity", worst_sub >= -PROPERTY_TOL, format!("min slack {worst_sub:e}")));
    out.push(check("boundedness 0 <= H <= log d", bounded, ""));

    // Limited continuity, on random close pairs plus a near-deterministic
    // classical pair.
    let mut pairs: Vec<(State, State, usize)> = Vec::new();
    for k in 0..60 {
        let s1 = random_mixture(&pair, &mut r);
        let v = &pair[k % pair.len()];
        let t = if k % 2 == 0 { ratio(1, 100) } else { ratio(1, 20) };
        let s2 = v.mix(&t, &s1).unwrap();
        let d = s1.signature().output_count();
        pairs.push((State::Box(s1), State::Box(s2), d));
    }
    let point = ClassicalState::point_mass(2, 0).unwrap();
    let near = ClassicalState::from_probs(vec![ratio(99, 100), ratio(1, 100)]).unwrap();
    pairs.push((State::Classical(point), State::Classical(near), 2));
    let (mut stated_ok, mut corrected_ok) = (true, true);
    let mut stated_worst = f64::INFINITY;
    for (s1, s2, dmax) in &pairs {
        let dist = distance(s1, s2).unwrap();
        if dist <= 0.0 || dist >= 1.0 / std::f64::consts::E {
            continue;
        }
        let gap = (e.hhat(s1).unwrap().value_bits - e.hhat(s2).unwrap().value_bits).abs();
        let stated = dist * (*dmax as f64 / dist).log2();
        stated_worst = stated_worst.min(stated - gap);
        stated_ok &= gap <= stated + PROPERTY_TOL;
        let corrected = dist * ((*dmax - 1) as f64).log2() + h(dist);
        corrected_ok &= gap <= corrected + PROPERTY_TOL;
    }
    out.push(
        check("limited continuity as stated: D log(Dmax/D)", stated_ok, format!("min slack {stated_worst:e}"))
            .known_failure(),
    );
    out.push(check("continuity with D log(Dmax-1) + h(D)", corrected_ok, ""));

    // Monotonicity of H+ and the box chain rule on random tripartite states.
    let classical_bits = vertices(&[(1, 2)]);
    let tri: Vec<BoxState> = pair.iter().flat_map(|v| classical_bits.iter().map(move |c| v.tensor(c))).collect();
    let mut worst_mono = f64::INFINITY;
    for _ in 0..40 {
        let s = State::Box(random_mixture(&tri, &mut r));
        let ha = e.hhat_of(&s, &[0]).unwrap().value_bits;
        let hab = e.cond_plus(&s, &part(&[0], &[1])).unwrap().value_bits;
        let habc = e.cond_plus(&s, &part(&[0], &[1, 2])).unwrap().value_bits;
        worst_mono = worst_mono.min((ha - hab).min(hab - habc));
    }
    out.push(check("H(A) >= H+(A|B) >= H+(A|BC)", worst_mono >= -PROPERTY_TOL, format!("min slack {worst_mono:e}")));

    let cmb = vertices(&[(1, 2), (1, 2), (2, 2)]);
    let rac = build_rac_state();
    let mut worst_chain = f64::INFINITY;
    for k in 0..40 {
        let mut s = random_mixture(&cmb, &mut r);
        if k % 2 == 0 {
            s = rac.mix(&ratio(1, 2), &s).unwrap();
        }
        let s = State::Box(s);
        let lhs = e.cond_plus(&s, &part(&[0], &[1, 2])).unwrap().value_bits;
        let rhs = e.cond_plus(&s, &part(&[0, 1], &[2])).unwrap().value_bits - e.hhat_of(&s, &[1]).unwrap().value_bits;
        worst_chain = worst_chain.min(lhs - rhs);
    }
    out.push(
        check(
            "H+(C|MB) >= H+(CM|B) - H(M), random states",
            worst_chain >= -PROPERTY_TOL,
            format!("min slack {worst_chain:e}"),
        )
        .known_failure(),
    );
    let s = State::Box(routed_bit());
    let lhs = e.cond_plus(&s, &part(&[0], &[1, 2])).unwrap().value_bits;
    let rhs = e.cond_plus(&s, &part(&[0, 1], &[2])).unwrap().value_bits - e.hhat_of(&s, &[1]).unwrap().value_bits;
    out.push(
        check("H+(C|MB) >= H+(CM|B) - H(M), C = B(M)", lhs >= rhs - PROPERTY_TOL, format!("{lhs:.10} vs {rhs:.10}"))
            .known_failure(),
    );

    // Rényi ordering over alpha = 1/2 < 1 < 2 < inf.
    let orders = [RenyiOrder::Finite(0.5), RenyiOrder::Finite(1.0), RenyiOrder::Finite(2.0), RenyiOrder::Infinity];
    let (mut stated, mut decreasing) = (true, true);
    for _ in 0..30 {
        let s = State::Box(random_mixture(&pair, &mut r));
        let v: Vec<f64> = orders.iter().map(|&o| e.hhat_alpha(&s, o).unwrap().value_bits).collect();
        for w in v.windows(2) {
            stated &= w[1] >= w[0] - PROPERTY_TOL;
            decreasing &= w[1] <= w[0] + PROPERTY_TOL;
        }
    }
    out.push(check("Renyi ordering as stated: alpha < beta => H_beta >= H_alpha", stated, "").known_failure());
    out.push(check("Renyi ordering: alpha < beta => H_beta <= H_alpha", decreasing, ""));
    out
}

fn criterion_9(e: &Engine) -> Vec<Check> {
    let s = State::Box(build_rac_state());
    let plus = |s: &State, p: &Partition| e.cond_plus(s, p).map(|r| r.value_bits);
    let standard = |s: &State, p: &Partition| e.cond_standard(s, p).map(|r| r.value_bits);
    let x0z = part(&[0], &[2]);
    let x1z = part(&[1], &[2]);
    let x01z = part(&[0, 1], &[2]);
    let x0_x1z = part(&[0], &[1, 2]);
    let d = |p: &Partition| e.determinable(&s, p).unwrap();
    let mut out =
        vec![check("X0 and X1 determinable from Z, X0X1 not", d(&x0z) && d(&x1z) && !d(&x01z) && d(&x0_x1z), "")];
    let reasonable =
        [&x0z, &x1z, &x01z, &x0_x1z].iter().all(|p| e.check_reasonableness(plus, &s, p).unwrap().reasonable);
    out.push(check("cond_plus satisfies {1} and {2}", reasonable, ""));
    let r = e.check_reasonableness(standard, &s, &x0_x1z).unwrap();
    out.push(check("cond_standard violates {1} on X0|X1Z", !r.satisfies_1, format!("value {:.10}", r.value)));
    let (a, b, ab) = (plus(&s, &x0z).unwrap(), plus(&s, &x1z).unwrap(), plus(&s, &x01z).unwrap());
    out.push(check("cond_plus violates subadditivity", ab > a + b + ENTROPY_TOL, format!("{ab:.10} > {:.10}", a + b)));
    let x1_x0z = plus(&s, &part(&[1], &[0, 2])).unwrap();
    out.push(check(
        "cond_plus violates the chain rule",
        (ab - (a + x1_x0z)).abs() > ENTROPY_TOL,
        format!("H+(X0X1|Z) = {ab:.10}, H+(X0|Z) + H+(X1|X0Z) = {:.10}", a + x1_x0z),
    ));
    out
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// Exact typical mass and count for Bernoulli(1/10), summed over the
/// number of ones.
fn typical_oracle(n: usize, eps: f64) -> (Rational, BigUint) {
    let h = h(0.1);
    let (mut mass, mut count) = (Rational::zero(), BigUint::zero());
    for k in 0..=n {
        let surprisal = -(k as f64 * 0.1f64.log2() + (n - k) as f64 * 0.9f64.log2()) / n as f64;
        if (surprisal - h).abs() <= eps + 1e-12 {
            let c = binomial(n, k);
            let p = num_traits::pow(ratio(1, 10), k) * num_traits::pow(ratio(9, 10), n - k);
            mass += p * Rational::from_integer(c.clone().into());
            count += c;
        }
    }
    (mass, count)
}

fn criterion_10(_: &Engine) -> Vec<Check> {
    let mut out = Vec::new();
    let eps = 0.05;
    let source = Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap();
    let mut masses = Vec::new();
    for n in [200, 1000, 2000] {
        let t = typical_mass_and_count(&source, n, eps).unwrap();
        let (mass, count) = typical_oracle(n, eps);
        out.push(check(
            format!("n = {n}: exact mass and count match the oracle"),
            t.mass_exact.as_ref() == Some(&mass) && t.count.as_ref() == Some(&count),
            format!("mass {:.10}", t.mass),
        ));
        let log2_count = rational::log2(&Rational::from_integer(count.into()));
        let lower = (1.0 - rational::to_f64(&(Rational::one() - &mass))).log2() + n as f64 * (h(0.1) - eps);
        let upper = n as f64 * (h(0.1) + eps);
        out.push(check(
            format!("n = {n}: (ii) (1-delta) 2^(n(H-eps)) <= |T| <= 2^(n(H+eps))"),
            lower <= log2_count + 1e-9 && log2_count <= upper + 1e-9,
            format!("{lower:.4} <= {log2_count:.4} <= {upper:.4}"),
        ));
        masses.push(rational::to_f64(&mass));
    }
    out.push(check(
        format!("(i) typical mass >= 1 - {TYPICAL_DELTA} at n = 2000, nondecreasing in n"),
        masses[2] >= 1.0 - TYPICAL_DELTA && masses.windows(2).all(|w| w[1] >= w[0]),
        format!("{masses:.6?}"),
    ));

    let config = CodingConfig::classical(0.6, eps, DISTANCE_TARGET).unwrap();
    let report = simulate_compression(&source, 2000, &config, 200, 11).unwrap();
    let atypical = 1.0 - masses[2];
    out.push(check(
        "compression at R = 0.6, n = 2000: exact average distance <= 0.05",
        report.exact_avg_distance <= DISTANCE_TARGET && (report.exact_avg_distance - atypical).abs() < 1e-12,
        format!("{:.10}", report.exact_avg_distance),
    ));
    out.push(check(
        "compression dimension <= 2^(nR)",
        report.dimension_within_rate,
        format!("log2 dim {:.4} vs {:.4}", report.log2_dimension, report.dimension_bound_log2),
    ));

    let s1 = ClassicalState::from_probs(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    let s2 = ClassicalState::from_probs(vec![ratio(1, 4), ratio(3, 4)]).unwrap();
    let kl = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
    let rates: Vec<f64> = [1000, 3000, 5000].iter().map(|&n| hypothesis_test_pn(&s1, &s2, n).unwrap().rate).collect();
    out.push(close("hypothesis rate at N = 5000 vs KL(1/2||1/4)", rates[2], kl, RATE_TOL));
    out.push(check(
        "hypothesis rate approaches KL",
        rates.windows(2).all(|w| (w[1] - kl).abs() < (w[0] - kl).abs()),
        format!("{rates:.6?}"),
    ));
    out
}

fn criterion_11(e: &Engine) -> Vec<Check> {
    let sweep = ssa_sweep(e, 0.5, 1.0, 0.01).unwrap();
    let t = sweep.threshold.unwrap_or(f64::NAN);
    vec![check(
        "subadditivity threshold in [0.88, 0.90]",
        (THRESHOLD_RANGE.0..=THRESHOLD_RANGE.1).contains(&t),
        format!("threshold {t:.6}"),
    )
    .known_failure()]
}

fn main() {
    let engine = Engine::default();
    let criteria: [(u32, Criterion); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let start = Instant::now();
    let mut unexpected = 0;
    for (n, f) in criteria {
        let t = Instant::now();
        let checks = f(&engine);
        let pass = checks.iter().all(|c| c.pass);
        println!("criterion {n}: {} ({:.1}s)", if pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        for c in &checks {
            let status = match (c.pass, c.known_failure) {
                (true, _) => "PASS",
                (false, true) => "FAIL (known failure)",
                (false, false) => "FAIL",
            };
            let detail = if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) };
            println!("    {status} {}{detail}", c.name);
            if !c.pass && !c.known_failure {
                unexpected += 1;
            }
        }
    }
    println!("total {:.1}s, {unexpected} unexpected failures", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
