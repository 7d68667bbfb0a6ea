//! JSON state files.
//!
//! ```json
//! {"theory": "boxworld", "signature": ["2:2", "2:2"], "table": [[1, 2], "0", ...]}
//! ```
//!
//! * `classical`: `signature` lists alphabet sizes; `table` is the joint
//!   distribution, subsystem 0 most significant.
//! * `quantum`: `signature` lists Hilbert-space factor dimensions; `table`
//!   holds the `d x d` matrix row-major as `[re, im]` pairs.
//! * `boxworld`: `signature` lists boxes as `"inputs:outputs"`,
//!   `[inputs, outputs]` or `{"inputs": .., "outputs": ..}`, or is a single
//!   `"2:2,2:2"` string; `table[x * M + a]` is `P(a|x)` where `x` and `a`
//!   are the joint input and output indices (subsystem 0 most significant)
//!   and `M` the number of joint outputs.
//!
//! Rational entries are `[num, den]`, `"num/den"`, a decimal string or an
//! integer.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Number, Value};

use crate::boxworld::{BoxSpec, BoxState, Signature};
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::framework::{State, Theory};
use crate::quantum::DensityMatrix;
use crate::rational::{self, Rational};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    theory: Theory,
    signature: RawSignature,
    table: Vec<RawEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSignature {
    Text(String),
    List(Vec<RawBox>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawBox {
    Size(usize),
    Pair([usize; 2]),
    Text(String),
    Spec(BoxSpec),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Pair([Number; 2]),
    Text(String),
    Scalar(Number),
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

/// Parses `"2:2,2:2"` into a box-world signature.
pub fn parse_signature(text: &str) -> Result<Signature> {
    let boxes = text
        .split(',')
        .map(|part| parse_box(part).map_err(|m| parse_error("signature", m)))
        .collect::<Result<Vec<_>>>()?;
    Signature::new(boxes)
}

fn parse_box(text: &str) -> std::result::Result<BoxSpec, String> {
    let (i, o) = text.trim().split_once(':').ok_or_else(|| format!("expected inputs:outputs, got {text:?}"))?;
    let i = i.trim().parse().map_err(|_| format!("bad input count {i:?}"))?;
    let o = o.trim().parse().map_err(|_| format!("bad output count {o:?}"))?;
    Ok(BoxSpec::new(i, o))
}

fn dims_of(sig: &RawSignature) -> Result<Vec<usize>> {
    match sig {
        RawSignature::List(items) => items
            .iter()
            .enumerate()
            .map(|(k, b)| match b {
                RawBox::Size(d) => Ok(*d),
                _ => Err(parse_error(format!("signature[{k}]"), "expected a dimension")),
            })
            .collect(),
        RawSignature::Text(_) => Err(parse_error("signature", "expected a list of dimensions")),
    }
}

fn box_signature(sig: &RawSignature) -> Result<Signature> {
    match sig {
        RawSignature::Text(t) => parse_signature(t),
        RawSignature::List(items) => {
            let boxes = items
                .iter()
                .enumerate()
                .map(|(k, b)| match b {
                    RawBox::Pair([i, o]) => Ok(BoxSpec::new(*i, *o)),
                    RawBox::Spec(s) => Ok(*s),
                    RawBox::Text(t) => parse_box(t).map_err(|m| parse_error(format!("signature[{k}]"), m)),
                    RawBox::Size(_) => Err(parse_error(format!("signature[{k}]"), "expected inputs:outputs")),
                })
                .collect::<Result<Vec<_>>>()?;
            Signature::new(boxes)
        }
    }
}

fn rational_entry(k: usize, e: &RawEntry) -> Result<Rational> {
    let path = format!("table[{k}]");
    let int = |n: &Number, what: &str| {
        n.as_i64().ok_or_else(|| parse_error(path.clone(), format!("{what} {n} is not an integer")))
    };
    match e {
        RawEntry::Pair([n, d]) => {
            let (n, d) = (int(n, "numerator")?, int(d, "denominator")?);
            if d == 0 {
                return Err(parse_error(path, "zero denominator"));
            }
            Ok(rational::ratio(n, d))
        }
        RawEntry::Text(t) => rational::parse(t).map_err(|e| match e {
            Error::Parse { message, .. } => parse_error(path, message),
            other => other,
        }),
        RawEntry::Scalar(n) => rational::parse(&n.to_string()).map_err(|_| parse_error(path, "bad number")),
    }
}

fn complex_entry(k: usize, e: &RawEntry) -> Result<Complex64> {
    match e {
        RawEntry::Pair([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(parse_error(format!("table[{k}]"), "bad complex entry")),
        },
        RawEntry::Scalar(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        RawEntry::Text(_) => Err(parse_error(format!("table[{k}]"), "expected [re, im]")),
    }
}

/// Parses and validates a state from JSON text.
pub fn state_from_json(text: &str) -> Result<State> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawState =
        serde_path_to_error::deserialize(de).map_err(|e| parse_error(e.path().to_string(), e.inner().to_string()))?;
    match raw.theory {
        Theory::Classical => {
            let dims = dims_of(&raw.signature)?;
            let probs = raw.table.iter().enumerate().map(|(k, e)| rational_entry(k, e)).collect::<Result<_>>()?;
            Ok(State::Classical(ClassicalState::new(dims, probs)?))
        }
        Theory::Quantum => {
            let dims = dims_of(&raw.signature)?;
            let d: usize = dims.iter().product();
            if raw.table.len() != d * d {
                return Err(parse_error("table", format!("{} entries for a {d}x{d} matrix", raw.table.len())));
            }
            let entries = raw.table.iter().enumerate().map(|(k, e)| complex_entry(k, e)).collect::<Result<Vec<_>>>()?;
            Ok(State::Quantum(DensityMatrix::new(dims, DMatrix::from_row_slice(d, d, &entries))?))
        }
        Theory::Boxworld => {
            let sig = box_signature(&raw.signature)?;
            let table = raw.table.iter().enumerate().map(|(k, e)| rational_entry(k, e)).collect::<Result<_>>()?;
            Ok(State::Box(BoxState::new(sig, table)?))
        }
    }
}

pub fn read_state(path: &std::path::Path) -> Result<State> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_error(path.display().to_string(), e.to_string()))?;
    state_from_json(&text)
}

/// JSON form of a state in the schema read by [`state_from_json`].
/// Rationals are written as `"num/den"` strings.
pub fn state_to_json(state: &State) -> Value {
    let strings = |t: &[Rational]| t.iter().map(rational::format).collect::<Vec<_>>();
    match state {
        State::Classical(c) => json!({"theory": "classical", "signature": c.dims(), "table": strings(c.probs())}),
        State::Quantum(q) => {
            let d = q.dim();
            let m = q.matrix();
            let table: Vec<[f64; 2]> =
                (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| [m[(r, c)].re, m[(r, c)].im]).collect();
            json!({"theory": "quantum", "signature": q.dims(), "table": table})
        }
        State::Box(b) => {
            let sig: Vec<String> =
                b.signature().boxes().iter().map(|s| format!("{}:{}", s.inputs, s.outputs)).collect();
            json!({"theory": "boxworld", "signature": sig, "table": strings(b.table())})
        }
    }
}

#[derive(Serialize)]
struct ViolationReport<'a> {
    error: &'static str,
    subsystem: usize,
    inputs: (usize, usize),
    context_inputs: &'a [usize],
    context_outputs: &'a [usize],
}

/// Structured JSON for an error; non-signalling violations carry the
/// offending subsystem and inputs.
pub fn error_to_json(e: &Error) -> Value {
    match e {
        Error::Signalling(v) => serde_json::to_value(ViolationReport {
            error: "signalling",
            subsystem: v.subsystem,
            inputs: v.inputs,
            context_inputs: &v.context_inputs,
            context_outputs: &v.context_outputs,
        })
        .expect("plain struct"),
        Error::Parse { path, message } => json!({"error": "parse", "path": path, "message": message}),
        Error::GuardExceeded { what, needed, limit } => {
            json!({"error": "guard", "what": what, "needed": needed.to_string(), "limit": limit.to_string()})
        }
        other => json!({"error": "validation", "message": other.to_string()}),
    }
}
