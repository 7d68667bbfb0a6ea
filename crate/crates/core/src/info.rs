//! Classical information measures on finite distributions, in bits.

use crate::rational::{self, Rational};

/// Order of a Rényi entropy. `Finite(1.0)` is the Shannon entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    Finite(f64),
    Infinity,
}

impl RenyiOrder {
    pub fn is_shannon(&self) -> bool {
        matches!(self, RenyiOrder::Finite(a) if *a == 1.0)
    }
}

impl std::str::FromStr for RenyiOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "max" => Ok(RenyiOrder::Infinity),
            other => {
                let a: f64 = other.parse().map_err(|_| format!("bad Rényi order {s:?}"))?;
                if a.is_finite() && a >= 0.0 {
                    Ok(RenyiOrder::Finite(a))
                } else {
                    Err(format!("Rényi order must be >= 0, got {s}"))
                }
            }
        }
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::Infinity => write!(f, "inf"),
        }
    }
}

/// Shannon entropy with `0 log 0 = 0`.
pub fn shannon(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    // -0.0 for point masses
    h.max(0.0)
}

pub fn shannon_exact(p: &[Rational]) -> f64 {
    let floats: Vec<f64> = p.iter().map(rational::to_f64).collect();
    shannon(&floats)
}

pub fn renyi(p: &[f64], order: RenyiOrder) -> f64 {
    let support = p.iter().copied().filter(|&x| x > 0.0);
    match order {
        RenyiOrder::Infinity => {
            let max = support.fold(0.0f64, f64::max);
            (-max.log2()).max(0.0)
        }
        RenyiOrder::Finite(a) if a == 1.0 => shannon(p),
        RenyiOrder::Finite(a) if a == 0.0 => (support.count() as f64).log2(),
        RenyiOrder::Finite(a) => {
            let s: f64 = support.map(|x| x.powf(a)).sum();
            (s.log2() / (1.0 - a)).max(0.0)
        }
    }
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon(&[p, 1.0 - p])
}

/// Mutual information of a joint distribution given as `joint[x][y]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
    let ny = joint.first().map_or(0, Vec::len);
    let py: Vec<f64> = (0..ny).map(|y| joint.iter().map(|row| row[y]).sum()).collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    (shannon(&px) + shannon(&py) - shannon(&flat)).max(0.0)
}

/// Kullback-Leibler divergence `D(p || q)`; infinite if `p` is not
/// absolutely continuous with respect to `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| if b > 0.0 { a * (a / b).log2() } else { f64::INFINITY })
        .sum()
}

/// Half the L1 distance.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn total_variation_exact(p: &[Rational], q: &[Rational]) -> Rational {
    let s = p.iter().zip(q).fold(rational::zero(), |acc, (a, b)| {
        let d = a - b;
        acc + if d < rational::zero() { -d } else { d }
    });
    s / rational::int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shannon_of_uniform_and_point_mass() {
        assert!((shannon(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(shannon(&[1.0, 0.0]), 0.0);
        assert!((shannon(&[0.25; 4]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn renyi_orders_on_biased_bit() {
        let p = [0.75, 0.25];
        let h1 = renyi(&p, RenyiOrder::Finite(1.0));
        let h2 = renyi(&p, RenyiOrder::Finite(2.0));
        let hinf = renyi(&p, RenyiOrder::Infinity);
        assert!((h2 - -(0.625f64).log2()).abs() < 1e-12);
        assert!((hinf - -(0.75f64).log2()).abs() < 1e-12);
        assert!(h1 > h2 && h2 > hinf);
        assert!((renyi(&p, RenyiOrder::Finite(0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kl_matches_closed_form() {
        let d = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]);
        let expected = 0.5 * 1.0 + 0.5 * (0.5f64 / 0.75).log2();
        assert!((d - expected).abs() < 1e-15);
        assert!(kl_divergence(&[1.0, 0.0], &[0.0, 1.0]).is_infinite());
    }

    #[test]
    fn mutual_information_of_perfect_correlation() {
        let j = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
        assert!((mutual_information(&j) - 1.0).abs() < 1e-15);
        let ind = vec![vec![0.25, 0.25], vec![0.25, 0.25]];
        assert!(mutual_information(&ind).abs() < 1e-15);
    }

    #[test]
    fn parses_orders() {
        assert_eq!("inf".parse::<RenyiOrder>().unwrap(), RenyiOrder::Infinity);
        assert_eq!("2".parse::<RenyiOrder>().unwrap(), RenyiOrder::Finite(2.0));
        assert!("-1".parse::<RenyiOrder>().is_err());
    }
}
