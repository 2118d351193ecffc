//! Exact per-window moments. Every f64 input is an integer multiple of a
//! common power of two, so with `A_k = sum (n x_i - S)^k` over integers:
//! skew = sqrt(n) A3 / A2^(3/2), kurt = n A4 / A2^2, vol^2 = A2 / (n^2 (n - 1)).
//! Each result is rounded once at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

pub struct ExactWindow {
    pub mean: f64,
    pub vol: f64,
    pub skew: Option<f64>,
    pub kurt: Option<f64>,
}

/// Integer mantissas scaled to a shared exponent.
pub fn to_fixed(x: &[f64]) -> (Vec<BigInt>, i32) {
    let parts: Vec<(u64, i16, i8)> = x.iter().map(|v| v.integer_decode()).collect();
    let e_min = parts
        .iter()
        .filter(|p| p.0 != 0)
        .map(|p| i32::from(p.1))
        .min()
        .unwrap_or(0);
    let ints = parts
        .iter()
        .map(|&(m, e, s)| {
            let v = BigInt::from(m) << (i32::from(e) - e_min) as usize;
            if s < 0 {
                -v
            } else {
                v
            }
        })
        .collect();
    (ints, e_min)
}

fn ratio(num: BigInt, den: BigInt) -> f64 {
    BigRational::new(num, den).to_f64().expect("finite")
}

pub fn window(ints: &[BigInt], exp: i32) -> ExactWindow {
    let n = BigInt::from(ints.len());
    let s: BigInt = ints.iter().sum();
    let dev: Vec<BigInt> = ints.iter().map(|x| &n * x - &s).collect();
    let power = |k: u32| dev.iter().map(|d| d.pow(k)).sum::<BigInt>();
    let (a2, a3, a4) = (power(2), power(3), power(4));
    let scale = 2f64.powi(exp);
    let mean = ratio(s, n.clone()) * scale;
    let vol = ratio(a2.clone(), &n * &n * (&n - 1)).sqrt() * scale;
    if a2.is_zero() {
        return ExactWindow {
            mean,
            vol,
            skew: None,
            kurt: None,
        };
    }
    // skew^2 = n a3^2 / a2^3, sign of a3
    let skew_sq = ratio(&n * &a3 * &a3, a2.pow(3));
    let skew = if a3.is_negative() {
        -skew_sq.sqrt()
    } else {
        skew_sq.sqrt()
    };
    let kurt = ratio(&n * a4, &a2 * &a2);
    ExactWindow {
        mean,
        vol,
        skew: Some(skew),
        kurt: Some(kurt),
    }
}

pub fn rolling(x: &[f64], window_days: usize) -> Vec<ExactWindow> {
    let (ints, exp) = to_fixed(x);
    (0..=x.len() - window_days)
        .map(|t| window(&ints[t..t + window_days], exp))
        .collect()
}
