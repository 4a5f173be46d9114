//! Rational approximations of transcendental functions at a requested
//! number of bits, so sampled evaluation never touches floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounds to the nearest multiple of `2^-bits`.
pub fn round_bits(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    let two = BigInt::from(2);
    let n = (scaled.numer() * &two + scaled.denom()).div_floor(&(scaled.denom() * &two));
    BigRational::new(n, scale)
}

fn magnitude_bits(x: &BigRational) -> u32 {
    let v = x.abs();
    if v <= BigRational::one() {
        return 0;
    }
    (v.numer().bits() - v.denom().bits() + 1) as u32
}

/// Halvings needed to bring |x| below 1/2.
fn halvings(x: &BigRational) -> u32 {
    magnitude_bits(x) + 1
}

fn exp_small(x: &BigRational, work: u32) -> BigRational {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (work + 2));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = 1u64;
    loop {
        term = round_bits(&(term * x / BigRational::from_integer(k.into())), work + 8);
        if term.abs() < eps {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

pub fn exp(x: &BigRational, prec: u32) -> BigRational {
    let h = halvings(x);
    let big = magnitude_bits(x);
    // squaring h times multiplies relative error by 2^h; the result can
    // have up to ~1.5*2^big bits of magnitude
    let work = prec + h + 16 + (3u32 << big.min(20)) / 2;
    let y = x / BigRational::from_integer(BigInt::one() << h);
    let mut r = exp_small(&round_bits(&y, work), work);
    for _ in 0..h {
        r = round_bits(&(&r * &r), work);
    }
    round_bits(&r, prec)
}

fn sin_cos_small(x: &BigRational, work: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (work + 2));
    let mut s = BigRational::zero();
    let mut c = BigRational::zero();
    let mut term = BigRational::one();
    let mut k = 0u64;
    loop {
        if term.abs() < eps && k > 1 {
            break;
        }
        match k % 4 {
            0 => c += &term,
            1 => s += &term,
            2 => c -= &term,
            _ => s -= &term,
        }
        k += 1;
        term = round_bits(&(term * x / BigRational::from_integer(k.into())), work + 8);
    }
    (s, c)
}

pub fn sin_cos(x: &BigRational, prec: u32) -> (BigRational, BigRational) {
    let h = halvings(x);
    let work = prec + 2 * h + 16;
    let y = x / BigRational::from_integer(BigInt::one() << h);
    let (mut s, mut c) = sin_cos_small(&round_bits(&y, work), work);
    let two = BigRational::from_integer(2.into());
    for _ in 0..h {
        let s2 = round_bits(&(&two * &s * &c), work);
        let c2 = round_bits(&(&two * &c * &c - BigRational::one()), work);
        s = s2;
        c = c2;
    }
    (round_bits(&s, prec), round_bits(&c, prec))
}

/// Guard against arguments whose exponential would not fit in memory.
const MAX_EXP_ARG: f64 = 4096.0;

pub fn exp_fn(args: &[BigRational], prec: u32) -> Option<BigRational> {
    let x = &args[0];
    if x.to_f64().map_or(true, |v| v.abs() > MAX_EXP_ARG) {
        return None;
    }
    Some(exp(x, prec))
}

pub fn sin_fn(args: &[BigRational], prec: u32) -> Option<BigRational> {
    if args[0].to_f64().map_or(true, |v| v.abs() > 1e6) {
        return None;
    }
    Some(sin_cos(&args[0], prec).0)
}

pub fn cos_fn(args: &[BigRational], prec: u32) -> Option<BigRational> {
    if args[0].to_f64().map_or(true, |v| v.abs() > 1e6) {
        return None;
    }
    Some(sin_cos(&args[0], prec).1)
}

/// Decimal rendering with `digits` significant digits, for reports.
pub fn to_decimal(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_integer() && x.numer().to_string().trim_start_matches('-').len() <= digits {
        return x.numer().to_string();
    }
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v.is_finite() {
        return format!("{:.*e}", digits.saturating_sub(1), v);
    }
    let neg = x.is_negative();
    let a = x.abs();
    let exp10 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    format!("{}~1e{}", if neg { "-" } else { "" }, exp10)
}
