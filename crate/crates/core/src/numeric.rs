//! Exact rational arithmetic helpers and certified real approximations.
//!
//! Every game decision in this crate is made on exact rationals. Real numbers
//! only appear at the display boundary (d-th roots of rationals rendered as
//! decimal strings) and in certified interval form when a rational quantity
//! has to be compared against an irrational bound. All integer work goes
//! through `num::BigInt`, so results are identical across platforms.

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational used throughout the crate.
pub type Rat = BigRational;

/// Default number of significant digits for decimal rendering.
pub const DEFAULT_SIG_DIGITS: usize = 12;

/// Certified bounds on ln 2, 30 fractional digits wide.
/// ln 2 = 0.693147180559945309417232121458176568... so the true value lies
/// strictly between the two rationals below.
pub fn ln2_bounds() -> (Rat, Rat) {
    let num: BigInt = "693147180559945309417232121458".parse().unwrap();
    let den = BigInt::from(10u8).pow(30);
    let lo = Rat::new(num.clone(), den.clone());
    let hi = Rat::new(num + BigInt::one(), den);
    (lo, hi)
}

pub fn rat_from_u64(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Raises a rational to a non-negative integer power without re-reducing:
/// powers of a reduced fraction are already reduced.
pub fn rat_pow(r: &Rat, exp: u32) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    Rat::new_raw(r.numer().pow(exp), r.denom().pow(exp))
}

/// Parses a weight entry: an integer string `"7"`, a fraction `"7/2"`, or a
/// decimal `"3.5"`. Used for both JSON string entries and CLI arguments.
pub fn parse_rational(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let frac_part = frac_part.trim();
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal literal {s:?}")));
        }
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        let negative = int_part.starts_with('-');
        let whole: BigInt = int_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal literal {s:?}")))?;
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal literal {s:?}")))?;
        let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
        let mut numer = whole.abs() * &scale + frac;
        if negative {
            numer = -numer;
        }
        return Ok(Rat::new(numer, scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer literal {s:?}")))?;
    Ok(Rat::from_integer(n))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Largest `y` with `y^deg * denom <= numer`, i.e. the floor of the `deg`-th
/// root of `numer/denom`. Both inputs must be non-negative.
fn floor_root_of_ratio(numer: &BigUint, denom: &BigUint, deg: u32) -> BigUint {
    debug_assert!(deg >= 1);
    debug_assert!(!denom.is_zero());
    let mut y = (numer / denom).nth_root(deg);
    // nth_root of the floored quotient can land below the true floor; fix up
    // with exact comparisons.
    loop {
        let next = &y + 1u32;
        if next.pow(deg) * denom <= *numer {
            y = next;
        } else {
            break;
        }
    }
    while !y.is_zero() && y.pow(deg) * denom > *numer {
        y -= 1u32;
    }
    y
}

fn rat_to_unsigned_parts(x: &Rat) -> Result<(BigUint, BigUint), Error> {
    if x.is_negative() {
        return Err(Error::Parse(format!(
            "cannot take an even-style root of negative value {x}"
        )));
    }
    let (_, numer) = x.numer().clone().into_parts();
    let (_, denom) = x.denom().clone().into_parts();
    Ok((numer, denom))
}

/// Certified enclosure of `x^(1/deg)` for `x >= 0`: returns `(lo, hi)` with
/// `lo <= x^(1/deg) <= hi` and `hi - lo = 10^-frac_digits`.
pub fn nth_root_bounds(x: &Rat, deg: u32, frac_digits: u32) -> Result<(Rat, Rat), Error> {
    let (numer, denom) = rat_to_unsigned_parts(x)?;
    if numer.is_zero() {
        return Ok((Rat::zero(), Rat::zero()));
    }
    let shift = BigUint::from(10u8).pow(frac_digits * deg);
    let y = floor_root_of_ratio(&(numer * shift), &denom, deg);
    let scale = BigInt::from(10u8).pow(frac_digits);
    let lo = Rat::new(BigInt::from_biguint(Sign::Plus, y.clone()), scale.clone());
    let hi = Rat::new(BigInt::from_biguint(Sign::Plus, y + 1u32), scale);
    Ok((lo, hi))
}

/// Decimal digits of a positive BigUint.
fn digit_count(x: &BigUint) -> usize {
    x.to_string().len()
}

/// Renders `x^(1/deg)` as a plain decimal with exactly `sig` significant
/// digits, rounded half-up. Computed entirely in integer arithmetic: the
/// digit stream is the exact floor of the scaled root, with two guard digits
/// deciding the rounding, so output is identical on every platform.
pub fn decimal_root(x: &Rat, deg: u32, sig: usize) -> Result<String, Error> {
    assert!(sig >= 1, "need at least one significant digit");
    let (numer, denom) = rat_to_unsigned_parts(x)?;
    if numer.is_zero() {
        return Ok("0".to_string());
    }
    let guard = 2usize;
    // Find a shift s such that floor(10^s * root) carries sig + guard digits.
    let mut s = (sig + guard) as i64;
    let (digits, exp10) = loop {
        let y = scaled_floor_root(&numer, &denom, deg, s);
        let len = digit_count(&y) as i64;
        let want = (sig + guard) as i64;
        if len == want {
            // Value in [10^(len-1), 10^len) / 10^s, so the integer part of the
            // root has len - s digits (possibly <= 0).
            break (y, len - s);
        }
        s += want - len;
    };

    // Round half-up on the guard digits.
    let hundred = BigUint::from(100u8);
    let (mut kept, rem) = digits.div_rem(&hundred);
    if rem >= BigUint::from(50u8) {
        kept += 1u32;
    }
    let mut kept_str = kept.to_string();
    let mut exp10 = exp10;
    if kept_str.len() > sig {
        // Carry overflowed into a new leading digit (all-nines case).
        kept_str.truncate(sig);
        exp10 += 1;
    }
    debug_assert_eq!(kept_str.len(), sig);
    Ok(place_decimal_point(&kept_str, exp10))
}

/// floor(10^s * (numer/denom)^(1/deg)) for possibly negative s.
fn scaled_floor_root(numer: &BigUint, denom: &BigUint, deg: u32, s: i64) -> BigUint {
    if s >= 0 {
        let shift = BigUint::from(10u8).pow((s as u32) * deg);
        floor_root_of_ratio(&(numer * shift), denom, deg)
    } else {
        let shift = BigUint::from(10u8).pow(((-s) as u32) * deg);
        floor_root_of_ratio(numer, &(denom * shift), deg)
    }
}

/// Places the decimal point so the printed value equals `0.digits * 10^exp10`.
fn place_decimal_point(digits: &str, exp10: i64) -> String {
    let n = digits.len() as i64;
    if exp10 <= 0 {
        let zeros = (-exp10) as usize;
        format!("0.{}{}", "0".repeat(zeros), digits)
    } else if exp10 >= n {
        format!("{}{}", digits, "0".repeat((exp10 - n) as usize))
    } else {
        let (int_part, frac_part) = digits.split_at(exp10 as usize);
        format!("{int_part}.{frac_part}")
    }
}

/// Decimal rendering of a non-negative rational at `sig` significant digits.
pub fn decimal(x: &Rat, sig: usize) -> Result<String, Error> {
    decimal_root(x, 1, sig)
}

/// f64 reading of `x^(1/deg)`, obtained by parsing the 17-digit decimal
/// rendering (17 digits round-trip any f64, and Rust's parser rounds
/// correctly, so this is deterministic).
pub fn root_to_f64(x: &Rat, deg: u32) -> Result<f64, Error> {
    let s = decimal_root(x, deg, 17)?;
    Ok(s.parse::<f64>().expect("decimal rendering always parses"))
}

/// Exact comparison helper: true iff `a^p <= b` for rationals.
pub fn pow_le(a: &Rat, p: u32, b: &Rat) -> bool {
    rat_pow(a, p) <= *b
}

pub fn to_f64_lossy(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_accepts_integer_fraction_and_decimal() {
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("7/2").unwrap(), rat(7, 2));
        assert_eq!(parse_rational("3.5").unwrap(), rat(7, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational(" 9/18 ").unwrap(), rat(1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "x", "1/0", "1.2.3", "3.", "2/a", "1e3"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn format_roundtrips_through_parse() {
        for r in [rat(7, 1), rat(7, 2), rat(1, 4), rat(100, 3)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn decimal_of_exact_values() {
        assert_eq!(decimal(&rat(5, 1), 12).unwrap(), "5.00000000000");
        assert_eq!(decimal(&rat(7, 2), 12).unwrap(), "3.50000000000");
        assert_eq!(decimal(&rat(1, 3), 12).unwrap(), "0.333333333333");
        assert_eq!(decimal(&rat(2, 3), 12).unwrap(), "0.666666666667");
        assert_eq!(decimal(&rat(0, 1), 12).unwrap(), "0");
        assert_eq!(decimal(&rat(1000, 1), 3).unwrap(), "1000");
    }

    #[test]
    fn decimal_root_matches_known_roots() {
        // sqrt(25) = 5, cbrt(27) = 3, sqrt(2) = 1.41421356237...
        assert_eq!(decimal_root(&rat(25, 1), 2, 12).unwrap(), "5.00000000000");
        assert_eq!(decimal_root(&rat(27, 1), 3, 12).unwrap(), "3.00000000000");
        assert_eq!(
            decimal_root(&rat(2, 1), 2, 12).unwrap(),
            "1.41421356237"
        );
        // 13^(1/2) = 3.60555127546...
        assert_eq!(decimal_root(&rat(13, 1), 2, 6).unwrap(), "3.60555");
    }

    #[test]
    fn decimal_root_of_small_values() {
        // (1/1000)^(1/3) = 0.1
        assert_eq!(
            decimal_root(&rat(1, 1000), 3, 5).unwrap(),
            "0.10000"
        );
        // 1/64 ^ 1/2 = 0.125
        assert_eq!(decimal_root(&rat(1, 64), 2, 3).unwrap(), "0.125");
    }

    #[test]
    fn decimal_rounds_half_up_with_carry() {
        // 0.9999995 at 6 sig digits rounds to 1.00000
        let x = rat(9999995, 10_000_000);
        assert_eq!(decimal(&x, 6).unwrap(), "1.00000");
        // 2.5 at 1 digit rounds up to 3
        assert_eq!(decimal(&rat(5, 2), 1).unwrap(), "3");
    }

    #[test]
    fn root_bounds_enclose_the_true_root() {
        for (n, d, deg) in [(2i64, 1i64, 2u32), (13, 1, 2), (7, 2, 3), (100, 7, 5)] {
            let x = rat(n, d);
            let (lo, hi) = nth_root_bounds(&x, deg, 20).unwrap();
            assert!(rat_pow(&lo, deg) <= x, "lo too big for {n}/{d}");
            assert!(rat_pow(&hi, deg) >= x, "hi too small for {n}/{d}");
            let width = Rat::new(BigInt::one(), BigInt::from(10u8).pow(20));
            assert_eq!(&hi - &lo, width);
        }
    }

    #[test]
    fn root_bounds_of_exact_powers_are_tight_below() {
        let (lo, hi) = nth_root_bounds(&rat(8, 1), 3, 10).unwrap();
        assert_eq!(lo, rat(2, 1));
        assert!(hi > rat(2, 1));
    }

    #[test]
    fn ln2_enclosure_is_sane() {
        let (lo, hi) = ln2_bounds();
        assert!(lo < hi);
        let width = &hi - &lo;
        assert_eq!(width, Rat::new(BigInt::one(), BigInt::from(10u8).pow(30)));
        let mid = to_f64_lossy(&lo);
        assert!((mid - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn root_to_f64_is_close() {
        let v = root_to_f64(&rat(13, 1), 2).unwrap();
        assert!((v - 13f64.sqrt()).abs() < 1e-12);
    }
}
