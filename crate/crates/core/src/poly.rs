//! Exact coefficients of the critical-orbit polynomials `P_n(t) = q_t^n(0)`.
//!
//! `P_0 = 0` and `P_n = t - P_{n-1}²`, so `P_n` has degree `2^(n-1)` and
//! integer coefficients that outgrow 64 bits at `n = 8` (the largest
//! coefficient of `P_12` has about 1200 bits). Coefficients are kept as `i64`
//! while they fit and are promoted to `BigInt` on the first overflow; big
//! squarings go through a single Kronecker-substituted integer squaring.
//! Building `P_16`, the default maximum, takes on the order of minutes.
//!
//! Evaluating the coefficient form in floating point is hopeless beyond small
//! `n` because of cancellation. [`CriticalPolynomial::eval_exact`] evaluates
//! it exactly over the dyadic rationals instead; the everyday path is the
//! value recursion in [`crate::quad::critical_poly_eval`].

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq)]
enum Coeffs {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// `P_n` as a coefficient sequence in ascending powers of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPolynomial {
    order: usize,
    coeffs: Coeffs,
}

impl CriticalPolynomial {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree of the polynomial; the zero polynomial `P_0` reports 0.
    pub fn degree(&self) -> usize {
        self.len() - 1
    }

    /// Number of stored coefficients (`2^(n-1) + 1` for `n >= 1`, 1 for `P_0`).
    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Small(c) => c.len(),
            Coeffs::Big(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True while every coefficient fits in an `i64`.
    pub fn is_small(&self) -> bool {
        matches!(self.coeffs, Coeffs::Small(_))
    }

    pub fn as_i64(&self) -> Option<&[i64]> {
        match &self.coeffs {
            Coeffs::Small(c) => Some(c),
            Coeffs::Big(_) => None,
        }
    }

    pub fn coeff(&self, power: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Small(c) => c.get(power).map_or_else(BigInt::zero, |&v| BigInt::from(v)),
            Coeffs::Big(c) => c.get(power).cloned().unwrap_or_default(),
        }
    }

    pub fn coeffs_big(&self) -> Vec<BigInt> {
        match &self.coeffs {
            Coeffs::Small(c) => c.iter().map(|&v| BigInt::from(v)).collect(),
            Coeffs::Big(c) => c.clone(),
        }
    }

    /// Coefficients rounded to `f64` (infinite when a coefficient exceeds the
    /// `f64` range).
    pub fn coeffs_f64(&self) -> Vec<f64> {
        match &self.coeffs {
            Coeffs::Small(c) => c.iter().map(|&v| v as f64).collect(),
            Coeffs::Big(c) => c
                .iter()
                .map(|v| v.to_f64().unwrap_or(f64::INFINITY))
                .collect(),
        }
    }

    /// Bit length of the largest coefficient magnitude.
    pub fn max_coeff_bits(&self) -> u64 {
        match &self.coeffs {
            Coeffs::Small(c) => c
                .iter()
                .map(|v| 64 - v.unsigned_abs().leading_zeros() as u64)
                .max()
                .unwrap_or(0),
            Coeffs::Big(c) => c.iter().map(|v| v.bits()).max().unwrap_or(0),
        }
    }

    /// Horner evaluation in `f64`. Only trustworthy for small orders.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs_f64().iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Exact evaluation at the dyadic rational `t`, rounded once to `f64`.
    pub fn eval_exact(&self, t: f64) -> f64 {
        assert!(t.is_finite(), "eval_exact needs a finite argument");
        let coeffs = self.coeffs_big();
        if t == 0.0 {
            return coeffs[0].to_f64().unwrap_or(f64::NAN);
        }
        let (mantissa, exp) = decompose(t);
        let degree = coeffs.len() - 1;
        if exp >= 0 {
            let t_int = mantissa << exp as usize;
            let value = coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &t_int + c);
            return value.to_f64().unwrap_or(f64::NAN);
        }
        // t = m / 2^k; sum c_i m^i 2^(k(d-i)) over 2^(kd).
        let k = (-exp) as usize;
        let mut acc = coeffs[degree].clone();
        for (i, c) in coeffs.iter().enumerate().rev().skip(1) {
            acc = acc * &mantissa + (c << (k * (degree - i)));
        }
        scaled_to_f64(&acc, (k * degree) as i64)
    }
}

/// `t = mantissa * 2^exp` with an odd mantissa.
fn decompose(t: f64) -> (BigInt, i32) {
    let bits = t.to_bits();
    let negative = bits >> 63 == 1;
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    let m = BigInt::from(m);
    (if negative { -m } else { m }, e)
}

/// `num / 2^shift` rounded to `f64`.
fn scaled_to_f64(num: &BigInt, shift: i64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (num.abs() >> drop as usize).to_u64().expect("64 bits fit");
    let mut value = top as f64;
    let mut e = drop - shift;
    while e > 0 {
        let step = e.min(1000);
        value *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        value /= 2f64.powi(step as i32);
        e += step;
    }
    if num.sign() == Sign::Minus {
        -value
    } else {
        value
    }
}

/// `P_n` with the default order limit of 16.
pub fn critical_poly(n: usize) -> Result<CriticalPolynomial> {
    critical_poly_with_max(n, DEFAULT_MAX_ORDER)
}

pub fn critical_poly_with_max(n: usize, max_order: usize) -> Result<CriticalPolynomial> {
    if n > max_order {
        return Err(Error::TooLarge {
            what: "polynomial order",
            requested: n,
            max: max_order,
        });
    }
    let mut coeffs = Coeffs::Small(vec![0]);
    for _ in 0..n {
        coeffs = next_order(coeffs);
    }
    Ok(CriticalPolynomial { order: n, coeffs })
}

/// `t - p²`.
fn next_order(p: Coeffs) -> Coeffs {
    match p {
        Coeffs::Small(c) => match square_small(&c) {
            Some(mut sq) => {
                sq.iter_mut().for_each(|v| *v = -*v);
                add_t_small(&mut sq);
                Coeffs::Small(sq)
            }
            None => next_order(Coeffs::Big(c.into_iter().map(BigInt::from).collect())),
        },
        Coeffs::Big(c) => {
            let mut sq = square_big(&c);
            sq.iter_mut().for_each(|v| *v = -&*v);
            if sq.len() < 2 {
                sq.resize(2, BigInt::zero());
            }
            sq[1] += 1;
            Coeffs::Big(sq)
        }
    }
}

fn add_t_small(sq: &mut Vec<i64>) {
    if sq.len() < 2 {
        sq.resize(2, 0);
    }
    sq[1] += 1;
}

fn square_small(c: &[i64]) -> Option<Vec<i64>> {
    let mut out = vec![0i128; 2 * c.len() - 1];
    for (i, &a) in c.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in c.iter().enumerate() {
            let prod = (a as i128).checked_mul(b as i128)?;
            out[i + j] = out[i + j].checked_add(prod)?;
        }
    }
    // Leave headroom for the `+ t` step and the negation.
    out.into_iter()
        .map(|v| i64::try_from(v).ok().filter(|v| v.unsigned_abs() < (1u64 << 62)))
        .collect()
}

/// Square of a signed polynomial by one Kronecker-substituted squaring.
///
/// The coefficients are packed into `V = Σ c_i 2^(s i)` with slots wide
/// enough that every coefficient `d_k` of the square satisfies
/// `|d_k| < 2^(s-1)`; the slots of `V²` are then read back with borrows.
fn square_big(c: &[BigInt]) -> Vec<BigInt> {
    let part = |sign: Sign| -> Vec<BigUint> {
        c.iter()
            .map(|v| if v.sign() == sign { v.magnitude().clone() } else { BigUint::zero() })
            .collect()
    };
    let max_bits = c.iter().map(|v| v.bits()).max().unwrap_or(0);
    let len_bits = 64 - (c.len() as u64).leading_zeros() as u64;
    let slot_bits = 2 * max_bits + len_bits + 2;
    let slot_digits = slot_bits.div_ceil(32) as usize;

    let v = BigInt::from(pack(&part(Sign::Plus), slot_digits)) - BigInt::from(pack(&part(Sign::Minus), slot_digits));
    let square = v.magnitude() * v.magnitude();
    let out_len = 2 * c.len() - 1;
    let slot = BigInt::one() << (32 * slot_digits);
    let half = BigInt::one() << (32 * slot_digits - 1);
    let mut borrow = false;
    unpack(&square, slot_digits, out_len)
        .into_iter()
        .map(|raw| {
            let mut d = BigInt::from(raw);
            if borrow {
                d += 1;
            }
            borrow = d >= half;
            if borrow {
                d -= &slot;
            }
            d
        })
        .collect()
}

fn pack(coeffs: &[BigUint], slot_digits: usize) -> BigUint {
    let mut digits = vec![0u32; coeffs.len() * slot_digits];
    for (i, c) in coeffs.iter().enumerate() {
        for (j, d) in c.to_u32_digits().into_iter().enumerate() {
            digits[i * slot_digits + j] = d;
        }
    }
    BigUint::new(digits)
}

fn unpack(value: &BigUint, slot_digits: usize, len: usize) -> Vec<BigUint> {
    let digits = value.to_u32_digits();
    (0..len)
        .map(|i| {
            let start = (i * slot_digits).min(digits.len());
            let end = ((i + 1) * slot_digits).min(digits.len());
            BigUint::from_slice(&digits[start..end])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{critical_poly_eval, QuadParam};

    /// Schoolbook reference for the big squaring.
    fn naive_next(p: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); (2 * p.len() - 1).max(2)];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in p.iter().enumerate() {
                out[i + j] -= a * b;
            }
        }
        out[1] += 1;
        out
    }

    #[test]
    fn first_polynomials() {
        assert_eq!(critical_poly(0).unwrap().as_i64(), Some(&[0i64][..]));
        assert_eq!(critical_poly(1).unwrap().as_i64(), Some(&[0i64, 1][..]));
        assert_eq!(critical_poly(2).unwrap().as_i64(), Some(&[0i64, 1, -1][..]));
        assert_eq!(critical_poly(3).unwrap().as_i64(), Some(&[0i64, 1, -1, 2, -1][..]));
        assert_eq!(
            critical_poly(4).unwrap().as_i64(),
            Some(&[0i64, 1, -1, 2, -5, 6, -6, 4, -1][..])
        );
    }

    #[test]
    fn order_limit() {
        assert!(matches!(critical_poly(17), Err(Error::TooLarge { requested: 17, max: 16, .. })));
        assert!(critical_poly_with_max(3, 2).is_err());
    }

    #[test]
    fn promotion_matches_schoolbook() {
        let mut reference = vec![BigInt::zero()];
        for n in 1..=11 {
            reference = naive_next(&reference);
            let p = critical_poly(n).unwrap();
            assert_eq!(p.coeffs_big(), reference, "order {n}");
            assert_eq!(p.degree(), 1 << (n - 1));
            assert_eq!(p.len(), (1 << (n - 1)) + 1);
            assert!(p.coeff(0).is_zero());
        }
        assert!(critical_poly(7).unwrap().is_small());
        assert!(!critical_poly(8).unwrap().is_small());
    }

    #[test]
    fn anchor_values_exact() {
        for n in 1..=12 {
            let p = critical_poly(n).unwrap();
            assert_eq!(p.eval_exact(0.0), 0.0);
            assert_eq!(p.eval_exact(2.0), if n == 1 { 2.0 } else { -2.0 });
            assert_eq!(p.eval_exact(1.0), if n % 2 == 1 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn exact_evaluation_matches_value_recursion() {
        let ts = [0.125, 0.3, 0.77, 1.0 / 3.0, 1.31, 1.5436890126920764, 1.7, 1.99];
        for n in 0..=10 {
            let p = critical_poly(n).unwrap();
            for &t in &ts {
                let v = critical_poly_eval(n, QuadParam::new(t).unwrap());
                let e = p.eval_exact(t);
                assert!((e - v).abs() <= 1e-9 * v.abs().max(1.0), "n={n} t={t}: {e} vs {v}");
            }
        }
    }

    #[test]
    fn f64_horner_fine_for_small_orders() {
        let p = critical_poly(4).unwrap();
        let t = 1.25;
        assert!((p.eval_f64(t) - critical_poly_eval(4, QuadParam::new(t).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn scaled_conversion() {
        assert_eq!(scaled_to_f64(&BigInt::from(3), 1), 1.5);
        assert_eq!(scaled_to_f64(&BigInt::from(-5), 0), -5.0);
        let big = BigInt::from(1) << 3000usize;
        assert_eq!(scaled_to_f64(&big, 3000), 1.0);
        assert_eq!(decompose(0.375), (BigInt::from(3), -3));
    }
}
