//! Arithmetic in `F_b[x]` for a prime base `b`, plus the Laurent digit
//! expansion `v_m(q/p)` that turns rational functions into `[0,1)` fractions.
//!
//! Polynomials are coefficient vectors over `{0,..,b-1}`; a polynomial is
//! also identified with the integer `c_0 + c_1 b + c_2 b^2 + ...`, which is
//! the encoding used in config files and JSON artifacts. For `b = 2` the
//! multiply-reduce path works on machine words with carry-less products.

use std::fmt;

use crate::error::{HodnError, Result};

/// A polynomial over the prime field `F_b`.
///
/// `coeffs[i]` is the coefficient of `x^i`; the leading coefficient is
/// nonzero unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GFPoly {
    base: u32,
    coeffs: Vec<u8>,
}

impl GFPoly {
    pub fn new(base: u32, mut coeffs: Vec<u8>) -> Result<Self> {
        if base < 2 || !is_prime_u64(base as u64) {
            return Err(HodnError::InvalidParameter(format!(
                "base {base} is not prime"
            )));
        }
        if coeffs.iter().any(|&c| c as u32 >= base) {
            return Err(HodnError::InvalidPoly(format!(
                "coefficient out of range for base {base}"
            )));
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(GFPoly { base, coeffs })
    }

    pub fn zero(base: u32) -> Self {
        GFPoly {
            base,
            coeffs: Vec::new(),
        }
    }

    pub fn one(base: u32) -> Self {
        GFPoly {
            base,
            coeffs: vec![1],
        }
    }

    /// The monomial `x`.
    pub fn x(base: u32) -> Self {
        GFPoly {
            base,
            coeffs: vec![0, 1],
        }
    }

    /// Decode `c_0 + c_1 b + c_2 b^2 + ...` from its integer encoding.
    pub fn from_int(base: u32, mut n: u64) -> Self {
        let mut coeffs = Vec::new();
        while n > 0 {
            coeffs.push((n % base as u64) as u8);
            n /= base as u64;
        }
        GFPoly { base, coeffs }
    }

    /// Integer encoding of the coefficient sequence.
    pub fn to_int(&self) -> u64 {
        let mut n = 0u64;
        for &c in self.coeffs.iter().rev() {
            n = n * self.base as u64 + c as u64;
        }
        n
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn check_base(&self, other: &GFPoly) -> Result<()> {
        if self.base != other.base {
            return Err(HodnError::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    pub fn add(&self, other: &GFPoly) -> Result<GFPoly> {
        self.check_base(other)?;
        let b = self.base as u16;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(((self.coeff(i) as u16 + other.coeff(i) as u16) % b) as u8);
        }
        GFPoly::new(self.base, out)
    }

    pub fn sub(&self, other: &GFPoly) -> Result<GFPoly> {
        self.check_base(other)?;
        let b = self.base as u16;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(((b + self.coeff(i) as u16 - other.coeff(i) as u16) % b) as u8);
        }
        GFPoly::new(self.base, out)
    }

    pub fn mul(&self, other: &GFPoly) -> Result<GFPoly> {
        self.check_base(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(GFPoly::zero(self.base));
        }
        if self.base == 2 && self.coeffs.len() + other.coeffs.len() <= 64 {
            return Ok(GFPoly::from_bits(clmul(self.to_bits(), other.to_bits())));
        }
        let b = self.base as u32;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &c) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u32 * c as u32) % b;
            }
        }
        GFPoly::new(self.base, out.into_iter().map(|c| c as u8).collect())
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn divrem(&self, divisor: &GFPoly) -> Result<(GFPoly, GFPoly)> {
        self.check_base(divisor)?;
        if divisor.is_zero() {
            return Err(HodnError::ZeroModulus);
        }
        let d = divisor.degree().unwrap();
        let b = self.base as u64;
        let lc_inv = mod_inverse(divisor.coeffs[d] as u64, b);
        let mut rem: Vec<u8> = self.coeffs.clone();
        let mut quot = vec![0u8; self.coeffs.len().saturating_sub(d)];
        while rem.len() > d {
            let k = rem.len() - 1;
            let factor = (rem[k] as u64 * lc_inv) % b;
            if factor != 0 {
                quot[k - d] = factor as u8;
                for (i, &dc) in divisor.coeffs.iter().enumerate() {
                    let idx = k - d + i;
                    let v = (rem[idx] as u64 + b * b - factor * dc as u64 % b) % b;
                    rem[idx] = v as u8;
                }
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
            if rem.len() <= d {
                break;
            }
        }
        Ok((GFPoly::new(self.base, quot)?, GFPoly::new(self.base, rem)?))
    }

    pub fn rem(&self, modulus: &GFPoly) -> Result<GFPoly> {
        Ok(self.divrem(modulus)?.1)
    }

    pub fn gcd(&self, other: &GFPoly) -> Result<GFPoly> {
        self.check_base(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    fn to_bits(&self) -> u64 {
        debug_assert_eq!(self.base, 2);
        let mut bits = 0u64;
        for (i, &c) in self.coeffs.iter().enumerate() {
            bits |= (c as u64) << i;
        }
        bits
    }

    fn from_bits(bits: u64) -> GFPoly {
        let mut coeffs = Vec::new();
        let mut b = bits;
        while b != 0 {
            coeffs.push((b & 1) as u8);
            b >>= 1;
        }
        GFPoly { base: 2, coeffs }
    }

    /// Parse either the integer encoding ("7") or the human form
    /// ("x^2+x+1", coefficients like "2x^3" allowed).
    pub fn parse(base: u32, text: &str) -> Result<GFPoly> {
        let t = text.trim();
        if t.is_empty() {
            return Err(HodnError::InvalidPoly("empty polynomial text".into()));
        }
        if t.chars().all(|c| c.is_ascii_digit()) {
            return Ok(GFPoly::from_int(base, t.parse::<u64>().map_err(|_| {
                HodnError::InvalidPoly(format!("bad integer encoding {t:?}"))
            })?));
        }
        let mut acc = GFPoly::zero(base);
        for term in t.split('+') {
            let term = term.trim().replace('*', "");
            if term.is_empty() {
                return Err(HodnError::InvalidPoly(format!("empty term in {t:?}")));
            }
            let (coef_str, pow) = match term.find('x') {
                None => (term.as_str(), 0usize),
                Some(xi) => {
                    let after = &term[xi + 1..];
                    let pow = if after.is_empty() {
                        1
                    } else if let Some(p) = after.strip_prefix('^') {
                        p.parse::<usize>().map_err(|_| {
                            HodnError::InvalidPoly(format!("bad exponent in {term:?}"))
                        })?
                    } else {
                        return Err(HodnError::InvalidPoly(format!("bad term {term:?}")));
                    };
                    (&term[..xi], pow)
                }
            };
            let coef: u64 = if coef_str.is_empty() {
                1
            } else {
                coef_str.parse().map_err(|_| {
                    HodnError::InvalidPoly(format!("bad coefficient in {term:?}"))
                })?
            };
            let mut coeffs = vec![0u8; pow + 1];
            coeffs[pow] = (coef % base as u64) as u8;
            acc = acc.add(&GFPoly::new(base, coeffs)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GFPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_int())
    }
}

/// `(a * b) mod p` with degree < deg(p).
pub fn poly_mulmod(a: &GFPoly, b: &GFPoly, p: &GFPoly) -> Result<GFPoly> {
    if p.is_zero() {
        return Err(HodnError::ZeroModulus);
    }
    a.mul(b)?.rem(p)
}

/// `base^exp mod p` by square and multiply.
pub fn poly_powmod(g: &GFPoly, mut exp: u64, p: &GFPoly) -> Result<GFPoly> {
    let mut result = GFPoly::one(g.base());
    let mut base = g.rem(p)?;
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mulmod(&result, &base, p)?;
        }
        base = poly_mulmod(&base, &base, p)?;
        exp >>= 1;
    }
    Ok(result)
}

fn clmul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    let mut a = a;
    let mut shift = 0;
    while a != 0 {
        if a & 1 == 1 {
            out ^= b << shift;
        }
        a >>= 1;
        shift += 1;
    }
    out
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // Fermat: a^(m-2) mod m for prime m.
    let mut result = 1u64;
    let mut base = a % m;
    let mut exp = m - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic irreducibility test over `F_b`: `x^(b^m) == x mod p` and
/// `gcd(x^(b^(m/l)) - x, p) = 1` at every maximal proper divisor `m/l`.
pub fn is_irreducible(p: &GFPoly) -> Result<bool> {
    let m = match p.degree() {
        None | Some(0) => {
            return Err(HodnError::InvalidPoly(
                "irreducibility needs degree >= 1".into(),
            ))
        }
        Some(m) => m,
    };
    if m == 1 {
        return Ok(true);
    }
    let b = p.base() as u64;
    let x = GFPoly::x(p.base());
    // Frobenius powers x^(b^k) mod p, built incrementally.
    let mut frob = x.rem(p)?;
    let mut frob_at = vec![x.rem(p)?]; // frob_at[k] = x^(b^k) mod p
    for _ in 0..m {
        frob = poly_powmod(&frob, b, p)?;
        frob_at.push(frob.clone());
    }
    if frob_at[m] != x.rem(p)? {
        return Ok(false);
    }
    for l in prime_factors(m as u64) {
        let k = m / l as usize;
        let diff = frob_at[k].sub(&x.rem(p)?)?;
        let g = p.gcd(&diff)?;
        if g.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The monic irreducible of degree `m` with the smallest integer encoding.
pub fn smallest_irreducible(b: u32, m: u32) -> GFPoly {
    let bm = (b as u64).pow(m);
    // Monic degree-m polynomials are bm..2*bm-1 in encoding order for b=2;
    // in general, encodings with leading coefficient 1 at position m.
    for low in 0..bm {
        let candidate = GFPoly::from_int(b, bm + low);
        if !candidate.is_monic() {
            continue;
        }
        if is_irreducible(&candidate).unwrap_or(false) {
            return candidate;
        }
    }
    unreachable!("irreducibles of every degree exist over F_b")
}

/// Smallest (by integer encoding) primitive element modulo an irreducible `p`.
///
/// Returns `g` whose powers enumerate all of `R_{b,m}`, the nonzero
/// polynomials of degree < m.
pub fn primitive_element(p: &GFPoly) -> Result<GFPoly> {
    if !is_irreducible(p)? {
        return Err(HodnError::ReducibleModulus(p.to_string()));
    }
    let m = p.degree().unwrap() as u32;
    let order = (p.base() as u64).pow(m) - 1;
    if order == 1 {
        return Ok(GFPoly::one(p.base()));
    }
    let factors = prime_factors(order);
    for enc in 2..=order {
        let g = GFPoly::from_int(p.base(), enc);
        let mut primitive = true;
        for &l in &factors {
            if poly_powmod(&g, order / l, p)? == GFPoly::one(p.base()) {
                primitive = false;
                break;
            }
        }
        if primitive {
            return Ok(g);
        }
    }
    Err(HodnError::ReducibleModulus(p.to_string()))
}

/// First `m` Laurent digits `(t_1,..,t_m)` of `q(x)/p(x)` at `x^-1,..,x^-m`.
///
/// `q` is reduced mod `p` first, which does not change these digits when
/// combined with the truncation `v_m` (digits at non-negative powers are
/// dropped by `v_m` anyway for deg(q) >= deg(p)).
pub fn laurent_digits(q: &GFPoly, p: &GFPoly, m: u32) -> Result<Vec<u8>> {
    if p.is_zero() {
        return Err(HodnError::ZeroModulus);
    }
    let deg_p = p.degree().unwrap();
    let b = p.base() as u64;
    let lc_inv = mod_inverse(p.coeffs()[deg_p] as u64, b);
    let mut r = q.rem(p)?;
    let mut digits = Vec::with_capacity(m as usize);
    for _ in 0..m {
        // r := x * r; t = coeff of x^deg_p, then subtract t*p.
        let mut coeffs = vec![0u8];
        coeffs.extend_from_slice(r.coeffs());
        let shifted = GFPoly::new(p.base(), coeffs)?;
        let top = shifted.coeff(deg_p) as u64;
        let t = top * lc_inv % b;
        let tp = if t == 0 {
            GFPoly::zero(p.base())
        } else {
            let mut c = vec![(t as u8).min(u8::MAX); 1];
            c[0] = t as u8;
            GFPoly::new(p.base(), c)?.mul(p)?
        };
        r = shifted.sub(&tp)?;
        digits.push(t as u8);
    }
    Ok(digits)
}

/// `v_m(q/p)` as an m-digit fixed-point integer: `sum t_l b^(m-l)`.
pub fn laurent_fixed_point(q: &GFPoly, p: &GFPoly, m: u32) -> Result<u64> {
    let digits = laurent_digits(q, p, m)?;
    let b = p.base() as u64;
    Ok(digits.iter().fold(0u64, |acc, &t| acc * b + t as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(n: u64) -> GFPoly {
        GFPoly::from_int(2, n)
    }

    #[test]
    fn add_characteristic_two_self_cancels() {
        let a = p2(3); // x+1
        assert!(a.add(&a).unwrap().is_zero());
        let b = p2(5).add(&p2(2)).unwrap(); // x^2+1 + x
        assert_eq!(b.to_int(), 7);
    }

    #[test]
    fn add_base_three_wraps() {
        let a = GFPoly::from_int(3, 7); // 2x+1
        let b = GFPoly::from_int(3, 5); // x+2
        assert!(a.add(&b).unwrap().is_zero());
    }

    #[test]
    fn add_base_mismatch_is_error() {
        let a = p2(3);
        let b = GFPoly::from_int(3, 4);
        assert!(matches!(a.add(&b), Err(HodnError::BaseMismatch(2, 3))));
    }

    #[test]
    fn mulmod_examples() {
        let p = p2(7); // x^2+x+1
        let x = p2(2);
        assert_eq!(poly_mulmod(&x, &x, &p).unwrap().to_int(), 3); // x^2 = x+1
        let q = p2(5);
        assert_eq!(poly_mulmod(&GFPoly::one(2), &q, &p).unwrap(), q.rem(&p).unwrap());
        // x*(x+1) mod (x^2+x+1) = x^2+x = 1
        assert_eq!(poly_mulmod(&x, &p2(3), &p).unwrap().to_int(), 1);
    }

    #[test]
    fn mulmod_zero_modulus() {
        assert!(matches!(
            poly_mulmod(&p2(2), &p2(3), &GFPoly::zero(2)),
            Err(HodnError::ZeroModulus)
        ));
    }

    #[test]
    fn irreducibility_small_cases() {
        assert!(is_irreducible(&p2(7)).unwrap()); // x^2+x+1
        assert!(!is_irreducible(&p2(5)).unwrap()); // x^2+1 = (x+1)^2
        assert!(is_irreducible(&p2(11)).unwrap()); // x^3+x+1
        assert!(is_irreducible(&GFPoly::from_int(2, 2)).unwrap()); // x
        assert!(is_irreducible(&p2(19)).unwrap()); // x^4+x+1
        assert!(!is_irreducible(&p2(21)).unwrap()); // x^4+x^2+1
        assert!(matches!(
            is_irreducible(&GFPoly::one(2)),
            Err(HodnError::InvalidPoly(_))
        ));
    }

    /// Trial-division oracle: divide by every lower-degree polynomial.
    fn irreducible_by_trial_division(p: &GFPoly) -> bool {
        let deg = p.degree().unwrap();
        let b = p.base() as u64;
        for enc in b..(b as u64).pow(deg as u32) {
            let d = GFPoly::from_int(p.base(), enc);
            if d.degree().map_or(true, |dd| dd == 0) {
                continue;
            }
            if p.rem(&d).unwrap().is_zero() {
                return false;
            }
        }
        true
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for b in [2u32, 3] {
            for enc in (b as u64).pow(2)..(b as u64).pow(4) {
                let p = GFPoly::from_int(b, enc);
                assert_eq!(
                    is_irreducible(&p).unwrap(),
                    irreducible_by_trial_division(&p),
                    "b={b} enc={enc}"
                );
            }
        }
    }

    #[test]
    fn smallest_irreducible_examples() {
        assert_eq!(smallest_irreducible(2, 2).to_int(), 7);
        assert_eq!(smallest_irreducible(2, 3).to_int(), 11);
        assert_eq!(smallest_irreducible(2, 1).to_int(), 2); // x
        let p = smallest_irreducible(3, 2);
        assert!(p.is_monic() && is_irreducible(&p).unwrap());
    }

    #[test]
    fn primitive_element_examples() {
        assert_eq!(primitive_element(&p2(7)).unwrap().to_int(), 2); // x mod x^2+x+1
        assert_eq!(primitive_element(&p2(11)).unwrap().to_int(), 2);
        assert_eq!(primitive_element(&p2(2)).unwrap().to_int(), 1); // m=1
        assert!(primitive_element(&p2(5)).is_err()); // reducible
    }

    #[test]
    fn primitive_element_generates_all_nonzero() {
        for m in 2..=10u32 {
            let p = smallest_irreducible(2, m);
            let g = primitive_element(&p).unwrap();
            let order = 2u64.pow(m) - 1;
            let mut seen = std::collections::HashSet::new();
            let mut acc = GFPoly::one(2);
            for _ in 0..order {
                seen.insert(acc.to_int());
                acc = poly_mulmod(&acc, &g, &p).unwrap();
            }
            assert_eq!(seen.len() as u64, order, "m={m}");
        }
    }

    #[test]
    fn laurent_digits_examples() {
        assert_eq!(
            laurent_digits(&GFPoly::zero(2), &p2(11), 3).unwrap(),
            vec![0, 0, 0]
        );
        // 1/(x^3+x+1) = x^-3 + x^-5 + ...
        assert_eq!(
            laurent_digits(&GFPoly::one(2), &p2(11), 3).unwrap(),
            vec![0, 0, 1]
        );
        assert_eq!(laurent_fixed_point(&GFPoly::one(2), &p2(11), 3).unwrap(), 1);
        assert_eq!(
            laurent_digits(&GFPoly::one(2), &p2(7), 2).unwrap(),
            vec![0, 1]
        );
        // longer expansion of the same series: x^-3+x^-5+x^-6+x^-7
        assert_eq!(
            laurent_digits(&GFPoly::one(2), &p2(11), 7).unwrap(),
            vec![0, 0, 1, 0, 1, 1, 1]
        );
    }

    #[test]
    fn laurent_reduction_invariance() {
        let p = p2(11);
        for n in 1..40u64 {
            for q in 1..8u64 {
                let prod = p2(n).mul(&p2(q)).unwrap();
                let reduced = prod.rem(&p).unwrap();
                assert_eq!(
                    laurent_digits(&prod, &p, 3).unwrap(),
                    laurent_digits(&reduced, &p, 3).unwrap()
                );
            }
        }
    }

    #[test]
    fn parse_both_forms() {
        assert_eq!(GFPoly::parse(2, "7").unwrap().to_int(), 7);
        assert_eq!(GFPoly::parse(2, "x^2+x+1").unwrap().to_int(), 7);
        assert_eq!(GFPoly::parse(3, "2x^2+1").unwrap().to_int(), 19);
        assert_eq!(GFPoly::parse(2, "x").unwrap().to_int(), 2);
        assert!(GFPoly::parse(2, "x^").is_err());
    }

    #[test]
    fn divrem_base_three() {
        let a = GFPoly::from_int(3, 200);
        let b = GFPoly::from_int(3, 17);
        let (q, r) = a.divrem(&b).unwrap();
        let back = q.mul(&b).unwrap().add(&r).unwrap();
        assert_eq!(back, a);
    }
}
