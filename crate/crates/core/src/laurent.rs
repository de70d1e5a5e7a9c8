//! Laurent polynomials in one variable `q` with integer coefficients.
//!
//! This is the coefficient ring `A = Z[q, q^-1]` of the Hecke algebra. The
//! grading group is `Z`, so exponents are plain integers. Polynomials are
//! stored sparsely as `(exponent, coefficient)` pairs in increasing exponent
//! order with no zero coefficients, which makes equality structural.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use thiserror::Error;

pub type Exponent = i32;
pub type Coeff = i64;

#[inline]
pub(crate) fn cadd(a: Coeff, b: Coeff) -> Coeff {
    a.checked_add(b).expect("coefficient overflow")
}

#[inline]
pub(crate) fn cmul(a: Coeff, b: Coeff) -> Coeff {
    a.checked_mul(b).expect("coefficient overflow")
}

/// Degree of a Laurent polynomial. The zero polynomial has degree `NegInf`,
/// which compares below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(Exponent),
}

impl Degree {
    pub fn finite(self) -> Option<Exponent> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: Vec<(Exponent, Coeff)>,
}

/// The three pieces of a polynomial by sign of exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub negative: LaurentPoly,
    pub constant: Coeff,
    pub positive: LaurentPoly,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^e`.
    pub fn monomial(c: Coeff, e: Exponent) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Self {
                terms: vec![(e, c)],
            }
        }
    }

    /// `q^e`.
    pub fn q_pow(e: Exponent) -> Self {
        Self::monomial(1, e)
    }

    /// `xi_g = q^g - q^-g`.
    pub fn xi(g: Exponent) -> Self {
        Self::q_pow(g) - Self::q_pow(-g)
    }

    /// `eta_g = q^g + q^-g`.
    pub fn eta(g: Exponent) -> Self {
        Self::q_pow(g) + Self::q_pow(-g)
    }

    /// Builds a polynomial from arbitrary terms, combining repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, Coeff)>>(terms: I) -> Self {
        let mut v: Vec<(Exponent, Coeff)> = terms.into_iter().collect();
        v.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Exponent, Coeff)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = cadd(last.1, c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Self { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (0, 1)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> &[(Exponent, Coeff)] {
        &self.terms
    }

    pub fn coeff(&self, e: Exponent) -> Coeff {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .last()
            .map_or(Degree::NegInf, |t| Degree::Finite(t.0))
    }

    /// Lowest exponent, `None` for zero.
    pub fn low_degree(&self) -> Option<Exponent> {
        self.terms.first().map(|t| t.0)
    }

    /// Coefficient of the highest power, 0 for the zero polynomial.
    pub fn leading_coeff(&self) -> Coeff {
        self.terms.last().map_or(0, |t| t.1)
    }

    /// The ring involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().rev().map(|&(e, c)| (-e, c)).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.bar() == *self
    }

    pub fn split(&self) -> Split {
        Split {
            negative: self.negative_part(),
            constant: self.coeff(0),
            positive: self.positive_part(),
        }
    }

    /// Terms with exponent < 0.
    pub fn negative_part(&self) -> Self {
        Self {
            terms: self.terms.iter().copied().filter(|t| t.0 < 0).collect(),
        }
    }

    /// Terms with exponent > 0.
    pub fn positive_part(&self) -> Self {
        Self {
            terms: self.terms.iter().copied().filter(|t| t.0 > 0).collect(),
        }
    }

    /// True when every exponent is negative (this includes zero), i.e. the
    /// polynomial lies in `Z[q^-1] q^-1`.
    pub fn in_negative_part(&self) -> bool {
        self.terms.last().is_none_or(|t| t.0 < 0)
    }

    /// Multiplication by `q^e`.
    pub fn shift(&self, e: Exponent) -> Self {
        Self {
            terms: self.terms.iter().map(|&(x, c)| (x + e, c)).collect(),
        }
    }

    pub fn scale(&self, k: Coeff) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|&(e, c)| (e, cmul(c, k))).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `self += a * b` without materialising the product separately.
    pub fn add_product(&mut self, a: &LaurentPoly, b: &LaurentPoly) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if a.is_one() {
            *self += b;
            return;
        }
        if b.is_one() {
            *self += a;
            return;
        }
        let mut v = Vec::with_capacity(self.terms.len() + a.terms.len() * b.terms.len());
        v.extend_from_slice(&self.terms);
        for &(ea, ca) in &a.terms {
            for &(eb, cb) in &b.terms {
                v.push((ea + eb, cmul(ca, cb)));
            }
        }
        *self = Self::from_terms(v);
    }

    fn merge(&self, other: &LaurentPoly, sign: Coeff) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (ea, ca) = a[i];
            let (eb, cb) = b[j];
            if ea < eb {
                out.push((ea, ca));
                i += 1;
            } else if eb < ea {
                out.push((eb, cmul(sign, cb)));
                j += 1;
            } else {
                let c = cadd(ca, cmul(sign, cb));
                if c != 0 {
                    out.push((ea, c));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(e, c)| (e, cmul(sign, c))));
        Self { terms: out }
    }
}

impl From<Coeff> for LaurentPoly {
    fn from(c: Coeff) -> Self {
        Self::constant(c)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.merge(rhs, 1)
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.merge(rhs, -1)
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        if self.is_zero() {
            self.terms.clone_from(&rhs.terms);
        } else if !rhs.is_zero() {
            *self = self.merge(rhs, 1);
        }
    }
}

impl AddAssign<LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        if self.is_zero() {
            *self = rhs;
        } else {
            *self += &rhs;
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        if !rhs.is_zero() {
            *self = self.merge(rhs, -1);
        }
    }
}

impl SubAssign<LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: LaurentPoly) {
        *self -= &rhs;
    }
}

impl fmt::Display for LaurentPoly {
    /// Renders terms by decreasing exponent, e.g. `q^3 - q^-1 + 2` or
    /// `-2*q^2 + q^-4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, &(e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else if c < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            match (e, mag) {
                (0, m) => write!(f, "{m}")?,
                (e, 1) => write!(f, "q^{e}")?,
                (e, m) => write!(f, "{m}*q^{e}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse Laurent polynomial {input:?}: {reason}")]
pub struct ParsePolyError {
    pub input: String,
    pub reason: String,
}

impl FromStr for LaurentPoly {
    type Err = ParsePolyError;

    /// Accepts the rendered form: a signed sum of terms `n`, `q^e`, `q`,
    /// `n*q^e`, `n*q`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParsePolyError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let mut prev: Option<char> = None;
        let mut gap = false;
        for ch in s.chars() {
            if ch.is_whitespace() {
                gap = true;
                continue;
            }
            if gap && ch.is_ascii_alphanumeric() && prev.is_some_and(|p| p.is_ascii_alphanumeric())
            {
                return Err(err("missing operator between terms"));
            }
            prev = Some(ch);
            gap = false;
        }
        let src: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(err("empty input"));
        }
        let mut pos = 0;
        let mut terms = Vec::new();
        let read_int = |pos: &mut usize| -> Option<i64> {
            let start = *pos;
            while *pos < src.len() && src[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return None;
            }
            src[start..*pos].iter().collect::<String>().parse().ok()
        };
        let mut first = true;
        while pos < src.len() {
            let mut sign = 1;
            match src[pos] {
                '+' => {
                    pos += 1;
                }
                '-' => {
                    sign = -1;
                    pos += 1;
                }
                _ if !first => return Err(err("expected '+' or '-' between terms")),
                _ => {}
            }
            first = false;
            let coeff = read_int(&mut pos);
            let has_q = if coeff.is_some() {
                if pos < src.len() && src[pos] == '*' {
                    pos += 1;
                    if pos >= src.len() || src[pos] != 'q' {
                        return Err(err("expected 'q' after '*'"));
                    }
                    true
                } else {
                    false
                }
            } else {
                if pos >= src.len() || src[pos] != 'q' {
                    return Err(err("expected a term"));
                }
                true
            };
            let mut exp: i64 = 0;
            if has_q {
                pos += 1;
                exp = 1;
                if pos < src.len() && src[pos] == '^' {
                    pos += 1;
                    let mut esign = 1;
                    if pos < src.len() && (src[pos] == '-' || src[pos] == '+') {
                        if src[pos] == '-' {
                            esign = -1;
                        }
                        pos += 1;
                    }
                    exp = esign * read_int(&mut pos).ok_or_else(|| err("missing exponent"))?;
                }
            }
            let c = coeff.unwrap_or(1);
            let e = Exponent::try_from(exp).map_err(|_| err("exponent out of range"))?;
            terms.push((e, sign * c));
        }
        Ok(Self::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn display_examples() {
        assert_eq!(LaurentPoly::xi(1).to_string(), "q^1 - q^-1");
        assert_eq!(p("2 + q^3 - q^-1").to_string(), "q^3 + 2 - q^-1");
        assert_eq!(p("-2*q^2 + q^-4").to_string(), "-2*q^2 + q^-4");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(p("-1").to_string(), "-1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<LaurentPoly>().is_err());
        assert!("q^".parse::<LaurentPoly>().is_err());
        assert!("2 3".parse::<LaurentPoly>().is_err());
        assert!("x".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn xi_eta_products() {
        // xi_g^2 = eta_2g - 2, xi_g * eta_g = xi_2g
        let (x, e) = (LaurentPoly::xi(3), LaurentPoly::eta(3));
        assert_eq!(&x * &x, LaurentPoly::eta(6) - LaurentPoly::constant(2));
        assert_eq!(&x * &e, LaurentPoly::xi(6));
        assert_eq!(LaurentPoly::xi(0), LaurentPoly::zero());
    }

    #[test]
    fn degree_and_split() {
        let f = p("3*q^2 - 1 + q^-5");
        assert_eq!(f.degree(), Degree::Finite(2));
        assert_eq!(LaurentPoly::zero().degree(), Degree::NegInf);
        assert!(Degree::NegInf < Degree::Finite(-1000));
        let s = f.split();
        assert_eq!(s.negative, p("q^-5"));
        assert_eq!(s.constant, -1);
        assert_eq!(s.positive, p("3*q^2"));
        assert!(p("q^-1 - 4*q^-3").in_negative_part());
        assert!(!p("q^-1 + 1").in_negative_part());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i32..=6, -5i64..=5), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a - &a, LaurentPoly::zero());
        }

        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        }

        #[test]
        fn degree_is_additive(a in arb_poly(), b in arb_poly()) {
            let d = (&a * &b).degree();
            match (a.degree(), b.degree()) {
                (Degree::Finite(x), Degree::Finite(y)) => prop_assert_eq!(d, Degree::Finite(x + y)),
                _ => prop_assert_eq!(d, Degree::NegInf),
            }
        }

        #[test]
        fn split_recombines(a in arb_poly()) {
            let s = a.split();
            prop_assert_eq!(&(&s.negative + &LaurentPoly::constant(s.constant)) + &s.positive, a);
        }

        #[test]
        fn display_parse_roundtrip(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a);
        }

        #[test]
        fn add_product_matches_mul(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let mut acc = c.clone();
            acc.add_product(&a, &b);
            prop_assert_eq!(acc, &c + &(&a * &b));
        }
    }
}
