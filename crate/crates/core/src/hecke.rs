//! The generic Iwahori-Hecke algebra with unequal parameters.
//!
//! Elements are finite `A`-linear combinations of basis elements indexed by
//! group elements of a [`Universe`]. The same sparse container serves the
//! standard basis `T_w` and the Kazhdan-Lusztig basis `C_w`; a marker type
//! keeps the two apart.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{Elem, Gen, GroupError, GroupType, Universe, RANK};
use crate::laurent::{Exponent, LaurentPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weights must be positive, got {0}")]
    NonPositive(String),
    #[error("type C2 weights are normalised so that a >= c, got {0}")]
    Convention(String),
    #[error("type G2 has a single weight for s0 and s1; c must equal b, got {0}")]
    G2Conjugate(String),
    #[error("cannot parse weights {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Positive weights `L(s2) = a`, `L(s1) = b`, `L(s0) = c` for C2 and
/// `L(s2) = a`, `L(s1) = L(s0) = b` for G2 (stored with `c = b`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weights {
    pub ty: GroupType,
    pub a: Exponent,
    pub b: Exponent,
    pub c: Exponent,
}

impl Weights {
    pub fn c2(a: Exponent, b: Exponent, c: Exponent) -> Result<Self, WeightError> {
        let w = Weights {
            ty: GroupType::C2,
            a,
            b,
            c,
        };
        if a <= 0 || b <= 0 || c <= 0 {
            return Err(WeightError::NonPositive(w.to_string()));
        }
        if a < c {
            return Err(WeightError::Convention(w.to_string()));
        }
        Ok(w)
    }

    pub fn g2(a: Exponent, b: Exponent) -> Result<Self, WeightError> {
        let w = Weights {
            ty: GroupType::G2,
            a,
            b,
            c: b,
        };
        if a <= 0 || b <= 0 {
            return Err(WeightError::NonPositive(w.to_string()));
        }
        Ok(w)
    }

    /// Parses `a=5,b=1,c=2` (C2) or `a=2,b=1` (G2).
    pub fn parse(ty: GroupType, text: &str) -> Result<Self, WeightError> {
        let perr = |reason: &str| WeightError::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let mut vals: [Option<Exponent>; 3] = [None; 3];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| perr("expected key=value"))?;
            let slot = match k.trim() {
                "a" => 0,
                "b" => 1,
                "c" => 2,
                other => return Err(perr(&format!("unknown weight {other:?}"))),
            };
            let n: Exponent = v
                .trim()
                .parse()
                .map_err(|_| perr("weight is not an integer"))?;
            if vals[slot].replace(n).is_some() {
                return Err(perr("weight given twice"));
            }
        }
        let a = vals[0].ok_or_else(|| perr("missing a"))?;
        let b = vals[1].ok_or_else(|| perr("missing b"))?;
        match ty {
            GroupType::C2 => Weights::c2(a, b, vals[2].ok_or_else(|| perr("missing c"))?),
            GroupType::G2 => {
                if let Some(c) = vals[2] {
                    if c != b {
                        return Err(WeightError::G2Conjugate(text.to_string()));
                    }
                }
                Weights::g2(a, b)
            }
        }
    }

    /// `L(s)` for a simple reflection.
    pub fn of(&self, s: Gen) -> Exponent {
        match s {
            0 => self.c,
            1 => self.b,
            _ => self.a,
        }
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ty {
            GroupType::C2 => write!(f, "a={},b={},c={}", self.a, self.b, self.c),
            GroupType::G2 => write!(f, "a={},b={}", self.a, self.b),
        }
    }
}

pub trait Basis: Clone + fmt::Debug + Default + PartialEq + Eq {
    const SYMBOL: char;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TBasis;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CBasis;

impl Basis for TBasis {
    const SYMBOL: char = 'T';
}

impl Basis for CBasis {
    const SYMBOL: char = 'C';
}

/// A finite combination `sum_w p_w B_w` in the basis `B`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elt<B: Basis> {
    terms: BTreeMap<Elem, LaurentPoly>,
    _basis: PhantomData<B>,
}

/// An element written in the standard basis.
pub type HeckeElt = Elt<TBasis>;
/// An element written in the Kazhdan-Lusztig basis.
pub type CElt = Elt<CBasis>;

impl<B: Basis> Elt<B> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            _basis: PhantomData,
        }
    }

    pub fn basis(w: Elem) -> Self {
        Self::monomial(w, LaurentPoly::one())
    }

    pub fn monomial(w: Elem, p: LaurentPoly) -> Self {
        let mut out = Self::zero();
        out.add_term(w, &p);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (Elem, LaurentPoly)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (w, p) in terms {
            out.add_term(w, &p);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Elem) -> LaurentPoly {
        self.terms.get(&w).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, w: Elem) -> Option<&LaurentPoly> {
        self.terms.get(&w)
    }

    /// Terms in increasing ShortLex order of the index.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (Elem, &LaurentPoly)> {
        self.terms.iter().map(|(&w, p)| (w, p))
    }

    pub fn support(&self) -> impl DoubleEndedIterator<Item = Elem> + '_ {
        self.terms.keys().copied()
    }

    /// The longest element of the support in ShortLex order.
    pub fn top(&self) -> Option<(Elem, &LaurentPoly)> {
        self.terms.iter().next_back().map(|(&w, p)| (w, p))
    }

    pub fn add_term(&mut self, w: Elem, p: &LaurentPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(p.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += p;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += coef * (p B_w)`.
    pub fn add_term_product(&mut self, w: Elem, coef: &LaurentPoly, p: &LaurentPoly) {
        if coef.is_zero() || p.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(coef * p);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_product(coef, p);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += coef * other`.
    pub fn add_scaled(&mut self, other: &Self, coef: &LaurentPoly) {
        for (&w, p) in &other.terms {
            self.add_term_product(w, coef, p);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (&w, p) in &other.terms {
            self.add_term(w, p);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.add_scaled(other, &LaurentPoly::constant(-1));
    }

    pub fn scaled(&self, coef: &LaurentPoly) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, coef);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn remove(&mut self, w: Elem) -> Option<LaurentPoly> {
        self.terms.remove(&w)
    }

    pub fn retain<F: FnMut(Elem, &LaurentPoly) -> bool>(&mut self, mut keep: F) {
        self.terms.retain(|&w, p| keep(w, p));
    }

    pub fn filtered<F: FnMut(Elem) -> bool>(&self, mut keep: F) -> Self {
        let mut out = self.clone();
        out.terms.retain(|&w, _| keep(w));
        out
    }

    /// Applies the bar involution to the coefficients only.
    pub fn bar_coefficients(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&w, p)| (w, p.bar())).collect(),
            _basis: PhantomData,
        }
    }

    /// The anti-involution `B_w -> B_{w^-1}` (coefficients untouched).
    pub fn flat(&self, universe: &Universe) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&w, p)| (universe.inverse(w), p.clone()))
                .collect(),
            _basis: PhantomData,
        }
    }

    /// Renders as `(q^1 - q^-1)*T[2102] + T[0]`, longest terms first.
    pub fn render(&self, universe: &Universe) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (&w, p) in self.terms.iter().rev() {
            let basis = format!("{}[{}]", B::SYMBOL, universe.format(w));
            if p.is_one() {
                parts.push(basis);
            } else {
                parts.push(format!("({p})*{basis}"));
            }
        }
        parts.join(" + ")
    }

    /// Parses the output of [`Elt::render`]. Terms may also be written
    /// `-B[w]` and words need not be reduced.
    pub fn parse(universe: &Universe, text: &str) -> Result<Self, HeckeError> {
        let perr = |reason: String| HeckeError::Parse {
            input: text.to_string(),
            reason,
        };
        let src = text.trim();
        if src == "0" {
            return Ok(Self::zero());
        }
        let chars: Vec<char> = src.chars().collect();
        let mut pos = 0;
        let mut out = Self::zero();
        let skip_ws = |pos: &mut usize| {
            while *pos < chars.len() && chars[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            let mut coef = LaurentPoly::one();
            if pos < chars.len() && chars[pos] == '-' {
                coef = LaurentPoly::constant(-1);
                pos += 1;
                skip_ws(&mut pos);
            }
            if pos < chars.len() && chars[pos] == '(' {
                let close = chars[pos..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| perr("unbalanced parenthesis".into()))?
                    + pos;
                let inner: String = chars[pos + 1..close].iter().collect();
                let p: LaurentPoly = inner
                    .parse()
                    .map_err(|e: crate::laurent::ParsePolyError| perr(e.to_string()))?;
                coef = &coef * &p;
                pos = close + 1;
                skip_ws(&mut pos);
                if pos >= chars.len() || chars[pos] != '*' {
                    return Err(perr("expected '*' after coefficient".into()));
                }
                pos += 1;
                skip_ws(&mut pos);
            }
            if pos + 1 >= chars.len() || chars[pos] != B::SYMBOL || chars[pos + 1] != '[' {
                return Err(perr(format!("expected {}[word]", B::SYMBOL)));
            }
            let close = chars[pos..]
                .iter()
                .position(|&c| c == ']')
                .ok_or_else(|| perr("unbalanced bracket".into()))?
                + pos;
            let word: String = chars[pos + 2..close].iter().collect();
            let w = universe.parse(&word)?;
            out.add_term(w, &coef);
            pos = close + 1;
            skip_ws(&mut pos);
            if pos >= chars.len() {
                break;
            }
            if chars[pos] != '+' {
                return Err(perr("expected '+' between terms".into()));
            }
            pos += 1;
        }
        Ok(out)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("cannot parse Hecke element {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("weights are for type {weights} but the universe has type {universe}")]
    TypeMismatch {
        weights: GroupType,
        universe: GroupType,
    },
}

/// Arithmetic in the standard basis over a fixed universe and weights.
pub struct HeckeAlgebra {
    universe: Arc<Universe>,
    weights: Weights,
    xi: [LaurentPoly; RANK],
    bar_cache: Vec<OnceLock<HeckeElt>>,
}

impl fmt::Debug for HeckeAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeckeAlgebra")
            .field("universe", &self.universe)
            .field("weights", &self.weights)
            .finish()
    }
}

impl HeckeAlgebra {
    pub fn new(universe: Arc<Universe>, weights: Weights) -> Result<Self, HeckeError> {
        if universe.group_type() != weights.ty {
            return Err(HeckeError::TypeMismatch {
                weights: weights.ty,
                universe: universe.group_type(),
            });
        }
        let xi = [0, 1, 2].map(|s| LaurentPoly::xi(weights.of(s)));
        let bar_cache = (0..universe.len()).map(|_| OnceLock::new()).collect();
        Ok(Self {
            universe,
            weights,
            xi,
            bar_cache,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn universe_arc(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    /// `xi_{L(s)}`.
    pub fn xi(&self, s: Gen) -> &LaurentPoly {
        &self.xi[s as usize]
    }

    /// `eta_{L(s)}`.
    pub fn eta(&self, s: Gen) -> LaurentPoly {
        LaurentPoly::eta(self.weights.of(s))
    }

    pub fn t(&self, w: Elem) -> HeckeElt {
        HeckeElt::basis(w)
    }

    pub fn one(&self) -> HeckeElt {
        HeckeElt::basis(Elem::IDENTITY)
    }

    /// `C_s = T_s + q^{-L(s)}`.
    pub fn c_gen(&self, s: Gen) -> Result<HeckeElt, HeckeError> {
        let ts = self.gen_elem(s)?;
        Ok(HeckeElt::from_terms([
            (ts, LaurentPoly::one()),
            (Elem::IDENTITY, LaurentPoly::q_pow(-self.weights.of(s))),
        ]))
    }

    pub fn gen_elem(&self, s: Gen) -> Result<Elem, HeckeError> {
        Ok(self.universe.from_word(&[s])?)
    }

    fn out_of_ball(&self, x: Elem, s: Gen, left: bool) -> GroupError {
        let sys = self.universe.system();
        let g = sys.generator(s);
        let m = if left {
            g.compose(self.universe.map(x))
        } else {
            self.universe.map(x).compose(&g)
        };
        GroupError::OutOfBall {
            word: sys.reduced_word(&m).to_string(),
            radius: self.universe.radius(),
        }
    }

    /// `h T_s`.
    pub fn right_mul_gen(&self, h: &HeckeElt, s: Gen) -> Result<HeckeElt, HeckeError> {
        let mut out = HeckeElt::zero();
        for (x, p) in h.iter() {
            let xs = self
                .universe
                .right_gen(x, s)
                .ok_or_else(|| self.out_of_ball(x, s, false))?;
            out.add_term(xs, p);
            if self.universe.right_descents(x).contains(s) {
                out.add_term_product(x, &self.xi[s as usize], p);
            }
        }
        Ok(out)
    }

    /// `T_s h`.
    pub fn left_mul_gen(&self, s: Gen, h: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        let mut out = HeckeElt::zero();
        for (x, p) in h.iter() {
            let sx = self
                .universe
                .left_gen(s, x)
                .ok_or_else(|| self.out_of_ball(x, s, true))?;
            out.add_term(sx, p);
            if self.universe.left_descents(x).contains(s) {
                out.add_term_product(x, &self.xi[s as usize], p);
            }
        }
        Ok(out)
    }

    /// `h T_y` for every `y` in `ys`, sharing work along common prefixes of
    /// the normal forms.
    fn right_mul_basis_many(
        &self,
        h: &HeckeElt,
        ys: impl Iterator<Item = Elem>,
    ) -> Result<HashMap<Elem, HeckeElt>, HeckeError> {
        let mut memo: HashMap<Elem, HeckeElt> = HashMap::new();
        memo.insert(Elem::IDENTITY, h.clone());
        for y in ys {
            let word = self.universe.word(y).letters().to_vec();
            let mut prefixes = Vec::with_capacity(word.len() + 1);
            let mut cur = Elem::IDENTITY;
            prefixes.push(cur);
            for &s in &word {
                cur = self
                    .universe
                    .right_gen(cur, s)
                    .expect("prefix of a ball element");
                prefixes.push(cur);
            }
            let start = (0..prefixes.len())
                .rev()
                .find(|&i| memo.contains_key(&prefixes[i]))
                .expect("identity is memoised");
            for i in start..word.len() {
                let next = self.right_mul_gen(&memo[&prefixes[i]], word[i])?;
                memo.insert(prefixes[i + 1], next);
            }
        }
        Ok(memo)
    }

    pub fn mul(&self, h: &HeckeElt, k: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        let memo = self.right_mul_basis_many(h, k.support())?;
        let mut out = HeckeElt::zero();
        for (y, p) in k.iter() {
            out.add_scaled(&memo[&y], p);
        }
        Ok(out)
    }

    /// `T_x T_y`.
    pub fn mul_t(&self, x: Elem, y: Elem) -> Result<HeckeElt, HeckeError> {
        let mut acc = self.t(x);
        for &s in self.universe.word(y).letters() {
            acc = self.right_mul_gen(&acc, s)?;
        }
        Ok(acc)
    }

    /// Coefficient of `T_z` in `T_x T_y`.
    pub fn m_coeff(&self, x: Elem, y: Elem, z: Elem) -> Result<LaurentPoly, HeckeError> {
        Ok(self.mul_t(x, y)?.coeff(z))
    }

    /// `bar(T_y) = T_{y^-1}^{-1}`, memoised.
    pub fn bar_t(&self, y: Elem) -> Result<&HeckeElt, HeckeError> {
        if let Some(v) = self.bar_cache[y.index()].get() {
            return Ok(v);
        }
        let value = if y == Elem::IDENTITY {
            self.one()
        } else {
            let s = self.universe.word(y).letters()[0];
            let sy = self
                .universe
                .left_gen(s, y)
                .expect("prefix of a ball element");
            let prev = self.bar_t(sy)?;
            let mut v = self.left_mul_gen(s, prev)?;
            v.add_scaled(prev, &-&self.xi[s as usize]);
            v
        };
        Ok(self.bar_cache[y.index()].get_or_init(|| value))
    }

    /// The ring involution: `q -> q^-1`, `T_w -> T_{w^-1}^{-1}`.
    pub fn bar(&self, h: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        let mut out = HeckeElt::zero();
        for (y, p) in h.iter() {
            out.add_scaled(self.bar_t(y)?, &p.bar());
        }
        Ok(out)
    }

    /// The trace form: coefficient of `T_e`.
    pub fn tau(&self, h: &HeckeElt) -> LaurentPoly {
        h.coeff(Elem::IDENTITY)
    }

    /// `h - k` lies in `H_{<0}`, the span of `A_{<0} T_w`.
    pub fn equal_mod_hneg(&self, h: &HeckeElt, k: &HeckeElt) -> bool {
        h.minus(k).iter().all(|(_, p)| p.in_negative_part())
    }

    pub fn render(&self, h: &HeckeElt) -> String {
        h.render(&self.universe)
    }

    pub fn parse(&self, text: &str) -> Result<HeckeElt, HeckeError> {
        HeckeElt::parse(&self.universe, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn algebra(ty: GroupType, w: Weights, r: usize) -> HeckeAlgebra {
        HeckeAlgebra::new(Arc::new(Universe::new(ty, r)), w).unwrap()
    }

    fn c2() -> HeckeAlgebra {
        algebra(GroupType::C2, Weights::c2(5, 1, 2).unwrap(), 8)
    }

    #[test]
    fn weight_parsing() {
        let w = Weights::parse(GroupType::C2, "a=5,b=1,c=2").unwrap();
        assert_eq!((w.a, w.b, w.c), (5, 1, 2));
        assert_eq!(w.of(0), 2);
        assert!(Weights::parse(GroupType::C2, "a=1,b=1,c=2").is_err());
        assert!(Weights::parse(GroupType::C2, "a=1,b=0,c=1").is_err());
        assert!(Weights::parse(GroupType::C2, "a=1,b=1").is_err());
        let g = Weights::parse(GroupType::G2, "a=2,b=1").unwrap();
        assert_eq!(g.of(0), 1);
        assert!(Weights::parse(GroupType::G2, "a=2,b=1,c=3").is_err());
    }

    #[test]
    fn quadratic_relation() {
        let h = c2();
        let u = h.universe();
        for s in 0..3 {
            let ts = h.t(u.from_word(&[s]).unwrap());
            let sq = h.mul(&ts, &ts).unwrap();
            let expected = ts.scaled(h.xi(s)).plus(&h.one());
            assert_eq!(sq, expected);
        }
    }

    #[test]
    fn rendered_product_of_two_words() {
        let h = c2();
        let u = h.universe();
        let p = h
            .mul_t(u.parse("21").unwrap(), u.parse("102").unwrap())
            .unwrap();
        assert_eq!(
            h.render(&p),
            "(q^1 - q^-1)*T[2102] + (q^5 - q^-5)*T[02] + T[0]"
        );
        assert_eq!(h.parse(&h.render(&p)).unwrap(), p);
    }

    #[test]
    fn bar_of_generator() {
        let h = c2();
        let u = h.universe();
        let s = u.parse("1").unwrap();
        let expected = h.t(s).minus(&h.one().scaled(h.xi(1)));
        assert_eq!(h.bar(&h.t(s)).unwrap(), expected);
        let cs = h.c_gen(1).unwrap();
        assert_eq!(h.bar(&cs).unwrap(), cs);
    }

    #[test]
    fn parse_errors() {
        let h = c2();
        assert!(h.parse("T[0] + ").is_err());
        assert!(h.parse("(q^1*T[0]").is_err());
        assert!(matches!(
            h.parse("T[012012012]"),
            Err(HeckeError::Group(GroupError::OutOfBall { .. }))
        ));
        assert_eq!(
            h.parse("-T[20]").unwrap(),
            HeckeElt::monomial(h.universe().parse("02").unwrap(), LaurentPoly::constant(-1))
        );
    }

    /// Writes a coefficient as an integer combination of monomials
    /// `xi_a^i xi_b^j xi_c^k`, using weights spaced far enough apart that each
    /// monomial has a distinct top degree.
    fn xi_monomials(p: &LaurentPoly, w: &Weights) -> Option<Vec<((u32, u32, u32), i64)>> {
        let mut rest = p.clone();
        let mut out = Vec::new();
        while let Some(top) = rest.degree().finite() {
            let (i, j, k) = (
                (top / w.a) as u32,
                ((top % w.a) / w.b) as u32,
                ((top % w.b) / w.c) as u32,
            );
            if (i as i32) * w.a + (j as i32) * w.b + (k as i32) * w.c != top {
                return None;
            }
            let n = rest.leading_coeff();
            let mono = &(&LaurentPoly::xi(w.a).pow(i) * &LaurentPoly::xi(w.b).pow(j))
                * &LaurentPoly::xi(w.c).pow(k);
            rest -= mono.scale(n);
            out.push(((i, j, k), n));
        }
        Some(out)
    }

    #[test]
    fn structure_constants_are_positive_in_xi() {
        let w = Weights::c2(100, 10, 1).unwrap();
        let h = algebra(GroupType::C2, w, 8);
        let u = h.universe();
        for x in u.ball(4) {
            for y in u.ball(4) {
                for (_, m) in h.mul_t(x, y).unwrap().iter() {
                    let mono = xi_monomials(m, &w).expect("expands in xi monomials");
                    assert!(mono.iter().all(|&(_, n)| n > 0), "{m}");
                }
            }
        }
    }

    fn arb_elt(n: usize) -> impl Strategy<Value = HeckeElt> {
        proptest::collection::vec((0..n as u32, -3i32..=3, -2i64..=2), 0..4).prop_map(|v| {
            HeckeElt::from_terms(
                v.into_iter()
                    .map(|(w, e, c)| (Elem(w), LaurentPoly::monomial(c, e))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn associativity(a in arb_elt(9), b in arb_elt(9), c in arb_elt(9)) {
            let h = c2();
            let left = h.mul(&h.mul(&a, &b).unwrap(), &c).unwrap();
            let right = h.mul(&a, &h.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn bar_is_involutive_ring_map(a in arb_elt(9), b in arb_elt(9)) {
            let h = c2();
            prop_assert_eq!(h.bar(&h.bar(&a).unwrap()).unwrap(), a.clone());
            let lhs = h.bar(&h.mul(&a, &b).unwrap()).unwrap();
            let rhs = h.mul(&h.bar(&a).unwrap(), &h.bar(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn flat_is_anti_involution(a in arb_elt(9), b in arb_elt(9)) {
            let h = c2();
            let u = h.universe();
            let lhs = h.mul(&a, &b).unwrap().flat(u);
            let rhs = h.mul(&b.flat(u), &a.flat(u)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn trace_is_symmetric(x in 0u32..17, y in 0u32..17) {
            let h = c2();
            let (x, y) = (Elem(x), Elem(y));
            let u = h.universe();
            let lhs = h.tau(&h.mul_t(x, y).unwrap());
            let expected = if u.mul(x, y).unwrap() == Elem::IDENTITY { LaurentPoly::one() } else { LaurentPoly::zero() };
            prop_assert_eq!(lhs, expected);
        }
    }
}
