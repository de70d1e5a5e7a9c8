//! Hand-computed identities in the Hecke algebra, written in a small
//! expression language and recomputed exactly.
//!
//! Expressions are sums of products of factors:
//! `T[w]`, `C[w]`, `xi(l)`, `eta(l)`, `q(l)`, integers and parenthesised
//! sums, with `^n` for powers. `l` is a linear form in the weights, such as
//! `2b-a`. Relations between the two sides:
//!
//! | symbol | meaning |
//! |--------|---------|
//! | `=`    | equal |
//! | `~`    | equal modulo `H_{<0}` |
//! | `~c`   | equal modulo `H_{<c}` |
//! | `~0c`  | equal modulo `H_{<0} + H_{<c}` |
//!
//! A word may contain a placeholder `{v}`, instantiated from a list of
//! suffixes. Words must be reduced.

use std::fmt;

use thiserror::Error;

use crate::cells::{find_descriptor, region_descriptors, CellError, ResolvedCell};
use crate::coxeter::{Elem, GroupError, GroupType};
use crate::decomposition::{CellContext, DecompError, Provenance};
use crate::hecke::{HeckeElt, Weights};
use crate::klbasis::{KlError, KlTable};
use crate::laurent::{Exponent, LaurentPoly};
use crate::report::{Report, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("word {0} is not reduced")]
    NotReduced(String),
    #[error("relation {0} needs a cell")]
    NeedsCell(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

impl From<KlError> for IdentityError {
    fn from(e: KlError) -> Self {
        IdentityError::Decomp(e.into())
    }
}

impl From<GroupError> for IdentityError {
    fn from(e: GroupError) -> Self {
        IdentityError::Decomp(e.into())
    }
}

impl From<crate::hecke::HeckeError> for IdentityError {
    fn from(e: crate::hecke::HeckeError) -> Self {
        IdentityError::Decomp(e.into())
    }
}

impl IdentityError {
    pub fn is_out_of_ball(&self) -> bool {
        matches!(self, IdentityError::Decomp(e) if e.is_out_of_ball())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    ModNegative,
    ModCell,
    ModNegativeCell,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "=",
            Relation::ModNegative => "~",
            Relation::ModCell => "~c",
            Relation::ModNegativeCell => "~0c",
        })
    }
}

/// `k_a a + k_b b + k_c c + k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Linear([Exponent; 4]);

impl Linear {
    fn eval(&self, w: &Weights) -> Exponent {
        self.0[0] * w.a + self.0[1] * w.b + self.0[2] * w.c + self.0[3]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Expr {
    Int(i64),
    Xi(Linear),
    Eta(Linear),
    Q(Linear),
    T(String),
    C(String),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
}

struct Parser<'s> {
    text: &'s str,
    chars: Vec<char>,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn new(text: &'s str) -> Self {
        Self {
            text,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn error(&self, reason: impl Into<String>) -> IdentityError {
        IdentityError::Parse {
            input: self.text.to_string(),
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), IdentityError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected {c:?} at position {}", self.pos)))
        }
    }

    fn keyword(&mut self, k: &str) -> bool {
        let n = k.chars().count();
        let here: String = self.chars.iter().skip(self.pos).take(n).collect();
        if here == k {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .ok()
    }

    fn sum(&mut self) -> Result<Expr, IdentityError> {
        let mut terms = Vec::new();
        let mut negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let t = self.term()?;
            terms.push(if negate { Expr::Neg(Box::new(t)) } else { t });
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, IdentityError> {
        let mut factors = vec![self.power()?];
        while self.eat('*') {
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Product(factors)
        })
    }

    fn power(&mut self) -> Result<Expr, IdentityError> {
        let base = self.atom()?;
        if self.eat('^') {
            let n = self
                .number()
                .ok_or_else(|| self.error("expected an exponent after ^"))?;
            return Ok(Expr::Power(Box::new(base), n as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, IdentityError> {
        if let Some(n) = self.number() {
            return Ok(Expr::Int(n));
        }
        if self.eat('(') {
            let e = self.sum()?;
            self.expect(')')?;
            return Ok(e);
        }
        for (k, make) in [
            ("xi(", Expr::Xi as fn(Linear) -> Expr),
            ("eta(", Expr::Eta),
            ("q(", Expr::Q),
        ] {
            if self.keyword(k) {
                let l = self.linear()?;
                self.expect(')')?;
                return Ok(make(l));
            }
        }
        for (k, make) in [("T[", Expr::T as fn(String) -> Expr), ("C[", Expr::C)] {
            if self.keyword(k) {
                let start = self.pos;
                while self.peek().is_some_and(|c| c != ']') {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                self.expect(']')?;
                return Ok(make(word));
            }
        }
        Err(self.error(format!("unexpected input at position {}", self.pos)))
    }

    fn linear(&mut self) -> Result<Linear, IdentityError> {
        let mut l = Linear::default();
        let mut first = true;
        while self.peek().is_some_and(|c| c != ')') {
            let sign = if self.eat('-') {
                -1
            } else if self.eat('+') || first {
                1
            } else {
                return Err(self.error("expected + or - in a weight expression"));
            };
            first = false;
            let k = self.number();
            let slot = match self.peek() {
                Some('a') => Some(0),
                Some('b') => Some(1),
                Some('c') => Some(2),
                _ => None,
            };
            match (k, slot) {
                (k, Some(i)) => {
                    self.pos += 1;
                    l.0[i] += sign * k.unwrap_or(1) as Exponent;
                }
                (Some(k), None) => l.0[3] += sign * k as Exponent,
                (None, None) => return Err(self.error("empty term in a weight expression")),
            }
        }
        Ok(l)
    }
}

/// `lhs REL rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub text: String,
    pub relation: Relation,
    lhs: Expr,
    rhs: Expr,
}

impl Identity {
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let (pos, relation, width) = find_relation(text).ok_or_else(|| IdentityError::Parse {
            input: text.to_string(),
            reason: "no relation symbol".into(),
        })?;
        let side = |s: &str| -> Result<Expr, IdentityError> {
            let mut p = Parser::new(s);
            let e = p.sum()?;
            if p.pos != p.chars.len() {
                return Err(p.error(format!("trailing input at position {}", p.pos)));
            }
            Ok(e)
        };
        Ok(Self {
            text: text.to_string(),
            relation,
            lhs: side(&text[..pos])?,
            rhs: side(&text[pos + width..])?,
        })
    }

    /// Evaluates both sides and compares them.
    pub fn check(
        &self,
        table: &KlTable,
        cell: Option<&CellContext>,
    ) -> Result<Outcome, IdentityError> {
        let (lhs, rhs) = match (eval(&self.lhs, table), eval(&self.rhs, table)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(IdentityError::NotReduced(w)), other)
            | (other, Err(IdentityError::NotReduced(w))) => {
                let u = table.universe();
                let side = other.map(|h| h.render(u))?;
                return Ok(Outcome::Differs {
                    lhs: side,
                    rhs: String::new(),
                    residue: format!("word {w} is not reduced"),
                });
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let diff = lhs.minus(&rhs);
        let u = table.universe();
        let residue = match self.relation {
            Relation::Equal => diff.render(u),
            Relation::ModNegative => {
                let mut bad = diff.clone();
                bad.retain(|_, p| !p.in_negative_part());
                bad.render(u)
            }
            Relation::ModCell | Relation::ModNegativeCell => {
                let ctx =
                    cell.ok_or_else(|| IdentityError::NeedsCell(self.relation.to_string()))?;
                let red = ctx.reduce_hecke(&diff, Provenance::CellIdeal)?;
                let keep_negative = self.relation == Relation::ModNegativeCell;
                let mut bad = red.clone();
                bad.retain(|_, p| !(keep_negative && p.in_negative_part()));
                if bad.is_zero() {
                    "0".to_string()
                } else {
                    bad.render(u)
                }
            }
        };
        Ok(if residue == "0" {
            Outcome::Holds
        } else {
            Outcome::Differs {
                lhs: lhs.render(u),
                rhs: rhs.render(u),
                residue,
            }
        })
    }
}

fn find_relation(text: &str) -> Option<(usize, Relation, usize)> {
    if let Some(i) = text.find("~0c") {
        return Some((i, Relation::ModNegativeCell, 3));
    }
    if let Some(i) = text.find("~c") {
        return Some((i, Relation::ModCell, 2));
    }
    if let Some(i) = text.find('~') {
        return Some((i, Relation::ModNegative, 1));
    }
    text.find('=').map(|i| (i, Relation::Equal, 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    /// Both sides rendered, and the part of the difference that violates the
    /// relation. When a side holds a non-reduced word only the other side is
    /// rendered, in `lhs`.
    Differs {
        lhs: String,
        rhs: String,
        residue: String,
    },
}

fn word_elem(table: &KlTable, word: &str) -> Result<Elem, IdentityError> {
    let u = table.universe();
    let z = u.parse(word)?;
    let letters = if word == "e" || word.is_empty() {
        0
    } else {
        word.len()
    };
    if u.length(z) != letters {
        return Err(IdentityError::NotReduced(word.to_string()));
    }
    Ok(z)
}

fn eval(e: &Expr, table: &KlTable) -> Result<HeckeElt, IdentityError> {
    let w = table.weights();
    let scalar = |p: LaurentPoly| HeckeElt::monomial(Elem::IDENTITY, p);
    Ok(match e {
        Expr::Int(n) => scalar(LaurentPoly::constant(*n)),
        Expr::Xi(l) => scalar(LaurentPoly::xi(l.eval(&w))),
        Expr::Eta(l) => scalar(LaurentPoly::eta(l.eval(&w))),
        Expr::Q(l) => scalar(LaurentPoly::q_pow(l.eval(&w))),
        Expr::T(word) => HeckeElt::basis(word_elem(table, word)?),
        Expr::C(word) => table.c_elem(word_elem(table, word)?)?.clone(),
        Expr::Neg(x) => eval(x, table)?.scaled(&LaurentPoly::constant(-1)),
        Expr::Sum(xs) => {
            let mut out = HeckeElt::zero();
            for x in xs {
                out.add_assign(&eval(x, table)?);
            }
            out
        }
        Expr::Product(xs) => {
            let mut out = eval(&xs[0], table)?;
            for x in &xs[1..] {
                out = mul(table, &out, &eval(x, table)?)?;
            }
            out
        }
        Expr::Power(x, n) => {
            let base = eval(x, table)?;
            let mut out = scalar(LaurentPoly::one());
            for _ in 0..*n {
                out = mul(table, &out, &base)?;
            }
            out
        }
    })
}

fn mul(table: &KlTable, x: &HeckeElt, y: &HeckeElt) -> Result<HeckeElt, IdentityError> {
    let scalar_of = |h: &HeckeElt| {
        (h.len() == 1)
            .then(|| h.coeff_ref(Elem::IDENTITY).cloned())
            .flatten()
    };
    if let Some(c) = scalar_of(x) {
        return Ok(y.scaled(&c));
    }
    if let Some(c) = scalar_of(y) {
        return Ok(x.scaled(&c));
    }
    Ok(table.algebra().mul(x, y)?)
}

/// Hand computations attached to a cell, with the suffixes substituted for
/// `{v}` (an empty list means a single instance with `{v}` absent).
pub struct IdentityCase {
    pub label: &'static str,
    pub identities: &'static [(&'static str, &'static [&'static str])],
}

const NONE: &[&str] = &[];

pub static CASES: &[IdentityCase] = &[
    IdentityCase {
        label: "C2:1:i",
        identities: &[
            ("T[101]*T[0]*T[1012] = (xi(b)^2*xi(c)+xi(c))*T[01012] + xi(b)*xi(c)*T[0102] + xi(b)^2*T[1012] + xi(b)*T[012] + xi(b)*T[102] + T[02]", NONE),
            ("T[101]*T[2]*T[1012] = T[10121012]", NONE),
            ("T[101]*T[1012] = xi(b)^2*T[210102] + xi(b)*T[0102] + xi(c)*T[1012] + xi(b)*T[12] + T[2]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:1:ii",
        identities: &[
            ("T[012]*T[101]*T[2101] = T[0121012101]", NONE),
            ("T[012]*T[010]*T[2101] = T[1010212010]", NONE),
            ("T[012]*T[10]*T[2101] = xi(b)*T[01212010] + T[0212010]", NONE),
            ("T[012]*T[01]*T[2101] = T[01021201]", NONE),
            ("T[012]*T[0]*T[2101] = xi(a)*T[0102101] + xi(b)*xi(c)*T[1010] + xi(b)*T[101] + xi(c)*T[010] + T[10]", NONE),
            ("T[012]*T[1]*T[2101] = xi(b)*T[0121201] + T[021021]", NONE),
            ("T[012]*T[2101] = xi(a)*T[012101] + xi(b)*T[1010] + xi(c)*T[01] + T[1]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:1:iii",
        identities: &[
            ("T[21]*T[2]*T[102] = xi(a)*T[12120] + T[1210]", NONE),
            ("T[21]*T[0]*T[102] = T[210102]", NONE),
            ("T[21]*T[102] = xi(b)*T[2102] + xi(a)*T[02] + T[0]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:1:iv",
        identities: &[("T[02]*T[021] = xi(a)*xi(c)*T[021] + xi(c)*T[01] + xi(a)*T[21] + T[1]", NONE)],
    },
    IdentityCase {
        label: "C2:1:v",
        identities: &[
            ("T[010]*T[12]*T[012012] = xi(c)*T[1010212012] + T[101212012]", NONE),
            ("T[010]*T[21]*T[012012] = xi(c)*T[0121010212] + T[012101212]", NONE),
            ("T[010]*T[1]*T[012012] = (xi(b)*xi(c)^2+xi(b)*xi(c))*T[101212] + xi(c)^2*T[010212] + xi(c)*T[10212] + xi(b)*T[0101212] + xi(c)*T[01212] + T[1212]", NONE),
            ("T[010]*T[2]*T[012012] = xi(c)*T[010210212] + T[01212012]", NONE),
            ("T[010]*T[012012] = xi(c)^2 + xi(c)*T[101212] + xi(b)*T[012012] + xi(c)*T[2012] + T[212]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:1:vi",
        identities: &[("T[101]*T[1012] = xi(b)^2*T[10102] + xi(b)*T[0120] + xi(c)*T[1012] + xi(b)*T[12] + T[2]", NONE)],
    },
    IdentityCase {
        label: "C2:1:vii",
        identities: &[
            ("T[012]*T[10]*T[2101] = T[0212010] + xi(b)*T[02121010]", NONE),
            ("T[012]*T[01]*T[2101] = T[010121201]", NONE),
            ("T[012]*T[0]*T[2101] = xi(a)*T[0120101] + xi(b)*xi(c)*T[1010] + xi(b)*T[101] + xi(c)*T[010] + T[10]", NONE),
            ("T[012]*T[1]*T[2101] = xi(b)*T[0121201] + T[021201]", NONE),
            ("T[012]*T[2101] = xi(a)*T[012101] + xi(b)*T[1010] + xi(c)*T[01] + T[1]", NONE),
            ("T[012]*C[101]*T[2101{v}] ~ T[012102101{v}] + T[02121010{v}] - q(c)*T[0121201{v}]", &["e", "2", "21"]),
            ("T[012]*C[101]*T[2101{v}] ~0c T[012102101{v}]", &["e", "2"]),
            ("T[12]*C[101]*T[2101{v}] ~ T[12102101{v}] + T[2121010{v}] - q(c)*T[121201{v}]", &["e", "2"]),
            ("T[2]*C[101]*T[2101{v}] ~ T[2102101{v}]", &["e", "2"]),
            ("T[012]*C[101]*T[210] ~ T[01210210] - q(c)*T[12120]", NONE),
            ("T[012]*C[101]*T[21] ~ T[0121021] - q(c)*T[01212]", NONE),
            ("T[12]*C[101]*T[21] ~ T[121021] - q(c)*T[1212]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:3:i",
        identities: &[
            ("T[01]*T[0]*T[101] = xi(b)*xi(c)*T[1010] + xi(b)*T[101] + xi(c)*T[010] + T[10]", NONE),
            ("T[01]*T[2]*T[101] = T[012101]", NONE),
            ("T[01]*T[101] = xi(b)*T[1010] + xi(c)*T[01] + T[1]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:3:ii",
        identities: &[("T[0]*T[02] = xi(c)*T[02] + T[2]", NONE)],
    },
    IdentityCase {
        label: "C2:3:iii",
        identities: &[(
            "T[01]*C[02]*T[102102] = T[0102102102] + q(-c)*T[012102102] + q(-a)*xi(c)*T[10102120] + q(-a)*T[1012120] + q(-a-c)*xi(b)*T[0102120] + q(-a-c)*xi(c)*T[02102] + q(-a-c)*T[2102]",
            NONE,
        )],
    },
    IdentityCase {
        label: "C2:3:iv",
        identities: &[("T[01]*T[1012] = xi(b)*T[01012] + xi(c)*T[012] + T[12]", NONE)],
    },
    IdentityCase {
        label: "C2:3:v",
        identities: &[("T[1]*C[2]*T[1012] = T[121012] + q(-a)*T[1]^2*T[012]", NONE)],
    },
    IdentityCase {
        label: "C2:3:vi",
        identities: &[
            ("T[2]*T[10]*T[2101] = T[2120101]", NONE),
            ("T[2]*T[01]*T[2101] = T[0212101]", NONE),
            ("T[2]*T[0]*T[2101] = T[2]^2*T[1010]", NONE),
            ("T[2]*T[1]*T[2101] = T[121201]", NONE),
            ("T[2]*T[2101] = T[2]^2*T[101]", NONE),
        ],
    },
    IdentityCase {
        label: "C2:4:iii",
        identities: &[("T[0]*C[1]*T[210] ~ T[01210]", NONE)],
    },
    IdentityCase {
        label: "G2:1:i",
        identities: &[
            ("T[01210]*T[2121]*T[0121201212] = T[0121021210121201212]", NONE),
            ("T[01210]*T[1212]*T[0121201212] = T[0121012120121201212]", NONE),
            ("T[01210]*T[212]*T[0121201212] = T[012102120121201212]", NONE),
            ("T[01210]*T[121]*T[0121201212] = xi(b)*T[01201210121201212] + xi(a)*xi(b)*T[12012121012121] + xi(a)*T[1210121201212] + xi(b)*T[1012121012121] + T[102121012121]", NONE),
            ("T[01210]*T[12]*T[0121201212] = xi(b)*T[0121201212101212] + xi(a)*xi(b)*T[1021212101212] + xi(a)*T[102121201212] + xi(b)*T[101212101212] + T[10212101212]", NONE),
            ("T[01210]*T[21]*T[0121201212] = xi(b)*T[0121210121201212] + xi(a)*xi(b)*T[0212121012121] + xi(a)*T[021212012121] + xi(b)*T[012121021212] + T[02121021212]", NONE),
            ("T[01210]*T[2]*T[0121201212] = xi(b)*T[012102121201212] + xi(a)*xi(b)*T[021212101212] + xi(a)*T[02121201212] + xi(b)*T[01212101212] + T[0212101212]", NONE),
            ("T[01210]*T[1]*T[0121201212] = xi(b)^2*T[01210121201212] + xi(b)*T[0120121201212] + xi(b)*T[0121021201212] + xi(a)*T[01021201212] + xi(b)^2*T[01021212] + xi(b)*T[1021212] + xi(b)*T[0121212] + T[212121]", NONE),
            ("T[01210]*T[0121201212] = xi(b)*T[01210121201212] + xi(b)*T[012121201212] + xi(a)*T[0121201212] + xi(b)*T[01201212] + xi(b)*T[021212] + T[21212]", NONE),
            ("T[01210]*C[21212]*T[0121201212] ~ T[01210212120121201212] + q(2b-a)*T[02121201212] + q(3b-a)*T[012121201212] - q(2b-a)*T[1012121201212] - q(2b-a)*T[0121212012121]", NONE),
            ("T[01210]*C[21212]*T[012120{v}] ~ T[01210 21212 012120{v}] + q(2b-a)*T[0212120{v}] + q(3b-a)*T[01212120{v}] - q(2b-a)*T[101212120{v}] - q(2b-a)*T[012121012{v}]", &["e", "1", "12", "121"]),
            ("T[01210]*C[21212]*T[01212] ~ T[01210 21212 01212] + q(2b-a)*T[021212] + q(3b-a)*T[0121212] - q(2b-a)*T[10121212]", NONE),
            ("T[01210]*C[21212]*T[01210] ~ T[012102121201210]", NONE),
            ("T[1210]*C[21212]*T[0121201212] ~ T[1210212120121201212] + q(2b-a)*T[2121201212] + q(3b-a)*T[21212101212] - q(2b-a)*T[121212012121]", NONE),
            ("T[1210]*C[21212]*T[01212{v}] ~ T[12102121201212{v}] + q(2b-a)*T[21212{v}] + q(3b-a)*T[212121{v}]", &["e", "0", "01", "012", "0121"]),
            ("T[210]*C[21212]*T[01212{v}] ~ T[2102121201212{v}] + q(2b-a)*T[121212{v}]", &["e", "0", "01", "012", "0121", "01212"]),
            ("T[10]*C[21212]*T[0121201212] ~ T[10212120121201212]", NONE),
        ],
    },
    IdentityCase {
        label: "G2:1:ii",
        identities: G2_ONE_TWO,
    },
    IdentityCase {
        label: "G2:2:i",
        identities: G2_ONE_TWO,
    },
    IdentityCase {
        label: "G2:1:iii",
        identities: G2_ONE_THREE,
    },
    IdentityCase {
        label: "G2:2:ii",
        identities: G2_ONE_THREE,
    },
    IdentityCase {
        label: "G2:1:iv",
        identities: &[
            ("T[01212]*T[10]*T[210210] = T[02121201210] + xi(b)*T[012121201210]", NONE),
            ("T[01212]*T[01]*T[210210] = T[0121201210210]", NONE),
            ("T[01212]*T[1]*T[210210] = xi(a)*(xi(b)^2+1)*T[012121201] + xi(a)*xi(b)*T[02121201] + xi(b)^2*T[01212101] + xi(b)*T[0212101] + xi(b)*T[0121201] + T[021201]", NONE),
            ("T[01212]*T[0]*T[210210] = T[10121210] + xi(b)*T[101212101] + xi(a)*T[01212101210]", NONE),
            ("T[01212]*T[210210] = T[1] + xi(b)*T[10] + xi(b)*T[01] + xi(b)^2*T[101] + xi(a)*T[101210] + xi(a)*T[20121201] + xi(b)*T[01212101] + xi(a)*xi(b)*T[201212101]", NONE),
            ("T[01212]*C[101]*T[210210] ~ T[01212101210210] + T[012121201210] + T[01212101] + q(a-b)*T[02121201] + q(a)*T[012121201]", NONE),
            ("T[01212]*C[101]*T[2102{v}] ~ T[012121012102{v}] + q(a-b)*T[20121210{v}] + T[0212121012{v}]", &["e", "1"]),
            ("T[1212]*C[101]*T[2102{v}] ~ T[12121012102{v}] + q(a-b)*T[1212120{v}]", &["e", "1"]),
            ("T[01212]*C[101]*T[210] ~ T[01212101210] + T[021212101]", NONE),
            ("T[1212]*C[101]*T[210210] ~ T[1212101210210] + T[12121201210] + T[1212101] + q(a-b)*T[2121201] + q(a)*T[12121201]", NONE),
            ("T[212]*C[101]*T[210210] ~ T[212101210210] + q(a-b)*T[12121201]", NONE),
            ("T[212]*C[101]*T[21021] ~ T[21210121021]", NONE),
            ("T[12]*C[101]*T[210210] ~ T[12101210210]", NONE),
        ],
    },
    IdentityCase {
        label: "G2:1:v",
        identities: &[
            ("T[0121]*T[0]*T[1210] = T[012101210]", NONE),
            ("T[0121]*T[2]*T[1210] = xi(b)*T[01212120] + T[0212120]", NONE),
            ("T[0121]*T[1210] = xi(b)*T[0121210] + xi(a)*T[01210] + xi(b)*T[010] + xi(b)*T[0] + 1", NONE),
        ],
    },
    IdentityCase {
        label: "G2:1:vi",
        identities: &[("T[0]*C[12121]*T[0] ~ T[0121210]", NONE)],
    },
    IdentityCase {
        label: "G2:3:ii",
        identities: &[("T[2]*C[1]*T[212] ~ T[21212]", NONE)],
    },
    IdentityCase {
        label: "G2:3:iv",
        identities: &[("T[01]*C[2]*T[10] ~ T[01210]", NONE)],
    },
];

static G2_ONE_TWO: &[(&str, &[&str])] = &[
    ("T[0121]*T[0]*T[12120] = T[0121012120]", NONE),
    ("T[0121]*T[2]*T[12120] = xi(a)*xi(b)*T[01212120] + xi(a)*T[0212120] + xi(b)*T[0121210] + T[021210]", NONE),
    ("T[0121]*T[12120] = T[2] + xi(b)*T[02] + xi(b)*T[1012] + xi(a)*T[012120] + xi(b)*T[01212120]", NONE),
    ("T[0121]*C[02]*T[12120] ~ T[01210212102] + q(a-b)*T[0212120] + q(a)*T[01212120] + T[0121210]", NONE),
    ("T[0121]*C[02]*T[1212{v}] ~ T[0121021212{v}] + q(a-b)*T[021212{v}] + q(a)*T[0121212{v}] + T[012121{v}]", &["e", "0"]),
    ("T[0121]*C[02]*T[1210] ~ T[0121021210]", NONE),
    ("T[121]*C[02]*T[1212{v}] ~ T[121021212{v}] + q(a-b)*T[21212{v}] + q(a)*T[121212{v}] + T[12121{v}]", &["e", "0"]),
    ("T[21]*C[02]*T[1212{v}] ~ T[21021212{v}] + q(a-b)*T[121212{v}]", &["e", "0"]),
    ("T[1]*C[02]*T[1212{v}] ~ T[1021212{v}]", &["e", "0"]),
    ("T[2121]*T[0]*T[12120] = T[2121012120]", NONE),
    ("T[2121]*T[2]*T[12120] = T[1210] + xi(a)*T[12120] + xi(a)*T[21210] + xi(a)*xi(b)*T[121210] + xi(a)^2*T[212120] + xi(a)^2*xi(b)*T[1212120]", NONE),
    ("T[2121]*T[12120] = T[0] + xi(a)*T[02] + xi(b)*T[2120] + xi(b)*T[121210] + xi(a)*T[212120] + xi(a)*xi(b)*T[1212120]", NONE),
    ("T[2121]*C[02]*T[12120] ~ T[21210212120] + T[1212120] + (q(2a)-2-q(2a-2b))*T[1212120] + q(a)*T[121210] + q(2a-b)*T[212120] + q(a-b)*T[21210] + q(a-b)*T[12120]", NONE),
    ("T[2121]*C[02]*T[1212{v}] ~ T[2121021212{v}] + T[121212{v}] + (q(2a)-2-q(2a-2b))*T[121212{v}] + q(a)*T[12121{v}] + q(2a-b)*T[21212{v}] + q(a-b)*T[2121{v}] + q(a-b)*T[1212{v}]", &["e", "0"]),
];

static G2_ONE_THREE: &[(&str, &[&str])] = &[
    ("T[0121]*T[0]*T[102102] = T[120121210] + xi(b)*T[1012121012]", NONE),
    ("T[0121]*T[2]*T[102102] = T[201212012] + xi(b)*T[0212121012]", NONE),
    ("T[0121]*T[102102] = T[12] + xi(b)*T[120] + xi(b)*T[012] + xi(b)^2*T[1012] + xi(a)*T[1012120] + xi(b)*T[012121012]", NONE),
    ("T[0121]*C[02]*T[102102] ~ T[012102102102] + T[0121212012]", NONE),
    ("T[0121]*C[02]*T[10210{v}] ~ T[01210210210{v}] + T[012121201{v}]", &["e", "2"]),
    ("T[0121]*C[02]*T[10212] ~ T[01210210212]", NONE),
    ("T[121]*C[02]*T[10210{v}] ~ T[1210210210{v}] + T[12121201{v}]", &["e", "2"]),
    ("T[21]*C[02]*T[10210{v}] ~ T[210210210{v}]", &["e", "2"]),
    ("T[01]*C[02]*T[10210{v}] ~ T[010210210{v}]", &["e", "2"]),
];

pub fn case_labels() -> Vec<&'static str> {
    CASES.iter().map(|c| c.label).collect()
}

fn instances(template: &str, vars: &[&str]) -> Vec<String> {
    if vars.is_empty() {
        return vec![template.to_string()];
    }
    vars.iter()
        .map(|v| template.replace("{v}", if *v == "e" { "" } else { v }))
        .collect()
}

/// Recomputes every identity recorded for the cell `label`. A differing
/// identity makes the report MISMATCH (a finding about the recorded form,
/// not a failure); malformed input or an unusable region is an error.
pub fn regress_identities(table: &KlTable, label: &str) -> Result<Report, DecompError> {
    let case = CASES
        .iter()
        .find(|c| c.label == label)
        .ok_or_else(|| DecompError::UnknownCase(label.to_string()))?;
    let desc = find_descriptor(&table.weights(), label)?;
    let ctx = CellContext::new(table, &desc)?;
    let mut r = Report::new("identities", label, table.weights(), table.radius());
    let mut mismatches = 0;
    let mut skipped = 0;
    let mut n = 0;
    for (template, vars) in case.identities {
        for text in instances(template, vars) {
            n += 1;
            let id = Identity::parse(&text).map_err(|e| DecompError::UnknownCase(e.to_string()))?;
            match id.check(table, Some(&ctx)) {
                Ok(Outcome::Holds) => r.pass_one(),
                Ok(Outcome::Differs { lhs, rhs, residue }) => {
                    mismatches += 1;
                    r.fail(if rhs.is_empty() {
                        format!("#{n} {text}: {residue}; other side recomputes to {lhs}")
                    } else {
                        format!("#{n} {text}: left side {lhs}; right side {rhs}; residue {residue}")
                    });
                }
                Err(e) if e.is_out_of_ball() => {
                    skipped += 1;
                    r.caveat(format!("#{n} skipped: {e}"));
                }
                Err(e) => return Err(DecompError::UnknownCase(format!("#{n} {text}: {e}"))),
            }
        }
    }
    if mismatches > 0 {
        r.count += mismatches;
        r.status = Status::Mismatch;
    } else if r.count == 0 && skipped > 0 {
        return Ok(r.skipped("every identity needs a larger radius"));
    }
    Ok(r.finish())
}

/// A closed form for `C_w` with the eigen-equations that go with it.
pub struct ClosedForm {
    pub name: &'static str,
    pub ty: GroupType,
    pub element: &'static str,
    pub condition: &'static str,
    pub applies: fn(&Weights) -> bool,
    pub identities: &'static [&'static str],
}

pub static CLOSED_FORMS: &[ClosedForm] = &[
    ClosedForm {
        name: "C101",
        ty: GroupType::C2,
        element: "101",
        condition: "c<b",
        applies: |w| w.c < w.b,
        identities: &[
            "C[101] = C[1]*T[0]*C[1] - q(-b)*xi(c)*C[1]",
            "C[101] = T[101] + q(-b)*T[10] + q(-b)*T[01] + q(-2b)*T[0] - q(-b)*xi(c)*T[1] - q(-2b)*xi(c)",
            "C[1]*C[0]*C[1] = C[1]*T[0]*C[1] - q(-b)*xi(c)*C[1] + eta(b-c)*C[1]",
            "C[0]*C[101] = C[1010]",
            "T[1]*C[101] = q(b)*C[101]",
            "C[1]*C[101] = eta(b)*C[101]",
            "T[0]*C[101] ~c -q(-c)*C[101]",
            "C[101]*C[101] ~c -eta(b)*eta(b-c)*C[101]",
        ],
    },
    ClosedForm {
        name: "C121",
        ty: GroupType::C2,
        element: "121",
        condition: "a=c, a<b",
        applies: |w| w.a == w.c && w.a < w.b,
        identities: &[
            "C[121] = C[1]*T[2]*C[1] - q(-b)*xi(a)*C[1]",
            "C[2]*C[121] = C[1212]",
            "T[1]*C[121] = q(b)*C[121]",
            "T[2]*C[121] ~c -q(-a)*C[121]",
            "C[121]*C[121] ~c -eta(b)*eta(b-a)*C[121]",
        ],
    },
    ClosedForm {
        name: "C212",
        ty: GroupType::C2,
        element: "212",
        condition: "b<a",
        applies: |w| w.b < w.a,
        identities: &[
            "C[212] = C[2]*T[1]*C[2] - q(-a)*xi(b)*C[2]",
            "T[2]*C[212] = q(a)*C[212]",
            "T[1]*C[212] ~c -q(-b)*C[212]",
            "C[212]*C[212] ~c -eta(a)*eta(a-b)*C[212]",
        ],
    },
    ClosedForm {
        name: "C010",
        ty: GroupType::C2,
        element: "010",
        condition: "b<c",
        applies: |w| w.b < w.c,
        identities: &[
            "C[010] = C[0]*T[1]*C[0] - q(-c)*xi(b)*C[0]",
            "T[0]*C[010] = q(c)*C[010]",
            "T[1]*C[010] ~c -q(-b)*C[010]",
            "C[010]*C[010] ~c -eta(c)*eta(c-b)*C[010]",
        ],
    },
    ClosedForm {
        name: "C21212",
        ty: GroupType::G2,
        element: "21212",
        condition: "a>b",
        applies: |w| w.a > w.b,
        identities: &[
            "C[21212] = C[2]*T[1]*T[2]*T[1]*C[2] - q(-a)*xi(b)*C[2]*T[1]*C[2] + q(-2a)*(eta(2b)-1)*C[2]",
            "C[2]*C[1]*C[2]*C[1]*C[2] - 2*eta(a-b)*C[212] - (eta(2a-2b)+3)*C[2] = C[2]*T[1]*T[2]*T[1]*C[2] - q(-a)*xi(b)*C[2]*T[1]*C[2] + q(-2a)*(eta(2b)-1)*C[2]",
            "C[1]*C[21212] = C[121212]",
            "T[2]*C[21212] = q(a)*C[21212]",
            "T[1]*C[21212] ~c -q(-b)*C[21212]",
            "C[21212]*C[21212] ~c eta(a)*(eta(2a-2b)+1)*C[21212]",
        ],
    },
    ClosedForm {
        name: "C12121",
        ty: GroupType::G2,
        element: "12121",
        condition: "a<b",
        applies: |w| w.a < w.b,
        identities: &[
            "C[12121] = C[1]*T[2]*T[1]*T[2]*C[1] - q(-b)*xi(a)*C[1]*T[2]*C[1] + q(-2b)*(eta(2a)-1)*C[1]",
            "C[2]*C[12121] = C[121212]",
            "T[1]*C[12121] = q(b)*C[12121]",
            "T[2]*C[12121] ~c -q(-a)*C[12121]",
            "C[12121]*C[12121] ~c eta(b)*(eta(2b-2a)+1)*C[12121]",
        ],
    },
];

/// The cell of `z` among those listed for the table's weights.
pub fn cell_containing(table: &KlTable, z: Elem) -> Result<ResolvedCell, DecompError> {
    let u = table.universe();
    for d in region_descriptors(&table.weights()) {
        let c = ResolvedCell::resolve(&d, u, table.radius())?;
        if c.contains(u, z)? {
            return Ok(c);
        }
    }
    Err(CellError::UnknownCell(format!("cell of {}", u.format(z))).into())
}

/// Checks every closed form that applies at the table's weights.
pub fn special_c_forms(table: &KlTable) -> Vec<Report> {
    let w = table.weights();
    let mut out = Vec::new();
    for form in CLOSED_FORMS
        .iter()
        .filter(|f| f.ty == w.ty && (f.applies)(&w))
    {
        let mut r = Report::new(
            format!("forms:{}", form.name),
            form.condition,
            w,
            table.radius(),
        );
        let ctx = table
            .universe()
            .parse(form.element)
            .map_err(DecompError::from)
            .and_then(|z| cell_containing(table, z))
            .map(|c| CellContext::from_resolved(table, c));
        let ctx = match ctx {
            Ok(c) => c,
            Err(e) => {
                r.fail(e.to_string());
                out.push(r.finish());
                continue;
            }
        };
        r.scope = format!("{} [{}]", ctx.label(), form.condition);
        for text in form.identities {
            let res = Identity::parse(text).and_then(|id| id.check(table, Some(&ctx)));
            match res {
                Ok(Outcome::Holds) => r.pass_one(),
                Ok(Outcome::Differs { residue, .. }) => {
                    r.fail(format!("{text}: residue {residue}"))
                }
                Err(e) => r.fail(format!("{text}: {e}")),
            }
        }
        out.push(r.finish());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(w: Weights, r: usize) -> KlTable {
        KlTable::new(w, r).unwrap()
    }

    #[test]
    fn parses_and_evaluates() {
        let t = table(Weights::c2(5, 1, 2).unwrap(), 8);
        let id = Identity::parse("T[21]*T[102] = xi(b)*T[2102] + xi(a)*T[02] + T[0]").unwrap();
        assert_eq!(id.relation, Relation::Equal);
        assert_eq!(id.check(&t, None).unwrap(), Outcome::Holds);
        let wrong = Identity::parse("T[21]*T[102] = xi(a)*T[2102] + xi(a)*T[02] + T[0]").unwrap();
        assert!(matches!(
            wrong.check(&t, None).unwrap(),
            Outcome::Differs { .. }
        ));
        let id = Identity::parse("T[0]*T[02] = xi(c)*T[02] + T[2]").unwrap();
        assert_eq!(id.check(&t, None).unwrap(), Outcome::Holds);
        let id = Identity::parse("(q(2b-a)+1)^2 = q(4b-2a) + 2*q(2b-a) + 1").unwrap();
        assert_eq!(id.check(&t, None).unwrap(), Outcome::Holds);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Identity::parse("T[0]*T[1]").is_err());
        assert!(Identity::parse("T[0]* = T[1]").is_err());
        assert!(Identity::parse("xi(2d) = 1").is_err());
        let t = table(Weights::c2(5, 1, 2).unwrap(), 8);
        let id = Identity::parse("T[00] = 1").unwrap();
        assert!(
            matches!(id.check(&t, None).unwrap(), Outcome::Differs { residue, .. } if residue.contains("not reduced"))
        );
        let id = Identity::parse("T[0]*C[1] ~c 0").unwrap();
        assert!(matches!(
            id.check(&t, None),
            Err(IdentityError::NeedsCell(_))
        ));
    }

    #[test]
    fn unknown_case() {
        let t = table(Weights::c2(5, 1, 2).unwrap(), 8);
        assert!(matches!(
            regress_identities(&t, "C2:9:x"),
            Err(DecompError::UnknownCase(_))
        ));
    }

    #[test]
    fn modular_relations() {
        let t = table(Weights::c2(2, 2, 1).unwrap(), 8);
        let id = Identity::parse("C[101] ~ T[101]").unwrap();
        assert_eq!(id.check(&t, None).unwrap(), Outcome::Holds);
        let id = Identity::parse("C[101] ~ T[10]").unwrap();
        assert!(matches!(
            id.check(&t, None).unwrap(),
            Outcome::Differs { .. }
        ));
    }
}
