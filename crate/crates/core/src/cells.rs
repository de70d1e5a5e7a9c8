//! Two-sided cells: the encoded tables for every parameter region, and the
//! cells computed directly from Kazhdan-Lusztig data for comparison.
//!
//! A cell is described as a union of pieces `B_d d U_d`. The sets `U_d` are
//! usually infinite and are given symbolically (see [`USpec`]); they are
//! truncated to a ball when a descriptor is resolved against a universe.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::{Elem, GroupError, GroupType, Universe, RANK};
use crate::hecke::Weights;
use crate::klbasis::{KlError, KlTable};
use crate::laurent::Exponent;
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cell {label}: product {b}.{d}.{u} is not length-additive")]
    NotAdditive {
        label: String,
        b: String,
        d: String,
        u: String,
    },
    #[error("cell {label}: element {word} arises from two different pieces")]
    Overlap { label: String, word: String },
    #[error("no cell {0} for these weights")]
    UnknownCell(String),
}

/// A weight predicate with its textual form.
#[derive(Clone, Copy)]
pub struct Condition {
    pub text: &'static str,
    pub test: fn(&Weights) -> bool,
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text)
    }
}

/// The set `U_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum USpec {
    Explicit(Vec<&'static str>),
    /// `U(p_1) ∪ ... ∪ U(p_k) ∪ extra`.
    Duflo {
        ps: Vec<&'static str>,
        extra: Vec<&'static str>,
    },
    /// `U = B_d^{-1}`.
    InverseOfB,
    /// `{u : l(du) = l(d) + l(u)}`.
    LengthAdditive,
}

impl fmt::Display for USpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            USpec::Explicit(v) => write!(f, "{{{}}}", v.join(",")),
            USpec::Duflo { ps, extra } => {
                let parts: Vec<String> = ps.iter().map(|p| format!("U({p})")).collect();
                write!(f, "{}", parts.join("∪"))?;
                if !extra.is_empty() {
                    write!(f, "∪{{{}}}", extra.join(","))?;
                }
                Ok(())
            }
            USpec::InverseOfB => f.write_str("B^-1"),
            USpec::LengthAdditive => f.write_str("{u : l(du)=l(d)+l(u)}"),
        }
    }
}

/// The set `B_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BSpec {
    Explicit(Vec<&'static str>),
    /// `{b : b^-1 <=_D p}`.
    InversePrefixes(&'static str),
}

impl fmt::Display for BSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BSpec::Explicit(v) => write!(f, "{{{}}}", v.join(",")),
            BSpec::InversePrefixes(p) => write!(f, "{{b : b^-1 <=_D {p}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSpec {
    pub b: BSpec,
    pub d: &'static str,
    pub u: USpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellKind {
    Identity,
    Generic,
    OneElement,
    Lowest,
}

#[derive(Clone, Debug)]
pub struct CellDescriptor {
    pub label: String,
    pub ty: GroupType,
    pub condition: Condition,
    pub pieces: Vec<PieceSpec>,
    pub kind: CellKind,
}

impl CellDescriptor {
    pub fn applies(&self, w: &Weights) -> bool {
        w.ty == self.ty && (self.condition.test)(w)
    }

    /// One line: label, condition, pieces.
    pub fn dump(&self) -> String {
        let pieces: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("({}, {}, {})", p.b, p.d, p.u))
            .collect();
        format!(
            "{} [{}] {}",
            self.label,
            self.condition.text,
            pieces.join(" + ")
        )
    }
}

fn ex(v: &[&'static str]) -> BSpec {
    BSpec::Explicit(v.to_vec())
}

fn up(p: &'static str) -> USpec {
    USpec::Duflo {
        ps: vec![p],
        extra: vec![],
    }
}

fn piece(b: BSpec, d: &'static str, u: USpec) -> PieceSpec {
    PieceSpec { b, d, u }
}

fn desc(
    ty: GroupType,
    label: &str,
    text: &'static str,
    test: fn(&Weights) -> bool,
    kind: CellKind,
    pieces: Vec<PieceSpec>,
) -> CellDescriptor {
    CellDescriptor {
        label: format!("{ty}:{label}"),
        ty,
        condition: Condition { text, test },
        pieces,
        kind,
    }
}

fn single(
    ty: GroupType,
    word: &'static str,
    text: &'static str,
    test: fn(&Weights) -> bool,
) -> CellDescriptor {
    let label = format!("{}:{word}", if ty == GroupType::C2 { 5 } else { 4 });
    desc(
        ty,
        &label,
        text,
        test,
        CellKind::OneElement,
        vec![piece(ex(&["e"]), word, USpec::Explicit(vec!["e"]))],
    )
}

/// Every encoded cell of the given type, whatever the weights.
pub fn all_descriptors(ty: GroupType) -> Vec<CellDescriptor> {
    use CellKind::*;
    use GroupType::*;
    let id = desc(
        ty,
        "e",
        "always",
        |_| true,
        Identity,
        vec![piece(ex(&["e"]), "e", USpec::Explicit(vec!["e"]))],
    );
    match ty {
        C2 => vec![
            id,
            desc(
                C2,
                "1:i",
                "a-c>2b",
                |w| w.a - w.c > 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "1", "01", "101"]), "02", up("1012"))],
            ),
            desc(
                C2,
                "1:ii",
                "0<a-c<2b",
                |w| 0 < w.a - w.c && w.a - w.c < 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "2", "12", "012"]), "1010", up("2101"))],
            ),
            desc(
                C2,
                "1:iii",
                "|a-c|<b, a+c>b",
                |w| (w.a - w.c).abs() < w.b && w.a + w.c > w.b,
                Generic,
                vec![piece(ex(&["e", "1", "01", "21"]), "02", up("102"))],
            ),
            desc(
                C2,
                "1:iv",
                "a+c<b",
                |w| w.a + w.c < w.b,
                Generic,
                vec![piece(ex(&["e", "0", "2", "02"]), "1", up("021"))],
            ),
            desc(
                C2,
                "1:v",
                "a-c>b",
                |w| w.a - w.c > w.b,
                Generic,
                vec![piece(ex(&["e", "0", "10", "010"]), "212", up("012"))],
            ),
            desc(
                C2,
                "1:vi",
                "a>c, a+c>2b",
                |w| w.a > w.c && w.a + w.c > 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "1", "01", "101"]), "2", up("1012"))],
            ),
            desc(
                C2,
                "1:vii",
                "a>c, a+c<2b",
                |w| w.a > w.c && w.a + w.c < 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "2", "12", "012"]), "101", up("2101"))],
            ),
            desc(
                C2,
                "2:i",
                "a<b, c<b, a+c>b",
                |w| w.a < w.b && w.c < w.b && w.a + w.c > w.b,
                Generic,
                vec![piece(ex(&["e", "0", "2"]), "1", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "2:ii",
                "c<a<b",
                |w| w.c < w.a && w.a < w.b,
                Generic,
                vec![piece(ex(&["e", "0"]), "121", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "2:iii",
                "a>b>c",
                |w| w.a > w.b && w.b > w.c,
                Generic,
                vec![piece(ex(&["e", "0"]), "1", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "2:iv",
                "b<a-c<2b",
                |w| w.b < w.a - w.c && w.a - w.c < 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "1", "01"]), "02", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "2:v",
                "a>b, a+c<2b",
                |w| w.a > w.b && w.a + w.c < 2 * w.b,
                Generic,
                vec![piece(ex(&["e", "1", "01"]), "2", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "2:vi",
                "a>c>b",
                |w| w.a > w.c && w.c > w.b,
                Generic,
                vec![piece(ex(&["e", "1"]), "0", USpec::InverseOfB)],
            ),
            desc(
                C2,
                "3:i",
                "a-c=2b",
                |w| w.a - w.c == 2 * w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1", "01"]), "02", up("1012")),
                    piece(ex(&["e"]), "1010", up("2101")),
                ],
            ),
            desc(
                C2,
                "3:ii",
                "a+c=b",
                |w| w.a + w.c == w.b,
                Generic,
                vec![
                    piece(ex(&["e", "0", "2"]), "1", up("021")),
                    piece(ex(&["e"]), "02", up("102")),
                ],
            ),
            desc(
                C2,
                "3:iii",
                "a-c=b",
                |w| w.a - w.c == w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1", "01"]), "02", up("102")),
                    piece(ex(&["e"]), "212", up("012")),
                ],
            ),
            desc(
                C2,
                "3:iv",
                "a>c, a+c=2b",
                |w| w.a > w.c && w.a + w.c == 2 * w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1", "01"]), "2", up("1012")),
                    piece(ex(&["e"]), "101", up("2101")),
                ],
            ),
            desc(
                C2,
                "3:v",
                "a=c, a>b",
                |w| w.a == w.c && w.a > w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1"]), "2", up("1012")),
                    piece(ex(&["e", "1"]), "0", up("1210")),
                ],
            ),
            desc(
                C2,
                "3:vi",
                "a=c, a<b",
                |w| w.a == w.c && w.a < w.b,
                Generic,
                vec![
                    piece(ex(&["e", "2"]), "101", up("2101")),
                    piece(ex(&["e", "0"]), "121", up("0121")),
                ],
            ),
            desc(
                C2,
                "4:i",
                "a=b=c",
                |w| w.a == w.b && w.b == w.c,
                Generic,
                vec![
                    piece(
                        ex(&["e"]),
                        "1",
                        USpec::Duflo {
                            ps: vec!["0121", "2101"],
                            extra: vec![],
                        },
                    ),
                    piece(
                        ex(&["e"]),
                        "2",
                        USpec::Duflo {
                            ps: vec!["1012"],
                            extra: vec!["12"],
                        },
                    ),
                    piece(
                        ex(&["e"]),
                        "0",
                        USpec::Duflo {
                            ps: vec!["1210"],
                            extra: vec!["10"],
                        },
                    ),
                ],
            ),
            desc(
                C2,
                "4:ii",
                "a>b=c",
                |w| w.a > w.b && w.b == w.c,
                Generic,
                vec![
                    piece(ex(&["e"]), "1", USpec::Explicit(vec!["e", "0", "01"])),
                    piece(ex(&["e"]), "0", USpec::Explicit(vec!["e", "1", "10"])),
                ],
            ),
            desc(
                C2,
                "4:iii",
                "a=b>c",
                |w| w.a == w.b && w.b > w.c,
                Generic,
                vec![
                    piece(
                        ex(&["e", "0"]),
                        "1",
                        USpec::Explicit(vec!["e", "0", "2", "21", "210"]),
                    ),
                    piece(ex(&["e"]), "2", USpec::Explicit(vec!["e", "1", "10", "12"])),
                ],
            ),
            single(C2, "1", "a,c>b", |w| w.a > w.b && w.c > w.b),
            single(C2, "010", "a,c>b", |w| w.a > w.b && w.c > w.b),
            single(C2, "1010", "a-c>2b", |w| w.a - w.c > 2 * w.b),
            single(C2, "212", "b<a, c<=a, a<b+c", |w| {
                w.b < w.a && w.c <= w.a && w.a < w.b + w.c
            }),
            single(C2, "0", "c<b, a>=c", |w| w.c < w.b && w.a >= w.c),
            single(C2, "101", "a+c>2b, c<b", |w| {
                w.a + w.c > 2 * w.b && w.c < w.b
            }),
            single(C2, "2", "a>=c, a<b", |w| w.a >= w.c && w.a < w.b),
            single(C2, "02", "a+c<b", |w| w.a + w.c < w.b),
            desc(
                C2,
                "6:i",
                "a>c",
                |w| w.a > w.c,
                Lowest,
                vec![piece(
                    BSpec::InversePrefixes("010210"),
                    "1212",
                    USpec::LengthAdditive,
                )],
            ),
            desc(
                C2,
                "6:ii",
                "a=c",
                |w| w.a == w.c,
                Lowest,
                vec![
                    piece(ex(&["e", "0", "10", "210"]), "1212", USpec::LengthAdditive),
                    piece(ex(&["e", "2", "12", "012"]), "1010", USpec::LengthAdditive),
                ],
            ),
        ],
        G2 => vec![
            id,
            desc(
                G2,
                "1:i",
                "2a>3b",
                |w| 2 * w.a > 3 * w.b,
                Generic,
                vec![piece(
                    ex(&["e", "0", "10", "210", "1210", "01210"]),
                    "21212",
                    up("01212"),
                )],
            ),
            desc(
                G2,
                "1:ii",
                "2a<3b",
                |w| 2 * w.a < 3 * w.b,
                Generic,
                vec![piece(
                    ex(&["e", "1", "21", "121", "0121", "2121"]),
                    "02",
                    up("12102"),
                )],
            ),
            desc(
                G2,
                "1:iii",
                "a>2b",
                |w| w.a > 2 * w.b,
                Generic,
                vec![piece(
                    ex(&["e", "1", "01", "21", "121", "0121"]),
                    "02",
                    up("102"),
                )],
            ),
            desc(
                G2,
                "1:iv",
                "a<2b",
                |w| w.a < 2 * w.b,
                Generic,
                vec![piece(
                    ex(&["e", "2", "12", "212", "1212", "01212"]),
                    "101",
                    up("210"),
                )],
            ),
            desc(
                G2,
                "1:v",
                "2a>3b, a<2b",
                |w| 2 * w.a > 3 * w.b && w.a < 2 * w.b,
                Generic,
                vec![piece(
                    ex(&["e", "1", "21", "121", "0121"]),
                    "02",
                    USpec::InverseOfB,
                )],
            ),
            desc(
                G2,
                "1:vi",
                "a<b",
                |w| w.a < w.b,
                Generic,
                vec![piece(ex(&["e", "0"]), "12121", USpec::InverseOfB)],
            ),
            desc(
                G2,
                "2:i",
                "2a=3b",
                |w| 2 * w.a == 3 * w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1", "21", "121", "0121"]), "02", up("12102")),
                    piece(ex(&["e"]), "21212", up("01212")),
                ],
            ),
            desc(
                G2,
                "2:ii",
                "a=2b",
                |w| w.a == 2 * w.b,
                Generic,
                vec![
                    piece(ex(&["e", "1", "21", "121", "0121"]), "02", up("102")),
                    piece(ex(&["e"]), "101", up("210")),
                ],
            ),
            desc(
                G2,
                "3:i",
                "a>b",
                |w| w.a > w.b,
                Generic,
                vec![
                    piece(ex(&["e"]), "1", USpec::Explicit(vec!["e", "0"])),
                    piece(ex(&["e"]), "0", USpec::Explicit(vec!["e", "1"])),
                ],
            ),
            desc(
                G2,
                "3:ii",
                "a<b",
                |w| w.a < w.b,
                Generic,
                vec![
                    piece(
                        ex(&["e", "2"]),
                        "1",
                        USpec::Explicit(vec!["e", "2", "0", "21", "212", "210"]),
                    ),
                    piece(
                        ex(&["e"]),
                        "0",
                        USpec::Explicit(vec!["e", "1", "12", "121", "1210", "1212"]),
                    ),
                ],
            ),
            desc(
                G2,
                "3:iii",
                "a=b",
                |w| w.a == w.b,
                Generic,
                vec![
                    piece(
                        ex(&["e"]),
                        "1",
                        USpec::Explicit(vec!["e", "0", "2", "21", "210", "212", "2121", "21210"]),
                    ),
                    piece(
                        ex(&["e"]),
                        "0",
                        USpec::Explicit(vec![
                            "e", "1", "12", "121", "1210", "1212", "12121", "121210",
                        ]),
                    ),
                    piece(
                        ex(&["e"]),
                        "2",
                        USpec::Explicit(vec!["e", "1", "10", "12", "121", "1210", "1212"]),
                    ),
                ],
            ),
            desc(
                G2,
                "3:iv",
                "a>b",
                |w| w.a > w.b,
                Generic,
                vec![piece(
                    ex(&["e", "1", "01"]),
                    "2",
                    USpec::Explicit(vec!["e", "1", "10", "12", "121", "1210"]),
                )],
            ),
            single(G2, "2", "a<b", |w| w.a < w.b),
            single(G2, "21212", "2b<2a<3b", |w| {
                2 * w.b < 2 * w.a && 2 * w.a < 3 * w.b
            }),
            single(G2, "101", "a>2b", |w| w.a > 2 * w.b),
            desc(
                G2,
                "5",
                "always",
                |_| true,
                Lowest,
                vec![piece(
                    BSpec::InversePrefixes("0121201210"),
                    "121212",
                    USpec::LengthAdditive,
                )],
            ),
        ],
    }
}

/// The cells listed for these weights, the identity cell included.
pub fn region_descriptors(w: &Weights) -> Vec<CellDescriptor> {
    all_descriptors(w.ty)
        .into_iter()
        .filter(|d| d.applies(w))
        .collect()
}

pub fn find_descriptor(w: &Weights, label: &str) -> Result<CellDescriptor, CellError> {
    region_descriptors(w)
        .into_iter()
        .find(|d| d.label == label)
        .ok_or_else(|| CellError::UnknownCell(label.to_string()))
}

/// One piece `B_d d U_d` truncated to the ball.
#[derive(Clone, Debug)]
pub struct ResolvedPiece {
    pub b: Vec<Elem>,
    pub d: Elem,
    /// `U_d` up to length `radius - l(d)`, in ShortLex order.
    pub u: Vec<Elem>,
    u_set: HashSet<Elem>,
    u_radius: usize,
    spec: PieceSpec,
}

impl ResolvedPiece {
    /// Membership in `U_d`; lengths beyond the resolved range are an error.
    pub fn in_u(&self, universe: &Universe, x: Elem) -> Result<bool, GroupError> {
        if universe.length(x) > self.u_radius {
            return Err(GroupError::OutOfBall {
                word: universe.format(x),
                radius: self.u_radius,
            });
        }
        Ok(self.u_set.contains(&x))
    }

    pub fn u_radius(&self) -> usize {
        self.u_radius
    }

    pub fn spec(&self) -> &PieceSpec {
        &self.spec
    }
}

/// Where a member of a cell comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Origin {
    pub piece: usize,
    pub b: Elem,
    pub u: Elem,
}

/// A descriptor resolved against a universe up to `radius`.
#[derive(Clone, Debug)]
pub struct ResolvedCell {
    pub label: String,
    pub kind: CellKind,
    pub radius: usize,
    pub pieces: Vec<ResolvedPiece>,
    members: BTreeMap<Elem, Origin>,
}

impl ResolvedCell {
    pub fn resolve(
        desc: &CellDescriptor,
        universe: &Universe,
        radius: usize,
    ) -> Result<Self, CellError> {
        let radius = radius.min(universe.radius());
        let mut pieces = Vec::new();
        for spec in &desc.pieces {
            let d = universe.parse(spec.d)?;
            let ld = universe.length(d);
            let u_radius = radius.saturating_sub(ld);
            let b: Vec<Elem> = match &spec.b {
                BSpec::Explicit(v) => v
                    .iter()
                    .map(|s| universe.parse(s))
                    .collect::<Result<_, _>>()?,
                BSpec::InversePrefixes(p) => {
                    let target = universe.system().parse(p)?;
                    let mut v: Vec<Elem> = universe
                        .system()
                        .duflo_prefixes(&target, universe.system().length(&target))
                        .iter()
                        .map(|m| universe.elem_of(m).map(|x| universe.inverse(x)))
                        .collect::<Result<_, _>>()?;
                    v.sort();
                    v
                }
            };
            let mut u: Vec<Elem> = match &spec.u {
                USpec::Explicit(v) => v
                    .iter()
                    .map(|s| universe.parse(s))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .filter(|&x| universe.length(x) <= u_radius)
                    .collect(),
                USpec::Duflo { ps, extra } => {
                    let mut set = BTreeSet::new();
                    for p in ps {
                        let pe = universe.parse(p)?;
                        set.extend(universe.duflo_closure(pe, u_radius)?);
                    }
                    for x in extra {
                        let xe = universe.parse(x)?;
                        if universe.length(xe) <= u_radius {
                            set.insert(xe);
                        }
                    }
                    set.into_iter().collect()
                }
                USpec::InverseOfB => b
                    .iter()
                    .map(|&x| universe.inverse(x))
                    .filter(|&x| universe.length(x) <= u_radius)
                    .collect(),
                USpec::LengthAdditive => universe
                    .ball(u_radius)
                    .filter(|&x| {
                        universe.length_of_quotient(universe.inverse(d), x)
                            == ld + universe.length(x)
                    })
                    .collect(),
            };
            u.sort();
            u.dedup();
            let u_set = u.iter().copied().collect();
            pieces.push(ResolvedPiece {
                b,
                d,
                u,
                u_set,
                u_radius,
                spec: spec.clone(),
            });
        }
        let mut members = BTreeMap::new();
        for (i, p) in pieces.iter().enumerate() {
            let ld = universe.length(p.d);
            for &b in &p.b {
                let lb = universe.length(b);
                for &u in &p.u {
                    if lb + ld + universe.length(u) > radius {
                        continue;
                    }
                    let (bd, ok1) = universe.mul_additive(b, p.d)?;
                    let (z, ok2) = universe.mul_additive(bd, u)?;
                    if !(ok1 && ok2) {
                        return Err(CellError::NotAdditive {
                            label: desc.label.clone(),
                            b: universe.format(b),
                            d: universe.format(p.d),
                            u: universe.format(u),
                        });
                    }
                    if members.insert(z, Origin { piece: i, b, u }).is_some() {
                        return Err(CellError::Overlap {
                            label: desc.label.clone(),
                            word: universe.format(z),
                        });
                    }
                }
            }
        }
        Ok(Self {
            label: desc.label.clone(),
            kind: desc.kind,
            radius,
            pieces,
            members,
        })
    }

    /// Members of length at most `radius`, in ShortLex order.
    pub fn members(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn origin(&self, z: Elem) -> Option<Origin> {
        self.members.get(&z).copied()
    }

    /// Membership for elements up to the resolved radius.
    pub fn contains(&self, universe: &Universe, z: Elem) -> Result<bool, GroupError> {
        if universe.length(z) > self.radius {
            return Err(GroupError::OutOfBall {
                word: universe.format(z),
                radius: self.radius,
            });
        }
        Ok(self.members.contains_key(&z))
    }

    /// The piece whose distinguished element is `d`.
    pub fn piece_of(&self, d: Elem) -> Option<&ResolvedPiece> {
        self.pieces.iter().find(|p| p.d == d)
    }

    /// Encoded right cell of a member: the pair `(piece, b)`.
    pub fn right_cell_key(&self, z: Elem) -> Option<(usize, Elem)> {
        self.origin(z).map(|o| (o.piece, o.b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two-sided",
        })
    }
}

/// The generating relation of a cell preorder on a ball: an edge
/// `y -> x` means `C_x` occurs in `C_s C_y` (left) or `C_y C_s` (right).
pub struct PreorderGraph {
    pub side: Side,
    /// Vertices are the elements of length at most `radius`.
    pub radius: usize,
    adj: Vec<Vec<Elem>>,
}

pub fn preorder_graph(table: &KlTable, side: Side) -> Result<PreorderGraph, KlError> {
    let u = table.universe();
    let radius = table.radius().saturating_sub(1);
    let n = u.ball_size(radius);
    let mut adj = vec![Vec::new(); n];
    for y in u.ball(radius) {
        let mut targets = BTreeSet::new();
        for s in 0..RANK as u8 {
            if matches!(side, Side::Left | Side::TwoSided) {
                targets.extend(table.left_gen_product(s, y)?.support());
            }
            if matches!(side, Side::Right | Side::TwoSided) {
                targets.extend(table.right_gen_product(y, s)?.support());
            }
        }
        adj[y.index()] = targets
            .into_iter()
            .filter(|x| x.index() < n && *x != y)
            .collect();
    }
    Ok(PreorderGraph { side, radius, adj })
}

impl PreorderGraph {
    pub fn successors(&self, y: Elem) -> &[Elem] {
        &self.adj[y.index()]
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Everything below `z` in the truncated preorder, `z` included.
    pub fn below(&self, z: Elem) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![z];
        seen[z.index()] = true;
        while let Some(y) = stack.pop() {
            for &x in &self.adj[y.index()] {
                if !seen[x.index()] {
                    seen[x.index()] = true;
                    stack.push(x);
                }
            }
        }
        seen
    }

    fn components(&self) -> Vec<Vec<Elem>> {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.adj.len(), 0);
        for _ in 0..self.adj.len() {
            g.add_node(());
        }
        for (y, xs) in self.adj.iter().enumerate() {
            for x in xs {
                g.add_edge(NodeIndex::new(y), NodeIndex::new(x.index()), ());
            }
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<Elem> = c.into_iter().map(|i| Elem(i.index() as u32)).collect();
                v.sort();
                v
            })
            .collect()
    }
}

/// Cells computed as strongly connected components, restricted to the
/// inner ball.
#[derive(Clone, Debug)]
pub struct CellPartition {
    pub side: Side,
    pub inner_radius: usize,
    /// Radius of the graph the components were computed on.
    pub graph_radius: usize,
    pub blocks: Vec<Vec<Elem>>,
    block_of: HashMap<Elem, usize>,
}

pub fn computed_cells(
    graph: &PreorderGraph,
    universe: &Universe,
    inner_radius: usize,
) -> CellPartition {
    let inner = inner_radius.min(graph.radius);
    let mut blocks: Vec<Vec<Elem>> = graph
        .components()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .filter(|&x| universe.length(x) <= inner)
                .collect::<Vec<_>>()
        })
        .filter(|c: &Vec<Elem>| !c.is_empty())
        .collect();
    blocks.sort();
    let block_of = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |&x| (x, i)))
        .collect();
    CellPartition {
        side: graph.side,
        inner_radius: inner,
        graph_radius: graph.radius,
        blocks,
        block_of,
    }
}

impl CellPartition {
    pub fn block_of(&self, x: Elem) -> Option<usize> {
        self.block_of.get(&x).copied()
    }

    pub fn same_block(&self, x: Elem, y: Elem) -> bool {
        matches!((self.block_of(x), self.block_of(y)), (Some(a), Some(b)) if a == b)
    }

    pub fn block(&self, x: Elem) -> &[Elem] {
        self.block_of(x).map_or(&[], |i| &self.blocks[i])
    }
}

/// Outcome of comparing computed cells with the encoded tables.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionComparison {
    pub side: Side,
    pub pass: bool,
    pub elements: usize,
    pub computed_blocks: usize,
    pub encoded_blocks: usize,
    pub witnesses: Vec<String>,
}

/// Checks that the encoded cells tile the inner ball and that the computed
/// blocks of `computed` are exactly the encoded cells (two-sided), the sets
/// `b d U_d` (right) or their inverses (left).
pub fn compare_partitions(
    computed: &CellPartition,
    encoded: &[ResolvedCell],
    universe: &Universe,
) -> PartitionComparison {
    let inner = computed.inner_radius;
    let mut witnesses = Vec::new();
    let mut key: HashMap<Elem, String> = HashMap::new();
    for cell in encoded {
        for z in cell.members().filter(|&z| universe.length(z) <= inner) {
            let (x, k) = match computed.side {
                Side::TwoSided => (z, cell.label.clone()),
                Side::Right => {
                    let (p, b) = cell.right_cell_key(z).expect("member");
                    (z, format!("{}/{}/{}", cell.label, p, universe.format(b)))
                }
                Side::Left => {
                    let (p, b) = cell.right_cell_key(z).expect("member");
                    (
                        universe.inverse(z),
                        format!("{}/{}/{}", cell.label, p, universe.format(b)),
                    )
                }
            };
            if universe.length(x) > inner {
                continue;
            }
            if let Some(prev) = key.insert(x, k.clone()) {
                witnesses.push(format!(
                    "{} is encoded in both {prev} and {k}",
                    universe.format(x)
                ));
            }
        }
    }
    for x in universe.ball(inner) {
        if !key.contains_key(&x) {
            witnesses.push(format!("{} is in no encoded cell", universe.format(x)));
        }
    }
    let mut labels_of_block: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut blocks_of_label: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for x in universe.ball(inner) {
        let (Some(k), Some(b)) = (key.get(&x), computed.block_of(x)) else {
            continue;
        };
        labels_of_block.entry(b).or_default().insert(k.clone());
        blocks_of_label.entry(k.clone()).or_default().insert(b);
    }
    for (b, labels) in &labels_of_block {
        if labels.len() > 1 {
            let first = computed.blocks[*b][0];
            witnesses.push(format!(
                "computed {} cell of {} meets encoded cells {}",
                computed.side,
                universe.format(first),
                labels.iter().cloned().collect::<Vec<_>>().join(", ")
            ));
        }
    }
    for (label, blocks) in &blocks_of_label {
        if blocks.len() > 1 {
            let reps: Vec<String> = blocks
                .iter()
                .map(|&b| universe.format(computed.blocks[b][0]))
                .collect();
            witnesses.push(format!(
                "encoded {label} splits into computed cells of {}",
                reps.join(", ")
            ));
        }
    }
    PartitionComparison {
        side: computed.side,
        pass: witnesses.is_empty(),
        elements: universe.ball_size(inner),
        computed_blocks: computed.blocks.len(),
        encoded_blocks: blocks_of_label.len(),
        witnesses,
    }
}

/// Compares computed left, right and two-sided cells on the ball of radius
/// `inner` with the cells resolved from `descs`. A descriptor that does not
/// resolve fails every comparison.
pub fn cross_check(
    table: &KlTable,
    descs: &[CellDescriptor],
    inner: usize,
) -> Result<Vec<Report>, KlError> {
    let u = table.universe();
    let encoded: Result<Vec<ResolvedCell>, CellError> = descs
        .iter()
        .map(|d| ResolvedCell::resolve(d, u, inner))
        .collect();
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right, Side::TwoSided] {
        let g = preorder_graph(table, side)?;
        let part = computed_cells(&g, u, inner);
        let mut r = Report::new(
            format!("cells:{side}"),
            format!("l <= {}", part.inner_radius),
            table.weights(),
            table.radius(),
        );
        match &encoded {
            Ok(cells) => {
                let cmp = compare_partitions(&part, cells, u);
                r.count = cmp.elements;
                r.caveat(format!(
                    "{} computed blocks, {} encoded blocks",
                    cmp.computed_blocks, cmp.encoded_blocks
                ));
                for w in cmp.witnesses {
                    r.fail(w);
                }
            }
            Err(e) => r.fail(e.to_string()),
        }
        out.push(r.finish());
    }
    Ok(out)
}

/// Resolves every cell listed for the table's weights up to `radius`.
pub fn resolve_region(table: &KlTable, radius: usize) -> Result<Vec<ResolvedCell>, CellError> {
    region_descriptors(&table.weights())
        .iter()
        .map(|d| ResolvedCell::resolve(d, table.universe(), radius))
        .collect()
}

/// Representative weights for each region of the cell tables, keyed by the
/// label of the generic cell that defines the region.
pub fn region_manifest(ty: GroupType) -> Vec<(&'static str, Weights)> {
    let raw: &[(&str, [Exponent; 3])] = match ty {
        GroupType::C2 => &[
            ("C2:1:i", [5, 1, 2]),
            ("C2:1:ii", [3, 2, 1]),
            ("C2:1:iii", [4, 3, 2]),
            ("C2:1:iv", [1, 3, 1]),
            ("C2:1:v", [4, 1, 2]),
            ("C2:1:vi", [3, 1, 2]),
            ("C2:1:vii", [2, 3, 1]),
            ("C2:2:i", [2, 3, 2]),
            ("C2:2:ii", [2, 3, 1]),
            ("C2:2:iii", [3, 2, 1]),
            ("C2:2:iv", [4, 2, 1]),
            ("C2:2:v", [5, 4, 2]),
            ("C2:2:vi", [3, 1, 2]),
            ("C2:3:i", [4, 1, 2]),
            ("C2:3:ii", [2, 3, 1]),
            ("C2:3:iii", [3, 1, 2]),
            ("C2:3:iv", [3, 2, 1]),
            ("C2:3:v", [2, 1, 2]),
            ("C2:3:vi", [1, 2, 1]),
            ("C2:4:i", [1, 1, 1]),
            ("C2:4:ii", [2, 1, 1]),
            ("C2:4:iii", [2, 2, 1]),
        ],
        GroupType::G2 => &[
            ("G2:1:i", [2, 1, 0]),
            ("G2:1:ii", [4, 3, 0]),
            ("G2:1:iii", [3, 1, 0]),
            ("G2:1:iv", [3, 2, 0]),
            ("G2:1:v", [7, 4, 0]),
            ("G2:1:vi", [1, 2, 0]),
            ("G2:2:i", [3, 2, 0]),
            ("G2:2:ii", [2, 1, 0]),
            ("G2:3:i", [2, 1, 0]),
            ("G2:3:ii", [1, 2, 0]),
            ("G2:3:iii", [1, 1, 0]),
            ("G2:3:iv", [2, 1, 0]),
        ],
    };
    raw.iter()
        .map(|&(label, [a, b, c])| {
            let w = match ty {
                GroupType::C2 => Weights::c2(a, b, c),
                GroupType::G2 => Weights::g2(a, b),
            };
            (label, w.expect("manifest weights are valid"))
        })
        .collect()
}

/// Weights for a region label from [`region_manifest`].
pub fn manifest_weights(label: &str) -> Option<Weights> {
    [GroupType::C2, GroupType::G2]
        .into_iter()
        .flat_map(region_manifest)
        .find(|(l, _)| *l == label)
        .map(|(_, w)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(w: &Weights) -> Vec<String> {
        region_descriptors(w).into_iter().map(|d| d.label).collect()
    }

    #[test]
    fn region_lookup_examples() {
        let l = labels(&Weights::c2(5, 1, 2).unwrap());
        assert!(l.contains(&"C2:1:i".to_string()));
        let l = labels(&Weights::c2(1, 1, 1).unwrap());
        assert_eq!(l, ["C2:e", "C2:1:iii", "C2:4:i", "C2:6:ii"]);
        let l = labels(&Weights::g2(3, 1).unwrap());
        assert!(l.contains(&"G2:1:i".to_string()) && l.contains(&"G2:1:iii".to_string()));
        assert_eq!(labels(&Weights::g2(1, 1).unwrap()).len(), 5);
    }

    #[test]
    fn members_of_small_cells() {
        let u = Universe::new(GroupType::C2, 10);
        let w = Weights::c2(3, 1, 2).unwrap();
        let d = find_descriptor(&w, "C2:5:212").unwrap_err();
        assert!(matches!(d, CellError::UnknownCell(_)));
        let d = find_descriptor(&Weights::c2(3, 2, 2).unwrap(), "C2:5:212").unwrap();
        let c = ResolvedCell::resolve(&d, &u, 10).unwrap();
        assert_eq!(
            c.members().map(|z| u.format(z)).collect::<Vec<_>>(),
            ["212"]
        );
        let d = find_descriptor(&Weights::c2(5, 1, 2).unwrap(), "C2:1:i").unwrap();
        let c = ResolvedCell::resolve(&d, &u, 10).unwrap();
        let p = &c.pieces[0];
        let expected: usize =
            p.b.iter()
                .map(|&b| {
                    p.u.iter()
                        .filter(|&&x| u.length(b) + 2 + u.length(x) <= 10)
                        .count()
                })
                .sum();
        assert_eq!(c.len(), expected);
        assert!(c.contains(&u, u.parse("1021012").unwrap()).unwrap());
    }

    #[test]
    fn lowest_cell_b_sets() {
        let u = Universe::new(GroupType::C2, 12);
        let d = find_descriptor(&Weights::c2(5, 1, 2).unwrap(), "C2:6:i").unwrap();
        let c = ResolvedCell::resolve(&d, &u, 12).unwrap();
        assert_eq!(c.pieces[0].b.len(), 8);
        assert!(c.contains(&u, u.parse("12120").unwrap()).unwrap());
        let g = Universe::new(GroupType::G2, 12);
        let d = find_descriptor(&Weights::g2(2, 1).unwrap(), "G2:5").unwrap();
        let c = ResolvedCell::resolve(&d, &g, 12).unwrap();
        assert_eq!(c.pieces[0].b.len(), 12);
    }

    #[test]
    fn identity_is_a_singleton_cell() {
        let t = KlTable::new(Weights::c2(2, 1, 1).unwrap(), 8).unwrap();
        let g = preorder_graph(&t, Side::TwoSided).unwrap();
        let p = computed_cells(&g, t.universe(), 4);
        assert_eq!(p.block(Elem::IDENTITY), &[Elem::IDENTITY]);
        for s in 0..3u8 {
            let x = t.universe().from_word(&[s]).unwrap();
            assert!(g.below(Elem::IDENTITY)[x.index()]);
        }
    }

    #[test]
    fn manifest_weights_lie_in_their_regions() {
        for ty in [GroupType::C2, GroupType::G2] {
            for (label, w) in region_manifest(ty) {
                assert!(find_descriptor(&w, label).is_ok(), "{label} {w}");
            }
        }
        assert_eq!(manifest_weights("C2:4:i"), Weights::c2(1, 1, 1).ok());
        assert!(manifest_weights("C2:9:x").is_none());
    }
}
