//! Bounded checks of Lusztig's properties P1-P15 (and the weak form P8')
//! on a ball, the hypotheses they are reduced to, and the bimodule
//! structure on a two-sided cell.
//!
//! Every verdict is about the inspected ball only. A-values are the
//! empirical ones of [`AValues`]; instances that need an a-value which did
//! not stabilise are skipped and listed as caveats.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cells::{
    computed_cells, preorder_graph, resolve_region, CellPartition, PreorderGraph, ResolvedCell,
    Side,
};
use crate::coxeter::{Elem, GenSet, Universe, RANK};
use crate::hecke::{CElt, HeckeAlgebra};
use crate::klbasis::{AValues, Construction, KlError, KlTable};
use crate::laurent::{Exponent, LaurentPoly};
use crate::report::{Report, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjectureError {
    #[error("property checks at radius {radius} need a table of radius {need}, have {have}")]
    TableTooSmall {
        radius: usize,
        need: usize,
        have: usize,
    },
    #[error(transparent)]
    Kl(#[from] KlError),
}

/// Slack kept between the inner ball of computed cells and the graph.
pub const CELL_SLACK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Conjecture {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P8Weak,
    P9,
    P10,
    P11,
    P12,
    P13,
    P14,
    P15,
}

impl Conjecture {
    pub const ALL: [Conjecture; 16] = [
        Conjecture::P1,
        Conjecture::P2,
        Conjecture::P3,
        Conjecture::P4,
        Conjecture::P5,
        Conjecture::P6,
        Conjecture::P7,
        Conjecture::P8,
        Conjecture::P8Weak,
        Conjecture::P9,
        Conjecture::P10,
        Conjecture::P11,
        Conjecture::P12,
        Conjecture::P13,
        Conjecture::P14,
        Conjecture::P15,
    ];
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjecture::P8Weak => f.write_str("P8'"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for Conjecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase().replace('′', "'");
        Conjecture::ALL
            .into_iter()
            .find(|c| c.to_string() == t)
            .ok_or_else(|| format!("unknown property {s:?} (expected P1..P15 or P8')"))
    }
}

/// `A (x) A` as a map from exponent pairs to integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorPoly(BTreeMap<(Exponent, Exponent), i64>);

impl TensorPoly {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds `a (x) b`.
    pub fn add_product(&mut self, a: &LaurentPoly, b: &LaurentPoly) {
        for &(i, x) in a.terms() {
            for &(j, y) in b.terms() {
                let slot = self.0.entry((i, j)).or_insert(0);
                *slot = slot
                    .checked_add(x.checked_mul(y).expect("coefficient overflow"))
                    .expect("coefficient overflow");
                if *slot == 0 {
                    self.0.remove(&(i, j));
                }
            }
        }
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|((i, j), c)| format!("{c}*q^{i}(x)q^{j}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// An element of the free `A (x) A`-module on a cell.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BimoduleElt(BTreeMap<Elem, TensorPoly>);

impl BimoduleElt {
    fn add(&mut self, z: Elem, a: &LaurentPoly, b: &LaurentPoly) {
        let t = self.0.entry(z).or_default();
        t.add_product(a, b);
        if t.is_zero() {
            self.0.remove(&z);
        }
    }

    pub fn render(&self, u: &Universe) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.0
            .iter()
            .map(|(z, t)| format!("({t})E[{}]", u.format(*z)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Data shared by all property checks on one table: a-values, the three
/// preorders and their cells, and the nonzero `gamma_{x,y,z}` with `x, y` in
/// the ball.
pub struct ConjectureContext<'a> {
    table: &'a KlTable,
    radius: usize,
    avalues: AValues,
    graphs: [PreorderGraph; 3],
    cells: [CellPartition; 3],
    below: [Vec<Vec<bool>>; 3],
    gammas: HashMap<(Elem, Elem, Elem), i64>,
    /// Elements whose a-value was needed for a gamma but did not stabilise.
    unstable: BTreeSet<Elem>,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::TwoSided => 2,
    }
}

/// Smallest table radius [`ConjectureContext::new`] accepts for `radius`.
pub fn required_table_radius(radius: usize) -> usize {
    2 * (radius + 2)
}

impl<'a> ConjectureContext<'a> {
    /// Checks cover elements of length at most `radius`; the table must
    /// reach [`required_table_radius`].
    pub fn new(table: &'a KlTable, radius: usize) -> Result<Self, ConjectureError> {
        let need = required_table_radius(radius);
        if table.radius() < need {
            return Err(ConjectureError::TableTooSmall {
                radius,
                need,
                have: table.radius(),
            });
        }
        let u = table.universe();
        let avalues = AValues::compute(table, radius)?;
        let graphs = [
            preorder_graph(table, Side::Left)?,
            preorder_graph(table, Side::Right)?,
            preorder_graph(table, Side::TwoSided)?,
        ];
        let inner = radius.max(graphs[0].radius.saturating_sub(CELL_SLACK));
        let cells = [
            computed_cells(&graphs[0], u, inner),
            computed_cells(&graphs[1], u, inner),
            computed_cells(&graphs[2], u, inner),
        ];
        let below = [0, 1, 2].map(|i| u.ball(radius).map(|z| graphs[i].below(z)).collect());
        let xs: Vec<Elem> = u.ball(radius).collect();
        let parts: Vec<(Vec<((Elem, Elem, Elem), i64)>, Vec<Elem>)> = xs
            .par_iter()
            .map(|&x| -> Result<_, KlError> {
                let mut found = Vec::new();
                let mut bad = Vec::new();
                let mut m = table.right_multiplier(CElt::basis(x));
                for y in u.ball(radius) {
                    for (w, p) in m.times(y)?.iter() {
                        match avalues.stable(w) {
                            Some(a) => {
                                let g = p.coeff(a);
                                if g != 0 {
                                    found.push(((x, y, u.inverse(w)), g));
                                }
                            }
                            None => bad.push(w),
                        }
                    }
                }
                Ok((found, bad))
            })
            .collect::<Result<_, _>>()?;
        let mut gammas = HashMap::new();
        let mut unstable = BTreeSet::new();
        for (found, bad) in parts {
            gammas.extend(found);
            unstable.extend(bad);
        }
        Ok(Self {
            table,
            radius,
            avalues,
            graphs,
            cells,
            below,
            gammas,
            unstable,
        })
    }

    pub fn table(&self) -> &'a KlTable {
        self.table
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn avalues(&self) -> &AValues {
        &self.avalues
    }

    pub fn cells(&self, side: Side) -> &CellPartition {
        &self.cells[side_index(side)]
    }

    fn universe(&self) -> &'a Universe {
        self.table.universe()
    }

    fn name(&self, z: Elem) -> String {
        self.universe().format(z)
    }

    fn ball(&self) -> impl Iterator<Item = Elem> + '_ {
        self.universe().ball(self.radius)
    }

    /// `gamma_{x,y,z}` for `x, y` in the ball, `None` when `a(z)` is unknown.
    pub fn gamma(&self, x: Elem, y: Elem, z: Elem) -> Option<i64> {
        let u = self.universe();
        if u.length(x) > self.radius || u.length(y) > self.radius {
            return None;
        }
        if let Some(&g) = self.gammas.get(&(x, y, z)) {
            return Some(g);
        }
        let w = u.inverse(z);
        (!self.unstable.contains(&w)).then_some(0)
    }

    /// Whether `z` is a distinguished involution, if its a-value is known.
    pub fn is_distinguished(&self, z: Elem) -> Option<bool> {
        let a = self.avalues.stable(z)?;
        let (delta, _) = self.table.delta_n(z).ok()?;
        Some(a == delta)
    }

    /// Distinguished involutions of the ball.
    pub fn distinguished(&self) -> Vec<Elem> {
        self.ball()
            .filter(|&z| self.is_distinguished(z) == Some(true))
            .collect()
    }

    /// `x ~ y` for the given side: decided by the computed cells inside the
    /// inner ball, otherwise proved by mutual reachability, otherwise unknown.
    pub fn equivalent(&self, side: Side, x: Elem, y: Elem) -> Option<bool> {
        let i = side_index(side);
        let cells = &self.cells[i];
        if cells.block_of(x).is_some() && cells.block_of(y).is_some() {
            return Some(cells.same_block(x, y));
        }
        let g = &self.graphs[i];
        if x.index() >= g.len() || y.index() >= g.len() {
            return None;
        }
        (g.below(x)[y.index()] && g.below(y)[x.index()]).then_some(true)
    }

    /// `z' <= z` when a chain is witnessed inside the graph, else unknown.
    pub fn leq(&self, side: Side, lower: Elem, upper: Elem) -> Option<bool> {
        let i = side_index(side);
        let set = self.below[i].get(upper.index())?;
        set.get(lower.index()).copied().filter(|&b| b)
    }

    fn report(&self, c: Conjecture) -> Report {
        let mut r = Report::new(
            c.to_string(),
            format!("l <= {}", self.radius),
            self.table.weights(),
            self.table.radius(),
        );
        r.caveat(format!(
            "bounded: elements of length <= {}, a-values from products of length <= {} (no counterexample found is not a proof)",
            self.radius,
            self.avalues.search_radius()
        ));
        r
    }

    fn unknowns(&self, r: &mut Report, n: usize, what: &str) {
        if n > 0 {
            r.caveat(format!("{n} instances {what}, left unchecked"));
        }
    }
}

fn close(mut r: Report, unknown: usize) -> Report {
    if r.count == 0 && r.failures == 0 && unknown > 0 {
        r.status = Status::Unknown;
        return r;
    }
    r.finish()
}

/// Runs one property check.
pub fn check_p(c: Conjecture, ctx: &ConjectureContext) -> Report {
    match c {
        Conjecture::P1 => p1(ctx),
        Conjecture::P2 => p2(ctx),
        Conjecture::P3 => p3(ctx),
        Conjecture::P4 => order_vs_a(ctx, c, Side::TwoSided),
        Conjecture::P5 => p5(ctx),
        Conjecture::P6 => p6(ctx),
        Conjecture::P7 => p7(ctx),
        Conjecture::P8 => p8(ctx, false),
        Conjecture::P8Weak => p8(ctx, true),
        Conjecture::P9 => order_vs_a(ctx, c, Side::Left),
        Conjecture::P10 => order_vs_a(ctx, c, Side::Right),
        Conjecture::P11 => order_vs_a(ctx, c, Side::TwoSided),
        Conjecture::P12 => p12(ctx),
        Conjecture::P13 => p13(ctx),
        Conjecture::P14 => p14(ctx),
        Conjecture::P15 => p15(ctx, 3, 2),
    }
}

pub fn check_all(ctx: &ConjectureContext, set: &[Conjecture]) -> Vec<Report> {
    set.par_iter().map(|&c| check_p(c, ctx)).collect()
}

fn p1(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P1);
    let mut unknown = 0;
    for z in ctx.ball() {
        let Some(a) = ctx.avalues.stable(z) else {
            unknown += 1;
            continue;
        };
        let (delta, _) = ctx.table.delta_n(z).expect("in table");
        r.check(a <= delta, || {
            format!("a({}) = {a} > Delta = {delta}", ctx.name(z))
        });
    }
    ctx.unknowns(&mut r, unknown, "with unstable a-value");
    close(r, unknown)
}

fn p2(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P2);
    let u = ctx.universe();
    let dset: BTreeSet<Elem> = ctx.distinguished().into_iter().collect();
    let mut hits: Vec<_> = ctx
        .gammas
        .iter()
        .filter(|((_, _, q), _)| dset.contains(q))
        .collect();
    hits.sort();
    for ((x, y, q), g) in hits {
        r.check(*x == u.inverse(*y), || {
            format!(
                "gamma({},{},{}) = {g} with x != y^-1",
                ctx.name(*x),
                ctx.name(*y),
                ctx.name(*q)
            )
        });
    }
    if r.count == 0 {
        r.caveat("no nonzero gamma_{x,y,q} in the ball");
        r.pass_one();
    }
    r.finish()
}

/// The distinguished `q` with `gamma_{y^-1,y,q} != 0`, split into known and
/// undecided candidates.
fn d_partners(ctx: &ConjectureContext, y: Elem) -> (Vec<(Elem, i64)>, usize) {
    let u = ctx.universe();
    let yi = u.inverse(y);
    let prod = ctx.table.c_product(yi, y).expect("in table");
    let mut known = Vec::new();
    let mut open = 0;
    for (w, _) in prod.iter() {
        let q = u.inverse(w);
        match (ctx.gamma(yi, y, q), ctx.is_distinguished(q)) {
            (Some(0), _) | (_, Some(false)) => {}
            (Some(g), Some(true)) => known.push((q, g)),
            _ => open += 1,
        }
    }
    (known, open)
}

fn p3(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P3);
    let mut unknown = 0;
    for y in ctx.ball() {
        let (known, open) = d_partners(ctx, y);
        if known.len() == 1 && open == 0 {
            r.pass_one();
        } else if known.len() + open == 0 || known.len() > 1 {
            r.check(false, || {
                let qs: Vec<String> = known.iter().map(|(q, _)| ctx.name(*q)).collect();
                format!(
                    "y = {}: distinguished partners [{}]",
                    ctx.name(y),
                    qs.join(", ")
                )
            });
        } else {
            unknown += 1;
        }
    }
    ctx.unknowns(&mut r, unknown, "with undecided candidates");
    close(r, unknown)
}

fn p5(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P5);
    for y in ctx.ball() {
        for (q, g) in d_partners(ctx, y).0 {
            let (_, n) = ctx.table.delta_n(q).expect("in table");
            r.check(g == n && (n == 1 || n == -1), || {
                format!(
                    "gamma({}^-1,{},{}) = {g}, n = {n}",
                    ctx.name(y),
                    ctx.name(y),
                    ctx.name(q)
                )
            });
        }
    }
    r.finish()
}

fn p6(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P6);
    let u = ctx.universe();
    for q in ctx.distinguished() {
        r.check(u.inverse(q) == q, || {
            format!("{} is distinguished but not an involution", ctx.name(q))
        });
    }
    r.finish()
}

fn p7(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P7);
    let u = ctx.universe();
    let mut unknown = 0;
    let mut entries: Vec<_> = ctx
        .gammas
        .iter()
        .filter(|((_, _, z), _)| u.length(*z) <= ctx.radius)
        .collect();
    entries.sort();
    for ((x, y, z), g) in entries {
        match ctx.gamma(*y, *z, *x) {
            Some(h) => r.check(h == *g, || {
                format!(
                    "gamma({},{},{}) = {g} but gamma({},{},{}) = {h}",
                    ctx.name(*x),
                    ctx.name(*y),
                    ctx.name(*z),
                    ctx.name(*y),
                    ctx.name(*z),
                    ctx.name(*x)
                )
            }),
            None => unknown += 1,
        }
    }
    ctx.unknowns(&mut r, unknown, "with unstable a-value");
    close(r, unknown)
}

fn p8(ctx: &ConjectureContext, weak: bool) -> Report {
    let c = if weak {
        Conjecture::P8Weak
    } else {
        Conjecture::P8
    };
    let mut r = ctx.report(c);
    let u = ctx.universe();
    let mut unknown = 0;
    let mut entries: Vec<_> = ctx.gammas.iter().collect();
    entries.sort();
    for ((x, y, z), g) in entries {
        let mut pairs = vec![(*y, u.inverse(*z))];
        if !weak {
            pairs.push((*x, u.inverse(*y)));
            pairs.push((*z, u.inverse(*x)));
        }
        for (p, q) in pairs {
            match ctx.equivalent(Side::Left, p, q) {
                Some(ok) => r.check(ok, || {
                    format!(
                        "gamma({},{},{}) = {g} but {} and {} are in different left cells",
                        ctx.name(*x),
                        ctx.name(*y),
                        ctx.name(*z),
                        ctx.name(p),
                        ctx.name(q)
                    )
                }),
                None => unknown += 1,
            }
        }
    }
    ctx.unknowns(&mut r, unknown, "outside the computed cells");
    close(r, unknown)
}

/// P4 (a-values weakly increase going down) and P9-P11 (equal a-values
/// along the order force equivalence).
fn order_vs_a(ctx: &ConjectureContext, c: Conjecture, side: Side) -> Report {
    let mut r = ctx.report(c);
    let mut unknown = 0;
    let mut unordered = 0;
    let zs: Vec<Elem> = ctx.ball().collect();
    for &z in &zs {
        for &zp in &zs {
            if zp == z {
                continue;
            }
            if ctx.leq(side, zp, z).is_none() {
                unordered += 1;
                continue;
            }
            let (Some(a), Some(ap)) = (ctx.avalues.stable(z), ctx.avalues.stable(zp)) else {
                unknown += 1;
                continue;
            };
            if c == Conjecture::P4 {
                r.check(ap >= a, || {
                    format!("{} <=_LR {} but a = {ap} < {a}", ctx.name(zp), ctx.name(z))
                });
            } else if ap == a {
                match ctx.equivalent(side, zp, z) {
                    Some(ok) => r.check(ok, || {
                        format!(
                            "{} <= {} ({side}) with equal a = {a} but not equivalent",
                            ctx.name(zp),
                            ctx.name(z)
                        )
                    }),
                    None => unknown += 1,
                }
            } else {
                r.pass_one();
            }
        }
    }
    if unordered > 0 {
        r.caveat(format!(
            "{unordered} pairs with no chain inside the ball are UNKNOWN"
        ));
    }
    ctx.unknowns(&mut r, unknown, "with unstable a-value or undecided cells");
    close(r, unknown)
}

/// Proper parabolic subsets of the generators.
fn proper_subsets() -> Vec<GenSet> {
    (1u8..(1 << RANK) - 1)
        .map(|m| {
            GenSet::from_gens(
                &(0..RANK as u8)
                    .filter(|s| m & (1 << s) != 0)
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

/// a-values inside the finite parabolic subgroup on `gens`, computed in its
/// own Hecke algebra by exhausting all products.
pub fn parabolic_avalues(
    table: &KlTable,
    gens: GenSet,
) -> Result<Vec<(String, Exponent)>, KlError> {
    let ty = table.universe().group_type();
    let longest = table.universe().parabolic_longest(gens)?;
    let len = table.universe().length(longest);
    let sub = Arc::new(Universe::parabolic(ty, gens, len + 1));
    let algebra = Arc::new(HeckeAlgebra::new(sub.clone(), table.weights())?);
    let t = KlTable::build(algebra, len + 1, Construction::Recursive)?;
    let mut best: Vec<Option<Exponent>> = vec![None; sub.len()];
    for x in sub.elements() {
        let mut m = t.right_multiplier(CElt::basis(x));
        for y in sub.elements() {
            for (z, p) in m.times(y)?.iter() {
                let d = p.degree().finite().expect("nonzero");
                let slot = &mut best[z.index()];
                *slot = Some(slot.map_or(d, |b| b.max(d)));
            }
        }
    }
    Ok(sub
        .elements()
        .map(|z| (sub.format(z), best[z.index()].expect("z = z e")))
        .collect())
}

fn p12(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P12);
    let u = ctx.universe();
    let mut unknown = 0;
    for gens in proper_subsets() {
        let values = match parabolic_avalues(ctx.table, gens) {
            Ok(v) => v,
            Err(e) => {
                r.fail(format!("parabolic {gens}: {e}"));
                continue;
            }
        };
        for (word, a_sub) in values {
            let z = u.parse(&word).expect("parabolic element in ball");
            if u.length(z) > ctx.radius {
                continue;
            }
            match ctx.avalues.stable(z) {
                Some(a) => r.check(a == a_sub, || {
                    format!("{word}: a = {a} in W, {a_sub} in W_{gens}")
                }),
                None => unknown += 1,
            }
        }
    }
    ctx.unknowns(&mut r, unknown, "with unstable a-value");
    close(r, unknown)
}

fn p13(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P13);
    let u = ctx.universe();
    let mut unknown = 0;
    let dset = ctx.distinguished();
    for side in [Side::Left, Side::Right] {
        let cells = ctx.cells(side);
        for block in &cells.blocks {
            let ds: Vec<Elem> = block.iter().copied().filter(|z| dset.contains(z)).collect();
            r.check(ds.len() <= 1, || {
                let names: Vec<String> = ds.iter().map(|&z| ctx.name(z)).collect();
                format!(
                    "{side} cell of {} holds distinguished [{}]",
                    ctx.name(block[0]),
                    names.join(", ")
                )
            });
        }
        for y in ctx.ball() {
            // the partner for a right cell comes from gamma_{y,y^-1,q}
            let probe = if side == Side::Left { y } else { u.inverse(y) };
            let (known, open) = d_partners(ctx, probe);
            if known.len() != 1 || open > 0 {
                unknown += 1;
                continue;
            }
            let q = known[0].0;
            match ctx.equivalent(side, q, y) {
                Some(ok) => r.check(ok, || {
                    format!(
                        "{side} cell of {} does not contain its partner {}",
                        ctx.name(y),
                        ctx.name(q)
                    )
                }),
                None => unknown += 1,
            }
        }
    }
    ctx.unknowns(
        &mut r,
        unknown,
        "without a unique partner or outside the computed cells",
    );
    close(r, unknown)
}

fn p14(ctx: &ConjectureContext) -> Report {
    let mut r = ctx.report(Conjecture::P14);
    let u = ctx.universe();
    let mut unknown = 0;
    for z in ctx.ball() {
        match ctx.equivalent(Side::TwoSided, z, u.inverse(z)) {
            Some(ok) => r.check(ok, || {
                format!(
                    "{} and its inverse are in different two-sided cells",
                    ctx.name(z)
                )
            }),
            None => unknown += 1,
        }
    }
    ctx.unknowns(&mut r, unknown, "outside the computed cells");
    close(r, unknown)
}

/// Memoised `C_x C_y`.
struct Products<'t> {
    table: &'t KlTable,
    memo: HashMap<(Elem, Elem), CElt>,
}

impl<'t> Products<'t> {
    fn new(table: &'t KlTable) -> Self {
        Self {
            table,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, x: Elem, y: Elem) -> Result<&CElt, KlError> {
        if !self.memo.contains_key(&(x, y)) {
            let p = self.table.c_product(x, y)?;
            self.memo.insert((x, y), p);
        }
        Ok(&self.memo[&(x, y)])
    }
}

/// P15 on `x ~_LR y` with `l(x), l(y) <= xy_len` and `w, w'` of length at
/// most `w_len`. A sample is used only when every product stays in the table.
pub fn p15(ctx: &ConjectureContext, xy_len: usize, w_len: usize) -> Report {
    let mut r = ctx.report(Conjecture::P15);
    let u = ctx.universe();
    let table = ctx.table;
    let xy_len = xy_len.min(ctx.radius);
    let mut pairs = Vec::new();
    let mut unknown = 0;
    for x in u.ball(xy_len) {
        for y in u.ball(xy_len) {
            match ctx.equivalent(Side::TwoSided, x, y) {
                Some(true) => pairs.push((x, y)),
                Some(false) => {}
                None => unknown += 1,
            }
        }
    }
    let ws: Vec<Elem> = u.ball(w_len).collect();
    let outcomes: Vec<Result<Vec<String>, KlError>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let mut prod = Products::new(table);
            let mut bad = Vec::new();
            for &w in &ws {
                for &wp in &ws {
                    if u.length(w) + u.length(x) + u.length(wp) > table.radius() {
                        continue;
                    }
                    let mut lhs = TensorPoly::default();
                    let first: Vec<(Elem, LaurentPoly)> = prod
                        .get(x, wp)?
                        .iter()
                        .map(|(z, p)| (z, p.clone()))
                        .collect();
                    for (z, h1) in first {
                        let h2 = prod.get(w, z)?.coeff(y);
                        lhs.add_product(&h1, &h2);
                    }
                    let mut rhs = TensorPoly::default();
                    let first: Vec<(Elem, LaurentPoly)> = prod
                        .get(w, x)?
                        .iter()
                        .map(|(z, p)| (z, p.clone()))
                        .collect();
                    for (z, h2) in first {
                        let h1 = prod.get(z, wp)?.coeff(y);
                        rhs.add_product(&h1, &h2);
                    }
                    if lhs != rhs {
                        bad.push(format!(
                            "x={} y={} w={} w'={}: {lhs} != {rhs}",
                            u.format(x),
                            u.format(y),
                            u.format(w),
                            u.format(wp)
                        ));
                    } else {
                        bad.push(String::new());
                    }
                }
            }
            Ok(bad)
        })
        .collect();
    for o in outcomes {
        match o {
            Ok(lines) => {
                for l in lines {
                    r.check(l.is_empty(), || l.clone());
                }
            }
            Err(e) => r.fail(e.to_string()),
        }
    }
    r.scope = format!("x ~LR y, l(x),l(y) <= {xy_len}, l(w),l(w') <= {w_len}");
    ctx.unknowns(&mut r, unknown, "pairs outside the computed cells");
    r.finish()
}

/// `(C_x E_w) C_y = C_x (E_w C_y)` in the module on `cell`, for
/// `l(x), l(y) <= xy_len` and `w` in the cell with `l(w) <= w_len`.
pub fn bimodule_commutes(
    table: &KlTable,
    cell: &ResolvedCell,
    xy_len: usize,
    w_len: usize,
) -> Report {
    let u = table.universe();
    let mut r = Report::new(
        "bimodule",
        cell.label.clone(),
        table.weights(),
        table.radius(),
    );
    // products of these lengths stay where membership is known
    let reach = cell.radius.min(table.radius());
    let ws: Vec<Elem> = cell.members().filter(|&w| u.length(w) <= w_len).collect();
    let xs: Vec<Elem> = u.ball(xy_len).collect();
    let member = |z: Elem| cell.contains(u, z).unwrap_or(false);
    let mut skipped = 0;
    let jobs: Vec<(Elem, Elem)> = ws
        .iter()
        .flat_map(|&w| xs.iter().map(move |&x| (w, x)))
        .collect();
    let results: Vec<Result<Vec<Option<String>>, KlError>> = jobs
        .par_iter()
        .map(|&(w, x)| {
            let mut prod = Products::new(table);
            let mut out = Vec::new();
            for &y in &xs {
                if u.length(x) + u.length(w) + u.length(y) > reach {
                    out.push(None);
                    continue;
                }
                let mut left = BimoduleElt::default();
                let xw: Vec<(Elem, LaurentPoly)> = prod
                    .get(x, w)?
                    .iter()
                    .filter(|(z, _)| member(*z))
                    .map(|(z, p)| (z, p.clone()))
                    .collect();
                for (z, h1) in xw {
                    let zy: Vec<(Elem, LaurentPoly)> = prod
                        .get(z, y)?
                        .iter()
                        .filter(|(z2, _)| member(*z2))
                        .map(|(z2, p)| (z2, p.clone()))
                        .collect();
                    for (z2, h2) in zy {
                        left.add(z2, &h1, &h2);
                    }
                }
                let mut right = BimoduleElt::default();
                let wy: Vec<(Elem, LaurentPoly)> = prod
                    .get(w, y)?
                    .iter()
                    .filter(|(z, _)| member(*z))
                    .map(|(z, p)| (z, p.clone()))
                    .collect();
                for (z, h2) in wy {
                    let xz: Vec<(Elem, LaurentPoly)> = prod
                        .get(x, z)?
                        .iter()
                        .filter(|(z2, _)| member(*z2))
                        .map(|(z2, p)| (z2, p.clone()))
                        .collect();
                    for (z2, h1) in xz {
                        right.add(z2, &h1, &h2);
                    }
                }
                out.push(Some(if left == right {
                    String::new()
                } else {
                    format!(
                        "x={} w={} y={}: (C_x E_w) C_y = {} but C_x (E_w C_y) = {}",
                        u.format(x),
                        u.format(w),
                        u.format(y),
                        left.render(u),
                        right.render(u)
                    )
                }));
            }
            Ok(out)
        })
        .collect();
    for res in results {
        match res {
            Ok(lines) => {
                for l in lines {
                    match l {
                        Some(l) => r.check(l.is_empty(), || l.clone()),
                        None => skipped += 1,
                    }
                }
            }
            Err(e) => r.fail(e.to_string()),
        }
    }
    if skipped > 0 {
        r.caveat(format!(
            "{skipped} samples need products beyond the resolved radius {reach} and were skipped"
        ));
    }
    r.scope = format!("{} (l(x),l(y) <= {xy_len}, l(w) <= {w_len})", cell.label);
    r.finish()
}

/// Checks `a(d) = deg h_{d,d,d}` for every `d` of the listed cells, and that
/// a strictly lower cell has a strictly larger a-value.
pub fn hypothesis_audit(ctx: &ConjectureContext) -> Vec<Report> {
    let table = ctx.table;
    let u = ctx.universe();
    let w = table.weights();
    let mut deg = Report::new("hyp:a(d)=deg h", "listed cells", w, table.radius());
    let mut mono = Report::new("hyp:monotone", "listed cells", w, table.radius());
    let cells = match resolve_region(table, ctx.radius) {
        Ok(c) => c,
        Err(e) => {
            deg.fail(e.to_string());
            mono.fail(e.to_string());
            return vec![deg.finish(), mono.finish()];
        }
    };
    let mut rep: Vec<(String, Elem, Exponent)> = Vec::new();
    let mut unstable = 0;
    for cell in &cells {
        let mut cell_a = None;
        for piece in &cell.pieces {
            let d = piece.d;
            let h = table.h_coeff(d, d, d).expect("in table");
            let hd = h.degree().finite().expect("h_ddd is nonzero");
            cell_a.get_or_insert(hd);
            match ctx.avalues.stable(d) {
                Some(a) => deg.check(a == hd, || {
                    format!(
                        "{} d={}: a(d) = {a}, deg h_ddd = {hd}",
                        cell.label,
                        u.format(d)
                    )
                }),
                None => unstable += 1,
            }
        }
        if let (Some(a), Some(p)) = (cell_a, cell.pieces.first()) {
            rep.push((cell.label.clone(), p.d, a));
        }
    }
    if unstable > 0 {
        deg.caveat(format!("{unstable} d with unstable a-value"));
    }
    let mut unordered = 0;
    for (la, da, aa) in &rep {
        for (lb, db, ab) in &rep {
            if la == lb {
                continue;
            }
            let below = ctx.graphs[2].below(*da);
            if db.index() < below.len() && below[db.index()] {
                mono.check(ab > aa, || format!("{lb} below {la} but a = {ab} <= {aa}"));
            } else {
                unordered += 1;
            }
        }
    }
    mono.caveat("direction: a lower cell has the larger a-value, as P4 requires");
    if unordered > 0 {
        mono.caveat(format!(
            "{unordered} ordered pairs of cells with no chain inside the ball"
        ));
    }
    vec![deg.finish(), mono.finish()]
}

/// The distinguished involutions of each listed cell are the `b d b^-1`, and
/// `gamma_{y^-1,y,q_y} n_{q_y} = 1` with `q_y = u^-1 d u` for `y = b d u`.
pub fn check_distinguished(ctx: &ConjectureContext) -> Vec<Report> {
    let table = ctx.table;
    let u = ctx.universe();
    let w = table.weights();
    let mut sets = Report::new("ind:ii", "listed cells", w, table.radius());
    let mut del = Report::new("ind:del", "listed cells", w, table.radius());
    let cells = match resolve_region(table, ctx.radius) {
        Ok(c) => c,
        Err(e) => {
            sets.fail(e.to_string());
            del.fail(e.to_string());
            return vec![sets.finish(), del.finish()];
        }
    };
    let mut unknown_sets = 0;
    let mut unknown_del = 0;
    for cell in &cells {
        let mut expected = BTreeSet::new();
        for piece in &cell.pieces {
            for &b in &piece.b {
                let bd = u.mul(b, piece.d).expect("in ball");
                if let Ok(q) = u.mul(bd, u.inverse(b)) {
                    if u.length(q) <= ctx.radius {
                        expected.insert(q);
                    }
                }
            }
        }
        let mut computed = BTreeSet::new();
        let mut open = false;
        for z in cell.members().filter(|&z| u.length(z) <= ctx.radius) {
            match ctx.is_distinguished(z) {
                Some(true) => {
                    computed.insert(z);
                }
                Some(false) => {}
                None => open = true,
            }
        }
        if open {
            unknown_sets += 1;
        } else {
            let fmt = |s: &BTreeSet<Elem>| {
                s.iter()
                    .map(|&z| u.format(z))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            sets.check(computed == expected, || {
                format!(
                    "{}: computed [{}], expected [{}]",
                    cell.label,
                    fmt(&computed),
                    fmt(&expected)
                )
            });
        }
        let candidates: Vec<Elem> = cell
            .pieces
            .iter()
            .flat_map(|piece| piece.b.iter().map(move |&b| (b, piece.d)))
            .filter_map(|(b, d)| u.mul(u.mul(b, d).ok()?, u.inverse(b)).ok())
            .collect();
        for y in cell.members().filter(|&z| u.length(z) <= ctx.radius) {
            let partners: Vec<Elem> = candidates
                .iter()
                .copied()
                .filter(|&q| ctx.equivalent(Side::Left, q, y) == Some(true))
                .collect();
            let [q] = partners[..] else {
                unknown_del += 1;
                continue;
            };
            let Some(a) = ctx.avalues.stable(q) else {
                unknown_del += 1;
                continue;
            };
            let h = table.h_coeff(u.inverse(y), y, q).expect("in table");
            let (_, n) = table.delta_n(q).expect("in table");
            let g = h.coeff(a);
            del.check(g * n == 1, || {
                format!(
                    "{} y={} q={}: gamma = {g}, n_q = {n}",
                    cell.label,
                    u.format(y),
                    u.format(q)
                )
            });
        }
    }
    if unknown_sets > 0 {
        sets.caveat(format!(
            "{unknown_sets} cells with unstable a-values, left unchecked"
        ));
    }
    if unknown_del > 0 {
        del.caveat(format!("{unknown_del} elements without a unique left-equivalent partner of stable a-value, left unchecked"));
    }
    vec![sets.finish(), del.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::Weights;

    #[test]
    fn parses_ids() {
        assert_eq!("p8'".parse::<Conjecture>().unwrap(), Conjecture::P8Weak);
        assert_eq!("P15".parse::<Conjecture>().unwrap(), Conjecture::P15);
        assert!("P16".parse::<Conjecture>().is_err());
        assert_eq!(Conjecture::P8Weak.to_string(), "P8'");
    }

    #[test]
    fn tensor_products_cancel() {
        let mut t = TensorPoly::default();
        let a = LaurentPoly::xi(1);
        t.add_product(&a, &LaurentPoly::one());
        t.add_product(&-a, &LaurentPoly::one());
        assert!(t.is_zero());
    }

    #[test]
    fn small_table_is_rejected() {
        let t = KlTable::new(Weights::c2(1, 1, 1).unwrap(), 6).unwrap();
        assert!(matches!(
            ConjectureContext::new(&t, 4),
            Err(ConjectureError::TableTooSmall { .. })
        ));
    }

    #[test]
    fn parabolic_a_values_of_a_dihedral_group() {
        let t = KlTable::new(Weights::c2(3, 1, 2).unwrap(), 8).unwrap();
        let vals = parabolic_avalues(&t, GenSet::from_gens(&[1, 2])).unwrap();
        let get = |w: &str| vals.iter().find(|(x, _)| x == w).unwrap().1;
        assert_eq!(get("e"), 0);
        assert_eq!(get("1"), 1);
        assert_eq!(get("2"), 3);
        // longest element of the B2 parabolic: a = L(w0) = 2a + 2b
        assert_eq!(get("1212"), 8);
    }
}
