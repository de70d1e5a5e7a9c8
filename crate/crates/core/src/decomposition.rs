//! The decomposition formula for a two-sided cell `c = ⊔ B_d d U_d`.
//!
//! Everything here works modulo `H_{<c}`. Reduction drops the `C_z` with
//! `z` outside the cell; that is only sound for elements of the two-sided
//! ideal generated by the cell, which is why [`CellContext::reduce`] asks
//! for a [`Provenance`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cells::{
    computed_cells, preorder_graph, CellDescriptor, CellError, ResolvedCell, ResolvedPiece, Side,
};
use crate::coxeter::{Elem, GroupError, Universe};
use crate::hecke::{CElt, HeckeElt, HeckeError};
use crate::klbasis::{KlError, KlTable};
use crate::laurent::LaurentPoly;
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error("{w} has a left descent in the support of {d}")]
    PreconditionDescent { d: String, w: String },
    #[error("reduction modulo H_<c needs an element of the ideal generated by the cell")]
    PreconditionProvenance,
    #[error("C_{z} is not of the form C_d T_y with y in U_{d}")]
    NotInSpan { d: String, z: String },
    #[error("F_{w} for d={d}: right-hand side at {y} is not bar-anti-invariant")]
    Inconsistent { d: String, w: String, y: String },
    #[error("F_{w} for d={d}: C_d F_w differs from C_dw modulo H_<c")]
    Postcondition { d: String, w: String },
    #[error("{0} is not a distinguished element of this cell")]
    UnknownPiece(String),
    #[error("unknown case {0}")]
    UnknownCase(String),
}

impl From<GroupError> for DecompError {
    fn from(e: GroupError) -> Self {
        DecompError::Kl(e.into())
    }
}

impl From<HeckeError> for DecompError {
    fn from(e: HeckeError) -> Self {
        DecompError::Kl(e.into())
    }
}

impl DecompError {
    pub fn is_out_of_ball(&self) -> bool {
        match self {
            DecompError::Kl(e) => e.is_out_of_ball(),
            DecompError::Cell(CellError::Group(GroupError::OutOfBall { .. })) => true,
            _ => false,
        }
    }
}

/// Where an element to be reduced came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// An `A`-combination of products with at least one factor `C_w`, `w`
    /// in the cell.
    CellIdeal,
    Unknown,
}

/// `F_w = T_w + sum p_{y,w} T_y` over `y <_U w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FElement {
    pub d: Elem,
    pub w: Elem,
    pub coeffs: BTreeMap<Elem, LaurentPoly>,
}

impl FElement {
    pub fn to_hecke(&self) -> HeckeElt {
        HeckeElt::from_terms(self.coeffs.iter().map(|(&y, p)| (y, p.clone())))
    }
}

/// A cell resolved against a table, with membership up to the table radius.
pub struct CellContext<'a> {
    table: &'a KlTable,
    cell: ResolvedCell,
    member: Vec<bool>,
}

impl<'a> CellContext<'a> {
    pub fn new(table: &'a KlTable, desc: &CellDescriptor) -> Result<Self, DecompError> {
        let cell = ResolvedCell::resolve(desc, table.universe(), table.radius())?;
        Ok(Self::from_resolved(table, cell))
    }

    pub fn from_resolved(table: &'a KlTable, cell: ResolvedCell) -> Self {
        let mut member = vec![false; table.universe().ball_size(cell.radius)];
        for z in cell.members() {
            member[z.index()] = true;
        }
        Self {
            table,
            cell,
            member,
        }
    }

    pub fn table(&self) -> &'a KlTable {
        self.table
    }

    pub fn universe(&self) -> &'a Universe {
        self.table.universe()
    }

    pub fn cell(&self) -> &ResolvedCell {
        &self.cell
    }

    pub fn label(&self) -> &str {
        &self.cell.label
    }

    pub fn in_cell(&self, z: Elem) -> Result<bool, DecompError> {
        self.member.get(z.index()).copied().ok_or_else(|| {
            GroupError::OutOfBall {
                word: self.universe().format(z),
                radius: self.cell.radius,
            }
            .into()
        })
    }

    /// Drops every `C_z` with `z` outside the cell.
    pub fn reduce(&self, h: &CElt, provenance: Provenance) -> Result<CElt, DecompError> {
        if provenance != Provenance::CellIdeal {
            return Err(DecompError::PreconditionProvenance);
        }
        self.drop_non_cell(h)
    }

    fn drop_non_cell(&self, h: &CElt) -> Result<CElt, DecompError> {
        for z in h.support() {
            self.in_cell(z)?;
        }
        Ok(h.filtered(|z| self.member[z.index()]))
    }

    /// [`Self::reduce`] for an element given in the standard basis.
    pub fn reduce_hecke(&self, h: &HeckeElt, provenance: Provenance) -> Result<CElt, DecompError> {
        if provenance != Provenance::CellIdeal {
            return Err(DecompError::PreconditionProvenance);
        }
        self.reduce_t(h)
    }

    /// Expands a standard-basis element of the cell ideal and reduces it.
    fn reduce_t(&self, h: &HeckeElt) -> Result<CElt, DecompError> {
        let c = self.table.expand_in_c(h)?;
        self.drop_non_cell(&c)
    }

    pub fn piece_index(&self, d: Elem) -> Result<usize, DecompError> {
        self.cell
            .pieces
            .iter()
            .position(|p| p.d == d)
            .ok_or_else(|| DecompError::UnknownPiece(self.universe().format(d)))
    }

    /// `h_{d,d,d}`.
    pub fn h_ddd(&self, d: Elem) -> Result<LaurentPoly, DecompError> {
        Ok(self.table.h_coeff(d, d, d)?)
    }

    pub fn solver(&self, d: Elem) -> Result<FSolver<'_, 'a>, DecompError> {
        let piece = self.piece_index(d)?;
        Ok(FSolver {
            ctx: self,
            piece,
            d,
            cd: self.table.c_elem(d)?.clone(),
            beta: HashMap::new(),
            r: HashMap::new(),
            f: HashMap::new(),
            q: HashMap::new(),
        })
    }

    fn radius_error(&self, z: Elem, radius: usize) -> DecompError {
        GroupError::OutOfBall {
            word: self.universe().format(z),
            radius,
        }
        .into()
    }
}

type Coords = BTreeMap<Elem, LaurentPoly>;

/// Solver for `F_w` and the related expansions for one `d`.
pub struct FSolver<'c, 'a> {
    ctx: &'c CellContext<'a>,
    piece: usize,
    d: Elem,
    cd: HeckeElt,
    beta: HashMap<Elem, CElt>,
    r: HashMap<Elem, Coords>,
    f: HashMap<Elem, FElement>,
    q: HashMap<Elem, Coords>,
}

impl<'c, 'a> FSolver<'c, 'a> {
    pub fn d(&self) -> Elem {
        self.d
    }

    pub fn piece(&self) -> &'c ResolvedPiece {
        &self.ctx.cell.pieces[self.piece]
    }

    fn u(&self) -> &'a Universe {
        self.ctx.universe()
    }

    fn fmt(&self, x: Elem) -> String {
        self.u().format(x)
    }

    pub fn in_u(&self, y: Elem) -> Result<bool, DecompError> {
        Ok(self.piece().in_u(self.u(), y)?)
    }

    /// `y <=_U w`: `y = w`, or `y < w` in Bruhat order with `y` in `U_d`.
    pub fn u_order_leq(&self, y: Elem, w: Elem) -> Result<bool, DecompError> {
        Ok(y == w || (self.u().bruhat_leq(y, w) && self.in_u(y)?))
    }

    fn check_descent(&self, w: Elem) -> Result<(), DecompError> {
        let u = self.u();
        if u.length(w) > self.piece().u_radius() {
            return Err(self.ctx.radius_error(w, self.piece().u_radius()));
        }
        if !u
            .left_descents(w)
            .iter()
            .all(|s| !u.support(self.d).contains(s))
        {
            return Err(DecompError::PreconditionDescent {
                d: self.fmt(self.d),
                w: self.fmt(w),
            });
        }
        Ok(())
    }

    /// `C_d T_y` reduced modulo `H_{<c}`.
    fn beta(&mut self, y: Elem) -> Result<&CElt, DecompError> {
        if !self.beta.contains_key(&y) {
            let h = self
                .ctx
                .table
                .algebra()
                .mul(&self.cd, &HeckeElt::basis(y))?;
            let b = self.ctx.reduce_t(&h)?;
            self.beta.insert(y, b);
        }
        Ok(&self.beta[&y])
    }

    /// Coordinates of a reduced element in the family `C_d T_y`, `y` in
    /// `U_d` or `y = extra`, by eliminating the longest term.
    fn span_coords(&mut self, h: &CElt, extra: Option<Elem>) -> Result<Coords, DecompError> {
        let u = self.u();
        let ld = u.length(self.d);
        let mut rest = h.clone();
        let mut coords = Coords::new();
        while let Some((z, c)) = rest.top() {
            let c = c.clone();
            let y = u.mul(self.d, z)?;
            let ok = u.length(z) == u.length(y) + ld && (Some(y) == extra || self.in_u(y)?);
            if !ok {
                return Err(DecompError::NotInSpan {
                    d: self.fmt(self.d),
                    z: self.fmt(z),
                });
            }
            let b = self.beta(y)?;
            if b.coeff_ref(z).is_none_or(|p| !p.is_one()) {
                return Err(DecompError::NotInSpan {
                    d: self.fmt(self.d),
                    z: self.fmt(z),
                });
            }
            rest.add_scaled(b, &-&c);
            coords.insert(y, c);
        }
        Ok(coords)
    }

    /// `r_{y',y}`: `bar(C_d T_y) = sum r_{y',y} C_d T_{y'}` mod `H_{<c}`.
    pub fn r_coeffs(&mut self, y: Elem) -> Result<&Coords, DecompError> {
        if !self.r.contains_key(&y) {
            let alg = self.ctx.table.algebra();
            let h = alg.mul(&self.cd, alg.bar_t(y)?)?;
            let reduced = self.ctx.reduce_t(&h)?;
            let coords = self.span_coords(&reduced, Some(y))?;
            if coords.get(&y).is_none_or(|p| !p.is_one()) {
                return Err(DecompError::NotInSpan {
                    d: self.fmt(self.d),
                    z: self.fmt(self.ctx.universe().mul(self.d, y)?),
                });
            }
            self.r.insert(y, coords);
        }
        Ok(&self.r[&y])
    }

    /// The unique `F_w` with `C_d F_w = C_{dw}` modulo `H_{<c}`.
    ///
    /// For `w` in `U_d` the coefficients come from the negative-part
    /// recursion `p_{y',w} - bar(p_{y',w}) = sum r_{y',y} bar(p_{y,w})`. For
    /// other `w` the product `C_d T_w` is already in the span of the
    /// `C_d T_y`, `y <_U w`, and `F_w` is read off from that.
    pub fn f_element(&mut self, w: Elem) -> Result<FElement, DecompError> {
        if let Some(f) = self.f.get(&w) {
            return Ok(f.clone());
        }
        self.check_descent(w)?;
        let u = self.u();
        let mut p = Coords::from([(w, LaurentPoly::one())]);
        if self.in_u(w)? {
            let mut below = Vec::new();
            for y in u.bruhat_lower(w) {
                if y != w && self.in_u(y)? {
                    below.push(y);
                }
            }
            for &y in below.iter().chain([&w]) {
                self.r_coeffs(y)?;
            }
            for &y1 in below.iter().rev() {
                let mut rhs = LaurentPoly::zero();
                for (y, py) in &p {
                    if let Some(r) = self.r[y].get(&y1) {
                        rhs.add_product(r, &py.bar());
                    }
                }
                let neg = rhs.negative_part();
                if &neg - &neg.bar() != rhs {
                    return Err(DecompError::Inconsistent {
                        d: self.fmt(self.d),
                        w: self.fmt(w),
                        y: self.fmt(y1),
                    });
                }
                if !neg.is_zero() {
                    p.insert(y1, neg);
                }
            }
        } else {
            let b = self.beta(w)?.clone();
            for (y, c) in self.span_coords(&b, None)? {
                if !c.in_negative_part() {
                    return Err(DecompError::Inconsistent {
                        d: self.fmt(self.d),
                        w: self.fmt(w),
                        y: self.fmt(y),
                    });
                }
                p.insert(y, -c);
            }
        }
        let f = FElement {
            d: self.d,
            w,
            coeffs: p,
        };
        let lhs = self
            .ctx
            .reduce_t(&self.ctx.table.algebra().mul(&self.cd, &f.to_hecke())?)?;
        let dw = u.mul(self.d, w)?;
        let rhs = if self.ctx.in_cell(dw)? {
            CElt::basis(dw)
        } else {
            CElt::zero()
        };
        if lhs != rhs {
            return Err(DecompError::Postcondition {
                d: self.fmt(self.d),
                w: self.fmt(w),
            });
        }
        self.f.insert(w, f.clone());
        Ok(f)
    }

    /// `E_v = flat(F_{v^-1})`.
    pub fn e_element(&mut self, v: Elem) -> Result<HeckeElt, DecompError> {
        let u = self.u();
        Ok(self.f_element(u.inverse(v))?.to_hecke().flat(u))
    }

    /// `q_{u',u}` with `C_d T_u = sum q_{u',u} C_d F_{u'}` mod `H_{<c}`.
    pub fn expand_in_f(&mut self, w: Elem) -> Result<Coords, DecompError> {
        if let Some(q) = self.q.get(&w) {
            return Ok(q.clone());
        }
        let f = self.f_element(w)?;
        let mut q = Coords::from([(w, LaurentPoly::one())]);
        for (&y, p) in f.coeffs.iter().filter(|(&y, _)| y != w) {
            for (z, c) in self.expand_in_f(y)? {
                let t = q.entry(z).or_insert_with(LaurentPoly::zero);
                *t -= &(&c * p);
            }
        }
        q.retain(|_, c| !c.is_zero());
        self.q.insert(w, q.clone());
        Ok(q)
    }
}

/// Every `(b, u)` of the piece with `l(bdu) <= max_len`.
fn triples(u: &Universe, piece: &ResolvedPiece, max_len: usize) -> Vec<(Elem, Elem)> {
    let ld = u.length(piece.d);
    let mut out = Vec::new();
    for &b in &piece.b {
        for &x in &piece.u {
            if u.length(b) + ld + u.length(x) <= max_len {
                out.push((b, x));
            }
        }
    }
    out
}

fn new_report(ctx: &CellContext, id: &str, radius: usize) -> Report {
    Report::new(id, ctx.label(), ctx.table.weights(), radius)
}

/// Runs `body`; an out-of-ball error turns the report into SKIPPED_OOB and
/// any other error into a failure.
fn guarded(mut r: Report, body: impl FnOnce(&mut Report) -> Result<(), DecompError>) -> Report {
    match body(&mut r) {
        Ok(()) => r.finish(),
        Err(e) if e.is_out_of_ball() => r.skipped(e.to_string()),
        Err(e) => {
            r.fail(e.to_string());
            r.finish()
        }
    }
}

/// Table radius needed to verify products up to `max_len` in this cell.
pub fn required_radius(cell: &ResolvedCell, universe: &Universe, max_len: usize) -> usize {
    max_len
        + cell
            .pieces
            .iter()
            .map(|p| universe.length(p.d))
            .max()
            .unwrap_or(0)
}

/// Checks every item of the assumption on the cell for instances up to
/// `radius`. The right-cell item compares with cells computed on the
/// largest inner ball that keeps a slack of `max l(d) + 2`.
pub fn verify_assumption(ctx: &CellContext, radius: usize) -> Vec<Report> {
    let u = ctx.universe();
    let cell = ctx.cell();
    let radius = radius.min(cell.radius);
    let mut out = Vec::new();

    out.push(guarded(new_report(ctx, "ass:i.a", radius), |r| {
        for z in cell.members().filter(|&z| u.length(z) <= radius) {
            let zi = u.inverse(z);
            r.check(ctx.in_cell(zi)?, || {
                format!("{} in cell but {} is not", u.format(z), u.format(zi))
            });
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:i.b", radius), |r| {
        for p in &cell.pieces {
            for (b, x) in triples(u, p, radius) {
                let (bd, ok1) = u.mul_additive(b, p.d)?;
                let (_, ok2) = u.mul_additive(bd, x)?;
                r.check(ok1 && ok2, || {
                    format!(
                        "l(bdu) not additive for b={} d={} u={}",
                        u.format(b),
                        u.format(p.d),
                        u.format(x)
                    )
                });
            }
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:i.c", radius), |r| {
        for p in &cell.pieces {
            let d = u.format(p.d);
            r.check(p.b.contains(&Elem::IDENTITY), || format!("e not in B_{d}"));
            r.check(p.in_u(u, Elem::IDENTITY)?, || format!("e not in U_{d}"));
            for &b in &p.b {
                let bi = u.inverse(b);
                if u.length(bi) <= p.u_radius() {
                    r.check(p.in_u(u, bi)?, || {
                        format!("{}^-1 in B_{d} but not in U_{d}", u.format(b))
                    });
                }
            }
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:i.d", radius), |r| {
        for p in &cell.pieces {
            let ld = u.length(p.d);
            let sd = u.support(p.d);
            for w in u.ball(radius.saturating_sub(ld).min(p.u_radius())) {
                if p.in_u(u, w)? || u.left_descents(w).iter().any(|s| sd.contains(s)) {
                    continue;
                }
                let dw = u.mul(p.d, w)?;
                r.check(!ctx.in_cell(dw)?, || {
                    format!(
                        "{} not in U_{} but {} is in the cell",
                        u.format(w),
                        u.format(p.d),
                        u.format(dw)
                    )
                });
            }
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:ii.a", radius), |r| {
        for p in &cell.pieces {
            let sd = u.support(p.d);
            for &x in
                p.u.iter()
                    .filter(|&&x| u.length(x) + u.length(p.d) <= radius)
            {
                let bad = u.left_descents(x).iter().find(|&s| sd.contains(s));
                r.check(bad.is_none(), || {
                    format!("l(su) < l(u) for s={} u={}", bad.unwrap_or(0), u.format(x))
                });
            }
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:ii.involution", radius), |r| {
        for p in &cell.pieces {
            let finite = u.support(p.d) != crate::coxeter::GenSet::ALL;
            r.check(finite && u.mul(p.d, p.d)? == Elem::IDENTITY, || {
                format!(
                    "{} is not an involution of a finite parabolic subgroup",
                    u.format(p.d)
                )
            });
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:ii.b", radius), |r| {
        let alg = ctx.table.algebra();
        for p in &cell.pieces {
            let cd = ctx.table.c_elem(p.d)?;
            for s in u.support(p.d).iter() {
                let h = alg.left_mul_gen(s, cd)?;
                let red = ctx.reduce_t(&h)?;
                let ok = red.support().all(|z| z == p.d);
                r.check(ok, || {
                    format!("T_{s} C_{} = {} mod H_<c", u.format(p.d), red.render(u))
                });
            }
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:ii.c", radius), |r| {
        for p in &cell.pieces {
            let h = ctx.h_ddd(p.d)?;
            r.check(!h.is_zero(), || {
                format!("h_(d,d,d) = 0 for d={}", u.format(p.d))
            });
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:iii", radius), |r| {
        let slack = cell.pieces.iter().map(|p| u.length(p.d)).max().unwrap_or(0) + 2;
        let graph_radius = ctx.table.radius().saturating_sub(1);
        let inner = radius.min(graph_radius.saturating_sub(slack));
        r.caveat(format!(
            "right cells computed on the ball of radius {inner}"
        ));
        let g = preorder_graph(ctx.table, Side::Right)?;
        let part = computed_cells(&g, u, inner);
        for p in &cell.pieces {
            if u.length(p.d) > inner {
                continue;
            }
            let expected: BTreeSet<Elem> =
                p.u.iter()
                    .filter(|&&x| u.length(x) + u.length(p.d) <= inner)
                    .map(|&x| u.mul(p.d, x))
                    .collect::<Result<_, _>>()?;
            let got: BTreeSet<Elem> = part.block(p.d).iter().copied().collect();
            r.check(expected == got, || {
                let extra: Vec<String> = got.difference(&expected).map(|&z| u.format(z)).collect();
                let missing: Vec<String> =
                    expected.difference(&got).map(|&z| u.format(z)).collect();
                format!(
                    "right cell of {}: extra [{}] missing [{}]",
                    u.format(p.d),
                    extra.join(","),
                    missing.join(",")
                )
            });
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "ass:iv", radius), |r| {
        let alg = ctx.table.algebra();
        for p in &cell.pieces {
            let cd = ctx.table.c_elem(p.d)?;
            let list = triples(u, p, radius);
            let mut by_b: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
            for (b, x) in list {
                by_b.entry(b).or_default().push(x);
            }
            for (b, xs) in by_b {
                let left = alg.mul(&HeckeElt::basis(b), cd)?;
                for x in xs {
                    let mut h = alg.mul(&left, &HeckeElt::basis(x))?;
                    let bdu = u.mul(u.mul(b, p.d)?, x)?;
                    h.sub_assign(&HeckeElt::basis(bdu));
                    let c = ctx.table.expand_in_c(&h)?;
                    let mut bad = None;
                    for (z, coef) in c.iter() {
                        if ctx.in_cell(z)? && !coef.in_negative_part() {
                            bad = Some((z, coef.clone()));
                            break;
                        }
                    }
                    r.check(bad.is_none(), || {
                        let (z, coef) = bad.clone().expect("failure");
                        format!(
                            "T_{} C_{} T_{} - T_{}: coefficient {} at C_{}",
                            u.format(b),
                            u.format(p.d),
                            u.format(x),
                            u.format(bdu),
                            coef,
                            u.format(z)
                        )
                    });
                }
            }
        }
        Ok(())
    }));
    out
}

/// Per-piece data shared by the parallel checks.
struct PieceData {
    d: Elem,
    f: HashMap<Elem, HeckeElt>,
    e: HashMap<Elem, HeckeElt>,
}

fn piece_data(
    ctx: &CellContext,
    index: usize,
    fs: &[Elem],
    es: &[Elem],
) -> Result<PieceData, DecompError> {
    let d = ctx.cell().pieces[index].d;
    let mut solver = ctx.solver(d)?;
    let mut f = HashMap::new();
    for &x in fs {
        f.insert(x, solver.f_element(x)?.to_hecke());
    }
    let mut e = HashMap::new();
    for &b in es {
        e.insert(b, solver.e_element(b)?);
    }
    Ok(PieceData { d, f, e })
}

/// Both forms of the decomposition formula for every `(b, d, u)` with
/// `l(bdu) <= max_len`:
/// `C_{bd} C_{du} = h_{d,d,d} C_{bdu}` and `C_{bdu} = E_b C_d F_u`, modulo
/// `H_{<c}`.
pub fn verify_theorem_dec(ctx: &CellContext, max_len: usize) -> Vec<Report> {
    let u = ctx.universe();
    let table = ctx.table();
    let run = |id: &str, product_form: bool| {
        guarded(new_report(ctx, id, max_len), |r| {
            let need = required_radius(ctx.cell(), u, max_len);
            if product_form && need > table.radius() {
                return Err(ctx.radius_error(Elem::IDENTITY, table.radius()));
            }
            for (i, p) in ctx.cell().pieces.iter().enumerate() {
                let list = triples(u, p, max_len);
                let bs: Vec<Elem> = list
                    .iter()
                    .map(|t| t.0)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let xs: Vec<Elem> = list
                    .iter()
                    .map(|t| t.1)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let data = if product_form {
                    None
                } else {
                    Some(piece_data(ctx, i, &xs, &bs)?)
                };
                let h = ctx.h_ddd(p.d)?;
                let results: Vec<Result<Vec<(bool, String)>, DecompError>> = bs
                    .par_iter()
                    .map(|&b| {
                        let mine: Vec<Elem> =
                            list.iter().filter(|t| t.0 == b).map(|t| t.1).collect();
                        let bd = u.mul(b, p.d)?;
                        let mut out = Vec::new();
                        if product_form {
                            let mut m = table.right_multiplier(CElt::basis(bd));
                            for x in mine {
                                let du = u.mul(p.d, x)?;
                                let bdu = u.mul(bd, x)?;
                                let lhs = ctx.drop_non_cell(m.times(du)?)?;
                                let rhs = CElt::monomial(bdu, h.clone());
                                let ok = lhs == rhs;
                                out.push((
                                    ok,
                                    format!(
                                        "C_{} C_{} = {} mod H_<c, expected ({})*C[{}]",
                                        u.format(bd),
                                        u.format(du),
                                        lhs.render(u),
                                        h,
                                        u.format(bdu)
                                    ),
                                ));
                            }
                        } else {
                            let data = data.as_ref().expect("prepared");
                            let ec = table.algebra().mul(&data.e[&b], table.c_elem(data.d)?)?;
                            for x in mine {
                                let bdu = u.mul(bd, x)?;
                                let prod = table.algebra().mul(&ec, &data.f[&x])?;
                                let lhs = ctx.reduce_t(&prod)?;
                                let ok = lhs == CElt::basis(bdu);
                                out.push((
                                    ok,
                                    format!(
                                        "E_{} C_{} F_{} = {} mod H_<c, expected C[{}]",
                                        u.format(b),
                                        u.format(p.d),
                                        u.format(x),
                                        lhs.render(u),
                                        u.format(bdu)
                                    ),
                                ));
                            }
                        }
                        Ok(out)
                    })
                    .collect();
                for res in results {
                    for (ok, w) in res? {
                        r.check(ok, || w);
                    }
                }
            }
            Ok(())
        })
    };
    vec![run("thm:dec:product", true), run("thm:dec:ecf", false)]
}

/// A member `w = b_1 p_w b_2^-1` of the cell with its factorisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorisation {
    pub w: String,
    pub d1: String,
    pub b1: String,
    pub d2: String,
    pub b2: String,
    pub p: String,
}

/// All `(piece, b)` with `w` in `b d U_d`, length-additively.
fn right_cells_containing(
    ctx: &CellContext,
    w: Elem,
) -> Result<Vec<(usize, Elem, Elem)>, DecompError> {
    let u = ctx.universe();
    let mut out = Vec::new();
    for (i, p) in ctx.cell().pieces.iter().enumerate() {
        for &b in &p.b {
            let bd = u.mul(b, p.d)?;
            if !u.duflo_leq(bd, w) {
                continue;
            }
            let rest = u.mul(u.inverse(bd), w)?;
            if u.length(rest) <= p.u_radius() && p.in_u(u, rest)? {
                out.push((i, b, rest));
            }
        }
    }
    Ok(out)
}

/// The unique factorisation `w = b_1 p_w b_2^-1` and
/// `C_w = E_{b_1} C_{p_w} F_{b_2^-1}` modulo `H_{<c}` for every member with
/// `l(w) <= max_len`; also that length-additive `x, xy` in the cell share a
/// right cell.
pub fn verify_corollary_dec(ctx: &CellContext, max_len: usize) -> Vec<Report> {
    let u = ctx.universe();
    let cell = ctx.cell();
    let members: Vec<Elem> = cell.members().filter(|&z| u.length(z) <= max_len).collect();
    let mut out = Vec::new();
    let mut factors: Vec<(Elem, usize, Elem, usize, Elem, Elem)> = Vec::new();

    out.push(guarded(
        new_report(ctx, "cor:dec:factorisation", max_len),
        |r| {
            for &w in &members {
                let right = right_cells_containing(ctx, w)?;
                let left = right_cells_containing(ctx, u.inverse(w))?;
                if right.len() != 1 || left.len() != 1 {
                    r.fail(format!(
                        "{} lies in {} right and {} left encoded cells",
                        u.format(w),
                        right.len(),
                        left.len()
                    ));
                    continue;
                }
                let (i1, b1, _) = right[0];
                let (i2, b2, _) = left[0];
                let p = u.mul(u.mul(u.inverse(b1), w)?, b2)?;
                let additive = u.length(w) == u.length(b1) + u.length(p) + u.length(b2);
                let in_phi = right_cells_containing(ctx, p)?
                    .iter()
                    .any(|&(i, b, _)| i == i1 && b == Elem::IDENTITY);
                let in_theta = right_cells_containing(ctx, u.inverse(p))?
                    .iter()
                    .any(|&(i, b, _)| i == i2 && b == Elem::IDENTITY);
                r.check(additive && in_phi && in_theta, || {
                    format!(
                        "{} = {}.{}.{}^-1 is not a valid factorisation",
                        u.format(w),
                        u.format(b1),
                        u.format(p),
                        u.format(b2)
                    )
                });
                factors.push((w, i1, b1, i2, b2, p));
            }
            Ok(())
        },
    ));

    out.push(guarded(new_report(ctx, "cor:dec:ecf", max_len), |r| {
        let mut solvers: HashMap<usize, FSolver> = HashMap::new();
        for &(w, i1, b1, i2, b2, p) in &factors {
            if let std::collections::hash_map::Entry::Vacant(e) = solvers.entry(i1) {
                e.insert(ctx.solver(cell.pieces[i1].d)?);
            }
            let e = solvers.get_mut(&i1).expect("inserted").e_element(b1)?;
            if let std::collections::hash_map::Entry::Vacant(e) = solvers.entry(i2) {
                e.insert(ctx.solver(cell.pieces[i2].d)?);
            }
            let f = solvers
                .get_mut(&i2)
                .expect("inserted")
                .f_element(u.inverse(b2))?
                .to_hecke();
            let alg = ctx.table.algebra();
            let prod = alg.mul(&alg.mul(&e, ctx.table.c_elem(p)?)?, &f)?;
            let lhs = ctx.reduce_t(&prod)?;
            r.check(lhs == CElt::basis(w), || {
                format!(
                    "E_{} C_{} F_{} = {} mod H_<c, expected C[{}]",
                    u.format(b1),
                    u.format(p),
                    u.format(u.inverse(b2)),
                    lhs.render(u),
                    u.format(w)
                )
            });
        }
        Ok(())
    }));

    out.push(guarded(new_report(ctx, "cor:dec:iii", max_len), |r| {
        for &z in &members {
            let key = cell.right_cell_key(z);
            let prefixes = u.system().duflo_prefixes(u.map(z), u.length(z));
            for m in prefixes {
                let x = u.elem_of(&m)?;
                if x != z && ctx.in_cell(x)? {
                    r.check(cell.right_cell_key(x) == key, || {
                        format!(
                            "{} and its prefix {} lie in different right cells",
                            u.format(z),
                            u.format(x)
                        )
                    });
                }
            }
        }
        Ok(())
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::find_descriptor;
    use crate::hecke::Weights;

    fn ctx_for<'a>(t: &'a KlTable, label: &str) -> CellContext<'a> {
        let d = find_descriptor(&t.weights(), label).unwrap();
        CellContext::new(t, &d).unwrap()
    }

    #[test]
    fn f_of_identity_and_preconditions() {
        let t = KlTable::new(Weights::c2(5, 1, 2).unwrap(), 12).unwrap();
        let ctx = ctx_for(&t, "C2:1:i");
        let u = t.universe();
        let d = u.parse("02").unwrap();
        let mut s = ctx.solver(d).unwrap();
        let f = s.f_element(Elem::IDENTITY).unwrap();
        assert_eq!(f.to_hecke(), HeckeElt::basis(Elem::IDENTITY));
        let err = s.f_element(u.parse("0").unwrap()).unwrap_err();
        assert!(matches!(err, DecompError::PreconditionDescent { .. }));
        assert!(s
            .u_order_leq(Elem::IDENTITY, u.parse("1012").unwrap())
            .unwrap());
        let w = u.parse("1012").unwrap();
        assert!(s.u_order_leq(w, w).unwrap());
        let not_u = u.parse("12").unwrap();
        assert!(!s.in_u(not_u).unwrap());
        assert!(!s.u_order_leq(not_u, u.parse("121").unwrap()).unwrap());
    }

    #[test]
    fn f_for_generator_has_negative_coefficients() {
        let t = KlTable::new(Weights::c2(5, 1, 2).unwrap(), 12).unwrap();
        let ctx = ctx_for(&t, "C2:1:i");
        let u = t.universe();
        let mut s = ctx.solver(u.parse("02").unwrap()).unwrap();
        let f = s.f_element(u.parse("1").unwrap()).unwrap();
        for (&y, p) in &f.coeffs {
            if y != f.w {
                assert!(p.in_negative_part(), "{p}");
            }
        }
        let q = s.expand_in_f(u.parse("1").unwrap()).unwrap();
        assert_eq!(q[&u.parse("1").unwrap()], LaurentPoly::one());
        for (&y, p) in &q {
            if y != u.parse("1").unwrap() {
                assert!(p.in_negative_part());
            }
        }
    }

    #[test]
    fn reduction_needs_provenance() {
        let t = KlTable::new(Weights::c2(5, 2, 1).unwrap(), 8).unwrap();
        let ctx = ctx_for(&t, "C2:5:101");
        let u = t.universe();
        let x = t
            .c_product(u.parse("0").unwrap(), u.parse("101").unwrap())
            .unwrap();
        assert_eq!(x, CElt::basis(u.parse("1010").unwrap()));
        assert!(ctx.reduce(&x, Provenance::CellIdeal).unwrap().is_zero());
        assert_eq!(
            ctx.reduce(&x, Provenance::Unknown),
            Err(DecompError::PreconditionProvenance)
        );
    }

    #[test]
    fn small_region_passes() {
        let t = KlTable::new(Weights::c2(5, 1, 2).unwrap(), 12).unwrap();
        let ctx = ctx_for(&t, "C2:1:i");
        for r in verify_assumption(&ctx, 8)
            .into_iter()
            .chain(verify_theorem_dec(&ctx, 8))
            .chain(verify_corollary_dec(&ctx, 8))
        {
            assert!(r.passed(), "{}", r.render(0));
        }
    }
}
