//! The Kazhdan-Lusztig basis and the invariants read off from it.
//!
//! A [`KlTable`] holds `C_w` in the standard basis for every `w` up to a
//! fixed length, together with the products `C_s C_w` and `C_w C_s`
//! expanded in the `C`-basis. Everything else (arbitrary products
//! `C_x C_y`, structure constants `h_{x,y,z}`, a-values) is derived from
//! these tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::{Elem, Gen, GroupError, Universe, RANK};
use crate::hecke::{CElt, HeckeAlgebra, HeckeElt, HeckeError, Weights};
use crate::laurent::{Degree, Exponent, LaurentPoly};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KlError {
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("a-value of {0} did not stabilise")]
    UnstableAValue(String),
}

impl From<GroupError> for KlError {
    fn from(e: GroupError) -> Self {
        KlError::Hecke(HeckeError::Group(e))
    }
}

impl KlError {
    pub fn is_out_of_ball(&self) -> bool {
        matches!(
            self,
            KlError::Hecke(HeckeError::Group(GroupError::OutOfBall { .. }))
        )
    }
}

/// How `C_w` is obtained when a table is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `C_w = C_s C_{sw} - sum mu C_z`, peeling off bar-invariant
    /// corrections from the top. Fast; also yields `C_s C_{sw}` for free.
    Recursive,
    /// Expand `bar(T_w)` and solve the unitriangular system for the
    /// `P_{y,w}` by taking negative parts, longest `y` first.
    BarCompletion,
}

/// Kazhdan-Lusztig basis elements and generator products up to a radius.
pub struct KlTable {
    algebra: Arc<HeckeAlgebra>,
    radius: usize,
    c_in_t: Vec<HeckeElt>,
    left_cs: [Vec<CElt>; RANK],
    right_cs: [Vec<CElt>; RANK],
}

impl fmt::Debug for KlTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KlTable")
            .field("weights", &self.algebra.weights())
            .field("radius", &self.radius)
            .finish()
    }
}

impl KlTable {
    /// Builds the universe, algebra and table for `weights` up to `radius`.
    pub fn new(weights: Weights, radius: usize) -> Result<Self, KlError> {
        let universe = Arc::new(Universe::new(weights.ty, radius));
        let algebra = Arc::new(HeckeAlgebra::new(universe, weights)?);
        Self::build(algebra, radius, Construction::Recursive)
    }

    pub fn build(
        algebra: Arc<HeckeAlgebra>,
        radius: usize,
        how: Construction,
    ) -> Result<Self, KlError> {
        let universe = algebra.universe_arc().clone();
        let radius = radius.min(universe.radius());
        let n = universe.ball_size(radius);
        let inner = if radius == 0 {
            0
        } else {
            universe.ball_size(radius - 1)
        };
        let mut table = KlTable {
            algebra,
            radius,
            c_in_t: Vec::with_capacity(n),
            left_cs: Default::default(),
            right_cs: Default::default(),
        };
        let mut found: HashMap<(Gen, Elem), CElt> = HashMap::new();
        table.c_in_t.push(HeckeElt::basis(Elem::IDENTITY));
        let growth = universe.growth();
        let mut start = 1;
        for &count in growth.iter().take(radius + 1).skip(1) {
            let level: Vec<Elem> = (start..start + count).map(|i| Elem(i as u32)).collect();
            let results: Vec<(HeckeElt, Option<(Gen, Elem, CElt)>)> = match how {
                Construction::Recursive => level
                    .par_iter()
                    .map(|&w| table.recursive_step(w))
                    .collect::<Result<_, _>>()?,
                Construction::BarCompletion => level
                    .par_iter()
                    .map(|&w| bar_completion(&table.algebra, w).map(|c| (c, None)))
                    .collect::<Result<_, _>>()?,
            };
            for (c, prod) in results {
                table.c_in_t.push(c);
                if let Some((s, w, p)) = prod {
                    found.insert((s, w), p);
                }
            }
            start += count;
        }
        let u = &*universe;
        for s in u.generators().iter() {
            let col: Vec<CElt> = (0..inner as u32)
                .into_par_iter()
                .map(|i| {
                    let w = Elem(i);
                    if let Some(p) = found.get(&(s, w)) {
                        return Ok(p.clone());
                    }
                    table.left_cs_direct(s, w)
                })
                .collect::<Result<_, KlError>>()?;
            table.left_cs[s as usize] = col;
        }
        for s in u.generators().iter().map(usize::from) {
            table.right_cs[s] = (0..inner)
                .map(|i| table.left_cs[s][u.inverse(Elem(i as u32)).index()].flat(u))
                .collect();
        }
        Ok(table)
    }

    fn recursive_step(&self, w: Elem) -> Result<(HeckeElt, Option<(Gen, Elem, CElt)>), KlError> {
        let u = self.universe();
        let s = u.word(w).letters()[0];
        let prev = u.left_gen(s, w).expect("prefix of a ball element");
        let cprev = &self.c_in_t[prev.index()];
        let mut h = self.algebra.left_mul_gen(s, cprev)?;
        h.add_scaled(cprev, &LaurentPoly::q_pow(-self.algebra.weights().of(s)));
        let mut product = CElt::basis(w);
        let mut cursor = w;
        loop {
            let next = h.iter().rev().map(|(z, _)| z).find(|&z| z < cursor);
            let Some(z) = next else { break };
            cursor = z;
            let c = h.coeff(z);
            let split = c.split();
            if split.constant == 0 && split.positive.is_zero() {
                continue;
            }
            let beta =
                &(&split.positive + &split.positive.bar()) + &LaurentPoly::constant(split.constant);
            h.add_scaled(&self.c_in_t[z.index()], &-&beta);
            product.add_term(z, &beta);
        }
        Ok((h, Some((s, prev, product))))
    }

    fn left_cs_direct(&self, s: Gen, w: Elem) -> Result<CElt, KlError> {
        let u = self.universe();
        if u.left_descents(w).contains(s) {
            return Ok(CElt::monomial(w, self.algebra.eta(s)));
        }
        let cw = &self.c_in_t[w.index()];
        let mut h = self.algebra.left_mul_gen(s, cw)?;
        h.add_scaled(cw, &LaurentPoly::q_pow(-self.algebra.weights().of(s)));
        self.expand_in_c(&h)
    }

    pub fn algebra(&self) -> &HeckeAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<HeckeAlgebra> {
        &self.algebra
    }

    pub fn universe(&self) -> &Universe {
        self.algebra.universe()
    }

    pub fn weights(&self) -> Weights {
        self.algebra.weights()
    }

    /// Largest length for which `C_w` is stored.
    pub fn radius(&self) -> usize {
        self.radius
    }

    fn out_of_table(&self, w: Elem) -> KlError {
        GroupError::OutOfBall {
            word: self.universe().format(w),
            radius: self.radius,
        }
        .into()
    }

    pub fn contains(&self, w: Elem) -> bool {
        w.index() < self.c_in_t.len()
    }

    /// `C_w` in the standard basis.
    pub fn c_elem(&self, w: Elem) -> Result<&HeckeElt, KlError> {
        self.c_in_t
            .get(w.index())
            .ok_or_else(|| self.out_of_table(w))
    }

    /// `P_{y,w}`, the coefficient of `T_y` in `C_w`.
    pub fn p_poly(&self, y: Elem, w: Elem) -> Result<LaurentPoly, KlError> {
        Ok(self.c_elem(w)?.coeff(y))
    }

    /// `C_s C_w` in the `C`-basis.
    pub fn left_gen_product(&self, s: Gen, w: Elem) -> Result<&CElt, KlError> {
        self.left_cs[s as usize]
            .get(w.index())
            .ok_or_else(|| self.out_of_table(w))
    }

    /// `C_w C_s` in the `C`-basis.
    pub fn right_gen_product(&self, w: Elem, s: Gen) -> Result<&CElt, KlError> {
        self.right_cs[s as usize]
            .get(w.index())
            .ok_or_else(|| self.out_of_table(w))
    }

    /// Converts a `C`-basis combination back to the standard basis.
    pub fn to_t(&self, h: &CElt) -> Result<HeckeElt, KlError> {
        let mut out = HeckeElt::zero();
        for (w, p) in h.iter() {
            out.add_scaled(self.c_elem(w)?, p);
        }
        Ok(out)
    }

    /// Writes `h` in the `C`-basis by eliminating the longest term first.
    pub fn expand_in_c(&self, h: &HeckeElt) -> Result<CElt, KlError> {
        let mut rest = h.clone();
        let mut out = CElt::zero();
        while let Some((z, c)) = rest.top() {
            let c = c.clone();
            let cz = self.c_elem(z)?;
            rest.add_scaled(cz, &-&c);
            debug_assert!(rest.coeff_ref(z).is_none());
            out.add_term(z, &c);
        }
        Ok(out)
    }

    /// `X C_y` for a fixed left factor and many right factors.
    pub fn right_multiplier(&self, base: CElt) -> RightMultiplier<'_> {
        RightMultiplier::new(self, base)
    }

    /// `C_x C_y` in the `C`-basis.
    pub fn c_product(&self, x: Elem, y: Elem) -> Result<CElt, KlError> {
        let mut m = self.right_multiplier(CElt::basis(x));
        Ok(m.times(y)?.clone())
    }

    /// `X Y` for arbitrary `C`-basis combinations.
    pub fn c_mul(&self, x: &CElt, y: &CElt) -> Result<CElt, KlError> {
        let mut m = self.right_multiplier(x.clone());
        let mut out = CElt::zero();
        for (w, p) in y.iter() {
            out.add_scaled(m.times(w)?, p);
        }
        Ok(out)
    }

    /// `h_{x,y,z}`.
    pub fn h_coeff(&self, x: Elem, y: Elem, z: Elem) -> Result<LaurentPoly, KlError> {
        Ok(self.c_product(x, y)?.coeff(z))
    }

    /// `(Delta(z), n_z)` from the leading term of `P_{e,z}`.
    pub fn delta_n(&self, z: Elem) -> Result<(Exponent, i64), KlError> {
        let p = self.p_poly(Elem::IDENTITY, z)?;
        match p.degree() {
            Degree::Finite(d) => Ok((-d, p.leading_coeff())),
            Degree::NegInf => unreachable!("P_(e,z) is nonzero"),
        }
    }

    /// Coefficient of `q^a` in `h_{x,y,z}`.
    pub fn gamma_coeff(&self, x: Elem, y: Elem, z: Elem, a: Exponent) -> Result<i64, KlError> {
        Ok(self.h_coeff(x, y, z)?.coeff(a))
    }

    /// Checks the defining properties of `C_w`: bar invariance and
    /// `C_w = T_w mod H_{<0}`.
    pub fn certify(&self, w: Elem) -> Result<bool, KlError> {
        Ok(kl_defect(&self.algebra, w, self.c_elem(w)?)?.is_none())
    }

    /// [`verify_kl_basis`] over the stored `C_w` with `l(w) <= radius`.
    pub fn verify(&self, radius: usize) -> Report {
        let u = self.universe();
        let items: Vec<(Elem, &HeckeElt)> = u
            .ball(radius.min(self.radius))
            .map(|w| (w, &self.c_in_t[w.index()]))
            .collect();
        verify_kl_basis(&self.algebra, items)
    }

    /// One line per nonzero `P_{y,w}`: `y w P`.
    pub fn dump(&self) -> String {
        let u = self.universe();
        let mut out = String::new();
        for (i, c) in self.c_in_t.iter().enumerate() {
            let w = Elem(i as u32);
            for (y, p) in c.iter() {
                out.push_str(&format!("{} {} {}\n", u.format(y), u.format(w), p));
            }
        }
        out
    }
}

/// Why `c` is not `C_w`, if it is not: a term that breaks bar invariance
/// or `c = T_w mod H_{<0}`.
pub fn kl_defect(algebra: &HeckeAlgebra, w: Elem, c: &HeckeElt) -> Result<Option<String>, KlError> {
    let u = algebra.universe();
    let name = u.format(w);
    let bar = algebra.bar(c)?;
    let diff = bar.minus(c);
    if let Some((y, p)) = diff.top() {
        return Ok(Some(format!(
            "bar(C[{name}]) - C[{name}] has coefficient {p} at T[{}]",
            u.format(y)
        )));
    }
    let off = c.minus(&HeckeElt::basis(w));
    if let Some((y, p)) = off.iter().rev().find(|(_, p)| !p.in_negative_part()) {
        return Ok(Some(format!(
            "C[{name}] - T[{name}] has coefficient {p} at T[{}], not in A<0",
            u.format(y)
        )));
    }
    Ok(None)
}

/// Checks bar invariance and `C_w = T_w mod H_{<0}` for each pair.
pub fn verify_kl_basis<'a>(
    algebra: &HeckeAlgebra,
    items: impl IntoIterator<Item = (Elem, &'a HeckeElt)>,
) -> Report {
    let items: Vec<(Elem, &HeckeElt)> = items.into_iter().collect();
    let radius = items
        .iter()
        .map(|(w, _)| algebra.universe().length(*w))
        .max()
        .unwrap_or(0);
    let mut r = Report::new(
        "kl:defining",
        format!("l <= {radius}"),
        algebra.weights(),
        radius,
    );
    let found: Vec<Result<Option<String>, KlError>> = items
        .par_iter()
        .map(|(w, c)| kl_defect(algebra, *w, c))
        .collect();
    for f in found {
        match f {
            Ok(None) => r.pass_one(),
            Ok(Some(wit)) => r.check(false, || wit),
            Err(e) => r.check(false, || e.to_string()),
        }
    }
    r.finish()
}

/// Computes `C_w` from `bar(T_y)`, `y <= w`, alone.
pub fn bar_completion(algebra: &HeckeAlgebra, w: Elem) -> Result<HeckeElt, KlError> {
    let u = algebra.universe();
    let lower = u.bruhat_lower(w);
    let mut p: HashMap<Elem, LaurentPoly> = HashMap::from([(w, LaurentPoly::one())]);
    let mut bars: HashMap<Elem, &HeckeElt> = HashMap::new();
    for &y in &lower {
        bars.insert(y, algebra.bar_t(y)?);
    }
    for &x in lower.iter().rev().skip(1) {
        let mut rhs = LaurentPoly::zero();
        for (&y, py) in &p {
            if let Some(r) = bars[&y].coeff_ref(x) {
                rhs.add_product(&py.bar(), r);
            }
        }
        let px = rhs.negative_part();
        debug_assert_eq!(
            &px - &px.bar(),
            rhs,
            "right-hand side is bar-anti-invariant"
        );
        if !px.is_zero() {
            p.insert(x, px);
        }
    }
    Ok(HeckeElt::from_terms(p))
}

/// Memoised right multiplication `X C_y` of a fixed `X` in the `C`-basis.
pub struct RightMultiplier<'a> {
    table: &'a KlTable,
    memo: HashMap<Elem, CElt>,
}

impl<'a> RightMultiplier<'a> {
    fn new(table: &'a KlTable, base: CElt) -> Self {
        Self {
            table,
            memo: HashMap::from([(Elem::IDENTITY, base)]),
        }
    }

    /// `X C_y`.
    pub fn times(&mut self, y: Elem) -> Result<&CElt, KlError> {
        self.ensure(y)?;
        Ok(&self.memo[&y])
    }

    fn ensure(&mut self, y: Elem) -> Result<(), KlError> {
        if self.memo.contains_key(&y) {
            return Ok(());
        }
        let u = self.table.universe();
        let s = *u.word(y).letters().last().expect("non-identity");
        let prev = u.right_gen(y, s).expect("prefix of a ball element");
        let correction = self.table.right_gen_product(prev, s)?;
        for (z, _) in correction.iter() {
            if z != y {
                self.ensure(z)?;
            }
        }
        self.ensure(prev)?;
        let mut out = CElt::zero();
        for (v, p) in self.memo[&prev].iter() {
            out.add_scaled(self.table.right_gen_product(v, s)?, p);
        }
        for (z, mu) in correction.iter() {
            if z != y {
                out.add_scaled(&self.memo[&z], &-mu);
            }
        }
        self.memo.insert(y, out);
        Ok(())
    }
}

/// Best degree of `h_{x,y,z}` seen for one `z`, with a witnessing pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AWitness {
    pub degree: Exponent,
    pub x: Elem,
    pub y: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AValueReport {
    pub element: String,
    pub value: Exponent,
    pub search_radius: usize,
    pub stabilized: bool,
}

/// Empirical a-values: `max deg h_{x,y,z}` over `l(x), l(y) <= R`, and the
/// same maximum over `R + 2` for the stabilisation check.
pub struct AValues {
    search_radius: usize,
    at_radius: Vec<Option<AWitness>>,
    at_check: Vec<Option<AWitness>>,
    names: Vec<String>,
}

impl AValues {
    /// Requires a table of radius at least `2 (search_radius + 2)`.
    pub fn compute(table: &KlTable, search_radius: usize) -> Result<Self, KlError> {
        let u = table.universe();
        let outer = search_radius + 2;
        let n = u.len();
        let xs: Vec<Elem> = u.ball(outer).collect();
        let partial: Vec<(Vec<Option<AWitness>>, Vec<Option<AWitness>>)> = xs
            .par_iter()
            .map(|&x| -> Result<_, KlError> {
                let mut inner = vec![None; n];
                let mut all = vec![None; n];
                let mut m = table.right_multiplier(CElt::basis(x));
                for y in u.ball(outer) {
                    let prod = m.times(y)?;
                    let small = u.length(x) <= search_radius && u.length(y) <= search_radius;
                    for (z, p) in prod.iter() {
                        let d = p.degree().finite().expect("nonzero");
                        let wit = AWitness { degree: d, x, y };
                        improve(&mut all[z.index()], wit);
                        if small {
                            improve(&mut inner[z.index()], wit);
                        }
                    }
                }
                Ok((inner, all))
            })
            .collect::<Result<_, _>>()?;
        let mut at_radius = vec![None; n];
        let mut at_check = vec![None; n];
        for (inner, all) in partial {
            for i in 0..n {
                // beyond the search radius the maximum is only a lower bound
                if u.length(Elem(i as u32)) > search_radius {
                    continue;
                }
                if let Some(w) = inner[i] {
                    improve(&mut at_radius[i], w);
                }
                if let Some(w) = all[i] {
                    improve(&mut at_check[i], w);
                }
            }
        }
        Ok(Self {
            search_radius,
            at_radius,
            at_check,
            names: u.elements().map(|z| u.format(z)).collect(),
        })
    }

    pub fn search_radius(&self) -> usize {
        self.search_radius
    }

    /// The maximum at the search radius with its witness.
    pub fn witness(&self, z: Elem) -> Option<AWitness> {
        self.at_radius.get(z.index()).copied().flatten()
    }

    pub fn report(&self, z: Elem) -> AValueReport {
        let a = self.at_radius.get(z.index()).copied().flatten();
        let b = self.at_check.get(z.index()).copied().flatten();
        AValueReport {
            element: self.names.get(z.index()).cloned().unwrap_or_default(),
            value: a.map_or(Exponent::MIN, |w| w.degree),
            search_radius: self.search_radius,
            stabilized: a.is_some() && a.map(|w| w.degree) == b.map(|w| w.degree),
        }
    }

    /// The stabilised a-value, if any.
    pub fn stable(&self, z: Elem) -> Option<Exponent> {
        let r = self.report(z);
        r.stabilized.then_some(r.value)
    }

    /// `{z : a(z) = Delta(z)}` over `l(z) <= radius`. Fails if any of
    /// these a-values is unstable.
    pub fn distinguished_involutions(
        &self,
        table: &KlTable,
        radius: usize,
    ) -> Result<Vec<Elem>, KlError> {
        let u = table.universe();
        let mut out = Vec::new();
        for z in u.ball(radius) {
            let a = self
                .stable(z)
                .ok_or_else(|| KlError::UnstableAValue(u.format(z)))?;
            if a == table.delta_n(z)?.0 {
                out.push(z);
            }
        }
        Ok(out)
    }
}

fn improve(slot: &mut Option<AWitness>, w: AWitness) {
    match slot {
        Some(cur) if cur.degree >= w.degree => {}
        _ => *slot = Some(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::GroupType;

    fn table(w: Weights, r: usize) -> KlTable {
        KlTable::new(w, r).unwrap()
    }

    #[test]
    fn generator_and_commuting_pair() {
        let t = table(Weights::c2(5, 1, 2).unwrap(), 6);
        let u = t.universe();
        let h = t.algebra();
        for s in 0..3u8 {
            let e = u.from_word(&[s]).unwrap();
            assert_eq!(*t.c_elem(e).unwrap(), h.c_gen(s).unwrap());
            assert_eq!(t.delta_n(e).unwrap(), (h.weights().of(s), 1));
            let ts = t.expand_in_c(&h.t(e)).unwrap();
            let expected = CElt::from_terms([
                (e, LaurentPoly::one()),
                (
                    Elem::IDENTITY,
                    LaurentPoly::q_pow(-h.weights().of(s)).scale(-1),
                ),
            ]);
            assert_eq!(ts, expected);
        }
        let c02 = t.c_elem(u.parse("02").unwrap()).unwrap();
        assert_eq!(
            h.render(c02),
            "T[02] + (q^-2)*T[2] + (q^-5)*T[0] + (q^-7)*T[e]"
        );
        assert_eq!(t.delta_n(Elem::IDENTITY).unwrap(), (0, 1));
    }

    #[test]
    fn recursive_matches_bar_completion() {
        for w in [
            Weights::c2(5, 1, 2).unwrap(),
            Weights::c2(1, 1, 1).unwrap(),
            Weights::g2(2, 1).unwrap(),
        ] {
            let u = Arc::new(Universe::new(w.ty, 9));
            let alg = Arc::new(HeckeAlgebra::new(u, w).unwrap());
            let a = KlTable::build(alg.clone(), 9, Construction::Recursive).unwrap();
            let b = KlTable::build(alg, 9, Construction::BarCompletion).unwrap();
            for z in a.universe().elements() {
                assert_eq!(
                    a.c_elem(z).unwrap(),
                    b.c_elem(z).unwrap(),
                    "{w} {}",
                    a.universe().format(z)
                );
            }
            for s in 0..3 {
                for z in a.universe().ball(8) {
                    assert_eq!(
                        a.left_gen_product(s, z).unwrap(),
                        b.left_gen_product(s, z).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn defining_properties_hold() {
        for w in [Weights::c2(3, 2, 1).unwrap(), Weights::g2(1, 2).unwrap()] {
            let t = table(w, 10);
            for z in t.universe().elements() {
                assert!(t.certify(z).unwrap(), "{w} {}", t.universe().format(z));
                let cz = t.c_elem(z).unwrap();
                for (y, p) in cz.iter() {
                    assert!(t.universe().bruhat_leq(y, z));
                    if y != z {
                        assert!(p.in_negative_part());
                    }
                }
            }
        }
    }

    #[test]
    fn products_agree_with_t_basis() {
        let t = table(Weights::c2(4, 3, 2).unwrap(), 10);
        let u = t.universe();
        let h = t.algebra();
        for x in u.ball(3) {
            for y in u.ball(4) {
                let via_c = t.to_t(&t.c_product(x, y).unwrap()).unwrap();
                let direct = h.mul(t.c_elem(x).unwrap(), t.c_elem(y).unwrap()).unwrap();
                assert_eq!(via_c, direct);
            }
        }
    }

    #[test]
    fn structure_constants_flat_symmetry_and_trace() {
        let t = table(Weights::g2(3, 2).unwrap(), 10);
        let u = t.universe();
        for x in u.ball(4) {
            for y in u.ball(4) {
                let p = t.c_product(x, y).unwrap();
                let q = t.c_product(u.inverse(y), u.inverse(x)).unwrap();
                assert_eq!(p.flat(u), q);
                let tr = t.algebra().tau(&t.to_t(&p).unwrap());
                let expected = i64::from(u.mul(x, y).unwrap() == Elem::IDENTITY);
                assert_eq!(tr.coeff(0), expected);
                for (z, _) in p.iter() {
                    assert!(u.length(z) <= u.length(x) + u.length(y));
                }
            }
        }
    }

    #[test]
    fn c101_closed_form_and_delta() {
        let t = table(Weights::c2(2, 2, 1).unwrap(), 6);
        let u = t.universe();
        let w = u.parse("101").unwrap();
        let expected = t
            .algebra()
            .parse("T[101] + (q^-2)*T[10] + (q^-2)*T[01] + (q^-4)*T[0] + (-q^-1 + q^-3)*T[1] + (-q^-3 + q^-5)*T[e]")
            .unwrap();
        assert_eq!(t.c_elem(w).unwrap(), &expected);
        assert_eq!(t.delta_n(w).unwrap(), (3, -1));
    }

    #[test]
    fn c212_square() {
        let t = table(Weights::c2(3, 1, 2).unwrap(), 6);
        let u = t.universe();
        let d = u.parse("212").unwrap();
        let h = t.h_coeff(d, d, d).unwrap();
        assert_eq!(h, -&(&LaurentPoly::eta(3) * &LaurentPoly::eta(2)));
        assert_eq!(t.gamma_coeff(d, d, d, 5).unwrap(), -1);
        let s = u.parse("1").unwrap();
        assert_eq!(t.h_coeff(s, s, s).unwrap(), LaurentPoly::eta(1));
    }

    #[test]
    fn small_a_values() {
        let t = table(Weights::c2(3, 1, 2).unwrap(), 12);
        let av = AValues::compute(&t, 4).unwrap();
        let u = t.universe();
        assert_eq!(av.stable(Elem::IDENTITY), Some(0));
        for s in 0..3u8 {
            let e = u.from_word(&[s]).unwrap();
            assert_eq!(av.stable(e), Some(t.weights().of(s)));
        }
        assert_eq!(av.stable(u.parse("212").unwrap()), Some(5));
        let d = av.distinguished_involutions(&t, 2).unwrap();
        assert!(d.contains(&Elem::IDENTITY));
        assert_eq!(u.group_type(), GroupType::C2);
    }
}
