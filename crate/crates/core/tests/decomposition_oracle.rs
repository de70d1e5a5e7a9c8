//! `F_u` recomputed by eliminating top terms of `C_{du} - C_d T_u` modulo
//! lower cells, compared with the solver's negative-part recursion.

use std::collections::BTreeMap;

use hecke_cells::cells::{find_descriptor, manifest_weights};
use hecke_cells::coxeter::Elem;
use hecke_cells::decomposition::CellContext;
use hecke_cells::hecke::{CElt, HeckeElt};
use hecke_cells::klbasis::KlTable;
use hecke_cells::laurent::LaurentPoly;

/// Keeps the terms of `h` that lie in the cell.
fn in_cell(ctx: &CellContext, h: &CElt) -> CElt {
    CElt::from_terms(
        h.iter()
            .filter(|(z, _)| ctx.in_cell(*z).unwrap())
            .map(|(z, p)| (z, p.clone())),
    )
}

fn eliminate(
    ctx: &CellContext,
    t: &KlTable,
    piece: usize,
    d: Elem,
    w: Elem,
) -> BTreeMap<Elem, LaurentPoly> {
    let u = t.universe();
    let alg = t.algebra();
    let cd = t.c_elem(d).unwrap().clone();
    let cd_t = |y: Elem| {
        in_cell(
            ctx,
            &t.expand_in_c(&alg.mul(&cd, &HeckeElt::basis(y)).unwrap())
                .unwrap(),
        )
    };
    let mut f = BTreeMap::from([(w, LaurentPoly::one())]);
    let mut rest = CElt::basis(u.mul(d, w).unwrap());
    rest.add_scaled(&cd_t(w), &-LaurentPoly::one());
    while let Some((z, p)) = rest.top() {
        let p = p.clone();
        let o = ctx.cell().origin(z).expect("cell member");
        assert_eq!(
            (o.piece, o.b),
            (piece, Elem::IDENTITY),
            "{} is outside the right cell of d",
            u.format(z)
        );
        assert!(u.bruhat_leq(o.u, w) && o.u != w);
        rest.add_scaled(&cd_t(o.u), &-&p);
        *f.entry(o.u).or_insert_with(LaurentPoly::zero) += &p;
    }
    f.retain(|_, p| !p.is_zero());
    f
}

#[test]
fn f_elements_match_direct_elimination() {
    for (label, len) in [
        ("C2:1:i", 6),
        ("C2:1:vii", 6),
        ("C2:3:iv", 6),
        ("G2:1:iv", 6),
        ("G2:2:ii", 5),
    ] {
        let w = manifest_weights(label).unwrap();
        let desc = find_descriptor(&w, label).unwrap();
        let t = KlTable::new(w, 14).unwrap();
        let ctx = CellContext::new(&t, &desc).unwrap();
        let u = t.universe();
        let mut checked = 0;
        for (i, p) in ctx.cell().pieces.iter().enumerate() {
            let mut solver = ctx.solver(p.d).unwrap();
            for &x in
                p.u.iter()
                    .filter(|&&x| u.length(x) <= len && u.length(x) + u.length(p.d) <= 12)
            {
                let f = solver.f_element(x).unwrap();
                assert_eq!(
                    f.coeffs,
                    eliminate(&ctx, &t, i, p.d, x),
                    "{label} d={} u={}",
                    u.format(p.d),
                    u.format(x)
                );
                checked += 1;
            }
        }
        assert!(checked > 3, "{label}: only {checked} instances");
    }
}
