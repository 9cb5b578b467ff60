//! The splitting section of the residue at a finite place.
//!
//! W_1 data at p lifts to a global representative by reading every canonical
//! representative as the polynomial it is and every completion label as the
//! global element it names:
//!
//!   psi entry (I, J, {l -> u_l})  ->  t^Jbar p^eps r^2 dlog(t_I),
//!       with r = sum_l u_l(x) / p^l and eps the pi-bit of J,
//!   phi2 entry (I, u)             ->  u(x) dlog(t_I) ^ dlog(p).
//!
//! Reading the data this way reproduces it at p only up to terms of strictly
//! shallower pole depth: a canonical representative is a global polynomial
//! in x, and it differs from the Teichmüller lift of its residue class by a
//! multiple of p, so squares of deep polar tails spill into lower levels.
//! The section therefore iterates: re-expand the candidate at p, form the
//! difference between the data it actually carries and the target, and lift
//! that difference again.  Each pass raises the defect's valuation by at
//! least two, so after finitely many rounds the residue at p is exactly the
//! input.  At any other place of the same degree everything in sight is a
//! unit, so the lift's residue there is zero.

use crate::basis::MultiIndex;
use crate::completion::{Completion, ResLabel};
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::local::admissible;
use crate::place::Place;
use crate::ratfun::RatFun;
use crate::residue::{residue, W1NormalForm};
use crate::unipoly::UniPoly;

fn label_lift(ctx: &Completion, pos: usize) -> Result<RatFun> {
    match ctx.res_labels.get(pos) {
        Some(ResLabel::Var(v)) => Ok(RatFun::var(*v)),
        Some(ResLabel::XBar) => Ok(RatFun::var(ctx.main)),
        None => Err(Error::Domain("mask position beyond the residue 2-basis".into())),
    }
}

fn check_shape(nf: &W1NormalForm, ctx: &Completion) -> Result<()> {
    let pi = ctx.pi_pos();
    let d = ctx.deg as i64;
    for ((i, j), inner) in &nf.psi {
        if i.weight() as usize != nf.degree {
            return Err(Error::Domain("psi index of the wrong weight".into()));
        }
        if !admissible(*i, *j) {
            return Err(Error::Domain("psi key violates the ordering constraint".into()));
        }
        if i.max_label().map(|b| b > pi).unwrap_or(false)
            || j.max_label().map(|b| b > pi).unwrap_or(false)
        {
            return Err(Error::Domain("mask position beyond the completion basis".into()));
        }
        for (l, u) in inner {
            if *l < 1 {
                return Err(Error::Domain("pole orders start at 1".into()));
            }
            if u.deg() >= d {
                return Err(Error::Domain("representative of degree >= deg(place)".into()));
            }
        }
    }
    for (mask, u) in &nf.phi2 {
        if nf.degree == 0 || mask.weight() as usize != nf.degree - 1 {
            return Err(Error::Domain("phi2 index of the wrong weight".into()));
        }
        if mask.max_label().map(|b| b >= pi).unwrap_or(false) {
            return Err(Error::Domain("phi2 mask may not involve the uniformizer".into()));
        }
        if u.deg() >= d {
            return Err(Error::Domain("representative of degree >= deg(place)".into()));
        }
    }
    Ok(())
}

/// The difference of two data blocks at the same place: representatives add
/// coefficientwise and vanishing entries are pruned, so the result is empty
/// exactly when the blocks agree.
fn data_defect(a: &W1NormalForm, b: &W1NormalForm) -> W1NormalForm {
    let mut psi = a.psi.clone();
    for (key, inner) in &b.psi {
        let slot = psi.entry(*key).or_default();
        for (l, u) in inner {
            let cur = slot.entry(*l).or_insert_with(UniPoly::zero);
            *cur = cur.add(u);
        }
    }
    for inner in psi.values_mut() {
        inner.retain(|_, u| !u.is_zero());
    }
    psi.retain(|_, inner| !inner.is_empty());
    let mut phi2 = a.phi2.clone();
    for (mask, u) in &b.phi2 {
        let cur = phi2.entry(*mask).or_insert_with(UniPoly::zero);
        *cur = cur.add(u);
    }
    phi2.retain(|_, u| !u.is_zero());
    W1NormalForm { place: a.place.clone(), degree: a.degree, psi, phi2 }
}

/// Lift W_1 data at a finite place to a global class with that residue and
/// zero residue at every other place of the same degree.
pub fn milnor_split(nf: &W1NormalForm, ctx: &Completion) -> Result<DiffForm> {
    if nf.place == Place::Infinity {
        return Err(Error::Domain(
            "the splitting section is defined at finite places".into(),
        ));
    }
    if nf.place != ctx.place {
        return Err(Error::Domain(
            "normal form and completion disagree on the place".into(),
        ));
    }
    check_shape(nf, ctx)?;
    let mut acc = naive_lift(nf, ctx)?;
    for _ in 0..64 {
        let back = residue(&acc, ctx, 4, 256)?;
        let defect = data_defect(nf, &back);
        if defect.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&naive_lift(&defect, ctx)?)?;
    }
    Err(Error::Internal(format!(
        "splitting correction failed to stabilize at {}",
        ctx.place.render(&ctx.tower)
    )))
}

/// One literal reading of the data as a global form, exact up to spills of
/// strictly shallower pole depth.
fn naive_lift(nf: &W1NormalForm, ctx: &Completion) -> Result<DiffForm> {
    let pi = ctx.pi_pos();
    let p_rat = ctx.monic.to_ratfun(ctx.main);
    let dlog_p = DiffForm::dlog(&p_rat, &ctx.tower)?;
    let mut out = DiffForm::zero(nf.degree);

    for ((i, j), inner) in &nf.psi {
        let mut r = RatFun::zero();
        for (l, u) in inner {
            if u.is_zero() {
                continue;
            }
            r = r.add(&u.to_ratfun(ctx.main).mul(&p_rat.pow(-l)?));
        }
        if r.is_zero() {
            continue;
        }
        let mut coeff = r.square();
        for pos in j.iter() {
            if pos == pi {
                coeff = coeff.mul(&p_rat);
            } else {
                coeff = coeff.mul(&label_lift(ctx, pos)?);
            }
        }
        let mut term = DiffForm::term(0, MultiIndex::EMPTY, coeff)?;
        for pos in i.iter() {
            if pos == pi {
                continue;
            }
            term = term.wedge(&DiffForm::dlog(&label_lift(ctx, pos)?, &ctx.tower)?);
        }
        if i.contains(pi) {
            term = term.wedge(&dlog_p);
        }
        out = out.add(&term)?;
    }

    for (mask, u) in &nf.phi2 {
        let mut term = DiffForm::term(0, MultiIndex::EMPTY, u.to_ratfun(ctx.main))?;
        for pos in mask.iter() {
            term = term.wedge(&DiffForm::dlog(&label_lift(ctx, pos)?, &ctx.tower)?);
        }
        out = out.add(&term.wedge(&dlog_p))?;
    }
    Ok(out)
}
