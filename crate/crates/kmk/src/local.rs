//! Differential forms over a completed place and their normal form.
//!
//! A global form is re-expressed over the completion's dlog basis (the
//! 2-basis labels of the residue field plus the uniformizer), then rewritten
//! into the canonical decomposition
//!
//!   phi = phi1 + psi + phi2 ^ dlog(pi),
//!
//! where phi1 and phi2 live over the residue field and psi collects the
//! admissible polar terms t^J r^2 dlog(t_I).  Coefficients with positive
//! valuation are Artin-Schreier trivial and never contribute, so only the
//! finitely many coefficients at non-positive exponents are ever inspected.

use std::collections::BTreeMap;

use crate::basis::MultiIndex;
use crate::completion::Completion;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::ratfun::RatFun;
use crate::series::{expand_at, Series};
use crate::teich::{alpha_expand, Lifter};
use crate::unipoly::UniPoly;

/// A form with series coefficients over the completion's dlog basis.
///
/// Mask bits are label positions (`0..pi_pos`) plus the uniformizer bit at
/// `pi_pos`.
#[derive(Debug, Clone)]
pub struct LocalForm {
    degree: usize,
    terms: BTreeMap<MultiIndex, Series>,
}

impl LocalForm {
    pub fn zero(degree: usize) -> LocalForm {
        LocalForm { degree, terms: BTreeMap::new() }
    }

    /// A degree-zero form holding one series.
    pub fn scalar(s: Series) -> LocalForm {
        let mut f = LocalForm::zero(0);
        f.accumulate(MultiIndex::EMPTY, s);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &Series)> {
        self.terms.iter().map(|(m, s)| (*m, s))
    }

    pub fn coeff(&self, mask: MultiIndex) -> Series {
        self.terms.get(&mask).cloned().unwrap_or_else(Series::zero)
    }

    pub fn accumulate(&mut self, mask: MultiIndex, s: Series) {
        debug_assert_eq!(mask.weight(), self.degree as u32);
        if s.is_exact_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(Series::zero);
        *entry = entry.add(&s);
    }

    pub fn add(&self, other: &LocalForm) -> Result<LocalForm> {
        if self.degree != other.degree {
            return Err(Error::Domain(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (mask, s) in other.terms() {
            out.accumulate(mask, s.clone());
        }
        Ok(out)
    }

    /// Exterior product; repeated dlog factors cancel, and there are no signs
    /// in characteristic 2.
    pub fn wedge(&self, other: &LocalForm, ctx: &Completion) -> Result<LocalForm> {
        let mut out = LocalForm::zero(self.degree + other.degree);
        for (m1, s1) in self.terms() {
            for (m2, s2) in other.terms() {
                if !m1.intersect(m2).is_empty() {
                    continue;
                }
                out.accumulate(m1.union(m2), s1.mul(s2, ctx)?);
            }
        }
        Ok(out)
    }
}

/// dlog of a nonzero rational function of the tower, expanded at the place:
/// with f = pi^v u this is (v mod 2) dlog(pi) + du/u, and du is computed from
/// the alpha-adic expansion of u since series coefficients are residue
/// representatives rather than constants of the completion.
pub fn dlog_series(f: &RatFun, ctx: &Completion, lifter: &Lifter, n: usize) -> Result<LocalForm> {
    if f.is_zero() {
        return Err(Error::Domain("dlog of zero".into()));
    }
    let s = expand_at(f, ctx, n)?;
    let v = s
        .val()
        .ok_or_else(|| Error::InsufficientPrecision { needed: 1 })?;
    let u = s.shift(-v);
    let nn = n as i64;
    let uinv = u.invert(ctx, nn)?;

    let npos = ctx.pi_pos();
    let mut du: Vec<Series> = vec![Series::zero(); npos];
    let mut odd = Series::zero();
    for (k, class) in alpha_expand(lifter, &u)? {
        for (pos, slot) in du.iter_mut().enumerate() {
            let label = ctx.reduce(&ctx.label_value(ctx.res_labels[pos]))?;
            let part = ctx.mul_mod(&ctx.derive(&class, pos)?, &label)?;
            if !part.is_zero() {
                *slot = slot.add(&lifter.lift(&part)?.shift(k));
            }
        }
        if k & 1 == 1 {
            odd = odd.add(&lifter.lift(&class)?.shift(k));
        }
    }

    let mut form = LocalForm::zero(1);
    for (pos, c) in du.into_iter().enumerate() {
        // the expansion is only known below pi^n, whatever each term claims
        form.accumulate(MultiIndex::singleton(pos), c.truncate(nn).mul(&uinv, ctx)?);
    }
    let mut cpi = odd.truncate(nn).mul(&uinv, ctx)?;
    if v & 1 == 1 {
        cpi = cpi.add(&Series::constant(UniPoly::one()).truncate(nn));
    }
    form.accumulate(MultiIndex::singleton(npos), cpi);
    Ok(form)
}

/// Re-express a global form over the completion's dlog basis.
pub fn to_local(w: &DiffForm, ctx: &Completion, lifter: &Lifter, n: usize) -> Result<LocalForm> {
    let mut cache: BTreeMap<usize, LocalForm> = BTreeMap::new();
    let mut acc = LocalForm::zero(w.degree());
    for (mask, coeff) in w.terms() {
        let mut term = LocalForm::scalar(expand_at(coeff, ctx, n)?);
        for var in mask.iter() {
            if !cache.contains_key(&var) {
                let d = dlog_series(&RatFun::var(var), ctx, lifter, n)?;
                cache.insert(var, d);
            }
            term = term.wedge(&cache[&var], ctx)?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Polar coefficients r_{I,J} = sum over l >= 1 of lift(u_l) pi^{-l},
/// keyed by (I, J) and stored through the representatives u_l.
pub type PsiMap = BTreeMap<(MultiIndex, MultiIndex), BTreeMap<i64, UniPoly>>;

/// The normal form of a local class: phi1 + psi + phi2 ^ dlog(pi), with phi1
/// and phi2 over the residue field (masks over label positions only) and psi
/// the admissible polar part.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub degree: usize,
    pub phi1: BTreeMap<MultiIndex, UniPoly>,
    pub phi2: BTreeMap<MultiIndex, UniPoly>,
    pub psi: PsiMap,
}

impl LocalDecomposition {
    pub fn empty(degree: usize) -> LocalDecomposition {
        LocalDecomposition {
            degree,
            phi1: BTreeMap::new(),
            phi2: BTreeMap::new(),
            psi: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi1.is_empty() && self.phi2.is_empty() && self.psi.is_empty()
    }

    /// Zero test for the image in W_1, which forgets phi1.
    pub fn w1_is_zero(&self) -> bool {
        self.phi2.is_empty() && self.psi.is_empty()
    }

    fn psi_add(&mut self, i: MultiIndex, j: MultiIndex, pole: i64, rep: UniPoly) {
        let inner = self.psi.entry((i, j)).or_default();
        let slot = inner.entry(pole).or_insert_with(UniPoly::zero);
        *slot = slot.add(&rep);
    }

    fn prune(&mut self) {
        self.phi1.retain(|_, v| !v.is_zero());
        self.phi2.retain(|_, v| !v.is_zero());
        for inner in self.psi.values_mut() {
            inner.retain(|_, v| !v.is_zero());
        }
        self.psi.retain(|_, inner| !inner.is_empty());
    }

    pub fn render(&self, ctx: &Completion) -> String {
        let names = ctx.label_names();
        let mask_str = |m: MultiIndex| -> String {
            if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|p| names[p].clone()).collect::<Vec<_>>().join(",")
            }
        };
        let res_names: Vec<String> = ctx.tower.names().to_vec();
        let mut lines = Vec::new();
        for (mask, c) in &self.phi1 {
            lines.push(format!("phi1[{}] = {}", mask_str(*mask), c.render(&res_names, ctx.tower.var_name(ctx.main))));
        }
        for ((i, j), inner) in &self.psi {
            let body = inner
                .iter()
                .map(|(l, u)| format!("{} / pi^{}", u.render(&res_names, ctx.tower.var_name(ctx.main)), l))
                .collect::<Vec<_>>()
                .join(" + ");
            lines.push(format!("psi[I={}; J={}] = {}", mask_str(*i), mask_str(*j), body));
        }
        for (mask, c) in &self.phi2 {
            lines.push(format!("phi2[{}] = {}", mask_str(*mask), c.render(&res_names, ctx.tower.var_name(ctx.main))));
        }
        if lines.is_empty() {
            lines.push("0".to_string());
        }
        lines.join("\n")
    }
}

/// J is admissible against I when J+I > I in the bit order, i.e. the top bit
/// of J outside I beats the top bit of J inside I.
pub fn admissible(i: MultiIndex, j: MultiIndex) -> bool {
    match (j.minus(i).max_label(), j.intersect(i).max_label()) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(a), Some(b)) => a > b,
    }
}

/// Replacement keys for a term t^J r^2 dlog(t_I) whose J is not admissible
/// against I.  Writing i_l = Max(J inside I), the identity
/// d(t^(J-i_l) r^2 t_(i_l)) = 0 trades dlog at i_l for dlog at each bit of
/// J outside I; every returned I' is admissible against J (the moved bit is
/// below i_l, which now sits outside I').  Admissible input passes through;
/// J inside I returns nothing because the whole term is exact.
pub fn rewrite_trailing(i: MultiIndex, j: MultiIndex) -> Vec<MultiIndex> {
    if admissible(i, j) {
        return vec![i];
    }
    match j.intersect(i).max_label() {
        None => vec![i],
        Some(il) => j.minus(i).iter().map(|k| i.without(il).with(k)).collect(),
    }
}

/// Rewrite a local form into its normal form.
///
/// Queue items (I, s) are processed by splitting s into alpha-adic classes at
/// exponents k <= 0 (positive-exponent tails are Artin-Schreier images and
/// are dropped unseen).  A class at k = 0 lands in phi1 or phi2.  A class at
/// k < 0 is decomposed over the residue 2-basis into terms t^J r^2 with
/// v(r) = -(j+eps) where k = -(2j+eps); each term is either stored (J
/// admissible), halved and requeued (J empty: r^2 = r mod Artin-Schreier),
/// dropped (J inside I: the term is exact), or rewritten with a strictly
/// smaller I using d(t^(J-i_l) r^2 t_(i_l)) = 0 at the top shared bit i_l.
pub fn local_normal_form(
    lf: &LocalForm,
    ctx: &Completion,
    lifter: &Lifter,
) -> Result<LocalDecomposition> {
    let pi = ctx.pi_pos();
    let mut queue: Vec<(MultiIndex, Series)> =
        lf.terms().map(|(m, s)| (m, s.clone())).collect();
    let mut dec = LocalDecomposition::empty(lf.degree());
    let mut fuel: u64 = 1_000_000;
    while let Some((mask, s)) = queue.pop() {
        fuel = fuel.checked_sub(1).ok_or_else(|| {
            Error::Internal("normal-form rewriting exceeded its step budget".into())
        })?;
        if s.is_exact_zero() {
            continue;
        }
        if s.prec() < 1 {
            return Err(Error::InsufficientPrecision { needed: 1 });
        }
        let head = s.truncate(1);
        if head.is_zero_to_prec() {
            continue;
        }
        for (k, class) in alpha_expand(lifter, &head)? {
            if k == 0 {
                let slot = if mask.contains(pi) {
                    dec.phi2.entry(mask.without(pi)).or_insert_with(UniPoly::zero)
                } else {
                    dec.phi1.entry(mask).or_insert_with(UniPoly::zero)
                };
                *slot = slot.add(&class);
                continue;
            }
            let neg = -k;
            let eps = neg & 1;
            let j = neg / 2;
            let pole = j + eps;
            for (jbar, y) in ctx.decompose(&class)? {
                if y.is_zero() {
                    continue;
                }
                let jhat = if eps == 1 { jbar.with(pi) } else { jbar };
                if jhat.is_empty() {
                    // r^2 dlog(t_I) = r dlog(t_I) modulo Artin-Schreier
                    queue.push((mask, lifter.lift(&y)?.shift(-j)));
                } else if admissible(mask, jhat) {
                    dec.psi_add(mask, jhat, pole, y);
                } else {
                    let targets = rewrite_trailing(mask, jhat);
                    if targets.is_empty() {
                        // J inside I: the term is exact and contributes nothing
                        continue;
                    }
                    let r2 = lifter.lift(&y)?.shift(-pole).square(ctx)?;
                    let tj = Series::constant(ctx.basis_monomial(jhat.without(pi))?)
                        .shift(eps);
                    let base = tj.mul(&r2, ctx)?;
                    for target in targets {
                        queue.push((target, base.clone()));
                    }
                }
            }
        }
    }
    dec.prune();
    Ok(dec)
}

/// Normal form with precision retry: run at `n0` coefficients, doubling on
/// precision shortfalls up to `ceiling`.
pub fn normal_form_at(
    w: &DiffForm,
    ctx: &Completion,
    n0: usize,
    ceiling: usize,
) -> Result<LocalDecomposition> {
    let mut n = n0.max(2);
    loop {
        match attempt(w, ctx, n) {
            Err(Error::InsufficientPrecision { .. }) => {
                n *= 2;
                if n > ceiling {
                    return Err(Error::PrecisionCeiling {
                        ceiling,
                        place: ctx.place.render(&ctx.tower),
                    });
                }
            }
            other => return other,
        }
    }
}

fn attempt(w: &DiffForm, ctx: &Completion, n: usize) -> Result<LocalDecomposition> {
    let lifter = Lifter::new(ctx, n as i64)?;
    let lf = to_local(w, ctx, &lifter, n)?;
    local_normal_form(&lf, ctx, &lifter)
}
