//! Independent brute-force certifier: search for (eta, xi) with
//! ℘(eta) + d(xi) = omega inside a bounded monomial window, reduced to one
//! Gaussian elimination over GF(2).
//!
//! Over GF(2), (Σ c_i·g_i)² = Σ c_i·g_i², so the bits on window generators
//! map GF(2)-linearly to the coefficients of ℘(eta) + d(xi).  Clearing the
//! fixed window denominator turns witness existence into solvability of a
//! linear system indexed by (log slot, monomial).  A found witness is
//! re-verified by exact form arithmetic before it is returned; absence of a
//! witness says nothing beyond the window searched.

use std::collections::{BTreeMap, BTreeSet};

use crate::basis::MultiIndex;
use crate::decide::{Certificate, CohClass, DecideOpts};
use crate::error::{Error, Result};
use crate::factor::factor_bounded;
use crate::forms::DiffForm;
use crate::poly::{Mono, Poly};
use crate::ratfun::RatFun;
use crate::tower::Tower;

/// A finite search space of coefficients m/u^c: numerator monomials with
/// per-variable degree caps, denominator a fixed power of the allowed
/// product u of irreducibles.
#[derive(Debug, Clone)]
pub struct MonomialWindow {
    pub u: Poly,
    pub max_deg: Vec<usize>,
    pub max_exp: usize,
}

impl MonomialWindow {
    pub fn uniform(u: Poly, deg: usize, exp: usize, nvars: usize) -> MonomialWindow {
        MonomialWindow { u, max_deg: vec![deg; nvars], max_exp: exp }
    }

    fn generators(&self) -> Result<Vec<RatFun>> {
        if self.u.is_zero() {
            return Err(Error::Domain("window denominator must be nonzero".into()));
        }
        let mut upow = Vec::with_capacity(self.max_exp + 1);
        let mut acc = Poly::one();
        for _ in 0..=self.max_exp {
            upow.push(acc.clone());
            acc = acc.mul(&self.u);
        }
        let n = self.max_deg.len();
        let mut gens = Vec::new();
        let mut exps = vec![0u16; n];
        loop {
            let num = Poly::from_mono(Mono::from_exps(exps.clone()));
            for den in &upow {
                gens.push(RatFun::new(num.clone(), den.clone())?);
            }
            // odometer over the exponent box
            let mut v = 0;
            loop {
                if v == n {
                    return Ok(gens);
                }
                if (exps[v] as usize) < self.max_deg[v] {
                    exps[v] += 1;
                    break;
                }
                exps[v] = 0;
                v += 1;
            }
        }
    }
}

fn masks(n: usize, k: usize) -> Vec<MultiIndex> {
    (0u64..(1u64 << n))
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| MultiIndex::from_bits((0..n).filter(move |i| b >> i & 1 == 1)))
        .collect()
}

/// Register the cleared coefficients of a form as rows; `None` means some
/// coefficient falls outside the cleared window.
fn rows_of(
    form: &DiffForm,
    clear: &RatFun,
    row_ids: &mut BTreeMap<(MultiIndex, Mono), usize>,
) -> Option<Vec<usize>> {
    let mut rows = Vec::new();
    for (mask, coeff) in form.terms() {
        let cleared = coeff.mul(clear);
        if !cleared.is_poly() {
            return None;
        }
        for mono in cleared.num().terms() {
            let next = row_ids.len();
            let id = *row_ids.entry((mask, mono.clone())).or_insert(next);
            rows.push(id);
        }
    }
    Some(rows)
}

fn set_bit(v: &mut [u64], i: usize) {
    v[i >> 6] |= 1u64 << (i & 63);
}

fn get_bit(v: &[u64], i: usize) -> bool {
    v[i >> 6] >> (i & 63) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn first_set(v: &[u64], limit: usize) -> Option<usize> {
    for (li, limb) in v.iter().enumerate() {
        if *limb != 0 {
            let i = (li << 6) + limb.trailing_zeros() as usize;
            return if i < limit { Some(i) } else { None };
        }
    }
    None
}

fn and_parity(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |p, (x, y)| p ^ (x & y).count_ones()) & 1 == 1
}

/// Search the window for eta (same degree as omega) and xi (one lower) with
/// ℘(eta) + d(xi) = omega exactly.  `None` is a normal not-found; a
/// returned witness has been verified by direct arithmetic.
pub fn witness_search(
    omega: &DiffForm,
    tower: &Tower,
    window: &MonomialWindow,
) -> Result<Option<(DiffForm, DiffForm)>> {
    let n = tower.len();
    if window.max_deg.len() != n {
        return Err(Error::Domain("window variable count does not match the tower".into()));
    }
    let m = omega.degree();
    let clear = RatFun::from_poly(window.u.pow(2 * window.max_exp as u32));
    let gens = window.generators()?;

    let mut row_ids: BTreeMap<(MultiIndex, Mono), usize> = BTreeMap::new();
    let mut col_meta: Vec<(bool, MultiIndex, usize)> = Vec::new();
    let mut col_rows: Vec<Vec<usize>> = Vec::new();

    for mask in masks(n, m) {
        for (gi, g) in gens.iter().enumerate() {
            let term = DiffForm::term(m, mask, g.clone())?;
            let rows = rows_of(&term.artin_schreier_image(), &clear, &mut row_ids)
                .ok_or_else(|| Error::Internal("window column escaped its own clearing".into()))?;
            col_meta.push((true, mask, gi));
            col_rows.push(rows);
        }
    }
    if m >= 1 {
        for mask in masks(n, m - 1) {
            for (gi, g) in gens.iter().enumerate() {
                let term = DiffForm::term(m - 1, mask, g.clone())?;
                let rows = rows_of(&term.exterior_d(tower), &clear, &mut row_ids)
                    .ok_or_else(|| Error::Internal("window column escaped its own clearing".into()))?;
                col_meta.push((false, mask, gi));
                col_rows.push(rows);
            }
        }
    }

    let rhs_rows = match rows_of(omega, &clear, &mut row_ids) {
        Some(rows) => rows,
        None => return Ok(None),
    };

    let ncols = col_meta.len();
    let nrows = row_ids.len();
    let limbs = (ncols + 1 + 63) >> 6;
    let mut rowbits = vec![vec![0u64; limbs]; nrows];
    for (ci, rows) in col_rows.iter().enumerate() {
        for &r in rows {
            set_bit(&mut rowbits[r], ci);
        }
    }
    for &r in &rhs_rows {
        set_bit(&mut rowbits[r], ncols);
    }

    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut row in rowbits {
        for (pc, prow) in &pivots {
            if get_bit(&row, *pc) {
                xor_into(&mut row, prow);
            }
        }
        match first_set(&row, ncols) {
            Some(c) => pivots.push((c, row)),
            None => {
                if get_bit(&row, ncols) {
                    return Ok(None);
                }
            }
        }
    }

    // back-substitution with free columns set to zero; each pivot column is
    // the lowest set bit of its row, so higher columns are already assigned
    pivots.sort_by(|a, b| b.0.cmp(&a.0));
    let mut sol = vec![0u64; limbs];
    for (c, row) in &pivots {
        let mut bit = and_parity(row, &sol);
        if get_bit(row, ncols) {
            bit = !bit;
        }
        if bit {
            set_bit(&mut sol, *c);
        }
    }

    let mut eta = DiffForm::zero(m);
    let mut xi = DiffForm::zero(m.saturating_sub(1));
    for (ci, (is_eta, mask, gi)) in col_meta.iter().enumerate() {
        if !get_bit(&sol, ci) {
            continue;
        }
        let deg = if *is_eta { m } else { m - 1 };
        let term = DiffForm::term(deg, *mask, gens[*gi].clone())?;
        if *is_eta {
            eta = eta.add(&term)?;
        } else {
            xi = xi.add(&term)?;
        }
    }

    let mut recomb = eta.artin_schreier_image();
    if m >= 1 {
        recomb = recomb.add(&xi.exterior_d(tower))?;
    }
    if !recomb.add(omega)?.is_zero() {
        return Err(Error::Internal("witness failed exact recombination".into()));
    }
    Ok(Some((eta, xi)))
}

/// The allowed denominator for a form's windows: the product of the top
/// variable and every irreducible appearing in the form's coefficients.
pub fn window_denominator(w: &DiffForm, tower: &Tower, factor_bound: usize) -> Result<Poly> {
    let mut u = Poly::one();
    let mut seen: BTreeSet<Poly> = BTreeSet::new();
    if let Ok(main) = tower.top() {
        let x = Poly::var(main);
        seen.insert(x.clone());
        u = u.mul(&x);
    }
    for (_, coeff) in w.terms() {
        for part in [coeff.num(), coeff.den()] {
            if part.is_zero() || part.is_one() {
                continue;
            }
            for (f, _) in factor_bounded(part, factor_bound)? {
                if seen.insert(f.clone()) {
                    u = u.mul(&f);
                }
            }
        }
    }
    Ok(u)
}

/// Uniform windows at the given degrees, each degree doubling as the
/// denominator exponent.
pub fn schedule_with_degrees(u: &Poly, degrees: &[usize], nvars: usize) -> Vec<MonomialWindow> {
    degrees.iter().map(|&d| MonomialWindow::uniform(u.clone(), d, d, nvars)).collect()
}

/// The default window ladder for a form: degrees and denominator exponents
/// 2, 4, 8 (℘ doubles degrees, so the ladder is geometric).
pub fn default_schedule(
    w: &DiffForm,
    tower: &Tower,
    factor_bound: usize,
) -> Result<Vec<MonomialWindow>> {
    let u = window_denominator(w, tower, factor_bound)?;
    Ok(schedule_with_degrees(&u, &[2, 4, 8], tower.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    /// Decision says zero and a witness was found.
    AgreeZero,
    /// Decision says nonzero and no window yields a witness; the oracle
    /// cannot prove nonzeroness, so this is a semi-confirmation only.
    AgreeNonzero,
    /// Decision says zero but no scheduled window is large enough to
    /// exhibit the witness; not a disagreement.
    ZeroUnwitnessed,
    /// Decision says nonzero yet a verified witness exists: a genuine bug.
    Conflict,
}

impl Agreement {
    pub fn label(&self) -> &'static str {
        match self {
            Agreement::AgreeZero => "AGREE-ZERO",
            Agreement::AgreeNonzero => "AGREE-NONZERO",
            Agreement::ZeroUnwitnessed => "ZERO-UNWITNESSED",
            Agreement::Conflict => "CONFLICT",
        }
    }
}

#[derive(Debug)]
pub struct CrossCheck {
    pub agreement: Agreement,
    pub decided_zero: bool,
    /// Index into the schedule of the first window containing a witness.
    pub witness_window: Option<usize>,
    pub certificate: Certificate,
}

/// Run the decision procedure and the witness search against each other.
pub fn cross_check(
    class: &CohClass,
    schedule: &[MonomialWindow],
    opts: &DecideOpts,
) -> Result<CrossCheck> {
    let (decided_zero, certificate) = class.decide_zero(opts)?;
    let mut witness_window = None;
    for (i, window) in schedule.iter().enumerate() {
        if witness_search(&class.form, &class.tower, window)?.is_some() {
            witness_window = Some(i);
            break;
        }
    }
    let agreement = match (decided_zero, witness_window.is_some()) {
        (true, true) => Agreement::AgreeZero,
        (true, false) => Agreement::ZeroUnwitnessed,
        (false, false) => Agreement::AgreeNonzero,
        (false, true) => Agreement::Conflict,
    };
    Ok(CrossCheck { agreement, decided_zero, witness_window, certificate })
}
