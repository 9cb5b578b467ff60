//! Conversion between dlog(x)-shaped and dlog(p)-shaped generators at a
//! finite place.
//!
//! Writing p = sum_j p_j x^(d-j) monic and decomposing each coefficient over
//! the 2-basis, p_j = sum_K t^K p_{j,K}^2, the convolution matrix
//! M[(K1,K2)] = P_{K1+K2} with
//!
//!   P_K = t^K * sum_{d-j odd} p_{j,K}^2 x^(d-j)
//!
//! is invertible over the residue field for every separable p except x
//! itself.  Solving M (h_J) = (g, 0, ..., 0) rewrites g/p^s dlog(x) as
//! sum_J h_J/p^(s-1) dlog(t^J p) plus terms whose x-log pole order dropped.
//!
//! Inseparable p (even degree, only even powers of x) instead eliminates the
//! dropped basis variable t_u: with p_i = p_{i,0} + p_{i,1} t_u and
//! p_{i,1} = sum_K t^K p_{i,1,K}^2 over the remaining variables, the matrix
//! entries are Pt_{K1+K2} * t_u with
//!
//!   Pt_K = t^K * sum_{i even} p_{i,1,K}^2 x^(d-i),
//!
//! and sum_K Pt_K = dp/dt_u is nonzero, which forces invertibility.

use std::collections::BTreeMap;

use crate::basis::{two_basis_decompose, MultiIndex};
use crate::completion::Completion;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::linalg::{solve_linear, LinSolve};
use crate::place::Place;
use crate::ratfun::RatFun;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone)]
pub struct ResidueMatrix {
    /// Sorted variable ids indexing rows and columns; subsets of this list
    /// are the masks of `table`.  For inseparable places the dropped
    /// variable is excluded.
    pub vars: Vec<usize>,
    /// P_K (separable) or Pt_K (inseparable), unreduced, keyed by masks over
    /// positions into `vars`.
    pub table: BTreeMap<MultiIndex, UniPoly>,
    /// Scalar on every matrix entry: 1 at separable places, the dropped
    /// variable at inseparable ones.
    pub multiplier: RatFun,
    /// The variable whose dlog the conversion eliminates: the top variable
    /// at separable places, the dropped one at inseparable places.
    pub target: usize,
    pub separable: bool,
}

impl ResidueMatrix {
    pub fn dim(&self) -> usize {
        1 << self.vars.len()
    }

    /// Entry at a pair of index masks, reduced into the residue field.
    pub fn entry(&self, k1: MultiIndex, k2: MultiIndex, ctx: &Completion) -> Result<UniPoly> {
        let key = k1.sym_diff(k2);
        let raw = self.table.get(&key).cloned().unwrap_or_default();
        ctx.reduce(&raw.mul_scalar(&self.multiplier))
    }

    pub fn is_invertible(&self, ctx: &Completion) -> Result<bool> {
        let dim = self.dim();
        let masks: Vec<MultiIndex> = (0..dim).map(|b| MultiIndex(b as u64)).collect();
        let mut rows = Vec::with_capacity(dim);
        for &k1 in &masks {
            let mut row = Vec::with_capacity(dim);
            for &k2 in &masks {
                row.push(self.entry(k1, k2, ctx)?);
            }
            rows.push(row);
        }
        let mut rhs = vec![UniPoly::zero(); dim];
        rhs[0] = UniPoly::one();
        let sol = solve_linear(
            rows,
            rhs,
            UniPoly::zero(),
            &|a| a.is_zero(),
            &|a, b| a.add(b),
            &|a, b| ctx.mul_mod(a, b).expect("multiplication modulo a monic polynomial"),
            &|a| ctx.inv_mod(a),
        )?;
        Ok(matches!(sol, LinSolve::Unique(_)))
    }
}

/// Builds the conversion matrix of a finite place.  A singular matrix at a
/// separable place other than x, or an inseparable table whose sum fails to
/// match the derivative by the dropped variable, signals corruption upstream
/// and is reported as an internal error.
pub fn build_residue_matrix(ctx: &Completion) -> Result<ResidueMatrix> {
    if ctx.place == Place::Infinity {
        return Err(Error::Domain("conversion matrices live at finite places".into()));
    }
    let d = ctx.deg;
    let base_vars = ctx.base_vars();
    // decompositions of every coefficient, keyed by variable-id masks
    let mut parts: Vec<BTreeMap<MultiIndex, RatFun>> = Vec::with_capacity(d + 1);
    let mut support = MultiIndex::EMPTY;
    for j in 0..=d {
        let pj = ctx.monic.coeff(d - j);
        let mut by_id = BTreeMap::new();
        if !pj.is_zero() {
            for (mask, y) in two_basis_decompose(&pj, &base_vars)? {
                if y.is_zero() {
                    continue;
                }
                let id_mask = MultiIndex::from_bits(mask.iter().map(|pos| base_vars[pos]));
                support = support.union(id_mask);
                by_id.insert(id_mask, y);
            }
        }
        parts.push(by_id);
    }
    let separable = ctx.place.is_separable(ctx.main);
    let vars: Vec<usize> = if separable {
        support.iter().collect()
    } else {
        let dropped = ctx
            .dropped
            .ok_or_else(|| Error::Internal("inseparable completion without a dropped variable".into()))?;
        if !support.contains(dropped) {
            return Err(Error::Internal(
                "dropped variable missing from the coefficient decompositions".into(),
            ));
        }
        support.without(dropped).iter().collect()
    };

    let tk_monomial = |k: MultiIndex| -> RatFun {
        let mut acc = RatFun::one();
        for pos in k.iter() {
            acc = acc.mul(&RatFun::var(vars[pos]));
        }
        acc
    };

    let mut table = BTreeMap::new();
    for bits in 0..(1u64 << vars.len()) {
        let k = MultiIndex(bits);
        let id_mask = MultiIndex::from_bits(k.iter().map(|pos| vars[pos]));
        let tk = tk_monomial(k);
        let mut pk = UniPoly::zero();
        for j in 0..=d {
            let lookup = if separable {
                if (d - j) % 2 == 0 {
                    continue;
                }
                id_mask
            } else {
                if (d - j) % 2 == 1 {
                    continue;
                }
                id_mask.with(ctx.dropped.unwrap())
            };
            if let Some(y) = parts[j].get(&lookup) {
                pk = pk.add(&UniPoly::monomial(tk.mul(&y.square()), d - j));
            }
        }
        table.insert(k, pk);
    }

    let (multiplier, target) = if separable {
        (RatFun::one(), ctx.main)
    } else {
        let dropped = ctx.dropped.unwrap();
        // sum of the table must be the derivative of p by the dropped variable
        let mut total = UniPoly::zero();
        for pk in table.values() {
            total = total.add(pk);
        }
        if total != ctx.monic.derivative_coeffs(dropped) {
            return Err(Error::Internal(
                "inseparable table does not sum to the coefficient derivative".into(),
            ));
        }
        (RatFun::var(dropped), dropped)
    };

    let m = ResidueMatrix { vars, table, multiplier, target, separable };
    let is_place_x = d == 1 && ctx.monic == UniPoly::gen();
    if !is_place_x && !m.is_invertible(ctx)? {
        return Err(Error::Internal(format!(
            "singular conversion matrix at {}",
            ctx.place.render(&ctx.tower)
        )));
    }
    Ok(m)
}

/// One rewriting step.  The three parts satisfy, exactly as forms,
///
///   g/p^s dlog(target) = dp_part + remainder,
///
/// where dp_part = sum_J h_J/p^(s-1) dlog(t^J p) and the target-log
/// component of the remainder has pole order at most s-1.
#[derive(Debug, Clone)]
pub struct DxToDpRewrite {
    pub h: BTreeMap<MultiIndex, UniPoly>,
    pub dp_part: DiffForm,
    pub remainder: DiffForm,
}

/// Rewrites g/p^s dlog(x) into dlog(t^J p)-shaped generators by solving
/// M (h_J) = (g, 0, ..., 0) over the residue field; at inseparable places
/// the variant eliminating dlog of the dropped variable is used.  The place
/// x needs no work: dlog(x) is already dlog(p).  Pole order zero passes
/// through untouched.
pub fn convert_dx_to_dp(
    g: &UniPoly,
    s: usize,
    ctx: &Completion,
    m: &ResidueMatrix,
) -> Result<DxToDpRewrite> {
    if g.deg() >= ctx.deg as i64 {
        return Err(Error::Domain(
            "conversion input must be a canonical residue representative".into(),
        ));
    }
    let p_rat = ctx.monic.to_ratfun(ctx.main);
    let input = DiffForm::term(
        1,
        MultiIndex::singleton(m.target),
        g.to_ratfun(ctx.main).mul(&p_rat.pow(-(s as i64))?),
    )?;
    if s == 0 {
        return Ok(DxToDpRewrite {
            h: BTreeMap::new(),
            dp_part: DiffForm::zero(1),
            remainder: input,
        });
    }
    if ctx.deg == 1 && ctx.monic == UniPoly::gen() {
        // p = x: dlog(x) = dlog(p) on the nose
        return Ok(DxToDpRewrite {
            h: BTreeMap::from([(MultiIndex::EMPTY, g.clone())]),
            dp_part: input.clone(),
            remainder: DiffForm::zero(1),
        });
    }

    let dim = m.dim();
    let masks: Vec<MultiIndex> = (0..dim).map(|b| MultiIndex(b as u64)).collect();
    let mut rows = Vec::with_capacity(dim);
    for &k1 in &masks {
        let mut row = Vec::with_capacity(dim);
        for &k2 in &masks {
            row.push(m.entry(k1, k2, ctx)?);
        }
        rows.push(row);
    }
    let mut rhs = vec![UniPoly::zero(); dim];
    rhs[0] = g.clone();
    let sol = solve_linear(
        rows,
        rhs,
        UniPoly::zero(),
        &|a| a.is_zero(),
        &|a, b| a.add(b),
        &|a, b| ctx.mul_mod(a, b).expect("multiplication modulo a monic polynomial"),
        &|a| ctx.inv_mod(a),
    )?;
    let h_vec = match sol {
        LinSolve::Unique(h) => h,
        _ => {
            return Err(Error::Internal(format!(
                "singular conversion system at {}",
                ctx.place.render(&ctx.tower)
            )))
        }
    };

    let mut h = BTreeMap::new();
    let mut dp_part = DiffForm::zero(1);
    let pole = p_rat.pow(-((s - 1) as i64))?;
    for (idx, hj) in h_vec.into_iter().enumerate() {
        if hj.is_zero() {
            continue;
        }
        let k = masks[idx];
        let mut tj = RatFun::one();
        for pos in k.iter() {
            tj = tj.mul(&RatFun::var(m.vars[pos]));
        }
        let coeff = hj.to_ratfun(ctx.main).mul(&pole);
        dp_part = dp_part.add(
            &DiffForm::dlog(&tj.mul(&p_rat), &ctx.tower)?.scalar_mul(&coeff),
        )?;
        h.insert(k, hj);
    }
    let remainder = input.add(&dp_part)?;
    Ok(DxToDpRewrite { h, dp_part, remainder })
}
