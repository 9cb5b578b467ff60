use crate::completion::Completion;
use crate::error::{Error, Result};
use crate::series::Series;
use crate::unipoly::UniPoly;

/// Multiplicative lift of residue-field elements into a completion.
///
/// The lift is pinned down by where it sends the residue 2-basis: base
/// variables go to themselves, and the residue generator (when present) goes
/// to the Hensel root of the place polynomial.  For inseparable places no
/// such root exists; there the lift is built recursively from 2-basis
/// decompositions, squaring the (arbitrary) lifts of the cofactors so that
/// depth h is correct modulo pi^(2^h).
pub struct Lifter<'a> {
    ctx: &'a Completion,
    n: i64,
    theta: Option<Series>,
    depth: u32,
}

impl<'a> Lifter<'a> {
    pub fn new(ctx: &'a Completion, n: i64) -> Result<Lifter<'a>> {
        if n < 1 {
            return Err(Error::Domain("lift precision must be at least 1".into()));
        }
        let mut lifter = Lifter { ctx, n, theta: None, depth: 0 };
        match &ctx.place {
            crate::place::Place::Infinity => {}
            crate::place::Place::Finite(_) => {
                if ctx.dropped.is_none() {
                    lifter.theta = Some(newton_root(ctx, n)?);
                } else {
                    let mut depth = 0u32;
                    while (1i64 << depth) < n {
                        depth += 1;
                        if depth > 40 {
                            return Err(Error::Domain(format!(
                                "lift precision {n} out of range"
                            )));
                        }
                    }
                    lifter.depth = depth;
                }
            }
        }
        Ok(lifter)
    }

    pub fn precision(&self) -> i64 {
        self.n
    }

    /// Lift a canonical residue representative.
    pub fn lift(&self, a: &UniPoly) -> Result<Series> {
        if a.is_zero() {
            return Ok(Series::zero());
        }
        match &self.ctx.place {
            crate::place::Place::Infinity => {
                if a.deg() > 0 {
                    return Err(Error::Internal(
                        "nonconstant representative at the degree-one place".into(),
                    ));
                }
                Ok(Series::constant(a.clone()))
            }
            crate::place::Place::Finite(_) => match &self.theta {
                Some(theta) => {
                    Ok(Series::eval_poly(a, theta, self.ctx)?.truncate(self.n))
                }
                None => Ok(self.lift_rec(a, self.depth)?.truncate(self.n)),
            },
        }
    }

    fn lift_rec(&self, a: &UniPoly, depth: u32) -> Result<Series> {
        if a.is_zero() {
            return Ok(Series::zero());
        }
        if depth == 0 {
            return Ok(Series::constant(a.clone()));
        }
        let parts = self.ctx.decompose(a)?;
        let mut acc = Series::zero();
        for (mask, y) in parts {
            let square = self.lift_rec(&y, depth - 1)?.square(self.ctx)?;
            let term = self.label_lift(mask)?.mul(&square, self.ctx)?;
            acc = acc.add(&term);
        }
        Ok(acc.truncate(self.n))
    }

    /// Exact product of the chosen lifts of the labels in `mask`.
    fn label_lift(&self, mask: crate::basis::MultiIndex) -> Result<Series> {
        let mut acc = Series::constant(UniPoly::one());
        for pos in mask.iter() {
            let value = self.ctx.label_value(self.ctx.res_labels[pos]);
            acc = acc.mul(&Series::constant(self.ctx.reduce(&value)?), self.ctx)?;
        }
        Ok(acc)
    }
}

/// Hensel root of the place polynomial: the unique root congruent to the
/// residue generator.  Quadratic convergence, so ceil(log2 n) rounds.
fn newton_root(ctx: &Completion, n: i64) -> Result<Series> {
    let p = &ctx.monic;
    let dp = p.derivative_main();
    let x0 = UniPoly::gen().rem(p)?;
    let mut theta = Series::from_parts(0, vec![x0], n);
    loop {
        let value = Series::eval_poly(p, &theta, ctx)?;
        if value.is_zero_to_prec() {
            break;
        }
        let slope = Series::eval_poly(&dp, &theta, ctx)?;
        theta = theta.add(&value.div(&slope, ctx, n)?).truncate(n);
    }
    Ok(theta)
}

/// Re-expand a series over lifted coefficients: returns (k, class) pairs with
/// s = sum over k of lift(class_k) * pi^k, to the stated precision.  This is
/// the expansion differentiation works on, since canonical representatives
/// are not constants of the completion.
pub fn alpha_expand(lifter: &Lifter, s: &Series) -> Result<Vec<(i64, UniPoly)>> {
    let n = lifter.precision().min(s.prec());
    let mut rest = s.truncate(n);
    let mut out = Vec::new();
    while let Some(k) = rest.val() {
        if k >= n {
            break;
        }
        let class = rest.coeff_at(k)?;
        out.push((k, class.clone()));
        let lifted = lifter.lift(&class)?.shift(k);
        rest = rest.add(&lifted).truncate(n);
        if let Some(k2) = rest.val() {
            if k2 <= k {
                return Err(Error::Internal(
                    "alpha expansion failed to make progress".into(),
                ));
            }
        }
    }
    Ok(out)
}
