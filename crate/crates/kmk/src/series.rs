use crate::completion::Completion;
use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use crate::unipoly::UniPoly;

/// Exact-precision Laurent series in the uniformizer of a completion.
///
/// Coefficients are canonical residue representatives (degree < deg p in the
/// top variable).  `prec` is the absolute exponent bound: coefficients of
/// pi^k are known exactly for all k < prec.  Exact zero carries prec i64::MAX.
/// Normalized: the first stored coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    v: i64,
    coeffs: Vec<UniPoly>,
    prec: i64,
}

pub const EXACT: i64 = i64::MAX;

impl Series {
    pub fn zero() -> Series {
        Series { v: 0, coeffs: Vec::new(), prec: EXACT }
    }

    pub fn zero_to(prec: i64) -> Series {
        Series { v: prec, coeffs: Vec::new(), prec }
    }

    pub fn from_parts(v: i64, coeffs: Vec<UniPoly>, prec: i64) -> Series {
        let mut s = Series { v, coeffs, prec };
        s.normalize();
        s
    }

    /// A single known coefficient c * pi^k, exact when the element really is
    /// a monomial (constants have exact expansions).
    pub fn monomial(c: UniPoly, k: i64) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series { v: k, coeffs: vec![c], prec: EXACT }
    }

    pub fn constant(c: UniPoly) -> Series {
        Series::monomial(c, 0)
    }

    fn normalize(&mut self) {
        while let Some(first) = self.coeffs.first() {
            if first.is_zero() {
                self.coeffs.remove(0);
                self.v += 1;
            } else {
                break;
            }
        }
        while !self.coeffs.is_empty()
            && self.prec != EXACT
            && self.v + self.coeffs.len() as i64 > self.prec
        {
            self.coeffs.pop();
        }
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            if self.prec == EXACT {
                self.v = 0;
            } else {
                self.v = self.prec;
            }
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Valuation: None when the series is zero to its precision.
    pub fn val(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.v)
        }
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == EXACT
    }

    /// Coefficient of pi^k; requesting k at or past the precision is an
    /// InsufficientPrecision error (the adaptive-precision retry signal).
    pub fn coeff_at(&self, k: i64) -> Result<UniPoly> {
        if self.prec != EXACT && k >= self.prec {
            return Err(Error::InsufficientPrecision { needed: k });
        }
        if k < self.v || k >= self.v + self.coeffs.len() as i64 {
            return Ok(UniPoly::zero());
        }
        Ok(self.coeffs[(k - self.v) as usize].clone())
    }

    /// Exponents with nonzero coefficients (within precision).
    pub fn support(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.v + i as i64)
            .collect()
    }

    pub fn shift(&self, k: i64) -> Series {
        if self.coeffs.is_empty() && self.prec == EXACT {
            return self.clone();
        }
        Series {
            v: self.v + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.saturating_add(k),
        }
    }

    pub fn truncate(&self, prec: i64) -> Series {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.normalize();
        s
    }

    pub fn add(&self, other: &Series) -> Series {
        let prec = self.prec.min(other.prec);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return if prec == EXACT { Series::zero() } else { Series::zero_to(prec) };
        }
        let lo = match (self.val(), other.val()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let hi = prec.min(
            (self.v + self.coeffs.len() as i64).max(other.v + other.coeffs.len() as i64),
        );
        let mut coeffs = Vec::new();
        for k in lo..hi {
            let a = if k >= self.v && k < self.v + self.coeffs.len() as i64 {
                self.coeffs[(k - self.v) as usize].clone()
            } else {
                UniPoly::zero()
            };
            let b = if k >= other.v && k < other.v + other.coeffs.len() as i64 {
                other.coeffs[(k - other.v) as usize].clone()
            } else {
                UniPoly::zero()
            };
            coeffs.push(a.add(&b));
        }
        Series::from_parts(lo, coeffs, prec)
    }

    /// Product with carry reduction mod the place polynomial.
    pub fn mul(&self, other: &Series, ctx: &Completion) -> Result<Series> {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Series::zero());
        }
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            // zero to precision: product is zero to combined precision
            let prec = match (self.val(), other.val()) {
                _ => self
                    .prec
                    .saturating_add(other.v)
                    .min(other.prec.saturating_add(self.v)),
            };
            return Ok(Series::zero_to(prec));
        }
        let v = self.v + other.v;
        let prec = self
            .prec
            .saturating_add(other.v)
            .min(other.prec.saturating_add(self.v));
        let len = if prec == EXACT {
            self.coeffs.len() + other.coeffs.len()
        } else {
            ((prec - v) as usize).min(self.coeffs.len() + other.coeffs.len())
        };
        let mut slots = vec![UniPoly::zero(); len + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len || b.is_zero() {
                    continue;
                }
                let (q, r) = a.mul(b).div_rem(&ctx.monic)?;
                slots[i + j] = slots[i + j].add(&r);
                slots[i + j + 1] = slots[i + j + 1].add(&q);
            }
        }
        // Re-reduce: sums of carries can reach degree d again.
        let mut coeffs = Vec::with_capacity(len);
        let mut carry = UniPoly::zero();
        for (idx, slot) in slots.into_iter().enumerate() {
            if idx >= len {
                break;
            }
            let (q, r) = slot.add(&carry).div_rem(&ctx.monic)?;
            coeffs.push(r);
            carry = q;
        }
        Ok(Series::from_parts(v, coeffs, prec))
    }

    /// Square: exactness doubles (char 2: cross terms vanish).
    pub fn square(&self, ctx: &Completion) -> Result<Series> {
        if self.coeffs.is_empty() {
            return Ok(if self.prec == EXACT {
                Series::zero()
            } else {
                Series::zero_to(self.prec.saturating_mul(2))
            });
        }
        let v = 2 * self.v;
        let prec = self.prec.saturating_mul(2);
        let len = if prec == EXACT {
            2 * self.coeffs.len()
        } else {
            ((prec - v) as usize).min(2 * self.coeffs.len())
        };
        let mut coeffs = vec![UniPoly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if 2 * i >= len || a.is_zero() {
                continue;
            }
            let (q, r) = a.square().div_rem(&ctx.monic)?;
            coeffs[2 * i] = coeffs[2 * i].add(&r);
            if 2 * i + 1 < len {
                coeffs[2 * i + 1] = coeffs[2 * i + 1].add(&q);
            }
        }
        Ok(Series::from_parts(v, coeffs, prec))
    }

    /// Multiplicative inverse by Newton iteration to `n` coefficients
    /// (relative precision; inverses of exact series are rarely finite, so
    /// the caller states how much it needs).  With e = 1 + u*w, the update
    /// w(1 + e) doubles the error's valuation each round.
    pub fn invert(&self, ctx: &Completion, n: i64) -> Result<Series> {
        let v = self.val().ok_or_else(|| {
            Error::Domain("inverse of a series that is zero to its precision".into())
        })?;
        let rel_avail = if self.prec == EXACT { EXACT } else { self.prec - v };
        let rel = n.min(rel_avail);
        if rel < 1 {
            return Err(Error::InsufficientPrecision { needed: v + 1 });
        }
        let unit = self.shift(-v).truncate(rel);
        let c0_inv = ctx.inv_mod(&unit.coeff_at(0)?)?;
        let mut w = Series { v: 0, coeffs: vec![c0_inv], prec: rel };
        let one = Series::constant(UniPoly::one());
        let mut good: i64 = 1;
        while good < rel {
            let e = one.add(&unit.mul(&w, ctx)?);
            if e.is_zero_to_prec() {
                break;
            }
            w = w.mul(&one.add(&e), ctx)?;
            good *= 2;
        }
        Ok(w.shift(-v))
    }

    pub fn div(&self, other: &Series, ctx: &Completion, n: i64) -> Result<Series> {
        self.mul(&other.invert(ctx, n)?, ctx)
    }

    /// Evaluate a polynomial with base-field coefficients at this series,
    /// Horner style.
    pub fn eval_poly(p: &UniPoly, at: &Series, ctx: &Completion) -> Result<Series> {
        if p.is_zero() {
            return Ok(Series::zero());
        }
        let mut acc = Series::zero();
        for k in (0..=p.deg()).rev() {
            acc = acc.mul(at, ctx)?;
            acc = acc.add(&Series::constant(UniPoly::constant(p.coeff(k as usize))));
        }
        Ok(acc)
    }

    pub fn render(&self, ctx: &Completion) -> String {
        let names = ctx.tower.names().to_vec();
        let main = ctx.tower.var_name(ctx.main);
        let pi = "pi";
        if self.coeffs.is_empty() {
            return if self.prec == EXACT {
                "0".to_string()
            } else {
                format!("O({pi}^{})", self.prec)
            };
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.v + i as i64;
            let cs = c.render(&names, main);
            let cs = if c.deg() > 0 || c.coeff(0).num().term_count() > 1 {
                format!("({cs})")
            } else {
                cs
            };
            let piece = match k {
                0 => cs,
                1 => format!("{cs}*{pi}"),
                _ => format!("{cs}*{pi}^{k}"),
            };
            parts.push(piece);
        }
        if self.prec != EXACT {
            parts.push(format!("O({pi}^{})", self.prec));
        }
        parts.join(" + ")
    }
}

/// Expand a rational function of the tower at the completion's place:
/// exactly `n` coefficients starting at the valuation.
pub fn expand_at(f: &RatFun, ctx: &Completion, n: usize) -> Result<Series> {
    if f.is_zero() {
        return Ok(Series::zero());
    }
    if n == 0 {
        return Err(Error::Domain("requested zero coefficients".into()));
    }
    match &ctx.place {
        crate::place::Place::Infinity => expand_infinity(f, ctx, n),
        crate::place::Place::Finite(_) => expand_finite(f, ctx, n),
    }
}

fn strip_place_power(mut a: UniPoly, ctx: &Completion) -> Result<(i64, UniPoly)> {
    let mut k = 0i64;
    loop {
        let (q, r) = a.div_rem(&ctx.monic)?;
        if r.is_zero() && !q.is_zero() {
            a = q;
            k += 1;
        } else {
            return Ok((k, a));
        }
    }
}

fn expand_finite(f: &RatFun, ctx: &Completion, n: usize) -> Result<Series> {
    let num = UniPoly::from_poly(f.num(), ctx.main);
    let den = UniPoly::from_poly(f.den(), ctx.main);
    let (vn, num) = strip_place_power(num, ctx)?;
    let (vd, den) = strip_place_power(den, ctx)?;
    let v = vn - vd;
    let den_inv = ctx.inv_mod(&den.rem(&ctx.monic)?)?;
    let mut cur = num;
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        if cur.is_zero() {
            // expansion terminated: the remaining tail is exactly zero
            return Ok(Series::from_parts(v, coeffs, EXACT));
        }
        let c = ctx.mul_mod(&cur.rem(&ctx.monic)?, &den_inv)?;
        coeffs.push(c.clone());
        // cur <- (cur + c*den) / p  (exact division)
        let (q, r) = cur.add(&c.mul(&den)).div_rem(&ctx.monic)?;
        debug_assert!(r.is_zero());
        cur = q;
    }
    Ok(Series::from_parts(v, coeffs, v + n as i64))
}

fn expand_infinity(f: &RatFun, ctx: &Completion, n: usize) -> Result<Series> {
    let num = UniPoly::from_poly(f.num(), ctx.main);
    let den = UniPoly::from_poly(f.den(), ctx.main);
    let dn = num.deg();
    let dd = den.deg();
    let v = dd - dn;
    // reversed coefficient sequences: u^deg * P(1/u)
    let rev = |p: &UniPoly, d: i64| -> Vec<RatFun> {
        (0..=d).map(|i| p.coeff((d - i) as usize)).collect()
    };
    let nrev = rev(&num, dn);
    let drev = rev(&den, dd);
    let d0_inv = drev[0].inv()?;
    let mut coeffs: Vec<RatFun> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = nrev.get(k).cloned().unwrap_or_else(RatFun::zero);
        for i in 1..=k {
            if let Some(di) = drev.get(i) {
                acc = acc.add(&di.mul(&coeffs[k - i]));
            }
        }
        coeffs.push(acc.mul(&d0_inv));
    }
    // numerator reversed has finite length; the quotient terminates only if
    // the division does, so precision is honest here
    let exact = {
        // if den is a monomial u^dd the series equals nrev/d0 exactly
        drev.iter().skip(1).all(|c| c.is_zero()) && n >= nrev.len()
    };
    let prec = if exact { EXACT } else { v + n as i64 };
    Ok(Series::from_parts(
        v,
        coeffs.into_iter().map(UniPoly::constant).collect(),
        prec,
    ))
}

/// Solve y^2 + y = s for v(s) >= 1 by the contracting iteration y <- s + y^2.
pub fn solve_artin_schreier(s: &Series, ctx: &Completion, n: i64) -> Result<Series> {
    if let Some(v) = s.val() {
        if v < 1 {
            return Err(Error::Domain(format!(
                "artin-schreier fixpoint needs valuation >= 1, got {v}"
            )));
        }
    }
    let s = s.truncate(n);
    let mut y = Series::zero_to(n.min(s.prec()));
    let mut steps = 1i64;
    while steps < 2 * n {
        y = s.add(&y.square(ctx)?).truncate(n.min(s.prec()));
        steps *= 2;
    }
    // verify the contract to the available precision
    let check = y.square(ctx)?.add(&y).add(&s);
    if !check.is_zero_to_prec() {
        return Err(Error::Internal("artin-schreier iteration failed to converge".into()));
    }
    Ok(y)
}

/// Reasons a negative-valuation scalar cannot be in the Artin-Schreier image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoleCertificate {
    OddValuation(i64),
    NonsquareLeading(i64),
}

/// Certificate that a (with v(a) < 0) lies outside the Artin-Schreier image
/// of the completion: odd pole order, or non-square leading coefficient.
/// None is inconclusive (and trivially so for v(a) >= 0).
pub fn nonzero_certificate(a: &Series, ctx: &Completion) -> Result<Option<PoleCertificate>> {
    let Some(v) = a.val() else {
        return Ok(None);
    };
    if v >= 0 {
        return Ok(None);
    }
    if v % 2 != 0 {
        return Ok(Some(PoleCertificate::OddValuation(v)));
    }
    let lead = a.coeff_at(v)?;
    if ctx.sqrt_res(&lead)?.is_none() {
        return Ok(Some(PoleCertificate::NonsquareLeading(v)));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::place::Place;
    use crate::poly::Poly;
    use crate::tower::Tower;

    fn tower() -> Tower {
        Tower::parse("t;x").unwrap()
    }
    fn t() -> Poly {
        Poly::var(0)
    }
    fn x() -> Poly {
        Poly::var(1)
    }

    fn ctx_at_x() -> Completion {
        let tw = tower();
        let p = Place::finite(x(), &tw, 12).unwrap();
        Completion::new(&tw, &p, 12).unwrap()
    }

    #[test]
    fn expand_unit_at_linear_place() {
        // 1/(x^2 + x) at p = x: v = -1, coefficients 1,1,1,1 (geometric)
        let ctx = ctx_at_x();
        let f = RatFun::one().div(&RatFun::from_poly(x().pow(2).add(&x()))).unwrap();
        let s = expand_at(&f, &ctx, 4).unwrap();
        assert_eq!(s.val(), Some(-1));
        for k in -1..3 {
            assert!(s.coeff_at(k).unwrap().is_one(), "coefficient at {k}");
        }
        assert_eq!(s.prec(), 3);
    }

    #[test]
    fn expand_at_infinity_example() {
        // (x^3 + 1)/x at infinity: v = -2, x^2 + 1/x = u^-2 + u
        let tw = tower();
        let ctx = Completion::new(&tw, &Place::Infinity, 12).unwrap();
        let f = RatFun::from_poly(x().pow(3).add(&Poly::one())).div(&RatFun::from_poly(x())).unwrap();
        let s = expand_at(&f, &ctx, 4).unwrap();
        assert_eq!(s.val(), Some(-2));
        assert!(s.coeff_at(-2).unwrap().is_one());
        assert!(s.coeff_at(-1).unwrap().is_zero());
        assert!(s.coeff_at(0).unwrap().is_zero());
        assert!(s.coeff_at(1).unwrap().is_one());
    }

    #[test]
    fn expansion_of_t_at_inseparable_place() {
        // t = x^2 + p at p = x^2 + t: canonical coefficients X^2 mod p = t...
        // t is its own canonical representative: constant exact series.
        let tw = tower();
        let pl = Place::finite(x().pow(2).add(&t()), &tw, 12).unwrap();
        let ctx = Completion::new(&tw, &pl, 12).unwrap();
        let s = expand_at(&RatFun::var(0), &ctx, 4).unwrap();
        assert_eq!(s.val(), Some(0));
        assert_eq!(s.coeff_at(0).unwrap(), UniPoly::constant(RatFun::var(0)));
        assert!(s.coeff_at(1).unwrap().is_zero());
    }

    #[test]
    fn mul_has_carries() {
        // at p = x: (x + 1)*(x + 1) = x^2 + 1: series (1 + pi)^2 = 1 + pi^2
        let ctx = ctx_at_x();
        let f = RatFun::from_poly(x().add(&Poly::one()));
        let s = expand_at(&f, &ctx, 5).unwrap();
        let sq = s.mul(&s, &ctx).unwrap();
        assert!(sq.coeff_at(0).unwrap().is_one());
        assert!(sq.coeff_at(1).unwrap().is_zero());
        assert!(sq.coeff_at(2).unwrap().is_one());
        assert_eq!(sq, s.square(&ctx).unwrap().truncate(sq.prec()));
    }

    #[test]
    fn invert_round_trip() {
        let ctx = ctx_at_x();
        let f = RatFun::from_poly(x().pow(2).add(&x()).add(&t()));
        let s = expand_at(&f, &ctx, 8).unwrap();
        let inv = s.invert(&ctx, 6).unwrap();
        let prod = s.mul(&inv, &ctx).unwrap();
        assert!(prod.coeff_at(0).unwrap().is_one());
        for k in 1..6 {
            assert!(prod.coeff_at(k).unwrap().is_zero(), "at {k}");
        }
        // against the exact expansion of 1/f
        let direct = expand_at(&RatFun::one().div(&f).unwrap(), &ctx, 6).unwrap();
        for k in 0..5 {
            assert_eq!(inv.coeff_at(k).unwrap(), direct.coeff_at(k).unwrap());
        }
    }

    #[test]
    fn artin_schreier_fixpoint() {
        // s = pi, N = 5: y = pi + pi^2 + pi^4
        let ctx = ctx_at_x();
        let s = expand_at(&RatFun::var(1), &ctx, 6).unwrap();
        let y = solve_artin_schreier(&s, &ctx, 5).unwrap();
        assert_eq!(y.support(), vec![1, 2, 4]);
        // s = pi^3, N = 7: y = pi^3 + pi^6
        let s3 = expand_at(&RatFun::from_poly(x().pow(3)), &ctx, 8).unwrap();
        let y3 = solve_artin_schreier(&s3, &ctx, 7).unwrap();
        assert_eq!(y3.support(), vec![3, 6]);
    }

    #[test]
    fn artin_schreier_rejects_units() {
        let ctx = ctx_at_x();
        let s = expand_at(&RatFun::var(0), &ctx, 6).unwrap();
        assert!(solve_artin_schreier(&s, &ctx, 5).is_err());
    }

    #[test]
    fn pole_certificates() {
        let ctx = ctx_at_x();
        // t/x: odd pole
        let f = RatFun::var(0).div(&RatFun::var(1)).unwrap();
        let s = expand_at(&f, &ctx, 6).unwrap();
        assert_eq!(
            nonzero_certificate(&s, &ctx).unwrap(),
            Some(PoleCertificate::OddValuation(-1))
        );
        // t/x^2: even pole, nonsquare leading coefficient t
        let g = RatFun::var(0).div(&RatFun::from_poly(x().pow(2))).unwrap();
        let sg = expand_at(&g, &ctx, 6).unwrap();
        assert_eq!(
            nonzero_certificate(&sg, &ctx).unwrap(),
            Some(PoleCertificate::NonsquareLeading(-2))
        );
        // t^2/x^2: square leading coefficient: inconclusive
        let h = RatFun::var(0).square().div(&RatFun::from_poly(x().pow(2))).unwrap();
        let sh = expand_at(&h, &ctx, 6).unwrap();
        assert_eq!(nonzero_certificate(&sh, &ctx).unwrap(), None);
    }

    #[test]
    fn precision_signal_fires() {
        let ctx = ctx_at_x();
        let f = RatFun::one().div(&RatFun::from_poly(x().add(&Poly::one()))).unwrap();
        let s = expand_at(&f, &ctx, 3).unwrap();
        assert!(matches!(
            s.coeff_at(5),
            Err(Error::InsufficientPrecision { needed: 5 })
        ));
    }
}
