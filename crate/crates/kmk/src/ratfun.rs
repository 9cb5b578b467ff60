use crate::error::{Error, Result};
use crate::poly::Poly;

/// A rational function over GF(2): num/den with gcd(num, den) = 1, den != 0.
/// Canonical: equal classes have structurally equal (num, den).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("division by zero polynomial".into()));
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun { num, den: Poly::one() };
        }
        if den.is_one() {
            return RatFun { num, den };
        }
        let g = num.gcd(&den);
        if g.is_one() {
            RatFun { num, den }
        } else {
            RatFun {
                num: num.div_exact(&g).expect("gcd divides"),
                den: den.div_exact(&g).expect("gcd divides"),
            }
        }
    }

    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn var(id: usize) -> Self {
        RatFun { num: Poly::var(id), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::reduced(num, den)
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return RatFun::zero();
        }
        // Cross-reduce first to keep intermediate products small.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFun { num: n1.mul(&n2), den: d1.mul(&d2) }
    }

    pub fn inv(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(RatFun { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn div(&self, other: &RatFun) -> Result<RatFun> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn square(&self) -> RatFun {
        RatFun { num: self.num.square(), den: self.den.square() }
    }

    /// Square root when this is a square: with gcd(num, den) = 1 the fraction
    /// is a square exactly when both parts are.
    pub fn sqrt(&self) -> Option<RatFun> {
        Some(RatFun { num: self.num.sqrt()?, den: self.den.sqrt()? })
    }

    pub fn pow(&self, e: i64) -> Result<RatFun> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFun::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.square();
            k >>= 1;
        }
        Ok(acc)
    }

    /// Partial derivative (quotient rule; characteristic 2 so signs vanish).
    pub fn derivative(&self, var: usize) -> RatFun {
        let n = self.num.derivative(var).mul(&self.den).add(&self.num.mul(&self.den.derivative(var)));
        Self::reduced(n, self.den.square())
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    /// Substitute an image for every variable id; errors when a denominator
    /// vanishes under the substitution.
    pub fn subst(&self, images: &[RatFun]) -> Result<RatFun> {
        let n = subst_poly(&self.num, images)?;
        let d = subst_poly(&self.den, images)?;
        if d.is_zero() {
            return Err(Error::Domain("substitution sends denominator to zero".into()));
        }
        n.div(&d)
    }

    pub fn render(&self, names: &[String]) -> String {
        let n = self.num.render(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.render(names);
        let np = if self.num.term_count() > 1 { format!("({n})") } else { n };
        let dp = if self.den.term_count() > 1 { format!("({d})") } else { d };
        format!("{np}/{dp}")
    }
}

fn subst_poly(p: &Poly, images: &[RatFun]) -> Result<RatFun> {
    let mut out = RatFun::zero();
    for t in p.terms() {
        let mut prod = RatFun::one();
        if let Some(mv) = t.max_var() {
            for i in 0..=mv {
                let e = t.exp(i);
                if e > 0 {
                    let img = images.get(i).cloned().unwrap_or_else(|| RatFun::var(i));
                    prod = prod.mul(&img.pow(e as i64)?);
                }
            }
        }
        out = out.add(&prod);
    }
    Ok(out)
}
