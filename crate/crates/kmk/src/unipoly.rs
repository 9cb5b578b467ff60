use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;

/// Dense univariate polynomial in a distinguished variable with rational
/// function coefficients (the coefficients must not involve that variable).
/// Residue-field elements mod p are stored as UniPolys of degree < deg p.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<RatFun>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(RatFun::one())
    }

    pub fn constant(c: RatFun) -> Self {
        let mut p = UniPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn monomial(c: RatFun, e: usize) -> Self {
        let mut coeffs = vec![RatFun::zero(); e + 1];
        coeffs[e] = c;
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn gen() -> Self {
        UniPoly::monomial(RatFun::one(), 1)
    }

    pub fn from_coeffs(coeffs: Vec<RatFun>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, e: usize) -> RatFun {
        self.coeffs.get(e).cloned().unwrap_or_else(RatFun::zero)
    }

    pub fn coeffs(&self) -> &[RatFun] {
        &self.coeffs
    }

    pub fn lead(&self) -> Option<&RatFun> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i)));
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![RatFun::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn mul_scalar(&self, s: &RatFun) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// Coefficient-wise Frobenius with doubled exponents: (sum c_i X^i)^2.
    pub fn square(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![RatFun::zero(); 2 * self.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.square();
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if divisor.is_zero() {
            return Err(Error::Domain("univariate division by zero".into()));
        }
        let dlead = divisor.lead().unwrap().inv()?;
        let dd = divisor.deg();
        let mut rem = self.clone();
        let mut quo = vec![RatFun::zero(); (self.deg() - dd + 1).max(0) as usize];
        while rem.deg() >= dd && !rem.is_zero() {
            let shift = (rem.deg() - dd) as usize;
            let factor = rem.lead().unwrap().mul(&dlead);
            quo[shift] = quo[shift].add(&factor);
            let sub = divisor.mul(&UniPoly::monomial(factor, shift));
            rem = rem.add(&sub);
        }
        Ok((UniPoly::from_coeffs(quo), rem))
    }

    pub fn rem(&self, modulus: &UniPoly) -> Result<UniPoly> {
        Ok(self.div_rem(modulus)?.1)
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn ext_gcd(&self, other: &UniPoly) -> Result<(UniPoly, UniPoly, UniPoly)> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = UniPoly::one();
        let mut s1 = UniPoly::zero();
        let mut t0 = UniPoly::zero();
        let mut t1 = UniPoly::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.add(&q.mul(&s1));
            let t = t0.add(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return Ok((UniPoly::zero(), UniPoly::zero(), UniPoly::zero()));
        }
        let lead_inv = r0.lead().unwrap().inv()?;
        Ok((
            r0.mul_scalar(&lead_inv),
            s0.mul_scalar(&lead_inv),
            t0.mul_scalar(&lead_inv),
        ))
    }

    /// Inverse modulo `modulus` (which must be coprime to self).
    pub fn inverse_mod(&self, modulus: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero residue".into()));
        }
        let (g, s, _) = self.ext_gcd(modulus)?;
        if !g.is_one() {
            return Err(Error::Domain("residue not invertible: gcd nontrivial".into()));
        }
        s.rem(modulus)
    }

    /// d/dX: characteristic 2, only odd exponents survive.
    pub fn derivative_main(&self) -> UniPoly {
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i >= 1 && i % 2 == 1 {
                while coeffs.len() < i - 1 {
                    coeffs.push(RatFun::zero());
                }
                coeffs.push(c.clone());
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Coefficient-wise partial derivative with respect to variable `var`.
    pub fn derivative_coeffs(&self, var: usize) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c.derivative(var)).collect())
    }

    pub fn eval(&self, at: &RatFun) -> RatFun {
        let mut acc = RatFun::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Interpret as a rational function with X = variable `main`.
    pub fn to_ratfun(&self, main: usize) -> RatFun {
        self.eval(&RatFun::var(main))
    }

    /// Split a multivariate polynomial by powers of `main`.
    pub fn from_poly(p: &Poly, main: usize) -> UniPoly {
        let parts = p.as_univar(main);
        UniPoly::from_coeffs(parts.into_iter().map(RatFun::from_poly).collect())
    }

    /// Split a rational function whose denominator is free of `main`.
    pub fn from_ratfun(f: &RatFun, main: usize) -> Result<UniPoly> {
        if f.den().uses_var(main) {
            return Err(Error::Domain("denominator involves the place variable".into()));
        }
        let den = RatFun::from_poly(f.den().clone());
        let num = UniPoly::from_poly(f.num(), main);
        let dinv = den.inv()?;
        Ok(num.mul_scalar(&dinv))
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.coeffs.iter().any(|c| c.uses_var(var))
    }

    pub fn render(&self, names: &[String], main: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.render(names);
            let piece = match i {
                0 => cs,
                1 if c.is_one() => main.to_string(),
                1 => format!("{cs}*{main}"),
                _ if c.is_one() => format!("{main}^{i}"),
                _ => format!("{cs}*{main}^{i}"),
            };
            let piece = if c.num().term_count() > 1 && i > 0 && !c.is_one() {
                // coefficient with several terms: parenthesize for readability
                match i {
                    1 => format!("({})*{main}", c.render(names)),
                    _ => format!("({})*{main}^{i}", c.render(names)),
                }
            } else {
                piece
            };
            parts.push(piece);
        }
        parts.join(" + ")
    }
}
