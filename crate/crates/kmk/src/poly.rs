use std::cmp::Ordering;
use std::collections::BTreeSet;

/// A monomial in variables 0..k: exponent vector with trailing zeros trimmed.
///
/// Ordering is lexicographic with variable 0 most significant, which is a
/// monomial order (multiplicative, 1 minimal), so leading-term division is
/// sound for exact division tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    exps: Vec<u16>,
}

impl Mono {
    pub fn one() -> Self {
        Mono { exps: Vec::new() }
    }

    pub fn var(id: usize) -> Self {
        let mut exps = vec![0; id + 1];
        exps[id] = 1;
        Mono { exps }
    }

    pub fn from_exps(mut exps: Vec<u16>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Mono { exps }
    }

    pub fn exp(&self, var: usize) -> u16 {
        self.exps.get(var).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn total_deg(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        if self.exps.is_empty() {
            None
        } else {
            Some(self.exps.len() - 1)
        }
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let n = self.exps.len().max(other.exps.len());
        let mut exps = vec![0u16; n];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exp(i) + other.exp(i);
        }
        Mono::from_exps(exps)
    }

    /// self / other, or None when some exponent would go negative.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        if other.exps.len() > self.exps.len() {
            return None;
        }
        let mut exps = self.exps.clone();
        for (i, &e) in other.exps.iter().enumerate() {
            if exps[i] < e {
                return None;
            }
            exps[i] -= e;
        }
        Some(Mono::from_exps(exps))
    }

    pub fn square(&self) -> Mono {
        Mono::from_exps(self.exps.iter().map(|&e| e * 2).collect())
    }

    pub fn sqrt(&self) -> Option<Mono> {
        if self.exps.iter().any(|&e| e % 2 != 0) {
            return None;
        }
        Some(Mono::from_exps(self.exps.iter().map(|&e| e / 2).collect()))
    }

    /// Split into (parity part, half of the even part): m = par * half^2.
    pub fn parity_split(&self) -> (Mono, Mono) {
        let par = Mono::from_exps(self.exps.iter().map(|&e| e % 2).collect());
        let half = Mono::from_exps(self.exps.iter().map(|&e| e / 2).collect());
        (par, half)
    }

    /// The set of variables with odd exponent, as a bitmask.
    pub fn odd_mask(&self) -> u64 {
        let mut m = 0u64;
        for (i, &e) in self.exps.iter().enumerate() {
            if e % 2 == 1 {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = names.get(i).map(|s| s.as_str()).unwrap_or("?");
            if e == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.exps.len().max(other.exps.len());
        for i in 0..n {
            match self.exp(i).cmp(&other.exp(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Sparse multivariate polynomial over GF(2): the set of its monomials.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeSet<Mono>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeSet::new() }
    }

    pub fn one() -> Self {
        Poly::from_mono(Mono::one())
    }

    pub fn var(id: usize) -> Self {
        Poly::from_mono(Mono::var(id))
    }

    pub fn from_mono(m: Mono) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Poly { terms }
    }

    pub fn from_monos<I: IntoIterator<Item = Mono>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for m in iter {
            p.toggle(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().unwrap().is_one()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Mono> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn toggle(&mut self, m: Mono) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Poly { terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        // XOR-accumulate products; over GF(2) colliding terms cancel in pairs.
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for a in &small.terms {
            for b in &big.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|t| t.mul(m)).collect() }
    }

    pub fn square(&self) -> Poly {
        // Frobenius: (sum of monomials)^2 = sum of squared monomials.
        Poly { terms: self.terms.iter().map(|t| t.square()).collect() }
    }

    pub fn sqrt(&self) -> Option<Poly> {
        let mut terms = BTreeSet::new();
        for t in &self.terms {
            terms.insert(t.sqrt()?);
        }
        Some(Poly { terms })
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Formal partial derivative: in characteristic 2 only odd exponents survive.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for t in &self.terms {
            let e = t.exp(var);
            if e % 2 == 1 {
                let mut exps: Vec<u16> = (0..t.exps.len().max(var + 1)).map(|i| t.exp(i)).collect();
                exps[var] = e - 1;
                out.toggle(Mono::from_exps(exps));
            }
        }
        out
    }

    pub fn deg(&self, var: usize) -> i64 {
        self.terms.iter().map(|t| t.exp(var) as i64).max().unwrap_or(-1)
    }

    pub fn total_deg(&self) -> i64 {
        self.terms.iter().map(|t| t.total_deg() as i64).max().unwrap_or(-1)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.max_var()).max()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.exp(var) > 0)
    }

    pub fn leading_mono(&self) -> Option<&Mono> {
        self.terms.iter().next_back()
    }

    /// Dense coefficient list in `var`: index = exponent, entries var-free... not
    /// necessarily var-free for other variables, but free of `var` itself.
    pub fn as_univar(&self, var: usize) -> Vec<Poly> {
        let d = self.deg(var);
        if d < 0 {
            return Vec::new();
        }
        let mut coeffs = vec![Poly::zero(); d as usize + 1];
        for t in &self.terms {
            let e = t.exp(var) as usize;
            let mut exps: Vec<u16> = (0..t.exps.len()).map(|i| t.exp(i)).collect();
            if var < exps.len() {
                exps[var] = 0;
            }
            coeffs[e].toggle(Mono::from_exps(exps));
        }
        coeffs
    }

    pub fn from_univar(coeffs: &[Poly], var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let mut shift = vec![0u16; var + 1];
            shift[var] = e as u16;
            out = out.add(&c.mul_mono(&Mono::from_exps(shift)));
        }
        out
    }

    /// Coefficient of var^e, viewed in the remaining variables.
    pub fn coeff_of(&self, var: usize, e: u16) -> Poly {
        let mut out = Poly::zero();
        for t in &self.terms {
            if t.exp(var) == e {
                let mut exps: Vec<u16> = (0..t.exps.len()).map(|i| t.exp(i)).collect();
                if var < exps.len() {
                    exps[var] = 0;
                }
                out.toggle(Mono::from_exps(exps));
            }
        }
        out
    }

    /// Exact division; None when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        let lt = other.leading_mono().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while !rem.is_zero() {
            let m = rem.leading_mono().unwrap().clone();
            let q = m.try_div(&lt)?;
            quo.toggle(q.clone());
            rem = rem.add(&other.mul_mono(&q));
        }
        Some(quo)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Pseudo-remainder of self by other, both viewed in `var`:
    /// lc(other)^(da-db+1) * self = q*other + r with deg_var r < deg_var other.
    fn pseudo_rem(&self, other: &Poly, var: usize) -> Poly {
        let db = other.deg(var);
        assert!(db >= 0, "pseudo_rem by poly free of var");
        let lc_b = other.coeff_of(var, db as u16);
        let mut r = self.clone();
        loop {
            let da = r.deg(var);
            if da < db || r.is_zero() {
                return r;
            }
            // r <- lc_b * r + lc_a * var^(da-db) * other
            let lc_a = r.coeff_of(var, da as u16);
            let mut shift = vec![0u16; var + 1];
            shift[var] = (da - db) as u16;
            let t = other.mul(&lc_a).mul_mono(&Mono::from_exps(shift));
            r = r.mul(&lc_b).add(&t);
        }
    }

    /// Content with respect to `var`: gcd of the var-coefficients.
    fn content(&self, var: usize) -> Poly {
        let mut g = Poly::zero();
        for c in self.as_univar(var) {
            if !c.is_zero() {
                g = g.gcd(&c);
            }
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Greatest common divisor (primitive polynomial-remainder-sequence).
    /// GF(2) has no unit ambiguity, so the result is canonical.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_one() || other.is_one() {
            return Poly::one();
        }
        let va = self.max_var();
        let vb = other.max_var();
        let v = match va.max(vb) {
            None => return Poly::one(),
            Some(v) => v,
        };
        // Univariate in v over GF(2)[smaller vars].
        let ca = self.content(v);
        let cb = other.content(v);
        let c = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = other.div_exact(&cb).expect("content divides");
        if a.deg(v) < b.deg(v) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b, v);
            a = b;
            b = if r.is_zero() {
                Poly::zero()
            } else {
                r.div_exact(&r.content(v)).expect("content divides")
            };
            if a.deg(v) < b.deg(v) {
                std::mem::swap(&mut a, &mut b);
            }
        }
        let pa = a.div_exact(&a.content(v)).expect("content divides");
        c.mul(&pa)
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        self.div_exact(&g).expect("gcd divides").mul(other)
    }

    /// Substitute polynomials for every variable (entry per variable id).
    pub fn subst(&self, images: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for t in &self.terms {
            let mut prod = Poly::one();
            for i in 0..t.exps.len() {
                let e = t.exp(i);
                if e > 0 {
                    let img = images.get(i).cloned().unwrap_or_else(|| Poly::var(i));
                    prod = prod.mul(&img.pow(e as u32));
                }
            }
            out = out.add(&prod);
        }
        out
    }

    /// Comparison key that ranks the last (top) variable most significant:
    /// the natural reading order for a tower polynomial.
    fn display_key(m: &Mono) -> (u32, Vec<u16>) {
        let n = m.max_var().map(|v| v + 1).unwrap_or(0);
        let rev: Vec<u16> = (0..n).rev().map(|i| m.exp(i)).collect();
        (m.total_deg(), rev)
    }

    /// Deterministic polynomial order for reporting: graded, then top-variable
    /// lexicographic, highest term first; ties fall to the shorter polynomial.
    pub fn cmp_display(&self, other: &Poly) -> Ordering {
        let mut a: Vec<_> = self.terms.iter().map(Self::display_key).collect();
        let mut b: Vec<_> = other.terms.iter().map(Self::display_key).collect();
        a.sort_by(|x, y| y.cmp(x));
        b.sort_by(|x, y| y.cmp(x));
        for (ka, kb) in a.iter().zip(b.iter()) {
            match ka.cmp(kb) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        a.len().cmp(&b.len())
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // Graded, top variable most significant, highest first.
        let mut ts: Vec<&Mono> = self.terms.iter().collect();
        ts.sort_by(|a, b| Self::display_key(b).cmp(&Self::display_key(a)));
        ts.iter().map(|m| m.render(names)).collect::<Vec<_>>().join(" + ")
    }
}
