use std::collections::BTreeMap;

use crate::basis::MultiIndex;
use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use crate::tower::Tower;

/// A differential m-form over the tower, stored on the logarithmic basis:
/// the coefficient at multi-index I multiplies dt_{i1}/t_{i1} ^ ... for the
/// variables of I in increasing order.  On this basis the Frobenius squares
/// coefficients and the Artin-Schreier operator acts coefficientwise, which
/// is what every algorithm here wants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffForm {
    degree: usize,
    terms: BTreeMap<MultiIndex, RatFun>,
}

impl DiffForm {
    pub fn zero(degree: usize) -> DiffForm {
        DiffForm { degree, terms: BTreeMap::new() }
    }

    pub fn term(degree: usize, index: MultiIndex, coeff: RatFun) -> Result<DiffForm> {
        if index.weight() as usize != degree {
            return Err(Error::Internal(format!(
                "index weight {} does not match form degree {degree}",
                index.weight()
            )));
        }
        let mut f = DiffForm::zero(degree);
        f.accumulate(index, coeff);
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &RatFun)> {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    pub fn coeff(&self, index: MultiIndex) -> RatFun {
        self.terms.get(&index).cloned().unwrap_or_else(RatFun::zero)
    }

    fn accumulate(&mut self, index: MultiIndex, coeff: RatFun) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        if self.degree != other.degree {
            return Err(Error::Domain(format!(
                "cannot add a {}-form to a {}-form",
                other.degree, self.degree
            )));
        }
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.accumulate(*i, c.clone());
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, s: &RatFun) -> DiffForm {
        let mut out = DiffForm::zero(self.degree);
        for (i, c) in &self.terms {
            out.accumulate(*i, c.mul(s));
        }
        out
    }

    /// Wedge product; in characteristic 2 no signs arise and repeated
    /// variables annihilate the term.
    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        let mut out = DiffForm::zero(self.degree + other.degree);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                if i.intersect(*j).is_empty() {
                    out.accumulate(i.union(*j), a.mul(b));
                }
            }
        }
        out
    }

    /// dlog f = df/f as a 1-form on the logarithmic basis: the coefficient
    /// along variable i is t_i * (df/dt_i) / f.
    pub fn dlog(f: &RatFun, tower: &Tower) -> Result<DiffForm> {
        if f.is_zero() {
            return Err(Error::Domain("dlog of zero".into()));
        }
        let f_inv = f.inv()?;
        let mut out = DiffForm::zero(1);
        for v in 0..tower.len() {
            let d = f.derivative(v);
            if d.is_zero() {
                continue;
            }
            out.accumulate(
                MultiIndex::singleton(v),
                RatFun::var(v).mul(&d).mul(&f_inv),
            );
        }
        Ok(out)
    }

    /// a * dlog(f_1) ^ ... ^ dlog(f_m).  An empty factor list yields the
    /// 0-form a itself.
    pub fn make_form(a: &RatFun, factors: &[RatFun], tower: &Tower) -> Result<DiffForm> {
        let mut acc = DiffForm::term(0, MultiIndex::EMPTY, a.clone())?;
        for f in factors {
            acc = acc.wedge(&DiffForm::dlog(f, tower)?);
        }
        Ok(acc)
    }

    /// Exterior derivative on the logarithmic basis:
    /// d(a dlog^I) = sum_j t_j (da/dt_j) dlog_j ^ dlog^I.
    pub fn exterior_d(&self, tower: &Tower) -> DiffForm {
        let mut out = DiffForm::zero(self.degree + 1);
        for (i, a) in &self.terms {
            for v in 0..tower.len() {
                if i.contains(v) {
                    continue;
                }
                let d = a.derivative(v);
                if d.is_zero() {
                    continue;
                }
                out.accumulate(i.with(v), RatFun::var(v).mul(&d));
            }
        }
        out
    }

    /// Coefficientwise Frobenius (squares every coefficient).
    pub fn frobenius(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.degree);
        for (i, a) in &self.terms {
            out.accumulate(*i, a.square());
        }
        out
    }

    /// The Artin-Schreier operator: frobenius + identity, coefficientwise
    /// y |-> y^2 + y.
    pub fn artin_schreier_image(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.degree);
        for (i, a) in &self.terms {
            out.accumulate(*i, a.square().add(a));
        }
        out
    }

    pub fn render(&self, tower: &Tower) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = tower.names();
        let mut parts = Vec::new();
        for (i, a) in &self.terms {
            let coeff = a.render(names);
            let coeff = if a.num().term_count() > 1 || !a.den().is_one() {
                format!("({coeff})")
            } else {
                coeff
            };
            let wedge: Vec<String> = i
                .iter()
                .map(|v| format!("dlog({})", tower.var_name(v)))
                .collect();
            if wedge.is_empty() {
                parts.push(coeff);
            } else if a.is_one() {
                parts.push(wedge.join(" ^ "));
            } else {
                parts.push(format!("{coeff} * {}", wedge.join(" ^ ")));
            }
        }
        parts.join(" + ")
    }
}

/// A quadratic Pfister-form symbol <<b_1, ..., b_m; c]] with its associated
/// cohomology class c * dlog(b_1) ^ ... ^ dlog(b_m).
#[derive(Debug, Clone)]
pub struct PfisterSymbol {
    pub slots: Vec<RatFun>,
    pub scalar: RatFun,
}

impl PfisterSymbol {
    pub fn kato_symbol(&self, tower: &Tower) -> Result<DiffForm> {
        for b in &self.slots {
            if b.is_zero() {
                return Err(Error::Domain("pfister slot must be nonzero".into()));
            }
        }
        DiffForm::make_form(&self.scalar, &self.slots, tower)
    }

    pub fn render(&self, tower: &Tower) -> String {
        let names = tower.names();
        let slots: Vec<String> = self.slots.iter().map(|b| b.render(names)).collect();
        format!("<<{}; {}]]", slots.join(", "), self.scalar.render(names))
    }
}

/// Present a form as a sum of Pfister symbols, one per stored term:
/// a·dlog(t_I) becomes <<t_I...; a]].  Display and interop only; an empty
/// vector is the zero expression.
pub fn pfister_expr(w: &DiffForm) -> Vec<PfisterSymbol> {
    w.terms()
        .map(|(mask, a)| PfisterSymbol {
            slots: mask.iter().map(RatFun::var).collect(),
            scalar: a.clone(),
        })
        .collect()
}
