use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use std::collections::BTreeMap;
use std::fmt;

/// A square-free multi-index over an ordered 2-basis: bit i set means basis
/// element i occurs.  The derived integer order is exactly the basis order:
/// I < J iff at the highest differing label J contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub u64);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn singleton(pos: usize) -> Self {
        MultiIndex(1 << pos)
    }

    pub fn from_bits<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut m = 0u64;
        for b in iter {
            m |= 1 << b;
        }
        MultiIndex(m)
    }

    /// Symmetric difference: the group law of square classes.
    pub fn sym_diff(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 ^ other.0)
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn intersect(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & other.0)
    }

    pub fn minus(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & !other.0)
    }

    pub fn contains(self, pos: usize) -> bool {
        self.0 >> pos & 1 == 1
    }

    pub fn is_subset_of(self, other: MultiIndex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn max_label(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 >> i & 1 == 1)
    }

    pub fn without(self, pos: usize) -> MultiIndex {
        MultiIndex(self.0 & !(1u64 << pos))
    }

    pub fn with(self, pos: usize) -> MultiIndex {
        MultiIndex(self.0 | 1u64 << pos)
    }

    pub fn render(self, names: &[String]) -> String {
        if self.0 == 0 {
            return "{}".to_string();
        }
        let parts: Vec<&str> = self.iter().map(|i| names.get(i).map(|s| s.as_str()).unwrap_or("?")).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:b}", self.0)
    }
}

/// Decompose f = sum over I of basis^I * (f_I)^2 with respect to the 2-basis
/// formed by the listed variables (spec order: position in `basis_vars` is the
/// label index).  Errors if f involves a variable outside the basis.
///
/// Exactness: for a polynomial, split each monomial into its odd part and the
/// square root of its even part; for N/D use N/D = N*D * (1/D)^2.
pub fn two_basis_decompose(f: &RatFun, basis_vars: &[usize]) -> Result<BTreeMap<MultiIndex, RatFun>> {
    if let Some(mv) = f.max_var() {
        for v in 0..=mv {
            if f.uses_var(v) && !basis_vars.contains(&v) {
                return Err(Error::Domain(format!(
                    "element uses variable #{v} outside the given 2-basis"
                )));
            }
        }
    }
    let prod = f.num().mul(f.den());
    let mut components: BTreeMap<MultiIndex, crate::poly::Poly> = BTreeMap::new();
    for m in prod.terms() {
        let (par, half) = m.parity_split();
        let mut mask = MultiIndex::EMPTY;
        if let Some(mv) = par.max_var() {
            for v in 0..=mv {
                if par.exp(v) == 1 {
                    let pos = basis_vars
                        .iter()
                        .position(|&b| b == v)
                        .ok_or_else(|| Error::Internal("odd exponent outside basis".into()))?;
                    mask = mask.with(pos);
                }
            }
        }
        let slot = components.entry(mask).or_default();
        *slot = slot.add(&crate::poly::Poly::from_mono(half));
    }
    let mut out = BTreeMap::new();
    for (mask, g) in components {
        if g.is_zero() {
            continue;
        }
        let comp = RatFun::new(g, f.den().clone())?;
        out.insert(mask, comp);
    }
    Ok(out)
}

/// Recombine a decomposition: sum over I of basis^I * (f_I)^2.
pub fn two_basis_recombine(parts: &BTreeMap<MultiIndex, RatFun>, basis_vars: &[usize]) -> RatFun {
    let mut acc = RatFun::zero();
    for (mask, comp) in parts {
        let mut term = comp.square();
        for pos in mask.iter() {
            term = term.mul(&RatFun::var(basis_vars[pos]));
        }
        acc = acc.add(&term);
    }
    acc
}
