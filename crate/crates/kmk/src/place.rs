use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::poly::Poly;
use crate::tower::Tower;
use crate::unipoly::UniPoly;

/// A place of the tower's top rational function field: either a finite place
/// given by an irreducible polynomial with positive degree in the top
/// variable, or the degree valuation at infinity (uniformizer 1/x).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    /// Validates irreducibility (within the given factorization bound).
    pub fn finite(p: Poly, tower: &Tower, bound: usize) -> Result<Place> {
        let main = tower.top()?;
        if p.deg(main) < 1 {
            return Err(Error::Domain(
                "a finite place needs positive degree in the top variable".into(),
            ));
        }
        if !is_irreducible(&p, bound)? {
            return Err(Error::Domain(format!(
                "polynomial {} is not irreducible",
                p.render(tower.names())
            )));
        }
        Ok(Place::Finite(p))
    }

    /// Degree of the residue field over the base field.
    pub fn residue_degree(&self, main: usize) -> usize {
        match self {
            Place::Finite(p) => p.deg(main) as usize,
            Place::Infinity => 1,
        }
    }

    /// Monic version in the top variable, coefficients in the base field.
    pub fn monic(&self, main: usize) -> Result<UniPoly> {
        match self {
            Place::Finite(p) => {
                let u = UniPoly::from_poly(p, main);
                let lead_inv = u.lead().ok_or_else(|| Error::Internal("empty place".into()))?.inv()?;
                Ok(u.mul_scalar(&lead_inv))
            }
            Place::Infinity => Err(Error::Domain("infinity has no finite polynomial".into())),
        }
    }

    /// Separable iff the derivative in the top variable does not vanish
    /// (equivalently: some odd power of the top variable occurs).
    pub fn is_separable(&self, main: usize) -> bool {
        match self {
            Place::Finite(p) => !p.derivative(main).is_zero(),
            Place::Infinity => true,
        }
    }

    pub fn render(&self, tower: &Tower) -> String {
        match self {
            Place::Finite(p) => p.render(tower.names()),
            Place::Infinity => "infinity".to_string(),
        }
    }
}

pub fn is_separable(p: &Poly, tower: &Tower) -> Result<bool> {
    let main = tower.top()?;
    Ok(!p.derivative(main).is_zero())
}
