//! Second residue maps.
//!
//! A class decomposes at every place as phi1 + psi + phi2 ^ dlog(pi); the
//! residue keeps the ramified data (psi, phi2) and forgets the unit part
//! phi1, which is only well defined as a class over the residue field.  The
//! psi and phi2 blocks, by contrast, are unique on the nose, so two classes
//! have equal residue exactly when these blocks are structurally equal.
//!
//! At infinity a second variant projects phi2 away as well: that component
//! ranges over base-field classes wedged with dlog of the top variable and
//! is accounted for separately in the global exact sequence.

use std::collections::BTreeMap;

use crate::basis::MultiIndex;
use crate::completion::{Completion, ResLabel};
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::local::{normal_form_at, LocalDecomposition, PsiMap};
use crate::place::Place;
use crate::unipoly::UniPoly;

/// The image of a class in W_1 at a place: the polar block psi in its unique
/// admissible shape and the dlog(pi) block phi2 over the residue field.
///
/// Every key (I, J) of psi satisfies J + I > I, poles l >= 1 carry nonzero
/// canonical representatives u_{l,I,J} of degree < deg(place), and the zero
/// class is exactly the empty value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct W1NormalForm {
    pub place: Place,
    pub degree: usize,
    pub psi: PsiMap,
    pub phi2: BTreeMap<MultiIndex, UniPoly>,
}

impl W1NormalForm {
    pub fn zero(place: Place, degree: usize) -> W1NormalForm {
        W1NormalForm { place, degree, psi: PsiMap::new(), phi2: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.psi.is_empty() && self.phi2.is_empty()
    }

    fn from_decomposition(place: Place, dec: LocalDecomposition) -> W1NormalForm {
        W1NormalForm { place, degree: dec.degree, psi: dec.psi, phi2: dec.phi2 }
    }

    pub fn render(&self, ctx: &Completion) -> String {
        let dec = LocalDecomposition {
            degree: self.degree,
            phi1: BTreeMap::new(),
            phi2: self.phi2.clone(),
            psi: self.psi.clone(),
        };
        dec.render(ctx)
    }
}

/// The second residue at the completion's place: the local normal form with
/// phi1 forgotten.  Vanishes on every class whose data are units with unit
/// logs at the place, and in particular on any class of data degree below
/// the degree of the place.
pub fn residue(w: &DiffForm, ctx: &Completion, n0: usize, ceiling: usize) -> Result<W1NormalForm> {
    let dec = normal_form_at(w, ctx, n0, ceiling)?;
    Ok(W1NormalForm::from_decomposition(ctx.place.clone(), dec))
}

/// The residue at infinity followed by the projection that kills the whole
/// phi2 ^ dlog(pi) block.  Only psi survives; base-field classes wedged with
/// dlog of the top variable are sent to zero.
pub fn residue_infinity_mod(
    w: &DiffForm,
    ctx: &Completion,
    n0: usize,
    ceiling: usize,
) -> Result<W1NormalForm> {
    if ctx.place != Place::Infinity {
        return Err(Error::Domain(
            "the projected residue is defined at infinity only".into(),
        ));
    }
    let dec = normal_form_at(w, ctx, n0, ceiling)?;
    Ok(W1NormalForm {
        place: Place::Infinity,
        degree: dec.degree,
        psi: dec.psi,
        phi2: BTreeMap::new(),
    })
}

/// The dlog(pi)-component of a decomposition without polar part.  Defined on
/// unit-coefficient classes only: a nonzero psi is a domain error.
pub fn zeta(dec: &LocalDecomposition) -> Result<BTreeMap<MultiIndex, UniPoly>> {
    if !dec.psi.is_empty() {
        return Err(Error::Domain(
            "the dlog(pi) component is defined on classes without polar part".into(),
        ));
    }
    Ok(dec.phi2.clone())
}

/// The residue-field reduction of the unit part of a decomposition without
/// polar part.  Left inverse to lifting residue-field classes into the
/// completion.
pub fn chi(dec: &LocalDecomposition) -> Result<BTreeMap<MultiIndex, UniPoly>> {
    if !dec.psi.is_empty() {
        return Err(Error::Domain(
            "the unit-part reduction is defined on classes without polar part".into(),
        ));
    }
    Ok(dec.phi1.clone())
}

/// Reinterpret residue-field data at infinity as a form over the base
/// variables: the residue field there is the base field itself, every label
/// is a base variable and every representative is a constant.
pub fn base_form(
    map: &BTreeMap<MultiIndex, UniPoly>,
    ctx: &Completion,
    degree: usize,
) -> Result<DiffForm> {
    if ctx.place != Place::Infinity {
        return Err(Error::Domain(
            "base-field reinterpretation needs the infinity place".into(),
        ));
    }
    let mut out = DiffForm::zero(degree);
    for (mask, rep) in map {
        if !rep.is_constant() {
            return Err(Error::Internal(
                "nonconstant residue representative at infinity".into(),
            ));
        }
        let mut idx = MultiIndex::EMPTY;
        for pos in mask.iter() {
            match ctx.res_labels.get(pos) {
                Some(ResLabel::Var(v)) => idx = idx.with(*v),
                _ => {
                    return Err(Error::Internal(
                        "unexpected label in a residue-field mask at infinity".into(),
                    ))
                }
            }
        }
        out = out.add(&DiffForm::term(degree, idx, rep.coeff(0))?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::ratfun::RatFun;
    use crate::tower::Tower;

    fn setup(place: Place) -> (Tower, Completion) {
        let tw = Tower::parse("t;x").unwrap();
        let ctx = Completion::new(&tw, &place, 12).unwrap();
        (tw, ctx)
    }

    fn x_place() -> Place {
        let tw = Tower::parse("t;x").unwrap();
        Place::finite(Poly::var(1), &tw, 12).unwrap()
    }

    #[test]
    fn unit_data_has_zero_residue() {
        // x * dlog(x+1) at x^2+x+t: every datum is a unit there
        let tw = Tower::parse("t;x").unwrap();
        let p = Poly::var(1).pow(2).add(&Poly::var(1)).add(&Poly::var(0));
        let ctx = Completion::new(&tw, &Place::finite(p, &tw, 12).unwrap(), 12).unwrap();
        let g = RatFun::var(1).add(&RatFun::one());
        let w = DiffForm::dlog(&g, &tw).unwrap().scalar_mul(&RatFun::var(1));
        let r = residue(&w, &ctx, 4, 64).unwrap();
        assert!(r.is_zero(), "{}", r.render(&ctx));
    }

    #[test]
    fn simple_pole_gives_nonzero_residue() {
        // (t/x) dlog(t) at x: psi entry (I={t}, J={t,pi}) with u_1 = 1
        let (tw, ctx) = setup(x_place());
        let c = RatFun::var(0).div(&RatFun::var(1)).unwrap();
        let w = DiffForm::dlog(&RatFun::var(0), &tw).unwrap().scalar_mul(&c);
        let r = residue(&w, &ctx, 4, 64).unwrap();
        assert!(!r.is_zero());
        assert!(r.phi2.is_empty());
        let key = (MultiIndex::singleton(0), MultiIndex::from_bits([0, 1]));
        let inner = r.psi.get(&key).expect("expected the (t, {t,pi}) entry");
        assert_eq!(inner.len(), 1);
        assert!(inner.get(&1).unwrap().is_one());
        assert_eq!(r.psi.len(), 1);
    }

    #[test]
    fn positive_valuation_coefficient_vanishes() {
        // x * dlog(t) at x
        let (tw, ctx) = setup(x_place());
        let w = DiffForm::dlog(&RatFun::var(0), &tw).unwrap().scalar_mul(&RatFun::var(1));
        let r = residue(&w, &ctx, 4, 64).unwrap();
        assert!(r.is_zero(), "{}", r.render(&ctx));
    }

    #[test]
    fn residue_ignores_artin_schreier_and_exact_perturbations() {
        let (tw, ctx) = setup(x_place());
        let c = RatFun::var(0).div(&RatFun::var(1)).unwrap();
        let w = DiffForm::dlog(&RatFun::var(0), &tw).unwrap().scalar_mul(&c);
        // eta = (x+t) dlog(t), xi = t*x
        let eta = DiffForm::dlog(&RatFun::var(0), &tw)
            .unwrap()
            .scalar_mul(&RatFun::var(1).add(&RatFun::var(0)));
        let xi = DiffForm::term(0, MultiIndex::EMPTY, RatFun::var(0).mul(&RatFun::var(1))).unwrap();
        let perturbed = w
            .add(&eta.artin_schreier_image())
            .unwrap()
            .add(&xi.exterior_d(&tw))
            .unwrap();
        let r1 = residue(&w, &ctx, 4, 64).unwrap();
        let r2 = residue(&perturbed, &ctx, 4, 64).unwrap();
        assert_eq!(r1, r2);
        assert!(!r1.is_zero());
    }

    #[test]
    fn infinity_splits_units_into_phi1_and_phi2() {
        // t dlog(t) + (t+1) dlog(x) at infinity: dlog(x) = dlog(pi) there
        let (tw, ctx) = setup(Place::Infinity);
        let w = DiffForm::dlog(&RatFun::var(0), &tw)
            .unwrap()
            .scalar_mul(&RatFun::var(0))
            .add(
                &DiffForm::dlog(&RatFun::var(1), &tw)
                    .unwrap()
                    .scalar_mul(&RatFun::var(0).add(&RatFun::one())),
            )
            .unwrap();
        let dec = normal_form_at(&w, &ctx, 4, 64).unwrap();
        let phi1 = chi(&dec).unwrap();
        let phi2 = zeta(&dec).unwrap();
        assert_eq!(phi1.len(), 1);
        assert_eq!(
            phi1.get(&MultiIndex::singleton(0)).unwrap(),
            &UniPoly::constant(RatFun::var(0))
        );
        assert_eq!(phi2.len(), 1);
        assert_eq!(
            phi2.get(&MultiIndex::EMPTY).unwrap(),
            &UniPoly::constant(RatFun::var(0).add(&RatFun::one()))
        );
        // the projected residue kills the phi2 block
        let rm = residue_infinity_mod(&w, &ctx, 4, 64).unwrap();
        assert!(rm.is_zero());
        // ... but the plain residue keeps it
        let r = residue(&w, &ctx, 4, 64).unwrap();
        assert!(!r.is_zero());
        // and phi1 restricts to a base form
        let back = base_form(&phi1, &ctx, 1).unwrap();
        let expected = DiffForm::term(1, MultiIndex::singleton(0), RatFun::var(0)).unwrap();
        assert_eq!(back, expected);
    }

    #[test]
    fn extraction_rejects_polar_classes() {
        // x dlog(t) has a pole at infinity
        let (tw, ctx) = setup(Place::Infinity);
        let w = DiffForm::dlog(&RatFun::var(0), &tw).unwrap().scalar_mul(&RatFun::var(1));
        let dec = normal_form_at(&w, &ctx, 4, 64).unwrap();
        assert!(chi(&dec).is_err());
        assert!(zeta(&dec).is_err());
        let rm = residue_infinity_mod(&w, &ctx, 4, 64).unwrap();
        assert!(!rm.is_zero());
    }

    #[test]
    fn small_data_vanishes_at_higher_degree_places() {
        // s dlog(r) with s, r of degree <= 1 has zero residue at a degree-2
        // place: the data cannot meet the place
        let tw = Tower::parse("t;x").unwrap();
        let p = Poly::var(1).pow(2).add(&Poly::var(1)).add(&Poly::var(0));
        let ctx = Completion::new(&tw, &Place::finite(p, &tw, 12).unwrap(), 12).unwrap();
        let s = RatFun::var(1).div(&RatFun::var(1).add(&RatFun::one())).unwrap();
        let r = RatFun::var(1).add(&RatFun::var(0));
        let w = DiffForm::dlog(&r, &tw).unwrap().scalar_mul(&s);
        let res = residue(&w, &ctx, 4, 64).unwrap();
        assert!(res.is_zero(), "{}", res.render(&ctx));
    }
}
