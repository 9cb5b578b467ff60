//! Global triviality decision through the residue exact sequence.
//!
//! A class over GF(2)(v_1)...(v_n) is zero exactly when its residue vanishes
//! at every finite place of the top variable, its polar part at infinity
//! vanishes, and the unit part extracted at infinity is zero over the base
//! field; the last check peels one variable and recurses.
//!
//! Residue vanishing splits into two checks of a different nature.  The
//! polar block psi is unique on the nose, so it compares against zero
//! structurally and a nonzero entry is already a certificate.  The phi2
//! block is unique only as a class over the residue field; it is decided by
//! rebuilding it over a rational model of that field — available exactly
//! when the place is linear in some tower variable — and recursing one
//! level down.  Places without such a model raise `UnsupportedQuotient`
//! rather than ever guessing.
//!
//! One-variable towers are the exception to both rules: every residue field
//! there is a finite field GF(2^d), which is perfect.  The differential of
//! any element algebraic over GF(2) vanishes, so residue entries carrying a
//! residue-basis label denote the zero form, and a polar dlog-pi entry of
//! odd level is an exact differential.  The only surviving invariant is the
//! mask-free phi2 representative, whose class in kappa modulo
//! Artin-Schreier images is settled by GF(2)-linear algebra (equivalently,
//! by the trace to GF(2)).  Scalar classes keep their polar data: with no
//! exact differentials available in degree zero, a psi entry is decisive.

use std::collections::BTreeSet;

use crate::basis::MultiIndex;
use crate::completion::{Completion, ResLabel};
use crate::error::{Error, Result};
use crate::factor::{factor_bounded, is_irreducible};
use crate::forms::DiffForm;
use crate::local::normal_form_at;
use crate::place::Place;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::residue::{base_form, chi, residue, W1NormalForm};
use crate::tower::Tower;
use crate::unipoly::UniPoly;

/// Budget knobs for the decision procedure.
#[derive(Debug, Clone, Copy)]
pub struct DecideOpts {
    /// Initial number of series coefficients per local expansion.
    pub precision: usize,
    /// Precision is doubled on shortfall up to this ceiling.
    pub ceiling: usize,
    /// Trial-degree bound for factoring denominators and places.
    pub factor_bound: usize,
}

impl DecideOpts {
    pub fn with_limits(ceiling: usize, factor_bound: usize) -> DecideOpts {
        DecideOpts { precision: 4.min(ceiling.max(1)), ceiling: ceiling.max(1), factor_bound }
    }
}

impl Default for DecideOpts {
    fn default() -> DecideOpts {
        DecideOpts { precision: 4, ceiling: 8, factor_bound: 12 }
    }
}

/// Evidence returned with a verdict.
///
/// A `NonzeroResidue` carries the unique local data that witnesses
/// nonzeroness; when the witness lives in the phi2 block its nonzeroness was
/// itself decided over the residue field, and `inner` holds that proof.
#[derive(Debug, Clone)]
pub enum Certificate {
    NonzeroResidue {
        place: String,
        data: W1NormalForm,
        rendered: String,
        inner: Option<Box<Certificate>>,
    },
    /// The recursion bottomed out at GF(2) on the nonzero scalar.
    NonzeroConstant,
    /// Every residue vanished at every level down to the base field.
    ResiduesVanish { levels: usize },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NonzeroResidue { .. } => "nonzero-residue",
            Certificate::NonzeroConstant => "nonzero-constant",
            Certificate::ResiduesVanish { .. } => "residues-vanish",
        }
    }

    pub fn place_name(&self) -> Option<&str> {
        match self {
            Certificate::NonzeroResidue { place, .. } => Some(place),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Certificate::NonzeroResidue { place, rendered, inner, .. } => {
                let mut s = format!("nonzero residue at {place}:\n{rendered}");
                if let Some(inner) = inner {
                    s.push_str("\nresidue-field class is nonzero: ");
                    s.push_str(&inner.describe());
                }
                s
            }
            Certificate::NonzeroConstant => "the class reduces to the nonzero scalar of GF(2)".into(),
            Certificate::ResiduesVanish { levels } => {
                format!("all residues vanish through {levels} level(s) of the tower")
            }
        }
    }
}

/// A cohomology class: a representative form together with its field
/// context.  Structural equality of representatives is only sufficient;
/// `decide_zero` on the difference is the real equality test.
#[derive(Debug, Clone)]
pub struct CohClass {
    pub form: DiffForm,
    pub tower: Tower,
}

impl CohClass {
    pub fn new(form: DiffForm, tower: Tower) -> Result<CohClass> {
        validate_vars(&form, &tower)?;
        Ok(CohClass { form, tower })
    }

    pub fn decide_zero(&self, opts: &DecideOpts) -> Result<(bool, Certificate)> {
        decide_zero(&self.form, &self.tower, opts)
    }

    pub fn equals(&self, other: &CohClass, opts: &DecideOpts) -> Result<bool> {
        if self.tower != other.tower {
            return Err(Error::Domain("cannot compare classes over different towers".into()));
        }
        let diff = self.form.add(&other.form)?;
        Ok(decide_zero(&diff, &self.tower, opts)?.0)
    }
}

fn validate_vars(w: &DiffForm, tower: &Tower) -> Result<()> {
    let n = tower.len();
    for (mask, coeff) in w.terms() {
        if let Some(top) = mask.max_label() {
            if top >= n {
                return Err(Error::Domain(format!(
                    "form uses log slot {top} outside the {n}-variable tower"
                )));
            }
        }
        if let Some(v) = coeff.max_var() {
            if v >= n {
                return Err(Error::Domain(format!(
                    "coefficient uses variable {v} outside the {n}-variable tower"
                )));
            }
        }
    }
    Ok(())
}

/// Decide whether a representative is zero in H_2^{m+1} of the tower's
/// function field, with a certificate either way.
pub fn decide_zero(w: &DiffForm, tower: &Tower, opts: &DecideOpts) -> Result<(bool, Certificate)> {
    validate_vars(w, tower)?;
    decide_rec(w, tower, opts, 0)
}

fn decide_rec(
    w: &DiffForm,
    tower: &Tower,
    opts: &DecideOpts,
    level: usize,
) -> Result<(bool, Certificate)> {
    if tower.is_empty() {
        return base_case(w, level);
    }

    // Over a one-variable tower every residue field is finite, hence perfect;
    // see the module notes for how that collapses the residue data.
    let finite_residues = tower.len() == 1;

    for place in candidate_places(w, tower, opts)? {
        let ctx = Completion::new(tower, &place, opts.factor_bound)?;
        let nf = residue(w, &ctx, opts.precision, opts.ceiling)?;
        let psi_decisive = !finite_residues || w.degree() == 0;
        if !nf.psi.is_empty() && psi_decisive {
            let rendered = nf.render(&ctx);
            return Ok((
                false,
                Certificate::NonzeroResidue {
                    place: ctx.place.render(&ctx.tower),
                    data: nf,
                    rendered,
                    inner: None,
                },
            ));
        }
        if !nf.phi2.is_empty() {
            if finite_residues {
                // Label-indexed entries wedge dlog-pi with the differential
                // of a class algebraic over GF(2) and vanish; only the
                // mask-free representative carries class information.
                if let Some(rep) = nf.phi2.get(&MultiIndex::EMPTY) {
                    if !finite_residue_class_is_zero(rep, &ctx)? {
                        let rendered = nf.render(&ctx);
                        return Ok((
                            false,
                            Certificate::NonzeroResidue {
                                place: ctx.place.render(&ctx.tower),
                                data: nf,
                                rendered,
                                inner: None,
                            },
                        ));
                    }
                }
            } else {
                let model = quotient_model(finite_poly(&ctx.place)?, tower)?;
                let wbar = phi2_over_model(&nf, &ctx, &model)?;
                let (zero, inner) = decide_rec(&wbar, &model.tower, opts, 0)?;
                if !zero {
                    let rendered = nf.render(&ctx);
                    return Ok((
                        false,
                        Certificate::NonzeroResidue {
                            place: ctx.place.render(&ctx.tower),
                            data: nf,
                            rendered,
                            inner: Some(Box::new(inner)),
                        },
                    ));
                }
            }
        }
    }

    let ctx = Completion::new(tower, &Place::Infinity, opts.factor_bound)?;
    let dec = normal_form_at(w, &ctx, opts.precision, opts.ceiling)?;
    if !dec.psi.is_empty() {
        let nf = W1NormalForm {
            place: Place::Infinity,
            degree: w.degree(),
            psi: dec.psi.clone(),
            phi2: Default::default(),
        };
        let rendered = nf.render(&ctx);
        return Ok((
            false,
            Certificate::NonzeroResidue {
                place: "infinity".into(),
                data: nf,
                rendered,
                inner: None,
            },
        ));
    }
    // The polar parts vanish everywhere, so the class comes from the base
    // field; its phi2 block at infinity is then zero as a class and only the
    // extracted unit part decides.
    let alpha = base_form(&chi(&dec)?, &ctx, w.degree())?;
    decide_rec(&alpha, &tower.base()?, opts, level + 1)
}

fn base_case(w: &DiffForm, level: usize) -> Result<(bool, Certificate)> {
    if w.degree() == 0 {
        let c = w.coeff(MultiIndex::EMPTY);
        if c.is_zero() {
            return Ok((true, Certificate::ResiduesVanish { levels: level }));
        }
        if c.is_one() {
            return Ok((false, Certificate::NonzeroConstant));
        }
        return Err(Error::Internal("nonconstant scalar over GF(2)".into()));
    }
    if w.terms().next().is_some() {
        return Err(Error::Internal("positive-degree form survived to GF(2)".into()));
    }
    Ok((true, Certificate::ResiduesVanish { levels: level }))
}

/// Finite places that can carry a residue: irreducible factors of the
/// coefficient denominators with positive degree in the top variable, plus
/// the place of the top variable itself when some log involves it.  All
/// remaining data are units with unit logs at every other place, where the
/// residue vanishes.
fn candidate_places(w: &DiffForm, tower: &Tower, opts: &DecideOpts) -> Result<Vec<Place>> {
    let main = tower.top()?;
    let mut seen: BTreeSet<Poly> = BTreeSet::new();
    let mut places = Vec::new();
    let mut main_logged = false;
    for (mask, coeff) in w.terms() {
        if mask.contains(main) {
            main_logged = true;
        }
        if coeff.is_zero() {
            continue;
        }
        for (f, _) in factor_bounded(coeff.den(), opts.factor_bound)? {
            if f.deg(main) >= 1 && seen.insert(f.clone()) {
                places.push(Place::Finite(f));
            }
        }
    }
    if main_logged {
        let f = Poly::var(main);
        if seen.insert(f.clone()) {
            places.push(Place::Finite(f));
        }
    }
    Ok(places)
}

fn finite_poly(place: &Place) -> Result<&Poly> {
    match place {
        Place::Finite(p) => Ok(p),
        Place::Infinity => Err(Error::Internal("expected a finite place".into())),
    }
}

/// A rational model of the residue field at a finite place that is linear in
/// one tower variable: the quotient field is then rational in the remaining
/// variables, with the eliminated variable mapping to its solution.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    pub tower: Tower,
    pub eliminated: usize,
    images: Vec<RatFun>,
}

pub fn quotient_model(p: &Poly, tower: &Tower) -> Result<QuotientModel> {
    let n = tower.len();
    let eliminated = (0..n)
        .rev()
        .find(|&v| p.deg(v) == 1)
        .ok_or_else(|| Error::UnsupportedQuotient { place: p.render(tower.names()) })?;
    let names: Vec<String> = tower
        .names()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != eliminated)
        .map(|(_, s)| s.clone())
        .collect();
    let model_tower = Tower::new(names)?;
    let mut images: Vec<RatFun> = (0..n)
        .map(|i| {
            if i == eliminated {
                RatFun::zero()
            } else {
                RatFun::var(if i > eliminated { i - 1 } else { i })
            }
        })
        .collect();
    // p = a·v + b with a, b free of v, so v = b/a in the quotient (char 2)
    let a = p.coeff_of(eliminated, 1);
    let b = p.coeff_of(eliminated, 0);
    images[eliminated] = RatFun::new(b, a)?.subst(&images)?;
    Ok(QuotientModel { tower: model_tower, eliminated, images })
}

impl QuotientModel {
    pub fn image(&self, var: usize) -> &RatFun {
        &self.images[var]
    }

    pub fn map_ratfun(&self, f: &RatFun) -> Result<RatFun> {
        f.subst(&self.images)
    }

    /// Push a form through the substitution: coefficients map through, and
    /// each logged variable becomes the dlog of its image.
    pub fn map_form(&self, w: &DiffForm) -> Result<DiffForm> {
        let mut out = DiffForm::zero(w.degree());
        for (mask, coeff) in w.terms() {
            let mut term = DiffForm::term(0, MultiIndex::EMPTY, self.map_ratfun(coeff)?)?;
            for var in mask.iter() {
                let img = &self.images[var];
                if img.is_zero() {
                    return Err(Error::Domain(format!(
                        "log argument at slot {var} vanishes in the quotient"
                    )));
                }
                term = term.wedge(&DiffForm::dlog(img, &self.tower)?);
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// Decide whether a representative lies in the Artin-Schreier image of the
/// finite residue field GF(2)[T]/(monic): solve y^2 + y = rep by GF(2)-linear
/// algebra on the power basis.  Solvability is equivalent to the trace to
/// GF(2) vanishing, so this settles the class of rep in kappa/℘kappa.
fn finite_residue_class_is_zero(rep: &UniPoly, ctx: &Completion) -> Result<bool> {
    let d = ctx.deg;
    let bits_of = |p: &UniPoly| -> Result<u64> {
        let mut out = 0u64;
        for e in 0..d {
            let c = p.coeff(e);
            if c.is_one() {
                out |= 1 << e;
            } else if !c.is_zero() {
                return Err(Error::Internal(format!(
                    "nonconstant coefficient {c:?} in a finite residue field element"
                )));
            }
        }
        Ok(out)
    };
    let mut cols: Vec<u64> = Vec::with_capacity(d);
    for i in 0..d {
        let ti = UniPoly::monomial(RatFun::one(), i);
        let image = ctx.mul_mod(&ti, &ti)?.add(&ti);
        cols.push(bits_of(&image)?);
    }
    let rhs = bits_of(&rep.rem(&ctx.monic)?)?;

    // Row-reduce the augmented system sum_i y_i * cols[i] = rhs over GF(2).
    let mut rows: Vec<(u64, bool)> = (0..d)
        .map(|j| {
            let mut r = 0u64;
            for (i, col) in cols.iter().enumerate() {
                if col >> j & 1 == 1 {
                    r |= 1 << i;
                }
            }
            (r, rhs >> j & 1 == 1)
        })
        .collect();
    let mut pivot = 0usize;
    for col in 0..d {
        if let Some(k) = (pivot..d).find(|&k| rows[k].0 >> col & 1 == 1) {
            rows.swap(pivot, k);
            let (pr, pb) = rows[pivot];
            for (k2, row) in rows.iter_mut().enumerate() {
                if k2 != pivot && row.0 >> col & 1 == 1 {
                    row.0 ^= pr;
                    row.1 ^= pb;
                }
            }
            pivot += 1;
        }
    }
    Ok(!rows.iter().any(|&(r, b)| r == 0 && b))
}

/// Rebuild the phi2 block of a residue as a form over the rational model of
/// the residue field: labels become dlogs of their images, the class of the
/// top variable maps to the model's expression for it, and representatives
/// map coefficientwise.
fn phi2_over_model(
    nf: &W1NormalForm,
    ctx: &Completion,
    model: &QuotientModel,
) -> Result<DiffForm> {
    if nf.degree == 0 {
        return Err(Error::Internal("phi2 data on a degree-zero class".into()));
    }
    let degree = nf.degree - 1;
    let mut out = DiffForm::zero(degree);
    for (mask, rep) in &nf.phi2 {
        let coeff = model.map_ratfun(&rep.to_ratfun(ctx.main))?;
        let mut term = DiffForm::term(0, MultiIndex::EMPTY, coeff)?;
        for pos in mask.iter() {
            let var = match ctx.res_labels.get(pos) {
                Some(ResLabel::Var(v)) => *v,
                Some(ResLabel::XBar) => ctx.main,
                None => {
                    return Err(Error::Internal("phi2 mask outside the residue basis".into()))
                }
            };
            let img = model.image(var);
            if img.is_zero() {
                return Err(Error::Internal(
                    "residue basis label vanishes in the quotient model".into(),
                ));
            }
            term = term.wedge(&DiffForm::dlog(img, &model.tower)?);
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Norm test: p is a norm of w exactly when w ∧ dlog(p) is a zero class over
/// the full tower.  w must live over the base field (no top variable), and p
/// must be irreducible; over GF(2) every nonzero polynomial already has
/// leading coefficient 1, so no further normalization applies.
pub fn is_norm(
    w: &DiffForm,
    p: &Poly,
    tower: &Tower,
    opts: &DecideOpts,
) -> Result<(bool, Certificate)> {
    validate_vars(w, tower)?;
    let main = tower.top()?;
    for (mask, coeff) in w.terms() {
        if mask.contains(main) || coeff.uses_var(main) {
            return Err(Error::Domain(
                "the norm candidate form must live over the base of the tower".into(),
            ));
        }
    }
    if p.is_zero() || p.is_one() {
        return Err(Error::Domain("the norm polynomial must be nonconstant".into()));
    }
    if !is_irreducible(p, opts.factor_bound)? {
        return Err(Error::Domain(format!(
            "polynomial {} is not irreducible",
            p.render(tower.names())
        )));
    }
    let wedged = w.wedge(&DiffForm::dlog(&RatFun::from_poly(p.clone()), tower)?);
    decide_zero(&wedged, tower, opts)
}

/// Direct hyperbolicity test over the quotient field of a place: substitute
/// the rational parametrization into the form and decide over the model
/// tower.  This is the other route to the same verdict as `is_norm` and is
/// kept independent of it.
pub fn hyperbolic_over_quotient(
    w: &DiffForm,
    p: &Poly,
    tower: &Tower,
    opts: &DecideOpts,
) -> Result<(bool, Certificate)> {
    validate_vars(w, tower)?;
    if p.is_zero() || p.is_one() {
        return Err(Error::Domain("the quotient polynomial must be nonconstant".into()));
    }
    if !is_irreducible(p, opts.factor_bound)? {
        return Err(Error::Domain(format!(
            "polynomial {} is not irreducible",
            p.render(tower.names())
        )));
    }
    let model = quotient_model(p, tower)?;
    let image = model.map_form(w)?;
    decide_zero(&image, &model.tower, opts)
}
