use crate::basis::{two_basis_decompose, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, LinSolve};
use crate::place::Place;
use crate::ratfun::RatFun;
use crate::tower::Tower;
use crate::unipoly::UniPoly;
use std::collections::BTreeMap;

/// A 2-basis label of a residue field: a retained base variable, or the class
/// of the top variable itself (inseparable places only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ResLabel {
    Var(usize),
    XBar,
}

/// Completion of the tower's top function field at a place, with everything
/// the local computations need precomputed:
///
/// * the monic minimal polynomial of the place over the base field,
/// * the ordered 2-basis of the residue field (the uniformizer, always the
///   maximal basis element of the completion, is kept implicit),
/// * for inseparable places: which base variable was dropped and the
///   certificate expressing it over the retained basis,
/// * the derivations of the residue field with respect to its 2-basis.
///
/// Residue-field elements are univariate polynomials in the top variable of
/// degree < deg(place) with base-field coefficients; at infinity and at
/// degree-1 places they are constants.
#[derive(Debug, Clone)]
pub struct Completion {
    pub tower: Tower,
    pub place: Place,
    pub main: usize,
    pub monic: UniPoly,
    pub deg: usize,
    pub res_labels: Vec<ResLabel>,
    pub dropped: Option<usize>,
    pub drop_cert: Vec<(MultiIndex, UniPoly)>,
    /// d(top-variable class)/d(label) for separable finite places, one entry
    /// per residue label; zero at infinity where nothing depends on labels.
    dxbar: Vec<UniPoly>,
    /// d(dropped variable)/d(label) for inseparable places.
    ddropped: Vec<UniPoly>,
}

impl Completion {
    pub fn new(tower: &Tower, place: &Place, _factor_bound: usize) -> Result<Completion> {
        let main = tower.top()?;
        let base_vars: Vec<usize> = (0..main).collect();
        match place {
            Place::Infinity => {
                let res_labels = base_vars.iter().map(|&v| ResLabel::Var(v)).collect();
                Ok(Completion {
                    tower: tower.clone(),
                    place: place.clone(),
                    main,
                    monic: UniPoly::gen(),
                    deg: 1,
                    res_labels,
                    dropped: None,
                    drop_cert: Vec::new(),
                    dxbar: vec![UniPoly::zero(); base_vars.len()],
                    ddropped: Vec::new(),
                })
            }
            Place::Finite(p) => {
                let monic = place.monic(main)?;
                let deg = monic.deg() as usize;
                let separable = place.is_separable(main);
                let mut c = Completion {
                    tower: tower.clone(),
                    place: place.clone(),
                    main,
                    monic,
                    deg,
                    res_labels: base_vars.iter().map(|&v| ResLabel::Var(v)).collect(),
                    dropped: None,
                    drop_cert: Vec::new(),
                    dxbar: Vec::new(),
                    ddropped: Vec::new(),
                };
                if separable {
                    // d(xbar)/d(t_i) = (dp/dt_i) / (dp/dx) mod p
                    let dmain = c.monic.derivative_main();
                    let dmain_inv = c.inv_mod(&dmain.rem(&c.monic)?)?;
                    let mut dxbar = Vec::new();
                    for &v in &base_vars {
                        let num = c.monic.derivative_coeffs(v).rem(&c.monic)?;
                        dxbar.push(c.mul_mod(&num, &dmain_inv)?);
                    }
                    c.dxbar = dxbar;
                } else {
                    // Drop the largest base variable of p that the retained
                    // ones express; the top variable's class joins the basis.
                    let mut cands: Vec<usize> =
                        base_vars.iter().copied().filter(|&v| p.uses_var(v)).collect();
                    cands.reverse();
                    let mut chosen = None;
                    for cand in cands {
                        let retained: Vec<ResLabel> = base_vars
                            .iter()
                            .filter(|&&v| v != cand)
                            .map(|&v| ResLabel::Var(v))
                            .collect();
                        let target = UniPoly::constant(RatFun::var(cand));
                        if let Some(cert) = c.decompose_over(&target, &retained)? {
                            chosen = Some((cand, retained, cert));
                            break;
                        }
                    }
                    let (cand, retained, cert) = chosen.ok_or_else(|| {
                        Error::Internal(format!(
                            "no droppable variable for inseparable place {}",
                            place.render(tower)
                        ))
                    })?;
                    let mut res_labels = retained;
                    res_labels.push(ResLabel::XBar);
                    // d(t_dropped)/d(label): differentiate the certificate;
                    // squared components die, only the basis monomials differentiate.
                    let mut ddropped = vec![UniPoly::zero(); res_labels.len()];
                    for (pos, _) in res_labels.iter().enumerate() {
                        let mut acc = UniPoly::zero();
                        for (mask, y) in &cert {
                            if mask.contains(pos) {
                                let rest = mask.without(pos);
                                let mono = c.label_monomial(&res_labels, rest)?;
                                let term = c.mul_mod(&mono, &y.square().rem(&c.monic)?)?;
                                acc = acc.add(&term);
                            }
                        }
                        ddropped[pos] = acc;
                    }
                    c.res_labels = res_labels;
                    c.dropped = Some(cand);
                    c.drop_cert = cert.into_iter().collect();
                    c.ddropped = ddropped;
                    c.dxbar = Vec::new();
                }
                Ok(c)
            }
        }
    }

    pub fn base_vars(&self) -> Vec<usize> {
        (0..self.main).collect()
    }

    /// Position of the uniformizer label in completion multi-indices: it is
    /// always the maximal 2-basis element.
    pub fn pi_pos(&self) -> usize {
        self.res_labels.len()
    }

    pub fn label_name(&self, pos: usize) -> String {
        if pos == self.pi_pos() {
            return "pi".to_string();
        }
        match self.res_labels[pos] {
            ResLabel::Var(v) => self.tower.var_name(v).to_string(),
            ResLabel::XBar => format!("{}bar", self.tower.var_name(self.main)),
        }
    }

    pub fn label_names(&self) -> Vec<String> {
        (0..=self.pi_pos()).map(|p| self.label_name(p)).collect()
    }

    /// The residue element represented by one 2-basis label.
    pub fn label_value(&self, label: ResLabel) -> UniPoly {
        match label {
            ResLabel::Var(v) => UniPoly::constant(RatFun::var(v)),
            ResLabel::XBar => UniPoly::gen(),
        }
    }

    /// Product of the labels in `mask` (positions into `labels`), mod p.
    fn label_monomial(&self, labels: &[ResLabel], mask: MultiIndex) -> Result<UniPoly> {
        let mut acc = UniPoly::one();
        for pos in mask.iter() {
            acc = self.mul_mod(&acc, &self.label_value(labels[pos]))?;
        }
        Ok(acc)
    }

    /// Product of residue-basis labels in `mask` (positions into res_labels).
    pub fn basis_monomial(&self, mask: MultiIndex) -> Result<UniPoly> {
        self.label_monomial(&self.res_labels, mask)
    }

    pub fn reduce(&self, a: &UniPoly) -> Result<UniPoly> {
        a.rem(&self.monic)
    }

    pub fn mul_mod(&self, a: &UniPoly, b: &UniPoly) -> Result<UniPoly> {
        a.mul(b).rem(&self.monic)
    }

    pub fn square_mod(&self, a: &UniPoly) -> Result<UniPoly> {
        a.square().rem(&self.monic)
    }

    pub fn inv_mod(&self, a: &UniPoly) -> Result<UniPoly> {
        a.inverse_mod(&self.monic)
    }

    /// Decompose a residue element over the full residue 2-basis:
    /// a = sum over I of label^I * (a_I)^2.  Errors if the claimed basis
    /// fails to span (an internal consistency violation).
    pub fn decompose(&self, a: &UniPoly) -> Result<BTreeMap<MultiIndex, UniPoly>> {
        match self.decompose_over(a, &self.res_labels.clone())? {
            Some(parts) => Ok(parts),
            None => Err(Error::Internal(format!(
                "residue 2-basis of {} failed to span",
                self.place.render(&self.tower)
            ))),
        }
    }

    /// Square root in the residue field, if the element is a square.
    pub fn sqrt_res(&self, a: &UniPoly) -> Result<Option<UniPoly>> {
        let parts = self.decompose_over(a, &[])?;
        Ok(parts.map(|m| m.get(&MultiIndex::EMPTY).cloned().unwrap_or_else(UniPoly::zero)))
    }

    /// Solve a = sum over I subset of `gens` of gen^I * (y_I)^2 exactly.
    ///
    /// Semilinear in the unknowns, but linear over the base field once both
    /// sides are split along the base 2-basis: comparing components of
    /// t^K * (.)^2 and taking square roots leaves an honest linear system.
    /// Returns None when no decomposition exists (used by the drop search).
    pub fn decompose_over(
        &self,
        a: &UniPoly,
        gens: &[ResLabel],
    ) -> Result<Option<BTreeMap<MultiIndex, UniPoly>>> {
        let d = self.deg;
        let base = self.base_vars();
        let r = gens.len();
        let ncols = (1usize << r) * d;
        // Row space: (xbar power j, base-field square-class K) discovered on the fly.
        let mut row_ids: BTreeMap<(usize, MultiIndex), usize> = BTreeMap::new();
        let mut cols: Vec<BTreeMap<usize, RatFun>> = vec![BTreeMap::new(); ncols];
        let mut rhs_rows: BTreeMap<usize, RatFun> = BTreeMap::new();

        let row_of = |key: (usize, MultiIndex), row_ids: &mut BTreeMap<(usize, MultiIndex), usize>| {
            let next = row_ids.len();
            *row_ids.entry(key).or_insert(next)
        };

        for mask_bits in 0..(1u64 << r) {
            let mask = MultiIndex(mask_bits);
            let mono = self.label_monomial(gens, mask)?;
            for k in 0..d {
                // Q = gen^mask * X^(2k) mod p
                let q = self.mul_mod(&mono, &UniPoly::monomial(RatFun::one(), 2 * k))?;
                let col = (mask_bits as usize) * d + k;
                for j in 0..d {
                    let qc = q.coeff(j);
                    if qc.is_zero() {
                        continue;
                    }
                    for (kmask, comp) in two_basis_decompose(&qc, &base)? {
                        let row = row_of((j, kmask), &mut row_ids);
                        cols[col].insert(row, comp);
                    }
                }
            }
        }
        for j in 0..d {
            let ac = a.coeff(j);
            if ac.is_zero() {
                continue;
            }
            for (kmask, comp) in two_basis_decompose(&ac, &base)? {
                let row = row_of((j, kmask), &mut row_ids);
                rhs_rows.insert(row, comp);
            }
        }

        let nrows = row_ids.len();
        let mut mat = vec![vec![RatFun::zero(); ncols]; nrows];
        let mut rhs = vec![RatFun::zero(); nrows];
        for (col, entries) in cols.iter().enumerate() {
            for (&row, val) in entries {
                mat[row][col] = val.clone();
            }
        }
        for (&row, val) in &rhs_rows {
            rhs[row] = val.clone();
        }

        let solved = solve_linear(
            mat,
            rhs,
            RatFun::zero(),
            &|x| x.is_zero(),
            &|x, y| x.add(y),
            &|x, y| x.mul(y),
            &|x| x.inv(),
        )?;
        let x = match solved {
            LinSolve::Inconsistent => return Ok(None),
            LinSolve::Unique(x) => x,
            LinSolve::Underdetermined(x) => x,
        };
        let mut out = BTreeMap::new();
        for mask_bits in 0..(1u64 << r) {
            let coeffs: Vec<RatFun> =
                (0..d).map(|k| x[(mask_bits as usize) * d + k].clone()).collect();
            let y = UniPoly::from_coeffs(coeffs);
            if !y.is_zero() {
                out.insert(MultiIndex(mask_bits), y);
            }
        }
        // Exact verification: the solve ran over a possibly partial row space.
        let mut check = UniPoly::zero();
        for (mask, y) in &out {
            let term = self.mul_mod(&self.label_monomial(gens, *mask)?, &self.square_mod(y)?)?;
            check = check.add(&term);
        }
        if check.add(&self.reduce(a)?).is_zero() {
            Ok(Some(out))
        } else {
            Ok(None)
        }
    }

    /// Derivation of the residue field along residue basis label `pos`.
    ///
    /// Representatives may involve the top variable (whose class depends on
    /// the t_i at separable places) and the dropped variable (a function of
    /// the retained basis at inseparable places); both chain rules are
    /// precomputed at construction.
    pub fn derive(&self, a: &UniPoly, pos: usize) -> Result<UniPoly> {
        let a = self.reduce(a)?;
        match (self.res_labels[pos], self.dropped) {
            (ResLabel::Var(v), None) => {
                let mut out = a.derivative_coeffs(v);
                if !self.dxbar.is_empty() {
                    let chain = a.derivative_main().mul(&self.dxbar[pos]);
                    out = out.add(&chain);
                }
                self.reduce(&out)
            }
            (ResLabel::Var(v), Some(dropped)) => {
                let mut out = a.derivative_coeffs(v);
                let chain = a.derivative_coeffs(dropped).mul(&self.ddropped[pos]);
                out = out.add(&chain);
                self.reduce(&out)
            }
            (ResLabel::XBar, _) => self.reduce(&a.derivative_main()),
        }
    }
}
