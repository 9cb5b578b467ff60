use crate::error::{Error, Result};
use crate::poly::{Mono, Poly};
use std::collections::BTreeMap;

/// Hard cap on the log2 of the trial-division candidate space per degree
/// level; above this the factorization reports its bound instead of looping
/// for hours.
const MAX_CANDIDATE_BITS: usize = 20;

/// Factor a nonzero polynomial over GF(2)[vars] into irreducibles with
/// multiplicity, deterministically ordered by (total degree, term order).
///
/// Exhaustive bounded trial division: candidate divisors are enumerated by
/// increasing total degree up to `bound`; the first divisor found at the
/// lowest degree is necessarily irreducible (total degree is additive).
/// Square roots and gcd-with-derivative splits are taken first so repeated
/// factors cost little.  When the candidate space outgrows the budget the
/// call fails with the unfactored remainder.
pub fn factor_bounded(p: &Poly, bound: usize) -> Result<Vec<(Poly, u32)>> {
    if p.is_zero() {
        return Err(Error::Domain("cannot factor the zero polynomial".into()));
    }
    let mut acc: BTreeMap<Poly, u32> = BTreeMap::new();
    split(p.clone(), 1, bound, &mut acc)?;
    let mut out: Vec<(Poly, u32)> = acc.into_iter().collect();
    out.sort_by(|(a, _), (b, _)| a.cmp_display(b));
    Ok(out)
}

pub fn is_irreducible(p: &Poly, bound: usize) -> Result<bool> {
    if p.is_zero() || p.is_one() {
        return Ok(false);
    }
    let f = factor_bounded(p, bound)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

fn add_factor(acc: &mut BTreeMap<Poly, u32>, f: Poly, mult: u32) {
    if !f.is_one() {
        *acc.entry(f).or_insert(0) += mult;
    }
}

fn split(p: Poly, mult: u32, bound: usize, acc: &mut BTreeMap<Poly, u32>) -> Result<()> {
    if p.is_one() {
        return Ok(());
    }
    if let Some(r) = p.sqrt() {
        return split(r, mult * 2, bound, acc);
    }
    let main = match p.max_var() {
        None => return Ok(()), // constant 1 handled above; 0 impossible here
        Some(v) => v,
    };
    // Pull out the content with respect to the top variable.
    let coeffs = p.as_univar(main);
    let mut content = Poly::zero();
    for c in &coeffs {
        if !c.is_zero() {
            content = content.gcd(c);
        }
    }
    let prim = p.div_exact(&content).expect("content divides");
    if !content.is_one() {
        split(content, mult, bound, acc)?;
    }
    if prim.is_one() {
        return Ok(());
    }
    // gcd with the main-variable derivative splits off repeated parts.
    let pd = prim.derivative(main);
    if !pd.is_zero() {
        let g = prim.gcd(&pd);
        if !g.is_one() && g != prim {
            let rest = prim.div_exact(&g).expect("gcd divides");
            split(g, mult, bound, acc)?;
            return split(rest, mult, bound, acc);
        }
    }
    trial_divide(prim, main, mult, bound, acc)
}

fn trial_divide(
    mut p: Poly,
    main: usize,
    mult: u32,
    bound: usize,
    acc: &mut BTreeMap<Poly, u32>,
) -> Result<()> {
    loop {
        if p.is_one() {
            return Ok(());
        }
        match find_divisor(&p, main, bound)? {
            None => {
                add_factor(acc, p, mult);
                return Ok(());
            }
            Some(q) => {
                let mut m = 0;
                while let Some(next) = p.div_exact(&q) {
                    p = next;
                    m += 1;
                }
                add_factor(acc, q, mult * m);
                // content may reappear after division; re-split the rest
                if !p.is_one() {
                    return split(p, mult, bound, acc);
                }
            }
        }
    }
}

/// Search for a divisor of minimal total degree, at most half the total
/// degree of p, subject to the per-variable degree bounds of p.
fn find_divisor(p: &Poly, main: usize, bound: usize) -> Result<Option<Poly>> {
    let half_main = (p.deg(main) / 2).max(0) as u16;
    if half_main == 0 {
        return Ok(None); // irreducible in main: any proper divisor would be content
    }
    let nvars = p.max_var().map(|v| v + 1).unwrap_or(0);
    let var_bounds: Vec<u16> = (0..nvars).map(|v| p.deg(v).max(0) as u16).collect();
    let max_total = ((p.total_deg() / 2) as usize).min(bound);

    for dc in 1..=max_total {
        // Monomial grid for this level.
        let mut monos: Vec<Mono> = Vec::new();
        enumerate_monos(&var_bounds, main, half_main, dc as u32, &mut monos);
        let (lower, top): (Vec<&Mono>, Vec<&Mono>) =
            monos.iter().partition(|m| (m.total_deg() as usize) < dc);
        let lower: Vec<&Mono> = lower;
        let top: Vec<&Mono> = top;
        if top.is_empty() {
            continue;
        }
        let bits = lower.len() + top.len();
        if bits > MAX_CANDIDATE_BITS {
            return Err(Error::FactorBound {
                bound,
                remainder: format!("{} candidate monomials at degree {dc}", bits),
            });
        }
        // Candidates: nonempty subset of top-degree monomials plus any subset
        // of the lower ones; counter order makes the scan deterministic.
        let top_count = 1u64 << top.len();
        let low_count = 1u64 << lower.len();
        for tmask in 1..top_count {
            for lmask in 0..low_count {
                let mut q = Poly::zero();
                let mut has_main = false;
                for (i, m) in top.iter().enumerate() {
                    if tmask >> i & 1 == 1 {
                        if m.exp(main) > 0 {
                            has_main = true;
                        }
                        q = q.add(&Poly::from_mono((*m).clone()));
                    }
                }
                for (i, m) in lower.iter().enumerate() {
                    if lmask >> i & 1 == 1 {
                        if m.exp(main) > 0 {
                            has_main = true;
                        }
                        q = q.add(&Poly::from_mono((*m).clone()));
                    }
                }
                if !has_main || q.is_one() {
                    continue;
                }
                if q.divides(p) {
                    return Ok(Some(q));
                }
            }
        }
    }
    Ok(None)
}

fn enumerate_monos(var_bounds: &[u16], main: usize, half_main: u16, max_total: u32, out: &mut Vec<Mono>) {
    fn rec(
        var: usize,
        var_bounds: &[u16],
        main: usize,
        half_main: u16,
        left: u32,
        exps: &mut Vec<u16>,
        out: &mut Vec<Mono>,
    ) {
        if var == var_bounds.len() {
            out.push(Mono::from_exps(exps.clone()));
            return;
        }
        let cap = if var == main { half_main } else { var_bounds[var] };
        let cap = cap.min(left as u16);
        for e in 0..=cap {
            exps.push(e);
            rec(var + 1, var_bounds, main, half_main, left - e as u32, exps, out);
            exps.pop();
        }
    }
    let mut exps = Vec::new();
    rec(0, var_bounds, main, half_main, max_total, &mut exps, out);
}
