//! End-to-end acceptance suite.  One test per acceptance criterion; each
//! prints a single summary line with the checked counts and its elapsed time,
//! and fails if it exceeds its time budget.  All randomness is seeded, so a
//! failure reproduces exactly.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use kmk::basis::MultiIndex;
use kmk::completion::{Completion, ResLabel};
use kmk::decide::{hyperbolic_over_quotient, is_norm, CohClass, DecideOpts};
use kmk::factor::is_irreducible;
use kmk::forms::DiffForm;
use kmk::local::PsiMap;
use kmk::matrix::build_residue_matrix;
use kmk::oracle::{
    cross_check, schedule_with_degrees, window_denominator, witness_search, Agreement,
    MonomialWindow,
};
use kmk::parse::{parse_form, parse_poly};
use kmk::place::{is_separable, Place};
use kmk::poly::{Mono, Poly};
use kmk::ratfun::RatFun;
use kmk::residue::{base_form, chi, residue, residue_infinity_mod};
use kmk::series::Series;
use kmk::split::milnor_split;
use kmk::teich::Lifter;
use kmk::tower::Tower;
use kmk::unipoly::UniPoly;

const SEED: u64 = 0x4b_4d_4b_2026;

fn finish(criterion: &str, started: Instant, budget_secs: u64, detail: &str) {
    let elapsed = started.elapsed();
    println!("acceptance {criterion}: PASS - {detail} ({:.2}s)", elapsed.as_secs_f64());
    assert!(
        elapsed < Duration::from_secs(budget_secs),
        "{criterion} exceeded its {budget_secs}s budget: {elapsed:?}"
    );
}

fn ctx_at(tower: &Tower, p: &str) -> Completion {
    let poly = parse_poly(p, tower).unwrap();
    let place = Place::finite(poly, tower, 12).unwrap();
    Completion::new(tower, &place, 12).unwrap()
}

fn ctx_inf(tower: &Tower) -> Completion {
    Completion::new(tower, &Place::Infinity, 12).unwrap()
}

/// Random nonzero polynomial supported on the given variable ids.
fn rand_poly_on(rng: &mut ChaCha8Rng, vars: &[usize], nvars: usize, maxd: u16, terms: usize) -> Poly {
    loop {
        let mut acc = Poly::zero();
        for _ in 0..terms {
            let mut exps = vec![0u16; nvars];
            for &v in vars {
                exps[v] = rng.gen_range(0..=maxd);
            }
            acc = acc.add(&Poly::from_mono(Mono::from_exps(exps)));
        }
        if rng.gen_bool(0.4) {
            acc = acc.add(&Poly::one());
        }
        if !acc.is_zero() {
            return acc;
        }
    }
}

fn rand_ratfun_on(
    rng: &mut ChaCha8Rng,
    vars: &[usize],
    nvars: usize,
    maxd: u16,
    terms: usize,
    dens: &[Poly],
) -> RatFun {
    let num = rand_poly_on(rng, vars, nvars, maxd, terms);
    let den = dens[rng.gen_range(0..dens.len())].clone();
    RatFun::new(num, den).unwrap()
}

/// All masks of the given weight over the given variable ids.
fn masks_of_weight(vars: &[usize], m: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for bits in 0u64..(1 << vars.len()) {
        let mask = MultiIndex::from_bits(
            vars.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &v)| v),
        );
        if mask.weight() as usize == m {
            out.push(mask);
        }
    }
    out
}

/// Random nonzero form of the given degree with masks drawn from `masks` and
/// coefficients from `mkcoeff`.
fn rand_form(
    rng: &mut ChaCha8Rng,
    degree: usize,
    masks: &[MultiIndex],
    mut mkcoeff: impl FnMut(&mut ChaCha8Rng) -> RatFun,
) -> DiffForm {
    loop {
        let mut w = DiffForm::zero(degree);
        for &mask in masks {
            if rng.gen_bool(0.6) {
                let c = mkcoeff(rng);
                w = w.add(&DiffForm::term(degree, mask, c).unwrap()).unwrap();
            }
        }
        if !w.is_zero() {
            return w;
        }
    }
}

/// Position of a tower variable among the residue-field labels of a place.
fn label_pos(ctx: &Completion, var: usize) -> usize {
    ctx.res_labels
        .iter()
        .position(|l| matches!(l, ResLabel::Var(v) if *v == var))
        .expect("base variable must be a residue label")
}

/// A two-window schedule sized to the form: per-variable degrees track the
/// window denominator (so anything supported on its factors is
/// representable), with the denominator exponent capped low to keep the
/// linear systems tractable.
fn fitted_windows(w: &DiffForm, tower: &Tower, slack: usize) -> Vec<MonomialWindow> {
    let u = window_denominator(w, tower, 12).unwrap();
    let n = tower.len();
    let degs: Vec<usize> = (0..n).map(|v| u.deg(v).max(0) as usize + slack).collect();
    let half: Vec<usize> = degs.iter().map(|&d| (d + 1) / 2).collect();
    vec![
        MonomialWindow { u: u.clone(), max_deg: half, max_exp: 1 },
        MonomialWindow { u, max_deg: degs, max_exp: 2 },
    ]
}

#[test]
fn acceptance_1_exact_sequence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut classes = 0usize;
    let mut residue_checks = 0usize;
    let mut recombined = 0usize;

    let setups = [
        ("t;x", vec!["x", "x + t", "x^2 + x + t"], 120usize),
        ("t1,t2;x", vec!["x", "x + t1", "x^2 + x + t2"], 90usize),
    ];
    for (spec, place_texts, rounds) in setups {
        let tower = Tower::parse(spec).unwrap();
        let n = tower.len();
        let main = tower.top().unwrap();
        let base: Vec<usize> = (0..n).filter(|&v| v != main).collect();
        let ctxs: Vec<Completion> = place_texts.iter().map(|p| ctx_at(&tower, p)).collect();
        let cinf = ctx_inf(&tower);
        let base_dens = vec![Poly::one(), Poly::var(base[0]), Poly::var(base[0]).add(&Poly::one())];
        let max_m = base.len().min(2);

        for round in 0..rounds {
            let m = rng.gen_range(0..=max_m);
            let base_masks = masks_of_weight(&base, m);
            let alpha = rand_form(&mut rng, m, &base_masks, |r| {
                rand_ratfun_on(r, &base, n, 2, 2, &base_dens)
            });
            classes += 1;
            match round % 3 {
                0 => {
                    // (a) classes from the base field have zero residue data
                    // at every finite place and at infinity.
                    for ctx in &ctxs {
                        let nf = residue(&alpha, ctx, 4, 32).unwrap();
                        assert!(nf.is_zero(), "base-field class ramified at {:?}", ctx.place);
                        residue_checks += 1;
                    }
                    let nf = residue_infinity_mod(&alpha, &cinf, 4, 32).unwrap();
                    assert!(nf.is_zero(), "base-field class ramified at infinity");
                    residue_checks += 1;
                }
                1 => {
                    // (b) an injected odd-order pole 1/p^(2l-1) shows up as
                    // exactly the predicted polar entry at that place.
                    let ctx = &ctxs[rng.gen_range(0..ctxs.len())];
                    let pole = match &ctx.place {
                        Place::Finite(p) => p.clone(),
                        Place::Infinity => unreachable!(),
                    };
                    let l = rng.gen_range(1..=2i64);
                    let e = 2 * l - 1;
                    let coeff = RatFun::new(Poly::one(), pole.pow(e as u32)).unwrap();
                    let mask = base_masks[rng.gen_range(0..base_masks.len())];
                    let w = alpha.add(&DiffForm::term(m, mask, coeff).unwrap()).unwrap();
                    let nf = residue(&w, ctx, 4, 32).unwrap();
                    let i = MultiIndex::from_bits(mask.iter().map(|v| label_pos(ctx, v)));
                    let j = MultiIndex::singleton(ctx.pi_pos());
                    let mut want = PsiMap::new();
                    want.insert((i, j), BTreeMap::from([(l, UniPoly::one())]));
                    assert_eq!(nf.psi, want, "injected pole has the wrong polar data");
                    residue_checks += 1;
                }
                _ => {
                    // (c) a class with vanishing residues everywhere is the
                    // image of its own unit-part extraction at infinity, up
                    // to an oracle witness.
                    let m = if base.len() > 1 { 0 } else { m };
                    let alpha = if m == alpha.degree() {
                        alpha.clone()
                    } else {
                        rand_form(&mut rng, m, &masks_of_weight(&base, m), |r| {
                            rand_ratfun_on(r, &base, n, 1, 2, &base_dens)
                        })
                    };
                    let pert_dens = vec![Poly::one(), Poly::var(main)];
                    let all: Vec<usize> = (0..n).collect();
                    let eta = rand_form(&mut rng, m, &masks_of_weight(&base, m), |r| {
                        rand_ratfun_on(r, &all, n, 1, 2, &pert_dens)
                    });
                    let mut w = alpha.add(&eta.artin_schreier_image()).unwrap();
                    if m >= 1 {
                        let xi = rand_form(&mut rng, m - 1, &masks_of_weight(&base, m - 1), |r| {
                            rand_ratfun_on(r, &all, n, 1, 2, &pert_dens)
                        });
                        w = w.add(&xi.exterior_d(&tower)).unwrap();
                    }
                    for ctx in &ctxs {
                        let nf = residue(&w, ctx, 4, 32).unwrap();
                        assert!(nf.psi.is_empty(), "polar data on an unramified class");
                        residue_checks += 1;
                    }
                    let dec = kmk::local::normal_form_at(&w, &cinf, 4, 32).unwrap();
                    assert!(dec.psi.is_empty(), "polar data at infinity on an unramified class");
                    let unit = chi(&dec).unwrap();
                    let pulled = base_form(&unit, &cinf, m).unwrap();
                    let diff = w.add(&pulled).unwrap();
                    let hit = fitted_windows(&diff, &tower, 3)
                        .iter()
                        .any(|win| witness_search(&diff, &tower, win).unwrap().is_some());
                    assert!(hit, "no witness that the class recombines from its unit part");
                    recombined += 1;
                }
            }
        }
    }
    finish(
        "1 (exact sequence)",
        started,
        120,
        &format!("{classes} classes, {residue_checks} residue checks, {recombined} recombinations"),
    );
}

#[test]
fn acceptance_2_splitting_identities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let tower = Tower::parse("t;x").unwrap();
    let n = tower.len();
    let all: Vec<usize> = (0..n).collect();

    // Grouped by residue degree so that every same-degree pair is exercised.
    let groups: Vec<Vec<&str>> = vec![
        vec!["x", "x + 1", "x + t", "x + t + 1"],
        vec!["x^2 + x + 1", "x^2 + x + t", "x^2 + t"],
        vec!["x^3 + x + 1", "x^3 + x^2 + 1", "x^3 + x + t"],
    ];
    let ctxs: Vec<Vec<Completion>> =
        groups.iter().map(|g| g.iter().map(|p| ctx_at(&tower, p)).collect()).collect();

    let mut forms = 0usize;
    let mut vanishing = 0usize;
    while forms < 100 {
        let gi = rng.gen_range(0..ctxs.len());
        let pi = rng.gen_range(0..ctxs[gi].len());
        let ctx = &ctxs[gi][pi];
        let pole = match &ctx.place {
            Place::Finite(p) => p.clone(),
            Place::Infinity => unreachable!(),
        };
        let m = rng.gen_range(0..=2usize);
        let masks = masks_of_weight(&all, m);

        // A polar representative whose residue data is the random normal form.
        let mut w = DiffForm::zero(m);
        for _ in 0..rng.gen_range(1..=2) {
            let e = rng.gen_range(1..=3u32);
            let g = rand_poly_on(&mut rng, &all, n, 2, 2);
            let c = RatFun::new(g, pole.pow(e)).unwrap();
            let mask = masks[rng.gen_range(0..masks.len())];
            w = w.add(&DiffForm::term(m, mask, c).unwrap()).unwrap();
        }
        let nf = residue(&w, ctx, 4, 32).unwrap();
        if nf.is_zero() {
            continue;
        }
        forms += 1;

        // The splitting reproduces the data it was built from, on the nose.
        let lift = milnor_split(&nf, ctx).unwrap();
        let back = residue(&lift, ctx, 4, 32).unwrap();
        assert_eq!(back.psi, nf.psi, "polar data not reproduced at {:?}", ctx.place);
        assert_eq!(back.phi2, nf.phi2, "unit data not reproduced at {:?}", ctx.place);

        // ...and is residue-free at every other place of the same degree.
        for (qi, qctx) in ctxs[gi].iter().enumerate() {
            if qi == pi {
                continue;
            }
            let elsewhere = residue(&lift, qctx, 4, 32).unwrap();
            assert!(
                elsewhere.is_zero(),
                "splitting at {:?} ramifies at {:?}",
                ctx.place,
                qctx.place
            );
            vanishing += 1;
        }
    }
    finish(
        "2 (splitting identities)",
        started,
        60,
        &format!("{forms} normal forms split and recovered, {vanishing} cross-place vanishing checks"),
    );
}

#[test]
fn acceptance_3_normal_form_uniqueness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let tower = Tower::parse("t;x").unwrap();
    let n = tower.len();
    let main = tower.top().unwrap();
    let base: Vec<usize> = (0..n).filter(|&v| v != main).collect();
    let all: Vec<usize> = (0..n).collect();

    let place_texts = ["x", "x + 1", "x + t", "x^2 + x + t"];
    let ctxs: Vec<Completion> = place_texts.iter().map(|p| ctx_at(&tower, p)).collect();
    let cinf = ctx_inf(&tower);
    let pert_dens = vec![Poly::one(), Poly::var(main)];

    let mut pairs = 0usize;
    let mut witnessed = 0usize;
    for round in 0..100 {
        let ctx = &ctxs[round % ctxs.len()];
        let pole = match &ctx.place {
            Place::Finite(p) => p.clone(),
            Place::Infinity => unreachable!(),
        };
        let m = rng.gen_range(0..=1usize);
        let masks = masks_of_weight(&all, m);
        let base_masks = masks_of_weight(&base, m);

        let mut w = DiffForm::zero(m);
        for _ in 0..rng.gen_range(1..=2) {
            let e = rng.gen_range(1..=3u32);
            let g = rand_poly_on(&mut rng, &all, n, 2, 2);
            let c = RatFun::new(g, pole.pow(e)).unwrap();
            let mask = masks[rng.gen_range(0..masks.len())];
            w = w.add(&DiffForm::term(m, mask, c).unwrap()).unwrap();
        }

        // Perturbation with base-variable masks: an Artin-Schreier image
        // plus an exact form.  The class is unchanged, so the normal form
        // must be unchanged as data.
        let eta = rand_form(&mut rng, m, &base_masks, |r| {
            rand_ratfun_on(r, &all, n, 1, 2, &pert_dens)
        });
        let mut pert = eta.artin_schreier_image();
        if m >= 1 {
            let xi = rand_form(&mut rng, m - 1, &masks_of_weight(&base, m - 1), |r| {
                RatFun::from_poly(rand_poly_on(r, &base, n, 2, 2))
            });
            pert = pert.add(&xi.exterior_d(&tower)).unwrap();
        }
        let w2 = w.add(&pert).unwrap();
        pairs += 1;

        let nf = residue(&w, ctx, 4, 32).unwrap();
        let nf2 = residue(&w2, ctx, 4, 32).unwrap();
        assert_eq!(nf.psi, nf2.psi, "polar data moved under a trivial perturbation");
        assert_eq!(nf.phi2, nf2.phi2, "unit data moved under a trivial perturbation");

        let at_inf = residue_infinity_mod(&w, &cinf, 4, 32).unwrap();
        let at_inf2 = residue_infinity_mod(&w2, &cinf, 4, 32).unwrap();
        assert_eq!(at_inf.psi, at_inf2.psi, "infinity data moved under a trivial perturbation");

        // The splittings of equal data are equal forms, so the recombination
        // difference is exactly the perturbation; the oracle must witness it.
        let s = milnor_split(&nf, ctx).unwrap();
        let s2 = milnor_split(&nf2, ctx).unwrap();
        assert!(s.add(&s2).unwrap().is_zero(), "splitting is not deterministic on equal data");
        let diff = w.add(&s).unwrap().add(&w2).unwrap().add(&s2).unwrap();
        let hit = fitted_windows(&diff, &tower, 3)
            .iter()
            .any(|win| witness_search(&diff, &tower, win).unwrap().is_some());
        assert!(hit, "recombination difference admits no witness");
        witnessed += 1;
    }
    finish(
        "3 (normal-form uniqueness)",
        started,
        60,
        &format!("{pairs} perturbed pairs, {witnessed} recombination witnesses"),
    );
}

#[test]
fn acceptance_4_teichmuller() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);

    let t1 = Tower::parse("t;x").unwrap();
    let t2 = Tower::parse("t1,t2;x").unwrap();
    let places: Vec<(&Tower, &str)> = vec![
        (&t1, "x"),
        (&t1, "x + 1"),
        (&t1, "x + t"),
        (&t1, "x + t + 1"),
        (&t1, "x^2 + x + 1"),
        (&t1, "x^2 + x + t"),
        (&t1, "x^3 + x + 1"),
        (&t1, "x^2 + t"),
        (&t1, "x^2 + t + 1"),
        (&t1, "x^4 + t"),
        (&t2, "x^2 + x + t1"),
        (&t2, "x^2 + t1*t2"),
    ];

    let mut congruences = 0usize;
    let mut roots = 0usize;
    let mut stability = 0usize;
    let mut inseparable_seen = 0usize;
    for (tower, ptext) in places {
        let ctx = ctx_at(tower, ptext);
        let n = tower.len();
        let main = tower.top().unwrap();
        let base: Vec<usize> = (0..n).filter(|&v| v != main).collect();
        let lifter = Lifter::new(&ctx, 8).unwrap();
        let d = ctx.deg;

        let rand_res = |rng: &mut ChaCha8Rng| {
            let coeffs: Vec<RatFun> = (0..d)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        RatFun::zero()
                    } else {
                        RatFun::from_poly(rand_poly_on(rng, &base, n, 2, 2))
                    }
                })
                .collect();
            let p = UniPoly::from_coeffs(coeffs);
            if p.is_zero() {
                UniPoly::one()
            } else {
                p
            }
        };

        for _ in 0..3 {
            let a = rand_res(&mut rng);
            let b = rand_res(&mut rng);
            let la = lifter.lift(&a).unwrap();
            let lb = lifter.lift(&b).unwrap();

            let sum = lifter.lift(&ctx.reduce(&a.add(&b)).unwrap()).unwrap();
            let sum_parts = la.add(&lb);
            assert!(
                sum.add(&sum_parts).truncate(8).is_zero_to_prec(),
                "additive congruence fails at {ptext}"
            );

            let prod = lifter.lift(&ctx.mul_mod(&a, &b).unwrap()).unwrap();
            let prod_parts = la.mul(&lb, &ctx).unwrap();
            assert!(
                prod.add(&prod_parts).truncate(8).is_zero_to_prec(),
                "multiplicative congruence fails at {ptext}"
            );
            congruences += 2;
        }

        if ctx.dropped.is_none() {
            // Separable: the lift of the residue generator is the Newton
            // root of the monic polynomial.
            let gen_bar = ctx.reduce(&UniPoly::gen()).unwrap();
            let theta = lifter.lift(&gen_bar).unwrap();
            let val = Series::eval_poly(&ctx.monic, &theta, &ctx).unwrap();
            assert!(val.truncate(8).is_zero_to_prec(), "Newton root fails p at {ptext}");
            roots += 1;
        } else {
            // Inseparable: lifts computed under different precision policies
            // agree modulo pi^(2^depth) with 2^depth >= 8.
            inseparable_seen += 1;
            let wider = Lifter::new(&ctx, 17).unwrap();
            for _ in 0..3 {
                let a = rand_res(&mut rng);
                let l1 = lifter.lift(&a).unwrap();
                let l2 = wider.lift(&a).unwrap();
                assert!(
                    l1.add(&l2).truncate(8).is_zero_to_prec(),
                    "inseparable lift depends on the precision policy at {ptext}"
                );
                stability += 1;
            }
        }
    }
    assert!(inseparable_seen >= 3);
    finish(
        "4 (Teichmuller lifting)",
        started,
        30,
        &format!("{congruences} congruences, {roots} Newton roots, {stability} policy checks"),
    );
}

#[test]
fn acceptance_5_matrix_invertibility() {
    let started = Instant::now();
    let tower = Tower::parse("t;x").unwrap();

    let separable_candidates = [
        "x + 1",
        "x + t",
        "x + t + 1",
        "x + t^2",
        "x + t^2 + 1",
        "x + t^2 + t",
        "x^2 + x + 1",
        "x^2 + x + t",
        "x^2 + x + t + 1",
        "x^2 + t*x + 1",
        "x^2 + t*x + t",
        "x^2 + (t + 1)*x + t^2 + t + 1",
        "x^3 + x + 1",
        "x^3 + x^2 + 1",
        "x^3 + x + t",
        "x^3 + x^2 + t",
        "x^3 + t*x + 1",
        "x^3 + x^2 + x + t",
        "x^4 + x + 1",
        "x^4 + x^3 + 1",
        "x^4 + x^3 + x^2 + x + 1",
        "x^4 + x + t",
        "x^4 + x^3 + t",
        "x^4 + t*x + t",
    ];
    let inseparable_candidates =
        ["x^2 + t", "x^2 + t + 1", "x^2 + t^3", "x^4 + t", "x^4 + t + 1", "x^4 + t^3"];

    let mut sep = 0usize;
    let mut insep = 0usize;
    for text in separable_candidates {
        let p = parse_poly(text, &tower).unwrap();
        if !is_irreducible(&p, 12).unwrap() {
            continue;
        }
        assert!(is_separable(&p, &tower).unwrap(), "{text} listed as separable");
        let ctx = ctx_at(&tower, text);
        let mat = build_residue_matrix(&ctx).unwrap();
        assert!(mat.separable);
        assert!(mat.is_invertible(&ctx).unwrap(), "conversion matrix singular at {text}");
        sep += 1;
    }
    for text in inseparable_candidates {
        let p = parse_poly(text, &tower).unwrap();
        assert!(is_irreducible(&p, 12).unwrap(), "{text} must be irreducible");
        assert!(!is_separable(&p, &tower).unwrap(), "{text} listed as inseparable");
        let ctx = ctx_at(&tower, text);
        let mat = build_residue_matrix(&ctx).unwrap();
        assert!(!mat.separable);
        assert!(mat.is_invertible(&ctx).unwrap(), "reduced conversion matrix singular at {text}");
        insep += 1;
    }
    assert!(sep >= 20, "only {sep} separable polynomials survived the corpus filter");
    assert!(insep >= 5);
    finish(
        "5 (matrix invertibility)",
        started,
        30,
        &format!("{sep} separable and {insep} inseparable conversion matrices inverted"),
    );
}

#[test]
fn acceptance_6_norm_theorem() {
    let started = Instant::now();
    let opts = DecideOpts::default();
    let tower = Tower::parse("t;x").unwrap();

    let check_pair = |wtext: &str, ptext: &str, expected: bool, tw: &Tower| {
        let w = parse_form(wtext, tw).unwrap();
        let p = parse_poly(ptext, tw).unwrap();
        let (norm, _) = is_norm(&w, &p, tw, &opts).unwrap();
        let (hyp, _) = hyperbolic_over_quotient(&w, &p, tw, &opts).unwrap();
        assert_eq!(norm, expected, "norm test of {wtext} at {ptext}");
        assert_eq!(hyp, expected, "quotient test of {wtext} at {ptext}");
    };

    // (a) and (b): the pinned instances.
    check_pair("dlog(t)", "x^2 + t", true, &tower);
    check_pair("dlog(t)", "x", false, &tower);

    // (c) hand-worked pairs, each decided through both routes.  The
    // dlog(t^2+t+1) rows are true because the image dlog of an even-degree
    // irreducible has residue 1 at a place whose residue field GF(2^even)
    // has vanishing trace; the odd-degree row and the t-scaled row have
    // trace 1 and stay nonzero.
    let pairs: [(&str, &str, bool); 15] = [
        ("t * dlog(t)", "x + t", true),
        ("(t + 1) * dlog(t)", "x + t", false),
        ("dlog(t + 1)", "x^2 + t + 1", true),
        ("dlog(t)", "x^4 + t", true),
        ("dlog(t^2 + t)", "x + t", false),
        ("dlog(t^2 + t + 1)", "x^2 + x + t", true),
        ("dlog(t)", "x + t", false),
        ("dlog(t)", "x^2 + x + t", false),
        ("dlog(t + 1)", "x^2 + t", true),
        ("t^2 * dlog(t)", "x + t", true),
        ("dlog(t^3)", "x + t", false),
        ("(1/t) * dlog(t)", "x + t", true),
        ("dlog(t^2 + t + 1)", "x + t", true),
        ("dlog(t^3 + t + 1)", "x + t", false),
        ("t * dlog(t^2 + t + 1)", "x + t", false),
    ];
    for (w, p, expected) in pairs {
        check_pair(w, p, expected, &tower);
    }

    // (d) a two-variable tower: the place is linear in the middle variable,
    // so the quotient route recurses through the smaller tower.
    let big = Tower::parse("t,x1;x2").unwrap();
    check_pair("dlog(x1)", "x2^2 + x1", true, &big);
    check_pair("dlog(t)", "x2^2 + x1", false, &big);

    finish("6 (norm theorem)", started, 120, "19 pairs agreed across both routes");
}

#[test]
fn acceptance_7_oracle_cross_check() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let opts = DecideOpts::default();

    let line = Tower::parse("t").unwrap();
    let plane = Tower::parse("t;x").unwrap();

    let mut zero_images = 0usize;
    let mut exact_images = 0usize;
    let mut assorted = 0usize;
    let mut agree_nonzero = 0usize;

    // Artin-Schreier images must come back AGREE-ZERO: the decision side
    // says zero and the witness search must actually find the witness.
    for round in 0..60 {
        let (tower, dens): (&Tower, Vec<Poly>) = if round % 2 == 0 {
            (&line, vec![Poly::one(), Poly::var(0)])
        } else {
            (&plane, vec![Poly::one(), Poly::var(1), Poly::var(1).add(&Poly::var(0))])
        };
        let n = tower.len();
        let all: Vec<usize> = (0..n).collect();
        let m = rng.gen_range(0..=1usize.min(n));
        let masks = masks_of_weight(&all, m);
        let eta = rand_form(&mut rng, m, &masks, |r| rand_ratfun_on(r, &all, n, 2, 2, &dens));
        let w = eta.artin_schreier_image();
        if w.is_zero() {
            continue;
        }
        let class = CohClass::new(w, tower.clone()).unwrap();
        let schedule = fitted_windows(&class.form, tower, 3);
        let report = cross_check(&class, &schedule, &opts).unwrap();
        assert_eq!(
            report.agreement,
            Agreement::AgreeZero,
            "Artin-Schreier image not agreed zero: {}",
            class.form.render(tower)
        );
        zero_images += 1;
    }

    // Exact forms likewise.
    for _ in 0..10 {
        let n = plane.len();
        let all: Vec<usize> = (0..n).collect();
        let dens = vec![Poly::one(), Poly::var(1), Poly::var(1).add(&Poly::var(0))];
        let xi = rand_form(&mut rng, 0, &[MultiIndex::EMPTY], |r| {
            rand_ratfun_on(r, &all, n, 2, 2, &dens)
        });
        let w = xi.exterior_d(&plane);
        if w.is_zero() {
            continue;
        }
        let class = CohClass::new(w, plane.clone()).unwrap();
        let schedule = fitted_windows(&class.form, &plane, 3);
        let report = cross_check(&class, &schedule, &opts).unwrap();
        assert_eq!(report.agreement, Agreement::AgreeZero);
        exact_images += 1;
    }

    // Assorted classes: random polar and unit forms.  Whatever the verdict,
    // the two routes must never conflict.
    let assorted_texts: [(&Tower, &str); 10] = [
        (&line, "dlog(t)"),
        (&line, "dlog(t + 1)"),
        (&line, "dlog(t^2 + t + 1)"),
        (&line, "1/t"),
        (&line, "(t + 1)/t^2"),
        (&plane, "(t/x) * dlog(t)"),
        (&plane, "dlog(t) ^ dlog(x)"),
        (&plane, "dlog(x^2 + x + t)"),
        (&plane, "x * dlog(x)"),
        (&plane, "t/(x^2 + x + t)"),
    ];
    for (tower, text) in assorted_texts {
        let w = parse_form(text, tower).unwrap();
        let class = CohClass::new(w, tower.clone()).unwrap();
        let u = window_denominator(&class.form, tower, 12).unwrap();
        let schedule = schedule_with_degrees(&u, &[2, 4], tower.len());
        let report = cross_check(&class, &schedule, &opts).unwrap();
        assert_ne!(report.agreement, Agreement::Conflict, "conflict on {text}");
        if report.agreement == Agreement::AgreeNonzero {
            agree_nonzero += 1;
        }
        assorted += 1;
    }
    for _ in 0..30 {
        let n = plane.len();
        let all: Vec<usize> = (0..n).collect();
        let m = rng.gen_range(0..=2usize);
        let masks = masks_of_weight(&all, m);
        let dens = vec![
            Poly::one(),
            Poly::var(1),
            Poly::var(1).add(&Poly::var(0)),
            Poly::var(1).add(&Poly::one()),
        ];
        let w = rand_form(&mut rng, m, &masks, |r| rand_ratfun_on(r, &all, n, 2, 2, &dens));
        let class = CohClass::new(w, plane.clone()).unwrap();
        let u = window_denominator(&class.form, &plane, 12).unwrap();
        let schedule = schedule_with_degrees(&u, &[2, 4], plane.len());
        let report = cross_check(&class, &schedule, &opts).unwrap();
        assert_ne!(
            report.agreement,
            Agreement::Conflict,
            "conflict on {}",
            class.form.render(&plane)
        );
        if report.agreement == Agreement::AgreeNonzero {
            agree_nonzero += 1;
        }
        assorted += 1;
    }

    assert!(zero_images + exact_images + assorted >= 100);
    finish(
        "7 (oracle cross-check)",
        started,
        180,
        &format!(
            "{zero_images} Artin-Schreier images and {exact_images} exact forms agreed zero, \
             {assorted} assorted classes conflict-free ({agree_nonzero} agreed nonzero)"
        ),
    );
}

#[test]
fn acceptance_8_filtration_vanishing() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let tower = Tower::parse("t;x").unwrap();
    let n = tower.len();
    let all: Vec<usize> = (0..n).collect();

    // Log factors and denominators available to a level-(d-1) generator,
    // and the degree-d places where its residue must vanish.
    let level_pool: [(&[&str], &[&str]); 3] = [
        (&[], &["x", "x + 1", "x + t"]),
        (&["x", "x + 1", "x + t", "x + t + 1"], &["x^2 + x + 1", "x^2 + x + t", "x^2 + t"]),
        (
            &["x", "x + 1", "x + t", "x^2 + x + 1", "x^2 + x + t", "x^2 + t"],
            &["x^3 + x + 1", "x^3 + x^2 + 1", "x^3 + x + t"],
        ),
    ];
    let ctxs: Vec<Vec<Completion>> = level_pool
        .iter()
        .map(|(_, places)| places.iter().map(|p| ctx_at(&tower, p)).collect())
        .collect();
    let pools: Vec<Vec<Poly>> = level_pool
        .iter()
        .map(|(pool, _)| pool.iter().map(|p| parse_poly(p, &tower).unwrap()).collect())
        .collect();

    let mut checked = 0usize;
    let mut round = 0usize;
    while checked < 50 {
        let level = round % 3; // generators of level d-1 = level, places of degree d = level+1
        round += 1;
        let pool = &pools[level];
        let m = rng.gen_range(0..=2usize);

        // Scalar part: polynomial numerator over a denominator built from
        // irreducibles of degree <= d-1 only.
        let num = rand_poly_on(&mut rng, &all, n, 3, 3);
        let mut den = Poly::one();
        if !pool.is_empty() {
            for _ in 0..rng.gen_range(0..=2) {
                let f = &pool[rng.gen_range(0..pool.len())];
                for _ in 0..rng.gen_range(1..=2) {
                    den = den.mul(f);
                }
            }
        }
        let scalar = RatFun::new(num, den).unwrap();

        // Log factors: the base variable or small irreducibles, distinct.
        let mut factors: Vec<RatFun> = Vec::new();
        let mut choices: Vec<RatFun> = vec![RatFun::var(0)];
        choices.extend(pool.iter().map(|p| RatFun::from_poly(p.clone())));
        while factors.len() < m && !choices.is_empty() {
            let f = choices.remove(rng.gen_range(0..choices.len()));
            factors.push(f);
        }
        if factors.len() < m {
            continue; // level 0 supports only m <= 1
        }
        let w = DiffForm::make_form(&scalar, &factors, &tower).unwrap();
        if w.is_zero() {
            continue;
        }

        let ctx = &ctxs[level][rng.gen_range(0..ctxs[level].len())];
        let nf = residue(&w, ctx, 4, 32).unwrap();
        assert!(nf.is_zero(), "level-{level} generator has residue data at {:?}", ctx.place);
        checked += 1;
    }
    finish(
        "8 (filtration vanishing)",
        started,
        30,
        &format!("{checked} low-level generators residue-free at higher-degree places"),
    );
}
