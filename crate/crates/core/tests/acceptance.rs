use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qoper_algebra::{q_pochhammer, random, theta_expand, RationalFunction, Registry, TruncatedSeries};
use qoper_core::dell::{degeneration_check, dell_commutativity_certificate, DellModel, ThetaVariant};
use qoper_core::macdonald::{eigencheck, schur_specialization_check, LocusConvention, Partition};
use qoper_core::qoper::verify_trs_point;
use qoper_core::trs::{check_commutativity, duality_solve, mirror_check, sample_duality_data, SolveOptions, TrsFrame};
use qoper_core::vertex::{eigen_residual, truncation_check};

/// Criteria whose failure is understood and documented; they still print FAIL.
const KNOWN_UNATTAINED: &[u32] = &[5];

type Outcome = (bool, String);

fn trs_commutativity() -> Outcome {
    let mut notes = vec![];
    let mut ok = true;
    for n in 2..=4 {
        let r = check_commutativity(&TrsFrame::generic(n, "x", "t")).unwrap();
        ok &= r.all_zero();
        notes.push(format!("N={n}: {} pairs, nonzero {:?}", r.pairs_checked, r.nonzero_pairs));
    }
    (ok, notes.join("; "))
}

fn duality() -> Outcome {
    let (res_tol, d_tol, qq_tol, bethe_tol) = (1e-10, 1e-9, 1e-10, 1e-9);
    let mut ok = true;
    let mut notes = vec![];
    for n in 2..=3usize {
        let mut rng = ChaCha8Rng::seed_from_u64(2024 + n as u64);
        let mut worst = [0.0f64; 4];
        let mut counts_ok = true;
        for s in 0..20 {
            let data = sample_duality_data(&mut rng, n);
            let opts = SolveOptions { seed: s, ..Default::default() };
            let sol = duality_solve(&data.xi, &data.a, data.q, &opts).unwrap();
            counts_ok &= sol.count() == (1..=n).product::<usize>();
            worst[0] = worst[0].max(sol.max_residual());
            for pt in &sol.points {
                let v = verify_trs_point(&data.xi, &pt.momenta, &data.a, data.q).unwrap();
                worst[1] = worst[1].max(v.d_check);
                worst[2] = worst[2].max(v.max_qq());
                worst[3] = worst[3].max(v.max_bethe());
            }
        }
        ok &= counts_ok && worst[0] < res_tol && worst[1] < d_tol && worst[2] < qq_tol && worst[3] < bethe_tol;
        notes.push(format!(
            "N={n}: all N! {counts_ok}, residual {:.1e}, D~Lambda {:.1e}, QQ {:.1e}, Bethe {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ));
    }
    (ok, notes.join("; "))
}

fn mirror() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for n in 2..=3usize {
        let mut rng = ChaCha8Rng::seed_from_u64(77 + n as u64);
        let mut worst = 0.0f64;
        let mut all = true;
        for s in 0..10 {
            let data = sample_duality_data(&mut rng, n);
            let opts = SolveOptions { seed: s, ..Default::default() };
            let mag = duality_solve(&data.xi, &data.a, data.q, &opts).unwrap();
            let r = mirror_check(&mag, &data.a, &data.xi, data.q, &opts).unwrap();
            all &= r.passed();
            worst = worst.max(r.magnetic_max_residual).max(r.electric_max_residual);
        }
        ok &= all;
        notes.push(format!("N={n}: counts and residuals match {all}, worst residual {worst:.1e}"));
    }
    (ok, notes.join("; "))
}

fn macdonald() -> Outcome {
    let mut ok = true;
    let mut checked = 0;
    let mut bad = vec![];
    for n in 1..=3 {
        for size in 0..=4 {
            for lambda in Partition::all(size, n) {
                let r = eigencheck(&lambda, n).unwrap();
                let schur = schur_specialization_check(&lambda, n).unwrap();
                let good = r.simultaneous() && r.eigenvalues_match_formula() && r.top_eigenvalue_is_q_power() && schur;
                checked += 1;
                if !good {
                    bad.push(format!("{lambda} n={n}"));
                }
                ok &= good;
            }
        }
    }
    (ok, format!("{checked} partitions, exact eigenvectors, H_n -> q^|lambda|, h=q gives Schur; failures {bad:?}"))
}

fn truncation() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for (n, max) in [(2usize, 4u32), (3, 3)] {
        let mut passed = 0;
        let mut total = 0;
        let mut reasons = vec![];
        for size in 0..=max {
            for lambda in Partition::all(size, n) {
                total += 1;
                match truncation_check(&lambda, n, max.max(1), LocusConvention::resolved()) {
                    Ok(r) if r.matches_oracle => passed += 1,
                    Ok(r) => reasons.push(format!("{lambda}: terminates at {} but differs from P", r.fixed_point)),
                    Err(e) => reasons.push(format!("{lambda}: {e}")),
                }
            }
        }
        ok &= passed == total;
        let first = reasons.first().cloned().unwrap_or_default();
        notes.push(format!("n={n}: {passed}/{total} match{}", if first.is_empty() { String::new() } else { format!(" (e.g. {first})") }));
    }
    (ok, notes.join("; "))
}

fn eigen() -> Outcome {
    let r = eigen_residual(2, 4).unwrap();
    (r.vanishes(), format!("n=2 through z^4, lowest nonzero orders {:?}", r.lowest_orders()))
}

fn dell() -> Outcome {
    let t = Instant::now();
    let full = dell_commutativity_certificate(&DellModel::new(3, 1, 1).unwrap()).unwrap();
    let stretch = dell_commutativity_certificate(&DellModel::new(3, 2, 2).unwrap()).unwrap();
    let bad = dell_commutativity_certificate(&DellModel::new(3, 1, 1).unwrap().with_theta(ThetaVariant::Corrupted)).unwrap();
    let bad_at_w1 = bad.pairs.iter().any(|p| p.failing_orders.iter().any(|o| o[1] == 1));
    let ok = full.passed() && stretch.passed() && !bad.passed() && bad_at_w1;
    (
        ok,
        format!(
            "N=3 (1,1) {}, stretch (2,2) {}, corrupted theta fails {} (first {:?}, w^1 failure {bad_at_w1}), {:.1}s",
            full.passed(),
            stretch.passed(),
            !bad.passed(),
            bad.first_failure(),
            t.elapsed().as_secs_f64()
        ),
    )
}

fn degeneration() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for n in 2..=3 {
        let r = degeneration_check(n, 1, 1).unwrap();
        ok &= r.passed();
        let factors: Vec<String> = r.dell_to_ers.iter().map(|m| m.factor.as_ref().map_or("-".into(), |f| f.to_string())).collect();
        notes.push(format!("N={n}: {} (DELL->eRS factors {factors:?}, eRS->tRS exact {})", r.passed(), r.ers_to_trs.iter().all(|m| m.matches)));
    }
    (ok, notes.join("; "))
}

fn kernel() -> Outcome {
    let mut failures = 0;
    let mut runs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let reg = Registry::new(&["a", "b", "c"]);
    for _ in 0..100 {
        let x = random::laurent(&mut rng, &reg, 4, 3);
        let y = random::laurent(&mut rng, &reg, 4, 3);
        let z = random::laurent(&mut rng, &reg, 4, 3);
        runs += 1;
        if &(&x * &y) * &z != &x * &(&y * &z) || &x * &(&y + &z) != &(&x * &y) + &(&x * &z) || &x * &y != &y * &x {
            failures += 1;
        }
    }
    let preg = Registry::new(&["x", "q"]);
    let q = RationalFunction::var(&preg, "q").unwrap();
    let one = RationalFunction::one(&preg);
    for _ in 0..100 {
        let x = RationalFunction::from(random::monomial(&mut rng, &preg));
        for d in -5..=5 {
            runs += 1;
            let (Ok(lhs), Ok(prev)) = (q_pochhammer(&x, "q", d), q_pochhammer(&x, "q", d - 1)) else {
                continue;
            };
            if lhs != &(&one - &(&x * &q.pow(d - 1).unwrap())) * &prev {
                failures += 1;
            }
        }
    }
    let treg = Registry::new(&["x"]);
    for cap in 0..=4u32 {
        let x = RationalFunction::var(&treg, "x").unwrap();
        let unit = TruncatedSeries::one(&["p"], &[cap], &treg);
        let mut shifted = unit.clone();
        for k in 0..=cap {
            shifted = &shifted * &(&unit - &unit.monomial_like(vec![k + 1], x.clone()));
            shifted = &shifted * &(&unit - &unit.monomial_like(vec![k], x.inv().unwrap()));
        }
        runs += 1;
        if shifted != theta_expand(&x, "p", cap).unwrap().scale(&-x.inv().unwrap()) {
            failures += 1;
        }
    }
    let sreg = Registry::new(&["x1", "x2"]);
    let unit = TruncatedSeries::one(&["p", "w"], &[2, 2], &sreg);
    for _ in 0..100 {
        let s = random::invertible_series(&mut rng, &["p", "w"], &[2, 2], &sreg);
        runs += 1;
        if !(&(&s * &s.invert().unwrap()) - &unit).is_zero() {
            failures += 1;
        }
    }
    (failures == 0, format!("{runs} randomized checks (seed 9), {failures} failures"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "tRS commutativity", trs_commutativity),
        (2, "quantum/classical duality", duality),
        (3, "mirror symmetry", mirror),
        (4, "Macdonald eigenstructure", macdonald),
        (5, "vertex truncation", truncation),
        (6, "vertex eigen residual", eigen),
        (7, "DELL commutativity", dell),
        (8, "degeneration chain", degeneration),
        (9, "kernel properties", kernel),
    ];
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        let t = Instant::now();
        let (ok, detail) = f();
        let known = KNOWN_UNATTAINED.contains(&id);
        println!(
            "criterion {id} {}: {name} [{:.1}s] {detail}{}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            if !ok && known { " (known, see notes)" } else { "" }
        );
        if !ok && !known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
