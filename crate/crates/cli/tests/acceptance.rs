//! Acceptance suite: one line per criterion, exact arithmetic throughout.
//!
//! Runs as a plain binary (`harness = false`) so the lines always show; exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigcomp::harness::{ex51_certificate, named_instance, run_ratio_experiment, Instance};
use sigcomp::rational::{ratio, to_text};
use sigcomp::{
    analyze_monopoly, best_response_dynamics, buyer_utility, compute_opt, enumerate_partitions,
    enumerate_subgame_nash, is_refinement, seller_utility, social_welfare, verify_spe_certificate,
    Budget, BuyerAssignment, GoodSet, Partition, Rational, SellerProfile, SpeSearch, Status,
    ValuationMatrix,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn ensure_eq(what: &str, got: Rational, want: Rational) -> Result<(), String> {
    ensure(got == want, || format!("{what}: got {}, want {}", to_text(&got), to_text(&want)))
}

fn budget() -> Budget {
    Budget::default()
}

fn three_buyers() -> ValuationMatrix {
    ValuationMatrix::from_rows(&[[1, 0, 1], [1, 1, 0], [0, 1, 1]]).unwrap()
}

fn monopoly_profile(p: &Partition) -> SellerProfile {
    SellerProfile::uniform(1, p.clone())
}

fn all_matrices(buyers: usize, goods: usize) -> impl Iterator<Item = ValuationMatrix> {
    (0u64..1 << (buyers * goods)).map(move |bits| {
        let rows: Vec<GoodSet> = (0..buyers)
            .map(|b| GoodSet::from_bits(bits >> (b * goods) & ((1 << goods) - 1)))
            .collect();
        ValuationMatrix::from_row_sets(goods, &rows).unwrap()
    })
}

fn all_profiles(goods: usize, sellers: usize) -> Vec<SellerProfile> {
    let universe: Vec<Partition> = enumerate_partitions(goods).unwrap().collect();
    let count = universe.len().pow(sellers as u32);
    (0..count)
        .map(|mut code| {
            let mut parts = vec![Partition::trivial(goods); sellers];
            for slot in parts.iter_mut().rev() {
                *slot = universe[code % universe.len()].clone();
                code /= universe.len();
            }
            SellerProfile::new(parts).unwrap()
        })
        .collect()
}

fn decode(mut code: usize, buyers: usize, sellers: usize) -> Vec<usize> {
    let mut choice = vec![0; buyers];
    for slot in choice.iter_mut().rev() {
        *slot = code % sellers;
        code /= sellers;
    }
    choice
}

fn random_profile(rng: &mut ChaCha8Rng, goods: usize, sellers: usize) -> SellerProfile {
    SellerProfile::new(
        (0..sellers)
            .map(|_| {
                let labels: Vec<usize> = (0..goods).map(|_| rng.gen_range(0..goods)).collect();
                Partition::from_labels(&labels).unwrap()
            })
            .collect(),
    )
    .unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, buyers: usize, goods: usize) -> ValuationMatrix {
    ValuationMatrix::from_fn(buyers, goods, |_, _| rng.gen_bool(0.5)).unwrap()
}

fn pooled_and_full_disclosure() -> Outcome {
    let v = three_buyers();
    let a = BuyerAssignment::all_to(3, 0);
    let pooled = monopoly_profile(&Partition::parse("0,1|2", 3).unwrap());
    ensure_eq("pooled u_b", buyer_utility(&v, &pooled, &a, 1).unwrap(), ratio(1, 3))?;
    ensure_eq("pooled u_s", seller_utility(&v, &pooled, &a, 0).unwrap(), ratio(2, 3))?;
    ensure_eq("pooled SW", social_welfare(&v, &pooled, &a).unwrap(), ratio(1, 1))?;
    let finest = monopoly_profile(&Partition::finest(3));
    ensure_eq("finest u_b", buyer_utility(&v, &finest, &a, 1).unwrap(), ratio(0, 1))?;
    ensure_eq("finest u_s", seller_utility(&v, &finest, &a, 0).unwrap(), ratio(1, 1))?;
    Ok("pooled u_b=1/3 u_s=2/3 SW=1/1; finest u_b=0/1 u_s=1/1".into())
}

fn third_of_opt_is_tight() -> Outcome {
    let v = ValuationMatrix::identity(3).unwrap();
    let a = analyze_monopoly(&v, &budget()).map_err(|e| e.to_string())?;
    ensure_eq("worst SW among maximizers", a.worst_welfare, ratio(1, 3))?;
    ensure_eq("opt", a.opt, ratio(1, 1))?;
    ensure_eq("worst SW vs opt/3", a.worst_welfare, a.opt / 3)?;
    let verdicts = sigcomp::check_monopoly_bounds(&a, &v.demand_profile());
    let third = &verdicts[0];
    ensure(third.status == Status::Pass && third.lhs == third.rhs, || {
        format!("verdict {} not tight: {:?}", third.name, third)
    })?;
    Ok(format!("identity G=3: worst SW 1/3 = opt/3, witness {}", a.worst_witness))
}

fn half_of_opt_is_tight() -> Outcome {
    let v = ValuationMatrix::identity(2).unwrap();
    let a = analyze_monopoly(&v, &budget()).map_err(|e| e.to_string())?;
    ensure_eq("best SW among maximizers", a.best_welfare, ratio(1, 2))?;
    ensure_eq("best SW vs opt/2", a.best_welfare, a.opt / 2)?;
    Ok("identity G=2: best SW 1/2 = opt/2".into())
}

fn competition_gain_is_tight() -> Outcome {
    let mut seen = Vec::new();
    for s in 2..=4usize {
        let x = named_instance(&format!("thm63({s})")).map_err(|e| e.to_string())?;
        let v = &x.valuation;
        let target = ratio(s as i64 + 1, 2 * s as i64);
        let search = SpeSearch::run(v, s, &budget()).map_err(|e| e.to_string())?;
        let record = search
            .representatives()
            .into_iter()
            .find(|r| r.welfare == target)
            .ok_or_else(|| format!("S={s}: no pure SPE with SW {}", to_text(&target)))?;
        let verdict = verify_spe_certificate(v, &search.certificate(record.profile_index))
            .map_err(|e| e.to_string())?;
        ensure(verdict.passed(), || format!("S={s}: certificate rejected: {:?}", verdict.violations))?;

        let monopoly = analyze_monopoly(v, &budget()).map_err(|e| e.to_string())?;
        let trivial = Partition::trivial(2);
        ensure(monopoly.revenue_maximizers.contains(&trivial), || {
            format!("S={s}: trivial partition is not revenue-maximizing")
        })?;
        let all = BuyerAssignment::all_to(v.num_buyers(), 0);
        let trivial_sw = social_welfare(v, &monopoly_profile(&trivial), &all).unwrap();
        ensure_eq(&format!("S={s} ratio"), target / trivial_sw, ratio(s as i64 + 1, s as i64))?;
        seen.push(format!("S={s} SW={} ratio={}", to_text(&target), to_text(&(target / trivial_sw))));
    }
    Ok(seen.join("; "))
}

fn competition_loss_is_tight() -> Outcome {
    let mut seen = Vec::new();
    for g in 2..=4usize {
        let x = named_instance(&format!("ex51({g})")).map_err(|e| e.to_string())?;
        let v = &x.valuation;
        let cert = ex51_certificate(g, x.sellers).map_err(|e| e.to_string())?;
        let verdict = verify_spe_certificate(v, &cert).map_err(|e| e.to_string())?;
        ensure(verdict.passed(), || format!("G={g}: certificate rejected: {:?}", verdict.violations))?;
        let sw = social_welfare(v, &cert.on_path, cert.on_path_assignment().unwrap()).unwrap();
        let unit = ratio(1, g as i64);
        ensure_eq(&format!("G={g} SW"), sw, unit)?;
        ensure_eq(&format!("G={g} opt"), compute_opt(v, x.sellers, &budget()).unwrap(), ratio(1, 1))?;
        let monopoly = analyze_monopoly(v, &budget()).map_err(|e| e.to_string())?;
        ensure_eq(&format!("G={g} ratio"), sw / monopoly.best_welfare, unit)?;
        let report = run_ratio_experiment(&x, &budget());
        ensure(report.ratio_min == Some(unit), || {
            format!("G={g}: search ratio_min {:?}", report.ratio_min.map(|r| to_text(&r)))
        })?;
        seen.push(format!("G={g} SW={} ratio={}", to_text(&sw), to_text(&unit)));
    }
    Ok(seen.join("; "))
}

fn efficient_competition_is_tight() -> Outcome {
    let mut seen = Vec::new();
    for s in 2..=3usize {
        let x = named_instance(&format!("thm65({s})")).map_err(|e| e.to_string())?;
        ensure(x.buyers() == s, || "all-ones instance should have B = S".into())?;
        let report = run_ratio_experiment(&x, &budget());
        let best = report.monopoly.as_ref().ok_or("monopoly skipped")?.best_welfare;
        let spe = report.spe_welfare_max().ok_or("no pure SPE")?;
        let bound = ratio(s.min(x.buyers()) as i64, s as i64);
        ensure_eq(&format!("S={s} ratio"), spe / best, ratio(1, 1))?;
        ensure_eq(&format!("S={s} ratio vs min(S,B)/S"), spe / best, bound)?;
        ensure(!report.has_failure(), || format!("S={s}: a verdict failed"))?;
        seen.push(format!("S=B={s} ratio={}", to_text(&(spe / best))));
    }
    Ok(seen.join("; "))
}

fn identity_holds(v: &ValuationMatrix, p: &SellerProfile, a: &BuyerAssignment) -> Result<(), String> {
    let sellers: Rational = (0..p.num_sellers()).map(|s| seller_utility(v, p, a, s).unwrap()).sum();
    let buyers: Rational = (0..v.num_buyers()).map(|b| buyer_utility(v, p, a, b).unwrap()).sum();
    let scaled = social_welfare(v, p, a).unwrap() * Rational::from_integer(p.num_sellers() as i64);
    ensure(scaled == sellers + buyers, || format!("{v:?} {p} {a}: S*SW != sum of utilities"))
}

fn accounting_identity() -> Outcome {
    let mut exhaustive = 0u64;
    for goods in 1..=3 {
        for buyers in 1..=3 {
            for sellers in 1..=2 {
                let profiles = all_profiles(goods, sellers);
                let count = sellers.pow(buyers as u32);
                for v in all_matrices(buyers, goods) {
                    for p in &profiles {
                        for code in 0..count {
                            let a = BuyerAssignment::new(decode(code, buyers, sellers), sellers).unwrap();
                            identity_holds(&v, p, &a)?;
                            exhaustive += 1;
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let (b, g, s) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=3));
        let v = random_matrix(&mut rng, b, g);
        let p = random_profile(&mut rng, g, s);
        let a = BuyerAssignment::new((0..b).map(|_| rng.gen_range(0..s)).collect(), s).unwrap();
        identity_holds(&v, &p, &a)?;
    }
    Ok(format!("{exhaustive} exhaustive cases + 1000 random"))
}

/// Nash check by trying every alternative seller for every buyer.
fn exhaustive_nash(v: &ValuationMatrix, p: &SellerProfile, a: &BuyerAssignment) -> bool {
    (0..v.num_buyers()).all(|b| {
        let current = buyer_utility(v, p, a, b).unwrap();
        (0..p.num_sellers()).all(|s| buyer_utility(v, p, &a.with_move(b, s), b).unwrap() <= current)
    })
}

fn potential_and_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut steps = 0usize;
    for _ in 0..10_000 {
        let (b, g, s) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=3));
        let v = random_matrix(&mut rng, b, g);
        let p = random_profile(&mut rng, g, s);
        let a = BuyerAssignment::new((0..b).map(|_| rng.gen_range(0..s)).collect(), s).unwrap();
        let buyer = rng.gen_range(0..b);
        let moved = a.with_move(buyer, rng.gen_range(0..s));
        let du = buyer_utility(&v, &p, &moved, buyer).unwrap() - buyer_utility(&v, &p, &a, buyer).unwrap();
        let dsw = social_welfare(&v, &p, &moved).unwrap() - social_welfare(&v, &p, &a).unwrap();
        ensure(du == dsw * Rational::from_integer(s as i64), || {
            format!("{v:?} {p} {a} buyer {buyer}: du != S*dSW")
        })?;

        let result = best_response_dynamics(&v, &p, &a).map_err(|e| e.to_string())?;
        let cap = (s as u128).pow(b as u32);
        ensure((result.steps as u128) < cap, || format!("{v:?} {p}: step cap reached"))?;
        ensure(result.is_nash && exhaustive_nash(&v, &p, &result.assignment), || {
            format!("{v:?} {p}: dynamics stopped outside equilibrium")
        })?;
        steps += result.steps;
    }
    Ok(format!("10000 deviations exact; 10000 dynamics runs converged ({steps} moves)"))
}

fn refinement_pairs(goods: usize) -> Vec<(Partition, Partition)> {
    let all: Vec<Partition> = enumerate_partitions(goods).unwrap().collect();
    let mut out = Vec::new();
    for fine in &all {
        for coarse in &all {
            if fine != coarse && is_refinement(fine, coarse).unwrap() {
                out.push((fine.clone(), coarse.clone()));
            }
        }
    }
    out
}

fn monotonicity() -> Outcome {
    let mut single = 0u64;
    for goods in 1..=4 {
        let pairs = refinement_pairs(goods);
        for buyers in 1..=4 {
            let a = BuyerAssignment::all_to(buyers, 0);
            for v in all_matrices(buyers, goods) {
                for (fine, coarse) in &pairs {
                    let sw = |p: &Partition| social_welfare(&v, &monopoly_profile(p), &a).unwrap();
                    ensure(sw(fine) >= sw(coarse), || format!("{v:?}: SW drops from {coarse} to {fine}"))?;
                    single += 1;
                }
            }
        }
    }
    let mut pairs_checked = 0u64;
    let a = BuyerAssignment::all_to(2, 0);
    for goods in 1..=4 {
        let pairs = refinement_pairs(goods);
        for v in all_matrices(2, goods) {
            for (fine, coarse) in &pairs {
                let (f, c) = (monopoly_profile(fine), monopoly_profile(coarse));
                for b in 0..2 {
                    ensure(
                        buyer_utility(&v, &f, &a, b).unwrap() >= buyer_utility(&v, &c, &a, b).unwrap(),
                        || format!("{v:?}: buyer {b} loses from {coarse} to {fine}"),
                    )?;
                }
                ensure(
                    seller_utility(&v, &f, &a, 0).unwrap() <= seller_utility(&v, &c, &a, 0).unwrap(),
                    || format!("{v:?}: revenue rises from {coarse} to {fine}"),
                )?;
                pairs_checked += 1;
            }
        }
    }
    let v = three_buyers();
    let a = BuyerAssignment::all_to(3, 0);
    let pooled = monopoly_profile(&Partition::parse("0,1|2", 3).unwrap());
    let finest = monopoly_profile(&Partition::finest(3));
    let (before, after) = (
        seller_utility(&v, &pooled, &a, 0).unwrap(),
        seller_utility(&v, &finest, &a, 0).unwrap(),
    );
    ensure(before == ratio(2, 3) && after == ratio(1, 1), || {
        format!("three-buyer counterexample: {} -> {}", to_text(&before), to_text(&after))
    })?;
    Ok(format!(
        "{single} single-seller and {pairs_checked} two-buyer refinement cases; three buyers: revenue 2/3 -> 1/1"
    ))
}

fn bound_sweep() -> Outcome {
    let output = Command::new(env!("CARGO_BIN_EXE_sigcomp"))
        .arg("sweep")
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&output.stdout);
    let first = text.lines().next().unwrap_or("").to_string();
    ensure(output.status.code() == Some(0), || {
        format!("exit code {:?}: {first}", output.status.code())
    })?;
    ensure(first.contains("failures 0"), || first.clone())?;
    ensure(!text.lines().any(|l| l.starts_with("FAIL")), || "failure lines present".into())?;
    Ok(first)
}

/// `u_b` numerators straight from the rows, labels and choices (common denominator `G`).
fn raw_utilities(rows: &[Vec<u8>], labels: &[Vec<u8>], choice: &[usize]) -> Vec<i64> {
    let goods = rows[0].len();
    (0..rows.len())
        .map(|b| {
            let s = choice[b];
            let blocks = labels[s].iter().map(|&l| l as usize + 1).max().unwrap_or(0);
            let mut total = 0i64;
            for block in 0..blocks {
                let value = |buyer: usize| -> i64 {
                    (0..goods)
                        .filter(|&g| labels[s][g] as usize == block)
                        .map(|g| rows[buyer][g] as i64)
                        .sum()
                };
                let mut bids: Vec<i64> = (0..rows.len()).filter(|&c| choice[c] == s).map(value).collect();
                bids.sort_unstable_by(|x, y| y.cmp(x));
                let second = bids.get(1).copied().unwrap_or(0);
                total += (value(b) - second).max(0);
            }
            total
        })
        .collect()
}

/// Nash set from the full deviation matrix: entry `(a, b, t)` is `b`'s gain from moving to `t`.
fn oracle_nash_set(v: &ValuationMatrix, p: &SellerProfile) -> Vec<Vec<usize>> {
    let rows = v.to_rows();
    let labels: Vec<Vec<u8>> = p.partitions().iter().map(|q| q.labels().to_vec()).collect();
    let (buyers, sellers) = (v.num_buyers(), p.num_sellers());
    let mut out = Vec::new();
    for code in 0..sellers.pow(buyers as u32) {
        let choice = decode(code, buyers, sellers);
        let base = raw_utilities(&rows, &labels, &choice);
        let mut stable = true;
        'buyers: for b in 0..buyers {
            for t in 0..sellers {
                let mut moved = choice.clone();
                moved[b] = t;
                if raw_utilities(&rows, &labels, &moved)[b] - base[b] > 0 {
                    stable = false;
                    break 'buyers;
                }
            }
        }
        if stable {
            out.push(choice);
        }
    }
    out
}

fn oracle_case(v: &ValuationMatrix, p: &SellerProfile, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let oracle = oracle_nash_set(v, p);
    let listed: Vec<Vec<usize>> = enumerate_subgame_nash(v, p, &budget())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|a| a.choices().to_vec())
        .collect();
    ensure(listed == oracle, || format!("{v:?} {p}: enumerated Nash set differs from the oracle"))?;
    let starts = [
        BuyerAssignment::all_to(v.num_buyers(), 0),
        BuyerAssignment::new(
            (0..v.num_buyers()).map(|_| rng.gen_range(0..p.num_sellers())).collect(),
            p.num_sellers(),
        )
        .unwrap(),
    ];
    for start in starts {
        let result = best_response_dynamics(v, p, &start).map_err(|e| e.to_string())?;
        let in_oracle = oracle.binary_search(&result.assignment.choices().to_vec()).is_ok();
        ensure(result.is_nash == in_oracle && in_oracle, || {
            format!("{v:?} {p}: dynamics end {} disagrees with the oracle", result.assignment)
        })?;
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = 0u64;
    for goods in 1..=3usize {
        for buyers in 1..=8 / goods {
            for sellers in 2..=3usize {
                if sellers.pow(buyers as u32) > 4096 {
                    continue;
                }
                let profiles = all_profiles(goods, sellers);
                for v in all_matrices(buyers, goods) {
                    for p in &profiles {
                        oracle_case(&v, p, &mut rng)?;
                        cases += 1;
                    }
                }
            }
        }
    }
    let mut named: Vec<Instance> = ["ex41", "thm43-identity", "thm44-2x2", "thm63(2)", "thm63(3)", "thm63(4)", "ex51(2)", "ex51(3)", "thm65(2)", "thm65(3)"]
        .iter()
        .map(|n| named_instance(n).unwrap())
        .collect();
    named.retain(|x| (x.sellers as u128).pow(x.buyers() as u32) <= 4096);
    for x in &named {
        for p in all_profiles(x.goods(), x.sellers) {
            oracle_case(&x.valuation, &p, &mut rng)?;
            cases += 1;
        }
    }
    let mut random = 0;
    while random < 200 {
        let (b, g, s) = (rng.gen_range(1..=8), rng.gen_range(1..=5), rng.gen_range(2..=4));
        if (s as u128).pow(b as u32) > 4096 {
            continue;
        }
        let v = random_matrix(&mut rng, b, g);
        for _ in 0..10 {
            let p = random_profile(&mut rng, g, s);
            oracle_case(&v, &p, &mut rng)?;
            cases += 1;
        }
        random += 1;
    }
    Ok(format!("{cases} subgames agree ({} named instances, 200 random)", named.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("three-buyer disclosure values", pooled_and_full_disclosure),
        ("monopoly third-of-optimum tightness", third_of_opt_is_tight),
        ("monopoly half-of-optimum tightness", half_of_opt_is_tight),
        ("competition gain 1 + 1/S", competition_gain_is_tight),
        ("competition loss 1/G with certificate", competition_loss_is_tight),
        ("efficient competition ratio 1", efficient_competition_is_tight),
        ("accounting identity", accounting_identity),
        ("scaled potential and dynamics", potential_and_dynamics),
        ("refinement monotonicity", monotonicity),
        ("bound sweep", bound_sweep),
        ("deviation-matrix oracle", oracle_equivalence),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, check)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let outcome = std::panic::catch_unwind(check)
                        .unwrap_or_else(|_| Err("panicked".to_string()));
                    (outcome, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (outcome, seconds))) in criteria.iter().zip(results).enumerate() {
        let (status, detail) = match outcome {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed += 1;
                ("FAIL", detail)
            }
        };
        println!("criterion {:>2} {status} {name} ({seconds:.1}s): {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
