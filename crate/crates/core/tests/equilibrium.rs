mod common;

use proptest::prelude::*;
use sigcomp::{
    best_response_dynamics, compute_opt, enumerate_subgame_nash, find_pure_spe,
    is_nash_assignment, select_buyer_equilibrium, social_welfare, verify_spe_certificate, Budget,
    Rational, SelectionRule, SpeCertificate, SpeSearch, ValuationMatrix,
};

fn budget() -> Budget {
    Budget::default()
}

/// Demand-based cap on the optimum, valid for `S >= 2`.
fn welfare_cap(v: &ValuationMatrix, sellers: usize) -> Rational {
    let dp = v.demand_profile();
    Rational::new(
        (dp.c1 + sellers.min(v.num_buyers()) * dp.p2) as i64,
        (sellers * v.num_goods()) as i64,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dynamics_end_in_equilibrium((v, p, start) in common::game(6, 4, 3)) {
        let result = best_response_dynamics(&v, &p, &start).unwrap();
        prop_assert!(result.is_nash);
        prop_assert!(is_nash_assignment(&v, &p, &result.assignment).unwrap());
        prop_assert!((result.steps as u128) < (p.num_sellers() as u128).pow(v.num_buyers() as u32));
        let sw = social_welfare(&v, &p, &result.assignment).unwrap();
        prop_assert_eq!(result.potential, sw * Rational::from_integer(p.num_sellers() as i64));
    }

    #[test]
    fn enumeration_is_exactly_the_nash_set((v, p, _) in common::game(5, 4, 3)) {
        let listed = enumerate_subgame_nash(&v, &p, &budget()).unwrap();
        prop_assert!(!listed.is_empty());
        let brute: Vec<_> = common::all_assignments(v.num_buyers(), p.num_sellers())
            .into_iter()
            .filter(|a| is_nash_assignment(&v, &p, a).unwrap())
            .collect();
        prop_assert_eq!(&listed, &brute);

        let chosen = select_buyer_equilibrium(&v, &p, SelectionRule::PotentialMax, &budget()).unwrap();
        let best = listed.iter().map(|a| social_welfare(&v, &p, a).unwrap()).max().unwrap();
        prop_assert_eq!(social_welfare(&v, &p, &chosen).unwrap(), best);
        let first = listed.iter().find(|a| social_welfare(&v, &p, a).unwrap() == best).unwrap();
        prop_assert_eq!(&chosen, first);
    }
}

#[test]
fn every_subgame_has_an_equilibrium() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let buyers = rand::Rng::gen_range(&mut rng, 1..=5);
        let goods = rand::Rng::gen_range(&mut rng, 1..=3);
        let sellers = rand::Rng::gen_range(&mut rng, 1..=3);
        let v = common::random_matrix(&mut rng, buyers, goods);
        for p in common::all_profiles(goods, sellers.min(2)) {
            assert!(!enumerate_subgame_nash(&v, &p, &budget()).unwrap().is_empty());
        }
    }
}

#[test]
fn found_equilibria_verify_and_round_trip() {
    let mut rng = common::rng(12);
    let mut checked = 0;
    for i in 0..200 {
        let buyers = rand::Rng::gen_range(&mut rng, 1..=4);
        let goods = rand::Rng::gen_range(&mut rng, 1..=3);
        let sellers = 1 + i % 3;
        let v = common::random_matrix(&mut rng, buyers, goods);
        for spe in find_pure_spe(&v, sellers, &budget()).unwrap() {
            let cert = spe.certificate();
            assert!(verify_spe_certificate(&v, &cert).unwrap().passed(), "{v:?} {}", spe.profile);
            let (back, hash) = SpeCertificate::from_json(&cert.to_json("abc"), goods).unwrap();
            assert_eq!(back, cert);
            assert_eq!(hash, "abc");
            let on_path = cert.on_path_assignment().unwrap();
            assert_eq!(social_welfare(&v, &spe.profile, on_path).unwrap(), spe.welfare);
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn search_counts_agree_with_the_listing() {
    let mut rng = common::rng(13);
    for _ in 0..50 {
        let v = common::random_matrix(&mut rng, 3, 3);
        let search = SpeSearch::run(&v, 2, &budget()).unwrap();
        let listed = search.equilibria();
        assert_eq!(search.equilibrium_count(), listed.len());
        let range = search.welfare_range();
        assert_eq!(range.map(|r| r.0), listed.iter().map(|r| r.welfare).min());
        assert_eq!(range.map(|r| r.1), listed.iter().map(|r| r.welfare).max());
        let reps = search.representatives();
        assert!(reps.iter().all(|r| listed.contains(r)));
        assert_eq!(reps.is_empty(), listed.is_empty());
    }
}

#[test]
fn optimum_dominates_every_outcome() {
    for (buyers, goods) in [(1, 3), (2, 2), (2, 3), (3, 2)] {
        for sellers in 1..=2 {
            let profiles = common::all_profiles(goods, sellers);
            let assignments = common::all_assignments(buyers, sellers);
            for v in common::all_matrices(buyers, goods) {
                let opt = compute_opt(&v, sellers, &budget()).unwrap();
                let mut best = Rational::from_integer(0);
                for p in &profiles {
                    for a in &assignments {
                        best = best.max(social_welfare(&v, p, a).unwrap());
                    }
                }
                assert_eq!(opt, best, "{v:?} S={sellers}");
                if sellers >= 2 {
                    assert!(opt <= welfare_cap(&v, sellers));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn optimum_respects_the_demand_cap(v in common::matrix(8, 6), sellers in 2usize..=3) {
        let opt = compute_opt(&v, sellers, &budget()).unwrap();
        prop_assert!(opt <= welfare_cap(&v, sellers));
        let finest = sigcomp::SellerProfile::uniform(sellers, sigcomp::Partition::finest(v.num_goods()));
        let brd = best_response_dynamics(&v, &finest, &sigcomp::BuyerAssignment::all_to(v.num_buyers(), 0)).unwrap();
        prop_assert!(social_welfare(&v, &finest, &brd.assignment).unwrap() <= opt);
    }
}
