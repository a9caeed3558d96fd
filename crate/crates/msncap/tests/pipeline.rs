//! Cross-module flows through the public library API.

use msncap::constructions::{four_slope_optimal, grid, max_capacity_gmsn, min_capacity_gmsn, three_slope_optimal};
use msncap::formulas::{max3, max4};
use msncap::geometry::{cmsn_from_arrangement, sample_gmsn, sample_rgmsn, shear};
use msncap::montecarlo::estimate_rgmsn_capacity;
use msncap::network::{capacity, deliveries};
use msncap::rational::rat;
use msncap::realize::{realize_rgmsn, witness_regenerates};
use msncap::wiring::{rcmsn_from_wiring, wiring_from_rcmsn};
use msncap::{Cmsn, Kind, TiePolicy};

#[test]
fn constructions_meet_their_closed_forms() {
    for n in 4..=12 {
        let c3 = three_slope_optimal(n).unwrap().cmsn().unwrap();
        assert_eq!(capacity(&c3).unwrap(), max3(n), "n = {n}");
    }
    for n in 5..=12 {
        let c4 = four_slope_optimal(n).unwrap().cmsn().unwrap();
        assert_eq!(capacity(&c4).unwrap(), max4(n), "n = {n}");
    }
}

#[test]
fn extremal_gmsn_bracket_random_samples() {
    for n in 3..=9 {
        let lo = capacity(&min_capacity_gmsn(n).unwrap().cmsn().unwrap()).unwrap();
        let hi = capacity(&max_capacity_gmsn(n).unwrap().cmsn().unwrap()).unwrap();
        for seed in 0..20 {
            let c = cmsn_from_arrangement(&sample_gmsn(n, seed).unwrap(), TiePolicy::Reject).unwrap();
            let cap = capacity(&c).unwrap();
            assert!(lo <= cap && cap <= hi, "n = {n}, seed = {seed}");
        }
    }
}

#[test]
fn small_grid_capacity() {
    // Two parallel classes of two lines each: every event delivers to three sensors.
    let c = grid(2, 2).unwrap().cmsn().unwrap();
    let r = deliveries(&c).unwrap();
    assert_eq!(r.deliveries.len(), 4);
    assert_eq!(capacity(&c).unwrap(), rat(r.total as i64, 16));
}

#[test]
fn wiring_round_trip_on_sampled_networks() {
    for seed in 0..30 {
        let c = cmsn_from_arrangement(&sample_gmsn(7, seed).unwrap(), TiePolicy::Reject).unwrap();
        let w = wiring_from_rcmsn(&c).unwrap();
        assert_eq!(rcmsn_from_wiring(&w).unwrap().events(), c.events());
        assert_eq!(rcmsn_from_wiring(&w.mirror()).unwrap().events(), c.events());
    }
}

#[test]
fn shear_preserves_network() {
    for seed in 0..10 {
        let arr = sample_rgmsn(8, 3, seed).unwrap();
        let before = cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap();
        let after = cmsn_from_arrangement(&shear(&arr, &rat(1, 1000)).unwrap(), TiePolicy::Reject).unwrap();
        assert_eq!(before.events(), after.events());
    }
}

#[test]
fn sampled_few_slope_networks_are_realized() {
    for s in 2..=3 {
        for seed in 0..15 {
            let c = cmsn_from_arrangement(&sample_rgmsn(6, s, seed).unwrap(), TiePolicy::Reject).unwrap();
            let r = realize_rgmsn(&c, s).unwrap();
            assert!(r.is_realizable(), "s = {s}, seed = {seed}: {}", r.certificate_note);
            assert!(witness_regenerates(&c, &r));
        }
    }
}

#[test]
fn three_mutually_crossing_lines_need_three_slopes() {
    let c = Cmsn::from_pairs(3, &[(1, 2), (1, 3), (2, 3)], Kind::Cmsn).unwrap();
    assert!(!realize_rgmsn(&c, 2).unwrap().is_realizable());
}

#[test]
fn estimates_depend_only_on_the_seed() {
    let a = estimate_rgmsn_capacity(15, 3, 8, 42).unwrap();
    let b = estimate_rgmsn_capacity(15, 3, 8, 42).unwrap();
    let c = estimate_rgmsn_capacity(15, 3, 8, 43).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
    assert!(a.mean > 0.0 && a.mean <= 1.0);
}
