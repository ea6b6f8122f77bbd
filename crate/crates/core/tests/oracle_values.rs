mod oracle;

use brjuno_core::arith::rat;
use brjuno_core::brjuno::{eval_eventually_ones, BrjunoSpec, SignSpec};
use brjuno_core::cf::DigitWord;
use brjuno_core::map::MapModel;
use brjuno_core::weight::{WeightKind, WeightModel};
use brjuno_core::{Dyadic, Interval};
use num_bigint::BigInt;
use oracle::{brute_phi, Weight};

/// `v` lies in `iv` widened by `2^tol`.
fn within(iv: &Interval, v: &BigInt, tol: i64) {
    let lo = oracle::log2_distance(v, iv.lo().mantissa(), iv.lo().exponent());
    let hi = oracle::log2_distance(v, iv.hi().mantissa(), iv.hi().exponent());
    let w = Interval::new(iv.lo() - &Dyadic::pow2(tol), iv.hi() + &Dyadic::pow2(tol));
    let shift = oracle::BITS as i64;
    let as_dyadic = Dyadic::new(v.clone(), -shift);
    assert!(w.contains(&as_dyadic), "oracle outside enclosure (log2 distances {lo}, {hi})");
}

#[test]
fn oracle_self_checks() {
    // ln e = 1 and φ^2 + φ = 1 inside the oracle itself
    let l = oracle::ln(&oracle::e());
    assert!((l - oracle::one()).bits() < 16);
    let g = oracle::golden();
    let r = oracle::mul(&g, &g) + &g - oracle::one();
    assert!(r.bits() < 16);
}

#[test]
fn golden_mean_closed_forms() {
    let g = oracle::golden();
    let lg = -oracle::ln(&g);
    let b = oracle::div(&lg, &(oracle::one() - &g));
    let w1 = oracle::div(&oracle::mul(&lg, &lg), &(oracle::one() - &g));
    let w2 = oracle::div(&lg, &(oracle::one() + &g));
    let empty = DigitWord::empty();
    within(&eval_eventually_ones(&BrjunoSpec::brjuno(), &empty, 60).unwrap(), &b, -58);
    within(&eval_eventually_ones(&BrjunoSpec::wilton1(), &empty, 60).unwrap(), &w1, -58);
    within(&eval_eventually_ones(&BrjunoSpec::wilton2(), &empty, 60).unwrap(), &w2, -58);
    // the closed forms agree with the term-by-term sums
    assert!((&b - brute_phi(&[], Weight::LogPow(1), 1, false)).bits() < 40);
    assert!((&w2 - brute_phi(&[], Weight::LogPow(1), 1, true)).bits() < 40);
}

#[test]
fn heads_against_brute_force() {
    let inverse2 = BrjunoSpec::new(
        MapModel::gauss(),
        WeightModel::new(WeightKind::Inverse, &MapModel::gauss()).unwrap(),
        rat(2, 1),
        SignSpec::Constant,
    )
    .unwrap();
    let heads: [&[u64]; 5] = [&[2], &[1, 7], &[3, 1, 4, 1, 5], &[50, 2, 9], &[1, 1, 1, 2]];
    for h in heads {
        let w = DigitWord::new(h.to_vec()).unwrap();
        within(&eval_eventually_ones(&BrjunoSpec::brjuno(), &w, 50).unwrap(), &brute_phi(h, Weight::LogPow(1), 1, false), -48);
        within(&eval_eventually_ones(&BrjunoSpec::wilton1(), &w, 50).unwrap(), &brute_phi(h, Weight::LogPow(2), 1, false), -48);
        within(&eval_eventually_ones(&BrjunoSpec::wilton2(), &w, 50).unwrap(), &brute_phi(h, Weight::LogPow(1), 1, true), -48);
        within(&eval_eventually_ones(&inverse2, &w, 50).unwrap(), &brute_phi(h, Weight::Inverse, 2, false), -48);
    }
}

#[test]
fn log_against_oracle() {
    for (p, q) in [(1, 3), (7, 2), (1000, 1), (1, 1000), (355, 113)] {
        let x = Interval::from_rational(&rat(p, q), 120);
        let l = x.log(100).unwrap();
        within(&l, &oracle::ln(&oracle::frac(p, q)), -98);
    }
}
