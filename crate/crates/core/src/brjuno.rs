//! Certified evaluation of `Φ(x) = Σ_{i≥1} s(i) (η_0⋯η_{i-1})^ν u(η_i)`.
//!
//! Eventually periodic points are evaluated exactly (finite head plus a
//! geometric tail). Points given by a generator only get lower bounds, or
//! two-sided bounds when every digit is known to be at most `A`.

use alloc::format;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{rat, Dyadic, Interval, Rational};
use crate::cf::{fixed_point_phi, periodic_point, DigitStream, DigitWord, Tail};
use crate::map::MapModel;
use crate::weight::{WeightKind, WeightModel};
use crate::Error;

/// The sign sequence `s(i)`, `i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignSpec {
    Constant,
    /// `s(i) = (-1)^(i+1)`
    Alternating,
    /// `s(i) = pattern[(i - 1) mod len]`, entries ±1.
    Periodic(Vec<i8>),
}

impl SignSpec {
    pub fn sign(&self, i: u64) -> i8 {
        match self {
            SignSpec::Constant => 1,
            SignSpec::Alternating => {
                if i % 2 == 1 {
                    1
                } else {
                    -1
                }
            }
            SignSpec::Periodic(p) => p[((i - 1) % p.len() as u64) as usize],
        }
    }

    pub fn period(&self) -> usize {
        match self {
            SignSpec::Constant => 1,
            SignSpec::Alternating => 2,
            SignSpec::Periodic(p) => p.len(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            SignSpec::Constant => true,
            SignSpec::Alternating => false,
            SignSpec::Periodic(p) => p.iter().all(|&s| s == 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrjunoSpec {
    map: MapModel,
    weight: WeightModel,
    nu: Rational,
    sign: SignSpec,
}

impl BrjunoSpec {
    pub fn new(map: MapModel, weight: WeightModel, nu: Rational, sign: SignSpec) -> Result<BrjunoSpec, Error> {
        if !nu.is_positive() {
            return Err(Error::Domain(format!("nu = {nu} must be positive")));
        }
        if let SignSpec::Periodic(p) = &sign {
            if p.is_empty() || p.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::Domain("sign pattern must be a non-empty list of ±1".into()));
            }
        }
        if weight.s0() != map.s0() {
            return Err(Error::Domain("weight and map disagree on s0".into()));
        }
        Ok(BrjunoSpec { map, weight, nu, sign })
    }

    /// `ℬ`: Gauss map, `u = ln(1/x)`, `ν = 1`.
    pub fn brjuno() -> BrjunoSpec {
        Self::gauss_with(WeightKind::LogPow(1), SignSpec::Constant)
    }

    /// `𝒲₁`: squared logarithm.
    pub fn wilton1() -> BrjunoSpec {
        Self::gauss_with(WeightKind::LogPow(2), SignSpec::Constant)
    }

    /// `𝒲₂`: alternating signs.
    pub fn wilton2() -> BrjunoSpec {
        Self::gauss_with(WeightKind::LogPow(1), SignSpec::Alternating)
    }

    fn gauss_with(kind: WeightKind, sign: SignSpec) -> BrjunoSpec {
        let map = MapModel::gauss();
        let weight = WeightModel::new(kind, &map).expect("built-in weight");
        BrjunoSpec { map, weight, nu: rat(1, 1), sign }
    }

    pub fn map(&self) -> &MapModel {
        &self.map
    }

    pub fn weight(&self) -> &WeightModel {
        &self.weight
    }

    pub fn nu(&self) -> &Rational {
        &self.nu
    }

    pub fn sign(&self) -> &SignSpec {
        &self.sign
    }

    /// `x^ν` for `x > 0`.
    pub fn nu_pow(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        if self.nu.is_integer() {
            let n = self.nu.to_integer().to_u32().ok_or_else(|| Error::Domain("nu too large".into()))?;
            return Ok(x.pow_u32(n).round_out(prec));
        }
        x.pow(&self.nu, prec)
    }

    fn u(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        self.weight.eval(x, prec)
    }

    fn signed(&self, i: u64, t: Interval) -> Interval {
        if self.sign.sign(i) < 0 {
            t.neg()
        } else {
            t
        }
    }
}

fn guard_bits(terms: usize) -> i64 {
    2 * (usize::BITS - terms.max(1).leading_zeros()) as i64 + 8
}

fn mobius_bits(wp: i64) -> u64 {
    (wp + 8).max(16) as u64
}

/// Cycle points `c_j = [p_j, p_{j+1}, ..., p_{j-1}, ...]` of a period word.
fn cycle_points(map: &MapModel, period: &DigitWord, wp: i64) -> Result<Vec<Interval>, Error> {
    let p = period.digits();
    let c0 = if p.len() == 1 && p[0] == 1 { fixed_point_phi(map, wp + 8)? } else { periodic_point(map, period, wp + 8)? };
    let mut c = alloc::vec![c0.clone(); p.len()];
    let mut next = c0;
    for j in (1..p.len()).rev() {
        next = map.inverse_mobius(p[j])?.eval_interval(&next, mobius_bits(wp));
        c[j] = next.clone();
    }
    Ok(c)
}

/// `η_1, ..., η_n` of `[head, c_0, ...]` given an enclosure of `c_0`.
fn head_etas(map: &MapModel, head: &[u64], tail_point: &Interval, wp: i64) -> Result<Vec<Interval>, Error> {
    let mut etas = alloc::vec![Interval::zero(); head.len()];
    let mut y = tail_point.clone();
    for i in (0..head.len()).rev() {
        y = map.inverse_mobius(head[i])?.eval_interval(&y, mobius_bits(wp));
        etas[i] = y.clone();
    }
    Ok(etas)
}

/// Sum over indices `start, start+1, ...` of `s(i) pnu Q_{i-start} u(c_{(i-start) mod p})`
/// with `Q_r` the ν-th power of the product of the first `r` cycle points.
fn periodic_tail(spec: &BrjunoSpec, start: u64, pnu: &Interval, cycle: &[Interval], wp: i64) -> Result<Interval, Error> {
    let p = cycle.len();
    let block = p.lcm(&spec.sign.period());
    let us = cycle.iter().map(|c| spec.u(c, wp)).collect::<Result<Vec<_>, _>>()?;
    let cnu = cycle.iter().map(|c| spec.nu_pow(c, wp + 4)).collect::<Result<Vec<_>, _>>()?;
    let mut q = Interval::one();
    let mut b = Interval::zero();
    for r in 0..block {
        let t = q.mul(&us[r % p]);
        b = b.add(&spec.signed(start + r as u64, t)).round_out(wp + 4);
        q = q.mul(&cnu[r % p]).round_out(wp + 8);
    }
    let denom = Interval::one().sub(&q);
    if !denom.is_positive() {
        return Err(Error::Domain("tail ratio not below 1".into()));
    }
    Ok(pnu.mul(&b.div(&denom, wp + 4)?).round_out(wp + 2))
}

/// `Φ` of an eventually periodic point at working precision `wp`, with no
/// width guarantee.
pub(crate) fn phi_periodic_at(spec: &BrjunoSpec, x: &DigitStream, wp: i64) -> Result<Interval, Error> {
    let period = match x.tail() {
        Tail::AllOnes => DigitWord::ones(1),
        Tail::Periodic(w) => w.clone(),
        Tail::Generator { .. } => return Err(Error::Unsupported("closed form needs a periodic tail".into())),
    };
    let head = x.head().digits();
    let cycle = cycle_points(&spec.map, &period, wp)?;
    let etas = head_etas(&spec.map, head, &cycle[0], wp)?;
    let mut sum = Interval::zero();
    let mut pnu = Interval::one();
    for (j, eta) in etas.iter().enumerate() {
        let i = j as u64 + 1;
        let term = pnu.mul(&spec.u(eta, wp)?);
        sum = sum.add(&spec.signed(i, term)).round_out(wp + 4);
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    let tail = periodic_tail(spec, head.len() as u64 + 1, &pnu, &cycle, wp)?;
    Ok(sum.add(&tail))
}

/// Enclosure of width at most `2^-prec` of `Φ(x)` for eventually periodic `x`.
pub fn eval_periodic(spec: &BrjunoSpec, x: &DigitStream, prec: i64) -> Result<Interval, Error> {
    let target = Dyadic::pow2(-prec);
    let mut wp = prec + guard_bits(x.head().len());
    loop {
        let v = phi_periodic_at(spec, x, wp)?;
        if v.width() <= target {
            return Ok(v);
        }
        if wp > prec + 8192 {
            return Err(Error::SearchBudgetExceeded("evaluation precision".into()));
        }
        wp += 16 + (wp - prec);
    }
}

/// `Φ([head, 1, 1, ...])` with width at most `2^-prec`.
pub fn eval_eventually_ones(spec: &BrjunoSpec, head: &DigitWord, prec: i64) -> Result<Interval, Error> {
    eval_periodic(spec, &DigitStream::eventually_ones(head.clone()), prec)
}

/// `f(x, k)` together with the state needed to continue the sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSumState {
    pub k: u64,
    /// `(η_0⋯η_k)^ν`
    pub product: Interval,
    pub sum: Interval,
    pub prefix: DigitWord,
}

/// Backward sweep `E_i = G_{a_i}^{-1}(E_{i+1})` from `E = [s0, s1]`, giving
/// enclosures of `η_1, ..., η_n` valid for every continuation of `word`.
fn cylinder_etas(map: &MapModel, word: &[u64], wp: i64) -> Result<Vec<Interval>, Error> {
    head_etas(map, word, &map.domain_enclosure(wp + 8), wp)
}

/// The `k`-term partial sum. Eventually periodic streams use exact
/// `η_i`; generator streams enclose `η_i` by the cylinder of the digits
/// that could be pulled (at most `k + lookahead`).
pub fn partial_sum(spec: &BrjunoSpec, x: &DigitStream, k: u64, prec: i64) -> Result<PartialSumState, Error> {
    if k == 0 {
        return Err(Error::Domain("partial sums start at k = 1".into()));
    }
    let wp = prec + guard_bits(k as usize);
    let (prefix, etas) = if x.is_eventually_periodic() {
        let prefix = x.prefix(k as usize + 1)?;
        let rest = x.shift(k + 1);
        let tail_point = crate::cf::eval_point(&spec.map, &rest, wp + 8)?;
        let etas = head_etas(&spec.map, &prefix.digits()[..k as usize], &tail_point, wp)?;
        (prefix, etas)
    } else {
        let look = (wp + 8) as usize;
        let avail = x.available_prefix(k as usize + 1 + look)?;
        if avail.len() < k as usize + 1 {
            return Err(Error::InsufficientDigits { needed: k + 1, available: avail.len() as u64 });
        }
        let mut etas = cylinder_etas(&spec.map, avail.digits(), wp)?;
        etas.truncate(k as usize);
        (DigitWord::new(avail.digits()[..k as usize + 1].to_vec())?, etas)
    };
    let mut sum = Interval::zero();
    let mut pnu = Interval::one();
    for (j, eta) in etas.iter().enumerate() {
        let term = pnu.mul(&spec.u(eta, wp)?);
        sum = sum.add(&spec.signed(j as u64 + 1, term)).round_out(wp + 4);
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    Ok(PartialSumState { k, product: pnu, sum, prefix })
}

/// `Σ_{i>k} s(i) (η_0⋯η_{i-1})^ν u(η_i)` when every digit after position
/// `k` is 1: `product · Σ_r s(k+1+r) φ^{νr} u(φ)`.
pub fn ones_tail(spec: &BrjunoSpec, state: &PartialSumState, prec: i64) -> Result<Interval, Error> {
    let wp = prec + 8;
    let phi = fixed_point_phi(&spec.map, wp + 8)?;
    periodic_tail(spec, state.k + 1, &state.product, &[phi], wp)
}

/// Uniform bound `η_{k-1} η_k < ρ` for `k > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoBound {
    pub rho: Rational,
    pub a_star: Rational,
    pub b_star: Rational,
}

/// `ρ = s1` when `s1 < 1`; otherwise `ρ = max(a*, b*)` with `a*` just above
/// `φ` and `b* = G_1(a*)`, which is optimal since `a* = G_1(a*)` at `φ`.
pub fn rho_bound(map: &MapModel, prec: i64) -> Result<RhoBound, Error> {
    if map.s1() < &rat(1, 1) {
        return Ok(RhoBound { rho: map.s1().clone(), a_star: map.s1().clone(), b_star: map.s1().clone() });
    }
    let phi = fixed_point_phi(map, prec.max(8))?;
    let (l1, _) = map.branch_interval(1)?;
    let a = phi.hi().to_rational();
    rho_bound_with_a_star(map, if a > l1 { a } else { l1 })
}

/// `ρ` for a caller-chosen `a*` (requires `s1 = 1` and `a* ∈ [ℓ_1, 1)`).
pub fn rho_bound_with_a_star(map: &MapModel, a_star: Rational) -> Result<RhoBound, Error> {
    if map.s1() > &rat(1, 1) {
        return Err(Error::Unsupported("rho bound needs s1 <= 1".into()));
    }
    let (l1, r1) = map.branch_interval(1)?;
    if a_star < l1 || a_star >= r1 {
        return Err(Error::Domain(format!("a* = {a_star} outside [l_1, r_1)")));
    }
    let b_star = map.apply_first_branch_exact(&a_star)?;
    let rho = if a_star > b_star { a_star.clone() } else { b_star.clone() };
    if rho >= rat(1, 1) {
        return Err(Error::Domain("rho bound not below 1".into()));
    }
    Ok(RhoBound { rho, a_star, b_star })
}

/// Enclosure of `η_{k-1} η_k` over all points of the cylinder of `word`
/// (`2 <= k <= word.len()`).
///
/// With `η_{k-1} = h(η_k)` for `h = G_{a_{k-1}}^{-1}`, the product is
/// `f(y) = y h(y)`. When `h(y) = b/(c y + d)` this is again a Möbius map,
/// so its range is attained at the exact cylinder endpoints; otherwise the
/// interval product is used.
pub fn consecutive_product(map: &MapModel, word: &DigitWord, k: usize, prec: i64) -> Result<Interval, Error> {
    if k < 2 || k > word.len() {
        return Err(Error::Domain(format!("consecutive product index {k} outside 2..={}", word.len())));
    }
    let d = word.digits();
    let cyl = crate::cf::cylinder_enclosure(map, &DigitWord::new(d[k - 1..].to_vec())?, prec + 8)?;
    let h = map.inverse_mobius(d[k - 2])?;
    if h.a.is_zero() {
        let f = |y: &Rational| -> Rational { y * h.eval_rational(y).expect("pole-free branch") };
        let (p, q) = (f(&cyl.lo_exact), f(&cyl.hi_exact));
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        return Ok(Interval::new(Dyadic::from_rational_floor(&lo, prec), Dyadic::from_rational_ceil(&hi, prec)));
    }
    let y = cyl.enclosure;
    Ok(y.mul(&h.eval_interval(&y, mobius_bits(prec))).round_out(prec))
}

/// One element of the enclosure sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnclosureStep {
    /// Terms consumed.
    pub k: u64,
    pub lo: Dyadic,
    pub hi: Option<Dyadic>,
}

/// Options for [`eval_enclosure_sequence`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SequenceOptions {
    /// Every digit is at most `A`; unlocks upper bounds.
    pub digit_bound: Option<u64>,
    /// Stop once the lower bound exceeds this value.
    pub ceiling: Option<Dyadic>,
    /// Stop after this many terms.
    pub max_terms: Option<u64>,
}

/// `U_A · 2/(1 - ρ^ν)` with `U_A = sup u` on `[ℓ_A, s1]`: bounds the tail
/// after `k` terms by `P_k^ν` times this factor when every later digit is at most `A`.
fn digit_bound_tail_factor(spec: &BrjunoSpec, a: u64, wp: i64) -> Result<Interval, Error> {
    if a == 0 {
        return Err(Error::Domain("digit bound must be positive".into()));
    }
    let rho = rho_bound(&spec.map, wp)?;
    let (la, _) = spec.map.branch_interval(a)?;
    let range = Interval::new(
        Dyadic::from_rational_floor(&la, wp + 8),
        Dyadic::from_rational_ceil(spec.map.s1(), wp + 8),
    );
    let ua = spec.u(&range, wp)?;
    let rnu = spec.nu_pow(&Interval::from_rational(&rho.rho, wp + 8), wp + 8)?;
    let f = Interval::from_i64(2).div(&Interval::one().sub(&rnu), wp)?;
    Ok(Interval::new(Dyadic::zero(), ua.hi().clone()).mul(&f))
}

/// Iterator of certified bounds for `Φ(x)`: lower bounds never decrease,
/// upper bounds (when available) never increase.
pub struct EnclosureSequence<'a> {
    spec: &'a BrjunoSpec,
    x: DigitStream,
    opts: SequenceOptions,
    wp: i64,
    k: u64,
    pnu: Interval,
    sum: Interval,
    best_lo: Option<Dyadic>,
    best_hi: Option<Dyadic>,
    // P^ν-independent tail factor `U_A · 2/(1 - ρ^ν)`
    tail_factor: Option<Interval>,
    diverged: bool,
    done: bool,
}

impl EnclosureSequence<'_> {
    /// The lower bound passed the ceiling: `Φ(x)` is reported as divergent.
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    fn step(&mut self) -> Result<Option<EnclosureStep>, Error> {
        let i = self.k + 1;
        if let Some(a) = self.opts.digit_bound {
            let d = self.x.digit(i)?;
            if d > a {
                return Err(Error::DigitBoundViolated { position: i, digit: d, bound: a });
            }
        }
        let look = (self.wp + 8) as usize;
        let shifted = self.x.shift(i);
        let word = match shifted.available_prefix(look) {
            Ok(w) if w.is_empty() => return Ok(None),
            Ok(w) => w,
            Err(e) => return Err(e),
        };
        let eta = if shifted.is_eventually_periodic() {
            crate::cf::eval_point(&self.spec.map, &shifted, self.wp)?
        } else {
            cylinder_etas(&self.spec.map, word.digits(), self.wp)?.swap_remove(0)
        };
        let u = self.spec.u(&eta, self.wp)?;
        let mut term = self.pnu.mul(&u);
        if term.lo().is_negative() {
            term = Interval::new(Dyadic::zero(), term.hi().clone().max(Dyadic::zero()));
        }
        self.sum = self.sum.add(&self.spec.signed(i, term)).round_out(self.wp + 4);
        self.pnu = self.pnu.mul(&self.spec.nu_pow(&eta, self.wp + 8)?).round_out(self.wp + 8);
        self.k = i;

        let tail = self.tail_factor.as_ref().map(|f| self.pnu.mul(f));
        let (lo, hi) = match (&tail, self.spec.sign.is_constant()) {
            (None, true) => (self.sum.lo().clone(), None),
            (Some(t), true) => (self.sum.lo().clone(), Some(self.sum.hi() + t.hi())),
            (Some(t), false) => (self.sum.lo() - t.hi(), Some(self.sum.hi() + t.hi())),
            (None, false) => unreachable!("checked at construction"),
        };
        let lo = match &self.best_lo {
            Some(b) if *b > lo => b.clone(),
            _ => lo,
        };
        let hi = match (hi, &self.best_hi) {
            (Some(h), Some(b)) if *b < h => Some(b.clone()),
            (h, _) => h,
        };
        self.best_lo = Some(lo.clone());
        self.best_hi = hi.clone();
        if let Some(c) = &self.opts.ceiling {
            if lo > *c {
                self.diverged = true;
                self.done = true;
            }
        }
        Ok(Some(EnclosureStep { k: i, lo, hi }))
    }
}

impl Iterator for EnclosureSequence<'_> {
    type Item = Result<EnclosureStep, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.opts.max_terms.is_some_and(|m| self.k >= m) {
            return None;
        }
        match self.step() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) | Err(Error::InsufficientDigits { .. }) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Certified bounds for `Φ(x)`, one per consumed term.
///
/// With a digit bound `A` the tail after `k` terms is at most
/// `P_k^ν · U_A · 2/(1 - ρ^ν)`, where `U_A = sup u` on `[ℓ_A, s1]`: along the
/// orbit consecutive products stay below `ρ`, so `η_{k+1}⋯η_{i-1} <= ρ^{⌊(i-1-k)/2⌋}`.
pub fn eval_enclosure_sequence<'a>(
    spec: &'a BrjunoSpec,
    x: &DigitStream,
    opts: SequenceOptions,
    prec: i64,
) -> Result<EnclosureSequence<'a>, Error> {
    let tail_factor = match opts.digit_bound {
        Some(a) => Some(digit_bound_tail_factor(spec, a, prec + 8)?),
        None if !spec.sign.is_constant() => {
            return Err(Error::UpperBoundUnavailable);
        }
        None => None,
    };
    Ok(EnclosureSequence {
        spec,
        x: x.clone(),
        opts,
        wp: prec + 16,
        k: 0,
        pnu: Interval::one(),
        sum: Interval::zero(),
        best_lo: None,
        best_hi: None,
        tail_factor,
        diverged: false,
        done: false,
    })
}

/// Both sides of `Φ(x) = u(x) + x^ν Φ(G(x))` at `x = [head, 1, 1, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyCheck {
    pub lhs: Interval,
    pub rhs: Interval,
    pub overlap: bool,
}

pub fn cohomology_check(spec: &BrjunoSpec, head: &DigitWord, prec: i64) -> Result<CohomologyCheck, Error> {
    if !spec.sign.is_constant() {
        return Err(Error::Unsupported("cohomological identity needs a constant sign".into()));
    }
    // [1, 1, ...] is its own image; spell out the first digit
    let head = if head.is_empty() { &DigitWord::ones(1) } else { head };
    let wp = prec + 8;
    let x = DigitStream::eventually_ones(head.clone());
    let lhs = eval_periodic(spec, &x, prec)?;
    let xv = crate::cf::eval_point(&spec.map, &x, wp)?;
    let rest = eval_eventually_ones(spec, &head.suffix(1), prec)?;
    let rhs = spec.u(&xv, wp)?.add(&spec.nu_pow(&xv, wp)?.mul(&rest)).round_out(prec + 2);
    let overlap = lhs.overlaps(&rhs);
    Ok(CohomologyCheck { lhs, rhs, overlap })
}

/// Enclosures of the terms `s(i) P_{i-1}^ν u(η_i)`, `i = 1..=word.len()`,
/// valid for every point of the cylinder of `word`.
pub fn cylinder_terms(spec: &BrjunoSpec, word: &DigitWord, wp: i64) -> Result<Vec<Interval>, Error> {
    let etas = cylinder_etas(&spec.map, word.digits(), wp)?;
    let mut out = Vec::with_capacity(etas.len());
    let mut pnu = Interval::one();
    for (j, eta) in etas.iter().enumerate() {
        let mut t = pnu.mul(&spec.u(eta, wp)?);
        if t.lo().is_negative() {
            t = Interval::new(Dyadic::zero(), t.hi().clone().max(Dyadic::zero()));
        }
        out.push(spec.signed(j as u64 + 1, t).round_out(wp + 4));
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    Ok(out)
}

/// Bounds of `Φ` over the whole cylinder of `word`. The lower bound needs
/// no digit bound for a constant sign; the upper bound (and a signed lower
/// bound) assume every digit after the word is at most `digit_bound`.
pub fn cylinder_bounds(
    spec: &BrjunoSpec,
    word: &DigitWord,
    digit_bound: Option<u64>,
    wp: i64,
) -> Result<(Dyadic, Option<Dyadic>), Error> {
    let etas = cylinder_etas(&spec.map, word.digits(), wp)?;
    let mut lo = Dyadic::zero();
    let mut hi = Dyadic::zero();
    let mut pnu = Interval::one();
    for (j, eta) in etas.iter().enumerate() {
        let mut t = pnu.mul(&spec.u(eta, wp)?);
        if t.lo().is_negative() {
            t = Interval::new(Dyadic::zero(), t.hi().clone().max(Dyadic::zero()));
        }
        let t = spec.signed(j as u64 + 1, t).round_out(wp + 4);
        lo = &lo + t.lo();
        hi = &hi + t.hi();
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    match digit_bound {
        Some(a) => {
            let tail = pnu.mul(&digit_bound_tail_factor(spec, a, wp)?);
            if !spec.sign.is_constant() {
                lo = &lo - tail.hi();
            }
            Ok((lo, Some(&hi + tail.hi())))
        }
        None if spec.sign.is_constant() => Ok((lo, None)),
        None => Err(Error::UpperBoundUnavailable),
    }
}

/// Terms of `[head, 1, 1, ...]` for `i = 1..=count`.
pub fn ones_terms(spec: &BrjunoSpec, head: &DigitWord, count: usize, wp: i64) -> Result<Vec<Interval>, Error> {
    let phi = fixed_point_phi(&spec.map, wp + 8)?;
    let word = if count > head.len() { head.with_ones(count - head.len()) } else { head.clone() };
    let etas = head_etas(&spec.map, word.digits(), &phi, wp)?;
    let mut out = Vec::with_capacity(count);
    let mut pnu = Interval::one();
    for (j, eta) in etas.iter().take(count).enumerate() {
        out.push(spec.signed(j as u64 + 1, pnu.mul(&spec.u(eta, wp)?)).round_out(wp + 4));
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    Ok(out)
}

/// `(η_0⋯η_n)^ν` for `[head, 1, 1, ...]`, `n = head.len()`.
pub(crate) fn ones_head_product(spec: &BrjunoSpec, head: &DigitWord, wp: i64) -> Result<Interval, Error> {
    let phi = fixed_point_phi(&spec.map, wp + 8)?;
    let etas = head_etas(&spec.map, head.digits(), &phi, wp)?;
    let mut pnu = Interval::one();
    for eta in &etas {
        pnu = pnu.mul(&spec.nu_pow(eta, wp + 8)?).round_out(wp + 8);
    }
    Ok(pnu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(v: &Interval, want: f64, tol: f64) -> bool {
        (v.lo().to_f64_lossy() - want).abs() < tol && (v.hi().to_f64_lossy() - want).abs() < tol
    }

    #[test]
    fn golden_mean_values() {
        let lnphi = 0.48121182505960347f64;
        let phi = 0.6180339887498949f64;
        let e = DigitWord::empty();
        let b = eval_eventually_ones(&BrjunoSpec::brjuno(), &e, 40).unwrap();
        assert!(b.width() <= Dyadic::pow2(-40));
        assert!(close(&b, lnphi / (1.0 - phi), 1e-12));
        let w1 = eval_eventually_ones(&BrjunoSpec::wilton1(), &e, 30).unwrap();
        assert!(close(&w1, lnphi * lnphi / (1.0 - phi), 1e-9));
        let w2 = eval_eventually_ones(&BrjunoSpec::wilton2(), &e, 30).unwrap();
        assert!(close(&w2, lnphi / (1.0 + phi), 1e-9));
    }

    #[test]
    fn partial_sums_and_tail() {
        let spec = BrjunoSpec::brjuno();
        let x = DigitStream::eventually_ones(DigitWord::empty());
        let s1 = partial_sum(&spec, &x, 1, 40).unwrap();
        assert!(close(&s1.sum, 0.48121182505960347, 1e-11));
        let s = partial_sum(&spec, &x, 200, 48).unwrap();
        let total = s.sum.add(&ones_tail(&spec, &s, 48).unwrap());
        let closed = eval_eventually_ones(&spec, &DigitWord::empty(), 48).unwrap();
        assert!(total.overlaps(&closed));
        let w2 = partial_sum(&BrjunoSpec::wilton2(), &x, 2, 40).unwrap();
        assert!(close(&w2.sum, 0.48121182505960347 * (1.0 - 0.6180339887498949), 1e-11));
    }

    #[test]
    fn rho_examples() {
        let a = MapModel::alpha_cf(rat(1, 2), None).unwrap();
        assert_eq!(rho_bound(&a, 30).unwrap().rho, rat(1, 2));
        let g = MapModel::gauss();
        let r = rho_bound(&g, 30).unwrap();
        assert!((r.rho.to_f64().unwrap() - 0.6180339887).abs() < 1e-8);
        let r = rho_bound_with_a_star(&g, rat(7, 10)).unwrap();
        assert_eq!((r.rho, r.b_star), (rat(7, 10), rat(3, 7)));
    }

    #[test]
    fn cohomology_small() {
        let spec = BrjunoSpec::brjuno();
        for h in ["[1]", "[2,3]", "[50,1,7]"] {
            let c = cohomology_check(&spec, &h.parse().unwrap(), 30).unwrap();
            assert!(c.overlap, "{h}: {c:?}");
        }
    }

    #[test]
    fn bounded_sequence_converges() {
        let spec = BrjunoSpec::brjuno();
        let x = DigitStream::eventually_ones(DigitWord::empty());
        let opts = SequenceOptions { digit_bound: Some(1), max_terms: Some(120), ..Default::default() };
        let last = eval_enclosure_sequence(&spec, &x, opts, 40).unwrap().map(|s| s.unwrap()).last().unwrap();
        let hi = last.hi.unwrap();
        let want = 1.25982891379441;
        assert!(last.lo.to_f64_lossy() <= want && hi.to_f64_lossy() >= want);
        assert!((&hi - &last.lo) < Dyadic::pow2(-30));
    }
}
