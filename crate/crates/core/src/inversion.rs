//! Constructive inversion: from lower approximations `y_n ↗ y` build the
//! digits of a point `x` with `Φ(x) = y`.
//!
//! Each step raises `Φ(γ_k)` into a shrinking window below `y_{s+k}` by
//! inserting a digit after a run of ones, then appends enough ones that no
//! continuation can drop `Φ` by more than `2^-k`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::arith::{Dyadic, Interval};
use crate::brjuno::{cylinder_terms, ones_terms, phi_periodic_at, BrjunoSpec};
use crate::cf::{cylinder_enclosure, fixed_point_phi, DigitStream, DigitWord};
use crate::map::MapKind;
use crate::Error;

/// Source of the monotone approximations `y_1 <= y_2 <= ...`.
pub trait TargetOracle {
    /// `y_n` for `n >= 1`, or `None` once the source is exhausted.
    fn pull(&mut self, n: u64) -> Option<Dyadic>;
}

impl<F: FnMut(u64) -> Option<Dyadic>> TargetOracle for F {
    fn pull(&mut self, n: u64) -> Option<Dyadic> {
        self(n)
    }
}

/// Caches pulled values and enforces monotonicity.
struct Checked<'a> {
    inner: &'a mut dyn TargetOracle,
    seen: Vec<Dyadic>,
}

impl Checked<'_> {
    fn get(&mut self, n: u64) -> Result<Dyadic, Error> {
        while (self.seen.len() as u64) < n {
            let idx = self.seen.len() as u64 + 1;
            let v = self.inner.pull(idx).ok_or(Error::OracleExhausted { index: idx })?;
            if let Some(prev) = self.seen.last() {
                if v < *prev {
                    return Err(Error::OracleNotMonotone { index: idx });
                }
            }
            self.seen.push(v);
        }
        Ok(self.seen[(n - 1) as usize].clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Largest `m + N` tried by the digit-insertion search.
    pub search_cap: u64,
    /// Precision cap in bits for resolving strict inequalities.
    pub prec_cap: i64,
    /// Insertion rounds allowed within one squeeze step.
    pub substeps: u32,
    /// Largest number of padding ones.
    pub pad_cap: u64,
    /// Heads examined when seeding `γ_0`.
    pub seed_cap: usize,
    /// Oracle indices scanned when choosing `s` and `ε`.
    pub scan_limit: u64,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets { search_cap: 400, prec_cap: 4096, substeps: 64, pad_cap: 4096, seed_cap: 200_000, scan_limit: 64 }
    }
}

fn need_constant_sign(spec: &BrjunoSpec) -> Result<(), Error> {
    if spec.sign().is_constant() {
        Ok(())
    } else {
        Err(Error::Unsupported("inversion needs a constant sign sequence".into()))
    }
}

fn bits_below(eps: &Dyadic) -> i64 {
    // 2^-b <= eps for b = bits_below
    -eps.magnitude().unwrap_or(0) + 1
}

fn phi_ones(spec: &BrjunoSpec, head: &DigitWord, wp: i64) -> Result<Interval, Error> {
    phi_periodic_at(spec, &DigitStream::eventually_ones(head.clone()), wp)
}

/// Strict placement of an enclosure relative to an open window.
enum Placement {
    Inside,
    Outside,
    Unresolved,
}

fn place(v: &Interval, lo: &Interval, hi: &Interval) -> Placement {
    // v > lo and v < hi certainly
    if v.lo() > lo.hi() && v.hi() < hi.lo() {
        Placement::Inside
    } else if v.hi() <= lo.lo() || v.lo() >= hi.hi() {
        Placement::Outside
    } else {
        Placement::Unresolved
    }
}

/// `(m, N)` with `Φ(ω) + ε < Φ(β^N) < Φ(ω) + 2ε`, where
/// `β^N = [head, 1^{m-1}, N, 1, 1, ...]` (so `N` sits at position `|head| + m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult518 {
    pub m: u64,
    pub n: u64,
    pub phi_omega: Interval,
    pub phi_beta: Interval,
    /// `Φ(β).lo - (Φ(ω) + ε).hi`
    pub lower_margin: Dyadic,
    /// `(Φ(ω) + 2ε).lo - Φ(β).hi`
    pub upper_margin: Dyadic,
    pub prec: i64,
}

impl SearchResult518 {
    pub fn word(&self, head: &DigitWord) -> DigitWord {
        let mut w = head.with_ones(self.m as usize - 1);
        w.push(self.n).expect("N >= 2");
        w
    }
}

/// Diagonal search over `s = m + N` (`N` inner, ascending) for the first
/// certified pair. Candidates are screened at low precision and refined by
/// doubling up to `budgets.prec_cap`; a candidate that never resolves is
/// skipped, never accepted.
pub fn lemma518_search(
    spec: &BrjunoSpec,
    head: &DigitWord,
    epsilon: &Dyadic,
    m_min: u64,
    prec: i64,
    budgets: &Budgets,
) -> Result<SearchResult518, Error> {
    need_constant_sign(spec)?;
    if !epsilon.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let m_min = m_min.max(1);
    let base = (bits_below(epsilon) + 10).max(prec.min(24)).max(12);
    let mut omega: BTreeMap<i64, Interval> = BTreeMap::new();
    let mut phi_omega = |wp: i64| -> Result<Interval, Error> {
        if let Some(v) = omega.get(&wp) {
            return Ok(v.clone());
        }
        let v = phi_ones(spec, head, wp)?;
        omega.insert(wp, v.clone());
        Ok(v)
    };
    let e = Interval::point(epsilon.clone());
    let e2 = Interval::point(epsilon.shl(1));
    for s in (m_min + 2)..=budgets.search_cap {
        for n in 2..=(s - m_min) {
            let m = s - n;
            let mut word = head.with_ones(m as usize - 1);
            word.push(n)?;
            let mut wp = base;
            loop {
                let w = phi_omega(wp)?;
                let b = phi_ones(spec, &word, wp)?;
                match place(&b, &w.add(&e), &w.add(&e2)) {
                    Placement::Inside => {
                        // certify at the requested precision as well
                        let wp = wp.max(prec);
                        let w = phi_omega(wp)?;
                        let b = phi_ones(spec, &word, wp)?;
                        let lo = w.add(&e);
                        let hi = w.add(&e2);
                        if let Placement::Inside = place(&b, &lo, &hi) {
                            return Ok(SearchResult518 {
                                m,
                                n,
                                lower_margin: b.lo() - lo.hi(),
                                upper_margin: hi.lo() - b.hi(),
                                phi_omega: w,
                                phi_beta: b,
                                prec: wp,
                            });
                        }
                        break;
                    }
                    Placement::Outside => break,
                    Placement::Unresolved => {
                        if wp >= budgets.prec_cap {
                            break;
                        }
                        wp = (wp * 2).min(budgets.prec_cap);
                    }
                }
            }
        }
    }
    Err(Error::SearchBudgetExceeded(format!("no (m, N) with m + N <= {}", budgets.search_cap)))
}

/// How the padding lemma certifies `Φ(β^I) > Φ(ω) - ε` for every tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadRule {
    /// Term by term: every term `i <= n + m1` of the cylinder is at least
    /// `(1 - ε/(2Φ(ω)))` times the matching term of `ω`, with `m1` chosen so
    /// that the tail of `ω` after `n + m1` is below `ε/2`.
    PerTerm,
    /// The sum of worst-case term lower bounds over the cylinder exceeds
    /// `Φ(ω) - ε` directly.
    Summed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pad519 {
    /// Ones to append after `head`.
    pub m0: u64,
    /// Tail cut-off of `ω` used by the per-term rule.
    pub m1: u64,
    pub rule: PadRule,
    /// Certified lower bound of `Φ` over the padded cylinder.
    pub cylinder_lower: Dyadic,
    pub phi_omega: Interval,
}

fn smallest_m1(spec: &BrjunoSpec, head: &DigitWord, half_eps: &Dyadic, wp: i64, cap: u64) -> Result<u64, Error> {
    // tail of ω from index n + m1 is P_n^ν φ^{ν(m1-1)} u(φ) / (1 - φ^ν)
    let phi = fixed_point_phi(spec.map(), wp + 8)?;
    let q = spec.nu_pow(&phi, wp + 8)?;
    let u = spec.weight().eval(&phi, wp)?;
    let pnu = crate::brjuno::ones_head_product(spec, head, wp)?;
    let mut t = pnu.mul(&u).div(&Interval::one().sub(&q), wp + 8)?;
    for m1 in 1..=cap {
        if t.hi() < half_eps {
            return Ok(m1);
        }
        t = t.mul(&q).round_out(wp + 8);
    }
    Err(Error::SearchBudgetExceeded("tail cut-off m1".into()))
}

fn cylinder_lower_sum(terms: &[Interval]) -> Dyadic {
    let mut s = Dyadic::zero();
    for t in terms {
        if t.lo().is_positive() {
            s = &s + t.lo();
        }
    }
    s
}

/// Number of ones `m0` such that every point of the cylinder
/// `[head, 1^{m0}]` has `Φ > Φ(ω) - ε`, `ω = [head, 1, 1, ...]`.
pub fn lemma519_pad(
    spec: &BrjunoSpec,
    head: &DigitWord,
    epsilon: &Dyadic,
    prec: i64,
    rule: PadRule,
    budgets: &Budgets,
) -> Result<Pad519, Error> {
    need_constant_sign(spec)?;
    if !epsilon.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let n = head.len() as u64;
    let mut wp = (bits_below(epsilon) + 12).max(prec).max(16);
    loop {
        let phi_w = phi_ones(spec, head, wp)?;
        let half = epsilon.shl(-1);
        let m1 = smallest_m1(spec, head, &half, wp, budgets.pad_cap)?;
        let threshold = &phi_w.hi().clone() - epsilon;
        let lower_at = |m0: u64| -> Result<(Vec<Interval>, Dyadic), Error> {
            let terms = cylinder_terms(spec, &head.with_ones(m0 as usize), wp)?;
            let s = cylinder_lower_sum(&terms);
            Ok((terms, s))
        };
        // Φ > 0 makes the claim empty once ε >= Φ(ω)
        if epsilon >= phi_w.hi() {
            let (_, s) = lower_at(m1)?;
            return Ok(Pad519 { m0: m1, m1, rule, cylinder_lower: s, phi_omega: phi_w });
        }
        let ok = |m0: u64| -> Result<Option<Dyadic>, Error> {
            let (terms, s) = lower_at(m0)?;
            let pass = match rule {
                PadRule::Summed => s > threshold,
                PadRule::PerTerm => {
                    if m0 < m1 {
                        false
                    } else {
                        let c = Interval::one().sub(&Interval::point(epsilon.clone()).div(&phi_w.scale2(1), wp + 8)?);
                        let omega_terms = ones_terms(spec, head, (n + m1) as usize, wp)?;
                        omega_terms.iter().zip(&terms).all(|(w, b)| b.lo() > c.mul(w).hi())
                    }
                }
            };
            Ok(if pass { Some(s) } else { None })
        };
        let start = if rule == PadRule::PerTerm { m1 } else { 0 };
        // grow geometrically, then bisect back to the smallest passing count
        let mut hi = start;
        let mut found = None;
        let mut step = 1;
        while hi <= budgets.pad_cap {
            if let Some(s) = ok(hi)? {
                found = Some(s);
                break;
            }
            hi += step;
            step *= 2;
        }
        if let Some(mut s) = found {
            let mut lo = if hi == start { start } else { hi - step / 2 + 1 };
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                match ok(mid)? {
                    Some(sm) => {
                        hi = mid;
                        s = sm;
                    }
                    None => lo = mid + 1,
                }
            }
            return Ok(Pad519 { m0: hi, m1, rule, cylinder_lower: s, phi_omega: phi_w });
        }
        if wp >= budgets.prec_cap {
            return Err(Error::SearchBudgetExceeded(format!("no pad up to {} ones", budgets.pad_cap)));
        }
        wp = (wp * 2).min(budgets.prec_cap);
    }
}

/// Outcome of one uniform step: insert `N` after `m - 1` ones, then `t` ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformStep {
    pub m: u64,
    pub t: u64,
    pub n: u64,
    pub search: SearchResult518,
    pub pad: Pad519,
}

impl UniformStep {
    /// `[head, 1^{m-1}, N, 1^t]`
    pub fn word(&self, head: &DigitWord) -> DigitWord {
        self.search.word(head).with_ones(self.t as usize)
    }
}

/// Insertion search at `ε`, then padding at `2^-n_index` on the extended head.
pub fn uniform_step(
    spec: &BrjunoSpec,
    head: &DigitWord,
    epsilon: &Dyadic,
    m_min: u64,
    n_index: u32,
    prec: i64,
    budgets: &Budgets,
) -> Result<UniformStep, Error> {
    let search = lemma518_search(spec, head, epsilon, m_min, prec, budgets)?;
    let extended = search.word(head);
    let pad = lemma519_pad(spec, &extended, &Dyadic::pow2(-(n_index as i64)), prec, PadRule::Summed, budgets)?;
    Ok(UniformStep { m: search.m, t: pad.m0, n: search.n, search, pad })
}

/// Compositions of `sum` into positive parts not ending in 1, shortest first,
/// then lexicographic.
fn heads_with_sum(sum: u64, out: &mut Vec<Vec<u64>>) {
    fn rec(left: u64, len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            if left == 0 && cur.last().is_some_and(|&d| d != 1) {
                out.push(cur.clone());
            }
            return;
        }
        let slots = (len - cur.len()) as u64;
        if left < slots {
            return;
        }
        for d in 1..=(left - (slots - 1)) {
            cur.push(d);
            rec(left - d, len, cur, out);
            cur.pop();
        }
    }
    for len in 1..=sum as usize {
        rec(sum, len, &mut Vec::new(), out);
    }
}

/// A head `γ_0` with `y_s - ε < Φ([γ_0, 1, 1, ...]) < y_s - ε/2`, searched by
/// digit sum, then length, then lexicographically.
pub fn seed_gamma0(
    spec: &BrjunoSpec,
    y_s: &Dyadic,
    epsilon: &Dyadic,
    phi_star: &Interval,
    prec: i64,
    budgets: &Budgets,
) -> Result<DigitWord, Error> {
    need_constant_sign(spec)?;
    let two_eps = epsilon.shl(1);
    if y_s <= &(phi_star.hi() + &two_eps) {
        return Err(Error::InfimumViolated);
    }
    let lo = Interval::point(y_s - epsilon);
    let hi = Interval::point(y_s - &epsilon.shl(-1));
    let base = (bits_below(epsilon) + 8).max(12);
    let mut examined = 0usize;
    for sum in 2.. {
        let mut heads = Vec::new();
        heads_with_sum(sum, &mut heads);
        for h in heads {
            examined += 1;
            if examined > budgets.seed_cap {
                return Err(Error::SearchBudgetExceeded("seed head search".into()));
            }
            let word = DigitWord::new(h)?;
            let mut wp = base;
            loop {
                let v = phi_ones(spec, &word, wp.max(prec.min(wp * 4)))?;
                match place(&v, &lo, &hi) {
                    Placement::Inside => return Ok(word),
                    Placement::Outside => break,
                    Placement::Unresolved if wp >= budgets.prec_cap => break,
                    Placement::Unresolved => wp = (wp * 2).min(budgets.prec_cap),
                }
            }
        }
    }
    unreachable!()
}

/// Certificates recorded for one squeeze step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditEntry {
    pub k: u64,
    pub head: DigitWord,
    /// Enclosure of `Φ(γ_k)`, `γ_k = [head, 1, 1, ...]`.
    pub phi: Interval,
    pub y_sk: Dyadic,
    /// `(y_{s+k} - 2^-k ε, y_{s+k} - 2^-(k+1) ε)`
    pub window: (Dyadic, Dyadic),
    /// Property (4): `phi` strictly inside `window`.
    pub cert4: bool,
    /// `Φ(γ_k) - Φ(γ_{k-1})`, certified lower bound (the direction the loop guarantees).
    pub increase_margin: Option<Dyadic>,
    /// `Φ(γ_{k-1}) - Φ(γ_k)`, certified lower bound (property (5) as printed).
    pub decrease_margin: Option<Dyadic>,
    /// Property (6): worst-case cylinder lower bound `> Φ(γ_k) - 2^-k`.
    pub cert6: bool,
    pub cylinder_lower: Dyadic,
    /// Insertion rounds used (1 when the window was hit directly).
    pub substeps: u32,
    /// Padding ones appended.
    pub pad: u64,
}

impl AuditEntry {
    pub fn cert5_increase(&self) -> bool {
        self.increase_margin.as_ref().is_some_and(|m| m.is_positive())
    }

    pub fn cert5_as_printed(&self) -> bool {
        self.decrease_margin.as_ref().is_some_and(|m| m.is_positive())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct InvertOptions {
    /// Head of the infimum point `x_* = [head, 1, 1, ...]`; required for
    /// custom maps, defaults to `[1, 1, ...]` for the built-ins.
    pub x_star: Option<DigitWord>,
    pub budgets: Budgets,
}


#[derive(Debug)]
pub struct Inversion {
    /// `y` could not be separated from `Φ(x_*)`: the output is `x_*`.
    pub trivial: bool,
    pub epsilon: Option<Dyadic>,
    pub s: Option<u64>,
    /// `I_k` for the last completed step.
    pub digits: DigitWord,
    pub audit: Vec<AuditEntry>,
    /// Enclosure of `Φ(γ_k)` for the last completed step.
    pub final_phi: Option<Interval>,
    /// Cylinder of `digits`, containing the limit point.
    pub point: Option<Interval>,
    pub phi_star: Interval,
    /// Set when the run ended early; the fields above hold the partial result.
    pub stopped: Option<Error>,
}

impl Inversion {
    /// Every completed step certified (4), the increase in (5), and (6).
    pub fn all_certified(&self) -> bool {
        self.stopped.is_none()
            && self.audit.iter().all(|a| a.cert4 && a.cert6 && (a.k == 0 || a.cert5_increase()))
    }
}

/// Run the squeeze loop for `steps` iterations.
pub fn invert(
    spec: &BrjunoSpec,
    oracle: &mut dyn TargetOracle,
    steps: u32,
    prec: i64,
    opts: &InvertOptions,
) -> Result<Inversion, Error> {
    need_constant_sign(spec)?;
    let x_star = match (&opts.x_star, spec.map().kind()) {
        (Some(h), _) => h.clone(),
        (None, MapKind::Custom { .. }) => {
            return Err(Error::Domain("custom maps need an explicit x_*".into()));
        }
        (None, _) => DigitWord::empty(),
    };
    let b = &opts.budgets;
    let prec = prec.max(16);
    let phi_star = crate::brjuno::eval_eventually_ones(spec, &x_star, prec + 8)?;
    let mut oracle = Checked { inner: oracle, seen: Vec::new() };
    let mut out = Inversion {
        trivial: false,
        epsilon: None,
        s: None,
        digits: x_star.clone(),
        audit: Vec::new(),
        final_phi: None,
        point: None,
        phi_star: phi_star.clone(),
        stopped: None,
    };

    // the largest ε = 2^-(j+1), j <= 8, with some y_s > Φ(x_*) + 2ε
    let mut chosen = None;
    'scan: for j in 0..=8i64 {
        let gap = &phi_star.hi().clone() + &Dyadic::pow2(-j);
        for n in 1..=b.scan_limit {
            match oracle.get(n) {
                Ok(y) if y > gap => {
                    chosen = Some((j, n));
                    break 'scan;
                }
                Ok(_) => {}
                Err(Error::OracleExhausted { .. }) => break,
                Err(e) => {
                    out.stopped = Some(e);
                    return Ok(out);
                }
            }
        }
    }
    let Some((j, s)) = chosen else {
        out.trivial = true;
        out.digits = x_star.with_ones((steps as usize).saturating_sub(x_star.len()));
        out.final_phi = Some(phi_star);
        out.point = Some(cylinder_enclosure(spec.map(), &out.digits, prec)?.enclosure);
        return Ok(out);
    };
    let eps = Dyadic::pow2(-(j + 1));
    out.epsilon = Some(eps.clone());
    out.s = Some(s);

    let run = |out: &mut Inversion, oracle: &mut Checked| -> Result<(), Error> {
        let y_s = oracle.get(s)?;
        let seed = seed_gamma0(spec, &y_s, &eps, &phi_star, prec, b)?;
        let pad0 = lemma519_pad(spec, &seed, &Dyadic::one(), prec, PadRule::Summed, b)?;
        let mut head = seed.with_ones(pad0.m0 as usize);
        let wp_for = |k: u64| prec.max(bits_below(&eps) + k as i64 + 24);
        let mut phi = phi_ones(spec, &head, wp_for(0))?;
        let window0 = (&y_s - &eps, &y_s - &eps.shl(-1));
        let cyl = cylinder_lower_sum(&cylinder_terms(spec, &head, wp_for(0))?);
        out.audit.push(AuditEntry {
            k: 0,
            head: head.clone(),
            cert4: phi.lo() > &window0.0 && phi.hi() < &window0.1,
            phi: phi.clone(),
            y_sk: y_s.clone(),
            window: window0,
            increase_margin: None,
            decrease_margin: None,
            cert6: cyl > (phi.hi() - &Dyadic::one()),
            cylinder_lower: cyl,
            substeps: 0,
            pad: pad0.m0,
        });
        out.digits = head.clone();
        out.final_phi = Some(phi.clone());

        for k in 1..=steps as u64 {
            let wp = wp_for(k);
            let y = oracle.get(s + k)?;
            let lo = &y - &eps.shl(-(k as i64));
            let hi = &y - &eps.shl(-(k as i64 + 1));
            let w = &hi - &lo;
            let prev = phi_ones(spec, &head, wp)?;
            let mut cur = head.clone();
            let mut v = prev.clone();
            let mut substeps = 0;
            loop {
                substeps += 1;
                if substeps > b.substeps {
                    return Err(Error::SearchBudgetExceeded(format!("step {k}: window not reached")));
                }
                let d_lo = &lo - v.hi();
                if !d_lo.is_positive() {
                    return Err(Error::SearchBudgetExceeded(format!("step {k}: value already past the window")));
                }
                // largest ε′ whose sandwich cannot overshoot the window
                let room = (&d_lo + &w).shl(-1);
                let e = room.floor_to(wp);
                let r = lemma518_search(spec, &cur, &e, 1, wp, b)?;
                cur = r.word(&cur);
                v = r.phi_beta;
                if v.lo() > &lo {
                    break;
                }
            }
            let pad = lemma519_pad(spec, &cur, &Dyadic::pow2(-(k as i64)), wp, PadRule::Summed, b)?;
            cur = cur.with_ones(pad.m0 as usize);
            if (cur.len() as u64) < k {
                cur = cur.with_ones(k as usize - cur.len());
            }
            let mut wpk = wp;
            phi = loop {
                let p = phi_ones(spec, &cur, wpk)?;
                if (p.lo() > &lo && p.hi() < &hi) || wpk >= b.prec_cap {
                    break p;
                }
                wpk = (wpk * 2).min(b.prec_cap);
            };
            let cyl = cylinder_lower_sum(&cylinder_terms(spec, &cur, wpk)?);
            out.audit.push(AuditEntry {
                k,
                head: cur.clone(),
                cert4: phi.lo() > &lo && phi.hi() < &hi,
                increase_margin: Some(phi.lo() - prev.hi()),
                decrease_margin: Some(prev.lo() - phi.hi()),
                cert6: cyl > (phi.hi() - &Dyadic::pow2(-(k as i64))),
                cylinder_lower: cyl,
                phi: phi.clone(),
                y_sk: y,
                window: (lo, hi),
                substeps,
                pad: pad.m0,
            });
            head = cur;
            out.digits = head.clone();
            out.final_phi = Some(phi.clone());
        }
        Ok(())
    };
    if let Err(e) = run(&mut out, &mut oracle) {
        out.stopped = Some(e);
    }
    out.point = Some(cylinder_enclosure(spec.map(), &out.digits, prec)?.enclosure);
    Ok(out)
}
