use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{MapKind, MapModel};
use crate::arith::{rat, Dyadic, Interval, Rational};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unchecked,
}

/// How far a verdict reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Holds for every branch: the checked range contains the extremal index
    /// of a closed form that is monotone in `i` along each parity class.
    Symbolic,
    /// Certified on the checked branch range only.
    RangeLimited,
    /// True by the way the model is built.
    ByConstruction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionResult {
    /// Roman numeral of the condition, `"i"` to `"vii"`.
    pub name: &'static str,
    pub verdict: Verdict,
    pub scope: Scope,
    /// Certified lower bound on the slack of the worst branch (negative on failure).
    pub margin: Option<Dyadic>,
    /// Branch index of the worst margin or of the first failure.
    pub witness: Option<u64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub branch_range: (u64, u64),
    pub kappa: u32,
    pub tau: Option<Rational>,
    pub sigma: Option<Rational>,
    pub d: Option<Rational>,
    pub m_g: Option<Rational>,
    pub conditions: Vec<ConditionResult>,
}

impl ConditionReport {
    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.conditions.iter().any(|c| c.verdict == Verdict::Fail)
    }
}

/// Running minimum of exact slacks; the first non-positive one decides failure.
struct Worst {
    margin: Option<Rational>,
    witness: Option<u64>,
    failed_at: Option<u64>,
}

impl Worst {
    fn new() -> Worst {
        Worst { margin: None, witness: None, failed_at: None }
    }

    fn push(&mut self, i: u64, slack: Rational) {
        if !slack.is_positive() && self.failed_at.is_none() {
            self.failed_at = Some(i);
        }
        if self.margin.as_ref().is_none_or(|m| slack < *m) {
            self.margin = Some(slack);
            self.witness = Some(i);
        }
    }

    fn finish(self, name: &'static str, scope: Scope, prec: i64, note: String) -> ConditionResult {
        let verdict = if self.failed_at.is_some() { Verdict::Fail } else { Verdict::Pass };
        ConditionResult {
            name,
            verdict,
            scope: if verdict == Verdict::Fail { Scope::RangeLimited } else { scope },
            margin: self.margin.map(|m| Dyadic::from_rational_floor(&m, prec)),
            witness: self.failed_at.or(self.witness),
            note,
        }
    }
}

fn unchecked(name: &'static str, note: &str) -> ConditionResult {
    ConditionResult {
        name,
        verdict: Verdict::Unchecked,
        scope: Scope::RangeLimited,
        margin: None,
        witness: None,
        note: note.into(),
    }
}

/// Check conditions (i)–(vii) on branches `1..=i_max` with the declared
/// constants.
///
/// For the built-in maps the defining expressions are monotone in the branch
/// index along each parity class, so a passing check that includes branches
/// 1 and 2 extends to all branches and is reported as symbolic. Condition (iv)
/// for `A_α` and everything about custom maps stays range-limited.
pub fn verify_conditions(map: &MapModel, i_max: u64, prec: i64) -> Result<ConditionReport, Error> {
    if i_max < 2 {
        return Err(Error::Domain("verify_conditions needs i_max >= 2".into()));
    }
    let i_max = match map.branch_count() {
        Some(n) => i_max.min(n),
        None => i_max,
    };
    let c = map.constants().clone();
    let builtin = map.is_builtin();
    let closed = if builtin { Scope::Symbolic } else { Scope::RangeLimited };

    let mut ell = Vec::with_capacity(i_max as usize + 1);
    let mut r = Vec::with_capacity(i_max as usize + 1);
    for i in 1..=i_max {
        let (l, rr) = map.branch_interval(i)?;
        ell.push(l);
        r.push(rr);
    }
    let l_of = |i: u64| &ell[(i - 1) as usize];
    let r_of = |i: u64| &r[(i - 1) as usize];

    let mut out = Vec::new();

    // (i) full branches, ordered leftward
    let mut w = Worst::new();
    for i in 1..=i_max {
        let inside = (l_of(i) - map.s0()).min(map.s1() - r_of(i));
        w.push(i, if inside.is_negative() { inside } else { r_of(i) - l_of(i) });
        if i < i_max {
            w.push(i, l_of(i) - l_of(i + 1));
            // r_{i+1} <= l_i; a shared endpoint is allowed, so test >= 0
            let gap = l_of(i) - r_of(i + 1);
            w.push(i, if gap.is_negative() { gap } else { rat(1, 1) });
        }
    }
    out.push(w.finish("i", closed, prec, "G_i^{-1} maps (s0, s1) onto J_i, l_{i+1} < l_i, r_{i+1} <= l_i".into()));

    // (ii) expansion
    out.push(match (&c.sigma, &c.tau) {
        (Some(sigma), Some(tau)) if *sigma <= rat(1, 1) || *tau <= rat(1, 1) => ConditionResult {
            name: "ii",
            verdict: Verdict::Fail,
            scope: Scope::ByConstruction,
            margin: None,
            witness: None,
            note: "sigma and tau must exceed 1".into(),
        },
        (Some(sigma), Some(tau)) => {
            let mut w = Worst::new();
            let mut kappa_known = true;
            for i in 1..=i_max {
                let t1 = map.tau_1(i)?;
                // |G'| > 1 pointwise; the infimum sits at an open endpoint
                w.push(i, if t1 >= rat(1, 1) { rat(1, 1) } else { t1.clone() - rat(1, 1) });
                w.push(i, l_of(i) * sigma - t1.recip());
                match map.tau_kappa(i)? {
                    Some(tk) => w.push(i, l_of(i) / tau - tk.recip()),
                    None => kappa_known = false,
                }
            }
            if kappa_known {
                w.finish("ii", closed, prec, format!("kappa = {}, tau = {tau}, sigma = {sigma}", c.kappa))
            } else {
                unchecked("ii", "no closed form for tau_{i,kappa} at this kappa")
            }
        }
        _ => unchecked("ii", "tau or sigma not declared"),
    });

    // (iii) G_1 decreasing
    let h1 = map.inverse_mobius(1)?;
    out.push(ConditionResult {
        name: "iii",
        verdict: if h1.is_increasing() { Verdict::Fail } else { Verdict::Pass },
        scope: Scope::Symbolic,
        margin: None,
        witness: Some(1),
        note: "sign of the determinant of G_1^{-1}".into(),
    });

    // (iv) uses δ_G(N) at the fixed point φ of G_1
    out.push(match &c.d {
        Some(d) => {
            let phi = crate::cf::fixed_point_phi(map, prec + 16)?;
            let d_iv = Interval::from_rational(d, prec + 16);
            let mut worst: Option<(Dyadic, u64)> = None;
            let mut failed = None;
            for n in 1..i_max {
                let delta = match map.delta_g_with(n, &phi, prec + 16) {
                    Ok(delta) => delta,
                    // branches out of order: the condition cannot hold
                    Err(Error::NonPositiveDelta(_)) => {
                        failed.get_or_insert(n);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let wp = prec + 16;
                let ratio = Interval::from_rational(&(r_of(n + 1) / l_of(n + 1)), wp);
                let span = Interval::from_rational(&(r_of(n) - l_of(n + 1)), wp);
                let lhs = ratio.mul(&span).div(&delta, wp)?;
                let slack = d_iv.lo() - lhs.hi();
                if !slack.is_positive() && failed.is_none() {
                    failed = Some(n);
                }
                if worst.as_ref().is_none_or(|(m, _)| slack < *m) {
                    worst = Some((slack, n));
                }
            }
            let scope = if failed.is_none() && matches!(map.kind(), MapKind::Gauss) {
                Scope::Symbolic
            } else {
                Scope::RangeLimited
            };
            ConditionResult {
                name: "iv",
                verdict: if failed.is_some() { Verdict::Fail } else { Verdict::Pass },
                scope,
                margin: worst.as_ref().map(|(m, _)| m.floor_to(prec)),
                witness: failed.or(worst.map(|(_, n)| n)),
                note: format!("(r_{{N+1}}/l_{{N+1}}) (r_N - l_{{N+1}}) / delta_G(N) < D = {d}"),
            }
        }
        None => unchecked("iv", "D not declared"),
    });

    // (v) branch length against l_i^2
    out.push(match &c.d {
        Some(d) => {
            let mut w = Worst::new();
            for i in 1..=i_max {
                let l = l_of(i);
                if l.is_zero() {
                    w.push(i, -rat(1, 1));
                    continue;
                }
                w.push(i, d - (r_of(i) - l) / (l * l));
            }
            w.finish("v", closed, prec, format!("(r_i - l_i) / l_i^2 < D = {d}"))
        }
        None => unchecked("v", "D not declared"),
    });

    out.push(ConditionResult {
        name: "vi",
        verdict: if builtin { Verdict::Pass } else { Verdict::Unchecked },
        scope: Scope::ByConstruction,
        margin: None,
        witness: None,
        note: if builtin {
            "branches are rational Möbius maps with computable endpoints".into()
        } else {
            "not decidable from a branch table".into()
        },
    });

    // (vii) 0 < g(i) <= m_g, g -> 0
    out.push(match &c.m_g {
        Some(m_g) => {
            let mut w = Worst::new();
            for i in 1..i_max {
                let g = l_of(i + 1).recip() * r_of(i) - Rational::one();
                let pos = if g.is_positive() { rat(1, 1) } else { g.clone() };
                w.push(i, pos);
                // g(i) = m_g is allowed
                let room = m_g - &g;
                w.push(i, if room.is_negative() { room } else { rat(1, 1) });
            }
            let note = if builtin {
                "0 < g(i) <= m_g; g(i) -> 0 from the closed form".into()
            } else {
                format!("0 < g(i) <= m_g = {m_g} on the table; the limit is not checkable")
            };
            w.finish("vii", closed, prec, note)
        }
        None => unchecked("vii", "m_g not declared"),
    });

    Ok(ConditionReport {
        branch_range: (1, i_max),
        kappa: c.kappa,
        tau: c.tau,
        sigma: c.sigma,
        d: c.d,
        m_g: c.m_g,
        conditions: out,
    })
}
