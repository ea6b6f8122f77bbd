//! Expanding full-branch maps `G` on `(s0, s1)`.
//!
//! A map is described by its inverse branches `G_i^{-1}`, each a Möbius
//! transformation with integer coefficients. The Gauss map, the α-continued
//! fraction maps `A_α` (restricted to `(0, 1/n1)`) and user-supplied finite
//! branch tables are provided.

mod mobius;
mod verify;

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub use mobius::Mobius;
pub use verify::{verify_conditions, ConditionReport, ConditionResult, Scope, Verdict};

use crate::arith::{rat, Dyadic, Interval, Rational};
use crate::Error;

/// Structural constants `(κ, τ, σ, D, m_g)` declared for a map.
///
/// Missing values make the verifier report the dependent conditions as
/// unchecked instead of guessing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapConstants {
    pub kappa: u32,
    pub tau: Option<Rational>,
    pub sigma: Option<Rational>,
    pub d: Option<Rational>,
    pub m_g: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    Gauss,
    /// `A_α` on `(0, 1/n1)`; `n1 >= ceil(1/(1-α))`.
    AlphaCf { alpha: Rational, n1: u64 },
    /// Finite branch table, `branches[i-1]` is `G_i^{-1}`.
    Custom { branches: Vec<Mobius> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapModel {
    kind: MapKind,
    s0: Rational,
    s1: Rational,
    constants: MapConstants,
}

impl MapModel {
    /// `G(x) = {1/x}` with `κ = 2, τ = 3/2, σ = 5/2, D = 5, m_g = 2`.
    pub fn gauss() -> MapModel {
        MapModel {
            kind: MapKind::Gauss,
            s0: rat(0, 1),
            s1: rat(1, 1),
            constants: MapConstants {
                kappa: 2,
                tau: Some(rat(3, 2)),
                sigma: Some(rat(5, 2)),
                d: Some(rat(5, 1)),
                m_g: Some(rat(2, 1)),
            },
        }
    }

    /// `A_α` for `α ∈ [1/2, 1)`, restricted to `(0, 1/n1)`.
    ///
    /// On that domain the map only depends on `n1`: for `a >= n1` the branch
    /// `x = 1/(a + y)` is decreasing and `x = 1/(a + 1 - y)` is increasing,
    /// `y ∈ (0, 1/n1)`. Odd indices `j = 2k - 1` are the decreasing branches
    /// with `a = n1 - 1 + k`, even indices `j = 2k` the increasing ones.
    pub fn alpha_cf(alpha: Rational, n1_override: Option<u64>) -> Result<MapModel, Error> {
        if alpha < rat(1, 2) || alpha >= rat(1, 1) {
            return Err(Error::Domain(format!("alpha = {alpha} outside [1/2, 1)")));
        }
        let inv = (rat(1, 1) - &alpha).recip();
        let n_min = inv.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
        let n1 = match n1_override {
            Some(n) if n < n_min => {
                return Err(Error::Domain(format!("n1 override {n} below ceil(1/(1-alpha)) = {n_min}")))
            }
            Some(n) => n,
            None => n_min,
        };
        let mut map = MapModel {
            kind: MapKind::AlphaCf { alpha, n1 },
            s0: rat(0, 1),
            s1: Rational::new(BigInt::one(), BigInt::from(n1)),
            constants: MapConstants { kappa: 1, tau: None, sigma: None, d: None, m_g: None },
        };
        // g decreases along each parity class, so its supremum is at j = 1 or 2
        let g1 = map.g_of(1)?;
        let g2 = map.g_of(2)?;
        map.constants.m_g = Some(if g1 > g2 { g1 } else { g2 });
        if n1 == 2 {
            map.constants.tau = Some(rat(3, 2));
            map.constants.sigma = Some(rat(2, 1));
            map.constants.d = Some(rat(8, 1));
        }
        Ok(map)
    }

    /// A finite branch table. Branch `i` is `branches[i-1]`, which must map
    /// `(s0, s1)` onto `J_i`; the verifier reports violations.
    pub fn custom(s0: Rational, s1: Rational, branches: Vec<Mobius>, constants: MapConstants) -> Result<MapModel, Error> {
        if s0 >= s1 {
            return Err(Error::Domain(format!("s0 = {s0} >= s1 = {s1}")));
        }
        if branches.is_empty() {
            return Err(Error::Domain("custom map without branches".into()));
        }
        for (i, b) in branches.iter().enumerate() {
            if !b.pole_free_on(&s0, &s1) || b.det().is_zero() {
                return Err(Error::Domain(format!("branch {} is singular on [s0, s1]", i + 1)));
            }
        }
        Ok(MapModel { kind: MapKind::Custom { branches }, s0, s1, constants })
    }

    pub fn with_constants(mut self, constants: MapConstants) -> MapModel {
        self.constants = constants;
        self
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn s0(&self) -> &Rational {
        &self.s0
    }

    pub fn s1(&self) -> &Rational {
        &self.s1
    }

    pub fn constants(&self) -> &MapConstants {
        &self.constants
    }

    pub fn kappa(&self) -> u32 {
        self.constants.kappa
    }

    pub fn tau(&self) -> Result<&Rational, Error> {
        self.constants.tau.as_ref().ok_or(Error::MissingConstant("tau"))
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, MapKind::Custom { .. })
    }

    /// Number of branches, `None` when countably infinite.
    pub fn branch_count(&self) -> Option<u64> {
        match &self.kind {
            MapKind::Custom { branches } => Some(branches.len() as u64),
            _ => None,
        }
    }

    /// `G_i^{-1}` as a Möbius transformation.
    pub fn inverse_mobius(&self, i: u64) -> Result<Mobius, Error> {
        if i == 0 {
            return Err(Error::InvalidDigit(i));
        }
        let z = BigInt::zero;
        let o = BigInt::one;
        Ok(match &self.kind {
            MapKind::Gauss => Mobius::new(z(), o(), o(), BigInt::from(i)),
            MapKind::AlphaCf { n1, .. } => {
                let k = i.div_ceil(2);
                let a = BigInt::from(*n1) - 1u32 + BigInt::from(k);
                if i % 2 == 1 {
                    Mobius::new(z(), o(), o(), a)
                } else {
                    Mobius::new(z(), o(), -o(), a + 1u32)
                }
            }
            MapKind::Custom { branches } => {
                branches.get((i - 1) as usize).cloned().ok_or(Error::InvalidDigit(i))?
            }
        })
    }

    /// Exact branch interval `J_i = (ℓ_i, r_i)`.
    pub fn branch_interval(&self, i: u64) -> Result<(Rational, Rational), Error> {
        let h = self.inverse_mobius(i)?;
        let a = h.eval_rational(&self.s0).ok_or(Error::InvalidDigit(i))?;
        let b = h.eval_rational(&self.s1).ok_or(Error::InvalidDigit(i))?;
        Ok(if a < b { (a, b) } else { (b, a) })
    }

    /// Enclosure of `G_i^{-1}(y)` for `y ⊆ [s0, s1]`.
    pub fn inverse_branch(&self, i: u64, y: &Interval, prec: i64) -> Result<Interval, Error> {
        let h = self.inverse_mobius(i)?;
        self.check_in_domain(y)?;
        Ok(h.eval_interval(y, prec.max(8) as u64))
    }

    fn check_in_domain(&self, y: &Interval) -> Result<(), Error> {
        if y.lo().to_rational() < self.s0 || y.hi().to_rational() > self.s1 {
            return Err(Error::Domain(format!("{y} not inside [s0, s1]")));
        }
        Ok(())
    }

    /// Candidate branch indices for a point near `x`.
    fn branch_candidates(&self, x: &Dyadic) -> Vec<u64> {
        let inv_floor = |x: &Dyadic| -> u64 {
            if !x.is_positive() {
                return u64::MAX;
            }
            let q = x.to_rational().recip().floor().to_integer();
            q.to_u64().unwrap_or(u64::MAX)
        };
        match &self.kind {
            MapKind::Gauss => {
                let i = inv_floor(x).max(1);
                (i.saturating_sub(1).max(1)..=i.saturating_add(1)).collect()
            }
            MapKind::AlphaCf { n1, .. } => {
                let a = inv_floor(x);
                let k = a.saturating_sub(*n1 - 1).max(1);
                let j = 2 * k.min(u64::MAX / 4);
                (j.saturating_sub(4).max(1)..=j + 2).collect()
            }
            MapKind::Custom { branches } => (1..=branches.len() as u64).collect(),
        }
    }

    /// The branch whose closed interval contains `x`.
    pub fn locate(&self, x: &Interval) -> Result<u64, Error> {
        if x.lo().to_rational() <= self.s0 || x.hi().to_rational() > self.s1 {
            return Err(Error::Domain(format!("{x} not inside (s0, s1]")));
        }
        let (lo, hi) = (x.lo().to_rational(), x.hi().to_rational());
        let mut meets = 0;
        let mut found = None;
        for i in self.branch_candidates(x.hi()) {
            let (l, r) = self.branch_interval(i)?;
            if l <= lo && hi <= r {
                found = Some(i);
            }
            if lo <= r && l <= hi {
                meets += 1;
            }
        }
        match found {
            Some(i) if meets == 1 => Ok(i),
            _ if meets >= 2 || found.is_some() => Err(Error::BranchStraddle),
            _ => Err(Error::Domain(format!("{x} lies in no branch interval"))),
        }
    }

    /// Enclosure of `G(x)` for `x` inside a single branch interval.
    pub fn apply(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        let i = self.locate(x)?;
        let g = self.inverse_mobius(i)?.inverse();
        Ok(g.eval_interval(x, prec.max(8) as u64).round_out(prec))
    }

    /// `g(i) = r_i / ℓ_{i+1} - 1`.
    pub fn g_of(&self, i: u64) -> Result<Rational, Error> {
        let (_, r) = self.branch_interval(i)?;
        let (l1, _) = self.branch_interval(i + 1)?;
        Ok(r / l1 - rat(1, 1))
    }

    /// `δ_G(N) = G_N^{-1}(φ) - G_{N+1}^{-1}(φ)`.
    pub fn delta_g(&self, n: u64, prec: i64) -> Result<Interval, Error> {
        let phi = crate::cf::fixed_point_phi(self, prec + 8)?;
        self.delta_g_with(n, &phi, prec)
    }

    pub(crate) fn delta_g_with(&self, n: u64, phi: &Interval, prec: i64) -> Result<Interval, Error> {
        let bits = (prec + 24).max(16) as u64 + 2 * (64 - n.leading_zeros() as u64);
        let a = self.inverse_mobius(n)?.eval_interval(phi, bits);
        let b = self.inverse_mobius(n + 1)?.eval_interval(phi, bits);
        let d = a.sub(&b);
        if !d.is_positive() {
            return Err(Error::NonPositiveDelta(n));
        }
        Ok(d)
    }

    /// `inf |G'|` over `J_i`.
    pub fn tau_1(&self, i: u64) -> Result<Rational, Error> {
        Ok(self.inverse_mobius(i)?.inverse_derivative_inf(&self.s0, &self.s1))
    }

    /// `inf |(G^κ)'|` over `J_i` where a closed form is known.
    pub fn tau_kappa(&self, i: u64) -> Result<Option<Rational>, Error> {
        match (self.constants.kappa, &self.kind) {
            (1, _) => Ok(Some(self.tau_1(i)?)),
            // (G^2)'(x) = 1/(x G(x))^2 and x G(x) = 1 - i x on J_i
            (2, MapKind::Gauss) => {
                let s = BigInt::from(i) + 1u32;
                Ok(Some(Rational::from_integer(&s * &s)))
            }
            _ => Ok(None),
        }
    }

    /// Exact endpoints of `G_1(a)` (used by the ρ bound).
    pub fn apply_first_branch_exact(&self, a: &Rational) -> Result<Rational, Error> {
        self.inverse_mobius(1)?
            .inverse()
            .eval_rational(a)
            .ok_or_else(|| Error::Domain("pole of G_1".into()))
    }

    /// `s1 - s0`.
    pub(crate) fn span(&self) -> Rational {
        &self.s1 - &self.s0
    }

    /// Dyadic enclosure of `[s0, s1]`.
    pub fn domain_enclosure(&self, prec: i64) -> Interval {
        Interval::new(
            Dyadic::from_rational_floor(&self.s0, prec).max(Dyadic::zero()),
            Dyadic::from_rational_ceil(&self.s1, prec),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_branches() {
        let g = MapModel::gauss();
        assert_eq!(g.branch_interval(1).unwrap(), (rat(1, 2), rat(1, 1)));
        assert_eq!(g.g_of(2).unwrap(), rat(1, 1));
        for i in 1..50 {
            assert_eq!(g.g_of(i).unwrap(), rat(2, i as i64));
        }
        let y = Interval::from_rational(&rat(1, 2), 10);
        let x = g.inverse_branch(2, &y, 30).unwrap();
        assert!(x.contains_rational(&rat(2, 5)) && x.width() <= Dyadic::pow2(-30));
        assert!(g.apply(&x, 30).unwrap().contains_rational(&rat(1, 2)));
    }

    #[test]
    fn alpha_half_branches() {
        let a = MapModel::alpha_cf(rat(1, 2), None).unwrap();
        assert_eq!(a.s1(), &rat(1, 2));
        for j in 1..40i64 {
            assert_eq!(a.branch_interval(j as u64).unwrap(), (rat(2, j + 4), rat(2, j + 3)));
        }
        assert_eq!(a.g_of(1).unwrap(), rat(1, 2));
        assert!(a.inverse_mobius(2).unwrap().is_increasing());
        assert!(!a.inverse_mobius(3).unwrap().is_increasing());
        assert!(MapModel::alpha_cf(rat(3, 4), Some(3)).is_err());
        assert_eq!(MapModel::alpha_cf(rat(3, 4), None).unwrap().s1(), &rat(1, 4));
    }

    #[test]
    fn delta_closed_forms() {
        let g = MapModel::gauss();
        let d = g.delta_g(1, 30).unwrap();
        // 1/((1+φ)(2+φ)) = φ^3 = √5 - 2
        assert!((d.lo().to_f64_lossy() - 0.2360679774997897).abs() < 1e-9);
        let a = MapModel::alpha_cf(rat(1, 2), None).unwrap();
        let psi = 2f64.sqrt() - 1.0;
        let d3 = a.delta_g(3, 40).unwrap().lo().to_f64_lossy();
        assert!((d3 - (4.0 - 8.0 * psi) / ((6.0 + 2.0 * psi) * (8.0 - 2.0 * psi))).abs() < 1e-10);
        let d2 = a.delta_g(2, 40).unwrap().lo().to_f64_lossy();
        let want = 8.0 * psi / ((6.0 - 2.0 * psi) * (6.0 + 2.0 * psi));
        assert!((d2 - want).abs() < 1e-10, "{d2} vs {want}");
    }

    #[test]
    fn verifier_verdicts() {
        let r = verify_conditions(&MapModel::gauss(), 1000, 40).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.get("ii").unwrap().scope, Scope::Symbolic);
        let r = verify_conditions(&MapModel::alpha_cf(rat(1, 2), None).unwrap(), 1000, 40).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let mut c = MapModel::gauss().constants().clone();
        c.tau = Some(rat(5, 1));
        let r = verify_conditions(&MapModel::gauss().with_constants(c), 100, 40).unwrap();
        assert_eq!(r.get("ii").unwrap().verdict, Verdict::Fail);
        let r = verify_conditions(&MapModel::alpha_cf(rat(2, 3), None).unwrap(), 100, 40).unwrap();
        assert_eq!(r.get("iv").unwrap().verdict, Verdict::Unchecked);
    }
}
