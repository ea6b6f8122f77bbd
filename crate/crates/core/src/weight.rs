//! Weights `u: (s0, s1) → ℝ⁺` with interval evaluation and checks of the
//! derivative and ratio conditions.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Zero};

use crate::arith::{parse_rational, rat, Dyadic, Interval, Rational};
use crate::map::MapModel;
use crate::Error;

/// Expression in one variable `x` over field operations and `ln`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    X,
    Const(Rational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Ln(Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn eval(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        Ok(match self {
            Expr::X => x.clone(),
            Expr::Const(q) => Interval::from_rational(q, prec),
            Expr::Add(a, b) => a.eval(x, prec)?.add(&b.eval(x, prec)?),
            Expr::Sub(a, b) => a.eval(x, prec)?.sub(&b.eval(x, prec)?),
            Expr::Mul(a, b) => a.eval(x, prec)?.mul(&b.eval(x, prec)?),
            Expr::Div(a, b) => a.eval(x, prec)?.div(&b.eval(x, prec)?, prec)?,
            Expr::Neg(a) => a.eval(x, prec)?.neg(),
            Expr::Ln(a) => a.eval(x, prec)?.log(prec)?,
            Expr::Pow(a, n) if *n >= 0 => a.eval(x, prec)?.pow_u32(*n as u32),
            Expr::Pow(a, n) => a.eval(x, prec)?.pow_u32(n.unsigned_abs()).recip(prec)?,
        })
    }

    /// Symbolic derivative in `x`.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        let b = Box::new;
        match self {
            X => Const(rat(1, 1)),
            Const(_) => Const(rat(0, 1)),
            Add(f, g) => Add(b(f.derivative()), b(g.derivative())),
            Sub(f, g) => Sub(b(f.derivative()), b(g.derivative())),
            Mul(f, g) => Add(b(Mul(b(f.derivative()), g.clone())), b(Mul(f.clone(), b(g.derivative())))),
            Div(f, g) => Div(
                b(Sub(b(Mul(b(f.derivative()), g.clone())), b(Mul(f.clone(), b(g.derivative()))))),
                b(Pow(g.clone(), 2)),
            ),
            Neg(f) => Neg(b(f.derivative())),
            Ln(f) => Div(b(f.derivative()), f.clone()),
            Pow(_, 0) => Const(rat(0, 1)),
            Pow(f, n) => Mul(
                b(Mul(b(Const(Rational::from_integer((*n).into()))), b(Pow(f.clone(), n - 1)))),
                b(f.derivative()),
            ),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::X => f.write_str("x"),
            Expr::Const(q) => write!(f, "({q})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Pow(a, n) => write!(f, "({a})^({n})"),
        }
    }
}

/// Infix syntax: `x`, rationals and decimals, `+ - * /`, `^` with an integer
/// exponent, `ln(...)`, parentheses.
impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr, Error> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks: &toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!("trailing input in expression: {s}")));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, Error> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected '{c}' in expression")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' in expression")))
        }
    }

    fn sum(&mut self) -> Result<Expr, Error> {
        let mut e = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let r = self.product()?;
            e = if c == '+' { Expr::Add(Box::new(e), Box::new(r)) } else { Expr::Sub(Box::new(e), Box::new(r)) };
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, Error> {
        let mut e = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let r = self.unary()?;
            e = if c == '*' { Expr::Mul(Box::new(e), Box::new(r)) } else { Expr::Div(Box::new(e), Box::new(r)) };
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let neg = if self.peek_op() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = match self.toks.get(self.pos) {
                Some(Tok::Num(s)) => s.parse::<i32>().map_err(|_| Error::Parse(format!("exponent {s}")))?,
                _ => return Err(Error::Parse("integer exponent expected after '^'".into())),
            };
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match t {
            Some(Tok::Num(s)) => Ok(Expr::Const(parse_rational(&s)?)),
            Some(Tok::Ident(s)) if s == "x" => Ok(Expr::X),
            Some(Tok::Ident(s)) if s == "ln" || s == "log" => {
                self.expect('(')?;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(Expr::Ln(Box::new(e)))
            }
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(Error::Parse("malformed expression".into())),
        }
    }
}

const PIECES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// `(ln(1/x))^n`
    LogPow(u32),
    /// `1/x`
    Inverse,
    Custom(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightModel {
    kind: WeightKind,
    c: Option<Rational>,
    s0: Rational,
    s1: Rational,
}

/// Outcome of the derivative-bound check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeCheck {
    pub pass: bool,
    /// The constant that was tested; auto-fitted when none was declared.
    pub c: Rational,
    pub auto_fitted: bool,
    /// Certified upper bound of `|u'(x)| (x - s0)^2` over the covered pieces.
    pub sup: Dyadic,
    /// `C - sup` rounded down.
    pub margin: Dyadic,
    /// Pieces cover `[s0 + cover_from, s1]`.
    pub cover_from: Dyadic,
    pub pieces: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioCheck {
    pub pass: bool,
    /// `s1 < 1`: the condition holds without computation.
    pub vacuous: bool,
    pub n_max: u64,
    pub first_failure: Option<u64>,
    /// Certified lower bound of `min v(N)`.
    pub min_v: Option<Dyadic>,
}

impl WeightModel {
    /// A weight on the domain of `map`.
    pub fn new(kind: WeightKind, map: &MapModel) -> Result<WeightModel, Error> {
        if let WeightKind::LogPow(0) = kind {
            return Err(Error::Domain("log_pow exponent must be positive".into()));
        }
        Ok(WeightModel { kind, c: None, s0: map.s0().clone(), s1: map.s1().clone() })
    }

    pub fn with_c(mut self, c: Rational) -> WeightModel {
        self.c = Some(c);
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn c(&self) -> Option<&Rational> {
        self.c.as_ref()
    }

    pub fn s0(&self) -> &Rational {
        &self.s0
    }

    /// Enclosure of `u` over `x`, which must lie in `(s0, ∞)`.
    pub fn eval(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        if x.lo().to_rational() <= self.s0 {
            return Err(Error::Domain(format!("u evaluated at {x}, at or below s0")));
        }
        match &self.kind {
            WeightKind::LogPow(n) => {
                let mut l = x.log(prec + 4)?.neg();
                if x.hi() <= &Dyadic::one() && l.lo().is_negative() {
                    l = Interval::new(Dyadic::zero(), l.hi().clone().max(Dyadic::zero()));
                }
                Ok(l.pow_u32(*n).round_out(prec + 2))
            }
            WeightKind::Inverse => x.recip(prec + 2),
            WeightKind::Custom(e) => e.eval(x, prec + 4),
        }
    }

    /// Enclosure of `u'` over `x`.
    pub fn derivative(&self, x: &Interval, prec: i64) -> Result<Interval, Error> {
        if x.lo().to_rational() <= self.s0 {
            return Err(Error::Domain(format!("u' evaluated at {x}, at or below s0")));
        }
        match &self.kind {
            WeightKind::LogPow(n) => {
                let l = x.log(prec + 4)?.neg();
                let p = l.pow_u32(n - 1).mul(&Interval::from_i64(-(*n as i64)));
                p.div(x, prec + 2)
            }
            WeightKind::Inverse => Ok(x.mul(x).recip(prec + 2)?.neg()),
            WeightKind::Custom(e) => e.derivative().eval(x, prec + 4),
        }
    }

    /// Certify `|u'(x)| (x - s0)^2 < C` on a cover of `[s0 + 2^-bands (s1-s0), s1]`
    /// by geometric bands of 64 pieces each (`samples` pieces in all).
    ///
    /// Without a declared `C` the tested constant is fitted from the computed
    /// supremum with a 1/16 margin; that verdict is a heuristic.
    pub fn derivative_bound_check(&self, samples: usize, prec: i64) -> Result<DerivativeCheck, Error> {
        let bands = (samples / PIECES).clamp(1, 512) as i64;
        let span = &self.s1 - &self.s0;
        let s0 = Dyadic::from_rational_floor(&self.s0, prec);
        let mut sup = Dyadic::zero();
        let mut pieces = 0;
        for k in 0..bands {
            // band [s0 + span 2^-(k+1), s0 + span 2^-k]
            let a = &self.s0 + &span / Rational::from_integer(num_bigint::BigInt::one() << (k + 1) as usize);
            let b = &self.s0 + &span / Rational::from_integer(num_bigint::BigInt::one() << k as usize);
            let step = (&b - &a) / rat(PIECES as i64, 1);
            for j in 0..PIECES as i64 {
                let lo = &a + &step * rat(j, 1);
                let hi = &lo + &step;
                let wp = prec + 2 * k + 8;
                let piece = Interval::new(Dyadic::from_rational_floor(&lo, wp), Dyadic::from_rational_ceil(&hi, wp));
                let piece = if piece.lo().to_rational() <= self.s0 {
                    Interval::new(Dyadic::from_rational_ceil(&lo, wp + 8), piece.hi().clone())
                } else {
                    piece
                };
                let d = self.derivative(&piece, wp)?;
                let mag = if d.lo().abs() > d.hi().abs() { d.lo().abs() } else { d.hi().abs() };
                let dist = piece.hi() - &s0;
                let h = &mag * &(&dist * &dist);
                if h > sup {
                    sup = h;
                }
                pieces += 1;
            }
        }
        let sup = sup.ceil_bits(64);
        let (c, auto_fitted) = match &self.c {
            Some(c) => (c.clone(), false),
            None => {
                let fit = sup.to_rational() * rat(17, 16);
                (if fit.is_zero() { rat(1, 1) } else { fit }, true)
            }
        };
        let margin = Dyadic::from_rational_floor(&(&c - sup.to_rational()), prec);
        let cover_from = Dyadic::from_rational_floor(
            &(span / Rational::from_integer(num_bigint::BigInt::one() << bands as usize)),
            prec + bands,
        );
        Ok(DerivativeCheck { pass: margin.is_positive(), c, auto_fitted, sup, margin, cover_from, pieces })
    }

    /// The ratio condition on `u` for `N = 1..=n_max`:
    /// `v(N) = u(G_1^{-1} G_N^{-1}(s1)) / u(G_1^{-1} G_N^{-1}(s0))` positive and
    /// non-decreasing. Vacuous when `s1 < 1`.
    pub fn ratio_condition_check(&self, map: &MapModel, n_max: u64, prec: i64) -> Result<RatioCheck, Error> {
        if map.s1() < &rat(1, 1) {
            return Ok(RatioCheck { pass: true, vacuous: true, n_max, first_failure: None, min_v: None });
        }
        let h1 = map.inverse_mobius(1)?;
        let v_at = |n: u64, wp: i64| -> Result<Interval, Error> {
            let hn = map.inverse_mobius(n)?;
            let comp = h1.compose(&hn);
            let zs = comp.eval_rational(map.s1()).ok_or(Error::Domain("pole".into()))?;
            let ws = comp.eval_rational(map.s0()).ok_or(Error::Domain("pole".into()))?;
            let uz = self.eval(&Interval::from_rational(&zs, wp + 16), wp)?;
            let uw = self.eval(&Interval::from_rational(&ws, wp + 16), wp)?;
            uz.div(&uw, wp)
        };
        let mut first_failure = None;
        let mut min_v: Option<Dyadic> = None;
        let mut prev: Option<(u64, Interval)> = None;
        for n in 1..=n_max {
            let mut wp = prec;
            let v = loop {
                let v = v_at(n, wp)?;
                let resolved = match &prev {
                    Some((_, p)) => v.lo() >= p.hi() || v.hi() < p.lo(),
                    None => true,
                };
                if (resolved && v.lo().is_positive()) || wp > 8 * prec.max(32) {
                    break v;
                }
                wp *= 2;
                if let Some((pn, _)) = prev {
                    prev = Some((pn, v_at(pn, wp)?));
                }
            };
            let ok = v.lo().is_positive() && prev.as_ref().is_none_or(|(_, p)| v.lo() >= p.hi());
            if !ok && first_failure.is_none() {
                first_failure = Some(n);
            }
            if min_v.as_ref().is_none_or(|m| v.lo() < m) {
                min_v = Some(v.lo().clone());
            }
            prev = Some((n, v));
        }
        Ok(RatioCheck { pass: first_failure.is_none(), vacuous: false, n_max, first_failure, min_v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_w(kind: WeightKind) -> WeightModel {
        WeightModel::new(kind, &MapModel::gauss()).unwrap()
    }

    #[test]
    fn inverse_exact() {
        let w = gauss_w(WeightKind::Inverse);
        let x = Interval::new(Dyadic::pow2(-2), Dyadic::pow2(-1));
        assert_eq!(w.eval(&x, 20).unwrap(), Interval::new(Dyadic::from_i64(2), Dyadic::from_i64(4)));
    }

    #[test]
    fn domain_errors() {
        let w = gauss_w(WeightKind::LogPow(1));
        assert!(w.eval(&Interval::new(Dyadic::zero(), Dyadic::one()), 20).is_err());
        assert!(WeightModel::new(WeightKind::LogPow(0), &MapModel::gauss()).is_err());
    }

    #[test]
    fn expr_parse_and_derivative() {
        let e: Expr = "-ln(x)^2 + 3/x".parse().unwrap();
        let x = Interval::from_rational(&rat(1, 2), 60);
        let v = e.eval(&x, 60).unwrap();
        let want = -(0.5f64.ln()).powi(2) + 6.0;
        assert!((v.lo().to_f64_lossy() - want).abs() < 1e-12);
        let d = e.derivative().eval(&x, 60).unwrap();
        // -2 ln(x)/x - 3/x^2 at 1/2
        let want = -2.0 * 0.5f64.ln() / 0.5 - 12.0;
        assert!((d.lo().to_f64_lossy() - want).abs() < 1e-12);
        assert!("x +".parse::<Expr>().is_err());
        assert!("x ^ 1.5".parse::<Expr>().is_err());
    }

    #[test]
    fn derivative_constants() {
        let w = gauss_w(WeightKind::Inverse).with_c(rat(9, 8));
        assert!(w.derivative_bound_check(4096, 40).unwrap().pass);
        let w = gauss_w(WeightKind::LogPow(1)).with_c(rat(0, 1));
        assert!(!w.derivative_bound_check(4096, 40).unwrap().pass);
        let r = gauss_w(WeightKind::LogPow(2)).derivative_bound_check(4096, 40).unwrap();
        assert!(r.pass && r.auto_fitted);
    }

    #[test]
    fn ratio_checks() {
        let g = MapModel::gauss();
        assert!(gauss_w(WeightKind::LogPow(1)).ratio_condition_check(&g, 100, 40).unwrap().pass);
        assert!(gauss_w(WeightKind::Inverse).ratio_condition_check(&g, 100, 40).unwrap().pass);
        let a = MapModel::alpha_cf(rat(1, 2), None).unwrap();
        let w = WeightModel::new(WeightKind::Inverse, &a).unwrap();
        assert!(w.ratio_condition_check(&a, 100, 40).unwrap().vacuous);
    }
}
