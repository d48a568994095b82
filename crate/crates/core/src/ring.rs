//! Exact scalars and the supported principal ideal domains.
//!
//! Every supported ring embeds into the Gaussian rationals ℚ(i), so a single
//! element type [`Elem`] carries values for all of them. A [`BaseRing`] decides
//! membership, units, associates and Bezout data. Ring maps between the
//! supported rings are inclusions inside ℚ(i).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};

/// An element of ℚ(i), stored as a pair of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Elem {
    re: BigRational,
    im: BigRational,
}

impl Elem {
    pub fn zero() -> Self {
        Elem { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Elem::from_int(1)
    }

    pub fn i() -> Self {
        Elem { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Elem { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Elem { re: BigRational::from_integer(n), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Elem {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Elem { re, im: BigRational::zero() }
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Elem {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Elem { re, im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when both coordinates are integers, i.e. the element lies in ℤ[i].
    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    pub fn conj(&self) -> Self {
        Elem { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Field norm re² + im².
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Inverse in ℚ(i).
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Elem { re: self.re.recip(), im: BigRational::zero() });
        }
        let n = self.norm();
        Some(Elem { re: &self.re / &n, im: -(&self.im / &n) })
    }

    /// Quotient in ℚ(i).
    pub fn div_field(&self, other: &Elem) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// Least common multiple of the denominators of both coordinates.
    pub fn denominator(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Integer value when the element is a rational integer.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_bigint().and_then(|n| n.to_i64())
    }

    pub fn pow(&self, mut e: u32) -> Elem {
        let mut base = self.clone();
        let mut acc = Elem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale_int(&self, n: &BigInt) -> Elem {
        Elem { re: &self.re * n, im: &self.im * n }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat(r: &BigRational) -> String {
            if r.is_integer() {
                r.to_integer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.im.is_zero() {
            return write!(f, "{}", rat(&self.re));
        }
        let im = if self.im.is_one() {
            "i".to_string()
        } else if (-self.im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}i", rat(&self.im))
        };
        if self.re.is_zero() {
            write!(f, "{im}")
        } else if self.im.is_positive() {
            write!(f, "{}+{}", rat(&self.re), im)
        } else {
            write!(f, "{}{}", rat(&self.re), im)
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Elem {
    type Err = GkError;

    /// Accepts `a`, `a/b`, `bi`, `a+bi`, `a-bi`, `i`, `-i` with integer or
    /// fractional coordinates.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || GkError::Parse(format!("invalid scalar `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        fn parse_rat(t: &str) -> Option<BigRational> {
            match t.split_once('/') {
                Some((n, d)) => {
                    let d: BigInt = d.parse().ok()?;
                    if d.is_zero() {
                        return None;
                    }
                    Some(BigRational::new(n.parse().ok()?, d))
                }
                None => Some(BigRational::from_integer(t.parse().ok()?)),
            }
        }
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not in leading position
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(k, _)| k)
                .last();
            let (re_part, im_part) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("", body),
            };
            let im = match im_part {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                t => parse_rat(t.strip_prefix('+').unwrap_or(t)).ok_or_else(bad)?,
            };
            let re = if re_part.is_empty() {
                BigRational::zero()
            } else {
                parse_rat(re_part).ok_or_else(bad)?
            };
            return Ok(Elem { re, im });
        }
        Ok(Elem::from_rational(parse_rat(&s).ok_or_else(bad)?))
    }
}

impl Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_i64() {
            Some(n) => serializer.serialize_i64(n),
            None => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Elem::from_int(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: &Elem) -> Elem {
                (&self).$method(rhs)
            }
        }
        impl $trait<Elem> for &Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&Elem> for &Elem {
    type Output = Elem;
    fn add(self, rhs: &Elem) -> Elem {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let im = if self.im.is_zero() && rhs.im.is_zero() {
            BigRational::zero()
        } else {
            &self.im + &rhs.im
        };
        Elem { re: &self.re + &rhs.re, im }
    }
}

impl Sub<&Elem> for &Elem {
    type Output = Elem;
    fn sub(self, rhs: &Elem) -> Elem {
        if rhs.is_zero() {
            return self.clone();
        }
        let im = if self.im.is_zero() && rhs.im.is_zero() {
            BigRational::zero()
        } else {
            &self.im - &rhs.im
        };
        Elem { re: &self.re - &rhs.re, im }
    }
}

impl Mul<&Elem> for &Elem {
    type Output = Elem;
    fn mul(self, rhs: &Elem) -> Elem {
        if self.is_zero() || rhs.is_zero() {
            return Elem::zero();
        }
        if self.im.is_zero() && rhs.im.is_zero() {
            return Elem { re: &self.re * &rhs.re, im: BigRational::zero() };
        }
        Elem {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Elem> for Elem {
    fn add_assign(&mut self, rhs: &Elem) {
        if rhs.is_zero() {
            return;
        }
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&Elem> for Elem {
    fn sub_assign(&mut self, rhs: &Elem) {
        if rhs.is_zero() {
            return;
        }
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl From<i64> for Elem {
    fn from(n: i64) -> Self {
        Elem::from_int(n)
    }
}

/// The supported base rings. All are principal ideal domains with decidable
/// exact division.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseRing {
    Integers,
    Rationals,
    /// ℤ[1/n]: the integers with a finite set of primes inverted.
    LocalizedIntegers { primes: Vec<u64> },
    GaussianIntegers,
}

impl BaseRing {
    /// ℤ with the given primes inverted. Primes are sorted and deduplicated.
    pub fn localized(primes: &[u64]) -> Result<Self> {
        let mut ps: Vec<u64> = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if ps.is_empty() {
            return Ok(BaseRing::Integers);
        }
        for &p in &ps {
            if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                return Err(GkError::Parse(format!("{p} is not a prime")));
            }
        }
        Ok(BaseRing::LocalizedIntegers { primes: ps })
    }

    pub fn is_field(&self) -> bool {
        matches!(self, BaseRing::Rationals)
    }

    /// The field of fractions is ℚ(i) for ℤ[i] and ℚ otherwise.
    pub fn fraction_field(&self) -> BaseRing {
        BaseRing::Rationals
    }

    pub fn contains(&self, x: &Elem) -> bool {
        match self {
            BaseRing::Integers => x.is_real() && x.re.is_integer(),
            BaseRing::Rationals => x.is_real(),
            BaseRing::LocalizedIntegers { primes } => x.is_real() && is_smooth(x.re.denom(), primes),
            BaseRing::GaussianIntegers => x.is_gaussian_integer(),
        }
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        if x.is_zero() || !self.contains(x) {
            return false;
        }
        match self {
            BaseRing::Integers => x.re.numer().abs().is_one(),
            BaseRing::Rationals => true,
            BaseRing::LocalizedIntegers { primes } => is_smooth(x.re.numer(), primes),
            BaseRing::GaussianIntegers => x.norm().is_one(),
        }
    }

    /// Splits `x = unit * assoc` with `assoc` the canonical associate:
    /// nonnegative for ℤ, 1 for nonzero rationals, the positive prime-to-S
    /// integer part for ℤ[1/n], and the first-quadrant associate for ℤ[i].
    pub fn normalize(&self, x: &Elem) -> (Elem, Elem) {
        if x.is_zero() {
            return (Elem::zero(), Elem::one());
        }
        match self {
            BaseRing::Integers => {
                if x.re.is_negative() {
                    (-x, Elem::from_int(-1))
                } else {
                    (x.clone(), Elem::one())
                }
            }
            BaseRing::Rationals => (Elem::one(), x.clone()),
            BaseRing::LocalizedIntegers { primes } => {
                let free = strip_primes(x.re.numer(), primes).abs();
                let assoc = Elem::from_bigint(free);
                let unit = x.div_field(&assoc).expect("nonzero");
                (assoc, unit)
            }
            BaseRing::GaussianIntegers => {
                let mut a = x.clone();
                let mut unit = Elem::one();
                // rotate by i until re > 0 and im >= 0
                for _ in 0..4 {
                    if a.re.is_positive() && !a.im.is_negative() {
                        break;
                    }
                    a = &a * &Elem::gaussian(0, -1);
                    unit = &unit * &Elem::i();
                }
                (a, unit)
            }
        }
    }

    pub fn canonical(&self, x: &Elem) -> Elem {
        self.normalize(x).0
    }

    /// Quotient `a / b` when it lies in the ring.
    pub fn div_exact(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        let q = a.div_field(b)?;
        self.contains(&q).then_some(q)
    }

    pub fn divides(&self, b: &Elem, a: &Elem) -> bool {
        if b.is_zero() {
            return a.is_zero();
        }
        self.div_exact(a, b).is_some()
    }

    /// Bezout data `(g, s, t)` with `g = s*a + t*b` a canonical gcd.
    pub fn xgcd(&self, a: &Elem, b: &Elem) -> (Elem, Elem, Elem) {
        if a.is_zero() && b.is_zero() {
            return (Elem::zero(), Elem::zero(), Elem::zero());
        }
        match self {
            BaseRing::Integers => {
                let (g, s, t) = int_xgcd(&a.re.to_integer(), &b.re.to_integer());
                (Elem::from_bigint(g), Elem::from_bigint(s), Elem::from_bigint(t))
            }
            BaseRing::Rationals => {
                if !a.is_zero() {
                    (Elem::one(), a.inv().unwrap(), Elem::zero())
                } else {
                    (Elem::one(), Elem::zero(), b.inv().unwrap())
                }
            }
            BaseRing::LocalizedIntegers { .. } => {
                let (a0, ua) = self.normalize(a);
                let (b0, ub) = self.normalize(b);
                let (g, s, t) = int_xgcd(&a0.re.to_integer(), &b0.re.to_integer());
                // a = ua * a0, so s*a0 = (s/ua)*a
                let s = if a.is_zero() { Elem::zero() } else { Elem::from_bigint(s).div_field(&ua).unwrap() };
                let t = if b.is_zero() { Elem::zero() } else { Elem::from_bigint(t).div_field(&ub).unwrap() };
                (Elem::from_bigint(g), s, t)
            }
            BaseRing::GaussianIntegers => {
                let (g, s, t) = gauss_xgcd(a, b);
                let (g0, u) = self.normalize(&g);
                let uinv = u.inv().unwrap();
                (g0, &s * &uinv, &t * &uinv)
            }
        }
    }

    /// A small representative of `x` modulo `p`; `x - r` is divisible by `p`.
    ///
    /// `p` is expected in canonical form (see [`BaseRing::normalize`]).
    pub fn reduce_mod(&self, x: &Elem, p: &Elem) -> Elem {
        if p.is_zero() || x.is_zero() {
            return x.clone();
        }
        match self {
            BaseRing::Integers => Elem::from_bigint(x.re.to_integer().mod_floor(&p.re.to_integer())),
            BaseRing::Rationals => Elem::zero(),
            BaseRing::LocalizedIntegers { .. } => {
                let m = p.re.to_integer();
                if m.is_one() {
                    return Elem::zero();
                }
                // the denominator is a unit, hence invertible modulo m
                let (g, inv, _) = int_xgcd(x.re.denom(), &m);
                debug_assert!(g.is_one());
                Elem::from_bigint((x.re.numer() * inv).mod_floor(&m))
            }
            BaseRing::GaussianIntegers => gauss_divrem(x, p).1,
        }
    }

    /// A size function used to pick small pivots; it is compatible with
    /// divisibility in the sense that proper divisors have smaller size.
    pub fn size(&self, x: &Elem) -> BigInt {
        if x.is_zero() {
            return BigInt::zero();
        }
        match self {
            BaseRing::Integers => x.re.numer().abs(),
            BaseRing::Rationals => BigInt::one(),
            BaseRing::LocalizedIntegers { primes } => strip_primes(x.re.numer(), primes).abs(),
            BaseRing::GaussianIntegers => x.norm().to_integer(),
        }
    }

    /// A positive rational integer `d` such that `d * x` lies in the ring.
    pub fn clearing_denominator(&self, x: &Elem) -> BigInt {
        match self {
            BaseRing::Rationals => BigInt::one(),
            BaseRing::LocalizedIntegers { primes } => strip_primes(&x.denominator(), primes).abs(),
            _ => x.denominator(),
        }
    }

    /// Primes that become units in this ring (ℤ[1/n] only).
    pub fn inverted_primes(&self) -> &[u64] {
        match self {
            BaseRing::LocalizedIntegers { primes } => primes,
            _ => &[],
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Integers => write!(f, "Z"),
            BaseRing::Rationals => write!(f, "Q"),
            BaseRing::LocalizedIntegers { primes } => {
                let n: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{}]", n.join(","))
            }
            BaseRing::GaussianIntegers => write!(f, "Z[i]"),
        }
    }
}

impl FromStr for BaseRing {
    type Err = GkError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Z" | "ZZ" | "integers" => return Ok(BaseRing::Integers),
            "Q" | "QQ" | "rationals" => return Ok(BaseRing::Rationals),
            "Z[i]" | "gaussian" => return Ok(BaseRing::GaussianIntegers),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("Z[1/").and_then(|r| r.strip_suffix(']')) {
            let primes = inner
                .split(',')
                .map(|p| p.trim().parse::<u64>().map_err(|_| GkError::Parse(format!("invalid ring `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            return BaseRing::localized(&primes);
        }
        Err(GkError::Parse(format!("unknown ring `{s}`")))
    }
}

impl Serialize for BaseRing {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BaseRing {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A homomorphism `k -> k'` between supported rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingMap {
    source: BaseRing,
    target: BaseRing,
    is_flat: bool,
    is_finite_projective: bool,
    rank_if_finite: usize,
}

impl RingMap {
    /// Builds one of the supported maps: identities, ℤ→ℚ, ℤ→ℤ[1/n],
    /// ℤ[1/n]→ℚ, ℤ[1/n]→ℤ[1/m] for n | m, and ℤ→ℤ[i].
    pub fn new(source: BaseRing, target: BaseRing) -> Result<Self> {
        use BaseRing::*;
        let (flat, fp, rank) = match (&source, &target) {
            (a, b) if a == b => (true, true, 1),
            (Integers, Rationals) => (true, false, 0),
            (Integers, LocalizedIntegers { .. }) => (true, false, 0),
            (LocalizedIntegers { .. }, Rationals) => (true, false, 0),
            (LocalizedIntegers { primes: p }, LocalizedIntegers { primes: q }) if p.iter().all(|x| q.contains(x)) => {
                (true, false, 0)
            }
            (Integers, GaussianIntegers) => (true, true, 2),
            _ => {
                return Err(GkError::UnsupportedRingMap(format!("{source} -> {target}")));
            }
        };
        Ok(RingMap { source, target, is_flat: flat, is_finite_projective: fp, rank_if_finite: rank })
    }

    pub fn identity(ring: BaseRing) -> Self {
        RingMap::new(ring.clone(), ring).expect("identity is supported")
    }

    pub fn source(&self) -> &BaseRing {
        &self.source
    }

    pub fn target(&self) -> &BaseRing {
        &self.target
    }

    pub fn is_flat(&self) -> bool {
        self.is_flat
    }

    pub fn is_finite_projective(&self) -> bool {
        self.is_finite_projective
    }

    pub fn rank_if_finite(&self) -> usize {
        self.rank_if_finite
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    /// Image of a source element. All supported maps are inclusions in ℚ(i).
    pub fn apply(&self, x: &Elem) -> Result<Elem> {
        if !self.source.contains(x) {
            return Err(GkError::Domain(format!("{x} is not an element of {}", self.source)));
        }
        Ok(x.clone())
    }

    /// A `k`-basis of `k'` when `k'` is finite free over `k`.
    pub fn module_basis(&self) -> Option<Vec<Elem>> {
        if !self.is_finite_projective {
            return None;
        }
        match self.rank_if_finite {
            1 => Some(vec![Elem::one()]),
            2 => Some(vec![Elem::one(), Elem::i()]),
            _ => None,
        }
    }

    /// Composite `other ∘ self`.
    pub fn then(&self, other: &RingMap) -> Result<RingMap> {
        if self.target != other.source {
            return Err(GkError::Domain("ring maps do not compose".into()));
        }
        RingMap::new(self.source.clone(), other.target.clone())
    }
}

impl fmt::Display for RingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

fn is_smooth(n: &BigInt, primes: &[u64]) -> bool {
    strip_primes(n, primes).abs().is_one()
}

/// Removes every factor of the given primes from `n`.
fn strip_primes(n: &BigInt, primes: &[u64]) -> BigInt {
    let mut m = n.clone();
    if m.is_zero() {
        return m;
    }
    for &p in primes {
        let p = BigInt::from(p);
        while (&m % &p).is_zero() {
            m /= &p;
        }
    }
    m
}

/// Extended Euclid over ℤ with a nonnegative gcd.
fn int_xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn round_rational(r: &BigRational) -> BigInt {
    // nearest integer, ties toward +infinity
    (r + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

fn gauss_divrem(a: &Elem, b: &Elem) -> (Elem, Elem) {
    let q = a.div_field(b).expect("nonzero divisor");
    let q = Elem::from_parts(
        BigRational::from_integer(round_rational(q.re())),
        BigRational::from_integer(round_rational(q.im())),
    );
    let r = a - &(&q * b);
    (q, r)
}

fn gauss_xgcd(a: &Elem, b: &Elem) -> (Elem, Elem, Elem) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Elem::one(), Elem::zero());
    let (mut t0, mut t1) = (Elem::zero(), Elem::one());
    while !r1.is_zero() {
        let (q, r2) = gauss_divrem(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &(&q * &s1);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &(&q * &t1);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3", "-7", "1/2", "i", "-i", "2i", "1+2i", "3-i", "-1/2+3/4i"] {
            let e: Elem = s.parse().unwrap();
            assert_eq!(e.to_string(), s, "{s}");
        }
        assert!("1/0".parse::<Elem>().is_err());
        assert!("x".parse::<Elem>().is_err());
    }

    #[test]
    fn ring_parse() {
        assert_eq!("Z".parse::<BaseRing>().unwrap(), BaseRing::Integers);
        assert_eq!("Z[1/3,2]".parse::<BaseRing>().unwrap(), BaseRing::LocalizedIntegers { primes: vec![2, 3] });
        assert!("Z[1/4]".parse::<BaseRing>().is_err());
        assert_eq!("Z[i]".parse::<BaseRing>().unwrap().to_string(), "Z[i]");
    }

    #[test]
    fn membership_and_units() {
        let half = Elem::from_ratio(1, 2);
        let z2 = BaseRing::localized(&[2]).unwrap();
        assert!(!BaseRing::Integers.contains(&half));
        assert!(z2.contains(&half));
        assert!(!z2.contains(&Elem::from_ratio(1, 3)));
        assert!(z2.is_unit(&Elem::from_int(8)));
        assert!(!z2.is_unit(&Elem::from_int(6)));
        assert!(BaseRing::GaussianIntegers.is_unit(&Elem::i()));
        assert!(!BaseRing::GaussianIntegers.is_unit(&Elem::from_int(2)));
        assert!(BaseRing::Rationals.is_unit(&Elem::from_int(2)));
    }

    #[test]
    fn normalization() {
        let z2 = BaseRing::localized(&[2]).unwrap();
        assert_eq!(z2.canonical(&Elem::from_ratio(-12, 5)), Elem::from_int(3));
        let zi = BaseRing::GaussianIntegers;
        let (a, u) = zi.normalize(&Elem::gaussian(-1, 1));
        assert_eq!(a, Elem::gaussian(1, 1));
        assert_eq!(&u * &a, Elem::gaussian(-1, 1));
    }

    #[test]
    fn bezout_identities() {
        let cases: Vec<(BaseRing, Elem, Elem)> = vec![
            (BaseRing::Integers, Elem::from_int(12), Elem::from_int(-18)),
            (BaseRing::Rationals, Elem::from_int(0), Elem::from_ratio(3, 7)),
            (BaseRing::localized(&[2]).unwrap(), Elem::from_int(12), Elem::from_ratio(9, 4)),
            (BaseRing::GaussianIntegers, Elem::gaussian(3, 1), Elem::gaussian(2, 0)),
        ];
        for (ring, a, b) in cases {
            let (g, s, t) = ring.xgcd(&a, &b);
            assert_eq!(&(&s * &a) + &(&t * &b), g, "{ring}");
            assert!(ring.divides(&g, &a) && ring.divides(&g, &b), "{ring}");
            assert!(ring.contains(&s) && ring.contains(&t));
        }
        let (g, _, _) = BaseRing::localized(&[2]).unwrap().xgcd(&Elem::from_int(12), &Elem::from_ratio(9, 4));
        assert_eq!(g, Elem::from_int(3));
    }

    #[test]
    fn supported_maps() {
        assert!(RingMap::new(BaseRing::Integers, BaseRing::Rationals).unwrap().is_flat());
        let zi = RingMap::new(BaseRing::Integers, BaseRing::GaussianIntegers).unwrap();
        assert!(zi.is_finite_projective());
        assert_eq!(zi.rank_if_finite(), 2);
        assert!(RingMap::new(BaseRing::Rationals, BaseRing::Integers).is_err());
        assert!(RingMap::new(BaseRing::GaussianIntegers, BaseRing::Rationals).is_err());
        let f = RingMap::new(BaseRing::Integers, BaseRing::localized(&[2]).unwrap()).unwrap();
        assert!(f.apply(&Elem::from_ratio(1, 2)).is_err());
    }
}
