//! Exact arithmetic in `Q` and in real quadratic fields `Q(sqrt m)`.
//!
//! Elements are stored in coordinates on the integral basis `(1, w)` where
//! `w = (1 + sqrt m)/2` when `m = 1 mod 4` and `w = sqrt m` otherwise, so
//! `w = (t + sqrt D)/2` with `t = D mod 2`. The two real embeddings are
//! numbered once per field: `tau_1(sqrt D) = +sqrt D`, `tau_2(sqrt D) = -sqrt D`
//! unless the field was built with [`FieldSpec::with_swapped_embeddings`].
//!
//! Real numbers that arise as embeddings (determinants, perturbation vectors,
//! derivation eigenvalues) are represented as abstract field elements read
//! through the *canonical* real embedding `sqrt D > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Exact sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_i64(x: i64) -> Sign {
        match x.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn of_rational(x: &BigRational) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        match self.as_i64() * other.as_i64() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// Sign of `p + q sqrt(d)` for a non-square `d > 0`, decided rationally.
pub fn surd_sign(p: &BigRational, q: &BigRational, d: i64) -> Sign {
    let sp = Sign::of_rational(p);
    let sq = Sign::of_rational(q);
    if sq == Sign::Zero {
        return sp;
    }
    if sp == Sign::Zero || sp == sq {
        return sq;
    }
    let lhs = p * p;
    let rhs = q * q * BigRational::from_integer(BigInt::from(d));
    if lhs > rhs {
        sp
    } else {
        sq
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A totally real field of degree 1 or 2 with a fixed numbering of its real embeddings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    degree: usize,
    m: i64,
    disc: i64,
    /// `w^2 = t w - n`
    t: i64,
    n: i64,
    swapped: bool,
}

impl FieldSpec {
    pub fn rational() -> FieldSpec {
        FieldSpec {
            degree: 1,
            m: 1,
            disc: 1,
            t: 0,
            n: 0,
            swapped: false,
        }
    }

    /// Real quadratic field of fundamental discriminant `disc`.
    pub fn real_quadratic(disc: i64) -> Result<FieldSpec> {
        let m = if disc.rem_euclid(4) == 1 {
            disc
        } else if disc.rem_euclid(4) == 0 && matches!((disc / 4).rem_euclid(4), 2 | 3) {
            disc / 4
        } else {
            return Err(Error::NotFundamentalDiscriminant(disc));
        };
        if disc <= 1 || !arith::is_squarefree(m) || m <= 1 {
            return Err(Error::NotFundamentalDiscriminant(disc));
        }
        let (t, n) = if m.rem_euclid(4) == 1 { (1, (1 - m) / 4) } else { (0, -m) };
        Ok(FieldSpec {
            degree: 2,
            m,
            disc,
            t,
            n,
            swapped: false,
        })
    }

    /// Real quadratic field `Q(sqrt m)` for squarefree `m > 1`.
    pub fn from_squarefree(m: i64) -> Result<FieldSpec> {
        if m <= 1 || !arith::is_squarefree(m) {
            return Err(Error::InvalidElement(format!("{m} is not a squarefree integer > 1")));
        }
        let disc = if m.rem_euclid(4) == 1 { m } else { 4 * m };
        Self::real_quadratic(disc)
    }

    /// Fields of degree above two are not implemented.
    pub fn of_degree(degree: usize, disc: i64) -> Result<FieldSpec> {
        match degree {
            1 => Ok(Self::rational()),
            2 => Self::real_quadratic(disc),
            g => Err(Error::UnsupportedDegree(g)),
        }
    }

    /// The same field with `tau_1` and `tau_2` exchanged.
    pub fn with_swapped_embeddings(&self) -> FieldSpec {
        let mut f = self.clone();
        if f.degree == 2 {
            f.swapped = !f.swapped;
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn squarefree_part(&self) -> i64 {
        self.m
    }

    pub fn embeddings_swapped(&self) -> bool {
        self.swapped
    }

    /// `(t, n)` with `w^2 = t w - n`.
    pub fn omega_poly(&self) -> (i64, i64) {
        (self.t, self.n)
    }

    /// `+1` or `-1`: the sign that `tau_i` puts on `sqrt D`.
    pub fn embedding_sign(&self, i: usize) -> i64 {
        assert!(i < self.degree, "embedding index out of range");
        let s = if i == 0 { 1 } else { -1 };
        if self.swapped {
            -s
        } else {
            s
        }
    }

    /// Narrow class number one, for the fields the Hecke pipeline supports.
    pub fn has_narrow_class_number_one(&self) -> bool {
        self.degree == 1 || matches!(self.disc, 5 | 8 | 13)
    }

    pub fn label(&self) -> String {
        if self.degree == 1 {
            "Q".to_string()
        } else {
            format!("Q(sqrt {})", self.m)
        }
    }

    // ----- element arithmetic -------------------------------------------

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        if self.degree == 1 {
            return FieldElement::rational(&x.a * &y.a);
        }
        let bb = &x.b * &y.b;
        FieldElement {
            a: &x.a * &y.a - &bb * rat(self.n),
            b: &x.a * &y.b + &x.b * &y.a + bb * rat(self.t),
        }
    }

    pub fn conjugate(&self, x: &FieldElement) -> FieldElement {
        if self.degree == 1 {
            return x.clone();
        }
        FieldElement {
            a: &x.a + &x.b * rat(self.t),
            b: -&x.b,
        }
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        if self.degree == 1 {
            return x.a.clone();
        }
        &x.a * &x.a + &x.a * &x.b * rat(self.t) + &x.b * &x.b * rat(self.n)
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        if self.degree == 1 {
            return x.a.clone();
        }
        &x.a * rat(2) + &x.b * rat(self.t)
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement> {
        let nrm = self.norm(x);
        if nrm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conjugate(x).scale(&nrm.recip()))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inverse(y)?))
    }

    /// `tau_i(x)` as an abstract element read through the canonical embedding.
    pub fn embed_abstract(&self, x: &FieldElement, i: usize) -> FieldElement {
        if self.degree == 1 || self.embedding_sign(i) == 1 {
            x.clone()
        } else {
            self.conjugate(x)
        }
    }

    /// `(p, q)` with `tau_i(x) = p + q sqrt D`.
    pub fn surd_parts(&self, x: &FieldElement, i: usize) -> (BigRational, BigRational) {
        if self.degree == 1 {
            return (x.a.clone(), BigRational::zero());
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let p = &x.a + &x.b * rat(self.t) * &half;
        let q = &x.b * &half * rat(self.embedding_sign(i));
        (p, q)
    }

    /// Exact sign of `tau_i(x)`.
    pub fn sign_at(&self, x: &FieldElement, i: usize) -> Sign {
        let (p, q) = self.surd_parts(x, i);
        if self.degree == 1 {
            return Sign::of_rational(&p);
        }
        surd_sign(&p, &q, self.disc)
    }

    /// Sign under the canonical real embedding `sqrt D > 0`.
    pub fn canonical_sign(&self, x: &FieldElement) -> Sign {
        if self.degree == 1 {
            return Sign::of_rational(&x.a);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let p = &x.a + &x.b * rat(self.t) * &half;
        let q = &x.b * &half;
        surd_sign(&p, &q, self.disc)
    }

    pub fn approx(&self, x: &FieldElement, i: usize) -> f64 {
        let (p, q) = self.surd_parts(x, i);
        let pf = p.to_f64().unwrap_or(f64::NAN);
        let qf = q.to_f64().unwrap_or(f64::NAN);
        pf + qf * (self.disc as f64).sqrt()
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> bool {
        (0..self.degree).all(|i| self.sign_at(x, i) == Sign::Positive)
    }

    pub fn is_integral(&self, x: &FieldElement) -> bool {
        x.a.is_integer() && x.b.is_integer()
    }

    // ----- integral elements --------------------------------------------

    pub fn mul_int(&self, x: &IntegralElement, y: &IntegralElement) -> IntegralElement {
        if self.degree == 1 {
            return IntegralElement::new(x.a * y.a, 0);
        }
        let bb = x.b * y.b;
        IntegralElement::new(x.a * y.a - bb * self.n, x.a * y.b + x.b * y.a + bb * self.t)
    }

    pub fn conjugate_int(&self, x: &IntegralElement) -> IntegralElement {
        if self.degree == 1 {
            return *x;
        }
        IntegralElement::new(x.a + x.b * self.t, -x.b)
    }

    pub fn norm_int(&self, x: &IntegralElement) -> i64 {
        if self.degree == 1 {
            return x.a;
        }
        x.a * x.a + x.a * x.b * self.t + x.b * x.b * self.n
    }

    pub fn trace_int(&self, x: &IntegralElement) -> i64 {
        if self.degree == 1 {
            return x.a;
        }
        2 * x.a + x.b * self.t
    }

    pub fn pow_int(&self, x: &IntegralElement, e: u32) -> IntegralElement {
        let mut acc = self.one_int();
        for _ in 0..e {
            acc = self.mul_int(&acc, x);
        }
        acc
    }

    pub fn one_int(&self) -> IntegralElement {
        IntegralElement::new(1, 0)
    }

    pub fn int_sign_at(&self, x: &IntegralElement, i: usize) -> Sign {
        if self.degree == 1 {
            return Sign::of_i64(x.a);
        }
        // 2 tau_i(x) = (2a + b t) + s b sqrt D
        let p = 2 * x.a + x.b * self.t;
        let q = x.b * self.embedding_sign(i);
        let sp = Sign::of_i64(p);
        let sq = Sign::of_i64(q);
        if sq == Sign::Zero {
            return sp;
        }
        if sp == Sign::Zero || sp == sq {
            return sq;
        }
        let lhs = (p as i128) * (p as i128);
        let rhs = (q as i128) * (q as i128) * self.disc as i128;
        if lhs > rhs {
            sp
        } else {
            sq
        }
    }

    pub fn is_totally_positive_int(&self, x: &IntegralElement) -> bool {
        (0..self.degree).all(|i| self.int_sign_at(x, i) == Sign::Positive)
    }

    /// Primitive in the sense of `O_{F+}`: not an integer multiple `N > 1`
    /// of another totally positive integer.
    pub fn is_primitive(&self, x: &IntegralElement) -> Result<bool> {
        if !self.is_totally_positive_int(x) {
            return Err(Error::InvalidElement(format!("{x} is not totally positive")));
        }
        Ok(x.content() == 1)
    }

    pub fn is_primitive_element(&self, x: &FieldElement) -> Result<bool> {
        let xi = x
            .to_integral()
            .ok_or_else(|| Error::InvalidElement(format!("{x} is not integral")))?;
        self.is_primitive(&xi)
    }

    /// Matrix of multiplication by `x` on the integral basis (columns are `x*1`, `x*w`).
    pub fn mul_matrix(&self, x: &IntegralElement) -> crate::intmat::IMat {
        if self.degree == 1 {
            return crate::intmat::IMat::from_rows(&[vec![x.a]]);
        }
        let c0 = self.mul_int(x, &IntegralElement::new(1, 0));
        let c1 = self.mul_int(x, &IntegralElement::new(0, 1));
        crate::intmat::IMat::from_columns(&[vec![c0.a, c0.b], vec![c1.a, c1.b]])
    }

    /// Inverse of a unit of `O_F`.
    pub fn unit_inverse(&self, u: &IntegralElement) -> Result<IntegralElement> {
        match self.norm_int(u) {
            1 => Ok(self.conjugate_int(u)),
            -1 => Ok(-self.conjugate_int(u)),
            _ => Err(Error::InvalidElement(format!("{u} is not a unit"))),
        }
    }

    /// Generator `eps` of the group of totally positive units, with `eps > 1`
    /// under the canonical embedding.
    pub fn fundamental_totally_positive_unit(&self) -> Result<IntegralElement> {
        if self.degree != 2 {
            return Err(Error::Unsupported(
                "the totally positive unit group of Q is trivial".into(),
            ));
        }
        let eps0 = self.fundamental_unit()?;
        let eps = if self.norm_int(&eps0) == 1 {
            eps0
        } else {
            self.mul_int(&eps0, &eps0)
        };
        debug_assert_eq!(self.norm_int(&eps), 1);
        Ok(eps)
    }

    /// Fundamental unit `eps0 = p + q w > 1` from the continued fraction of `-conj(w)`.
    pub fn fundamental_unit(&self) -> Result<IntegralElement> {
        if self.degree != 2 {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        let d = self.disc;
        // x = (P + sqrt d)/Q with P = -t, Q = 2 is -conj(w) = (sqrt D - t)/2.
        let root = arith::isqrt(d);
        let (mut p_cf, mut q_cf) = (-self.t, 2i64);
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        for _ in 0..10_000 {
            let a = if q_cf > 0 {
                (p_cf + root).div_euclid(q_cf)
            } else {
                -(p_cf + root).div_euclid(-q_cf) - 1
            };
            let h_next = BigInt::from(a) * &h + &h_prev;
            let k_next = BigInt::from(a) * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            if k.is_positive() {
                let nrm = &h * &h + &h * &k * BigInt::from(self.t) + &k * &k * BigInt::from(self.n);
                if nrm.abs().is_one() {
                    let p = h.to_i64();
                    let q = k.to_i64();
                    return match (p, q) {
                        (Some(p), Some(q)) => Ok(IntegralElement::new(p, q)),
                        _ => Err(Error::Unsupported(format!(
                            "fundamental unit of discriminant {d} exceeds 64-bit coordinates"
                        ))),
                    };
                }
            }
            p_cf = a * q_cf - p_cf;
            q_cf = (d - p_cf * p_cf) / q_cf;
        }
        Err(Error::Unsupported(format!("no unit found for discriminant {d}")))
    }

    /// Z-basis of the inverse different `(1/sqrt D) O_F`.
    pub fn inverse_different_basis(&self) -> Vec<FieldElement> {
        if self.degree == 1 {
            return vec![FieldElement::from_i64(1, 0)];
        }
        let d = self.disc;
        vec![
            FieldElement::new(BigRational::new((-self.t).into(), d.into()), BigRational::new(2.into(), d.into())),
            FieldElement::new(
                BigRational::new((-2 * self.n).into(), d.into()),
                BigRational::new(self.t.into(), d.into()),
            ),
        ]
    }

    /// Parses `a`, `w`, `a+b*w`, `a-b*w`, `b*w+a`; rational coefficients allowed.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let x: FieldElement = s.parse()?;
        if self.degree == 1 && !x.b.is_zero() {
            return Err(Error::Parse(format!("'{s}' uses w but the field is Q")));
        }
        Ok(x)
    }

    pub fn parse_integral(&self, s: &str) -> Result<IntegralElement> {
        self.parse_element(s)?
            .to_integral()
            .ok_or_else(|| Error::Parse(format!("'{s}' is not an algebraic integer")))
    }
}

/// Element `a + b w` of `F` with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FieldElement {
    pub a: BigRational,
    pub b: BigRational,
}

impl FieldElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        FieldElement { a, b }
    }

    pub fn from_i64(a: i64, b: i64) -> Self {
        FieldElement { a: rat(a), b: rat(b) }
    }

    pub fn rational(a: BigRational) -> Self {
        FieldElement { a, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0)
    }

    pub fn one() -> Self {
        Self::from_i64(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        FieldElement {
            a: &self.a * c,
            b: &self.b * c,
        }
    }

    pub fn to_integral(&self) -> Option<IntegralElement> {
        if !self.a.is_integer() || !self.b.is_integer() {
            return None;
        }
        Some(IntegralElement::new(self.a.to_integer().to_i64()?, self.b.to_integer().to_i64()?))
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl From<IntegralElement> for FieldElement {
    fn from(x: IntegralElement) -> Self {
        FieldElement::from_i64(x.a, x.b)
    }
}

fn fmt_coords(f: &mut fmt::Formatter<'_>, a: &dyn fmt::Display, b: &dyn fmt::Display, a_zero: bool, b_zero: bool, b_neg: bool) -> fmt::Result {
    match (a_zero, b_zero) {
        (_, true) => write!(f, "{a}"),
        (true, false) => write!(f, "{b}*w"),
        (false, false) => {
            if b_neg {
                write!(f, "{a}{b}*w")
            } else {
                write!(f, "{a}+{b}*w")
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coords(f, &self.a, &self.b, self.a.is_zero(), self.b.is_zero(), self.b.is_negative())
    }
}

impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coef, is_w) = if body == "w" {
                ("1", true)
            } else if let Some(c) = body.strip_suffix("*w") {
                (c, true)
            } else if let Some(c) = body.strip_suffix('w') {
                (c, true)
            } else {
                (body, false)
            };
            let mut value: BigRational = coef
                .parse()
                .map_err(|_| Error::Parse(format!("cannot parse coefficient '{coef}' in '{s}'")))?;
            if neg {
                value = -value;
            }
            if is_w {
                b += value;
            } else {
                a += value;
            }
        }
        Ok(FieldElement { a, b })
    }
}

/// Element `a + b w` of `O_F`; also serves as an exponent `t^alpha`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct IntegralElement {
    pub a: i64,
    pub b: i64,
}

impl IntegralElement {
    pub const fn new(a: i64, b: i64) -> Self {
        IntegralElement { a, b }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn coords(&self, degree: usize) -> Vec<i64> {
        if degree == 1 {
            vec![self.a]
        } else {
            vec![self.a, self.b]
        }
    }

    pub fn from_coords(c: &[i64]) -> Self {
        match c {
            [a] => Self::new(*a, 0),
            [a, b] => Self::new(*a, *b),
            _ => panic!("coordinate vector of unsupported length {}", c.len()),
        }
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> i64 {
        arith::gcd(self.a, self.b).abs()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.a * k, self.b * k)
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c <= 1 {
            *self
        } else {
            Self::new(self.a / c, self.b / c)
        }
    }
}

impl Add for IntegralElement {
    type Output = IntegralElement;
    fn add(self, o: IntegralElement) -> IntegralElement {
        IntegralElement::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for IntegralElement {
    type Output = IntegralElement;
    fn sub(self, o: IntegralElement) -> IntegralElement {
        IntegralElement::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for IntegralElement {
    type Output = IntegralElement;
    fn neg(self) -> IntegralElement {
        IntegralElement::new(-self.a, -self.b)
    }
}

impl Mul<i64> for IntegralElement {
    type Output = IntegralElement;
    fn mul(self, k: i64) -> IntegralElement {
        self.scale(k)
    }
}

impl fmt::Display for IntegralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coords(f, &self.a, &self.b, self.a == 0, self.b == 0, self.b < 0)
    }
}
