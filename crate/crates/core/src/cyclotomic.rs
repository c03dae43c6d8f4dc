//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! A [`CycNumber`] is a dense vector of `phi(N)` rationals on the power basis
//! `1, z, ..., z^{phi(N)-1}` with `z = zeta_N = exp(2 pi i/N)`. Operations on
//! numbers of different levels lift both to the lcm level first. Reduction
//! modulo `Phi_N` goes through a per-level table of `z^j mod Phi_N`,
//! `0 <= j < N`, cached process-wide.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

struct Context {
    phi: usize,
    /// `reduce[j]` is the sparse coordinate vector of `z^j mod Phi_n`.
    reduce: Vec<Vec<(usize, i64)>>,
}

fn cyclotomic_poly_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn context_cache() -> &'static Mutex<HashMap<u64, Arc<Context>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Context>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the `n`-th cyclotomic polynomial,
/// by exact division of `x^n - 1` by `Phi_d` for the proper divisors `d`.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1);
    if let Some(p) = cyclotomic_poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in arith::divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_polynomial(d);
        num = poly_divide_exact(&num, &den);
    }
    let p = Arc::new(num);
    cyclotomic_poly_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    debug_assert!(lead == 1);
    let qlen = rem.len() - dd;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd] / lead;
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    q
}

fn context(n: u64) -> Arc<Context> {
    if let Some(c) = context_cache().lock().unwrap().get(&n) {
        return c.clone();
    }
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut reduce = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for j in 0..n as usize {
        if j > 0 {
            // multiply by z, then replace z^phi by -(Phi - z^phi)
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * phi_poly[i];
                }
            }
        }
        reduce.push(
            cur.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect(),
        );
    }
    let ctx = Arc::new(Context { phi, reduce });
    context_cache().lock().unwrap().insert(n, ctx.clone());
    ctx
}

/// Euler phi of the level, i.e. the dimension of `Q(zeta_N)` over `Q`.
pub fn field_degree(n: u64) -> usize {
    context(n).phi
}

/// Canonical level of the field `Q(zeta_n)`: `n/2` when `n = 2 mod 4`.
pub fn canonical_level(n: u64) -> u64 {
    if n % 4 == 2 {
        n / 2
    } else {
        n
    }
}

/// Accumulates `sum c_j z^j` with exponents taken modulo the level and
/// reduces modulo `Phi_N` once at the end.
#[derive(Clone, Debug)]
pub struct CycAccumulator {
    level: u64,
    raw: Vec<BigRational>,
}

impl CycAccumulator {
    pub fn new(level: u64) -> Self {
        CycAccumulator {
            level,
            raw: vec![BigRational::zero(); level as usize],
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn add_term(&mut self, exponent: i64, coeff: &BigRational) {
        if coeff.is_zero() {
            return;
        }
        let j = exponent.rem_euclid(self.level as i64) as usize;
        self.raw[j] += coeff;
    }

    /// Adds `coeff * z^shift * x` where `x` has level dividing this level.
    pub fn add_scaled(&mut self, x: &CycNumber, shift: i64, coeff: &BigRational) {
        assert!(self.level % x.level == 0, "accumulator level must be a multiple");
        let step = (self.level / x.level) as i64;
        for (i, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                self.add_term(i as i64 * step + shift, &(c * coeff));
            }
        }
    }

    pub fn finish(self) -> CycNumber {
        let ctx = context(self.level);
        let mut out = vec![BigRational::zero(); ctx.phi];
        for (j, c) in self.raw.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < ctx.phi {
                out[j] += c;
            } else {
                for &(i, m) in &ctx.reduce[j] {
                    out[i] += &c * BigInt::from(m);
                }
            }
        }
        CycNumber {
            level: self.level,
            coeffs: out,
        }
    }
}

/// Element of `Q(zeta_N)` in power-basis coordinates.
#[derive(Clone, Debug)]
pub struct CycNumber {
    level: u64,
    coeffs: Vec<BigRational>,
}

impl CycNumber {
    pub fn zero(level: u64) -> Self {
        CycNumber {
            level,
            coeffs: vec![BigRational::zero(); field_degree(level)],
        }
    }

    pub fn from_rational(level: u64, r: BigRational) -> Self {
        let mut x = Self::zero(level);
        x.coeffs[0] = r;
        x
    }

    pub fn from_i64(level: u64, r: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(r.into()))
    }

    pub fn one(level: u64) -> Self {
        Self::from_i64(level, 1)
    }

    /// `zeta_N^e`.
    pub fn root_of_unity(level: u64, e: i64) -> Self {
        let mut acc = CycAccumulator::new(level);
        acc.add_term(e, &BigRational::one());
        acc.finish()
    }

    /// Builds a number from power-basis coordinates; the vector must have length `phi(level)`.
    pub fn from_coeffs(level: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        if level == 0 || coeffs.len() != field_degree(level) {
            return Err(Error::LevelMismatch(format!(
                "level {level} needs {} coefficients, got {}",
                if level == 0 { 0 } else { field_degree(level) },
                coeffs.len()
            )));
        }
        Ok(CycNumber { level, coeffs })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the number at level `m`, a multiple of the current level.
    pub fn lift(&self, m: u64) -> Self {
        if m == self.level {
            return self.clone();
        }
        assert!(m % self.level == 0, "cannot lift level {} to {m}", self.level);
        let mut acc = CycAccumulator::new(m);
        acc.add_scaled(self, 0, &BigRational::one());
        acc.finish()
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = arith::lcm(self.level, other.level);
        (self.lift(m), other.lift(m))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycNumber {
            level: self.level,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies by `zeta_N^e` where `N` is the current level.
    pub fn mul_root(&self, e: i64) -> Self {
        let mut acc = CycAccumulator::new(self.level);
        acc.add_scaled(self, e, &BigRational::one());
        acc.finish()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.level, r.recip()));
        }
        // Solve x * y = 1 as a linear system in the coordinates of y.
        let phi = self.coeffs.len();
        let mut cols = Vec::with_capacity(phi);
        for i in 0..phi {
            cols.push(self.mul_root(i as i64).coeffs);
        }
        let mut rhs = vec![BigRational::zero(); phi];
        rhs[0] = BigRational::one();
        let y = solve_columns(&cols, &rhs).ok_or(Error::DivisionByZero)?;
        Ok(CycNumber {
            level: self.level,
            coeffs: y,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.level);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The automorphism `zeta_N -> zeta_N^j`.
    pub fn galois_apply(&self, j: i64) -> Result<Self> {
        let n = self.level;
        if arith::gcd(j, n as i64) != 1 {
            return Err(Error::NotCoprime { j, level: n });
        }
        let mut acc = CycAccumulator::new(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc.add_term(i as i64 * j, c);
            }
        }
        Ok(acc.finish())
    }

    /// Rewrites the number at level `n`, failing if it does not lie in `Q(zeta_n)`.
    /// The result carries the canonical level of `Q(zeta_n)`.
    pub fn restrict_to_subfield(&self, n: u64) -> Result<Self> {
        let big = arith::lcm(self.level, n);
        let x = self.lift(big);
        let target = canonical_level(n);
        if target == big {
            return Ok(x);
        }
        // Fixed by Gal(Q(zeta_big)/Q(zeta_n))?
        for j in 1..big as i64 {
            if j % n as i64 == 1 % n as i64 && arith::gcd(j, big as i64) == 1 && j != 1 {
                if x.galois_apply(j)? != x {
                    return Err(Error::NotInSubfield(n));
                }
            }
        }
        let phi_t = field_degree(target);
        let step = (big / target) as i64;
        let cols: Vec<Vec<BigRational>> = (0..phi_t)
            .map(|i| CycNumber::root_of_unity(big, i as i64 * step).coeffs)
            .collect();
        let y = solve_columns(&cols, &x.coeffs).ok_or(Error::NotInSubfield(n))?;
        Ok(CycNumber {
            level: target,
            coeffs: y,
        })
    }

    /// The same number at the smallest canonical level that contains it.
    pub fn simplify(&self) -> Self {
        for d in arith::divisors(self.level) {
            if d % 4 == 2 {
                continue;
            }
            if let Ok(y) = self.restrict_to_subfield(d) {
                return y;
            }
        }
        self.clone()
    }

    pub fn to_json_value(&self) -> CycJson {
        CycJson {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json_value(j: &CycJson) -> Result<Self> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| {
                s.parse::<BigRational>()
                    .map_err(|_| Error::Parse(format!("bad rational '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(j.level, coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CycJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&j)
    }

    /// Floating-point value under `zeta_N = exp(2 pi i/N)`; for display only.
    pub fn approx(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * i as f64 / self.level as f64;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }
}

/// Serialized form `{"level": N, "coeffs": ["p/q", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycJson {
    pub level: u64,
    pub coeffs: Vec<String>,
}

/// Solves `sum_i y_i cols[i] = rhs` exactly; `None` if inconsistent or singular.
fn solve_columns(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = cols.len();
    let m = rhs.len();
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(k);
    for col in 0..k {
        let Some(p) = (pivot_row..m).find(|&r| !a[r][col].is_zero()) else {
            return None;
        };
        a.swap(pivot_row, p);
        let inv = a[pivot_row][col].recip();
        for x in a[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let prow = a[pivot_row].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if a[pivot_row..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| a[r][k].clone()).collect())
}

/// The quadratic Gauss sum `sum_{a mod D} chi_D(a) zeta_D^a` at level `n`,
/// equal to `+sqrt(D)` under `zeta_D = exp(2 pi i/D)`.
pub fn sqrt_disc(d: i64, n: u64) -> Result<CycNumber> {
    if d <= 1 || n % d as u64 != 0 {
        return Err(Error::LevelMismatch(format!("discriminant {d} does not divide level {n}")));
    }
    let mut acc = CycAccumulator::new(d as u64);
    for a in 0..d {
        let c = arith::kronecker(d, a);
        if c != 0 {
            acc.add_term(a, &BigRational::from_integer(c.into()));
        }
    }
    let g = acc.finish().lift(n);
    let sq = &g * &g;
    if sq != CycNumber::from_i64(n, d) {
        return Err(Error::NotFundamentalDiscriminant(d));
    }
    Ok(g)
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNumber {}

impl Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, o: &CycNumber) -> CycNumber {
        let (a, b) = self.common(o);
        CycNumber {
            level: a.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, o: &CycNumber) -> CycNumber {
        let (a, b) = self.common(o);
        CycNumber {
            level: a.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            level: self.level,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, o: &CycNumber) -> CycNumber {
        let (a, b) = self.common(o);
        let mut acc = CycAccumulator::new(a.level);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    acc.add_term((i + j) as i64, &(x * y));
                }
            }
        }
        acc.finish()
    }
}

impl fmt::Display for CycNumber {
    /// `Q`-linear combination of powers of `z{N}` in increasing exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if i == 1 {
                        write!(f, "z{}", self.level)?;
                    } else {
                        write!(f, "z{}^{i}", self.level)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
        assert!(cyclotomic_polynomial(105).iter().any(|&c| c == -2));
    }

    #[test]
    fn basic_identities() {
        let z3 = CycNumber::root_of_unity(3, 1);
        let one = CycNumber::one(3);
        let a = &one + &z3;
        let b = &one + &z3.pow(2);
        assert_eq!(&a * &b, one);
        let i = CycNumber::root_of_unity(4, 1);
        assert_eq!(i.pow(2), CycNumber::from_i64(4, -1));
        assert_eq!(CycNumber::root_of_unity(7, 7), CycNumber::one(7));
    }

    #[test]
    fn cross_level_equality_and_lift() {
        let minus_one = CycNumber::root_of_unity(2, 1);
        assert_eq!(minus_one, CycNumber::from_i64(1, -1));
        let i = CycNumber::root_of_unity(4, 1);
        assert_eq!(i, CycNumber::root_of_unity(12, 3));
        assert_eq!((&i + &CycNumber::root_of_unity(3, 1)).level(), 12);
    }

    #[test]
    fn gauss_sums() {
        for (d, n) in [(5, 5), (8, 8), (12, 12), (13, 13), (5, 20), (8, 24)] {
            let g = sqrt_disc(d, n).unwrap();
            assert_eq!(&g * &g, CycNumber::from_i64(1, d));
            // positive branch
            assert!(g.approx().0 > 0.0);
            assert!((g.approx().0 - (d as f64).sqrt()).abs() < 1e-9);
        }
        assert!(sqrt_disc(5, 12).is_err());
    }

    #[test]
    fn restriction() {
        let r = CycNumber::from_rational(30, q(3, 7));
        let res = r.restrict_to_subfield(1).unwrap();
        assert_eq!(res.level(), 1);
        assert_eq!(res.coeffs(), &[q(3, 7)]);
        let g = sqrt_disc(5, 20).unwrap();
        assert_eq!(g.restrict_to_subfield(4), Err(Error::NotInSubfield(4)));
        assert_eq!(g.restrict_to_subfield(5).unwrap(), g);
        let z3 = CycNumber::root_of_unity(3, 1);
        let lifted = z3.lift(15);
        let back = lifted.restrict_to_subfield(3).unwrap();
        assert_eq!(back.level(), 3);
        assert_eq!(back.coeffs(), z3.coeffs());
        // level 6 collapses to level 3
        let z6 = CycNumber::root_of_unity(6, 1);
        assert_eq!(z6.restrict_to_subfield(6).unwrap().level(), 3);
        assert_eq!(z6.simplify().level(), 3);
        assert_eq!(CycNumber::from_i64(2, 5).simplify().level(), 1);
    }

    #[test]
    fn galois_basics() {
        let z = CycNumber::root_of_unity(9, 1);
        assert_eq!(z.galois_apply(1).unwrap(), z);
        assert_eq!(z.galois_apply(-1).unwrap(), CycNumber::root_of_unity(9, -1));
        assert_eq!(z.galois_apply(3), Err(Error::NotCoprime { j: 3, level: 9 }));
        let g = sqrt_disc(5, 5).unwrap();
        // sqrt5 is fixed by squares mod 5 and negated by non-squares
        assert_eq!(g.galois_apply(4).unwrap(), g);
        assert_eq!(g.galois_apply(2).unwrap(), -&g);
    }

    #[test]
    fn json_and_display() {
        let x = CycNumber::from_rational(1, q(-1, 4));
        assert_eq!(x.to_json(), r#"{"level":1,"coeffs":["-1/4"]}"#);
        let i = CycNumber::root_of_unity(4, 1);
        let y = &CycNumber::from_rational(4, q(-1, 2)) + &i.scale(&q(1, 2));
        assert_eq!(y.to_string(), "-1/2 + 1/2*z4");
        assert_eq!(CycNumber::from_json(&y.to_json()).unwrap().to_json(), y.to_json());
        assert!(CycNumber::from_json(r#"{"level":4,"coeffs":["1"]}"#).is_err());
        assert_eq!(CycNumber::zero(5).to_string(), "0");
    }

    fn arb_cyc() -> impl Strategy<Value = CycNumber> {
        prop::sample::select(vec![3u64, 4, 5, 7, 8, 9, 12, 15])
            .prop_flat_map(|n| {
                let phi = field_degree(n);
                (Just(n), prop::collection::vec((-9i64..10, 1i64..5), phi))
            })
            .prop_map(|(n, cs)| {
                CycNumber::from_coeffs(n, cs.into_iter().map(|(a, b)| q(a, b)).collect()).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn inverse_roundtrip(x in arb_cyc()) {
            prop_assume!(!x.is_zero());
            let y = x.inverse().unwrap();
            prop_assert_eq!(&x * &y, CycNumber::one(1));
        }

        #[test]
        fn galois_group_law(x in arb_cyc(), j in 1i64..60, jj in 1i64..60) {
            let n = x.level() as i64;
            prop_assume!(arith::gcd(j, n) == 1 && arith::gcd(jj, n) == 1);
            let lhs = x.galois_apply(jj).unwrap().galois_apply(j).unwrap();
            prop_assert_eq!(lhs, x.galois_apply((j * jj) % n).unwrap());
        }

        #[test]
        fn json_roundtrip(x in arb_cyc()) {
            let s = x.to_json();
            let y = CycNumber::from_json(&s).unwrap();
            prop_assert_eq!(y.to_json(), s);
        }

        #[test]
        fn ring_axioms(x in arb_cyc(), y in arb_cyc(), z in arb_cyc()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }
    }
}
