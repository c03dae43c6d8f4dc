//! Reference values computed from Bernoulli numbers and cyclotomic
//! arithmetic alone: Lerch values over `Q` from Hurwitz zeta values, and
//! Dirichlet L-values from generalized Bernoulli numbers. These never touch
//! cones or generating functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::cyclotomic::{CycAccumulator, CycNumber};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::residue::{validate_character, HeckeCharacter};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Bernoulli numbers `B_0..=B_max` (with `B_1 = -1/2`) and binomial rows.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    numbers: Vec<BigRational>,
    binom: Vec<Vec<BigInt>>,
}

impl BernoulliTable {
    pub fn new(max: usize) -> Self {
        let mut binom: Vec<Vec<BigInt>> = Vec::with_capacity(max + 2);
        for n in 0..=max + 1 {
            let mut row = vec![BigInt::one(); n + 1];
            for j in 1..n {
                row[j] = &binom[n - 1][j - 1] + &binom[n - 1][j];
            }
            binom.push(row);
        }
        let mut numbers: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..=max {
            // sum_{j=0}^{m} C(m+1, j) B_j = 0
            let mut s = BigRational::zero();
            for (j, b) in numbers.iter().enumerate() {
                s += BigRational::from_integer(binom[m + 1][j].clone()) * b;
            }
            numbers.push(-s / BigRational::from_integer(binom[m + 1][m].clone()));
        }
        BernoulliTable { numbers, binom }
    }

    pub fn max(&self) -> usize {
        self.numbers.len() - 1
    }

    pub fn number(&self, m: usize) -> &BigRational {
        &self.numbers[m]
    }

    pub fn binomial(&self, n: usize, k: usize) -> &BigInt {
        &self.binom[n][k]
    }

    /// `B_m(x) = sum_j C(m, j) B_j x^{m-j}`.
    pub fn polynomial(&self, m: usize, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut pow = BigRational::one();
        for j in (0..=m).rev() {
            acc += BigRational::from_integer(self.binom[m][j].clone()) * &self.numbers[j] * &pow;
            pow *= x;
        }
        acc
    }
}

/// `L(zeta_n^a, -k) = -(n^k/(k+1)) sum_{j=1}^{n} zeta_n^{a j} B_{k+1}(j/n)`.
pub fn hurwitz_lerch_oracle(table: &BernoulliTable, n: u64, a: i64, k: usize) -> Result<CycNumber> {
    if n == 0 || a.rem_euclid(n as i64) == 0 {
        return Err(Error::TrivialTorsionPoint);
    }
    if k + 1 > table.max() {
        return Err(Error::Unsupported(format!("Bernoulli table too short for k = {k}")));
    }
    let scale = -BigRational::from_integer(BigInt::from(n).pow(k as u32)) / rat(k as i64 + 1, 1);
    let mut acc = CycAccumulator::new(n);
    for j in 1..=n as i64 {
        let b = table.polynomial(k + 1, &rat(j, n as i64));
        acc.add_term(a * j, &(&b * &scale));
    }
    Ok(acc.finish())
}

/// Dirichlet character modulo `q` with values `zeta_M^e`, zero off the units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    level: u64,
    table: Vec<Option<u64>>,
}

impl DirichletCharacter {
    /// `chi(r^a) = zeta_{q-1}^{j a}` for the smallest primitive root `r` mod the prime `q`.
    pub fn from_index(q: u64, j: i64) -> Result<Self> {
        let r = arith::primitive_root(q).ok_or_else(|| Error::InvalidCharacter(format!("{q} is not prime")))?;
        let level = q - 1;
        let mut table = vec![None; q as usize];
        let mut p = 1u64;
        for a in 0..level {
            table[p as usize] = Some((a as i64 * j).rem_euclid(level as i64) as u64);
            p = p * r % q;
        }
        Ok(DirichletCharacter { modulus: q, level, table })
    }

    /// The Kronecker symbol `(D/.)` modulo `|D|`.
    pub fn kronecker(d: i64) -> Self {
        let q = d.unsigned_abs();
        let table = (0..q as i64)
            .map(|a| match arith::kronecker(d, a) {
                0 => None,
                1 => Some(0),
                _ => Some(1),
            })
            .collect();
        DirichletCharacter { modulus: q, level: 2, table }
    }

    /// The character modulo `lcm` of the moduli sending `a` to `chi(a) psi(a)`.
    pub fn product(&self, other: &Self) -> Self {
        let modulus = arith::lcm(self.modulus, other.modulus);
        let level = arith::lcm(self.level, other.level);
        let (s1, s2) = (level / self.level, level / other.level);
        let table = (0..modulus)
            .map(|a| match (self.exponent_at(a as i64), other.exponent_at(a as i64)) {
                (Some(x), Some(y)) => Some((x * s1 + y * s2) % level),
                _ => None,
            })
            .collect();
        DirichletCharacter { modulus, level, table }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponent_at(&self, a: i64) -> Option<u64> {
        self.table[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, a: i64) -> CycNumber {
        match self.exponent_at(a) {
            Some(e) => CycNumber::root_of_unity(self.level, e as i64),
            None => CycNumber::zero(1),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|v| matches!(v, Some(0) | None))
    }

    /// `chi(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.value(-1) != CycNumber::one(1)
    }
}

/// `B_{m,chi} = q^{m-1} sum_{a=1}^{q} chi(a) B_m(a/q)`.
pub fn generalized_bernoulli(table: &BernoulliTable, chi: &DirichletCharacter, m: usize) -> CycNumber {
    let q = chi.modulus as i64;
    let scale = BigRational::from_integer(BigInt::from(q).pow(m as u32 - 1));
    let mut acc = CycAccumulator::new(chi.level);
    for a in 1..=q {
        if let Some(e) = chi.exponent_at(a) {
            acc.add_term(e as i64, &(table.polynomial(m, &rat(a, q)) * &scale));
        }
    }
    acc.finish()
}

/// `L(chi, -k) = -B_{k+1,chi}/(k+1)` for a nontrivial primitive `chi`.
pub fn dirichlet_l_oracle(table: &BernoulliTable, chi: &DirichletCharacter, k: usize) -> Result<CycNumber> {
    if chi.is_trivial() {
        return Err(Error::InvalidCharacter("trivial Dirichlet character".into()));
    }
    if k + 1 > table.max() {
        return Err(Error::Unsupported(format!("Bernoulli table too short for k = {k}")));
    }
    Ok(generalized_bernoulli(table, chi, k + 1).scale(&rat(-1, k as i64 + 1)))
}

/// `L(chi, -k)` must vanish when `chi(-1) = (-1)^k`.
pub fn parity_check(table: &BernoulliTable, chi: &DirichletCharacter, k: usize) -> Result<bool> {
    let v = dirichlet_l_oracle(table, chi, k)?;
    let trivial_zero = chi.is_odd() == (k % 2 == 1);
    Ok(!trivial_zero || v.is_zero())
}

/// Both sides of `L_F(chi_1 o N, -k) = L(chi_1, -k) L(chi_1 chi_D, -k)`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub lhs: CycNumber,
    pub rhs: CycNumber,
    pub equal: bool,
}

/// Compares the Hecke L-value of `chi_1 o N` with the product of Dirichlet
/// L-values, where `chi_1` is the `j`-th character modulo the prime `q`.
pub fn basechange_factorization(d: i64, q: u64, j: i64, k: usize) -> Result<Factorization> {
    let field = FieldSpec::real_quadratic(d)?;
    if arith::gcd(q as i64, d) != 1 || !arith::is_prime(q) {
        return Err(Error::InvalidCharacter(format!("need a prime q prime to {d}, got {q}")));
    }
    let chi = HeckeCharacter::from_norm(&field, q, j)?;
    let report = validate_character(&chi);
    if !report.is_valid() || !report.primitive {
        return Err(Error::InvalidCharacter(format!(
            "chi_1 o N is not primitive of conductor ({q}): {report:?}"
        )));
    }
    let fan = crate::cones::Fan::standard(&field)?;
    let lhs = crate::zeta::hecke_l_value(&chi, k as u32, &fan)?;
    let table = BernoulliTable::new(k + 2);
    let chi1 = DirichletCharacter::from_index(q, j)?;
    let twisted = chi1.product(&DirichletCharacter::kronecker(d));
    let rhs = &dirichlet_l_oracle(&table, &chi1, k)? * &dirichlet_l_oracle(&table, &twisted, k)?;
    let equal = lhs == rhs;
    Ok(Factorization { lhs, rhs, equal })
}
