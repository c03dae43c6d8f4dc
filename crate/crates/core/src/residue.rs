//! Residue rings `O_F/f`, their additive characters (torsion points of the
//! torus `Hom(O_F, G_m)`), the action of totally positive units on them, and
//! finite Hecke characters with their additive Fourier coefficients.
//!
//! A torsion point is stored as a level `N` and exponents `(e_1, e_2)` on the
//! integral basis `(1, w)`, so `xi(a + b w) = zeta_N^{a e_1 + b e_2}`. The level
//! is always the exact order of `xi`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cyclotomic::{CycAccumulator, CycNumber};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, IntegralElement};
use crate::intmat::{self, Hermite, IMat};

/// Nonzero integral ideal, given by a Z-basis in integral-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    field: FieldSpec,
    hermite: Hermite,
}

impl IdealSpec {
    pub fn principal(field: &FieldSpec, x: &IntegralElement) -> Result<IdealSpec> {
        if x.is_zero() {
            return Err(Error::InvalidIdeal("the zero ideal is not supported".into()));
        }
        Self::from_matrix(field, &field.mul_matrix(x))
    }

    pub fn unit(field: &FieldSpec) -> IdealSpec {
        Self::principal(field, &IntegralElement::new(1, 0)).expect("unit ideal")
    }

    /// Ideal generated as a lattice by the columns of `m`; checks closure under `w`.
    pub fn from_matrix(field: &FieldSpec, m: &IMat) -> Result<IdealSpec> {
        let g = field.degree();
        if m.rows() != g {
            return Err(Error::InvalidIdeal(format!("expected {g} rows, got {}", m.rows())));
        }
        let hermite = Hermite::from_generators(m)
            .ok_or_else(|| Error::InvalidIdeal("lattice is not of full rank".into()))?;
        let ideal = IdealSpec {
            field: field.clone(),
            hermite,
        };
        if g == 2 {
            let w = IntegralElement::new(0, 1);
            for j in 0..2 {
                let col = IntegralElement::from_coords(&ideal.hermite.basis().column(j));
                if !ideal.contains(&field.mul_int(&w, &col)) {
                    return Err(Error::InvalidIdeal("lattice is not closed under multiplication by w".into()));
                }
            }
        }
        Ok(ideal)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn hermite(&self) -> &Hermite {
        &self.hermite
    }

    pub fn basis_matrix(&self) -> &IMat {
        self.hermite.basis()
    }

    pub fn basis_elements(&self) -> Vec<IntegralElement> {
        let b = self.hermite.basis();
        (0..b.cols()).map(|j| IntegralElement::from_coords(&b.column(j))).collect()
    }

    pub fn norm(&self) -> u64 {
        self.hermite.index()
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn contains(&self, x: &IntegralElement) -> bool {
        self.hermite.contains(&x.coords(self.field.degree()))
    }

    /// `true` if `self` contains `other` (i.e. `self` divides `other`).
    pub fn divides(&self, other: &IdealSpec) -> bool {
        other.basis_elements().iter().all(|b| self.contains(b))
    }

    /// Smallest positive rational integer in the ideal.
    pub fn exponent(&self) -> u64 {
        *smith_of(self).last().unwrap() as u64
    }

    pub fn residue_index(&self, x: &IntegralElement) -> usize {
        self.hermite.residue_index(&x.coords(self.field.degree()))
    }

    pub fn reduce(&self, x: &IntegralElement) -> IntegralElement {
        IntegralElement::from_coords(&self.hermite.reduce(&x.coords(self.field.degree())))
    }

    /// Canonical representatives of `O_F/f`, in residue-index order.
    pub fn residues(&self) -> Vec<IntegralElement> {
        self.hermite
            .representatives()
            .map(|c| IntegralElement::from_coords(&c))
            .collect()
    }

    /// All ideals `f'` with `f ⊆ f' ⊆ O_F`, including `f` and `O_F`.
    pub fn divisors(&self) -> Vec<IdealSpec> {
        let n = self.norm() as i64;
        let mut out = Vec::new();
        if self.field.degree() == 1 {
            for d in arith::divisors(n as u64) {
                let cand = IdealSpec::principal(&self.field, &IntegralElement::new(d as i64, 0)).unwrap();
                if cand.divides(self) {
                    out.push(cand);
                }
            }
            return out;
        }
        for a in 1..=n {
            if n % a != 0 {
                continue;
            }
            for d in 1..=n / a {
                if (n / a) % d != 0 {
                    continue;
                }
                for b in 0..a {
                    let m = IMat::from_columns(&[vec![a, 0], vec![b, d]]);
                    if let Ok(cand) = IdealSpec::from_matrix(&self.field, &m) {
                        if cand.divides(self) && !out.contains(&cand) {
                            out.push(cand);
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let els: Vec<String> = self.basis_elements().iter().map(|e| e.to_string()).collect();
        write!(f, "<{}>", els.join(", "))
    }
}

fn smith_of(ideal: &IdealSpec) -> Vec<i64> {
    intmat::smith(ideal.basis_matrix()).diagonal()
}

/// Additive character of `O_F` of finite order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    level: u64,
    exps: Vec<i64>,
}

impl TorsionPoint {
    /// `xi(w_i) = zeta_level^{exps[i]}`, normalized to the exact order.
    pub fn new(level: u64, exps: Vec<i64>) -> TorsionPoint {
        assert!(level >= 1);
        let l = level as i64;
        let exps: Vec<i64> = exps.iter().map(|e| e.rem_euclid(l)).collect();
        let g = exps.iter().fold(l, |acc, &e| arith::gcd(acc, e));
        TorsionPoint {
            level: (l / g) as u64,
            exps: exps.iter().map(|e| e / g).collect(),
        }
    }

    pub fn trivial(degree: usize) -> TorsionPoint {
        TorsionPoint {
            level: 1,
            exps: vec![0; degree],
        }
    }

    /// Parses exponents relative to the exponent of `O_F/f` and checks that
    /// the character is trivial on `f`.
    pub fn from_exponents(ideal: &IdealSpec, exps: &[i64]) -> Result<TorsionPoint> {
        let g = ideal.field().degree();
        if exps.len() != g {
            return Err(Error::Parse(format!("expected {g} exponents, got {}", exps.len())));
        }
        let xi = TorsionPoint::new(ideal.exponent(), exps.to_vec());
        if !xi.is_character_of(ideal) {
            return Err(Error::InvalidElement(format!(
                "exponents {exps:?} do not define a character of O_F/{ideal}"
            )));
        }
        Ok(xi)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.level == 1
    }

    /// `k` with `xi(x) = zeta_level^k`, `0 <= k < level`.
    pub fn exponent_at(&self, x: &IntegralElement) -> i64 {
        let l = self.level as i64;
        let v = match self.exps.as_slice() {
            [e] => (x.a as i128 * *e as i128) % l as i128,
            [e1, e2] => (x.a as i128 * *e1 as i128 + x.b as i128 * *e2 as i128) % l as i128,
            _ => unreachable!(),
        };
        (v as i64).rem_euclid(l)
    }

    pub fn is_trivial_at(&self, x: &IntegralElement) -> bool {
        self.exponent_at(x) == 0
    }

    pub fn value(&self, x: &IntegralElement) -> CycNumber {
        CycNumber::root_of_unity(self.level, self.exponent_at(x))
    }

    /// `true` if `xi` is trivial on the ideal, i.e. factors through `O_F/f`.
    pub fn is_character_of(&self, ideal: &IdealSpec) -> bool {
        ideal.basis_elements().iter().all(|b| self.is_trivial_at(b))
    }

    /// `xi^j`, the character with all values raised to the `j`-th power.
    pub fn power(&self, j: i64) -> TorsionPoint {
        TorsionPoint::new(self.level, self.exps.iter().map(|e| e * j).collect())
    }

    /// `xi^u(x) = xi(u x)`.
    pub fn unit_action(&self, field: &FieldSpec, u: &IntegralElement) -> TorsionPoint {
        if field.degree() == 1 {
            return self.clone();
        }
        let m = field.mul_matrix(u);
        let l = self.level as i64;
        let exps = (0..2)
            .map(|j| (self.exps[0] * m[(0, j)] + self.exps[1] * m[(1, j)]).rem_euclid(l))
            .collect();
        TorsionPoint::new(self.level, exps)
    }

    /// Smallest `e >= 1` with `xi^{eps^e} = xi`; always 1 over `Q`.
    pub fn isotropy_index(&self, field: &FieldSpec) -> Result<u64> {
        if field.degree() == 1 {
            return Ok(1);
        }
        let eps = field.fundamental_totally_positive_unit()?;
        let mut cur = self.unit_action(field, &eps);
        let mut e = 1;
        while cur != *self {
            cur = cur.unit_action(field, &eps);
            e += 1;
        }
        Ok(e)
    }

    /// Largest ideal contained in the kernel: the conductor of `xi`.
    pub fn conductor(&self, field: &FieldSpec) -> IdealSpec {
        let g = field.degree();
        let n = self.level as i64;
        let mut rows = vec![self.exps.clone()];
        if g == 2 {
            let w = self.unit_action(field, &IntegralElement::new(0, 1));
            // rescale to our level (the action can only lower the order)
            let scale = n / w.level as i64;
            rows.push(w.exps.iter().map(|e| e * scale).collect());
        } else {
            rows.truncate(1);
        }
        let a = if g == 2 {
            IMat::from_rows(&rows)
        } else {
            IMat::from_rows(&[rows[0].clone()])
        };
        let s = intmat::smith(&a);
        let d = s.diagonal();
        let mut cols = Vec::with_capacity(g);
        for j in 0..g {
            let dj = d.get(j).copied().unwrap_or(0);
            let k = n / arith::gcd(n, dj);
            cols.push(s.v.column(j).iter().map(|x| x * k).collect::<Vec<_>>());
        }
        IdealSpec::from_matrix(field, &IMat::from_columns(&cols)).expect("kernel of a character is an ideal")
    }

    /// `xi ∈ T[f]` does not factor through any `T[f']` with `f' ⊋ f`.
    pub fn is_primitive_for(&self, ideal: &IdealSpec) -> bool {
        self.is_character_of(ideal) && self.conductor(ideal.field()).norm() == ideal.norm()
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        write!(f, "xi[{}; {}]", self.level, e.join(","))
    }
}

/// All `N(f)` characters of `O_F/f`; the trivial character comes first.
pub fn torsion_points(ideal: &IdealSpec) -> Vec<TorsionPoint> {
    let g = ideal.field().degree();
    let s = intmat::smith(ideal.basis_matrix());
    let d = s.diagonal();
    let n = *d.last().unwrap();
    let mut out = Vec::with_capacity(ideal.norm() as usize);
    let total: i64 = d.iter().product();
    for idx in 0..total {
        let mut rem = idx;
        let mut f = vec![0i64; g];
        for i in 0..g {
            let j = rem % d[i];
            rem /= d[i];
            f[i] = j * (n / d[i]);
        }
        // E = F * U
        let exps = (0..g)
            .map(|c| (0..g).map(|r| f[r] * s.u[(r, c)]).sum::<i64>())
            .collect();
        out.push(TorsionPoint::new(n as u64, exps));
    }
    out
}

/// One representative per orbit of the totally positive units on `T[f]`,
/// with the orbit size. Representatives are the first orbit members in
/// [`torsion_points`] order.
pub fn orbit_representatives(ideal: &IdealSpec, exclude_trivial: bool) -> Result<Vec<(TorsionPoint, u64)>> {
    let field = ideal.field();
    let eps = if field.degree() == 2 {
        Some(field.fundamental_totally_positive_unit()?)
    } else {
        None
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for xi in torsion_points(ideal) {
        if seen.contains(&xi) || (exclude_trivial && xi.is_trivial()) {
            continue;
        }
        let mut size = 1;
        seen.insert(xi.clone());
        if let Some(eps) = &eps {
            let mut cur = xi.unit_action(field, eps);
            while cur != xi {
                seen.insert(cur.clone());
                cur = cur.unit_action(field, eps);
                size += 1;
            }
        }
        out.push((xi, size));
    }
    Ok(out)
}

/// Structure of `(O_F/f)^x`: generators of the cyclic factors and their orders.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub generators: Vec<IntegralElement>,
    pub orders: Vec<u64>,
    pub order: u64,
}

fn residue_mul(ideal: &IdealSpec, x: &IntegralElement, y: &IntegralElement) -> IntegralElement {
    ideal.reduce(&ideal.field().mul_int(x, y))
}

fn is_residue_unit(ideal: &IdealSpec, x: &IntegralElement) -> bool {
    // x is a unit mod f iff x O_F + f = O_F, i.e. the lattice generated by
    // x, x w and f contains 1.
    let field = ideal.field();
    let g = field.degree();
    let mut cols: Vec<Vec<i64>> = ideal.basis_elements().iter().map(|b| b.coords(g)).collect();
    cols.push(x.coords(g));
    if g == 2 {
        cols.push(field.mul_int(x, &IntegralElement::new(0, 1)).coords(g));
    }
    let h = Hermite::from_generators(&IMat::from_columns(&cols));
    h.is_some_and(|h| h.index() == 1)
}

/// Units of `O_F/f` in residue-index order.
pub fn residue_units(ideal: &IdealSpec) -> Vec<IntegralElement> {
    ideal.residues().into_iter().filter(|x| is_residue_unit(ideal, x)).collect()
}

/// Invariant-factor decomposition of `(O_F/f)^x` by brute force.
pub fn unit_group(ideal: &IdealSpec) -> UnitGroup {
    let one = ideal.reduce(&IntegralElement::new(1, 0));
    let units = residue_units(ideal);
    // Greedy generators with exponent coordinates for every element reached.
    let mut coords: HashMap<IntegralElement, Vec<i64>> = HashMap::new();
    coords.insert(one, vec![]);
    let mut gens: Vec<IntegralElement> = Vec::new();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    for u in &units {
        if coords.contains_key(u) {
            continue;
        }
        let r = gens.len();
        // smallest k with u^k in the current subgroup
        let mut k = 1;
        let mut p = *u;
        while !coords.contains_key(&p) {
            p = residue_mul(ideal, &p, u);
            k += 1;
        }
        let mut rel = coords[&p].iter().map(|c| -c).collect::<Vec<_>>();
        rel.resize(r, 0);
        rel.push(k);
        for old in relations.iter_mut() {
            old.push(0);
        }
        relations.push(rel);
        let old: Vec<(IntegralElement, Vec<i64>)> = coords.iter().map(|(x, c)| (*x, c.clone())).collect();
        let mut pw = one;
        for j in 0..k {
            for (x, c) in &old {
                let y = residue_mul(ideal, x, &pw);
                let mut cy = c.clone();
                cy.resize(r, 0);
                cy.push(j);
                coords.entry(y).or_insert(cy);
            }
            pw = residue_mul(ideal, &pw, u);
        }
        for c in coords.values_mut() {
            c.resize(r + 1, 0);
        }
        gens.push(*u);
    }
    if gens.is_empty() {
        return UnitGroup {
            generators: vec![],
            orders: vec![],
            order: units.len() as u64,
        };
    }
    let rel = IMat::from_rows(&relations);
    let s = intmat::smith(&rel);
    let vinv = unimodular_inverse(&s.v);
    let d = s.diagonal();
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for (j, &dj) in d.iter().enumerate() {
        if dj == 1 {
            continue;
        }
        let mut h = one;
        for (i, g) in gens.iter().enumerate() {
            let e = vinv[(j, i)].rem_euclid(dj);
            for _ in 0..e {
                h = residue_mul(ideal, &h, g);
            }
        }
        generators.push(h);
        orders.push(dj as u64);
    }
    UnitGroup {
        generators,
        orders,
        order: units.len() as u64,
    }
}

fn unimodular_inverse(m: &IMat) -> IMat {
    // u m v = 1, so m^-1 = v u
    let s = intmat::smith(m);
    debug_assert!(s.diagonal().iter().all(|&x| x == 1));
    s.v.mul(&s.u)
}

/// Finite Hecke character `chi_fin` on `O_F/f`, extended by zero off the units.
/// Values are exponents of `zeta_M`.
#[derive(Clone, Debug)]
pub struct HeckeCharacter {
    conductor: IdealSpec,
    level: u64,
    table: Vec<Option<u64>>,
}

/// JSON description of a character by its values on chosen generators of `(O_F/f)^x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterFile {
    /// Fundamental discriminant, or 1 for `Q`.
    pub disc: i64,
    /// Principal generator of the conductor, e.g. `"3"` or `"2+w"`.
    pub conductor: String,
    /// `M`: values are powers of `zeta_M`.
    pub level: u64,
    pub generators: Vec<String>,
    pub exponents: Vec<i64>,
}

impl CharacterFile {
    pub fn field(&self) -> Result<FieldSpec> {
        if self.disc == 1 {
            Ok(FieldSpec::rational())
        } else {
            FieldSpec::real_quadratic(self.disc)
        }
    }

    pub fn to_character(&self) -> Result<HeckeCharacter> {
        let field = self.field()?;
        let c = field.parse_integral(&self.conductor)?;
        let ideal = IdealSpec::principal(&field, &c)?;
        let gens = self
            .generators
            .iter()
            .map(|g| field.parse_integral(g))
            .collect::<Result<Vec<_>>>()?;
        HeckeCharacter::from_generators(&ideal, self.level, &gens, &self.exponents)
    }
}

/// Outcome of [`validate_character`]; each axiom is reported separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterReport {
    pub multiplicative: bool,
    pub trivial_on_units: bool,
    pub primitive: bool,
}

impl CharacterReport {
    pub fn is_valid(&self) -> bool {
        self.multiplicative && self.trivial_on_units
    }
}

impl HeckeCharacter {
    /// Character determined by `chi(gens[i]) = zeta_M^{exps[i]}`; the
    /// generators must generate `(O_F/f)^x` and the assignment must be consistent.
    pub fn from_generators(
        conductor: &IdealSpec,
        level: u64,
        gens: &[IntegralElement],
        exps: &[i64],
    ) -> Result<HeckeCharacter> {
        if level == 0 {
            return Err(Error::InvalidCharacter("level must be positive".into()));
        }
        if gens.len() != exps.len() {
            return Err(Error::InvalidCharacter("generator and exponent counts differ".into()));
        }
        let m = level as i64;
        let size = conductor.norm() as usize;
        let mut table: Vec<Option<u64>> = vec![None; size];
        let one = conductor.reduce(&IntegralElement::new(1, 0));
        table[conductor.residue_index(&one)] = Some(0);
        let mut queue = VecDeque::from([(one, 0i64)]);
        let gens: Vec<IntegralElement> = gens.iter().map(|g| conductor.reduce(g)).collect();
        for g in &gens {
            if !is_residue_unit(conductor, g) {
                return Err(Error::InvalidCharacter(format!("{g} is not a unit modulo {conductor}")));
            }
        }
        while let Some((x, v)) = queue.pop_front() {
            for (g, e) in gens.iter().zip(exps) {
                let y = residue_mul(conductor, &x, g);
                let vy = (v + e).rem_euclid(m);
                let idx = conductor.residue_index(&y);
                match table[idx] {
                    Some(old) if old as i64 != vy => {
                        return Err(Error::InvalidCharacter(format!(
                            "inconsistent values at {y}: {old} and {vy}"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        table[idx] = Some(vy as u64);
                        queue.push_back((y, vy));
                    }
                }
            }
        }
        let reached = table.iter().filter(|v| v.is_some()).count();
        let units = residue_units(conductor).len();
        if reached != units {
            return Err(Error::InvalidCharacter(format!(
                "generators reach {reached} of {units} residue units"
            )));
        }
        Ok(HeckeCharacter {
            conductor: conductor.clone(),
            level,
            table,
        })
    }

    /// `chi_1(N(x) mod q)` for the `j`-th Dirichlet character `chi_1` modulo
    /// the prime `q`: `chi_1(r^a) = zeta_{q-1}^{j a}` for the smallest
    /// primitive root `r`.
    pub fn from_norm(field: &FieldSpec, q: u64, j: i64) -> Result<HeckeCharacter> {
        let r = arith::primitive_root(q)
            .ok_or_else(|| Error::InvalidCharacter(format!("{q} is not prime")))?;
        let conductor = IdealSpec::principal(field, &IntegralElement::new(q as i64, 0))?;
        let level = q - 1;
        let mut dlog = vec![None; q as usize];
        let mut p = 1u64;
        for a in 0..level {
            dlog[p as usize] = Some(a as i64);
            p = p * r % q;
        }
        let table = conductor
            .residues()
            .iter()
            .map(|x| {
                let nrm = field.norm_int(x).rem_euclid(q as i64) as usize;
                dlog[nrm].map(|a| (a * j).rem_euclid(level.max(1) as i64) as u64)
            })
            .collect();
        Ok(HeckeCharacter {
            conductor,
            level: level.max(1),
            table,
        })
    }

    pub fn conductor(&self) -> &IdealSpec {
        &self.conductor
    }

    pub fn field(&self) -> &FieldSpec {
        self.conductor.field()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Exponent of `zeta_M` at `x`, or `None` when `x` is not a unit mod `f`.
    pub fn exponent_at(&self, x: &IntegralElement) -> Option<u64> {
        self.table[self.conductor.residue_index(x)]
    }

    pub fn value(&self, x: &IntegralElement) -> CycNumber {
        match self.exponent_at(x) {
            Some(e) => CycNumber::root_of_unity(self.level, e as i64),
            None => CycNumber::zero(1),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|v| matches!(v, Some(0) | None))
    }
}

/// Checks multiplicativity, triviality on the totally positive units and
/// primitivity (no factorization through a proper divisor of the conductor).
pub fn validate_character(chi: &HeckeCharacter) -> CharacterReport {
    let ideal = chi.conductor();
    let field = ideal.field();
    let m = chi.level as i64;
    let units = residue_units(ideal);
    let mut multiplicative = true;
    let sample = if units.len() * units.len() <= 4_000_000 {
        units.len()
    } else {
        200.min(units.len())
    };
    'outer: for x in &units[..sample] {
        let ex = chi.exponent_at(x);
        for y in &units {
            let exy = chi.exponent_at(&residue_mul(ideal, x, y));
            let ok = match (ex, chi.exponent_at(y), exy) {
                (Some(a), Some(b), Some(c)) => (a as i64 + b as i64 - c as i64).rem_euclid(m) == 0,
                _ => false,
            };
            if !ok {
                multiplicative = false;
                break 'outer;
            }
        }
    }
    let trivial_on_units = match field.degree() {
        1 => true,
        _ => match field.fundamental_totally_positive_unit() {
            Ok(eps) => chi.exponent_at(&eps) == Some(0),
            Err(_) => false,
        },
    };
    let mut primitive = true;
    for d in ideal.divisors() {
        if d == *ideal {
            continue;
        }
        // chi factors through O/d iff it is trivial on units congruent to 1 mod d
        let factors = units
            .iter()
            .filter(|u| d.contains(&(**u - IntegralElement::new(1, 0))))
            .all(|u| chi.exponent_at(u) == Some(0));
        if factors {
            primitive = false;
            break;
        }
    }
    CharacterReport {
        multiplicative,
        trivial_on_units,
        primitive,
    }
}

/// `c_chi(xi) = (1/N f) sum_{beta mod f} chi(beta) xi(-beta)` in `Q(zeta_{lcm(M, N)})`.
pub fn fourier_coefficient(chi: &HeckeCharacter, xi: &TorsionPoint) -> Result<CycNumber> {
    let ideal = chi.conductor();
    if !xi.is_character_of(ideal) {
        return Err(Error::LevelMismatch(format!("{xi} is not a character of O_F/{ideal}")));
    }
    let l = arith::lcm(chi.level, xi.level());
    let sm = (l / chi.level) as i64;
    let sx = (l / xi.level()) as i64;
    let mut acc = CycAccumulator::new(l);
    let w = BigRational::new(BigInt::one(), BigInt::from(ideal.norm()));
    for beta in ideal.residues() {
        if let Some(e) = chi.exponent_at(&beta) {
            acc.add_term(e as i64 * sm - xi.exponent_at(&beta) * sx, &w);
        }
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q5() -> FieldSpec {
        FieldSpec::real_quadratic(5).unwrap()
    }

    fn principal(f: &FieldSpec, a: i64, b: i64) -> IdealSpec {
        IdealSpec::principal(f, &IntegralElement::new(a, b)).unwrap()
    }

    #[test]
    fn ideal_basics() {
        let f = q5();
        let two = principal(&f, 2, 0);
        assert_eq!(two.norm(), 4);
        assert_eq!(two.exponent(), 2);
        let p = principal(&f, 2, 1); // norm 4+2-1 = 5
        assert_eq!(p.norm(), 5);
        assert!(p.contains(&IntegralElement::new(5, 0)));
        let bad = IMat::from_columns(&[vec![2, 0], vec![0, 1]]);
        assert!(IdealSpec::from_matrix(&f, &bad).is_err());
        assert_eq!(principal(&f, 4, 0).divisors().len(), 3);
        // (3) is prime in Q(sqrt5): divisors are (1) and (3)
        assert_eq!(principal(&f, 3, 0).divisors().len(), 2);
        // 11 splits
        assert_eq!(principal(&f, 11, 0).divisors().len(), 4);
    }

    #[test]
    fn residue_classes_distinct() {
        let f = q5();
        for ideal in [principal(&f, 3, 0), principal(&f, 2, 1), principal(&f, 4, 2)] {
            let res = ideal.residues();
            assert_eq!(res.len() as u64, ideal.norm());
            for (i, x) in res.iter().enumerate() {
                for y in &res[i + 1..] {
                    assert!(!ideal.contains(&(*x - *y)));
                }
            }
        }
    }

    #[test]
    fn torsion_point_counts() {
        let q = FieldSpec::rational();
        let four = principal(&q, 4, 0);
        let pts = torsion_points(&four);
        assert_eq!(pts.len(), 4);
        let values: Vec<i64> = pts.iter().map(|x| x.exponent_at(&IntegralElement::new(1, 0)) * (4 / x.level() as i64)).collect();
        let mut sorted = values.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        let f = q5();
        for ideal in [principal(&f, 2, 0), principal(&f, 3, 0), principal(&f, 6, 0), principal(&f, 2, 1)] {
            let pts = torsion_points(&ideal);
            assert_eq!(pts.len() as u64, ideal.norm());
            assert_eq!(pts.iter().filter(|x| x.is_trivial()).count(), 1);
            assert!(pts[0].is_trivial());
            let set: HashSet<_> = pts.iter().cloned().collect();
            assert_eq!(set.len(), pts.len());
            assert!(pts.iter().all(|x| x.is_character_of(&ideal)));
        }
    }

    #[test]
    fn unit_action_mod_two() {
        let f = q5();
        let eps = f.fundamental_totally_positive_unit().unwrap();
        let two = principal(&f, 2, 0);
        // eps mod 2 has order 3 on O/2 = F_4
        let m = f.mul_matrix(&eps);
        let mut p = IMat::identity(2);
        let mut order = 0;
        loop {
            p = p.mul(&m);
            order += 1;
            let red: Vec<i64> = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| p[(i, j)].rem_euclid(2)).collect();
            if red == vec![1, 0, 0, 1] {
                break;
            }
        }
        assert_eq!(order, 3);
        let reps = orbit_representatives(&two, true).unwrap();
        assert_eq!(reps.iter().map(|(_, s)| s).sum::<u64>(), 3);
        for (xi, size) in &reps {
            let e = xi.isotropy_index(&f).unwrap();
            assert_eq!(e, *size);
            assert_eq!(3 % e, 0);
        }
        assert_eq!(reps.len(), 1);
        let triv = TorsionPoint::trivial(2);
        assert_eq!(triv.unit_action(&f, &eps), triv);
        assert_eq!(triv.isotropy_index(&f).unwrap(), 1);
        let q = FieldSpec::rational();
        for (xi, s) in orbit_representatives(&principal(&q, 5, 0), false).unwrap() {
            assert_eq!(s, 1);
            assert_eq!(xi.isotropy_index(&q).unwrap(), 1);
        }
    }

    #[test]
    fn orbit_sizes_sum_and_closure() {
        let f = q5();
        let eps = f.fundamental_totally_positive_unit().unwrap();
        for c in [3, 4, 6, 7] {
            let ideal = principal(&f, c, 0);
            let reps = orbit_representatives(&ideal, true).unwrap();
            assert_eq!(reps.iter().map(|(_, s)| s).sum::<u64>(), ideal.norm() - 1);
            let all = orbit_representatives(&ideal, false).unwrap();
            assert_eq!(all.iter().map(|(_, s)| s).sum::<u64>(), ideal.norm());
            for (xi, size) in reps {
                let mut orbit = vec![xi.clone()];
                for _ in 1..size {
                    orbit.push(orbit.last().unwrap().unit_action(&f, &eps));
                }
                for y in &orbit {
                    assert!(orbit.contains(&y.unit_action(&f, &eps)));
                }
            }
        }
    }

    /// Conductor via the kernel lattice agrees with a search over divisors.
    #[test]
    fn conductor_matches_divisor_search() {
        for field in [q5(), FieldSpec::real_quadratic(8).unwrap(), FieldSpec::rational()] {
            for c in [4, 6, 9] {
                let ideal = principal(&field, c, 0);
                let divs = ideal.divisors();
                for xi in torsion_points(&ideal) {
                    let cond = xi.conductor(&field);
                    // smallest-norm divisor on which xi is trivial
                    let expect = divs
                        .iter()
                        .filter(|d| xi.is_character_of(d))
                        .min_by_key(|d| d.norm())
                        .unwrap();
                    assert_eq!(&cond, expect, "{xi} mod {c}");
                }
            }
        }
    }

    #[test]
    fn unit_group_structure() {
        let f = q5();
        // (O/3)^x = F_9^x is cyclic of order 8
        let g = unit_group(&principal(&f, 3, 0));
        assert_eq!(g.order, 8);
        assert_eq!(g.orders, vec![8]);
        // (O/4)^x has order 12
        let g = unit_group(&principal(&f, 4, 0));
        assert_eq!(g.order, 12);
        assert_eq!(g.orders.iter().product::<u64>(), 12);
        let q = FieldSpec::rational();
        let g = unit_group(&principal(&q, 8, 0));
        assert_eq!(g.orders, vec![2, 2]);
    }

    fn legendre3(f: &FieldSpec) -> HeckeCharacter {
        HeckeCharacter::from_norm(f, 3, 1).unwrap()
    }

    #[test]
    fn norm_characters_validate() {
        let f = q5();
        let chi = legendre3(&f);
        let rep = validate_character(&chi);
        assert!(rep.multiplicative && rep.trivial_on_units && rep.primitive);
        // an explicit character with chi(eps) != 1: chi of order 8 on F_9^x
        let ideal = principal(&f, 3, 0);
        let ug = unit_group(&ideal);
        let bad = HeckeCharacter::from_generators(&ideal, 8, &ug.generators, &[1]).unwrap();
        let rep = validate_character(&bad);
        assert!(rep.multiplicative);
        assert!(!rep.trivial_on_units);
        // inconsistent assignment is rejected
        assert!(HeckeCharacter::from_generators(&ideal, 8, &[ug.generators[0], ug.generators[0]], &[1, 2]).is_err());
    }

    #[test]
    fn inflated_character_is_not_primitive() {
        let f = q5();
        let ideal = principal(&f, 6, 0);
        let base = legendre3(&f);
        let units = residue_units(&ideal);
        let ug = unit_group(&ideal);
        let exps: Vec<i64> = ug.generators.iter().map(|g| base.exponent_at(g).unwrap() as i64).collect();
        let lifted = HeckeCharacter::from_generators(&ideal, 2, &ug.generators, &exps).unwrap();
        for u in units {
            assert_eq!(lifted.exponent_at(&u), base.exponent_at(&u));
        }
        let rep = validate_character(&lifted);
        assert!(rep.is_valid());
        assert!(!rep.primitive);
    }

    #[test]
    fn fourier_examples() {
        let f = q5();
        let chi = legendre3(&f);
        let ideal = chi.conductor().clone();
        assert!(fourier_coefficient(&chi, &TorsionPoint::trivial(2)).unwrap().is_zero());
        let eps = f.fundamental_totally_positive_unit().unwrap();
        let pts = torsion_points(&ideal);
        for xi in &pts {
            let c = fourier_coefficient(&chi, xi).unwrap();
            let c2 = fourier_coefficient(&chi, &xi.unit_action(&f, &eps)).unwrap();
            assert_eq!(c, c2);
        }
        // inversion
        for alpha in ideal.residues() {
            let mut sum = CycNumber::zero(1);
            for xi in &pts {
                sum = &sum + &(&fourier_coefficient(&chi, xi).unwrap() * &xi.value(&alpha));
            }
            assert_eq!(sum, chi.value(&alpha));
        }
        let wrong = TorsionPoint::new(2, vec![1, 0]);
        assert!(fourier_coefficient(&chi, &wrong).is_err());
    }

    proptest! {
        #[test]
        fn action_is_invertible(c in 2i64..9, idx in 0usize..64) {
            let f = q5();
            let ideal = principal(&f, c, 0);
            let pts = torsion_points(&ideal);
            let xi = &pts[idx % pts.len()];
            let eps = f.fundamental_totally_positive_unit().unwrap();
            let inv = f.unit_inverse(&eps).unwrap();
            prop_assert_eq!(&xi.unit_action(&f, &eps).unit_action(&f, &inv), xi);
        }
    }
}
