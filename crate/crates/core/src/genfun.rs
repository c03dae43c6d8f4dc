//! Rational functions of cone shape `P(t) / prod (1 - t^{a_i})^{m_i}` with
//! `P` a Laurent polynomial in `t^alpha`, `alpha in O_F`, and coefficients in
//! `F`: the cone generating functions, their derivatives under `d_tau` and
//! the norm derivative, and the signed cocycle sum over `g + 1` cones.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::cones::{orientation_sign, parallelepiped_lattice_points};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec, IntegralElement, Sign};

/// Finite sum `sum c_alpha t^alpha` with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<IntegralElement, FieldElement>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: IntegralElement, coeff: FieldElement) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, &coeff);
        p
    }

    pub fn one() -> Self {
        Self::monomial(IntegralElement::zero(), FieldElement::one())
    }

    pub fn terms(&self) -> &BTreeMap<IntegralElement, FieldElement> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: IntegralElement, coeff: &FieldElement) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_default();
        *entry = &*entry + coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, &-c);
        }
        out
    }

    pub fn scale(&self, field: &FieldSpec, c: &FieldElement) -> Self {
        let mut out = Self::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, &field.mul(x, c));
        }
        out
    }

    pub fn mul(&self, field: &FieldSpec, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(*e1 + *e2, &field.mul(c1, c2));
            }
        }
        out
    }

    /// `self * (1 - t^a)`.
    pub fn mul_one_minus(&self, a: &IntegralElement) -> Self {
        let mut out = self.clone();
        for (e, c) in &self.terms {
            out.add_term(*e + *a, &-c);
        }
        out
    }

    /// `t^alpha -> t^{u alpha}`.
    pub fn substitute_unit(&self, field: &FieldSpec, u: &IntegralElement) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(field.mul_int(u, e), c);
        }
        out
    }

    /// Term-wise `d(c t^alpha) = c lambda(alpha) t^alpha` for the eigenvalue of `d`.
    pub fn derive(&self, field: &FieldSpec, d: Derivation) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &field.mul(c, &d.eigenvalue(field, e)));
        }
        out
    }

    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }
}

/// `d_tau` for one embedding, or the norm derivative `prod_tau d_tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Tau(usize),
    Norm,
}

impl Derivation {
    /// Eigenvalue on the monomial `t^alpha`: `alpha^tau`, resp. `N(alpha)`.
    pub fn eigenvalue(&self, field: &FieldSpec, alpha: &IntegralElement) -> FieldElement {
        match self {
            Derivation::Tau(i) => field.embed_abstract(&(*alpha).into(), *i),
            Derivation::Norm => FieldElement::from_i64(field.norm_int(alpha), 0),
        }
    }
}

/// `numerator / prod_a (1 - t^a)^{m_a}` with a weight tag `k in Z^I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeRatFunc {
    pub numerator: LaurentPoly,
    pub denominator: BTreeMap<IntegralElement, u32>,
    pub weight: Vec<i64>,
}

/// Debug form of a [`ConeRatFunc`].
#[derive(Serialize)]
struct RatFuncDump {
    numerator: Vec<(Vec<i64>, String)>,
    denominator: Vec<(Vec<i64>, u32)>,
    weight: Vec<i64>,
}

impl ConeRatFunc {
    pub fn zero(degree: usize) -> Self {
        ConeRatFunc {
            numerator: LaurentPoly::zero(),
            denominator: BTreeMap::new(),
            weight: vec![0; degree],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Numerator over the denominator `prod (1 - t^a)^{target_a}`; the target
    /// multiplicities must dominate the current ones.
    pub fn numerator_over(&self, target: &BTreeMap<IntegralElement, u32>) -> LaurentPoly {
        let mut p = self.numerator.clone();
        for (a, &m) in target {
            let have = self.denominator.get(a).copied().unwrap_or(0);
            assert!(have <= m, "target denominator does not dominate");
            for _ in have..m {
                p = p.mul_one_minus(a);
            }
        }
        p
    }

    fn common_denominator(&self, other: &Self) -> BTreeMap<IntegralElement, u32> {
        let mut den = self.denominator.clone();
        for (a, &m) in &other.denominator {
            let e = den.entry(*a).or_insert(0);
            *e = (*e).max(m);
        }
        den
    }

    /// Exact equality of the rational functions (ignoring the weight tag).
    pub fn same_function(&self, other: &Self) -> bool {
        let den = self.common_denominator(other);
        self.numerator_over(&den) == other.numerator_over(&den)
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = self.common_denominator(other);
        ConeRatFunc {
            numerator: self.numerator_over(&den).add(&other.numerator_over(&den)),
            denominator: den,
            weight: self.weight.clone(),
        }
    }

    pub fn scale(&self, field: &FieldSpec, c: &FieldElement) -> Self {
        ConeRatFunc {
            numerator: self.numerator.scale(field, c),
            ..self.clone()
        }
    }

    /// Quotient rule for `d_tau`, keeping the cone shape: every denominator
    /// multiplicity rises by one.
    pub fn differentiate(&self, field: &FieldSpec, d: Derivation) -> Self {
        match d {
            Derivation::Norm => {
                let mut f = self.clone();
                for i in 0..field.degree() {
                    f = f.differentiate(field, Derivation::Tau(i));
                }
                f
            }
            Derivation::Tau(i) => {
                let dens: Vec<(IntegralElement, u32)> = self.denominator.iter().map(|(a, m)| (*a, *m)).collect();
                let mut first = self.numerator.derive(field, d);
                for (a, _) in &dens {
                    first = first.mul_one_minus(a);
                }
                let mut second = LaurentPoly::zero();
                for (idx, (a, m)) in dens.iter().enumerate() {
                    let lam = field.mul(&d.eigenvalue(field, a), &FieldElement::from_i64(*m as i64, 0));
                    let mut term = self.numerator.scale(field, &lam);
                    term = term.mul(field, &LaurentPoly::monomial(*a, FieldElement::one()));
                    for (j, (b, _)) in dens.iter().enumerate() {
                        if j != idx {
                            term = term.mul_one_minus(b);
                        }
                    }
                    second = second.add(&term);
                }
                let mut weight = self.weight.clone();
                weight[i] -= 1;
                ConeRatFunc {
                    numerator: first.add(&second),
                    denominator: self.denominator.iter().map(|(a, m)| (*a, m + 1)).collect(),
                    weight,
                }
            }
        }
    }

    /// `d^k` for the norm derivative.
    pub fn norm_derivative(&self, field: &FieldSpec, k: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.differentiate(field, Derivation::Norm);
        }
        f
    }

    /// `prod_tau d_tau^{k_tau}`.
    pub fn derivative(&self, field: &FieldSpec, k: &[u32]) -> Self {
        let mut f = self.clone();
        for (i, &ki) in k.iter().enumerate() {
            for _ in 0..ki {
                f = f.differentiate(field, Derivation::Tau(i));
            }
        }
        f
    }

    /// `t^alpha -> t^{u alpha}`.
    pub fn substitute_unit(&self, field: &FieldSpec, u: &IntegralElement) -> Self {
        ConeRatFunc {
            numerator: self.numerator.substitute_unit(field, u),
            denominator: self.denominator.iter().map(|(a, m)| (field.mul_int(u, a), *m)).collect(),
            weight: self.weight.clone(),
        }
    }

    /// Power-series expansion truncated to exponents of trace at most `bound`.
    /// Every exponent involved must be totally positive.
    pub fn series_expand(&self, field: &FieldSpec, bound: i64) -> Result<LaurentPoly> {
        for a in self.denominator.keys() {
            if !field.is_totally_positive_int(a) {
                return Err(Error::InvalidElement(format!("denominator exponent {a} is not totally positive")));
            }
        }
        // prod (1 - t^a)^{-m} truncated, as a map exponent -> rational coefficient
        let mut series: BTreeMap<IntegralElement, BigRational> = BTreeMap::new();
        series.insert(IntegralElement::zero(), BigRational::from_integer(1.into()));
        for (a, &m) in &self.denominator {
            let ta = field.trace_int(a);
            for _ in 0..m {
                let mut next: BTreeMap<IntegralElement, BigRational> = BTreeMap::new();
                for (e, c) in &series {
                    let mut n = 0;
                    while field.trace_int(e) + n * ta <= bound {
                        let x = next.entry(*e + *a * n).or_insert_with(BigRational::zero);
                        *x += c;
                        n += 1;
                    }
                }
                series = next;
            }
        }
        let mut out = LaurentPoly::zero();
        for (e, c) in self.numerator.terms() {
            for (s, sc) in &series {
                let ex = *e + *s;
                if field.trace_int(&ex) <= bound {
                    out.add_term(ex, &c.scale(sc));
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let g = self.weight.len();
        let dump = RatFuncDump {
            numerator: self
                .numerator
                .terms()
                .iter()
                .map(|(e, c)| (e.coords(g), c.to_string()))
                .collect(),
            denominator: self.denominator.iter().map(|(a, m)| (a.coords(g), *m)).collect(),
            weight: self.weight.clone(),
        };
        serde_json::to_string(&dump).expect("serializable")
    }
}

/// `G_sigma(t) = sum_{alpha in P̂ ∩ O_F} t^alpha / prod (1 - t^{alpha_i})`.
pub fn generating_function(field: &FieldSpec, gens: &[IntegralElement]) -> Result<ConeRatFunc> {
    if gens.len() != field.degree() {
        return Err(Error::Degenerate(format!("expected {} generators", field.degree())));
    }
    let mut numerator = LaurentPoly::zero();
    for p in parallelepiped_lattice_points(field, gens)? {
        numerator.add_term(p, &FieldElement::one());
    }
    Ok(ConeRatFunc {
        numerator,
        denominator: gens.iter().map(|a| (*a, 1)).collect(),
        weight: vec![0; field.degree()],
    })
}

/// `sum_j (-1)^j sgn(omega_j) G_{omega_j}`, `omega_j` omitting `alpha_j`.
pub fn cocycle_defect(field: &FieldSpec, alphas: &[IntegralElement]) -> Result<ConeRatFunc> {
    let g = field.degree();
    if alphas.len() != g + 1 {
        return Err(Error::Degenerate(format!("expected {} elements", g + 1)));
    }
    let mut total = ConeRatFunc::zero(g);
    for j in 0..=g {
        let omega: Vec<IntegralElement> = alphas
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, a)| *a)
            .collect();
        let s = orientation_sign(field, &omega)?;
        if s == Sign::Zero {
            continue;
        }
        let sign = s.as_i64() * if j % 2 == 0 { 1 } else { -1 };
        let gj = generating_function(field, &omega)?.scale(field, &FieldElement::from_i64(sign, 0));
        total = total.add(&gj);
    }
    Ok(total)
}

/// Truncated indicator series `sum_{alpha in sigma-hat ∩ O_F, Tr alpha <= B} t^alpha`,
/// enumerated directly from upper-closure membership.
pub fn cone_indicator_series(field: &FieldSpec, gens: &[IntegralElement], bound: i64) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero();
    let g = field.degree();
    let range = bound.max(1) * 4;
    for a in -range..=range {
        for b in if g == 1 { 0..=0 } else { -range..=range } {
            let x = IntegralElement::new(a, b);
            if field.trace_int(&x) > bound || !field.is_totally_positive_int(&x) {
                continue;
            }
            if crate::cones::upper_closure_contains(field, gens, crate::cones::Region::Cone, &x.into())? {
                out.add_term(x, &FieldElement::one());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn el(a: i64, b: i64) -> IntegralElement {
        IntegralElement::new(a, b)
    }

    fn q5() -> FieldSpec {
        FieldSpec::real_quadratic(5).unwrap()
    }

    fn random_tp(f: &FieldSpec, rng: &mut ChaCha8Rng) -> IntegralElement {
        loop {
            let x = el(rng.gen_range(-6..7), rng.gen_range(-6..7));
            if f.is_totally_positive_int(&x) && x.content() == 1 {
                return x;
            }
        }
    }

    #[test]
    fn generating_function_examples() {
        let q = FieldSpec::rational();
        let g = generating_function(&q, &[el(1, 0)]).unwrap();
        assert_eq!(g.numerator, LaurentPoly::monomial(el(1, 0), FieldElement::one()));
        assert_eq!(g.denominator, BTreeMap::from([(el(1, 0), 1)]));
        let f = q5();
        let eps = f.fundamental_totally_positive_unit().unwrap();
        let g1 = generating_function(&f, &[el(1, 0), eps]).unwrap();
        assert_eq!(g1.numerator, LaurentPoly::monomial(el(1, 0), FieldElement::one()));
        let g2 = generating_function(&f, &[eps, el(1, 0)]).unwrap();
        assert!(g1.same_function(&g2));
    }

    #[test]
    fn rational_derivative() {
        let q = FieldSpec::rational();
        let g = generating_function(&q, &[el(1, 0)]).unwrap();
        let d = g.differentiate(&q, Derivation::Norm);
        let expect = ConeRatFunc {
            numerator: LaurentPoly::monomial(el(1, 0), FieldElement::one()),
            denominator: BTreeMap::from([(el(1, 0), 2)]),
            weight: vec![-1],
        };
        assert!(d.same_function(&expect));
        assert_eq!(d.weight, vec![-1]);
    }

    #[test]
    fn norm_eigenvalue_on_monomials() {
        let f = q5();
        let m = LaurentPoly::monomial(el(2, 3), FieldElement::from_i64(5, 0));
        let d = m.derive(&f, Derivation::Tau(0)).derive(&f, Derivation::Tau(1));
        assert_eq!(d, m.derive(&f, Derivation::Norm));
        let n = f.norm_int(&el(2, 3));
        assert_eq!(d, LaurentPoly::monomial(el(2, 3), FieldElement::from_i64(5 * n, 0)));
    }

    #[test]
    fn derivations_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [5, 8, 12] {
            let f = FieldSpec::real_quadratic(d).unwrap();
            for _ in 0..50 / 3 + 1 {
                let gens = [random_tp(&f, &mut rng), random_tp(&f, &mut rng)];
                if orientation_sign(&f, &gens).unwrap() == Sign::Zero {
                    continue;
                }
                let g = generating_function(&f, &gens).unwrap();
                let a = g.differentiate(&f, Derivation::Tau(0)).differentiate(&f, Derivation::Tau(1));
                let b = g.differentiate(&f, Derivation::Tau(1)).differentiate(&f, Derivation::Tau(0));
                assert!(a.same_function(&b));
                assert!(a.numerator.has_rational_coefficients());
                assert_eq!(a.weight, vec![-1, -1]);
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let q = FieldSpec::rational();
        assert!(cocycle_defect(&q, &[el(1, 0), el(1, 0)]).unwrap().is_zero());
        let f = q5();
        let eps = f.fundamental_totally_positive_unit().unwrap();
        let triple = [el(1, 0), el(1, 0) + eps, eps];
        let defect = cocycle_defect(&f, &triple).unwrap();
        assert!(defect.is_zero());
        // a single cone is not a cocycle on its own
        let g = generating_function(&f, &[el(1, 0), eps]).unwrap();
        assert!(!g.is_zero());
    }

    #[test]
    fn series_matches_indicator() {
        let q = FieldSpec::rational();
        let g = generating_function(&q, &[el(1, 0)]).unwrap();
        let s = g.series_expand(&q, 7).unwrap();
        let expect: Vec<IntegralElement> = (1..=7).map(|a| el(a, 0)).collect();
        assert_eq!(s.terms().keys().copied().collect::<Vec<_>>(), expect);
        let f = q5();
        let eps = f.fundamental_totally_positive_unit().unwrap();
        for gens in [[el(1, 0), eps], [el(2, 1), el(3, -1)], [el(1, 0), el(2, 1)]] {
            let g = generating_function(&f, &gens).unwrap();
            let s = g.series_expand(&f, 12).unwrap();
            assert!(s.terms().values().all(|c| *c == FieldElement::one()));
            assert_eq!(s, cone_indicator_series(&f, &gens, 12).unwrap());
        }
        // additivity under subdivision
        let r = el(1, 0) + eps;
        let whole = generating_function(&f, &[el(1, 0), eps]).unwrap().series_expand(&f, 12).unwrap();
        let left = generating_function(&f, &[el(1, 0), r]).unwrap().series_expand(&f, 12).unwrap();
        let right = generating_function(&f, &[r, eps]).unwrap().series_expand(&f, 12).unwrap();
        assert_eq!(whole, left.add(&right));
    }

    #[test]
    fn series_commutes_with_derivation() {
        let f = q5();
        let g = generating_function(&f, &[el(2, 1), el(3, -1)]).unwrap();
        for d in [Derivation::Tau(0), Derivation::Tau(1), Derivation::Norm] {
            let lhs = g.differentiate(&f, d).series_expand(&f, 10).unwrap();
            let rhs = g.series_expand(&f, 10).unwrap().derive(&f, d);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unit_substitution_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [5, 8, 12] {
            let f = FieldSpec::real_quadratic(d).unwrap();
            let eps = f.fundamental_totally_positive_unit().unwrap();
            for _ in 0..10 {
                let gens = [random_tp(&f, &mut rng), random_tp(&f, &mut rng)];
                if orientation_sign(&f, &gens).unwrap() == Sign::Zero {
                    continue;
                }
                let g = generating_function(&f, &gens).unwrap();
                let moved: Vec<IntegralElement> = gens.iter().map(|a| f.mul_int(&eps, a)).collect();
                let gm = generating_function(&f, &moved).unwrap();
                assert!(g.substitute_unit(&f, &eps).same_function(&gm));
                let dk = g.norm_derivative(&f, 1).substitute_unit(&f, &eps);
                assert!(dk.same_function(&gm.norm_derivative(&f, 1)));
            }
        }
    }

    #[test]
    fn json_dump() {
        let q = FieldSpec::rational();
        let g = generating_function(&q, &[el(1, 0)]).unwrap();
        assert_eq!(g.to_json(), r#"{"numerator":[[[1],"1"]],"denominator":[[[1],1]],"weight":[0]}"#);
    }
}
