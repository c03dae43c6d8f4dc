//! Special values at `s = -k`: Shintani zeta values of single cones, Lerch
//! zeta values `L(xi Delta, -k)` as sums over a fan adapted to `xi`, and
//! Hecke L-values through the Fourier expansion of the character.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith;
use crate::cones::{adapt_fan_to, AdaptedFan, Cone, Fan};
use crate::cyclotomic::{canonical_level, sqrt_disc, CycAccumulator, CycNumber};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::genfun::{generating_function, ConeRatFunc};
use crate::residue::{fourier_coefficient, orbit_representatives, validate_character, HeckeCharacter, TorsionPoint};

/// What to evaluate.
#[derive(Clone, Debug)]
pub enum Target {
    Lerch(TorsionPoint),
    Hecke(HeckeCharacter),
}

/// A value request at `s = -k` with an optional user fan.
#[derive(Clone, Debug)]
pub struct ZetaRequest {
    pub field: FieldSpec,
    pub target: Target,
    pub k: u32,
    pub fan: Option<Fan>,
}

impl ZetaRequest {
    pub fn evaluate(&self) -> Result<CycNumber> {
        let fan = match &self.fan {
            Some(f) => f.clone(),
            None => Fan::standard(&self.field)?,
        };
        match &self.target {
            Target::Lerch(xi) => lerch_value(xi, self.k, &fan),
            Target::Hecke(chi) => hecke_l_value(chi, self.k, &fan),
        }
    }
}

/// Level on which specializations over `F` live: `lcm(n, D)` for quadratic `F`.
pub fn value_level(field: &FieldSpec, n: u64) -> u64 {
    if field.is_rational() {
        n
    } else {
        arith::lcm(n, field.disc() as u64)
    }
}

/// `1 / (1 - zeta_N^e) = -(1/d) sum_{j<d} j zeta_N^{e j}` with `d` the order of `zeta_N^e`.
fn inverse_one_minus_root(level: u64, e: i64) -> Result<CycNumber> {
    let e = e.rem_euclid(level as i64);
    if e == 0 {
        return Err(Error::Pole(format!("exponent {e} at level {level}")));
    }
    let d = level as i64 / arith::gcd(level as i64, e);
    let mut acc = CycAccumulator::new(level);
    for j in 1..d {
        acc.add_term(e * j, &BigRational::new(BigInt::from(-j), BigInt::from(d)));
    }
    Ok(acc.finish())
}

/// Evaluates a cone-shaped rational function at `t = xi`, with `F`-coefficients
/// mapped into `Q(zeta_N)` through `sqrt(D) -> ` the positive Gauss sum.
pub fn specialize(field: &FieldSpec, f: &ConeRatFunc, xi: &TorsionPoint) -> Result<CycNumber> {
    let n = xi.level();
    let level = value_level(field, n);
    let shift = (level / n) as i64;
    let mut num = CycAccumulator::new(level);
    let mut root_d = None;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (t, _) = field.omega_poly();
    for (alpha, c) in f.numerator.terms() {
        let e = xi.exponent_at(alpha) * shift;
        // c = a + b w = (a + b t/2) + (b/2) sqrt(D)
        let rat = &c.a + &(&c.b * BigRational::from_integer(t.into()) * &half);
        if !rat.is_zero() {
            num.add_term(e, &rat);
        }
        if !c.b.is_zero() {
            if root_d.is_none() {
                root_d = Some(sqrt_disc(field.disc(), level)?);
            }
            num.add_scaled(root_d.as_ref().unwrap(), e, &(&c.b * &half));
        }
    }
    let mut value = num.finish();
    for (a, &m) in &f.denominator {
        let inv = inverse_one_minus_root(level, xi.exponent_at(a) * shift)?;
        for _ in 0..m {
            value = &value * &inv;
        }
    }
    Ok(value)
}

fn check_pole_free(cone: &Cone, xi: &TorsionPoint) -> Result<()> {
    for a in &cone.gens {
        if xi.is_trivial_at(a) {
            return Err(Error::Pole(format!("{a} of {cone} under {xi}")));
        }
    }
    Ok(())
}

/// `zeta_sigma(xi, -k) = d^k G_sigma(xi)` for a weight vector `k`, in
/// `Q(zeta_N)` with `N = lcm(level(xi), D)`.
pub fn shintani_value(field: &FieldSpec, cone: &Cone, xi: &TorsionPoint, k: &[u32]) -> Result<CycNumber> {
    if k.len() != field.degree() {
        return Err(Error::Degenerate(format!("weight has {} entries, expected {}", k.len(), field.degree())));
    }
    check_pole_free(cone, xi)?;
    let g = generating_function(field, &cone.gens)?;
    let f = if k.iter().all(|&x| x == k[0]) {
        g.norm_derivative(field, k[0])
    } else {
        g.derivative(field, k)
    };
    specialize(field, &f, xi)
}

/// Non-diagonal weights: no descent to `Q(zeta_n)` is attempted.
pub fn vector_weight_value(field: &FieldSpec, cone: &Cone, xi: &TorsionPoint, k: &[u32]) -> Result<CycNumber> {
    shintani_value(field, cone, xi, k)
}

/// A Lerch value before and after descent to `Q(zeta_n)`.
#[derive(Clone, Debug)]
pub struct LerchEvaluation {
    /// Sum of cone values in `Q(zeta_{lcm(n, D)})`.
    pub raw: CycNumber,
    /// The same number at the canonical level of `n`.
    pub value: CycNumber,
    /// The adapted fan the sum ran over.
    pub fan: AdaptedFan,
}

/// `L(xi Delta, -k)`, keeping the undescended sum and the adapted fan.
pub fn lerch_evaluation(xi: &TorsionPoint, k: u32, fan: &Fan) -> Result<LerchEvaluation> {
    if xi.is_trivial() {
        return Err(Error::TrivialTorsionPoint);
    }
    let field = fan.field();
    let adapted = adapt_fan_to(fan, xi)?;
    let weight = vec![k; field.degree()];
    let level = value_level(field, xi.level());
    let mut raw = CycNumber::zero(level);
    // G_{u sigma}(xi) = G_sigma(xi^u): each local cone is read at its twisted point
    for c in adapted.top_cones() {
        raw = &raw + &shintani_value(field, &c.cone, adapted.point(c.copy), &weight)?;
    }
    let copies = adapted.covering_degree();
    if copies > 1 {
        raw = raw.scale(&BigRational::new(BigInt::one(), BigInt::from(copies)));
    }
    let value = raw.restrict_to_subfield(xi.level())?;
    Ok(LerchEvaluation { raw, value, fan: adapted })
}

/// `L(xi Delta, -k)` in `Q(zeta_n)`, `n` the order of `xi`.
pub fn lerch_value(xi: &TorsionPoint, k: u32, fan: &Fan) -> Result<CycNumber> {
    Ok(lerch_evaluation(xi, k, fan)?.value)
}

/// `L(chi, -k) = sum_{xi in U[f]/Delta} c_chi(xi) L(xi Delta, -k)`.
pub fn hecke_l_value(chi: &HeckeCharacter, k: u32, fan: &Fan) -> Result<CycNumber> {
    let field = chi.field();
    if field != fan.field() {
        return Err(Error::InvalidFan("fan and character live over different fields".into()));
    }
    if !field.has_narrow_class_number_one() {
        return Err(Error::Unsupported(format!(
            "{} is not in the narrow class number one allowlist",
            field.label()
        )));
    }
    let ideal = chi.conductor();
    if ideal.is_unit() {
        return Err(Error::InvalidCharacter("conductor must be a proper ideal".into()));
    }
    let report = validate_character(chi);
    if !report.is_valid() {
        return Err(Error::InvalidCharacter(format!("character axioms fail: {report:?}")));
    }
    if !report.primitive {
        return Err(Error::InvalidCharacter(format!("character is not primitive of conductor {ideal}")));
    }
    let reps = orbit_representatives(ideal, true)?;
    let terms: Vec<Result<Option<CycNumber>>> = reps
        .par_iter()
        .map(|(xi, _)| {
            let c = fourier_coefficient(chi, xi)?;
            if c.is_zero() {
                return Ok(None);
            }
            let l = lerch_value(xi, k, fan)?;
            Ok(Some(&c * &l))
        })
        .collect();
    let mut total = CycNumber::zero(1);
    for t in terms {
        if let Some(v) = t? {
            total = &total + &v;
        }
    }
    Ok(total.simplify())
}

/// The canonical level of the subfield a diagonal Lerch value lives in.
pub fn lerch_level(xi: &TorsionPoint) -> u64 {
    canonical_level(xi.level())
}

/// `L(xi Delta, -k)` with the standard fan.
pub fn lerch_standard(field: &FieldSpec, xi: &TorsionPoint, k: u32) -> Result<CycNumber> {
    lerch_value(xi, k, &Fan::standard(field)?)
}

/// Embeds a field element into `Q(zeta_N)`, `D | N`, via the positive Gauss sum.
pub fn embed_element(field: &FieldSpec, x: &FieldElement, level: u64) -> Result<CycNumber> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (t, _) = field.omega_poly();
    let rat = &x.a + &(&x.b * BigRational::from_integer(t.into()) * &half);
    let mut out = CycNumber::from_rational(level, rat);
    if !x.b.is_zero() {
        out = &out + &sqrt_disc(field.disc(), level)?.scale(&(&x.b * &half));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::IntegralElement;
    use crate::residue::{torsion_points, IdealSpec};

    fn q() -> FieldSpec {
        FieldSpec::rational()
    }

    fn rat(p: i64, d: i64) -> CycNumber {
        CycNumber::from_rational(1, BigRational::new(p.into(), d.into()))
    }

    #[test]
    fn rational_anchor_values() {
        let f = q();
        let cone = Cone::new(vec![IntegralElement::new(1, 0)]);
        let minus_one = TorsionPoint::new(2, vec![1]);
        assert_eq!(shintani_value(&f, &cone, &minus_one, &[0]).unwrap(), rat(-1, 2));
        assert_eq!(shintani_value(&f, &cone, &minus_one, &[1]).unwrap(), rat(-1, 4));
        let z3 = TorsionPoint::new(3, vec![1]);
        let z = CycNumber::root_of_unity(3, 1);
        let expect = &z * &(&CycNumber::one(3) - &z).inverse().unwrap();
        assert_eq!(shintani_value(&f, &cone, &z3, &[0]).unwrap(), expect);
        let i = TorsionPoint::new(4, vec![1]);
        let half = BigRational::new((1).into(), (2).into());
        let expect = &CycNumber::from_rational(4, -half.clone()) + &CycNumber::root_of_unity(4, 1).scale(&half);
        assert_eq!(lerch_standard(&f, &i, 0).unwrap(), expect);
    }

    #[test]
    fn pole_is_rejected() {
        let f = FieldSpec::real_quadratic(5).unwrap();
        let cone = Cone::new(vec![IntegralElement::new(1, 0), IntegralElement::new(1, 1)]);
        let xi = TorsionPoint::new(2, vec![0, 1]);
        assert!(matches!(shintani_value(&f, &cone, &xi, &[0, 0]), Err(Error::Pole(_))));
        assert!(matches!(lerch_standard(&f, &TorsionPoint::trivial(2), 0), Err(Error::TrivialTorsionPoint)));
    }

    #[test]
    fn inverse_one_minus_root_is_inverse() {
        for level in [2u64, 3, 4, 6, 10, 12] {
            for e in 1..level as i64 {
                let x = &CycNumber::one(level) - &CycNumber::root_of_unity(level, e);
                let inv = inverse_one_minus_root(level, e).unwrap();
                assert_eq!(&x * &inv, CycNumber::one(level));
            }
        }
    }

    #[test]
    fn q_sqrt5_mod_2_is_rational() {
        let f = FieldSpec::real_quadratic(5).unwrap();
        let ideal = IdealSpec::principal(&f, &IntegralElement::new(2, 0)).unwrap();
        let mut vals = Vec::new();
        for xi in torsion_points(&ideal).into_iter().skip(1) {
            for k in 0..2 {
                let v = lerch_standard(&f, &xi, k).unwrap();
                assert!(v.is_rational(), "{xi} k={k}: {v}");
                if k == 0 {
                    vals.push(v);
                }
            }
        }
        assert!(vals.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn diagonal_vector_weight_agrees() {
        let f = FieldSpec::real_quadratic(5).unwrap();
        let cone = Cone::new(vec![IntegralElement::new(1, 1), IntegralElement::new(2, 1)]);
        let xi = TorsionPoint::new(3, vec![1, 0]);
        let a = shintani_value(&f, &cone, &xi, &[1, 1]).unwrap();
        let b = specialize(
            &f,
            &generating_function(&f, &cone.gens).unwrap().derivative(&f, &[1, 1]),
            &xi,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vector_weights_swap_under_galois() {
        // an automorphism with sqrt(5) -> -sqrt(5) carries k = (1,0) at xi to k = (0,1) at xi^j
        let f = FieldSpec::real_quadratic(5).unwrap();
        let cone = Cone::new(vec![IntegralElement::new(1, 1), IntegralElement::new(2, 1)]);
        let xi = TorsionPoint::new(3, vec![1, 0]);
        let j = 2; // coprime to 15, non-residue mod 5
        let a = vector_weight_value(&f, &cone, &xi, &[1, 0]).unwrap();
        let b = vector_weight_value(&f, &cone, &xi.power(j), &[0, 1]).unwrap();
        assert_eq!(a.galois_apply(j).unwrap(), b);
        // non-diagonal weights generally leave Q(zeta_n)
        let mut escapes = 0;
        for gens in [[(1, 0), (1, 1)], [(2, 1), (3, 2)], [(1, 1), (2, 1)]] {
            let cone = Cone::new(gens.iter().map(|&(a, b)| IntegralElement::new(a, b)).collect());
            for exps in [[1, 0], [0, 1], [1, 1], [1, 2]] {
                let xi = TorsionPoint::new(3, exps.to_vec());
                if let Ok(v) = vector_weight_value(&f, &cone, &xi, &[1, 0]) {
                    escapes += v.restrict_to_subfield(3).is_err() as usize;
                }
            }
        }
        assert!(escapes > 0);
    }

    #[test]
    fn embedding_swap_leaves_lerch_values() {
        let f = FieldSpec::real_quadratic(5).unwrap();
        let fs = f.with_swapped_embeddings();
        let ideal = IdealSpec::principal(&f, &IntegralElement::new(3, 0)).unwrap();
        for xi in torsion_points(&ideal).into_iter().skip(1).take(4) {
            for k in 0..2 {
                assert_eq!(lerch_standard(&f, &xi, k).unwrap(), lerch_standard(&fs, &xi, k).unwrap());
            }
        }
    }

    #[test]
    fn embed_element_sqrt() {
        let f = FieldSpec::real_quadratic(5).unwrap();
        let w = embed_element(&f, &FieldElement::from_i64(0, 1), 5).unwrap();
        // w^2 = w + 1
        assert_eq!(&w * &w, &w + &CycNumber::one(5));
    }
}
