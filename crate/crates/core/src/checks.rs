//! Seeded verification drivers shared by the command line and the test suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cones::{orientation_sign, Cone, Fan};
use crate::cyclotomic::CycNumber;
use crate::error::Result;
use crate::field::{FieldElement, FieldSpec, IntegralElement, Sign};
use crate::genfun::{cocycle_defect, generating_function, LaurentPoly};
use crate::residue::{torsion_points, IdealSpec, TorsionPoint};
use crate::zeta::lerch_value;

/// SHA-256 of the JSON form of a fan, in hex.
pub fn fan_hash(fan: &Fan) -> String {
    hex::encode(Sha256::digest(fan.to_json().as_bytes()))
}

/// Primitive totally positive element with coordinates in `[-bound, bound]`.
pub fn random_primitive_totally_positive(field: &FieldSpec, rng: &mut ChaCha8Rng, bound: i64) -> IntegralElement {
    if field.degree() == 1 {
        return IntegralElement::new(1, 0);
    }
    loop {
        let x = IntegralElement::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if field.is_totally_positive_int(&x) && x.content() == 1 {
            return x;
        }
    }
}

/// One cocycle trial: the rational-function defect and the series cross-check.
#[derive(Clone, Debug)]
pub struct CocycleTrial {
    pub elements: Vec<IntegralElement>,
    /// `sum (-1)^j sgn(omega_j) G_{omega_j} = 0` as a rational function.
    pub defect_zero: bool,
    /// The same signed sum of separately expanded series vanishes up to the trace bound.
    pub series_zero: bool,
}

impl CocycleTrial {
    pub fn passed(&self) -> bool {
        self.defect_zero && self.series_zero
    }
}

/// Signed sum of the truncated series of the `g + 1` faces, each expanded on its own.
pub fn cocycle_series(field: &FieldSpec, alphas: &[IntegralElement], bound: i64) -> Result<LaurentPoly> {
    let g = field.degree();
    let mut total = LaurentPoly::zero();
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
        let series = generating_function(field, &omega)?.series_expand(field, bound)?;
        total = total.add(&series.scale(field, &FieldElement::from_i64(sign, 0)));
    }
    Ok(total)
}

/// `trials` random `(g+1)`-tuples; trial `t` draws from stream `t` of the seeded generator.
pub fn check_cocycle(field: &FieldSpec, trials: usize, seed: u64, bound: i64) -> Result<Vec<CocycleTrial>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let elements: Vec<IntegralElement> = (0..=field.degree())
                .map(|_| random_primitive_totally_positive(field, &mut rng, 8))
                .collect();
            let defect_zero = cocycle_defect(field, &elements)?.is_zero();
            let series_zero = cocycle_series(field, &elements, bound)?.is_zero();
            Ok(CocycleTrial {
                elements,
                defect_zero,
                series_zero,
            })
        })
        .collect()
}

/// Random primitive element strictly inside the top cone `(a, b)`: `prim(x a + y b)`.
fn interior_ray(a: &IntegralElement, b: &IntegralElement, rng: &mut ChaCha8Rng) -> IntegralElement {
    let x = rng.gen_range(1..=4);
    let y = rng.gen_range(1..=4);
    (*a * x + *b * y).primitive_part()
}

/// The standard fan followed by a once- and a twice-subdivided fan, with
/// new rays `prim(x a + y b)` for seeded `x, y in 1..=4`.
pub fn subdivided_fans(field: &FieldSpec, seed: u64) -> Result<Vec<Fan>> {
    let standard = Fan::standard(field)?;
    let mut out = vec![standard.clone()];
    if field.degree() == 1 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fan = standard;
    for _ in 0..2 {
        let cones = fan.top_cones();
        let sigma: Cone = cones[rng.gen_range(0..cones.len())].clone();
        let ray = interior_ray(&sigma.gens[0], &sigma.gens[1], &mut rng);
        fan = fan.subdivide(&sigma, &ray)?;
        out.push(fan.clone());
    }
    Ok(out)
}

/// Lerch values of one `(xi, k)` over several fans.
#[derive(Clone, Debug)]
pub struct FanComparison {
    pub xi: TorsionPoint,
    pub k: u32,
    pub values: Vec<CycNumber>,
}

impl FanComparison {
    pub fn agrees(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// Compares `L(xi Delta, -k)` across `fans` for every nontrivial `xi in T[f]`.
pub fn check_fan_independence(ideal: &IdealSpec, ks: &[u32], fans: &[Fan]) -> Result<Vec<FanComparison>> {
    let jobs: Vec<(TorsionPoint, u32)> = torsion_points(ideal)
        .into_iter()
        .filter(|xi| !xi.is_trivial())
        .flat_map(|xi| ks.iter().map(move |&k| (xi.clone(), k)))
        .collect();
    jobs.into_par_iter()
        .map(|(xi, k)| {
            let values = fans.iter().map(|fan| lerch_value(&xi, k, fan)).collect::<Result<Vec<_>>>()?;
            Ok(FanComparison { xi, k, values })
        })
        .collect()
}
