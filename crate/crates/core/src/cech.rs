//! Finite chain complexes of a fan modulo the isotropy group of a torsion
//! point: boundary matrices, homology through Smith normal form, the
//! fundamental class, and the pairing of equivariant cochains against it.
//!
//! For `g = 2` the quotient is a triangulated circle: one 0-cell per ray
//! class and one 1-cell `(r_i, r_{i+1})` per top-cone class.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cones::{adapt_fan_to, orientation_sign, AdaptedFan, Cone, Fan, TwistedCone};
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, IntegralElement, Sign};
use crate::intmat::{smith, IMat};
use crate::residue::TorsionPoint;
use crate::zeta::{shintani_value, value_level};

/// Cells of `C_q(Delta' \ Phi)` for `Delta' = <eps^period>` (equal to the
/// isotropy group when the fan period is the isotropy index). Cells are kept
/// in the local coordinates of their period copy.
#[derive(Clone, Debug)]
pub struct QuotientComplex {
    field: FieldSpec,
    /// Representative cells by dimension `q = 0..g-1`.
    cells: Vec<Vec<TwistedCone>>,
    /// `xi` twisted into the frame of each copy.
    points: Vec<TorsionPoint>,
    /// Orientation `sgn(alpha)` of each top cell representative.
    orientations: Vec<Sign>,
    /// `boundaries[q]` maps `C_{q+1} -> C_q`; the last entry is the augmentation `C_0 -> Z`.
    boundaries: Vec<IMat>,
    /// `[Delta_xi : Delta']`.
    copies: u64,
}

/// `(rank, torsion coefficients)` of one homology group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl QuotientComplex {
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn cells(&self, q: usize) -> &[TwistedCone] {
        &self.cells[q]
    }

    pub fn top_cells(&self) -> &[TwistedCone] {
        &self.cells[self.degree() - 1]
    }

    /// The point against which cells of copy `j` are evaluated.
    pub fn point(&self, copy: usize) -> &TorsionPoint {
        &self.points[copy]
    }

    pub fn orientations(&self) -> &[Sign] {
        &self.orientations
    }

    /// `d_q : C_q -> C_{q-1}` for `q >= 1`.
    pub fn boundary(&self, q: usize) -> Option<&IMat> {
        if q == 0 || q >= self.degree() {
            None
        } else {
            Some(&self.boundaries[q - 1])
        }
    }

    pub fn augmentation(&self) -> &IMat {
        self.boundaries.last().unwrap()
    }

    /// `[Delta_xi : Delta']`: how often the cells cover `T_xi`.
    pub fn copies(&self) -> u64 {
        self.copies
    }

    /// `d o d = 0` along the augmented complex.
    pub fn is_complex(&self) -> bool {
        self.boundaries.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Flips the orientation of one top cell (a negative control).
    pub fn with_flipped_orientation(&self, i: usize) -> QuotientComplex {
        let mut out = self.clone();
        out.orientations[i] = out.orientations[i].flip();
        out
    }
}

/// Builds the quotient complex of a fan adapted to its torsion point.
pub fn build_quotient_complex(fan: &AdaptedFan) -> Result<QuotientComplex> {
    let field = fan.field().clone();
    if let Some((j, r)) = fan.rays().into_iter().find(|(j, r)| fan.point(*j).is_trivial_at(r)) {
        return Err(Error::InvalidFan(format!("fan is not adapted: {}({r}) = 1 in copy {j}", fan.point(j))));
    }
    let points = (0..fan.copies()).map(|j| fan.point(j).clone()).collect();
    match field.degree() {
        1 => Ok(QuotientComplex {
            field,
            cells: vec![fan.top_cones()],
            points,
            orientations: vec![Sign::Positive],
            boundaries: vec![IMat::from_rows(&[vec![1]])],
            copies: 1,
        }),
        2 => {
            let rays: Vec<TwistedCone> = fan
                .rays()
                .into_iter()
                .map(|(copy, r)| TwistedCone {
                    copy,
                    shift: copy as u64 * fan.base().period(),
                    cone: Cone::new(vec![r]),
                })
                .collect();
            let n = rays.len();
            let tops = fan.top_cones();
            // a totally positive unit of norm 1 does not change orientations
            let orientations = tops
                .iter()
                .map(|c| orientation_sign(&field, &c.cone.gens))
                .collect::<Result<Vec<_>>>()?;
            // d(r_i, r_{i+1}) = <r_{i+1}> - <r_i>, with r_n identified with r_0
            let mut d1 = IMat::zeros(n, n);
            for i in 0..n {
                d1[(i, i)] -= 1;
                d1[((i + 1) % n, i)] += 1;
            }
            let aug = IMat::from_rows(&[vec![1; n]]);
            Ok(QuotientComplex {
                field,
                cells: vec![rays, tops],
                points,
                orientations,
                boundaries: vec![d1, aug],
                copies: fan.covering_degree(),
            })
        }
        g => Err(Error::UnsupportedDegree(g)),
    }
}

/// `H_q` for `q = 0..g-1`, from Smith normal forms of the boundary matrices.
pub fn homology_ranks(c: &QuotientComplex) -> Vec<HomologyGroup> {
    let g = c.degree();
    let dims: Vec<usize> = (0..g).map(|q| c.cells(q).len()).collect();
    let mut out = Vec::with_capacity(g);
    for q in 0..g {
        // ker d_q (d_0 = 0) modulo im d_{q+1}
        let ker = match c.boundary(q) {
            None => dims[q],
            Some(d) => dims[q] - smith(d).rank(),
        };
        let (im_rank, torsion) = match c.boundary(q + 1) {
            None => (0, vec![]),
            Some(d) => {
                let s = smith(d);
                let diag = s.diagonal();
                (s.rank(), diag.into_iter().filter(|x| x.abs() > 1).map(|x| x.abs()).collect())
            }
        };
        out.push(HomologyGroup {
            rank: ker - im_rank,
            torsion,
        });
    }
    out
}

/// The oriented top cells `sum sgn(sigma) <sigma>` as an integer chain.
pub fn fundamental_chain(c: &QuotientComplex) -> Vec<i64> {
    c.orientations().iter().map(|s| s.as_i64()).collect()
}

/// Whether the oriented sum of top cells is a cycle.
pub fn fundamental_class_check(c: &QuotientComplex) -> bool {
    match c.boundary(c.degree() - 1) {
        None => true,
        Some(d) => d.mul_vec(&fundamental_chain(c)).iter().all(|&x| x == 0),
    }
}

/// A `Delta'`-invariant alternating cochain, stored by its values on the
/// cell representatives of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantCochain {
    pub dim: usize,
    pub values: Vec<CycNumber>,
}

impl EquivariantCochain {
    pub fn zero(c: &QuotientComplex, dim: usize) -> Self {
        EquivariantCochain {
            dim,
            values: vec![CycNumber::zero(1); c.cells(dim).len()],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        EquivariantCochain {
            dim: self.dim,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        EquivariantCochain {
            dim: self.dim,
            values: self.values.iter().map(|v| v.scale(r)).collect(),
        }
    }

    /// `(d f)(sigma) = sum_j (-1)^j f(face_j sigma)` through the transpose of `d`.
    pub fn coboundary(&self, c: &QuotientComplex) -> Result<Self> {
        let d = c
            .boundary(self.dim + 1)
            .ok_or_else(|| Error::Degenerate(format!("no coboundary out of degree {}", self.dim)))?;
        let mut values = Vec::with_capacity(d.cols());
        for j in 0..d.cols() {
            let mut acc = CycNumber::zero(1);
            for i in 0..d.rows() {
                let m = d[(i, j)];
                if m != 0 {
                    acc = &acc + &self.values[i].scale(&BigRational::from_integer(BigInt::from(m)));
                }
            }
            values.push(acc);
        }
        Ok(EquivariantCochain { dim: self.dim + 1, values })
    }
}

/// `sigma -> sgn(sigma) d^k G_sigma(xi)` on the top cells.
pub fn shintani_cocycle(c: &QuotientComplex, k: u32) -> Result<EquivariantCochain> {
    let field = &c.field;
    let weight = vec![k; field.degree()];
    let values = c
        .top_cells()
        .iter()
        .zip(c.orientations())
        .map(|(cell, s)| {
            let v = shintani_value(field, &cell.cone, c.point(cell.copy), &weight)?;
            Ok(v.scale(&BigRational::from_integer(BigInt::from(s.as_i64()))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivariantCochain {
        dim: field.degree() - 1,
        values,
    })
}

/// `<eta, [T]> = sum sgn(sigma) eta(sigma)` over the top cell representatives.
pub fn pairing(eta: &EquivariantCochain, c: &QuotientComplex) -> CycNumber {
    let mut acc = CycNumber::zero(1);
    for (v, s) in eta.values.iter().zip(c.orientations()) {
        match s {
            Sign::Positive => acc = &acc + v,
            Sign::Negative => acc = &acc - v,
            Sign::Zero => {}
        }
    }
    acc
}

/// Random cochain in degree `dim` with small rational coefficients at `level`.
pub fn random_cochain(c: &QuotientComplex, dim: usize, level: u64, rng: &mut ChaCha8Rng) -> EquivariantCochain {
    let deg = crate::cyclotomic::field_degree(level);
    let values = (0..c.cells(dim).len())
        .map(|_| {
            let coeffs = (0..deg)
                .map(|_| BigRational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=6))))
                .collect();
            CycNumber::from_coeffs(level, coeffs).expect("length matches")
        })
        .collect();
    EquivariantCochain { dim, values }
}

/// Outcome of the coboundary trials.
#[derive(Clone, Debug)]
pub struct CoboundaryReport {
    pub trials: usize,
    /// Indices of trials whose coboundary paired to something nonzero.
    pub failures: Vec<usize>,
    /// Whether adding each coboundary left the Shintani pairing unchanged.
    pub shintani_stable: bool,
}

impl CoboundaryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.shintani_stable
    }
}

/// Pairs `d f` for `trials` seeded random equivariant 0-cochains `f`
/// against the fundamental class. Trial `i` draws from stream `i` of the
/// generator seeded with `seed`.
pub fn coboundary_invariance(fan: &Fan, xi: &TorsionPoint, k: u32, trials: usize, seed: u64) -> Result<CoboundaryReport> {
    if fan.field().degree() != 2 {
        return Err(Error::UnsupportedDegree(fan.field().degree()));
    }
    let c = build_quotient_complex(&adapt_fan_to(fan, xi)?)?;
    let eta = shintani_cocycle(&c, k)?;
    let base = pairing(&eta, &c);
    let level = value_level(fan.field(), xi.level());
    let results: Vec<Result<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let f = random_cochain(&c, 0, level, &mut rng);
            let df = f.coboundary(&c)?;
            let zero = pairing(&df, &c).is_zero();
            let stable = pairing(&eta.add(&df), &c) == base;
            Ok((zero, stable))
        })
        .collect();
    let mut failures = Vec::new();
    let mut shintani_stable = true;
    for (t, r) in results.into_iter().enumerate() {
        let (zero, stable) = r?;
        if !zero {
            failures.push(t);
        }
        shintani_stable &= stable;
    }
    Ok(CoboundaryReport {
        trials,
        failures,
        shintani_stable,
    })
}

/// All checks for one `(fan, xi)`.
#[derive(Clone, Debug)]
pub struct CechReport {
    pub complex: bool,
    pub homology: Vec<HomologyGroup>,
    pub fundamental_class: bool,
    /// The Shintani pairing divided by the covering degree, to compare with Lerch values.
    pub pairing: CycNumber,
}

pub fn cech_report(fan: &Fan, xi: &TorsionPoint, k: u32) -> Result<CechReport> {
    let c = build_quotient_complex(&adapt_fan_to(fan, xi)?)?;
    let eta = shintani_cocycle(&c, k)?;
    let mut p = pairing(&eta, &c);
    if c.copies() > 1 {
        p = p.scale(&BigRational::new(BigInt::from(1), BigInt::from(c.copies())));
    }
    Ok(CechReport {
        complex: c.is_complex(),
        homology: homology_ranks(&c),
        fundamental_class: fundamental_class_check(&c),
        pairing: p,
    })
}

/// `H_0 = H_1 = Z` without torsion, as for a circle (or `H_0 = Z` over `Q`).
pub fn is_circle_homology(h: &[HomologyGroup]) -> bool {
    h.iter().all(|g| g.rank == 1 && g.torsion.is_empty())
}

/// The unit translate `u sigma` of a cell, for equivariance checks.
pub fn translate_cell(field: &FieldSpec, cell: &Cone, u: &IntegralElement) -> Cone {
    cell.translate(field, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{torsion_points, IdealSpec};
    use crate::zeta::lerch_value;

    fn q5() -> FieldSpec {
        FieldSpec::real_quadratic(5).unwrap()
    }

    fn nontrivial(f: &FieldSpec, c: i64) -> Vec<TorsionPoint> {
        let ideal = IdealSpec::principal(f, &IntegralElement::new(c, 0)).unwrap();
        torsion_points(&ideal).into_iter().skip(1).collect()
    }

    #[test]
    fn rational_complex() {
        let f = FieldSpec::rational();
        let fan = Fan::standard(&f).unwrap();
        let xi = TorsionPoint::new(3, vec![1]);
        let c = build_quotient_complex(&adapt_fan_to(&fan, &xi).unwrap()).unwrap();
        assert_eq!(homology_ranks(&c), vec![HomologyGroup { rank: 1, torsion: vec![] }]);
        assert!(fundamental_class_check(&c));
        assert!(c.is_complex());
    }

    #[test]
    fn circle_for_q_sqrt5() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        for c in [2, 3] {
            for xi in nontrivial(&f, c) {
                let adapted = adapt_fan_to(&fan, &xi).unwrap();
                let cx = build_quotient_complex(&adapted).unwrap();
                let e = xi.isotropy_index(&f).unwrap() as usize;
                assert_eq!(cx.top_cells().len() % e, 0);
                assert!(cx.is_complex());
                assert!(is_circle_homology(&homology_ranks(&cx)));
                assert!(fundamental_class_check(&cx));
                if cx.top_cells().len() > 1 {
                    assert!(!fundamental_class_check(&cx.with_flipped_orientation(0)));
                }
            }
        }
    }

    #[test]
    fn unadapted_fan_is_rejected() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        let xi = TorsionPoint::new(2, vec![0, 1]); // trivial at 1
        assert!(build_quotient_complex(&AdaptedFan::expanded(&fan, &xi).unwrap()).is_err());
        assert!(build_quotient_complex(&adapt_fan_to(&fan, &xi).unwrap()).is_ok());
    }

    #[test]
    fn pairing_matches_lerch() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        for xi in nontrivial(&f, 2) {
            for k in 0..2 {
                let r = cech_report(&fan, &xi, k).unwrap();
                assert_eq!(r.pairing, lerch_value(&xi, k, &fan).unwrap());
            }
        }
    }

    #[test]
    fn pairing_is_linear() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        let xi = nontrivial(&f, 3).remove(0);
        let adapted = adapt_fan_to(&fan, &xi).unwrap();
        let c = build_quotient_complex(&adapted).unwrap();
        assert!(pairing(&EquivariantCochain::zero(&c, 1), &c).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_cochain(&c, 1, 3, &mut rng);
        let b = random_cochain(&c, 1, 3, &mut rng);
        let two = BigRational::from_integer(2.into());
        assert_eq!(
            pairing(&a.scale(&two).add(&b), &c),
            &pairing(&a, &c).scale(&two) + &pairing(&b, &c)
        );
    }

    #[test]
    fn single_ray_coboundary_vanishes() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        let xi = nontrivial(&f, 3).remove(0);
        let adapted = adapt_fan_to(&fan, &xi).unwrap();
        let c = build_quotient_complex(&adapted).unwrap();
        for i in 0..c.cells(0).len() {
            let mut f0 = EquivariantCochain::zero(&c, 0);
            f0.values[i] = CycNumber::one(1);
            assert!(pairing(&f0.coboundary(&c).unwrap(), &c).is_zero());
        }
    }

    #[test]
    fn seeded_coboundary_trials() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        let xi = nontrivial(&f, 2).remove(0);
        let r = coboundary_invariance(&fan, &xi, 0, 20, 7).unwrap();
        assert!(r.passed());
        assert_eq!(r.trials, 20);
    }

    #[test]
    fn cell_translation_keeps_values() {
        let f = q5();
        let fan = Fan::standard(&f).unwrap();
        for xi in nontrivial(&f, 3) {
            let adapted = adapt_fan_to(&fan, &xi).unwrap();
            let c = build_quotient_complex(&adapted).unwrap();
            let e = xi.isotropy_index(&f).unwrap();
            let u = f.pow_int(&f.fundamental_totally_positive_unit().unwrap(), e as u32);
            let eps = f.fundamental_totally_positive_unit().unwrap();
            for cell in c.top_cells() {
                let x = c.point(cell.copy);
                let moved = translate_cell(&f, &cell.cone, &u);
                let v = shintani_value(&f, &cell.cone, x, &[1, 1]).unwrap();
                assert_eq!(v, shintani_value(&f, &moved, x, &[1, 1]).unwrap());
                // the local cell evaluated at the twisted point is the actual cell at xi
                let actual = translate_cell(&f, &cell.cone, &f.pow_int(&eps, cell.shift as u32));
                assert_eq!(v, shintani_value(&f, &actual, &xi, &[1, 1]).unwrap());
            }
        }
    }
}
