//! Isomonodromy of linear difference systems: verification for arbitrary
//! towers and, over pure-shift towers, a decision procedure through an
//! Abramov-style rational-solutions engine.
//!
//! A system phi(y) = A y is isomonodromic when some invertible rational B
//! satisfies phi(B) = sigma(A) B A^{-1}. Vectorizing with the column-stacking
//! convention vec(XYZ) = (Z^T kron X) vec(Y) turns the gauge equation into a
//! twisted system phi(x) = M x with M = (A^{-1})^T kron sigma(A); rational
//! solution vectors are found under a universal denominator computed from the
//! dispersion of the shifted denominators of M and M^{-1}, with numerator
//! degrees capped by the caller.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{EngineError, Result};
use crate::field::FieldElement;
use crate::introots::integer_roots;
use crate::matrix::{nullspace, Mat};
use crate::tower::{Action, Endo, TowerSpec};
use crate::zpoly::ZPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    a: Mat,
}

impl LinearSystem {
    /// Requires a square matrix with nonzero determinant.
    pub fn new(a: Mat) -> Result<LinearSystem> {
        if !a.is_square() {
            return Err(EngineError::DimensionMismatch(format!(
                "{}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.det().is_zero() {
            return Err(EngineError::SingularAAtIndex(0));
        }
        Ok(LinearSystem { a })
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeWitness {
    pub b: Mat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedSystem {
    pub m: Mat,
}

/// Entrywise check of phi(B) = sigma(A) B A^{-1}; a singular B is reported
/// as an error, distinct from a failed identity.
pub fn verify_isomonodromic(
    sys: &LinearSystem,
    w: &GaugeWitness,
    tower: &TowerSpec,
) -> Result<bool> {
    sys.matrix().check_dims(&w.b)?;
    if w.b.det().is_zero() {
        return Err(EngineError::SingularWitness);
    }
    let lhs = w.b.apply_endo(tower, Endo::Phi, 1);
    let a_inv = sys.matrix().inverse().expect("A invertible");
    let rhs = sys
        .matrix()
        .apply_endo(tower, Endo::Sigma, 1)
        .mul(&w.b)
        .mul(&a_inv);
    Ok(lhs == rhs)
}

/// M = (A^{-1})^T kron sigma(A): vec(B) solves phi(x) = M x iff B solves the
/// gauge equation.
pub fn to_twisted_system(sys: &LinearSystem, tower: &TowerSpec) -> TwistedSystem {
    let a_inv = sys.matrix().inverse().expect("A invertible");
    let sigma_a = sys.matrix().apply_endo(tower, Endo::Sigma, 1);
    TwistedSystem {
        m: a_inv.transpose().kronecker(&sigma_a),
    }
}

/// Nonnegative integer shift distances at which two polynomials share a root:
/// { j >= 0 : deg gcd(u(z), v(z+j)) > 0 }, computed from the integer roots of
/// Res_z(u(z), v(z+j)) as a polynomial in j and verified by an actual gcd.
pub fn dispersion(u: &ZPoly, v: &ZPoly) -> std::collections::BTreeSet<i64> {
    let mut out = std::collections::BTreeSet::new();
    let (Some(du), Some(dv)) = (u.degree(), v.degree()) else {
        return out;
    };
    if du == 0 || dv == 0 {
        return out;
    }
    // resultant in z as a polynomial in j, by evaluation and interpolation
    let deg_j = du * dv;
    let points: Vec<i64> = (0..=deg_j as i64).collect();
    let values: Vec<FieldElement> = points
        .iter()
        .map(|&j| ZPoly::resultant(u, &v.shift_var(&FieldElement::from_int(j))))
        .collect();
    let res_poly = lagrange_field(&points, &values);
    // candidate integer roots: specialize any parameters rationally, keeping
    // only candidates that survive the exact gcd check below
    let candidates = integer_root_candidates(&res_poly);
    for j in candidates {
        if j < 0 {
            continue;
        }
        let g = ZPoly::gcd_monic(u, &v.shift_var(&FieldElement::from_int(j)));
        if g.degree().map_or(false, |d| d > 0) {
            out.insert(j);
        }
    }
    out
}

/// Lagrange interpolation with field-element values over integer nodes.
fn lagrange_field(points: &[i64], values: &[FieldElement]) -> Vec<FieldElement> {
    let n = points.len();
    let mut acc = vec![FieldElement::zero(); n];
    for i in 0..n {
        if values[i].is_zero() {
            continue;
        }
        let mut basis = vec![FieldElement::one()];
        let mut denom = FieldElement::one();
        for (j, &pj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![FieldElement::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] = next[k + 1].add(b);
                next[k] = next[k].sub(&b.mul(&FieldElement::from_int(pj)));
            }
            basis = next;
            denom = denom.mul(&FieldElement::from_int(points[i] - pj));
        }
        let scale = values[i].div(&denom).expect("distinct nodes");
        for (k, b) in basis.iter().enumerate() {
            acc[k] = acc[k].add(&b.mul(&scale));
        }
    }
    while acc.last().map_or(false, |c| c.is_zero()) {
        acc.pop();
    }
    acc
}

/// Integer-root candidates of a polynomial with field-element coefficients:
/// parameters are specialized at a generic rational point (retried on
/// degeneration); candidates are a superset, filtered later by exact gcds.
fn integer_root_candidates(coeffs: &[FieldElement]) -> Vec<i64> {
    if coeffs.len() <= 1 {
        return vec![];
    }
    let max_level = coeffs
        .iter()
        .filter_map(|c| c.max_level())
        .max()
        .map_or(0, |l| l + 1);
    for attempt in 0..4 {
        let point: Vec<BigRational> = (0..max_level)
            .map(|l| {
                BigRational::new(
                    BigInt::from(1009 + 37 * l as i64 + 11 * attempt as i64),
                    BigInt::from(17 + attempt as i64),
                )
            })
            .collect();
        let spec: Option<Vec<BigRational>> =
            coeffs.iter().map(|c| c.evaluate(&point).ok()).collect();
        let Some(spec) = spec else {
            continue;
        };
        if spec.last().map_or(true, |c| c.is_zero()) {
            continue;
        }
        return integer_roots(&spec)
            .into_iter()
            .filter_map(|b| i64::try_from(&b).ok())
            .collect();
    }
    vec![]
}

/// Monic common denominator of the entries of a matrix.
fn matrix_denominator(m: &Mat, level: usize) -> ZPoly {
    let mut den = ZPoly::one(level);
    for e in m.entries() {
        let (_, d) = ZPoly::parts_of(e, level);
        den = ZPoly::lcm_monic(&den, &d);
    }
    den
}

fn require_pure_shift(tower: &TowerSpec) -> Result<usize> {
    let top = tower.top_level();
    match tower.action(Endo::Phi, top) {
        Action::Shift(c) if c.is_one() => {}
        _ => {
            return Err(EngineError::UnsupportedTower(
                "the rational-solutions engine needs phi: z -> z+1 on the top variable".into(),
            ))
        }
    }
    for level in 0..top {
        if *tower.action(Endo::Phi, level) != Action::Identity {
            return Err(EngineError::UnsupportedTower(
                "the rational-solutions engine needs phi to fix all parameters".into(),
            ));
        }
    }
    Ok(top)
}

/// Universal denominator for rational solutions of phi(x) = M x over the
/// pure-shift tower, by the dispersion loop on q = den(M^{-1}) against
/// p = den(M) shifted by -1.
fn universal_denominator(m: &Mat, m_inv: &Mat, top: usize) -> ZPoly {
    let p = matrix_denominator(m, top);
    let q0 = matrix_denominator(m_inv, top);
    let mut w = p.shift_var(&FieldElement::from_int(-1));
    let mut q = q0;
    let mut u = ZPoly::one(top);
    let dis: Vec<i64> = dispersion(&w, &q).into_iter().rev().collect();
    for h in dis {
        let g = ZPoly::gcd_monic(&q, &w.shift_var(&FieldElement::from_int(-h)));
        if g.degree().map_or(true, |d| d == 0) {
            continue;
        }
        q = q.exact_div(&g);
        w = w.exact_div(&g.shift_var(&FieldElement::from_int(h)));
        for m_off in 0..=h {
            u = u.mul(&g.shift_var(&FieldElement::from_int(-m_off)));
        }
    }
    u
}

/// Basis of rational solution vectors of phi(x) = M x with denominators
/// dividing the universal denominator and numerator degrees at most
/// `degree_cap`. Complete relative to the cap.
pub fn rational_solutions(
    tw: &TwistedSystem,
    degree_cap: usize,
    tower: &TowerSpec,
) -> Result<Vec<Vec<FieldElement>>> {
    let top = require_pure_shift(tower)?;
    let n = tw.m.rows();
    let m_inv = tw
        .m
        .inverse()
        .ok_or_else(|| EngineError::DimensionMismatch("twisted system is singular".into()))?;
    let u = universal_denominator(&tw.m, &m_inv, top);
    let u_fe = u.to_field_element();
    let u_shift_fe = u.shift_var(&FieldElement::from_int(1)).to_field_element();
    // y(z+1) = M * U(z+1)/U(z) * y(z); clear denominators:
    // c(z) y(z+1) = V(z) y(z) with polynomial entries
    let scale = u_shift_fe.div(&u_fe).expect("U nonzero");
    let m_twiddle = tw.m.map(|e| e.mul(&scale));
    let c = matrix_denominator(&m_twiddle, top);
    let c_fe = c.to_field_element();
    let v = m_twiddle.map(|e| e.mul(&c_fe));
    // unknowns y_{i,e}: coefficient matrix over the parameter subfield
    let cap = degree_cap;
    let unknowns = n * (cap + 1);
    let deg_c = c.degree().unwrap_or(0);
    let deg_v = v
        .entries()
        .iter()
        .map(|e| ZPoly::parts_of(e, top).0.degree().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let max_deg = (deg_c + cap + 1).max(deg_v + cap) + 1;
    let mut rows = vec![vec![FieldElement::zero(); unknowns]; n * max_deg];
    let zp1 = ZPoly::new(top, vec![FieldElement::one(), FieldElement::one()]);
    for i in 0..n {
        // c(z) * (z+1)^e contributes positively for unknown y_{i,e}
        let mut zp1_pow = ZPoly::one(top);
        for e in 0..=cap {
            let contrib = c.mul(&zp1_pow);
            for (deg, coeff) in contrib.coeffs().iter().enumerate() {
                rows[i * max_deg + deg][i * (cap + 1) + e] =
                    rows[i * max_deg + deg][i * (cap + 1) + e].add(coeff);
            }
            zp1_pow = zp1_pow.mul(&zp1);
        }
        // -V[i][ip] * z^e for unknown y_{ip,e}
        for ip in 0..n {
            let (v_poly, v_den) = ZPoly::parts_of(v.at(i, ip), top);
            debug_assert!(v_den.is_one());
            if v_poly.is_zero() {
                continue;
            }
            for e in 0..=cap {
                for (deg, coeff) in v_poly.coeffs().iter().enumerate() {
                    let target = &mut rows[i * max_deg + deg + e][ip * (cap + 1) + e];
                    *target = target.sub(coeff);
                }
            }
        }
    }
    let mat = Mat::from_rows(rows);
    let kernel = nullspace(&mat);
    let mut basis = Vec::new();
    for vker in kernel {
        let mut x = Vec::with_capacity(n);
        for i in 0..n {
            let coeffs = vker[i * (cap + 1)..(i + 1) * (cap + 1)].to_vec();
            let y = ZPoly::new(top, coeffs);
            x.push(y.to_field_element().div(&u_fe).expect("U nonzero"));
        }
        basis.push(x);
    }
    Ok(basis)
}

/// Searches the rational solution space of the twisted system for an
/// invertible witness: single basis vectors first, then seeded random small
/// integer combinations with bounded retries; every returned witness is
/// re-verified against the gauge equation.
pub fn is_isomonodromic(
    sys: &LinearSystem,
    degree_cap: usize,
    tower: &TowerSpec,
    seed: u64,
) -> Result<Option<GaugeWitness>> {
    let tw = to_twisted_system(sys, tower);
    let n = sys.n();
    // escalate the cap: witnesses usually live in low degree
    let mut caps: Vec<usize> = vec![0, 2, 4, 8, 12, 16]
        .into_iter()
        .filter(|&c| c < degree_cap)
        .collect();
    caps.push(degree_cap);
    for cap in caps {
        let basis = rational_solutions(&tw, cap, tower)?;
        if basis.is_empty() {
            continue;
        }
        let mut candidates: Vec<Vec<FieldElement>> = basis.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let mut combo = vec![FieldElement::zero(); n * n];
            for b in &basis {
                let c = rng.gen_range(-3i64..=3);
                if c == 0 {
                    continue;
                }
                let cf = FieldElement::from_int(c);
                for (acc, x) in combo.iter_mut().zip(b.iter()) {
                    *acc = acc.add(&x.mul(&cf));
                }
            }
            candidates.push(combo);
        }
        for cand in candidates {
            let b = Mat::unvec_cols(n, &cand);
            if b.det().is_zero() {
                continue;
            }
            let witness = GaugeWitness { b };
            if verify_isomonodromic(sys, &witness, tower)? {
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

/// Companion system of the scalar equation
/// phi^m(y) + c_{m-1} phi^{m-1}(y) + ... + c_0 y = 0 with c_0 != 0:
/// superdiagonal ones, last row (-c_0, ..., -c_{m-1}).
pub fn companion(coefficients: &[FieldElement]) -> Result<LinearSystem> {
    let m = coefficients.len();
    assert!(m >= 1, "companion needs at least one coefficient");
    if coefficients[0].is_zero() {
        return Err(EngineError::ZeroTrailingCoefficient);
    }
    let mut a = Mat::zero(m, m);
    for i in 0..m.saturating_sub(1) {
        *a.at_mut(i, i + 1) = FieldElement::one();
    }
    for (j, c) in coefficients.iter().enumerate() {
        *a.at_mut(m - 1, j) = c.neg();
    }
    LinearSystem::new(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RPoly;
    use crate::tower::VarSpec;

    fn shift_tower() -> TowerSpec {
        TowerSpec::new(vec![
            VarSpec {
                name: "t".into(),
                phi: Action::Identity,
                sigma: Action::Identity,
            },
            VarSpec {
                name: "z".into(),
                phi: Action::Shift(RPoly::one()),
                sigma: Action::Shift(RPoly::var(0)),
            },
        ])
        .unwrap()
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }
    fn z() -> FieldElement {
        FieldElement::var(1)
    }

    #[test]
    fn constant_system_is_isomonodromic_with_itself() {
        let tower = shift_tower();
        let a = Mat::from_rows(vec![vec![fe(1), fe(2)], vec![fe(0), fe(1)]]);
        let sys = LinearSystem::new(a.clone()).unwrap();
        let w = GaugeWitness { b: a };
        assert!(verify_isomonodromic(&sys, &w, &tower).unwrap());
    }

    #[test]
    fn gamma_scalar_fails_identity() {
        // A = [[z]], B = [[1]]: sigma(A) A^{-1} = (z+t)/z != 1
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![z()]])).unwrap();
        let w = GaugeWitness {
            b: Mat::from_rows(vec![vec![fe(1)]]),
        };
        assert!(!verify_isomonodromic(&sys, &w, &tower).unwrap());
    }

    #[test]
    fn singular_witness_is_distinct_error() {
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::identity(2)).unwrap();
        let w = GaugeWitness { b: Mat::zero(2, 2) };
        assert_eq!(
            verify_isomonodromic(&sys, &w, &tower).unwrap_err(),
            EngineError::SingularWitness
        );
    }

    #[test]
    fn twisted_system_scalar_and_identity() {
        let tower = shift_tower();
        // n=1, A=[[a]] -> M = [[sigma(a)/a]]
        let a = z();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![a.clone()]])).unwrap();
        let tw = to_twisted_system(&sys, &tower);
        let expect = a
            .apply_endo(&tower, Endo::Sigma, 1)
            .div(&a)
            .unwrap();
        assert_eq!(*tw.m.at(0, 0), expect);
        // n=2, A = identity -> M = identity_4
        let sys = LinearSystem::new(Mat::identity(2)).unwrap();
        let tw = to_twisted_system(&sys, &tower);
        assert_eq!(tw.m, Mat::identity(4));
    }

    #[test]
    fn vec_round_trip_through_twist() {
        // vec(sigma(A) B A^{-1}) = M vec(B) for a random-ish A, B
        let tower = shift_tower();
        let a = Mat::from_rows(vec![
            vec![z(), fe(1)],
            vec![fe(0), z().add(&fe(3))],
        ]);
        let b = Mat::from_rows(vec![
            vec![z().mul(&z()), fe(2)],
            vec![z(), fe(5)],
        ]);
        let sys = LinearSystem::new(a.clone()).unwrap();
        let tw = to_twisted_system(&sys, &tower);
        let lhs = a
            .apply_endo(&tower, Endo::Sigma, 1)
            .mul(&b)
            .mul(&a.inverse().unwrap())
            .vec_cols();
        let vb = b.vec_cols();
        let rhs: Vec<FieldElement> = (0..4)
            .map(|i| {
                (0..4).fold(FieldElement::zero(), |acc, j| {
                    acc.add(&tw.m.at(i, j).mul(&vb[j]))
                })
            })
            .collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dispersion_examples() {
        // u = z, v = z-3 -> {3}
        let u = ZPoly::var(1);
        let v = ZPoly::new(1, vec![fe(-3), fe(1)]);
        assert_eq!(dispersion(&u, &v).into_iter().collect::<Vec<_>>(), vec![3]);
        // u = z, v = z(z-1): gcd checks succeed at j = 0 and j = 1
        let u2 = ZPoly::var(1).mul(&ZPoly::new(1, vec![fe(-1), fe(1)]));
        assert_eq!(
            dispersion(&ZPoly::var(1), &u2)
                .into_iter()
                .collect::<Vec<_>>(),
            vec![0, 1]
        );
        // with the arguments the other way only j = 0 matches
        assert_eq!(
            dispersion(&u2, &ZPoly::var(1))
                .into_iter()
                .collect::<Vec<_>>(),
            vec![0]
        );
        // u = z, v = z - t -> {} (t is not an integer)
        let v3 = ZPoly::new(1, vec![FieldElement::var(0).neg(), fe(1)]);
        assert!(dispersion(&u, &v3).is_empty());
    }

    #[test]
    fn rational_solutions_examples() {
        let tower = shift_tower();
        // M = [[1]]: constants
        let tw = TwistedSystem {
            m: Mat::identity(1),
        };
        let basis = rational_solutions(&tw, 0, &tower).unwrap();
        assert_eq!(basis.len(), 1);
        // M = [[(z+1)/z]]: solution x = z
        let m = z().add(&fe(1)).div(&z()).unwrap();
        let tw = TwistedSystem {
            m: Mat::from_rows(vec![vec![m]]),
        };
        let basis = rational_solutions(&tw, 3, &tower).unwrap();
        assert_eq!(basis.len(), 1);
        // normalized spans: the basis vector is a scalar multiple of z
        let ratio = basis[0][0].div(&z()).unwrap();
        assert!(ratio.is_constant_in(1));
        // M = [[(z+t)/z]]: gamma-type twist, no rational solutions
        let m = z().add(&FieldElement::var(0)).div(&z()).unwrap();
        let tw = TwistedSystem {
            m: Mat::from_rows(vec![vec![m]]),
        };
        assert!(rational_solutions(&tw, 6, &tower).unwrap().is_empty());
    }

    #[test]
    fn constant_system_solver_finds_witness() {
        let tower = shift_tower();
        let a = Mat::from_rows(vec![vec![fe(2), fe(1)], vec![fe(1), fe(1)]]);
        let sys = LinearSystem::new(a).unwrap();
        let w = is_isomonodromic(&sys, 4, &tower, 7).unwrap().unwrap();
        assert!(verify_isomonodromic(&sys, &w, &tower).unwrap());
    }

    #[test]
    fn gamma_has_no_witness() {
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![z()]])).unwrap();
        assert!(is_isomonodromic(&sys, 20, &tower, 7).unwrap().is_none());
    }

    #[test]
    fn q_dilation_solver_unsupported() {
        // phi: x -> q*x: the solver path must refuse, the verifier still works
        let tower = TowerSpec::new(vec![
            VarSpec {
                name: "q".into(),
                phi: Action::Identity,
                sigma: Action::Identity,
            },
            VarSpec {
                name: "x".into(),
                phi: Action::Scale(RPoly::var(0)),
                sigma: Action::Identity,
            },
        ])
        .unwrap();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![FieldElement::var(1)]])).unwrap();
        let err = is_isomonodromic(&sys, 4, &tower, 1).unwrap_err();
        assert!(matches!(err, EngineError::UnsupportedTower(_)));
    }

    #[test]
    fn companion_shapes() {
        // y(z+1) - y(z) = 0 -> [[1]]
        let sys = companion(&[fe(-1)]).unwrap();
        assert_eq!(*sys.matrix(), Mat::from_rows(vec![vec![fe(1)]]));
        // phi^2(y) - y = 0 -> [[0,1],[1,0]]
        let sys = companion(&[fe(-1), fe(0)]).unwrap();
        assert_eq!(
            *sys.matrix(),
            Mat::from_rows(vec![vec![fe(0), fe(1)], vec![fe(1), fe(0)]])
        );
        // zero trailing coefficient rejected
        assert_eq!(
            companion(&[fe(0), fe(1)]).unwrap_err(),
            EngineError::ZeroTrailingCoefficient
        );
    }
}
