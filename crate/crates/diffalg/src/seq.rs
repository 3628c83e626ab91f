//! Sequence-ring cross-validation: fundamental matrices built by the forward
//! recurrence Y(i) = A(i-1) Y(i-1) over exact rational samples, plus numeric
//! re-checks of certificates and gauge identities at sampled points.
//!
//! The oracle corroborates symbolic identities, it never decides: parameters
//! are sampled as exact rationals with large denominators (sound for checking
//! polynomial identities even though the independence hypothesis itself wants
//! a transcendental step), poles are skipped and recorded, never approximated.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dependence::Certificate;
use crate::error::{EngineError, Result};
use crate::field::FieldElement;
use crate::isomono::{GaugeWitness, LinearSystem};
use crate::tower::{Action, Endo, TowerSpec};

/// Truncated model of the sequence ring: exact values of the fundamental
/// matrix from the effective start index, with pre-start indices where A was
/// singular or undefined recorded as skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFrame {
    /// Requested start index.
    pub i0: i64,
    /// Effective start (equals `i0` unless auto-advance skipped bad indices).
    pub start: i64,
    pub horizon: usize,
    /// values[s] = Y(start + s); values[0] is the identity.
    pub values: Vec<Vec<Vec<BigRational>>>,
    pub skipped: BTreeSet<i64>,
}

/// Exact sampling plan: seeded assignments for every tower variable, with
/// parameters drawn with large random denominators and the top variable from
/// the requested range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePlan {
    pub seed: u64,
    pub trials: usize,
    pub points: Vec<Vec<BigRational>>,
}

impl SamplePlan {
    pub fn new(tower: &TowerSpec, seed: u64, trials: usize, z_range: i64) -> SamplePlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = tower.top_level();
        let mut points = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut point = Vec::with_capacity(tower.nvars());
            for level in 0..tower.nvars() {
                if level == top {
                    let num = rng.gen_range(-z_range.max(1)..=z_range.max(1));
                    let den = rng.gen_range(1i64..=97);
                    point.push(BigRational::new(BigInt::from(num), BigInt::from(den)));
                } else {
                    let mut num = rng.gen_range(-1_000_000i64..=1_000_000);
                    if num == 0 {
                        num = 1;
                    }
                    let den = rng.gen_range(1_000_000i64..=2_000_000);
                    point.push(BigRational::new(BigInt::from(num), BigInt::from(den)));
                }
            }
            points.push(point);
        }
        SamplePlan {
            seed,
            trials,
            points,
        }
    }
}

fn rat_mat_identity(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn rat_mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let add = &a[i][l] * &b[l][j];
                out[i][j] += add;
            }
        }
    }
    out
}

fn rat_mat_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = BigRational::one() / a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for j in col..n {
                let sub = &f * &a[col][j];
                a[r][j] -= sub;
            }
        }
    }
    det
}

fn rat_mat_inv(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv = rat_mat_identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let piv_inv = BigRational::one() / a[col][col].clone();
        for j in 0..n {
            a[col][j] *= &piv_inv;
            inv[col][j] *= &piv_inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let s1 = &f * &a[col][j];
                a[r][j] -= s1;
                let s2 = &f * &inv[col][j];
                inv[r][j] -= s2;
            }
        }
    }
    Some(inv)
}

fn eval_matrix(m: &crate::matrix::Mat, point: &[BigRational]) -> Option<Vec<Vec<BigRational>>> {
    let mut out = vec![vec![BigRational::zero(); m.cols()]; m.rows()];
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[i][j] = m.at(i, j).evaluate(point).ok()?;
        }
    }
    Some(out)
}

fn require_shift_by_one(tower: &TowerSpec) -> Result<usize> {
    let top = tower.top_level();
    match tower.action(Endo::Phi, top) {
        Action::Shift(c) if c.is_one() => Ok(top),
        _ => Err(EngineError::UnsupportedTower(
            "the sequence model needs phi: z -> z+1 on the top variable".into(),
        )),
    }
}

/// Builds the frame Y(start) = id, Y(i) = A(i-1) Y(i-1) with all parameters
/// assigned from `params` (the slot of the top variable is overwritten by the
/// running index). Indices where A is undefined or singular before the first
/// good one are skipped when `auto_advance` is set, otherwise reported.
pub fn fundamental_matrix(
    sys: &LinearSystem,
    i0: i64,
    horizon: usize,
    params: &[BigRational],
    auto_advance: bool,
    tower: &TowerSpec,
) -> Result<SequenceFrame> {
    let top = require_shift_by_one(tower)?;
    assert!(horizon >= 1, "horizon must be positive");
    let n = sys.n();
    let a_at = |i: i64| -> Option<Vec<Vec<BigRational>>> {
        let mut point = params.to_vec();
        point[top] = BigRational::from(BigInt::from(i));
        let m = eval_matrix(sys.matrix(), &point)?;
        if rat_mat_det(&m).is_zero() {
            None
        } else {
            Some(m)
        }
    };
    let mut skipped = BTreeSet::new();
    let mut start = i0;
    if auto_advance {
        let mut budget = 1000;
        while a_at(start).is_none() {
            skipped.insert(start);
            start += 1;
            budget -= 1;
            if budget == 0 {
                return Err(EngineError::SingularAAtIndex(start));
            }
        }
    }
    let mut values = vec![rat_mat_identity(n)];
    for step in 1..horizon {
        let i = start + step as i64 - 1;
        let a = a_at(i).ok_or(EngineError::SingularAAtIndex(i))?;
        let prev = values.last().unwrap();
        values.push(rat_mat_mul(&a, prev));
    }
    // re-check the recurrence law over the whole horizon
    for step in 1..values.len() {
        let i = start + step as i64 - 1;
        let a = a_at(i).expect("checked above");
        assert_eq!(
            values[step],
            rat_mat_mul(&a, &values[step - 1]),
            "frame law Y(i+1) = A(i) Y(i) violated"
        );
    }
    Ok(SequenceFrame {
        i0,
        start,
        horizon,
        values,
        skipped,
    })
}

fn pow_rat(base: &BigRational, e: i64) -> Option<BigRational> {
    if e == 0 {
        return Some(BigRational::one());
    }
    if base.is_zero() {
        return if e > 0 {
            Some(BigRational::zero())
        } else {
            None
        };
    }
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &b;
        }
        k >>= 1;
        if k > 0 {
            b = &b * &b;
        }
    }
    if e < 0 {
        Some(BigRational::one() / acc)
    } else {
        Some(acc)
    }
}

/// Evaluates both sides of prod_r sigma^r(a)^{n_r} = phi(b)/b at every sample
/// point; true iff all non-pole samples agree exactly. Sigma and phi are
/// realized on points through the declared variable actions.
pub fn check_certificate_numeric(
    a: &FieldElement,
    cert: &Certificate,
    plan: &SamplePlan,
    tower: &TowerSpec,
) -> Result<bool> {
    let mut used = 0usize;
    for point in &plan.points {
        let Some(lhs) = ({
            let mut acc = Some(BigRational::one());
            let mut p = point.clone();
            for &n in &cert.word.exponents {
                if n != 0 {
                    acc = match (acc, a.evaluate(&p)) {
                        (Some(acc), Ok(v)) => pow_rat(&v, n).map(|pw| acc * pw),
                        _ => None,
                    };
                }
                p = tower.endo_point(&p, Endo::Sigma);
            }
            acc
        }) else {
            continue;
        };
        let phi_point = tower.endo_point(point, Endo::Phi);
        let (Ok(b_phi), Ok(b_here)) = (cert.b.evaluate(&phi_point), cert.b.evaluate(point)) else {
            continue;
        };
        if b_here.is_zero() {
            continue;
        }
        let rhs = b_phi / b_here;
        if lhs != rhs {
            return Ok(false);
        }
        used += 1;
    }
    if used == 0 {
        return Err(EngineError::AllSamplesHitPoles);
    }
    Ok(true)
}

/// Entrywise equality of phi(B) and sigma(A) B A^{-1} at all non-pole samples.
pub fn check_isomonodromy_numeric(
    sys: &LinearSystem,
    w: &GaugeWitness,
    plan: &SamplePlan,
    tower: &TowerSpec,
) -> Result<bool> {
    sys.matrix().check_dims(&w.b)?;
    let mut used = 0usize;
    for point in &plan.points {
        let sigma_point = tower.endo_point(point, Endo::Sigma);
        let phi_point = tower.endo_point(point, Endo::Phi);
        let (Some(a_here), Some(a_sigma), Some(b_here), Some(b_phi)) = (
            eval_matrix(sys.matrix(), point),
            eval_matrix(sys.matrix(), &sigma_point),
            eval_matrix(&w.b, point),
            eval_matrix(&w.b, &phi_point),
        ) else {
            continue;
        };
        let Some(a_inv) = rat_mat_inv(&a_here) else {
            continue;
        };
        let rhs = rat_mat_mul(&rat_mat_mul(&a_sigma, &b_here), &a_inv);
        if b_phi != rhs {
            return Ok(false);
        }
        used += 1;
    }
    if used == 0 {
        return Err(EngineError::AllSamplesHitPoles);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::{decide, Verdict};
    use crate::matrix::Mat;
    use crate::poly::{rat, RPoly};
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

    fn z() -> FieldElement {
        FieldElement::var(1)
    }
    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[test]
    fn factorial_frame() {
        // A = [[z]], i0 = 1, horizon 6 -> 1, 1, 2, 6, 24, 120
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![z()]])).unwrap();
        let params = vec![rat(1, 3), rat(0, 1)];
        let frame = fundamental_matrix(&sys, 1, 6, &params, false, &tower).unwrap();
        let got: Vec<BigRational> = frame.values.iter().map(|m| m[0][0].clone()).collect();
        let expect: Vec<BigRational> =
            [1, 1, 2, 6, 24, 120].iter().map(|&n| rat(n, 1)).collect();
        assert_eq!(got, expect);
        assert!(frame.skipped.is_empty());
    }

    #[test]
    fn identity_frame_is_constant() {
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::identity(2)).unwrap();
        let params = vec![rat(1, 7), rat(0, 1)];
        let frame = fundamental_matrix(&sys, 0, 5, &params, false, &tower).unwrap();
        for v in &frame.values {
            assert_eq!(*v, rat_mat_identity(2));
        }
    }

    #[test]
    fn telescoping_frame() {
        // A = [[z/(z-1)]], i0 = 2, horizon 4 -> 1, 2, 3, 4
        let tower = shift_tower();
        let a = z().div(&z().sub(&fe(1))).unwrap();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![a]])).unwrap();
        let params = vec![rat(1, 3), rat(0, 1)];
        let frame = fundamental_matrix(&sys, 2, 4, &params, false, &tower).unwrap();
        let got: Vec<BigRational> = frame.values.iter().map(|m| m[0][0].clone()).collect();
        assert_eq!(got, vec![rat(1, 1), rat(2, 1), rat(3, 1), rat(4, 1)]);
    }

    #[test]
    fn auto_advance_skips_singular_start() {
        // A = [[z]] is singular at z = 0
        let tower = shift_tower();
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![z()]])).unwrap();
        let params = vec![rat(1, 3), rat(0, 1)];
        let err = fundamental_matrix(&sys, 0, 3, &params, false, &tower).unwrap_err();
        assert_eq!(err, EngineError::SingularAAtIndex(0));
        let frame = fundamental_matrix(&sys, 0, 3, &params, true, &tower).unwrap();
        assert_eq!(frame.start, 1);
        assert_eq!(frame.skipped.iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn numeric_certificate_check() {
        let tower = shift_tower();
        let a = z().div(&z().sub(&fe(1))).unwrap();
        let Verdict::Dependent { certificate } = decide(&a, &tower).unwrap() else {
            panic!();
        };
        let plan = SamplePlan::new(&tower, 42, 20, 50);
        assert!(check_certificate_numeric(&a, &certificate, &plan, &tower).unwrap());
        // fake certificate: a = z with b = 1 fails at the first good sample
        let fake = Certificate {
            word: crate::dependence::MultiplicativeWord::new(vec![1]),
            b: fe(1),
            l_table: Default::default(),
            u: 1,
        };
        assert!(!check_certificate_numeric(&z(), &fake, &plan, &tower).unwrap());
        // a = 1 with b = 1 holds everywhere
        assert!(check_certificate_numeric(&fe(1), &fake, &plan, &tower).unwrap());
    }

    #[test]
    fn numeric_isomonodromy_check() {
        let tower = shift_tower();
        let a0 = Mat::from_rows(vec![vec![fe(2), fe(1)], vec![fe(1), fe(1)]]);
        let sys = LinearSystem::new(a0.clone()).unwrap();
        let w = GaugeWitness { b: a0 };
        let plan = SamplePlan::new(&tower, 5, 10, 40);
        assert!(check_isomonodromy_numeric(&sys, &w, &plan, &tower).unwrap());
        // A = [[z]], B = [[1]] fails: (z+t)/z != 1
        let sys = LinearSystem::new(Mat::from_rows(vec![vec![z()]])).unwrap();
        let w = GaugeWitness {
            b: Mat::identity(1),
        };
        assert!(!check_isomonodromy_numeric(&sys, &w, &plan, &tower).unwrap());
    }
}
