//! Shift-orbit factorization of the equation coefficient.
//!
//! Over a tower where sigma shifts the equation variable by a transcendental
//! step and phi by a rational one, a nonzero coefficient factors canonically
//! as lambda times a product of lattice translates p_i(z - k*s_sigma - d*s_phi)
//! with integer exponents. Classes are grouped by shift equivalence; the
//! representative of a class is its factor of lexicographically minimal (k, d)
//! offset, re-anchored to (0, 0).
//!
//! Factor extraction runs squarefree decomposition, then picks lattice-linear
//! roots off两 two rational specializations of the transcendental step (each
//! verified by exact substitution), then handles the higher-degree leftover by
//! a translation test plus Kronecker splitting over the rationals. Roots
//! outside this shape are reported as unsupported, never silently mishandled.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{EngineError, Result};
use crate::field::FieldElement;
use crate::introots::integer_roots;
use crate::poly::RPoly;
use crate::tower::{Action, Endo, TowerSpec};
use crate::zpoly::ZPoly;

/// Lattice data of a validated analysis tower: sigma moves the top variable
/// by `sigma_k * theta + sigma_e`, phi by the rational `phi_w` (possibly 0,
/// in which case phi must shift some parameter instead).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub top: usize,
    pub theta: usize,
    pub sigma_k: BigRational,
    pub sigma_e: BigRational,
    pub phi_w: BigRational,
}

impl Lattice {
    pub fn sigma_shift(&self) -> FieldElement {
        FieldElement::from_rpoly(
            RPoly::var(self.theta)
                .scale(&self.sigma_k)
                .add(&RPoly::from_rat(self.sigma_e.clone())),
        )
    }

    pub fn phi_shift(&self) -> FieldElement {
        FieldElement::from_rat(self.phi_w.clone())
    }

    /// Validates the tower shape required by the dependence test.
    pub fn from_tower(tower: &TowerSpec) -> Result<Lattice> {
        let top = tower.top_level();
        let (theta, sigma_k, sigma_e) = match tower.action(Endo::Sigma, top) {
            Action::Shift(c) => match c.level() {
                Some(theta) => {
                    if c.degree_in(theta) != 1 {
                        return Err(EngineError::InvalidTower(
                            "sigma shift of the equation variable must be linear in one parameter"
                                .into(),
                        ));
                    }
                    let k = c.coeff_at(theta, 1);
                    let e = c.coeff_at(theta, 0);
                    match (k.as_const(), e.as_const()) {
                        (Some(k), Some(e)) => (theta, k.clone(), e.clone()),
                        _ => {
                            return Err(EngineError::InvalidTower(
                                "sigma shift of the equation variable must have rational \
                                 coefficients"
                                    .into(),
                            ))
                        }
                    }
                }
                None => {
                    return Err(EngineError::InvalidTower(
                        "sigma shift of the equation variable is rational; the criterion \
                         requires a transcendental step (z0/w0 must not be rational)"
                            .into(),
                    ))
                }
            },
            Action::Identity => {
                return Err(EngineError::InvalidTower(
                    "sigma must move the equation variable".into(),
                ))
            }
            Action::Scale(_) => {
                return Err(EngineError::InvalidTower(
                    "q-dilation of the equation variable is outside the dependence test".into(),
                ))
            }
        };
        let phi_w = match tower.action(Endo::Phi, top) {
            Action::Identity => BigRational::zero(),
            Action::Shift(c) => match c.as_const() {
                Some(w) => w.clone(),
                None => {
                    return Err(EngineError::InvalidTower(
                        "phi shift of the equation variable must be rational (normalize w0 = 1)"
                            .into(),
                    ))
                }
            },
            Action::Scale(_) => {
                return Err(EngineError::InvalidTower(
                    "q-dilation of the equation variable is outside the dependence test".into(),
                ))
            }
        };
        if *tower.action(Endo::Phi, theta) != Action::Identity
            || *tower.action(Endo::Sigma, theta) != Action::Identity
        {
            return Err(EngineError::InvalidTower(
                "the sigma-step parameter must be fixed by phi and sigma".into(),
            ));
        }
        let mut phi_moves_something = !phi_w.is_zero();
        for level in 0..top {
            if *tower.action(Endo::Sigma, level) != Action::Identity {
                return Err(EngineError::InvalidTower(format!(
                    "sigma must fix the parameter `{}`",
                    tower.name(level)
                )));
            }
            match tower.action(Endo::Phi, level) {
                Action::Identity => {}
                Action::Shift(_) => phi_moves_something = true,
                Action::Scale(_) => {
                    return Err(EngineError::InvalidTower(format!(
                        "phi must act by shifts on the parameter `{}` for the dependence test",
                        tower.name(level)
                    )))
                }
            }
        }
        if !phi_moves_something {
            return Err(EngineError::InvalidTower(
                "phi acts as the identity on the whole tower".into(),
            ));
        }
        Ok(Lattice {
            top,
            theta,
            sigma_k,
            sigma_e,
            phi_w,
        })
    }

    /// Writes `s` as `k*s_sigma + d*s_phi` with integers k, d when possible.
    pub fn lattice_coordinates(&self, s: &FieldElement) -> Option<(i64, i64)> {
        let s = s.as_rpoly()?;
        let (alpha, beta) = match s.level() {
            None => (BigRational::zero(), s.as_const().unwrap().clone()),
            Some(l) if l == self.theta && s.degree_in(self.theta) == 1 => {
                let a = s.coeff_at(self.theta, 1).as_const()?.clone();
                let b = s.coeff_at(self.theta, 0).as_const()?.clone();
                (a, b)
            }
            _ => return None,
        };
        let k = &alpha / &self.sigma_k;
        if !k.is_integer() {
            return None;
        }
        let rest = beta - &k * &self.sigma_e;
        let d = if self.phi_w.is_zero() {
            if !rest.is_zero() {
                return None;
            }
            BigRational::zero()
        } else {
            let d = rest / &self.phi_w;
            if !d.is_integer() {
                return None;
            }
            d
        };
        Some((big_to_i64(k.numer())?, big_to_i64(d.numer())?))
    }
}

fn big_to_i64(b: &BigInt) -> Option<i64> {
    let (sign, digits) = b.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 if digits[0] <= i64::MAX as u64 => {
            let v = digits[0] as i64;
            Some(if sign == num_bigint::Sign::Minus { -v } else { v })
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftClass {
    /// Monic irreducible anchor; the factor of minimal (k, d) in its orbit.
    pub representative: ZPoly,
    /// (k, d) -> exponent, all nonzero; the minimal key is re-anchored to (0, 0).
    pub terms: BTreeMap<(i64, i64), i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub lambda: FieldElement,
    pub classes: Vec<ShiftClass>,
    /// 1 + max sigma-level k over all terms (at least 1).
    pub t: i64,
    /// Minimal window bound: every phi-offset d lies in [-N-1, N].
    pub n_window: i64,
    pub lattice: Lattice,
}

impl OrbitDecomposition {
    pub fn r_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Tests whether `q(z) = p(z - k*s_sigma - d*s_phi)` for lattice integers
/// (k, d). The candidate shift is read off the degree-(m-1) coefficients and
/// accepted only after full substitution.
pub fn shift_equivalent(p: &ZPoly, q: &ZPoly, lattice: &Lattice) -> Option<(i64, i64)> {
    let m = p.degree()?;
    if q.degree() != Some(m) || m == 0 {
        return None;
    }
    let m_fe = FieldElement::from_int(m as i64);
    let s = p.coeff(m - 1).sub(&q.coeff(m - 1)).div(&m_fe).ok()?;
    let (k, d) = lattice.lattice_coordinates(&s)?;
    let shift = lattice
        .sigma_shift()
        .mul(&FieldElement::from_int(k))
        .add(&lattice.phi_shift().mul(&FieldElement::from_int(d)));
    if *q == p.shift_var(&shift.neg()) {
        Some((k, d))
    } else {
        None
    }
}

/// Multiplies the decomposition back out to a normalized field element.
pub fn recompose(dec: &OrbitDecomposition) -> FieldElement {
    let mut acc = dec.lambda.clone();
    let s_sigma = dec.lattice.sigma_shift();
    let s_phi = dec.lattice.phi_shift();
    for class in &dec.classes {
        for (&(k, d), &s) in &class.terms {
            let shift = s_sigma
                .mul(&FieldElement::from_int(k))
                .add(&s_phi.mul(&FieldElement::from_int(d)));
            let factor = class
                .representative
                .shift_var(&shift.neg())
                .to_field_element();
            acc = acc.mul(&factor.pow_i(s).expect("nonzero factor"));
        }
    }
    acc
}

/// Canonical shift-orbit decomposition of a nonzero coefficient.
pub fn decompose(a: &FieldElement, tower: &TowerSpec) -> Result<OrbitDecomposition> {
    let lattice = Lattice::from_tower(tower)?;
    if a.is_zero() {
        return Err(EngineError::DivisionByZero);
    }
    let (num, den) = ZPoly::parts_of(a, lattice.top);
    let lambda = num.lc().div(&den.lc()).expect("nonzero denominator");
    let mut factors: Vec<(ZPoly, i64)> = Vec::new();
    for (f, m) in factor_monic(&num.monic(), &lattice)? {
        factors.push((f, m as i64));
    }
    for (f, m) in factor_monic(&den.monic(), &lattice)? {
        factors.push((f, -(m as i64)));
    }
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.cmp_structural(&b.0))
    });

    struct RawClass {
        anchor: ZPoly,
        members: Vec<(i64, i64, i64)>, // (k, d, exponent) relative to the anchor
    }
    let mut raw: Vec<RawClass> = Vec::new();
    'outer: for (f, s) in factors {
        for class in raw.iter_mut() {
            if let Some((k, d)) = shift_equivalent(&class.anchor, &f, &lattice) {
                class.members.push((k, d, s));
                continue 'outer;
            }
        }
        raw.push(RawClass {
            anchor: f,
            members: vec![(0, 0, s)],
        });
    }

    let s_sigma = lattice.sigma_shift();
    let s_phi = lattice.phi_shift();
    let mut classes = Vec::new();
    for class in raw {
        let (k0, d0) = class
            .members
            .iter()
            .map(|&(k, d, _)| (k, d))
            .min()
            .expect("nonempty class");
        let shift = s_sigma
            .mul(&FieldElement::from_int(k0))
            .add(&s_phi.mul(&FieldElement::from_int(d0)));
        let representative = class.anchor.shift_var(&shift.neg());
        let mut terms = BTreeMap::new();
        for (k, d, s) in class.members {
            terms.insert((k - k0, d - d0), s);
        }
        classes.push(ShiftClass {
            representative,
            terms,
        });
    }
    classes.sort_by(|a, b| a.representative.cmp_structural(&b.representative));

    let mut t = 1i64;
    let mut n = 0i64;
    for class in &classes {
        for &(k, d) in class.terms.keys() {
            t = t.max(k + 1);
            n = n.max(d).max(-d - 1);
        }
    }
    let dec = OrbitDecomposition {
        lambda,
        classes,
        t,
        n_window: n,
        lattice,
    };
    debug_assert_eq!(recompose(&dec), *a, "decomposition must multiply back");
    Ok(dec)
}

/// Irreducible monic factors with multiplicities of a monic polynomial.
fn factor_monic(f: &ZPoly, lattice: &Lattice) -> Result<Vec<(ZPoly, usize)>> {
    let mut out = Vec::new();
    for (g, mult) in f.squarefree_decomposition() {
        for h in split_squarefree(&g, lattice)? {
            out.push((h, mult));
        }
    }
    Ok(out)
}

/// Splits a monic squarefree polynomial into monic irreducible factors.
fn split_squarefree(g: &ZPoly, lattice: &Lattice) -> Result<Vec<ZPoly>> {
    let mut rest = g.clone();
    let mut out = Vec::new();
    for root in lattice_linear_roots(&rest, lattice)? {
        let factor = ZPoly::new(lattice.top, vec![root.neg(), FieldElement::one()]);
        rest = rest.exact_div(&factor);
        out.push(factor);
    }
    if rest.degree() == Some(0) {
        return Ok(out);
    }
    out.extend(split_leftover(&rest, lattice)?);
    Ok(out)
}

/// Roots of the form alpha*theta + c (alpha, c rational) of a squarefree monic
/// polynomial. Candidates come from two rational specializations of theta and
/// are accepted only after exact substitution, so degenerate sample points can
/// only cost a retry, never a wrong factor.
fn lattice_linear_roots(g: &ZPoly, lattice: &Lattice) -> Result<Vec<FieldElement>> {
    let deg = g.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(vec![]);
    }
    let nvars = lattice.top + 1;
    let configs: [(i64, i64, i64); 3] = [(83, 97, 1009), (101, 113, 2003), (127, 139, 3001)];
    let mut last_err = spurious_pole_error();
    'config: for (t1, t2, pbase) in configs {
        let theta_points = [
            BigRational::from(BigInt::from(t1)),
            BigRational::from(BigInt::from(t2)),
        ];
        let mut base: Vec<BigRational> = (0..nvars)
            .map(|l| BigRational::from(BigInt::from(pbase + 17 * l as i64)))
            .collect();
        let mut root_sets: Vec<Vec<BigRational>> = Vec::new();
        for tp in &theta_points {
            base[lattice.theta] = tp.clone();
            let coeffs = match g.eval_coeffs(&base) {
                Ok(c) => c,
                Err(_) => {
                    last_err = spurious_pole_error();
                    continue 'config;
                }
            };
            if coeffs.len() != deg + 1 || coeffs[deg].is_zero() {
                last_err = spurious_pole_error();
                continue 'config;
            }
            root_sets.push(rational_roots(&coeffs));
        }
        let dt = &theta_points[1] - &theta_points[0];
        let mut candidates: Vec<(BigRational, BigRational)> = Vec::new();
        for r1 in &root_sets[0] {
            for r2 in &root_sets[1] {
                let alpha = (r2 - r1) / &dt;
                let c = r1 - &alpha * &theta_points[0];
                candidates.push((alpha, c));
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut rest = g.clone();
        let mut roots = Vec::new();
        for (alpha, c) in candidates {
            let root = FieldElement::from_rpoly(
                RPoly::var(lattice.theta)
                    .scale(&alpha)
                    .add(&RPoly::from_rat(c)),
            );
            if rest.degree() > Some(0) && rest.eval_at(&root).is_zero() {
                let factor = ZPoly::new(lattice.top, vec![root.neg(), FieldElement::one()]);
                rest = rest.exact_div(&factor);
                roots.push(root);
            }
        }
        return Ok(roots);
    }
    Err(last_err)
}

fn spurious_pole_error() -> EngineError {
    EngineError::UnsupportedRootStructure(
        "degenerate specialization while searching lattice-linear roots".into(),
    )
}

/// Factors the non-linear leftover: rational factorization when the
/// coefficients are rational, otherwise a theta-translate of a rational
/// polynomial; every other shape is unsupported.
fn split_leftover(h: &ZPoly, lattice: &Lattice) -> Result<Vec<ZPoly>> {
    if let Some(coeffs) = rational_coeffs(h) {
        return factor_rational(&coeffs, lattice.top);
    }
    let mut as_poly = Vec::with_capacity(h.coeffs().len());
    for c in h.coeffs() {
        let Some(p) = c.as_rpoly() else {
            return Err(EngineError::UnsupportedRootStructure(
                "irreducible factor with non-polynomial parameter coefficients".into(),
            ));
        };
        if p.level().map_or(false, |l| l != lattice.theta) {
            return Err(EngineError::UnsupportedRootStructure(
                "irreducible factor involves parameters other than the sigma step".into(),
            ));
        }
        as_poly.push(p.clone());
    }
    let big = RPoly::poly(lattice.top, as_poly);
    // peel off a theta-free part so mixed products still split
    let d_theta = big.derivative_in(lattice.theta);
    let theta_free = RPoly::gcd(&big, &d_theta);
    if theta_free.degree_in(lattice.top) > 0 && theta_free.degree_in(lattice.theta) == 0 {
        let m = ZPoly::from_rpoly(lattice.top, &theta_free).monic();
        let rest = h.exact_div(&m);
        let mut out = split_leftover(&m, lattice)?;
        out.extend(split_leftover(&rest, lattice)?);
        return Ok(out);
    }
    // translation test: h(theta, z) = B(z - alpha*theta) forces
    // d/dtheta h = -alpha * d/dz h with alpha a rational constant
    let dz = big.derivative_in(lattice.top);
    let ratio = d_theta.try_div(&dz);
    let alpha = match ratio.as_ref().and_then(|r| r.as_const()) {
        Some(c) => -c.clone(),
        None => {
            return Err(EngineError::UnsupportedRootStructure(
                "irreducible factor is not a lattice translate of a rational polynomial".into(),
            ))
        }
    };
    let base = big.subst_one(lattice.theta, &RPoly::zero());
    let base_z = ZPoly::from_rpoly(lattice.top, &base).monic();
    let base_coeffs = rational_coeffs(&base_z).ok_or_else(|| {
        EngineError::UnsupportedRootStructure("translation base is not rational".into())
    })?;
    let neg_shift = FieldElement::from_rpoly(RPoly::var(lattice.theta).scale(&-alpha));
    let mut out = Vec::new();
    let mut check = ZPoly::one(lattice.top);
    for b in factor_rational(&base_coeffs, lattice.top)? {
        let f = b.shift_var(&neg_shift);
        check = check.mul(&f);
        out.push(f);
    }
    if check != *h {
        return Err(EngineError::UnsupportedRootStructure(
            "translation factorization does not reproduce the factor".into(),
        ));
    }
    Ok(out)
}

fn rational_coeffs(h: &ZPoly) -> Option<Vec<BigRational>> {
    h.coeffs().iter().map(|c| c.as_const().cloned()).collect()
}

/// Rational roots over Q via integer roots of the monicizing transform
/// y = lc * z; robust against large coefficients.
pub fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let mut den = BigInt::one();
    for x in &c {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let n = ints.len() - 1;
    let lc = ints[n].clone();
    // g(y) = lc^(n-1) * f(y/lc): coefficient of y^i is a_i * lc^(n-1-i), glc = 1
    let g: Vec<BigRational> = ints
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i == n {
                BigRational::one()
            } else {
                BigRational::from(a * lc.pow((n - 1 - i) as u32))
            }
        })
        .collect();
    let mut out: Vec<BigRational> = integer_roots(&g)
        .into_iter()
        .map(|y| BigRational::new(y, lc.clone()))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Monic irreducible factors over Q: rational roots split off first, the rest
/// factored by Kronecker interpolation with a hard search budget.
pub fn factor_rational(coeffs: &[BigRational], level: usize) -> Result<Vec<ZPoly>> {
    let mut out = Vec::new();
    let mut rest: Vec<BigRational> = coeffs.to_vec();
    while rest.last().map_or(false, |c| c.is_zero()) {
        rest.pop();
    }
    assert!(rest.len() >= 2, "factor_rational needs positive degree");
    for r in rational_roots(&rest.clone()) {
        loop {
            let (q, rem) = synthetic_div(&rest, &r);
            if !rem.is_zero() {
                break;
            }
            out.push(ZPoly::new(
                level,
                vec![FieldElement::from_rat(-r.clone()), FieldElement::one()],
            ));
            rest = q;
            if rest.len() <= 1 {
                break;
            }
        }
        if rest.len() <= 1 {
            break;
        }
    }
    if rest.len() >= 2 {
        let ints = clear_to_int(&rest);
        for f in kronecker_from(&ints, 2)? {
            let zf = ZPoly::new(
                level,
                f.iter()
                    .map(|c| FieldElement::from_rat(BigRational::from(c.clone())))
                    .collect(),
            );
            out.push(zf.monic());
        }
    }
    out.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.cmp_structural(b))
    });
    Ok(out)
}

fn synthetic_div(coeffs: &[BigRational], r: &BigRational) -> (Vec<BigRational>, BigRational) {
    let n = coeffs.len() - 1;
    let mut quot = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for i in (1..=n).rev() {
        carry = &coeffs[i] + &carry * r;
        quot[i - 1] = carry.clone();
    }
    let rem = &coeffs[0] + &carry * r;
    (quot, rem)
}

fn clear_to_int(coeffs: &[BigRational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    ints.iter().map(|c| c / &content).collect()
}

const KRONECKER_BUDGET: u64 = 2_000_000;
const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

fn eval_int_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn divisors(v: &BigInt) -> Result<Vec<BigInt>> {
    let v = v.abs();
    if v.is_zero() || v > BigInt::from(DIVISOR_LIMIT) {
        return Err(EngineError::FactorBudgetExceeded);
    }
    let n = v.to_u64_digits().1.first().copied().unwrap_or(0);
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d != n / d {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out.sort();
    Ok(out)
}

/// Kronecker factor search for a primitive integer polynomial without
/// rational roots, starting at factor degree `start`.
fn kronecker_from(coeffs: &[BigInt], start: usize) -> Result<Vec<Vec<BigInt>>> {
    let deg = coeffs.len() - 1;
    let half = deg / 2;
    for d in start..=half {
        let points: Vec<BigInt> = (0..=d)
            .map(|i| {
                let m = (i as i64 + 1) / 2;
                BigInt::from(if i % 2 == 1 { m } else { -m })
            })
            .collect();
        let values: Vec<BigInt> = points.iter().map(|x| eval_int_poly(coeffs, x)).collect();
        let divisor_sets: Vec<Vec<BigInt>> =
            values.iter().map(divisors).collect::<Result<_>>()?;
        let mut total: u64 = 1;
        for s in &divisor_sets {
            total = total.saturating_mul(2 * s.len() as u64);
        }
        if total > KRONECKER_BUDGET {
            return Err(EngineError::FactorBudgetExceeded);
        }
        let sizes: Vec<usize> = divisor_sets.iter().map(|s| 2 * s.len()).collect();
        let mut idx = vec![0usize; d + 1];
        'tuples: loop {
            // first coordinate positive: factors are determined up to sign
            if idx[0] % 2 == 0 {
                let tuple: Vec<BigInt> = (0..=d)
                    .map(|i| {
                        let j = idx[i];
                        let base = &divisor_sets[i][j / 2];
                        if j % 2 == 1 {
                            -base.clone()
                        } else {
                            base.clone()
                        }
                    })
                    .collect();
                if let Some(g) = interpolate_integer(&points, &tuple, d) {
                    if let Some(q) = int_poly_div(coeffs, &g) {
                        let mut left = kronecker_from(&primitive(&g), 2)?;
                        left.extend(kronecker_from(&primitive(&q), 2)?);
                        return Ok(left);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i > d {
                    break 'tuples;
                }
                idx[i] += 1;
                if idx[i] < sizes[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }
    Ok(vec![coeffs.to_vec()])
}

fn primitive(coeffs: &[BigInt]) -> Vec<BigInt> {
    let mut content = BigInt::zero();
    for c in coeffs {
        content = content.gcd(c);
    }
    if coeffs.last().unwrap().is_negative() {
        content = -content;
    }
    coeffs.iter().map(|c| c / &content).collect()
}

/// Lagrange interpolation through (points, values); exact degree `d` and
/// integer coefficients required.
fn interpolate_integer(points: &[BigInt], values: &[BigInt], d: usize) -> Option<Vec<BigInt>> {
    let n = points.len();
    let mut acc = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, pj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * BigRational::from(pj.clone());
            }
            basis = next;
            denom *= BigRational::from(&points[i] - pj);
        }
        let scale = BigRational::from(values[i].clone()) / denom;
        for (k, b) in basis.iter().enumerate() {
            acc[k] += b * &scale;
        }
    }
    while acc.last().map_or(false, |c| c.is_zero()) {
        acc.pop();
    }
    if acc.len() != d + 1 {
        return None;
    }
    let mut out = Vec::with_capacity(acc.len());
    for c in acc {
        if !c.denom().is_one() {
            return None;
        }
        out.push(c.numer().clone());
    }
    Some(out)
}

/// Exact division of integer polynomials; `None` if not divisible.
fn int_poly_div(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = f.len() - 1;
    let m = g.len() - 1;
    if m > n || g.last().unwrap().is_zero() {
        return None;
    }
    let mut rem: Vec<BigRational> = f.iter().map(|c| BigRational::from(c.clone())).collect();
    let lg = BigRational::from(g.last().unwrap().clone());
    let mut quot = vec![BigRational::zero(); n - m + 1];
    for k in (0..=n - m).rev() {
        let q = &rem[k + m] / &lg;
        quot[k] = q.clone();
        if q.is_zero() {
            continue;
        }
        for (j, gj) in g.iter().enumerate() {
            let sub = &q * BigRational::from(gj.clone());
            rem[k + j] -= sub;
        }
    }
    if rem.iter().take(m).any(|c| !c.is_zero()) {
        return None;
    }
    let mut out = Vec::with_capacity(quot.len());
    for q in quot {
        if !q.denom().is_one() {
            return None;
        }
        out.push(q.numer().clone());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::tower::VarSpec;

    pub fn shift_tower() -> TowerSpec {
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
    fn theta() -> FieldElement {
        FieldElement::var(0)
    }
    fn int(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[test]
    fn decompose_gamma_case() {
        // a = z: lambda = 1, one class rep z, {(0,0):1}, t=1, N=0, R=1
        let tower = shift_tower();
        let dec = decompose(&z(), &tower).unwrap();
        assert!(dec.lambda.is_one());
        assert_eq!(dec.r_classes(), 1);
        assert_eq!(dec.t, 1);
        assert_eq!(dec.n_window, 0);
        assert_eq!(dec.classes[0].representative, ZPoly::var(1));
        assert_eq!(dec.classes[0].terms, BTreeMap::from([((0, 0), 1)]));
    }

    #[test]
    fn decompose_z_over_zm1() {
        // a = z/(z-1): one class rep z, {(0,0):1, (0,1):-1}
        let tower = shift_tower();
        let a = z().div(&z().sub(&int(1))).unwrap();
        let dec = decompose(&a, &tower).unwrap();
        assert!(dec.lambda.is_one());
        assert_eq!(dec.r_classes(), 1);
        assert_eq!(
            dec.classes[0].terms,
            BTreeMap::from([((0, 0), 1), ((0, 1), -1)])
        );
        assert_eq!(dec.t, 1);
        assert_eq!(dec.n_window, 1);
        assert_eq!(recompose(&dec), a);
    }

    #[test]
    fn decompose_constant() {
        let tower = shift_tower();
        let dec = decompose(&int(3), &tower).unwrap();
        assert_eq!(dec.lambda, int(3));
        assert_eq!(dec.r_classes(), 0);
        assert_eq!(dec.t, 1);
        assert_eq!(dec.n_window, 0);
        assert_eq!(recompose(&dec), int(3));
    }

    #[test]
    fn decompose_with_theta_shift_and_multiplicity() {
        // a = z*(z-t)^2: one class rep z, {(0,0):1, (1,0):2}
        let tower = shift_tower();
        let a = z().mul(&z().sub(&theta()).pow_i(2).unwrap());
        let dec = decompose(&a, &tower).unwrap();
        assert_eq!(dec.r_classes(), 1);
        assert_eq!(
            dec.classes[0].terms,
            BTreeMap::from([((0, 0), 1), ((1, 0), 2)])
        );
        assert_eq!(dec.t, 2);
        assert_eq!(recompose(&dec), a);
    }

    #[test]
    fn unsupported_sqrt_theta() {
        // z^2 - t has roots involving t non-linearly
        let tower = shift_tower();
        let a = z().mul(&z()).sub(&theta());
        let err = decompose(&a, &tower).unwrap_err();
        assert!(matches!(err, EngineError::UnsupportedRootStructure(_)));
    }

    #[test]
    fn shift_equivalence_examples() {
        let tower = shift_tower();
        let lattice = Lattice::from_tower(&tower).unwrap();
        // p = z, q = z - t - 2 -> (1, 2)
        let p = ZPoly::var(1);
        let q = ZPoly::new(1, vec![theta().neg().sub(&int(2)), FieldElement::one()]);
        assert_eq!(shift_equivalent(&p, &q, &lattice), Some((1, 2)));
        // p = z^2+1, q = (z-1)^2+1 -> (0, 1)
        let p2 = ZPoly::var(1).mul(&ZPoly::var(1)).add(&ZPoly::one(1));
        let q2 = p2.shift_var(&int(-1));
        assert_eq!(shift_equivalent(&p2, &q2, &lattice), Some((0, 1)));
        // p = z, q = z - t/2 -> none (half-integer lattice point)
        let q3 = ZPoly::new(
            1,
            vec![
                theta().mul(&FieldElement::from_rat(rat(-1, 2))),
                FieldElement::one(),
            ],
        );
        assert_eq!(shift_equivalent(&p, &q3, &lattice), None);
    }

    #[test]
    fn shift_equivalence_is_an_equivalence() {
        let tower = shift_tower();
        let lattice = Lattice::from_tower(&tower).unwrap();
        let p = ZPoly::var(1);
        // reflexive
        assert_eq!(shift_equivalent(&p, &p, &lattice), Some((0, 0)));
        // symmetric with negated offsets, transitive with summed offsets
        let s1 = lattice
            .sigma_shift()
            .add(&lattice.phi_shift().mul(&int(2)));
        let q = p.shift_var(&s1.neg()); // offset (1, 2)
        let s2 = lattice.phi_shift().mul(&int(3));
        let r = q.shift_var(&s2.neg()); // offset (0, 3) from q
        assert_eq!(shift_equivalent(&p, &q, &lattice), Some((1, 2)));
        assert_eq!(shift_equivalent(&q, &p, &lattice), Some((-1, -2)));
        assert_eq!(shift_equivalent(&q, &r, &lattice), Some((0, 3)));
        assert_eq!(shift_equivalent(&p, &r, &lattice), Some((1, 5)));
    }

    #[test]
    fn quadratic_orbit_grouping() {
        // a = (z^2+1) * ((z-1)^2+1): one class, offsets (0,0) and (0,1)
        let tower = shift_tower();
        let p = z().mul(&z()).add(&int(1));
        let q = z().sub(&int(1)).mul(&z().sub(&int(1))).add(&int(1));
        let a = p.mul(&q);
        let dec = decompose(&a, &tower).unwrap();
        assert_eq!(dec.r_classes(), 1);
        assert_eq!(
            dec.classes[0].terms,
            BTreeMap::from([((0, 0), 1), ((0, 1), 1)])
        );
        assert_eq!(recompose(&dec), a);
    }

    #[test]
    fn translated_quadratic_orbit() {
        // a = ((z-t)^2+1)/(z^2+1): one class, terms {(0,0):-1, (1,0):1}
        let tower = shift_tower();
        let p = z().mul(&z()).add(&int(1));
        let pt = z().sub(&theta()).mul(&z().sub(&theta())).add(&int(1));
        let a = pt.div(&p).unwrap();
        let dec = decompose(&a, &tower).unwrap();
        assert_eq!(dec.r_classes(), 1);
        assert_eq!(
            dec.classes[0].terms,
            BTreeMap::from([((0, 0), -1), ((1, 0), 1)])
        );
        assert_eq!(recompose(&dec), a);
    }

    #[test]
    fn rational_sigma_shift_rejected() {
        let tower = TowerSpec::new(vec![VarSpec {
            name: "z".into(),
            phi: Action::Shift(RPoly::one()),
            sigma: Action::Shift(RPoly::from_rat(rat(1, 2))),
        }])
        .unwrap();
        let err = decompose(&FieldElement::var(0), &tower).unwrap_err();
        assert!(matches!(err, EngineError::InvalidTower(_)));
    }

    #[test]
    fn rational_roots_large_lc() {
        // 6z^2 - 5z + 1 = (2z-1)(3z-1): roots 1/2, 1/3
        let c = vec![rat(1, 1), rat(-5, 1), rat(6, 1)];
        assert_eq!(rational_roots(&c), vec![rat(1, 3), rat(1, 2)]);
    }

    #[test]
    fn kronecker_splits_quartic() {
        // (z^2+1)(z^2+3) has no rational roots
        let c = vec![rat(3, 1), rat(0, 1), rat(4, 1), rat(0, 1), rat(1, 1)];
        let fs = factor_rational(&c, 0).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].degree(), Some(2));
        assert_eq!(fs[1].degree(), Some(2));
        let product = fs[0].mul(&fs[1]);
        let expect = ZPoly::new(
            0,
            c.iter()
                .map(|x| FieldElement::from_rat(x.clone()))
                .collect(),
        );
        assert_eq!(product, expect);
    }
}
