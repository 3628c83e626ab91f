//! Recursive dense polynomials over the rationals.
//!
//! A tower Q ⊂ Q(v_0) ⊂ ... ⊂ Q(v_0,...,v_m) is modeled by indexing variables
//! with levels 0..=m. An [`RPoly`] is either a rational constant or a dense
//! polynomial in the variable of some level whose coefficients live strictly
//! below that level. Constant-in-a-variable polynomials are always collapsed,
//! so structural equality is semantic equality.
//!
//! The gcd is the subresultant pseudo-remainder sequence with primitive parts
//! taken at every level, which keeps coefficient growth under control without
//! modular arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RPoly {
    Const(BigRational),
    /// Dense polynomial in variable `level`; `coeffs[d]` multiplies `v_level^d`.
    /// Invariants: `coeffs.len() >= 2`, last coefficient nonzero, every
    /// coefficient has effective level `< level`.
    Poly { level: usize, coeffs: Vec<RPoly> },
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// gcd(|a|,|b|) in the content sense: gcd of numerators over lcm of denominators.
pub fn rat_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    BigRational::new(num, den)
}

impl RPoly {
    pub fn zero() -> Self {
        RPoly::Const(BigRational::zero())
    }

    pub fn one() -> Self {
        RPoly::Const(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        RPoly::Const(BigRational::from(BigInt::from(n)))
    }

    pub fn from_rat(r: BigRational) -> Self {
        RPoly::Const(r)
    }

    pub fn var(level: usize) -> Self {
        RPoly::Poly {
            level,
            coeffs: vec![RPoly::zero(), RPoly::one()],
        }
    }

    /// Builds a polynomial node, trimming trailing zeros and collapsing
    /// degenerate cases so the representation stays canonical.
    pub fn poly(level: usize, mut coeffs: Vec<RPoly>) -> Self {
        while let Some(c) = coeffs.last() {
            if c.is_zero() {
                coeffs.pop();
            } else {
                break;
            }
        }
        match coeffs.len() {
            0 => RPoly::zero(),
            1 => coeffs.pop().unwrap(),
            _ => RPoly::Poly { level, coeffs },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RPoly::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, RPoly::Const(c) if c.is_one())
    }

    pub fn is_const(&self) -> bool {
        matches!(self, RPoly::Const(_))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            RPoly::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Highest variable level actually present, `None` for constants.
    pub fn level(&self) -> Option<usize> {
        match self {
            RPoly::Const(_) => None,
            RPoly::Poly { level, .. } => Some(*level),
        }
    }

    pub fn degree_in(&self, level: usize) -> usize {
        match self {
            RPoly::Const(_) => 0,
            RPoly::Poly { level: l, coeffs } if *l == level => coeffs.len() - 1,
            RPoly::Poly { level: l, coeffs } if *l > level => coeffs
                .iter()
                .map(|c| c.degree_in(level))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// The coefficient list of `self` viewed as a polynomial in `level`.
    /// For elements below that level this is the single coefficient `self`.
    pub fn coeffs_at(&self, level: usize) -> Vec<RPoly> {
        match self {
            RPoly::Poly { level: l, coeffs } if *l == level => coeffs.clone(),
            _ => vec![self.clone()],
        }
    }

    pub fn coeff_at(&self, level: usize, d: usize) -> RPoly {
        match self {
            RPoly::Poly { level: l, coeffs } if *l == level => {
                coeffs.get(d).cloned().unwrap_or_else(RPoly::zero)
            }
            _ if d == 0 => self.clone(),
            _ => RPoly::zero(),
        }
    }

    pub fn lead_coeff_at(&self, level: usize) -> RPoly {
        self.coeff_at(level, self.degree_in(level))
    }

    /// Leading rational obtained by following leading coefficients down the tower.
    pub fn leading_rat(&self) -> BigRational {
        match self {
            RPoly::Const(c) => c.clone(),
            RPoly::Poly { coeffs, .. } => coeffs.last().unwrap().leading_rat(),
        }
    }

    pub fn neg(&self) -> RPoly {
        match self {
            RPoly::Const(c) => RPoly::Const(-c.clone()),
            RPoly::Poly { level, coeffs } => RPoly::Poly {
                level: *level,
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
            },
        }
    }

    pub fn add(&self, other: &RPoly) -> RPoly {
        match (self.level(), other.level()) {
            (None, None) => {
                let (RPoly::Const(a), RPoly::Const(b)) = (self, other) else {
                    unreachable!()
                };
                RPoly::Const(a + b)
            }
            (la, lb) if la == lb => {
                // same level polys
                let RPoly::Poly { level, coeffs: ca } = self else {
                    unreachable!()
                };
                let RPoly::Poly { coeffs: cb, .. } = other else {
                    unreachable!()
                };
                let n = ca.len().max(cb.len());
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let x = ca.get(i);
                    let y = cb.get(i);
                    out.push(match (x, y) {
                        (Some(x), Some(y)) => x.add(y),
                        (Some(x), None) => x.clone(),
                        (None, Some(y)) => y.clone(),
                        (None, None) => unreachable!(),
                    });
                }
                RPoly::poly(*level, out)
            }
            (la, lb) if la > lb => {
                // other is a constant with respect to self's top variable
                let RPoly::Poly { level, coeffs } = self else {
                    unreachable!()
                };
                let mut out = coeffs.clone();
                out[0] = out[0].add(other);
                RPoly::poly(*level, out)
            }
            _ => other.add(self),
        }
    }

    pub fn sub(&self, other: &RPoly) -> RPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RPoly) -> RPoly {
        if self.is_zero() || other.is_zero() {
            return RPoly::zero();
        }
        match (self.level(), other.level()) {
            (None, None) => {
                let (RPoly::Const(a), RPoly::Const(b)) = (self, other) else {
                    unreachable!()
                };
                RPoly::Const(a * b)
            }
            (la, lb) if la == lb => {
                let RPoly::Poly { level, coeffs: ca } = self else {
                    unreachable!()
                };
                let RPoly::Poly { coeffs: cb, .. } = other else {
                    unreachable!()
                };
                let mut out = vec![RPoly::zero(); ca.len() + cb.len() - 1];
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        out[i + j] = out[i + j].add(&x.mul(y));
                    }
                }
                RPoly::poly(*level, out)
            }
            (la, lb) if la > lb => {
                let RPoly::Poly { level, coeffs } = self else {
                    unreachable!()
                };
                RPoly::poly(*level, coeffs.iter().map(|c| c.mul(other)).collect())
            }
            _ => other.mul(self),
        }
    }

    pub fn scale(&self, r: &BigRational) -> RPoly {
        if r.is_zero() {
            return RPoly::zero();
        }
        match self {
            RPoly::Const(c) => RPoly::Const(c * r),
            RPoly::Poly { level, coeffs } => RPoly::Poly {
                level: *level,
                coeffs: coeffs.iter().map(|c| c.scale(r)).collect(),
            },
        }
    }

    pub fn pow(&self, e: usize) -> RPoly {
        let mut result = RPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division: `Some(q)` with `self = q*g` or `None` when not divisible.
    pub fn try_div(&self, g: &RPoly) -> Option<RPoly> {
        if g.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(RPoly::zero());
        }
        match (self.level(), g.level()) {
            (_, None) => {
                let RPoly::Const(c) = g else { unreachable!() };
                Some(self.scale(&(BigRational::one() / c)))
            }
            (lf, lg) if lf < lg => None,
            (lf, lg) if lf > lg => {
                let RPoly::Poly { level, coeffs } = self else {
                    unreachable!()
                };
                let mut out = Vec::with_capacity(coeffs.len());
                for c in coeffs {
                    out.push(c.try_div(g)?);
                }
                Some(RPoly::poly(*level, out))
            }
            _ => {
                // same level: long division, every step must be exact
                let level = self.level().unwrap();
                let n = self.degree_in(level);
                let m = g.degree_in(level);
                if n < m {
                    return None;
                }
                let gm = g.lead_coeff_at(level);
                let gc = g.coeffs_at(level);
                let mut cur = self.coeffs_at(level);
                let mut quot = vec![RPoly::zero(); n - m + 1];
                for k in (0..=n - m).rev() {
                    let c = cur[k + m].clone();
                    if c.is_zero() {
                        continue;
                    }
                    let q = c.try_div(&gm)?;
                    for (j, gj) in gc.iter().enumerate() {
                        cur[k + j] = cur[k + j].sub(&q.mul(gj));
                    }
                    quot[k] = q;
                }
                if cur.iter().any(|c| !c.is_zero()) {
                    return None;
                }
                Some(RPoly::poly(level, quot))
            }
        }
    }

    /// Pseudo-remainder of `self` by `g` in the variable `level`:
    /// `lc(g)^(deg f - deg g + 1) * f = q*g + prem`.
    pub fn pseudo_rem(&self, g: &RPoly, level: usize) -> RPoly {
        let n = self.degree_in(level);
        let m = g.degree_in(level);
        assert!(!g.is_zero());
        let lg = g.lead_coeff_at(level);
        let mut r = self.clone();
        let mut e = (n as i64) - (m as i64) + 1;
        while !r.is_zero() && r.degree_in(level) >= m {
            let dr = r.degree_in(level);
            let lr = r.lead_coeff_at(level);
            // r <- lc(g)*r - lr*v^(dr-m)*g
            let mut mono = vec![RPoly::zero(); dr - m + 1];
            mono[dr - m] = lr;
            let shift = RPoly::poly(level, mono).mul(g);
            r = r.mul(&lg).sub(&shift);
            e -= 1;
        }
        for _ in 0..e {
            r = r.mul(&lg);
        }
        r
    }

    /// Signed rational content: `self = c * F` with `F` integer-primitive and
    /// positive leading rational. Zero for the zero polynomial.
    pub fn signed_rat_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut acc = BigRational::zero();
        self.fold_ground(&mut |c| acc = rat_gcd(&acc, c));
        if self.leading_rat().is_negative() {
            -acc
        } else {
            acc
        }
    }

    fn fold_ground(&self, f: &mut impl FnMut(&BigRational)) {
        match self {
            RPoly::Const(c) => {
                if !c.is_zero() {
                    f(c)
                }
            }
            RPoly::Poly { coeffs, .. } => {
                for c in coeffs {
                    c.fold_ground(f);
                }
            }
        }
    }

    /// Integer-primitive with positive leading rational; zero stays zero.
    pub fn canon(&self) -> RPoly {
        let c = self.signed_rat_content();
        if c.is_zero() {
            return RPoly::zero();
        }
        self.scale(&(BigRational::one() / c))
    }

    fn abs_normalize(&self) -> RPoly {
        if self.leading_rat().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Content of `self` viewed as a polynomial in `level`: gcd of the coefficients.
    pub fn content_at(&self, level: usize) -> RPoly {
        let mut acc = RPoly::zero();
        for c in self.coeffs_at(level) {
            acc = RPoly::gcd(&acc, &c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    pub fn primitive_at(&self, level: usize) -> RPoly {
        if self.is_zero() {
            return RPoly::zero();
        }
        let c = self.content_at(level);
        self.try_div(&c).expect("content divides").abs_normalize()
    }

    /// Subresultant-PRS gcd, primitive parts taken at every level. The result
    /// divides both arguments and is deterministic (positive leading rational).
    pub fn gcd(f: &RPoly, g: &RPoly) -> RPoly {
        if f.is_zero() {
            return g.abs_normalize();
        }
        if g.is_zero() {
            return f.abs_normalize();
        }
        match (f.level(), g.level()) {
            (None, None) => {
                let (RPoly::Const(a), RPoly::Const(b)) = (f, g) else {
                    unreachable!()
                };
                RPoly::Const(rat_gcd(a, b))
            }
            (lf, lg) => {
                let level = lf.max(lg).unwrap();
                let cf = f.content_at(level);
                let cg = g.content_at(level);
                let c = RPoly::gcd(&cf, &cg);
                if f.degree_in(level) == 0 || g.degree_in(level) == 0 {
                    return c;
                }
                let fp = f.try_div(&cf).expect("content divides");
                let gp = g.try_div(&cg).expect("content divides");
                let (mut a, mut b) = if fp.degree_in(level) >= gp.degree_in(level) {
                    (fp, gp)
                } else {
                    (gp, fp)
                };
                let mut delta = a.degree_in(level) - b.degree_in(level);
                let mut beta = if delta % 2 == 0 {
                    RPoly::from_int(-1)
                } else {
                    RPoly::one()
                };
                let mut psi = RPoly::from_int(-1);
                loop {
                    let prem = a.pseudo_rem(&b, level);
                    if prem.is_zero() {
                        return c.mul(&b.primitive_at(level));
                    }
                    let r = prem.try_div(&beta).expect("subresultant division exact");
                    let lb = b.lead_coeff_at(level);
                    let neg_lb = lb.neg();
                    if delta > 0 {
                        psi = neg_lb
                            .pow(delta)
                            .try_div(&psi.pow(delta - 1))
                            .expect("psi division exact");
                    }
                    let new_delta = b.degree_in(level) - r.degree_in(level);
                    beta = neg_lb.mul(&psi.pow(new_delta));
                    a = b;
                    b = r;
                    delta = new_delta;
                }
            }
        }
    }

    pub fn derivative_in(&self, level: usize) -> RPoly {
        match self {
            RPoly::Const(_) => RPoly::zero(),
            RPoly::Poly { level: l, coeffs } if *l == level => {
                let out: Vec<RPoly> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(d, c)| c.scale(&BigRational::from(BigInt::from(d as i64))))
                    .collect();
                RPoly::poly(level, out)
            }
            RPoly::Poly { level: l, coeffs } if *l > level => RPoly::poly(
                *l,
                coeffs.iter().map(|c| c.derivative_in(level)).collect(),
            ),
            _ => RPoly::zero(),
        }
    }

    /// Simultaneous substitution: every variable `v_l` is replaced by
    /// `images[l]`, all images read in the original variables.
    pub fn subst_all(&self, images: &[RPoly]) -> RPoly {
        match self {
            RPoly::Const(c) => RPoly::Const(c.clone()),
            RPoly::Poly { level, coeffs } => {
                let img = &images[*level];
                let mut acc = coeffs.last().unwrap().subst_all(images);
                for c in coeffs.iter().rev().skip(1) {
                    acc = acc.mul(img).add(&c.subst_all(images));
                }
                acc
            }
        }
    }

    /// Substitutes a single variable, leaving the others untouched.
    pub fn subst_one(&self, level: usize, image: &RPoly) -> RPoly {
        match self {
            RPoly::Const(c) => RPoly::Const(c.clone()),
            RPoly::Poly { level: l, coeffs } => {
                if *l == level {
                    let mut acc = coeffs.last().unwrap().clone();
                    for c in coeffs.iter().rev().skip(1) {
                        acc = acc.mul(image).add(c);
                    }
                    acc
                } else {
                    RPoly::poly(
                        *l,
                        coeffs.iter().map(|c| c.subst_one(level, image)).collect(),
                    )
                }
            }
        }
    }

    /// Exact evaluation with every variable assigned.
    pub fn eval_rat(&self, values: &[BigRational]) -> BigRational {
        match self {
            RPoly::Const(c) => c.clone(),
            RPoly::Poly { level, coeffs } => {
                let v = &values[*level];
                let mut acc = coeffs.last().unwrap().eval_rat(values);
                for c in coeffs.iter().rev().skip(1) {
                    acc = acc * v + c.eval_rat(values);
                }
                acc
            }
        }
    }

    /// Total ordering used for deterministic factor sorting.
    pub fn cmp_structural(&self, other: &RPoly) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (RPoly::Const(a), RPoly::Const(b)) => a.cmp(b),
            (RPoly::Const(_), RPoly::Poly { .. }) => Ordering::Less,
            (RPoly::Poly { .. }, RPoly::Const(_)) => Ordering::Greater,
            (
                RPoly::Poly {
                    level: la,
                    coeffs: ca,
                },
                RPoly::Poly {
                    level: lb,
                    coeffs: cb,
                },
            ) => la
                .cmp(lb)
                .then(ca.len().cmp(&cb.len()))
                .then_with(|| {
                    for (x, y) in ca.iter().zip(cb.iter()).rev() {
                        let o = x.cmp_structural(y);
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RPoly {
        RPoly::var(1)
    }
    fn th() -> RPoly {
        RPoly::var(0)
    }

    #[test]
    fn arithmetic_collapses_and_trims() {
        let p = z().mul(&z()).sub(&z().mul(&z()));
        assert!(p.is_zero());
        let q = z().add(&th()).sub(&z());
        assert_eq!(q, th());
    }

    #[test]
    fn exact_division_roundtrip() {
        // (2z+1)(z+3θ) / (2z+1)
        let f = z().scale(&rat(2, 1)).add(&RPoly::one());
        let g = z().add(&th().scale(&rat(3, 1)));
        let prod = f.mul(&g);
        assert_eq!(prod.try_div(&f).unwrap(), g);
        assert_eq!(prod.try_div(&g).unwrap(), f);
        assert!(prod.try_div(&z().add(&RPoly::one())).is_none());
    }

    #[test]
    fn gcd_trivial_and_derived_cases() {
        // gcd(z^2-1, z-1) = z-1
        let f = z().mul(&z()).sub(&RPoly::one());
        let g = z().sub(&RPoly::one());
        assert_eq!(RPoly::gcd(&f, &g), g);
        // gcd(z-θ, z-θ-1) = 1
        let a = z().sub(&th());
        let b = z().sub(&th()).sub(&RPoly::one());
        assert!(RPoly::gcd(&a, &b).is_one());
        // gcd(z^2-θ^2, z-θ) = z-θ
        let f2 = z().mul(&z()).sub(&th().mul(&th()));
        assert_eq!(RPoly::gcd(&f2, &a), a);
    }

    #[test]
    fn gcd_with_content() {
        // gcd(2z+2, 4z+4) = 2z+2
        let f = z().scale(&rat(2, 1)).add(&RPoly::from_int(2));
        let g = z().scale(&rat(4, 1)).add(&RPoly::from_int(4));
        assert_eq!(RPoly::gcd(&f, &g), f);
    }

    #[test]
    fn substitution_and_eval() {
        // f = z^2 - θ, substitute z -> z + θ
        let f = z().mul(&z()).sub(&th());
        let img = vec![th(), z().add(&th())];
        let g = f.subst_all(&img);
        // g = (z+θ)^2 - θ
        let expect = z().add(&th()).pow(2).sub(&th());
        assert_eq!(g, expect);
        let v = vec![rat(1, 2), rat(3, 1)];
        assert_eq!(g.eval_rat(&v), rat(47, 4)); // (3+1/2)^2 - 1/2 = 49/4 - 2/4
    }

    #[test]
    fn pseudo_rem_matches_euclid_on_monic() {
        // monic case: prem(f, g) is an ordinary remainder up to lc powers
        let f = z().pow(3).add(&z()).add(&RPoly::one());
        let g = z().pow(2).sub(&RPoly::one());
        let r = f.pseudo_rem(&g, 1);
        // f = z*(z^2-1) + (2z+1)
        let expect = z().scale(&rat(2, 1)).add(&RPoly::one());
        assert_eq!(r, expect);
    }
}
