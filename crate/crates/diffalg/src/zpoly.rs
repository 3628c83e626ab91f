//! Dense polynomials in one tower variable with field coefficients.
//!
//! [`ZPoly`] is the working representation for everything that treats the top
//! variable specially: monic gcds over the parameter subfield, squarefree
//! decomposition, argument shifts p(z) -> p(z+c), and resultants.

use crate::error::Result;
use crate::field::FieldElement;
use crate::poly::RPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly {
    level: usize,
    coeffs: Vec<FieldElement>,
}

impl ZPoly {
    /// Coefficients must be free of the main variable; trailing zeros are trimmed.
    pub fn new(level: usize, mut coeffs: Vec<FieldElement>) -> ZPoly {
        debug_assert!(coeffs.iter().all(|c| c.is_constant_in(level)));
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { level, coeffs }
    }

    pub fn zero(level: usize) -> ZPoly {
        ZPoly {
            level,
            coeffs: vec![],
        }
    }

    pub fn one(level: usize) -> ZPoly {
        ZPoly::new(level, vec![FieldElement::one()])
    }

    pub fn var(level: usize) -> ZPoly {
        ZPoly::new(level, vec![FieldElement::zero(), FieldElement::one()])
    }

    pub fn constant(level: usize, c: FieldElement) -> ZPoly {
        ZPoly::new(level, vec![c])
    }

    /// Views an [`RPoly`] as a polynomial in `level` with field coefficients.
    pub fn from_rpoly(level: usize, p: &RPoly) -> ZPoly {
        let coeffs = p
            .coeffs_at(level)
            .into_iter()
            .map(FieldElement::from_rpoly)
            .collect();
        ZPoly::new(level, coeffs)
    }

    /// Splits a field element into numerator and denominator parts in `level`.
    pub fn parts_of(f: &FieldElement, level: usize) -> (ZPoly, ZPoly) {
        (
            ZPoly::from_rpoly(level, f.num()),
            ZPoly::from_rpoly(level, f.den()),
        )
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> FieldElement {
        self.coeffs.get(d).cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lc(&self) -> FieldElement {
        self.coeffs.last().cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        ZPoly::new(self.level, out)
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero(self.level);
        }
        let mut out = vec![FieldElement::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ZPoly::new(self.level, out)
    }

    pub fn scale(&self, c: &FieldElement) -> ZPoly {
        ZPoly::new(
            self.level,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
        )
    }

    pub fn pow(&self, e: usize) -> ZPoly {
        let mut result = ZPoly::one(self.level);
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

    pub fn monic(&self) -> ZPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    /// Quotient and remainder over the coefficient field; `other` nonzero.
    pub fn div_rem(&self, other: &ZPoly) -> (ZPoly, ZPoly) {
        assert!(!other.is_zero(), "division by zero polynomial");
        let m = other.degree().unwrap();
        let lc_inv = other.lc().inv().expect("nonzero lc");
        let mut rem = self.coeffs.clone();
        if rem.len() <= m {
            return (ZPoly::zero(self.level), self.clone());
        }
        let mut quot = vec![FieldElement::zero(); rem.len() - m];
        for k in (0..rem.len() - m).rev() {
            let q = rem[k + m].mul(&lc_inv);
            if q.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&q.mul(b));
            }
            quot[k] = q;
        }
        rem.truncate(m);
        (ZPoly::new(self.level, quot), ZPoly::new(self.level, rem))
    }

    pub fn rem(&self, other: &ZPoly) -> ZPoly {
        self.div_rem(other).1
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, other: &ZPoly) -> ZPoly {
        let (q, r) = self.div_rem(other);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd over the coefficient field. Divides both inputs and every
    /// common divisor divides it.
    pub fn gcd_monic(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm_monic(a: &ZPoly, b: &ZPoly) -> ZPoly {
        if a.is_zero() || b.is_zero() {
            return ZPoly::zero(a.level);
        }
        let g = ZPoly::gcd_monic(a, b);
        a.mul(b).exact_div(&g).monic()
    }

    pub fn derivative(&self) -> ZPoly {
        if self.coeffs.len() <= 1 {
            return ZPoly::zero(self.level);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, c)| c.mul(&FieldElement::from_int(d as i64)))
            .collect();
        ZPoly::new(self.level, out)
    }

    /// p(v) -> p(v + c) for a constant c of the lower tower.
    pub fn shift_var(&self, c: &FieldElement) -> ZPoly {
        debug_assert!(c.is_constant_in(self.level));
        let image = ZPoly::new(self.level, vec![c.clone(), FieldElement::one()]);
        self.compose(&image)
    }

    pub fn compose(&self, inner: &ZPoly) -> ZPoly {
        let mut acc = ZPoly::zero(self.level);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&ZPoly::constant(self.level, c.clone()));
        }
        acc
    }

    pub fn eval_at(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn to_field_element(&self) -> FieldElement {
        self.eval_at(&FieldElement::var(self.level))
    }

    /// Resultant with respect to the main variable, by the Euclidean scheme.
    pub fn resultant(f: &ZPoly, g: &ZPoly) -> FieldElement {
        if f.is_zero() || g.is_zero() {
            return FieldElement::zero();
        }
        let m = f.degree().unwrap();
        let n = g.degree().unwrap();
        if n == 0 {
            return g.lc().pow_i(m as i64).unwrap();
        }
        if m == 0 {
            return f.lc().pow_i(n as i64).unwrap();
        }
        if m < n {
            let sign = if (m * n) % 2 == 1 { -1 } else { 1 };
            return ZPoly::resultant(g, f).mul(&FieldElement::from_int(sign));
        }
        let r = f.rem(g);
        if r.is_zero() {
            return FieldElement::zero();
        }
        let dr = r.degree().unwrap();
        let sign = if (m * n) % 2 == 1 { -1 } else { 1 };
        let factor = g.lc().pow_i((m - dr) as i64).unwrap();
        ZPoly::resultant(g, &r)
            .mul(&factor)
            .mul(&FieldElement::from_int(sign))
    }

    /// Yun's squarefree decomposition: returns monic squarefree factors with
    /// multiplicities, product reconstructing `self.monic()`.
    pub fn squarefree_decomposition(&self) -> Vec<(ZPoly, usize)> {
        let f = self.monic();
        let df = f.derivative();
        let g = ZPoly::gcd_monic(&f, &df);
        if g.degree() == Some(0) {
            if f.degree() == Some(0) {
                return vec![];
            }
            return vec![(f, 1)];
        }
        let mut out = Vec::new();
        let mut c = f.exact_div(&g);
        let mut d = df.exact_div(&g).sub(&c.derivative());
        let mut i = 1usize;
        while c.degree() != Some(0) {
            let a = ZPoly::gcd_monic(&c, &d);
            if a.degree().map_or(false, |dg| dg > 0) {
                out.push((a.clone(), i));
            }
            c = c.exact_div(&a);
            d = d.exact_div(&a).sub(&c.derivative());
            i += 1;
        }
        out
    }

    /// Exact evaluation of all coefficients at a point of the lower tower.
    pub fn eval_coeffs(&self, values: &[num_rational::BigRational]) -> Result<Vec<num_rational::BigRational>> {
        self.coeffs.iter().map(|c| c.evaluate(values)).collect()
    }

    pub fn cmp_structural(&self, other: &ZPoly) -> std::cmp::Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| {
                for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()).rev() {
                    let o = a.cmp_structural(b);
                    if o != std::cmp::Ordering::Equal {
                        return o;
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

/// Monic gcd of two polynomials over the same tower level (see [`ZPoly::gcd_monic`]).
pub fn gcd_poly(p: &ZPoly, q: &ZPoly) -> ZPoly {
    ZPoly::gcd_monic(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> ZPoly {
        ZPoly::var(1)
    }
    fn theta() -> FieldElement {
        FieldElement::var(0)
    }

    #[test]
    fn gcd_examples() {
        // gcd(z^2-1, z-1) -> z-1
        let f = z().mul(&z()).sub(&ZPoly::one(1));
        let g = z().sub(&ZPoly::one(1));
        assert_eq!(gcd_poly(&f, &g), g);
        // gcd(z-θ, z-θ-1) -> 1
        let a = z().sub(&ZPoly::constant(1, theta()));
        let b = a.sub(&ZPoly::one(1));
        assert!(gcd_poly(&a, &b).is_one());
        // gcd(z^2-θ^2, z-θ) -> z-θ
        let f2 = z()
            .mul(&z())
            .sub(&ZPoly::constant(1, theta().mul(&theta())));
        assert_eq!(gcd_poly(&f2, &a), a);
    }

    #[test]
    fn shift_and_compose() {
        // p = z^2, shift by -1: (z-1)^2 = z^2 - 2z + 1
        let p = z().mul(&z());
        let shifted = p.shift_var(&FieldElement::from_int(-1));
        let expect = z()
            .sub(&ZPoly::one(1))
            .mul(&z().sub(&ZPoly::one(1)));
        assert_eq!(shifted, expect);
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // f = (z-1)^2 (z+θ)^3 z
        let f1 = z().sub(&ZPoly::one(1));
        let f2 = z().add(&ZPoly::constant(1, theta()));
        let f = f1.pow(2).mul(&f2.pow(3)).mul(&z());
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (z(), 1));
        assert_eq!(dec[1], (f1, 2));
        assert_eq!(dec[2], (f2, 3));
    }

    #[test]
    fn resultant_detects_common_roots() {
        // res(z-θ, z-θ) = 0; res(z, z-1) = -1... up to sign: nonzero
        let a = z().sub(&ZPoly::constant(1, theta()));
        assert!(ZPoly::resultant(&a, &a).is_zero());
        let r = ZPoly::resultant(&z(), &z().sub(&ZPoly::one(1)));
        assert!(!r.is_zero());
    }
}
