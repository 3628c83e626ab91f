//! Exact rational functions over a variable tower.
//!
//! A [`FieldElement`] is a reduced fraction of recursive polynomials. The
//! canonical form keeps numerator and denominator coprime with the denominator
//! integer-primitive and positive-leading, so structural equality is equality
//! in the field and hashing/sorting are well defined.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{EngineError, Result};
use crate::poly::RPoly;
use crate::tower::{Endo, TowerSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    num: RPoly,
    den: RPoly,
}

impl FieldElement {
    fn normalized(num: RPoly, den: RPoly) -> FieldElement {
        assert!(!den.is_zero(), "internal: zero denominator");
        if num.is_zero() {
            return FieldElement {
                num: RPoly::zero(),
                den: RPoly::one(),
            };
        }
        let g = RPoly::gcd(&num, &den);
        let num = num.try_div(&g).expect("gcd divides numerator");
        let den = den.try_div(&g).expect("gcd divides denominator");
        let unit = den.signed_rat_content();
        let inv = BigRational::one() / unit;
        FieldElement {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn new(num: RPoly, den: RPoly) -> Result<FieldElement> {
        if den.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_rpoly(p: RPoly) -> FieldElement {
        FieldElement {
            num: p,
            den: RPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> FieldElement {
        Self::from_rpoly(RPoly::from_int(n))
    }

    pub fn from_rat(r: BigRational) -> FieldElement {
        Self::from_rpoly(RPoly::from_rat(r))
    }

    pub fn zero() -> FieldElement {
        Self::from_int(0)
    }

    pub fn one() -> FieldElement {
        Self::from_int(1)
    }

    pub fn var(level: usize) -> FieldElement {
        Self::from_rpoly(RPoly::var(level))
    }

    pub fn num(&self) -> &RPoly {
        &self.num
    }

    pub fn den(&self) -> &RPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Polynomial with trivial denominator.
    pub fn as_rpoly(&self) -> Option<&RPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        if self.den.is_one() {
            self.num.as_const()
        } else {
            None
        }
    }

    /// Free of the variable at `level` (in numerator and denominator).
    pub fn is_constant_in(&self, level: usize) -> bool {
        self.num.degree_in(level) == 0 && self.den.degree_in(level) == 0
    }

    pub fn max_level(&self) -> Option<usize> {
        self.num.level().max(self.den.level())
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::normalized(num, den)
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        if other.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Self::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn pow_i(&self, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(FieldElement::normalized(
                self.num.pow(e as usize),
                self.den.pow(e as usize),
            ))
        } else {
            self.inv()?.pow_i(-e)
        }
    }

    /// Applies phi or sigma `power` times by simultaneous substitution of all
    /// variable images; affine actions with nonzero linear part keep the
    /// denominator nonzero.
    pub fn apply_endo(&self, tower: &TowerSpec, endo: Endo, power: usize) -> FieldElement {
        let images = tower.images(endo);
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for _ in 0..power {
            num = num.subst_all(images);
            den = den.subst_all(images);
        }
        Self::normalized(num, den)
    }

    /// Exact value with every variable assigned; poles are reported.
    pub fn evaluate(&self, values: &[BigRational]) -> Result<BigRational> {
        let d = self.den.eval_rat(values);
        if d.is_zero() {
            return Err(EngineError::PoleAtPoint(format!("{:?}", self.den)));
        }
        Ok(self.num.eval_rat(values) / d)
    }

    pub fn cmp_structural(&self, other: &FieldElement) -> std::cmp::Ordering {
        self.num
            .cmp_structural(&other.num)
            .then_with(|| self.den.cmp_structural(&other.den))
    }

    /// Renders the element in the expression grammar of the CLI.
    pub fn render(&self, tower: &TowerSpec) -> String {
        let num = render_rpoly(&self.num, tower);
        if self.den.is_one() {
            return num;
        }
        let den = render_rpoly(&self.den, tower);
        let num_wrapped = if needs_parens_as_numerator(&num) {
            format!("({num})")
        } else {
            num
        };
        let den_wrapped = if is_atom(&den) {
            den
        } else {
            format!("({den})")
        };
        format!("{num_wrapped}/{den_wrapped}")
    }
}

fn is_atom(s: &str) -> bool {
    // a bare integer, a variable, or var^k parse unambiguously as a denominator
    !s.is_empty()
        && !s.contains(' ')
        && !s.contains('*')
        && !s.contains('/')
        && !s.contains('(')
        && !s.starts_with('-')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '^')
}

fn needs_parens_as_numerator(s: &str) -> bool {
    s.contains(" + ") || s.contains(" - ")
}

fn render_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn render_rpoly(p: &RPoly, tower: &TowerSpec) -> String {
    match p {
        RPoly::Const(c) => render_rat(c),
        RPoly::Poly { level, coeffs } => {
            let name = tower.name(*level);
            let mut out = String::new();
            for (d, c) in coeffs.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let term = render_term(c, name, d, tower);
                if out.is_empty() {
                    out = term;
                } else if let Some(rest) = term.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&term);
                }
            }
            out
        }
    }
}

fn render_term(coeff: &RPoly, name: &str, d: usize, tower: &TowerSpec) -> String {
    let pow = match d {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{d}"),
    };
    if d == 0 {
        return match coeff {
            RPoly::Const(c) => render_rat(c),
            _ => {
                let s = render_rpoly(coeff, tower);
                if needs_parens_as_numerator(&s) {
                    format!("({s})")
                } else {
                    s
                }
            }
        };
    }
    match coeff {
        RPoly::Const(c) if c.is_one() => pow,
        RPoly::Const(c) if (-c).is_one() => format!("-{pow}"),
        RPoly::Const(c) => {
            if c.is_negative() {
                format!("-{}*{}", render_rat(&-c), pow)
            } else {
                format!("{}*{}", render_rat(c), pow)
            }
        }
        _ => {
            let s = render_rpoly(coeff, tower);
            if needs_parens_as_numerator(&s) {
                format!("({s})*{pow}")
            } else {
                format!("{s}*{pow}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::tower::{Action, VarSpec};

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
    fn th() -> FieldElement {
        FieldElement::var(0)
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        // (z/(z-1)) * ((z-1)/z) = 1
        let zm1 = z().sub(&FieldElement::one());
        let f = z().div(&zm1).unwrap();
        let g = zm1.div(&z()).unwrap();
        assert!(f.mul(&g).is_one());
    }

    #[test]
    fn partial_fraction_sum() {
        // 1/z + 1/(z+1) = (2z+1)/(z^2+z)
        let f = FieldElement::one().div(&z()).unwrap();
        let g = FieldElement::one()
            .div(&z().add(&FieldElement::one()))
            .unwrap();
        let s = f.add(&g);
        let num = RPoly::var(1).scale(&rat(2, 1)).add(&RPoly::one());
        let den = RPoly::var(1).pow(2).add(&RPoly::var(1));
        assert_eq!(s, FieldElement::new(num, den).unwrap());
        // cross-check by evaluation at z=1: 1 + 1/2 = 3/2
        assert_eq!(s.evaluate(&[rat(0, 1), rat(1, 1)]).unwrap(), rat(3, 2));
    }

    #[test]
    fn sum_of_generators_is_polynomial() {
        let s = z().add(&th());
        assert!(s.den().is_one());
        assert_eq!(*s.num(), RPoly::var(1).add(&RPoly::var(0)));
    }

    #[test]
    fn endo_substitution_examples() {
        let tower = shift_tower();
        // phi: z/(z-1) -> (z+1)/z
        let zm1 = z().sub(&FieldElement::one());
        let f = z().div(&zm1).unwrap();
        let expect = z()
            .add(&FieldElement::one())
            .div(&z())
            .unwrap();
        assert_eq!(f.apply_endo(&tower, Endo::Phi, 1), expect);
        // sigma^2: z -> z + 2t
        let s2 = z().apply_endo(&tower, Endo::Sigma, 2);
        let expect2 = z().add(&th().mul(&FieldElement::from_int(2)));
        assert_eq!(s2, expect2);
    }

    #[test]
    fn q_dilation_endo() {
        // Q(q)(x), phi: x -> q*x
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
        let x = FieldElement::var(1);
        let q = FieldElement::var(0);
        assert_eq!(x.apply_endo(&tower, Endo::Phi, 1), q.mul(&x));
    }

    #[test]
    fn evaluation_pole_detected() {
        let zm1 = z().sub(&FieldElement::one());
        let f = FieldElement::one().div(&zm1).unwrap();
        let err = f.evaluate(&[rat(0, 1), rat(1, 1)]).unwrap_err();
        assert!(matches!(err, EngineError::PoleAtPoint(_)));
        // z - t at z=3, t=1/2
        let g = z().sub(&th());
        assert_eq!(g.evaluate(&[rat(1, 2), rat(3, 1)]).unwrap(), rat(5, 2));
    }

    #[test]
    fn normalization_is_idempotent_and_canonical() {
        // (2z+2)/(4z-4) must reduce to (z+1)/(2z-2): denominator integer-primitive
        let num = RPoly::var(1).scale(&rat(2, 1)).add(&RPoly::from_int(2));
        let den = RPoly::var(1).scale(&rat(4, 1)).sub(&RPoly::from_int(4));
        let f = FieldElement::new(num, den).unwrap();
        let again = FieldElement::new(f.num().clone(), f.den().clone()).unwrap();
        assert_eq!(f, again);
        assert_eq!(
            f.den().signed_rat_content(),
            rat(1, 1),
            "denominator must be integer-primitive with positive lead"
        );
    }

    #[test]
    fn render_round_examples() {
        let tower = shift_tower();
        let zm1 = z().sub(&FieldElement::one());
        let f = z().div(&zm1).unwrap();
        assert_eq!(f.render(&tower), "z/(z - 1)");
        let g = z().sub(&th()).mul(&z());
        assert_eq!(g.render(&tower), "z^2 - t*z");
    }
}
