//! Integer roots of univariate polynomials with huge rational coefficients.
//!
//! Resultants of shifted denominators routinely produce coefficients far too
//! large for divisor enumeration, so integer roots are found p-adically: pick
//! a prime where the squarefree part stays squarefree, read off the roots mod
//! p, Hensel-lift to a modulus beyond the Cauchy root bound, and verify each
//! candidate exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::RPoly;

/// All integer roots of the nonzero polynomial with the given coefficients
/// (index = degree), sorted ascending.
pub fn integer_roots(coeffs: &[BigRational]) -> Vec<BigInt> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        panic!("integer_roots: zero polynomial");
    }
    if c.len() == 1 {
        return vec![];
    }
    // clear denominators
    let mut den = BigInt::one();
    for x in &c {
        den = den.lcm(x.denom());
    }
    let mut int_coeffs: Vec<BigInt> = c
        .iter()
        .map(|x| x.numer() * (&den / x.denom()))
        .collect();
    let mut roots = Vec::new();
    // strip powers of the variable
    let mut low = 0;
    while int_coeffs[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        roots.push(BigInt::zero());
        int_coeffs.drain(0..low);
    }
    if int_coeffs.len() > 1 {
        roots.extend(nonzero_integer_roots(&int_coeffs));
    }
    roots.sort();
    roots.dedup();
    roots
}

fn nonzero_integer_roots(coeffs: &[BigInt]) -> Vec<BigInt> {
    // squarefree part over Q, reusing the recursive-poly gcd at a single level
    let as_rpoly = RPoly::poly(
        0,
        coeffs
            .iter()
            .map(|c| RPoly::from_rat(BigRational::from(c.clone())))
            .collect(),
    );
    let deriv = as_rpoly.derivative_in(0);
    let g = RPoly::gcd(&as_rpoly, &deriv);
    let sqf = as_rpoly.try_div(&g).expect("gcd divides").canon();
    let sq_coeffs: Vec<BigInt> = sqf
        .coeffs_at(0)
        .iter()
        .map(|c| {
            let r = c.as_const().expect("ground coefficients");
            assert!(r.denom().is_one(), "canon gives integer coefficients");
            r.numer().clone()
        })
        .collect();
    if sq_coeffs.len() <= 1 {
        return vec![];
    }

    // Cauchy bound on |roots|
    let lc = sq_coeffs.last().unwrap().abs();
    let max_c = sq_coeffs
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap();
    let bound: BigInt = BigInt::one() + max_c.div_ceil(&lc);

    let p = find_good_prime(&sq_coeffs);
    let candidates = roots_mod_p(&sq_coeffs, p);
    let mut out = Vec::new();
    for r in candidates {
        if let Some(root) = hensel_lift(&sq_coeffs, p, r, &bound) {
            if eval_int(&sq_coeffs, &root).is_zero() {
                out.push(root);
            }
        }
    }
    out
}

fn eval_int(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn eval_mod(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

fn derivative_coeffs(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, c)| c * BigInt::from(d))
        .collect()
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime not dividing the leading coefficient and keeping the polynomial
/// squarefree mod p; exists because the discriminant is nonzero.
fn find_good_prime(coeffs: &[BigInt]) -> u64 {
    let lc = coeffs.last().unwrap();
    let deriv = derivative_coeffs(coeffs);
    let mut p = 101u64;
    loop {
        while !is_prime_u64(p) {
            p += 2;
        }
        let pb = BigInt::from(p);
        if !lc.mod_floor(&pb).is_zero() && gcd_is_trivial_mod_p(coeffs, &deriv, p) {
            return p;
        }
        p += 2;
    }
}

fn reduce_mod_p(coeffs: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = coeffs
        .iter()
        .map(|c| {
            let r = c.mod_floor(&pb);
            r.to_u64_digits().1.first().copied().unwrap_or(0)
        })
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn gcd_is_trivial_mod_p(f: &[BigInt], df: &[BigInt], p: u64) -> bool {
    let mut a = reduce_mod_p(f, p);
    let mut b = reduce_mod_p(df, p);
    if a.len() != f.len() {
        return false; // degree dropped
    }
    while !b.is_empty() {
        let r = poly_rem_mod_p(&a, &b, p);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    // Fermat, p prime
    pow_mod(a, p - 2, p)
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        e >>= 1;
        bb = bb * bb % m as u128;
    }
    acc as u64
}

fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    let lb_inv = inv_mod_p(*b.last().unwrap(), p);
    while r.len() > db {
        let k = r.len() - 1 - db;
        let q = (r[r.len() - 1] as u128 * lb_inv as u128 % p as u128) as u64;
        if q != 0 {
            for (j, bj) in b.iter().enumerate() {
                let sub = q as u128 * *bj as u128 % p as u128;
                let idx = k + j;
                r[idx] = ((r[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
        if r.len() <= db {
            break;
        }
    }
    r
}

fn roots_mod_p(coeffs: &[BigInt], p: u64) -> Vec<u64> {
    let f = reduce_mod_p(coeffs, p);
    let mut out = Vec::new();
    for r in 0..p {
        let mut acc = 0u128;
        for c in f.iter().rev() {
            acc = (acc * r as u128 + *c as u128) % p as u128;
        }
        if acc == 0 {
            out.push(r);
        }
    }
    out
}

/// Quadratic Hensel lifting of a simple root mod p to modulus > 2*bound,
/// returning the symmetric representative.
fn hensel_lift(coeffs: &[BigInt], p: u64, root: u64, bound: &BigInt) -> Option<BigInt> {
    let deriv = derivative_coeffs(coeffs);
    let mut modulus = BigInt::from(p);
    let mut x = BigInt::from(root);
    let dfx = eval_mod(&deriv, &x, &modulus);
    if dfx.is_zero() {
        return None; // not a simple root at this prime
    }
    let mut s = mod_inverse(&dfx, &modulus)?;
    let target: BigInt = BigInt::from(2) * bound + 1;
    while modulus < target {
        let m2 = &modulus * &modulus;
        // x <- x - f(x) * s  (mod m^2)
        let fx = eval_mod(coeffs, &x, &m2);
        x = (&x - fx * &s).mod_floor(&m2);
        // s <- s * (2 - f'(x) * s) (mod m^2)
        let dfx = eval_mod(&deriv, &x, &m2);
        s = (&s * (BigInt::from(2) - dfx * &s)).mod_floor(&m2);
        modulus = m2;
    }
    // symmetric representative
    let half = &modulus / 2;
    if x > half {
        x -= &modulus;
    }
    if x.abs() <= *bound {
        Some(x)
    } else {
        None
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
