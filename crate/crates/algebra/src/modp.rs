//! Evaluation modulo a Mersenne prime, used to rule out divisibility cheaply.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::laurent::LaurentPoly;
use crate::Rational;

pub const P: u64 = (1 << 61) - 1;

pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

pub fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}

pub fn neg(a: u64) -> u64 {
    (P - a) % P
}

pub fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, P - 2))
}

fn int(x: &BigInt) -> u64 {
    let r = (x.abs() % BigInt::from(P)).to_u64().expect("reduced below P");
    if x.is_negative() {
        neg(r)
    } else {
        r
    }
}

pub fn rational(c: &Rational) -> Option<u64> {
    Some(mul(int(c.numer()), inv(int(c.denom()))?))
}

fn power(v: u64, e: i32) -> Option<u64> {
    if e >= 0 {
        Some(pow(v, e as u64))
    } else {
        Some(pow(inv(v)?, e.unsigned_abs() as u64))
    }
}

/// `p(vals) mod P`; `None` when a coefficient or a negative power is not defined.
pub fn eval(p: &LaurentPoly, vals: &[u64]) -> Option<u64> {
    let mut acc = 0;
    for (e, c) in p.terms() {
        let mut t = rational(c)?;
        for (&v, &k) in vals.iter().zip(e) {
            if k != 0 {
                t = mul(t, power(v, k)?);
            }
        }
        acc = add(acc, t);
    }
    Some(acc)
}

/// SplitMix64 stream for reproducible evaluation points.
pub struct Points(u64);

impl Points {
    pub fn new(seed: u64) -> Self {
        Points(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        (z ^ (z >> 31)) % (P - 2) + 2
    }
}

/// `false` only when `atom` certainly does not divide `num`: the atom is
/// linear in some variable, and `num` is nonzero at a point of its zero set.
pub fn may_divide(num: &LaurentPoly, atom: &LaurentPoly) -> bool {
    let lo = atom.min_exponents();
    let hi = atom.max_exponents();
    let Some(v) = (0..hi.len()).find(|&i| lo[i] == 0 && hi[i] == 1) else {
        return true;
    };
    let mut pts = Points::new(atom.len() as u64 * 31 + num.len() as u64);
    for _ in 0..3 {
        let mut vals: Vec<u64> = (0..hi.len()).map(|_| pts.next()).collect();
        vals[v] = 1;
        let (mut a, mut b) = (0, 0);
        let mut ok = true;
        for (e, c) in atom.terms() {
            let mut t = match rational(c) {
                Some(t) => t,
                None => return true,
            };
            for (i, (&x, &k)) in vals.iter().zip(e).enumerate() {
                if i != v && k != 0 {
                    match power(x, k) {
                        Some(y) => t = mul(t, y),
                        None => ok = false,
                    }
                }
            }
            if e[v] == 1 {
                a = add(a, t);
            } else {
                b = add(b, t);
            }
        }
        let Some(ainv) = inv(a).filter(|_| ok) else { continue };
        let root = mul(neg(b), ainv);
        if root == 0 {
            continue;
        }
        vals[v] = root;
        return match eval(num, &vals) {
            Some(x) => x == 0,
            None => true,
        };
    }
    true
}
