//! Positive definite binary quadratic forms: reduction, Gauss composition and
//! class groups of imaginary quadratic orders.

use crate::arith::{kronecker, prime_divisors};
use serde::{Deserialize, Serialize};

/// ax² + bxy + cy² with b² − 4ac < 0, a > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, x, y) with ax + by = g ≥ 0
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (r0, x0, y0) = (-r0, -x0, -y0);
    }
    (r0 as i64, x0 as i64, y0 as i64)
}

impl BinaryForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        ext_gcd(ext_gcd(self.a, self.b).0, self.c).0 == 1
    }

    pub fn is_reduced(&self) -> bool {
        let BinaryForm { a, b, c } = *self;
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if b > a || b <= -a {
                // normalize b into (−a, a]
                let k = (a - b).div_euclid(2 * a);
                let nb = b + 2 * k * a;
                c += k * (b + k * a);
                b = nb;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        BinaryForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// The principal form of the given discriminant.
    pub fn identity(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        BinaryForm { a: 1, b, c: (b * b - disc) / 4 }
    }

    pub fn inverse(&self) -> Self {
        BinaryForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// Gauss composition (Shanks/Cohen), reduced.
    pub fn compose(&self, other: &Self) -> Self {
        let disc = self.discriminant();
        debug_assert_eq!(disc, other.discriminant());
        let (f1, f2) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (g, u, _) = ext_gcd(a2 as i64, a1 as i64);
            (g as i128, u as i128)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (g, x, y) = ext_gcd(s as i64, d as i64);
            (g as i128, x as i128, -(y as i128))
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc as i128) / (4 * a3);
        BinaryForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = BinaryForm::identity(self.discriminant());
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }
}

/// All primitive reduced forms of a negative discriminant, sorted.
pub fn reduced_forms(disc: i64) -> Vec<BinaryForm> {
    assert!(disc < 0 && disc.rem_euclid(4) <= 1, "not a negative discriminant");
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            if (b * b - disc) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - disc) / (4 * a);
            let f = BinaryForm { a, b, c };
            if c >= a && f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

pub fn class_number(disc: i64) -> u64 {
    reduced_forms(disc).len() as u64
}

/// h(Dc²) from the class number formula for orders.
pub fn order_class_number(d: i64, c: u64) -> u64 {
    let hk = class_number(d);
    if c == 1 {
        return hk;
    }
    let mut num = hk as i128 * c as i128;
    let mut den = 1i128;
    for q in prime_divisors(c) {
        num *= q as i128 - kronecker(d, q as i64) as i128;
        den *= q as i128;
    }
    let unit_index = match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    (num / den / unit_index) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force count of SL₂(Z)-classes via exhaustive reduced-form search.
    fn class_number_oracle(disc: i64) -> u64 {
        let mut n = 0;
        for a in 1..=(-disc) {
            for b in -a..=a {
                for c in a..=(-disc) {
                    let f = BinaryForm { a, b, c };
                    if b * b - 4 * a * c == disc && f.is_reduced() && f.is_primitive() {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn class_numbers_small() {
        for (d, h) in [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-15, 2), (-20, 2), (-23, 3), (-47, 5), (-71, 7), (-163, 1), (-199, 9)] {
            assert_eq!(class_number(d), h, "D={d}");
        }
    }

    #[test]
    fn class_numbers_match_oracle_to_200() {
        for d in (3..=200).map(|x: i64| -x).filter(|d| d.rem_euclid(4) <= 1) {
            assert_eq!(class_number(d), class_number_oracle(d), "D={d}");
        }
    }

    #[test]
    fn order_formula_matches_enumeration() {
        for d in [-3i64, -4, -7, -8, -11, -19, -43, -20, -23] {
            for c in [2u64, 3, 5, 7, 9, 25, 49] {
                assert_eq!(order_class_number(d, c), class_number(d * (c * c) as i64), "D={d} c={c}");
            }
        }
    }

    #[test]
    fn composition_is_a_group_law() {
        for disc in [-23i64, -47, -71, -3 * 49, -4 * 25, -7 * 121, -56, -11 * 49] {
            let forms = reduced_forms(disc);
            let e = BinaryForm::identity(disc).reduce();
            for f in &forms {
                assert_eq!(f.compose(&e), *f);
                assert_eq!(f.compose(&f.inverse()), e);
                assert_eq!(f.pow(forms.len() as u64), e);
                for g in &forms {
                    assert_eq!(f.compose(g), g.compose(f));
                    assert!(forms.contains(&f.compose(g)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn composition_is_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
            let forms = reduced_forms(-4 * 1009);
            let n = forms.len();
            let (f, g, h) = (forms[i % n], forms[j % n], forms[k % n]);
            prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        }

        #[test]
        fn reduction_preserves_values(a in 1i64..50, b in -50i64..50, c in 1i64..50) {
            let f = BinaryForm { a, b, c };
            prop_assume!(f.discriminant() < 0);
            let r = f.reduce();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.discriminant(), f.discriminant());
            // f and its reduction have the same minimum
            let min = |g: &BinaryForm| (-20..=20).flat_map(|u| (-20..=20).map(move |v| (u, v))).filter(|&(u, v)| (u, v) != (0, 0)).map(|(u, v)| g.eval(u, v)).min().unwrap();
            prop_assert_eq!(min(&f), r.a);
        }
    }
}
