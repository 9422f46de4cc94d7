//! Elementary number theory on machine integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A p-adic valuation; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| if b { Some(k as u64) } else { None })
        .collect()
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor(n).iter().all(|&(_, e)| e == 1)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

pub fn inv_mod_i128(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi symbol needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (d/n) for n ≥ 1.
pub fn kronecker(d: i64, n: i64) -> i32 {
    assert!(n >= 1);
    let mut n = n;
    let mut t = 1;
    while n % 2 == 0 {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if r == 3 || r == 5 {
            t = -t;
        }
    }
    if n == 1 {
        return t;
    }
    t * jacobi(d, n)
}

/// p-adic valuation of a nonzero machine integer.
pub fn val_i64(x: i64, p: u64) -> Valuation {
    if x == 0 {
        return Valuation::Infinite;
    }
    let p = p as i64;
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

pub fn val_i128(x: i128, p: u64) -> Valuation {
    if x == 0 {
        return Valuation::Infinite;
    }
    let p = p as i128;
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

pub fn val_bigint(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        x = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Valuation of a rational number at the prime `p`.
pub fn padic_valuation(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = val_bigint(x.numer(), p).finite().unwrap_or(0);
    let den = val_bigint(x.denom(), p).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

/// Largest integer `r` with `r*r <= n`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square_i128(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// Square root of `a` modulo an odd prime `p`, if `a` is a square.
pub fn sqrt_mod_prime(a: i64, p: i64) -> Option<i64> {
    let a = a.rem_euclid(p);
    if p == 2 {
        return Some(a);
    }
    if a == 0 {
        return Some(0);
    }
    if jacobi(a, p) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let pu = p as u64;
    let au = a as u64;
    let mut q = pu - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while jacobi(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, pu);
    let mut t = pow_mod(au, q, pu);
    let mut r = pow_mod(au, q.div_ceil(2), pu);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, pu);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), pu);
        m = i;
        c = mul_mod(b, b, pu);
        t = mul_mod(t, c, pu);
        r = mul_mod(r, b, pu);
    }
    Some(r as i64)
}

/// Hilbert symbol (a, b)_ℓ for a prime ℓ, or at the real place when `ell == 0`.
pub fn hilbert_symbol(a: i64, b: i64, ell: u64) -> i32 {
    assert!(a != 0 && b != 0);
    if ell == 0 {
        return if a < 0 && b < 0 { -1 } else { 1 };
    }
    let split = |x: i64| -> (i64, i64) {
        let v = val_i64(x, ell).finite().unwrap();
        (v, x / (ell as i64).pow(v as u32))
    };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    if ell == 2 {
        let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2).rem_euclid(2);
        let omega = |x: i64| ((x.rem_euclid(16) * x.rem_euclid(16) - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return if e.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    let p = ell as i64;
    let mut s = if (alpha * beta).rem_euclid(2) == 1 && (p % 4 == 3) {
        -1
    } else {
        1
    };
    if beta % 2 == 1 {
        s *= jacobi(u, p);
    }
    if alpha % 2 == 1 {
        s *= jacobi(v, p);
    }
    s
}

/// Is `d` a fundamental discriminant?
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let m = d.rem_euclid(4);
    if m == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if m == 0 {
        let e = d / 4;
        let r = e.rem_euclid(4);
        return (r == 2 || r == 3) && is_squarefree(e.unsigned_abs());
    }
    false
}

pub fn bigint_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer does not fit in 64 bits")
}

pub fn abs_big(x: &BigInt) -> BigInt {
    x.abs()
}
