//! Local invariants of semistable elliptic curves and imaginary quadratic fields:
//! level splitting, minimal discriminants, Tamagawa exponents, hypothesis CR,
//! unit roots and the trivial-character bookkeeping.
//!
//! Tamagawa exponents use the Tate parameter: for multiplicative reduction at ℓ
//! and odd p ≠ ℓ, E[p^t] is unramified at ℓ exactly when p^t divides
//! ord_ℓ(q_E) = ord_ℓ(Δ_min). An unramified quadratic twist changes nothing
//! for odd p, so t_f(ℓ) = ord_p(ord_ℓ(Δ_min)).

use crate::arith::{factor, is_fundamental_discriminant, is_prime, jacobi, kronecker, prime_divisors, primes_up_to, val_i128, Valuation};
use crate::error::{Error, Result};
use crate::forms::class_number;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticField {
    pub disc: i64,
    pub class_number: u64,
    /// Half the number of roots of unity.
    pub unit_half_order: u64,
}

impl QuadraticField {
    pub fn new(disc: i64) -> Result<Self> {
        if disc >= 0 || !is_fundamental_discriminant(disc) {
            return Err(Error::InvalidInput(format!("{disc} is not a negative fundamental discriminant")));
        }
        let u = match disc {
            -3 => 3,
            -4 => 2,
            _ => 1,
        };
        Ok(QuadraticField { disc, class_number: class_number(disc), unit_half_order: u })
    }

    /// Splitting type of a prime: 1 split, −1 inert, 0 ramified.
    pub fn splitting(&self, q: u64) -> i32 {
        kronecker(self.disc, q as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSplitting {
    pub n: u64,
    pub n_plus: u64,
    pub n_minus: u64,
    /// Number of primes dividing N⁻ is odd (definite case).
    pub odd: bool,
}

impl LevelSplitting {
    pub fn parity(&self) -> &'static str {
        if self.odd {
            "odd"
        } else {
            "even"
        }
    }

    pub fn require_definite(&self) -> Result<()> {
        if self.odd {
            Ok(())
        } else {
            Err(Error::Hypothesis("indefinite case, out of scope".into()))
        }
    }
}

pub fn split_level(n: u64, k: &QuadraticField) -> Result<LevelSplitting> {
    if n.gcd(&k.disc.unsigned_abs()) != 1 {
        return Err(Error::Hypothesis(format!("gcd(N, D) > 1 for N={n}, D={}", k.disc)));
    }
    let (mut np, mut nm) = (1, 1);
    for (q, e) in factor(n) {
        let qe = q.pow(e);
        if k.splitting(q) == 1 {
            np *= qe;
        } else {
            nm *= qe;
        }
    }
    Ok(LevelSplitting { n, n_plus: np, n_minus: nm, odd: prime_divisors(nm).len() % 2 == 1 })
}

/// c₄, c₆, Δ of a Weierstrass model.
pub fn invariants_of(a: &[i64; 5]) -> (i128, i128, i128) {
    let [a1, a2, a3, a4, a6] = a.map(|x| x as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = a1 * a3 + 2 * a4;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = b2 * b2 - 24 * b4;
    let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    let disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    (c4, c6, disc)
}

/// An integral model with a₁, a₃ ∈ {0,1}, a₂ ∈ {−1,0,1} and the given c₄, c₆, if one exists.
fn model_from_c4c6(c4: i128, c6: i128) -> Option<[i64; 5]> {
    for b2 in -5i128..=6 {
        if (b2 * b2 - c4) % 24 != 0 {
            continue;
        }
        let b4 = (b2 * b2 - c4) / 24;
        let num = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
        if num % 216 != 0 {
            continue;
        }
        let b6 = num / 216;
        let a1 = b2.rem_euclid(2);
        let a3 = b6.rem_euclid(2);
        if (b2 - a1) % 4 != 0 || (b4 - a1 * a3) % 2 != 0 || (b6 - a3) % 4 != 0 {
            continue;
        }
        let a2 = (b2 - a1) / 4;
        let a4 = (b4 - a1 * a3) / 2;
        let a6 = (b6 - a3) / 4;
        let model = [a1, a2, a3, a4, a6].map(|x| x as i64);
        let (c4m, c6m, _) = invariants_of(&model);
        if c4m == c4 && c6m == c6 && a2.abs() <= 1 {
            return Some(model);
        }
    }
    None
}

/// A semistable elliptic curve over Q with its reduced global minimal model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurve {
    pub input: [i64; 5],
    pub minimal: [i64; 5],
    pub c4: i128,
    pub c6: i128,
    pub min_disc: i128,
    pub conductor: u64,
    /// (prime, ord Δ_min) for each bad prime.
    pub bad_primes: Vec<(u64, u32)>,
}

fn abs_u64(x: i128) -> Result<u64> {
    u64::try_from(x.unsigned_abs()).map_err(|_| Error::InvalidInput("discriminant exceeds 64 bits".into()))
}

impl EllipticCurve {
    /// Minimise and classify reduction; additive reduction is rejected.
    pub fn new(a: [i64; 5]) -> Result<Self> {
        Self::with_conductor_hint(a, None)
    }

    /// As [`new`](Self::new); a declared conductor supplies the bad primes and is checked.
    pub fn with_conductor_hint(a: [i64; 5], declared: Option<u64>) -> Result<Self> {
        let (c4, c6, disc) = invariants_of(&a);
        if disc == 0 {
            return Err(Error::InvalidInput("singular model (Δ = 0)".into()));
        }
        // primes dividing Δ: from the declared level when possible
        let mut primes: Vec<u64> = match declared {
            Some(n) => {
                let mut rest = disc.unsigned_abs();
                let mut ps = prime_divisors(n);
                ps.extend([2, 3]);
                ps.sort_unstable();
                ps.dedup();
                for &p in &ps {
                    while rest % p as u128 == 0 {
                        rest /= p as u128;
                    }
                }
                let mut extra = prime_divisors(u64::try_from(rest).map_err(|_| Error::InvalidInput("discriminant cofactor exceeds 64 bits".into()))?);
                ps.append(&mut extra);
                ps
            }
            None => prime_divisors(abs_u64(disc)?),
        };
        primes.sort_unstable();
        primes.dedup();
        let (mut c4m, mut c6m, mut dm) = (c4, c6, disc);
        for &p in &primes {
            let pi = p as i128;
            loop {
                let (p4, p6, p12) = (pi.pow(4), pi.pow(6), pi.pow(12));
                if c4m % p4 != 0 || c6m % p6 != 0 || dm % p12 != 0 {
                    break;
                }
                if model_from_c4c6(c4m / p4, c6m / p6).is_none() {
                    break;
                }
                c4m /= p4;
                c6m /= p6;
                dm /= p12;
            }
        }
        let minimal = model_from_c4c6(c4m, c6m).expect("minimal model exists");
        let mut conductor = 1u64;
        let mut bad = Vec::new();
        for &p in &primes {
            let Valuation::Finite(v) = val_i128(dm, p) else { unreachable!() };
            if v == 0 {
                continue;
            }
            if c4m % p as i128 == 0 {
                return Err(Error::InvalidInput(format!("additive reduction at {p}: outside the squarefree scope")));
            }
            conductor *= p;
            bad.push((p, v as u32));
        }
        if let Some(n) = declared {
            if n != conductor {
                return Err(Error::InvalidInput(format!("declared conductor {n} but the model has conductor {conductor}")));
            }
        }
        Ok(EllipticCurve { input: a, minimal, c4: c4m, c6: c6m, min_disc: dm, conductor, bad_primes: bad })
    }

    /// Parse `N : a1 a2 a3 a4 a6` (the conductor is checked).
    pub fn parse(line: &str) -> Result<Self> {
        let (n, coeffs) = line
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("expected `N : a1 a2 a3 a4 a6`, got {line:?}")))?;
        let n: u64 = n.trim().parse().map_err(|_| Error::InvalidInput(format!("bad conductor in {line:?}")))?;
        let a: Vec<i64> = coeffs
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad coefficient {t:?}"))))
            .collect::<Result<_>>()?;
        let a: [i64; 5] = a.try_into().map_err(|_| Error::InvalidInput(format!("expected five coefficients in {line:?}")))?;
        Self::with_conductor_hint(a, Some(n))
    }

    pub fn ord_disc(&self, ell: u64) -> u32 {
        self.bad_primes.iter().find(|(p, _)| *p == ell).map(|&(_, v)| v).unwrap_or(0)
    }

    /// a_ℓ = ℓ + 1 − #Ẽ(F_ℓ), from the minimal model (valid at bad primes too).
    pub fn ap(&self, ell: u64) -> i64 {
        let l = ell as i64;
        let [a1, a2, a3, a4, a6] = self.minimal.map(|x| x.rem_euclid(l));
        let mut count = 1i64;
        if ell == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    if (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(2) == 0 {
                        count += 1;
                    }
                }
            }
        } else {
            for x in 0..l {
                let rhs = ((((x + a2) % l * x + a4) % l) * x + a6) % l;
                let lin = (a1 * x + a3) % l;
                let d = (lin * lin + 4 * rhs).rem_euclid(l);
                count += 1 + jacobi(d, l) as i64;
            }
        }
        l + 1 - count
    }
}

/// Δ of a global minimal model.
pub fn minimal_discriminant(a: [i64; 5]) -> Result<i128> {
    Ok(EllipticCurve::new(a)?.min_disc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamagawaRecord {
    pub ell: u64,
    pub p: u64,
    pub t: u32,
    /// ord_ℓ(Δ_min), the provenance of t.
    pub ord_disc: u32,
}

pub fn tamagawa_exponent(e: &EllipticCurve, ell: u64, p: u64) -> Result<TamagawaRecord> {
    if p == 2 || p == ell || !is_prime(p) || !is_prime(ell) {
        return Err(Error::InvalidInput(format!("need distinct primes with p odd (ℓ={ell}, p={p})")));
    }
    let ord = e.ord_disc(ell);
    let t = if ord == 0 { 0 } else { crate::arith::val_i64(ord as i64, p).finite().unwrap() as u32 };
    Ok(TamagawaRecord { ell, p, t, ord_disc: ord })
}

/// Three-valued outcome of a hypothesis test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

/// Frobenius traces witnessing that the image of ρ̄ contains SL₂(F_p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityCertificate {
    /// a_ℓ ≢ 0 with a_ℓ² − 4ℓ a non-square: rules out Borel and split-Cartan normalisers.
    pub irreducible: (u64, i64),
    /// a_ℓ ≢ 0 with a_ℓ² − 4ℓ a nonzero square: rules out non-split-Cartan normalisers.
    pub split: (u64, i64),
    /// a_ℓ²/ℓ ∉ {0,1,2,4} and not a root of u² − 3u + 1: rules out exceptional images.
    pub non_exceptional: (u64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrPrime {
    pub q: u64,
    pub q_mod_p: u64,
    pub plus_minus_one: bool,
    pub ramified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrReport {
    pub p: u64,
    pub surjective: Verdict,
    pub certificate: Option<SurjectivityCertificate>,
    /// A rational point of order p, when one exists (then ρ̄ is reducible).
    pub torsion_point: Option<(String, String)>,
    pub sampling_bound: u64,
    pub primes: Vec<CrPrime>,
    pub cr: Verdict,
}

pub const DEFAULT_SAMPLING_BOUND: u64 = 1000;

fn legendre(a: i64, p: u64) -> i32 {
    jacobi(a.rem_euclid(p as i64), p as i64)
}

/// Search Frobenius traces for a surjectivity certificate (p ≥ 5).
pub fn surjectivity_certificate(e: &EllipticCurve, p: u64, bound: u64) -> Option<SurjectivityCertificate> {
    let pi = p as i64;
    let (mut s1, mut s2, mut s3) = (None, None, None);
    for ell in primes_up_to(bound) {
        if e.conductor.is_multiple_of(ell) || ell == p {
            continue;
        }
        let a = e.ap(ell);
        let am = a.rem_euclid(pi);
        let disc = (a * a - 4 * ell as i64).rem_euclid(pi);
        if am != 0 && disc != 0 {
            if legendre(disc, p) == -1 {
                s1.get_or_insert((ell, a));
            } else {
                s2.get_or_insert((ell, a));
            }
        }
        let linv = crate::arith::inv_mod(ell as i64 % pi, pi).unwrap();
        let u = (am * am % pi * linv).rem_euclid(pi);
        if ![0, 1, 2, 4].contains(&u) && (u * u - 3 * u + 1).rem_euclid(pi) != 0 {
            s3.get_or_insert((ell, a));
        }
        if let (Some(a), Some(b), Some(c)) = (s1, s2, s3) {
            return Some(SurjectivityCertificate { irreducible: a, split: b, non_exceptional: c });
        }
    }
    None
}

type Pt = Option<(BigRational, BigRational)>;

/// Addition on y² = x³ + Ax + B.
fn short_add(a: &BigRational, p: &Pt, q: &Pt) -> Pt {
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return p.clone().or(q.clone());
    };
    let lambda = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return None;
        }
        (BigRational::from_integer(3.into()) * x1 * x1 + a) / (BigRational::from_integer(2.into()) * y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &lambda * &lambda - x1 - x2;
    let y3 = &lambda * (x1 - &x3) - y1;
    Some((x3, y3))
}

/// Integral roots of x³ + Ax + B = c, by checking integers near the real roots.
fn integer_cubic_roots(a: i128, b: i128) -> Vec<i128> {
    let f = |x: i128| -> Option<i128> { x.checked_mul(x)?.checked_mul(x)?.checked_add(a.checked_mul(x)?)?.checked_add(b) };
    let af = a as f64;
    let bf = b as f64;
    let mut cands = Vec::new();
    // real roots of x³ + ax + b via Newton from several starts
    let scale = 1.0 + af.abs().sqrt() + bf.abs().cbrt();
    for start in [-2.0 * scale, -scale, -0.5 * scale, 0.0, 0.5 * scale, scale, 2.0 * scale] {
        let mut x: f64 = start;
        for _ in 0..200 {
            let fx = x * x * x + af * x + bf;
            let d = 3.0 * x * x + af;
            if d == 0.0 {
                break;
            }
            x -= fx / d;
        }
        let r = x.round() as i128;
        cands.extend(r - 2..=r + 2);
    }
    cands.sort_unstable();
    cands.dedup();
    cands.into_iter().filter(|&x| f(x) == Some(0)).collect()
}

/// A rational point of exact order p (p ≥ 5), via Nagell–Lutz on y² = x³ − 27c₄x − 54c₆.
/// Coordinates are on that short model.
pub fn rational_torsion_point(e: &EllipticCurve, p: u64) -> Option<(BigRational, BigRational)> {
    let a = -27 * e.c4;
    let b = -54 * e.c6;
    let m = (4 * a.checked_pow(3)? + 27 * b * b).unsigned_abs();
    // y² | m: enumerate square divisors from the known prime support
    let mut primes = vec![2u64, 3];
    primes.extend(e.bad_primes.iter().map(|&(q, _)| q));
    primes.sort_unstable();
    primes.dedup();
    let mut ys: Vec<u128> = vec![1];
    let mut rest = m;
    for q in primes {
        let mut k = 0;
        while rest.is_multiple_of(q as u128) {
            rest /= q as u128;
            k += 1;
        }
        let cur = ys.clone();
        let mut qk = 1u128;
        for _ in 0..k / 2 {
            qk *= q as u128;
            ys.extend(cur.iter().map(|y| y * qk));
        }
    }
    if rest != 1 {
        return None;
    }
    let aq = BigRational::from_integer(BigInt::from(a));
    for y in ys {
        let yi = y as i128;
        for x in integer_cubic_roots(a, b - yi * yi) {
            for sy in [yi, -yi] {
                let pt: Pt = Some((BigRational::from_integer(x.into()), BigRational::from_integer(sy.into())));
                let mut acc = pt.clone();
                let mut order = 1;
                while acc.is_some() && order <= 12 {
                    acc = short_add(&aq, &acc, &pt);
                    order += 1;
                }
                if acc.is_none() && order == p {
                    return pt;
                }
            }
        }
    }
    None
}

/// Hypothesis CR for (E, p) relative to N⁻.
pub fn check_cr(e: &EllipticCurve, n_minus: u64, p: u64, bound: u64) -> Result<CrReport> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("CR is only tested for primes p ≥ 5 (got {p})")));
    }
    if !e.conductor.is_multiple_of(n_minus) {
        return Err(Error::InvalidInput(format!("N⁻={n_minus} does not divide the conductor {}", e.conductor)));
    }
    let torsion = rational_torsion_point(e, p);
    let certificate = if torsion.is_some() { None } else { surjectivity_certificate(e, p, bound) };
    let surjective = match (&torsion, &certificate) {
        (Some(_), _) => Verdict::False,
        (None, Some(_)) => Verdict::True,
        _ => Verdict::Unknown,
    };
    let primes: Vec<CrPrime> = prime_divisors(n_minus)
        .into_iter()
        .map(|q| {
            let r = q % p;
            let pm1 = r == 1 || r == p - 1;
            let ramified = q == p || !e.ord_disc(q).is_multiple_of(p as u32);
            CrPrime { q, q_mod_p: r, plus_minus_one: pm1, ramified }
        })
        .collect();
    let local_ok = primes.iter().all(|c| !c.plus_minus_one || c.ramified);
    let cr = match surjective {
        Verdict::False => Verdict::False,
        _ if !local_ok => Verdict::False,
        v => v,
    };
    Ok(CrReport {
        p,
        surjective,
        certificate,
        torsion_point: torsion.map(|(x, y)| (x.to_string(), y.to_string())),
        sampling_bound: bound,
        primes,
        cr,
    })
}

/// The unit root α of x² − a_p x + p modulo p^m.
pub fn unit_root(ap: i64, p: u64, m: u32) -> Result<BigInt> {
    let pb = BigInt::from(p);
    if (BigInt::from(ap) % &pb).is_zero() {
        return Err(Error::NotOrdinary);
    }
    let modulus = pb.pow(m);
    let a = BigInt::from(ap);
    let mut x = a.mod_floor(&modulus);
    // Newton: x ← x − f(x)/f'(x); f'(x) is a unit
    for _ in 0..=m {
        let f = (&x * &x - &a * &x + &pb).mod_floor(&modulus);
        if f.is_zero() {
            break;
        }
        let df = (BigInt::from(2) * &x - &a).mod_floor(&modulus);
        let inv = mod_inverse(&df, &modulus).expect("derivative is a unit");
        x = (&x - f * inv).mod_floor(&modulus);
    }
    Ok(x)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Predicted ord_p of the trivial-character value in the minimal and Greenberg normalisations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialCharacterPrediction {
    pub selmer: u32,
    /// Σ_{v|p} 2·ord_p |E(k_v)|.
    pub local_points: u32,
    /// Σ_{v|N⁺} t_f(v), over places of K.
    pub tamagawa_plus: u32,
    /// Σ_{v|N⁻} t_f(v).
    pub tamagawa_minus: u32,
    pub minimal: u32,
    pub greenberg: u32,
}

pub fn trivial_character_prediction(e: &EllipticCurve, k: &QuadraticField, p: u64, selmer_ord: u32) -> Result<TrivialCharacterPrediction> {
    if e.conductor.is_multiple_of(p) {
        return Err(Error::InvalidInput(format!("p={p} divides the conductor")));
    }
    let split = split_level(e.conductor, k)?;
    let ap = e.ap(p) as i128;
    let pi = p as i128;
    let ordp = |n: i128| match val_i128(n, p) {
        Valuation::Finite(v) => v as u32,
        Valuation::Infinite => unreachable!("point counts are positive"),
    };
    let local_points = match k.splitting(p) {
        1 => 2 * 2 * ordp(pi + 1 - ap),
        -1 => 2 * ordp(pi * pi + 1 - (ap * ap - 2 * pi)),
        _ => 2 * ordp(pi + 1 - ap),
    };
    let mut plus = 0;
    for q in prime_divisors(split.n_plus) {
        // split primes: two places, each with the same exponent
        plus += 2 * tamagawa_exponent(e, q, p)?.t;
    }
    let mut minus = 0;
    for q in prime_divisors(split.n_minus) {
        minus += tamagawa_exponent(e, q, p)?.t;
    }
    let minimal = selmer_ord + local_points + plus;
    Ok(TrivialCharacterPrediction {
        selmer: selmer_ord,
        local_points,
        tamagawa_plus: plus,
        tamagawa_minus: minus,
        minimal,
        greenberg: minimal + minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const E11: [i64; 5] = [0, -1, 1, -10, -20];

    #[test]
    fn level_splitting() {
        let k3 = QuadraticField::new(-3).unwrap();
        let s = split_level(14, &k3).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.parity()), (7, 2, "odd"));
        let s = split_level(11, &k3).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.odd), (1, 11, true));
        let k7 = QuadraticField::new(-7).unwrap();
        let s = split_level(11, &k7).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.odd), (11, 1, false));
        assert!(s.require_definite().is_err());
        assert!(split_level(21, &k7).is_err());
        assert_eq!(k3.unit_half_order, 3);
        assert!(QuadraticField::new(-12).is_err());
    }

    #[test]
    fn conductor_11() {
        let e = EllipticCurve::new(E11).unwrap();
        assert_eq!(e.min_disc, -161051);
        assert_eq!(e.conductor, 11);
        assert_eq!(e.minimal, E11);
        let aps: Vec<i64> = [2, 3, 5, 7, 13].iter().map(|&l| e.ap(l)).collect();
        assert_eq!(aps, vec![-2, -1, 1, -2, 4]);
        assert_eq!(e.ap(11), 1);
        assert_eq!(EllipticCurve::parse("11 : 0 -1 1 -10 -20").unwrap(), e);
        assert!(EllipticCurve::parse("13 : 0 -1 1 -10 -20").is_err());
    }

    #[test]
    fn minimal_model_is_model_independent() {
        // scale by u = 2 and u = 6: a_i ← u^i a_i
        for u in [2i64, 3, 6] {
            let scaled = [E11[0] * u, E11[1] * u * u, E11[2] * u.pow(3), E11[3] * u.pow(4), E11[4] * u.pow(6)];
            let e = EllipticCurve::new(scaled).unwrap();
            assert_eq!(e.min_disc, -161051);
            assert_eq!(e.minimal, E11);
        }
        // a translated model x ← x + 1
        let e = EllipticCurve::new([0, 2, 1, -9, -30]).unwrap();
        assert_eq!(e.min_disc, -161051);
        assert!(EllipticCurve::new([0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn tamagawa_exponents() {
        let e = EllipticCurve::new(E11).unwrap();
        assert_eq!(tamagawa_exponent(&e, 11, 5).unwrap().t, 1);
        assert_eq!(tamagawa_exponent(&e, 11, 7).unwrap().t, 0);
        assert_eq!(tamagawa_exponent(&e, 3, 5).unwrap().t, 0);
        assert!(tamagawa_exponent(&e, 11, 11).is_err());
    }

    #[test]
    fn cr_for_conductor_11() {
        let e = EllipticCurve::new(E11).unwrap();
        let r5 = check_cr(&e, 11, 5, DEFAULT_SAMPLING_BOUND).unwrap();
        assert_eq!(r5.surjective, Verdict::False);
        assert_eq!(r5.cr, Verdict::False);
        // oracle: every sampled a_ℓ ≡ 1 + ℓ mod 5
        for l in primes_up_to(200).into_iter().filter(|&l| l != 11 && l != 5) {
            assert_eq!((e.ap(l) - 1 - l as i64).rem_euclid(5), 0);
        }
        let r7 = check_cr(&e, 11, 7, DEFAULT_SAMPLING_BOUND).unwrap();
        assert_eq!(r7.surjective, Verdict::True);
        assert_eq!(r7.cr, Verdict::True);
        assert!(!r7.primes[0].plus_minus_one);
        // the certificate re-checks
        let c = r7.certificate.unwrap();
        assert_eq!(e.ap(c.irreducible.0), c.irreducible.1);
    }

    #[test]
    fn cr_monotone_in_bound() {
        let e = EllipticCurve::new(E11).unwrap();
        for p in [5u64, 7, 11, 13] {
            let mut seen_true = false;
            for bound in [10u64, 30, 100, 1000] {
                let v = check_cr(&e, 11, p, bound).unwrap().surjective;
                if seen_true {
                    assert_eq!(v, Verdict::True);
                }
                seen_true |= v == Verdict::True;
            }
        }
    }

    #[test]
    fn unit_roots() {
        assert_eq!(unit_root(1, 5, 1).unwrap(), BigInt::from(1));
        let v = unit_root(-2, 7, 3).unwrap();
        // oracle: brute-force search mod 343
        let brute: Vec<i64> = (0..343).filter(|x| (x * x + 2 * x + 7) % 343 == 0 && x % 7 == 5).collect();
        assert_eq!(brute, vec![v.to_string().parse::<i64>().unwrap()]);
        assert!(matches!(unit_root(0, 5, 2), Err(Error::NotOrdinary)));
    }

    #[test]
    fn trivial_character_bookkeeping() {
        let e = EllipticCurve::new(E11).unwrap();
        let k = QuadraticField::new(-3).unwrap();
        // p = 7 is split in Q(√−3); |E(F_7)| = 8 + 2 = 10
        let t = trivial_character_prediction(&e, &k, 7, 0).unwrap();
        assert_eq!((t.minimal, t.greenberg), (0, 0));
        // p = 5 inert in Q(√−3); t(11) = 1 at the N⁻ prime
        let t5 = trivial_character_prediction(&e, &k, 5, 0).unwrap();
        assert_eq!(t5.greenberg - t5.minimal, 1);
        // a_p = 1 at a split p contributes 4
        let k2 = QuadraticField::new(-19).unwrap();
        assert_eq!(k2.splitting(5), 1);
        let t = trivial_character_prediction(&e, &k2, 5, 0).unwrap();
        assert_eq!(t.local_points, 4);
    }
}
