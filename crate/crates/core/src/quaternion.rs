//! Definite quaternion algebras over Q, lattices in them, maximal and Eichler orders.
//!
//! Elements are rational coordinate vectors in the basis 1, i, j, k with
//! i² = a, j² = b, k = ij = −ji. Lattices are kept in a canonical Hermite form
//! (integer rows over a common denominator), so equality of lattices is
//! equality of values.

use crate::arith::{hilbert_symbol, is_prime, prime_divisors, primes_up_to};
use crate::error::{Error, Result};
use crate::lattice::QuadForm;
use crate::linalg::{kernel_saturated, row_span_basis, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Quat = [BigRational; 4];

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn quat(c: [i64; 4]) -> Quat {
    [q(c[0]), q(c[1]), q(c[2]), q(c[3])]
}

pub fn quat_zero() -> Quat {
    quat([0, 0, 0, 0])
}

/// gcd of two rationals (generator of the fractional ideal they span).
pub fn rat_gcd(x: &BigRational, y: &BigRational) -> BigRational {
    if x.is_zero() {
        return y.abs();
    }
    if y.is_zero() {
        return x.abs();
    }
    let num = (x.numer() * y.denom()).gcd(&(y.numer() * x.denom()));
    BigRational::new(num, x.denom() * y.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    /// Product of the finite ramified primes.
    pub discriminant: u64,
}

impl QuaternionAlgebra {
    /// The algebra (a, b)_Q; its discriminant is read off from Hilbert symbols.
    pub fn new(a: i64, b: i64) -> Self {
        assert!(a != 0 && b != 0);
        let mut places = prime_divisors((2 * a * b).unsigned_abs());
        places.sort_unstable();
        let disc = places.iter().filter(|&&p| hilbert_symbol(a, b, p) == -1).product();
        QuaternionAlgebra { a, b, discriminant: disc }
    }

    pub fn is_definite(&self) -> bool {
        hilbert_symbol(self.a, self.b, 0) == -1
    }

    /// Ramification certificate: (a,b)_v = −1 exactly at ∞ and the primes of `n_minus`.
    pub fn certify(&self, n_minus: u64) -> bool {
        if !self.is_definite() {
            return false;
        }
        let mut places = prime_divisors((2 * self.a * self.b).unsigned_abs() * n_minus);
        places.dedup();
        places.iter().all(|&p| (hilbert_symbol(self.a, self.b, p) == -1) == n_minus.is_multiple_of(p))
    }

    /// Definite algebra ramified exactly at the primes dividing `n_minus`.
    pub fn with_discriminant(n_minus: u64) -> Result<Self> {
        let ps = prime_divisors(n_minus);
        if n_minus < 2 || ps.len().is_multiple_of(2) || ps.iter().product::<u64>() != n_minus {
            return Err(Error::InvalidInput(format!(
                "{n_minus} is not a squarefree product of an odd number of primes"
            )));
        }
        let m = n_minus as i64;
        let mut candidates: Vec<(i64, i64)> = Vec::new();
        if is_prime(n_minus) {
            if n_minus == 2 {
                candidates.push((-1, -1));
            } else if m % 4 == 3 {
                candidates.push((-1, -m));
            } else if m % 8 == 5 {
                candidates.push((-2, -m));
            }
        }
        candidates.push((-1, -m));
        candidates.push((-2, -m));
        for p in primes_up_to(2000) {
            candidates.push((-(p as i64), -m));
        }
        for p in primes_up_to(200) {
            for r in prime_divisors(n_minus) {
                candidates.push((-(p as i64), -(r as i64)));
            }
        }
        for (a, b) in candidates {
            let alg = QuaternionAlgebra::new(a, b);
            if alg.certify(n_minus) {
                return Ok(alg);
            }
        }
        Err(Error::InvalidInput(format!("no presentation found for discriminant {n_minus}")))
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let a = q(self.a);
        let b = q(self.b);
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conj(&self, x: &Quat) -> Quat {
        [x[0].clone(), -x[1].clone(), -x[2].clone(), -x[3].clone()]
    }

    pub fn nrd(&self, x: &Quat) -> BigRational {
        let a = q(self.a);
        let b = q(self.b);
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &a * &b * &x[3] * &x[3]
    }

    pub fn trd(&self, x: &Quat) -> BigRational {
        &x[0] * q(2)
    }

    /// trd(x·ȳ), the bilinear form attached to nrd.
    pub fn pairing(&self, x: &Quat, y: &Quat) -> BigRational {
        let a = q(self.a);
        let b = q(self.b);
        (&x[0] * &y[0] - &a * &x[1] * &y[1] - &b * &x[2] * &y[2] + &a * &b * &x[3] * &y[3]) * q(2)
    }

    pub fn inverse(&self, x: &Quat) -> Quat {
        let n = self.nrd(x);
        let c = self.conj(x);
        [&c[0] / &n, &c[1] / &n, &c[2] / &n, &c[3] / &n]
    }

    /// Z-lattice spanned by all products x·y, x ∈ L, y ∈ M.
    pub fn product(&self, l: &Lattice, m: &Lattice) -> Lattice {
        let mut gens = Vec::with_capacity(16);
        for x in l.basis() {
            for y in m.basis() {
                gens.push(self.mul(&x, &y));
            }
        }
        Lattice::from_generators(&gens)
    }

    pub fn conj_lattice(&self, l: &Lattice) -> Lattice {
        Lattice::from_generators(&l.basis().iter().map(|x| self.conj(x)).collect::<Vec<_>>())
    }

    pub fn left_mul(&self, x: &Quat, l: &Lattice) -> Lattice {
        Lattice::from_generators(&l.basis().iter().map(|y| self.mul(x, y)).collect::<Vec<_>>())
    }

    pub fn right_mul(&self, l: &Lattice, x: &Quat) -> Lattice {
        Lattice::from_generators(&l.basis().iter().map(|y| self.mul(y, x)).collect::<Vec<_>>())
    }

    /// {x : xL ⊆ L} = ∩_e L·e⁻¹ over a basis e of L.
    pub fn left_order(&self, l: &Lattice) -> Lattice {
        let mut acc: Option<Lattice> = None;
        for e in l.basis() {
            let part = self.right_mul(l, &self.inverse(&e));
            acc = Some(match acc {
                None => part,
                Some(x) => x.intersect(&part),
            });
        }
        acc.unwrap()
    }

    /// {x : Lx ⊆ L}.
    pub fn right_order(&self, l: &Lattice) -> Lattice {
        let mut acc: Option<Lattice> = None;
        for e in l.basis() {
            let part = self.left_mul(&self.inverse(&e), l);
            acc = Some(match acc {
                None => part,
                Some(x) => x.intersect(&part),
            });
        }
        acc.unwrap()
    }

    /// Reduced norm of a lattice: generator of the Z-module spanned by nrd(L).
    pub fn lattice_nrd(&self, l: &Lattice) -> BigRational {
        let b = l.basis();
        let mut g = BigRational::zero();
        for i in 0..4 {
            g = rat_gcd(&g, &self.nrd(&b[i]));
            for j in i + 1..4 {
                g = rat_gcd(&g, &self.pairing(&b[i], &b[j]));
            }
        }
        g
    }

    /// Gram matrix of trd(x ȳ)/scale on the lattice basis; must be integral.
    pub fn norm_form(&self, l: &Lattice, scale: &BigRational) -> QuadForm {
        let b = l.basis();
        let mut g = vec![vec![0i128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let v = self.pairing(&b[i], &b[j]) / scale;
                assert!(v.is_integer(), "norm form is not integral at this scale");
                g[i][j] = v.to_integer().to_i128().expect("Gram entry fits in 128 bits");
            }
        }
        QuadForm::new(g)
    }

    /// Reduced discriminant of an order: √|det trd(e_i ē_j)|.
    pub fn reduced_discriminant(&self, order: &Lattice) -> BigInt {
        let b = order.basis();
        let den = b
            .iter()
            .flat_map(|x| x.iter().map(|c| c.denom().clone()))
            .fold(BigInt::one(), |a, d| a.lcm(&d));
        let den2 = &den * &den;
        let mut g = IntMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let v = self.pairing(&b[i], &b[j]) * BigRational::from_integer(den2.clone());
                g.set(i, j, v.to_integer());
            }
        }
        // det scales by den^8
        let det = g.det().abs() / den2.pow(4);
        let r = det.sqrt();
        assert_eq!(&r * &r, det, "discriminant of an order is a square");
        r
    }

    fn is_integral_element(&self, x: &Quat) -> bool {
        self.trd(x).is_integer() && self.nrd(x).is_integer()
    }

    /// Ring generated by an order and one extra element, if it is an order.
    fn adjoin(&self, order: &Lattice, x: &Quat) -> Option<Lattice> {
        let mut gens = order.basis();
        gens.push(x.clone());
        let mut l = Lattice::from_generators(&gens);
        for _ in 0..8 {
            if !l.basis().iter().all(|e| self.is_integral_element(e)) {
                return None;
            }
            let next = Lattice::from_generators(
                &[l.basis(), self.product(&l, &l).basis()].concat(),
            );
            if next == l {
                return Some(l);
            }
            l = next;
        }
        None
    }

    /// A maximal order, found by enlarging Z⟨1,i,j,k⟩ one prime at a time.
    pub fn maximal_order(&self) -> Lattice {
        let mut o = Lattice::from_generators(&[quat([1, 0, 0, 0]), quat([0, 1, 0, 0]), quat([0, 0, 1, 0]), quat([0, 0, 0, 1])]);
        let target = BigInt::from(self.discriminant);
        loop {
            let d = self.reduced_discriminant(&o);
            if d == target {
                return o;
            }
            let excess = (&d / &target).to_u64().expect("small discriminant");
            let mut grown = None;
            'primes: for p in prime_divisors(excess) {
                let basis = o.basis();
                let pi = p as i64;
                for code in 1..(pi.pow(4)) {
                    let c = [code % pi, (code / pi) % pi, (code / pi / pi) % pi, code / pi / pi / pi];
                    let mut x = quat_zero();
                    for k in 0..4 {
                        for t in 0..4 {
                            x[t] += &basis[k][t] * BigRational::new(BigInt::from(c[k]), BigInt::from(p));
                        }
                    }
                    if !self.is_integral_element(&x) {
                        continue;
                    }
                    if let Some(bigger) = self.adjoin(&o, &x) {
                        if bigger != o {
                            grown = Some(bigger);
                            break 'primes;
                        }
                    }
                }
            }
            o = grown.expect("a non-maximal order has an integral enlargement");
        }
    }

    /// Eichler order of level `n_plus` inside the maximal order `o`, as O ∩ O_L(I)
    /// for an integral right O-ideal I of reduced norm `n_plus`.
    pub fn eichler_order(&self, o: &Lattice, n_plus: u64) -> Result<Lattice> {
        if n_plus == 1 {
            return Ok(o.clone());
        }
        let np = BigInt::from(n_plus);
        let basis = o.basis();
        let primes = prime_divisors(n_plus);
        let scaled: Vec<Lattice> = primes.iter().map(|&p| o.scale(&q(p as i64))).collect();
        for r in 1..=6i64 {
            let side = 2 * r + 1;
            for code in 0..side.pow(4) {
                let c = [code % side - r, (code / side) % side - r, (code / side / side) % side - r, code / side.pow(3) - r];
                if c.iter().all(|v| v.abs() < r) {
                    continue;
                }
                let mut x = quat_zero();
                for k in 0..4 {
                    for t in 0..4 {
                        x[t] += &basis[k][t] * q(c[k]);
                    }
                }
                let n = self.nrd(&x).to_integer();
                if n.is_zero() || !n.is_multiple_of(&np) {
                    continue;
                }
                if scaled.iter().any(|s| s.contains(&x)) {
                    continue;
                }
                let ideal = self.left_mul(&x, o).sum(&o.scale(&q(n_plus as i64)));
                if self.lattice_nrd(&ideal) != q(n_plus as i64) {
                    continue;
                }
                let e = o.intersect(&self.left_order(&ideal));
                if self.reduced_discriminant(&e) == BigInt::from(n_plus * self.discriminant) {
                    return Ok(e);
                }
            }
        }
        Err(Error::BudgetExceeded(format!("no Eichler order of level {n_plus} found")))
    }
}

/// A full-rank Z-lattice in B, canonical Hermite basis over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    rows: Vec<Vec<BigInt>>,
    den: BigInt,
}

impl Lattice {
    pub fn from_generators(gens: &[Quat]) -> Self {
        let den = gens
            .iter()
            .flat_map(|x| x.iter().map(|c| c.denom().clone()))
            .fold(BigInt::one(), |a, d| a.lcm(&d));
        let ints: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|x| x.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        let rows = row_span_basis(&ints, 4);
        assert_eq!(rows.len(), 4, "generators do not span a full-rank lattice");
        let g = rows.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        Lattice { rows: rows.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect(), den: den / g }
    }

    pub fn basis(&self) -> Vec<Quat> {
        self.rows
            .iter()
            .map(|r| {
                [
                    BigRational::new(r[0].clone(), self.den.clone()),
                    BigRational::new(r[1].clone(), self.den.clone()),
                    BigRational::new(r[2].clone(), self.den.clone()),
                    BigRational::new(r[3].clone(), self.den.clone()),
                ]
            })
            .collect()
    }

    /// Integer coordinates of x in the lattice basis, if x ∈ L.
    pub fn coordinates(&self, x: &Quat) -> Option<[BigInt; 4]> {
        let mut rem: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(self.den.clone())).collect();
        let mut u: [BigInt; 4] = Default::default();
        for r in 0..4 {
            if !rem[r].is_integer() {
                return None;
            }
            let v = rem[r].to_integer();
            let (qt, rm) = v.div_rem(&self.rows[r][r]);
            if !rm.is_zero() {
                return None;
            }
            for c in r..4 {
                rem[c] -= BigRational::from_integer(&qt * &self.rows[r][c]);
            }
            u[r] = qt;
        }
        Some(u)
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|x| self.contains(x))
    }

    /// Element with the given integer coordinates.
    pub fn element(&self, c: &[i64]) -> Quat {
        let b = self.basis();
        let mut x = quat_zero();
        for k in 0..4 {
            if c[k] != 0 {
                for t in 0..4 {
                    x[t] += &b[k][t] * q(c[k]);
                }
            }
        }
        x
    }

    /// Covolume relative to Z⟨1,i,j,k⟩.
    pub fn covolume(&self) -> BigRational {
        let prod: BigInt = (0..4).map(|r| self.rows[r][r].clone()).product();
        BigRational::new(prod, self.den.pow(4))
    }

    /// Index [self : sub] for a sublattice.
    pub fn index_of(&self, sub: &Lattice) -> BigRational {
        sub.covolume() / self.covolume()
    }

    pub fn scale(&self, c: &BigRational) -> Lattice {
        Lattice::from_generators(
            &self.basis().iter().map(|x| [&x[0] * c, &x[1] * c, &x[2] * c, &x[3] * c]).collect::<Vec<_>>(),
        )
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::from_generators(&[self.basis(), other.basis()].concat())
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let d = self.den.lcm(&other.den);
        let a: Vec<Vec<BigInt>> = self.rows.iter().map(|r| r.iter().map(|x| x * (&d / &self.den)).collect()).collect();
        let b: Vec<Vec<BigInt>> = other.rows.iter().map(|r| r.iter().map(|x| x * (&d / &other.den)).collect()).collect();
        // (u, v) with u·A = v·B
        let mut m = IntMatrix::zeros(4, 8);
        for c in 0..4 {
            for r in 0..4 {
                m.set(c, r, a[r][c].clone());
                m.set(c, 4 + r, -b[r][c].clone());
            }
        }
        let ker = kernel_saturated(&m);
        let gens: Vec<Quat> = ker
            .columns()
            .iter()
            .map(|w| {
                let mut x = quat_zero();
                for r in 0..4 {
                    for c in 0..4 {
                        x[c] += BigRational::new(&w[r] * &a[r][c], d.clone());
                    }
                }
                x
            })
            .collect();
        Lattice::from_generators(&gens)
    }
}
