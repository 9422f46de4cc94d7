//! Integral Hecke algebras on new subspaces and congruence exponents.
//!
//! The algebra T(N₁,N₂) is the Z-span of the Hecke operators T_n (n up to the
//! Sturm bound, closed under products) restricted to the sublattice of forms
//! new at every prime of N₂. For a rational packet f with π_f : T → Z, the
//! congruence exponent is ord_p of a generator of π_f(Ann_T(ker π_f)).

use crate::arith::{gcd_i64, is_squarefree, val_bigint};
use crate::error::{Error, Result};
use crate::linalg::{kernel_saturated, row_span_basis, IntMatrix, QMatrix};
use crate::modsym::{build_space, sturm_bound, EigenformPacket, ModSymSpace};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct HeckeAlgebra {
    pub n1: u64,
    pub n2: u64,
    /// Dimension of the N₂-new cuspidal (plus) space.
    pub dimension: usize,
    /// Columns: basis of the N₂-new lattice in cuspidal-lattice coordinates.
    pub new_lattice: IntMatrix,
    /// Z-basis of the algebra, as matrices on the new lattice.
    pub basis: Vec<IntMatrix>,
    /// Structure constants: `mul_table[i][j]` are the coordinates of basis[i]·basis[j].
    pub mul_table: Vec<Vec<Vec<BigInt>>>,
    /// Hecke indices used as generators.
    pub generators: Vec<u64>,
}

fn flatten(m: &IntMatrix) -> Vec<BigInt> {
    m.entries().to_vec()
}

fn check_factorization(n1: u64, n2: u64) -> Result<()> {
    if n1 == 0 || n2 == 0 || gcd_i64(n1 as i64, n2 as i64) != 1 || !is_squarefree(n1 * n2) {
        return Err(Error::InvalidInput(format!("({n1},{n2}) is not a coprime squarefree factorization")));
    }
    Ok(())
}

/// Hecke algebra T(N₁,N₂) built from T_1..T_B, B the Sturm bound of N₁N₂.
pub fn hecke_algebra(n1: u64, n2: u64) -> Result<HeckeAlgebra> {
    check_factorization(n1, n2)?;
    let space = build_space(n1 * n2)?;
    let b = sturm_bound(n1 * n2).bound;
    HeckeAlgebra::from_generators(&space, n1, n2, (1..=b).collect())
}

impl HeckeAlgebra {
    /// Algebra generated as a Z-module by the given T_n, closed under products.
    pub fn from_generators(space: &ModSymSpace, n1: u64, n2: u64, gens: Vec<u64>) -> Result<Self> {
        check_factorization(n1, n2)?;
        if space.level() != n1 * n2 {
            return Err(Error::InvalidInput("space level does not match N₁N₂".into()));
        }
        let new_lattice = space.new_subspace(n2)?;
        let d = new_lattice.cols();
        let wq = new_lattice.to_rational();
        let restrict = |t: &IntMatrix| -> IntMatrix {
            let img = &t.to_rational() * &wq;
            wq.solve(&img).expect("new subspace is Hecke stable").to_integer().expect("saturated lattice is preserved")
        };
        let mut ops: Vec<IntMatrix> = gens.iter().map(|&n| restrict(&space.hecke_operator(n))).collect();
        ops.push(IntMatrix::identity(d));
        let mut basis_flat = row_span_basis(&ops.iter().map(flatten).collect::<Vec<_>>(), d * d);
        // close under multiplication
        loop {
            let mats: Vec<IntMatrix> = basis_flat.iter().map(|v| IntMatrix::new(d, d, v.clone())).collect();
            let mut all = basis_flat.clone();
            for a in &mats {
                for b in &mats {
                    all.push(flatten(&(a * b)));
                }
            }
            let next = row_span_basis(&all, d * d);
            if next == basis_flat {
                break;
            }
            basis_flat = next;
        }
        let basis: Vec<IntMatrix> = basis_flat.iter().map(|v| IntMatrix::new(d, d, v.clone())).collect();
        let coords = Coordinates::new(&basis_flat, d * d);
        let mut mul_table = Vec::with_capacity(basis.len());
        for a in &basis {
            let row: Vec<Vec<BigInt>> = basis.iter().map(|b| coords.of(&flatten(&(a * b)))).collect();
            mul_table.push(row);
        }
        Ok(HeckeAlgebra { n1, n2, dimension: d, new_lattice, basis, mul_table, generators: gens })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| a * b == b * a))
    }

    /// Coordinates of the packet's eigenvector in the new lattice, if it lies there
    /// and is an eigenvector of the whole algebra.
    pub fn locate(&self, f: &EigenformPacket) -> Result<Vec<BigInt>> {
        if f.level != self.n1 * self.n2 || f.vector.len() != self.new_lattice.rows() || self.dimension == 0 {
            return Err(Error::PacketNotInSpace);
        }
        let v: Vec<BigRational> = f.vector.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let y = self
            .new_lattice
            .to_rational()
            .solve(&QMatrix::from_columns(&[v], f.vector.len()))
            .ok_or(Error::PacketNotInSpace)?;
        let y = crate::linalg::primitive_vector(&y.col(0));
        for b in &self.basis {
            let by = b.mul_vec(&y);
            let i = y.iter().position(|x| !x.is_zero()).unwrap();
            if !by[i].is_multiple_of(&y[i]) {
                return Err(Error::PacketNotInSpace);
            }
            let lam = &by[i] / &y[i];
            if by.iter().zip(&y).any(|(a, b)| *a != &lam * b) {
                return Err(Error::PacketNotInSpace);
            }
        }
        Ok(y)
    }

    /// π_f on the basis.
    pub fn character(&self, f: &EigenformPacket) -> Result<Vec<BigInt>> {
        let y = self.locate(f)?;
        let i = y.iter().position(|x| !x.is_zero()).unwrap();
        Ok(self.basis.iter().map(|b| &b.mul_vec(&y)[i] / &y[i]).collect())
    }

    /// Basis of ker π_f in algebra coordinates (columns).
    pub fn kernel_of_character(&self, chi: &[BigInt]) -> IntMatrix {
        kernel_saturated(&IntMatrix::new(1, chi.len(), chi.to_vec()))
    }

    /// Basis of Ann_T(I) for I spanned by the columns of `ideal` (algebra coordinates).
    pub fn annihilator(&self, ideal: &IntMatrix) -> IntMatrix {
        let r = self.rank();
        let d = self.dimension;
        let elems: Vec<IntMatrix> = ideal.columns().iter().map(|c| self.element(c)).collect();
        // Σ_i y_i (b_i · k) = 0 for every generator k of I
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for k in &elems {
            let prods: Vec<IntMatrix> = self.basis.iter().map(|b| b * k).collect();
            for e in 0..d * d {
                rows.push(prods.iter().map(|m| m.entries()[e].clone()).collect());
            }
        }
        if rows.is_empty() {
            return IntMatrix::identity(r);
        }
        let rows = row_span_basis(&rows, r);
        kernel_saturated(&IntMatrix::from_rows(rows, r))
    }

    pub fn element(&self, coords: &[BigInt]) -> IntMatrix {
        let d = self.dimension;
        let mut acc = IntMatrix::zeros(d, d);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = &acc + &b.scale(c);
            }
        }
        acc
    }
}

/// Solves for coordinates in a fixed integral basis.
struct Coordinates {
    basis: QMatrix,
}

impl Coordinates {
    fn new(basis_rows: &[Vec<BigInt>], dim: usize) -> Self {
        let cols: Vec<Vec<BigRational>> =
            basis_rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        Coordinates { basis: QMatrix::from_columns(&cols, dim) }
    }

    fn of(&self, v: &[BigInt]) -> Vec<BigInt> {
        let col: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let x = self.basis.solve(&QMatrix::from_columns(&[col], v.len())).expect("element lies in the span");
        x.col(0).into_iter().map(|c| {
            assert!(c.is_integer(), "algebra is closed under products");
            c.to_integer()
        }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceExponent {
    pub packet: String,
    pub n1: u64,
    pub n2: u64,
    pub p: u64,
    pub exponent: u32,
    /// The positive generator of π_f(Ann(ker π_f)).
    pub generator: BigInt,
}

/// Generator of π_f(Ann(ker π_f)) ⊂ Z.
pub fn congruence_generator(t: &HeckeAlgebra, f: &EigenformPacket) -> Result<BigInt> {
    let chi = t.character(f)?;
    let ker = t.kernel_of_character(&chi);
    let ann = t.annihilator(&ker);
    let mut g = BigInt::zero();
    for c in ann.columns() {
        let v: BigInt = c.iter().zip(&chi).map(|(a, b)| a * b).sum();
        g = g.gcd(&v);
    }
    if g.is_zero() {
        // one-dimensional algebra: ker π_f = 0 and Ann = T
        g = BigInt::one();
    }
    Ok(g)
}

pub fn congruence_exponent_in(t: &HeckeAlgebra, f: &EigenformPacket, p: u64) -> Result<CongruenceExponent> {
    let g = congruence_generator(t, f)?;
    let e = val_bigint(&g, p).finite().expect("nonzero generator") as u32;
    Ok(CongruenceExponent { packet: f.label.clone(), n1: t.n1, n2: t.n2, p, exponent: e, generator: g })
}

pub fn congruence_exponent(f: &EigenformPacket, n1: u64, n2: u64, p: u64) -> Result<CongruenceExponent> {
    let t = hecke_algebra(n1, n2)?;
    congruence_exponent_in(&t, f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, primes_up_to};
    use crate::linalg::smith_normal_form;
    use crate::modsym::newform_packets;

    /// Index of ker π_f + Ann(ker π_f) in T, read from a Smith form.
    fn index_oracle(t: &HeckeAlgebra, f: &EigenformPacket) -> BigInt {
        let chi = t.character(f).unwrap();
        let ker = t.kernel_of_character(&chi);
        let ann = t.annihilator(&ker);
        let mut cols = ker.columns();
        cols.extend(ann.columns());
        let m = IntMatrix::from_columns(&cols, t.rank());
        let s = smith_normal_form(&m);
        assert_eq!(s.rank(), t.rank());
        s.divisors.iter().product()
    }

    /// Dimension of the joint generalized eigenspace mod p of f's reduction on the new lattice.
    fn mod_p_block_dim(t: &HeckeAlgebra, f: &EigenformPacket, p: u64) -> usize {
        let chi = t.character(f).unwrap();
        let d = t.dimension;
        let mut stacked = IntMatrix::zeros(0, d);
        for (b, lam) in t.basis.iter().zip(&chi) {
            let shifted = b - &IntMatrix::identity(d).scale(lam);
            stacked = stacked.vstack(&shifted.pow(d as u32));
        }
        d - stacked.rank_mod_p(p)
    }

    #[test]
    fn level_11_algebra() {
        let t = hecke_algebra(11, 1).unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.dimension, 1);
        let t2 = hecke_algebra(1, 11).unwrap();
        assert_eq!(t2.rank(), 1);
        let f = newform_packets(&build_space(11).unwrap(), 11).unwrap().packets.remove(0);
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(congruence_exponent_in(&t, &f, p).unwrap().exponent, 0);
        }
    }

    #[test]
    fn level_37_congruence_mod_2() {
        let t = hecke_algebra(37, 1).unwrap();
        assert_eq!(t.rank(), 2);
        assert!(t.is_commutative());
        let s = build_space(37).unwrap();
        for f in newform_packets(&s, 37).unwrap().packets {
            assert!(congruence_exponent_in(&t, &f, 2).unwrap().exponent >= 1);
            assert_eq!(congruence_exponent_in(&t, &f, 5).unwrap().exponent, 0);
            assert_eq!(congruence_generator(&t, &f).unwrap(), index_oracle(&t, &f));
        }
    }

    #[test]
    fn wrong_packet_rejected() {
        let t = hecke_algebra(37, 1).unwrap();
        let f = newform_packets(&build_space(11).unwrap(), 11).unwrap().packets.remove(0);
        assert_eq!(congruence_exponent_in(&t, &f, 5), Err(Error::PacketNotInSpace));
    }

    #[test]
    fn exponent_zero_iff_isolated_mod_p() {
        for n in 2..=60u64 {
            if !is_squarefree(n) {
                continue;
            }
            let s = build_space(n).unwrap();
            let t = HeckeAlgebra::from_generators(&s, 1, n, (1..=sturm_bound(n).bound).collect()).unwrap();
            assert_eq!(t.rank(), t.dimension, "level {n}");
            for f in newform_packets(&s, n).unwrap().packets {
                let g = congruence_generator(&t, &f).unwrap();
                assert_eq!(g, index_oracle(&t, &f), "level {n}");
                for p in primes_up_to(13) {
                    let e = val_bigint(&g, p).finite().unwrap();
                    let block = mod_p_block_dim(&t, &f, p);
                    assert_eq!(e == 0, block == 1, "level {n} p={p} block {block} exponent {e}");
                }
            }
        }
    }

    #[test]
    fn generator_order_does_not_matter() {
        let s = build_space(57).unwrap();
        let b = sturm_bound(57).bound;
        let fwd = HeckeAlgebra::from_generators(&s, 57, 1, (1..=b).collect()).unwrap();
        let rev = HeckeAlgebra::from_generators(&s, 57, 1, (1..=b).rev().collect()).unwrap();
        let odd = HeckeAlgebra::from_generators(&s, 57, 1, (1..=b).filter(|k| k % 2 == 1 || is_prime(*k)).collect()).unwrap();
        for f in newform_packets(&s, 57).unwrap().packets {
            for p in [2u64, 3, 5, 7] {
                let e = congruence_exponent_in(&fwd, &f, p).unwrap().exponent;
                assert_eq!(e, congruence_exponent_in(&rev, &f, p).unwrap().exponent);
                assert_eq!(e, congruence_exponent_in(&odd, &f, p).unwrap().exponent);
            }
        }
    }
}
