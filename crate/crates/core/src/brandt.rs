//! Brandt modules: right-ideal classes of an Eichler order in a definite
//! quaternion algebra, their weights, Brandt matrices and the weighted pairing.
//!
//! The class set is found by an ℓ-neighbour traversal and certified by the
//! Eichler mass formula. Brandt matrices count elements of I_i·Ī_j of the
//! appropriate norm, so B(n)_ij = c_ij(n)/(2w_i) with c symmetric. Columns of
//! B(ℓ) sum to ℓ+1 for ℓ ∤ N and B(ℓ) is self-adjoint for ⟨e_i,e_j⟩ = w_i δ_ij.

use crate::arith::{is_squarefree, padic_valuation, prime_divisors, primes_up_to, Valuation};
use crate::error::{Error, Result};
use crate::lattice::QuadForm;
use crate::linalg::{joint_integer_eigenspaces, kernel_saturated, IntMatrix, JointEigenspace, QMatrix};
use crate::modsym::{sturm_bound, EigenformPacket, PACKET_MIN_BOUND};
use crate::quaternion::{Lattice, QuaternionAlgebra};
use log::debug;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Fingerprint depth for the isometry prefilter.
const FINGERPRINT_BOUND: i128 = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BrandtModule {
    pub n_plus: u64,
    pub n_minus: u64,
    pub algebra: QuaternionAlgebra,
    pub maximal_order: Lattice,
    pub order: Lattice,
    /// Right ideal class representatives; the first is the order itself.
    pub classes: Vec<Lattice>,
    /// nrd(I_i).
    pub norms: Vec<BigRational>,
    /// w_i = |O_L(I_i)^×|/2.
    pub weights: Vec<u64>,
    pub neighbor_prime: u64,
    /// Theta series of each class's scaled norm form, for isometry prefiltering.
    fingerprints: Vec<Vec<u64>>,
    /// Norm counts c_ij(n) for i ≤ j, n ≤ theta_bound.
    theta_bound: u64,
    pair_theta: Vec<Vec<u64>>,
}

/// The mass (1/12)∏_{q|N⁻}(q−1)∏_{q|N⁺}(q+1).
pub fn eichler_mass(n_plus: u64, n_minus: u64) -> BigRational {
    let mut m = BigRational::new(BigInt::one(), BigInt::from(12));
    for q in prime_divisors(n_minus) {
        m *= BigRational::from_integer(BigInt::from(q - 1));
    }
    for q in prime_divisors(n_plus) {
        m *= BigRational::from_integer(BigInt::from(q + 1));
    }
    m
}

fn unit_weight(alg: &QuaternionAlgebra, order: &Lattice) -> u64 {
    let f = alg.norm_form(order, &BigRational::one());
    (f.short_vectors(1).len() / 2) as u64
}

/// Norm form of I_i·Ī_j scaled to be primitive integral.
fn pair_form(alg: &QuaternionAlgebra, a: &Lattice, na: &BigRational, b: &Lattice, nb: &BigRational) -> QuadForm {
    let prod = alg.product(a, &alg.conj_lattice(b));
    alg.norm_form(&prod, &(na * nb))
}

fn pair_index(h: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * h - i * (i + 1) / 2 + j
}

impl BrandtModule {
    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    pub fn level(&self) -> u64 {
        self.n_plus * self.n_minus
    }

    pub fn mass(&self) -> BigRational {
        self.weights.iter().map(|&w| BigRational::new(BigInt::one(), BigInt::from(w))).sum()
    }

    pub fn theta_bound(&self) -> u64 {
        self.theta_bound
    }

    /// Pairing matrix diag(w).
    pub fn pairing_matrix(&self) -> IntMatrix {
        let h = self.class_number();
        let mut m = IntMatrix::zeros(h, h);
        for i in 0..h {
            m.set(i, i, BigInt::from(self.weights[i]));
        }
        m
    }

    pub fn pairing(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        x.iter().zip(y).zip(&self.weights).map(|((a, b), &w)| a * b * BigInt::from(w)).sum()
    }

    fn compute_pair_theta(&self, bound: u64) -> Vec<Vec<u64>> {
        let h = self.class_number();
        let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let f = pair_form(&self.algebra, &self.classes[i], &self.norms[i], &self.classes[j], &self.norms[j]);
                f.theta_series(bound as i128)
            })
            .collect()
    }

    /// Precompute norm counts up to `bound`.
    pub fn ensure_theta_bound(&mut self, bound: u64) {
        if bound > self.theta_bound {
            self.pair_theta = self.compute_pair_theta(bound);
            self.theta_bound = bound;
        }
    }

    /// The matrix of c_ij(n) = #{γ ∈ I_iĪ_j : nrd γ = n·nrd(I_i)nrd(I_j)}.
    pub fn norm_counts(&self, n: u64) -> Vec<Vec<u64>> {
        let h = self.class_number();
        let fresh;
        let table = if n <= self.theta_bound {
            &self.pair_theta
        } else {
            fresh = self.compute_pair_theta(n);
            &fresh
        };
        let mut c = vec![vec![0u64; h]; h];
        for i in 0..h {
            for j in 0..h {
                c[i][j] = table[pair_index(h, i, j)][n as usize];
            }
        }
        c
    }

    /// Brandt matrix B(n), acting on column vectors in the class basis.
    pub fn brandt_matrix(&self, n: u64) -> IntMatrix {
        assert!(n >= 1);
        let h = self.class_number();
        let c = self.norm_counts(n);
        let mut b = IntMatrix::zeros(h, h);
        for i in 0..h {
            for j in 0..h {
                let den = 2 * self.weights[i];
                assert_eq!(c[i][j] % den, 0, "Brandt entry is integral");
                b.set(i, j, BigInt::from(c[i][j] / den));
            }
        }
        b
    }

    /// Index of the class of a right ideal of the order.
    pub fn locate_class(&self, j: &Lattice) -> Option<usize> {
        let nj = self.algebra.lattice_nrd(j);
        let print = fingerprint(&self.algebra, j, &nj);
        (0..self.class_number()).find(|&k| {
            self.fingerprints[k] == print
                && !pair_form(&self.algebra, j, &nj, &self.classes[k], &self.norms[k]).short_vectors(1).is_empty()
        })
    }

    /// The ℓ+1 right ideals J' ⊂ J with [J : J'] = ℓ² (ℓ ∤ N).
    pub fn neighbors(&self, j: &Lattice, ell: u64) -> Vec<Lattice> {
        let nj = self.algebra.lattice_nrd(j);
        neighbors(&self.algebra, &self.order, j, &nj, ell)
    }

    /// Cuspidal sublattice {x : Σ x_i = 0}, as saturated columns.
    pub fn cuspidal_lattice(&self) -> IntMatrix {
        let h = self.class_number();
        kernel_saturated(&IntMatrix::from_rows(vec![vec![BigInt::one(); h]], h))
    }

    /// Rational eigensystems of B(ℓ), ℓ ∤ N, ℓ ≤ bound, on the cuspidal part.
    /// Also returns the dimension of the part with irrational eigenvalues.
    pub fn rational_eigensystems(&self, bound: u64) -> (Vec<JointEigenspace>, usize) {
        let ops: Vec<(u64, QMatrix, i64)> = primes_up_to(bound)
            .into_iter()
            .filter(|l| !self.level().is_multiple_of(*l))
            .map(|l| (l, self.brandt_matrix(l).to_rational(), (2.0 * (l as f64).sqrt()).floor() as i64))
            .collect();
        joint_integer_eigenspaces(&self.cuspidal_lattice().to_rational(), &ops)
    }
}

fn fingerprint(alg: &QuaternionAlgebra, i: &Lattice, n: &BigRational) -> Vec<u64> {
    alg.norm_form(i, n).theta_series(FINGERPRINT_BOUND)
}

fn neighbors(alg: &QuaternionAlgebra, order: &Lattice, i: &Lattice, ni: &BigRational, ell: u64) -> Vec<Lattice> {
    let l = ell as i64;
    let lq = BigRational::from_integer(BigInt::from(ell));
    let ell_i = i.scale(&lq);
    let target = ni * &lq;
    let mut found: Vec<Lattice> = Vec::new();
    for code in 1..l.pow(4) {
        let c = [code % l, (code / l) % l, (code / l / l) % l, code / l / l / l];
        let x = i.element(&c);
        if !(alg.nrd(&x) / &target).is_integer() {
            continue;
        }
        if found.iter().any(|j| j.contains(&x)) {
            continue;
        }
        let j = alg.left_mul(&x, order).sum(&ell_i);
        debug_assert_eq!(alg.lattice_nrd(&j), target);
        found.push(j);
        if found.len() as u64 == ell + 1 {
            break;
        }
    }
    found
}

struct ClassSearch<'a> {
    alg: &'a QuaternionAlgebra,
    classes: Vec<Lattice>,
    norms: Vec<BigRational>,
    weights: Vec<u64>,
    prints: Vec<Vec<u64>>,
}

impl ClassSearch<'_> {
    fn find(&self, j: &Lattice, nj: &BigRational, print: &[u64]) -> Option<usize> {
        (0..self.classes.len()).find(|&k| {
            self.prints[k] == print
                && !pair_form(self.alg, j, nj, &self.classes[k], &self.norms[k]).short_vectors(1).is_empty()
        })
    }

    fn push(&mut self, i: Lattice, n: BigRational, print: Vec<u64>) -> u64 {
        let w = unit_weight(self.alg, &self.alg.left_order(&i));
        self.classes.push(i);
        self.norms.push(n);
        self.weights.push(w);
        self.prints.push(print);
        w
    }
}

/// The Brandt module of the Eichler order of level N⁺ in the definite algebra of
/// discriminant N⁻, with norm counts precomputed to max(Sturm bound, 20).
pub fn ideal_class_module(n_plus: u64, n_minus: u64) -> Result<BrandtModule> {
    if n_plus == 0 || !is_squarefree(n_plus * n_minus) || n_plus.gcd(&n_minus) != 1 {
        return Err(Error::InvalidInput(format!("N⁺={n_plus}, N⁻={n_minus}: N⁺N⁻ must be squarefree")));
    }
    module_for_algebra(QuaternionAlgebra::with_discriminant(n_minus)?, n_plus)
}

/// As [`ideal_class_module`], for a given presentation of the algebra.
pub fn module_for_algebra(alg: QuaternionAlgebra, n_plus: u64) -> Result<BrandtModule> {
    let n_minus = alg.discriminant;
    if !alg.is_definite() || !is_squarefree(n_plus * n_minus) || n_plus.gcd(&n_minus) != 1 {
        return Err(Error::InvalidInput(format!("N⁺={n_plus} is incompatible with the algebra ({}, {})", alg.a, alg.b)));
    }
    let maximal = alg.maximal_order();
    let order = alg.eichler_order(&maximal, n_plus)?;
    let n = n_plus * n_minus;
    let ell = (2..).find(|&p| crate::arith::is_prime(p) && !n.is_multiple_of(p)).unwrap();
    let target = eichler_mass(n_plus, n_minus);

    let mut search = ClassSearch { alg: &alg, classes: vec![], norms: vec![], weights: vec![], prints: vec![] };
    let one = BigRational::one();
    let print = fingerprint(&alg, &order, &one);
    let w0 = search.push(order.clone(), one, print);
    let mut mass = BigRational::new(BigInt::one(), BigInt::from(w0));
    let mut next = 0;
    while mass < target {
        if next == search.classes.len() {
            return Err(Error::ClassSetIncomplete(format!("mass {mass} of {target} after exhausting the {ell}-neighbour graph")));
        }
        let (i, ni) = (search.classes[next].clone(), search.norms[next].clone());
        next += 1;
        for j in neighbors(&alg, &order, &i, &ni, ell) {
            let nj = alg.lattice_nrd(&j);
            let print = fingerprint(&alg, &j, &nj);
            if search.find(&j, &nj, &print).is_none() {
                let w = search.push(j, nj, print);
                mass += BigRational::new(BigInt::one(), BigInt::from(w));
                if mass >= target {
                    break;
                }
            }
        }
    }
    assert!(mass == target, "class set overshoots the mass formula: {mass} > {target}");
    debug!("({n_plus},{n_minus}): {} classes, weights {:?}", search.classes.len(), search.weights);

    let mut m = BrandtModule {
        n_plus,
        n_minus,
        algebra: alg.clone(),
        maximal_order: maximal,
        order: order.clone(),
        classes: search.classes,
        norms: search.norms,
        weights: search.weights,
        neighbor_prime: ell,
        fingerprints: search.prints,
        theta_bound: 0,
        pair_theta: vec![],
    };
    m.ensure_theta_bound(sturm_bound(n).bound.max(PACKET_MIN_BOUND));
    Ok(m)
}

/// The eigenvector g_f of a rational newform on the Brandt module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiniteEigenvector {
    pub packet: String,
    pub vector: Vec<BigInt>,
    pub weights: Vec<u64>,
    /// Verified B(ℓ)g = a_ℓ g.
    pub certificate: BTreeMap<u64, i64>,
}

impl DefiniteEigenvector {
    /// ⟨g, g⟩ = Σ w_i g_i².
    pub fn self_pairing(&self) -> BigInt {
        self.vector.iter().zip(&self.weights).map(|(g, &w)| g * g * BigInt::from(w)).sum()
    }
}

/// Eigenvalues of `f` at primes ℓ ∤ N within the module's precomputed range.
fn away_eigenvalues(m: &BrandtModule, f: &EigenformPacket) -> Vec<(u64, i64)> {
    f.ap.iter()
        .filter(|(&l, _)| !m.level().is_multiple_of(l) && l <= m.theta_bound)
        .map(|(&l, &a)| (l, a))
        .collect()
}

fn shifted(m: &BrandtModule, l: u64, a: i64) -> IntMatrix {
    let h = m.class_number();
    &m.brandt_matrix(l) - &IntMatrix::identity(h).scale(&BigInt::from(a))
}

pub fn definite_eigenvector(m: &BrandtModule, f: &EigenformPacket) -> Result<DefiniteEigenvector> {
    let h = m.class_number();
    let evs = away_eigenvalues(m, f);
    let stacked = evs
        .iter()
        .fold(IntMatrix::zeros(0, h), |acc, &(l, a)| acc.vstack(&shifted(m, l, a)));
    let ker = kernel_saturated(&stacked);
    match ker.cols() {
        0 => Err(Error::JlTransferFailed),
        1 => {
            let mut g = ker.col(0);
            let lead = g.iter().find(|x| !x.is_zero()).unwrap();
            if lead.is_negative() {
                g = g.into_iter().map(|x| -x).collect();
            }
            let sum: BigInt = g.iter().sum();
            if !sum.is_zero() {
                // only the Eisenstein line can carry a nonzero degree
                return Err(Error::JlTransferFailed);
            }
            Ok(DefiniteEigenvector {
                packet: f.label.clone(),
                vector: g,
                weights: m.weights.clone(),
                certificate: evs.into_iter().collect(),
            })
        }
        d => Err(Error::InvalidInput(format!("eigenspace of {} has dimension {d}", f.label))),
    }
}

/// ord_p ⟨g_f, g_f⟩.
pub fn xi_exponent(g: &DefiniteEigenvector, p: u64) -> u32 {
    match padic_valuation(&BigRational::from_integer(g.self_pairing()), p) {
        Valuation::Finite(v) => v as u32,
        Valuation::Infinite => unreachable!("pairing is positive definite"),
    }
}

/// Whether ⟨e_i, g⟩ = w_i g_i is a p-unit for some class i.
pub fn unit_pairing_check(m: &BrandtModule, g: &DefiniteEigenvector, p: u64) -> bool {
    let pb = BigInt::from(p);
    g.vector
        .iter()
        .zip(&m.weights)
        .any(|(x, &w)| !(x * BigInt::from(w)).is_multiple_of(&pb))
}

/// Generators of the eigen-ideal of f acting on M: B(ℓ) − a_ℓ for ℓ ∤ N and
/// B(q) − a_q for q | N (B(q) acts on g_f through the U_q-eigenvalue).
pub fn eigen_ideal_generators(m: &BrandtModule, f: &EigenformPacket) -> Vec<IntMatrix> {
    let mut ops: Vec<IntMatrix> = away_eigenvalues(m, f).into_iter().map(|(l, a)| shifted(m, l, a)).collect();
    for q in prime_divisors(m.level()) {
        if let Some(a) = f.aq.get(&q) {
            ops.push(shifted(m, q, *a));
        }
    }
    ops
}

/// dim_{F_p} M/(p, m_f)M == 1.
pub fn freeness_check(m: &BrandtModule, f: &EigenformPacket, p: u64) -> bool {
    let h = m.class_number();
    let images = eigen_ideal_generators(m, f)
        .iter()
        .fold(IntMatrix::zeros(h, 0), |acc, t| acc.hstack(t));
    h - images.rank_mod_p(p) == 1
}

/// Integer-valued entries of a matrix, for reporting.
pub fn matrix_to_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_i64().unwrap()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::{build_space, newform_packets};

    fn packet(n: u64, n2: u64, a2: i64) -> EigenformPacket {
        let s = build_space(n).unwrap();
        newform_packets(&s, n2).unwrap().packets.into_iter().find(|p| p.ap.get(&2).is_none_or(|&a| a == a2)).unwrap()
    }

    #[test]
    fn small_class_sets() {
        let m2 = ideal_class_module(1, 2).unwrap();
        assert_eq!(m2.weights, vec![12]);
        let m3 = ideal_class_module(1, 3).unwrap();
        assert_eq!(m3.class_number(), 1);
        assert_eq!(m3.mass(), BigRational::new(1.into(), 6.into()));
        let m11 = ideal_class_module(1, 11).unwrap();
        let mut w = m11.weights.clone();
        w.sort();
        assert_eq!(w, vec![2, 3]);
        assert_eq!(m11.mass(), BigRational::new(5.into(), 6.into()));
    }

    #[test]
    fn brandt_11() {
        let m = ideal_class_module(1, 11).unwrap();
        assert_eq!(m.brandt_matrix(1), IntMatrix::identity(2));
        let b2 = m.brandt_matrix(2);
        for j in 0..2 {
            assert_eq!(b2.get(0, j) + b2.get(1, j), BigInt::from(3));
        }
        assert_eq!(b2.trace(), BigInt::from(1));
        assert_eq!(b2.det(), BigInt::from(-6));
        let f = packet(11, 11, -2);
        let g = definite_eigenvector(&m, &f).unwrap();
        assert_eq!(g.vector, vec![BigInt::from(1), BigInt::from(-1)]);
        assert_eq!(g.self_pairing(), BigInt::from(5));
        assert_eq!(xi_exponent(&g, 5), 1);
        assert_eq!(xi_exponent(&g, 7), 0);
        assert!(unit_pairing_check(&m, &g, 7));
        assert!(unit_pairing_check(&m, &g, 3));
        assert!(freeness_check(&m, &f, 7));
        let f37 = packet(37, 37, 0);
        assert!(matches!(definite_eigenvector(&m, &f37), Err(Error::JlTransferFailed)));
    }

    #[test]
    fn level_operators_act_by_aq() {
        for (np, nm) in [(1u64, 11u64), (1, 37), (3, 11), (2, 11), (1, 43), (5, 7), (1, 30), (1, 42)] {
            let m = ideal_class_module(np, nm).unwrap();
            let s = build_space(np * nm).unwrap();
            for f in newform_packets(&s, np * nm).unwrap().packets {
                let g = definite_eigenvector(&m, &f).unwrap();
                for q in prime_divisors(np * nm) {
                    let bg = m.brandt_matrix(q).mul_vec(&g.vector);
                    let a = BigInt::from(f.aq[&q]);
                    assert!(bg.iter().zip(&g.vector).all(|(x, y)| *x == &a * y), "({np},{nm}) {} q={q}", f.label);
                }
            }
        }
    }

    #[test]
    fn mass_formula_and_hecke_laws() {
        for (np, nm) in [(1u64, 2u64), (1, 5), (1, 7), (1, 13), (3, 2), (5, 2), (7, 3), (1, 30), (2, 23), (11, 5), (1, 97), (19, 5)] {
            let m = ideal_class_module(np, nm).unwrap();
            assert_eq!(m.mass(), eichler_mass(np, nm));
            let w = m.pairing_matrix();
            let ells: Vec<u64> = primes_up_to(13).into_iter().filter(|l| (np * nm) % l != 0).collect();
            let bs: Vec<IntMatrix> = ells.iter().map(|&l| m.brandt_matrix(l)).collect();
            for (b, &l) in bs.iter().zip(&ells) {
                for j in 0..m.class_number() {
                    let col: BigInt = (0..m.class_number()).map(|i| b.get(i, j).clone()).sum();
                    assert_eq!(col, BigInt::from(l + 1));
                }
                assert_eq!(&b.transpose() * &w, &w * b);
            }
            for a in &bs {
                for b in &bs {
                    assert_eq!(a * b, b * a);
                }
            }
            // B(ℓ)² = B(ℓ²) + ℓ·B(1)
            let l = ells[0];
            let h = m.class_number();
            assert_eq!(&bs[0] * &bs[0], &m.brandt_matrix(l * l) + &IntMatrix::identity(h).scale(&BigInt::from(l)));
        }
    }

    #[test]
    fn presentation_invariance() {
        // two presentations of the discriminant-11 algebra
        let f = packet(11, 11, -2);
        let mut xis = Vec::new();
        for (a, b) in [(-1i64, -11i64), (-11, -3)] {
            let alg = QuaternionAlgebra::new(a, b);
            assert!(alg.certify(11));
            let m = module_for_algebra(alg, 1).unwrap();
            let g = definite_eigenvector(&m, &f).unwrap();
            xis.push((g.self_pairing(), xi_exponent(&g, 5)));
        }
        assert_eq!(xis[0], xis[1]);
        assert_eq!(xis[0].0, BigInt::from(5));
    }
}

