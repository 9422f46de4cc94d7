//! Weight-2 modular symbols for Γ₀(N), N squarefree.
//!
//! Manin symbols (c:d) ∈ P¹(Z/N) modulo the two- and three-term relations and,
//! in the plus quotient, the star involution (c:d) ↦ (−c:d). The plus cuspidal
//! quotient has dimension equal to the genus, and the Hecke algebra acts on it
//! faithfully, so all Hecke-algebra work happens there. Operators are given as
//! integer matrices on the lattice spanned by the images of integral symbols.

use crate::arith::{factor, gcd_i64, is_squarefree, prime_divisors, primes_up_to};
use crate::error::{Error, Result};
use crate::linalg::{
    integer_roots, kernel_saturated, primitive_vector, row_span_basis, IntMatrix, QMatrix,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Mutex;

/// Projective line over Z/N with a lookup table for normalization.
#[derive(Clone, Debug)]
pub struct P1List {
    n: i64,
    reps: Vec<(i64, i64)>,
    table: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl P1List {
    pub fn new(n: u64) -> Self {
        let n = n as i64;
        let mut table = vec![NONE; (n * n) as usize];
        let units: Vec<i64> = (0..n).filter(|&u| gcd_i64(u, n) == 1).collect();
        let units = if n == 1 { vec![0] } else { units };
        let mut reps = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if table[(c * n + d) as usize] != NONE || gcd_i64(gcd_i64(c, d), n) != 1 {
                    continue;
                }
                let idx = reps.len() as u32;
                reps.push((c, d));
                for &u in &units {
                    let (uc, ud) = ((u * c) % n, (u * d) % n);
                    table[(uc * n + ud) as usize] = idx;
                }
            }
        }
        P1List { n, reps, table }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (i64, i64) {
        self.reps[i]
    }

    /// Index of (c:d), or `None` when gcd(c, d, N) ≠ 1.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let (c, d) = (c.rem_euclid(self.n), d.rem_euclid(self.n));
        let v = self.table[(c * self.n + d) as usize];
        (v != NONE).then_some(v as usize)
    }
}

/// Sign of the quotient: the plus quotient by the star involution, or the full space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Full,
}

/// Presentation of the symbol quotient: every Manin symbol written in terms of free generators.
#[derive(Clone, Debug)]
struct Presentation {
    /// Sparse coordinates of each symbol in the free-generator basis.
    coords: Vec<Vec<(usize, BigRational)>>,
    /// Symbol index of each free generator.
    gens: Vec<usize>,
}

fn present(p1: &P1List, sign: Sign) -> Presentation {
    let n = p1.len();
    let s_map = |i: usize| {
        let (c, d) = p1.rep(i);
        p1.index(-d, c).unwrap()
    };
    let star = |i: usize| {
        let (c, d) = p1.rep(i);
        p1.index(-c, d).unwrap()
    };
    let tau = |i: usize| {
        let (c, d) = p1.rep(i);
        p1.index(c + d, -c).unwrap()
    };

    // orbits under x = −S(x) (and x = x* in the plus quotient)
    let mut orbit_of: Vec<Option<(usize, i32)>> = vec![None; n];
    let mut zero = vec![false; n];
    let mut nreps = 0;
    let mut rep_symbol = Vec::new();
    for start in 0..n {
        if orbit_of[start].is_some() {
            continue;
        }
        let id = nreps;
        nreps += 1;
        rep_symbol.push(start);
        let mut members = vec![start];
        let mut conflict = false;
        orbit_of[start] = Some((id, 1));
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let sx = orbit_of[x].unwrap().1;
            let mut edges = vec![(s_map(x), -sx)];
            if sign == Sign::Plus {
                edges.push((star(x), sx));
            }
            for (y, sy) in edges {
                match orbit_of[y] {
                    None => {
                        orbit_of[y] = Some((id, sy));
                        members.push(y);
                        queue.push_back(y);
                    }
                    Some((_, s)) if s != sy => conflict = true,
                    _ => {}
                }
            }
        }
        if conflict {
            for m in members {
                zero[m] = true;
            }
        }
    }
    // live orbit variables
    let mut var_of_orbit = vec![None; nreps];
    let mut nvars = 0;
    for (o, &s) in rep_symbol.iter().enumerate() {
        if !zero[s] {
            var_of_orbit[o] = Some(nvars);
            nvars += 1;
        }
    }
    let var_rep: Vec<usize> = rep_symbol.iter().copied().filter(|&s| !zero[s]).collect();
    let sym_var = |i: usize| -> Option<(usize, i32)> {
        if zero[i] {
            return None;
        }
        let (o, s) = orbit_of[i].unwrap();
        var_of_orbit[o].map(|v| (v, s))
    };

    // three-term relations
    let mut seen = vec![false; n];
    let mut rels: Vec<Vec<BigRational>> = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let cyc = [x, tau(x), tau(tau(x))];
        for &y in &cyc {
            seen[y] = true;
        }
        let mut row = vec![BigRational::zero(); nvars];
        let mut nz = false;
        for &y in &cyc {
            if let Some((v, s)) = sym_var(y) {
                row[v] += BigRational::from_integer(BigInt::from(s));
                nz = true;
            }
        }
        if nz && row.iter().any(|x| !x.is_zero()) {
            rels.push(row);
        }
    }
    let (r, pivots) = QMatrix::from_rows(rels, nvars).rref();
    let free: Vec<usize> = (0..nvars).filter(|v| !pivots.contains(v)).collect();
    let free_pos: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut var_coords: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); nvars];
    for &v in &free {
        var_coords[v] = vec![(free_pos[&v], BigRational::one())];
    }
    for (k, &pv) in pivots.iter().enumerate() {
        var_coords[pv] = free
            .iter()
            .filter(|&&f| !r.get(k, f).is_zero())
            .map(|&f| (free_pos[&f], -r.get(k, f).clone()))
            .collect();
    }
    let coords = (0..n)
        .map(|i| match sym_var(i) {
            None => Vec::new(),
            Some((v, s)) => var_coords[v]
                .iter()
                .map(|(k, c)| (*k, if s == 1 { c.clone() } else { -c.clone() }))
                .collect(),
        })
        .collect();
    Presentation { coords, gens: free.iter().map(|&v| var_rep[v]).collect() }
}

/// Heilbronn matrices of determinant p (Cremona's list), as [a, b, c, d].
pub fn heilbronn_cremona(p: u64) -> Vec<[i64; 4]> {
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let p = p as i64;
    let mut out = vec![[1, 0, 0, p]];
    for r in -(p / 2)..=(p / 2) {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = (a as f64 / b as f64).round() as i64;
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// Sturm bound for weight 2 on Γ₀(N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmBound {
    pub level: u64,
    pub weight: u32,
    pub bound: u64,
}

pub fn sturm_bound(n: u64) -> SturmBound {
    // index of Γ₀(N) is N·∏(1 + 1/q)
    let mut index = n;
    for (q, _) in factor(n) {
        index = index / q * (q + 1);
    }
    SturmBound { level: n, weight: 2, bound: index.div_ceil(6).max(1) }
}

/// Cusp classes of Γ₀(N) for squarefree N are indexed by the divisors of N.
fn cusp_divisors(n: u64) -> Vec<u64> {
    crate::arith::divisors(n)
}

/// The plus cuspidal modular-symbol space of level N.
#[derive(Debug)]
pub struct ModSymSpace {
    level: u64,
    p1: P1List,
    pres: Presentation,
    /// Cuspidal lattice basis as columns in free-generator coordinates.
    cusp_basis: QMatrix,
    /// Number of cusps.
    ncusps: usize,
    prime_cache: Mutex<HashMap<u64, IntMatrix>>,
}

impl ModSymSpace {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Dimension of the plus cuspidal subspace (the genus of X₀(N)).
    pub fn dimension(&self) -> usize {
        self.cusp_basis.cols()
    }

    pub fn genus(&self) -> usize {
        self.dimension()
    }

    pub fn num_cusps(&self) -> usize {
        self.ncusps
    }

    /// Dimension of the plus quotient including the boundary part.
    pub fn plus_dimension(&self) -> usize {
        self.pres.gens.len()
    }

    pub fn manin_symbols(&self) -> Vec<(i64, i64)> {
        (0..self.p1.len()).map(|i| self.p1.rep(i)).collect()
    }

    /// Coordinates (free-generator basis) of the image of the symbol (c:d).
    fn symbol_vector(&self, c: i64, d: i64, out: &mut [BigRational]) {
        if let Some(i) = self.p1.index(c, d) {
            for (k, v) in &self.pres.coords[i] {
                out[*k] += v;
            }
        }
    }

    /// Hecke operator T_p (or U_p for p | N) on the free generators.
    fn prime_on_generators(&self, p: u64) -> QMatrix {
        let g = self.pres.gens.len();
        let hs = heilbronn_cremona(p);
        let mut cols = Vec::with_capacity(g);
        for &s in &self.pres.gens {
            let (c, d) = self.p1.rep(s);
            let mut v = vec![BigRational::zero(); g];
            for h in &hs {
                self.symbol_vector(c * h[0] + d * h[2], c * h[1] + d * h[3], &mut v);
            }
            cols.push(v);
        }
        QMatrix::from_columns(&cols, g)
    }

    fn prime_operator(&self, p: u64) -> IntMatrix {
        if let Some(m) = self.prime_cache.lock().unwrap().get(&p) {
            return m.clone();
        }
        let t = self.prime_on_generators(p);
        let image = &t * &self.cusp_basis;
        let x = self.cusp_basis.solve(&image).expect("cuspidal subspace is Hecke stable");
        let m = x.to_integer().expect("Hecke operator preserves the integral lattice");
        self.prime_cache.lock().unwrap().insert(p, m.clone());
        m
    }

    /// Matrix of T_n on the cuspidal lattice; for p | N the p-part is U_p^k.
    pub fn hecke_operator(&self, n: u64) -> IntMatrix {
        assert!(n >= 1);
        let mut acc = IntMatrix::identity(self.dimension());
        for (p, e) in factor(n) {
            let tp = self.prime_operator(p);
            let pk = if self.level.is_multiple_of(p) {
                tp.pow(e)
            } else {
                // T_{p^{k+1}} = T_p T_{p^k} − p T_{p^{k−1}}
                let mut prev = IntMatrix::identity(self.dimension());
                let mut cur = tp.clone();
                for _ in 1..e {
                    let next = &(&tp * &cur) - &prev.scale(&BigInt::from(p));
                    prev = cur;
                    cur = next;
                }
                cur
            };
            acc = &acc * &pk;
        }
        acc
    }

    /// Sublattice of forms new at every prime dividing `n2`, as columns in
    /// cuspidal-lattice coordinates.
    ///
    /// On the q-old part U_q satisfies x² − a_q x + q with |a_q| < 2√q, so its
    /// eigenvalues are never ±1; the q-new part is therefore ker(U_q² − 1).
    pub fn new_subspace(&self, n2: u64) -> Result<IntMatrix> {
        if !self.level.is_multiple_of(n2) {
            return Err(Error::InvalidInput(format!("{n2} does not divide the level {}", self.level)));
        }
        let d = self.dimension();
        let mut stacked = IntMatrix::zeros(0, d);
        for q in prime_divisors(n2) {
            let u = self.prime_operator(q);
            stacked = stacked.vstack(&(&(&u * &u) - &IntMatrix::identity(d)));
        }
        if stacked.rows() == 0 {
            return Ok(IntMatrix::identity(d));
        }
        Ok(kernel_saturated(&stacked))
    }
}

/// Build the plus cuspidal modular-symbol space of squarefree level N.
pub fn build_space(n: u64) -> Result<ModSymSpace> {
    if n == 0 || !is_squarefree(n) {
        return Err(Error::InvalidInput(format!("level {n} is not squarefree")));
    }
    let p1 = P1List::new(n);
    let pres = present(&p1, Sign::Plus);
    let g = pres.gens.len();
    let cusps = cusp_divisors(n);
    let cusp_index: HashMap<u64, usize> = cusps.iter().enumerate().map(|(i, &d)| (d, i)).collect();

    // integral lattice: Z-span of the images of all symbols
    let den = pres
        .coords
        .iter()
        .flat_map(|c| c.iter().map(|(_, v)| v.denom().clone()))
        .fold(BigInt::one(), |a, b| a.lcm(&b));
    let scaled: Vec<Vec<BigInt>> = pres
        .coords
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let mut v = vec![BigInt::zero(); g];
            for (k, x) in c {
                v[*k] = (x * BigRational::from_integer(den.clone())).to_integer();
            }
            v
        })
        .collect();
    let lattice = row_span_basis(&scaled, g);
    assert_eq!(lattice.len(), g);
    let lattice_q: Vec<Vec<BigRational>> = lattice
        .iter()
        .map(|r| r.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect())
        .collect();
    let lattice_cols = QMatrix::from_columns(&lattice_q, g);

    // boundary of each free generator, then of each lattice vector
    let gcd_n = |x: i64| gcd_i64(x, n as i64) as u64;
    let mut gen_boundary = QMatrix::zeros(cusps.len(), g);
    for (k, &s) in pres.gens.iter().enumerate() {
        let (c, d) = p1.rep(s);
        let a = cusp_index[&gcd_n(c)];
        let b = cusp_index[&gcd_n(d)];
        let va = gen_boundary.get(a, k) + BigRational::one();
        gen_boundary.set(a, k, va);
        let vb = gen_boundary.get(b, k) - BigRational::one();
        gen_boundary.set(b, k, vb);
    }
    let boundary = (&gen_boundary * &lattice_cols).to_integer().expect("boundary of integral symbols is integral");
    let cusp_in_lattice = kernel_saturated(&boundary);
    let cusp_basis = &lattice_cols * &cusp_in_lattice.to_rational();
    Ok(ModSymSpace { level: n, p1, pres, cusp_basis, ncusps: cusps.len(), prime_cache: Mutex::new(HashMap::new()) })
}

/// Dimensions (full space, cuspidal subspace) of the unsigned symbol space.
pub fn unsigned_dimensions(n: u64) -> Result<(usize, usize)> {
    if n == 0 || !is_squarefree(n) {
        return Err(Error::InvalidInput(format!("level {n} is not squarefree")));
    }
    let p1 = P1List::new(n);
    let pres = present(&p1, Sign::Full);
    let g = pres.gens.len();
    let cusps = cusp_divisors(n);
    let idx: HashMap<u64, usize> = cusps.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut bd = QMatrix::zeros(cusps.len(), g);
    for (k, &s) in pres.gens.iter().enumerate() {
        let (c, d) = p1.rep(s);
        let a = idx[&(gcd_i64(c, n as i64) as u64)];
        let b = idx[&(gcd_i64(d, n as i64) as u64)];
        let va = bd.get(a, k) + BigRational::one();
        bd.set(a, k, va);
        let vb = bd.get(b, k) - BigRational::one();
        bd.set(b, k, vb);
    }
    Ok((g, g - bd.rank()))
}

/// A rational newform: Hecke eigenvalues with the level factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenformPacket {
    pub label: String,
    pub level: u64,
    /// Newness level: the packet is new at every prime dividing it.
    pub new_at: u64,
    /// a_ℓ for primes ℓ ∤ N.
    pub ap: BTreeMap<u64, i64>,
    /// U_q eigenvalues for q | N.
    pub aq: BTreeMap<u64, i64>,
    pub degree: usize,
    /// Primitive eigenvector in the cuspidal lattice of the level-N plus space.
    pub vector: Vec<BigInt>,
}

impl EigenformPacket {
    /// Eigenvalue of T_ℓ (ℓ ∤ N) or U_ℓ (ℓ | N).
    pub fn eigenvalue(&self, ell: u64) -> Option<i64> {
        self.ap.get(&ell).or_else(|| self.aq.get(&ell)).copied()
    }

    /// Compute further eigenvalues from the stored eigenvector.
    pub fn extend(&mut self, space: &ModSymSpace, bound: u64) {
        assert_eq!(space.level(), self.level);
        for ell in primes_up_to(bound) {
            if self.eigenvalue(ell).is_some() {
                continue;
            }
            let a = eigenvalue_on(&space.hecke_operator(ell), &self.vector);
            if self.level.is_multiple_of(ell) {
                self.aq.insert(ell, a);
            } else {
                self.ap.insert(ell, a);
            }
        }
    }

    /// Eigenvalues as a single prime-indexed map.
    pub fn all_eigenvalues(&self) -> BTreeMap<u64, i64> {
        let mut m = self.ap.clone();
        m.extend(self.aq.iter());
        m
    }
}

fn eigenvalue_on(t: &IntMatrix, v: &[BigInt]) -> i64 {
    let tv = t.mul_vec(v);
    let i = v.iter().position(|x| !x.is_zero()).expect("nonzero eigenvector");
    let (q, r) = tv[i].div_rem(&v[i]);
    assert!(r.is_zero(), "vector is not an eigenvector");
    debug_assert!(tv.iter().zip(v).all(|(a, b)| *a == &q * b));
    q.to_i64().unwrap()
}

/// An eigenclass not processed as a packet, with the evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedClass {
    pub reason: String,
    pub dimension: usize,
    /// Operator whose restriction has no rational eigenvalue, e.g. "T3" or "U2".
    pub operator: String,
    /// Characteristic polynomial of that restriction, coefficients low to high.
    pub charpoly: Vec<BigInt>,
    /// Rational eigenvalues shared by the whole class before it was set aside.
    pub known: BTreeMap<u64, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketDecomposition {
    pub packets: Vec<EigenformPacket>,
    pub skipped: Vec<SkippedClass>,
}

/// Smallest bound to which packet eigenvalues are always listed.
pub const PACKET_MIN_BOUND: u64 = 20;

/// Operators in splitting order: T_ℓ for ℓ ∤ N first, then U_q for q | N.
fn splitting_primes(n: u64, bound: u64) -> Vec<u64> {
    let ps = primes_up_to(bound);
    let mut out: Vec<u64> = ps.iter().copied().filter(|p| !n.is_multiple_of(*p)).collect();
    out.extend(prime_divisors(n));
    out
}

fn op_name(n: u64, p: u64) -> String {
    if n.is_multiple_of(p) {
        format!("U{p}")
    } else {
        format!("T{p}")
    }
}

/// Rational eigenforms new at every prime dividing `n2`.
pub fn newform_packets(space: &ModSymSpace, n2: u64) -> Result<PacketDecomposition> {
    let n = space.level();
    let new = space.new_subspace(n2)?;
    let bound = sturm_bound(n).bound;
    let ops = splitting_primes(n, bound);
    let mut packets = Vec::new();
    let mut skipped = Vec::new();
    let mut work: Vec<(QMatrix, BTreeMap<u64, i64>)> = Vec::new();
    if new.cols() > 0 {
        work.push((new.to_rational(), BTreeMap::new()));
    }
    for &p in &ops {
        let t = space.hecke_operator(p).to_rational();
        let weil = if n.is_multiple_of(p) { 1 } else { (2.0 * (p as f64).sqrt()).floor() as i64 };
        let mut next = Vec::new();
        for (w, known) in work {
            let restricted = w.solve(&(&t * &w)).expect("subspace is Hecke stable");
            let cp = restricted.charpoly();
            let (roots, rest) = integer_roots(&cp, weil);
            for (a, _) in roots {
                let shifted = &restricted - &QMatrix::identity(w.cols()).scale(&BigRational::from_integer(BigInt::from(a)));
                let sub = &w * &shifted.nullspace();
                let mut k = known.clone();
                k.insert(p, a);
                next.push((sub, k));
            }
            if rest.len() > 1 {
                skipped.push(SkippedClass {
                    reason: "skipped: coefficient degree > scope".into(),
                    dimension: rest.len() - 1,
                    operator: op_name(n, p),
                    charpoly: rest.iter().map(|c| c.to_integer()).collect(),
                    known: known.clone(),
                });
            }
        }
        work = next;
    }
    for (w, known) in work {
        if w.cols() != 1 {
            skipped.push(SkippedClass {
                reason: "skipped: eigenspace of dimension > 1".into(),
                dimension: w.cols(),
                operator: String::new(),
                charpoly: Vec::new(),
                known,
            });
            continue;
        }
        let vector = primitive_vector(&w.col(0));
        let mut ap = BTreeMap::new();
        let mut aq = BTreeMap::new();
        for (p, a) in known {
            if n.is_multiple_of(p) {
                aq.insert(p, a);
            } else {
                ap.insert(p, a);
            }
        }
        let mut pk = EigenformPacket { label: String::new(), level: n, new_at: n2, ap, aq, degree: 1, vector };
        pk.extend(space, bound.max(PACKET_MIN_BOUND));
        packets.push(pk);
    }
    packets.sort_by(|a, b| a.ap.values().cmp(b.ap.values()).then(a.aq.values().cmp(b.aq.values())));
    for (k, p) in packets.iter_mut().enumerate() {
        p.label = format!("{n}#{k}");
    }
    Ok(PacketDecomposition { packets, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;

    /// Genus of X₀(N) for squarefree N from the classical formula.
    fn genus_oracle(n: u64) -> i64 {
        let ps = prime_divisors(n);
        let mu: i64 = ps.iter().fold(n as i64, |acc, &q| acc / q as i64 * (q as i64 + 1));
        let nu2: i64 = if n.is_multiple_of(4) { 0 } else { ps.iter().map(|&q| 1 + kronecker(-4, q as i64) as i64).product() };
        let nu3: i64 = if n.is_multiple_of(9) { 0 } else { ps.iter().map(|&q| 1 + kronecker(-3, q as i64) as i64).product() };
        let cusps = 1i64 << ps.len();
        // 12g = 12 + μ − 3ν₂ − 4ν₃ − 6c
        (12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps) / 12
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(build_space(1).unwrap().dimension(), 0);
        assert_eq!(build_space(11).unwrap().dimension(), 1);
        assert_eq!(build_space(37).unwrap().dimension(), 2);
        assert_eq!(unsigned_dimensions(11).unwrap(), (3, 2));
        assert_eq!(unsigned_dimensions(37).unwrap(), (5, 4));
        assert!(build_space(12).is_err());
    }

    #[test]
    fn genus_matches_formula_up_to_100() {
        for n in 1..=100u64 {
            if !is_squarefree(n) {
                continue;
            }
            let g = genus_oracle(n);
            let (full, cusp) = unsigned_dimensions(n).unwrap();
            assert_eq!(cusp as i64, 2 * g, "level {n}");
            assert_eq!(full as i64, 2 * g + (1 << prime_divisors(n).len()) - 1, "level {n}");
            assert_eq!(build_space(n).unwrap().dimension() as i64, g, "plus level {n}");
        }
    }

    #[test]
    fn level_11_operators() {
        let s = build_space(11).unwrap();
        assert_eq!(s.hecke_operator(1), IntMatrix::identity(1));
        assert_eq!(s.hecke_operator(2), IntMatrix::from_i64_rows(&[vec![-2]]));
        assert_eq!(s.hecke_operator(11), IntMatrix::from_i64_rows(&[vec![1]]));
        assert_eq!(s.hecke_operator(4), IntMatrix::from_i64_rows(&[vec![2]]));
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_bound(11).bound, 2);
        assert_eq!(sturm_bound(1).bound, 1);
        assert_eq!(sturm_bound(37).bound, 7);
    }

    #[test]
    fn packets_level_11_22_37() {
        let s11 = build_space(11).unwrap();
        let d = newform_packets(&s11, 11).unwrap();
        assert_eq!(d.packets.len(), 1);
        let f = &d.packets[0];
        assert_eq!([f.ap[&2], f.ap[&3], f.ap[&5], f.ap[&7]], [-2, -1, 1, -2]);
        assert_eq!(f.aq[&11], 1);

        let s22 = build_space(22).unwrap();
        assert_eq!(newform_packets(&s22, 22).unwrap().packets.len(), 0);

        let s37 = build_space(37).unwrap();
        let d37 = newform_packets(&s37, 37).unwrap();
        let mut a2: Vec<i64> = d37.packets.iter().map(|p| p.ap[&2]).collect();
        a2.sort();
        assert_eq!(a2, vec![-2, 0]);
    }

    #[test]
    fn old_class_matches_level_11() {
        // at level 22 the level-11 form appears twice; U₂ acts irrationally on it
        let s22 = build_space(22).unwrap();
        let d = newform_packets(&s22, 1).unwrap();
        assert!(d.packets.is_empty());
        let old = d.skipped.iter().find(|c| c.operator == "U2").expect("old class");
        assert_eq!(old.dimension, 2);
        assert_eq!(old.known[&3], -1);
        assert_eq!(old.known[&5], 1);
        // x² + 2x + 2
        assert_eq!(old.charpoly, vec![BigInt::from(2), BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn hecke_operators_commute() {
        for n in [35u64, 37, 42, 57, 66] {
            let s = build_space(n).unwrap();
            let ops: Vec<IntMatrix> = (1..=8).map(|k| s.hecke_operator(k)).collect();
            for a in &ops {
                for b in &ops {
                    assert_eq!(a * b, b * a, "level {n}");
                }
            }
        }
    }

    #[test]
    fn weil_bound_on_packets() {
        for n in [11u64, 14, 15, 17, 19, 21, 26, 37, 43, 53, 58, 61, 79, 89, 91] {
            let s = build_space(n).unwrap();
            for f in newform_packets(&s, n).unwrap().packets {
                for (&l, &a) in &f.ap {
                    assert!((a * a) as u64 <= 4 * l, "level {n} a_{l}={a}");
                }
                assert!(f.aq.values().all(|&e| e == 1 || e == -1));
            }
        }
    }
}
