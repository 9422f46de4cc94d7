//! Anticyclotomic theta elements from Gross points on a definite Brandt module.
//!
//! Layer n of the anticyclotomic Z_p-extension has Galois group G_n ≅ Z/pⁿ, the
//! p-part of Pic(O_c) for c = p^{n+1}. Gross points of conductor p^m are built
//! from one optimal embedding ψ: O_K → O_L(J₀) and a non-backtracking path
//! J₀ ⊃ J₁ ⊃ … in the p-neighbour tree; the point attached to a class [𝔞] of
//! Pic(O_{p^m}) is ψ(𝔞)·J_m. Group ring elements of Z[G_n] are stored as
//! coefficient vectors indexed by the exponent of a fixed generator γ, with the
//! generators chosen compatibly along the tower.

use crate::arith::{inv_mod, is_prime, kronecker, val_bigint, Valuation};
use crate::brandt::{BrandtModule, DefiniteEigenvector};
use crate::error::{Error, Result};
use crate::forms::{reduced_forms, BinaryForm};
use crate::invariants::{mod_inverse, unit_root, QuadraticField};
use crate::quaternion::{Lattice, Quat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

// ---------------------------------------------------------------- group rings

/// Natural projection Z[G_n] → Z[G_{n−1}].
pub fn project(x: &[BigInt], p: u64) -> Vec<BigInt> {
    let m = x.len() / p as usize;
    let len = m.max(1);
    let mut out = vec![BigInt::zero(); len];
    for (k, c) in x.iter().enumerate() {
        out[k % len] += c;
    }
    out
}

/// Corestriction Z[G_{n−1}] → Z[G_n]: σ ↦ sum of its p preimages.
pub fn corestriction(x: &[BigInt], p: u64) -> Vec<BigInt> {
    let m = x.len();
    (0..m * p as usize).map(|k| x[k % m].clone()).collect()
}

/// Product in Z[Z/m].
pub fn group_mul(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    let m = x.len();
    assert_eq!(m, y.len());
    let mut out = vec![BigInt::zero(); m];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            out[(i + j) % m] += a * b;
        }
    }
    out
}

/// Φ_{p^k}(γ) = Σ_{j<p} γ^{j p^{k−1}} in Z[G_n], k ≥ 1. Its image in Z[G_k] is the
/// sum over Gal(K_k/K_{k−1}).
pub fn xi_element(p: u64, k: u32, n: u32) -> Vec<BigInt> {
    let size = p.pow(n) as usize;
    let step = p.pow(k - 1) as usize;
    let mut out = vec![BigInt::zero(); size];
    for j in 0..p as usize {
        out[(j * step) % size] += 1;
    }
    out
}

/// ω_n^± = ∏ Φ_{p^k}(γ) over 1 ≤ k ≤ n with k even (+) or odd (−).
pub fn omega_element(p: u64, n: u32, plus: bool) -> Vec<BigInt> {
    let size = p.pow(n) as usize;
    let mut acc = vec![BigInt::zero(); size];
    acc[0] = BigInt::one();
    for k in 1..=n {
        if (k % 2 == 0) == plus {
            acc = group_mul(&acc, &xi_element(p, k, n));
        }
    }
    acc
}

/// ω_n^± as a polynomial in T = γ − 1 (monic, not reduced).
pub fn omega_poly(p: u64, n: u32, plus: bool) -> Vec<BigInt> {
    let mut acc = vec![BigInt::one()];
    for k in 1..=n {
        if (k % 2 == 0) == plus {
            acc = poly_mul(&acc, &cyclotomic_shifted(p, k));
        }
    }
    acc
}

/// Φ_{p^k}(1 + T).
fn cyclotomic_shifted(p: u64, k: u32) -> Vec<BigInt> {
    let step = p.pow(k - 1) as usize;
    let mut x = vec![BigInt::zero(); step * (p as usize - 1) + 1];
    for j in 0..p as usize {
        x[j * step] += 1;
    }
    to_t_poly(&x)
}

fn poly_mul(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Σ c_k γ^k ↦ Σ c_k (1+T)^k, coefficients in T.
pub fn to_t_poly(x: &[BigInt]) -> Vec<BigInt> {
    let n = x.len();
    let mut out = vec![BigInt::zero(); n];
    // row of binomial coefficients C(k, ·)
    let mut row = vec![BigInt::one()];
    for (k, c) in x.iter().enumerate() {
        if k > 0 {
            let mut next = vec![BigInt::one(); k + 1];
            for j in 1..k {
                next[j] = &row[j - 1] + &row[j];
            }
            row = next;
        }
        if c.is_zero() {
            continue;
        }
        for (j, b) in row.iter().enumerate() {
            out[j] += c * b;
        }
    }
    out
}

/// Exact division by a monic polynomial; None if the remainder is nonzero.
pub fn poly_div_exact(x: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    let dl = d.len();
    assert!(dl >= 1 && d[dl - 1].is_one(), "divisor must be monic");
    let mut r = x.to_vec();
    while r.len() > 1 && r.last().unwrap().is_zero() {
        r.pop();
    }
    if r.len() < dl {
        return r.iter().all(|c| c.is_zero()).then(|| vec![BigInt::zero()]);
    }
    let mut q = vec![BigInt::zero(); r.len() - dl + 1];
    for i in (0..q.len()).rev() {
        let c = r[i + dl - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            r[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

fn reduce_mod(x: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    x.iter().map(|c| c.mod_floor(m)).collect()
}

// ---------------------------------------------------------- ring class groups

/// The image of a form of discriminant D·c² in Pic(O_{c/p}).
pub fn extend_form(f: &BinaryForm, d: i64, c: u64, p: u64) -> BinaryForm {
    let pi = p as i64;
    // an equivalent form whose first coefficient is prime to p
    let g = if f.a % pi != 0 {
        *f
    } else if f.c % pi != 0 {
        BinaryForm::new(f.c, -f.b, f.a)
    } else {
        BinaryForm::new(f.a + f.b + f.c, f.b + 2 * f.c, f.c)
    };
    let s = (c / p) as i64;
    let two_a = 2 * g.a;
    let pinv = inv_mod(pi, two_a).expect("p is odd and prime to a");
    let b = ((g.b as i128 * pinv as i128).rem_euclid(two_a as i128)) as i64;
    let disc = d * s * s;
    debug_assert_eq!((b * b - disc) % (4 * g.a), 0);
    BinaryForm::new(g.a, b, (b * b - disc) / (4 * g.a)).reduce()
}

/// Pic(O_{p^m}) with its projection onto the cyclic p-Sylow subgroup.
#[derive(Clone, Debug)]
pub struct RingClassGroup {
    pub disc_k: i64,
    pub p: u64,
    pub exponent: u32,
    pub forms: Vec<BinaryForm>,
    /// Order of the p-Sylow subgroup, p^{m−1} (1 for m = 0).
    pub layer_order: u64,
    pub generator: BinaryForm,
    projector: u64,
    labels: HashMap<BinaryForm, u64>,
}

impl RingClassGroup {
    /// `generator` fixes γ; otherwise the first form whose p-part has full order.
    pub fn new(d: i64, p: u64, m: u32, generator: Option<BinaryForm>) -> Result<Self> {
        let c = p.pow(m) as i64;
        let disc = d * c * c;
        let forms = reduced_forms(disc);
        let h = forms.len() as u64;
        let layer_order = if m == 0 { 1 } else { p.pow(m - 1) };
        if !h.is_multiple_of(layer_order) || (h / layer_order).is_multiple_of(p) {
            return Err(Error::Hypothesis(format!("p-part of Pic(O_{c}) is not Z/{layer_order}; p divides h_K")));
        }
        let r = h / layer_order;
        let projector = if layer_order == 1 {
            0
        } else {
            r * inv_mod((r % layer_order) as i64, layer_order as i64).unwrap() as u64
        };
        let identity = BinaryForm::identity(disc).reduce();
        let generator = match generator {
            Some(g) => g,
            None => forms
                .iter()
                .map(|f| f.pow(projector))
                .find(|g| layer_order == 1 || g.pow(layer_order / p) != identity)
                .ok_or_else(|| Error::Hypothesis("p-Sylow of the ring class group is not cyclic".into()))?,
        };
        let mut labels = HashMap::new();
        let mut x = identity;
        for k in 0..layer_order {
            labels.insert(x, k);
            x = x.compose(&generator);
        }
        if x != identity || labels.len() as u64 != layer_order {
            return Err(Error::Hypothesis("generator does not have order p^(m-1)".into()));
        }
        Ok(RingClassGroup { disc_k: d, p, exponent: m, forms, layer_order, generator, projector, labels })
    }

    pub fn conductor(&self) -> u64 {
        self.p.pow(self.exponent)
    }

    pub fn order(&self) -> u64 {
        self.forms.len() as u64
    }

    /// Image of a class in G_{m−1} = Z/p^{m−1}.
    pub fn label(&self, f: &BinaryForm) -> u64 {
        self.labels[&f.pow(self.projector)]
    }
}

// ---------------------------------------------------------------- Gross points

/// One Gross point of conductor p^m: the class of ψ(𝔞)·J_m and its Galois label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrossPoint {
    pub form: BinaryForm,
    pub label: u64,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrossPointSet {
    pub disc_k: i64,
    pub p: u64,
    /// Conductor p^exponent.
    pub exponent: u32,
    /// |G| for the layer these points label.
    pub layer_order: u64,
    pub points: Vec<GrossPoint>,
}

impl GrossPointSet {
    /// Points per Galois label; equal for every label when the action is free.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.layer_order as usize];
        for pt in &self.points {
            out[pt.label as usize] += 1;
        }
        out
    }
}

/// Embedding data and the p-neighbour path shared by all layers up to `max_layer`.
pub struct AnticyclotomicSetup<'a> {
    pub module: &'a BrandtModule,
    pub field: QuadraticField,
    pub p: u64,
    pub max_layer: u32,
    /// ψ(ω) with ω = (ε + √D)/2.
    pub omega: Quat,
    trace_eps: i64,
    /// J_0 ⊃ J_1 ⊃ …, J_m of conductor p^m.
    pub path: Vec<Lattice>,
    pub groups: Vec<RingClassGroup>,
}

impl<'a> AnticyclotomicSetup<'a> {
    pub fn new(module: &'a BrandtModule, field: &QuadraticField, p: u64, max_layer: u32) -> Result<Self> {
        let d = field.disc;
        let n = module.level();
        if !is_prime(p) || p < 3 {
            return Err(Error::InvalidInput(format!("p = {p} must be an odd prime")));
        }
        if n.is_multiple_of(p) || d % p as i64 == 0 {
            return Err(Error::Hypothesis(format!("p = {p} divides N·D")));
        }
        for q in crate::arith::prime_divisors(module.n_plus) {
            if field.splitting(q) != 1 {
                return Err(Error::Hypothesis(format!("{q} | N⁺ is not split in K")));
            }
        }
        for q in crate::arith::prime_divisors(module.n_minus) {
            if field.splitting(q) != -1 {
                return Err(Error::Hypothesis(format!("{q} | N⁻ is not inert in K")));
            }
        }
        let alg = &module.algebra;
        let trace_eps = d.rem_euclid(2);
        let norm = (trace_eps - d) / 4;
        let (start, omega) = (0..module.class_number())
            .find_map(|i| {
                let order = alg.left_order(&module.classes[i]);
                let form = alg.norm_form(&order, &BigRational::one());
                form.short_vectors(norm as i128)
                    .into_iter()
                    .filter(|(_, v)| *v == norm as i128)
                    .map(|(x, _)| order.element(&x))
                    .find(|x| alg.trd(x) == BigRational::from_integer(trace_eps.into()))
                    .map(|x| (i, x))
            })
            .ok_or_else(|| Error::Hypothesis(format!("O_K does not embed in the order (D = {d})")))?;
        let mut setup = AnticyclotomicSetup {
            module,
            field: field.clone(),
            p,
            max_layer,
            omega,
            trace_eps,
            path: vec![module.classes[start].clone()],
            groups: Vec::new(),
        };
        for m in 1..=max_layer + 1 {
            let cur = setup.path.last().unwrap().clone();
            let next = module
                .neighbors(&cur, p)
                .into_iter()
                .find(|j| setup.conductor_exponent(j, m + 1) == m)
                .ok_or_else(|| Error::InvalidInput("no forward neighbour in the p-tree".into()))?;
            setup.path.push(next);
        }
        // generators chosen at the top and pushed down the tower
        let mut groups = vec![RingClassGroup::new(d, p, max_layer + 1, None)?];
        for m in (0..=max_layer).rev() {
            let above = groups.last().unwrap();
            let g = extend_form(&above.generator, d, above.conductor(), p);
            groups.push(RingClassGroup::new(d, p, m, Some(g))?);
        }
        groups.reverse();
        setup.groups = groups;
        Ok(setup)
    }

    /// Smallest t ≤ cap with ψ(p^t ω) ∈ O_L(J).
    fn conductor_exponent(&self, j: &Lattice, cap: u32) -> u32 {
        let alg = &self.module.algebra;
        let order = alg.left_order(j);
        let mut x = self.omega.clone();
        let pq = BigRational::from_integer(self.p.into());
        for t in 0..cap {
            if order.contains(&x) {
                return t;
            }
            for c in x.iter_mut() {
                *c = &*c * &pq;
            }
        }
        cap
    }

    /// ψ((−b + c√D)/2) for the form (a, b, ·) of discriminant D c².
    fn ideal_element(&self, f: &BinaryForm, c: i64) -> Quat {
        let base = (-f.b - c * self.trace_eps) / 2;
        let mut y = self.omega.clone();
        for t in y.iter_mut() {
            *t = &*t * BigRational::from_integer(c.into());
        }
        y[0] += BigRational::from_integer(base.into());
        y
    }

    /// Gross points of conductor p^m (0 ≤ m ≤ max_layer + 1).
    pub fn points(&self, m: u32) -> Result<GrossPointSet> {
        let group = &self.groups[m as usize];
        let jm = &self.path[m as usize];
        let alg = &self.module.algebra;
        let c = group.conductor() as i64;
        let points = group
            .forms
            .par_iter()
            .map(|f| {
                let y = self.ideal_element(f, c);
                let a = BigRational::from_integer(f.a.into());
                let ideal = jm.scale(&a).sum(&alg.left_mul(&y, jm));
                let class = self
                    .module
                    .locate_class(&ideal)
                    .ok_or_else(|| Error::ClassSetIncomplete(format!("Gross point {f:?} matches no class")))?;
                Ok(GrossPoint { form: *f, label: group.label(f), class })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GrossPointSet { disc_k: self.field.disc, p: self.p, exponent: m, layer_order: group.layer_order, points })
    }
}

/// Gross points for layer n (conductor p^{n+1}).
pub fn gross_points(module: &BrandtModule, field: &QuadraticField, p: u64, n: u32) -> Result<GrossPointSet> {
    AnticyclotomicSetup::new(module, field, p, n)?.points(n + 1)
}

// --------------------------------------------------------------- theta elements

/// θ_n = Σ_σ ⟨P^σ, g⟩ σ in Z[G_n], indexed by the exponent of γ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaElement {
    pub packet: String,
    pub disc_k: i64,
    pub p: u64,
    pub layer: u32,
    pub coefficients: Vec<BigInt>,
}

/// Σ_σ w_{i(σ)} g_{i(σ)} σ over a set of Gross points.
pub fn theta_from_points(pts: &GrossPointSet, g: &DefiniteEigenvector) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); pts.layer_order as usize];
    for pt in &pts.points {
        out[pt.label as usize] += &g.vector[pt.class] * BigInt::from(g.weights[pt.class]);
    }
    out
}

/// θ_n for layer n (conductor p^{n+1}).
pub fn theta_element(setup: &AnticyclotomicSetup, g: &DefiniteEigenvector, n: u32) -> Result<ThetaElement> {
    if n > setup.max_layer {
        return Err(Error::InvalidInput(format!("layer {n} beyond the prepared tower")));
    }
    let pts = setup.points(n + 1)?;
    Ok(ThetaElement {
        packet: g.packet.clone(),
        disc_k: setup.field.disc,
        p: setup.p,
        layer: n,
        coefficients: theta_from_points(&pts, g),
    })
}

/// The tower θ_{−1}, θ_0, …, θ_n, where θ_{−1} ∈ Z sums over conductor-1 points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaTower {
    pub packet: String,
    pub disc_k: i64,
    pub p: u64,
    pub ap: i64,
    pub base: BigInt,
    pub layers: Vec<Vec<BigInt>>,
    /// |ker(Pic O_p → Pic O_K)| = (p − (D/p))/u.
    pub fiber: u64,
}

pub fn theta_tower(setup: &AnticyclotomicSetup, g: &DefiniteEigenvector, ap: i64) -> Result<ThetaTower> {
    let base = theta_from_points(&setup.points(0)?, g)[0].clone();
    let layers = (0..=setup.max_layer)
        .map(|n| Ok(theta_from_points(&setup.points(n + 1)?, g)))
        .collect::<Result<Vec<_>>>()?;
    let eps = kronecker(setup.field.disc, setup.p as i64);
    let fiber = (setup.p as i64 - eps as i64) as u64 / setup.field.unit_half_order;
    Ok(ThetaTower { packet: g.packet.clone(), disc_k: setup.field.disc, p: setup.p, ap, base, layers, fiber })
}

impl ThetaTower {
    pub fn element(&self, n: u32) -> ThetaElement {
        ThetaElement {
            packet: self.packet.clone(),
            disc_k: self.disc_k,
            p: self.p,
            layer: n,
            coefficients: self.layers[n as usize].clone(),
        }
    }

    /// Right side of the tree relation π θ_n = a_p θ_{n−1} − ν θ_{n−2}, n ≥ 1.
    fn relation_rhs(&self, n: u32) -> Vec<BigInt> {
        let ap = BigInt::from(self.ap);
        let prev = &self.layers[n as usize - 1];
        let back = if n == 1 {
            vec![&self.base * BigInt::from(self.fiber)]
        } else {
            corestriction(&self.layers[n as usize - 2], self.p)
        };
        prev.iter().zip(&back).map(|(x, y)| &ap * x - y).collect()
    }

    /// Exact norm relation at layer n ≥ 1. For a_p = 0 and n ≥ 2 this is
    /// π θ_n = −ξ_{n−1} θ_{n−2}.
    pub fn exact_relation(&self, n: u32) -> bool {
        project(&self.layers[n as usize], self.p) == self.relation_rhs(n)
    }

    /// α-regularized 𝓛_n mod p^prec (ordinary p).
    pub fn regularized(&self, n: u32, prec: u32) -> Result<Vec<BigInt>> {
        let modulus = BigInt::from(self.p).pow(prec);
        let alpha = unit_root(self.ap, self.p, prec)?;
        let ainv = mod_inverse(&alpha, &modulus).expect("unit root is a unit");
        let theta = &self.layers[n as usize];
        let tail = if n == 0 {
            vec![&self.base * BigInt::from(self.fiber)]
        } else {
            corestriction(&self.layers[n as usize - 1], self.p)
        };
        let scale = ainv.modpow(&BigInt::from(n), &modulus);
        Ok(theta
            .iter()
            .zip(&tail)
            .map(|(t, s)| ((t - &ainv * s) * &scale).mod_floor(&modulus))
            .collect())
    }

    /// π 𝓛_n ≡ 𝓛_{n−1} mod p^prec.
    pub fn regularized_relation(&self, n: u32, prec: u32) -> Result<bool> {
        let modulus = BigInt::from(self.p).pow(prec);
        let lhs = reduce_mod(&project(&self.regularized(n, prec)?, self.p), &modulus);
        Ok(lhs == self.regularized(n - 1, prec)?)
    }
}

/// Outcome of a norm-compatibility check at one layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormRelation {
    pub layer: u32,
    pub supersingular: bool,
    /// None for the exact supersingular relation.
    pub precision: Option<u32>,
    pub holds: bool,
}

/// Supersingular: π θ_n = −ξ_{n−1} θ_{n−2} exactly (n ≥ 2).
/// Ordinary: π 𝓛_n ≡ 𝓛_{n−1} mod p^prec (n ≥ 1).
pub fn norm_relation_check(tower: &ThetaTower, n: u32, prec: u32) -> Result<NormRelation> {
    if n as usize >= tower.layers.len() {
        return Err(Error::InvalidInput(format!("layer {n} not computed")));
    }
    if tower.ap % tower.p as i64 == 0 {
        if n < 2 {
            return Err(Error::InvalidInput("supersingular relation needs n ≥ 2".into()));
        }
        Ok(NormRelation { layer: n, supersingular: true, precision: None, holds: tower.exact_relation(n) })
    } else {
        if n < 1 {
            return Err(Error::InvalidInput("ordinary relation needs n ≥ 1".into()));
        }
        Ok(NormRelation {
            layer: n,
            supersingular: false,
            precision: Some(prec),
            holds: tower.regularized_relation(n, prec)?,
        })
    }
}

// ---------------------------------------------------------- Iwasawa invariants

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mu {
    Exact(u32),
    /// Every coefficient vanished to the working precision.
    AtLeast(u32),
    /// The exact element is zero.
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantPair {
    pub mu: Mu,
    /// Weierstrass degree at this layer; None when μ is only bounded.
    pub lambda: Option<u32>,
}

/// μ and λ of a polynomial in T with p-adic (or exact, `precision = None`) coefficients.
pub fn mu_lambda(t_coeffs: &[BigInt], p: u64, precision: Option<u32>) -> InvariantPair {
    let ords: Vec<Option<u32>> = t_coeffs
        .iter()
        .map(|c| match val_bigint(c, p) {
            Valuation::Finite(v) => Some(v as u32).filter(|&v| precision.is_none_or(|pr| v < pr)),
            Valuation::Infinite => None,
        })
        .collect();
    match ords.iter().flatten().min() {
        None => InvariantPair { mu: precision.map_or(Mu::Infinite, Mu::AtLeast), lambda: None },
        Some(&mu) => InvariantPair {
            mu: Mu::Exact(mu),
            lambda: ords.iter().position(|o| *o == Some(mu)).map(|j| j as u32),
        },
    }
}

/// Quotient θ / ω_n^{∓} as a T-polynomial; `plus` selects the ± branch whose
/// complementary ω is removed. None if θ is not divisible.
pub fn divide_by_omega(theta: &[BigInt], p: u64, n: u32, plus: bool) -> Option<Vec<BigInt>> {
    poly_div_exact(&to_t_poly(theta), &omega_poly(p, n, !plus))
}

/// The sign ε with L_n divisible by ω_n^ε: + for odd n, − for even n.
pub fn omega_sign(n: u32) -> bool {
    n % 2 == 1
}

impl ThetaElement {
    /// (μ, λ) of θ_n itself.
    pub fn invariants(&self) -> InvariantPair {
        mu_lambda(&to_t_poly(&self.coefficients), self.p, None)
    }

    /// (μ, λ) after removing ω_n^ε (supersingular ± normalisation).
    pub fn signed_invariants(&self) -> Option<InvariantPair> {
        let q = poly_div_exact(&to_t_poly(&self.coefficients), &omega_poly(self.p, self.layer, omega_sign(self.layer)))?;
        Some(mu_lambda(&q, self.p, None))
    }
}

/// λ when it agrees at two consecutive layers.
pub fn stable_lambda(lower: &InvariantPair, upper: &InvariantPair) -> Option<u32> {
    match (lower.lambda, upper.lambda) {
        (Some(a), Some(b)) if a == b && lower.mu == upper.mu => Some(a),
        _ => None,
    }
}
