//! Positive definite integral quadratic forms: LLL reduction and short-vector
//! enumeration (Fincke–Pohst). Floating point only guides the search; every
//! reported vector is checked with exact integer arithmetic.

/// Integral quadratic form Q(x) = ½·xᵀGx with G symmetric, even diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    gram: Vec<Vec<i128>>,
}

impl QuadForm {
    pub fn new(gram: Vec<Vec<i128>>) -> Self {
        let n = gram.len();
        for i in 0..n {
            assert_eq!(gram[i].len(), n);
            assert!(gram[i][i] % 2 == 0, "diagonal of an integral form must be even");
            for j in 0..n {
                assert_eq!(gram[i][j], gram[j][i], "Gram matrix must be symmetric");
            }
        }
        QuadForm { gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i128>] {
        &self.gram
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        let n = self.dim();
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            s += self.gram[i][i] / 2 * (x[i] as i128) * (x[i] as i128);
            for j in i + 1..n {
                s += self.gram[i][j] * (x[i] as i128) * (x[j] as i128);
            }
        }
        s
    }

    fn transformed(&self, u: &[Vec<i64>]) -> Vec<Vec<i128>> {
        let n = self.dim();
        let mut ug = vec![vec![0i128; n]; n];
        for i in 0..n {
            for k in 0..n {
                if u[i][k] == 0 {
                    continue;
                }
                for j in 0..n {
                    ug[i][j] += u[i][k] as i128 * self.gram[k][j];
                }
            }
        }
        let mut out = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i128;
                for k in 0..n {
                    s += ug[i][k] * u[j][k] as i128;
                }
                out[i][j] = s;
            }
        }
        out
    }

    /// LLL-reduce; returns the unimodular U (rows = new basis in old coordinates)
    /// and the reduced form U·G·Uᵀ.
    pub fn lll(&self) -> (Vec<Vec<i64>>, QuadForm) {
        let n = self.dim();
        let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        if n <= 1 {
            return (u, self.clone());
        }
        let mut g = self.gram.clone();
        let mut k = 1;
        let mut guard = 0;
        while k < n {
            guard += 1;
            assert!(guard < 100_000, "LLL failed to terminate");
            for j in (0..k).rev() {
                let (mu, _) = gso(&g);
                let q = mu[k][j].round() as i64;
                if q != 0 {
                    for c in 0..n {
                        u[k][c] -= q * u[j][c];
                    }
                    g = self.transformed(&u);
                }
            }
            let (mu, bstar) = gso(&g);
            if bstar[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
                k += 1;
            } else {
                u.swap(k, k - 1);
                g = self.transformed(&u);
                k = (k - 1).max(1);
            }
        }
        (u, QuadForm { gram: g })
    }

    /// All nonzero x with Q(x) ≤ bound, each paired with Q(x). Both x and −x are listed.
    pub fn short_vectors(&self, bound: i128) -> Vec<(Vec<i64>, i128)> {
        let n = self.dim();
        if n == 0 || bound <= 0 {
            return Vec::new();
        }
        let (u, red) = self.lll();
        let q = cholesky_coefficients(&red.gram);
        let mut out = Vec::new();
        let mut x = vec![0i64; n];
        enumerate(&q, &red, n - 1, bound as f64, bound, &mut x, &mut out);
        // back to the original coordinates: x_orig = xᵀ U
        out.into_iter()
            .map(|(y, v)| {
                let mut z = vec![0i64; n];
                for i in 0..n {
                    if y[i] != 0 {
                        for c in 0..n {
                            z[c] += y[i] * u[i][c];
                        }
                    }
                }
                debug_assert_eq!(self.eval(&z), v);
                (z, v)
            })
            .collect()
    }

    /// Number of vectors with Q(x) = m for m = 0..=bound (m = 0 counts the zero vector).
    pub fn theta_series(&self, bound: i128) -> Vec<u64> {
        let mut t = vec![0u64; bound as usize + 1];
        t[0] = 1;
        for (_, v) in self.short_vectors(bound) {
            t[v as usize] += 1;
        }
        t
    }

    /// Smallest nonzero value of Q.
    pub fn minimum(&self) -> i128 {
        let mut b = 1;
        loop {
            if let Some(m) = self.short_vectors(b).iter().map(|(_, v)| *v).min() {
                return m;
            }
            b *= 2;
        }
    }
}

/// Gram–Schmidt data (μ, |b*|²) from a bilinear Gram matrix G/2.
fn gso(g: &[Vec<i128>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let a = |i: usize, j: usize| g[i][j] as f64 / 2.0;
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = a(i, j);
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = a(i, i);
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
    }
    (mu, b)
}

/// Coefficients with Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)².
fn cholesky_coefficients(g: &[Vec<i128>]) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| g[i][j] as f64 / 2.0).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    q
}

fn enumerate(
    q: &[Vec<f64>],
    form: &QuadForm,
    i: usize,
    remaining: f64,
    bound: i128,
    x: &mut Vec<i64>,
    out: &mut Vec<(Vec<i64>, i128)>,
) {
    let n = q.len();
    let mut c = 0.0;
    for j in i + 1..n {
        c -= q[i][j] * x[j] as f64;
    }
    let slack = 1e-7 * (1.0 + bound as f64);
    let r = ((remaining + slack).max(0.0) / q[i][i]).sqrt();
    let lo = (c - r).ceil() as i64;
    let hi = (c + r).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        let d = xi as f64 - c;
        let rest = remaining - q[i][i] * d * d;
        if rest < -slack {
            continue;
        }
        if i == 0 {
            if x.iter().any(|&v| v != 0) {
                let v = form.eval(x);
                if v <= bound {
                    out.push((x.clone(), v));
                }
            }
        } else {
            enumerate(q, form, i - 1, rest, bound, x, out);
        }
    }
    x[i] = 0;
}
