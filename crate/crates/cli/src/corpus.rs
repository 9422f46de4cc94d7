//! Curve files (`N : a1 a2 a3 a4 a6` per line, `#` comments) and the scan for
//! CR-certified triples.

use anyhow::{Context, Result};
use mulab_core::invariants::{check_cr, split_level, EllipticCurve, QuadraticField, Verdict, DEFAULT_SAMPLING_BOUND};
use mulab_core::verify::tamagawa_sum;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Discriminants of the fields used for corpus triples.
pub const CORPUS_DISCS: [i64; 6] = [-3, -7, -8, -11, -19, -43];
pub const CORPUS_PRIMES: [u64; 4] = [5, 7, 11, 13];

pub fn parse_curves(text: &str) -> Result<Vec<EllipticCurve>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| EllipticCurve::parse(l).with_context(|| format!("line {}", i + 1)))
        .collect()
}

pub fn read_curves(path: &Path) -> Result<Vec<EllipticCurve>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_curves(&text)
}

/// The curve file shipped with the repository.
pub fn bundled_curves() -> Vec<EllipticCurve> {
    parse_curves(include_str!("../../../data/curves.txt")).expect("bundled corpus parses")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub conductor: u64,
    pub curve: [i64; 5],
    pub disc: i64,
    pub p: u64,
    pub n_plus: u64,
    pub n_minus: u64,
    pub ap: i64,
    /// Σ_{q|N⁻} t_f(q).
    pub tamagawa_sum: u32,
}

impl Triple {
    pub fn curve(&self) -> EllipticCurve {
        EllipticCurve::with_conductor_hint(self.curve, Some(self.conductor)).expect("corpus curve")
    }

    pub fn field(&self) -> QuadraticField {
        QuadraticField::new(self.disc).expect("corpus field")
    }
}

#[derive(Deserialize)]
struct TripleFile {
    triples: Vec<Triple>,
}

/// The curated triple corpus shipped with the repository (`data/corpus.json`),
/// a subset of `scan(bundled_curves(), CORPUS_DISCS, CORPUS_PRIMES, 200)`.
pub fn bundled_triples() -> Vec<Triple> {
    serde_json::from_str::<TripleFile>(include_str!("../../../data/corpus.json")).expect("bundled triples parse").triples
}

/// Triples (E, K, p) with odd parity, p ∤ N·D and CR certified.
pub fn scan(curves: &[EllipticCurve], discs: &[i64], primes: &[u64], max_conductor: u64) -> Vec<Triple> {
    let mut out = Vec::new();
    for e in curves.iter().filter(|e| e.conductor <= max_conductor) {
        for &d in discs {
            let Ok(k) = QuadraticField::new(d) else { continue };
            let Ok(split) = split_level(e.conductor, &k) else { continue };
            if !split.odd {
                continue;
            }
            for &p in primes {
                if e.conductor % p == 0 || d % p as i64 == 0 {
                    continue;
                }
                let Ok(cr) = check_cr(e, split.n_minus, p, DEFAULT_SAMPLING_BOUND) else { continue };
                if cr.cr != Verdict::True {
                    continue;
                }
                out.push(Triple {
                    conductor: e.conductor,
                    curve: e.input,
                    disc: d,
                    p,
                    n_plus: split.n_plus,
                    n_minus: split.n_minus,
                    ap: e.ap(p),
                    tamagawa_sum: tamagawa_sum(e, split.n_minus, p).expect("valid primes"),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_is_semistable() {
        let curves = bundled_curves();
        assert!(curves.len() > 100);
        for e in &curves {
            assert!(mulab_core::arith::is_squarefree(e.conductor), "{}", e.conductor);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_curves("# header\n\n11 : 0 -1 1 -10 -20\n  # indented comment\n").unwrap();
        assert_eq!(c.len(), 1);
        assert!(parse_curves("11 : 0 -1 1").is_err());
    }

    #[test]
    fn bundled_triples_come_from_the_scan() {
        let curves = bundled_curves();
        let full = scan(&curves, &CORPUS_DISCS, &CORPUS_PRIMES, 200);
        for t in bundled_triples() {
            assert!(full.contains(&t), "{t:?}");
        }
    }
}
