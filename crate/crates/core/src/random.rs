//! The random q-complex model: the full `k`-skeleton of `Gr(F_q^n)` plus each
//! `(k+1)`-space independently with probability `p`.

use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::Ambient;
use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::operators::boundary_matrix;
use crate::qnum::{gauss, q_int};
use crate::ring::ModRing;
use crate::sparse::FpBasis;
use crate::subspace::Subspace;

/// Uniforms in `[0, 1)` for faces `0..count`, keyed on `(seed, trial)`.
///
/// Face `i` always reads words `2i, 2i+1` of ChaCha stream `trial`, so the
/// value depends only on `(seed, trial, i)`.
pub fn face_uniforms(seed: u64, trial: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..count)
        .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomQComplex {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub p: f64,
    pub seed: u64,
    pub trial: u64,
    /// Indices into `Gr_{k+1}`, ascending.
    pub included: Vec<u32>,
}

impl RandomQComplex {
    pub fn included_spaces(&self, amb: &Ambient) -> Result<Vec<Subspace>> {
        let level = amb.level(self.k + 1)?;
        Ok(self.included.iter().map(|&i| level[i as usize].clone()).collect())
    }
}

fn check_params(n: usize, k: usize, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    if k + 1 > n {
        return Err(Error::InvalidArgument(format!("k+1 = {} exceeds n = {n}", k + 1)));
    }
    Ok(())
}

/// One sample of the model; trial 0 of the counter-based stream.
pub fn sample(n: usize, k: usize, q: u32, p: f64, seed: u64) -> Result<RandomQComplex> {
    sample_trial(n, k, q, p, seed, 0)
}

pub fn sample_trial(n: usize, k: usize, q: u32, p: f64, seed: u64, trial: u64) -> Result<RandomQComplex> {
    check_params(n, k, p)?;
    let count = gauss(n, k + 1, q) as usize;
    crate::budget::check("faces", count as u128)?;
    Ok(from_uniforms(n, k, q, p, seed, trial, &face_uniforms(seed, trial, count)))
}

fn from_uniforms(n: usize, k: usize, q: u32, p: f64, seed: u64, trial: u64, u: &[f64]) -> RandomQComplex {
    RandomQComplex {
        n,
        k,
        q,
        p,
        seed,
        trial,
        included: (0..u.len() as u32).filter(|&i| u[i as usize] < p).collect(),
    }
}

/// Exact `H^k = 0` test over F_p for samples on a fixed `(n, k, q)`.
///
/// `rank d_{k-1}` is computed once; each sample only ranks the rows of the
/// included `(k+1)`-spaces.
pub struct ConnectivityTester {
    amb: Ambient,
    k: usize,
    coef: u32,
    /// `dim C^k − rank d_{k-1}`: the rank `d_k` must reach.
    target: usize,
}

impl ConnectivityTester {
    pub fn new(n: usize, k: usize, q: u32, coef: u32) -> Result<Self> {
        if !is_prime(coef) {
            return Err(Error::NotPrime(coef));
        }
        let ring = ModRing::new(coef)?;
        ring.require_divides_q_plus_one(q)?;
        check_params(n, k, 0.0)?;
        let amb = Ambient::with_q(q, n)?;
        let prev = if k == 0 {
            0
        } else {
            boundary_matrix(&amb, k, ring)?.rank_mod_p(coef)
        };
        let target = amb.level_size(k) as usize - prev;
        amb.faces(k + 1)?;
        Ok(ConnectivityTester { amb, k, coef, target })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.amb
    }

    /// `dim C^k − rank d_{k-1}`.
    pub fn target_rank(&self) -> usize {
        self.target
    }

    /// Rank of the coboundary restricted to the included faces, capped at the
    /// target.
    pub fn restricted_rank(&self, x: &RandomQComplex) -> Result<usize> {
        self.check(x)?;
        let faces = self.amb.faces(self.k + 1)?;
        let mut basis = FpBasis::new(self.coef);
        for &i in &x.included {
            if basis.rank() == self.target {
                break;
            }
            basis.insert(faces[i as usize].iter().map(|&w| (w, 1)).collect());
        }
        Ok(basis.rank())
    }

    /// `Z^k(X) = B^k(X)`.
    pub fn is_k_connected(&self, x: &RandomQComplex) -> Result<bool> {
        Ok(self.restricted_rank(x)? == self.target)
    }

    /// Connectivity, failing with an inconsistency if an uncovered face
    /// coexists with a connected verdict.
    pub fn is_k_connected_checked(&self, x: &RandomQComplex) -> Result<(bool, usize)> {
        let connected = self.is_k_connected(x)?;
        let uncovered = self.uncovered_count(x)?;
        if connected && uncovered > 0 {
            return Err(Error::Inconsistency(format!(
                "{uncovered} uncovered faces but H^{} = 0",
                self.k
            )));
        }
        Ok((connected, uncovered))
    }

    fn uncovered_mask(&self, x: &RandomQComplex) -> Result<Vec<bool>> {
        self.check(x)?;
        let faces = self.amb.faces(self.k + 1)?;
        let mut covered = vec![false; self.amb.level_size(self.k) as usize];
        for &i in &x.included {
            for &w in faces[i as usize].iter() {
                covered[w as usize] = true;
            }
        }
        Ok(covered)
    }

    pub fn uncovered_count(&self, x: &RandomQComplex) -> Result<usize> {
        Ok(self.uncovered_mask(x)?.iter().filter(|&&c| !c).count())
    }

    /// Every `k`-space lying in no included `(k+1)`-space.
    pub fn uncovered_faces(&self, x: &RandomQComplex) -> Result<Vec<Subspace>> {
        let level = self.amb.level(self.k)?;
        Ok(self
            .uncovered_mask(x)?
            .iter()
            .zip(level)
            .filter(|(&c, _)| !c)
            .map(|(_, w)| w.clone())
            .collect())
    }

    fn check(&self, x: &RandomQComplex) -> Result<()> {
        if x.n != self.amb.n() || x.k != self.k || x.q != self.amb.q() {
            return Err(Error::InvalidArgument("sample parameters differ from the tester".into()));
        }
        Ok(())
    }
}

/// `(n choose k)_q (1 − p)^{[n−k]_q}`, the mean number of uncovered faces.
pub fn expected_uncovered(n: usize, k: usize, q: u32, p: f64) -> f64 {
    gauss(n, k, q) as f64 * (1.0 - p).powi(q_int(n - k, q) as i32)
}

/// `ln((n choose k)_q) / (n−k choose 1)_q`.
pub fn threshold(n: usize, k: usize, q: u32) -> f64 {
    (gauss(n, k, q) as f64).ln() / q_int(n - k, q) as f64
}

/// Wilson score interval at 95%.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let ph = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Parses `start:stop:step` into an ascending grid, inclusive of `stop`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("grid {s:?}: {e}")))?;
    let grid = match parts.as_slice() {
        [p] => vec![*p],
        [a, b, step] if *step > 0.0 && b >= a => {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        _ => return Err(Error::Parse(format!("grid {s:?}: expected start:stop:step"))),
    };
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument(format!("grid {s:?} leaves [0, 1]")));
    }
    Ok(grid)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub trials: u64,
    pub connected: u64,
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub coef: u32,
    pub seed: u64,
    pub pstar: f64,
    pub rows: Vec<SweepRow>,
    /// Samples with an uncovered face that the tester called connected.
    pub uncovered_exceptions: u64,
    /// Samples with at least one uncovered face.
    pub uncovered_samples: u64,
    /// Trials whose connectivity was lost when `p` grew (coupled samples).
    pub monotonicity_violations: u64,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# pstar={:.12}\np,trials,connected,phat,ci_lo,ci_hi\n", self.pstar);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{:.6}\n",
                r.p, r.trials, r.connected, r.phat, r.ci_lo, r.ci_hi
            ));
        }
        out
    }

    pub fn phat_at(&self, p: f64) -> Option<f64> {
        self.rows.iter().find(|r| (r.p - p).abs() < 1e-9).map(|r| r.phat)
    }
}

/// Monte Carlo estimate of `P[H^k(X) = 0]` along `grid`.
///
/// Trial `t` draws one uniform per face and reuses it at every grid point, so
/// the complexes of a trial are nested as `p` grows.
pub fn threshold_sweep(
    n: usize,
    k: usize,
    q: u32,
    grid: &[f64],
    trials: u64,
    seed: u64,
    coef: u32,
) -> Result<SweepResult> {
    for &p in grid {
        check_params(n, k, p)?;
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let tester = ConnectivityTester::new(n, k, q, coef)?;
    let count = gauss(n, k + 1, q) as usize;
    crate::budget::check("faces", count as u128 * trials as u128)?;

    struct Trial {
        connected: Vec<bool>,
        elapsed: Vec<Duration>,
        exceptions: u64,
        uncovered: u64,
        violations: u64,
    }
    let per_trial: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let u = face_uniforms(seed, t, count);
            let mut out = Trial {
                connected: Vec::with_capacity(grid.len()),
                elapsed: Vec::with_capacity(grid.len()),
                exceptions: 0,
                uncovered: 0,
                violations: 0,
            };
            for &p in &grid {
                let start = Instant::now();
                let x = from_uniforms(n, k, q, p, seed, t, &u);
                let c = tester.is_k_connected(&x)?;
                if tester.uncovered_count(&x)? > 0 {
                    out.uncovered += 1;
                    out.exceptions += c as u64;
                }
                if out.connected.last() == Some(&true) && !c {
                    out.violations += 1;
                }
                out.connected.push(c);
                out.elapsed.push(start.elapsed());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let connected = per_trial.iter().filter(|t| t.connected[i]).count() as u64;
            let (ci_lo, ci_hi) = wilson(connected, trials);
            SweepRow {
                p,
                trials,
                connected,
                phat: if trials == 0 { 0.0 } else { connected as f64 / trials as f64 },
                ci_lo,
                ci_hi,
                elapsed: per_trial.iter().map(|t| t.elapsed[i]).sum(),
            }
        })
        .collect();
    Ok(SweepResult {
        n,
        k,
        q,
        coef,
        seed,
        pstar: threshold(n, k, q),
        rows,
        uncovered_exceptions: per_trial.iter().map(|t| t.exceptions).sum(),
        uncovered_samples: per_trial.iter().map(|t| t.uncovered).sum(),
        monotonicity_violations: per_trial.iter().map(|t| t.violations).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let x = sample(3, 1, 2, 0.0, 1).unwrap();
        assert!(x.included.is_empty());
        let x = sample(3, 1, 2, 1.0, 1).unwrap();
        assert_eq!(x.included.len(), 7);
        let t = ConnectivityTester::new(3, 1, 2, 3).unwrap();
        assert!(t.is_k_connected(&x).unwrap());
        assert!(t.uncovered_faces(&x).unwrap().is_empty());
        let empty = sample(3, 1, 2, 0.0, 1).unwrap();
        assert!(!t.is_k_connected(&empty).unwrap());
        assert_eq!(t.uncovered_faces(&empty).unwrap().len(), 7);
        // dim C^1 = 7, rank d_0 = 1
        assert_eq!(t.target_rank(), 6);
    }

    #[test]
    fn samples_are_reproducible_and_nested() {
        let a = sample(4, 1, 2, 0.4, 42).unwrap();
        let b = sample(4, 1, 2, 0.4, 42).unwrap();
        assert_eq!(a.included, b.included);
        let c = sample(4, 1, 2, 0.7, 42).unwrap();
        assert!(a.included.iter().all(|i| c.included.contains(i)));
        let u = face_uniforms(9, 3, 35);
        assert_eq!(u[..10], face_uniforms(9, 3, 10)[..]);
    }

    #[test]
    fn tester_rejects_bad_coefficients() {
        assert!(matches!(ConnectivityTester::new(4, 1, 2, 4), Err(Error::NotPrime(4))));
        assert!(matches!(
            ConnectivityTester::new(4, 1, 2, 2),
            Err(Error::ModulusMustDivide { .. })
        ));
    }

    #[test]
    fn uncovered_implies_disconnected() {
        let t = ConnectivityTester::new(4, 1, 2, 3).unwrap();
        for trial in 0..300 {
            let x = sample_trial(4, 1, 2, 0.3, 5, trial).unwrap();
            t.is_k_connected_checked(&x).unwrap();
        }
    }

    #[test]
    fn uncovered_mean_matches_closed_form() {
        let t = ConnectivityTester::new(4, 1, 2, 3).unwrap();
        let p = 0.1;
        let trials = 2000;
        let total: usize = (0..trials)
            .map(|i| t.uncovered_count(&sample_trial(4, 1, 2, p, 77, i).unwrap()).unwrap())
            .sum();
        let mean = total as f64 / trials as f64;
        let expected = expected_uncovered(4, 1, 2, p);
        assert!((mean - expected).abs() < 0.05 * expected + 0.2, "{mean} vs {expected}");
    }

    #[test]
    fn wilson_interval_brackets_estimate() {
        let (lo, hi) = wilson(250, 500);
        assert!(lo < 0.5 && hi > 0.5 && hi - lo < 0.1);
        assert_eq!(wilson(0, 10).0, 0.0);
        assert_eq!(wilson(10, 10).1, 1.0);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.05:0.95:0.05").unwrap();
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(*g.last().unwrap(), 0.95);
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert!(parse_grid("0.5:2:0.5").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn sweep_is_deterministic_and_monotone() {
        let grid = parse_grid("0.1:0.9:0.2").unwrap();
        let a = threshold_sweep(4, 1, 2, &grid, 100, 42, 3).unwrap();
        let b = threshold_sweep(4, 1, 2, &grid, 100, 42, 3).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.monotonicity_violations, 0);
        assert_eq!(a.uncovered_exceptions, 0);
        let ph: Vec<f64> = a.rows.iter().map(|r| r.phat).collect();
        assert!(ph.windows(2).all(|w| w[0] <= w[1]));
        assert!((a.pstar - 15f64.ln() / 7.0).abs() < 1e-12);
    }
}
