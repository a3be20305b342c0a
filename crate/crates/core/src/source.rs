//! Seeded generative sources with exact entropy oracles.
//!
//! Sampling is driven by the counter-based RNG in [`crate::rng`]: point `i`
//! of a sample uses the sub-seed `derive_seed(master, i)`, so samples are
//! reproducible bit-for-bit and extending the point count never changes
//! the sequences already generated.

use crate::error::{Error, Result};
use crate::rng::{derive_seed, CounterRng};
use crate::seq::{Alphabet, Sample, SymbolSequence};

const DIST_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.len() < 2 {
        return Err(Error::InvalidDistribution(format!(
            "{what} needs at least 2 entries (got {})",
            probs.len()
        )));
    }
    if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {sum}, expected 1 within {DIST_TOL}"
        )));
    }
    Ok(())
}

/// Draw an index from a categorical distribution given a uniform in [0, 1).
#[inline]
fn categorical(u: f64, probs: &[f64]) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave acc marginally below 1; fall back to the last
    // symbol with positive mass.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("distribution has positive mass")
}

/// An i.i.d. source over a finite alphabet.
#[derive(Debug, Clone)]
pub struct BernoulliSource {
    probs: Vec<f64>,
}

impl BernoulliSource {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, "symbol distribution")?;
        Ok(Self { probs })
    }

    /// Uniform distribution over `size` symbols.
    pub fn uniform(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A first-order Markov chain over a finite alphabet.
#[derive(Debug, Clone)]
pub struct MarkovSource {
    transition: Vec<Vec<f64>>,
    start: Vec<f64>,
}

impl MarkovSource {
    /// Chain started from its stationary distribution (requires
    /// irreducibility).
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self> {
        let start = stationary_distribution(&transition)?;
        Self::with_start(transition, start)
    }

    /// Chain with an explicit start distribution; reducible chains are
    /// allowed here, but their entropy oracle will fail.
    pub fn with_start(transition: Vec<Vec<f64>>, start: Vec<f64>) -> Result<Self> {
        let size = transition.len();
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidDistribution(format!(
                    "transition row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            check_distribution(row, &format!("transition row {i}"))?;
        }
        if start.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "start distribution has {} entries, expected {size}",
                start.len()
            )));
        }
        check_distribution(&start, "start distribution")?;
        Ok(Self { transition, start })
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }
}

/// A generative model with a known entropy rate.
#[derive(Debug, Clone)]
pub enum Source {
    Bernoulli(BernoulliSource),
    Markov(MarkovSource),
}

impl Source {
    pub fn alphabet_size(&self) -> usize {
        match self {
            Source::Bernoulli(s) => s.probs.len(),
            Source::Markov(s) => s.transition.len(),
        }
    }

    /// Entropy rate in nats per symbol.
    ///
    /// Bernoulli: `-sum p log p`. Markov: `-sum_i pi_i sum_j P_ij log P_ij`
    /// with `pi` the stationary distribution (errors on reducible chains).
    pub fn true_entropy(&self) -> Result<f64> {
        match self {
            Source::Bernoulli(s) => Ok(entropy_of(&s.probs)),
            Source::Markov(s) => {
                let pi = stationary_distribution(&s.transition)?;
                Ok(pi
                    .iter()
                    .zip(&s.transition)
                    .map(|(&w, row)| w * entropy_of(row))
                    .sum())
            }
        }
    }

    /// Per-symbol decay rate `a = -log(max elementary probability)` of the
    /// cylinder-mass bound; `None` for degenerate sources (some probability
    /// equals 1), which violate that bound.
    pub fn decay_rate(&self) -> Option<f64> {
        let max_p = match self {
            Source::Bernoulli(s) => s.probs.iter().cloned().fold(0.0, f64::max),
            Source::Markov(s) => s
                .transition
                .iter()
                .flatten()
                .cloned()
                .fold(0.0, f64::max),
        };
        if max_p >= 1.0 {
            None
        } else {
            Some(-max_p.ln())
        }
    }

    /// True when the source is i.i.d. uniform over its alphabet.
    pub fn is_symmetric_bernoulli(&self) -> bool {
        match self {
            Source::Bernoulli(s) => {
                let u = 1.0 / s.probs.len() as f64;
                s.probs.iter().all(|&p| (p - u).abs() <= DIST_TOL)
            }
            Source::Markov(_) => false,
        }
    }

    /// Draw `count` independent sequences of length `depth`.
    ///
    /// Point `i` uses the sub-seed `derive_seed(seed, i)`, so output is
    /// deterministic in `(source, count, depth, seed)` and stable under
    /// changes of `count`.
    pub fn sample(&self, count: usize, depth: usize, seed: u64) -> Result<Sample> {
        if count < 2 {
            return Err(Error::SampleTooSmall(count));
        }
        if depth < 1 {
            return Err(Error::InvalidParameter(
                "sample depth must be at least 1".into(),
            ));
        }
        let alphabet = Alphabet::new(self.alphabet_size())?;
        let points = (0..count)
            .map(|i| {
                let mut rng = CounterRng::new(derive_seed(seed, i as u64));
                let symbols = self.draw_sequence(depth, &mut rng);
                SymbolSequence::new(symbols, &alphabet)
            })
            .collect::<Result<Vec<_>>>()?;
        Sample::new(points, alphabet)
    }

    fn draw_sequence(&self, depth: usize, rng: &mut CounterRng) -> Vec<u32> {
        match self {
            Source::Bernoulli(s) => (0..depth)
                .map(|_| categorical(rng.next_f64(), &s.probs) as u32)
                .collect(),
            Source::Markov(s) => {
                let mut out = Vec::with_capacity(depth);
                let mut state = categorical(rng.next_f64(), &s.start);
                out.push(state as u32);
                for _ in 1..depth {
                    state = categorical(rng.next_f64(), &s.transition[state]);
                    out.push(state as u32);
                }
                out
            }
        }
    }
}

fn entropy_of(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Stationary distribution `pi` of a row-stochastic matrix: `pi P = pi`,
/// `sum pi = 1`, solved by dense Gaussian elimination with partial
/// pivoting. Errors on reducible chains (checked by reachability).
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let size = transition.len();
    if size < 2 {
        return Err(Error::AlphabetTooSmall(size));
    }
    for (i, row) in transition.iter().enumerate() {
        if row.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "transition row {i} has {} entries, expected {size}",
                row.len()
            )));
        }
        check_distribution(row, &format!("transition row {i}"))?;
    }
    if !is_irreducible(transition) {
        return Err(Error::ReducibleChain);
    }

    // Solve (P^T - I) pi = 0 with the last equation replaced by sum pi = 1.
    let mut a = vec![vec![0.0f64; size + 1]; size];
    for i in 0..size - 1 {
        for j in 0..size {
            a[i][j] = transition[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[size - 1][..size].fill(1.0);
    a[size - 1][size] = 1.0;

    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return Err(Error::StationarySolveFailed { residual: f64::NAN });
        }
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let lead = &upper[col];
        for row in lower.iter_mut() {
            let factor = row[col] / lead[col];
            for (x, &l) in row[col..].iter_mut().zip(&lead[col..]) {
                *x -= factor * l;
            }
        }
    }
    let mut pi = vec![0.0f64; size];
    for row in (0..size).rev() {
        let mut acc = a[row][size];
        for j in row + 1..size {
            acc -= a[row][j] * pi[j];
        }
        pi[row] = acc / a[row][row];
    }

    // Clean up rounding noise, then renormalize and verify the residual.
    for p in &mut pi {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    let residual = (0..size)
        .map(|j| {
            let pj: f64 = (0..size).map(|i| pi[i] * transition[i][j]).sum();
            (pj - pi[j]).abs()
        })
        .fold(0.0, f64::max);
    if residual > STATIONARY_TOL {
        return Err(Error::StationarySolveFailed { residual });
    }
    Ok(pi)
}

/// Strong connectivity of the positive-entry digraph.
fn is_irreducible(transition: &[Vec<f64>]) -> bool {
    let size = transition.len();
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; size];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..size {
                let edge = if forward {
                    transition[u][v] > 0.0
                } else {
                    transition[v][u] > 0.0
                };
                if edge && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    };
    reach(true) == size && reach(false) == size
}
