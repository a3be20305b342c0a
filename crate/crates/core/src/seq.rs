//! Alphabets, finite symbol sequences, and samples of sequences.
//!
//! Symbols are small unsigned integers indexing into an alphabet of size
//! `|A| >= 2`; text input is mapped to indices at the ingestion boundary.
//! All types are immutable after construction and safe to share across
//! threads.

use crate::error::{Error, Result};

/// A finite alphabet, with symbols identified with `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, symbol: u32) -> bool {
        (symbol as usize) < self.size
    }
}

/// An immutable finite sequence of symbol indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<u32>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<u32>, alphabet: &Alphabet) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter(
                "sequence length must be at least 1".into(),
            ));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                alphabet_size: alphabet.size(),
            });
        }
        Ok(Self { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }
}

/// A sample of points (sequences of one shared length `m`) over one alphabet.
#[derive(Debug, Clone)]
pub struct Sample {
    points: Vec<SymbolSequence>,
    alphabet: Alphabet,
    depth: usize,
}

impl Sample {
    pub fn new(points: Vec<SymbolSequence>, alphabet: Alphabet) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::SampleTooSmall(points.len()));
        }
        let depth = points[0].len();
        for p in &points {
            if p.len() != depth {
                return Err(Error::LengthMismatch(depth, p.len()));
            }
            if let Some(&bad) = p.symbols().iter().find(|&&s| !alphabet.contains(s)) {
                return Err(Error::SymbolOutOfRange {
                    symbol: bad,
                    alphabet_size: alphabet.size(),
                });
            }
        }
        Ok(Self {
            points,
            alphabet,
            depth,
        })
    }

    /// Number of points; `n + 1` in the estimator's convention.
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// Shared truncation depth `m` of every point.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn point(&self, j: usize) -> &SymbolSequence {
        &self.points[j]
    }

    pub fn points(&self) -> &[SymbolSequence] {
        &self.points
    }
}

/// Smallest 1-based position where `x` and `y` differ, or `m` if they agree
/// on all `m` coordinates. Equals `-log rho0` for the truncated standard
/// sequence metric.
pub fn first_mismatch_index(x: &SymbolSequence, y: &SymbolSequence) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(first_mismatch_raw(x.symbols(), y.symbols()))
}

pub(crate) fn first_mismatch_raw(xs: &[u32], ys: &[u32]) -> usize {
    debug_assert_eq!(xs.len(), ys.len());
    xs.iter()
        .zip(ys)
        .position(|(a, b)| a != b)
        .map(|p| p + 1)
        .unwrap_or(xs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn seq(symbols: &[u32]) -> SymbolSequence {
        let alphabet = Alphabet::new(4).unwrap();
        SymbolSequence::new(symbols.to_vec(), &alphabet).unwrap()
    }

    #[test]
    fn mismatch_examples() {
        assert_eq!(
            first_mismatch_index(&seq(&[0, 0, 0]), &seq(&[0, 0, 1])).unwrap(),
            3
        );
        assert_eq!(first_mismatch_index(&seq(&[0, 1]), &seq(&[0, 1])).unwrap(), 2);
        assert_eq!(
            first_mismatch_index(&seq(&[1, 0, 0]), &seq(&[0, 0, 0])).unwrap(),
            1
        );
    }

    #[test]
    fn mismatch_length_mismatch_errors() {
        let err = first_mismatch_index(&seq(&[0, 1]), &seq(&[0, 1, 2]));
        assert!(matches!(err, Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn mismatch_symmetry_and_range() {
        let mut rng = CounterRng::new(11);
        for _ in 0..1000 {
            let m = 1 + rng.next_below(12) as usize;
            let xs: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
            let ys: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
            let x = seq(&xs);
            let y = seq(&ys);
            let p = first_mismatch_index(&x, &y).unwrap();
            assert_eq!(p, first_mismatch_index(&y, &x).unwrap());
            assert!((1..=m).contains(&p));
            assert_eq!(first_mismatch_index(&x, &x).unwrap(), m);
        }
    }

    #[test]
    fn alphabet_rejects_small_sizes() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
    }

    #[test]
    fn sequence_rejects_out_of_range_symbols() {
        let alphabet = Alphabet::new(2).unwrap();
        let err = SymbolSequence::new(vec![0, 2], &alphabet);
        assert!(matches!(
            err,
            Err(Error::SymbolOutOfRange {
                symbol: 2,
                alphabet_size: 2
            })
        ));
    }

    #[test]
    fn sample_enforces_shared_length_and_min_count() {
        let alphabet = Alphabet::new(2).unwrap();
        let a = SymbolSequence::new(vec![0, 1], &alphabet).unwrap();
        let b = SymbolSequence::new(vec![1, 1, 0], &alphabet).unwrap();
        assert!(matches!(
            Sample::new(vec![a.clone(), b], alphabet),
            Err(Error::LengthMismatch(2, 3))
        ));
        assert!(matches!(
            Sample::new(vec![a], alphabet),
            Err(Error::SampleTooSmall(1))
        ));
    }
}
