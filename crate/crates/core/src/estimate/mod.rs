//! Estimators over measured or simulated outcome records.

mod correlators;
mod spectrum;

pub use correlators::{estimate_correlators, Centering, CorrelatorEstimates, CorrelatorOptions};
pub use spectrum::{
    modulation_peak_exact, modulation_peak_theory, noise_power_spectrum, outcome_power_spectrum, NoiseSpectrumEstimate,
    SpectrumEstimate,
};

use serde::{Deserialize, Serialize};

use crate::acquisition::OutcomeDistribution;
use crate::error::{invalid, Result};

/// Histogram of ones-per-block, accumulated block by block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAccumulator {
    m: usize,
    counts: Vec<u64>,
}

impl BlockAccumulator {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("block size must be >= 1"));
        }
        Ok(BlockAccumulator { m, counts: vec![0; m + 1] })
    }

    /// Adds the ⌊len/M⌋ disjoint blocks of `bits`; a trailing partial block is dropped.
    pub fn add(&mut self, bits: &[u8]) {
        for block in bits.chunks_exact(self.m) {
            let ones: usize = block.iter().map(|b| *b as usize).sum();
            self.counts[ones] += 1;
        }
    }

    pub fn merge(&mut self, other: &BlockAccumulator) -> Result<()> {
        if other.m != self.m {
            return Err(invalid("cannot merge histograms with different block sizes"));
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn blocks(&self) -> u64 {
        self.counts.iter().sum()
    }
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn distribution(&self) -> Result<OutcomeDistribution> {
        let total = self.blocks();
        if total == 0 {
            return Err(invalid("no complete blocks"));
        }
        OutcomeDistribution::new(self.counts.iter().map(|c| *c as f64 / total as f64).collect())
    }

    /// √M times the sample standard deviation of m/M.
    pub fn scaled_std(&self) -> Result<f64> {
        let d = self.distribution()?;
        Ok(d.fraction_std() * (self.m as f64).sqrt())
    }
}

/// Empirical ρ(m|M) over the disjoint blocks of every series.
pub fn block_histogram<S: AsRef<[u8]>>(series: &[S], m: usize) -> Result<OutcomeDistribution> {
    let mut acc = BlockAccumulator::new(m)?;
    for s in series {
        if s.as_ref().len() < m {
            return Err(invalid(format!("series of length {} is shorter than the block size {m}", s.as_ref().len())));
        }
        acc.add(s.as_ref());
    }
    acc.distribution()
}
