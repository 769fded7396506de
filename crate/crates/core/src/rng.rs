//! Deterministic randomness.
//!
//! All randomness flows through [`Sampler`], backed by ChaCha8. A master seed
//! builds the generator via `seed_from_u64`; independent trials use the same
//! seed with `set_stream(trial_index)`, so any trial can be reproduced in
//! isolation. Every primitive draw is appended to a log; a recorded log can be
//! replayed in place of the generator and yields the identical decision
//! sequence.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// One primitive draw, as recorded in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Draw {
    /// Raw 53-bit pattern behind a uniform draw from (0, 1].
    U(u64),
    /// Uniform integer. Stored with its exclusive bound for replay checking.
    I { n: u64, v: u64 },
}

enum Mode {
    Fresh(ChaCha8Rng),
    Replay(Vec<Draw>, usize),
}

pub struct Sampler {
    mode: Mode,
    log: Vec<Draw>,
    mismatch: bool,
}

impl Sampler {
    pub fn from_seed(master: u64) -> Self {
        Sampler {
            mode: Mode::Fresh(ChaCha8Rng::seed_from_u64(master)),
            log: Vec::new(),
            mismatch: false,
        }
    }

    /// Generator for one trial: master seed, stream = trial index.
    pub fn for_trial(master: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(trial);
        Sampler {
            mode: Mode::Fresh(rng),
            log: Vec::new(),
            mismatch: false,
        }
    }

    /// Replays a recorded draw log instead of generating fresh randomness.
    pub fn replay(draws: Vec<Draw>) -> Self {
        Sampler {
            mode: Mode::Replay(draws, 0),
            log: Vec::new(),
            mismatch: false,
        }
    }

    pub fn into_log(self) -> Vec<Draw> {
        self.log
    }

    pub fn log(&self) -> &[Draw] {
        &self.log
    }

    /// True when a replay ran out of draws or hit a draw of the wrong shape.
    pub fn replay_failed(&self) -> bool {
        self.mismatch
    }

    fn next_replay(&mut self) -> Option<Draw> {
        if let Mode::Replay(draws, pos) = &mut self.mode {
            if *pos < draws.len() {
                let d = draws[*pos];
                *pos += 1;
                return Some(d);
            }
        }
        None
    }

    /// Uniform in (0, 1]: 53-bit mantissa, never zero, so logarithms stay
    /// finite.
    pub fn unit(&mut self) -> f64 {
        let bits = match &mut self.mode {
            Mode::Fresh(rng) => (rng.next_u64() >> 11) + 1,
            Mode::Replay(..) => match self.next_replay() {
                Some(Draw::U(b)) => b,
                _ => {
                    self.mismatch = true;
                    1
                }
            },
        };
        self.log.push(Draw::U(bits));
        bits as f64 * (1.0 / 9007199254740992.0) // 2^-53
    }

    /// Coin that lands true with probability `p`.
    pub fn coin(&mut self, p: f64) -> bool {
        self.unit() <= p
    }

    /// Uniform index in `0..n` (n ≥ 1), unbiased via rejection.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index bound must be positive");
        let b = n as u64;
        let v = match &mut self.mode {
            Mode::Fresh(rng) => {
                let zone = u64::MAX - (u64::MAX % b);
                loop {
                    let x = rng.next_u64();
                    if x < zone {
                        break x % b;
                    }
                }
            }
            Mode::Replay(..) => match self.next_replay() {
                Some(Draw::I { n: bn, v }) if bn == b && v < b => v,
                _ => {
                    self.mismatch = true;
                    0
                }
            },
        };
        self.log.push(Draw::I { n: b, v });
        v as usize
    }

    /// Geometric on {1, 2, …} with success probability `p`, via the inverse
    /// CDF of one uniform draw.
    pub fn geometric(&mut self, p: f64) -> u64 {
        let u = self.unit();
        let r = libm::ceil(libm::log(u) / libm::log1p(-p));
        if r < 1.0 {
            1
        } else {
            r as u64
        }
    }

    /// Uniform a-subset of `0..m` (Floyd's algorithm), returned sorted.
    pub fn sorted_subset(&mut self, m: usize, a: usize) -> Vec<usize> {
        assert!(a <= m);
        let mut chosen = alloc::collections::BTreeSet::new();
        for j in m - a..m {
            let t = self.index(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = Sampler::from_seed(7);
        let mut b = Sampler::from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.unit().to_bits(), b.unit().to_bits());
            assert_eq!(a.index(13), b.index(13));
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = Sampler::for_trial(7, 0);
        let mut b = Sampler::for_trial(7, 1);
        let xa: Vec<usize> = (0..8).map(|_| a.index(1000)).collect();
        let xb: Vec<usize> = (0..8).map(|_| b.index(1000)).collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn replay_reproduces() {
        let mut a = Sampler::from_seed(42);
        let u = a.unit();
        let i = a.index(10);
        let g = a.geometric(0.125);
        let s = a.sorted_subset(9, 3);
        let log = a.into_log();

        let mut r = Sampler::replay(log);
        assert_eq!(r.unit().to_bits(), u.to_bits());
        assert_eq!(r.index(10), i);
        assert_eq!(r.geometric(0.125), g);
        assert_eq!(r.sorted_subset(9, 3), s);
        assert!(!r.replay_failed());
    }

    #[test]
    fn replay_detects_mismatch() {
        let mut a = Sampler::from_seed(42);
        a.index(10);
        let mut r = Sampler::replay(a.into_log());
        r.index(11); // wrong bound
        assert!(r.replay_failed());
    }

    #[test]
    fn unit_is_in_half_open_interval() {
        let mut a = Sampler::from_seed(3);
        for _ in 0..10_000 {
            let u = a.unit();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn geometric_matches_tail_probability() {
        // P(r > m) = (1-p)^m; with p = 1/8, m = 8: ≈ 0.3436
        let mut a = Sampler::from_seed(11);
        let n = 200_000;
        let tail = (0..n).filter(|_| a.geometric(0.125) > 8).count();
        let frac = tail as f64 / n as f64;
        let expect = 0.875f64.powi(8);
        assert!((frac - expect).abs() < 0.005, "frac={frac} expect={expect}");
    }

    #[test]
    fn geometric_minimum_is_one() {
        let mut a = Sampler::from_seed(5);
        assert!((0..10_000).all(|_| a.geometric(0.9999) >= 1));
    }

    #[test]
    fn subsets_are_uniform_enough() {
        // all 2-subsets of {0,1,2,3} should appear with similar frequency
        let mut a = Sampler::from_seed(1);
        let mut counts = alloc::collections::BTreeMap::new();
        let n = 60_000;
        for _ in 0..n {
            let s = a.sorted_subset(4, 2);
            *counts.entry(s).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            let f = c as f64 / n as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01);
        }
    }
}
