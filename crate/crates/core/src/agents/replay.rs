use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AgentError;

/// One stored step in normalized agent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

impl Transition {
    pub fn is_finite(&self) -> bool {
        self.reward.is_finite()
            && self.state.iter().chain(&self.action).chain(&self.next_state).all(|v| v.is_finite())
    }
}

/// Fixed-capacity FIFO ring with seeded uniform sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    items: Vec<T>,
    head: usize,
    rng: ChaCha8Rng,
}

impl<T: Clone> ReplayBuffer<T> {
    pub fn new(capacity: usize, seed: u64) -> Result<Self, AgentError> {
        if capacity == 0 {
            return Err(AgentError::InvalidConfig("replay capacity must be positive".into()));
        }
        Ok(Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            head: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, item: T) {
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else {
            self.items[self.head] = item;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    /// Contents from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items[self.head..].iter().chain(&self.items[..self.head])
    }

    pub fn sample_indices(&mut self, n: usize) -> Result<Vec<usize>, AgentError> {
        if self.items.is_empty() {
            return Err(AgentError::InsufficientReplay { have: 0, need: n });
        }
        let len = self.items.len();
        Ok((0..n).map(|_| self.rng.random_range(0..len)).collect())
    }

    pub fn get(&self, index: usize) -> &T {
        &self.items[index]
    }

    pub fn sample(&mut self, n: usize) -> Result<Vec<T>, AgentError> {
        Ok(self.sample_indices(n)?.into_iter().map(|i| self.items[i].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifo_eviction() {
        let mut b = ReplayBuffer::new(2, 0).unwrap();
        for c in ['a', 'b', 'c'] {
            b.push(c);
        }
        assert_eq!(b.iter().copied().collect::<Vec<_>>(), vec!['b', 'c']);
        b.push('d');
        assert_eq!(b.iter().copied().collect::<Vec<_>>(), vec!['c', 'd']);
    }

    #[test]
    fn single_element_sampled_repeatedly() {
        let mut b = ReplayBuffer::new(5, 0).unwrap();
        b.push(7);
        assert_eq!(b.sample(4).unwrap(), vec![7, 7, 7, 7]);
    }

    #[test]
    fn empty_buffer_rejected() {
        let mut b: ReplayBuffer<u8> = ReplayBuffer::new(5, 0).unwrap();
        assert!(matches!(b.sample(1), Err(AgentError::InsufficientReplay { .. })));
        assert!(ReplayBuffer::<u8>::new(0, 0).is_err());
    }

    #[test]
    fn uniform_frequencies() {
        let mut b = ReplayBuffer::new(10, 3).unwrap();
        for i in 0..10 {
            b.push(i);
        }
        let mut counts = [0usize; 10];
        for v in b.sample(100_000).unwrap() {
            counts[v] += 1;
        }
        for c in counts {
            let f = c as f64 / 100_000.0;
            assert!((0.08..=0.12).contains(&f), "{f}");
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let fill = |seed| {
            let mut b = ReplayBuffer::new(50, seed).unwrap();
            (0..80).for_each(|i| b.push(i));
            b.sample(30).unwrap()
        };
        assert_eq!(fill(4), fill(4));
        assert_ne!(fill(4), fill(5));
    }
}
