use std::collections::VecDeque;

use rand::Rng;

/// Fixed-capacity FIFO experience store with uniform sampling.
#[derive(Clone, Debug)]
pub struct ReplayBuffer<T> {
    items: VecDeque<T>,
    capacity: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        ReplayBuffer {
            items: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Appends an item, evicting the oldest one when full.
    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
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

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }

    /// Draws `count` items uniformly with replacement.
    pub fn sample<'a, R: Rng + ?Sized>(&'a self, rng: &'a mut R, count: usize) -> impl Iterator<Item = &'a T> + 'a {
        let len = self.items.len();
        (0..count).map(move |_| &self.items[rng.random_range(0..len)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SimRng;
    use rand::SeedableRng;

    #[test]
    fn fifo_at_capacity() {
        let mut buf = ReplayBuffer::new(3);
        for i in 0..4 {
            buf.push(i);
        }
        assert_eq!(buf.len(), 3);
        assert!(!buf.iter().any(|&x| x == 0));
        assert_eq!(buf.iter().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn sampling_covers_buffer() {
        let mut buf = ReplayBuffer::new(4);
        for i in 0..4 {
            buf.push(i);
        }
        let mut rng = SimRng::seed_from_u64(1);
        let mut seen = [0usize; 4];
        for &x in buf.sample(&mut rng, 4000) {
            seen[x] += 1;
        }
        assert!(seen.iter().all(|&c| (850..1150).contains(&c)), "{seen:?}");
    }
}
