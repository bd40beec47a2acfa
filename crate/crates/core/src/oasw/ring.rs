/// Fixed-capacity history of prediction-correct flags supporting O(1)
/// window-accuracy queries.
///
/// Each slot holds the cumulative number of correct predictions up to and
/// including its position; `evicted` is the cumulative count just before the
/// oldest retained position. Flags are never rewritten once pushed.
#[derive(Debug, Clone)]
pub struct CorrectnessRing {
    cumulative: Vec<u64>,
    capacity: usize,
    pushed: usize,
    evicted: u64,
}

impl CorrectnessRing {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "ring capacity must be positive");
        CorrectnessRing {
            cumulative: Vec::with_capacity(capacity),
            capacity,
            pushed: 0,
            evicted: 0,
        }
    }

    pub fn push(&mut self, correct: bool) {
        let prev = if self.pushed == 0 {
            0
        } else {
            self.cumulative[(self.pushed - 1) % self.capacity]
        };
        let value = prev + correct as u64;
        if self.cumulative.len() < self.capacity {
            self.cumulative.push(value);
        } else {
            let slot = self.pushed % self.capacity;
            self.evicted = self.cumulative[slot];
            self.cumulative[slot] = value;
        }
        self.pushed += 1;
    }

    /// Total flags ever pushed; the next flag gets this position.
    pub fn pushed(&self) -> usize {
        self.pushed
    }

    /// Flags currently retained.
    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn oldest(&self) -> usize {
        self.pushed - self.cumulative.len()
    }

    /// Correct count over positions `[0, pos]`, for `pos >= oldest - 1`.
    fn cumulative_at(&self, pos: isize) -> u64 {
        if pos < 0 {
            return 0;
        }
        let pos = pos as usize;
        if pos + 1 == self.oldest() {
            self.evicted
        } else {
            self.cumulative[pos % self.capacity]
        }
    }

    /// Mean of the `t` flags at positions `(end - t, end]`, or `None` when
    /// they are not all retained.
    pub fn window_accuracy(&self, end: usize, t: usize) -> Option<f64> {
        if t == 0 || end >= self.pushed || end + 1 < t || end + 1 - t < self.oldest() {
            return None;
        }
        let hits = self.cumulative_at(end as isize) - self.cumulative_at(end as isize - t as isize);
        Some(hits as f64 / t as f64)
    }
}
