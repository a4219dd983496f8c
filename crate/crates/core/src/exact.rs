//! Exact floating-point accumulation.
//!
//! [`ExactSum`] keeps the running sum as a list of non-overlapping partials
//! (Shewchuk's algorithm), so the represented value is the exact real sum of
//! everything added. [`ExactSum::mean`] then divides that exact sum by a count
//! with a single correct rounding, which makes the mean of `n` copies of `x`
//! come back as exactly `x`.

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a finite value. Non-finite values poison the sum and are the
    /// caller's job to reject.
    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Correctly rounded value of the exact sum.
    pub fn value(&self) -> f64 {
        round_partials(&self.partials)
    }

    /// Correctly rounded `sum / count`. Returns `None` for `count == 0`.
    pub fn mean(&self, count: u64) -> Option<f64> {
        if count == 0 {
            return None;
        }
        let n = count as f64;
        let total = self.value();
        if total == 0.0 {
            // Partials are non-overlapping, so a zero rounding means a zero sum.
            return Some(0.0);
        }
        let mut q = total / n;
        // Walk to the float pair bracketing the exact quotient.
        loop {
            match self.residual_sign(q, n) {
                0 => return Some(q),
                s if s > 0 => {
                    let up = q.next_up();
                    if self.residual_sign(up, n) > 0 {
                        q = up;
                        continue;
                    }
                    return Some(self.nearest(q, up, n));
                }
                _ => {
                    let down = q.next_down();
                    if self.residual_sign(down, n) < 0 {
                        q = down;
                        continue;
                    }
                    return Some(self.nearest(down, q, n));
                }
            }
        }
    }

    /// Picks whichever of `lo < hi` (adjacent floats) is closer to `sum / n`,
    /// ties to even.
    fn nearest(&self, lo: f64, hi: f64, n: f64) -> f64 {
        if self.residual_sign(hi, n) == 0 {
            return hi;
        }
        // sign(2*sum - (lo + hi) * n) compares the quotient against the midpoint.
        let mut terms: Vec<f64> = self.partials.iter().map(|p| 2.0 * p).collect();
        push_neg_product(&mut terms, lo, n);
        push_neg_product(&mut terms, hi, n);
        match sign(round_partials_of(terms)) {
            s if s > 0 => hi,
            s if s < 0 => lo,
            _ => {
                if lo.to_bits() & 1 == 0 {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    /// Exact sign of `sum - q * n`.
    fn residual_sign(&self, q: f64, n: f64) -> i8 {
        let mut terms = self.partials.clone();
        push_neg_product(&mut terms, q, n);
        sign(round_partials_of(terms))
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Pushes `-(a * b)` as an exact two-term expansion.
fn push_neg_product(terms: &mut Vec<f64>, a: f64, b: f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    terms.push(-hi);
    terms.push(-lo);
}

fn round_partials_of(values: Vec<f64>) -> f64 {
    let mut acc = ExactSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

fn round_partials(partials: &[f64]) -> f64 {
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // Half-way case: the remaining partials decide the rounding direction.
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}
