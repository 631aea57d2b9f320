//! Row-major multi-index helpers shared by the grid-based algorithms.

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for s in (0..shape.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * shape[s + 1];
    }
    strides
}

pub(crate) fn unravel(mut lin: usize, shape: &[usize], out: &mut [usize]) {
    for s in (0..shape.len()).rev() {
        out[s] = lin % shape[s];
        lin /= shape[s];
    }
}

pub(crate) fn ravel(idx: &[usize], strides: &[usize]) -> usize {
    idx.iter().zip(strides).map(|(i, s)| i * s).sum()
}

/// Cumulative sum along every axis, turning point weights into anchored sums.
pub(crate) fn prefix_sum_in_place(values: &mut [f64], shape: &[usize]) {
    let strides = strides(shape);
    for (s, &stride) in strides.iter().enumerate() {
        for lin in 0..values.len() {
            if (lin / stride) % shape[s] >= 1 {
                values[lin] += values[lin - stride];
            }
        }
    }
}

/// Iterates multi-indices `lo <= idx < hi` in row-major order.
pub(crate) struct Odometer {
    lo: Vec<usize>,
    hi: Vec<usize>,
    cur: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(lo: Vec<usize>, hi: Vec<usize>) -> Self {
        let done = lo.iter().zip(&hi).any(|(l, h)| l >= h);
        Odometer {
            cur: lo.clone(),
            lo,
            hi,
            started: false,
            done,
        }
    }

    pub(crate) fn over(shape: &[usize]) -> Self {
        Self::new(vec![0; shape.len()], shape.to_vec())
    }

    pub(crate) fn next_index(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.cur);
        }
        for s in (0..self.cur.len()).rev() {
            self.cur[s] += 1;
            if self.cur[s] < self.hi[s] {
                return Some(&self.cur);
            }
            self.cur[s] = self.lo[s];
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_visits_row_major() {
        let mut od = Odometer::new(vec![1, 0], vec![3, 2]);
        let mut seen = Vec::new();
        while let Some(i) = od.next_index() {
            seen.push(i.to_vec());
        }
        assert_eq!(seen, vec![vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]);
        assert!(Odometer::new(vec![2], vec![2]).next_index().is_none());
    }

    #[test]
    fn prefix_sum_matches_direct() {
        let shape = [2, 3];
        let mut v = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        prefix_sum_in_place(&mut v, &shape);
        assert_eq!(v, vec![1.0, 3.0, 6.0, 5.0, 12.0, 21.0]);
        let mut idx = [0; 2];
        unravel(4, &shape, &mut idx);
        assert_eq!(idx, [1, 1]);
        assert_eq!(ravel(&idx, &strides(&shape)), 4);
    }
}
