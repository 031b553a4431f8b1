use crate::error::{Error, Result};
use crate::model::Metric;

/// Axis-aligned bounding box in feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct Mbr {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Mbr {
    /// Degenerate box around one point.
    pub fn point(p: &[f64]) -> Self {
        Self {
            lo: p.to_vec(),
            hi: p.to_vec(),
        }
    }

    /// Box with explicit corners; `lo[i] <= hi[i]` for every dimension.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a.partial_cmp(b).is_none_or(|o| o.is_gt())) {
            return Err(Error::InvalidArgument("box corners are not ordered".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn expand_point(&mut self, p: &[f64]) {
        for (i, &x) in p.iter().enumerate() {
            self.lo[i] = self.lo[i].min(x);
            self.hi[i] = self.hi[i].max(x);
        }
    }

    pub fn expand(&mut self, other: &Mbr) {
        for i in 0..self.lo.len() {
            self.lo[i] = self.lo[i].min(other.lo[i]);
            self.hi[i] = self.hi[i].max(other.hi[i]);
        }
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().enumerate().all(|(i, &x)| self.lo[i] <= x && x <= self.hi[i])
    }

    pub fn contains(&self, other: &Mbr) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn centre(&self, i: usize) -> f64 {
        0.5 * (self.lo[i] + self.hi[i])
    }

    /// Unchecked lower bound used on hot paths; dimensions must agree.
    pub(crate) fn mindist_unchecked(&self, q: &[f64], metric: Metric) -> f64 {
        metric.fold_gaps(q.iter().enumerate().map(|(i, &x)| {
            if x < self.lo[i] {
                self.lo[i] - x
            } else if x > self.hi[i] {
                x - self.hi[i]
            } else {
                0.0
            }
        }))
    }
}

/// Distance from `q` to the nearest point of `mbr`; 0 inside the box.
///
/// Each per-dimension gap is at most the matching coordinate difference of
/// any contained point, and the gaps are folded exactly like
/// [`Metric::distance`], so the result never exceeds the distance to a
/// point in the box even in floating point.
pub fn mindist(q: &[f64], mbr: &Mbr, metric: Metric) -> Result<f64> {
    if q.len() != mbr.dim() {
        return Err(Error::DimensionMismatch {
            expected: mbr.dim(),
            found: q.len(),
        });
    }
    Ok(mbr.mindist_unchecked(q, metric))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Mbr {
        Mbr::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn inside_is_zero() {
        assert_eq!(mindist(&[0.5, 0.25], &unit(), Metric::L2).unwrap(), 0.0);
        assert_eq!(mindist(&[1.0, 0.0], &unit(), Metric::L2).unwrap(), 0.0);
    }

    #[test]
    fn nearest_corner() {
        assert_eq!(mindist(&[3.0, 4.0], &unit(), Metric::L2).unwrap(), 13f64.sqrt());
        assert_eq!(mindist(&[3.0, 4.0], &unit(), Metric::L1).unwrap(), 5.0);
        assert_eq!(mindist(&[0.5, -2.0], &unit(), Metric::L2).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            mindist(&[1.0], &unit(), Metric::L2),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn expansion_and_containment() {
        let mut b = Mbr::point(&[2.0, 2.0]);
        b.expand_point(&[-1.0, 3.0]);
        assert_eq!(b.lo(), &[-1.0, 2.0]);
        assert_eq!(b.hi(), &[2.0, 3.0]);
        assert!(b.contains_point(&[0.0, 2.5]));
        assert!(!b.contains_point(&[0.0, 3.5]));
        let mut c = unit();
        c.expand(&b);
        assert!(c.contains(&b) && c.contains(&unit()));
        assert!(Mbr::new(vec![1.0], vec![0.0]).is_err());
    }
}
