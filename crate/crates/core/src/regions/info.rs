use crate::error::{Error, Result};
use crate::probcore::JointPmf;
use std::cell::RefCell;
use std::collections::HashMap;

/// Information quantities on one joint with memoized marginal entropies.
/// Region formulas reuse the same handful of marginals many times.
pub(crate) struct Info<'a> {
    joint: &'a JointPmf,
    cache: RefCell<HashMap<u64, f64>>,
}

impl<'a> Info<'a> {
    pub fn new(joint: &'a JointPmf) -> Result<Self> {
        if joint.axes().len() > 64 {
            return Err(Error::InvalidArgument("more than 64 axes".into()));
        }
        Ok(Self { joint, cache: RefCell::new(HashMap::new()) })
    }

    fn mask(&self, names: &[&str]) -> Result<u64> {
        let mut m = 0u64;
        for n in names {
            m |= 1 << self.joint.axis_index(n)?;
        }
        Ok(m)
    }

    fn h_mask(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        if let Some(&h) = self.cache.borrow().get(&m) {
            return h;
        }
        let idx: Vec<usize> = (0..64).filter(|i| m >> i & 1 == 1).collect();
        let h = self.joint.entropy_at(&idx);
        self.cache.borrow_mut().insert(m, h);
        h
    }

    /// `H(A|C)`.
    pub fn h(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        let (ma, mc) = (self.mask(a)?, self.mask(c)?);
        Ok((self.h_mask(ma | mc) - self.h_mask(mc)).max(0.0))
    }

    /// `I(A;B|C)`; shared variables between the argument groups are allowed
    /// and handled as set unions.
    pub fn i(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let (ma, mb, mc) = (self.mask(a)?, self.mask(b)?, self.mask(c)?);
        if ma & !mc == 0 || mb & !mc == 0 {
            return Ok(0.0);
        }
        let v = self.h_mask(ma | mc) + self.h_mask(mb | mc) - self.h_mask(ma | mb | mc) - self.h_mask(mc);
        Ok(v.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::{Axis, JointPmf};

    #[test]
    fn matches_joint_methods() {
        let w: Vec<f64> = (1..=12).map(|k| k as f64).collect();
        let t: f64 = w.iter().sum();
        let j = JointPmf::new(
            vec![Axis::new("A", 2), Axis::new("B", 3), Axis::new("C", 2)],
            w.iter().map(|x| x / t).collect(),
        )
        .unwrap();
        let info = Info::new(&j).unwrap();
        let want = j.conditional_mi(&["A"], &["B"], &["C"]).unwrap();
        assert!((info.i(&["A"], &["B"], &["C"]).unwrap() - want).abs() < 1e-15);
        let want = j.conditional_entropy(&["A", "B"], &["C"]).unwrap();
        assert!((info.h(&["B", "A"], &["C"]).unwrap() - want).abs() < 1e-15);
        assert_eq!(info.i(&["A"], &["B"], &["A"]).unwrap(), 0.0);
        assert!(info.i(&["Q"], &["B"], &[]).is_err());
    }
}
