use super::JointPmf;
use crate::error::{Error, Result};

/// Largest `n` accepted by [`ck_identity_check`].
pub const IDENTITY_MAX_N: usize = 4;

/// Checks the telescoping identity
/// `sum_i I(Y_{i+1}^n; X_i | C X^{i-1}) = sum_i I(X^{i-1}; Y_i | C Y_{i+1}^n)`
/// on a joint whose axes are ordered `X_1..X_n, Y_1..Y_n, C`.
/// Returns the absolute difference of the two sums.
pub fn ck_identity_check(joint: &JointPmf) -> Result<f64> {
    let k = joint.axes().len();
    if k < 3 || k % 2 == 0 {
        return Err(Error::DimensionMismatch(format!("expected 2n+1 axes, got {k}")));
    }
    let n = (k - 1) / 2;
    if n > IDENTITY_MAX_N {
        return Err(Error::DimensionMismatch(format!("n = {n} exceeds {IDENTITY_MAX_N}")));
    }
    let names: Vec<&str> = joint.axes().iter().map(|a| a.name.as_str()).collect();
    let xs = &names[..n];
    let ys = &names[n..2 * n];
    let c = names[2 * n];

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        let mut cond_x = vec![c];
        cond_x.extend_from_slice(&xs[..i]);
        lhs += joint.conditional_mi(&ys[i + 1..], &[xs[i]], &cond_x)?;

        let mut cond_y = vec![c];
        cond_y.extend_from_slice(&ys[i + 1..]);
        rhs += joint.conditional_mi(&xs[..i], &[ys[i]], &cond_y)?;
    }
    Ok((lhs - rhs).abs())
}
