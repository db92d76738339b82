use super::{plogp, validate_probs, Pmf, SUM_TOL};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Output index of the erasure symbol in [`make_bec`] channels.
pub const BEC_ERASURE: usize = 2;

/// Default cap on the input and output alphabets of a product channel.
pub const PRODUCT_ALPHABET_CAP: usize = 4096;

/// Discrete memoryless channel given by a row-stochastic matrix,
/// `rows[x][y] = P(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Dmc {
    input_size: usize,
    output_size: usize,
    rows: Vec<f64>,
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(Error::InvalidArgument("channel has no input symbols".into()));
        }
        let output_size = rows[0].len();
        let mut flat = Vec::with_capacity(input_size * output_size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != output_size {
                return Err(Error::DimensionMismatch(format!(
                    "row {x} has {} entries, expected {output_size}",
                    row.len()
                )));
            }
            validate_probs(row).map_err(|e| Error::InvalidPmf(format!("row {x}: {e}")))?;
            flat.extend_from_slice(row);
        }
        Ok(Self { input_size, output_size, rows: flat })
    }

    pub(crate) fn from_flat(input_size: usize, output_size: usize, rows: Vec<f64>) -> Self {
        debug_assert_eq!(rows.len(), input_size * output_size);
        Self { input_size, output_size, rows }
    }

    pub fn identity(size: usize) -> Result<Self> {
        make_deterministic(&(0..size).collect::<Vec<_>>(), size)
    }

    /// Channel whose output is a single constant symbol.
    pub fn constant(input_size: usize) -> Result<Self> {
        make_deterministic(&vec![0; input_size], 1)
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.output_size + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.input_size).map(|x| self.row(x).to_vec()).collect()
    }

    /// True when every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        (0..self.input_size).all(|x| {
            let row = self.row(x);
            row.iter().all(|&p| p == 0.0 || p == 1.0) && row.iter().filter(|&&p| p == 1.0).count() == 1
        })
    }

    /// Output law induced by the input law `px`.
    pub fn output_pmf(&self, px: &Pmf) -> Result<Pmf> {
        if px.len() != self.input_size {
            return Err(Error::DimensionMismatch(format!(
                "input pmf has {} symbols, channel expects {}",
                px.len(),
                self.input_size
            )));
        }
        let mut out = vec![0.0; self.output_size];
        for (x, &p) in px.probs().iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.row(x)) {
                *o += p * w;
            }
        }
        Ok(Pmf::normalize(&out).expect("output of a stochastic matrix"))
    }

    /// Kronecker product: input `(x1, x2) -> x1 * n2 + x2`, likewise for outputs.
    pub fn tensor(&self, other: &Dmc) -> Dmc {
        let (n2, m2) = (other.input_size, other.output_size);
        let n = self.input_size * n2;
        let m = self.output_size * m2;
        let mut rows = vec![0.0; n * m];
        for x1 in 0..self.input_size {
            for x2 in 0..n2 {
                let x = x1 * n2 + x2;
                for (y1, &a) in self.row(x1).iter().enumerate() {
                    for (y2, &b) in other.row(x2).iter().enumerate() {
                        rows[x * m + y1 * m2 + y2] = a * b;
                    }
                }
            }
        }
        Dmc::from_flat(n, m, rows)
    }

    /// Largest deviation of any row sum from one.
    pub fn stochasticity_defect(&self) -> f64 {
        (0..self.input_size).map(|x| (self.row(x).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Dmc {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Dmc::new(rows)
    }
}

impl From<Dmc> for Vec<Vec<f64>> {
    fn from(d: Dmc) -> Self {
        d.rows()
    }
}

/// Broadcast channel `X -> (Y1, Y2, Z)` with two legitimate receivers and an
/// eavesdropper.
///
/// The three marginal channels always determine error probabilities and
/// leakage. Quantities that involve two outputs at once (such as
/// `I(X;Y1|Z)`) also depend on how the outputs are coupled; without an
/// explicit coupling the outputs are conditionally independent given X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWbc", into = "RawWbc")]
pub struct WiretapBc {
    pub ch_y1: Dmc,
    pub ch_y2: Dmc,
    pub ch_z: Dmc,
    /// Optional joint law `P(y1, y2, z | x)`, output index `(y1 * |Y2| + y2) * |Z| + z`.
    coupling: Option<Dmc>,
}

/// Serialized form: `{"input_size", "y1", "y2", "z", "coupling"?}`.
#[derive(Serialize, Deserialize)]
struct RawWbc {
    input_size: usize,
    y1: Dmc,
    y2: Dmc,
    z: Dmc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coupling: Option<Dmc>,
}

impl TryFrom<RawWbc> for WiretapBc {
    type Error = Error;

    fn try_from(raw: RawWbc) -> Result<Self> {
        let ch = WiretapBc::new(raw.y1, raw.y2, raw.z)?;
        if ch.input_size() != raw.input_size {
            return Err(Error::DimensionMismatch(format!(
                "input_size {} but channels have {} rows",
                raw.input_size,
                ch.input_size()
            )));
        }
        match raw.coupling {
            Some(c) => ch.with_coupling(c, 1e-6),
            None => Ok(ch),
        }
    }
}

impl From<WiretapBc> for RawWbc {
    fn from(ch: WiretapBc) -> Self {
        RawWbc { input_size: ch.input_size(), y1: ch.ch_y1, y2: ch.ch_y2, z: ch.ch_z, coupling: ch.coupling }
    }
}

/// Legitimate receiver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Y1,
    Y2,
}

impl WiretapBc {
    pub fn new(ch_y1: Dmc, ch_y2: Dmc, ch_z: Dmc) -> Result<Self> {
        let n = ch_y1.input_size();
        if ch_y2.input_size() != n || ch_z.input_size() != n {
            return Err(Error::DimensionMismatch(format!(
                "input sizes differ: y1 {}, y2 {}, z {}",
                n,
                ch_y2.input_size(),
                ch_z.input_size()
            )));
        }
        Ok(Self { ch_y1, ch_y2, ch_z, coupling: None })
    }

    pub fn input_size(&self) -> usize {
        self.ch_y1.input_size()
    }

    /// Output alphabet sizes `(|Y1|, |Y2|, |Z|)`.
    pub fn output_sizes(&self) -> (usize, usize, usize) {
        (self.ch_y1.output_size(), self.ch_y2.output_size(), self.ch_z.output_size())
    }

    pub fn coupling(&self) -> Option<&Dmc> {
        self.coupling.as_ref()
    }

    /// Joint output row `P(y1, y2, z | x)` in the coupling's index order.
    pub fn output_row(&self, x: usize) -> Vec<f64> {
        if let Some(c) = &self.coupling {
            return c.row(x).to_vec();
        }
        let (r1, r2, rz) = (self.ch_y1.row(x), self.ch_y2.row(x), self.ch_z.row(x));
        let mut out = Vec::with_capacity(r1.len() * r2.len() * rz.len());
        for &a in r1 {
            for &b in r2 {
                out.extend(rz.iter().map(|&c| a * b * c));
            }
        }
        out
    }

    /// Joint output law as a channel from X to the triple `(y1, y2, z)`.
    pub fn output_channel(&self) -> Dmc {
        let (n1, n2, nz) = self.output_sizes();
        let n = self.input_size();
        let rows = (0..n).flat_map(|x| self.output_row(x)).collect();
        Dmc::from_flat(n, n1 * n2 * nz, rows)
    }

    /// Attaches a joint output law; its marginals must reproduce the three
    /// channels within `tol` per entry.
    pub fn with_coupling(mut self, joint: Dmc, tol: f64) -> Result<Self> {
        let (n1, n2, nz) = self.output_sizes();
        if joint.input_size() != self.input_size() || joint.output_size() != n1 * n2 * nz {
            return Err(Error::DimensionMismatch(format!(
                "coupling is {}x{}, expected {}x{}",
                joint.input_size(),
                joint.output_size(),
                self.input_size(),
                n1 * n2 * nz
            )));
        }
        for x in 0..self.input_size() {
            let row = joint.row(x);
            let mut m1 = vec![0.0; n1];
            let mut m2 = vec![0.0; n2];
            let mut mz = vec![0.0; nz];
            for (k, &p) in row.iter().enumerate() {
                m1[k / (n2 * nz)] += p;
                m2[(k / nz) % n2] += p;
                mz[k % nz] += p;
            }
            for (name, m, ch) in [("y1", &m1, &self.ch_y1), ("y2", &m2, &self.ch_y2), ("z", &mz, &self.ch_z)] {
                if m.iter().zip(ch.row(x)).any(|(a, b)| (a - b).abs() > tol) {
                    return Err(Error::InvalidArgument(format!(
                        "coupling marginal for {name} differs from the channel at input {x}"
                    )));
                }
            }
        }
        self.coupling = Some(joint);
        Ok(self)
    }

    /// Couples the outputs so that Z is produced from the given receiver's
    /// output through `q`, the other receiver staying conditionally
    /// independent given X. `q` must reproduce `ch_z` within `tol`.
    pub fn with_z_through(self, from: Receiver, q: &Dmc, tol: f64) -> Result<Self> {
        let (n1, n2, nz) = self.output_sizes();
        let src_size = match from {
            Receiver::Y1 => n1,
            Receiver::Y2 => n2,
        };
        if q.input_size() != src_size || q.output_size() != nz {
            return Err(Error::DimensionMismatch(format!(
                "kernel is {}x{}, expected {src_size}x{nz}",
                q.input_size(),
                q.output_size()
            )));
        }
        let n = self.input_size();
        let mut rows = vec![0.0; n * n1 * n2 * nz];
        for x in 0..n {
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    let p = self.ch_y1.prob(x, y1) * self.ch_y2.prob(x, y2);
                    let src = if from == Receiver::Y1 { y1 } else { y2 };
                    for z in 0..nz {
                        rows[((x * n1 + y1) * n2 + y2) * nz + z] = p * q.prob(src, z);
                    }
                }
            }
        }
        let joint = Dmc::from_flat(n, n1 * n2 * nz, rows);
        self.with_coupling(joint, tol)
    }
}

pub fn make_bsc(p: f64) -> Result<Dmc> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "make_bsc", value: p });
    }
    Ok(Dmc::from_flat(2, 2, vec![1.0 - p, p, p, 1.0 - p]))
}

/// Binary erasure channel with outputs `{0, 1, erasure}`.
pub fn make_bec(e: f64) -> Result<Dmc> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::Domain { what: "make_bec", value: e });
    }
    Ok(Dmc::from_flat(2, 3, vec![1.0 - e, 0.0, e, 0.0, 1.0 - e, e]))
}

/// Channel with `y = f[x]` over an output alphabet of `output_size` symbols.
pub fn make_deterministic(f: &[usize], output_size: usize) -> Result<Dmc> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("deterministic map has an empty domain".into()));
    }
    if let Some((x, y)) = f.iter().enumerate().find(|(_, &y)| y >= output_size) {
        return Err(Error::InvalidArgument(format!("f({x}) = {y} outside output alphabet of size {output_size}")));
    }
    let mut rows = vec![0.0; f.len() * output_size];
    for (x, &y) in f.iter().enumerate() {
        rows[x * output_size + y] = 1.0;
    }
    Ok(Dmc::from_flat(f.len(), output_size, rows))
}

/// `I(X;Y) = H(Y) - H(Y|X)` for input law `px` through `w`.
pub fn mutual_information(px: &Pmf, w: &Dmc) -> Result<f64> {
    if px.len() != w.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "input pmf has {} symbols, channel expects {}",
            px.len(),
            w.input_size()
        )));
    }
    Ok(mi_raw(px.probs(), w))
}

/// Unchecked `I(X;Y)` for a probability slice of the right length.
pub(crate) fn mi_raw(px: &[f64], w: &Dmc) -> f64 {
    let mut py = vec![0.0; w.output_size()];
    let mut h_cond = 0.0;
    for (x, &p) in px.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let row = w.row(x);
        for (o, &q) in py.iter_mut().zip(row) {
            *o += p * q;
        }
        h_cond += p * row.iter().map(|&q| plogp(q)).sum::<f64>();
    }
    (py.into_iter().map(plogp).sum::<f64>() - h_cond).max(0.0)
}

/// Channel `X -> Z` obtained by passing the output of `w1` through `q`.
pub fn cascade(w1: &Dmc, q: &Dmc) -> Result<Dmc> {
    if w1.output_size() != q.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "first channel emits {} symbols, second accepts {}",
            w1.output_size(),
            q.input_size()
        )));
    }
    let (n, m) = (w1.input_size(), q.output_size());
    let mut rows = vec![0.0; n * m];
    for x in 0..n {
        for (y, &a) in w1.row(x).iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (z, &b) in q.row(y).iter().enumerate() {
                rows[x * m + z] += a * b;
            }
        }
    }
    let out = Dmc::from_flat(n, m, rows);
    debug_assert!(out.stochasticity_defect() < SUM_TOL);
    Ok(out)
}

/// Product of two wiretap BCs with the default alphabet cap.
pub fn product_wbc(a: &WiretapBc, b: &WiretapBc) -> Result<WiretapBc> {
    product_wbc_with_cap(a, b, PRODUCT_ALPHABET_CAP)
}

/// Product channel over the input pair `(X1, X2)`: receiver 1 sees both
/// factors' first outputs, receiver 2 both second outputs and the
/// eavesdropper both eavesdropper outputs.
pub fn product_wbc_with_cap(a: &WiretapBc, b: &WiretapBc, cap: usize) -> Result<WiretapBc> {
    let check = |what: &str, n1: usize, n2: usize| -> Result<()> {
        match n1.checked_mul(n2) {
            Some(n) if n <= cap => Ok(()),
            _ => Err(Error::CapExceeded(format!("{what} alphabet {n1} x {n2} exceeds {cap}"))),
        }
    };
    check("input", a.input_size(), b.input_size())?;
    for (name, x, y) in
        [("y1 output", &a.ch_y1, &b.ch_y1), ("y2 output", &a.ch_y2, &b.ch_y2), ("z output", &a.ch_z, &b.ch_z)]
    {
        check(name, x.output_size(), y.output_size())?;
    }
    let out = WiretapBc::new(a.ch_y1.tensor(&b.ch_y1), a.ch_y2.tensor(&b.ch_y2), a.ch_z.tensor(&b.ch_z))?;
    if a.coupling.is_none() && b.coupling.is_none() {
        return Ok(out);
    }
    let (a1, a2, az) = a.output_sizes();
    let (b1, b2, bz) = b.output_sizes();
    let (n1, n2, nz) = (a1 * b1, a2 * b2, az * bz);
    let nb = b.input_size();
    let n = a.input_size() * nb;
    let mut rows = vec![0.0; n * n1 * n2 * nz];
    for xa in 0..a.input_size() {
        let ra = a.output_row(xa);
        for xb in 0..nb {
            let rb = b.output_row(xb);
            let base = (xa * nb + xb) * n1 * n2 * nz;
            for (ka, &pa) in ra.iter().enumerate() {
                if pa == 0.0 {
                    continue;
                }
                let (ya1, ya2, yaz) = (ka / (a2 * az), (ka / az) % a2, ka % az);
                for (kb, &pb) in rb.iter().enumerate() {
                    let (yb1, yb2, ybz) = (kb / (b2 * bz), (kb / bz) % b2, kb % bz);
                    let (y1, y2, z) = (ya1 * b1 + yb1, ya2 * b2 + yb2, yaz * bz + ybz);
                    rows[base + (y1 * n2 + y2) * nz + z] += pa * pb;
                }
            }
        }
    }
    out.with_coupling(Dmc::from_flat(n, n1 * n2 * nz, rows), 1e-9)
}
