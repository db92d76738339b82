use super::{plogp, validate_probs, Dmc, Pmf, WiretapBc};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dense tables are capped at 2^24 entries.
pub const TABLE_CAP: usize = 1 << 24;

/// A named finite random variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Self { name: name.into(), size }
    }
}

/// Joint distribution of several named variables, stored dense and row-major
/// (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointPmf {
    axes: Vec<Axis>,
    table: Vec<f64>,
}

#[derive(Deserialize)]
struct RawJoint {
    axes: Vec<Axis>,
    table: Vec<f64>,
}

impl TryFrom<RawJoint> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        JointPmf::new(raw.axes, raw.table)
    }
}

fn table_len(axes: &[Axis]) -> Result<usize> {
    let mut len = 1usize;
    for a in axes {
        if a.size == 0 {
            return Err(Error::InvalidArgument(format!("axis `{}` has an empty alphabet", a.name)));
        }
        len = len
            .checked_mul(a.size)
            .filter(|&l| l <= TABLE_CAP)
            .ok_or(Error::TableTooLarge { entries: len.saturating_mul(a.size), cap: TABLE_CAP })?;
    }
    Ok(len)
}

fn check_names(axes: &[Axis]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::InvalidArgument(format!("duplicate axis `{}`", a.name)));
        }
    }
    Ok(())
}

impl JointPmf {
    pub fn new(axes: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        check_names(&axes)?;
        let len = table_len(&axes)?;
        if table.len() != len {
            return Err(Error::DimensionMismatch(format!("table has {} entries, axes require {len}", table.len())));
        }
        validate_probs(&table)?;
        Ok(Self { axes, table })
    }

    /// Builds a table by evaluating `f` at every multi-index, then validates it.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_names(&axes)?;
        let len = table_len(&axes)?;
        let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            table.push(f(&idx));
            advance(&mut idx, &sizes);
        }
        Self::new(axes, table)
    }

    /// One-axis joint from a pmf.
    pub fn from_pmf(name: &str, p: &Pmf) -> Result<Self> {
        Self::new(vec![Axis::new(name, p.len())], p.probs().to_vec())
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes.iter().position(|a| a.name == name).ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn axis_size(&self, name: &str) -> Result<usize> {
        Ok(self.axes[self.axis_index(name)?].size)
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let idx = names.iter().map(|n| self.axis_index(n)).collect::<Result<Vec<_>>>()?;
        for (i, a) in idx.iter().enumerate() {
            if idx[..i].contains(a) {
                return Err(Error::AxisOverlap(names[i].to_string()));
            }
        }
        Ok(idx)
    }

    /// Probability of one full multi-index.
    pub fn prob(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(index) {
            flat = flat * a.size + i;
        }
        self.table[flat]
    }

    fn marginal_table(&self, keep: &[usize]) -> Vec<f64> {
        let sizes = self.sizes();
        let mut contrib = vec![0usize; sizes.len()];
        let mut stride = 1;
        for &k in keep.iter().rev() {
            contrib[k] = stride;
            stride *= sizes[k];
        }
        let mut out = vec![0.0; stride];
        let mut idx = vec![0usize; sizes.len()];
        let mut o = 0usize;
        for &p in &self.table {
            out[o] += p;
            for ax in (0..sizes.len()).rev() {
                idx[ax] += 1;
                o += contrib[ax];
                if idx[ax] < sizes[ax] {
                    break;
                }
                o -= contrib[ax] * sizes[ax];
                idx[ax] = 0;
            }
        }
        out
    }

    /// Marginal onto `names`, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointPmf> {
        let keep = self.indices(names)?;
        let axes = keep.iter().map(|&k| self.axes[k].clone()).collect();
        Ok(Self { axes, table: self.marginal_table(&keep) })
    }

    /// Joint entropy `H(names)` in bits; the empty set has entropy 0.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Ok(0.0);
        }
        let keep = self.indices(names)?;
        Ok(self.marginal_table(&keep).into_iter().map(plogp).sum())
    }

    /// Conditional mutual information `I(A;B|C)` in bits.
    pub fn conditional_mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        for (x, y) in [(a, b), (a, c), (b, c)] {
            if let Some(n) = x.iter().find(|n| y.contains(n)) {
                return Err(Error::AxisOverlap(n.to_string()));
            }
        }
        // resolve every name up front so unknown axes fail even when a or b is empty
        self.indices(&[a, b, c].concat())?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ac = [a, c].concat();
        let bc = [b, c].concat();
        let abc = [a, b, c].concat();
        let v = self.entropy_of(&ac)? + self.entropy_of(&bc)? - self.entropy_of(&abc)? - self.entropy_of(c)?;
        Ok(v.max(0.0))
    }

    /// `I(A;B)`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.conditional_mi(a, b, &[])
    }

    /// Conditional entropy `H(A|C)`.
    pub fn conditional_entropy(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        let ac = [a, c].concat();
        Ok((self.entropy_of(&ac)? - self.entropy_of(c)?).max(0.0))
    }

    /// Conditions on `name = value`. The axis is kept (as a point mass) so the
    /// result lives on the same index space. Returns `None` for a null event.
    pub fn condition_on(&self, name: &str, value: usize) -> Result<Option<(f64, JointPmf)>> {
        let ax = self.axis_index(name)?;
        let size = self.axes[ax].size;
        if value >= size {
            return Err(Error::InvalidArgument(format!("value {value} outside axis `{name}`")));
        }
        let inner: usize = self.axes[ax + 1..].iter().map(|a| a.size).product();
        let keep = |flat: usize| (flat / inner) % size == value;
        let weight: f64 = self.table.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, p)| p).sum();
        if weight <= 0.0 {
            return Ok(None);
        }
        let table = self.table.iter().enumerate().map(|(i, &p)| if keep(i) { p / weight } else { 0.0 }).collect();
        Ok(Some((weight, Self { axes: self.axes.clone(), table })))
    }

    /// Appends an output axis `output` drawn through `channel` from axis `input`.
    pub fn append_channel(&self, input: &str, output: &str, channel: &Dmc) -> Result<JointPmf> {
        let ax = self.axis_index(input)?;
        if self.has_axis(output) {
            return Err(Error::InvalidArgument(format!("axis `{output}` already present")));
        }
        if self.axes[ax].size != channel.input_size() {
            return Err(Error::DimensionMismatch(format!(
                "axis `{input}` has {} symbols, channel expects {}",
                self.axes[ax].size,
                channel.input_size()
            )));
        }
        let mut axes = self.axes.clone();
        axes.push(Axis::new(output, channel.output_size()));
        table_len(&axes)?;
        let size = self.axes[ax].size;
        let inner: usize = self.axes[ax + 1..].iter().map(|a| a.size).product();
        let m = channel.output_size();
        let mut table = Vec::with_capacity(self.table.len() * m);
        for (i, &p) in self.table.iter().enumerate() {
            let x = (i / inner) % size;
            table.extend(channel.row(x).iter().map(|w| p * w));
        }
        Ok(Self { axes, table })
    }

    /// Appends the three outputs of `ch`, driven by axis `input`, under the
    /// names in `names` (receiver 1, receiver 2, eavesdropper).
    pub fn append_outputs(&self, input: &str, names: [&str; 3], ch: &WiretapBc) -> Result<JointPmf> {
        for n in names {
            if self.has_axis(n) {
                return Err(Error::InvalidArgument(format!("axis `{n}` already present")));
            }
        }
        // the combined output axis is row-major over (y1, y2, z), exactly the
        // layout of three trailing axes, so appending it and renaming suffices
        let mut j = self.append_channel(input, "\u{0}out", &ch.output_channel())?;
        let (n1, n2, nz) = ch.output_sizes();
        j.axes.pop();
        j.axes.push(Axis::new(names[0], n1));
        j.axes.push(Axis::new(names[1], n2));
        j.axes.push(Axis::new(names[2], nz));
        check_names(&j.axes)?;
        Ok(j)
    }

    /// Entropy of the marginal on the axes at positions `idx` (no validation).
    pub(crate) fn entropy_at(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let mut keep = idx.to_vec();
        keep.sort_unstable();
        self.marginal_table(&keep).into_iter().map(plogp).sum()
    }

    /// Joint of two independent tables with disjoint axis names.
    pub fn independent_product(&self, other: &JointPmf) -> Result<JointPmf> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        check_names(&axes)?;
        table_len(&axes)?;
        let table = self.table.iter().flat_map(|&p| other.table.iter().map(move |&q| p * q)).collect();
        Ok(Self { axes, table })
    }

    /// Largest absolute deviation from independence between the two axis groups.
    pub fn independence_defect(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let ab = [a, b].concat();
        let joint = self.marginal(&ab)?;
        let pa = self.marginal(a)?;
        let pb = self.marginal(b)?;
        let nb = pb.table.len();
        Ok(joint
            .table
            .iter()
            .enumerate()
            .map(|(i, &p)| (p - pa.table[i / nb] * pb.table[i % nb]).abs())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn advance(idx: &mut [usize], sizes: &[usize]) {
    for ax in (0..sizes.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < sizes[ax] {
            return;
        }
        idx[ax] = 0;
    }
}
