use crate::error::{Error, Result};
use crate::probcore::{advance, Axis, JointPmf, TABLE_CAP};
use crate::rng::mixed_row;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Auxiliary names accepted in an [`AuxSpec`].
pub const AUX_NAMES: [&str; 8] = ["T", "Q", "V1", "V2", "U1", "U2", "S1", "S2"];

/// Alphabet sizes of the auxiliary random variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSpec {
    cards: BTreeMap<String, usize>,
}

impl AuxSpec {
    pub fn new<'a>(cards: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, size) in cards {
            if !AUX_NAMES.contains(&name) && name != "U" {
                return Err(Error::InvalidArgument(format!("unknown auxiliary `{name}`")));
            }
            if size == 0 {
                return Err(Error::InvalidArgument(format!("auxiliary `{name}` has cardinality 0")));
            }
            map.insert(name.to_string(), size);
        }
        Ok(Self { cards: map })
    }

    /// Parses `"T=1,Q=2,U1=2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected NAME=SIZE, got `{part}`")))?;
            let v: usize =
                v.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad cardinality in `{part}`")))?;
            pairs.push((k.trim().to_string(), v));
        }
        Self::new(pairs.iter().map(|(k, v)| (k.as_str(), *v)))
    }

    /// Cardinality of `name`. Defaults: 1 for `T`, 4 for the single
    /// auxiliary `U` of the capacity evaluators, 2 otherwise.
    pub fn card(&self, name: &str) -> usize {
        self.cards.get(name).copied().unwrap_or(match name {
            "T" => 1,
            "U" => 4,
            _ => 2,
        })
    }

    pub fn cards(&self) -> &BTreeMap<String, usize> {
        &self.cards
    }
}

/// One variable of a sequential factorization: `P(name | parents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub name: String,
    pub size: usize,
    pub parents: Vec<String>,
}

/// Variables in sampling order; each parent must appear before its child.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelShape {
    vars: Vec<VarSpec>,
}

impl ModelShape {
    pub fn new(vars: Vec<VarSpec>) -> Result<Self> {
        let mut total = 1usize;
        for (i, v) in vars.iter().enumerate() {
            if v.size == 0 {
                return Err(Error::InvalidArgument(format!("variable `{}` has an empty alphabet", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{}`", v.name)));
            }
            for p in &v.parents {
                if !vars[..i].iter().any(|w| &w.name == p) {
                    return Err(Error::InvalidArgument(format!("parent `{p}` of `{}` is not defined earlier", v.name)));
                }
            }
            total = total.saturating_mul(v.size);
        }
        if total > TABLE_CAP {
            return Err(Error::TableTooLarge { entries: total, cap: TABLE_CAP });
        }
        Ok(Self { vars })
    }

    /// Chain over `names`, each variable depending on all earlier ones,
    /// followed by `X` depending on `x_parents` (all auxiliaries if `None`).
    pub fn chain(aux: &AuxSpec, names: &[&str], x_size: usize, x_parents: Option<&[&str]>) -> Result<Self> {
        let mut vars: Vec<VarSpec> = Vec::new();
        for (i, n) in names.iter().enumerate() {
            vars.push(VarSpec {
                name: n.to_string(),
                size: aux.card(n),
                parents: names[..i].iter().map(|s| s.to_string()).collect(),
            });
        }
        let xp = x_parents.unwrap_or(names);
        vars.push(VarSpec { name: "X".into(), size: x_size, parents: xp.iter().map(|s| s.to_string()).collect() });
        Self::new(vars)
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    fn size_of(&self, name: &str) -> usize {
        self.vars.iter().find(|v| v.name == name).map(|v| v.size).unwrap_or(1)
    }

    fn rows_of(&self, v: &VarSpec) -> usize {
        v.parents.iter().map(|p| self.size_of(p)).product()
    }
}

/// A joint law given as a product of conditional probability tables, one per
/// variable of a [`ModelShape`]. Row `r` of a table corresponds to the
/// parent configuration with row-major index `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    shape: ModelShape,
    cpts: Vec<Vec<f64>>,
}

impl FactorModel {
    pub fn new(shape: ModelShape, cpts: Vec<Vec<f64>>) -> Result<Self> {
        if cpts.len() != shape.vars.len() {
            return Err(Error::DimensionMismatch(format!("{} tables for {} variables", cpts.len(), shape.vars.len())));
        }
        for (v, t) in shape.vars.iter().zip(&cpts) {
            let rows = shape.rows_of(v);
            if t.len() != rows * v.size {
                return Err(Error::DimensionMismatch(format!(
                    "table of `{}` has {} entries, expected {}",
                    v.name,
                    t.len(),
                    rows * v.size
                )));
            }
            for r in t.chunks(v.size) {
                crate::probcore::validate_probs(r)?;
            }
        }
        Ok(Self { shape, cpts })
    }

    pub fn shape(&self) -> &ModelShape {
        &self.shape
    }

    pub fn cpts(&self) -> &[Vec<f64>] {
        &self.cpts
    }

    /// Draws every table from a mixture of dependency patterns: rows that
    /// depend on all parents, on a single parent, or on none, each row drawn
    /// by [`mixed_row`].
    pub fn sample<R: Rng + ?Sized>(shape: &ModelShape, rng: &mut R) -> Self {
        let cpts = shape
            .vars
            .iter()
            .map(|v| {
                let rows = shape.rows_of(v);
                let mode = if v.parents.is_empty() { 2 } else { rng.random_range(0..4u8) };
                match mode {
                    0 | 1 => (0..rows).flat_map(|_| mixed_row(rng, v.size)).collect(),
                    2 => {
                        let r = mixed_row(rng, v.size);
                        (0..rows).flat_map(|_| r.iter().copied()).collect()
                    }
                    _ => {
                        let k = rng.random_range(0..v.parents.len());
                        let sizes: Vec<usize> = v.parents.iter().map(|p| shape.size_of(p)).collect();
                        let stride: usize = sizes[k + 1..].iter().product();
                        let per: Vec<Vec<f64>> = (0..sizes[k]).map(|_| mixed_row(rng, v.size)).collect();
                        (0..rows).flat_map(|r| per[(r / stride) % sizes[k]].iter().copied()).collect()
                    }
                }
            })
            .collect();
        Self { shape: shape.clone(), cpts }
    }

    /// Local move: one row of one table is pulled toward a fresh random row.
    pub fn perturb<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        let movable: Vec<usize> = (0..self.shape.vars.len()).filter(|&i| self.shape.vars[i].size > 1).collect();
        if movable.is_empty() {
            return out;
        }
        let f = movable[rng.random_range(0..movable.len())];
        let size = self.shape.vars[f].size;
        let rows = self.cpts[f].len() / size;
        let r = rng.random_range(0..rows);
        let target = mixed_row(rng, size);
        let t = [1.0, 0.5, 0.2, 0.05, 0.01, 0.002][rng.random_range(0..6)];
        for (k, x) in out.cpts[f][r * size..(r + 1) * size].iter_mut().enumerate() {
            *x = (1.0 - t) * *x + t * target[k];
        }
        out
    }

    /// Joint table over the model's variables in shape order.
    pub fn joint(&self) -> Result<JointPmf> {
        let vars = &self.shape.vars;
        let axes: Vec<Axis> = vars.iter().map(|v| Axis::new(v.name.clone(), v.size)).collect();
        let parent_pos: Vec<Vec<usize>> = vars
            .iter()
            .map(|v| v.parents.iter().map(|p| vars.iter().position(|w| &w.name == p).unwrap()).collect())
            .collect();
        let sizes: Vec<usize> = vars.iter().map(|v| v.size).collect();
        let len: usize = sizes.iter().product();
        let mut idx = vec![0usize; sizes.len()];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            let mut p = 1.0;
            for (i, v) in vars.iter().enumerate() {
                let mut row = 0;
                for &q in &parent_pos[i] {
                    row = row * sizes[q] + idx[q];
                }
                p *= self.cpts[i][row * v.size + idx[i]];
                if p == 0.0 {
                    break;
                }
            }
            table.push(p);
            advance(&mut idx, &sizes);
        }
        // long products drift slightly off unit mass
        let total: f64 = table.iter().sum();
        table.iter_mut().for_each(|p| *p /= total);
        JointPmf::new(axes, table)
    }
}
