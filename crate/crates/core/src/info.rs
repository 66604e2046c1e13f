//! Exact discrete probability machinery: distributions, channels, joint
//! tables, entropies and mutual information.
//!
//! All quantities are computed in nats internally; [`LogBase::Bits`] only
//! rescales at the end.
//!
//! Multi-bit state convention: for an `n`-bit register the integer state `s`
//! stores bit `i` in binary digit `i` of `s` (little-endian). [`Channel::tensor`]
//! follows the same rule: the first factor supplies the low-order digit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute deviation from 1 that constructors repair by renormalizing.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probabilities below this are treated as exact zeros inside logarithms.
pub const LOG_ZERO_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// `-Σ p ln p` over a slice, with `0 ln 0 = 0`.
pub(crate) fn entropy_nats(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > LOG_ZERO_THRESHOLD)
        .map(|&p| -p * p.ln())
        .sum();
    h.max(0.0)
}

fn validate_probs(values: &mut [f64], on_bad_sum: impl Fn(f64) -> Error) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(on_bad_sum(sum));
    }
    if sum != 1.0 {
        values.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(())
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("distribution"));
        }
        validate_probs(&mut probs, |sum| Error::NotNormalized { sum })?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty alphabet");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n, "point mass index {at} outside alphabet of size {n}");
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn entropy(&self, base: LogBase) -> f64 {
        base.from_nats(entropy_nats(&self.probs))
    }

    /// `p_Y = p_X A`.
    pub fn push_forward(&self, channel: &Channel) -> Result<Distribution> {
        if self.alphabet_size() != channel.n_inputs() {
            return Err(Error::DimensionMismatch {
                what: "distribution size vs channel inputs",
                left: self.alphabet_size(),
                right: channel.n_inputs(),
            });
        }
        let mut out = vec![0.0; channel.m_outputs()];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(channel.row(i)) {
                *o += p * a;
            }
        }
        Ok(Distribution { probs: out })
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bare(Vec<f64>),
            Wrapped { probs: Vec<f64> },
        }
        let probs = match Repr::deserialize(d)? {
            Repr::Bare(p) | Repr::Wrapped { probs: p } => p,
        };
        Distribution::new(probs).map_err(serde::de::Error::custom)
    }
}

/// A row-stochastic transition matrix; row `i` is the output distribution
/// given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    n_inputs: usize,
    m_outputs: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_inputs = rows.len();
        if n_inputs == 0 {
            return Err(Error::Empty("channel"));
        }
        let m_outputs = rows[0].len();
        if m_outputs == 0 {
            return Err(Error::Empty("channel row"));
        }
        let mut data = Vec::with_capacity(n_inputs * m_outputs);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != m_outputs {
                return Err(Error::RaggedRow {
                    row,
                    len: r.len(),
                    expected: m_outputs,
                });
            }
            data.extend(r);
        }
        Self::from_flat(n_inputs, m_outputs, data)
    }

    /// Builds a channel from row-major data, validating every row.
    pub fn from_flat(n_inputs: usize, m_outputs: usize, mut data: Vec<f64>) -> Result<Self> {
        if n_inputs == 0 || m_outputs == 0 {
            return Err(Error::Empty("channel"));
        }
        if data.len() != n_inputs * m_outputs {
            return Err(Error::DimensionMismatch {
                what: "flat data length vs n*m",
                left: data.len(),
                right: n_inputs * m_outputs,
            });
        }
        for (row, chunk) in data.chunks_mut(m_outputs).enumerate() {
            if let Some((column, &value)) = chunk
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < 0.0)
            {
                return Err(Error::InvalidEntry { row, column, value });
            }
            validate_probs(chunk, |sum| Error::RowNotStochastic { row, sum })?;
        }
        Ok(Self {
            n_inputs,
            m_outputs,
            data,
        })
    }

    pub(crate) fn from_flat_unchecked(n_inputs: usize, m_outputs: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_inputs * m_outputs);
        Self {
            n_inputs,
            m_outputs,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_flat_unchecked(n, n, data)
    }

    /// Binary symmetric channel with flip probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        crate::error::check_range("p", p, (0.0..=1.0).contains(&p), "[0, 1]")?;
        Ok(Self::from_flat_unchecked(
            2,
            2,
            vec![1.0 - p, p, p, 1.0 - p],
        ))
    }

    /// Channel whose every row equals `d`; the output is independent of the input.
    pub fn constant(n_inputs: usize, d: &Distribution) -> Self {
        let data = d
            .probs()
            .iter()
            .copied()
            .cycle()
            .take(n_inputs * d.alphabet_size())
            .collect();
        Self::from_flat_unchecked(n_inputs, d.alphabet_size(), data)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn m_outputs(&self) -> usize {
        self.m_outputs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m_outputs..(i + 1) * self.m_outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.m_outputs)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m_outputs + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Largest `|Σ_j a_ij - 1|` over rows.
    pub fn max_row_defect(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Serial composition `self` then `next` (matrix product).
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.m_outputs != next.n_inputs {
            return Err(Error::DimensionMismatch {
                what: "first channel outputs vs second channel inputs",
                left: self.m_outputs,
                right: next.n_inputs,
            });
        }
        let m = next.m_outputs;
        let mut data = vec![0.0; self.n_inputs * m];
        for (out_row, row) in data.chunks_mut(m).zip(self.rows()) {
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(next.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Channel::from_flat_unchecked(self.n_inputs, m, data))
    }

    /// Parallel (Kronecker) product. The symbol of `self` is the low-order
    /// digit of the combined index: `input = i_self + n_self * i_other`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let (n1, m1) = (self.n_inputs, self.m_outputs);
        let (n2, m2) = (other.n_inputs, other.m_outputs);
        let n = n1 * n2;
        let m = m1 * m2;
        let mut data = vec![0.0; n * m];
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                let row = &mut data[(i1 + n1 * i2) * m..(i1 + n1 * i2 + 1) * m];
                for j2 in 0..m2 {
                    let b = other.entry(i2, j2);
                    for j1 in 0..m1 {
                        row[j1 + m1 * j2] = self.entry(i1, j1) * b;
                    }
                }
            }
        }
        Channel::from_flat_unchecked(n, m, data)
    }

    /// Tensor power `self ⊗ self ⊗ ... ⊗ self` (`k` factors, `k >= 1`).
    pub fn tensor_power(&self, k: usize) -> Channel {
        assert!(k >= 1, "tensor power needs at least one factor");
        (1..k).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    /// Parses `{"rows": [[...], ...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            rows: Vec<Vec<f64>>,
        }
        let repr: Repr = serde_json::from_str(s)?;
        Channel::new(repr.rows)
    }

    /// Parses one comma-separated row per line; blank lines and `#` comments
    /// are skipped.
    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(s.as_bytes());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|e| {
                        Error::Parse(format!("row {line}: cannot parse {field:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Channel::new(rows)
    }

    /// Loads a channel from a `.json` file or a CSV file (anything else).
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_csv_str(&text)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rows": self.to_rows() })
    }
}

/// Joint table `p(x, y)` with cached marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n: usize,
    m: usize,
    table: Vec<f64>,
    marginal_x: Distribution,
    marginal_y: Distribution,
}

impl JointDistribution {
    /// `table[i][j] = d[i] * c[i][j]`.
    pub fn from_channel(d: &Distribution, c: &Channel) -> Result<Self> {
        if d.alphabet_size() != c.n_inputs() {
            return Err(Error::DimensionMismatch {
                what: "distribution size vs channel inputs",
                left: d.alphabet_size(),
                right: c.n_inputs(),
            });
        }
        let (n, m) = (c.n_inputs(), c.m_outputs());
        let mut table = Vec::with_capacity(n * m);
        for (row, &p) in c.rows().zip(d.probs()) {
            table.extend(row.iter().map(|&a| p * a));
        }
        Ok(Self::from_flat_unchecked(n, m, table))
    }

    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty("joint table"));
        }
        let m = rows[0].len();
        let mut table = Vec::with_capacity(n * m);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != m {
                return Err(Error::RaggedRow {
                    row,
                    len: r.len(),
                    expected: m,
                });
            }
            table.extend(r);
        }
        validate_probs(&mut table, |sum| Error::NotNormalized { sum })?;
        Ok(Self::from_flat_unchecked(n, m, table))
    }

    fn from_flat_unchecked(n: usize, m: usize, table: Vec<f64>) -> Self {
        let mut px = vec![0.0; n];
        let mut py = vec![0.0; m];
        for (i, row) in table.chunks(m).enumerate() {
            for (j, &v) in row.iter().enumerate() {
                px[i] += v;
                py[j] += v;
            }
        }
        Self {
            n,
            m,
            table,
            marginal_x: Distribution { probs: px },
            marginal_y: Distribution { probs: py },
        }
    }

    pub fn marginal_x(&self) -> &Distribution {
        &self.marginal_x
    }

    pub fn marginal_y(&self) -> &Distribution {
        &self.marginal_y
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.m + j]
    }

    pub fn transpose(&self) -> JointDistribution {
        let mut table = vec![0.0; self.n * self.m];
        for i in 0..self.n {
            for j in 0..self.m {
                table[j * self.n + i] = self.get(i, j);
            }
        }
        Self::from_flat_unchecked(self.m, self.n, table)
    }

    pub fn joint_entropy(&self, base: LogBase) -> f64 {
        base.from_nats(entropy_nats(&self.table))
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)`, clamped at zero.
    pub fn mutual_information(&self, base: LogBase) -> f64 {
        let mi = entropy_nats(self.marginal_x.probs()) + entropy_nats(self.marginal_y.probs())
            - entropy_nats(&self.table);
        debug_assert!(mi > -1e-9, "mutual information {mi} is negative");
        base.from_nats(mi.max(0.0))
    }
}

/// `I(X;Y)` for input `d` through `c`, in nats.
pub fn channel_mutual_information(d: &Distribution, c: &Channel) -> Result<f64> {
    Ok(JointDistribution::from_channel(d, c)?.mutual_information(LogBase::Nats))
}

/// Binary entropy `h(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_nats(&[p, 1.0 - p])
}
