//! Noisy phase-preserving detection `Ŝ = â + ĥ†` and the moment pipeline
//! that removes the added noise.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, normal_moment, DensityMatrix};
use crate::format::{round_sig, sig};
use crate::C64;

/// Moment order used by the reconstruction.
pub const DEFAULT_ORDER: usize = 6;

/// Shots per test run; the experiment used 3×10⁷.
pub const DEFAULT_COUNT: usize = 300_000;

pub const DEFAULT_BLOCK_SIZE: usize = 8192;

/// Rejection sampling gives up below this acceptance rate.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

const BINARY_MAGIC: &[u8; 8] = b"CATSAMP1";

/// Complex amplitudes recorded by the detection chain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSamples {
    pub samples: Vec<C64>,
    pub seed: u64,
    pub n_noise: f64,
}

impl QuadratureSamples {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with a `#` header line followed by `I,Q` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# seed={} n_noise={} count={}",
            self.seed,
            sig(self.n_noise),
            self.samples.len()
        )?;
        writeln!(w, "I,Q")?;
        for s in &self.samples {
            writeln!(w, "{},{}", sig(s.re), sig(s.im))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty sample file".into()))??;
        let (seed, n_noise, count) = parse_header(&header)?;
        match lines.next() {
            Some(Ok(cols)) if cols.trim() == "I,Q" => {}
            _ => return Err(Error::Parse("expected column line `I,Q`".into())),
        }
        let mut samples = Vec::with_capacity(count);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (i, q) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {k}: expected two columns")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {k}: {e}")))
            };
            samples.push(C64::new(parse(i)?, parse(q)?));
        }
        if samples.len() != count {
            return Err(Error::Parse(format!(
                "header announces {count} samples, found {}",
                samples.len()
            )));
        }
        Self::checked(samples, seed, n_noise)
    }

    /// Columnar little-endian binary: magic, seed, n_noise, count, then all
    /// I values followed by all Q values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.n_noise.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for s in &self.samples {
            w.write_all(&s.re.to_le_bytes())?;
        }
        for s in &self.samples {
            w.write_all(&s.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Parse("not a sample file".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let seed = u64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let n_noise = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let count = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| Error::Parse("sample count overflows".into()))?;
        let mut column = |n: usize| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                r.read_exact(&mut word)?;
                out.push(f64::from_le_bytes(word));
            }
            Ok(out)
        };
        let i = column(count)?;
        let q = column(count)?;
        let samples = i.into_iter().zip(q).map(|(a, b)| C64::new(a, b)).collect();
        Self::checked(samples, seed, n_noise)
    }

    fn checked(samples: Vec<C64>, seed: u64, n_noise: f64) -> Result<Self> {
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Parse("non-finite sample".into()));
        }
        Ok(Self {
            samples,
            seed,
            n_noise,
        })
    }
}

fn parse_header(line: &str) -> Result<(u64, f64, usize)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing `#` header".into()))?;
    let mut seed = None;
    let mut n_noise = None;
    let mut count = None;
    for field in body.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
        let err = |e: &dyn std::fmt::Display| Error::Parse(format!("header {k}: {e}"));
        match k {
            "seed" => seed = Some(v.parse::<u64>().map_err(|e| err(&e))?),
            "n_noise" => n_noise = Some(v.parse::<f64>().map_err(|e| err(&e))?),
            "count" => count = Some(v.parse::<usize>().map_err(|e| err(&e))?),
            _ => {}
        }
    }
    match (seed, n_noise, count) {
        (Some(s), Some(n), Some(c)) => Ok((s, n, c)),
        _ => Err(Error::Parse("header needs seed, n_noise and count".into())),
    }
}

/// What a moment table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    /// `⟨(Ŝ†)^m Ŝⁿ⟩` of the detected amplitude (for a vacuum run, `⟨h^m (h†)ⁿ⟩`).
    Raw,
    /// `⟨(a†)^m aⁿ⟩` of the signal mode.
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub value: C64,
    pub stderr: f64,
}

/// Moments indexed by `(m, n)` with `m + n ≤ order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub order: usize,
    pub kind: MomentKind,
    pub entries: BTreeMap<(usize, usize), MomentEntry>,
}

/// Visits `(m, n)` with `m + n ≤ order`, by total order then by `m`.
pub fn moment_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|total| (0..=total).map(move |m| (m, total - m)))
}

impl MomentTable {
    pub fn new(order: usize, kind: MomentKind) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(
            (0, 0),
            MomentEntry {
                value: C64::new(1.0, 0.0),
                stderr: 0.0,
            },
        );
        Self {
            order,
            kind,
            entries,
        }
    }

    pub fn get(&self, m: usize, n: usize) -> Result<MomentEntry> {
        self.entries
            .get(&(m, n))
            .copied()
            .ok_or(Error::MissingMoment(m, n))
    }

    pub fn value(&self, m: usize, n: usize) -> Result<C64> {
        Ok(self.get(m, n)?.value)
    }

    pub fn insert(&mut self, m: usize, n: usize, value: C64, stderr: f64) {
        self.entries.insert((m, n), MomentEntry { value, stderr });
    }

    /// Errors unless every `(m, n)` up to `order` is present.
    pub fn require(&self, order: usize) -> Result<()> {
        for (m, n) in moment_indices(order) {
            self.get(m, n)?;
        }
        Ok(())
    }

    /// Moments of `e^{iφ a†a} ρ e^{−iφ a†a}`: entry `(m, n)` picks up `e^{i(n−m)φ}`.
    pub fn rotate(&self, phi: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&(m, n), e)| {
                let ph = C64::from_polar(1.0, phi * (n as f64 - m as f64));
                (
                    (m, n),
                    MomentEntry {
                        value: e.value * ph,
                        stderr: e.stderr,
                    },
                )
            })
            .collect();
        Self {
            order: self.order,
            kind: self.kind,
            entries,
        }
    }

    pub fn to_record(&self) -> MomentRecord {
        MomentRecord {
            order: self.order,
            kind: self.kind,
            rows: self
                .entries
                .iter()
                .map(|(&(m, n), e)| MomentRow {
                    m,
                    n,
                    re: round_sig(e.value.re),
                    im: round_sig(e.value.im),
                    stderr: round_sig(e.stderr),
                })
                .collect(),
        }
    }

    pub fn from_record(record: &MomentRecord) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for row in &record.rows {
            if row.m + row.n > record.order {
                return Err(Error::Parse(format!(
                    "moment ({}, {}) exceeds order {}",
                    row.m, row.n, record.order
                )));
            }
            if !(row.stderr >= 0.0) || !row.re.is_finite() || !row.im.is_finite() {
                return Err(Error::Parse(format!("bad moment row ({}, {})", row.m, row.n)));
            }
            entries.insert(
                (row.m, row.n),
                MomentEntry {
                    value: C64::new(row.re, row.im),
                    stderr: row.stderr,
                },
            );
        }
        Ok(Self {
            order: record.order,
            kind: record.kind,
            entries,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub order: usize,
    pub kind: MomentKind,
    pub rows: Vec<MomentRow>,
}

/// Sampling controls. Output is a pure function of all fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub count: usize,
    pub seed: u64,
    pub block_size: usize,
    /// Proposal disk radius; chosen from ⟨n⟩ when `None`.
    pub radius: Option<f64>,
}

impl SamplerConfig {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
            radius: None,
        }
    }
}

/// Proposal radius `max(3, √⟨n⟩ + 4)`.
pub fn default_radius(rho: &DensityMatrix) -> f64 {
    let n = normal_moment(rho, 1, 1).re.max(0.0);
    (n.sqrt() + 4.0).max(3.0)
}

/// `⟨β|ρ|β⟩` using the exact projections of |β⟩ onto the truncated space.
pub fn husimi(rho: &DensityMatrix, beta: C64) -> f64 {
    let v = coherent_amplitudes(beta, rho.cutoff());
    v.dotc(&(rho.matrix() * &v)).re
}

/// Draws `count` detected amplitudes `β + w`: β from the Husimi function of
/// ρ, w complex Gaussian with `E|w|² = n_noise`.
pub fn sample_measured(rho: &DensityMatrix, n_noise: f64, config: &SamplerConfig) -> Result<QuadratureSamples> {
    if !(n_noise >= 0.0) || !n_noise.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "n_noise must be non-negative, got {n_noise}"
        )));
    }
    if config.count == 0 || config.block_size == 0 {
        return Err(Error::InvalidParameter(
            "sample count and block size must be positive".into(),
        ));
    }
    let radius = config.radius.unwrap_or_else(|| default_radius(rho));
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("bad proposal radius {radius}")));
    }
    let noise = Normal::new(0.0, (0.5 * n_noise).sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let blocks = config.count.div_ceil(config.block_size);
    let parts: Vec<Result<Vec<C64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = config.block_size.min(config.count - b * config.block_size);
            let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
            rng.set_stream(b as u64);
            sample_block(rho, radius, &noise, len, &mut rng)
        })
        .collect();
    let mut samples = Vec::with_capacity(config.count);
    for part in parts {
        samples.extend(part?);
    }
    Ok(QuadratureSamples {
        samples,
        seed: config.seed,
        n_noise,
    })
}

fn sample_block(
    rho: &DensityMatrix,
    radius: f64,
    noise: &Normal<f64>,
    len: usize,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(len);
    let max_proposals = ((len as f64) / MIN_ACCEPTANCE).ceil() as u64 + 1000;
    let mut proposals = 0u64;
    while out.len() < len {
        if proposals >= max_proposals {
            return Err(Error::LowAcceptance(out.len() as f64 / proposals as f64));
        }
        proposals += 1;
        // uniform point on the disk
        let r = radius * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let beta = C64::from_polar(r, phi);
        let u: f64 = rng.random();
        if u < husimi(rho, beta) {
            let w = C64::new(noise.sample(rng), noise.sample(rng));
            out.push(beta + w);
        }
    }
    Ok(out)
}

/// Empirical `⟨conj(S)^m Sⁿ⟩` with standard errors.
pub fn raw_moments(samples: &QuadratureSamples, order: usize) -> Result<MomentTable> {
    let count = samples.len();
    if count == 0 {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let idx: Vec<(usize, usize)> = moment_indices(order).filter(|&k| k != (0, 0)).collect();
    let mut sum = vec![C64::new(0.0, 0.0); idx.len()];
    let mut sum_sq = vec![0.0; idx.len()];
    let mut pw = vec![C64::new(1.0, 0.0); order + 1];
    let mut cpw = vec![C64::new(1.0, 0.0); order + 1];
    for s in &samples.samples {
        for k in 1..=order {
            pw[k] = pw[k - 1] * s;
            cpw[k] = cpw[k - 1] * s.conj();
        }
        for (slot, &(m, n)) in idx.iter().enumerate() {
            let x = cpw[m] * pw[n];
            sum[slot] += x;
            sum_sq[slot] += x.norm_sqr();
        }
    }
    let nf = count as f64;
    let mut table = MomentTable::new(order, MomentKind::Raw);
    for (slot, &(m, n)) in idx.iter().enumerate() {
        let mean = sum[slot] / nf;
        let stderr = if count > 1 {
            let var = ((sum_sq[slot] - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        table.insert(m, n, mean, stderr);
    }
    Ok(table)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Analytic `⟨h^k (h†)^l⟩ = δ_kl k! (n̄+1)^k` of a thermal mode.
pub fn thermal_noise_moments(n_bar: f64, order: usize) -> Result<MomentTable> {
    if !(n_bar >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal occupation must be non-negative, got {n_bar}"
        )));
    }
    let mut t = MomentTable::new(order, MomentKind::Raw);
    for (k, l) in moment_indices(order).skip(1) {
        let v = if k == l {
            factorial(k) * (n_bar + 1.0).powi(k as i32)
        } else {
            0.0
        };
        t.insert(k, l, C64::new(v, 0.0), 0.0);
    }
    Ok(t)
}

/// Exact signal moments `⟨(a†)^m aⁿ⟩` of ρ, zero stderr.
pub fn normal_moment_table(rho: &DensityMatrix, order: usize) -> MomentTable {
    let mut t = MomentTable::new(order, MomentKind::Signal);
    for (m, n) in moment_indices(order).skip(1) {
        t.insert(m, n, normal_moment(rho, m, n), 0.0);
    }
    t
}

/// Forward binomial composition of signal and noise moments.
pub fn compose_moments(signal: &MomentTable, noise: &MomentTable, order: usize) -> Result<MomentTable> {
    let mut t = MomentTable::new(order, MomentKind::Raw);
    for (m, n) in moment_indices(order).skip(1) {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..=m {
            for j in 0..=n {
                let c = binomial(m, i) * binomial(n, j);
                acc += signal.value(i, j)? * noise.value(m - i, n - j)? * c;
            }
        }
        t.insert(m, n, acc, 0.0);
    }
    Ok(t)
}

/// Noise-free detected moments of ρ behind a thermal noise mode.
pub fn exact_measured_moments(rho: &DensityMatrix, n_bar: f64, order: usize) -> Result<MomentTable> {
    compose_moments(
        &normal_moment_table(rho, order),
        &thermal_noise_moments(n_bar, order)?,
        order,
    )
}

/// Recovers signal moments from detected ones by solving the binomial
/// system in increasing `m + n`. Errors are propagated to first order as if
/// all input moments were independent, which overstates them for moments
/// drawn from the same run; see [`deconvolve_samples`].
pub fn deconvolve(signal_run: &MomentTable, noise_ref: &MomentTable, order: usize) -> Result<MomentTable> {
    let h00 = noise_ref.value(0, 0)?;
    if (h00 - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidParameter("noise reference must have (0,0) = 1".into()));
    }
    let mut out = MomentTable::new(order, MomentKind::Signal);
    for (m, n) in moment_indices(order).skip(1) {
        let s = signal_run.get(m, n)?;
        let mut value = s.value;
        let mut var = s.stderr * s.stderr;
        for i in 0..=m {
            for j in 0..=n {
                if (i, j) == (m, n) {
                    continue;
                }
                let c = binomial(m, i) * binomial(n, j);
                let a = out.get(i, j)?;
                let h = noise_ref.get(m - i, n - j)?;
                value -= a.value * h.value * c;
                var += c * c
                    * (h.value.norm_sqr() * a.stderr * a.stderr
                        + a.value.norm_sqr() * h.stderr * h.stderr);
            }
        }
        out.insert(m, n, value, var.sqrt());
    }
    Ok(out)
}

/// Binomial convolution on dense moment arrays, entry `m·(order+1) + n`.
struct Binomial {
    order: usize,
    c: Vec<f64>,
}

impl Binomial {
    fn new(order: usize) -> Self {
        let w = order + 1;
        let mut c = vec![0.0; w * w];
        for n in 0..w {
            for k in 0..=n {
                c[n * w + k] = binomial(n, k);
            }
        }
        Self { order, c }
    }

    fn at(&self, n: usize, k: usize) -> f64 {
        self.c[n * (self.order + 1) + k]
    }

    /// `(a ⋆ b)_{mn} = Σ C(m,i) C(n,j) a_{ij} b_{m−i,n−j}`.
    fn convolve(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let w = self.order + 1;
        let mut out = vec![C64::new(0.0, 0.0); w * w];
        for (m, n) in moment_indices(self.order) {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..=m {
                for j in 0..=n {
                    acc += a[i * w + j] * b[(m - i) * w + (n - j)] * (self.at(m, i) * self.at(n, j));
                }
            }
            out[m * w + n] = acc;
        }
        out
    }

    /// `g` with `g ⋆ h = δ`; needs `h₀₀ = 1`.
    fn inverse(&self, h: &[C64]) -> Vec<C64> {
        let w = self.order + 1;
        let mut g = vec![C64::new(0.0, 0.0); w * w];
        g[0] = C64::new(1.0, 0.0);
        for (m, n) in moment_indices(self.order).skip(1) {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..=m {
                for j in 0..=n {
                    if (i, j) != (m, n) {
                        acc += g[i * w + j] * h[(m - i) * w + (n - j)] * (self.at(m, i) * self.at(n, j));
                    }
                }
            }
            g[m * w + n] = -acc;
        }
        g
    }

    fn features(&self, s: C64, out: &mut [C64]) {
        let w = self.order + 1;
        let mut pw = vec![C64::new(1.0, 0.0); w];
        let mut cpw = vec![C64::new(1.0, 0.0); w];
        for k in 1..w {
            pw[k] = pw[k - 1] * s;
            cpw[k] = cpw[k - 1] * s.conj();
        }
        for (m, n) in moment_indices(self.order) {
            out[m * w + n] = cpw[m] * pw[n];
        }
    }
}

fn mean_features(b: &Binomial, samples: &[C64]) -> Vec<C64> {
    let w = b.order + 1;
    let partial: Vec<Vec<C64>> = samples
        .par_chunks(DEFAULT_BLOCK_SIZE)
        .map(|chunk| {
            let mut acc = vec![C64::new(0.0, 0.0); w * w];
            let mut f = vec![C64::new(0.0, 0.0); w * w];
            for &s in chunk {
                b.features(s, &mut f);
                for (a, x) in acc.iter_mut().zip(&f) {
                    *a += x;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![C64::new(0.0, 0.0); w * w];
    for p in &partial {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    let nf = samples.len() as f64;
    total.iter().map(|x| x / nf).collect()
}

/// Per-entry variance of the mean of `kernel ⋆ f(S)` over the samples.
fn influence_variance(b: &Binomial, samples: &[C64], kernel: &[C64]) -> Vec<f64> {
    let w = b.order + 1;
    let mean = b.convolve(&mean_features(b, samples), kernel);
    let partial: Vec<Vec<f64>> = samples
        .par_chunks(DEFAULT_BLOCK_SIZE)
        .map(|chunk| {
            let mut acc = vec![0.0; w * w];
            let mut f = vec![C64::new(0.0, 0.0); w * w];
            for &s in chunk {
                b.features(s, &mut f);
                let u = b.convolve(&f, kernel);
                for (k, a) in acc.iter_mut().enumerate() {
                    *a += (u[k] - mean[k]).norm_sqr();
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; w * w];
    for p in &partial {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    let nf = samples.len() as f64;
    total.iter().map(|x| x / ((nf - 1.0).max(1.0) * nf)).collect()
}

/// Recovers signal moments straight from a signal run and a noise
/// reference run. Standard errors come from linearizing the deconvolution
/// around the sample means, so correlations between moments of the same
/// run are accounted for.
pub fn deconvolve_samples(signal: &QuadratureSamples, noise: &QuadratureSamples, order: usize) -> Result<MomentTable> {
    if signal.len() < 2 || noise.len() < 2 {
        return Err(Error::InvalidParameter("deconvolution needs at least two samples per run".into()));
    }
    let b = Binomial::new(order);
    let w = order + 1;
    let s_mean = mean_features(&b, &signal.samples);
    let h_mean = mean_features(&b, &noise.samples);
    let g = b.inverse(&h_mean);
    let mu = b.convolve(&s_mean, &g);
    // δμ = δs ⋆ g − (μ ⋆ g) ⋆ δh
    let var_s = influence_variance(&b, &signal.samples, &g);
    let var_h = influence_variance(&b, &noise.samples, &b.convolve(&mu, &g));
    let mut out = MomentTable::new(order, MomentKind::Signal);
    for (m, n) in moment_indices(order).skip(1) {
        let k = m * w + n;
        out.insert(m, n, mu[k], (var_s[k] + var_h[k]).sqrt());
    }
    Ok(out)
}
