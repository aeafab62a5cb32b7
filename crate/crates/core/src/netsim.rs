//! Throughput-only network model: transmission times at a fixed rate and
//! transfers replayed over piecewise-constant bandwidth traces.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("bandwidth must be positive and finite, got {0} Mbps")]
    NonPositiveBandwidth(f64),
    #[error("trace has no samples")]
    EmptyTrace,
    #[error("trace timestamps must be strictly increasing (sample {0})")]
    NonMonotonicTime(usize),
    #[error("trace end {end} ms must lie after the last sample at {last} ms")]
    BadTraceEnd { end: f64, last: f64 },
    #[error("trace does not cover t = {t} ms (covers [{start}, {end}) ms)")]
    TraceGap { t: f64, start: f64, end: f64 },
    #[error("trace exhausted at {end} ms with {remaining_bits} bits still to send")]
    TraceExhausted { end: f64, remaining_bits: f64 },
    #[error("invalid trace parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown network class `{0}`")]
    UnknownClass(String),
    #[error("trace file error: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace file error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NetError>;

/// Milliseconds to push `bytes` through a link of `mbps` megabits per second.
pub fn transmission_time(bytes: u64, mbps: f64) -> Result<f64> {
    check_rate(mbps)?;
    Ok(bytes as f64 * 8.0 / (mbps * 1e3))
}

fn check_rate(mbps: f64) -> Result<()> {
    if mbps > 0.0 && mbps.is_finite() {
        Ok(())
    } else {
        Err(NetError::NonPositiveBandwidth(mbps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_ms: f64,
    pub mbps: f64,
}

/// Piecewise-constant throughput: sample `i` holds on `[t_i, t_{i+1})` and
/// the last one holds until `end_ms` (which may be infinite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthTrace {
    samples: Vec<Sample>,
    end_ms: f64,
}

/// Outcome of replaying one transfer over a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transfer {
    pub start_ms: f64,
    pub finish_ms: f64,
    pub duration_ms: f64,
}

impl BandwidthTrace {
    pub fn new(samples: Vec<Sample>, end_ms: f64) -> Result<Self> {
        let Some(last) = samples.last() else {
            return Err(NetError::EmptyTrace);
        };
        for (i, s) in samples.iter().enumerate() {
            check_rate(s.mbps)?;
            if !s.t_ms.is_finite() || (i > 0 && s.t_ms <= samples[i - 1].t_ms) {
                return Err(NetError::NonMonotonicTime(i));
            }
        }
        if !(end_ms > last.t_ms) {
            return Err(NetError::BadTraceEnd { end: end_ms, last: last.t_ms });
        }
        Ok(BandwidthTrace { samples, end_ms })
    }

    /// A single rate holding from t = 0 forever.
    pub fn constant(mbps: f64) -> Result<Self> {
        Self::new(vec![Sample { t_ms: 0.0, mbps }], f64::INFINITY)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn start_ms(&self) -> f64 {
        self.samples[0].t_ms
    }

    pub fn end_ms(&self) -> f64 {
        self.end_ms
    }

    pub fn duration_ms(&self) -> f64 {
        self.end_ms - self.start_ms()
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.start_ms() && t < self.end_ms
    }

    fn segment_at(&self, t: f64) -> Result<usize> {
        if !self.covers(t) {
            return Err(NetError::TraceGap { t, start: self.start_ms(), end: self.end_ms });
        }
        Ok(self.samples.partition_point(|s| s.t_ms <= t) - 1)
    }

    fn segment_end(&self, i: usize) -> f64 {
        self.samples.get(i + 1).map_or(self.end_ms, |s| s.t_ms)
    }

    pub fn rate_at(&self, t: f64) -> Result<f64> {
        Ok(self.samples[self.segment_at(t)?].mbps)
    }

    /// Lowest rate of any segment overlapping `[from, to)`.
    pub fn min_rate(&self, from: f64, to: f64) -> Result<f64> {
        let first = self.segment_at(from)?;
        let mut lo = self.samples[first].mbps;
        for s in &self.samples[first + 1..] {
            if s.t_ms >= to {
                break;
            }
            lo = lo.min(s.mbps);
        }
        Ok(lo)
    }

    /// Time-weighted mean rate over the whole (finite) trace.
    pub fn mean_mbps(&self) -> f64 {
        if !self.end_ms.is_finite() {
            return self.samples[0].mbps;
        }
        let total: f64 =
            (0..self.samples.len()).map(|i| self.samples[i].mbps * (self.segment_end(i) - self.samples[i].t_ms)).sum();
        total / self.duration_ms()
    }

    /// Copy of the trace with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let samples = self.samples.iter().map(|s| Sample { t_ms: s.t_ms, mbps: s.mbps * factor }).collect();
        Self::new(samples, self.end_ms)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut samples = Vec::new();
        for row in rdr.deserialize::<Sample>() {
            samples.push(row?);
        }
        // The final sample lasts as long as the interval before it; a
        // single-sample file describes a constant link.
        let end = match samples.len() {
            0 => return Err(NetError::EmptyTrace),
            1 => f64::INFINITY,
            n => 2.0 * samples[n - 1].t_ms - samples[n - 2].t_ms,
        };
        Self::new(samples, end)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Writes the `t_ms,mbps` form. Round-trips through
    /// [`BandwidthTrace::from_csv_reader`] when samples are evenly spaced.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Replays a transfer of `bytes` starting at `t0` over `trace`.
pub fn transfer_over_trace(bytes: u64, trace: &BandwidthTrace, t0: f64) -> Result<Transfer> {
    let mut seg = trace.segment_at(t0)?;
    let mut remaining = bytes as f64 * 8.0;
    let mut t = t0;
    let mut elapsed = 0.0;
    while remaining > 0.0 {
        let rate = trace.samples[seg].mbps * 1e3; // bits per ms
        let seg_end = trace.segment_end(seg);
        let capacity = rate * (seg_end - t);
        if capacity >= remaining {
            elapsed += remaining / rate;
            remaining = 0.0;
        } else {
            remaining -= capacity;
            elapsed += seg_end - t;
            t = seg_end;
            seg += 1;
            if seg >= trace.samples.len() {
                return Err(NetError::TraceExhausted { end: trace.end_ms, remaining_bits: remaining });
            }
        }
    }
    Ok(Transfer { start_ms: t0, finish_ms: t0 + elapsed, duration_ms: elapsed })
}

/// Network classes with their nominal mean throughput.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NetworkClass {
    #[serde(rename = "wired")]
    Wired,
    #[serde(rename = "5g")]
    FiveG,
    #[serde(rename = "4g-lte")]
    FourGLte,
    #[serde(rename = "802.11g")]
    Wifi80211g,
    #[serde(rename = "3g")]
    ThreeG,
}

impl NetworkClass {
    pub const ALL: [NetworkClass; 5] = [
        NetworkClass::Wired,
        NetworkClass::FiveG,
        NetworkClass::FourGLte,
        NetworkClass::Wifi80211g,
        NetworkClass::ThreeG,
    ];

    pub fn mean_mbps(self) -> f64 {
        match self {
            NetworkClass::Wired => 1000.0,
            NetworkClass::FiveG => 100.0,
            NetworkClass::FourGLte => 50.0,
            NetworkClass::Wifi80211g => 20.0,
            NetworkClass::ThreeG => 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NetworkClass::Wired => "wired",
            NetworkClass::FiveG => "5g",
            NetworkClass::FourGLte => "4g-lte",
            NetworkClass::Wifi80211g => "802.11g",
            NetworkClass::ThreeG => "3g",
        }
    }
}

impl fmt::Display for NetworkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetworkClass {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self> {
        NetworkClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| NetError::UnknownClass(s.to_string()))
    }
}

/// Parameters of the synthetic class trace generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSynthOptions {
    /// Log-normal multiplicative jitter; 0 gives a constant trace.
    pub sigma: f64,
    pub step_ms: f64,
}

impl Default for TraceSynthOptions {
    fn default() -> Self {
        TraceSynthOptions { sigma: 0.25, step_ms: 100.0 }
    }
}

/// Seeded trace for `class` covering `[0, duration_ms)`.
///
/// Each step draws a factor `exp(sigma * z)` with `z ~ N(0, 1)`; the samples
/// are then rescaled so the time average equals the class mean exactly.
pub fn synth_class_trace(
    class: NetworkClass,
    duration_ms: f64,
    seed: u64,
    opts: TraceSynthOptions,
) -> Result<BandwidthTrace> {
    if !(duration_ms > 0.0 && duration_ms.is_finite()) {
        return Err(NetError::InvalidParameter(format!("duration {duration_ms} ms")));
    }
    if !(opts.step_ms > 0.0) || !(opts.sigma >= 0.0) {
        return Err(NetError::InvalidParameter("step_ms must be > 0 and sigma >= 0".into()));
    }
    let mean = class.mean_mbps();
    let steps = (duration_ms / opts.step_ms).ceil().max(1.0) as usize;
    let times: Vec<f64> = (0..steps).map(|i| i as f64 * opts.step_ms).collect();
    if opts.sigma == 0.0 {
        return BandwidthTrace::new(vec![Sample { t_ms: 0.0, mbps: mean }], duration_ms);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, opts.sigma).map_err(|e| NetError::InvalidParameter(e.to_string()))?;
    let raw: Vec<f64> = times.iter().map(|_| normal.sample(&mut rng).exp()).collect();
    let weighted: f64 =
        raw.iter().enumerate().map(|(i, f)| f * (times.get(i + 1).copied().unwrap_or(duration_ms) - times[i])).sum();
    let norm = mean * duration_ms / weighted;
    let samples = times.iter().zip(&raw).map(|(&t_ms, f)| Sample { t_ms, mbps: f * norm }).collect();
    BandwidthTrace::new(samples, duration_ms)
}
