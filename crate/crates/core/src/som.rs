//! One-dimensional-chain Kohonen network: competitive learning with a
//! shrinking neighborhood.
//!
//! The network is a chain of `k` output neurons, each carrying an
//! `n`-dimensional prototype vector. Training presents one randomly drawn
//! input per step; the neuron whose prototype is nearest in squared Euclidean
//! distance (the best-matching unit, BMU) and every neuron within the current
//! chain radius of it are pulled toward the input:
//!
//! `w_i <- w_i + eta(t) * (x - w_i)`
//!
//! The schedule has two phases. During the ordering phase the learning rate
//! decays linearly from `eta_start` to `eta_floor` and the radius shrinks in
//! equal-length integer stages from `initial_radius` to zero; afterwards only
//! the winner moves, at the constant floor rate. Every neighbor receives the
//! full learning rate by default (flat kernel); a Gaussian falloff is
//! available behind [`NeighborhoodKernel::Gaussian`].
//!
//! Training is fully deterministic given the input order and the seed.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// How initial prototype components are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Uniform over the observed per-dimension data range. Starts the chain
    /// on the data's scale, which orders quickly on microtesla-scale inputs.
    #[default]
    DataRange,
    /// Uniform over `[0, 0.01]` regardless of the data.
    SmallRandom,
}

impl InitMode {
    pub fn token(self) -> &'static str {
        match self {
            InitMode::DataRange => "data-range",
            InitMode::SmallRandom => "small-random",
        }
    }

    pub fn parse_token(s: &str) -> Option<Self> {
        match s {
            "data-range" => Some(InitMode::DataRange),
            "small-random" => Some(InitMode::SmallRandom),
            _ => None,
        }
    }
}

/// Weighting applied to neighbors of the BMU inside the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborhoodKernel {
    /// Every neuron within the radius receives the full learning rate.
    #[default]
    Flat,
    /// Learning rate scaled by `exp(-d^2 / (2 r^2))` for chain distance `d`;
    /// support is still cut off at the radius.
    Gaussian,
}

impl NeighborhoodKernel {
    pub fn token(self) -> &'static str {
        match self {
            NeighborhoodKernel::Flat => "flat",
            NeighborhoodKernel::Gaussian => "gaussian",
        }
    }

    pub fn parse_token(s: &str) -> Option<Self> {
        match s {
            "flat" => Some(NeighborhoodKernel::Flat),
            "gaussian" => Some(NeighborhoodKernel::Gaussian),
            _ => None,
        }
    }
}

/// Network size, training schedule and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SomConfig {
    /// Output neurons (clusters).
    pub k: usize,
    /// Input dimension.
    pub n: usize,
    /// Total training presentations.
    pub epochs: usize,
    /// Presentations spent in the ordering phase.
    pub ordering_steps: usize,
    /// Chain radius at the start of the ordering phase.
    pub initial_radius: usize,
    /// Learning rate at t = 0.
    pub eta_start: f64,
    /// Learning rate after the ordering phase.
    pub eta_floor: f64,
    pub seed: u64,
    pub init: InitMode,
    pub kernel: NeighborhoodKernel,
}

impl Default for SomConfig {
    fn default() -> Self {
        SomConfig {
            k: 5,
            n: 1,
            epochs: 1000,
            ordering_steps: 100,
            initial_radius: 3,
            eta_start: 0.5,
            eta_floor: 0.01,
            seed: 0,
            init: InitMode::default(),
            kernel: NeighborhoodKernel::default(),
        }
    }
}

/// Default presentation count for a dataset of `len` instances.
pub fn default_epochs(len: usize) -> usize {
    (10 * len).max(1000)
}

impl SomConfig {
    pub fn validate(&self) -> Result<(), SomError> {
        if self.k < 1 {
            return Err(SomError::InvalidConfig("k must be at least 1".into()));
        }
        if self.n < 1 {
            return Err(SomError::InvalidConfig("n must be at least 1".into()));
        }
        if self.epochs < 1 {
            return Err(SomError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.ordering_steps > self.epochs {
            return Err(SomError::InvalidConfig(format!(
                "ordering_steps ({}) must not exceed epochs ({})",
                self.ordering_steps, self.epochs
            )));
        }
        if self.initial_radius > self.k - 1 {
            return Err(SomError::InvalidConfig(format!(
                "initial_radius ({}) must not exceed k - 1 ({})",
                self.initial_radius,
                self.k - 1
            )));
        }
        if !(self.eta_start > 0.0 && self.eta_start <= 1.0) {
            return Err(SomError::InvalidConfig(format!(
                "eta_start must lie in (0, 1], found {}",
                self.eta_start
            )));
        }
        if !(self.eta_floor > 0.0 && self.eta_floor <= self.eta_start) {
            return Err(SomError::InvalidConfig(format!(
                "eta_floor must lie in (0, eta_start], found {}",
                self.eta_floor
            )));
        }
        Ok(())
    }

    /// Learning rate at presentation `t`: linear decay from `eta_start` to
    /// `eta_floor` over the ordering phase, then constant `eta_floor`.
    pub fn learning_rate(&self, t: usize) -> f64 {
        if t < self.ordering_steps {
            self.eta_start
                + (self.eta_floor - self.eta_start) * t as f64 / self.ordering_steps as f64
        } else {
            self.eta_floor
        }
    }

    /// Chain radius at presentation `t`: shrinks from `initial_radius` to 0
    /// in equal-length stages across the ordering phase
    /// (stage length `ceil(ordering_steps / (initial_radius + 1))`), zero
    /// afterwards.
    pub fn neighborhood_radius(&self, t: usize) -> usize {
        if t >= self.ordering_steps {
            return 0;
        }
        let stage = self.ordering_steps.div_ceil(self.initial_radius + 1);
        self.initial_radius.saturating_sub(t / stage)
    }
}

/// Training diagnostics: mean squared quantization error before and after,
/// plus the number of update steps performed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingTrace {
    pub qe_initial: f64,
    pub qe_final: f64,
    pub presentations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SomError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid init range: low {low} exceeds high {high}")]
    InvalidRange { low: f64, high: f64 },
    #[error("input has dimension {found}, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("neuron index {index} out of range for {len} neurons")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
}

/// The neuron chain. Prototype `i` belongs to neuron `i`; chain distance
/// between neurons is the index difference.
#[derive(Debug, Clone, PartialEq)]
pub struct SomNetwork {
    prototypes: Vec<Vec<f64>>,
}

impl SomNetwork {
    /// Draw each prototype component independently and uniformly from its
    /// dimension's range (or from `[0, 0.01]` in [`InitMode::SmallRandom`]).
    /// Identical seeds give identical networks.
    pub fn init<R: Rng>(
        config: &SomConfig,
        ranges: &[(f64, f64)],
        rng: &mut R,
    ) -> Result<Self, SomError> {
        config.validate()?;
        if ranges.len() != config.n {
            return Err(SomError::DimensionMismatch {
                expected: config.n,
                found: ranges.len(),
            });
        }
        let small = (0.0, 0.01);
        let mut dists = Vec::with_capacity(config.n);
        for &(low, high) in ranges {
            let (low, high) = match config.init {
                InitMode::DataRange => (low, high),
                InitMode::SmallRandom => small,
            };
            if low > high {
                return Err(SomError::InvalidRange { low, high });
            }
            dists.push(if low == high {
                None // degenerate range: constant
            } else {
                Some(Uniform::new_inclusive(low, high))
            });
        }
        let prototypes = (0..config.k)
            .map(|_| {
                ranges
                    .iter()
                    .zip(&dists)
                    .map(|(&(low, _), dist)| match dist {
                        Some(d) => d.sample(rng),
                        None => match config.init {
                            InitMode::DataRange => low,
                            InitMode::SmallRandom => small.0,
                        },
                    })
                    .collect()
            })
            .collect();
        Ok(SomNetwork { prototypes })
    }

    /// Build a network from explicit prototypes. All vectors must share one
    /// dimension and be finite.
    pub fn from_prototypes(prototypes: Vec<Vec<f64>>) -> Result<Self, SomError> {
        if prototypes.is_empty() {
            return Err(SomError::InvalidConfig(
                "network needs at least one neuron".into(),
            ));
        }
        let n = prototypes[0].len();
        if n == 0 {
            return Err(SomError::InvalidConfig(
                "prototypes must be at least one-dimensional".into(),
            ));
        }
        for w in &prototypes {
            if w.len() != n {
                return Err(SomError::DimensionMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(SomError::NonFiniteInput);
            }
        }
        Ok(SomNetwork { prototypes })
    }

    pub fn neuron_count(&self) -> usize {
        self.prototypes.len()
    }

    pub fn input_dim(&self) -> usize {
        self.prototypes[0].len()
    }

    pub fn prototypes(&self) -> &[Vec<f64>] {
        &self.prototypes
    }

    /// Number of chain steps between neurons `i` and `j`.
    pub fn grid_distance(&self, i: usize, j: usize) -> Result<usize, SomError> {
        let len = self.neuron_count();
        for index in [i, j] {
            if index >= len {
                return Err(SomError::IndexOutOfRange { index, len });
            }
        }
        Ok(i.abs_diff(j))
    }

    fn check_input(&self, x: &[f64]) -> Result<(), SomError> {
        if x.len() != self.input_dim() {
            return Err(SomError::DimensionMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SomError::NonFiniteInput);
        }
        Ok(())
    }

    /// Index of the neuron minimizing the squared Euclidean distance to `x`.
    /// Ties go to the lowest index.
    pub fn find_bmu(&self, x: &[f64]) -> Result<usize, SomError> {
        self.check_input(x)?;
        let mut best = 0;
        let mut best_dist = squared_distance(&self.prototypes[0], x);
        for (i, w) in self.prototypes.iter().enumerate().skip(1) {
            let d = squared_distance(w, x);
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        Ok(best)
    }

    /// The cluster of `x` is its BMU.
    pub fn classify(&self, x: &[f64]) -> Result<usize, SomError> {
        self.find_bmu(x)
    }

    /// Mean squared distance from each input to its BMU prototype.
    pub fn quantization_error(&self, data: &[Vec<f64>]) -> Result<f64, SomError> {
        if data.is_empty() {
            return Err(SomError::EmptyDataset);
        }
        let mut total = 0.0;
        for x in data {
            let bmu = self.find_bmu(x)?;
            total += squared_distance(&self.prototypes[bmu], x);
        }
        Ok(total / data.len() as f64)
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One presentation: pull the BMU and every neuron within the current radius
/// toward `x` by the current learning rate. All other prototypes are
/// untouched.
pub fn train_step(
    network: &mut SomNetwork,
    x: &[f64],
    t: usize,
    config: &SomConfig,
) -> Result<(), SomError> {
    network.check_input(x)?;
    let bmu = network.find_bmu(x)?;
    let radius = config.neighborhood_radius(t);
    let eta = config.learning_rate(t);
    for (i, w) in network.prototypes.iter_mut().enumerate() {
        let dist = i.abs_diff(bmu);
        if dist > radius {
            continue;
        }
        let rate = match config.kernel {
            NeighborhoodKernel::Flat => eta,
            NeighborhoodKernel::Gaussian => {
                if dist == 0 || radius == 0 {
                    eta
                } else {
                    let d = dist as f64;
                    let r = radius as f64;
                    eta * (-d * d / (2.0 * r * r)).exp()
                }
            }
        };
        for (wc, xc) in w.iter_mut().zip(x) {
            *wc += rate * (*xc - *wc);
        }
    }
    Ok(())
}

/// Train a fresh network on `features`: initialize from the observed
/// per-dimension range, then run `config.epochs` presentations, each drawing
/// one input uniformly at random (with replacement) from the seeded stream.
pub fn train(
    features: &[Vec<f64>],
    config: &SomConfig,
) -> Result<(SomNetwork, TrainingTrace), SomError> {
    config.validate()?;
    if features.is_empty() {
        return Err(SomError::EmptyDataset);
    }
    for x in features {
        if x.len() != config.n {
            return Err(SomError::DimensionMismatch {
                expected: config.n,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SomError::NonFiniteInput);
        }
    }

    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); config.n];
    for x in features {
        for (dim, v) in x.iter().enumerate() {
            ranges[dim].0 = ranges[dim].0.min(*v);
            ranges[dim].1 = ranges[dim].1.max(*v);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut network = SomNetwork::init(config, &ranges, &mut rng)?;
    let qe_initial = network.quantization_error(features)?;

    let index_dist = Uniform::new(0, features.len());
    for t in 0..config.epochs {
        let x = &features[index_dist.sample(&mut rng)];
        train_step(&mut network, x, t, config)?;
    }

    let qe_final = network.quantization_error(features)?;
    Ok((
        network,
        TrainingTrace {
            qe_initial,
            qe_final,
            presentations: config.epochs,
        },
    ))
}

const MODEL_HEADER: &str = "som-model v1";
const MODEL_KEYS: [&str; 10] = [
    "k",
    "n",
    "epochs",
    "ordering_steps",
    "initial_radius",
    "eta_start",
    "eta_floor",
    "seed",
    "init",
    "kernel",
];

/// Serialize a trained network and its configuration as the `som-model v1`
/// text format: the header, one `# key=value` comment per config field, then
/// one `index,w_1,...,w_n` line per neuron. Weight components use the
/// shortest decimal representation that parses back to the same `f64`, so a
/// save/load cycle is byte-exact.
pub fn to_model_string(config: &SomConfig, network: &SomNetwork) -> String {
    let mut out = String::with_capacity(256 + network.neuron_count() * 32);
    out.push_str(MODEL_HEADER);
    out.push('\n');
    for key in MODEL_KEYS {
        let value = match key {
            "k" => config.k.to_string(),
            "n" => config.n.to_string(),
            "epochs" => config.epochs.to_string(),
            "ordering_steps" => config.ordering_steps.to_string(),
            "initial_radius" => config.initial_radius.to_string(),
            "eta_start" => config.eta_start.to_string(),
            "eta_floor" => config.eta_floor.to_string(),
            "seed" => config.seed.to_string(),
            "init" => config.init.token().to_string(),
            "kernel" => config.kernel.token().to_string(),
            _ => unreachable!(),
        };
        out.push_str(&format!("# {key}={value}\n"));
    }
    for (i, w) in network.prototypes().iter().enumerate() {
        out.push_str(&i.to_string());
        for component in w {
            out.push(',');
            out.push_str(&component.to_string());
        }
        out.push('\n');
    }
    out
}

fn model_err(line: usize, message: impl Into<String>) -> SomError {
    SomError::ModelFormat {
        line,
        message: message.into(),
    }
}

/// Parse the `som-model v1` text format back into a configuration and
/// network. Requires the header, all ten config keys, and sequentially
/// numbered neuron lines whose count and width match `k` and `n`.
pub fn from_model_string(text: &str) -> Result<(SomConfig, SomNetwork), SomError> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l.trim_end_matches('\r'))
        .ok_or_else(|| model_err(1, "empty model text"))?;
    if header != MODEL_HEADER {
        return Err(model_err(
            1,
            format!("expected `{MODEL_HEADER}` header, found `{header}`"),
        ));
    }

    let mut config = SomConfig::default();
    let mut seen = [false; MODEL_KEYS.len()];
    let mut prototypes: Vec<Vec<f64>> = Vec::new();

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let (key, value) = comment
                .trim()
                .split_once('=')
                .ok_or_else(|| model_err(line_no, "config comment is not `key=value`"))?;
            let slot = MODEL_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| model_err(line_no, format!("unknown config key `{key}`")))?;
            if seen[slot] {
                return Err(model_err(line_no, format!("duplicate config key `{key}`")));
            }
            seen[slot] = true;
            let bad = |what: &str| model_err(line_no, format!("invalid {what} `{value}`"));
            match key {
                "k" => config.k = value.parse().map_err(|_| bad("k"))?,
                "n" => config.n = value.parse().map_err(|_| bad("n"))?,
                "epochs" => config.epochs = value.parse().map_err(|_| bad("epochs"))?,
                "ordering_steps" => {
                    config.ordering_steps = value.parse().map_err(|_| bad("ordering_steps"))?
                }
                "initial_radius" => {
                    config.initial_radius = value.parse().map_err(|_| bad("initial_radius"))?
                }
                "eta_start" => config.eta_start = value.parse().map_err(|_| bad("eta_start"))?,
                "eta_floor" => config.eta_floor = value.parse().map_err(|_| bad("eta_floor"))?,
                "seed" => config.seed = value.parse().map_err(|_| bad("seed"))?,
                "init" => {
                    config.init = InitMode::parse_token(value).ok_or_else(|| bad("init mode"))?
                }
                "kernel" => {
                    config.kernel =
                        NeighborhoodKernel::parse_token(value).ok_or_else(|| bad("kernel"))?
                }
                _ => unreachable!(),
            }
        } else {
            let mut parts = line.split(',');
            let index_text = parts.next().unwrap_or_default();
            let index: usize = index_text
                .parse()
                .map_err(|_| model_err(line_no, format!("invalid neuron index `{index_text}`")))?;
            if index != prototypes.len() {
                return Err(model_err(
                    line_no,
                    format!("expected neuron index {}, found {index}", prototypes.len()),
                ));
            }
            let mut w = Vec::new();
            for part in parts {
                let v: f64 = part.parse().map_err(|_| {
                    model_err(line_no, format!("invalid weight component `{part}`"))
                })?;
                if !v.is_finite() {
                    return Err(model_err(
                        line_no,
                        format!("non-finite weight component `{part}`"),
                    ));
                }
                w.push(v);
            }
            if w.is_empty() {
                return Err(model_err(line_no, "neuron line has no weight components"));
            }
            prototypes.push(w);
        }
    }

    if let Some(slot) = seen.iter().position(|s| !s) {
        return Err(model_err(
            0,
            format!("missing config key `{}`", MODEL_KEYS[slot]),
        ));
    }
    config.validate()?;
    let network = SomNetwork::from_prototypes(prototypes)?;
    if network.neuron_count() != config.k {
        return Err(model_err(
            0,
            format!("{} neuron lines but k={}", network.neuron_count(), config.k),
        ));
    }
    if network.input_dim() != config.n {
        return Err(model_err(
            0,
            format!(
                "neurons have {} components but n={}",
                network.input_dim(),
                config.n
            ),
        ));
    }
    Ok((config, network))
}
