//! Experiment configuration shared by flags and JSON files.
//!
//! A config file is one JSON object with a `"command"` field, the parameters
//! of that command, and optionally the global keys. Every parameter is
//! optional at this level; defaults are applied when the command runs, so a
//! parsed config serializes back to exactly what was given.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Trig,
    Chambers,
    Cramer,
    Duality,
    Herman,
    Poi,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Global {
    /// Working precision for multiprecision arithmetic.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<usize>,
    /// Band cache directory; `AMO_CACHE_DIR` or a temp directory otherwise.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long = "out", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension when absent.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Seed for randomized suites and state selection.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const GLOBAL_KEYS: [&str; 5] = ["precision_bits", "cache_dir", "output_path", "format", "seed"];

macro_rules! params {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

params!(RealArgs {
    /// Real input: `p/q`, a decimal, `surd:P,Q,D,R`, `cf:a0;a1,...`, or a named constant.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long)]
    terms: usize,
});

params!(ResonanceArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    terms: usize,
});

params!(ThetaScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    k_max: u64,
});

params!(PointArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    phases: usize,
});

params!(SweepArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    e_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    e_max: f64,
    #[arg(long)]
    n_energies: usize,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    phases: usize,
});

params!(ThoulessArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    /// Approximant `p/q` whose band midpoints carry the density of states.
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    phases: usize,
});

params!(RationalArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
});

params!(GapsArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    /// Frequency for the `kα` gap labels.
    #[arg(long)]
    alpha: String,
});

params!(GapBoundArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    epsilon: f64,
});

params!(ButterflyArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    qmax: u64,
    #[arg(long)]
    svg: PathBuf,
});

params!(MfunArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    e_re: f64,
    /// Zero selects the boundary value `m(E + i0, x)`.
    #[arg(long)]
    e_im: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    n: usize,
});

params!(ReduceArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    n_converge: usize,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    allow_dropped: bool,
});

params!(AdecayArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    n_converge: usize,
    #[arg(long)]
    k_min: usize,
});

params!(LocalizeArgs {
    /// Experiment manifest; explicit parameters override its values.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha_p: i64,
    #[arg(long)]
    alpha_q: i64,
    #[arg(long, value_delimiter = ',')]
    cf_terms: Vec<u64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long = "box")]
    #[serde(rename = "box")]
    box_size: usize,
    #[arg(long)]
    n_states: usize,
});

params!(GreenArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long, allow_hyphen_values = true)]
    x1: i64,
    #[arg(long, allow_hyphen_values = true)]
    x2: i64,
    #[arg(long, allow_hyphen_values = true)]
    x: i64,
    #[arg(long, allow_hyphen_values = true)]
    y: i64,
});

params!(RegularityArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: i64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    m: f64,
});

params!(VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    qmax: u64,
    #[arg(long)]
    cases: usize,
});

params!(DualArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long = "box")]
    #[serde(rename = "box")]
    box_size: usize,
    /// Eigenvalue index in the box, counted from the bottom.
    #[arg(long)]
    state: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    grid: usize,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Continued fraction expansion and convergents.
    Cf(RealArgs),
    /// Finite-scale Liouville exponent.
    Beta(RealArgs),
    /// Resonance class of a scale `k`.
    Resonance(ResonanceArgs),
    /// Search for `2θ ≡ kα` witnesses.
    ThetaScan(ThetaScanArgs),
    /// Lyapunov exponent by transfer-matrix products.
    Lyapunov(PointArgs),
    /// Fibered rotation number and integrated density of states.
    Rotation(PointArgs),
    /// Lyapunov exponent and IDS on an energy grid (CSV).
    Ids(SweepArgs),
    /// Thouless formula with the density of states of a rational approximant.
    Thouless(ThoulessArgs),
    /// Bands of the rational-frequency operator (CSV).
    Bands(RationalArgs),
    /// Gaps with IDS labels (CSV).
    Gaps(GapsArgs),
    /// Smallest gap against the lower bound along convergents.
    GapBound(GapBoundArgs),
    /// Bands for every `p/q` with `q ≤ qmax`; optional SVG.
    Butterfly(ButterflyArgs),
    /// Density-of-states atoms at band midpoints.
    Dos(RationalArgs),
    /// The m-function by forward iteration.
    Mfun(MfunArgs),
    /// Reducibility probe from the rotation angle.
    Reduce(ReduceArgs),
    /// Decay exponent of the rotation-angle Fourier series.
    Adecay(AdecayArgs),
    /// Eigenvector decay experiment (CSV).
    Localize(LocalizeArgs),
    /// One Green's function entry.
    Green(GreenArgs),
    /// `(m, k)`-regularity of a site.
    Regularity(RegularityArgs),
    /// Self-checks against independent oracles.
    Verify(VerifyArgs),
    /// Duality check on a box eigenvector.
    Dual(DualArgs),
}

impl Command {
    pub fn name(&self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m.get("command").and_then(Value::as_str).unwrap_or_default().to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub global: Global,
}

impl ExperimentConfig {
    pub fn to_value(&self) -> Value {
        let mut obj = match serde_json::to_value(&self.command) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        };
        if let Ok(Value::Object(g)) = serde_json::to_value(&self.global) {
            obj.extend(g);
        }
        Value::Object(obj)
    }

    pub fn from_value(v: Value) -> Result<Self, CliError> {
        let Value::Object(mut obj) = v else {
            return Err(CliError::ConfigInvalid("config must be a JSON object".into()));
        };
        let mut g = Map::new();
        for key in GLOBAL_KEYS {
            if let Some(val) = obj.remove(key) {
                g.insert(key.to_string(), val);
            }
        }
        let name = match obj.get("command") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(CliError::ConfigInvalid("\"command\" must be a string".into())),
            None => return Err(CliError::ConfigInvalid("missing \"command\"".into())),
        };
        if !COMMANDS.contains(&name.as_str()) {
            return Err(CliError::UnknownCommand(name));
        }
        let command = serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        let global = serde_json::from_value(Value::Object(g)).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        Ok(Self { command, global })
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(s).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        Self::from_value(v)
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    /// `overlay`'s keys replace `self`'s; the commands must agree.
    pub fn merged(&self, overlay: &Value) -> Result<Self, CliError> {
        let mut base = match self.to_value() {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        if let Value::Object(o) = overlay {
            if let Some(c) = o.get("command") {
                if base.get("command") != Some(c) {
                    return Err(CliError::ConfigInvalid(format!(
                        "command {c} conflicts with the config file's {}",
                        base.get("command").cloned().unwrap_or(Value::Null)
                    )));
                }
            }
            base.extend(o.clone());
        }
        Self::from_value(Value::Object(base))
    }
}

pub const COMMANDS: [&str; 21] = [
    "cf",
    "beta",
    "resonance",
    "theta-scan",
    "lyapunov",
    "rotation",
    "ids",
    "thouless",
    "bands",
    "gaps",
    "gap-bound",
    "butterfly",
    "dos",
    "mfun",
    "reduce",
    "adecay",
    "localize",
    "green",
    "regularity",
    "verify",
    "dual",
];

#[derive(Debug, Parser)]
#[command(name = "amo", version, about = "Almost Mathieu operator experiments")]
pub struct Cli {
    /// JSON experiment config; flags given here override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Option<Command>,
}
