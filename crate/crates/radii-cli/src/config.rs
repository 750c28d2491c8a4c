//! Run configuration: a flat `key = value` file, every key of which can be
//! overridden by the command-line flag of the same name.

use std::fmt;
use std::str::FromStr;

use clap::Args;
use radii::contraction::{EstimateSettings, ProofOptions};
use radii::continuation::ContinuationConfig;
use radii::certify::PointConfig;
use radii::{ModelParams, SpaceParams};

use crate::CliError;

/// A real that may be absent, written `none`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OptF64(pub Option<f64>);

impl FromStr for OptF64 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "none" | "" => Ok(OptF64(None)),
            t => t.parse::<f64>().map(|v| OptF64(Some(v))).map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for OptF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("none"),
        }
    }
}

macro_rules! run_config {
    ($( $field:ident : $ty:ty = $default:expr, $key:literal, $help:literal; )*) => {
        /// Every knob of a run, fully resolved.
        #[derive(Debug, Clone, PartialEq)]
        pub struct RunConfig {
            $( pub $field: $ty, )*
        }

        impl Default for RunConfig {
            fn default() -> Self {
                RunConfig { $( $field: $default, )* }
            }
        }

        impl RunConfig {
            pub const KEYS: &'static [&'static str] = &[$( $key ),*];

            pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
                match key {
                    $( $key => {
                        self.$field = value.trim().parse::<$ty>().map_err(|e| {
                            CliError::Usage(format!("bad value {value:?} for {key}: {e}"))
                        })?;
                    } )*
                    _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
                }
                Ok(())
            }

            /// `(key, value)` pairs in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$( ($key, self.$field.to_string()), )*]
            }
        }

        /// Command-line overrides, one flag per config key.
        #[derive(Debug, Clone, Default, Args)]
        pub struct Overrides {
            $(
                #[arg(long = $key, help = $help)]
                pub $field: Option<$ty>,
            )*
        }

        impl Overrides {
            pub fn apply(&self, cfg: &mut RunConfig) {
                $( if let Some(v) = &self.$field { cfg.$field = v.clone(); } )*
            }
        }
    };
}

run_config! {
    seed: String = "constant@0.05".into(), "seed", "Seed: constant@D or a point file";
    q: f64 = 2.0, "q", "Decay rate of the weighted space";
    m0: usize = 25, "m0", "Initial number of Galerkin modes";
    ds0: f64 = 1e-3, "ds0", "Initial step size";
    rho: f64 = 10.0, "rho", "Scaling of the d direction in the ball";
    k_tail: usize = 10_000, "K-tail", "Truncation of the tail sums";
    k_sharp_factor: usize = 3, "K-sharp-factor", "K/M for the finite-n constants";
    sharper_tail: OptF64 = OptF64(None), "sharper-tail", "Refined tail bound tolerance, or none";
    sharper_y: bool = true, "sharper-y", "Use the apex-aware defect bound";
    target_r: OptF64 = OptF64(None), "target-r", "Radius tried first, or none";
    stop_d: OptF64 = OptF64(None), "stop-d", "Stop once d passes this value";
    max_steps: usize = 100, "max-steps", "Maximum number of verified segments";
    direction: f64 = -1.0, "direction", "Sign of the initial d velocity";
    ds_up_factor: f64 = 10.0 / 9.0, "ds-up-factor", "Step growth factor";
    ds_down_factor: f64 = 0.9, "ds-down-factor", "Step shrink factor";
    m_up_factor: f64 = 1.02, "m-up-factor", "Mode-count growth factor";
    newton_tol: f64 = 1e-12, "newton-tol", "Corrector residual tolerance";
    newton_max_iter: usize = 20, "newton-max-iter", "Corrector iteration cap";
    r_threshold_ds: f64 = 4.0, "r-threshold-ds", "Grow ds when max I exceeds this multiple of r";
    d_threshold_m: f64 = 1.5, "d-threshold-m", "Shrink m only if it still suffices at d divided by this";
    kernel_ratio: f64 = 1e-10, "kernel-ratio", "Singular value ratio flagging a degenerate kernel";
    max_retries: usize = 30, "max-retries", "Attempts per segment";
    m_max: usize = 400, "m-max", "Largest allowed number of modes";
    ds_min: f64 = 1e-12, "ds-min", "Smallest allowed step";
    a1: f64 = 3.0, "a1", "Model parameter a1";
    a2: f64 = 3.0, "a2", "Model parameter a2";
    b1: f64 = 1.0, "b1", "Model parameter b1";
    b2: f64 = 1.0, "b2", "Model parameter b2";
    r1: f64 = 5.0, "r1", "Model parameter r1";
    r2: f64 = 2.0, "r2", "Model parameter r2";
    beta: f64 = 3.0, "beta", "Model parameter beta";
    eps: f64 = 0.01, "eps", "Model parameter eps";
    big_n: f64 = 1.0, "N", "Model parameter N";
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_into(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&str>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file {
            cfg.parse_into(text)?;
        }
        overrides.apply(&mut cfg);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Usage(m.to_string()));
        if !(self.q > 1.0) {
            return bad("q must exceed 1");
        }
        if !(self.rho > 0.0) {
            return bad("rho must be positive");
        }
        if self.m0 < 4 {
            return bad("m0 must be at least 4");
        }
        if !(self.ds0 > 0.0) {
            return bad("ds0 must be positive");
        }
        if self.k_tail < 2 || self.k_sharp_factor < 2 {
            return bad("K-tail and K-sharp-factor must be at least 2");
        }
        self.params()
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    /// The text form, one `key = value` per line.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            a1: self.a1,
            a2: self.a2,
            b1: self.b1,
            b2: self.b2,
            r1: self.r1,
            r2: self.r2,
            beta: self.beta,
            eps: self.eps,
            big_n: self.big_n,
        }
    }

    pub fn space(&self) -> Result<SpaceParams, CliError> {
        SpaceParams::new(self.q, self.rho).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn estimates(&self) -> EstimateSettings {
        EstimateSettings {
            k_tail: self.k_tail,
            k_sharp_factor: self.k_sharp_factor,
            sharper_tail: self.sharper_tail.0,
        }
    }

    pub fn proof(&self) -> ProofOptions {
        ProofOptions {
            sharper_y: self.sharper_y,
            target_r: self.target_r.0,
        }
    }

    pub fn continuation(&self) -> ContinuationConfig {
        ContinuationConfig {
            ds0: self.ds0,
            m0: self.m0,
            q: self.q,
            rho: self.rho,
            ds_up_factor: self.ds_up_factor,
            ds_down_factor: self.ds_down_factor,
            m_up_factor: self.m_up_factor,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
            r_threshold_ds: self.r_threshold_ds,
            d_threshold_m: self.d_threshold_m,
            kernel_ratio: self.kernel_ratio,
            max_retries: self.max_retries,
            m_max: self.m_max,
            ds_min: self.ds_min,
            params: self.params(),
            estimates: self.estimates(),
            proof: self.proof(),
        }
    }

    pub fn point(&self) -> Result<PointConfig, CliError> {
        Ok(PointConfig {
            space: self.space()?,
            params: self.params(),
            estimates: self.estimates(),
            target_r: self.target_r.0,
        })
    }
}
