//! JSON scenario description.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error};
use crate::queue::{MarkingMode, QueueConfig, RedParams};
use crate::transport::{Algorithm, TransportConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Dumbbell,
    Multihop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub rate_bps: f64,
    pub delay_s: f64,
}

impl LinkSpec {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if !(self.rate_bps.is_finite() && self.rate_bps > 0.0) {
            return Err(ConfigError::new(
                format!("{path}.rate_bps"),
                "must be positive",
            ));
        }
        if !(self.delay_s.is_finite() && self.delay_s > 0.0) {
            return Err(ConfigError::new(
                format!("{path}.delay_s"),
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Router marking behaviour. `auto` follows the flows: EECN when any flow
/// runs EECN, classic RED/ECN otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouterMode {
    #[default]
    Auto,
    Ecn,
    Eecn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouterSpec {
    pub name: String,
    #[serde(default)]
    pub mode: RouterMode,
    #[serde(default = "default_capacity")]
    pub capacity: u32,
    #[serde(default = "default_th1")]
    pub th1: f64,
    #[serde(default = "default_th2")]
    pub th2: f64,
    #[serde(default)]
    pub red: RedParams,
    #[serde(default = "default_epoch")]
    pub epoch_s: f64,
}

fn default_capacity() -> u32 {
    100
}
fn default_th1() -> f64 {
    0.3
}
fn default_th2() -> f64 {
    0.5
}
fn default_epoch() -> f64 {
    0.1
}

impl RouterSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            mode: RouterMode::Auto,
            capacity: default_capacity(),
            th1: default_th1(),
            th2: default_th2(),
            red: RedParams::default(),
            epoch_s: default_epoch(),
        }
    }

    pub fn queue_config(&self, mode: MarkingMode) -> QueueConfig {
        QueueConfig {
            capacity: self.capacity,
            th1: self.th1,
            th2: self.th2,
            red: self.red,
            mode,
            epoch_s: self.epoch_s,
        }
    }
}

/// Routers in a line with senders on the first and receivers on the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub senders: Vec<String>,
    pub receivers: Vec<String>,
    pub routers: Vec<RouterSpec>,
    /// Host to router links.
    pub edge: LinkSpec,
    /// Router to router links, in path order; one fewer than routers.
    pub core: Vec<LinkSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowClass {
    Elephant,
    Short,
}

impl FlowClass {
    pub fn name(self) -> &'static str {
        match self {
            FlowClass::Elephant => "elephant",
            FlowClass::Short => "short",
        }
    }
}

/// Which end sends the SYN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opener {
    #[default]
    Sender,
    Receiver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub algo: Algorithm,
    /// Data sender; a name from `topology.senders`.
    pub src: String,
    /// Data receiver; a name from `topology.receivers`.
    pub dst: String,
    pub size_bytes: u64,
    pub start_s: f64,
    /// Uniform random delay in `[0, start_jitter_s)` added to the start.
    #[serde(default)]
    pub start_jitter_s: f64,
    #[serde(default)]
    pub opener: Opener,
    /// Bytes sent back from receiver to sender over the same connection.
    #[serde(default)]
    pub reverse_bytes: u64,
    /// Defaults to elephant for transfers of 1 MB or more.
    #[serde(default)]
    pub class: Option<FlowClass>,
    #[serde(default)]
    pub seg_size: Option<u32>,
}

impl FlowSpec {
    pub fn class(&self) -> FlowClass {
        self.class.unwrap_or(if self.size_bytes >= 1_000_000 {
            FlowClass::Elephant
        } else {
            FlowClass::Short
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub duration_s: f64,
    pub topology: TopologySpec,
    #[serde(default)]
    pub transport: TransportConfig,
    pub flows: Vec<FlowSpec>,
}

impl ScenarioConfig {
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "<root>".to_owned()
            } else {
                path
            };
            ConfigError::new(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::from_json_str(&text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(ConfigError::new("duration_s", "must be positive"));
        }
        let t = &self.topology;
        if t.senders.is_empty() {
            return Err(ConfigError::new(
                "topology.senders",
                "at least one sender host is required",
            ));
        }
        if t.receivers.is_empty() {
            return Err(ConfigError::new(
                "topology.receivers",
                "at least one receiver host is required",
            ));
        }
        let min_routers = match t.kind {
            TopologyKind::Dumbbell => 2,
            TopologyKind::Multihop => 3,
        };
        match t.kind {
            TopologyKind::Dumbbell if t.routers.len() != 2 => {
                return Err(ConfigError::new(
                    "topology.routers",
                    "a dumbbell has exactly two routers",
                ))
            }
            TopologyKind::Multihop if t.routers.len() < min_routers => {
                return Err(ConfigError::new(
                    "topology.routers",
                    "a multihop path needs at least three routers",
                ))
            }
            _ => {}
        }
        if t.core.len() + 1 != t.routers.len() {
            return Err(ConfigError::new(
                "topology.core",
                format!("expected {} router-to-router links", t.routers.len() - 1),
            ));
        }
        t.edge.validate("topology.edge")?;
        for (i, l) in t.core.iter().enumerate() {
            l.validate(&format!("topology.core[{i}]"))?;
        }
        let mut seen = HashSet::new();
        let names = t
            .senders
            .iter()
            .enumerate()
            .map(|(i, n)| (format!("topology.senders[{i}]"), n))
            .chain(
                t.receivers
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (format!("topology.receivers[{i}]"), n)),
            )
            .chain(
                t.routers
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (format!("topology.routers[{i}].name"), &r.name)),
            );
        for (path, name) in names {
            if name.is_empty() {
                return Err(ConfigError::new(path, "node name must not be empty"));
            }
            if !seen.insert(name.as_str()) {
                return Err(ConfigError::new(
                    path,
                    format!("duplicate node id `{name}`"),
                ));
            }
        }
        for (i, r) in t.routers.iter().enumerate() {
            r.queue_config(MarkingMode::Eecn)
                .validate(&format!("topology.routers[{i}]"))?;
        }
        self.transport.validate("transport")?;
        for (i, f) in self.flows.iter().enumerate() {
            let path = format!("flows[{i}]");
            if !t.senders.contains(&f.src) {
                return Err(ConfigError::new(
                    format!("{path}.src"),
                    format!("`{}` is not a sender host", f.src),
                ));
            }
            if !t.receivers.contains(&f.dst) {
                return Err(ConfigError::new(
                    format!("{path}.dst"),
                    format!("`{}` is not a receiver host", f.dst),
                ));
            }
            if !(f.start_s.is_finite() && f.start_s >= 0.0) {
                return Err(ConfigError::new(
                    format!("{path}.start_s"),
                    "must be non-negative",
                ));
            }
            if !(f.start_jitter_s.is_finite() && f.start_jitter_s >= 0.0) {
                return Err(ConfigError::new(
                    format!("{path}.start_jitter_s"),
                    "must be non-negative",
                ));
            }
            if f.seg_size == Some(0) {
                return Err(ConfigError::new(
                    format!("{path}.seg_size"),
                    "must be positive",
                ));
            }
        }
        Ok(())
    }

    /// Runs every flow with `algo`.
    pub fn with_algorithm(mut self, algo: Algorithm) -> Self {
        for f in &mut self.flows {
            f.algo = algo;
        }
        self
    }

    /// Sets both marking thresholds on every router.
    pub fn with_thresholds(mut self, th1: f64, th2: f64) -> Self {
        for r in &mut self.topology.routers {
            r.th1 = th1;
            r.th2 = th2;
        }
        self
    }

    /// Resolves a router's configured mode against the flow mix.
    pub fn marking_mode(&self, router: &RouterSpec) -> MarkingMode {
        match router.mode {
            RouterMode::Ecn => MarkingMode::Ecn,
            RouterMode::Eecn => MarkingMode::Eecn,
            RouterMode::Auto => {
                if self.flows.iter().any(|f| f.algo == Algorithm::Eecn) {
                    MarkingMode::Eecn
                } else {
                    MarkingMode::Ecn
                }
            }
        }
    }

    /// Short label for the algorithm mix: a single name or `mixed`.
    pub fn algorithm_label(&self) -> String {
        let mut algos: Vec<_> = self.flows.iter().map(|f| f.algo).collect();
        algos.sort();
        algos.dedup();
        match algos.as_slice() {
            [] => "none".to_owned(),
            [a] => a.name().to_owned(),
            _ => "mixed".to_owned(),
        }
    }
}

/// Builder-style presets mirroring the shipped scenario files.
pub mod presets {
    use super::*;

    fn hosts(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    const EDGE: LinkSpec = LinkSpec {
        rate_bps: 1e9,
        delay_s: 0.001,
    };

    pub fn dumbbell(bottleneck_bps: f64, flows: Vec<FlowSpec>) -> ScenarioConfig {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name: "dumbbell".into(),
            seed: 1,
            duration_s: 60.0,
            topology: TopologySpec {
                kind: TopologyKind::Dumbbell,
                senders: hosts("c", 3),
                receivers: hosts("s", 3),
                routers: vec![RouterSpec::named("ra"), RouterSpec::named("rb")],
                edge: EDGE,
                core: vec![LinkSpec {
                    rate_bps: bottleneck_bps,
                    delay_s: 0.01,
                }],
            },
            transport: TransportConfig::default(),
            flows,
        }
    }

    /// EECN, ECN and EECN routers in a row; the middle hop is the bottleneck.
    pub fn multihop(bottleneck_bps: f64, flows: Vec<FlowSpec>) -> ScenarioConfig {
        let mut r1 = RouterSpec::named("r1");
        r1.mode = RouterMode::Eecn;
        let mut r2 = RouterSpec::named("r2");
        r2.mode = RouterMode::Ecn;
        let mut r3 = RouterSpec::named("r3");
        r3.mode = RouterMode::Eecn;
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name: "multihop".into(),
            seed: 1,
            duration_s: 60.0,
            topology: TopologySpec {
                kind: TopologyKind::Multihop,
                senders: hosts("c", 3),
                receivers: hosts("s", 3),
                routers: vec![r1, r2, r3],
                edge: EDGE,
                core: vec![
                    LinkSpec {
                        rate_bps: bottleneck_bps * 10.0,
                        delay_s: 0.005,
                    },
                    LinkSpec {
                        rate_bps: bottleneck_bps,
                        delay_s: 0.005,
                    },
                ],
            },
            transport: TransportConfig::default(),
            flows,
        }
    }

    pub fn flow(
        algo: Algorithm,
        src: usize,
        dst: usize,
        size_bytes: u64,
        start_s: f64,
    ) -> FlowSpec {
        FlowSpec {
            algo,
            src: format!("c{src}"),
            dst: format!("s{dst}"),
            size_bytes,
            start_s,
            start_jitter_s: 0.0,
            opener: Opener::Sender,
            reverse_bytes: 0,
            class: None,
            seg_size: None,
        }
    }

    /// Two elephants and six receiver-opened short flows of 9 or 16 KB.
    pub fn workload_mix(
        algo: Algorithm,
        elephant_bytes: u64,
        short_starts: [f64; 6],
    ) -> Vec<FlowSpec> {
        let mut flows = vec![
            flow(algo, 0, 0, elephant_bytes, 0.0),
            flow(algo, 1, 1, elephant_bytes, 0.1),
        ];
        for (i, start) in short_starts.into_iter().enumerate() {
            let size = if i % 2 == 0 { 9_000 } else { 16_000 };
            let mut f = flow(algo, 2, 2, size, start);
            f.opener = Opener::Receiver;
            f.start_jitter_s = 0.05;
            flows.push(f);
        }
        flows
    }

    /// The desk-scale dumbbell: 10 Mb/s bottleneck, 10 MB elephants, 60 s.
    pub fn dumbbell_desk(algo: Algorithm) -> ScenarioConfig {
        let mut cfg = dumbbell(
            10e6,
            workload_mix(algo, 10_000_000, [2.0, 4.0, 6.0, 8.0, 11.0, 14.0]),
        );
        cfg.name = "dumbbell-desk".into();
        cfg
    }
}
