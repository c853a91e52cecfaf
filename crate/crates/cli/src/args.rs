use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use eecn_core::metrics::ExportFormat;
use eecn_core::Algorithm;

/// Packet-level simulator for multilevel ECN congestion feedback.
#[derive(Debug, Parser)]
#[command(name = "eecn", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its report.
    Run(RunArgs),
    /// Run a scenario once per algorithm with a shared seed.
    Compare(CompareArgs),
    /// Run a scenario once per marking-threshold pair.
    Sweep(SweepArgs),
    /// Check scenario files without running them.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the simulated duration, seconds.
    #[arg(long)]
    pub duration: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here; `-` for stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub format: ExportFormat,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Write the event trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write cwnd, RTT, delivered-bytes and queue-occupancy series as long-form CSV.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Run every flow with this algorithm instead of the one in the file.
    #[arg(long, value_parser = parse_algo)]
    pub algo: Option<Algorithm>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Algorithms to compare, in output order.
    #[arg(long, value_delimiter = ',', default_value = "eecn,ecn,newreno", value_parser = parse_algo)]
    pub algos: Vec<Algorithm>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Threshold pair `TH1:TH2`; repeat for more rows.
    #[arg(long = "pair", value_parser = parse_pair)]
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub scenarios: Vec<PathBuf>,
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse().map_err(|e: eecn_core::Error| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s)
        .ok_or_else(|| format!("unknown algorithm `{s}` (expected eecn, ecn or newreno)"))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}` is not of the form TH1:TH2"))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| format!("`{x}` in `{s}`: {e}"))
    };
    Ok((num(a)?, num(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pair("0.3:0.5"), Ok((0.3, 0.5)));
        assert!(parse_pair("0.3,0.5").is_err());
        assert!(parse_pair("x:0.5").is_err());
    }
}
