use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::thread;

use anyhow::{bail, Context, Result};
use eecn_core::engine::{simulate, RunOptions, ScenarioConfig};
use eecn_core::metrics::{export, ExportFormat, SimReport};
use eecn_core::Algorithm;
use serde::Serialize;

use crate::args::{
    Cli, Command, CompareArgs, OutputArgs, RunArgs, ScenarioArgs, SweepArgs, ValidateArgs,
};
use crate::table::{self, Comparison, Sweep, Table};

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Sweep(a) => sweep(a),
        Command::Validate(a) => validate(a),
    }
}

fn load(a: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&a.scenario)
        .with_context(|| format!("cannot load scenario {}", a.scenario.display()))?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(d) = a.duration {
        cfg.duration_s = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if is_stdout(path) {
        io::stdout().lock().write_all(bytes)?;
        return Ok(());
    }
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Runs every scenario on its own thread; results come back in input order.
fn simulate_all(cfgs: &[ScenarioConfig]) -> Result<Vec<SimReport>> {
    thread::scope(|s| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|cfg| s.spawn(move || simulate(cfg, RunOptions::default())))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                let out = h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))?;
                Ok(out.report)
            })
            .collect()
    })
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = load(&a.scenario)?;
    if let Some(algo) = a.algo {
        cfg = cfg.with_algorithm(algo);
    }
    let out = simulate(
        &cfg,
        RunOptions {
            trace: a.trace.is_some(),
        },
    )?;
    if let Some(path) = &a.trace {
        let trace = out.trace.as_ref().expect("trace was requested");
        let mut w = create(path)?;
        trace.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &a.series {
        let mut w = csv::Writer::from_writer(create(path)?);
        write_series(&out.report, &mut w)?;
        w.flush()?;
    }
    let to_stdout = a.output.report.as_deref().is_some_and(is_stdout);
    if let Some(path) = &a.output.report {
        write_bytes(path, &export(&out.report, a.output.format)?)?;
    }
    if !to_stdout {
        print!("{}", summary(&out.report));
    }
    Ok(())
}

fn write_series<W: Write>(r: &SimReport, w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(["series", "entity", "time_s", "value"])?;
    let mut emit = |series: &str, entity: &str, points: &[[f64; 2]]| -> csv::Result<()> {
        for [t, v] in points {
            w.write_record([series, entity, &t.to_string(), &v.to_string()])?;
        }
        Ok(())
    };
    for f in &r.flows {
        let id = format!("flow{}", f.flow_id);
        emit("cwnd_bytes", &id, &f.cwnd_series.points)?;
        emit("rtt_s", &id, &f.rtt_series.points)?;
        emit("delivered_bytes", &id, &f.delivered_series.points)?;
    }
    for q in &r.queues {
        emit("occupancy_pkts", &q.name, &q.occupancy_series.points)?;
    }
    Ok(())
}

fn summary(r: &SimReport) -> String {
    let t = &r.totals;
    let mut s = format!(
        "{} [{}] seed={} end={:.3}s\n  sent={} dropped={} ({:.3}%) marked={} (cl1={} cl2={})\n",
        r.scenario,
        r.algo,
        r.seed,
        r.end_s,
        t.packets_sent,
        t.packets_dropped,
        t.drop_pct,
        t.packets_marked,
        t.marks_cl1,
        t.marks_cl2
    );
    for (name, c) in [("elephant", &r.elephant), ("short", &r.short)] {
        if c.flows == 0 {
            continue;
        }
        s.push_str(&format!("  {name}: {}/{} completed", c.completed, c.flows));
        if let Some(fct) = c.mean_fct_s {
            s.push_str(&format!(", mean fct {:.3} ms", fct * 1e3));
        }
        if let Some(g) = c.mean_goodput_bps {
            s.push_str(&format!(", goodput {:.3} Mb/s", g / 1e6));
        }
        s.push('\n');
    }
    if let Some(j) = r.jain_elephants {
        s.push_str(&format!("  jain(elephants)={j:.4}\n"));
    }
    s
}

fn write_structured<T: Serialize>(out: &OutputArgs, value: &T, tables: &[&Table]) -> Result<()> {
    let Some(path) = &out.report else {
        return Ok(());
    };
    let bytes = match out.format {
        ExportFormat::Json => {
            let mut b = serde_json::to_vec_pretty(value)?;
            b.push(b'\n');
            b
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(tables[0].csv_header())?;
            for t in tables {
                t.write_csv(&mut w)?;
            }
            w.into_inner().map_err(|e| e.into_error())?
        }
    };
    write_bytes(path, &bytes)
}

fn compare(a: CompareArgs) -> Result<()> {
    let base = load(&a.scenario)?;
    let mut algos: Vec<Algorithm> = Vec::new();
    for algo in a.algos {
        if !algos.contains(&algo) {
            algos.push(algo);
        }
    }
    let cfgs: Vec<_> = algos
        .iter()
        .map(|&al| base.clone().with_algorithm(al))
        .collect();
    for cfg in &cfgs {
        cfg.validate()?;
    }
    let reports = simulate_all(&cfgs)?;

    let mut rows = Table::new("algo", &table::COMPARE_COLUMNS);
    for (algo, r) in algos.iter().zip(&reports) {
        rows.push(table::compare_row(algo.name(), r));
    }
    let mut reductions = Table::new("algo", &table::COMPARE_COLUMNS);
    if let Some(e) = algos.iter().position(|&al| al == Algorithm::Eecn) {
        for (i, baseline) in rows.rows.iter().enumerate() {
            if i != e {
                reductions.push(table::reduction(&rows.rows[e], baseline));
            }
        }
    }
    let cmp = Comparison {
        scenario: base.name.clone(),
        seed: base.seed,
        rows,
        reductions,
    };
    write_structured(&a.output, &cmp, &[&cmp.rows, &cmp.reductions])?;
    if !a.output.report.as_deref().is_some_and(is_stdout) {
        print!("{}", cmp.rows.render(false));
        if !cmp.reductions.rows.is_empty() {
            println!("\nreduction, (baseline - eecn) / baseline:");
            print!("{}", cmp.reductions.render(true));
        }
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let base = load(&a.scenario)?;
    let mut cfgs = Vec::with_capacity(a.pairs.len());
    for &(th1, th2) in &a.pairs {
        if th1.is_nan() || th2.is_nan() || th1 >= th2 {
            bail!("--pair {th1}:{th2}: th1 must be below th2");
        }
        let cfg = base.clone().with_thresholds(th1, th2);
        cfg.validate()?;
        cfgs.push(cfg);
    }
    let reports = simulate_all(&cfgs)?;
    let mut rows = Table::new("thresholds", &table::SWEEP_COLUMNS);
    for (&(th1, th2), r) in a.pairs.iter().zip(&reports) {
        rows.push(table::sweep_row(th1, th2, r));
    }
    let sw = Sweep {
        scenario: base.name.clone(),
        seed: base.seed,
        rows,
    };
    write_structured(&a.output, &sw, &[&sw.rows])?;
    if !a.output.report.as_deref().is_some_and(is_stdout) {
        print!("{}", sw.rows.render(false));
    }
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let mut failed = 0;
    for path in &a.scenarios {
        match ScenarioConfig::load(path) {
            Ok(cfg) => println!(
                "ok {}: {} ({} flows, {} s)",
                path.display(),
                cfg.name,
                cfg.flows.len(),
                cfg.duration_s
            ),
            Err(e) => {
                eprintln!("invalid {}: {e}", path.display());
                failed += 1;
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} scenario files invalid", a.scenarios.len());
    }
    Ok(())
}
