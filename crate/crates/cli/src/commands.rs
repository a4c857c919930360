use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chibar::cones::{CaseGeometry, CaseId, Region};
use chibar::linalg2::{canonical_whitening, Point2};
use chibar::mc::{
    dkw_bound, ks_distance, ks_two_sample, run_compare, selfliang_reference, simulate,
    CompareConfig, EmpiricalCdf, SimConfig, SimMetadata, SimMode,
};
use chibar::weights::{
    case7_equivalence, case7_weights_ks, case7_weights_sl, case8_any, Mixture, WeightReport,
};
use chibar::ChiBarMixture;
use serde::{Deserialize, Serialize};

use crate::args::{
    CdfArgs, Command, CompareArgs, Format, Mode, ModelArgs, QuantileArgs, RegionsArgs, SimArgs,
    SimulateArgs,
};

pub enum Outcome {
    Pass,
    BandFailure,
}

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Weights(m) => weights(&m),
        Command::Cdf(a) => cdf(&a),
        Command::Quantile(a) => quantile(&a),
        Command::Regions(a) => regions(&a),
        Command::Simulate(a) => with_threads(&a.sim, || simulate_cmd(&a)),
        Command::Compare(a) => with_threads(&a.sim, || compare(&a)),
    }
}

fn with_threads<T: Send>(sim: &SimArgs, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match sim.threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .context("building thread pool")?
            .install(f),
    }
}

fn write_out(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_string<F>(fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// The analytic law for the configured case, or an error for the
/// half-plane variant, which has no closed form.
fn law(m: &ModelArgs) -> Result<WeightReport> {
    match m.case_id() {
        CaseId::Case7 => match &m.info {
            Some(info) => {
                let mut r = case7_weights_sl(info);
                let eq = case7_equivalence(info)?;
                r.p_ks = Some(eq.p_ks);
                r.equivalence = Some(eq.holds);
                Ok(r)
            }
            None => Ok(case7_weights_ks(m.rho())?),
        },
        CaseId::Case8Correct => Ok(case8_any(m.rho(), m.epsilon_multiplier)?),
        CaseId::Case8Selfliang => bail!(
            "the selfliang variant has no closed-form law; use `simulate --variant selfliang`"
        ),
    }
}

fn weights(m: &ModelArgs) -> Result<Outcome> {
    write_out(None, &json(&law(m)?)?)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct CdfPoint {
    x: f64,
    cdf: f64,
}

fn cdf(a: &CdfArgs) -> Result<Outcome> {
    let report = law(&a.model)?;
    let xs: Vec<f64> = if a.x.is_empty() {
        let g = a.grid_points as usize;
        (0..g)
            .map(|i| a.x_max * i as f64 / (g - 1) as f64)
            .collect()
    } else {
        a.x.clone()
    };
    let points: Vec<CdfPoint> = xs
        .into_iter()
        .map(|x| CdfPoint {
            x,
            cdf: report.mixture.cdf(x),
        })
        .collect();
    let body = match a.output.format {
        Format::Json => json(&serde_json::json!({ "law": report, "points": points }))?,
        Format::Csv => csv_string(|w| {
            for p in &points {
                w.serialize(p)?;
            }
            Ok(())
        })?,
    };
    write_out(a.output.out.as_deref(), &body)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct QuantileRow {
    p: f64,
    value: f64,
    /// CDF at `value`, for the round trip.
    cdf_at_value: f64,
    non_monotone: bool,
}

fn quantile(a: &QuantileArgs) -> Result<Outcome> {
    let report = law(&a.model)?;
    let rows: Vec<QuantileRow> =
        a.p.iter()
            .map(|&p| {
                let (value, non_monotone) = match &report.mixture {
                    Mixture::Proper(m) => (m.quantile(p)?, false),
                    Mixture::Corrected(c) => {
                        let q = c.quantile(p)?;
                        (q.value, q.non_monotone)
                    }
                };
                Ok(QuantileRow {
                    p,
                    value,
                    cdf_at_value: report.mixture.cdf(value),
                    non_monotone,
                })
            })
            .collect::<Result<_>>()?;
    let body = match a.output.format {
        Format::Json => json(&serde_json::json!({ "law": report, "quantiles": rows }))?,
        Format::Csv => csv_string(|w| {
            for r in &rows {
                w.serialize(r)?;
            }
            Ok(())
        })?,
    };
    write_out(a.output.out.as_deref(), &body)?;
    Ok(Outcome::Pass)
}

#[derive(Deserialize)]
struct PointRow {
    z1: f64,
    z2: f64,
}

#[derive(Serialize)]
struct RegionRow {
    z1: f64,
    z2: f64,
    region: Region,
    lrs: f64,
}

fn read_points(path: &PathBuf) -> Result<Vec<PointRow>> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(path)
            .with_context(|| format!("opening {}", path.display()))?
            .read_to_string(&mut text)?;
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| r.context("reading z1,z2 row"))
        .collect()
}

fn regions(a: &RegionsArgs) -> Result<Outcome> {
    let geom = CaseGeometry::new(a.model.case_id(), a.model.rho())?;
    let whiten = a.model.info.as_ref().map(canonical_whitening);
    let rows: Vec<RegionRow> = read_points(&a.points)?
        .into_iter()
        .map(|p| {
            let raw = Point2::new(p.z1, p.z2);
            let z = whiten.map_or(raw, |w| w.apply(raw));
            Ok(RegionRow {
                z1: p.z1,
                z2: p.z2,
                region: geom.classify(z).region,
                lrs: geom.lrs_whitened(z)?,
            })
        })
        .collect::<Result<_>>()?;
    let body = match a.format {
        Format::Json => json(&rows)?,
        Format::Csv => csv_string(|w| {
            for r in &rows {
                w.serialize(r)?;
            }
            Ok(())
        })?,
    };
    write_out(a.out.as_deref(), &body)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SimulateSummary {
    config: SimConfig,
    metadata: SimMetadata,
    region_counts: BTreeMap<Region, u64>,
    region_frequencies: BTreeMap<Region, f64>,
    negative_count: u64,
    quantiles: BTreeMap<String, f64>,
    dkw_bound: f64,
    /// KS distance of the ECDF to each overlay.
    ks: BTreeMap<String, f64>,
}

fn simulate_cmd(a: &SimulateArgs) -> Result<Outcome> {
    let m = &a.model;
    let rho = m.rho();
    let mode = match a.mode {
        Mode::Score => SimMode::ScoreLevel,
        Mode::Data => SimMode::DataLevel,
    };
    let cfg = SimConfig::new(mode, m.case_id(), rho, a.sim.seed)
        .with_reps(a.sim.reps as usize)
        .with_sample_size(a.sim.sample_size as usize);
    let res = simulate(&cfg)?;
    let ecdf = EmpiricalCdf::new(&res.lrs_samples)?;

    let mut quantiles = BTreeMap::new();
    for p in [0.90, 0.95, 0.99] {
        quantiles.insert(format!("{p:.2}"), ecdf.quantile(p)?);
    }

    // Overlays: the analytic law for the case, and for Case 8 also the 50:50
    // mixture and the simulated half-plane law.
    let analytic = match cfg.case_id {
        CaseId::Case7 => Some(("chibar", case7_weights_ks(rho)?.mixture)),
        _ => {
            let l = case8_any(rho, m.epsilon_multiplier)?;
            let name = if rho < 0.0 { "corrected" } else { "chibar" };
            Some((name, l.mixture))
        }
    };
    let fifty = Mixture::Proper(ChiBarMixture::fifty_fifty());
    let selfliang = if cfg.case_id.is_case8() {
        Some(selfliang_reference(rho, cfg.reps, cfg.seed)?)
    } else {
        None
    };

    let mut ks = BTreeMap::new();
    if let Some((name, law)) = &analytic {
        ks.insert(name.to_string(), ks_distance(&ecdf, |x| law.cdf(x)));
    }
    if cfg.case_id.is_case8() {
        ks.insert("fifty_fifty".into(), ks_distance(&ecdf, |x| fifty.cdf(x)));
    }
    if let Some(sl) = &selfliang {
        ks.insert("selfliang".into(), ks_two_sample(&ecdf, sl));
    }

    let reps = res.lrs_samples.len() as f64;
    let summary = SimulateSummary {
        config: cfg,
        metadata: res.metadata.clone(),
        region_frequencies: res
            .region_counts
            .iter()
            .map(|(&r, &c)| (r, c as f64 / reps))
            .collect(),
        region_counts: res.region_counts.clone(),
        negative_count: res.negative_count,
        quantiles,
        dkw_bound: dkw_bound(cfg.reps, 0.01),
        ks,
    };
    write_out(a.out.as_deref(), &json(&summary)?)?;

    if let Some(path) = &a.grid_csv {
        let hi = (1.2 * ecdf.quantile(0.999)?).max(1.0);
        let g = a.grid_points as usize;
        let body = csv_string(|w| {
            w.write_record(["x", "ecdf", "f_corr", "f_selfliang", "f_5050"])?;
            for i in 0..g {
                let x = hi * i as f64 / (g - 1) as f64;
                let f_corr = analytic.as_ref().map_or(f64::NAN, |(_, l)| l.cdf(x));
                let f_sl = selfliang.as_ref().map_or(f64::NAN, |e| e.eval(x));
                w.write_record([
                    x.to_string(),
                    ecdf.eval(x).to_string(),
                    f_corr.to_string(),
                    f_sl.to_string(),
                    fifty.cdf(x).to_string(),
                ])?;
            }
            Ok(())
        })?;
        write_out(Some(path), &body)?;
    }
    if let Some(path) = &a.samples_csv {
        let geom = CaseGeometry::new(cfg.case_id, rho)?;
        let body = csv_string(|w| {
            w.write_record(["index", "lrs", "region"])?;
            for (i, (x, z)) in res.lrs_samples.iter().zip(&res.scores).enumerate() {
                let region = geom.classify(*z).region;
                w.write_record([i.to_string(), x.to_string(), region.to_string()])?;
            }
            Ok(())
        })?;
        write_out(Some(path), &body)?;
    }
    Ok(Outcome::Pass)
}

fn compare(a: &CompareArgs) -> Result<Outcome> {
    let cfg = CompareConfig {
        reps: a.sim.reps as usize,
        sample_size: a.sim.sample_size as usize,
        epsilon_multiplier: a.epsilon_multiplier,
        ..CompareConfig::new(a.rho, a.sim.seed)
    };
    let report = run_compare(&cfg)?;
    write_out(a.out.as_deref(), &json(&report)?)?;
    if report.pass {
        Ok(Outcome::Pass)
    } else {
        eprintln!(
            "band failure: {} ks {:.6} (bound {:.6}), max |F_n(x_p) - p| {:.6} (tolerance {})",
            report.primary,
            report.overlays[0].ks,
            report.dkw_bound,
            report.overlays[0].max_coverage_error(),
            cfg.quantile_tol
        );
        Ok(Outcome::BandFailure)
    }
}
