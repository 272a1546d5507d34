use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cedesign::channel::{registry, sampled_pdp, PowerDelayProfile};
use cedesign::dataset::{generate_dataset, load_dataset, save_dataset, Component, DatasetSpec};
use cedesign::estimators::NoiseConfig;
use cedesign::eval::{
    ber_curve, delta_snr, ds_sweep, run_sweep, svg_plot, write_csv, CurvePoint, Estimator, EvalSpec, MseMode, Series,
};
use cedesign::channel::FadingSpec;
use cedesign::nn::{load_model, save_model, train as train_net, ModelFile, Placement, TrainConfig};
use cedesign::ofdm::{OfdmConfig, PilotPattern};
use cedesign::robustness::{is_applicable, mismatch_error, mismatch_error_literal, verify_mismatch};
use cedesign::rng;
use cedesign::{Error, Result};
use serde_json::json;

use crate::args::*;
use crate::manifest::Manifest;

type Resolved = BTreeMap<String, String>;

fn ofdm_for(p: PatternArg) -> OfdmConfig {
    match p {
        PatternArg::Default => OfdmConfig::default(),
        PatternArg::Alt => OfdmConfig::default().with_pattern(PilotPattern::alternative()),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Config(format!("bad {what} value `{s}`")))
}

/// `start:step:stop` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (a, step, b) = (parse_f64(parts[0], "grid")?, parse_f64(parts[1], "grid")?, parse_f64(parts[2], "grid")?);
        if !(step > 0.0) || b < a {
            return Err(Error::Config(format!("bad grid `{s}`")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + step * i as f64).collect());
    }
    let v = split_list(s).into_iter().map(|x| parse_f64(x, "grid")).collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    Ok(v)
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn generate(a: &GenerateArgs, resolved: &Resolved) -> Result<()> {
    let cfg = ofdm_for(a.pattern);
    let names = split_list(&a.pdp);
    if names.is_empty() {
        return Err(Error::Config("--pdp is empty".into()));
    }
    let weights: Vec<f64> = match &a.weights {
        Some(w) => split_list(w).into_iter().map(|x| parse_f64(x, "weight")).collect::<Result<_>>()?,
        None => vec![1.0 / names.len() as f64; names.len()],
    };
    if weights.len() != names.len() {
        return Err(Error::Config(format!("{} profiles but {} weights", names.len(), weights.len())));
    }
    let total: f64 = weights.iter().sum();
    let components = names
        .iter()
        .zip(&weights)
        .map(|(n, w)| {
            Ok(Component {
                pdp: registry::resolve(n, &cfg)?,
                weight: w / total,
                snr_range_db: (a.snr_min, a.snr_max),
                doppler_range_hz: (0.0, a.doppler_max),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut spec = DatasetSpec::single(components[0].pdp.clone(), a.n, (a.snr_min, a.snr_max), (0.0, a.doppler_max), cfg, a.seed);
    spec.components = components;
    spec.train_fraction = a.split;
    let mut man = Manifest::new(resolved);
    let ds = generate_dataset(&spec)?;
    save_dataset(&ds, &a.out)?;
    man.output(&a.out);
    man.note("n_samples", json!(ds.len()));
    man.note("n_train", json!(ds.n_train()));
    let m = man.write(&a.out)?;
    println!("wrote {} samples to {} ({} train); manifest {}", ds.len(), a.out.display(), ds.n_train(), m.display());
    Ok(())
}

pub fn train(a: &TrainArgs, resolved: &Resolved) -> Result<()> {
    let mut man = Manifest::new(resolved);
    let ds = load_dataset(&a.data)?;
    man.input(&a.data);
    let cfg = TrainConfig {
        max_epochs: a.epochs,
        initial_lr: a.lr,
        lr_drop_period: a.drop_period,
        lr_drop_factor: a.drop_factor,
        minibatch: a.batch,
        seed: a.seed,
        placement: match a.placement {
            PlacementArg::First => Placement::ResizeFirst,
            PlacementArg::Last => Placement::ResizeLast,
        },
        progress: !a.quiet,
        ..TrainConfig::default()
    };
    let ofdm = ds.header.ofdm_config();
    let (params, log) = match train_net(&ds, &cfg) {
        Ok(r) => r,
        Err(Error::Diverged { epoch, last_finite }) => {
            let path = with_suffix(&a.out, ".diverged");
            save_model(&ModelFile::new(*last_finite.clone(), &ofdm), &path)?;
            eprintln!("last finite parameters saved to {}", path.display());
            return Err(Error::Diverged { epoch, last_finite });
        }
        Err(e) => return Err(e),
    };
    save_model(&ModelFile::new(params, &ofdm), &a.out)?;
    let log_path = with_suffix(&a.out, ".log.csv");
    let mut w = BufWriter::new(File::create(&log_path)?);
    writeln!(w, "epoch,lr,train_mse,val_mse")?;
    for e in &log.epochs {
        let val = e.val_mse.map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(w, "{},{:e},{:e},{}", e.epoch, e.lr, e.train_mse, val)?;
    }
    w.flush()?;
    man.output(&a.out);
    man.output(&log_path);
    if let Some(last) = log.epochs.last() {
        man.note("final_train_mse", json!(last.train_mse));
        man.note("final_val_mse", json!(last.val_mse));
    }
    let m = man.write(&a.out)?;
    println!("wrote model {} and log {}; manifest {}", a.out.display(), log_path.display(), m.display());
    Ok(())
}

fn estimator(a: &EvalArgs, cfg: &OfdmConfig, man: &mut Manifest) -> Result<Estimator> {
    Ok(match a.estimator {
        EstimatorArg::Ls => Estimator::LsInterp,
        EstimatorArg::Perfect => Estimator::PerfectCsi,
        EstimatorArg::Mmse => {
            let d = a.design.as_deref().ok_or_else(|| Error::Config("--estimator mmse needs --design".into()))?;
            Estimator::Mmse(registry::resolve(d, cfg)?)
        }
        EstimatorArg::Simplenet => {
            let p = a.model.as_ref().ok_or_else(|| Error::Config("--estimator simplenet needs --model".into()))?;
            man.input(p);
            Estimator::SimpleNet(Box::new(load_model(p)?))
        }
    })
}

fn write_points(points: &[CurvePoint], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(points, &mut w)?;
    w.flush()?;
    Ok(())
}

fn print_points(points: &[CurvePoint]) {
    println!("{:<14} {:>10} {:>12} {:>12}", "channel", points.first().map(|p| p.x_kind.to_string()).unwrap_or_default(), "mse", "ber");
    for p in points {
        println!("{:<14} {:>10} {:>12.5e} {:>12.5e}", p.channel, p.x_value, p.mse, p.ber);
    }
}

pub fn eval(a: &EvalArgs, resolved: &Resolved) -> Result<()> {
    let cfg = ofdm_for(a.pattern);
    let mut man = Manifest::new(resolved);
    let est = estimator(a, &cfg, &mut man)?;
    let snr = parse_grid(&a.snr)?;
    let mut spec = EvalSpec::new(est, Vec::new(), snr.clone(), a.slots, a.seed);
    spec.cfg = cfg.clone();
    spec.doppler_range_hz = (0.0, a.doppler_max);
    if a.quasi_static {
        spec.fading = FadingSpec::quasi_static();
    }
    if a.pilot_only {
        spec.mse_mode = MseMode::PilotsOnly;
    }
    let points = if let Some(ds) = &a.ds {
        if a.target_ber.is_some() {
            return Err(Error::Config("--target-ber needs an SNR sweep, not --ds".into()));
        }
        let ds = parse_grid(ds)?;
        let mut all = Vec::new();
        for name in split_list(&a.channels) {
            let base = match name.to_ascii_uppercase().as_str() {
                "TDL-A" => registry::tdl_a_normalized(),
                "TDL-B" => registry::tdl_b_normalized(),
                _ => return Err(Error::Config(format!("--ds needs TDL-A or TDL-B channels, got `{name}`"))),
            };
            all.extend(ds_sweep(&spec, &base, &ds, snr[0])?);
        }
        all
    } else {
        spec.channels = split_list(&a.channels).into_iter().map(|n| registry::resolve(n, &cfg)).collect::<Result<_>>()?;
        run_sweep(&spec)?
    };
    write_points(&points, &a.out)?;
    man.output(&a.out);
    print_points(&points);

    if let Some(target) = a.target_ber {
        let mut perfect = spec.clone();
        perfect.estimator = Estimator::PerfectCsi;
        let reference = run_sweep(&perfect)?;
        let path = with_suffix(&a.out, ".delta.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "channel,target_ber,delta_snr_db")?;
        println!("SNR gap to perfect CSI at BER {target}:");
        for ch in &spec.channels {
            let d = delta_snr(&ber_curve(&points, &ch.name), &ber_curve(&reference, &ch.name), target);
            writeln!(w, "{},{},{}", ch.name, target, d)?;
            println!("  {:<14} {}", ch.name, d);
        }
        w.flush()?;
        man.output(&path);
    }
    if let Some(prefix) = &a.svg {
        let x_label = if a.ds.is_some() { "delay spread (ns)" } else { "SNR (dB)" };
        let mut channels: Vec<&str> = points.iter().map(|p| p.channel.as_str()).collect();
        channels.dedup();
        for (metric, f) in [("mse", (|p: &CurvePoint| p.mse) as fn(&CurvePoint) -> f64), ("ber", |p: &CurvePoint| p.ber)] {
            let series: Vec<Series> = channels
                .iter()
                .map(|c| Series {
                    name: c.to_string(),
                    points: points.iter().filter(|p| p.channel == *c).map(|p| (p.x_value, f(p))).collect(),
                })
                .collect();
            let path = with_suffix(prefix, &format!("_{metric}.svg"));
            std::fs::write(&path, svg_plot(&series, &spec.estimator.label(), x_label, &metric.to_uppercase(), true))?;
            man.output(&path);
        }
    }
    let m = man.write(&a.out)?;
    println!("wrote {}; manifest {}", a.out.display(), m.display());
    Ok(())
}

pub fn analyze(a: &AnalyzeArgs, resolved: &Resolved) -> Result<()> {
    let cfg = OfdmConfig::default();
    let design = registry::resolve(&a.design, &cfg)?;
    let actual: Vec<PowerDelayProfile> = split_list(&a.actual).into_iter().map(|n| registry::resolve(n, &cfg)).collect::<Result<_>>()?;
    let snr = split_list(&a.snr).into_iter().map(|s| parse_f64(s, "SNR")).collect::<Result<Vec<_>>>()?;
    let p_d = sampled_pdp(&design, &cfg);
    let mut man = Manifest::new(resolved);
    let mut rows = Vec::new();
    println!(
        "{:<14} {:<14} {:>6} {:<22} {:>12} {:>12} {:>12} {:>12}",
        "design", "actual", "snr", "verdict", "eps_m", "xi_m", "floor", "monte_carlo"
    );
    for (ai, act) in actual.iter().enumerate() {
        let verdict = is_applicable(act, &design);
        let p_a = sampled_pdp(act, &cfg);
        for (si, &s) in snr.iter().enumerate() {
            let noise = NoiseConfig::from_snr_db(s);
            let rep = mismatch_error(&p_d, &p_a, &noise);
            let eps = if a.literal { mismatch_error_literal(&p_d, &p_a, &noise) } else { rep.epsilon_m };
            let floor = mismatch_error(&p_a, &p_a, &noise).epsilon_m;
            let mc = (a.verify_trials > 0).then(|| {
                let seed = rng::derive(rng::derive(a.seed, ai as u64), si as u64);
                verify_mismatch(&p_d, act, &noise, a.verify_trials, seed, &cfg)
            });
            let mc_text = mc.as_ref().map(|m| format!("{:.5e}", m.mse)).unwrap_or_else(|| "-".into());
            println!(
                "{:<14} {:<14} {:>6} {:<22} {:>12.5e} {:>12.5e} {:>12.5e} {:>12}",
                design.name, act.name, s, verdict.to_string(), eps, rep.xi_m, floor, mc_text
            );
            rows.push(format!(
                "{},{},{},{},{:e},{:e},{:e},{},{}",
                design.name,
                act.name,
                s,
                verdict,
                eps,
                rep.xi_m,
                floor,
                mc.as_ref().map(|m| format!("{:e}", m.mse)).unwrap_or_default(),
                mc.as_ref().map(|m| format!("{:e}", m.stderr)).unwrap_or_default(),
            ));
        }
    }
    if let Some(out) = &a.out {
        let mut w = BufWriter::new(File::create(out)?);
        writeln!(w, "design,actual,snr_db,verdict,epsilon_m,xi_m,matched_floor,mc_mse,mc_stderr")?;
        for r in &rows {
            writeln!(w, "{r}")?;
        }
        w.flush()?;
        man.output(out);
        let m = man.write(out)?;
        println!("wrote {}; manifest {}", out.display(), m.display());
    }
    Ok(())
}

pub fn registry() -> Result<()> {
    let cfg = OfdmConfig::default();
    let mut out = std::io::stdout().lock();
    let mut show = |p: &PowerDelayProfile| -> Result<()> {
        let pairs: Vec<String> = p
            .delays
            .iter()
            .zip(&p.gains_db)
            .map(|(d, g)| format!("{:.4}us/{g}dB", d * 1e6))
            .collect();
        writeln!(out, "{:<14} {:>3} paths  {}", p.name, p.n_paths(), pairs.join(" "))?;
        Ok(())
    };
    for p in registry::fixed_profiles() {
        show(&p)?;
    }
    show(&registry::lookup("CE", &cfg)?)?;
    writeln!(out, "{:<14} parameterized: CE:<spacing_us>", "")?;
    for (name, p) in [("TDL-A", registry::tdl_a_normalized()), ("TDL-B", registry::tdl_b_normalized())] {
        let pairs: Vec<String> = p.delays.iter().zip(&p.gains_db).map(|(d, g)| format!("{d:.4}/{g}dB")).collect();
        writeln!(out, "{name:<14} {:>3} taps, delays in delay spreads; use {name}:<ds_ns>  {}", p.n_paths(), pairs.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:5:30").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
        assert_eq!(parse_grid("10, 20").unwrap(), vec![10.0, 20.0]);
        assert!(parse_grid("5:0:10").is_err());
        assert!(parse_grid("a").is_err());
    }
}
