use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::chain::{
    exact_kernel, moment_identity, reversal_check, stationary_distribution, worst_start_tv,
};
use crate::engine::{
    build_table, check_addition_rules, convergence_profile_auto, extreme_peppf, is_symmetric,
    paintbox_eppf, shift_peppf, FrequencyVector, PartitionLaw, PeppfTable,
};
use crate::partition::Composition;
use crate::rng::par_draws;
use crate::samplers::{coupling_bound, crp_sample, sample_x, x_pmf, RandomFreqModel, XDraw};
use crate::stats::{chi_square_gof, ChiSquare, Estimate};

use super::config::{Command, Generator, RunConfig};
use super::CliError;

/// Summary lines for standard output and the artifact files written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    fn write_json<T: Serialize>(
        &mut self,
        dir: &Path,
        name: &str,
        value: &T,
    ) -> Result<(), CliError> {
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(crate::Error::from)?;
        fs::write(&path, text + "\n").map_err(io_error(&path))?;
        self.artifacts.push(path);
        Ok(())
    }

    fn write_csv<T: Serialize>(
        &mut self,
        dir: &Path,
        name: &str,
        rows: &[T],
    ) -> Result<(), CliError> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(crate::Error::from)?;
        for row in rows {
            w.serialize(row).map_err(crate::Error::from)?;
        }
        w.flush().map_err(io_error(&path))?;
        self.artifacts.push(path);
        Ok(())
    }

    fn write_table(&mut self, dir: &Path, name: &str, t: &PeppfTable) -> Result<(), CliError> {
        let path = dir.join(name);
        t.write(&path)?;
        self.artifacts.push(path);
        Ok(())
    }
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("cannot write {}: {e}", path.display()))
}

/// Validates `cfg` and executes its command inside a pool of `cfg.threads` workers.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.validate()?;
    fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cfg.out.display())))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut out = Outcome::default();
        out.line(format!("command: {}", command.name()));
        match command {
            Command::EvalPeppf => eval_peppf(cfg, &mut out)?,
            Command::Shift => shift(cfg, &mut out)?,
            Command::Converge => converge(cfg, &mut out)?,
            Command::SimulateCrp => simulate_crp(cfg, &mut out)?,
            Command::SampleX => sample_x_cmd(cfg, &mut out)?,
            Command::ChainKernel => chain_kernel(cfg, &mut out)?,
            Command::Identities => identities(cfg, &mut out)?,
            Command::CheckSymmetric => check_symmetric(cfg, &mut out)?,
        }
        Ok(out)
    })
}

fn fixed_frequencies(cfg: &RunConfig) -> Result<&FrequencyVector, CliError> {
    match &cfg.frequencies {
        RandomFreqModel::Fixed(f) => Ok(f),
        _ => Err(CliError::Config(
            "this command needs fixed frequencies (\"fixed\")".into(),
        )),
    }
}

fn finite_support(cfg: &RunConfig) -> Result<Vec<(FrequencyVector, f64)>, CliError> {
    cfg.frequencies
        .exact_support()
        .map_err(|e| CliError::Config(format!("{e}; use fixed or size_biased_of_ranked")))
}

fn table_from_config(cfg: &RunConfig, level: usize) -> Result<PeppfTable, CliError> {
    let support = finite_support(cfg)?;
    let table = match cfg.generator {
        Generator::Extreme => build_table(
            |c| support.iter().map(|(f, w)| w * extreme_peppf(f, c)).sum(),
            level,
            cfg.table_cap,
            "extreme",
        )?,
        Generator::Paintbox => {
            let f = &support[0].0;
            build_table(|c| paintbox_eppf(f, c), level, cfg.table_cap, "paintbox")?
        }
    };
    Ok(table)
}

#[derive(Serialize)]
struct ValidationReport {
    valid: bool,
    max_level: usize,
    generator: String,
    max_residual: f64,
    argmax: Option<String>,
    error: Option<String>,
}

fn eval_peppf(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let table = match &cfg.table {
        Some(path) => PeppfTable::read(path)?,
        None => {
            let support = finite_support(cfg)?;
            match cfg.generator {
                Generator::Extreme => PeppfTable::tabulate(
                    |c| support.iter().map(|(f, w)| w * extreme_peppf(f, c)).sum(),
                    cfg.level,
                    cfg.table_cap,
                    "extreme",
                )?,
                Generator::Paintbox => PeppfTable::tabulate(
                    |c| paintbox_eppf(&support[0].0, c),
                    cfg.level,
                    cfg.table_cap,
                    "paintbox",
                )?,
            }
        }
    };
    let report = check_addition_rules(&table);
    let verdict = table.validate();
    out.write_json(
        &cfg.out,
        "validation.json",
        &ValidationReport {
            valid: verdict.is_ok(),
            max_level: table.max_level(),
            generator: table.generator().to_string(),
            max_residual: report.max_residual,
            argmax: report.argmax.as_ref().map(ToString::to_string),
            error: verdict.as_ref().err().map(ToString::to_string),
        },
    )?;
    verdict?;
    out.write_table(&cfg.out, "table.json", &table)?;
    out.line(format!(
        "table level {} ({} compositions), generator {}",
        table.max_level(),
        table.len(),
        table.generator()
    ));
    out.line(format!(
        "addition rules: max residual {:.3e} at {}",
        report.max_residual,
        report
            .argmax
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".into())
    ));
    Ok(())
}

fn shift(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let mut table = table_from_config(cfg, cfg.level)?;
    let two = Composition::new(vec![2]).expect("valid");
    for n in 0..=cfg.n_max {
        out.write_table(&cfg.out, &format!("shift_{n}.json"), &table)?;
        let p2 = table.get(&two).map_or("-".into(), |v| format!("{v:.12}"));
        out.line(format!(
            "n = {n}: level {}, p(2) = {p2}, residual {:.3e}",
            table.max_level(),
            check_addition_rules(&table).max_residual
        ));
        if n < cfg.n_max {
            table = shift_peppf(&table)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceRow {
    n: usize,
    tv: f64,
    coupling_bound_estimate: f64,
    coupling_bound_stderr: f64,
}

fn converge(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let f = fixed_frequencies(cfg)?;
    let seed = cfg.seed.expect("validated");
    let profile = convergence_profile_auto(f, cfg.m, cfg.n_max, cfg.table_cap)?;
    let mut rows = Vec::with_capacity(profile.tv.len());
    let mut within_bound = true;
    for (n, &tv) in profile.tv.iter().enumerate() {
        let est = coupling_bound(f, n, cfg.m, cfg.samples, seed.wrapping_add(n as u64))?;
        within_bound &= tv <= est.bound.mean + 3.0 * est.bound.stderr;
        rows.push(ConvergenceRow {
            n,
            tv,
            coupling_bound_estimate: est.bound.mean,
            coupling_bound_stderr: est.bound.stderr,
        });
    }
    out.write_csv(&cfg.out, "convergence.csv", &rows)?;
    out.line(format!(
        "{} route, m = {}, n = 0..={}: tv {:.6e} -> {:.6e}",
        match profile.route {
            crate::engine::ProfileRoute::Table => "table",
            crate::engine::ProfileRoute::Chain => "chain",
        },
        cfg.m,
        cfg.n_max,
        profile.tv[0],
        profile.last()
    ));
    out.line(format!("tv within coupling bound (3 se): {within_bound}"));
    if let Some(threshold) = cfg.threshold {
        profile.check_threshold(threshold)?;
        out.line(format!("final tv below {threshold:e}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct CrpRow {
    seed: u64,
    draw: u64,
    partition: String,
    clusters: usize,
}

#[derive(Serialize)]
struct CrpSummary {
    samples: usize,
    m: usize,
    clusters: Estimate,
    chi_square: Option<ChiSquare>,
}

fn exact_law(cfg: &RunConfig) -> Option<PartitionLaw> {
    let support = cfg.frequencies.exact_support().ok()?;
    PartitionLaw::from_fn(cfg.m, cfg.enumeration_cap, |c| {
        support.iter().map(|(f, w)| w * extreme_peppf(f, c)).sum()
    })
    .ok()
}

fn simulate_crp(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let seed = cfg.seed.expect("validated");
    let draws = par_draws(seed, cfg.samples, |rng, _| {
        let f = cfg.frequencies.sample(rng)?;
        crp_sample(&f, cfg.m, rng)
    })
    .into_iter()
    .collect::<crate::Result<Vec<_>>>()?;
    let rows: Vec<CrpRow> = draws
        .iter()
        .enumerate()
        .map(|(i, p)| CrpRow {
            seed,
            draw: i as u64,
            partition: p.to_string(),
            clusters: p.num_clusters(),
        })
        .collect();
    let clusters: Vec<f64> = draws.iter().map(|p| p.num_clusters() as f64).collect();
    let chi_square = exact_law(cfg).map(|law| {
        let index: BTreeMap<_, _> = law
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), i))
            .collect();
        let mut counts = vec![0u64; index.len()];
        for p in &draws {
            counts[index[p]] += 1;
        }
        let expected: Vec<f64> = law.iter().map(|(_, v)| v).collect();
        chi_square_gof(&counts, &expected)
    });
    let summary = CrpSummary {
        samples: draws.len(),
        m: cfg.m,
        clusters: Estimate::from_samples(&clusters),
        chi_square,
    };
    out.write_csv(&cfg.out, "crp_draws.csv", &rows)?;
    out.write_json(&cfg.out, "crp_summary.json", &summary)?;
    out.line(format!(
        "{} partitions of [{}]: mean clusters {:.6} +- {:.6}",
        summary.samples, cfg.m, summary.clusters.mean, summary.clusters.stderr
    ));
    if let Some(chi) = summary.chi_square {
        out.line(format!(
            "fit to exact law: chi2 = {:.3} on {} dof, p = {:.4}",
            chi.statistic, chi.dof, chi.p_value
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct XRow {
    seed: u64,
    draw: u64,
    x: String,
}

#[derive(Serialize)]
struct XCell {
    j: usize,
    count: u64,
    empirical: f64,
    exact: Option<f64>,
}

#[derive(Serialize)]
struct XSummary {
    samples: usize,
    step_cap: usize,
    infinite: u64,
    censored: u64,
    pmf: Vec<XCell>,
    chi_square: Option<ChiSquare>,
}

fn sample_x_cmd(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let seed = cfg.seed.expect("validated");
    let draws = par_draws(seed, cfg.samples, |rng, _| {
        let f = cfg.frequencies.sample(rng)?;
        sample_x(&f, rng, cfg.step_cap)
    })
    .into_iter()
    .collect::<crate::Result<Vec<_>>>()?;
    let rows: Vec<XRow> = draws
        .iter()
        .enumerate()
        .map(|(i, d)| XRow {
            seed,
            draw: i as u64,
            x: match d {
                XDraw::Finite(j) => j.to_string(),
                XDraw::Infinite => "inf".into(),
                XDraw::Censored => "censored".into(),
            },
        })
        .collect();
    let max_j = draws
        .iter()
        .filter_map(|d| match d {
            XDraw::Finite(j) => Some(*j),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut counts = vec![0u64; max_j];
    let (mut infinite, mut censored) = (0u64, 0u64);
    for d in &draws {
        match d {
            XDraw::Finite(j) => counts[j - 1] += 1,
            XDraw::Infinite => infinite += 1,
            XDraw::Censored => censored += 1,
        }
    }
    // exact mixture of the conditional law; mass at infinity for P_1 = 0
    let exact: Option<(Vec<f64>, f64)> = cfg.frequencies.exact_support().ok().map(|support| {
        let mut pmf = vec![0.0; max_j];
        let mut at_infinity = 0.0;
        for (f, w) in &support {
            if f.atom(0) > 0.0 {
                for (j, cell) in pmf.iter_mut().enumerate() {
                    *cell += w * x_pmf(f, j + 1).expect("positive first atom");
                }
            } else {
                at_infinity += w;
            }
        }
        (pmf, at_infinity)
    });
    let n = draws.len() as f64;
    let pmf: Vec<XCell> = counts
        .iter()
        .enumerate()
        .map(|(j, &c)| XCell {
            j: j + 1,
            count: c,
            empirical: c as f64 / n,
            exact: exact.as_ref().map(|(p, _)| p[j]),
        })
        .collect();
    let chi_square = exact.as_ref().map(|(p, at_infinity)| {
        let mut observed = counts.clone();
        let mut expected = p.clone();
        // everything past max_j plus censoring, and the infinite mass
        observed.push(censored);
        expected.push((1.0 - p.iter().sum::<f64>() - at_infinity).max(0.0));
        observed.push(infinite);
        expected.push(*at_infinity);
        chi_square_gof(&observed, &expected)
    });
    let summary = XSummary {
        samples: draws.len(),
        step_cap: cfg.step_cap,
        infinite,
        censored,
        pmf,
        chi_square,
    };
    out.write_csv(&cfg.out, "x_draws.csv", &rows)?;
    out.write_json(&cfg.out, "x_summary.json", &summary)?;
    out.line(format!(
        "{} draws: infinite {}, censored {}",
        summary.samples, infinite, censored
    ));
    for cell in summary.pmf.iter().take(8) {
        out.line(format!(
            "  X = {}: empirical {:.5}, exact {}",
            cell.j,
            cell.empirical,
            cell.exact.map_or("-".into(), |v| format!("{v:.5}"))
        ));
    }
    if let Some(chi) = summary.chi_square {
        out.line(format!(
            "chi2 = {:.3} on {} dof, p = {:.4}",
            chi.statistic, chi.dof, chi.p_value
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct ChainReport {
    states: Vec<String>,
    stationary: Vec<f64>,
    reversal_residual: f64,
    worst_start_tv_after_50: f64,
}

fn chain_kernel(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let atoms = match &cfg.frequencies {
        RandomFreqModel::Fixed(f) | RandomFreqModel::SizeBiasedOfRanked(f) => f.atoms().to_vec(),
        RandomFreqModel::StickBreaking(_) => {
            return Err(CliError::Config(
                "chain-kernel needs a finite atom multiset".into(),
            ))
        }
    };
    let chain = exact_kernel(&atoms)?;
    let pi = stationary_distribution(&chain)?;
    let residual = reversal_check(&chain, &pi);
    let mixing = worst_start_tv(&chain, &pi, 50);
    let path = cfg.out.join("kernel.csv");
    let file = fs::File::create(&path).map_err(io_error(&path))?;
    chain.write_csv(file)?;
    out.artifacts.push(path);
    let report = ChainReport {
        states: (0..chain.states().len()).map(|i| chain.label(i)).collect(),
        stationary: pi.clone(),
        reversal_residual: residual,
        worst_start_tv_after_50: mixing[50],
    };
    out.write_json(&cfg.out, "chain.json", &report)?;
    out.line(format!("{} states", chain.states().len()));
    for (label, p) in report.states.iter().zip(&pi) {
        out.line(format!("  pi({label}) = {p:.12}"));
    }
    out.line(format!("reversal residual {residual:.3e}"));
    out.line(format!("worst-start tv after 50 steps {:.3e}", mixing[50]));
    if residual > cfg.tolerance {
        return Err(CliError::Validation(format!(
            "reversal residual {residual:e} exceeds {:e}",
            cfg.tolerance
        )));
    }
    Ok(())
}

fn identities(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let reports = cfg
        .identities
        .iter()
        .map(|&id| moment_identity(&cfg.frequencies, id, cfg.mode, cfg.samples, seed))
        .collect::<crate::Result<Vec<_>>>()?;
    out.write_json(&cfg.out, "identities.json", &reports)?;
    for r in &reports {
        out.line(format!(
            "{}: left {:.12}, right {:.12}, discrepancy {:.3e}, stderr {:.3e}",
            r.identity, r.left, r.right, r.discrepancy, r.stderr
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct SymmetryOutput {
    symmetric: bool,
    tolerance: f64,
    max_asymmetry: f64,
    witness: Option<[(String, f64); 2]>,
}

fn check_symmetric(cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
    let table = table_from_config(cfg, cfg.level)?;
    let report = is_symmetric(&table, cfg.tolerance);
    let witness = report
        .witness
        .as_ref()
        .map(|((a, va), (b, vb))| [(a.to_string(), *va), (b.to_string(), *vb)]);
    out.write_json(
        &cfg.out,
        "symmetry.json",
        &SymmetryOutput {
            symmetric: report.symmetric,
            tolerance: cfg.tolerance,
            max_asymmetry: report.max_asymmetry,
            witness: witness.clone(),
        },
    )?;
    out.line(format!(
        "symmetric: {} (max asymmetry {:.3e})",
        report.symmetric, report.max_asymmetry
    ));
    if let Some([(a, va), (b, vb)]) = witness {
        out.line(format!("  witness p({a}) = {va:.12} vs p({b}) = {vb:.12}"));
    }
    Ok(())
}
