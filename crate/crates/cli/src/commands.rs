//! Implementations of the five subcommands.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use cvclone_core::measures::{eln_closed_form, ggm_closed_form};
use cvclone_core::search::{golden_section_max, grid};
use cvclone_core::states::{InputSpec, ResourceFamily, ResourceSpec};
use cvclone_core::validate::{format_check, run_acceptance_filtered, Fault, Status};
use cvclone_core::{asymmetric, protocols, CloneReport, ProtocolSpec, Variant};

use crate::config::{Config, Protocol};
use crate::output::{csv_label, fmt, Sink};

fn protocol_label(p: &Protocol) -> &'static str {
    match p {
        Protocol::Symmetric(v) => v.label(),
        Protocol::Asymmetric => "asymmetric",
    }
}

fn run_point(cfg: &Config, r: f64) -> Result<CloneReport> {
    let spec = ResourceSpec::new(cfg.resource.clone(), r)?;
    match &cfg.protocol {
        Protocol::Symmetric(variant) => {
            let p = ProtocolSpec::new(*variant, 2, cfg.epsilon)?;
            Ok(protocols::run_protocol(&spec, &cfg.input, &p)?)
        }
        Protocol::Asymmetric => {
            let taus = asym_taus(cfg)?;
            Ok(asymmetric::report(
                r,
                &taus,
                Variant::Irreversible,
                &cfg.input,
                false,
            )?)
        }
    }
}

fn asym_taus(cfg: &Config) -> Result<Vec<f64>> {
    if let ResourceFamily::Asymmetric(taus) = &cfg.resource {
        return Ok(taus.clone());
    }
    if let Some(taus) = &cfg.taus {
        return Ok(taus.clone());
    }
    bail!(cvclone_core::Error::InvalidArgument(
        "asymmetric runs need --taus or an asym:... resource".into()
    ))
}

pub fn sweep(cfg: Config) -> Result<ExitCode> {
    let asymmetric_run = cfg.protocol == Protocol::Asymmetric;
    let gaussian_two_mode = !asymmetric_run && matches!(cfg.resource, ResourceFamily::Tmsv);
    let herald = !asymmetric_run
        && matches!(
            cfg.resource,
            ResourceFamily::PhotonSubtracted(..) | ResourceFamily::PhotonAdded(..)
        );

    let rs = grid(cfg.r_min, cfg.r_max, cfg.r_steps);
    let reports: Vec<(usize, Result<CloneReport>)> = rs
        .par_iter()
        .enumerate()
        .map(|(i, &r)| (i, run_point(&cfg, r)))
        .collect();
    let mut rows: Vec<(usize, CloneReport)> = Vec::with_capacity(reports.len());
    for (i, rep) in reports {
        match rep {
            Ok(rep) => rows.push((i, rep)),
            // grid points where the resource does not exist (e.g. photon
            // subtraction at r = 0) are skipped, not fatal
            Err(err) if err.downcast_ref::<cvclone_core::Error>().is_some_and(|e| {
                matches!(e, cvclone_core::Error::NonPhysical(_))
            }) =>
            {
                eprintln!("note: skipping r = {}: {err:#}", rs[i]);
            }
            Err(err) => return Err(err),
        }
    }
    rows.sort_by_key(|(i, _)| *i);

    let mut sink = Sink::open(cfg.out.as_deref())?;
    let mut header = String::from(
        "protocol,resource,input,r,epsilon,clone_index,fidelity,var_x,var_p,q,zeta",
    );
    if gaussian_two_mode {
        header.push_str(",eln,ggm");
    }
    if herald {
        header.push_str(",herald_weight");
    }
    sink.line(&header)?;
    let label = protocol_label(&cfg.protocol);
    let resource = if asymmetric_run {
        csv_label(&ResourceFamily::Asymmetric(asym_taus(&cfg)?).label())
    } else {
        csv_label(&cfg.resource.label())
    };
    let input = csv_label(&cfg.input.label());
    for (i, rep) in &rows {
        let r = rs[*i];
        for (j, &f) in rep.fidelities.iter().enumerate() {
            let (vx, vp) = rep.variances[j];
            let q = &rep.q[j];
            let mut line = format!(
                "{label},{resource},{input},{},{},{},{},{},{},{},{}",
                fmt(r),
                fmt(cfg.epsilon),
                j + 1,
                fmt(f),
                fmt(vx),
                fmt(vp),
                fmt(q.q),
                fmt(q.zeta)
            );
            if gaussian_two_mode {
                line.push_str(&format!(",{},{}", fmt(eln_closed_form(r)), fmt(ggm_closed_form(r))));
            }
            if herald {
                line.push_str(&format!(",{}", fmt(rep.herald_weight.unwrap_or(f64::NAN))));
            }
            sink.line(&line)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn optimize(
    cfg: Config,
    target: &str,
    r_fixed: Option<f64>,
    eps_min: f64,
    eps_max: f64,
) -> Result<ExitCode> {
    let opt = match target {
        "r" => golden_section_max(
            |r| {
                run_point(&cfg, r)
                    .map(|rep| rep.fidelities[0])
                    .unwrap_or(f64::NEG_INFINITY)
            },
            cfg.r_min,
            cfg.r_max,
            1e-4,
        ),
        "epsilon" => {
            let r = r_fixed.ok_or_else(|| {
                cvclone_core::Error::InvalidArgument("--target epsilon needs --r".into())
            })?;
            let variant = match cfg.protocol {
                Protocol::Symmetric(v) => v,
                Protocol::Asymmetric => bail!(cvclone_core::Error::InvalidArgument(
                    "ε optimization applies to the symmetric protocols".into()
                )),
            };
            let spec = ResourceSpec::new(cfg.resource.clone(), r)?;
            golden_section_max(
                |eps| {
                    ProtocolSpec::new(variant, 2, eps)
                        .and_then(|p| protocols::run_protocol(&spec, &cfg.input, &p))
                        .map(|rep| rep.fidelities[0])
                        .unwrap_or(f64::NEG_INFINITY)
                },
                eps_min,
                eps_max,
                1e-4,
            )
        }
        other => bail!(cvclone_core::Error::InvalidArgument(format!(
            "unknown optimization target `{other}`"
        ))),
    };
    let mut sink = Sink::open(cfg.out.as_deref())?;
    sink.line(&format!(
        "target={target} location={} value={} degenerate={}",
        fmt(opt.location),
        fmt(opt.value),
        opt.degenerate
    ))?;
    Ok(ExitCode::SUCCESS)
}

/// Fixed resource-squeezing values used for the squeezed-input runs: the
/// Q-peak locations for the irreversible protocol, r = 1 for the reversible.
const FIG4_RESOURCES: [(&str, f64); 5] = [
    ("tmsv", 0.89),
    ("ps:1,1", 0.47),
    ("pa:1,1", 0.73),
    ("ps:1,0", 0.88),
    ("pa:1,0", 0.02),
];

const EXEMPLARY_TAUS: [f64; 4] = [0.5, 0.05, 0.125, 0.1];

fn symmetric_report(
    resource: &str,
    r: f64,
    input: &InputSpec,
    variant: Variant,
    eps: f64,
) -> Result<CloneReport> {
    let spec = ResourceSpec::new(ResourceFamily::parse(resource)?, r)?;
    let p = ProtocolSpec::new(variant, 2, eps)?;
    Ok(protocols::run_protocol(&spec, input, &p)?)
}

pub fn figure(cfg: Config, id: &str) -> Result<ExitCode> {
    let dir = PathBuf::from(cfg.out.clone().unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    let coherent = InputSpec::coherent(0.0, 0.0);
    let both = [Variant::Irreversible, Variant::Reversible];

    match id {
        "fig2" => {
            let mut csv = Sink::create(&dir.join("fig2.csv"))?;
            csv.line("r,fidelity,eln,ggm")?;
            for r in grid(0.0, 1.0, 201) {
                let f = symmetric_report("tmsv", r, &coherent, Variant::Irreversible, 0.0)?
                    .fidelities[0];
                csv.line(&format!(
                    "{},{},{},{}",
                    fmt(r),
                    fmt(f),
                    fmt(eln_closed_form(r)),
                    fmt(ggm_closed_form(r))
                ))?;
            }
            plot_script(
                &dir,
                "fig2",
                "set xlabel 'r'\nplot 'fig2.csv' using 1:2 with lines title 'F', \\\n     '' using 1:3 with lines title 'E_LN', \\\n     '' using 1:4 with lines title 'GGM'",
            )?;
        }
        "fig3" | "fig4" => {
            let squeezed = InputSpec::squeezed(0.5, 0.0, 0.0);
            let input = if id == "fig3" { coherent } else { squeezed };
            // q and F against r for the five resources, both protocols
            let resources: Vec<&str> = FIG4_RESOURCES.iter().map(|(n, _)| *n).collect();
            let suffix = |v: Variant, n: &str| format!("{}_{}", v.label(), n.replace([':', ','], ""));
            let mut header = String::from("r");
            for v in both {
                for n in &resources {
                    header.push_str(&format!(",q_{0},f_{0}", suffix(v, n)));
                }
            }
            let fname = format!("{id}_vs_r.csv");
            let rows: Vec<String> = grid(0.0025, 1.0, 100)
                .par_iter()
                .map(|&r| {
                    let mut line = fmt(r);
                    for v in both {
                        for n in &resources {
                            let rep = symmetric_report(n, r, &input, v, 0.0)
                                .expect("figure grid point");
                            line.push_str(&format!(
                                ",{},{}",
                                fmt(rep.q[0].q),
                                fmt(rep.fidelities[0])
                            ));
                        }
                    }
                    line
                })
                .collect();
            let mut csv = Sink::create(&dir.join(&fname))?;
            csv.line(&header)?;
            for row in rows {
                csv.line(&row)?;
            }
            if id == "fig4" {
                // F against ε at the fixed per-resource r values
                let mut header = String::from("epsilon");
                for v in both {
                    for (n, _) in FIG4_RESOURCES {
                        header.push_str(&format!(",f_{}", suffix(v, n)));
                    }
                }
                let rows: Vec<String> = grid(0.0, 0.8, 81)
                    .par_iter()
                    .map(|&eps| {
                        let mut line = fmt(eps);
                        for v in both {
                            for (n, r_irr) in FIG4_RESOURCES {
                                let r = if v == Variant::Irreversible { r_irr } else { 1.0 };
                                let rep = symmetric_report(n, r, &squeezed, v, eps)
                                    .expect("figure grid point");
                                line.push_str(&format!(",{}", fmt(rep.fidelities[0])));
                            }
                        }
                        line
                    })
                    .collect();
                let mut csv = Sink::create(&dir.join("fig4_vs_eps.csv"))?;
                csv.line(&header)?;
                for row in rows {
                    csv.line(&row)?;
                }
            }
            let plot = format!(
                "set xlabel 'r'\nplot '{fname}' using 1:3 with lines title 'F tmsv (irr)', \\\n     '' using 1:5 with lines title 'F ps11 (irr)'"
            );
            plot_script(&dir, id, &plot)?;
        }
        "fig5" => {
            let mut header = String::from("r");
            for v in both {
                for n in 1..=4 {
                    header.push_str(&format!(",f_{}_ps{n}{n}", v.label()));
                }
            }
            let rows: Vec<String> = grid(0.0025, 1.0, 80)
                .par_iter()
                .map(|&r| {
                    let mut line = fmt(r);
                    for v in both {
                        for n in 1..=4 {
                            let rep =
                                symmetric_report(&format!("ps:{n},{n}"), r, &coherent, v, 0.0)
                                    .expect("figure grid point");
                            line.push_str(&format!(",{}", fmt(rep.fidelities[0])));
                        }
                    }
                    line
                })
                .collect();
            let mut csv = Sink::create(&dir.join("fig5.csv"))?;
            csv.line(&header)?;
            for row in rows {
                csv.line(&row)?;
            }
            plot_script(
                &dir,
                "fig5",
                "set xlabel 'r'\nplot for [i=2:5] 'fig5.csv' using 1:i with lines title columnheader",
            )?;
        }
        "fig6" => {
            let taus = EXEMPLARY_TAUS.to_vec();
            let mut header = String::from("r");
            for v in both {
                for m in 1..=4 {
                    header.push_str(&format!(",q_{}_c{m},f_{}_c{m}", v.label(), v.label()));
                }
            }
            let rows: Vec<String> = grid(0.0025, 2.0, 200)
                .par_iter()
                .map(|&r| {
                    let mut line = fmt(r);
                    for v in both {
                        let rep = asymmetric::report(r, &taus, v, &coherent, false)
                            .expect("figure grid point");
                        for m in 0..4 {
                            line.push_str(&format!(
                                ",{},{}",
                                fmt(rep.q[m].q),
                                fmt(rep.fidelities[m])
                            ));
                        }
                    }
                    line
                })
                .collect();
            let mut csv = Sink::create(&dir.join("fig6.csv"))?;
            csv.line(&header)?;
            for row in rows {
                csv.line(&row)?;
            }
            plot_script(
                &dir,
                "fig6",
                "set xlabel 'r'\nplot for [i=2:9:2] 'fig6.csv' using 1:(column(i+1)) with lines title columnheader",
            )?;
        }
        other => bail!(cvclone_core::Error::InvalidArgument(format!(
            "unknown figure id `{other}`"
        ))),
    }
    Ok(ExitCode::SUCCESS)
}

fn plot_script(dir: &std::path::Path, id: &str, body: &str) -> Result<()> {
    let mut plt = Sink::create(&dir.join(format!("{id}.plt")))?;
    plt.line("# gnuplot script")?;
    plt.line("set datafile separator ','")?;
    plt.line("set key outside")?;
    plt.line(body)?;
    Ok(())
}

pub fn network(cfg: Config) -> Result<ExitCode> {
    let taus = asym_taus(&cfg)?;
    let variant = match cfg.protocol {
        Protocol::Symmetric(v) => v,
        Protocol::Asymmetric => Variant::Irreversible,
    };
    let rs = grid(cfg.r_min, cfg.r_max, cfg.r_steps);
    let n = taus.len();
    let mut sink = Sink::open(cfg.out.as_deref())?;
    sink.line("r,clone_index,f_closed,f_sim,q_closed,q_sim,max_discrepancy")?;
    for &r in &rs {
        for m in 1..=n {
            let closed = asymmetric::closed_moments(r, &taus, m)?;
            let sim = asymmetric::sim_moments(r, &taus, m)?;
            let ec = asymmetric::clone_entry_from(&closed, variant, &cfg.input)?;
            let es = asymmetric::clone_entry_from(&sim, variant, &cfg.input)?;
            let disc = [
                (closed.xx_clone - sim.xx_clone).abs(),
                (closed.xx_sender - sim.xx_sender).abs(),
                (closed.xx_corr - sim.xx_corr).abs(),
                (closed.pp_clone - sim.pp_clone).abs(),
                (closed.pp_sender - sim.pp_sender).abs(),
                (closed.pp_corr - sim.pp_corr).abs(),
                (ec.fidelity - es.fidelity).abs(),
                (ec.q.q - es.q.q).abs(),
            ]
            .into_iter()
            .fold(0.0f64, f64::max);
            sink.line(&format!(
                "{},{m},{},{},{},{},{}",
                fmt(r),
                fmt(ec.fidelity),
                fmt(es.fidelity),
                fmt(ec.q.q),
                fmt(es.q.q),
                fmt(disc)
            ))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn validate(cfg: Config, only: Option<&str>, inject: Option<&str>) -> Result<ExitCode> {
    let fault = match inject {
        None => None,
        Some("overlap-prefactor") => Some(Fault::OverlapPrefactor),
        Some(other) => bail!(cvclone_core::Error::InvalidArgument(format!(
            "unknown fault `{other}`"
        ))),
    };
    let mut sink = Sink::open(cfg.out.as_deref())?;
    sink.line(&format!(
        "# cvclone validate: seed={} rng={}",
        cfg.seed,
        cvclone_core::oracle::RNG_ALGORITHM
    ))?;
    let checks = run_acceptance_filtered(cfg.seed, fault, only);
    let mut failed = 0;
    let mut deviations = 0;
    for check in &checks {
        sink.line(&format_check(check))?;
        match check.status {
            Status::Fail => failed += 1,
            Status::Deviation => deviations += 1,
            Status::Pass => {}
        }
    }
    sink.line(&format!(
        "summary: checks={} passed={} deviations={deviations} failed={failed}",
        checks.len(),
        checks.len() - failed - deviations
    ))?;
    if failed > 0 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
