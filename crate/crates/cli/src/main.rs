//! Command-line front end: certify gap bounds for named or custom
//! Hamiltonians, dump special-state measurement distributions, solve double
//! wells, and run configured size sweeps.
//!
//! Tabular results go to stdout as CSV; `certify` prints one JSON document;
//! `sweep` writes its three artifacts (series CSV, fit JSON, report text)
//! into a directory.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gapcert::basis::{enumerate_sectors, AdditiveObservable};
use gapcert::bounds::{decomposition_bound, window_bound, window_bound_klocal, GapCertificate};
use gapcert::eigen::{lowest_two, SolveOptions};
use gapcert::halfint::HalfInt;
use gapcert::hamiltonian::{lmg, tfim_chain, HamiltonianConfig, LocalHamiltonian};
use gapcert::scaling::{
    fit_exponential, fit_power_law, render_report, run_sweep, FitModel, SweepJob,
};
use gapcert::split::{auto_split, split_at, validate_split, DEFAULT_WEIGHT_FLOOR};
use gapcert::squid::{gap_identity_ratio, quartic_double_well, solve_well, Potential1D};
use gapcert::states::{w_state_distribution, weight_within, SuperpositionConfig};

#[derive(Parser)]
#[command(
    name = "gapcert",
    version,
    about = "Gap certificates and scaling sweeps for macroscopic superpositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a Hamiltonian, split its ground state, and print certificates.
    Certify(CertifyArgs),
    /// Rotated-basis measurement distribution of the W state (CSV).
    Wstate(WstateArgs),
    /// Window weight of a Dicke superposition across a range of j (CSV).
    DickeSup(DickeSupArgs),
    /// Double-well spectra and the tunnelling identity ratio (CSV).
    Squid(SquidArgs),
    /// Run a configured size sweep: series CSV, fit JSON, report text.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Transverse-field Ising chain.
    Tfim,
    /// Fully connected anisotropic 2-local model.
    Lmg,
    /// Terms read from a JSON file.
    Custom,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum, default_value_t = Family::Tfim)]
    family: Family,
    /// Number of sites (named families).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Pair coupling strength.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Single-site field strength.
    #[arg(long, default_value_t = 0.5)]
    field: f64,
    /// y-coupling anisotropy (lmg only).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Close the chain into a ring (tfim only).
    #[arg(long)]
    periodic: bool,
    /// JSON file with {n_sites, d, terms} (family = custom).
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Eigensolver residual target, echoed in the output.
    #[arg(long = "eig-tol", default_value_t = 1e-10)]
    eig_tol: f64,
    /// Cap on matrix applications; 0 means 10·√dim + 500.
    #[arg(long = "eig-maxiter", default_value_t = 0)]
    eig_maxiter: usize,
    /// Fix the separation point instead of searching for the quietest one.
    #[arg(long)]
    separation: Option<f64>,
    /// Window half-width for the separation search (default: two site spans).
    #[arg(long)]
    half_width: Option<f64>,
    /// Minimum branch weight accepted by the automatic search.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_FLOOR)]
    weight_floor: f64,
}

#[derive(Args)]
struct WstateArgs {
    /// Total spin j = N/2; accepts "6", "13/2", or "6.5".
    #[arg(long)]
    j: HalfInt,
}

#[derive(Args)]
struct DickeSupArgs {
    /// JSON file with {"sign": "+"|"-", "coefficients": [[re, im], ...]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    jmin: i64,
    #[arg(long)]
    jmax: i64,
    #[arg(long, default_value_t = 1)]
    step: i64,
    /// Window centre on the measurement ladder.
    #[arg(long, default_value_t = 0.0)]
    center: f64,
    #[arg(long, default_value_t = 2.0)]
    half_width: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialKind {
    /// β(Φ² − 1)² double well.
    Quartic,
}

#[derive(Args)]
struct SquidArgs {
    #[arg(long, value_enum, default_value_t = PotentialKind::Quartic)]
    potential: PotentialKind,
    /// Barrier heights, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    beta: Vec<f64>,
    /// Number of grid points (odd, so the centre is a sample).
    #[arg(long, default_value_t = 1601)]
    grid: usize,
    /// Half-width of the symmetric grid.
    #[arg(long, default_value_t = 3.2)]
    half_width: f64,
    /// Dimensionless mass scale multiplying the kinetic term's inverse.
    #[arg(long, default_value_t = 8.0)]
    mass: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep job JSON: a family config plus an optional "fit" model.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for series.csv, fit.json, and report.txt.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Certify(args) => certify(&args),
        Command::Wstate(args) => wstate(&args),
        Command::DickeSup(args) => dicke_sup(&args),
        Command::Squid(args) => squid(&args),
        Command::Sweep(args) => sweep(&args),
    }
}

fn certify(args: &CertifyArgs) -> anyhow::Result<()> {
    let (name, h): (&str, LocalHamiltonian<f64>) = match args.family {
        Family::Tfim => ("tfim", tfim_chain(args.n, args.coupling, args.field, args.periodic)?),
        Family::Lmg => ("lmg", lmg(args.n, args.coupling, args.field, args.gamma)?),
        Family::Custom => {
            let path = args
                .hamiltonian
                .as_ref()
                .context("--family custom needs --hamiltonian <file>")?;
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg: HamiltonianConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            ("custom", LocalHamiltonian::from_config(&cfg)?)
        }
    };
    let opts = SolveOptions {
        tol: args.eig_tol,
        max_iter: args.eig_maxiter,
        ..SolveOptions::default()
    };
    let pair = lowest_two(&h, &opts)?;
    let effective_maxiter = if args.eig_maxiter == 0 {
        10 * (h.dim() as f64).sqrt() as usize + 500
    } else {
        args.eig_maxiter
    };
    let mut report = json!({
        "family": name,
        "n_sites": h.space().n_sites(),
        "dim": h.dim(),
        "order": h.order(),
        "interaction_count": h.interaction_set_size(),
        "eig_tol": args.eig_tol,
        "eig_maxiter": effective_maxiter,
        "e0": pair.e0,
        "e1": pair.e1,
        "gap": pair.gap,
        "degenerate": pair.degenerate,
        "split": null,
        "certificates": [],
    });

    let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z())?;
    let half_width = args.half_width.unwrap_or_else(|| 2.0 * sectors.site_span());
    let split_result = match args.separation {
        Some(point) => split_at(&pair.ground, &sectors, point),
        None => auto_split(&pair.ground, &sectors, half_width, args.weight_floor),
    };
    match split_result {
        Ok(split) => {
            let reconstruction_error = validate_split(&split, &pair.ground)?;
            let norms = h.term_norms();
            let mut certs: Vec<GapCertificate> =
                vec![decomposition_bound(&h, &split.decomposition(), pair.e0)?];
            if h.order() == 2 {
                certs.push(window_bound(&h, &split, &norms)?);
            }
            if h.order() >= 2 {
                certs.push(window_bound_klocal(&h, &split, &norms)?);
            }
            let certs: Vec<GapCertificate> =
                certs.into_iter().map(|c| c.with_exact_gap(pair.gap)).collect();
            report["split"] = json!({
                "observable": "spin_z",
                "separation_point": split.separation_point,
                "half_width": half_width,
                "a1_sq": split.a1 * split.a1,
                "a2_sq": split.a2 * split.a2,
                "separation_probability": split.separation_probability(half_width),
                "region_mean_distance": split.region_mean_distance,
                "region_peak_distance": split.region_peak_distance,
                "reconstruction_error": reconstruction_error,
            });
            report["certificates"] = serde_json::to_value(&certs)?;
        }
        // A state that does not straddle any separation point is a finding,
        // not a failure: report the spectrum and say why there is no split.
        Err(err) => {
            report["split_error"] = json!(err.to_string());
        }
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn wstate(args: &WstateArgs) -> anyhow::Result<()> {
    let dist = w_state_distribution::<f64>(args.j)?;
    let j = args.j.value::<f64>();
    println!("j,m,p_m");
    for (m, p) in dist {
        println!("{j},{},{p}", m.value::<f64>());
    }
    Ok(())
}

fn dicke_sup(args: &DickeSupArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let config: SuperpositionConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.spec.display()))?;
    let spec = config.to_spec::<f64>()?;
    if args.step <= 0 || args.jmax < args.jmin {
        anyhow::bail!("need jmin ≤ jmax and a positive step");
    }
    println!("j,P_sep");
    let mut j = args.jmin;
    while j <= args.jmax {
        let dist = spec.distribution(HalfInt::from_int(j))?;
        let p_sep = weight_within(&dist, args.center, args.half_width);
        println!("{j},{p_sep}");
        j += args.step;
    }
    Ok(())
}

fn squid(args: &SquidArgs) -> anyhow::Result<()> {
    println!("beta,E0,E1,gap,psi0_at_0,ratio");
    for &beta in &args.beta {
        let potential = match args.potential {
            PotentialKind::Quartic => {
                Potential1D::symmetric(quartic_double_well(beta), args.half_width, args.grid)?
            }
        };
        let sol = solve_well(&potential, args.mass)?;
        let ratio = gap_identity_ratio(&sol)?;
        let psi0_at_0 = sol.psi0_at_0().expect("symmetric grids sample the centre");
        println!("{beta},{},{},{},{psi0_at_0},{ratio}", sol.e0(), sol.e1(), sol.gap());
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let job: SweepJob = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let outcome = run_sweep(&job.config)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    fs::write(args.out.join("series.csv"), outcome.series.render_csv())?;

    // Fit errors (too few surviving points, all-zero series) still leave a
    // useful series behind, so they go into the report instead of aborting.
    let fit = match job.fit {
        Some(FitModel::PowerLaw) => Some(fit_power_law(&outcome.series)),
        Some(FitModel::Exponential) => Some(fit_exponential(&outcome.series)),
        None => None,
    };
    let mut report = render_report(
        &outcome.series,
        fit.as_ref().and_then(|f| f.as_ref().ok()),
    );
    if let Some(Ok(f)) = &fit {
        fs::write(args.out.join("fit.json"), serde_json::to_string_pretty(f)?)?;
    } else if let Some(Err(e)) = &fit {
        report.push_str(&format!("  fit failed: {e}\n"));
    }
    if let Some(reason) = &outcome.aborted {
        report.push_str(&format!("  aborted early: {reason}\n"));
    }
    fs::write(args.out.join("report.txt"), &report)?;
    print!("{report}");
    Ok(())
}
