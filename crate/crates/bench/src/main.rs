use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use cubefem::complexcheck::{check_exactness, Complex};
use cubefem::mesh::{build_box_mesh, Bc};
use cubefem::{Box3, Family};
use cubefem_bench::run::{eoc, Example, run_brinkman, run_interp, run_quadcurl, table, write_csv, ErrorRecord, Problem, RunConfig, CSV_HEADER};

#[derive(Parser)]
#[command(name = "cubefem-bench", about = "Convergence studies and complex audits on the unit cube")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Element order r.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=3))]
    order: u64,
    /// Number of mesh levels h = 1/2, 1/4, ...
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Relative residual target of the linear solver.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output directory for the CSV files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// -curl Δ curl example, one CSV per μ.
    Quadcurl {
        #[command(flatten)]
        common: Common,
        #[arg(long = "mu", default_values_t = [1.0, 1e-2, 1e-4, 1e-6])]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Brinkman example, one CSV per ν.
    Brinkman {
        #[command(flatten)]
        common: Common,
        #[arg(long = "nu", default_values_t = [1.0, 1e-2, 1e-4, 1e-6])]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Exactness of both complexes on small meshes.
    Audit {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=3))]
        order: u64,
        /// Mesh divisions, e.g. 2x3x2.
        #[arg(long, default_value = "2x2x2")]
        mesh: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolation errors of Π¹ (S+1) and Π² (S+2).
    Interp {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=3))]
        order: u64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn print_summary(title: &str, records: &[ErrorRecord]) {
    println!("{title}");
    println!("{}", CSV_HEADER.join("  "));
    for (row, r) in table(records).iter().zip(records) {
        println!(
            "{}   residual {:.1e}, {} iterations, constraint {:.1e} (|f| {:.1e}), {:.1}s",
            row.join("  "),
            r.rel_residual,
            r.iterations,
            r.constraint,
            r.load_norm,
            r.seconds
        );
    }
}

fn sweep(problem: Problem, common: &Common, values: &[f64], reaction: f64) -> Result<()> {
    std::fs::create_dir_all(&common.out)?;
    for &v in values {
        let cfg = RunConfig {
            problem,
            order: common.order as usize,
            levels: common.levels,
            diffusion: v,
            reaction,
            tol: common.tol,
        };
        let progress = |r: &ErrorRecord| eprintln!("  h = {} done in {:.1}s", r.h, r.seconds);
        let records = match problem {
            Problem::QuadCurl => run_quadcurl(&cfg, progress)?,
            Problem::Brinkman => run_brinkman(&cfg, progress)?,
        };
        let name = format!("{}_r{}_{}.csv", problem.name(), cfg.order, v);
        let path = common.out.join(name);
        write_csv(&path, &records)?;
        print_summary(&format!("{} r={} param={v} -> {}", problem.name(), cfg.order, path.display()), &records);
    }
    Ok(())
}

fn parse_divisions(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<usize> = s.split('x').map(str::parse).collect::<std::result::Result<_, _>>()?;
    anyhow::ensure!(parts.len() == 3, "mesh must look like 2x3x2");
    Ok([parts[0], parts[1], parts[2]])
}

fn audit(order: usize, divisions: &str, out: Option<&Path>) -> Result<()> {
    let [a, b, c] = parse_divisions(divisions)?;
    let mesh = build_box_mesh(Box3::from_bounds([0.0; 3], [1.0; 3]), a, b, c)?;
    let mut ok = true;
    for complex in [Complex::Nonconforming, Complex::Conforming] {
        for bc in [Bc::None, Bc::Homogeneous] {
            let rep = check_exactness(&mesh, order, bc, complex)?;
            print!("{}", rep.to_table());
            println!();
            ok &= rep.passed();
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)?;
                let name = format!("audit_{complex:?}_{bc:?}_r{order}_{divisions}.csv").to_lowercase();
                std::fs::write(dir.join(name), rep.to_csv())?;
            }
        }
    }
    anyhow::ensure!(ok, "exactness audit failed");
    Ok(())
}

fn interp(order: usize, levels: usize) -> Result<()> {
    for (fam, ex) in [
        (Family::SPlus1, Example::One),
        (Family::SPlus1, Example::Two),
        (Family::SPlus2, Example::One),
        (Family::SPlus2, Example::Two),
    ] {
        let errs = run_interp(fam, order, levels, ex)?;
        let orders = eoc(&errs.iter().map(|e| e.1).collect::<Vec<_>>());
        println!("{fam} r={order}, example {ex:?}: L2 interpolation error");
        for (k, (h, e)) in errs.iter().enumerate() {
            let o = k.checked_sub(1).and_then(|i| orders[i]).map(|o| format!("{o:.3}")).unwrap_or_default();
            println!("  h = {h:<8} {e:.6e}  {o}");
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Quadcurl { common, mu, gamma } => sweep(Problem::QuadCurl, &common, &mu, gamma),
        Cmd::Brinkman { common, nu, alpha } => sweep(Problem::Brinkman, &common, &nu, alpha),
        Cmd::Audit { order, mesh, out } => audit(order as usize, &mesh, out.as_deref()),
        Cmd::Interp { order, levels } => interp(order as usize, levels),
    }
}
