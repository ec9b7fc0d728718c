use std::path::Path;

use paramexpmv::linalg::{mmio, Vector};
use paramexpmv::solver::{build, solve_adaptive, AdaptiveOptions, ErrorReport};
use paramexpmv::{Error, Result, Scalar};
use rayon::prelude::*;

use crate::args::SolveArgs;
use crate::output;
use crate::problem::{self, Problem};
use crate::Status;

pub const DEFAULT_TOL: f64 = 1e-8;
const HEADER: [&str; 5] = ["t", "eps", "p_used", "aposteriori_estimate", "apriori_total"];

pub fn run(args: &SolveArgs) -> Result<Status> {
    if problem::needs_complex(&args.source, &args.eps)? {
        run_typed::<num_complex::Complex64>(args)
    } else {
        run_typed::<f64>(args)
    }
}

fn run_typed<T: Scalar>(args: &SolveArgs) -> Result<Status> {
    if let Some(t) = args.t.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    let Problem { poly, u0 } = problem::load::<T>(&args.source)?;
    let scalings = problem::scalings(&args.scaling, &poly)?;
    let [scaling] = scalings[..] else {
        return Err(Error::InvalidArgument("solve takes a single --gamma".into()));
    };
    let targets: Vec<(f64, T)> = args
        .t
        .iter()
        .flat_map(|&t| args.eps.iter().map(move |&e| (t, problem::to_scalar::<T>(e))))
        .collect();

    let (solution, reports, converged) = match args.p {
        Some(p) => {
            let sol = build(&poly, &u0, p, scaling)?;
            let reports: Vec<ErrorReport<T>> = targets
                .par_iter()
                .map(|&(t, e)| sol.error_report(t, e))
                .collect::<Result<_>>()?;
            let converged = match args.tol {
                Some(tol) => sol.is_breakdown() || reports.iter().all(|r| r.total_estimate <= tol),
                None => true,
            };
            (sol, reports, converged)
        }
        None => {
            let opts = AdaptiveOptions {
                scaling,
                check_interval: args.check_interval,
            };
            let out = solve_adaptive(&poly, &u0, &targets, args.tol.unwrap_or(DEFAULT_TOL), args.p_max, opts)?;
            (out.solution, out.reports, out.converged)
        }
    };

    let rows: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                output::num(r.t),
                output::scalar(r.eps),
                r.p,
                output::num(r.total_estimate),
                output::num(r.apriori_total)
            )
        })
        .collect();
    output::emit(args.out.as_deref(), &output::csv(&HEADER, &rows))?;

    if let Some(dir) = &args.solutions {
        write_solutions(dir, &targets, |t, e| solution.evaluate(t, e))?;
    }
    if converged {
        Ok(Status::Success)
    } else {
        let worst = reports.iter().map(|r| r.total_estimate).fold(0.0, f64::max);
        Ok(Status::Unreached(format!(
            "estimate {worst:.3e} above tolerance {:.3e} after p = {}",
            args.tol.unwrap_or(DEFAULT_TOL),
            solution.p()
        )))
    }
}

fn write_solutions<T: Scalar>(
    dir: &Path,
    targets: &[(f64, T)],
    eval: impl Fn(f64, T) -> Result<Vector<T>> + Sync,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    targets
        .par_iter()
        .enumerate()
        .try_for_each(|(i, &(t, e))| mmio::write_vector(dir.join(format!("u{i:04}.mtx")), &eval(t, e)?))
}
