use std::path::Path;

use paramexpmv::linalg::Vector;
use paramexpmv::reference::{dense_cap, dense_solution, DENSE_CAP_ENV};
use paramexpmv::solver::{build, ParameterizedSolution};
use paramexpmv::{Error, Result, Scalar};
use rayon::prelude::*;

use crate::args::ConvergenceArgs;
use crate::output;
use crate::problem::{self, Problem};
use crate::Status;

/// Extra steps of the reference run with `--self-reference`.
pub const SELF_REFERENCE_EXTRA: usize = 10;
const HEADER: [&str; 7] = [
    "p",
    "eps",
    "true_error",
    "aposteriori_estimate",
    "apriori_total",
    "gamma",
    "krylov_estimate",
];

pub fn run(args: &ConvergenceArgs) -> Result<Status> {
    if problem::needs_complex(&args.source, &args.eps)? {
        run_typed::<num_complex::Complex64>(args)
    } else {
        run_typed::<f64>(args)
    }
}

struct Series {
    eps: String,
    gamma: String,
}

fn run_typed<T: Scalar>(args: &ConvergenceArgs) -> Result<Status> {
    if !args.t.is_finite() || args.p_max == 0 {
        return Err(Error::InvalidArgument("need a finite --t and a positive --p-max".into()));
    }
    let Problem { poly, u0 } = problem::load::<T>(&args.source)?;
    let eps: Vec<T> = args.eps.iter().map(|&e| problem::to_scalar(e)).collect();
    let t = args.t;

    let dense_refs = if args.self_reference {
        None
    } else {
        if poly.dim() > dense_cap() {
            return Err(Error::InvalidArgument(format!(
                "dimension {} exceeds the dense reference cap {} (raise {DENSE_CAP_ENV} or pass --self-reference)",
                poly.dim(),
                dense_cap()
            )));
        }
        Some(
            eps.par_iter()
                .map(|&e| dense_solution(&poly, &u0, t, e))
                .collect::<Result<Vec<_>>>()?,
        )
    };

    let extra = if args.self_reference { SELF_REFERENCE_EXTRA } else { 0 };
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for scaling in problem::scalings(&args.scaling, &poly)? {
        let sol = build(&poly, &u0, args.p_max + extra, scaling)?;
        let refs: Vec<Vector<T>> = match &dense_refs {
            Some(r) => r.clone(),
            None => eps.iter().map(|&e| sol.evaluate(t, e)).collect::<Result<_>>()?,
        };
        // a breakdown ends the run early; the reference run may then be the same run
        let p_last = args.p_max.min(sol.p());
        let gamma = output::num(sol.gamma());
        let cells: Vec<(usize, usize)> = (0..eps.len()).flat_map(|i| (1..=p_last).map(move |p| (i, p))).collect();
        let block: Vec<String> = cells
            .par_iter()
            .map(|&(i, p)| row(&sol, p, t, eps[i], &refs[i], &gamma))
            .collect::<Result<_>>()?;
        rows.extend(block);
        series.extend(eps.iter().map(|&e| Series {
            eps: output::scalar(e),
            gamma: gamma.clone(),
        }));
    }
    let csv = output::csv(&HEADER, &rows);
    output::emit(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.out {
        write_gnuplot(path, &series)?;
    }
    Ok(Status::Success)
}

fn row<T: Scalar>(
    sol: &ParameterizedSolution<T>,
    p: usize,
    t: f64,
    eps: T,
    reference: &Vector<T>,
    gamma: &str,
) -> Result<String> {
    let view = sol.view(p)?;
    let err = (view.evaluate(t, eps)? - reference).norm();
    let r = view.error_report(t, eps)?;
    Ok(format!(
        "{p},{},{},{},{},{gamma},{}",
        output::scalar(eps),
        output::num(err),
        output::num(r.total_estimate),
        output::num(r.apriori_total),
        output::num(r.aposteriori_krylov)
    ))
}

/// Log-scale plot of error (solid) and estimate (dashed) per series.
fn write_gnuplot(csv: &Path, series: &[Series]) -> Result<()> {
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::from(
        "# gnuplot script; run from the directory holding the CSV\n\
         set datafile separator \",\"\n\
         set logscale y\n\
         set format y \"10^{%L}\"\n\
         set xlabel \"p\"\n\
         set ylabel \"2-norm error\"\n\
         set key outside right\n\
         plot \\\n",
    );
    let multi_gamma = series.iter().any(|x| x.gamma != series[0].gamma);
    let mut clauses = Vec::new();
    for (k, x) in series.iter().enumerate() {
        let filter = format!("(strcol(2) eq \"{}\" && strcol(6) eq \"{}\"", x.eps, x.gamma);
        let label = if multi_gamma {
            format!("eps={} gamma={}", x.eps, x.gamma)
        } else {
            format!("eps={}", x.eps)
        };
        clauses.push(format!(
            "  \"{file}\" skip 1 using 1:{filter} ? $3 : 1/0) with lines lc {c} dt 1 title \"error {label}\"",
            c = k + 1
        ));
        clauses.push(format!(
            "  \"{file}\" skip 1 using 1:{filter} ? $4 : 1/0) with lines lc {c} dt 2 title \"estimate {label}\"",
            c = k + 1
        ));
    }
    s.push_str(&clauses.join(", \\\n"));
    s.push('\n');
    let path = csv.with_extension("gp");
    std::fs::write(&path, s).map_err(|e| Error::Io { path, source: e })
}
