//! Problem sources and scalar-type selection.

use std::collections::BTreeMap;

use num_complex::Complex64;
use paramexpmv::linalg::mmio::{self, Field};
use paramexpmv::linalg::Vector;
use paramexpmv::problems::{gen_advdiff1, gen_advdiff2, gen_wave, load_problem, read_manifest};
use paramexpmv::solver::Scaling;
use paramexpmv::toeplitz::{heuristic_gamma, MatrixPolynomial};
use paramexpmv::{Result, Scalar};

use crate::args::{BuiltIn, GammaSpec, GeneratorArgs, ScalingArgs, SourceArgs};

pub struct Problem<T> {
    pub poly: MatrixPolynomial<T>,
    pub u0: Vector<T>,
}

pub fn name(p: BuiltIn) -> &'static str {
    match p {
        BuiltIn::Advdiff1 => "advdiff1",
        BuiltIn::Advdiff2 => "advdiff2",
        BuiltIn::Wave => "wave",
    }
}

type Generated = (MatrixPolynomial<f64>, Vector<f64>, BTreeMap<String, f64>);

/// Generator output with the parameters that produced it.
pub fn generate(p: BuiltIn, g: &GeneratorArgs) -> Result<Generated> {
    let (poly, u0, params) = match p {
        BuiltIn::Advdiff1 => {
            let (poly, u0) = gen_advdiff1(g.n, g.a)?;
            (poly, u0, vec![("n", g.n as f64), ("a", g.a)])
        }
        BuiltIn::Advdiff2 => {
            let (poly, u0) = gen_advdiff2(g.n, g.a, g.b)?;
            (poly, u0, vec![("n", g.n as f64), ("a", g.a), ("b", g.b)])
        }
        BuiltIn::Wave => {
            let (poly, u0) = gen_wave(g.points, g.gamma1)?;
            (poly, u0, vec![("points", g.points as f64), ("gamma1", g.gamma1)])
        }
    };
    Ok((poly, u0, params.into_iter().map(|(k, v)| (k.to_string(), v)).collect()))
}

/// Whether the run needs complex arithmetic: a complex parameter or a
/// complex-valued input file.
pub fn needs_complex(src: &SourceArgs, eps: &[Complex64]) -> Result<bool> {
    if eps.iter().any(|e| e.im != 0.0) {
        return Ok(true);
    }
    let Some(path) = &src.manifest else {
        return Ok(false);
    };
    for p in &read_manifest(path)?.paths {
        if mmio::peek_field(p)? == Field::Complex {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn load<T: Scalar>(src: &SourceArgs) -> Result<Problem<T>> {
    if let Some(path) = &src.manifest {
        let (_, poly, u0) = load_problem(path)?;
        return Ok(Problem { poly, u0 });
    }
    let which = src.problem.expect("clap requires --problem or --manifest");
    let (poly, u0, _) = generate(which, &src.generator)?;
    let coeffs = poly.coeffs().iter().map(|a| a.map(T::of_real)).collect();
    Ok(Problem {
        poly: MatrixPolynomial::new(coeffs)?,
        u0: u0.map(T::of_real),
    })
}

/// Converts a parsed parameter; callers select `T` via [`needs_complex`].
pub fn to_scalar<T: Scalar>(z: Complex64) -> T {
    T::from_parts(z.re, z.im).expect("complex parameter routed to the complex path")
}

/// The scalings requested on the command line; one entry unless several
/// `--gamma` values are given.
pub fn scalings<T: Scalar>(args: &ScalingArgs, poly: &MatrixPolynomial<T>) -> Result<Vec<Scaling>> {
    if args.no_scaling {
        return Ok(vec![Scaling::None]);
    }
    if args.gamma.is_empty() {
        return Ok(vec![Scaling::Heuristic]);
    }
    let needs_heuristic = args.gamma.iter().any(|g| matches!(g, GammaSpec::Relative(_)));
    let star = if needs_heuristic { heuristic_gamma(poly)? } else { 1.0 };
    Ok(args
        .gamma
        .iter()
        .map(|g| match *g {
            GammaSpec::Absolute(v) => Scaling::Fixed(v),
            GammaSpec::Relative(f) => Scaling::Fixed(f * star),
        })
        .collect())
}
