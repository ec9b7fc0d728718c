use paramexpmv::problems::write_problem;
use paramexpmv::Result;

use crate::args::GenerateArgs;
use crate::problem;
use crate::Status;

pub fn run(args: &GenerateArgs) -> Result<Status> {
    let (poly, u0, params) = problem::generate(args.problem, &args.generator)?;
    let manifest = write_problem(&args.out, problem::name(args.problem), params, &poly, &u0)?;
    println!("{}", manifest.display());
    Ok(Status::Success)
}
