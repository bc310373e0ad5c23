use std::io::Write;

use tiledscan::{generate_blobs, write_points};

use crate::{CliError, GenArgs};

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let points = generate_blobs(args.n, args.clusters, args.spread, args.noise, args.seed)?;
    write_points(&points, &args.out)?;
    writeln!(out, "{} {}", args.out.display(), points.len()).map_err(tiledscan::Error::from)?;
    Ok(())
}
