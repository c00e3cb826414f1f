//! Regenerates the oracle cache used by `laguerre-difmat stability-study`.
//!
//! usage: oracle-cache <dir> [max_npts] [step] [family]

use std::path::PathBuf;
use std::process::ExitCode;

use laguerre_oracle::{cache, oracle_nodes, Family};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(dir) = args.first().map(PathBuf::from) else {
        eprintln!("usage: oracle-cache <dir> [max_npts=1000] [step=10] [family=augmented-gauss]");
        return ExitCode::from(2);
    };
    let max: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let step: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);
    let family = args
        .get(3)
        .map(|s| Family::from_tag(s))
        .unwrap_or(Some(Family::AugmentedGauss));
    let Some(family) = family else {
        eprintln!("unknown family");
        return ExitCode::from(2);
    };
    let alpha = family.default_alpha();
    let mut npts = step.max(2);
    while npts <= max {
        match oracle_nodes(family, alpha, npts).and_then(|on| cache::write_nodes(&dir, &on)) {
            Ok(p) => eprintln!("wrote {}", p.display()),
            Err(e) => {
                eprintln!("npts={npts}: {e}");
                return ExitCode::FAILURE;
            }
        }
        npts += step;
    }
    ExitCode::SUCCESS
}
