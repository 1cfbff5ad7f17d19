mod curves;
mod phase;
mod reach;
mod sanov;
mod simulate;

use anyhow::{bail, Context, Result};
use telic::Base;

use crate::config::{self, LoadedConfig, Operation};
use crate::output::{OutputDir, Provenance};
use crate::RunArgs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The run finished and its outputs are written, but the answer is no.
    Negative(String),
}

/// A resolved run: config, seed, base and output directory.
pub struct Run {
    pub cfg: LoadedConfig,
    pub seed: u64,
    pub base: Base,
    pub out: OutputDir,
}

pub fn execute(op: Option<Operation>, args: &RunArgs) -> Result<Outcome> {
    let cfg = config::load(&args.config)?;
    let op = match (op, cfg.config.operation) {
        (Some(a), Some(b)) if a != b => {
            bail!("config names operation `{}` but `{}` was requested", b.name(), a.name())
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => bail!("config has no `operation`; name a subcommand instead"),
    };
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = args.seed.or(cfg.config.seed).unwrap_or(0);
    let base = args.base.or(cfg.config.base).unwrap_or_default();
    let root = args
        .out
        .clone()
        .or_else(|| cfg.config.out.clone())
        .context("no output directory: pass --out or set `out` in the config")?;
    let out = OutputDir::create(&root, Provenance::new(op.name(), seed, base, &cfg))?;
    let mut run = Run { cfg, seed, base, out };
    let outcome = match op {
        Operation::Simulate => simulate::run(&mut run)?,
        Operation::Phase => phase::run(&mut run)?,
        Operation::Reach => reach::run(&mut run, false)?,
        Operation::Refine => reach::run(&mut run, true)?,
        Operation::Curves => curves::run(&mut run)?,
        Operation::Sanov => sanov::run(&mut run)?,
    };
    run.out.finish()?;
    Ok(outcome)
}
