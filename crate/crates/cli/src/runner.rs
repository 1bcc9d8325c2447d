//! Rayon-backed chain execution; results stay positionally aligned with the
//! seed list, so the output is identical to the serial runner's.

use pathdim_core::pimc::{run_chain, ChainConfig, ChainOutput, ChainRunner, PimcError, PotentialSpec};
use pathdim_core::propagator::PhysParams;
use rayon::prelude::*;

pub struct RayonRunner;

impl ChainRunner for RayonRunner {
    fn run(
        &self,
        pot: &PotentialSpec,
        p: &PhysParams,
        cfg: &ChainConfig,
        seeds: &[u64],
    ) -> Result<Vec<ChainOutput>, PimcError> {
        seeds.par_iter().map(|&s| run_chain(pot, p, cfg, s)).collect()
    }
}
