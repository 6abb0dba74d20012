//! Expected loads under Poisson occupancies, exact and sampled.

use fogran::agnostic::{
    agnostic_shared_point, reference_distribution, sanity_tail_probability, variance_partition, AgnosticOptions,
    Evaluation, Marginal, TopologyDistribution,
};

fn main() -> fogran::Result<()> {
    let small = TopologyDistribution::new(Marginal::Poisson(1.0), vec![Marginal::Poisson(2.0), Marginal::Poisson(1.0)], 8)?;
    let phi = variance_partition(&small, 2)?;
    let exact = agnostic_shared_point(&small, &phi, 1, 1, &AgnosticOptions::new(Evaluation::Exhaustive { cap: 1_000_000 }))?;
    let sampled =
        agnostic_shared_point(&small, &phi, 1, 1, &AgnosticOptions::new(Evaluation::MonteCarlo { samples: 50_000, seed: 1 }))?;
    println!("M = {}: exact R_mbs = {:.6}, sampled {:.6} +- {:.6}", exact.m, exact.r_mbs.value, sampled.r_mbs.value, sampled.r_mbs.std_err);

    let reference = reference_distribution();
    for g in 2..=reference.h() {
        println!("least-variance {g}-way partition: {}", variance_partition(&reference, g)?);
    }
    println!("tail estimate: {}", sanity_tail_probability(&reference, 1_000_000, 3)?);
    Ok(())
}
