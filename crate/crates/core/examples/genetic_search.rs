//! Run the genetic search with a cheap closed-form fitness so the mechanics
//! are visible in a second, then show the logged lineage.
//!
//! ```text
//! cargo run --example genetic_search
//! ```

use bcgauth::evolution::{run_ga_with, GaConfig, ScoredGenome};
use bcgauth::nn::{Activation, CnnGenome};

// Pretend small tanh networks with one dense layer generalize best.
fn toy_fitness(g: &CnnGenome) -> ScoredGenome {
    let far = 0.1 * g.n_conv_layers as f64 + if g.activation == Activation::Tanh { 0.0 } else { 0.2 };
    let frr = g.dense_units as f64 / 256.0 + 0.2 * (g.n_dense_layers - 1) as f64;
    ScoredGenome::new(*g, far, frr)
}

fn main() -> bcgauth::Result<()> {
    let cfg = GaConfig {
        seed: 4,
        ..GaConfig::default()
    };
    println!(
        "population {}, {} elites + {} random parents, {} children, mutation {}",
        cfg.population,
        cfg.n_elites(),
        cfg.random_parents,
        cfg.children_per_gen,
        cfg.mutation_rate
    );
    let run = run_ga_with(&cfg, |g, _, _| Ok(toy_fitness(g)))?;
    for (gen, (pop, best)) in run.history.iter().zip(&run.best_so_far).enumerate() {
        let mean = pop.iter().map(|s| s.score).sum::<f64>() / pop.len() as f64;
        println!("generation {gen}: best so far {best:.4}, population mean {mean:.4}");
    }
    let fresh = run.log.iter().filter(|r| !r.cached).count();
    println!("{fresh} trainings, {} cached parent scores", run.log.len() - fresh);
    println!("best: {:?}\n  FAR {:.3} FRR {:.3} score {:.4}", run.best.genome, run.best.far, run.best.frr, run.best.score);
    Ok(())
}
