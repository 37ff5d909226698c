use ztbench_core::harness::{compare_engines, monte_carlo, RunConfig, HEADLINE_METRICS};

fn main() {
    let mut config = RunConfig::default();
    config.runs = 10;
    let report = monte_carlo(&config).unwrap();
    for engine in &report.engines {
        println!("== {}", engine.engine);
        for (name, s) in &engine.metrics {
            println!("  {name:12} mean {:.4} +- {:.4}  [{:.4}, {:.4}]", s.mean, s.std, s.min, s.max);
        }
        for (k, v) in &engine.per_scenario {
            println!("  scenario {k:24} allowed {} challenged {} blocked {}", v.allowed, v.challenged, v.blocked);
        }
    }
    let tests = compare_engines(&report, &HEADLINE_METRICS, 0.05, 0.05).unwrap();
    for t in &tests.tests {
        println!("{:5} test={} stat={:.3} p={:.3e} sig={} d={:?} rb={:?}",
            t.metric, t.test, t.statistic, t.p_value, t.significant_after_bonferroni, t.cohens_d, t.rank_biserial);
    }
}
