#![allow(dead_code)]

use hdo_core::detection::{DetectionConfig, Method, Policy};
use hdo_core::mdm::{UtilityFunction, UtilityKind};
use hdo_core::orchestrator::{Mode, RunConfig};
use hdo_core::problems::{DtlzVariant, ProblemSpec};
use hdo_core::RelevantSet;

/// A DTLZ2 run small enough for debug-build tests.
pub fn tiny(mode: Mode, interactions: usize) -> RunConfig {
    let uf = UtilityFunction::quadratic(UtilityKind::Uf1, RelevantSet::new(vec![0, 2]).unwrap()).unwrap();
    let mut cfg = RunConfig::new(ProblemSpec::Dtlz { variant: DtlzVariant::Dtlz2, m: 5, n: None }, Some(uf), mode);
    cfg.nsga2.population_size = 16;
    cfg.nsga2.offspring_per_generation = 16;
    cfg.total_generations = 20;
    cfg.gen_first = 6;
    cfg.gen_between = 4;
    cfg.interactions = interactions;
    if mode == Mode::Detection {
        cfg.detection = Some(DetectionConfig::new(Method::Univariate, Policy::Threshold(0.3)).unwrap());
    }
    cfg
}
