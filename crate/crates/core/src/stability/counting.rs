use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::integrator::{delay_lag, SimulationGrid};
use crate::model::{delay_multiplicity_bound, DelayFunction};

/// How often each delayed index `a_j = j - ⌊δ(jΔ)/Δ⌋` is referenced for `j = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingReport {
    pub max_count: usize,
    pub bound: usize,
    /// A delayed index attaining `max_count`.
    pub witness: i64,
    pub holds: bool,
    #[serde(skip)]
    pub multiplicities: BTreeMap<i64, usize>,
}

pub fn counting_check(
    delay: &DelayFunction,
    grid: &SimulationGrid,
    k_max: usize,
) -> Result<CountingReport> {
    let mut multiplicities = BTreeMap::new();
    for j in 0..=k_max.max(1) {
        let a = j as i64 - delay_lag(j, grid, delay)?;
        *multiplicities.entry(a).or_insert(0usize) += 1;
    }
    let (witness, max_count) = multiplicities
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&a, &c)| (a, c))
        .unwrap_or((0, 0));
    let bound = delay_multiplicity_bound(delay.eta()) as usize;
    Ok(CountingReport {
        max_count,
        bound,
        witness,
        holds: max_count <= bound,
        multiplicities,
    })
}
