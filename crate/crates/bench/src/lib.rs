//! Deterministic workloads shared by the benchmarks.

use histclaims_core::{Amount, ClaimsProblem, HistoricalProblem, History, PeriodRecord};

/// `n` agents with `periods` past periods; data cycles through small
/// fractions so that every rule hits several breakpoints.
pub fn workload(n: usize, periods: usize) -> HistoricalProblem {
    let value = |k: usize| Amount::new((k * 37 % 23 + 1) as i64, (k % 5 + 1) as i64);
    let claims: Vec<Amount> = (0..n).map(value).collect();
    let total: Amount = claims.iter().sum();
    let history = (0..periods)
        .map(|t| {
            let past: Vec<Amount> = (0..n).map(|i| value(i * 3 + t + 1)).collect();
            let awarded = past
                .iter()
                .enumerate()
                .map(|(i, c)| c * &Amount::new((i % 3) as i64, 3))
                .collect();
            PeriodRecord::new(past, awarded)
        })
        .collect();
    HistoricalProblem::new(
        ClaimsProblem::with_natural_agents(claims, &total * &Amount::new(2, 5)),
        History::new(history),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use histclaims_core::validate_historical;

    #[test]
    fn workloads_are_valid() {
        for n in [2, 10, 100] {
            validate_historical(&workload(n, 3)).unwrap();
        }
    }
}
