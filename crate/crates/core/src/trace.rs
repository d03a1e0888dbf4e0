/// One line of an optimizer trace. `best_value` is the best objective value seen so
/// far, `fevals` the cumulative evaluation count and `elapsed_ms` the wall time since
/// the run started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_value: f64,
    pub fevals: u64,
    pub elapsed_ms: f64,
}

/// True when `best_value` never increases along the trace.
pub fn is_non_increasing(trace: &[IterationRecord]) -> bool {
    trace.windows(2).all(|w| !(w[1].best_value > w[0].best_value))
}

/// Result of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<IterationRecord>,
    pub fevals: u64,
}
