use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FairnessError {
    #[error("no throughputs given")]
    Empty,
    #[error("throughput {0} is negative or not finite")]
    Invalid(usize),
    #[error("all throughputs are zero; the index is undefined")]
    AllZero,
}

/// Jain's index `(Σx)² / (n·Σx²)`, in `(0, 1]`.
pub fn jain_fairness(throughputs: &[f64]) -> Result<f64, FairnessError> {
    if throughputs.is_empty() {
        return Err(FairnessError::Empty);
    }
    if let Some(i) = throughputs
        .iter()
        .position(|x| !(x.is_finite() && *x >= 0.0))
    {
        return Err(FairnessError::Invalid(i));
    }
    let sum: f64 = throughputs.iter().sum();
    if sum == 0.0 {
        return Err(FairnessError::AllZero);
    }
    let sq: f64 = throughputs.iter().map(|x| x * x).sum();
    Ok(sum * sum / (throughputs.len() as f64 * sq))
}
