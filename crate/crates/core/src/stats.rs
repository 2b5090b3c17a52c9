use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("at least one sample is required")]
pub struct EmptySamples;

/// Mean, sample standard deviation (`n - 1` denominator) and count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

pub(crate) fn summarize<I>(samples: I) -> Result<SampleSummary, EmptySamples>
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = samples.into_iter();
    let Some(pivot) = iter.clone().next() else {
        return Err(EmptySamples);
    };
    // Accumulate about the first sample: exact for constant series and
    // free of cancellation when the spread is small next to the magnitude.
    let (n, shifted_sum) = iter
        .clone()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + (v - pivot)));
    let shifted_mean = shifted_sum / n as f64;
    let mean = pivot + shifted_mean;
    let std = if n == 1 {
        0.0
    } else {
        let ss: f64 = iter
            .map(|v| {
                let dev = (v - pivot) - shifted_mean;
                dev * dev
            })
            .sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(SampleSummary { mean, std, n })
}
