/// Sample mean and standard error of the mean.
pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Delete-one-block jackknife for a smooth function of per-sample means.
///
/// `samples[i]` holds the observables of sample `i`; `stat` maps the vector
/// of observable means to the reported statistic.
pub(crate) fn jackknife<F>(samples: &[Vec<f64>], block: usize, stat: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = samples.first().map_or(0, Vec::len);
    let nblocks = (samples.len() / block).max(1);
    let used = if samples.len() >= block { nblocks * block } else { samples.len() };
    let per_block = used / nblocks;

    let mut block_sums = vec![vec![0.0; dim]; nblocks];
    let mut total = vec![0.0; dim];
    for (i, s) in samples[..used].iter().enumerate() {
        let b = i / per_block;
        for j in 0..dim {
            block_sums[b][j] += s[j];
            total[j] += s[j];
        }
    }
    let full: Vec<f64> = total.iter().map(|t| t / used as f64).collect();
    let theta = stat(&full);
    if nblocks < 2 {
        return (theta, f64::NAN);
    }
    let rest = (used - per_block) as f64;
    let leave_out: Vec<f64> = block_sums
        .iter()
        .map(|bs| {
            let m: Vec<f64> = total.iter().zip(bs).map(|(t, b)| (t - b) / rest).collect();
            stat(&m)
        })
        .collect();
    let g = nblocks as f64;
    let lm = leave_out.iter().sum::<f64>() / g;
    let var = (g - 1.0) / g * leave_out.iter().map(|x| (x - lm) * (x - lm)).sum::<f64>();
    (theta, var.sqrt())
}

/// Ordinary least squares `y = slope·x + intercept`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
