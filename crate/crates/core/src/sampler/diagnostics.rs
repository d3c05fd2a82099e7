use crate::error::{Error, Result};
use crate::rand_dist::normal_quantile;

pub const MIN_DRAWS_PER_CHAIN: usize = 100;

/// Posterior summary of one scalar parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub rhat: f64,
    pub ess: f64,
}

/// Per-parameter mean, sd, split-R-hat and effective sample size.
///
/// `chains[c][i]` is the flat parameter vector of draw `i` in chain `c`.
/// R-hat is the largest of the rank-normalized bulk and folded statistics
/// and the classical split statistic on the raw draws; the rank-based ones
/// saturate when chains do not overlap at all, so the raw one is kept to
/// flag that case loudly.
pub fn diagnostics(names: &[String], chains: &[Vec<Vec<f64>>]) -> Result<Vec<ParamSummary>> {
    if chains.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 chains, got {}", chains.len())));
    }
    let n = chains[0].len();
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("chains have different lengths".into()));
    }
    if n < MIN_DRAWS_PER_CHAIN {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_DRAWS_PER_CHAIN} draws per chain, got {n}"
        )));
    }
    if chains.iter().flatten().any(|d| d.len() != names.len()) {
        return Err(Error::InvalidArgument("draw width does not match parameter names".into()));
    }
    Ok(names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let series: Vec<Vec<f64>> = chains
                .iter()
                .map(|c| c.iter().map(|d| d[j]).collect())
                .collect();
            summarize(name, &series)
        })
        .collect())
}

fn summarize(name: &str, chains: &[Vec<f64>]) -> ParamSummary {
    let all: Vec<f64> = chains.iter().flatten().copied().collect();
    let (mean, var) = mean_var(&all);
    let (rhat, ess) = if var <= 1e-300 * mean.abs().max(1.0) {
        // Fixed or pinned parameter.
        (1.0, all.len() as f64)
    } else {
        let split = split_chains(chains);
        let ranked = rank_normalize(&split);
        let median = {
            let mut s = all.clone();
            s.sort_by(f64::total_cmp);
            crate::forecast::quantile_sorted(&s, 0.5)
        };
        let folded: Vec<Vec<f64>> = split
            .iter()
            .map(|c| c.iter().map(|v| (v - median).abs()).collect())
            .collect();
        let rhat = [
            potential_scale_reduction(&ranked),
            potential_scale_reduction(&rank_normalize(&folded)),
            potential_scale_reduction(&split),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
        (rhat, effective_sample_size(chains))
    };
    ParamSummary {
        name: name.to_string(),
        mean,
        sd: var.sqrt(),
        rhat,
        ess,
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var)
}

fn split_chains(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    chains
        .iter()
        .flat_map(|c| {
            let half = c.len() / 2;
            // Drop the middle draw of odd-length chains.
            [c[..half].to_vec(), c[c.len() - half..].to_vec()]
        })
        .collect()
}

/// Replace draws by normal scores of their pooled ranks (average ranks for
/// ties), `Phi^-1((r - 3/8) / (S + 1/4))`.
fn rank_normalize(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut idx: Vec<(usize, usize)> = chains
        .iter()
        .enumerate()
        .flat_map(|(c, v)| (0..v.len()).map(move |i| (c, i)))
        .collect();
    idx.sort_by(|a, b| chains[a.0][a.1].total_cmp(&chains[b.0][b.1]));
    let total = idx.len() as f64;
    let mut out: Vec<Vec<f64>> = chains.iter().map(|c| vec![0.0; c.len()]).collect();
    let mut start = 0;
    while start < idx.len() {
        let value = chains[idx[start].0][idx[start].1];
        let mut end = start + 1;
        while end < idx.len() && chains[idx[end].0][idx[end].1] == value {
            end += 1;
        }
        let rank = 0.5 * ((start + 1) + end) as f64;
        let z = normal_quantile((rank - 0.375) / (total + 0.25));
        for &(c, i) in &idx[start..end] {
            out[c][i] = z;
        }
        start = end;
    }
    out
}

fn potential_scale_reduction(chains: &[Vec<f64>]) -> f64 {
    let n = chains[0].len() as f64;
    let stats: Vec<(f64, f64)> = chains.iter().map(|c| mean_var(c)).collect();
    let w = stats.iter().map(|s| s.1).sum::<f64>() / stats.len() as f64;
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let b_over_n = mean_var(&means).1;
    if w <= 0.0 {
        return if b_over_n > 0.0 { f64::INFINITY } else { 1.0 };
    }
    (((n - 1.0) / n * w + b_over_n) / w).sqrt()
}

/// Multi-chain effective sample size with Geyer's initial positive sequence:
/// autocorrelations are summed in adjacent pairs until the first negative
/// pair sum.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len() as f64;
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    if n < 4 {
        return f64::NAN;
    }
    let stats: Vec<(f64, f64)> = chains.iter().map(|c| mean_var(&c[..n])).collect();
    let w = stats.iter().map(|s| s.1).sum::<f64>() / m;
    let b_over_n = if chains.len() > 1 {
        mean_var(&stats.iter().map(|s| s.0).collect::<Vec<_>>()).1
    } else {
        0.0
    };
    let nf = n as f64;
    let var_plus = (nf - 1.0) / nf * w + b_over_n;
    if var_plus <= 0.0 {
        return m * nf;
    }
    let autocov = |lag: usize| -> f64 {
        chains
            .iter()
            .zip(&stats)
            .map(|(c, (mu, _))| {
                (0..n - lag).map(|i| (c[i] - mu) * (c[i + lag] - mu)).sum::<f64>() / nf
            })
            .sum::<f64>()
            / m
    };
    let rho = |lag: usize| 1.0 - (w - autocov(lag)) / var_plus;
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if pair < 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    // Cap at a multiple of the draw count, as antithetic chains can push
    // the estimate above it.
    (m * nf / tau.max(1e-12)).min(m * nf * (m * nf).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rand_dist::{sample_standard_normal, RngState};

    fn iid(rng: &mut RngState, n: usize, shift: f64) -> Vec<Vec<f64>> {
        (0..n).map(|_| vec![shift + sample_standard_normal(rng)]).collect()
    }

    #[test]
    fn iid_chains_mix() {
        let mut rng = RngState::from_seed(4);
        let chains: Vec<_> = (0..4).map(|_| iid(&mut rng, 1000, 0.0)).collect();
        let s = &diagnostics(&["x".into()], &chains).unwrap()[0];
        assert!((s.rhat - 1.0).abs() < 0.01, "rhat {}", s.rhat);
        assert!((s.ess / 4000.0 - 1.0).abs() < 0.1, "ess {}", s.ess);
        assert!(s.mean.abs() < 0.1 && (s.sd - 1.0).abs() < 0.05);
    }

    #[test]
    fn separated_chains_flagged() {
        let mut rng = RngState::from_seed(5);
        let chains = vec![iid(&mut rng, 500, -10.0), iid(&mut rng, 500, 10.0)];
        let s = &diagnostics(&["x".into()], &chains).unwrap()[0];
        assert!(s.rhat > 3.0, "rhat {}", s.rhat);
    }

    #[test]
    fn rank_based_rhat_catches_scale_differences() {
        let mut rng = RngState::from_seed(6);
        let mut wide = iid(&mut rng, 1000, 0.0);
        wide.iter_mut().for_each(|d| d[0] *= 10.0);
        let chains = vec![iid(&mut rng, 1000, 0.0), wide];
        let s = &diagnostics(&["x".into()], &chains).unwrap()[0];
        assert!(s.rhat > 1.1, "rhat {}", s.rhat);
    }

    #[test]
    fn autocorrelation_lowers_ess() {
        let mut rng = RngState::from_seed(7);
        let chains: Vec<Vec<f64>> = (0..2)
            .map(|_| {
                let mut x = 0.0;
                (0..2000)
                    .map(|_| {
                        x = 0.9 * x + sample_standard_normal(&mut rng);
                        x
                    })
                    .collect()
            })
            .collect();
        // AR(1) with phi = 0.9: n (1 - phi) / (1 + phi) ~ 4000 / 19
        let ess = effective_sample_size(&chains);
        assert!((ess / (4000.0 / 19.0) - 1.0).abs() < 0.35, "ess {ess}");
    }

    #[test]
    fn pinned_parameters_and_bad_input() {
        let chains = vec![vec![vec![2.0]; 100]; 2];
        let s = &diagnostics(&["l1".into()], &chains).unwrap()[0];
        assert_eq!(s.rhat, 1.0);
        assert!(diagnostics(&["x".into()], &chains[..1]).is_err());
        assert!(diagnostics(&["x".into()], &[vec![vec![0.0]; 99], vec![vec![0.0]; 99]]).is_err());
    }
}
