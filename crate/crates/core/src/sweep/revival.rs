use serde::Serialize;

/// One `𝓛 > ε` interval met while `β_S` decreases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hump {
    /// First grid point above `ε`.
    pub beta_revival: f64,
    /// First grid point back at or below `ε`; `None` if the grid ends first.
    pub beta_collapse: Option<f64>,
    pub peak: f64,
    pub beta_peak: f64,
    /// Grid points inside the interval.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalReport {
    pub epsilon: f64,
    pub beta_r1: Option<f64>,
    pub beta_c1: Option<f64>,
    pub beta_r2: Option<f64>,
    pub beta_c2: Option<f64>,
    pub lm1: Option<f64>,
    pub lm2: Option<f64>,
    pub hump_count: usize,
    pub humps: Vec<Hump>,
    /// Set when an interval touches a grid end or spans a single point.
    pub warning: Option<String>,
    /// `(ε', hump count)` for the sensitivity thresholds.
    pub sensitivity: Vec<(f64, usize)>,
}

/// Intervals of `ln > eps` along a series.
pub fn count_intervals(ln: &[f64], eps: f64) -> usize {
    let mut count = 0;
    let mut inside = false;
    for &v in ln {
        let above = v > eps;
        if above && !inside {
            count += 1;
        }
        inside = above;
    }
    count
}

/// Scans `ln(β)` in descending `β` order. `betas` may come in either order.
pub fn detect_revivals(betas: &[f64], ln: &[f64], eps: f64, sensitivity: &[f64]) -> RevivalReport {
    assert_eq!(betas.len(), ln.len(), "one value per grid point");
    let mut order: Vec<usize> = (0..betas.len()).collect();
    order.sort_by(|&a, &b| betas[b].total_cmp(&betas[a]));
    let (b, l): (Vec<f64>, Vec<f64>) = order.iter().map(|&i| (betas[i], ln[i])).unzip();

    let mut humps: Vec<Hump> = vec![];
    let mut warnings: Vec<String> = vec![];
    let mut current: Option<Hump> = None;
    for (i, (&beta, &v)) in b.iter().zip(&l).enumerate() {
        match (&mut current, v > eps) {
            (None, true) => {
                if i == 0 {
                    warnings.push(format!("entangled at the first grid point beta_s = {beta}"));
                }
                current = Some(Hump {
                    beta_revival: beta,
                    beta_collapse: None,
                    peak: v,
                    beta_peak: beta,
                    points: 1,
                });
            }
            (Some(h), true) => {
                h.points += 1;
                if v > h.peak {
                    h.peak = v;
                    h.beta_peak = beta;
                }
            }
            (Some(h), false) => {
                h.beta_collapse = Some(beta);
                humps.push(current.take().unwrap());
            }
            (None, false) => {}
        }
    }
    if let Some(h) = current {
        warnings.push(format!(
            "still entangled at the last grid point beta_s = {}",
            b[b.len() - 1]
        ));
        humps.push(h);
    }
    if humps.iter().any(|h| h.points == 1) {
        warnings.push("an interval spans a single grid point; refine the beta grid".into());
    }
    let get = |k: usize| humps.get(k);
    RevivalReport {
        epsilon: eps,
        beta_r1: get(0).map(|h| h.beta_revival),
        beta_c1: get(0).and_then(|h| h.beta_collapse),
        beta_r2: get(1).map(|h| h.beta_revival),
        beta_c2: get(1).and_then(|h| h.beta_collapse),
        lm1: get(0).map(|h| h.peak),
        lm2: get(1).map(|h| h.peak),
        hump_count: humps.len(),
        warning: if warnings.is_empty() {
            None
        } else {
            Some(warnings.join("; "))
        },
        sensitivity: sensitivity
            .iter()
            .map(|&e| (e, count_intervals(&l, e)))
            .collect(),
        humps,
    }
}
