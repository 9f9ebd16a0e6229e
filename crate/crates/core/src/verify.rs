//! Independent re-checking of piercing and coloring certificates.
//!
//! Every check here is recomputed from the instance and the result data
//! alone; nothing produced by the construction is taken on trust.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{greedy_degeneracy_coloring, Coloring};
use crate::exact::{exact_nu, exact_tau, ExactLimits};
use crate::geometry::{contains_point, intersects, Point};
use crate::igraph::{build_graph_sweep, max_depth_omega};
use crate::instance::Instance;
use crate::pierce::{construct_transversal, PiercingResult, StepKind};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("malformed result: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "instance")]
    pub instance_id: String,
    pub checks: Vec<Check>,
    pub ratios: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn new(instance_id: &str) -> Self {
        VerificationReport {
            instance_id: instance_id.to_string(),
            checks: Vec::new(),
            ratios: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "instance {}: {}",
            self.instance_id,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        for (k, v) in &self.ratios {
            writeln!(f, "  {k} = {v:.4}")?;
        }
        Ok(())
    }
}

fn ceil_usize(r: &Scalar) -> usize {
    r.ceil().to_i64().expect("ratio fits i64") as usize
}

fn ids_in_range(n: usize, ids: &[usize], what: &str) -> Result<(), VerifyError> {
    match ids.iter().find(|&&id| id >= n) {
        Some(id) => Err(VerifyError::Malformed(format!("{what} refers to rectangle {id}, instance has {n}"))),
        None => Ok(()),
    }
}

/// Re-checks a piercing result: completeness, certificate disjointness,
/// trace bookkeeping, the size bound, and that every `eps` round removed
/// exactly the closed neighbourhood of its rectangle.
pub fn verify_piercing(
    i: &Instance,
    res: &PiercingResult,
    instance_id: &str,
) -> Result<VerificationReport, VerifyError> {
    let n = i.len();
    if n == 0 {
        return Err(VerifyError::Malformed("instance is empty".into()));
    }
    ids_in_range(n, &res.certificate, "certificate")?;
    for t in &res.trace {
        ids_in_range(n, &t.removed, "trace")?;
        if let Some(id) = t.rect {
            ids_in_range(n, &[id], "trace")?;
        }
        if (t.kind == StepKind::Eps) != t.rect.is_some() {
            return Err(VerifyError::Malformed(format!(
                "trace step {} has kind {:?} but rect {:?}",
                t.step, t.kind, t.rect
            )));
        }
    }
    let rects = i.rects();
    let points = &res.transversal;
    let mut report = VerificationReport::new(instance_id);

    let uncovered: Vec<usize> = rects
        .iter()
        .filter(|r| !points.iter().any(|p| contains_point(r, p)))
        .map(|r| r.id())
        .collect();
    report.check(
        "completeness",
        uncovered.is_empty(),
        if uncovered.is_empty() {
            format!("all {n} rectangles pierced by {} points", points.len())
        } else {
            format!("rectangles not pierced: {uncovered:?}")
        },
    );

    let mut clash = None;
    'outer: for (a, &x) in res.certificate.iter().enumerate() {
        for &y in &res.certificate[a + 1..] {
            if x == y || intersects(&rects[x], &rects[y]) {
                clash = Some((x, y));
                break 'outer;
            }
        }
    }
    report.check(
        "certificate_disjoint",
        clash.is_none() && !res.certificate.is_empty(),
        match clash {
            Some((x, y)) => format!("rectangles {x} and {y} intersect"),
            None if res.certificate.is_empty() => "certificate is empty".to_string(),
            None => format!("{} pairwise-disjoint rectangles", res.certificate.len()),
        },
    );

    // Bookkeeping: the rounds account for every point and every rectangle,
    // and the certificate lists the eps rectangles in order.
    let added: usize = res.trace.iter().map(|t| t.added).sum();
    let mut removed_count = vec![0usize; n];
    for t in &res.trace {
        for &id in &t.removed {
            removed_count[id] += 1;
        }
    }
    let eps_ids: Vec<usize> = res.trace.iter().filter_map(|t| t.rect).collect();
    let helly_end = res.ends_with_helly();
    let helly_steps = res.trace.iter().filter(|t| t.kind == StepKind::Helly).count();
    let mut problems = Vec::new();
    if added != points.len() {
        problems.push(format!("rounds add {added} points, transversal has {}", points.len()));
    }
    if removed_count.iter().any(|&c| c != 1) {
        problems.push("some rectangle is not removed exactly once".to_string());
    }
    if helly_steps > usize::from(helly_end) {
        problems.push("common-point round is not the last round".to_string());
    }
    // Certificate = eps rectangles of all but the last round, then the
    // closing witnesses drawn from the last round's family: the last R_ε plus
    // one member after a common-point round, or two members after a final
    // eps round.
    let (prefix, closing): (&[usize], usize) = if helly_end {
        (&eps_ids[..], 1)
    } else {
        (&eps_ids[..eps_ids.len().saturating_sub(1)], 2)
    };
    let cert_ok = res.certificate.len() == prefix.len() + closing
        && res.certificate.starts_with(prefix)
        && res.trace.last().is_some_and(|last| {
            res.certificate[prefix.len()..]
                .iter()
                .all(|id| last.removed.contains(id))
        });
    if !cert_ok {
        problems.push("certificate does not match the rounds".to_string());
    }
    if res.trace.iter().enumerate().any(|(k, t)| t.step != k) {
        problems.push("round numbers are not 0, 1, 2, ...".to_string());
    }
    let accounting_ok = problems.is_empty();
    report.check(
        "trace_accounting",
        accounting_ok,
        if accounting_ok {
            format!("{} rounds account for all points and rectangles", res.trace.len())
        } else {
            problems.join("; ")
        },
    );

    let r = i.family_ratio().expect("nonempty");
    let r_ceil = ceil_usize(&r);
    let m = res.certificate.len();
    let bound = 2 * (r_ceil + 1) * m.saturating_sub(1) + 1;
    report.check(
        "size_bound",
        m > 0 && points.len() <= bound,
        format!(
            "|T| = {} <= 2(ceil r + 1)(|I| - 1) + 1 = {bound} (r = {r}, |I| = {m})",
            points.len()
        ),
    );

    // Replay the rounds against their own points.
    let mut detail = format!("{} eps rounds match their closed neighbourhoods", eps_ids.len());
    let mut replay_ok = accounting_ok;
    if !accounting_ok {
        detail = "not replayable: trace accounting failed".to_string();
    } else {
        let mut alive = vec![true; n];
        let mut offset = 0;
        for t in &res.trace {
            let step_points: &[Point] = &points[offset..offset + t.added];
            offset += t.added;
            let live: Vec<usize> = (0..n).filter(|&k| alive[k]).collect();
            let pierced: Vec<usize> = live
                .iter()
                .copied()
                .filter(|&k| step_points.iter().any(|p| contains_point(&rects[k], p)))
                .collect();
            let expected = match t.rect {
                Some(pivot) => {
                    if !alive[pivot] {
                        replay_ok = false;
                        detail = format!("round {}: rectangle {pivot} was already removed", t.step);
                        break;
                    }
                    live.iter().copied().filter(|&k| intersects(&rects[k], &rects[pivot])).collect()
                }
                None => live.clone(),
            };
            if pierced != expected || t.removed != expected {
                replay_ok = false;
                detail = format!(
                    "round {}: pierced {pierced:?}, expected {expected:?}, recorded {:?}",
                    t.step, t.removed
                );
                break;
            }
            for &k in &t.removed {
                alive[k] = false;
            }
        }
    }
    report.check("neighborhood_equality", replay_ok, detail);

    if m > 0 {
        report.ratios.insert("tau_alg/nu_cert".into(), points.len() as f64 / m as f64);
    }
    Ok(report)
}

/// Re-checks a coloring: properness, palette contiguity, and the
/// degeneracy-based color bound with ω recomputed from the geometry.
pub fn verify_coloring_bounds(
    i: &Instance,
    c: &Coloring,
    instance_id: &str,
) -> Result<VerificationReport, VerifyError> {
    let n = i.len();
    if n == 0 {
        return Err(VerifyError::Malformed("instance is empty".into()));
    }
    if c.colors.len() != n {
        return Err(VerifyError::Malformed(format!(
            "coloring has {} entries, instance has {n} rectangles",
            c.colors.len()
        )));
    }
    let rects = i.rects();
    let mut report = VerificationReport::new(instance_id);

    let mut conflict = None;
    'outer: for a in 0..n {
        for b in a + 1..n {
            if c.colors[a] == c.colors[b] && intersects(&rects[a], &rects[b]) {
                conflict = Some((a, b));
                break 'outer;
            }
        }
    }
    report.check(
        "proper",
        conflict.is_none(),
        match conflict {
            Some((a, b)) => format!("rectangles {a} and {b} intersect and share color {}", c.colors[a]),
            None => "no two intersecting rectangles share a color".to_string(),
        },
    );

    let used = c.colors.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; used];
    for &col in &c.colors {
        seen[col] = true;
    }
    let contiguous = used == c.num_colors && seen.iter().all(|&s| s);
    report.check(
        "contiguous",
        contiguous,
        format!("num_colors = {}, colors span 0..{used}", c.num_colors),
    );

    let (omega, _) = max_depth_omega(i).expect("nonempty");
    let r = i.family_ratio().expect("nonempty");
    let r_ceil = ceil_usize(&r);
    let bound = 2 * (r_ceil + 1) * (omega - 1) + 1;
    let colors = used.max(c.num_colors);
    report.check(
        "color_bound",
        colors <= bound,
        format!("{colors} colors <= {bound} (r = {r}, omega = {omega})"),
    );
    if r == Scalar::one() {
        let square_bound = 4 * omega - 3;
        report.check(
            "squares_bound",
            colors <= square_bound,
            format!("{colors} colors <= 4*omega - 3 = {square_bound}"),
        );
    }
    report.ratios.insert("colors/omega".into(), colors as f64 / omega as f64);
    Ok(report)
}

/// Per-instance row of [`batch_stats`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub instance: String,
    pub n: usize,
    pub r: Scalar,
    pub tau_alg: usize,
    pub nu_cert: usize,
    pub colors: usize,
    pub omega: usize,
    pub tau_exact: Option<usize>,
    pub nu_exact: Option<usize>,
    pub verified: bool,
    /// Set when `tau_exact > 2 nu_exact - 1`.
    pub wegner_flag: bool,
}

impl BatchRow {
    pub fn tau_over_cert(&self) -> f64 {
        self.tau_alg as f64 / self.nu_cert as f64
    }

    pub fn colors_over_omega(&self) -> f64 {
        self.colors as f64 / self.omega as f64
    }

    pub fn exact_ratio(&self) -> Option<f64> {
        Some(self.tau_exact? as f64 / self.nu_exact? as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl RatioStats {
    fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let (mut max, mut sum, mut count) = (0.0f64, 0.0, 0);
        for v in values {
            max = max.max(v);
            sum += v;
            count += 1;
        }
        RatioStats {
            max,
            mean: if count > 0 { sum / count as f64 } else { 0.0 },
            count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub rows: Vec<BatchRow>,
    pub tau_alg_over_nu_cert: RatioStats,
    pub colors_over_omega: RatioStats,
    pub tau_exact_over_nu_exact: RatioStats,
    pub wegner_flags: Vec<String>,
    pub all_verified: bool,
}

impl BatchSummary {
    pub fn to_table(&self) -> String {
        let mut out = String::from("instance\tn\tr\t|T|\t|I|\tcolors\tomega\ttau*\tnu*\tok\n");
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.instance,
                row.n,
                row.r,
                row.tau_alg,
                row.nu_cert,
                row.colors,
                row.omega,
                opt(row.tau_exact),
                opt(row.nu_exact),
                if row.verified { "yes" } else { "NO" }
            ));
        }
        for (name, s) in [
            ("|T|/|I|", &self.tau_alg_over_nu_cert),
            ("colors/omega", &self.colors_over_omega),
            ("tau*/nu*", &self.tau_exact_over_nu_exact),
        ] {
            out.push_str(&format!("{name}: max {:.4}, mean {:.4} over {}\n", s.max, s.mean, s.count));
        }
        if !self.wegner_flags.is_empty() {
            out.push_str(&format!("tau* > 2 nu* - 1 on: {:?}\n", self.wegner_flags));
        }
        out
    }
}

fn batch_row(id: &str, i: &Instance, lim: &ExactLimits) -> Option<BatchRow> {
    let res = construct_transversal(i).ok()?;
    let coloring = greedy_degeneracy_coloring(&build_graph_sweep(i));
    let verified = verify_piercing(i, &res, id).ok()?.passed()
        && verify_coloring_bounds(i, &coloring, id).ok()?.passed();
    let (omega, _) = max_depth_omega(i).ok()?;
    let (tau_exact, nu_exact) = if i.len() <= lim.max_n_tau && i.len() <= lim.max_n_nu {
        (
            exact_tau(i, lim).ok().map(|(t, _)| t),
            exact_nu(i, lim).ok().map(|(v, _)| v),
        )
    } else {
        (None, None)
    };
    let wegner_flag = matches!((tau_exact, nu_exact), (Some(t), Some(v)) if t + 1 > 2 * v);
    Some(BatchRow {
        instance: id.to_string(),
        n: i.len(),
        r: i.family_ratio().ok()?,
        tau_alg: res.transversal.len(),
        nu_cert: res.certificate.len(),
        colors: coloring.num_colors,
        omega,
        tau_exact,
        nu_exact,
        verified,
        wegner_flag,
    })
}

/// Runs construction, coloring, verification and (for small instances) the
/// exact oracles over a corpus, in parallel. Rows come back sorted by id;
/// empty instances are skipped.
pub fn batch_stats(corpus: &[(String, Instance)], lim: &ExactLimits) -> BatchSummary {
    let mut rows: Vec<BatchRow> = corpus
        .par_iter()
        .filter_map(|(id, i)| batch_row(id, i, lim))
        .collect();
    rows.sort_by(|a, b| a.instance.cmp(&b.instance));
    BatchSummary {
        tau_alg_over_nu_cert: RatioStats::from_values(rows.iter().map(BatchRow::tau_over_cert)),
        colors_over_omega: RatioStats::from_values(rows.iter().map(BatchRow::colors_over_omega)),
        tau_exact_over_nu_exact: RatioStats::from_values(rows.iter().filter_map(BatchRow::exact_ratio)),
        wegner_flags: rows.iter().filter(|r| r.wegner_flag).map(|r| r.instance.clone()).collect(),
        all_verified: rows.iter().all(|r| r.verified),
        rows,
    }
}
