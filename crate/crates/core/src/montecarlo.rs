//! Monte Carlo validation of the empty-bin and matched-bin theory.
//!
//! One permutation is drawn per replicate and shared by every `k` in the
//! config, so all cells of a run come from the same permutations. Each cell
//! keeps the joint histogram of `(N_emp, N_mat)`; every reported moment, the
//! estimator bias and its MSE are computed from that histogram. Histograms
//! merge by addition, so sharded runs combine exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::datamodel::{BinarySet, PairSpec};
use crate::error::{invalid, Error, Result};
use crate::estimate::{estimate_r_mat, pair_stats, PairStats};
use crate::permutation::{generate_permutation, PermutationSpec};
use crate::rng::{derive_seed, SeededRng};
use crate::sketch::{sketch_fixed, sketch_kperm_minwise, sketch_m_perm, sketch_variable};
use crate::theory::{self, TheoryInput, VarMode};

/// Largest `replicates × (number of k values)` a single run accepts.
pub const MAX_WORK: u64 = 1 << 32;

/// The fifteen word pairs at `D = 2^16` as `(name, f1, f2, a)`.
///
/// Two printed rows are not self-consistent and are repaired here: for
/// SEARCH/WEB the printed `f1` is smaller than `f - f2`, so `f2`, `f` and `R`
/// are kept and `a = 4985`, `f1 = 14037` follow; for A/TEST the printed `f` is
/// below `f1`, and reading it as `a = 2060` gives `R = 0.052` as printed.
pub const WORD_PAIRS: [(&str, u64, u64, u64); 15] = [
    ("RIGHTS-RESERVED", 12234, 11272, 10980),
    ("OF-AND", 37339, 36289, 32056),
    ("THIS-HAVE", 27695, 17522, 13570),
    ("ALL-MORE", 26668, 17909, 12939),
    ("CONTACT-INFORMATION", 16836, 16339, 8201),
    ("MAY-ONLY", 12067, 11006, 5120),
    ("CREDIT-CARD", 2999, 2697, 1263),
    ("SEARCH-WEB", 14037, 12718, 4985),
    ("RESEARCH-UNIVERSITY", 4353, 4241, 1577),
    ("FREE-USE", 12406, 11744, 4368),
    ("TOP-BUSINESS", 9151, 8284, 2443),
    ("BOOK-TRAVEL", 5153, 4608, 1219),
    ("TIME-JOB", 12386, 3263, 1775),
    ("REVIEW-PAPER", 3197, 1944, 372),
    ("A-TEST", 39063, 2278, 2060),
];

pub const WORD_PAIR_DIM: u64 = 1 << 16;

/// The word pairs as `(name, PairSpec)` at `D = 2^16`.
pub fn word_pairs() -> Vec<(String, PairSpec)> {
    WORD_PAIRS
        .iter()
        .map(|&(n, f1, f2, a)| (n.to_string(), PairSpec::new(f1, f2, a, WORD_PAIR_DIM).unwrap()))
        .collect()
}

/// Two sets with exactly the sizes in `spec`, placed uniformly at random.
pub fn synth_pair(spec: &PairSpec, seed: u64) -> Result<(BinarySet, BinarySet)> {
    let spec = PairSpec::new(spec.f1, spec.f2, spec.a, spec.d)?;
    let f = spec.union() as usize;
    let mut rng = SeededRng::new(seed);
    let idx = rng.sample_distinct(spec.d, f);
    let a = spec.a as usize;
    let only1 = (spec.f1 - spec.a) as usize;
    let shared = &idx[..a];
    let s1: Vec<u64> = shared.iter().chain(&idx[a..a + only1]).copied().collect();
    let s2: Vec<u64> = shared.iter().chain(&idx[a + only1..]).copied().collect();
    Ok((
        BinarySet::from_unsorted(s1, spec.d)?,
        BinarySet::from_unsorted(s2, spec.d)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McScheme {
    Fixed,
    Variable,
    /// `m` fixed-length sketches of `k/m` bins each.
    MPerm(usize),
    /// `k` independent permutations (no empty bins).
    KPerm,
}

impl McScheme {
    pub fn name(&self) -> String {
        match self {
            McScheme::Fixed => "fixed".into(),
            McScheme::Variable => "variable".into(),
            McScheme::MPerm(m) => format!("mperm{m}"),
            McScheme::KPerm => "kperm".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub name: String,
    pub pair: PairSpec,
    pub ks: Vec<usize>,
    pub replicates: u64,
    pub scheme: McScheme,
    pub master_seed: u64,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(invalid("k values must be positive"));
        }
        if self.pair.union() == 0 {
            return Err(invalid("pair must have a non-empty union"));
        }
        if self.pair.f1 == 0 || self.pair.f2 == 0 {
            return Err(Error::EmptySet);
        }
        if let McScheme::MPerm(m) = self.scheme {
            if m == 0 || self.ks.iter().any(|k| k % m != 0) {
                return Err(invalid(format!("m = {m} must divide every k")));
            }
        }
        let work = self.replicates.saturating_mul(self.ks.len() as u64);
        if work > MAX_WORK {
            return Err(Error::ResourceGuard(format!("{work} replicate-cells exceeds {MAX_WORK}")));
        }
        Ok(())
    }

    /// Permutation dimension: `D` padded to a multiple of every bin count.
    pub fn d_eff(&self) -> u64 {
        let sub = |k: usize| match self.scheme {
            McScheme::MPerm(m) => (k / m) as u64,
            McScheme::KPerm | McScheme::Variable => 1,
            McScheme::Fixed => k as u64,
        };
        let l = self.ks.iter().fold(1u64, |l, &k| lcm(l, sub(k)));
        self.pair.d.div_ceil(l) * l
    }

    /// Seed used to place the pair's sets.
    pub fn pair_seed(&self) -> u64 {
        derive_seed(self.master_seed, &[u64::MAX])
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Joint counts of `(N_emp, N_mat)` over replicates for one `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McCell {
    pub k: usize,
    pub hist: BTreeMap<(u32, u32), u64>,
}

impl McCell {
    fn new(k: usize) -> Self {
        Self {
            k,
            hist: BTreeMap::new(),
        }
    }

    fn add(&mut self, st: &PairStats) {
        *self.hist.entry((st.n_emp as u32, st.n_mat as u32)).or_insert(0) += 1;
    }

    pub fn replicates(&self) -> u64 {
        self.hist.values().sum()
    }

    pub fn merge(&mut self, other: &McCell) -> Result<()> {
        if self.k != other.k {
            return Err(invalid("cannot merge cells with different k"));
        }
        for (key, c) in &other.hist {
            *self.hist.entry(*key).or_insert(0) += c;
        }
        Ok(())
    }

    /// Weighted mean and standard error of `g(n_emp, n_mat)` over replicates,
    /// plus the sample variance.
    fn mean_of(&self, g: impl Fn(f64, f64) -> f64) -> (f64, f64) {
        let n = self.replicates() as f64;
        let mean = self
            .hist
            .iter()
            .map(|(&(e, m), &c)| c as f64 * g(e as f64, m as f64))
            .sum::<f64>()
            / n;
        let var = if n > 1.0 {
            self.hist
                .iter()
                .map(|(&(e, m), &c)| c as f64 * (g(e as f64, m as f64) - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0)
        } else {
            0.0
        };
        (mean, var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stat {
    /// `E(N_emp)/k`.
    NempMean,
    /// `Var(N_emp)/k²`.
    NempVar,
    /// `E(N_mat)/k`.
    NmatMean,
    /// `Var(N_mat)/k²`.
    NmatVar,
    /// `Cov(N_mat, N_emp)/k²`.
    Cov,
    /// `E(R̂_mat) - R`.
    RmatBias,
    /// `E(R̂_mat - R)²`.
    RmatMse,
}

impl Stat {
    pub const ALL: [Stat; 7] = [
        Stat::NempMean,
        Stat::NempVar,
        Stat::NmatMean,
        Stat::NmatVar,
        Stat::Cov,
        Stat::RmatBias,
        Stat::RmatMse,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stat::NempMean => "nemp_mean",
            Stat::NempVar => "nemp_var",
            Stat::NmatMean => "nmat_mean",
            Stat::NmatVar => "nmat_var",
            Stat::Cov => "cov",
            Stat::RmatBias => "rmat_bias",
            Stat::RmatMse => "rmat_mse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub pair: String,
    pub k: usize,
    pub scheme: String,
    pub stat: Stat,
    pub empirical: f64,
    /// NaN where no closed form is available for the scheme.
    pub theory: f64,
    pub std_err: f64,
    pub replicates: u64,
    pub seed: u64,
}

impl McRow {
    /// `(empirical - theory) / std_err`; NaN without theory.
    pub fn z(&self) -> f64 {
        if self.std_err > 0.0 {
            (self.empirical - self.theory) / self.std_err
        } else if self.empirical == self.theory {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub config: McConfig,
    pub d_eff: u64,
    pub cells: Vec<McCell>,
    pub rows: Vec<McRow>,
}

impl McReport {
    pub fn row(&self, k: usize, stat: Stat) -> Option<&McRow> {
        self.rows.iter().find(|r| r.k == k && r.stat == stat)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub const CSV_HEADER: &str = "pair,k,scheme,stat,empirical,theory,std_err,replicates,seed";

pub fn rows_to_csv(rows: &[McRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:e},{:e},{:e},{},{}",
            r.pair,
            r.k,
            r.scheme,
            r.stat.name(),
            r.empirical,
            r.theory,
            r.std_err,
            r.replicates,
            r.seed
        );
    }
    out
}

/// A matplotlib script that plots empirical against theory from the CSV.
pub fn plot_script(csv_path: &str) -> String {
    format!(
        r#"import csv, collections
import matplotlib.pyplot as plt

rows = collections.defaultdict(list)
with open({csv_path:?}) as fh:
    for r in csv.DictReader(fh):
        rows[(r["pair"], r["scheme"], r["stat"])].append(r)

for (pair, scheme, stat), rs in sorted(rows.items()):
    rs.sort(key=lambda r: int(r["k"]))
    k = [int(r["k"]) for r in rs]
    emp = [float(r["empirical"]) for r in rs]
    th = [float(r["theory"]) for r in rs]
    se = [float(r["std_err"]) for r in rs]
    plt.figure()
    plt.errorbar(k, emp, yerr=[3 * s for s in se], fmt="o", label="empirical")
    plt.plot(k, th, "-", label="theory")
    plt.xscale("log", base=2)
    plt.xlabel("k")
    plt.title(f"{{pair}} {{scheme}} {{stat}}")
    plt.legend()
    plt.savefig(f"{{pair}}_{{scheme}}_{{stat}}.png")
    plt.close()
"#
    )
}

/// Runs every replicate and builds the report.
pub fn run_validation(cfg: &McConfig) -> Result<McReport> {
    let cells = simulate(cfg, 0..cfg.replicates)?;
    report(cfg, cells)
}

/// Histograms for a range of replicates; ranges of one config can be merged
/// with [`McCell::merge`] and passed to [`report`].
pub fn simulate(cfg: &McConfig, replicates: std::ops::Range<u64>) -> Result<Vec<McCell>> {
    cfg.validate()?;
    let d_eff = cfg.d_eff();
    let (s1, s2) = synth_pair(&cfg.pair, cfg.pair_seed())?;
    let mut cells: Vec<McCell> = cfg.ks.iter().map(|&k| McCell::new(k)).collect();
    for r in replicates {
        let seed = derive_seed(cfg.master_seed, &[r]);
        match cfg.scheme {
            McScheme::Fixed => {
                let perm = generate_permutation(seed, d_eff)?;
                for cell in &mut cells {
                    let st = pair_stats(&sketch_fixed(&s1, &perm, cell.k)?, &sketch_fixed(&s2, &perm, cell.k)?)?;
                    cell.add(&st);
                }
            }
            McScheme::Variable => {
                let perm = generate_permutation(seed, d_eff)?;
                let bin_seed = derive_seed(seed, &[1]);
                for cell in &mut cells {
                    let st = pair_stats(
                        &sketch_variable(&s1, bin_seed, &perm, cell.k)?,
                        &sketch_variable(&s2, bin_seed, &perm, cell.k)?,
                    )?;
                    cell.add(&st);
                }
            }
            McScheme::MPerm(m) => {
                let perms = (0..m as u64)
                    .map(|t| generate_permutation(derive_seed(seed, &[t]), d_eff))
                    .collect::<Result<Vec<_>>>()?;
                for cell in &mut cells {
                    let st = pair_stats(&sketch_m_perm(&s1, &perms, cell.k)?, &sketch_m_perm(&s2, &perms, cell.k)?)?;
                    cell.add(&st);
                }
            }
            McScheme::KPerm => {
                let kmax = *cfg.ks.iter().max().unwrap();
                let perms: Vec<PermutationSpec> = (0..kmax as u64)
                    .map(|t| generate_permutation(derive_seed(seed, &[t]), d_eff))
                    .collect::<Result<Vec<_>>>()?;
                let v1 = sketch_kperm_minwise(&s1, &perms)?;
                let v2 = sketch_kperm_minwise(&s2, &perms)?;
                for cell in &mut cells {
                    let n_mat = v1.values()[..cell.k]
                        .iter()
                        .zip(&v2.values()[..cell.k])
                        .filter(|(a, b)| a == b)
                        .count();
                    cell.add(&PairStats {
                        n_emp: 0,
                        n_mat,
                        n_emp1: 0,
                        n_emp2: 0,
                        k: cell.k,
                    });
                }
            }
        }
    }
    Ok(cells)
}

/// Closed forms for one cell in raw count units.
struct CellTheory {
    e_emp: f64,
    v_emp: f64,
    e_mat: f64,
    v_mat: f64,
    cov: f64,
    /// `Var(R̂_mat)` for the MSE column.
    v_rmat: f64,
    /// Used for the bias standard-error floor.
    v_rmat_floor: f64,
}

fn cell_theory(cfg: &McConfig, d_eff: u64, k: usize) -> Result<CellTheory> {
    let p = &cfg.pair;
    let rr = p.resemblance();
    let kperm_var = rr * (1.0 - rr) / k as f64;
    Ok(match cfg.scheme {
        McScheme::Fixed => {
            let t = TheoryInput::new(d_eff, k as u64, p.f1, p.f2, p.a)?;
            let approx = theory::var_rmat(&t, VarMode::Approximation)?;
            CellTheory {
                e_emp: theory::e_nemp(&t),
                v_emp: theory::var_nemp(&t),
                e_mat: theory::e_nmat(&t),
                v_mat: theory::var_nmat(&t),
                cov: theory::cov_nmat_nemp(&t),
                v_rmat: theory::var_rmat(&t, VarMode::ExactViaDist).unwrap_or(approx),
                v_rmat_floor: approx,
            }
        }
        McScheme::MPerm(m) => {
            let t = TheoryInput::new(d_eff, (k / m) as u64, p.f1, p.f2, p.a)?;
            let mf = m as f64;
            CellTheory {
                e_emp: mf * theory::e_nemp(&t),
                v_emp: mf * theory::var_nemp(&t),
                e_mat: mf * theory::e_nmat(&t),
                v_mat: mf * theory::var_nmat(&t),
                cov: mf * theory::cov_nmat_nemp(&t),
                v_rmat: f64::NAN,
                v_rmat_floor: kperm_var,
            }
        }
        McScheme::Variable => {
            let t = TheoryInput::new(d_eff, k as u64, p.f1, p.f2, p.a)?;
            let mo = theory::nemp_moments_variable(&t);
            let kf = k as f64;
            let e_emp = mo.mean_ratio * kf;
            CellTheory {
                e_emp,
                v_emp: mo.var_ratio * kf * kf,
                e_mat: rr * (kf - e_emp),
                v_mat: f64::NAN,
                cov: f64::NAN,
                v_rmat: f64::NAN,
                v_rmat_floor: kperm_var,
            }
        }
        McScheme::KPerm => {
            let kf = k as f64;
            CellTheory {
                e_emp: 0.0,
                v_emp: 0.0,
                e_mat: kf * rr,
                v_mat: kf * rr * (1.0 - rr),
                cov: 0.0,
                v_rmat: kperm_var,
                v_rmat_floor: kperm_var,
            }
        }
    })
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x.max(0.0)
    } else {
        0.0
    }
}

/// Builds report rows from histograms.
///
/// Standard errors combine the empirical spread with a floor from the closed
/// forms, so a cell whose events are too rare to show up in the sample (for
/// example no jointly empty bin in any replicate) is not judged by a zero
/// standard error. Means use `max(s², V)`; variances use the larger of the
/// fourth-moment estimate and `√(V/n)`, the Poisson-regime value for counts;
/// the covariance floor is `√((V_emp V_mat + C²)/n)`.
pub fn report(cfg: &McConfig, cells: Vec<McCell>) -> Result<McReport> {
    cfg.validate()?;
    let d_eff = cfg.d_eff();
    let rr = cfg.pair.resemblance();
    let mut rows = Vec::new();
    for cell in &cells {
        let k = cell.k;
        let kf = k as f64;
        let n = cell.replicates();
        if n == 0 {
            continue;
        }
        let nf = n as f64;
        let th = cell_theory(cfg, d_eff, k)?;
        let (me, ve) = cell.mean_of(|e, _| e);
        let (mm, vm) = cell.mean_of(|_, m| m);
        let (m4e, _) = cell.mean_of(|e, _| (e - me).powi(4));
        let (m4m, _) = cell.mean_of(|_, m| (m - mm).powi(4));
        let (cov_raw, cov_var) = cell.mean_of(|e, m| (e - me) * (m - mm));
        let cov = cov_raw * nf / (nf - 1.0).max(1.0);
        let rhat = |e: f64, m: f64| {
            estimate_r_mat(&PairStats {
                n_emp: e as usize,
                n_mat: m as usize,
                n_emp1: 0,
                n_emp2: 0,
                k,
            })
        };
        let (mean_r, var_r) = cell.mean_of(rhat);
        let (mse, var_sq) = cell.mean_of(|e, m| (rhat(e, m) - rr).powi(2));

        let var_se = |m4: f64, s2: f64, v_th: f64| {
            let emp = ((m4 - s2 * s2).max(0.0) / nf).sqrt();
            emp.max((finite_or_zero(v_th) / nf).sqrt())
        };
        let cov_floor = ((finite_or_zero(th.v_emp) * finite_or_zero(th.v_mat)
            + if th.cov.is_finite() { th.cov * th.cov } else { 0.0 })
            / nf)
            .sqrt();
        let entries = [
            (Stat::NempMean, me / kf, th.e_emp / kf, (ve.max(finite_or_zero(th.v_emp)) / nf).sqrt() / kf),
            (Stat::NempVar, ve / (kf * kf), th.v_emp / (kf * kf), var_se(m4e, ve, th.v_emp) / (kf * kf)),
            (Stat::NmatMean, mm / kf, th.e_mat / kf, (vm.max(finite_or_zero(th.v_mat)) / nf).sqrt() / kf),
            (Stat::NmatVar, vm / (kf * kf), th.v_mat / (kf * kf), var_se(m4m, vm, th.v_mat) / (kf * kf)),
            (Stat::Cov, cov / (kf * kf), th.cov / (kf * kf), (cov_var / nf).sqrt().max(cov_floor) / (kf * kf)),
            (Stat::RmatBias, mean_r - rr, 0.0, (var_r.max(finite_or_zero(th.v_rmat_floor)) / nf).sqrt()),
            (Stat::RmatMse, mse, th.v_rmat, (var_sq / nf).sqrt()),
        ];
        for (stat, empirical, theory, std_err) in entries {
            rows.push(McRow {
                pair: cfg.name.clone(),
                k,
                scheme: cfg.scheme.name(),
                stat,
                empirical,
                theory,
                std_err,
                replicates: n,
                seed: cfg.master_seed,
            });
        }
    }
    Ok(McReport {
        config: cfg.clone(),
        d_eff,
        cells,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::intersect_stats;

    #[test]
    fn synth_pair_sizes() {
        let spec = PairSpec::new(4, 3, 1, 16).unwrap();
        for seed in 0..50 {
            let (a, b) = synth_pair(&spec, seed).unwrap();
            assert_eq!(intersect_stats(&a, &b).unwrap(), spec);
        }
        let same = PairSpec::new(5, 5, 5, 40).unwrap();
        let (a, b) = synth_pair(&same, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn word_pairs_are_valid() {
        let pairs = word_pairs();
        assert_eq!(pairs.len(), 15);
        let printed_r = [0.877, 0.771, 0.429, 0.409, 0.328, 0.285, 0.285, 0.229, 0.225, 0.221, 0.163, 0.143, 0.128, 0.078, 0.052];
        for ((name, p), r) in pairs.iter().zip(printed_r) {
            assert!((p.resemblance() - r).abs() < 5e-4 + 1e-12, "{name}");
        }
        let (_, card) = &pairs[6];
        assert_eq!((card.f1, card.f2, card.union()), (2999, 2697, 4433));
        let (a, b) = synth_pair(card, 1).unwrap();
        assert_eq!(intersect_stats(&a, &b).unwrap(), *card);
    }

    fn small_cfg(scheme: McScheme, reps: u64) -> McConfig {
        McConfig {
            name: "toy".into(),
            pair: PairSpec::new(12, 10, 6, 200).unwrap(),
            ks: vec![4, 8],
            replicates: reps,
            scheme,
            master_seed: 7,
        }
    }

    #[test]
    fn deterministic_and_mergeable() {
        let cfg = small_cfg(McScheme::Fixed, 400);
        let a = run_validation(&cfg).unwrap();
        let b = run_validation(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        let mut left = simulate(&cfg, 0..150).unwrap();
        let right = simulate(&cfg, 150..400).unwrap();
        for (l, r) in left.iter_mut().zip(&right) {
            l.merge(r).unwrap();
        }
        assert_eq!(left, a.cells);
        assert_eq!(report(&cfg, left).unwrap().rows, a.rows);
    }

    #[test]
    fn padding_to_common_multiple() {
        let mut cfg = small_cfg(McScheme::Fixed, 1);
        cfg.ks = vec![3, 4];
        assert_eq!(cfg.d_eff(), 204);
        cfg.scheme = McScheme::MPerm(2);
        cfg.ks = vec![6, 8];
        assert_eq!(cfg.d_eff(), 204);
    }

    #[test]
    fn small_runs_agree_with_theory() {
        for scheme in [McScheme::Fixed, McScheme::Variable, McScheme::MPerm(2), McScheme::KPerm] {
            let rep = run_validation(&small_cfg(scheme, 3000)).unwrap();
            for r in &rep.rows {
                if r.theory.is_nan() {
                    continue;
                }
                if r.stat == Stat::RmatMse {
                    assert!(r.empirical <= r.theory + 4.0 * r.std_err, "{r:?}");
                } else {
                    assert!(r.z().abs() < 4.0, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let rep = run_validation(&small_cfg(McScheme::Fixed, 20)).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 1 + 2 * Stat::ALL.len());
        for l in lines {
            assert_eq!(l.split(',').count(), 9);
        }
        assert!(plot_script("out.csv").contains("\"out.csv\""));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = small_cfg(McScheme::Fixed, 0);
        assert!(run_validation(&cfg).is_err());
        cfg.replicates = 1;
        cfg.scheme = McScheme::MPerm(3);
        assert!(run_validation(&cfg).is_err());
    }
}
