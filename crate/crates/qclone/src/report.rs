//! Report types for the CLI surface and their three renderings: JSON
//! (stable field order), CSV (fixed header), and a plain-text table.

use serde::Serialize;

use crate::bitfunc::BoolFunc;
use crate::cloner::CloneSpec;
use crate::error::{Error, Result};
use crate::family::{FamilyBundle, HSet, Variant};
use crate::rational::frac_string;
use crate::strategies::{AnalyticScores, ExperimentResult, RunConfig, Score, Strategy};

/// Two-sided 99% normal quantile for binomial confidence intervals.
pub(crate) const Z99: f64 = 2.575_829_303_548_900_4;

/// Output renderings the CLI can be asked for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Half-width of the 99% binomial confidence interval around an
/// empirical rate.
pub fn ci99_half_width(rate: f64, trials: u64) -> f64 {
    Z99 * (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// A decimal value with its exact-fraction form when one was recognized.
#[derive(Clone, Debug, Serialize)]
pub struct ValueOut {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl From<&Score> for ValueOut {
    fn from(score: &Score) -> Self {
        Self { value: score.value, exact: score.exact.as_ref().map(frac_string) }
    }
}

impl ValueOut {
    fn render(&self) -> String {
        match &self.exact {
            Some(e) => format!("{:.9} ({e})", self.value),
            None => format!("{:.9}", self.value),
        }
    }
}

/// One strategy's empirical score next to its analytic target.
#[derive(Clone, Debug, Serialize)]
pub struct ScoreReport {
    pub strategy: Strategy,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_exact: Option<String>,
    pub ci99: f64,
}

impl ScoreReport {
    fn new(strategy: Strategy, trials: u64, successes: u64, analytic: &Score) -> Self {
        let rate = successes as f64 / trials as f64;
        Self {
            strategy,
            trials,
            successes,
            rate,
            analytic: analytic.value,
            analytic_exact: analytic.exact.as_ref().map(frac_string),
            ci99: ci99_half_width(rate, trials),
        }
    }

    /// Whether the analytic value sits inside the 99% CI around the
    /// empirical rate.
    pub fn concordant(&self) -> bool {
        (self.rate - self.analytic).abs() <= self.ci99
    }

    fn csv_row(&self, variant: Variant, n: usize) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            variant, n, self.strategy, self.trials, self.successes, self.rate, self.analytic,
            self.ci99
        )
    }
}

/// An observed count with its rate and analytic target.
#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub observed: u64,
    pub out_of: u64,
    pub rate: f64,
    pub analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_exact: Option<String>,
}

impl RateReport {
    fn new(observed: u64, out_of: u64, analytic: &Score) -> Self {
        Self {
            observed,
            out_of,
            rate: observed as f64 / out_of as f64,
            analytic: analytic.value,
            analytic_exact: analytic.exact.as_ref().map(frac_string),
        }
    }
}

/// Everything `simulate` emits.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub gamma: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_exact: Option<Vec<String>>,
    pub no_cloning: ScoreReport,
    pub cloning: ScoreReport,
    /// Alternative cloning-score constant (doubled wrong-branch term),
    /// reported for family B where the simulation adjudicates between the
    /// two; the CI test against `cloning.rate` settles it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_alt: Option<ValueOut>,
    /// Clone-flag success rate against the mean efficiency.
    pub flag: RateReport,
    /// How often the failure-branch hypothesis was right, against the top
    /// failure-posterior entry.
    pub posterior: RateReport,
}

impl ExperimentReport {
    pub fn new(result: &ExperimentResult) -> Self {
        let c = &result.counts;
        Self {
            config: result.config,
            gamma: result.gammas.clone(),
            gamma_exact: exact_strings(&result.gammas),
            no_cloning: ScoreReport::new(
                Strategy::NoCloning,
                c.trials,
                c.nc_success,
                &result.analytic.p1,
            ),
            cloning: ScoreReport::new(
                Strategy::Cloning,
                c.trials,
                c.cl_success,
                &result.analytic.p2,
            ),
            p2_alt: result.analytic.p2_alt.as_ref().map(ValueOut::from),
            flag: RateReport::new(c.flag_success, c.trials, &result.analytic.p_success),
            posterior: RateReport::new(
                c.flag_fail_hypothesis_ok,
                c.flag_fail.max(1),
                &result.analytic.posterior_top,
            ),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Fixed-header CSV: one row per strategy.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,n,strategy,trials,successes,rate,analytic,ci99\n");
        out.push_str(&self.no_cloning.csv_row(self.config.variant, self.config.n));
        out.push('\n');
        out.push_str(&self.cloning.csv_row(self.config.variant, self.config.n));
        out.push('\n');
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        out.push_str(&format!(
            "simulate  variant {}  n {}  trials {}  seed {}\n",
            c.variant, c.n, c.trials, c.seed
        ));
        if c.distinct_f12 {
            out.push_str("flags     distinct-f12\n");
        }
        if c.physical_wrong_branch {
            out.push_str(
                "flags     physical-wrong-branch (analytic columns assume uniform accounting)\n",
            );
        }
        out.push_str(&format!("gamma     {}\n\n", gamma_line(&self.gamma, &self.gamma_exact)));
        out.push_str(&format!(
            "{:<12} {:>10} {:>10} {:>10} {:>22} {:>10}\n",
            "strategy", "trials", "successes", "rate", "analytic", "ci99"
        ));
        for row in [&self.no_cloning, &self.cloning] {
            let analytic = match &row.analytic_exact {
                Some(e) => format!("{:.6} ({e})", row.analytic),
                None => format!("{:.6}", row.analytic),
            };
            out.push_str(&format!(
                "{:<12} {:>10} {:>10} {:>10.6} {:>22} {:>10.6}\n",
                row.strategy.to_string(),
                row.trials,
                row.successes,
                row.rate,
                analytic,
                row.ci99
            ));
        }
        if let Some(alt) = &self.p2_alt {
            out.push_str(&format!("\ncloning analytic, alternative constant: {}\n", alt.render()));
        }
        out.push_str(&format!(
            "\nflag success   {:>10}/{} rate {:.6}  analytic {}\n",
            self.flag.observed,
            self.flag.out_of,
            self.flag.rate,
            rate_analytic(&self.flag)
        ));
        out.push_str(&format!(
            "posterior hit  {:>10}/{} rate {:.6}  analytic {}\n",
            self.posterior.observed,
            self.posterior.out_of,
            self.posterior.rate,
            rate_analytic(&self.posterior)
        ));
        out
    }
}

fn rate_analytic(r: &RateReport) -> String {
    match &r.analytic_exact {
        Some(e) => format!("{:.6} ({e})", r.analytic),
        None => format!("{:.6}", r.analytic),
    }
}

fn gamma_line(gamma: &[f64], exact: &Option<Vec<String>>) -> String {
    gamma
        .iter()
        .enumerate()
        .map(|(i, g)| match exact {
            Some(e) => format!("{} = {:.9}", e[i], g),
            None => format!("{g:.9}"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn exact_strings(values: &[f64]) -> Option<Vec<String>> {
    values
        .iter()
        .map(|&v| crate::rational::recover(v).as_ref().map(frac_string))
        .collect()
}

/// Everything `families` emits: the five function sets and the H
/// partition.
#[derive(Clone, Debug, Serialize)]
pub struct FamiliesReport {
    pub variant: Variant,
    pub n: usize,
    pub s_f0: Vec<BoolFunc>,
    pub s1: Vec<BoolFunc>,
    pub s2: Vec<BoolFunc>,
    pub s_f12: Vec<BoolFunc>,
    pub h_sets: Vec<HSet>,
}

impl FamiliesReport {
    pub fn new(bundle: &FamilyBundle) -> Self {
        Self {
            variant: bundle.variant(),
            n: bundle.n(),
            s_f0: bundle.s_f0().to_vec(),
            s1: bundle.s1().to_vec(),
            s2: bundle.s2().to_vec(),
            s_f12: bundle.s_f12().to_vec(),
            h_sets: bundle.h_sets().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("families  variant {}  n {}\n", self.variant, self.n);
        let section = |name: &str, fs: &[BoolFunc]| {
            let mut s = format!("\n{name} ({} functions)\n", fs.len());
            for f in fs {
                s.push_str(&format!("  {}\n", render_func(f)));
            }
            s
        };
        out.push_str(&section("s_f0", &self.s_f0));
        out.push_str(&section("s1", &self.s1));
        out.push_str(&section("s2", &self.s2));
        out.push_str(&section("s_f12", &self.s_f12));
        out.push_str(&format!("\nH partition ({} sets)\n", self.h_sets.len()));
        for (i, h) in self.h_sets.iter().enumerate() {
            out.push_str(&format!(
                "  H[{i}] = {{{}, {}}}\n",
                render_func(&h.members()[0]),
                render_func(&h.members()[1])
            ));
        }
        out
    }
}

/// Truth tables as bits while they fit on a line, as hex beyond that.
fn render_func(f: &BoolFunc) -> String {
    if f.size() <= 64 {
        f.to_string()
    } else {
        format!("0x{}", f.table_hex())
    }
}

/// Everything `efficiencies` emits.
#[derive(Clone, Debug, Serialize)]
pub struct EfficienciesReport {
    pub variant: Variant,
    pub n: usize,
    /// Gauged overlap matrix of the candidate states.
    pub overlaps: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_exact: Option<Vec<String>>,
    /// Mean efficiency: the flag's success rate.
    pub p_success: ValueOut,
    pub failure_posterior: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_posterior_exact: Option<Vec<String>>,
    /// Smallest residual eigenvalue at the optimum; ~0 marks the
    /// boundary.
    pub min_residual_eig: f64,
}

impl EfficienciesReport {
    pub fn new(variant: Variant, n: usize, spec: &CloneSpec) -> Self {
        let m = spec.len();
        let overlaps: Vec<Vec<f64>> =
            (0..m).map(|i| (0..m).map(|j| spec.overlap(i, j)).collect()).collect();
        let gamma = spec.gammas().to_vec();
        let posterior = spec.failure_posterior();
        let ps = spec.success_probability();
        Self {
            variant,
            n,
            overlaps,
            gamma_exact: exact_strings(&gamma),
            gamma,
            p_success: ValueOut {
                value: ps,
                exact: crate::rational::recover(ps).as_ref().map(frac_string),
            },
            failure_posterior_exact: exact_strings(&posterior),
            failure_posterior: posterior,
            min_residual_eig: spec.min_residual_eig(spec.gammas()),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("efficiencies  variant {}  n {}\n\noverlaps\n", self.variant, self.n);
        for row in &self.overlaps {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>8.4}")).collect();
            out.push_str(&format!("  {}\n", cells.join(" ")));
        }
        out.push_str(&format!("\ngamma              {}\n", gamma_line(&self.gamma, &self.gamma_exact)));
        out.push_str(&format!("P_success (flag)   {}\n", self.p_success.render()));
        out.push_str(&format!(
            "failure posterior  {}\n",
            gamma_line(&self.failure_posterior, &self.failure_posterior_exact)
        ));
        out.push_str(&format!("min residual eig   {:.3e}\n", self.min_residual_eig));
        out
    }
}

/// Everything `analytic` emits.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticReport {
    pub variant: Variant,
    pub n: usize,
    pub gamma: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_exact: Option<Vec<String>>,
    pub p1: ValueOut,
    pub p2: ValueOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_alt: Option<ValueOut>,
    pub p_success: ValueOut,
    pub posterior_top: ValueOut,
}

impl AnalyticReport {
    pub fn new(variant: Variant, n: usize, gamma: &[f64], scores: &AnalyticScores) -> Self {
        Self {
            variant,
            n,
            gamma: gamma.to_vec(),
            gamma_exact: exact_strings(gamma),
            p1: ValueOut::from(&scores.p1),
            p2: ValueOut::from(&scores.p2),
            p2_alt: scores.p2_alt.as_ref().map(ValueOut::from),
            p_success: ValueOut::from(&scores.p_success),
            posterior_top: ValueOut::from(&scores.posterior_top),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("analytic  variant {}  n {}\n\n", self.variant, self.n);
        out.push_str(&format!("gamma          {}\n", gamma_line(&self.gamma, &self.gamma_exact)));
        out.push_str(&format!("p1             {}\n", self.p1.render()));
        out.push_str(&format!("p2             {}\n", self.p2.render()));
        if let Some(alt) = &self.p2_alt {
            out.push_str(&format!("p2 (alt)       {}\n", alt.render()));
        }
        out.push_str(&format!("P_success      {}\n", self.p_success.render()));
        out.push_str(&format!("posterior top  {}\n", self.posterior_top.render()));
        out
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize infallibly")
}

/// Renders a report in the requested format; `csv` is only meaningful for
/// experiment results.
pub fn render_experiment(report: &ExperimentReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Table => report.to_table(),
    }
}

/// Renders a non-tabular report; CSV has no sensible shape for these.
pub fn render_listing(
    json: impl Fn() -> String,
    table: impl Fn() -> String,
    format: OutputFormat,
) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(json()),
        OutputFormat::Table => Ok(table()),
        OutputFormat::Csv => {
            Err(Error::BadConfig("csv output only applies to simulate".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{run_experiment, RunConfig};

    fn small_result() -> ExperimentResult {
        let mut config = RunConfig::new(Variant::B, 2);
        config.trials = 5_000;
        config.seed = 7;
        run_experiment(config).unwrap()
    }

    #[test]
    fn csv_has_pinned_header_and_two_rows() {
        let report = ExperimentReport::new(&small_result());
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("variant,n,strategy,trials,successes,rate,analytic,ci99")
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("B,2,no-cloning,5000,"));
        assert!(rows[1].starts_with("B,2,cloning,5000,"));
        for row in rows {
            assert_eq!(row.split(',').count(), 8);
        }
    }

    #[test]
    fn json_is_stable_and_carries_exact_forms() {
        let result = small_result();
        let report = ExperimentReport::new(&result);
        let a = report.to_json();
        let b = ExperimentReport::new(&result).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["config"]["variant"], "B");
        assert_eq!(v["gamma_exact"][0], "1/7");
        assert_eq!(v["no_cloning"]["analytic_exact"], "11/16");
        assert_eq!(v["cloning"]["analytic_exact"], "41/56");
        assert_eq!(v["p2_alt"]["exact"], "3/4");
        assert_eq!(v["posterior"]["analytic_exact"], "1/2");
    }

    #[test]
    fn table_mentions_the_key_quantities() {
        let report = ExperimentReport::new(&small_result());
        let table = report.to_table();
        for needle in ["no-cloning", "cloning", "gamma", "flag success", "posterior hit"] {
            assert!(table.contains(needle), "missing {needle:?} in table:\n{table}");
        }
    }

    #[test]
    fn ci_width_matches_hand_computation() {
        let w = ci99_half_width(0.5, 1_000_000);
        assert!((w - 2.5758293035489004 * 0.0005).abs() < 1e-12);
    }

    #[test]
    fn families_report_lists_everything() {
        let bundle = FamilyBundle::build(Variant::B, 2).unwrap();
        let report = FamiliesReport::new(&bundle);
        assert_eq!(report.s_f0.len(), 3);
        assert_eq!(report.h_sets.len(), 4);
        let table = report.to_table();
        assert!(table.contains("0100"));
        assert!(table.contains("H partition (4 sets)"));
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["s1"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn hex_rendering_kicks_in_for_large_tables() {
        let bundle = FamilyBundle::build(Variant::A, 7).unwrap();
        let table = FamiliesReport::new(&bundle).to_table();
        assert!(table.contains("0x"));
    }

    #[test]
    fn listings_reject_csv() {
        let bundle = FamilyBundle::build(Variant::B, 2).unwrap();
        let report = FamiliesReport::new(&bundle);
        let out = render_listing(|| report.to_json(), || report.to_table(), OutputFormat::Csv);
        assert!(out.is_err());
    }

    #[test]
    fn efficiencies_report_shape() {
        use crate::statevec::StateVector;
        let bundle = FamilyBundle::build(Variant::A, 3).unwrap();
        let states: Vec<StateVector> =
            bundle.s_f0().iter().map(StateVector::phase_state).collect();
        let spec = CloneSpec::new(&states).unwrap();
        let gammas = spec.max_efficiencies(None).unwrap();
        let spec = spec.with_gammas(gammas).unwrap();
        let report = EfficienciesReport::new(Variant::A, 3, &spec);
        assert_eq!(report.gamma_exact.as_ref().unwrap()[0], "7/127");
        assert!(report.min_residual_eig.abs() < 1e-8);
        let table = report.to_table();
        assert!(table.contains("P_success"));
        assert!(table.contains("77/127"));
    }
}
