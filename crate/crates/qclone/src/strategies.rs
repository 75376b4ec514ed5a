//! The two strategies for the paired guessing task: per-trial transcripts,
//! seeded parallel Monte Carlo, and the closed-form scores the runs are
//! checked against.
//!
//! One trial samples (f0, f1, f2), lets each strategy guess the answer
//! pair (H set of f0⊕f1, H set of f0⊕f2), and scores both guesses
//! jointly. The no-cloning baseline commits to the hypothesis that f0 is
//! one of its two answer-space candidates, spends the single f0 call
//! classically at x = 0 to pick between them, and identifies f1 and f2
//! with one phase-kickback circuit each. The cloning strategy queries f0
//! quantumly, clones the query state probabilistically, and on a success
//! flag processes one clone per remaining oracle; on failure it falls
//! back to the most likely f0 given the flag and identifies f1, f2 in the
//! candidate basis that hypothesis implies.
//!
//! When a strategy's f0 hypothesis is wrong, its measurement outcomes
//! carry no usable information; the score books such a branch as an
//! independent uniform guess over the 2^n × 2^n answer pairs, which is
//! what the closed forms assume. The alternative of simulating the
//! wrong-basis Born statistics anyway is available behind
//! `physical_wrong_branch` for comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cloner::CloneSpec;
use crate::discriminate::MeasurementBasis;
use crate::error::{Error, Result};
use crate::family::{FamilyBundle, Instance, Variant};
use crate::rational::{recover, Frac};
use crate::statevec::StateVector;

/// The two strategies under comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    NoCloning,
    Cloning,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::NoCloning => "no-cloning",
            Strategy::Cloning => "cloning",
        })
    }
}

/// Transcript of one trial: what was sampled, what the strategy observed,
/// what it guessed, and whether both guesses were right.
#[derive(Clone, Copy, Debug)]
pub struct TrialRecord {
    pub strategy: Strategy,
    pub instance: Instance,
    /// Result of the classical f0 query at x = 0 (no-cloning only).
    pub classical_bit: Option<bool>,
    /// Cloning flag outcome (cloning strategy only).
    pub flag: Option<bool>,
    /// Whether the working hypothesis about f0 was right; None when no
    /// hypothesis was needed (cloning succeeded).
    pub hypothesis_correct: Option<bool>,
    /// Measurement outcomes for the two identification circuits; None on
    /// branches that are booked as uniform guesses.
    pub measured: [Option<usize>; 2],
    /// Guessed H-set indices for (f0⊕f1, f0⊕f2).
    pub guesses: [usize; 2],
    /// True H-set indices.
    pub truth: [usize; 2],
    pub success: bool,
}

/// Everything the per-trial code needs, built once per run: the family,
/// the cloning machine at its optimum, both candidate bases, and lookup
/// tables mapping measurement outcomes to H-set guesses.
pub struct TrialContext {
    bundle: FamilyBundle,
    spec: CloneSpec,
    s1_basis: MeasurementBasis,
    s2_basis: MeasurementBasis,
    uniform: StateVector,
    clonee: Vec<StateVector>,
    /// truth_table[i][j] = H set of s_f0[i] ⊕ s_f12[j]; None for pairs the
    /// instance constraint forbids (the xor leaves the answer space).
    truth_table: Vec<Vec<Option<usize>>>,
    /// s2_guess[i][m] = H set of s_f0[i] ⊕ s2[m]; only the answer-space
    /// candidates i = 1, 2 are ever hypothesized, and for those every
    /// entry is present.
    s2_guess: Vec<Vec<Option<usize>>>,
    /// s1_guess[m] = H set of s_f0[0] ⊕ s1[m] (failure-branch hypothesis).
    s1_guess: Vec<usize>,
    physical_wrong_branch: bool,
}

impl TrialContext {
    pub fn new(bundle: FamilyBundle, physical_wrong_branch: bool) -> Result<Self> {
        let clonee: Vec<StateVector> = bundle
            .s_f0()
            .iter()
            .map(StateVector::phase_state)
            .collect();
        let gammas = CloneSpec::new(&clonee)?.max_efficiencies(None)?;
        let spec = CloneSpec::new(&clonee)?.with_gammas(gammas)?;
        let s1_basis = MeasurementBasis::from_functions(bundle.s1())?;
        let s2_basis = MeasurementBasis::from_functions(bundle.s2())?;
        let uniform = StateVector::uniform(bundle.n())?;

        let mut truth_table = Vec::with_capacity(bundle.s_f0().len());
        let mut s2_guess = Vec::with_capacity(bundle.s_f0().len());
        for f0 in bundle.s_f0() {
            let truths: Result<Vec<Option<usize>>> = bundle
                .s_f12()
                .iter()
                .map(|f| bundle.h_set_of(&f0.xor(f)?))
                .collect();
            truth_table.push(truths?);
            let guesses: Result<Vec<Option<usize>>> = bundle
                .s2()
                .iter()
                .map(|f| bundle.h_set_of(&f0.xor(f)?))
                .collect();
            s2_guess.push(guesses?);
        }
        let s1_guess: Result<Vec<usize>> = bundle
            .s1()
            .iter()
            .map(|f| {
                bundle.h_set_of(&bundle.s_f0()[0].xor(f)?)?.ok_or_else(|| {
                    Error::BadTable("xor of candidate sets left the answer space".into())
                })
            })
            .collect();
        let s1_guess = s1_guess?;

        // The classical query below relies on the two answer-space
        // candidates for f0 disagreeing at x = 0.
        debug_assert_ne!(bundle.f0(1).eval(0), bundle.f0(2).eval(0));

        Ok(Self {
            bundle,
            spec,
            s1_basis,
            s2_basis,
            uniform,
            clonee,
            truth_table,
            s2_guess,
            s1_guess,
            physical_wrong_branch,
        })
    }

    pub fn bundle(&self) -> &FamilyBundle {
        &self.bundle
    }

    pub fn spec(&self) -> &CloneSpec {
        &self.spec
    }

    fn truth(&self, instance: Instance) -> [usize; 2] {
        let t = |j: usize| {
            self.truth_table[instance.f0_idx][j]
                .expect("sampled instances satisfy the xor constraint")
        };
        [t(instance.f1_idx), t(instance.f2_idx)]
    }

    /// Guess implied by hypothesizing f0 = s_f0[pick] and measuring m in
    /// the answer basis.
    fn answer_guess(&self, pick: usize, m: usize) -> usize {
        self.s2_guess[pick][m].expect("answer-space hypotheses keep the xor inside it")
    }

    /// Uniform guess over all H-set pairs; what the scoring assigns to a
    /// wrong-hypothesis branch.
    fn lottery<R: Rng + ?Sized>(&self, rng: &mut R) -> [usize; 2] {
        let m = self.bundle.h_sets().len();
        [rng.random_range(0..m), rng.random_range(0..m)]
    }

    /// Phase-kickback circuit: uniform superposition through the oracle.
    fn circuit(&self, f_idx: usize) -> StateVector {
        self.uniform
            .apply_phase_oracle(self.bundle.f12(f_idx))
            .expect("instance functions share the bundle's n")
    }

    /// The no-cloning baseline. Assume f0 is one of its two answer-space
    /// candidates, split them with a classical query at x = 0, identify
    /// f1 and f2 in the answer basis, and combine. The assumption holds
    /// with probability 2/3 and the trial then succeeds with certainty.
    pub fn no_cloning_trial<R: Rng + ?Sized>(
        &self,
        instance: Instance,
        rng: &mut R,
    ) -> TrialRecord {
        let truth = self.truth(instance);
        let bit = self.bundle.f0(instance.f0_idx).eval(0);
        let pick = if self.bundle.f0(1).eval(0) == bit { 1 } else { 2 };
        let hypothesis_correct = pick == instance.f0_idx;

        let (measured, guesses) = if hypothesis_correct || self.physical_wrong_branch {
            let m1 = self
                .s2_basis
                .measure(&self.circuit(instance.f1_idx), rng)
                .expect("answer basis is complete");
            let m2 = self
                .s2_basis
                .measure(&self.circuit(instance.f2_idx), rng)
                .expect("answer basis is complete");
            ([Some(m1), Some(m2)], [self.answer_guess(pick, m1), self.answer_guess(pick, m2)])
        } else {
            ([None, None], self.lottery(rng))
        };

        TrialRecord {
            strategy: Strategy::NoCloning,
            instance,
            classical_bit: Some(bit),
            flag: None,
            hypothesis_correct: Some(hypothesis_correct),
            measured,
            guesses,
            truth,
            success: guesses == truth,
        }
    }

    /// The cloning strategy. Query f0 quantumly, clone the query state;
    /// on success feed one perfect copy through each remaining oracle and
    /// read both answers off directly. On failure, hypothesize the f0 the
    /// failure flag makes most likely (the first listed candidate),
    /// identify f1 and f2 in the basis that hypothesis implies, and
    /// combine as before.
    pub fn cloning_trial<R: Rng + ?Sized>(
        &self,
        instance: Instance,
        rng: &mut R,
    ) -> TrialRecord {
        let truth = self.truth(instance);
        let flag = self.spec.sample_clone(instance.f0_idx, rng);

        let (hypothesis_correct, measured, guesses) = if flag {
            let psi1 = self.clonee[instance.f0_idx]
                .apply_phase_oracle(self.bundle.f12(instance.f1_idx))
                .expect("instance functions share the bundle's n");
            let psi2 = self.clonee[instance.f0_idx]
                .apply_phase_oracle(self.bundle.f12(instance.f2_idx))
                .expect("instance functions share the bundle's n");
            let m1 = self.s2_basis.measure(&psi1, rng).expect("answer basis is complete");
            let m2 = self.s2_basis.measure(&psi2, rng).expect("answer basis is complete");
            // The clone carries f0's phase, so the measured H set is the
            // answer itself: no reconstruction step.
            (None, [Some(m1), Some(m2)], [m1, m2])
        } else {
            let hypothesis_correct = instance.f0_idx == 0;
            if hypothesis_correct || self.physical_wrong_branch {
                let m1 = self
                    .s1_basis
                    .measure(&self.circuit(instance.f1_idx), rng)
                    .expect("candidate basis is complete");
                let m2 = self
                    .s1_basis
                    .measure(&self.circuit(instance.f2_idx), rng)
                    .expect("candidate basis is complete");
                (
                    Some(hypothesis_correct),
                    [Some(m1), Some(m2)],
                    [self.s1_guess[m1], self.s1_guess[m2]],
                )
            } else {
                (Some(false), [None, None], self.lottery(rng))
            }
        };

        TrialRecord {
            strategy: Strategy::Cloning,
            instance,
            classical_bit: None,
            flag: Some(flag),
            hypothesis_correct,
            measured,
            guesses,
            truth,
            success: guesses == truth,
        }
    }
}

/// Per-trial RNG: one substream per (trial, lane), all derived from the
/// run seed. Lane 0 samples the instance, lanes 1 and 2 drive the two
/// strategies, so both see the same instance stream (common random
/// numbers) and results do not depend on how trials are scheduled.
fn trial_rng(seed: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(3).wrapping_add(lane));
    rng
}

/// Monte Carlo run parameters.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RunConfig {
    pub variant: Variant,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; None uses the global pool. Results are identical
    /// either way.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub distinct_f12: bool,
    pub physical_wrong_branch: bool,
}

impl RunConfig {
    pub fn new(variant: Variant, n: usize) -> Self {
        Self {
            variant,
            n,
            trials: 1_000_000,
            seed: 42,
            threads: None,
            distinct_f12: false,
            physical_wrong_branch: false,
        }
    }
}

/// Tallies accumulated over trials; merged by addition.
#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
pub struct ExperimentCounts {
    pub trials: u64,
    /// No-cloning successes.
    pub nc_success: u64,
    /// Trials whose f0 was an answer-space function (the baseline's
    /// hypothesis holds).
    pub nc_hypothesis_ok: u64,
    /// ... and the baseline also won.
    pub nc_hypothesis_ok_success: u64,
    /// Cloning-strategy successes.
    pub cl_success: u64,
    /// Trials whose clone flag read success.
    pub flag_success: u64,
    /// ... and the strategy also won.
    pub flag_success_win: u64,
    /// Trials whose clone flag read failure.
    pub flag_fail: u64,
    /// ... and f0 really was the failure-branch hypothesis.
    pub flag_fail_hypothesis_ok: u64,
}

impl ExperimentCounts {
    fn absorb(mut self, nc: &TrialRecord, cl: &TrialRecord) -> Self {
        self.trials += 1;
        self.nc_success += u64::from(nc.success);
        if nc.hypothesis_correct == Some(true) {
            self.nc_hypothesis_ok += 1;
            self.nc_hypothesis_ok_success += u64::from(nc.success);
        }
        self.cl_success += u64::from(cl.success);
        if cl.flag == Some(true) {
            self.flag_success += 1;
            self.flag_success_win += u64::from(cl.success);
        } else {
            self.flag_fail += 1;
            self.flag_fail_hypothesis_ok += u64::from(cl.hypothesis_correct == Some(true));
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.nc_success += other.nc_success;
        self.nc_hypothesis_ok += other.nc_hypothesis_ok;
        self.nc_hypothesis_ok_success += other.nc_hypothesis_ok_success;
        self.cl_success += other.cl_success;
        self.flag_success += other.flag_success;
        self.flag_success_win += other.flag_success_win;
        self.flag_fail += other.flag_fail;
        self.flag_fail_hypothesis_ok += other.flag_fail_hypothesis_ok;
        self
    }
}

/// One analytic quantity: decimal value plus the exact fraction when the
/// inputs were recognized as rationals.
#[derive(Clone, Copy, Debug)]
pub struct Score {
    pub value: f64,
    pub exact: Option<Frac>,
}

/// Closed-form predictions for a run.
#[derive(Clone, Debug)]
pub struct AnalyticScores {
    /// No-cloning strategy.
    pub p1: Score,
    /// Cloning strategy, with the wrong-hypothesis branch worth 4^{−n}.
    pub p2: Score,
    /// Variant of p2 with the wrong-hypothesis term doubled; emitted for
    /// family B, where the two candidate constants disagree and the
    /// simulation adjudicates. None for family A.
    pub p2_alt: Option<Score>,
    /// Mean cloning efficiency: the flag's success rate.
    pub p_success: Score,
    /// Largest failure-posterior entry: how often the failure-branch
    /// hypothesis is right.
    pub posterior_top: Score,
}

/// Evaluates the closed forms at the given efficiencies.
///
/// p1 = 2/3 + (1/3)·4^{−n}; p2 = ps + (1−ps)·[pg + (1−pg)·4^{−n}] with
/// ps the mean efficiency and pg the top failure-posterior entry. Exact
/// fractions are carried through whenever every γ is recognized as a
/// small rational.
pub fn analytic_scores(variant: Variant, n: usize, gammas: &[f64]) -> AnalyticScores {
    let m = gammas.len() as f64;
    let ps = gammas.iter().sum::<f64>() / m;
    let total_fail: f64 = gammas.iter().map(|g| 1.0 - g).sum();
    let pg = if total_fail <= f64::EPSILON {
        1.0 / m
    } else {
        gammas.iter().map(|g| (1.0 - g) / total_fail).fold(0.0, f64::max)
    };
    let tail = 0.25f64.powi(n as i32);
    let p1 = 2.0 / 3.0 + tail / 3.0;
    let p2 = ps + (1.0 - ps) * (pg + (1.0 - pg) * tail);
    let p2_alt = ps + (1.0 - ps) * (pg + 2.0 * (1.0 - pg) * tail);

    let exact = exact_scores(n, gammas);
    let score = |value: f64, pick: fn(&ExactScores) -> Frac| Score {
        value,
        exact: exact.as_ref().map(pick),
    };
    AnalyticScores {
        p1: Score { value: p1, exact: Some(exact_p1(n)) },
        p2: score(p2, |e| e.p2),
        p2_alt: match variant {
            Variant::A => None,
            Variant::B => Some(score(p2_alt, |e| e.p2_alt)),
        },
        p_success: score(ps, |e| e.p_success),
        posterior_top: score(pg, |e| e.posterior_top),
    }
}

struct ExactScores {
    p2: Frac,
    p2_alt: Frac,
    p_success: Frac,
    posterior_top: Frac,
}

/// 4^n as an exact fraction denominator; n ≤ 14 keeps it far from
/// overflow.
fn exact_tail(n: usize) -> Frac {
    Frac::new(1, 4i64.pow(n as u32))
}

fn exact_p1(n: usize) -> Frac {
    Frac::new(2, 3) + exact_tail(n) / 3
}

fn exact_scores(n: usize, gammas: &[f64]) -> Option<ExactScores> {
    let gs: Option<Vec<Frac>> = gammas.iter().map(|&g| recover(g)).collect();
    let gs = gs?;
    let m = Frac::from(gs.len() as i64);
    let one = Frac::from(1);
    let ps = gs.iter().sum::<Frac>() / m;
    let total_fail: Frac = gs.iter().map(|g| one - g).sum();
    let pg = if total_fail == Frac::from(0) {
        one / m
    } else {
        gs.iter().map(|g| (one - g) / total_fail).max()?
    };
    let tail = exact_tail(n);
    Some(ExactScores {
        p2: ps + (one - ps) * (pg + (one - pg) * tail),
        p2_alt: ps + (one - ps) * (pg + (one - pg) * tail * 2),
        p_success: ps,
        posterior_top: pg,
    })
}

/// Everything a finished run reports: the tallies plus the analytic
/// targets they are compared against.
pub struct ExperimentResult {
    pub config: RunConfig,
    pub gammas: Vec<f64>,
    pub counts: ExperimentCounts,
    pub analytic: AnalyticScores,
}

/// Runs both strategies over `config.trials` common instances.
///
/// Every trial derives its own RNG substreams from (seed, trial index),
/// so the result is a pure function of the config: thread count and
/// scheduling cannot change it.
pub fn run_experiment(config: RunConfig) -> Result<ExperimentResult> {
    if config.trials == 0 {
        return Err(Error::BadConfig("trials must be at least 1".into()));
    }
    let bundle = FamilyBundle::build(config.variant, config.n)?;
    let ctx = TrialContext::new(bundle, config.physical_wrong_branch)?;

    let run = || {
        (0..config.trials)
            .into_par_iter()
            .fold(ExperimentCounts::default, |acc, t| {
                let instance = ctx
                    .bundle
                    .sample_instance(&mut trial_rng(config.seed, t, 0), config.distinct_f12);
                let nc = ctx.no_cloning_trial(instance, &mut trial_rng(config.seed, t, 1));
                let cl = ctx.cloning_trial(instance, &mut trial_rng(config.seed, t, 2));
                acc.absorb(&nc, &cl)
            })
            .reduce(ExperimentCounts::default, ExperimentCounts::merge)
    };
    let counts = match config.threads {
        None => run(),
        Some(threads) => {
            if threads == 0 {
                return Err(Error::BadConfig("threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::BadConfig(format!("thread pool: {e}")))?
                .install(run)
        }
    };

    let gammas = ctx.spec.gammas().to_vec();
    let analytic = analytic_scores(config.variant, config.n, &gammas);
    Ok(ExperimentResult { config, gammas, counts, analytic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn context(variant: Variant) -> TrialContext {
        let bundle = FamilyBundle::build(variant, variant.base_n()).unwrap();
        TrialContext::new(bundle, false).unwrap()
    }

    #[test]
    fn analytic_family_a() {
        let s = analytic_scores(Variant::A, 3, &[7.0 / 127.0, 112.0 / 127.0, 112.0 / 127.0]);
        assert_eq!(s.p1.exact, Some(Frac::new(43, 64)));
        assert_abs_diff_eq!(s.p1.value, 0.671875, epsilon = 1e-12);
        assert_eq!(s.p2.exact, Some(Frac::new(3749, 4064)));
        assert_abs_diff_eq!(s.p2.value, 3749.0 / 4064.0, epsilon = 1e-9);
        assert!(s.p2_alt.is_none());
        assert_eq!(s.p_success.exact, Some(Frac::new(77, 127)));
        assert_eq!(s.posterior_top.exact, Some(Frac::new(4, 5)));
    }

    #[test]
    fn analytic_family_b() {
        let s = analytic_scores(Variant::B, 2, &[1.0 / 7.0, 4.0 / 7.0, 4.0 / 7.0]);
        assert_eq!(s.p1.exact, Some(Frac::new(11, 16)));
        assert_eq!(s.p2.exact, Some(Frac::new(41, 56)));
        let alt = s.p2_alt.expect("family B carries the alternative constant");
        assert_eq!(alt.exact, Some(Frac::new(3, 4)));
        assert_eq!(s.p_success.exact, Some(Frac::new(3, 7)));
        assert_eq!(s.posterior_top.exact, Some(Frac::new(1, 2)));
    }

    #[test]
    fn analytic_survives_unrecognized_gammas() {
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        let s = analytic_scores(Variant::A, 3, &[phi_inv, 0.5, 0.5]);
        assert!(s.p2.exact.is_none());
        assert!(s.p1.exact.is_some());
        assert!(s.p2.value > 0.0 && s.p2.value < 1.0);
    }

    #[test]
    fn correct_hypothesis_trials_always_succeed() {
        for variant in [Variant::A, Variant::B] {
            let ctx = context(variant);
            let mut any_ok = false;
            let mut any_flag = false;
            for t in 0..2_000u64 {
                let instance = ctx.bundle().sample_instance(&mut trial_rng(5, t, 0), false);
                let nc = ctx.no_cloning_trial(instance, &mut trial_rng(5, t, 1));
                if nc.hypothesis_correct == Some(true) {
                    assert!(nc.success, "baseline must win when its hypothesis holds");
                    assert!(nc.measured[0].is_some() && nc.measured[1].is_some());
                    any_ok = true;
                }
                let cl = ctx.cloning_trial(instance, &mut trial_rng(5, t, 2));
                if cl.flag == Some(true) {
                    assert!(cl.success, "perfect clones read the answer deterministically");
                    any_flag = true;
                }
                if cl.flag == Some(false) && cl.hypothesis_correct == Some(true) {
                    assert!(cl.success, "correct failure hypothesis recovers both answers");
                }
            }
            assert!(any_ok && any_flag);
        }
    }

    #[test]
    fn wrong_hypothesis_books_a_lottery() {
        let ctx = context(Variant::A);
        // Force f0 to the non-answer-space candidate.
        let instance = Instance { f0_idx: 0, f1_idx: 0, f2_idx: 1 };
        let mut rng = trial_rng(9, 0, 1);
        let nc = ctx.no_cloning_trial(instance, &mut rng);
        assert_eq!(nc.hypothesis_correct, Some(false));
        assert_eq!(nc.measured, [None, None]);
        assert!(nc.guesses[0] < ctx.bundle().h_sets().len());
    }

    #[test]
    fn classical_bit_reads_f0_at_zero() {
        let ctx = context(Variant::B);
        for f0_idx in 0..3 {
            // Pick a candidate index the xor constraint allows for this f0.
            let f12 = if f0_idx == 0 { 0 } else { ctx.bundle().s1().len() };
            let instance = Instance { f0_idx, f1_idx: f12, f2_idx: f12 };
            let nc = ctx.no_cloning_trial(instance, &mut trial_rng(1, 0, 1));
            assert_eq!(nc.classical_bit, Some(ctx.bundle().f0(f0_idx).eval(0)));
        }
    }

    #[test]
    fn run_is_deterministic_and_thread_independent() {
        let mut config = RunConfig::new(Variant::B, 2);
        config.trials = 20_000;
        config.seed = 321;
        let a = run_experiment(config).unwrap();
        let b = run_experiment(config).unwrap();
        assert_eq!(a.counts, b.counts);
        config.threads = Some(2);
        let c = run_experiment(config).unwrap();
        assert_eq!(a.counts, c.counts);
        config.threads = Some(1);
        let d = run_experiment(config).unwrap();
        assert_eq!(a.counts, d.counts);
    }

    #[test]
    fn zero_trials_rejected() {
        let mut config = RunConfig::new(Variant::A, 3);
        config.trials = 0;
        assert!(run_experiment(config).is_err());
    }

    #[test]
    fn counts_are_internally_consistent() {
        let mut config = RunConfig::new(Variant::A, 3);
        config.trials = 50_000;
        let r = run_experiment(config).unwrap();
        let c = r.counts;
        assert_eq!(c.trials, 50_000);
        assert_eq!(c.flag_success + c.flag_fail, c.trials);
        // Conditional determinism on both deterministic branches.
        assert_eq!(c.nc_hypothesis_ok_success, c.nc_hypothesis_ok);
        assert_eq!(c.flag_success_win, c.flag_success);
    }

    #[test]
    fn empirical_rates_track_analytic_values() {
        let mut config = RunConfig::new(Variant::A, 3);
        config.trials = 200_000;
        let r = run_experiment(config).unwrap();
        let trials = r.counts.trials as f64;
        for (hits, score) in [
            (r.counts.nc_success, &r.analytic.p1),
            (r.counts.cl_success, &r.analytic.p2),
        ] {
            let p = score.value;
            let sigma = (p * (1.0 - p) / trials).sqrt();
            let rate = hits as f64 / trials;
            assert!(
                (rate - p).abs() < 4.0 * sigma,
                "rate {rate} strayed from {p} (sigma {sigma})"
            );
        }
        let ps = r.analytic.p_success.value;
        let sigma = (ps * (1.0 - ps) / trials).sqrt();
        assert!((r.counts.flag_success as f64 / trials - ps).abs() < 4.0 * sigma);
    }

    #[test]
    fn distinct_f12_keeps_instances_distinct() {
        let mut config = RunConfig::new(Variant::B, 2);
        config.trials = 5_000;
        config.distinct_f12 = true;
        let r = run_experiment(config).unwrap();
        assert_eq!(r.counts.trials, 5_000);
        let bundle = FamilyBundle::build(Variant::B, 2).unwrap();
        for t in 0..200 {
            let i = bundle.sample_instance(&mut trial_rng(config.seed, t, 0), true);
            assert_ne!(i.f1_idx, i.f2_idx);
        }
    }

    #[test]
    fn physical_wrong_branch_still_runs() {
        let mut config = RunConfig::new(Variant::B, 2);
        config.trials = 20_000;
        config.physical_wrong_branch = true;
        let r = run_experiment(config).unwrap();
        // Deterministic branches are untouched by the flag.
        assert_eq!(r.counts.flag_success_win, r.counts.flag_success);
        assert_eq!(r.counts.nc_hypothesis_ok_success, r.counts.nc_hypothesis_ok);
        assert!(r.counts.cl_success > 0);
    }

    #[test]
    fn strategies_see_the_same_instances() {
        let ctx = context(Variant::A);
        for t in 0..50 {
            let a = ctx.bundle().sample_instance(&mut trial_rng(77, t, 0), false);
            let b = ctx.bundle().sample_instance(&mut trial_rng(77, t, 0), false);
            assert_eq!(a, b);
        }
    }
}
