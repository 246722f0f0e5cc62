//! End-to-end signalling audit.
//!
//! Alice encodes one of `d+1` messages into phase-ensemble states (any `d`
//! of them linearly independent) and prepares the chosen state at Bob's site
//! through exact RSP, spending `log₂ d` classical bits. A hypothetical
//! 1→2 cloner on Bob's side would hand him two copies; the two-copy lifts of
//! all `d+1` states are linearly independent, so unambiguous discrimination
//! then decodes the message without error whenever it is conclusive —
//! extracting up to `log₂(d+1)` bits from a `log₂ d`-bit channel. The audit
//! measures exactly that gap. The cloner is simulated by an explicitly
//! non-physical counterfactual oracle (no such machine exists; the embedded
//! impossibility certificate quantifies why), succeeding with a declared
//! probability `γ` per message. With the oracle disabled, Bob measures his
//! single copy and the audit verifies that no violation appears.

use crate::cloning::{impossibility_certificate, max_equal_gamma, ImpossibilityCertificate};
use crate::discrimination::{optimize_usd, sample_categorical, UsdObjective};
use crate::ensemble::{phase_state, PhaseEnsembleSpec, PhasePoint};
use crate::error::{Error, Result};
use crate::rsp::{run_rsp_with_rng, SharedEntangledState};
use crate::scalar::RealScalar;
use crate::state::PureState;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Bob's decoding resources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClonerMode {
    /// The declared-γ cloning oracle feeding two-copy USD.
    CounterfactualOracle,
    /// No cloner: single-copy measurement on the best independent subset.
    None,
}

/// Configuration of one audit experiment.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AuditConfig<T: RealScalar> {
    pub dim: usize,
    pub spec: PhaseEnsembleSpec<T>,
    /// `d+1` phase points; pairwise distinct, any `d` independent.
    pub message_states: Vec<PhasePoint<T>>,
    pub trials: usize,
    pub seed: u64,
    pub cloner_mode: ClonerMode,
}

impl<T: RealScalar> AuditConfig<T> {
    /// Materializes the message states and checks every config invariant.
    pub fn validated_states(&self) -> Result<Vec<PureState<T>>> {
        if self.trials == 0 {
            return Err(Error::ConfigError("field `trials` must be ≥ 1".into()));
        }
        if self.spec.dim() != self.dim {
            return Err(Error::ConfigError(format!(
                "field `alpha` has {} entries, field `dim` says {}",
                self.spec.dim(),
                self.dim
            )));
        }
        if self.message_states.len() != self.dim + 1 {
            return Err(Error::ConfigError(format!(
                "field `message_states` must hold exactly {} phase points, got {}",
                self.dim + 1,
                self.message_states.len()
            )));
        }
        let states: Vec<PureState<T>> = self
            .message_states
            .iter()
            .map(|p| {
                phase_state(&self.spec, p)
                    .map_err(|e| Error::ConfigError(format!("field `message_states`: {e}")))
            })
            .collect::<Result<_>>()?;
        crate::independence::check_two_copy_preconditions(&states)
            .map_err(|e| Error::ConfigError(e.to_string()))?;
        Ok(states)
    }
}

/// One per-trial record, mirrored into the CSV output.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub message: usize,
    pub rsp_outcome: usize,
    pub clone_success: bool,
    /// Conclusive decode, or `None` for abstention (inconclusive outcome or
    /// clone failure).
    pub decode: Option<usize>,
}

/// Plug-in mutual information with its statistical accounting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MiEstimate {
    pub bits: f64,
    /// Delta-method standard error of the plug-in estimate.
    pub sigma_delta: f64,
    /// Miller–Madow-style bias magnitude `|K_xy − K_x − K_y + 1| / (2N ln 2)`.
    pub bias_magnitude: f64,
    pub samples: u64,
}

impl MiEstimate {
    /// Overall uncertainty scale used for margins: standard error plus bias
    /// allowance plus a `1/N` floor for degenerate tables.
    pub fn sigma(&self) -> f64 {
        self.sigma_delta + self.bias_magnitude + 1.0 / self.samples.max(1) as f64
    }
}

/// Full accounting of one audit run.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AuditReport<T: RealScalar> {
    pub cloner_mode: ClonerMode,
    pub trials: u64,
    /// `log₂ d`: what Alice actually spends per message.
    pub classical_cost_bits: f64,
    /// Empirical conclusive-decode rate per message.
    pub conclusive_prob_per_message: Vec<f64>,
    /// Mutual information between message and decode on conclusive trials.
    pub conditional_info_bits: f64,
    pub conditional_info: MiEstimate,
    /// Mutual information over all trials, abstentions included.
    pub unconditional_info_bits: f64,
    pub unconditional_info: MiEstimate,
    /// Conclusive decodes that named the wrong message.
    pub decode_error_count: u64,
    /// `conditional_info_bits > classical_cost_bits + 3σ`.
    pub violation: bool,
    pub violation_margin_bits: f64,
    /// Success probabilities granted to the counterfactual oracle (absent
    /// when the cloner is disabled).
    pub oracle_gammas: Option<Vec<f64>>,
    /// Set in counterfactual mode: states plainly that the oracle is not a
    /// physical machine.
    pub oracle_note: Option<String>,
    /// Best achievable USD objective values for Bob's decoding family.
    pub usd_objective_average: f64,
    pub usd_objective_worst_case: f64,
    /// Algebraic impossibility of the cloner the oracle pretends to be.
    pub impossibility: ImpossibilityCertificate<T>,
}

/// Plug-in mutual information (base 2) of a joint count table, with
/// `0 · log 0 = 0`.
pub fn mutual_information(joint_counts: &[Vec<u64>]) -> Result<f64> {
    Ok(mutual_information_stats(joint_counts)?.bits)
}

/// Plug-in mutual information with delta-method standard error and a
/// Miller–Madow-style bias magnitude.
pub fn mutual_information_stats(joint_counts: &[Vec<u64>]) -> Result<MiEstimate> {
    let total: u64 = joint_counts.iter().flatten().sum();
    if total == 0 {
        return Err(Error::EmptyData);
    }
    let n = total as f64;
    let cols = joint_counts.iter().map(Vec::len).max().unwrap_or(0);
    let row_sums: Vec<f64> = joint_counts
        .iter()
        .map(|r| r.iter().sum::<u64>() as f64 / n)
        .collect();
    let mut col_sums = vec![0.0f64; cols];
    for row in joint_counts {
        for (y, &c) in row.iter().enumerate() {
            col_sums[y] += c as f64 / n;
        }
    }

    let mut mi = 0.0f64;
    let mut second_moment = 0.0f64;
    let mut k_xy = 0u64;
    for (x, row) in joint_counts.iter().enumerate() {
        for (y, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            k_xy += 1;
            let p = c as f64 / n;
            let l = (p / (row_sums[x] * col_sums[y])).log2();
            mi += p * l;
            second_moment += p * l * l;
        }
    }
    let k_x = row_sums.iter().filter(|&&p| p > 0.0).count() as f64;
    let k_y = col_sums.iter().filter(|&&p| p > 0.0).count() as f64;
    let sigma_delta = ((second_moment - mi * mi).max(0.0) / n).sqrt();
    let bias_magnitude =
        (k_xy as f64 - k_x - k_y + 1.0).abs() / (2.0 * n * std::f64::consts::LN_2);
    Ok(MiEstimate {
        bits: mi,
        sigma_delta,
        bias_magnitude,
        samples: total,
    })
}

/// Splitmix64 step; derives independent per-trial seeds from the master
/// seed so trials stay reproducible under any parallel schedule.
fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Runs the audit and returns the report plus the per-trial records.
pub fn run_signalling_audit<T: RealScalar>(
    cfg: &AuditConfig<T>,
) -> Result<(AuditReport<T>, Vec<TrialRecord>)> {
    let states = cfg.validated_states()?;
    let d = cfg.dim;
    let n_messages = d + 1;
    let shared = SharedEntangledState::new(cfg.spec.clone())
        .map_err(|e| Error::ConfigError(e.to_string()))?;
    let impossibility = impossibility_certificate(&states)?;

    // Bob's decoding family and the per-message decode distributions.
    // Decoding uses the worst-case (equalized) POVM so conclusive events
    // weigh the messages evenly; the average objective is reported too.
    struct DecodeSetup<T: RealScalar> {
        /// Per-message outcome distribution under the decode POVM.
        rows: Vec<Vec<T>>,
        /// Conclusive outcome index → original message index.
        map: Vec<usize>,
        gammas: Option<Vec<f64>>,
        usd_avg: f64,
        usd_worst: f64,
    }
    let setup: DecodeSetup<T> = match cfg.cloner_mode {
        ClonerMode::CounterfactualOracle => {
            let lifted: Vec<PureState<T>> = states
                .iter()
                .map(|s| s.tensor_power(2))
                .collect::<Result<_>>()?;
            let usd_worst = optimize_usd(&lifted, None, UsdObjective::WorstCase, cfg.seed)?;
            let usd_avg = optimize_usd(&lifted, None, UsdObjective::Average, cfg.seed)?;
            let rows: Vec<Vec<T>> = lifted
                .iter()
                .map(|s| usd_worst.povm.outcome_probabilities(s))
                .collect::<Result<_>>()?;
            let gamma = max_equal_gamma(&states[..d])?.to_f64().unwrap_or(0.0);
            DecodeSetup {
                rows,
                map: (0..n_messages).collect(),
                gammas: Some(vec![gamma; n_messages]),
                usd_avg: usd_avg.objective_value.to_f64().unwrap_or(f64::NAN),
                usd_worst: usd_worst.objective_value.to_f64().unwrap_or(f64::NAN),
            }
        }
        ClonerMode::None => {
            // Best leave-one-out subset by the worst-case objective; the
            // remaining message simply falls outside Bob's hypothesis set.
            let leave_one_out = |skip: usize| -> Vec<PureState<T>> {
                states
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, s)| s.clone())
                    .collect()
            };
            let mut best: Option<(usize, T)> = None;
            for skip in 0..n_messages {
                let r = optimize_usd(&leave_one_out(skip), None, UsdObjective::WorstCase, cfg.seed)?;
                if best.is_none_or(|(_, v)| r.objective_value > v) {
                    best = Some((skip, r.objective_value));
                }
            }
            let (skip, _) = best.expect("at least one subset");
            let subset = leave_one_out(skip);
            let usd_worst = optimize_usd(&subset, None, UsdObjective::WorstCase, cfg.seed)?;
            let usd_avg = optimize_usd(&subset, None, UsdObjective::Average, cfg.seed)?;
            let rows: Vec<Vec<T>> = states
                .iter()
                .map(|s| usd_worst.povm.outcome_probabilities(s))
                .collect::<Result<_>>()?;
            DecodeSetup {
                rows,
                map: (0..n_messages).filter(|&k| k != skip).collect(),
                gammas: None,
                usd_avg: usd_avg.objective_value.to_f64().unwrap_or(f64::NAN),
                usd_worst: usd_worst.objective_value.to_f64().unwrap_or(f64::NAN),
            }
        }
    };
    let DecodeSetup {
        rows: decode_rows,
        map: decode_map,
        gammas,
        usd_avg,
        usd_worst,
    } = setup;
    let inconclusive = decode_rows[0].len() - 1;
    let gamma_probs: Vec<f64> = gammas.clone().unwrap_or_default();

    let mut records = Vec::with_capacity(cfg.trials);
    // Joint counts: rows = sent message, columns = decode ∪ {abstain}.
    let mut full_table = vec![vec![0u64; n_messages + 1]; n_messages];
    let mut cond_table = vec![vec![0u64; n_messages]; n_messages];
    let mut message_counts = vec![0u64; n_messages];
    let mut conclusive_counts = vec![0u64; n_messages];
    let mut decode_errors = 0u64;
    // The classical cost is read off the protocol transcripts, never
    // recomputed on the side.
    let mut classical_cost_bits = f64::NAN;

    for trial in 0..cfg.trials as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, trial));
        let message = rng.random_range(0..n_messages);
        message_counts[message] += 1;

        let (_, transcript) = run_rsp_with_rng(&shared, &cfg.message_states[message], &mut rng)?;
        classical_cost_bits = transcript.cbits_sent;

        let clone_success = match cfg.cloner_mode {
            ClonerMode::CounterfactualOracle => {
                rng.random_range(0.0..1.0) < gamma_probs[message]
            }
            ClonerMode::None => false,
        };

        let measured = match cfg.cloner_mode {
            ClonerMode::CounterfactualOracle => clone_success,
            ClonerMode::None => true,
        };
        let decode = if measured {
            let outcome = sample_categorical(&decode_rows[message], &mut rng);
            if outcome == inconclusive {
                None
            } else {
                Some(decode_map[outcome])
            }
        } else {
            None
        };

        match decode {
            Some(j) => {
                full_table[message][j] += 1;
                cond_table[message][j] += 1;
                conclusive_counts[message] += 1;
                if j != message {
                    decode_errors += 1;
                }
            }
            None => full_table[message][n_messages] += 1,
        }

        records.push(TrialRecord {
            trial,
            message,
            rsp_outcome: transcript.outcome,
            clone_success,
            decode,
        });
    }

    let conditional_info = mutual_information_stats(&cond_table).unwrap_or(MiEstimate {
        bits: 0.0,
        sigma_delta: 0.0,
        bias_magnitude: 0.0,
        samples: 0,
    });
    let unconditional_info = mutual_information_stats(&full_table)?;

    let margin = 3.0 * conditional_info.sigma();
    let violation = conditional_info.bits > classical_cost_bits + margin;

    let conclusive_prob_per_message: Vec<f64> = conclusive_counts
        .iter()
        .zip(&message_counts)
        .map(|(&c, &m)| if m == 0 { 0.0 } else { c as f64 / m as f64 })
        .collect();

    let oracle_note = match cfg.cloner_mode {
        ClonerMode::CounterfactualOracle => Some(
            "counterfactual cloning oracle: a declared-γ reference adversary, \
             not a physical machine; see the impossibility certificate"
                .to_string(),
        ),
        ClonerMode::None => None,
    };

    let report = AuditReport {
        cloner_mode: cfg.cloner_mode,
        trials: cfg.trials as u64,
        classical_cost_bits,
        conclusive_prob_per_message,
        conditional_info_bits: conditional_info.bits,
        conditional_info,
        unconditional_info_bits: unconditional_info.bits,
        unconditional_info,
        decode_error_count: decode_errors,
        violation,
        violation_margin_bits: margin,
        oracle_gammas: gammas,
        oracle_note,
        usd_objective_average: usd_avg,
        usd_objective_worst_case: usd_worst,
        impossibility,
    };
    Ok((report, records))
}

/// Runs the audit with the cloner disabled and returns the achieved
/// unconditional information; ≤ `log₂ d` up to statistical noise.
pub fn baseline_no_cloner_bound<T: RealScalar>(cfg: &AuditConfig<T>) -> Result<f64> {
    let mut baseline = cfg.clone();
    baseline.cloner_mode = ClonerMode::None;
    let (report, _) = run_signalling_audit(&baseline)?;
    Ok(report.unconditional_info_bits)
}

/// Serializes trial records as the CSV the CLI writes next to the report.
pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,message,rsp_outcome,clone_success,decode\n");
    for r in records {
        let decode = r.decode.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.message, r.rsp_outcome, r.clone_success, decode
        ));
    }
    out
}
