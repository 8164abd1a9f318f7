//! Exhaustive maximum-likelihood search, the reference the Viterbi decoder is
//! checked against.

use super::{branch_metric_word, DecodeConfig, DecodeResult, Schedule};
use crate::channel::SoftSequence;
use crate::convcode::Trellis;
use crate::{Bit, Error, Result};

/// Largest number of free inputs (data and NTC steps) the search enumerates.
pub const MAX_FREE_INPUTS: usize = 20;

/// Tries every legal input sequence under the same constraints as
/// [`super::viterbi_decode`]: lock positions hold their lock bit, NTC steps
/// are free, and paths through excluded states are illegal. Ties keep the
/// lexicographically smallest input sequence (start state first when the
/// start is not forced).
pub fn ml_oracle_decode(trellis: &Trellis, seq: &SoftSequence, cfg: &DecodeConfig) -> Result<DecodeResult> {
    let schedule = Schedule::new(trellis, seq, cfg)?;
    let free: Vec<usize> = (0..schedule.steps)
        .filter(|&t| schedule.forced_input(t).is_none())
        .collect();
    if free.len() > MAX_FREE_INPUTS {
        return Err(Error::OracleTooLong(free.len()));
    }
    if schedule.steps == 0 {
        return Ok(DecodeResult {
            decoded_input_bits: Vec::new(),
            final_metric: 0.0,
            end_state: 0,
            start_state: 0,
        });
    }

    let width = trellis.outputs();
    let branch: Vec<Vec<f64>> = seq
        .samples()
        .chunks_exact(width)
        .map(|r| (0..1u32 << width).map(|w| branch_metric_word(r, w, cfg.metric)).collect())
        .collect();
    let starts: Vec<usize> = if cfg.start_state_forced {
        vec![0]
    } else {
        (0..trellis.state_count())
            .filter(|&s| !trellis.is_excluded(cfg.lock_mode, s, 0))
            .collect()
    };

    let mut inputs: Vec<Bit> = (0..schedule.steps)
        .map(|t| schedule.forced_input(t).unwrap_or(0))
        .collect();
    let mut best: Option<(f64, Vec<Bit>, usize, usize)> = None;
    for &start in &starts {
        for code in 0u32..1 << free.len() {
            for (i, &t) in free.iter().enumerate() {
                inputs[t] = ((code >> (free.len() - 1 - i)) & 1) as Bit;
            }
            let Some((metric, end)) = walk(trellis, cfg, &branch, start, &inputs) else {
                continue;
            };
            if best.as_ref().is_none_or(|(b, ..)| metric < *b) {
                best = Some((metric, inputs.clone(), start, end));
            }
        }
    }
    let (final_metric, mut decoded, start_state, end_state) =
        best.expect("the all-lock path is always legal");
    decoded.truncate(schedule.data_steps);
    Ok(DecodeResult {
        decoded_input_bits: decoded,
        final_metric,
        end_state,
        start_state,
    })
}

fn walk(
    trellis: &Trellis,
    cfg: &DecodeConfig,
    branch: &[Vec<f64>],
    start: usize,
    inputs: &[Bit],
) -> Option<(f64, usize)> {
    let mut s = start;
    let mut metric = 0.0;
    for (t, (&x, bm)) in inputs.iter().zip(branch).enumerate() {
        let tr = trellis.transition(s, x);
        if trellis.is_excluded(cfg.lock_mode, tr.next_state, t + 1) {
            return None;
        }
        metric += bm[tr.output as usize];
        s = tr.next_state;
    }
    Some((metric, s))
}
