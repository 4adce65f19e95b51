//! Editorial strategies.
//!
//! A strategy is the editor's invitation policy: given the state of one
//! manuscript's review process, decide how many new review threads to open.
//! Strategies are consulted only while the manuscript still needs reviews,
//! i.e. while `received_reviews < required_reviews`.

use std::fmt;

/// Snapshot of one manuscript's review process at a decision point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyState {
    /// Reviews needed before the editor can decide on the manuscript.
    pub required_reviews: u32,
    /// Reviews received so far.
    pub received_reviews: u32,
    /// Threads currently awaiting a response.
    pub active_threads: u32,
    /// Upper bound on invitations sent at once.
    pub batch_size: u32,
}

impl StrategyState {
    /// All decision states a strategy can be asked about: every batch size in
    /// `batch_sizes`, active threads `0..=batch_size`, received reviews
    /// `0..required_reviews`. States with all reviews already received are
    /// excluded because the simulation never consults a strategy there.
    pub fn enumerate(
        required_reviews: u32,
        batch_sizes: impl IntoIterator<Item = u32>,
    ) -> Vec<StrategyState> {
        let mut states = Vec::new();
        for batch_size in batch_sizes {
            for active_threads in 0..=batch_size {
                for received_reviews in 0..required_reviews {
                    states.push(StrategyState {
                        required_reviews,
                        received_reviews,
                        active_threads,
                        batch_size,
                    });
                }
            }
        }
        states
    }
}

/// A strategy's answer: how many new review threads to open.
///
/// The count is a plain integer rather than an unsigned one so that broken
/// strategies (in particular evolved programs) can express invalid answers,
/// which the simulation must detect rather than silently clamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub new_threads: i64,
}

/// Why a decision was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// Fewer than zero new threads.
    NegativeCount,
    /// Active threads would exceed the batch size.
    BatchExceeded,
    /// No active threads and no new ones: the process would stall forever.
    NoProgress,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::NegativeCount => f.write_str("negative thread count"),
            InvalidReason::BatchExceeded => f.write_str("batch size exceeded"),
            InvalidReason::NoProgress => f.write_str("no active threads and none opened"),
        }
    }
}

/// Outcome of validating a decision against the state it was made in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Decision {
    /// Check the three validity constraints, in order: the count must not be
    /// negative, the resulting active threads must not exceed the batch size,
    /// and when no threads are active at least one must be opened.
    pub fn validate(&self, state: StrategyState) -> Validity {
        if self.new_threads < 0 {
            return Validity::Invalid(InvalidReason::NegativeCount);
        }
        let resulting = self.new_threads.saturating_add(i64::from(state.active_threads));
        if resulting > i64::from(state.batch_size) {
            return Validity::Invalid(InvalidReason::BatchExceeded);
        }
        if state.active_threads == 0 && self.new_threads == 0 {
            return Validity::Invalid(InvalidReason::NoProgress);
        }
        Validity::Valid
    }
}

/// An editorial invitation policy.
///
/// `Send + Sync` so one strategy instance can drive many simulation runs in
/// parallel; implementations must be pure functions of the state.
pub trait Strategy: Send + Sync {
    fn decide(&self, state: StrategyState) -> Decision;
}

impl<T: Strategy + ?Sized> Strategy for &T {
    fn decide(&self, state: StrategyState) -> Decision {
        (**self).decide(state)
    }
}

impl<T: Strategy + ?Sized> Strategy for Box<T> {
    fn decide(&self, state: StrategyState) -> Decision {
        (**self).decide(state)
    }
}

/// Patient editor: send a full batch of invitations, then wait until every
/// thread has finished before sending the next full batch.
#[derive(Debug, Clone, Copy, Default)]
pub struct EditorA;

impl Strategy for EditorA {
    fn decide(&self, state: StrategyState) -> Decision {
        let new_threads = if state.active_threads == 0 {
            i64::from(state.batch_size)
        } else {
            0
        };
        Decision { new_threads }
    }
}

/// Eager editor: top the active threads back up to the full batch size at
/// every decision point.
#[derive(Debug, Clone, Copy, Default)]
pub struct EditorB;

impl Strategy for EditorB {
    fn decide(&self, state: StrategyState) -> Decision {
        Decision {
            new_threads: i64::from(state.batch_size) - i64::from(state.active_threads),
        }
    }
}

/// Reference policy distilled from evolved programs: work in half-batch
/// waves instead of full drains.
///
/// With two or more threads active it opens none. With one active thread it
/// keeps waiting if a review has already arrived, and otherwise commits
/// another wave immediately rather than letting the pipeline drain. With no
/// active threads it opens a fresh wave. The wave is half the batch (rounded
/// up, at least two) capped by the batch headroom, which at batch size four
/// reduces to the canonical behaviour: open two, wait until one silent
/// thread remains, then reinforce with two.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvolvedReference;

impl EvolvedReference {
    fn wave(batch: u32) -> u32 {
        batch.div_ceil(2).max(2)
    }
}

impl Strategy for EvolvedReference {
    fn decide(&self, state: StrategyState) -> Decision {
        let wave = Self::wave(state.batch_size);
        let new_threads = match state.active_threads {
            0 => i64::from(wave.min(state.batch_size)),
            1 => {
                if state.received_reviews >= 1 {
                    0
                } else {
                    i64::from(wave.min(state.batch_size.saturating_sub(1)))
                }
            }
            _ => 0,
        };
        Decision { new_threads }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(received: u32, active: u32, batch: u32) -> StrategyState {
        StrategyState {
            required_reviews: 2,
            received_reviews: received,
            active_threads: active,
            batch_size: batch,
        }
    }

    #[test]
    fn editor_a_waits_for_quiet() {
        assert_eq!(EditorA.decide(state(0, 0, 10)).new_threads, 10);
        assert_eq!(EditorA.decide(state(0, 3, 10)).new_threads, 0);
        assert_eq!(EditorA.decide(state(1, 10, 10)).new_threads, 0);
        assert_eq!(EditorA.decide(state(1, 0, 10)).new_threads, 10);
    }

    #[test]
    fn editor_b_tops_up() {
        assert_eq!(EditorB.decide(state(0, 0, 10)).new_threads, 10);
        assert_eq!(EditorB.decide(state(0, 3, 10)).new_threads, 7);
        assert_eq!(EditorB.decide(state(1, 10, 10)).new_threads, 0);
        assert_eq!(EditorB.decide(state(1, 9, 10)).new_threads, 1);
    }

    #[test]
    fn evolved_reference_cases() {
        assert_eq!(EvolvedReference.decide(state(0, 0, 4)).new_threads, 2);
        assert_eq!(EvolvedReference.decide(state(1, 0, 4)).new_threads, 2);
        assert_eq!(EvolvedReference.decide(state(0, 1, 4)).new_threads, 2);
        assert_eq!(EvolvedReference.decide(state(1, 1, 4)).new_threads, 0);
        assert_eq!(EvolvedReference.decide(state(0, 2, 10)).new_threads, 0);
        assert_eq!(EvolvedReference.decide(state(1, 2, 10)).new_threads, 0);
        assert_eq!(EvolvedReference.decide(state(0, 5, 10)).new_threads, 0);
    }

    #[test]
    fn evolved_reference_small_batches() {
        // Headroom caps the pair at batch sizes 2 and 3.
        assert_eq!(EvolvedReference.decide(state(0, 0, 2)).new_threads, 2);
        assert_eq!(EvolvedReference.decide(state(0, 1, 2)).new_threads, 1);
        assert_eq!(EvolvedReference.decide(state(1, 1, 2)).new_threads, 0);
        assert_eq!(EvolvedReference.decide(state(0, 1, 3)).new_threads, 2);
    }

    #[test]
    fn evolved_reference_scales_wave_with_batch() {
        assert_eq!(EvolvedReference.decide(state(0, 0, 10)).new_threads, 5);
        assert_eq!(EvolvedReference.decide(state(0, 1, 10)).new_threads, 5);
        assert_eq!(EvolvedReference.decide(state(1, 1, 10)).new_threads, 0);
        assert_eq!(EvolvedReference.decide(state(1, 0, 10)).new_threads, 5);
        assert_eq!(EvolvedReference.decide(state(0, 0, 5)).new_threads, 3);
        assert_eq!(EvolvedReference.decide(state(0, 0, 20)).new_threads, 10);
        // The reinforcement wave never overruns the batch cap.
        assert_eq!(EvolvedReference.decide(state(0, 1, 3)).new_threads, 2);
        let d = EvolvedReference.decide(state(0, 1, 20));
        assert_eq!(d.new_threads, 10);
        assert_eq!(d.validate(state(0, 1, 20)), Validity::Valid);
    }

    #[test]
    fn evolved_reference_valid_everywhere() {
        for s in StrategyState::enumerate(2, 2..=20) {
            let d = EvolvedReference.decide(s);
            assert_eq!(d.validate(s), Validity::Valid, "state {s:?}");
        }
    }

    #[test]
    fn validity_order_negative_first() {
        // A negative count in a full batch reports NegativeCount, not
        // BatchExceeded or NoProgress.
        let d = Decision { new_threads: -1 };
        assert_eq!(
            d.validate(state(0, 0, 5)),
            Validity::Invalid(InvalidReason::NegativeCount)
        );
    }

    #[test]
    fn validity_batch_exceeded() {
        let d = Decision { new_threads: 3 };
        assert_eq!(
            d.validate(state(0, 3, 5)),
            Validity::Invalid(InvalidReason::BatchExceeded)
        );
        assert_eq!(d.validate(state(0, 2, 5)), Validity::Valid);
    }

    #[test]
    fn validity_no_progress() {
        let d = Decision { new_threads: 0 };
        assert_eq!(
            d.validate(state(0, 0, 5)),
            Validity::Invalid(InvalidReason::NoProgress)
        );
        assert_eq!(d.validate(state(0, 1, 5)), Validity::Valid);
    }

    #[test]
    fn validity_overflow_safe() {
        let d = Decision {
            new_threads: i64::MAX,
        };
        assert_eq!(
            d.validate(state(0, 1, 5)),
            Validity::Invalid(InvalidReason::BatchExceeded)
        );
    }

    #[test]
    fn enumerate_counts() {
        // required = 2, batches 2..=20: sum over b of 2 * (b + 1) states.
        let states = StrategyState::enumerate(2, 2..=20);
        let expected: usize = (2..=20).map(|b| 2 * (b as usize + 1)).sum();
        assert_eq!(states.len(), expected);
        assert_eq!(states.len(), 456);
    }

    #[test]
    fn baselines_always_valid() {
        // All three built-in strategies are valid over the whole domain.
        for s in StrategyState::enumerate(2, 2..=20) {
            for strat in [
                &EditorA as &dyn Strategy,
                &EditorB as &dyn Strategy,
                &EvolvedReference as &dyn Strategy,
            ] {
                assert_eq!(
                    strat.decide(s).validate(s),
                    Validity::Valid,
                    "invalid at {s:?}"
                );
            }
        }
    }
}
