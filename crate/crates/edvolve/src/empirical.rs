//! Empirical review-thread model.
//!
//! A review thread is one invitation sent to a prospective reviewer. It ends
//! either with a review or without one (refusal or silence), after some number
//! of days. This module holds the empirical duration distributions for the two
//! outcome classes and samples complete thread outcomes from them.
//!
//! The bundled dataset comes from the editorial logs of the Journal of the
//! Serbian Chemical Society (JSCS): 136 threads that ended with a review and
//! 175 that ended without one. Editors of other journals can load their own
//! distributions from CSV instead.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Rng;

/// Threads that ended with a review: (days, frequency).
const JSCS_WITH_REVIEW: [(u32, u32); 44] = [
    (0, 1),
    (1, 1),
    (2, 5),
    (3, 3),
    (4, 2),
    (5, 2),
    (6, 3),
    (7, 4),
    (8, 4),
    (9, 1),
    (10, 3),
    (11, 1),
    (12, 4),
    (13, 3),
    (14, 4),
    (15, 4),
    (16, 3),
    (17, 6),
    (18, 3),
    (19, 3),
    (20, 6),
    (21, 4),
    (22, 4),
    (23, 6),
    (24, 6),
    (25, 3),
    (26, 4),
    (27, 3),
    (28, 6),
    (29, 4),
    (30, 2),
    (31, 2),
    (32, 3),
    (33, 2),
    (34, 3),
    (35, 3),
    (36, 3),
    (38, 1),
    (39, 3),
    (40, 2),
    (41, 3),
    (53, 1),
    (55, 1),
    (68, 1),
];

/// Threads that ended without a review: (days, frequency).
const JSCS_WITHOUT_REVIEW: [(u32, u32); 14] = [
    (1, 5),
    (2, 1),
    (3, 2),
    (4, 1),
    (8, 14),
    (9, 14),
    (10, 15),
    (11, 1),
    (16, 4),
    (17, 89),
    (18, 20),
    (37, 1),
    (40, 7),
    (41, 1),
];

/// Errors produced while building or parsing a duration table.
///
/// Line numbers refer to the CSV layout: the header is line 1 and data rows
/// start at line 2, also when the table is built from in-memory rows.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: malformed row: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate day {day}")]
    DuplicateDay { line: usize, day: u32 },
    #[error("line {line}: frequency must be positive")]
    NonPositiveFrequency { line: usize },
    #[error("table has no data rows")]
    Empty,
    #[error("missing or invalid header, expected `days,freq`")]
    Header,
}

/// Empirical distribution of review-process durations for one outcome class.
///
/// Entries are `(days, frequency)` pairs, strictly increasing in days, with
/// every frequency at least one. Sampling is proportional to frequency via a
/// cached cumulative table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationTable {
    entries: Vec<(u32, u32)>,
    cumulative: Vec<u64>,
    total: u64,
}

impl DurationTable {
    /// Build a table from `(days, frequency)` rows. Rows may arrive in any
    /// order; they are sorted by day.
    pub fn new(rows: &[(u32, u32)]) -> Result<Self, TableError> {
        let numbered: Vec<(u32, u32, usize)> = rows
            .iter()
            .enumerate()
            .map(|(i, &(d, f))| (d, f, i + 2))
            .collect();
        Self::build(numbered)
    }

    fn build(mut rows: Vec<(u32, u32, usize)>) -> Result<Self, TableError> {
        if rows.is_empty() {
            return Err(TableError::Empty);
        }
        for &(_, freq, line) in &rows {
            if freq == 0 {
                return Err(TableError::NonPositiveFrequency { line });
            }
        }
        // Sort by day, keeping the later line for duplicate reporting.
        rows.sort_by_key(|&(day, _, line)| (day, line));
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(TableError::DuplicateDay {
                    line: pair[1].2,
                    day: pair[1].0,
                });
            }
        }
        let entries: Vec<(u32, u32)> = rows.iter().map(|&(d, f, _)| (d, f)).collect();
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut total = 0u64;
        for &(_, freq) in &entries {
            total += u64::from(freq);
            cumulative.push(total);
        }
        Ok(Self {
            entries,
            cumulative,
            total,
        })
    }

    /// Parse the CSV table format: header `days,freq`, one row per day value.
    /// Accepts LF or CRLF line endings; blank trailing lines are ignored.
    pub fn parse_csv(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "days,freq" => {}
            _ => return Err(TableError::Header),
        }
        let mut rows = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            let mut fields = row.split(',');
            let (days_str, freq_str) = match (fields.next(), fields.next(), fields.next()) {
                (Some(d), Some(f), None) => (d.trim(), f.trim()),
                _ => {
                    return Err(TableError::Malformed {
                        line,
                        reason: "expected exactly two fields".into(),
                    })
                }
            };
            let days: u32 = days_str.parse().map_err(|_| TableError::Malformed {
                line,
                reason: format!("invalid day value `{days_str}`"),
            })?;
            let freq: i64 = freq_str.parse().map_err(|_| TableError::Malformed {
                line,
                reason: format!("invalid frequency `{freq_str}`"),
            })?;
            if freq <= 0 {
                return Err(TableError::NonPositiveFrequency { line });
            }
            let freq = u32::try_from(freq).map_err(|_| TableError::Malformed {
                line,
                reason: format!("frequency `{freq_str}` out of range"),
            })?;
            rows.push((days, freq, line));
        }
        Self::build(rows)
    }

    /// Render the table in the same CSV format `parse_csv` accepts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("days,freq\n");
        for &(days, freq) in &self.entries {
            out.push_str(&format!("{days},{freq}\n"));
        }
        out
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Sum of all frequencies.
    pub fn total_frequency(&self) -> u64 {
        self.total
    }

    /// Frequency-weighted mean duration in days.
    pub fn mean_days(&self) -> f64 {
        let weighted: u64 = self
            .entries
            .iter()
            .map(|&(d, f)| u64::from(d) * u64::from(f))
            .sum();
        weighted as f64 / self.total as f64
    }

    /// Day value at sampling rank `r`, with `r` in `[0, total_frequency)`.
    fn day_at(&self, rank: u64) -> u32 {
        debug_assert!(rank < self.total);
        let idx = self.cumulative.partition_point(|&c| c <= rank);
        self.entries[idx].0
    }
}

/// How unsuccessful threads are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Durations for both outcome classes come from the empirical tables.
    Realistic,
    /// Counterfactual in which every invitee responds immediately: threads
    /// that end without a review take zero days. The probability of getting
    /// a review is unchanged, and successful threads keep their empirical
    /// durations.
    PerfectWorld,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Realistic => f.write_str("realistic"),
            SamplingMode::PerfectWorld => f.write_str("perfect_world"),
        }
    }
}

/// Outcome of one sampled review thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledThread {
    pub has_review: bool,
    pub duration: u32,
}

/// Complete outcome model for review threads: duration distributions for both
/// outcome classes plus the sampling mode.
///
/// Immutable after construction and safe to share across concurrent
/// simulations; each simulation owns its private RNG stream.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    with_review: DurationTable,
    without_review: DurationTable,
    mode: SamplingMode,
    combined_total: u64,
}

impl OutcomeModel {
    pub fn new(
        with_review: DurationTable,
        without_review: DurationTable,
        mode: SamplingMode,
    ) -> Self {
        let combined_total = with_review.total_frequency() + without_review.total_frequency();
        Self {
            with_review,
            without_review,
            mode,
            combined_total,
        }
    }

    /// The built-in JSCS model: 44 with-review rows, 14 without-review rows,
    /// realistic mode.
    pub fn jscs() -> Self {
        let with_review = DurationTable::new(&JSCS_WITH_REVIEW).expect("builtin table is valid");
        let without_review =
            DurationTable::new(&JSCS_WITHOUT_REVIEW).expect("builtin table is valid");
        Self::new(with_review, without_review, SamplingMode::Realistic)
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn with_review(&self) -> &DurationTable {
        &self.with_review
    }

    pub fn without_review(&self) -> &DurationTable {
        &self.without_review
    }

    /// Probability that a thread ends with a review. Strictly inside (0, 1)
    /// because both tables are non-empty.
    pub fn success_probability(&self) -> f64 {
        self.with_review.total_frequency() as f64 / self.combined_total as f64
    }

    /// Sample one complete thread outcome.
    ///
    /// A single uniform draw over the combined frequency mass selects outcome
    /// class and duration jointly, so the empirical proportions are exact.
    pub fn sample(&self, rng: &mut impl Rng) -> SampledThread {
        let rank = rng.random_range(0..self.combined_total);
        let with_total = self.with_review.total_frequency();
        if rank < with_total {
            SampledThread {
                has_review: true,
                duration: self.with_review.day_at(rank),
            }
        } else {
            let duration = match self.mode {
                SamplingMode::Realistic => self.without_review.day_at(rank - with_total),
                SamplingMode::PerfectWorld => 0,
            };
            SampledThread {
                has_review: false,
                duration,
            }
        }
    }
}
