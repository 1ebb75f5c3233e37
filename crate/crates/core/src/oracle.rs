//! Fixed forecasting oracle.
//!
//! A closed-form classifier mapping the most recent observation window to a
//! terminal-event probability through a logistic link over an
//! importance-weighted sum. It is the reward-defining component: the
//! per-channel predictive gain compares revealing one candidate measurement
//! against revealing nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output link. The two-class softmax over `(z, 0)` reduces to the logistic
/// function, which is the only nondegenerate reading of a scalar softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Per-channel importance weights. The default makes F3 the most
    /// important feature; the literal reversed vector is also runnable.
    pub importance: Vec<f64>,
    /// Number of most-recent timepoints the oracle consumes.
    pub window_len: usize,
    pub link: Link,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            importance: vec![1.0, 2.0, 4.0, 0.0, 0.0, 0.0],
            window_len: 5,
            link: Link::Sigmoid,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self, n_channels: usize) -> Result<()> {
        if self.importance.len() != n_channels {
            return Err(Error::Config(format!(
                "importance vector length {} does not match {} channels",
                self.importance.len(),
                n_channels
            )));
        }
        if self.window_len == 0 {
            return Err(Error::Config("window_len must be >= 1".into()));
        }
        if self.importance.iter().any(|f| !f.is_finite()) {
            return Err(Error::Config("importance weights must be finite".into()));
        }
        Ok(())
    }
}

/// Fixed-shape observation buffer: `window_len` rows of `K` channels,
/// oldest row first, zeros where nothing was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Window {
    pub fn zeroed(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Config(format!(
                "window data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.data[t * self.cols + k]
    }

    pub fn set(&mut self, t: usize, k: usize, v: f64) {
        self.data[t * self.cols + k] = v;
    }

    /// Drops the oldest row and appends `row` as the newest.
    pub fn shift_push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.cols);
        self.data.copy_within(self.cols.., 0);
        let start = (self.rows - 1) * self.cols;
        self.data[start..].copy_from_slice(row);
    }

    /// The window as it looks one step later with the newest slot still
    /// pending: rows shifted up, last row zeroed.
    pub fn shifted_pending(&self) -> Window {
        let mut w = self.clone();
        w.data.copy_within(self.cols.., 0);
        let start = (self.rows - 1) * self.cols;
        w.data[start..].fill(0.0);
        w
    }

    /// Flattened row-major view, oldest row first.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Validated oracle; stateless and freely shareable.
#[derive(Debug, Clone)]
pub struct Oracle {
    cfg: OracleConfig,
}

impl Oracle {
    pub fn new(cfg: OracleConfig, n_channels: usize) -> Result<Self> {
        cfg.validate(n_channels)?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    pub fn window_len(&self) -> usize {
        self.cfg.window_len
    }

    pub fn n_channels(&self) -> usize {
        self.cfg.importance.len()
    }

    /// Terminal-event probability of an observation window: the logistic
    /// link applied to the importance-weighted sum of all entries.
    pub fn predict(&self, win: &Window) -> Result<f64> {
        if win.rows() != self.cfg.window_len || win.cols() != self.cfg.importance.len() {
            return Err(Error::Config(format!(
                "window shape {}x{} does not match oracle {}x{}",
                win.rows(),
                win.cols(),
                self.cfg.window_len,
                self.cfg.importance.len()
            )));
        }
        let mut z = 0.0;
        for t in 0..win.rows() {
            for (k, f) in self.cfg.importance.iter().enumerate() {
                z += win.get(t, k) * f;
            }
        }
        Ok(sigmoid(z))
    }

    /// Gain in predicted probability from revealing channel `channel` of the
    /// candidate row versus revealing nothing, on top of the shared history.
    ///
    /// `pending` is the agent's window shifted by one step with the newest
    /// row still all zeros. May be negative.
    pub fn predictive_gain(
        &self,
        pending: &Window,
        candidate_row: &[f64],
        channel: usize,
    ) -> Result<f64> {
        if channel >= self.cfg.importance.len() {
            return Err(Error::Argument(format!(
                "channel {channel} out of range for {} channels",
                self.cfg.importance.len()
            )));
        }
        if candidate_row.len() != self.cfg.importance.len() {
            return Err(Error::Argument(format!(
                "candidate row length {} does not match {} channels",
                candidate_row.len(),
                self.cfg.importance.len()
            )));
        }
        debug_assert!(
            (0..pending.cols()).all(|k| pending.get(pending.rows() - 1, k) == 0.0),
            "pending window must have an all-zero newest row"
        );
        let base = self.predict(pending)?;
        let mut with_channel = pending.clone();
        with_channel.set(pending.rows() - 1, channel, candidate_row[channel]);
        Ok(self.predict(&with_channel)? - base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle() -> Oracle {
        Oracle::new(OracleConfig::default(), 6).unwrap()
    }

    /// Independent scalar route used as the reference for `predict`.
    fn reference_predict(win: &Window, importance: &[f64]) -> f64 {
        let mut z = 0.0;
        for (k, f) in importance.iter().enumerate() {
            for t in 0..win.rows() {
                z += f * win.get(t, k);
            }
        }
        1.0 / (1.0 + (-z).exp())
    }

    #[test]
    fn all_zero_window_predicts_one_half() {
        let o = oracle();
        let w = Window::zeroed(5, 6);
        assert_eq!(o.predict(&w).unwrap(), 0.5);
    }

    #[test]
    fn saturated_informative_window_is_near_certain() {
        let o = oracle();
        let mut w = Window::zeroed(5, 6);
        for t in 0..5 {
            for k in 0..3 {
                w.set(t, k, 1.0);
            }
        }
        // z = 5 * (1 + 2 + 4) = 35
        let p = o.predict(&w).unwrap();
        assert!(p > 0.999, "p = {p}");
        assert!((p - sigmoid(35.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_channels_never_move_the_output() {
        let o = oracle();
        let mut w = Window::zeroed(5, 6);
        w.set(2, 1, 0.7);
        let before = o.predict(&w).unwrap();
        for k in 3..6 {
            for v in [-100.0, -1.0, 3.5, 1e9] {
                let mut perturbed = w.clone();
                perturbed.set(4, k, v);
                let after = o.predict(&perturbed).unwrap();
                assert_eq!(before.to_bits(), after.to_bits(), "channel {k}, value {v}");
            }
        }
    }

    #[test]
    fn gain_of_zero_candidate_row_is_exactly_zero() {
        let o = oracle();
        let mut pending = Window::zeroed(5, 6);
        pending.set(0, 2, 1.0);
        let row = vec![0.0; 6];
        for k in 0..6 {
            assert_eq!(o.predictive_gain(&pending, &row, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn gain_on_zero_weight_channel_is_exactly_zero() {
        let o = oracle();
        let pending = Window::zeroed(5, 6);
        let row = vec![0.0, 0.0, 0.0, 5.0, -3.0, 100.0];
        for k in 3..6 {
            assert_eq!(o.predictive_gain(&pending, &row, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn gain_matches_hand_evaluated_logits() {
        // Empty history, candidate channel F3 (weight 4) at value 1:
        // sigma(4) - sigma(0) = 0.48201379...
        let o = oracle();
        let pending = Window::zeroed(5, 6);
        let row = vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let g = o.predictive_gain(&pending, &row, 2).unwrap();
        let expected = 1.0 / (1.0 + (-4.0f64).exp()) - 0.5;
        assert!((g - expected).abs() < 1e-15, "gain {g} vs {expected}");
        assert!((g - 0.48201).abs() < 1e-5);
    }

    #[test]
    fn predict_rejects_shape_mismatch_and_gain_rejects_bad_channel() {
        let o = oracle();
        assert!(o.predict(&Window::zeroed(4, 6)).is_err());
        assert!(o.predict(&Window::zeroed(5, 5)).is_err());
        let pending = Window::zeroed(5, 6);
        assert!(o.predictive_gain(&pending, &vec![0.0; 6], 6).is_err());
        assert!(o.predictive_gain(&pending, &vec![0.0; 4], 0).is_err());
        assert!(Oracle::new(OracleConfig::default(), 7).is_err());
    }

    proptest! {
        #[test]
        fn predict_matches_independent_scalar_route(
            entries in proptest::collection::vec(-3.0f64..3.0, 30)
        ) {
            let o = oracle();
            let w = Window::from_rows(5, 6, entries).unwrap();
            let p = o.predict(&w).unwrap();
            let r = reference_predict(&w, &o.config().importance);
            prop_assert!((p - r).abs() < 1e-12);
        }

        #[test]
        fn negating_the_window_reflects_the_probability(
            entries in proptest::collection::vec(-3.0f64..3.0, 30)
        ) {
            let o = oracle();
            let w = Window::from_rows(5, 6, entries.clone()).unwrap();
            let neg = Window::from_rows(5, 6, entries.iter().map(|v| -v).collect()).unwrap();
            let p = o.predict(&w).unwrap();
            let q = o.predict(&neg).unwrap();
            prop_assert!((p + q - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gain_depends_only_on_own_channel(
            history in proptest::collection::vec(-2.0f64..2.0, 24),
            v in -2.0f64..2.0,
            other in -2.0f64..2.0,
        ) {
            let o = oracle();
            let mut pending = Window::zeroed(5, 6);
            for (i, h) in history.iter().enumerate() {
                pending.set(i / 6, i % 6, *h);
            }
            let mut row_a = vec![0.0; 6];
            row_a[2] = v;
            let mut row_b = row_a.clone();
            row_b[0] = other;
            let ga = o.predictive_gain(&pending, &row_a, 2).unwrap();
            let gb = o.predictive_gain(&pending, &row_b, 2).unwrap();
            prop_assert_eq!(ga.to_bits(), gb.to_bits());
        }
    }
}
