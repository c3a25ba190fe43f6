use super::{DiscountSchedule, QError};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

/// Running `sum_t gamma^t r_{t+1}` of an episode in progress.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineQ {
    gamma: f64,
    horizon: Option<usize>,
    steps: usize,
    power: f64,
    acc: Compensated,
}

impl OnlineQ {
    pub fn new(gamma: f64) -> Self {
        OnlineQ { gamma, horizon: None, steps: 0, power: 1.0, acc: Compensated::default() }
    }

    /// Refuses rewards beyond step `horizon`.
    pub fn with_horizon(gamma: f64, horizon: usize) -> Self {
        OnlineQ { horizon: Some(horizon), ..Self::new(gamma) }
    }

    /// Consumes `r_{k+1}` and returns the updated estimate.
    pub fn push(&mut self, reward: f64) -> Result<f64, QError> {
        if let Some(h) = self.horizon {
            if self.steps >= h {
                return Err(QError::RewardAfterEnd { horizon: h });
            }
        }
        self.acc.add(self.power * reward);
        self.power *= self.gamma;
        self.steps += 1;
        Ok(self.value())
    }

    pub fn value(&self) -> f64 {
        self.acc.value()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Value at step `t` recovered from the initial-pair value:
/// `(q0 - sum_{i=1}^t gamma^(i-1) r_i) / gamma^t`.
pub fn q_reconstruct(initial_value: f64, rewards: &[f64], gamma: f64, t: usize) -> Result<f64, QError> {
    if t > rewards.len() {
        return Err(QError::StepOutOfRange { t, len: rewards.len() });
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(QError::BadDiscount(gamma));
    }
    let schedule = DiscountSchedule::new(gamma, t);
    let mut prefix = Compensated::default();
    for (i, r) in rewards[..t].iter().enumerate() {
        prefix.add(schedule.power(i) * r);
    }
    let (hi, lo) = prefix.parts();
    let mut numerator = Compensated::default();
    numerator.add(initial_value);
    numerator.add(-hi);
    numerator.add(-lo);
    Ok(numerator.value() / schedule.power(t))
}
