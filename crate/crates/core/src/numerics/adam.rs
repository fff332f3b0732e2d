use super::{DenseNet, NetError, ParamGradient};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Adam moment accumulators for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState {
    first_moment: ParamGradient,
    second_moment: ParamGradient,
    step: u64,
    learning_rate: f64,
}

impl OptimState {
    pub fn new(net: &DenseNet, learning_rate: f64) -> Result<Self, NetError> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(NetError::InvalidHyperparameter(format!("learning rate {learning_rate}")));
        }
        Ok(Self {
            first_moment: ParamGradient::zeros_like(net),
            second_moment: ParamGradient::zeros_like(net),
            step: 0,
            learning_rate,
        })
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
}

/// One Adam update of `net` along `-grad`.
///
/// The network is only modified when the gradient is finite; a result with
/// non-finite parameters is reported as an error.
pub fn adam_step(net: &mut DenseNet, grad: &ParamGradient, state: &mut OptimState) -> Result<(), NetError> {
    if !grad.matches(net) || !state.first_moment.matches(net) {
        return Err(NetError::Layout("gradient or optimizer state does not match network".into()));
    }
    if !grad.values().all(f64::is_finite) {
        return Err(NetError::NonFinite("gradient"));
    }
    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - ADAM_BETA1.powi(t);
    let bias2 = 1.0 - ADAM_BETA2.powi(t);
    let lr = state.learning_rate;
    for (((p, g), m), v) in net
        .params_mut()
        .zip(grad.values())
        .zip(state.first_moment.values_mut())
        .zip(state.second_moment.values_mut())
    {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
    net.ensure_finite()
}

/// Blends `source` into `target`: every parameter becomes `tau*src + (1-tau)*tgt`.
pub fn soft_update(target: &mut DenseNet, source: &DenseNet, tau: f64) -> Result<(), NetError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(NetError::InvalidHyperparameter(format!("tau {tau} outside [0, 1]")));
    }
    if !target.same_shape(source) {
        return Err(NetError::Layout("soft update between differently shaped networks".into()));
    }
    for (t, s) in target.params_mut().zip(source.params()) {
        *t = tau * s + (1.0 - tau) * *t;
    }
    Ok(())
}
