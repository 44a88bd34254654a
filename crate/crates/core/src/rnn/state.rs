use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Activation, Result, RnnConfig, RnnError};

/// `[s(k-1) .. s(k-p), 1, y_1(k-1) .. y_N(k-1)]`.
pub fn build_input(cfg: &RnnConfig, s_history: &[f64], y_prev: &[f64]) -> Result<Vec<f64>> {
    if s_history.len() != cfg.inputs || y_prev.len() != cfg.neurons {
        return Err(RnnError::LengthMismatch(format!(
            "expected {} inputs and {} feedbacks, got {} and {}",
            cfg.inputs,
            cfg.neurons,
            s_history.len(),
            y_prev.len()
        )));
    }
    let mut u = Vec::with_capacity(cfg.width());
    u.extend_from_slice(s_history);
    u.push(1.0);
    u.extend_from_slice(y_prev);
    Ok(u)
}

/// Weights, sensitivities and feedback buffer of one network.
///
/// Sensitivities `π^j_{n,l} = ∂y_j/∂w_{n,l}` are kept only for trainable
/// weights; frozen weights have zero sensitivity by definition.
#[derive(Clone, Debug, PartialEq)]
pub struct RnnState {
    cfg: RnnConfig,
    /// Row-major `N x (p + N + 1)`.
    w: Vec<f64>,
    mask: Option<Vec<bool>>,
    activations: Vec<Activation>,
    /// Flat weight index of each trainable weight, grouped by neuron.
    trainable: Vec<usize>,
    /// `own[n]` is the range of `trainable` belonging to neuron `n`.
    own: Vec<std::ops::Range<usize>>,
    /// Feedback edges into each neuron: `(source neuron, weight index)`.
    feedback: Vec<Vec<(usize, usize)>>,
    y_prev: Vec<f64>,
    v: Vec<f64>,
    pi: Vec<f64>,
    pi_next: Vec<f64>,
    step: u64,
}

impl RnnState {
    /// Fully connected network, weights uniform in `±0.5/√(p+N+1)`.
    pub fn new(cfg: &RnnConfig, seed: u64) -> Result<Self> {
        Self::masked(cfg, None, vec![cfg.activation_fn(); cfg.neurons], seed)
    }

    /// Network whose weights outside `mask` stay exactly zero forever.
    pub fn masked(
        cfg: &RnnConfig,
        mask: Option<Vec<bool>>,
        activations: Vec<Activation>,
        seed: u64,
    ) -> Result<Self> {
        let mut state = Self::from_weights(cfg, vec![0.0; cfg.neurons * cfg.width()], mask, activations)?;
        let scale = 0.5 / (cfg.width() as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &i in &state.trainable {
            state.w[i] = rng.random_range(-scale..=scale);
        }
        Ok(state)
    }

    pub fn from_weights(
        cfg: &RnnConfig,
        w: Vec<f64>,
        mask: Option<Vec<bool>>,
        activations: Vec<Activation>,
    ) -> Result<Self> {
        cfg.validate()?;
        let (n, width) = (cfg.neurons, cfg.width());
        if w.len() != n * width {
            return Err(RnnError::LengthMismatch(format!(
                "{} weights for a {n}x{width} matrix",
                w.len()
            )));
        }
        if activations.len() != n {
            return Err(RnnError::LengthMismatch(format!(
                "{} activations for {n} neurons",
                activations.len()
            )));
        }
        let allowed = |i: usize| mask.as_ref().is_none_or(|m| m[i]);
        if let Some(m) = &mask {
            if m.len() != w.len() {
                return Err(RnnError::LengthMismatch(format!(
                    "mask has {} entries for {} weights",
                    m.len(),
                    w.len()
                )));
            }
            if w.iter().zip(m).any(|(w, m)| !m && *w != 0.0) {
                return Err(RnnError::BadConfig("masked weight is nonzero".into()));
            }
        }
        let mut trainable = Vec::new();
        let mut own = Vec::with_capacity(n);
        let mut feedback = Vec::with_capacity(n);
        for j in 0..n {
            let start = trainable.len();
            trainable.extend((j * width..(j + 1) * width).filter(|&i| allowed(i)));
            own.push(start..trainable.len());
            feedback.push(
                (0..n)
                    .map(|m| (m, j * width + cfg.inputs + 1 + m))
                    .filter(|&(_, i)| allowed(i))
                    .collect(),
            );
        }
        let t = trainable.len();
        Ok(Self {
            cfg: cfg.clone(),
            w,
            mask,
            activations,
            trainable,
            own,
            feedback,
            y_prev: vec![0.0; n],
            v: vec![0.0; n],
            pi: vec![0.0; n * t],
            pi_next: vec![0.0; n * t],
            step: 0,
        })
    }

    pub fn config(&self) -> &RnnConfig {
        &self.cfg
    }

    pub fn set_learning_rate(&mut self, eta: f64) {
        self.cfg.eta = eta;
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn weight(&self, neuron: usize, l: usize) -> f64 {
        self.w[neuron * self.cfg.width() + l]
    }

    /// Overwrites the weights, e.g. to restore a snapshot. Frozen entries
    /// must be zero.
    pub fn set_weights(&mut self, w: &[f64]) -> Result<()> {
        if w.len() != self.w.len() {
            return Err(RnnError::LengthMismatch("weight snapshot size".into()));
        }
        if let Some(m) = &self.mask {
            if w.iter().zip(m).any(|(w, m)| !m && *w != 0.0) {
                return Err(RnnError::BadConfig("masked weight is nonzero".into()));
            }
        }
        self.w.copy_from_slice(w);
        Ok(())
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn trainable_count(&self) -> usize {
        self.trainable.len()
    }

    pub fn y_prev(&self) -> &[f64] {
        &self.y_prev
    }

    /// Output of neuron 0 after the last step.
    pub fn output(&self) -> f64 {
        self.y_prev[0]
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// `∂y_j/∂w_{n,l}` as of the last [`advance`](Self::advance).
    pub fn sensitivity(&self, j: usize, n: usize, l: usize) -> f64 {
        let flat = n * self.cfg.width() + l;
        let range = self.own[n].clone();
        match self.trainable[range.clone()].binary_search(&flat) {
            Ok(pos) => self.pi[j * self.trainable.len() + range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Clears feedback, sensitivities and the step counter; keeps weights.
    pub fn reset(&mut self) {
        self.y_prev.fill(0.0);
        self.v.fill(0.0);
        self.pi.fill(0.0);
        self.step = 0;
    }

    /// Input vector from the external history and the stored feedback.
    pub fn input(&self, s_history: &[f64]) -> Result<Vec<f64>> {
        build_input(&self.cfg, s_history, &self.y_prev)
    }

    /// `y_i = φ_i(Σ_l w_{i,l} u_l)`. Does not touch the sensitivities.
    pub fn forward(&mut self, u: &[f64]) -> Result<&[f64]> {
        let width = self.cfg.width();
        if u.len() != width {
            return Err(RnnError::LengthMismatch(format!(
                "input of length {} for width {width}",
                u.len()
            )));
        }
        for (i, row) in self.w.chunks_exact(width).enumerate() {
            let v: f64 = row.iter().zip(u).map(|(w, u)| w * u).sum();
            let y = self.activations[i].eval(v);
            if !y.is_finite() {
                return Err(RnnError::NonFiniteActivation { step: self.step });
            }
            self.v[i] = v;
            self.y_prev[i] = y;
        }
        self.step += 1;
        Ok(&self.y_prev)
    }

    /// Forward step plus the sensitivity recurrence
    /// `π^j(k) = φ'(v_j) [δ_{jn} u_l + Σ_m w_{j,p+1+m} π^m(k-1)]`.
    /// Returns the new output `y_1`.
    pub fn advance(&mut self, u: &[f64]) -> Result<f64> {
        self.forward(u)?;
        let t = self.trainable.len();
        let width = self.cfg.width();
        for j in 0..self.cfg.neurons {
            let row = &mut self.pi_next[j * t..(j + 1) * t];
            row.fill(0.0);
            for &(m, wi) in &self.feedback[j] {
                let w = self.w[wi];
                if w != 0.0 {
                    let src = &self.pi[m * t..(m + 1) * t];
                    for (r, s) in row.iter_mut().zip(src) {
                        *r += w * s;
                    }
                }
            }
            for pos in self.own[j].clone() {
                row[pos] += u[self.trainable[pos] - j * width];
            }
            let d = self.activations[j].derivative(self.v[j], self.y_prev[j]);
            row.iter_mut().for_each(|r| *r *= d);
        }
        std::mem::swap(&mut self.pi, &mut self.pi_next);
        Ok(self.y_prev[0])
    }

    /// One RTRL step: advance, then `Δw = η e π^1` with `e = teach - y_1`.
    pub fn rtrl_step(&mut self, u: &[f64], teach: f64) -> Result<f64> {
        let y = self.advance(u)?;
        let e = teach - y;
        self.apply_update(e);
        Ok(e)
    }

    fn apply_update(&mut self, e: f64) {
        let scale = self.cfg.eta * e;
        if scale == 0.0 {
            return;
        }
        let t = self.trainable.len();
        let grad = &self.pi[..t];
        let mut factor = scale;
        if let Some(clip) = self.cfg.clip {
            let biggest = grad.iter().fold(0.0f64, |a, g| a.max((scale * g).abs()));
            if biggest > clip {
                factor *= clip / biggest;
            }
        }
        for (&i, g) in self.trainable.iter().zip(grad) {
            self.w[i] += factor * g;
        }
    }

    /// One pass over a sequence. The first `warmup` steps only advance the
    /// state; the rest learn. Returns the mean squared error of the learning
    /// steps (0 when there are none).
    pub fn train_epoch(&mut self, externals: &[Vec<f64>], teach: &[f64], warmup: usize) -> Result<f64> {
        if externals.len() != teach.len() {
            return Err(RnnError::LengthMismatch(format!(
                "{} inputs vs {} targets",
                externals.len(),
                teach.len()
            )));
        }
        let mut sse = 0.0;
        let mut count = 0usize;
        for (k, (s, &target)) in externals.iter().zip(teach).enumerate() {
            let u = self.input(s)?;
            if k < warmup {
                self.advance(&u)?;
            } else {
                let e = self.rtrl_step(&u, target)?;
                sse += e * e;
                count += 1;
            }
        }
        Ok(if count == 0 { 0.0 } else { sse / count as f64 })
    }

    /// Runs the network forward over `externals`, returning `y_1` per step.
    pub fn run(&mut self, externals: &[Vec<f64>]) -> Result<Vec<f64>> {
        externals
            .iter()
            .map(|s| {
                let u = self.input(s)?;
                Ok(self.forward(&u)?[0])
            })
            .collect()
    }
}

/// Trains a fresh fully connected network for `epochs` passes; feedback and
/// sensitivities restart at every epoch. Same seed, same result.
pub fn train_series(
    cfg: &RnnConfig,
    inputs: &[Vec<f64>],
    teach: &[f64],
    epochs: usize,
    seed: u64,
) -> Result<(RnnState, Vec<f64>)> {
    if epochs == 0 {
        return Err(RnnError::BadConfig("epochs must be >= 1".into()));
    }
    let mut state = RnnState::new(cfg, seed)?;
    let mut trace = Vec::with_capacity(epochs);
    for epoch in 1..=epochs {
        state.reset();
        let mse = state.train_epoch(inputs, teach, 0)?;
        if !mse.is_finite() {
            return Err(RnnError::Diverged { epoch });
        }
        trace.push(mse);
    }
    Ok((state, trace))
}
