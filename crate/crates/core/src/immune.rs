//! Immune activation kinetics: five-compartment delay differential system for
//! immature/mature APCs (A0, A1), memory CTLs (C0), effector CTLs in the lymph
//! node (C1) and CTLs circulating around the lesion (C2).
//!
//! Integration is a fixed-step explicit Heun scheme (method of steps). Delayed
//! terms are read from a [`HistoryBuffer`] by linear interpolation; before the
//! first sample the history is the constant initial state.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Components below this are treated as round-off and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImmuneParams {
    /// Supply rate of immature APCs, k/mm³/day.
    #[serde(rename = "s_A")]
    pub s_a: f64,
    /// Turnover of immature APCs, 1/day.
    #[serde(rename = "d_0")]
    pub d0: f64,
    /// Turnover of mature APCs, 1/day.
    #[serde(rename = "d_1")]
    pub d1: f64,
    /// Memory CTL carrying capacity, k/mm³.
    #[serde(rename = "K")]
    pub k: f64,
    /// Logistic growth rate of memory CTLs, 1/day.
    #[serde(rename = "r_C")]
    pub r_c: f64,
    /// Minimal number of CTL divisions.
    pub m: u32,
    /// Effector CTL death rate, 1/day.
    #[serde(rename = "delta_1")]
    pub delta1: f64,
    /// Mass-action coefficient, (k/mm³)⁻¹/day.
    pub mu: f64,
    /// Duration of one CTL division, days.
    pub rho: f64,
    /// Duration of the division programme, days.
    pub sigma: f64,
    /// Tumour antigenicity, (k/mm³)⁻¹/day.
    pub alpha: f64,
    /// Efflux of effector CTLs from the lymph node, 1/day.
    pub f: f64,
    #[serde(rename = "V_ratio")]
    pub v_ratio: f64,
    /// Initial immature APC concentration, k/mm³.
    #[serde(rename = "A_0_init")]
    pub a0_init: f64,
}

impl Default for ImmuneParams {
    fn default() -> Self {
        let m = 10;
        let rho = 8.0 / 24.0;
        let a0_init = 0.01;
        let d0 = 0.03;
        Self {
            s_a: a0_init * d0,
            d0,
            d1: 0.8,
            k: 0.02 * 200.0,
            r_c: std::f64::consts::LN_2,
            m,
            delta1: 0.4,
            mu: 20.0,
            rho,
            sigma: 1.0 + f64::from(m - 1) * rho,
            alpha: 1e-9,
            f: 0.7,
            v_ratio: 1000.0,
            a0_init,
        }
    }
}

impl ImmuneParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("s_A", self.s_a),
            ("d_0", self.d0),
            ("d_1", self.d1),
            ("K", self.k),
            ("r_C", self.r_c),
            ("delta_1", self.delta1),
            ("mu", self.mu),
            ("rho", self.rho),
            ("sigma", self.sigma),
            ("alpha", self.alpha),
            ("f", self.f),
            ("V_ratio", self.v_ratio),
            ("A_0_init", self.a0_init),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.m < 1 {
            return Err(Error::config("m must be >= 1"));
        }
        if self.sigma < self.rho {
            return Err(Error::config(format!(
                "sigma ({}) must be >= rho ({})",
                self.sigma, self.rho
            )));
        }
        Ok(())
    }

    /// The fully rested state: no tumour, APCs at supply equilibrium and
    /// memory CTLs at carrying capacity.
    pub fn rest_state(&self) -> ImmuneState {
        ImmuneState { a0: self.s_a / self.d0, a1: 0.0, c0: self.k, c1: 0.0, c2: 0.0 }
    }

    pub fn initial_state(&self) -> ImmuneState {
        ImmuneState { a0: self.a0_init, ..self.rest_state() }
    }

    /// Longest delay that must be covered by the history buffer.
    pub fn max_delay(&self) -> f64 {
        self.sigma.max(self.rho)
    }
}

/// Concentrations in k/mm³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImmuneState {
    pub a0: f64,
    pub a1: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ImmuneState {
    pub fn as_array(&self) -> [f64; 5] {
        [self.a0, self.a1, self.c0, self.c1, self.c2]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self { a0: a[0], a1: a[1], c0: a[2], c1: a[3], c2: a[4] }
    }

    fn axpy(&self, h: f64, d: &ImmuneState) -> ImmuneState {
        ImmuneState {
            a0: self.a0 + h * d.a0,
            a1: self.a1 + h * d.a1,
            c0: self.c0 + h * d.c0,
            c1: self.c1 + h * d.c1,
            c2: self.c2 + h * d.c2,
        }
    }

    pub fn max_abs_diff(&self, o: &ImmuneState) -> f64 {
        self.as_array()
            .iter()
            .zip(o.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Time derivatives of the five compartments, per day.
pub type ImmuneDerivative = ImmuneState;

/// Delayed values needed by the effector equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delayed {
    /// (A1, C0) at t − σ.
    pub sigma: (f64, f64),
    /// (A1, C1) at t − ρ.
    pub rho: (f64, f64),
}

impl Delayed {
    /// Delayed values equal to the current state (used for steady states).
    pub fn from_current(s: &ImmuneState) -> Self {
        Self { sigma: (s.a1, s.c0), rho: (s.a1, s.c1) }
    }
}

/// Right-hand side of the delay system. `tumour` is the cancer burden as a
/// concentration in k/mm³.
pub fn rhs(
    s: &ImmuneState,
    delayed: &Delayed,
    tumour: f64,
    p: &ImmuneParams,
) -> Result<ImmuneDerivative> {
    let inputs = [
        s.a0,
        s.a1,
        s.c0,
        s.c1,
        s.c2,
        delayed.sigma.0,
        delayed.sigma.1,
        delayed.rho.0,
        delayed.rho.1,
        tumour,
    ];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Instability {
            t_days: f64::NAN,
            detail: format!("non-finite input to immune kinetics: {inputs:?}"),
        });
    }
    let (a1_sig, c0_sig) = delayed.sigma;
    let (a1_rho, c1_rho) = delayed.rho;
    let amplification = 2f64.powi(p.m as i32);
    Ok(ImmuneState {
        a0: p.s_a - p.d0 * s.a0 - p.alpha * tumour * s.a0,
        a1: p.v_ratio * p.alpha * tumour * s.a0 - p.d1 * s.a1,
        c0: p.r_c * (1.0 - s.c0 / p.k) * s.c0 - p.mu * s.a1 * s.c0,
        c1: amplification * p.mu * a1_sig * c0_sig - p.mu * s.a1 * s.c1
            + 2.0 * p.mu * a1_rho * c1_rho
            - p.delta1 * s.c1
            - p.f * s.c1,
        c2: p.f * s.c1 / p.v_ratio - p.delta1 * s.c2,
    })
}

/// Past samples of the immune state, strictly increasing in time.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    samples: VecDeque<(f64, ImmuneState)>,
    /// Value returned for queries before the first sample.
    prehistory: ImmuneState,
    t0: f64,
    /// Minimum span of time kept behind the newest sample.
    span: f64,
}

impl HistoryBuffer {
    pub fn new(t0: f64, initial: ImmuneState, span: f64) -> Self {
        let mut samples = VecDeque::new();
        samples.push_back((t0, initial));
        Self { samples, prehistory: initial, t0, span }
    }

    pub fn latest(&self) -> (f64, ImmuneState) {
        *self.samples.back().expect("history buffer is never empty")
    }

    pub fn earliest_time(&self) -> f64 {
        self.samples.front().expect("history buffer is never empty").0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends a sample; `t` must exceed the newest stored time. Samples older
    /// than the retained span are dropped, but the first sample is kept as long
    /// as it is still needed to cover the span.
    pub fn push(&mut self, t: f64, state: ImmuneState) -> Result<()> {
        let (t_last, _) = self.latest();
        if t.partial_cmp(&t_last) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Instability {
                t_days: t,
                detail: format!("history sample at {t} not after {t_last}"),
            });
        }
        self.samples.push_back((t, state));
        let horizon = t - self.span;
        while self.samples.len() > 2 && self.samples[1].0 <= horizon {
            self.samples.pop_front();
        }
        Ok(())
    }

    /// Linear interpolation between stored samples. Exact at sample times;
    /// queries before the buffer return the constant pre-history, queries after
    /// the newest sample return the newest sample.
    pub fn at(&self, t: f64) -> ImmuneState {
        let first = self.samples.front().expect("non-empty");
        if t < first.0 {
            // trimmed region: nearest retained sample
            return if t < self.t0 { self.prehistory } else { first.1 };
        }
        let (t_last, last) = self.latest();
        if t >= t_last {
            return last;
        }
        let idx = self.samples.partition_point(|(ts, _)| *ts <= t);
        let (ta, a) = self.samples[idx - 1];
        if ta == t {
            return a;
        }
        let (tb, b) = self.samples[idx];
        let w = (t - ta) / (tb - ta);
        let lerp = |x: f64, y: f64| x + w * (y - x);
        ImmuneState {
            a0: lerp(a.a0, b.a0),
            a1: lerp(a.a1, b.a1),
            c0: lerp(a.c0, b.c0),
            c1: lerp(a.c1, b.c1),
            c2: lerp(a.c2, b.c2),
        }
    }

    fn delayed_at(&self, t: f64, p: &ImmuneParams) -> Delayed {
        let s_sig = self.at(t - p.sigma);
        let s_rho = self.at(t - p.rho);
        Delayed { sigma: (s_sig.a1, s_sig.c0), rho: (s_rho.a1, s_rho.c1) }
    }
}

/// Fixed-step Heun integrator for the delay system.
#[derive(Debug, Clone)]
pub struct ImmuneIntegrator {
    params: ImmuneParams,
    dt: f64,
    buffer: HistoryBuffer,
}

impl ImmuneIntegrator {
    /// `dt` in days; must not exceed ρ so delayed lookups never fall inside
    /// the step being taken.
    pub fn new(params: ImmuneParams, initial: ImmuneState, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("immune step must be > 0, got {dt}")));
        }
        if dt > params.rho {
            return Err(Error::config(format!(
                "immune step {dt} exceeds the shortest delay rho = {}",
                params.rho
            )));
        }
        let span = params.max_delay() + 2.0 * dt;
        Ok(Self { buffer: HistoryBuffer::new(0.0, initial, span), params, dt })
    }

    pub fn params(&self) -> &ImmuneParams {
        &self.params
    }

    /// Adjusts antigenicity mid-run (radiotherapy option).
    pub fn scale_alpha(&mut self, factor: f64) {
        self.params.alpha *= factor;
    }

    pub fn time(&self) -> f64 {
        self.buffer.latest().0
    }

    pub fn state(&self) -> ImmuneState {
        self.buffer.latest().1
    }

    pub fn history(&self) -> &HistoryBuffer {
        &self.buffer
    }

    /// Advances one step with the tumour burden held at `tumour` (k/mm³).
    pub fn step(&mut self, tumour: f64) -> Result<ImmuneState> {
        let (t, y) = self.buffer.latest();
        let dt = self.dt;
        let p = &self.params;
        let stamp = |e: Error| match e {
            Error::Instability { detail, .. } => Error::Instability { t_days: t, detail },
            other => other,
        };

        let k1 = rhs(&y, &self.buffer.delayed_at(t, p), tumour, p).map_err(stamp)?;
        let pred = y.axpy(dt, &k1);
        let k2 = rhs(&pred, &self.buffer.delayed_at(t + dt, p), tumour, p).map_err(stamp)?;
        let mut next = y.axpy(0.5 * dt, &k1).axpy(0.5 * dt, &k2);

        let mut comps = next.as_array();
        for (name, v) in ["A0", "A1", "C0", "C1", "C2"].iter().zip(comps.iter_mut()) {
            if !v.is_finite() || *v < -NEGATIVE_CLAMP {
                return Err(Error::Instability {
                    t_days: t + dt,
                    detail: format!("{name} = {v}"),
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        next = ImmuneState::from_array(comps);
        self.buffer.push(t + dt, next)?;
        Ok(next)
    }

    /// Value of the stored trajectory at `t` (see [`HistoryBuffer::at`]).
    pub fn history_at(&self, t: f64) -> ImmuneState {
        self.buffer.at(t)
    }
}
