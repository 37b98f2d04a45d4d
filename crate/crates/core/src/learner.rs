//! L2-regularized logistic regression trained by plain SGD.
//!
//! Minimizes `½‖w‖² + C Σ log(1 + exp(-y (w·x + bias)))`. The bias is handled
//! as the weight of an extra constant feature and is regularized with the
//! rest. Steps are `1/(λt)` with `λ = 1/(Cn)`.

use std::io::{Read, Write};

use crate::codec;
use crate::encoding::ExpandedVector;
use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, SeededRng};

const MAGIC: &[u8; 4] = b"OPHM";
const VERSION: u8 = 1;

/// Sketch and expansion settings needed to featurize new inputs the same way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pipeline {
    pub k: u32,
    pub b: u8,
    /// Fixed-length permutation dimension.
    pub d_eff: u64,
    pub sketch_seed: u64,
    pub random_coding: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub epochs: u32,
    pub seed: u64,
    /// How raw inputs were sketched and expanded for training, if they were.
    pub pipeline: Option<Pipeline>,
    /// Full objective before training and after every epoch.
    pub history: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
            c: 1.0,
            epochs: 0,
            seed: 0,
            pipeline: None,
            history: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Weights followed by the bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        codec::put_u8(w, VERSION)?;
        codec::put_u64(w, self.weights.len() as u64)?;
        codec::put_f64(w, self.c)?;
        codec::put_u32(w, self.epochs)?;
        codec::put_u64(w, self.seed)?;
        match &self.pipeline {
            None => codec::put_u8(w, 0)?,
            Some(p) => {
                codec::put_u8(w, 1)?;
                codec::put_u32(w, p.k)?;
                codec::put_u8(w, p.b)?;
                codec::put_u64(w, p.d_eff)?;
                codec::put_u64(w, p.sketch_seed)?;
                codec::put_u8(w, p.random_coding as u8)?;
            }
        }
        codec::put_f64(w, self.bias)?;
        for &x in &self.weights {
            codec::put_f64(w, x)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::expect_magic(r, MAGIC)?;
        let version = codec::get_u8(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported model version {version}")));
        }
        let dim = codec::checked_len(codec::get_u64(r)?, 1 << 34, "weight")?;
        let c = codec::get_f64(r)?;
        let epochs = codec::get_u32(r)?;
        let seed = codec::get_u64(r)?;
        let pipeline = match codec::get_u8(r)? {
            0 => None,
            1 => Some(Pipeline {
                k: codec::get_u32(r)?,
                b: codec::get_u8(r)?,
                d_eff: codec::get_u64(r)?,
                sketch_seed: codec::get_u64(r)?,
                random_coding: codec::get_u8(r)? != 0,
            }),
            other => return Err(Error::Format(format!("bad pipeline flag {other}"))),
        };
        let bias = codec::get_f64(r)?;
        let weights = (0..dim).map(|_| codec::get_f64(r)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            weights,
            bias,
            c,
            epochs,
            seed,
            pipeline,
            history: Vec::new(),
        })
    }
}

/// `log(1 + e^{-z})` without overflow.
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `d/dz log(1 + e^{-z}) = -1/(1 + e^z)`.
fn dloss(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        -e / (1.0 + e)
    } else {
        -1.0 / (1.0 + z.exp())
    }
}

fn dot(params: &[f64], v: &ExpandedVector) -> f64 {
    let s: f64 = v.positions().iter().map(|&p| params[p as usize]).sum();
    s * v.weight() + params[params.len() - 1]
}

fn check_data(data: &[ExpandedVector], labels: &[f64]) -> Result<usize> {
    if data.is_empty() {
        return Err(invalid("training set is empty"));
    }
    if data.len() != labels.len() {
        return Err(invalid(format!("{} vectors but {} labels", data.len(), labels.len())));
    }
    if let Some(y) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(invalid(format!("labels must be +1 or -1, got {y}")));
    }
    let dim = data[0].dim();
    if let Some(v) = data.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: v.dim(),
        });
    }
    usize::try_from(dim).map_err(|_| invalid("dimension too large"))
}

/// Full objective at `params` (weights then bias).
pub fn objective(params: &[f64], data: &[ExpandedVector], labels: &[f64], c: f64) -> f64 {
    let reg: f64 = params.iter().map(|w| w * w).sum::<f64>() / 2.0;
    let loss: f64 = data
        .iter()
        .zip(labels)
        .map(|(v, &y)| softplus_neg(y * dot(params, v)))
        .sum();
    reg + c * loss
}

/// Gradient of [`objective`].
pub fn gradient(params: &[f64], data: &[ExpandedVector], labels: &[f64], c: f64) -> Vec<f64> {
    let mut g = params.to_vec();
    let last = g.len() - 1;
    for (v, &y) in data.iter().zip(labels) {
        let coef = c * y * dloss(y * dot(params, v));
        for &p in v.positions() {
            g[p as usize] += coef * v.weight();
        }
        g[last] += coef;
    }
    g
}

pub fn train_logreg(data: &[ExpandedVector], labels: &[f64], c: f64, epochs: u32, seed: u64) -> Result<LinearModel> {
    let dim = check_data(data, labels)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("C must be positive"));
    }
    let n = data.len();
    let lambda = 1.0 / (c * n as f64);
    // params = scale · v, so the shrink step is O(1)
    let mut v = vec![0.0; dim + 1];
    let mut scale = 1.0;
    let mut history = vec![objective(&v, data, labels, c)];
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    for epoch in 0..epochs {
        SeededRng::new(derive_seed(seed, &[epoch as u64])).shuffle(&mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &data[i];
            let y = labels[i];
            let z = y * scale * (x.positions().iter().map(|&p| v[p as usize]).sum::<f64>() * x.weight() + v[dim]);
            let shrink = 1.0 - eta * lambda;
            if shrink <= 0.0 {
                v.iter_mut().for_each(|w| *w = 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            let step = -eta * y * dloss(z) / scale;
            for &p in x.positions() {
                v[p as usize] += step * x.weight();
            }
            v[dim] += step;
            if scale < 1e-100 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        let params: Vec<f64> = v.iter().map(|w| w * scale).collect();
        history.push(objective(&params, data, labels, c));
    }
    let mut weights: Vec<f64> = v.iter().map(|w| w * scale).collect();
    let bias = weights.pop().unwrap();
    Ok(LinearModel {
        weights,
        bias,
        c,
        epochs,
        seed,
        pipeline: None,
        history,
    })
}

/// `(label, margin)` with `margin = w·x + bias`; ties go to `+1`.
pub fn predict(m: &LinearModel, v: &ExpandedVector) -> Result<(f64, f64)> {
    if v.dim() != m.weights.len() as u64 {
        return Err(Error::DimensionMismatch {
            left: m.weights.len() as u64,
            right: v.dim(),
        });
    }
    let s: f64 = v.positions().iter().map(|&p| m.weights[p as usize]).sum();
    let margin = s * v.weight() + m.bias;
    Ok((if margin >= 0.0 { 1.0 } else { -1.0 }, margin))
}

/// Fraction of `data` whose predicted label equals the given one.
pub fn accuracy(m: &LinearModel, data: &[ExpandedVector], labels: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(invalid("no data"));
    }
    let mut hits = 0usize;
    for (v, &y) in data.iter().zip(labels) {
        if predict(m, v)?.0 == y {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}
