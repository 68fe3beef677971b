use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::genome::{Activation, CnnGenome};
use crate::bcg::{SegmentTensor, CHANNELS};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ConvSpec {
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub len_in: usize,
    pub pool: usize,
    pub len_out: usize,
    pub w_off: usize,
    pub b_off: usize,
}

impl ConvSpec {
    #[inline]
    fn w_index(&self, o: usize, i: usize, j: usize) -> usize {
        self.w_off + (o * self.in_ch + i) * self.kernel + j
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DenseSpec {
    pub n_in: usize,
    pub n_out: usize,
    pub w_off: usize,
    pub b_off: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layout {
    pub convs: Vec<ConvSpec>,
    pub hidden: Vec<DenseSpec>,
    pub output: DenseSpec,
    pub n_params: usize,
}

impl Layout {
    fn new(genome: &CnnGenome, input_len: usize) -> Self {
        let mut off = 0;
        let mut convs = Vec::with_capacity(genome.n_conv_layers);
        let (mut ch, mut len) = (CHANNELS, input_len);
        for _ in 0..genome.n_conv_layers {
            let out_ch = genome.filters_per_layer;
            let w_off = off;
            off += out_ch * ch * genome.kernel_time;
            let b_off = off;
            off += out_ch;
            let len_out = len / genome.pool_time;
            convs.push(ConvSpec {
                in_ch: ch,
                out_ch,
                kernel: genome.kernel_time,
                len_in: len,
                pool: genome.pool_time,
                len_out,
                w_off,
                b_off,
            });
            ch = out_ch;
            len = len_out;
        }
        let mut n_in = ch * len;
        let dense = |n_in: usize, n_out: usize, off: &mut usize| {
            let w_off = *off;
            *off += n_in * n_out;
            let b_off = *off;
            *off += n_out;
            DenseSpec { n_in, n_out, w_off, b_off }
        };
        let mut hidden = Vec::with_capacity(genome.n_dense_layers);
        for _ in 0..genome.n_dense_layers {
            hidden.push(dense(n_in, genome.dense_units, &mut off));
            n_in = genome.dense_units;
        }
        let output = dense(n_in, 1, &mut off);
        Layout {
            convs,
            hidden,
            output,
            n_params: off,
        }
    }
}

/// A trained or freshly initialized verifier network.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel {
    genome: CnnGenome,
    w_s: usize,
    input_len: usize,
    pub(crate) params: Vec<f64>,
    pub(crate) layout: Layout,
}

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Default, Clone)]
pub(crate) struct Trace {
    /// Input to each conv layer.
    conv_in: Vec<Vec<f64>>,
    /// Pre-activations of each conv layer.
    conv_pre: Vec<Vec<f64>>,
    /// For every pooled output, the position of the max in `conv_pre`.
    pool_arg: Vec<Vec<usize>>,
    /// Input to each dense layer (hidden layers, then the output unit).
    dense_in: Vec<Vec<f64>>,
    dense_pre: Vec<Vec<f64>>,
    /// Inverted-dropout scale per hidden unit; empty at inference.
    dropout: Vec<Vec<f64>>,
    pub logit: f64,
}

impl Trace {
    /// Which side of every ReLU hinge and which pool winner the pass used.
    pub fn kink_pattern(&self, activation: Activation) -> (Vec<bool>, Vec<usize>) {
        let mut signs = Vec::new();
        if activation == Activation::Relu {
            for z in self.conv_pre.iter().chain(self.dense_pre.iter()) {
                signs.extend(z.iter().map(|&v| v > 0.0));
            }
        }
        (signs, self.pool_arg.concat())
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of `sigmoid(logit)` against `label`, computed
/// without forming the probability.
#[inline]
pub(crate) fn bce_with_logit(logit: f64, label: f64) -> f64 {
    logit.max(0.0) - label * logit + (-logit.abs()).exp().ln_1p()
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    w_s: usize,
    genome: CnnGenome,
    params: Vec<f64>,
}

const MODEL_FORMAT: &str = "bcgauth-cnn";
const MODEL_VERSION: u32 = 1;

impl CnnModel {
    /// Build a model for `w_s`-second segments with seeded fan-in-scaled
    /// uniform weights and zero biases.
    pub fn build(genome: &CnnGenome, w_s: usize, seed: u64) -> Result<Self> {
        genome.validate(w_s)?;
        let input_len = w_s * 50;
        let layout = Layout::new(genome, input_len);
        let mut params = vec![0.0; layout.n_params];
        let mut rng = stream_rng(seed, Stream::Init, 0, 0);
        let gain = match genome.activation {
            Activation::Relu => 6.0,
            Activation::Tanh => 3.0,
        };
        let mut fill = |off: usize, count: usize, fan_in: usize, gain: f64| {
            let limit = (gain / fan_in as f64).sqrt();
            for p in &mut params[off..off + count] {
                *p = rng.random_range(-limit..limit);
            }
        };
        for c in &layout.convs {
            fill(c.w_off, c.out_ch * c.in_ch * c.kernel, c.in_ch * c.kernel, gain);
        }
        for d in &layout.hidden {
            fill(d.w_off, d.n_in * d.n_out, d.n_in, gain);
        }
        let o = layout.output;
        fill(o.w_off, o.n_in, o.n_in, 3.0);
        Ok(Self {
            genome: *genome,
            w_s,
            input_len,
            params,
            layout,
        })
    }

    pub fn genome(&self) -> &CnnGenome {
        &self.genome
    }

    pub fn w_s(&self) -> usize {
        self.w_s
    }

    pub fn input_shape(&self) -> (usize, usize, usize) {
        (2, 3, self.input_len)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub(crate) fn check_input(&self, x: &SegmentTensor) -> Result<()> {
        if x.shape() != self.input_shape() {
            return Err(Error::Shape(format!(
                "model expects {:?}, got {:?}",
                self.input_shape(),
                x.shape()
            )));
        }
        if !x.is_finite() {
            return Err(Error::Input("non-finite value in input tensor".into()));
        }
        Ok(())
    }

    /// Confidence in [0, 1] that `x` belongs to the enrolled subject.
    pub fn forward(&self, x: &SegmentTensor) -> Result<f64> {
        self.check_input(x)?;
        let mut trace = Trace::default();
        self.forward_trace(x.as_slice(), &mut trace, None::<&mut ChaCha8Rng>);
        Ok(sigmoid(trace.logit))
    }

    pub fn predict(&self, xs: &[SegmentTensor]) -> Result<Vec<f64>> {
        let mut trace = Trace::default();
        xs.iter()
            .map(|x| {
                self.check_input(x)?;
                self.forward_trace(x.as_slice(), &mut trace, None::<&mut ChaCha8Rng>);
                Ok(sigmoid(trace.logit))
            })
            .collect()
    }

    /// Forward pass recording everything backprop needs. With `dropout_rng`
    /// set, hidden units are dropped at the genome's rate.
    pub(crate) fn forward_trace<R: Rng>(&self, input: &[f64], tr: &mut Trace, mut dropout_rng: Option<&mut R>) {
        let act = self.genome.activation;
        let p = &self.params;
        let n_conv = self.layout.convs.len();
        let n_dense = self.layout.hidden.len() + 1;
        tr.conv_in.resize(n_conv, Vec::new());
        tr.conv_pre.resize(n_conv, Vec::new());
        tr.pool_arg.resize(n_conv, Vec::new());
        tr.dense_in.resize(n_dense, Vec::new());
        tr.dense_pre.resize(n_dense - 1, Vec::new());
        tr.dropout.resize(n_dense - 1, Vec::new());

        let mut current: Vec<f64> = input.to_vec();
        for (l, c) in self.layout.convs.iter().enumerate() {
            let len = c.len_in;
            let half = c.kernel / 2;
            let z = &mut tr.conv_pre[l];
            z.clear();
            z.resize(c.out_ch * len, 0.0);
            for o in 0..c.out_ch {
                let zo = &mut z[o * len..(o + 1) * len];
                zo.fill(p[c.b_off + o]);
                for i in 0..c.in_ch {
                    let xi = &current[i * len..(i + 1) * len];
                    for j in 0..c.kernel {
                        let w = p[c.w_index(o, i, j)];
                        // z[t] += w * x[t + j - half] where the index is valid
                        let (t_lo, t_hi) = if j < half {
                            (half - j, len)
                        } else {
                            (0, len - (j - half))
                        };
                        if t_lo >= t_hi {
                            continue;
                        }
                        let shift = j as isize - half as isize;
                        let src = &xi[(t_lo as isize + shift) as usize..(t_hi as isize + shift) as usize];
                        for (zt, &xv) in zo[t_lo..t_hi].iter_mut().zip(src) {
                            *zt += w * xv;
                        }
                    }
                }
            }
            let arg = &mut tr.pool_arg[l];
            arg.clear();
            let mut pooled = Vec::with_capacity(c.out_ch * c.len_out);
            for o in 0..c.out_ch {
                for u in 0..c.len_out {
                    let base = o * len + u * c.pool;
                    let mut best = base;
                    for k in base + 1..base + c.pool {
                        if z[k] > z[best] {
                            best = k;
                        }
                    }
                    arg.push(best);
                    // activation is monotone, so max-then-activate equals
                    // activate-then-max
                    pooled.push(act.apply(z[best]));
                }
            }
            tr.conv_in[l] = std::mem::replace(&mut current, pooled);
        }

        for (l, d) in self.layout.hidden.iter().enumerate() {
            let z = &mut tr.dense_pre[l];
            dense_forward(p, d, &current, z);
            let mut h: Vec<f64> = z.iter().map(|&v| act.apply(v)).collect();
            let mask = &mut tr.dropout[l];
            mask.clear();
            if let Some(rng) = dropout_rng.as_deref_mut() {
                let rate = self.genome.dropout_rate;
                if rate > 0.0 {
                    let keep = 1.0 - rate;
                    mask.extend((0..d.n_out).map(|_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 }));
                    h.iter_mut().zip(mask.iter()).for_each(|(v, m)| *v *= m);
                }
            }
            tr.dense_in[l] = std::mem::replace(&mut current, h);
        }
        let o = &self.layout.output;
        let mut out = Vec::new();
        dense_forward(p, o, &current, &mut out);
        tr.logit = out[0];
        tr.dense_in[n_dense - 1] = current;
    }

    /// Accumulate `scale · dLoss/dparams` into `grad` given the trace of a
    /// forward pass, where `dlogit = dLoss/dlogit`.
    pub(crate) fn backward(&self, tr: &Trace, dlogit: f64, scale: f64, grad: &mut [f64]) {
        let act = self.genome.activation;
        let p = &self.params;
        let g = dlogit * scale;

        let o = &self.layout.output;
        let h = &tr.dense_in[self.layout.hidden.len()];
        let mut dh: Vec<f64> = vec![0.0; o.n_in];
        for k in 0..o.n_in {
            grad[o.w_off + k] += g * h[k];
            dh[k] = g * p[o.w_off + k];
        }
        grad[o.b_off] += g;

        for (l, d) in self.layout.hidden.iter().enumerate().rev() {
            if !tr.dropout[l].is_empty() {
                dh.iter_mut().zip(&tr.dropout[l]).for_each(|(v, m)| *v *= m);
            }
            let z = &tr.dense_pre[l];
            let x = &tr.dense_in[l];
            let mut dx = vec![0.0; d.n_in];
            for r in 0..d.n_out {
                let dz = dh[r] * act.derivative(z[r]);
                if dz == 0.0 {
                    continue;
                }
                grad[d.b_off + r] += dz;
                let row = d.w_off + r * d.n_in;
                for (k, &xk) in x.iter().enumerate() {
                    grad[row + k] += dz * xk;
                    dx[k] += dz * p[row + k];
                }
            }
            dh = dx;
        }

        // dh is now the gradient w.r.t. the flattened output of the last conv layer.
        let mut d_pooled = dh;
        for (l, c) in self.layout.convs.iter().enumerate().rev() {
            let len = c.len_in;
            let half = c.kernel / 2;
            let z = &tr.conv_pre[l];
            let mut dz = vec![0.0; c.out_ch * len];
            for (k, &pos) in tr.pool_arg[l].iter().enumerate() {
                dz[pos] += d_pooled[k] * act.derivative(z[pos]);
            }
            let x = &tr.conv_in[l];
            let need_dx = l > 0;
            let mut dx = if need_dx { vec![0.0; c.in_ch * len] } else { Vec::new() };
            for oc in 0..c.out_ch {
                let dzo = &dz[oc * len..(oc + 1) * len];
                grad[c.b_off + oc] += dzo.iter().sum::<f64>();
                for i in 0..c.in_ch {
                    let xi = &x[i * len..(i + 1) * len];
                    for j in 0..c.kernel {
                        let widx = c.w_index(oc, i, j);
                        let (t_lo, t_hi) = if j < half {
                            (half - j, len)
                        } else {
                            (0, len - (j - half))
                        };
                        if t_lo >= t_hi {
                            continue;
                        }
                        let s_lo = (t_lo as isize + j as isize - half as isize) as usize;
                        let s_hi = s_lo + (t_hi - t_lo);
                        let mut acc = 0.0;
                        for (&d, &xv) in dzo[t_lo..t_hi].iter().zip(&xi[s_lo..s_hi]) {
                            acc += d * xv;
                        }
                        grad[widx] += acc;
                        if need_dx {
                            let w = p[widx];
                            for (dxv, &d) in dx[i * len + s_lo..i * len + s_hi].iter_mut().zip(&dzo[t_lo..t_hi]) {
                                *dxv += w * d;
                            }
                        }
                    }
                }
            }
            d_pooled = dx;
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            w_s: self.w_s,
            genome: self.genome,
            params: self.params.clone(),
        };
        let json = serde_json::to_string(&file).map_err(|e| Error::json(path, e))?;
        crate::harness::write_atomic(path, json.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Input(format!(
                "{}: unsupported model format {} v{}",
                path.display(),
                file.format,
                file.version
            )));
        }
        let mut model = CnnModel::build(&file.genome, file.w_s, 0)?;
        if file.params.len() != model.params.len() {
            return Err(Error::Shape(format!(
                "{}: {} parameters stored, genome needs {}",
                path.display(),
                file.params.len(),
                model.params.len()
            )));
        }
        model.params = file.params;
        Ok(model)
    }
}

fn dense_forward(p: &[f64], d: &DenseSpec, x: &[f64], z: &mut Vec<f64>) {
    z.clear();
    for r in 0..d.n_out {
        let row = &p[d.w_off + r * d.n_in..d.w_off + (r + 1) * d.n_in];
        let s: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
        z.push(s + p[d.b_off + r]);
    }
}
