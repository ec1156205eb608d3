//! Batched jet propagation with a layer-granular tape.
//!
//! A batch of `B` points is pushed through the network as one matrix per
//! layer of shape `N_l × kB`, whose column blocks hold the value and (for
//! `k = 4`) the `t`, `x` and `xx` tangents of every point. The forward pass
//! keeps each layer's input, pre-activation and activation derivatives, which
//! is exactly what the reverse pass needs to return parameter gradients of any
//! scalar built from the output jets.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, Axis};

use super::network::{LayerParams, Network};

/// Which output derivatives a batch carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOrder {
    /// Values only.
    Value,
    /// Values with `t`, `x` and `xx` tangents.
    Full,
}

impl JetOrder {
    fn blocks(self) -> usize {
        match self {
            JetOrder::Value => 1,
            JetOrder::Full => 4,
        }
    }
}

struct LayerCache {
    /// Layer input, `N_{l-1} × kB`.
    input: Array2<f64>,
    /// Pre-activation, `N_l × kB` (hidden layers only).
    pre: Array2<f64>,
    /// `σ', σ'', σ'''` at the pre-activation values, `N_l × B` each.
    slopes: [Array2<f64>; 3],
}

/// Forward record of one batch.
pub struct BatchForward {
    order: JetOrder,
    points: usize,
    caches: Vec<LayerCache>,
    output: Array2<f64>,
}

/// Adjoints of a scalar objective with respect to the output jets.
#[derive(Debug, Clone, Default)]
pub struct OutputAdjoints {
    pub val: Vec<f64>,
    pub dt: Vec<f64>,
    pub dx: Vec<f64>,
    pub dxx: Vec<f64>,
}

impl OutputAdjoints {
    pub fn zeros(points: usize, order: JetOrder) -> Self {
        let tangent = match order {
            JetOrder::Value => 0,
            JetOrder::Full => points,
        };
        OutputAdjoints {
            val: vec![0.0; points],
            dt: vec![0.0; tangent],
            dx: vec![0.0; tangent],
            dxx: vec![0.0; tangent],
        }
    }
}

fn input_block(ts: &[f64], xs: &[f64], order: JetOrder) -> Array2<f64> {
    let b = ts.len();
    let mut a = Array2::zeros((2, order.blocks() * b));
    for j in 0..b {
        a[[0, j]] = ts[j];
        a[[1, j]] = xs[j];
    }
    if order == JetOrder::Full {
        a.slice_mut(s![0, b..2 * b]).fill(1.0);
        a.slice_mut(s![1, 2 * b..3 * b]).fill(1.0);
    }
    a
}

impl BatchForward {
    /// Propagates the points `(ts[j], xs[j])` through `net`.
    pub fn run(net: &Network, ts: &[f64], xs: &[f64], order: JetOrder) -> Self {
        assert_eq!(ts.len(), xs.len(), "t and x batches must have equal length");
        let b = ts.len();
        let k = order.blocks();
        let act = net.activation();
        let layers = net.layers();
        let last = layers.len() - 1;
        let mut a = input_block(ts, xs, order);
        let mut caches = Vec::with_capacity(layers.len());
        for (l, layer) in layers.iter().enumerate() {
            let n = layer.outputs();
            let mut z = Array2::zeros((n, k * b));
            general_mat_mul(1.0, &layer.weights, &a, 0.0, &mut z);
            for (mut row, &bias) in z.axis_iter_mut(Axis(0)).zip(layer.biases.iter()) {
                row.slice_mut(s![..b]).mapv_inplace(|v| v + bias);
            }
            if l == last {
                caches.push(LayerCache {
                    input: a,
                    pre: Array2::zeros((0, 0)),
                    slopes: [Array2::zeros((0, 0)), Array2::zeros((0, 0)), Array2::zeros((0, 0))],
                });
                a = z;
                break;
            }
            let mut out = Array2::zeros((n, k * b));
            let mut s1 = Array2::zeros((n, b));
            let mut s2 = Array2::zeros((n, b));
            let mut s3 = Array2::zeros((n, b));
            for i in 0..n {
                let zr = z.row(i);
                let zr = zr.as_slice().expect("row-major");
                let or = &mut out.row_mut(i);
                let or = or.as_slice_mut().expect("row-major");
                for j in 0..b {
                    let [g, d1, d2, d3] = act.derivs(zr[j]);
                    s1[[i, j]] = d1;
                    s2[[i, j]] = d2;
                    s3[[i, j]] = d3;
                    or[j] = g;
                    if k == 4 {
                        let (zt, zx, zxx) = (zr[b + j], zr[2 * b + j], zr[3 * b + j]);
                        or[b + j] = d1 * zt;
                        or[2 * b + j] = d1 * zx;
                        or[3 * b + j] = d2 * zx * zx + d1 * zxx;
                    }
                }
            }
            caches.push(LayerCache {
                input: a,
                pre: z,
                slopes: [s1, s2, s3],
            });
            a = out;
        }
        BatchForward {
            order,
            points: b,
            caches,
            output: a,
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn order(&self) -> JetOrder {
        self.order
    }

    fn block(&self, c: usize) -> &[f64] {
        let b = self.points;
        let row = self.output.as_slice().expect("row-major output");
        &row[c * b..(c + 1) * b]
    }

    pub fn values(&self) -> &[f64] {
        self.block(0)
    }

    /// `(u_t, u_x, u_xx)` for a [`JetOrder::Full`] batch.
    pub fn tangents(&self) -> (&[f64], &[f64], &[f64]) {
        assert_eq!(self.order, JetOrder::Full, "value-only batch has no tangents");
        (self.block(1), self.block(2), self.block(3))
    }

    /// Reverse pass: writes the parameter gradient of the objective whose
    /// output adjoints are `seed` into `grads` (overwriting it).
    pub fn backward(&self, net: &Network, seed: &OutputAdjoints, grads: &mut [LayerParams]) {
        let b = self.points;
        let k = self.order.blocks();
        let mut bar = Array2::zeros((1, k * b));
        {
            let row = bar.as_slice_mut().expect("row-major");
            row[..b].copy_from_slice(&seed.val);
            if k == 4 {
                row[b..2 * b].copy_from_slice(&seed.dt);
                row[2 * b..3 * b].copy_from_slice(&seed.dx);
                row[3 * b..].copy_from_slice(&seed.dxx);
            }
        }
        let layers = net.layers();
        for l in (0..layers.len()).rev() {
            let cache = &self.caches[l];
            let grad = &mut grads[l];
            general_mat_mul(1.0, &bar, &cache.input.t(), 0.0, &mut grad.weights);
            for (gb, row) in grad.biases.iter_mut().zip(bar.axis_iter(Axis(0))) {
                *gb = row.slice(s![..b]).sum();
            }
            if l == 0 {
                break;
            }
            let mut upstream = Array2::zeros((layers[l].inputs(), k * b));
            general_mat_mul(1.0, &layers[l].weights.t(), &bar, 0.0, &mut upstream);
            bar = activation_backward(&self.caches[l - 1], upstream, b, k);
        }
    }
}

/// Maps adjoints of a hidden layer's output jets to adjoints of its pre-activation jets.
fn activation_backward(cache: &LayerCache, mut bar: Array2<f64>, b: usize, k: usize) -> Array2<f64> {
    let [s1, s2, s3] = &cache.slopes;
    for i in 0..bar.nrows() {
        let zr = cache.pre.row(i);
        let zr = zr.as_slice().expect("row-major");
        let (r1, r2, r3) = (s1.row(i), s2.row(i), s3.row(i));
        let mut br = bar.row_mut(i);
        let br = br.as_slice_mut().expect("row-major");
        for j in 0..b {
            let d1 = r1[j];
            if k == 1 {
                br[j] *= d1;
                continue;
            }
            let (d2, d3) = (r2[j], r3[j]);
            let (zt, zx, zxx) = (zr[b + j], zr[2 * b + j], zr[3 * b + j]);
            let (a0, at, ax, axx) = (br[j], br[b + j], br[2 * b + j], br[3 * b + j]);
            br[j] = d1 * a0 + d2 * (zt * at + zx * ax + zxx * axx) + d3 * zx * zx * axx;
            br[b + j] = d1 * at;
            br[2 * b + j] = d1 * ax + 2.0 * d2 * zx * axx;
            br[3 * b + j] = d1 * axx;
        }
    }
    bar
}

/// Values of `net` at many points, computed in batches.
pub fn predict_batch(net: &Network, ts: &[f64], xs: &[f64]) -> Vec<f64> {
    BatchForward::run(net, ts, xs, JetOrder::Value).values().to_vec()
}
