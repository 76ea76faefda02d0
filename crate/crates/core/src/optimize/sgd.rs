//! Stochastic gradient descent on the attraction + repulsion loss.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curve::fit_curve;
use super::loss::{edge_dloss_ds, repulsion_dloss_ds, weight_pair};
use crate::data::{Dataset, Embedding, FuzzyGraph};
use crate::error::{Error, Result};

/// How the low-dimensional coordinates are initialised.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    /// Uniform in `[-10, 10]ⁿ`.
    Random,
    /// Projection onto the leading principal axes, rescaled to `[-10, 10]`.
    #[default]
    Pca,
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Init::Random),
            "pca" => Ok(Init::Pca),
            _ => Err(Error::usage(format!("unknown init {s:?}; expected random or pca"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub n_components: usize,
    pub n_epochs: usize,
    /// Initial learning rate, decayed linearly to 0.
    pub learning_rate: f64,
    /// α, the weight of the non-edge repulsion.
    pub alpha_repulsion: f64,
    pub negative_sample_rate: usize,
    pub min_dist: f64,
    pub seed: u64,
    pub init: Init,
    /// Per-coordinate cap on a single sampled gradient.
    pub gradient_clip: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_components: 2,
            n_epochs: 500,
            learning_rate: 1.0,
            alpha_repulsion: 1.0,
            negative_sample_rate: 5,
            min_dist: 0.001,
            seed: 42,
            init: Init::Pca,
            gradient_clip: 4.0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_components == 0 {
            return Err(Error::usage("n_components must be >= 1"));
        }
        if self.n_epochs == 0 {
            return Err(Error::usage("n_epochs must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::usage(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.alpha_repulsion > 0.0 && self.alpha_repulsion.is_finite()) {
            return Err(Error::usage(format!(
                "alpha_repulsion must be positive, got {}",
                self.alpha_repulsion
            )));
        }
        if !(self.min_dist > 0.0 && self.min_dist <= 1.0) {
            return Err(Error::usage(format!(
                "min_dist must lie in (0, 1], got {}",
                self.min_dist
            )));
        }
        if !(self.gradient_clip > 0.0) {
            return Err(Error::usage("gradient_clip must be positive"));
        }
        Ok(())
    }
}

/// Uniform random coordinates in `[-10, 10]ⁿ`.
pub fn random_init(n_points: usize, n_components: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n_points * n_components)
        .map(|_| rng.random_range(-10.0..=10.0))
        .collect()
}

/// Projection onto the top `n_components` principal axes, scaled so the
/// largest absolute coordinate is 10. Axis signs are fixed so the largest
/// loading of each axis is positive.
pub fn pca_init(data: &Dataset, n_components: usize) -> Result<Vec<f64>> {
    let (n, m) = (data.n_points(), data.dim());
    if n_components > m {
        return Err(Error::usage(format!(
            "cannot project {m}-dimensional data onto {n_components} principal axes"
        )));
    }
    let mut mean = vec![0.0; m];
    for i in 0..n {
        for (mu, x) in mean.iter_mut().zip(data.point(i)) {
            *mu += x / n as f64;
        }
    }
    let centered = DMatrix::from_fn(n, m, |i, j| data.point(i)[j] - mean[j]);
    let cov = centered.transpose() * &centered;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));

    let mut out = vec![0.0; n * n_components];
    for (c, &axis) in order.iter().take(n_components).enumerate() {
        let mut v = eig.eigenvectors.column(axis).into_owned();
        let lead = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        if lead < 0.0 {
            v = -v;
        }
        let proj = &centered * v;
        for i in 0..n {
            out[i * n_components + c] = proj[i];
        }
    }
    let max_abs = out.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_abs > 0.0 {
        for v in &mut out {
            *v *= 10.0 / max_abs;
        }
    }
    Ok(out)
}

/// Epochs between visits of each edge: `⌈max_w / w⌉`, `None` for zero weight.
pub fn epochs_per_sample(fuzzy: &FuzzyGraph) -> Vec<Option<usize>> {
    let max_w = fuzzy.edges().iter().map(|e| e.weight).fold(0.0, f64::max);
    fuzzy
        .edges()
        .iter()
        .map(|e| (e.weight > 0.0).then(|| (max_w / e.weight).ceil().max(1.0) as usize))
        .collect()
}

struct Sampler<'a> {
    coords: Vec<f64>,
    dim: usize,
    a: f64,
    b: f64,
    clip: f64,
    alpha: f64,
    adjacency: &'a [Vec<usize>],
    scratch: Vec<f64>,
}

impl Sampler<'_> {
    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        let (yi, yj) = (&self.coords[i * self.dim..], &self.coords[j * self.dim..]);
        (0..self.dim).map(|k| (yi[k] - yj[k]) * (yi[k] - yj[k])).sum()
    }

    fn fill_gradient(&mut self, i: usize, j: usize, dl_ds: f64) {
        for k in 0..self.dim {
            let diff = self.coords[i * self.dim + k] - self.coords[j * self.dim + k];
            self.scratch[k] = (2.0 * dl_ds * diff).clamp(-self.clip, self.clip);
        }
    }

    fn attract(&mut self, i: usize, j: usize, lr: f64) {
        let s = self.dist_sq(i, j);
        if s <= 0.0 {
            return;
        }
        // attractive half of the edge term, -ln w_l
        let dl_ds = edge_dloss_ds(1.0, s, self.a, self.b);
        self.fill_gradient(i, j, dl_ds);
        for k in 0..self.dim {
            self.coords[i * self.dim + k] -= lr * self.scratch[k];
            self.coords[j * self.dim + k] += lr * self.scratch[k];
        }
    }

    fn repel(&mut self, i: usize, j: usize, lr: f64) {
        let s = self.dist_sq(i, j);
        if s <= 0.0 {
            return;
        }
        // unclamped -b w / s; the gradient cap bounds the step
        let (w, _) = weight_pair(s, self.a, self.b);
        let dl_ds = -self.alpha * self.b * w / s;
        self.fill_gradient(i, j, dl_ds);
        for k in 0..self.dim {
            self.coords[i * self.dim + k] -= lr * self.scratch[k];
        }
    }

    fn negatives(&mut self, v: usize, count: usize, lr: f64, rng: &mut ChaCha8Rng) {
        let n = self.adjacency.len();
        if self.adjacency[v].len() + 1 >= n {
            return;
        }
        for _ in 0..count {
            for _attempt in 0..16 {
                let j = rng.random_range(0..n);
                if j != v && self.adjacency[v].binary_search(&j).is_err() {
                    self.repel(v, j, lr);
                    break;
                }
            }
        }
    }
}

/// Embeds the fuzzy graph into `cfg.n_components` dimensions.
///
/// Each epoch visits every edge whose period (see [`epochs_per_sample`])
/// divides the epoch index and pulls its endpoints together. Each visit also
/// draws `negative_sample_rate` uniform non-neighbours for both endpoints and
/// pushes them apart with weight α; vertices left unvisited in an epoch still
/// draw `negative_sample_rate` negatives. The run is single-threaded and
/// reproducible from `cfg.seed`.
pub fn optimize(fuzzy: &FuzzyGraph, data: &Dataset, cfg: &OptimizerConfig) -> Result<Embedding> {
    cfg.validate()?;
    let n = data.n_points();
    if fuzzy.n_vertices() != n {
        return Err(Error::usage(format!(
            "graph has {} vertices but dataset has {n} points",
            fuzzy.n_vertices()
        )));
    }
    if cfg.n_components > data.dim() {
        return Err(Error::usage(format!(
            "n_components {} exceeds input dimension {}",
            cfg.n_components,
            data.dim()
        )));
    }
    let curve = fit_curve(cfg.min_dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coords = match cfg.init {
        Init::Random => random_init(n, cfg.n_components, &mut rng),
        Init::Pca => pca_init(data, cfg.n_components)?,
    };
    let adjacency = fuzzy.adjacency();
    let periods = epochs_per_sample(fuzzy);
    let mut sampler = Sampler {
        coords,
        dim: cfg.n_components,
        a: curve.a,
        b: curve.b,
        clip: cfg.gradient_clip,
        alpha: cfg.alpha_repulsion,
        adjacency: &adjacency,
        scratch: vec![0.0; cfg.n_components],
    };
    let neg = cfg.negative_sample_rate;
    let mut visited = vec![false; n];
    for epoch in 0..cfg.n_epochs {
        let lr = cfg.learning_rate * (1.0 - epoch as f64 / cfg.n_epochs as f64);
        visited.iter_mut().for_each(|v| *v = false);
        for (e, period) in fuzzy.edges().iter().zip(&periods) {
            let Some(period) = *period else { continue };
            if epoch % period != 0 {
                continue;
            }
            sampler.attract(e.i, e.j, lr);
            sampler.negatives(e.i, neg, lr, &mut rng);
            sampler.negatives(e.j, neg, lr, &mut rng);
            visited[e.i] = true;
            visited[e.j] = true;
        }
        for (v, _) in visited.iter().enumerate().filter(|(_, seen)| !**seen) {
            sampler.negatives(v, neg, lr, &mut rng);
        }
        if sampler.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::numeric(format!("non-finite coordinate after epoch {epoch}")));
        }
    }
    Embedding::new(sampler.coords, cfg.n_components, curve, cfg.min_dist)
}

/// One stochastic estimate of [`super::loss_gradient`]: the edge terms are
/// exact, and each vertex's repulsion is estimated from
/// `negative_sample_rate` uniform draws over the other vertices, reweighted
/// by `(N − 1) / negative_sample_rate`. Its expectation is the full-batch
/// gradient.
pub fn sampled_gradient(
    fuzzy: &FuzzyGraph,
    emb: &Embedding,
    alpha: f64,
    negative_sample_rate: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    super::loss::check_inputs(fuzzy, emb, alpha)?;
    if negative_sample_rate == 0 {
        return Err(Error::usage(
            "negative_sample_rate must be >= 1 for a repulsion estimate",
        ));
    }
    let c = emb.curve();
    let (n, dim) = (emb.n_points(), emb.dim());
    let adjacency = fuzzy.adjacency();
    let mut grad = vec![0.0; n * dim];
    let add = |grad: &mut Vec<f64>, i: usize, j: usize, scale: f64| {
        for k in 0..dim {
            grad[i * dim + k] += 2.0 * scale * (emb.point(i)[k] - emb.point(j)[k]);
        }
    };
    for e in fuzzy.edges() {
        let s = emb.dist_sq(e.i, e.j);
        if s > 0.0 {
            let dl = edge_dloss_ds(e.weight, s, c.a, c.b);
            add(&mut grad, e.i, e.j, dl);
            add(&mut grad, e.j, e.i, dl);
        }
    }
    let reweight = (n - 1) as f64 / negative_sample_rate as f64;
    for (v, neighbours) in adjacency.iter().enumerate() {
        for _ in 0..negative_sample_rate {
            let mut j = rng.random_range(0..n - 1);
            if j >= v {
                j += 1;
            }
            if neighbours.binary_search(&j).is_ok() {
                continue;
            }
            let s = emb.dist_sq(v, j);
            if s > 0.0 {
                add(&mut grad, v, j, reweight * alpha * repulsion_dloss_ds(s, c.a, c.b));
            }
        }
    }
    Ok(grad)
}
