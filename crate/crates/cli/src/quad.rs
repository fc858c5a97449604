//! Deterministic quadrature building blocks.
//!
//! Every summation runs over a fixed partition of the node space into
//! [`PARTITIONS`] groups. Worker threads pick up whole groups, each group
//! is accumulated in index order with compensated addition, and the group
//! totals are combined in group order. The result is therefore bit
//! identical for any thread count.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PARTITIONS: usize = 64;

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Componentwise Kahan accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    assert!(n >= 2, "order below 2 is useless here");
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(hit) = guard.get(&n) {
        return hit;
    }
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 2.5e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        out[i] = (-x.abs(), w);
        out[n - 1 - i] = (x.abs(), w);
    }
    let leaked: &'static [(f64, f64)] = Box::leak(out.into_boxed_slice());
    guard.insert(n, leaked);
    leaked
}

/// Composite Gauss-Legendre nodes covering [a, b] with panels of at most
/// `width`, as (position, weight) pairs in ascending position order.
pub fn panel_nodes(a: f64, b: f64, width: f64, order: usize) -> Vec<(f64, f64)> {
    assert!(b > a && width > 0.0);
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let step = (b - a) / panels as f64;
    let base = gauss_legendre(order);
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + step * p as f64;
        let mid = lo + 0.5 * step;
        for &(x, w) in base {
            out.push((mid + 0.5 * step * x, 0.5 * step * w));
        }
    }
    out
}

/// One tanh-sinh node for the unit interval. `xc = 1 - x` is carried
/// separately so endpoint-singular factors can be formed without
/// cancellation.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub x: f64,
    pub xc: f64,
    pub w: f64,
}

/// Tanh-sinh rule on (0, 1) with step `1/h_inv`, cached per step. Step
/// 1/64 reaches roughly 1e-13 for integrands with integrable endpoint
/// singularities; coarser steps trade accuracy for node count.
pub fn tanh_sinh(h_inv: usize) -> &'static [TsNode] {
    assert!(h_inv >= 4);
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [TsNode]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(hit) = guard.get(&h_inv) {
        return hit;
    }
    let h = 1.0 / h_inv as f64;
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut out = Vec::new();
    let kmax = (6.0 / h) as i64;
    for k in -kmax..=kmax {
        let u = h * k as f64;
        let s = half_pi * u.sinh();
        // x = (1 + tanh s) / 2 and 1 - x, both via one stable form.
        let e = (-2.0 * s).exp();
        let x = 1.0 / (1.0 + e);
        let xc = e / (1.0 + e);
        let w = h * half_pi * u.cosh() / (s.cosh() * s.cosh()) / 2.0;
        if w.is_finite() && w > 0.0 && x > 0.0 && xc > 0.0 {
            out.push(TsNode { x, xc, w });
        }
    }
    let leaked: &'static [TsNode] = Box::leak(out.into_boxed_slice());
    guard.insert(h_inv, leaked);
    leaked
}

fn run_partitions<F>(threads: usize, eval: F) -> Vec<Complex64>
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let threads = threads.max(1);
    let mut partials = vec![Complex64::new(0.0, 0.0); PARTITIONS];
    if threads == 1 {
        for (p, slot) in partials.iter_mut().enumerate() {
            *slot = eval(p);
        }
    } else {
        let eval = &eval;
        let chunks: Vec<Vec<(usize, Complex64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    scope.spawn(move || {
                        (t..PARTITIONS)
                            .step_by(threads)
                            .map(|p| (p, eval(p)))
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for chunk in chunks {
            for (p, v) in chunk {
                partials[p] = v;
            }
        }
    }
    partials
}

fn combine(partials: &[Complex64]) -> Complex64 {
    let mut acc = KahanC::new();
    for &p in partials {
        acc.add(p);
    }
    acc.value()
}

/// Sums `f` over the tensor grid spanned by `axes`. The callback receives
/// one node per axis and must return the fully weighted contribution.
/// Returns the sum and the number of evaluations.
pub fn grid_sum<N, F>(axes: &[&[N]], threads: usize, f: F) -> (Complex64, u64)
where
    N: Sync,
    F: Fn(&[&N]) -> Complex64 + Sync,
{
    let total: u64 = axes.iter().map(|a| a.len() as u64).product();
    if axes.is_empty() || total == 0 {
        let nodes: Vec<&N> = Vec::new();
        return (f(&nodes), 1);
    }
    let partials = run_partitions(threads, |p| {
        let mut acc = KahanC::new();
        let mut nodes: Vec<&N> = Vec::with_capacity(axes.len());
        let mut flat = p as u64;
        while flat < total {
            nodes.clear();
            let mut rest = flat;
            for axis in axes.iter().rev() {
                let len = axis.len() as u64;
                nodes.push(&axis[(rest % len) as usize]);
                rest /= len;
            }
            nodes.reverse();
            acc.add(f(&nodes));
            flat += PARTITIONS as u64;
        }
        acc.value()
    });
    (combine(&partials), total)
}

fn stream_seed(seed: u64, block: u64) -> u64 {
    // splitmix64 step keyed by the block index.
    let mut z = seed ^ (block.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Plain Monte-Carlo mean over a box, returning (integral estimate,
/// standard error, samples actually used). Samples are drawn in
/// [`PARTITIONS`] independent ChaCha streams so the result depends only on
/// `(seed, samples)`, never on the thread count.
pub fn monte_carlo_box<F>(
    lo: &[f64],
    hi: &[f64],
    samples: u64,
    seed: u64,
    threads: usize,
    f: F,
) -> (Complex64, f64, u64)
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    assert_eq!(lo.len(), hi.len());
    let per_block = samples.div_ceil(PARTITIONS as u64).max(1);
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let partials = run_partitions(threads, |p| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, p as u64));
        let mut acc = KahanC::new();
        let mut point = vec![0.0; lo.len()];
        for _ in 0..per_block {
            for (slot, (a, b)) in point.iter_mut().zip(lo.iter().zip(hi)) {
                *slot = a + (b - a) * rng.gen::<f64>();
            }
            acc.add(f(&point));
        }
        acc.value()
    });
    let used = per_block * PARTITIONS as u64;
    let mean = combine(&partials) / used as f64;
    // Spread of the block means, in fixed block order.
    let mut var = Kahan::new();
    for p in &partials {
        let d = *p / per_block as f64 - mean;
        var.add(d.norm_sqr());
    }
    let stderr = volume * (var.value() / (PARTITIONS as f64 * (PARTITIONS as f64 - 1.0))).sqrt();
    (volume * mean, stderr, used)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_panels_integrate_polynomials() {
        // int_{-1}^{1} x^6 dx = 2/7 with a single 8-point panel.
        let nodes = panel_nodes(-1.0, 1.0, 2.0, 8);
        let mut acc = Kahan::new();
        for (x, w) in nodes {
            acc.add(w * x.powi(6));
        }
        assert!((acc.value() - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let rule = tanh_sinh(64);
        let mut a = Kahan::new();
        let mut b = Kahan::new();
        for n in rule {
            a.add(n.w / n.x.sqrt());
            b.add(n.w / (n.x.sqrt() * n.xc.sqrt()));
        }
        assert!((a.value() - 2.0).abs() < 1e-12, "got {}", a.value());
        assert!(
            (b.value() - std::f64::consts::PI).abs() < 1e-12,
            "got {}",
            b.value()
        );
    }

    #[test]
    fn grid_sum_is_a_tensor_product() {
        let ax = panel_nodes(0.0, 1.0, 0.25, 6);
        let (got, evals) = grid_sum(&[&ax, &ax], 1, |nodes| {
            let (x, wx) = *nodes[0];
            let (y, wy) = *nodes[1];
            Complex64::new(wx * wy * x * x * y, 0.0)
        });
        assert_eq!(evals, (ax.len() * ax.len()) as u64);
        assert!((got.re - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn grid_sum_ignores_thread_count() {
        let ax = panel_nodes(-3.0, 7.0, 0.5, 8);
        let f = |nodes: &[&(f64, f64)]| {
            let (x, wx) = *nodes[0];
            let (y, wy) = *nodes[1];
            Complex64::new(wx * wy * (x * y).sin(), wx * wy * (x - y).cos())
        };
        let (one, _) = grid_sum(&[&ax, &ax], 1, f);
        let (two, _) = grid_sum(&[&ax, &ax], 2, f);
        let (eight, _) = grid_sum(&[&ax, &ax], 8, f);
        assert_eq!(one, two);
        assert_eq!(one, eight);
    }

    #[test]
    fn zero_axes_evaluate_the_integrand_once() {
        let axes: [&[(f64, f64)]; 0] = [];
        let (got, evals) = grid_sum(&axes, 4, |_| Complex64::new(2.5, -1.0));
        assert_eq!(evals, 1);
        assert_eq!(got, Complex64::new(2.5, -1.0));
    }

    #[test]
    fn monte_carlo_is_reproducible_and_thread_invariant() {
        let f = |p: &[f64]| Complex64::new(p[0] * p[1] + p[2], 0.0);
        let lo = [0.0, 0.0, 0.0];
        let hi = [1.0, 1.0, 1.0];
        let a = monte_carlo_box(&lo, &hi, 4096, 11, 1, f);
        let b = monte_carlo_box(&lo, &hi, 4096, 11, 8, f);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        // int x y + z over the unit cube = 1/4 + 1/2.
        assert!((a.0.re - 0.75).abs() < 0.02, "estimate {}", a.0.re);
        let c = monte_carlo_box(&lo, &hi, 4096, 12, 1, f);
        assert_ne!(a.0, c.0, "seed must matter");
    }
}
