//! Adaptive Gauss–Kronrod (10/21-point) quadrature with interval bisection.
//!
//! The globally adaptive strategy always bisects the sub-interval with the
//! largest error estimate until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)` or the interval budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1); odd indices are the Gauss-10 nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    pub fn with_budget(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    round: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
/// Returns (value, error estimate, rounding floor of the estimate).
fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let mut round = 0.0;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        round = 50.0 * f64::EPSILON * resabs;
        err = err.max(round);
    }
    (result, err, round)
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrate `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be sorted).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("at least two integration limits required".into()));
    }
    if points.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument("integration breakpoints must be sorted".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_round = 0.0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e, r) = kronrod21(&f, w[0], w[1]);
        total += v;
        total_err += e;
        total_round += r;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e, round: r });
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{}, {}]",
            points[0],
            points[points.len() - 1]
        )));
    }
    let mut count = heap.len();
    loop {
        // once the estimate is mostly rounding floor, bisection cannot help
        let target = opts.abs_tol.max(opts.rel_tol * total.abs()).max(1.5 * total_round);
        if total_err <= target {
            break;
        }
        if count >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "subdivision budget of {} exhausted (estimate {:e}, error {:e}, target {:e})",
                opts.max_intervals, total, total_err, target
            )));
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in double precision
            heap.push(worst);
            return Err(Error::QuadratureFailure(format!(
                "interval [{}, {}] below resolution (error {:e})",
                worst.a, worst.b, total_err
            )));
        }
        let (v1, e1, r1) = kronrod21(&f, worst.a, mid);
        let (v2, e2, r2) = kronrod21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_round += r1 + r2 - worst.round;
        if !total.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "non-finite integrand near [{}, {}]",
                worst.a, worst.b
            )));
        }
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, round: r1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, round: r2 });
        count += 1;
        if count % 64 == 0 {
            // resum to shed accumulated drift from the running updates
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
            total_round = heap.iter().map(|p| p.round).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult { value, abs_err, intervals: count })
}

/// Uniform breakpoints `a, a + w, ...` up to `b` with panel width at most `w`.
pub fn uniform_breaks(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Non-adaptive composite 10-point Gauss–Legendre rule on `panels` equal
/// panels. Error falls like h^20 for analytic integrands.
pub fn gauss10_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for j in 0..5 {
            let dx = half * XGK[2 * j + 1];
            acc += WG[j] * (f(c - dx) + f(c + dx));
        }
        total += acc * half;
    }
    total
}
