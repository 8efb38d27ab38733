//! One-dimensional quadrature over finite or infinite intervals.
//!
//! Infinite ends are mapped onto `t ∈ (0, 1]` with `x = a + (1 - t)/t`
//! (or its mirror), Jacobian `1/t²`. Both schemes work on the mapped pieces.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Average of lower and upper Riemann sums on a uniform grid, doubled until
    /// half the gap between the sums is below tolerance.
    RiemannAvg,
    /// Globally adaptive 15-point Gauss-Kronrod.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Panel doublings for `RiemannAvg`, interval bisections for `Adaptive`.
    pub max_refinements: u32,
    pub scheme: Scheme,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, max_refinements: u32, scheme: Scheme) -> Result<Self, QuadratureError> {
        let cfg = Self { abs_tol, max_refinements, scheme };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn adaptive(abs_tol: f64) -> Self {
        Self { abs_tol, max_refinements: 4000, scheme: Scheme::Adaptive }
    }

    pub fn riemann(abs_tol: f64) -> Self {
        Self { abs_tol, max_refinements: 20, scheme: Scheme::RiemannAvg }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_refinements < 1 {
            return Err(QuadratureError::InvalidConfig("max_refinements must be at least 1".into()));
        }
        if self.scheme == Scheme::RiemannAvg && self.max_refinements > 30 {
            return Err(QuadratureError::InvalidConfig("riemann_avg supports at most 30 doublings".into()));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::adaptive(1e-8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub error_bound: f64,
}

impl std::ops::Add for IntegralValue {
    type Output = IntegralValue;
    fn add(self, o: IntegralValue) -> IntegralValue {
        IntegralValue { value: self.value + o.value, error_bound: self.error_bound + o.error_bound }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid integration limits [{a}, {b}]")]
    InvalidLimits { a: f64, b: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("quadrature did not reach tolerance; best estimate {} ± {}", best.value, best.error_bound)]
    NotConverged { best: IntegralValue },
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite { a: f64, b: f64 },
    /// `[a, ∞)`
    Upper { a: f64 },
    /// `(-∞, b]`
    Lower { b: f64 },
}

impl Piece {
    fn range(&self) -> (f64, f64) {
        match *self {
            Piece::Finite { a, b } => (a, b),
            _ => (0.0, 1.0),
        }
    }

    // Returns (x, jacobian) at mapped coordinate t.
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Piece::Finite { .. } => (t, 1.0),
            Piece::Upper { a } => (a + (1.0 - t) / t, 1.0 / (t * t)),
            Piece::Lower { b } => (b - (1.0 - t) / t, 1.0 / (t * t)),
        }
    }
}

fn pieces(points: &[f64]) -> Result<Vec<Piece>, QuadratureError> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.is_nan() || b.is_nan() || a > b {
            return Err(QuadratureError::InvalidLimits { a, b });
        }
        if a == b {
            continue;
        }
        match (a.is_infinite(), b.is_infinite()) {
            (false, false) => out.push(Piece::Finite { a, b }),
            (false, true) => out.push(Piece::Upper { a }),
            (true, false) => out.push(Piece::Lower { b }),
            (true, true) => {
                out.push(Piece::Lower { b: 0.0 });
                out.push(Piece::Upper { a: 0.0 });
            }
        }
    }
    Ok(out)
}

/// Integrate `f` over `[a, b]`; either limit may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralValue, QuadratureError> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Integrate over `[points[0], points.last()]`, splitting at every interior point.
///
/// Points must be non-decreasing; only the first and last may be infinite.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralValue, QuadratureError> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(QuadratureError::InvalidConfig("need at least two integration points".into()));
    }
    if points[1..points.len() - 1].iter().any(|p| !p.is_finite()) {
        return Err(QuadratureError::InvalidLimits { a: points[0], b: points[points.len() - 1] });
    }
    let ps = pieces(points)?;
    if ps.is_empty() {
        return Ok(IntegralValue { value: 0.0, error_bound: 0.0 });
    }
    match cfg.scheme {
        Scheme::Adaptive => adaptive(&f, &ps, cfg),
        Scheme::RiemannAvg => riemann(&f, &ps, cfg),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: usize,
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

fn eval<F: Fn(f64) -> f64>(f: &F, piece: &Piece, t: f64) -> Result<f64, QuadratureError> {
    let (x, jac) = piece.map(t);
    let y = f(x);
    if !y.is_finite() {
        return Err(QuadratureError::NonFinite { at: x });
    }
    let v = y * jac;
    // x*x*f(x) may overflow to inf*0 at the far end of a mapped tail.
    Ok(if v.is_finite() { v } else { 0.0 })
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, piece: &Piece, lo: f64, hi: f64) -> Result<(f64, f64), QuadratureError> {
    let centr = 0.5 * (lo + hi);
    let hlgth = 0.5 * (hi - lo);
    let fc = eval(f, piece, centr)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = hlgth * XGK[jtw];
        let f1 = eval(f, piece, centr - dx)?;
        let f2 = eval(f, piece, centr + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = hlgth * XGK[jtwm1];
        let f1 = eval(f, piece, centr - dx)?;
        let f2 = eval(f, piece, centr + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    let resabs = resabs * hlgth.abs();
    let resasc = resasc * hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, abserr))
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, ps: &[Piece], cfg: &QuadratureConfig) -> Result<IntegralValue, QuadratureError> {
    let mut segs = Vec::with_capacity(ps.len() + cfg.max_refinements as usize);
    for (i, p) in ps.iter().enumerate() {
        let (lo, hi) = p.range();
        let (value, err) = kronrod(f, p, lo, hi)?;
        segs.push(Segment { piece: i, lo, hi, value, err });
    }
    let total = |segs: &[Segment]| {
        let v: f64 = segs.iter().map(|s| s.value).sum();
        let e: f64 = segs.iter().map(|s| s.err).sum();
        IntegralValue { value: v, error_bound: e }
    };
    let mut refinements = 0;
    loop {
        let cur = total(&segs);
        if cur.error_bound <= cfg.abs_tol {
            return Ok(cur);
        }
        if refinements >= cfg.max_refinements {
            return Err(QuadratureError::NotConverged { best: cur });
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, s)| (i, *s))
            .expect("at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(QuadratureError::NotConverged { best: cur });
        }
        let piece = &ps[worst.piece];
        let (v1, e1) = kronrod(f, piece, worst.lo, mid)?;
        let (v2, e2) = kronrod(f, piece, mid, worst.hi)?;
        segs[idx] = Segment { piece: worst.piece, lo: worst.lo, hi: mid, value: v1, err: e1 };
        segs.push(Segment { piece: worst.piece, lo: mid, hi: worst.hi, value: v2, err: e2 });
        refinements += 1;
    }
}

// Smallest mapped coordinate used in place of t = 0 on infinite pieces.
const T_FLOOR: f64 = 1e-12;

fn riemann<F: Fn(f64) -> f64>(f: &F, ps: &[Piece], cfg: &QuadratureConfig) -> Result<IntegralValue, QuadratureError> {
    let mut grids: Vec<Vec<f64>> = Vec::with_capacity(ps.len());
    for p in ps {
        let (lo, hi) = p.range();
        let tl = if matches!(p, Piece::Finite { .. }) { lo } else { lo.max(T_FLOOR) };
        grids.push(vec![eval(f, p, tl)?, eval(f, p, hi)?]);
    }
    let sums = |grids: &[Vec<f64>]| {
        let mut est = IntegralValue { value: 0.0, error_bound: 0.0 };
        for (p, g) in ps.iter().zip(grids) {
            let (lo, hi) = p.range();
            let h = (hi - lo) / (g.len() - 1) as f64;
            let (mut lower, mut upper) = (0.0, 0.0);
            for w in g.windows(2) {
                lower += w[0].min(w[1]);
                upper += w[0].max(w[1]);
            }
            est.value += 0.5 * (lower + upper) * h;
            est.error_bound += 0.5 * (upper - lower) * h;
        }
        est
    };
    let mut level = 0;
    loop {
        let cur = sums(&grids);
        if cur.error_bound <= cfg.abs_tol && level > 0 {
            return Ok(cur);
        }
        if level >= cfg.max_refinements {
            return Err(QuadratureError::NotConverged { best: cur });
        }
        for (p, g) in ps.iter().zip(grids.iter_mut()) {
            let (lo, hi) = p.range();
            let panels = g.len() - 1;
            let h = (hi - lo) / panels as f64;
            let mut next = Vec::with_capacity(2 * panels + 1);
            for (i, w) in g.windows(2).enumerate() {
                next.push(w[0]);
                next.push(eval(f, p, lo + (i as f64 + 0.5) * h)?);
            }
            next.push(g[panels]);
            *g = next;
        }
        level += 1;
    }
}
