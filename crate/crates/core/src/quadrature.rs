//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below the requested tolerance. Integrands are fallible so
//! geometric failures (characteristic points, domain violations) propagate
//! out of the integral unchanged.

use crate::error::{GeomError, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> QuadOptions<T> {
    pub fn absolute(abs_tol: T) -> Self {
        Self { abs_tol, rel_tol: T::zero(), max_intervals: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod21<T: Real, F>(f: &mut F, a: T, b: T) -> Result<(T, T)>
where
    F: FnMut(T) -> Result<T>,
{
    let center = T::half() * (a + b);
    let half = T::half() * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut resabs = fc.abs() * T::lit(WGK[10]);
    for k in 0..10 {
        let dx = half * T::lit(XGK[k]);
        let (f1, f2) = (f(center - dx)?, f(center + dx)?);
        kronrod += T::lit(WGK[k]) * (f1 + f2);
        resabs += T::lit(WGK[k]) * (f1.abs() + f2.abs());
        if k % 2 == 1 {
            gauss += T::lit(WG[k / 2]) * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let roundoff = T::lit(50.0) * T::epsilon() * resabs * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(roundoff);
    Ok((value, error))
}

/// `∫_a^b f` to within `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: Real, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<QuadResult<T>>
where
    F: FnMut(T) -> Result<T>,
{
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let (value, error) = kronrod21(&mut f, a, b)?;
    let mut segments = vec![Segment { a, b, value, error }];
    let mut evaluations = 21;
    loop {
        let total: T = segments.iter().map(|s| s.value).sum();
        let err: T = segments.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if segments.len() >= opts.max_intervals {
            return Err(GeomError::QuadratureNonConvergence { estimate: err.as_f64(), tol: target.as_f64() });
        }
        let worst = segments.iter().enumerate().fold((0, T::neg_infinity()), |best, (i, s)| if s.error > best.1 { (i, s.error) } else { best }).0;
        let seg = segments.swap_remove(worst);
        let mid = T::half() * (seg.a + seg.b);
        if mid == seg.a || mid == seg.b {
            return Err(GeomError::QuadratureNonConvergence { estimate: err.as_f64(), tol: target.as_f64() });
        }
        let (v1, e1) = kronrod21(&mut f, seg.a, mid)?;
        let (v2, e2) = kronrod21(&mut f, mid, seg.b)?;
        evaluations += 42;
        segments.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        segments.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
}

/// `∫_{v0}^{v1} ∫_{u0}^{u1} f(u, v) du dv` by nesting the 1D rule.
pub fn integrate_2d<T: Real, F>(mut f: F, u: (T, T), v: (T, T), abs_tol: T) -> Result<QuadResult<T>>
where
    F: FnMut(T, T) -> Result<T>,
{
    let v_len = (v.1 - v.0).abs();
    if v_len == T::zero() || u.0 == u.1 {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let inner_tol = T::half() * abs_tol / v_len;
    let mut inner_err = T::zero();
    let mut evaluations = 0;
    let outer = integrate(
        |vv| {
            let r = integrate(|uu| f(uu, vv), u.0, u.1, QuadOptions::absolute(inner_tol))?;
            inner_err = inner_err.max(r.error);
            evaluations += r.evaluations;
            Ok(r.value)
        },
        v.0,
        v.1,
        QuadOptions::absolute(T::half() * abs_tol),
    )?;
    Ok(QuadResult { value: outer.value, error: outer.error + inner_err * v_len, evaluations })
}

/// Fixed `n`-point Gauss–Legendre rule on `[a, b]`, `n ∈ {1, 2, 3}`.
pub fn gauss_legendre<T: Real, F>(mut f: F, a: T, b: T, n: usize) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let (nodes, weights): (&[f64], &[f64]) = match n {
        1 => (&[0.0], &[2.0]),
        2 => (&[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], &[1.0, 1.0]),
        3 => (&[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4], &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]),
        _ => return Err(GeomError::InvalidParameter(format!("unsupported Gauss-Legendre order {n}"))),
    };
    let (c, h) = (T::half() * (a + b), T::half() * (b - a));
    let mut sum = T::zero();
    for (x, w) in nodes.iter().zip(weights) {
        sum += T::lit(*w) * f(c + h * T::lit(*x))?;
    }
    Ok(sum * h)
}
