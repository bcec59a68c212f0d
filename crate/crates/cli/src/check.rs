//! The built-in identity suite behind `hsurf check`.

use hsurf::curvature::{k_diniz_veloso, k_inf};
use hsurf::gaussbonnet::stokes_density_check;
use hsurf::hgroup::{bracket_coeff, connection_coeff, frame_at, group_mul, riemann_component, MetricParam, Point};
use hsurf::rotsurf::{FamilyProfile, RotationSurface, RotationSurfaceSpec};
use hsurf::surface::{adapted_frame, frame_derivatives_fd, Cylinder, FrameOptions, Paraboloid, Plane, SurfacePatch};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub const SEED: u64 = 0x4845_4953;
const METRICS: [f64; 3] = [1.0, 10.0, 100.0];

fn ml(l: f64) -> MetricParam<f64> {
    MetricParam::new(l).expect("positive L")
}

pub fn group_axioms() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut q = || Rational64::new(rng.gen_range(-50..=50), rng.gen_range(1..=12));
    let mut bad = 0;
    for _ in 0..200 {
        let [p, r, s] = [(); 3].map(|_| Point::new(q(), q(), q()));
        let assoc = group_mul(&group_mul(&p, &r), &s) == group_mul(&p, &group_mul(&r, &s));
        let unit = group_mul(&p, &Point::identity()) == p && group_mul(&Point::identity(), &p) == p;
        let inv = group_mul(&p, &p.inverse()) == Point::identity() && group_mul(&p.inverse(), &p) == Point::identity();
        if !(assoc && unit && inv) {
            bad += 1;
        }
    }
    CheckResult::new("group axioms (exact, 200 rational triples)", bad == 0, format!("{bad} violations"))
}

/// `[e_i, e_j]` of the coordinate fields by central differences.
fn coordinate_bracket(i: usize, j: usize, p: [f64; 3]) -> [f64; 3] {
    let h = 1e-3;
    let field = |k: usize, q: [f64; 3]| frame_at(&Point::new(q[0], q[1], q[2]))[k];
    let along = |k: usize, dir: [f64; 3]| {
        let plus = field(k, [0, 1, 2].map(|n| p[n] + h * dir[n]));
        let minus = field(k, [0, 1, 2].map(|n| p[n] - h * dir[n]));
        [0, 1, 2].map(|n| (plus[n] - minus[n]) / (2.0 * h))
    };
    let (xi, xj) = (field(i, p), field(j, p));
    let (a, b) = (along(j, xi), along(i, xj));
    [0, 1, 2].map(|n| a[n] - b[n])
}

pub fn frame_brackets() -> CheckResult {
    let mut worst = 0.0f64;
    for p in [[0.3, -1.2, 4.0], [2.0, 0.5, -1.0], [-3.0, 3.0, 0.0]] {
        for i in 0..3 {
            for j in 0..3 {
                let got = coordinate_bracket(i, j, p);
                let want = match (i, j) {
                    (0, 1) => [0.0, 0.0, 1.0],
                    (1, 0) => [0.0, 0.0, -1.0],
                    _ => [0.0; 3],
                };
                for n in 0..3 {
                    worst = worst.max((got[n] - want[n]).abs());
                }
            }
        }
    }
    CheckResult::new("frame brackets [e1,e2] = e3 from coordinates", worst <= 1e-10, format!("max error {worst:.3e}"))
}

/// Connection table against the Koszul formula built from the bracket table,
/// plus torsion-freeness and metric compatibility.
pub fn connection_table() -> [CheckResult; 3] {
    let (mut koszul, mut torsion, mut metric) = (0.0f64, 0.0f64, 0.0f64);
    for lv in METRICS {
        let l = ml(lv);
        let conn = |i, j| connection_coeff(l, i, j).expect("index").0;
        let br = |i, j| bracket_coeff(l, i, j).expect("index").0;
        for i in 1..=3 {
            for j in 1..=3 {
                let nabla = conn(i, j);
                let (nabla_ji, bij) = (conn(j, i), br(i, j));
                for k in 1..=3 {
                    let want = 0.5 * (br(i, j)[k - 1] - br(j, k)[i - 1] + br(k, i)[j - 1]);
                    koszul = koszul.max((nabla[k - 1] - want).abs());
                    torsion = torsion.max((nabla[k - 1] - nabla_ji[k - 1] - bij[k - 1]).abs());
                    metric = metric.max((nabla[k - 1] + conn(i, k)[j - 1]).abs());
                }
            }
        }
    }
    [
        CheckResult::new("connection table equals Koszul formula", koszul <= 1e-12, format!("max error {koszul:.3e}")),
        CheckResult::new("connection is torsion-free", torsion <= 1e-12, format!("max error {torsion:.3e}")),
        CheckResult::new("connection is metric", metric <= 1e-12, format!("max error {metric:.3e}")),
    ]
}

/// Expected `R_{ijkm}` of `g_L` in the orthonormal frame.
pub fn tensor_oracle(l: f64, i: usize, j: usize, k: usize, m: usize) -> f64 {
    let sectional = |a: usize, b: usize| match (a.min(b), a.max(b)) {
        (1, 2) => 0.75 * l,
        _ => -0.25 * l,
    };
    if i == j || k == m {
        0.0
    } else if (i, j) == (k, m) {
        sectional(i, j)
    } else if (i, j) == (m, k) {
        -sectional(i, j)
    } else {
        0.0
    }
}

/// Largest relative error on the table entries and largest absolute value
/// off the table, over all 81 components.
pub fn tensor_table_errors(l: f64) -> (f64, f64) {
    let (mut rel, mut off) = (0.0f64, 0.0f64);
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                for m in 1..=3 {
                    let got = riemann_component(ml(l), i, j, k, m).expect("index");
                    let want = tensor_oracle(l, i, j, k, m);
                    if want == 0.0 {
                        off = off.max(got.abs());
                    } else {
                        rel = rel.max(((got - want) / want).abs());
                    }
                }
            }
        }
    }
    (rel, off)
}

pub fn tensor_table() -> CheckResult {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in METRICS {
        let (rel, off) = tensor_table_errors(l);
        ok &= rel <= 1e-12 && off <= 1e-12;
        let ratio = riemann_component(ml(l), 1, 2, 1, 2).expect("index") / l;
        parts.push(format!("L={l}: R1212/L={ratio}, rel {rel:.1e}, off {off:.1e}"));
    }
    CheckResult::new("curvature tensor table", ok, parts.join("; "))
}

/// Named surface with the `(u, v)` box sampled on it.
pub type SweepSurface = (String, Box<dyn SurfacePatch<f64>>, (f64, f64), (f64, f64));

/// Surfaces of the identity sweep with the parameter boxes sampled on each.
pub fn sweep_surfaces() -> CliResult<Vec<SweepSurface>> {
    let mut out: Vec<SweepSurface> = vec![
        ("plane".into(), Box::new(Plane::new((0.2, 2.2), (-1.0, 1.0))), (0.5, 2.0), (-0.8, 0.8)),
        ("cylinder".into(), Box::new(Cylinder::new(1.5, (-1.0, 1.0))), (0.0, crate::config::TWO_PI), (-0.8, 0.8)),
        ("paraboloid".into(), Box::new(Paraboloid::new(0.5, (0.2, 1.8), (0.2, 1.8))), (0.4, 1.6), (0.4, 1.6)),
    ];
    for n in 1..=3u8 {
        let spec = RotationSurfaceSpec::<f64>::figure(n)?;
        let (v0, v1) = spec.v_range;
        let profile: FamilyProfile<f64> = FamilyProfile::new(spec.family()?, spec.v_range, 64)?;
        let box_v = (v0 + 0.05 * (v1 - v0), v1 - 0.05 * (v1 - v0));
        out.push((format!("family K={}", spec.k_inf), Box::new(RotationSurface::new(profile)), (0.0, crate::config::TWO_PI), box_v));
    }
    Ok(out)
}

/// `dα(f3) + dA(f2) + A²` by finite differences at `per_surface` random
/// points of each sweep surface. Returns the number of points and the worst
/// defect.
pub fn structure_identity_sweep(per_surface: usize, seed: u64) -> CliResult<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = FrameOptions::default();
    let (mut count, mut worst) = (0, 0.0f64);
    for (_, s, bu, bv) in sweep_surfaces()? {
        for _ in 0..per_surface {
            let (u, v) = (rng.gen_range(bu.0..bu.1), rng.gen_range(bv.0..bv.1));
            let f = adapted_frame(&s, u, v)?;
            let fd = frame_derivatives_fd(&s, u, v, &opts)?;
            worst = worst.max(fd.structure_defect(f.a).abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

pub fn structure_identity() -> CheckResult {
    match structure_identity_sweep(100, SEED) {
        Ok((n, worst)) => CheckResult::new("dα(f3) + dA(f2) + A² = 0", n >= 500 && worst <= 1e-6, format!("{n} points, max defect {worst:.3e}")),
        Err(e) => CheckResult::new("dα(f3) + dA(f2) + A² = 0", false, e.to_string()),
    }
}

/// The density identity `d(A f³) = (dA(f2) + A²) f²∧f³` on small squares:
/// the gap between the two midpoint rules must shrink like `h⁴`.
pub fn stokes_density() -> CheckResult {
    let plane = Plane::new((-3.0, 3.0), (-3.0, 3.0));
    let par = Paraboloid::new(0.5, (0.2, 1.8), (0.2, 1.8));
    let cases: [(&str, &dyn SurfacePatch<f64>, f64, f64); 2] = [("plane", &plane, 1.0, 0.2), ("paraboloid", &par, 0.7, 1.1)];
    let mut worst_order = f64::INFINITY;
    let mut parts = Vec::new();
    for (name, s, u, v) in cases {
        let gap = |h: f64| stokes_density_check(s, u, v, h).map(|(l, r)| (l - r).abs());
        match (gap(2e-2), gap(1e-2)) {
            (Ok(g1), Ok(g2)) => {
                let order = (g1 / g2).log2();
                worst_order = worst_order.min(order);
                parts.push(format!("{name}: order {order:.2}"));
            }
            (Err(e), _) | (_, Err(e)) => return CheckResult::new("Stokes density identity", false, e.to_string()),
        }
    }
    CheckResult::new("Stokes density identity", worst_order >= 3.5, parts.join(", "))
}

/// On the plane at `(1, 0, 0)`: `K^∞ = −2` and `K = 4`.
pub fn plane_discrepancy() -> CheckResult {
    let plane = Plane::<f64>::new((0.0, 2.0), (-1.0, 1.0));
    let res = adapted_frame(&plane, 1.0, 0.0).and_then(|f| {
        let fd = frame_derivatives_fd(&plane, 1.0, 0.0, &FrameOptions::default())?;
        Ok((k_inf(&fd, f.a), k_diniz_veloso(&fd)))
    });
    match res {
        Ok((ki, kdv)) => CheckResult::new(
            "plane at (1,0,0): K^∞ = -2, K = 4",
            (ki + 2.0).abs() <= 1e-6 && (kdv - 4.0).abs() <= 1e-5,
            format!("K^∞ = {ki}, K = {kdv}"),
        ),
        Err(e) => CheckResult::new("plane at (1,0,0): K^∞ = -2, K = 4", false, e.to_string()),
    }
}

pub fn run_suite() -> Vec<CheckResult> {
    let mut out = vec![group_axioms(), frame_brackets()];
    out.extend(connection_table());
    out.extend([tensor_table(), structure_identity(), stokes_density(), plane_discrepancy()]);
    out
}
