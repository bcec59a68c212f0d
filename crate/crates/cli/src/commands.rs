use std::path::PathBuf;

use hsurf::curvature::{k_diniz_veloso, k_inf, k_l, k_n};
use hsurf::gaussbonnet::{convergence_study, gb_residual};
use hsurf::hgroup::MetricParam;
use hsurf::rotsurf::{build_mesh, horizontality_defect};
use hsurf::surface::{adapted_frame_with, frame_derivatives_fd, AdaptedFrameSample, FrameDerivatives, SurfacePatch};
use hsurf::GeomError;
use serde_json::json;

use crate::config::TWO_PI;
use crate::output::{emit, header, mesh_obj, num, profile_csv, Csv};
use crate::{check, CliError, CliResult, Config, VERSION};

/// Files produced by a command, and the verdict to report after they are written.
#[derive(Debug)]
pub struct Outcome {
    /// `(path, contents)`; no path means stdout.
    pub files: Vec<(Option<PathBuf>, String)>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn single(config: &Config, text: String) -> Self {
        Self { files: vec![(config.output.as_ref().map(PathBuf::from), text)], failure: None }
    }

    /// Writes every file in order, then returns the deferred failure, if any.
    pub fn write(self) -> CliResult<()> {
        for (path, text) in &self.files {
            emit(path.as_deref(), text)?;
        }
        match self.failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn metric(l: f64) -> CliResult<MetricParam<f64>> {
    Ok(MetricParam::new(l)?)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Grid of the configured surface, row-major in `v`. Periodic directions
/// are sampled without repeating the seam.
fn grid(config: &Config, s: &dyn SurfacePatch<f64>) -> Vec<(f64, f64)> {
    let d = s.domain();
    let us = if d.periodic_u {
        (0..config.grid.nu).map(|i| TWO_PI * i as f64 / config.grid.nu as f64).collect()
    } else {
        linspace(d.u.0, d.u.1, config.grid.nu)
    };
    let vs = linspace(d.v.0, d.v.1, config.grid.nv);
    vs.iter().flat_map(|&v| us.iter().map(move |&u| (u, v))).collect()
}

/// Frame and its derivatives at a grid point; `None` at characteristic or
/// degenerate points.
fn sample(config: &Config, s: &dyn SurfacePatch<f64>, u: f64, v: f64) -> CliResult<Option<(AdaptedFrameSample<f64>, FrameDerivatives<f64>)>> {
    let opts = config.frame_options();
    let res = adapted_frame_with(s, u, v, &opts).and_then(|f| {
        let fd = match s.closed_form_derivatives(u, v) {
            Some(r) => r?,
            None => frame_derivatives_fd(s, u, v, &opts)?,
        };
        Ok((f, fd))
    });
    match res {
        Ok(x) => Ok(Some(x)),
        Err(GeomError::CharacteristicPoint { .. } | GeomError::DegenerateParametrization { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn direction_label(d: [f64; 2]) -> String {
    format!("k_n[{} {}]", d[0], d[1])
}

fn all_flagged(flagged: usize, total: usize) -> CliResult<()> {
    if flagged == total {
        return Err(GeomError::InvalidParameter(format!("all {total} grid points are characteristic or degenerate")).into());
    }
    Ok(())
}

pub fn curvature(config: &Config) -> CliResult<Outcome> {
    let s = config.surface()?;
    let ls = config.ls.iter().map(|&l| metric(l)).collect::<CliResult<Vec<_>>>()?;
    let mut cols: Vec<String> = ["u", "v", "x", "y", "z", "alpha", "A", "K_inf", "K_dv"].map(String::from).to_vec();
    cols.extend(config.ls.iter().map(|l| format!("K_L(L={l})")));
    cols.extend(config.directions.iter().map(|&d| direction_label(d)));
    cols.push("status".into());
    let mut csv = Csv::new(&header("curvature", config), &cols);
    let points = grid(config, s.as_ref());
    let mut flagged = 0;
    for &(u, v) in &points {
        let mut row = vec![num(u), num(v)];
        match sample(config, s.as_ref(), u, v)? {
            Some((f, fd)) => {
                let p = f.point;
                row.extend([p.x, p.y, p.z, f.alpha, f.a, k_inf(&fd, f.a), k_diniz_veloso(&fd)].map(num));
                row.extend(ls.iter().map(|&l| num(k_l(&fd, f.a, l))));
                for d in &config.directions {
                    let w = f.fu.scale(d[0]).add(&f.fv.scale(d[1]));
                    let (_, b) = f.tangent_components(&w);
                    let transverse = b.abs() > config.tolerances.transverse * w.max_abs();
                    row.push(if transverse { num(k_n(f.a, b)?) } else { "NaN".into() });
                }
                row.push("ok".into());
            }
            None => {
                flagged += 1;
                row.extend(std::iter::repeat_n("NaN".to_string(), cols.len() - 3));
                row.push("characteristic".into());
            }
        }
        csv.row(&row);
    }
    all_flagged(flagged, points.len())?;
    Ok(Outcome::single(config, csv.finish()))
}

pub fn frames(config: &Config) -> CliResult<Outcome> {
    let s = config.surface()?;
    let cols: Vec<String> = [
        "u", "v", "x", "y", "z", "alpha", "A", "f1_1", "f1_2", "f1_3", "f2_1", "f2_2", "f2_3", "f3_1", "f3_2", "f3_3", "f2_u", "f2_v", "f3_u",
        "f3_v", "density", "status",
    ]
    .map(String::from)
    .to_vec();
    let mut csv = Csv::new(&header("frames", config), &cols);
    let opts = config.frame_options();
    let points = grid(config, s.as_ref());
    let mut flagged = 0;
    for &(u, v) in &points {
        let mut row = vec![num(u), num(v)];
        match adapted_frame_with(s.as_ref(), u, v, &opts) {
            Ok(f) => {
                row.extend([f.point.x, f.point.y, f.point.z, f.alpha, f.a].map(num));
                for w in [f.f1, f.f2, f.f3] {
                    row.extend(w.c.map(num));
                }
                row.extend(f.f2_param.map(num));
                row.extend(f.f3_param.map(num));
                row.push(num(f.density));
                row.push("ok".into());
            }
            Err(GeomError::CharacteristicPoint { .. } | GeomError::DegenerateParametrization { .. }) => {
                flagged += 1;
                row.extend(std::iter::repeat_n("NaN".to_string(), cols.len() - 3));
                row.push("characteristic".into());
            }
            Err(e) => return Err(e.into()),
        }
        csv.row(&row);
    }
    all_flagged(flagged, points.len())?;
    Ok(Outcome::single(config, csv.finish()))
}

pub fn rotsurf(config: &Config) -> CliResult<Outcome> {
    let spec =
        config.rotation_spec()?.ok_or_else(|| CliError::Config("rotsurf needs a rotation_family surface (--figure, --kinf or config)".into()))?;
    let stem =
        config.output.as_ref().ok_or_else(|| CliError::Config("rotsurf needs --out <stem>; it writes <stem>.obj and <stem>_profile.csv".into()))?;
    let mesh = build_mesh(&spec)?;
    let profile = spec.profile()?;
    let mut horiz = 0.0f64;
    for p in &mesh.polylines {
        horiz = horiz.max(horizontality_defect(&profile, p, 1e-5)?);
    }
    let head = header("rotsurf", config);
    let mut obj = mesh_obj(&head, &mesh);
    obj.push_str(&format!(
        "# K_inf {} r0 {} v_range {} {}\n# max horizontality defect {}\n# max rotation defect {}\n",
        num(spec.k_inf),
        num(spec.r0),
        num(spec.v_range.0),
        num(spec.v_range.1),
        num(horiz),
        num(mesh.rotation_defect())
    ));
    Ok(Outcome {
        files: vec![
            (Some(PathBuf::from(format!("{stem}.obj"))), obj),
            (Some(PathBuf::from(format!("{stem}_profile.csv"))), profile_csv(&head, &mesh)),
        ],
        failure: None,
    })
}

pub fn gauss_bonnet(config: &Config) -> CliResult<Outcome> {
    let s = config.surface()?;
    let region = config.region(s.as_ref());
    let rep = gb_residual(s.as_ref(), &region, &config.gb_options())?;
    let threshold = config.tolerances.threshold;
    // the residual only certifies a bound once the quadrature error estimates are added
    let bound = rep.residual.abs() + rep.area_error + rep.boundary_error;
    let pass = bound.is_finite() && bound <= threshold;
    let doc = json!({
        "tool": "hsurf",
        "version": VERSION,
        "command": "gauss-bonnet",
        "config_sha256": config.hash(),
        "surface": config.surface,
        "region": { "u": [region.u.0, region.u.1], "v": [region.v.0, region.v.1], "closed_in_u": region.closed_in_u },
        "area_integral": rep.area_integral,
        "boundary_integral": rep.boundary_integral,
        "residual": rep.residual,
        "residual_bound": bound,
        "area_error": rep.area_error,
        "boundary_error": rep.boundary_error,
        "threshold": threshold,
        "pass": pass,
    });
    let mut out = Outcome::single(config, serde_json::to_string_pretty(&doc).expect("json") + "\n");
    if !pass {
        out.failure = Some(CliError::Threshold(format!("|residual| + error estimates = {bound:e} exceeds threshold {threshold:e}")));
    }
    Ok(out)
}

pub fn converge(config: &Config) -> CliResult<Outcome> {
    if config.ls.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("converge needs a strictly ascending L list".into()));
    }
    let s = config.surface()?;
    let ls = config.ls.iter().map(|&l| metric(l)).collect::<CliResult<Vec<_>>>()?;
    let point = config.study_point(s.as_ref());
    let dir = (config.direction[0], config.direction[1]);
    let region = config.region.map(|_| config.region(s.as_ref()));
    let t = convergence_study(s.as_ref(), point, dir, &ls, region.as_ref())?;
    let mut cols: Vec<String> = [
        "L",
        "K_L",
        "abs_K_L_minus_K_inf",
        "area_density_L",
        "K_L_area_density",
        "K_L_area_density_rescaled",
        "abs_rescaled_minus_K_inf",
        "k_n_L",
        "abs_k_n_L_minus_k_n",
    ]
    .map(String::from)
    .to_vec();
    if region.is_some() {
        cols.push("finite_L_sum".into());
    }
    let mut csv = Csv::new(&header("converge", config), &cols);
    csv.comment(&format!("point u={} v={} A={} K_inf={} k_n={}", num(t.point.0), num(t.point.1), num(t.big_a), num(t.k_inf), num(t.k_n)));
    for r in &t.rows {
        let mut row = [r.l, r.k_l, r.k_l_gap, r.sigma_l, r.unrescaled, r.rescaled, r.rescaled_gap, r.k_n_l, r.k_n_gap].map(num).to_vec();
        if let Some(x) = r.finite_l_sum {
            row.push(num(x));
        }
        csv.row(&row);
    }
    let slope = |x: Option<f64>| x.map_or_else(|| "zero".to_string(), num);
    let sl = &t.slopes;
    csv.comment(&format!(
        "slopes abs_K_L_minus_K_inf={} area_density_L={} K_L_area_density={} abs_rescaled_minus_K_inf={} abs_k_n_L_minus_k_n={}",
        slope(sl.k_l_gap),
        slope(sl.sigma_l),
        slope(sl.unrescaled),
        slope(sl.rescaled_gap),
        slope(sl.k_n_gap)
    ));
    Ok(Outcome::single(config, csv.finish()))
}

pub fn check(config: &Config) -> CliResult<Outcome> {
    let results = check::run_suite();
    let mut text = header("check", config) + "\n";
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    text.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
    let mut out = Outcome::single(config, text);
    if failed > 0 {
        out.failure = Some(CliError::Threshold(format!("{failed} identities failed")));
    }
    Ok(out)
}
