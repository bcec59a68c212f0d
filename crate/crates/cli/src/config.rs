use std::f64::consts::PI;
use std::path::Path;

use hsurf::expr::parse;
use hsurf::gaussbonnet::{GbOptions, ParamRegion};
use hsurf::rotsurf::{domain_bound, FamilyProfile, PolarPlane, RotationSurface, RotationSurfaceSpec};
use hsurf::surface::{Cylinder, ExprPatch, FrameOptions, Paraboloid, ParamRect, Plane, SurfacePatch};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

/// Which surface to work on. Expressions use the variables `u` and `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    RotationFamily {
        k_inf: f64,
        r0: f64,
        /// Defaults to the mesh range chosen by the family itself.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_range: Option<[f64; 2]>,
        #[serde(default)]
        c1_shift: f64,
    },
    Graph {
        h: String,
        u: [f64; 2],
        v: [f64; 2],
    },
    Parametric {
        x: String,
        y: String,
        z: String,
        u: [f64; 2],
        v: [f64; 2],
        #[serde(default)]
        periodic_u: bool,
    },
    Plane {
        u: [f64; 2],
        v: [f64; 2],
    },
    /// The plane `z = 0` in polar coordinates: `u` angle, `v` radius.
    PlanePolar {
        radii: [f64; 2],
    },
    Cylinder {
        radius: f64,
        v: [f64; 2],
    },
    Paraboloid {
        k: f64,
        u: [f64; 2],
        v: [f64; 2],
    },
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        SurfaceSpec::Plane { u: [0.0, 2.0], v: [-1.0, 1.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { nu: 16, nv: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub samples_u: usize,
    pub samples_v: usize,
    pub n_curves: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { samples_u: 128, samples_v: 128, n_curves: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance of the characteristic-point test.
    pub char_tol: f64,
    /// Finite-difference step, relative to the parameter extent.
    pub fd_step_rel: f64,
    pub area: f64,
    pub boundary: f64,
    pub transverse: f64,
    /// Largest Gauss–Bonnet residual accepted by `gauss-bonnet`.
    pub threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let f = FrameOptions::<f64>::default();
        let g = GbOptions::<f64>::default();
        Self {
            char_tol: f.char_tol,
            fd_step_rel: f.fd_step_rel,
            area: g.area_tol,
            boundary: g.boundary_tol,
            transverse: g.transverse_tol,
            threshold: 1e-8,
        }
    }
}

/// Integration region; `u` omitted means the full turn (closed in `u`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<[f64; 2]>,
    pub v: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub surface: SurfaceSpec,
    pub grid: Grid,
    pub mesh: MeshConfig,
    /// Values of the metric parameter `L`.
    pub ls: Vec<f64>,
    /// Study point for `converge`; defaults to the centre of the domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    /// Parameter direction of the probe curve in `converge`.
    pub direction: [f64; 2],
    /// Parameter directions for the `k_n` columns of `curvature`.
    pub directions: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
    pub tolerances: Tolerances,
    /// Output file, or file stem for `rotsurf`. Not part of the config hash.
    #[serde(skip_serializing)]
    pub output: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            surface: SurfaceSpec::default(),
            grid: Grid::default(),
            mesh: MeshConfig::default(),
            ls: vec![1e2, 1e3, 1e4, 1e5, 1e6],
            point: None,
            direction: [0.0, 1.0],
            directions: vec![[1.0, 0.0], [0.0, 1.0]],
            region: None,
            tolerances: Tolerances::default(),
            output: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_interval(name: &str, iv: [f64; 2]) -> CliResult<()> {
    if !(iv[0].is_finite() && iv[1].is_finite() && iv[0] < iv[1]) {
        return Err(bad(format!("{name} must be a finite interval [lo, hi] with lo < hi, got {iv:?}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> CliResult<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(bad(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

fn check_count(name: &str, n: usize, lo: usize, hi: usize) -> CliResult<()> {
    if n < lo || n > hi {
        return Err(bad(format!("{name} must lie in [{lo}, {hi}], got {n}")));
    }
    Ok(())
}

const MAX_SAMPLES: usize = 4096;

impl Config {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical JSON of everything that affects results.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Range-checks every field. Domain limits of the rotation families are
    /// left to the numerical layer, which reports them with exit code 2.
    pub fn validate(&self) -> CliResult<()> {
        match &self.surface {
            SurfaceSpec::RotationFamily { k_inf, r0, v_range, c1_shift } => {
                if !k_inf.is_finite() || !c1_shift.is_finite() {
                    return Err(bad("k_inf and c1_shift must be finite"));
                }
                check_positive("r0", *r0)?;
                if let Some(iv) = v_range {
                    check_interval("v_range", *iv)?;
                }
            }
            SurfaceSpec::Graph { h, u, v } => {
                parse(h).map_err(|e| bad(format!("h: {e}")))?;
                check_interval("u", *u)?;
                check_interval("v", *v)?;
            }
            SurfaceSpec::Parametric { x, y, z, u, v, periodic_u } => {
                for (name, e) in [("x", x), ("y", y), ("z", z)] {
                    parse(e).map_err(|err| bad(format!("{name}: {err}")))?;
                }
                if !periodic_u {
                    check_interval("u", *u)?;
                }
                check_interval("v", *v)?;
            }
            SurfaceSpec::Plane { u, v } => {
                check_interval("u", *u)?;
                check_interval("v", *v)?;
            }
            SurfaceSpec::PlanePolar { radii } => {
                check_interval("radii", *radii)?;
                check_positive("inner radius", radii[0])?;
            }
            SurfaceSpec::Cylinder { radius, v } => {
                check_positive("radius", *radius)?;
                check_interval("v", *v)?;
            }
            SurfaceSpec::Paraboloid { k, u, v } => {
                if !k.is_finite() || *k == 0.0 {
                    return Err(bad(format!("paraboloid k must be finite and nonzero, got {k}")));
                }
                check_interval("u", *u)?;
                check_interval("v", *v)?;
            }
        }
        check_count("grid.nu", self.grid.nu, 1, MAX_SAMPLES)?;
        check_count("grid.nv", self.grid.nv, 1, MAX_SAMPLES)?;
        check_count("mesh.samples_u", self.mesh.samples_u, 3, MAX_SAMPLES)?;
        check_count("mesh.samples_v", self.mesh.samples_v, 2, MAX_SAMPLES)?;
        check_count("mesh.n_curves", self.mesh.n_curves, 1, MAX_SAMPLES)?;
        if self.ls.is_empty() {
            return Err(bad("ls must not be empty"));
        }
        for &l in &self.ls {
            check_positive("L", l)?;
        }
        if let Some(p) = self.point {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(bad("point must be finite"));
            }
        }
        for d in std::iter::once(&self.direction).chain(&self.directions) {
            if !(d[0].is_finite() && d[1].is_finite()) || (d[0] == 0.0 && d[1] == 0.0) {
                return Err(bad(format!("direction must be finite and nonzero, got {d:?}")));
            }
        }
        if let Some(r) = &self.region {
            if let Some(u) = r.u {
                check_interval("region.u", u)?;
            }
            if !(r.v[0].is_finite() && r.v[1].is_finite() && r.v[0] <= r.v[1]) {
                return Err(bad(format!("region.v must satisfy lo <= hi, got {:?}", r.v)));
            }
        }
        let t = &self.tolerances;
        for (name, x) in [
            ("char_tol", t.char_tol),
            ("fd_step_rel", t.fd_step_rel),
            ("area", t.area),
            ("boundary", t.boundary),
            ("transverse", t.transverse),
            ("threshold", t.threshold),
        ] {
            check_positive(name, x)?;
        }
        if t.fd_step_rel >= 0.1 {
            return Err(bad("fd_step_rel must be below 0.1"));
        }
        Ok(())
    }

    pub fn frame_options(&self) -> FrameOptions<f64> {
        FrameOptions { char_tol: self.tolerances.char_tol, fd_step_rel: self.tolerances.fd_step_rel }
    }

    pub fn gb_options(&self) -> GbOptions<f64> {
        GbOptions {
            area_tol: self.tolerances.area,
            boundary_tol: self.tolerances.boundary,
            transverse_tol: self.tolerances.transverse,
            ..GbOptions::default()
        }
    }

    /// Mesh parameters for a rotation-family surface; `None` for other surfaces.
    pub fn rotation_spec(&self) -> CliResult<Option<RotationSurfaceSpec<f64>>> {
        let SurfaceSpec::RotationFamily { k_inf, r0, v_range, c1_shift } = self.surface else {
            return Ok(None);
        };
        let mut spec = RotationSurfaceSpec::new(k_inf, r0)?;
        if let Some([a, b]) = v_range {
            spec.v_range = (a, b);
        }
        spec.c1_shift = c1_shift;
        spec.samples_u = self.mesh.samples_u;
        spec.samples_v = self.mesh.samples_v;
        spec.n_curves = self.mesh.n_curves;
        spec.validate()?;
        Ok(Some(spec))
    }

    pub fn surface(&self) -> CliResult<Box<dyn SurfacePatch<f64>>> {
        let rect = |u: [f64; 2], v: [f64; 2]| ParamRect::new((u[0], u[1]), (v[0], v[1]));
        Ok(match &self.surface {
            SurfaceSpec::RotationFamily { .. } => {
                let spec = self.rotation_spec()?.expect("rotation family");
                let profile: FamilyProfile<f64> = spec.profile()?;
                Box::new(RotationSurface::new(profile))
            }
            SurfaceSpec::Graph { h, u, v } => Box::new(ExprPatch::graph(parse(h).map_err(|e| bad(e.to_string()))?, rect(*u, *v))),
            SurfaceSpec::Parametric { x, y, z, u, v, periodic_u } => {
                let p = |s: &str| parse(s).map_err(|e| bad(e.to_string()));
                let r = if *periodic_u { ParamRect::periodic((v[0], v[1])) } else { rect(*u, *v) };
                Box::new(ExprPatch::parametric(p(x)?, p(y)?, p(z)?, r))
            }
            SurfaceSpec::Plane { u, v } => Box::new(Plane::new((u[0], u[1]), (v[0], v[1]))),
            SurfaceSpec::PlanePolar { radii } => Box::new(RotationSurface::new(PolarPlane { radii: (radii[0], radii[1]) })),
            SurfaceSpec::Cylinder { radius, v } => Box::new(Cylinder::new(*radius, (v[0], v[1]))),
            SurfaceSpec::Paraboloid { k, u, v } => Box::new(Paraboloid::new(*k, (u[0], u[1]), (v[0], v[1]))),
        })
    }

    /// The configured region, or the whole parameter domain.
    pub fn region(&self, s: &dyn SurfacePatch<f64>) -> ParamRegion<f64> {
        let d = s.domain();
        match self.region {
            Some(RegionConfig { u: Some(u), v }) => ParamRegion::rect((u[0], u[1]), (v[0], v[1])),
            Some(RegionConfig { u: None, v }) => ParamRegion::band((v[0], v[1])),
            None if d.periodic_u => ParamRegion::band(d.v),
            None => ParamRegion::rect(d.u, d.v),
        }
    }

    /// Study point for `converge`.
    pub fn study_point(&self, s: &dyn SurfacePatch<f64>) -> (f64, f64) {
        match self.point {
            Some([u, v]) => (u, v),
            None => {
                let d = s.domain();
                (0.5 * (d.u.0 + d.u.1), 0.5 * (d.v.0 + d.v.1))
            }
        }
    }
}

/// Named starting points for a config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Plane,
    Cylinder,
    Paraboloid,
    /// Plane annulus between radii 1 and 2, swept in polar coordinates.
    PlaneAnnulus,
    /// `K^∞ = 1`, `r0 = 1`.
    FamilyPositive,
    /// `K^∞ = 0`, `r0 = 1`.
    FamilyFlat,
    /// `K^∞ = −1`, `r0 = 1`.
    FamilyNegative,
}

impl Preset {
    pub fn surface(self) -> SurfaceSpec {
        let family = |k_inf| SurfaceSpec::RotationFamily { k_inf, r0: 1.0, v_range: None, c1_shift: 0.0 };
        match self {
            Preset::Plane => SurfaceSpec::default(),
            Preset::Cylinder => SurfaceSpec::Cylinder { radius: 1.0, v: [-1.0, 1.0] },
            Preset::Paraboloid => SurfaceSpec::Paraboloid { k: 0.5, u: [0.5, 1.5], v: [0.5, 1.5] },
            Preset::PlaneAnnulus => SurfaceSpec::PlanePolar { radii: [1.0, 2.0] },
            Preset::FamilyPositive => family(1.0),
            Preset::FamilyFlat => family(0.0),
            Preset::FamilyNegative => family(-1.0),
        }
    }

    pub fn figure(n: u8) -> CliResult<Preset> {
        match n {
            1 => Ok(Preset::FamilyPositive),
            2 => Ok(Preset::FamilyFlat),
            3 => Ok(Preset::FamilyNegative),
            _ => Err(bad(format!("figure must be 1, 2 or 3, got {n}"))),
        }
    }
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Output file (or file stem for `rotsurf`); stdout when omitted.
    #[arg(long, short)]
    pub out: Option<String>,
    /// Built-in surface, replacing the config surface.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Rotation-family preset of the figures: 1, 2 or 3.
    #[arg(long)]
    pub figure: Option<u8>,
    /// Prescribed K^∞ of a rotation family.
    #[arg(long, allow_hyphen_values = true)]
    pub kinf: Option<f64>,
    /// Radius at the anchor of a rotation family.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Profile parameter range of a rotation family.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub v_range: Option<Vec<f64>>,
    /// Shift of the profile parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub c1_shift: Option<f64>,
    /// Grid points in u for `curvature` and `frames`.
    #[arg(long)]
    pub nu: Option<usize>,
    /// Grid points in v.
    #[arg(long)]
    pub nv: Option<usize>,
    /// Mesh samples around the axis.
    #[arg(long)]
    pub samples_u: Option<usize>,
    /// Mesh samples along the profile.
    #[arg(long)]
    pub samples_v: Option<usize>,
    /// Horizontal curves exported by `rotsurf`, the generating curve included.
    #[arg(long)]
    pub n_curves: Option<usize>,
    /// Comma-separated list of L values.
    #[arg(long = "l", value_delimiter = ',')]
    pub ls: Option<Vec<f64>>,
    /// Study point of `converge`; domain centre when omitted.
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Parameter direction of the probe curve for normal curvature.
    #[arg(long, num_args = 2, value_names = ["DU", "DV"], allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
    /// Band `lo hi` in v, closed in u.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub band: Option<Vec<f64>>,
    /// Gauss–Bonnet pass threshold on residual plus error estimates.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Relative e³ component of f_u and f_v below which a point counts as characteristic.
    #[arg(long)]
    pub char_tol: Option<f64>,
}

fn pair(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

impl Overrides {
    /// Loads the config file (or defaults), applies every override and validates.
    pub fn resolve(&self) -> CliResult<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(p) = self.preset {
            c.surface = p.surface();
        }
        if let Some(n) = self.figure {
            c.surface = Preset::figure(n)?.surface();
        }
        if self.kinf.is_some() || self.r0.is_some() || self.v_range.is_some() || self.c1_shift.is_some() {
            let (mut k, mut r, mut vr, mut sh) = match c.surface {
                SurfaceSpec::RotationFamily { k_inf, r0, v_range, c1_shift } => (Some(k_inf), r0, v_range, c1_shift),
                _ => (None, 1.0, None, 0.0),
            };
            k = self.kinf.or(k);
            r = self.r0.unwrap_or(r);
            vr = self.v_range.as_deref().map(pair).or(vr);
            sh = self.c1_shift.unwrap_or(sh);
            let k_inf = k.ok_or_else(|| bad("--r0, --v-range and --c1-shift need a rotation family (--kinf or --figure)"))?;
            c.surface = SurfaceSpec::RotationFamily { k_inf, r0: r, v_range: vr, c1_shift: sh };
        }
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.grid.nu, self.nu);
        set(&mut c.grid.nv, self.nv);
        set(&mut c.mesh.samples_u, self.samples_u);
        set(&mut c.mesh.samples_v, self.samples_v);
        set(&mut c.mesh.n_curves, self.n_curves);
        if let Some(ls) = &self.ls {
            c.ls = ls.clone();
        }
        if let Some(p) = &self.point {
            c.point = Some(pair(p));
        }
        if let Some(d) = &self.direction {
            c.direction = pair(d);
        }
        if let Some(b) = &self.band {
            c.region = Some(RegionConfig { u: None, v: pair(b) });
        }
        if let Some(t) = self.threshold {
            c.tolerances.threshold = t;
        }
        if let Some(t) = self.char_tol {
            c.tolerances.char_tol = t;
        }
        if let Some(o) = &self.out {
            c.output = Some(o.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

/// Existence domain of a rotation family, for messages.
pub fn family_bound(k_inf: f64, r0: f64) -> CliResult<(f64, f64)> {
    let d = domain_bound(k_inf, r0)?;
    Ok((d.lo, d.hi))
}

pub(crate) const TWO_PI: f64 = 2.0 * PI;
