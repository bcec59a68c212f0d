use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use hsurf::rotsurf::Mesh;

use crate::{CliResult, Config, VERSION};

/// First line of every text output.
pub fn header(command: &str, config: &Config) -> String {
    format!("# hsurf {VERSION} {command} config-sha256={}", config.hash())
}

/// A double with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header comment and column names.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &str, columns: &[String]) -> Self {
        let mut text = String::new();
        writeln!(text, "{header}").unwrap();
        writeln!(text, "{}", columns.join(",")).unwrap();
        Self { text, width: columns.len() }
    }

    /// Appends a row; cells are written verbatim.
    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.width, "row width");
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn comment(&mut self, line: &str) {
        writeln!(self.text, "# {line}").unwrap();
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Mesh as OBJ: grid vertices, triangles, then each horizontal curve as its
/// own vertex run joined by one `l` element.
pub fn mesh_obj(header: &str, mesh: &Mesh<f64>) -> String {
    let mut s = String::new();
    writeln!(s, "{header}").unwrap();
    writeln!(s, "# grid {} x {} (u x v), {} horizontal curves", mesh.nu, mesh.nv, mesh.polylines.len()).unwrap();
    writeln!(s, "o surface").unwrap();
    for p in &mesh.vertices {
        writeln!(s, "v {} {} {}", num(p[0]), num(p[1]), num(p[2])).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    let mut next = mesh.vertices.len() + 1;
    for (k, poly) in mesh.polylines.iter().enumerate() {
        writeln!(s, "o horizontal_{k}").unwrap();
        writeln!(s, "# rotation angle {}", num(poly.angle)).unwrap();
        for p in &poly.points {
            writeln!(s, "v {} {} {}", num(p[0]), num(p[1]), num(p[2])).unwrap();
        }
        let ids: Vec<String> = (next..next + poly.points.len()).map(|i| i.to_string()).collect();
        writeln!(s, "l {}", ids.join(" ")).unwrap();
        next += poly.points.len();
    }
    s
}

/// Profile table: `t, r, r', theta, c, A`.
pub fn profile_csv(header: &str, mesh: &Mesh<f64>) -> String {
    let cols: Vec<String> = ["t", "r", "dr_dt", "theta", "c", "A"].map(String::from).to_vec();
    let mut csv = Csv::new(header, &cols);
    for p in &mesh.profile {
        csv.row(&[p.t, p.r, p.dr_dt, p.theta, p.c, p.big_a].map(num));
    }
    csv.finish()
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
