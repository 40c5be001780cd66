use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// 17 significant digits; non-finite values as `nan` / `inf` / `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv_row(fields: &[f64]) -> String {
    let mut s = fields.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

/// Writes to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => io::stdout().lock().write_all(contents),
    }
}

/// Static SVG with one polyline through the finite points, `y` pointing up.
pub fn svg_polyline(points: &[(f64, f64)], title: &str) -> String {
    const SIZE: f64 = 600.0;
    const PAD: f64 = 20.0;
    let pts: Vec<_> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-300);
    let scale = (SIZE - 2.0 * PAD) / span;
    let mut poly = String::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        if i > 0 {
            poly.push(' ');
        }
        let _ = write!(
            poly,
            "{:.3},{:.3}",
            PAD + (x - x0) * scale,
            SIZE - PAD - (y - y0) * scale
        );
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <title>{title}</title>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{poly}\"/>\n\
         </svg>\n"
    )
}
