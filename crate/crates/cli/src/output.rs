//! CSV formatting: header row, 17 significant digits.

use std::io::Write;
use std::path::Path;

use paramexpmv::{Error, Result, Scalar};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Real parameters print as plain numbers, complex ones as `re+imi`.
pub fn scalar<T: Scalar>(z: T) -> String {
    if !T::IS_COMPLEX {
        return num(z.to_complex().re);
    }
    let z = z.to_complex();
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
}

pub fn csv(header: &[&str], rows: &[String]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}
